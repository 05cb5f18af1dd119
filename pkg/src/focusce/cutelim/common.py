"""Shared tree-surgery helpers for the cut-elimination passes.

All transformations in this package treat proof trees as immutable: a
changed node is rebuilt with ``copy_shallow`` and re-attached by splicing
along the root path, sharing all untouched siblings.
"""

import sys
from collections import Counter

from ..prooftree import (AnnForm, Node, ProofError, copy_proof, parent_map)

# unfolding-heavy transformations recurse along proof branches
if sys.getrecursionlimit() < 100_000:
    sys.setrecursionlimit(100_000)


def demote(seq):
    """The all-unfocused version of a sequent."""
    return tuple(AnnForm(af.formula, False) for af in seq)


def has_focus(seq):
    return any(af.focused for af in seq)


def counter_sub(a, b):
    """True iff multiset a is included in multiset b (Counters)."""
    return all(b.get(x, 0) >= n for x, n in a.items())


def seq_index(seq, af):
    """First occurrence index of the annotated formula, or raise."""
    for i, x in enumerate(seq):
        if x == af:
            return i
    raise ProofError("occurrence %r not found in %s" % (af, seq))


def remove_one(seq, af):
    """The sequent with the first occurrence of ``af`` dropped."""
    i = seq_index(seq, af)
    return seq[:i] + seq[i + 1:]


def stack_to(child, target):
    """Stack Weak/Contr nodes under ``child`` until its conclusion is
    multiset-equal to ``target``.

    Surplus occurrences of a formula still present in the target are merged
    by Contr; occurrences of the target missing above are added by Weak.
    Occurrences the child has but the target lacks entirely cannot be
    removed this way and raise.
    """
    cur = child
    cc = Counter(cur.sequent)
    tc = Counter(target)
    for af in list(cc):
        while cc[af] > tc.get(af, 0):
            if tc.get(af, 0) == 0:
                raise ProofError(
                    "cannot contract %r away entirely (target lacks it)" % (af,))
            ns = remove_one(cur.sequent, af)
            cur = Node(ns, "contr", [cur], principal=(seq_index(ns, af),))
            cc[af] -= 1
    for af in tc:
        while cc[af] < tc[af]:
            ns = cur.sequent + (af,)
            cur = Node(ns, "weak", [cur], principal=(len(ns) - 1,))
            cc[af] += 1
    return cur


def splice(root, target, new, pm=None):
    """The tree with the subtree at ``target`` replaced by ``new``,
    rebuilding (only) the nodes on the path to the root."""
    if pm is None:
        pm = parent_map(root)
    cur, node = new, target
    while True:
        par = pm.get(id(node))
        if par is None:
            if node is not root:
                raise ProofError("splice target not in tree")
            return cur
        m = par.copy_shallow()
        m.invalidate()
        m.children = [cur if c is node else c for c in par.children]
        cur, node = m, par


def unfold_d(dnode, tokens, budget=None):
    """One unfolding of a discharge: the D node is removed and each of its
    repeat leaves is replaced by a fresh-token copy of the whole D subtree."""

    def rep(n):
        if budget is not None:
            budget.tick()
        if n.rule == "leaf" and n.token == dnode.token:
            return copy_proof(dnode, tokens, budget)
        if not n.children:
            return n
        m = n.copy_shallow()
        m.invalidate()
        m.children = [rep(c) for c in n.children]
        return m

    return rep(dnode.children[0])


def subtree_contains(root, target):
    stack = [root]
    while stack:
        n = stack.pop()
        if n is target:
            return True
        stack.extend(n.children)
    return False
