"""Bounded cut-free proof search.

A pragmatic tableau-style prover for the Focus system: saturate the local
rules (Or, Mu, Nu, And), then contract duplicates, park the focus on the
navy formulas of maximal rank, open a companion (D) and fire a Box rule,
closing branches on axioms or on exact repeats whose segment is focused,
F-free, and crosses a Box.  It is a proof generator for desk-scale
sequents, not a decision procedure: failure never claims invalidity.
"""

from .formula import (And, Atom, Box, ClosureGraph, Dia, Mu, NegAtom, Nu,
                      Or, NAVY, check_afmc, negate, unfold)
from .prooftree import AnnForm, Node, TokenGen, iter_nodes, seq_sorted

__all__ = ["SearchBudget", "NoProofWithinBudget", "prove"]


class NoProofWithinBudget(Exception):
    """Search gave up; says nothing about validity."""


class SearchBudget:
    """Node and modal-depth caps for one prove() call."""

    def __init__(self, max_nodes=200_000, max_depth=60):
        if max_nodes <= 0 or max_depth <= 0:
            raise ValueError("budget must be positive")
        self.max_nodes = max_nodes
        self.max_depth = max_depth


class _Frame:
    """Open companion: token, its sequent, and path-counter snapshots."""

    __slots__ = ("token", "sequent", "boxes", "focuses", "unfocused")

    def __init__(self, token, sequent, boxes, focuses, unfocused):
        self.token = token
        self.sequent = sequent
        self.boxes = boxes
        self.focuses = focuses
        self.unfocused = unfocused


def _first(seq, cls):
    for i, af in enumerate(seq):
        if isinstance(af.formula, cls):
            return i
    return None


def _complementary_pair(seq):
    atoms = {}
    for i, af in enumerate(seq):
        if isinstance(af.formula, Atom):
            atoms.setdefault(af.formula.name, [None, None])[0] = i
        elif isinstance(af.formula, NegAtom):
            atoms.setdefault(af.formula.name, [None, None])[1] = i
    for name in sorted(atoms):
        i, j = atoms[name]
        if i is not None and j is not None:
            return i, j
    return None


class _Search:
    def __init__(self, graph, budget):
        self.graph = graph
        self.budget = budget
        self.nodes = 0
        self.tokens = TokenGen("x")

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise NoProofWithinBudget(
                "node budget %d exhausted" % self.budget.max_nodes)

    def make(self, *args, **kwargs):
        self.tick()
        return Node(*args, **kwargs)

    def target_focus(self, af):
        """Whether a formula belongs in focus at a modal layer: navy and of
        the maximal navy rank present (computed by the caller)."""
        return self.graph.color(af.formula) == NAVY

    # -- branch construction -------------------------------------------

    def prove(self, seq, frames, counters, depth):
        """Return a proof of ``seq`` or None.  ``counters`` is
        (boxes, focuses, unfocused-nodes) along the current branch."""
        self.tick()
        seq = seq_sorted(seq)
        boxes, focuses, unfoc = counters
        if not any(af.focused for af in seq):
            unfoc += 1
        counters = (boxes, focuses, unfoc)

        # axiom (weakening the rest away)
        pair = _complementary_pair(seq)
        if pair is not None:
            return self.close_axiom(seq, pair, counters)

        # local saturation: Or > Mu > Nu > And
        i = _first(seq, Or)
        if i is not None:
            f, a = seq[i]
            prem = seq[:i] + (AnnForm(f.left, a), AnnForm(f.right, a)) + seq[i + 1:]
            sub = self.prove(prem, frames, counters, depth)
            return None if sub is None else \
                self.make(seq, "or", [sub], principal=(i,))
        i = _first(seq, Mu)
        if i is not None:
            f, a = seq[i]
            prem = seq[:i] + (AnnForm(unfold(f), False),) + seq[i + 1:]
            sub = self.prove(prem, frames, counters, depth)
            return None if sub is None else \
                self.make(seq, "mu", [sub], principal=(i,))
        i = _first(seq, Nu)
        if i is not None:
            f, a = seq[i]
            prem = seq[:i] + (AnnForm(unfold(f), a),) + seq[i + 1:]
            sub = self.prove(prem, frames, counters, depth)
            return None if sub is None else \
                self.make(seq, "nu", [sub], principal=(i,))
        i = _first(seq, And)
        if i is not None:
            f, a = seq[i]
            lp = seq[:i] + (AnnForm(f.left, a),) + seq[i + 1:]
            rp = seq[:i] + (AnnForm(f.right, a),) + seq[i + 1:]
            left = self.prove(lp, frames, counters, depth)
            if left is None:
                return None
            right = self.prove(rp, frames, counters, depth)
            return None if right is None else \
                self.make(seq, "and", [left, right], principal=(i,))

        # saturated: literals, diamonds and boxes only
        return self.modal_layer(seq, frames, counters, depth)

    def close_axiom(self, seq, pair, counters):
        i, j = pair
        keep = {i, j}
        boxes, focuses, unfoc = counters
        chain = []
        cur = list(seq)
        while len(cur) > 2:
            k = next(p for p in range(len(cur)) if p not in keep)
            chain.append((tuple(cur), k))
            del cur[k]
            keep = {p - (p > k) for p in keep}
        ax = self.make(tuple(cur), "ax")
        node = ax
        for concl, k in reversed(chain):
            node = self.make(concl, "weak", [node], principal=(k,))
        return node

    def modal_layer(self, seq, frames, counters, depth):
        if depth >= self.budget.max_depth:
            raise NoProofWithinBudget(
                "modal depth %d exhausted" % self.budget.max_depth)
        boxes, focuses, unfoc = counters

        # weaken duplicates away so repeats can line up (keeps the output
        # contraction-free)
        dedup = []
        cur = list(seq)
        changed = True
        while changed:
            changed = False
            for i in range(len(cur) - 1):
                if cur[i] == cur[i + 1]:
                    dedup.append((tuple(cur), i + 1))
                    del cur[i + 1]
                    changed = True
                    break
        cur = tuple(cur)

        # refocus: navy formulas of maximal navy rank go into focus
        navy_ranks = [self.graph.rank[af.formula] for af in cur
                      if self.graph.color(af.formula) == NAVY]
        k = max(navy_ranks) if navy_ranks else None
        target = tuple(
            AnnForm(af.formula,
                    k is not None and self.graph.color(af.formula) == NAVY
                    and self.graph.rank[af.formula] == k)
            for af in cur)
        refocus = target != cur
        if refocus:
            focuses += 1
        if not any(af.focused for af in target):
            unfoc += 1

        # exact repeat with a Box, no F, and focus all along the segment
        for fr in reversed(frames):
            if (fr.sequent == target and boxes > fr.boxes
                    and focuses == fr.focuses and unfoc == fr.unfocused):
                leaf = self.make(target, "leaf", token=fr.token)
                return self.wrap_layer(seq, dedup, cur, target, refocus, leaf)

        if _first(cur, Box) is None:
            return None

        token = self.tokens.fresh()
        frame = _Frame(token, target, boxes, focuses, unfoc)
        for bi, af in enumerate(target):
            if not isinstance(af.formula, Box):
                continue
            sub = self.box_step(target, bi, frames + [frame],
                                (boxes + 1, focuses, unfoc), depth + 1)
            if sub is not None:
                dnode = self.make(target, "d", [sub], token=token)
                return self.wrap_layer(seq, dedup, cur, target, refocus, dnode)
        return None

    def box_step(self, target, bi, frames, counters, depth):
        """Weaken non-diamond side formulas, then apply Box at ``bi``."""
        chain = []
        cur = list(target)
        pos = bi
        i = 0
        while i < len(cur):
            if i == pos or isinstance(cur[i].formula, Dia):
                i += 1
                continue
            chain.append((tuple(cur), i))
            del cur[i]
            if i < pos:
                pos -= 1
        boxes, focuses, unfoc = counters
        # weakening may strip the focus off intermediate sequents
        unfoc += sum(1 for concl, k in chain
                     if not any(af.focused for af in
                                concl[:k] + concl[k + 1:]))
        counters = (boxes, focuses, unfoc)
        prem = tuple(AnnForm(af.formula.body, af.focused) for af in cur)
        sub = self.prove(prem, frames, counters, depth)
        if sub is None:
            return None
        node = self.make(tuple(cur), "box", [sub], principal=(pos,))
        for concl, k in reversed(chain):
            node = self.make(concl, "weak", [node], principal=(k,))
        return node

    def wrap_layer(self, seq, dedup, cur, target, refocus, top):
        """Re-attach the dedup weakenings and the U/F refocus below the
        modal layer's D (or repeat leaf)."""
        node = top
        if refocus:
            flips_on = tuple(i for i, (a, b) in enumerate(zip(cur, target))
                             if b.focused and not a.focused)
            flips_off = tuple(i for i, (a, b) in enumerate(zip(cur, target))
                              if a.focused and not b.focused)
            if flips_on:
                mid = tuple(AnnForm(af.formula,
                                    af.focused and target[i].focused)
                            for i, af in enumerate(cur))
                node = self.make(mid, "focus", [node], principal=flips_on)
            if flips_off:
                node = self.make(cur, "unfocus", [node], principal=flips_off)
        for concl, i in reversed(dedup):
            node = self.make(concl, "weak", [node], principal=(i,))
        return node


def _prune_unused_tokens(root):
    """Splice out D nodes whose token is never used by a leaf."""
    used = {n.token for n in iter_nodes(root) if n.rule == "leaf"}

    def go(n):
        while n.rule == "d" and n.token not in used:
            n = n.children[0]
        n.children = [go(c) for c in n.children]
        n.invalidate()
        return n

    return go(root)


def prove(sequent, budget=None):
    """Search for a Focus proof of the given formulas (all unfocused).

    ``sequent`` is an iterable of formulas or AnnForm.  Raises
    NoProofWithinBudget when no proof is found within the caps.
    """
    if budget is None:
        budget = SearchBudget()
    seq = tuple(af if isinstance(af, AnnForm) else AnnForm(af, False)
                for af in sequent)
    if not seq:
        raise ValueError("empty sequent")
    for af in seq:
        report = check_afmc(af.formula)
        if not report.accepted:
            raise ValueError("formula rejected: %s" % "; ".join(report.problems))
    graph = ClosureGraph([af.formula for af in seq] +
                         [negate(af.formula) for af in seq])
    searcher = _Search(graph, budget)
    out = searcher.prove(seq, [], (0, 0, 0), 0)
    if out is None:
        raise NoProofWithinBudget("search space exhausted under budget")
    return _prune_unused_tokens(out)
