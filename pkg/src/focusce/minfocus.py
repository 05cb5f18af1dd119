"""Focus-annotation normal forms.

Two normalizations over valid proofs, both touching only focus bookkeeping
(F/U nodes and ^f/^u marks), never the logical rule skeleton:

* ``minimally_focus`` rewrites a proof so that focus is used as sparingly
  as possible: every F sits directly below a companion (D) node and focuses
  only navy formulas of one rank, nodes outside proper clusters carry no
  focus at all, and inside a proper cluster the only U nodes are the ones
  demoting formulas whose rank dropped below the cluster's focus rank.

* ``remove_unfocus_on_repeat_paths`` splices out U nodes that lie on
  cycles, re-focusing the affected occurrences upwards instead.
"""

from collections import Counter, deque

from .formula import NAVY, negate
from .prooftree import (
    AnnForm,
    Node,
    ProofError,
    analyze_clusters,
    companion_map,
    copy_proof,
    expected_premisses,
    infer_cut_formula,
    iter_nodes,
    origin_maps,
    parent_map,
    proof_closure,
)

__all__ = [
    "strip_focus_rules",
    "minimally_focus",
    "is_minimally_focused",
    "remove_unfocus_on_repeat_paths",
]


def strip_focus_rules(root):
    """Copy of the proof with every focus/unfocus node spliced out.

    The result is generally not rule-consistent around the spliced edges;
    callers are expected to recompute annotations.
    """
    def go(n):
        while n.rule in ("focus", "unfocus"):
            n = n.children[0]
        m = n.copy_shallow()
        m.children = [go(c) for c in n.children]
        m.invalidate()
        return m

    return go(root)


def _focus_counts(seq):
    return Counter(af.formula for af in seq if af.focused)


def _all_unfocused(seq):
    return not any(af.focused for af in seq)


def _cut_formula_by_shape(node):
    """Cut/mix formula of ``node`` ignoring annotations.

    Plain multiset subtraction on formulas, usable on trees whose
    annotations are mid-rewrite.
    """
    if node.split is None or not node.children:
        raise ProofError("cut node missing split or children")
    lc = node.counts[0] if node.rule == "mix" else 1
    left = Counter(af.formula for af in node.children[0].sequent)
    below = Counter(af.formula for af in node.sequent[:node.split])
    diff = left - below
    if sum(diff.values()) != lc:
        raise ProofError("cannot infer cut formula")
    (phi,) = set(diff)
    return phi


def _flip(seq, formula_counts, to_focused):
    """Flip ``formula_counts`` occurrences of each formula in ``seq`` from
    u to f (or back).  Returns (new sequent, flipped positions)."""
    need = dict(formula_counts)
    out = list(seq)
    positions = []
    for i, af in enumerate(seq):
        if af.focused != to_focused and need.get(af.formula, 0) > 0:
            need[af.formula] -= 1
            out[i] = AnnForm(af.formula, to_focused)
            positions.append(i)
    if any(v > 0 for v in need.values()):
        raise ProofError("cannot flip annotations: occurrence missing")
    return tuple(out), tuple(positions)


def _bridge(child, want, full=False):
    """Stack U/F nodes below ``child`` so that the focused-formula counts
    of the bottom sequent equal ``want`` (a Counter over formulas).

    With ``full`` the whole focus set is routed through an all-unfocused
    intermediate sequent (used on depth-drop edges, where the U below the
    drop must have a fully unfocused premiss).
    """
    have = _focus_counts(child.sequent)
    if have == want and not (full and want):
        return child
    cur = child
    defocus = have if full else have - want
    refocus = want if full else want - have
    if defocus:
        # the premiss of an F carries focus, so it must start a cycle
        if child.rule != "d":
            raise ProofError(
                "internal: focus bridge above a non-companion node")
        seq, positions = _flip(cur.sequent, defocus, False)
        cur = Node(seq, "focus", [cur], principal=positions)
    if refocus:
        seq, positions = _flip(cur.sequent, refocus, True)
        cur = Node(seq, "unfocus", [cur], principal=positions)
    return cur


def minimally_focus(root):
    """Rewrite a valid proof into minimally focused form.

    Keeps the rule skeleton and the root sequent (annotations included),
    only adding and deleting F/U nodes and re-deriving the ^f/^u marks.
    """
    stripped = strip_focus_rules(root)
    info = analyze_clusters(stripped)
    graph = proof_closure(stripped)

    # Per proper cluster: the focus rank is the highest rank of a navy
    # formula the input keeps focused somewhere in the cluster.  A valid
    # proof always has one (successful repeats need everlasting focus, and
    # a focus chain surviving a whole cycle can only ride a navy formula).
    focus_rank = {}
    for cid, nodes in info.members.items():
        if not info.proper[cid]:
            continue
        best = None
        for n in nodes:
            for af in n.sequent:
                if af.focused and graph.color(af.formula) == NAVY:
                    r = graph.rank[af.formula]
                    if best is None or r > best:
                        best = r
        if best is None:
            raise ProofError(
                "internal: proper cluster keeps no navy formula in focus")
        focus_rank[cid] = best

    def reassign(n):
        cid = info.cluster_id[id(n)]
        if not info.proper[cid]:
            return tuple(AnnForm(af.formula, False) for af in n.sequent)
        k = focus_rank[cid]
        return tuple(
            AnnForm(af.formula,
                    af.focused and graph.rank[af.formula] == k
                    and graph.color(af.formula) == NAVY)
            for af in n.sequent)

    def rebuild(n):
        m = n.copy_shallow()
        m.sequent = reassign(n)
        m.invalidate()
        if not n.children:
            m.children = []
            return m
        if n.rule in ("cut", "mix"):
            phi = _cut_formula_by_shape(n)
            lc, rc = n.counts if n.rule == "mix" else (1, 1)
            k = n.split
            exps = [
                m.sequent[:k] + tuple(AnnForm(phi, False)
                                      for _ in range(lc)),
                tuple(AnnForm(negate(phi), False)
                      for _ in range(rc)) + m.sequent[k:],
            ]
        else:
            exps = [exp for exp, _ in expected_premisses(m)]
        kids = []
        for exp, c in zip(exps, n.children):
            built = rebuild(c)
            drop = info.depth[id(c)] < info.depth[id(n)]
            kids.append(_bridge(built, _focus_counts(exp), full=drop))
        m.children = kids
        return m

    out = rebuild(stripped)
    return _bridge(out, _focus_counts(root.sequent))


def is_minimally_focused(root, graph=None):
    """Check the four minimal-focus conditions.

    Returns (ok, problems).  An all-unfocused child below a depth drop
    counts as satisfying the U-at-drop condition vacuously.
    """
    info = analyze_clusters(root)
    if graph is None:
        graph = proof_closure(root)
    problems = []

    for n in iter_nodes(root):
        if n.rule == "focus":
            if n.children[0].rule != "d":
                problems.append(
                    "F whose premiss is not a companion: %r" % (n,))
            ranks = set()
            for i in n.principal:
                f = n.sequent[i].formula
                if graph.color(f) != NAVY:
                    problems.append("F focuses non-navy formula %s" % (f,))
                ranks.add(graph.rank[f])
            if len(ranks) > 1:
                problems.append(
                    "F focuses formulas of distinct ranks %s" % sorted(ranks))
        nd = info.node_depth(n)
        for c in n.children:
            if info.node_depth(c) < nd and not _all_unfocused(c.sequent):
                if not (c.rule == "unfocus"
                        and _all_unfocused(c.children[0].sequent)):
                    problems.append(
                        "focus crosses a depth drop without a clearing U: "
                        "%r -> %r" % (n, c))

    for cid, nodes in info.members.items():
        if not info.proper[cid]:
            continue
        k = 0
        for n in nodes:
            for af in n.sequent:
                if af.focused:
                    k = max(k, graph.rank[af.formula])
        for n in nodes:
            low = [i for i, af in enumerate(n.sequent)
                   if af.focused and graph.rank[af.formula] < k]
            if low and (n.rule != "unfocus"
                        or not set(low) <= set(n.principal)):
                problems.append(
                    "focused formula below the cluster focus rank is not "
                    "being demoted: %r" % (n,))
            if n.rule == "unfocus":
                for i in n.principal:
                    if graph.rank[n.sequent[i].formula] >= k:
                        problems.append(
                            "in-cluster U demotes a focus-rank formula: %r"
                            % (n,))
    return (not problems, problems)


def remove_unfocus_on_repeat_paths(root):
    """Rewrite a valid proof so no U node lies on a cycle.

    Each such U is spliced out and the un-focusing it performed is undone
    upwards through the proof graph (crossing back edges), adjusting F/U
    principal sets on the way.  Only adds focus, so this terminates.
    """
    root = copy_proof(root)
    while True:
        info = analyze_clusters(root)
        target = None
        for n in iter_nodes(root):
            if n.rule == "unfocus" and info.is_proper_cluster_of(n):
                target = n
                break
        if target is None:
            return _drop_identity_focus_rules(root)
        _splice_unfocus(root, target)


def _splice_unfocus(root, target):
    parents = parent_map(root)
    comp = companion_map(root)
    leaves = {}
    for n in iter_nodes(root):
        if n.rule == "leaf":
            leaves.setdefault(n.token, []).append(n)
    # positional descendant maps, computed while the proof is still valid;
    # flips below never reorder occurrences, so they stay usable
    omaps = {id(n): origin_maps(n) for n in iter_nodes(root)
             if n.children}
    child_index = {}
    for n in iter_nodes(root):
        for i, c in enumerate(n.children):
            child_index[id(c)] = i

    work = deque()
    child = target.children[0]
    tmap = omaps[id(target)][0]
    principal = set(target.principal)
    for pos, origin in enumerate(tmap):
        if origin in principal:
            work.append((child, pos))

    def sync_token(token, formula):
        group = [comp[token]] + leaves.get(token, [])
        top = max(_focus_counts(n.sequent)[formula] for n in group)
        for n in group:
            if _focus_counts(n.sequent)[formula] < top:
                for i, af in enumerate(n.sequent):
                    if af.formula == formula and not af.focused:
                        work.append((n, i))
                        break

    while work:
        n, pos = work.popleft()
        af = n.sequent[pos]
        if af.focused:
            continue
        seq = list(n.sequent)
        seq[pos] = AnnForm(af.formula, True)
        n.sequent = tuple(seq)
        n.invalidate()

        # upwards, into the premisses
        if n.children:
            # a mu unfolding and the premiss of a U stay unfocused; the
            # premiss of an F is focused already, the F just stops
            # re-focusing this occurrence
            skip = (n.rule in ("mu", "unfocus") and pos in n.principal)
            if n.rule == "focus" and pos in n.principal:
                n.principal = tuple(i for i in n.principal if i != pos)
                skip = True
            if not skip:
                for ci, omap in enumerate(omaps[id(n)]):
                    for cpos, origin in enumerate(omap):
                        if origin == pos:
                            work.append((n.children[ci], cpos))

        # downwards, into the conclusion side
        p = parents.get(id(n))
        if p is not None:
            apos = omaps[id(p)][child_index[id(n)]][pos]
            if apos is None:
                raise ProofError(
                    "internal: focus demanded on a cut-introduced formula")
            if p.rule == "mu" and apos in p.principal:
                raise ProofError(
                    "internal: focus demanded on a mu unfolding")
            if not p.sequent[apos].focused:
                if p.rule == "focus":
                    # an F below may simply start focusing this occurrence
                    if apos not in p.principal:
                        p.principal = tuple(sorted(p.principal + (apos,)))
                elif p.rule == "unfocus" and apos in p.principal:
                    p.principal = tuple(i for i in p.principal if i != apos)
                    work.append((p, apos))
                else:
                    work.append((p, apos))

        if n.rule in ("d", "leaf") and n.token in comp:
            sync_token(n.token, af.formula)

    # cut the target out of the tree
    p = parents[id(target)]
    p.children[child_index[id(target)]] = target.children[0]
    for n in iter_nodes(root):
        n.invalidate()


def _drop_identity_focus_rules(root):
    """Splice out F/U nodes whose principal set became empty."""
    def go(n):
        while n.rule in ("focus", "unfocus") and not n.principal:
            n = n.children[0]
        n.children = [go(c) for c in n.children]
        n.invalidate()
        return n

    return go(root)
