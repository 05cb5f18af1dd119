"""Top-level driver: full cut elimination by cut-order descent.

Each iteration re-focuses the proof minimally, picks a topmost cut-bearing
cluster (no cuts above it outside its own cluster), dispatches on its kind
-- proper clusters shed their cuts through the mix engine, trivial
non-essential cuts are pushed to fixpoint formulas, essential cuts are
removed by the multicut traversal -- and splices the result back.  The
multiset of weighted cut ranks (the cut-order) strictly decreases under
the Dershowitz--Manna ordering at every step, which is asserted.
"""

from collections import Counter

from ..formula import Nu, is_fixpoint, negate
from ..minfocus import minimally_focus
from ..msetorder import Multiset, dm_less
from ..prooftree import (
    Budget,
    Node,
    ProofError,
    TokenGen,
    analyze_clusters,
    check_proof,
    classify_cuts,
    infer_cut_formula,
    iter_nodes,
    proof_closure,
    subproof_at,
)
from .common import splice
from .contraction import eliminate_contractions
from .mix import eliminate_unimportant, make_essential
from .traversal import eliminate_important

__all__ = ["eliminate_cuts", "cut_order"]


def cut_order(p, info=None, graph=None):
    """The driver's termination measure: a multiset of naturals holding
    3n+2 for each proper cluster whose cuts have maximal rank n, 3n+1 for
    each non-essential important cut of rank n, and 3n for each essential
    cut of rank n."""
    if info is None:
        info = analyze_clusters(p)
    if graph is None:
        graph = proof_closure(p)
    cuts = classify_cuts(p, info, diagnostics=False)
    proper_max = {}
    items = []
    for ci in cuts:
        n = graph.rank[ci.formula]
        if not ci.important:
            cid = info.cluster_id[id(ci.node)]
            proper_max[cid] = max(proper_max.get(cid, 0), n)
        elif ci.essential:
            items.append(3 * n)
        else:
            items.append(3 * n + 1)
    items.extend(3 * n + 2 for n in proper_max.values())
    return Multiset(items)


def _pick_cluster(p, info):
    """A cut-bearing cluster such that the subproof at its lowest member
    contains no cuts outside the cluster itself (leftmost such)."""
    cut_clusters = []
    seen = set()
    for n in info.nodes:  # preorder
        if n.rule != "cut":
            continue
        cid = info.cluster_id[id(n)]
        if cid not in seen:
            seen.add(cid)
            cut_clusters.append(cid)
    for cid in cut_clusters:
        root_most = next(n for n in info.nodes
                         if info.cluster_id[id(n)] == cid)
        clean = all(info.cluster_id[id(m)] == cid
                    for m in iter_nodes(root_most) if m.rule == "cut")
        if clean:
            return root_most, info.proper[cid]
    raise ProofError("internal: no topmost cut-bearing cluster found")


def eliminate_cuts(p, budget=None, trace=None):
    """Transform a valid proof into a valid cut-free proof of the same
    sequent."""
    budget = budget if budget is not None else Budget()
    tokens = TokenGen("q")
    if not any(n.rule == "cut" for n in iter_nodes(p)):
        return p
    goal = Counter(p.sequent)
    order = cut_order(p)
    iteration = 0
    while True:
        budget.tick()
        p = minimally_focus(p)
        info = analyze_clusters(p)
        if not any(n.rule == "cut" for n in info.nodes):
            break
        v, proper = _pick_cluster(p, info)
        sub = subproof_at(p, v, budget=budget, tokens=tokens)
        if proper:
            kind = "unimportant"
            new = eliminate_unimportant(sub, tokens=tokens, budget=budget)
        else:
            left = minimally_focus(
                eliminate_contractions(sub.children[0], budget=budget))
            right = minimally_focus(
                eliminate_contractions(sub.children[1], budget=budget))
            phi = infer_cut_formula(sub)
            if not is_fixpoint(phi):
                kind = "essential-push"
                cut = Node(sub.sequent, "cut", [left, right],
                           split=sub.split)
                new = make_essential(cut, tokens=tokens, budget=budget)
            else:
                kind = "important"
                if isinstance(phi, Nu):
                    left, right, phi = right, left, negate(phi)
                new = eliminate_important(left, right, phi, tokens=tokens,
                                          budget=budget)
        p = splice(p, v, new)
        new_order = cut_order(p)
        if not dm_less(new_order, order):
            raise ProofError(
                "internal: cut-order did not decrease (%s -> %s)"
                % (sorted(order), sorted(new_order)))
        iteration += 1
        if trace is not None:
            trace({"iteration": iteration, "kind": kind,
                   "order": sorted(new_order)})
        order = new_order
    rep = check_proof(p)
    if not rep.ok:
        raise ProofError("eliminate_cuts produced an invalid proof:\n%s"
                         % rep.render())
    if Counter(p.sequent) != goal:
        raise ProofError("internal: conclusion changed during elimination")
    return p
