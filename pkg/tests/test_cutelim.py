"""Tests for the cut/contraction elimination engines and the driver."""

from collections import Counter

import pytest

from focusce.formula import (Box, closure, negate, parse_formula, unfold)
from focusce.minfocus import minimally_focus
from focusce.prooftree import (AnnForm, Node, ProofError, analyze_clusters,
                               check_proof, classify_cuts, foc,
                               infer_cut_formula, iter_nodes, parent_map,
                               proof_closure, u)
from focusce.cutelim import cut_order, eliminate_cuts
from focusce.cutelim.contraction import eliminate_contractions, invert_rule
from focusce.cutelim.mix import eliminate_unimportant, make_essential
from focusce.cutelim.traversal import (Multicut, conform, eliminate_important,
                                       initial_traversed)
from focusce.msetorder import dm_less

import fixtures
from fixtures import (PHI, PSI, CHI, DELTA, example_proof,
                      excluded_middle_proof, pi_hat, simple_cut_proof,
                      tau_hat)
from corpus import composed_cut_proofs, searched_proofs

P = parse_formula


def valid(p, allow_mix=False):
    rep = check_proof(p, allow_mix=allow_mix)
    assert rep.ok, rep.render()
    return p


def rules(p):
    return Counter(n.rule for n in iter_nodes(p))


# --- contraction elimination -------------------------------------------------

def contr_fixture_in_cycle():
    """pi_hat with a contraction/weakening pair spliced into its cycle."""
    p = pi_hat()
    box = next(n for n in iter_nodes(p) if n.rule == "box")
    child = box.children[0]
    w = Node(child.sequent + (child.sequent[0],), "weak", [child],
             (len(child.sequent),))
    c = Node(child.sequent, "contr", [w], (0,))
    pm = parent_map(p)
    from focusce.cutelim.common import splice
    return splice(p, child, c, pm)


def test_eliminate_contractions_identity():
    p = excluded_middle_proof()
    out = eliminate_contractions(p)
    assert rules(out)["contr"] == 0
    valid(out)


def test_eliminate_contractions_in_cycle():
    p = valid(contr_fixture_in_cycle())
    assert rules(p)["contr"] == 1
    out = eliminate_contractions(p)
    valid(out)
    assert rules(out)["contr"] == 0
    assert Counter(out.sequent) == Counter(p.sequent)


def test_invert_rule_mu():
    # inverting the mu occurrence replaces it by its unfolding
    p = excluded_middle_proof()
    mu = p.sequent[0].formula
    q = invert_rule(p, "mu")
    valid(q)
    assert Counter(x.formula for x in q.sequent) == \
        Counter([unfold(mu), p.sequent[1].formula])


def test_invert_rule_corpus():
    from focusce.formula import Or, And, Mu, Nu
    from focusce.cutelim.contraction import shallow_depth
    shapes = {Or: ("or", 2), And: ("and", 2), Mu: ("mu", 1), Nu: ("nu", 1)}
    done = 0
    for p in searched_proofs(60):
        hit = next(((i, shapes[type(af.formula)]) for i, af in
                    enumerate(p.sequent) if type(af.formula) in shapes),
                   None)
        if hit is None:
            continue
        pos, (mode, arity) = hit
        d0 = analyze_clusters(p).node_depth(p)
        s0 = shallow_depth(p)
        for branch in range(arity):
            q = invert_rule(p, mode, branch, pos=pos)
            valid(q)
            assert analyze_clusters(q).node_depth(q) <= d0
            assert shallow_depth(q) <= s0
        done += 1
    assert done >= 5


# --- important cuts (multicut traversal) --------------------------------------

def test_initial_traversed_preconditions():
    with pytest.raises(ProofError):
        initial_traversed(pi_hat(), tau_hat(), PHI)  # nu-formula


def test_eliminate_important_worked_example():
    out = eliminate_important(pi_hat(), tau_hat(), PSI)
    valid(out)
    assert Counter(out.sequent) == Counter((u(PHI), u(DELTA), u(CHI)))
    graph = closure([PSI, P("p")])
    rank_psi = graph.rank[PSI]
    for n in iter_nodes(out):
        if n.rule == "cut":
            g = proof_closure(out)
            assert g.rank[infer_cut_formula(n)] < rank_psi
    assert rules(out)["d"] >= 1


# --- essential pushing ---------------------------------------------------------

def test_make_essential_literal_cut_vanishes():
    p = simple_cut_proof()
    out = make_essential(p)
    valid(out)
    assert rules(out)["cut"] == 0
    assert Counter(out.sequent) == Counter(p.sequent)


def box_cut_proof():
    """A cut on a box formula whose premisses both start with Box."""
    Pp, NP = P("p"), P("~p")
    CHI2 = P("~p | p")
    ax = lambda: Node((u(NP), u(Pp)), "ax", (), (0, 1))
    em = Node((u(CHI2),), "or", [ax()], (0,))
    lbox = Node((u(Box(CHI2)),), "box", [em], (0,))
    w1 = Node((u(Pp), u(NP), u(Pp)), "weak", [ax()], (0,))
    o1 = Node((u(Pp), u(CHI2)), "or", [w1], (1,))
    w2 = Node((u(NP), u(NP), u(Pp)), "weak", [ax()], (0,))
    o2 = Node((u(NP), u(CHI2)), "or", [w2], (1,))
    andn = Node((u(negate(CHI2)), u(CHI2)), "and", [o1, o2], (0,))
    rbox = Node((u(negate(Box(CHI2))), u(Box(CHI2))), "box", [andn], (1,))
    return Node((u(Box(CHI2)),), "cut", [lbox, rbox], split=0)


def test_make_essential_box_commutation():
    p = valid(box_cut_proof())
    out = make_essential(p)
    valid(out)
    assert rules(out)["cut"] == 0
    assert Counter(out.sequent) == Counter(p.sequent)


# --- unimportant cuts -----------------------------------------------------------

def in_cycle_cut_proof(at_box_premiss=True):
    """A nu x.[]x cycle with a cut spliced inside the repeat path."""
    NU = P("nu x.[]x")
    Pp, NP = P("p"), P("~p")
    CHI2, NCHI2 = P("~p | p"), negate(P("~p | p"))
    leaf = lambda: Node((foc(NU),), "leaf", (), (), token="x")
    ax = Node((u(NP), u(Pp)), "ax", (), (0, 1))
    left = Node((u(CHI2),), "or", [ax], (0,))
    if at_box_premiss:
        sub = leaf
        anchor = foc(NU)
    else:
        sub = lambda: Node((foc(unfold(NU)),), "box", [leaf()], (0,))
        anchor = foc(unfold(NU))
    w1 = Node((u(Pp), anchor), "weak", [sub()], (0,))
    w2 = Node((u(NP), anchor), "weak", [sub()], (0,))
    right = Node((u(NCHI2), anchor), "and", [w1, w2], (0,))
    cut = Node((anchor,), "cut", [left, right], split=0)
    if at_box_premiss:
        box = Node((foc(unfold(NU)),), "box", [cut], (0,))
        nu = Node((foc(NU),), "nu", [box], (0,))
    else:
        nu = Node((foc(NU),), "nu", [cut], (0,))
    return Node((foc(NU),), "d", [nu], token="x")


@pytest.mark.parametrize("at_box", [True, False])
def test_eliminate_unimportant_in_cycle(at_box):
    p = valid(in_cycle_cut_proof(at_box))
    (ci,) = classify_cuts(p)
    assert not ci.important
    out = eliminate_unimportant(p)
    valid(out)
    assert rules(out)["cut"] == 0
    assert Counter(out.sequent) == Counter(p.sequent)


def test_eliminate_unimportant_cut_free_identity():
    p = fixtures.nu_box_proof()
    out = eliminate_unimportant(p)
    valid(out)
    assert rules(out)["cut"] == 0


# --- driver ----------------------------------------------------------------------

def test_eliminate_cuts_cut_free_unchanged():
    p = excluded_middle_proof()
    assert eliminate_cuts(p) is p


def test_eliminate_cuts_worked_example():
    p = example_proof()
    orders = []
    out = eliminate_cuts(p, trace=lambda e: orders.append(e["order"]))
    valid(out)
    assert rules(out)["cut"] == 0
    assert Counter(out.sequent) == Counter(p.sequent)
    assert orders[-1] == []
    # the full pipeline also decontracts
    out2 = eliminate_contractions(out)
    valid(out2)
    assert rules(out2)["contr"] == 0


def test_cut_order_descends():
    p = example_proof()
    seen = [sorted(cut_order(p))]
    eliminate_cuts(p, trace=lambda e: seen.append(e["order"]))
    from focusce.msetorder import Multiset
    for a, b in zip(seen[1:], seen):
        assert dm_less(Multiset(a), Multiset(b))


def test_eliminate_cuts_composed_corpus():
    for cut, left, right, psi in composed_cut_proofs(30):
        out = eliminate_cuts(cut)
        valid(out)
        assert rules(out)["cut"] == 0
        assert Counter(out.sequent) == Counter(cut.sequent)


# --- conform (the generic annotation bridge) --------------------------------------

def test_conform_identity_and_flip():
    ax = Node((u(P("~p")), u(P("p"))), "ax", (), (0, 1))
    assert conform(ax, ax.sequent) is ax
    flipped = conform(ax, (foc(P("~p")), u(P("p"))))
    assert Counter(flipped.sequent) == Counter((foc(P("~p")), u(P("p"))))
    weakened = conform(ax, (u(P("~p")), u(P("p")), u(P("q"))))
    assert Counter(x.formula for x in weakened.sequent) == \
        Counter([P("~p"), P("p"), P("q")])
