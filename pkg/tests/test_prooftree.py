import pytest

from focusce.formula import parse_formula, negate, unfold, Box, Dia
from focusce.prooftree import (AnnForm, Node, ProofError, analyze_clusters,
                               check_global, check_local, check_proof,
                               classify_cuts, companion_map, copy_proof,
                               cut_rank, descendant_positions, foc,
                               infer_cut_formula, iter_nodes, origin_maps,
                               parse_proof, print_proof, proof_closure,
                               proof_equal, seq_equal, seq_set_equal,
                               subproof_at, u)
import fixtures
from fixtures import (PHI, PSI, CHI, DELTA, PSI_BAR, example_proof,
                      excluded_middle_proof, nu_box_proof, simple_cut_proof)

P = parse_formula


def valid(p, allow_mix=False):
    rep = check_proof(p, allow_mix=allow_mix)
    assert rep.ok, rep.render()
    return p


# --- fixtures are valid -----------------------------------------------------

def test_fixture_proofs_valid():
    valid(nu_box_proof())
    valid(excluded_middle_proof())
    valid(fixtures.pi_hat())
    valid(fixtures.tau_hat())
    valid(simple_cut_proof())
    valid(example_proof())


def test_example_conclusion():
    p = example_proof()
    assert p.sequent == (u(PHI), u(DELTA), u(CHI))
    assert infer_cut_formula(p) == PSI


# --- rule semantics ---------------------------------------------------------

def test_origin_maps_or():
    n = Node((u(P("p | q")), foc(P("r"))), "or",
             [Node((u(P("p")), u(P("q")), foc(P("r"))), "ax")], (0,))
    # child isn't really an ax; only the maps are under test
    (m,) = [origin_maps(n)[0]]
    assert m == [0, 0, 1]
    assert descendant_positions(n, 0, 0) == [0, 1]


def test_origin_maps_cut():
    p = simple_cut_proof()
    maps = origin_maps(p)
    assert maps[0] == [0, None]
    assert maps[1] == [None, 1]


def test_bad_rule_instances():
    p, q = P("p"), P("q")
    bad = Node((u(p), u(q)), "ax")
    assert not check_local(bad).ok
    # or rule on an atom
    n = Node((u(p),), "or", [Node((u(p),), "ax")], (0,))
    assert not check_local(n).ok
    # box with a non-diamond side formula
    n = Node((u(Box(p)), u(q)), "box", [Node((u(p), u(q)), "ax")], (0,))
    assert not check_local(n).ok
    # mu premiss keeping focus is wrong
    psi = PSI
    n = Node((foc(psi),), "mu", [Node((foc(unfold(psi)),), "ax")], (0,))
    rep = check_local(n)
    assert not rep.ok and rep.errors[0].category == "bad-rule"


def test_premiss_mismatch_detected():
    chi = P("nu x.[]x")
    leaf = Node((foc(chi),), "leaf", token="z")
    box = Node((foc(Box(chi)),), "box", [leaf], (0,))
    nu = Node((foc(chi),), "nu", [leaf], (0,))  # skips the box: mismatch
    rep = check_local(Node((foc(chi),), "d", [nu], token="z"))
    assert not rep.ok
    assert rep.errors[0].category == "bad-rule"


def test_companion_mismatch():
    p = nu_box_proof()
    leaf = p.children[0].children[0].children[0]
    leaf.token = "nosuch"
    rep = check_local(p)
    assert not rep.ok and rep.errors[0].category == "companion-mismatch"


def test_global_needs_box():
    # d -> nu -> mu-style loop without box is locally fine, globally not
    f = P("nu x.(x | p)")  # unguarded: use a guarded variant instead
    chi = P("nu x.[]x")
    leaf = Node((foc(chi),), "leaf", token="z")
    d = Node((foc(chi),), "d", [leaf], token="z")
    rep = check_local(d)
    assert rep.ok
    rep = check_global(d)
    assert not rep.ok and rep.errors[0].category == "no-box-on-repeat"


def test_global_needs_focus():
    p = nu_box_proof()
    # strip every annotation
    for n in iter_nodes(p):
        n.sequent = tuple(u(af.formula) for af in n.sequent)
        n.invalidate()
    assert check_local(p).ok
    rep = check_global(p)
    assert not rep.ok
    assert rep.errors[0].category == "unfocused-sequent-on-repeat"


def test_global_rejects_focus_on_repeat():
    chi = P("nu x.[]x")
    leaf = Node((u(chi),), "leaf", token="z")
    unf = Node((foc(chi),), "unfocus", [leaf], (0,))
    box = Node((foc(Box(chi)),), "box", [unf], (0,))
    nu = Node((foc(chi),), "nu", [box], (0,))
    f = Node((u(chi),), "focus", [nu], (0,))
    d = Node((u(chi),), "d", [f], token="z")
    rep = check_local(d)
    assert rep.ok, rep.render()
    rep = check_global(d)
    assert not rep.ok
    assert {e.category for e in rep.errors} >= {"focus-on-repeat"}


def test_open_leaf_detected():
    p = P("p")
    n = Node((u(p),), "weak", [Node((), "ax")], (0,))
    assert not check_local(n).ok  # empty ax is also a bad rule
    n2 = Node((u(p), u(P("~p"))), "d", [Node((u(p), u(P("~p"))), "ax")],
              token="t")
    # d with no leaf is fine locally and globally
    assert check_proof(n2).ok


def test_unguarded_formula_rejected():
    from focusce.formula import Mu, Or, Var, Atom
    f = Mu("x", Or(Var("x"), Atom("p")))
    n = Node((u(f), u(negate(f))), "ax")
    rep = check_local(n)
    assert not rep.ok and rep.errors[0].category == "bad-formula"


# --- serialization ----------------------------------------------------------

def test_roundtrip_fixtures():
    for p in (nu_box_proof(), excluded_middle_proof(), simple_cut_proof(),
              example_proof()):
        text = print_proof(p)
        q = parse_proof(text)
        assert proof_equal(p, q)
        assert print_proof(q) == text


def test_parse_proof_text():
    text = '''
    (node (seq "p"^u "~p"^u) (rule cut 1)
      (node (seq "p" "~p") (rule ax))
      (node (seq "p"^u "~p"^u) (rule ax)))
    '''
    p = parse_proof(text)
    assert p.rule == "cut" and p.split == 1
    assert check_proof(p).ok
    assert infer_cut_formula(p) == P("~p")


def test_parse_proof_errors():
    for bad in ("", "(node)", "(node (seq) (rule nope))",
                '(node (seq "p") (rule mix 1))',
                '(node (seq "p") (rule weak))'):
        with pytest.raises(ProofError):
            parse_proof(bad)


# --- clusters ---------------------------------------------------------------

def test_clusters_nu_box():
    p = nu_box_proof()
    info = analyze_clusters(p)
    assert info.proper_count() == 1
    assert info.node_depth(p) == 1
    assert info.is_proper_cluster_of(p)
    assert len(info.cluster_nodes(p)) == 4


def test_clusters_example():
    p = example_proof()
    info = analyze_clusters(p)
    assert info.proper_count() == 2
    assert info.node_depth(p) == 1
    assert not info.is_proper_cluster_of(p)  # the cut is in a trivial cluster
    # the two D nodes sit in distinct proper clusters at depth 1
    ds = [n for n in iter_nodes(p) if n.rule == "d"]
    assert len(ds) == 2
    assert all(info.is_proper_cluster_of(d) for d in ds)
    assert all(info.node_depth(d) == 1 for d in ds)


def test_component():
    p = example_proof()
    info = analyze_clusters(p)
    comp = info.component(p)
    # the root's component: reachable depth-1 nodes; branches that leave
    # for the purely finitary axiom parts have depth 0 and drop out
    all_nodes = list(iter_nodes(p))
    assert p in comp and all(info.node_depth(n) == 1 for n in comp)
    assert len(comp) < len(all_nodes)
    assert all(n.rule != "ax" or info.node_depth(n) == 0 for n in all_nodes
               if n not in comp)


# --- cut classification -----------------------------------------------------

def test_classify_cuts():
    cuts = classify_cuts(example_proof())
    assert len(cuts) == 1
    c = cuts[0]
    assert c.formula == PSI and c.important and c.essential

    cuts = classify_cuts(simple_cut_proof())
    assert len(cuts) == 1
    assert cuts[0].important and not cuts[0].essential

    assert classify_cuts(nu_box_proof()) == []


def test_cut_rank():
    g = proof_closure(example_proof())
    assert cut_rank(example_proof(), g) == g.rank[PSI]
    assert cut_rank(nu_box_proof()) == 0
    assert cut_rank(simple_cut_proof()) == 1


# --- subproofs --------------------------------------------------------------

def test_subproof_identity():
    p = nu_box_proof()
    q = subproof_at(p, p)
    assert proof_equal(p, q)
    assert check_proof(q).ok


def test_subproof_unfolds_open_leaves():
    p = nu_box_proof()
    box = p.children[0].children[0]
    q = subproof_at(p, box)
    assert q.sequent == box.sequent
    assert check_proof(q).ok, check_proof(q).render()
    # the open leaf was replaced by a copy of the companion's subproof
    assert any(n.rule == "d" for n in iter_nodes(q))


def test_subproof_tokens_fresh():
    p = fixtures.pi_hat()
    inner = p.children[0].children[0]  # the mu node under the D
    q = subproof_at(p, inner)
    assert check_proof(q).ok, check_proof(q).render()
    toks = [n.token for n in iter_nodes(q) if n.rule == "d"]
    assert len(toks) == len(set(toks))


def test_copy_proof_fresh_tokens():
    p = fixtures.tau_hat()
    q = copy_proof(p)
    assert proof_equal(p, q)
    old = {n.token for n in iter_nodes(p) if n.rule == "d"}
    new = {n.token for n in iter_nodes(q) if n.rule == "d"}
    assert old.isdisjoint(new)
