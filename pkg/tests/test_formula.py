import random

import pytest

from focusce.formula import (Atom, NegAtom, Var, Or, And, Dia, Box, Mu, Nu,
                             FormulaError, ParseError, MAGENTA, NAVY, NEITHER,
                             check_afmc, classify_color, closure, free_vars,
                             negate, parse_formula, print_formula, subst,
                             trace_successors, unfold, well_name)
from randform import rand_formula, sample


P = parse_formula


# --- parsing and printing -------------------------------------------------

def test_parse_precedence():
    assert P("p | q & r") == Or(Atom("p"), And(Atom("q"), Atom("r")))
    assert P("p & q | r") == Or(And(Atom("p"), Atom("q")), Atom("r"))
    assert P("(p | q) & r") == And(Or(Atom("p"), Atom("q")), Atom("r"))
    assert P("<> p & q") == And(Dia(Atom("p")), Atom("q"))
    assert P("[] <> ~p") == Box(Dia(NegAtom("p")))


def test_parse_fixpoint_scope():
    # fixpoint bodies extend maximally to the right
    assert P("mu x. <>x | p") == P("mu x. (<>x | p)")
    assert P("p | mu x. <>x & q") == Or(Atom("p"), P("mu x. (<>x & q)"))


def test_parse_var_vs_atom():
    f = P("mu x. (<>x | p)")
    assert isinstance(f, Mu)
    body = f.body
    assert isinstance(body.left.body, Var)
    assert isinstance(body.right, Atom)


def test_alpha_equality():
    assert P("mu x. (<>x | p)") == P("mu y. (<>y | p)")
    assert P("mu x. (<>x | p)") != P("nu y. (<>y | p)")
    assert hash(P("mu x.(<>x|p)")) == hash(P("mu y.(<>y|p)"))


def test_parse_errors():
    for bad in ("", "p |", "(p", "mu . p", "mu x p", "~<>p", "p q", "Mu x.p"):
        with pytest.raises(ParseError):
            P(bad)


def test_roundtrip_examples():
    for text in ("p", "~p", "p | q & r", "(p | q) & r", "<>(p | q)",
                 "mu x. ([]x & nu y. <>(y | p))",
                 "nu x. [](x & mu y. (<>y | q))"):
        f = P(text)
        assert P(print_formula(f)) == f


def test_roundtrip_random():
    rng = random.Random(42)
    for _ in range(300):
        f = rand_formula(rng, size=rng.randrange(1, 14))
        assert P(print_formula(f)) == f


def test_well_name_renames_apart():
    f = P("mu x.(<>x | p) & mu x.(<>x | q)")
    names = set()

    def collect(g):
        if isinstance(g, (Mu, Nu)):
            names.add(g.var)
            collect(g.body)
        elif hasattr(g, "left"):
            collect(g.left)
            collect(g.right)
        elif hasattr(g, "body"):
            collect(g.body)

    collect(f)
    assert len(names) == 2


# --- negation, substitution, unfolding ------------------------------------

def test_negate_examples():
    assert negate(P("p")) == P("~p")
    assert negate(P("p & <>q")) == P("~p | []~q")
    assert negate(P("mu x.(<>x | p)")) == P("nu x.([]x & ~p)")


def test_negate_involution_random():
    rng = random.Random(7)
    for _ in range(2000):
        f = rand_formula(rng, size=rng.randrange(1, 12))
        assert negate(negate(f)) == f


def test_unfold_example():
    psi = P("mu x.(<>x | p)")
    assert unfold(psi) == P("<>(mu x.(<>x | p)) | p")
    chi = P("nu x.[](x & p)")
    assert unfold(chi) == P("[]((nu x.[](x & p)) & p)")


def test_subst():
    body = Or(Dia(Var("x")), Atom("p"))
    assert subst(body, "x", Atom("q")) == P("<>q | p")


# --- AFMC admissibility ----------------------------------------------------

def test_check_afmc_accepts():
    for text in ("p", "mu x.(<>x | p)", "nu x.[]x",
                 "mu x.(<> (x & mu y.<>y) | p)",
                 "nu x.(p & [](x | mu y.(<>y | q)))"):
        assert check_afmc(P(text)).accepted, text


def test_check_afmc_rejects_unguarded():
    rep = check_afmc(P("mu x.(x | p)"))
    assert not rep.accepted and not rep.guarded


def test_check_afmc_rejects_open():
    rep = check_afmc(Or(Atom("p"), Var("x")))
    assert not rep.accepted and not rep.closed


def test_check_afmc_rejects_alternation():
    # the inner nu binds over the mu-variable x
    f = P("mu x.(p & nu y.([]y & <>x))")
    rep = check_afmc(f)
    assert not rep.accepted and not rep.alternation_free


# --- closure, rank, colors -------------------------------------------------

def test_closure_example():
    psi = P("mu x.(<>x | p)")
    g = closure({psi})
    expected = {psi, P("<>(mu x.(<>x | p)) | p"), Dia(psi), Atom("p")}
    assert g.formulas == frozenset(expected)
    assert g.rank[psi] == 2
    assert g.rank[unfold(psi)] == 2
    assert g.rank[Dia(psi)] == 2
    assert g.rank[Atom("p")] == 1
    assert g.color(psi) == MAGENTA
    assert g.color(Atom("p")) == NEITHER
    assert g.equivalent(psi, Dia(psi))
    assert not g.equivalent(psi, Atom("p"))


def test_closure_navy():
    chi = P("nu x.[](x & p)")
    g = closure({chi})
    assert classify_color(chi, g) == NAVY
    assert g.rank[chi] == 2


def test_closure_rejects_bad_seed():
    with pytest.raises(FormulaError):
        closure({P("mu x.(x | p)")})


def _oracle_ranks(g):
    """Minimal grading, independently: mutual-reachability classes by
    pairwise BFS, then Bellman-Ford-style relaxation to the least assignment
    that is constant on classes and increases strictly along strict traces.
    """
    forms = sorted(g.formulas, key=lambda f: f.key())
    succ = {f: set() for f in forms}
    for a, b in g.edges:
        succ[a].add(b)

    def reach(a):
        seen = {a}
        work = [a]
        while work:
            x = work.pop()
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    work.append(y)
        return seen

    reachable = {f: reach(f) for f in forms}
    classes = []
    for f in forms:
        for cls in classes:
            r = cls[0]
            if f in reachable[r] and r in reachable[f]:
                cls.append(f)
                break
        else:
            classes.append([f])
    cls_of = {f: i for i, cls in enumerate(classes) for f in cls}
    rank = [1] * len(classes)
    changed = True
    while changed:
        changed = False
        for a, b in g.edges:
            ca, cb = cls_of[a], cls_of[b]
            if ca != cb and rank[ca] <= rank[cb]:
                rank[ca] = rank[cb] + 1
                changed = True
    return {f: rank[cls_of[f]] for f in forms}


def test_rank_against_oracle():
    rng = random.Random(11)
    done = 0
    while done < 40:
        f = rand_formula(rng, size=rng.randrange(2, 12))
        g = closure({f})
        if len(g) > 30:
            continue
        done += 1
        assert g.rank == _oracle_ranks(g)
        # literals have rank 1; rank is constant on classes
        for h in g.formulas:
            if isinstance(h, (Atom, NegAtom)):
                assert g.rank[h] == 1
            for k in g.formulas:
                if g.equivalent(h, k):
                    assert g.rank[h] == g.rank[k]


def test_color_disjoint():
    for f in sample(60, seed=3, size=9):
        g = closure({f})
        for h in g.formulas:
            assert g.color(h) in (MAGENTA, NAVY, NEITHER)
            if isinstance(h, Mu):
                assert g.color(h) == MAGENTA
            if isinstance(h, Nu):
                assert g.color(h) == NAVY


def test_trace_successors_shapes():
    assert set(trace_successors(P("p | q"))) == {P("p"), P("q")}
    assert set(trace_successors(P("p & q"))) == {P("p"), P("q")}
    assert set(trace_successors(P("<>p"))) == {P("p")}
    psi = P("mu x.(<>x | p)")
    assert set(trace_successors(psi)) == {unfold(psi)}
    assert list(trace_successors(P("p"))) == []


def test_free_vars():
    assert free_vars(P("mu x.(<>x | p)")) == set()
    assert free_vars(Or(Var("x"), Atom("p"))) == {"x"}
