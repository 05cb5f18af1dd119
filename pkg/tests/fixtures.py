"""Hand-built proof fixtures shared by the test suites.

The main fixture is the worked example: a proof of {phi, delta, chi} built
from two cyclic subproofs joined by a single important, essential cut on
psi = mu x.(<>x | p).
"""

from focusce.formula import parse_formula, negate, unfold, Dia, Box
from focusce.prooftree import AnnForm, Node, u, foc

P = parse_formula

PHI = P("nu x.([]x & mu y.(<>y | ~p))")
PSI = P("mu x.(<>x | p)")
CHI = P("mu x.(<>x | q)")
DELTA = P("mu x.(<>x | (p & ~q))")
GAMMA = P("mu y.(<>y | ~p)")
PSI_BAR = negate(PSI)            # nu x.([]x & ~p)


def seq(*afs):
    return tuple(afs)


def pi_hat():
    """Cyclic proof of {phi^u, psi^u} (left premiss of the main cut)."""
    phi, psi = PHI, PSI
    p = P("p")
    # right branch of the And: gamma side
    ax = Node(seq(u(P("~p")), u(p)), "ax")
    w2 = Node(seq(u(Dia(PSI)), u(P("~p")), u(p)), "weak", [ax], (0,))
    w1 = Node(seq(u(Dia(GAMMA)), u(Dia(PSI)), u(P("~p")), u(p)),
              "weak", [w2], (0,))
    org = Node(seq(u(unfold(GAMMA)), u(Dia(psi)), u(p)), "or", [w1], (0,))
    mug = Node(seq(foc(GAMMA), u(Dia(psi)), u(p)), "mu", [org], (0,))
    # left branch: box side
    leaf = Node(seq(foc(phi), u(psi)), "leaf", token="x")
    box = Node(seq(foc(Box(phi)), u(Dia(psi))), "box", [leaf], (0,))
    wk = Node(seq(foc(Box(phi)), u(Dia(psi)), u(p)), "weak", [box], (2,))
    # joining And, Nu, Or, Mu, D, F
    nd = Node(seq(foc(And_(Box(phi), GAMMA)), u(Dia(psi)), u(p)),
              "and", [wk, mug], (0,))
    nu = Node(seq(foc(phi), u(Dia(psi)), u(p)), "nu", [nd], (0,))
    orp = Node(seq(foc(phi), u(unfold(psi))), "or", [nu], (1,))
    mup = Node(seq(foc(phi), u(psi)), "mu", [orp], (1,))
    d = Node(seq(foc(phi), u(psi)), "d", [mup], token="x")
    f = Node(seq(u(phi), u(psi)), "focus", [d], (0,))
    return f


def And_(a, b):
    from focusce.formula import And
    return And(a, b)


def tau_hat():
    """Cyclic proof of {~psi^u, delta^u, chi^u} (right premiss)."""
    psibar, delta, chi = PSI_BAR, DELTA, CHI
    p, q = P("p"), P("q")
    pq = P("p & ~q")
    # t branch: literal side of the Nu unfolding
    ax1 = Node(seq(foc(P("~p")), u(p)), "ax")
    wq = Node(seq(foc(P("~p")), u(p), u(q)), "weak", [ax1], (2,))
    ax2 = Node(seq(u(P("~q")), u(q)), "ax")
    wp = Node(seq(foc(P("~p")), u(P("~q")), u(q)), "weak", [ax2], (0,))
    nand = Node(seq(foc(P("~p")), u(pq), u(q)), "and", [wq, wp], (1,))
    tw2 = Node(seq(foc(P("~p")), u(Dia(chi)), u(pq), u(q)),
               "weak", [nand], (1,))
    t = Node(seq(foc(P("~p")), u(Dia(delta)), u(pq), u(Dia(chi)), u(q)),
             "weak", [tw2], (1,))
    # s branch: box side
    leaf = Node(seq(foc(psibar), u(delta), u(chi)), "leaf", token="y")
    box = Node(seq(foc(Box(psibar)), u(Dia(delta)), u(Dia(chi))),
               "box", [leaf], (0,))
    sw2 = Node(seq(foc(Box(psibar)), u(Dia(delta)), u(Dia(chi)), u(q)),
               "weak", [box], (3,))
    s = Node(seq(foc(Box(psibar)), u(Dia(delta)), u(pq), u(Dia(chi)), u(q)),
             "weak", [sw2], (2,))
    # joining And, Nu, Or/Mu pairs, D, F
    nd = Node(seq(foc(unfold(psibar)), u(Dia(delta)), u(pq), u(Dia(chi)),
                  u(q)),
              "and", [s, t], (0,))
    r = Node(seq(foc(psibar), u(Dia(delta)), u(pq), u(Dia(chi)), u(q)),
             "nu", [nd], (0,))
    orc = Node(seq(foc(psibar), u(Dia(delta)), u(pq), u(unfold(chi))),
               "or", [r], (3,))
    muc = Node(seq(foc(psibar), u(Dia(delta)), u(pq), u(chi)),
               "mu", [orc], (3,))
    ord_ = Node(seq(foc(psibar), u(unfold(delta)), u(chi)),
                "or", [muc], (1,))
    w = Node(seq(foc(psibar), u(delta), u(chi)), "mu", [ord_], (1,))
    d = Node(seq(foc(psibar), u(delta), u(chi)), "d", [w], token="y")
    f = Node(seq(u(psibar), u(delta), u(chi)), "focus", [d], (0,))
    return f


def example_proof():
    """The full worked example: Cut on psi joining pi_hat and tau_hat."""
    concl = seq(u(PHI), u(DELTA), u(CHI))
    return Node(concl, "cut", [pi_hat(), tau_hat()], split=1)


def nu_box_proof():
    """Tiny cyclic proof of {nu x.[]x ^f}."""
    chi = P("nu x.[]x")
    leaf = Node(seq(foc(chi)), "leaf", token="z")
    box = Node(seq(foc(Box(chi))), "box", [leaf], (0,))
    nu = Node(seq(foc(chi)), "nu", [box], (0,))
    return Node(seq(foc(chi)), "d", [nu], token="z")


def excluded_middle_proof():
    """Cyclic proof of {phi^u, ~phi^u} for phi = mu x.(<>x | p)."""
    phi = PSI
    phibar = PSI_BAR
    leaf = Node(seq(u(phi), foc(phibar)), "leaf", token="w")
    box = Node(seq(u(Dia(phi)), foc(Box(phibar))), "box", [leaf], (1,))
    wk1 = Node(seq(u(Dia(phi)), u(P("p")), foc(Box(phibar))),
               "weak", [box], (1,))
    ax = Node(seq(u(P("p")), foc(P("~p"))), "ax")
    wk2 = Node(seq(u(Dia(phi)), u(P("p")), foc(P("~p"))), "weak", [ax], (0,))
    nd = Node(seq(u(Dia(phi)), u(P("p")), foc(unfold(phibar))),
              "and", [wk1, wk2], (2,))
    nu = Node(seq(u(Dia(phi)), u(P("p")), foc(phibar)), "nu", [nd], (2,))
    orr = Node(seq(u(unfold(phi)), foc(phibar)), "or", [nu], (0,))
    mu = Node(seq(u(phi), foc(phibar)), "mu", [orr], (0,))
    d = Node(seq(u(phi), foc(phibar)), "d", [mu], token="w")
    return Node(seq(u(phi), u(phibar)), "focus", [d], (1,))


def simple_cut_proof():
    """{p^u, ~p^u} via a cut on ~p (important, not essential)."""
    p, np_ = P("p"), P("~p")
    left = Node(seq(u(p), u(np_)), "ax")
    right = Node(seq(u(p), u(np_)), "ax")
    return Node(seq(u(p), u(np_)), "cut", [left, right], split=1)
