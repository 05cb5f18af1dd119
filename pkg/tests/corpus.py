"""Random proof corpus shared by the transformation tests.

Built once per interpreter run and cached: random valid sequents are
proved by the bounded search, then composed into cut proofs.
"""

import random

from focusce.formula import negate
from focusce.prooftree import AnnForm, Node, check_proof
from focusce.search import NoProofWithinBudget, prove

from randform import rand_formula, rand_fixpoint

_cache = {}


def searched_proofs(n=40, seed=11):
    """Valid cut-free proofs of {alpha, ~alpha} for random alpha."""
    key = ("plain", n, seed)
    if key not in _cache:
        rng = random.Random(seed)
        out = []
        while len(out) < n:
            a = rand_formula(rng, size=rng.randint(3, 10))
            try:
                p = prove([a, negate(a)])
            except NoProofWithinBudget:
                continue
            assert check_proof(p).ok
            out.append(p)
        _cache[key] = out
    return _cache[key]


def composed_cut_proofs(n=100, seed=23, kind=None):
    """Cut proofs built from two searched premiss proofs.

    Each entry is (cut_node, left, right, psi): left proves {~psi, psi},
    right proves {psi_bar, psi_side}, joined by a cut on psi.
    """
    key = ("cut", n, seed, kind)
    if key not in _cache:
        rng = random.Random(seed)
        out = []
        while len(out) < n:
            if kind is None:
                psi = rand_formula(rng, size=rng.randint(3, 9))
            else:
                psi = rand_fixpoint(rng, kind, size=rng.randint(4, 9))
            npsi = negate(psi)
            side = rand_formula(rng, size=rng.randint(2, 6))
            nside = negate(side)
            try:
                left = prove([npsi, AnnForm(psi, False)])
                right = prove([AnnForm(npsi, False), side, nside])
            except NoProofWithinBudget:
                continue
            concl = (AnnForm(npsi, False), AnnForm(side, False),
                     AnnForm(nside, False))
            cut = Node(concl, "cut", [left, right], split=1)
            if not check_proof(cut).ok:
                continue
            out.append((cut, left, right, psi))
        _cache[key] = out
    return _cache[key]
