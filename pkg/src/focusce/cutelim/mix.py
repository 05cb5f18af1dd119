"""Pushing cuts upwards: the mix engine.

The mix rule generalises cut by letting the cut formula occur several
times in each premiss, absorbing contractions on cut formulas.  One shared
single-step engine pushes a mix above the root rules of its premisses;
two drivers use it:

* ``make_essential`` pushes an important root cut upwards until every
  remaining cut formula is a fixpoint formula.  Box steps shrink the cut
  formula and every cycle crosses a Box, so this terminates.

* ``eliminate_unimportant`` converts the cuts of a proper root cluster to
  mixes and keeps pushing them through the (lazily unfolded) cluster,
  closing set-equal successful repeats as soon as they appear below a mix;
  mixes that escape the root component through a side exit freeze in place
  and are important afterwards.
"""

from collections import Counter

from ..formula import Box, Dia, is_fixpoint, negate, unfold
from ..prooftree import (
    AnnForm,
    Budget,
    Node,
    ProofError,
    TokenGen,
    analyze_clusters,
    check_proof,
    companion_map,
    copy_proof,
    expected_premisses,
    iter_nodes,
    parent_map,
)
from .common import has_focus, splice, stack_to, unfold_d
from .traversal import conform

__all__ = ["make_essential", "eliminate_unimportant"]


def mix_formula(x):
    """The cut/mix formula of ``x`` (always unfocused in the premisses)."""
    lc = x.counts[0] if x.rule == "mix" else 1
    diff = Counter(x.children[0].sequent) - Counter(x.sequent[:x.split])
    if sum(diff.values()) != lc or len(diff) != 1:
        raise ProofError("cannot infer mix formula")
    (af,) = diff
    if af.focused:
        raise ProofError("mix formula must be unfocused")
    return af.formula


def mix_counts(x):
    return x.counts if x.rule == "mix" else (1, 1)


def mk_mix(left, right, phi, lc, rc):
    """A mix node joining the two proofs through ``lc``/``rc`` unfocused
    occurrences of ``phi``/its negation; degenerate counts of zero drop the
    other premiss and re-add its side formulas by weakening."""
    nphi = negate(phi)
    lafs = list(left.sequent)
    for _ in range(lc):
        lafs.remove(AnnForm(phi, False))
    rafs = list(right.sequent)
    for _ in range(rc):
        rafs.remove(AnnForm(nphi, False))
    concl = tuple(lafs) + tuple(rafs)
    if lc == 0:
        return conform(left, concl)
    if rc == 0:
        return conform(right, concl)
    return Node(concl, "mix", [left, right], split=len(lafs),
                counts=(lc, rc))


# ---------------------------------------------------------------------------
# Single mix step
# ---------------------------------------------------------------------------

def _is_cut_occurrence(child, pos, f):
    return child.sequent[pos] == AnnForm(f, False)


def _step_mix(p, x, tokens, budget):
    """One reduction at the mix node ``x``; returns the rewritten proof."""
    budget.tick()
    phi = mix_formula(x)
    lc, rc = mix_counts(x)
    L, R = x.children
    sides = ((0, L, phi, lc), (1, R, negate(phi), rc))

    # absorb contractions and weakenings of cut occurrences
    for side, child, f, cnt in sides:
        if child.rule == "contr" and _is_cut_occurrence(
                child, child.principal[0], f):
            return _rebuild_mix(p, x, side, child.children[0],
                                cnt_delta=+1)
        if child.rule == "weak" and _is_cut_occurrence(
                child, child.principal[0], f):
            if cnt > 1:
                return _rebuild_mix(p, x, side, child.children[0],
                                    cnt_delta=-1)
            other = x.children[1 - side]
            del other  # the whole other premiss is dropped
            return splice(p, x, conform(child.children[0], x.sequent))

    # axioms: one premiss is a complementary literal pair
    for side, child, f, cnt in sides:
        if child.rule == "ax":
            other = x.children[1 - side]
            return splice(p, x, conform(other, x.sequent))

    # a focus rule acting on cut occurrences: the premiss puts the cut
    # occurrence back in focus, so commuting is impossible.  Unroll the
    # repeat cluster above the focus rule into an unfocused copy instead.
    for side, child, f, cnt in sides:
        if child.rule == "focus":
            caf = AnnForm(f, False)
            if any(child.sequent[i] == caf for i in child.principal):
                return _rebuild_mix(p, x, side,
                                    _unroll_focus(child, tokens, budget))

    # companions: unfold in place
    for side, child, f, cnt in sides:
        if child.rule == "d":
            return _rebuild_mix(p, x, side,
                                unfold_d(child, tokens, budget))
        if child.rule == "leaf":
            comp = companion_map(p).get(child.token)
            if comp is None:
                raise ProofError("mix premiss is an undischargeable leaf")
            return splice(p, comp, unfold_d(comp, tokens, budget))

    # principal on both sides of the mix formula
    lpr = L.rule in ("or", "and", "mu", "nu") and L.principal and \
        _is_cut_occurrence(L, L.principal[0], phi)
    rpr = R.rule in ("or", "and", "mu", "nu") and R.principal and \
        _is_cut_occurrence(R, R.principal[0], negate(phi))
    if lpr and rpr:
        return splice(p, x, _principal_mix(x, phi, lc, rc, tokens))

    # commute over any other root rule (one side at a time)
    for side, child, f, cnt in sides:
        if child.rule in ("weak", "contr", "or", "and", "mu", "nu",
                          "focus", "unfocus"):
            if child.rule in ("or", "and", "mu", "nu") and \
                    (side == 0 and lpr or side == 1 and rpr):
                continue            # waits for its principal partner
            return splice(p, x, _commute_mix(x, side, phi, lc, rc,
                                              tokens))
        if child.rule in ("cut", "mix"):
            return splice(p, x, _commute_over_mix(x, side, phi, lc, rc,
                                                  tokens))

    if L.rule == "box" and R.rule == "box":
        return splice(p, x, _box_mix(x, phi, lc, rc))

    raise ProofError("no mix reduction applies at %r / %r"
                     % (L.rule, R.rule))


def _dispenser(tokens):
    """Return subtrees as-is the first time and as token-fresh copies on
    later uses, so no discharge token appears twice in the output."""
    seen = set()

    def get(node):
        if id(node) in seen:
            return copy_proof(node, tokens)
        seen.add(id(node))
        return node

    return get


def _unfocused(seq):
    return tuple(AnnForm(af.formula, False) for af in seq)


def _unroll_focus(fnode, tokens, budget):
    """Unroll the repeat cluster guarded by the focus rule ``fnode``.

    Returns a proof of ``fnode.sequent`` whose root region is an unfocused
    copy of the cluster above the focus rule: focus rules and discharges
    inside the cluster are dropped, and every repeat leaf of the cluster is
    replaced by a focus rule over a fresh-token copy of the subproof rooted
    at its companion.  Cycle-internal annotations survive inside the copies,
    so discharge conditions are preserved there, while the root copy exposes
    the former cluster with every formula out of focus.
    """
    child = fnode.children[0]
    info = analyze_clusters(fnode)
    cid = info.cluster_id[id(child)]
    if not info.proper[cid]:
        raise ProofError("focus rule does not guard a repeat cluster")
    cluster = {id(n) for n in info.members[cid]}
    comp = companion_map(fnode)

    def graft(ct):
        """A standalone proof of the unfocused companion sequent."""
        body = contain(ct, frozenset())
        pr = tuple(i for i, af in enumerate(ct.sequent) if af.focused)
        body = copy_proof(body, tokens)
        if not pr:
            return body
        return Node(_unfocused(ct.sequent), "focus", [body], principal=pr)

    def contain(n, have):
        """Copy of the subtree at ``n`` in which leaves whose companion
        lies outside the subtree are replaced by grafts, making it
        self-contained."""
        if budget is not None:
            budget.tick()
        if n.rule == "d":
            have = have | {n.token}
        if n.rule == "leaf" and n.token not in have:
            ct = comp.get(n.token)
            if ct is None or id(ct) not in cluster:
                raise ProofError("repeat leaf %r escapes the focus cluster"
                                 % (n.token,))
            return graft(ct)
        if not n.children:
            return n
        m = n.copy_shallow()
        m.children = [contain(c, have) for c in n.children]
        m.invalidate()
        return m

    def go(n):
        if budget is not None:
            budget.tick()
        if id(n) not in cluster:
            if has_focus(n.sequent):
                if n.rule == "unfocus" and not has_focus(
                        n.children[0].sequent):
                    return go(n.children[0])
                raise ProofError("focused subproof at a cluster exit "
                                 "cannot be unfocused")
            return n
        if n.rule == "leaf":
            return graft(comp[n.token]) if n.token in comp else n
        if n.rule in ("focus", "unfocus", "d"):
            return go(n.children[0])
        m = n.copy_shallow()
        m.sequent = _unfocused(n.sequent)
        m.children = [go(c) for c in n.children]
        m.invalidate()
        return m

    return conform(go(child), fnode.sequent)


def _rebuild_mix(p, x, side, new_child, cnt_delta=0):
    lc, rc = mix_counts(x)
    if side == 0:
        lc += cnt_delta
    else:
        rc += cnt_delta
    kids = list(x.children)
    kids[side] = new_child
    m = Node(x.sequent, "mix", kids, split=x.split, counts=(lc, rc))
    return splice(p, x, m)


def _principal_pool(conclusion, slice_range, afs):
    """Distinct positions in ``conclusion[slice_range]`` matching the
    multiset of annotated formulas ``afs``."""
    lo, hi = slice_range
    pool = {}
    for i in range(lo, hi):
        pool.setdefault(conclusion[i], []).append(i)
    out = []
    for af in afs:
        if not pool.get(af):
            raise ProofError("principal occurrence %r missing below" % (af,))
        out.append(pool[af].pop())
    return tuple(sorted(out))


def _commute_mix(x, side, phi, lc, rc, tokens):
    """Push the mix above a non-principal root rule of one premiss."""
    child = x.children[side]
    other = x.children[1 - side]
    k = x.split
    sl = (0, k) if side == 0 else (k, len(x.sequent))
    pr = _principal_pool(x.sequent, sl,
                         [child.sequent[i] for i in child.principal])
    node = Node(x.sequent, child.rule, [None] * len(child.children),
                principal=pr, token=child.token)
    exps = expected_premisses(node)
    kids = []
    for h, gc in enumerate(child.children):
        dup = other if h == 0 else copy_proof(other, tokens)
        if side == 0:
            nm = mk_mix(gc, dup, phi, lc, rc)
        else:
            nm = mk_mix(dup, gc, phi, lc, rc)
        kids.append(conform(nm, exps[h][0]))
    node.children = kids
    node.invalidate()
    return node


def _commute_over_mix(x, side, phi, lc, rc, tokens):
    """Push the mix above another (inactive) mix rooting one premiss; the
    outer cut occurrences are split by where they live in the inner mix."""
    child = x.children[side]
    other = x.children[1 - side]
    psi = mix_formula(child)
    ilc, irc = mix_counts(child)
    c0, c1 = child.children
    f = phi if side == 0 else negate(phi)
    caf = AnnForm(f, False)
    cnt = lc if side == 0 else rc
    avail0 = Counter(c0.sequent)[caf] - (ilc if psi == f else 0)
    n0 = min(cnt, avail0)
    n1 = cnt - n0
    if n1 > Counter(c1.sequent)[caf] - (irc if negate(psi) == f else 0):
        raise ProofError("internal: cannot distribute mix occurrences")

    dup = _dispenser(tokens)

    def half(inner, take):
        if take == 0:
            return inner
        if side == 0:
            return mk_mix(inner, dup(other), phi, take, rc)
        return mk_mix(dup(other), inner, phi, lc, take)

    nm = mk_mix(half(c0, n0), half(c1, n1), psi, ilc, irc)
    return conform(nm, x.sequent)


def _box_mix(x, phi, lc, rc):
    L, R = x.children
    chi = phi.body if isinstance(phi, (Box, Dia)) else None
    if chi is None:
        raise ProofError("internal: non-modal mix formula at a box layer")
    nm = mk_mix(L.children[0], R.children[0], chi, lc, rc)
    boxes = [i for i, af in enumerate(x.sequent)
             if isinstance(af.formula, Box)]
    if len(boxes) != 1:
        raise ProofError("internal: box/mix layer needs one box below")
    node = Node(x.sequent, "box", [None], principal=(boxes[0],))
    exp = expected_premisses(node)[0][0]
    node.children = [conform(nm, exp)]
    node.invalidate()
    return node


def _principal_mix(x, phi, lc, rc, tokens):
    """The principal reduction: both root rules act on the mix formula."""
    L, R = x.children

    def cp(n):
        # whole premisses reused next to their own children must be copied
        return copy_proof(n, tokens)

    if L.rule == "or":
        a, b = phi.left, phi.right
        l1 = L.children[0]
        r0, r1 = R.children
        A = mk_mix(l1, cp(R), phi, lc - 1, rc)
        B = mk_mix(cp(L), r0, phi, lc, rc - 1)
        C = mk_mix(cp(L), r1, phi, lc, rc - 1)
        D = mk_mix(A, B, a, 1, 1)
        E = mk_mix(D, C, b, 1, 1)
    elif L.rule == "and":
        a, b = phi.left, phi.right
        l0, l1 = L.children
        r1 = R.children[0]
        A = mk_mix(cp(L), r1, phi, lc, rc - 1)
        B = mk_mix(l0, cp(R), phi, lc - 1, rc)
        C = mk_mix(l1, cp(R), phi, lc - 1, rc)
        D = mk_mix(B, A, a, 1, 1)
        E = mk_mix(C, D, b, 1, 1)
    elif L.rule in ("mu", "nu"):
        uphi = unfold(phi)
        A = mk_mix(L.children[0], cp(R), phi, lc - 1, rc)
        B = mk_mix(cp(L), R.children[0], phi, lc, rc - 1)
        E = mk_mix(A, B, uphi, 1, 1)
    else:
        raise ProofError("internal: bad principal pair %r/%r"
                         % (L.rule, R.rule))
    return conform(E, x.sequent)


# ---------------------------------------------------------------------------
# Mix <-> cut translation
# ---------------------------------------------------------------------------

def cuts_to_mixes(p, keep):
    """Copy of ``p`` with every cut node satisfying ``keep`` replaced by an
    equivalent mix with counts (1, 1)."""
    def go(n):
        m = n.copy_shallow()
        m.children = [go(c) for c in n.children]
        if n.rule == "cut" and keep(n):
            m.rule = "mix"
            m.counts = (1, 1)
        m.invalidate()
        return m

    return go(p)


def mixes_to_cuts(p):
    """Copy of ``p`` with every mix translated back to a cut preceded by
    contractions merging the extra cut-formula occurrences."""
    def go(n):
        m = n.copy_shallow()
        m.children = [go(c) for c in n.children]
        m.invalidate()
        if m.rule != "mix":
            return m
        phi = mix_formula(m)
        k = m.split
        left = stack_to(m.children[0],
                        m.sequent[:k] + (AnnForm(phi, False),))
        right = stack_to(m.children[1],
                         (AnnForm(negate(phi), False),) + m.sequent[k:])
        return Node(m.sequent, "cut", [left, right], split=k)

    return go(p)


# ---------------------------------------------------------------------------
# Essential cuts
# ---------------------------------------------------------------------------

def make_essential(p, tokens=None, budget=None):
    """Push the important root cut of ``p`` upwards until every remaining
    cut formula is a fixpoint formula (or the cut disappears)."""
    if p.rule != "cut":
        raise ProofError("make_essential expects a cut at the root")
    tokens = tokens if tokens is not None else TokenGen("e")
    budget = budget if budget is not None else Budget()
    p = cuts_to_mixes(p, lambda n: True)
    while True:
        active = _topmost(p, lambda n: n.rule == "mix"
                          and not is_fixpoint(mix_formula(n)))
        if active is None:
            break
        p = _step_mix(p, active, tokens, budget)
    out = mixes_to_cuts(p)
    rep = check_proof(out)
    if not rep.ok:
        raise ProofError("make_essential produced an invalid proof:\n%s"
                         % rep.render())
    return out


def _topmost(p, pred):
    """A node satisfying ``pred`` with no other such node in its subtree
    (leftmost when several qualify)."""
    hits = [n for n in iter_nodes(p) if pred(n)]
    hit_ids = {id(n) for n in hits}
    for n in hits:
        above = any(id(m) in hit_ids
                    for c in n.children for m in iter_nodes(c))
        if not above:
            return n
    return None


# ---------------------------------------------------------------------------
# Unimportant cuts
# ---------------------------------------------------------------------------

def _close_one_repeat(p, info, tokens):
    """Close the root-most set-equal successful repeat whose leaf end hides
    a mix in its subtree; returns the new proof or None."""
    comp = info.component(p)
    compset = {id(n) for n in comp}

    def has_mix(n):
        return any(m.rule in ("mix", "cut") for m in iter_nodes(n))

    path = []

    def walk(l):
        if id(l) in compset:
            for i, v in enumerate(path):
                if id(v) not in compset or set(v.sequent) != set(l.sequent):
                    continue
                seg = path[i:]
                if any(n.rule in ("mix", "cut", "focus") for n in seg):
                    continue
                if not all(has_focus(n.sequent) for n in seg) or \
                        not has_focus(l.sequent):
                    continue
                if not any(n.rule == "box" for n in seg):
                    continue
                if not has_mix(l):
                    continue
                return (v, l)
            path.append(l)
            for c in l.children:
                hit = walk(c)
                if hit:
                    return hit
            path.pop()
        return None

    hit = walk(p)
    if not hit:
        return None
    v, l = hit
    tok = tokens.fresh()
    rep = stack_to(Node(v.sequent, "leaf", (), (), token=tok), l.sequent)
    pm = parent_map(p)
    cur, node = rep, l
    while True:
        par = pm.get(id(node))
        if par is None:
            return cur
        m = par.copy_shallow()
        m.invalidate()
        m.children = [cur if k is node else k for k in par.children]
        if par is v:
            m = Node(m.sequent, "d", [m], token=tok)
        cur, node = m, par


def eliminate_unimportant(p, tokens=None, budget=None, trace=None):
    """Push the mixes of the proper root cluster out of the root component,
    closing successful repeats below them; remaining cuts are important."""
    tokens = tokens if tokens is not None else TokenGen("m")
    budget = budget if budget is not None else Budget()
    info = analyze_clusters(p)
    compset = {id(n) for n in info.component(p)}
    p = cuts_to_mixes(p, lambda n: id(n) in compset)
    while True:
        budget.tick()
        info = analyze_clusters(p)
        closed = _close_one_repeat(p, info, tokens)
        if closed is not None:
            if trace is not None:
                trace("close-repeat", 0)
            p = closed
            continue
        compset = {id(n) for n in info.component(p)}
        active = _topmost(p, lambda n: n.rule == "mix"
                          and id(n) in compset)
        if active is None:
            break
        if trace is not None:
            trace("push-" + active.children[0].rule + "/"
                  + active.children[1].rule, 0)
        p = _step_mix(p, active, tokens, budget)
    out = mixes_to_cuts(p)
    rep = check_proof(out)
    if not rep.ok:
        raise ProofError("eliminate_unimportant produced an invalid "
                         "proof:\n%s" % rep.render())
    return out
