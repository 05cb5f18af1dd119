"""Elimination of a single important fixpoint cut via multicut traversal.

The cut is generalised to a *multicut*: a bipartite, connected, acyclic
graph of premiss proofs joined by cut-formula edges.  The partially built
output proof (the *skeleton*) carries the pending multicuts at special
``traversed`` leaf nodes; each step either pushes one multicut upwards
through the root rules of its premiss proofs or closes a leaf by
discharging against a set-equal successful ancestor.  The process stops
when no traversed leaves remain; all cuts in the output have strictly
smaller rank than the eliminated cut formula.
"""

from collections import Counter

from ..formula import Box, Dia, Mu, Nu, Or, And, closure, negate, unfold
from ..prooftree import (
    AnnForm,
    Budget,
    Node,
    ProofError,
    TokenGen,
    analyze_clusters,
    copy_proof,
    expected_premisses,
    iter_nodes,
    parent_map,
)
from .common import demote, has_focus, splice, stack_to, unfold_d

__all__ = ["Multicut", "TraversedProof", "initial_traversed",
           "eliminate_important"]


# ---------------------------------------------------------------------------
# Annotation bridging
# ---------------------------------------------------------------------------

def conform(child, target):
    """Stack F/U/Weak/Contr nodes under ``child`` until the bottom sequent
    is multiset-equal to ``target``.

    Every formula occurring above must also occur in the target (going
    downwards nothing can be erased, only merged or re-annotated).
    """
    if Counter(child.sequent) == Counter(target):
        return child
    tc = Counter(target)
    # per formula, decide how many occurrences stay focused
    want_f = Counter(af.formula for af in target if af.focused)
    want_u = Counter(af.formula for af in target if not af.focused)
    demote_pos, promote_pos = [], []
    budget_f = {}
    for pos, af in enumerate(child.sequent):
        f = af.formula
        if f not in budget_f:
            if want_f[f] == 0 and want_u[f] == 0:
                raise ProofError(
                    "conform: %s above but absent below" % (f,))
            tot = sum(1 for x in child.sequent if x.formula == f)
            budget_f[f] = tot if want_u[f] == 0 else min(tot, want_f[f])
        if af.focused:
            if budget_f[f] > 0:
                budget_f[f] -= 1
            else:
                demote_pos.append(pos)
    # promote unfocused occurrences for any focus budget left over
    for pos, af in enumerate(child.sequent):
        f = af.formula
        if not af.focused and budget_f.get(f, 0) > 0:
            budget_f[f] -= 1
            promote_pos.append(pos)
    cur = child
    if demote_pos:
        seq = tuple(AnnForm(af.formula, False) if i in set(demote_pos) else af
                    for i, af in enumerate(cur.sequent))
        cur = Node(seq, "focus", [cur], principal=tuple(demote_pos))
    if promote_pos:
        seq = tuple(AnnForm(af.formula, True) if i in set(promote_pos) else af
                    for i, af in enumerate(cur.sequent))
        cur = Node(seq, "unfocus", [cur], principal=tuple(promote_pos))
    return stack_to(cur, target)


# ---------------------------------------------------------------------------
# Multicuts
# ---------------------------------------------------------------------------

class Multicut:
    """A connected acyclic bundle of cuts.

    ``pis`` prove the positive (mu-class) cut occurrences, ``taus`` the
    negated ones; ``edges`` is a list of ``(i, j, formula)`` triples joining
    ``pis[i]`` and ``taus[j]`` through one cut-formula occurrence each.
    """

    __slots__ = ("pis", "taus", "edges")

    def __init__(self, pis, taus, edges):
        self.pis = list(pis)
        self.taus = list(taus)
        self.edges = list(edges)

    @property
    def psis(self):
        return [f for _, _, f in self.edges]

    def edges_of_pi(self, i):
        return [e for e in self.edges if e[0] == i]

    def edges_of_tau(self, j):
        return [e for e in self.edges if e[1] == j]

    def validate(self):
        m, n, k = len(self.pis), len(self.taus), len(self.edges)
        if m + n != k + 1:
            raise ProofError("multicut is not a tree: %d+%d proofs, %d cuts"
                             % (m, n, k))
        # union-find acyclicity/connectivity
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        for i, j, _ in self.edges:
            a, b = find(("p", i)), find(("t", j))
            if a == b:
                raise ProofError("multicut graph has a cycle")
            parent[a] = b
        # per-proof cut occurrences are present and unfocused on the pi side
        for i, pi in enumerate(self.pis):
            need = Counter(AnnForm(f, False) for _, _, f in self.edges_of_pi(i))
            have = Counter(pi.sequent)
            for af, c in need.items():
                if have[af] < c:
                    raise ProofError(
                        "pi proof lacks unfocused cut occurrence %r" % (af,))
        for j, tau in enumerate(self.taus):
            need = Counter(negate(f) for _, _, f in self.edges_of_tau(j))
            have = Counter(af.formula for af in tau.sequent)
            for f, c in need.items():
                if have[f] < c:
                    raise ProofError(
                        "tau proof lacks negated cut occurrence %s" % (f,))

    # -- conclusion ---------------------------------------------------------

    def gamma(self, i):
        """Side formulas of ``pis[i]`` (its sequent minus cut occurrences)."""
        seq = list(self.pis[i].sequent)
        for _, _, f in self.edges_of_pi(i):
            seq.remove(AnnForm(f, False))
        return tuple(seq)

    def delta(self, j):
        """Side formulas of ``taus[j]``; negated cut occurrences may carry
        either annotation."""
        seq = list(self.taus[j].sequent)
        for _, _, f in self.edges_of_tau(j):
            nf = negate(f)
            if AnnForm(nf, False) in seq:
                seq.remove(AnnForm(nf, False))
            else:
                seq.remove(AnnForm(nf, True))
        return tuple(seq)


# ---------------------------------------------------------------------------
# Traversed proofs
# ---------------------------------------------------------------------------

class TraversedProof:
    """A skeleton proof whose open leaves (rule ``traversed``) each carry a
    pending multicut."""

    def __init__(self, skeleton, phi, tokens=None, budget=None):
        self.skeleton = skeleton
        self.phi = phi
        self.tokens = tokens if tokens is not None else TokenGen("t")
        self.budget = budget if budget is not None else Budget()
        self.graph = closure([phi])
        self._depths = {}

    # -- depths and labels --------------------------------------------------

    def depth(self, proof):
        d = self._depths.get(id(proof))
        if d is None:
            d = analyze_clusters(proof).node_depth(proof)
            self._depths[id(proof)] = (d, proof)   # keep the id alive
        else:
            d = d[0]
        return d

    def leaf_depth(self, mc):
        return max((self.depth(pi) for pi in mc.pis), default=0)

    def label(self, mc):
        """The conclusion of the multicut under the annotation policy: tau
        side formulas are unfocused, pi side formulas keep their proof's
        annotations exactly on the proofs of maximal depth."""
        dmax = self.leaf_depth(mc)
        parts = []
        for i, pi in enumerate(mc.pis):
            g = mc.gamma(i)
            parts.extend(g if self.depth(pi) == dmax else demote(g))
        for j in range(len(mc.taus)):
            parts.extend(demote(mc.delta(j)))
        return tuple(parts)

    def leaf(self, mc):
        mc.validate()
        return Node(self.label(mc), "traversed", mcut=mc)

    def traversed_leaves(self):
        return [n for n in iter_nodes(self.skeleton) if n.rule == "traversed"]

    # -- tidiness -----------------------------------------------------------

    def in_class(self, psi):
        return self.graph.equivalent(psi, self.phi)

    def tidy(self):
        """Splice out empty multicuts and split off cut formulas outside the
        anchor formula's trace class as ordinary lower-rank cuts."""
        while True:
            target = None
            for v in self.traversed_leaves():
                mc = v.mcut
                if not mc.edges:
                    target = (v, "splice")
                    break
                off = [e for e in mc.edges if not self.in_class(e[2])]
                if off:
                    target = (v, "split", off[0])
                    break
            if target is None:
                return
            self.budget.tick()
            v = target[0]
            mc = v.mcut
            if target[1] == "splice":
                proof = (mc.pis + mc.taus)[0]
                new = conform(copy_proof(proof, self.tokens), v.sequent)
            else:
                e = target[2]
                left_mc, right_mc = _del_split(mc, e)
                psi = e[2]
                lleaf = self.leaf(left_mc)
                rleaf = self.leaf(right_mc)
                # lleaf still shows psi unfocused, rleaf its negation
                lseq = list(lleaf.sequent)
                lseq.remove(AnnForm(psi, False))
                rseq = list(rleaf.sequent)
                rseq.remove(AnnForm(negate(psi), False))
                concl = tuple(lseq) + tuple(rseq)
                new = Node(concl, "cut", [lleaf, rleaf], split=len(lseq))
                new = conform(new, v.sequent)
            self.skeleton = splice(self.skeleton, v, new)


def _del_split(mc, edge):
    """Remove one edge and split the multicut into the two connected
    components; the first returned multicut contains the pi endpoint."""
    i0, j0, _ = edge
    rest = [e for e in mc.edges if e is not edge]
    # flood fill from ("p", i0)
    adj = {}
    for e in rest:
        adj.setdefault(("p", e[0]), []).append((("t", e[1]), e))
        adj.setdefault(("t", e[1]), []).append((("p", e[0]), e))
    seen = {("p", i0)}
    stack = [("p", i0)]
    while stack:
        v = stack.pop()
        for w, _ in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)

    def build(member):
        pis = [i for i in range(len(mc.pis)) if (("p", i) in seen) == member]
        taus = [j for j in range(len(mc.taus)) if (("t", j) in seen) == member]
        pmap = {i: x for x, i in enumerate(pis)}
        tmap = {j: x for x, j in enumerate(taus)}
        edges = [(pmap[e[0]], tmap[e[1]], e[2]) for e in rest
                 if e[0] in pmap]
        return Multicut([mc.pis[i] for i in pis], [mc.taus[j] for j in taus],
                        edges)

    return build(True), build(False)


# ---------------------------------------------------------------------------
# One traversal step
# ---------------------------------------------------------------------------

def _root_is_cut_principal(mc, side, idx):
    """If the proof's root rule is or/and/mu and its principal occurrence is
    (interpretable as) a cut occurrence, return the matching edge."""
    proof = (mc.pis if side == "p" else mc.taus)[idx]
    if proof.rule not in ("or", "and", "mu", "nu"):
        return None
    paf = proof.sequent[proof.principal[0]]
    edges = mc.edges_of_pi(idx) if side == "p" else mc.edges_of_tau(idx)
    for e in edges:
        f = e[2] if side == "p" else negate(e[2])
        if f == paf.formula and (side == "t" or not paf.focused):
            return e
    return None


def _gamma_principal_ok(mc, side, idx):
    """Can the root's principal occurrence be read as a side (non-cut)
    occurrence?  True when enough copies remain outside the cut bundle."""
    proof = (mc.pis if side == "p" else mc.taus)[idx]
    paf = proof.sequent[proof.principal[0]]
    part = (mc.gamma(idx) if side == "p" else mc.delta(idx))
    return paf in part


class _StepState:
    """Per-step context: the leaf under attack plus splicing utilities."""

    def __init__(self, t, v):
        self.t = t
        self.v = v
        self.mc = v.mcut

    def replace(self, subtree, kind):
        self.t.skeleton = splice(self.t.skeleton, self.v, subtree)
        return kind

    def with_pi(self, i, proof):
        mc = Multicut(list(self.mc.pis), list(self.mc.taus),
                      list(self.mc.edges))
        mc.pis[i] = proof
        return mc

    def with_tau(self, j, proof):
        mc = Multicut(list(self.mc.pis), list(self.mc.taus),
                      list(self.mc.edges))
        mc.taus[j] = proof
        return mc


def traverse_step(t):
    """Advance the leftmost traversed leaf by exactly one case of the
    construction; returns a short tag naming the case taken."""
    leaves = t.traversed_leaves()
    if not leaves:
        raise ProofError("traverse_step on a finished traversed proof")
    t.budget.tick()
    v = leaves[0]
    st = _StepState(t, v)
    mc = v.mcut
    proofs = [("p", i, pi) for i, pi in enumerate(mc.pis)] + \
             [("t", j, tau) for j, tau in enumerate(mc.taus)]

    for _, _, proof in proofs:
        if proof.rule in ("cut", "mix", "contr"):
            raise ProofError("multicut premiss contains %s" % proof.rule)
        if proof.rule == "ax":
            raise ProofError(
                "internal: axiom premiss in a tidy multicut (cut formula "
                "would be a literal)")

    # (1) every root a Box: discharge if possible, else commute the box
    if all(proof.rule == "box" for _, _, proof in proofs):
        tag = _try_discharge(st)
        if tag:
            return tag
        return _commute_box(st)

    # (2) unfold a companion, pi side first
    for side, idx, proof in proofs:
        if proof.rule == "d":
            unfolded = unfold_d(proof, t.tokens, t.budget)
            mc2 = st.with_pi(idx, unfolded) if side == "p" \
                else st.with_tau(idx, unfolded)
            leaf = t.leaf(mc2)
            return st.replace(conform(leaf, v.sequent), "unfold")

    # (3) focus bookkeeping at a root
    for side, idx, proof in proofs:
        if proof.rule in ("focus", "unfocus"):
            child = proof.children[0]
            mc2 = st.with_pi(idx, child) if side == "p" \
                else st.with_tau(idx, child)
            leaf = t.leaf(mc2)
            return st.replace(conform(leaf, v.sequent),
                              proof.rule + "-" + side)

    # (4) a cut occurrence is weakened: drop the dead component
    for side, idx, proof in proofs:
        if proof.rule == "weak":
            paf = proof.sequent[proof.principal[0]]
            edges = (mc.edges_of_pi(idx) if side == "p"
                     else mc.edges_of_tau(idx))
            for e in edges:
                f = e[2] if side == "p" else negate(e[2])
                if f == paf.formula and (side == "t" or not paf.focused):
                    return _weak_on_cut(st, side, idx, e)

    # (5) a cut formula principal on both sides of one edge
    for e in mc.edges:
        i, j, psi = e
        pi, tau = mc.pis[i], mc.taus[j]
        if _root_is_cut_principal(mc, "p", i) is not e:
            continue
        npaf = tau.sequent[tau.principal[0]] if tau.principal else None
        if tau.rule in ("or", "and", "mu", "nu") and npaf is not None \
                and npaf.formula == negate(psi):
            if isinstance(psi, Nu):
                raise ProofError(
                    "internal: nu cut formula in the anchor class")
            return _principal_pair(st, e)

    # (6) commute a rule whose principal is a side formula
    for side, idx, proof in proofs:
        if proof.rule in ("or", "and", "mu", "nu", "weak") \
                and _gamma_principal_ok(mc, side, idx):
            return _commute(st, side, idx)

    raise ProofError("internal: no traversal case applies")


# -- case implementations ---------------------------------------------------

def _path_successful(nodes):
    for n in nodes:
        if n.rule == "focus":
            return False
        if not has_focus(n.sequent):
            return False
    return any(n.rule == "box" for n in nodes)


def _try_discharge(st):
    t, v = st.t, st.v
    if not has_focus(v.sequent):
        return None
    pm = parent_map(t.skeleton)
    path = []
    n = v
    while True:
        p = pm.get(id(n))
        if p is None:
            break
        path.append(p)
        n = p
    path.reverse()                      # root ... parent(v)
    vset = set(v.sequent)
    for ci, c in enumerate(path):
        if set(c.sequent) != vset:
            continue
        if not _path_successful(path[ci:]):
            continue
        if c.rule == "d":
            tok = c.token
            wrap = False
        else:
            tok = t.tokens.fresh()
            wrap = True
        rep = stack_to(Node(c.sequent, "leaf", (), (), token=tok), v.sequent)
        # rebuild the root path once, replacing v and (possibly) wrapping c
        cur, node = rep, v
        while True:
            par = pm.get(id(node))
            if par is None:
                t.skeleton = cur
                return "discharge"
            m = par.copy_shallow()
            m.invalidate()
            m.children = [cur if k is node else k for k in par.children]
            if par is c and wrap:
                m = Node(m.sequent, "d", [m], token=tok)
            cur, node = m, par
    return None


def _commute_box(st):
    t, v, mc = st.t, st.v, st.mc
    # each edge consumes the one box formula of one endpoint; exactly one
    # box occurrence survives into the label
    new_pis, new_taus, new_edges = [], [], []
    for pi in mc.pis:
        new_pis.append(pi.children[0])
    for tau in mc.taus:
        new_taus.append(tau.children[0])
    for i, j, f in mc.edges:
        if isinstance(f, (Box, Dia)):
            new_edges.append((i, j, f.body))
        else:
            raise ProofError("internal: non-modal cut formula at box layer")
    mc2 = Multicut(new_pis, new_taus, new_edges)
    boxes = [k for k, af in enumerate(v.sequent)
             if isinstance(af.formula, Box)]
    if len(boxes) != 1:
        raise ProofError("internal: box layer with %d box side formulas"
                         % len(boxes))
    leaf = t.leaf(mc2)
    node = Node(v.sequent, "box", [None], principal=(boxes[0],))
    exp = expected_premisses(node)[0][0]
    node.children = [conform(leaf, exp)]
    node.invalidate()
    return st.replace(node, "box")


def _weak_on_cut(st, side, idx, edge):
    t, v, mc = st.t, st.v, st.mc
    proof = (mc.pis if side == "p" else mc.taus)[idx]
    mc2 = st.with_pi(idx, proof.children[0]) if side == "p" \
        else st.with_tau(idx, proof.children[0])
    keep, _ = _del_split(mc2, _find_edge(mc2, edge))
    if side == "t":
        _, keep = _del_split(mc2, _find_edge(mc2, edge))
    leaf = t.leaf(keep)
    return st.replace(conform(leaf, v.sequent), "weak-del")


def _find_edge(mc, edge):
    for e in mc.edges:
        if e == edge:
            return e
    raise ProofError("internal: edge lost")


def _principal_pair(st, edge):
    t, v, mc = st.t, st.v, st.mc
    i, j, psi = edge
    pi, tau = mc.pis[i], mc.taus[j]
    if isinstance(psi, Mu):
        # both unfoldings advance; the edge is relabelled
        mc2 = Multicut(list(mc.pis), list(mc.taus),
                       [e if e is not edge else (i, j, unfold(psi))
                        for e in mc.edges])
        mc2.pis[i] = pi.children[0]
        mc2.taus[j] = tau.children[0]
        leaf = t.leaf(mc2)
        return st.replace(conform(leaf, v.sequent), "mu-pair")
    if isinstance(psi, Or):
        return _split_pair(st, edge, dup_side="t")
    if isinstance(psi, And):
        return _split_pair(st, edge, dup_side="p")
    raise ProofError("internal: unexpected principal cut formula %s" % psi)


def _split_pair(st, edge, dup_side):
    """The Or/And principal reduction.

    The single-premiss endpoint advances to its premiss (which carries both
    components); the two-premiss endpoint is replaced by its two children,
    one component edge to each.  Everything hanging off the duplicated
    endpoint through its other edges is duplicated as well, and the copies
    are merged back by contractions in the skeleton.
    """
    t, v, mc = st.t, st.v, st.mc
    i, j, psi = edge
    a, b = (psi.left, psi.right)
    if dup_side == "t":
        single_old, dup_old = mc.pis[i], mc.taus[j]
    else:
        single_old, dup_old = mc.taus[j], mc.pis[i]
    single_new = single_old.children[0]
    half0, half1 = dup_old.children

    pis = {k: p for k, p in enumerate(mc.pis)}
    taus = {k: p for k, p in enumerate(mc.taus)}
    nodes = [("p", k) for k in pis] + [("t", k) for k in taus]
    dup_node = ("t", j) if dup_side == "t" else ("p", i)
    single_node = ("p", i) if dup_side == "t" else ("t", j)

    # component of each node once the duplicated endpoint is removed
    adj = {}
    for e in mc.edges:
        if e is edge:
            continue
        adj.setdefault(("p", e[0]), []).append(("t", e[1]))
        adj.setdefault(("t", e[1]), []).append(("p", e[0]))
    # nodes reachable from the single endpoint without passing dup_node
    main = {single_node}
    stack = [single_node]
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y != dup_node and y not in main:
                main.add(y)
                stack.append(y)
    side_nodes = [x for x in nodes if x not in main and x != dup_node]

    # build the new multicut: originals keep their component, the side
    # components are duplicated for the second half
    new_pis, new_taus, new_edges = [], [], []
    remap0, remap1 = {}, {}

    def add(kind, proof):
        if kind == "p":
            new_pis.append(proof)
            return ("p", len(new_pis) - 1)
        new_taus.append(proof)
        return ("t", len(new_taus) - 1)

    for x in nodes:
        if x == dup_node:
            continue
        kind, k = x
        proof = pis[k] if kind == "p" else taus[k]
        if x == single_node:
            remap0[x] = remap1[x] = add(kind, single_new)
        elif x in main:
            remap0[x] = remap1[x] = add(kind, proof)
        else:
            remap0[x] = add(kind, proof)
            remap1[x] = add(kind, copy_proof(proof, t.tokens))
    h0 = add(dup_node[0], half0)
    h1 = add(dup_node[0], half1)
    remap0[dup_node] = h0
    remap1[dup_node] = h1

    def endpoint(x, half):
        return remap0[x] if half == 0 else remap1[x]

    for e in mc.edges:
        if e is edge:
            continue
        pnode, tnode = ("p", e[0]), ("t", e[1])
        for half in ((0,) if (pnode in main and tnode in main) else (0, 1)):
            if (pnode in main and tnode in main) and half == 1:
                continue
            p2 = endpoint(pnode, half)
            t2 = endpoint(tnode, half)
            new_edges.append((p2[1], t2[1], e[2]))
    # the two component edges
    sN = remap0[single_node]
    for comp, h in ((a, h0), (b, h1)):
        if dup_side == "t":
            new_edges.append((sN[1], h[1], comp))
        else:
            new_edges.append((h[1], sN[1], comp))

    mc2 = Multicut(new_pis, new_taus, new_edges)
    leaf = t.leaf(mc2)
    kind = "or-pair" if dup_side == "t" else "and-pair"
    return st.replace(conform(leaf, v.sequent), kind)


def _commute(st, side, idx):
    t, v, mc = st.t, st.v, st.mc
    proof = (mc.pis if side == "p" else mc.taus)[idx]
    paf = proof.sequent[proof.principal[0]]
    # locate the corresponding occurrence in the label
    dmax = t.leaf_depth(mc)
    masked = paf
    if side == "t" or t.depth(proof) != dmax:
        masked = AnnForm(paf.formula, False)
    # compute the label offset of this proof's segment
    off = 0
    for i2, pi in enumerate(mc.pis):
        g = mc.gamma(i2)
        if side == "p" and i2 == idx:
            seg = g if t.depth(pi) == dmax else demote(g)
            break
        off += len(g)
    else:
        for j2 in range(len(mc.taus)):
            d = mc.delta(j2)
            if j2 == idx:
                seg = demote(d)
                break
            off += len(d)
    pos = off + list(seg).index(masked)
    if v.sequent[pos] != masked:
        raise ProofError("internal: label segment misaligned")

    node = Node(v.sequent, proof.rule, [None] * len(proof.children),
                principal=(pos,))
    exps = expected_premisses(node)
    kids = []
    for h, child in enumerate(proof.children):
        mc_h = st.with_pi(idx, child) if side == "p" \
            else st.with_tau(idx, child)
        leaf = t.leaf(mc_h)
        kids.append(conform(leaf, exps[h][0]))
    node.children = kids
    node.invalidate()
    return st.replace(node, proof.rule + "-commute")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def initial_traversed(left, right, phi, tokens=None, budget=None):
    """The starting traversed proof: one leaf holding the two premisses of
    the eliminated cut joined by a single edge coloured ``phi``."""
    if not isinstance(phi, Mu):
        raise ProofError("anchor cut formula must be a mu formula, got %s"
                         % (phi,))
    for p in (left, right):
        for n in iter_nodes(p):
            if n.rule in ("contr", "cut", "mix"):
                raise ProofError(
                    "multicut premiss proofs must be cut- and "
                    "contraction-free (found %s)" % n.rule)
    mc = Multicut([left], [right], [(0, 0, phi)])
    t = TraversedProof(None, phi, tokens=tokens, budget=budget)
    t.skeleton = t.leaf(mc)
    return t


def eliminate_important(left, right, phi, tokens=None, budget=None,
                        trace=None):
    """Replace the cut ``left | phi | right`` by a proof whose remaining
    cuts all have rank below ``rank(phi)``."""
    t = initial_traversed(left, right, phi, tokens=tokens, budget=budget)
    conclusion = t.skeleton.sequent
    while True:
        t.tidy()
        leaves = t.traversed_leaves()
        if not leaves:
            break
        tag = traverse_step(t)
        if trace is not None:
            trace(tag, len(t.traversed_leaves()))
    if Counter(t.skeleton.sequent) != Counter(conclusion):
        raise ProofError("internal: conclusion changed during traversal")
    return t.skeleton
