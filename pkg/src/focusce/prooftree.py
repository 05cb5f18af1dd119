"""The Focus proof system: annotated sequents, cyclic derivations with
discharge tokens, the soundness checker, cluster analysis and subproofs.

A proof is a tree of Node objects.  Repeat leaves carry a discharge token
whose companion is the unique ancestor D node with the same token; the
"tree plus back edges" graph drives the cluster analysis.
"""

from __future__ import annotations

from collections import Counter
from typing import NamedTuple, Optional

from .formula import (Atom, Box, Dia, Formula, Mu, NegAtom, Nu, Or, And,
                      check_afmc, closure, negate, parse_formula,
                      print_formula, unfold)


class ProofError(Exception):
    pass


class StepCapExceeded(ProofError):
    pass


class AnnForm(NamedTuple):
    """An annotated formula: focused (f) or unfocused (u)."""
    formula: Formula
    focused: bool

    def annot(self):
        return "f" if self.focused else "u"

    def __repr__(self):
        return "%s^%s" % (print_formula(self.formula), self.annot())


def u(f):
    return AnnForm(f, False)


def foc(f):
    return AnnForm(f, True)


def seq_multiset(seq):
    return Counter(seq)


def seq_sorted(seq):
    return tuple(sorted(seq, key=lambda af: (af.formula.key(), af.focused)))


def seq_equal(a, b):
    return Counter(a) == Counter(b)


def seq_set_equal(a, b):
    """=_Set on annotated sequents: equal underlying sets of annotated
    formulas."""
    return set(a) == set(b)


def fmt_sequent(seq):
    return ", ".join(repr(af) for af in seq)


RULE_NAMES = ("ax", "or", "and", "box", "mu", "nu", "weak", "contr",
              "focus", "unfocus", "d", "leaf", "cut", "mix")

STRUCTURAL = ("weak", "contr", "focus", "unfocus", "d")


class Node:
    """One derivation node.  ``principal`` holds 0-based occurrence indices
    into ``sequent`` naming the rule's designated formulas."""

    __slots__ = ("sequent", "rule", "children", "principal", "token",
                 "split", "counts", "mcut", "_origins")

    def __init__(self, sequent, rule, children=(), principal=(), token=None,
                 split=None, counts=None, mcut=None):
        self.sequent = tuple(sequent)
        self.rule = rule
        self.children = list(children)
        self.principal = tuple(principal)
        self.token = token
        self.split = split
        self.counts = counts
        self.mcut = mcut
        self._origins = None

    def invalidate(self):
        self._origins = None

    def copy_shallow(self):
        return Node(self.sequent, self.rule, list(self.children),
                    self.principal, self.token, self.split, self.counts,
                    self.mcut)

    def __repr__(self):
        return "<%s: %s>" % (self.rule, fmt_sequent(self.sequent))


def iter_nodes(root):
    """Preorder traversal."""
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def parent_map(root):
    pm = {id(root): None}
    for n in iter_nodes(root):
        for c in n.children:
            pm[id(c)] = n
    return pm


def companion_map(root):
    """token -> D node, for all D nodes in the tree."""
    comp = {}
    for n in iter_nodes(root):
        if n.rule == "d":
            if n.token in comp:
                raise ProofError("duplicate discharge token %r" % n.token)
            comp[n.token] = n
    return comp


def proof_formulas(root):
    out = set()
    for n in iter_nodes(root):
        for af in n.sequent:
            out.add(af.formula)
    return out


def proof_closure(root):
    """Closure graph covering every formula in the proof and its negation."""
    seed = proof_formulas(root)
    seed |= {negate(f) for f in seed}
    return closure(seed)


class TokenGen:
    """Monotone fresh-token source, namespaced per transformation run."""

    def __init__(self, prefix="x", start=0):
        self.prefix = prefix
        self.n = start

    def fresh(self):
        t = "%s%d" % (self.prefix, self.n)
        self.n += 1
        return t


class Budget:
    """Node-creation step cap shared across one top-level transformation."""

    def __init__(self, max_steps=10_000_000):
        self.max_steps = max_steps
        self.steps = 0

    def tick(self, n=1):
        self.steps += n
        if self.steps > self.max_steps:
            raise StepCapExceeded("step cap %d exceeded" % self.max_steps)


# ---------------------------------------------------------------------------
# Rule semantics
# ---------------------------------------------------------------------------

def infer_cut_formula(node):
    """Recover the cut/mix formula of a cut node from its children."""
    if node.split is None:
        raise ProofError("cut node missing split")
    k = node.split
    sigma0 = Counter(node.sequent[:k])
    left = Counter(node.children[0].sequent) if node.children else Counter()
    diff = left - sigma0
    if sum(diff.values()) != 1:
        raise ProofError("cannot infer cut formula")
    (af,) = list(diff.elements())
    if af.focused:
        raise ProofError("cut formula must be unfocused")
    return af.formula


def expected_premisses(node):
    """Canonical premiss sequents plus occurrence-origin maps.

    Returns a list with one entry per premiss: (sequent, origins) where
    origins[i] is the conclusion occurrence index the i-th premiss
    occurrence immediately descends from, or None for formulas the rule
    introduces (cut formulas).  Raises ProofError for malformed instances.
    """
    seq = node.sequent
    r = node.rule

    def need_principal(count=1):
        if len(node.principal) != count:
            raise ProofError("rule %s needs %d principal index(es)" % (r, count))
        for i in node.principal:
            if not (0 <= i < len(seq)):
                raise ProofError("principal index %d out of range" % i)

    if r == "ax":
        if len(seq) != 2:
            raise ProofError("axiom sequent must have exactly two formulas")
        f0, f1 = seq[0].formula, seq[1].formula
        ok = (isinstance(f0, Atom) and isinstance(f1, NegAtom) and f0.name == f1.name) or \
             (isinstance(f0, NegAtom) and isinstance(f1, Atom) and f0.name == f1.name)
        if not ok:
            raise ProofError("axiom needs a complementary literal pair")
        return []

    if r == "leaf":
        if node.token is None:
            raise ProofError("repeat leaf needs a token")
        return []

    if r == "d":
        if node.token is None:
            raise ProofError("D rule needs a token")
        return [(seq, list(range(len(seq))))]

    if r in ("or", "mu", "nu"):
        need_principal()
        i = node.principal[0]
        f, a = seq[i]
        if r == "or":
            if not isinstance(f, Or):
                raise ProofError("or rule on non-disjunction %s" % f)
            mid = (AnnForm(f.left, a), AnnForm(f.right, a))
            origins = list(range(i)) + [i, i] + list(range(i + 1, len(seq)))
        else:
            want = Mu if r == "mu" else Nu
            if not isinstance(f, want):
                raise ProofError("%s rule on wrong fixpoint %s" % (r, f))
            ann = False if r == "mu" else a
            mid = (AnnForm(unfold(f), ann),)
            origins = list(range(len(seq)))
        prem = seq[:i] + mid + seq[i + 1:]
        return [(prem, origins)]

    if r == "and":
        need_principal()
        i = node.principal[0]
        f, a = seq[i]
        if not isinstance(f, And):
            raise ProofError("and rule on non-conjunction %s" % f)
        origins = list(range(len(seq)))
        p0 = seq[:i] + (AnnForm(f.left, a),) + seq[i + 1:]
        p1 = seq[:i] + (AnnForm(f.right, a),) + seq[i + 1:]
        return [(p0, origins), (p1, list(origins))]

    if r == "box":
        need_principal()
        i = node.principal[0]
        f, a = seq[i]
        if not isinstance(f, Box):
            raise ProofError("box rule principal must be a box formula")
        prem = []
        for j, (g, b) in enumerate(seq):
            if j == i:
                prem.append(AnnForm(f.body, a))
            else:
                if not isinstance(g, Dia):
                    raise ProofError("box rule side formulas must be diamonds")
                prem.append(AnnForm(g.body, b))
        return [(tuple(prem), list(range(len(seq))))]

    if r == "weak":
        need_principal()
        i = node.principal[0]
        prem = seq[:i] + seq[i + 1:]
        origins = list(range(i)) + list(range(i + 1, len(seq)))
        return [(prem, origins)]

    if r == "contr":
        need_principal()
        i = node.principal[0]
        prem = seq[:i + 1] + (seq[i],) + seq[i + 1:]
        origins = list(range(i + 1)) + [i] + list(range(i + 1, len(seq)))
        return [(prem, origins)]

    if r in ("focus", "unfocus"):
        want_focused_after = (r == "focus")
        pset = set(node.principal)
        if len(pset) != len(node.principal):
            raise ProofError("duplicate principal indices in %s" % r)
        prem = []
        for j, (g, b) in enumerate(seq):
            if j in pset:
                if b == want_focused_after:
                    raise ProofError("%s rule principal has wrong annotation" % r)
                prem.append(AnnForm(g, want_focused_after))
            else:
                prem.append(AnnForm(g, b))
        return [(tuple(prem), list(range(len(seq))))]

    if r in ("cut", "mix"):
        if node.split is None or not (0 <= node.split <= len(seq)):
            raise ProofError("%s rule needs a valid split" % r)
        k = node.split
        phi = infer_cut_formula(node)
        lc, rc = node.counts if r == "mix" else (1, 1)
        if lc < 1 or rc < 1:
            raise ProofError("mix multiplicities must be positive")
        left = seq[:k] + tuple(AnnForm(phi, False) for _ in range(lc))
        right = tuple(AnnForm(negate(phi), False) for _ in range(rc)) + seq[k:]
        lorig = list(range(k)) + [None] * lc
        rorig = [None] * rc + list(range(k, len(seq)))
        return [(left, lorig), (right, rorig)]

    raise ProofError("unknown rule %r" % r)


def match_child(expected, child_seq):
    """Match the canonical premiss tuple onto the actual child layout.

    Returns assign: child position -> canonical position, or None when the
    two are not multiset-equal.
    """
    if Counter(expected) != Counter(child_seq):
        return None
    buckets = {}
    for pos, af in enumerate(expected):
        buckets.setdefault(af, []).append(pos)
    assign = []
    for af in child_seq:
        assign.append(buckets[af].pop())
    return assign


def origin_maps(node):
    """Per child: list mapping child occurrence index -> conclusion
    occurrence index (or None for rule-introduced formulas).  Cached."""
    if node._origins is not None:
        return node._origins
    prems = expected_premisses(node)
    if len(prems) != len(node.children):
        raise ProofError("rule %s expects %d premisses, found %d"
                         % (node.rule, len(prems), len(node.children)))
    maps = []
    for (exp, orig), child in zip(prems, node.children):
        assign = match_child(exp, child.sequent)
        if assign is None:
            raise ProofError(
                "premiss mismatch at %s rule:\n  expected %s\n  found    %s"
                % (node.rule, fmt_sequent(exp), fmt_sequent(child.sequent)))
        maps.append([orig[a] for a in assign])
    node._origins = maps
    return maps


def descendant_positions(node, child_index, pos):
    """Occurrences in the given child immediately descending from the
    conclusion occurrence ``pos``."""
    omap = origin_maps(node)[child_index]
    return [i for i, o in enumerate(omap) if o == pos]


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

class CheckError(NamedTuple):
    category: str
    path: str
    message: str


class CheckReport:
    def __init__(self, errors):
        self.errors = errors

    @property
    def ok(self):
        return not self.errors

    def __repr__(self):
        if self.ok:
            return "CheckReport(ok)"
        return "CheckReport(%d errors; first: %s @%s: %s)" % (
            len(self.errors), self.errors[0].category, self.errors[0].path,
            self.errors[0].message)

    def render(self):
        if self.ok:
            return "ok"
        return "\n".join("%s at node %s: %s" % (e.category, e.path or "root",
                                                e.message)
                         for e in self.errors)


def check_local(root, allow_mix=False, allow_traversed=False,
                check_formulas=True):
    """Verify every rule instance, token discipline and (optionally) that
    the formulas themselves are closed, guarded and alternation free."""
    errors = []
    seen_tokens = set()
    checked_formulas = set()

    def visit(node, path, dstack):
        # dstack: token -> companion sequent along the current branch
        if check_formulas:
            for af in node.sequent:
                f = af.formula
                if f not in checked_formulas:
                    checked_formulas.add(f)
                    rep = check_afmc(f)
                    if not rep.accepted:
                        errors.append(CheckError(
                            "bad-formula", path,
                            "%s: %s" % (print_formula(f),
                                        "; ".join(rep.problems))))
        if node.rule not in RULE_NAMES and not (
                allow_traversed and node.rule == "traversed"):
            errors.append(CheckError("bad-rule", path,
                                     "unknown rule %r" % node.rule))
            return
        if node.rule == "mix" and not allow_mix:
            errors.append(CheckError("bad-rule", path,
                                     "mix rule outside cut elimination"))
            return
        if node.rule == "traversed":
            return
        if node.rule == "d":
            if node.token in seen_tokens:
                errors.append(CheckError("bad-token", path,
                                         "duplicate token %r" % node.token))
            seen_tokens.add(node.token)
            dstack = dict(dstack)
            dstack[node.token] = node.sequent
        if node.rule == "leaf":
            comp = dstack.get(node.token)
            if comp is None:
                errors.append(CheckError(
                    "companion-mismatch", path,
                    "no ancestor D with token %r" % node.token))
            elif Counter(comp) != Counter(node.sequent):
                errors.append(CheckError(
                    "companion-mismatch", path,
                    "leaf sequent differs from companion: %s vs %s"
                    % (fmt_sequent(node.sequent), fmt_sequent(comp))))
        try:
            node.invalidate()
            origin_maps(node)
        except ProofError as e:
            errors.append(CheckError("bad-rule", path, str(e)))
            return
        for i, c in enumerate(node.children):
            visit(c, path + ("." if path else "") + str(i), dstack)

    visit(root, "", {})
    return CheckReport(errors)


def check_global(root):
    """Discharge condition: for every repeat leaf the path from its
    companion is successful (all sequents focused, no F rule, a Box rule),
    and every leaf is closed."""
    errors = []

    def visit(node, path, branch):
        branch = branch + [(node, path)]
        if not node.children:
            if node.rule == "ax":
                pass
            elif node.rule == "leaf":
                # locate companion on the branch
                comp_idx = None
                for idx in range(len(branch) - 2, -1, -1):
                    n, _ = branch[idx]
                    if n.rule == "d" and n.token == node.token:
                        comp_idx = idx
                        break
                if comp_idx is None:
                    errors.append(CheckError("companion-mismatch", path,
                                             "unmatched token %r" % node.token))
                else:
                    segment = branch[comp_idx:]
                    if not all(any(af.focused for af in n.sequent)
                               for n, _ in segment):
                        errors.append(CheckError(
                            "unfocused-sequent-on-repeat", path,
                            "a sequent on the repeat path has no formula "
                            "in focus"))
                    if any(n.rule == "focus" for n, _ in segment):
                        errors.append(CheckError(
                            "focus-on-repeat", path,
                            "F rule on the repeat path"))
                    if not any(n.rule == "box" for n, _ in segment):
                        errors.append(CheckError(
                            "no-box-on-repeat", path,
                            "repeat path contains no Box rule"))
            else:
                errors.append(CheckError("open-leaf", path,
                                         "leaf with rule %r is not closed"
                                         % node.rule))
        for i, c in enumerate(node.children):
            visit(c, path + ("." if path else "") + str(i), branch)

    visit(root, "", [])
    return CheckReport(errors)


def check_proof(root, allow_mix=False):
    rep = check_local(root, allow_mix=allow_mix)
    if not rep.ok:
        return rep
    return check_global(root)


# ---------------------------------------------------------------------------
# Clusters
# ---------------------------------------------------------------------------

class ClusterInfo:
    """SCC structure of the proof tree with back edges.

    cluster_id: id(node) -> component id; proper: id -> bool;
    depth: id(node) -> number of proper clusters on the longest downstream
    chain (counting the node's own cluster when proper).
    """

    def __init__(self, root):
        nodes = list(iter_nodes(root))
        comp = companion_map(root)
        succ = {}
        for n in nodes:
            out = list(n.children)
            if n.rule == "leaf" and n.token in comp:
                out.append(comp[n.token])
            succ[id(n)] = [id(m) for m in out]
        self.nodes = nodes
        self.by_id = {id(n): n for n in nodes}
        self.root = root
        self.parent = parent_map(root)
        self.cluster_id, members = _tarjan_ids(
            [id(n) for n in nodes], succ)
        self.members = {cid: [self.by_id[i] for i in ms]
                        for cid, ms in members.items()}
        self.proper = {cid: len(ms) > 1 for cid, ms in members.items()}
        # condensation + depth
        csucc = {cid: set() for cid in members}
        for n in nodes:
            c = self.cluster_id[id(n)]
            for m in succ[id(n)]:
                d = self.cluster_id[m]
                if d != c:
                    csucc[c].add(d)
        memo = {}

        def cdepth(c):
            if c in memo:
                return memo[c]
            memo[c] = 0
            best = 0
            for s in csucc[c]:
                best = max(best, cdepth(s))
            memo[c] = best + (1 if self.proper[c] else 0)
            return memo[c]

        self.cluster_depth = {c: cdepth(c) for c in members}
        self.depth = {id(n): self.cluster_depth[self.cluster_id[id(n)]]
                      for n in nodes}
        self._succ = succ

    def node_depth(self, node):
        return self.depth[id(node)]

    def is_proper_cluster_of(self, node):
        return self.proper[self.cluster_id[id(node)]]

    def cluster_nodes(self, node):
        return self.members[self.cluster_id[id(node)]]

    def component(self, node):
        """Reachable nodes of equal depth."""
        d = self.depth[id(node)]
        out = []
        seen = set()
        work = [id(node)]
        while work:
            i = work.pop()
            if i in seen:
                continue
            seen.add(i)
            if self.depth[i] != d:
                continue
            out.append(self.by_id[i])
            work.extend(self._succ[i])
        return out

    def proper_count(self):
        return sum(1 for v in self.proper.values() if v)


def _tarjan_ids(vertices, succ):
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    scc_of = {}
    members = {}
    counter = [0]
    next_scc = [0]
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                elif w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u_, _ = work[-1]
                lowlink[u_] = min(lowlink[u_], lowlink[v])
            if lowlink[v] == index[v]:
                grp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    grp.add(w)
                    if w == v:
                        break
                cid = next_scc[0]
                next_scc[0] += 1
                members[cid] = grp
                for w in grp:
                    scc_of[w] = cid
    return scc_of, members


def analyze_clusters(root):
    return ClusterInfo(root)


# ---------------------------------------------------------------------------
# Cut classification
# ---------------------------------------------------------------------------

class CutInfo(NamedTuple):
    node: Node
    formula: Formula
    important: bool
    essential: bool


def classify_cuts(root, info=None, diagnostics=True):
    """Important iff the cut sits in a trivial cluster; essential iff
    additionally the cut formula is a fixpoint formula."""
    if info is None:
        info = analyze_clusters(root)
    out = []
    for n in info.nodes:
        if n.rule not in ("cut", "mix"):
            continue
        phi = infer_cut_formula(n)
        important = not info.is_proper_cluster_of(n)
        essential = important and isinstance(phi, (Mu, Nu))
        out.append(CutInfo(n, phi, important, essential))
        if diagnostics and not important:
            _assert_unfocused_component_descendants(n, info)
    return out


def _assert_unfocused_component_descendants(cut_node, info):
    """Diagnostic: all component descendants of an unimportant cut's cut
    formula are out of focus."""
    d = info.node_depth(cut_node)
    work = []
    for ci, child in enumerate(cut_node.children):
        omap = origin_maps(cut_node)[ci]
        for pos, o in enumerate(omap):
            if o is None:
                work.append((child, pos))
    seen = set()
    while work:
        node, pos = work.pop()
        if (id(node), pos) in seen:
            continue
        seen.add((id(node), pos))
        if info.depth[id(node)] != d:
            continue
        if node.sequent[pos].focused:
            raise ProofError(
                "component descendant of an unimportant cut formula is in "
                "focus: %r at %r" % (node.sequent[pos], node))
        for ci, child in enumerate(node.children):
            for q in descendant_positions(node, ci, pos):
                work.append((child, q))
    return True


def cut_rank(root, graph=None):
    """Maximal rank of a cut (or mix) formula; 0 when cut-free."""
    formulas = [infer_cut_formula(n) for n in iter_nodes(root)
                if n.rule in ("cut", "mix")]
    if not formulas:
        return 0
    if graph is None:
        graph = proof_closure(root)
    return max(graph.rank[f] for f in formulas)


# ---------------------------------------------------------------------------
# Subproofs
# ---------------------------------------------------------------------------

def subproof_at(root, v, budget=None, tokens=None):
    """The closed proof rooted at ``v``: open repeat leaves are replaced by
    their companions' subproofs recursively; every copied D rule gets a
    fresh token."""
    if budget is None:
        budget = Budget()
    if tokens is None:
        tokens = TokenGen("s")
    comp = companion_map(root)

    def expand(node, ren):
        budget.tick()
        if node.rule == "d":
            new_tok = tokens.fresh()
            ren = dict(ren)
            ren[node.token] = new_tok
            kids = [expand(c, ren) for c in node.children]
            return Node(node.sequent, "d", kids, node.principal, new_tok)
        if node.rule == "leaf":
            if node.token in ren:
                return Node(node.sequent, "leaf", (), (), ren[node.token])
            # open leaf: replace by the companion's subproof
            return expand(comp[node.token], {})
        kids = [expand(c, ren) for c in node.children]
        return Node(node.sequent, node.rule, kids, node.principal,
                    None, node.split, node.counts, node.mcut)

    return expand(v, {})


def copy_proof(node, tokens=None, budget=None):
    """Structure-preserving copy with freshened discharge tokens."""
    if tokens is None:
        tokens = TokenGen("c")

    def go(n, ren):
        if budget is not None:
            budget.tick()
        tok = n.token
        if n.rule == "d":
            tok = tokens.fresh()
            ren = dict(ren)
            ren[n.token] = tok
        elif n.rule == "leaf":
            tok = ren.get(n.token, n.token)
        kids = [go(c, ren) for c in n.children]
        return Node(n.sequent, n.rule, kids, n.principal, tok,
                    n.split, n.counts, n.mcut)

    return go(node, {})


def proof_equal(a, b):
    """Structural equality modulo token names."""

    def go(x, y, ren):
        if (x.rule != y.rule or x.sequent != y.sequent
                or len(x.children) != len(y.children)):
            return False
        if x.rule == "d":
            ren = dict(ren)
            ren[x.token] = y.token
        elif x.rule == "leaf":
            if ren.get(x.token) != y.token:
                return False
        return all(go(cx, cy, ren) for cx, cy in zip(x.children, y.children))

    return go(a, b, {})


# ---------------------------------------------------------------------------
# Serialization (S-expressions)
# ---------------------------------------------------------------------------

def _sexpr_tokens(text):
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield (c, c, i)
            i += 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ProofError("unterminated string at %d" % i)
            yield ("str", text[i + 1:j], i)
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"':
                j += 1
            yield ("sym", text[i:j], i)
            i = j


def _sexpr_parse(text):
    toks = list(_sexpr_tokens(text))
    pos = [0]

    def parse_one():
        if pos[0] >= len(toks):
            raise ProofError("unexpected end of proof file")
        kind, val, at = toks[pos[0]]
        pos[0] += 1
        if kind == "(":
            items = []
            while True:
                if pos[0] >= len(toks):
                    raise ProofError("missing ')' (opened at %d)" % at)
                if toks[pos[0]][0] == ")":
                    pos[0] += 1
                    return items
                items.append(parse_one())
        if kind == ")":
            raise ProofError("unexpected ')' at %d" % at)
        if kind == "str":
            return ("str", val)
        return ("sym", val)

    out = parse_one()
    if pos[0] != len(toks):
        raise ProofError("trailing content in proof file")
    return out


def parse_proof(text):
    """Parse a proof file (see the module's External Interfaces format)."""
    form = _sexpr_parse(text)
    return _node_from_sexpr(form)


def _node_from_sexpr(form):
    if not (isinstance(form, list) and form and form[0] == ("sym", "node")):
        raise ProofError("expected (node seq rule children...)")
    if len(form) < 3:
        raise ProofError("node form too short")
    seq = _seq_from_sexpr(form[1])
    rule_form = form[2]
    children = [_node_from_sexpr(f) for f in form[3:]]
    if not (isinstance(rule_form, list) and rule_form
            and rule_form[0] == ("sym", "rule")):
        raise ProofError("expected (rule NAME args)")
    if len(rule_form) < 2 or rule_form[1][0] != "sym":
        raise ProofError("rule needs a name")
    name = rule_form[1][1]
    args = rule_form[2:]
    if name not in RULE_NAMES or name == "mix":
        raise ProofError("unknown rule name %r" % name)
    token = None
    principal = ()
    split = None
    if name in ("d", "leaf"):
        if len(args) != 1 or args[0][0] != "sym":
            raise ProofError("rule %s needs one token argument" % name)
        token = args[0][1]
    elif name in ("or", "and", "box", "mu", "nu", "weak", "contr"):
        if len(args) != 1:
            raise ProofError("rule %s needs one occurrence index" % name)
        principal = (_int_arg(args[0]),)
    elif name in ("focus", "unfocus"):
        principal = tuple(_int_arg(a) for a in args)
    elif name == "cut":
        if len(args) != 1:
            raise ProofError("cut needs its split index")
        split = _int_arg(args[0])
    elif name == "ax":
        if args:
            raise ProofError("ax takes no arguments")
    return Node(seq, name, children, principal, token, split)


def _int_arg(arg):
    kind, val = arg
    if kind != "sym":
        raise ProofError("expected integer argument")
    try:
        return int(val)
    except ValueError:
        raise ProofError("expected integer argument, got %r" % val)


def _seq_from_sexpr(form):
    if not (isinstance(form, list) and form and form[0] == ("sym", "seq")):
        raise ProofError("expected (seq ...)")
    out = []
    i = 1
    while i < len(form):
        item = form[i]
        if item[0] != "str":
            raise ProofError("sequent members are quoted formulas")
        text = item[1]
        focused = False
        i += 1
        if i < len(form) and form[i] == ("sym", "^f"):
            focused = True
            i += 1
        elif i < len(form) and form[i] == ("sym", "^u"):
            i += 1
        out.append(AnnForm(parse_formula(text), focused))
    return tuple(out)


def print_proof(root):
    """Serialize with canonical token renaming (preorder D numbering)."""
    ren = {}
    for n in iter_nodes(root):
        if n.rule == "d" and n.token not in ren:
            ren[n.token] = "x%d" % len(ren)
    lines = []

    def emit(node, indent):
        pad = "  " * indent
        seq = " ".join('"%s"^%s' % (print_formula(af.formula), af.annot())
                       for af in node.sequent)
        rule = node.rule
        if rule in ("d", "leaf"):
            rule += " " + ren.get(node.token, node.token)
        elif rule in ("or", "and", "box", "mu", "nu", "weak", "contr"):
            rule += " %d" % node.principal[0]
        elif rule in ("focus", "unfocus"):
            rule += "".join(" %d" % i for i in node.principal)
        elif rule == "cut":
            rule += " %d" % node.split
        open_line = "%s(node (seq %s) (rule %s)" % (pad, seq, rule)
        if not node.children:
            lines.append(open_line + ")")
            return
        lines.append(open_line)
        for c in node.children:
            emit(c, indent + 1)
        lines.append(pad + ")")

    emit(root, 0)
    return "\n".join(lines) + "\n"
