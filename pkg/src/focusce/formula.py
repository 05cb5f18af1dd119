"""Formulas of the alternation-free modal mu-calculus.

Formulas are kept in negation normal form: negation only occurs on atoms
(`~p`), and the remaining connectives are disjunction, conjunction, the
modalities `<>` / `[]` and the two fixpoint binders `mu` / `nu`.

The module also houses the closure machinery: the one-step trace relation
on the closure of a formula set, its strongly connected components, the
rank grading, and the magenta/navy colouring.
"""

from __future__ import annotations


class FormulaError(Exception):
    pass


class ParseError(FormulaError):
    """Syntax error with a position attached."""

    def __init__(self, message, pos):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Formula:
    """Base class.  Instances are immutable and hashable.

    Equality is alpha-insensitive: bound variables are compared by binding
    position, free variables and atoms by name.
    """

    __slots__ = ("_key", "_hash")

    def key(self):
        k = getattr(self, "_key", None)
        if k is None:
            k = self._make_key({}, 0)
            object.__setattr__(self, "_key", k)
        return k

    def _make_key(self, env, depth):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is None:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return "Formula(%s)" % print_formula(self)

    def __str__(self):
        return print_formula(self)


def _leaf(cls_tag):
    class _Named(Formula):
        __slots__ = ("name",)
        tag = cls_tag

        def __init__(self, name):
            object.__setattr__(self, "name", name)

        def __setattr__(self, *a):  # pragma: no cover - immutability guard
            raise AttributeError("immutable")

    return _Named


class Atom(_leaf("atom")):
    __slots__ = ()

    def _make_key(self, env, depth):
        return ("p", self.name)


class NegAtom(_leaf("negatom")):
    __slots__ = ()

    def _make_key(self, env, depth):
        return ("~p", self.name)


class Var(_leaf("var")):
    __slots__ = ()

    def _make_key(self, env, depth):
        if self.name in env:
            return ("v", env[self.name])
        return ("fv", self.name)


class _Binary(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def _make_key(self, env, depth):
        return (self.tag, self.left._make_key(env, depth),
                self.right._make_key(env, depth))


class Or(_Binary):
    __slots__ = ()
    tag = "|"


class And(_Binary):
    __slots__ = ()
    tag = "&"


class _Unary(Formula):
    __slots__ = ("body",)

    def __init__(self, body):
        object.__setattr__(self, "body", body)

    def _make_key(self, env, depth):
        return (self.tag, self.body._make_key(env, depth))


class Dia(_Unary):
    __slots__ = ()
    tag = "<>"


class Box(_Unary):
    __slots__ = ()
    tag = "[]"


class _Fix(Formula):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "body", body)

    def _make_key(self, env, depth):
        inner = dict(env)
        inner[self.var] = depth
        return (self.tag, self.body._make_key(inner, depth + 1))


class Mu(_Fix):
    __slots__ = ()
    tag = "mu"


class Nu(_Fix):
    __slots__ = ()
    tag = "nu"


def is_literal(f):
    return isinstance(f, (Atom, NegAtom))


def is_modal(f):
    return isinstance(f, (Dia, Box))


def is_fixpoint(f):
    return isinstance(f, (Mu, Nu))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_KEYWORDS = ("mu", "nu")


class _Lexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tok = None
        self.tok_pos = 0
        self.advance()

    def advance(self):
        t = self.text
        i = self.pos
        while i < len(t) and t[i].isspace():
            i += 1
        self.tok_pos = i
        if i >= len(t):
            self.tok = ("eof", None)
            self.pos = i
            return
        c = t[i]
        if c in "().&|~":
            self.tok = (c, c)
            self.pos = i + 1
        elif t.startswith("<>", i):
            self.tok = ("<>", "<>")
            self.pos = i + 2
        elif t.startswith("[]", i):
            self.tok = ("[]", "[]")
            self.pos = i + 2
        elif c.isalpha() and c.islower():
            j = i
            while j < len(t) and (t[j].isalnum() or t[j] == "_"):
                j += 1
            word = t[i:j]
            if word in _KEYWORDS:
                self.tok = (word, word)
            else:
                self.tok = ("ident", word)
            self.pos = j
        else:
            raise ParseError("unexpected character %r" % c, i)

    def expect(self, kind):
        if self.tok[0] != kind:
            raise ParseError("expected %r, got %r" % (kind, self.tok[0]),
                             self.tok_pos)
        val = self.tok[1]
        self.advance()
        return val


def parse_formula(text):
    """Parse a formula from its concrete syntax.

    Grammar (precedence: prefix > '&' > '|'; fixpoint bodies extend
    maximally to the right)::

        F ::= IDENT | '~' IDENT | '(' F ')' | '<>' F | '[]' F
            | F '&' F | F '|' F | 'mu' IDENT '.' F | 'nu' IDENT '.' F

    Bound variables are renamed apart if the input reuses names.
    """
    lx = _Lexer(text)
    f = _parse_or(lx, frozenset())
    if lx.tok[0] != "eof":
        raise ParseError("trailing input %r" % lx.tok[0], lx.tok_pos)
    return well_name(f)


def _parse_or(lx, bound):
    f = _parse_and(lx, bound)
    while lx.tok[0] == "|":
        lx.advance()
        f = Or(f, _parse_and(lx, bound))
    return f


def _parse_and(lx, bound):
    f = _parse_prefix(lx, bound)
    while lx.tok[0] == "&":
        lx.advance()
        f = And(f, _parse_prefix(lx, bound))
    return f


def _parse_prefix(lx, bound):
    kind, val = lx.tok
    if kind == "(":
        lx.advance()
        f = _parse_or(lx, bound)
        lx.expect(")")
        return f
    if kind == "~":
        lx.advance()
        name = lx.expect("ident")
        return NegAtom(name)
    if kind == "<>":
        lx.advance()
        return Dia(_parse_prefix(lx, bound))
    if kind == "[]":
        lx.advance()
        return Box(_parse_prefix(lx, bound))
    if kind in ("mu", "nu"):
        lx.advance()
        name = lx.expect("ident")
        lx.expect(".")
        body = _parse_or(lx, bound | {name})
        return (Mu if kind == "mu" else Nu)(name, body)
    if kind == "ident":
        lx.advance()
        if val in bound:
            return Var(val)
        return Atom(val)
    raise ParseError("unexpected token %r" % kind, lx.tok_pos)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def print_formula(f):
    """Concrete syntax for ``f``; round-trips through parse_formula.

    Bound variables are renamed to a canonical scheme (x, y, z, w, v, x1,
    y1, ...) skipping names in use for atoms or free variables, so that
    alpha-equal formulas print identically and printing is idempotent
    under reparsing.
    """
    used = set(free_vars(f))

    def atoms(g):
        if isinstance(g, (Atom, NegAtom)):
            used.add(g.name)
        elif isinstance(g, _Binary):
            atoms(g.left)
            atoms(g.right)
        elif isinstance(g, _Unary):
            atoms(g.body)
        elif isinstance(g, _Fix):
            atoms(g.body)

    atoms(f)
    names = _canonical_names(used)
    return _pr(f, 0, True, {}, names)


def _canonical_names(used):
    def gen():
        base = "xyzwv"
        i = 0
        while True:
            for b in base:
                name = b if i == 0 else "%s%d" % (b, i)
                if name not in used:
                    yield name
            i += 1

    return gen()


def _pr(f, min_prec, rightmost, env, names):
    # precedence levels: '|' = 0, '&' = 1, prefix/leaf = 2
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Var):
        return env.get(f.name, f.name)
    if isinstance(f, NegAtom):
        return "~" + f.name
    if isinstance(f, Dia):
        return "<>" + _pr(f.body, 2, rightmost, env, names)
    if isinstance(f, Box):
        return "[]" + _pr(f.body, 2, rightmost, env, names)
    if isinstance(f, Or):
        s = "%s | %s" % (_pr(f.left, 1, False, env, names),
                         _pr(f.right, 1, rightmost, env, names))
        return "(" + s + ")" if min_prec > 0 else s
    if isinstance(f, And):
        s = "%s & %s" % (_pr(f.left, 2, False, env, names),
                         _pr(f.right, 2, rightmost, env, names))
        return "(" + s + ")" if min_prec > 1 else s
    if isinstance(f, (Mu, Nu)):
        new = next(names)
        env = dict(env)
        env[f.var] = new
        s = "%s %s.%s" % (f.tag, new, _pr(f.body, 0, True, env, names))
        # a fixpoint body swallows everything to its right, so any
        # non-rightmost occurrence needs parentheses
        return s if rightmost and min_prec == 0 else "(" + s + ")"
    raise TypeError(f)


# ---------------------------------------------------------------------------
# Basic operations
# ---------------------------------------------------------------------------

def free_vars(f):
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, (Atom, NegAtom)):
        return set()
    if isinstance(f, _Binary):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, _Unary):
        return free_vars(f.body)
    return free_vars(f.body) - {f.var}


def bound_vars(f):
    if isinstance(f, _Binary):
        return bound_vars(f.left) | bound_vars(f.right)
    if isinstance(f, _Unary):
        return bound_vars(f.body)
    if isinstance(f, _Fix):
        return bound_vars(f.body) | {f.var}
    return set()


def well_name(f):
    """Rename bound variables apart (from each other and from free names)."""
    used = set(free_vars(f))
    counter = [0]

    def fresh(base):
        if base not in used:
            used.add(base)
            return base
        while True:
            counter[0] += 1
            cand = "%s%d" % (base, counter[0])
            if cand not in used:
                used.add(cand)
                return cand

    def go(g, ren):
        if isinstance(g, Var):
            return Var(ren.get(g.name, g.name))
        if isinstance(g, (Atom, NegAtom)):
            return g
        if isinstance(g, Or):
            return Or(go(g.left, ren), go(g.right, ren))
        if isinstance(g, And):
            return And(go(g.left, ren), go(g.right, ren))
        if isinstance(g, Dia):
            return Dia(go(g.body, ren))
        if isinstance(g, Box):
            return Box(go(g.body, ren))
        name = fresh(g.var)
        inner = dict(ren)
        inner[g.var] = name
        return type(g)(name, go(g.body, inner))

    return go(f, {})


def subst(f, name, value):
    """Substitute the closed formula ``value`` for the free variable ``name``."""
    if isinstance(f, Var):
        return value if f.name == name else f
    if isinstance(f, (Atom, NegAtom)):
        return f
    if isinstance(f, Or):
        return Or(subst(f.left, name, value), subst(f.right, name, value))
    if isinstance(f, And):
        return And(subst(f.left, name, value), subst(f.right, name, value))
    if isinstance(f, Dia):
        return Dia(subst(f.body, name, value))
    if isinstance(f, Box):
        return Box(subst(f.body, name, value))
    if f.var == name:
        return f
    return type(f)(f.var, subst(f.body, name, value))


def negate(f):
    """Dualize: swap &/|, <>/[], mu/nu; flip atoms; fix variables."""
    if isinstance(f, Atom):
        return NegAtom(f.name)
    if isinstance(f, NegAtom):
        return Atom(f.name)
    if isinstance(f, Var):
        return f
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Dia):
        return Box(negate(f.body))
    if isinstance(f, Box):
        return Dia(negate(f.body))
    if isinstance(f, Mu):
        return Nu(f.var, negate(f.body))
    if isinstance(f, Nu):
        return Mu(f.var, negate(f.body))
    raise TypeError(f)


def unfold(f):
    """Unfolding of a fixpoint formula: eta x.b  ->  b[eta x.b / x]."""
    if not is_fixpoint(f):
        raise FormulaError("unfold requires a fixpoint formula, got %s" % f)
    return subst(f.body, f.var, f)


def trace_successors(f):
    """One-step trace relation: direct boolean/modal subformulas, or the
    unfolding for fixpoint formulas."""
    if isinstance(f, (Or, And)):
        return (f.left, f.right)
    if isinstance(f, (Dia, Box)):
        return (f.body,)
    if is_fixpoint(f):
        return (unfold(f),)
    return ()


def nmf(f):
    """Size of the non-modal closure of ``f``: the set of formulas
    reachable by trace steps that never pass through a modality.

    Guardedness makes the non-modal trace relation acyclic, so for any
    non-modal rule the multiset of nmf values of a sequent strictly
    decreases upwards; only Box rules can increase it.  This is the
    measure witnessing that every clean repeat path crosses a Box.
    """
    seen = set()
    work = [f]
    while work:
        g = work.pop()
        if g in seen:
            continue
        seen.add(g)
        if not isinstance(g, (Dia, Box)):
            work.extend(trace_successors(g))
    return len(seen)


# ---------------------------------------------------------------------------
# Well-formedness report
# ---------------------------------------------------------------------------

class AfmcReport:
    def __init__(self, closed, guarded, alternation_free, problems):
        self.closed = closed
        self.guarded = guarded
        self.alternation_free = alternation_free
        self.problems = problems

    @property
    def accepted(self):
        return self.closed and self.guarded and self.alternation_free

    def __repr__(self):
        return ("AfmcReport(closed=%s, guarded=%s, alternation_free=%s)"
                % (self.closed, self.guarded, self.alternation_free))


def _guarded_in(body, name, under_modality):
    """Is every free occurrence of ``name`` in ``body`` under a modality?"""
    if isinstance(body, Var):
        return under_modality or body.name != name
    if isinstance(body, (Atom, NegAtom)):
        return True
    if isinstance(body, _Binary):
        return (_guarded_in(body.left, name, under_modality)
                and _guarded_in(body.right, name, under_modality))
    if isinstance(body, _Unary):
        return _guarded_in(body.body, name, True)
    if body.var == name:
        return True
    return _guarded_in(body.body, name, under_modality)


def _in_scope_of(body, name, opposite):
    """Does ``name`` occur free inside an ``opposite``-binder within body?"""
    if isinstance(body, (Var, Atom, NegAtom)):
        return False
    if isinstance(body, _Binary):
        return (_in_scope_of(body.left, name, opposite)
                or _in_scope_of(body.right, name, opposite))
    if isinstance(body, _Unary):
        return _in_scope_of(body.body, name, opposite)
    if body.var == name:
        return False
    if isinstance(body, opposite) and name in free_vars(body.body):
        return True
    return _in_scope_of(body.body, name, opposite)


def check_afmc(f):
    """Report whether ``f`` is closed, guarded and alternation free."""
    problems = []
    fv = free_vars(f)
    closed = not fv
    if not closed:
        problems.append("free variables: %s" % ", ".join(sorted(fv)))
    guarded = True
    alternation_free = True

    def walk(g):
        nonlocal guarded, alternation_free
        if isinstance(g, _Binary):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, _Unary):
            walk(g.body)
        elif isinstance(g, _Fix):
            if not _guarded_in(g.body, g.var, False):
                guarded = False
                problems.append("unguarded variable %s in %s"
                                % (g.var, print_formula(g)))
            opposite = Nu if isinstance(g, Mu) else Mu
            if _in_scope_of(g.body, g.var, opposite):
                alternation_free = False
                problems.append(
                    "variable %s of %s crosses a %s binder (alternation)"
                    % (g.var, g.tag, opposite.tag))
            walk(g.body)

    walk(f)
    return AfmcReport(closed, guarded, alternation_free, problems)


# ---------------------------------------------------------------------------
# Closure graphs, rank, colours
# ---------------------------------------------------------------------------

MAGENTA = "Magenta"
NAVY = "Navy"
NEITHER = "Neither"


class ClosureGraph:
    """The closure of a seed set together with its trace structure.

    Attributes:
      formulas: frozenset of all closure members
      edges:    set of (phi, psi) pairs of the one-step trace relation
      scc_id:   formula -> component index (mutual-reachability classes)
      rank:     formula -> positive integer (minimal grading)
    """

    def __init__(self, seed):
        seed = list(seed)
        for f in seed:
            rep = check_afmc(f)
            if not rep.accepted:
                raise FormulaError("closure seed rejected: %s: %s"
                                   % (print_formula(f), "; ".join(rep.problems)))
        formulas = set()
        edges = set()
        succ = {}
        work = list(seed)
        while work:
            f = work.pop()
            if f in formulas:
                continue
            formulas.add(f)
            nxt = trace_successors(f)
            succ[f] = nxt
            for g in nxt:
                edges.add((f, g))
                if g not in formulas:
                    work.append(g)
        self.formulas = frozenset(formulas)
        self.edges = edges
        self._succ = succ
        self.scc_id, self._scc_members = _tarjan(formulas, succ)
        self.rank = self._compute_rank()
        self._color = self._compute_colors()

    def _compute_rank(self):
        # condensation successors per component
        comp_succ = {}
        for f in self.formulas:
            c = self.scc_id[f]
            comp_succ.setdefault(c, set())
            for g in self._succ[f]:
                d = self.scc_id[g]
                if d != c:
                    comp_succ[c].add(d)
        memo = {}

        def comp_rank(c):
            if c in memo:
                return memo[c]
            memo[c] = 1  # placeholder; the condensation is acyclic
            best = 0
            for d in comp_succ[c]:
                best = max(best, comp_rank(d))
            memo[c] = 1 + best if comp_succ[c] else 1
            return memo[c]

        return {f: comp_rank(self.scc_id[f]) for f in self.formulas}

    def _compute_colors(self):
        has_mu = {}
        has_nu = {}
        for f in self.formulas:
            c = self.scc_id[f]
            if isinstance(f, Mu):
                has_mu[c] = True
            elif isinstance(f, Nu):
                has_nu[c] = True
        colors = {}
        for f in self.formulas:
            c = self.scc_id[f]
            m, n = has_mu.get(c, False), has_nu.get(c, False)
            if m and n:
                raise FormulaError(
                    "class of %s is both magenta and navy; input is not "
                    "alternation free" % print_formula(f))
            colors[f] = MAGENTA if m else NAVY if n else NEITHER
        return colors

    def color(self, f):
        if f not in self.formulas:
            raise FormulaError("%s not in closure graph" % print_formula(f))
        return self._color[f]

    def equivalent(self, f, g):
        """Mutual reachability under the trace relation."""
        return self.scc_id[f] == self.scc_id[g]

    def __len__(self):
        return len(self.formulas)


def closure(seed):
    """Closure graph of a set of closed, guarded, alternation-free formulas."""
    return ClosureGraph(seed)


def classify_color(f, g):
    return g.color(f)


def _tarjan(vertices, succ):
    """Iterative Tarjan SCC; returns (vertex -> component id, id -> members).

    Component ids are assigned in reverse topological order of discovery;
    only equality of ids is meaningful to callers.
    """
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
                u = work[-1][0]
                lowlink[u] = min(lowlink[u], lowlink[v])
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                cid = next_scc[0]
                next_scc[0] += 1
                members[cid] = comp
                for w in comp:
                    scc_of[w] = cid
    return scc_of, members
