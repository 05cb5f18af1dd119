"""Contraction elimination for cyclic Focus proofs.

Two cooperating passes remove every Contr rule from a valid, cut-free
proof:

* contractions sitting in trivial clusters are pushed upwards, one rule at
  a time, cancelling against Weak, inverting when they meet their own
  principal rule, and sliding above D (which moves them into the proper
  cluster);
* contractions inside a proper cluster are removed by unfolding the
  cluster until every critical path admits a repeat v..l with S_v included
  in S_l, where the derivation is closed off again with a fresh discharge
  and Weak rules only.

The rule inversion used by the principal cases is exposed as
``invert_rule`` and works on any cut-free proof whose tracked occurrence
is never focused when it is a least fixpoint.
"""

from collections import Counter

from ..formula import And, Mu, Nu, Or, unfold
from ..prooftree import (AnnForm, Budget, Node, ProofError, analyze_clusters,
                         check_proof, copy_proof, iter_nodes, origin_maps,
                         parent_map, expected_premisses, TokenGen)
from .common import counter_sub, remove_one, seq_index, splice, stack_to, unfold_d

_MODE_CLS = {"or": Or, "and": And, "mu": Mu, "nu": Nu}


def shallow_depth(root, info=None):
    """Longest root path counting only nodes outside proper clusters."""
    if info is None:
        info = analyze_clusters(root)

    def sd(n):
        best = 0
        for c in n.children:
            best = max(best, sd(c))
        return best + (0 if info.is_proper_cluster_of(n) else 1)

    return sd(root)


# ---------------------------------------------------------------------------
# Rule inversion
# ---------------------------------------------------------------------------

def _repl(af, mode, branch):
    """Premiss occurrences replacing a tracked conclusion occurrence."""
    f, a = af
    if mode == "or":
        return (AnnForm(f.left, a), AnnForm(f.right, a))
    if mode == "and":
        return (AnnForm(f.left if branch == 0 else f.right, a),)
    if mode == "mu":
        if a:
            raise ProofError("cannot invert a focused least fixpoint")
        return (AnnForm(unfold(f), False),)
    if mode == "nu":
        return (AnnForm(unfold(f), a),)
    raise ProofError("unknown inversion mode %r" % mode)


def _rewrite_seq(seq, tracked, mode, branch):
    """Sequent with tracked occurrences replaced; also returns the map from
    old untracked positions to new positions."""
    tracked = set(tracked)
    ns = []
    posmap = {}
    for i, af in enumerate(seq):
        if i in tracked:
            ns.extend(_repl(af, mode, branch))
        else:
            posmap[i] = len(ns)
            ns.append(af)
    return tuple(ns), posmap


def _invert(p, pos, mode, branch, tokens=None):
    cls = _MODE_CLS[mode]
    if tokens is None:
        tokens = TokenGen("i")

    def restore(node, env):
        """Fix leaves whose companion was rewritten but whose own sequent is
        the original one: close them with a copy of the original loop."""
        if node.rule == "leaf" and node.token in env:
            new_seq, orig_d = env[node.token]
            if Counter(node.sequent) != Counter(new_seq):
                if Counter(node.sequent) != Counter(orig_d.sequent):
                    raise ProofError("inversion desynchronised a repeat leaf")
                return restore(copy_proof(orig_d, tokens), env)
        if not node.children:
            return node
        kids = [restore(c, env) for c in node.children]
        if all(k is c for k, c in zip(kids, node.children)):
            return node
        m = node.copy_shallow()
        m.invalidate()
        m.children = kids
        return m

    def go(node, tracked, env):
        if not tracked:
            return restore(node, env)
        for i in tracked:
            if not isinstance(node.sequent[i].formula, cls):
                raise ProofError("tracked occurrence is not a %s formula" % mode)
        ns, posmap = _rewrite_seq(node.sequent, tracked, mode, branch)
        r = node.rule

        if r == "leaf":
            new_seq, orig_d = env[node.token]
            if Counter(ns) == Counter(new_seq):
                return Node(ns, "leaf", (), (), node.token)
            if Counter(ns) == Counter(orig_d.sequent):
                return restore(copy_proof(orig_d, tokens), env)
            raise ProofError(
                "inversion desynchronised a repeat leaf from its companion")
        if r == "ax":
            raise ProofError("tracked compound occurrence inside an axiom")
        if r == "box":
            raise ProofError("tracked non-modal occurrence in a box conclusion")
        if r in ("cut", "mix"):
            raise ProofError("inversion requires a cut-free proof")

        omaps = origin_maps(node)
        tset = set(tracked)

        def child_tracked(ci):
            return tuple(i for i, o in enumerate(omaps[ci]) if o in tset)

        if r == "d":
            env2 = dict(env)
            env2[node.token] = (ns, node)
            kid = go(node.children[0], child_tracked(0), env2)
            return Node(ns, "d", [kid], (), node.token)

        principal_tracked = [i for i in node.principal if i in tset]

        if r == mode and node.principal and node.principal[0] in tset:
            # the tracked occurrence's own rule fires: the premiss already
            # carries the replacement, so the node dissolves
            ci = branch if mode == "and" else 0
            fired = node.principal[0]
            rest = tuple(i for i, o in enumerate(omaps[ci])
                         if o in tset and o != fired)
            return go(node.children[ci], rest, env)

        if r == "weak" and principal_tracked:
            kid = go(node.children[0], child_tracked(0), env)
            return stack_to(kid, ns)

        if r == "contr" and principal_tracked:
            kid = go(node.children[0], child_tracked(0), env)
            return stack_to(kid, ns)

        if r in ("focus", "unfocus") and principal_tracked:
            if mode == "mu":
                raise ProofError("focus change on a least-fixpoint inversion")
            newp = []
            for i in node.principal:
                if i in tset:
                    base = posmap_base(node.sequent, tracked, i, mode, branch)
                    newp.extend(base)
                else:
                    newp.append(posmap[i])
            kid = go(node.children[0], child_tracked(0), env)
            return Node(ns, r, [kid], tuple(sorted(newp)))

        # generic: the rule does not touch the tracked occurrences
        newp = tuple(posmap[i] for i in node.principal)
        new_split = None
        if node.split is not None:
            shift = sum(1 for i in tracked if i < node.split)
            new_split = node.split + shift * (len(_repl(node.sequent[tracked[0]],
                                                        mode, branch)) - 1)
        kids = [go(c, child_tracked(ci), env)
                for ci, c in enumerate(node.children)]
        return Node(ns, r, kids, newp, node.token, new_split, node.counts)

    def posmap_base(seq, tracked, i, mode, branch):
        # new positions occupied by the replacement of tracked position i
        out = 0
        for j in range(i):
            out += len(_repl(seq[j], mode, branch)) if j in set(tracked) else 1
        width = len(_repl(seq[i], mode, branch))
        return list(range(out, out + width))

    return go(p, (pos,), {})


def invert_rule(p, root_rule, branch=0, pos=None):
    """A proof of the selected premiss of applying ``root_rule`` to p's
    conclusion.

    ``root_rule`` is one of "or"/"and"/"mu"/"nu"; ``pos`` selects the
    occurrence to invert (default: first occurrence of the right shape).
    The rewrite keeps the cluster depth of the proof.
    """
    mode = root_rule.lower()
    if mode not in _MODE_CLS:
        raise ProofError("invert_rule on non-invertible rule %r" % root_rule)
    if pos is None:
        cls = _MODE_CLS[mode]
        pos = next((i for i, af in enumerate(p.sequent)
                    if isinstance(af.formula, cls)), None)
        if pos is None:
            raise ProofError("no %s occurrence in the conclusion" % mode)
    return _invert(p, pos, mode, branch)


# ---------------------------------------------------------------------------
# Pushing a trivial-cluster contraction one step
# ---------------------------------------------------------------------------

def _principal_pool(conclusion, x_node, t_prime, af):
    """Principal indices in ``conclusion`` mirroring ``x_node.principal``,
    with exactly ``t_prime`` of the copies of ``af`` selected."""
    pools = {}
    for i, a in enumerate(conclusion):
        pools.setdefault(a, []).append(i)
    chosen = []
    copies_used = 0
    for pidx in x_node.principal:
        a = x_node.sequent[pidx]
        if a == af:
            if copies_used < t_prime:
                chosen.append(pools[af].pop())
                copies_used += 1
        else:
            chosen.append(pools[a].pop())
    while copies_used < t_prime:
        chosen.append(pools[af].pop())
        copies_used += 1
    return tuple(sorted(chosen))


def _push_contr(cnode, tokens):
    """One-step reduction of a contraction in a trivial cluster: the
    replacement subtree for ``cnode``."""
    (ci,) = cnode.principal
    af = cnode.sequent[ci]
    conclusion = cnode.sequent
    x = cnode.children[0]
    r = x.rule

    if r in ("cut", "mix"):
        raise ProofError("contraction elimination requires a cut-free proof")
    if r in ("leaf", "ax"):
        raise ProofError("internal: contraction directly under %s" % r)

    if r == "d":
        # move the contraction above the discharge; discharged leaves lose
        # one copy and regain it by Weak
        def fix(n):
            if n.rule == "leaf" and n.token == x.token:
                return stack_to(Node(conclusion, "leaf", (), (), x.token),
                                n.sequent)
            if not n.children:
                return n
            m = n.copy_shallow()
            m.invalidate()
            m.children = [fix(c) for c in n.children]
            return m

        body = fix(x.children[0])
        contr = Node(conclusion, "contr", [body],
                     principal=(seq_index(conclusion, af),))
        return Node(conclusion, "d", [contr], (), x.token)

    if r == "weak" and x.sequent[x.principal[0]] == af:
        # Weak removes one copy: the pair cancels
        return x.children[0]

    if r in ("or", "and", "mu", "nu") and x.sequent[x.principal[0]] == af:
        # principal case: invert the surviving copy and contract components
        f = af.formula
        kids = []
        for br, b in enumerate(x.children):
            inv = _invert(b, seq_index(b.sequent, af), r, br)
            kids.append(inv)
        node = Node(conclusion, r, [], principal=(seq_index(conclusion, af),))
        exps = expected_premisses(node)
        node.children = [stack_to(k, exp) for k, (exp, _) in zip(kids, exps)]
        return node

    if r in ("focus", "unfocus"):
        t = sum(1 for p in x.principal if x.sequent[p] == af)
        m = sum(1 for a in x.sequent if a == af)
        if t == 0 or t <= m - 2 or t == m:
            t_prime = t if (t == 0 or t <= m - 2) else t - 1
            xp = Node(conclusion, r, [],
                      principal=_principal_pool(conclusion, x, t_prime, af))
            (exp, _), = expected_premisses(xp)
            xp.children = [stack_to(x.children[0], exp)]
            return xp
        # diverged pair: one of two copies flipped.  Demote the focused
        # copy, contract, and re-flip the remaining principal positions.
        child = x.children[0]
        f = af.formula
        af_u, af_f = AnnForm(f, False), AnnForm(f, True)
        i_f = seq_index(child.sequent, af_f)
        demoted = child.sequent[:i_f] + (af_u,) + child.sequent[i_f + 1:]
        a_node = Node(demoted, "focus", [child], principal=(i_f,))
        merged = remove_one(demoted, af_u)
        contr = Node(merged, "contr", [a_node],
                     principal=(seq_index(merged, af_u),))
        rest = [p for p in x.principal if x.sequent[p] != af]
        # rebuild the bottom flip explicitly
        pools = {}
        for i, a in enumerate(conclusion):
            pools.setdefault(a, []).append(i)
        newp = []
        for p in rest:
            newp.append(pools[x.sequent[p]].pop())
        if r == "unfocus":
            # the surviving conclusion copy is focused; its premiss copy
            # must be the unfocused one we produced
            newp.append(pools[af_f].pop())
        if not newp:
            return contr
        return Node(conclusion, r, [contr], tuple(sorted(newp)))

    # generic commutation: re-derive the rule on the contracted conclusion
    # and contract the duplicated descendants in each premiss
    xp = Node(conclusion, r, [], principal=_principal_pool(conclusion, x, 0, af),
              token=None, split=None, counts=x.counts)
    exps = expected_premisses(xp)
    xp.children = [stack_to(c, exp) for c, (exp, _) in zip(x.children, exps)]
    return xp


# ---------------------------------------------------------------------------
# Proper-cluster contractions
# ---------------------------------------------------------------------------

def _critical_paths(pi, info, r):
    """Maximal paths of the contraction/companion-free prefix of the root
    component of ``r`` that are blocked inside the component."""
    a_ids = {id(n) for n in info.component(r)}
    comp = {n.token: n for n in iter_nodes(pi) if n.rule == "d"}
    paths = []

    def walk(n, path):
        path = path + [n]
        blocked = False
        if n.rule == "leaf":
            c = comp.get(n.token)
            if c is not None and id(c) in a_ids:
                blocked = True
        rec = []
        for c in n.children:
            if id(c) in a_ids and c.rule in ("contr", "d"):
                blocked = True
            elif id(c) in a_ids:
                rec.append(c)
        if blocked:
            paths.append(path)
        for c in rec:
            walk(c, path)

    if id(r) in a_ids and r.rule not in ("contr", "d"):
        walk(r, [])
    return paths


def _tamed_pair(path):
    """Root-most (v, l) on the path with S_v included in S_l, or None."""
    counters = [Counter(n.sequent) for n in path]
    for j in range(1, len(path)):
        for i in range(j):
            if counter_sub(counters[i], counters[j]):
                return path[i], path[j]
    return None


def _close_repeat(pi, v, l, tokens):
    """Insert a discharge at ``v`` and replace the subtree at ``l`` by a
    repeat leaf padded with Weak rules."""
    tok = tokens.fresh()
    leaf = stack_to(Node(v.sequent, "leaf", (), (), tok), l.sequent)
    inner = splice(v, l, leaf, parent_map(v))
    new_v = Node(v.sequent, "d", [inner], (), tok)
    return splice(pi, v, new_v, parent_map(pi))


def eliminate_contractions(p, budget=None):
    """A contraction-free proof of the same conclusion.

    Requires a valid cut-free proof; the result passes the checker and its
    cluster depth never grows beyond what unfolding demands.
    """
    if budget is None:
        budget = Budget()
    tokens = TokenGen("k")
    pi = copy_proof(p, tokens=tokens)
    while True:
        budget.tick()
        contrs = [n for n in iter_nodes(pi) if n.rule == "contr"]
        if not contrs:
            break
        info = analyze_clusters(pi)
        trivial = [n for n in contrs if not info.is_proper_cluster_of(n)]
        if trivial:
            below = set()
            for n in trivial:
                for m in iter_nodes(n):
                    if m is not n and m.rule == "contr" and \
                            not info.is_proper_cluster_of(m):
                        below.add(id(n))
                        break
            cand = next(n for n in trivial if id(n) not in below)
            pi = splice(pi, cand, _push_contr(cand, tokens))
            continue
        # all remaining contractions live in proper clusters: treat a
        # cluster of maximal depth
        target = max(contrs, key=lambda n: info.node_depth(n))
        # root of the depth region around the cluster: climb towards the
        # root while the depth stays the same, so the component prefix in
        # front of the cycle is part of the critical paths
        d_target = info.node_depth(target)
        r = target
        pm = info.parent
        while pm[id(r)] is not None and \
                info.node_depth(pm[id(r)]) == d_target:
            r = pm[id(r)]
        paths = _critical_paths(pi, info, r)
        pairs = [_tamed_pair(pth) for pth in paths]
        if paths and all(pr is not None for pr in pairs):
            v, l = pairs[0]
            pi = _close_repeat(pi, v, l, tokens)
            continue
        # unfold a root-most D of the component
        a_ids = {id(n) for n in info.component(r)}
        ds = [n for n in iter_nodes(pi)
              if n.rule == "d" and id(n) in a_ids]
        if not ds:
            raise ProofError("internal: proper cluster without discharge")
        depth_of = {}
        work = [(pi, 0)]
        while work:
            n, d = work.pop()
            depth_of[id(n)] = d
            work.extend((c, d + 1) for c in n.children)
        dnode = min(ds, key=lambda n: depth_of[id(n)])
        pi = splice(pi, dnode, unfold_d(dnode, tokens, budget))
    rep = check_proof(pi)
    if not rep.ok:
        raise ProofError("contraction elimination produced an invalid "
                         "proof: %s" % rep.render())
    return pi
