"""Command line front-end.

Subcommands: check, eliminate, normalize, prove, wqo-len, stats.
Exit codes: 0 success, 1 usage error, 2 invalid proof, 3 step/budget cap
exceeded, 4 I/O error.  The FOCUSCE_MAX_STEPS environment variable
overrides the default step cap.
"""

import argparse
import os
import sys
from collections import Counter

from .formula import FormulaError, parse_formula, print_formula
from .minfocus import minimally_focus
from .msetorder import BudgetExceeded, max_controlled_bad_length
from .prooftree import (
    AnnForm,
    Budget,
    ProofError,
    StepCapExceeded,
    analyze_clusters,
    check_proof,
    classify_cuts,
    iter_nodes,
    parse_proof,
    print_proof,
    proof_closure,
)
from .search import NoProofWithinBudget, SearchBudget, prove
from .cutelim import cut_order, eliminate_cuts
from .cutelim.contraction import eliminate_contractions

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_IO = 4


def _read_proof(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _CliError(EXIT_IO, "cannot read %s: %s" % (path, e))
    try:
        return parse_proof(text)
    except ProofError as e:
        raise _CliError(EXIT_INVALID, "parse error in %s: %s" % (path, e))


def _write_proof(path, p):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(print_proof(p))
    except OSError as e:
        raise _CliError(EXIT_IO, "cannot write %s: %s" % (path, e))


def _checked(p, what="proof"):
    rep = check_proof(p)
    if not rep.ok:
        raise _CliError(EXIT_INVALID, "invalid %s:\n%s" % (what, rep.render()))
    return rep


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _max_steps(args):
    n = getattr(args, "max_steps", None)
    if n is None:
        env = os.environ.get("FOCUSCE_MAX_STEPS")
        n = int(env) if env else None
    if n is not None and n <= 0:
        raise _CliError(EXIT_USAGE, "--max-steps must be positive")
    return n


def _budget(args):
    n = _max_steps(args)
    return Budget(n) if n is not None else Budget()


def cmd_check(args):
    p = _read_proof(args.file)
    rep = check_proof(p)
    if not rep.ok:
        print(rep.render())
        return EXIT_INVALID
    info = analyze_clusters(p)
    cuts = classify_cuts(p, info)
    if not cuts:
        print("valid; 0 cuts")
    else:
        labels = []
        for ci in cuts:
            kind = "important" if ci.important else "unimportant"
            if ci.essential:
                kind += ", essential"
            labels.append(kind)
        print("valid; %d cut%s: %s"
              % (len(cuts), "" if len(cuts) == 1 else "s",
                 "; ".join(labels)))
    return EXIT_OK


def cmd_eliminate(args):
    p = _read_proof(args.file)
    _checked(p, "input proof")
    budget = _budget(args)
    trace = None
    if args.trace:
        def trace(e):
            print("iteration %(iteration)d: %(kind)s, cut-order %(order)s"
                  % e)
    try:
        out = minimally_focus(p)
        out = eliminate_cuts(out, budget=budget, trace=trace)
        if args.decontract:
            out = eliminate_contractions(out, budget=budget)
    except StepCapExceeded as e:
        raise _CliError(EXIT_CAP, "step cap exceeded: %s" % e)
    _checked(out, "output proof")
    _write_proof(args.output, out)
    return EXIT_OK


def cmd_normalize(args):
    p = _read_proof(args.file)
    _checked(p, "input proof")
    out = minimally_focus(p)
    _checked(out, "output proof")
    _write_proof(args.output, out)
    return EXIT_OK


def _parse_sequent(text):
    afs = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise _CliError(EXIT_USAGE, "empty sequent member")
        focused = False
        if part.endswith("^u"):
            part = part[:-2]
        elif part.endswith("^f"):
            part, focused = part[:-2], True
        try:
            afs.append(AnnForm(parse_formula(part), focused))
        except FormulaError as e:
            raise _CliError(EXIT_USAGE, "bad formula %r: %s" % (part, e))
    return tuple(afs)


def cmd_prove(args):
    seq = _parse_sequent(args.sequent)
    budget = SearchBudget(max_nodes=args.max_nodes) if args.max_nodes \
        else None
    try:
        p = prove(seq, budget)
    except NoProofWithinBudget:
        raise _CliError(EXIT_CAP, "no proof found within budget")
    _checked(p, "search output")
    _write_proof(args.output, p)
    return EXIT_OK


def cmd_wqo_len(args):
    if args.function != "succ":
        raise _CliError(EXIT_USAGE, "only -f succ is supported")
    try:
        print(max_controlled_bad_length(args.k, lambda n: n + 1, args.t))
    except BudgetExceeded as e:
        raise _CliError(EXIT_CAP, str(e))
    return EXIT_OK


def cmd_stats(args):
    p = _read_proof(args.file)
    _checked(p)
    info = analyze_clusters(p)
    n_proper = sum(1 for cid, ok in info.proper.items() if ok)
    n_clusters = len(info.proper)
    size = sum(1 for _ in iter_nodes(p))
    depth = info.node_depth(p)
    rules = Counter(n.rule for n in iter_nodes(p))
    order = sorted(cut_order(p, info=info))
    print("size: %d nodes" % size)
    print("depth %d, clusters: %d proper (of %d)"
          % (depth, n_proper, n_clusters))
    print("cuts: %d" % rules.get("cut", 0))
    print("cut-order: {%s}" % ", ".join(map(str, order)))
    return EXIT_OK


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="focusce",
        description="Check and transform cyclic Focus proofs for the "
                    "alternation-free modal mu-calculus.")
    sub = ap.add_subparsers(dest="command")

    c = sub.add_parser("check", help="validate a proof file")
    c.add_argument("file")
    c.set_defaults(fn=cmd_check)

    e = sub.add_parser("eliminate", help="remove all cuts")
    e.add_argument("file")
    e.add_argument("-o", "--output", required=True)
    e.add_argument("--decontract", action="store_true",
                   help="also remove contractions afterwards")
    e.add_argument("--max-steps", type=int, default=None)
    e.add_argument("--trace", action="store_true")
    e.set_defaults(fn=cmd_eliminate)

    n = sub.add_parser("normalize", help="rewrite to minimally focused form")
    n.add_argument("file")
    n.add_argument("-o", "--output", required=True)
    n.set_defaults(fn=cmd_normalize)

    pr = sub.add_parser("prove", help="bounded cut-free proof search")
    pr.add_argument("sequent")
    pr.add_argument("--max-nodes", type=int, default=None)
    pr.add_argument("-o", "--output", required=True)
    pr.set_defaults(fn=cmd_prove)

    w = sub.add_parser("wqo-len",
                       help="maximal controlled bad sequence length")
    w.add_argument("-k", type=int, required=True)
    w.add_argument("-t", type=int, required=True)
    w.add_argument("-f", "--function", required=True)
    w.set_defaults(fn=cmd_wqo_len)

    s = sub.add_parser("stats", help="proof statistics")
    s.add_argument("file")
    s.set_defaults(fn=cmd_stats)
    return ap


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    if not getattr(args, "command", None):
        ap.print_usage()
        return EXIT_USAGE
    try:
        return args.fn(args)
    except _CliError as e:
        print("error: %s" % e, file=sys.stderr)
        return e.code
    except (StepCapExceeded, BudgetExceeded) as e:
        print("error: step cap exceeded: %s" % e, file=sys.stderr)
        return EXIT_CAP
    except (ProofError, FormulaError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
