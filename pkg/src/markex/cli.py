"""Command-line interface.

Exit codes: 0 success or ``holds``, 1 ``violated``, 2 invalid input or any
other error, 3 ``inconclusive`` (budget exhausted).

All randomness descends from ``--seed`` (default 0): replicate ``k`` of a
batch uses child stream ``k`` of :func:`numpy.random.SeedSequence.spawn`.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path as FsPath

import numpy as np

from . import __version__, specfile
from .bayes import PartitionedPrior, estimate_transition_matrix, posterior_update
from .core import DEFAULT_BUDGET, History, Path, StateSpace
from .dummy import (
    completion_classes,
    count_completions,
    gibbs_successors,
    marginal_probability,
)
from .errors import InputError, MarkexError
from .exchangeability import (
    Verdict,
    brute_force_markov_exchangeable,
    check_colored_condition,
    check_condition_a,
    check_condition_b,
    check_linear_condition,
    color_partition,
    row_rule,
)
from .recurrence import TAG, recurrence_sum_traces
from .rng import parse_seed
from .schemes import (
    ColoredWalk,
    ErrwParams,
    ErrwScheme,
    HoppeParams,
    HoppeScheme,
    counterexample_scheme,
    simulate,
)

SCHEMES = ("colored", "hoppe", "errw", "counterexample")
EXIT = {Verdict.HOLDS: 0, Verdict.VIOLATED: 1, Verdict.INCONCLUSIVE: 3}


# -- helpers --------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, tuple):
        return "(" + ",".join(_fmt(v) for v in x) + ")"
    return str(x)


def _header(out, command: str, args) -> None:
    print(f"markex {__version__}", file=out)
    print(f"command: {command}", file=out)
    if getattr(args, "seed", None) is not None:
        print(f"seed: {args.seed}", file=out)


def _require_spec(args):
    if not args.spec:
        raise InputError("--spec is required for this command")
    return specfile.load(args.spec)


def build_scheme(kind: str, spec, exact: bool, states: int | None = None):
    """Return ``(scheme, space, x0)`` for a scheme kind driven by a spec file."""
    if kind == "counterexample":
        n = states if states is not None else 6
        if n < 2:
            raise InputError("--states must be at least 2")
        if spec is not None:
            labels = spec.vertices
            return counterexample_scheme(labels), StateSpace(labels), labels[0]
        return counterexample_scheme(), StateSpace(range(n)), 0
    if spec is None:
        raise InputError(f"--spec is required for scheme {kind!r}")
    space = StateSpace(spec.vertices)
    if kind == "colored":
        return ColoredWalk(spec.graph(exact)), space, spec.x0
    if kind == "hoppe":
        alpha, q = {}, {}
        for i in spec.vertices:
            row = {j: b for s, j, _, b in spec.edges if s == i}
            if not row:
                continue
            a = sum(row.values())
            alpha[i] = a if exact else float(a)
            q[i] = {j: (b / a if exact else float(b / a)) for j, b in row.items()}
        return HoppeScheme(HoppeParams(alpha, q, spec.vertices, exact)), space, spec.x0
    if kind == "errw":
        weights: dict = {}
        for i, j, _, b in spec.edges:
            key = frozenset((i, j))
            if key in weights and weights[key][1] != b:
                raise InputError(f"edges ({i!r}, {j!r}) and ({j!r}, {i!r}) carry different weights")
            weights[key] = ((i, j), b)
        params = ErrwParams({pair: (b if exact else float(b)) for pair, b in weights.values()}, exact)
        return ErrwScheme(params), space, spec.x0
    raise InputError(f"unknown scheme {kind!r}; choose from {', '.join(SCHEMES)}")


def read_path(path_file, spec) -> Path:
    """Read a ``step,state`` CSV; the path starts at the graph file's ``x0``."""
    lookup = {str(v): v for v in spec.vertices}
    try:
        text = FsPath(path_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read path {path_file}: {exc.strerror}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["step", "state"]:
        raise InputError(f"{path_file}: expected header 'step,state'")
    steps = []
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InputError(f"{path_file}:{line}: expected two fields")
        try:
            k = int(row[0])
        except ValueError:
            raise InputError(f"{path_file}:{line}: step {row[0]!r} is not an integer") from None
        if k != len(steps) + 1:
            raise InputError(f"{path_file}:{line}: expected step {len(steps) + 1}, got {k}")
        label = row[1].strip()
        if label not in lookup:
            raise InputError(f"{path_file}:{line}: unknown state {label!r}")
        steps.append(lookup[label])
    return Path(spec.x0, tuple(steps))


def write_path(path: Path, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["step", "state"])
    for k, s in enumerate(path.steps, start=1):
        w.writerow([k, s])


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8", newline=""), True
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


# -- commands -------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec = _require_spec(args) if args.scheme != "counterexample" or args.spec else None
    if spec is not None and args.scheme == "colored":
        sinks = spec.graph().sinks()
        if sinks:
            raise InputError(f"vertex {sinks[0]!r} has no outgoing edges")
    scheme, space, x0 = build_scheme(args.scheme, spec, args.exact, args.states)
    if args.steps < 0:
        raise InputError("--steps must be non-negative")
    path = simulate(scheme, x0, args.steps, args.seed)
    out, close = _open_out(args.out)
    try:
        write_path(path, out)
    finally:
        if close:
            out.close()
    report = sys.stdout if close else sys.stderr
    _header(report, "simulate", args)
    print(f"scheme: {args.scheme}", file=report)
    print(f"steps: {args.steps}", file=report)
    visits = {s: 0 for s in space}
    for s in path.states:
        visits[s] += 1
    print("visits: " + " ".join(f"{s}={c}" for s, c in visits.items()), file=report)
    est = estimate_transition_matrix(path, space)
    print("T_hat:", file=report)
    for i in space:
        row = est.row(i)
        print(f"  {i}: " + " ".join(f"{j}={_fmt(p)}" for j, p in row.items()), file=report)
    return 0


def _print_report(rep, out) -> None:
    print(f"check: {rep.check}", file=out)
    for k, v in rep.coverage.items():
        print(f"coverage.{k}: {_fmt(v) if not isinstance(v, dict) else v}", file=out)
    if rep.numeric:
        print("arithmetic: numeric (relative tolerance 1e-9)", file=out)
    else:
        print("arithmetic: exact", file=out)
    print(f"note: {rep.note}", file=out)
    print(f"witnesses: {len(rep.witnesses)}", file=out)
    for n, w in enumerate(rep.witnesses, start=1):
        print(
            f"witness {n}: kind={w.kind} left={_fmt(w.left)} p_left={_fmt(w.p_left)} "
            f"right={_fmt(w.right)} p_right={_fmt(w.p_right)}",
            file=out,
        )


def cmd_check(args) -> int:
    out = sys.stdout
    spec = specfile.load(args.spec) if args.spec else None
    _header(out, "check", args)
    print(f"mode: {args.mode}", file=out)
    print(f"max_len: {args.max_len}", file=out)
    print(f"budget: {args.budget}", file=out)
    if args.mode == "partition":
        if spec is None:
            raise InputError("--spec is required for mode 'partition'")
        g = spec.graph(args.exact)
        groups = color_partition(g)
        if groups is None:
            print("partition: none", file=out)
            print("VERDICT: violated", file=out)
            return 1
        for k, grp in enumerate(groups, start=1):
            print(f"group {k}: " + " ".join(str(c) for c in g.alpha if c in grp), file=out)
        print("VERDICT: holds", file=out)
        return 0
    if args.mode == "colored":
        if spec is None:
            raise InputError("--spec is required for mode 'colored'")
        rep = check_colored_condition(spec.graph(args.exact), spec.x0, args.max_len)
    else:
        scheme, space, x0 = build_scheme(args.scheme, spec, args.exact, args.states)
        print(f"scheme: {args.scheme}", file=out)
        if args.mode == "brute":
            rep = brute_force_markov_exchangeable(scheme, space, x0, args.max_len, args.budget)
        elif args.mode == "a":
            rep = check_condition_a(scheme, space, x0, args.max_len, args.budget)
        elif args.mode == "b":
            rep = check_condition_b(scheme, space, x0, args.max_len, budget=args.budget)
        elif args.mode == "linear":
            rep = check_linear_condition(row_rule(scheme, space), space, max_count=args.probe_max,
                                         exact=scheme.exact)
        else:
            raise InputError(f"unknown mode {args.mode!r}")
    _print_report(rep, out)
    verdict = "inconclusive" if rep.verdict is Verdict.INCONCLUSIVE else rep.verdict.value
    print(f"VERDICT: {verdict}", file=out)
    return EXIT[rep.verdict]


def cmd_posterior(args) -> int:
    spec = _require_spec(args)
    if not args.path:
        raise InputError("--path is required")
    path = read_path(args.path, spec)
    prior = PartitionedPrior(spec.graph(exact=True), spec.x0)
    post = posterior_update(prior, path)
    new_spec = spec.with_graph(post.graph, post.x0)
    if args.out:
        try:
            FsPath(args.out).write_text(new_spec.dumps(), encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    out = sys.stdout
    _header(out, "posterior", args)
    print(f"observed_steps: {len(path)}", file=out)
    print(f"start: {post.x0}", file=out)
    for c, a in post.graph.alpha.items():
        print(f"alpha[{c}]: {_fmt(a)}", file=out)
    for e in post.graph.edges:
        print(f"beta[{e.src},{e.dst}]: {_fmt(e.beta)}", file=out)
    pred = post.scheme().next_distribution(History(post.x0))
    print(f"predictive from {post.x0}:", file=out)
    for j, p in pred.items():
        print(f"  {j}: {_fmt(p)}", file=out)
    if not args.out:
        print("--- updated spec ---", file=out)
        out.write(new_spec.dumps())
    return 0


def cmd_recurrence(args) -> int:
    spec = _require_spec(args) if args.scheme != "counterexample" or args.spec else None
    scheme, space, x0 = build_scheme(args.scheme, spec, args.exact, args.states)
    if args.steps < 1:
        raise InputError("--steps must be at least 1")
    if args.replicates < 1:
        raise InputError("--replicates must be at least 1")
    traces = recurrence_sum_traces(scheme, x0, args.steps, args.replicates, args.seed)
    out, close = _open_out(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["N"] + [f"rep{k}" for k in range(1, len(traces) + 1)])
        sums = np.column_stack([t.partial_sums for t in traces])
        for n in range(args.steps):
            w.writerow([n + 1] + [repr(float(v)) for v in sums[n]])
    finally:
        if close:
            out.close()
    report = sys.stdout if close else sys.stderr
    _header(report, "recurrence", args)
    print(f"tag: {TAG}", file=report)
    for k, t in enumerate(traces, start=1):
        print(f"rep{k}: S_N={float(t.partial_sums[-1])!r} returns={len(t.returns)}", file=report)
    return 0


def cmd_dummy(args) -> int:
    spec = _require_spec(args)
    if not args.path:
        raise InputError("--path is required")
    aug = spec.augmented(args.exact)
    path = read_path(args.path, spec)
    out = sys.stdout
    _header(out, "dummy", args)
    print(f"mode: {args.mode}", file=out)
    print(f"dummies: {' '.join(map(str, aug.dummies)) or '-'}", file=out)
    print(f"partitioned: {'yes' if aug.is_partitioned() else 'no'}", file=out)
    print(f"completions: {count_completions(aug, path)}", file=out)
    if args.mode == "marginal":
        if aug.is_partitioned():
            classes = completion_classes(aug, path, args.budget)
            print(f"classes: {len(classes)}", file=out)
            p = marginal_probability(aug, path, "grouped", args.budget)
        else:
            p = marginal_probability(aug, path, "enumerate", args.budget)
        print(f"probability: {_fmt(p)}", file=out)
        return 0
    if args.mode == "gibbs":
        res = gibbs_successors(aug, path, args.sweeps, args.seed)
        print(f"sweeps: {args.sweeps}", file=out)
        print(f"burn_in: {res.burn_in}", file=out)
        for s, f in res.frequencies().items():
            print(f"frequency {_fmt(s.states)}: {f!r}", file=out)
        return 0
    raise InputError(f"unknown mode {args.mode!r}")


# -- parser ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="graph spec file (JSON)")
    common.add_argument("--seed", default="0", help="unsigned 64-bit seed (default 0)")
    common.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--states", type=_positive_int, help="state count for the counterexample scheme")
    arith = common.add_mutually_exclusive_group()
    arith.add_argument("--exact", dest="exact", action="store_true", default=True,
                       help="exact rational arithmetic (default)")
    arith.add_argument("--float", dest="exact", action="store_false", help="floating point arithmetic")

    parser = argparse.ArgumentParser(prog="markex", description="Reinforced walks and Markov exchangeability.")
    parser.add_argument("--version", action="version", version=f"markex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a path")
    p.add_argument("--scheme", choices=SCHEMES, default="colored")
    p.add_argument("--steps", type=_positive_int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", parents=[common], help="check Markov exchangeability")
    p.add_argument("--mode", choices=("brute", "a", "b", "linear", "colored", "partition"), required=True)
    p.add_argument("--scheme", choices=SCHEMES, default="colored")
    p.add_argument("--max-len", type=_positive_int, default=5)
    p.add_argument("--probe-max", type=_positive_int, default=5, help="largest count probed in linear mode")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("posterior", parents=[common], help="conjugate update from an observed path")
    p.add_argument("--path", help="observed path (CSV step,state)")
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("recurrence", parents=[common], help="partial sums of return probabilities")
    p.add_argument("--scheme", choices=SCHEMES, default="colored")
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--replicates", type=_positive_int, default=1)
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("dummy", parents=[common], help="dummy-state marginals and Gibbs sampling")
    p.add_argument("--path", help="observed path (CSV step,state)")
    p.add_argument("--mode", choices=("marginal", "gibbs"), required=True)
    p.add_argument("--sweeps", type=_positive_int, default=1000)
    p.set_defaults(func=cmd_dummy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    try:
        args.seed = parse_seed(args.seed)
        return args.func(args)
    except (MarkexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the exit-code contract is total
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
