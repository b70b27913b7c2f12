"""Command line front end.

Subcommands
-----------
per        exact permanent of one matrix file
spectrum   distribution of per(A_n) under iid entries, exact or Monte Carlo
range      every permanent value attained over a fixed entry support
verify     inequality and recursion check suites, one JSON report per line
constants  derive and certify a feasible constant chain for a given p

Output is deterministic for a fixed seed; worker counts change timing
only, never bytes.  Exit status: 0 all requested checks hold, 1 a check
failed, 2 unparseable input, 3 accumulator overflow, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .constants import chain_to_json, check_inductive_step, derive_constants
from .dists import ATOM_CAP, FiniteDist, parse_dist
from .errors import EXIT_CHECK_FAILED, EXIT_OK, ParseError, PermlabError
from .inequalities import (
    BatteryReport,
    assumption_battery,
    duplication_battery,
    halasz_battery,
    heavy_pairs_battery,
    kesten_battery,
    kesten_rademacher_battery,
    monotonicity_battery,
    report_to_json,
)
from .matrices import ColumnSet, IntMatrix, parse_matrix, per_naive, per_ryser
from .parallel import worker_count
from .ranges import RangeStore, phi, range_to_json
from .rng import substream
from .spectrum import exact_spectrum, mc_spectrum, spectrum_to_csv, spectrum_to_json
from .structured import check_easy_bound, check_markov_bound, iid_spec, thin_matrix

SUITES = (
    "monotonicity",
    "duplication",
    "kesten",
    "halasz",
    "assumption",
    "heavy-pairs",
    "easy-bound",
    "markov-bound",
    "thinning",
    "inductive-step",
)


@dataclass(frozen=True)
class RunConfig:
    """Options shared by every subcommand."""

    subcommand: str
    seed: int = 0
    workers: int = 1
    output: Optional[str] = None
    format: str = "json"
    atom_cap: int = ATOM_CAP
    enum_cap: Optional[int] = None


def _frac_arg(text: str) -> Fraction:
    try:
        return Fraction(text.replace("\u2212", "-"))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc


def _parse_int_list(text: str) -> list:
    out = []
    for tok in text.replace("\u2212", "-").split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(int(tok))
        except ValueError as exc:
            raise ParseError(f"bad integer {tok!r} in {text!r}") from exc
    if not out:
        raise ParseError(f"empty integer list {text!r}")
    return out


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _entry_dist(args) -> FiniteDist:
    if args.dist is not None:
        return parse_dist(_read_text(args.dist))
    values = _parse_int_list(args.support)
    if len(set(values)) != len(values):
        raise ParseError(f"duplicate support values in {args.support!r}")
    return FiniteDist.uniform(values)


def _auto_reduction(entry: FiniteDist) -> str:
    if entry == FiniteDist.rademacher():
        return "full"
    probs = {p for _, p in entry.atoms}
    if len(probs) == 1:
        return "row-multiset"
    return "none"


def cmd_per(cfg: RunConfig, args) -> tuple:
    mat = parse_matrix(_read_text(args.matrix))
    if mat.rows != mat.cols:
        raise ParseError(f"permanent needs a square matrix, got {mat.rows} x {mat.cols}")
    if args.kernel == "naive":
        return f"{per_naive(mat)}\n", True
    if args.kernel == "ryser":
        return f"{per_ryser(mat)}\n", True
    a, b = per_naive(mat), per_ryser(mat)
    agree = a == b
    return f"{a}\nagreement={'true' if agree else 'false'}\n", agree


def cmd_spectrum(cfg: RunConfig, args) -> tuple:
    entry = _entry_dist(args)
    if args.mode == "exact":
        reduction = args.reduction
        if reduction == "auto":
            reduction = _auto_reduction(entry)
        spec = exact_spectrum(
            args.n, entry, reduction=reduction, workers=cfg.workers, cap=cfg.enum_cap
        )
    else:
        spec = mc_spectrum(
            args.n,
            entry,
            targets=tuple(_parse_int_list(args.targets)),
            samples=args.samples,
            seed=cfg.seed,
            workers=cfg.workers,
        )
    if cfg.format == "csv":
        return spectrum_to_csv(spec), True
    return json.dumps(spectrum_to_json(spec), indent=2) + "\n", True


def cmd_range(cfg: RunConfig, args) -> tuple:
    support = _parse_int_list(args.support)
    if args.store is not None:
        rng = RangeStore(args.store).get_or_compute(support, args.n, workers=cfg.workers)
    else:
        rng = phi(
            support, args.n, reduction=args.reduction, workers=cfg.workers, cap=cfg.enum_cap
        )
    if cfg.format == "csv":
        return "value\n" + "".join(f"{v}\n" for v in rng.values), True
    return json.dumps(range_to_json(rng), indent=2) + "\n", True


def _battery_note(b: BatteryReport) -> str:
    note = (
        f"{b.name}: {b.checked} checked, {b.rejected} precondition-failed,"
        f" {b.failures} failed"
    )
    best = b.sup_constant()
    if best is not None and best.constant is not None:
        note += f", sup constant ~= {float(best.constant):.6f} ({best.witness})"
    return note


def _tag_support(reports, values) -> list:
    tag = ",".join(str(v) for v in values)
    return [
        dataclasses.replace(r, witness=f"support={tag} {r.witness}") for r in reports
    ]


def _binary_sweep_specs(max_n: int):
    for values in ((0, 1), (-1, 1)):
        entry = FiniteDist.uniform(values)
        for t in (0, 1):
            for n in range(1, max_n + 1):
                fixed = None
                if t == 1:
                    fixed = IntMatrix.from_rows([[0] * n + [1]])
                yield values, iid_spec(n, entry, fixed=fixed)


def _easy_bound_suite(max_n: int) -> tuple:
    reports = []
    for values, spec in _binary_sweep_specs(max_n):
        for s in range(1, spec.n + 1):
            for z in range(-2, 3):
                reports.extend(_tag_support([check_easy_bound(spec, s, z=z)], values))
    note = f"easy-bound: {len(reports)} exact sweeps, n <= {max_n}, T <= 1, |z| <= 2"
    return reports, [note]


def _markov_bound_suite(max_n: int) -> tuple:
    alphas = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
    reports = []
    for values, spec in _binary_sweep_specs(max_n):
        for s in range(1, spec.n + 1):
            for alpha in alphas:
                reports.extend(
                    _tag_support([check_markov_bound(spec, s, alpha)], values)
                )
    note = f"markov-bound: {len(reports)} exact sweeps, n <= {max_n}, T <= 1"
    return reports, [note]


def _thinning_suite(count: int, seed: int) -> tuple:
    """Random thinned pairs: per(A*) must equal per(A') every time."""
    from .inequalities import InequalityReport

    bad = 0
    for i in range(count):
        gen = substream(seed, i)
        t = int(gen.integers(0, 2))
        n = int(gen.integers(2, 6))
        side = n + t
        mat = IntMatrix.from_array(gen.integers(-2, 3, size=(side, side)))
        s = int(gen.integers(1, n + 1))
        perm = [int(v) + 1 for v in gen.permutation(n)]
        jstar = ColumnSet(side, tuple(sorted(perm[: s - 1])))
        rest = sorted(perm[s - 1 :])
        ksz = int(gen.integers(0, len(rest) + 1))
        k_set = ColumnSet(side, tuple(sorted(gen.permutation(rest)[:ksz].tolist())))
        xi_prime = [int(v) for v in gen.integers(-2, 3, size=side)]
        astar, aprime = thin_matrix(mat, jstar, k_set, xi_prime, t=t)
        moved = aprime.row(t + 1)
        if per_ryser(astar) != per_ryser(aprime) or any(moved[len(moved) - t :]):
            bad += 1
    report = InequalityReport(
        "thinning-random",
        lhs=Fraction(bad),
        rhs=Fraction(0),
        holds=bad == 0,
        witness=(
            f"count={count} seed={seed} n in 2..5, T in 0..1;"
            f" per(A*) == per(A') with T trailing zeros in the moved row"
        ),
    )
    return [report], [f"thinning: {count} random instances, {bad} failed"]


def _inductive_step_suite() -> tuple:
    chain = derive_constants(Fraction(1, 2), Fraction(1, 10), 100)
    reports = [check_inductive_step(chain, n) for n in (100, 200, 1000)]
    note = (
        f"inductive-step: chain p=1/2 delta=1/10 N=100"
        f" feasible={chain.feasible}, checked n in (100, 200, 1000)"
    )
    return reports, [note]


def _run_suite(name: str, cfg: RunConfig, args) -> tuple:
    count, seed, workers = args.count, cfg.seed, cfg.workers
    if name == "monotonicity":
        b = monotonicity_battery(count, seed=seed, workers=workers)
        return list(b.reports), [_battery_note(b)]
    if name == "duplication":
        b = duplication_battery(count, seed=seed, workers=workers)
        return list(b.reports), [_battery_note(b)]
    if name == "kesten":
        b1 = kesten_rademacher_battery()
        b2 = kesten_battery(count, seed=seed, workers=workers)
        return list(b1.reports) + list(b2.reports), [_battery_note(b1), _battery_note(b2)]
    if name == "halasz":
        b = halasz_battery(count, seed=seed, workers=workers)
        return list(b.reports), [_battery_note(b)]
    if name == "assumption":
        b = assumption_battery(count, seed=seed, workers=workers)
        return list(b.reports), [_battery_note(b)]
    if name == "heavy-pairs":
        b = heavy_pairs_battery(count, seed=seed, workers=workers)
        return list(b.reports), [_battery_note(b)]
    if name == "easy-bound":
        return _easy_bound_suite(args.max_n)
    if name == "markov-bound":
        return _markov_bound_suite(args.max_n)
    if name == "thinning":
        return _thinning_suite(count, seed)
    if name == "inductive-step":
        return _inductive_step_suite()
    raise ParseError(f"unknown suite {name!r}")


def cmd_verify(cfg: RunConfig, args) -> tuple:
    suites = SUITES if args.suite == "all" else (args.suite,)
    reports, notes = [], []
    for name in suites:
        rs, ns = _run_suite(name, cfg, args)
        reports.extend(rs)
        notes.extend(ns)
    for note in notes:
        print(note, file=sys.stderr)
    text = "".join(json.dumps(report_to_json(r)) + "\n" for r in reports)
    ok = not any(r.holds is False for r in reports)
    return text, ok


def cmd_constants(cfg: RunConfig, args) -> tuple:
    chain = derive_constants(args.p, args.delta, args.n_hyp)
    lines = [json.dumps(chain_to_json(chain), indent=2)]
    ok = chain.feasible
    if args.step is not None:
        report = check_inductive_step(chain, args.step)
        lines.append(json.dumps(report_to_json(report)))
        ok = ok and report.holds is not False
    return "\n".join(lines) + "\n", ok


_DISPATCH = {
    "per": cmd_per,
    "spectrum": cmd_spectrum,
    "range": cmd_range,
    "verify": cmd_verify,
    "constants": cmd_constants,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit stream seed")
    common.add_argument(
        "--workers", type=int, default=None,
        help="worker threads (PERMLAB_WORKERS overrides)",
    )
    common.add_argument("--output", default=None, help="write to a file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="permlab",
        description="Exact and Monte Carlo laboratory for permanents of random matrices.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("per", parents=[common], help="permanent of one matrix file")
    p.add_argument("matrix", help="matrix file path, or - for stdin")
    p.add_argument("--kernel", choices=("naive", "ryser", "both"), default="ryser")

    p = sub.add_parser("spectrum", parents=[common], help="distribution of per(A_n)")
    p.add_argument("--n", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--support", help="comma list of equally likely integer entries")
    src.add_argument("--dist", help="entry distribution file ('value prob' lines)")
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument(
        "--reduction", choices=("auto", "none", "row-multiset", "full"), default="auto"
    )
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--targets", default="0", help="comma list of values to estimate")
    p.add_argument("--enum-cap", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("range", parents=[common], help="attained permanent values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--support", required=True, help="comma list of allowed entries")
    p.add_argument(
        "--reduction", choices=("auto", "core", "row-multiset", "none"), default="auto"
    )
    p.add_argument("--store", default=None, help="cache directory for computed ranges")
    p.add_argument("--enum-cap", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify", parents=[common], help="run a check suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--count", type=int, default=400, help="battery instance count")
    p.add_argument("--max-n", type=int, default=3, help="sweep size for exact suites")

    p = sub.add_parser("constants", parents=[common], help="derive a constant chain")
    p.add_argument("--p", type=_frac_arg, default=Fraction(1, 2))
    p.add_argument("--delta", type=_frac_arg, default=Fraction(1, 10))
    p.add_argument("--n-hyp", type=int, default=100, help="hypothesized base size N")
    p.add_argument("--step", type=int, default=None, help="also replay the step at this n")
    return parser


def _config_from_args(args) -> RunConfig:
    seed = getattr(args, "seed", 0)
    if not 0 <= seed < 1 << 64:
        raise ParseError(f"seed must fit in 64 bits, got {seed}")
    return RunConfig(
        subcommand=args.subcommand,
        seed=seed,
        workers=worker_count(getattr(args, "workers", None)),
        output=getattr(args, "output", None),
        format=getattr(args, "format", "json"),
        enum_cap=getattr(args, "enum_cap", None),
    )


def _write_output(cfg: RunConfig, text: str) -> None:
    if cfg.output is None:
        sys.stdout.write(text)
        return
    with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _join_list_values(argv) -> list:
    """Glue ``--support -1,1`` into ``--support=-1,1``.

    argparse would otherwise read the comma list as an unknown option
    because of the leading minus.
    """
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--support", "--targets"):
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_join_list_values(argv))
    try:
        cfg = _config_from_args(args)
        text, ok = _DISPATCH[cfg.subcommand](cfg, args)
    except PermlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    _write_output(cfg, text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
