import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from .config import (
    FORMATS,
    ConfigError,
    RunConfig,
    output_dir,
    parse_int_list,
    parse_rational,
    parse_rational_list,
)
from .constructions import (
    build_irrational,
    build_minus_one,
    gamma_approximant,
    gamma_eigen_residual,
    minus_one_residual,
    spacer_towers,
)
from .cocycles import MatrixFamily
from .induction import BoundaryTie, InsufficientPrecision
from .itm import FiniteType, ParameterError, classify, make_itm
from .log import loggerInstance
from .log.logger import Logger
from .lyapunov import (
    DEFAULT_BURN_IN,
    Distribution,
    SamplingSpec,
    exponent_gap,
    inverse_consistency,
    periodic_oracle,
    second_exponent_sign,
    spectrum,
    sweep,
    top_exponent,
)
from .report import Report, csv_text
from .sadic import balanced_times, common_prefix_length, tower_lengths, tower_names, veech_components
from .suites import SuiteParams, resolve_suites, run_suites

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def validate_log_file() -> bool:
    """Validate log file path if provided.

    Returns:
        True if LOG_FILE is unset (logging disabled) or names a writable file
        False if the path cannot be created or appended to
    """
    log_file_path = os.getenv("LOG_FILE", "")

    if not log_file_path:
        return True

    try:
        log_path = Path(log_file_path)
        log_dir = log_path.parent

        # Create at most one missing directory level
        if not log_dir.exists():
            if not log_dir.parent.exists():
                return False
            log_dir.mkdir(exist_ok=True)

        if not os.access(log_dir, os.W_OK):
            return False

        with open(log_path, "a", encoding="utf-8"):
            pass
        return True
    except OSError:
        return False


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _rationals(text: str) -> tuple[Fraction, ...]:
    try:
        return parse_rational_list(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _ints(text: str) -> tuple[int, ...]:
    try:
        return parse_int_list(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="report path (default: $ITM_OUTPUT_DIR/<command>.<format> or stdout)")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument(
        "--seed", "--seeds", dest="seed", type=int, default=0, help="base seed; lyapunov spawns one stream per sample from it"
    )

    parser = argparse.ArgumentParser(prog="itm-lab", description="Interval translation mapping laboratory")
    parser.add_argument("--config", default=None, help="JSON RunConfig; explicit flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="finite type test of a BT or d-Bruin map")
    p.add_argument("--alpha", type=_rational)
    p.add_argument("--beta", type=_rational)
    p.add_argument("--lambda", dest="lengths", type=_rationals)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--depth", type=int, default=10)

    p = sub.add_parser("verify", parents=[common], help="run exact verification suites")
    p.add_argument("--suite", default="all", help="comma list of suites or 'all'")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--kmax", type=int, default=50)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--pf-limit", type=int, default=40)
    p.add_argument("--mc-steps", type=int, default=0)
    p.add_argument("--mc-samples", type=int, default=20)

    p = sub.add_parser("lyapunov", parents=[common], help="Lyapunov exponent estimates")
    p.add_argument("--family", default="A", help="A, B3, Z, ZT or AINV")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--dist", choices=[x.value for x in Distribution], default="geometric")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--kmin", type=int, default=1)
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--pattern", type=_ints, default=())
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=20, help="independent itineraries, each with its own seed stream")
    p.add_argument("--burn-in", type=int, default=DEFAULT_BURN_IN)
    p.add_argument("--mode", choices=["top", "spectrum", "gap", "second", "inverse", "sweep"], default="spectrum")
    p.add_argument("--sweep-kmax", type=_ints, default=(2, 5, 10, 20))

    p = sub.add_parser("construct", parents=[common], help="explicit eigenvalue constructions")
    p.add_argument("target", choices=["minus-one", "irrational"])
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--odd-choice", type=int, default=1)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--level", type=int, default=None, help="block index n of the residual check")
    p.add_argument("--precision", type=_rational, default=Fraction(1, 10**6))

    p = sub.add_parser("towers", parents=[common], help="Rokhlin tower names and heights")
    p.add_argument("--ks", type=_ints, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--cutoff", type=int, default=10_000)
    p.add_argument("--d", type=int, default=3)

    p = sub.add_parser("veech", parents=[common], help="Veech residuals along an itinerary")
    p.add_argument("--ks", type=_ints, required=True)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--mass-eps", type=_rational, default=None)
    p.add_argument("--share-eps", type=_rational, default=None)

    return parser


def run_classify(args: argparse.Namespace) -> Report:
    report = Report("classify")
    m = make_itm(args.alpha, args.beta, args.lengths, args.d)
    result = classify(m, args.depth)
    report.record("map", str(m))
    report.record("degenerate", m.degenerate)
    report.record("result", str(result))
    report.record("finite_type", isinstance(result, FiniteType))
    report.record("depth", result.depth if isinstance(result, FiniteType) else result.max_depth)
    report.record("attractor", [[p.left, p.right] for p in result.attractor])
    report.record("attractor_measure", result.attractor.measure)
    if not isinstance(result, FiniteType):
        report.note("no stabilization within the requested depth; infinite type is never concluded")
    return report


def run_verify(args: argparse.Namespace) -> Report:
    names = resolve_suites(args.suite)
    params = SuiteParams(
        d=args.d,
        kmax=args.kmax,
        samples=args.samples,
        pf_limit=args.pf_limit,
        seed=args.seed,
        mc_steps=args.mc_steps,
        mc_samples=args.mc_samples,
    )
    return run_suites(names, params)


def _sampling_spec(args: argparse.Namespace) -> SamplingSpec:
    dist = Distribution(args.dist)
    return SamplingSpec(dist, p=args.p, kmin=args.kmin, kmax=args.kmax, pattern=tuple(args.pattern), seed=args.seed)


def run_lyapunov(args: argparse.Namespace) -> Report:
    spec = _sampling_spec(args)
    family = MatrixFamily.parse(args.family)
    common = (args.steps, args.samples, args.burn_in)
    if args.mode == "gap":
        return exponent_gap(spec, args.d, *common)
    if args.mode == "second":
        return second_exponent_sign(spec, args.d, *common)
    if args.mode == "inverse":
        return inverse_consistency(spec, args.d, *common)
    report = Report("lyapunov")
    report.record("spec", str(spec))
    if args.mode == "sweep":
        report.record("rows", sweep(family, spec, args.d, args.sweep_kmax, *common))
        return report
    estimator = top_exponent if args.mode == "top" else spectrum
    estimate = estimator(family, spec, args.d, *common)
    report.record("estimate", estimate)
    if spec.distribution is Distribution.PERIODIC:
        report.merge(periodic_oracle(family, spec, args.d, estimate))
    row: dict[str, Any] = {"family": family.value, "d": args.d, "spec": str(spec)}
    for i, (value, ci) in enumerate(zip(estimate.exponents, estimate.ci95), start=1):
        row[f"lambda_{i}"] = value
        row[f"ci95_{i}"] = ci
    report.record("rows", [row])
    if args.mode == "spectrum":
        total = max(abs(sum(s)) for s in estimate.samples)
        report.check("exponent-sum-zero", total < 1e-8, f"max |sum| = {total:.2e}")
    return report


def run_construct(args: argparse.Namespace) -> Report:
    report = Report("construct")
    if args.target == "minus-one":
        plan = build_minus_one(args.blocks, args.odd_choice)
        report.merge(plan.certificates, "certificates")
        level = args.level if args.level is not None else plan.n_blocks
        report.merge(minus_one_residual(plan, level, args.points, args.seed), "residual")
        report.record("plan", plan.to_dict())
        return report

    irr = build_irrational(args.blocks)
    report.merge(irr.certificates, "certificates")
    report.merge(spacer_towers(irr), "spacers")
    try:
        gamma, err = gamma_approximant(irr, args.precision)
        report.record("gamma", gamma)
        report.record("gamma_error_bound", err)
    except InsufficientPrecision as e:
        report.note(str(e))
    if irr.n_blocks >= 2:
        level = args.level if args.level is not None else irr.n_blocks - 1
        report.merge(gamma_eigen_residual(irr, level, args.points, args.seed), "residual")
    else:
        report.skip("residual", "the eigenfunction residual needs at least 2 blocks")
    report.record("plan", irr.to_dict())
    return report


def run_towers(args: argparse.Namespace) -> Report:
    report = Report("towers")
    n = args.n if args.n is not None else len(args.ks)
    family = tower_names(args.ks, n, args.cutoff, args.d)
    heights = tower_lengths(args.ks, n, args.d)
    report.check("heights-match-a-product", family.heights == heights, f"{family.heights}")
    report.record("heights", heights)
    report.record("common_prefix", common_prefix_length(args.ks, n, args.d))
    names: dict[str, Optional[str]] = {}
    for letter in range(1, args.d + 1):
        word = family.word(letter)
        names[str(letter)] = "".join(map(str, word)) if word is not None else None
    report.record("names", names)
    return report


def run_veech(args: argparse.Namespace) -> Report:
    report = Report("veech")
    n = args.n if args.n is not None else len(args.ks)
    components = [veech_components(args.ks, args.t, level, args.d) for level in range(n + 1)]
    report.record("t", args.t)
    report.record("components", components)
    report.record("residual", [max(c) for c in components])
    if args.mass_eps is not None and args.share_eps is not None:
        report.record("balanced_times", balanced_times(args.ks, n, args.mass_eps, args.share_eps, args.d))
    return report


COMMANDS: dict[str, Callable[[argparse.Namespace], Report]] = {
    "classify": run_classify,
    "verify": run_verify,
    "lyapunov": run_lyapunov,
    "construct": run_construct,
    "towers": run_towers,
    "veech": run_veech,
}


def resolve_argv(argv: Sequence[str]) -> list[str]:
    """Expand --config into command-line arguments; flags given explicitly come last and win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, rest = pre.parse_known_args(list(argv))
    if known.config is None:
        return rest
    cfg = RunConfig.load(known.config)
    if rest and rest[0] == cfg.command:
        rest = rest[1:]
    return cfg.to_argv() + rest


def emit(report: Report, args: argparse.Namespace) -> None:
    if args.format == "csv":
        rows = report.values.get("rows")
        if rows is None:
            raise ConfigError(f"CSV output is only available for Lyapunov tables, not {args.command}")
        text = csv_text(rows)
    else:
        text = report.to_json() + "\n"

    target: Optional[Path] = Path(args.out) if args.out else None
    if target is None:
        directory = output_dir()
        if directory is not None:
            target = directory / f"{args.command}.{args.format}"
    if target is None:
        sys.stdout.write(text)
        return
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    loggerInstance.logger.log_info(f"Report for {args.command} written to {target}")


def main(argv: Optional[Sequence[str]] = None) -> int:

    # Validate log file path if provided
    if not validate_log_file():
        print(f"Error: cannot write to LOG_FILE={os.getenv('LOG_FILE')}", file=sys.stderr)
        return EXIT_FAILED

    loggerInstance.logger = Logger()

    raw = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(resolve_argv(raw))
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    loggerInstance.logger.log_info(f"Starting {args.command}")
    try:
        report = COMMANDS[args.command](args)
        report.record("parameters", {k: v for k, v in vars(args).items() if k not in ("config", "out")})
        emit(report, args)
    except (ConfigError, ParameterError, BoundaryTie, InsufficientPrecision, ValueError) as e:
        loggerInstance.logger.log_info(f"Error computing {args.command}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    loggerInstance.logger.log_info(f"Finished {args.command}: {report}")
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
