"""dhlab command-line interface.

Usage:
    dhlab sig|counterexample|dh|walls|hl|plot [--input FILE ...] [--output PATH]
          [--resolution N] [--jobs N] [--strict-taxonomy BOOL] [--plot FILE]

Exit codes: 0 when a verdict was computed (whatever it says), 2 for invalid
input, 3 when two exact computations that must agree did not.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import mpmath as mp

from dhlab import __version__
from dhlab.config import (
    DHLAB_CONFIG,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    PLOT_DECIMAL_PRECISION,
    PLOT_SIGNIFICANT_DIGITS,
)
from dhlab.construct import CounterexampleBuilder
from dhlab.dhcore import DensityAnalyzer, DensityPiece
from dhlab.documents import (
    InputDocument,
    ReportDocument,
    decode_pieces,
    encode_interval,
    encode_piece,
    encode_polynomial,
    encode_rational,
    encode_sign_verdict,
    encode_vector,
    parse_document,
    read_counterexample,
    read_dh_profile,
    read_form_payload,
    read_hl_data,
    read_wallcross_spec,
)
from dhlab.errors import DhlabError, InputError, NonPositiveDensity, ParseError
from dhlab.exactlin import diagonalize
from dhlab.lefschetz import HLVerdict, LefschetzChecker, SixManifoldLefschetzData
from dhlab.polycert import logconcavity_defect
from dhlab.wallcross import WallCrossingEngine

logger = logging.getLogger("dhlab")

COMMANDS = ("sig", "counterexample", "dh", "walls", "hl", "plot")


def cmd_sig(document: InputDocument) -> ReportDocument:
    """Inertia (b⁺, b⁻, b₀, σ) of an intersection form."""
    form = read_form_payload(document)
    result = diagonalize(form)
    return ReportDocument(
        "sig",
        {
            "b_plus": result.b_plus,
            "b_minus": result.b_minus,
            "b_zero": result.b_zero,
            "signature": result.signature,
            "diagonal": encode_vector(result.diagonal),
        },
    )


def cmd_counterexample(document: InputDocument) -> ReportDocument:
    """Build and certify a strictly non-log-concave DH density."""
    data = read_counterexample(document)
    builder = CounterexampleBuilder()
    report = builder.build_counterexample(data)
    return ReportDocument(
        "counterexample",
        {
            "name": data.name,
            "c": encode_vector(report.c),
            "epsilon": encode_rational(report.epsilon),
            "interval": encode_interval(report.interval),
            "density": encode_polynomial(report.density),
            "defect": encode_polynomial(report.defect),
            "certificate": encode_sign_verdict(report.certificate),
            "defect_identity": builder.defect_identity_check(report, data.form, data.omega0),
            "verdict": "StrictlyNonLogConcave",
            "pieces": [encode_piece(report.interval, report.density, report.defect)],
        },
    )


def cmd_dh(document: InputDocument, jobs: int = 1) -> ReportDocument:
    """Densities of a profile and the log-concavity verdict."""
    analyzer = DensityAnalyzer(jobs=jobs)
    profile = read_dh_profile(document, analyzer)
    result = analyzer.log_concavity_verdict(profile)
    pieces = []
    for piece, defect, verdict in zip(profile.pieces, result.defects, result.per_piece):
        encoded = encode_piece(piece.interval, piece.polynomial, defect)
        encoded["certificate"] = encode_sign_verdict(verdict)
        pieces.append(encoded)
    walls = [
        {
            "wall": encode_rational(check.wall),
            "left_derivative": encode_rational(check.left_derivative),
            "right_derivative": encode_rational(check.right_derivative),
            "passed": check.passed,
        }
        for check in result.wall_checks
    ]
    return ReportDocument("dh", {"pieces": pieces, "walls": walls, "verdict": result.verdict.value})


def cmd_walls(document: InputDocument, strict_taxonomy: bool = True) -> ReportDocument:
    """Quotient invariants per chamber, b⁺ constancy and the composed verdict."""
    engine = WallCrossingEngine(strict_taxonomy=strict_taxonomy)
    spec = read_wallcross_spec(document, engine)
    verdict = engine.scenario_verdict(spec)
    profiles = [
        {
            "interval": encode_interval(p.interval),
            "signature": p.signature,
            "poincare": encode_polynomial(p.poincare),
            "b2": p.b2,
            "b_plus": encode_rational(p.b_plus),
            "poincare_duality": p.satisfies_duality(),
        }
        for p in verdict.profiles
    ]
    levels = [
        {
            "value": encode_rational(level.value),
            "signature_jump": engine.signature_jump(level),
            "poincare_jump": encode_polynomial(engine.poincare_jump(level)),
            "sigma_b2_change": change,
        }
        for level, (_, change) in zip(spec.interior_levels, verdict.bplus.level_changes)
    ]
    return ReportDocument(
        "walls",
        {
            "profiles": profiles,
            "levels": levels,
            "bplus_constant": verdict.bplus.constant,
            "extremal_b_plus": [None if v is None else encode_rational(v) for v in verdict.extremal_bplus],
            "conclusion": verdict.conclusion.value,
        },
    )


def _encode_hl(verdict: HLVerdict, epsilon: Fraction) -> Dict[str, Any]:
    return {
        "epsilon": encode_rational(epsilon),
        "map1_injective": verdict.map1_injective,
        "map2_injective": verdict.map2_injective,
        "epsilon_conditions": {
            "det_nonzero": verdict.epsilon_conditions[0],
            "neq1_holds": verdict.epsilon_conditions[1],
        },
        "overall": verdict.overall,
        "witnesses": {name: encode_vector(w) for name, w in sorted(verdict.witnesses.items())},
    }


def cmd_hl(document: InputDocument) -> ReportDocument:
    """Hard Lefschetz verdict for the six-manifold, searching ε when none is given."""
    request = read_hl_data(document)
    checker = LefschetzChecker()
    if request.counterexample:
        result = checker.lefschetz_counterexample(
            request.ring, request.omega0, request.beta2, request.beta4, request.bound
        )
        payload = _encode_hl(result.hl, result.epsilon)
        payload["counterexample"] = {
            "c": encode_vector(result.c),
            "density": encode_polynomial(result.density),
            "defect": encode_polynomial(result.defect),
            "interval": encode_interval(result.interval),
            "certificate": encode_sign_verdict(result.certificate),
        }
        payload["pieces"] = [encode_piece(result.interval, result.density, result.defect)]
        return ReportDocument("hl", payload)

    epsilon = request.epsilon
    if epsilon is None:
        epsilon = checker.find_hl_epsilon(request.ring, request.omega0, request.beta2, request.beta4, request.bound)
    data = SixManifoldLefschetzData(request.ring, request.omega0, request.beta2, request.beta4, epsilon)
    return ReportDocument("hl", _encode_hl(checker.check_hl_six(data), epsilon))


def _to_mpf(value: Fraction) -> mp.mpf:
    return mp.mpf(value.numerator) / value.denominator


def _format_decimal(value: mp.mpf) -> str:
    return mp.nstr(value, PLOT_SIGNIFICANT_DIGITS)


def plot_rows(pieces: Sequence[DensityPiece], resolution: int) -> List[str]:
    """Sample f, ln f and h = f''f - f'² at interior points of every piece."""
    if resolution < 1:
        raise InputError(f"resolution must be a positive integer, got {resolution}")
    lines = ["t\tf\tln_f\th"]
    for index, piece in enumerate(pieces):
        interval = piece.interval
        if not interval.is_bounded():
            raise InputError(f"piece {index} on {interval} is unbounded and cannot be sampled")
        lines.append(f"# piece {index}: {interval}")
        defect = logconcavity_defect(piece.polynomial)
        step = (interval.upper - interval.lower) / (resolution + 1)
        for j in range(1, resolution + 1):
            t = interval.lower + j * step
            f = piece.polynomial.evaluate(t)
            if f <= 0:
                raise NonPositiveDensity(f"density of piece {index} is {f} at t = {t}, ln f is undefined")
            with mp.workdps(PLOT_DECIMAL_PRECISION):
                f_value = _to_mpf(f)
                columns = [_to_mpf(t), f_value, mp.log(f_value), _to_mpf(defect.evaluate(t))]
                lines.append("\t".join(_format_decimal(v) for v in columns))
    return lines


def cmd_plot(report: ReportDocument, resolution: int = DHLAB_CONFIG["resolution"]) -> str:
    """Plot table (TSV, LF line endings) of the densities in a report."""
    lines = [f"# dhlab plot of a {report.command} report"] + plot_rows(decode_pieces(report.payload), resolution)
    return "\n".join(lines) + "\n"


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return value


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise argparse.ArgumentTypeError(f"{text!r} is not a boolean")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhlab",
        description="Exact certificates for log-concavity of Duistermaat-Heckman densities",
    )
    parser.add_argument("--version", action="version", version=f"dhlab {__version__}")
    parser.add_argument("command", choices=COMMANDS, help="Computation to run")
    parser.add_argument("--input", nargs="+", metavar="FILE", help="Input document(s); stdin when omitted")
    parser.add_argument("--output", metavar="PATH", help="Report file, or directory with several inputs")
    parser.add_argument("--resolution", type=positive_int, default=DHLAB_CONFIG["resolution"],
                        help="Sample points per piece for plot data")
    parser.add_argument("--jobs", type=positive_int, default=DHLAB_CONFIG["jobs"],
                        help="Worker threads for batches and per-piece certification")
    parser.add_argument("--strict-taxonomy", type=parse_bool, default=DHLAB_CONFIG["strict_taxonomy"],
                        metavar="BOOL", help="Reject critical sets outside the six-manifold taxonomy")
    parser.add_argument("--plot", metavar="FILE", help="Also write plot data (counterexample, dh, hl)")
    parser.add_argument("--log-file", metavar="FILE", help="Also write the log to FILE")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=DHLAB_CONFIG["log_format"],
        handlers=handlers,
    )


def run_command(args: argparse.Namespace, document_text: str, source: str) -> ReportDocument:
    """Dispatch one document to its command; plot takes a report instead of an input document."""
    if args.command == "plot":
        return ReportDocument.loads(document_text)
    document = parse_document(document_text, source)
    if args.command == "sig":
        return cmd_sig(document)
    if args.command == "counterexample":
        return cmd_counterexample(document)
    if args.command == "dh":
        return cmd_dh(document, jobs=args.jobs)
    if args.command == "walls":
        return cmd_walls(document, strict_taxonomy=args.strict_taxonomy)
    return cmd_hl(document)


def _output_paths(args: argparse.Namespace, source: Optional[Path], batch: bool):
    suffix = ".tsv" if args.command == "plot" else DHLAB_CONFIG["report_suffix"]
    if not batch:
        output = Path(args.output) if args.output else None
        plot = Path(args.plot) if args.plot else None
        return output, plot
    directory = Path(args.output) if args.output else source.parent
    plot = Path(args.plot) / f"{source.stem}.tsv" if args.plot else None
    return directory / f"{source.stem}{suffix}", plot


def _first_output_clash(args: argparse.Namespace, sources: Sequence[Path]) -> Optional[str]:
    """Batch outputs are named after the input stem; two inputs must not share a target."""
    owners: Dict[Path, Path] = {}
    for source in sources:
        for target in _output_paths(args, source, batch=True):
            if target is None:
                continue
            key = target.resolve()
            if key in owners:
                return f"{owners[key]} and {source} would both write {target}"
            owners[key] = source
    return None


def process(args: argparse.Namespace, source: Optional[Path], batch: bool = False) -> int:
    """Run one input and write its outputs; returns the exit code."""
    name = str(source) if source else "<stdin>"
    try:
        try:
            text = sys.stdin.read() if source is None else source.read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read {name}: {e.strerror}") from e
        except UnicodeDecodeError as e:
            raise ParseError(f"{name} is not valid UTF-8: {e.reason} at byte {e.start}") from e
        report = run_command(args, text, name)
        output, plot = _output_paths(args, source, batch)
        if args.command == "plot":
            content = cmd_plot(report, args.resolution)
        else:
            content = report.dumps()
            if plot is not None and report.payload.get("pieces"):
                plot.parent.mkdir(parents=True, exist_ok=True)
                plot.write_text(cmd_plot(report, args.resolution), encoding="utf-8", newline="\n")
                logger.info(f"Plot data written to {plot}")
        if output is None:
            sys.stdout.write(content)
        else:
            output.parent.mkdir(parents=True, exist_ok=True)
            output.write_text(content, encoding="utf-8", newline="\n")
            logger.info(f"{args.command} output for {name} written to {output}")
        return EXIT_OK
    except DhlabError as e:
        logger.error(f"{name}: {type(e).__name__}: {e}")
        return e.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.log_file)

    sources = [Path(p) for p in args.input] if args.input else [None]
    if len(sources) == 1:
        return process(args, sources[0])
    if args.output and Path(args.output).is_file():
        logger.error(f"--output {args.output} must be a directory when several inputs are given")
        return EXIT_INVALID_INPUT
    clash = _first_output_clash(args, sources)
    if clash:
        logger.error(clash)
        return EXIT_INVALID_INPUT
    logger.info(f"Processing {len(sources)} inputs with {args.jobs} worker(s)")
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        codes = list(pool.map(lambda source: process(args, source, batch=True), sources))
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
