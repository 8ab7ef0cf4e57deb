#!/usr/bin/env python3
"""
Randomized Low-Rank Toolkit - Command Line Interface

Generates test matrices, computes SVD / ID / CUR / QB factorizations of
binary matrix files, verifies stored factors and runs error-versus-rank
sweeps. Reports are CSV on standard output unless --csv names a file.
"""

import argparse
import contextlib
import logging
import sys
import time
from pathlib import Path
from typing import Iterator, List, Optional, TextIO

import numpy as np

from .. import __version__
from ..core.config_manager import RlraConfig, get_config_manager
from ..core.dense import RngState, frobenius_norm
from ..core.parallel import configure_kernels
from ..decompositions.dispatch import DECOMPOSITIONS, METHODS, factorize
from ..decompositions.sketch import SketchParams
from ..io.bench import BENCH_DECOMPOSITIONS, nnz_table, parse_int_list, run_bench, write_nnz_table
from ..io.binary_format import load_binary, load_spectrum, save_binary, save_spectrum, spectrum_path
from ..io.factor_store import load_factors, save_factors
from ..io.generator import SpectrumSpec, gen_test_matrix
from ..io.reports import verify, write_reports
from ..utils.error_handler import handle_user_error

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Setup logging configuration (replaces handlers from earlier calls)."""
    level = getattr(logging, log_level.upper())
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def _add_sketch_arguments(parser: argparse.ArgumentParser) -> None:
    """Rank/tolerance and sampling flags; unset values come from the config"""
    mode = parser.add_argument_group("rank or tolerance (exactly one)")
    mode.add_argument("--k", type=int, help="Target rank")
    mode.add_argument("--tol", type=float, help="Frobenius error tolerance")
    mode.add_argument(
        "--relative-tol",
        action="store_true",
        default=None,
        help="Interpret --tol relative to ||A||_F"
    )

    sketch = parser.add_argument_group("sampling")
    sketch.add_argument("--p", type=int, help="Oversampling (default from config: 5)")
    sketch.add_argument("--q", type=int, help="Power iterations (default from config: 1)")
    sketch.add_argument("--s", type=int, help="Orthonormalize every s half-steps of the rand power loop; the blocked QB methods orthonormalize every step (default from config: 1)")
    sketch.add_argument("--block", type=int, help="Block size of the blocked schemes (default from config: 10)")
    sketch.add_argument("--max-blocks", type=int, help="Block cap in tolerance mode (default from config: 10)")
    sketch.add_argument("--vnum", choices=["qr", "bbt"], help="SVD finish: QR of B^T or eig of B B^T")
    sketch.add_argument("--seed", type=int, help="Random seed (default from config: 0)")
    sketch.add_argument(
        "--method",
        choices=METHODS,
        default="rand",
        help="Algorithm family (default: rand)"
    )
    sketch.add_argument(
        "--row-blocks",
        type=int,
        default=2,
        help="Row blocks of --method hier, a power of two (default: 2)"
    )


def create_parser() -> argparse.ArgumentParser:
    """Create and configure argument parser."""
    parser = argparse.ArgumentParser(
        prog="rlra",
        description="Randomized low-rank matrix factorizations: SVD, ID, CUR and QB",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"rlra-toolkit v{__version__}"
    )

    # Configuration
    parser.add_argument("-c", "--config", type=str, help="Configuration file (name under config/ or path)")
    parser.add_argument("--threads", type=int, help="Kernel worker threads (RLRA_THREADS overrides)")

    # Logging
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default from config: INFO)"
    )
    parser.add_argument("--log-file", type=str, help="Log file path")
    parser.add_argument(
        "--progress",
        choices=["none", "simple"],
        help="Progress display for bench (default from config: simple)"
    )
    parser.add_argument(
        "--verbose-errors",
        action="store_true",
        default=None,
        help="Show technical details on errors"
    )

    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    # gen
    gen = commands.add_parser("gen", help="Write a test matrix with a known spectrum")
    gen.add_argument("--m", type=int, required=True, help="Rows")
    gen.add_argument("--n", type=int, required=True, help="Columns")
    spectrum = gen.add_mutually_exclusive_group()
    spectrum.add_argument("--type", choices=["I", "II", "III"], help="Named spectrum (default: II)")
    spectrum.add_argument("--decay", type=float, help="Spectrum 10^0 down to 10^DECAY (DECAY <= 0)")
    spectrum.add_argument("--exponents", type=str, help="Comma separated decimal exponents, one per value")
    gen.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    gen.add_argument("--out", type=str, required=True, help="Output matrix file")

    # factorizations
    for name in DECOMPOSITIONS:
        sub = commands.add_parser(name, help=f"Compute a {name.upper()} factorization")
        sub.add_argument("--in", dest="input", type=str, required=True, help="Input matrix file")
        sub.add_argument("--out-prefix", type=str, help=f"Factor bundle prefix (default: <input>_{name})")
        _add_sketch_arguments(sub)
        if name == "id":
            variant = sub.add_mutually_exclusive_group()
            variant.add_argument("--rows", action="store_true", help="Row ID (with --method det)")
            variant.add_argument("--two-sided", action="store_true", help="Two-sided ID (with --method det)")

    # verify
    check = commands.add_parser("verify", help="Measure stored factors against a matrix (one CSV row)")
    check.add_argument("--factors", type=str, required=True, help="Factor bundle prefix or manifest")
    check.add_argument("--in", dest="input", type=str, help="Matrix file (default: the bundle's source)")
    check.add_argument("--spectrum", type=str, help="Spectrum file (default: the matrix's sidecar if present)")
    check.add_argument("--density", type=float, help="Count skeleton columns/rows at this fill fraction")
    check.add_argument("--csv", type=str, help="Output CSV path (default: standard output)")
    check.add_argument("--no-header", action="store_true", help="Omit the CSV header row")

    # bench
    bench = commands.add_parser("bench", help="Error and storage versus rank")
    bench.add_argument("--ks", type=str, required=True, help="Comma separated ranks, e.g. 5,10,20,40")
    bench.add_argument("--in", dest="input", type=str, help="Matrix file (default: generate one)")
    bench.add_argument("--m", type=int, default=200, help="Rows of a generated matrix (default: 200)")
    bench.add_argument("--n", type=int, default=200, help="Columns of a generated matrix (default: 200)")
    bench.add_argument("--type", choices=["I", "II", "III"], default="III",
                       help="Spectrum of a generated matrix (default: III)")
    bench.add_argument("--gen-seed", type=int, default=0, help="Seed of a generated matrix (default: 0)")
    bench.add_argument("--decomps", type=str, default="svd",
                       help=f"Comma separated subset of {','.join(BENCH_DECOMPOSITIONS)} (default: svd)")
    bench.add_argument("--method", choices=METHODS, default="rand", help="Algorithm family (default: rand)")
    bench.add_argument("--p", type=int, help="Oversampling")
    bench.add_argument("--q", type=int, help="Power iterations")
    bench.add_argument("--s", type=int, help="Orthonormalization period")
    bench.add_argument("--block", type=int, help="Block size")
    bench.add_argument("--vnum", choices=["qr", "bbt"], help="SVD finish")
    bench.add_argument("--seed", type=int, help="Factorization seed")
    bench.add_argument("--density", type=float, help="Sparse fill fraction for the storage columns")
    bench.add_argument("--nnz-only", action="store_true",
                       help="Only evaluate the storage formulas for --m x --n (no matrix)")
    bench.add_argument("--csv", type=str, help="Output CSV path (default: standard output)")

    return parser


def validate_arguments(args: argparse.Namespace) -> List[str]:
    """Validate command line arguments; returns error messages."""
    errors = []

    if args.command in DECOMPOSITIONS:
        k, tol = args.k, args.tol
        if (k is None) == (tol is None):
            errors.append("exactly one of --k and --tol is required")
        elif k is not None and k < 1:
            errors.append(f"--k must be at least 1, got {k}")
        elif tol is not None and not tol > 0:
            errors.append(f"--tol must be positive, got {tol}")
        if args.relative_tol and tol is None:
            errors.append("--relative-tol needs --tol")
        if not Path(args.input).exists():
            errors.append(f"input matrix does not exist: {args.input}")

    elif args.command == "gen":
        if args.m < 1 or args.n < 1:
            errors.append("--m and --n must be at least 1")

    elif args.command == "verify":
        if args.density is not None and not 0 < args.density <= 1:
            errors.append("--density must be in (0, 1]")

    elif args.command == "bench":
        try:
            parse_int_list(args.ks)
        except ValueError as e:
            errors.append(f"--ks: {e}")
        unknown = [d for d in args.decomps.split(",") if d not in BENCH_DECOMPOSITIONS]
        if unknown:
            errors.append(f"--decomps: unknown {unknown}; choose from {BENCH_DECOMPOSITIONS}")
        if args.density is not None and not 0 < args.density <= 1:
            errors.append("--density must be in (0, 1]")
        if args.input and not Path(args.input).exists():
            errors.append(f"input matrix does not exist: {args.input}")

    if args.config and not Path(args.config).exists():
        manager = get_config_manager()
        if not (manager.config_dir / args.config).exists():
            errors.append(f"configuration file does not exist: {args.config}")

    return errors


def _load_configuration(args: argparse.Namespace) -> RlraConfig:
    """Merge config files, environment and the global CLI flags"""
    overrides: dict = {"kernels": {}, "ui": {}, "report": {}}
    if args.threads is not None:
        overrides["kernels"]["threads"] = args.threads
    if args.log_level:
        overrides["ui"]["log_level"] = args.log_level
    if args.progress:
        overrides["ui"]["progress_mode"] = args.progress
    if args.verbose_errors:
        overrides["ui"]["verbose_errors"] = True
    if getattr(args, "relative_tol", None):
        overrides["report"]["relative_tol"] = True

    manager = get_config_manager()
    config = manager.load_config(project_config=args.config, cli_overrides=overrides)
    issues = manager.validate_config(config)
    if issues:
        raise ValueError("invalid configuration: " + "; ".join(issues))
    return config


def _sketch_params(args: argparse.Namespace, config: RlraConfig, a: Optional[np.ndarray] = None) -> SketchParams:
    """CLI flags over the config's sketch section"""
    sketch = config.sketch

    def pick(name: str, default):
        value = getattr(args, name, None)
        return default if value is None else value

    tol = getattr(args, "tol", None) or 0.0
    if tol and config.report.relative_tol and a is not None:
        tol *= frobenius_norm(a)
        logger.info(f"Relative tolerance scaled to {tol:.6g}")
    return SketchParams(
        k=getattr(args, "k", None) or 0,
        p=pick("p", sketch.p),
        q=pick("q", sketch.q),
        s=pick("s", sketch.s),
        tol=tol,
        block=pick("block", sketch.block),
        max_blocks=pick("max_blocks", sketch.max_blocks),
        vnum=pick("vnum", sketch.vnum),
        seed=pick("seed", sketch.seed),
    )


@contextlib.contextmanager
def _output_stream(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle


def _spectrum_spec(args: argparse.Namespace) -> SpectrumSpec:
    if args.decay is not None:
        return SpectrumSpec.decay(args.decay)
    if args.exponents:
        return SpectrumSpec.explicit([float(e) for e in args.exponents.split(",") if e.strip()])
    return SpectrumSpec.named(args.type or "II")


def run_gen(args: argparse.Namespace, config: RlraConfig) -> int:
    """Write a test matrix and its spectrum sidecar."""
    spec = _spectrum_spec(args)
    a, sigma = gen_test_matrix(args.m, args.n, spec, RngState(args.seed))
    out = save_binary(args.out, a)
    sidecar = save_spectrum(spectrum_path(out), sigma)

    print(f"✅ Generated {args.m}x{args.n} matrix ({spec.kind})")
    print(f"  📁 Matrix: {out}")
    print(f"  📈 Spectrum: {sidecar} (sigma_1={sigma[0]:.3g}, sigma_r={sigma[-1]:.3g})")
    return 0


def run_factorize(args: argparse.Namespace, config: RlraConfig) -> int:
    """Factorize one matrix file and store the factor bundle."""
    a = load_binary(args.input)
    params = _sketch_params(args, config, a)

    variant = "columns"
    if getattr(args, "rows", False):
        variant = "rows"
    elif getattr(args, "two_sided", False):
        variant = "two_sided"

    start = time.perf_counter()
    factors = factorize(
        a, args.command, args.method, params, id_variant=variant, row_blocks=args.row_blocks
    )
    elapsed = time.perf_counter() - start

    input_path = Path(args.input)
    prefix = Path(args.out_prefix) if args.out_prefix else input_path.with_name(
        f"{input_path.stem}_{args.command}"
    )
    stored = dict(params.as_dict(), method=args.method, id_variant=variant, wall_time_s=elapsed)
    manifest = save_factors(
        prefix, factors, a.shape, method=f"{args.command}-{args.method}", params=stored, source=input_path
    )

    print(f"✅ {args.command.upper()} ({args.method}) of {a.shape[0]}x{a.shape[1]}: rank {factors.rank}")
    print(f"  ⏱️  Duration: {elapsed:.3f} seconds")
    print(f"  📋 Factors: {manifest}")
    if not getattr(factors, "tolerance_reached", True):
        print(f"  ⚠️  Tolerance {params.tol:.3g} not reached within the block cap")
    return 0


def run_verify(args: argparse.Namespace, config: RlraConfig) -> int:
    """Write one CSV report row for a stored factor bundle."""
    bundle = load_factors(args.factors)
    source = args.input or bundle.source
    if source is None:
        raise FileNotFoundError("no --in given and the factor bundle names no source matrix")
    a = load_binary(source)

    sigma = None
    if args.spectrum:
        sigma = load_spectrum(args.spectrum)
    elif spectrum_path(source).exists():
        sigma = load_spectrum(spectrum_path(source))
        logger.debug(f"Using spectrum sidecar {spectrum_path(source)}")

    report = verify(
        a,
        bundle.factors,
        sigma_true=sigma,
        method=bundle.method,
        params=bundle.params,
        wall_time=bundle.params.get("wall_time_s"),
        density=args.density,
        spectral_iters=config.report.spectral_iters,
        seed=config.report.report_seed,
    )
    with _output_stream(args.csv) as out:
        write_reports([report], out, config.report.float_format, header=not args.no_header)
    return 0


def run_bench_command(args: argparse.Namespace, config: RlraConfig) -> int:
    """Sweep ranks and write error-versus-rank (or storage) CSV."""
    ks = parse_int_list(args.ks)
    decomps = [d for d in args.decomps.split(",") if d]

    if args.nnz_only:
        reports = nnz_table(args.m, args.n, ks, decomps, args.density)
        with _output_stream(args.csv) as out:
            write_nnz_table(reports, out, config.report.float_format)
        return 0

    sigma = None
    if args.input:
        a = load_binary(args.input)
        if spectrum_path(args.input).exists():
            sigma = load_spectrum(spectrum_path(args.input))
    else:
        a, sigma = gen_test_matrix(args.m, args.n, SpectrumSpec.named(args.type), RngState(args.gen_seed))
        logger.info(f"Generated {args.m}x{args.n} type {args.type} matrix for the sweep")

    base = _sketch_params(argparse.Namespace(**dict(vars(args), k=max(ks), tol=None)), config)
    reports = run_bench(
        a,
        ks,
        base,
        decomps=decomps,
        method=args.method,
        sigma_true=sigma,
        density=args.density,
        progress_mode=config.ui.progress_mode,
        spectral_iters=config.report.spectral_iters,
    )
    with _output_stream(args.csv) as out:
        write_reports(reports, out, config.report.float_format)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args(argv)

    try:
        config = _load_configuration(args)
    except ValueError as e:
        print(handle_user_error(e, {"config_validation": True}), file=sys.stderr)
        return 1

    setup_logging(config.ui.log_level, args.log_file)
    configure_kernels(
        threads=config.kernels.threads,
        parallel_min_columns=config.kernels.parallel_min_columns,
        eig_max_sweeps=config.kernels.eig_max_sweeps,
        svd_max_sweeps=config.kernels.svd_max_sweeps,
        dense_oracle_limit=config.kernels.dense_oracle_limit,
    )

    errors = validate_arguments(args)
    if errors:
        print(parser.format_usage(), file=sys.stderr, end="")
        for error in errors:
            print(f"Error: {error}", file=sys.stderr)
        return 2

    logger.info(f"rlra-toolkit v{__version__} starting: {args.command}")

    try:
        if args.command == "gen":
            return run_gen(args, config)
        elif args.command in DECOMPOSITIONS:
            return run_factorize(args, config)
        elif args.command == "verify":
            return run_verify(args, config)
        elif args.command == "bench":
            return run_bench_command(args, config)
        else:
            print(f"Error: Unknown command: {args.command}", file=sys.stderr)
            return 1

    except KeyboardInterrupt:
        print("\n⚠️  Operation cancelled by user", file=sys.stderr)
        return 130
    except Exception as e:
        logger.debug("Command failed", exc_info=True)
        print(handle_user_error(e, verbose=config.ui.verbose_errors), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
