"""Command-line pipeline: load an FCIDUMP, shift, decompose, report.

Exit codes: 0 success, 1 file I/O failure, 2 parse or validation failure
(including the exact-diagonalization size cap), 3 solver stopped without an
optimum (iteration limit, infeasible, unbounded).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .fcidump import FcidumpError, parse_fcidump, write_fcidump
from .fermionic import (IterationLimitError, assemble_global_bliss,
                        build_fermionic_report)
from .hamiltonian import MolecularHamiltonian, apply_bliss
from .l1min import SolverOptions, dump_problem, merge_duplicate_rows
from .lp_bliss import LpBlissIterationLimit, build_lp_bliss_problem, lp_bliss
from .pauli import pauli_one_norm
from .report import (BlissSummary, CompareReport, NormPair, RunReport,
                     fermionic_section, spectral_section, to_json)
from .spectral import LanczosOptions, build_spectral_report

__all__ = [
    "METHODS",
    "BLISS_METHODS",
    "SPECTRAL_CHOICES",
    "EXIT_OK",
    "EXIT_IO",
    "EXIT_INVALID",
    "EXIT_SOLVER",
    "RunConfig",
    "run_pipeline",
    "run",
    "compare",
    "main",
]

METHODS = ("none", "lp-bliss", "flr-bliss", "ffr-bliss",
           "df", "df-lrps", "df-lrbs")
# Methods that produce a global shift operator and hence a shifted FCIDUMP.
BLISS_METHODS = ("lp-bliss", "flr-bliss", "ffr-bliss")
SPECTRAL_CHOICES = ("off", "exact", "lanczos")

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_SOLVER = 3


@dataclass(frozen=True)
class RunConfig:
    """One pipeline invocation, fully determined and reproducible."""

    input: str
    method: str = "none"
    spectral: str = "off"
    n_elec: int | None = None
    out_fcidump: str | None = None
    out_report: str | None = None
    dump_lp: str | None = None
    seed: int | None = None
    lanczos_mult: int = 5
    lanczos_tol: float = 1e-5
    df_tol: float = 1e-8
    lp_max_iters: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one "
                             f"of {METHODS}")
        if self.spectral not in SPECTRAL_CHOICES:
            raise ValueError(f"unknown spectral mode {self.spectral!r}; "
                             f"expected one of {SPECTRAL_CHOICES}")
        if self.lanczos_mult < 1:
            raise ValueError("lanczos_mult must be >= 1")
        if self.lanczos_tol <= 0.0 or self.df_tol < 0.0:
            raise ValueError("tolerances must be positive")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_pipeline(config: RunConfig) -> tuple[RunReport, MolecularHamiltonian | None]:
    """Execute one configuration; returns the report and, for shift-producing
    methods, the shifted Hamiltonian."""
    timings: dict[str, float] = {}
    t_start = time.perf_counter()
    hamiltonian = parse_fcidump(Path(config.input).read_text())
    if config.n_elec is not None:
        hamiltonian = hamiltonian.with_n_elec(config.n_elec)
    timings["parse"] = time.perf_counter() - t_start

    t_method = time.perf_counter()
    solver_options = SolverOptions(max_iters=config.lp_max_iters)
    pauli_before = pauli_one_norm(hamiltonian)
    df_before = build_fermionic_report(hamiltonian, "df", config.df_tol)

    params = None
    fermionic = None
    metadata: dict[str, str] = {}
    if config.dump_lp is not None and config.method != "lp-bliss":
        print(f"warning: --dump-lp only applies to lp-bliss, ignoring",
              file=sys.stderr)
    if config.method == "lp-bliss":
        if config.dump_lp is not None:
            problem, _ = build_lp_bliss_problem(hamiltonian)
            Path(config.dump_lp).write_text(
                dump_problem(merge_duplicate_rows(problem)))
        params, _ = lp_bliss(hamiltonian, solver_options)
    elif config.method in ("flr-bliss", "ffr-bliss"):
        params = assemble_global_bliss(hamiltonian, config.method[:3],
                                       config.df_tol, solver_options)
        metadata["mu1_convention"] = (
            "median of the eigenvalues of the unmodified one-body tensor; "
            "per-fragment corrections are not folded in first")
    elif config.method == "df":
        fermionic = df_before
    elif config.method in ("df-lrps", "df-lrbs"):
        fermionic = build_fermionic_report(hamiltonian, config.method,
                                           config.df_tol, solver_options)

    shifted = None
    pauli_after = None
    df_after = None
    if params is not None:
        shifted = apply_bliss(hamiltonian, params)
        pauli_after = pauli_one_norm(shifted).lambda_total
        df_after = build_fermionic_report(shifted, "df",
                                          config.df_tol).lambda_total
    elif config.method in ("df-lrps", "df-lrbs"):
        df_after = fermionic.lambda_total
    timings["method"] = time.perf_counter() - t_method

    t_spectral = time.perf_counter()
    spectral = None
    if config.spectral != "off":
        options = LanczosOptions(truncation_multiplier=config.lanczos_mult,
                                 residual_tol=config.lanczos_tol)
        spectral = spectral_section(build_spectral_report(
            hamiltonian, shifted, config.spectral, options=options))
        if config.spectral == "lanczos":
            metadata["lanczos_truncation"] = (
                "vectors are truncated first, then orthogonalized")
    timings["spectral"] = time.perf_counter() - t_spectral
    timings["total"] = time.perf_counter() - t_start

    report = RunReport(
        generated_at=_now(),
        input_path=config.input,
        n_orb=hamiltonian.n_orb,
        n_elec=hamiltonian.n_elec,
        ms2=hamiltonian.ms2,
        e_const=hamiltonian.e_const,
        method=config.method,
        spectral_method=config.spectral,
        seed=config.seed,
        lambda_pauli=NormPair(pauli_before.lambda_total, pauli_after),
        lambda_df=NormPair(df_before.lambda_total, df_after),
        bliss=None if params is None else BlissSummary.from_params(params),
        fermionic=None if fermionic is None else fermionic_section(fermionic),
        spectral=spectral,
        options={"df_tol": config.df_tol,
                 "lanczos_mult": config.lanczos_mult,
                 "lanczos_tol": config.lanczos_tol,
                 "lp_max_iters": config.lp_max_iters},
        metadata=metadata,
        timings_s=timings)
    return report, shifted


def _summary_line(report: RunReport) -> str:
    parts = [f"method={report.method}",
             f"lambda_pauli_before={report.lambda_pauli.before:.12g}"]
    if report.lambda_pauli.after is not None:
        parts.append(f"lambda_pauli_after={report.lambda_pauli.after:.12g}")
        parts.append(f"pauli_ratio={report.lambda_pauli.ratio:.6g}")
    if report.lambda_df.after is not None:
        parts.append(f"lambda_df_after={report.lambda_df.after:.12g}")
    if report.spectral is not None and report.spectral["deviation"] is not None:
        parts.append(f"deviation={report.spectral['deviation']:.6g}")
    return " ".join(parts)


def run(config: RunConfig) -> int:
    """Run one configuration and write its artifacts."""
    report, shifted = run_pipeline(config)
    if config.out_fcidump is not None:
        if shifted is not None:
            Path(config.out_fcidump).write_text(write_fcidump(shifted))
        else:
            print(f"warning: method {config.method} produces no shifted "
                  "Hamiltonian, skipping FCIDUMP output", file=sys.stderr)
    document = to_json(report.to_dict())
    if config.out_report is not None:
        Path(config.out_report).write_text(document)
        print(_summary_line(report))
    else:
        sys.stdout.write(document)
    return EXIT_OK


def compare(configs: Sequence[RunConfig]) -> CompareReport:
    """Run several configurations over one shared input.

    Raises:
        ValueError: fewer than two configs, or mismatched inputs.
    """
    if len(configs) < 2:
        raise ValueError("compare needs at least two configurations")
    inputs = {c.input for c in configs}
    if len(inputs) != 1:
        raise ValueError(f"compare configurations must share one input, "
                         f"got {sorted(inputs)}")
    runs = tuple(run_pipeline(c)[0] for c in configs)
    return CompareReport(generated_at=_now(), input_path=configs[0].input,
                         runs=runs)


def _add_shared_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="input FCIDUMP path")
    parser.add_argument("--spectral", choices=SPECTRAL_CHOICES, default="off",
                        help="spectral-range estimator (default: off)")
    parser.add_argument("--nelec", type=int, default=None,
                        help="override the FCIDUMP electron count")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed recorded in the report for reproducibility")
    parser.add_argument("--lanczos-mult", type=int, default=5,
                        help="Krylov truncation multiplier (default: 5)")
    parser.add_argument("--lanczos-tol", type=float, default=1e-5,
                        help="Lanczos residual threshold (default: 1e-5)")
    parser.add_argument("--df-tol", type=float, default=1e-8,
                        help="double-factorization eigenvalue cutoff "
                             "(default: 1e-8)")
    parser.add_argument("--lp-max-iters", type=int, default=None,
                        help="LP pivot budget override")
    parser.add_argument("--out-report", default=None,
                        help="write the JSON report here instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blisslp",
        description="Shift and decompose second-quantized Hamiltonians to "
                    "minimize LCU 1-norms.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser(
        "run", help="run one method pipeline on an FCIDUMP")
    _add_shared_options(run_parser)
    run_parser.add_argument("--method", choices=METHODS, default="none",
                            help="shift or decomposition method "
                                 "(default: none)")
    run_parser.add_argument("--out-fcidump", default=None,
                            help="write the shifted FCIDUMP here "
                                 "(shift-producing methods only)")
    run_parser.add_argument("--dump-lp", default=None,
                            help="write the lp-bliss problem in sparse "
                                 "triplet text form")

    compare_parser = sub.add_parser(
        "compare", help="run several methods on one FCIDUMP and tabulate")
    _add_shared_options(compare_parser)
    compare_parser.add_argument("--methods", required=True,
                                help="comma-separated method list (>= 2)")
    compare_parser.add_argument("--out-csv", default=None,
                                help="write the comparison table as CSV")
    return parser


def _config_from_args(args: argparse.Namespace, method: str,
                      out_fcidump: str | None = None,
                      dump_lp: str | None = None,
                      out_report: str | None = None) -> RunConfig:
    return RunConfig(
        input=args.input, method=method, spectral=args.spectral,
        n_elec=args.nelec, out_fcidump=out_fcidump, out_report=out_report,
        dump_lp=dump_lp, seed=args.seed, lanczos_mult=args.lanczos_mult,
        lanczos_tol=args.lanczos_tol, df_tol=args.df_tol,
        lp_max_iters=args.lp_max_iters)


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return run(_config_from_args(
                args, args.method, out_fcidump=args.out_fcidump,
                dump_lp=args.dump_lp, out_report=args.out_report))
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        configs = [_config_from_args(args, m) for m in methods]
        comparison = compare(configs)
        if args.out_csv is not None:
            Path(args.out_csv).write_text(comparison.to_csv())
        document = to_json(comparison.to_dict())
        if args.out_report is not None:
            Path(args.out_report).write_text(document)
            for report in comparison.runs:
                print(_summary_line(report))
        else:
            sys.stdout.write(document)
        return EXIT_OK
    except FcidumpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LpBlissIterationLimit, IterationLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
