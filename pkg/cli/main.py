# cli/main.py
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from cli.experiment import run_experiment
from cli.report import rows_frame, summarize
from core.config import settings
from core.errors import IPBoostError
from learners.eta import EtaKind
from models.schemas import AdaBoostVariant, Algorithm, ExperimentConfig, HardSource

log = logging.getLogger("ipboost.cli")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="python -m cli",
        description="Train and compare IPBoost, LPBoost and AdaBoost over several seeds.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", metavar="PATH", help="LIBSVM training file")
    src.add_argument("--hard", nargs=2, metavar=("N", "GAMMA"), help="generated hard instance with N points and noise GAMMA")
    p.add_argument("--test", metavar="PATH", help="companion LIBSVM test file (no split is made)")
    p.add_argument("--dimension", type=int, default=21, help="hard-instance dimension (odd, default 21)")
    p.add_argument("--name", help="dataset name in the report")

    p.add_argument("--algo", action="append", choices=[a.value for a in Algorithm], help="repeat for several algorithms")
    p.add_argument("--rho", action="append", type=float, help="margin; repeat for a sweep")
    p.add_argument("--eta", choices=[k.value for k in EtaKind], default=EtaKind.PLUS_MINUS.value)
    p.add_argument("--seeds", type=int, default=settings.seeds, metavar="K", help="run seeds 0 .. K-1")
    p.add_argument("--stall", type=int, default=settings.stall_limit, metavar="K")
    p.add_argument("--time-limit", type=float, default=settings.time_limit, metavar="S")
    p.add_argument("--subsample", type=int, default=settings.subsample_cap, metavar="N")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--max-columns", type=int, default=settings.max_columns)
    p.add_argument("--ada-iterations", type=int, default=100)
    p.add_argument("--ada-variant", choices=[v.value for v in AdaBoostVariant], default=AdaBoostVariant.DISCRETE.value)
    p.add_argument("--sparsify", type=float, metavar="ALPHA", help="phase-2 sparsification with uniform cost ALPHA")
    p.add_argument("--workers", type=int, default=settings.workers)

    p.add_argument("--out", metavar="CSV", help="report CSV")
    p.add_argument("--trajectory-out", metavar="CSV", help="incumbent trajectory CSV (IPBoost)")
    p.add_argument("--model-out", metavar="PATH", help="model JSON of the first successful run")
    p.add_argument("--summary", action="store_true", help="print the per-algorithm comparison table")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    hard = None
    if args.hard is not None:
        hard = HardSource(n_points=int(args.hard[0]), noise_rate=float(args.hard[1]), dimension=args.dimension)
    return ExperimentConfig(
        name=args.name,
        data_path=args.data,
        test_path=args.test,
        hard=hard,
        algorithms=args.algo or [Algorithm.IPBOOST.value],
        rhos=args.rho or [settings.default_rho],
        eta_kind=args.eta,
        seeds=list(range(args.seeds)),
        stall_limit=args.stall,
        time_limit=args.time_limit,
        subsample_cap=args.subsample,
        test_fraction=args.test_fraction,
        max_columns=args.max_columns,
        ada_iterations=args.ada_iterations,
        ada_variant=args.ada_variant,
        sparsify_alpha=args.sparsify,
        workers=args.workers,
        output_path=args.out,
        trajectory_path=args.trajectory_out,
        model_path=args.model_out,
    )


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=settings.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)

    try:
        cfg = config_from_args(args)
    except (ValidationError, ValueError) as e:
        log.error(f"Invalid configuration: {e}")
        return 2

    try:
        report = run_experiment(cfg)
    except IPBoostError as e:
        log.error(f"Experiment failed: {e}")
        return 1

    frame = rows_frame(report.rows)
    print(frame.to_string(index=False))
    if args.summary:
        print()
        print(summarize(report.rows).to_string(index=False))
    if report.failures:
        log.warning(f"{len(report.failures)} run(s) failed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
