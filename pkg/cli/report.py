# cli/report.py
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from learners.eta import EtaKind
from models.schemas import Algorithm, ReportRow

if TYPE_CHECKING:
    from cli.experiment import RunResult

log = logging.getLogger(__name__)

REPORT_COLUMNS = list(ReportRow.model_fields)
TRAJECTORY_COLUMNS = ["seed", "rho", "node", "time", "objective", "n_learners", "train_acc", "test_acc"]


def _std(values: pd.Series) -> float:
    # sample std; a single run reports 0
    return float(values.std(ddof=1)) if len(values) > 1 else 0.0


def aggregate(runs: Sequence["RunResult"], name: str, eta_kinds: Dict[Algorithm, EtaKind]) -> List[ReportRow]:
    """One row per (algorithm, rho): mean and sample std over the successful seeds."""
    frame = pd.DataFrame(
        [
            {
                "algo": r.algo,
                "rho": r.rho,
                "failed": r.failed,
                "test_acc": r.test_acc,
                "train_acc": r.train_acc,
                "L": r.n_learners,
                "time_total": r.time_total,
                "time_to_best": r.time_to_best,
                "nodes": r.nodes,
            }
            for r in runs
        ]
    )
    rows: List[ReportRow] = []
    if frame.empty:
        return rows

    for (algo, rho), group in frame.groupby(["algo", "rho"], sort=False):
        ok = group[~group["failed"]]
        n_runs = len(ok)
        rows.append(
            ReportRow(
                name=name,
                algo=algo,
                rho=rho,
                eta_kind=eta_kinds.get(algo, EtaKind.PLUS_MINUS),
                acc_mean=float(ok["test_acc"].mean()) if n_runs else float("nan"),
                acc_std=_std(ok["test_acc"]),
                train_acc_mean=float(ok["train_acc"].mean()) if n_runs else float("nan"),
                train_acc_std=_std(ok["train_acc"]),
                L_mean=float(ok["L"].mean()) if n_runs else float("nan"),
                time_total=float(ok["time_total"].mean()) if n_runs else float("nan"),
                time_to_best=float(ok["time_to_best"].mean()) if n_runs else float("nan"),
                nodes=float(ok["nodes"].mean()) if n_runs else float("nan"),
                n_runs=n_runs,
                n_failed=int(group["failed"].sum()),
                std_flagged=n_runs < 2,
            )
        )
    return rows


def rows_frame(rows: Sequence[ReportRow]) -> pd.DataFrame:
    records = []
    for r in rows:
        rec = r.model_dump()
        rec["algo"] = r.algo.value
        rec["eta_kind"] = r.eta_kind.value
        records.append(rec)
    return pd.DataFrame(records, columns=REPORT_COLUMNS)


def summarize(rows: Sequence[ReportRow]) -> pd.DataFrame:
    """
    Per algorithm and rho: number of instances where it has the best mean
    test accuracy (ties count for everyone tied), mean accuracy, mean std and
    ER = 1 / (1 - a) with a the mean accuracy as a fraction.
    """
    frame = rows_frame(rows)
    if frame.empty:
        return pd.DataFrame(columns=["algo", "rho", "# best", "acc_mean", "acc_std", "ER"])

    best = frame.groupby(["name", "rho"])["acc_mean"].transform("max")
    frame["is_best"] = np.isclose(frame["acc_mean"], best, rtol=0.0, atol=1e-9)

    out = (
        frame.groupby(["algo", "rho"], sort=False)
        .agg(**{"# best": ("is_best", "sum"), "acc_mean": ("acc_mean", "mean"), "acc_std": ("acc_std", "mean")})
        .reset_index()
    )
    with np.errstate(divide="ignore"):
        out["ER"] = 1.0 / (1.0 - out["acc_mean"] / 100.0)
    out["# best"] = out["# best"].astype(int)
    return out


def write_report(rows: Sequence[ReportRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    rows_frame(rows).to_csv(path, index=False)
    log.info(f"wrote {len(rows)} report rows to {path}")
    return path


def read_report(path: Union[str, Path]) -> List[ReportRow]:
    frame = pd.read_csv(path)
    return [ReportRow.model_validate(rec) for rec in frame.to_dict(orient="records")]


def write_trajectory(runs: Sequence["RunResult"], path: Union[str, Path]) -> Path:
    path = Path(path)
    records = [rec for r in runs for rec in r.trajectory]
    pd.DataFrame(records, columns=TRAJECTORY_COLUMNS).to_csv(path, index=False)
    log.info(f"wrote {len(records)} trajectory points to {path}")
    return path
