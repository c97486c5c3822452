# routes/experiments.py
import logging
import uuid
from pathlib import Path
from typing import Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from starlette.concurrency import run_in_threadpool

from cli.experiment import run_experiment
from core.config import settings
from core.errors import DatasetError, IPBoostError
from models.schemas import ExperimentConfig, ExperimentResponse
from routes.deps import get_reports
from store.reports import ReportStore

log = logging.getLogger(__name__)
router = APIRouter()


def _confine(path: Optional[str]) -> Optional[str]:
    """Resolve a client path against the data directory; nothing outside it is readable."""
    if path is None:
        return None
    root = Path(settings.data_dir).resolve()
    target = (root / path).resolve()
    if not target.is_relative_to(root):
        log.error(f"Rejected data path outside {root}: {path}")
        raise HTTPException(status_code=400, detail="data paths must lie inside the data directory")
    return str(target)


@router.post("/experiments", response_model=ExperimentResponse)
async def create_experiment(cfg: ExperimentConfig, reports: ReportStore = Depends(get_reports)):
    """Run an experiment synchronously in a worker thread and store its report"""
    # file outputs belong to the CLI
    cfg = cfg.model_copy(
        update={
            "data_path": _confine(cfg.data_path),
            "test_path": _confine(cfg.test_path),
            "output_path": None,
            "trajectory_path": None,
            "model_path": None,
        }
    )

    try:
        report = await run_in_threadpool(run_experiment, cfg)
    except DatasetError as e:
        log.error(f"Experiment input rejected: {e}")
        raise HTTPException(status_code=400, detail="experiment data could not be read")
    except IPBoostError as e:
        log.error(f"Experiment failed: {e}")
        raise HTTPException(status_code=500, detail="experiment failed")

    response = ExperimentResponse(run_id=uuid.uuid4().hex, rows=report.rows, failures=report.failures)
    try:
        await reports.save_report(response)
    except Exception as e:
        log.error(f"Storing report {response.run_id} failed: {e}")
    return response


@router.get("/experiments")
async def list_experiments(limit: int = Query(20, ge=1, le=100), reports: ReportStore = Depends(get_reports)):
    try:
        runs = await reports.recent_runs(limit)
    except Exception as e:
        log.error(f"Listing reports failed: {e}")
        raise HTTPException(status_code=503, detail="Report store unavailable")
    return {"runs": runs, "count": len(runs)}


@router.get("/experiments/{run_id}", response_model=ExperimentResponse)
async def get_experiment(run_id: str, reports: ReportStore = Depends(get_reports)):
    try:
        report = await reports.load_report(run_id)
    except Exception as e:
        log.error(f"Loading report {run_id} failed: {e}")
        raise HTTPException(status_code=503, detail="Report store unavailable")
    if report is None:
        raise HTTPException(status_code=404, detail=f"Unknown run {run_id}")
    return report
