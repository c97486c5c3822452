# routes/predict.py
import logging

import numpy as np
from fastapi import APIRouter, Depends, HTTPException

from cli.persistence import from_document
from core.errors import IPBoostError
from models.schemas import EnsembleDocument, PredictRequest, PredictResponse
from routes.deps import get_reports
from store.reports import ReportStore

log = logging.getLogger(__name__)
router = APIRouter()


async def _document(body: PredictRequest, reports: ReportStore) -> EnsembleDocument:
    if body.model is not None:
        return body.model
    try:
        doc = await reports.load_model(body.model_id)
    except Exception as e:
        log.error(f"Loading model {body.model_id} failed: {e}")
        raise HTTPException(status_code=503, detail="Report store unavailable")
    if doc is None:
        raise HTTPException(status_code=404, detail=f"Unknown model {body.model_id}")
    return doc


@router.post("/predict", response_model=PredictResponse)
async def predict(body: PredictRequest, reports: ReportStore = Depends(get_reports)):
    """Vote an inline or stored ensemble document on raw feature rows"""
    doc = await _document(body, reports)
    if not body.points:
        return PredictResponse(labels=[], scores=[])

    try:
        ens = from_document(doc)
    except IPBoostError as e:
        log.error(f"Rejected model document: {e}")
        raise HTTPException(status_code=400, detail=str(e))

    try:
        X = np.asarray(body.points, dtype=float)
    except ValueError:
        X = np.empty(0)
    if X.ndim != 2:
        raise HTTPException(status_code=400, detail="points must be rows of equal length")
    needed = max(s.feature_index for s in ens.stumps) + 1
    if X.shape[1] < needed:
        raise HTTPException(status_code=400, detail=f"points have {X.shape[1]} features, model reads feature {needed - 1}")

    scores = ens.decision_function(X)
    labels = np.where(scores >= 0.0, 1, -1)
    return PredictResponse(labels=labels.tolist(), scores=scores.tolist())
