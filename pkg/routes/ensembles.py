# routes/ensembles.py
import logging

from fastapi import APIRouter, Depends, HTTPException

from cli.persistence import from_document
from core.errors import IPBoostError
from models.schemas import EnsembleDocument, StoredModel
from routes.deps import get_reports
from store.reports import ReportStore

log = logging.getLogger(__name__)
router = APIRouter()


@router.post("/models", response_model=StoredModel)
async def upload_model(doc: EnsembleDocument, reports: ReportStore = Depends(get_reports)):
    """Validate an ensemble document and keep it for /predict by id"""
    try:
        ens = from_document(doc)
    except IPBoostError as e:
        log.error(f"Rejected model document: {e}")
        raise HTTPException(status_code=400, detail=str(e))

    try:
        model_id = await reports.save_model(doc)
    except Exception as e:
        log.error(f"Storing model failed: {e}")
        raise HTTPException(status_code=503, detail="Report store unavailable")
    return StoredModel(model_id=model_id, n_learners=ens.n_learners)


@router.get("/models/{model_id}", response_model=EnsembleDocument)
async def get_model(model_id: str, reports: ReportStore = Depends(get_reports)):
    try:
        doc = await reports.load_model(model_id)
    except Exception as e:
        log.error(f"Loading model {model_id} failed: {e}")
        raise HTTPException(status_code=503, detail="Report store unavailable")
    if doc is None:
        raise HTTPException(status_code=404, detail=f"Unknown model {model_id}")
    return doc
