# cli/persistence.py
import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from core.errors import InvalidEnsembleError, ModelFormatError
from learners.ensemble import BoostedEnsemble
from learners.stumps import DecisionStump
from models.schemas import MODEL_FORMAT_VERSION, EnsembleDocument, StumpDocument

log = logging.getLogger(__name__)


def to_document(ens: BoostedEnsemble) -> EnsembleDocument:
    if not ens.stumps:
        raise InvalidEnsembleError("refusing to save an ensemble with empty support")
    return EnsembleDocument(
        format_version=MODEL_FORMAT_VERSION,
        eta_kind=ens.eta_kind,
        margin=float(ens.margin),
        stumps=[
            StumpDocument(
                feature_index=s.feature_index,
                threshold=s.threshold,
                polarity=s.polarity,
                class_prob_pos=s.class_prob_pos,
                class_prob_neg=s.class_prob_neg,
            )
            for s in ens.stumps
        ],
        weights=[float(w) for w in ens.weights],
    )


def from_document(doc: EnsembleDocument) -> BoostedEnsemble:
    if doc.format_version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"model format {doc.format_version}, expected {MODEL_FORMAT_VERSION}")
    stumps = tuple(
        DecisionStump(s.feature_index, s.threshold, s.polarity, s.class_prob_pos, s.class_prob_neg) for s in doc.stumps
    )
    try:
        margin = float("nan") if doc.margin is None else doc.margin
        return BoostedEnsemble(stumps, np.array(doc.weights), doc.eta_kind, margin=margin)
    except InvalidEnsembleError as e:
        raise ModelFormatError(f"invalid ensemble in model file: {e}") from e


def parse_document(payload: Union[str, bytes, dict]) -> EnsembleDocument:
    try:
        if isinstance(payload, dict):
            return EnsembleDocument.model_validate(payload)
        return EnsembleDocument.model_validate_json(payload)
    except ValidationError as e:
        raise ModelFormatError(f"malformed model document: {e.error_count()} error(s), first: {e.errors()[0]['msg']}") from e


def save_model(ens: BoostedEnsemble, path: Union[str, Path]) -> Path:
    path = Path(path)
    doc = to_document(ens)
    path.write_text(doc.model_dump_json(indent=2))
    log.info(f"saved model with {len(doc.stumps)} stumps to {path}")
    return path


def load_model(path: Union[str, Path]) -> BoostedEnsemble:
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as e:
        raise ModelFormatError(f"cannot read model file {path}: {e}") from e
    try:
        json.loads(raw)
    except ValueError as e:
        raise ModelFormatError(f"model file {path} is not JSON: {e}") from e
    return from_document(parse_document(raw))
