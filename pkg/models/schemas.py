# models/schemas.py
import math
from enum import Enum
from typing import List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

from core.config import settings
from learners.eta import EtaKind

MODEL_FORMAT_VERSION = 1


class Algorithm(str, Enum):
    IPBOOST = "ipboost"
    LPBOOST = "lpboost"
    ADABOOST = "adaboost"


class AdaBoostVariant(str, Enum):
    DISCRETE = "discrete"
    SAMME_R = "sammer"


class SplitSpec(BaseModel):
    test_fraction: float = Field(0.2, ge=0.0, lt=1.0)
    seed: int = 0


def _check_dimension(v: int) -> int:
    if v % 2 == 0 or v < 5:
        raise ValueError("dimension must be an odd integer >= 5")
    return v


class HardInstanceConfig(BaseModel):
    n_points: int = Field(..., ge=1)
    noise_rate: float = Field(0.0, ge=0.0, lt=0.5)
    dimension: int = 21
    seed: int = 0
    # large-margin / puller / penalizer
    mixture: Tuple[float, float, float] = (0.25, 0.25, 0.5)

    @field_validator("dimension")
    @classmethod
    def _odd_dimension(cls, v: int) -> int:
        return _check_dimension(v)

    @field_validator("mixture")
    @classmethod
    def _mixture_is_distribution(cls, v: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if any(p < 0 for p in v) or not math.isclose(sum(v), 1.0, abs_tol=1e-9):
            raise ValueError("mixture must be three non-negative probabilities summing to 1")
        return v


class MasterConfig(BaseModel):
    rho: float = Field(settings.default_rho, gt=0.0, le=1.0)
    eta_kind: EtaKind = EtaKind.PLUS_MINUS
    max_columns: int = Field(settings.max_columns, ge=1)
    pricing_tolerance: float = Field(settings.pricing_tolerance, ge=0.0)


class AdaBoostConfig(BaseModel):
    iterations: int = Field(100, ge=1)
    variant: AdaBoostVariant = AdaBoostVariant.DISCRETE


class SparsifyConfig(BaseModel):
    alphas: List[float]
    rho: float = Field(settings.default_rho, gt=0.0, le=1.0)
    max_nodes: int = Field(10000, ge=1)
    cut_rounds: int = Field(20, ge=0)

    @field_validator("alphas")
    @classmethod
    def _non_negative(cls, v: List[float]) -> List[float]:
        if any(a < 0 for a in v):
            raise ValueError("complexity costs must be non-negative")
        return v

    @classmethod
    def uniform(cls, alpha: float, n_learners: int, **kwargs) -> "SparsifyConfig":
        return cls(alphas=[alpha] * n_learners, **kwargs)


class HardSource(BaseModel):
    n_points: int = Field(..., ge=1)
    noise_rate: float = Field(..., ge=0.0, lt=0.5)
    dimension: int = 21

    @field_validator("dimension")
    @classmethod
    def _odd_dimension(cls, v: int) -> int:
        return _check_dimension(v)


class ExperimentConfig(BaseModel):
    name: Optional[str] = None
    data_path: Optional[str] = None
    test_path: Optional[str] = None
    hard: Optional[HardSource] = None
    algorithms: List[Algorithm] = [Algorithm.IPBOOST]
    rhos: List[float] = [settings.default_rho]
    eta_kind: EtaKind = EtaKind.PLUS_MINUS
    seeds: List[int] = Field(default_factory=lambda: list(range(settings.seeds)))
    stall_limit: int = Field(settings.stall_limit, ge=1)
    time_limit: float = Field(settings.time_limit, gt=0.0)
    subsample_cap: int = Field(settings.subsample_cap, ge=1)
    test_fraction: float = Field(0.2, ge=0.0, lt=1.0)
    ada_iterations: int = Field(100, ge=1)
    ada_variant: AdaBoostVariant = AdaBoostVariant.DISCRETE
    sparsify_alpha: Optional[float] = Field(None, ge=0.0)
    max_columns: int = Field(settings.max_columns, ge=1)
    workers: int = Field(settings.workers, ge=1)
    output_path: Optional[str] = None
    trajectory_path: Optional[str] = None
    model_path: Optional[str] = None

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if (self.data_path is None) == (self.hard is None):
            raise ValueError("exactly one of data_path or hard must be given")
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        if not self.algorithms:
            raise ValueError("algorithms must not be empty")
        for rho in self.rhos:
            if not 0.0 < rho <= 1.0:
                raise ValueError(f"rho must lie in (0, 1], got {rho}")
        return self

    @property
    def dataset_name(self) -> str:
        if self.name:
            return self.name
        if self.hard is not None:
            return f"hard_N{self.hard.n_points}_g{self.hard.noise_rate}"
        return self.data_path.rsplit("/", 1)[-1]


class ReportRow(BaseModel):
    name: str
    algo: Algorithm
    rho: float
    eta_kind: EtaKind
    # NaN when every seed failed or the test side is empty; null in JSON
    acc_mean: Optional[float]
    acc_std: Optional[float]
    train_acc_mean: Optional[float]
    train_acc_std: Optional[float]
    L_mean: Optional[float]
    time_total: Optional[float]
    time_to_best: Optional[float]
    nodes: Optional[float]
    n_runs: int
    n_failed: int
    std_flagged: bool

    @field_serializer(
        "acc_mean", "acc_std", "train_acc_mean", "train_acc_std", "L_mean", "time_total", "time_to_best", "nodes",
        when_used="json",
    )
    def _nan_as_null(self, v: Optional[float]) -> Optional[float]:
        if v is None or math.isnan(v):
            return None
        return v


# -----------------------------
# Persisted ensemble document
# -----------------------------

class StumpDocument(BaseModel):
    feature_index: int = Field(..., ge=0)
    threshold: float
    polarity: int
    class_prob_pos: float = Field(..., ge=0.0, le=1.0)
    class_prob_neg: float = Field(..., ge=0.0, le=1.0)

    @field_validator("threshold", mode="before")
    @classmethod
    def _parse_threshold(cls, v: Union[float, str]) -> float:
        # non-finite thresholds travel as "inf" / "-inf"
        if isinstance(v, str):
            return float(v)
        return v

    @field_serializer("threshold")
    def _dump_threshold(self, v: float) -> Union[float, str]:
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v

    @field_validator("polarity")
    @classmethod
    def _polarity(cls, v: int) -> int:
        if v not in (-1, 1):
            raise ValueError("polarity must be -1 or +1")
        return v


class EnsembleDocument(BaseModel):
    format_version: int = MODEL_FORMAT_VERSION
    eta_kind: EtaKind
    margin: Optional[float] = None
    stumps: List[StumpDocument]
    weights: List[float]

    @field_serializer("margin")
    def _dump_margin(self, v: Optional[float]) -> Optional[float]:
        return None if v is None or math.isnan(v) else v

    @model_validator(mode="after")
    def _lengths(self) -> "EnsembleDocument":
        if not self.stumps:
            raise ValueError("ensemble must contain at least one stump")
        if len(self.stumps) != len(self.weights):
            raise ValueError("stumps and weights differ in length")
        return self


class PredictRequest(BaseModel):
    model: Optional[EnsembleDocument] = None
    model_id: Optional[str] = None
    points: List[List[float]]

    @model_validator(mode="after")
    def _one_model(self) -> "PredictRequest":
        if (self.model is None) == (self.model_id is None):
            raise ValueError("exactly one of model or model_id must be given")
        return self


class StoredModel(BaseModel):
    model_id: str
    n_learners: int


class PredictResponse(BaseModel):
    labels: List[int]
    scores: List[float]


class ExperimentResponse(BaseModel):
    run_id: str
    rows: List[ReportRow]
    failures: List[str] = []
