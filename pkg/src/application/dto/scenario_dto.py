"""
Solicitudes ya validadas de cada comando, con objetos del dominio listos para los servicios.
"""
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Tuple

import numpy as np

from src.domain.entities.affine import AffineParams, CIRParams, CompensatorLoadings
from src.domain.entities.compensator import CompensatorSpec, ShortRate
from src.domain.entities.forward_surface import ForwardSurface
from src.domain.entities.hazard import HazardPath, TwoPointPrior
from src.domain.entities.hjm import HJMCoefficients
from src.domain.entities.merton import MertonSetup
from src.domain.entities.risky_schedule import RiskySchedule
from src.domain.value_objects.piecewise_linear import PiecewiseLinear


@dataclass
class CurveRequest:
    surface: ForwardSurface
    t: float
    maturities: List[float]
    defaulted: bool = False
    source: str = ""


@dataclass
class AffineModel:
    params: AffineParams
    loadings: CompensatorLoadings
    schedule: RiskySchedule
    cir: Optional[CIRParams] = None


@dataclass
class AffineRequest:
    model: AffineModel
    x0: np.ndarray
    t: float
    maturities: List[float]
    export: Literal['prices', 'solution'] = 'prices'
    step: Optional[float] = None
    source: str = ""


@dataclass
class FilterRequest:
    setup: MertonSetup
    horizon: Optional[float] = None
    dt: Optional[float] = None
    true_x: Optional[float] = None
    coverage_runs: int = 0
    source: str = ""


@dataclass
class AzemaRequest:
    f_curve: PiecewiseLinear
    obs_times: List[float]
    noise: float
    prior: TwoPointPrior
    horizon: float
    step: float


@dataclass
class SimulateRequest:
    """Exactamente uno de hazard_path, announced o azema."""
    hazard_path: Optional[HazardPath] = None
    announced: Optional[Tuple[float, float, float]] = None
    azema: Optional[AzemaRequest] = None
    n_paths: Optional[int] = None
    source: str = ""


@dataclass
class MartingaleRequest:
    T: float
    t_grid: List[float]
    n_paths: Optional[int] = None
    mispriced: bool = False
    x0: Optional[np.ndarray] = None


@dataclass
class VerifyRequest:
    kind: Literal['general', 'merton', 'affine']
    grid: List[Tuple[float, float]]
    tol: Optional[float] = None
    coefficients: Optional[HJMCoefficients] = None
    spec: Optional[CompensatorSpec] = None
    rate: ShortRate = field(default_factory=ShortRate.zero)
    f_diag: Optional[float] = None
    merton_states: List[float] = field(default_factory=list)
    merton_K: float = 0.0
    merton_U: float = 0.0
    affine: Optional[AffineModel] = None
    affine_states: List[np.ndarray] = field(default_factory=list)
    step: Optional[float] = None
    martingale: Optional[MartingaleRequest] = None
    source: str = ""
