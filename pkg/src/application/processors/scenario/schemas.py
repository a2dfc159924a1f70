"""
Esquemas pydantic de los documentos de escenario (JSON) de cada comando.
"""
from __future__ import annotations
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class _Schema(BaseModel):
    model_config = ConfigDict(extra='forbid')


class CurveSchema(_Schema):
    """Función lineal por tramos: nodos y valores (escalares o vectores)."""
    grid: List[float] = Field(min_length=1)
    values: List[Union[float, List[float]]] = Field(min_length=1)

    @model_validator(mode='after')
    def _mismas_longitudes(self) -> 'CurveSchema':
        if len(self.grid) != len(self.values):
            raise ValueError(f"grid tiene {len(self.grid)} nodos y values {len(self.values)}")
        return self


Curve = Union[float, CurveSchema]
VectorCurve = Union[List[float], CurveSchema]


# ----------------------------------------------------------------------
# curve
# ----------------------------------------------------------------------
class RiskyAtomSchema(_Schema):
    u: float = Field(ge=0)
    g: Union[float, List[float]] = 0.0
    gamma: Optional[float] = Field(default=None, gt=0, lt=1)
    announce: Optional[float] = Field(default=None, ge=0)


class CurveScenario(_Schema):
    time_grid: List[float] = Field(min_length=1)
    maturity_grid: List[float] = Field(min_length=2)
    f: Union[float, List[List[float]], CurveSchema]
    risky_times: List[RiskyAtomSchema] = Field(default_factory=list)
    t: float = 0.0
    maturities: List[float] = Field(min_length=1)
    defaulted: bool = False


# ----------------------------------------------------------------------
# affine
# ----------------------------------------------------------------------
class CIRSchema(_Schema):
    mu0: float = Field(ge=0)
    mu1: float
    sigma: float = Field(gt=0)
    psi1: float = Field(default=0.0, ge=0)
    phi0: float = Field(default=0.0, ge=0)
    psi0: float = Field(default=1.0, ge=0)
    phi1: float = Field(default=0.0, ge=0)


class AffineParamsSchema(_Schema):
    mu0: List[float] = Field(min_length=1)
    mu: List[List[float]]
    sigma0: List[List[float]]
    sigma: List[List[List[float]]]
    cone_dim: int = Field(ge=0)


class JumpSchema(_Schema):
    phi: float = 0.0
    psi: List[float]


class LoadingsSchema(_Schema):
    phi0: Curve = 0.0
    psi0: VectorCurve
    jumps: List[JumpSchema] = Field(default_factory=list)


class AffineModelSchema(_Schema):
    """Modelo afín: CIR unidimensional o parámetros generales con cargas."""
    cir: Optional[CIRSchema] = None
    params: Optional[AffineParamsSchema] = None
    loadings: Optional[LoadingsSchema] = None
    risky_times: List[float] = Field(default_factory=list)

    @model_validator(mode='after')
    def _un_modelo(self) -> 'AffineModelSchema':
        if (self.cir is None) == (self.params is None):
            raise ValueError("Se requiere exactamente uno de 'cir' o 'params'")
        if self.params is not None and self.loadings is None:
            raise ValueError("'params' requiere 'loadings'")
        if self.cir is not None and len(self.risky_times) > 1:
            raise ValueError("El modelo CIR admite un único tiempo riesgoso")
        return self


class AffineScenario(AffineModelSchema):
    x0: List[float] = Field(min_length=1)
    t: float = Field(default=0.0, ge=0)
    maturities: List[float] = Field(min_length=1)
    export: Literal['prices', 'solution'] = 'prices'
    step: Optional[float] = Field(default=None, gt=0)


# ----------------------------------------------------------------------
# filter
# ----------------------------------------------------------------------
class MertonSetupSchema(_Schema):
    v0: float = Field(gt=0)
    sigma: float = Field(gt=0)
    mu_x: float
    var_x: float = Field(gt=0)
    K: float = Field(gt=0)
    K_prime: float = Field(gt=0)
    T: float = Field(gt=0)
    U: float = Field(gt=0)
    S: float = Field(gt=0)
    sigma_eta: float = Field(gt=0)
    r: float = 0.0


class FilterScenario(_Schema):
    setup: MertonSetupSchema
    horizon: Optional[float] = Field(default=None, gt=0)
    dt: Optional[float] = Field(default=None, gt=0)
    true_x: Optional[float] = None
    coverage_runs: int = Field(default=0, ge=0)


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------
class HazardAtomSchema(_Schema):
    u: float = Field(ge=0)
    lamp: float = Field(ge=0)


class AnnouncedSchema(_Schema):
    rate: float = Field(gt=0)
    delay_mean: float = Field(default=1.0, gt=0)
    horizon: float = Field(gt=0)


class AzemaSchema(_Schema):
    f: Curve
    obs_times: List[float] = Field(default_factory=list)
    noise: float = Field(gt=0)
    p_low: float = Field(ge=0, le=1)
    points: List[float] = Field(default=[1.0, 2.0], min_length=2, max_length=2)
    horizon: float = Field(gt=0)
    step: float = Field(default=0.01, gt=0)


class SimulateScenario(_Schema):
    """Un único modelo por documento: hazard explícito, tiempos anunciados o Azéma."""
    lam: Optional[Curve] = Field(default=None, alias='lambda')
    atoms: List[HazardAtomSchema] = Field(default_factory=list)
    horizon: Optional[float] = Field(default=None, gt=0)
    announced: Optional[AnnouncedSchema] = None
    azema: Optional[AzemaSchema] = None
    n_paths: Optional[int] = Field(default=None, ge=1)

    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    @model_validator(mode='after')
    def _un_modelo(self) -> 'SimulateScenario':
        modelos = [self.lam is not None, self.announced is not None, self.azema is not None]
        if sum(modelos) != 1:
            raise ValueError("Se requiere exactamente uno de 'lambda', 'announced' o 'azema'")
        if self.lam is not None and self.horizon is None:
            raise ValueError("'lambda' requiere 'horizon'")
        return self


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------
class MartingaleSchema(_Schema):
    T: float = Field(gt=0)
    t_grid: List[float] = Field(min_length=1)
    n_paths: Optional[int] = Field(default=None, ge=1)
    mispriced: bool = False
    x0: Optional[List[float]] = None


class VerifyAtomSchema(_Schema):
    u: float = Field(ge=0)
    gamma: float = Field(gt=0, lt=1)
    g: float = 0.0
    announce: Optional[float] = Field(default=None, ge=0)


class GeneralVerifySchema(_Schema):
    kind: Literal['general']
    hazard: Curve = 0.0
    r: float = 0.0
    horizon: float = Field(gt=0)
    atoms: List[VerifyAtomSchema] = Field(default_factory=list)
    vol: List[float] = Field(default=[0.0], min_length=1)
    drift: Union[Literal['hjm'], float] = 'hjm'
    f_diag: Optional[float] = None
    t_grid: List[float] = Field(min_length=1)
    T_grid: List[float] = Field(min_length=1)
    tol: Optional[float] = Field(default=None, gt=0)
    martingale: Optional[MartingaleSchema] = None


class MertonVerifySchema(_Schema):
    kind: Literal['merton']
    W: List[float] = Field(min_length=1)
    K: float
    U: float = Field(gt=0)
    r: float = 0.0
    t_grid: List[float] = Field(min_length=1)
    T_grid: List[float] = Field(min_length=1)
    tol: Optional[float] = Field(default=None, gt=0)

    @field_validator('t_grid')
    @classmethod
    def _antes_de_u(cls, value: List[float], info) -> List[float]:
        U = info.data.get('U')
        if U is not None and any(t >= U for t in value):
            raise ValueError("Todos los t deben ser anteriores a U")
        return value


class AffineVerifySchema(AffineModelSchema):
    kind: Literal['affine']
    states: List[List[float]] = Field(min_length=1)
    t_grid: List[float] = Field(min_length=1)
    T_grid: List[float] = Field(min_length=1)
    step: Optional[float] = Field(default=None, gt=0)
    martingale: Optional[MartingaleSchema] = None


VerifyScenario = Annotated[
    Union[GeneralVerifySchema, MertonVerifySchema, AffineVerifySchema],
    Field(discriminator='kind'),
]
