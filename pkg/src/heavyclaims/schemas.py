"""Wire formats for the HTTP service; each *Spec mirrors the JSON layout
accepted by the corresponding from_dict constructor."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from . import limit_lt, mixing_laws, tail_models


class SVSpec(BaseModel):
    kind: Literal["constant", "log_power"] = "constant"
    c: Optional[float] = None
    rho: float = 0.0


class ModelSpec(BaseModel):
    alpha: float
    x_min: float = 1.0
    sv: SVSpec = Field(default_factory=SVSpec)

    def build(self) -> tail_models.TailModel:
        return tail_models.from_dict(self.model_dump(exclude_none=True))


class MixingSpec(BaseModel):
    kind: Literal["degenerate", "gamma", "discrete"]
    theta: Optional[float] = None
    shape: Optional[float] = None
    rate: Optional[float] = None
    atoms: Optional[list] = None

    def build(self) -> mixing_laws.MixingLaw:
        return mixing_laws.from_dict(self.model_dump(exclude_none=True))


class RegimeSpec(BaseModel):
    name: str
    s: int = 0
    p: float = 0.5

    def build(self) -> limit_lt.Regime:
        return limit_lt.regime_from_name(self.name, s=self.s, p=self.p)


class LTExactRequest(BaseModel):
    model: ModelSpec
    mixing: MixingSpec
    t: float
    s: int = 0
    u: float = 0.0
    v: float = 0.0
    w: float = 0.0


class LTExactResponse(BaseModel):
    value: float
    abs_err_est: float


class LTLimitRequest(BaseModel):
    model: ModelSpec
    mixing: MixingSpec
    regime: RegimeSpec
    u: float = 0.0
    v: float = 0.0
    w: float = 0.0


class LTLimitResponse(BaseModel):
    value: float
    regime: str
    normalizers: dict


class MomentsRequest(BaseModel):
    gammas: list[float]
    s_values: list[int] = [0]
    k_max: int = 4


class MomentRow(BaseModel):
    s: int
    k: int
    gamma: float
    moment: float  # E{R_(s)^k}
    var: float     # Var{R_(s)}
    rho: float     # corr(R_(0)^2, T_inf) at this gamma


class MomentsResponse(BaseModel):
    rows: list[MomentRow]


class SimulateRequest(BaseModel):
    model: ModelSpec
    mixing: MixingSpec
    regime: RegimeSpec
    t_grid: list[float]
    queries: list[tuple[float, float, float]]
    n_per_t: int = 1000
    seed: int


class ReportRowOut(BaseModel):
    t: float
    u: float
    v: float
    w: float
    empirical: float
    stderr: float
    limit: float
    gap: float


class SimulateResponse(BaseModel):
    regime: str
    rows: list[ReportRowOut]
    median_gaps: list[tuple[float, float]]
    median_stderrs: list[tuple[float, float]]
    monotone: bool
    flagged: bool
    resample_rates: list[tuple[float, float]]
    warnings: list[str]


class CorrRequest(BaseModel):
    alpha: float
    n_samples: int = 10_000
    lepage_k: int = 10_000
    tail_mode: Literal["drop", "mean_correct"] = "mean_correct"
    seed: int


class CorrResponse(BaseModel):
    mean: float
    mean_stderr: float
    var: float
    var_stderr: float
    corr_with_r0_squared: float
    analytic_mean: float
    analytic_var: float
    analytic_corr: float


class CheckItem(BaseModel):
    name: str
    passed: bool
    detail: str


class CheckResponse(BaseModel):
    all_passed: bool
    checks: list[CheckItem]
