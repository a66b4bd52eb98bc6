"""Claim-size laws with regularly varying tails.

Survival functions have the form (x/x_min)^(-alpha) * L(x) where the slowly
varying part L is either constant or a log-power perturbation
(1 + ln(x/x_min))^rho.  Requiring survival(x_min) = 1 pins the constant, so
the family is parameterized by (alpha, x_min, kind, rho) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import quadrature
from .errors import DomainError

CONSTANT = "constant"
LOG_POWER = "log_power"


@dataclass(frozen=True)
class TailModel:
    alpha: float
    x_min: float = 1.0
    sv_kind: str = CONSTANT
    rho: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not self.x_min > 0:
            raise DomainError("x_min must be positive")
        if self.sv_kind not in (CONSTANT, LOG_POWER):
            raise DomainError(f"unknown slowly-varying kind {self.sv_kind!r}")
        if self.sv_kind == CONSTANT and self.rho != 0.0:
            raise DomainError("constant family takes rho = 0")
        # monotone survival needs rho <= alpha (worst case at x = x_min)
        if self.sv_kind == LOG_POWER and self.rho > self.alpha:
            raise DomainError("log_power family requires rho <= alpha")

    @property
    def gamma(self) -> float:
        return 1.0 / self.alpha

    @property
    def sv_constant(self) -> float:
        """The constant c with survival ~ c * x^{-alpha}: forced to x_min^alpha."""
        return self.x_min ** self.alpha

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "x_min": self.x_min,
            "sv": {"kind": self.sv_kind, "c": self.sv_constant, "rho": self.rho},
        }


def from_dict(spec: dict) -> TailModel:
    sv = spec.get("sv", {"kind": CONSTANT})
    model = TailModel(
        alpha=float(spec["alpha"]),
        x_min=float(spec.get("x_min", 1.0)),
        sv_kind=sv.get("kind", CONSTANT),
        rho=float(sv.get("rho", 0.0)),
    )
    if "c" in sv and sv["c"] is not None:
        c = float(sv["c"])
        if not math.isclose(c, model.sv_constant, rel_tol=1e-9):
            raise DomainError(
                f"sv constant {c} inconsistent with x_min^alpha = {model.sv_constant}")
    return model


def survival(model: TailModel, x):
    """P(X > x); equals 1 on [0, x_min]."""
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    if np.any(x_arr < 0):
        raise DomainError("x must be nonnegative")
    r = np.maximum(x_arr / model.x_min, 1.0)
    if model.sv_kind == CONSTANT:
        out = r ** (-model.alpha)
    else:
        out = r ** (-model.alpha) * (1.0 + np.log(r)) ** model.rho
    return float(out[0]) if scalar else out


def density(model: TailModel, x):
    """Density of the claim law; zero below x_min."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    scalar = np.asarray(x).ndim == 0
    r = x_arr / model.x_min
    inside = r >= 1.0
    r = np.maximum(r, 1.0)
    if model.sv_kind == CONSTANT:
        out = model.alpha / model.x_min * r ** (-model.alpha - 1.0)
    else:
        ln1 = 1.0 + np.log(r)
        out = (r ** (-model.alpha) * ln1 ** (model.rho - 1.0)
               * (model.alpha * ln1 - model.rho) / x_arr)
    out = np.where(inside, out, 0.0)
    return float(out[0]) if scalar else out


def tail_quantile(model: TailModel, y):
    """U(y): the point with survival 1/y, for y >= 1."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    scalar = np.asarray(y).ndim == 0
    if np.any(y_arr < 1.0):
        raise DomainError("tail quantile requires y >= 1")
    if model.sv_kind == CONSTANT:
        out = model.x_min * y_arr ** model.gamma
        return float(out[0]) if scalar else out
    out = np.array([_log_power_quantile(model, float(yi)) for yi in y_arr])
    return float(out[0]) if scalar else out


def _log_power_quantile(model: TailModel, y: float) -> float:
    if y == 1.0:
        return model.x_min
    x0 = model.x_min * y ** model.gamma  # exact for the constant family
    if model.rho >= 0:
        # survival dominates the constant family's, so U(y) >= x0
        lo, hi = x0, 2.0 * x0
        while survival(model, hi) > 1.0 / y:
            lo, hi = hi, hi * hi / x0
    else:
        lo, hi = model.x_min, x0
    return math.exp(optimize.brentq(
        lambda t: survival(model, math.exp(t)) - 1.0 / y,
        math.log(lo), math.log(hi), rtol=1e-15, maxiter=200))


def quantile(model: TailModel, p):
    """x_p with F(x_p) = p, i.e. tail_quantile(1/(1-p))."""
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any((p_arr < 0) | (p_arr >= 1)):
        raise DomainError("quantile requires 0 <= p < 1")
    return tail_quantile(model, 1.0 / (1.0 - np.asarray(p, dtype=float)))


def partial_mean_below(model: TailModel, x: float) -> float:
    """E{X 1_{X <= x}}, the lower truncated-mean numerator."""
    if x < model.x_min:
        raise DomainError("x below support")
    if x == model.x_min:
        return 0.0
    a, m = model.alpha, model.x_min
    if model.sv_kind == CONSTANT:
        if a == 1.0:
            return m * math.log(x / m)
        return a * m ** a * (x ** (1.0 - a) - m ** (1.0 - a)) / (1.0 - a)
    res = quadrature.integrate(lambda t: t * density(model, t), m, x,
                               abs_tol=1e-12, rel_tol=1e-10)
    return res.value


def partial_mean_above(model: TailModel, x: float) -> float:
    """E{X 1_{X > x}}, the upper truncated-mean numerator; +inf when alpha <= 1."""
    if x < model.x_min:
        raise DomainError("x below support")
    if model.alpha <= 1.0:
        return math.inf
    a, m = model.alpha, model.x_min
    if model.sv_kind == CONSTANT:
        return a * m ** a * x ** (1.0 - a) / (a - 1.0)
    res = quadrature.integrate(lambda t: t * density(model, t), x, math.inf,
                               abs_tol=1e-12, rel_tol=1e-10)
    return res.value


def truncated_means(model: TailModel, x: float):
    """(E{X | X <= x}, E{X | X > x}); the upper mean is +inf for alpha <= 1."""
    below = partial_mean_below(model, x)
    above = partial_mean_above(model, x)
    fx = 1.0 - survival(model, x)
    lower = below / fx if fx > 0 else model.x_min
    upper = above / survival(model, x) if math.isfinite(above) else math.inf
    return lower, upper


def mean(model: TailModel) -> float:
    """E{X}; +inf when alpha <= 1."""
    if model.alpha <= 1.0:
        return math.inf
    if model.sv_kind == CONSTANT:
        return model.alpha * model.x_min / (model.alpha - 1.0)
    return partial_mean_above(model, model.x_min)


def second_moment(model: TailModel) -> float:
    """E{X^2}; +inf when alpha <= 2."""
    if model.alpha <= 2.0:
        return math.inf
    a, m = model.alpha, model.x_min
    if model.sv_kind == CONSTANT:
        return a * m ** 2 / (a - 2.0)
    res = quadrature.integrate(lambda t: t * t * density(model, t), m, math.inf,
                               abs_tol=1e-12, rel_tol=1e-10)
    return res.value


def variance(model: TailModel) -> float:
    if model.alpha <= 2.0:
        return math.inf
    mu = mean(model)
    return second_moment(model) - mu * mu


def sample(model: TailModel, rng, n: int | None = None):
    """Inverse-transform draws; survival(X) is uniform on (0, 1]."""
    size = 1 if n is None else n
    w = 1.0 - rng.random(size)  # in (0, 1]
    if model.sv_kind == CONSTANT:
        out = model.x_min * w ** (-model.gamma)
    else:
        out = _log_power_quantile_vec(model, 1.0 / w)
    return float(out[0]) if n is None else out


def _log_power_quantile_vec(model: TailModel, y: np.ndarray) -> np.ndarray:
    """Vectorized bisection for U(y) on the log_power family (log-space)."""
    x0 = model.x_min * y ** model.gamma
    target = 1.0 / y
    if model.rho >= 0:
        lo = np.log(x0)
        hi = lo + max(1.0, model.gamma) * (1.0 + np.log1p(np.log(np.maximum(y, 1.0))))
        grow = survival(model, np.exp(hi)) > target
        while np.any(grow):
            hi = np.where(grow, lo + 2.0 * (hi - lo), hi)
            grow = survival(model, np.exp(hi)) > target
    else:
        hi = np.log(x0)
        lo = np.full_like(hi, math.log(model.x_min))
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        high_side = survival(model, np.exp(mid)) > target
        lo = np.where(high_side, mid, lo)
        hi = np.where(high_side, hi, mid)
    return np.exp(0.5 * (lo + hi))
