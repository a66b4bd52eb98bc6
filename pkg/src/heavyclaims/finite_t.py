"""Exact finite-horizon quantities for mixed-Poisson claim counts.

Splits the portfolio at the (s+1)-th largest claim: the joint Laplace
transform couples u with the sum of the s largest claims, v with the
(s+1)-th largest itself, and w with the sum of everything below it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import mixing_laws, tail_models
from .errors import DomainError
from .mixing_laws import MixingLaw
from .quadrature import QuadResult, integrate, upper_incomplete_gamma
from .tail_models import TailModel


@dataclass(frozen=True)
class CountingSpec:
    """Claim counts: N(t) is Poisson(theta * t) given Theta = theta."""
    mix: MixingLaw
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError("horizon t must be positive")


@dataclass(frozen=True)
class LTQuery:
    """Arguments of the joint transform; s counts the top claims split out."""
    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    s: int = 0

    def __post_init__(self):
        if min(self.u, self.v, self.w) < 0:
            raise DomainError("transform arguments must be nonnegative")
        if self.s < 0 or self.s != int(self.s):
            raise DomainError("s must be a nonnegative integer")


def pgf_derivative(spec: CountingSpec, r: int, z: float) -> float:
    """r-th derivative of the count pgf at z in [0, 1]: t^r q(mix, r, t(1-z))."""
    if not 0.0 <= z <= 1.0:
        raise DomainError("pgf derivative defined on z in [0, 1]")
    return spec.t ** r * mixing_laws.q(spec.mix, r, spec.t * (1.0 - z))


def count_pmf(spec: CountingSpec, n: int) -> float:
    """P(N(t) = n)."""
    if n < 0 or n != int(n):
        raise DomainError("n must be a nonnegative integer")
    n = int(n)
    mix, t = spec.mix, spec.t
    if isinstance(mix, mixing_laws.Degenerate):
        return float(stats.poisson.pmf(n, mix.theta * t))
    if isinstance(mix, mixing_laws.GammaLaw):
        # Poisson mixed over Gamma(shape, rate) is negative binomial
        return float(stats.nbinom.pmf(n, mix.shape, mix.rate / (mix.rate + t)))
    if isinstance(mix, mixing_laws.Discrete):
        return float(sum(p * stats.poisson.pmf(n, v * t) for v, p in mix.atoms))
    raise DomainError(f"unsupported mixing law {type(mix).__name__}")


# ---------------------------------------------------------------------------
# partial claim transforms against dF

def _claim_lt(model: TailModel, u: float) -> float:
    """E{exp(-u X)}."""
    if u == 0.0:
        return 1.0
    return _partial_lt_above(model, u, np.array([model.x_min]))[0]


def _partial_lt_above(model: TailModel, u: float, y: np.ndarray) -> np.ndarray:
    """E{1_{X>y} exp(-u X)}, vectorized in y."""
    y = np.maximum(y, model.x_min)
    if u == 0.0:
        return tail_models.survival(model, y)
    a, m = model.alpha, model.x_min
    if model.sv_kind == tail_models.CONSTANT:
        # int_y^inf e^{-ux} a m^a x^{-a-1} dx = a m^a u^a Gamma(-a, u y)
        return a * m ** a * u ** a * upper_incomplete_gamma(-a, u * y)
    out = np.empty_like(y, dtype=float)
    for i, yi in enumerate(y):
        res = integrate(
            lambda x: np.exp(-u * x) * tail_models.density(model, x),
            float(yi), math.inf, abs_tol=1e-12, rel_tol=1e-10)
        out[i] = res.value
    return out


def _deficit_below(model: TailModel, w: float, y: np.ndarray) -> np.ndarray:
    """E{1_{X<=y} (1 - exp(-w X))}, vectorized in y.  Stable for small w."""
    y = np.maximum(y, model.x_min)
    if w == 0.0:
        return np.zeros_like(y, dtype=float)
    a, m = model.alpha, model.x_min
    if model.sv_kind != tail_models.CONSTANT:
        out = np.empty_like(y, dtype=float)
        for i, yi in enumerate(y):
            if yi <= m:
                out[i] = 0.0
                continue
            res = integrate(
                lambda x: -np.expm1(-w * x) * tail_models.density(model, x),
                m, float(yi), abs_tol=1e-13, rel_tol=1e-10)
            out[i] = res.value
        return out
    out = np.empty_like(y, dtype=float)
    small = w * y <= 1.0
    if np.any(small):
        ys = y[small]
        # alternating series in powers of (w*x); grouped as (w*ys)^k ys^{-a}
        # so no factor overflows even when ys is astronomically large
        ws, wm = w * ys, w * m
        acc = np.zeros_like(ys)
        sign = 1.0
        for k in range(1, 26):
            if k == a:
                ik = ws ** k * ys ** (-a) * np.log(ys / m)
            else:
                ik = (ws ** k * ys ** (-a) - wm ** k * m ** (-a)) / (k - a)
            acc += sign / math.factorial(k) * ik
            sign = -sign
        out[small] = a * m ** a * acc
    if np.any(~small):
        yl = y[~small]
        gm = upper_incomplete_gamma(-a, w * m)
        gy = upper_incomplete_gamma(-a, w * yl)
        f_y = 1.0 - tail_models.survival(model, yl)
        out[~small] = f_y - a * m ** a * w ** a * (gm - gy)
    return np.maximum(out, 0.0)


# ---------------------------------------------------------------------------
# joint transform

def joint_lt_result(spec: CountingSpec, model: TailModel, query: LTQuery) -> QuadResult:
    """exact_joint_lt with the quadrature error estimate attached."""
    mix, t = spec.mix, spec.t
    u, v, w, s = query.u, query.v, query.w, int(query.s)

    phi_u = _claim_lt(model, u)
    head = sum(count_pmf(spec, n) * phi_u ** n for n in range(s + 1))

    # substitute y = U(t/z): dF(y) = dz/t, survival(y) = z/t, and the pgf
    # derivative becomes t^{s+1} q(mix, s+1, z + t * deficit(y))
    scale = t ** s / math.factorial(s)

    def integrand(z):
        y = tail_models.tail_quantile(model, t / z)
        val = mixing_laws.q(mix, s + 1, z + t * _deficit_below(model, w, y))
        if v > 0.0:
            val = val * np.exp(-v * y)
        if s > 0:
            val = val * _partial_lt_above(model, u, y) ** s
        return scale * val

    res = integrate(integrand, 0.0, t, abs_tol=1e-9, rel_tol=1e-8,
                    max_evals=400_000)
    return QuadResult(value=head + res.value,
                      abs_err_est=res.abs_err_est,
                      evaluations=res.evaluations)


def exact_joint_lt(spec: CountingSpec, model: TailModel, query: LTQuery) -> float:
    """Joint transform E{exp(-u*(top-s sum) - v*(next largest) - w*(rest))}."""
    return joint_lt_result(spec, model, query).value


def component_means(spec: CountingSpec, model: TailModel, s: int):
    """Means of (top-s sum, (s+1)-th largest, remaining sum, total).

    Entries are +inf where the underlying expectation diverges:
    the top-s sum for s >= 1 needs alpha > 1, the (s+1)-th largest needs
    alpha > 1/(s+1), and the remaining sum needs alpha > 1/(s+2).
    """
    if s < 0 or s != int(s):
        raise DomainError("s must be a nonnegative integer")
    s = int(s)
    mix, t = spec.mix, spec.t
    a = model.alpha
    gamma = model.gamma
    mu = tail_models.mean(model)

    e_total = t * mixing_laws.theta_mean(mix) * mu if math.isfinite(mu) else math.inf

    # top-s sum
    if s == 0:
        e_top = 0.0
    elif a <= 1.0:
        e_top = math.inf
    else:
        fixed = sum(n * count_pmf(spec, n) for n in range(1, s + 1)) * mu
        e_top = fixed + _zform_integral(
            spec, model, power=s - 1, q_order=s + 1,
            weight=lambda y: np.array(
                [tail_models.partial_mean_above(model, float(yi)) for yi in y]),
            prefactor=t / math.factorial(s - 1),
            z_exponent=s - gamma)

    # (s+1)-th largest
    if gamma >= s + 1:
        e_pivot = math.inf
    else:
        e_pivot = _zform_integral(
            spec, model, power=s, q_order=s + 1,
            weight=lambda y: y,
            prefactor=1.0 / math.factorial(s),
            z_exponent=s - gamma)

    # remaining (small-claim) sum
    if gamma >= s + 2:
        e_rest = math.inf
    else:
        e_rest = _zform_integral(
            spec, model, power=s, q_order=s + 2,
            weight=lambda y: np.array(
                [tail_models.partial_mean_below(model, float(yi)) for yi in y]),
            prefactor=t / math.factorial(s),
            z_exponent=min(s - gamma + 1.0, 0.0))

    return e_top, e_pivot, e_rest, e_total


def _zform_integral(spec, model, power, q_order, weight, prefactor, z_exponent):
    """prefactor * int_0^t z^power * q(mix, q_order, z) * weight(U(t/z)) dz,
    with the z^power absorbed against the z^{-gamma}-type growth of weight.

    z_exponent is the leading small-z exponent of the whole integrand; when it
    is negative (an integrable singularity) the substitution z = x^m flattens
    it out.
    """
    mix, t = spec.mix, spec.t
    if z_exponent <= -1.0:
        raise DomainError("integral diverges")
    m = 1.0 if z_exponent >= 0.0 else max(1.0, 2.0 / (1.0 + z_exponent))

    def integrand(x):
        z = x ** m
        y = tail_models.tail_quantile(model, t / z)
        val = mixing_laws.q(mix, q_order, z) * weight(y)
        if power > 0:
            val = val * z ** power
        elif power < 0:
            raise AssertionError("power must be >= 0")
        return prefactor * val * m * x ** (m - 1.0)

    res = integrate(integrand, 0.0, t ** (1.0 / m),
                    abs_tol=1e-9, rel_tol=1e-8, max_evals=400_000)
    return res.value
