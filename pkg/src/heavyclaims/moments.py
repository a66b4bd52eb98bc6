"""Closed-form moments of the limiting order-statistic ratios.

R_(s) is the limit of (everything except the s largest claims) divided by the
(s+1)-th largest claim; its k-th moment is a finite sum over partition
coefficients c_coeff(i, j, gamma).  T is the limiting ratio of the sum of
squared claims to the squared sum.  All formulas here require the infinite
claim-mean regime gamma > 1 unless noted otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import mixing_laws, quadrature, tail_models
from .errors import DivergenceError, DomainError, UnsupportedError
from .mixing_laws import MixingLaw
from .tail_models import TailModel

_MAX_I = 20


@dataclass(frozen=True)
class PartitionCoefficient:
    i: int
    j: int
    gamma: float
    value: float

    @classmethod
    def compute(cls, i: int, j: int, gamma) -> "PartitionCoefficient":
        return cls(i, j, float(gamma), float(c_coeff(i, j, gamma)))


@dataclass(frozen=True)
class RatioMoment:
    s: int
    k: int
    gamma: float
    value: float

    @classmethod
    def compute(cls, s: int, k: int, gamma) -> "RatioMoment":
        return cls(s, k, float(gamma), float(ratio_moment(s, k, gamma)))


@lru_cache(maxsize=None)
def _partitions(i: int, j: int):
    """Multiplicity tuples (m_1..m_{i-j+1}) with sum m = j and sum l*m_l = i.

    Equivalently: partitions of i into exactly j parts, encoded by how many
    parts equal each size l.
    """
    length = i - j + 1
    out = []

    def rec(l: int, parts_left: int, weight_left: int, acc):
        if l > length:
            if parts_left == 0 and weight_left == 0:
                out.append(tuple(acc))
            return
        # part size l used m times; remaining parts must cover the rest
        max_m = min(parts_left, weight_left // l)
        for m in range(max_m + 1):
            rest_parts = parts_left - m
            rest_weight = weight_left - l * m
            # remaining parts each have size >= l+1 and <= length
            if rest_weight < rest_parts * (l + 1) or rest_weight > rest_parts * length:
                continue
            acc.append(m)
            rec(l + 1, rest_parts, rest_weight, acc)
            acc.pop()

    rec(1, j, i, [])
    return tuple(out)


def partition_count(i: int, j: int) -> int:
    """Number of partitions of i into exactly j parts."""
    return len(_partitions(i, j))


def c_coeff(i: int, j: int, gamma):
    """Partition coefficient: sum over partitions of i into j parts of
    i!/(prod m_l!) * prod (1/(l! (l*gamma - 1)))^{m_l}.

    Accepts float or Fraction gamma; the result type follows the input.
    """
    if not (1 <= j <= i):
        raise DomainError("need 1 <= j <= i")
    if i > _MAX_I:
        raise DomainError(f"i capped at {_MAX_I}")
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    one = Fraction(1) if isinstance(gamma, Fraction) else 1.0
    total = one * 0
    for mult in _partitions(i, j):
        term = one * math.factorial(i)
        for l, m in enumerate(mult, start=1):
            if m == 0:
                continue
            term /= math.factorial(m)
            term *= (one / (math.factorial(l) * (l * gamma - 1))) ** m
        total += term
    return total


def ratio_moment(s: int, k: int, gamma):
    """E{R_(s)^k} = 1 + sum_i C(k,i) sum_j (s+j)!/s! c_coeff(i,j,gamma)."""
    if s < 0 or k < 1:
        raise DomainError("need s >= 0 and k >= 1")
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    one = Fraction(1) if isinstance(gamma, Fraction) else 1.0
    total = one
    for i in range(1, k + 1):
        binom = math.comb(k, i)
        inner = one * 0
        ratio = 1  # (s+j)!/s! built as a running product, overflow-free
        for j in range(1, i + 1):
            ratio *= s + j
            inner += ratio * c_coeff(i, j, gamma)
        total += binom * inner
    return total


def ratio_variance(s: int, gamma: float) -> float:
    """Var{R_(s)} = (s+1) gamma^2 / ((gamma-1)^2 (2 gamma - 1))."""
    if s < 0:
        raise DomainError("s must be nonnegative")
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    g_form = (s + 1) * gamma ** 2 / ((gamma - 1.0) ** 2 * (2.0 * gamma - 1.0))
    a = 1.0 / gamma
    a_form = (s + 1) * a / ((2.0 - a) * (1.0 - a) ** 2)
    assert math.isclose(g_form, a_form, rel_tol=1e-14)
    return g_form


# ---------------------------------------------------------------------------
# the squared-sum ratio T and its correlation with R_(0)^2

def tinf_mean(alpha: float) -> float:
    """Limit mean of T: 1 - alpha, for alpha in (0,1)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return 1.0 - alpha


def tinf_variance(alpha: float) -> float:
    """Limit variance of T: alpha (1 - alpha) / 3."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return alpha * (1.0 - alpha) / 3.0


def r0sq_tinf_product_mean(gamma: float) -> float:
    """E{R_(0)^2 T} = 2/(2 - alpha) with alpha = 1/gamma."""
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    return 2.0 / (2.0 - 1.0 / gamma)


def r0sq_tinf_cov(gamma: float) -> float:
    """cov(R_(0)^2, T) = -2 gamma / ((gamma-1)(2 gamma-1))."""
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    return -2.0 * gamma / ((gamma - 1.0) * (2.0 * gamma - 1.0))


def r0sq_variance(gamma: float) -> float:
    """Var{R_(0)^2} in factored form (matches ratio_moment(0,4)-based value)."""
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    g = gamma
    return (4.0 * g ** 5 * (43.0 * g ** 2 - 7.0 * g - 6.0)
            / ((g - 1.0) ** 4 * (2.0 * g - 1.0) ** 2
               * (3.0 * g - 1.0) * (4.0 * g - 1.0)))


def correlation_r0sq_tinf(gamma: float) -> float:
    """corr(R_(0)^2, T) = -sqrt(3(g-1)(3g-1)(4g-1) / (g(43g^2-7g-6)))."""
    if gamma <= 1:
        raise DomainError("gamma must exceed 1")
    g = gamma
    return -math.sqrt(3.0 * (g - 1.0) * (3.0 * g - 1.0) * (4.0 * g - 1.0)
                      / (g * (43.0 * g ** 2 - 7.0 * g - 6.0)))


# ---------------------------------------------------------------------------
# finite-mean regime (alpha > 1) ratio/product means

def sum_over_max_mean(s: int, model: TailModel, mix: MixingLaw) -> float:
    """mu * Gamma(s - gamma + 1)/s! * E{Theta^(1+gamma)} for alpha > 1.

    This is the mean of the product of the normalized small-claim sum and
    the normalized (s+1)-th largest claim in the fixed-s limit.
    """
    if s < 0:
        raise DomainError("s must be nonnegative")
    if model.alpha <= 1.0:
        raise DomainError("requires alpha > 1")
    g = model.gamma
    moment = mixing_laws.theta_moment(mix, 1.0 + g)
    if math.isinf(moment):
        raise DivergenceError("E{Theta^(1+gamma)} diverges")
    mu = tail_models.mean(model)
    return mu * math.gamma(s - g + 1.0) / math.factorial(s) * moment


def max_over_sum_mean(model: TailModel, mix: MixingLaw, s: int = 0) -> float:
    """Mean share of the largest claim in the total: the limit of
    E{largest / total} for alpha > 1, as 1 - mu * double integral of
    exp(-u z^-gamma) q_2(z + u mu).
    """
    if s != 0:
        raise UnsupportedError("only s = 0 is supported")
    if model.alpha <= 1.0:
        raise DomainError("requires alpha > 1")
    g = model.gamma
    mu = tail_models.mean(model)

    def inner_at(zf: float) -> float:
        decay = zf ** -g
        res = quadrature.integrate(
            lambda uu: mixing_laws.q(mix, 2, zf + uu * mu) * np.exp(-uu * decay),
            0.0, math.inf, abs_tol=1e-11, rel_tol=1e-9)
        return res.value

    def outer(z_nodes):
        return np.array([inner_at(float(z)) for z in z_nodes])

    res = quadrature.integrate(outer, 0.0, math.inf,
                               abs_tol=1e-9, rel_tol=1e-7, max_evals=400_000)
    return 1.0 - mu * res.value


def mean_xi_plus_sigma(s: int, gamma: float, mix: MixingLaw) -> float:
    """E of (pivot + small-claim sum)/U(t) limit:
    Gamma(s - gamma + 1)/((gamma - 1) Gamma(s)) * E{Theta^gamma},
    finite for 1 < gamma < s + 1, +inf for gamma >= s + 1.
    """
    if s < 1:
        raise DomainError("s must be a positive integer")
    if gamma <= 1:
        raise DomainError("formula valid for gamma > 1 only")
    if gamma >= s + 1:
        return math.inf
    moment = mixing_laws.theta_moment(mix, gamma)
    if math.isinf(moment):
        return math.inf
    return math.gamma(s - gamma + 1.0) / ((gamma - 1.0) * math.gamma(s)) * moment


def centered_ratio_mean(s: int, gamma: float) -> float:
    """The printed algebraic form 1 + (s+1)/(gamma-1); domain gamma != 1."""
    if s < 0:
        raise DomainError("s must be nonnegative")
    if gamma == 1.0:
        raise DomainError("gamma = 1 is outside the domain")
    return 1.0 + (s + 1) / (gamma - 1.0)
