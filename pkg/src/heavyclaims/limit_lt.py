"""Limiting joint Laplace transforms of the claim-splitting triple.

Eight asymptotic regimes, indexed by the tail-index range of the claim law
and by how the number s of split-out top claims grows with the horizon:

==========  =============  ====================================================
alpha       s rule         normalization of (top sum, next largest, rest)
==========  =============  ====================================================
(0,1)       fixed s        (U(t), U(t), U(t))
(0,1)       s=[p(t)N(t)]   (U(t), U(1/p(t)), t p(t) U(1/p(t)))
(0,1)       s=[pN(t)]      (U(t), 1, t)
(1,inf)     fixed s        (U(t), U(t), t)
(1,inf)     s=[p(t)N(t)]   (t p(t) U(1/p(t)), U(1/p(t)), t)
(1,inf)     s=[pN(t)]      (t, 1, t)
(1,2)       fixed s        (U(t), U(t), U(t)), rest centered by (N-s-1) mean
(2,inf)     fixed s        (U(t), U(t), sqrt(t)), rest centered likewise
==========  =============  ====================================================

U is the tail quantile of the claim law.  The three inner integrals shared by
the fixed-s limits are exposed separately because they have closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mixing_laws, tail_models
from .errors import DispatchError, DomainError
from .mixing_laws import MixingLaw
from .quadrature import integrate, upper_incomplete_gamma
from .tail_models import TailModel

LT1 = "lt1"
GT1 = "gt1"
CTR12 = "ctr12"
CTR2 = "ctr2"

_ALPHA_RANGES = (LT1, GT1, CTR12, CTR2)


@dataclass(frozen=True)
class FixedS:
    s: int = 0

    def __post_init__(self):
        if self.s < 0 or self.s != int(self.s):
            raise DomainError("s must be a nonnegative integer")


@dataclass(frozen=True)
class VanishingP:
    """s grows like p(t) N(t) with p(t) -> 0 and t p(t) -> infinity."""


@dataclass(frozen=True)
class FixedP:
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError("p must lie in (0, 1)")


SRule = FixedS | VanishingP | FixedP


@dataclass(frozen=True)
class Regime:
    alpha_range: str
    s_rule: SRule

    def __post_init__(self):
        if self.alpha_range not in _ALPHA_RANGES:
            raise DispatchError(f"unknown alpha range {self.alpha_range!r}")
        if self.alpha_range in (CTR12, CTR2) and not isinstance(self.s_rule, FixedS):
            raise DispatchError("centered regimes are defined for fixed s only")

    @property
    def name(self) -> str:
        if isinstance(self.s_rule, FixedS):
            tag = "fixed-s"
        elif isinstance(self.s_rule, VanishingP):
            tag = "vanishing"
        else:
            tag = "fixed-p"
        return f"{self.alpha_range}-{tag}"


REGIME_NAMES = ("lt1-fixed-s", "lt1-vanishing", "lt1-fixed-p",
                "gt1-fixed-s", "gt1-vanishing", "gt1-fixed-p",
                "ctr12-fixed-s", "ctr2-fixed-s")


def regime_from_name(name: str, s: int = 0, p: float = 0.5) -> Regime:
    if name not in REGIME_NAMES:
        raise DispatchError(f"unknown regime {name!r}")
    head, _, tag = name.partition("-")
    if tag == "fixed-s":
        rule: SRule = FixedS(s)
    elif tag == "vanishing":
        rule = VanishingP()
    else:
        rule = FixedP(p)
    return Regime(head, rule)


def check_compatible(regime: Regime, model: TailModel) -> None:
    a = model.alpha
    ok = {LT1: 0.0 < a < 1.0, GT1: a > 1.0,
          CTR12: 1.0 < a < 2.0, CTR2: a > 2.0}[regime.alpha_range]
    if not ok:
        raise DispatchError(
            f"regime {regime.name} incompatible with alpha={a}")


def default_vanishing_p(t: float) -> float:
    """Default p(t) for the vanishing regimes: p(t)=t^{-1/2}."""
    return t ** -0.5


# ---------------------------------------------------------------------------
# inner integrals

def inner_tail_integral(c, alpha: float):
    """int_1^inf exp(-c eta) eta^{-1-alpha} d eta = c^alpha Gamma(-alpha, c)."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    c_arr = np.asarray(c, dtype=float)
    scalar = c_arr.ndim == 0
    c_arr = np.atleast_1d(c_arr)
    if np.any(c_arr < 0):
        raise DomainError("c must be nonnegative")
    out = np.full_like(c_arr, 1.0 / alpha)
    pos = (c_arr > 0) & np.isfinite(c_arr)
    if np.any(pos):
        cp = c_arr[pos]
        out[pos] = cp ** alpha * upper_incomplete_gamma(-alpha, cp)
    out[np.isinf(c_arr)] = 0.0
    return float(out[0]) if scalar else out


def inner_head_integral(c, alpha: float):
    """int_0^1 (1 - exp(-c eta)) eta^{-1-alpha} d eta for alpha in (0,1)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("head integral needs alpha in (0, 1)")
    c_arr = np.asarray(c, dtype=float)
    scalar = c_arr.ndim == 0
    c_arr = np.atleast_1d(c_arr)
    if np.any(c_arr < 0):
        raise DomainError("c must be nonnegative")
    out = np.zeros_like(c_arr)
    small = (c_arr > 0) & (c_arr <= 1.0)
    if np.any(small):
        out[small] = _head_series(c_arr[small], alpha)
    big = c_arr > 1.0
    if np.any(big):
        cb = c_arr[big]
        # split the full-line closed form c^a Gamma(1-a)/a at eta = 1
        out[big] = (cb ** alpha * math.gamma(1.0 - alpha) / alpha
                    - 1.0 / alpha + inner_tail_integral(cb, alpha))
    return float(out[0]) if scalar else out


def _head_series(c: np.ndarray, alpha: float) -> np.ndarray:
    acc = np.zeros_like(c)
    term = np.ones_like(c)
    for k in range(1, 26):
        term = term * c / k
        acc += term / (k - alpha) if k % 2 == 1 else -term / (k - alpha)
    return acc


def inner_centered_integral(c, alpha: float):
    """int_0^1 (exp(-c eta) - 1 + c eta) eta^{-1-alpha} d eta, alpha in (1,2)."""
    if not 1.0 < alpha < 2.0:
        raise DomainError("centered integral needs alpha in (1, 2)")
    c_arr = np.asarray(c, dtype=float)
    scalar = c_arr.ndim == 0
    c_arr = np.atleast_1d(c_arr)
    if np.any(c_arr < 0):
        raise DomainError("c must be nonnegative")
    out = np.zeros_like(c_arr)
    small = (c_arr > 0) & (c_arr <= 1.0)
    if np.any(small):
        out[small] = _centered_series(c_arr[small], alpha)
    big = c_arr > 1.0
    if np.any(big):
        cb = c_arr[big]
        out[big] = (cb ** alpha * math.gamma(-alpha) + 1.0 / alpha
                    - cb / (alpha - 1.0) - inner_tail_integral(cb, alpha))
    return float(out[0]) if scalar else out


def _centered_series(c: np.ndarray, alpha: float) -> np.ndarray:
    acc = np.zeros_like(c)
    term = c.copy()
    for k in range(2, 27):
        term = term * c / k
        acc += term / (k - alpha) if k % 2 == 0 else -term / (k - alpha)
    return acc


# ---------------------------------------------------------------------------
# regime dispatch

def lt_eval(regime: Regime, model: TailModel, mix: MixingLaw,
            u: float, v: float, w: float) -> float:
    """Limiting LT of the normalized triple under the given regime."""
    if min(u, v, w) < 0:
        raise DomainError("transform arguments must be nonnegative")
    check_compatible(regime, model)
    a = model.alpha
    g = model.gamma
    rule = regime.s_rule

    if isinstance(rule, FixedS):
        return _fixed_s_eval(regime, model, mix, rule.s, u, v, w)

    if regime.alpha_range == LT1:
        u_term = u ** a * math.gamma(1.0 - a) if u > 0 else 0.0
        if isinstance(rule, VanishingP):
            return math.exp(-v) * mixing_laws.q(mix, 0, u_term + w / (g - 1.0))
        x_p = tail_models.tail_quantile(model, 1.0 / rule.p)
        arg = u_term + w * tail_models.partial_mean_below(model, x_p)
        return math.exp(-v * x_p) * mixing_laws.q(mix, 0, arg)

    mu = tail_models.mean(model)
    if isinstance(rule, VanishingP):
        return math.exp(-v) * mixing_laws.q(mix, 0, u / (1.0 - g) + w * mu)
    x_p = tail_models.tail_quantile(model, 1.0 / rule.p)
    arg = (u * tail_models.partial_mean_above(model, x_p)
           + w * tail_models.partial_mean_below(model, x_p))
    return math.exp(-v * x_p) * mixing_laws.q(mix, 0, arg)


def _fixed_s_eval(regime, model, mix, s, u, v, w):
    a = model.alpha
    g = model.gamma

    if regime.alpha_range == LT1:
        def q_arg(z):
            if w == 0.0:
                return z
            c = w * z ** -g
            out = np.empty_like(z)
            small = c <= 1.0
            if np.any(small):
                out[small] = z[small] * (
                    1.0 + a * inner_head_integral(c[small], a))
            if np.any(~small):
                # regrouped so nothing blows up as z -> 0:
                # z(1 + a*I_head) = w^a Gamma(1-a) + a z I_tail(c)
                out[~small] = (w ** a * math.gamma(1.0 - a)
                               + a * z[~small] * inner_tail_integral(c[~small], a))
            return out
    elif regime.alpha_range == GT1:
        w_mu = w * tail_models.mean(model)

        def q_arg(z):
            return z + w_mu
    elif regime.alpha_range == CTR12:
        offset = a * w ** a * math.gamma(-a) if w > 0 else 0.0

        def q_arg(z):
            if w == 0.0:
                return z
            return a * z * inner_tail_integral(w * z ** -g, a) - offset
    else:
        half_ws = 0.5 * w * w * tail_models.variance(model)

        def q_arg(z):
            return z - half_ws

    fact = math.factorial(s)

    def integrand(z):
        val = mixing_laws.q(mix, s + 1, q_arg(z)) / fact
        if v > 0.0:
            val = val * np.exp(-v * z ** -g)
        if s > 0:
            val = val * (a * z * inner_tail_integral(u * z ** -g, a)) ** s
        return val

    with np.errstate(over="ignore", under="ignore"):
        res = integrate(integrand, 0.0, math.inf,
                        abs_tol=1e-10, rel_tol=1e-9, max_evals=400_000)
    return res.value


# ---------------------------------------------------------------------------
# normalization bookkeeping for the simulation harness

@dataclass(frozen=True)
class LimitTriple:
    """Normalizations that make simulated triples comparable with lt_eval."""
    regime_name: str
    top: str
    pivot: str
    bulk: str
    bulk_center: str | None = None


def normalization_descriptor(regime: Regime) -> LimitTriple:
    r = regime.alpha_range
    if isinstance(regime.s_rule, FixedS):
        if r == LT1:
            parts = ("U(t)", "U(t)", "U(t)")
        elif r == GT1:
            parts = ("U(t)", "U(t)", "t")
        elif r == CTR12:
            parts = ("U(t)", "U(t)", "U(t)")
        else:
            parts = ("U(t)", "U(t)", "sqrt(t)")
        center = "(N(t)-s-1)*mean" if r in (CTR12, CTR2) else None
        return LimitTriple(regime.name, *parts, bulk_center=center)
    if isinstance(regime.s_rule, VanishingP):
        if r == LT1:
            parts = ("U(t)", "U(1/p(t))", "t*p(t)*U(1/p(t))")
        else:
            parts = ("t*p(t)*U(1/p(t))", "U(1/p(t))", "t")
        return LimitTriple(regime.name, *parts)
    if r == LT1:
        parts = ("U(t)", "1", "t")
    else:
        parts = ("t", "1", "t")
    return LimitTriple(regime.name, *parts)


def numeric_normalizers(regime: Regime, model: TailModel, t: float,
                        p_of_t=None):
    """(top, pivot, bulk) scale factors at horizon t for this regime."""
    if t <= 0:
        raise DomainError("t must be positive")
    u_t = tail_models.tail_quantile(model, t)
    if isinstance(regime.s_rule, FixedS):
        r = regime.alpha_range
        if r == LT1 or r == CTR12:
            return u_t, u_t, u_t
        if r == GT1:
            return u_t, u_t, t
        return u_t, u_t, math.sqrt(t)
    if isinstance(regime.s_rule, VanishingP):
        p_t = (p_of_t or default_vanishing_p)(t)
        if not 0.0 < p_t < 1.0:
            raise DomainError("p(t) must lie in (0, 1)")
        u_p = tail_models.tail_quantile(model, 1.0 / p_t)
        if regime.alpha_range == LT1:
            return u_t, u_p, t * p_t * u_p
        return t * p_t * u_p, u_p, t
    if regime.alpha_range == LT1:
        return u_t, 1.0, t
    return t, 1.0, t
