"""Mixing laws for near-mixed-Poisson claim counts.

The central object is q(mix, r, w) = E{exp(-w * Theta) * Theta^r}: the
derivatives of the Laplace transform of the mixing variable Theta.  Everything
downstream (exact transforms, limit transforms, count pmfs) consumes the
mixing law only through q and the moments E{Theta^c}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import quadrature
from .errors import DivergenceError, DomainError


@dataclass(frozen=True)
class Degenerate:
    """Theta = theta almost surely (plain Poisson counts)."""
    theta: float = 1.0

    def __post_init__(self):
        if not self.theta > 0:
            raise DomainError("theta must be positive")

    def to_dict(self) -> dict:
        return {"kind": "degenerate", "theta": self.theta}


@dataclass(frozen=True)
class GammaLaw:
    """Theta ~ Gamma(shape, rate), giving negative-binomial counts."""
    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise DomainError("shape and rate must be positive")

    def to_dict(self) -> dict:
        return {"kind": "gamma", "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class Discrete:
    """Theta takes finitely many positive values."""
    atoms: tuple  # ((value, prob), ...)

    def __post_init__(self):
        atoms = tuple((float(v), float(p)) for v, p in self.atoms)
        if not atoms:
            raise DomainError("need at least one atom")
        if any(v <= 0 for v, _ in atoms):
            raise DomainError("atom values must be positive")
        if any(p < 0 for _, p in atoms):
            raise DomainError("atom probabilities must be nonnegative")
        total = sum(p for _, p in atoms)
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-12):
            raise DomainError(f"atom probabilities sum to {total}, not 1")
        object.__setattr__(self, "atoms", atoms)

    def to_dict(self) -> dict:
        return {"kind": "discrete", "atoms": [[v, p] for v, p in self.atoms]}


MixingLaw = Degenerate | GammaLaw | Discrete


def from_dict(spec: dict) -> MixingLaw:
    kind = spec.get("kind")
    if kind == "degenerate":
        return Degenerate(theta=float(spec.get("theta", 1.0)))
    if kind == "gamma":
        return GammaLaw(shape=float(spec["shape"]), rate=float(spec["rate"]))
    if kind == "discrete":
        return Discrete(atoms=tuple((v, p) for v, p in spec["atoms"]))
    raise DomainError(f"unknown mixing law kind {kind!r}")


def q(mix: MixingLaw, r: int, w):
    """E{exp(-w Theta) Theta^r} for integer r >= 0, vectorized in w.

    Negative w is allowed whenever the expectation converges; a Gamma law
    needs w > -rate and raises DivergenceError otherwise.
    """
    if r < 0 or r != int(r):
        raise DomainError("r must be a nonnegative integer")
    r = int(r)
    w_arr = np.asarray(w, dtype=float)
    scalar = w_arr.ndim == 0
    w_arr = np.atleast_1d(w_arr)

    if isinstance(mix, Degenerate):
        out = np.exp(-w_arr * mix.theta) * mix.theta ** r
    elif isinstance(mix, GammaLaw):
        if np.any(w_arr <= -mix.rate):
            raise DivergenceError("q diverges for w <= -rate under a Gamma mixing law")
        a, b = mix.shape, mix.rate
        # E{e^{-wT} T^r} = Gamma(a+r)/Gamma(a) * b^a / (b+w)^{a+r}
        out = np.exp(special.gammaln(a + r) - special.gammaln(a)
                     + a * math.log(b) - (a + r) * np.log(b + w_arr))
    elif isinstance(mix, Discrete):
        vals = np.array([v for v, _ in mix.atoms])
        probs = np.array([p for _, p in mix.atoms])
        out = np.exp(-np.multiply.outer(w_arr, vals)) @ (probs * vals ** r)
    else:
        raise DomainError(f"unsupported mixing law {type(mix).__name__}")
    return float(out[0]) if scalar else out


def theta_moment(mix: MixingLaw, c: float) -> float:
    """E{Theta^c} for real c; +inf when the moment diverges."""
    if isinstance(mix, Degenerate):
        return mix.theta ** c
    if isinstance(mix, GammaLaw):
        if mix.shape + c <= 0:
            return math.inf
        return math.exp(special.gammaln(mix.shape + c)
                        - special.gammaln(mix.shape) - c * math.log(mix.rate))
    if isinstance(mix, Discrete):
        return float(sum(p * v ** c for v, p in mix.atoms))
    raise DomainError(f"unsupported mixing law {type(mix).__name__}")


def theta_mean(mix: MixingLaw) -> float:
    return theta_moment(mix, 1.0)


def sample(mix: MixingLaw, rng, n: int | None = None):
    size = 1 if n is None else n
    if isinstance(mix, Degenerate):
        out = np.full(size, mix.theta)
    elif isinstance(mix, GammaLaw):
        out = rng.gamma(mix.shape, 1.0 / mix.rate, size)
    elif isinstance(mix, Discrete):
        vals = np.array([v for v, _ in mix.atoms])
        probs = np.array([p for _, p in mix.atoms])
        out = rng.choice(vals, size=size, p=probs / probs.sum())
    else:
        raise DomainError(f"unsupported mixing law {type(mix).__name__}")
    return float(out[0]) if n is None else out


def verify_q_integral_identity(mix: MixingLaw, r: int, beta: float):
    """Check int_0^inf w^{beta-1} q_r(w) dw = Gamma(beta) E{Theta^{r-beta}}.

    Returns (numerical lhs, analytic rhs); both are +inf when the moment on
    the right diverges.  Needs beta > 0.
    """
    if beta <= 0:
        raise DomainError("beta must be positive")
    rhs = math.gamma(beta) * theta_moment(mix, r - beta)
    if math.isinf(rhs):
        return math.inf, math.inf
    # substitute w = v^{1/beta}: integrand (1/beta) q_r(v^{1/beta}) is bounded
    # near 0 and inherits exponential/polynomial decay at infinity
    res = quadrature.integrate(
        lambda v: q(mix, r, v ** (1.0 / beta)) / beta,
        0.0, math.inf, abs_tol=1e-11, rel_tol=1e-9, max_evals=400_000)
    return res.value, rhs
