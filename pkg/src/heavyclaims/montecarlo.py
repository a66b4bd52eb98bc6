"""Simulation engine: process paths, LePage limit draws, and convergence
reports against the limiting transforms.

Determinism contract: every bulk sampler derives one master seed from the
caller's generator and then seeds chunk c with SeedSequence((master, c)).
Aggregation uses only commutative sums, so results are bit-identical for a
given master seed no matter how chunks are scheduled.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import limit_lt, mixing_laws, tail_models
from .errors import DomainError
from .limit_lt import FixedP, FixedS, Regime, VanishingP
from .mixing_laws import MixingLaw
from .tail_models import TailModel

DROP = "drop"
MEAN_CORRECT = "mean_correct"

_CHUNK_ROWS = 250  # LePage draws processed per block; bounds memory at K=1e4


@dataclass(frozen=True)
class TripleSample:
    """One normalized draw of (top-s sum, (s+1)-th largest, remainder)."""
    lambda_part: float
    xi_part: float
    sigma_part: float


@dataclass(frozen=True)
class LePageConfig:
    K: int = 10_000
    tail_mode: str = MEAN_CORRECT

    def __post_init__(self):
        if self.K < 2:
            raise DomainError("K must be at least 2")
        if self.tail_mode not in (DROP, MEAN_CORRECT):
            raise DomainError(f"unknown tail mode {self.tail_mode!r}")


@dataclass(frozen=True)
class RatioStats:
    mean: float
    var: float
    stderr: float
    raw_moments: tuple  # E{R}, E{R^2}, E{R^3}, E{R^4}
    raw_stderrs: tuple


@dataclass(frozen=True)
class TInfStats:
    mean: float
    mean_stderr: float
    var: float
    var_stderr: float
    corr_with_r0_squared: float


@dataclass(frozen=True)
class ReportRow:
    t: float
    u: float
    v: float
    w: float
    empirical: float
    stderr: float
    limit: float
    gap: float


@dataclass(frozen=True)
class ConvergenceReport:
    regime_name: str
    rows: tuple
    median_gaps: tuple       # ((t, median gap), ...) in t_grid order
    median_stderrs: tuple    # ((t, median per-query stderr), ...)
    monotone: bool           # median gap strictly nonincreasing along t_grid
    flagged: bool            # gap increase beyond Monte-Carlo resolution
    resample_rates: tuple    # ((t, rate), ...)
    warnings: tuple


def _spawn_streams(rng, n: int):
    master = int(rng.integers(0, 2 ** 63 - 1))
    return [np.random.default_rng(np.random.SeedSequence((master, c)))
            for c in range(n)]


# ---------------------------------------------------------------------------
# finite-t process paths

def _effective_s(rule, n_claims: int, t: float) -> int:
    if isinstance(rule, FixedS):
        return rule.s
    if isinstance(rule, VanishingP):
        return int(limit_lt.default_vanishing_p(t) * n_claims)
    return int(rule.p * n_claims)


def sample_path_triples(model: TailModel, mix: MixingLaw, t: float,
                        regime: Regime, rng, n: int):
    """Draw n normalized path triples; returns (lam, xi, sig, resample_rate).

    Paths with too few claims to split (N < s_eff + 2) are resampled; their
    frequency is the returned rate.
    """
    limit_lt.check_compatible(regime, model)
    top_norm, pivot_norm, bulk_norm = limit_lt.numeric_normalizers(
        regime, model, t)
    centered = regime.alpha_range in (limit_lt.CTR12, limit_lt.CTR2)
    mu = tail_models.mean(model) if centered else 0.0

    lam = np.empty(n)
    xi = np.empty(n)
    sig = np.empty(n)
    accepted = 0
    attempts = 0
    while accepted < n:
        theta = mixing_laws.sample(mix, rng)
        n_claims = int(rng.poisson(theta * t))
        attempts += 1
        s_eff = _effective_s(regime.s_rule, n_claims, t)
        if n_claims < s_eff + 2:
            continue
        claims = tail_models.sample(model, rng, n_claims)
        total = claims.sum()
        part = np.partition(claims, n_claims - s_eff - 1)
        xi_raw = part[n_claims - s_eff - 1]
        lam_raw = part[n_claims - s_eff:].sum()
        sig_raw = total - lam_raw - xi_raw
        if centered:
            sig_raw -= (n_claims - s_eff - 1) * mu
        lam[accepted] = lam_raw / top_norm
        xi[accepted] = xi_raw / pivot_norm
        sig[accepted] = sig_raw / bulk_norm
        accepted += 1
    rate = 1.0 - n / attempts
    if rate > 0.01:
        warnings.warn(
            f"resampled {rate:.1%} of paths at t={t}; "
            "increase t for this regime", stacklevel=2)
    return lam, xi, sig, rate


def simulate_path_triple(model: TailModel, mix: MixingLaw, t: float,
                         regime: Regime, rng) -> TripleSample:
    lam, xi, sig, _ = sample_path_triples(model, mix, t, regime, rng, 1)
    return TripleSample(float(lam[0]), float(xi[0]), float(sig[0]))


# ---------------------------------------------------------------------------
# LePage series draws (the alpha < 1 limit law)

def _check_lepage(alpha: float, s: int, cfg: LePageConfig) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError("LePage series requires alpha in (0, 1)")
    if cfg.K < s + 2:
        raise DomainError("need K >= s + 2")


def _lepage_rows(alpha: float, s: int, cfg: LePageConfig, rng, m: int):
    """m draws; returns (lam, xi, sig) with tail handling applied to sig."""
    g = 1.0 / alpha
    gam = np.cumsum(rng.standard_exponential((m, cfg.K)), axis=1)
    z = gam ** -g
    lam = z[:, :s].sum(axis=1)
    xi = z[:, s]
    sig = z[:, s + 1:].sum(axis=1)
    if cfg.tail_mode == MEAN_CORRECT:
        sig = sig + gam[:, -1] ** (1.0 - g) / (g - 1.0)
    return lam, xi, sig


def simulate_lepage_triple(alpha: float, s: int, cfg: LePageConfig,
                           rng) -> TripleSample:
    _check_lepage(alpha, s, cfg)
    lam, xi, sig = _lepage_rows(alpha, s, cfg, rng, 1)
    return TripleSample(float(lam[0]), float(xi[0]), float(sig[0]))


def _batched(n_samples: int, n_batches: int = 100):
    """Yield (batch index, rows in batch) covering n_samples."""
    base, extra = divmod(n_samples, n_batches)
    for b in range(n_batches):
        rows = base + (1 if b < extra else 0)
        if rows:
            yield b, rows


def simulate_ratio_r(alpha: float, s: int, cfg: LePageConfig,
                     n_samples: int, rng) -> RatioStats:
    """Empirical moments of R_(s) = (xi + sigma)/xi over LePage draws."""
    _check_lepage(alpha, s, cfg)
    if n_samples < 100:
        raise DomainError("need at least 100 samples for batch errors")
    streams = _spawn_streams(rng, 100)
    power_sums = np.zeros(4)
    batch_means = []  # per batch: mean of R, R^2, R^3, R^4
    total = 0
    for b, rows in _batched(n_samples):
        stream = streams[b]
        bsums = np.zeros(4)
        done = 0
        while done < rows:
            m = min(_CHUNK_ROWS, rows - done)
            _, xi, sig = _lepage_rows(alpha, s, cfg, stream, m)
            r = 1.0 + sig / xi
            powers = r[:, None] ** np.arange(1, 5)[None, :]
            bsums += powers.sum(axis=0)
            done += m
        power_sums += bsums
        batch_means.append(bsums / rows)
        total += rows
    raw = power_sums / total
    bm = np.array(batch_means)
    raw_err = bm.std(axis=0, ddof=1) / math.sqrt(bm.shape[0])
    return RatioStats(
        mean=float(raw[0]),
        var=float(raw[1] - raw[0] ** 2),
        stderr=float(raw_err[0]),
        raw_moments=tuple(float(x) for x in raw),
        raw_stderrs=tuple(float(x) for x in raw_err),
    )


def simulate_t_infinity(alpha: float, cfg: LePageConfig,
                        n_samples: int, rng) -> TInfStats:
    """Paired draws of T = sum Z^2/(sum Z)^2 and R_(0) from one Gamma stream."""
    _check_lepage(alpha, 0, cfg)
    if n_samples < 100:
        raise DomainError("need at least 100 samples for batch errors")
    g = 1.0 / alpha
    streams = _spawn_streams(rng, 100)
    # accumulate sums of t, t^2, r2, r2^2, r2*t  (r2 = R_(0)^2)
    sums = np.zeros(5)
    batch_rows = []
    total = 0
    for b, rows in _batched(n_samples):
        stream = streams[b]
        bsums = np.zeros(5)
        done = 0
        while done < rows:
            m = min(_CHUNK_ROWS, rows - done)
            gam = np.cumsum(stream.standard_exponential((m, cfg.K)), axis=1)
            z = gam ** -g
            den = z.sum(axis=1)
            num = (z * z).sum(axis=1)
            if cfg.tail_mode == MEAN_CORRECT:
                den = den + gam[:, -1] ** (1.0 - g) / (g - 1.0)
                num = num + gam[:, -1] ** (1.0 - 2.0 * g) / (2.0 * g - 1.0)
            t_stat = num / den ** 2
            r2 = (den / z[:, 0]) ** 2
            bsums += np.array([t_stat.sum(), (t_stat ** 2).sum(),
                               r2.sum(), (r2 ** 2).sum(), (r2 * t_stat).sum()])
            done += m
        sums += bsums
        batch_rows.append((bsums / rows, rows))
        total += rows
    st, st2, sr2, sr22, scross = sums / total
    t_mean = st
    t_var = st2 - st ** 2
    r2_mean = sr2
    r2_var = sr22 - sr2 ** 2
    cov = scross - st * sr2
    corr = cov / math.sqrt(t_var * r2_var)
    means = np.array([row[0] for row in batch_rows])
    nb = means.shape[0]
    mean_err = means[:, 0].std(ddof=1) / math.sqrt(nb)
    batch_vars = means[:, 1] - means[:, 0] ** 2
    var_err = batch_vars.std(ddof=1) / math.sqrt(nb)
    return TInfStats(
        mean=float(t_mean), mean_stderr=float(mean_err),
        var=float(t_var), var_stderr=float(var_err),
        corr_with_r0_squared=float(corr),
    )


# ---------------------------------------------------------------------------
# empirical transforms and convergence reporting

def empirical_lt(samples, u: float, v: float, w: float):
    """(mean, stderr) of exp(-u*lam - v*xi - w*sig) over the samples."""
    if isinstance(samples, tuple) and len(samples) == 3:
        lam, xi, sig = (np.asarray(part, dtype=float) for part in samples)
    else:
        samples = list(samples)
        if not samples:
            raise DomainError("empirical_lt needs at least one sample")
        lam = np.array([s.lambda_part for s in samples])
        xi = np.array([s.xi_part for s in samples])
        sig = np.array([s.sigma_part for s in samples])
    if lam.size == 0:
        raise DomainError("empirical_lt needs at least one sample")
    vals = np.exp(-u * lam - v * xi - w * sig)
    est = float(vals.mean())
    err = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return est, err


def convergence_report(model: TailModel, mix: MixingLaw, regime: Regime,
                       t_grid, query_grid, n_per_t: int, rng) -> ConvergenceReport:
    """Empirical vs limiting LT over a (t, query) grid.

    The median absolute gap per t should shrink as t grows.  `monotone`
    records the raw comparison; once the bias falls below Monte-Carlo noise
    the raw medians jitter, so the report is only `flagged` when a median
    increases by more than three standard errors of the median statistic
    (1.2533 * stderr / sqrt(#queries), per-t terms added in quadrature).
    """
    t_grid = list(t_grid)
    query_grid = list(query_grid)
    if not t_grid or not query_grid:
        raise DomainError("grids must be nonempty")
    streams = _spawn_streams(rng, len(t_grid))
    limits_cache = {
        q: limit_lt.lt_eval(regime, model, mix, *q) for q in query_grid}
    rows = []
    med = []
    med_se = []
    rates = []
    notes = []
    for idx, t in enumerate(t_grid):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            lam, xi, sig, rate = sample_path_triples(
                model, mix, float(t), regime, streams[idx], n_per_t)
        notes.extend(str(c.message) for c in caught)
        rates.append((float(t), rate))
        gaps = []
        errs = []
        for q in query_grid:
            est, err = empirical_lt((lam, xi, sig), *q)
            gap = abs(est - limits_cache[q])
            rows.append(ReportRow(float(t), q[0], q[1], q[2],
                                  est, err, limits_cache[q], gap))
            gaps.append(gap)
            errs.append(err)
        med.append((float(t), float(np.median(gaps))))
        med_se.append((float(t), float(np.median(errs))))
    monotone = all(med[i + 1][1] <= med[i][1] for i in range(len(med) - 1))
    scale = 1.2533 / math.sqrt(len(query_grid))
    flagged = False
    for i in range(len(med) - 1):
        slack = 3.0 * scale * math.hypot(med_se[i][1], med_se[i + 1][1])
        if med[i + 1][1] > med[i][1] + slack:
            flagged = True
    return ConvergenceReport(
        regime_name=regime.name,
        rows=tuple(rows),
        median_gaps=tuple(med),
        median_stderrs=tuple(med_se),
        monotone=monotone,
        flagged=flagged,
        resample_rates=tuple(rates),
        warnings=tuple(notes),
    )
