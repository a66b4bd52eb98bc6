"""HTTP front end over the core library.

All computation lives here (the CLI is a thin client).  Validation failures
map to 400, numerical failures to 500 with the best estimate attached.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import (finite_t, limit_lt, mixing_laws, moments, montecarlo,
               quadrature, tail_models)
from .errors import (DispatchError, DivergenceError, DomainError,
                     NumericalError, UnsupportedError)
from .schemas import (CheckItem, CheckResponse, CorrRequest, CorrResponse,
                      LTExactRequest, LTExactResponse, LTLimitRequest,
                      LTLimitResponse, MomentRow, MomentsRequest,
                      MomentsResponse, ReportRowOut, SimulateRequest,
                      SimulateResponse)

app = FastAPI(title="heavyclaims", version="0.1.0")


def _validation_handler(request, exc):
    return JSONResponse(status_code=400,
                        content={"detail": str(exc), "kind": "validation"})


for _cls in (DomainError, DispatchError, UnsupportedError, DivergenceError):
    app.add_exception_handler(_cls, _validation_handler)


@app.exception_handler(NumericalError)
def _numerical_handler(request, exc):
    return JSONResponse(
        status_code=500,
        content={"detail": str(exc), "kind": "numerical",
                 "estimate": exc.estimate, "error_bound": exc.error_bound})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/lt/exact", response_model=LTExactResponse)
def lt_exact(req: LTExactRequest) -> LTExactResponse:
    spec = finite_t.CountingSpec(mix=req.mixing.build(), t=req.t)
    query = finite_t.LTQuery(u=req.u, v=req.v, w=req.w, s=req.s)
    res = finite_t.joint_lt_result(spec, req.model.build(), query)
    return LTExactResponse(value=res.value, abs_err_est=res.abs_err_est)


@app.post("/lt/limit", response_model=LTLimitResponse)
def lt_limit(req: LTLimitRequest) -> LTLimitResponse:
    regime = req.regime.build()
    value = limit_lt.lt_eval(regime, req.model.build(), req.mixing.build(),
                             req.u, req.v, req.w)
    desc = limit_lt.normalization_descriptor(regime)
    norms = {"top": desc.top, "pivot": desc.pivot, "bulk": desc.bulk}
    if desc.bulk_center is not None:
        norms["bulk_center"] = desc.bulk_center
    return LTLimitResponse(value=value, regime=regime.name, normalizers=norms)


@app.post("/moments", response_model=MomentsResponse)
def moments_table(req: MomentsRequest) -> MomentsResponse:
    if req.k_max < 1:
        raise DomainError("k_max must be at least 1")
    rows = []
    for s in req.s_values:
        for gamma in req.gammas:
            var = moments.ratio_variance(s, gamma)
            rho = moments.correlation_r0sq_tinf(gamma)
            for k in range(1, req.k_max + 1):
                rows.append(MomentRow(
                    s=s, k=k, gamma=gamma,
                    moment=float(moments.ratio_moment(s, k, gamma)),
                    var=var, rho=rho))
    return MomentsResponse(rows=rows)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    report = montecarlo.convergence_report(
        req.model.build(), req.mixing.build(), req.regime.build(),
        req.t_grid, [tuple(q) for q in req.queries], req.n_per_t,
        np.random.default_rng(req.seed))
    return SimulateResponse(
        regime=report.regime_name,
        rows=[ReportRowOut(t=r.t, u=r.u, v=r.v, w=r.w, empirical=r.empirical,
                           stderr=r.stderr, limit=r.limit, gap=r.gap)
              for r in report.rows],
        median_gaps=list(report.median_gaps),
        median_stderrs=list(report.median_stderrs),
        monotone=report.monotone,
        flagged=report.flagged,
        resample_rates=list(report.resample_rates),
        warnings=list(report.warnings),
    )


@app.post("/corr", response_model=CorrResponse)
def corr(req: CorrRequest) -> CorrResponse:
    cfg = montecarlo.LePageConfig(K=req.lepage_k, tail_mode=req.tail_mode)
    stats = montecarlo.simulate_t_infinity(
        req.alpha, cfg, req.n_samples, np.random.default_rng(req.seed))
    return CorrResponse(
        mean=stats.mean, mean_stderr=stats.mean_stderr,
        var=stats.var, var_stderr=stats.var_stderr,
        corr_with_r0_squared=stats.corr_with_r0_squared,
        analytic_mean=moments.tinf_mean(req.alpha),
        analytic_var=moments.tinf_variance(req.alpha),
        analytic_corr=moments.correlation_r0sq_tinf(1.0 / req.alpha),
    )


# ---------------------------------------------------------------------------
# built-in identity suite

def _check_limit_normalization() -> CheckItem:
    cases = [
        ("lt1-fixed-s", 0.5, mixing_laws.Degenerate(1.0), 1),
        ("gt1-fixed-s", 2.0, mixing_laws.GammaLaw(2.0, 2.0), 2),
        ("ctr12-fixed-s", 1.5, mixing_laws.Degenerate(2.0), 0),
        ("gt1-fixed-p", 3.0, mixing_laws.Discrete(((1.0, 0.5), (2.0, 0.5))), 0),
    ]
    worst = 0.0
    for name, alpha, mix, s in cases:
        regime = limit_lt.regime_from_name(name, s=s)
        model = tail_models.TailModel(alpha=alpha)
        worst = max(worst, abs(
            limit_lt.lt_eval(regime, model, mix, 0.0, 0.0, 0.0) - 1.0))
    return CheckItem(name="limit-normalization", passed=worst < 1e-8,
                     detail=f"max |LT(0,0,0) - 1| = {worst:.3e}")


def _check_exact_normalization() -> CheckItem:
    model = tail_models.TailModel(alpha=0.7)
    spec = finite_t.CountingSpec(mix=mixing_laws.GammaLaw(2.0, 2.0), t=10.0)
    val = finite_t.exact_joint_lt(spec, model,
                                  finite_t.LTQuery(0.0, 0.0, 0.0, s=1))
    gap = abs(val - 1.0)
    return CheckItem(name="exact-normalization", passed=gap < 1e-9,
                     detail=f"|Omega(0,0,0) - 1| = {gap:.3e} at t=10")


def _check_variance_identity() -> CheckItem:
    worst = 0.0
    for gamma in (1.5, 2.0, 3.0, 10.0):
        for s in (0, 1, 3):
            direct = moments.ratio_variance(s, gamma)
            recomposed = (moments.ratio_moment(s, 2, gamma)
                          - moments.ratio_moment(s, 1, gamma) ** 2)
            worst = max(worst, abs(direct - recomposed) / direct)
    return CheckItem(name="variance-identity", passed=worst < 1e-10,
                     detail=f"max rel gap Var vs m2-m1^2 = {worst:.3e}")


def _check_correlation_consistency() -> CheckItem:
    at2 = abs(moments.correlation_r0sq_tinf(2.0) + 0.5877029324770341)
    limit_gap = abs(moments.correlation_r0sq_tinf(1e6) + 6.0 / math.sqrt(43.0))
    passed = at2 < 1e-12 and limit_gap < 1e-5
    return CheckItem(
        name="correlation-consistency", passed=passed,
        detail=f"rho(2) gap {at2:.3e}; rho(inf) vs -6/sqrt(43) {limit_gap:.3e}")


def _check_q_identity() -> CheckItem:
    lhs, rhs = mixing_laws.verify_q_integral_identity(
        mixing_laws.GammaLaw(2.0, 1.5), 2, 1.25)
    rel = abs(lhs - rhs) / rhs
    return CheckItem(name="mixing-q-identity", passed=rel < 1e-6,
                     detail=f"moment identity rel gap = {rel:.3e}")


def _check_gamma_recurrence() -> CheckItem:
    worst = 0.0
    for a in (-2.5, -1.5, -0.5, 0.5, 1.5):
        for x in (0.1, 1.0, 10.0):
            lhs = quadrature.upper_incomplete_gamma(a + 1.0, x)
            rhs = (a * quadrature.upper_incomplete_gamma(a, x)
                   + x ** a * math.exp(-x))
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return CheckItem(name="incomplete-gamma-recurrence", passed=worst < 1e-12,
                     detail=f"max rel recurrence gap = {worst:.3e}")


def identity_suite() -> CheckResponse:
    checks = [
        _check_limit_normalization(),
        _check_exact_normalization(),
        _check_variance_identity(),
        _check_correlation_consistency(),
        _check_q_identity(),
        _check_gamma_recurrence(),
    ]
    return CheckResponse(all_passed=all(c.passed for c in checks),
                         checks=checks)


@app.get("/check", response_model=CheckResponse)
def check() -> CheckResponse:
    return identity_suite()
