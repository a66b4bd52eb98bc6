"""Command-line front end.

Thin client: every subcommand (except `serve`) builds a JSON request and
POSTs it to the in-process service app, then formats the JSON reply as CSV
or JSON.  Config precedence: flags > config file > defaults; the seed
additionally honors the SEED env var between flag and file.

Exit codes: 0 success, 2 validation/usage error, 3 numerical error (or a
failing `check` suite).
"""

from __future__ import annotations

import argparse
import asyncio
import contextlib
import csv
import json
import os
import sys

import httpx

DEFAULT_SEED = 12345

_REGIME_NAMES = ("lt1-fixed-s", "lt1-vanishing", "lt1-fixed-p",
                 "gt1-fixed-s", "gt1-vanishing", "gt1-fixed-p",
                 "ctr12-fixed-s", "ctr2-fixed-s")


class _CliError(Exception):
    exit_code = 2


class _NumericalFailure(Exception):
    exit_code = 3


# ---------------------------------------------------------------------------
# spec-string parsing

def parse_mixing_spec(text: str) -> dict:
    """'degenerate:1' | 'gamma:2,2' | 'discrete:1,0.5;2,0.5' -> JSON dict."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "degenerate":
            return {"kind": "degenerate", "theta": float(rest or "1")}
        if kind == "gamma":
            shape, rate = (float(x) for x in rest.split(","))
            return {"kind": "gamma", "shape": shape, "rate": rate}
        if kind == "discrete":
            atoms = [[float(x) for x in pair.split(",")]
                     for pair in rest.split(";") if pair.strip()]
            return {"kind": "discrete", "atoms": atoms}
    except ValueError as exc:
        raise _CliError(f"bad mixing spec {text!r}: {exc}") from exc
    raise _CliError(f"unknown mixing kind {kind!r}")


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise _CliError(f"bad numeric list {text!r}") from exc


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise _CliError(f"bad integer list {text!r}") from exc


# ---------------------------------------------------------------------------
# config resolution

def _load_config_file(path) -> dict:
    if not path:
        return {}
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise _CliError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise _CliError("config file must hold a JSON object")
    return cfg


def _pick(flag, file_value, default):
    if flag is not None:
        return flag
    if file_value is not None:
        return file_value
    return default


def _resolve_seed(args, file_cfg: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise _CliError(f"SEED env var is not an integer: {env!r}") from exc
    if file_cfg.get("seed") is not None:
        return int(file_cfg["seed"])
    return DEFAULT_SEED


def _resolve_model(args, file_cfg: dict) -> dict:
    base = file_cfg.get("model") or {}
    alpha = _pick(getattr(args, "alpha", None), base.get("alpha"), None)
    if alpha is None:
        raise _CliError("--alpha is required (or set model.alpha in --config)")
    sv_base = base.get("sv") or {}
    sv = {"kind": _pick(getattr(args, "sv_kind", None),
                        sv_base.get("kind"), "constant"),
          "rho": _pick(getattr(args, "rho", None), sv_base.get("rho"), 0.0)}
    if sv_base.get("c") is not None:
        sv["c"] = sv_base["c"]
    return {"alpha": alpha,
            "x_min": _pick(getattr(args, "x_min", None),
                           base.get("x_min"), 1.0),
            "sv": sv}


def _resolve_mixing(args, file_cfg: dict) -> dict:
    if getattr(args, "mixing", None) is not None:
        return parse_mixing_spec(args.mixing)
    if file_cfg.get("mixing") is not None:
        return file_cfg["mixing"]
    return {"kind": "degenerate", "theta": 1.0}


def _resolve_regime(args, file_cfg: dict) -> dict:
    base = file_cfg.get("regime") or {}
    name = _pick(getattr(args, "regime", None), base.get("name"), None)
    if name is None:
        raise _CliError("--regime is required (or set regime.name in --config)")
    return {"name": name,
            "s": int(_pick(getattr(args, "s", None), base.get("s"), 0)),
            "p": float(_pick(getattr(args, "p", None), base.get("p"), 0.5))}


# ---------------------------------------------------------------------------
# transport and output helpers

def _call(method: str, path: str, payload=None) -> dict:
    from .service import app

    async def _go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://heavyclaims.local",
                                     timeout=None) as client:
            if method == "GET":
                return await client.get(path)
            return await client.post(path, json=payload)

    resp = asyncio.run(_go())
    if resp.status_code in (400, 422):
        detail = resp.json().get("detail")
        raise _CliError(f"validation error: {detail}")
    if resp.status_code >= 500:
        body = resp.json()
        raise _NumericalFailure(f"numerical error: {body.get('detail')}")
    return resp.json()


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as handle:
            yield handle


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _config_comment(cfg: dict) -> str:
    return "# config: " + json.dumps(cfg, sort_keys=True,
                                     separators=(",", ":"))


def _emit_csv(out, cfg: dict, header, rows, footer_comments=()):
    out.write(_config_comment(cfg) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    for line in footer_comments:
        out.write("# " + line + "\n")


def _emit_json(out, payload: dict):
    out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _emit_rows(args, cfg: dict, header, rows, footer_comments=()):
    fmt = getattr(args, "format", None) or "csv"
    with _open_out(args.output) as out:
        if fmt == "csv":
            _emit_csv(out, cfg, header, rows, footer_comments)
        else:
            _emit_json(out, {"config": cfg,
                             "rows": [dict(zip(header, row)) for row in rows]})


def _maybe_dump(args, cfg: dict) -> bool:
    if getattr(args, "dump_config", False):
        print(json.dumps(cfg, sort_keys=True, indent=2))
        return True
    return False


# ---------------------------------------------------------------------------
# subcommands

def _cmd_lt_exact(args) -> int:
    file_cfg = _load_config_file(args.config)
    cfg = {
        "command": "lt-exact",
        "model": _resolve_model(args, file_cfg),
        "mixing": _resolve_mixing(args, file_cfg),
        "t": _pick(args.t, file_cfg.get("t"), None),
        "s": int(_pick(args.s, file_cfg.get("s"), 0)),
        "u": float(_pick(args.u, file_cfg.get("u"), 0.0)),
        "v": float(_pick(args.v, file_cfg.get("v"), 0.0)),
        "w": float(_pick(args.w, file_cfg.get("w"), 0.0)),
    }
    if cfg["t"] is None:
        raise _CliError("--t is required")
    if _maybe_dump(args, cfg):
        return 0
    body = _call("POST", "/lt/exact", {
        "model": cfg["model"], "mixing": cfg["mixing"], "t": cfg["t"],
        "s": cfg["s"], "u": cfg["u"], "v": cfg["v"], "w": cfg["w"]})
    with _open_out(args.output) as out:
        _emit_json(out, {"value": body["value"],
                         "abs_err_est": body["abs_err_est"],
                         "config": cfg})
    return 0


def _cmd_lt_limit(args) -> int:
    file_cfg = _load_config_file(args.config)
    cfg = {
        "command": "lt-limit",
        "model": _resolve_model(args, file_cfg),
        "mixing": _resolve_mixing(args, file_cfg),
        "regime": _resolve_regime(args, file_cfg),
        "u": float(_pick(args.u, file_cfg.get("u"), 0.0)),
        "v": float(_pick(args.v, file_cfg.get("v"), 0.0)),
        "w": float(_pick(args.w, file_cfg.get("w"), 0.0)),
    }
    if _maybe_dump(args, cfg):
        return 0
    body = _call("POST", "/lt/limit", {
        "model": cfg["model"], "mixing": cfg["mixing"],
        "regime": cfg["regime"],
        "u": cfg["u"], "v": cfg["v"], "w": cfg["w"]})
    with _open_out(args.output) as out:
        _emit_json(out, {"value": body["value"], "regime": body["regime"],
                         "normalizers": body["normalizers"], "config": cfg})
    return 0


def _cmd_moments(args) -> int:
    file_cfg = _load_config_file(args.config)
    gammas = (_float_list(args.gamma) if args.gamma is not None
              else file_cfg.get("gammas"))
    if not gammas:
        raise _CliError("--gamma is required")
    s_values = (_int_list(args.s) if args.s is not None
                else file_cfg.get("s_values") or [0])
    k_max = int(_pick(args.k, file_cfg.get("k_max"), 4))
    cfg = {"command": "moments", "gammas": gammas, "s_values": s_values,
           "k_max": k_max}
    if _maybe_dump(args, cfg):
        return 0
    body = _call("POST", "/moments",
                 {k: v for k, v in cfg.items() if k != "command"})
    header = ["s", "k", "gamma", "E{R^k}", "Var", "rho"]
    rows = [[r["s"], r["k"], r["gamma"], r["moment"], r["var"], r["rho"]]
            for r in body["rows"]]
    _emit_rows(args, cfg, header, rows)
    return 0


def _sim_cfg(args, file_cfg: dict, t_grid) -> dict:
    grids = file_cfg.get("grids") or {}
    u = _float_list(args.u) if args.u is not None else grids.get("u") or [0.5]
    v = _float_list(args.v) if args.v is not None else grids.get("v") or [0.5]
    w = _float_list(args.w) if args.w is not None else grids.get("w") or [0.5]
    queries = [[uu, vv, ww] for uu in u for vv in v for ww in w]
    return {
        "command": None,
        "model": _resolve_model(args, file_cfg),
        "mixing": _resolve_mixing(args, file_cfg),
        "regime": _resolve_regime(args, file_cfg),
        "t_grid": t_grid,
        "queries": queries,
        "n_per_t": int(_pick(args.n, file_cfg.get("n_per_t"), 1000)),
        "seed": _resolve_seed(args, file_cfg),
    }


def _run_simulation(args, cfg: dict, footer: bool) -> int:
    payload = {k: v for k, v in cfg.items() if k != "command"}
    body = _call("POST", "/simulate", payload)
    header = ["t", "u", "v", "w", "empirical", "stderr", "limit", "gap"]
    rows = [[r["t"], r["u"], r["v"], r["w"], r["empirical"], r["stderr"],
             r["limit"], r["gap"]] for r in body["rows"]]
    comments = []
    if footer:
        gaps = " ".join(f"{t:g}:{g:.6g}" for t, g in body["median_gaps"])
        comments.append(f"median_gaps: {gaps}")
        comments.append(f"monotone: {body['monotone']}")
        comments.append(f"flagged: {body['flagged']} "
                        "(increase beyond 3 SE of the median)")
    for note in body["warnings"]:
        comments.append(f"warning: {note}")
    _emit_rows(args, cfg, header, rows, comments)
    return 0


def _cmd_simulate(args) -> int:
    file_cfg = _load_config_file(args.config)
    t = _pick(args.t, file_cfg.get("t"), None)
    if t is None:
        raise _CliError("--t is required")
    cfg = _sim_cfg(args, file_cfg, [float(t)])
    cfg["command"] = "simulate"
    if _maybe_dump(args, cfg):
        return 0
    return _run_simulation(args, cfg, footer=False)


def _cmd_converge(args) -> int:
    file_cfg = _load_config_file(args.config)
    grids = file_cfg.get("grids") or {}
    t_grid = (_float_list(args.t_grid) if args.t_grid is not None
              else grids.get("t"))
    if not t_grid:
        raise _CliError("--t-grid is required")
    cfg = _sim_cfg(args, file_cfg, t_grid)
    cfg["command"] = "converge"
    if _maybe_dump(args, cfg):
        return 0
    return _run_simulation(args, cfg, footer=True)


def _cmd_corr(args) -> int:
    file_cfg = _load_config_file(args.config)
    alpha = _pick(args.alpha, (file_cfg.get("model") or {}).get("alpha"), None)
    if alpha is None:
        raise _CliError("--alpha is required")
    cfg = {
        "command": "corr",
        "alpha": float(alpha),
        "n_samples": int(_pick(args.n, file_cfg.get("n_samples"), 10_000)),
        "lepage_k": int(_pick(args.k_terms, file_cfg.get("lepage_k"), 10_000)),
        "tail_mode": _pick(args.tail_mode, file_cfg.get("tail_mode"),
                           "mean_correct"),
        "seed": _resolve_seed(args, file_cfg),
    }
    if _maybe_dump(args, cfg):
        return 0
    body = _call("POST", "/corr", {k: v for k, v in cfg.items()
                                   if k != "command"})
    with _open_out(args.output) as out:
        _emit_json(out, body | {"config": cfg})
    return 0


def _cmd_check(args) -> int:
    body = _call("GET", "/check")
    for item in body["checks"]:
        verdict = "PASS" if item["passed"] else "FAIL"
        print(f"{verdict} {item['name']}: {item['detail']}")
    return 0 if body["all_passed"] else 3


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("heavyclaims.service:app", host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(sp, *, seed=False, fmt=False):
    sp.add_argument("--config", help="JSON config file mirroring RunConfig")
    sp.add_argument("--output", "-o", default="-",
                    help="output path ('-' for stdout)")
    sp.add_argument("--dump-config", action="store_true",
                    help="print the resolved config and exit")
    if seed:
        sp.add_argument("--seed", type=int,
                        help="master seed (beats SEED env and config file)")
    if fmt:
        sp.add_argument("--format", choices=("csv", "json"))


def _add_model(sp):
    sp.add_argument("--alpha", type=float, help="tail exponent")
    sp.add_argument("--x-min", type=float, help="left endpoint (default 1)")
    sp.add_argument("--sv-kind", choices=("constant", "log_power"))
    sp.add_argument("--rho", type=float,
                    help="log-power exponent (log_power only)")


def _add_mixing(sp):
    sp.add_argument("--mixing",
                    help="'degenerate:THETA' | 'gamma:SHAPE,RATE' | "
                         "'discrete:V,P;V,P;...'")


def _add_regime(sp):
    sp.add_argument("--regime", choices=_REGIME_NAMES)
    sp.add_argument("--s", type=int, help="number of top claims (fixed-s)")
    sp.add_argument("--p", type=float, help="top fraction (fixed-p)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heavyclaims",
        description="Joint transforms, moments, and simulations for the "
                    "largest claims of a heavy-tailed portfolio.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("lt-exact", help="exact finite-t joint transform")
    _add_common(sp)
    _add_model(sp)
    _add_mixing(sp)
    sp.add_argument("--t", type=float, help="time horizon")
    sp.add_argument("--s", type=int, help="number of top claims")
    sp.add_argument("--u", type=float)
    sp.add_argument("--v", type=float)
    sp.add_argument("--w", type=float)
    sp.set_defaults(func=_cmd_lt_exact)

    sp = sub.add_parser("lt-limit", help="limiting joint transform")
    _add_common(sp)
    _add_model(sp)
    _add_mixing(sp)
    _add_regime(sp)
    sp.add_argument("--u", type=float)
    sp.add_argument("--v", type=float)
    sp.add_argument("--w", type=float)
    sp.set_defaults(func=_cmd_lt_limit)

    sp = sub.add_parser("moments", help="ratio moment table")
    _add_common(sp, fmt=True)
    sp.add_argument("--gamma", help="comma-separated tail indices (> 1)")
    sp.add_argument("--s", help="comma-separated s values")
    sp.add_argument("--k", type=int, help="highest moment order (default 4)")
    sp.set_defaults(func=_cmd_moments)

    sp = sub.add_parser("simulate",
                        help="empirical vs limiting transform at one t")
    _add_common(sp, seed=True, fmt=True)
    _add_model(sp)
    _add_mixing(sp)
    _add_regime(sp)
    sp.add_argument("--t", type=float, help="time horizon")
    sp.add_argument("--u", help="comma-separated u grid")
    sp.add_argument("--v", help="comma-separated v grid")
    sp.add_argument("--w", help="comma-separated w grid")
    sp.add_argument("--n", type=int, help="paths per t (default 1000)")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("converge", help="convergence report over a t grid")
    _add_common(sp, seed=True, fmt=True)
    _add_model(sp)
    _add_mixing(sp)
    _add_regime(sp)
    sp.add_argument("--t-grid", help="comma-separated t values")
    sp.add_argument("--u", help="comma-separated u grid")
    sp.add_argument("--v", help="comma-separated v grid")
    sp.add_argument("--w", help="comma-separated w grid")
    sp.add_argument("--n", type=int, help="paths per t (default 1000)")
    sp.set_defaults(func=_cmd_converge)

    sp = sub.add_parser("corr",
                        help="paired T/R ratio simulation vs closed forms")
    _add_common(sp, seed=True)
    sp.add_argument("--alpha", type=float, help="tail exponent in (0,1)")
    sp.add_argument("--n", type=int, help="number of draws (default 10000)")
    sp.add_argument("--k-terms", type=int,
                    help="LePage truncation (default 10000)")
    sp.add_argument("--tail-mode", choices=("drop", "mean_correct"))
    sp.set_defaults(func=_cmd_corr)

    sp = sub.add_parser("check", help="run the built-in identity suite")
    sp.set_defaults(func=_cmd_check)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
