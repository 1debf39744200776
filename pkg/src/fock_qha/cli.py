"""Command-line front end, run as ``python -m fock_qha``.

Subcommands: ``phi-table``, ``verify``, ``convergence`` and ``c-pi``.  Every
output file carries the effective configuration, and files are written
atomically.  Exit codes: 0 when every non-advisory check passed, 1 when one
failed, 2 for invalid input, 3 when a prerequisite norm did not converge.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import fields, replace
from pathlib import Path

from .fock_core import BasisTruncation
from .operators import gaussian_toeplitz, heat_semigroup, semigroup_trace_norm
from .spectral import convergence_table, spectral_summary
from .symbols import AdmissibilityError, constant_symbol, heat_kernel, oscillatory_symbol, radial_polynomial, smooth_bump
from .verify import (
    SUITES,
    RunConfig,
    UnconvergedError,
    atomic_write_text,
    check_bc_reconstruction,
    check_bc_upper,
    check_compactness_flow,
    check_schatten,
    estimate_C_pi,
    run_suite,
    toeplitz_for,
    write_reports,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNCONVERGED = 0, 1, 2, 3
SYMBOL_NAMES = ("gaussian", "oscillatory", "bump", "constant", "radial")


def _floats(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            out.append(math.inf if tok.lower() in ("inf", "infinity") else float(tok))
    return out


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="complex dimension (default 1)")
    common.add_argument("--deg", type=int, help="truncation degree K (default 32)")
    common.add_argument("--quad", type=int, help="Gauss-Hermite order Q per real axis (default 64)")
    common.add_argument("--tol", type=float, help="pass/fail tolerance (default 1e-7)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--config", help="JSON file with RunConfig fields; flags take precedence")

    parser = argparse.ArgumentParser(prog="python -m fock_qha", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi-table", parents=[common], help="trace norms of the heat semigroup")
    p.add_argument("--t", default="-0.4,-0.25,-0.1,0,0.5,1,3", help="comma-separated t values")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--symbol", choices=SYMBOL_NAMES, help="check one symbol instead of the default family")
    p.add_argument("--xi", default="1", help="Gaussian parameter, e.g. 1 or 0.5+0.5j")
    p.add_argument("--theta", type=float, default=2 * math.pi, help="frequency of the oscillatory symbol")
    p.add_argument("--t", help="comma-separated t values")
    p.add_argument("--p", help="comma-separated Schatten exponents")

    p = sub.add_parser("convergence", parents=[common], help="norms across truncation degrees")
    p.add_argument("--symbol", choices=SYMBOL_NAMES + ("semigroup",), default="semigroup")
    p.add_argument("--xi", default="1")
    p.add_argument("--theta", type=float, default=2 * math.pi)
    p.add_argument("--t", default="1", help="semigroup parameter")
    p.add_argument("--p", default="1,2", help="Schatten exponents")
    p.add_argument("--Ks", default="8,16,24,32", help="comma-separated increasing degrees")

    p = sub.add_parser("c-pi", parents=[common], help="empirical lower bound for C_pi")
    p.add_argument("--p", default="1,2,4,inf", help="Schatten exponents")
    return parser


def effective_config(args) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    cfg = RunConfig()
    if args.config:
        data = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        cfg = replace(cfg, **data)
    flags = {"n": args.n, "K": args.deg, "Q": args.quad, "tol": args.tol}
    return replace(cfg, **{k: v for k, v in flags.items() if v is not None})


def _symbol(args, n: int):
    name = args.symbol
    if name == "gaussian":
        return heat_kernel(complex(args.xi.replace(" ", "")), n)
    if name == "oscillatory":
        return oscillatory_symbol(args.theta, n)
    if name == "bump":
        return smooth_bump(n=n)
    if name == "constant":
        return constant_symbol(1.0, n)
    if name == "radial":
        return radial_polynomial(1, n)
    raise ValueError(f"unknown symbol {name!r}")


def _cell(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _write_table(rows: list[dict], cfg: RunConfig, path: Path, fmt: str, extra: dict | None = None) -> Path:
    meta = dict(cfg.to_dict(), **(extra or {}))
    if fmt == "json":
        text = json.dumps({"config": meta, "rows": rows}, sort_keys=True, indent=1) + "\n"
        return atomic_write_text(path.with_suffix(".json"), text)
    cols = []
    for r in rows:
        cols += [c for c in r if c not in cols]
    lines = ["# config: " + json.dumps(meta, sort_keys=True), ",".join(cols)]
    for r in rows:
        lines.append(",".join(_cell(r.get(c, "")) for c in cols))
    return atomic_write_text(path.with_suffix(".csv"), "\n".join(lines) + "\n")


def cmd_phi_table(args, cfg: RunConfig) -> int:
    ts = _floats(args.t)
    K = args.deg if args.deg is not None else cfg.spectral_K
    rows = []
    for t in ts:
        try:
            op = heat_semigroup(t, BasisTruncation(cfg.n, K))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        summ = spectral_summary(op, ps=(1,))
        closed = semigroup_trace_norm(t, cfg.n)
        rows.append({"t": float(t), "closed_trace_norm": float(closed), "numeric_trace_norm": summ.schatten[1],
                     "op_norm": summ.op_norm, "deficit": float(closed - summ.schatten[1])})
    path = _write_table(rows, cfg, Path(args.out) / "phi_table", args.format, {"K_table": K})
    for r in rows:
        print(f"t={r['t']:<8g} closed={r['closed_trace_norm']:.12g} numeric={r['numeric_trace_norm']:.12g}")
    print(f"wrote {path}")
    return EXIT_OK


def _symbol_reports(suite: str, a, args, cfg: RunConfig):
    ts = _floats(args.t) if args.t else None
    if suite == "bc":
        reports = []
        for t in ts or (0.6, 0.75, 1.0, 1.5, 2.0, 0.1, 0.25, 0.4):
            reports.append(check_bc_upper(a, t, cfg) if t > 0.5 else check_bc_reconstruction(a, t, cfg))
        return reports
    if suite == "schatten":
        ps = _floats(args.p) if args.p else (1, 2, math.inf)
        return [check_schatten(a, p, t, cfg) for p in ps for t in (ts or (0.25, 0.75, 1.0))]
    if suite == "compactness":
        return [check_compactness_flow(a, config=cfg)]
    return run_suite(suite, cfg, symbols=[a])


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.symbol:
        reports = _symbol_reports(args.suite, _symbol(args, cfg.n), args, cfg)
    else:
        reports = run_suite(args.suite, cfg)
    out = Path(args.out)
    path = write_reports(reports, out / f"verify_{args.suite}.{args.format}", args.format)
    failed = [r for r in reports if not r.passed and not r.advisory]
    summary = {"config": cfg.to_dict(), "suite": args.suite, "checks": len(reports), "failed": len(failed),
               "passed": not failed, "report": path.name}
    atomic_write_text(out / f"verify_{args.suite}_summary.json", json.dumps(summary, sort_keys=True, indent=1) + "\n")
    for r in reports:
        print(r.summary_line())
    print(f"wrote {path}")
    if any(r.notes.get("unconverged") for r in failed):
        return EXIT_UNCONVERGED
    return EXIT_FAIL if failed else EXIT_OK


def cmd_convergence(args, cfg: RunConfig) -> int:
    Ks = _ints(args.Ks)
    ps = _floats(args.p)
    n = cfg.n
    if args.symbol == "semigroup":
        t = _floats(args.t)[0]
        builder = lambda K: heat_semigroup(t, BasisTruncation(n, K))  # noqa: E731
        label = {"target": "semigroup", "t": t}
    elif args.symbol == "gaussian":
        xi = complex(args.xi.replace(" ", ""))
        builder = lambda K: gaussian_toeplitz(xi, BasisTruncation(n, K))  # noqa: E731
        label = {"target": "gaussian", "xi": [xi.real, xi.imag]}
    else:
        a = _symbol(args, n)
        builder = lambda K: toeplitz_for(a, BasisTruncation(n, K), cfg)  # noqa: E731
        label = {"target": a.name}
    tab = convergence_table(builder, Ks, ps)
    label["op_norm_growth"] = tab.growth("op_norm")
    rows = [{k: (float(v) if k != "K" else v) for k, v in r.items()} for r in tab.rows()]
    path = _write_table(rows, cfg, Path(args.out) / "convergence", args.format, label)
    for r in rows:
        print(f"K={r['K']:<4d} op_norm={r['op_norm']:.12g}")
    print(f"op_norm: {label['op_norm_growth']}; wrote {path}")
    return EXIT_OK


def cmd_c_pi(args, cfg: RunConfig) -> int:
    est, rep = estimate_C_pi(ps=_floats(args.p), config=cfg)
    out = Path(args.out)
    path = write_reports([rep], out / f"c_pi.{args.format}", args.format)
    rows = [{k: (v if not isinstance(v, float) else float(v)) for k, v in s.items()} for s in rep.notes["samples"]]
    _write_table(rows, cfg, out / "c_pi_samples", "csv")
    print(f"empirical lower bound for C_pi: {est:.12g} ({len(rows)} samples); wrote {path}")
    return EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {"phi-table": cmd_phi_table, "verify": cmd_verify, "convergence": cmd_convergence, "c-pi": cmd_c_pi}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        return COMMANDS[args.command](args, cfg)
    except UnconvergedError as exc:
        print(f"unconverged: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except (ValueError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
