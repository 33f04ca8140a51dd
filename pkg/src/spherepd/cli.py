"""Batch front end.

Subcommands cover each operation family: eval, coeffs, schoenberg, bochner,
gram, decompose, f-ell, conjecture-sweep, bounds-audit, converse.  Kernels
are given in a mini-language `kind:key=val,...` with parentheses for
nesting, e.g.

    trunc-power:theta=1,delta=2
    scaled:theta=0.5,inner=(trunc-power:theta=1,delta=2)
    sinc-power:d=3,inner=(trunc-power:theta=1,delta=2)
    tabulated:path=profile.csv,interpolation=cubic
    cos

Exit codes: 0 all checks pass, 1 mathematical finding (negative
coefficient, failed audit, nonpositive sweep cell), 2 numerical
non-convergence, 3 configuration error.  Every output embeds the config
hash, seed, and version, so a run can be reproduced from its own header.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .errors import ConfigError
from .kernels import (
    Dimension,
    Kernel,
    Scaled,
    SincPower,
    Tabulated,
    TruncatedPower,
)
from .positivity import (
    Euclidean,
    Sphere,
    bochner_test,
    converse_check,
    gegenbauer_coefficients,
    gram_oracle,
    schoenberg_test,
)
from .decomposition import f_ell_coeffs
from .conjecture import (
    INEQUALITY_IDS,
    SweepConfig,
    bounds_audit,
    d2_decomposition,
    default_grid,
    sweep,
    theta_threshold,
)

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_NONCONVERGED = 2
EXIT_CONFIG = 3


# ---------------------------------------------------------------------------
# kernel mini-language


def _split_top_level(text: str, sep: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ConfigError(f"unbalanced parentheses in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ConfigError(f"unbalanced parentheses in {text!r}")
    parts.append("".join(cur))
    return parts


def parse_kernel(text: str) -> Kernel:
    """Parse the kernel mini-language into a kernel object."""
    text = text.strip()
    if text == "cos":
        nodes = np.linspace(0.0, math.pi, 16385)
        return Tabulated(nodes=nodes, values=np.cos(nodes))
    if ":" not in text:
        raise ConfigError(f"malformed kernel spec {text!r}")
    kind, _, body = text.partition(":")
    kind = kind.strip()
    kwargs = {}
    for item in _split_top_level(body, ","):
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"expected key=value in kernel spec, got {item!r}")
        key, _, val = item.partition("=")
        kwargs[key.strip()] = val.strip()

    def fnum(key):
        try:
            return float(kwargs[key])
        except KeyError:
            raise ConfigError(f"kernel {kind!r} needs parameter {key!r}")
        except ValueError:
            raise ConfigError(f"parameter {key!r} of {kind!r} is not a number")

    try:
        if kind == "trunc-power":
            return TruncatedPower(theta=fnum("theta"), delta=fnum("delta"))
        if kind == "scaled":
            inner = kwargs.get("inner", "")
            if not (inner.startswith("(") and inner.endswith(")")):
                raise ConfigError("scaled: inner must be parenthesized")
            return Scaled(inner=parse_kernel(inner[1:-1]), theta=fnum("theta"))
        if kind == "sinc-power":
            inner = kwargs.get("inner", "")
            if not (inner.startswith("(") and inner.endswith(")")):
                raise ConfigError("sinc-power: inner must be parenthesized")
            return SincPower(inner=parse_kernel(inner[1:-1]), d=int(fnum("d")))
        if kind == "tabulated":
            path = kwargs.get("path")
            if path is None:
                raise ConfigError("tabulated: needs path=FILE with two columns")
            data = np.loadtxt(path, delimiter=",", ndmin=2)
            return Tabulated(
                nodes=data[:, 0],
                values=data[:, 1],
                interpolation=kwargs.get("interpolation", "cubic"),
            )
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad kernel spec {text!r}: {exc}") from exc
    raise ConfigError(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# config file (flat key = value lines; '#' comments)


def read_config_file(path: str) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


@dataclass
class RunConfig:
    """Resolved parameters of one CLI run."""

    command: str
    kernel: Optional[str] = None
    d: int = 2
    nmax: int = 100
    tol: float = 1e-10
    seed: int = 12345
    max_evals: int = 1_000_000
    grading_depth: int = 40
    fmt: str = "csv"
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def canonical(self) -> str:
        payload = asdict(self)
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _header_lines(cfg: RunConfig) -> list:
    return [
        f"# version={__version__}",
        f"# seed={cfg.seed}",
        f"# config={cfg.canonical()}",
        f"# config_hash={cfg.config_hash()}",
    ]


def _write_csv(cfg: RunConfig, columns: list, rows: list, stream) -> None:
    for line in _header_lines(cfg):
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)


def _write_json(cfg: RunConfig, payload: dict, stream) -> None:
    doc = {
        "version": __version__,
        "seed": cfg.seed,
        "config": json.loads(cfg.canonical()),
        "config_hash": cfg.config_hash(),
        "result": payload,
    }
    json.dump(doc, stream, indent=2, sort_keys=True, default=_json_default)
    stream.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit(cfg: RunConfig, columns, rows, payload) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            if cfg.fmt == "csv":
                _write_csv(cfg, columns, rows, fh)
            else:
                _write_json(cfg, payload, fh)
    else:
        if cfg.fmt == "csv":
            _write_csv(cfg, columns, rows, sys.stdout)
        else:
            _write_json(cfg, payload, sys.stdout)


# ---------------------------------------------------------------------------
# subcommand implementations; each returns an exit code


def _cmd_eval(cfg: RunConfig, kernel: Kernel) -> int:
    upper = cfg.extra.get("t_max", max(kernel.support_end, 1e-6))
    grid = np.linspace(0.0, float(upper), int(cfg.extra.get("t_points", 201)))
    vals = np.asarray(kernel(grid), dtype=float)
    rows = [(f"{t:.17g}", f"{v:.17g}") for t, v in zip(grid, vals)]
    _emit(cfg, ["t", "value"], rows, {"t": grid, "value": vals})
    return EXIT_OK


def _cmd_coeffs(cfg: RunConfig, kernel: Kernel) -> int:
    series = gegenbauer_coefficients(kernel, Dimension(cfg.d), cfg.nmax, tol=cfg.tol)
    rows = [
        (n, f"{a:.17g}", f"{e:.3g}")
        for n, (a, e) in enumerate(zip(series.coefficients, series.per_coeff_error))
    ]
    payload = {
        "coefficients": series.coefficients,
        "per_coeff_error": series.per_coeff_error,
        "weighted_partial_sum": series.weighted_partial_sum,
    }
    _emit(cfg, ["n", "a_n", "abs_error"], rows, payload)
    return EXIT_OK if series.converged else EXIT_NONCONVERGED


def _cmd_schoenberg(cfg: RunConfig, kernel: Kernel) -> int:
    series = gegenbauer_coefficients(kernel, Dimension(cfg.d), cfg.nmax, tol=cfg.tol)
    verdict = schoenberg_test(series)
    payload = verdict.to_json()
    rows = [(k, json.dumps(v, default=_json_default)) for k, v in payload.items()]
    _emit(cfg, ["field", "value"], rows, payload)
    if not series.converged or verdict.status == "Inconclusive":
        return EXIT_NONCONVERGED
    return EXIT_FINDING if verdict.status == "NotPD" else EXIT_OK


def _cmd_bochner(cfg: RunConfig, kernel: Kernel) -> int:
    xi_max = float(cfg.extra.get("xi_max", 60.0))
    xi_n = int(cfg.extra.get("xi_points", 200))
    grid = np.linspace(xi_max / xi_n, xi_max, xi_n)
    verdict = bochner_test(kernel, Dimension(cfg.d), grid, tol=cfg.tol)
    payload = verdict.to_json()
    rows = [(k, json.dumps(v, default=_json_default)) for k, v in payload.items()]
    _emit(cfg, ["field", "value"], rows, payload)
    return EXIT_FINDING if verdict.status == "NotPD" else EXIT_OK


def _cmd_gram(cfg: RunConfig, kernel: Kernel) -> int:
    space_name = cfg.extra.get("space", "sphere")
    space = Sphere(cfg.d) if space_name == "sphere" else Euclidean(cfg.d)
    n_points = int(cfg.extra.get("points", 200))
    trials = int(cfg.extra.get("trials", 20))
    min_eig, verdict = gram_oracle(kernel, space, n_points, trials, cfg.seed)
    payload = verdict.to_json()
    payload["min_eigenvalue"] = min_eig
    if isinstance(payload.get("witness"), dict):
        payload["witness"] = {
            k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in payload["witness"].items()
        }
    rows = [("min_eigenvalue", f"{min_eig:.17g}"), ("status", verdict.status)]
    _emit(cfg, ["field", "value"], rows, payload)
    return EXIT_FINDING if verdict.status == "NotPD" else EXIT_OK


def _cmd_decompose(cfg: RunConfig, kernel) -> int:
    n_max = cfg.nmax
    thetas = cfg.extra.get("theta_grid")
    if thetas is None:
        thetas = [0.1, 0.5, 1.0, 1.5]
    rows, payload_rows = [], []
    worst = 0.0
    for n in range(1, n_max + 1):
        for theta in thetas:
            if theta > math.pi / 2.0:
                continue
            dec = d2_decomposition(n, theta)
            rel = dec.identity_residual / max(dec.term_scale(), 1e-300)
            worst = max(worst, rel)
            rows.append(
                (n, f"{theta:.6g}", f"{dec.A_n:.17g}", f"{dec.I_n1:.17g}",
                 f"{dec.R_n1:.17g}", f"{dec.R_n2:.17g}", f"{dec.R_n3:.17g}",
                 f"{rel:.3g}")
            )
            payload_rows.append(asdict(dec))
    _emit(
        cfg,
        ["n", "theta", "A_n", "I_n1", "R_n1", "R_n2", "R_n3", "rel_residual"],
        rows,
        {"rows": payload_rows, "worst_rel_residual": worst},
    )
    return EXIT_OK if worst <= 1e-8 else EXIT_FINDING


def _cmd_f_ell(cfg: RunConfig, kernel) -> int:
    lam = int(cfg.extra.get("lam", max(1, (cfg.d - 1) // 2)))
    rows, payload = [], {}
    for ell in range(1, lam + 1):
        table = f_ell_coeffs(lam, ell)
        for (j, k), c in sorted(table.alpha.items()):
            rows.append((lam, ell, j, k, c))
        payload[str(ell)] = {f"{j},{k}": c for (j, k), c in sorted(table.alpha.items())}
    _emit(cfg, ["lambda", "ell", "j", "k", "alpha"], rows, payload)
    return EXIT_OK


def _cmd_sweep(cfg: RunConfig, kernel) -> int:
    delta = float(cfg.extra.get("delta", (cfg.d + 1) / 2.0))
    thetas = cfg.extra.get("theta_grid")
    if thetas is None:
        thetas = [k * math.pi / 64.0 for k in range(1, 64)]
    report = sweep(SweepConfig(cfg.d, delta, cfg.nmax, tuple(thetas)))
    rows = [
        (c.n, f"{c.theta:.17g}", f"{c.value:.17g}", f"{c.abs_error:.3g}", c.guarantee)
        for c in report.cells
    ]
    payload = {
        "min_value": report.min_value,
        "argmin": {"n": report.argmin[0], "theta": report.argmin[1]},
        "failures": [asdict(c) for c in report.failures],
        "threshold": asdict(theta_threshold()),
    }
    _emit(cfg, ["n", "theta", "value", "abs_error", "guarantee"], rows, payload)
    return EXIT_OK if not report.failures else EXIT_FINDING


def _cmd_bounds_audit(cfg: RunConfig, kernel) -> int:
    ident = cfg.extra.get("id", "ALL")
    ids = INEQUALITY_IDS if ident == "ALL" else (ident,)
    rows, payload, ok = [], {}, True
    for one in ids:
        if one not in INEQUALITY_IDS:
            raise ConfigError(f"unknown inequality id {one!r}")
        report = bounds_audit(one, default_grid(one))
        ok = ok and report.all_pass
        payload[one] = {
            "all_pass": report.all_pass,
            "n_rows": len(report.rows),
            "n_skipped": report.n_skipped,
        }
        for r in report.rows:
            rows.append(
                (one, json.dumps(r.inputs), f"{r.lhs:.17g}", f"{r.rhs:.17g}",
                 f"{r.margin:.6g}", r.passed, r.skipped, r.note)
            )
    _emit(
        cfg,
        ["inequality", "inputs", "lhs", "rhs", "margin", "passed", "skipped", "note"],
        rows,
        payload,
    )
    return EXIT_OK if ok else EXIT_FINDING


def _cmd_converse(cfg: RunConfig, kernel: Kernel) -> int:
    x = float(cfg.extra.get("x", 5.0))
    n_list = cfg.extra.get("n_list", [50, 100, 200, 400])
    report = converse_check(kernel, cfg.d, x, n_list)
    rows = [(n, f"{s:.17g}", f"{gap:.17g}") for n, s, gap in report.rows]
    payload = {
        "target": report.target,
        "rows": report.rows,
        "gaps_decreasing": report.gaps_decreasing,
        "final_gap_rel": report.final_gap_rel,
        "note": "theta sampled along x/n only (limit construction)",
    }
    _emit(cfg, ["n", "S_n", "gap"], rows, payload)
    return EXIT_OK if report.gaps_decreasing else EXIT_FINDING


_COMMANDS = {
    "eval": (_cmd_eval, True),
    "coeffs": (_cmd_coeffs, True),
    "schoenberg": (_cmd_schoenberg, True),
    "bochner": (_cmd_bochner, True),
    "gram": (_cmd_gram, True),
    "decompose": (_cmd_decompose, False),
    "f-ell": (_cmd_f_ell, False),
    "conjecture-sweep": (_cmd_sweep, False),
    "bounds-audit": (_cmd_bounds_audit, False),
    "converse": (_cmd_converse, True),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherepd",
        description="positivity tests and identity audits for isotropic kernels",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, needs_kernel) in _COMMANDS.items():
        p = sub.add_parser(name)
        if needs_kernel:
            p.add_argument("--kernel", required=True, help="kernel mini-language spec")
        p.add_argument("--d", type=int, default=2, help="dimension")
        p.add_argument("--nmax", type=int, default=100)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--seed", type=int, default=12345)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (stdout if omitted)")
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument(
            "--opt",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="extra command-specific option (repeatable)",
        )
    return parser


def _parse_extra(pairs) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--opt expects KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        if key in ("theta_grid", "n_list"):
            out[key] = [float(v) if "." in v or "e" in v else int(v)
                        for v in val.split(";")]
        else:
            out[key] = val
    return out


def _resolve_config(args) -> RunConfig:
    extra = _parse_extra(args.opt)
    file_cfg = {}
    if args.config:
        file_cfg = read_config_file(args.config)
    # file keys quad.* feed the numeric knobs; anything else lands in extra
    tol = float(file_cfg.pop("quad.tol", args.tol))
    max_evals = int(file_cfg.pop("quad.max_evals", 1_000_000))
    depth = int(file_cfg.pop("quad.grading_depth", 40))
    for key, val in file_cfg.items():
        extra.setdefault(key, val)
    return RunConfig(
        command=args.command,
        kernel=getattr(args, "kernel", None),
        d=args.d,
        nmax=args.nmax,
        tol=tol,
        seed=args.seed,
        max_evals=max_evals,
        grading_depth=depth,
        fmt=args.format,
        out=args.out,
        extra=extra,
    )


def run(cfg: RunConfig) -> int:
    """Dispatch a resolved config; returns the exit code."""
    handler, needs_kernel = _COMMANDS[cfg.command]
    kernel = parse_kernel(cfg.kernel) if needs_kernel and cfg.kernel else None
    return handler(cfg, kernel)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _resolve_config(args)
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
