"""Command-line driver: ``ellrs {theta,lax,rmat,verify,suite,sweep}``.

Configuration files are flat ``key = value`` lists (``#`` starts a
comment). Complex values use the form ``a+bi``; lists are comma separated.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import elliptic as el
from . import lax as lx
from . import rmat as rm
from . import verify as vf
from .errors import EllRSError, ParseError, UnknownSubcommand, ValidationError
from .phase import random_phase_point

__all__ = ["ScenarioConfig", "parse_complex", "format_complex", "parse_config", "emit_config", "load_config",
           "format_reports", "main"]

N_MIN, N_MAX = 2, 8


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a run depends on; the defaults reproduce the reference scenario."""

    n: int = 3
    tau: complex = 1j
    gamma: complex = 0.21 + 0.13j
    hbar: float = 0.1
    mc2: float = 1.0
    cm_coupling: float = 0.37
    n_values: tuple = (2, 3, 4)
    seeds: tuple = (0, 1, 2, 3, 4)
    spectral_points: tuple = ()
    s12_variant: str = "auto"
    checks: tuple = vf.CHECK_NAMES
    tolerances: dict = field(default_factory=dict)
    max_terms: int = 40
    tail_tol: float = 1e-16

    @property
    def series(self) -> el.SeriesControl:
        return el.SeriesControl(self.max_terms, self.tail_tol)

    def params(self, n: int | None = None) -> lx.ModelParams:
        return lx.ModelParams(n=self.n if n is None else n, tau=self.tau, gamma=self.gamma,
                              hbar=self.hbar, mc2=self.mc2, ctl=self.series)

    def validate(self) -> "ScenarioConfig":
        for n in (self.n, *self.n_values):
            if not N_MIN <= n <= N_MAX:
                raise ValidationError(f"n={n} outside [{N_MIN}, {N_MAX}]")
        if not self.tau.imag > 0:
            raise ValidationError(f"Im(tau) must be positive, got {self.tau}")
        if not self.seeds:
            raise ValidationError("seeds must not be empty")
        if self.s12_variant not in ("auto",) + rm.S12_VARIANTS:
            raise ValidationError(f"unknown s12_variant {self.s12_variant!r}")
        unknown = [c for c in self.checks if c not in vf.DEFAULT_TOLERANCES]
        if unknown:
            raise ValidationError(f"unknown checks: {', '.join(unknown)}")
        for k, t in self.tolerances.items():
            if k not in vf.DEFAULT_TOLERANCES:
                raise ValidationError(f"tolerance given for unknown check {k!r}")
            if not t >= 0:
                raise ValidationError(f"tolerance for {k} must be non-negative")
        return self


def parse_complex(text: str) -> complex:
    """Parse ``"a+bi"``, ``"bi"``, ``"a"`` (``i`` or ``j`` accepted).

    >>> parse_complex("0.21+0.13i")
    (0.21+0.13j)
    """
    s = text.strip().replace(" ", "").replace("i", "j")
    if s in ("j", "+j", "-j"):
        s = s.replace("j", "1j")
    try:
        return complex(s)
    except ValueError as exc:
        raise ParseError(f"cannot parse complex value {text!r}") from exc


def format_complex(z: complex) -> str:
    """Inverse of :func:`parse_complex` (round-trips exactly)."""
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def _num(text: str, kind):
    try:
        return kind(text.strip())
    except ValueError as exc:
        raise ParseError(f"cannot parse {kind.__name__} value {text!r}") from exc


def _split(text: str):
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _spectral(text: str):
    """``u1;v1 | u2;v2`` pairs."""
    pairs = []
    for chunk in text.split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(";")
        if len(parts) != 2:
            raise ParseError(f"spectral pair must look like 'u;v', got {chunk!r}")
        pairs.append((parse_complex(parts[0]), parse_complex(parts[1])))
    return tuple(pairs)


_SCALARS = {
    "n": lambda s: _num(s, int),
    "tau": parse_complex,
    "gamma": parse_complex,
    "hbar": lambda s: _num(s, float),
    "mc2": lambda s: _num(s, float),
    "cm_coupling": lambda s: _num(s, float),
    "max_terms": lambda s: _num(s, int),
    "tail_tol": lambda s: _num(s, float),
    "s12_variant": str.strip,
    "n_values": lambda s: tuple(_num(t, int) for t in _split(s)),
    "seeds": lambda s: tuple(_num(t, int) for t in _split(s)),
    "checks": lambda s: tuple(sorted(_split(s))),
    "spectral_points": _spectral,
}


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse a flat ``key = value`` document into a validated config.

    Keys ``tol.<check>`` set per-check tolerances.
    """
    cfg = base or ScenarioConfig()
    updates: dict = {}
    tols = dict(cfg.tolerances)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("tol."):
            tols[key[4:]] = _num(value, float)
        elif key in _SCALARS:
            updates[key] = _SCALARS[key](value)
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")
    return replace(cfg, tolerances=tols, **updates).validate()


def emit_config(cfg: ScenarioConfig) -> str:
    """Serialize a config in the format read by :func:`parse_config`."""
    lines = [
        f"n = {cfg.n}",
        f"tau = {format_complex(cfg.tau)}",
        f"gamma = {format_complex(cfg.gamma)}",
        f"hbar = {cfg.hbar!r}",
        f"mc2 = {cfg.mc2!r}",
        f"cm_coupling = {cfg.cm_coupling!r}",
        f"n_values = {', '.join(map(str, cfg.n_values))}",
        f"seeds = {', '.join(map(str, cfg.seeds))}",
        f"s12_variant = {cfg.s12_variant}",
        f"checks = {', '.join(cfg.checks)}",
        f"max_terms = {cfg.max_terms}",
        f"tail_tol = {cfg.tail_tol!r}",
    ]
    if cfg.spectral_points:
        pts = " | ".join(f"{format_complex(u)}; {format_complex(v)}" for u, v in cfg.spectral_points)
        lines.append(f"spectral_points = {pts}")
    lines += [f"tol.{k} = {t!r}" for k, t in sorted(cfg.tolerances.items())]
    return "\n".join(lines) + "\n"


def load_config(path: str | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig().validate()
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read config {path!r}: {exc}") from exc


# --- output ------------------------------------------------------------------------

REPORT_KEYS = ("check_name", "abs_residual", "rel_residual", "tolerance", "passed", "inputs_digest", "notes")


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def format_reports(reports, fmt: str) -> str:
    """Render reports as ``json``, ``csv`` (scientific notation, 6 significant digits) or ``human``."""
    rows = [r.to_dict() for r in reports]
    if fmt == "json":
        return json.dumps([{k: _jsonable(d[k]) for k in REPORT_KEYS} for d in rows], indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_KEYS)
        for d in rows:
            w.writerow([f"{d[k]:.5e}" if isinstance(d[k], float) else d[k] for k in REPORT_KEYS])
        return buf.getvalue().rstrip("\n")
    lines = []
    for d in rows:
        mark = "PASS" if d["passed"] else "FAIL"
        lines.append(f"{mark} {d['check_name']:<24} rel={d['rel_residual']:.3e} tol={d['tolerance']:.1e}"
                     + (f"  [{d['notes']}]" if d["notes"] else ""))
    n_pass = sum(d["passed"] for d in rows)
    lines.append(f"{n_pass}/{len(rows)} passed")
    return "\n".join(lines)


def _dump(data, fmt: str) -> str:
    """Render a flat dict or a list of flat dicts of values."""
    recs = data if isinstance(data, list) else [data]

    def cell(v):
        if isinstance(v, complex):
            return f"{v.real:.6g}{v.imag:+.6g}i"
        if isinstance(v, float):
            return f"{v:.6g}"
        return v

    if fmt == "json":
        def js(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, np.ndarray):
                return [js(complex(z)) for z in v.ravel()] if np.iscomplexobj(v) else v.tolist()
            return _jsonable(v)
        out = [{k: js(v) for k, v in r.items()} for r in recs]
        return json.dumps(out if isinstance(data, list) else out[0], indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(recs[0]))
        for r in recs:
            w.writerow([cell(v) for v in r.values()])
        return buf.getvalue().rstrip("\n")
    out = []
    for r in recs:
        for k, v in r.items():
            if isinstance(v, np.ndarray):
                with np.printoptions(precision=6, suppress=True, linewidth=120):
                    out.append(f"{k} =\n{v}")
            else:
                out.append(f"{k} = {cell(v)}")
    return "\n".join(out)


# --- subcommands ---------------------------------------------------------------------

def _point(cfg, rng, n):
    return random_phase_point(rng, n)


def _cmd_theta(args, cfg, rng):
    z = parse_complex(args.z)
    n = cfg.n
    rec = {"z": z, "tau": cfg.tau, "sigma": complex(el.sigma(z, cfg.tau, cfg.series)),
           "d_sigma": complex(el.d_sigma(z, cfg.tau, cfg.series))}
    for j in range(n):
        rec[f"theta_{j}"] = complex(el.theta_j(j, z, n, cfg.tau, cfg.series))
    try:
        rec["xi"] = complex(el.xi(z, cfg.tau, cfg.series))
    except EllRSError:
        rec["xi"] = float("inf")
    return rec, []


def _cmd_lax(args, cfg, rng):
    P = cfg.params()
    x = _point(cfg, rng, P.n)
    u = parse_complex(args.u)
    fn = {"factorized": lx.lax_factorized, "nijhoff": lx.lax_nijhoff, "ruijsenaars": lx.lax_ruijsenaars}[args.kind]
    L = fn(u, x, P).entries
    rec = {"kind": args.kind, "u": u, "q": x.q, "p": x.p, "L": L,
           "trace": complex(np.trace(L)), "det": complex(np.linalg.det(L))}
    reports = [vf.check_prop3(u, x, P)] if args.check else []
    return rec, reports


def _cmd_rmat(args, cfg, rng):
    P = cfg.params()
    v = parse_complex(args.v)
    t = rm.classical_r(v, P).data if args.kind == "classical" else rm.quantum_R(v, P).data
    rec = {"kind": args.kind, "v": v, "matrix": t}
    reports = []
    if args.check:
        w1, w2 = vf.random_spectral_pair(rng, P)
        if args.kind == "classical":
            reports = [vf.check_cybe(v + w1, w1, w2, P), vf.check_r_antisymmetry(v, P), vf.check_r_zn_symmetry(v, P)]
        else:
            reports = [vf.check_qybe(v + w1, w1, w2, P), vf.check_R_zn_symmetry(v, P), vf.check_R_identity(v, P)]
    return rec, reports


def _check_name(name: str) -> str:
    name = name[6:] if name.startswith("check_") else name
    if name not in vf.DEFAULT_TOLERANCES and name.lower() in vf.DEFAULT_TOLERANCES:
        return name.lower()
    return name


def _cmd_verify(args, cfg, rng):
    names = list(args.checks)
    if args.check and args.check != "all":
        names.append(args.check)
    names = tuple(sorted({_check_name(c) for c in names})) or cfg.checks
    single = replace(cfg, n_values=(cfg.n,), seeds=(args.seed,), checks=names).validate()
    return None, vf.run_suite(single)


def _cmd_suite(args, cfg, rng):
    return None, vf.run_suite(cfg)


def _cmd_sweep(args, cfg, rng):
    """Residual against ``hbar`` (classical limit), ``beta`` (CM limit) or ``gamma`` (Sklyanin bracket).

    The ``gamma`` sweep scales the configured ``gamma`` by factors in [0.25, 2].
    """
    P = cfg.params()
    rows = []
    if args.quantity == "gamma":
        x = _point(cfg, rng, P.n)
        u, v = vf.random_spectral_pair(rng, P)
        xs = np.linspace(0.25, 2.0, args.points)
        ys = []
        for f in xs:
            Pg = P.with_(gamma=f * cfg.gamma)
            ys.append(vf.check_sklyanin(u, v, x, Pg).rel_residual)
        ys = np.maximum(np.array(ys), np.finfo(float).tiny)
        label = "gamma_scale"
    elif args.quantity == "hbar":
        v = parse_complex(args.v) if args.v else vf.random_spectral_pair(rng, P)[0]
        xs = np.logspace(-4, -1, args.points)
        ys = rm.classical_limit_data(v, xs, P)
        label = "hbar"
    else:
        x = _point(cfg, rng, P.n)
        u = parse_complex(args.v) if args.v else vf.random_spectral_pair(rng, P)[0]
        xs = np.logspace(-4, -1, args.points)
        L = lx.lax_cm(u, x, cfg.cm_coupling, P).entries
        ys = np.array([np.linalg.norm(L - lx.lax_cm_limit(u, x, cfg.cm_coupling, b, P)) for b in xs])
        label = "beta"
    slope = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    for a, b in zip(xs, ys):
        rows.append({label: float(a), "residual": float(b), "slope": slope})
    return rows, []


COMMANDS = {
    "theta": _cmd_theta,
    "lax": _cmd_lax,
    "rmat": _cmd_rmat,
    "verify": _cmd_verify,
    "suite": _cmd_suite,
    "sweep": _cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value configuration file")
    common.add_argument("--format", choices=("json", "csv", "human"), default="human")
    common.add_argument("--seed", type=int, default=0, help="seed for the PCG64 generator")
    common.add_argument("--check", nargs="?", const="all", default=None, metavar="NAME",
                        help="run residual checks (for verify: the named check)")
    common.add_argument("--out", help="write output to this file instead of stdout")

    p = argparse.ArgumentParser(prog="ellrs", description="Elliptic Ruijsenaars-Schneider numerical lab.")
    sub = p.add_subparsers(dest="command", metavar="{theta,lax,rmat,verify,suite,sweep}")
    t = sub.add_parser("theta", parents=[common], help="theta functions at a point")
    t.add_argument("z", nargs="?", default="0.3+0.1i")
    l = sub.add_parser("lax", parents=[common], help="Lax matrix at a random phase point")
    l.add_argument("u", nargs="?", default="0.37+0.11i")
    l.add_argument("--kind", choices=("factorized", "nijhoff", "ruijsenaars"), default="factorized")
    r = sub.add_parser("rmat", parents=[common], help="classical or quantum R-matrix")
    r.add_argument("v", nargs="?", default="0.37+0.11i")
    r.add_argument("--kind", choices=("classical", "quantum"), default="classical")
    v = sub.add_parser("verify", parents=[common], help="run checks for the configured n and one seed")
    v.add_argument("checks", nargs="*", default=[])
    sub.add_parser("suite", parents=[common], help="run all checks over n_values x seeds")
    s = sub.add_parser("sweep", parents=[common], help="convergence sweep as CSV with the fitted slope")
    s.add_argument("quantity", choices=("hbar", "beta", "gamma"), nargs="?", default="hbar",
                   help="hbar: classical limit of R; beta: CM limit; gamma: Sklyanin residual")
    s.add_argument("--points", type=int, default=7)
    s.add_argument("--v", help="spectral parameter (random if omitted)")
    return p


def run(argv=None) -> tuple[int, str, str | None]:
    """Execute a command line; return ``(exit code, rendered output, --out path)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        raise UnknownSubcommand(f"unknown subcommand {argv[0]!r}; choose from {', '.join(COMMANDS)}")
    args = build_parser().parse_args(argv)
    if args.command is None:
        raise UnknownSubcommand(f"a subcommand is required: {', '.join(COMMANDS)}")
    cfg = load_config(args.config)
    rng = np.random.default_rng(args.seed)
    data, reports = COMMANDS[args.command](args, cfg, rng)
    fmt = "csv" if args.command == "sweep" and args.format == "human" else args.format
    parts = []
    if data is not None:
        parts.append(_dump(data, fmt))
    if reports:
        parts.append(format_reports(reports, fmt))
    code = 0 if all(r.passed for r in reports) else 1
    return code, "\n".join(parts), args.out


def main(argv=None) -> int:
    try:
        code, text, out = run(argv)
    except (ParseError, ValidationError, UnknownSubcommand) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
