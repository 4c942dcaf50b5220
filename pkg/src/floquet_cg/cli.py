"""Command line front end: ``run``, ``verify`` and ``list-presets``.

Config files are line oriented::

    # comment
    preset = fig2            # optional, expands before any override
    [scenario]
    kind = pure_dephasing    # pure_dephasing | circular | fast_driving
    delta = 1
    omega = 10
    lambda = 0.5
    p = 0.5+0.1j
    rho0 = 1, 0, 0           # initial Bloch vector
    n_max = 1
    exact_floquet = false
    [bath]
    gamma0 = 0.05
    omega_c = 20
    beta = 1
    [run]
    methods = exact, dcg, pcg, cg:tau=0.5, longterm, bms, bmu
    tmax = 10
    points = 200
    output = fig2.csv
    report = fig2.report.txt
    workers = 1

A dotted key such as ``bath.beta = 2`` may appear anywhere and addresses
its section directly.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_preset_checks
from .bath import OhmicBath
from .config import FloquetCGError, InvalidInputError
from .models import KINDS, PRESETS, Scenario, check_method, simulate

log = logging.getLogger("floquet_cg")

SECTIONS = ("scenario", "bath", "run")
KEYS = {
    "scenario": ("preset", "kind", "delta", "omega", "lambda", "p", "rho0", "n_max", "exact_floquet"),
    "bath": ("gamma0", "omega_c", "beta"),
    "run": ("methods", "tmax", "points", "output", "report", "workers"),
}


class ConfigError(InvalidInputError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    methods: tuple
    tmax: float
    points: int
    output: Path | None = None
    report: Path | None = None
    preset: str | None = None
    workers: int = 1

    @property
    def t_grid(self):
        return np.linspace(0.0, self.tmax, self.points)


def _read_entries(text):
    """(section, key) -> (value, line number)."""
    entries = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {raw.strip()!r}")
            section = line[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]; expected one of {SECTIONS}")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if "." in key:
            sec, key = key.split(".", 1)
        elif section is None and key == "preset":
            sec = "scenario"
        elif section is None:
            raise ConfigError(f"line {lineno}: key {key!r} outside of a section")
        else:
            sec = section
        if sec not in SECTIONS or key not in KEYS[sec]:
            raise ConfigError(f"line {lineno}: unknown key {sec}.{key}")
        if (sec, key) in entries:
            raise ConfigError(f"line {lineno}: duplicate key {sec}.{key} (first on line {entries[(sec, key)][1]})")
        entries[(sec, key)] = (value, lineno)
    return entries


def _number(entries, sec, key, kind=float):
    value, lineno = entries[(sec, key)]
    try:
        if kind is int:
            out = int(value)
        elif kind is complex:
            out = complex(value.replace(" ", "").replace("i", "j"))
        else:
            out = float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {sec}.{key} = {value!r} is not a valid {kind.__name__}") from None
    return out


def _bool(entries, sec, key):
    value, lineno = entries[(sec, key)]
    low = value.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"line {lineno}: {sec}.{key} = {value!r} is not a boolean")


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    entries = _read_entries(text)
    has = lambda sec, key: (sec, key) in entries  # noqa: E731

    preset_name = None
    methods = tmax = points = None
    if has("scenario", "preset"):
        preset_name, lineno = entries[("scenario", "preset")]
        if preset_name not in PRESETS:
            raise ConfigError(f"line {lineno}: unknown preset {preset_name!r}; expected one of {sorted(PRESETS)}")
        sc, _, methods, tmax, points = PRESETS[preset_name]
        params = dict(kind=sc.kind, delta=sc.delta, omega=sc.omega, lam=sc.lam, p=sc.p,
                      bloch0=sc.bloch0, n_max=sc.n_max, exact_floquet=sc.exact_floquet,
                      gamma0=sc.bath.gamma0, omega_c=sc.bath.omega_c, beta=sc.bath.beta)
    else:
        params = dict(delta=1.0, lam=0.0, p=0.0, bloch0=(1.0, 0.0, 0.0), n_max=None, exact_floquet=False)
        for sec, key in (("scenario", "kind"), ("scenario", "omega"), ("bath", "gamma0"),
                         ("bath", "omega_c"), ("bath", "beta")):
            if not has(sec, key):
                raise ConfigError(f"missing required key {sec}.{key} (or use a preset)")

    if has("scenario", "kind"):
        kind, lineno = entries[("scenario", "kind")]
        if kind not in KINDS:
            raise ConfigError(f"line {lineno}: scenario.kind = {kind!r}; expected one of {KINDS}")
        params["kind"] = kind
    for key, name in (("delta", "delta"), ("omega", "omega"), ("lambda", "lam")):
        if has("scenario", key):
            params[name] = _number(entries, "scenario", key)
    if has("scenario", "p"):
        params["p"] = _number(entries, "scenario", "p", complex)
    if has("scenario", "n_max"):
        params["n_max"] = _number(entries, "scenario", "n_max", int)
    if has("scenario", "exact_floquet"):
        params["exact_floquet"] = _bool(entries, "scenario", "exact_floquet")
    if has("scenario", "rho0"):
        value, lineno = entries[("scenario", "rho0")]
        try:
            vec = tuple(float(v) for v in value.split(","))
        except ValueError:
            raise ConfigError(f"line {lineno}: scenario.rho0 must be three comma-separated numbers") from None
        if len(vec) != 3:
            raise ConfigError(f"line {lineno}: scenario.rho0 must have three components, got {len(vec)}")
        params["bloch0"] = vec
    for key in KEYS["bath"]:
        if has("bath", key):
            params[key] = _number(entries, "bath", key)

    try:
        bath = OhmicBath(params.pop("gamma0"), params.pop("omega_c"), params.pop("beta"))
    except InvalidInputError as exc:
        raise ConfigError(f"bath: {exc}") from None
    try:
        scenario = Scenario(bath=bath, **params)
    except InvalidInputError as exc:
        raise ConfigError(f"scenario: {exc}") from None

    if has("run", "methods"):
        value, lineno = entries[("run", "methods")]
        methods = tuple(m.strip() for m in value.split(",") if m.strip())
        if not methods:
            raise ConfigError(f"line {lineno}: run.methods must list at least one method")
    if not methods:
        raise ConfigError("run.methods must list at least one method")
    for m in methods:
        try:
            check_method(scenario, m)
        except InvalidInputError as exc:
            raise ConfigError(f"run.methods: {exc}") from None
    if len(set(methods)) != len(methods):
        raise ConfigError("run.methods contains duplicates")
    if has("run", "tmax"):
        tmax = _number(entries, "run", "tmax")
    if tmax is None:
        raise ConfigError("missing required key run.tmax")
    if not (np.isfinite(tmax) and tmax > 0):
        raise ConfigError(f"run.tmax must be > 0, got {tmax}")
    if has("run", "points"):
        points = _number(entries, "run", "points", int)
    points = 200 if points is None else points
    if points < 2:
        raise ConfigError(f"run.points must be >= 2, got {points}")
    workers = _number(entries, "run", "workers", int) if has("run", "workers") else 1
    if workers < 1:
        raise ConfigError(f"run.workers must be >= 1, got {workers}")

    def path(key):
        if not has("run", key):
            return None
        p = Path(entries[("run", key)][0])
        return p if p.is_absolute() or base_dir is None else base_dir / p

    return RunConfig(scenario, methods, float(tmax), int(points), path("output"), path("report"),
                     preset_name, workers)


def format_number(v) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(v))


def to_csv(series_list) -> str:
    lines = ["t,method,sx,sy,sz"]
    for s in series_list:
        for k in range(len(s.t)):
            lines.append(",".join([format_number(s.t[k]), s.method, format_number(s.x[k]),
                                   format_number(s.y[k]), format_number(s.z[k])]))
    return "\n".join(lines) + "\n"


def read_csv(text: str):
    """Parse emitted CSV back into {method: (t, x, y, z)} arrays."""
    lines = text.splitlines()
    if not lines or lines[0] != "t,method,sx,sy,sz":
        raise InvalidInputError("not a floquet-cg CSV (bad header)")
    cols = {}
    for line in lines[1:]:
        t, method, x, y, z = line.split(",")
        cols.setdefault(method, []).append((float(t), float(x), float(y), float(z)))
    return {m: tuple(np.array(c) for c in zip(*rows)) for m, rows in cols.items()}


def deviation_report(cfg: RunConfig, series, failures) -> str:
    sc = cfg.scenario
    out = [
        "floquet-cg run report",
        f"preset: {cfg.preset or '-'}",
        f"scenario: kind={sc.kind} delta={sc.delta!r} omega={sc.omega!r} lambda={sc.lam!r} p={sc.p!r} "
        f"rho0={sc.bloch0} n_max={sc.n_max} exact_floquet={sc.exact_floquet}",
        f"bath: gamma0={sc.bath.gamma0!r} omega_c={sc.bath.omega_c!r} beta={sc.bath.beta!r}",
        f"grid: {cfg.points} points on [0, {cfg.tmax!r}]",
        f"methods: {', '.join(cfg.methods)}",
    ]
    if failures:
        out.append("failed methods:")
        out.extend(f"  {m}: {msg}" for m, msg in failures.items())
    out.append("pairwise max deviations (value @ time):")
    if len(series) < 2:
        out.append("  (fewer than two successful methods)")
    for a, b in combinations(series, 2):
        parts = []
        for comp in ("x", "y", "z"):
            d = np.abs(getattr(a, comp) - getattr(b, comp))
            k = int(np.argmax(d))
            parts.append(f"|ds{comp}| = {d[k]:.6e} @ t = {a.t[k]:.6g}")
        out.append(f"  {a.method} vs {b.method}: " + ", ".join(parts))
    return "\n".join(out) + "\n"


def run(cfg: RunConfig, out: Path | None = None):
    """Simulate every method; returns (csv text, report text, failures)."""
    t = cfg.t_grid

    def one(method):
        try:
            return method, simulate(cfg.scenario, method, t), None
        except FloquetCGError as exc:
            log.error("method %s failed: %s", method, exc)
            return method, None, f"{type(exc).__name__}: {exc}"

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(one, cfg.methods))
    else:
        results = [one(m) for m in cfg.methods]
    series = [s for _, s, _ in results if s is not None]
    failures = {m: err for m, _, err in results if err is not None}
    csv_text = to_csv(series)
    report = deviation_report(cfg, series, failures)
    target = out or cfg.output
    if target is not None:
        target = Path(target)
        target.write_text(csv_text, encoding="utf-8", newline="\n")
        report_path = cfg.report or target.with_suffix(target.suffix + ".report.txt")
        Path(report_path).write_text(report, encoding="utf-8", newline="\n")
    return csv_text, report, failures


def verify(name: str, stream=None) -> bool:
    stream = stream or sys.stdout
    checks = run_preset_checks(name)
    print(f"verify {name}", file=stream)
    for c in checks:
        print(c.line(), file=stream)
    ok = all(c.passed for c in checks)
    print(f"{name}: {'PASS' if ok else 'FAIL'} ({sum(c.passed for c in checks)}/{len(checks)} checks)", file=stream)
    return ok


def list_presets(stream=None):
    stream = stream or sys.stdout
    for name, (sc, text, methods, tmax, points) in PRESETS.items():
        print(f"{name}  {text}; methods {', '.join(methods)}; tmax {tmax:g}, {points} points", file=stream)


def build_parser():
    ap = argparse.ArgumentParser(prog="floquet-cg", description="Coarse-graining master equations for driven qubits.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="simulate the methods of a config file and write CSV")
    p_run.add_argument("--config", required=True, type=Path)
    p_run.add_argument("--out", type=Path, help="CSV path (overrides run.output); stdout if neither is set")
    p_ver = sub.add_parser("verify", help="run the acceptance checks of a preset")
    p_ver.add_argument("--preset", required=True, choices=sorted(PRESETS))
    sub.add_parser("list-presets", help="list the built-in figure presets")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "list-presets":
            list_presets()
            return 0
        if args.command == "verify":
            return 0 if verify(args.preset) else 1
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        cfg = parse_config(text, args.config.parent)
        csv_text, report, failures = run(cfg, args.out)
        if (args.out or cfg.output) is None:
            sys.stdout.write(csv_text)
            sys.stderr.write(report)
        return 1 if failures else 0
    except FloquetCGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
