"""Command-line front end.

    python -m pwtransfer check-pwt --config examples/alpha0.ini --out out/

Each command reads one INI-style config (named sections of ``key = value``),
applies flag overrides, runs one pipeline and writes CSV/JSON (and optionally
SVG) artifacts.  Every artifact carries the library version and a hash of the
effective configuration.  Exit codes: 0 success, 1 usage or input error,
2 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import InputError, NumericalError, PWTError, SignChange, UsageError
from .profiles import (Profile, SystemGeometry, TLLModel, coordinate_map, load_tabulated_csv,
                       profile_from_dict)

__all__ = ["RunConfig", "NumericConfig", "OutputConfig", "load_config", "run", "main", "COMMANDS"]

COMMANDS = ("spectrum", "check-pwt", "correlate", "invert", "wkb", "overlap")
METHODS = ("auto", "closed_form", "shooting", "finite_difference")
_LIST_KEYS = {"cos", "sin", "coefficients", "samples"}
_STR_KEYS = {"kind", "parity_hint", "path"}
_PROFILE_SECTIONS = ("v", "K", "q", "mass")


# --------------------------------------------------------------------------- configuration

@dataclass(frozen=True)
class NumericConfig:
    n_max: int = 32
    grid_points: int = 1001
    eps_spec: float = 1e-7
    eps_parity: float = 1e-6
    epsilon: Optional[float] = None
    n_modes: int = 64
    quadrature_order: int = 16
    method: str = "auto"
    regularization: Optional[float] = None

    def __post_init__(self):
        for name in ("n_max", "grid_points", "eps_spec", "eps_parity", "n_modes", "quadrature_order"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        for name in ("epsilon", "regularization"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise UsageError(f"{name} must be positive")
        if self.method not in METHODS:
            raise UsageError(f"method must be one of {', '.join(METHODS)}")


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    svg: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Effective run description after flag overrides.

    ``model`` is a plain descriptor: L plus one profile dict per section.
    ``sections`` holds the command-specific sections as parsed values.
    """

    command: str
    model: dict
    numeric: NumericConfig = field(default_factory=NumericConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sections: dict = field(default_factory=dict)
    base_dir: str = "."

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")

    @property
    def geometry(self) -> SystemGeometry:
        try:
            return SystemGeometry(float(self.model.get("L", 1.0)), self.numeric.grid_points)
        except InputError as exc:
            raise UsageError(str(exc)) from None

    def section(self, name: str) -> dict:
        return dict(self.sections.get(name, {}))

    def path(self, p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def profile(self, name: str) -> Optional[Profile]:
        d = self.model.get(name)
        if d is None:
            return None
        d = dict(d)
        g = self.geometry
        d.pop("sha256", None)
        if d.get("kind") == "tabulated" and "path" in d:
            return load_tabulated_csv(self.path(d["path"]), g, int(d.get("order", 3)))
        d.setdefault("L", g.L)
        return profile_from_dict(d)

    def build_model(self) -> TLLModel:
        if "v" not in self.model or "K" not in self.model:
            raise UsageError("config needs [v] and [K] sections")
        return TLLModel(self.geometry, self.profile("v"), self.profile("K"), q=self.profile("q"),
                        mass=self.profile("mass"))

    def canonical(self) -> dict:
        """Everything that determines the artifacts (the output directory does not)."""
        return {"command": self.command, "model": self.model, "numeric": asdict(self.numeric),
                "svg": self.output.svg, "sections": self.sections}

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _value(key: str, raw: str):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if key in _LIST_KEYS:
        try:
            return [float(s) for s in raw.split(",") if s.strip()]
        except ValueError:
            raise UsageError(f"{key}: expected comma-separated numbers, got {raw!r}") from None
    low = raw.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("", "none"):
        return None
    try:
        f = float(raw)
    except ValueError:
        return raw
    return int(f) if f.is_integer() and "." not in raw and "e" not in low else f


def _file_digest(path: Path) -> str:
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def load_config(path: Optional[str], command: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Parse the config file (optional) and apply flag ``overrides``."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    base = "."
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise UsageError(f"config file {path} not found")
        try:
            parser.read(p)
        except configparser.Error as exc:
            raise UsageError(f"cannot parse {path}: {exc}") from None
        base = str(p.parent)
    secs = {s: {k: _value(k, v) for k, v in parser.items(s)} for s in parser.sections()}
    run = secs.pop("run", {})
    command = command or run.get("command")
    if command is None:
        raise UsageError("no command given (positional argument or [run] command)")
    model_sec = secs.pop("model", {})
    model = {"L": float(model_sec.get("L", 1.0))}
    for name in _PROFILE_SECTIONS:
        if name in secs:
            d = secs.pop(name)
            if "kind" not in d:
                raise UsageError(f"[{name}] needs a kind")
            if d.get("kind") == "tabulated" and "path" in d:
                d["sha256"] = _file_digest(Path(base) / d["path"] if not Path(d["path"]).is_absolute()
                                           else Path(d["path"]))
            model[name] = d
    if "v" not in model:
        model["v"] = {"kind": "constant", "value": 1.0}
    if "K" not in model:
        model["K"] = {"kind": "constant", "value": 1.0}
    num = dict(secs.pop("numeric", {}))
    if "grid_points" in model_sec:
        num.setdefault("grid_points", model_sec["grid_points"])
    out = secs.pop("output", {})
    overrides = overrides or {}
    for key, val in overrides.items():
        if val is not None and key in NumericConfig.__dataclass_fields__:
            num[key] = val
    unknown = set(num) - set(NumericConfig.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown [numeric] keys: {', '.join(sorted(unknown))}")
    try:
        numeric = NumericConfig(**num)
    except TypeError as exc:
        raise UsageError(f"[numeric]: {exc}") from None
    output = OutputConfig(directory=str(overrides.get("out") or out.get("dir", "out")),
                          svg=bool(overrides.get("svg") or out.get("svg", False)))
    return RunConfig(command=command, model=model, numeric=numeric, output=output, sections=secs, base_dir=base)


# --------------------------------------------------------------------------- artifacts

class Writer:
    """Atomic artifact writer stamping each file with version and config hash."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.output.directory)
        self.hash = cfg.config_hash()
        self.written: list[str] = []

    def _atomic(self, name: str, text: str) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        target = self.dir / name
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.dir)
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(str(target))
        return target

    def header(self) -> list[str]:
        return [f"# pwtransfer {__version__}", f"# config_sha256 {self.hash}", f"# command {self.cfg.command}"]

    def csv(self, name: str, columns: Sequence[str], rows) -> Path:
        buf = io.StringIO()
        for line in self.header():
            buf.write(line + "\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(columns)
        for row in rows:
            wr.writerow([_cell(c) for c in row])
        return self._atomic(name, buf.getvalue())

    def json(self, name: str, payload: dict) -> Path:
        body = {"_meta": {"version": __version__, "config_sha256": self.hash, "command": self.cfg.command}}
        body.update(_jsonable(payload))
        return self._atomic(name, json.dumps(body, sort_keys=True, indent=2) + "\n")

    def text(self, name: str, body: str) -> Path:
        """Pre-formatted CSV body (header row included) behind the metadata lines."""
        return self._atomic(name, "\n".join(self.header()) + "\n" + body)

    def svg(self, name: str, text: str) -> Optional[Path]:
        if not self.cfg.output.svg:
            return None
        return self._atomic(name, text)

    @property
    def comment(self) -> str:
        return f"pwtransfer {__version__} config_sha256 {self.hash}"


def _cell(c):
    if isinstance(c, (float, np.floating)):
        return repr(float(c))
    if isinstance(c, np.integer):
        return int(c)
    return c


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def read_spectrum_csv(path: Path) -> np.ndarray:
    """Target energies from a CSV with columns (n, E); ``#`` lines and one header row skipped."""
    if not path.is_file():
        raise InputError(f"target spectrum {path} not found")
    ns, Es = [], []
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if rows and rows[0][0].strip().lower() == "n":
        cols = [c.strip() for c in rows[0]]
        iE = cols.index("E") if "E" in cols else 1
        rows = rows[1:]
    else:
        iE = 1
    for r in rows:
        try:
            ns.append(int(r[0]))
            Es.append(float(r[iE]))
        except (ValueError, IndexError):
            raise InputError(f"{path}: malformed row {r!r}") from None
    if ns != list(range(len(ns))):
        raise InputError(f"{path}: n must run 0, 1, 2, ... without gaps")
    return np.array(Es)


# --------------------------------------------------------------------------- pipelines

def _solve(cfg: RunConfig, model: TLLModel, n_max: int):
    from .slcore import solve_model
    nc = cfg.numeric
    return solve_model(model, n_max, method=nc.method, eps_parity=nc.eps_parity,
                       regularization=nc.regularization)


def _v0(model: TLLModel) -> float:
    cm = coordinate_map(model)
    return float(cm.v0)


def cmd_spectrum(cfg: RunConfig, out: Writer) -> str:
    from . import svg
    model = cfg.build_model()
    spec, modes = _solve(cfg, model, cfg.numeric.n_max)
    E = spec.energies
    out.csv("spectrum.csv", ["n", "lambda", "E", "parity", "zero_count", "error_estimate"],
            [(m.n, spec.lambdas[k], E[k], m.parity.value, m.zero_count, spec.estimated_error[k])
             for k, m in enumerate(modes)])
    x = cfg.geometry.grid
    cols = ["x"]
    data = [x]
    for m in modes:
        cols += [f"u_{m.n}", f"U_{m.n}"]
        data += [np.asarray(m.u(x), dtype=float), np.asarray(m.U(x), dtype=float)]
    out.csv("modes.csv", cols, zip(*data))
    out.json("spectrum.json", {"method": spec.method, "n_max": spec.n_max, "metadata": spec.metadata,
                               "lambdas": spec.lambdas, "energies": E, "error_estimate": spec.estimated_error})
    shown = modes[:min(4, len(modes))]
    out.svg("modes.svg", svg.line_plot(x, [(f"u_{m.n}", m.u(x)) for m in shown], title="eigenmodes",
                                       xlabel="x", ylabel="u_n(x)", comment=out.comment))
    e1 = f", E_1 = {E[1]:.10g}" if E.size > 1 else ""
    return f"spectrum: {len(spec)} modes via {spec.method}{e1}"


def cmd_check_pwt(cfg: RunConfig, out: Writer) -> str:
    from .pwt import classify_pwt, correlation_reflection_test
    nc = cfg.numeric
    model = cfg.build_model()
    spec, modes = _solve(cfg, model, nc.n_max)
    verdict = classify_pwt(model, spec, modes, eps_spec=nc.eps_spec, eps_parity=nc.eps_parity)
    payload = verdict.to_dict()
    payload["method"] = spec.method
    positive = int(np.sum(spec.energies > 0))
    if positive:
        T = verdict.T if verdict.is_pwt else cfg.geometry.L / _v0(model)
        k = min(nc.n_modes, positive)
        payload["reflection_probe"] = {
            "T": T, "n_modes": k,
            "defect": correlation_reflection_test(modes, spec.energies, T, k, grid=cfg.geometry.grid)}
    out.json("pwt.json", payload)
    return verdict.summary()


def _time_grid(T: float, t_max: float, points: int) -> np.ndarray:
    if points < 2:
        return np.array([t_max * T])
    t = np.arange(points) * (t_max * T / (points - 1))
    t[-1] = t_max * T
    return t


def cmd_correlate(cfg: RunConfig, out: Writer) -> str:
    from . import svg
    from .correlations import CorrelatorRequest, phi_phi_closed_form, phi_phi_series
    from .pwt import classify_pwt
    from .slcore import is_conformal
    nc = cfg.numeric
    sec = cfg.section("correlate")
    g = cfg.geometry
    L = g.L
    model = cfg.build_model()
    xp = float(sec.get("xp", -3.0 * L / 8.0))
    nx = int(sec.get("x_points", 101))
    nt = int(sec.get("t_points", 41))
    t_max = float(sec.get("t_max", 1.0))          # in units of T
    method = str(sec.get("method", "series"))
    quantity = str(sec.get("quantity", "abs"))
    if method not in ("series", "closed_form") or quantity not in ("abs", "re"):
        raise UsageError("[correlate] method must be series|closed_form and quantity abs|re")
    if nx < 3 or nx % 2 == 0:
        raise UsageError("[correlate] x_points must be odd and >= 3")
    spec, modes = _solve(cfg, model, max(nc.n_max, nc.n_modes, 8))
    verdict = classify_pwt(model, spec, modes, eps_spec=nc.eps_spec, eps_parity=nc.eps_parity)
    v0 = _v0(model)
    T = verdict.T if verdict.is_pwt else L / v0
    # symmetric integer construction so that x -> -x is exact
    m = (nx - 1) // 2
    x = np.arange(-m, m + 1) * (L / (nx - 1))
    x[0], x[-1] = -0.5 * L, 0.5 * L
    times = _time_grid(T, t_max, nt)
    rows, C = [], np.empty((times.size, x.size), dtype=complex)
    truncation = 0.0
    if method == "closed_form":
        if not is_conformal(model):
            raise UsageError("closed_form correlator needs constant K and no potential")
        eps = nc.epsilon if nc.epsilon is not None else 1e-2
        cm = coordinate_map(model)
        K = float(model.K(np.array(0.0)))
        for j, t in enumerate(times):
            C[j] = phi_phi_closed_form(cm, x, xp, t, 0.0, eps, K=K, L=L)
    else:
        eta = float(sec.get("abel_eta", 0.0))
        for j, t in enumerate(times):
            sv = phi_phi_series(modes, spec.energies, CorrelatorRequest(x=x, xp=xp, t=t, n_modes=nc.n_modes),
                                abel_eta=eta)
            C[j] = sv.value
            truncation = max(truncation, sv.truncation)
    for j, t in enumerate(times):
        for i in range(x.size):
            c = C[j, i]
            rows.append((x[i], t, c.real, c.imag, abs(c)))
    out.csv("correlate.csv", ["x", "t", "re", "im", "abs"], rows)
    defect = float(np.max(np.abs(C[-1] - C[0, ::-1]))) if abs(times[-1] - T) <= 1e-15 * T and nt > 1 else None
    out.json("correlate.json", {"xp": xp, "T": T, "T_source": "spectrum" if verdict.is_pwt else "L/v0",
                                "v0": v0, "pwt": verdict.is_pwt, "method": method, "n_modes": nc.n_modes,
                                "epsilon": nc.epsilon, "x_points": nx, "t_points": nt, "t_max_over_T": t_max,
                                "spectrum_method": spec.method, "series_truncation": truncation,
                                "reflection_defect": defect})
    Z = np.abs(C) if quantity == "abs" else C.real
    label = "|C(x,t)|" if quantity == "abs" else "Re C(x,t)"
    out.svg("correlate_heatmap.svg", svg.heatmap(Z, x / L, times / T, title=label, xlabel="x/L", ylabel="t/T",
                                                 comment=out.comment))
    if nt > 1:
        last = Z[-1]
        out.svg("correlate_profiles.svg",
                svg.line_plot(x / L, [("t = 0", Z[0]), (f"t = {t_max:g} T", last)], title=label,
                              xlabel="x/L", ylabel=label, comment=out.comment))
    tail = f", reflection defect at t = T: {defect:.3g}" if defect is not None else ""
    return f"correlate: T = {T:.10g} ({'PWT' if verdict.is_pwt else 'no PWT, T = L/v0'}){tail}"


def cmd_wkb(cfg: RunConfig, out: Writer) -> str:
    from . import svg
    from .semiclassics import wkb_report
    from .slcore import assemble_coefficients, liouville_transform, solve_spectrum_fd
    model = cfg.build_model()
    coeffs = assemble_coefficients(model)
    if coeffs.irregular_endpoint:
        raise UsageError("wkb needs a regular problem (v, K positive and finite at the ends)")
    spec = solve_spectrum_fd(coeffs, cfg.numeric.n_max)
    V = liouville_transform(coeffs)
    rep = wkb_report(coeffs, spec, V)
    out.text("wkb.csv", rep.to_csv())
    out.json("wkb.json", rep.summary())
    n = np.arange(len(rep.Lambdas))
    with np.errstate(divide="ignore"):
        lr = np.log10(np.abs(np.array(rep.phase_residuals, dtype=float)))
        lf = np.log10(np.abs(np.array(rep.free_residuals, dtype=float)))
    lr[~np.isfinite(lr)] = np.nan
    lf[~np.isfinite(lf)] = np.nan
    out.svg("wkb_residuals.svg", svg.line_plot(n, [("log10 |phase residual|", lr), ("log10 |free residual|", lf)],
                                               title="quantization residuals", xlabel="n", ylabel="log10",
                                               comment=out.comment))
    ok = "hold" if rep.pwt_moment_ok else "fail"
    return (f"wkb: a1 = {rep.a1:.6g}, a2 - Delta = {rep.a2 - rep.Delta:.6g}, moment conditions {ok}, "
            f"Weyl slope {rep.weyl_slope:.6g} (target {rep.weyl_target:.6g})")


def cmd_invert(cfg: RunConfig, out: Writer) -> str:
    from .inverse import InverseProblem, reconstruct, roundtrip_validate
    sec = cfg.section("invert")
    if "target" not in sec:
        raise UsageError("[invert] needs target = <spectrum csv>")
    E = read_spectrum_csv(cfg.path(str(sec["target"])))
    g = cfg.geometry
    v = cfg.profile("v")
    prob = InverseProblem(tuple(E), v, int(sec.get("basis_size", 2)), g,
                          regularization=float(sec.get("regularization", 0.0)), K0=float(sec.get("K0", 1.0)))
    res = reconstruct(prob)
    out.json("coefficients.json", {**res.summary(), "fitted_energies": res.fitted_energies,
                                   "target_energies": E,
                                   "trace": [dict(zip(("iteration", "stage", "params", "cost", "damping"), it))
                                             for it in res.trace.iterations]})
    if res.K_recovered is None:
        raise SignChange("recovered sqrt(K) changes sign: no positive K for this spectrum")
    x = g.grid
    out.csv("K.csv", ["x", "K"], zip(x, np.asarray(res.K_recovered(x), dtype=float)))
    n_check = sec.get("n_check")
    report = roundtrip_validate(res, v, E, g, n_check=None if n_check is None else int(n_check),
                                eps_spec=cfg.numeric.eps_spec)
    out.json("roundtrip.json", report)
    coef = ", ".join(f"{c:.8g}" for c in res.coefficients)
    return (f"invert: c = ({coef}), spectral residual {res.spectral_residual:.3g}, "
            f"round-trip error {report['max_relative_error']:.3g}")


def cmd_overlap(cfg: RunConfig, out: Writer) -> str:
    from . import svg
    from .correlations import gaussian_packet, overlap_F, overlap_norm, specular_pair, unfold
    nc = cfg.numeric
    sec = cfg.section("overlap")
    g = cfg.geometry
    L = g.L
    model = cfg.build_model()
    center = float(sec.get("center", -3.0 * L / 8.0))
    sigma = float(sec.get("sigma", L / 20.0))
    k0 = float(sec.get("k0", 0.0))
    mover = str(sec.get("mover", "plus"))
    if mover not in ("plus", "minus") or not sigma > 0:
        raise UsageError("[overlap] mover must be plus|minus and sigma > 0")
    xi = gaussian_packet(center, sigma, k0)
    packets = specular_pair(xi if mover == "plus" else None, xi if mover == "minus" else None, L=L,
                            k=float(sec.get("k", 0.0)))
    um = unfold(model)
    T = L / um.vbar0
    times = np.linspace(float(sec.get("t_start", 1.0)), float(sec.get("t_stop", 1.0)),
                        int(sec.get("t_points", 1))) * T
    kw = dict(epsilon=nc.epsilon, order=nc.quadrature_order, base_panels=int(sec.get("base_panels", 8)))
    norm = overlap_norm(packets, um, **kw)
    rows, ratios = [], []
    for t in times:
        F = overlap_F(packets, um, float(t), **kw)
        r = F.modulus / norm.modulus
        ratios.append(r)
        rows.append((t, F.value.real, F.value.imag, F.modulus, r, F.tolerance))
    out.csv("overlap.csv", ["t", "re", "im", "abs", "ratio", "tolerance"], rows)
    k = int(np.argmax(ratios))
    out.json("overlap.json", {"T": T, "vbar0": um.vbar0, "norm": norm.modulus, "norm_tolerance": norm.tolerance,
                              "norm_raw": {repr(e): abs(v) for e, v in norm.raw.items()},
                              "center": center, "sigma": sigma, "k0": k0, "mover": mover,
                              "max_ratio": ratios[k], "t_at_max": times[k],
                              "quadrature_order": nc.quadrature_order})
    if times.size > 1:
        out.svg("overlap.svg", svg.line_plot(times / T, [("|F(t)| / <Phi|Phi>", ratios)], title="one-particle overlap",
                                             xlabel="t/T", ylabel="ratio", comment=out.comment))
    return f"overlap: max |F(t)|/<Phi|Phi> = {ratios[k]:.8g} at t = {times[k] / T:.6g} T"


_PIPELINES = {"spectrum": cmd_spectrum, "check-pwt": cmd_check_pwt, "correlate": cmd_correlate,
              "invert": cmd_invert, "wkb": cmd_wkb, "overlap": cmd_overlap}


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one pipeline; prints the verdict line and returns the exit code."""
    stdout = stdout or sys.stdout
    out = Writer(cfg)
    line = _PIPELINES[cfg.command](cfg, out)
    print(line, file=stdout)
    return 0


# --------------------------------------------------------------------------- entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pwtransfer", description="Perfect wave transfer analysis of inhomogeneous TLL channels.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="pipeline to run")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--grid", type=int, dest="grid_points", help="grid points (odd)")
    p.add_argument("--eps-spec", type=float, dest="eps_spec")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--modes", type=int, dest="n_modes")
    p.add_argument("--svg", action="store_true", help="also render SVG figures")
    p.add_argument("--version", action="version", version=f"pwtransfer {__version__}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {k: getattr(args, k) for k in ("n_max", "grid_points", "eps_spec", "epsilon", "n_modes",
                                                   "out", "svg")}
        cfg = load_config(args.config, args.command, overrides)
        return run(cfg)
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except PWTError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
