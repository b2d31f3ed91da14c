"""Config-driven experiments writing CSV tables, SVG plots and a failure list.

A config is a YAML mapping::

    kind: mpemba_ferro
    output_dir: runs/mpemba        # optional
    parameters:
      angles: [pi/6, pi/3]
      ell_A: 100

Angles may be numbers or simple expressions in ``pi``. When ``output_dir``
is omitted the run goes to ``$GAUSSYM_OUTPUT_DIR/<kind>`` (default
``gaussym-output/<kind>``).
"""
from __future__ import annotations

import ast
import json
import math
import os
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

from . import core, fcs, oracle, qpp, quench
from .ensemble import (asymmetry_profile, random_gaussian_state, random_symmetric_state,
                       random_unitary)
from .errors import ConfigError
from .io import write_csv
from .oracle import IdentityCheck, VerificationReport
from .plotting import QPP_SUFFIX as QPP
from .plotting import PlotStyle, emit_plot

__all__ = [
    "ExperimentKind",
    "ExperimentConfig",
    "RunReport",
    "OUTPUT_ENV",
    "default_output_dir",
    "load_config",
    "parse_angle",
    "run",
    "verify_suite",
]

OUTPUT_ENV = "GAUSSYM_OUTPUT_DIR"


class ExperimentKind(str, Enum):
    MPEMBA_FERRO = "mpemba_ferro"
    NEEL_RESTORATION = "neel_restoration"
    RANDOM_ENSEMBLE = "random_ensemble"
    FCS_VARIANCE = "fcs_variance"
    VERIFY_SUITE = "verify_suite"


# --- parameter parsing ---------------------------------------------------------

_ALLOWED_OPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
                ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def parse_angle(value):
    """Number or arithmetic expression in ``pi`` (``"pi/6"``, ``"3*pi/8"``)."""
    if isinstance(value, bool):
        raise ConfigError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            x = ev(node.operand)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.BinOp) and type(node.op) in _ALLOWED_OPS:
            return _ALLOWED_OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ConfigError(f"unsupported angle expression {value!r}")

    try:
        return ev(ast.parse(str(value).strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad angle {value!r}: {exc}") from None


def _int(params, key, default, lo=1, hi=None):
    v = params.pop(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < lo \
            or (hi is not None and v > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ConfigError(f"{key} must be an integer {bound}, got {v!r}")
    return int(v)


def _float(params, key, default, lo=None):
    v = params.pop(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) \
            or (lo is not None and v < lo):
        raise ConfigError(f"{key} must be a finite number{'' if lo is None else f' >= {lo}'}")
    return float(v)


def _angles(params, default, lo, hi):
    raw = params.pop("angles", default)
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ConfigError("angles must be a non-empty list")
    out = [parse_angle(a) for a in raw]
    for a in out:
        if not lo - 1e-12 <= a <= hi + 1e-12:
            raise ConfigError(f"angle {a} outside [{lo}, {hi}]")
    return out


def _times(params, ell):
    raw = params.pop("times", None)
    if raw is None:
        raw = {"t_max": 1.5 * ell, "points": 60}
    if isinstance(raw, dict):
        raw = dict(raw)
        t_max = _float(raw, "t_max", 1.5 * ell, lo=0.0)
        pts = _int(raw, "points", 60, lo=2)
        if raw:
            raise ConfigError(f"unknown time-grid keys {sorted(raw)}")
        return [float(t) for t in np.linspace(0.0, t_max, pts)]
    if isinstance(raw, list) and raw and all(isinstance(t, (int, float)) and t >= 0 for t in raw):
        return sorted(float(t) for t in raw)
    raise ConfigError("times must be {t_max, points} or a list of non-negative numbers")


def _seed(params, kind):
    if "seed" not in params:
        raise ConfigError(f"seed is mandatory for {kind.value}")
    return _int(params, "seed", None, lo=0)


def _validate(kind, params):
    p = dict(params or {})
    if kind is ExperimentKind.MPEMBA_FERRO:
        ell = _int(p, "ell_A", 100, lo=2)
        out = {"angles": _angles(p, ["pi/6", "pi/4", "pi/3"], 0.0, math.pi),
               "ell_A": ell, "L": _int(p, "L", 10 * ell, lo=ell), "times": _times(p, ell),
               "agreement_tolerance": _float(p, "agreement_tolerance", 0.05, lo=0.0)}
    elif kind is ExperimentKind.NEEL_RESTORATION:
        ell = _int(p, "ell", 100, lo=1)
        out = {"angles": _angles(p, [0, "pi/8", "pi/4", "3*pi/8", "pi/2"], 0.0, math.pi / 2),
               "ell": ell, "times": _times(p, ell)}
    elif kind is ExperimentKind.RANDOM_ENSEMBLE:
        sizes = p.pop("sizes", [60, 120])
        if not isinstance(sizes, list) or not sizes or not all(
                isinstance(s, int) and not isinstance(s, bool) and s >= 2 for s in sizes):
            raise ConfigError("sizes must be a list of integers >= 2")
        points = _int(p, "points", 20, lo=2)
        if any(s < points for s in sizes):
            raise ConfigError("every size must be at least the number of points")
        out = {"sizes": sizes, "points": points,
               "n_samples": _int(p, "n_samples", 2000, lo=2),
               "seed": _seed(p, kind)}
    elif kind is ExperimentKind.FCS_VARIANCE:
        ell = _int(p, "ell_A", 100, lo=2)
        betas = p.pop("betas", [0.1, 0.5, 1.0, 2.0])
        if not isinstance(betas, list) or not betas or not all(
                isinstance(b, (int, float)) and b > 0 for b in betas):
            raise ConfigError("betas must be a list of positive numbers")
        out = {"angles": _angles(p, ["pi/6", "pi/4", "pi/3"], 0.0, math.pi),
               "ell_A": ell, "L": _int(p, "L", 10 * ell, lo=ell), "times": _times(p, ell),
               "betas": [float(b) for b in betas],
               "agreement_tolerance": _float(p, "agreement_tolerance", 0.05, lo=0.0)}
    else:
        ells = p.pop("ells", [2, 3, 4])
        if not isinstance(ells, list) or not ells or not all(
                isinstance(e, int) and 1 <= e <= 4 for e in ells):
            raise ConfigError("ells must be a list of integers in 1..4")
        out = {"ells": ells, "n_states": _int(p, "n_states", 100),
               "sigma_trials": _int(p, "sigma_trials", 50),
               "n_unitaries": _int(p, "n_unitaries", 200),
               "n_channels": _int(p, "n_channels", 200),
               "seed": _seed(p, kind)}
    if p:
        raise ConfigError(f"unknown parameters for {kind.value}: {sorted(p)}")
    return out


def default_output_dir(kind):
    return Path(os.environ.get(OUTPUT_ENV, "gaussym-output")) / ExperimentKind(kind).value


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; ``parameters`` holds resolved defaults."""

    kind: ExperimentKind
    parameters: dict
    output_dir: Path

    @classmethod
    def from_mapping(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a mapping")
        doc = dict(doc)
        try:
            kind = ExperimentKind(doc.pop("kind"))
        except KeyError:
            raise ConfigError("config needs a 'kind'") from None
        except ValueError:
            allowed = ", ".join(k.value for k in ExperimentKind)
            raise ConfigError(f"unknown kind; expected one of {allowed}") from None
        params = doc.pop("parameters", {}) or {}
        if not isinstance(params, dict):
            raise ConfigError("parameters must be a mapping")
        out = doc.pop("output_dir", None)
        if doc:
            raise ConfigError(f"unknown top-level keys {sorted(doc)}")
        out = Path(out) if out is not None else default_output_dir(kind)
        return cls(kind, _validate(kind, params), out)

    def resolved(self):
        return {"kind": self.kind.value, "output_dir": str(self.output_dir),
                "parameters": self.parameters}


def load_config(path):
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return ExperimentConfig.from_mapping(doc)


@dataclass
class RunReport:
    kind: ExperimentKind
    output_dir: Path
    files: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def check(self, name, residual, tolerance):
        self.checks.append(IdentityCheck(name, float(residual), float(tolerance)))

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self):
        return not self.failures


def _label(theta):
    return f"theta={theta:.6g}"


def _csv(report, name, header, rows):
    report.files.append(write_csv(report.output_dir / name, header, rows))
    return report.files[-1]


def _plot(report, csv_path, style, **kw):
    report.files.append(emit_plot(csv_path, style, **kw))


# --- kinds ---------------------------------------------------------------------

def _run_mpemba(cfg, rep):
    p = cfg.parameters
    ell, L, times = p["ell_A"], p["L"], p["times"]
    exact, theory = {}, {}
    for i, th in enumerate(p["angles"]):
        spec = quench.tilted_ferro_spec(th, L)
        pts = quench.exact_asymmetry_curve(spec, ell, times)
        _csv(rep, f"exact_{i}.csv", ["t", "dS_gauss", "S_rho", "S_sym"], pts)
        prof = qpp.tilted_ferro_profile(th)
        q = [qpp.qpp_gaussian_asymmetry(prof, ell, t) for t in times]
        e = [pt.dS_gauss for pt in pts]
        exact[th], theory[th] = np.array(e), np.array(q)
        rep.check(f"{_label(th)}: exact curve non-negative", max(0.0, -min(e)), 1e-9)
        rep.check(f"{_label(th)}: qpp curve non-increasing",
                  max(0.0, float(np.max(np.diff(q), initial=0.0))), 1e-9)
        window = np.array(times) <= ell
        dev = float(np.max(np.abs(exact[th] - theory[th])[window]) / max(q[0], 1e-300))
        rep.values[f"{_label(th)} max |exact - qpp| / initial"] = dev
        rep.check(f"{_label(th)}: exact vs qpp on t <= ell_A", dev, p["agreement_tolerance"])
    header = ["t"]
    for th in p["angles"]:
        header += [_label(th), _label(th) + QPP]
    cols = [times] + [c for th in p["angles"] for c in (exact[th], theory[th])]
    path = _csv(rep, "asymmetry.csv", header, zip(*cols))
    _plot(rep, path, PlotStyle.OVERLAY, ylabel="Gaussian asymmetry")

    rows = []
    angles = p["angles"]
    for a in range(len(angles)):
        for b in range(a + 1, len(angles)):
            t1, t2 = angles[a], angles[b]
            res = qpp.mpemba_diagnosis(qpp.tilted_ferro_profile(t1),
                                       qpp.tilted_ferro_profile(t2), ell)
            s1, s2 = quench.tilted_ferro_spec(t1, L), quench.tilted_ferro_spec(t2, L)
            t_hi = times[-1] if times[-1] > 0 else 1.5 * ell
            _, tc_exact = qpp.find_crossing(
                lambda t: quench.exact_asymmetry_curve(s1, ell, [t])[0].dS_gauss,
                lambda t: quench.exact_asymmetry_curve(s2, ell, [t])[0].dS_gauss,
                t_hi, n_grid=max(len(times), 60))
            rows.append([t1, t2, res.ordering_at_zero,
                         "none" if res.crossing_time is None else res.crossing_time,
                         "none" if tc_exact is None else tc_exact, res.mpemba])
            rep.values[f"crossing {_label(t1)} vs {_label(t2)}"] = {
                "qpp": res.crossing_time, "exact": tc_exact, "mpemba": res.mpemba}
    if rows:
        _csv(rep, "crossings.csv",
             ["theta_1", "theta_2", "ordering_at_zero", "crossing_qpp", "crossing_exact",
              "mpemba"], rows)


def _run_neel(cfg, rep):
    p = cfg.parameters
    ell, times = p["ell"], p["times"]
    cols, rows = [times], []
    for th in p["angles"]:
        prof = qpp.neel_profile(th)
        cols.append([qpp.qpp_neel_asymmetry(prof, ell, t) for t in times])
        plateau = qpp.qpp_neel_asymmetry(prof, ell, math.inf)
        rows.append([th, plateau, plateau / ell])
    path = _csv(rep, "neel_qpp.csv", ["t"] + [_label(th) for th in p["angles"]], zip(*cols))
    _plot(rep, path, PlotStyle.LINES, ylabel="Gaussian asymmetry")
    _csv(rep, "neel_plateau.csv", ["theta", "plateau", "plateau_per_site"], rows)
    for th in (0.0, math.pi / 2):
        plateau = qpp.qpp_neel_asymmetry(qpp.neel_profile(th), ell, math.inf)
        rep.values[f"plateau {_label(th)}"] = plateau
        rep.check(f"restoration at {_label(th)}", abs(plateau), 1e-8 * ell)


def _run_ensemble(cfg, rep):
    p = cfg.parameters
    pts, seed, ns = p["points"], p["seed"], p["n_samples"]
    frac = np.arange(1, pts + 1) / pts
    summary, curves = [], {}
    for L in p["sizes"]:
        ells = [max(1, int(round(x * L))) for x in frac]
        est = asymmetry_profile(L, ells, ns, seed)
        summary += [[e.L, e.ell, e.n_samples, e.mean, e.std_error, e.seed] for e in est]
        mean = np.array([e.mean for e in est]) / L
        se = np.array([e.std_error for e in est]) / L
        curves[L] = (mean, se)
        x = np.array(ells) / L
        path = _csv(rep, f"ensemble_L{L}.csv",
                    ["ell_over_L", "mean", "std_error", "small_ell_law", "volume_law"],
                    zip(x, mean, se, x ** 2 / 4, x * math.log(2)))
        _plot(rep, path, PlotStyle.ERRORBAR, ylabel="mean Gaussian asymmetry / L")
        jumps = np.abs(np.diff(mean)) / np.sqrt(se[1:] ** 2 + se[:-1] ** 2)
        rep.values[f"L={L} largest adjacent jump / combined SE"] = float(np.max(jumps))
        rep.values[f"L={L} mean / (L log 2) at ell = L"] = float(mean[-1] / math.log(2))
    _csv(rep, "ensemble.csv", ["L", "ell", "n_samples", "mean", "std_error", "seed"], summary)
    sizes = p["sizes"]
    for a, b in zip(sizes[:-1], sizes[1:]):
        (m1, s1), (m2, s2) = curves[a], curves[b]
        z = float(np.max(np.abs(m1 - m2) / np.sqrt(s1 ** 2 + s2 ** 2)))
        rep.values[f"collapse L={a} vs L={b} (max |diff| / combined SE)"] = z
        rep.check(f"size collapse L={a} vs L={b}", z, 3.0)


def _run_fcs(cfg, rep):
    p = cfg.parameters
    ell, L, times = p["ell_A"], p["L"], p["times"]
    header, cols = ["t"], [times]
    for i, th in enumerate(p["angles"]):
        spec = quench.tilted_ferro_spec(th, L)
        ex = np.array([v for _, v in quench.exact_variance_curve(spec, ell, times)])
        prof = qpp.tilted_ferro_profile(th)
        q = np.array([qpp.qpp_variance_difference(prof, ell, t) for t in times])
        header += [_label(th), _label(th) + QPP]
        cols += [ex, q]
        window = np.array(times) <= ell
        dev = float(np.max(np.abs(ex - q)[window]) / max(q[0], 1e-300))
        rep.values[f"{_label(th)} variance max |exact - qpp| / initial"] = dev
        rep.check(f"{_label(th)}: variance exact vs qpp on t <= ell_A", dev,
                  p["agreement_tolerance"])

        C = quench.correlation_matrix_at(spec, 0.0, ell).C
        S = core.symmetrise(C)
        fc = []
        for b in p["betas"]:
            lz, lzs = fcs.log_fcs(C, b), fcs.log_fcs(S, b)
            fc.append([b, lz, lzs, lz - lzs])
            rep.check(f"{_label(th)}: FCS asymmetry >= 0 at beta={b:g}", max(0.0, lzs - lz),
                      1e-10)
        _csv(rep, f"fcs_{i}.csv", ["beta", "logZ", "logZ_sym", "deltaZ"], fc)
        k, ks = fcs.charge_cumulants(C, 4), fcs.charge_cumulants(S, 4)
        _csv(rep, f"cumulants_{i}.csv", ["order", "value", "value_sym", "difference"],
             [[m + 1, k[m], ks[m], k[m] - ks[m]] for m in range(4)])
        rep.check(f"{_label(th)}: variance identity",
                  abs(k[1] - ks[1] - fcs.variance_difference(C)), 1e-6)
    path = _csv(rep, "variance.csv", header, zip(*cols))
    _plot(rep, path, PlotStyle.OVERLAY, ylabel="Tr F F^dag")


def verify_suite(ells=(2, 3, 4), n_states=100, sigma_trials=50, n_unitaries=200,
                 n_channels=200, seed=0):
    """Oracle identities and monotonicity properties on random states.

    Returns a :class:`VerificationReport` with one check per state and
    identity, and ``values`` holding the worst residual per identity.
    """
    rep = VerificationReport()
    for ell in ells:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(ell,)))
        for i in range(n_states):
            C = random_gaussian_state(ell, rng, pure=(i % 4 == 0))
            rep.extend(oracle.verify_ng_identity(C))
            rho = oracle.dense_from_corrmat(C)
            C2 = random_gaussian_state(ell, rng)
            w = rng.uniform(0.2, 0.8)
            mix = oracle.DenseState(w * rho.rho + (1 - w) * oracle.dense_from_corrmat(C2).rho)
            rep.extend(oracle.verify_composition(mix))
            rep.extend(oracle.verify_minimality(C, sigma_trials, rng))
            rep.add("dense entropy vs correlation-matrix entropy",
                    abs(oracle.dense_entropy(rho) - core.entropy(C)), 1e-7)
            for b in (-2.0, -0.5, 0.5, 2.0):
                rep.add("dense FCS vs determinant formula",
                        abs(oracle.dense_log_fcs(rho, b) - fcs.log_fcs(C, b)), 1e-8)

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(99,)))
    for _ in range(n_unitaries):
        ell = int(rng.integers(2, 7))
        C = random_gaussian_state(ell, rng)
        V = random_unitary(ell, rng)
        drift = abs(core.gaussian_asymmetry(core.conjugate_number_conserving(C, V))
                    - core.gaussian_asymmetry(C))
        rep.add("invariance under number-conserving unitaries", drift, 1e-8)
    for _ in range(n_channels):
        ell = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        C = random_gaussian_state(ell, rng)
        anc = random_symmetric_state(m, rng)
        V = random_unitary(ell + m, rng)
        out = core.dilation_channel(C, anc, V)
        rep.add("monotone under symmetric Gaussian channels",
                max(0.0, core.gaussian_asymmetry(out) - core.gaussian_asymmetry(C)), 1e-8)
    names = dict.fromkeys(c.name for c in rep.checks)
    rep.values = {n: rep.max_residual(n) for n in names}
    return rep


def _run_verify(cfg, rep):
    p = cfg.parameters
    res = verify_suite(p["ells"], p["n_states"], p["sigma_trials"], p["n_unitaries"],
                       p["n_channels"], p["seed"])
    rows = []
    for name in res.values:
        sub = [c for c in res.checks if c.name == name]
        rows.append([name, max(c.residual for c in sub), sub[0].tolerance, len(sub),
                     all(c.passed for c in sub)])
    _csv(rep, "verification.csv", ["check", "max_residual", "tolerance", "count", "passed"],
         rows)
    rep.checks.extend(res.checks)
    rep.values.update(res.values)


_RUNNERS = {
    ExperimentKind.MPEMBA_FERRO: _run_mpemba,
    ExperimentKind.NEEL_RESTORATION: _run_neel,
    ExperimentKind.RANDOM_ENSEMBLE: _run_ensemble,
    ExperimentKind.FCS_VARIANCE: _run_fcs,
    ExperimentKind.VERIFY_SUITE: _run_verify,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def run(cfg):
    """Execute ``cfg`` and write its outputs; never raises on property failures.

    The output directory receives ``config.resolved.yaml``, the CSV tables
    and SVG plots of the kind, and ``failures.json`` listing every violated
    check (empty when all pass).
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = RunReport(cfg.kind, out)
    resolved = out / "config.resolved.yaml"
    resolved.write_text(yaml.safe_dump(cfg.resolved(), sort_keys=True))
    rep.files.append(resolved)
    start = time.perf_counter()
    _RUNNERS[cfg.kind](cfg, rep)
    rep.values["runtime_seconds"] = time.perf_counter() - start
    fails = [{"check": c.name, "residual": c.residual, "tolerance": c.tolerance}
             for c in rep.failures]
    path = out / "failures.json"
    path.write_text(json.dumps(fails, indent=2) + "\n")
    rep.files.append(path)
    return rep
