"""Scenario files: parsing, running, and deterministic output.

A scenario is a YAML mapping with exactly one state and one path spec::

    name: mixed_octant
    state:
      bloch: {r: 0.5, direction: [0, 0, 1]}
    path:
      waypoints: {points: [[0, 0, 1], [1, 0, 0], [0, 1, 0]], closed: true}
    resolution: {steps: 2000, substeps: 1}
    tolerances: {transport: 1.0e-6, integral: 1.0e-5, phase: 1.0e-9}
    outputs: {chi_samples: 64}

State specs: ``bloch`` (``r``, ``direction``) or ``explicit`` (``weights``
and ``frame``, a list of basis vectors).  Path specs: ``waypoints``
(``points``, ``closed``, ``transport``: evolution | frame | raw),
``constant`` (``hamiltonian``, ``duration``, ``project``), ``generators``
(``times``, ``matrices``, ``interpolation``, ``project``) or ``unitaries``
(``times``, ``matrices``).  Complex entries may be written as strings such
as ``"0.5-0.5j"``.  Angles (waypoints given as ``[polar, azimuth]``) are in
radians unless written with a ``deg`` suffix, e.g. ``"90deg"``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import tempfile
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import bloch, holonomy, interferometry, transport
from .core import DensityOperator, make_density
from .errors import MixPhaseError, ScenarioError
from .holonomy import PhaseReport
from .interferometry import InterferenceProfile

MIN_STEPS = 16
_ANGLE = re.compile(r"^\s*([-+0-9.eE]+)\s*(deg|rad)?\s*$")


@dataclass(frozen=True)
class Scenario:
    name: str
    state: dict
    path: dict
    steps: int = 2000
    substeps: int = 1
    transport_tol: float = holonomy.TRANSPORT_TOL
    integral_tol: float = holonomy.INTEGRAL_TOL
    phase_tol: float = interferometry.PHASE_TOL
    chi_samples: int = 64
    seed: int = 0
    description: str = ""
    source: str = field(default="", compare=False)

    def __post_init__(self):
        for what, spec in (("state", self.state), ("path", self.path)):
            if not isinstance(spec, dict) or len(spec) != 1:
                raise ScenarioError(f"exactly one {what} spec is required, got {sorted(spec or {})}",
                                    context=what)
        if self.steps < MIN_STEPS:
            raise ScenarioError(f"resolution must be at least {MIN_STEPS} steps, got {self.steps}",
                                context="resolution.steps")
        if self.substeps < 1:
            raise ScenarioError("substeps must be >= 1", context="resolution.substeps")
        if self.chi_samples and self.chi_samples < 3:
            raise ScenarioError("chi_samples must be 0 or at least 3", context="outputs.chi_samples")

    @property
    def state_kind(self) -> str:
        return next(iter(self.state))

    @property
    def path_kind(self) -> str:
        return next(iter(self.path))


def bundled_scenarios() -> list[str]:
    root = resources.files("mixphase") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def _read_source(name_or_path: str) -> tuple[str, str]:
    p = Path(name_or_path)
    if p.suffix in (".yaml", ".yml") or p.exists():
        try:
            return p.read_text(encoding="utf-8"), str(p)
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario file: {exc}", context=str(p)) from exc
    res = resources.files("mixphase") / "scenarios" / f"{name_or_path}.yaml"
    if not res.is_file():
        raise ScenarioError(f"no bundled scenario or file named {name_or_path!r} "
                            f"(bundled: {', '.join(bundled_scenarios())})")
    return res.read_text(encoding="utf-8"), f"bundled:{name_or_path}"


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"invalid YAML: {str(exc).splitlines()[0]}", context=source) from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a mapping", context=source)
    known = {"name", "description", "state", "path", "resolution", "tolerances", "outputs", "seed"}
    extra = set(doc) - known
    if extra:
        raise ScenarioError(f"unknown keys {sorted(extra)}", context=source)
    res = doc.get("resolution") or {}
    tol = doc.get("tolerances") or {}
    out = doc.get("outputs") or {}
    try:
        return Scenario(
            name=str(doc.get("name") or Path(source).stem),
            description=str(doc.get("description", "")),
            state=doc.get("state"),
            path=doc.get("path"),
            steps=int(res.get("steps", 2000)),
            substeps=int(res.get("substeps", 1)),
            transport_tol=float(tol.get("transport", holonomy.TRANSPORT_TOL)),
            integral_tol=float(tol.get("integral", holonomy.INTEGRAL_TOL)),
            phase_tol=float(tol.get("phase", interferometry.PHASE_TOL)),
            chi_samples=int(out.get("chi_samples", 64)),
            seed=int(doc.get("seed", 0)),
            source=source,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MixPhaseError):
            raise exc.with_context(source)
        raise ScenarioError(str(exc), context=source) from exc


def load_scenario(name_or_path: str) -> Scenario:
    """Load a bundled scenario by name, or a YAML file by path."""
    return parse_scenario(*_read_source(name_or_path))


def parse_angle(value) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    m = _ANGLE.match(str(value))
    if not m:
        raise ScenarioError(f"cannot parse angle {value!r}")
    x = float(m.group(1))
    return math.radians(x) if m.group(2) == "deg" else x


def _complex(value) -> complex:
    try:
        return complex(str(value).replace(" ", "")) if isinstance(value, str) else complex(value)
    except ValueError as exc:
        raise ScenarioError(f"cannot parse complex number {value!r}") from exc


def _matrix(rows, what: str) -> np.ndarray:
    try:
        m = np.array([[_complex(x) for x in row] for row in rows], dtype=np.complex128)
    except TypeError as exc:
        raise ScenarioError(f"{what} must be a list of rows") from exc
    return m


def _point(p) -> np.ndarray:
    if len(p) == 2:
        theta, phi = parse_angle(p[0]), parse_angle(p[1])
        return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    if len(p) == 3:
        return np.array([float(x) for x in p])
    raise ScenarioError(f"waypoint {p!r} must be [x, y, z] or [polar, azimuth]")


def _require(spec: dict, key: str, where: str):
    if key not in spec:
        raise ScenarioError(f"missing key {key!r}", context=where)
    return spec[key]


@dataclass(frozen=True, eq=False)
class Prepared:
    """State and unitary path ready for analysis."""

    rho0: DensityOperator
    path: transport.UnitaryPath
    frame: np.ndarray | None
    route: tuple
    drive: object = None


def _build_state(scn: Scenario):
    kind, spec = scn.state_kind, scn.state[scn.state_kind]
    where = f"state.{kind}"
    if kind == "bloch":
        r = float(_require(spec, "r", where))
        direction = spec.get("direction")
        return ("bloch", r, None if direction is None else _point(direction))
    if kind == "explicit":
        w = [float(x) for x in _require(spec, "weights", where)]
        frame = _matrix(_require(spec, "frame", where), f"{where}.frame").T
        return ("explicit", make_density(w, frame), frame)
    raise ScenarioError(f"unknown state kind {kind!r} (expected bloch or explicit)", context="state")


def prepare(scn: Scenario) -> Prepared:
    """Build the initial state and the unitary path described by a scenario."""
    try:
        state = _build_state(scn)
    except MixPhaseError as exc:
        raise exc.with_context(f"state.{scn.state_kind}")
    kind, spec = scn.path_kind, scn.path[scn.path_kind]
    where = f"path.{kind}"
    try:
        if kind == "waypoints":
            return _prepare_waypoints(scn, state, spec)
        if state[0] == "bloch":
            if state[2] is None:
                raise ScenarioError("bloch state needs a direction unless the path is given by waypoints")
            rho0 = bloch.bloch_density(bloch.BlochState.from_vector(state[1], state[2]))
            frame = None
        else:
            rho0, frame = state[1], state[2]
        if kind == "constant":
            h = _matrix(_require(spec, "hamiltonian", where), "hamiltonian")
            duration = float(spec.get("duration", 1.0))
            gen = transport.GeneratorPath.constant(h, duration, scn.steps)
            return _evolve(scn, rho0, frame, gen, bool(spec.get("project", True)))
        if kind == "generators":
            times = [float(t) for t in _require(spec, "times", where)]
            mats = [_matrix(m, "generator") for m in _require(spec, "matrices", where)]
            _check_samples(times)
            gen = transport.GeneratorPath(times, mats, spec.get("interpolation", "linear"))
            gen = gen.refined(-(-scn.steps // (len(times) - 1)))
            return _evolve(scn, rho0, frame, gen, bool(spec.get("project", True)))
        if kind == "unitaries":
            times = [float(t) for t in _require(spec, "times", where)]
            _check_samples(times)
            mats = [_matrix(m, "unitary") for m in _require(spec, "matrices", where)]
            return Prepared(rho0, transport.UnitaryPath(times, mats), frame, ("explicit unitaries",))
        raise ScenarioError(f"unknown path kind {kind!r} (expected waypoints, constant, generators or unitaries)")
    except MixPhaseError as exc:
        raise exc.with_context(where)


def _check_samples(times):
    if len(times) - 1 < MIN_STEPS:
        raise ScenarioError(f"path needs at least {MIN_STEPS} steps, got {len(times) - 1}")


def _evolve(scn, rho0, frame, gen, project: bool) -> Prepared:
    if project:
        path = transport.transport_evolution(rho0, gen, scn.substeps)
        return Prepared(rho0, path, frame, ("transport_evolution",))
    return Prepared(rho0, transport.integrate(gen, scn.substeps), frame, ("integrate (unprojected)",))


def _prepare_waypoints(scn, state, spec) -> Prepared:
    where = "path.waypoints"
    points = [_point(p) for p in _require(spec, "points", where)]
    sp = bloch.SpherePath(np.array(points), bool(spec.get("closed", True)), scn.steps)
    if state[0] == "bloch":
        if state[2] is not None and np.linalg.norm(state[2] / np.linalg.norm(state[2]) - sp.waypoints[0]) > 1e-9:
            raise ScenarioError("state direction must coincide with the first waypoint", context="state.bloch")
        drive = bloch.geodesic_generator_path(sp, state[1])
        rho0, frame0 = drive.rho0, drive.frames[0]
    else:
        rho0 = state[1]
        if rho0.dim != 2:
            raise ScenarioError("waypoint paths need a qubit state")
        drive = bloch.geodesic_generator_path(sp, 1.0)
        frame0 = state[2]
    mode = spec.get("transport", "evolution")
    gen = drive.generators
    if mode == "evolution":
        path = transport.transport_evolution(rho0, gen, scn.substeps)
        return Prepared(rho0, path, None, ("transport_evolution",), drive)
    if mode == "frame":
        path = transport.frame_transport(drive.frames, gen.times, drive.breaks)
        return Prepared(rho0, path, drive.frames[0] if state[0] == "bloch" else frame0,
                        ("frame_transport",), drive)
    if mode == "raw":
        return Prepared(rho0, transport.integrate(gen, scn.substeps), None, ("integrate (unprojected)",), drive)
    raise ScenarioError(f"unknown transport mode {mode!r} (expected evolution, frame or raw)", context=where)


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    scenario: Scenario
    report: PhaseReport
    profile: InterferenceProfile | None
    prepared: Prepared


def chi_grid(samples: int) -> np.ndarray:
    """``samples`` equally spaced values of chi on [0, 2 pi)."""
    return 2 * np.pi * np.arange(samples) / samples


def run_scenario(scn: Scenario) -> ScenarioResult:
    """Prepare, analyse, and (optionally) simulate the chi-scan of a scenario."""
    prep = prepare(scn)
    try:
        report = holonomy.analyze(prep.rho0, prep.path, frame=prep.frame,
                                  transport_tol=scn.transport_tol, phase_tol=scn.phase_tol,
                                  route=prep.route)
    except MixPhaseError as exc:
        raise exc.with_context("analysis")
    profile = None
    if scn.chi_samples:
        profile = interferometry.simulate_profile(prep.rho0, prep.path.final, chi_grid(scn.chi_samples),
                                                  scn.phase_tol)
    return ScenarioResult(scn, report, profile, prep)


def with_overrides(scn: Scenario, **kw) -> Scenario:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(scn, **kw) if kw else scn


def report_document(result: ScenarioResult) -> dict:
    """Report fields in fixed order."""
    rep, scn = result.report, result.scenario
    doc = {
        "scenario": scn.name,
        "source": scn.source,
        "dimension": result.prepared.rho0.dim,
        "samples": len(result.prepared.path),
        "route": list(rep.route),
        "total_phase": rep.total_phase,
        "visibility": rep.visibility,
        "gamma_d": rep.gamma_d,
        "gamma_g_trace": rep.gamma_g_trace,
        "gamma_g_integral": rep.gamma_g_integral,
        "gamma_g_connection": rep.gamma_g_connection,
        "route_gap": rep.route_gap,
        "routes_agree": None if rep.route_gap is None else rep.route_gap < scn.integral_tol,
        "defect": {"global": rep.defect.global_defect, "eigen": list(rep.defect.eigen_defects)},
        "per_eigenstate": [
            {"weight": t.weight, "visibility": t.visibility, "phase": t.phase} for t in rep.per_eigenstate
        ],
        "tolerances": {"transport": scn.transport_tol, "integral": scn.integral_tol, "phase": scn.phase_tol},
    }
    if result.profile is not None:
        doc["profile"] = {
            "samples": int(result.profile.chi.size),
            "fitted_phase": result.profile.phase,
            "fitted_visibility": result.profile.visibility,
        }
    return doc


def format_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def profile_csv(profile: InterferenceProfile) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["chi", "intensity"])
    for chi, y in profile.rows():
        w.writerow([format(chi, ".17g"), format(y, ".17g")])
    return buf.getvalue()


def write_atomic(dest, text: str) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    dest = Path(dest)
    try:
        dest.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=dest.parent, prefix=f".{dest.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, dest)
    except OSError as exc:
        raise OSError(f"cannot write {dest}: {exc.strerror or exc}") from exc
    return dest


def emit_profile(profile: InterferenceProfile, dest) -> Path:
    """CSV with header ``chi,intensity``, 17 significant digits, LF endings."""
    return write_atomic(dest, profile_csv(profile))
