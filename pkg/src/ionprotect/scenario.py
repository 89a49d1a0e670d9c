"""Declarative scenario runner.

A scenario is a JSON document selecting a target state, a drive
configuration (explicit beams, ``"auto"`` inverse design, or ``[]`` for an
environment-only baseline), an environment, the model level, and an
integration grid.  Rates are given in MHz and times in microseconds; they
are converted internally to units of the electronic decay rate, in which
every regime statement becomes a pure ratio.

Schema (defaults in parentheses):

    {
      "name": "qubit-protect",
      "target": {"kind": "qubit", "amplitudes": [1, 1]}
                | {"kind": "phase", "N": 3, "phi": 0.0}
                | {"kind": "cat", "alpha": 1.732}
                | {"kind": "squeezed", "r": 0.6}
                | {"kind": "amplitudes", "amplitudes": [...]},
      "drives": "auto" | [] | [{"rabi": x | [re, im], "sideband_k": k,
                                "eta": e, "label": "..."}],
      "physical": {"Gamma": 4.0, "Omega1": 2.0, "eta": 0.2, "nu": 25.0},
      "environment": {"kind": "none"}
                     | {"kind": "thermal", "gamma": g, "n_thermal": n}
                     | {"kind": "random_field", "rate": r},
      "model": "full" | "reduced" | ("both"),
      "mode": ("protect") | "prepare",
      "grid": {"t_max": us, "points": (200)},
      "truncation": D,                  # default from the target's <n>
      "recoil_nodes": (16),
      "outputs": (["report", "timeseries"])
    }

Complex numbers are written as [re, im].  ``nu`` (the trap frequency) is
recorded for documentation only; all drives are taken exactly on-sideband.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError, NegativeRate
from .hilbert import (
    FockSpace,
    basis_ket,
    cat_plus_state,
    default_dimension,
    ket_from_amplitudes,
    phase_state,
    squeezed_vacuum,
)
from .liouvillian import (
    DensityMatrix,
    Generator,
    fidelity,
    propagate,
    spectral_gap,
    steady_states,
    trace_distance,
)
from .pointer import (
    EngineeredDissipator,
    LaserDrive,
    cat_dissipator,
    qubit_drive,
    squeeze_dissipator,
    superposition_drive,
    vacuum_drive,
    verify_dark_state,
)
from .vibronic import (
    Environment,
    VibronicState,
    assemble_drive_operator,
    build_recoil_kernel,
    environment_channels,
    full_generator,
    propagate_vibronic,
    reduced_generator,
    rho22_estimate,
)

_TARGET_KINDS = ("qubit", "phase", "cat", "squeezed", "amplitudes")
_MODELS = ("full", "reduced", "both")
_MODES = ("protect", "prepare")
_DEFAULT_PHYSICAL = {"Gamma": 4.0, "Omega1": 2.0, "eta": 0.2, "nu": 25.0}
_TOP_KEYS = {"name", "target", "drives", "physical", "environment", "model",
             "mode", "grid", "truncation", "recoil_nodes", "outputs"}


def _complex_from(value, path):
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ValidationError(f"{path}: expected a number or [re, im], got {value!r}")


def _positive(value, path):
    if not isinstance(value, (int, float)) or not value > 0:
        raise ValidationError(f"{path}: expected a positive number, got {value!r}")
    return float(value)


def _nonnegative(value, path):
    if not isinstance(value, (int, float)) or value < 0:
        raise ValidationError(f"{path}: expected a nonnegative number, got {value!r}")
    return float(value)


@dataclass
class Scenario:
    name: str
    target: dict
    drives: object              # "auto" | list of drive dicts (may be empty)
    physical: dict
    environment: Environment
    model: str
    mode: str
    grid: dict
    truncation: int
    recoil_nodes: int
    outputs: list
    raw: dict = field(repr=False, default_factory=dict)

    def normalized(self) -> dict:
        """Scenario with every default applied, as written into reports."""
        env = {"kind": self.environment.kind}
        if self.environment.kind == "thermal":
            env.update(gamma=self.environment.gamma, n_thermal=self.environment.n_thermal)
        elif self.environment.kind == "random_field":
            env.update(rate=self.environment.rate)
        return {
            "name": self.name,
            "target": self.target,
            "drives": self.drives,
            "physical": self.physical,
            "environment": env,
            "model": self.model,
            "mode": self.mode,
            "grid": self.grid,
            "truncation": self.truncation,
            "recoil_nodes": self.recoil_nodes,
            "outputs": self.outputs,
        }


def _validate_target(target) -> dict:
    if not isinstance(target, dict) or "kind" not in target:
        raise ValidationError("target: expected an object with a 'kind' field")
    kind = target["kind"]
    if kind not in _TARGET_KINDS:
        raise ValidationError(f"target.kind: expected one of {_TARGET_KINDS}, got {kind!r}")
    out = {"kind": kind}
    extra = set(target) - {"kind"}
    if kind in ("qubit", "amplitudes"):
        if "amplitudes" not in target:
            raise ValidationError(f"target.amplitudes: required for kind {kind!r}")
        amps = target["amplitudes"]
        if not isinstance(amps, list) or not amps:
            raise ValidationError("target.amplitudes: expected a nonempty list")
        parsed = [_complex_from(a, f"target.amplitudes[{i}]") for i, a in enumerate(amps)]
        if kind == "qubit" and len(parsed) != 2:
            raise ValidationError("target.amplitudes: a qubit target has exactly 2 entries")
        out["amplitudes"] = [[a.real, a.imag] for a in parsed]
        extra -= {"amplitudes"}
    elif kind == "phase":
        n = target.get("N")
        if not isinstance(n, int) or n < 0:
            raise ValidationError(f"target.N: expected a nonnegative integer, got {n!r}")
        out["N"] = n
        out["phi"] = float(target.get("phi", 0.0))
        extra -= {"N", "phi"}
    elif kind == "cat":
        out["alpha"] = _complex_from(target.get("alpha", 0.0), "target.alpha")
        out["alpha"] = [out["alpha"].real, out["alpha"].imag]
        extra -= {"alpha"}
    elif kind == "squeezed":
        out["r"] = _nonnegative(target.get("r", 0.0), "target.r")
        extra -= {"r"}
    if extra:
        raise ValidationError(f"target: unknown keys {sorted(extra)}")
    return out


def _validate_environment(env) -> Environment:
    if env is None:
        return Environment.none()
    if not isinstance(env, dict) or "kind" not in env:
        raise ValidationError("environment: expected an object with a 'kind' field")
    kind = env["kind"]
    try:
        if kind == "none":
            if set(env) - {"kind"}:
                raise ValidationError(f"environment: unknown keys {sorted(set(env) - {'kind'})}")
            return Environment.none()
        if kind == "thermal":
            if set(env) - {"kind", "gamma", "n_thermal"}:
                raise ValidationError(
                    f"environment: unknown keys {sorted(set(env) - {'kind', 'gamma', 'n_thermal'})}")
            return Environment.thermal(_nonnegative(env.get("gamma", 0.0), "environment.gamma"),
                                       _nonnegative(env.get("n_thermal", 0.0),
                                                    "environment.n_thermal"))
        if kind == "random_field":
            if set(env) - {"kind", "rate"}:
                raise ValidationError(
                    f"environment: unknown keys {sorted(set(env) - {'kind', 'rate'})}")
            return Environment.random_field(_nonnegative(env.get("rate", 0.0),
                                                         "environment.rate"))
    except NegativeRate as exc:
        raise ValidationError(f"environment: {exc}") from exc
    raise ValidationError(f"environment.kind: unknown kind {kind!r}")


def _target_mean_excitation(target: dict) -> float:
    kind = target["kind"]
    if kind in ("qubit", "amplitudes"):
        c = np.array([complex(re, im) for re, im in target["amplitudes"]])
        p = np.abs(c) ** 2
        return float(np.sum(np.arange(len(c)) * p) / p.sum())
    if kind == "phase":
        return target["N"] / 2.0
    if kind == "cat":
        return abs(complex(*target["alpha"])) ** 2
    return math.sinh(target["r"]) ** 2


def scenario_from_dict(doc: dict, default_name: str = "scenario") -> Scenario:
    """Validate a parsed scenario document and apply all defaults."""
    if not isinstance(doc, dict):
        raise ValidationError("scenario: expected a JSON object at top level")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ValidationError(f"scenario: unknown keys {sorted(unknown)}")

    name = doc.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ValidationError("name: expected a nonempty string")

    if "target" not in doc:
        raise ValidationError("target: required")
    target = _validate_target(doc["target"])

    physical = dict(_DEFAULT_PHYSICAL)
    for key, val in (doc.get("physical") or {}).items():
        if key not in _DEFAULT_PHYSICAL:
            raise ValidationError(f"physical: unknown key {key!r}")
        physical[key] = val
    physical["Gamma"] = _positive(physical["Gamma"], "physical.Gamma")
    physical["Omega1"] = _positive(physical["Omega1"], "physical.Omega1")
    physical["nu"] = _positive(physical["nu"], "physical.nu")
    eta = physical["eta"]
    if not isinstance(eta, (int, float)) or not 0.0 < eta < 1.0:
        raise ValidationError(f"physical.eta: expected a value in (0, 1), got {eta!r}")
    physical["eta"] = float(eta)

    environment = _validate_environment(doc.get("environment"))

    model = doc.get("model", "both")
    if model not in _MODELS:
        raise ValidationError(f"model: expected one of {_MODELS}, got {model!r}")
    mode = doc.get("mode", "protect")
    if mode not in _MODES:
        raise ValidationError(f"mode: expected one of {_MODES}, got {mode!r}")

    drives = doc.get("drives", "auto")
    if drives != "auto":
        if not isinstance(drives, list):
            raise ValidationError("drives: expected 'auto' or a list of drive objects")
        parsed = []
        for i, dr in enumerate(drives):
            if not isinstance(dr, dict):
                raise ValidationError(f"drives[{i}]: expected an object")
            bad = set(dr) - {"rabi", "sideband_k", "eta", "label"}
            if bad:
                raise ValidationError(f"drives[{i}]: unknown keys {sorted(bad)}")
            rabi = _complex_from(dr.get("rabi"), f"drives[{i}].rabi")
            k = dr.get("sideband_k", 0)
            if not isinstance(k, int):
                raise ValidationError(f"drives[{i}].sideband_k: expected an integer")
            eta_d = dr.get("eta", 0.0)
            if not isinstance(eta_d, (int, float)) or not 0.0 <= eta_d < 1.0:
                raise ValidationError(f"drives[{i}].eta: expected a value in [0, 1)")
            parsed.append({"rabi": [rabi.real, rabi.imag], "sideband_k": k,
                           "eta": float(eta_d), "label": str(dr.get("label", f"drive_{i}"))})
        drives = parsed

    if target["kind"] == "cat" and model in ("full", "both") and drives == "auto":
        raise ValidationError(
            "model: cat targets have no finite drive realization; use model 'reduced'")
    if drives == [] and model != "reduced":
        raise ValidationError("model: environment-only runs (empty drives) use model 'reduced'")

    grid = doc.get("grid") or {}
    if set(grid) - {"t_max", "points"}:
        raise ValidationError(f"grid: unknown keys {sorted(set(grid) - {'t_max', 'points'})}")
    t_max = grid.get("t_max")
    if t_max is not None:
        t_max = _positive(t_max, "grid.t_max")
    points = grid.get("points", 200)
    if not isinstance(points, int) or points < 2:
        raise ValidationError(f"grid.points: expected an integer >= 2, got {points!r}")
    grid = {"t_max": t_max, "points": points}

    truncation = doc.get("truncation")
    if truncation is None:
        truncation = default_dimension(_target_mean_excitation(target))
    if not isinstance(truncation, int) or truncation < 2:
        raise ValidationError(f"truncation: expected an integer >= 2, got {truncation!r}")

    recoil_nodes = doc.get("recoil_nodes", 16)
    if not isinstance(recoil_nodes, int) or recoil_nodes < 1:
        raise ValidationError(f"recoil_nodes: expected a positive integer, got {recoil_nodes!r}")

    outputs = doc.get("outputs", ["report", "timeseries"])
    if (not isinstance(outputs, list)
            or any(o not in ("report", "timeseries") for o in outputs)):
        raise ValidationError("outputs: expected a list drawn from ['report', 'timeseries']")

    return Scenario(name=name, target=target, drives=drives, physical=physical,
                    environment=environment, model=model, mode=mode, grid=grid,
                    truncation=truncation, recoil_nodes=recoil_nodes,
                    outputs=list(outputs), raw=dict(doc))


def parse_scenario(text: str, default_name: str = "scenario") -> Scenario:
    """Parse and validate a JSON scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc, default_name=default_name)


# ---------------------------------------------------------------------------
# pipeline pieces
# ---------------------------------------------------------------------------

def target_ket(sc: Scenario, space: FockSpace):
    t = sc.target
    if t["kind"] in ("qubit", "amplitudes"):
        return ket_from_amplitudes(space, [complex(re, im) for re, im in t["amplitudes"]])
    if t["kind"] == "phase":
        return phase_state(space, t["N"], t["phi"])
    if t["kind"] == "cat":
        return cat_plus_state(space, complex(*t["alpha"]))
    return squeezed_vacuum(space, t["r"])


def design_dissipator(sc: Scenario, space: FockSpace) -> EngineeredDissipator | None:
    """Engineered dissipator in decay-rate units; None for environment-only runs."""
    if sc.drives == []:
        return None
    gamma_mhz = sc.physical["Gamma"]
    om1 = sc.physical["Omega1"] / gamma_mhz
    eta = sc.physical["eta"]
    if sc.drives == "auto":
        t = sc.target
        if t["kind"] in ("qubit", "amplitudes"):
            amps = [complex(re, im) for re, im in t["amplitudes"]]
            if len(amps) == 1:
                return vacuum_drive(space, eta, om1)
            if len(amps) == 2:
                return qubit_drive(space, amps[0], amps[1], eta, om1)
            return superposition_drive(space, amps, eta, om1)
        if t["kind"] == "phase":
            if t["N"] == 0:
                return vacuum_drive(space, eta, om1)
            amps = np.exp(1j * t["phi"] * np.arange(t["N"] + 1))
            if t["N"] == 1:
                return qubit_drive(space, amps[0], amps[1], eta, om1)
            return superposition_drive(space, amps, eta, om1)
        if t["kind"] == "cat":
            return cat_dissipator(space, complex(*t["alpha"]), (eta * om1) ** 2)
        return squeeze_dissipator(space, t["r"], om1, eta=eta)
    drives = [LaserDrive(complex(*d["rabi"]) / gamma_mhz, d["sideband_k"], d["eta"],
                         d["label"]) for d in sc.drives]
    g, d_op = assemble_drive_operator(space, drives)
    return EngineeredDissipator(d_op, 4.0 * g * g, drives, target_ket(sc, space),
                                meta={"family": "explicit", "coupling_g": g},
                                residual_tol=float("inf"))


def emit_timeseries(path, times_us, fidelities, excited, drifts, mineigs):
    """Deterministic delimited text: one row per grid point, fixed precision."""
    lines = ["t_us,fidelity,excited_population,trace_drift,min_eigenvalue"]
    for row in zip(times_us, fidelities, excited, drifts, mineigs):
        lines.append(",".join(f"{v:.12e}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    return Path(path)


@dataclass
class Report:
    name: str
    scenario: dict
    engineered: dict | None
    steady_state: dict
    gap: dict
    grid: dict
    timeseries: str | None          # reference relative to the report file
    audit: dict
    timeseries_path: str | None = None   # absolute location, not serialized

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "scenario": self.scenario,
            "engineered": self.engineered,
            "steady_state": self.steady_state,
            "spectral_gap": self.gap,
            "grid": self.grid,
            "timeseries": self.timeseries,
            "audit": self.audit,
        }

    def write(self, path) -> Path:
        payload = json.dumps(self.to_dict(), indent=2, sort_keys=True,
                             allow_nan=False) + "\n"
        Path(path).write_text(payload, encoding="ascii")
        return Path(path)


def _engineered_summary(sc: Scenario, diss: EngineeredDissipator | None) -> dict | None:
    if diss is None:
        return None
    gamma_mhz = sc.physical["Gamma"]
    out = diss.summary()
    out["gamma_eng_MHz"] = diss.gamma_eng * gamma_mhz
    out["gamma_eng_over_Gamma"] = diss.gamma_eng
    for dr in out["drives"]:
        dr["rabi_MHz"] = [dr["rabi"][0] * gamma_mhz, dr["rabi"][1] * gamma_mhz]
    check = verify_dark_state(diss.d, diss.target)
    out["null_dim"] = check.null_dim
    if sc.target["kind"] in ("qubit", "amplitudes"):
        out["target_note"] = "input amplitudes recorded verbatim; normalized on construction"
    return out


def _build_generators(sc: Scenario, space: FockSpace, diss, kernel, env_gu):
    gen_red = None
    gen_full = None
    if diss is not None:
        gen_red = reduced_generator(space, diss, kernel=kernel, env=env_gu)
        if sc.model in ("full", "both"):
            gen_full = full_generator(space, 1.0, drives=diss.drives,
                                      kernel=kernel, env=env_gu)
    else:
        gen_red = Generator(environment_channels(env_gu, space), space=space)
    return gen_red, gen_full


def run_scenario(sc: Scenario, out_dir) -> Report:
    """Design, steady-state analysis, propagation, and artifact emission."""
    space = FockSpace(sc.truncation)
    gamma_mhz = sc.physical["Gamma"]
    target = target_ket(sc, space)
    target_dm = DensityMatrix.from_ket(target)
    diss = design_dissipator(sc, space)
    env_gu = sc.environment.scaled(1.0 / gamma_mhz)
    kernel = build_recoil_kernel(space, sc.physical["eta"], sc.recoil_nodes)
    gen_red, gen_full = _build_generators(sc, space, diss, kernel, env_gu)

    sse = steady_states(gen_red)
    fid_ss = max(fidelity(target_dm, s) for s in sse.states) if sse.states else 0.0
    gap_gu = spectral_gap(gen_red)

    t_max = sc.grid["t_max"]
    if t_max is None:
        if diss is None:
            raise ValidationError("grid.t_max: required for environment-only runs")
        t_max = 10.0 / (diss.gamma_eng * gamma_mhz)   # microseconds
    times_us = np.linspace(0.0, t_max, sc.grid["points"])
    tau = times_us * gamma_mhz                        # decay-rate units

    rho0 = target_dm if sc.mode == "protect" else DensityMatrix.from_ket(basis_ket(space, 0))

    reduced_traj = None
    full_traj = None
    if sc.model in ("reduced", "both") or diss is None:
        reduced_traj = propagate(gen_red, rho0, tau)
    if gen_full is not None:
        full_traj = propagate_vibronic(gen_full, VibronicState.ground(rho0), tau)

    # emitted series follow the full model whenever it was integrated
    if full_traj is not None:
        motional = [st.motional() for st in full_traj]
        excited = [st.excited_population() for st in full_traj]
        drifts = [abs(st.trace() - 1.0) for st in full_traj]
        mineigs = [float(np.linalg.eigvalsh(st.to_joint()).min()) for st in full_traj]
    else:
        motional = [dm.mat for dm in reduced_traj]
        if diss is not None:
            excited = [float(np.trace(rho22_estimate(m, diss, 1.0)).real) for m in motional]
        else:
            excited = [0.0 for _ in motional]
        drifts = [abs(float(np.trace(m).real) - 1.0) for m in motional]
        mineigs = [float(np.linalg.eigvalsh(m).min()) for m in motional]
    fidelities = [fidelity(target_dm.mat, m) for m in motional]

    audit = {
        "max_trace_drift": max(drifts),
        "min_eigenvalue": min(mineigs),
        "models": [m for m, t in (("reduced", reduced_traj), ("full", full_traj))
                   if t is not None],
    }
    if diss is not None and diss.drives:
        g, _ = assemble_drive_operator(space, diss.drives)
        audit["g_over_Gamma"] = g
    if reduced_traj is not None and full_traj is not None:
        audit["max_full_reduced_trace_distance"] = max(
            trace_distance(m, dm.mat) for m, dm in zip(motional, reduced_traj))

    out_dir = Path(out_dir) / sc.name
    out_dir.mkdir(parents=True, exist_ok=True)
    ts_path = None
    if "timeseries" in sc.outputs:
        ts_path = str(emit_timeseries(out_dir / "timeseries.csv", times_us,
                                      fidelities, excited, drifts, mineigs))

    report = Report(
        name=sc.name,
        scenario=sc.normalized(),
        engineered=_engineered_summary(sc, diss),
        steady_state={"fidelity": fid_ss, "multiplicity": sse.multiplicity,
                      "degenerate": sse.degenerate},
        gap={"Gamma_units": gap_gu, "MHz": gap_gu * gamma_mhz},
        grid={"t_max_us": float(t_max), "points": sc.grid["points"]},
        timeseries="timeseries.csv" if ts_path else None,
        audit=audit,
        timeseries_path=ts_path,
    )
    if "report" in sc.outputs:
        report.write(out_dir / "report.json")
    return report


def steady_report(sc: Scenario) -> dict:
    """Steady-state analysis without propagation (the `steady` subcommand)."""
    space = FockSpace(sc.truncation)
    target_dm = DensityMatrix.from_ket(target_ket(sc, space))
    diss = design_dissipator(sc, space)
    env_gu = sc.environment.scaled(1.0 / sc.physical["Gamma"])
    kernel = build_recoil_kernel(space, sc.physical["eta"], sc.recoil_nodes)
    gen_red, _ = _build_generators(sc, space, diss, kernel, env_gu)
    sse = steady_states(gen_red)
    fid = max(fidelity(target_dm, s) for s in sse.states) if sse.states else 0.0
    gap_gu = spectral_gap(gen_red)
    return {
        "name": sc.name,
        "engineered": _engineered_summary(sc, diss),
        "steady_state": {"fidelity": fid, "multiplicity": sse.multiplicity,
                         "degenerate": sse.degenerate},
        "spectral_gap": {"Gamma_units": gap_gu, "MHz": gap_gu * sc.physical["Gamma"]},
    }


def design_report(sc: Scenario) -> dict:
    """Inverse design only (the `design` subcommand)."""
    space = FockSpace(sc.truncation)
    diss = design_dissipator(sc, space)
    return {"name": sc.name, "engineered": _engineered_summary(sc, diss)}
