import json
import math

import numpy as np
import pytest

from ionprotect import (
    DensityMatrix,
    Environment,
    FockSpace,
    Generator,
    ParseError,
    ValidationError,
    cat_plus_state,
    coherent_state,
    emit_timeseries,
    environment_channels,
    parse_scenario,
    propagate,
    run_scenario,
    scenario_from_dict,
    steady_report,
)


def qubit_doc(**over):
    doc = {
        "name": "qubit-test",
        "target": {"kind": "qubit", "amplitudes": [1, 1]},
        "model": "reduced",
        "truncation": 10,
        "grid": {"t_max": 60.0, "points": 13},
    }
    doc.update(over)
    return doc


# ---------------------------------------------------------------------------
# parsing and validation
# ---------------------------------------------------------------------------

def test_minimal_scenario_defaults():
    sc = parse_scenario(json.dumps({"target": {"kind": "qubit", "amplitudes": [1, 1]}}))
    assert sc.truncation == 20
    assert sc.model == "both"
    assert sc.mode == "protect"
    assert sc.drives == "auto"
    assert sc.environment.kind == "none"
    assert sc.physical == {"Gamma": 4.0, "Omega1": 2.0, "eta": 0.2, "nu": 25.0}
    assert sc.recoil_nodes == 16
    assert sc.grid == {"t_max": None, "points": 200}


def test_default_truncation_tracks_target_energy():
    cat = scenario_from_dict({"target": {"kind": "cat", "alpha": math.sqrt(3)},
                              "model": "reduced"})
    assert cat.truncation == 34
    phase = scenario_from_dict({"target": {"kind": "phase", "N": 3}})
    assert phase.truncation == 22
    squeezed = scenario_from_dict({"target": {"kind": "squeezed", "r": 0.6}})
    assert squeezed.truncation == 20


def test_cat_cannot_request_full_model():
    with pytest.raises(ValidationError, match="reduced"):
        scenario_from_dict({"target": {"kind": "cat", "alpha": 1.0}, "model": "full"})


def test_environment_only_requires_reduced_model():
    with pytest.raises(ValidationError):
        scenario_from_dict({"target": {"kind": "qubit", "amplitudes": [1, 1]},
                            "drives": [], "model": "both"})


def test_negative_rate_rejected():
    with pytest.raises(ValidationError):
        scenario_from_dict(qubit_doc(environment={"kind": "thermal", "gamma": -1.0,
                                                  "n_thermal": 1.0}))


def test_unknown_keys_rejected():
    with pytest.raises(ValidationError):
        scenario_from_dict(qubit_doc(laser_power=3))
    with pytest.raises(ValidationError):
        scenario_from_dict(qubit_doc(target={"kind": "qubit", "amplitudes": [1, 1],
                                             "detuning": 0.5}))


def test_malformed_json_is_parse_error():
    with pytest.raises(ParseError):
        parse_scenario("{not json")


def test_complex_amplitudes_roundtrip():
    sc = scenario_from_dict(qubit_doc(target={"kind": "qubit",
                                              "amplitudes": [1, [0, 1]]}))
    assert sc.target["amplitudes"] == [[1.0, 0.0], [0.0, 1.0]]


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def test_qubit_protection_report(tmp_path):
    doc = qubit_doc(environment={"kind": "thermal", "gamma": 0.0005, "n_thermal": 2.0})
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    assert report.steady_state["fidelity"] >= 0.95
    assert report.steady_state["multiplicity"] == 1
    assert report.gap["Gamma_units"] > 0
    assert (tmp_path / "qubit-test" / "report.json").exists()
    assert (tmp_path / "qubit-test" / "timeseries.csv").exists()
    # audit completeness
    assert "max_trace_drift" in report.audit
    assert "min_eigenvalue" in report.audit


def test_preparation_reaches_target(tmp_path):
    doc = qubit_doc(name="prepare", mode="prepare", grid={"points": 9})
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    rows = (tmp_path / "prepare" / "timeseries.csv").read_text().strip().splitlines()
    last = rows[-1].split(",")
    assert float(last[1]) >= 0.999          # fidelity at t = 10/Gamma_eng
    assert float(rows[1].split(",")[1]) == pytest.approx(0.5, abs=1e-9)


def test_both_models_cross_coherence(tmp_path):
    doc = qubit_doc(name="both", model="both", truncation=8,
                    grid={"t_max": 40.0, "points": 9})
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    assert "max_full_reduced_trace_distance" in report.audit
    assert report.audit["max_full_reduced_trace_distance"] <= 0.05
    assert report.audit["g_over_Gamma"] == pytest.approx(0.05)
    assert report.audit["models"] == ["reduced", "full"]


def test_protect_mode_fidelity_starts_at_one(tmp_path):
    doc = qubit_doc(name="protect-start")
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    rows = (tmp_path / "protect-start" / "timeseries.csv").read_text().splitlines()
    assert rows[0] == "t_us,fidelity,excited_population,trace_drift,min_eigenvalue"
    assert float(rows[1].split(",")[1]) == pytest.approx(1.0, abs=1e-12)


def test_environment_only_run(tmp_path):
    doc = {
        "name": "bare-cat",
        "target": {"kind": "cat", "alpha": math.sqrt(3)},
        "drives": [],
        "model": "reduced",
        "environment": {"kind": "thermal", "gamma": 0.02, "n_thermal": 0.0},
        "truncation": 30,
        "grid": {"t_max": 2.0, "points": 9},
    }
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    assert report.engineered is None
    rows = (tmp_path / "bare-cat" / "timeseries.csv").read_text().strip().splitlines()
    fids = [float(r.split(",")[1]) for r in rows[1:]]
    assert fids[0] == pytest.approx(1.0, abs=1e-12)
    assert fids[-1] < fids[0]               # decoherence degrades the cat


def test_cat_coherence_decay_rate():
    # with zero-temperature contact the cat's cross coherence decays at
    # 2 |alpha|^2 gamma at early times, far faster than the energy
    space = FockSpace(35)
    alpha = math.sqrt(3)
    gamma = 0.01
    gen = Generator(environment_channels(Environment.thermal(gamma, 0.0), space))
    rho0 = DensityMatrix.from_ket(cat_plus_state(space, alpha))
    plus = coherent_state(space, alpha).amp
    minus = coherent_state(space, -alpha).amp
    cross = np.outer(plus, minus.conj())
    times = np.linspace(0.0, 1.0, 6)
    traj = propagate(gen, rho0, times)
    coherences = [abs(np.sum(cross.conj() * dm.mat)) for dm in traj]
    rate = -np.polyfit(times, np.log(coherences), 1)[0]
    assert rate == pytest.approx(2 * abs(alpha) ** 2 * gamma, rel=0.05)


def test_steady_report_shortcut():
    doc = qubit_doc(environment={"kind": "thermal", "gamma": 0.0005, "n_thermal": 2.0})
    rep = steady_report(scenario_from_dict(doc))
    assert rep["steady_state"]["fidelity"] >= 0.95
    assert rep["engineered"]["gamma_eng_MHz"] == pytest.approx(0.04, rel=1e-12)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def test_emit_timeseries_single_point(tmp_path):
    path = emit_timeseries(tmp_path / "one.csv", [0.0], [1.0], [0.0], [0.0], [0.0])
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert path.read_text().endswith("\n")


def test_timeseries_deterministic(tmp_path):
    doc = qubit_doc(name="det", grid={"t_max": 30.0, "points": 7})
    run_scenario(scenario_from_dict(doc), tmp_path / "a")
    run_scenario(scenario_from_dict(doc), tmp_path / "b")
    a = (tmp_path / "a" / "det" / "timeseries.csv").read_bytes()
    b = (tmp_path / "b" / "det" / "timeseries.csv").read_bytes()
    assert a == b
    ra = (tmp_path / "a" / "det" / "report.json").read_bytes()
    rb = (tmp_path / "b" / "det" / "report.json").read_bytes()
    assert ra == rb


def test_vacuum_target_designs_sideband_cooling(tmp_path):
    doc = {"name": "cool", "target": {"kind": "amplitudes", "amplitudes": [1]},
           "model": "reduced", "mode": "prepare", "truncation": 10,
           "grid": {"points": 7}}
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    assert report.engineered["gamma_eng_MHz"] == pytest.approx(0.04, rel=1e-12)
    assert len(report.engineered["drives"]) == 1
    assert report.steady_state["fidelity"] >= 1 - 1e-8


def test_full_model_only(tmp_path):
    doc = qubit_doc(name="full-only", model="full", truncation=8,
                    grid={"t_max": 20.0, "points": 7})
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    assert report.audit["models"] == ["full"]
    assert "max_full_reduced_trace_distance" not in report.audit
    rows = (tmp_path / "full-only" / "timeseries.csv").read_text().strip().splitlines()
    excited = [float(r.split(",")[2]) for r in rows[1:]]
    assert excited[0] == 0.0                 # electronic ground start
    assert max(excited) > 0.0                # drives populate the excited state


def test_report_only_outputs(tmp_path):
    doc = qubit_doc(name="report-only", outputs=["report"])
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    assert report.timeseries is None
    assert not (tmp_path / "report-only" / "timeseries.csv").exists()
    assert (tmp_path / "report-only" / "report.json").exists()


def test_normalized_scenario_reparses_identically():
    doc = qubit_doc(environment={"kind": "thermal", "gamma": 0.001, "n_thermal": 1.0},
                    mode="prepare")
    sc = scenario_from_dict(doc)
    again = scenario_from_dict(json.loads(json.dumps(sc.normalized())))
    assert again.normalized() == sc.normalized()


def test_report_fields_finite(tmp_path):
    doc = qubit_doc(name="finite")
    report = run_scenario(scenario_from_dict(doc), tmp_path)
    payload = json.loads((tmp_path / "finite" / "report.json").read_text())

    def walk(node):
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)
        elif isinstance(node, float):
            assert math.isfinite(node)

    walk(payload)
    assert payload["engineered"]["null_dim"] == 1
