"""Scenario execution and artifact export.

``run_scenario`` dispatches a validated scenario to the Gaussian or
Liouvillian engine, attaches the requested synchronization analysis, and
returns a :class:`RunArtifact`; ``export`` writes it as CSV, JSON and SVG
with a provenance block embedded in every file.  Outputs are deterministic:
identical scenarios produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DefectiveSpectrum, ValidationError
from .gaussian import (
    BathConfig,
    HarmonicNetwork,
    detect_noiseless_modes,
    diagonalize,
    effective_couplings,
    evolve_moments,
    lindblad_coefficients,
    squeezed_vacuum,
)
from .liouville import (
    build_liouvillian,
    evolve_expm,
    evolve_spectral,
    gap_from_eigenvalues,
    spectral_decompose,
)
from .scenario import (
    Scenario,
    build_bath,
    build_dephasing_model,
    build_network,
    build_ohmic_bath,
    build_spin_pair,
)
from .spins import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    build_local_bath_me,
    correlator_observables,
    dephasing_pair_system,
    local_me_pair_system,
    radiated_intensity,
    site_operator,
)
from .svgplot import heatmap, line_chart
from .sync import Series, arnold_sweep, sync_report

_UNITS = {"t": "1/w1", "x_sq": "hbar/w1", "p_sq": "hbar*w1",
          "sx": "1", "sy": "1", "sz": "1",
          "re_sp_sm": "1", "im_sp_sm": "1", "intensity": "w1"}


@dataclass
class RunArtifact:
    """Everything one scenario run produced, ready for export."""

    name: str
    kind: str
    provenance: dict
    times: np.ndarray | None = None
    series: dict[str, np.ndarray] = field(default_factory=dict)
    sync: list[dict] = field(default_factory=list)
    spectrum: dict | None = None
    model_info: dict = field(default_factory=dict)
    sweep: dict | None = None


def _provenance(scenario: Scenario) -> dict:
    return {"tool": "qsync", "version": __version__, "scenario": scenario.data}


def _spin_initial_state(name: str) -> np.ndarray:
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    excited = np.array([1.0, 0.0], dtype=complex)
    ground = np.array([0.0, 1.0], dtype=complex)
    kets = {
        "plus_plus": np.kron(plus, plus),
        "excited_ground": np.kron(excited, ground),
        "ground_excited": np.kron(ground, excited),
        "excited_excited": np.kron(excited, excited),
    }
    psi = kets[name]
    return np.outer(psi, psi.conj())


def _spin_observable_matrices(names: list[str]) -> dict[str, np.ndarray]:
    single = {"sx": SIGMA_X, "sy": SIGMA_Y, "sz": SIGMA_Z}
    corr = correlator_observables()
    mats: dict[str, np.ndarray] = {}
    for name in names:
        base, _, idx = name.rpartition("_")
        if base in single:
            mats[name] = site_operator(single[base], int(idx) - 1)
    needs_corr = any(n.startswith(("re_sp_sm", "im_sp_sm")) for n in names)
    if needs_corr or "intensity" in names:
        mats.update(corr)
    return mats


def _run_harmonic(scenario: Scenario) -> RunArtifact:
    data = scenario.data
    network = build_network(data["model"])
    bath = build_bath(data["bath"])
    modes = diagonalize(network)
    kappa = effective_couplings(modes, bath)
    diss = lindblad_coefficients(modes, bath, kappa)
    state0 = squeezed_vacuum(network, data["initial"]["squeezing"])
    times = scenario.time_grid
    traj = evolve_moments(state0, modes, diss, times)
    series = {name: traj.observables[name] for name in scenario.observables}
    artifact = RunArtifact(scenario.name, scenario.kind, _provenance(scenario),
                           times=times, series=series)
    artifact.model_info = {
        "mode_frequencies": modes.Omega.tolist(),
        "mode_matrix": modes.F.tolist(),
        "kappa": kappa.tolist(),
        "Gamma": diss.Gamma.tolist(),
        "D": diss.D.tolist(),
        "noiseless_modes": detect_noiseless_modes(diss),
    }
    return artifact


def _run_spin(scenario: Scenario) -> RunArtifact:
    data = scenario.data
    if scenario.kind == "spin_pair_local_bath":
        model = build_spin_pair(data["model"])
        me = build_local_bath_me(model, build_ohmic_bath(data["bath"]), data["secular"])
        system = me.system
        info = {
            "E1": model.E1, "E2": model.E2,
            "theta_plus": model.theta_plus, "theta_minus": model.theta_minus,
            "mixing_angle": model.mixing_angle,
            "gamma_tilde": me.gamma_tilde.tolist(),
            "secular": me.secular,
        }
    elif scenario.kind == "spin_pair_dephasing":
        dm = build_dephasing_model(data["model"])
        system = dephasing_pair_system(dm)
        coherence_eigs = np.linalg.eigvals(dm.Lc)
        info = {
            "coherence_block_eigenvalues": _complex_list(coherence_eigs),
            "coherence_gap": _gap_dict(gap_from_eigenvalues(coherence_eigs)),
        }
    else:
        m = data["model"]
        system = local_me_pair_system(m["omega1"], m["omega2"], m["coupling"],
                                      m["gamma1"], m["gamma2"])
        info = {}

    rho0 = _spin_initial_state(data["initial"]["state"])
    times = scenario.time_grid
    mats = _spin_observable_matrices(scenario.observables)
    L = build_liouvillian(system)
    eigenvalues = None
    try:
        dec = spectral_decompose(L)
        eigenvalues = dec.eigenvalues
        traj = evolve_spectral(dec, rho0, times, mats)
    except DefectiveSpectrum:
        eigenvalues = np.linalg.eigvals(L.mat)
        traj = evolve_expm(L, rho0, times, mats)

    series: dict[str, np.ndarray] = {}
    for name in scenario.observables:
        if name.startswith("re_sp_sm"):
            series[name] = traj.expectations["sp_sm" + name[len("re_sp_sm"):]].real
        elif name.startswith("im_sp_sm"):
            series[name] = traj.expectations["sp_sm" + name[len("im_sp_sm"):]].imag
        elif name == "intensity":
            corr = np.empty((times.size, 2, 2), dtype=complex)
            for i in range(2):
                for j in range(2):
                    corr[:, i, j] = traj.expectations[f"sp_sm_{i + 1}{j + 1}"]
            series[name] = radiated_intensity(corr, np.array(data["intensity"]["rates"]))
        else:
            series[name] = traj.expectations[name].real

    artifact = RunArtifact(scenario.name, scenario.kind, _provenance(scenario),
                           times=times, series=series, model_info=info)
    artifact.spectrum = {
        "eigenvalues": _complex_list(eigenvalues),
        "gap": _gap_dict(gap_from_eigenvalues(eigenvalues)),
    }
    return artifact


def _gap_dict(report) -> dict:
    return {
        "slow_index": report.slow_index,
        "slow_rate": report.slow_rate,
        "next_rate": report.next_rate,
        "gap_ratio": report.gap_ratio,
        "degenerate_frequencies": report.degenerate_frequencies,
    }


def _complex_list(values: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in values]


def _attach_sync(artifact: RunArtifact, scenario: Scenario) -> None:
    analysis = scenario.analysis
    if not analysis:
        return
    block = analysis["pearson"]
    for pair in block["pairs"]:
        s1 = Series(artifact.times, artifact.series[pair[0]])
        s2 = Series(artifact.times, artifact.series[pair[1]])
        report = sync_report(s1, s2, block["window"], block["threshold"])
        artifact.sync.append({
            "pair": list(pair),
            "window": block["window"],
            "threshold": block["threshold"],
            "onset": report.onset,
            "times": report.pearson.times,
            "values": report.pearson.values,
        })


def run_scenario(scenario: Scenario) -> RunArtifact:
    """Execute one scenario and attach its synchronization analysis."""
    if scenario.kind == "harmonic":
        artifact = _run_harmonic(scenario)
    else:
        artifact = _run_spin(scenario)
    _attach_sync(artifact, scenario)
    return artifact


def run_sweep(scenario: Scenario, threads: int = 1) -> RunArtifact:
    """Run the scenario's two-parameter sweep; cells run independently."""
    sweep = scenario.sweep
    if sweep is None:
        raise ValidationError("scenario has no sweep block")
    data = scenario.data
    bath = build_bath(data["bath"])
    squeezing = data["initial"]["squeezing"]
    dt = data["time"]["dt"]
    eval_time, window = sweep["eval_time"], sweep["window"]
    n_out = int(math.ceil((eval_time + window) / dt)) + 1
    times = np.linspace(0.0, (n_out - 1) * dt, n_out)
    omega1 = data["model"]["frequencies"][0]
    form = data["model"].get("coupling_form", "bilinear")

    def cell_runner(coupling: float, omega2: float) -> tuple[Series, Series]:
        model = {"frequencies": [omega1, omega2], "coupling": coupling,
                 "coupling_form": form}
        network = build_network(model)
        modes = diagonalize(network)
        diss = lindblad_coefficients(modes, bath, effective_couplings(modes, bath))
        traj = evolve_moments(squeezed_vacuum(network, squeezing), modes, diss, times)
        return (Series(times, traj.observables["x_sq_1"]),
                Series(times, traj.observables["x_sq_2"]))

    couplings = np.linspace(sweep["coupling"]["min"], sweep["coupling"]["max"],
                            sweep["coupling"]["num"])
    frequencies = np.linspace(sweep["omega2"]["min"], sweep["omega2"]["max"],
                              sweep["omega2"]["num"])
    result = arnold_sweep(couplings, frequencies, cell_runner, eval_time, window,
                          threads=threads)
    artifact = RunArtifact(scenario.name, scenario.kind, _provenance(scenario))
    artifact.sweep = {
        "couplings": result.couplings,
        "frequencies": result.frequencies,
        "values": result.values,
        "eval_time": eval_time,
        "window": window,
    }
    return artifact


# ---------------------------------------------------------------------------
# Export

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _unit(name: str) -> str:
    base, _, _ = name.rpartition("_")
    return _UNITS.get(base or name, _UNITS.get(name, "1"))


def _provenance_line(artifact: RunArtifact) -> str:
    return "# provenance: " + json.dumps(artifact.provenance, sort_keys=True,
                                         separators=(",", ":"))


def _nan_to_none(values) -> list:
    return [None if (isinstance(v, float) and math.isnan(v)) else v for v in values]


def _artifact_dict(artifact: RunArtifact) -> dict:
    out: dict = {
        "name": artifact.name,
        "kind": artifact.kind,
        "provenance": artifact.provenance,
        "model_info": artifact.model_info,
        "spectrum": artifact.spectrum,
    }
    if artifact.times is not None:
        out["trajectory"] = {
            "times": artifact.times.tolist(),
            "series": {k: v.tolist() for k, v in artifact.series.items()},
        }
    else:
        out["trajectory"] = None
    out["sync"] = [
        {
            "pair": block["pair"],
            "window": block["window"],
            "threshold": block["threshold"],
            "onset": block["onset"],
            "times": np.asarray(block["times"]).tolist(),
            "values": _nan_to_none(np.asarray(block["values"]).tolist()),
        }
        for block in artifact.sync
    ]
    if artifact.sweep is not None:
        out["sweep"] = {
            "couplings": np.asarray(artifact.sweep["couplings"]).tolist(),
            "frequencies": np.asarray(artifact.sweep["frequencies"]).tolist(),
            "values": [_nan_to_none(row) for row in
                       np.asarray(artifact.sweep["values"]).tolist()],
            "eval_time": artifact.sweep["eval_time"],
            "window": artifact.sweep["window"],
        }
    else:
        out["sweep"] = None
    return out


def import_artifact(path: str | Path) -> RunArtifact:
    """Rebuild a :class:`RunArtifact` from an exported JSON file."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    artifact = RunArtifact(raw["name"], raw["kind"], raw["provenance"])
    if raw.get("trajectory"):
        artifact.times = np.array(raw["trajectory"]["times"])
        artifact.series = {k: np.array(v) for k, v in raw["trajectory"]["series"].items()}
    artifact.model_info = raw.get("model_info", {})
    artifact.spectrum = raw.get("spectrum")
    for block in raw.get("sync", []):
        artifact.sync.append({
            "pair": block["pair"],
            "window": block["window"],
            "threshold": block["threshold"],
            "onset": block["onset"],
            "times": np.array(block["times"]),
            "values": np.array([math.nan if v is None else v for v in block["values"]]),
        })
    if raw.get("sweep"):
        sw = raw["sweep"]
        artifact.sweep = {
            "couplings": np.array(sw["couplings"]),
            "frequencies": np.array(sw["frequencies"]),
            "values": np.array([[math.nan if v is None else v for v in row]
                                for row in sw["values"]]),
            "eval_time": sw["eval_time"],
            "window": sw["window"],
        }
    return artifact


def export(artifact: RunArtifact, formats: list[str], outdir: str | Path) -> list[Path]:
    """Write the artifact in the requested formats; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for fmt in formats:
        if fmt == "csv":
            written.extend(_export_csv(artifact, outdir))
        elif fmt == "json":
            written.append(_export_json(artifact, outdir))
        elif fmt == "svg":
            written.extend(_export_svg(artifact, outdir))
        else:
            raise ValidationError(f"unknown export format {fmt!r}")
    return written


def _export_csv(artifact: RunArtifact, outdir: Path) -> list[Path]:
    written = []
    if artifact.times is not None:
        path = outdir / f"{artifact.name}_trajectory.csv"
        names = list(artifact.series)
        header = ",".join([f"t[{_UNITS['t']}]"] + [f"{n}[{_unit(n)}]" for n in names])
        lines = [_provenance_line(artifact), header]
        cols = [artifact.times] + [artifact.series[n] for n in names]
        for k in range(artifact.times.size):
            lines.append(",".join(_fmt(col[k]) for col in cols))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(path)
    for i, block in enumerate(artifact.sync):
        suffix = "" if len(artifact.sync) == 1 else f"_{i + 1}"
        path = outdir / f"{artifact.name}_pearson{suffix}.csv"
        header = f"t[{_UNITS['t']}],C_{block['pair'][0]}_{block['pair'][1]}[1]"
        lines = [_provenance_line(artifact), header]
        for t, v in zip(block["times"], block["values"]):
            lines.append(f"{_fmt(t)},{'' if math.isnan(v) else _fmt(v)}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(path)
    if artifact.sweep is not None:
        path = outdir / f"{artifact.name}_sweep.csv"
        freqs = np.asarray(artifact.sweep["frequencies"])
        header = ",".join(["coupling[w1^2]"] + [f"omega2={_fmt(w)}" for w in freqs])
        lines = [_provenance_line(artifact), header]
        for lam, row in zip(np.asarray(artifact.sweep["couplings"]),
                            np.asarray(artifact.sweep["values"])):
            cells = [_fmt(lam)] + ["" if math.isnan(v) else _fmt(v) for v in row]
            lines.append(",".join(cells))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(path)
    if artifact.spectrum is not None:
        path = outdir / f"{artifact.name}_spectrum.csv"
        lines = [_provenance_line(artifact), "re_lambda[w1],im_lambda[w1]"]
        for re, im in artifact.spectrum["eigenvalues"]:
            lines.append(f"{_fmt(re)},{_fmt(im)}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        written.append(path)
    return written


def _export_json(artifact: RunArtifact, outdir: Path) -> Path:
    path = outdir / f"{artifact.name}.json"
    payload = json.dumps(_artifact_dict(artifact), sort_keys=True, indent=1,
                         allow_nan=False)
    path.write_text(payload + "\n", encoding="utf-8", newline="\n")
    return path


def _export_svg(artifact: RunArtifact, outdir: Path) -> list[Path]:
    written = []
    desc = _provenance_line(artifact)
    if artifact.times is not None and artifact.series:
        path = outdir / f"{artifact.name}_trajectory.svg"
        path.write_text(
            line_chart(artifact.times, artifact.series,
                       title=artifact.name, xlabel="t [1/w1]", ylabel="observable",
                       description=desc),
            encoding="utf-8", newline="\n")
        written.append(path)
    if artifact.sync:
        path = outdir / f"{artifact.name}_pearson.svg"
        curves = {
            f"C({b['pair'][0]},{b['pair'][1]})": np.asarray(b["values"])
            for b in artifact.sync
        }
        path.write_text(
            line_chart(np.asarray(artifact.sync[0]["times"]), curves,
                       title=f"{artifact.name}: windowed Pearson",
                       xlabel="t [1/w1]", ylabel="C", description=desc,
                       fixed_range=(-1.05, 1.05)),
            encoding="utf-8", newline="\n")
        written.append(path)
    if artifact.sweep is not None:
        path = outdir / f"{artifact.name}_sweep.svg"
        path.write_text(
            heatmap(np.asarray(artifact.sweep["frequencies"]),
                    np.asarray(artifact.sweep["couplings"]),
                    np.asarray(artifact.sweep["values"]),
                    title=f"{artifact.name}: |C| at t={artifact.sweep['eval_time']:g}",
                    xlabel="omega2/omega1", ylabel="coupling/omega1^2",
                    description=desc),
            encoding="utf-8", newline="\n")
        written.append(path)
    return written
