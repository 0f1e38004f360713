"""Command-line front door.

Subcommands: spectrum, evolve, trajectories, cat, estimate, hologram,
sweep.  Every run writes a manifest.json holding the fully resolved
configuration (canonical SI unit strings), the effective seed, and the
package version; re-running any subcommand from its manifest reproduces
the outputs byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 I/O error.
"""

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import decoherence, holography, lindblad, models, mtparams, qstate, spectra
from . import trajectories as tj
from .exceptions import ConfigurationError, MtCavityError, NumericalError
from .units import format_quantity, parse_quantity

CSV_FLOAT = "{:.11e}"


# ---------------------------------------------------------------------------
# config reading


class Reader:
    """Typed dict reader that rejects unknown keys and re-emits canonical JSON."""

    def __init__(self, raw: dict, context: str):
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{context}: expected an object")
        self._raw = dict(raw)
        self._ctx = context
        self.canonical = {}

    def _pop(self, key, required, default):
        if key in self._raw:
            return self._raw.pop(key)
        if required:
            raise ConfigurationError(f"missing required key {self._ctx}.{key}")
        return default

    def qty(self, key, dimension, required=False, default=None):
        raw = self._pop(key, required, None)
        if raw is None:
            if default is not None:
                self.canonical[key] = format_quantity(default, dimension)
            return default
        value = parse_quantity(raw, dimension, key=f"{self._ctx}.{key}")
        self.canonical[key] = format_quantity(value, dimension)
        return value

    def number(self, key, required=False, default=None, kind=float, minimum=None):
        raw = self._pop(key, required, None)
        if raw is None:
            if default is not None:
                self.canonical[key] = kind(default)
            return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigurationError(f"{self._ctx}.{key}: expected a number")
        if kind is int and int(raw) != raw:
            raise ConfigurationError(f"{self._ctx}.{key}: expected an integer")
        value = kind(raw)
        if minimum is not None and value < minimum:
            raise ConfigurationError(f"{self._ctx}.{key}: must be >= {minimum}")
        self.canonical[key] = value
        return value

    def flag(self, key, default=False):
        raw = self._pop(key, False, default)
        if not isinstance(raw, bool):
            raise ConfigurationError(f"{self._ctx}.{key}: expected true/false")
        self.canonical[key] = raw
        return raw

    def choice(self, key, options, required=False, default=None):
        raw = self._pop(key, required, default)
        if raw is None:
            return None
        if raw not in options:
            raise ConfigurationError(
                f"{self._ctx}.{key}: expected one of {sorted(options)}, got {raw!r}"
            )
        self.canonical[key] = raw
        return raw

    def sub(self, key, required=False):
        raw = self._pop(key, required, None)
        if raw is None:
            return None
        r = Reader(raw, f"{self._ctx}.{key}")
        self.canonical[key] = r.canonical
        return r

    def sublist(self, key, required=False):
        raw = self._pop(key, required, None)
        if raw is None:
            return None
        if not isinstance(raw, list):
            raise ConfigurationError(f"{self._ctx}.{key}: expected a list")
        readers = []
        slots = []
        for i, item in enumerate(raw):
            r = Reader(item, f"{self._ctx}.{key}[{i}]")
            readers.append(r)
            slots.append(r.canonical)
        self.canonical[key] = slots
        return readers

    def raw_list(self, key, required=False, default=None):
        raw = self._pop(key, required, default)
        if raw is None:
            return None
        if not isinstance(raw, list):
            raise ConfigurationError(f"{self._ctx}.{key}: expected a list")
        self.canonical[key] = raw
        return raw

    def qty_vector(self, key, dimension, required=False):
        raw = self._pop(key, required, None)
        if raw is None:
            return None
        if not isinstance(raw, list) or len(raw) != 3:
            raise ConfigurationError(f"{self._ctx}.{key}: expected 3 quantities")
        values = [
            parse_quantity(v, dimension, key=f"{self._ctx}.{key}[{i}]")
            for i, v in enumerate(raw)
        ]
        self.canonical[key] = [format_quantity(v, dimension) for v in values]
        return tuple(values)

    def qty_values(self, key, dimension, required=False):
        raw = self._pop(key, required, None)
        if raw is None:
            return None
        if not isinstance(raw, list):
            raise ConfigurationError(f"{self._ctx}.{key}: expected a list")
        values = [
            parse_quantity(v, dimension, key=f"{self._ctx}.{key}[{i}]")
            for i, v in enumerate(raw)
        ]
        self.canonical[key] = [format_quantity(v, dimension) for v in values]
        return values

    def finish(self):
        if self._raw:
            names = ", ".join(sorted(self._raw))
            raise ConfigurationError(f"unknown key(s) in {self._ctx}: {names}")
        return self.canonical


def load_config(path: str, subcommand: str) -> dict:
    """Read a config file, a preset reference, or a previous manifest."""
    if path.startswith("preset:"):
        name = path.split(":", 1)[1]
        ref = resources.files("mtcavity") / "presets" / f"{name}.json"
        if not ref.is_file():
            raise ConfigurationError(f"unknown preset {name!r}")
        text = ref.read_text(encoding="utf-8")
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except FileNotFoundError:
            raise ConfigurationError(f"config file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON in {path}: {exc}") from None
    if isinstance(data, dict) and data.get("tool") == "mtcavity":
        if data.get("subcommand") != subcommand:
            raise ConfigurationError(
                f"manifest was written by subcommand {data.get('subcommand')!r}, "
                f"not {subcommand!r}"
            )
        data = data.get("config", {})
    return data


# ---------------------------------------------------------------------------
# output writers


def _fmt_cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return CSV_FLOAT.format(float(x))


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(x) for x in row) + "\n")


def _json_safe(obj):
    """Recursively replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return repr(x)
        return x
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_json_safe(obj), fh, indent=2, allow_nan=False)
        fh.write("\n")


def write_svg(path, grid):
    """Grayscale raster, one rect per pixel, row-major top to bottom."""
    g = np.asarray(grid, dtype=float)
    lo, hi = float(np.min(g)), float(np.max(g))
    span = hi - lo if hi > lo else 1.0
    ny, nx = g.shape
    cell = 4
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{nx * cell}" '
        f'height="{ny * cell}" shape-rendering="crispEdges">'
    ]
    for j in range(ny):
        for i in range(nx):
            level = int(round(255 * (g[j, i] - lo) / span))
            color = f"#{level:02x}{level:02x}{level:02x}"
            lines.append(
                f'<rect x="{i * cell}" y="{j * cell}" width="{cell}" '
                f'height="{cell}" fill="{color}"/>'
            )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _maybe_json_mirror(out, name, header, rows, fmt):
    if fmt == "json":
        records = [
            {h: (v if isinstance(v, (bool, int, str)) else float(v))
             for h, v in zip(header, row)}
            for row in rows
        ]
        write_json(out / f"{name}.json", records)


# ---------------------------------------------------------------------------
# shared builders


def build_model(reader: Reader):
    """Model block -> (LindbladModel, named operator dict)."""
    kind = reader.choice("kind", ("phase_damping", "cavity_rabi"), required=True)
    if kind == "phase_damping":
        omega = reader.qty("omega", "angular_frequency", default=0.0)
        kappa = reader.qty("kappa_phi", "angular_frequency", required=True)
        n_max = reader.number("n_max", required=True, kind=int, minimum=1)
        reader.finish()
        model = models.phase_damping_model(
            models.PhaseDampingParams(omega=omega, kappa_phi=kappa), n_max
        )
        n_op = qstate.boson_number(n_max)
        return model, {"n": n_op, "dim": n_max + 1, "boson_dim": n_max + 1,
                       "spin_dim": 1, "kind": kind}
    omega0 = reader.qty("omega0", "angular_frequency", required=True)
    omega = reader.qty("omega", "angular_frequency", required=True)
    lam = reader.qty("coupling", "angular_frequency", required=True)
    n_emitters = reader.number("n_emitters", required=True, kind=int, minimum=1)
    kappa = reader.qty("kappa", "angular_frequency", default=0.0)
    n_max = reader.number("n_max", required=True, kind=int, minimum=1)
    reader.finish()
    space = qstate.HilbertSpaceSpec(n_emitters, n_max)
    p = models.RabiModelParams(
        omega0=omega0, omega=omega, lam=lam, n_emitters=n_emitters, kappa=kappa
    )
    model = models.cavity_decay_model(p, space)
    ops = qstate.build_operator_set(space)
    return model, {
        "n": ops.a_dag @ ops.a,
        "sz": ops.Sz,
        "excitation": ops.Sz + ops.a_dag @ ops.a,
        "dim": space.dim,
        "boson_dim": space.boson_dim,
        "spin_dim": space.spin_dim,
        "kind": kind,
    }


def build_state(reader: Reader, meta: dict) -> np.ndarray:
    """Initial-state block -> normalized vector on the model space."""
    kind = reader.choice(
        "kind",
        ("number", "uniform", "coherent", "excited_vacuum", "cat_number"),
        required=True,
    )
    db = meta["boson_dim"]
    ds = meta["spin_dim"]

    def lift(boson_vec):
        if ds == 1:
            return boson_vec
        out = np.zeros(ds * db, dtype=complex)
        out[(ds - 1) * db:] = boson_vec  # spin ground (m = -S) sector
        return out

    if kind == "number":
        n = reader.number("n", required=True, kind=int, minimum=0)
        reader.finish()
        if n >= db:
            raise ConfigurationError(f"number state n={n} exceeds the cutoff")
        v = np.zeros(db, dtype=complex)
        v[n] = 1.0
        return lift(v)
    if kind == "uniform":
        levels = reader.raw_list("levels", required=True)
        reader.finish()
        v = np.zeros(db, dtype=complex)
        for lv in levels:
            if not isinstance(lv, int) or not (0 <= lv < db):
                raise ConfigurationError(f"bad level {lv!r} for cutoff {db - 1}")
            v[lv] = 1.0
        return lift(qstate.normalize(v))
    if kind == "coherent":
        nbar = reader.number("nbar", required=True, kind=float, minimum=0.0)
        phase = reader.number("phase", default=0.0, kind=float)
        reader.finish()
        alpha = np.sqrt(nbar) * np.exp(1j * phase)
        v = decoherence.coherent_amplitudes(alpha, db - 1)
        return lift(qstate.normalize(v))
    if kind == "cat_number":
        n = reader.number("n", required=True, kind=int, minimum=0)
        m = reader.number("m", required=True, kind=int, minimum=0)
        reader.finish()
        if max(n, m) >= db:
            raise ConfigurationError("cat levels exceed the cutoff")
        v = np.zeros(db, dtype=complex)
        v[n] += 1.0
        v[m] += 1.0
        return lift(qstate.normalize(v))
    # excited_vacuum: one collective excitation in the emitters, no photons
    reader.finish()
    if ds == 1:
        raise ConfigurationError("excited_vacuum needs an emitter sector")
    out = np.zeros(ds * db, dtype=complex)
    out[(ds - 2) * db] = 1.0  # m = -S + 1, boson vacuum
    return out


def build_integrator(reader: Reader) -> lindblad.IntegratorConfig:
    method = reader.choice("method", ("rk4", "rk45"), default="rk45")
    t_final = reader.qty("t_final", "time", required=True)
    dt = reader.qty("dt", "time")
    tolerance = reader.number("tolerance", kind=float)
    sample_every = reader.number("sample_every", default=1, kind=int, minimum=1)
    reader.finish()
    return lindblad.IntegratorConfig(
        t_final=t_final, method=method, dt=dt, tolerance=tolerance,
        sample_every=sample_every,
    )


_OBSERVABLE_NAMES = ("n", "sz", "excitation", "purity", "trace")


def _observable_rows(times, states, names, meta):
    cols = {}
    for name in names:
        if name == "purity":
            cols[name] = [float(np.real(np.trace(s @ s))) for s in states]
        elif name == "trace":
            cols[name] = [float(np.real(np.trace(s))) for s in states]
        else:
            op = meta.get(name)
            if op is None:
                raise ConfigurationError(
                    f"observable {name!r} is not defined for this model"
                )
            cols[name] = [float(np.real(np.trace(op @ s))) for s in states]
    header = ["time"] + list(names)
    rows = [
        [t] + [cols[name][i] for name in names] for i, t in enumerate(times)
    ]
    return header, rows


_ESTIMATE_FIELDS = {
    # config key -> (MtParameterSet field, dimension or plain kind)
    "L": ("L", "length"),
    "dimer_length": ("dimer_length", "length"),
    "q_mobile": ("q_mobile", float),
    "d_min": ("d_min", "length"),
    "eps_r_water": ("eps_r_water", float),
    "eps_r_protein": ("eps_r_protein", float),
    "V": ("V", "volume"),
    "water_gap": ("hbar_omega_c", "energy"),
    "d_ej": ("d_ej", "dipole"),
    "N_w": ("N_w", float),
    "I_water": ("I_water", "moment_of_inertia"),
    "v0": ("v0", "speed"),
    "omega0_dimer": ("omega0_dimer", "angular_frequency"),
    "T": ("T", "temperature"),
    "t_kink": ("t_kink", "time"),
    "E_kin": ("E_kin", "energy"),
    "T_r": ("T_r", "time"),
    "g_s": ("g_s", float),
}


def build_parameter_set(reader: Reader | None) -> mtparams.MtParameterSet:
    overrides = {}
    if reader is not None:
        for key, (attr, dim) in _ESTIMATE_FIELDS.items():
            if dim is float:
                val = reader.number(key, kind=float)
            else:
                val = reader.qty(key, dim)
            if val is not None:
                overrides[attr] = val
        n_quanta = reader.raw_list("n_quanta")
        if n_quanta is not None:
            if len(n_quanta) != 2:
                raise ConfigurationError("n_quanta must be [low, high]")
            overrides["n_cavity_quanta"] = (n_quanta[0], n_quanta[1])
        reader.finish()
    return mtparams.MtParameterSet(**overrides)


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "spectrum")
    omega0 = r.qty("omega0", "angular_frequency", required=True)
    omega = r.qty("omega", "angular_frequency", required=True)
    lam = r.qty("coupling", "angular_frequency", required=True)
    n_emitters = r.number("n_emitters", required=True, kind=int, minimum=1)
    gp = r.qty("gamma_plus", "angular_frequency", required=True)
    gm = r.qty("gamma_minus", "angular_frequency", required=True)
    theta = r.number("theta", kind=float)
    grid_r = r.sub("grid")
    gmin = gmax = None
    gpoints = 2001
    if grid_r is not None:
        gmin = grid_r.qty("min", "angular_frequency", required=True)
        gmax = grid_r.qty("max", "angular_frequency", required=True)
        gpoints = grid_r.number("points", default=2001, kind=int, minimum=3)
        grid_r.finish()
    n_sweep = r.raw_list("n_sweep")
    canonical = r.finish()

    def params_for(n):
        return spectra.SpectrumParams(
            omega0=omega0, omega=omega, lam=lam, n_emitters=n,
            gamma_plus=gp, gamma_minus=gm, theta=theta,
            grid_min=gmin if n == n_emitters else None,
            grid_max=gmax if n == n_emitters else None,
            grid_points=gpoints if n == n_emitters else 2001,
        )

    result = spectra.analyze_spectrum(params_for(n_emitters))
    write_csv(
        out / "spectrum.csv",
        ["omega", "imchi"],
        zip(result.omegas, result.imchi),
    )
    _maybe_json_mirror(out, "spectrum", ["omega", "imchi"],
                       list(zip(result.omegas, result.imchi)), fmt)
    pred = result.prediction
    peaks_doc = {
        "predicted_positions": list(pred.positions),
        "predicted_weights": list(pred.weights),
        "predicted_splitting": pred.splitting,
        "dispersive_positions": list(pred.dispersive_positions),
        "dispersive_valid": pred.dispersive_valid,
        "found": [
            {"position": pk.position, "height": pk.height, "width": pk.width}
            for pk in result.peaks
        ],
        "unresolved": result.unresolved,
        "single_line": len(result.peaks) == 1,
        "grid_step": result.grid_step,
    }
    if n_sweep:
        check = {"n": [], "splitting_found": [], "splitting_predicted": []}
        for n in n_sweep:
            if not isinstance(n, int) or n < 1:
                raise ConfigurationError(f"n_sweep entries must be ints >= 1, got {n!r}")
            res_n = spectra.analyze_spectrum(params_for(n))
            if len(res_n.peaks) == 2:
                found = res_n.peaks[1].position - res_n.peaks[0].position
            else:
                found = 0.0
            check["n"].append(n)
            check["splitting_found"].append(found)
            check["splitting_predicted"].append(res_n.prediction.splitting)
        peaks_doc["sqrt_n_check"] = check
    write_json(out / "peaks.json", peaks_doc)
    return canonical


def cmd_evolve(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "evolve")
    model, meta = build_model(r.sub("model", required=True))
    psi0 = build_state(r.sub("initial_state", required=True), meta)
    icfg = build_integrator(r.sub("integrator", required=True))
    names = r.raw_list("observables", default=["n", "purity", "trace"])
    canonical = r.finish()
    for name in names:
        if name not in _OBSERVABLE_NAMES:
            raise ConfigurationError(f"unknown observable {name!r}")
    rho0 = qstate.pure_state_density(psi0)
    record = lindblad.evolve(model, rho0, icfg)
    header, rows = _observable_rows(record.times, record.states, names, meta)
    write_csv(out / "observables.csv", header, rows)
    _maybe_json_mirror(out, "observables", header, rows, fmt)
    final = qstate.validate_density_matrix(record.states[-1], tol=1e-6)
    write_json(out / "summary.json", {
        "samples": len(record.times),
        "t_final": float(record.times[-1]),
        "final_state": final,
    })
    return canonical


def cmd_trajectories(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "trajectories")
    model, meta = build_model(r.sub("model", required=True))
    psi0 = build_state(r.sub("initial_state", required=True), meta)
    ito_r = r.sub("ito", required=True)
    dt = ito_r.qty("dt", "time", required=True)
    steps = ito_r.number("steps", required=True, kind=int, minimum=1)
    ensemble = ito_r.number("ensemble_size", required=True, kind=int, minimum=1)
    base_seed = ito_r.number("base_seed", default=0, kind=int)
    record_every = ito_r.number("record_every", default=1, kind=int, minimum=1)
    ito_r.finish()
    channels = r.choice("entropy_channels", ("number",))
    cross_check = r.flag("cross_check", default=False)
    names = r.raw_list("observables", default=["n", "purity", "trace"])
    if seed is not None:
        base_seed = seed
        r.canonical["ito"]["base_seed"] = seed
    canonical = r.finish()

    icfg = tj.ItoConfig(
        dt=dt, steps=steps, ensemble_size=ensemble,
        base_seed=base_seed, record_every=record_every,
    )
    projectors = None
    if channels == "number":
        if meta["spin_dim"] != 1:
            raise ConfigurationError(
                "number entropy channels need a boson-only model"
            )
        projectors = tj.number_channel_projectors(meta["dim"])
    result = tj.run_ensemble(model, psi0, icfg, projectors=projectors)

    header, rows = _observable_rows(
        result.times, list(result.mean_rho), names, meta
    )
    write_csv(out / "observables.csv", header, rows)
    _maybe_json_mirror(out, "observables", header, rows, fmt)

    summary = {
        "ensemble_size": ensemble,
        "n_failed": len(result.failed),
        "failed_trajectories": result.failed,
        "renorm_log_max": result.renorm_log_max,
    }
    if projectors is not None:
        med = result.localization["median_entropy"]
        mean = np.nanmean(result.entropy, axis=0)
        ent_rows = [
            [t, m, mn] for t, m, mn in zip(result.times, med, mean)
        ]
        write_csv(out / "entropy.csv", ["time", "k_median", "k_mean"], ent_rows)
        _maybe_json_mirror(out, "entropy", ["time", "k_median", "k_mean"],
                           ent_rows, fmt)
        summary["final_median_entropy"] = result.localization["final_median_entropy"]
        summary["entropy_final_over_initial"] = result.localization["final_over_initial"]
    if cross_check:
        ref = lindblad.evolve(
            model,
            qstate.pure_state_density(psi0),
            lindblad.IntegratorConfig(
                t_final=steps * dt, method="rk4", dt=dt,
                sample_every=record_every,
            ),
        )
        dists = [
            qstate.trace_distance(result.mean_rho[i], ref.states[i])
            for i in range(len(ref.times))
        ]
        summary["trace_distance_max"] = float(np.max(dists))
        summary["trace_distance_final"] = float(dists[-1])
    write_json(out / "summary.json", summary)
    return canonical


def cmd_cat(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "cat")
    T_r = r.qty("T_r", "time", required=True)
    n = r.number("n", required=True, kind=float, minimum=0.0)
    phi_values = r.raw_list("phi_values", required=True)
    canonical = r.finish()
    rows = []
    for phi in phi_values:
        if not isinstance(phi, (int, float)):
            raise ConfigurationError(f"phi_values entries must be numbers, got {phi!r}")
        D, _ = decoherence.pointer_distance(n, phi)
        t_c = decoherence.collapse_time(T_r, D) if D != 0 else float("inf")
        rows.append([n, float(phi), D, t_c])
    write_csv(out / "collapse.csv", ["n", "phi", "distance", "t_collapse"], rows)
    _maybe_json_mirror(out, "collapse", ["n", "phi", "distance", "t_collapse"],
                       rows, fmt)
    return canonical


def cmd_estimate(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "estimate")
    mode = r.choice("mode", ("raw", "anchored"), default="anchored")
    params = build_parameter_set(r.sub("params"))
    r.finish()
    report = mtparams.feasibility_report(params, mode)
    write_json(out / "estimate_report.json", report.to_json_dict())
    return r.canonical


def cmd_hologram(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "hologram")
    wavelength = r.qty("wavelength", "length", required=True)
    source = r.qty_vector("source", "length", required=True)
    scat_readers = r.sublist("scatterers") or []
    scatterers = []
    for sr in scat_readers:
        pos = sr.qty_vector("position", "length", required=True)
        re_part = sr.number("amplitude_re", default=0.0, kind=float)
        im_part = sr.number("amplitude_im", default=0.0, kind=float)
        sr.finish()
        scatterers.append((pos, complex(re_part, im_part)))
    det = r.sub("detector", required=True)
    distance = det.qty("distance", "length", required=True)
    extent = det.qty("extent", "length", required=True)
    grid = det.raw_list("grid", default=[128, 128])
    det.finish()
    canonical = r.finish()
    if len(grid) != 2 or not all(isinstance(g, int) and g >= 1 for g in grid):
        raise ConfigurationError("detector.grid must be [nx, ny] of ints >= 1")

    scene = holography.HoloScene(
        wavenumber=2 * np.pi / wavelength,
        source=source,
        scatterers=tuple(scatterers),
        detector_distance=distance,
        detector_extent=extent,
        grid=(grid[0], grid[1]),
    )
    intensity = holography.far_field_intensity(scene)
    x, y = scene.detector_axes()
    rows = []
    for j in range(intensity.shape[0]):
        for i in range(intensity.shape[1]):
            rows.append([x[i], y[j], intensity[j, i]])
    write_csv(out / "intensity.csv", ["x", "y", "intensity"], rows)
    _maybe_json_mirror(out, "intensity", ["x", "y", "intensity"], rows, fmt)
    write_svg(out / "hologram.svg", intensity)
    return canonical


def cmd_sweep(cfg: dict, out, fmt: str, seed):
    r = Reader(cfg, "sweep")
    mode = r.choice("mode", ("raw", "anchored"), default="anchored")
    params = build_parameter_set(r.sub("params"))
    name = r.choice("parameter", tuple(_ESTIMATE_FIELDS), required=True)
    attr, dim = _ESTIMATE_FIELDS[name]
    values = r.qty_values("values", dim) if dim is not float else r.raw_list("values")
    if values is None:
        rng = r.sub("range", required=True)
        lo = rng.qty("min", dim, required=True) if dim is not float else rng.number("min", required=True)
        hi = rng.qty("max", dim, required=True) if dim is not float else rng.number("max", required=True)
        points = rng.number("points", default=11, kind=int, minimum=2)
        log = rng.flag("log", default=True)
        rng.finish()
        if log:
            values = list(np.geomspace(lo, hi, points))
        else:
            values = list(np.linspace(lo, hi, points))
    quantities = r.raw_list("quantities", default=[])
    canonical = r.finish()

    header = [name, "verdict", "margin", "t_collapse_lower", "t_collapse_upper",
              "feasible_n_max"] + list(quantities)
    rows = []
    for value, report in mtparams.sweep_parameter(params, attr, values, mode):
        row = [
            value,
            report.verdict,
            report.margin,
            report.quantities["t_collapse_lower"].value_si,
            report.quantities["t_collapse_upper"].value_si,
            report.feasible_n_max,
        ]
        for qname in quantities:
            if qname not in report.quantities:
                raise ConfigurationError(f"unknown report quantity {qname!r}")
            row.append(report.quantities[qname].value_si)
        rows.append(row)
    write_csv(out / "sweep.csv", header, rows)
    _maybe_json_mirror(out, "sweep", header, rows, fmt)
    return canonical


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "trajectories": cmd_trajectories,
    "cat": cmd_cat,
    "estimate": cmd_estimate,
    "hologram": cmd_hologram,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtcavity",
        description="cavity QED workbench: spectra, dynamics, estimates, holograms",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="JSON config path, preset:NAME, or a manifest.json")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the stochastic base seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="also mirror tables as JSON when 'json'")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.subcommand)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        canonical = COMMANDS[args.subcommand](cfg, out, args.format, args.seed)
        # the manifest records the effective stochastic seed so a re-run
        # from the manifest reproduces it byte for byte
        effective_seed = canonical.get("ito", {}).get("base_seed")
        write_json(out / "manifest.json", {
            "tool": "mtcavity",
            "version": __version__,
            "subcommand": args.subcommand,
            "seed": effective_seed,
            "format": args.format,
            "config": canonical,
        })
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except MtCavityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
