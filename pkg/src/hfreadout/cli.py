"""Command-line front end: ``hfreadout {spectrum|chi|purcell|atlas|qnd|validate}``.

Every run reads one JSON config, writes its outputs atomically into an
output directory and adds ``manifest.json`` with the config hash.  Exit
codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import CONFIG_SCHEMA_VERSION, __version__
from .atlas import compute_grid, hybridization_map, track_states
from .dispersive import (
    DivergenceError,
    PoleProximityError,
    ReadoutCoupling,
    coupling_from_eta,
    dispersive_shift,
)
from .floquet import NonUnitaryError, PropagationError, driven_transmon
from .parallel import resolve_workers
from .purcell import (
    TWO_PI,
    CircuitParams,
    NearUnityCouplingError,
    admittance_spectrum,
    circuit_from_targets,
    derived_frequencies,
    purcell_rate,
    rwa_admittance,
)
from .qnd import RecordBatch, classify_records, synthesize_records
from .spectrum import CutoffError, TransmonParams, diagonalize

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
SIG_DIGITS = 12
RUN_KEYS = ("worker_count", "output_dir")  # excluded from the config hash

_NUMERIC_ERRORS = (CutoffError, DivergenceError, PoleProximityError, PropagationError, NonUnitaryError)


class ConfigError(Exception):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class NumericalFailure(Exception):
    pass


# ------------------------------------------------------------- formatting


def fmt(x) -> str:
    """Scientific notation with 12 significant digits; ints stay ints."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIG_DIGITS - 1}e}"


def dumps(obj, indent: int = 0) -> str:
    """JSON with every float in the fixed scientific format, keys sorted."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, np.integer)):
        return fmt(obj)
    s = fmt(obj)
    # JSON has no nan/inf literals
    return json.dumps(s) if s in ("nan", "inf", "-inf") else s


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ----------------------------------------------------------------- schemas


@dataclass(frozen=True)
class Key:
    kind: Any  # type, tuple of types, or a nested schema dict
    required: bool = False
    default: Any = None
    check: Callable[[Any], str | None] | None = None


def _positive(v):
    return None if v > 0 else "must be positive"


def _nonneg(v):
    return None if v >= 0 else "must be non-negative"


def _choice(*opts):
    return lambda v: None if v in opts else f"must be one of {', '.join(map(str, opts))}"


def _prob(v):
    return None if 0 <= v <= 1 else "must lie in [0, 1]"


NUM = (int, float)
COMMON = {
    "schema_version": Key(str, default=CONFIG_SCHEMA_VERSION, check=_choice(CONFIG_SCHEMA_VERSION)),
    "worker_count": Key(int, check=lambda v: None if v >= 1 else "must be >= 1"),
    "output_dir": Key(str),
}
TRANSMON = {
    "e_c_hz": Key(NUM, True, check=_positive),
    "e_j_hz": Key(NUM, True, check=_nonneg),
    "n_g": Key(NUM, default=0.0),
    "n_cut": Key(int, default=40, check=lambda v: None if v >= 1 else "must be >= 1"),
}
GRID = {
    "min": Key(NUM, True),
    "max": Key(NUM, True),
    "n": Key(int, True, check=lambda v: None if v >= 1 else "must be >= 1"),
}

SCHEMAS: dict[str, dict[str, Key]] = {
    "spectrum": {
        **TRANSMON,
        "levels": Key(int, default=10, check=lambda v: None if v >= 2 else "must be >= 2"),
        "matrix_elements": Key(bool, default=False),
    },
    "chi": {
        "transmon": Key(TRANSMON, True),
        "g_hz": Key(NUM, check=_nonneg),
        "eta": Key(NUM, check=lambda v: None if 0 <= v < 0.9 else "must lie in [0, 0.9)"),
        "omega_r_bare_hz": Key((int, float, list), True),
        "method": Key(str, default="full_sum", check=_choice("full_sum", "high_freq", "rwa")),
        "n_g_list": Key(list),
        "pull_levels": Key(list, default=[1]),
        "levels": Key(int, default=30, check=lambda v: None if v >= 3 else "must be >= 3"),
    },
    "purcell": {
        "circuit": Key({
            "l_q": Key(NUM, True, check=_positive),
            "c_q": Key(NUM, True, check=_positive),
            "c_c": Key(NUM, True, check=_nonneg),
            "l_res": Key(NUM, True, check=_positive),
            "c_res": Key(NUM, True, check=_positive),
            "l_tr": Key(NUM, check=_nonneg),
            "c_tr": Key(NUM, check=_nonneg),
            "z0": Key(NUM, default=50.0, check=_positive),
        }),
        "targets": Key({
            "omega_q_hz": Key(NUM, True, check=_positive),
            "omega_r_hz": Key(NUM, True, check=_positive),
            "eta": Key(NUM, True, check=lambda v: None if 0 < v < 0.9 else "must lie in (0, 0.9)"),
            "kappa_hz": Key(NUM, True, check=_positive),
            "topology": Key(str, default="inductive", check=_choice("inductive", "capacitive")),
            "z0": Key(NUM, default=50.0, check=_positive),
            "c_q": Key(NUM, default=100e-15, check=_positive),
        }),
        "omega_grid": Key(GRID),
    },
    "atlas": {
        "transmon": Key(TRANSMON, True),
        "omega_grid": Key(GRID, True),
        "power_grid": Key({**GRID, "kind": Key(str, default="stark", check=_choice("stark", "zeta"))}, True),
        "n_g_list": Key(list),
        "levels": Key(int, default=20, check=lambda v: None if v >= 3 else "must be >= 3"),
        "threshold": Key(NUM, default=0.8, check=_prob),
        "windows": Key(int, default=8, check=lambda v: None if v >= 1 else "must be >= 1"),
        "tol": Key(NUM, default=1e-9, check=lambda v: None if 1e-12 <= v <= 1e-6 else "must lie in [1e-12, 1e-6]"),
    },
    "qnd": {
        "records": Key(str, True),
        "decode_rates": Key(list),
    },
    "qnd-synth": {
        "rates": Key({
            "eps_assign": Key(NUM, True, check=_prob),
            "eps_bitflip": Key(NUM, True, check=_prob),
            "eps_leak": Key(NUM, True, check=_prob),
        }, True),
        "n_shots": Key(int, True, check=_nonneg),
        "seed": Key(int, True, check=_nonneg),
        "length": Key(int, default=18, check=lambda v: None if v >= 3 else "must be >= 3"),
        "pre_leak_prob": Key(NUM, default=0.0, check=_prob),
        "leak_readout": Key(int, default=1, check=_choice(0, 1)),
        "format": Key(str, default="csv", check=_choice("csv", "json")),
    },
}


def _is(v, kind) -> bool:
    kinds = kind if isinstance(kind, tuple) else (kind,)
    if isinstance(v, bool) and bool not in kinds:
        return False
    if float in kinds and isinstance(v, int) and not isinstance(v, bool):
        return True
    return isinstance(v, kinds)


def _normalize_ng(v: float, where: str, notes: list[str]) -> float:
    r = float(v) % 1.0
    if r != v:
        notes.append(f"{where}: n_g = {v} normalized to {fmt(r)} (the spectrum is 1-periodic in n_g)")
    return r


def _check_block(data, schema: dict[str, Key], path: str, problems: list[str], notes: list[str]):
    if not isinstance(data, dict):
        problems.append(f"{path or 'config'}: expected a JSON object")
        return {}
    out = {}
    for k in sorted(set(data) - set(schema)):
        problems.append(f"{path}{k}: unknown key")
    for k, spec in schema.items():
        where = f"{path}{k}"
        if k not in data:
            if spec.required:
                problems.append(f"{where}: required key missing")
            elif spec.default is not None:
                out[k] = spec.default
            continue
        v = data[k]
        if isinstance(spec.kind, dict):
            out[k] = _check_block(v, spec.kind, where + ".", problems, notes)
            continue
        if not _is(v, spec.kind):
            problems.append(f"{where}: wrong type {type(v).__name__}")
            continue
        if isinstance(v, float) and not math.isfinite(v):
            problems.append(f"{where}: must be finite")
            continue
        if spec.check is not None and not isinstance(v, list):
            msg = spec.check(v)
            if msg:
                problems.append(f"{where}: {msg}")
                continue
        if k == "n_g":
            v = _normalize_ng(v, where, notes)
        out[k] = v
    return out


def _check_numbers(v, where, problems, integer=False, lo=None):
    if not isinstance(v, list) or not v:
        problems.append(f"{where}: expected a non-empty list")
        return
    for x in v:
        ok = _is(x, int if integer else NUM) and (integer or math.isfinite(x))
        if not ok or (lo is not None and x < lo):
            problems.append(f"{where}: bad entry {x!r}")
            return


def validate_config(command: str, data) -> tuple[dict, list[str]]:
    """Schema check without computation.

    Returns the normalized config and notes about normalizations.

    Raises
    ------
    ConfigError
        Listing every violation found.
    """
    if command not in SCHEMAS:
        raise ConfigError([f"unknown command {command!r}"])
    problems: list[str] = []
    notes: list[str] = []
    cfg = _check_block(data, {**COMMON, **SCHEMAS[command]}, "", problems, notes)

    if command == "chi":
        if ("g_hz" in cfg) == ("eta" in cfg):
            problems.append("chi: give exactly one of g_hz and eta")
        w = cfg.get("omega_r_bare_hz")
        if isinstance(w, list):
            _check_numbers(w, "omega_r_bare_hz", problems, lo=0)
        elif w is not None and not w > 0:
            problems.append("omega_r_bare_hz: must be positive")
        _check_numbers(cfg.get("pull_levels", [1]), "pull_levels", problems, integer=True, lo=0)
    if command in ("chi", "atlas") and "n_g_list" in cfg:
        before = len(problems)
        _check_numbers(cfg["n_g_list"], "n_g_list", problems)
        if len(problems) == before:
            cfg["n_g_list"] = [_normalize_ng(x, f"n_g_list[{i}]", notes) for i, x in enumerate(cfg["n_g_list"])]
    if command == "purcell":
        if ("circuit" in cfg) == ("targets" in cfg):
            problems.append("purcell: give exactly one of circuit and targets")
        c = cfg.get("circuit")
        if c is not None and ("l_tr" in c) == ("c_tr" in c):
            problems.append("circuit: give exactly one of l_tr and c_tr")
    if command == "qnd" and "decode_rates" in cfg:
        r = cfg["decode_rates"]
        if len(r) != 2 or not all(_is(x, NUM) and 0 < x < 0.5 for x in r):
            problems.append("decode_rates: expected [eps_assign, eps_bitflip] with entries in (0, 0.5)")
    for gname in ("omega_grid", "power_grid"):
        g = cfg.get(gname)
        if isinstance(g, dict) and "min" in g and "max" in g and "n" in g:
            if g["n"] > 1 and not g["max"] > g["min"]:
                problems.append(f"{gname}: max must exceed min")
            if gname == "omega_grid" and not g["min"] > 0:
                problems.append(f"{gname}.min: must be positive")
            if gname == "power_grid" and g["min"] < 0:
                problems.append(f"{gname}.min: must be non-negative")
    if command == "qnd-synth" and "rates" in cfg:
        r = cfg["rates"]
        if r.get("eps_bitflip", 0) + r.get("eps_leak", 0) > 1:
            problems.append("rates: eps_bitflip + eps_leak exceeds one")
    if problems:
        raise ConfigError(problems)
    return cfg, notes


def config_hash(cfg: dict) -> str:
    core = {k: v for k, v in cfg.items() if k not in RUN_KEYS}
    return hashlib.sha256(dumps(core).encode()).hexdigest()


def load_config(path: Path):
    try:
        text = path.read_text()
    except OSError:
        raise
    if not text.strip():
        return {}
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError([f"{path}: invalid JSON ({err})"]) from None


# ------------------------------------------------------------- subcommands


def _transmon(block: dict, n_g: float | None = None) -> TransmonParams:
    return TransmonParams(
        block["e_c_hz"], block["e_j_hz"], block["n_g"] if n_g is None else n_g, block["n_cut"]
    )


def _axis(g: dict) -> np.ndarray:
    return np.linspace(g["min"], g["max"], g["n"])


def run_spectrum(cfg, base, workers) -> dict[str, str]:
    p = _transmon(cfg)
    spec = diagonalize(p, cfg["levels"])
    out = {"spectrum.csv": csv_text(["level", "energy_hz"], enumerate(spec.energies))}
    if cfg["matrix_elements"]:
        n = np.abs(spec.charge_matrix)
        rows = [(i, j, n[i, j]) for i in range(spec.levels) for j in range(spec.levels)]
        out["matrix_elements.csv"] = csv_text(["i", "j", "abs_matrix_element"], rows)
    return out


def run_chi(cfg, base, workers) -> dict[str, str]:
    wr_list = cfg["omega_r_bare_hz"]
    wr_list = wr_list if isinstance(wr_list, list) else [wr_list]
    ng_list = cfg.get("n_g_list") or [cfg["transmon"]["n_g"]]
    pulls = sorted(set(cfg["pull_levels"]))
    levels = max(cfg["levels"], max(pulls) + 2)
    rows = []
    for ng in ng_list:
        spec = diagonalize(_transmon(cfg["transmon"], ng), levels)
        for wr in wr_list:
            g = cfg["g_hz"] if "g_hz" in cfg else coupling_from_eta(cfg["eta"], spec.omega_q, wr)
            try:
                rep = dispersive_shift(spec, ReadoutCoupling(g, wr), cfg["method"], n_levels=max(pulls) + 1)
            except (DivergenceError, PoleProximityError) as err:
                raise NumericalFailure(f"chi at omega_r_bare_hz={fmt(wr)}, n_g={fmt(ng)}: {err}") from err
            flags = ";".join(rep.flags)
            if rep.chi_n:
                for n in pulls:
                    rows.append((wr, ng, n, rep.chi_n[n], rep.chi, flags))
            else:
                rows.append((wr, ng, "", "", rep.chi, flags))
    header = ["omega_r_bare_hz", "n_g", "n", "chi_n_hz", "chi_hz", "flags"]
    return {"chi.csv": csv_text(header, rows)}


def run_purcell(cfg, base, workers) -> dict[str, str]:
    if "circuit" in cfg:
        c = cfg["circuit"]
        circ = CircuitParams(**{k: c[k] for k in c})
    else:
        t = cfg["targets"]
        circ = circuit_from_targets(
            t["omega_q_hz"], t["omega_r_hz"], t["eta"], t["kappa_hz"], t["topology"], t["z0"], t["c_q"]
        )
    f_r, f_q, eta = derived_frequencies(circ)
    rep = purcell_rate(circ)
    grid = cfg.get("omega_grid") or {"min": 0.5 * f_q, "max": 1.5 * f_q, "n": 101}
    w = _axis(grid)
    if np.any(w <= 0) or np.any(np.abs(w - f_r) < 1e-9 * f_r):
        raise ConfigError(["omega_grid: frequencies must be positive and avoid the resonator"])
    re_y = admittance_spectrum(circ, w)
    c_tot = circ.c_q + circ.c_c
    kq = re_y / c_tot / TWO_PI
    kq_rwa = rwa_admittance(circ, w) / c_tot / TWO_PI
    csv_out = csv_text(["omega_hz", "re_y", "kappa_q_hz", "kappa_q_rwa_hz"], zip(w, re_y, kq, kq_rwa))
    summary = {
        "topology": circ.topology,
        "eta": eta,
        "omega_q_hz": f_q,
        "omega_r_hz": f_r,
        "kappa_hz": rep.kappa,
        "kappa_q_hz": rep.kappa_q,
        "kappa_q_rwa_hz": rep.kappa_q_rwa,
        "t1_s": rep.t1,
        "t1_rwa_s": rep.t1_rwa,
        "circuit": {k: getattr(circ, k) for k in ("l_q", "c_q", "c_c", "l_res", "c_res", "l_tr", "c_tr", "z0")},
    }
    return {"purcell.csv": csv_out, "purcell.json": dumps(summary) + "\n"}


def run_atlas(cfg, base, workers) -> dict[str, str]:
    ng_list = cfg.get("n_g_list") or [cfg["transmon"]["n_g"]]
    wn, pn = _axis(cfg["omega_grid"]), _axis(cfg["power_grid"])
    out = {}
    for idx, ng in enumerate(ng_list):
        p = _transmon(cfg["transmon"], ng)
        try:
            system = driven_transmon(p, cfg["levels"])
        except CutoffError as err:
            raise NumericalFailure(f"atlas spectrum at n_g={fmt(ng)}: {err}") from err
        grid = compute_grid(system, wn, pn, cfg["power_grid"]["kind"], cfg["tol"], workers)
        if grid.failed:
            (a, b), reason = sorted(grid.failed.items())[0]
            raise NumericalFailure(
                f"atlas cell omega_norm={fmt(wn[a])}, power_norm={fmt(pn[b])} at n_g={fmt(ng)}: "
                f"{reason} ({len(grid.failed)} failed cells)"
            )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            tracked = track_states(grid, (0, 1), cfg["threshold"], windows=cfg["windows"])
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        maps = [hybridization_map(grid, tracked, c) for c in (0, 1)]
        rows = []
        for a in range(len(wn)):
            for b in range(len(pn)):
                t0, t1 = maps[0].theta[a, b], maps[1].theta[a, b]
                pick = 0 if np.nan_to_num(t0, nan=-1) > np.nan_to_num(t1, nan=-1) else 1
                rows.append((wn[a], pn[b], t0, t1, int(maps[pick].dominant[a, b])))
        suffix = "" if len(ng_list) == 1 else f"_{idx}"
        out[f"theta{suffix}.csv"] = csv_text(
            ["omega_norm", "power_norm", "theta_c0", "theta_c1", "dominant_j"], rows
        )
        out[f"tracked{suffix}.json"] = dumps({
            "n_g": p.n_g,
            "omega_q_hz": grid.omega_q,
            "states": [
                {
                    "level": st.level,
                    "zeta_scale_hz": st.zeta_scale,
                    "omega_center_hz": st.omega_center,
                    "omega_half_hz": st.omega_half,
                    "window_boundaries": [float(x) for x in st.window_boundaries],
                    "fit_residual": st.fit_residual,
                    "norm_error": st.norm_error,
                    "coefficients_re": st.coefficients.real.tolist(),
                    "coefficients_im": st.coefficients.imag.tolist(),
                }
                for st in tracked
            ],
        }) + "\n"
    return out


def read_records(path: Path) -> RecordBatch:
    """Records from CSV (``prepared, pre_leak, o1..oN, post_leak``) or JSON."""
    text = path.read_text()

    def leak(v):
        v = str(v).strip()
        if v == "4+":
            return 4
        if v in ("0", "1", "2", "3", "4"):
            return int(v)
        raise ConfigError([f"{path}: bad leakage label {v!r}"])

    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
            recs = data["records"] if isinstance(data, dict) else data
            return RecordBatch(
                [r["prepared"] for r in recs], [r["outcomes"] for r in recs],
                [leak(r["pre_leak"]) for r in recs], [leak(r["post_leak"]) for r in recs],
            )
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and not rows[0][0].strip().isdigit():
            rows = rows[1:]
        if not rows:
            raise ConfigError([f"{path}: no records"])
        if len({len(r) for r in rows}) != 1 or len(rows[0]) < 5:
            raise ConfigError([f"{path}: rows have inconsistent or too few columns"])
        return RecordBatch(
            [int(r[0]) for r in rows], [[int(x) for x in r[2:-1]] for r in rows],
            [leak(r[1]) for r in rows], [leak(r[-1]) for r in rows],
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as err:
        raise ConfigError([f"{path}: malformed records ({err})"]) from None


def run_qnd(cfg, base, workers) -> dict[str, str]:
    path = Path(cfg["records"])
    if not path.is_absolute():
        path = base / path
    batch = read_records(path)
    rates = tuple(cfg["decode_rates"]) if "decode_rates" in cfg else None
    tally = classify_records(batch, rates=rates, workers=workers)

    def est(e):
        lo, hi = e.wilson()
        return {"rate": e.rate, "count": e.count, "trials": e.trials, "sigma": e.sigma, "ci95": [lo, hi]}

    return {"tally.json": dumps({
        "eps_assign": est(tally.assign),
        "eps_trans_bitflip": est(tally.bitflip),
        "eps_trans_leakage": est(tally.leakage),
        "eps_trans": tally.eps_trans,
        "q_estimate": tally.q_estimate,
        "n_records": tally.n_records,
        "n_discarded": tally.n_discarded,
        "n_leaked": tally.n_leaked,
        "edge_assign": tally.edge_assign,
        "edge_trans": tally.edge_trans,
    }) + "\n"}


def write_records(batch: RecordBatch, kind: str) -> tuple[str, str]:
    lab = lambda v: "4+" if v == 4 else str(int(v))  # noqa: E731
    if kind == "json":
        recs = [
            {"prepared": int(k), "pre_leak": lab(a), "outcomes": [int(x) for x in o], "post_leak": lab(b)}
            for k, o, a, b in zip(batch.prepared, batch.outcomes, batch.pre_leak, batch.post_leak)
        ]
        return "records.json", json.dumps({"records": recs}, separators=(",", ":")) + "\n"
    header = ["prepared", "pre_leak"] + [f"o{i + 1}" for i in range(batch.length)] + ["post_leak"]
    lines = [",".join(header)]
    for k, o, a, b in zip(batch.prepared, batch.outcomes, batch.pre_leak, batch.post_leak):
        lines.append(f"{k},{lab(a)},{','.join(map(str, o))},{lab(b)}")
    return "records.csv", "\n".join(lines) + "\n"


def run_qnd_synth(cfg, base, workers) -> dict[str, str]:
    r = cfg["rates"]
    batch = synthesize_records(
        (r["eps_assign"], r["eps_bitflip"], r["eps_leak"]), cfg["n_shots"], cfg["seed"],
        cfg["length"], cfg["pre_leak_prob"], cfg["leak_readout"], workers,
    )
    name, text = write_records(batch, cfg["format"])
    return {name: text}


RUNNERS = {
    "spectrum": run_spectrum,
    "chi": run_chi,
    "purcell": run_purcell,
    "atlas": run_atlas,
    "qnd": run_qnd,
    "qnd-synth": run_qnd_synth,
}


def run(command: str, config_path: Path, workers: int | None = None, out_dir: Path | None = None) -> int:
    """Execute one subcommand; returns the exit status."""
    try:
        raw = load_config(config_path)
        cfg, notes = validate_config(command, raw)
        for n in notes:
            print(f"warning: {n}", file=sys.stderr)
        if workers is None:
            workers = cfg.get("worker_count")
        workers = resolve_workers(workers)
        target = out_dir or Path(cfg.get("output_dir", "."))
        if not target.is_absolute() and out_dir is None:
            target = config_path.parent / target
        files = RUNNERS[command](cfg, config_path.parent, workers)
        manifest = {
            "tool": "hfreadout",
            "version": __version__,
            "schema_version": CONFIG_SCHEMA_VERSION,
            "command": command,
            "config_hash": config_hash(cfg),
            "config": {k: v for k, v in cfg.items() if k not in RUN_KEYS},
            "outputs": {k: hashlib.sha256(v.encode()).hexdigest() for k, v in files.items()},
        }
        for name, text in files.items():
            atomic_write(target / name, text)
        atomic_write(target / "manifest.json", dumps(manifest) + "\n")
    except ConfigError as err:
        for p in err.problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    except (NearUnityCouplingError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except _NUMERIC_ERRORS as err:
        print(f"numerical failure in {command}: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def validate(command: str, config_path: Path) -> int:
    try:
        cfg, notes = validate_config(command, load_config(config_path))
    except ConfigError as err:
        for p in err.problems:
            print(f"config error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    for n in notes:
        print(f"warning: {n}", file=sys.stderr)
    print("ok")
    print(dumps(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hfreadout", description=__doc__.splitlines()[0])
    ap.add_argument(
        "--version", action="version",
        version=f"hfreadout {__version__} (config schema {CONFIG_SCHEMA_VERSION})",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, type=Path, help="JSON config file")
        p.add_argument("--workers", type=int, help="worker processes (default: $HFREADOUT_WORKERS or 1)")
        p.add_argument("--out", type=Path, help="output directory")

    for name in ("spectrum", "chi", "purcell", "atlas"):
        common(sub.add_parser(name))
    q = sub.add_parser("qnd", help="classify records, or 'qnd synth' to generate them")
    q.add_argument("action", nargs="?", choices=("classify", "synth"), default="classify")
    common(q)
    v = sub.add_parser("validate", help="schema check only")
    v.add_argument("target", choices=sorted(SCHEMAS))
    v.add_argument("--config", required=True, type=Path)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return validate(args.target, args.config)
    if args.workers is not None and args.workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    command = "qnd-synth" if args.command == "qnd" and args.action == "synth" else args.command
    return run(command, args.config, args.workers, args.out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
