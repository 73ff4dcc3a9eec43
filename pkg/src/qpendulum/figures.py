"""Figure datasets: long-format ``(series, x, y)`` tables with a metadata header.

There is one builder per figure id (``fig1`` to ``fig8``).  The metadata of
every dataset echoes the configuration and carries a provenance hash.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .classical import period
from .mathieu import SpectrumTable, char_values, spectrum
from .model import NOMINAL, Parity, PendulumConfig
from .oscillator import MAX_GRADE, closed_form_total
from .rotor import ROTOR_ORDERS, rotor_energy, rotor_terms
from .timescales import CORRECTED, RAW, analytic_timescales, discrete_table

__all__ = [
    "FigureDataset",
    "FIGURES",
    "build_figure",
    "spectrum_dataset",
    "format_number",
    "to_csv",
    "to_json",
    "from_csv",
    "from_json",
]

DEFAULT_COUNT = 90


def format_number(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def provenance(metadata: dict) -> str:
    digest = hashlib.sha1(json.dumps(metadata, sort_keys=True).encode()).hexdigest()
    return f"qpendulum-{__version__}+{digest[:12]}"


@dataclass
class FigureDataset:
    figure_id: str
    columns: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"column lengths differ: {lengths}")

    def __len__(self):
        return len(next(iter(self.columns.values()), []))

    def series(self, name: str):
        """``(x, y)`` arrays for one series id."""
        ids = self.columns["series"]
        mask = [s == name for s in ids]
        x = np.array([v for v, keep in zip(self.columns["x"], mask) if keep])
        y = np.array([v for v, keep in zip(self.columns["y"], mask) if keep])
        return x, y

    def series_ids(self) -> list[str]:
        return list(dict.fromkeys(self.columns.get("series", [])))


class _Builder:
    def __init__(self):
        self.series, self.x, self.y = [], [], []

    def add(self, name, x, y):
        if math.isfinite(x) and math.isfinite(y):
            self.series.append(name)
            self.x.append(float(x))
            self.y.append(float(y))

    def columns(self):
        return {"series": self.series, "x": self.x, "y": self.y}


def _finish(figure_id, builder, cfg, x_label, y_label, **extra):
    meta = {"figure": figure_id, "x": x_label, "y": y_label, "q": cfg.q, "config": cfg.as_dict()}
    meta.update(extra)
    meta["provenance"] = provenance(meta)
    return FigureDataset(figure_id, builder.columns(), meta)


def _orders(wanted, available):
    if wanted is None:
        return list(available)
    if wanted not in available:
        raise ValueError(f"order {wanted} not available here; choose from {list(available)}")
    return [wanted]


def fig1(cfg=NOMINAL, q_max=200.0, q_points=101, per_parity=8, tol=1e-10, **_):
    """Characteristic values a_2m(q), b_2m(q) with the a = +-2q guide lines."""
    b = _Builder()
    for q in np.linspace(0.0, q_max, q_points):
        for parity in (Parity.EVEN, Parity.ODD):
            for cv in char_values(q, parity, per_parity, tol):
                name = f"{'a' if parity is Parity.EVEN else 'b'}_{cv.label.r}"
                b.add(name, q, cv.a)
        b.add("+2q", q, 2.0 * q)
        b.add("-2q", q, -2.0 * q)
    return _finish("fig1", b, cfg, "q", "a", q_max=q_max, q_points=q_points, per_parity=per_parity)


def _rotor_m_range(cfg, table: SpectrumTable):
    # rotor states of the table, folded onto m = r/2, above the separatrix
    return sorted({row.label.m for row in table if row.energy > cfg.v0 and row.label.m >= 2})


def _oscillator_n_max(cfg, order=0):
    n = 0
    while closed_form_total(order, n + 1, cfg) < cfg.v0:
        n += 1
    return n


def fig2(cfg=NOMINAL, count=DEFAULT_COUNT, order=None, tol=1e-10, **_):
    """Series minus exact energy, per state, for each order in the appropriate limit."""
    table = spectrum(cfg, count, tol)
    b = _Builder()
    osc_orders = _orders(order, range(MAX_GRADE + 1)) if order is None or order <= MAX_GRADE else []
    rot_orders = [o for o in (ROTOR_ORDERS if order is None else [order]) if o in ROTOR_ORDERS]
    for row in table:
        if row.energy < cfg.v0:
            for g in osc_orders:
                b.add(f"oscillator_order{g}", row.energy, closed_form_total(g, row.global_index, cfg) - row.energy)
        else:
            for k in rot_orders:
                if k >= 2 and row.label.m < 2:
                    continue
                b.add(f"rotor_order{k}", row.energy, rotor_energy(row.label.m, cfg, k).energy - row.energy)
    return _finish("fig2", b, cfg, "E_exact", "E_series - E_exact", count=count)


def _classical_curve(b, cfg, lo, hi, points=400, name="classical"):
    for e in np.linspace(lo, hi, points):
        point = period(float(e), cfg)
        b.add(name, point.energy, point.tau)


def fig3(cfg=NOMINAL, count=DEFAULT_COUNT, order=None, tol=1e-10, **_):
    """Rotor side: classical period curve and perturbative (E_m, tau_m) points."""
    table = spectrum(cfg, count, tol)
    ms = _rotor_m_range(cfg, table)
    b = _Builder()
    e_max = max(row.energy for row in table)
    _classical_curve(b, cfg, cfg.v0 * (1 + 1e-3), e_max)
    for k in _orders(order, ROTOR_ORDERS):
        for m in ms:
            b.add(f"rotor_order{k}", rotor_energy(m, cfg, k).energy, analytic_timescales("rotor", m, cfg, k).tau)
    return _finish("fig3", b, cfg, "E", "tau", count=count)


def fig4(cfg=NOMINAL, count=DEFAULT_COUNT, order=None, tol=1e-10, **_):
    """Rotor side: perturbative revival times."""
    table = spectrum(cfg, count, tol)
    b = _Builder()
    for k in _orders(order, ROTOR_ORDERS):
        for m in _rotor_m_range(cfg, table):
            b.add(f"rotor_order{k}", rotor_energy(m, cfg, k).energy, analytic_timescales("rotor", m, cfg, k).t_rev)
    return _finish("fig4", b, cfg, "E", "T_rev", count=count)


def fig5(cfg=NOMINAL, order=None, **_):
    """Oscillator side: classical period curve and perturbative (E_n, tau_n) points."""
    b = _Builder()
    _classical_curve(b, cfg, -cfg.v0, cfg.v0 * (1 - 1e-3))
    for g in _orders(order, range(MAX_GRADE + 1)):
        for n in range(_oscillator_n_max(cfg, g) + 1):
            b.add(f"oscillator_order{g}", closed_form_total(g, n, cfg),
                  analytic_timescales("oscillator", n, cfg, g).tau)
    return _finish("fig5", b, cfg, "E", "tau")


def fig6(cfg=NOMINAL, order=None, **_):
    """Oscillator side: perturbative revival times (order 0 has none)."""
    b = _Builder()
    for g in _orders(order, range(1, MAX_GRADE + 1)):
        for n in range(_oscillator_n_max(cfg, g) + 1):
            b.add(f"oscillator_order{g}", closed_form_total(g, n, cfg),
                  analytic_timescales("oscillator", n, cfg, g).t_rev)
    return _finish("fig6", b, cfg, "E", "T_rev")


def _discrete(cfg, count, tol):
    table = spectrum(cfg, count, tol)
    return table, {p: discrete_table(table, p) for p in (Parity.EVEN, Parity.ODD)}


def fig7(cfg=NOMINAL, count=DEFAULT_COUNT, tol=1e-10, **_):
    """Discrete periods ``2 pi hbar/|Delta E|`` against the pair-averaged energy.

    Series ``<parity>_raw`` and ``<parity>_parity-corrected`` hold the two
    variants everywhere; ``<parity>_scaled`` takes the corrected value below
    the separatrix and the raw one above it.
    """
    table, tables = _discrete(cfg, count, tol)
    b = _Builder()
    e_max = max(row.energy for row in table)
    _classical_curve(b, cfg, -cfg.v0, cfg.v0 * (1 - 1e-4), name="classical_libration")
    _classical_curve(b, cfg, cfg.v0 * (1 + 1e-4), e_max, name="classical_rotation")
    for parity, variants in tables.items():
        for variant in (RAW, CORRECTED):
            for row in variants[variant]:
                b.add(f"{parity}_{variant}", row.e_bar, row.timescales(cfg.hbar).tau)
        for raw, corrected in zip(variants[RAW], variants[CORRECTED]):
            pick = corrected if raw.e_bar < cfg.v0 else raw
            b.add(f"{parity}_scaled", pick.e_bar, pick.timescales(cfg.hbar).tau)
    return _finish("fig7", b, cfg, "E_bar", "tau", count=count)


def fig8(cfg=NOMINAL, count=DEFAULT_COUNT, tol=1e-10, points=200, **_):
    """Discrete revival times ``2 pi hbar/|Delta^2 E/2|`` with order-4 series curves."""
    table, tables = _discrete(cfg, count, tol)
    b = _Builder()
    for parity, variants in tables.items():
        for variant in (RAW, CORRECTED):
            for row in variants[variant]:
                b.add(f"{parity}_{variant}", row.e_center, row.timescales(cfg.hbar).t_rev)
        for raw, corrected in zip(variants[RAW], variants[CORRECTED]):
            pick = corrected if raw.e_center < cfg.v0 else raw
            b.add(f"{parity}_scaled", pick.e_center, pick.timescales(cfg.hbar).t_rev)
    n_top = _oscillator_n_max(cfg, MAX_GRADE) + 1.0
    for n in np.linspace(0.0, n_top, points):
        energy = closed_form_total(MAX_GRADE, n, cfg)
        if energy < cfg.v0:
            b.add("oscillator_order4", energy, analytic_timescales("oscillator", n, cfg, MAX_GRADE).t_rev)
    ms = _rotor_m_range(cfg, table)
    if ms:
        terms = rotor_terms(cfg, 4)
        for m in np.linspace(max(ms[0] - 1.0, 2.0), ms[-1], points):
            energy = sum(num(m) / den(m) for num, den in terms)
            if energy > cfg.v0:
                b.add("rotor_order4", energy, analytic_timescales("rotor", m, cfg, 4).t_rev)
    return _finish("fig8", b, cfg, "E", "T_rev", count=count)


FIGURES = {f"fig{i}": fn for i, fn in enumerate((fig1, fig2, fig3, fig4, fig5, fig6, fig7, fig8), 1)}


def build_figure(figure_id: str, cfg: PendulumConfig = NOMINAL, **options) -> FigureDataset:
    if figure_id not in FIGURES:
        raise ValueError(f"unknown figure {figure_id!r}; choose from {sorted(FIGURES)}")
    options = {k: v for k, v in options.items() if v is not None}
    return FIGURES[figure_id](cfg, **options)


def spectrum_dataset(table: SpectrumTable, frame: str = "physical", parity=None) -> FigureDataset:
    rows = list(table) if parity is None else table.select(parity)
    columns = {
        "global_index": [row.global_index for row in rows],
        "parity": [str(row.parity) for row in rows],
        "r": [row.r for row in rows],
        "a": [row.a for row in rows],
    }
    if frame == "physical":
        columns["E"] = [row.energy for row in rows]
    meta = {"table": "spectrum", "q": table.q, "frame": frame, "count": len(rows),
            "energy_scale": table.energy_scale,
            "config": table.config.as_dict() if table.config else None}
    meta["provenance"] = provenance(meta)
    return FigureDataset("spectrum", columns, meta)


def to_csv(dataset: FigureDataset) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(dataset.metadata, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    names = list(dataset.columns)
    writer.writerow(names)
    for values in zip(*(dataset.columns[n] for n in names)):
        writer.writerow([format_number(v) for v in values])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(dataset: FigureDataset) -> str:
    doc = {
        "figure_id": dataset.figure_id,
        "metadata": dataset.metadata,
        "columns": {k: [_json_value(v) for v in vals] for k, vals in dataset.columns.items()},
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _parse_cell(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def from_csv(text: str) -> FigureDataset:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata header line")
    metadata = json.loads(lines[0][2:])
    reader = csv.reader(lines[1:])
    names = next(reader)
    columns = {n: [] for n in names}
    for record in reader:
        for n, cell in zip(names, record):
            columns[n].append(_parse_cell(cell))
    figure_id = metadata.get("figure", metadata.get("table", "dataset"))
    return FigureDataset(figure_id, columns, metadata)


def from_json(text: str) -> FigureDataset:
    doc = json.loads(text)
    return FigureDataset(doc["figure_id"], doc["columns"], doc["metadata"])
