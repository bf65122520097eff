"""Snapshot CSV and diagnostics JSON."""

import json
import math
from pathlib import Path

import numpy as np

from relwave.grid import Grid, ScalarField, SpinorField

__all__ = [
    "SCHEMA_VERSION",
    "diagnostics_document",
    "read_snapshot_csv",
    "snapshot_filename",
    "write_diagnostics_json",
    "write_snapshot_csv",
    "snapshot_records",
]

SCHEMA_VERSION = "relwave.diagnostics/1"
SCALAR_HEADER = ("xi", "re", "im", "abs2")
SPINOR_HEADER = ("xi", "re_plus", "im_plus", "re_minus", "im_minus", "abs2")


def snapshot_filename(name: str, index: int, tau: float, ext: str = "csv") -> str:
    return f"{name}_{index:03d}_tau{tau:.6g}.{ext}"


def _columns(field):
    xi = field.grid.xi_nodes
    if isinstance(field, SpinorField):
        p, m = field.plus_component, field.minus_component
        return SPINOR_HEADER, [xi, p.real, p.imag, m.real, m.imag, field.density()]
    return SCALAR_HEADER, [xi, field.values.real, field.values.imag, field.density()]


def write_snapshot_csv(path, field) -> None:
    """Write samples with 17 significant digits (lossless for float64)."""
    header, cols = _columns(field)
    data = np.column_stack(cols)
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt="%.17g")


def read_snapshot_csv(path, length: float | None = None):
    """Read a snapshot back as a field on the grid it was written from.

    The grid length is inferred from the node spacing unless given.
    """
    with open(path) as fh:
        header = tuple(fh.readline().strip().split(","))
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n = data.shape[0]
    if length is None:
        length = (data[1, 0] - data[0, 0]) * n
    grid = Grid(n, length)
    if header == SCALAR_HEADER:
        return ScalarField(grid, data[:, 1] + 1j * data[:, 2])
    if header == SPINOR_HEADER:
        return SpinorField(grid, data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4])
    raise ValueError(f"unrecognized snapshot header {header!r}")


def snapshot_records(field) -> dict:
    header, cols = _columns(field)
    return {h: [float(v) for v in c] for h, c in zip(header, cols)}


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def diagnostics_document(cfg, result, equation_label=None) -> dict:
    """JSON-ready summary of one scenario run."""
    entries = []
    for rep in result.diagnostics:
        d = {k: _clean(v) for k, v in rep.to_dict().items()}
        if cfg.units is not None:
            d["t_physical"] = cfg.units.time(rep.tau)
            if rep.rms_position is not None:
                d["rms_position_physical"] = cfg.units.length(rep.rms_position)
        entries.append(d)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": cfg.name,
        "equation": equation_label or cfg.equation,
        "packet": {
            "family": cfg.packet.family.value,
            "beta": cfg.packet.beta,
            "b": cfg.packet.b,
            "normalize": cfg.normalize,
        },
        "grid": {"n_points": cfg.n_points, "length": cfg.length},
        "times": list(cfg.times),
        "diagnostics": entries,
        "notes": list(result.notes),
    }
    if cfg.packet.is_spinor:
        doc["packet"]["component_weights"] = [[w.real, w.imag] for w in cfg.packet.weights]
    if cfg.mu0 is not None:
        doc["mu0"] = cfg.mu0
    if cfg.units is not None:
        doc["units"] = {"lambda_c": cfg.units.lambda_c, "c": cfg.units.c}
    if result.closed_form_errors is not None:
        doc["closed_form_errors"] = [{"tau": t, "sup_norm_error": e}
                                     for t, e in result.closed_form_errors]
    return doc


def write_diagnostics_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
