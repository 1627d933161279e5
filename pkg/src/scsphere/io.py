"""File formats shared by the CLI and the figure pipeline.

State files are JSON objects {"spin": "3/2" | 2, "coeffs": [[re, im], ...]}
with coefficients ordered m = s .. -s; constellation files are JSON lists of
{"theta": t, "phi": p, "mult": k}.  CSV schemas carry a fixed header row and
are documented per writer.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch, ValidationError
from .stellar import (
    Constellation,
    Direction,
    SpinState,
    cluster_points,
    direction,
    sphere_to_stereo,
    spin_label,
    spin_state,
    two_s_from_spin,
)

__all__ = [
    "load_state",
    "dump_state",
    "state_to_obj",
    "state_from_obj",
    "load_constellation",
    "dump_constellation",
    "constellation_to_obj",
    "constellation_from_obj",
    "write_csv",
]


def state_to_obj(state: SpinState) -> dict:
    return {
        "spin": spin_label(state.two_s),
        "coeffs": [[c.real, c.imag] for c in state.coeffs],
    }


def state_from_obj(obj) -> SpinState:
    if not isinstance(obj, dict) or "spin" not in obj or "coeffs" not in obj:
        raise SchemaMismatch('state file needs {"spin": ..., "coeffs": [[re, im], ...]}')
    two_s = two_s_from_spin(obj["spin"])
    coeffs = obj["coeffs"]
    if len(coeffs) != two_s + 1:
        raise SchemaMismatch(
            f"spin {obj['spin']} needs {two_s + 1} coefficients, file has {len(coeffs)}"
        )
    try:
        c = np.array([complex(re, im) for re, im in coeffs])
    except (TypeError, ValueError) as exc:
        raise SchemaMismatch(f"coeffs entries must be [re, im] pairs: {exc}") from None
    return spin_state(c, two_s)


def load_state(path) -> SpinState:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: invalid JSON at line {exc.lineno}") from None
    return state_from_obj(obj)


def dump_state(state: SpinState, path) -> None:
    Path(path).write_text(json.dumps(state_to_obj(state), indent=1) + "\n")


def constellation_to_obj(con: Constellation) -> list:
    out = []
    for p, m in zip(con.points, con.mults):
        d = direction(math.pi, 0.0) if p.is_infinite else None
        from .stellar import stereo_to_sphere

        d = d or stereo_to_sphere(p)
        out.append({"theta": d.theta, "phi": d.phi, "mult": int(m)})
    return out


def constellation_from_obj(obj, tol: float = 1e-12) -> Constellation:
    if not isinstance(obj, list) or not obj:
        raise SchemaMismatch("constellation file must be a non-empty JSON list")
    pts = []
    for i, rec in enumerate(obj):
        try:
            theta, phi = float(rec["theta"]), float(rec["phi"])
            mult = int(rec.get("mult", 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatch(f"constellation entry {i}: {exc}") from None
        pts.extend([sphere_to_stereo(direction(theta, phi))] * mult)
    return cluster_points(pts, tol)


def load_constellation(path) -> Constellation:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: invalid JSON at line {exc.lineno}") from None
    return constellation_from_obj(obj)


def load_directions(path) -> list[Direction]:
    """Directions of a constellation file in file order (mults expanded).

    Basis files are order-sensitive: the k-th expansion coefficient belongs
    to the k-th listed direction, so no canonical re-sorting happens here.
    """
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: invalid JSON at line {exc.lineno}") from None
    if not isinstance(obj, list) or not obj:
        raise SchemaMismatch("constellation file must be a non-empty JSON list")
    out = []
    for i, rec in enumerate(obj):
        try:
            out.extend(
                [direction(float(rec["theta"]), float(rec["phi"]))]
                * int(rec.get("mult", 1))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaMismatch(f"constellation entry {i}: {exc}") from None
    return out


def dump_constellation(con: Constellation, path) -> None:
    Path(path).write_text(json.dumps(constellation_to_obj(con), indent=1) + "\n")


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
