#!/usr/bin/env python3
"""Batch renderer for the CSV/JSON files emitted by the scsphere CLI.

Reads exactly the documented CLI schemas and draws the corresponding figure
kind; no physics is recomputed here.  Warmer colors always mean shorter
Fubini-Study distance.

    render.py --kind husimi-sphere --in heat.csv --out sphere.png
    render.py --kind husimi-stereo --in heat.csv --out cones.png
    render.py --kind trajectories  --in combo.traj.csv --out circles.png
    render.py --kind logcloud      --in cloud.csv --out cloud.png --axes 124
    render.py --kind dircloud      --in dir.csv --out dir.png
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# warm (red) at zero distance, cold (blue) at pi/2
DISTANCE_CMAP = "RdYlBu"
KINDS = ("husimi-sphere", "husimi-stereo", "trajectories", "logcloud", "dircloud")


class SchemaMismatch(Exception):
    """Input file does not match the documented CLI schema."""


# ---------------------------------------------------------------------------
# readers (schema validation lives here)
# ---------------------------------------------------------------------------

def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaMismatch(f"cannot read {path}: {exc}") from None
    if not rows:
        raise SchemaMismatch(f"{path}: empty file, expected a CSV header")
    return rows[0], rows[1:]


def _require(header: list[str], expected: list[str], path) -> None:
    for col in expected:
        if col not in header:
            raise SchemaMismatch(f"{path}: missing column {col!r} (header {header})")


def _float_col(rows, idx, path, name):
    try:
        return np.array([float(r[idx]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise SchemaMismatch(f"{path}: column {name!r} is not numeric: {exc}") from None


def read_husimi_grid(path):
    """theta,phi,H,distance rows from `scsphere husimi --grid K`."""
    header, rows = _read_rows(path)
    _require(header, ["theta", "phi", "H", "distance"], path)
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    idx = {name: header.index(name) for name in ("theta", "phi", "H", "distance")}
    theta = _float_col(rows, idx["theta"], path, "theta")
    phi = _float_col(rows, idx["phi"], path, "phi")
    h = _float_col(rows, idx["H"], path, "H")
    dist = _float_col(rows, idx["distance"], path, "distance")
    return theta, phi, h, dist


def read_trajectory(path):
    """t,k,re,im rows from `scsphere superpose --trajectory K`."""
    header, rows = _read_rows(path)
    _require(header, ["t", "k", "re", "im"], path)
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    out = []
    idx = {name: header.index(name) for name in ("t", "k", "re", "im")}
    for r in rows:
        try:
            t = float(r[idx["t"]])
            k = int(r[idx["k"]])
            re, im = r[idx["re"]], r[idx["im"]]
            z = None if re == "inf" else complex(float(re), float(im))
        except (ValueError, IndexError) as exc:
            raise SchemaMismatch(f"{path}: bad trajectory row {r}: {exc}") from None
        out.append((t, k, z))
    return out


def read_logcloud(path):
    """theta,phi,v1..v4s,omega,flag rows from `scsphere logmap`."""
    header, rows = _read_rows(path)
    _require(header, ["theta", "phi", "omega", "flag"], path)
    comps = [c for c in header if c.startswith("v") and c[1:].isdigit()]
    if not comps:
        raise SchemaMismatch(f"{path}: no component columns v1..v4s")
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    ok = [r for r in rows if r[header.index("flag")] == "ok"]
    comp_arr = np.array(
        [[float(r[header.index(c)]) for c in comps] for r in ok]
    )
    omega = np.array([float(r[header.index("omega")]) for r in ok])
    return comps, comp_arr, omega


def read_dircloud(path):
    """kind,theta,phi,eta,p1,p2,p3,flag rows from `scsphere logmap --projection stereo`."""
    header, rows = _read_rows(path)
    _require(header, ["kind", "p1", "p2", "p3", "flag"], path)
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    i_kind = header.index("kind")
    i_p = [header.index(f"p{j}") for j in (1, 2, 3)]
    i_flag = header.index("flag")
    samples = []
    circles: dict[str, list] = {}
    for r in rows:
        try:
            p = [float(r[j]) for j in i_p]
        except ValueError:
            continue  # cut-locus samples have empty projections
        if r[i_kind] == "sample":
            if r[i_flag] == "ok":
                samples.append(p)
        elif r[i_kind].startswith("circle"):
            circles.setdefault(r[i_kind], []).append(p)
        else:
            raise SchemaMismatch(f"{path}: unknown row kind {r[i_kind]!r}")
    return np.array(samples), {k: np.array(v) for k, v in circles.items()}


# ---------------------------------------------------------------------------
# renderers
# ---------------------------------------------------------------------------

def render_husimi_sphere(in_path, out_path):
    theta, phi, _, dist = read_husimi_grid(in_path)
    thetas = np.unique(theta)
    phis = np.unique(phi)
    grid = dist.reshape(len(thetas), len(phis))
    # close the azimuthal seam
    phis_c = np.append(phis, phis[0] + 2 * math.pi)
    grid_c = np.column_stack([grid, grid[:, 0]])
    tt, pp = np.meshgrid(thetas, phis_c, indexing="ij")
    x = np.sin(tt) * np.cos(pp)
    y = np.sin(tt) * np.sin(pp)
    z = np.cos(tt)
    norm = plt.Normalize(0.0, math.pi / 2)
    colors = plt.get_cmap(DISTANCE_CMAP)(norm(grid_c))
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(x, y, z, facecolors=colors, rstride=1, cstride=1, shade=False)
    ax.set_box_aspect((1, 1, 1))
    ax.set_axis_off()
    fig.colorbar(
        plt.cm.ScalarMappable(norm=norm, cmap=DISTANCE_CMAP),
        ax=ax,
        shrink=0.6,
        label="distance to the state (warmer = closer)",
    )
    _save(fig, out_path)


def render_husimi_stereo(in_path, out_path, theta_cut=0.88 * math.pi):
    theta, phi, _, dist = read_husimi_grid(in_path)
    thetas = np.unique(theta)
    phis = np.unique(phi)
    grid = dist.reshape(len(thetas), len(phis))
    keep = thetas <= theta_cut  # stereographic radius blows up at the south pole
    thetas = thetas[keep]
    grid = grid[keep]
    phis_c = np.append(phis, phis[0] + 2 * math.pi)
    grid_c = np.column_stack([grid, grid[:, 0]])
    tt, pp = np.meshgrid(thetas, phis_c, indexing="ij")
    r = np.tan(tt / 2)
    x, y = r * np.cos(pp), r * np.sin(pp)
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    norm = plt.Normalize(0.0, math.pi / 2)
    ax.plot_surface(
        x,
        y,
        grid_c,
        facecolors=plt.get_cmap(DISTANCE_CMAP)(norm(grid_c)),
        rstride=1,
        cstride=1,
        shade=False,
    )
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_zlabel("distance")
    _save(fig, out_path)


def render_trajectories(in_path, out_path):
    samples = read_trajectory(in_path)
    ks = sorted({k for _, k, _ in samples})
    fig, (ax_plane, ax_sphere) = plt.subplots(
        1, 2, figsize=(11, 5), subplot_kw=None, squeeze=True
    )
    fig.delaxes(ax_sphere)
    ax_sphere = fig.add_subplot(1, 2, 2, projection="3d")
    cmap = plt.get_cmap("tab10")
    for k in ks:
        pts = [(t, z) for t, kk, z in samples if kk == k and z is not None]
        zs = np.array([z for _, z in pts])
        ax_plane.plot(zs.real, zs.imag, ".", ms=2, color=cmap(k % 10), label=f"root {k}")
        # stereographic lift to the sphere
        d = 1 + np.abs(zs) ** 2
        ax_sphere.plot(
            2 * zs.real / d, 2 * zs.imag / d, (1 - np.abs(zs) ** 2) / d,
            ".", ms=2, color=cmap(k % 10),
        )
    start = [z for t, _, z in samples if t == samples[0][0] and z is not None]
    if start:
        ax_plane.plot([start[0].real], [start[0].imag], "k*", ms=12)
    ax_plane.set_xlabel("Re")
    ax_plane.set_ylabel("Im")
    ax_plane.set_aspect("equal", adjustable="datalim")
    ax_plane.legend(loc="best", fontsize=8)
    lim = 1.05
    u, v = np.meshgrid(np.linspace(0, 2 * math.pi, 30), np.linspace(0, math.pi, 15))
    ax_sphere.plot_wireframe(
        np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v),
        color="0.85", linewidth=0.3,
    )
    ax_sphere.set_box_aspect((1, 1, 1))
    ax_sphere.set_xlim(-lim, lim)
    ax_sphere.set_ylim(-lim, lim)
    ax_sphere.set_zlim(-lim, lim)
    ax_sphere.set_axis_off()
    _save(fig, out_path)


def render_logcloud(in_path, out_path, axes="123"):
    comps, comp_arr, omega = read_logcloud(in_path)
    try:
        picks = [int(c) - 1 for c in axes]
    except ValueError:
        raise SchemaMismatch(f"bad axes spec {axes!r}") from None
    if len(picks) != 3 or max(picks) >= comp_arr.shape[1] or min(picks) < 0:
        raise SchemaMismatch(
            f"axes {axes!r} out of range for {comp_arr.shape[1]} components"
        )
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    norm = plt.Normalize(0.0, math.pi / 2)
    ax.scatter(
        comp_arr[:, picks[0]],
        comp_arr[:, picks[1]],
        comp_arr[:, picks[2]],
        c=omega,
        cmap=DISTANCE_CMAP,
        norm=norm,
        s=3,
    )
    ax.set_xlabel(f"v{picks[0] + 1}")
    ax.set_ylabel(f"v{picks[1] + 1}")
    ax.set_zlabel(f"v{picks[2] + 1}")
    fig.colorbar(
        plt.cm.ScalarMappable(norm=norm, cmap=DISTANCE_CMAP),
        ax=ax,
        shrink=0.6,
        label="geodesic distance (warmer = closer)",
    )
    _save(fig, out_path)


def render_dircloud(in_path, out_path):
    samples, circles = read_dircloud(in_path)
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    if samples.size:
        ax.scatter(samples[:, 0], samples[:, 1], samples[:, 2], s=2, c="0.4")
    for name in sorted(circles):
        arc = circles[name]
        ax.plot(arc[:, 0], arc[:, 1], arc[:, 2], linewidth=2, label=name)
    ax.set_xlabel("p1")
    ax.set_ylabel("p2")
    ax.set_zlabel("p3")
    if circles:
        ax.legend(loc="best", fontsize=8)
    _save(fig, out_path)


def _save(fig, out_path):
    fig.savefig(out_path, dpi=110)
    plt.close(fig)


RENDERERS = {
    "husimi-sphere": render_husimi_sphere,
    "husimi-stereo": render_husimi_stereo,
    "trajectories": render_trajectories,
    "logcloud": render_logcloud,
    "dircloud": render_dircloud,
}


def render(kind: str, in_path, out_path, axes: str = "123") -> None:
    """Render one figure kind; raises SchemaMismatch before any file is written."""
    if kind not in RENDERERS:
        raise SchemaMismatch(f"unknown kind {kind!r}, expected one of {KINDS}")
    if kind == "logcloud":
        RENDERERS[kind](in_path, out_path, axes=axes)
    else:
        RENDERERS[kind](in_path, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="in_path", required=True, type=Path)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--axes", default="123", help="logcloud component axes")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.in_path, args.out, axes=args.axes)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
