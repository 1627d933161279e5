"""Command-line interface.

Thin adapters only: every subcommand parses files, calls the library, and
serializes results.  Exit codes: 0 success, 1 validation error (bad files or
arguments), 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import fsgeom, husimi, io, superpose, verify
from .config import DEFAULT_TOLS
from .errors import NumericalError, ValidationError
from .scbasis import adapted_basis, expand_in_sc_basis, sc_basis
from .stellar import (
    majorana_polynomial,
    polynomial_roots,
    spin_label,
    state_from_constellation,
    two_s_from_spin,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; bad usage is code 1
        self.print_usage(sys.stderr)
        raise SystemExit(1) if not message else _usage_exit(message)


def _usage_exit(message):
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    common.add_argument(
        "--tol",
        action="append",
        default=[],
        metavar="KEY=VAL",
        help="override a tolerance (repeatable); see scsphere.config.Tolerances",
    )
    parser = _Parser(prog="scsphere", description=__doc__, parents=[common])
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    class _Sub:
        def add_parser(self, name, **kw):
            return subparsers.add_parser(name, parents=[common], **kw)

    sub = _Sub()

    p = sub.add_parser("stars", help="constellation of a state file")
    p.add_argument("state", type=Path)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("state", help="state of a constellation file")
    p.add_argument("constellation", type=Path)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("expand", help="expand a state in an SC basis")
    p.add_argument("state", type=Path)
    p.add_argument("basis", type=Path, help="constellation file with N+1 directions")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("adapted-basis", help="Husimi-adapted SC basis and coefficients")
    p.add_argument("state", type=Path)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("husimi", help="critical points and closest SC state")
    p.add_argument("state", type=Path)
    p.add_argument("--grid", type=int, default=0, metavar="K",
                   help="also write a K x K heatmap CSV (theta,phi,H,distance)")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("logmap", help="log-map cloud of the coherent sphere")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", type=Path)
    src.add_argument("--alpha", type=float, help="spin-1 star half-angle family")
    p.add_argument("--spin", default=None,
                   help="cross-check: must match the state file (the --alpha family is spin 1)")
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument(
        "--projection",
        default="123",
        choices=["123", "124", "134", "234", "stereo"],
        help="component axes recorded for rendering, or stereo direction cloud",
    )
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("superpose", help="combine two states")
    p.add_argument("--a", required=True, metavar="RE,IM")
    p.add_argument("--b", required=True, metavar="RE,IM")
    p.add_argument("state1", type=Path)
    p.add_argument("state2", type=Path)
    p.add_argument("--trajectory", type=int, default=0, metavar="K",
                   help="write the K-sample root-trajectory CSV (needs SC inputs)")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("verify", help="run the invariant property suite")
    return parser


def _parse_tols(pairs):
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"--tol expects KEY=VAL, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            overrides[key.strip()] = float(val)
        except ValueError:
            raise ValidationError(f"--tol value {val!r} is not a number") from None
    try:
        return DEFAULT_TOLS.override(**overrides)
    except KeyError as exc:
        raise ValidationError(str(exc)) from None


def _parse_complex(text: str) -> complex:
    try:
        re_part, im_part = text.split(",")
        return complex(float(re_part), float(im_part))
    except ValueError:
        raise ValidationError(f"expected RE,IM, got {text!r}") from None


def _emit(obj, out: Path | None) -> None:
    text = json.dumps(obj, indent=1) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_stars(args, tols):
    state = io.load_state(args.state)
    con = polynomial_roots(majorana_polynomial(state), tols)
    _emit(io.constellation_to_obj(con), args.out)
    return 0


def _cmd_state(args, tols):
    con = io.load_constellation(args.constellation)
    state = state_from_constellation(con, tols)
    _emit(io.state_to_obj(state), args.out)
    return 0


def _cmd_expand(args, tols):
    state = io.load_state(args.state)
    dirs = io.load_directions(args.basis)
    if len(dirs) != state.two_s + 1:
        raise ValidationError(
            f"basis file must hold {state.two_s + 1} simple directions"
        )
    basis = sc_basis(dirs, state.two_s, tols)
    exp = expand_in_sc_basis(state, basis, tols)
    _emit(
        {
            "alphas": [[a.real, a.imag] for a in exp.alphas],
            "residual": exp.residual,
        },
        args.out,
    )
    return 0


def _cmd_adapted_basis(args, tols):
    state = io.load_state(args.state)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        basis, exp = adapted_basis(state, tols)
    _emit(
        {
            "basis": [
                {"theta": d.theta, "phi": d.phi, "mult": 1} for d in basis.directions
            ],
            "alphas": [[a.real, a.imag] for a in exp.alphas],
            "residual": exp.residual,
        },
        args.out,
    )
    return 0


def _cmd_husimi(args, tols):
    state = io.load_state(args.state)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cps = husimi.critical_points(state, tols)
        _, r_c, ties = husimi.closest_sc(state, tols)
    payload = {
        "criticals": [
            {
                "theta": c.direction.theta,
                "phi": c.direction.phi,
                "kind": c.kind,
                "value": c.value,
                **({"saddle_phi": c.saddle_phi} if c.saddle_phi is not None else {}),
            }
            for c in cps
        ],
        "r_c": r_c,
        "ties": [{"theta": d.theta, "phi": d.phi} for d in ties],
    }
    if args.grid:
        if args.out is None:
            raise ValidationError("--grid needs --out for the CSV")
        rows = []
        for theta in np.linspace(0.0, math.pi, args.grid):
            for phi in np.linspace(0.0, 2 * math.pi, args.grid, endpoint=False):
                h = husimi.husimi(state, _direction(theta, phi))
                rows.append([theta, phi, h, math.acos(min(1.0, math.sqrt(h)))])
        io.write_csv(args.out, ["theta", "phi", "H", "distance"], rows)
        sys.stdout.write(json.dumps(payload, indent=1) + "\n")
    else:
        _emit(payload, args.out)
    return 0


def _direction(theta, phi):
    from .stellar import direction as make

    return make(theta, phi)


def _cmd_logmap(args, tols):
    if args.alpha is not None:
        if args.spin is not None and two_s_from_spin(args.spin) != 2:
            raise ValidationError("the --alpha family is a spin-1 construction")
        base = fsgeom.equatorial_pair_state(args.alpha)
        frame = fsgeom.equatorial_pair_frame(args.alpha)
    else:
        base = io.load_state(args.state)
        if args.spin is not None and two_s_from_spin(args.spin) != base.two_s:
            raise ValidationError(
                f"--spin {args.spin} does not match the state file (2s = {base.two_s})"
            )
        frame = fsgeom.tangent_frame(base)
    if args.projection == "stereo":
        cloud = fsgeom.direction_cloud(base, args.resolution, tols, frame=frame)
        header = ["kind", "theta", "phi", "eta", "p1", "p2", "p3", "flag"]
        rows = []
        for i in range(len(cloud.thetas)):
            rows.append(
                ["sample", cloud.thetas[i], cloud.phis[i], ""]
                + list(cloud.projected[i])
                + [cloud.flags[i]]
            )
        etas = np.linspace(0, 2 * math.pi, len(cloud.circle_projected[0]))
        for ci, circle in enumerate(cloud.circle_projected):
            for eta, row in zip(etas, circle):
                rows.append([f"circle{ci}", "", "", eta] + list(row) + ["cutlocus"])
        io.write_csv(args.out, header, rows)
        return 0
    cloud = fsgeom.sc_log_cloud(base, args.resolution, tols, frame=frame)
    n_comp = cloud.components.shape[1]
    header = (
        ["theta", "phi"] + [f"v{i + 1}" for i in range(n_comp)] + ["omega", "flag"]
    )
    rows = [
        [cloud.thetas[i], cloud.phis[i]]
        + list(cloud.components[i])
        + [cloud.omegas[i], cloud.flags[i]]
        for i in range(len(cloud.thetas))
    ]
    io.write_csv(args.out, header, rows)
    return 0


def _cmd_superpose(args, tols):
    a = _parse_complex(args.a)
    b = _parse_complex(args.b)
    s1 = io.load_state(args.state1)
    s2 = io.load_state(args.state2)
    res = superpose.superpose(a, s1, b, s2, tols)
    payload = {
        "state": io.state_to_obj(res.state),
        "constellation": io.constellation_to_obj(res.constellation),
        "mason_bound": res.mason_bound,
    }
    _emit(payload, args.out)
    if args.trajectory:
        c1 = polynomial_roots(majorana_polynomial(s1), tols)
        c2 = polynomial_roots(majorana_polynomial(s2), tols)
        if len(c1.points) != 1 or len(c2.points) != 1:
            raise ValidationError("--trajectory needs two coherent input states")
        if c1.points[0].is_infinite or c2.points[0].is_infinite:
            raise ValidationError("rotate inputs away from the south pole first")
        n = s1.two_s
        g1, g2 = c1.points[0].value, c2.points[0].value
        # the given weights fix the ray angle through e^{i N Omega} tan^N t
        a_scaled = a / (1 + abs(g1) ** 2) ** (n / 2)
        b_scaled = b / (1 + abs(g2) ** 2) ** (n / 2)
        omega = float(np.angle(-b_scaled / a_scaled)) / n
        ts = np.linspace(0.0, math.pi, args.trajectory)
        traj = superpose.two_sc_trajectory(g1, g2, omega, ts, tols, two_s=n)
        out = args.out.with_suffix(".traj.csv") if args.out else Path("trajectory.csv")
        rows = []
        for i, t in enumerate(traj.ts):
            for k in range(n):
                z = traj.roots[i, k]
                if np.isfinite(z):
                    rows.append([t, k, z.real, z.imag])
                else:
                    rows.append([t, k, "inf", "inf"])
        io.write_csv(out, ["t", "k", "re", "im"], rows)
    return 0


def _cmd_verify(args, tols):
    report, ok = verify.run_verify(args.seed, tols)
    sys.stdout.write(report)
    return 0 if ok else 2


_COMMANDS = {
    "stars": _cmd_stars,
    "state": _cmd_state,
    "expand": _cmd_expand,
    "adapted-basis": _cmd_adapted_basis,
    "husimi": _cmd_husimi,
    "logmap": _cmd_logmap,
    "superpose": _cmd_superpose,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tols = _parse_tols(args.tol)
        return _COMMANDS[args.command](args, tols)
    except SystemExit:
        raise
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
