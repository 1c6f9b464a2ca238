"""Command-line front end.

Exit codes: 0 success, 1 failed check or other library error, 2 parse
error, 3 rank cap, 4 not traceless, 5 pairing failure, 6 observable order
above 2J, 7 zero state.
"""

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import (
    MultipoleError,
    NotTraceless,
    OrderExceedsSpin,
    OrderOutOfRange,
    PairingFailure,
    SchemaError,
    ZeroState,
)

EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_RANK = 3
EXIT_TRACE = 4
EXIT_PAIRING = 5
EXIT_ORDER = 6
EXIT_ZERO_STATE = 7

_EXIT_CODES = (
    (SchemaError, EXIT_PARSE),
    (OrderOutOfRange, EXIT_RANK),
    (NotTraceless, EXIT_TRACE),
    (PairingFailure, EXIT_PAIRING),
    (OrderExceedsSpin, EXIT_ORDER),
    (ZeroState, EXIT_ZERO_STATE),
)

METHODS = ("tensor", "skeleton", "oracle")
DELTA_TOL = 1e-7


class CommandError(Exception):
    def __init__(self, status, message):
        super().__init__(message)
        self.status = status


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise CommandError(EXIT_PARSE, f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CommandError(EXIT_PARSE, f"{path}: malformed JSON ({exc})") from None


def _dump(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _sidecar(out, suffix):
    out = Path(out)
    return out.with_name(out.stem + suffix)


def _emit(outputs, out):
    """Write ``[(suffix, text), ...]``; the first goes to --out (or stdout)."""
    if out is None:
        sys.stdout.write("\n".join(text for _, text in outputs))
        return
    # Everything is computed before the first byte is written.
    for i, (suffix, text) in enumerate(outputs):
        target = Path(out) if i == 0 else _sidecar(out, suffix)
        target.write_text(text, encoding="utf-8")


# ------------------------------------------------------------------ commands

def cmd_decompose(args):
    from .harmonic import harmonic_components, reconstruct
    from .symtensor import tensor_from_json

    tensor = tensor_from_json(_load_json(args.input))
    comps = harmonic_components(tensor)
    residual = float(np.max(np.abs(reconstruct(comps).to_complex().coeffs - tensor.to_complex().coeffs)))
    doc = {"components": [c.to_json() for c in comps], "residual": residual}
    _emit([("", _dump(doc))], args.out)
    return 0, f"{len(comps)} components, reconstruction residual {residual:.1e}"


def cmd_sylvester(args):
    from .harmonic import HarmonicTensor
    from .multipole import great_circle_samples, skeleton_to_harmonic, sylvester_decompose

    h = HarmonicTensor.from_json(_load_json(args.input))
    skel = sylvester_decompose(h)
    rebuilt = skeleton_to_harmonic(skel)
    residual = float(np.max(np.abs(rebuilt.coeffs - h.base.to_float().coeffs)) / h.norm())
    doc = skel.to_json()
    doc["residual"] = residual
    doc["multiplicities"] = list(skel.multiplicities)
    outputs = [("", _dump(doc))]
    if args.circles is not None:
        if args.circles < 3:
            raise CommandError(EXIT_PARSE, "--circles needs at least 3 samples")
        samples = great_circle_samples(skel, args.circles)
        rows = [(k, repr(float(x)), repr(float(y)), repr(float(z))) for k, x, y, z in samples.csv_rows()]
        outputs.append((".circles.csv", _csv_text(("circle_index", "x", "y", "z"), rows)))
    _emit(outputs, args.out)
    return 0, f"order {skel.order} skeleton, scale {skel.scale:.6g}, residual {residual:.1e}"


def _parse_methods(raw):
    if not raw:
        return list(METHODS)
    methods = []
    for item in raw:
        for name in item.split(","):
            if name not in METHODS:
                raise CommandError(EXIT_PARSE, f"unknown method {name!r}")
            if name not in methods:
                methods.append(name)
    return methods


def cmd_expect(args):
    from . import operator as op
    from . import oracle
    from .spinstate import SpinState

    methods = _parse_methods(args.method)
    psi = SpinState.from_json(_load_json(args.state))
    obs = op.ClassicalObservable.from_json(_load_json(args.observable))
    values = {
        "tensor": op.expectation_tensor(psi, obs),
        "skeleton": op.expectation_skeleton(psi, obs),
        "oracle": oracle.expectation_matrix(
            psi, oracle.quantize_observable(op.to_classical(obs, psi.two_j), psi.two_j)
        ),
    }
    # The cross-check always spans all three routes; --method only filters the printout.
    delta = max(values.values()) - min(values.values())
    doc = {"values": {m: values[m] for m in methods}, "max_delta": delta}
    _emit([("", _dump(doc))], args.out)
    status = 0 if delta < DELTA_TOL else EXIT_FAIL
    shown = ", ".join(f"{m}={values[m]:.12g}" for m in methods)
    return status, f"{shown}; max delta {delta:.1e}"


def husimi_grid(psi, grid):
    """Midpoint latitude-longitude grid: rows (theta_index, phi_index, theta, phi, Q)."""
    from .spinstate import husimi_many

    theta = (np.arange(grid) + 0.5) * np.pi / grid
    phi = (np.arange(2 * grid) + 0.5) * np.pi / grid
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    q = husimi_many(psi, pts.reshape(-1, 3)).reshape(th.shape)
    return theta, phi, q


def cmd_husimi(args):
    from .spinstate import SpinState, majorana_stars

    if args.grid < 8:
        raise CommandError(EXIT_PARSE, "--grid must be at least 8")
    psi = SpinState.from_json(_load_json(args.state))
    theta, phi, q = husimi_grid(psi, args.grid)
    rows = [
        (i, j, repr(float(theta[i])), repr(float(phi[j])), repr(float(q[i, j])))
        for i in range(len(theta))
        for j in range(len(phi))
    ]
    stars = majorana_stars(psi)
    csv_text = _csv_text(("theta_index", "phi_index", "theta", "phi", "Q"), rows)
    _emit([("", csv_text), (".stars.json", _dump(stars.to_json()))], args.out)
    return 0, f"{len(rows)} samples, {stars.two_j} stars"


def cmd_check(args):
    from .acceptance import format_report, run_suite

    results = run_suite(seed=args.seed)
    report = format_report(results, args.seed)
    _emit([("", report)], args.out)
    failed = [r.key for r in results if not r.passed]
    if failed:
        return EXIT_FAIL, f"failed checks: {', '.join(failed)}"
    return 0, f"{len(results)} checks passed"


# ------------------------------------------------------------------ plumbing

def build_parser():
    parser = argparse.ArgumentParser(
        prog="msylvester",
        description="Harmonic decomposition, multipole vectors and spin expectation values.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="harmonic components of a symmetric tensor")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("sylvester", help="multipole vectors of a harmonic tensor")
    p.add_argument("input")
    p.add_argument("--circles", type=int, metavar="N", help="also emit N points per nodal circle")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sylvester)

    p = sub.add_parser("expect", help="expectation value of an observable")
    p.add_argument("state")
    p.add_argument("observable")
    p.add_argument("--method", action="append", help="tensor, skeleton or oracle (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("husimi", help="Husimi samples and Majorana stars")
    p.add_argument("state")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--out")
    p.set_defaults(func=cmd_husimi)

    p = sub.add_parser("check", help="run the self-check suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        status, summary = args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status
    except MultipoleError as exc:
        status = next((code for cls, code in _EXIT_CODES if isinstance(exc, cls)), EXIT_FAIL)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return status
    print(summary, file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
