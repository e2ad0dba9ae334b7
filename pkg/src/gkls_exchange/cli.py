"""Command-line front end.

Exit codes: 0 success, 1 usage / I/O / parse error, 2 domain failure. On a
domain failure the first stderr token names the failure (a classification
name such as ``AdjointNotClosed``, or an error class such as ``NegativeRate``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import dynamics, gkls, thermo
from .decompose import Decomposition, decompose, decompose_verbose, roundtrip_residual
from .algebra import PAULI, HermitianAxis, commutator
from .exceptions import GklsExchangeError, NotExchangeCandidate
from .sampling import random_complex, random_physical_system, random_unitary
from .serialization import FormatError, dumps, form_to_json, load_system

RESIDUAL_OK = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(text):
    val = float(text)
    if not val > 0 or not np.isfinite(val):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return val


def _default_tol():
    raw = os.environ.get("LA_TOL")
    if raw is None:
        return gkls.TOL_CLOSURE
    try:
        val = float(raw)
    except ValueError:
        raise UsageError(f"LA_TOL is not a number: {raw!r}") from None
    if not val > 0 or not np.isfinite(val):
        raise UsageError("LA_TOL must be positive")
    return val


def _tol(args):
    return args.tol if args.tol is not None else _default_tol()


def _fmt(x):
    return float(x) + 0.0  # repr is lossless; drop negative zero


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load(args):
    try:
        return load_system(args.system)
    except OSError as exc:
        raise UsageError(f"cannot read {args.system}: {exc.strerror or exc}") from None
    except (json.JSONDecodeError, FormatError, GklsExchangeError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse {args.system}: {exc}") from None


# ---------------------------------------------------------------------------
# bases for evolve / steady
# ---------------------------------------------------------------------------

PAULI_HALF = tuple(HermitianAxis.from_operator(P / 2, half=True) for P in PAULI[1:])


def physical_basis(d: Decomposition):
    """``(N, D, i[N, D])`` half-normalised; ``D`` falls back to the in-plane axis."""
    N = d.form.n
    D = d.form.dphase if d.form.dphase is not None else d.rotated.a1.to_half()
    T = HermitianAxis.from_operator(1j * commutator(N.op, D.op), half=True)
    return (N, D, T)


def _resolve_basis(system, choice, tol):
    if choice == "pauli":
        return PAULI_HALF, None
    try:
        d = decompose_verbose(system, allow_negative=True, tol=tol)
    except GklsExchangeError:
        if choice == "physical":
            raise
        return PAULI_HALF, None
    return physical_basis(d), d


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_decompose(args):
    system = _load(args)
    pf = decompose(system, allow_negative=args.allow_negative, tol=_tol(args))
    res = roundtrip_residual(system, pf)
    _write(dumps(form_to_json(pf, res)) + "\n", args.output)
    if not res < RESIDUAL_OK:
        print(f"RoundTrip residual {res:.3g} exceeds {RESIDUAL_OK:g}", file=sys.stderr)
        return 2
    return 0


def cmd_evolve(args):
    system = _load(args)
    basis, _ = _resolve_basis(system, args.basis, _tol(args))
    gen = gkls.bloch_generator(system, basis)
    r0 = np.zeros(3) if args.r0 is None else np.array(args.r0, dtype=float)
    traj = dynamics.evolve(gen, r0, args.t, args.steps)
    _write(traj.to_csv(), args.output)
    return 0


def cmd_steady(args):
    system = _load(args)
    tol = _tol(args)
    basis, d = _resolve_basis(system, "physical" if args.gibbs_fit and args.basis == "auto" else args.basis, tol)
    gen = gkls.bloch_generator(system, basis)
    r = dynamics.stationary_state(gen)
    out = {"r": [_fmt(x) for x in r]}
    if args.gibbs_fit:
        if d is None:
            d = decompose_verbose(system, allow_negative=True, tol=tol)
        fit = thermo.gibbs_fit(gen.to_density(r), d.form.h_eff, d.form.n.op, tol=thermo.TOL_FIT)
        out.update(beta=fit.beta, mu=fit.mu, **{"lambda": fit.lam}, residual=fit.residual)
    _write(dumps(out) + "\n", args.output)
    return 0


def _spectrum_json(res):
    return {
        "e_over_gamma": res.e_over_gamma,
        "eps_over_gamma": res.eps_over_gamma,
        "eigenvalues": [[float(z.real), float(z.imag)] for z in res.eigenvalues],
        "ep": res.ep.value,
        "discriminant": float(res.discriminant),
        "x": float(res.x),
        "y": float(res.y),
    }


def cmd_spectrum(args):
    res = dynamics.cubic_eigenvalues(args.e, args.eps, tol_ep=args.tol_ep)
    _write(dumps(_spectrum_json(res)) + "\n", args.output)
    return 0


def cmd_epmap(args):
    n_eps = args.n_eps if args.n_eps is not None else args.n
    if args.n < 2 or n_eps < 2:
        raise UsageError("grid sizes must be >= 2")
    if not (args.e_min < args.e_max and args.eps_min < args.eps_max):
        raise UsageError("ranges must satisfy min < max")
    emap = dynamics.ep_map((args.e_min, args.e_max), (args.eps_min, args.eps_max), args.n, n_eps, tol_ep=args.tol_ep)
    _write(emap.to_csv(), args.output)
    if args.cusps:
        _write(emap.cusps_csv(), args.cusps)
    return 0


def verify_one(system, rng):
    """Round-trip, fermionic algebra and transform invariance; returns failed check names."""
    failed = []
    L0 = gkls.liouvillian_matrix(system)
    d = decompose_verbose(system)
    if roundtrip_residual(system, d.form) >= 1e-10:
        failed.append("roundtrip")
    sp, sm = d.pair.sp, d.pair.sm
    I = np.eye(2)
    if max(
        np.abs(sp @ sp).max(),
        np.abs(sp @ sm + sm @ sp - I).max(),
        np.abs(commutator(sp, sm) - d.rotated.a3.op).max(),
    ) >= 1e-12:
        failed.append("fermionic")
    variants = {
        "energy_shift": gkls.transform_energy_shift(system, rng.normal()),
        "rescale": gkls.transform_rescale(system, 0, complex(*rng.normal(size=2))),
        "identity_shift": gkls.transform_identity_shift(system, random_complex(rng, 2)),
        "unitary_mix": gkls.transform_unitary_mix(system, random_unitary(rng, 2)),
    }
    for name, other in variants.items():
        if np.abs(gkls.liouvillian_matrix(other) - L0).max() >= 1e-12 * max(1.0, np.abs(L0).max()):
            failed.append(name)
    return failed


def cmd_verify(args):
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    rng = np.random.default_rng(args.seed)
    passed = 0
    for i in range(args.count):
        failed = verify_one(random_physical_system(rng), rng)
        if failed:
            print(f"case {i}: failed {','.join(failed)}")
        else:
            passed += 1
    print(f"{passed}/{args.count}")
    return 0 if passed == args.count else 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="gkls-exchange", description="Exchange decomposition and dynamics of qubit GKLS generators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_system(sp):
        sp.add_argument("--system", required=True, help="system JSON file")
        sp.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        sp.add_argument("--tol", type=_positive, default=None, help="classification tolerance (default LA_TOL or 1e-9)")

    sp = sub.add_parser("decompose", help="physical form of a system")
    with_system(sp)
    sp.add_argument("--allow-negative", action="store_true", help="report negative exchange rates instead of failing")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("evolve", help="Bloch trajectory as CSV")
    with_system(sp)
    sp.add_argument("--t", type=_positive, default=10.0)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--r0", type=float, nargs=3, default=None, help="initial Bloch coordinates (default 0)")
    sp.add_argument("--basis", choices=["auto", "physical", "pauli"], default="auto")
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("steady", help="stationary Bloch coordinates")
    with_system(sp)
    sp.add_argument("--basis", choices=["auto", "physical", "pauli"], default="auto")
    sp.add_argument("--gibbs-fit", action="store_true", help="also fit the generalised Gibbs exponent")
    sp.set_defaults(func=cmd_steady)

    sp = sub.add_parser("spectrum", help="case-3 eigenvalues at (E, eps) in gamma units")
    sp.add_argument("--e", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--tol-ep", type=_positive, default=dynamics.TOL_EP)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("epmap", help="discriminant map and EP3 cusps")
    sp.add_argument("--e-min", type=float, default=-0.3)
    sp.add_argument("--e-max", type=float, default=0.3)
    sp.add_argument("--eps-min", type=float, default=-0.5)
    sp.add_argument("--eps-max", type=float, default=0.5)
    sp.add_argument("--n", type=int, default=201, help="grid points per axis")
    sp.add_argument("--n-eps", type=int, default=None, help="grid points along eps (default --n)")
    sp.add_argument("--tol-ep", type=_positive, default=dynamics.TOL_EP)
    sp.add_argument("--output", "-o", default=None, help="map CSV (default stdout)")
    sp.add_argument("--cusps", default="cusps.csv", help="cusp CSV path")
    sp.set_defaults(func=cmd_epmap)

    sp = sub.add_parser("verify", help="seeded self-check of the decomposition")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.set_defaults(func=cmd_verify)
    return p


def _domain_name(exc):
    if isinstance(exc, NotExchangeCandidate):
        return exc.classification.name
    return type(exc).__name__


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GklsExchangeError as exc:
        print(f"{_domain_name(exc)}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
