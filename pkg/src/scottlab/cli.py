"""Command-line front end: configuration, dispatch, CSV + sidecar emission.

Every run writes a CSV with a header row and a text sidecar recording the
package version, the resolved parameters and the provenance of fixed
constants.  Exit codes: 0 success, 2 usage / unknown subcommand (argparse),
3 validation failure, 4 I/O failure, 5 computation failure.  Identical
configuration (seeds included) produces byte-identical CSV output.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, expansion, hydrogen, multiscale, pauli, radial_eig, tf
from .cutoffs import SmoothCutoff
from .weyl import WeylIntegrand, weyl_coulomb_mu, weyl_integral

EXIT_OK = 0
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_COMPUTE = 5

PROVENANCE = {
    "units": "length hbar^2/(2 m e^2), energy 2 m e^4/hbar^2; kinetic -Delta",
    "S0": "S(0) = 1/8 (non-magnetic Scott coefficient)",
    "neg_part": "negative-part traces stored as sums of negative eigenvalues (<= 0)",
    "weyl_coulomb": "closed form -(z^3/6) mu^(-1/2) via B(1/2,7/2) = 5 pi/16",
}


class ValidationError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.12e" % x
    return str(x)


def write_csv(path: str, header, rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def write_sidecar(path: str, params: dict, extra: dict | None = None) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"version: scottlab {__version__}\n")
            for k, v in sorted(params.items()):
                fh.write(f"param {k}: {v}\n")
            for k, v in PROVENANCE.items():
                fh.write(f"constant {k}: {v}\n")
            for k, v in (extra or {}).items():
                fh.write(f"{k}: {v}\n")
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def load_config(path: str) -> dict:
    """Flat key=value file, UTF-8, # comments, keys use '-' like the flags."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValidationError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                out[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise IOError(f"cannot read config {path}: {exc}") from exc
    return out


def _floats(text: str):
    return [float(v) for v in str(text).replace(",", " ").split()]


# ---------------------------------------------------------------------------
# TF solution cache
# ---------------------------------------------------------------------------


_TF_MEMO: dict = {}


def get_tf_solution(cache_dir: str | None, tolerance: float = 1e-8) -> tf.TFSolution:
    key = (cache_dir, tolerance)
    if key in _TF_MEMO:
        return _TF_MEMO[key]
    sol = None
    cache_file = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        cache_file = os.path.join(cache_dir, "tf_profile.npz")
        if os.path.exists(cache_file):
            data = np.load(cache_file)
            sol = tf.rebuild_solution(float(data["slope0"]), data["x"], data["w"],
                                      data["v"], float(data["xi_tail"]))
    if sol is None:
        sol = tf.solve_tf_atom(tolerance=tolerance)
        if cache_file:
            np.savez(cache_file, slope0=sol.slope0, x=sol.spline_x,
                     w=sol.spline_w, v=sol.spline_v, xi_tail=sol.xi_tail)
    _TF_MEMO[key] = sol
    return sol


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_tf(args) -> int:
    sol = get_tf_solution(args.cache_dir, tolerance=args.tolerance)
    table = sol.profile_table()
    write_csv(args.out, ["t", "phi", "dphi"], table.tolist())
    rep = tf.tf_energy_consistency(sol)
    write_sidecar(args.out + ".meta.txt", vars_of(args), {
        "slope0": _fmt(sol.slope0),
        "E_atom": _fmt(sol.E_atom),
        "D_rho": _fmt(sol.D_rho),
        "phase_space_coeff": _fmt(sol.phase_space_coeff),
        "residual_sup": _fmt(sol.residual_sup),
        "virial_ratio": _fmt(rep.virial_ratio),
        "energy_gap": _fmt(rep.rel_gap),
        "mass_error": _fmt(rep.mass_error),
    })
    print(f"TF atom: slope0 = {sol.slope0:.9f}, E_atom = {sol.E_atom:.9f}, "
          f"residual = {sol.residual_sup:.3e}")
    return EXIT_OK


def cmd_weyl(args) -> int:
    if args.potential == "coulomb":
        if args.mu <= 0:
            raise ValidationError("coulomb Weyl integral needs mu > 0")
        value = weyl_integral(WeylIntegrand(V=lambda r: args.z / r, mu=args.mu, h=args.h))
        closed = weyl_coulomb_mu(args.mu, args.z)
        rows = [[args.potential, args.mu, args.h, value, closed]]
        header = ["potential", "mu", "h", "value", "closed_form"]
    else:
        sol = get_tf_solution(args.cache_dir)
        value = weyl_integral(WeylIntegrand(V=sol.potential(args.z), mu=args.mu, h=args.h))
        rows = [[args.potential, args.mu, args.h, value, float("nan")]]
        header = ["potential", "mu", "h", "value", "closed_form"]
    write_csv(args.out, header, rows)
    write_sidecar(args.out + ".meta.txt", vars_of(args))
    print(f"weyl integral = {value:.9e}")
    return EXIT_OK


def _resolve_potential(args):
    if args.potential == "coulomb":
        return lambda r: 1.0 / r
    if args.potential == "tf":
        sol = get_tf_solution(args.cache_dir)
        return sol.potential()
    if args.potential == "file":
        if not args.file:
            raise ValidationError("potential=file needs --file")
        try:
            data = np.loadtxt(args.file, delimiter=",", skiprows=1)
        except OSError as exc:
            raise IOError(f"cannot read {args.file}: {exc}") from exc
        r, v = data[:, 0], data[:, 1]
        return lambda q: np.interp(q, r, v, left=v[0], right=0.0)
    raise ValidationError(f"unknown potential {args.potential!r}")


def cmd_trace(args) -> int:
    V = _resolve_potential(args)
    if args.h <= 0:
        raise ValidationError("h must be positive")
    if args.mu < 0:
        raise ValidationError("mu must be nonnegative")
    if args.potential == "coulomb" and args.mu == 0.0:
        raise ValidationError("the mu = 0 Coulomb trace has infinitely many channels")
    grid = None
    if args.n:
        r_max = args.r_max or 4.0 / max(args.mu, 1e-2)
        grid = radial_eig.make_grid("sinh", min(0.3, max(5e-4, 0.5 * args.h ** 2)),
                                    r_max, args.n)
    s = radial_eig.trace_neg(V, args.h, mu=args.mu, grid=grid,
                             refine=args.refine, resolution=args.resolution,
                             max_workers=args.threads)
    rows = []
    for ell in sorted(s.eigenvalues):
        for k, e in enumerate(s.eigenvalues[ell]):
            rows.append([ell, k, float(e)])
    rows.append([-1, -1, s.trace])
    write_csv(args.out, ["l", "k", "value"], rows)
    write_sidecar(args.out + ".meta.txt", vars_of(args), {
        "trace": _fmt(s.trace),
        "n_states": str(s.n_states),
        "ell_max": str(s.ell_max),
        "summary_row": "final row l=-1,k=-1 holds the spin-weighted shifted trace",
    })
    print(f"trace = {s.trace:.9e} over {s.n_states} states, l <= {s.ell_max}")
    return EXIT_OK


def cmd_scott(args) -> int:
    if args.route == "mu-limit":
        Ns = [int(v) for v in _floats(args.N_list)]
        if any(n <= 0 for n in Ns):
            raise ValidationError("N values must be positive")
        mus = [1.0 / (4.0 * n * n) for n in sorted(Ns)]
        est = hydrogen.scott_mu_limit(mus)
        rows = []
        for mu in mus:
            t = hydrogen.trace_neg_coulomb(mu)
            w = weyl_coulomb_mu(mu, 1.0)
            rows.append([mu, t, w, t - w])
        write_csv(args.out, ["mu", "trace", "weyl", "difference"], rows)
        write_sidecar(args.out + ".meta.txt", vars_of(args),
                      {"estimate_2S": _fmt(est.value), "route": est.route})
        print(f"2S(0) ≈ {est.value:.4f}")
        return EXIT_OK

    if args.route == "cutoff-R":
        Rs = _floats(args.R_list) if args.R_list else [args.R]
        if any(r <= 0 for r in Rs):
            raise ValidationError("R values must be positive")
        est = radial_eig.scott_cutoff_schedule(Rs, refine=args.refine)
        rows = []
        for R, d in zip(est.meta["R_values"], est.meta["d_values"]):
            phi = SmoothCutoff(R)
            w = radial_eig.cutoff_weyl_coulomb(phi)
            rows.append([R, d + w, w, d])
        write_csv(args.out, ["R", "trace", "weyl", "difference"], rows)
        extra = {"estimate_2S_at_largest_R": _fmt(est.value), "route": est.route}
        if "extrapolated" in est.meta:
            extra["extrapolated_2S"] = _fmt(est.meta["extrapolated"])
        write_sidecar(args.out + ".meta.txt", vars_of(args), extra)
        print(f"2S(0) finite-R estimate at R={est.R:g}: {est.value:.4f}")
        return EXIT_OK

    if args.route == "spectral-fit":
        sol = get_tf_solution(args.cache_dir)
        hs = _floats(args.h_list)
        if any(h <= 0 for h in hs):
            raise ValidationError("h values must be positive")
        est = radial_eig.scott_spectral_fit(sol, h_list=hs, refine=args.refine,
                                            resolution=args.resolution,
                                            max_workers=args.threads)
        write_csv(args.out, ["h", "trace"],
                  [[h, t] for h, t in est.meta["samples"]])
        write_sidecar(args.out + ".meta.txt", vars_of(args), {
            "c3_pinned": _fmt(est.meta["c3"]),
            "c2_estimate_2S": _fmt(est.value),
            "max_rel_residual": _fmt(est.meta["max_rel_residual"]),
        })
        print(f"spectral fit: c2 ≈ {est.value:.4f} (2S(0) target 0.25)")
        return EXIT_OK

    if args.route == "ansatz-min":
        if args.kappa <= 0:
            raise ValidationError("ansatz-min needs kappa > 0")
        beta = args.beta if args.beta is not None else 0.5 / args.kappa
        res = pauli.minimize_scott(args.kappa, beta, args.R,
                                   n_modes=args.modes, budget=args.budget,
                                   seed=args.seed, restarts=args.restarts,
                                   theta_scale=args.theta_scale,
                                   mesh=tuple(int(v) for v in _floats(args.mesh)))
        write_csv(args.out, ["iteration", "theta_norm", "functional"],
                  [[i, n, v] for i, n, v in res.history])
        write_sidecar(args.out + ".meta.txt", vars_of(args), {
            "estimate_2S_upper_bound": _fmt(res.estimate.value),
            "zero_field_value": _fmt(res.zero_field_value),
            "theta_best": " ".join(_fmt(t) for t in res.theta),
            "budget_exhausted": str(res.budget_exhausted),
            "beats_zero_field": str(res.estimate.value < res.zero_field_value - 1e-6),
        })
        print(f"ansatz-min upper bound on 2S({args.kappa:g}) at R={args.R:g}: "
              f"{res.estimate.value:.4f} (A=0 value {res.zero_field_value:.4f})")
        return EXIT_OK

    raise ValidationError(f"unknown scott route {args.route!r}")


def cmd_partition_check(args) -> int:
    sf = multiscale.ScaleFunctions(r0=args.r0)
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for _ in range(args.n_points):
        d = math.exp(rng.uniform(math.log(args.d_min), math.log(args.d_max)))
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        x = d * direction
        val = multiscale.partition_check(x, sf)
        worst = max(worst, abs(val - 1.0))
        rows.append([x[0], x[1], x[2], d, val])
    write_csv(args.out, ["x1", "x2", "x3", "d", "integral"], rows)
    write_sidecar(args.out + ".meta.txt", vars_of(args),
                  {"max_abs_deviation": _fmt(worst)})
    print(f"partition identity: max |value - 1| = {worst:.3e} over {args.n_points} points")
    return EXIT_OK


def cmd_expansion(args) -> int:
    sol = get_tf_solution(args.cache_dir)
    Zs = _floats(args.Z_list)
    if any(z <= 0 for z in Zs):
        raise ValidationError("Z values must be positive")
    if args.alpha != 0.0:
        raise ValidationError("CLI expansion sweep supports alpha = 0 "
                              "(magnetic S has no closed value; use the API)")
    reports = expansion.expansion_sweep(Zs, args.alpha, sol, refine=args.refine,
                                        resolution=args.resolution,
                                        max_workers=args.threads)
    rows = [[r.Z, r.leading, r.scott, r.mean_field, r.residual, r.residual_over_Z2]
            for r in reports]
    write_csv(args.out, ["Z", "leading", "scott", "mean_field", "residual",
                         "residual_over_Z2"], rows)
    write_sidecar(args.out + ".meta.txt", vars_of(args))
    for r in reports:
        print(f"Z={r.Z:g}: residual/Z^2 = {r.residual_over_Z2:.6f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def vars_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scottlab",
                                description="Semiclassical Scott-correction toolkit")
    p.add_argument("--config", help="flat key=value config file; flags override it")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--out", default="scottlab_out.csv", help="output CSV path")
        sp.add_argument("--cache-dir", default=None)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("tf", help="solve the universal TF atom, export the profile")
    common(sp)
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.set_defaults(func=cmd_tf)

    sp = sub.add_parser("weyl", help="phase-space integral for a named potential")
    common(sp)
    sp.add_argument("--potential", choices=["coulomb", "tf"], default="coulomb")
    sp.add_argument("--mu", type=float, default=1e-2)
    sp.add_argument("--h", type=float, default=1.0)
    sp.add_argument("--z", type=float, default=1.0)
    sp.set_defaults(func=cmd_weyl)

    sp = sub.add_parser("trace", help="negative-eigenvalue trace of -h^2 Delta - V")
    common(sp)
    sp.add_argument("--potential", choices=["coulomb", "tf", "file"], default="coulomb")
    sp.add_argument("--file", default=None, help="CSV (r, V) when potential=file")
    sp.add_argument("--h", type=float, default=1.0)
    sp.add_argument("--mu", type=float, default=2.5e-3)
    sp.add_argument("--resolution", type=float, default=20.0)
    sp.add_argument("--refine", action="store_true")
    sp.add_argument("--r-max", type=float, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.set_defaults(func=cmd_trace)

    sp = sub.add_parser("scott", help="Scott-function estimates by route")
    common(sp)
    sp.add_argument("--route", choices=["mu-limit", "cutoff-R", "spectral-fit",
                                        "ansatz-min"], default="mu-limit")
    sp.add_argument("--N-list", default="50 100 200 400",
                    help="mu-limit: thresholds mu = 1/(4 N^2)")
    sp.add_argument("--R", type=float, default=20.0)
    sp.add_argument("--R-list", default=None)
    sp.add_argument("--h-list", default="0.125 0.1 0.0833333333333333 0.0625 0.05")
    sp.add_argument("--kappa", type=float, default=0.05)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--budget", type=int, default=60)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=1)
    sp.add_argument("--modes", type=int, default=2)
    sp.add_argument("--theta-scale", type=float, default=0.6)
    sp.add_argument("--mesh", default="80 160")
    sp.add_argument("--resolution", type=float, default=20.0)
    sp.add_argument("--refine", action="store_true", default=True)
    sp.set_defaults(func=cmd_scott)

    sp = sub.add_parser("partition-check", help="partition-of-unity identity sweep")
    common(sp)
    sp.add_argument("--n-points", type=int, default=20)
    sp.add_argument("--r0", type=float, default=1.0)
    sp.add_argument("--d-min", type=float, default=1e-3)
    sp.add_argument("--d-max", type=float, default=1e3)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_partition_check)

    sp = sub.add_parser("expansion", help="two-term vs mean-field energy sweep")
    common(sp)
    sp.add_argument("--Z-list", default="8 27 64 125")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--resolution", type=float, default=20.0)
    sp.add_argument("--refine", action="store_true", default=True)
    sp.set_defaults(func=cmd_expansion)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)

    # first pass just to find --config; then reparse with file values as defaults
    probe, _ = parser.parse_known_args(argv)
    if probe.config:
        try:
            cfg = load_config(probe.config)
        except ValidationError as exc:
            print(f"error:validation: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        except IOError as exc:
            print(f"error:io: {exc}", file=sys.stderr)
            return EXIT_IO
        for sp_action in parser._subparsers._group_actions:
            for sub_parser in sp_action.choices.values():
                overrides = {}
                for action in sub_parser._actions:
                    if action.dest in cfg:
                        overrides[action.dest] = _coerce(action, cfg[action.dest])
                if overrides:
                    sub_parser.set_defaults(**overrides)

    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error:validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, RuntimeError) as exc:
        print(f"error:compute: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except IOError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return EXIT_IO


def _coerce(action, value):
    if isinstance(action.default, bool) or isinstance(getattr(action, "const", None), bool):
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    if action.type is not None:
        try:
            return action.type(value)
        except (TypeError, ValueError):
            return value
    return value


if __name__ == "__main__":
    sys.exit(main())
