"""Command-line front end.

Subcommands mirror the library operations (eigen, threshold, simulate,
phase-diagram, ep-find, ep-scaling, floquet, encircle, squeeze, mc-squeeze)
plus ``figure`` presets regenerating the labeled figure datasets.  Options
resolve as defaults < --config JSON < explicit flags; the resolved
configuration is hashed into every output file's provenance header.

Exit codes: 0 success, 2 usage/config error, 3 numerical failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .config import Opt, RunConfig, resolve_config
from .dynamics import SimSettings, classify_regime, integrate, phase_diagram
from .ep import find_ep2, find_ep4, scaling_exponent
from .errors import (AboveThresholdError, EigenConvergenceError,
                     IntegrationError, ParaEPError, SearchError,
                     ValidationError)
from .figures import FIGURES, run_figure
from .floquet import encircle, find_fep, monodromy
from .model import (AmplitudeModulated, Constant, FieldState, SystemParams,
                    matrix_field_basis, matrix_nondegenerate, matrix_quadrature)
from .output import write_csv
from .spectral import eig_dense, find_threshold
from .squeezing import langevin_mc, squeezing_spectrum

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_PARAM_OPTS = {
    "gamma": Opt(float, 0.25, "field decay rate (both resonators)"),
    "kappa": Opt(float, 1.0, "dispersive coupling"),
    "g": Opt(float, 0.0, "pump-1 parametric gain"),
    "f": Opt(float, 0.0, "pump-2 parametric gain"),
    "phi": Opt(float, 0.0, "pump relative phase (rad)"),
    "delta1": Opt(float, 0.0, "resonator-1 detuning"),
    "delta2": Opt(float, 0.0, "resonator-2 detuning"),
    "gs": Opt(float, 0.0, "gain saturation (both resonators)"),
    "rho": Opt(float, 1.0, "escape efficiency gamma_ex/gamma"),
}


def _params(v) -> SystemParams:
    return SystemParams(gamma1=v["gamma"], gamma2=v["gamma"],
                        delta1=v["delta1"], delta2=v["delta2"], g=v["g"],
                        f=v["f"], phi=v["phi"], gs1=v["gs"], gs2=v["gs"],
                        kappa=v["kappa"], rho=v["rho"])


def _run_eigen(cfg: RunConfig):
    v = cfg.values
    p = _params(v)
    builders = {"nondegenerate": matrix_nondegenerate,
                "field": matrix_field_basis,
                "quadrature": matrix_quadrature}
    m = builders[v["basis"]](p)
    w = eig_dense(np.asarray(m, dtype=complex)).eigenvalues
    row = ([v["g"], v["f"], v["kappa"], v["gamma"], v["phi"], v["delta1"],
            v["delta2"]]
           + [float(x) for x in w.real] + [float(x) for x in w.imag])
    cols = (["g", "f", "kappa", "gamma", "phi", "delta1", "delta2"]
            + [f"re_lambda_{i}" for i in range(1, 5)]
            + [f"im_lambda_{i}" for i in range(1, 5)])
    path = write_csv(Path(cfg.outdir) / "eigen.csv", cols, [row], "eigen",
                     cfg.provenance())
    for nu in w:
        print(f"lambda = {nu.real:+.12g} {nu.imag:+.12g}i")
    return [path]


def _run_threshold(cfg: RunConfig):
    v = cfg.values
    rep = find_threshold(_params(v), v["sweep"], v["lo"], v["hi"],
                         tol=v["tol"], prescan=int(v["prescan"]))
    rows = [[x, r] for x, r in zip(rep.crossings, rep.rising)]
    path = write_csv(Path(cfg.outdir) / "threshold.csv",
                     [v["sweep"], "rising"], rows, "threshold",
                     cfg.provenance(),
                     trailer=[f"n_crossings={len(rep.crossings)}"])
    if rep.crossings:
        for x, r in zip(rep.crossings, rep.rising):
            print(f"{'rising' if r else 'falling'} crossing at {v['sweep']}={x!r}")
    else:
        print("no threshold crossing in range")
    return [path]


def _run_simulate(cfg: RunConfig):
    v = cfg.values
    p = _params(v)
    if v["seed_amplitude"] > 0.0:
        rng = np.random.default_rng([int(v["seed"])])
        z = rng.standard_normal(4)
        s0 = FieldState(a=v["seed_amplitude"] * complex(z[0], z[1]),
                        b=v["seed_amplitude"] * complex(z[2], z[3]))
    else:
        s0 = FieldState()
    tr = integrate(p, Constant(), s0, (0.0, v["horizon"]), rtol=v["rtol"],
                   atol=v["atol"], n_samples=int(v["samples"]))
    rows = [[float(t), float(a.real), float(a.imag), float(b.real),
             float(b.imag)] for t, a, b in zip(tr.t, tr.a, tr.b)]
    trailer = [f"nsteps={tr.nsteps}", f"nrejected={tr.nrejected}"]
    try:
        lab = classify_regime(tr)
        trailer += [f"regime={lab.regime.value}",
                    f"sideband_offset={lab.sideband_offset!r}"]
        print(f"regime: {lab.regime.value}")
    except ValidationError:
        pass
    path = write_csv(Path(cfg.outdir) / "simulate.csv",
                     ["t", "re_a", "im_a", "re_b", "im_b"], rows, "simulate",
                     cfg.provenance(), seed=int(v["seed"]), trailer=trailer)
    return [path]


def _parse_axis(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise ValidationError(f"axis spec {spec!r} must be var:lo:hi:n")
    return parts[0], float(parts[1]), float(parts[2]), int(parts[3])


def _run_phase_diagram(cfg: RunConfig):
    v = cfg.values
    sim = SimSettings(horizon=v["horizon"], n_samples=int(v["samples"]),
                      seed=int(v["seed"]))
    pd = phase_diagram(_params(v), _parse_axis(v["axis1"]),
                       _parse_axis(v["axis2"]), sim)
    rows = []
    for i, x1 in enumerate(pd.axis1):
        for j, x2 in enumerate(pd.axis2):
            rows.append([float(x1), float(x2), pd.regime[i, j],
                         float(pd.sideband_offset[i, j]),
                         float(pd.intensity[i, j]),
                         float(pd.dc_margin_db[i, j]), bool(pd.failed[i, j])])
    path = write_csv(Path(cfg.outdir) / "phase_diagram.csv",
                     [pd.axis1_name, pd.axis2_name, "regime",
                      "sideband_offset", "intensity", "dc_margin_db",
                      "failed"],
                     rows, "phase-diagram", cfg.provenance(),
                     seed=int(v["seed"]))
    print(f"classified {len(rows)} cells ({int(pd.failed.sum())} failed)")
    return [path]


def _locate_ep(v):
    if int(v["order"]) == 2:
        return find_ep2(v["kappa"], v["gamma"], v["phi"])
    return find_ep4(v["m"], v["kappa"], v["gamma"], v["phi"])


def _run_ep_find(cfg: RunConfig):
    v = cfg.values
    ep = _locate_ep(v)
    row = [ep.order, ep.m, ep.kappa, ep.gamma, ep.phi, ep.g, ep.delta1,
           ep.metrics.spread, ep.metrics.gram_condition, ep.metrics.n]
    path = write_csv(Path(cfg.outdir) / "ep.csv",
                     ["order", "m", "kappa", "gamma", "phi", "g", "delta1",
                      "spread", "gram_condition", "cluster_n"],
                     [row], "ep-find", cfg.provenance())
    print(f"EP{ep.order}: g={ep.g!r} delta1={ep.delta1!r}")
    return [path]


def _run_ep_scaling(cfg: RunConfig):
    v = cfg.values
    ep = _locate_ep(v)
    deltas = np.logspace(math.log10(v["delta_lo"]), math.log10(v["delta_hi"]),
                         int(v["n_deltas"]))
    fit = scaling_exponent(ep, deltas)
    rows = [[float(d), float(s)] for d, s in zip(fit.deltas, fit.splittings)]
    trailer = [f"slope={fit.exponent!r}", f"r_squared={fit.r_squared!r}",
               f"g_ep={ep.g!r}", f"delta1_ep={ep.delta1!r}"]
    path = write_csv(Path(cfg.outdir) / "ep_scaling.csv",
                     ["delta_detuning", "re_splitting"], rows, "ep-scaling",
                     cfg.provenance(), trailer=trailer)
    print(f"fitted exponent {fit.exponent:.4f} (R^2 = {fit.r_squared:.5f})")
    return [path]


def _run_floquet(cfg: RunConfig):
    v = cfg.values
    p = _params(v)
    g0s = np.linspace(v["g0_lo"], v["g0_hi"], int(v["n"]))
    rows = []
    for g0 in g0s:
        res = monodromy(p, AmplitudeModulated(g0=float(g0), F=v["F"],
                                              omega=v["omega"]))
        rows.append([float(g0)]
                    + [float(x) for x in res.exponents.real]
                    + [float(x) for x in res.exponents.imag])
    cols = (["g0"] + [f"re_mu_{i}" for i in range(1, 5)]
            + [f"im_mu_{i}" for i in range(1, 5)])
    fep = find_fep(p, v["F"], v["omega"], v["g0_lo"], v["g0_hi"])
    trailer = [f"fep_g0={fep!r}"]
    path = write_csv(Path(cfg.outdir) / "floquet.csv", cols, rows, "floquet",
                     cfg.provenance(), trailer=trailer)
    print(f"F-EP at g0 = {fep!r}" if fep is not None
          else "no F-EP transition in range")
    return [path]


def _run_encircle(cfg: RunConfig):
    v = cfg.values
    p = _params(v)
    res = encircle(p, v["r"], v["omega"], v["direction"],
                   start_mode=int(v["start_mode"]), g0=v["g0"],
                   start_angle=v["start_angle"], n_windows=int(v["n_windows"]))
    rows = []
    for k, chi in enumerate(res.angles):
        rows.append([float(chi),
                     float(v["g0"] + v["r"] * math.cos(chi)),
                     float(v["r"] * math.sin(chi))]
                    + [float(x) for x in res.projections[k]])
    trailer = [f"start_mode={res.start_mode}", f"final_mode={res.final_mode}",
               f"returns_to_start={res.returns_to_start}"]
    path = write_csv(Path(cfg.outdir) / "encircle.csv",
                     ["loop_angle", "g", "delta1", "p1", "p2", "p3", "p4"],
                     rows, "encircle", cfg.provenance(), trailer=trailer)
    verdict = "returns to" if res.returns_to_start else "leaves"
    print(f"{v['direction']} loop {verdict} the starting mode "
          f"(start={res.start_mode}, final={res.final_mode})")
    return [path]


def _run_squeeze(cfg: RunConfig):
    v = cfg.values
    p = _params(v)
    omegas = np.linspace(v["omega_lo"], v["omega_hi"], int(v["n_omega"]))
    spec = squeezing_spectrum(p, port=int(v["port"]), omegas=omegas)
    rows = [[float(w), float(lo), float(hi), float(th),
             -10.0 * math.log10(max(lo, 1e-300))]
            for w, lo, hi, th in zip(spec.omegas, spec.s_min, spec.s_max,
                                     spec.theta_star)]
    w_best, th_best, s_best = spec.best
    trailer = [f"min_s={s_best!r}", f"at_omega={w_best!r}",
               f"at_theta={th_best!r}"]
    path = write_csv(Path(cfg.outdir) / "squeeze.csv",
                     ["omega", "s_min", "s_max", "theta_star",
                      "squeezing_db"], rows, "squeeze", cfg.provenance(),
                     trailer=trailer)
    print(f"best squeezing S = {s_best:.6f} at omega = {w_best:.4f}")
    return [path]


def _run_mc_squeeze(cfg: RunConfig):
    v = cfg.values
    p = _params(v)
    dt = v["dt"] if v["dt"] > 0.0 else None
    mc = langevin_mc(p, seed=int(v["seed"]), duration=v["duration"], dt=dt,
                     ensemble=int(v["ensemble"]), nperseg=int(v["nperseg"]),
                     omega_max=v["omega_max"])
    quads = [(0, 0.0), (0, math.pi / 2.0), (1, 0.0), (1, math.pi / 2.0)]
    names = ["x1", "y1", "x2", "y2"]
    from .squeezing import output_psd
    refs = {}
    for (port, th), nm in zip(quads, names):
        u = np.zeros(4)
        u[2 * port], u[2 * port + 1] = math.cos(th), math.sin(th)
        refs[nm] = np.array([u @ output_psd(p, w) @ u for w in mc.omegas])
    rows = []
    for i, w in enumerate(mc.omegas):
        row = [float(w)]
        for (port, th), nm in zip(quads, names):
            row.append(float(mc.quadrature(port, th)[i]))
        for nm in names:
            row.append(float(refs[nm][i]))
        rows.append(row)
    trailer = []
    band = mc.omegas > 0.0
    for (port, th), nm in zip(quads, names):
        est = mc.quadrature(port, th)[band]
        ref = refs[nm][band]
        rel = (est - ref) / ref
        trailer.append(f"rms_rel_{nm}={math.sqrt(float(np.mean(rel ** 2)))!r}")
    cols = (["omega"] + [f"psd_{nm}" for nm in names]
            + [f"ref_{nm}" for nm in names])
    path = write_csv(Path(cfg.outdir) / "mc_squeeze.csv", cols, rows,
                     "mc-squeeze", cfg.provenance(), seed=int(v["seed"]),
                     trailer=trailer)
    print("; ".join(trailer))
    return [path]


_COMMON_SIM = {
    "horizon": Opt(float, 200.0, "integration horizon (round trips)"),
    "samples": Opt(int, 2048, "output samples"),
    "rtol": Opt(float, 1e-9, "relative tolerance"),
    "atol": Opt(float, 1e-12, "absolute tolerance"),
    "seed": Opt(int, 12345, "random seed"),
}

COMMANDS = {
    "eigen": ({**_PARAM_OPTS,
               "basis": Opt(str, "nondegenerate", "matrix basis",
                            ("nondegenerate", "field", "quadrature"))},
              _run_eigen, "eigenvalues of the linearized system"),
    "threshold": ({**_PARAM_OPTS,
                   "sweep": Opt(str, "fg", "sweep variable (fg ties f=g)"),
                   "lo": Opt(float, 0.0, "sweep start"),
                   "hi": Opt(float, 2.0, "sweep end"),
                   "tol": Opt(float, 1e-10, "bisection tolerance"),
                   "prescan": Opt(int, 200, "bracketing scan points")},
                  _run_threshold, "oscillation threshold crossings"),
    "simulate": ({**_PARAM_OPTS, **_COMMON_SIM,
                  "seed_amplitude": Opt(float, 0.0,
                                        "initial noise amplitude (0 = zero state)")},
                 _run_simulate, "time-domain integration"),
    "phase-diagram": ({**_PARAM_OPTS,
                       "axis1": Opt(str, "phi:0:6.283185307179586:13",
                                    "axis spec var:lo:hi:n"),
                       "axis2": Opt(str, "fg:0.1:3.0:16",
                                    "axis spec var:lo:hi:n"),
                       "horizon": Opt(float, 3000.0, "per-cell horizon"),
                       "samples": Opt(int, 4096, "per-cell samples"),
                       "seed": Opt(int, 12345, "seed for initial conditions")},
                      _run_phase_diagram, "regime classification grid"),
    "ep-find": ({"order": Opt(int, 2, "EP order", (2, 4)),
                 "m": Opt(float, 2.0, "family ratio f = m g"),
                 "kappa": Opt(float, 1.0, "coupling"),
                 "gamma": Opt(float, 0.25, "loss"),
                 "phi": Opt(float, 0.0, "pump phase")},
                _run_ep_find, "locate an exceptional point"),
    "ep-scaling": ({"order": Opt(int, 2, "EP order", (2, 4)),
                    "m": Opt(float, 2.0, "family ratio f = m g"),
                    "kappa": Opt(float, 1.0, "coupling"),
                    "gamma": Opt(float, 0.25, "loss"),
                    "phi": Opt(float, 0.0, "pump phase"),
                    "delta_lo": Opt(float, 1e-6, "smallest perturbation"),
                    "delta_hi": Opt(float, 1e-3, "largest perturbation"),
                    "n_deltas": Opt(int, 13, "perturbation grid points")},
                   _run_ep_scaling, "perturbation scaling exponent"),
    "floquet": ({**_PARAM_OPTS,
                 "F": Opt(float, 5.0, "modulation depth"),
                 "omega": Opt(float, 10.0, "modulation frequency"),
                 "g0_lo": Opt(float, 0.5, "g0 scan start"),
                 "g0_hi": Opt(float, 2.0, "g0 scan end"),
                 "n": Opt(int, 101, "scan points")},
                _run_floquet, "Floquet exponents and F-EP"),
    "encircle": ({**_PARAM_OPTS,
                  "r": Opt(float, 0.2, "loop radius"),
                  "omega": Opt(float, 2.0 * math.pi / 3000.0, "loop frequency"),
                  "direction": Opt(str, "ccw", "loop direction", ("ccw", "cw")),
                  "start_mode": Opt(int, 0, "starting eigenmode index"),
                  "g0": Opt(float, 1.0, "loop center gain"),
                  "start_angle": Opt(float, 2.0 * math.pi / 3.0,
                                     "loop start angle (rad)"),
                  "n_windows": Opt(int, 512, "renormalization windows")},
                 _run_encircle, "dynamic EP encirclement"),
    "squeeze": ({**_PARAM_OPTS,
                 "port": Opt(int, 0, "output port", (0, 1)),
                 "omega_lo": Opt(float, 0.0, "first sideband frequency"),
                 "omega_hi": Opt(float, 3.0, "last sideband frequency"),
                 "n_omega": Opt(int, 301, "frequency points")},
                _run_squeeze, "analytic squeezing spectrum"),
    "mc-squeeze": ({**_PARAM_OPTS,
                    "seed": Opt(int, 0, "ensemble seed"),
                    "duration": Opt(float, 3000.0, "recorded duration"),
                    "dt": Opt(float, 0.0, "time step (0 = auto)"),
                    "ensemble": Opt(int, 200, "ensemble members"),
                    "nperseg": Opt(int, 65536, "Welch segment length"),
                    "omega_max": Opt(float, 4.0, "spectrum cutoff")},
                   _run_mc_squeeze, "Monte Carlo squeezing cross-check"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraep",
        description="Coupled-OPO non-Hermitian dynamics, exceptional points, "
                    "Floquet control and squeezing spectra.")
    sub = parser.add_subparsers(dest="command")
    for name, (schema, _, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        for opt_name, opt in schema.items():
            flag = "--" + opt_name.replace("_", "-")
            kwargs = {"type": opt.type, "default": None, "help": opt.help}
            if opt.choices:
                kwargs["choices"] = opt.choices
            sp.add_argument(flag, **kwargs)
        sp.add_argument("--config", default=None,
                        help="JSON file with option values")
        sp.add_argument("--outdir", default=".", help="output directory")
        sp.add_argument("--svg", action="store_true",
                        help="also write SVG quick-look plots")
    fig = sub.add_parser("figure", help="run a figure preset")
    fig.add_argument("figure_id", choices=sorted(FIGURES),
                     help="figure identifier")
    fig.add_argument("--outdir", default=".", help="output directory")
    fig.add_argument("--svg", action="store_true",
                     help="also write SVG quick-look plots")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        if args.command == "figure":
            paths = run_figure(args.figure_id, args.outdir, svg=args.svg)
        else:
            schema, runner, _ = COMMANDS[args.command]
            cli_values = {k: getattr(args, k.replace("-", "_"))
                          for k in schema}
            cfg = resolve_config(args.command, schema, cli_values,
                                 config_path=args.config, outdir=args.outdir,
                                 svg=args.svg)
            Path(cfg.outdir).mkdir(parents=True, exist_ok=True)
            paths = runner(cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IntegrationError, SearchError, EigenConvergenceError,
            AboveThresholdError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ParaEPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
