"""Command line front end.

Subcommands:

``recover``  one scene JSON file -> component estimates on stdout
``bench``    experiment JSON file -> per-trial and summary CSV files
``crb``      scene JSON file -> oracle error-bound table on stdout
``preset``   run a canned benchmark by name (fig1, fig2, fig3, fig4_7,
             fig8, fig9, fig10) and write its CSV outputs

Identical inputs (including --seed) produce byte-identical CSV outputs.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    crb,
    default_solvers,
    load_config,
    load_scene,
    parse_stop,
    preset_names,
    realize,
    run_experiment,
    run_preset,
)
from .bench.runner import _run_solver  # shared by `recover`
from .dictionary import wrap_unit
from .solvers import StopRule


def _add_seed(p, default=None):
    p.add_argument("--seed", type=int, default=default, help="master RNG seed")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ampctls",
                                description="sparse recovery with adaptive grid refinement")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("recover", help="estimate components for one scene file")
    pr.add_argument("scene", help="scene JSON file")
    _add_seed(pr, default=0)
    pr.add_argument("--stop", type=str, default=None,
                    help="stop rule: k=<int>, res=<float>, rel=<float> "
                         "(default: k=<number of scene components>)")

    pb = sub.add_parser("bench", help="run an experiment config")
    pb.add_argument("config", help="experiment JSON file")
    pb.add_argument("--out", default="results", help="output directory")
    pb.add_argument("--trials", type=int, default=None, help="override trial count")
    _add_seed(pb)

    pc = sub.add_parser("crb", help="print oracle error bounds for a scene")
    pc.add_argument("scene", help="scene JSON file")

    pp = sub.add_parser("preset", help="run a canned benchmark")
    pp.add_argument("name", choices=list(preset_names())
                    + ["fig4-7", "fig4", "fig5", "fig6", "fig7"])
    pp.add_argument("--trials", type=int, default=None)
    _add_seed(pp)
    pp.add_argument("--out", default="results", help="output directory")
    pp.add_argument("--ije-max-iters", type=int, default=None,
                    help="refinement loop cap override")
    pp.add_argument("--sigma-delta", type=float, default=None,
                    help="mismatch prior scale override")
    pp.add_argument("--stop", type=str, default=None, help="stop rule override")
    pp.add_argument("--solvers", nargs="+", default=None,
                    help="subset of preset solver names to run")
    return p


def _cmd_recover(args) -> int:
    scene = load_scene(args.scene)
    dictionary, y, _ = realize(scene, args.seed)
    stop = parse_stop(args.stop) if args.stop else StopRule.sparsity(len(scene.components))
    names = scene.param_names
    for spec in default_solvers(scene):
        state = _run_solver(spec, stop, dictionary, y)
        print(f"solver: {spec.name}  iterations: {state.iterations}  "
              f"residual_norm: {np.linalg.norm(state.residual):.6g}"
              + (f"  aborted: {state.aborted}" if state.aborted else ""))
        est = wrap_unit(state.grid_estimates)
        order = np.argsort(-np.abs(state.x_estimates), kind="stable")
        for rank, i in enumerate(order, start=1):
            coords = "  ".join(f"{names[c]}={est[i, c]:.9f}" for c in range(scene.arity))
            a = state.x_estimates[i]
            print(f"  [{rank}] {coords}  amp={a.real:+.6g}{a.imag:+.6g}j  |amp|={abs(a):.6g}")
    return 0


def _cmd_bench(args) -> int:
    cfg = load_config(args.config)
    if args.trials is not None:
        cfg.trials = args.trials
    if args.seed is not None:
        cfg.seed = args.seed
    result = run_experiment(cfg, out_dir=args.out)
    print(f"wrote {args.out}/{cfg.name}_trials.csv and {args.out}/{cfg.name}_summary.csv")
    _print_summary(result.summary)
    return 0


def _print_summary(rows) -> None:
    print(f"{'sweep':>10}  {'solver':<12} {'metric':<14} {'value':>14} {'mse_db':>10} {'crb_db':>10}")
    for r in rows:
        mse = f"{r['mse_db']:.2f}" if isinstance(r["mse_db"], float) else ""
        bound = f"{r['crb_db']:.2f}" if isinstance(r["crb_db"], float) else ""
        print(f"{r['sweep_value']:>10g}  {r['solver']:<12} {r['metric']:<14} "
              f"{r['value']:>14.6g} {mse:>10} {bound:>10}")


def _cmd_crb(args) -> int:
    scene = load_scene(args.scene)
    table = crb(scene)
    for i in range(table.params.shape[0]):
        cells = "  ".join(
            f"{table.param_names[c]}: var={table.params[i, c]:.6g} "
            f"({10 * np.log10(table.params[i, c]):.2f} dB)"
            for c in range(table.params.shape[1]))
        print(f"component {i + 1}  {cells}  amp_re={table.amp_re[i]:.6g} "
              f"amp_im={table.amp_im[i]:.6g}")
    return 0


def _cmd_preset(args) -> int:
    stop = parse_stop(args.stop) if args.stop else None
    result = run_preset(args.name, trials=args.trials, seed=args.seed,
                        out_dir=args.out, ije_max_iters=args.ije_max_iters,
                        sigma_delta=args.sigma_delta, stop=stop,
                        solvers=args.solvers)
    if isinstance(result, list):  # fig2 trace
        print(f"wrote {args.out}/fig2_trace.csv")
        print(f"{'loop':>4} {'residual_norm':>16} {'residual_ratio':>16} "
              f"{'grid_error':>14} {'grid_error_ratio':>17}")
        for row in result:
            print(f"{row['loop']:>4} {row['residual_norm']:>16.6e} "
                  f"{row['residual_ratio']:>16.6e} {row['grid_error']:>14.6e} "
                  f"{row['grid_error_ratio']:>17.6e}")
        return 0
    name = result.config.name
    print(f"wrote {args.out}/{name}_trials.csv and {args.out}/{name}_summary.csv")
    _print_summary(result.summary)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"recover": _cmd_recover, "bench": _cmd_bench,
                "crb": _cmd_crb, "preset": _cmd_preset}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
