"""Command line interface: ``rfxy <command> ...``."""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bench import bench_kernels, format_table, speedups
from .campaign import Campaign, InstanceSpec, load_campaign, preset_path, run_campaign
from .certificates import certify, relative_gap
from .errors import ParameterError
from .global_solvers import THREADS_ENV, compare, mbh, multistart
from .lattice import build_lattice
from .local_solvers import LOCAL_SOLVERS, get_local_solver
from .manifold import random_point
from .model import check_config, generate_disorder, lower_bound, to_angles
from .oracle import DEFAULT_CAP, GridSpec, brute_force_grid, refine_from_grid

PUBLIC_COMMANDS = "gen,solve,campaign,bench,compare-local,config"


def _options(args):
    local, glob = io.load_options(args.config)
    if args.checked:
        local.checked = True
    if getattr(args, "seed", None) is not None:
        glob.master_seed = args.seed
    return local, glob


def _emit(payload, out):
    text = json.dumps(payload, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen(args):
    inst = io.gen_instance(args.d, args.L, args.delta, args.seed, args.out)
    print(f"wrote {args.out} ({inst.n_sites} field angles)")


def _global_payload(res, inst):
    return {
        "method": res.method,
        "best_energy": res.best_energy,
        "energy_per_site": res.best_energy / inst.n_sites,
        "local_searches": res.total_local_searches,
        "wall_seconds": res.total_wall_time,
        "certificate": res.certificate,
        "runs": [r.as_dict() for r in res.per_run_records],
    }


def cmd_solve(args):
    inst = io.load_instance(args.instance)
    local, glob = _options(args)
    if args.solver in LOCAL_SOLVERS:
        x0 = random_point(inst.lattice, seed=glob.master_seed)
        res = get_local_solver(args.solver)(x0, inst, local)
        payload = {
            "solver": res.solver,
            "energy": res.energy,
            "energy_per_site": res.energy / inst.n_sites,
            "grad_norm": res.grad_norm,
            "iterations": res.iterations,
            "status": res.status,
            "cost_evals": res.cost_evals,
            "grad_evals": res.grad_evals,
            "hess_evals": res.hess_evals,
            "wall_seconds": res.wall_time,
            "relative_gap": relative_gap(res.energy, inst),
            "lower_bound": lower_bound(inst),
            "certificate": certify(inst, glob.epsilon, best_energy=res.energy).as_dict(),
        }
        config = res.config
    elif args.solver == "compare":
        m, s = compare(inst, glob)
        payload = {"mbh": _global_payload(m, inst), "ms": _global_payload(s, inst)}
        config = m.best_config if m.best_energy <= s.best_energy else s.best_config
    else:
        res = mbh(inst, glob) if args.solver == "mbh" else multistart(inst, glob)
        payload = _global_payload(res, inst)
        config = res.best_config
    if args.save_angles and config is not None:
        check_config(config, inst)
        np.savetxt(args.save_angles, to_angles(config), fmt="%.17g")
    _emit(payload, args.out)


def _campaign_arg(value):
    path = Path(value)
    return path if path.exists() else preset_path(value)


def cmd_campaign(args):
    camp = load_campaign(_campaign_arg(args.campaign))
    if args.checked:
        camp.local_opts.checked = True
    if args.seed is not None:
        camp.master_seed = args.seed
    rows = run_campaign(camp, args.out, per_run_energies=not args.no_energies)
    _print_rows(rows)


def _print_rows(rows):
    print(f"{'L':>3} {'delta':>6} {'field':>5} {'solver':>6} {'best':>14} {'per site':>10} "
          f"{'seconds':>9} {'searches':>8} {'gap':>8} {'win':>3} status")
    for r in rows:
        print(f"{r.L:>3} {r.delta:>6g} {r.field:>5} {r.solver:>6} {r.best_energy:>14.6f} "
              f"{r.energy_per_site:>10.5f} {r.wall_seconds:>9.3f} {r.local_searches:>8} "
              f"{r.certificate_gap:>8.4f} {'*' if r.winner else '':>3} {r.status}")


def cmd_compare_local(args):
    local, _ = _options(args)
    specs, paths = [], {}
    for p in args.instances:
        inst = io.load_instance(p)
        seed = -1 if inst.disorder_seed is None else inst.disorder_seed
        spec = InstanceSpec(inst.d, inst.L, inst.delta, Path(p).stem, seed)
        specs.append(spec)
        paths[spec] = Path(p).resolve()
    camp = Campaign(
        name=args.name,
        mode="local",
        instances=specs,
        solvers=args.solvers.split(","),
        runs=args.runs,
        master_seed=args.seed or 0,
        local_opts=local,
        instance_paths=paths,
    )
    _print_rows(run_campaign(camp, args.out))


def cmd_bench(args):
    if args.instance:
        inst = io.load_instance(args.instance)
    else:
        inst = generate_disorder(build_lattice(args.d, args.L), args.delta, args.seed)
    t = bench_kernels(inst, args.repetitions, seed=args.seed)
    print(f"d={inst.d} L={inst.L} n={inst.n_sites} repetitions={args.repetitions}")
    print(format_table(t))
    for k, v in speedups(t).items():
        print(f"speed-up {k}: {v:.2f}x")
    if args.out:
        _emit({"timings": t, "speedups": speedups(t)}, args.out)


def cmd_config(args):
    local, glob = io.load_options(args.config)
    sys.stdout.write(io.dump_options(local, glob))


def cmd_oracle(args):
    inst = io.load_instance(args.instance)
    local, _ = _options(args)
    grid = brute_force_grid(inst, GridSpec(args.k, args.cap))
    ref = refine_from_grid(inst, grid.theta, local)
    _emit(
        {
            "k": args.k,
            "grid_size": grid.size,
            "grid_energy": grid.energy,
            "grid_index": grid.index,
            "refined_energy": min(ref.energy, grid.energy),
            "refined_status": ref.status,
        },
        args.out,
    )


def build_parser():
    p = argparse.ArgumentParser(
        prog="rfxy",
        description="Ground states of the random-field XY model by Riemannian optimization.",
        epilog=f"Set {THREADS_ENV} to run global-solver runs in that many processes.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="{" + PUBLIC_COMMANDS + "}")

    def common(sp, seed=True):
        sp.add_argument("--config", help="INI file with [local] / [global] option overrides")
        sp.add_argument("--checked", action="store_true", help="validate every input configuration")
        if seed:
            sp.add_argument("--seed", type=int, default=None, help="master seed")

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--L", type=int, required=True)
    g.add_argument("--delta", type=float, required=True)
    g.add_argument("--seed", type=int, required=True, help="disorder seed")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one solver on one instance")
    s.add_argument("instance")
    s.add_argument("--solver", choices=[*LOCAL_SOLVERS, "mbh", "ms", "compare"], default="rtr")
    s.add_argument("--out", help="JSON output file (stdout if omitted)")
    s.add_argument("--save-angles", help="write the best configuration's angles as text")
    common(s)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("campaign", help="run a campaign file or a preset (desk, desk_local, full, full_local)")
    c.add_argument("campaign")
    c.add_argument("--out", required=True, help="output directory")
    c.add_argument("--no-energies", action="store_true", help="skip per-run energy lists")
    c.add_argument("--checked", action="store_true")
    c.add_argument("--seed", type=int, default=None, help="override the campaign master seed")
    c.set_defaults(func=cmd_campaign)

    b = sub.add_parser("bench", help="time cost, gradient and Hessian kernels")
    b.add_argument("--instance")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--L", type=int, default=32)
    b.add_argument("--delta", type=float, default=2.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repetitions", type=int, default=100)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    cl = sub.add_parser("compare-local", help="RTR against RCG from shared random starts")
    cl.add_argument("instances", nargs="+")
    cl.add_argument("--runs", type=int, default=200)
    cl.add_argument("--solvers", default="rtr,rcg")
    cl.add_argument("--name", default="compare_local")
    cl.add_argument("--out", required=True, help="output directory")
    common(cl)
    cl.set_defaults(func=cmd_compare_local)

    cf = sub.add_parser("config", help="print every solver option with its value")
    cf.add_argument("--config")
    cf.set_defaults(func=cmd_config)

    o = sub.add_parser("oracle")  # hidden: grid targets for tiny instances
    o.add_argument("instance")
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--cap", type=int, default=DEFAULT_CAP)
    o.add_argument("--out")
    common(o, seed=False)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(message)s",
    )
    try:
        args.func(args)
    except (ParameterError, OSError) as exc:
        print(f"rfxy: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
