"""Campaign files and their execution.

A campaign is an INI file::

    [campaign]
    name = desk
    mode = global            # global: MBH vs MultiStart; local: RTR vs RCG
    master_seed = 2024
    d = 3
    sizes = 10
    deltas = 2.0, 2.5, 3.0
    fields = h1:1, h2:2      # label:disorder seed
    solvers = mbh, ms        # global mode: mbh, ms; local mode: rtr, rcg
    runs = 200               # local mode only: random starts per solver
    instance_dir = instances # relative to the output directory

    [local]                  # SolverOptions overrides
    [global]                 # GlobalOptions overrides

Every (size, delta, field) combination becomes one instance.  Instance files
are created (or checked, if present) before any solver runs.  Global mode
runs MBH first and gives MultiStart the per-run budgets MBH consumed.  Local
mode starts every solver from the same ``runs`` random points.
"""

import configparser
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .certificates import relative_gap
from .errors import ParameterError
from .global_solvers import GlobalOptions, budget_report, mbh, multistart
from .local_solvers import LOCAL_SOLVERS, SolverOptions, get_local_solver
from .manifold import random_point
from .model import lower_bound
from .reports import ReportRow, count_distinct, flag_winners, write_csv, write_energies, write_json
from .rng import check_seed, stream

logger = logging.getLogger(__name__)

MODES = ("global", "local")
GLOBAL_SOLVERS = ("mbh", "ms")


@dataclass(frozen=True)
class InstanceSpec:
    d: int
    L: int
    delta: float
    label: str
    seed: int

    @property
    def filename(self):
        return f"d{self.d}_L{self.L}_delta{self.delta!r}_{self.label}.rfxy"


@dataclass
class Campaign:
    name: str
    mode: str
    instances: list
    solvers: list
    runs: int = 200
    master_seed: int = 0
    local_opts: SolverOptions = field(default_factory=SolverOptions)
    global_opts: GlobalOptions = field(default_factory=GlobalOptions)
    instance_dir: str = "instances"
    # explicit instance files, used instead of generated ones when given
    instance_paths: dict = field(default_factory=dict)

    def validate(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        allowed = GLOBAL_SOLVERS if self.mode == "global" else tuple(LOCAL_SOLVERS)
        bad = [s for s in self.solvers if s not in allowed]
        if bad or not self.solvers:
            raise ParameterError(f"{self.mode} campaigns take solvers from {allowed}, got {self.solvers}")
        if not self.instances:
            raise ParameterError("campaign has no instances")
        if self.runs < 1:
            raise ParameterError("runs must be at least 1")
        check_seed(self.master_seed)
        self.global_opts.master_seed = self.master_seed
        self.global_opts.local_opts = self.local_opts
        self.global_opts.validate()
        return self


def _split(raw):
    return [s.strip() for s in raw.replace("\n", ",").split(",") if s.strip()]


def parse_campaign(text):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(text)
    if not cp.has_section("campaign"):
        raise ParameterError("campaign file needs a [campaign] section")
    c = cp["campaign"]
    local, glob = io.options_from_parser(cp)
    fields_ = []
    for item in _split(c.get("fields", "h1:1")):
        label, _, seed = item.partition(":")
        fields_.append((label.strip(), int(seed)))
    d = c.getint("d", 3)
    instances = [
        InstanceSpec(d, int(L), float(delta), label, seed)
        for L in _split(c.get("sizes", "10"))
        for delta in _split(c.get("deltas", "2.0"))
        for label, seed in fields_
    ]
    mode = c.get("mode", "global")
    default_solvers = "mbh, ms" if mode == "global" else "rtr, rcg"
    camp = Campaign(
        name=c.get("name", "campaign"),
        mode=mode,
        instances=instances,
        solvers=_split(c.get("solvers", default_solvers)),
        runs=c.getint("runs", 200),
        master_seed=c.getint("master_seed", 0),
        local_opts=local,
        global_opts=glob,
        instance_dir=c.get("instance_dir", "instances"),
    )
    return camp.validate()


def load_campaign(path):
    return parse_campaign(Path(path).read_text())


def preset_path(name):
    """Path of a campaign preset shipped with the package (``desk``, ``desk_local``, ``full``)."""
    path = Path(__file__).parent / "presets" / f"{name}.ini"
    if not path.exists():
        raise ParameterError(f"no preset named {name!r}")
    return path


def prepare_instances(camp, out_dir):
    """Create or verify every instance file; return ``{spec: Instance}``."""
    base = Path(out_dir) / camp.instance_dir
    out = {}
    for spec in camp.instances:
        path = Path(camp.instance_paths.get(spec, base / spec.filename))
        if path.exists():
            inst = io.load_instance(path)
            if (inst.d, inst.L, inst.delta) != (spec.d, spec.L, spec.delta) or (
                spec.seed >= 0 and inst.disorder_seed != spec.seed
            ):
                raise ParameterError(f"{path} does not match campaign entry {spec}")
        else:
            inst = io.gen_instance(spec.d, spec.L, spec.delta, spec.seed, path)
        out[spec] = inst
    return out


def _row(spec, inst, solver, energy, wall, searches, energies, status="ok"):
    n = inst.n_sites
    finite = np.isfinite(energy)
    return ReportRow(
        d=spec.d,
        L=spec.L,
        delta=spec.delta,
        field=spec.label,
        solver=solver,
        best_energy=float(energy),
        energy_per_site=float(energy) / n if finite else float("nan"),
        wall_seconds=float(wall),
        local_searches=int(searches),
        certificate_gap=relative_gap(energy, inst) if finite else float("nan"),
        lower_bound=lower_bound(inst),
        status=status,
        distinct_minima=count_distinct(energies),
        runs=[float(e) for e in energies],
    )


def _failed_row(spec, inst, solver, exc):
    logger.error("%s on %s failed: %s", solver, spec, exc)
    return _row(spec, inst, solver, float("inf"), 0.0, 0, [], status=f"failed: {exc}")


def _global_rows(spec, inst, camp):
    rows, mbh_res = [], None
    opts = camp.global_opts
    if "mbh" in camp.solvers:
        try:
            mbh_res = mbh(inst, opts)
            energies = [e for r in mbh_res.per_run_records for e in r.energies]
            rows.append(
                _row(spec, inst, "mbh", mbh_res.best_energy, mbh_res.total_wall_time,
                     mbh_res.total_local_searches, energies)
            )
        except Exception as exc:  # noqa: BLE001 - recorded per row, campaign continues
            rows.append(_failed_row(spec, inst, "mbh", exc))
    if "ms" in camp.solvers:
        try:
            budget = None
            if mbh_res is not None and opts.budget_mode == "ms_matched":
                budget = budget_report(mbh_res)
            ms_res = multistart(inst, opts, budget=budget)
            energies = [e for r in ms_res.per_run_records for e in r.energies]
            rows.append(
                _row(spec, inst, "ms", ms_res.best_energy, ms_res.total_wall_time,
                     ms_res.total_local_searches, energies)
            )
        except Exception as exc:  # noqa: BLE001
            rows.append(_failed_row(spec, inst, "ms", exc))
    return rows


def _local_rows(spec, inst, camp):
    starts = [random_point(inst.lattice, rng=stream(camp.master_seed, "local", r)) for r in range(camp.runs)]
    rows = []
    for name in camp.solvers:
        try:
            solver = get_local_solver(name)
            energies, walls, n_ok = [], [], 0
            for x0 in starts:
                t0 = time.perf_counter()
                res = solver(x0, inst, camp.local_opts)
                walls.append(time.perf_counter() - t0)
                energies.append(res.energy)
                n_ok += int(res.converged)
            best = min(energies)
            status = "ok" if n_ok == len(starts) else f"ok ({len(starts) - n_ok} not converged)"
            # wall_seconds is the mean time of one run
            rows.append(_row(spec, inst, name, best, float(np.mean(walls)), len(starts), energies, status))
        except Exception as exc:  # noqa: BLE001
            rows.append(_failed_row(spec, inst, name, exc))
    return rows


def run_campaign(camp, out_dir, per_run_energies=True):
    """Run ``camp`` and write ``<name>.csv``, ``<name>.json`` and energy lists into ``out_dir``."""
    camp.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    instances = prepare_instances(camp, out_dir)
    rows = []
    for spec in camp.instances:
        inst = instances[spec]
        logger.info("instance %s", spec)
        if camp.mode == "global":
            rows += _global_rows(spec, inst, camp)
        else:
            rows += _local_rows(spec, inst, camp)
    flag_winners(rows)

    if per_run_energies:
        edir = out_dir / "energies"
        edir.mkdir(exist_ok=True)
        for r in rows:
            stem = f"d{r.d}_L{r.L}_delta{r.delta!r}_{r.field}_{r.solver}"
            write_energies(r.runs, edir / f"{stem}.txt")
    meta = {
        "name": camp.name,
        "mode": camp.mode,
        "master_seed": camp.master_seed,
        "runs": camp.runs if camp.mode == "local" else camp.global_opts.nr,
        "mni": camp.global_opts.mni,
        "eta_max": camp.global_opts.eta_max,
        "local_solver": camp.global_opts.local_solver,
    }
    write_csv(rows, out_dir / f"{camp.name}.csv")
    write_json(rows, out_dir / f"{camp.name}.json", meta)
    return rows
