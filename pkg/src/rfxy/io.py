"""Instance files and solver configuration files.

Instance file layout (all text ASCII, binary little-endian)::

    RFXYINST\\n
    version=1 d=<int> L=<int> delta=<repr float> seed=<int> n=<int>\\n
    <n float64 field angles>

A JSON sidecar ``<path>.json`` carries the same header fields and the angles
as a list, for inspection and for readers in other languages.

Configuration files are INI files with a ``[local]`` section (every
:class:`~rfxy.local_solvers.SolverOptions` field) and a ``[global]`` section
(every :class:`~rfxy.global_solvers.GlobalOptions` field except
``local_opts``).  Missing keys keep their defaults; empty values mean
``None``.
"""

import configparser
import dataclasses
import json
import types
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .global_solvers import GlobalOptions
from .lattice import build_lattice
from .local_solvers import SolverOptions
from .model import Instance, generate_disorder

MAGIC = b"RFXYINST\n"
FORMAT_VERSION = 1


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def save_instance(inst, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    seed = -1 if inst.disorder_seed is None else inst.disorder_seed
    header = (
        f"version={FORMAT_VERSION} d={inst.d} L={inst.L} delta={inst.delta!r} "
        f"seed={seed} n={inst.n_sites}\n"
    )
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(header.encode("ascii"))
        fh.write(np.asarray(inst.field_angles, dtype="<f8").tobytes())
    meta = {
        "format": "rfxy-instance",
        "version": FORMAT_VERSION,
        "d": inst.d,
        "L": inst.L,
        "delta": inst.delta,
        "disorder_seed": inst.disorder_seed,
        "n_sites": inst.n_sites,
        "site_order": "axis 0 fastest: index = sum_k c_k * L**k",
        "field_angles": [float(a) for a in inst.field_angles],
    }
    with open(sidecar_path(path), "w") as fh:
        json.dump(meta, fh, indent=1)
    return path


def load_instance(path):
    with open(path, "rb") as fh:
        if fh.readline() != MAGIC:
            raise ParameterError(f"{path}: not an rfxy instance file")
        fields = dict(item.split("=", 1) for item in fh.readline().decode("ascii").split())
        if int(fields["version"]) != FORMAT_VERSION:
            raise ParameterError(f"{path}: unsupported format version {fields['version']}")
        n = int(fields["n"])
        angles = np.frombuffer(fh.read(), dtype="<f8")
    if angles.size != n:
        raise ParameterError(f"{path}: expected {n} angles, found {angles.size}")
    lat = build_lattice(int(fields["d"]), int(fields["L"]))
    seed = int(fields["seed"])
    return Instance(
        lattice=lat,
        delta=float(fields["delta"]),
        field_angles=angles.astype(np.float64),
        disorder_seed=None if seed < 0 else seed,
    )


def gen_instance(d, L, delta, seed, path):
    """Generate the disorder for ``(d, L, delta, seed)`` and write it to ``path``."""
    inst = generate_disorder(build_lattice(d, L), delta, seed)
    save_instance(inst, path)
    return inst


# -- configuration ----------------------------------------------------------


def _field_type(f):
    t = f.type
    if isinstance(t, types.UnionType):
        t = next(a for a in t.__args__ if a is not type(None))
    return t


def _convert(f, raw):
    raw = raw.strip()
    if raw == "" or raw.lower() == "none":
        return None
    t = _field_type(f)
    if t is bool:
        return raw.lower() in ("1", "true", "yes", "on")
    if t is int:
        return int(float(raw)) if "e" in raw.lower() else int(raw)
    return t(raw)


def _apply(obj, section):
    names = {f.name: f for f in dataclasses.fields(obj)}
    for key, raw in section.items():
        if key not in names or key == "local_opts":
            raise ParameterError(f"unknown option {key!r} in section [{section.name}]")
        setattr(obj, key, _convert(names[key], raw))
    return obj


def options_from_parser(cp):
    local = SolverOptions()
    glob = GlobalOptions()
    if cp.has_section("local"):
        _apply(local, cp["local"])
    if cp.has_section("global"):
        _apply(glob, cp["global"])
    glob.local_opts = local
    glob.validate()
    return local, glob


def load_options(path=None):
    """Read ``(SolverOptions, GlobalOptions)`` from an INI file (defaults if ``None``)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is not None:
        if not cp.read(path):
            raise ParameterError(f"cannot read config file {path}")
    return options_from_parser(cp)


def dump_options(local=None, glob=None):
    """INI text covering every option, with current values."""
    local = local or SolverOptions()
    glob = glob or GlobalOptions()
    lines = ["[local]"]
    for f in dataclasses.fields(local):
        v = getattr(local, f.name)
        lines.append(f"{f.name} = {'' if v is None else v}")
    lines += ["", "[global]"]
    for f in dataclasses.fields(glob):
        if f.name == "local_opts":
            continue
        lines.append(f"{f.name} = {getattr(glob, f.name)}")
    return "\n".join(lines) + "\n"
