import json

import numpy as np
import pytest

from rfxy.errors import ParameterError
from rfxy.global_solvers import GlobalOptions
from rfxy.io import dump_options, gen_instance, load_instance, load_options, save_instance, sidecar_path
from rfxy.lattice import build_lattice
from rfxy.local_solvers import SolverOptions
from rfxy.model import generate_disorder


def test_gen_instance_file(tmp_path):
    path = tmp_path / "a.rfxy"
    inst = gen_instance(3, 10, 2.0, 1, path)
    assert inst.n_sites == 1000
    raw = path.read_bytes()
    assert raw.startswith(b"RFXYINST\n")
    header = raw.split(b"\n")[1].decode()
    assert "d=3" in header and "L=10" in header and "delta=2.0" in header and "seed=1" in header
    assert len(raw) == len(b"RFXYINST\n") + len(header) + 1 + 8 * 1000


def test_round_trip_equal_field_by_field(tmp_path):
    inst = generate_disorder(build_lattice(2, 5), 0.1 + 0.2, 77)
    back = load_instance(save_instance(inst, tmp_path / "b.rfxy"))
    assert (back.d, back.L, back.delta, back.disorder_seed) == (2, 5, 0.1 + 0.2, 77)
    assert np.array_equal(back.field_angles, inst.field_angles)
    assert np.array_equal(back.field_vectors, inst.field_vectors)


def test_regeneration_bit_identical(tmp_path):
    gen_instance(2, 4, 1.0, 9, tmp_path / "x.rfxy")
    gen_instance(2, 4, 1.0, 9, tmp_path / "y.rfxy")
    assert (tmp_path / "x.rfxy").read_bytes() == (tmp_path / "y.rfxy").read_bytes()
    gen_instance(2, 4, 1.0, 10, tmp_path / "z.rfxy")
    a, b = load_instance(tmp_path / "x.rfxy"), load_instance(tmp_path / "z.rfxy")
    assert np.any(a.field_angles != b.field_angles)


def test_sidecar_matches_binary(tmp_path):
    path = tmp_path / "c.rfxy"
    inst = gen_instance(1, 6, 3.5, 4, path)
    meta = json.loads(sidecar_path(path).read_text())
    assert meta["version"] == 1 and meta["n_sites"] == 6 and meta["delta"] == 3.5
    assert np.array_equal(np.array(meta["field_angles"]), inst.field_angles)


def test_bad_files(tmp_path):
    bad = tmp_path / "bad.rfxy"
    bad.write_bytes(b"NOPE\n")
    with pytest.raises(ParameterError):
        load_instance(bad)
    path = tmp_path / "t.rfxy"
    gen_instance(1, 4, 1.0, 1, path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ParameterError):
        load_instance(path)


def test_gen_rejects_bad_parameters(tmp_path):
    with pytest.raises(ParameterError):
        gen_instance(3, 1, 2.0, 1, tmp_path / "x.rfxy")
    with pytest.raises(ParameterError):
        gen_instance(3, 4, -2.0, 1, tmp_path / "x.rfxy")


def test_default_config_round_trip(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text(dump_options())
    local, glob = load_options(cfg)
    ref = SolverOptions()
    assert local == ref
    assert (glob.nr, glob.mni, glob.eta_max) == (50, 15, 0.5)
    assert glob.local_opts is local


def test_config_overrides(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[local]\ngrad_tol = 1e-8\ntcg_max_inner = 50\nchecked = yes\n[global]\nnr = 7\neta_convention = variance\n")
    local, glob = load_options(cfg)
    assert local.grad_tol == 1e-8 and local.tcg_max_inner == 50 and local.checked is True
    assert glob.nr == 7 and glob.eta_convention == "variance"
    assert isinstance(GlobalOptions().workers, int)


def test_config_errors(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[local]\nbogus = 1\n")
    with pytest.raises(ParameterError):
        load_options(cfg)
    cfg.write_text("[global]\nnr = 0\n")
    with pytest.raises(ParameterError):
        load_options(cfg)
    with pytest.raises(ParameterError):
        load_options(tmp_path / "missing.ini")
