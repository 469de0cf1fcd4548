import json
import math

import numpy as np
import pytest

import dlab


def test_pressure_identity():
    eos = dlab.EosParams(2.0, 1.6)
    for rho in (1e-3, 0.5, 1.0, 7.0):
        p = 2.0 * rho**1.6
        assert dlab.pressure(rho, eos) == pytest.approx(p, rel=1e-14)
        assert dlab.pressure_potential(rho, eos) == pytest.approx(p / 0.6, rel=1e-14)
    with pytest.raises(dlab.DomainError):
        dlab.EosParams(1.0, 1.0)


def test_field_arrays_round_trip():
    g = dlab.TorusGrid(2, 8)
    f = dlab.ConservedField(g)
    rho = np.linspace(0.5, 1.5, g.cell_count)
    f.rho = rho
    mom = np.column_stack([rho, -rho])
    f.mom = mom
    np.testing.assert_array_equal(f.rho, rho)
    np.testing.assert_array_equal(f.mom, mom)
    with pytest.raises(dlab.IncompatibleError):
        f.rho = np.ones(3)


def test_viscous_run_energy_inequality():
    g = dlab.TorusGrid(1, 128)
    res = dlab.run(dlab.random_smooth(g, 3, 0.3), dlab.EosParams(), dlab.ViscosityModel(1e-2),
                   dlab.SolverConfig(end_time=0.1, output_stride=0.025))
    e0 = res.ledger.energy[0]
    assert res.ledger.min_slack() >= -1e-6 * e0
    assert res.ledger.dissipation_monotone()
    assert len(res.trajectory) == 5
    assert res.trajectory.times[-1] == pytest.approx(0.1)


def test_defects_and_record_audit(tmp_path):
    g = dlab.TorusGrid(1, 128)
    res = dlab.run(dlab.riemann_1d(g), dlab.EosParams(), dlab.ViscosityModel(1e-2),
                   dlab.SolverConfig(end_time=0.05, output_stride=0.025))
    rec = dlab.make_record(res, block=8)
    assert dlab.audit_record(rec).ok
    assert rec.defects[-1].min_rv_eigenvalue() >= -1e-12
    assert rec.defects[-1].rv.shape == (16, 3)
    book = dlab.energy_bookkeeping(res.trajectory[2], dlab.BlockPartition(g, 8))
    assert book.max_relative <= 1e-11
    dlab.write_record(tmp_path / "rec", rec)
    back = dlab.read_record(tmp_path / "rec")
    np.testing.assert_array_equal(back.trajectory[1].rho, rec.trajectory[1].rho)
    with pytest.raises(dlab.IoError):
        dlab.read_record(tmp_path / "missing")


def test_oscillation_and_patchwork():
    seq = dlab.checkerboard_sequence(1.0, 0.5, 7, dlab.TorusGrid(1, 512))
    ws = dlab.weakstar_polynomial(seq, 3)
    assert ws.passed and ws.worst_ratio <= 0.6
    sep = dlab.l1_separation(seq)
    assert sep.distances == [1.0] * 8 and sep.separated
    assert dlab.kinetic_constraint_momentum(1.0, 2.0, dlab.EosParams(), 2) == pytest.approx(math.sqrt(2.0))
    t = dlab.tracefree_flux(2.0, [1.0, 3.0], 2)
    assert t[0] + t[2] == 0.0
    with pytest.raises(dlab.InfeasibleConstraintError):
        dlab.kinetic_constraint_momentum(1.0, 0.1, dlab.EosParams(), 2)


def test_selection_and_convexity():
    g = dlab.TorusGrid(1, 64)
    cfg = dlab.SolverConfig(end_time=0.05, output_stride=0.025)
    recs = [dlab.make_record(dlab.run(dlab.riemann_1d(g), dlab.EosParams(), dlab.ViscosityModel(e), cfg), block=4)
            for e in (4e-2, 1e-2)]
    assert dlab.precedes(recs[0], recs[0]) == "precedes"
    sel = dlab.select_admissible(recs)
    assert sel["winner"] == int(np.argmin(sel["functionals"]))
    assert sel["minimal"]
    mix = dlab.convex_combine(recs[0], recs[1], 0.3)
    assert dlab.audit_record(mix).ok


def test_cli_from_python(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[grid]\ncells = 64\n[initial]\nkind = constant\nmx = 0.2\n[solver]\nend_time = 0.02\n")
    status, log = dlab.cli_run("verify", str(cfg), str(tmp_path / "out"))
    assert status == 0, log
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["verdicts"]["energy_inequality"] == "PASS"
    cfg.write_text("[grid]\ncells = 64\n[solver\n")
    status, log = dlab.cli_run("verify", str(cfg), str(tmp_path / "bad"))
    assert status == 1 and "line 3" in log


def test_imports_the_expected_build():
    import os

    expected = os.environ.get("DLAB_EXPECT_MODULE_DIR")
    if expected:
        assert os.path.realpath(dlab.__file__).startswith(os.path.realpath(expected))
