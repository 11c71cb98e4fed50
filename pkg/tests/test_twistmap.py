import math

import numpy as np
import pytest

from fkstates import model, twistmap
from fkstates.action import hessian
from fkstates.configspace import config
from fkstates.stationary import ExtremalClass as E
from fkstates.twistmap import (Orbit, SymmetryLine, apply, find_symmetric_orbit,
                               is_pq_periodic, orbit_from_config, residue, rimmer_scan,
                               shares_minimizer_line)

from conftest import PRESETS


def test_apply_examples():
    np.testing.assert_allclose(apply(model.standard(0), 0.2, 0.3), (0.5, 0.3))
    for eps in (0.5, 1, 12):
        np.testing.assert_allclose(apply(model.standard(eps), 0.0, 0.5), (0.5, 0.5), atol=1e-15)
    np.testing.assert_allclose(apply(model.example4(), 0.5, 0.5), (1.0, 0.5), atol=1e-15)


def test_implicit_relation():
    m = model.threeharmonic(1.2)
    x, y = 0.31, -0.2
    xp, yp = apply(m, x, y)
    assert -m.h(x, xp, "1") == pytest.approx(y, abs=1e-15)
    assert m.h(x, xp, "2") == pytest.approx(yp, abs=1e-15)


def test_area_preservation():
    rng = np.random.default_rng(11)
    for name in PRESETS:
        m = model.preset(name)
        for x in rng.uniform(-1, 1, 100):
            assert np.linalg.det(twistmap.jacobian(m, x)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m", [model.example4(), model.standard(1), model.standard(0)])
def test_orbit_from_config(m):
    orbit = orbit_from_config(m, config(1, [0, 0.5]))
    np.testing.assert_allclose(orbit.points, [[0, 0.5], [0.5, 0.5]], atol=1e-15)
    np.testing.assert_allclose(twistmap.iterate(m, 0.0, 0.5, 2), (1.0, 0.5), atol=1e-15)


def test_orbit_rejects_nonstationary():
    with pytest.raises(twistmap.NotStationary):
        orbit_from_config(model.standard(1), config(1, [0, 0.45]))


def test_periodicity_examples():
    assert is_pq_periodic(model.example4(), 0, 0.5, 1, 2, tol=1e-12)
    assert is_pq_periodic(model.standard(0), 0, 0.5, 1, 2)
    assert not is_pq_periodic(model.standard(1), 0, 0.49, 1, 2, tol=1e-10)


def test_residue_examples():
    for q in (1, 2, 3):
        pts = np.column_stack([np.arange(q) / q, np.full(q, 1 / q)])
        assert residue(model.standard(0), Orbit(1, q, pts)) == 0.0
    for eps in (0.5, 1, 2, 12):
        m = model.standard(eps)
        orbit = orbit_from_config(m, config(1, [0, 0.5]))
        assert residue(m, orbit) == pytest.approx(eps**2 / 4, abs=1e-9)
    m = model.example4()
    c = config(1, [0, 0.5])
    R = residue(m, orbit_from_config(m, c))
    assert R == pytest.approx(-np.linalg.det(hessian(m, c)) / 4, abs=1e-12)
    assert R == pytest.approx(-1.4641, abs=1e-4)


@pytest.mark.parametrize("name", PRESETS)
def test_stationary_orbit_identities(analyzed, name):
    m = model.preset(name)
    recs, ctx, _ = analyzed(name)
    for r in recs:
        orbit = orbit_from_config(m, r.config)
        assert is_pq_periodic(m, *orbit.points[0], 1, 2, tol=1e-10)
        assert orbit.closure_error(m) < 1e-10
        R = residue(m, orbit)
        assert R == pytest.approx(-np.linalg.det(hessian(m, r.config)) / 4, abs=1e-9)
        # residue sign tracks index parity only, so it cannot tell index 0 from 2
        assert (R > 0) == (r.index == 1)


def test_symmetric_orbit_examples():
    orbits = find_symmetric_orbit(model.standard(1), 1, 2, "G0", y_range=(0.1, 0.9))
    assert [o.points[0].tolist() for o in orbits] == [[0.0, 0.5]]
    orbits = find_symmetric_orbit(model.example4(), 1, 2, SymmetryLine.G0, y_range=(0.1, 0.9))
    assert any(np.allclose(o.points[0], [0, 0.5], atol=1e-12) for o in orbits)
    orbits = find_symmetric_orbit(model.standard(0), 1, 2, "G0")
    assert len(orbits) == 1 and orbits[0].points[0, 1] == pytest.approx(0.5, abs=1e-12)


def test_symmetric_orbits_are_palindromic():
    for name in PRESETS:
        m = model.preset(name)
        for line in (SymmetryLine.G0, SymmetryLine.G0P):
            for orbit in find_symmetric_orbit(m, 1, 2, line):
                c = twistmap.config_from_orbit(orbit)
                x0 = c.coords[0]
                for k in range(-3, 4):
                    d = (c[-k] - x0) + (c[k] - x0)
                    assert abs(d - round(d)) < 1e-9


def test_other_symmetry_lines_find_second_minimax():
    m = model.threeharmonic(1.2)
    orbits = find_symmetric_orbit(m, 1, 2, SymmetryLine.G1, y_range=(0, 1))
    xs = [sorted(np.mod(o.x, 1)) for o in orbits]
    assert any(np.allclose(x, [0.297676994, 0.702323006], atol=1e-8) for x in xs)
    for o in orbits:
        assert SymmetryLine.G1.contains(*o.points[0])


def test_symmetry_line_membership():
    assert SymmetryLine.G0.contains(1.0, 3.3)
    assert SymmetryLine.G0P.contains(0.5, -1)
    assert SymmetryLine.G1.contains(0.25, 0.5)
    assert SymmetryLine.G1P.contains(0.25, 1.5)
    assert not SymmetryLine.G1.contains(0.3, 0.5)


def test_shares_minimizer_line(analyzed):
    recs, ctx, _ = analyzed("example4")
    mins = [r for r in recs if r.extremal_class is E.GLOBAL_MIN]
    assert shares_minimizer_line(mins[0], ctx)
    z = [r for r in recs if np.allclose(r.config.coords, [0, 0.5], atol=1e-9)][0]
    assert not shares_minimizer_line(z, ctx)
    for name in ("standard:12", "threeharmonic:1.2", "standard:1"):
        recs, ctx, _ = analyzed(name)
        for r in recs:
            if r.extremal_class is not E.GLOBAL_MIN and shares_minimizer_line(r, ctx):
                assert not r.cyclically_ordered


def test_orbit_csv(tmp_path):
    m = model.example4()
    orbit = orbit_from_config(m, config(1, [0, 0.5]))
    orbit.to_csv(tmp_path / "o.csv")
    lines = (tmp_path / "o.csv").read_text().splitlines()
    assert lines[0] == "k,x,y"
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    np.testing.assert_allclose(rows, [[0, 0, 0.5], [1, 0.5, 0.5]], atol=1e-15)


def test_scan_standard_family_has_no_asymmetric_states():
    result = rimmer_scan(model.standard, 1, 2, np.arange(0.25, 2.01, 0.25))
    assert not result.failures
    assert result.thresholds == []
    assert all(r.symmetric for r in result.records)


def test_scan_threeharmonic_coarse(tmp_path):
    result = rimmer_scan(model.threeharmonic, 1, 2, [0.5, 0.8, 1.0, 1.2])
    [event] = result.thresholds
    assert event.kind == "asymmetric_birth"
    assert (event.eps_below, event.eps_above) == (0.8, 1.0)
    at = [r for r in result.records if r.eps == 1.2]
    asym = [r for r in at if not r.symmetric]
    assert len(asym) == 2 and all(r.index == 0 for r in asym)
    assert sorted(r.index for r in at if r.symmetric) == [1, 1]
    # the symmetric orbit through x = 0 changes from minimizing to minimax
    g0 = {r.eps: r.index for r in result.records if r.family == "G0#1"}
    assert g0[0.5] == 0 and g0[1.2] == 1
    result.to_csv(tmp_path / "s.csv", ["command=scan"])
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[1] == "eps,family,y0,x0,residue,index,symmetric"


def test_scan_requires_ascending_grid():
    with pytest.raises(ValueError):
        rimmer_scan(model.standard, 1, 2, [1.0, 0.5])
