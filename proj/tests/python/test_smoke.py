import math

import pytest

import locker


def test_simulate_and_fit():
    ds = locker.simulate(family="gaussian", n=40, seed=3)
    assert len(ds) == 40
    fit = locker.fit(ds, L=8, rho=[1e-4, 1e-2], lam=[0.0, 0.01])
    assert len(fit.gamma) == 16
    assert fit.converged
    assert len(fit.grid()) == 4
    b0, b1 = fit.beta(0.5)
    assert math.isfinite(b0) and math.isfinite(b1)


def test_dataset_roundtrip():
    ds = locker.Dataset([("a", [0.1, 0.5], [1.0, 2.0], [0.2], [3.0])], locker.Domain(0.0, 1.0))
    assert len(ds) == 1
    sid, rt, rv, ct, cv = ds.subjects()[0]
    assert sid == "a" and rt == [0.1, 0.5] and cv == [3.0]
    assert ds.response_csv().startswith("subject_id,time,value")


def test_scad():
    assert locker.scad(0.5, 0.0) == 0.0
    assert locker.scad(0.5, 0.3) == pytest.approx(0.15)
    assert locker.scad(0.5, 10.0) == pytest.approx(0.5875)
    assert locker.scad_deriv(0.5, 0.0) == 0.5


def test_basis():
    b = locker.SplineBasis(3, 9)
    assert b.size == 13
    assert sum(b.evaluate(0.37)) == pytest.approx(1.0)
    assert b.roughness_matrix().shape == (13, 13)


def test_truth_and_benchmark():
    assert locker.true_beta(True, 0.1)[1] == 0.0
    res = locker.benchmark(n=40, replicates=1, L=8)
    assert res["failures"] == 0
    assert res["tp"] is None


def test_bad_family():
    ds = locker.simulate(n=10)
    with pytest.raises(ValueError):
        locker.fit(ds, family="gamma")
