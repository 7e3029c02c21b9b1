import json
import math

import numpy as np
import pytest

import magnls


def test_soliton_constants():
    c = magnls.solve_q(2.0)
    assert c["pohozaev_residual_grad"] < 1e-8
    assert c["mass_Q"] == pytest.approx(18.897251, rel=1e-6)
    assert c["sigma_c"] == pytest.approx(1.0)
    assert np.all(np.diff(c["q"]) <= 0)


def test_gaussian_functionals_match_closed_forms():
    g = magnls.Grid([32, 32, 32], [8.0, 8.0, 8.0])
    p = magnls.Params(b=0.5, alpha=2.0)
    u = magnls.gaussian(g, amplitude=1.0, widths=[1.2, 1.2, 1.2], chirp=0.2)
    assert u.shape == (32, 32, 32)
    assert u.dtype == np.complex128
    f = magnls.functionals(u, g, p)
    mass = math.pi**1.5 * 1.2**3
    assert f["mass"] == pytest.approx(mass, rel=1e-12)
    assert f["virial_Fprime"] == pytest.approx(-8 * 0.2 * 1.5 * 1.44 * mass, rel=1e-10)
    assert f["virial_Fsecond"] == pytest.approx(8 * f["pohozaev_H"], rel=1e-12)
    assert np.sum(np.abs(u) ** 2) * 0.5**3 == pytest.approx(mass, rel=1e-12)


def test_evolve_conserves_mass():
    g = magnls.Grid([32, 32, 32], [8.0, 8.0, 8.0])
    p = magnls.Params(b=1.0, alpha=2.0)
    u = magnls.gaussian(g, amplitude=0.6, widths=[1.2, 1.2, 1.2])
    out = magnls.evolve(u, g, p, dt=1e-2, t_final=0.2, record_stride=5)
    assert out["status"] == "ReachedTFinal"
    assert len(out["t"]) == 5
    assert np.max(np.abs(out["mass"] - out["mass"][0])) < 1e-12 * out["mass"][0]
    assert out["final_state"].shape == u.shape


def test_classify_and_errors():
    g = magnls.Grid([48, 48, 48], [8.0, 8.0, 8.0])
    p = magnls.Params(b=1.0, alpha=2.0)
    rep = magnls.classify(magnls.gaussian(g, amplitude=0.8, widths=[1.2] * 3), g, p)
    assert rep["verdict"] == "GlobalBelowThreshold"
    with pytest.raises(ValueError):
        magnls.Params(b=0.0)
    with pytest.raises(ValueError):
        magnls.functionals(np.zeros((4, 4, 4), complex), g, p)


def test_verify_is_deterministic():
    a = magnls.verify(3, samples=5)
    b = magnls.verify(3, samples=5)
    assert a == b
    assert a["passed"]


def test_run_refuses(tmp_path):
    cfg = {"command": "ground-state", "problem": "I_c", "alpha": 3.0, "grid": [32, 32, 32], "out": str(tmp_path)}
    with pytest.raises(magnls.PreconditionRefused):
        magnls.run(json.dumps(cfg))
