"""End-to-end smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import spsim


@pytest.fixture(scope="module")
def grid_1d():
    return spsim.make_grid(1, 16.0, 512)


@pytest.fixture(scope="module")
def grid_2d():
    return spsim.make_grid(2, 8.0, 64)


def test_grid_properties(grid_2d):
    g = grid_2d
    assert g.dimension == 2
    assert g.half_width == 8.0
    assert g.points_per_axis == 64
    assert g.spacing == 0.25

    x = g.coordinates
    assert x.shape == (64,)
    assert x[0] == -8.0
    # Uniform spacing on every consecutive pair (guards the array export).
    assert np.all(np.diff(x) == 0.25)

    w = g.wavenumbers
    assert w.shape == (64,)
    assert w[0] == 0.0
    assert w[1] == pytest.approx(math.pi / 8.0, abs=1e-15)
    assert np.all(w[1:32] > 0)
    for j in range(1, 32):
        assert w[64 - j] == -w[j]


def test_grid_validation():
    with pytest.raises(ValueError):
        spsim.make_grid(3, 8.0, 64)
    with pytest.raises(ValueError):
        spsim.make_grid(2, 8.0, 15)
    with pytest.raises(ValueError):
        spsim.make_grid(2, -1.0, 64)


def test_gaussian_norms(grid_2d):
    x = grid_2d.coordinates
    xx, yy = np.meshgrid(x, x, indexing="ij")
    u = np.exp(-(xx**2 + yy**2) / 2).astype(np.complex128)
    assert spsim.l2_norm_squared(grid_2d, u) == pytest.approx(math.pi, rel=1e-8)
    assert spsim.grad_norm_squared(grid_2d, u) == pytest.approx(math.pi, rel=1e-8)


def test_spectral_gradient_matches_closed_form(grid_1d):
    x = grid_1d.coordinates
    u = np.exp(-(x**2) / 2).astype(np.complex128)
    (du,) = spsim.spectral_gradient(grid_1d, u)
    assert du.shape == (512,)
    assert np.max(np.abs(du - (-x * u))) < 1e-8


def test_k_function_values():
    expected = math.log(3.0 / math.sqrt(10.0))
    assert spsim.k_function((3.0, 0.0), (0.0, 0.0)) == pytest.approx(expected, abs=1e-14)
    assert spsim.k_function((0.0, 0.0), (1.0, 0.0)) == 0.0
    with pytest.raises(ValueError):
        spsim.k_function((1.0, 1.0), (1.0, 1.0))


def test_kernel_bounds():
    rep = spsim.check_k_bound(eta=1.0, p=2.0)
    assert rep["far_bound_ok"]
    assert rep["C0"] == pytest.approx(1.0 + math.log(math.sqrt(3.0)), abs=1e-14)
    assert rep["sampled_sup_far"] <= rep["C0"]
    assert math.isfinite(rep["Lp_norm_near"]) and rep["Lp_norm_near"] > 0
    assert spsim.check_1d_bound() <= 1.0 + 1e-12


def test_potential_decomposition_identity(grid_2d):
    u = spsim.make_datum(grid_2d, "gaussian")
    lam = -1.0
    full = spsim.full_newtonian(grid_2d, u)
    linear, remainder = spsim.decomposed_potential(grid_2d, u, lambda_=lam)
    assert full.shape == (64, 64)
    assert linear.shape == (64, 64)
    target = lam * full
    err = np.max(np.abs(target - (linear + remainder)))
    assert err / np.max(np.abs(target)) < 1e-10


def test_simulation_conserves_mass(grid_1d):
    u0 = spsim.make_datum(grid_1d, "gaussian")
    sim = spsim.Simulation(grid_1d, u0, lambda_=-1.0, eta=-1.0, p=3.0)
    start = sim.observables()
    sim.step(1e-3, 50)
    assert sim.t == pytest.approx(0.05, abs=1e-12)
    end = sim.observables()
    assert end["mass"] == pytest.approx(start["mass"], rel=1e-12)
    assert end["total_energy"] == pytest.approx(start["total_energy"], rel=1e-6)
    state = sim.state()
    assert state.shape == (512,)
    assert state.dtype == np.complex128


def test_energy_breakdown_consistency(grid_1d):
    u0 = spsim.make_datum(grid_1d, "gaussian")
    eb = spsim.energy_breakdown(grid_1d, u0, lambda_=-1.0, eta=-1.0, p=3.0)
    assert eb["total"] == pytest.approx(eb["kinetic"] + eb["hartree"] + eb["power"], abs=1e-12)


def test_linear_propagator_is_unitary(grid_1d):
    u0 = spsim.make_datum(grid_1d, "gaussian")
    mass = spsim.l2_norm_squared(grid_1d, u0)
    v = spsim.linear_propagator_step(grid_1d, u0, m=1.3, dt=1e-2)
    assert spsim.l2_norm_squared(grid_1d, v) == pytest.approx(mass, rel=1e-12)


def test_picard_iterates_contract(grid_1d):
    u0 = spsim.make_datum(grid_1d, "gaussian")
    final, distances = spsim.picard_iterate(grid_1d, u0, -1.0, -1.0, 3.0, t_short=0.05)
    assert final.shape == (512,)
    assert len(distances) == 4
    for a, b in zip(distances, distances[1:]):
        assert b < a


def test_pde_residual_on_a_free_trajectory():
    g = spsim.make_grid(1, 16.0, 256)
    u0 = spsim.make_datum(g, "gaussian")
    sim = spsim.Simulation(g, u0, lambda_=0.0)
    dt = 1e-3
    states = []
    for _ in range(3):
        sim.step(dt)
        states.append(sim.state())
    r = spsim.pde_residual(g, states[0], states[1], states[2], dt, 0.0, 0.0, 2.0, "oSP")
    assert r < 1e-4
    with pytest.raises(ValueError):
        spsim.pde_residual(g, states[0], states[1], states[2], dt, 0.0, 0.0, 2.0, "bogus")


def test_make_datum_validation(grid_1d):
    with pytest.raises(ValueError):
        spsim.make_datum(grid_1d, "gaussian", width=6.0)  # fails boundary decay
    with pytest.raises(ValueError):
        spsim.make_datum(grid_1d, "ring")
    bumps = spsim.make_datum(grid_1d, "double_bump", amplitude=1.3, separation=8.0)
    assert spsim.l2_norm_squared(grid_1d, bumps) == pytest.approx(1.3**2, rel=1e-6)


def test_run_scenario_json_smoke():
    cfg = json.loads(spsim.preset_json("smoke-1d"))
    res = spsim.run_scenario_json(json.dumps(cfg))
    assert res["name"] == "smoke-1d"
    assert not res["error"]
    assert res["outcome"] == "bounded"
    assert res["exit_code"] == 0
    assert len(res["records"]) == 11
    assert res["records"][0]["t"] == 0.0
    assert all(c["passed"] for c in res["checks"])
    assert np.asarray(res["final_state"]).shape == (1024,)
    with pytest.raises(ValueError):
        spsim.run_scenario_json("{not json")


def test_preset_catalogue():
    names = spsim.preset_names()
    assert names[0] == "defocusing-2d"
    assert "smoke-1d" in names
    assert len(names) == 7
    assert spsim.sweep_preset_names() == ["sweep-1d", "sweep-2d"]
    sweep = json.loads(spsim.sweep_preset_json("sweep-1d"))
    assert sweep["schema_version"] == 1
    assert sweep["axes"]["p"] == [4, 5, 6]
    with pytest.raises(ValueError):
        spsim.preset_json("nope")
