import numpy as np
import pytest

from pqc.channels import KrausChannel
from pqc.metrics import AscentConfig, worst_case_cost
from pqc.noise import GateVariant, NoiseSpec, build_cnot_variant, ideal_cnot
from pqc.optimize import (
    GdaConfig,
    ParametricChannel,
    cnot_mixture,
    golden_section_min,
    minmax_gda,
    point_seed,
    refine_minimum,
    sweep,
    sweep_grid,
)

FAST = AscentConfig(restarts=8)


def rz(theta):
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def test_golden_section_quadratic():
    x, fx = golden_section_min(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-8)
    assert abs(x - 0.3) <= 1e-8 and fx <= 1e-15


def test_golden_section_constant():
    x, fx = golden_section_min(lambda x: 2.5, -1.0, 1.0, 1e-6)
    assert fx == 2.5 and -1.0 <= x <= 1.0


def test_golden_section_bad_bracket():
    with pytest.raises(ValueError):
        golden_section_min(lambda x: x, 1.0, 1.0)


def test_parametric_channel_bounds():
    with pytest.raises(ValueError):
        ParametricChannel(lambda th: None, ((1.0, 0.0),))
    pc = cnot_mixture(NoiseSpec.asymmetric())
    assert pc.arity == 1
    np.testing.assert_array_equal(pc.clip([1.7]), [1.0])


def test_gda_noiseless_zero_cost():
    pc = cnot_mixture(NoiseSpec.noiseless())
    for w0 in (0.0, 0.8):
        res = minmax_gda(pc, ideal_cnot(), 1, GdaConfig(theta0=(w0,), ascent=FAST))
        assert res.cost.value <= 1e-8


def test_gda_rz_toy():
    pc = ParametricChannel(lambda th: KrausChannel.unitary(rz(th[0])), ((-np.pi, np.pi),))
    res = minmax_gda(pc, KrausChannel.identity(2), 1, GdaConfig(theta0=(1.0,), ascent=FAST))
    assert abs(res.theta[0]) <= 1e-5
    assert res.cost.value <= 1e-6
    # best-so-far certified cost never increases
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))


def test_gda_rejects_non_cptp_builder():
    pc = ParametricChannel(lambda th: KrausChannel([th[0] * np.eye(2)]), ((0.0, 1.0),))
    with pytest.raises(ValueError):
        minmax_gda(pc, KrausChannel.identity(2), 1, GdaConfig(theta0=(0.5,), ascent=FAST))


def test_sweep_noiseless_flat():
    curve = sweep(cnot_mixture(NoiseSpec.noiseless()), ideal_cnot(), 1, 11, FAST, 200, 0)
    assert np.all(curve.worst_cost <= 1e-8)
    assert np.all(curve.mean_cost <= curve.worst_cost + 1e-9)


def test_sweep_argument_checks():
    pc2 = ParametricChannel(lambda th: KrausChannel.identity(2), ((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        sweep(pc2, KrausChannel.identity(2), 1, 5, FAST)
    with pytest.raises(ValueError):
        sweep(cnot_mixture(NoiseSpec.noiseless()), ideal_cnot(), 1, 1, FAST)


def test_sweep_grid_refinement_shares_points():
    coarse, fine = sweep_grid(0.0, 1.0, 11), sweep_grid(0.0, 1.0, 101)
    np.testing.assert_array_equal(coarse, fine[::10])
    pc = cnot_mixture(NoiseSpec.asymmetric())
    a = sweep(pc, ideal_cnot(), 1, 3, FAST, 100, 9)
    b = sweep(pc, ideal_cnot(), 1, 5, FAST, 100, 9)
    np.testing.assert_allclose(a.worst_cost, b.worst_cost[::2], atol=1e-9)
    np.testing.assert_allclose(a.mean_cost, b.mean_cost[::2], atol=1e-12)


def test_sweep_endpoints_match_single_variants():
    spec = NoiseSpec.asymmetric()
    curve = sweep(cnot_mixture(spec), ideal_cnot(), 1, 3, FAST, 100, 4)
    for w, variant, value in ((0.0, GateVariant.HADAMARD_CONJUGATED, curve.worst_cost[0]), (1.0, GateVariant.DIRECT, curve.worst_cost[-1])):
        cfg = AscentConfig(restarts=8, seed=point_seed(4, w))
        single = worst_case_cost(ideal_cnot(), build_cnot_variant(variant, spec), 1, cfg).value
        assert abs(single - value) <= 1e-9


def test_sweep_threads_match_serial(monkeypatch):
    pc = cnot_mixture(NoiseSpec.asymmetric())
    serial = sweep(pc, ideal_cnot(), 1, 4, FAST, 100, 2, workers=1)
    monkeypatch.setenv("PQC_THREADS", "3")
    threaded = sweep(pc, ideal_cnot(), 1, 4, FAST, 100, 2)
    np.testing.assert_array_equal(serial.worst_cost, threaded.worst_cost)
    np.testing.assert_array_equal(serial.mean_cost, threaded.mean_cost)


def test_refine_minimum_on_grid():
    spec = NoiseSpec.asymmetric()
    pc = cnot_mixture(spec)
    curve = sweep(pc, ideal_cnot(), 1, 21, FAST, 100, 6)
    i = curve.argmin
    w, fw = refine_minimum(pc, ideal_cnot(), 1, FAST, 6, (curve.grid[i - 1], curve.grid[i + 1]))
    assert abs(w - curve.grid[i]) <= 0.05 + 1e-12
    assert fw <= curve.worst_cost[i] + 1e-9
