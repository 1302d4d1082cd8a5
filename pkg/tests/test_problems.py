import numpy as np
import pytest

from fwdgrad import (DriftingLsqObjective, HorizonExceededError,
                     LinearLsqInstance, StaticLsqObjective, dist_to_solution_set,
                     gradient_exact, l1_composite, lsq_constants,
                     make_drifting_generator, measure_drift, prox_gradient_exact)
from fwdgrad.sampling import substream


def test_constants_identity_matrix():
    inst = LinearLsqInstance(np.eye(2), np.zeros(2))
    assert lsq_constants(inst) == (1.0, 1.0)


def test_constants_from_svd_construction():
    gen = make_drifting_generator(60, 10, 10, seed=0)
    mu, beta = lsq_constants(gen.advance(0))
    assert mu == pytest.approx(0.01, rel=1e-12)
    assert beta == pytest.approx(1.0, rel=1e-12)


def test_constants_rank_deficient_rows_flagged():
    inst = LinearLsqInstance(np.array([[1.0, 0.0], [0.0, 0.0]]), np.zeros(2))
    mu, beta = lsq_constants(inst)
    assert mu == 0.0
    assert beta == 1.0


def test_constants_zero_matrix_raises():
    with pytest.raises(ValueError, match="zero"):
        lsq_constants(LinearLsqInstance(np.zeros((2, 2)), np.zeros(2)))


def test_generator_defaults():
    gen = make_drifting_generator(60, 10, 10, seed=3)
    inst = gen.advance(0)
    _, s, _ = inst.svd()
    assert np.allclose(np.sort(s), np.arange(1, 11) / 10.0, atol=1e-12)
    assert gen.sigma_step == 1e-6
    assert gen.b_noise_var == 1e-2


def test_generator_orthonormal_factors():
    gen = make_drifting_generator(30, 8, 5, seed=1)
    assert np.linalg.norm(gen.U.T @ gen.U - np.eye(5)) <= 1e-12
    assert np.linalg.norm(gen.V.T @ gen.V - np.eye(5)) <= 1e-12


def test_singular_values_after_thousand_steps():
    gen = make_drifting_generator(60, 10, 10, seed=2)
    inst = gen.advance(1000)
    _, s, _ = inst.svd()
    assert abs(np.min(s) - 0.099) <= 1e-12  # 0.1 - 1000 * 1e-6


def test_generator_determinism_and_base_case():
    a = make_drifting_generator(20, 6, 4, seed=11)
    b = make_drifting_generator(20, 6, 4, seed=11)
    ia, ib = a.advance(5), b.advance(5)
    assert np.array_equal(ia.A, ib.A)
    assert np.array_equal(ia.b, ib.b)
    # asking for the current index again is a pure read
    ia2 = a.advance(5)
    assert np.array_equal(ia.A, ia2.A) and np.array_equal(ia.b, ia2.b)
    c = make_drifting_generator(20, 6, 4, seed=11)
    i0 = c.advance(0)
    assert np.allclose(i0.A, c.U @ np.diag(np.arange(1, 5) / 4.0) @ c.V.T, atol=1e-15)


def test_generator_rewind_rejected():
    gen = make_drifting_generator(10, 4, 2, seed=0)
    gen.advance(3)
    with pytest.raises(ValueError, match="rewind"):
        gen.advance(1)


def test_generator_horizon_underflow():
    gen = make_drifting_generator(10, 4, 2, seed=0, sigma_step=0.3)
    with pytest.raises(HorizonExceededError):
        gen.advance(2)  # smallest singular value 0.5 dies on the 2nd step


def test_b_increment_variance_monte_carlo():
    n = 10
    gen = make_drifting_generator(12, n, 4, seed=6)
    prev = gen.advance(0).b
    acc = 0.0
    steps = 10_000
    for k in range(1, steps + 1):
        cur = gen.advance(k).b
        acc += float(np.sum((cur - prev) ** 2)) / n
        prev = cur
    assert 0.009 <= acc / steps <= 0.011


def test_bad_generator_dimensions():
    with pytest.raises(ValueError):
        make_drifting_generator(10, 4, 5, seed=0)  # r > min(m, n)


def test_instance_loss_grad_and_dual_path_agree():
    rng = np.random.default_rng(4)
    A, b = rng.standard_normal((5, 9)), rng.standard_normal(5)
    inst = LinearLsqInstance(A, b)
    f = inst.scalar_function()
    x = rng.standard_normal(9)
    assert f.value(x) == pytest.approx(inst.loss(x), rel=1e-14)
    assert np.linalg.norm(gradient_exact(f, x) - inst.grad(x)) <= 1e-12
    assert np.linalg.norm(f.gradient(x) - inst.grad(x)) <= 1e-14


def test_dist_zero_on_solutions():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((3, 6))
    x_sol = rng.standard_normal(6)
    inst = LinearLsqInstance(A, A @ x_sol)
    assert dist_to_solution_set(inst, x_sol) <= 1e-12


def test_dist_identity_instance():
    inst = LinearLsqInstance(np.eye(3), np.zeros(3))
    x = np.array([1.0, -2.0, 2.0])
    assert dist_to_solution_set(inst, x) == pytest.approx(3.0, rel=1e-14)


def test_dist_matches_least_norm_correction():
    rng = np.random.default_rng(21)
    A = rng.standard_normal((3, 6))
    inst = LinearLsqInstance(A, rng.standard_normal(3))
    for _ in range(5):
        x = rng.standard_normal(6)
        # independent oracle: least-norm solution of A d = A x - b
        d, *_ = np.linalg.lstsq(A, inst.residual(x), rcond=None)
        assert dist_to_solution_set(inst, x) == pytest.approx(
            float(np.linalg.norm(d)), abs=1e-10)


def test_dist_inconsistent_system_raises():
    inst = LinearLsqInstance(np.array([[1.0, 0.0], [0.0, 0.0]]),
                             np.array([0.0, 1.0]))
    with pytest.raises(ValueError, match="inconsistent"):
        dist_to_solution_set(inst, np.zeros(2))


def test_quadratic_growth_sandwich_random_points():
    rng = np.random.default_rng(13)
    for trial in range(4):
        A = rng.standard_normal((4, 8))
        x_sol = rng.standard_normal(8)
        inst = LinearLsqInstance(A, A @ x_sol)
        mu, beta = lsq_constants(inst)
        assert mu > 0
        for _ in range(250):
            x = rng.standard_normal(8) * rng.choice([0.1, 1.0, 10.0])
            gap = inst.loss(x) - inst.optimal_value()
            d2 = dist_to_solution_set(inst, x) ** 2
            slack = 1e-9 * (1.0 + gap)
            assert 0.5 * mu * d2 <= gap + slack
            assert gap <= 0.5 * beta * d2 + slack


def test_pl_inequality_full_row_rank():
    rng = np.random.default_rng(17)
    A = rng.standard_normal((5, 12))
    x_sol = rng.standard_normal(12)
    inst = LinearLsqInstance(A, A @ x_sol)
    mu, _ = lsq_constants(inst)
    for _ in range(200):
        x = rng.standard_normal(12)
        gap = inst.loss(x) - inst.optimal_value()
        assert 0.5 * float(inst.grad(x) @ inst.grad(x)) >= mu * gap * (1 - 1e-12)


def test_optimal_value_snaps_to_zero_when_consistent():
    gen = make_drifting_generator(60, 10, 10, seed=0)
    assert gen.advance(0).optimal_value() == 0.0


def test_measure_drift_static_objective():
    inst = LinearLsqInstance(np.eye(3), np.ones(3))
    family = StaticLsqObjective(inst)
    traj = [np.zeros(3), np.ones(3), np.array([1.0, -1.0, 0.5])]
    assert measure_drift(family, traj) == (0.0, 0.0)


def test_measure_drift_drifting_lsq():
    family = DriftingLsqObjective(make_drifting_generator(20, 5, 5, seed=8))
    rng = np.random.default_rng(0)
    traj = [rng.standard_normal(20) for _ in range(50)]
    eta0, eta_star = measure_drift(family, traj)
    assert eta_star == 0.0  # interpolating family: optimal values stay 0
    assert 0.0 < eta0 < np.inf


def test_l1_composite_reduces_at_zero_weight():
    inst = LinearLsqInstance(np.array([[1.0, 2.0]]), np.array([1.0]))
    comp = l1_composite(inst, 0.0)
    x = np.array([0.3, -0.4])
    assert comp.loss(0, x) == inst.loss(x)
    assert comp.subgradient_bound() == 0.0


def test_l1_subgradient_bound():
    inst = LinearLsqInstance(np.eye(4), np.zeros(4))
    comp = l1_composite(inst, 0.1)
    assert comp.subgradient_bound() == pytest.approx(0.2)  # 0.1 * sqrt(4)


def test_scalar_soft_threshold_minimizer():
    # min 0.5 (x - 1)^2 + 0.5 |x|  ->  x* = 0.5
    inst = LinearLsqInstance(np.array([[1.0]]), np.array([1.0]))
    comp = l1_composite(inst, 0.5)
    assert comp.minimizer(0) == pytest.approx([0.5], abs=1e-10)
    assert comp.optimal_value(0) == pytest.approx(0.375, abs=1e-12)


def test_composite_optimum_oracle_matches_direct_solve():
    rng = np.random.default_rng(30)
    A, b = rng.standard_normal((3, 6)), rng.standard_normal(3)
    inst = LinearLsqInstance(A, b)
    comp = l1_composite(inst, 0.1)
    res = prox_gradient_exact(inst, comp.h, rng.standard_normal(6))
    assert comp.optimal_value(0) == pytest.approx(res.loss, abs=1e-10)


def test_objective_family_via_substream_is_reproducible():
    fam1 = DriftingLsqObjective(make_drifting_generator(12, 4, 3, seed=substream(5, 2)))
    fam2 = DriftingLsqObjective(make_drifting_generator(12, 4, 3, seed=substream(5, 2)))
    for k in (0, 3, 7):
        assert np.array_equal(fam1.instance(k).A, fam2.instance(k).A)
        assert np.array_equal(fam1.instance(k).b, fam2.instance(k).b)
