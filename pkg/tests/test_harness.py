import numpy as np
import pytest

from hbsge.harness import (
    ProblemSpec, RunConfig, Status, build_suite, detect_divergence, initial_point, reference_suite,
    run, run_suite, tune_learning_rate,
)
from hbsge.numerics import SeededRng
from hbsge.optimizers import Method, OptimizerConfig
from hbsge.problems import QuadraticProblem, Rosenbrock, make_quadratic
from hbsge.tables import runs_to_csv, trace_to_csv


def quad_with_start(kappa, seed):
    return ProblemSpec("quadratic", 1.0, kappa=kappa).build(seed, 0)


class TestDivergence:
    def test_exploded_iterate(self):
        assert detect_divergence(np.array([1e11, 0.0]), 1.0)

    def test_origin(self):
        assert not detect_divergence(np.zeros(3), 0.0)

    def test_nan_objective(self):
        assert detect_divergence(np.zeros(2), float("nan"))

    def test_exploded_objective(self):
        assert detect_divergence(np.zeros(2), 2e10)

    def test_inf_component(self):
        assert detect_divergence(np.array([0.0, -np.inf]), 0.0)


class TestInitialPoint:
    def test_rosenbrock(self):
        np.testing.assert_array_equal(initial_point("rosenbrock"), [-1.2, 1.0])

    def test_beale(self):
        np.testing.assert_array_equal(initial_point("beale", SeededRng(3)), [1.0, 1.0])

    def test_quadratic_mean_norm(self):
        norms = [np.linalg.norm(initial_point("quadratic", SeededRng(s), 10)) for s in range(10_000)]
        # E||x0|| = 2 sqrt(2) Gamma(5.5) / Gamma(5) ~ 6.17 for std 2 in d = 10
        assert 6.0 <= np.mean(norms) <= 6.6


class TestRun:
    def test_sgd_forced_divergence_kappa50(self):
        p, x0 = quad_with_start(50, 42)
        r = run(p, OptimizerConfig(Method.SGD, 0.05), RunConfig(seed=42), x0)
        assert r.status is Status.DIVERGED
        assert r.divergence_iter is not None and r.iters_to_primary is None

    def test_hbsge_kappa50(self):
        p, x0 = quad_with_start(50, 42)
        r = run(p, OptimizerConfig(Method.HBSGE, 0.05, beta=0.9), RunConfig(), x0)
        assert r.status is Status.CONVERGED
        assert 60 <= r.iters_to_primary <= 400

    def test_nag_rosenbrock_diverges_fast(self):
        r = run(Rosenbrock(), OptimizerConfig(Method.NAG, 0.005, beta=0.9), RunConfig(max_iters=5000),
                initial_point("rosenbrock"))
        assert r.status is Status.DIVERGED
        assert r.divergence_iter <= 15

    def test_trace_invariants(self):
        for method in Method:
            p, x0 = quad_with_start(50, 1)
            cfg = RunConfig(max_iters=300)
            r = run(p, OptimizerConfig(method, 0.05), cfg, x0)
            ts = [row.t for row in r.trace]
            assert ts == list(range(len(ts)))
            if r.status is Status.DIVERGED:
                assert len(r.trace) == r.divergence_iter + 1
            else:
                assert len(r.trace) == cfg.max_iters + 1
            first = next((row.t for row in r.trace if row.grad_norm < cfg.tol_primary), None)
            if r.status is not Status.DIVERGED:
                assert r.iters_to_primary == first
            if r.iters_to_high is not None:
                assert r.iters_to_primary is not None and r.iters_to_primary <= r.iters_to_high
            assert (r.status is Status.DIVERGED) == (r.divergence_iter is not None)

    def test_alpha_recorded_for_hbsge_only(self):
        p, x0 = quad_with_start(10, 0)
        hb = run(p, OptimizerConfig(Method.HBSGE, 0.1), RunConfig(max_iters=5), x0)
        assert hb.trace[0].alpha_t == 1.2 and hb.trace[-1].alpha_t is None
        sgd = run(p, OptimizerConfig(Method.SGD, 0.1), RunConfig(max_iters=5), x0)
        assert all(row.alpha_t is None for row in sgd.trace)

    def test_start_at_optimum(self):
        p = QuadraticProblem.diagonal([1.0, 3.0])
        r = run(p, OptimizerConfig(Method.SGD, 0.1), RunConfig(max_iters=3), np.zeros(2))
        assert r.iters_to_primary == 0 and r.iters_to_high == 0

    def test_stop_at_tolerance(self):
        p, x0 = quad_with_start(10, 0)
        r = run(p, OptimizerConfig(Method.SGD, 0.1), RunConfig(stop_at_tolerance=True), x0)
        assert r.status is Status.CONVERGED
        assert r.trace[-1].t == r.iters_to_primary

    def test_run_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig(tol_high=1e-2)
        with pytest.raises(ValueError):
            RunConfig(max_iters=0)


class TestTuning:
    def test_kappa10(self):
        p, x0 = quad_with_start(10, 42)
        assert tune_learning_rate(p, cfg=RunConfig(), x0=x0) == 0.1

    def test_kappa100(self):
        p, x0 = quad_with_start(100, 42)
        assert tune_learning_rate(p, cfg=RunConfig(), x0=x0) == 0.01

    def test_trivial(self):
        assert tune_learning_rate(QuadraticProblem.diagonal([1.0]), [0.1], x0=np.array([3.0])) == 0.1

    def test_grid_order_irrelevant(self):
        p, x0 = quad_with_start(10, 42)
        assert tune_learning_rate(p, [0.001, 0.1, 0.05], x0=x0) == 0.1

    def test_flagged_fallback(self):
        p = QuadraticProblem.diagonal([1.0, 1000.0])
        with pytest.warns(UserWarning, match="falling back"):
            assert tune_learning_rate(p, [0.1, 0.05], x0=np.ones(2)) == 0.05


class TestSuite:
    def test_empty(self):
        assert run_suite([], RunConfig()) == []

    def test_reference_grid_cardinality(self):
        suite = reference_suite()
        assert sum(len(opts) for _, opts in suite) == 36

    def test_adam_runs_at_half_rate(self):
        for spec, opts in reference_suite():
            adam = [o for o in opts if o.method is Method.ADAM]
            assert [o.eta for o in adam] == [0.5 * spec.eta]
            assert all(o.eta == spec.eta for o in opts if o.method is not Method.ADAM)

    def test_build_suite_templates(self):
        suite = build_suite([ProblemSpec("quadratic", 0.02, kappa=20)],
                            [OptimizerConfig(Method.SGD, 9.0), OptimizerConfig(Method.ADAM, 9.0)])
        assert [o.eta for o in suite[0][1]] == [0.02, 0.01]

    def test_shared_instance_per_problem(self):
        spec = ProblemSpec("quadratic", 0.05, kappa=50)
        (p1, x1), (p2, x2) = spec.build(42, 0), spec.build(42, 0)
        assert np.array_equal(p1.a, p2.a) and np.array_equal(x1, x2)
        p3, _ = spec.build(42, 1)
        assert not np.array_equal(p1.a, p3.a)

    def test_deterministic_and_parallel_equal(self):
        suite = build_suite([ProblemSpec("quadratic", 0.05, kappa=50, max_iters=200),
                             ProblemSpec("beale", 0.01, max_iters=200)])
        a = run_suite(suite, RunConfig(seed=42))
        b = run_suite(suite, RunConfig(seed=42))
        c = run_suite(suite, RunConfig(seed=42), jobs=2)
        assert runs_to_csv(a) == runs_to_csv(b) == runs_to_csv(c)
        assert [trace_to_csv(r.trace) for r in a] == [trace_to_csv(r.trace) for r in c]

    def test_quadratic_budget_defaults(self):
        spec_q = ProblemSpec("quadratic", 0.1, kappa=10)
        assert spec_q.budget == 1000
        assert ProblemSpec("rosenbrock", 0.005).budget == 5000

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ProblemSpec("himmelblau", 0.01)


def test_stream_order_q_then_b_then_x0():
    rng = SeededRng(123)
    p = make_quadratic(50, 10, rng)
    x0 = initial_point("quadratic", rng, 10)
    assert rng.counter == 100 + 10 + 10
    assert x0.shape == (10,) and p.dim == 10
