import numpy as np
import pytest

from kernelopt import (
    Bounds,
    Decision,
    Field,
    Grid,
    InitialCondition,
    ScenarioSpec,
    Theta,
    initial_condition_samples,
    kernel_eval,
    scenario_from_dict,
)


def reference_grid():
    return Grid(n=14, m=5000, T=4.0)


class TestGrid:
    def test_reference_grid_accepted(self):
        g = reference_grid()
        assert g.h == 1.0 / 14
        assert abs(g.r - 0.1568) < 1e-12
        assert g.x_nodes()[-1] == 1.0
        assert abs(g.t_nodes()[-1] - 4.0) < 1e-12

    def test_mesh_ratio_above_half_rejected(self):
        with pytest.raises(ValueError, match="mesh ratio"):
            Grid(n=14, m=100, T=4.0)

    def test_parity_enforced(self):
        with pytest.raises(ValueError, match="even"):
            Grid(n=13, m=5000, T=4.0)
        with pytest.raises(ValueError, match="even"):
            Grid(n=14, m=4999, T=4.0)

    def test_positivity(self):
        with pytest.raises(ValueError):
            Grid(n=14, m=5000, T=0.0)
        with pytest.raises(ValueError):
            Grid(n=0, m=10, T=1.0)


class TestKernelEval:
    def test_zero_coefficients(self):
        assert kernel_eval(Theta(0.0, 0.0), 0.7) == 0.0

    def test_unit_coefficients_at_right_end(self):
        assert kernel_eval(Theta(1.0, 1.0), 1.0) == 2.0

    def test_reference_optimum_at_right_end(self):
        assert abs(kernel_eval(Theta(-1.0775, 0.5966), 1.0) - (-0.4809)) < 1e-12

    def test_vanishes_at_zero(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            t1, t2 = rng.uniform(-10, 10, size=2)
            assert kernel_eval(Theta(t1, t2), 0.0) == 0.0

    def test_linear_in_coefficients(self):
        rng = np.random.default_rng(8)
        xi = rng.uniform(0, 1, size=5)
        for _ in range(10):
            a, b = rng.uniform(-3, 3, size=2)
            t = Theta(*rng.uniform(-5, 5, size=2))
            s = Theta(*rng.uniform(-5, 5, size=2))
            combo = Theta(a * t.theta1 + b * s.theta1, a * t.theta2 + b * s.theta2)
            lhs = kernel_eval(combo, xi)
            rhs = a * kernel_eval(t, xi) + b * kernel_eval(s, xi)
            assert np.allclose(lhs, rhs, atol=1e-12)

    def test_domain_checked(self):
        with pytest.raises(ValueError):
            kernel_eval(Theta(1.0, 1.0), 1.2)
        with pytest.raises(ValueError):
            kernel_eval(Theta(1.0, 1.0), -0.1)


class TestInitialCondition:
    def test_sin_pi_on_two_intervals(self):
        samples = initial_condition_samples(InitialCondition.sin_pi(), Grid(2, 64, 1.0))
        assert np.allclose(samples, [0.0, 1.0, 0.0], atol=1e-15)

    def test_envelope_point_values(self):
        ic = InitialCondition.envelope_sin(1.0, 1.0, 1.0)
        assert abs(float(ic.evaluate(0.5)) - 1.5) < 1e-12
        ic3 = InitialCondition.envelope_sin(2.0, 1.0, 2.5)
        assert abs(float(ic3.evaluate(0.2)) - 2.2) < 1e-12

    def test_sampled_passthrough_and_length_check(self):
        grid = Grid(4, 64, 1.0)
        values = [0.0, 0.5, 1.0, 0.5, 0.25]
        ic = InitialCondition.from_samples(values)
        assert np.array_equal(ic.samples_on(grid), values)
        with pytest.raises(ValueError, match="entries"):
            ic.samples_on(Grid(6, 144, 1.0))

    def test_left_boundary_compatibility(self):
        with pytest.raises(ValueError, match="vanish"):
            InitialCondition.from_samples([0.1, 0.5, 0.0])

    def test_presets_vanish_at_origin(self):
        for ic in (InitialCondition.sin_pi(), InitialCondition.envelope_sin(2, 1, 2.5)):
            assert float(ic.evaluate(0.0)) == 0.0


class TestDecisionAndSpec:
    def test_negative_alpha_rejected(self):
        with pytest.raises(ValueError):
            Decision(Theta(0.0, 0.0), -1.0)

    def test_bounds_sanity(self):
        with pytest.raises(ValueError):
            Bounds(1.0, -1.0, 0.0, 1.0)

    def test_spec_validation(self):
        grid = reference_grid()
        y0 = InitialCondition.sin_pi()
        bounds = Bounds(-10, 10, -10, 10)
        guess = Decision(Theta(-1.0, 2.0), 0.0)
        spec = ScenarioSpec(c=10.0, grid=grid, y0=y0, bounds=bounds, epsilon=1.0,
                            initial_guess=guess)
        assert spec.c == 10.0
        with pytest.raises(ValueError):
            ScenarioSpec(c=-1.0, grid=grid, y0=y0, bounds=bounds, epsilon=1.0,
                         initial_guess=guess)
        with pytest.raises(ValueError):
            ScenarioSpec(c=10.0, grid=grid, y0=y0, bounds=bounds, epsilon=0.0,
                         initial_guess=guess)
        with pytest.raises(ValueError, match="bounds"):
            ScenarioSpec(c=10.0, grid=grid, y0=y0, bounds=Bounds(-1, 1, -1, 1),
                         epsilon=1.0, initial_guess=Decision(Theta(-2.0, 0.0), 0.0))


class TestField:
    def test_shape_and_finiteness(self):
        grid = Grid(2, 64, 1.0)
        values = np.zeros((3, 65))
        f = Field(values, grid)
        assert not f.values.flags.writeable
        with pytest.raises(ValueError, match="shape"):
            Field(np.zeros((4, 65)), grid)
        bad = np.zeros((3, 65))
        bad[1, 3] = np.nan
        with pytest.raises(ValueError, match="finite"):
            Field(bad, grid)


class TestScenarioDocument:
    def doc(self):
        return {
            "name": "demo",
            "c": 10.0,
            "T": 4.0,
            "n": 14,
            "m": 5000,
            "y0": {"preset": "sin_pi"},
            "bounds": {"a1": -10, "b1": 10, "a2": -10, "b2": 10},
            "epsilon": 1.0,
            "initial_guess": {"theta1": -1.0, "theta2": 2.0, "alpha": 0.0},
        }

    def test_round_trip(self):
        spec = scenario_from_dict(self.doc())
        assert spec.name == "demo"
        assert spec.grid.n == 14 and spec.grid.m == 5000
        assert spec.initial_guess.theta == Theta(-1.0, 2.0)
        assert spec.epsilon == 1.0

    def test_envelope_and_samples_forms(self):
        doc = self.doc()
        doc["y0"] = {"preset": "envelope_sin", "a": 2.0, "b": 1.0, "freq": 2.5}
        spec = scenario_from_dict(doc)
        assert abs(float(spec.y0.evaluate(0.2)) - 2.2) < 1e-12
        doc["y0"] = {"samples": [0.0] * 15}
        spec = scenario_from_dict(doc)
        assert spec.y0.samples_on(spec.grid).size == 15

    def test_missing_key_reported(self):
        doc = self.doc()
        del doc["epsilon"]
        with pytest.raises(ValueError, match="missing key"):
            scenario_from_dict(doc)

    def test_unknown_initial_condition(self):
        doc = self.doc()
        doc["y0"] = {"preset": "mystery"}
        with pytest.raises(ValueError, match="unknown initial condition"):
            scenario_from_dict(doc)
