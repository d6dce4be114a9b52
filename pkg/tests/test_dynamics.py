import numpy as np
import pytest

from shellqm import (
    GeneralQuadraticObservable,
    HermitianObservable,
    commutator,
    config_observable,
    evaluate_observable,
    flow,
    flow_numeric,
    make_state,
    shell_defect,
    states_equal,
)
from shellqm.errors import StepCountError

from conftest import SIGMA_X, random_hermitian, random_state


def general_velocity(gen: GeneralQuadraticObservable, psi: np.ndarray) -> np.ndarray:
    """Velocity field of the generalized motion for arbitrary quadratic
    generators (the production code only integrates the Hermitian case)."""
    return -1j * (gen.linear + gen.hermitian @ psi + 2.0 * (gen.anomalous @ np.conj(psi)))


def rk4_step(gen, psi, h):
    k1 = general_velocity(gen, psi)
    k2 = general_velocity(gen, psi + 0.5 * h * k1)
    k3 = general_velocity(gen, psi + 0.5 * h * k2)
    k4 = general_velocity(gen, psi + h * k3)
    return psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


class TestFlow:
    def test_zero_time_is_identity(self, rng):
        s = random_state(4, rng)
        out = flow(random_hermitian(4, rng), s, 0.0)
        assert np.allclose(out.components, s.components, atol=1e-14)

    def test_sigma_x_quarter_turn(self):
        # oracle: apply -i sigma_x to the state
        hbar = 1.0
        s = make_state([np.sqrt(hbar), 0], hbar=hbar)
        out = flow(HermitianObservable(SIGMA_X), s, np.pi / 2)
        assert np.allclose(out.components, [0, -1j * np.sqrt(hbar)], atol=1e-14)
        assert states_equal(out, make_state([0, np.sqrt(hbar)], hbar=hbar))

    def test_integer_spectrum_periodicity(self):
        # oracle: diagonal phases exp(-2 pi i) and exp(-4 pi i)
        hbar = 1.0
        s = make_state([np.sqrt(hbar / 2), np.sqrt(hbar / 2)], hbar=hbar)
        out = flow(config_observable(2), s, 2 * np.pi)
        assert states_equal(out, s)

    def test_norm_and_generator_conserved(self, rng):
        for _ in range(1000):
            d = int(rng.integers(2, 7))
            a = random_hermitian(d, rng)
            s = random_state(d, rng)
            t = float(rng.uniform(-10, 10))
            out = flow(a, s, t)
            assert abs(out.norm_squared() - s.hbar) <= 1e-9
            assert abs(evaluate_observable(a, out) - evaluate_observable(a, s)) <= 1e-9

    def test_commuting_observable_conserved(self, rng):
        for _ in range(50):
            d = int(rng.integers(2, 6))
            a = random_hermitian(d, rng)
            b = HermitianObservable(a.matrix @ a.matrix)  # commutes with a
            assert np.max(np.abs(commutator(a, b))) <= 1e-12
            s = random_state(d, rng)
            out = flow(a, s, float(rng.uniform(-5, 5)))
            assert abs(evaluate_observable(b, out) - evaluate_observable(b, s)) <= 1e-9


class TestFlowNumeric:
    def test_matches_exact_flow(self):
        hbar = 1.0
        s = make_state([np.sqrt(hbar), 0], hbar=hbar)
        a = HermitianObservable(SIGMA_X)
        traj = flow_numeric(a, s, np.pi / 2, steps=10**4)
        exact = flow(a, s, np.pi / 2)
        assert np.max(np.abs(traj.final.components - exact.components)) <= 1e-10

    def test_zero_generator_is_constant(self, rng):
        s = random_state(3, rng)
        a = HermitianObservable(np.zeros((3, 3), dtype=complex))
        traj = flow_numeric(a, s, 2.0, steps=50)
        for state in traj.states:
            assert np.array_equal(state.components, s.components)

    def test_fourth_order_convergence(self, rng):
        # error ratio approaches 2^4 = 16 per step doubling
        for _ in range(5):
            d = int(rng.integers(2, 5))
            a = random_hermitian(d, rng)
            a = HermitianObservable(a.matrix / np.linalg.norm(a.matrix))
            s = random_state(d, rng)
            exact = flow(a, s, 2.0)
            errs = []
            for steps in (40, 80, 160):
                traj = flow_numeric(a, s, 2.0, steps=steps)
                errs.append(np.max(np.abs(traj.final.components - exact.components)))
            for e1, e2 in zip(errs, errs[1:]):
                assert 13.0 <= e1 / e2 <= 19.0

    def test_reports_truncation_constant(self, rng):
        # C = err * (steps/t)^4 is stable across resolutions for a 4th-order scheme
        a = random_hermitian(3, rng)
        a = HermitianObservable(a.matrix / np.linalg.norm(a.matrix))
        s = random_state(3, rng)
        exact = flow(a, s, 2.0)
        constants = []
        for steps in (50, 100, 200):
            err = np.max(np.abs(flow_numeric(a, s, 2.0, steps=steps).final.components
                                - exact.components))
            constants.append(err * (steps / 2.0) ** 4)
        assert max(constants) <= 2.0 * min(constants)

    def test_times_and_states_aligned(self, rng):
        s = random_state(2, rng)
        traj = flow_numeric(random_hermitian(2, rng), s, 1.0, steps=10)
        assert traj.times.shape == (11,)
        assert len(traj.states) == 11
        assert traj.times[0] == 0.0 and traj.times[-1] == 1.0

    def test_step_cap(self, rng):
        s = random_state(2, rng)
        with pytest.raises(StepCountError):
            flow_numeric(random_hermitian(2, rng), s, 1.0, steps=10**8 + 1)


class TestShellDefect:
    def hermitian_only(self, matrix):
        d = matrix.shape[0]
        return GeneralQuadraticObservable(
            constant=0.0,
            linear=np.zeros(d, dtype=complex),
            hermitian=matrix,
            anomalous=np.zeros((d, d), dtype=complex),
        )

    def test_hermitian_generator_preserves_shell(self, rng):
        for _ in range(10):
            d = int(rng.integers(1, 6))
            gen = self.hermitian_only(random_hermitian(d, rng).matrix)
            for _ in range(100):
                psi = rng.normal(size=d) + 1j * rng.normal(size=d)
                assert abs(shell_defect(gen, psi)) <= 1e-10

    def test_anomalous_hand_case(self):
        # oracle: 2 Im(conj(i) * 2 * conj(i)) = 2 Im(-2) = 0
        gen = GeneralQuadraticObservable(
            constant=0.0,
            linear=np.zeros(1, dtype=complex),
            hermitian=np.zeros((1, 1), dtype=complex),
            anomalous=np.array([[1.0]], dtype=complex),
        )
        assert shell_defect(gen, np.array([1j])) == pytest.approx(0.0, abs=1e-14)

    def test_linear_hand_case(self):
        # oracle: 2 Im(conj(i sqrt(hbar))) = -2 sqrt(hbar)
        hbar = 2.0
        gen = GeneralQuadraticObservable(
            constant=0.0,
            linear=np.array([1.0 + 0j]),
            hermitian=np.zeros((1, 1), dtype=complex),
            anomalous=np.zeros((1, 1), dtype=complex),
        )
        got = shell_defect(gen, np.array([1j * np.sqrt(hbar)]))
        assert got == pytest.approx(-2.0 * np.sqrt(hbar))

    def test_matches_finite_difference_oracle(self, rng):
        # central difference of |psi(t)|^2 through one tiny integrator step
        h = 1e-6
        for _ in range(50):
            d = int(rng.integers(1, 5))
            lin = rng.normal(size=d) + 1j * rng.normal(size=d)
            sym = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            gen = GeneralQuadraticObservable(
                constant=0.0,
                linear=lin,
                hermitian=random_hermitian(d, rng).matrix,
                anomalous=0.5 * (sym + sym.T),
            )
            psi = rng.normal(size=d) + 1j * rng.normal(size=d)
            fwd = rk4_step(gen, psi, h)
            bwd = rk4_step(gen, psi, -h)
            numeric = (np.sum(np.abs(fwd) ** 2) - np.sum(np.abs(bwd) ** 2)) / (2 * h)
            assert shell_defect(gen, psi) == pytest.approx(float(numeric), abs=1e-6)

    def test_generic_generators_violate_shell(self, rng):
        violations = 0
        trials = 100
        for _ in range(trials):
            d = int(rng.integers(1, 5))
            lin = rng.normal(size=d) + 1j * rng.normal(size=d)
            sym = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            gen = GeneralQuadraticObservable(
                constant=0.0,
                linear=lin,
                hermitian=random_hermitian(d, rng).matrix,
                anomalous=0.5 * (sym + sym.T),
            )
            psi = rng.normal(size=d) + 1j * rng.normal(size=d)
            if abs(shell_defect(gen, psi)) > 1e-8:
                violations += 1
        assert violations >= 95
