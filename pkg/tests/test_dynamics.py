import math

import numpy as np
import pytest

from conftest import random_state
from spherebot import dynamics, model, simulate
from spherebot._backend import COMPILED_AVAILABLE, available_backends
from spherebot.dynamics import (
    ControlInput,
    affine_decomposition,
    assemble_eom,
    assemble_eom_beta_held,
    constraint_jacobian,
    constraint_residuals,
    kernel_params,
    mass_matrix,
    state_derivative,
)
from spherebot.errors import DegenerateConfigurationError
from spherebot.model import state_vector


def consistent_state(rng, params, scale=1.0):
    x = random_state(rng, scale)
    return simulate.enforce_rolling_velocities(x, params)


class TestConstraintJacobian:
    def test_aligned_heading_reduces_to_simple_rolling(self, params):
        x = state_vector(dtheta=0.7, dpsi=-2.0)
        a, _ = constraint_jacobian(x, params)
        qd = np.array([x[10], x[11], x[6], x[7], x[8], x[9]])
        # at phi = theta = 0: dX = -r_h dpsi and dZ = r_h dtheta
        x[10] = -params.r_h * x[8]
        x[11] = params.r_h * x[7]
        assert np.max(np.abs(constraint_residuals(x, params))) < 1e-15

    def test_consistent_state_has_zero_residual(self, params, rng):
        for _ in range(10):
            x = consistent_state(rng, params)
            assert np.max(np.abs(constraint_residuals(x, params))) < 1e-12

    def test_jacobian_matches_residual_linearity(self, params, rng):
        # the residual is linear in qd; A must be its exact gradient
        h = 1e-6
        for _ in range(5):
            x = random_state(rng)
            a, _ = constraint_jacobian(x, params)
            fd = np.zeros_like(a)
            for j, idx in enumerate((10, 11, 6, 7, 8, 9)):
                xp = x.copy()
                xm = x.copy()
                xp[idx] += h
                xm[idx] -= h
                fd[:, j] = (
                    constraint_residuals(xp, params)
                    - constraint_residuals(xm, params)
                ) / (2 * h)
            assert np.max(np.abs(a - fd)) < 1e-10

    def test_adot_qd_matches_time_derivative(self, params, rng):
        # d/dt(A qd) along the flow with frozen qd equals the Adot qd term
        h = 1e-7
        for _ in range(5):
            x = random_state(rng)
            _, adot_qd = constraint_jacobian(x, params)
            xp = x.copy()
            xm = x.copy()
            for pos, rate in ((0, 6), (1, 7), (2, 8), (3, 9), (4, 10), (5, 11)):
                xp[pos] += h * x[rate]
                xm[pos] -= h * x[rate]
            fd = (
                constraint_residuals(xp, params)
                - constraint_residuals(xm, params)
            ) / (2 * h)
            assert np.max(np.abs(adot_qd - fd)) < 1e-6


class TestAssembleEom:
    def test_equilibrium_pendulum_down(self, params):
        sol = assemble_eom(state_vector(), ControlInput(), params)
        assert np.max(np.abs(sol.qdd)) < 1e-12

    def test_gravity_restoring_sign(self, params):
        # pendulum displaced 5 degrees swings back toward vertical
        x = state_vector(beta=math.radians(5.0))
        sol = assemble_eom(x, ControlInput(), params)
        qdd_theta, qdd_beta = sol.qdd[3], sol.qdd[5]
        assert abs(qdd_beta) > 1e-3
        # the hang angle beta + theta accelerates toward zero
        assert qdd_beta + qdd_theta < 0.0

    def test_acceleration_constraint_residual(self, params, rng):
        for _ in range(10):
            x = consistent_state(rng, params)
            sol = assemble_eom(x, ControlInput(0.4, -0.8), params)
            a, adot_qd = constraint_jacobian(x, params)
            residual = a @ sol.qdd + adot_qd
            assert np.max(np.abs(residual)) < 1e-10

    def test_multipliers_balance_constraint_forces(self, params, rng):
        # M qdd + c + g - Q = A^T lambda must hold row by row
        x = consistent_state(rng, params)
        u = ControlInput(0.3, 0.7)
        sol = assemble_eom(x, u, params)
        m = mass_matrix(x, params)
        c, g = dynamics.generalized_forces(x, params)
        q_vec = np.zeros(6)
        q_vec[4], q_vec[5] = u
        a, _ = constraint_jacobian(x, params)
        lhs = m @ sol.qdd + c + g - q_vec
        assert np.max(np.abs(lhs - a.T @ sol.lam)) < 1e-9

    def test_degenerate_configuration_raises(self, params):
        # zero pendulum mass and inertia wipe out the beta row
        kp = kernel_params(params).copy()
        kp[1] = 0.0  # m_p
        kp[2] = 0.0  # r_p
        kp[6] = 0.0  # pendulum tensor value
        with pytest.raises(DegenerateConfigurationError) as excinfo:
            assemble_eom(state_vector(), ControlInput(), params, kp=kp)
        assert excinfo.value.cond_estimate > dynamics.DEGENERATE_COND_LIMIT


class TestStateDerivative:
    def test_rest_equilibrium_zero_derivative(self, params):
        dx = state_derivative(state_vector(), ControlInput(), params)
        assert np.max(np.abs(dx)) < 1e-12

    def test_identity_rows(self, params, rng):
        x = consistent_state(rng, params)
        dx = state_derivative(x, ControlInput(0.1, 0.2), params)
        assert np.allclose(dx[:6], x[6:], atol=0.0)

    def test_steady_circle_spin_rate_stays_constant(self, params):
        # at the symmetric steady-circle start the spin acceleration vanishes
        x = simulate.steady_circle_state(math.radians(15.0), -1.0, params)
        dx = state_derivative(x, ControlInput(), params)
        assert abs(dx[8]) < 1e-9

    def test_matches_affine_decomposition(self, params, rng):
        for _ in range(10):
            x = consistent_state(rng, params)
            ad = affine_decomposition(x, params)
            u = ControlInput(*rng.uniform(-3, 3, 2))
            dx = state_derivative(x, u, params)
            assert np.max(np.abs(ad.f + ad.g @ np.array(u) - dx)) < 1e-9


class TestAffineDecomposition:
    def test_kinematic_rows_zero(self, params, rng):
        x = random_state(rng)
        ad = affine_decomposition(x, params)
        assert np.max(np.abs(ad.g[:6])) == 0.0

    def test_sparsity_pattern(self, params, rng):
        # T_s never reaches theta''/beta''; T_p never reaches phi''/psi''
        for _ in range(10):
            x = random_state(rng)
            ad = affine_decomposition(x, params)
            assert abs(ad.g[6, 1]) < 1e-12   # phi'' from T_p
            assert abs(ad.g[7, 0]) < 1e-12   # theta'' from T_s
            assert abs(ad.g[8, 1]) < 1e-12   # psi'' from T_p
            assert abs(ad.g[9, 0]) < 1e-12   # beta'' from T_s

    def test_affinity_over_random_inputs(self, params, rng):
        x = consistent_state(rng, params)
        ad = affine_decomposition(x, params)
        for _ in range(10):
            u = ControlInput(*rng.uniform(-5, 5, 2))
            dx = state_derivative(x, u, params)
            assert np.max(np.abs(ad.f + ad.g @ np.array(u) - dx)) < 1e-9

    def test_named_accessors(self, params, rng):
        x = random_state(rng)
        ad = affine_decomposition(x, params)
        assert ad.theta_ddot_drift == ad.f[7]
        assert ad.theta_ddot_gain == ad.g[7, 1]
        assert ad.psi_ddot_gain == ad.g[8, 0]
        assert ad.beta_ddot_gain == ad.g[9, 1]


class TestMassMatrix:
    def test_symmetric_positive_definite(self, params, rng):
        for _ in range(10):
            x = random_state(rng)
            m = mass_matrix(x, params)
            assert np.max(np.abs(m - m.T)) < 1e-12
            assert np.linalg.eigvalsh(m).min() > 0.0

    def test_quadratic_form_equals_kinetic_energy(self, params, rng):
        for _ in range(10):
            x = random_state(rng)
            m = mass_matrix(x, params)
            qd = x[[10, 11, 6, 7, 8, 9]]
            k, _ = model.energies(x, params)
            assert 0.5 * qd @ m @ qd == pytest.approx(k, rel=1e-12, abs=1e-12)


class TestBetaHeld:
    def test_hold_zeroes_beta_acceleration(self, params, rng):
        x = consistent_state(rng, params)
        x[9] = 0.0  # beta rate consistent with the hold
        sol = assemble_eom_beta_held(x, 0.0, params)
        assert abs(sol.qdd[5]) < 1e-12
        assert sol.lam.shape == (3,)

    def test_reduced_model_residuals_tiny(self, params, rng):
        from spherebot.circle import reduced_model_residuals

        for _ in range(10):
            x = consistent_state(rng, params, scale=0.8)
            x[9] = 0.0
            sol = assemble_eom_beta_held(x, 0.0, params)
            residuals, dominant = reduced_model_residuals(x, sol.qdd, params)
            assert np.max(np.abs(residuals) / np.maximum(dominant, 1e-30)) < 1e-8


class TestEnergyBalance:
    def test_power_identity_under_torques(self, params):
        # d(K+V)/dt equals T_s * dpsi + T_p * dbeta along the motion
        u = ControlInput(0.15, -0.1)
        x0 = simulate.steady_circle_state(math.radians(10.0), -1.0, params)
        traj = simulate.integrate(
            x0, lambda t, x: u, 5.0, params,
            simulate.IntegratorConfig(rtol=1e-10, atol=1e-12),
        )
        energy = simulate.energy_series(traj)
        power = u.ts * traj.column("dpsi") + u.tp * traj.column("dbeta")
        work = np.concatenate(
            [[0.0], np.cumsum(np.diff(traj.t) * 0.5 * (power[1:] + power[:-1]))]
        )
        drift = np.max(np.abs((energy - energy[0]) - work))
        assert drift < 1e-5 * max(1.0, np.max(np.abs(energy)))


class TestBackends:
    @pytest.mark.skipif(not COMPILED_AVAILABLE, reason="extension not built")
    def test_backends_agree(self, params, rng):
        backends = available_backends()
        kp = kernel_params(params)
        for _ in range(25):
            x = random_state(rng)
            outs = {}
            for name, kern in backends.items():
                out = np.empty(12)
                kern.derivative(x, 0.3, -0.2, kp, out)
                f = np.empty(6)
                gs = np.empty(6)
                gp = np.empty(6)
                kern.affine_eom(x, kp, f, gs, gp)
                qdd = np.empty(6)
                lam = np.empty(3)
                kern.solve_eom_beta_held(x, 0.1, kp, qdd, lam)
                outs[name] = np.concatenate([out, f, gs, gp, qdd, lam])
            diff = np.max(np.abs(outs["python"] - outs["compiled"]))
            assert diff < 1e-10

    @pytest.mark.skipif(not COMPILED_AVAILABLE, reason="extension not built")
    def test_compiled_backend_is_active(self):
        import spherebot

        assert spherebot.BACKEND_NAME == "compiled"
