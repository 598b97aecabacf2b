import math

import numpy as np
import pytest

from walkforge.evolve import (
    HomogeneousCoinParams,
    evolve_qw,
    evolve_qw_complex,
    evolve_rw_exact,
)
from walkforge.lattice import (
    InfeasibleTargetError,
    ProbabilitySequence,
    probability_from_wavefield,
)
from walkforge.synthesis import (
    mimic_quantum_walk,
    realify_quantum_walk,
    reconstruct_wavefield,
    synthesize_coins,
    synthesize_jumps,
)
from walkforge.targets import binomial_target, uniform_target

QUASI_SYMMETRIC = HomogeneousCoinParams(math.pi / 4, 3 * math.pi / 8, 0.0)


def test_uniform_wavefield_closed_form():
    # For the flat target psi+-^2(n, t) = (t +- n) / (2t(t+1)).
    w = reconstruct_wavefield(uniform_target(12))
    for t in (1, 5, 12):
        for k in range(t + 1):
            n = 2 * k - t
            assert w.plus_slices[t][k] ** 2 == pytest.approx(
                (t + n) / (2 * t * (t + 1)), abs=1e-15)
            assert w.minus_slices[t][k] ** 2 == pytest.approx(
                (t - n) / (2 * t * (t + 1)), abs=1e-15)


def test_binomial_wavefield_closed_form():
    # Homogeneous jump probability p implies psi+^2(n, t) = p rho(n-1, t-1).
    p = 0.37
    rho = binomial_target(p, 15)
    w = reconstruct_wavefield(rho)
    for t in (1, 8, 15):
        for k in range(1, t + 1):
            assert w.plus_slices[t][k] ** 2 == pytest.approx(
                p * rho.slices[t - 1][k - 1], rel=1e-10)


def test_wavefield_edge_identity():
    # The right cone edge is pure plus-component: psi+^2(t, t) = rho(t, t).
    rho = binomial_target(0.6, 20)
    w = reconstruct_wavefield(rho)
    for t in range(1, 21):
        assert w.plus_slices[t][t] ** 2 == pytest.approx(
            rho.slices[t][t], rel=1e-12)
        assert w.minus_slices[t][t] == 0.0
        assert w.plus_slices[t][0] == 0.0


def test_wavefield_one_step_conservation():
    # psi+^2(n+1, t+1) + psi-^2(n-1, t+1) = rho(n, t)
    rho = uniform_target(25)
    w = reconstruct_wavefield(rho)
    for t in range(25):
        wp = w.plus_slices[t + 1] ** 2
        wm = w.minus_slices[t + 1] ** 2
        assert np.allclose(wp[1:] + wm[:-1], rho.slices[t], atol=1e-14)


def test_infeasible_target_rejected_during_reconstruction():
    rho = ProbabilitySequence([[1.0], [0.5, 0.5], [0.05, 0.05, 0.9]])
    with pytest.raises(InfeasibleTargetError) as err:
        reconstruct_wavefield(rho)
    assert err.value.t == 2


def test_uniform_coin_examples():
    rho = uniform_target(6)
    coins = synthesize_coins(rho, reconstruct_wavefield(rho))
    assert coins.value(0, 0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert coins.value(0, 2) == pytest.approx(math.pi / 2, abs=1e-12)


def test_uniform_round_trip():
    rho = uniform_target(50)
    coins = synthesize_coins(rho, reconstruct_wavefield(rho))
    back = probability_from_wavefield(evolve_qw(coins))
    worst = max(float(np.max(np.abs(back.slices[t] - rho.slices[t])))
                for t in range(51))
    assert worst < 1e-12


@pytest.mark.parametrize("p", [0.3, 0.5, 0.71])
def test_binomial_round_trip(p):
    rho = binomial_target(p, 50)
    coins = synthesize_coins(rho, reconstruct_wavefield(rho))
    back = probability_from_wavefield(evolve_qw(coins))
    worst = max(float(np.max(np.abs(back.slices[t] - rho.slices[t])))
                for t in range(51))
    assert worst < 1e-12


def test_uniform_jump_closed_form():
    # Flat target jumps: p(n, t) = (1 + n / (t + 2)) / 2.
    rho = uniform_target(30)
    jumps = synthesize_jumps(rho)
    for t in (0, 4, 17, 29):
        for k in range(t + 1):
            n = 2 * k - t
            assert jumps.value(n, t) == pytest.approx(
                0.5 * (1 + n / (t + 2)), abs=1e-13)


def test_binomial_jump_is_constant():
    p = 0.3
    jumps = synthesize_jumps(binomial_target(p, 40))
    for t in (0, 13, 39):
        defined = jumps.defined_slices[t]
        assert defined.all()
        assert np.allclose(jumps.value_slices[t], p, atol=1e-12)


def test_jump_round_trip():
    rho = uniform_target(40)
    back = evolve_rw_exact(synthesize_jumps(rho))
    for t in range(41):
        assert np.allclose(back.slices[t], rho.slices[t], atol=1e-13)


def test_mimic_initial_step_quasi_symmetric():
    w = evolve_qw_complex(QUASI_SYMMETRIC, 1)
    jumps = mimic_quantum_walk(w)
    assert jumps.value(0, 0) == pytest.approx((2 + math.sqrt(2)) / 4,
                                              abs=1e-14)


def test_mimic_initial_step_plus_start():
    w = evolve_qw_complex(
        HomogeneousCoinParams(math.pi / 4, 0.0, 0.0), 1)
    jumps = mimic_quantum_walk(w)
    assert jumps.value(0, 0) == pytest.approx(0.5, abs=1e-14)


def test_mimic_reproduces_quantum_statistics():
    w = evolve_qw_complex(QUASI_SYMMETRIC, 25)
    rho_qw = probability_from_wavefield(w)
    rho_rw = evolve_rw_exact(mimic_quantum_walk(w))
    for t in range(26):
        assert np.allclose(rho_rw.slices[t], rho_qw.slices[t], atol=1e-13)


def test_realify_preserves_statistics():
    w = evolve_qw_complex(QUASI_SYMMETRIC, 20)
    real_field, coins = realify_quantum_walk(w)
    rho_qw = probability_from_wavefield(w)
    init = (real_field.plus(0, 0), real_field.minus(0, 0))
    back = probability_from_wavefield(evolve_qw(coins, init=init))
    for t in range(21):
        assert np.allclose(back.slices[t], rho_qw.slices[t], atol=1e-13)


def test_realify_components_are_moduli():
    w = evolve_qw_complex(QUASI_SYMMETRIC, 8)
    real_field, _ = realify_quantum_walk(w)
    for t in range(9):
        assert np.allclose(real_field.plus_slices[t],
                           np.abs(w.plus_slices[t]), atol=1e-15)


def test_randomised_closure():
    # Evolve a random real walk, extract its distribution, re-synthesize,
    # and evolve again: the loop must close to rounding error.
    rng = np.random.default_rng(2026)
    horizon = 8
    worst = 0.0
    for _ in range(100):
        angles = [rng.uniform(0.3, math.pi - 0.3, size=t + 1)
                  for t in range(horizon)]
        from walkforge.lattice import CoinSchedule
        schedule = CoinSchedule(angles)
        rho = probability_from_wavefield(evolve_qw(schedule))
        coins = synthesize_coins(rho, reconstruct_wavefield(rho))
        back = probability_from_wavefield(evolve_qw(coins))
        for t in range(horizon + 1):
            worst = max(worst, float(np.max(
                np.abs(back.slices[t] - rho.slices[t]))))
    assert worst < 1e-12
