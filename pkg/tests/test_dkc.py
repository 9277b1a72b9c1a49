import math
import warnings

import numpy as np
import pytest

from logbec.dkc import (KickSpec, apply_finite_pulse, apply_thin_lens, collimation_frequency,
                        finite_pulse_collimation_frequency, kick_state, simulate_with_kick)
from logbec.errors import ConfigurationError, DomainError
from logbec.model import BECParams, spherical_state
from logbec.variational import IntegratorSettings, integrate


@pytest.fixture(scope="module")
def state_at_kick(default_params, default_state, seconds):
    return integrate(default_state, default_params, None, seconds(0.01)).final_state()


def test_far_field_frequency(units):
    # far-field state: sigma = sigma_dot * t_kick
    t_kick = units.to_internal(1e-2, "time")
    dt = units.to_internal(1e-5, "time")
    state = spherical_state(1.3 * t_kick, 1.3)
    w = units.from_internal(collimation_frequency(state, dt), "frequency")
    # sqrt(1 / (1e-2 s * 1e-5 s))
    assert w == pytest.approx(3162.2776601683795, rel=1e-12)


def test_zero_rate_rejected():
    with pytest.raises(DomainError):
        collimation_frequency(spherical_state(1.0, 0.0), 1e-3)
    with pytest.raises(DomainError):
        collimation_frequency(spherical_state(1.0, -0.1), 1e-3)


def test_thin_lens_collimates(state_at_kick):
    dt = 1e-2
    w = collimation_frequency(state_at_kick, dt)
    after = apply_thin_lens(state_at_kick, w, dt)
    assert after.sigma == state_at_kick.sigma
    assert after.sigma_dot[0] == pytest.approx(0.0, abs=1e-15)
    assert after.beta[0] == pytest.approx(0.0, abs=1e-15)
    assert after.t == state_at_kick.t + dt
    with pytest.raises(DomainError):
        collimation_frequency(after, dt)


def test_thin_lens_identity_at_zero_frequency(state_at_kick):
    after = apply_thin_lens(state_at_kick, 0.0, 0.1)
    assert (after.sigma, after.sigma_dot) == (state_at_kick.sigma, state_at_kick.sigma_dot)


@pytest.mark.parametrize("w, dt", [(0.3, 0.01), (2.0, 1e-3), (10.0, 1e-4)])
def test_thin_lens_impulse(state_at_kick, w, dt):
    after = apply_thin_lens(state_at_kick, w, dt)
    s, v = state_at_kick.sigma[0], state_at_kick.sigma_dot[0]
    assert after.sigma[0] == s
    assert after.sigma_dot[0] == pytest.approx(v - w * w * dt * s, rel=1e-15)


def test_finite_matches_thin_for_short_pulse(state_at_kick, default_params, seconds):
    dt = seconds(1e-5)
    w = collimation_frequency(state_at_kick, dt)
    thin = apply_thin_lens(state_at_kick, w, dt)
    finite = apply_finite_pulse(state_at_kick, w, dt, default_params)
    impulse = w * w * dt * state_at_kick.sigma[0]
    assert abs(finite.sigma_dot[0] - thin.sigma_dot[0]) / impulse < 1e-2


def test_impulse_invariance(state_at_kick, default_params, seconds):
    dt = seconds(1e-5)
    w = collimation_frequency(state_at_kick, dt)
    full = apply_finite_pulse(state_at_kick, w, dt, default_params)
    half = apply_finite_pulse(state_at_kick, w * math.sqrt(2.0), dt / 2, default_params)
    v0 = state_at_kick.sigma_dot[0]
    change_full, change_half = full.sigma_dot[0] - v0, half.sigma_dot[0] - v0
    assert change_half == pytest.approx(change_full, rel=1e-2)


def test_finite_zero_frequency_is_free_flight(state_at_kick, default_params):
    dt = 0.5
    pulse = apply_finite_pulse(state_at_kick, 0.0, dt, default_params)
    free = integrate(state_at_kick, default_params, None, state_at_kick.t + dt).final_state()
    assert pulse.sigma == pytest.approx(free.sigma, rel=1e-12)
    assert pulse.sigma_dot == pytest.approx(free.sigma_dot, rel=1e-12)


def test_finite_converges_to_thin_linearly(state_at_kick, default_params, seconds):
    impulse = collimation_frequency(state_at_kick, 1.0) ** 2  # omega^2 * dt
    dts = [seconds(4e-4), seconds(2e-4), seconds(1e-4), seconds(5e-5)]
    errs = []
    for dt in dts:
        w = math.sqrt(impulse / dt)
        thin = apply_thin_lens(state_at_kick, w, dt).sigma_dot[0]
        errs.append(abs(apply_finite_pulse(state_at_kick, w, dt, default_params).sigma_dot[0] - thin))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 1.7) & (ratios < 2.3))


def test_finite_collimation_is_exact(state_at_kick, default_params, seconds):
    dt = seconds(1e-5)
    w = finite_pulse_collimation_frequency(state_at_kick, dt, default_params)
    after = apply_finite_pulse(state_at_kick, w, dt, default_params)
    assert abs(after.sigma_dot[0]) < 1e-9 * state_at_kick.sigma_dot[0]
    assert w == pytest.approx(collimation_frequency(state_at_kick, dt), rel=1e-2)


def test_kick_spec_validation():
    with pytest.raises(ConfigurationError):
        KickSpec(-1.0, 0.1)
    with pytest.raises(ConfigurationError):
        KickSpec(1.0, 0.01, mode="lens")
    with pytest.warns(UserWarning):
        KickSpec(1.0, 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        KickSpec(1.0, 0.05)


@pytest.mark.parametrize("mode", ["thin_lens", "finite_pulse"])
def test_sequence_plateaus(mode, default_params, default_state, seconds):
    kick = KickSpec(seconds(0.01), seconds(1e-5), mode=mode)
    lin = default_params.replace(log_strength=0.0)
    traj = simulate_with_kick(default_state, lin, kick, seconds(1.0),
                              IntegratorSettings(sample_interval=seconds(0.01)))
    post = traj.metadata["post_kick_state"]
    assert abs(post.sigma_dot[0]) < 1e-12
    _, again = kick_state(default_state, lin, kick)
    assert again == post
    # collimated cloud expands far slower than the uncollimated one
    free = integrate(default_state, lin, None, seconds(1.0)).final_state()
    assert traj.sigma[-1, 0] < 0.2 * free.sigma[0]
    assert np.all(np.diff(traj.t) > 0)


def test_kick_outside_run(default_params, default_state):
    with pytest.raises(ConfigurationError):
        simulate_with_kick(default_state, default_params, KickSpec(5.0, 0.01), 4.0)
