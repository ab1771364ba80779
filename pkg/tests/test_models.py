import math

import numpy as np
import pytest
from scipy.integrate import quad

from tddarboux import models
from tddarboux.errors import CausticError, DomainError, NormalizationError
from tddarboux.models import (
    ModelSpec,
    Osc1,
    Osc2,
    Osc3Discrete,
    OscErf,
    SingBroken,
    SingExact,
    allowed_p,
    closed_form_potential,
    evaluate_basis,
    evaluate_u,
    exact_branch_regular,
    k_from_g,
    make_basis_handle,
    make_u_handle,
)
from tddarboux.trajectory import Envelope, FrequencyProfile


@pytest.fixture(scope="module")
def env_const():
    # canonical normalization: W = -i/2
    return Envelope(FrequencyProfile.constant(0.5), 0.0, 0.5, 0.5j)


@pytest.fixture(scope="module")
def env_sin():
    return Envelope(FrequencyProfile.sinusoidal(0.45, 0.05, 2.0), 0.0, 0.5, 0.5j)


def residual_gate(handle, potential, xs, ts):
    h = 1e-4
    worst = 0.0
    for t in ts:
        st = [handle.sample(xs, t + k * h)[0] for k in (-2, -1, 1, 2)]
        dt = (st[0] - 8 * st[1] + 8 * st[2] - st[3]) / (12 * h)
        v, _, dxx = handle.sample(xs, t)
        r = np.abs(1j * dt + dxx - potential(xs, t) * v)
        worst = max(worst, float(np.max(r / (1 + np.abs(v)))))
    return worst


# --------------------------------------------------------------------------
# scalar helpers
# --------------------------------------------------------------------------

def test_k_from_g_values():
    assert k_from_g(0.0) == pytest.approx(0.75)
    assert k_from_g(2.0) == pytest.approx(1.25)
    assert k_from_g(0.75) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        k_from_g(-1.0)


def test_allowed_p_rule():
    k = 1.25
    assert allowed_p(0, k) is True       # 0 < 2k-1 = 1.5
    assert allowed_p(1, k) is False      # below floor(2k) = 2, odd
    assert allowed_p(2, k) is True       # tail p >= floor(2k)
    k = 0.75
    assert all(allowed_p(p, k) for p in range(8))
    k = 1.75
    assert allowed_p(0, k) and allowed_p(2, k) and allowed_p(3, k)
    assert not allowed_p(1, k)


def test_exact_regularity_diagnostic_vs_rule():
    # k = 5/4 (g=2): the rule admits p=2 but the Laguerre factor has a
    # positive-axis node; the diagnostic reports the truth.
    assert exact_branch_regular(2.0, 0) is True
    assert exact_branch_regular(2.0, 2) is False
    assert allowed_p(2, k_from_g(2.0)) is True  # the documented mismatch
    # k = 7/4 (g=6): rule and regularity agree on 0,1,2,3
    for p in (0, 2, 3):
        assert exact_branch_regular(6.0, p) is True
        assert allowed_p(p, k_from_g(6.0)) is True
    assert exact_branch_regular(6.0, 1) is False
    assert allowed_p(1, k_from_g(6.0)) is False


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def test_validation_rejects_bad_params(env_const):
    with pytest.raises(DomainError):
        ModelSpec(Osc1(0.4, 0.0), env_const)
    with pytest.raises(DomainError):
        ModelSpec(OscErf(0.5), env_const)
    with pytest.raises(DomainError):
        ModelSpec(SingBroken(-1.0, 0), env_const)
    with pytest.raises(DomainError):
        ModelSpec(SingExact(2.0, 1), env_const)  # p=1 not allowed at k=5/4


def test_validation_rejects_noncanonical_envelope():
    env = Envelope(FrequencyProfile.constant(1.0), 0.0, 1.0, 2.0j)  # W = -4i
    with pytest.raises(NormalizationError):
        ModelSpec(Osc3Discrete(0), env)
    with pytest.raises(NormalizationError):
        ModelSpec(OscErf(2.0), env)


def test_validation_rejects_zero_wronskian(env_const):
    env = Envelope(FrequencyProfile.constant(0.5), 0.0, 1.0, 0.5)  # real data
    with pytest.raises(NormalizationError):
        ModelSpec(Osc3Discrete(0), env)


# --------------------------------------------------------------------------
# the reading gates
# --------------------------------------------------------------------------

def test_osc1_delta_resolution(env_const):
    spec = ModelSpec(Osc1(0.4, 2.0), env_const)
    res = spec.resolution()
    assert res["adopted"]["delta_scale"] == 4.0
    assert res["adopted"]["residual"] < 1e-5
    others = [r for r in res["candidates"] if r["delta_scale"] != 4.0]
    assert all(r["residual"] > 0.01 for r in others)


def test_osc2_reading_resolution(env_const):
    spec = ModelSpec(Osc2(-1.0 + 0.0j), env_const)
    res = spec.resolution()
    adopted = res["adopted"]
    assert adopted["gamma_scale"] == 1.0
    assert adopted["delta_exponent"] == 2
    assert adopted["z_prefactor"] == pytest.approx(2.0 ** (-1.0 / 3.0))
    assert adopted["residual"] < 1e-5
    assert len(res["candidates"]) == 8


def test_resolution_fails_loudly_for_bad_normalization():
    env = Envelope(FrequencyProfile.constant(1.0), 0.0, 1.0, 4.0j)  # W = -8i
    # window short of the Re(eps) caustic so the gate itself is what fails
    spec = ModelSpec(Osc1(0.0, 2.0), env, t_window=(0.0, 0.5))
    with pytest.raises(NormalizationError):
        spec.resolution()


# --------------------------------------------------------------------------
# residual gate per family (the defining property of a solution)
# --------------------------------------------------------------------------

@pytest.mark.parametrize(
    "family",
    [
        Osc1(0.4, 2.0),
        Osc2(-1.0 + 0.0j),
        Osc3Discrete(0),
        Osc3Discrete(1),
        Osc3Discrete(2),
        OscErf(1.5),
        OscErf(-2.0),
        SingBroken(2.0, 0),
        SingBroken(2.0, 1),
        SingExact(6.0, 0),
    ],
    ids=lambda f: f"{f.name}-{getattr(f, 'n', getattr(f, 'p', ''))}",
)
def test_family_residual_gate(family, env_sin):
    spec = ModelSpec(family, env_sin)
    handle = make_u_handle(spec)
    half_line = isinstance(family, (SingBroken, SingExact))
    xs = np.linspace(0.01, 20.0, 301) if half_line else np.linspace(-15.0, 15.0, 301)
    lo, hi = spec.t_window
    ts = np.linspace(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo), 7)
    assert residual_gate(handle, handle.potential, xs, ts) < 1e-5


def test_residual_negative_control(env_sin):
    spec = ModelSpec(Osc3Discrete(0), env_sin)
    base = make_u_handle(spec)

    def spoiled_eval(x, t):
        # e^x * u with honest product-rule derivatives: not a solution
        v, d1, d2 = base.sample(x, t)
        e = np.exp(x)
        return e * v, e * (v + d1), e * (v + 2 * d1 + d2)

    spoiled = models._FnWavefunction(spoiled_eval, base.potential)
    xs = np.linspace(-5, 5, 101)
    assert residual_gate(spoiled, base.potential, xs, [0.3, 0.9]) > 0.1


# --------------------------------------------------------------------------
# pointwise values and shapes
# --------------------------------------------------------------------------

def test_osc1_center_value(env_const):
    # mu = 0: u(0,t) = gamma^{-1/2} exp(i nu^2 delta / (64 gamma))
    spec = ModelSpec(Osc1(0.0, 2.0, delta_scale=4.0), env_const)
    t = 0.7
    eps, _ = env_const.eval(t)
    gamma = eps.real
    delta = 4.0 * eps.imag
    expect = gamma**-0.5 * np.exp(1j * 4.0 * delta / (64.0 * gamma))
    got = evaluate_u(spec, 0.0, t)
    assert got.value == pytest.approx(expect, rel=1e-12)


def test_osc3_stationary_gaussian_modulus(env_const):
    # constant frequency: gamma_prod is constant, |u_0| is a frozen Gaussian
    spec = ModelSpec(Osc3Discrete(0), env_const)
    gamma = env_const.gamma_prod(0.3)
    xs = np.linspace(-4, 4, 41)
    for t in (0.3, 0.9, 1.7):
        v = make_u_handle(spec).values(xs, t)
        ref = gamma**-0.25 * np.exp(-xs * xs / (16.0 * gamma))
        assert np.allclose(np.abs(v), ref, rtol=1e-10)


def test_sing_broken_p0_form_and_nodelessness(env_sin):
    spec = ModelSpec(SingBroken(2.0, 0), env_sin)
    xs = np.linspace(1e-3, 40.0, 10_000)
    for t in (0.2, 1.1, 1.9):
        v = make_u_handle(spec).values(xs, t)
        assert np.all(np.abs(v) > 0)
        assert np.all(np.isfinite(np.abs(v)))


def test_erf_family_nodeless(env_sin):
    for C in (2.0, 1.5, -2.0):
        spec = ModelSpec(OscErf(C), env_sin)
        xs = np.linspace(-25, 25, 10_000)
        v = make_u_handle(spec).values(xs, 1.0)
        assert np.all(np.abs(v) > 0)


def test_basis_vanishes_at_origin(env_const):
    spec = ModelSpec(SingBroken(2.0, 0), env_const)
    for n in (0, 1, 2):
        s = evaluate_basis(spec, n, 1e-6, 0.4)
        assert abs(s.value) < 1e-6


def test_un_gaussian_decay(env_const):
    spec = ModelSpec(Osc3Discrete(2), env_const)
    gamma = env_const.gamma_prod(0.5)
    x_far = 10.0 * math.sqrt(gamma)
    s = evaluate_u(spec, x_far, 0.5)
    poly_bound = 1.0 + (x_far / (2 * math.sqrt(gamma))) ** 2
    assert abs(s.value) <= 10.0 * poly_bound * math.exp(-x_far**2 / (16 * gamma))


def test_basis_orthogonality_quadrature(env_const):
    spec = ModelSpec(Osc3Discrete(0), env_const)
    h0 = make_basis_handle(spec, 0)
    h1 = make_basis_handle(spec, 1)
    t = 0.6

    def integrand(x):
        a = h0.at(x, t).value
        b = h1.at(x, t).value
        return (a * np.conj(b)).real

    val, _ = quad(integrand, -20, 20, limit=200)
    norm0 = quad(lambda x: abs(h0.at(x, t).value) ** 2, -20, 20, limit=200)[0]
    assert abs(val) < 1e-8 * norm0


def test_wavesample_derivative_consistency(env_sin):
    # analytic dx, dxx match finite differences of the value
    hx = 1e-4
    for family, x0 in [
        (Osc1(0.4, 2.0), 0.7),
        (Osc2(-1.0 + 0.3j), 1.1),
        (Osc3Discrete(2), -1.3),
        (OscErf(1.5), 0.4),
        (SingBroken(2.0, 1), 2.2),
        (SingExact(6.0, 0), 1.6),
    ]:
        spec = ModelSpec(family, env_sin)
        handle = make_u_handle(spec)
        t = 0.5 * sum(spec.t_window)
        xs = np.array([x0 - 2 * hx, x0 - hx, x0, x0 + hx, x0 + 2 * hx])
        v, d1, d2 = handle.sample(xs, t)
        fd1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * hx)
        fd2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * hx * hx)
        scale = 1.0 + abs(v[2])
        assert abs(d1[2] - fd1) / scale < 1e-6
        assert abs(d2[2] - fd2) / scale < 1e-4


# --------------------------------------------------------------------------
# caustics and domains
# --------------------------------------------------------------------------

def test_osc1_caustic_refused(env_const):
    spec = ModelSpec(Osc1(0.4, 2.0, delta_scale=4.0), env_const, t_window=(0.0, 1.2))
    with pytest.raises(CausticError):
        evaluate_u(spec, 0.5, math.pi / 1.0)  # Re(eps) = cos(t)/2 < 0 at t=pi


def test_osc2_caustic_refused(env_const):
    spec = ModelSpec(
        Osc2(-1.0 + 0.0j, reading=(1.0, 2, 2.0 ** (-1 / 3))), env_const
    )
    with pytest.raises(CausticError):
        evaluate_u(spec, 0.5, 0.0)  # 2 Im(eps) = sin(t) vanishes at t=0


def test_singular_domain_guard(env_const):
    spec = ModelSpec(SingBroken(2.0, 0), env_const)
    with pytest.raises(DomainError):
        evaluate_u(spec, -1.0, 0.5)


# --------------------------------------------------------------------------
# printed potentials
# --------------------------------------------------------------------------

def test_erf_potential_time_independent_at_constant_frequency(env_const):
    spec = ModelSpec(OscErf(1.5), env_const)
    xs = np.linspace(-6, 6, 61)
    v1 = closed_form_potential(spec, xs, 0.3)
    v2 = closed_form_potential(spec, xs, 1.4)
    assert np.allclose(v1, v2, atol=1e-9)


def test_osc1_well_depth_small_nu(env_const):
    # at the cosh minimum the well depth is nu^2/(32 gamma^2)
    nu = 0.1
    spec = ModelSpec(Osc1(0.0, nu, delta_scale=4.0), env_const)
    t = 0.4
    eps, _ = env_const.eval(t)
    gamma = eps.real
    v_min = closed_form_potential(spec, 0.0, t)
    w = 0.5
    assert v_min == pytest.approx(-(nu**2) / (32 * gamma**2), rel=1e-10)


def test_osc3_potential_bracket_n0(env_const):
    # J_0 = 1 gives bracket -1, a constant well shift of 1/(2 gamma)
    spec = ModelSpec(Osc3Discrete(0), env_const)
    t = 0.8
    gamma = env_const.gamma_prod(t)
    xs = np.linspace(-3, 3, 31)
    v = closed_form_potential(spec, xs, t)
    w = 0.5
    assert np.allclose(v, w * w * xs**2 + 1.0 / (2 * gamma), rtol=1e-12)


def test_osc2_has_no_printed_potential(env_const):
    spec = ModelSpec(Osc2(-1.0 + 0.0j), env_const)
    with pytest.raises(DomainError):
        closed_form_potential(spec, 0.5, 0.9)


def test_singular_potential_origin_behavior(env_const):
    # near the origin V1 - V0 approaches (4k-1)/x^2 (broken branch)
    spec = ModelSpec(SingBroken(2.0, 0), env_const)
    k = k_from_g(2.0)
    t = 0.5
    gamma = env_const.gamma_prod(t)
    for x in (1e-3, 2e-3):
        v1 = closed_form_potential(spec, x, t)
        v0 = 0.25 * x * x + 2.0 / (x * x)
        assert (v1 - v0) * x * x == pytest.approx(4 * k - 1, rel=1e-4)


# --------------------------------------------------------------------------
# pairing classification scans
# --------------------------------------------------------------------------

def test_exact_branch_inverse_normalizable(env_const):
    spec = ModelSpec(SingExact(6.0, 0), env_const)
    handle = make_u_handle(spec)
    t = 0.7

    def inv_sq(x):
        return abs(handle.at(x, t).value) ** -2

    # Cauchy criterion: the tail and origin contributions converge
    parts = [quad(inv_sq, a, b, limit=200)[0] for a, b in [(1e-4, 1e-2), (1e-2, 1.0), (1.0, 8.0), (8.0, 16.0), (16.0, 24.0)]]
    assert parts[-1] < 1e-12 * sum(parts)
    # and 1/u vanishes at the origin
    assert inv_sq(1e-5) < 1e-12


def test_broken_branch_nothing_normalizable(env_const):
    spec = ModelSpec(SingBroken(2.0, 0), env_const)
    handle = make_u_handle(spec)
    t = 0.7
    gamma = env_const.gamma_prod(t)

    # |u|^2 ~ e^{x^2/(8 gamma)}: successive log-integrals grow without bound
    xs = np.linspace(1.0, 40.0, 2000)
    logs = 2.0 * np.log(np.abs(handle.values(xs, t)))
    windows = [logs[(xs >= a) & (xs < a + 10)].max() for a in (0.0, 10.0, 20.0, 30.0)]
    assert all(b - a > 5.0 for a, b in zip(windows, windows[1:]))

    # |1/u|^2 ~ x^{1-4k} near 0: the origin integral diverges as the cutoff
    # shrinks
    def inv_sq(x):
        return abs(handle.at(x, t).value) ** -2

    vals = [quad(inv_sq, a, 2 * a, limit=100)[0] for a in (1e-2, 1e-3, 1e-4)]
    assert vals[1] > 10.0 * vals[0] and vals[2] > 10.0 * vals[1]
