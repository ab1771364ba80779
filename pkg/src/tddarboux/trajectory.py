"""Classical envelope of the time-varying oscillator.

The complex trajectory eps(t) solves

    eps'' + 4 omega(t)^2 eps = 0,

and every catalog family draws its time dependence from it.  The module
integrates the equivalent real first-order system (augmented with the
continuously unwrapped argument of eps, which the catalog phases need)
with an adaptive high-order Runge-Kutta method and caches dense output.

Time-factor conventions
-----------------------
The closed forms reuse one symbol for three different real factors, so
they are exposed as distinct operations and nothing downstream guesses:

    gamma_half_sum = Re(eps)            ("(eps + conj eps)/2")
    gamma_sum      = 2 Re(eps)          ("eps + conj eps")
    gamma_prod     = |eps|^2            ("eps conj(eps)")
    delta_of       = 2 Im(eps)          ("-i (eps - conj eps)")
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from .errors import ConfigError, DomainError, IntegrationError

__all__ = [
    "Envelope",
    "FrequencyProfile",
    "delta_of",
    "eval_envelope",
    "gamma_half_sum",
    "gamma_prod",
    "gamma_sum",
    "wronskian",
]

_PAD = 0.5          # integration lookahead beyond the requested time
_DEFAULT_RTOL = 1e-12


@dataclass(frozen=True)
class FrequencyProfile:
    """Real-valued frequency omega(t), evaluable on closed intervals."""

    kind: str
    params: tuple
    _omega: Callable = field(repr=False, compare=False)

    @classmethod
    def constant(cls, omega0: float) -> "FrequencyProfile":
        w = float(omega0)
        return cls("constant", (w,), lambda t: np.full_like(np.asarray(t, float), w))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "FrequencyProfile":
        c = tuple(float(x) for x in coeffs)
        if not c:
            raise ConfigError("polynomial profile needs at least one coefficient")

        def w(t, _c=c):
            t = np.asarray(t, float)
            out = np.zeros_like(t)
            for ck in _c[::-1]:      # ascending coefficients, Horner
                out = out * t + ck
            return out

        return cls("polynomial", c, w)

    @classmethod
    def sinusoidal(cls, a: float, b: float, c: float) -> "FrequencyProfile":
        a, b, c = float(a), float(b), float(c)
        return cls(
            "sinusoidal",
            (a, b, c),
            lambda t: a + b * np.cos(c * np.asarray(t, float)),
        )

    @classmethod
    def tabulated(cls, knots: Sequence[tuple], order: int = 3) -> "FrequencyProfile":
        ts = np.array([k[0] for k in knots], dtype=float)
        ws = np.array([k[1] for k in knots], dtype=float)
        if len(ts) < order + 1:
            raise ConfigError("tabulated profile needs at least order+1 knots")
        if np.any(np.diff(ts) <= 0):
            raise ConfigError("tabulated knots must be strictly increasing in t")
        spline = make_interp_spline(ts, ws, k=order)
        lo, hi = float(ts[0]), float(ts[-1])

        def w(t, _s=spline, _lo=lo, _hi=hi):
            t = np.asarray(t, float)
            if np.any(t < _lo) or np.any(t > _hi):
                raise DomainError(
                    f"tabulated profile defined on [{_lo}, {_hi}] only"
                )
            return _s(t)

        return cls("tabulated", (tuple(map(tuple, knots)), order), w)

    def __call__(self, t):
        return self._omega(t)


class Envelope:
    """Complex envelope eps(t) with cached dense output.

    The integrator advances lazily from ``t0`` in either direction and
    keeps the dense-output segments; evaluation after caching is
    read-only and safe for concurrent callers, while extension takes an
    internal lock.
    """

    def __init__(self, profile, t0, eps0, deps0, tolerance=_DEFAULT_RTOL):
        self.profile = profile
        self.t0 = float(t0)
        self.eps0 = complex(eps0)
        self.deps0 = complex(deps0)
        self.tolerance = float(tolerance)
        self._lock = threading.Lock()
        self._fwd = []   # dense segments, contiguous from t0 rightward
        self._bwd = []   # leftward
        self._fwd_end = self.t0
        self._bwd_end = self.t0
        self._y0 = np.array(
            [
                self.eps0.real,
                self.eps0.imag,
                self.deps0.real,
                self.deps0.imag,
                float(np.angle(self.eps0)),
            ]
        )

    # -- integration ------------------------------------------------------

    def _rhs(self, t, y):
        w = float(self.profile(t))
        re, im, dre, dim, _ = y
        mod2 = re * re + im * im
        dtheta = (re * dim - im * dre) / mod2 if mod2 > 0 else 0.0
        return [dre, dim, -4.0 * w * w * re, -4.0 * w * w * im, dtheta]

    def _segment(self, t_from, t_to, y_start):
        sol = solve_ivp(
            self._rhs,
            (t_from, t_to),
            y_start,
            method="DOP853",
            rtol=self.tolerance,
            atol=self.tolerance * 1e-2,
            dense_output=True,
        )
        if not sol.success:
            raise IntegrationError(
                f"envelope integration failed near t={sol.t[-1]}: {sol.message}"
            )
        return sol.sol

    def _extend(self, t):
        with self._lock:
            if t > self._fwd_end:
                t_target = t + _PAD
                y_start = self._lookup(self._fwd_end)
                self._fwd.append(self._segment(self._fwd_end, t_target, y_start))
                self._fwd_end = t_target
            if t < self._bwd_end:
                t_target = t - _PAD
                y_start = self._lookup(self._bwd_end)
                self._bwd.append(self._segment(self._bwd_end, t_target, y_start))
                self._bwd_end = t_target

    def _lookup(self, t):
        if t >= self.t0:
            if not self._fwd:
                return self._y0
            for seg in self._fwd:
                if t <= seg.t_max:
                    return seg(t)
            return self._fwd[-1](t)
        if not self._bwd:
            return self._y0
        for seg in self._bwd:
            if t >= seg.t_min:
                return seg(t)
        return self._bwd[-1](t)

    # -- evaluation --------------------------------------------------------

    def state(self, t):
        """(eps, deps, theta) at time t; theta is the unwrapped arg eps."""
        t = float(t)
        if t > self._fwd_end or t < self._bwd_end:
            self._extend(t)
        y = self._lookup(t)
        return complex(y[0], y[1]), complex(y[2], y[3]), float(y[4])

    def eval(self, t):
        eps, deps, _ = self.state(t)
        return eps, deps

    def theta(self, t):
        return self.state(t)[2]

    def wronskian(self, t):
        """eps conj(eps') - eps' conj(eps); conserved, purely imaginary."""
        eps, deps, _ = self.state(t)
        return eps * np.conj(deps) - deps * np.conj(eps)

    def gamma_half_sum(self, t):
        return self.state(t)[0].real

    def gamma_sum(self, t):
        return 2.0 * self.state(t)[0].real

    def gamma_prod(self, t):
        if abs(self.wronskian(self.t0)) == 0.0:
            raise DomainError(
                "gamma_prod requires a nonzero Wronskian (eps may vanish otherwise)"
            )
        eps = self.state(t)[0]
        return abs(eps) ** 2

    def delta_of(self, t):
        return 2.0 * self.state(t)[0].imag


def eval_envelope(env: Envelope, t):
    """(eps(t), eps'(t)) from the cached dense output."""
    return env.eval(t)


def wronskian(env: Envelope, t):
    return env.wronskian(t)


def gamma_half_sum(env: Envelope, t):
    return env.gamma_half_sum(t)


def gamma_sum(env: Envelope, t):
    return env.gamma_sum(t)


def gamma_prod(env: Envelope, t):
    return env.gamma_prod(t)


def delta_of(env: Envelope, t):
    return env.delta_of(t)
