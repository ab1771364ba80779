"""Wavefunction and potential handles shared by the catalog and transforms.

A wavefunction handle evaluates (value, d/dx, d2/dx2) at one time over a
vector of positions.  Time derivatives are taken by fourth-order central
differences with a small substep (uniform across all families -- the
handles are smooth in t through the envelope's dense output).  Third
x-derivatives are recovered by substituting the governing equation

    psi_xxx = d/dx (V psi - i psi_t) = V_x psi + V psi_x - i (psi_x)_t,

which keeps every handle at the (value, dx, dxx) contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GaussianBump", "Potential", "WaveSample", "Wavefunction"]

FD_T_STEP = 1e-4


@dataclass(frozen=True)
class WaveSample:
    """A wavefunction value with its first two x-derivatives at one point."""

    value: complex
    dx: complex
    dxx: complex


class Potential:
    """Real potential handle: value and x-derivative, vectorized over x."""

    def __call__(self, x, t):
        raise NotImplementedError

    def dx(self, x, t):
        raise NotImplementedError


class Wavefunction:
    """Base handle: subclasses implement ``sample``; derived quantities here.

    ``potential`` names the equation the function solves (None for plain
    test functions); it powers the third-derivative lifting.
    """

    potential: Potential | None = None

    def sample(self, x, t):
        """(value, dx, dxx) arrays at positions ``x`` (1-d) and time ``t``."""
        raise NotImplementedError

    def at(self, x, t) -> WaveSample:
        v, dx, dxx = self.sample(np.atleast_1d(np.asarray(x, float)), t)
        return WaveSample(complex(v[0]), complex(dx[0]), complex(dxx[0]))

    def values(self, x, t):
        return self.sample(x, t)[0]

    def dt(self, x, t, h=FD_T_STEP):
        """Time derivative of the value by 4th-order central differences."""
        f = lambda s: self.sample(x, s)[0]
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)

    def dt_dx(self, x, t, h=FD_T_STEP):
        """Time derivative of the first x-derivative."""
        f = lambda s: self.sample(x, s)[1]
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)

    def dxxx(self, x, t):
        if self.potential is None:
            raise NotImplementedError(
                "third derivative lifting needs the governing potential"
            )
        v, d1, _ = self.sample(x, t)
        V = self.potential(x, t)
        Vx = self.potential.dx(x, t)
        return Vx * v + V * d1 - 1j * self.dt_dx(x, t)


class GaussianBump(Wavefunction):
    """Smooth non-solution test function with analytic derivatives.

    psi = A exp(-(x - x0 - v t)^2 / (2 s^2)) * exp(i q x); handy for
    intertwining checks, where everything incl. d/dt is closed form.
    """

    def __init__(self, amplitude=2.0, x0=0.0, speed=0.3, width=1.5, q=0.7):
        self.amplitude = amplitude
        self.x0 = x0
        self.speed = speed
        self.width = width
        self.q = q
        self.potential = None

    def _parts(self, x, t):
        c = self.x0 + self.speed * t
        u = (x - c) / self.width**2
        base = self.amplitude * np.exp(-((x - c) ** 2) / (2 * self.width**2))
        phase = np.exp(1j * self.q * x)
        return base * phase, u

    def sample(self, x, t):
        x = np.asarray(x, float)
        f, u = self._parts(x, t)
        g = -u + 1j * self.q          # (log f)_x
        gp = -1.0 / self.width**2
        return f, f * g, f * (g * g + gp)

    def dt(self, x, t, h=FD_T_STEP):
        f, u = self._parts(np.asarray(x, float), t)
        return f * (u * self.speed)

    def dt_dx(self, x, t, h=FD_T_STEP):
        f, u = self._parts(np.asarray(x, float), t)
        g = -u + 1j * self.q
        # d/dt (f g) = f_t g + f g_t
        return f * u * self.speed * g + f * (self.speed / self.width**2)
