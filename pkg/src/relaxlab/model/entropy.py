"""Entropy-flux pairs: Lax, Kruzhkov, boundary (Otto) and their smoothings."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from relaxlab.model.flux import FluxModel

LAX = "lax"
KRUZHKOV = "kruzhkov"
BOUNDARY = "boundary"

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def gauss_integral(h, a, b, panels: int = 4):
    """Elementwise int_a^b h(w) dw by composite 16-point Gauss-Legendre."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    width = (b - a) / panels
    total = np.zeros(a.shape)
    for p in range(panels):
        lo = a + p * width
        mid = lo + 0.5 * width
        half = 0.5 * width
        w = mid[..., None] + half[..., None] * _GL_NODES
        total += half * np.sum(_GL_WEIGHTS * h(w), axis=-1)
    return total


# smoothing kernel g(v) = v^3/4 - v^4/16 on [0, 2], even extension:
# g(0) = g'(0) = g''(0) = 0, g(2) = g'(2) = 1, g''(2) = 0, g'' = 3v(2-v)/4 >= 0
def g_smooth(v):
    a = np.abs(np.asarray(v, dtype=float))
    return a**3 / 4.0 - a**4 / 16.0


def dg_smooth(v):
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    return np.sign(v) * (3.0 * a**2 / 4.0 - a**3 / 4.0)


def d2g_smooth(v):
    a = np.abs(np.asarray(v, dtype=float))
    return 0.75 * a * (2.0 - a)


G_SUP = 1.0  # sup of g on [-2, 2]


@dataclass(frozen=True)
class EntropyPair:
    """An entropy f (or F(., k)) together with its flux q (or Q(., k)).

    For ``kind == "boundary"`` the callables take ``(u, k)``; ``k`` holds the
    default second argument so the pair can be used wherever a Lax pair is
    expected via :meth:`at`.
    """

    kind: str
    name: str
    f: Callable
    df: Callable
    q: Callable
    k: float | None = None
    eps: float | None = None
    smooth: bool = True

    def at(self, k: float | None = None) -> EntropyPair:
        """Freeze the second argument of a boundary pair, giving a Lax pair."""
        if self.kind != BOUNDARY:
            return self
        k = self.k if k is None else k
        F, dF, Q = self.f, self.df, self.q
        return EntropyPair(
            LAX,
            f"{self.name}(k={k:g})",
            lambda u: F(u, k),
            lambda u: dF(u, k),
            lambda u: Q(u, k),
            k=k,
            eps=self.eps,
            smooth=self.smooth,
        )


def kruzhkov_flux(flux: FluxModel, u, k):
    """sgn(u - k) [J(u) - J(k)]; zero when u == k."""
    u = np.asarray(u, dtype=float)
    return np.sign(u - k) * (flux.J(u) - flux.J(np.asarray(k, dtype=float)))


def kruzhkov_pair(flux: FluxModel, k: float) -> EntropyPair:
    return EntropyPair(
        KRUZHKOV,
        f"kruzhkov(k={k:g})",
        lambda u: np.abs(np.asarray(u, dtype=float) - k),
        lambda u: np.sign(np.asarray(u, dtype=float) - k),
        lambda u: kruzhkov_flux(flux, u, k),
        k=k,
        smooth=False,
    )


def lax_pair(flux: FluxModel, f, df, name: str = "lax", origin: float = 0.0) -> EntropyPair:
    """Lax pair with q(u) = int_origin^u f'(w) J'(w) dw by Gauss-Legendre quadrature."""

    def q(u):
        u = np.asarray(u, dtype=float)
        return gauss_integral(lambda w: df(w) * flux.dJ(w), np.full_like(u, origin), u)

    return EntropyPair(LAX, name, f, df, q)


def linear_pair(flux: FluxModel) -> EntropyPair:
    return EntropyPair(
        LAX, "linear", lambda u: np.asarray(u, dtype=float), lambda u: np.ones_like(np.asarray(u, dtype=float)), flux.J
    )


def quadratic_pair(flux: FluxModel) -> EntropyPair:
    return lax_pair(flux, lambda u: np.asarray(u, dtype=float) ** 2, lambda u: 2.0 * np.asarray(u, dtype=float), "quadratic")


def one_sided_pairs(flux: FluxModel, delta: float) -> tuple[EntropyPair, EntropyPair]:
    """The pairs ``1{u<=d}|u-d|`` and ``1{u>=d}|u-d|`` with their fluxes."""
    Jd = float(flux.J(np.asarray(delta)))

    def f_minus(u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= delta, delta - u, 0.0)

    def q_minus(u):
        u = np.asarray(u, dtype=float)
        return np.where(u <= delta, Jd - flux.J(u), 0.0)

    def f_plus(u):
        u = np.asarray(u, dtype=float)
        return np.where(u >= delta, u - delta, 0.0)

    def q_plus(u):
        u = np.asarray(u, dtype=float)
        return np.where(u >= delta, flux.J(u) - Jd, 0.0)

    minus = EntropyPair(
        LAX, f"one_sided_minus(d={delta:g})", f_minus,
        lambda u: np.where(np.asarray(u) <= delta, -1.0, 0.0), q_minus, k=delta, smooth=False,
    )
    plus = EntropyPair(
        LAX, f"one_sided_plus(d={delta:g})", f_plus,
        lambda u: np.where(np.asarray(u) >= delta, 1.0, 0.0), q_plus, k=delta, smooth=False,
    )
    return minus, plus


def regularized_boundary_pair(flux: FluxModel, k: float, eps: float) -> EntropyPair:
    """Smoothed Kruzhkov pair (F_eps, Q_eps).

    F_eps(u, k) = |u-k| - eps outside |u-k| <= 2 eps and eps * g((u-k)/eps)
    inside; Q_eps(u, k) = int_k^u dF_eps/du(w, k) J'(w) dw. The outer part of
    Q_eps is exact, the inner part uses Gauss-Legendre quadrature.
    """
    if not eps > 0:
        raise ValueError(f"smoothing width must be positive, got {eps}")

    def F(u, kk):
        d = np.asarray(u, dtype=float) - kk
        return np.where(np.abs(d) > 2 * eps, np.abs(d) - eps, eps * g_smooth(d / eps))

    def dF(u, kk):
        d = np.asarray(u, dtype=float) - kk
        return np.where(np.abs(d) > 2 * eps, np.sign(d), dg_smooth(d / eps))

    def Q(u, kk):
        u, kk = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(kk, dtype=float))
        d = u - kk
        inner_end = kk + np.clip(d, -2 * eps, 2 * eps)
        kcol = kk[..., None]
        inner = gauss_integral(lambda w: dg_smooth((w - kcol) / eps) * flux.dJ(w), kk, inner_end, panels=2)
        outer = np.sign(d) * (flux.J(u) - flux.J(inner_end))
        return inner + np.where(np.abs(d) > 2 * eps, outer, 0.0)

    return EntropyPair(BOUNDARY, f"smoothed_kruzhkov(eps={eps:g})", F, dF, Q, k=k, eps=eps)


def quadratic_boundary_pair(flux: FluxModel, k: float = 0.0) -> EntropyPair:
    """Otto's quadratic boundary pair F = (u-k)^2, Q = int_k^u 2(w-k) J'(w) dw."""

    def F(u, kk):
        return (np.asarray(u, dtype=float) - kk) ** 2

    def dF(u, kk):
        return 2.0 * (np.asarray(u, dtype=float) - kk)

    def Q(u, kk):
        u, kk = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(kk, dtype=float))
        kcol = kk[..., None]
        return gauss_integral(lambda w: 2.0 * (w - kcol) * flux.dJ(w), kk, u)

    return EntropyPair(BOUNDARY, "quadratic_boundary", F, dF, Q, k=k)


def kruzhkov_decomposition(nodes, values):
    """Write the piecewise-linear interpolant of convex data as a + b u + sum w_j |u - k_j|.

    Returns ``(a, b, kinks, weights)``; the weights are half the slope jumps
    and are nonnegative exactly when the data are convex.
    """
    x = np.asarray(nodes, dtype=float)
    y = np.asarray(values, dtype=float)
    slopes = np.diff(y) / np.diff(x)
    kinks = x[1:-1]
    weights = 0.5 * np.diff(slopes)
    # beyond the last node the interpolant continues with slope b + sum w_j
    b = slopes[-1] - weights.sum()
    a = y[0] - b * x[0] - np.sum(weights * np.abs(x[0] - kinks))
    return a, b, kinks, weights
