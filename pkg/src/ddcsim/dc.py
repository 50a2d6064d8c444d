"""Difference-of-convex building blocks: prox oracles and Moreau envelopes.

A DC objective is built from two terms, each exposed through a prox oracle:
an evaluation callable plus a proximal map. Smoothing a term with parameter
mu replaces it by its Moreau envelope; the smoothed DC function is the
difference of the two envelopes, and its gradient is assembled from the two
prox points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SmoothingOutOfRange(Exception):
    """mu must satisfy 0 < mu < 1/modulus for the prox to be well posed."""


class InnerSolverDiverged(Exception):
    """The iterative prox solver hit its cap before reaching tolerance."""


def _check_mu(mu: float, modulus: float) -> None:
    if mu <= 0.0:
        raise SmoothingOutOfRange("mu must be positive, got %g" % (mu,))
    if modulus > 0.0 and mu >= 1.0 / modulus:
        raise SmoothingOutOfRange(
            "mu=%g too large for weak-convexity modulus %g (need mu < %g)"
            % (mu, modulus, 1.0 / modulus)
        )


class ProxOracle:
    """One term of a DC decomposition.

    modulus is the weak-convexity constant: the term plus (modulus/2)||x||^2
    is convex. Proximal maps are unique for mu < 1/modulus. Oracles whose
    prox is closed form ignore the budget argument, since one step of any
    sensible inner method already lands on the exact answer.
    """

    modulus: float = 0.0

    def __call__(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def prox(self, y: np.ndarray, mu: float, budget=None) -> np.ndarray:
        raise NotImplementedError


class Zero(ProxOracle):
    """The zero function; its prox is the identity."""

    def __call__(self, x):
        return 0.0

    def prox(self, y, mu, budget=None):
        return np.array(y, dtype=float)


class ScaledQuadratic(ProxOracle):
    """(weight/2) ||x - center||^2.

    A negative weight gives a concave quadratic with known weak-convexity
    modulus -weight, handy for exercising the modulus plumbing.
    """

    def __init__(self, weight: float = 1.0, center=None):
        self.weight = float(weight)
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.modulus = max(0.0, -self.weight)

    def __call__(self, x):
        d = x if self.center is None else x - self.center
        return 0.5 * self.weight * float(np.dot(d, d))

    def prox(self, y, mu, budget=None):
        y = np.asarray(y, dtype=float)
        c = np.zeros_like(y) if self.center is None else self.center
        return (y + mu * self.weight * c) / (1.0 + mu * self.weight)


class L1Norm(ProxOracle):
    """weight * ||x||_1; prox is the soft threshold, exact zeros at ties."""

    def __init__(self, weight: float):
        if weight < 0.0:
            raise ValueError("weight must be nonnegative")
        self.weight = float(weight)

    def __call__(self, x):
        return self.weight * float(np.sum(np.abs(x)))

    def prox(self, y, mu, budget=None):
        y = np.asarray(y, dtype=float)
        return soft_threshold(y, mu * self.weight)


class L2Norm(ProxOracle):
    """weight * ||x||_2; prox shrinks the radius and maps the kink to zero."""

    def __init__(self, weight: float):
        if weight < 0.0:
            raise ValueError("weight must be nonnegative")
        self.weight = float(weight)

    def __call__(self, x):
        return self.weight * float(np.linalg.norm(x))

    def prox(self, y, mu, budget=None):
        y = np.asarray(y, dtype=float)
        norm = float(np.linalg.norm(y))
        thr = mu * self.weight
        if norm <= thr:
            return np.zeros_like(y)
        return (1.0 - thr / norm) * y


def soft_threshold(y: np.ndarray, thr: float) -> np.ndarray:
    return np.sign(y) * np.maximum(np.abs(y) - thr, 0.0)


class LeastSquaresL1(ProxOracle):
    """0.5 ||A x - b||^2 + rho ||x||_1 with an iterative prox.

    The prox objective is strongly convex; it is minimized by an accelerated
    proximal-gradient loop with step 1/(lambda_max(A^T A) + 1/mu). In
    tolerance mode the loop stops once ||x_{t+1} - z_t|| <= tol, where z_t is
    the extrapolated point and x_{t+1} its prox-gradient image; because the
    prox-gradient map is nonexpansive this bounds the fixed-point residual
    at the returned point by tol. In budgeted mode exactly `budget`
    iterations run with no tolerance exit, which models a solver that is cut
    off before convergence.
    """

    def __init__(self, A, b, rho: float, tol: float = 1e-10, max_iter: int = 20000):
        self.A = np.array(A, dtype=float)
        self.b = np.array(b, dtype=float)
        if self.A.ndim != 2 or self.b.ndim != 1 or self.A.shape[0] != self.b.shape[0]:
            raise ValueError("A must be (m, p) and b (m,)")
        if rho < 0.0:
            raise ValueError("rho must be nonnegative")
        self.rho = float(rho)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.gram_lmax = float(np.linalg.eigvalsh(self.A.T @ self.A)[-1])

    def __call__(self, x):
        resid = self.A @ x - self.b
        return 0.5 * float(np.dot(resid, resid)) + self.rho * float(np.sum(np.abs(x)))

    def prox(self, y, mu, budget=None):
        y = np.asarray(y, dtype=float)
        step = 1.0 / (self.gram_lmax + 1.0 / mu)
        thr = step * self.rho
        x = y.copy()
        x_prev = x
        t = 1.0
        limit = int(budget) if budget is not None else self.max_iter
        if limit < 1:
            raise ValueError("iteration budget must be >= 1")
        for _ in range(limit):
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            z = x + ((t - 1.0) / t_next) * (x - x_prev)
            grad = self.A.T @ (self.A @ z - self.b) + (z - y) / mu
            x_next = soft_threshold(z - step * grad, thr)
            x_prev, x, t = x, x_next, t_next
            if budget is None and float(np.linalg.norm(x_next - z)) <= self.tol:
                return x
        if budget is not None:
            return x
        raise InnerSolverDiverged(
            "prox did not reach tol=%g within %d iterations" % (self.tol, self.max_iter)
        )


def prox(phi: ProxOracle, y: np.ndarray, mu: float, budget=None) -> np.ndarray:
    """Minimizer of phi(x) + ||x - y||^2 / (2 mu)."""
    _check_mu(mu, phi.modulus)
    return phi.prox(np.asarray(y, dtype=float), float(mu), budget=budget)


def moreau_value(phi: ProxOracle, y: np.ndarray, mu: float, budget=None) -> float:
    """Envelope value: the attained minimum of the prox objective."""
    y = np.asarray(y, dtype=float)
    x = prox(phi, y, mu, budget=budget)
    d = x - y
    return float(phi(x)) + float(np.dot(d, d)) / (2.0 * mu)


def envelope_gradient(phi: ProxOracle, y: np.ndarray, mu: float, budget=None) -> np.ndarray:
    """Gradient of the envelope, (y - prox(y)) / mu."""
    y = np.asarray(y, dtype=float)
    return (y - prox(phi, y, mu, budget=budget)) / mu


@dataclass(frozen=True)
class DcFunction:
    """A difference f - g with f weakly convex and g convex (modulus 0)."""

    f: ProxOracle
    g: ProxOracle

    def __post_init__(self):
        if self.g.modulus != 0.0:
            raise ValueError("the subtracted term must be convex (modulus 0)")

    def __call__(self, x) -> float:
        return float(self.f(x)) - float(self.g(x))

    def smoothed(self, y, mu: float) -> float:
        return moreau_value(self.f, y, mu) - moreau_value(self.g, y, mu)


def smoothed_gradient(dc: DcFunction, y: np.ndarray, mu: float, budget=None) -> np.ndarray:
    """Gradient of the smoothed difference: (prox_g(y) - prox_f(y)) / mu."""
    y = np.asarray(y, dtype=float)
    xf = prox(dc.f, y, mu, budget=budget)
    xg = prox(dc.g, y, mu, budget=budget)
    return (xg - xf) / mu


@dataclass(frozen=True)
class SmoothingParams:
    """Gradient Lipschitz constants of the two envelopes and the difference."""

    mu: float
    m_f: float
    L_f: float
    L_g: float
    L_F: float


def lipschitz_constants(m_f: float, mu: float) -> SmoothingParams:
    """Smoothness constants for a given weak-convexity modulus and mu."""
    if m_f < 0.0:
        raise ValueError("modulus must be nonnegative")
    _check_mu(mu, m_f)
    L_f = (2.0 - mu * m_f) / (mu - mu * mu * m_f)
    L_g = 2.0 / mu
    return SmoothingParams(mu=mu, m_f=m_f, L_f=L_f, L_g=L_g, L_F=L_f)
