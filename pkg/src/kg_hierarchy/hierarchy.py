"""Factorization machinery: superpotential ansatz, level recurrence, Riccati checks.

The ansatz superpotential W(x) = -nu * k/(1 - q*k) + mu (k = exp(-lambda_eff*x))
factorizes the effective Hamiltonian. Matching the k^2/(1-qk)^2 coefficient gives
the quadratic nu1*(nu1 - q*lambda_eff) = Gamma1; iterating the partner
construction shifts nu by q*lambda_eff per level, so

    rho_n = nu1 + n*q*lambda_eff,
    mu_n  = (Gamma1 + q*Gamma2(E) - rho_n^2) / (2*q*rho_n),
    eps_n = -mu_n^2.

All quantities are stored complex on every branch; Hermitian inputs must produce
imaginary parts at machine-zero level, which is checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import DegenerateRootError, ZeroNuError
from .grid import GridFunction
from .potential import Branch, PotentialParams, gammas, screened_ratio

_IMAG_TOL = 1e-13
_MIN_LADDER_POINTS = 20


@dataclass(frozen=True)
class HierarchyLevel:
    """Per-level algebraic data of the factorization chain."""

    n: int
    nu: complex
    mu: complex

    @property
    def epsilon(self) -> complex:
        # Defined as -mu^2; keeping it derived makes the coupling identity exact.
        return -(self.mu * self.mu)


@dataclass(frozen=True)
class Superpotential:
    """Evaluable ansatz superpotential W(x) = -nu*k/(1 - q*k) + mu."""

    nu: complex
    mu: complex
    lambda_eff: complex
    q: float


def solve_nu1(gamma1: complex, q: float, lambda_eff: complex, *, root: int = +1) -> complex:
    """Nonzero root of nu^2 - q*lambda_eff*nu - gamma1 = 0.

    The default takes the +sqrt branch, nu1 = [q*lambda_eff + sqrt((q*lambda_eff)^2
    + 4*gamma1)]/2, which keeps the ground state normalizable for q > 0 and
    gamma1 >= 0.  root=-1 selects the mirror branch (used to keep VI -> -VI runs
    antilinearly paired on the non-Hermitian branch).
    """
    if q == 0:
        raise ValueError("q must be nonzero")
    qle = q * lambda_eff
    disc = np.sqrt(np.complex128(qle * qle + 4.0 * gamma1))
    nu1 = 0.5 * (qle + root * disc)
    scale = max(abs(qle), abs(disc), 1.0)
    if abs(nu1) < 1e-14 * scale:
        raise DegenerateRootError(
            "selected root nu1 = 0; the factorization ansatz degenerates "
            "(gamma1 = 0 with the vanishing root)"
        )
    return complex(nu1)


def _nu1_for(p: PotentialParams) -> complex:
    # For VI < 0 the problem is the antilinear mirror of the VI > 0 one; taking the
    # mirror root makes the two runs exact complex conjugates of each other.
    root = -1 if (p.branch is Branch.NON_HERMITIAN and p.VI < 0) else +1
    return solve_nu1(p.gamma1, p.q, p.lambda_eff, root=root)


def level(p: PotentialParams, E: complex, n: int) -> HierarchyLevel:
    """Level-n data (rho_n, mu_n) of the recurrence at trial energy E."""
    if n < 0:
        raise ValueError("level index n must be >= 0")
    g1, g2 = gammas(p, E)
    nu1 = _nu1_for(p)
    rho = nu1 + n * (p.q * p.lambda_eff)
    if abs(rho) < 1e-14 * max(1.0, abs(nu1)):
        raise ZeroNuError(f"rho_{n} = 0; level data undefined")
    mu = (g1 + p.q * g2 - rho * rho) / (2.0 * p.q * rho)
    if p.branch is Branch.HERMITIAN:
        scale = 1.0 + abs(rho) + abs(mu)
        if abs(rho.imag) > _IMAG_TOL * scale or abs(mu.imag) > _IMAG_TOL * scale:
            raise ArithmeticError(
                "Hermitian-branch level data acquired an imaginary part; "
                "Gamma1 is below the discriminant bound -q^2*lam^2/4"
            )
    return HierarchyLevel(n=n, nu=complex(rho), mu=complex(mu))


def make_superpotential(p: PotentialParams, E: complex, n: int) -> Superpotential:
    lvl = level(p, E, n)
    return Superpotential(nu=lvl.nu, mu=lvl.mu, lambda_eff=p.lambda_eff, q=p.q)


def superpotential_eval(w: Superpotential, x: ArrayLike) -> np.ndarray | complex:
    """W(x) = -nu*k/(1 - q*k) + mu."""
    u = screened_ratio(w.q, w.lambda_eff, x)
    return _collapse(-w.nu * u + w.mu)


def superpotential_derivative(w: Superpotential, x: ArrayLike) -> np.ndarray | complex:
    """Closed-form W'(x) = nu*lambda_eff*k/(1 - q*k)^2 = nu*lambda_eff*(u + q*u^2)."""
    u = screened_ratio(w.q, w.lambda_eff, x)
    return _collapse(w.nu * w.lambda_eff * (u + w.q * u * u))


def partner_potentials(w: Superpotential, x: ArrayLike) -> tuple[GridFunction, GridFunction]:
    """Partner pair (V1, V2) = (W^2 - W', W^2 + W') sampled on a uniform grid."""
    xa = _uniform(x)
    wv = np.asarray(superpotential_eval(w, xa))
    wd = np.asarray(superpotential_derivative(w, xa))
    w2 = wv * wv
    dx = float(xa[1] - xa[0])
    return (
        GridFunction(float(xa[0]), dx, w2 - wd),
        GridFunction(float(xa[0]), dx, w2 + wd),
    )


def hierarchy_potential(p: PotentialParams, E: complex, n: int, x: ArrayLike) -> np.ndarray:
    """n-th member of the partner chain.

    V(0) is the effective potential itself; V(n) = W_{n-1}^2 + W_{n-1}' + eps_{n-1}
    is the partner of the previous member, whose ground level sits at eps_n.
    """
    from .potential import effective_potential

    xa = np.asarray(x, dtype=float)
    if n == 0:
        return np.asarray(effective_potential(p, E, xa))
    lvl_prev = level(p, E, n - 1)
    w_prev = Superpotential(lvl_prev.nu, lvl_prev.mu, p.lambda_eff, p.q)
    wv = np.asarray(superpotential_eval(w_prev, xa))
    wd = np.asarray(superpotential_derivative(w_prev, xa))
    return wv * wv + wd + lvl_prev.epsilon


def riccati_residual(
    p: PotentialParams,
    E: complex,
    n: int,
    x: ArrayLike,
    *,
    mu_perturbation: complex = 0.0,
) -> float:
    """Sup-norm defect of W_n^2 - W_n' = V(n) - eps_n over the given grid.

    The alternating pairing is used: level n's (W^2 - W') is compared against the
    chain potential built from level n-1's (W^2 + W').  mu_perturbation offsets
    mu_n before the check (sensitivity hook used by the verify command).
    """
    xa = np.asarray(x, dtype=float)
    lvl = level(p, E, n)
    mu = lvl.mu + mu_perturbation
    w = Superpotential(lvl.nu, mu, p.lambda_eff, p.q)
    wv = np.asarray(superpotential_eval(w, xa))
    wd = np.asarray(superpotential_derivative(w, xa))
    lhs = wv * wv - wd
    rhs = hierarchy_potential(p, E, n, xa) - (-(mu * mu))
    return float(np.max(np.abs(lhs - rhs)))


def riccati_check(
    p: PotentialParams,
    E: complex,
    n: int,
    x: ArrayLike,
    tol: float = 1e-10,
    *,
    mu_perturbation: complex = 0.0,
) -> tuple[float, float, bool]:
    """(residual, scale, ok) with ok meaning residual < tol * scale.

    The scale is 1 + the sup of the magnitudes actually entering the identity
    (|W_n|^2, |W_n'| and the chain potential), so the check stays meaningful
    next to a deformation pole, where the individually huge W^2 and W' terms
    cancel down to a much smaller potential.  Away from poles, and whenever
    Gamma1 != 0, this agrees with 1 + sup|V_eff| up to an O(1) factor.
    """
    xa = np.asarray(x, dtype=float)
    res = riccati_residual(p, E, n, xa, mu_perturbation=mu_perturbation)
    lvl = level(p, E, n)
    w = Superpotential(lvl.nu, lvl.mu + mu_perturbation, p.lambda_eff, p.q)
    wv = np.abs(np.asarray(superpotential_eval(w, xa)))
    wd = np.abs(np.asarray(superpotential_derivative(w, xa)))
    chain = np.abs(hierarchy_potential(p, E, n, xa))
    scale = 1.0 + float(np.max(wv * wv + wd + chain))
    return res, scale, res < tol * scale


def apply_ladder(w: Superpotential, psi: GridFunction, sign: int) -> GridFunction:
    """(sign * d/dx + W) psi on the interior grid, 4th-order central differences.

    sign=+1 gives the operator annihilating exp(-integral W); sign=-1 gives its
    formal adjoint.  Two points are trimmed from each end for the stencil.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if psi.n < _MIN_LADDER_POINTS:
        raise ValueError("grid too coarse for the ladder stencil (fewer than 16 interior points)")
    v = psi.values
    h = psi.dx
    dpsi = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    x_in = psi.x[2:-2]
    w_in = np.asarray(superpotential_eval(w, x_in))
    return GridFunction(float(x_in[0]), h, sign * dpsi + w_in * v[2:-2])


def _uniform(x: ArrayLike) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    if xa.ndim != 1 or xa.size < 2:
        raise ValueError("need a 1-D grid with at least two points")
    steps = np.diff(xa)
    if not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-15):
        raise ValueError("grid must be uniformly spaced")
    return xa


def _collapse(a: np.ndarray) -> np.ndarray | complex:
    arr = np.asarray(a)
    return complex(arr) if arr.ndim == 0 else arr
