"""Hierarchy ground-state wavefunctions and grid diagnostics.

Integrating the ansatz superpotential gives the closed form

    psi(x) = N * (1 - q*k(x))^(nu/(q*lambda_eff)) * exp(-mu*x),

with k = exp(-lambda_eff*x).  The deformation parameter appears in the exponent
denominator, which is why q = 0 is excluded at construction.  On the
non-Hermitian branch mu is (up to the stored convention) i times a real decay
constant, so exp(-mu*x) is the expected oscillatory phase factor there.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError, NonNormalizableError
from .grid import GridFunction
from .hierarchy import HierarchyLevel, Superpotential
from .potential import POLE_TOL, PotentialParams

# Serialized next to wavefunction output: records the normalization rule and the
# generative form actually evaluated.
WAVEFORM_NOTE = (
    "psi(x) = N * (1 - q*exp(-lambda_eff*x))**(nu/(q*lambda_eff)) * exp(-mu*x); "
    "normalization: grid L2 (Hermitian) or max-modulus (complex branches)"
)


def _log_psi(nu: complex, mu: complex, lambda_eff: complex, q: float, x: np.ndarray) -> np.ndarray:
    k = np.exp(-lambda_eff * x.astype(np.complex128))
    base = 1.0 - q * k
    if np.any(np.abs(base) < POLE_TOL):
        raise DomainError("wavefunction evaluated at a deformation pole")
    return (nu / (q * lambda_eff)) * np.log(base) - mu * x


def ground_state_from_W(
    w: Superpotential, x: ArrayLike, *, hermitian: bool | None = None
) -> GridFunction:
    """exp(-integral W) on a uniform grid, normalized.

    Uses the closed-form antiderivative integral(W) = mu*x - (nu/(q*lambda_eff)) *
    log(1 - q*k(x)).  Hermitian-style data (real lambda_eff) is normalized to unit
    grid L2 norm and requires Re(mu) > 0; complex branches are normalized to unit
    maximum modulus.
    """
    xa = np.asarray(x, dtype=float)
    if xa.ndim != 1 or xa.size < 16:
        raise ValueError("need a 1-D grid with at least 16 points")
    dx = float(xa[1] - xa[0])
    if hermitian is None:
        hermitian = w.lambda_eff.imag == 0.0
    if hermitian and w.mu.real <= 0.0:
        raise NonNormalizableError(
            f"Re(mu) = {w.mu.real:g} <= 0: exp(-mu*x) does not decay; no bound ground state"
        )
    vals = np.exp(_log_psi(w.nu, w.mu, w.lambda_eff, w.q, xa))
    psi = GridFunction(float(xa[0]), dx, vals)
    norm = psi.l2_norm() if hermitian else psi.max_modulus()
    return psi.scaled(1.0 / norm)


def closed_form_psi(
    p: PotentialParams, lvl: HierarchyLevel, x: ArrayLike
) -> np.ndarray | complex:
    """Unnormalized closed form (1 - q*k)^(nu/(q*lambda_eff)) * exp(-mu*x).

    Evaluated as a complex power of the deformation base times a separate
    exponential, a different floating-point route than the fused antiderivative
    used by :func:`ground_state_from_W`; the two must agree pointwise.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float)).astype(np.complex128)
    k = np.exp(-p.lambda_eff * xa)
    base = 1.0 - p.q * k
    if np.any(np.abs(base) < POLE_TOL):
        raise DomainError("wavefunction evaluated at a deformation pole")
    vals = np.power(base, lvl.nu / (p.q * p.lambda_eff)) * np.exp(-lvl.mu * xa)
    return complex(vals[0]) if np.asarray(x).ndim == 0 else vals


def node_count(f: GridFunction, *, rel_floor: float = 1e-12) -> int:
    """Strict sign changes of a real-valued grid function, ignoring near-zero samples."""
    vals = f.values
    vmax = float(np.max(np.abs(vals)))
    if vmax == 0.0:
        return 0
    if np.max(np.abs(vals.imag)) > 1e-9 * vmax:
        raise ValueError("node counting expects real-valued samples")
    real = vals.real
    keep = np.abs(real) >= rel_floor * vmax
    signs = np.sign(real[keep])
    return int(np.sum(signs[:-1] * signs[1:] < 0))
