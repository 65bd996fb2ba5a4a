"""Self-consistent bound-state energies for every level and branch.

The level condition eps_n(E) = E^2 - m^2 is implicit in E because Gamma2 is
affine in E; the honest residual is

    f_n(E) = (E^2 - m^2) + mu_n(E)^2.

Since mu_n is affine in E, f_n is a quadratic in E, but it is solved
numerically: sign-scan plus bisection on the real interval (-m, m) for the
Hermitian branch, Newton in the complex plane (seeded by the explicit
closed-form expression evaluated at E = 0) for the complex branches.  The
closed form E = +/- sqrt(m^2 - mu_n^2) is exact whenever V0_eff = 0 and is used
as an internal cross-check there.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import warnings

import numpy as np

from .errors import NoRootError, NonConvergenceError, ZeroNuError
from .hierarchy import _nu1_for, level
from .potential import Branch, PotentialParams, gamma2


class LevelFlag(Enum):
    NORMALIZABLE_MU_POSITIVE = "NormalizableMuPositive"
    REAL_BOUND_STATE = "RealBoundState"
    COMPLEX_PAIR = "ComplexPair"


@dataclass(frozen=True)
class EnergyLevel:
    """A solved bound-state energy with residual diagnostics."""

    n: int
    E: complex
    mu: complex
    residual: float
    branch: Branch
    mass: float
    flags: frozenset = field(default_factory=frozenset)
    note: str = ""

    @property
    def epsilon(self) -> complex:
        # Recomputed, never stored: eps = E^2 - m^2.
        return self.E * self.E - self.mass * self.mass


@dataclass(frozen=True)
class PlusMinusPair:
    """The +/- energy pair of the explicit formula; minus is the exact negation."""

    plus: complex
    minus: complex
    epsilon: complex
    re_epsilon_negative: bool

    def __iter__(self):
        return iter((self.plus, self.minus))

    def __len__(self) -> int:
        return 2


def _level_coefficients(p: PotentialParams, n: int) -> tuple[complex, complex]:
    """mu_n(E) = m0 + slope*E with slope = V0_eff/rho_n."""
    nu1 = _nu1_for(p)
    rho = nu1 + n * (p.q * p.lambda_eff)
    if abs(rho) < 1e-14 * max(1.0, abs(nu1)):
        raise ZeroNuError(f"rho_{n} = 0")
    m0 = (p.gamma1 + 2.0 * p.q * p.m * p.S0 - rho * rho) / (2.0 * p.q * rho)
    slope = p.v0_eff / rho
    return complex(m0), complex(slope)


def energy_residual(p: PotentialParams, n: int, E: complex) -> complex:
    """f_n(E) = (E^2 - m^2) + mu_n(E)^2; a root is a self-consistent bound energy."""
    lvl = level(p, E, n)
    return E * E - p.m * p.m + lvl.mu * lvl.mu


def closed_form_energy(p: PotentialParams, n: int, E_gamma2: complex = 0.0) -> complex:
    """Explicit energy expression with Gamma2 frozen at a reference energy.

    E = (i/2q) * sqrt(z^2 - 4 q^2 m^2) with z = rho_n - (Gamma1 + q*Gamma2)/rho_n.
    Exact when V0_eff = 0 (Gamma2 is then energy independent); otherwise it is the
    Newton seed for the implicit condition.
    """
    nu1 = _nu1_for(p)
    rho = nu1 + n * (p.q * p.lambda_eff)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g2 = gamma2(p, E_gamma2)
    z = rho - (p.gamma1 + p.q * g2) / rho
    return complex(0.5j / p.q * np.sqrt(np.complex128(z * z - 4.0 * p.q * p.q * p.m * p.m)))


def _newton_polish(
    p: PotentialParams, n: int, E0: complex, tol: float, max_iter: int
) -> tuple[complex, float]:
    m0, slope = _level_coefficients(p, n)
    E = complex(E0)
    for _ in range(max_iter):
        mu = m0 + slope * E
        f = E * E - p.m * p.m + mu * mu
        if abs(f) < tol:
            return E, abs(f)
        df = 2.0 * E + 2.0 * mu * slope
        if df == 0:
            E = E + tol + 1e-9
            continue
        E = E - f / df
    mu = m0 + slope * E
    f = E * E - p.m * p.m + mu * mu
    if abs(f) < tol:
        return E, abs(f)
    raise NonConvergenceError(
        f"Newton polishing stalled at |f| = {abs(f):.3e} after {max_iter} iterations"
    )


def _flags_for(p: PotentialParams, E: complex, mu: complex) -> frozenset:
    flags = set()
    if mu.real > 0.0:
        flags.add(LevelFlag.NORMALIZABLE_MU_POSITIVE)
    if abs(E.imag) <= 1e-12 * (1.0 + abs(E)) and abs(E.real) < p.m:
        flags.add(LevelFlag.REAL_BOUND_STATE)
    if p.branch is not Branch.HERMITIAN:
        flags.add(LevelFlag.COMPLEX_PAIR)
    return frozenset(flags)


def _make_level(p: PotentialParams, n: int, E: complex, res: float, note: str = "") -> EnergyLevel:
    lvl = level(p, E, n)
    return EnergyLevel(
        n=n,
        E=complex(E),
        mu=lvl.mu,
        residual=res,
        branch=p.branch,
        mass=p.m,
        flags=_flags_for(p, E, lvl.mu),
        note=note,
    )


def solve_level(
    p: PotentialParams,
    n: int,
    *,
    scan_points: int = 2048,
    newton_tol: float = 1e-12,
    max_iter: int = 200,
) -> list[EnergyLevel]:
    """All self-consistent bound energies at level n (at most two).

    Hermitian branch: uniform sign scan of f_n over the open interval (-m, m),
    bisection of each bracket to 1e-13 in E, then a short Newton polish; the
    parabola vertex is checked separately so that a degenerate double root is
    still found (returned once, note "double_root").  Complex branches: Newton
    from +/- the closed-form seed with Gamma2 frozen at E = 0.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if p.branch is Branch.HERMITIAN:
        found = _solve_level_hermitian(p, n, scan_points, newton_tol, max_iter)
    else:
        found = _solve_level_complex(p, n, newton_tol, max_iter)
    if not found:
        raise NoRootError(f"level {n} supports no self-consistent bound energy")
    if p.v0_eff == 0:
        _crosscheck_closed_form(p, n, found)
    return found


def _solve_level_hermitian(
    p: PotentialParams, n: int, scan_points: int, tol: float, max_iter: int
) -> list[EnergyLevel]:
    m0, slope = _level_coefficients(p, n)
    a0, b0 = float(m0.real), float(slope.real)

    def f(E: float) -> float:
        mu = a0 + b0 * E
        return E * E - p.m * p.m + mu * mu

    # Endpoints carry f(+/-m) = mu^2 >= 0; they serve as bracket ends while the
    # strict-interior filter below keeps +/-m themselves out of the root list.
    grid = np.linspace(-p.m, p.m, scan_points + 2)
    mu_g = a0 + b0 * grid
    fg = grid * grid - p.m * p.m + mu_g * mu_g

    roots: list[tuple[complex, float, str]] = []
    signs = np.sign(fg)
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        lo, hi = float(grid[i]), float(grid[i + 1])
        flo = f(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0 or (hi - lo) < 1e-13:
                break
            if flo * fm < 0:
                hi = mid
            else:
                lo, flo = mid, fm
        E, res = _newton_polish(p, n, 0.5 * (lo + hi), tol, max_iter)
        roots.append((complex(E.real), res, ""))
    # Exact hits on scan nodes.
    for i in np.nonzero(fg == 0.0)[0]:
        roots.append((complex(float(grid[i])), 0.0, ""))
    # Tangency: f is an upward parabola in E, so a degenerate double root can only
    # sit at the vertex, where f' = 2E + 2*mu*mu' vanishes (f' is linear in E).
    a_lead = 1.0 + b0 * b0
    vertex = -a0 * b0 / a_lead
    f_v = f(vertex)
    if -p.m < vertex < p.m and abs(f_v) < tol:
        roots.append((complex(vertex), abs(f_v), "double_root"))

    out: list[EnergyLevel] = []
    for E, res, note in sorted(roots, key=lambda r: r[0].real):
        if not (-p.m < E.real < p.m):
            continue
        if any(abs(E - lv.E) < 1e-10 * (1.0 + abs(E)) for lv in out):
            continue
        out.append(_make_level(p, n, E, res, note))
    return out


def _solve_level_complex(
    p: PotentialParams, n: int, tol: float, max_iter: int
) -> list[EnergyLevel]:
    seed = closed_form_energy(p, n)
    if seed == 0:
        seed = 1e-3 * p.m
    out: list[EnergyLevel] = []
    for s in (seed, -seed):
        E, res = _newton_polish(p, n, s, tol, max_iter)
        if any(abs(E - lv.E) < 1e-10 * (1.0 + abs(E)) for lv in out):
            out[0] = replace(out[0], note="double_root")
            continue
        out.append(_make_level(p, n, E, res))
    out.sort(key=lambda lv: (lv.E.real, lv.E.imag))
    return out


def _crosscheck_closed_form(p: PotentialParams, n: int, found: list[EnergyLevel]) -> None:
    # With V0_eff = 0 the condition is explicit: E = +/- sqrt(m^2 - mu_n^2).
    ref = closed_form_energy(p, n)
    for lv in found:
        if min(abs(lv.E - ref), abs(lv.E + ref)) > 1e-9 * (1.0 + abs(ref)):
            raise ArithmeticError(
                f"iterative root {lv.E} disagrees with the explicit V0_eff=0 form {ref}"
            )


def spectrum(p: PotentialParams, n_max: int) -> list[EnergyLevel]:
    """Bound levels for n = 0, 1, ... until NoRoot, loss of normalizability, or n_max."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    out: list[EnergyLevel] = []
    for n in range(n_max + 1):
        try:
            found = solve_level(p, n)
        except NoRootError:
            break
        if max(lv.mu.real for lv in found) <= 0.0:
            break
        out.extend(found)
    return out


def _pm_pair(p: PotentialParams, n: int, tol: float = 1e-12, max_iter: int = 200) -> PlusMinusPair:
    seed = closed_form_energy(p, n)
    if seed == 0:
        seed = 1e-3 * p.m
    E, _ = _newton_polish(p, n, seed, tol, max_iter)
    eps = E * E - p.m * p.m
    return PlusMinusPair(plus=E, minus=-E, epsilon=eps, re_epsilon_negative=eps.real < 0.0)


def pt_energy(p: PotentialParams, n: int) -> PlusMinusPair:
    """The +/- energy pair on the PT-symmetric branch (minus is the exact negation)."""
    if p.branch is not Branch.PT_SYMMETRIC:
        raise ValueError("pt_energy requires branch = PTSymmetric")
    return _pm_pair(p, n)


def nonhermitian_energy(p: PotentialParams, n: int) -> PlusMinusPair:
    """The +/- pair with V0_eff = V0 + i*VI; reports eps and whether Re(eps) < 0."""
    if p.branch is not Branch.NON_HERMITIAN:
        raise ValueError("nonhermitian_energy requires branch = NonHermitian")
    return _pm_pair(p, n)
