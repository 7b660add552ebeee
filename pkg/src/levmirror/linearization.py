"""Linearized fluctuation dynamics about a steady state and their stability.

Fluctuations are ordered ``(b, b^dagger, a, a^dagger)`` (mirror phonon, then
cavity photon) everywhere in this package.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import DomainError, LevMirrorError, NoRealSteadyState, NumericalError
from .params import SystemParams
from .steady_state import _DPS, Branch, SteadyStateBranch, _solve_mp

__all__ = [
    "LinearizedModel",
    "StabilityVerdict",
    "StabilityMap",
    "mechanical_frequency",
    "coupling_strength",
    "drift_matrix",
    "linearize",
    "stability",
    "stability_map",
]


def mechanical_frequency(branch: SteadyStateBranch, params: SystemParams) -> float:
    """Frequency of small mirror oscillations about the steady state.

    ``Omega_M^2 = 2 hbar Omega_c^3 N_c / (m (j pi c)^2)``. Using force balance
    this reduces to ``2 Omega_c g / (j pi c)``, so it does not depend on the
    mirror mass at fixed dimensionless power.
    """
    if not branch.N_c > 0:
        raise DomainError("mechanical frequency needs a positive photon number")
    with mpmath.workdps(_DPS):
        return float(_omega_m(params, mpmath.mpf(branch.Omega_c), mpmath.mpf(branch.N_c)))


def _omega_m(params, Omega_c, N_c):
    hbar, c = mpmath.mpf(params.constants.hbar), mpmath.mpf(params.constants.c)
    jpc = params.j * mpmath.pi * c
    return mpmath.sqrt(2 * hbar * Omega_c**3 * N_c / (mpmath.mpf(params.m_ref) * jpc**2))


def _g_c(params, Omega_c, N_c, Omega_M):
    hbar, c = mpmath.mpf(params.constants.hbar), mpmath.mpf(params.constants.c)
    zpf = mpmath.sqrt(hbar / (2 * mpmath.mpf(params.m_ref) * Omega_M))
    return Omega_c**2 / (params.j * mpmath.pi * c) * zpf * mpmath.sqrt(N_c)


def coupling_strength(branch: SteadyStateBranch, params: SystemParams,
                      Omega_M: Optional[float] = None) -> float:
    """Linear optomechanical coupling
    ``g_C = Omega_c^2 / (j pi c) * sqrt(hbar / (2 m Omega_M)) * alpha``
    with the steady-state amplitude ``alpha`` taken real."""
    if Omega_M is None:
        if branch.N_c == 0:
            return 0.0
        Omega_M = mechanical_frequency(branch, params)
    if not Omega_M > 0:
        raise DomainError(f"mechanical frequency must be positive, got {Omega_M!r}")
    with mpmath.workdps(_DPS):
        return float(_g_c(params, mpmath.mpf(branch.Omega_c), mpmath.mpf(branch.N_c),
                          mpmath.mpf(Omega_M)))


def drift_matrix(Omega_M: float, g_C: float, Delta: float, kappa: float,
                 Gamma: float) -> np.ndarray:
    """The 4x4 drift matrix of the linearized Langevin equations in the basis
    ``(b, b^dagger, a, a^dagger)``."""
    ig = 1j * g_C
    return np.array([
        [-Gamma / 2 - 1j * Omega_M, 0.0, -ig, -ig],
        [0.0, -Gamma / 2 + 1j * Omega_M, ig, ig],
        [-ig, -ig, -kappa / 2 - 1j * Delta, 0.0],
        [ig, ig, 0.0, -kappa / 2 + 1j * Delta],
    ], dtype=complex)


@dataclass(frozen=True)
class LinearizedModel:
    """Parameters of the linearized model, all in rad/s."""

    Omega_M: float
    g_C: float
    Delta: float
    kappa: float
    Gamma: float

    @property
    def A(self) -> np.ndarray:
        return drift_matrix(self.Omega_M, self.g_C, self.Delta, self.kappa, self.Gamma)

    def replace(self, **changes) -> "LinearizedModel":
        return replace(self, **changes)


def linearize(params: SystemParams, branch=Branch.BLUE) -> LinearizedModel:
    """Linearized model about ``branch`` (a label or an already solved branch).

    The steady state is carried through in extended precision so that
    ``Omega_M`` and ``g_C`` are correctly rounded; in particular they come out
    bit-identical for any mirror mass at fixed dimensionless power.
    """
    if isinstance(branch, SteadyStateBranch):
        branch = branch.label
    label = Branch.parse(branch)
    with mpmath.workdps(_DPS):
        _, sols = _solve_mp(params)
        sol = sols[label]
        if not sol["N_c"] > 0:
            raise DomainError("mechanical frequency needs a positive photon number")
        Omega_M = _omega_m(params, sol["Omega_c"], sol["N_c"])
        g_C = _g_c(params, sol["Omega_c"], sol["N_c"], Omega_M)
        return LinearizedModel(float(Omega_M), float(g_C), float(sol["Delta"]),
                               params.kappa, params.Gamma)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_real_part: float
    eigenvalues: np.ndarray
    tolerance: float


def stability(A, slack: float = 1e-9) -> StabilityVerdict:
    """Decide linear stability from the eigenvalues of the drift matrix.

    The system counts as stable when every eigenvalue has real part at most
    ``slack * ||A||_inf``. Eigenvalues are returned sorted by real part, then
    imaginary part.

    Raises
    ------
    NumericalError
        If the eigenvalue iteration fails or produces non-finite values.
    """
    if isinstance(A, LinearizedModel):
        A = A.A
    A = np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(A)):
        raise NumericalError("drift matrix has non-finite entries")
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation did not converge: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise NumericalError("eigenvalue computation returned non-finite values")
    eig = eig[np.lexsort((eig.imag, eig.real))]
    tol = slack * np.abs(A).sum(axis=1).max()
    max_re = float(eig.real.max())
    return StabilityVerdict(max_re <= tol, max_re, eig, float(tol))


STATUS_STABLE = "stable"
STATUS_UNSTABLE = "unstable"
STATUS_NO_STEADY_STATE = "no_steady_state"
STATUS_NUMERICAL_ERROR = "numerical_error"


@dataclass(frozen=True)
class StabilityMap:
    """Per-cell stability over a (kappa, Gamma) grid.

    ``status[i, k]`` and ``max_real_part[i, k]`` refer to ``kappa[i]`` and
    ``Gamma[k]``. ``max_real_part`` is NaN where no model could be built.
    """

    kappa: np.ndarray
    Gamma: np.ndarray
    status: np.ndarray
    max_real_part: np.ndarray
    branch: Branch

    @property
    def stable(self) -> np.ndarray:
        return self.status == STATUS_STABLE


def _map_row(kappa: float, params: SystemParams, Gammas: Sequence[float], branch: Branch):
    row_status, row_re = [], []
    try:
        model = linearize(params.replace(kappa=kappa), branch)
    except NoRealSteadyState:
        return [STATUS_NO_STEADY_STATE] * len(Gammas), [math.nan] * len(Gammas)
    except LevMirrorError:
        return [STATUS_NUMERICAL_ERROR] * len(Gammas), [math.nan] * len(Gammas)
    for Gamma in Gammas:
        try:
            verdict = stability(model.replace(Gamma=float(Gamma)))
        except NumericalError:
            row_status.append(STATUS_NUMERICAL_ERROR)
            row_re.append(math.nan)
            continue
        row_status.append(STATUS_STABLE if verdict.stable else STATUS_UNSTABLE)
        row_re.append(verdict.max_real_part)
    return row_status, row_re


def stability_map(params: SystemParams, kappa_grid, Gamma_grid, branch=Branch.BLUE,
                  workers: int = 1) -> StabilityMap:
    """Stability verdict for every ``(kappa, Gamma)`` pair.

    The steady state is re-solved for each ``kappa`` (the detuning depends on
    it); ``Gamma`` only enters the drift matrix. Cells without a real steady
    state are reported as ``"no_steady_state"`` rather than unstable.
    """
    kappas = np.asarray(kappa_grid, dtype=float).ravel()
    Gammas = np.asarray(Gamma_grid, dtype=float).ravel()
    if kappas.size == 0 or Gammas.size == 0:
        raise DomainError("stability map grids must be non-empty")
    branch = Branch.parse(branch)
    job = partial(_map_row, params=params, Gammas=list(Gammas), branch=branch)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, kappas))
    else:
        rows = [job(k) for k in kappas]
    status = np.array([r[0] for r in rows], dtype=object)
    max_re = np.array([r[1] for r in rows], dtype=float)
    return StabilityMap(kappas, Gammas, status, max_re, branch)
