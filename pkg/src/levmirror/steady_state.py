"""Semiclassical steady states of the levitated mirror.

The mirror sits where the radiation force of the intracavity field balances
gravity. Photon-number balance and force balance give a quadratic for the
cavity length with two roots: a blue-detuned branch (lower mirror position,
``Delta < 0``) and a red-detuned branch (``Delta > 0``).

The cavity resonance ``j pi c / (L - q)`` differs from the laser frequency by
roughly one part in 1e8, so turning a mirror position into a detuning cancels
about eight digits. Every closed form here is therefore evaluated with
:mod:`mpmath` and only the final values are rounded to float.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import mpmath

from .errors import DomainError, NoRealSteadyState, ThresholdNotFound
from .params import SystemParams

__all__ = [
    "Branch",
    "SteadyStateBranch",
    "Residual",
    "discriminant",
    "solve_branches",
    "steady_state",
    "detuning_closed_form",
    "cavity_detuning",
    "residual",
    "threshold_power",
    "threshold_power_bisect",
]

_DPS = 40


class Branch(enum.Enum):
    BLUE = "blue"
    RED = "red"

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class SteadyStateBranch:
    """One steady-state solution.

    Attributes
    ----------
    label : Branch
    q : float
        Mirror displacement from the resting length, m (positive = upwards).
    N_c : float
        Intracavity photon number.
    Delta : float
        Detuning ``Omega_c - Omega_L``, rad/s.
    Omega_c : float
        Cavity resonance at the displaced length, rad/s.
    alpha : float
        Real coherent amplitude, ``sqrt(N_c)``.
    p : float
        Steady-state momentum (always zero).
    """

    label: Branch
    q: float
    N_c: float
    Delta: float
    Omega_c: float
    alpha: float
    p: float = 0.0


class Residual(NamedTuple):
    """Normalized residuals of the three steady-state equations."""

    photon: float
    momentum: float
    force: float

    def max_abs(self) -> float:
        return max(abs(self.photon), abs(self.momentum), abs(self.force))


def _mp_params(params: SystemParams, p_tilde=None):
    hbar = mpmath.mpf(params.constants.hbar)
    c = mpmath.mpf(params.constants.c)
    g = mpmath.mpf(params.g)
    m = mpmath.mpf(params.m_ref)
    Omega_L = 2 * mpmath.pi * c / mpmath.mpf(params.lambda_L)
    p = params.p_tilde if p_tilde is None else p_tilde
    N_in = mpmath.mpf(p) * m * g * c / (hbar * Omega_L)
    return dict(hbar=hbar, c=c, g=g, m=m, Omega_L=Omega_L, N_in=N_in,
                L=mpmath.mpf(params.L), kappa=mpmath.mpf(params.kappa),
                j=mpmath.mpf(params.j))


def _discriminant_mp(v):
    kappa, Omega_L = v["kappa"], v["Omega_L"]
    bracket = kappa**2 + 4 * Omega_L**2
    return (-v["c"] * v["g"] * v["j"] * v["m"] * mpmath.pi * kappa**2
            + v["N_in"] * kappa * v["hbar"] * bracket)


def discriminant(params: SystemParams, p_tilde=None) -> float:
    """The steady-state discriminant ``D``; real solutions exist iff ``D >= 0``.

    ``p_tilde`` overrides the power stored in ``params``.
    """
    with mpmath.workdps(_DPS):
        return float(_discriminant_mp(_mp_params(params, p_tilde)))


def _closed_forms(params: SystemParams):
    v = _mp_params(params)
    D = _discriminant_mp(v)
    if D < 0:
        raise NoRealSteadyState(float(D), params)
    hbar, c, g, m = v["hbar"], v["c"], v["g"], v["m"]
    L, kappa, Omega_L, j, N_in = v["L"], v["kappa"], v["Omega_L"], v["j"], v["N_in"]
    pi = mpmath.pi
    K = kappa**2 + 4 * Omega_L**2
    root = mpmath.sqrt(pi) * mpmath.sqrt(c * g * m * j * D)
    denom_delta = 2 * c * g * m * j * pi - 2 * N_in * kappa * hbar
    if denom_delta <= 0:
        raise DomainError("detuning denominator is not positive; the cavity is "
                          "far outside the good-cavity regime")
    out = {}
    for label, s in ((Branch.BLUE, -1), (Branch.RED, +1)):
        q = (g * m * (L * K - 4 * j * c * pi * Omega_L) + s * 2 * root) / (g * m * K)
        # The photon-number closed form needs K**2 in its denominator to be
        # dimensionally consistent; with it both balance equations hold exactly.
        N_c = (-4 * c * g * m * j * pi * (kappa**2 - 4 * Omega_L**2)
               + 4 * kappa * N_in * hbar * K - s * 16 * Omega_L * root) / (hbar * K**2)
        Delta = (2 * N_in * kappa * Omega_L * hbar + s * root) / denom_delta
        out[label] = (q, N_c, Delta)
    return v, out


def _solve_mp(params: SystemParams):
    """Closed-form branches as mpf values; call inside ``workdps(_DPS)``."""
    v, forms = _closed_forms(params)
    out = {}
    for label in (Branch.BLUE, Branch.RED):
        q, N_c, Delta = forms[label]
        if not q < v["L"]:
            raise DomainError(f"{label.value} branch has q >= L")
        if N_c < 0:
            raise DomainError(f"{label.value} branch has negative photon number")
        out[label] = dict(q=q, N_c=N_c, Delta=Delta, Omega_c=v["Omega_L"] + Delta)
    return v, out


def solve_branches(params: SystemParams) -> tuple[SteadyStateBranch, SteadyStateBranch]:
    """Both steady-state branches ``(blue, red)`` from the closed-form solution.

    Raises
    ------
    NoRealSteadyState
        If the power is below threshold (negative discriminant).
    """
    with mpmath.workdps(_DPS):
        _, sols = _solve_mp(params)
        branches = []
        for label in (Branch.BLUE, Branch.RED):
            sol = sols[label]
            branches.append(SteadyStateBranch(
                label=label,
                q=float(sol["q"]),
                N_c=float(sol["N_c"]),
                Delta=float(sol["Delta"]),
                Omega_c=float(sol["Omega_c"]),
                alpha=float(mpmath.sqrt(sol["N_c"])),
            ))
    return branches[0], branches[1]


def steady_state(params: SystemParams, branch=Branch.BLUE) -> SteadyStateBranch:
    blue, red = solve_branches(params)
    return blue if Branch.parse(branch) is Branch.BLUE else red


def detuning_closed_form(params: SystemParams, branch) -> float:
    """Detuning of a branch from its dedicated closed form (no mirror position
    involved)."""
    with mpmath.workdps(_DPS):
        _, forms = _closed_forms(params)
        return float(forms[Branch.parse(branch)][2])


def cavity_detuning(q: float, params: SystemParams) -> float:
    """``j pi c / (L - q) - Omega_L`` evaluated without cancellation loss."""
    with mpmath.workdps(_DPS):
        v = _mp_params(params)
        Omega_c = v["j"] * mpmath.pi * v["c"] / (v["L"] - mpmath.mpf(q))
        return float(Omega_c - v["Omega_L"])


def residual(branch: SteadyStateBranch, params: SystemParams) -> Residual:
    """Normalized residuals of the steady-state equations at ``branch``.

    The cavity resonance is recomputed from ``branch.q``; ``Delta`` and
    ``Omega_c`` stored on the branch are not used.

    Returns
    -------
    Residual
        ``photon = ((kappa^2/4 + Delta^2) N_c - kappa N_in) / (kappa N_in)``,
        ``momentum = p`` and ``force = (m g - hbar Omega_c^2 N_c / (j pi c)) / (m g)``.
    """
    with mpmath.workdps(_DPS):
        v = _mp_params(params)
        Omega_c = v["j"] * mpmath.pi * v["c"] / (v["L"] - mpmath.mpf(branch.q))
        Delta = Omega_c - v["Omega_L"]
        N_c = mpmath.mpf(branch.N_c)
        photon_rate = v["kappa"] * v["N_in"]
        r_a = ((v["kappa"]**2 / 4 + Delta**2) * N_c - photon_rate) / photon_rate
        weight = v["m"] * v["g"]
        r_f = (weight - v["hbar"] * Omega_c**2 * N_c / (v["j"] * mpmath.pi * v["c"])) / weight
        return Residual(float(r_a), float(branch.p), float(r_f))


def threshold_power(params: SystemParams) -> float:
    """Dimensionless power below which no real steady state exists.

    The discriminant is linear in the input photon rate, so its root is
    ``P~_min = j pi kappa Omega_L / (kappa^2 + 4 Omega_L^2)``. The stored
    ``params.p_tilde`` is ignored.
    """
    with mpmath.workdps(_DPS):
        kappa = mpmath.mpf(params.kappa)
        Omega_L = 2 * mpmath.pi * mpmath.mpf(params.constants.c) / mpmath.mpf(params.lambda_L)
        return float(params.j * mpmath.pi * kappa * Omega_L / (kappa**2 + 4 * Omega_L**2))


def threshold_power_bisect(params: SystemParams, rtol: float = 1e-12,
                           p_max: float = 1.0) -> float:
    """Threshold power located by bisection on the sign of the discriminant
    over ``(0, p_max]``.

    Raises
    ------
    ThresholdNotFound
        If the discriminant does not change sign on the interval.
    """
    lo, hi = 0.0, float(p_max)
    if discriminant(params, hi) <= 0:
        raise ThresholdNotFound(
            f"discriminant is non-positive up to p_tilde = {p_max}; no threshold found"
        )
    # D(0+) = -c g j m pi kappa^2 < 0, so (lo, hi] brackets the root.
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if discriminant(params, mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi
