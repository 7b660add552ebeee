"""Cosine/sine sideband covariance matrix of the mirror and cavity outputs.

Quadratures at sideband ``omega`` are mixed down with ``cos`` and ``sin`` so
that they are Hermitian even for a detuned cavity. The basis order is::

    (Q^C_b, P^C_b, Q^S_b, P^S_b, Q^C_a, P^C_a, Q^S_a, P^S_a)

``Q`` is the ``+`` quadrature and ``P`` the ``-`` quadrature of each output.
Entries are spectral densities per unit bandwidth in vacuum units, so the
vacuum state has ``sigma = I / 2``.

All functions accept either a float covariance (possibly stacked over a
frequency grid, shape ``(..., 8, 8)``) or one carrying an extended-precision
copy; the latter is preferred whenever present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from .errors import ConsistencyError, UnphysicalStateError
from .linearization import LinearizedModel
from .spectra import IOCoefficients, io_coefficients, transfer_matrix

__all__ = [
    "QUADRATURE_LABELS",
    "SidebandCovariance",
    "EntanglementResult",
    "Variances",
    "covariance",
    "sideband_covariance",
    "submatrices",
    "entanglement_entropy",
    "quadrature_variances",
    "max_squeezing",
    "purity_check",
    "symplectic_form",
    "uncertainty_min_eigenvalue",
    "reflection_matrix",
    "vacuum_covariance",
]

QUADRATURE_LABELS = ("QC_b", "PC_b", "QS_b", "PS_b", "QC_a", "PC_a", "QS_a", "PS_a")

_MODE_OFFSET = {"b": 0, "a": 4}
# position inside a mode block: (quadrature sign, sideband) -> index
_SLOT = {(1, "C"): 0, (-1, "C"): 1, (1, "S"): 2, (-1, "S"): 3}

SYMMETRY_TOL = 1e-10
CS_TOL = 1e-10
DET_TOL = 1e-6


@dataclass(frozen=True)
class SidebandCovariance:
    """Covariance of the eight sideband quadratures.

    Attributes
    ----------
    omega : float or ndarray
        Sideband frequency (or grid of them), rad/s.
    sigma : ndarray, shape (..., 8, 8)
        Float64 covariance.
    sigma_hp : mpmath.matrix or None
        Extended-precision covariance when built with ``dps``.
    dps : int or None
    """

    omega: object
    sigma: np.ndarray
    sigma_hp: Optional[object] = None
    dps: Optional[int] = None


class EntanglementResult(NamedTuple):
    E2_from_a: object
    E2_from_b: object
    discrepancy: object

    @property
    def E2(self):
        """The reported value (mirror-block route)."""
        return self.E2_from_b


class Variances(NamedTuple):
    Q_b: object
    P_b: object
    Q_a: object
    P_a: object


def _hp(sigma):
    # (matrix, dps) for the best available representation
    if isinstance(sigma, SidebandCovariance):
        if sigma.sigma_hp is not None:
            return sigma.sigma_hp, sigma.dps
        return sigma.sigma, None
    if isinstance(sigma, mpmath.matrix):
        return sigma, mpmath.mp.dps
    return np.asarray(sigma, dtype=float), None


def _entry(coeffs: IOCoefficients, kind, mode, sign, freq):
    return coeffs.get(kind, mode, sign, freq)


def _moment(coeffs, mode_i, a, mode_j, b, freq):
    """``B^a_i B^b_j* + A^a_i A^b_j*`` at ``freq * omega``."""
    total = 0
    for kind in ("B", "A"):
        x = _entry(coeffs, kind, mode_i, a, freq)
        y = _entry(coeffs, kind, mode_j, b, freq)
        total = total + x * y.conjugate()
    return total


def _phase(a, b):
    # selects Re or -/+Im of the moment according to which operands are P
    if a == b:
        return 1
    return 1j if a == 1 else -1j


def _assemble(coeffs: IOCoefficients, quarter, make):
    entries = {}
    for mi in ("b", "a"):
        for mj in ("b", "a"):
            for a in (1, -1):
                for b in (1, -1):
                    m_plus = _moment(coeffs, mi, a, mj, b, 1)
                    m_minus = _moment(coeffs, mi, a, mj, b, -1)
                    c = _phase(a, b)
                    cc = quarter * ((c * m_plus).real + (c * m_minus).real)
                    cs = quarter * ((1j * c * m_plus).real - (1j * c * m_minus).real)
                    i0, j0 = _MODE_OFFSET[mi], _MODE_OFFSET[mj]
                    ic, jc = i0 + _SLOT[(a, "C")], j0 + _SLOT[(b, "C")]
                    is_, js = i0 + _SLOT[(a, "S")], j0 + _SLOT[(b, "S")]
                    entries[(ic, jc)] = cc
                    entries[(is_, js)] = cc
                    entries[(ic, js)] = cs
                    entries[(is_, jc)] = -cs
    return make(entries)


def covariance(coeffs: IOCoefficients, sym_tol: float = SYMMETRY_TOL) -> SidebandCovariance:
    """Assemble the 8x8 sideband covariance from the output coefficients.

    Every entry is a quarter of the real part of
    ``c [M(omega) +- M(-omega)]`` with
    ``M^{ab}_{ij} = B^a_i B^b_j* + A^a_i A^b_j*``: the ``(C, C)`` and
    ``(S, S)`` blocks take the sum, ``(C, S)`` the difference after an extra
    factor ``i`` and ``(S, C) = -(C, S)``. The phase ``c`` is 1 for ``QQ``
    and ``PP``, ``i`` for ``QP`` and ``-i`` for ``PQ``.

    Raises
    ------
    ConsistencyError
        If the assembled matrix is asymmetric by more than ``sym_tol``
        relative to ``sqrt(sigma_ii sigma_jj)``.
    """
    if coeffs.dps is None:
        def make(entries):
            first = next(iter(entries.values()))
            out = np.zeros(np.shape(first) + (8, 8))
            for (i, j), v in entries.items():
                out[..., i, j] = v
            return out

        sigma = _assemble(coeffs, 0.25, make)
        _check_symmetry(sigma, sym_tol)
        sigma = 0.5 * (sigma + np.swapaxes(sigma, -1, -2))
        return SidebandCovariance(coeffs.omega, sigma)

    with mpmath.workdps(coeffs.dps):
        def make(entries):
            out = mpmath.matrix(8, 8)
            for (i, j), v in entries.items():
                out[i, j] = v
            return out

        hp = _assemble(coeffs, mpmath.mpf(1) / 4, make)
        _check_symmetry(np.array(hp.tolist(), dtype=float), sym_tol,
                        np.array((hp - hp.T).tolist(), dtype=float))
        hp = (hp + hp.T) / 2
        sigma = np.array(hp.tolist(), dtype=float)
    return SidebandCovariance(coeffs.omega, sigma, hp, coeffs.dps)


def _check_symmetry(sigma, tol, diff=None):
    if diff is None:
        diff = sigma - np.swapaxes(sigma, -1, -2)
    d = np.abs(np.diagonal(sigma, axis1=-2, axis2=-1))
    scale = np.sqrt(d[..., :, None] * d[..., None, :])
    bad = np.abs(diff) > tol * np.maximum(scale, 1e-300)
    if np.any(bad):
        raise ConsistencyError("assembled covariance matrix is not symmetric")


def sideband_covariance(model: LinearizedModel, omega, dps: Optional[int] = None) -> SidebandCovariance:
    """Transfer matrix, output coefficients and covariance in one call."""
    data = transfer_matrix(model.A, omega, dps=dps)
    coeffs = io_coefficients(data, model.kappa, model.Gamma)
    return covariance(coeffs)


def vacuum_covariance() -> np.ndarray:
    return 0.5 * np.eye(8)


def submatrices(sigma):
    """``(sigma_b, sigma_a, sigma_upper)``: mirror block, cavity block and the
    mirror-cavity correlations (rows of ``b``, columns of ``a``)."""
    if isinstance(sigma, SidebandCovariance):
        sigma = sigma.sigma
    if isinstance(sigma, mpmath.matrix):
        blk = lambda r, c: mpmath.matrix([[sigma[i, j] for j in c] for i in r])
        b, a = range(4), range(4, 8)
        return blk(b, b), blk(a, a), blk(b, a)
    sigma = np.asarray(sigma)
    return sigma[..., :4, :4], sigma[..., 4:, 4:], sigma[..., :4, 4:]


def _det2(m, dps):
    # det(2 m), scaled inside the working precision
    if dps is None:
        return np.linalg.det(2 * m)
    with mpmath.workdps(dps):
        return mpmath.det(2 * m)


def _log2(x, dps):
    if dps is None:
        return np.log2(x)
    with mpmath.workdps(dps):
        return mpmath.log(x, 2)


def entanglement_entropy(sigma, det_tol: float = DET_TOL) -> EntanglementResult:
    """Renyi-2 entropy of entanglement ``1/2 log2 det(2 sigma_x)`` in ebits.

    Both reduced blocks are used; for a pure bipartite state they agree.
    Values are floats (arrays for a stacked covariance).

    Raises
    ------
    UnphysicalStateError
        If either ``det(2 sigma_x)`` falls below ``1 - det_tol``.
    """
    m, dps = _hp(sigma)
    sb, sa, _ = submatrices(m)
    det_b = _det2(sb, dps)
    det_a = _det2(sa, dps)
    if np.any(np.asarray(float(det_b) if dps else det_b) < 1 - det_tol) or \
            np.any(np.asarray(float(det_a) if dps else det_a) < 1 - det_tol):
        raise UnphysicalStateError(
            "det(2 sigma) of a reduced block is below 1; the state violates the "
            "uncertainty principle")
    e_b = _log2(det_b, dps) / 2
    e_a = _log2(det_a, dps) / 2
    if dps is not None:
        e_a, e_b = float(e_a), float(e_b)
    return EntanglementResult(e_a, e_b, np.abs(np.subtract(e_a, e_b)))


def quadrature_variances(sigma, rtol: float = CS_TOL) -> Variances:
    """Diagonal entries ``(Q_b, P_b, Q_a, P_a)`` after checking that each
    cosine variance equals its sine partner to ``rtol`` (relative)."""
    m, dps = _hp(sigma)
    if dps is not None:
        with mpmath.workdps(dps):
            diag = np.array([float(m[i, i]) for i in range(8)])
            gaps = np.array([float(abs(m[i, i] - m[i + 2, i + 2])) for i in (0, 1, 4, 5)])
    else:
        diag = np.diagonal(m, axis1=-2, axis2=-1)
        gaps = np.stack([np.abs(diag[..., i] - diag[..., i + 2]) for i in (0, 1, 4, 5)], -1)
    ref = np.stack([diag[..., i] for i in (0, 1, 4, 5)], -1)
    if np.any(gaps > rtol * np.abs(ref)):
        raise ConsistencyError("cosine and sine quadrature variances differ")
    return Variances(diag[..., 0], diag[..., 1], diag[..., 4], diag[..., 5])


def max_squeezing(block):
    """Smallest and largest eigenvalue of a symmetric covariance block.

    A smallest eigenvalue below 1/2 means some combination of the block's
    quadratures is squeezed.
    """
    if isinstance(block, mpmath.matrix):
        ev = mpmath.eigsy(block, eigvals_only=True)
        ev = sorted(float(x) for x in ev)
        return ev[0], ev[-1]
    ev = np.linalg.eigvalsh(np.asarray(block, dtype=float))
    return ev[..., 0], ev[..., -1]


def purity_check(sigma):
    """``|det(2 sigma) - 1|``; zero for a pure global state."""
    m, dps = _hp(sigma)
    d = _det2(m, dps)
    if dps is not None:
        with mpmath.workdps(dps):
            return float(abs(d - 1))
    return np.abs(d - 1)


def symplectic_form() -> np.ndarray:
    """Block-diagonal ``[[0, 1], [-1, 0]]`` over the four ``(Q, P)`` pairs."""
    return np.kron(np.eye(4), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def uncertainty_min_eigenvalue(sigma):
    """Smallest eigenvalue of ``sigma + (i/2) Omega_s``; non-negative for any
    physical state."""
    m, dps = _hp(sigma)
    omega = symplectic_form()
    if dps is not None:
        with mpmath.workdps(dps):
            h = m + mpmath.matrix(omega.tolist()) * mpmath.mpc(0, 0.5)
            ev = mpmath.eighe(h, eigvals_only=True)
            return float(min(mpmath.re(x) for x in ev))
    return np.linalg.eigvalsh(m + 0.5j * omega)[..., 0]


def reflection_matrix() -> np.ndarray:
    """Diagonal sign flip of the four sine quadratures; ``sigma(-omega)`` is
    ``D sigma(omega) D``."""
    return np.diag([1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0])
