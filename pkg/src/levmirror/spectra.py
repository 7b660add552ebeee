"""Frequency-domain solution of the linearized dynamics.

``T(omega) = (-i omega I - A)^-1`` maps the scaled bath inputs
``(sqrt(Gamma) b_in, sqrt(Gamma) b_in^dagger, sqrt(kappa) a_in, sqrt(kappa) a_in^dagger)``
to the system fluctuations. Together with the input-output relations
``o_out = o_in - sqrt(rate) o`` this gives every output quadrature as a linear
combination of vacuum inputs at ``+omega`` and ``-omega``.

Two numerical paths share one interface:

* ``dps=None`` (default): float64 numpy, vectorized over an array of ``omega``.
* ``dps=<int>``: :mod:`mpmath` at that many decimal digits, scalar ``omega``.
  The scattering near the mechanical resonance is so strongly squeezing that
  the resulting covariance matrix cannot be represented in float64 accurately
  enough to certify purity; the extended path exists for such checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .errors import ConsistencyError, NumericalError

__all__ = [
    "TransferData",
    "IOCoefficients",
    "transfer_matrix",
    "io_coefficients",
    "commutator_defect",
]

COND_LIMIT = 1e12
CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class TransferData:
    """``T(omega)`` and ``T(-omega)``.

    For the float path ``T_plus``/``T_minus`` have shape ``omega.shape + (4, 4)``;
    for the extended path they are ``mpmath.matrix`` objects and ``omega`` is a
    scalar. ``residual`` is the largest normwise backward error
    ``||M T - I|| / (||M|| ||T||)`` over both signs and all frequencies.
    """

    omega: object
    T_plus: object
    T_minus: object
    residual: float
    dps: Optional[int] = None


def _transfer_float(A, omega, cond_limit):
    A = np.asarray(A, dtype=complex)
    w = np.asarray(omega, dtype=float)
    eye = np.eye(4)
    out = []
    worst = 0.0
    for sign in (1.0, -1.0):
        M = -1j * sign * w[..., None, None] * eye - A
        cond = np.linalg.cond(M)
        bad = ~(cond <= cond_limit)
        if np.any(bad):
            first = float(np.broadcast_to(w, cond.shape)[bad].ravel()[0]) * sign
            raise NumericalError(
                f"-i omega I - A is singular or ill-conditioned (cond > {cond_limit:g})",
                omega=first)
        T = np.linalg.inv(M)
        res = np.linalg.norm(M @ T - eye, ord=np.inf, axis=(-2, -1))
        scale = (np.linalg.norm(M, ord=np.inf, axis=(-2, -1))
                 * np.linalg.norm(T, ord=np.inf, axis=(-2, -1)))
        worst = max(worst, float(np.max(res / scale)))
        out.append(T)
    return TransferData(w if w.ndim else float(w), out[0], out[1], worst)


def _transfer_mp(A, omega, dps, cond_limit):
    if np.ndim(omega) != 0:
        raise ValueError("the extended-precision path takes a scalar omega")
    A = np.asarray(A, dtype=complex)
    with mpmath.workdps(dps):
        w = mpmath.mpf(float(omega))
        Amp = mpmath.matrix([[mpmath.mpc(complex(z)) for z in row] for row in A])
        eye = mpmath.eye(4)
        out = []
        worst = mpmath.mpf(0)
        for sign in (1, -1):
            M = mpmath.mpc(0, -sign) * w * eye - Amp
            try:
                T = M**-1
            except ZeroDivisionError as exc:
                raise NumericalError("-i omega I - A is singular", omega=sign * float(omega)) from exc
            scale = mpmath.mnorm(M, "inf") * mpmath.mnorm(T, "inf")
            if scale > cond_limit:
                raise NumericalError(
                    f"-i omega I - A is ill-conditioned (cond > {cond_limit:g})",
                    omega=sign * float(omega))
            worst = max(worst, mpmath.mnorm(M * T - eye, "inf") / scale)
            out.append(T)
        return TransferData(float(omega), out[0], out[1], float(worst), dps)


def transfer_matrix(A, omega, dps: Optional[int] = None,
                    cond_limit: float = COND_LIMIT) -> TransferData:
    """Evaluate ``T(omega)`` and ``T(-omega)``.

    Parameters
    ----------
    A : array_like, shape (4, 4)
        Drift matrix in the basis ``(b, b^dagger, a, a^dagger)``.
    omega : float or array_like
        Sideband angular frequency, rad/s. Arrays are only accepted by the
        float path.
    dps : int, optional
        Decimal digits for the extended-precision path.
    cond_limit : float
        Largest acceptable condition number of ``-i omega I - A``.

    Raises
    ------
    NumericalError
        If ``-i omega I - A`` is singular or its condition number exceeds
        ``cond_limit``; the offending frequency is attached.
    """
    if dps is None:
        return _transfer_float(A, omega, cond_limit)
    return _transfer_mp(A, omega, dps, cond_limit)


# keys: (kind, mode, quadrature sign); kind 'B' multiplies b_in, 'A' multiplies a_in
_KEYS = [(kind, mode, s) for kind in ("B", "A") for mode in ("a", "b") for s in (1, -1)]


@dataclass(frozen=True)
class IOCoefficients:
    """The eight coefficient functions at ``+omega`` and at ``-omega``.

    With ``X^s_o = (o_out + s o_out^dagger) / sqrt(2)`` for output mode ``o``
    in ``{'a', 'b'}`` and sign ``s = +-1``::

        sqrt(2) X^s_o(w) = B^s_o(w) b_in(w) + s B^s_o(-w)* b_in(-w)^dagger
                         + A^s_o(w) a_in(w) + s A^s_o(-w)* a_in(-w)^dagger

    Use :meth:`get` to read a coefficient. ``consistency_deviation`` is the
    largest relative mismatch between the primary definitions and the
    conjugate forms read off the other columns of ``T``.
    """

    omega: object
    plus: dict
    minus: dict
    consistency_deviation: float
    dps: Optional[int] = None

    def get(self, kind: str, mode: str, sign: int, freq: int = 1):
        """Coefficient ``kind^sign_mode(freq * omega)``; ``kind`` is ``'A'`` or ``'B'``."""
        table = self.plus if freq > 0 else self.minus
        return table[(kind, mode, 1 if sign > 0 else -1)]


def _entry(T, i, j):
    # 1-based (i, j) entry of a 4x4 matrix or a stack of them
    if isinstance(T, mpmath.matrix):
        return T[i - 1, j - 1]
    return T[..., i - 1, j - 1]


def _primary(T, kappa, Gamma, sqrt_kg):
    out = {}
    for s in (1, -1):
        out[("B", "a", s)] = -(_entry(T, 3, 1) + s * _entry(T, 4, 1)) * sqrt_kg
        out[("A", "a", s)] = -(kappa * (_entry(T, 3, 3) + s * _entry(T, 4, 3)) - 1)
        out[("B", "b", s)] = -(Gamma * (_entry(T, 1, 1) + s * _entry(T, 2, 1)) - 1)
        out[("A", "b", s)] = -sqrt_kg * (_entry(T, 1, 3) + s * _entry(T, 2, 3))
    return out


def _conjugate_forms(T, kappa, Gamma, sqrt_kg):
    """``s * X^s(-w)*`` for each coefficient, read from columns 2 and 4 of T(w)."""
    out = {}
    for s in (1, -1):
        out[("B", "a", s)] = -(_entry(T, 3, 2) + s * _entry(T, 4, 2)) * sqrt_kg
        out[("A", "a", s)] = -(kappa * (_entry(T, 3, 4) + s * _entry(T, 4, 4)) - s)
        out[("B", "b", s)] = -(Gamma * (_entry(T, 1, 2) + s * _entry(T, 2, 2)) - s)
        out[("A", "b", s)] = -sqrt_kg * (_entry(T, 1, 4) + s * _entry(T, 2, 4))
    return out


def _max_abs(values):
    return max(float(np.max(np.abs(np.asarray(complex(v) if isinstance(v, mpmath.mpc) else v))))
               for v in values)


def io_coefficients(data: TransferData, kappa: float, Gamma: float,
                    tol: float = CONSISTENCY_TOL) -> IOCoefficients:
    """Output-quadrature coefficients from the transfer matrices.

    The primary definitions (first column for ``b_in``, third for ``a_in``)
    are evaluated at both ``+omega`` and ``-omega``. The second and fourth
    columns of ``T(+-omega)`` must reproduce the conjugated coefficients at
    ``-+omega``; the worst mismatch, relative to the largest coefficient
    magnitude (at least 1), is stored on the result.

    Raises
    ------
    ConsistencyError
        If that mismatch exceeds ``tol``.
    """
    if data.dps is None:
        sqrt_kg = np.sqrt(kappa * Gamma)
        plus = _primary(data.T_plus, kappa, Gamma, sqrt_kg)
        minus = _primary(data.T_minus, kappa, Gamma, sqrt_kg)
        conj_plus = _conjugate_forms(data.T_plus, kappa, Gamma, sqrt_kg)
        conj_minus = _conjugate_forms(data.T_minus, kappa, Gamma, sqrt_kg)
        scale = max(1.0, _max_abs(plus.values()), _max_abs(minus.values()))
        dev = 0.0
        for key in _KEYS:
            s = key[2]
            dev = max(dev, float(np.max(np.abs(conj_plus[key] - s * np.conj(minus[key])))),
                      float(np.max(np.abs(conj_minus[key] - s * np.conj(plus[key])))))
        dev /= scale
    else:
        with mpmath.workdps(data.dps):
            k, G = mpmath.mpf(kappa), mpmath.mpf(Gamma)
            sqrt_kg = mpmath.sqrt(k * G)
            plus = _primary(data.T_plus, k, G, sqrt_kg)
            minus = _primary(data.T_minus, k, G, sqrt_kg)
            conj_plus = _conjugate_forms(data.T_plus, k, G, sqrt_kg)
            conj_minus = _conjugate_forms(data.T_minus, k, G, sqrt_kg)
            scale = max(1.0, _max_abs(plus.values()), _max_abs(minus.values()))
            dev = 0.0
            for key in _KEYS:
                s = key[2]
                dev = max(dev,
                          float(abs(conj_plus[key] - s * mpmath.conj(minus[key]))),
                          float(abs(conj_minus[key] - s * mpmath.conj(plus[key]))))
            dev /= scale
    if not dev <= tol:
        raise ConsistencyError(
            f"coefficient functions disagree with their conjugate forms "
            f"(relative deviation {dev:.3g} > {tol:g})")
    return IOCoefficients(data.omega, plus, minus, dev, data.dps)


def _mode_amplitudes(coeffs: IOCoefficients, mode: str, freq: int):
    """Coefficients of ``o_out(freq*w)`` on ``(b_in, a_in)`` at ``freq*w`` (u)
    and on ``(b_in^dagger, a_in^dagger)`` at ``-freq*w`` (v)."""
    conj = mpmath.conj if coeffs.dps is not None else np.conj
    u, v = [], []
    for kind in ("B", "A"):
        xp = coeffs.get(kind, mode, 1, freq)
        xm = coeffs.get(kind, mode, -1, freq)
        yp = coeffs.get(kind, mode, 1, -freq)
        ym = coeffs.get(kind, mode, -1, -freq)
        # o = (X^+ + X^-) / sqrt(2)
        u.append((xp + xm) / 2)
        v.append((conj(yp) - conj(ym)) / 2)
    return u, v


def commutator_defect(coeffs: IOCoefficients):
    """Deviation of ``[o_out(w), o_out(w)^dagger]`` from 1 for both outputs.

    For vacuum-preserving linear dynamics the output scattering is a
    Bogoliubov transformation, so ``sum |u|^2 - sum |v|^2 = 1`` for each output
    mode at each frequency. Returns the largest ``| . - 1|`` (array for a
    frequency grid).
    """
    worst = None
    if coeffs.dps is not None:
        with mpmath.workdps(coeffs.dps):
            for mode in ("a", "b"):
                for freq in (1, -1):
                    u, v = _mode_amplitudes(coeffs, mode, freq)
                    val = sum(abs(x)**2 for x in u) - sum(abs(x)**2 for x in v)
                    d = float(abs(val - 1))
                    worst = d if worst is None else max(worst, d)
        return worst
    for mode in ("a", "b"):
        for freq in (1, -1):
            u, v = _mode_amplitudes(coeffs, mode, freq)
            val = sum(np.abs(x)**2 for x in u) - sum(np.abs(x)**2 for x in v)
            d = np.abs(val - 1)
            worst = d if worst is None else np.maximum(worst, d)
    return worst
