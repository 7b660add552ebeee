"""Parameter records, physical constants and derived scalars.

All quantities are SI. Angular frequencies and rates are in rad/s.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import DomainError

__all__ = [
    "PhysicalConstants",
    "DEFAULT_CONSTANTS",
    "CODATA_CONSTANTS",
    "SystemParams",
    "DerivedScalars",
    "RegimeReport",
    "laser_frequency",
    "mode_index",
    "input_photon_rate",
    "dimensionless_power",
    "derived_scalars",
    "validate_regime",
    "load_params",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants of nature used by the model.

    ``c`` defaults to the rounded 3e8 m/s so that figures line up with the
    published parameter set; use :data:`CODATA_CONSTANTS` for the exact value.
    """

    hbar: float = 1.054571817e-34
    c: float = 3.0e8
    g_default: float = 9.81

    def __post_init__(self):
        for name in ("hbar", "c", "g_default"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")


DEFAULT_CONSTANTS = PhysicalConstants()
CODATA_CONSTANTS = PhysicalConstants(c=299792458.0)


# JSON key -> attribute name
_JSON_KEYS = {
    "L_m": "L",
    "lambda_L_m": "lambda_L",
    "kappa_rad_s": "kappa",
    "Gamma_rad_s": "Gamma",
    "g_m_s2": "g",
    "p_tilde": "p_tilde",
    "m_ref_kg": "m_ref",
}


@dataclass(frozen=True)
class SystemParams:
    """Experimental inputs for one levitated-mirror configuration.

    Parameters
    ----------
    L : float
        Resting cavity length, m.
    lambda_L : float
        Laser wavelength, m.
    kappa : float
        Cavity amplitude damping rate, rad/s.
    Gamma : float
        Mirror damping rate, rad/s. Zero is allowed (undamped mirror).
    p_tilde : float
        Dimensionless laser power ``P / (m g c)``.
    g : float
        Gravitational acceleration, m/s^2.
    m_ref : float
        Reference mirror mass, kg. Observable results depend on the mass only
        through ``p_tilde``.
    constants : PhysicalConstants
    """

    L: float
    lambda_L: float
    kappa: float
    Gamma: float
    p_tilde: float
    g: float = 9.81
    m_ref: float = 1e-3
    constants: PhysicalConstants = field(default=DEFAULT_CONSTANTS)

    def __post_init__(self):
        for name in ("L", "lambda_L", "kappa", "g", "p_tilde", "m_ref"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        if not (math.isfinite(self.Gamma) and self.Gamma >= 0):
            raise DomainError(f"Gamma must be finite and non-negative, got {self.Gamma!r}")

    @classmethod
    def reference(cls, **overrides) -> "SystemParams":
        """The table-top parameter set: L = 5 cm, 1050 nm, kappa = 1.35e7 rad/s,
        Gamma = 1e4 rad/s and P~ = 0.0017."""
        values = dict(L=0.05, lambda_L=1050e-9, kappa=1.35e7, Gamma=1e4,
                      p_tilde=0.0017, g=9.81)
        values.update(overrides)
        return cls(**values)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def Omega_L(self) -> float:
        return laser_frequency(self.lambda_L, self.constants.c)

    @property
    def j(self) -> int:
        return mode_index(self.L, self.Omega_L, self.constants.c)

    @property
    def N_in(self) -> float:
        return input_photon_rate(self.p_tilde, self.m_ref, self.g, self.Omega_L,
                                 self.constants)

    def to_dict(self) -> dict:
        out = {key: getattr(self, attr) for key, attr in _JSON_KEYS.items()}
        out["c_m_s"] = self.constants.c
        out["hbar_J_s"] = self.constants.hbar
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], **overrides) -> "SystemParams":
        """Build from the flat JSON key-value layout (``L_m``, ``kappa_rad_s``, ...).

        Unknown keys are ignored so that sweep configs can be passed directly.
        ``p_tilde`` may be absent when an override supplies it.
        """
        kwargs = {}
        for key, attr in _JSON_KEYS.items():
            if key in data:
                kwargs[attr] = float(data[key])
        const_kw = {}
        if "c_m_s" in data:
            const_kw["c"] = float(data["c_m_s"])
        if "hbar_J_s" in data:
            const_kw["hbar"] = float(data["hbar_J_s"])
        if const_kw:
            kwargs["constants"] = PhysicalConstants(**const_kw)
        kwargs.update(overrides)
        missing = {"L", "lambda_L", "kappa", "Gamma", "p_tilde"} - set(kwargs)
        if missing:
            raise DomainError(f"parameter set is missing {sorted(missing)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class DerivedScalars:
    Omega_L: float
    j: int
    N_in: float
    N_in_tilde: float


@dataclass(frozen=True)
class RegimeReport:
    """Good-cavity diagnostics for one steady state.

    ``kappa_ratio`` is kappa/Omega_L and ``detuning_ratio`` is the detuning in
    units of the free spectral range, ``|Delta| (L - q) / (pi c)``.
    """

    kappa_ratio: float
    detuning_ratio: float
    kappa_ok: bool
    detuning_ok: bool

    @property
    def ok(self) -> bool:
        return self.kappa_ok and self.detuning_ok


def laser_frequency(lambda_L: float, c: float = DEFAULT_CONSTANTS.c) -> float:
    """Angular frequency ``2 pi c / lambda`` of the driving laser."""
    if not lambda_L > 0:
        raise DomainError(f"wavelength must be positive, got {lambda_L!r}")
    return 2.0 * math.pi * c / lambda_L


def mode_index(L: float, Omega_L: float, c: float = DEFAULT_CONSTANTS.c) -> int:
    """Index of the cavity mode closest to the laser, ``Round(L Omega_L / (pi c))``.

    Ties round away from zero.
    """
    if not (L > 0 and Omega_L > 0):
        raise DomainError("cavity length and laser frequency must be positive")
    j = int(math.floor(L * Omega_L / (math.pi * c) + 0.5))
    if j < 1:
        raise DomainError(
            f"cavity of length {L!r} m is shorter than half a wavelength (mode index 0)"
        )
    return j


def input_photon_rate(p_tilde: float, m: float, g: float, Omega_L: float,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Input photon rate (photons/s) that delivers dimensionless power ``p_tilde``.

    ``P = hbar N_in Omega_L = p_tilde m g c``.
    """
    if not (p_tilde > 0 and m > 0 and g > 0 and Omega_L > 0):
        raise DomainError("p_tilde, m, g and Omega_L must all be positive")
    return p_tilde * m * g * constants.c / (constants.hbar * Omega_L)


def dimensionless_power(N_in: float, m: float, g: float, Omega_L: float,
                        constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Inverse of :func:`input_photon_rate`."""
    if not (N_in > 0 and m > 0 and g > 0 and Omega_L > 0):
        raise DomainError("N_in, m, g and Omega_L must all be positive")
    return constants.hbar * N_in * Omega_L / (m * g * constants.c)


def derived_scalars(params: SystemParams) -> DerivedScalars:
    Omega_L = params.Omega_L
    N_in = input_photon_rate(params.p_tilde, params.m_ref, params.g, Omega_L,
                             params.constants)
    return DerivedScalars(
        Omega_L=Omega_L,
        j=mode_index(params.L, Omega_L, params.constants.c),
        N_in=N_in,
        N_in_tilde=N_in / (params.m_ref * params.g),
    )


def validate_regime(params: SystemParams, branch, kappa_threshold: float = 1e-3,
                    detuning_threshold: float = 1e-3) -> RegimeReport:
    """Check the single-mode, good-cavity assumptions for a steady state.

    Only reports; never raises for a violated condition.
    """
    c = params.constants.c
    r1 = params.kappa / params.Omega_L
    r2 = abs(branch.Delta) * (params.L - branch.q) / (math.pi * c)
    return RegimeReport(r1, r2, r1 < kappa_threshold, r2 < detuning_threshold)


def load_params(path, **overrides) -> SystemParams:
    """Read a :class:`SystemParams` from a flat JSON object on disk."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read parameter file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError(f"{path}: expected a JSON object")
    return SystemParams.from_dict(data, **overrides)
