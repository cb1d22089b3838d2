"""Two-level emitter models: drive Hamiltonian paired with a jump operator.

Basis convention, fixed throughout the package: index 0 is the ground state
|g>, index 1 the excited state |e>, and the lowering operator sends |e> to
|g> (``SIGMA_MINUS[0, 1] = 1``).  Decay rates ``gamma`` carry units of
inverse time, the Rabi frequency ``omega`` inverse time, and the coherent
beam amplitude ``alpha`` the square root of a rate, so that ``|alpha|^2``
is a photon flux.

A c-number offset of the jump operator is represented as that number times
the 2x2 identity, which keeps every jump operator a plain matrix.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "IDENTITY",
    "AtomParams",
    "Unraveling",
    "standard_unraveling",
    "shifted_unraveling",
    "waveguide_unraveling",
    "gauge_shift",
]

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
SIGMA_PLUS = SIGMA_MINUS.conj().T.copy()
IDENTITY = np.eye(2, dtype=np.complex128)

_HERMITICITY_TOL = 1.0e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class AtomParams:
    """Physical parameters of the driven emitter.

    gamma: spontaneous decay rate (> 0).
    omega: Rabi frequency of the classical drive (real).
    alpha: coherent beam amplitude; complex values are supported even
        though typical scans use real ones.
    """

    gamma: float
    omega: float = 0.0
    alpha: complex = 0.0 + 0.0j

    def __post_init__(self) -> None:
        if not (np.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be finite and > 0, got {self.gamma}")
        if not np.isfinite(self.omega):
            raise ValueError(f"omega must be finite, got {self.omega}")
        if not cmath.isfinite(complex(self.alpha)):
            raise ValueError(f"alpha must be finite, got {self.alpha}")


@dataclass(frozen=True)
class Unraveling:
    """A Hamiltonian/jump-operator pair on the two-level space.

    The pair fixes both the unconditional master equation and the detection
    scheme whose clicks the counting statistics refer to.  The Hamiltonian
    must be Hermitian; both operators are stored as read-only 2x2 arrays.
    """

    hamiltonian: np.ndarray
    jump: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        h = _readonly(self.hamiltonian)
        ell = _readonly(self.jump)
        for name, op in (("hamiltonian", h), ("jump", ell)):
            if op.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2, got shape {op.shape}")
            if not np.all(np.isfinite(op.real)) or not np.all(np.isfinite(op.imag)):
                raise ValueError(f"{name} has non-finite entries")
        herm_defect = float(np.max(np.abs(h - h.conj().T)))
        if herm_defect > _HERMITICITY_TOL:
            raise ValueError(f"hamiltonian not Hermitian (defect {herm_defect:.3e})")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jump", ell)

    def effective_hamiltonian(self) -> np.ndarray:
        """Non-Hermitian generator of the no-jump evolution, H - (i/2) L^dag L."""
        return self.hamiltonian - 0.5j * (self.jump.conj().T @ self.jump)


def standard_unraveling(params: AtomParams) -> Unraveling:
    """Resonantly driven emitter with the bare decay jump operator.

    H = omega (sigma_+ + sigma_-), L = sqrt(gamma) sigma_-; ``params.alpha``
    is ignored.  Clicks of this unraveling are photons emitted by the atom.
    """
    h = params.omega * (SIGMA_PLUS + SIGMA_MINUS)
    ell = np.sqrt(params.gamma) * SIGMA_MINUS
    return Unraveling(h, ell, label="standard")


def shifted_unraveling(params: AtomParams) -> Unraveling:
    """Same master equation as ``standard_unraveling``, shifted detector.

    H = (omega - sqrt(gamma) alpha / 2) sigma_+ + h.c.,
    L = sqrt(gamma) sigma_- + i alpha.
    The Rabi redefinition compensates the jump-operator shift, so the
    unconditional dynamics at fixed ``omega`` is alpha-independent while
    the click statistics is not.
    """
    coeff = params.omega - 0.5 * np.sqrt(params.gamma) * complex(params.alpha)
    h = coeff * SIGMA_PLUS + np.conj(coeff) * SIGMA_MINUS
    ell = np.sqrt(params.gamma) * SIGMA_MINUS + 1j * complex(params.alpha) * IDENTITY
    return Unraveling(h, ell, label="shifted")


def waveguide_unraveling(gamma: float, alpha: complex) -> Unraveling:
    """Emitter coupled to a chiral waveguide carrying a coherent beam.

    H = (sqrt(gamma) alpha / 2) sigma_+ + h.c., L = sqrt(gamma) sigma_- + i alpha:
    the detector at the waveguide output sees emitted light superposed with
    the transmitted beam.  Coincides with ``shifted_unraveling`` at
    omega = sqrt(gamma) * alpha.
    """
    if not (np.isfinite(gamma) and gamma > 0.0):
        raise ValueError(f"gamma must be finite and > 0, got {gamma}")
    if not cmath.isfinite(complex(alpha)):
        raise ValueError(f"alpha must be finite, got {alpha}")
    coeff = 0.5 * np.sqrt(gamma) * complex(alpha)
    h = coeff * SIGMA_PLUS + np.conj(coeff) * SIGMA_MINUS
    ell = np.sqrt(gamma) * SIGMA_MINUS + 1j * complex(alpha) * IDENTITY
    return Unraveling(h, ell, label="waveguide")


def gauge_shift(u: Unraveling, chi: complex) -> Unraveling:
    """Offset the jump operator by a c-number without changing the ME.

    L -> L + chi, H -> H - (i/2) (chi^* L - chi L^dag).  The compensating
    Hamiltonian term is anti-Hermitian times -i/2, so the result is
    Hermitian by construction; a violation beyond tolerance signals an
    implementation bug and raises.
    """
    chi = complex(chi)
    if not cmath.isfinite(chi):
        raise ValueError(f"chi must be finite, got {chi}")
    ell = u.jump + chi * IDENTITY
    h = u.hamiltonian - 0.5j * (np.conj(chi) * u.jump - chi * u.jump.conj().T)
    defect = float(np.max(np.abs(h - h.conj().T)))
    if defect > _HERMITICITY_TOL:
        raise RuntimeError(f"gauge_shift produced a non-Hermitian Hamiltonian "
                           f"(defect {defect:.3e})")
    return Unraveling(h, ell, label=f"{u.label}+gauge" if u.label else "gauge")
