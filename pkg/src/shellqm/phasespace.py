"""Maps between real phase-space coordinates and complex state vectors,
observable evaluation on the shell, and the Poisson-bracket structure.

The complex coordinates are psi_n = sqrt(m*omega/2) q_n + i p_n / sqrt(2 m
omega); in them the constant-energy ellipsoid becomes the sphere
<psi|psi> = hbar, and quadratic observables become Hermitian forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    GeneralQuadraticObservable,
    HermitianObservable,
    OscillatorParams,
    PhaseSpacePoint,
    StateVector,
)
from .errors import (
    DimensionMismatchError,
    NonRealValueError,
    NotVanishingAtRestError,
)

# Imaginary residue above this signals a non-Hermitian kernel slipped through.
REAL_RESIDUE_TOL = 1e-8


@dataclass(frozen=True)
class BracketValue:
    """Poisson bracket of two observables evaluated at a state."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise NonRealValueError(f"bracket value is not finite: {self.value!r}")


def _require_dim(actual: int, expected: int, what: str) -> None:
    if actual != expected:
        raise DimensionMismatchError(f"{what}: dimension {actual} does not match {expected}")


def to_complex(pt: PhaseSpacePoint, params: OscillatorParams) -> np.ndarray:
    """Complex coordinates psi_n = sqrt(m w / 2) q_n + i (2 m w)^(-1/2) p_n."""
    _require_dim(pt.dimension, params.dimension, "phase-space point")
    scale = np.sqrt(params.mass * params.omega / 2.0)
    return scale * pt.q + 1j * pt.p / (2.0 * scale)


def to_real(psi: np.ndarray, params: OscillatorParams) -> PhaseSpacePoint:
    """Exact inverse of `to_complex`."""
    psi = np.atleast_1d(np.asarray(psi, dtype=complex))
    _require_dim(psi.shape[0], params.dimension, "complex coordinates")
    scale = np.sqrt(params.mass * params.omega / 2.0)
    return PhaseSpacePoint(q=psi.real / scale, p=psi.imag * 2.0 * scale)


def shell_residual(pt: PhaseSpacePoint, params: OscillatorParams) -> float:
    """Energy-shell residual sum_n (p_n^2/(2 m w) + (m w/2) q_n^2) - hbar.

    Zero exactly when the point's complex coordinates lie on the sphere
    <psi|psi> = hbar; the two constraint forms are algebraically identical.
    """
    _require_dim(pt.dimension, params.dimension, "phase-space point")
    mw = params.mass * params.omega
    energy_form = float(np.sum(pt.p**2 / (2.0 * mw) + (mw / 2.0) * pt.q**2))
    return energy_form - params.hbar


def _real_part(total: complex, context: str) -> float:
    resid = abs(total.imag)
    if resid > REAL_RESIDUE_TOL * max(1.0, abs(total)):
        raise NonRealValueError(f"{context}: imaginary residue {resid:.3e}")
    return float(total.real)


def evaluate_observable(obs: HermitianObservable, state: StateVector) -> float:
    """Value of the Hermitian form <psi|A|psi> at the state."""
    _require_dim(state.dimension, obs.dimension, "state")
    total = np.vdot(state.components, obs.matrix @ state.components)
    return _real_part(complex(total), "observable value")


def evaluate_general(gen: GeneralQuadraticObservable, psi: np.ndarray) -> float:
    """Value of a general quadratic observable at arbitrary complex coordinates.

    constant + 2 Re(sum conj(A_n) psi_n) + <psi|A|psi>
             + 2 Re(sum B_nm conj(psi_n) conj(psi_m)).
    """
    psi = np.atleast_1d(np.asarray(psi, dtype=complex))
    _require_dim(psi.shape[0], gen.dimension, "coordinates")
    linear = 2.0 * np.real(np.vdot(gen.linear, psi))
    hermitian = np.vdot(psi, gen.hermitian @ psi)
    conj_psi = np.conj(psi)
    anomalous = 2.0 * np.real(conj_psi @ gen.anomalous @ conj_psi)
    total = gen.constant + linear + complex(hermitian) + anomalous
    return _real_part(total, "general observable value")


def grad_conj(obs: HermitianObservable, psi: np.ndarray) -> np.ndarray:
    """Wirtinger derivative of the Hermitian form with respect to conj(psi_n):
    (A psi)_n.  The derivative with respect to psi_n is its conjugate."""
    return obs.matrix @ np.asarray(psi, dtype=complex)


def poisson_bracket(
    a: HermitianObservable, b: HermitianObservable, state: StateVector
) -> BracketValue:
    """Poisson bracket {A, B} at the state, computed as i <psi|[A, B]|psi>.

    The commutator path is exact up to rounding; the equivalent derivative
    form i (dA/dpsi dB/dpsi* - dA/dpsi* dB/dpsi) is kept to tests as the
    oracle for the bracket-commutator isomorphism.
    """
    if a.dimension != b.dimension:
        raise DimensionMismatchError(
            f"observables have dimensions {a.dimension} and {b.dimension}"
        )
    _require_dim(state.dimension, a.dimension, "state")
    psi = state.components
    apsi = a.matrix @ psi
    bpsi = b.matrix @ psi
    # i(<A psi|B psi> - <B psi|A psi>) = -2 Im <A psi|B psi>
    return BracketValue(-2.0 * float(np.imag(np.vdot(apsi, bpsi))))


def hermitian_from_function(
    f: Callable[[np.ndarray], float], d: int, step: float = 1e-3
) -> HermitianObservable:
    """Extract the Hermitian kernel of a black-box quadratic observable.

    Builds A_nm from central mixed second differences of f with respect to
    (psi_n*, psi_m) at the origin (Wirtinger second derivatives combined from
    the real and imaginary coordinate directions), then symmetrizes to exact
    Hermiticity.  For f already a Hermitian form this recovers its matrix
    within O(step^2) plus rounding.  f must vanish at rest: |f(0)| <= 1e-6.
    """
    if d < 1:
        raise DimensionMismatchError("dimension must be at least 1")
    if not step > 0:
        raise ValueError("step must be strictly positive")
    zero = np.zeros(d, dtype=complex)
    f0 = float(f(zero))
    if abs(f0) > 1e-6:
        raise NotVanishingAtRestError(f"|f(0)| = {abs(f0):.3e} exceeds 1e-6")

    # Real coordinate directions: index u < d is Re(psi_u), u >= d is Im(psi_(u-d)).
    def direction(u: int) -> np.ndarray:
        e = np.zeros(d, dtype=complex)
        e[u % d] = 1.0 if u < d else 1.0j
        return e

    h = step

    def second(u: int, v: int) -> float:
        eu, ev = direction(u), direction(v)
        if u == v:
            return (f(h * eu) - 2.0 * f0 + f(-h * eu)) / (h * h)
        return (
            f(h * (eu + ev)) - f(h * (eu - ev)) - f(h * (ev - eu)) + f(-h * (eu + ev))
        ) / (4.0 * h * h)

    kernel = np.zeros((d, d), dtype=complex)
    for n in range(d):
        for m in range(d):
            xx = second(n, m)
            yy = second(n + d, m + d)
            yx = second(n + d, m)
            xy = second(n, m + d)
            kernel[n, m] = 0.25 * ((xx + yy) + 1j * (yx - xy))
    kernel = 0.5 * (kernel + kernel.conj().T)
    return HermitianObservable(kernel)
