"""Domain types shared by every module: oscillator parameters, phase-space
points, on-shell state vectors with phase-equivalence semantics, and Hermitian
observables.

States live on the sphere <psi|psi> = hbar.  Two state vectors differing by a
unit-modulus factor describe the same physical state; `canonical_phase` picks
a deterministic representative and `states_equal` compares up to phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotSquareError,
    OffShellError,
    ZeroVectorError,
)

# Double-precision tolerances, chosen with headroom above machine epsilon.
TOL_SHELL = 1e-10   # relative, shell norm residual
TOL_HERM = 1e-12    # absolute, Hermiticity of O(1) entries
TOL_ZERO = 1e-12    # absolute, "numerically zero" component modulus


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OscillatorParams:
    """Parameters of the d-dimensional oscillator model.

    The derived energy is hbar*omega; the derived spin (d-1)/2 is interpretive
    metadata with no operational role.
    """

    dimension: int
    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not isinstance(self.dimension, (int, np.integer)) or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")
        for name in ("mass", "omega", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def energy(self) -> float:
        return self.hbar * self.omega

    @property
    def spin(self) -> float:
        return (self.dimension - 1) / 2


@dataclass(frozen=True, eq=False)
class PhaseSpacePoint:
    """Real coordinates and momenta (q_n, p_n) of the oscillator."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.ndim != 1 or p.ndim != 1 or q.shape != p.shape:
            raise DimensionMismatchError(
                f"q and p must be 1-d vectors of equal length, got {q.shape} and {p.shape}"
            )
        object.__setattr__(self, "q", _readonly(q))
        object.__setattr__(self, "p", _readonly(p))

    @property
    def dimension(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex state vector on the shell <psi|psi> = hbar.

    Instances are produced by `make_state` / `project_to_shell`, which enforce
    the shell constraint.  Compare with `states_equal`, never `==`: vectors
    differing by a pure phase are the same state.
    """

    components: np.ndarray
    hbar: float

    @property
    def dimension(self) -> int:
        return self.components.shape[0]

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.components) ** 2))


@dataclass(frozen=True, eq=False)
class HermitianObservable:
    """Quantum observable: the Hermitian matrix of the form <psi|A|psi>."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotSquareError(f"observable matrix must be square, got shape {m.shape}")
        resid = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
        if resid > TOL_HERM:
            raise NotHermitianError(f"matrix is not Hermitian (max residual {resid:.3e})")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class GeneralQuadraticObservable:
    """Quadratic truncation of a real phase-space function: constant + linear
    + Hermitian form + anomalous (conjugate-pair) terms."""

    constant: float
    linear: np.ndarray
    hermitian: np.ndarray
    anomalous: np.ndarray

    def __post_init__(self):
        lin = np.atleast_1d(np.asarray(self.linear, dtype=complex))
        herm = np.asarray(self.hermitian, dtype=complex)
        anom = np.asarray(self.anomalous, dtype=complex)
        d = lin.shape[0]
        if herm.shape != (d, d) or anom.shape != (d, d):
            raise DimensionMismatchError(
                f"linear part has length {d} but matrices have shapes "
                f"{herm.shape} and {anom.shape}"
            )
        if np.max(np.abs(herm - herm.conj().T), initial=0.0) > TOL_HERM:
            raise NotHermitianError("hermitian part fails the Hermiticity check")
        if np.max(np.abs(anom - anom.T), initial=0.0) > TOL_HERM:
            raise NotHermitianError("anomalous part must be symmetric")
        object.__setattr__(self, "linear", _readonly(lin))
        object.__setattr__(self, "hermitian", _readonly(herm))
        object.__setattr__(self, "anomalous", _readonly(anom))

    @property
    def dimension(self) -> int:
        return self.linear.shape[0]


def make_state(components, hbar: float, tol: float = TOL_SHELL) -> StateVector:
    """Validate `components` against the shell norm and wrap as a StateVector.

    Raises OffShellError when |sum |psi_n|^2 - hbar| > tol*hbar, and
    DimensionMismatchError on empty input.  Components are stored unchanged.
    """
    psi = np.atleast_1d(np.asarray(components, dtype=complex))
    if psi.ndim != 1 or psi.shape[0] == 0:
        raise DimensionMismatchError("state components must be a nonempty 1-d vector")
    if not hbar > 0:
        raise ValueError("hbar must be strictly positive")
    residual = float(np.sum(np.abs(psi) ** 2)) - hbar
    if abs(residual) > tol * hbar:
        raise OffShellError(residual)
    return StateVector(_readonly(psi), float(hbar))


def project_to_shell(raw, hbar: float) -> StateVector:
    """Rescale an arbitrary nonzero vector onto the shell of radius sqrt(hbar)."""
    raw = np.atleast_1d(np.asarray(raw, dtype=complex))
    if raw.ndim != 1 or raw.shape[0] == 0:
        raise DimensionMismatchError("input must be a nonempty 1-d vector")
    norm_sq = float(np.sum(np.abs(raw) ** 2))
    if np.max(np.abs(raw)) < TOL_ZERO:
        raise ZeroVectorError("cannot project the zero vector onto the shell")
    return make_state(raw * np.sqrt(hbar / norm_sq), hbar)


def phase_fix(components: np.ndarray, tol_zero: float = TOL_ZERO) -> np.ndarray:
    """Rotate a complex vector so its first above-threshold component is real
    and positive.  Keyed on the first such component (not the largest) so the
    representative is stable under small perturbations of other entries."""
    idx = np.flatnonzero(np.abs(components) > tol_zero)
    if idx.size == 0:
        return np.array(components, dtype=complex)
    lead = components[idx[0]]
    if lead.imag == 0.0 and lead.real > 0.0:
        return np.array(components, dtype=complex)
    phase = lead / abs(lead)
    out = components * np.conj(phase)
    # pin the lead entry exactly real positive so the map is idempotent
    out[idx[0]] = abs(lead)
    return out


def canonical_phase(state: StateVector) -> StateVector:
    """Phase-equivalent representative with the leading component real positive.

    Idempotent, and preserves the shell norm up to a unit-modulus rounding.
    """
    fixed = phase_fix(state.components)
    return StateVector(_readonly(fixed), state.hbar)


def states_equal(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    """True iff a and b are the same physical state: |<a|b>| >= hbar*(1 - tol)."""
    if a.dimension != b.dimension:
        raise DimensionMismatchError(
            f"states have dimensions {a.dimension} and {b.dimension}"
        )
    if a.hbar != b.hbar:
        raise DimensionMismatchError("states live on shells of different radius")
    overlap = abs(np.vdot(a.components, b.components))
    return overlap >= a.hbar * (1.0 - tol)


def config_observable(d: int) -> HermitianObservable:
    """Configuration observable: diagonal matrix with entries 1, 2, ..., d.

    Its outcome n labels the plane (q_n, p_n) the oscillator is confined to.
    """
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return HermitianObservable(np.diag(np.arange(1, d + 1).astype(complex)))
