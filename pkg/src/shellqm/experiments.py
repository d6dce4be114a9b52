"""Monte Carlo harness and statistical verification: empirical outcome
frequencies against the Born distribution, empirical means against the
mean-value proportionality rule, and batch eigenvalue-vs-minimization checks.

Trial i of a run consumes draw i of the seed-keyed counter-based stream, so
tallies are bit-identical however the trials are executed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import HermitianObservable, StateVector, make_state
from .dynamics import flow
from .errors import InsufficientTrialsError, NoConvergenceError
from .measurement import (
    AdmissibleSubspace,
    born_probabilities,
    constrained_min,
    spectrum,
)
from .phasespace import evaluate_observable
from .rng import RNG_ID, master_rng, trial_uniforms

POOL_MIN_EXPECTED = 5.0  # standard Pearson-test pooling threshold

# 99.9th percentile of the chi-square distribution, dof 1..32.
CHI2_999 = {
    1: 10.827566170662733,
    2: 13.815510557964274,
    3: 16.26623619623813,
    4: 18.46682695290317,
    5: 20.515005652432873,
    6: 22.457744484825323,
    7: 24.321886347856854,
    8: 26.12448155837614,
    9: 27.877164871256568,
    10: 29.58829844507442,
    11: 31.264133620239985,
    12: 32.90949040736021,
    13: 34.52817897487089,
    14: 36.12327368039813,
    15: 37.69729821835383,
    16: 39.252354790768464,
    17: 40.79021670690253,
    18: 42.31239633167996,
    19: 43.82019596451753,
    20: 45.31474661812586,
    21: 46.797038041561315,
    22: 48.26794229083518,
    23: 49.7282324664315,
    24: 51.17859777737739,
    25: 52.619655776172834,
    26: 54.05196238857664,
    27: 55.47602020574521,
    28: 56.892285393353625,
    29: 58.301173489794905,
    30: 59.70306430442994,
    31: 61.098306081058126,
    32: 62.487219057088474,
}

_Z_999 = 3.090232306167813  # standard normal 99.9th percentile


def chi2_threshold_999(dof: int) -> float:
    """99.9th chi-square percentile: embedded table for dof <= 32, the
    Wilson-Hilferty cube approximation beyond."""
    if dof < 1:
        raise ValueError("dof must be at least 1")
    if dof in CHI2_999:
        return CHI2_999[dof]
    return dof * (1.0 - 2.0 / (9.0 * dof) + _Z_999 * np.sqrt(2.0 / (9.0 * dof))) ** 3


@dataclass(frozen=True, eq=False)
class FrequencyTable:
    """Tallied outcomes of N repeated measurements of one prepared state."""

    trials: int
    values: np.ndarray        # cluster outcome values
    counts: np.ndarray
    frequencies: np.ndarray   # counts / trials, exact
    reference: np.ndarray     # Born probabilities
    seed: int
    rng_id: str = RNG_ID


@dataclass(frozen=True)
class VerificationReport:
    """One named check: statistic against threshold, with an inputs digest."""

    name: str
    statistic: float
    threshold: float
    passed: bool
    digest: dict = field(default_factory=dict)


def run_trials(
    obs: HermitianObservable, state: StateVector, trials: int, seed: int
) -> FrequencyTable:
    """Tally `trials` independent measurements, each from the freshly prepared
    state.

    A measurement consumes exactly one uniform draw (collapse is
    deterministic), so trial i uses draw i of the seed-keyed stream and the
    table is reproducible byte for byte; an explicit loop of measure() calls
    over a single stream produces identical counts.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    dist = born_probabilities(obs, state)
    cdf = np.cumsum(dist.probabilities)
    u = trial_uniforms(seed, trials)
    outcomes = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
    counts = np.bincount(outcomes, minlength=len(cdf)).astype(np.int64)
    return FrequencyTable(
        trials=trials,
        values=dist.values,
        counts=counts,
        frequencies=counts / trials,
        reference=dist.probabilities,
        seed=seed,
    )


def _pooled(observed: np.ndarray, expected: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge categories with expected count below the pooling threshold into a
    single pool, absorbing the smallest remaining categories until the pool
    itself clears the threshold."""
    big = [k for k in range(len(expected)) if expected[k] >= POOL_MIN_EXPECTED]
    small = [k for k in range(len(expected)) if expected[k] < POOL_MIN_EXPECTED]
    pool_obs = float(np.sum(observed[small])) if small else 0.0
    pool_exp = float(np.sum(expected[small])) if small else 0.0
    big.sort(key=lambda k: expected[k])
    while small and pool_exp < POOL_MIN_EXPECTED and big:
        k = big.pop(0)
        pool_obs += observed[k]
        pool_exp += expected[k]
        small.append(k)
    obs_out = [float(observed[k]) for k in sorted(big)]
    exp_out = [float(expected[k]) for k in sorted(big)]
    if small:
        obs_out.append(pool_obs)
        exp_out.append(pool_exp)
    return np.array(obs_out), np.array(exp_out)


def chi_square(table: FrequencyTable) -> VerificationReport:
    """Pearson goodness-of-fit of the tally against its Born reference.

    Outcomes with expected count below the pooling threshold are pooled;
    passes when the statistic is at or below the 99.9th chi-square percentile
    for the post-pooling degrees of freedom.
    """
    expected = table.reference * table.trials
    observed, expected = _pooled(table.counts.astype(float), expected)
    if len(expected) < 2:
        raise InsufficientTrialsError(
            f"pooling left {len(expected)} category(ies); increase trials"
        )
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    dof = len(expected) - 1
    threshold = chi2_threshold_999(dof)
    return VerificationReport(
        name="chi-square",
        statistic=statistic,
        threshold=threshold,
        passed=statistic <= threshold,
        digest={"dimension": len(table.reference), "seed": table.seed, "trials": table.trials},
    )


def verify_mean_value(
    obs: HermitianObservable, state: StateVector, trials: int, seed: int
) -> VerificationReport:
    """Empirical mean of sampled outcomes against the observable's value
    divided by hbar; passes within four standard errors.

    A rounding guard of 1e-12 * max(1, |expected|) keeps the zero-variance
    case (single-outcome distribution) from failing on accumulation error.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    table = run_trials(obs, state, trials, seed)
    empirical = float(np.dot(table.values, table.counts)) / trials
    expected = evaluate_observable(obs, state) / state.hbar
    centered = table.values - empirical
    var = float(np.dot(centered**2, table.counts)) / (trials - 1)
    sd = float(np.sqrt(max(var, 0.0)))
    threshold = 4.0 * sd / float(np.sqrt(trials)) + 1e-12 * max(1.0, abs(expected))
    diff = abs(empirical - expected)
    return VerificationReport(
        name="mean-proportionality",
        statistic=diff,
        threshold=threshold,
        passed=diff <= threshold,
        digest={"dimension": obs.dimension, "seed": seed, "trials": trials},
    )


def random_hermitian(d: int, rng: np.random.Generator) -> HermitianObservable:
    """Random Hermitian matrix with Gaussian entries, symmetrized."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HermitianObservable(0.5 * (g + g.conj().T))


def random_state(d: int, rng: np.random.Generator, hbar: float = 1.0) -> StateVector:
    """Random state drawn uniformly on the shell."""
    raw = rng.normal(size=d) + 1j * rng.normal(size=d)
    return make_state(raw * np.sqrt(hbar) / np.linalg.norm(raw), hbar)


def courant_fischer_report(
    obs: HermitianObservable, seed: int, hbar: float = 1.0
) -> VerificationReport:
    """Compare constrained minimization at every level against the
    eigensolver; the statistic is the worst relative deviation."""
    es = spectrum(obs)
    worst = 0.0
    failed = False
    for n in range(1, obs.dimension + 1):
        sub = AdmissibleSubspace.for_level(es, n)
        target = float(es.eigenvalues[n - 1])
        try:
            result = constrained_min(obs, sub, seed=seed + n, hbar=hbar)
            dev = abs(result.eigenvalue - target) / max(1.0, abs(target))
        except NoConvergenceError as err:
            best = err.best_value if err.best_value is not None else np.inf
            dev = abs(best / hbar - target) / max(1.0, abs(target))
            failed = True
        worst = max(worst, dev)
    return VerificationReport(
        name="courant-fischer",
        statistic=worst,
        threshold=1e-6,
        passed=(not failed) and worst <= 1e-6,
        digest={"dimension": obs.dimension, "seed": seed},
    )


def courant_fischer_suite(
    dims: list[int], per_dim: int, seed: int
) -> list[VerificationReport]:
    """One report per random Hermitian matrix: constrained minimization must
    reproduce every eigenvalue.  Failures are reported, not thrown."""
    if not dims or any(d < 1 for d in dims):
        raise ValueError("dims must be a nonempty list of positive integers")
    rng = master_rng(seed)
    reports = []
    for d in dims:
        for k in range(per_dim):
            obs = random_hermitian(d, rng)
            reports.append(courant_fischer_report(obs, seed=seed + 1000 * d + k))
    return reports


def norm_conservation_report(
    obs: HermitianObservable, state: StateVector, seed: int
) -> VerificationReport:
    """Shell-norm drift of the exact flow over a spread of parameter values."""
    rng = master_rng(seed)
    times = rng.uniform(-10.0, 10.0, size=16)
    worst = 0.0
    for t in times:
        evolved = flow(obs, state, float(t))
        worst = max(worst, abs(evolved.norm_squared() - state.hbar))
    return VerificationReport(
        name="norm-conservation",
        statistic=worst,
        threshold=1e-9,
        passed=worst <= 1e-9,
        digest={"dimension": obs.dimension, "seed": seed},
    )


def verification_suite(
    obs: HermitianObservable, state: StateVector, trials: int, seed: int
) -> list[VerificationReport]:
    """Full battery for one scenario: Born-frequency goodness of fit, mean
    proportionality, minimization-vs-spectrum, and flow norm conservation."""
    table = run_trials(obs, state, trials, seed)
    return [
        verify_mean_value(obs, state, trials, seed),
        chi_square(table),
        courant_fischer_report(obs, seed, hbar=state.hbar),
        norm_conservation_report(obs, state, seed),
    ]
