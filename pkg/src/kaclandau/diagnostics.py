"""Statistical diagnostics for particle ensembles.

Everything here consumes plain velocity arrays: single snapshots of
shape (n, 3), run-indexed ensembles of shape (R, n, 3), or trajectory
ensembles of shape (R, T, n, 3) with a shared time grid. The weak-form
estimators evaluate the pieces of the marginal evolution identity
(within-group term, far-field coupling, near-field remainder) run by
run, so paired statistics and bootstrap intervals come for free. No
density estimation anywhere: observables enter through their analytic
derivatives only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma, erf, gamma

from .core import (InteractionConfig, Mollifier, div_coefficient,
                   pair_coefficient)
from .testfunctions import TestFunction

__all__ = [
    "Moments",
    "moments",
    "entropy_estimate",
    "entropy_gap",
    "maxwell_speed_cdf",
    "maxwellian_distance",
    "ks_threshold",
    "marginal_histograms",
    "ChaosEstimate",
    "chaos_correlation",
    "HierarchyTerms",
    "hierarchy_terms",
    "WeakFormResidual",
    "weak_form_residual",
    "RemainderScan",
    "remainder_scan",
    "TrendReport",
    "isotonic_trend",
    "DiagnosticsRecord",
    "build_record",
]

MIN_ENTROPY_SAMPLES = 100
MIN_CHAOS_RUNS = 100
DUPLICATE_FRACTION_LIMIT = 0.01


@dataclass(frozen=True)
class Moments:
    momentum: np.ndarray  # (3,) total
    energy: float  # sum of squared speeds, fixed summation order
    covariance: np.ndarray  # (3, 3) empirical second moment
    mean: np.ndarray  # (3,)
    temperature: float  # mean squared fluctuation / 3


def moments(velocities) -> Moments:
    v = np.asarray(velocities, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError("velocities must have shape (n, 3)")
    total = v.sum(axis=0)
    energy = float(np.sum(v * v))
    second = v.T @ v / v.shape[0]
    mean = total / v.shape[0]
    fluct = v - mean
    temperature = float(np.sum(fluct * fluct)) / (3.0 * v.shape[0])
    return Moments(momentum=total, energy=energy, covariance=second,
                   mean=mean, temperature=temperature)


def entropy_estimate(samples, k: int = 5) -> float:
    """Differential entropy (nats) by the k-nearest-neighbor estimator.

    Needs at least 100 samples. A small fraction of exact duplicates is
    dropped from the log-distance average; more than 1% duplicates is a
    degenerate sample set and raises.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("samples must be a 2d array")
    m, d = x.shape
    if m < MIN_ENTROPY_SAMPLES:
        raise ValueError(
            f"entropy estimate needs at least {MIN_ENTROPY_SAMPLES} samples")
    dist, _ = cKDTree(x).query(x, k=k + 1)
    rk = dist[:, k]
    zero = rk == 0.0
    if zero.mean() > DUPLICATE_FRACTION_LIMIT:
        raise ValueError("degenerate sample set: too many duplicate points")
    rk = rk[~zero]
    unit_ball = np.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)
    return float(digamma(m) - digamma(k) + np.log(unit_ball)
                 + d * np.mean(np.log(rk)))


def entropy_gap(velocities, k: int = 5) -> float:
    """Entropy shortfall against the moment-matched Maxwellian (nats).

    Nonnegative in expectation; estimator noise may dip slightly below
    zero near equilibrium.
    """
    v = np.asarray(velocities, dtype=np.float64)
    mom = moments(v)
    if mom.temperature <= 0:
        raise ValueError("degenerate sample set: zero temperature")
    ceiling = 1.5 * np.log(2.0 * np.pi * np.e * mom.temperature)
    return ceiling - entropy_estimate(v - mom.mean, k=k)


def maxwell_speed_cdf(speeds, temperature: float):
    """CDF of the speed |v| under an isotropic Gaussian of the given T."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    x = np.asarray(speeds, dtype=np.float64) / np.sqrt(temperature)
    return (erf(x / np.sqrt(2.0))
            - x * np.sqrt(2.0 / np.pi) * np.exp(-0.5 * x * x))


def maxwellian_distance(velocities) -> float:
    """KS distance of the centered speed sample to the fitted Maxwellian."""
    v = np.asarray(velocities, dtype=np.float64)
    mom = moments(v)
    if mom.temperature <= 0:
        raise ValueError("degenerate sample set: zero temperature")
    speeds = np.sort(np.linalg.norm(v - mom.mean, axis=1))
    m = speeds.size
    cdf = maxwell_speed_cdf(speeds, mom.temperature)
    grid = np.arange(m, dtype=np.float64)
    return float(np.max(np.maximum(cdf - grid / m, (grid + 1.0) / m - cdf)))


def ks_threshold(m: int, level: float = 0.05) -> float:
    """Asymptotic KS rejection threshold at the given level."""
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    return float(np.sqrt(-0.5 * np.log(level / 2.0)) / np.sqrt(m))


def marginal_histograms(velocities, bins: int = 40, limit: float | None = None):
    """Per-axis histograms of the single-particle marginal.

    Returns (edges, counts) with counts of shape (3, bins); a shared
    symmetric range keeps records comparable across snapshot times.
    """
    v = np.asarray(velocities, dtype=np.float64)
    if limit is None:
        limit = float(np.max(np.abs(v))) or 1.0
    edges = np.linspace(-limit, limit, bins + 1)
    counts = np.stack([np.histogram(v[:, d], bins=edges)[0]
                       for d in range(3)])
    return edges, counts


@dataclass(frozen=True)
class ChaosEstimate:
    value: float
    ci_low: float
    ci_high: float
    pair_mean: float
    product_mean: float
    n_runs: int


def chaos_correlation(states, phi=None, psi=None, bootstrap: int = 500,
                      rng=None) -> ChaosEstimate:
    """Two-particle correlation of one-particle observables.

    Estimates the pair expectation of phi and psi over ordered distinct
    particle pairs (within-run average, then across runs) minus the
    product of single-particle means, with a bootstrap percentile
    interval over runs. Chaotic ensembles give values compatible with
    zero. Both observables default to the squared speed; an observable
    maps an (..., 3) velocity array to (...,).
    """
    x = np.asarray(states, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != 3:
        raise ValueError("states must have shape (runs, n, 3)")
    runs, n = x.shape[0], x.shape[1]
    if runs < MIN_CHAOS_RUNS:
        raise ValueError(f"chaos correlation needs at least "
                         f"{MIN_CHAOS_RUNS} runs")
    if n < 2:
        raise ValueError("need at least 2 particles")

    def evaluate(f):
        if f is None:
            return np.sum(x * x, axis=2)
        out = np.asarray(f(x), dtype=np.float64)
        if out.shape != (runs, n):
            raise ValueError("observable must map (runs, n, 3) to (runs, n)")
        return out

    g = evaluate(phi)
    h = evaluate(psi)
    # ordered pairs i != j within a run; subtracting the diagonal
    # removes the shared-particle bias
    pair = (g.sum(axis=1) * h.sum(axis=1)
            - (g * h).sum(axis=1)) / (n * (n - 1.0))
    g1 = g.mean(axis=1)
    h1 = h.mean(axis=1)

    def estimate(idx):
        return float(pair[idx].mean() - g1[idx].mean() * h1[idx].mean())

    value = estimate(np.arange(runs))
    rng = np.random.default_rng(0) if rng is None else rng
    reps = np.empty(bootstrap)
    for b in range(bootstrap):
        reps[b] = estimate(rng.integers(0, runs, size=runs))
    lo, hi = np.percentile(reps, [2.5, 97.5])
    return ChaosEstimate(value=value, ci_low=float(lo), ci_high=float(hi),
                         pair_mean=float(pair.mean()),
                         product_mean=float(g1.mean() * h1.mean()),
                         n_runs=runs)


@dataclass(frozen=True)
class HierarchyTerms:
    """Per-run generator pieces at one snapshot, each shape (runs,).

    within_pair: interactions among the observed group.
    identity: the identity-regularizer Laplacian contribution.
    coupling_far: coupling to unobserved particles outside the
        splitting scale (the hierarchy right-hand side).
    coupling_near: coupling inside the splitting scale (the remainder);
        zero when no splitting scale is given.
    """

    within_pair: np.ndarray
    identity: np.ndarray
    coupling_far: np.ndarray
    coupling_near: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return (self.within_pair + self.identity + self.coupling_far
                + self.coupling_near)


def hierarchy_terms(states, phi: TestFunction, cfg: InteractionConfig,
                    delta: float | None = None,
                    symmetrized: bool = False) -> HierarchyTerms:
    """Evaluate the weak-form generator pieces run by run.

    The generator applied to a function of the first j particles splits
    into a within-group part, the identity-block part, and a coupling
    sum over outside partners; the optional splitting scale delta
    divides the coupling into far and near parts with complementary
    smooth cutoffs (on top of the configured short-range mollifier).

    With symmetrized=True the coupling sum is exchange-averaged: each
    pair term is averaged with the same term evaluated after swapping
    the observed particle with its partner. Under an exchangeable law
    the expectation is unchanged, but the gradient factor becomes a
    difference that vanishes at pair coincidence, so the estimator
    loses the heavy tails of the raw divergence term. The default
    (False) keeps the raw form, whose per-run total matches the
    generator pathwise.
    """
    x = np.asarray(states, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != 3:
        raise ValueError("states must have shape (runs, n, 3)")
    runs, n = x.shape[0], x.shape[1]
    j = phi.j
    if j >= n:
        raise ValueError("observed group must be smaller than the system")
    cfg = cfg.resolve(n)
    splitter = Mollifier(delta) if delta is not None else None

    coords = x[:, :j, :]
    g = phi.grad(coords)  # (runs, j, 3)
    H = phi.hess(coords)  # (runs, j, 3, j, 3)
    kappa = cfg.identity_weight

    identity = np.zeros(runs)
    within = np.zeros(runs)
    for k in range(j):
        identity += kappa * np.trace(H[:, k, :, k, :], axis1=1, axis2=2)
        for l in range(j):
            if l == k:
                continue
            w = x[:, k, :] - x[:, l, :]
            r = np.linalg.norm(w, axis=1)
            c = pair_coefficient(r, cfg)
            dc = div_coefficient(r, cfg)
            hdiff = H[:, k, :, k, :] - H[:, l, :, k, :]
            tr = np.trace(hdiff, axis1=1, axis2=2)
            quad = np.einsum("rd,rdf,rf->r", w, hdiff, w)
            wg = np.einsum("rd,rd->r", w, g[:, k, :])
            safe = np.where(r > 0, r, 1.0)
            within += (2.0 * dc * wg + c * (tr - quad / safe ** 2)) / n

    far = np.zeros(runs)
    near = np.zeros(runs)
    m = n - j
    for k in range(j):
        partners = x[:, j:, :]  # (runs, m, 3)
        w = x[:, k, None, :] - partners
        r = np.linalg.norm(w, axis=2)
        c = pair_coefficient(r, cfg)
        dc = div_coefficient(r, cfg)
        hk = H[:, k, :, k, :]
        safe = np.where(r > 0, r, 1.0)
        if symmetrized:
            swapped = np.broadcast_to(coords[:, None, :, :],
                                      (runs, m, j, 3)).copy()
            swapped[:, :, k, :] = partners
            g_sw = phi.grad(swapped)[:, :, k, :]
            h_sw = phi.hess(swapped)[:, :, k, :, k, :]
            hbar = 0.5 * (hk[:, None, :, :] + h_sw)
            tr = np.trace(hbar, axis1=2, axis2=3)
            quad = np.einsum("rmd,rmdf,rmf->rm", w, hbar, w)
            wg = np.einsum("rmd,rmd->rm", w, g[:, k, None, :] - g_sw)
            terms = (dc * wg + c * (tr - quad / safe ** 2)) / n
        else:
            tr = np.trace(hk, axis1=1, axis2=2)[:, None]
            quad = np.einsum("rmd,rdf,rmf->rm", w, hk, w)
            wg = np.einsum("rmd,rd->rm", w, g[:, k, :])
            terms = (2.0 * dc * wg + c * (tr - quad / safe ** 2)) / n
        if splitter is None:
            far += terms.sum(axis=1)
        else:
            far_weight = splitter.chi_bar(r)
            far += (far_weight * terms).sum(axis=1)
            near += ((1.0 - far_weight) * terms).sum(axis=1)
    return HierarchyTerms(within_pair=within, identity=identity,
                          coupling_far=far, coupling_near=near)


@dataclass(frozen=True)
class WeakFormResidual:
    """Trajectory-level weak-form budget for one test function.

    All entries are ensemble means of per-run quantities; the residual
    is the paired difference lhs - rhs_delta - remainder_delta -
    within_term - identity_term, with its standard error and z score.
    Time integrals use the trapezoid rule on the snapshot grid.
    """

    lhs: float
    rhs_delta: float
    remainder_delta: float
    within_term: float
    identity_term: float
    residual_mean: float
    residual_se: float
    z: float
    n_runs: int
    delta: float | None
    per_run_remainder: np.ndarray = field(repr=False)
    per_run_residual: np.ndarray = field(repr=False)


def weak_form_residual(trajectory, times, phi: TestFunction,
                       cfg: InteractionConfig,
                       delta: float | None = None) -> WeakFormResidual:
    """Test the marginal evolution identity on a trajectory ensemble.

    trajectory has shape (runs, T, n, 3) on the shared time grid times
    (T,). lhs is the per-run change of the observable between the first
    and last snapshot; the generator pieces are integrated over time by
    the trapezoid rule, snapshot by snapshot. The coupling pieces use
    the exchange-averaged estimator (see hierarchy_terms), which keeps
    their ensemble variance bounded near pair coincidences.
    """
    x = np.asarray(trajectory, dtype=np.float64)
    t = np.asarray(times, dtype=np.float64)
    if x.ndim != 4 or x.shape[3] != 3:
        raise ValueError("trajectory must have shape (runs, T, n, 3)")
    if t.ndim != 1 or t.size != x.shape[1]:
        raise ValueError("times must match the trajectory's snapshot axis")
    if t.size < 2:
        raise ValueError("need at least two snapshot times")
    runs, T = x.shape[0], x.shape[1]
    j = phi.j
    lhs = phi.value(x[:, -1, :j, :]) - phi.value(x[:, 0, :j, :])

    weights = np.zeros(T)
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise ValueError("times must be strictly increasing")
    weights[:-1] += 0.5 * dt
    weights[1:] += 0.5 * dt

    pieces = np.zeros((4, runs))
    for s in range(T):
        terms = hierarchy_terms(x[:, s, :, :], phi, cfg, delta,
                                symmetrized=True)
        pieces[0] += weights[s] * terms.coupling_far
        pieces[1] += weights[s] * terms.coupling_near
        pieces[2] += weights[s] * terms.within_pair
        pieces[3] += weights[s] * terms.identity
    resid = lhs - pieces.sum(axis=0)
    se = float(resid.std(ddof=1) / np.sqrt(runs)) if runs > 1 else np.inf
    mean = float(resid.mean())
    return WeakFormResidual(
        lhs=float(lhs.mean()), rhs_delta=float(pieces[0].mean()),
        remainder_delta=float(pieces[1].mean()),
        within_term=float(pieces[2].mean()),
        identity_term=float(pieces[3].mean()),
        residual_mean=mean, residual_se=se,
        z=mean / se if se > 0 else np.inf,
        n_runs=runs, delta=delta,
        per_run_remainder=pieces[1].copy(),
        per_run_residual=resid,
    )


@dataclass(frozen=True)
class RemainderScan:
    """Near-field remainder magnitude against the splitting scale."""

    deltas: np.ndarray  # descending
    means: np.ndarray
    ses: np.ndarray
    slope: float
    ci_low: float
    ci_high: float


def remainder_scan(trajectory, times, phi: TestFunction,
                   cfg: InteractionConfig, deltas, bootstrap: int = 400,
                   rng=None) -> RemainderScan:
    """Fit the decay exponent of the remainder in the splitting scale.

    For each delta the per-run time-integrated near-field term is
    averaged over the ensemble; the exponent is the log-log slope of
    the absolute means, with a bootstrap percentile interval over runs
    (one shared resampling per replicate keeps the fit paired).
    """
    deltas = np.sort(np.asarray(deltas, dtype=np.float64))[::-1]
    if deltas.size < 2 or np.any(deltas <= 0):
        raise ValueError("need at least two positive splitting scales")
    per_run = []
    for d in deltas:
        per_run.append(weak_form_residual(trajectory, times, phi, cfg,
                                          float(d)).per_run_remainder)
    per_run = np.asarray(per_run)  # (len(deltas), runs)
    runs = per_run.shape[1]
    dead = np.all(per_run == 0.0, axis=1)
    if np.any(dead):
        scales = ", ".join(f"{d:g}" for d in deltas[dead])
        raise ValueError(
            f"remainder vanishes identically at scale(s) {scales}: "
            "conserved observable or no pairs inside the shell")
    means = per_run.mean(axis=1)
    ses = per_run.std(axis=1, ddof=1) / np.sqrt(runs)
    logs = np.log(deltas)

    def fit(vals):
        mags = np.abs(vals)
        if np.any(mags == 0.0):
            return np.nan
        return float(np.polyfit(logs, np.log(mags), 1)[0])

    slope = fit(means)
    rng = np.random.default_rng(0) if rng is None else rng
    reps = []
    for _ in range(bootstrap):
        idx = rng.integers(0, runs, size=runs)
        val = fit(per_run[:, idx].mean(axis=1))
        if np.isfinite(val):
            reps.append(val)
    if len(reps) < max(16, bootstrap // 4):
        raise ValueError("remainder means too noisy for a bootstrap fit")
    lo, hi = np.percentile(reps, [2.5, 97.5])
    return RemainderScan(deltas=deltas, means=means, ses=ses, slope=slope,
                         ci_low=float(lo), ci_high=float(hi))


@dataclass(frozen=True)
class TrendReport:
    direction: str  # "nonincreasing" or "nondecreasing"
    sse_down: float
    sse_up: float


def _pava_nondecreasing(y):
    """Pool-adjacent-violators fit, nondecreasing, unit weights."""
    out_level, out_count = [], []
    for v in y:
        out_level.append(float(v))
        out_count.append(1)
        while len(out_level) > 1 and out_level[-2] > out_level[-1]:
            lv2, ct2 = out_level.pop(), out_count.pop()
            lv1, ct1 = out_level.pop(), out_count.pop()
            out_level.append((lv1 * ct1 + lv2 * ct2) / (ct1 + ct2))
            out_count.append(ct1 + ct2)
    return np.concatenate([np.full(ct, lv)
                           for lv, ct in zip(out_level, out_count)])


def isotonic_trend(values) -> TrendReport:
    """Which monotone shape fits better: decreasing or increasing.

    Fits both monotone regressions by pool-adjacent-violators and
    compares squared errors; ties (constant data) count as
    nonincreasing.
    """
    y = np.asarray(values, dtype=np.float64)
    if y.size < 3:
        raise ValueError("need at least 3 points for a trend test")
    up = _pava_nondecreasing(y)
    down = -_pava_nondecreasing(-y)
    sse_up = float(np.sum((y - up) ** 2))
    sse_down = float(np.sum((y - down) ** 2))
    direction = "nonincreasing" if sse_down <= sse_up else "nondecreasing"
    return TrendReport(direction=direction, sse_down=sse_down, sse_up=sse_up)


@dataclass
class DiagnosticsRecord:
    """Observables of one snapshot time across the ensemble.

    Momentum and energy are ensemble means of per-run totals; entropy,
    Maxwellian distance, and histograms pool particles across runs
    (they concern the single-particle marginal). Optional fields hold
    the chaos estimate and per-delta weak-form terms when computed.
    """

    time: float
    momentum: list
    energy: float
    entropy: float | None = None
    entropy_gap: float | None = None
    maxwell_ks: float | None = None
    histogram_edges: list | None = None
    histogram_counts: list | None = None
    chaos: dict | None = None
    weak_form: dict | None = None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "DiagnosticsRecord":
        return cls(**json.loads(line))


def build_record(states, time: float, entropy: bool = True,
                 histogram_bins: int = 40) -> DiagnosticsRecord:
    """Assemble the standard per-snapshot record from (R, n, 3) states."""
    x = np.asarray(states, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != 3:
        raise ValueError("states must have shape (runs, n, 3)")
    per_run = [moments(run) for run in x]
    momentum = np.mean([m.momentum for m in per_run], axis=0)
    energy = float(np.mean([m.energy for m in per_run]))
    pooled = x.reshape(-1, 3)
    rec = DiagnosticsRecord(time=float(time), momentum=momentum.tolist(),
                            energy=energy)
    if entropy and pooled.shape[0] >= MIN_ENTROPY_SAMPLES:
        rec.entropy = entropy_estimate(pooled)
        rec.entropy_gap = entropy_gap(pooled)
    rec.maxwell_ks = maxwellian_distance(pooled)
    edges, counts = marginal_histograms(pooled, bins=histogram_bins)
    rec.histogram_edges = edges.tolist()
    rec.histogram_counts = counts.tolist()
    return rec
