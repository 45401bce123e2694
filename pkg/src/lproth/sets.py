"""Counterexample sets, gap-spectrum sampling, and randomized progression search.

The square-shell set (membership: squared Euclidean norm within 1/10 of a
nonnegative integer) restricts 3-progression gaps through the parallelogram
identity: for any progression inside it, twice the squared Euclidean gap
lies within 4/10 of an integer.  That functional,

    half_integer_deviation(g) = dist(2 g^2, Z_{>=0}),

is the obstruction measure used throughout: the p = 2 spectrum never
exceeds 0.4, while p != 2 gap lengths escape it.  Integer quantities are
measured on the doubled square because the undoubled intervals of radius
0.4 around half-integers overlap and constrain nothing.

Search never claims nonexistence: exhausting a proposal budget is reported
as exhaustion, with the budget attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .forms import BoxFunction, random_indicator
from .lpgeom import _as_p, lp_norm, lp_norm_batch, sphere_quadrature
from .util import spawn_rng

BOURGAIN_SHELL = 0.1
HALF_INTEGER_CAP = 0.4


@dataclass
class PointSet:
    """Membership predicate over R^d.

    kinds: ``bourgain`` (square-shell set), ``lattice-cube`` (integer lattice
    thickened by eps0 in sup norm), ``grid-indicator`` (cells of a 0/1 box
    function), ``full-box`` ([0, N]^d).
    """

    kind: str
    dim: int
    eps0: float = 0.0
    box: Optional[BoxFunction] = None
    N: float = 0.0

    def contains(self, x) -> bool:
        return bool(self.contains_batch(np.asarray(x, dtype=float)[None, :])[0])

    def contains_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.dim:
            raise ValueError("dimension mismatch")
        if self.kind == "bourgain":
            r2 = np.sum(X * X, axis=1)
            return np.abs(r2 - np.maximum(np.round(r2), 0.0)) <= BOURGAIN_SHELL
        if self.kind == "lattice-cube":
            return np.all(np.abs(X - np.round(X)) <= self.eps0, axis=1)
        if self.kind == "full-box":
            return np.all((X >= 0.0) & (X <= self.N), axis=1)
        if self.kind == "grid-indicator":
            f = self.box
            inside = np.all((X >= 0.0) & (X < f.N), axis=1)
            out = np.zeros(X.shape[0], dtype=bool)
            if np.any(inside):
                idx = np.floor(X[inside] / f.h).astype(int)
                flat = f.values[tuple(idx.T)] if f.d > 1 else f.values[idx[:, 0]]
                out[inside] = flat > 0.5
            return out
        raise ValueError(f"unknown set kind {self.kind!r}")

    def estimate_density(self, box_hi: float, n: int = 10**5, seed: int = 0) -> float:
        rng = spawn_rng(seed, 11)
        pts = rng.uniform(0.0, box_hi, size=(n, self.dim))
        return float(np.mean(self.contains_batch(pts)))


def bourgain_set(dim: int) -> PointSet:
    return PointSet(kind="bourgain", dim=dim)


def lattice_cube_set(dim: int, eps0: float) -> PointSet:
    if not (0.0 < eps0 < 0.5):
        raise ValueError("thickening must lie in (0, 0.5)")
    return PointSet(kind="lattice-cube", dim=dim, eps0=eps0)


def grid_indicator_set(box: BoxFunction) -> PointSet:
    return PointSet(kind="grid-indicator", dim=box.d, box=box, N=box.N)


def full_box_set(dim: int, N: float) -> PointSet:
    return PointSet(kind="full-box", dim=dim, N=N)


def bourgain_membership(x) -> bool:
    """Squared Euclidean norm within 1/10 of some nonnegative integer (zero included)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r2 = float(np.sum(x * x))
    return abs(r2 - max(round(r2), 0)) <= BOURGAIN_SHELL


def lattice_cube_membership(x, eps0: float) -> bool:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return bool(np.all(np.abs(x - np.round(x)) <= eps0))


def parallelogram_check(x, y, p) -> tuple[float, float, float]:
    """(2||y||_p^p, ||x||_p^p + ||x+2y||_p^p - 2||x+y||_p^p, their difference).

    The gap vanishes identically for p = 2 and generically does not
    otherwise; that failure is what unlocks unrestricted gap lengths.
    """
    pv = _as_p(p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    lhs = 2.0 * float(np.sum(np.abs(y) ** pv))
    rhs = (float(np.sum(np.abs(x) ** pv)) + float(np.sum(np.abs(x + 2.0 * y) ** pv))
           - 2.0 * float(np.sum(np.abs(x + y) ** pv)))
    return lhs, rhs, lhs - rhs


def half_integer_deviation(gap: float) -> float:
    """dist(2 gap^2, Z_{>=0}); at most 0.4 for every progression in the square-shell set."""
    v = 2.0 * gap * gap
    return abs(v - max(round(v), 0))


@dataclass
class ProgressionWitness:
    x: np.ndarray
    y: np.ndarray
    p: float
    gap: float
    residuals: tuple

    def verify(self, A: PointSet, lam: float, tol: float) -> bool:
        """Independent re-check: memberships from scratch plus the gap window."""
        pts = np.stack([self.x, self.x + self.y, self.x + 2.0 * self.y])
        ok = bool(np.all(A.contains_batch(pts)))
        return ok and abs(lp_norm(self.y, self.p) - lam) <= tol


@dataclass
class GapSpectrum:
    p: float
    gaps: np.ndarray
    proposals_used: int
    max_half_integer_deviation: float = field(init=False)

    def __post_init__(self):
        self.gaps = np.asarray(self.gaps, dtype=float)
        if self.gaps.size:
            v = 2.0 * self.gaps**2
            self.max_half_integer_deviation = float(np.max(np.abs(v - np.maximum(np.round(v), 0.0))))
        else:
            self.max_half_integer_deviation = 0.0

    def histogram(self, bins: int = 64):
        return np.histogram(self.gaps, bins=bins)


def _member_pool(A: PointSet, box_hi: float, count: int, rng, max_draws: int = 10**8) -> np.ndarray:
    out = []
    got = 0
    draws = 0
    while got < count and draws < max_draws:
        n = max(4 * (count - got), 4096)
        pts = rng.uniform(0.0, box_hi, size=(n, A.dim))
        keep = pts[A.contains_batch(pts)]
        out.append(keep)
        got += keep.shape[0]
        draws += n
    pool = np.concatenate(out, axis=0)
    if pool.shape[0] == 0:
        raise RuntimeError("no set members found in the probe box")
    return pool[:count]


def gap_spectrum_sample(A: PointSet, p, box_hi: float, n_hits: int,
                        max_proposals: int = 10**7, seed: int = 0) -> GapSpectrum:
    """Rejection-sample verified 3-progressions and record their lp gap lengths.

    Proposals draw a set member x and a uniform gap vector; a proposal is
    recorded only if all three points pass membership.  Zero hits inside
    the budget is an admissible outcome (it is the expected one for
    forbidden-gap probes).
    """
    pv = _as_p(p)
    rng = spawn_rng(seed, 13)
    gaps = []
    hits = 0
    used = 0
    batch = 200_000
    half = box_hi / 2.0
    while hits < n_hits and used < max_proposals:
        n = min(batch, max_proposals - used)
        xs = _member_pool(A, box_hi, n, rng)
        ys = rng.uniform(-half, half, size=(n, A.dim))
        ok = A.contains_batch(xs + ys) & A.contains_batch(xs + 2.0 * ys)
        used += n
        if np.any(ok):
            g = lp_norm_batch(ys[ok], pv)
            nz = g > 1e-12  # discard the degenerate y ~ 0 progressions
            gaps.append(g[nz])
            hits += int(np.count_nonzero(nz))
    allg = np.concatenate(gaps) if gaps else np.zeros(0)
    return GapSpectrum(p=pv, gaps=allg[:n_hits], proposals_used=used)


@dataclass
class SearchOutcome:
    witness: Optional[ProgressionWitness]
    proposals_used: int
    exhausted: bool


def progression_search(A: PointSet, p, lam: float, tol: float, budget: int,
                       box_hi: float, seed: int = 0) -> SearchOutcome:
    """Randomized witness search at one gap scale.

    Base points come from rejection sampling inside the probe box; gap
    proposals are sphere-rule directions jittered radially inside the
    tolerance window, so every proposal satisfies the gap constraint by
    construction and only the three memberships are at stake.  Any
    returned witness is re-verified independently before release.
    """
    pv = _as_p(p)
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    rng = spawn_rng(seed, 17)
    rule = sphere_quadrature(pv, A.dim, lam, n=2048,
                             mode="deterministic-graph" if A.dim <= 3 else "shell-monte-carlo",
                             seed=seed)
    nodes = rule.nodes
    used = 0
    batch = 100_000
    while used < budget:
        n = min(batch, budget - used)
        xs = _member_pool(A, box_hi, n, rng)
        pick = rng.integers(0, nodes.shape[0], size=n)
        scale = 1.0 + rng.uniform(-0.9, 0.9, size=n) * (tol / lam)
        ys = nodes[pick] * scale[:, None]
        ok = A.contains_batch(xs + ys) & A.contains_batch(xs + 2.0 * ys)
        used += n
        if np.any(ok):
            i = int(np.argmax(ok))
            x, y = xs[i], ys[i]
            gap = lp_norm(y, pv)
            w = ProgressionWitness(x=x, y=y, p=pv, gap=gap, residuals=(0.0, 0.0, 0.0))
            if not w.verify(A, lam, tol):
                raise AssertionError("internal: candidate failed independent re-verification")
            return SearchOutcome(witness=w, proposals_used=used, exhausted=False)
    return SearchOutcome(witness=None, proposals_used=used, exhausted=True)


@dataclass
class LacunarySequence:
    values: list
    min_ratio: float

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def lacunary_generate(lambda1: float, ratio: float, J: int) -> LacunarySequence:
    """Geometric scale sequence lambda1 * ratio^j with the doubling certificate."""
    if ratio < 2.0:
        raise ValueError("ratio must be at least 2 (sequence must at least double)")
    if lambda1 <= 1.0:
        raise ValueError("first scale must exceed 1")
    if J < 1:
        raise ValueError("need at least one scale")
    vals = [lambda1 * ratio**j for j in range(J)]
    ratios = [b / a for a, b in zip(vals, vals[1:])] or [ratio]
    return LacunarySequence(values=vals, min_ratio=min(ratios))


@dataclass
class TheoremExperimentReport:
    delta: float
    p: float
    d: int
    N: float
    lambdas: list
    realized: list  # per seed, the list of scale indices with a verified witness
    all_seeds_realized: bool
    witnesses: list


def theorem_experiment(delta: float, p, d: int, N: float, sequence: LacunarySequence,
                       seeds: Sequence[int], budget_per_scale: int = 200_000,
                       cell: float = 1.0) -> TheoremExperimentReport:
    """Desk-scale positive control for the progression claim.

    Each seed draws a random density-delta cell indicator on [0, N]^d and
    searches every scale of the sequence with tolerance d * cell.  A seed
    counts as realized when at least one scale yields a verified witness.
    Failures are findings, not errors.
    """
    pv = _as_p(p)
    if pv in (1.0, 2.0):
        raise ValueError("degenerate exponents are rejected by the progression experiment")
    if d > 3:
        raise ValueError("experiment supports d <= 3")
    lams = list(sequence)
    if max(lams) > N / 4.0:
        raise ValueError("largest scale must satisfy lam <= N/4")
    realized = []
    witnesses = []
    tol = d * cell
    for si, seed in enumerate(seeds):
        f = random_indicator(N, cell, d, delta, seed=int(seed))
        A = grid_indicator_set(f)
        got = []
        for j, lam in enumerate(lams):
            out = progression_search(A, pv, lam, tol=tol, budget=budget_per_scale,
                                     box_hi=N, seed=int(seed) * 97 + j)
            if out.witness is not None:
                got.append(j)
                witnesses.append((int(seed), j, out.witness))
        realized.append(got)
    return TheoremExperimentReport(
        delta=delta, p=pv, d=d, N=N, lambdas=lams, realized=realized,
        all_seeds_realized=all(len(g) > 0 for g in realized), witnesses=witnesses)
