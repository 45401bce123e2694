"""Trilinear progression-counting forms on gridded box functions.

All forms share one Riemann discretization: f lives at cell centers of a
step-h grid over [0, N]^d and is zero outside; gap variables run over
lattice multiples of the same step so that x, x+y, x+2y are grid-aligned
and no interpolation enters the mollified forms.  The sharp-gap form
samples the lp-sphere quadrature nodes instead and evaluates f by
multilinear interpolation, which preserves the [-1, 1] range.

The mollified form with width 1 *is* the base form (same code path), and
the cancelled form is accumulated in a single pass with the fused kernel
so the decomposition identity survives floating cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lpgeom import SphereQuadrature, _as_p
from .mollifier import CancelledKernel, KernelParams, MollifierPair, c1_eps, omega_eps_eval
from .util import compensated_sum, spawn_rng


@dataclass
class BoxFunction:
    """Real values in [-1, 1] at the cell centers of a step-h grid over [0, N]^d."""

    values: np.ndarray
    N: float
    h: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = int(round(self.N / self.h))
        if abs(n * self.h - self.N) > 1e-9 * self.N:
            raise ValueError("box size must be an integer number of cells")
        if self.values.shape != (n,) * self.values.ndim:
            raise ValueError(f"value grid must be cubical with side {n}")
        if np.max(np.abs(self.values)) > 1.0 + 1e-12:
            raise ValueError("values must lie in [-1, 1]")

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def mean(self) -> float:
        return float(np.mean(self.values))


def full_box(N: float, h: float, d: int) -> BoxFunction:
    n = int(round(N / h))
    return BoxFunction(values=np.ones((n,) * d), N=N, h=h)


def random_indicator(N: float, h: float, d: int, density: float, seed: int,
                     structured: bool = False) -> BoxFunction:
    """Indicator of a random cell set with grid mean >= density.

    Plain draws pick ceil(density n^d) cells uniformly; structured draws
    lay axis stripes of the requested density (an adversarial ensemble).
    """
    n = int(round(N / h))
    total = n**d
    want = int(np.ceil(density * total))
    vals = np.zeros(total)
    if structured:
        period = max(2, int(round(1.0 / density)))
        rng = spawn_rng(seed, 3)
        offset = int(rng.integers(period))
        axis = np.zeros(n)
        axis[(np.arange(n) + offset) % period == 0] = 1.0
        grid = axis
        for _ in range(d - 1):
            grid = np.multiply.outer(np.ones(n), grid)
        vals = grid.ravel()
        short = want - int(vals.sum())
        if short > 0:
            empty = np.flatnonzero(vals == 0.0)
            extra = rng.choice(empty, size=short, replace=False)
            vals[extra] = 1.0
    else:
        rng = spawn_rng(seed, 2)
        pick = rng.choice(total, size=want, replace=False)
        vals[pick] = 1.0
    return BoxFunction(values=vals.reshape((n,) * d), N=N, h=h)


@dataclass
class FormValue:
    kind: str
    lam: float
    eps: Optional[float]
    value: float
    quadrature_error: float


def _check_scale(f: BoxFunction, lam: float, eps: float, p: float) -> None:
    if lam > f.N / 4.0 + 1e-12:
        raise ValueError(f"gap scale {lam} too large for box {f.N} (needs lam <= N/4)")
    if f.h > eps * lam / (8.0 * p) + 1e-12:
        raise ValueError(
            f"grid step {f.h} under-resolves the width-{eps} shell at scale {lam}; "
            f"needs h <= {eps * lam / (8.0 * p):.4g}")


def _kernel_lattice(p: float, d: int, lam: float, eps: float, h: float):
    """Lattice gap vectors inside the kernel support and their flat multi-indices."""
    R = lam * (1.0 + 2.0 * eps) ** (1.0 / p)
    jmax = int(np.floor(R / h)) + 1
    ax = np.arange(-jmax, jmax + 1)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    J = np.stack([g.ravel() for g in grids], axis=-1)
    Y = J * h
    return J, Y, jmax


def _triple_sum(f: BoxFunction, J: np.ndarray, kvals: np.ndarray, jmax: int) -> float:
    """sum over lattice gaps j of k(y_j) * sum_x f(x) f(x+j) f(x+2j), zero extension."""
    n = f.n
    d = f.d
    pad = 2 * jmax
    shape = (n + 2 * pad,) * d
    F = np.zeros(shape)
    core = tuple(slice(pad, pad + n) for _ in range(d))
    F[core] = f.values
    parts = []
    base = f.values
    for row, kv in zip(J, kvals):
        if kv == 0.0:
            continue
        s1 = tuple(slice(pad + int(c), pad + int(c) + n) for c in row)
        s2 = tuple(slice(pad + 2 * int(c), pad + 2 * int(c) + n) for c in row)
        parts.append(kv * float(np.sum(base * F[s1] * F[s2])))
    return compensated_sum(parts)


def m_eps_lambda(f: BoxFunction, lam: float, eps: float, m: MollifierPair, p) -> FormValue:
    """Mollified counting form with shell kernel of width eps at scale lam."""
    pv = _as_p(p)
    if f.d not in (1, 2):
        raise ValueError("grid forms support d in {1, 2}")
    _check_scale(f, lam, eps, pv)
    J, Y, jmax = _kernel_lattice(pv, f.d, lam, eps, f.h)
    kvals = omega_eps_eval(Y, KernelParams(pv, f.d, lam, eps), m)
    val = f.h ** (2 * f.d) * _triple_sum(f, J, kvals, jmax)
    rel = min(1.0, (f.h * pv / (eps * lam * 4.0)) ** 2)  # crude second-order heuristic
    return FormValue(kind="M_eps_lambda" if eps != 1.0 else "M_lambda", lam=lam,
                     eps=eps, value=val, quadrature_error=abs(val) * rel + 1e-14)


def m_lambda(f: BoxFunction, lam: float, m: MollifierPair, p) -> FormValue:
    """Base mollified form: exactly the eps = 1 code path."""
    out = m_eps_lambda(f, lam, 1.0, m, p)
    out.kind = "M_lambda"
    return out


def e_lambda(f: BoxFunction, lam: float, eps: float, m: MollifierPair, p,
             c1: Optional[float] = None) -> FormValue:
    """Cancelled form, accumulated in one pass with the fused kernel."""
    pv = _as_p(p)
    if f.d not in (1, 2):
        raise ValueError("grid forms support d in {1, 2}")
    _check_scale(f, lam, eps, pv)
    kern = CancelledKernel(KernelParams(pv, f.d, lam, eps),
                           c1 if c1 is not None else c1_eps(eps, pv, f.d, m), m)
    J, Y, jmax = _kernel_lattice(pv, f.d, lam, 1.0, f.h)  # union support (eps <= 1)
    kvals = kern(Y)
    val = f.h ** (2 * f.d) * _triple_sum(f, J, kvals, jmax)
    rel = min(1.0, (f.h * pv / (eps * lam * 4.0)) ** 2)
    return FormValue(kind="E_lambda", lam=lam, eps=eps, value=val,
                     quadrature_error=abs(val) * rel + 1e-14)


def _interp_shifted(f: BoxFunction, pad_vals: np.ndarray, pad: int, y: np.ndarray) -> np.ndarray:
    """f(x + y) for every cell center x at once, multilinear, zero outside the box."""
    d = f.d
    n = f.n
    out = None
    base = np.floor(y / f.h)
    frac = y / f.h - base
    for corner in range(1 << d):
        w = 1.0
        sl = []
        for axis in range(d):
            bit = (corner >> axis) & 1
            w = w * (frac[axis] if bit else 1.0 - frac[axis])
            off = pad + int(base[axis]) + bit
            sl.append(slice(off, off + n))
        if w == 0.0:
            continue
        term = w * pad_vals[tuple(sl)]
        out = term if out is None else out + term
    return out if out is not None else np.zeros((n,) * d)


def n_lambda(f: BoxFunction, quad: SphereQuadrature, lam: float) -> FormValue:
    """Sharp-gap counting form: x on the grid, gaps on sphere-quadrature nodes.

    A strictly positive value certifies, up to interpolation tolerance, a
    3-progression in supp f whose gap length is lam in the lp metric.
    """
    if abs(quad.lam - lam) > 1e-9 * max(1.0, lam):
        raise ValueError("quadrature radius does not match the requested gap scale")
    if f.d != quad.d:
        raise ValueError("dimension mismatch between grid and quadrature")
    if f.d > 3:
        raise ValueError("sharp form supports d <= 3")
    n, d = f.n, f.d
    jmax = int(np.floor(2.0 * lam / f.h)) + 2
    pad = jmax
    pv_shape = (n + 2 * pad,) * d
    P = np.zeros(pv_shape)
    P[tuple(slice(pad, pad + n) for _ in range(d))] = f.values
    parts = []
    for node, w in zip(quad.nodes, quad.weights):
        f1 = _interp_shifted(f, P, pad, node)
        f2 = _interp_shifted(f, P, pad, 2.0 * node)
        parts.append(w * float(np.sum(f.values * f1 * f2)))
    val = f.h**d * compensated_sum(parts)
    err = abs(val) * min(1.0, f.h * d / lam) + 1e-14
    return FormValue(kind="N_lambda", lam=lam, eps=None, value=val, quadrature_error=err)


def full_box_sharp_oracle(quad: SphereQuadrature, N: float) -> float:
    """Boundary-corrected continuum value of the sharp form on the full box.

    For f = 1 on [0, N]^d the x-section at gap y is a rectangle of measure
    prod max(0, N - 2|y_i|), so the form integrates node by node.
    """
    spans = np.clip(N - 2.0 * np.abs(quad.nodes), 0.0, None)
    return float(np.sum(quad.weights * np.prod(spans, axis=1)))


def full_box_mollified_oracle(lam: float, eps: float, m: MollifierPair, p, d: int,
                              N: float) -> float:
    """Boundary-corrected continuum value of the mollified form on the full box.

    The x integration is exact for f = 1 (a product of clipped spans), so
    only the gap integral over the kernel support remains: adaptive in one
    dimension, positive-quadrant tensor Gauss in two.
    """
    from scipy import integrate

    pv = _as_p(p)
    params = KernelParams(pv, d, lam, eps)
    R = lam * (1.0 + 2.0 * eps) ** (1.0 / pv)
    if d == 1:
        kern = lambda r: omega_eps_eval(np.array([[r]]), params, m)[0]
        val, _ = integrate.quad(lambda r: kern(r) * 2.0 * max(0.0, N - 2.0 * r), 0.0, R,
                                limit=400)
        return val
    if d != 2:
        raise ValueError("closed oracle supports d in {1, 2}")
    width = 2.0 * eps * lam / pv
    n = int(min(1400, max(400, 24.0 * R / width)))
    x, wq = np.polynomial.legendre.leggauss(n)
    pts1 = 0.5 * R * (x + 1.0)
    w1 = 0.5 * R * wq
    Y1, Y2 = np.meshgrid(pts1, pts1, indexing="ij")
    vals = omega_eps_eval(np.column_stack([Y1.ravel(), Y2.ravel()]), params, m).reshape(n, n)
    spans = np.clip(N - 2.0 * Y1, 0.0, None) * np.clip(N - 2.0 * Y2, 0.0, None)
    return float(4.0 * np.sum(vals * spans * np.outer(w1, w1)))


def decomposition_residual(f: BoxFunction, lam: float, eps: float, m: MollifierPair, p) -> float:
    """M_eps - c1 M - E, which is zero by construction up to float association."""
    pv = _as_p(p)
    c1 = c1_eps(eps, pv, f.d, m)
    a = m_eps_lambda(f, lam, eps, m, pv).value
    b = m_lambda(f, lam, m, pv).value
    e = e_lambda(f, lam, eps, m, pv, c1=c1).value
    return a - c1 * b - e


@dataclass
class EnergyReport:
    lambdas: list
    energies: list
    total: float
    f4_mass: float
    ratio: float


def energy_sum(f: BoxFunction, lambdas: Sequence[float], eps: float, m: MollifierPair, p) -> EnergyReport:
    """Squared cancelled-form energies along a lacunary scale sequence.

    The certificate ratio divides the total by N^d ||f||_4^4; stability of
    that ratio as the sequence grows is the J-independence being probed.
    """
    lams = [float(v) for v in lambdas]
    for a, b in zip(lams, lams[1:]):
        if b < 2.0 * a:
            raise ValueError("scale sequence must at least double at each step")
    pv = _as_p(p)
    c1 = c1_eps(eps, pv, f.d, m)
    energies = [abs(e_lambda(f, lam, eps, m, pv, c1=c1).value) ** 2 for lam in lams]
    total = compensated_sum(energies)
    f4 = f.h**f.d * float(np.sum(f.values**4))
    denom = f.N**f.d * f4
    return EnergyReport(lambdas=lams, energies=energies, total=total, f4_mass=f4,
                        ratio=total / denom if denom > 0 else np.inf)


@dataclass
class PigeonholeReport:
    qualifying: int
    L: int
    threshold_ok: bool
    delta: float


def box_partition_pigeonhole(f: BoxFunction, ell: float) -> PigeonholeReport:
    """Partition into side-ell boxes; count those holding at least half the mean density.

    For indicator grids the comparison 2 L S_i >= S_total runs in exact
    integers, so the claimed lower bound I >= delta L / 2 is checked with
    no floating tolerance at all.
    """
    if f.values.min() < 0.0:
        raise ValueError("pigeonhole requires nonnegative values")
    mcells = ell / f.h
    if abs(mcells - round(mcells)) > 1e-9:
        raise ValueError("box side must be a whole number of cells")
    mcells = int(round(mcells))
    if f.n % mcells != 0:
        raise ValueError("box side must divide the grid")
    per_side = f.n // mcells
    L = per_side**f.d
    vals = f.values
    integral_exact = np.array_equal(vals, vals.astype(np.int64).astype(float))
    if integral_exact:
        v = vals.astype(np.int64)
    else:
        v = vals
    if f.d == 1:
        sums = v.reshape(per_side, mcells).sum(axis=1)
    else:
        sums = v.reshape(per_side, mcells, per_side, mcells).sum(axis=(1, 3))
    total = sums.sum()
    qualifying = int(np.count_nonzero(2 * L * sums >= total))
    # claimed bound: qualifying >= delta L / 2 with delta the grid mean
    md = mcells**f.d
    ok = bool(2 * qualifying * md >= total)
    return PigeonholeReport(qualifying=qualifying, L=int(L), threshold_ok=ok,
                            delta=float(total) / (L * md))


@dataclass
class MainTermReport:
    min_normalized: float
    c_hat: float
    per_trial: list


def roth_main_term_experiment(delta: float, d: int, N: float, lam: float, trials: int,
                              m: MollifierPair, p, h: Optional[float] = None,
                              seed: int = 0) -> MainTermReport:
    """Minimum normalized mollified count over random density-delta sets.

    Ensembles alternate i.i.d. cell draws with structured stripes; the
    observed minimum of M_lam / N^d is the empirical density constant.
    """
    pv = _as_p(p)
    if lam > N / 8.0:
        raise ValueError("scale must satisfy lam <= N/8 for the boundary-sensitive run")
    if h is None:
        h = lam / (8.0 * pv)
        n = max(8, int(np.ceil(N / h)))
        h = N / n
    outs = []
    for trial in range(trials):
        f = random_indicator(N, h, d, delta, seed=seed * 1000 + trial,
                             structured=(trial % 2 == 1))
        outs.append(m_lambda(f, lam, m, pv).value / N**d)
    return MainTermReport(min_normalized=min(outs), c_hat=min(outs), per_trial=outs)


def translate_box(f: BoxFunction, cells: int, ambient_factor: int = 2) -> BoxFunction:
    """Embed f in a larger zero box, shifted by whole cells (for invariance checks)."""
    n = f.n
    big = ambient_factor * n + 2 * abs(cells)
    vals = np.zeros((big,) * f.d)
    sl = tuple(slice(abs(cells) + cells, abs(cells) + cells + n) for _ in range(f.d))
    base = tuple(slice(abs(cells), abs(cells) + n) for _ in range(f.d))
    vals[sl if cells else base] = f.values
    return BoxFunction(values=vals, N=big * f.h, h=f.h)
