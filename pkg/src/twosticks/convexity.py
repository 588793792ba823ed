"""Moduli of geometric convexity and empirical norm constants.

The modulus of geometric convexity at x is

    sigma(x, t) = max { h(x, x + y) : ||y|| <= t },

whose maximizers lie on the sphere ||y|| = t and satisfy the stationarity
condition N(x+y) - N(x) = alpha * N(y) with alpha > 0.  Around it this
module estimates, by seeded sampling with witnesses:

* geometric convexity   Lambda = inf h(x, x+2y) / h(x, x+y)   (> 2 wanted)
* doubling              T      = sup h(x, x+2y) / h(x, x+y)
* balancedness          K      = sup h(x, x+y) / h(x, x-y)
* uniform convexity A and uniform smoothness B with exponents (p, q)

each over ||y|| <= r ||x||, either unrestricted ("full") or restricted to
the tangent plane <y, N(x)> = 0 ("tangent").  `transfer_check` verifies the
quantitative bridge from tangent-plane constants to full-space ratios, and
`onev_scan` verifies the scalar reduction that powers the p-norm proofs.

Estimated constants are empirical: they are extrema over samples, reported
together with the witnessing pair, and carry no proof.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm as _gauss
from scipy.stats import qmc

from .gap import gap
from .norms import Norm, ZeroVectorError, ZERO_THRESHOLD, as_vector

# Ratio denominators below 1e-12 * (1 + ||x||) are excluded: along
# positively-parallel directions both sides vanish and 0/0 says nothing.
FLOOR_SCALE = 1e-12


class DegenerateSampleError(RuntimeError):
    """Every sampled ratio fell below the denominator floor."""


class TransferWindowError(ValueError):
    """The admissibility window of a tangent-to-full check is empty."""


# ---------------------------------------------------------------------------
# modulus of geometric convexity
# ---------------------------------------------------------------------------

@dataclass
class ModulusResult:
    sigma: float
    t: float
    maximizer_y: np.ndarray
    normal_at_y: np.ndarray
    kkt_residual: float
    kkt_multiplier: float
    converged: bool
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma, "t": self.t,
            "maximizer_y": [float(v) for v in self.maximizer_y],
            "normal_at_y": [float(v) for v in self.normal_at_y],
            "kkt_residual": self.kkt_residual,
            "kkt_multiplier": self.kkt_multiplier,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _halton_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy directions on the Euclidean sphere."""
    if dim == 1:
        return np.array([[1.0], [-1.0]] * ((count + 1) // 2))[:count]
    sampler = qmc.Halton(d=dim, scramble=False)
    sampler.fast_forward(1)  # skip the all-zeros point
    u = sampler.random(count)
    g = _gauss.ppf(np.clip(u, 1e-12, 1.0 - 1e-12))
    nrm = np.sqrt(np.sum(g * g, axis=-1))
    nrm[nrm < 1e-12] = 1.0
    return g / nrm[:, None]


def _normal_safe(norm: Norm, z: np.ndarray) -> np.ndarray:
    """Batched normal map with zero rows replaced by e1 (callers mask them)."""
    v = norm.value(z)
    bad = v < ZERO_THRESHOLD
    if np.any(bad):
        e1 = np.zeros(norm.dim)
        e1[0] = 1.0
        z = np.where(bad[..., None], e1, z)
    return norm.normal(z)


def _coarse_directions(dim: int) -> np.ndarray:
    """Cheap quasi-uniform direction sweep used to seed the multi-start."""
    if dim == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    if dim == 3:
        count = 1500
        i = np.arange(count) + 0.5
        phi = np.arccos(1.0 - 2.0 * i / count)
        theta = np.pi * (1.0 + math.sqrt(5.0)) * i
        return np.stack([np.cos(theta) * np.sin(phi),
                         np.sin(theta) * np.sin(phi), np.cos(phi)], axis=-1)
    raise ValueError("coarse sweep supports dim 2 and 3")


def _polish_on_sphere(norm: Norm, x: np.ndarray, t: float, y0: np.ndarray,
                      n_of_x: np.ndarray) -> tuple[np.ndarray, float]:
    """BFGS refinement of a sphere maximizer via the parametrization y = t*u/||u||."""

    def neg(u: np.ndarray):
        nu = float(norm.value(u))
        if nu < ZERO_THRESHOLD:
            return 0.0, np.zeros_like(u)
        y = t * u / nu
        z = x + y
        val = float(norm.value(z) - np.dot(z, n_of_x))
        g = _normal_safe(norm, z) - n_of_x
        n_of_u = norm.normal(u)
        grad_u = (t / nu) * (g - (float(np.dot(u, g)) / nu) * n_of_u)
        return -val, -grad_u

    res = minimize(neg, y0, jac=True, method="BFGS",
                   options={"gtol": 1e-12, "maxiter": 200})
    u = res.x
    nu = float(norm.value(u))
    if nu < ZERO_THRESHOLD:
        return y0, -np.inf
    y = t * u / nu
    z = x + y
    return y, float(norm.value(z) - np.dot(z, n_of_x))


def modulus(norm: Norm, x, t: float, *, n_starts: int = 32, max_iter: int = 200,
            kkt_tol: float = 1e-7, polish: bool = True) -> ModulusResult:
    """Maximize h(x, x+y) over the sphere ||y|| = t by multi-start projected ascent.

    Starts come from a deterministic low-discrepancy set, so the result is
    reproducible.  The leading candidates are polished by BFGS on the
    scale-invariant parametrization y = t*u/||u||.  The first start within
    1e-9 of the best value wins, which pins down the returned maximizer when
    the maximizing set is a continuum.  Non-convergence is reported through
    `converged`, never silently.
    """
    x = as_vector(x, norm.dim)
    t = float(t)
    if t <= 0.0:
        raise ValueError("t must be positive")
    if float(norm.value(x)) < ZERO_THRESHOLD:
        raise ZeroVectorError("modulus needs x != 0")
    n = norm.dim
    k = max(4, int(n_starts)) if n > 1 else 2

    u = _halton_directions(n, k)
    n_of_x = norm.normal(x)

    def objective(yy: np.ndarray) -> np.ndarray:
        z = x + yy
        return norm.value(z) - np.sum(z * n_of_x, axis=-1)

    if 2 <= n <= 3:
        # Seed with the best directions of a coarse sweep so the global
        # basin is always represented among the starts.
        sweep = _coarse_directions(n)
        y_sweep = t * sweep / norm.value(sweep)[:, None]
        top = np.argsort(objective(y_sweep))[::-1][:4]
        u = np.vstack([sweep[top], u])
        k = u.shape[0]
    y = t * u / norm.value(u)[:, None]
    f = objective(y)
    step = np.full(k, 0.3 * t)
    iterations = max_iter
    for it in range(max_iter):
        grad = _normal_safe(norm, x + y) - n_of_x
        cand = y + step[:, None] * grad
        nc = norm.value(cand)
        ok = nc > ZERO_THRESHOLD
        cand = np.where(ok[:, None], cand, y)
        nc = np.where(ok, nc, t)
        cand = t * cand / nc[:, None]
        fc = objective(cand)
        better = fc > f
        y = np.where(better[:, None], cand, y)
        f = np.where(better, fc, f)
        step = np.where(better, step * 1.3, step * 0.5)
        np.clip(step, None, t, out=step)
        # The BFGS polish finishes the job; the ascent only has to land in
        # the right basin, so a loose step floor is enough.
        if np.all(step < (1e-9 if polish else 1e-13) * t):
            iterations = it + 1
            break

    if polish:
        for row in np.argsort(f)[::-1][:2]:
            yp, fp = _polish_on_sphere(norm, x, t, y[row], n_of_x)
            if fp > f[row]:
                y[row], f[row] = yp, fp

    # First start within 1e-9 of the best value, in start order.
    best_val = float(np.max(f))
    best = int(np.nonzero(f >= best_val - 1e-9)[0][0])
    y_best = y[best]
    sigma = float(f[best])

    n_of_y = norm.normal(y_best)
    grad = norm.normal(x + y_best) - n_of_x
    alpha = float(np.dot(grad, y_best)) / t
    kkt = float(np.linalg.norm(grad - alpha * n_of_y)) / (1.0 + float(np.linalg.norm(grad)))
    converged = bool(kkt <= kkt_tol and alpha >= -1e-9 and iterations <= max_iter)
    return ModulusResult(sigma=sigma, t=t, maximizer_y=y_best, normal_at_y=n_of_y,
                         kkt_residual=kkt, kkt_multiplier=alpha, converged=converged,
                         iterations=iterations)


def modulus_grid(norm: Norm, x, t: float, resolution: float = 1e-3) -> ModulusResult:
    """Brute-force modulus by dense angular search; oracle/fallback for dim <= 3.

    The sphere of directions is scanned at `resolution` radians (after local
    refinement), independently of the ascent in `modulus`.
    """
    x = as_vector(x, norm.dim)
    t = float(t)
    if t <= 0.0:
        raise ValueError("t must be positive")
    n = norm.dim
    n_of_x = norm.normal(x)

    def h_of(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        y = t * u / norm.value(u)[..., None]
        z = x + y
        return norm.value(z) - np.sum(z * n_of_x, axis=-1), y

    if n == 1:
        u = np.array([[1.0], [-1.0]])
        vals, ys = h_of(u)
    elif n == 2:
        theta = np.arange(0.0, 2.0 * np.pi, min(resolution, 2e-2))
        for _ in range(3):
            u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            vals, ys = h_of(u)
            i = int(np.argmax(vals))
            width = max(theta[1] - theta[0], resolution) if len(theta) > 1 else resolution
            theta = np.linspace(theta[i] - width, theta[i] + width, 101)
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        vals, ys = h_of(u)
    elif n == 3:
        coarse = max(resolution, 1.5e-2)
        phi = np.linspace(0.0, np.pi, int(np.pi / coarse) + 1)
        theta = np.arange(0.0, 2.0 * np.pi, coarse)
        tt, pp = np.meshgrid(theta, phi)
        u = np.stack([np.sin(pp) * np.cos(tt), np.sin(pp) * np.sin(tt), np.cos(pp)], axis=-1)
        u = u.reshape(-1, 3)
        vals, ys = h_of(u)
        order = np.argsort(vals)[::-1][:16]
        best_val, best_y = float(vals[order[0]]), ys[order[0]]
        for idx in order:
            tc, pc = float(tt.reshape(-1)[idx]), float(pp.reshape(-1)[idx])
            width = 2.0 * coarse
            while width > resolution / 2.0:
                tg = np.linspace(tc - width, tc + width, 13)
                pg = np.linspace(pc - width, pc + width, 13)
                t2, p2 = np.meshgrid(tg, pg)
                uu = np.stack([np.sin(p2) * np.cos(t2), np.sin(p2) * np.sin(t2),
                               np.cos(p2)], axis=-1).reshape(-1, 3)
                keep = np.sqrt(np.sum(uu * uu, axis=-1)) > 1e-9
                uu = uu[keep]
                v2, y2 = h_of(uu)
                j = int(np.argmax(v2))
                if float(v2[j]) > best_val:
                    best_val, best_y = float(v2[j]), y2[j]
                ang = uu[j]
                pc = math.acos(np.clip(ang[2] / np.linalg.norm(ang), -1, 1))
                tc = math.atan2(ang[1], ang[0])
                width /= 5.0
        vals, ys = np.array([best_val]), best_y[None, :]
    else:
        raise ValueError("grid search supports dim <= 3 only")

    i = int(np.argmax(vals))
    y_best = ys[i] if ys.ndim > 1 else ys
    sigma = float(vals[i])
    n_of_y = norm.normal(y_best)
    grad = norm.normal(x + y_best) - n_of_x
    alpha = float(np.dot(grad, y_best)) / t
    kkt = float(np.linalg.norm(grad - alpha * n_of_y)) / (1.0 + float(np.linalg.norm(grad)))
    return ModulusResult(sigma=sigma, t=t, maximizer_y=y_best, normal_at_y=n_of_y,
                         kkt_residual=kkt, kkt_multiplier=alpha, converged=True)


# ---------------------------------------------------------------------------
# sampled constants
# ---------------------------------------------------------------------------

@dataclass
class ConstantsReport:
    """Empirical norm constants with the witnesses that achieved them.

    Infima (lambda_hat, a_hat) and suprema (t_hat, k_hat, b_hat) over the
    sampled pairs; unused fields stay None.  `worst_witnesses` holds the
    (x, y) pairs realizing each recorded extremum, in field order.
    """

    norm: dict
    mode: str
    samples: int
    seed: int
    lambda_hat: Optional[float] = None
    r: Optional[float] = None
    t_hat: Optional[float] = None
    k_hat: Optional[float] = None
    a_hat: Optional[float] = None
    p: Optional[float] = None
    b_hat: Optional[float] = None
    q: Optional[float] = None
    worst_witnesses: list = field(default_factory=list)
    timestamp: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat()

    def to_dict(self) -> dict:
        return {
            "norm": self.norm, "mode": self.mode, "samples": self.samples,
            "seed": self.seed, "lambda_hat": self.lambda_hat, "r": self.r,
            "t_hat": self.t_hat, "k_hat": self.k_hat, "a_hat": self.a_hat,
            "p": self.p, "b_hat": self.b_hat, "q": self.q,
            "worst_witnesses": self.worst_witnesses, "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _unit_vectors(norm: Norm, rng: np.random.Generator, count: int) -> np.ndarray:
    v = rng.standard_normal((count, norm.dim))
    nv = norm.value(v)
    bad = nv < 1e-12
    if np.any(bad):
        v[bad] = np.eye(norm.dim)[0]
        nv = norm.value(v)
    return v / nv[:, None]


def _sample_displacements(norm: Norm, rng: np.random.Generator, x: np.ndarray,
                          radius: float, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Draw y with ||y|| log-uniform in [1e-4, 1] * radius; tangent mode projects
    the direction onto <., N(x)> = 0 first.  Returns (y, validity mask)."""
    count = x.shape[0]
    v = rng.standard_normal((count, norm.dim))
    mags = radius * 10.0 ** rng.uniform(-4.0, 0.0, size=count)
    if mode == "tangent":
        n_of_x = norm.normal(x)
        v = v - np.sum(v * n_of_x, axis=-1)[:, None] * x
    elif mode != "full":
        raise ValueError("mode must be 'full' or 'tangent'")
    nv = norm.value(v)
    good = nv > 1e-12
    nv = np.where(good, nv, 1.0)
    y = mags[:, None] * v / nv[:, None]
    return y, good


def _witness(x: np.ndarray, y: np.ndarray) -> list:
    return [[float(v) for v in x], [float(v) for v in y]]


def _doubling_ratios(norm: Norm, r: float, mode: str, samples: int, seed: int):
    if r <= 0.0:
        raise ValueError("r must be positive")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    x = _unit_vectors(norm, rng, samples)
    y, good = _sample_displacements(norm, rng, x, r, mode)
    h1 = gap(norm, x, x + y)
    h2 = gap(norm, x, x + 2.0 * y)
    ok = good & (h1 > FLOOR_SCALE * 2.0) & np.isfinite(h2)
    if not np.any(ok):
        raise DegenerateSampleError("no informative samples: every h(x, x+y) fell below the floor")
    return x[ok], y[ok], h2[ok] / h1[ok]


def estimate_lambda(norm: Norm, r: float, mode: str = "full",
                    samples: int = 100000, seed: int = 0) -> ConstantsReport:
    """Infimum of h(x, x+2y)/h(x, x+y) over ||y|| <= r, with witness.

    A value above 2 is evidence of geometric convexity with constants (r, Lambda).
    """
    x, y, ratios = _doubling_ratios(norm, r, mode, samples, seed)
    i = int(np.argmin(ratios))
    return ConstantsReport(norm=norm.descriptor(), mode=mode, samples=samples, seed=seed,
                           lambda_hat=float(ratios[i]), r=float(r),
                           worst_witnesses=[_witness(x[i], y[i])])


def estimate_doubling(norm: Norm, r: float, mode: str = "full",
                      samples: int = 100000, seed: int = 0) -> ConstantsReport:
    """Supremum of h(x, x+2y)/h(x, x+y) over ||y|| <= r (the doubling constant T)."""
    x, y, ratios = _doubling_ratios(norm, r, mode, samples, seed)
    i = int(np.argmax(ratios))
    return ConstantsReport(norm=norm.descriptor(), mode=mode, samples=samples, seed=seed,
                           t_hat=float(ratios[i]), r=float(r),
                           worst_witnesses=[_witness(x[i], y[i])])


def estimate_balanced(norm: Norm, bound: float, mode: str = "full",
                      samples: int = 100000, seed: int = 0) -> ConstantsReport:
    """Supremum of h(x, x+y)/h(x, x-y) over ||y|| <= bound (the balanced constant K)."""
    if bound <= 0.0:
        raise ValueError("bound must be positive")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    x = _unit_vectors(norm, rng, samples)
    y, good = _sample_displacements(norm, rng, x, bound, mode)
    h_plus = gap(norm, x, x + y)
    h_minus = gap(norm, x, x - y)
    ok = good & (h_minus > FLOOR_SCALE * 2.0) & (h_plus >= 0.0)
    if not np.any(ok):
        raise DegenerateSampleError("no informative samples: every h(x, x-y) fell below the floor")
    ratios = h_plus[ok] / h_minus[ok]
    i = int(np.argmax(ratios))
    return ConstantsReport(norm=norm.descriptor(), mode=mode, samples=samples, seed=seed,
                           k_hat=float(ratios[i]), r=float(bound),
                           worst_witnesses=[_witness(x[ok][i], y[ok][i])])


def estimate_uniform_constants(norm: Norm, p: float, q: float,
                               samples: int = 100000, seed: int = 0) -> ConstantsReport:
    """Empirical uniform-convexity A and uniform-smoothness B for exponents (p, q).

        a_hat = inf (2 - ||e + ebar||) / ||e - ebar||^p  over unit e != ebar
        b_hat = sup (||x + y|| + ||x - y|| - 2) / ||y||^q  over unit x, y != 0

    Separations are sampled log-uniformly so the small-gap regime, where both
    extrema bind, is well covered.
    """
    p, q = float(p), float(q)
    if not (1.0 < q <= p):
        raise ValueError("need 1 < q <= p")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    half = samples // 2 + 1

    e = _unit_vectors(norm, rng, half)
    w = rng.standard_normal((half, norm.dim))
    s = 10.0 ** rng.uniform(-3.0, math.log10(2.0), size=half)
    ebar = e + s[:, None] * w
    nb = norm.value(ebar)
    good = nb > 1e-12
    ebar = np.where(good[:, None], ebar, e + np.eye(norm.dim)[0])
    ebar = ebar / norm.value(ebar)[:, None]
    d = norm.value(e - ebar)
    num = 2.0 - norm.value(e + ebar)
    ok = d > 1e-6
    if not np.any(ok):
        raise DegenerateSampleError("no informative unit pairs for the convexity constant")
    a_ratios = num[ok] / d[ok] ** p
    ia = int(np.argmin(a_ratios))
    a_witness = _witness(e[ok][ia], ebar[ok][ia])

    x = _unit_vectors(norm, rng, half)
    w2 = rng.standard_normal((half, norm.dim))
    s2 = 10.0 ** rng.uniform(-3.0, 0.0, size=half)
    nw = norm.value(w2)
    nw = np.where(nw > 1e-12, nw, 1.0)
    y = s2[:, None] * w2 / nw[:, None]
    ny = norm.value(y)
    smooth = norm.value(x + y) + norm.value(x - y) - 2.0
    okb = ny > 1e-6
    b_ratios = smooth[okb] / ny[okb] ** q
    ib = int(np.argmax(b_ratios))
    b_witness = _witness(x[okb][ib], y[okb][ib])

    return ConstantsReport(norm=norm.descriptor(), mode="uniform", samples=samples,
                           seed=seed, a_hat=float(a_ratios[ia]), p=p,
                           b_hat=float(b_ratios[ib]), q=q,
                           worst_witnesses=[a_witness, b_witness])


# ---------------------------------------------------------------------------
# derived constants and checks
# ---------------------------------------------------------------------------

def extend_constants(r: float, lam: float) -> tuple[float, float]:
    """Double the certified radius: constants (r, Lambda) imply (2r, 3 - 2/Lambda).

    The degraded constant stays above 2, so the step can be iterated to
    reach any radius.
    """
    if lam <= 2.0:
        raise ValueError("geometric convexity needs Lambda > 2")
    if r <= 0.0:
        raise ValueError("r must be positive")
    return 2.0 * r, 3.0 - 2.0 / lam


def extend_constants_to(r: float, lam: float, radius: float) -> tuple[float, float, int]:
    """Iterate `extend_constants` until the certified radius reaches `radius`.

    Returns (new_radius, degraded_lambda, doublings).
    """
    doublings = 0
    while r < radius:
        r, lam = extend_constants(r, lam)
        doublings += 1
        if doublings > 64:
            raise ValueError("radius target unreachable")
    return r, lam, doublings


def duality_residual(norm: Norm, x, z, lam: float, r: float) -> float:
    """max(0, h(x, z) - Lambda/(Lambda-2) * h(z, x)) for ||z - x|| <= 2r||x||.

    Zero (up to roundoff) whenever the norm really is geometrically convex
    with constants (r, Lambda).
    """
    if lam <= 2.0:
        raise ValueError("duality needs Lambda > 2")
    x = as_vector(x, norm.dim)
    z = as_vector(z, norm.dim)
    nx = float(norm.value(x))
    if nx < ZERO_THRESHOLD:
        raise ZeroVectorError("duality needs x != 0")
    sep = float(norm.value(z - x))
    if sep > 2.0 * r * nx * (1.0 + 1e-12):
        raise ValueError(f"||z - x|| = {sep!r} exceeds the certified radius 2*r*||x||")
    lhs = float(gap(norm, x, z))
    rhs = lam / (lam - 2.0) * float(gap(norm, z, x))
    return max(0.0, lhs - rhs)


# ---------------------------------------------------------------------------
# scalar reduction for p-norms
# ---------------------------------------------------------------------------

def onev_f(p: float, x, y) -> np.ndarray:
    """f(x, y) = |x+y|^p - |x|^p - y p |x|^(p-1) sign(x); nonnegative for p > 1.

    This is the coordinatewise building block of the p-norm convexity,
    doubling and balance properties.
    """
    if p <= 1.0:
        raise ValueError("need p > 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (np.abs(x + y) ** p - np.abs(x) ** p
            - y * p * np.abs(x) ** (p - 1.0) * np.sign(x))


def onev_g(p: float, z) -> np.ndarray:
    """g(z) = |1+z|^p - 1 - p z, the one-variable profile of `onev_f` at x = 1.

    Evaluated through expm1/log1p near z = 0, where the naive form loses
    all significant digits.
    """
    if p <= 1.0:
        raise ValueError("need p > 1")
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 0.5
    zs = np.where(small, z, 0.0)
    precise = np.expm1(p * np.log1p(zs)) - p * zs
    direct = np.abs(1.0 + z) ** p - 1.0 - p * z
    return np.where(small, precise, direct)


def onev_default_grid(points: int = 100000, z_min: float = 1e-6, z_max: float = 1e6) -> np.ndarray:
    """Sign-symmetric logarithmic grid over z_min <= |z| <= z_max, zero excluded."""
    half = max(2, points // 2)
    mags = np.logspace(math.log10(z_min), math.log10(z_max), half)
    return np.concatenate([-mags[::-1], mags])


@dataclass
class OnevScanResult:
    p: float
    inf_double_ratio: float     # inf g(2z)/g(z): > 2 certifies scalar convexity
    sup_double_ratio: float     # sup g(2z)/g(z): the scalar doubling constant
    sup_balance_ratio: float    # sup g(z)/g(-z): the scalar balance constant
    zero_limit: float           # observed limit of g(2z)/g(z) as z -> 0 (exact: 4)
    infinity_limit: float       # observed limit as |z| -> inf (exact: 2^p)
    argmin_z: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def onev_scan(p: float, z_grid: Optional[np.ndarray] = None) -> OnevScanResult:
    """Scan g(2z)/g(z) and g(z)/g(-z) over a grid; the scan is its own oracle.

    The observed limits average the ratios at the paired grid endpoints +-z,
    which cancels the odd leading correction in both asymptotic regimes.
    """
    if z_grid is None:
        z_grid = onev_default_grid()
    z = np.asarray(z_grid, dtype=float)
    if np.any(z == 0.0):
        raise ValueError("grid must exclude z = 0")
    g1 = onev_g(p, z)
    g2 = onev_g(p, 2.0 * z)
    gm = onev_g(p, -z)
    if np.any(g1 <= 0.0):
        raise ValueError("g must be positive away from z = 0; grid too close to zero")
    dr = g2 / g1
    br = g1 / gm
    i_min = int(np.argmin(dr))

    mags = np.abs(z)
    near = mags == np.min(mags)
    far = mags == np.max(mags)
    zero_limit = float(np.mean(dr[near]))
    infinity_limit = float(np.mean(dr[far]))

    return OnevScanResult(
        p=float(p),
        inf_double_ratio=float(np.min(dr)),
        sup_double_ratio=float(np.max(dr)),
        sup_balance_ratio=float(np.max(br)),
        zero_limit=zero_limit,
        infinity_limit=infinity_limit,
        argmin_z=float(z[i_min]),
    )


# ---------------------------------------------------------------------------
# tangent-plane -> full-space transfer
# ---------------------------------------------------------------------------

@dataclass
class TransferReport:
    norm: dict
    samples: int
    seed: int
    kappa: float
    lipschitz_l: float
    checked: int
    convexity_violations: int
    doubling_violations: int
    balanced_violations: int
    max_violation: float
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def transfer_check(norm: Norm, lam: float, r: float, t_const: float,
                   k_const: Optional[float] = None, samples: int = 2000,
                   seed: int = 0, kappa: Optional[float] = None,
                   tol: float = 1e-9) -> TransferReport:
    """Verify that full-space h ratios obey the bounds predicted by tangent constants.

    For y = alpha*x + eps*x_perp with |alpha| <= kappa and eps inside the
    certified tangent radius, geometric convexity in the tangent plane with
    constant `lam` forces

        h(x,x+2y)/h(x,x+y) >= lam * (1+2a)/(1+a) * g(1/(1+2a)) / g(1/(1+a))

    where g(s) = (||x + s*eps*x_perp|| - ||x||) / (||x + eps*x_perp|| - ||x||)
    is evaluated exactly.  Doubling and balance transfer with the Lipschitz
    surrogate L = (T^2 - 1)/2:

        h(x,x+2y) <= T * (1+2a)/(1+a) * (1+4L|a|)/(1-2L|a|) * h(x,x+y)
        h(x,x+y)  <= K * (1+a)/(1-a)  * (1+2L|a|)/(1-2L|a|) * h(x,x-y)

    valid for |alpha| <= min(1/4, 1/(2L)).  `kappa` defaults to that window;
    kappa = 0 restricts to tangent samples, where the bounds reduce to the
    tangent constants themselves.
    """
    if lam <= 2.0:
        raise ValueError("tangent convexity constant must exceed 2")
    if t_const <= 1.0:
        raise ValueError("doubling constant must exceed 1")
    big_l = (t_const * t_const - 1.0) / 2.0
    window = min(0.25, 1.0 / (2.0 * big_l))
    if kappa is None:
        kappa = window
    if kappa < 0.0 or kappa > window:
        raise TransferWindowError(
            f"kappa must lie in [0, {window!r}] = [0, min(1/4, 1/(2L))] with L = {big_l!r}")
    eps_max = (1.0 - 2.0 * kappa) * r
    if eps_max <= 0.0:
        raise TransferWindowError(
            f"admissibility window empty: (1 - 2*kappa)*r = {eps_max!r} <= 0")

    rng = np.random.default_rng(seed)
    x = _unit_vectors(norm, rng, samples)
    v = rng.standard_normal((samples, norm.dim))
    n_of_x = norm.normal(x)
    v = v - np.sum(v * n_of_x, axis=-1)[:, None] * x
    nv = norm.value(v)
    good = nv > 1e-12
    nv = np.where(good, nv, 1.0)
    xp = v / nv[:, None]
    alpha = rng.uniform(-kappa, kappa, size=samples)
    eps = eps_max * 10.0 ** rng.uniform(-3.0, 0.0, size=samples)

    y = alpha[:, None] * x + eps[:, None] * xp
    h1 = gap(norm, x, x + y)
    h2 = gap(norm, x, x + 2.0 * y)
    hm = gap(norm, x, x - y)

    e_num = eps / (1.0 + 2.0 * alpha)
    e_den = eps / (1.0 + alpha)
    g_num = norm.value(x + e_num[:, None] * xp) - 1.0
    g_den = norm.value(x + e_den[:, None] * xp) - 1.0

    floor = FLOOR_SCALE * 2.0
    usable = good & (h1 > floor) & (g_den > floor)
    if not np.any(usable):
        raise DegenerateSampleError(
            "no informative samples in the admissibility window (kappa or r too small)")

    scale = 1.0 + np.abs(h1) + np.abs(h2)
    conv_bound = lam * (1.0 + 2.0 * alpha) / (1.0 + alpha) * g_num / g_den
    conv_viol = usable & (conv_bound * h1 - h2 > tol * scale)

    aa = np.abs(alpha)
    doub_bound = t_const * (1.0 + 2.0 * alpha) / (1.0 + alpha) \
        * (1.0 + 4.0 * big_l * aa) / (1.0 - 2.0 * big_l * aa)
    doub_viol = usable & (h2 - doub_bound * h1 > tol * scale)

    bal_viol = np.zeros(samples, dtype=bool)
    if k_const is not None:
        usable_b = good & (hm > floor)
        bal_bound = k_const * (1.0 + alpha) / (1.0 - alpha) \
            * (1.0 + 2.0 * big_l * aa) / (1.0 - 2.0 * big_l * aa)
        bal_viol = usable_b & (h1 - bal_bound * hm > tol * scale)

    max_violation = 0.0
    witnesses = []
    for mask, excess in ((conv_viol, conv_bound * h1 - h2),
                         (doub_viol, h2 - doub_bound * h1)):
        if np.any(mask):
            i = int(np.argmax(np.where(mask, excess, -np.inf)))
            max_violation = max(max_violation, float(excess[i]))
            witnesses.append(_witness(x[i], y[i]))
    if k_const is not None and np.any(bal_viol):
        excess = h1 - bal_bound * hm
        i = int(np.argmax(np.where(bal_viol, excess, -np.inf)))
        max_violation = max(max_violation, float(excess[i]))
        witnesses.append(_witness(x[i], y[i]))

    n_conv = int(np.count_nonzero(conv_viol))
    n_doub = int(np.count_nonzero(doub_viol))
    n_bal = int(np.count_nonzero(bal_viol))
    return TransferReport(
        norm=norm.descriptor(), samples=samples, seed=seed, kappa=float(kappa),
        lipschitz_l=float(big_l), checked=int(np.count_nonzero(usable)),
        convexity_violations=n_conv, doubling_violations=n_doub,
        balanced_violations=n_bal, max_violation=max_violation,
        passed=(n_conv == 0 and n_doub == 0 and n_bal == 0), witnesses=witnesses)
