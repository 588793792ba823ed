"""Stick families as rays of the norm distance function to a finite site set.

If l0 is a nearest site to l1 and m0 a nearest site to m1, the segments
[l0, l1] and [m0, m1] automatically satisfy the two-sticks condition; so
families built by shooting rays from nearest sites toward query points give
an endless supply of honest two-sticks pairs of a common length.  The
`endpoint_map_modulus` table measures how tightly close interior points pin
down the terminal points across such a family - the empirical modulus of
continuity of the interior-to-endpoint map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .norms import Norm, as_vector
from .sticks import Stick, segment_point_distance, two_sticks_check

TIE_TOL = 1e-12


class NearestResult(NamedTuple):
    site: np.ndarray
    distance: float
    unique: bool
    index: int


@dataclass
class SiteSet:
    """A finite set of sites together with the norm measuring distances."""

    sites: np.ndarray
    norm: Norm

    def __post_init__(self):
        self.sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        if self.sites.shape[0] < 1:
            raise ValueError("need at least one site")
        if self.sites.shape[1] != self.norm.dim:
            raise ValueError("site dimension does not match the norm")
        if not np.all(np.isfinite(self.sites)):
            raise ValueError("sites must be finite")

    def to_dict(self) -> dict:
        return {"sites": self.sites.tolist(), "norm": self.norm.descriptor()}


def nearest_point(sites: SiteSet, x) -> NearestResult:
    """Exhaustive nearest-site query; `unique` is False on ties within 1e-12."""
    x = as_vector(x, sites.norm.dim)
    dists = sites.norm.value(sites.sites - x)
    idx = int(np.argmin(dists))
    dmin = float(dists[idx])
    unique = int(np.count_nonzero(dists <= dmin + TIE_TOL)) == 1
    return NearestResult(site=sites.sites[idx].copy(), distance=dmin,
                         unique=unique, index=idx)


@dataclass
class RayFamily:
    """Equal-length sticks anchored at their nearest sites.

    Every stick starts at a site, has norm length `length`, and keeps that
    site nearest at its far endpoint, so ||end - start|| = dist(end, sites).
    `skipped` records (query index, reason) for discarded queries.
    """

    sticks: list
    length: float
    site_index: list
    skipped: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.sticks)

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        starts = np.array([s.start for s in self.sticks])
        ends = np.array([s.end for s in self.sticks])
        return starts, ends

    def to_dict(self) -> dict:
        return {"length": self.length,
                "site_index": list(self.site_index),
                "sticks": [s.to_dict() for s in self.sticks],
                "skipped": [list(entry) for entry in self.skipped]}

    @staticmethod
    def from_dict(d: dict) -> "RayFamily":
        return RayFamily(sticks=[Stick.from_dict(s) for s in d["sticks"]],
                         length=float(d["length"]),
                         site_index=[int(i) for i in d["site_index"]],
                         skipped=[tuple(e) for e in d.get("skipped", [])])


def build_ray_family(sites: SiteSet, query_points, length: float) -> RayFamily:
    """One stick per query: from its nearest site toward the query, extended to
    exact norm length.  Queries with tied nearest sites are skipped, and so are
    rays whose extension leaves the nearest-site region (the distance-function
    identity would break there).
    """
    if length <= 0.0:
        raise ValueError("length must be positive")
    queries = np.atleast_2d(np.asarray(query_points, dtype=float))
    sticks, indices, skipped = [], [], []
    for qi, x in enumerate(queries):
        hit = nearest_point(sites, x)
        if hit.distance <= 1e-12:
            raise ValueError(f"query {qi} lies in the site set")
        if not hit.unique:
            skipped.append((qi, "tied nearest site"))
            continue
        end = hit.site + (length / hit.distance) * (x - hit.site)
        recheck = nearest_point(sites, end)
        if recheck.index != hit.index or not recheck.unique:
            skipped.append((qi, "extension left the nearest-site region"))
            continue
        if abs(recheck.distance - length) > 1e-9 * (1.0 + length):
            skipped.append((qi, "distance identity failed at the extended endpoint"))
            continue
        sticks.append(Stick(hit.site.copy(), end))
        indices.append(hit.index)
    return RayFamily(sticks=sticks, length=float(length), site_index=indices,
                     skipped=skipped)


def pairwise_two_sticks(norm: Norm, sticks: list) -> tuple[bool, tuple]:
    """Exhaustively check all unordered pairs; returns (ok, first offending pair)."""
    for i in range(len(sticks)):
        for j in range(i + 1, len(sticks)):
            if not two_sticks_check(norm, sticks[i], sticks[j]):
                return False, (i, j)
    return True, ()


def _pair_min_gap(norm: Norm, l: Stick, m: Stick, t: float,
                  rounds: int = 5, grid: int = 17) -> float:
    """min over s, u in [t, 1] of ||l_s - m_u||, by grid search plus refinement.

    The objective is convex in (s, u), so shrinking windows around the best
    cell converge; the result can only overestimate the true minimum, never
    undershoot it.
    """
    cs, cu = 0.5 * (t + 1.0), 0.5 * (t + 1.0)
    half = 0.5 * (1.0 - t)
    best = np.inf
    for _ in range(rounds):
        ss = np.linspace(max(t, cs - half), min(1.0, cs + half), grid)
        uu = np.linspace(max(t, cu - half), min(1.0, cu + half), grid)
        pl = (1.0 - ss)[:, None] * l.start + ss[:, None] * l.end
        pm = (1.0 - uu)[:, None] * m.start + uu[:, None] * m.end
        diff = pl[:, None, :] - pm[None, :, :]
        vals = norm.value(diff)
        k = int(np.argmin(vals))
        i, j = divmod(k, grid)
        best = min(best, float(vals[i, j]))
        cs, cu = float(ss[i]), float(uu[j])
        half /= 4.0
    return best


def generate_strip_pairs(norm: Norm, count: int, delta: float, rho: float,
                         seed: int = 0, *, endpoint_gap_max: float = 0.2,
                         max_tries: int = 100000) -> list:
    """Sample admissible configurations (l, m, x0) for the strip experiment.

    Each pair is built as two distance-function rays: sites sit a mid-stick
    parameter behind the ball B_delta(x0), queries sit inside the ball, and
    the rays extend to unit length.  The two-sticks and equal-length
    conditions then hold by construction (and are re-verified).  Proposals
    are rejected unless both sticks meet the ball, every endpoint clears the
    rho-ball, and the terminal gap stays below `endpoint_gap_max`.  The
    direction spread scales with delta, which is the widest the endpoint
    estimates allow.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    n = norm.dim
    out = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        x0 = rng.standard_normal(n) * 0.1
        e = rng.standard_normal(n)
        e = e / float(norm.value(e))
        spread = delta * rng.uniform(0.5, 4.0)
        ebar = e + spread * rng.standard_normal(n)
        ebar = ebar / float(norm.value(ebar))

        # Both sites at distance tau from x0, so x0 sits on their bisector
        # and the nearby queries can fall on either side of it.
        tau = rng.uniform(0.42, 0.58)
        xi1 = rng.standard_normal(n)
        xi1 = xi1 / float(norm.value(xi1)) * 0.4 * delta * rng.uniform(0.0, 1.0)
        xi2 = rng.standard_normal(n)
        xi2 = xi2 / float(norm.value(xi2)) * 0.4 * delta * rng.uniform(0.0, 1.0)
        q1 = x0 + xi1
        q2 = x0 + xi2

        sites = SiteSet(np.array([x0 - tau * e, x0 - tau * ebar]), norm)
        family = build_ray_family(sites, [q1, q2], 1.0)
        if len(family) != 2 or family.site_index != [0, 1]:
            continue
        l, m = family.sticks
        if not two_sticks_check(norm, l, m):
            continue
        if float(norm.value(l.end - m.end)) > endpoint_gap_max:
            continue
        endpoints_clear = all(
            float(norm.value(p - x0)) > rho * (1.0 + 1e-9)
            for p in (l.start, l.end, m.start, m.end))
        if not endpoints_clear:
            continue
        if segment_point_distance(norm, l, x0)[0] > delta:
            continue
        if segment_point_distance(norm, m, x0)[0] > delta:
            continue
        out.append((l, m, x0))
    if len(out) < count:
        raise RuntimeError(f"only {len(out)} admissible configurations in {max_tries} tries")
    return out


@dataclass
class EndpointModulusTable:
    """Empirical modulus eps(delta0) of the interior-to-endpoint map.

    Row (delta0, eps, pairs): over all pairs owning interior points at
    parameters >= t within delta0 of each other, eps is the largest terminal
    gap observed.  Monotone nondecreasing in delta0 by construction.
    """

    t: float
    rows: list
    n_sticks: int

    def epsilons(self) -> np.ndarray:
        return np.array([row[1] for row in self.rows])


def endpoint_map_modulus(family: RayFamily, norm: Norm, t: float,
                         delta0_grid) -> EndpointModulusTable:
    """Tabulate eps(delta0) = max terminal gap among pairs whose sticks come
    within delta0 of each other at parameters >= t."""
    if len(family) == 0:
        raise ValueError("empty family")
    if not (0.0 < t <= 1.0):
        raise ValueError("need 0 < t <= 1")
    sticks = family.sticks
    n = len(sticks)
    gaps = np.zeros((n, n))
    ends = np.array([s.end for s in sticks])
    for i in range(n):
        for j in range(i + 1, n):
            gaps[i, j] = _pair_min_gap(norm, sticks[i], sticks[j], t)
    end_gap = norm.value(ends[:, None, :] - ends[None, :, :])

    rows = []
    iu = np.triu_indices(n, k=1)
    for delta0 in sorted(float(d) for d in delta0_grid):
        mask = gaps[iu] <= delta0
        eps = float(np.max(end_gap[iu][mask])) if np.any(mask) else 0.0
        rows.append((delta0, eps, int(np.count_nonzero(mask))))
    return EndpointModulusTable(t=float(t), rows=rows, n_sticks=n)
