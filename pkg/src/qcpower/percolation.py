"""Site percolation on trivalent lattices and the loss-renormalization ratio k(p_l).

Spanning is measured left to right on open lattices. Each trial draws one
uniform number per site, and a site is occupied at probability ``p`` when
its number is below ``p``. A single Newman-Ziff sweep therefore gives the
exact occupation at which that trial first spans, and the spanning
probability at any ``p`` is the fraction of trials whose critical value lies
below ``p``. The per-trial generator is seeded from ``(seed, trial)``.
"""

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit
from scipy import ndimage

from .constants import LOSS_TOLERANCE_2D, SITE_THRESHOLDS
from .unit_models import Model, parameter_for_deformation

__all__ = [
    "LatticeSpec",
    "Lattice",
    "PercolationEstimate",
    "KCurve",
    "KRangeError",
    "build_lattice",
    "critical_occupations",
    "spanning_probability",
    "spans",
    "spans_bfs",
    "site_threshold",
    "critical_deformation",
    "zero_T_boundary",
    "k_curve",
    "load_k_table",
]

LATTICE_KINDS = ("honeycomb", "square-octagon", "square")


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice family and linear size in cells.

    Honeycomb is built as a brick wall with ``L`` rows and round(sqrt(3) L)
    columns, which is a square region in the regular embedding.
    """

    kind: str
    L: int
    boundary: str = "open"

    def __post_init__(self):
        if self.kind not in LATTICE_KINDS:
            raise ValueError(f"unknown lattice {self.kind!r}; choose from {LATTICE_KINDS}")
        if self.L < 2:
            raise ValueError(f"L must be at least 2, got {self.L}")
        if self.boundary != "open":
            raise ValueError("only open boundaries are supported")


@dataclass(frozen=True)
class Lattice:
    spec: LatticeSpec
    n_sites: int
    indptr: np.ndarray
    indices: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def degree(self):
        return np.diff(self.indptr)


@dataclass(frozen=True)
class PercolationEstimate:
    p_th: float
    stderr: float
    trials: int
    L: int
    kind: str = ""
    seed: int = 0


def _edges_square(L):
    idx = np.arange(L * L).reshape(L, L)
    e = [
        np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], 1),
        np.stack([idx[:-1].ravel(), idx[1:].ravel()], 1),
    ]
    return L * L, np.concatenate(e), idx[:, 0], idx[:, -1]


def _edges_honeycomb(L):
    rows, cols = L, int(round(math.sqrt(3.0) * L))
    idx = np.arange(rows * cols).reshape(rows, cols)
    r, c = np.meshgrid(np.arange(rows - 1), np.arange(cols), indexing="ij")
    rungs = (r + c) % 2 == 0
    e = [
        np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], 1),
        np.stack([idx[:-1][rungs], idx[1:][rungs]], 1),
    ]
    return rows * cols, np.concatenate(e), idx[:, 0], idx[:, -1]


def _edges_square_octagon(L):
    # each cell is a 4-site plaquette: 0=E, 1=N, 2=W, 3=S
    idx = np.arange(L * L * 4).reshape(L, L, 4)
    e = [np.stack([idx[..., a].ravel(), idx[..., b].ravel()], 1)
         for a, b in ((0, 1), (1, 2), (2, 3), (3, 0))]
    e.append(np.stack([idx[:, :-1, 0].ravel(), idx[:, 1:, 2].ravel()], 1))
    e.append(np.stack([idx[:-1, :, 1].ravel(), idx[1:, :, 3].ravel()], 1))
    return L * L * 4, np.concatenate(e), idx[:, 0, 2], idx[:, -1, 0]


_BUILDERS = {
    "honeycomb": _edges_honeycomb,
    "square-octagon": _edges_square_octagon,
    "square": _edges_square,
}


@lru_cache(maxsize=16)
def build_lattice(spec):
    """Adjacency (CSR) and boundary masks for ``spec``."""
    n, edges, left, right = _BUILDERS[spec.kind](spec.L)
    both = np.concatenate([edges, edges[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, both[:, 0] + 1, 1)
    indptr = np.cumsum(indptr)
    left_mask = np.zeros(n, dtype=np.bool_)
    right_mask = np.zeros(n, dtype=np.bool_)
    left_mask[left] = True
    right_mask[right] = True
    arrays = (indptr, both[:, 1].astype(np.int64), left_mask, right_mask)
    for arr in arrays:
        arr.setflags(write=False)
    return Lattice(spec, n, *arrays)


# --- union-find kernels ------------------------------------------------------

@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _union(parent, size, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]


@njit(cache=True)
def _critical_value(order, u, indptr, indices, left, right):
    n = u.shape[0]
    parent = np.arange(n + 2)
    size = np.ones(n + 2, dtype=np.int64)
    occupied = np.zeros(n, dtype=np.bool_)
    lv, rv = n, n + 1
    for k in range(n):
        s = order[k]
        occupied[s] = True
        if left[s]:
            _union(parent, size, s, lv)
        if right[s]:
            _union(parent, size, s, rv)
        for j in range(indptr[s], indptr[s + 1]):
            t = indices[j]
            if occupied[t]:
                _union(parent, size, s, t)
        if _find(parent, lv) == _find(parent, rv):
            return u[s]
    return 1.0


@njit(cache=True)
def _spans_uf(occupied, indptr, indices, left, right):
    n = occupied.shape[0]
    parent = np.arange(n + 2)
    size = np.ones(n + 2, dtype=np.int64)
    for s in range(n):
        if not occupied[s]:
            continue
        if left[s]:
            _union(parent, size, s, n)
        if right[s]:
            _union(parent, size, s, n + 1)
        for j in range(indptr[s], indptr[s + 1]):
            t = indices[j]
            if t > s and occupied[t]:
                _union(parent, size, s, t)
    return _find(parent, n) == _find(parent, n + 1)


def _trial_rng(seed, trial):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def sample_occupation(lattice, p, seed, trial):
    """Occupation of one trial at probability ``p`` (shares the trial's uniforms)."""
    u = _trial_rng(seed, trial).random(lattice.n_sites)
    return u < p


def spans(lattice, occupied):
    """Union-find test for a left-right spanning cluster of occupied sites."""
    occ = np.asarray(occupied, dtype=np.bool_)
    return bool(_spans_uf(occ, lattice.indptr, lattice.indices, lattice.left, lattice.right))


def spans_bfs(lattice, occupied):
    """Breadth-first reference for :func:`spans`."""
    occ = np.asarray(occupied, dtype=bool)
    frontier = [int(s) for s in np.flatnonzero(occ & lattice.left)]
    seen = set(frontier)
    while frontier:
        s = frontier.pop()
        if lattice.right[s]:
            return True
        for t in lattice.indices[lattice.indptr[s]:lattice.indptr[s + 1]]:
            t = int(t)
            if occ[t] and t not in seen:
                seen.add(t)
                frontier.append(t)
    return False


@lru_cache(maxsize=64)
def _critical_cached(spec, first, count, seed):
    lat = build_lattice(spec)
    out = np.empty(count)
    for i in range(count):
        u = _trial_rng(seed, first + i).random(lat.n_sites)
        out[i] = _critical_value(np.argsort(u, kind="stable"), u, lat.indptr,
                                 lat.indices, lat.left, lat.right)
    out.setflags(write=False)
    return out


def critical_occupations(spec, trials, seed, first=0):
    """Per-trial occupation probability at which the lattice first spans."""
    if trials < 1:
        raise ValueError("need at least one trial")
    return _critical_cached(spec, int(first), int(trials), int(seed))


def spanning_probability(spec, p, trials, seed):
    """Fraction of ``trials`` lattices with a left-right spanning cluster at ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    crit = critical_occupations(spec, trials, seed)
    return float(np.mean(crit < p))


def _bisect_half(crit, lo, hi, tol):
    f = lambda p: np.mean(crit < p)  # noqa: E731
    if not (f(lo) < 0.5 <= f(hi)):
        raise ValueError(
            f"spanning probability does not cross 1/2 inside [{lo}, {hi}] "
            f"({f(lo):.3f}, {f(hi):.3f}); increase trials or widen the bracket"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def site_threshold(spec, trials=200, seed=0, groups=4, tol=0.002, bracket=(0.0, 1.0)):
    """Occupation where the spanning probability crosses 1/2.

    Bisection runs on the pooled spanning curve of ``trials`` lattices until
    the crossing is bracketed within ``tol``. The standard error comes from
    the spread of the same bisection on ``groups`` disjoint batches, combined
    with the bisection resolution.
    """
    if trials < 2 * groups:
        raise ValueError(f"need at least {2 * groups} trials for {groups} groups")
    crit = np.asarray(critical_occupations(spec, trials, seed))
    lo, hi = bracket
    estimate = _bisect_half(crit, lo, hi, tol)
    batches = np.array_split(crit, groups)
    per_group = np.array([_bisect_half(b, lo, hi, tol) for b in batches])
    spread = per_group.std(ddof=1) / math.sqrt(groups)
    stderr = math.sqrt(spread ** 2 + tol ** 2 / 12.0)
    return PercolationEstimate(p_th=float(estimate), stderr=float(stderr), trials=int(trials),
                               L=spec.L, kind=spec.kind, seed=int(seed))


def critical_deformation(p_th):
    """Smallest a^2 with p_delete <= 1 - p_th, i.e. a^2 = p_th / (4 - p_th)."""
    if not 0.0 < p_th < 1.0:
        raise ValueError(f"p_th must lie in (0, 1), got {p_th}")
    return p_th / (4.0 - p_th)


def zero_T_boundary(model, lattice="honeycomb", p_th=None):
    """Zero-temperature universality boundary in the model parameter.

    Parameters
    ----------
    model : Model or str
    lattice : str or PercolationEstimate
        Lattice name (literature threshold) or a Monte Carlo estimate.
    p_th : float, optional
        Explicit site threshold; overrides ``lattice``. Use this for lattices
        not built here, e.g. the cross lattice.
    """
    if p_th is None:
        if isinstance(lattice, PercolationEstimate):
            p_th = lattice.p_th
        else:
            try:
                p_th = SITE_THRESHOLDS[lattice]
            except KeyError:
                raise ValueError(f"no built-in threshold for {lattice!r}; pass p_th") from None
    a2 = critical_deformation(p_th)
    return parameter_for_deformation(math.sqrt(a2), Model(model))


# --- k(p_l) ------------------------------------------------------------------

class KRangeError(ValueError):
    """Loss rate outside the sampled range of a k table."""


@dataclass
class KCurve:
    """k(p_l) table with linear interpolation inside the sampled range only."""

    points: list
    metadata: dict = field(default_factory=dict)

    @property
    def source(self):
        return self.metadata.get("estimator", "unknown")

    def arrays(self):
        pts = sorted(self.points, key=lambda t: t[0])
        p = np.array([t[0] for t in pts], dtype=float)
        k = np.array([t[1] for t in pts], dtype=float)
        return p, k

    def k_at(self, p_l):
        p, k = self.arrays()
        if p.size == 0 or p_l < p[0] - 1e-15 or p_l > p[-1] + 1e-15:
            raise KRangeError(f"p_l={p_l:.6g} outside the k table range [{p[0]:.6g}, {p[-1]:.6g}]")
        j = int(np.searchsorted(p, p_l, side="left"))
        if j < p.size and abs(p[j] - p_l) <= 1e-15:
            val = k[j]
        else:
            j = max(1, min(j, p.size - 1))
            t = (p_l - p[j - 1]) / (p[j] - p[j - 1])
            val = (1 - t) * k[j - 1] + t * k[j]
        if not np.isfinite(val) or val <= 0:
            raise KRangeError(f"k({p_l:.6g}) is unusable")
        return float(val)

    def to_csv(self):
        rows = ["p_l,k,stderr"]
        for t in sorted(self.points, key=lambda t: t[0]):
            stderr = t[2] if len(t) > 2 else float("nan")
            rows.append(f"{t[0]!r},{t[1]!r},{stderr!r}")
        return "\n".join(rows) + "\n"


def load_k_table(path):
    """Read a user k table with header ``p_l,k``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"p_l", "k"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected a header with columns p_l,k")
        points = [(float(r["p_l"]), float(r["k"]), float("nan")) for r in reader]
    if not points:
        raise ValueError(f"{path}: empty k table")
    return KCurve(points, {"estimator": f"table:{path}"})


def _node_grid(L, spacing):
    """Brick-wall node positions and the adjacent pairs between them."""
    n = (L - 1) // spacing + 1
    off = (L - 1 - (n - 1) * spacing) // 2
    coords = off + spacing * np.arange(n)
    pairs = []
    for i in range(n):
        for j in range(n):
            if j + 1 < n:
                pairs.append(((i, j), (i, j + 1)))
            if i + 1 < n and (i + j) % 2 == 0:
                pairs.append(((i, j), (i + 1, j)))
    return coords, pairs


@njit(cache=True)
def _pair_distances(giant, L, src, dst):
    """Breadth-first distance inside ``giant`` for each (src, dst) site pair."""
    n = L * L
    stamp = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    out = np.full(src.shape[0], -1, dtype=np.int64)
    for k in range(src.shape[0]):
        mark = k + 1
        a, b = src[k], dst[k]
        if a == b:
            out[k] = 0
            continue
        head, tail = 0, 1
        queue[0] = a
        stamp[a] = mark
        dist[a] = 0
        while head < tail and out[k] < 0:
            s = queue[head]
            head += 1
            r, c = s // L, s % L
            for dr, dc in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                rr, cc = r + dr, c + dc
                if rr < 0 or rr >= L or cc < 0 or cc >= L:
                    continue
                t = rr * L + cc
                if not giant[t] or stamp[t] == mark:
                    continue
                stamp[t] = mark
                dist[t] = dist[s] + 1
                if t == b:
                    out[k] = dist[t]
                    break
                queue[tail] = t
                tail += 1
    return out


def _trial_path_lengths(alive, spacing):
    """Shortest-path lengths between adjacent nodes, or None if the giant cluster does not span."""
    L = alive.shape[0]
    labels, count = ndimage.label(alive)
    if count == 0:
        return None
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    giant = labels == int(np.argmax(sizes))
    if not (giant[:, 0].any() and giant[:, -1].any() and giant[0].any() and giant[-1].any()):
        return None

    coords, pairs = _node_grid(L, spacing)
    # snap every node to the nearest site of the giant cluster
    _, (ni, nj) = ndimage.distance_transform_edt(~giant, return_indices=True)
    rr, cc = np.meshgrid(coords, coords, indexing="ij")
    site = ni[rr, cc] * L + nj[rr, cc]
    pa = np.array([site[a] for a, _ in pairs], dtype=np.int64)
    pb = np.array([site[b] for _, b in pairs], dtype=np.int64)
    lengths = _pair_distances(giant.ravel(), L, pa, pb).astype(float)
    if np.any(lengths < 0):
        return None
    # nodes snapped onto the same site still cost one bond
    return np.maximum(lengths, 1.0)


def k_curve(loss_grid, L=64, trials=20, seed=0, c0=1.0, retries=10):
    """Monte Carlo estimate of k(p_l), the inverse mean path length between network nodes.

    Sites of an L x L square lattice are deleted with probability ``p_l``.
    Nodes of a brick-wall (hexagonal) array with spacing
    ceil(c0 / (1 - p_l)) are snapped to the nearest site of the largest
    surviving cluster, and k = 1 / mean shortest-path length between
    adjacent nodes. This is an approximation of the renormalization
    procedure, not a reproduction of it.

    Points above the 40% loss tolerance are reported as NaN. A point whose
    trials keep failing after ``retries`` resamples is unusable (k = 0).
    """
    grid = [float(p) for p in loss_grid]
    for p in grid:
        if not 0.0 <= p <= 0.45:
            raise ValueError(f"loss rates must lie in [0, 0.45], got {p}")
    points = []
    for p_l in grid:
        if p_l > LOSS_TOLERANCE_2D:
            points.append((p_l, float("nan"), float("nan")))
            continue
        spacing = max(1, math.ceil(c0 / (1.0 - p_l) - 1e-12))
        tag = int(round(p_l * 2 ** 32))
        per_trial = []
        usable = True
        for t in range(trials):
            lengths = None
            for attempt in range(retries + 1):
                rng = np.random.default_rng(np.random.SeedSequence([int(seed), tag, t, attempt]))
                alive = rng.random((L, L)) >= p_l
                lengths = _trial_path_lengths(alive, spacing)
                if lengths is not None:
                    break
            if lengths is None:
                usable = False
                break
            per_trial.append(lengths)
        if not usable:
            points.append((p_l, 0.0, float("nan")))
            continue
        all_lengths = np.concatenate(per_trial)
        k = 1.0 / all_lengths.mean()
        k_t = np.array([1.0 / x.mean() for x in per_trial])
        stderr = float(k_t.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
        points.append((p_l, float(k), stderr))
    meta = {"estimator": "monte-carlo-brickwall-paths", "L": L, "trials": trials,
            "seed": seed, "c0": c0, "retries": retries}
    return KCurve(points, meta)
