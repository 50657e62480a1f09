"""Randomized coverage checks of the moment image and a brute-force SNF oracle."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

import numpy as np

from . import _kernels as K
from .delzant import DelzantData, LevelPoint, NotOnLevelSet
from .polytope import bounding_box

# Samples per RNG stream. Stream k always yields the same CHUNK points, so a
# run with N samples is a prefix of any run with more samples.
CHUNK = 2048
MAX_PROPOSAL_ROUNDS = 1000


class RejectionBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SampleReport:
    n_samples: int
    seed: int
    max_roundtrip_error: float
    max_level_residual: float
    max_moment_residual: float
    vertex_distances: tuple[float, ...]
    extent_min: tuple[float, ...]
    extent_max: tuple[float, ...]
    extent_gaps: tuple[float, ...]
    acceptance_ratio: float


def _stream(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def _draw_inside(D: DelzantData, rng: np.random.Generator, count: int, batch: int):
    """Rejection-sample ``count`` points of the polytope from its bounding box."""
    F = D.floats
    box = bounding_box(D.polytope)
    lo, width = box[:, 0], box[:, 1] - box[:, 0]
    parts, got, proposed = [], 0, 0
    rounds = 0
    while got < count:
        rounds += 1
        if rounds > MAX_PROPOSAL_ROUNDS:
            raise RejectionBudgetExceeded(
                f"accepted {got} of {proposed} proposals after {rounds - 1} rounds")
        x = lo + width * rng.random((batch, D.n))
        slack = K.halfspace_slack(x, F.normals, F.offsets)
        keep = (slack >= 0.0).all(axis=1)
        parts.append((x[keep], slack[keep]))
        got += int(keep.sum())
        proposed += batch
    mu = np.concatenate([p[0] for p in parts])[:count]
    moduli = np.concatenate([p[1] for p in parts])[:count]
    return mu, moduli, got, proposed


def random_level_point(D: DelzantData, rng: np.random.Generator) -> tuple[np.ndarray, LevelPoint]:
    """Uniform ``mu`` in the polytope with its fiber point at random phases."""
    mu, moduli, _, _ = _draw_inside(D, rng, 1, 64)
    phases = rng.random(D.d)
    return mu[0], LevelPoint(tuple(moduli[0].tolist()), tuple(phases.tolist()))


@dataclass
class _Partial:
    count: int
    accepted: int
    proposed: int
    roundtrip: float
    level: float
    moment: float
    vmin: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    samples: np.ndarray | None


def _run_chunk(D: DelzantData, seed: int, index: int, count: int, keep: bool) -> _Partial:
    rng = _stream(seed, index)
    F = D.floats
    mu, moduli, accepted, proposed = _draw_inside(D, rng, CHUNK, CHUNK)
    # phases are drawn for the full chunk so prefixes stay stable
    rng.random((CHUNK, D.d))
    mu, moduli = mu[:count], moduli[:count]
    level = K.level_residual(moduli, F.basis, F.offsets)
    back, resid = K.solve_moments(moduli, F.offsets, F.normals, F.solve_idx, F.solve_inv)
    return _Partial(
        count=count,
        accepted=accepted,
        proposed=proposed,
        roundtrip=float(np.abs(back - mu).max()),
        level=float(level.max()),
        moment=float(resid.max()),
        vmin=K.sup_distance(back, F.vertices),
        lo=back.min(axis=0),
        hi=back.max(axis=0),
        samples=back if keep else None,
    )


def certify_moment_image(
    D: DelzantData,
    n_samples: int,
    seed: int = 0,
    *,
    tol: float = 1e-9,
    workers: int = 1,
    return_samples: bool = False,
):
    """Sample the moment image and measure how well it fills the polytope.

    Each sample ``mu`` is lifted to its fiber point and pushed back through the
    moment map. Returns a SampleReport, or ``(report, samples)`` when
    ``return_samples`` is set. Raises NotOnLevelSet if any pushed-back sample
    misses its equations by more than ``tol``.
    """
    F = D.floats
    nchunks = math.ceil(n_samples / CHUNK)
    sizes = [min(CHUNK, n_samples - k * CHUNK) for k in range(nchunks)]
    if workers > 1 and nchunks > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda k: _run_chunk(D, seed, k, sizes[k], return_samples),
                                range(nchunks)))
    else:
        parts = [_run_chunk(D, seed, k, sizes[k], return_samples) for k in range(nchunks)]

    box = bounding_box(D.polytope)
    nv = F.vertices.shape[0]
    if not parts:
        inf = (math.inf,) * D.n
        report = SampleReport(0, seed, 0.0, 0.0, 0.0, (math.inf,) * nv, inf,
                              tuple(-x for x in inf), inf, 0.0)
        samples = np.empty((0, D.n))
    else:
        moment = max(p.moment for p in parts)
        if moment > tol:
            raise NotOnLevelSet(f"moment residual {moment:.3g} exceeds {tol:.3g}")
        lo = np.min([p.lo for p in parts], axis=0)
        hi = np.max([p.hi for p in parts], axis=0)
        gaps = np.maximum(np.abs(lo - box[:, 0]), np.abs(hi - box[:, 1]))
        report = SampleReport(
            n_samples=n_samples,
            seed=seed,
            max_roundtrip_error=max(p.roundtrip for p in parts),
            max_level_residual=max(p.level for p in parts),
            max_moment_residual=moment,
            vertex_distances=tuple(np.min([p.vmin for p in parts], axis=0).tolist()),
            extent_min=tuple(lo.tolist()),
            extent_max=tuple(hi.tolist()),
            extent_gaps=tuple(gaps.tolist()),
            acceptance_ratio=sum(p.accepted for p in parts) / sum(p.proposed for p in parts),
        )
        samples = np.concatenate([p.samples for p in parts]) if return_samples else None
    if return_samples:
        return report, samples
    return report


# ---------------------------------------------------------------------------
# Smith normal form oracle


def _det(M: Sequence[Sequence[int]]) -> int:
    """Leibniz formula; fine for the <= 4x4 minors this oracle sees."""
    k = len(M)
    total = 0
    for perm in permutations(range(k)):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i in range(k):
            term *= M[i][perm[i]]
        total += term
    return total


def snf_oracle(A) -> tuple[int, ...]:
    """Invariant factors (including 1s) from gcds of k x k minors."""
    A = [[int(x) for x in row] for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    factors: list[int] = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for R in combinations(range(rows), k):
            for C in combinations(range(cols), k):
                g = math.gcd(g, _det([[A[i][j] for j in C] for i in R]))
        if g == 0:
            break
        factors.append(g // prev)
        prev = g
    return tuple(factors)
