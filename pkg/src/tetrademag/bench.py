"""Timing of tensor evaluations per tetrahedron-point pair."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .assembly import batch_tet_frames, batch_tet_tensor, frames_tensor
from .sampling import random_tetrahedron

#: Per-tetrahedron time, in microseconds, used as the informational target.
TARGET_US = 3.0


@dataclass(frozen=True)
class BenchResult:
    n: int
    eval_us: float
    setup_eval_us: float
    cache_pose: bool

    @property
    def headline_us(self) -> float:
        return self.eval_us if self.cache_pose else self.setup_eval_us

    def report(self) -> str:
        met = "met" if self.headline_us <= TARGET_US else "not met"
        return "\n".join(
            [
                f"evaluations            : {self.n}",
                f"cached pose, us/eval   : {self.eval_us:.4f}",
                f"with setup, us/eval    : {self.setup_eval_us:.4f}",
                f"target {TARGET_US:.1f} us/eval   : {met} ({'cached' if self.cache_pose else 'with setup'})",
            ]
        )


def run_benchmark(n: int = 1_000_000, cache_pose: bool = True, seed: int = 0, batch: int = 50_000, pool: int = 64):
    """Time ``n`` tensor-and-field evaluations.

    Cached timing reuses the face frames of ``pool`` random tetrahedra and
    evaluates each at ``n / pool`` random points. Setup timing pairs every
    point with a fresh tetrahedron and includes building its frames.
    """
    rng = np.random.default_rng(seed)
    tets = np.stack([random_tetrahedron(rng).vertices for _ in range(pool)])
    m = rng.normal(size=3)

    frames = batch_tet_frames(tets)
    per_tet = -(-n // pool)
    pts = rng.uniform(-0.5, 1.5, size=(min(per_tet, batch), 3))
    done = 0
    t0 = time.perf_counter()
    for i in range(pool):
        f = frames._index(i)
        left = min(per_tet, n - done)
        while left > 0:
            k = min(left, len(pts))
            N = frames_tensor(f, pts[:k])
            _ = N @ m
            left -= k
            done += k
        if done >= n:
            break
    eval_us = (time.perf_counter() - t0) / n * 1e6

    # fresh tetrahedra for every evaluation, drawn from the pool by cycling
    idx = np.arange(min(batch, n)) % pool
    verts = tets[idx]
    r = rng.uniform(-0.5, 1.5, size=(len(idx), 3))
    done = 0
    t0 = time.perf_counter()
    while done < n:
        k = min(len(idx), n - done)
        fr = batch_tet_frames(verts[:k])
        N = batch_tet_tensor(fr, r[:k])
        _ = N @ m
        done += k
    setup_us = (time.perf_counter() - t0) / n * 1e6
    return BenchResult(n, eval_us, setup_us, cache_pose)
