"""Monte Carlo sampling of the trajectory Markov chain (rho_n, X_n).

Each step evaluates p_B = Tr(B rho B*) and jumps to (B rho B*/p_B, x-1) when
the uniform draw falls below p_B, else to (C rho C*/p_C, x+1). The position
marginal of this chain is exactly the walk distribution.

Randomness is counter-based: trajectory i consumes the stream of
Philox(key=[seed, i]), so results are reproducible bit for bit regardless of
how many threads process the trajectory chunks. OQRW_THREADS caps the thread
count; chunk results are merged in index order either way.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import KrausPair, density_matrix
from .distribution import Distribution
from .exceptions import DegenerateJump

DEGENERATE_TOL = 1e-14
CHUNK = 4096


@dataclass(frozen=True)
class TrajectoryState:
    rho: np.ndarray
    x: int


@dataclass(frozen=True)
class SampleReport:
    n_steps: int
    n_traj: int
    seed: int
    empirical: Distribution
    mean: float
    variance: float

    def to_json_dict(self) -> dict:
        return {
            "n_steps": self.n_steps,
            "n_traj": self.n_traj,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "distribution": self.empirical.to_json_dict(),
        }


def trajectory_step(kp: KrausPair, s: TrajectoryState, u: float) -> TrajectoryState:
    """One jump driven by the uniform draw u in [0, 1)."""
    B, C = kp
    cand_b = B @ s.rho @ B.conj().T
    cand_c = C @ s.rho @ C.conj().T
    p_b = float(np.trace(cand_b).real)
    p_c = float(np.trace(cand_c).real)
    if p_b < DEGENERATE_TOL and p_c < DEGENERATE_TOL:
        raise DegenerateJump(f"both branch probabilities vanish (p_b={p_b:.3e}, p_c={p_c:.3e})")
    take_b = u < p_b
    # A branch of vanishing probability can only be selected when u sits within
    # 1e-14 of the boundary; jump the other way deterministically instead.
    if take_b and p_b < DEGENERATE_TOL:
        take_b = False
    elif not take_b and p_c < DEGENERATE_TOL:
        take_b = True
    if take_b:
        rho = cand_b / p_b
        x = s.x - 1
    else:
        rho = cand_c / p_c
        x = s.x + 1
    rho = (rho + rho.conj().T) / 2
    return TrajectoryState(rho, x)


def _thread_count(n_chunks: int, threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("OQRW_THREADS", "").strip()
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(int(threads), n_chunks))


def _run_chunk(kp: KrausPair, rho0: np.ndarray, n_steps: int, seed: int, lo: int, hi: int) -> np.ndarray:
    """Final positions of trajectories lo..hi-1, shifted to counts over [-n, n]."""
    m = hi - lo
    B, C = kp
    Bd, Cd = B.conj().T, C.conj().T
    u = np.empty((m, n_steps))
    for i in range(m):
        u[i] = np.random.Generator(np.random.Philox(key=[seed, lo + i])).random(n_steps)
    rhos = np.broadcast_to(rho0, (m, 2, 2)).copy()
    x = np.zeros(m, dtype=np.int64)
    for t in range(n_steps):
        cand_b = B[None] @ rhos @ Bd[None]
        cand_c = C[None] @ rhos @ Cd[None]
        p_b = np.trace(cand_b, axis1=1, axis2=2).real
        p_c = np.trace(cand_c, axis1=1, axis2=2).real
        if np.any((p_b < DEGENERATE_TOL) & (p_c < DEGENERATE_TOL)):
            raise DegenerateJump("both branch probabilities vanish")
        take_b = u[:, t] < p_b
        take_b &= p_b >= DEGENERATE_TOL
        take_b |= p_c < DEGENERATE_TOL
        denom = np.where(take_b, p_b, p_c)
        rhos = np.where(take_b[:, None, None], cand_b, cand_c) / denom[:, None, None]
        rhos = (rhos + rhos.conj().transpose(0, 2, 1)) / 2
        x += np.where(take_b, -1, 1)
    return np.bincount(x + n_steps, minlength=2 * n_steps + 1)


def sample(
    kp: KrausPair,
    rho0,
    n_steps: int,
    n_traj: int,
    seed: int,
    threads: int | None = None,
) -> SampleReport:
    """Deterministic Monte Carlo estimate of the time-n distribution."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    rho0 = density_matrix(rho0)
    bounds = [(lo, min(lo + CHUNK, n_traj)) for lo in range(0, n_traj, CHUNK)]
    workers = _thread_count(len(bounds), threads)
    if workers == 1 or len(bounds) == 1:
        partials = [_run_chunk(kp, rho0, n_steps, seed, lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(
                pool.map(lambda b: _run_chunk(kp, rho0, n_steps, seed, *b), bounds)
            )
    counts = np.zeros(2 * n_steps + 1, dtype=np.int64)
    for part in partials:  # fixed merge order (already order-independent for ints)
        counts += part
    sites = np.arange(-n_steps, n_steps + 1, dtype=np.int64)
    keep = counts > 0
    empirical = Distribution((sites[keep], counts[keep] / n_traj))
    mean = float(sites @ counts) / n_traj
    variance = float((sites.astype(float) ** 2) @ counts) / n_traj - mean * mean
    return SampleReport(n_steps, n_traj, seed, empirical, mean, variance)
