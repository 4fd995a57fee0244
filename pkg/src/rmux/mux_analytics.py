"""Closed-form accounting for concatenated standard multiplexing.

A probabilistic operation with per-attempt success eta needs the smallest k
with 1 - (1 - eta)^k >= p_s to reach target probability p_s; a binary
switching network rounds k up to a power of two and adds one output switch.
Chaining a single-photon stage into a three-photon-entangling stage (success
1/32 given six input photons) gives the whole near-deterministic generator,
whose surplus capacity is what relative multiplexing later recovers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .delay_network import depth_for_bins

GATE_PROB_3GHZ = 1.0 / 32.0     # heralded success of the six-photon generator
PHOTONS_PER_GHZ = 6


@dataclass(frozen=True)
class MuxStage:
    input_prob: float
    target_prob: float
    k: int                       # repetitions required
    k_up: int                    # power-of-two rounding of k
    depth: int                   # switch-network depth
    potential_mean: float        # mean resource states producible from all bins


@dataclass(frozen=True)
class MuxReport:
    stages: tuple
    combined_prob: float         # product over all parallel streams and stages
    combined_depth: int
    bins_per_stream: int
    total_bins: int              # across all parallel streams
    potential_photons_mean: float
    potential_ghz_mean: float


def required_repetitions(eta: float, p_s: float) -> int:
    """Smallest k with 1 - (1 - eta)^k >= p_s."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    if not 0.0 < p_s < 1.0:
        raise ValueError(f"p_s must be in (0, 1), got {p_s}")
    if eta == 1.0:
        return 1
    # Closed form with a local integer correction for float roundoff.
    k = max(1, math.ceil(math.log1p(-p_s) / math.log1p(-eta)))
    while 1.0 - (1.0 - eta) ** k < p_s:
        k += 1
    while k > 1 and 1.0 - (1.0 - eta) ** (k - 1) >= p_s:
        k -= 1
    return k


def _stage(input_prob: float, target_prob: float,
           potential_per_bin: float) -> MuxStage:
    k = required_repetitions(input_prob, target_prob)
    k_up, depth = depth_for_bins(k)
    return MuxStage(input_prob=input_prob, target_prob=target_prob,
                    k=k, k_up=k_up, depth=depth,
                    potential_mean=k_up * potential_per_bin)


def ghz_report(eta: float, p1: float, p2: float,
               n_photons: int = PHOTONS_PER_GHZ,
               gate_prob: float = GATE_PROB_3GHZ) -> MuxReport:
    """Two-stage resource accounting for one near-deterministic 3-GHZ state.

    Stage 1 boosts each of n_photons sources from eta to p1; stage 2 boosts
    the entangling gate from gate_prob to p2. Resource potentials count the
    states the occupied bins could have produced on average.
    """
    if n_photons < 1:
        raise ValueError(f"n_photons must be >= 1, got {n_photons}")
    stage1 = _stage(eta, p1, potential_per_bin=eta)
    stage2 = _stage(gate_prob, p2, potential_per_bin=gate_prob)
    bins_per_stream = stage1.k_up * stage2.k_up
    potential_photons = bins_per_stream * n_photons * eta
    potential_ghz = potential_photons / n_photons * gate_prob
    return MuxReport(
        stages=(stage1, stage2),
        combined_prob=p1 ** n_photons * p2,
        combined_depth=stage1.depth + stage2.depth,
        bins_per_stream=bins_per_stream,
        total_bins=bins_per_stream * n_photons,
        potential_photons_mean=potential_photons,
        potential_ghz_mean=potential_ghz,
    )


def unused_potential(eta: float, p_s: float, p_min: float = 0.8,
                     p_max: float = 0.99, step: float = 0.01,
                     n_photons: int = PHOTONS_PER_GHZ,
                     gate_prob: float = GATE_PROB_3GHZ):
    """Cheapest (p1, p2) stage targets that still reach overall p_s.

    Grid search over stage probabilities in [p_min, p_max] with the given
    step, feasibility p1^n_photons * p2 >= p_s, minimizing the mean number
    of surplus GHZ states (producible states beyond the one kept). The
    default 0.01 grid reproduces the published operating points; finer
    steps can find slightly cheaper schedules.

    Returns (best_p1, best_p2, wasted_ghz_mean, k_up1, k_up2).
    """
    if not 0.0 < p_min <= p_max < 1.0:
        raise ValueError("need 0 < p_min <= p_max < 1")
    n_steps = int(round((p_max - p_min) / step))
    grid = [round(p_min + i * step, 12) for i in range(n_steps + 1)]
    best = None
    for p1 in grid:
        if p1 ** n_photons * grid[-1] < p_s:
            continue
        for p2 in grid:
            if p1 ** n_photons * p2 < p_s:
                continue
            report = ghz_report(eta, p1, p2, n_photons, gate_prob)
            wasted = report.potential_ghz_mean - 1.0
            key = (wasted, report.total_bins, p1, p2)
            if best is None or key < best[0]:
                best = (key, p1, p2, report)
            break  # p2 grid is ascending; larger p2 never costs less k_up2
    if best is None:
        raise ValueError(
            f"no (p1, p2) on the grid reaches p_s={p_s} (max "
            f"{grid[-1] ** n_photons * grid[-1]:.4f})")
    _, p1, p2, report = best
    return (p1, p2, report.potential_ghz_mean - 1.0,
            report.stages[0].k_up, report.stages[1].k_up)
