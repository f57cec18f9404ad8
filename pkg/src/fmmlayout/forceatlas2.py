"""Force simulation for large components.

Three linear forces per iteration: edge attraction k_a*(p_v - p_u),
center gravity k_g*(center - p_i), and pairwise repulsion of magnitude
k_r/r evaluated through the multipole solver (or the exact quadratic sum
for testing).  The global step adapts to keep the traction/swing ratio

    swg = sum_n |F_t(n) - F_{t-1}(n)|,   trc = sum_n |F_t(n) + F_{t-1}(n)|

inside a tolerated band: high ratio (steady pull) grows the step, low
ratio (erratic swing) shrinks it.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import active
from .fmm import FmmParams, evaluate_repulsion
from .fmm.evaluate import brute_force_repulsion
from .graph import Component


@dataclass(frozen=True)
class Fa2Params:
    k_a: float = 1.0  # attraction per unit distance
    k_g: float = 0.05  # gravity per unit distance from center
    k_r: float = 10.0  # repulsion at unit distance
    iterations: int = 500
    step0: float = 0.1
    ratio_lo: float = 1.5  # trc/swg band
    ratio_hi: float = 3.0
    step_factor: float = 1.3
    step_min: float = 1e-4
    step_max: float = 10.0
    scale: float = 1.0  # layout length unit: init square side sqrt(n)*scale
    seed: int = 0

    def __post_init__(self):
        for name in ("k_a", "k_g", "k_r", "step0", "step_factor", "scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.ratio_lo < self.ratio_hi:
            raise ValueError("ratio_lo must be below ratio_hi")
        if not 0 < self.step_min < self.step_max:
            raise ValueError("need 0 < step_min < step_max")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


@dataclass
class Fa2State:
    positions: np.ndarray  # (n, 2)
    prev_forces: np.ndarray  # F_{t-1}
    step: float
    iteration: int = 0
    last_max_displacement: float = np.inf


class DegenerateLayoutError(RuntimeError):
    """Coincident nodes persisted after the jitter-and-retry pass."""


def attraction_forces(c: Component, positions: np.ndarray, k_a: float = 1.0) -> np.ndarray:
    """Per-edge pull k_a*(p_v - p_u) on u and the negation on v."""
    out = np.zeros_like(positions)
    active.accumulate_attraction(c.edges, positions, k_a, out)
    return out


def gravity_forces(positions: np.ndarray, k_g: float, center=(0.0, 0.0)) -> np.ndarray:
    return k_g * (np.asarray(center, dtype=np.float64) - positions)


def swing_traction(curr: np.ndarray, prev: np.ndarray) -> tuple[float, float]:
    swg = float(np.hypot(*(curr - prev).T).sum())
    trc = float(np.hypot(*(curr + prev).T).sum())
    return swg, trc


def _layout_scale(positions: np.ndarray, fallback: float) -> float:
    if positions.shape[0] < 2:
        return fallback
    span = positions.max(axis=0) - positions.min(axis=0)
    s = float(max(span[0], span[1]))
    return s if s > 0 else fallback


def _total_forces(c, positions, params, fmm_params, repulsion):
    if repulsion == "fmm":
        rep = evaluate_repulsion(positions, fmm_params)
        forces = rep.forces
        bad = rep.degenerate
    else:
        forces = brute_force_repulsion(positions, params.k_r)
        bad = np.zeros(positions.shape[0], bool)
    forces = forces + attraction_forces(c, positions, params.k_a)
    forces += gravity_forces(positions, params.k_g)
    nonfinite = ~np.isfinite(forces).all(axis=1)
    bad = bad | nonfinite
    return forces, bad


def fa2_step(
    c: Component,
    state: Fa2State,
    params: Fa2Params,
    fmm_params: FmmParams | None = None,
    repulsion: str = "fmm",
) -> Fa2State:
    """One simulation step; returns the advanced state.

    Coincident nodes (or non-finite forces) trigger one seeded jitter of
    magnitude 1e-6 * layout scale and a recompute; a second failure
    raises `DegenerateLayoutError`.
    """
    fmm_params = (fmm_params or FmmParams()).with_k_r(params.k_r)
    pos = state.positions
    forces, bad = _total_forces(c, pos, params, fmm_params, repulsion)
    if bad.any():
        rng = np.random.default_rng((params.seed, state.iteration))
        jitter = rng.normal(size=(int(bad.sum()), 2))
        jitter /= np.hypot(jitter[:, 0], jitter[:, 1])[:, None]
        pos = pos.copy()
        pos[bad] += 1e-6 * _layout_scale(pos, params.scale) * jitter
        forces, bad = _total_forces(c, pos, params, fmm_params, repulsion)
        if bad.any():
            raise DegenerateLayoutError(
                f"{int(bad.sum())} nodes still degenerate after jitter"
            )
    swg, trc = swing_traction(forces, state.prev_forces)
    step = state.step
    if swg >= 1e-12:
        ratio = trc / swg
        if ratio > params.ratio_hi:
            step *= params.step_factor
        elif ratio < params.ratio_lo:
            step /= params.step_factor
        step = min(max(step, params.step_min), params.step_max)
    new_pos = pos + step * forces
    disp = float(np.hypot(*(step * forces).T).max()) if pos.shape[0] else 0.0
    return Fa2State(
        positions=new_pos,
        prev_forces=forces,
        step=step,
        iteration=state.iteration + 1,
        last_max_displacement=disp,
    )


def initial_positions(n: int, params: Fa2Params) -> np.ndarray:
    """Seeded uniform draw from a square of side sqrt(n)*scale."""
    rng = np.random.default_rng(params.seed)
    side = np.sqrt(max(n, 1)) * params.scale
    return rng.uniform(-side / 2.0, side / 2.0, (n, 2))


def fa2_layout(
    c: Component,
    params: Fa2Params | None = None,
    fmm_params: FmmParams | None = None,
    repulsion: str = "fmm",
) -> np.ndarray:
    """Run the simulation from a seeded random start.

    Stops after ``iterations`` steps or as soon as the largest per-node
    displacement of a step drops below 1e-4 * scale.
    """
    params = params or Fa2Params()
    n = c.n_nodes
    if n == 0:
        raise ValueError("cannot lay out an empty component")
    state = Fa2State(
        positions=initial_positions(n, params),
        prev_forces=np.zeros((n, 2)),
        step=params.step0,
    )
    stop_at = 1e-4 * params.scale
    for _ in range(params.iterations):
        state = fa2_step(c, state, params, fmm_params, repulsion)
        if state.last_max_displacement < stop_at:
            break
    return state.positions
