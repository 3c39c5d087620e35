"""Customized simulated annealing over palette, opacities, and render order.

Each iteration perturbs the current solution with one of three equally
likely moves (nudge one color in RGB, nudge one opacity, swap two order
positions), regenerating until the candidate satisfies the hard constraints,
then accepts improvements always and regressions with probability
exp(delta / temperature) under a geometric cooling schedule.
"""

from __future__ import annotations

import csv
import io
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum

from .colorspace import Srgb8
from .compositing import RenderOrder
from .objective import (
    ObjectiveConfig,
    ScoreBreakdown,
    ScoreContext,
    Solution,
    check_constraints,
    resolve_region_colors,
)
from .scene import SceneStructure

__all__ = [
    "AnnealSchedule",
    "AnnealTrace",
    "TraceRow",
    "MoveKind",
    "InfeasibleStart",
    "init_solution",
    "perturb",
    "generate_candidate",
    "accept",
    "optimize",
    "optimize_multi",
    "OptimizeResult",
]


class MoveKind(str, Enum):
    COLOR = "color"
    OPACITY = "opacity"
    ORDER = "order"
    NONE = "none"  # retry budget exhausted; iteration skipped


class InfeasibleStart(RuntimeError):
    """No feasible initial solution found within the retry budget."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class AnnealSchedule:
    """Cooling schedule, perturbation step sizes, and the run seed.

    When `color_anchors`/`opacity_levels` are set, initialization and moves
    draw from those discrete choices instead of continuous perturbation
    (used to compare against exhaustive search over the same space).
    """

    t_start: float = 100_000.0
    t_end: float = 0.001
    gamma: float = 0.99
    rgb_step: int = 10
    alpha_step: float = 0.1
    alpha_bounds: tuple[float, float] = (0.1, 0.9)
    max_candidate_retries: int = 100
    seed: int = 0
    color_anchors: tuple[tuple[Srgb8, ...], ...] | None = None
    opacity_levels: tuple[float, ...] | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie strictly between 0 and 1")
        if self.t_end <= 0 or self.t_start <= self.t_end:
            raise ValueError("need t_start > t_end > 0")
        if self.rgb_step <= 0 or self.alpha_step <= 0:
            raise ValueError("perturbation steps must be positive")
        lo, hi = self.alpha_bounds
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("alpha_bounds must satisfy 0 <= lo < hi <= 1")
        if self.max_candidate_retries < 1:
            raise ValueError("max_candidate_retries must be at least 1")

    def iteration_count(self) -> int:
        """Number of cooling steps: smallest k with t_start * gamma^k <= t_end."""
        return math.ceil(math.log(self.t_start / self.t_end) / math.log(1.0 / self.gamma))

    def temperature(self, iteration: int) -> float:
        return self.t_start * self.gamma**iteration


@dataclass
class TraceRow:
    iteration: int
    temperature: float
    candidate_score: float
    best_score: float
    move: MoveKind
    accepted: bool


@dataclass
class AnnealTrace:
    """Per-iteration record of the run; best-so-far is non-decreasing."""

    rows: list[TraceRow] = field(default_factory=list)

    def best_scores(self) -> list[float]:
        return [r.best_score for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["iteration", "temperature", "candidate_score", "best_score", "move", "accepted"]
        )
        for r in self.rows:
            writer.writerow(
                [
                    r.iteration,
                    repr(r.temperature),
                    repr(r.candidate_score),
                    repr(r.best_score),
                    r.move.value,
                    int(r.accepted),
                ]
            )
        return buf.getvalue()


@dataclass
class OptimizeResult:
    solution: Solution
    breakdown: ScoreBreakdown
    trace: AnnealTrace
    seed: int


def _random_solution(
    m: int, schedule: AnnealSchedule, rng: random.Random, fixed_palette
) -> Solution:
    if fixed_palette is not None:
        palette = tuple(fixed_palette)
    elif schedule.color_anchors is not None:
        palette = tuple(rng.choice(schedule.color_anchors[c]) for c in range(m))
    else:
        palette = tuple(
            Srgb8(rng.randrange(256), rng.randrange(256), rng.randrange(256)) for _ in range(m)
        )
    if schedule.opacity_levels is not None:
        opacities = tuple(rng.choice(schedule.opacity_levels) for _ in range(m))
    else:
        lo, hi = schedule.alpha_bounds
        opacities = tuple(rng.uniform(lo, hi) for _ in range(m))
    order = list(range(m))
    rng.shuffle(order)
    return Solution(palette=palette, opacities=opacities, order=RenderOrder(tuple(order)))


def init_solution(
    scene: SceneStructure,
    cfg: ObjectiveConfig,
    schedule: AnnealSchedule,
    fixed_palette: tuple[Srgb8, ...] | None = None,
    rng: random.Random | None = None,
) -> Solution:
    """Draw a random feasible starting solution (or wrap a fixed palette).

    Re-randomizes up to `max_candidate_retries` times until the hard
    constraints hold; raises InfeasibleStart with the last violation report
    otherwise.
    """
    if fixed_palette is not None and len(fixed_palette) != scene.m:
        raise ValueError(f"fixed palette has {len(fixed_palette)} colors, scene has {scene.m}")
    rng = rng if rng is not None else random.Random(schedule.seed)
    ctx = ScoreContext(scene, cfg)
    sol = None
    for _ in range(schedule.max_candidate_retries):
        sol = _random_solution(scene.m, schedule, rng, fixed_palette)
        if ctx.feasible(sol):
            return sol
    report = check_constraints(scene, resolve_region_colors(scene, sol, cfg.blend_space), cfg)
    raise InfeasibleStart(
        f"no feasible start after {schedule.max_candidate_retries} attempts", report
    )


def perturb(
    sol: Solution,
    rng: random.Random,
    schedule: AnnealSchedule,
    lock_palette: bool = False,
) -> tuple[Solution, MoveKind]:
    """Apply exactly one random move; each kind has probability 1/3.

    Moves that cannot apply are re-drawn: order swaps on single-class scenes,
    and color moves when the palette is locked.
    """
    m = sol.m
    while True:
        p = rng.random()
        if p < 1.0 / 3.0:
            move = MoveKind.COLOR
        elif p < 2.0 / 3.0:
            move = MoveKind.OPACITY
        else:
            move = MoveKind.ORDER
        if move is MoveKind.ORDER and m == 1:
            continue
        if move is MoveKind.COLOR and lock_palette:
            continue
        break

    if move is MoveKind.COLOR:
        idx = rng.randrange(m)
        if schedule.color_anchors is not None:
            color = rng.choice(schedule.color_anchors[idx])
        else:
            cur = sol.palette[idx]
            step = schedule.rgb_step
            color = Srgb8(
                min(255, max(0, cur.r + rng.randint(-step, step))),
                min(255, max(0, cur.g + rng.randint(-step, step))),
                min(255, max(0, cur.b + rng.randint(-step, step))),
            )
        palette = list(sol.palette)
        palette[idx] = color
        return replace(sol, palette=tuple(palette)), move

    if move is MoveKind.OPACITY:
        idx = rng.randrange(m)
        if schedule.opacity_levels is not None:
            value = rng.choice(schedule.opacity_levels)
        else:
            lo, hi = schedule.alpha_bounds
            delta = schedule.alpha_step if rng.random() < 0.5 else -schedule.alpha_step
            value = min(hi, max(lo, sol.opacities[idx] + delta))
        opacities = list(sol.opacities)
        opacities[idx] = value
        return replace(sol, opacities=tuple(opacities)), move

    i, j = rng.sample(range(m), 2)
    order = list(sol.order)
    order[i], order[j] = order[j], order[i]
    return replace(sol, order=RenderOrder(tuple(order))), move


def generate_candidate(
    ctx: ScoreContext,
    sol: Solution,
    schedule: AnnealSchedule,
    rng: random.Random,
    lock_palette: bool = False,
) -> tuple[Solution, MoveKind, bool]:
    """Perturb from the current solution until the candidate is feasible.

    Returns (candidate, move, exhausted); on retry exhaustion the current
    solution comes back unchanged and the iteration is a no-op.
    """
    for _ in range(schedule.max_candidate_retries):
        cand, move = perturb(sol, rng, schedule, lock_palette)
        if ctx.feasible(cand):
            return cand, move, False
    return sol, MoveKind.NONE, True


def accept(delta_e: float, temperature: float, rng: random.Random) -> bool:
    """Accept improvements outright, regressions with prob exp(delta / T)."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if delta_e > 0:
        return True
    return rng.random() < math.exp(delta_e / temperature)


def optimize(
    scene: SceneStructure,
    cfg: ObjectiveConfig,
    schedule: AnnealSchedule,
    fixed_palette: tuple[Srgb8, ...] | None = None,
) -> OptimizeResult:
    """Run the full annealing loop and return the best feasible solution seen.

    Fully deterministic for a given (scene, config, schedule): all randomness
    flows from one generator seeded with `schedule.seed`.
    """
    rng = random.Random(schedule.seed)
    ctx = ScoreContext(scene, cfg)
    lock_palette = fixed_palette is not None
    current = init_solution(scene, cfg, schedule, fixed_palette, rng=rng)
    current_bd = ctx.evaluate(current)
    best, best_bd = current, current_bd

    trace = AnnealTrace()
    for it in range(schedule.iteration_count()):
        temperature = schedule.temperature(it)
        candidate, move, exhausted = generate_candidate(
            ctx, current, schedule, rng, lock_palette
        )
        if exhausted:
            trace.rows.append(
                TraceRow(it, temperature, current_bd.total, best_bd.total, move, False)
            )
            continue
        candidate_bd = ctx.evaluate(candidate)
        accepted = accept(candidate_bd.total - current_bd.total, temperature, rng)
        if accepted:
            current, current_bd = candidate, candidate_bd
            if current_bd.total > best_bd.total:
                best, best_bd = current, current_bd
        trace.rows.append(
            TraceRow(it, temperature, candidate_bd.total, best_bd.total, move, accepted)
        )
    return OptimizeResult(solution=best, breakdown=best_bd, trace=trace, seed=schedule.seed)


def optimize_multi(
    scene: SceneStructure,
    cfg: ObjectiveConfig,
    schedule: AnnealSchedule,
    seeds: list[int],
    max_workers: int | None = None,
    fixed_palette: tuple[Srgb8, ...] | None = None,
) -> OptimizeResult:
    """Run independent seeded annealings and keep the best-scoring result.

    Ties resolve to the earliest seed in `seeds`, independent of scheduling.
    """
    if not seeds:
        raise ValueError("at least one seed required")
    schedules = [replace(schedule, seed=s) for s in seeds]
    with ThreadPoolExecutor(max_workers=max_workers or min(4, len(seeds))) as pool:
        results = list(pool.map(lambda s: optimize(scene, cfg, s, fixed_palette), schedules))
    best = results[0]
    for r in results[1:]:
        if r.breakdown.total > best.breakdown.total:
            best = r
    return best
