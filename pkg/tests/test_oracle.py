import itertools
import random

import pytest

from overglaze.colorspace import Srgb8
from overglaze.compositing import BlendSpace, RenderOrder
from overglaze.naming import SimilarityMeasure
from overglaze.objective import ObjectiveConfig, Solution, total_score
from overglaze.oracle import CandidateGrid, InfeasibleGrid, exhaustive_best, reference_score
from overglaze.scene import HistogramSpec, scene_from_histograms

from helpers import random_histogram_spec, random_no_overlap_spec


def random_solution(rng, m):
    order = list(range(m))
    rng.shuffle(order)
    return Solution(
        palette=tuple(
            Srgb8(rng.randrange(256), rng.randrange(256), rng.randrange(256)) for _ in range(m)
        ),
        opacities=tuple(rng.uniform(0.1, 0.9) for _ in range(m)),
        order=RenderOrder(tuple(order)),
    )


def two_class_scene():
    return scene_from_histograms(
        HistogramSpec(["a", "b"], [0, 1, 2, 3], [[3.0, 2.0, 0.0], [0.0, 1.0, 2.0]])
    )


class TestReferenceScore:
    def test_matches_production_on_random_instances(self, fixture_model):
        rng = random.Random(101)
        for _ in range(40):
            spec = (
                random_no_overlap_spec(rng) if rng.random() < 0.25 else random_histogram_spec(rng)
            )
            scene = scene_from_histograms(spec)
            sol = random_solution(rng, scene.m)
            cfg = ObjectiveConfig(
                name_model=fixture_model,
                similarity=rng.choice(list(SimilarityMeasure)),
                blend_space=rng.choice([BlendSpace.LINEAR, BlendSpace.GAMMA]),
            )
            ref = reference_score(scene, sol, cfg)
            got = total_score(scene, sol, cfg)
            assert got.total == pytest.approx(ref.total, abs=1e-9)
            assert got.association == pytest.approx(ref.association, abs=1e-9)
            assert got.disassociation == pytest.approx(ref.disassociation, abs=1e-9)
            assert got.separability == pytest.approx(ref.separability, abs=1e-9)
            assert got.feasible == ref.feasible

    def test_zero_weights(self, three_class_scene, fixture_model):
        cfg = ObjectiveConfig(weights=(0, 0, 0), name_model=fixture_model)
        sol = random_solution(random.Random(3), 3)
        assert reference_score(three_class_scene, sol, cfg).total == 0.0

    def test_notes_match(self, fixture_model):
        scene = scene_from_histograms(HistogramSpec(["x"], [0, 1], [[1.0]]))
        cfg = ObjectiveConfig(name_model=fixture_model)
        sol = Solution(palette=(Srgb8(40, 40, 120),), opacities=(0.8,), order=RenderOrder((0,)))
        ref = reference_score(scene, sol, cfg)
        got = total_score(scene, sol, cfg)
        assert sorted(ref.notes) == sorted(got.notes)


ANCHORS_A = [Srgb8.from_hex(h) for h in ("#d62728", "#2ca02c", "#1f77b4", "#ff7f0e")]
ANCHORS_B = [Srgb8.from_hex(h) for h in ("#9467bd", "#8c564b", "#e377c2", "#17becf")]


class TestExhaustiveBest:
    def test_grid_combination_count(self):
        grid = CandidateGrid(
            color_anchors=[ANCHORS_A, ANCHORS_B],
            opacity_levels=[0.3, 0.5, 0.7],
        )
        assert grid.combination_count() == 4 * 4 * 9 * 2

    def test_cap_enforced(self):
        with pytest.raises(ValueError, match="cap"):
            CandidateGrid(
                color_anchors=[ANCHORS_A, ANCHORS_B],
                opacity_levels=[0.3, 0.5, 0.7],
                cap=100,
            )

    def test_single_combination_returned_iff_feasible(self, fixture_model):
        scene = two_class_scene()
        cfg = ObjectiveConfig(name_model=fixture_model)
        good = CandidateGrid(
            color_anchors=[[ANCHORS_A[0]], [ANCHORS_B[0]]],
            opacity_levels=[0.5],
            orders=[(0, 1)],
        )
        sol, score = exhaustive_best(scene, good, cfg)
        assert sol.palette == (ANCHORS_A[0], ANCHORS_B[0])
        assert score == reference_score(scene, sol, cfg).total

        bad = CandidateGrid(
            color_anchors=[[Srgb8(250, 250, 250)], [Srgb8(252, 252, 252)]],
            opacity_levels=[0.1],
            orders=[(0, 1)],
        )
        with pytest.raises(InfeasibleGrid):
            exhaustive_best(scene, bad, cfg)

    def test_best_dominates_every_feasible_point(self, fixture_model):
        scene = two_class_scene()
        cfg = ObjectiveConfig(name_model=fixture_model)
        grid = CandidateGrid(
            color_anchors=[ANCHORS_A[:2], ANCHORS_B[:2]],
            opacity_levels=[0.4, 0.7],
        )
        _, best_score = exhaustive_best(scene, grid, cfg)
        for palette in itertools.product(*grid.color_anchors):
            for opacities in itertools.product(grid.opacity_levels, repeat=2):
                for order in grid.order_choices():
                    sol = Solution(
                        palette=palette, opacities=opacities, order=RenderOrder(order)
                    )
                    bd = reference_score(scene, sol, cfg)
                    if bd.feasible:
                        assert bd.total <= best_score + 1e-12

    def test_tie_breaks_to_enumeration_order(self, fixture_model):
        scene = two_class_scene()
        cfg = ObjectiveConfig(name_model=fixture_model)
        # Duplicate anchors make the first and second combinations score
        # identically; the first enumerated must win.
        grid = CandidateGrid(
            color_anchors=[[ANCHORS_A[0], ANCHORS_A[0]], [ANCHORS_B[0]]],
            opacity_levels=[0.5],
            orders=[(0, 1)],
        )
        sol, _ = exhaustive_best(scene, grid, cfg)
        assert sol.palette == (ANCHORS_A[0], ANCHORS_B[0])

    def test_planted_optimum_found(self, fixture_model):
        scene = two_class_scene()
        cfg = ObjectiveConfig(name_model=fixture_model)
        grid = CandidateGrid(
            color_anchors=[ANCHORS_A, ANCHORS_B],
            opacity_levels=[0.3, 0.5, 0.7],
        )
        sol, score = exhaustive_best(scene, grid, cfg)
        planted = CandidateGrid(
            color_anchors=[[sol.palette[0]], [sol.palette[1]]],
            opacity_levels=list(sol.opacities),
            orders=[tuple(sol.order)],
        )
        again, again_score = exhaustive_best(scene, planted, cfg)
        assert again_score == pytest.approx(score, abs=1e-12)
        assert again.palette == sol.palette
