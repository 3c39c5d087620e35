import random

import pytest

from overglaze.colorspace import LinearRgb, Srgb8, _encode_channel
from overglaze.compositing import BlendSpace, RenderOrder, Rgba, over, region_color

from helpers import compose_pixel


def rgba(r, g, b, a):
    return Rgba(LinearRgb(r, g, b), a)


class TestOver:
    def test_opaque_source_replaces(self):
        src = rgba(0.2, 0.4, 0.6, 1.0)
        dst = rgba(0.9, 0.9, 0.9, 0.7)
        assert over(src, dst) == src

    def test_transparent_source_keeps_destination(self):
        dst = rgba(0.9, 0.1, 0.3, 0.8)
        assert over(rgba(0.5, 0.5, 0.5, 0.0), dst) == dst

    def test_half_red_over_white(self):
        out = over(rgba(1.0, 0.0, 0.0, 0.5), rgba(1.0, 1.0, 1.0, 1.0))
        assert out.alpha == 1.0
        assert out.color == LinearRgb(1.0, 0.5, 0.5)

    def test_both_transparent(self):
        out = over(rgba(0.3, 0.3, 0.3, 0.0), rgba(0.6, 0.6, 0.6, 0.0))
        assert out == rgba(0.0, 0.0, 0.0, 0.0)

    def test_matches_independent_formula_on_random_pairs(self):
        rng = random.Random(42)
        for _ in range(1000):
            sc = [rng.random() for _ in range(3)]
            dc = [rng.random() for _ in range(3)]
            sa, da = rng.random(), rng.random()
            got = over(rgba(*sc, sa), rgba(*dc, da))
            a_exp = sa + da * (1.0 - sa)
            assert abs(got.alpha - a_exp) <= 1e-12
            for g, s, d in zip(got.color.as_tuple(), sc, dc):
                expected = (sa * s + da * d * (1.0 - sa)) / a_exp
                assert abs(g - expected) <= 1e-12

    def test_opaque_backdrop_pins_alpha(self):
        rng = random.Random(7)
        acc = rgba(rng.random(), rng.random(), rng.random(), 1.0)
        for _ in range(8):
            acc = over(rgba(rng.random(), rng.random(), rng.random(), rng.random()), acc)
            assert acc.alpha == 1.0

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            rgba(0, 0, 0, 1.5)


class TestRenderOrder:
    def test_must_be_permutation(self):
        with pytest.raises(ValueError):
            RenderOrder((0, 0, 1))
        with pytest.raises(ValueError):
            RenderOrder((1, 2))
        assert list(RenderOrder((2, 0, 1))) == [2, 0, 1]


WHITE = Srgb8(255, 255, 255)
RED = Srgb8(255, 0, 0)
BLUE = Srgb8(0, 0, 255)


class TestRegionColor:
    def test_opaque_class_is_palette_color(self):
        got = region_color({0}, [RED, BLUE], [1.0, 0.5], RenderOrder((0, 1)), WHITE)
        assert got == RED

    def test_half_red_on_white(self):
        got = region_color({0}, [RED], [0.5], RenderOrder((0,)), WHITE)
        # Linear (1, 0.5, 0.5) re-encoded to sRGB.
        expected = int(_encode_channel(0.5) * 255 + 0.5)
        assert got == Srgb8(255, expected, expected)

    def test_two_layers_equal_nested_over(self):
        got = region_color(
            {0, 1}, [RED, BLUE], [0.5, 0.5], RenderOrder((0, 1)), WHITE
        )
        oracle = compose_pixel(
            [((255, 0, 0), 0.5), ((0, 0, 255), 0.5)], (255, 255, 255), "linear"
        )
        assert got.as_tuple() == oracle

    def test_order_changes_result(self):
        a = region_color({0, 1}, [RED, BLUE], [0.5, 0.5], RenderOrder((0, 1)), WHITE)
        b = region_color({0, 1}, [RED, BLUE], [0.5, 0.5], RenderOrder((1, 0)), WHITE)
        assert a != b

    def test_signature_filters_layers(self):
        only_blue = region_color({1}, [RED, BLUE], [0.5, 0.5], RenderOrder((0, 1)), WHITE)
        oracle = compose_pixel([((0, 0, 255), 0.5)], (255, 255, 255), "linear")
        assert only_blue.as_tuple() == oracle

    def test_gamma_space_differs_and_matches_oracle(self):
        linear = region_color({0}, [RED], [0.5], RenderOrder((0,)), WHITE, BlendSpace.LINEAR)
        gamma = region_color({0}, [RED], [0.5], RenderOrder((0,)), WHITE, BlendSpace.GAMMA)
        assert linear != gamma
        assert gamma.as_tuple() == compose_pixel([((255, 0, 0), 0.5)], (255, 255, 255), "gamma")
        # Gamma-space blending of encoded values is plain channel averaging.
        assert gamma == Srgb8(255, 128, 128)

    def test_empty_signature_rejected(self):
        with pytest.raises(ValueError, match="at least one class"):
            region_color(set(), [RED], [0.5], RenderOrder((0,)), WHITE)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="same class count"):
            region_color({0}, [RED, BLUE], [0.5], RenderOrder((0, 1)), WHITE)

    def test_signature_range_checked(self):
        with pytest.raises(ValueError, match="outside"):
            region_color({3}, [RED, BLUE], [0.5, 0.5], RenderOrder((0, 1)), WHITE)

    def test_random_stacks_match_pixel_oracle(self):
        rng = random.Random(99)
        for _ in range(200):
            m = rng.randint(1, 4)
            palette = [
                Srgb8(rng.randrange(256), rng.randrange(256), rng.randrange(256))
                for _ in range(m)
            ]
            opacities = [round(rng.uniform(0.1, 0.9), 3) for _ in range(m)]
            order = list(range(m))
            rng.shuffle(order)
            sig = sorted(rng.sample(range(m), rng.randint(1, m)))
            space = rng.choice(["linear", "gamma"])
            got = region_color(
                sig, palette, opacities, RenderOrder(tuple(order)), WHITE, BlendSpace(space)
            )
            stack = [
                (palette[cls].as_tuple(), opacities[cls]) for cls in order if cls in sig
            ]
            expected = compose_pixel(stack, (255, 255, 255), space)
            assert all(abs(a - b) <= 1 for a, b in zip(got.as_tuple(), expected))

    def test_opaque_color_reencoding_is_idempotent(self):
        for c in (RED, BLUE, Srgb8(12, 200, 31)):
            got = region_color({0}, [c], [1.0], RenderOrder((0,)), WHITE)
            assert got == c
