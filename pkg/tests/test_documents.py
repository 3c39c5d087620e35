import json

import numpy as np
import pytest
from PIL import Image

from overglaze.annealing import AnnealSchedule
from overglaze.colorspace import Srgb8
from overglaze.compositing import RenderOrder
from overglaze.documents import (
    DocumentError,
    canonical_json,
    histogram_spec_from_dict,
    histogram_spec_to_dict,
    load_mask_manifest,
    read_name_model_source,
    read_scene_input,
    solution_document,
    solution_from_document,
)
from overglaze.objective import ObjectiveConfig, Solution, total_score
from overglaze.stimuli import Smoothness, StimulusParams, gen_stimulus

from conftest import make_three_class_spec


class TestHistogramSpecDocs:
    def test_round_trip(self):
        spec = make_three_class_spec()
        doc = histogram_spec_to_dict(spec, background=Srgb8(250, 250, 240))
        again, background = histogram_spec_from_dict(doc)
        assert again.heights == spec.heights
        assert again.bin_edges == spec.bin_edges
        assert again.class_labels == spec.class_labels
        assert background == Srgb8(250, 250, 240)

    def test_generation_metadata_embedded(self):
        stim = gen_stimulus(StimulusParams(classes=2, smoothness=Smoothness.SMOOTH, seed=5))
        doc = histogram_spec_to_dict(stim.spec, stimulus=stim)
        assert doc["generation"]["kl"] == [0.0, 0.0]
        assert len(doc["generation"]["sigmas"]) == 2

    def test_bad_format_tag(self):
        doc = histogram_spec_to_dict(make_three_class_spec())
        doc["format"] = "something-else"
        with pytest.raises(DocumentError, match="unsupported"):
            histogram_spec_from_dict(doc)

    def test_invalid_heights_reported(self):
        doc = histogram_spec_to_dict(make_three_class_spec())
        doc["heights"][0] = [0.0] * 5
        with pytest.raises(DocumentError, match="no positive bar"):
            histogram_spec_from_dict(doc)

    def test_scene_input_dispatch(self, tmp_path):
        doc = histogram_spec_to_dict(make_three_class_spec())
        path = tmp_path / "spec.json"
        path.write_text(canonical_json(doc))
        loaded = read_scene_input(path)
        assert loaded.scene.m == 3
        assert loaded.histogram is not None
        assert loaded.masks is None
        bad = tmp_path / "bad.json"
        bad.write_text('{"format": "nope/1"}')
        with pytest.raises(DocumentError, match="unrecognized"):
            read_scene_input(bad)


class TestMaskManifest:
    def _write_mask(self, path, arr):
        Image.fromarray((arr * 255).astype("uint8")).save(path)

    def test_load_happy_path(self, tmp_path):
        a = np.zeros((20, 30), dtype=bool)
        b = np.zeros((20, 30), dtype=bool)
        a[2:15, 2:20] = True
        b[8:18, 10:28] = True
        self._write_mask(tmp_path / "a.png", a)
        self._write_mask(tmp_path / "b.png", b)
        manifest = {
            "format": "mask-manifest/1",
            "background": "#f0f0f0",
            "classes": [
                {"label": "left", "mask": "a.png"},
                {"label": "right", "mask": "b.png"},
            ],
        }
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest))
        masks = load_mask_manifest(path)
        assert masks.m == 2
        assert masks.class_labels == ["left", "right"]
        assert masks.background == Srgb8(240, 240, 240)
        np.testing.assert_array_equal(masks.masks[0], a)
        loaded = read_scene_input(path)
        assert loaded.histogram is None
        assert loaded.masks is not None
        assert {r.signature for r in loaded.scene.regions} == {(0,), (1,), (0, 1)}

    def test_dimension_mismatch(self, tmp_path):
        self._write_mask(tmp_path / "a.png", np.ones((10, 10), dtype=bool))
        self._write_mask(tmp_path / "b.png", np.ones((12, 10), dtype=bool))
        manifest = {
            "format": "mask-manifest/1",
            "classes": [{"label": "a", "mask": "a.png"}, {"label": "b", "mask": "b.png"}],
        }
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest))
        with pytest.raises(DocumentError, match="size"):
            load_mask_manifest(path)

    def test_missing_mask_file(self, tmp_path):
        manifest = {
            "format": "mask-manifest/1",
            "classes": [{"label": "a", "mask": "missing.png"}],
        }
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest))
        with pytest.raises(DocumentError, match="cannot read mask"):
            load_mask_manifest(path)


class TestSolutionDocs:
    def test_round_trip(self, three_class_scene, fixture_model):
        cfg = ObjectiveConfig(name_model=fixture_model)
        sol = Solution(
            palette=(Srgb8(214, 39, 40), Srgb8(44, 160, 44), Srgb8(31, 119, 180)),
            opacities=(0.5, 0.6, 0.7),
            order=RenderOrder((1, 2, 0)),
        )
        bd = total_score(three_class_scene, sol, cfg)
        doc = solution_document(sol, bd, cfg, AnnealSchedule(seed=9))
        again = solution_from_document(doc)
        assert again == sol
        assert doc["schedule"]["seed"] == 9
        assert doc["config"]["similarity"] == "name"
        assert "name_model_fingerprint" in doc["config"]
        assert doc["score"]["total"] == bd.total

    def test_canonical_json_stable(self):
        doc = {"b": 1.5, "a": [1, 2], "c": "x"}
        assert canonical_json(doc) == canonical_json(json.loads(canonical_json(doc)))

    def test_parse_errors(self):
        with pytest.raises(DocumentError, match="unsupported"):
            solution_from_document({"format": "nope"})
        with pytest.raises(DocumentError, match="missing 'order'"):
            solution_from_document(
                {"format": "solution/1", "palette": ["#102030"], "opacities": [0.5]}
            )
        with pytest.raises(DocumentError, match="invalid solution"):
            solution_from_document(
                {
                    "format": "solution/1",
                    "palette": ["#102030"],
                    "opacities": [1.5],
                    "order": [0],
                }
            )


class TestNameModelSource:
    def test_builtin(self):
        model = read_name_model_source("builtin")
        assert model.bin_count == 216

    def test_missing_path(self):
        with pytest.raises(DocumentError, match="cannot read name model"):
            read_name_model_source("/nonexistent/model.json")
