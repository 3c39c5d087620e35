"""Command-line client for the optimization engine and HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .annealing import AnnealSchedule, InfeasibleStart, optimize as run_optimize
from .colorspace import Srgb8
from .compositing import BlendSpace
from .documents import (
    DocumentError,
    canonical_json,
    histogram_spec_to_dict,
    read_name_model_source,
    read_scene_input,
    solution_document,
    solution_from_document,
    write_text,
)
from .naming import (
    NameModelError,
    SimilarityMeasure,
    convert_survey_export,
    serialize_name_model,
)
from .objective import ObjectiveConfig, ScoreContext, SeparabilityScale, check_constraints, resolve_region_colors
from .render import render_region_png, render_svg
from .scene import SceneError
from .stimuli import GenerationFailed, Smoothness, StimulusParams, gen_stimulus

EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3

_INPUT_ERRORS = (DocumentError, NameModelError, SceneError, ValueError)


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _parse_weights(text: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated weights, got {text!r}")
    return tuple(float(p) for p in parts)


def _parse_palette(text: str | None) -> tuple[Srgb8, ...] | None:
    if text is None:
        return None
    return tuple(Srgb8.from_hex(p.strip()) for p in text.split(","))


def config_options(f):
    f = click.option("--weights", default="1,1,1", show_default=True,
                     help="Comma-separated term weights.")(f)
    f = click.option("--eta", "jnd_threshold", default=3.0, show_default=True,
                     help="Pairwise just-noticeable-difference floor.")(f)
    f = click.option("--sigma", "bg_contrast_min", default=5.0, show_default=True,
                     help="Minimum lightness contrast against the background.")(f)
    f = click.option("--similarity", default="name", show_default=True,
                     type=click.Choice([m.value for m in SimilarityMeasure]))(f)
    f = click.option("--separability-scale", default="normalized", show_default=True,
                     type=click.Choice([s.value for s in SeparabilityScale]))(f)
    f = click.option("--blend-space", default="linear", show_default=True,
                     type=click.Choice([b.value for b in BlendSpace]))(f)
    return f


def schedule_options(f):
    f = click.option("--t-start", default=100_000.0, show_default=True)(f)
    f = click.option("--t-end", default=0.001, show_default=True)(f)
    f = click.option("--gamma", default=0.99, show_default=True)(f)
    f = click.option("--rgb-step", default=10, show_default=True)(f)
    f = click.option("--alpha-step", default=0.1, show_default=True)(f)
    f = click.option("--alpha-bounds", default="0.1,0.9", show_default=True)(f)
    f = click.option("--retries", default=100, show_default=True,
                     help="Max candidate retries per iteration.")(f)
    f = click.option("--seed", default=0, show_default=True)(f)
    return f


def _build_config(name_model_src, weights, jnd_threshold, bg_contrast_min,
                  similarity, separability_scale, blend_space) -> ObjectiveConfig:
    measure = SimilarityMeasure(similarity)
    model = read_name_model_source(name_model_src) if measure is SimilarityMeasure.NAME else None
    return ObjectiveConfig(
        weights=_parse_weights(weights),
        jnd_threshold=jnd_threshold,
        bg_contrast_min=bg_contrast_min,
        similarity=measure,
        separability_scale=separability_scale,
        blend_space=blend_space,
        name_model=model,
    )


def _build_schedule(t_start, t_end, gamma, rgb_step, alpha_step, alpha_bounds,
                    retries, seed) -> AnnealSchedule:
    lo, hi = (float(p) for p in alpha_bounds.split(","))
    return AnnealSchedule(
        t_start=t_start, t_end=t_end, gamma=gamma, rgb_step=rgb_step,
        alpha_step=alpha_step, alpha_bounds=(lo, hi),
        max_candidate_retries=retries, seed=seed,
    )


def _print_breakdown(breakdown):
    click.echo(f"association:    {breakdown.association:.6f}")
    click.echo(f"disassociation: {breakdown.disassociation:.6f}")
    click.echo(f"separability:   {breakdown.separability:.6f}")
    click.echo(f"total:          {breakdown.total:.6f}")
    click.echo(f"feasible:       {breakdown.feasible}")
    for note in breakdown.notes:
        click.echo(f"note: {note}")


@click.group()
def main():
    """Optimize colors, opacities, and rendering order for translucent charts."""


@main.command("optimize")
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--name-model", "name_model_src", default="builtin", show_default=True,
              help="Path to a name-model file, or 'builtin'.")
@config_options
@schedule_options
@click.option("--fixed-palette", default=None,
              help="Comma-separated hex colors to keep fixed.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the solution document here.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Write the per-iteration trace CSV here.")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False), default=None,
              help="Render the optimized chart here (histogram scenes only).")
def cmd_optimize(scene_path, name_model_src, weights, jnd_threshold, bg_contrast_min,
                 similarity, separability_scale, blend_space, t_start, t_end, gamma,
                 rgb_step, alpha_step, alpha_bounds, retries, seed, fixed_palette,
                 out_path, trace_path, svg_path):
    """Optimize a scene and write the solution document."""
    try:
        loaded = read_scene_input(scene_path)
        cfg = _build_config(name_model_src, weights, jnd_threshold, bg_contrast_min,
                            similarity, separability_scale, blend_space)
        schedule = _build_schedule(t_start, t_end, gamma, rgb_step, alpha_step,
                                   alpha_bounds, retries, seed)
        palette = _parse_palette(fixed_palette)
    except _INPUT_ERRORS as exc:
        _fail(str(exc), EXIT_BAD_INPUT)
    scene = loaded.scene
    for warning in scene.warnings:
        click.echo(f"warning: {warning}", err=True)
    try:
        result = run_optimize(scene, cfg, schedule, fixed_palette=palette)
    except InfeasibleStart as exc:
        if exc.report is not None:
            click.echo(json.dumps(exc.report.to_dict(), indent=2), err=True)
        _fail(str(exc), EXIT_INFEASIBLE)
    _print_breakdown(result.breakdown)
    if out_path:
        write_text(out_path, canonical_json(
            solution_document(result.solution, result.breakdown, cfg, schedule)))
        click.echo(f"solution written to {out_path}")
    if trace_path:
        write_text(trace_path, result.trace.to_csv())
    if svg_path:
        if loaded.histogram is None:
            click.echo("notice: raster scene; skipping SVG render", err=True)
        else:
            write_text(
                svg_path,
                render_svg(loaded.histogram, result.solution, background=scene.background),
            )


@main.command("score")
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--solution", "solution_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--name-model", "name_model_src", default="builtin", show_default=True)
@config_options
@click.option("--json", "as_json", is_flag=True, help="Emit the breakdown as JSON.")
def cmd_score(scene_path, solution_path, name_model_src, weights, jnd_threshold,
              bg_contrast_min, similarity, separability_scale, blend_space, as_json):
    """Re-score a solution document against a scene."""
    try:
        scene = read_scene_input(scene_path).scene
        cfg = _build_config(name_model_src, weights, jnd_threshold, bg_contrast_min,
                            similarity, separability_scale, blend_space)
        doc = json.loads(Path(solution_path).read_text())
        solution = solution_from_document(doc)
        if solution.m != scene.m:
            raise DocumentError(
                f"solution has {solution.m} classes, scene has {scene.m}")
    except _INPUT_ERRORS as exc:
        _fail(str(exc), EXIT_BAD_INPUT)
    breakdown = ScoreContext(scene, cfg).evaluate(solution)
    if as_json:
        click.echo(json.dumps(breakdown.to_dict(), sort_keys=True))
    else:
        _print_breakdown(breakdown)
        report = check_constraints(
            scene, resolve_region_colors(scene, solution, cfg.blend_space), cfg)
        for i, j, v in report.jnd_violations:
            click.echo(f"violation: regions {i}/{j} differ by only {v:.3f}")
        for i, v in report.contrast_violations:
            click.echo(f"violation: region {i} lightness contrast {v:.3f}")


@main.command("render")
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--solution", "solution_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--blend-space", default="linear", show_default=True,
              type=click.Choice([b.value for b in BlendSpace]))
def cmd_render(scene_path, solution_path, out_path, blend_space):
    """Render a solved chart: SVG for histogram scenes, PNG for raster scenes."""
    try:
        loaded = read_scene_input(scene_path)
        solution = solution_from_document(json.loads(Path(solution_path).read_text()))
        if solution.m != loaded.scene.m:
            raise DocumentError(
                f"solution has {solution.m} classes, scene has {loaded.scene.m}")
        if loaded.masks is not None:
            Path(out_path).write_bytes(
                render_region_png(loaded.masks, solution, BlendSpace(blend_space)))
            click.echo(f"notice: raster scene rendered as region-color PNG: {out_path}")
        else:
            write_text(
                out_path,
                render_svg(loaded.histogram, solution, background=loaded.scene.background),
            )
            click.echo(f"chart written to {out_path}")
    except _INPUT_ERRORS as exc:
        _fail(str(exc), EXIT_BAD_INPUT)


@main.command("gen-stimuli")
@click.option("--classes", default=3, show_default=True, type=int)
@click.option("--smoothness", default="smooth", show_default=True,
              type=click.Choice([s.value for s in Smoothness]))
@click.option("--bins", default=25, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_gen_stimuli(classes, smoothness, bins, seed, out_path):
    """Generate a study-stimulus histogram spec."""
    try:
        params = StimulusParams(classes=classes, smoothness=Smoothness(smoothness),
                                bins=bins, seed=seed)
    except ValueError as exc:
        _fail(str(exc), EXIT_BAD_INPUT)
    try:
        stim = gen_stimulus(params)
    except GenerationFailed as exc:
        _fail(str(exc), EXIT_BAD_INPUT)
    write_text(out_path, canonical_json(histogram_spec_to_dict(stim.spec, stimulus=stim)))
    kl = ", ".join(f"{v:.4f}" for v in stim.kl)
    click.echo(f"stimulus written to {out_path} (per-class KL: {kl})")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--name-model", "name_model_src", default="builtin", show_default=True)
@click.option("--workers", default=2, show_default=True, type=int,
              help="Optimization worker threads.")
@click.option("--ttl", default=3600.0, show_default=True, type=float,
              help="Seconds finished jobs stay retrievable.")
def cmd_serve(host, port, name_model_src, workers, ttl):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    try:
        model = read_name_model_source(name_model_src)
    except _INPUT_ERRORS as exc:
        _fail(str(exc), EXIT_BAD_INPUT)
    uvicorn.run(create_app(model, max_workers=workers, ttl_seconds=ttl),
                host=host, port=port, log_level="warning")


@main.command("convert-name-model")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.argument("dest", type=click.Path(dir_okay=False))
def cmd_convert_name_model(source, dest):
    """Convert a color-term survey export into the engine's model format."""
    try:
        model = convert_survey_export(Path(source).read_bytes())
    except NameModelError as exc:
        _fail(str(exc), EXIT_BAD_INPUT)
    write_text(dest, serialize_name_model(model))
    click.echo(f"model with {model.bin_count} bins / {model.term_count} terms "
               f"written to {dest}")


if __name__ == "__main__":
    main()
