"""End-to-end load -> decompose -> cluster -> paint -> write pipeline."""

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .bounds import bound_report
from .clustering import ClusterParams, kmeans_l1, paint_labels
from .decompose import DecomposeParams, decompose, surface_features, validate_decomposition
from .imageio import export_decomposition, load_image, write_label_map, write_surface_overlay

__all__ = ["StageError", "RunConfig", "run_segment", "decompose_summary"]

log = logging.getLogger(__name__)


class StageError(Exception):
    """A pipeline stage failed; the original exception is ``__cause__``."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class RunConfig:
    input: Path
    decompose: DecomposeParams
    cluster: Optional[ClusterParams] = None
    out_labels: Optional[Path] = None
    out_overlay: Optional[Path] = None
    out_json: Optional[Path] = None
    report: Optional[Path] = None
    n_jobs: int = 1

    def __post_init__(self):
        if not any((self.out_labels, self.out_overlay, self.out_json, self.report)):
            raise ValueError("at least one output (labels, overlay, json or report) must be requested")
        if self.out_labels is not None and self.cluster is None:
            raise ValueError("a label map needs cluster parameters")


@contextmanager
def _stage(name, timings):
    t0 = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - t0


def _summary(source, d):
    return {
        "input": str(source),
        "height": d.height,
        "width": d.width,
        "n_features": d.n_features,
        "epsilon": d.params.epsilon,
        "npar": d.params.npar,
        "formulation": d.params.formulation,
        "n_surfaces": len(d.surfaces),
        "reduction_factor": d.reduction_factor,
        "bounds": bound_report(d.n_features, d.n_pixels, d.params.epsilon).to_dict(),
    }


def decompose_summary(source, params):
    """Load and decompose without writing anything; returns the summary."""
    timings = {}
    with _stage("load", timings):
        image = load_image(source)
    with _stage("decompose", timings):
        d = decompose(image, params)
    with _stage("validate", timings):
        validate_decomposition(d)
    report = _summary(source, d)
    report["timings_s"] = timings
    return report


def run_segment(config, image=None):
    """Run the pipeline for one image and write every requested artifact.

    ``image`` may be passed to skip the load stage (``config.input`` is then
    only used for reporting). Returns the summary report as a dict; when
    ``config.report`` is set it is also written as JSON, with a matplotlib
    figure beside it (same stem, ``.png``).
    """
    timings = {}
    if image is None:
        with _stage("load", timings):
            image = load_image(config.input)
    with _stage("decompose", timings):
        d = decompose(image, config.decompose)
    with _stage("validate", timings):
        validate_decomposition(d)
    labels = result = None
    if config.cluster is not None:
        with _stage("cluster", timings):
            result = kmeans_l1(surface_features(d), config.cluster, n_jobs=config.n_jobs)
        with _stage("paint", timings):
            labels = paint_labels(d, result)
    with _stage("write", timings):
        if config.out_labels is not None:
            write_label_map(labels, config.out_labels)
        if config.out_overlay is not None:
            write_surface_overlay(d, config.out_overlay)
        if config.out_json is not None:
            export_decomposition(d, config.out_json)

    report = _summary(config.input, d)
    if result is not None:
        report["clusters"] = result.k
        report["cluster_cost"] = result.cost
        report["winning_replicate"] = result.winning_replicate
    report["timings_s"] = timings
    if config.report is not None:
        with _stage("report", timings):
            from .plotting import figure_path_for, segmentation_figure

            segmentation_figure(image, d, labels, figure_path_for(config.report),
                                title=Path(str(config.input)).name)
            Path(config.report).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    log.info("%s: %d surfaces (reduction %.2f)", config.input, len(d.surfaces), d.reduction_factor)
    return report
