"""File exporters: CSV time series, JSON histograms, DOT main trees.

All writers are deterministic: identical results serialize to identical
bytes, so reruns of the same spec can be diffed directly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from .directory import MainTree
from .experiment import ExperimentSpec, ResultBundle, spec_to_dict

SERIES_FIELDS = (
    "realization",
    "t",
    "main_tree_size",
    "main_tree_avg_quality",
    "total_nodes",
    "total_nodes_viewed",
    "total_versions",
)

MAJORITY_FIELDS = ("realization", "node", "version", "quality", "created_at", "reached_at")

# quartile fills, low quality (light) to high quality (dark)
_QUARTILE_FILLS = ("gray85", "gray70", "gray55", "gray38")


def export_dot(tree: MainTree) -> str:
    """Render a main tree as a DOT graph: ellipses for directories,
    diamonds for files, four grey levels by quality quartile."""
    lines = ["digraph main_tree {"]
    if tree.nodes:
        lines.append("  node [style=filled];")
        for node, v in tree.nodes.items():
            shape = "ellipse" if v.is_dir else "diamond"
            fill = _QUARTILE_FILLS[min(int(v.quality * 4), 3)]
            lines.append(
                f'  "{node}" [label="{node}:v{v.version} q={v.quality:.2f}" '
                f"shape={shape} fillcolor={fill}];"
            )
        for parent, child in tree.edges():
            lines.append(f'  "{parent}" -> "{child}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_series_csv(path: Path, bundle: ResultBundle) -> None:
    """One row per snapshot per realization, then the averaged series with
    realization marked "mean"."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SERIES_FIELDS)
        for realization, series in enumerate(bundle.series):
            for snap in series.snapshots:
                writer.writerow(
                    (
                        realization,
                        snap.t,
                        snap.main_tree_size,
                        snap.main_tree_avg_quality,
                        snap.total_nodes,
                        snap.total_nodes_viewed,
                        snap.total_versions,
                    )
                )
        for snap in bundle.average:
            writer.writerow(
                (
                    "mean",
                    snap.t,
                    snap.main_tree_size,
                    snap.main_tree_avg_quality,
                    snap.total_nodes,
                    snap.total_nodes_viewed,
                    snap.total_versions,
                )
            )


def write_majority_csv(path: Path, bundle: ResultBundle) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(MAJORITY_FIELDS)
        for realization, series in enumerate(bundle.series):
            for event in series.majority_events:
                writer.writerow(
                    (
                        realization,
                        event.node,
                        event.version,
                        event.quality,
                        event.created_at,
                        event.reached_at,
                    )
                )


def histograms_payload(bundle: ResultBundle) -> dict:
    """End-of-run histograms for every realization, with enough metadata
    (resolved config, counting conventions) to reproduce the run."""
    return {
        "config": _config_dict(bundle),
        "conventions": {
            "degree_histogram": (
                "one representative version per node: the most viewed, ties "
                "broken at random; nodes with no viewers excluded"
            ),
            "viewers_histogram": "per version, versions with at least one viewer",
            "viewers_by_quality": "per version over all versions, quality deciles",
        },
        "realizations": [
            {
                "realization": realization,
                "degree_histogram": {str(k): v for k, v in sorted(series.degree_histogram.items())},
                "viewers_histogram": {str(k): v for k, v in sorted(series.viewers_histogram.items())},
                "viewers_by_quality": [
                    {
                        "lo": bucket.lo,
                        "hi": bucket.hi,
                        "versions": bucket.versions,
                        "total_viewers": bucket.total_viewers,
                        "mean_viewers": bucket.mean_viewers,
                    }
                    for bucket in series.viewers_by_quality
                ],
                "majority_events": len(series.majority_events),
            }
            for realization, series in enumerate(bundle.series)
        ],
    }


def write_histograms_json(path: Path, bundle: ResultBundle) -> None:
    with open(path, "w") as handle:
        json.dump(histograms_payload(bundle), handle, indent=2, sort_keys=True)
        handle.write("\n")


def _config_dict(bundle: ResultBundle) -> dict:
    resolved = asdict(bundle.config)
    if bundle.sweep_value is not None:
        resolved["_sweep_value"] = bundle.sweep_value
    return resolved


def bundle_dir(spec: ExperimentSpec, bundle: ResultBundle) -> Path:
    """Where one sweep point's files live: the out dir itself, or a
    param=value subdirectory when sweeping."""
    assert spec.out_dir is not None
    if bundle.sweep_value is None:
        return spec.out_dir
    param = spec.sweep[0]  # type: ignore[index]
    return spec.out_dir / f"{param}={bundle.sweep_value}"


def write_outputs(spec: ExperimentSpec, bundles: list[ResultBundle]) -> None:
    """Write every sweep point's files plus the resolved spec itself."""
    assert spec.out_dir is not None
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    with open(spec.out_dir / "config.json", "w") as handle:
        json.dump(spec_to_dict(spec), handle, indent=2, sort_keys=True)
        handle.write("\n")
    for bundle in bundles:
        directory = bundle_dir(spec, bundle)
        directory.mkdir(parents=True, exist_ok=True)
        write_series_csv(directory / "series.csv", bundle)
        write_majority_csv(directory / "majority.csv", bundle)
        write_histograms_json(directory / "histograms.json", bundle)
        if spec.emit_dot:
            tree = bundle.series[0].final_main_tree
            if tree is not None:
                dot_path = directory / f"main_tree_{bundle.config.t_max}.dot"
                dot_path.write_text(export_dot(tree))
