"""Experiment orchestration: resolved configurations, one-parameter
sweeps, deterministic multi-realization runs, and output writing."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .engine import SimConfig, run
from .metrics import AverageSnapshot, MetricsSeries

SWEEPABLE_PARAMS = ("n_peers", "s", "p_update", "p_add", "p_file", "p_leave", "t_max")
PARAM_ALIASES = {"peers": "n_peers", "n": "n_peers", "steps": "t_max"}
INT_PARAMS = {"n_peers", "t_max", "seed", "realizations"}


def normalize_param(name: str) -> str:
    """Map a user-facing parameter name onto its SimConfig field."""
    cleaned = name.strip().replace("-", "_")
    cleaned = PARAM_ALIASES.get(cleaned, cleaned)
    if cleaned not in SWEEPABLE_PARAMS:
        raise ValueError(
            f"unknown sweep parameter {name!r}; choose from {', '.join(SWEEPABLE_PARAMS)}"
        )
    return cleaned


def parse_param_value(param: str, raw: str | float | int):
    value = int(raw) if param in INT_PARAMS else float(raw)
    return value


@dataclass(frozen=True)
class ExperimentSpec:
    """A base configuration, an optional sweep over one of its fields, and
    where (if anywhere) to write the outputs."""

    base: SimConfig = SimConfig()
    sweep: tuple[str, tuple[float | int, ...]] | None = None
    out_dir: Path | None = None
    snapshot_interval: int = 1000
    emit_dot: bool = False

    def __post_init__(self):
        if self.snapshot_interval < 1:
            raise ValueError("snapshot_interval must be >= 1")
        if self.sweep is not None:
            param, values = self.sweep
            if not values:
                raise ValueError("sweep needs at least one value")
            object.__setattr__(
                self, "sweep", (normalize_param(param), tuple(values))
            )
        self.configs()  # out-of-domain sweep values fail here, up front

    def configs(self) -> list[tuple[float | int | None, SimConfig]]:
        """The configurations this experiment runs: (sweep value, config)
        pairs, or a single (None, base) without a sweep."""
        if self.sweep is None:
            return [(None, self.base)]
        param, values = self.sweep
        return [
            (value, replace(self.base, **{param: parse_param_value(param, value)}))
            for value in values
        ]


@dataclass
class ResultBundle:
    """One sweep point's runs: the resolved config, every realization's
    metrics, and the averaged snapshot series."""

    sweep_value: float | int | None
    config: SimConfig
    series: list[MetricsSeries]
    average: list[AverageSnapshot]


def spec_to_dict(spec: ExperimentSpec) -> dict:
    """JSON-ready form of a spec; parse_config reads the same shape back."""
    return {
        "config": asdict(spec.base),
        "sweep": None
        if spec.sweep is None
        else {"param": spec.sweep[0], "values": list(spec.sweep[1])},
        "out_dir": None if spec.out_dir is None else str(spec.out_dir),
        "snapshot_interval": spec.snapshot_interval,
        "emit_dot": spec.emit_dot,
    }


def spec_from_dict(data: dict) -> ExperimentSpec:
    base = SimConfig(**data.get("config", {}))
    sweep_data = data.get("sweep")
    sweep = None
    if sweep_data is not None:
        sweep = (sweep_data["param"], tuple(sweep_data["values"]))
    out_dir = data.get("out_dir")
    return ExperimentSpec(
        base=base,
        sweep=sweep,
        out_dir=None if out_dir is None else Path(out_dir),
        snapshot_interval=data.get("snapshot_interval", 1000),
        emit_dot=data.get("emit_dot", False),
    )


def run_experiment(spec: ExperimentSpec) -> list[ResultBundle]:
    """Run every sweep point of `spec` and, if an output directory is set,
    write its files (series.csv, histograms.json, majority.csv, config,
    and optionally the final main tree as DOT)."""
    from . import export  # deferred: export imports this module's types

    bundles = []
    for value, config in spec.configs():
        result = run(config, spec.snapshot_interval)
        bundles.append(ResultBundle(value, config, result.series, result.average))
    if spec.out_dir is not None:
        export.write_outputs(spec, bundles)
    return bundles
