"""Crop-protection sensor network simulator."""

from ._core import (
    ConfigError,
    DegenerateFit,
    LinkOutOfRange,
    ScenarioInvalid,
    TopologyError,
    UndefinedLatency,
    coverage_fraction,
    fit_pathloss,
    hop_latency,
    lifetime_hours,
    plan_grid,
    plan_perimeter,
    repel_effective,
    repeller_radius,
    rssi_at,
    simulate,
    simulate_batch,
    table,
    throughput,
)

__all__ = [
    "ConfigError",
    "DegenerateFit",
    "LinkOutOfRange",
    "ScenarioInvalid",
    "TopologyError",
    "UndefinedLatency",
    "coverage_fraction",
    "fit_pathloss",
    "hop_latency",
    "lifetime_hours",
    "plan_grid",
    "plan_perimeter",
    "repel_effective",
    "repeller_radius",
    "rssi_at",
    "simulate",
    "simulate_batch",
    "table",
    "throughput",
]
