"""Adaptive NAS timer sizing and registration stress simulation for LEO paths."""

from .timer_model import (
    EndpointWeights,
    NodeLoadProfile,
    PathSpec,
    SizedTimer,
    SizedTimerSuite,
    TimerKind,
    UnstableQueueError,
    aggregated_delay,
    burst_arrival_rate,
    burst_delay,
    make_registration_suite,
    node_delay,
    size_registration_suite,
    size_timer,
    steady_state_delay,
    timer_breakdown,
)
from .topology import (
    ConstellationSnapshot,
    DisconnectedPathError,
    NetworkLink,
    NetworkNode,
    NodeRole,
    SnapshotFormatError,
    build_path,
    load_snapshot,
    prop_delay_from_distance,
    snapshot_from_dict,
    synth_path,
)
from .nas_sim import RunTrace, SimConfig, UeRecord, one_way_delay, run_scenario
from .metrics import (
    MetricsBundle,
    MismatchedTraceError,
    empirical_cdf,
    reduce_traces,
)

__all__ = [name for name in dir() if not name.startswith("_")]
