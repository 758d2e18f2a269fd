"""Multi-timescale spectrum sharing simulator for a two-tier O-RAN deployment.

A slow policy loop forecasts per-RU load and picks the 5G NR numerology, a
near-real-time loop colors an interference hypergraph to assign PRBs, and a
10 ms scheduler time-shares PRBs with proportional fairness.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .coloring import ColoringResult, ExpandedGraph, Strategy, color, validate_coloring
from .config import ScenarioConfig, load_preset, validate_config
from .conflict import ConflictHypergraph, build_hypergraph, expand
from .orchestrator import KpiRecord, Scheme, jfi, run_experiment, success_rate
from .policy import NumerologyConfig, PolicyProfile, build_policy_profile, select_numerology
from .radio import ChannelParams, RadioEnvironment, RadioUnit, UserEquipment
from .scheduler import SchedulerState, schedule_window

__all__ = [
    "ChannelParams", "ColoringResult", "ConflictHypergraph", "ExpandedGraph", "KpiRecord", "NumerologyConfig",
    "PolicyProfile", "RadioEnvironment", "RadioUnit", "ScenarioConfig", "SchedulerState", "Scheme", "Strategy",
    "UserEquipment", "build_hypergraph", "build_policy_profile", "color", "expand", "jfi", "load_preset",
    "run_experiment", "schedule_window", "select_numerology", "success_rate", "validate_config",
]
