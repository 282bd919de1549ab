"""Discrete-event simulator of a multi-service vehicular wireless channel.

Vehicles crossing a roadside unit's coverage area carry one of four traffic
classes and contend for a shared slotted channel. Per-vehicle controllers,
from plain DCF up to three cooperating Q-learning agents, tune the
contention parameters and an optional per-cycle waiting time.
"""

from .core import (CATEGORIES, DCF_PARAMS, MODES, MODE_LABELS, STANDARD_EDCA,
                   CategoryProfile, ConfigError, EdcaParams, ServiceCategory,
                   SimConfig, __version__, default_profiles, load_config,
                   save_config, scaled_config, standard_params, validate_config)
from .agents import AgentKind, QTable, choose_action, q_update
from .mac_edca import Collision, Idle, MacEngine, PacketRecord, Success, tx_duration
from .metrics import summarize, time_series
from .mobility import Vehicle, spawn_schedule
from .orchestrator import (ALL_MODES, AuditReport, ControllerMode, EpisodeResult,
                           audit_run, compare_runs, make_tables, run_episode,
                           run_experiment, run_training)
from .reward import WindowStats, penalty_bonus, utility, window_stats

__all__ = [
    "__version__",
    "ALL_MODES", "AgentKind", "AuditReport", "CATEGORIES", "CategoryProfile",
    "Collision", "ConfigError", "ControllerMode", "DCF_PARAMS", "EdcaParams",
    "EpisodeResult", "Idle", "MODES", "MODE_LABELS", "MacEngine", "PacketRecord",
    "QTable", "STANDARD_EDCA", "ServiceCategory", "SimConfig", "Success",
    "Vehicle", "WindowStats", "audit_run", "choose_action", "compare_runs",
    "default_profiles", "load_config", "make_tables", "penalty_bonus",
    "q_update", "run_episode", "run_experiment", "run_training", "save_config",
    "scaled_config", "spawn_schedule", "standard_params", "summarize",
    "time_series", "tx_duration", "utility", "validate_config", "window_stats",
]
