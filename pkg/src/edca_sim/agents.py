"""Tabular Q-learning agents and their action maps.

Three agent kinds share one table implementation:

* cw  tunes the contention window. Pair flavor (3 actions: halve both bounds
  down the 2^k - 1 ladder, keep, grow) or fixed flavor (8 actions picking a
  single CW value applied to both bounds).
* ifs tunes IFSn by -1/0/+1 inside the per-category bounds. Its state key
  embeds the cw action chosen in the same tick, which is what makes the pair
  hierarchical rather than independent.
* wt  picks a waiting time from 8 evenly spaced fractions of the category's
  wt_max; it observes only environment features.

The TD step is kept in one place, q_update, and is written exactly as

    q + lr * (reward + discount * max(next_row) - q)

so tests can assert bit-equality against an independent transcription.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Dict, List, Optional, Tuple

from .core import CategoryProfile, CW_CAP, ServiceCategory

StateKey = Tuple


class AgentKind(Enum):
    CW = "cw"
    IFS = "ifs"
    WT = "wt"


CW_FIXED_VALUES = (7, 16, 32, 64, 128, 256, 512, 1000)

ACTION_COUNTS = {AgentKind.CW: 3, AgentKind.IFS: 3, AgentKind.WT: 8}
CW_FIXED_ACTION_COUNT = len(CW_FIXED_VALUES)


@dataclass(frozen=True)
class Discretizer:
    """Binning rules shared by the state encoders."""

    count_bin_width: int = 5
    count_bin_cap: int = 10
    sojourn_bins: int = 8
    sojourn_span: float = 20.0

    def bin_count(self, n: int) -> int:
        if n < 0:
            n = 0
        b = n // self.count_bin_width
        return b if b < self.count_bin_cap else self.count_bin_cap

    def bin_sojourn(self, seconds: float) -> int:
        if seconds < 0:
            seconds = 0.0
        b = int(seconds * self.sojourn_bins / self.sojourn_span)
        return b if b < self.sojourn_bins else self.sojourn_bins - 1


@dataclass(frozen=True)
class AgentSpec:
    kind: AgentKind
    action_count: int
    epsilon: float
    learning_rate: float
    discount: float
    disc: Discretizer = field(default_factory=Discretizer)

    def __post_init__(self) -> None:
        if self.action_count not in (3, 8):
            raise ValueError(f"action_count must be 3 or 8, got {self.action_count}")


@dataclass
class Observation:
    """Everything a vehicle can see at a decision tick."""

    t_v: int                                  # vehicles in coverage
    t_cv: Dict[ServiceCategory, int]          # per-category counts
    category: ServiceCategory
    cw_min: int
    cw_max: int
    ifsn: int
    sojourn: float                            # expected remaining coverage time, s
    a_cw: Optional[int] = None                # same-tick cw action, ifs agent only


def encode_state(kind: AgentKind, obs: Observation, disc: Discretizer) -> StateKey:
    cat = obs.category
    if kind is AgentKind.CW:
        return (disc.bin_count(obs.t_v), cat.short, disc.bin_count(obs.t_cv[cat]),
                obs.cw_min, obs.cw_max)
    if kind is AgentKind.IFS:
        if obs.a_cw is None:
            raise ValueError("ifs state needs the cw action chosen this tick")
        return (obs.cw_min, obs.cw_max, obs.a_cw, obs.ifsn)
    return (disc.bin_sojourn(obs.sojourn), disc.bin_count(obs.t_v), cat.short,
            disc.bin_count(obs.t_cv[cat]))


class QTable:
    """state key -> action-value row. Reads never insert."""

    __slots__ = ("action_count", "_rows")

    def __init__(self, action_count: int):
        self.action_count = action_count
        self._rows: Dict[StateKey, List[float]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def values(self, key: StateKey) -> List[float]:
        row = self._rows.get(key)
        return list(row) if row is not None else [0.0] * self.action_count

    def row_for_update(self, key: StateKey) -> List[float]:
        row = self._rows.get(key)
        if row is None:
            row = [0.0] * self.action_count
            self._rows[key] = row
        return row

    def best_value(self, key: StateKey) -> float:
        row = self._rows.get(key)
        return max(row) if row is not None else 0.0

    def items(self):
        return self._rows.items()


def choose_action(table: QTable, key: StateKey, rng: Random, epsilon: float) -> int:
    """Epsilon-greedy with uniform tie-breaking among maximal entries."""
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.randrange(table.action_count)
    row = table.values(key)
    best = max(row)
    ties = [i for i, v in enumerate(row) if v == best]
    if len(ties) == 1:
        return ties[0]
    return ties[rng.randrange(len(ties))]


def q_update(table: QTable, state: StateKey, action: int, reward: float,
             next_state: StateKey, spec: AgentSpec) -> float:
    """One TD backup; returns the new cell value."""
    row = table.row_for_update(state)
    q = row[action]
    row[action] = q + spec.learning_rate * (reward + spec.discount * table.best_value(next_state) - q)
    return row[action]


# ---------------------------------------------------------------------------
# Action maps. The cw ladder stays on 2^k - 1 values: "down" inverts "up"
# exactly ((2x + 1 - 1) // 2 == x), so exploring never erodes the window.

def _ladder_down(x: int) -> int:
    return (x - 1) // 2


def _ladder_up(x: int) -> int:
    return 2 * x + 1


def apply_action_cw(action: int, cw_min: int, cw_max: int) -> Tuple[int, int]:
    """Pair flavor: 0 shrinks both bounds, 1 keeps, 2 grows, clamped to [1, 1023]."""
    if action == 0:
        lo, hi = _ladder_down(cw_min), _ladder_down(cw_max)
    elif action == 1:
        lo, hi = cw_min, cw_max
    elif action == 2:
        lo, hi = _ladder_up(cw_min), _ladder_up(cw_max)
    else:
        raise ValueError(f"cw action must be 0..2, got {action}")
    lo = min(max(lo, 1), CW_CAP)
    hi = min(max(hi, 1), CW_CAP)
    return lo, hi


def apply_action_cw_fixed(action: int) -> Tuple[int, int]:
    """Fixed flavor: both bounds pinned to one of 8 preset widths."""
    if not 0 <= action < len(CW_FIXED_VALUES):
        raise ValueError(f"fixed cw action must be 0..7, got {action}")
    v = CW_FIXED_VALUES[action]
    return v, v


def apply_action_cw_min(action: int, cw_min: int, cw_max: int) -> int:
    """Lower-bound-only flavor used by the cwmin3 mode; cw_max stays put."""
    if action == 0:
        lo = _ladder_down(cw_min)
    elif action == 1:
        lo = cw_min
    elif action == 2:
        lo = _ladder_up(cw_min)
    else:
        raise ValueError(f"cw action must be 0..2, got {action}")
    return min(max(lo, 1), cw_max)


def apply_action_ifs(action: int, ifsn: int, profile: CategoryProfile) -> int:
    """0 decrements, 1 keeps, 2 increments, clamped to the category bounds."""
    if action not in (0, 1, 2):
        raise ValueError(f"ifs action must be 0..2, got {action}")
    n = ifsn + (action - 1)
    return min(max(n, profile.ifsn_min), profile.ifsn_max)


def apply_action_wt(action: int, profile: CategoryProfile) -> float:
    """Waiting time action * wt_max / 8, so action 0 transmits immediately."""
    if not 0 <= action < 8:
        raise ValueError(f"wt action must be 0..7, got {action}")
    return action * profile.wt_max / 8.0


# ---------------------------------------------------------------------------
# Text dumps. One row per line: repr(state key), tab, space-separated repr
# floats. repr round-trips doubles exactly, so dump -> load -> dump is
# byte-stable. The header keeps empty tables loadable.

def dump_qtable(table: QTable, path) -> None:
    lines = [f"# actions {table.action_count}\n"]
    for key in sorted(table._rows, key=repr):
        vals = " ".join(repr(v) for v in table._rows[key])
        lines.append(f"{key!r}\t{vals}\n")
    with open(path, "w") as fh:
        fh.writelines(lines)


def load_qtable(path) -> QTable:
    with open(path) as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 3 or parts[0] != "#" or parts[1] != "actions":
            raise ValueError(f"not a qtable dump: bad header {header!r}")
        table = QTable(int(parts[2]))
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key_txt, _, vals_txt = line.partition("\t")
            key = ast.literal_eval(key_txt)
            vals = [float(tok) for tok in vals_txt.split()]
            if len(vals) != table.action_count:
                raise ValueError(f"row width {len(vals)} != actions {table.action_count}")
            table._rows[key] = vals
    return table
