"""Experiment driver: controller modes, decision cycles, runs on disk.

A vehicle's life inside coverage is a sequence of decision cycles, one per
wt_max(category) seconds. At each cycle boundary the vehicle's agents
observe, pick actions, and the chosen waiting time gates the MAC queue: the
vehicle sits out [t0, t0 + wt) and contends for the rest of the cycle. The
reward for a tick is computed at the next tick from the vehicle's own
deliveries over the elapsed window, and closes the previous (state, action)
pair for every agent the mode runs.

Seven controller modes cover the comparison ladder, from a single DCF queue
through standard EDCA to the full three-agent controller. Modes without an
IFS agent keep the standard AIFS numbers; modes without a wt agent always
transmit immediately.

run_experiment writes a self-contained run directory: manifest.json with the
full config, per-episode packet and decision CSVs, aggregate summary tables,
final-episode series/CDF exports, and one Q-table dump per agent. audit_run
re-reads such a directory and re-verifies packet conservation and every
applied parameter bound.
"""

from __future__ import annotations

import csv
import heapq
import json
import math
import statistics
import sys
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Dict, List, Optional, Tuple

from .agents import (AgentKind, AgentSpec, CW_FIXED_VALUES, Discretizer,
                     Observation, QTable, apply_action_cw, apply_action_cw_fixed,
                     apply_action_cw_min, apply_action_ifs, apply_action_wt,
                     choose_action, dump_qtable, encode_state, load_qtable,
                     q_update)
from .core import (CATEGORIES, DCF_PARAMS, EdcaParams, MODE_LABELS, ServiceCategory,
                   SimConfig, __version__, config_to_dict, config_from_dict,
                   profile_of, require_valid, standard_params, validate_config)
from .mac_edca import MacEngine, PacketRecord
from .metrics import (CategorySummary, cdf_latency, cdf_throughput, export_cdf,
                      export_series, export_summary, percentile, summarize,
                      time_series)
from .mobility import (CycleState, Vehicle, active_counts, in_coverage, off_road,
                       sojourn_time, spawn_schedule, spawn_vehicle, step_mobility)
from .reward import utility, window_stats


class ControllerMode:
    """One of the seven parameter controllers."""

    _by_id: Dict[str, "ControllerMode"] = {}

    def __init__(self, mode_id: str, agents: Tuple[AgentKind, ...], cw_flavor: Optional[str]):
        self.id = mode_id
        self.label = MODE_LABELS[mode_id]
        self.agents = agents
        self.cw_flavor = cw_flavor      # None | "pair" | "fixed" | "min"
        ControllerMode._by_id[mode_id] = self

    def __repr__(self) -> str:
        return f"ControllerMode({self.id})"

    @classmethod
    def from_id(cls, mode_id) -> "ControllerMode":
        if isinstance(mode_id, ControllerMode):
            return mode_id
        try:
            return cls._by_id[mode_id]
        except KeyError:
            raise ValueError(f"unknown mode {mode_id!r}") from None

    def start_params(self, category: ServiceCategory, config: SimConfig) -> EdcaParams:
        if self.id == "nonqos":
            return DCF_PARAMS
        if self.id in ("qos", "cwfixed8", "cwmin3"):
            return standard_params(category)
        # agent-seeded modes: cw from the per-category seeds, ifsn from the
        # standard row clamped into the category bounds
        p = profile_of(category, config)
        ifsn = standard_params(category).ifsn
        ifsn = min(max(ifsn, p.ifsn_min), p.ifsn_max)
        return EdcaParams(p.cw_seed_min, p.cw_seed_max, ifsn)


NONQOS = ControllerMode("nonqos", (), None)
QOS = ControllerMode("qos", (), None)
CW_FIXED8 = ControllerMode("cwfixed8", (AgentKind.CW,), "fixed")
CW_MIN3 = ControllerMode("cwmin3", (AgentKind.CW,), "min")
CW_MINMAX = ControllerMode("cwminmax", (AgentKind.CW,), "pair")
TWO_AGENT = ControllerMode("two-agent", (AgentKind.CW, AgentKind.IFS), "pair")
THREE_AGENT = ControllerMode("three-agent", (AgentKind.CW, AgentKind.IFS, AgentKind.WT), "pair")

ALL_MODES = (NONQOS, QOS, CW_FIXED8, CW_MIN3, CW_MINMAX, TWO_AGENT, THREE_AGENT)


def _action_counts(mode: ControllerMode) -> Dict[AgentKind, int]:
    counts = {}
    for kind in mode.agents:
        if kind is AgentKind.CW:
            counts[kind] = len(CW_FIXED_VALUES) if mode.cw_flavor == "fixed" else 3
        elif kind is AgentKind.IFS:
            counts[kind] = 3
        else:
            counts[kind] = 8
    return counts


def make_tables(mode: ControllerMode) -> Dict[AgentKind, QTable]:
    return {kind: QTable(n) for kind, n in _action_counts(mode).items()}


def make_specs(config: SimConfig, mode: ControllerMode) -> Dict[AgentKind, AgentSpec]:
    disc = Discretizer(config.count_bin_width, config.count_bin_cap,
                       config.sojourn_bins, config.sojourn_span)
    return {kind: AgentSpec(kind=kind, action_count=n, epsilon=config.epsilon,
                            learning_rate=config.learning_rate,
                            discount=config.discount, disc=disc)
            for kind, n in _action_counts(mode).items()}


def gate_check(vehicle: Vehicle, t: float) -> bool:
    """True when a waiting vehicle's gate is due to open at time t."""
    return vehicle.cycle_state is CycleState.WAITING and t + 1e-9 >= vehicle.t0 + vehicle.wt


@dataclass
class DecisionRecord:
    time: float
    vid: int
    category: ServiceCategory
    states: Dict[AgentKind, tuple]
    actions: Dict[AgentKind, int]
    reward: Optional[float]
    params: EdcaParams
    wt: float


@dataclass
class Counts:
    generated: int = 0
    delivered: int = 0
    dropped: int = 0
    residual: int = 0


@dataclass
class EpisodeResult:
    seed: int
    duration: float
    ledger: List[PacketRecord]
    decisions: List[DecisionRecord]
    counts: Dict[ServiceCategory, Counts]
    spawned: int
    collisions: int


@dataclass
class _Cursor:
    time: float
    states: Dict[AgentKind, tuple]
    actions: Dict[AgentKind, int]


# event kinds, processed in this order within one slot
_K_SPAWN, _K_MOBILITY, _K_TICK, _K_GATE, _K_GEN = range(5)


def run_episode(config: SimConfig, tables: Dict[AgentKind, QTable], mode,
                seed: int, *, learn: bool = True,
                epsilon: Optional[float] = None) -> EpisodeResult:
    """Simulate one episode; Q-tables are updated in place.

    epsilon overrides the config's exploration rate (0.0 gives a greedy
    evaluation episode; pair with learn=False to freeze the tables).
    """
    mode = ControllerMode.from_id(mode)
    slot = config.slot_time
    end_slot = int(config.episode_duration / slot)
    arrival_rng = Random(seed * 2 + 1)
    sim_rng = Random(seed * 2 + 2)
    engine = MacEngine(config, sim_rng)
    engine.track_windows = bool(mode.agents)
    specs = make_specs(config, mode)
    eps = config.epsilon if epsilon is None else epsilon
    disc = next(iter(specs.values())).disc if specs else Discretizer()

    schedule = spawn_schedule(config, arrival_rng)
    vehicles: Dict[int, Vehicle] = {}
    cursors: Dict[int, _Cursor] = {}
    ledger: List[PacketRecord] = []
    decisions: List[DecisionRecord] = []

    mob_slots = max(1, round(config.mobility_tick / slot))
    tick_slots = {cat: max(1, round(config.profiles[cat].wt_max / slot))
                  for cat in CATEGORIES}
    gen_slots = {cat: max(1, round(config.profiles[cat].packet_size * 8
                                   / config.profiles[cat].app_rate / slot))
                 for cat in CATEGORIES}

    heap: List[Tuple[int, int, int, int]] = []
    seq = 0

    def push(s: int, kind: int, vid: int) -> None:
        nonlocal seq
        heapq.heappush(heap, (s, kind, seq, vid))
        seq += 1

    for i, (t_entry, _cat, _direction) in enumerate(schedule):
        push(round(t_entry / slot), _K_SPAWN, i)
    if schedule:
        push(mob_slots, _K_MOBILITY, -1)

    pid = 0

    def decide(v: Vehicle, t: float, s: int) -> None:
        q = engine.queues[v.vid]
        p = q.params
        profile = config.profiles[v.category]
        t_v, t_cv = active_counts(vehicles.values(), config)
        obs = Observation(t_v=t_v, t_cv=t_cv, category=v.category,
                          cw_min=p.cw_min, cw_max=p.cw_max, ifsn=p.ifsn,
                          sojourn=sojourn_time(v, config))
        states: Dict[AgentKind, tuple] = {}
        actions: Dict[AgentKind, int] = {}
        for kind in mode.agents:
            if kind is AgentKind.IFS:
                obs.a_cw = actions[AgentKind.CW]
            states[kind] = encode_state(kind, obs, disc)
            actions[kind] = choose_action(tables[kind], states[kind], sim_rng, eps)

        reward = None
        cur = cursors.get(v.vid)
        if cur is not None and t > cur.time:
            stats = window_stats(q.window_deliveries, v.category, t - cur.time)
            reward = utility(stats, profile, config.alpha1, config.alpha2,
                             config.reward_bonus, config.reward_penalty,
                             config.rate_ratio_cap)
            if learn:
                for kind in mode.agents:
                    q_update(tables[kind], cur.states[kind], cur.actions[kind],
                             reward, states[kind], specs[kind])
        q.window_deliveries.clear()

        if mode.cw_flavor == "fixed":
            lo, hi = apply_action_cw_fixed(actions[AgentKind.CW])
        elif mode.cw_flavor == "min":
            lo = apply_action_cw_min(actions[AgentKind.CW], p.cw_min, p.cw_max)
            hi = p.cw_max
        else:
            lo, hi = apply_action_cw(actions[AgentKind.CW], p.cw_min, p.cw_max)
        ifsn = p.ifsn
        if AgentKind.IFS in actions:
            ifsn = apply_action_ifs(actions[AgentKind.IFS], p.ifsn, profile)
        new_params = EdcaParams(lo, hi, ifsn)
        engine.set_params(v.vid, new_params)

        wt = apply_action_wt(actions[AgentKind.WT], profile) \
            if AgentKind.WT in actions else 0.0
        v.wt = wt
        v.t0 = t
        if wt > 0.0:
            v.cycle_state = CycleState.WAITING
            engine.set_gate(v.vid, False)
            push(s + max(1, math.ceil(wt / slot - 1e-9)), _K_GATE, v.vid)
        else:
            v.cycle_state = CycleState.CONTENDING
            engine.set_gate(v.vid, True)
        cursors[v.vid] = _Cursor(t, states, actions)
        decisions.append(DecisionRecord(t, v.vid, v.category, states, actions,
                                        reward, new_params, wt))
        push(s + tick_slots[v.category], _K_TICK, v.vid)

    def enter_coverage(v: Vehicle, t: float, s: int) -> None:
        v.covered_since = t
        engine.add_queue(v.vid, v.category, mode.start_params(v.category, config))
        decisions.append(DecisionRecord(t, v.vid, v.category, {}, {}, None,
                                        engine.queues[v.vid].params, 0.0))
        if mode.agents:
            decide(v, t, s)
        else:
            v.cycle_state = CycleState.CONTENDING
            engine.set_gate(v.vid, True)
        push(s, _K_GEN, v.vid)

    while heap:
        s, kind, _, vid = heapq.heappop(heap)
        if s > end_slot:
            break
        engine.run_until(s)
        t = s * slot

        if kind == _K_GEN:
            v = vehicles.get(vid)
            if v is None or v.retired:
                continue
            pid += 1
            profile = config.profiles[v.category]
            rec = PacketRecord(pid, vid, v.category, profile.packet_size, t)
            ledger.append(rec)
            engine.enqueue(vid, rec)
            push(s + gen_slots[v.category], _K_GEN, vid)

        elif kind == _K_MOBILITY:
            dt = mob_slots * slot
            gone = []
            for v in vehicles.values():
                step_mobility(v, config, dt)
                if v.covered_since is None:
                    if in_coverage(v, config):
                        enter_coverage(v, t, s)
                elif not v.retired and not in_coverage(v, config):
                    v.retired = True
                    engine.retire(v.vid)
                    cursors.pop(v.vid, None)
                if off_road(v, config):
                    gone.append(v.vid)
            for g in gone:
                del vehicles[g]
            if vehicles or heap:
                push(s + mob_slots, _K_MOBILITY, -1)

        elif kind == _K_TICK:
            v = vehicles.get(vid)
            if v is not None and not v.retired:
                decide(v, t, s)

        elif kind == _K_GATE:
            v = vehicles.get(vid)
            if v is not None and not v.retired and v.cycle_state is CycleState.WAITING:
                if gate_check(v, t):
                    v.cycle_state = CycleState.CONTENDING
                    engine.set_gate(vid, True)
                else:
                    # early wake-up (stale event from a superseded cycle):
                    # jump straight to the slot the current wait ends in
                    due = math.ceil((v.t0 + v.wt) / slot - 1e-9)
                    push(due if due > s else s + 1, _K_GATE, vid)

        else:  # _K_SPAWN
            t_entry, cat, direction = schedule[vid]
            veh = spawn_vehicle(vid, t_entry, cat, direction, config)
            vehicles[veh.vid] = veh
            if in_coverage(veh, config):
                enter_coverage(veh, t, s)

    engine.run_until(end_slot)

    counts = {cat: Counts() for cat in CATEGORIES}
    delivered = dropped = 0
    for rec in ledger:
        c = counts[rec.category]
        c.generated += 1
        if rec.deliver_time is not None:
            c.delivered += 1
            delivered += 1
        elif rec.dropped:
            c.dropped += 1
            dropped += 1
        else:
            c.residual += 1
    if delivered != engine.delivered or dropped != engine.dropped:
        raise RuntimeError("ledger out of sync with engine counters")

    return EpisodeResult(seed=seed, duration=config.episode_duration, ledger=ledger,
                         decisions=decisions, counts=counts, spawned=len(schedule),
                         collisions=engine.collisions)


def episode_seed(run_seed: int, episode: int) -> int:
    return run_seed * 1_000_003 + episode


@dataclass
class EpisodeSummary:
    episode: int
    is_eval: bool
    collisions: int
    spawned: int
    stats: Dict[ServiceCategory, CategorySummary]


@dataclass
class TrainingResult:
    mode: ControllerMode
    tables: Dict[AgentKind, QTable]
    episodes: List[EpisodeSummary] = field(default_factory=list)


def run_training(config: SimConfig, *, eval_episodes: int = 0,
                 on_episode=None) -> TrainingResult:
    """Run the configured training episodes, then optional greedy
    (epsilon 0, frozen tables) evaluation episodes.

    on_episode(index, is_eval, EpisodeResult) sees each full result before
    its ledger is discarded; EpisodeSummary keeps only aggregates.
    """
    require_valid(config)
    mode = ControllerMode.from_id(config.mode)
    tables = make_tables(mode)
    result = TrainingResult(mode=mode, tables=tables)
    total = config.episodes + eval_episodes
    for ep in range(1, total + 1):
        is_eval = ep > config.episodes
        if config.reset_tables_each_episode and not is_eval and ep > 1:
            tables = make_tables(mode)
            result.tables = tables
        res = run_episode(config, tables, mode, episode_seed(config.rng_seed, ep),
                          learn=not is_eval, epsilon=0.0 if is_eval else None)
        if on_episode is not None:
            on_episode(ep, is_eval, res)
        result.episodes.append(EpisodeSummary(
            episode=ep, is_eval=is_eval, collisions=res.collisions,
            spawned=res.spawned,
            stats=summarize(res.ledger, config.episode_duration)))
    return result


# ---------------------------------------------------------------------------
# Run directories

PACKETS_HEADER = ["id", "vehicle", "category", "size", "gen_time", "deliver_time", "status"]
DECISIONS_HEADER = ["time", "vehicle", "category", "a_cw", "a_ifs", "a_wt",
                    "cw_min", "cw_max", "ifsn", "wt", "reward"]
EPISODES_HEADER = ["episode", "category", "generated", "delivered", "dropped",
                   "residual", "mean_latency", "median_latency", "p95_latency",
                   "mean_throughput"]

MARKER_NAME = "INCOMPLETE"


def _f(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def _write_packets(path: Path, ledger: List[PacketRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PACKETS_HEADER)
        for r in ledger:
            w.writerow([r.pid, r.vid, r.category.short, r.size, _f(r.gen_time),
                        _f(r.deliver_time), r.status])


def _write_decisions(path: Path, decisions: List[DecisionRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DECISIONS_HEADER)
        for d in decisions:
            w.writerow([_f(d.time), d.vid, d.category.short,
                        _f(d.actions.get(AgentKind.CW)),
                        _f(d.actions.get(AgentKind.IFS)),
                        _f(d.actions.get(AgentKind.WT)),
                        d.params.cw_min, d.params.cw_max, d.params.ifsn,
                        _f(d.wt), _f(d.reward)])


@dataclass
class RunResult:
    out_dir: Path
    summary: Dict[ServiceCategory, CategorySummary]
    episodes: List[EpisodeSummary]


def run_experiment(config: SimConfig, out_dir, *, eval_episodes: int = 0,
                   write_packets: bool = True, command: str = "") -> RunResult:
    """Train per config and leave a complete, auditable run directory.

    eval_episodes greedy episodes (epsilon 0, frozen tables) follow the
    training episodes and are numbered after them in every per-episode file.
    """
    require_valid(config)
    mode = ControllerMode.from_id(config.mode)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / MARKER_NAME
    marker.write_text("run did not finish\n")

    manifest = {
        "format": 1,
        "mode": mode.id,
        "mode_label": mode.label,
        "seed": config.rng_seed,
        "episodes": config.episodes,
        "eval_episodes": eval_episodes,
        "config": config_to_dict(config),
        "versions": {"edca_sim": __version__,
                     "python": sys.version.split()[0]},
        "command": command,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    agg_counts = {cat: Counts() for cat in CATEGORIES}
    agg_lat: Dict[ServiceCategory, List[float]] = {cat: [] for cat in CATEGORIES}
    agg_bits = {cat: 0 for cat in CATEGORIES}
    episode_rows: List[list] = []
    last_ledger: List[PacketRecord] = []

    def on_episode(ep: int, is_eval: bool, res: EpisodeResult) -> None:
        nonlocal last_ledger
        if write_packets:
            _write_packets(out / f"episode_{ep}_packets.csv", res.ledger)
        _write_decisions(out / f"episode_{ep}_decisions.csv", res.decisions)
        stats = summarize(res.ledger, config.episode_duration)
        for cat in CATEGORIES:
            st = stats[cat]
            episode_rows.append([ep, cat.short, st.generated, st.delivered,
                                 st.dropped, st.residual, _f(st.mean_latency),
                                 _f(st.median_latency), _f(st.p95_latency),
                                 _f(st.mean_throughput)])
            agg = agg_counts[cat]
            agg.generated += st.generated
            agg.delivered += st.delivered
            agg.dropped += st.dropped
            agg.residual += st.residual
            agg_bits[cat] += st.delivered_bits
        for rec in res.ledger:
            if rec.deliver_time is not None:
                agg_lat[rec.category].append(rec.deliver_time - rec.gen_time)
        last_ledger = res.ledger

    training = run_training(config, eval_episodes=eval_episodes,
                            on_episode=on_episode)

    with open(out / "episodes.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(EPISODES_HEADER)
        w.writerows(episode_rows)

    span = (config.episodes + eval_episodes) * config.episode_duration
    summary_rows: Dict[ServiceCategory, CategorySummary] = {}
    for cat in CATEGORIES:
        row = CategorySummary(cat)
        c = agg_counts[cat]
        row.generated, row.delivered = c.generated, c.delivered
        row.dropped, row.residual = c.dropped, c.residual
        row.delivered_bits = agg_bits[cat]
        vals = agg_lat[cat]
        if vals:
            row.mean_latency = sum(vals) / len(vals)
            row.median_latency = statistics.median(vals)
            row.p95_latency = percentile(vals, 0.95)
        row.mean_throughput = agg_bits[cat] / span if span > 0 else 0.0
        summary_rows[cat] = row
    export_summary(summary_rows, out / "summary.csv", mode.id, config.rng_seed)

    export_series(time_series(last_ledger, config.series_bucket), out / "series.csv")
    export_cdf({cat: cdf_latency(last_ledger, cat) for cat in CATEGORIES},
               out / "cdf_latency.csv", "latency")
    export_cdf({cat: cdf_throughput(last_ledger, cat, config.series_bucket)
                for cat in CATEGORIES},
               out / "cdf_throughput.csv", "throughput")

    for kind, table in training.tables.items():
        dump_qtable(table, out / f"qtable_{kind.value}.txt")

    marker.unlink()
    return RunResult(out_dir=out, summary=summary_rows, episodes=training.episodes)


# ---------------------------------------------------------------------------
# Audit: recheck a run directory from its files alone.

@dataclass
class AuditReport:
    run_dir: Path
    packets_checked: int = 0
    decisions_checked: int = 0
    episodes_checked: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_run(run_dir) -> AuditReport:
    out = Path(run_dir)
    rep = AuditReport(run_dir=out)
    bad = rep.violations.append

    if (out / MARKER_NAME).exists():
        bad("incomplete run: marker file present")
    mpath = out / "manifest.json"
    if not mpath.exists():
        bad("manifest.json missing")
        return rep
    manifest = json.loads(mpath.read_text())
    try:
        config = config_from_dict(manifest["config"])
    except Exception as exc:
        bad(f"manifest config does not parse: {exc}")
        return rep
    for msg in validate_config(config):
        bad(f"manifest config invalid: {msg}")
    mode = ControllerMode.from_id(manifest["mode"])
    duration = config.episode_duration
    frame_slack = 0.1

    # per-episode ledgers
    totals = {cat: Counts() for cat in CATEGORIES}
    ep_files = sorted(out.glob("episode_*_packets.csv"),
                      key=lambda p: int(p.name.split("_")[1]))
    for path in ep_files:
        ep = int(path.name.split("_")[1])
        per = {cat: Counts() for cat in CATEGORIES}
        with open(path, newline="") as fh:
            rd = csv.DictReader(fh)
            if rd.fieldnames != PACKETS_HEADER:
                bad(f"{path.name}: bad header {rd.fieldnames}")
                continue
            for row in rd:
                rep.packets_checked += 1
                cat = ServiceCategory.from_short(row["category"])
                c = per[cat]
                c.generated += 1
                gen = float(row["gen_time"])
                if not (0.0 <= gen <= duration):
                    bad(f"{path.name}: packet {row['id']} gen_time {gen} outside episode")
                status = row["status"]
                if status == "delivered":
                    c.delivered += 1
                    if row["deliver_time"] == "":
                        bad(f"{path.name}: packet {row['id']} delivered without timestamp")
                    else:
                        dv = float(row["deliver_time"])
                        if dv < gen:
                            bad(f"{path.name}: packet {row['id']} delivered before generation")
                        if dv > duration + frame_slack:
                            bad(f"{path.name}: packet {row['id']} delivered after episode end")
                elif status == "dropped":
                    c.dropped += 1
                    if row["deliver_time"] != "":
                        bad(f"{path.name}: dropped packet {row['id']} has deliver_time")
                elif status == "residual":
                    c.residual += 1
                    if row["deliver_time"] != "":
                        bad(f"{path.name}: residual packet {row['id']} has deliver_time")
                else:
                    bad(f"{path.name}: packet {row['id']} unknown status {status!r}")
        for cat in CATEGORIES:
            c = per[cat]
            if c.generated != c.delivered + c.dropped + c.residual:
                bad(f"{path.name}: {cat.short} conservation broken: "
                    f"{c.generated} != {c.delivered}+{c.dropped}+{c.residual}")
            t = totals[cat]
            t.generated += c.generated
            t.delivered += c.delivered
            t.dropped += c.dropped
            t.residual += c.residual
        rep.episodes_checked += 1

    # summary cross-check (only when the packet ledgers were written)
    spath = out / "summary.csv"
    if not spath.exists():
        bad("summary.csv missing")
    elif ep_files:
        with open(spath, newline="") as fh:
            for row in csv.DictReader(fh):
                cat = ServiceCategory.from_short(row["category"])
                t = totals[cat]
                got = (int(row["generated"]), int(row["delivered"]),
                       int(row["dropped"]), int(row["residual"]))
                want = (t.generated, t.delivered, t.dropped, t.residual)
                if got != want:
                    bad(f"summary.csv: {cat.short} counts {got} != episode totals {want}")

    # applied parameters and waiting times
    for path in sorted(out.glob("episode_*_decisions.csv"),
                       key=lambda p: int(p.name.split("_")[1])):
        with open(path, newline="") as fh:
            rd = csv.DictReader(fh)
            if rd.fieldnames != DECISIONS_HEADER:
                bad(f"{path.name}: bad header {rd.fieldnames}")
                continue
            for row in rd:
                rep.decisions_checked += 1
                cat = ServiceCategory.from_short(row["category"])
                prof = config.profiles[cat]
                lo, hi = int(row["cw_min"]), int(row["cw_max"])
                ifsn = int(row["ifsn"])
                wt = float(row["wt"])
                where = f"{path.name} t={row['time']} v={row['vehicle']}"
                if not (1 <= lo <= hi <= 1023):
                    bad(f"{where}: cw bounds ({lo}, {hi}) invalid")
                if row["a_ifs"] != "" and not (prof.ifsn_min <= ifsn <= prof.ifsn_max):
                    bad(f"{where}: ifsn {ifsn} outside [{prof.ifsn_min}, {prof.ifsn_max}]")
                if ifsn < 1:
                    bad(f"{where}: ifsn {ifsn} < 1")
                if not (0.0 <= wt <= prof.wt_max + 1e-12):
                    bad(f"{where}: wt {wt} outside [0, {prof.wt_max}]")
                if row["a_ifs"] != "" and row["a_cw"] == "":
                    bad(f"{where}: ifs action recorded without a cw action")

    # q-table dumps parse and have consistent widths
    for kind in mode.agents:
        qpath = out / f"qtable_{kind.value}.txt"
        if not qpath.exists():
            bad(f"qtable_{kind.value}.txt missing")
            continue
        try:
            load_qtable(qpath)
        except Exception as exc:
            bad(f"qtable_{kind.value}.txt does not load: {exc}")

    return rep


# ---------------------------------------------------------------------------
# Compare two run directories by their summary tables.

def read_summary(run_dir) -> Dict[ServiceCategory, dict]:
    rows = {}
    with open(Path(run_dir) / "summary.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            rows[ServiceCategory.from_short(row["category"])] = row
    return rows


def compare_runs(base_dir, cand_dir) -> List[dict]:
    """Per-category deltas, positive = candidate better.

    Latency improvement is (base - cand) / base * 100; throughput gain is
    (cand - base) / base * 100.
    """
    base = read_summary(base_dir)
    cand = read_summary(cand_dir)
    out = []
    for cat in CATEGORIES:
        b, c = base.get(cat), cand.get(cat)
        row = {"category": cat.short,
               "base_latency": None, "cand_latency": None, "latency_gain_pct": None,
               "base_throughput": None, "cand_throughput": None,
               "throughput_gain_pct": None}
        if b and c:
            if b["mean_latency"] and c["mean_latency"]:
                bl, cl = float(b["mean_latency"]), float(c["mean_latency"])
                row["base_latency"], row["cand_latency"] = bl, cl
                if bl > 0:
                    row["latency_gain_pct"] = (bl - cl) / bl * 100.0
            bt, ct = float(b["mean_throughput"]), float(c["mean_throughput"])
            row["base_throughput"], row["cand_throughput"] = bt, ct
            if bt > 0:
                row["throughput_gain_pct"] = (ct - bt) / bt * 100.0
        out.append(row)
    return out
