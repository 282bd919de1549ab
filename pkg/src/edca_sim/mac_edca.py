"""Slotted EDCA contention engine.

Semantics, on an integer slot grid:

* A queue with a head packet, an open gate and a live owner contends. It
  first observes IFSn idle slots (its AIFS share beyond SIFS), then counts
  its backoff down on further idle slots, and fires in the slot where both
  hit zero. SIFS itself is folded into the busy window of every frame, so
  priority separation between queues is exactly their IFSn difference.
* A frame occupies ceil((tx_duration + sifs) / slot) slots. A lone
  transmitter succeeds; its packet is stamped delivered at fire time plus
  tx_duration, cw resets to cw_min and retry to 0.
* Two or more simultaneous fires collide. Every collider grows
  cw := min(2 cw + 1, cw_max) and increments retry; past retry_limit the
  head packet is dropped and retry resets, but cw stays grown (cw resets
  only on success). Collided frames still occupy the channel for the
  longest frame involved.
* Backoff is drawn uniformly from [0, current_cw] whenever a packet becomes
  head of its queue, and redrawn after every collision. Gate closures
  freeze backoff and cw; a reopened queue re-observes a full AIFS.
* During busy slots nothing counts down; every queue re-observes its AIFS
  once the channel goes idle again.

The engine advances by jumping straight to the next fire slot instead of
iterating every slot, which is what makes desk-scale runs cheap. The
equivalence of the jump arithmetic with a literal slot-by-slot countdown is
pinned by an independent oracle in the test suite.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from random import Random
from typing import Dict, List, Optional, Tuple

from .core import EdcaParams, ServiceCategory, SimConfig

_FAR = 1 << 62


class PacketRecord:
    """One generated packet; delivery state is filled in by the engine."""

    __slots__ = ("pid", "vid", "category", "size", "gen_time", "deliver_time", "dropped")

    def __init__(self, pid: int, vid: int, category: ServiceCategory,
                 size: int, gen_time: float):
        self.pid = pid
        self.vid = vid
        self.category = category
        self.size = size
        self.gen_time = gen_time
        self.deliver_time: Optional[float] = None
        self.dropped = False

    @property
    def status(self) -> str:
        if self.deliver_time is not None:
            return "delivered"
        return "dropped" if self.dropped else "residual"

    def __repr__(self) -> str:
        return (f"PacketRecord({self.pid}, vid={self.vid}, cat={self.category.short}, "
                f"{self.status})")


def tx_duration(packet: PacketRecord, config: SimConfig) -> float:
    """Airtime of one frame in seconds, payload plus fixed per-frame overhead."""
    if packet.size <= 0:
        raise ValueError(f"packet size must be > 0, got {packet.size}")
    return packet.size * 8 / config.phy_rate + config.tx_overhead


@dataclass(frozen=True)
class Idle:
    pass


@dataclass(frozen=True)
class Success:
    vid: int
    packet: PacketRecord


@dataclass(frozen=True)
class Collision:
    vids: Tuple[int, ...]


@dataclass
class ChannelState:
    busy_until: int = 0              # first idle slot after the current busy window
    transmitters: Tuple[int, ...] = ()


class AcQueue:
    __slots__ = ("vid", "category", "params", "fifo", "backoff", "current_cw",
                 "retry", "gate_open", "retired", "arm_slot", "window_deliveries")

    def __init__(self, vid: int, category: ServiceCategory, params: EdcaParams):
        self.vid = vid
        self.category = category
        self.params = params
        self.fifo: deque = deque()
        self.backoff: Optional[int] = None   # None iff the fifo is empty
        self.current_cw = params.cw_min
        self.retry = 0
        self.gate_open = False
        self.retired = False
        self.arm_slot = 0
        self.window_deliveries: List[PacketRecord] = []


class MacEngine:
    """All queues sharing one channel. Time is an integer slot counter."""

    def __init__(self, config: SimConfig, rng: Random):
        self.config = config
        self.rng = rng
        self.slot_time = config.slot_time
        self.retry_limit = config.retry_limit
        self.queues: Dict[int, AcQueue] = {}
        self.channel = ChannelState()
        self.now_slot = 0
        self.busy_until = 0
        self.delivered = 0
        self.dropped = 0
        self.collisions = 0
        self.track_windows = True   # off when nobody consumes per-window deliveries
        self._armed: Dict[int, AcQueue] = {}
        self._next_fire = _FAR
        self._dirty = False
        self._frame_cache: Dict[int, Tuple[float, int]] = {}

    # -- setup and control ---------------------------------------------------

    def add_queue(self, vid: int, category: ServiceCategory, params: EdcaParams) -> AcQueue:
        if vid in self.queues:
            raise ValueError(f"queue for vehicle {vid} already exists")
        q = AcQueue(vid, category, params)
        self.queues[vid] = q
        return q

    def enqueue(self, vid: int, packet: PacketRecord) -> bool:
        """Append to the owner's fifo; packets for retired owners are dropped."""
        q = self.queues[vid]
        if q.retired:
            packet.dropped = True
            self.dropped += 1
            return False
        was_empty = not q.fifo
        q.fifo.append(packet)
        if was_empty:
            q.backoff = self.rng.randint(0, q.current_cw)
            if q.gate_open:
                q.arm_slot = self.now_slot
                self._armed[vid] = q
                self._dirty = True
        return True

    def _settle(self, q: AcQueue) -> None:
        """Bank the idle slots an armed queue has counted since its last
        adjustment, so a disarm or AIFS restart keeps that progress."""
        base = self.busy_until if self.busy_until > q.arm_slot else q.arm_slot
        spent = self.now_slot - base - q.params.ifsn
        if spent > 0:
            q.backoff -= spent
        q.arm_slot = self.now_slot

    def set_gate(self, vid: int, open_: bool) -> None:
        q = self.queues[vid]
        if q.gate_open == open_:
            return
        q.gate_open = open_
        if open_:
            if q.fifo and not q.retired:
                q.arm_slot = self.now_slot
                self._armed[vid] = q
                self._dirty = True
        elif self._armed.pop(vid, None) is not None:
            self._settle(q)
            self._dirty = True

    def set_params(self, vid: int, params: EdcaParams) -> None:
        """Adopt new bounds; cw and backoff are clamped in immediately."""
        q = self.queues[vid]
        if vid in self._armed:
            # bank progress under the old spacing, then restart the AIFS
            # observation under the new one
            self._settle(q)
            self._dirty = True
        q.params = params
        if q.current_cw < params.cw_min:
            q.current_cw = params.cw_min
        elif q.current_cw > params.cw_max:
            q.current_cw = params.cw_max
        if q.backoff is not None and q.backoff > q.current_cw:
            q.backoff = q.current_cw

    def retire(self, vid: int) -> None:
        q = self.queues[vid]
        q.retired = True
        if self._armed.pop(vid, None) is not None:
            self._settle(q)
            self._dirty = True

    # -- inspection ----------------------------------------------------------

    def aifs_remaining(self, vid: int) -> int:
        """Idle slots this queue still owes before its backoff may count down."""
        q = self.queues[vid]
        base = self.busy_until if self.busy_until > q.arm_slot else q.arm_slot
        observed = self.now_slot - base
        if observed < 0:
            observed = 0
        rem = q.params.ifsn - observed
        return rem if rem > 0 else 0

    def backlog(self, vid: int) -> int:
        return len(self.queues[vid].fifo)

    def next_fire_slot(self, vid: int) -> Optional[int]:
        """Absolute slot this queue fires in if nothing changes; None when
        it is not contending."""
        q = self.queues[vid]
        if vid not in self._armed:
            return None
        base = self.busy_until if self.busy_until > q.arm_slot else q.arm_slot
        return base + q.params.ifsn + q.backoff

    @property
    def now(self) -> float:
        return self.now_slot * self.slot_time

    # -- time advancement ----------------------------------------------------

    def run_until(self, target_slot: int, capture: Optional[list] = None) -> None:
        """Advance to target_slot, resolving every transmission on the way."""
        if target_slot <= self.now_slot:
            return
        while True:
            if self._dirty:
                self._recompute_next_fire()
            nf = self._next_fire
            if nf >= target_slot:
                break
            self._resolve(nf, capture)
        self.now_slot = target_slot

    def advance_slot(self, gated_vids: Optional[set] = None):
        """Advance exactly one slot; report what started in it.

        gated_vids, when given, syncs every gate first (open iff listed).
        Returns Idle, Success or Collision. A slot inside an ongoing busy
        window reports Idle (nothing new started).
        """
        if gated_vids is not None:
            for vid in self.queues:
                self.set_gate(vid, vid in gated_vids)
        events: list = []
        self.run_until(self.now_slot + 1, capture=events)
        return events[0] if events else Idle()

    # -- internals -----------------------------------------------------------

    def _frame(self, size: int) -> Tuple[float, int]:
        got = self._frame_cache.get(size)
        if got is None:
            cfg = self.config
            dur = size * 8 / cfg.phy_rate + cfg.tx_overhead
            slots = math.ceil((dur + cfg.sifs) / cfg.slot_time)
            got = (dur, max(1, slots))
            self._frame_cache[size] = got
        return got

    def _recompute_next_fire(self) -> None:
        bu = self.busy_until
        best = _FAR
        for q in self._armed.values():
            base = bu if bu > q.arm_slot else q.arm_slot
            f = base + q.params.ifsn + q.backoff
            if f < best:
                best = f
        self._next_fire = best
        self._dirty = False

    def _resolve(self, s: int, capture: Optional[list]) -> None:
        bu = self.busy_until
        winners: List[AcQueue] = []
        for q in self._armed.values():
            base = bu if bu > q.arm_slot else q.arm_slot
            fire = base + q.params.ifsn + q.backoff
            if fire == s:
                winners.append(q)
            else:
                # consume the idle this queue observed beyond its AIFS
                spent = s - base - q.params.ifsn
                if spent > 0:
                    q.backoff -= spent
        if not winners:
            raise RuntimeError(f"stale fire slot {s}: no queue is due")
        self.now_slot = s
        if len(winners) > 1:
            winners.sort(key=lambda q: q.vid)
        rng = self.rng
        busy = 1
        if len(winners) == 1:
            q = winners[0]
            pkt = q.fifo.popleft()
            dur, slots = self._frame(pkt.size)
            pkt.deliver_time = s * self.slot_time + dur
            if self.track_windows:
                q.window_deliveries.append(pkt)
            self.delivered += 1
            busy = slots
            q.current_cw = q.params.cw_min
            q.retry = 0
            if q.fifo:
                q.backoff = rng.randint(0, q.current_cw)
                q.arm_slot = s
            else:
                q.backoff = None
                del self._armed[q.vid]
            if capture is not None:
                capture.append(Success(q.vid, pkt))
        else:
            self.collisions += 1
            for q in winners:
                pkt = q.fifo[0]
                _, slots = self._frame(pkt.size)
                if slots > busy:
                    busy = slots
                cw = 2 * q.current_cw + 1
                q.current_cw = cw if cw < q.params.cw_max else q.params.cw_max
                q.retry += 1
                if q.retry > self.retry_limit:
                    q.fifo.popleft()
                    pkt.dropped = True
                    self.dropped += 1
                    q.retry = 0
                    if q.fifo:
                        q.backoff = rng.randint(0, q.current_cw)
                        q.arm_slot = s
                    else:
                        q.backoff = None
                        del self._armed[q.vid]
                else:
                    q.backoff = rng.randint(0, q.current_cw)
                    q.arm_slot = s
            if capture is not None:
                capture.append(Collision(tuple(q.vid for q in winners)))
        self.busy_until = s + busy
        self.channel.busy_until = self.busy_until
        self.channel.transmitters = tuple(q.vid for q in winners)
        self._dirty = True
