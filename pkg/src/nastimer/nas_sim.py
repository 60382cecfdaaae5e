"""Discrete-event simulation of the 5G registration call flow under burst load.

Many UEs power on inside a short window and register with one AMF across a
multi-hop path.  The exchange per attempt is five messages:

    UE  -> AMF   Registration Request        (UE starts T3510)
    AMF -> UE    Authentication Request      (AMF starts T3560)
    UE  -> AMF   Authentication Response     (T3560 stops when served)
    AMF -> UE    Registration Accept         (AMF starts T3550; UE stops
                                              T3510 on receipt and counts as
                                              registered)
    UE  -> AMF   Registration Complete       (T3550 stops when served)

The AMF is a single exponential server.  Uplink NAS messages queue there and
each consumes one service; the matching downlink goes out the instant the
service completes.  Non-registration control load arrives Poisson and eats
the same server.  By default NAS signalling is served ahead of that
background class (non-preemptive, FIFO inside each class); set
``amf_discipline="fifo"`` for a single shared queue.

Watchdog expiry on the AMF retransmits the outstanding downlink up to
``nas_retransmit_limit`` times and then abandons the procedure.  T3510 expiry
aborts the attempt on the UE, cancels the AMF-side context, and starts the
T3511 backoff; the attempt after ``max_attempts`` failures is terminal.

A run is single-threaded over one event queue and bit-reproducible: every
random concern (power-on jitter, message loss, service times, background
arrivals) draws from its own seed-derived stream, so changing one knob does
not disturb the others.
"""

from __future__ import annotations

import enum
import heapq
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .timer_model import (NodeLoadProfile, PathSpec, SizedTimerSuite,
                          UnstableQueueError)

# Event kinds, ordered only for readability; ties break on sequence number.
_POWER_ON = 0
_MSG_ARRIVAL = 1
_SERVICE_COMPLETE = 2
_TIMER_EXPIRY = 3
_BG_ARRIVAL = 4


class MsgKind(enum.Enum):
    REGISTRATION_REQUEST = "registration_request"
    AUTHENTICATION_REQUEST = "authentication_request"
    AUTHENTICATION_RESPONSE = "authentication_response"
    REGISTRATION_ACCEPT = "registration_accept"
    REGISTRATION_COMPLETE = "registration_complete"


_UPLINK = {MsgKind.REGISTRATION_REQUEST, MsgKind.AUTHENTICATION_RESPONSE,
           MsgKind.REGISTRATION_COMPLETE}


class NasMessage(NamedTuple):
    kind: MsgKind
    ue_id: int
    attempt: int


class UeState(enum.Enum):
    OFF = "off"
    REGISTERING = "registering"
    BACKOFF = "backoff"
    REGISTERED = "registered"
    FAILED = "failed"


_AWAIT_AUTH_RESPONSE = 0
_AWAIT_COMPLETE = 1


@dataclass
class SimConfig:
    num_ues: int
    loss_probability: float
    amf_profile: NodeLoadProfile
    seed: int = 0
    max_attempts: int = 5
    burst_window: float = 1e-3
    background_load_fraction: float = 0.8
    nas_retransmit_limit: int = 4
    p_active: float = 0.2
    p_idle: float = 0.01
    horizon: float = 600.0
    ue_processing_delay: float = 0.0
    amf_discipline: str = "nas_priority"   # or "fifo"
    queue_sample_stride: int = 64
    record_messages: bool = False

    def __post_init__(self):
        if self.num_ues < 0:
            raise ValueError("num_ues must be >= 0")
        if not 0.0 <= self.loss_probability <= 1.0:
            raise ValueError("loss_probability must be in [0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if not self.burst_window >= 0.0:
            raise ValueError("burst_window must be >= 0")
        if not 0.0 <= self.background_load_fraction < 1.0:
            raise ValueError("background_load_fraction must be in [0, 1)")
        if self.nas_retransmit_limit < 0:
            raise ValueError("nas_retransmit_limit must be >= 0")
        if self.p_active < 0.0 or self.p_idle < 0.0:
            raise ValueError("power draws must be >= 0")
        if not self.horizon > 0.0:
            raise ValueError("horizon must be > 0")
        if self.ue_processing_delay < 0.0:
            raise ValueError("ue_processing_delay must be >= 0")
        if self.amf_discipline not in ("nas_priority", "fifo"):
            raise ValueError("amf_discipline must be 'nas_priority' or 'fifo'")
        if self.queue_sample_stride < 1:
            raise ValueError("queue_sample_stride must be >= 1")


@dataclass
class UeRecord:
    ue_id: int
    power_on: float
    outcome: str                      # registered | failed | censored
    attempts: int
    registration_time: float | None
    active_time: float
    idle_time: float
    energy_j: float


class TimerEvent(NamedTuple):
    time: float
    timer: str
    event: str                        # started | stopped | expired
    ue_id: int


@dataclass
class RunTrace:
    records: list[UeRecord]
    timer_events: list[TimerEvent]
    queue_samples: list[tuple[float, int, int]]   # (time, nas backlog, bg backlog)
    amf_sojourn_sum: float
    amf_jobs_served: int
    messages_sent: int
    messages_dropped: int
    horizon_exceeded: bool
    end_time: float
    num_ues: int
    loss_probability: float
    seed: int
    message_log: list[tuple[float, int, str, int]] = field(default_factory=list)

    @property
    def mean_sojourn(self) -> float:
        if self.amf_jobs_served == 0:
            raise ValueError("no jobs served")
        return self.amf_sojourn_sum / self.amf_jobs_served

    def timer_counts(self) -> dict[str, dict[str, int]]:
        counts: dict[str, dict[str, int]] = {}
        for ev in self.timer_events:
            per = counts.setdefault(ev.timer, {"started": 0, "stopped": 0, "expired": 0})
            per[ev.event] += 1
        return counts


def one_way_delay(path: PathSpec) -> float:
    """Deterministic one-way latency: link propagation plus relay processing.

    Intermediate relays contribute their steady-state service delay only;
    queueing is modelled at the responder (the AMF), not at relays.
    """
    mu = path.service_rate[1:-1]
    lss = path.steady_arrival[1:-1]
    if (mu <= lss).any():
        idx = int(np.argmax(mu <= lss)) + 1
        raise UnstableQueueError(
            f"intermediate node {idx} is unstable (mu <= lambda_ss)",
            node_index=idx)
    return float(path.link_delays.sum() + (1.0 / (mu - lss)).sum())


def draw_power_on_times(config: SimConfig) -> np.ndarray:
    """Power-on instants, uniform over the burst window (own RNG stream)."""
    stream = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(4)[0])
    return stream.uniform(0.0, config.burst_window, config.num_ues)


class _Ue:
    __slots__ = ("ue_id", "state", "attempts", "power_on", "state_since",
                 "active_time", "idle_time", "registration_time",
                 "t3510_token", "t3511_token")

    def __init__(self, ue_id: int):
        self.ue_id = ue_id
        self.state = UeState.OFF
        self.attempts = 0
        self.power_on = 0.0
        self.state_since = 0.0
        self.active_time = 0.0
        self.idle_time = 0.0
        self.registration_time: float | None = None
        self.t3510_token: int | None = None
        self.t3511_token: int | None = None


class _Procedure:
    __slots__ = ("ue_id", "attempt", "phase", "retransmits", "watchdog_token",
                 "watchdog_name", "outstanding")

    def __init__(self, ue_id: int, attempt: int):
        self.ue_id = ue_id
        self.attempt = attempt
        self.phase = _AWAIT_AUTH_RESPONSE
        self.retransmits = 0
        self.watchdog_token: int | None = None
        self.watchdog_name = ""
        self.outstanding: NasMessage | None = None


class _TimerRec:
    __slots__ = ("name", "ue_id", "alive")

    def __init__(self, name: str, ue_id: int):
        self.name = name
        self.ue_id = ue_id
        self.alive = True


class Simulation:
    """One seeded run; build, call :meth:`run`, read the trace."""

    def __init__(self, config: SimConfig, timers: SizedTimerSuite, path: PathSpec):
        for t in (timers.t3510, timers.t3511, timers.t3550, timers.t3560):
            if not t.value > 0.0:
                raise ValueError(f"{t.name} must be > 0 for simulation, got {t.value}")
        self.config = config
        self.timers = timers
        self.path_delay = one_way_delay(path)
        seqs = np.random.SeedSequence(config.seed).spawn(4)
        self._rng_power = np.random.default_rng(seqs[0])
        self._rng_loss = np.random.default_rng(seqs[1])
        self._rng_service = np.random.default_rng(seqs[2])
        self._rng_background = np.random.default_rng(seqs[3])

        self.now = 0.0
        self._heap: list = []
        self._seq = 0
        self._ues = [_Ue(i) for i in range(config.num_ues)]
        self._procs: dict[int, _Procedure] = {}
        self._timers: dict[int, _TimerRec] = {}
        self._timer_seq = 0
        self._terminal = 0

        self._nas_queue: deque = deque()
        self._bg_queue: deque = deque()
        self._in_service = None
        self._service_count = 0
        self._service_rate = config.amf_profile.service_rate
        self._bg_rate = config.background_load_fraction * self._service_rate

        self.timer_events: list[TimerEvent] = []
        self.queue_samples: list[tuple[float, int, int]] = []
        self.message_log: list[tuple[float, int, str, int]] = []
        self.sojourn_sum = 0.0
        self.jobs_served = 0
        self.messages_sent = 0
        self.messages_dropped = 0

    # -- scheduling ----------------------------------------------------------

    def _schedule(self, time: float, kind: int, payload) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (time, self._seq, kind, payload))

    def _start_timer(self, name: str, ue_id: int, duration: float) -> int:
        self._timer_seq += 1
        token = self._timer_seq
        self._timers[token] = _TimerRec(name, ue_id)
        self.timer_events.append(TimerEvent(self.now, name, "started", ue_id))
        self._schedule(self.now + duration, _TIMER_EXPIRY, token)
        return token

    def _stop_timer(self, token: int | None) -> None:
        if token is None:
            return
        rec = self._timers.get(token)
        if rec is not None and rec.alive:
            rec.alive = False
            self.timer_events.append(TimerEvent(self.now, rec.name, "stopped", rec.ue_id))

    # -- transmission --------------------------------------------------------

    def _transmit(self, msg: NasMessage) -> None:
        """One end-to-end transmission; loss applies per message, independently."""
        self.messages_sent += 1
        lost = self._rng_loss.random() < self.config.loss_probability
        if lost:
            self.messages_dropped += 1
            return
        delay = self.path_delay
        if msg.kind in _UPLINK:
            delay += self.config.ue_processing_delay
        self._schedule(self.now + delay, _MSG_ARRIVAL, msg)

    # -- AMF queue -----------------------------------------------------------

    def _enqueue_amf(self, msg: NasMessage | None) -> None:
        job = (self.now, msg)
        if msg is None and self.config.amf_discipline == "nas_priority":
            self._bg_queue.append(job)
        else:
            self._nas_queue.append(job)
        if self._in_service is None:
            self._begin_service()

    def _begin_service(self) -> None:
        if self._nas_queue:
            job = self._nas_queue.popleft()
        elif self._bg_queue:
            job = self._bg_queue.popleft()
        else:
            return
        self._in_service = job
        if self._service_count % self.config.queue_sample_stride == 0:
            self.queue_samples.append((self.now, len(self._nas_queue), len(self._bg_queue)))
        self._service_count += 1
        service = self._rng_service.exponential(1.0 / self._service_rate)
        self._schedule(self.now + service, _SERVICE_COMPLETE, None)

    def _on_service_complete(self) -> None:
        arrival, msg = self._in_service
        self._in_service = None
        self.sojourn_sum += self.now - arrival
        self.jobs_served += 1
        if msg is not None:
            self._amf_handle(msg)
        self._begin_service()

    # -- AMF protocol logic (runs at service completion of an uplink) ---------

    def _amf_handle(self, msg: NasMessage) -> None:
        ue = self._ues[msg.ue_id]
        proc = self._procs.get(msg.ue_id)
        if msg.kind is MsgKind.REGISTRATION_REQUEST:
            # Ignore requests for attempts the UE has already abandoned.
            if (ue.state is not UeState.REGISTERING or msg.attempt != ue.attempts
                    or proc is not None):
                return
            proc = _Procedure(msg.ue_id, msg.attempt)
            self._procs[msg.ue_id] = proc
            down = NasMessage(MsgKind.AUTHENTICATION_REQUEST, msg.ue_id, msg.attempt)
            proc.outstanding = down
            proc.watchdog_name = "T3560"
            self._transmit(down)
            proc.watchdog_token = self._start_timer("T3560", msg.ue_id,
                                                    self.timers.t3560.value)
        elif msg.kind is MsgKind.AUTHENTICATION_RESPONSE:
            if (proc is None or proc.attempt != msg.attempt
                    or proc.phase != _AWAIT_AUTH_RESPONSE):
                return
            self._stop_timer(proc.watchdog_token)
            proc.phase = _AWAIT_COMPLETE
            proc.retransmits = 0
            down = NasMessage(MsgKind.REGISTRATION_ACCEPT, msg.ue_id, msg.attempt)
            proc.outstanding = down
            proc.watchdog_name = "T3550"
            self._transmit(down)
            proc.watchdog_token = self._start_timer("T3550", msg.ue_id,
                                                    self.timers.t3550.value)
        elif msg.kind is MsgKind.REGISTRATION_COMPLETE:
            if (proc is None or proc.attempt != msg.attempt
                    or proc.phase != _AWAIT_COMPLETE):
                return
            self._stop_timer(proc.watchdog_token)
            del self._procs[msg.ue_id]

    def _cancel_procedure(self, ue_id: int) -> None:
        proc = self._procs.pop(ue_id, None)
        if proc is not None:
            self._stop_timer(proc.watchdog_token)

    # -- UE side ---------------------------------------------------------------

    def _switch_state(self, ue: _Ue, new_state: UeState) -> None:
        elapsed = self.now - ue.state_since
        if ue.state is UeState.REGISTERING:
            ue.active_time += elapsed
        elif ue.state is UeState.BACKOFF:
            ue.idle_time += elapsed
        ue.state = new_state
        ue.state_since = self.now

    def _on_power_on(self, ue_id: int) -> None:
        ue = self._ues[ue_id]
        ue.power_on = self.now
        ue.state_since = self.now
        self._switch_state(ue, UeState.REGISTERING)
        ue.attempts = 1
        self._start_attempt(ue)

    def _start_attempt(self, ue: _Ue) -> None:
        ue.t3510_token = self._start_timer("T3510", ue.ue_id, self.timers.t3510.value)
        self._transmit(NasMessage(MsgKind.REGISTRATION_REQUEST, ue.ue_id, ue.attempts))

    def _on_downlink(self, msg: NasMessage) -> None:
        ue = self._ues[msg.ue_id]
        if self.config.record_messages:
            self.message_log.append((self.now, msg.ue_id, msg.kind.value, msg.attempt))
        if msg.kind is MsgKind.AUTHENTICATION_REQUEST:
            if ue.state is UeState.REGISTERING and msg.attempt == ue.attempts:
                self._transmit(NasMessage(MsgKind.AUTHENTICATION_RESPONSE,
                                          msg.ue_id, msg.attempt))
        elif msg.kind is MsgKind.REGISTRATION_ACCEPT:
            if ue.state is UeState.REGISTERING and msg.attempt == ue.attempts:
                self._stop_timer(ue.t3510_token)
                ue.t3510_token = None
                ue.registration_time = self.now - ue.power_on
                self._switch_state(ue, UeState.REGISTERED)
                self._terminal += 1
                self._transmit(NasMessage(MsgKind.REGISTRATION_COMPLETE,
                                          msg.ue_id, msg.attempt))
            elif ue.state is UeState.REGISTERED and msg.attempt == ue.attempts:
                # Retransmitted accept: acknowledge again, idempotently.
                self._transmit(NasMessage(MsgKind.REGISTRATION_COMPLETE,
                                          msg.ue_id, msg.attempt))

    # -- timer expiries ---------------------------------------------------------

    def _on_timer_expiry(self, token: int) -> None:
        rec = self._timers.pop(token, None)
        if rec is None or not rec.alive:
            return
        rec.alive = False
        self.timer_events.append(TimerEvent(self.now, rec.name, "expired", rec.ue_id))
        if rec.name == "T3510":
            self._on_t3510_expiry(self._ues[rec.ue_id])
        elif rec.name == "T3511":
            self._on_t3511_expiry(self._ues[rec.ue_id])
        else:
            self._on_watchdog_expiry(rec.ue_id, token)

    def _on_t3510_expiry(self, ue: _Ue) -> None:
        ue.t3510_token = None
        self._cancel_procedure(ue.ue_id)
        if ue.attempts >= self.config.max_attempts:
            self._switch_state(ue, UeState.FAILED)
            self._terminal += 1
        else:
            self._switch_state(ue, UeState.BACKOFF)
            ue.t3511_token = self._start_timer("T3511", ue.ue_id,
                                               self.timers.t3511.value)

    def _on_t3511_expiry(self, ue: _Ue) -> None:
        ue.t3511_token = None
        ue.attempts += 1
        self._switch_state(ue, UeState.REGISTERING)
        self._start_attempt(ue)

    def _on_watchdog_expiry(self, ue_id: int, token: int) -> None:
        proc = self._procs.get(ue_id)
        if proc is None or proc.watchdog_token != token:
            return
        if proc.retransmits < self.config.nas_retransmit_limit:
            proc.retransmits += 1
            self._transmit(proc.outstanding)
            proc.watchdog_token = self._start_timer(proc.watchdog_name, ue_id,
                                                    self.timers.t3550.value
                                                    if proc.watchdog_name == "T3550"
                                                    else self.timers.t3560.value)
        else:
            # Retransmissions exhausted: abandon the AMF-side procedure.
            del self._procs[ue_id]

    # -- background load ---------------------------------------------------------

    def _on_background_arrival(self) -> None:
        self._enqueue_amf(None)
        self._schedule_next_background()

    def _schedule_next_background(self) -> None:
        gap = self._rng_background.exponential(1.0 / self._bg_rate)
        self._schedule(self.now + gap, _BG_ARRIVAL, None)

    # -- main loop ----------------------------------------------------------------

    def run(self) -> RunTrace:
        cfg = self.config
        for ue_id, t in enumerate(draw_power_on_times(cfg)):
            self._schedule(float(t), _POWER_ON, ue_id)
        if self._bg_rate > 0.0:
            self._schedule_next_background()

        horizon_exceeded = False
        while self._heap:
            time, _, kind, payload = heapq.heappop(self._heap)
            if time > cfg.horizon:
                break
            self.now = time
            if kind == _MSG_ARRIVAL:
                if payload.kind in _UPLINK:
                    self._enqueue_amf(payload)
                else:
                    self._on_downlink(payload)
            elif kind == _SERVICE_COMPLETE:
                self._on_service_complete()
            elif kind == _TIMER_EXPIRY:
                self._on_timer_expiry(payload)
            elif kind == _BG_ARRIVAL:
                self._on_background_arrival()
            else:
                self._on_power_on(payload)
            if cfg.num_ues > 0 and self._terminal == cfg.num_ues:
                break

        end_time = self.now
        if cfg.num_ues > 0 and self._terminal < cfg.num_ues:
            horizon_exceeded = True
            end_time = cfg.horizon
            self.now = cfg.horizon
        # Close out the books: accrue state time for censored UEs and give
        # every still-running timer its terminal event.
        records = []
        for ue in self._ues:
            if ue.state in (UeState.REGISTERED, UeState.FAILED):
                outcome = ue.state.value
            else:
                outcome = "censored"
                self._switch_state(ue, ue.state)
            records.append(UeRecord(
                ue_id=ue.ue_id, power_on=ue.power_on, outcome=outcome,
                attempts=ue.attempts, registration_time=ue.registration_time,
                active_time=ue.active_time, idle_time=ue.idle_time,
                energy_j=cfg.p_active * ue.active_time + cfg.p_idle * ue.idle_time))
        for token in sorted(self._timers):
            self._stop_timer(token)
        self.queue_samples.append((end_time, len(self._nas_queue), len(self._bg_queue)))

        return RunTrace(
            records=records,
            timer_events=self.timer_events,
            queue_samples=self.queue_samples,
            amf_sojourn_sum=self.sojourn_sum,
            amf_jobs_served=self.jobs_served,
            messages_sent=self.messages_sent,
            messages_dropped=self.messages_dropped,
            horizon_exceeded=horizon_exceeded,
            end_time=end_time,
            num_ues=cfg.num_ues,
            loss_probability=cfg.loss_probability,
            seed=cfg.seed,
            message_log=self.message_log,
        )


def run_scenario(config: SimConfig, timers: SizedTimerSuite,
                 path: PathSpec) -> RunTrace:
    """Simulate one seeded scenario; identical inputs give identical traces."""
    return Simulation(config, timers, path).run()
