"""Closed-form sizing of NAS supervision timers over multi-hop satellite paths.

A timer that supervises a request/response procedure must outlast the
end-to-end delay of every message round plus the processing backlog at the
two endpoints.  The model splits each node's contribution into a
steady-state queueing term ``1 / (mu - lambda_ss)`` and a transient term for
the backlog left behind by a short arrival burst, ``(lambda_brs - mu) *
t_brs / mu``.  A timer covering ``R`` message rounds is then

    T = R * (path propagation + intermediate-hop aggregates)
        + (floor(R / 2) + 1) * (alpha * D_origin + beta * D_responder)

computed in a single pass over the hops.  Everything here is pure and
operates on immutable inputs; callers may share objects freely across
threads or processes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LIGHT_SPEED_KM_PER_S = 299792.458


class UnstableQueueError(ValueError):
    """Raised when a node's service rate cannot sustain its steady arrivals.

    The steady-state delay diverges at mu <= lambda_ss; an unbounded
    supervision timer would never detect a failure, so sizing refuses the
    input instead of returning infinity.
    """

    def __init__(self, message: str, node_index: int | None = None,
                 node_label: str | None = None):
        super().__init__(message)
        self.node_index = node_index
        self.node_label = node_label


@dataclass(frozen=True)
class NodeLoadProfile:
    """Arrival/service rates (per second) and burst window (seconds) of one node.

    ``total_arrival`` covers steady traffic plus any superimposed burst;
    it defaults to ``steady_arrival`` (no burst).
    """

    service_rate: float
    steady_arrival: float = 0.0
    total_arrival: float | None = None
    burst_window: float = 0.0

    def __post_init__(self):
        if self.total_arrival is None:
            object.__setattr__(self, "total_arrival", self.steady_arrival)
        mu, lss, lam, tb = (self.service_rate, self.steady_arrival,
                            self.total_arrival, self.burst_window)
        if not (np.isfinite(mu) and mu > 0.0):
            raise ValueError(f"service_rate must be finite and > 0, got {mu}")
        if not (np.isfinite(lss) and lss >= 0.0):
            raise ValueError(f"steady_arrival must be finite and >= 0, got {lss}")
        if not (np.isfinite(lam) and lam >= lss):
            raise ValueError(
                f"total_arrival must be finite and >= steady_arrival, got {lam}")
        if not (np.isfinite(tb) and tb >= 0.0):
            raise ValueError(f"burst_window must be finite and >= 0, got {tb}")


@dataclass(frozen=True)
class EndpointWeights:
    """Dimensionless weights scaling the origin (alpha) and responder (beta) terms."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta)):
            if not (np.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")

    def reversed(self) -> "EndpointWeights":
        """Weights for the same endpoints viewed from the opposite direction."""
        return EndpointWeights(alpha=self.beta, beta=self.alpha)


class TimerKind(enum.Enum):
    WATCHDOG = "watchdog"
    BACKOFF = "backoff"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class SizedTimer:
    name: str
    kind: TimerKind
    rounds: int
    value: float

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if self.kind is TimerKind.BACKOFF and self.rounds != 0:
            raise ValueError("backoff timers supervise no message rounds (rounds must be 0)")
        if not (np.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"timer value must be finite and >= 0, got {self.value}")


@dataclass(frozen=True)
class SizedTimerSuite:
    """The four registration timers: T3510 (UE), T3511 (UE backoff), T3550/T3560 (AMF)."""

    t3510: SizedTimer
    t3511: SizedTimer
    t3550: SizedTimer
    t3560: SizedTimer

    def __post_init__(self):
        if self.t3510.rounds != 5:
            raise ValueError("T3510 covers the five-message registration exchange (rounds=5)")
        if self.t3550.rounds != 2 or self.t3560.rounds != 2:
            raise ValueError("T3550/T3560 cover a two-message exchange (rounds=2)")
        if self.t3511.kind is not TimerKind.BACKOFF or self.t3511.rounds != 0:
            raise ValueError("T3511 is a backoff timer with rounds=0")

    def as_dict(self) -> dict[str, float]:
        return {t.name: t.value for t in (self.t3510, self.t3511, self.t3550, self.t3560)}


def make_registration_suite(t3510: float, t3511: float, t3550: float,
                            t3560: float) -> SizedTimerSuite:
    """Build a registration timer suite from plain values (seconds)."""
    return SizedTimerSuite(
        t3510=SizedTimer("T3510", TimerKind.WATCHDOG, 5, t3510),
        t3511=SizedTimer("T3511", TimerKind.BACKOFF, 0, t3511),
        t3550=SizedTimer("T3550", TimerKind.WATCHDOG, 2, t3550),
        t3560=SizedTimer("T3560", TimerKind.WATCHDOG, 2, t3560),
    )


class PathSpec:
    """Ordered relay path from origin (index 0) to responder (index N), N >= 1.

    Node load parameters are stored columnar (one float64 array per field) so
    sizing stays a handful of vector passes even for multi-million-hop paths.
    ``link_delays[i]`` is the propagation delay between nodes i and i+1.
    """

    __slots__ = ("service_rate", "steady_arrival", "total_arrival",
                 "burst_window", "link_delays", "labels")

    def __init__(self, nodes: Sequence[NodeLoadProfile],
                 link_delays: Iterable[float],
                 labels: Sequence[str] | None = None):
        self._init_arrays(
            np.asarray([n.service_rate for n in nodes], dtype=np.float64),
            np.asarray([n.steady_arrival for n in nodes], dtype=np.float64),
            np.asarray([n.total_arrival for n in nodes], dtype=np.float64),
            np.asarray([n.burst_window for n in nodes], dtype=np.float64),
            np.asarray(list(link_delays), dtype=np.float64),
            tuple(labels) if labels is not None else None,
        )

    @classmethod
    def from_arrays(cls, service_rate, steady_arrival, total_arrival,
                    burst_window, link_delays,
                    labels: Sequence[str] | None = None) -> "PathSpec":
        """Columnar constructor; avoids materialising per-node objects."""
        path = cls.__new__(cls)
        path._init_arrays(
            np.asarray(service_rate, dtype=np.float64),
            np.asarray(steady_arrival, dtype=np.float64),
            np.asarray(total_arrival, dtype=np.float64),
            np.asarray(burst_window, dtype=np.float64),
            np.asarray(link_delays, dtype=np.float64),
            tuple(labels) if labels is not None else None,
        )
        return path

    def _init_arrays(self, mu, lss, lam, tb, links, labels):
        n_nodes = mu.shape[0]
        if n_nodes < 2:
            raise ValueError("a path needs at least an origin and a responder")
        for name, arr in (("steady_arrival", lss), ("total_arrival", lam),
                          ("burst_window", tb)):
            if arr.shape != mu.shape:
                raise ValueError(f"{name} length does not match node count")
        if links.shape != (n_nodes - 1,):
            raise ValueError(
                f"expected {n_nodes - 1} link delays for {n_nodes} nodes, got {links.shape[0]}")
        if labels is not None and len(labels) != n_nodes:
            raise ValueError("labels length does not match node count")
        if not (np.isfinite(mu).all() and (mu > 0.0).all()):
            raise ValueError("service rates must be finite and > 0")
        if not (np.isfinite(lss).all() and (lss >= 0.0).all()):
            raise ValueError("steady arrivals must be finite and >= 0")
        if not (np.isfinite(lam).all() and (lam >= lss).all()):
            raise ValueError("total arrivals must be finite and >= steady arrivals")
        if not (np.isfinite(tb).all() and (tb >= 0.0).all()):
            raise ValueError("burst windows must be finite and >= 0")
        if not (np.isfinite(links).all() and (links >= 0.0).all()):
            raise ValueError("link delays must be finite and >= 0")
        for arr in (mu, lss, lam, tb, links):
            arr.setflags(write=False)
        object.__setattr__(self, "service_rate", mu)
        object.__setattr__(self, "steady_arrival", lss)
        object.__setattr__(self, "total_arrival", lam)
        object.__setattr__(self, "burst_window", tb)
        object.__setattr__(self, "link_delays", links)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("PathSpec is immutable")

    @property
    def n_hops(self) -> int:
        """N: number of links (responder index)."""
        return self.link_delays.shape[0]

    def __len__(self) -> int:
        return self.service_rate.shape[0]

    def node(self, i: int) -> NodeLoadProfile:
        return NodeLoadProfile(
            service_rate=float(self.service_rate[i]),
            steady_arrival=float(self.steady_arrival[i]),
            total_arrival=float(self.total_arrival[i]),
            burst_window=float(self.burst_window[i]),
        )

    @property
    def nodes(self) -> tuple[NodeLoadProfile, ...]:
        """Materialised node profiles (intended for short paths)."""
        return tuple(self.node(i) for i in range(len(self)))

    @property
    def origin(self) -> NodeLoadProfile:
        return self.node(0)

    @property
    def responder(self) -> NodeLoadProfile:
        return self.node(len(self) - 1)

    def reversed(self) -> "PathSpec":
        labels = tuple(reversed(self.labels)) if self.labels is not None else None
        return PathSpec.from_arrays(
            self.service_rate[::-1].copy(), self.steady_arrival[::-1].copy(),
            self.total_arrival[::-1].copy(), self.burst_window[::-1].copy(),
            self.link_delays[::-1].copy(), labels)

    def with_responder_load(self, total_arrival: float | None = None,
                            burst_window: float | None = None) -> "PathSpec":
        """Copy of the path with the responder's burst parameters replaced."""
        lam = self.total_arrival.copy()
        tb = self.burst_window.copy()
        if total_arrival is not None:
            lam[-1] = total_arrival
        if burst_window is not None:
            tb[-1] = burst_window
        return PathSpec.from_arrays(self.service_rate.copy(), self.steady_arrival.copy(),
                                    lam, tb, self.link_delays.copy(), self.labels)


def steady_state_delay(profile: NodeLoadProfile) -> float:
    """M/M/1 sojourn 1 / (mu - lambda_ss); raises UnstableQueueError at mu <= lambda_ss."""
    mu, lss = profile.service_rate, profile.steady_arrival
    if mu <= lss:
        raise UnstableQueueError(
            f"steady arrivals ({lss}/s) saturate the service rate ({mu}/s); "
            f"steady-state delay is undefined")
    return 1.0 / (mu - lss)


def burst_arrival_rate(profile: NodeLoadProfile) -> float:
    """Burst portion of the arrival rate: 0 below saturation, lambda - lambda_ss at or above."""
    if profile.total_arrival < profile.service_rate:
        return 0.0
    return profile.total_arrival - profile.steady_arrival


def burst_delay(profile: NodeLoadProfile) -> float:
    """Drain time of the backlog a burst leaves behind, (lambda_brs - mu) * t_brs / mu.

    Zero when no burst exceeds the service rate; a burst rate between 0 and mu
    would make the expression negative, so it clamps to zero (see
    :func:`node_delay` for the flag recording that clamp).
    """
    lam_brs = burst_arrival_rate(profile)
    mu = profile.service_rate
    if lam_brs > mu:
        return (lam_brs - mu) * profile.burst_window / mu
    return 0.0


@dataclass(frozen=True)
class NodeDelay:
    """Per-node delay split with the negative-backlog clamp made visible."""

    steady: float
    burst: float
    burst_clamped: bool

    @property
    def total(self) -> float:
        return self.steady + self.burst


def node_delay(profile: NodeLoadProfile) -> NodeDelay:
    lam_brs = burst_arrival_rate(profile)
    clamped = 0.0 < lam_brs <= profile.service_rate
    return NodeDelay(steady=steady_state_delay(profile),
                     burst=burst_delay(profile),
                     burst_clamped=clamped)


def aggregated_delay(profile: NodeLoadProfile) -> float:
    """Steady-state plus burst delay of one node."""
    return steady_state_delay(profile) + burst_delay(profile)


@dataclass(frozen=True, eq=False)
class TimerBreakdown:
    """Per-term decomposition of one sized timer value."""

    rounds: int
    path_term: float            # bracket multiplied by R (one round's path cost)
    hop_aggregate_sum: float    # sum of intermediate-node aggregate delays
    propagation_sum: float      # propagation portion of the bracket
    origin_delay: float
    responder_delay: float
    origin_term: float          # alpha * origin_delay
    responder_term: float       # beta * responder_delay
    clamped_nodes: tuple[int, ...]
    value: float


def timer_breakdown(path: PathSpec, rounds: int,
                    weights: EndpointWeights) -> TimerBreakdown:
    """Evaluate the sizing formula over a path, keeping the per-term split.

    Single pass over the hops (a few vector operations), O(N) time.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    mu = path.service_rate
    lss = path.steady_arrival
    unstable = mu <= lss
    if unstable.any():
        idx = int(np.argmax(unstable))
        label = path.labels[idx] if path.labels is not None else None
        where = f" ({label})" if label else ""
        raise UnstableQueueError(
            f"node {idx}{where} is unstable: steady arrivals {lss[idx]}/s "
            f"at service rate {mu[idx]}/s", node_index=idx, node_label=label)

    # d_agg built with in-place ops: the pass stays two float64 scratch
    # arrays wide however long the path is.
    d_agg = mu - lss
    np.reciprocal(d_agg, out=d_agg)                      # steady-state term
    lam_brs = path.total_arrival - lss
    lam_brs[path.total_arrival < mu] = 0.0
    clamped = (lam_brs > 0.0) & (lam_brs <= mu)
    backlogged = lam_brs > mu
    np.subtract(lam_brs, mu, out=lam_brs, where=backlogged)
    np.multiply(lam_brs, path.burst_window, out=lam_brs, where=backlogged)
    np.divide(lam_brs, mu, out=lam_brs, where=backlogged)
    lam_brs[~backlogged] = 0.0                           # burst term, clamped
    d_agg += lam_brs

    links = path.link_delays
    # Bracket of the first term: D_prp<0,1> + sum_{i=1..N-1} (D_agg^i +
    # D_prp<i,i+1>) + D_prp<N-1,N>.
    hop_agg_sum = float(d_agg[1:-1].sum())
    prop_sum = float(links[0] + links[1:].sum() + links[-1])
    bracket = prop_sum + hop_agg_sum

    origin_delay = float(d_agg[0])
    responder_delay = float(d_agg[-1])
    origin_term = weights.alpha * origin_delay
    responder_term = weights.beta * responder_delay
    value = rounds * bracket + (rounds // 2 + 1) * (origin_term + responder_term)

    return TimerBreakdown(
        rounds=rounds,
        path_term=rounds * bracket,
        hop_aggregate_sum=hop_agg_sum,
        propagation_sum=prop_sum,
        origin_delay=origin_delay,
        responder_delay=responder_delay,
        origin_term=origin_term,
        responder_term=responder_term,
        clamped_nodes=tuple(int(i) for i in np.nonzero(clamped)[0]),
        value=float(value),
    )


def size_timer(path: PathSpec, rounds: int, weights: EndpointWeights) -> float:
    """Timer value (seconds) covering ``rounds`` message rounds over ``path``."""
    return timer_breakdown(path, rounds, weights).value


def size_registration_suite(path: PathSpec,
                            weights: EndpointWeights) -> SizedTimerSuite:
    """Size all four registration timers for a UE-to-AMF path.

    T3510 (5 rounds) and the T3511 backoff (0 rounds) run on the UE, so they
    use the path as given.  T3550 and T3560 run on the AMF awaiting UE
    responses, so they use the reversed path with the weights swapped to keep
    alpha on the UE and beta on the AMF.
    """
    t3510 = size_timer(path, 5, weights)
    t3511 = size_timer(path, 0, weights)
    reverse = path.reversed()
    amf_side = size_timer(reverse, 2, weights.reversed())
    return make_registration_suite(t3510=t3510, t3511=t3511,
                                   t3550=amf_side, t3560=amf_side)
