"""Unit and property tests for the closed-form timer sizing."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nastimer import (EndpointWeights, NodeLoadProfile, PathSpec, SizedTimer,
                      SizedTimerSuite, TimerKind, UnstableQueueError,
                      aggregated_delay, burst_arrival_rate, burst_delay,
                      make_registration_suite, node_delay,
                      size_registration_suite, size_timer, steady_state_delay,
                      timer_breakdown)


def profile(mu, lss=0.0, lam=None, tbrs=0.0):
    return NodeLoadProfile(service_rate=mu, steady_arrival=lss,
                           total_arrival=lam, burst_window=tbrs)


# ---------------------------------------------------------------------------
# steady_state_delay


def test_steady_state_intermediate_satellite():
    # 0.2 * 1.6667e7 spare capacity -> ~0.3 microseconds
    d = steady_state_delay(profile(1.6667e7, 0.8 * 1.6667e7))
    assert d == pytest.approx(1.0 / (0.2 * 1.6667e7), rel=1e-12)
    assert d == pytest.approx(3.0e-7, rel=1e-4)


def test_steady_state_amf_200ms():
    assert steady_state_delay(profile(25.0, 20.0)) == pytest.approx(0.2, rel=1e-12)


def test_steady_state_empty_queue():
    assert steady_state_delay(profile(1.0)) == 1.0


def test_steady_state_unstable_raises():
    with pytest.raises(UnstableQueueError):
        steady_state_delay(profile(10.0, 10.0))
    with pytest.raises(UnstableQueueError):
        steady_state_delay(profile(10.0, 11.0, 11.0))


# ---------------------------------------------------------------------------
# burst_arrival_rate / burst_delay


def test_burst_rate_below_capacity_is_zero():
    assert burst_arrival_rate(profile(100.0, 0.0, 10.0)) == 0.0


def test_burst_rate_above_capacity():
    lss = 100.0
    assert burst_arrival_rate(profile(325.2, lss, lss + 4.0e6)) == pytest.approx(4.0e6)


def test_burst_rate_exact_boundary():
    # lambda == mu falls in the saturated branch: lambda - lambda_ss
    assert burst_arrival_rate(profile(50.0, 50.0, 50.0)) == 0.0
    assert burst_arrival_rate(profile(50.0, 10.0, 50.0)) == 40.0


def test_burst_delay_worked_value():
    p = profile(325.2, 0.0, 4.0e6, 1e-3)
    assert burst_delay(p) == pytest.approx((4.0e6 - 325.2) * 1e-3 / 325.2, rel=1e-12)
    assert burst_delay(p) == pytest.approx(12.299, abs=1e-3)


def test_burst_delay_zero_below_capacity():
    assert burst_delay(profile(100.0, 0.0, 50.0, 1e-3)) == 0.0


def test_burst_delay_zero_backlog_boundary():
    # lambda_brs == mu leaves nothing behind
    assert burst_delay(profile(50.0, 0.0, 50.0, 1e-3)) == 0.0


def test_burst_delay_clamp_recorded():
    # saturated arrivals whose burst portion alone is below mu: negative
    # backlog clamps to zero and the breakdown flags it
    p = profile(100.0, 60.0, 130.0, 1e-3)
    assert burst_arrival_rate(p) == 70.0
    assert burst_delay(p) == 0.0
    d = node_delay(p)
    assert d.burst == 0.0 and d.burst_clamped
    assert not node_delay(profile(100.0, 0.0, 50.0)).burst_clamped


# ---------------------------------------------------------------------------
# aggregated_delay


def test_aggregated_is_sum():
    p = profile(25.0, 20.0, 20.0 + 4.0e6, 1e-3)
    assert aggregated_delay(p) == pytest.approx(
        steady_state_delay(p) + burst_delay(p), rel=1e-15)


def test_aggregated_zero_burst_equals_steady():
    p = profile(40.0, 10.0)
    assert aggregated_delay(p) == steady_state_delay(p)


def test_aggregated_satellite_negligible():
    assert aggregated_delay(profile(1.6667e7, 0.8 * 1.6667e7)) == pytest.approx(
        3.0e-7, rel=1e-4)


def test_aggregated_propagates_unstable():
    with pytest.raises(UnstableQueueError):
        aggregated_delay(profile(5.0, 6.0, 6.0))


# ---------------------------------------------------------------------------
# size_timer


def unit_path(origin, hops, responder, link=1e-3):
    nodes = [origin] + hops + [responder]
    return PathSpec(nodes, [link] * (len(nodes) - 1))


def test_size_timer_backoff_form():
    origin = profile(10.0, 2.0)
    responder = profile(20.0, 4.0)
    path = unit_path(origin, [profile(100.0)], responder, link=0.25)
    w = EndpointWeights(0.7, 1.3)
    expected = 0.7 * aggregated_delay(origin) + 1.3 * aggregated_delay(responder)
    assert size_timer(path, 0, w) == expected  # exact, first term vanishes


def test_size_timer_paper_style_watchdogs():
    # responder aggregate 12.5 s, origin contribution zero, tiny path delays
    responder = profile(0.08)               # 1 / 0.08 = 12.5 s
    path = unit_path(profile(1e30), [profile(1e30)], responder, link=0.0)
    w = EndpointWeights(0.0, 0.64)
    assert size_timer(path, 5, w) == pytest.approx(24.0, rel=1e-12)
    assert size_timer(path, 2, w) == pytest.approx(16.0, rel=1e-12)


def test_size_timer_unstable_names_node():
    path = unit_path(profile(10.0), [profile(5.0, 5.0)], profile(10.0))
    with pytest.raises(UnstableQueueError) as err:
        size_timer(path, 5, EndpointWeights(1.0, 1.0))
    assert err.value.node_index == 1


# ---------------------------------------------------------------------------
# size_registration_suite


def paper_style_path():
    responder = profile(0.08)
    return unit_path(profile(1e30), [profile(1e30)], responder, link=0.0)


def test_suite_reproduces_worked_values():
    suite = size_registration_suite(paper_style_path(), EndpointWeights(0.0, 0.64))
    assert suite.t3510.value == pytest.approx(24.0, rel=1e-9)
    assert suite.t3511.value == pytest.approx(8.0, rel=1e-9)
    assert suite.t3550.value == pytest.approx(16.0, rel=1e-9)
    assert suite.t3560.value == pytest.approx(16.0, rel=1e-9)
    assert suite.t3510.kind is TimerKind.WATCHDOG
    assert suite.t3511.kind is TimerKind.BACKOFF


def test_suite_zero_delays_all_zero():
    path = unit_path(profile(1e30), [profile(1e30)], profile(1e30), link=0.0)
    suite = size_registration_suite(path, EndpointWeights(1.0, 1.0))
    for t in (suite.t3510, suite.t3511, suite.t3550, suite.t3560):
        assert t.value == pytest.approx(0.0, abs=1e-25)


def test_suite_linear_in_beta():
    # with alpha * D0 = 0 and zero link delays, doubling beta doubles every timer
    path = paper_style_path()
    one = size_registration_suite(path, EndpointWeights(0.0, 0.4))
    two = size_registration_suite(path, EndpointWeights(0.0, 0.8))
    for a, b in zip(one.as_dict().values(), two.as_dict().values()):
        assert b == pytest.approx(2.0 * a, rel=1e-12)


def test_suite_amf_timers_use_reversed_path():
    # asymmetric endpoints: T3550/T3560 must weight the AMF with beta even
    # though the AMF is the origin of the reversed path
    ue = profile(1e30)
    amf = profile(0.08)
    path = unit_path(ue, [profile(1e30)], amf, link=0.0)
    w = EndpointWeights(0.0, 0.64)
    suite = size_registration_suite(path, w)
    assert suite.t3550.value == pytest.approx(2 * 0.64 * 12.5, rel=1e-9)
    assert suite.t3560.value == suite.t3550.value


# ---------------------------------------------------------------------------
# type invariants


def test_profile_validation():
    with pytest.raises(ValueError):
        NodeLoadProfile(service_rate=0.0)
    with pytest.raises(ValueError):
        NodeLoadProfile(service_rate=1.0, steady_arrival=-1.0)
    with pytest.raises(ValueError):
        NodeLoadProfile(service_rate=1.0, steady_arrival=2.0, total_arrival=1.0)
    with pytest.raises(ValueError):
        NodeLoadProfile(service_rate=1.0, burst_window=-1e-3)
    assert NodeLoadProfile(service_rate=1.0, steady_arrival=0.5).total_arrival == 0.5


def test_weights_validation():
    with pytest.raises(ValueError):
        EndpointWeights(-0.1, 0.0)
    with pytest.raises(ValueError):
        EndpointWeights(0.0, float("inf"))
    assert EndpointWeights(0.25, 0.75).reversed() == EndpointWeights(0.75, 0.25)


def test_sized_timer_invariants():
    with pytest.raises(ValueError):
        SizedTimer("T3511", TimerKind.BACKOFF, 2, 1.0)
    with pytest.raises(ValueError):
        SizedTimer("T3510", TimerKind.WATCHDOG, 5, -1.0)


def test_suite_invariants():
    ok = make_registration_suite(1.0, 2.0, 3.0, 4.0)
    assert ok.t3510.rounds == 5 and ok.t3550.rounds == 2
    with pytest.raises(ValueError):
        SizedTimerSuite(
            t3510=SizedTimer("T3510", TimerKind.WATCHDOG, 4, 1.0),
            t3511=SizedTimer("T3511", TimerKind.BACKOFF, 0, 1.0),
            t3550=SizedTimer("T3550", TimerKind.WATCHDOG, 2, 1.0),
            t3560=SizedTimer("T3560", TimerKind.WATCHDOG, 2, 1.0),
        )


def test_pathspec_validation_and_reversal():
    nodes = [profile(10.0, 1.0), profile(20.0, 2.0), profile(30.0, 3.0)]
    with pytest.raises(ValueError):
        PathSpec(nodes, [1e-3])             # wrong link count
    with pytest.raises(ValueError):
        PathSpec(nodes[:1], [])             # single node
    with pytest.raises(ValueError):
        PathSpec(nodes, [1e-3, -1e-3])      # negative delay
    path = PathSpec(nodes, [1e-3, 2e-3], labels=["a", "b", "c"])
    back = path.reversed()
    assert back.labels == ("c", "b", "a")
    assert list(back.link_delays) == [2e-3, 1e-3]
    assert back.origin.service_rate == 30.0
    with pytest.raises(AttributeError):
        path.link_delays = None
    with pytest.raises(ValueError):
        path.link_delays[0] = 5.0           # arrays are read-only


def test_pathspec_with_responder_load():
    path = PathSpec([profile(10.0), profile(20.0)], [1e-3])
    bumped = path.with_responder_load(total_arrival=4e6, burst_window=1e-3)
    assert bumped.responder.total_arrival == 4e6
    assert bumped.responder.burst_window == 1e-3
    assert path.responder.total_arrival == 0.0  # original untouched


# ---------------------------------------------------------------------------
# properties


def naive_resum(path, rounds, w):
    """Independent re-summation of the sizing formula, plain Python floats."""
    n = path.n_hops
    d_agg = []
    for i in range(n + 1):
        p = path.node(i)
        lam_brs = (0.0 if p.total_arrival < p.service_rate
                   else p.total_arrival - p.steady_arrival)
        if lam_brs > p.service_rate:
            brs = (lam_brs - p.service_rate) * p.burst_window / p.service_rate
        else:
            brs = 0.0
        d_agg.append(1.0 / (p.service_rate - p.steady_arrival) + brs)
    links = [float(d) for d in path.link_delays]
    bracket = links[0] + sum(d_agg[i] + links[i] for i in range(1, n)) + links[n - 1]
    return rounds * bracket + (rounds // 2 + 1) * (w.alpha * d_agg[0]
                                                   + w.beta * d_agg[n])


@st.composite
def random_paths(draw, max_hops=40):
    n_hops = draw(st.integers(min_value=1, max_value=max_hops))
    rates = st.floats(min_value=1.0, max_value=1e7)
    loads = st.floats(min_value=0.0, max_value=0.95)
    bursts = st.floats(min_value=0.0, max_value=1e7)
    windows = st.floats(min_value=0.0, max_value=0.01)
    nodes = []
    for _ in range(n_hops + 1):
        mu = draw(rates)
        lss = draw(loads) * mu
        nodes.append(NodeLoadProfile(service_rate=mu, steady_arrival=lss,
                                     total_arrival=lss + draw(bursts),
                                     burst_window=draw(windows)))
    links = [draw(st.floats(min_value=0.0, max_value=0.5))
             for _ in range(n_hops)]
    return PathSpec(nodes, links)


@settings(max_examples=120, deadline=None)
@given(path=random_paths(), rounds=st.integers(min_value=0, max_value=6),
       alpha=st.floats(min_value=0.0, max_value=3.0),
       beta=st.floats(min_value=0.0, max_value=3.0))
def test_oracle_equivalence(path, rounds, alpha, beta):
    w = EndpointWeights(alpha, beta)
    got = size_timer(path, rounds, w)
    want = naive_resum(path, rounds, w)
    assert got == pytest.approx(want, rel=1e-9, abs=1e-30)


@settings(max_examples=60, deadline=None)
@given(path=random_paths(max_hops=10),
       alpha=st.floats(min_value=0.0, max_value=2.0),
       beta=st.floats(min_value=0.0, max_value=2.0))
def test_affine_structure(path, alpha, beta):
    # T(R) = R * A + (floor(R/2) + 1) * B with A, B computed directly
    w = EndpointWeights(alpha, beta)
    bd = timer_breakdown(path, 1, w)
    a_coef = bd.path_term                                 # bracket (R = 1)
    b_coef = bd.origin_term + bd.responder_term
    for rounds in range(6):
        expected = rounds * a_coef + (rounds // 2 + 1) * b_coef
        assert size_timer(path, rounds, w) == pytest.approx(
            expected, rel=1e-12, abs=1e-30)


@settings(max_examples=60, deadline=None)
@given(path=random_paths(max_hops=8),
       rounds=st.integers(min_value=0, max_value=5),
       alpha=st.floats(min_value=0.0, max_value=2.0),
       beta=st.floats(min_value=0.0, max_value=2.0),
       bump=st.floats(min_value=1e-6, max_value=10.0))
def test_monotone_in_every_coefficient(path, rounds, alpha, beta, bump):
    w = EndpointWeights(alpha, beta)
    base = size_timer(path, rounds, w)
    assert size_timer(path, rounds + 1, w) >= base
    assert size_timer(path, rounds, EndpointWeights(alpha + bump, beta)) >= base
    assert size_timer(path, rounds, EndpointWeights(alpha, beta + bump)) >= base
    longer = PathSpec.from_arrays(
        path.service_rate.copy(), path.steady_arrival.copy(),
        path.total_arrival.copy(), path.burst_window.copy(),
        path.link_delays + bump)
    assert size_timer(longer, rounds, w) >= base
    # raising any node's aggregate delay (a bigger burst over a longer
    # window) never shrinks T
    lam = path.total_arrival + bump * path.service_rate
    heavier = PathSpec.from_arrays(path.service_rate.copy(),
                                   path.steady_arrival.copy(), lam,
                                   path.burst_window + bump,
                                   path.link_delays.copy())
    assert size_timer(heavier, rounds, w) >= base


@settings(max_examples=80, deadline=None)
@given(path=random_paths(max_hops=6),
       alpha=st.floats(min_value=0.0, max_value=2.0),
       beta=st.floats(min_value=0.0, max_value=2.0))
def test_backoff_consistency_exact(path, alpha, beta):
    w = EndpointWeights(alpha, beta)
    expected = (alpha * aggregated_delay(path.origin)
                + beta * aggregated_delay(path.responder))
    assert size_timer(path, 0, w) == expected


@settings(max_examples=100, deadline=None)
@given(mu=st.floats(min_value=1e-3, max_value=1e9),
       load=st.floats(min_value=0.0, max_value=0.999),
       burst=st.floats(min_value=0.0, max_value=1e9),
       window=st.floats(min_value=0.0, max_value=1.0))
def test_delay_terms_signs(mu, load, burst, window):
    p = NodeLoadProfile(service_rate=mu, steady_arrival=load * mu,
                        total_arrival=load * mu + burst, burst_window=window)
    assert burst_delay(p) >= 0.0
    assert steady_state_delay(p) > 0.0
