"""Shared builders for the stress scenario used across sim and acceptance tests."""

import pytest

from nastimer import (EndpointWeights, NodeLoadProfile, make_registration_suite,
                      size_registration_suite, synth_path)

# AMF service rate solved so that steady + burst delay is exactly 12.5 s for
# a 4000-registration burst in a 1 ms window at 80 % steady load:
# (5 + (4e6 - mu) * 1e-3) / mu = 12.5  =>  mu = 4005 / 12.501.
AMF_MU = 4005.0 / 12.501
BURST_WINDOW = 1e-3

SAT_PROFILE = NodeLoadProfile(service_rate=1.6667e7, steady_arrival=0.8 * 1.6667e7)
UE_PROFILE = NodeLoadProfile(service_rate=1e9)


def amf_profile(n_ues: int) -> NodeLoadProfile:
    """AMF under 80% steady load plus an n_ues registration burst per window."""
    return NodeLoadProfile(
        service_rate=AMF_MU,
        steady_arrival=0.8 * AMF_MU,
        total_arrival=0.8 * AMF_MU + n_ues / BURST_WINDOW,
        burst_window=BURST_WINDOW,
    )


def stress_path(n_ues: int):
    """UE -> two relay satellites -> AMF, 3 ms links."""
    return synth_path(3, 3e-3, SAT_PROFILE, UE_PROFILE, amf_profile(n_ues))


def astro_suite(path):
    return size_registration_suite(path, EndpointWeights(0.0, 0.64))


def gpp_suite():
    return make_registration_suite(27.0, 18.0, 10.8, 10.8)


@pytest.fixture
def snapshot_doc():
    """Small well-formed snapshot document for reader tests."""
    return {
        "timestamp": 12.0,
        "nodes": [
            {"id": "ue1", "role": "ue", "service_rate": 1e9},
            {"id": "sat1", "role": "leo_satellite", "service_rate": 1e7,
             "steady_arrival": 8e6},
            {"id": "sat2", "role": "leo_satellite", "service_rate": 1e7,
             "steady_arrival": 8e6},
            {"id": "amf1", "role": "core_nf", "service_rate": 300.0,
             "steady_arrival": 240.0, "total_arrival": 4000240.0,
             "burst_window": 0.001, "_note": "stressed"},
        ],
        "links": [
            {"a": "ue1", "b": "sat1", "delay_s": 0.003},
            {"a": "sat1", "b": "sat2", "delay_s": 0.004},
            {"a": "sat1", "b": "amf1", "delay_s": 0.009},
            {"a": "sat2", "b": "amf1", "delay_s": 0.002, "_kind": "feeder"},
        ],
    }
