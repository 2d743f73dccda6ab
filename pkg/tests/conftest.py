import math

import pytest

from uavtc import scenario as scenario_mod
from uavtc.network import NetworkModel

F_DEFAULT = 14
OMEGA_DEFAULT = 2.0


def rayleigh_beta_for_mu(mu: float, omega: float = OMEGA_DEFAULT,
                         F: int = F_DEFAULT) -> float:
    """Invert the best-of-F transmit probability for a Rayleigh link."""
    cdf = (1.0 - mu) ** (1.0 / F)
    return math.sqrt(-omega * math.log(1.0 - cdf))


def single_node_dict(gamma_th: float = 1e-9, fading: str = "rayleigh",
                     num_slots: int = 200_000, seed: int = 7,
                     t_th: float = 0.08, b_eta: float = 100.0) -> dict:
    """One transmitter, one receiver, no interferers."""
    return {
        "name": "single",
        "seed": seed,
        "environment": {"zeta": 20.0, "v": 3.0e-4, "mu": 0.5, "area_side": 100.0},
        "radio": {"carrier_freq": 2.4e9, "d0": 10.0, "alpha_los": 2.0,
                  "alpha_nlos": 3.5, "k_los": 15.0, "k_nlos": 1.0,
                  "omega": OMEGA_DEFAULT, "num_channels": F_DEFAULT,
                  "tx_power": 0.5},
        "traffic": {"lambda_n": 80.0, "t_slt": 0.005, "t_th": t_th,
                    "b_eta": b_eta},
        "interference": {"gamma_th": gamma_th, "temperature": 290.0,
                         "bandwidth": 2.0e7, "moment_samples": 100_000,
                         "moment_seed": 11},
        "nodes": [
            {"id": "n0", "position": [50.0, 50.0, 1.5], "role": "source",
             "link_target": "uav", "fading": fading},
            {"id": "uav", "position": [50.0, 40.0, 40.0], "role": "uav-main"},
        ],
        "beta": {"n0": 1.0},
        "sim": {"num_slots": num_slots, "warmup_slots": 2000, "seed": seed},
    }


@pytest.fixture(scope="session")
def table1():
    sc = scenario_mod.load("bundled:table1")
    return sc, NetworkModel(sc)


@pytest.fixture(scope="session")
def desk3():
    sc = scenario_mod.load("bundled:desk3")
    return sc, NetworkModel(sc)
