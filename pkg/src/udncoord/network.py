"""Random dense deployments and noise-power normalized channel gains.

Access nodes (ANs) and user terminals (UEs) are dropped uniformly over a
square area and linked by a log-distance path-loss model. Channel gains are
normalized by the full-system-bandwidth thermal noise power, so that noise
appears as 1 in every SINR denominator downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

# Far-field clamp: links shorter than this are evaluated at this distance,
# which removes the d -> 0 singularity of the power law.
MIN_LINK_DISTANCE_M = 1.0

INSTANCE_SCHEMA = "udncoord-instance-v1"


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("power must be positive")
    return 10.0 * np.log10(watts) + 30.0


@dataclass(frozen=True)
class SystemConfig:
    """Deployment geometry, propagation and radio constants.

    Defaults: 1 km^2 area, path-loss exponent 4, 30 dBm per-pair power
    budget, -174 dBm/Hz noise density over 10 MHz. The log-distance
    intercept defaults to -22.5 dB at the 1 m clamp distance, which puts a
    30 dBm link at roughly 30 dB SNR at 100 m and near the noise floor at
    the cell edge; a 0 dB intercept would leave the whole deployment deep in
    the interference-limited regime where bandwidth partitioning cannot pay
    for its reuse loss.
    """

    area_side: float = 1000.0
    pathloss_exponent: float = 4.0
    p_max: float = 1.0
    noise_density: float = 10.0 ** -20.4
    system_bandwidth: float = 1.0e7
    reference_gain_at_1m: float = 10.0 ** -2.25
    rng_seed: int = 0

    def __post_init__(self):
        if self.area_side <= 0:
            raise ValueError("area_side must be positive")
        if self.pathloss_exponent <= 0:
            raise ValueError("pathloss_exponent must be positive")
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")
        if self.noise_density <= 0:
            raise ValueError("noise_density must be positive")
        if self.system_bandwidth <= 0:
            raise ValueError("system_bandwidth must be positive")
        if self.reference_gain_at_1m <= 0:
            raise ValueError("reference_gain_at_1m must be positive")

    @property
    def noise_power(self) -> float:
        """Thermal noise power over the full system bandwidth, in watts."""
        return self.noise_density * self.system_bandwidth

    def with_seed(self, seed: int) -> "SystemConfig":
        return replace(self, rng_seed=int(seed))

    def to_json_dict(self) -> dict:
        return {
            "area_side": self.area_side,
            "pathloss_exponent": self.pathloss_exponent,
            "p_max": self.p_max,
            "noise_density": self.noise_density,
            "system_bandwidth": self.system_bandwidth,
            "reference_gain_at_1m": self.reference_gain_at_1m,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SystemConfig":
        return cls(**data)


@dataclass(frozen=True, eq=False)
class Deployment:
    """AN and UE positions in meters, each an (count, 2) array."""

    an_positions: np.ndarray
    ue_positions: np.ndarray

    def __post_init__(self):
        for name in ("an_positions", "ue_positions"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
                raise ValueError(f"{name} must be a (count, 2) array with count >= 1")
            object.__setattr__(self, name, arr)

    @property
    def m_count(self) -> int:
        return self.an_positions.shape[0]

    @property
    def k_count(self) -> int:
        return self.ue_positions.shape[0]


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """A deployment together with its noise-normalized gain matrix.

    ``gains[k, m]`` is the dimensionless linear gain from UE k to AN m,
    already divided by the receiver noise power.
    """

    deployment: Deployment
    gains: np.ndarray
    config: SystemConfig

    @property
    def m_count(self) -> int:
        return self.deployment.m_count

    @property
    def k_count(self) -> int:
        return self.deployment.k_count


def generate_deployment(m_count: int, k_count: int, config: SystemConfig) -> Deployment:
    """Drop ``m_count`` ANs and ``k_count`` UEs i.i.d. uniform over the square.

    Deterministic per ``config.rng_seed``: the same seed reproduces the same
    positions bit for bit. AN positions are drawn before UE positions.
    """
    if m_count < 1 or k_count < 1:
        raise ValueError("m_count and k_count must be >= 1")
    rng = np.random.default_rng(config.rng_seed)
    an = rng.uniform(0.0, config.area_side, size=(m_count, 2))
    ue = rng.uniform(0.0, config.area_side, size=(k_count, 2))
    return Deployment(an_positions=an, ue_positions=ue)


def link_distances(deployment: Deployment) -> np.ndarray:
    """Euclidean UE-to-AN distance matrix of shape (K, M)."""
    diff = deployment.ue_positions[:, None, :] - deployment.an_positions[None, :, :]
    return np.linalg.norm(diff, axis=2)


def compute_gains(deployment: Deployment, config: SystemConfig) -> NetworkInstance:
    """Noise-normalized log-distance gains for every UE/AN link.

    g[k, m] = reference_gain_at_1m * d^(-alpha) / (noise_density * bandwidth),
    with the link distance clamped below at 1 m.
    """
    d = np.maximum(link_distances(deployment), MIN_LINK_DISTANCE_M)
    raw = config.reference_gain_at_1m * d ** (-config.pathloss_exponent)
    gains = raw / config.noise_power
    return NetworkInstance(deployment=deployment, gains=gains, config=config)


def generate_instance(m_count: int, k_count: int, config: SystemConfig) -> NetworkInstance:
    """Generate a deployment and its gain matrix in one step."""
    return compute_gains(generate_deployment(m_count, k_count, config), config)


def save_instance(instance: NetworkInstance, path) -> None:
    """Serialize an instance to the documented JSON schema."""
    payload = {
        "schema": INSTANCE_SCHEMA,
        "config": instance.config.to_json_dict(),
        "an_positions": instance.deployment.an_positions.tolist(),
        "ue_positions": instance.deployment.ue_positions.tolist(),
        "gains": instance.gains.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True))


def load_instance(path) -> NetworkInstance:
    """Load an instance saved by :func:`save_instance`."""
    data = json.loads(Path(path).read_text())
    if data.get("schema") != INSTANCE_SCHEMA:
        raise ValueError(f"unrecognized instance schema in {path}")
    config = SystemConfig.from_json_dict(data["config"])
    deployment = Deployment(
        an_positions=np.asarray(data["an_positions"], dtype=float),
        ue_positions=np.asarray(data["ue_positions"], dtype=float),
    )
    gains = np.asarray(data["gains"], dtype=float)
    if gains.shape != (deployment.k_count, deployment.m_count):
        raise ValueError("gain matrix shape does not match the deployment")
    if not np.all(np.isfinite(gains)) or np.any(gains <= 0):
        raise ValueError("gains must be strictly positive and finite")
    return NetworkInstance(deployment=deployment, gains=gains, config=config)
