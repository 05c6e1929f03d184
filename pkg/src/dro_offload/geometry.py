"""Network geometry and deterministic per-bit delay/energy coefficients.

Everything here is in linear SI units: meters, Hz, watts, bits/s, joules.
dB-to-linear conversion happens at config-parse time, never here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError


@dataclass(frozen=True)
class Position3D:
    """Cartesian coordinates in meters; z is altitude above ground."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ConfigError("position coordinates must be finite")
        if self.z < 0:
            raise ConfigError(f"altitude must be >= 0, got {self.z}")

    def to_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class RadioParams:
    """Link-budget parameters, all linear and strictly positive."""

    ref_gain_td_uav: float
    ref_gain_uav_hap: float
    bandwidth_td_uav: float
    bandwidth_uav_hap: float
    noise_power: float
    tx_power_td: float
    tx_power_uav: float

    def __post_init__(self):
        for name, value in vars(self).items():
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"radio parameter {name} must be > 0, got {value}")


@dataclass(frozen=True)
class ComputeParams:
    uav_capability: float  # cycles/s
    hap_capability: float  # cycles/s
    uav_cycles_per_bit: float
    hap_cycles_per_bit: float

    def __post_init__(self):
        for name, value in vars(self).items():
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"compute parameter {name} must be > 0, got {value}")


@dataclass(frozen=True)
class EnergyParams:
    uav_basic: float  # J
    hap_basic: float  # J
    uav_chip_coeff: float  # J*s^2/cycle^3
    hap_chip_coeff: float  # J*s^2/cycle^3
    uav_budget: float  # J
    hap_budget: float  # J
    uav_relay_power: float  # W

    def __post_init__(self):
        if self.uav_chip_coeff < 0 or self.hap_chip_coeff < 0:
            raise ConfigError("chip coefficients must be >= 0")
        if not self.uav_budget > self.uav_basic:
            raise ConfigError("UAV energy budget must exceed its basic cost")
        if not self.hap_budget > self.hap_basic:
            raise ConfigError("HAP energy budget must exceed its basic cost")
        if not self.uav_relay_power > 0:
            raise ConfigError("UAV relay power must be > 0")


def euclidean_distance(a: Position3D, b: Position3D) -> float:
    """Straight-line distance in meters between two nodes."""
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def channel_gain(ref_gain: float, distance: float) -> float:
    """Inverse-square line-of-sight gain: ref_gain * distance**-2."""
    if distance <= 0:
        raise ConfigError(f"distance must be > 0, got {distance}")
    return ref_gain / (distance * distance)


def link_rate(bandwidth: float, tx_power: float, gain: float, noise: float) -> float:
    """Shannon rate B*log2(1 + p*g/sigma^2) in bits/s.

    A zero gain is allowed and yields a zero rate (the zero-SNR limit).
    """
    if bandwidth <= 0:
        raise ConfigError(f"bandwidth must be > 0, got {bandwidth}")
    if noise <= 0:
        raise ConfigError(f"noise power must be > 0, got {noise}")
    if tx_power <= 0:
        raise ConfigError(f"tx power must be > 0, got {tx_power}")
    if gain < 0:
        raise ConfigError(f"gain must be >= 0, got {gain}")
    return bandwidth * math.log2(1.0 + tx_power * gain / noise)


@dataclass(frozen=True)
class Scenario:
    """Immutable snapshot of the physical network.

    Rate matrices are precomputed from geometry at construction and shared
    read-only by all solvers and evaluation workers.
    """

    tds: tuple[Position3D, ...]
    uavs: tuple[Position3D, ...]
    hap: Position3D
    radio: RadioParams
    compute: ComputeParams
    energy: EnergyParams
    quota_uav: int
    quota_hap: int
    rate_td_uav: np.ndarray = field(repr=False)  # I x J, bits/s
    rate_uav_hap: np.ndarray = field(repr=False)  # J, bits/s

    def __post_init__(self):
        if len(self.tds) < 1 or len(self.uavs) < 1:
            raise ConfigError("scenario needs at least one TD and one UAV")
        if self.quota_uav < 0 or self.quota_hap < 0:
            raise ConfigError("quotas must be >= 0")
        if self.rate_td_uav.shape != (self.num_tds, self.num_uavs):
            raise ShapeError("rate_td_uav shape mismatch")
        if self.rate_uav_hap.shape != (self.num_uavs,):
            raise ShapeError("rate_uav_hap shape mismatch")
        if not (self.rate_td_uav > 0).all() or not (self.rate_uav_hap > 0).all():
            raise ConfigError("all link rates must be strictly positive")
        self.rate_td_uav.setflags(write=False)
        self.rate_uav_hap.setflags(write=False)

    @property
    def num_tds(self) -> int:
        return len(self.tds)

    @property
    def num_uavs(self) -> int:
        return len(self.uavs)

    @classmethod
    def build(
        cls,
        tds: list[Position3D],
        uavs: list[Position3D],
        hap: Position3D,
        radio: RadioParams,
        compute: ComputeParams,
        energy: EnergyParams,
        quota_uav: int,
        quota_hap: int,
    ) -> "Scenario":
        """Construct a scenario, deriving the rate matrices from geometry."""
        rate_td_uav = np.array(
            [
                [
                    link_rate(
                        radio.bandwidth_td_uav,
                        radio.tx_power_td,
                        channel_gain(radio.ref_gain_td_uav, euclidean_distance(td, uav)),
                        radio.noise_power,
                    )
                    for uav in uavs
                ]
                for td in tds
            ]
        )
        rate_uav_hap = np.array(
            [
                link_rate(
                    radio.bandwidth_uav_hap,
                    radio.tx_power_uav,
                    channel_gain(radio.ref_gain_uav_hap, euclidean_distance(uav, hap)),
                    radio.noise_power,
                )
                for uav in uavs
            ]
        )
        return cls(
            tds=tuple(tds),
            uavs=tuple(uavs),
            hap=hap,
            radio=radio,
            compute=compute,
            energy=energy,
            quota_uav=quota_uav,
            quota_hap=quota_hap,
            rate_td_uav=rate_td_uav,
            rate_uav_hap=rate_uav_hap,
        )

    def to_dict(self) -> dict:
        return {
            "tds": [p.to_tuple() for p in self.tds],
            "uavs": [p.to_tuple() for p in self.uavs],
            "hap": self.hap.to_tuple(),
            "radio": vars(self.radio).copy(),
            "compute": vars(self.compute).copy(),
            "energy": vars(self.energy).copy(),
            "quota_uav": self.quota_uav,
            "quota_hap": self.quota_hap,
            "rate_td_uav": self.rate_td_uav.tolist(),
            "rate_uav_hap": self.rate_uav_hap.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(
            tds=tuple(Position3D(*p) for p in data["tds"]),
            uavs=tuple(Position3D(*p) for p in data["uavs"]),
            hap=Position3D(*data["hap"]),
            radio=RadioParams(**data["radio"]),
            compute=ComputeParams(**data["compute"]),
            energy=EnergyParams(**data["energy"]),
            quota_uav=int(data["quota_uav"]),
            quota_hap=int(data["quota_hap"]),
            rate_td_uav=np.array(data["rate_td_uav"], dtype=float),
            rate_uav_hap=np.array(data["rate_uav_hap"], dtype=float),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class DelayEnergyCoeffs:
    """Per-bit delay (s/bit) and energy (J/bit) coefficients.

    access_delay is I x J; all other arrays are indexed by UAV j.
    The relay path delay bundles the UAV->HAP hop with the HAP compute
    stage, since a relayed bit always traverses both.
    """

    access_delay: np.ndarray
    uav_compute_delay: np.ndarray
    relay_path_delay: np.ndarray
    uav_relay_energy: np.ndarray
    uav_compute_energy: np.ndarray
    hap_compute_energy: float


def per_bit_coefficients(scenario: Scenario) -> DelayEnergyCoeffs:
    """Collapse rates, capabilities, and chip coefficients into per-bit costs."""
    cp, en = scenario.compute, scenario.energy
    uav_compute_delay = np.full(
        scenario.num_uavs, cp.uav_cycles_per_bit / cp.uav_capability
    )
    hap_compute_delay = cp.hap_cycles_per_bit / cp.hap_capability
    relay_path_delay = 1.0 / scenario.rate_uav_hap + hap_compute_delay
    # beta * C^3 * (lambda/C) = beta * C^2 * lambda joules per bit
    uav_compute_energy = np.full(
        scenario.num_uavs,
        en.uav_chip_coeff * cp.uav_capability**2 * cp.uav_cycles_per_bit,
    )
    hap_compute_energy = en.hap_chip_coeff * cp.hap_capability**2 * cp.hap_cycles_per_bit
    return DelayEnergyCoeffs(
        access_delay=1.0 / scenario.rate_td_uav,
        uav_compute_delay=uav_compute_delay,
        relay_path_delay=relay_path_delay,
        uav_relay_energy=en.uav_relay_power / scenario.rate_uav_hap,
        uav_compute_energy=uav_compute_energy,
        hap_compute_energy=hap_compute_energy,
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of a random scenario to generate."""

    num_tds: int
    num_uavs: int
    area_size: float  # side of the square deployment area, meters
    uav_altitude: float
    hap_position: Position3D
    radio: RadioParams
    compute: ComputeParams
    energy: EnergyParams
    quota_uav: int
    quota_hap: int

    def __post_init__(self):
        if self.num_tds < 1:
            raise ConfigError(f"num_tds must be >= 1, got {self.num_tds}")
        if self.num_uavs < 1:
            raise ConfigError(f"num_uavs must be >= 1, got {self.num_uavs}")
        if not self.area_size > 0:
            raise ConfigError(f"area_size must be > 0, got {self.area_size}")
        if not self.uav_altitude > 0:
            raise ConfigError(f"uav_altitude must be > 0, got {self.uav_altitude}")


def generate_scenario(config: ScenarioConfig, seed: int) -> Scenario:
    """Place TDs and UAVs uniformly at random in the configured square.

    Deterministic for a given (config, seed) pair.
    """
    rng = np.random.default_rng([int(seed), 0x6E0])
    td_xy = rng.uniform(0.0, config.area_size, size=(config.num_tds, 2))
    uav_xy = rng.uniform(0.0, config.area_size, size=(config.num_uavs, 2))
    tds = [Position3D(x, y, 0.0) for x, y in td_xy]
    uavs = [Position3D(x, y, config.uav_altitude) for x, y in uav_xy]
    return Scenario.build(
        tds=tds,
        uavs=uavs,
        hap=config.hap_position,
        radio=config.radio,
        compute=config.compute,
        energy=config.energy,
        quota_uav=config.quota_uav,
        quota_hap=config.quota_hap,
    )
