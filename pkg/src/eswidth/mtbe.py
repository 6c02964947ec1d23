"""Timbre-dependent perceptual weight: cosine-modulated Gaussian filterbank with
critical-bandwidth time spreads, patch energies, and (weighted) mean
time-bandwidth energy in dB."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import oaconvolve

from .dsp import Signal

LOW_BAND_EDGE_HZ = 800.0
MID_BAND_EDGE_HZ = 5000.0
HIGH_BAND_EDGE_HZ = 16000.0
DEFAULT_BAND_WEIGHTS = {"low": 1.0, "mid": 0.5, "high": 1.0}
DEFAULT_FLOOR_FACTOR = 1e-12  # of the global mean patch energy


def critical_bandwidth(f: float) -> float:
    """Zwicker analytic critical bandwidth in Hz: 25 + 75 (1 + 1.4 (f/1000)^2)^0.69."""
    if f <= 0:
        raise ValueError("frequency must be positive")
    return 25.0 + 75.0 * (1.0 + 1.4 * (f / 1000.0) ** 2) ** 0.69


@dataclass(frozen=True)
class GaborFilterSpec:
    """Cosine-modulated Gaussian filter: time spread is 1/CB at the center."""

    center_hz: float
    time_spread_s: float
    length: int  # odd, +-3 time spreads
    band: str  # low | mid | high


def filter_centers_hz() -> np.ndarray:
    """Center grid: 10..800 by 10, 900..5000 by 100, 5500..16000 by 500 Hz."""
    low = np.arange(10.0, LOW_BAND_EDGE_HZ + 1, 10.0)
    mid = np.arange(900.0, MID_BAND_EDGE_HZ + 1, 100.0)
    high = np.arange(5500.0, HIGH_BAND_EDGE_HZ + 1, 500.0)
    return np.concatenate([low, mid, high])


def build_filterbank(sample_rate: int) -> list[GaborFilterSpec]:
    if sample_rate < 32000:
        raise ValueError("sample_rate must be >= 32 kHz (16 kHz band below Nyquist)")
    bank = []
    for f in filter_centers_hz():
        spread = 1.0 / critical_bandwidth(f)
        half = round(3.0 * spread * sample_rate)
        band = "low" if f <= LOW_BAND_EDGE_HZ else ("mid" if f <= MID_BAND_EDGE_HZ else "high")
        bank.append(GaborFilterSpec(float(f), spread, 2 * half + 1, band))
    return bank


def gabor_kernel(spec: GaborFilterSpec, sample_rate: int) -> np.ndarray:
    half = (spec.length - 1) // 2
    t = np.arange(-half, half + 1) / sample_rate
    return np.exp(-(t**2) / (2.0 * spec.time_spread_s**2)) * np.cos(
        2.0 * np.pi * spec.center_hz * t
    )


@dataclass(frozen=True)
class TimeBandEnergy:
    """Non-overlapping patch energies per filter; trailing partial patches dropped."""

    energies: tuple[np.ndarray, ...]
    patch_lengths: tuple[int, ...]
    counts: tuple[int, ...]

    @property
    def n_filters(self) -> int:
        return len(self.energies)


def patch_energies(s: Signal, bank: list[GaborFilterSpec]) -> TimeBandEnergy:
    """Filter the signal with each Gabor kernel and sum squares over contiguous
    patches of one time spread each."""
    if not bank:
        raise ValueError("empty filterbank")
    patch_lengths = [round(spec.time_spread_s * s.sample_rate) for spec in bank]
    if len(s) < max(patch_lengths):
        raise ValueError("signal shorter than one patch of the lowest-frequency filter")
    energies = []
    counts = []
    for spec, patch in zip(bank, patch_lengths):
        y = oaconvolve(s.samples, gabor_kernel(spec, s.sample_rate), mode="same")
        m = len(s) // patch
        e = (y[: m * patch] ** 2).reshape(m, patch).sum(axis=1)
        energies.append(e)
        counts.append(m)
    return TimeBandEnergy(tuple(energies), tuple(patch_lengths), tuple(counts))


@dataclass(frozen=True)
class MtbeResult:
    e_m_db: float
    e_m_w_db: float
    band_means_db: dict[str, float]
    per_filter_means_db: np.ndarray
    centers_hz: np.ndarray
    k: int
    relative_score_percent: float | None = None

    def to_json(self) -> dict:
        return {
            "e_m_db": self.e_m_db,
            "e_m_w_db": self.e_m_w_db,
            "bands": self.band_means_db,
            "k": self.k,
            "per_filter": [
                {"center_hz": float(f), "mean_db": float(m)}
                for f, m in zip(self.centers_hz, self.per_filter_means_db)
            ],
        }


def band_weights(
    bank: list[GaborFilterSpec],
    low: float = DEFAULT_BAND_WEIGHTS["low"],
    mid: float = DEFAULT_BAND_WEIGHTS["mid"],
    high: float = DEFAULT_BAND_WEIGHTS["high"],
) -> np.ndarray:
    """Expand per-band weights to one weight per filter."""
    table = {"low": low, "mid": mid, "high": high}
    return np.array([table[spec.band] for spec in bank])


def _mean_tbe(s: Signal, weights: np.ndarray | None, energy_floor: float | None) -> MtbeResult:
    bank = build_filterbank(s.sample_rate)
    k = len(bank)
    if weights is None:
        weights = np.ones(k)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size != k:
        raise ValueError(f"expected {k} weights, got {weights.size}")
    if np.any(weights <= 0):
        raise ValueError("weights must be positive")
    if s.energy() == 0.0:
        raise ValueError("signal has no energy")
    tbe = patch_energies(s, bank)
    if energy_floor is None:
        global_mean = float(np.mean(np.concatenate(tbe.energies)))
        energy_floor = DEFAULT_FLOOR_FACTOR * global_mean
    if energy_floor <= 0:
        raise ValueError("energy_floor must be positive")
    per_filter = np.array(
        [float(np.mean(10.0 * np.log10(np.maximum(e, energy_floor)))) for e in tbe.energies]
    )
    uniform = np.ones(k) / k
    normalized = weights / weights.sum()
    bands: dict[str, float] = {}
    for name in ("low", "mid", "high"):
        mask = np.array([spec.band == name for spec in bank])
        bands[name] = float(np.mean(per_filter[mask]))
    return MtbeResult(
        e_m_db=float(uniform @ per_filter),
        e_m_w_db=float(normalized @ per_filter),
        band_means_db=bands,
        per_filter_means_db=per_filter,
        centers_hz=np.array([spec.center_hz for spec in bank]),
        k=k,
    )


def mtbe(s: Signal, energy_floor: float | None = None) -> MtbeResult:
    """Mean time-bandwidth energy: per-filter mean of 10 log10 patch energies,
    averaged uniformly over the bank.

    Silent patches are floored at energy_floor (default 1e-12 of the global
    mean patch energy), so impulsive signals average far below sustained ones
    of equal total energy.
    """
    return _mean_tbe(s, None, energy_floor)


def mtbe_weighted(s: Signal, weights, energy_floor: float | None = None) -> MtbeResult:
    """Weighted variant: the uniform 1/K mean is replaced by weights normalized
    to sum one.  Uniform weights reproduce mtbe exactly."""
    return _mean_tbe(s, weights, energy_floor)


def relative_scores(values: dict[str, float], reference_max_percent: float = 100.0) -> dict[str, float]:
    """Map dB values to percent: the maximum goes to reference_max_percent and
    dB differences become proportional percent ratios (20 dB per decade)."""
    if not values:
        raise ValueError("values must be non-empty")
    if reference_max_percent <= 0:
        raise ValueError("reference_max_percent must be positive")
    v_max = max(values.values())
    return {
        name: reference_max_percent * 10.0 ** ((v - v_max) / 20.0) for name, v in values.items()
    }
