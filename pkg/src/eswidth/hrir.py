"""HRIR banks: synthetic spherical-head generation, JSON interchange, and the
per-direction correlation bases (magnitude filters and phase-only functions)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dsp import SPEED_OF_SOUND, CorrelationFunction, Signal, cross_correlation, gcc_phat

DEFAULT_HEAD_RADIUS = 0.0875  # m
DEFAULT_SHADOW_F0 = 8000.0  # Hz, head-shadow cutoff at the front
DEFAULT_SHADOW_FMIN = 500.0  # Hz, cutoff floor at the side


@dataclass(frozen=True)
class HrirEntry:
    azimuth_deg: float
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class HrirBank:
    """Azimuth-indexed left/right impulse-response pairs, strictly increasing azimuths."""

    sample_rate: int
    entries: tuple[HrirEntry, ...]

    def __post_init__(self):
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        if not self.entries:
            raise ValueError("bank has no entries")
        azimuths = [e.azimuth_deg for e in self.entries]
        for a, b in zip(azimuths, azimuths[1:]):
            if a == b:
                raise ValueError(f"duplicate azimuth {a}")
            if a > b:
                raise ValueError("non-monotone azimuths")
        length = self.entries[0].left.size
        for e in self.entries:
            if e.left.size != e.right.size or e.left.size != length:
                raise ValueError(f"left/right length mismatch at azimuth {e.azimuth_deg}")
            if e.left.size < 1:
                raise ValueError("impulse responses must be non-empty")
            if not (np.all(np.isfinite(e.left)) and np.all(np.isfinite(e.right))):
                raise ValueError(f"non-finite impulse response at azimuth {e.azimuth_deg}")

    @property
    def azimuths(self) -> tuple[float, ...]:
        return tuple(e.azimuth_deg for e in self.entries)

    @property
    def ir_length(self) -> int:
        return int(self.entries[0].left.size)

    def entry_at(self, azimuth_deg: float, tol: float = 1e-6) -> HrirEntry:
        for e in self.entries:
            if abs(e.azimuth_deg - azimuth_deg) <= tol:
                return e
        raise ValueError(f"azimuth {azimuth_deg} not in bank (no interpolation)")


@dataclass(frozen=True)
class DirectionalBasis:
    """One correlation function per bank azimuth; kind is 'magnitude' or 'phase_only'."""

    kind: str
    sample_rate: int
    azimuths: tuple[float, ...]
    functions: tuple[CorrelationFunction, ...]

    def __post_init__(self):
        if self.kind not in ("magnitude", "phase_only"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if len(self.azimuths) != len(self.functions) or not self.functions:
            raise ValueError("azimuths and functions must be non-empty and match")
        lag_range = (self.functions[0].lag_min, self.functions[0].lag_max)
        for fn in self.functions:
            if (fn.lag_min, fn.lag_max) != lag_range:
                raise ValueError("basis functions must share a common lag range")


def woodworth_itd(
    azimuth_deg: float,
    head_radius: float = DEFAULT_HEAD_RADIUS,
    speed_of_sound: float = SPEED_OF_SOUND,
) -> float:
    """Spherical-head far-field arrival-time difference in seconds (magnitude).

    tau(theta) = (a / c) * (sin|theta| + |theta|), theta in radians.
    """
    th = math.radians(abs(azimuth_deg))
    return head_radius / speed_of_sound * (math.sin(th) + th)


def itd_samples(
    azimuth_deg: float,
    sample_rate: int,
    head_radius: float = DEFAULT_HEAD_RADIUS,
    speed_of_sound: float = SPEED_OF_SOUND,
) -> int:
    """Signed right-minus-left path difference in samples after per-ear rounding.

    The delay is split evenly between the ears and each half is rounded, so the
    total is 2 * round(tau * fs / 2); negative for sources on the right.
    """
    half = round(woodworth_itd(azimuth_deg, head_radius, speed_of_sound) * sample_rate / 2.0)
    return -2 * half if azimuth_deg > 0 else 2 * half


def synth_spherical_bank(
    grid_step: float = 5.0,
    head_radius: float = DEFAULT_HEAD_RADIUS,
    ir_length: int = 256,
    sample_rate: int = 48000,
    shadow_f0: float = DEFAULT_SHADOW_F0,
    shadow_fmin: float = DEFAULT_SHADOW_FMIN,
    speed_of_sound: float = SPEED_OF_SOUND,
) -> HrirBank:
    """Synthetic spherical-head bank over the frontal half-plane [-90, +90].

    Per azimuth the Woodworth delay is split antisymmetrically between the
    ears (integer samples).  The contralateral ear additionally passes a
    causal one-pole low-pass whose cutoff f0*(1+cos|theta|)/2 + fmin falls as
    |theta| grows; its direction-dependent phase is what lets the phase-only
    basis tell apart azimuths whose rounded delays coincide.  At 0 degrees the
    two ears are identical deltas.
    """
    if not 0 < grid_step <= 30:
        raise ValueError("grid_step must be in (0, 30]")
    if head_radius <= 0:
        raise ValueError("head_radius must be positive")
    half_max = round(woodworth_itd(90.0, head_radius, speed_of_sound) * sample_rate / 2.0)
    base = half_max
    if ir_length < 2 * half_max + 2:
        raise ValueError(
            f"ir_length={ir_length} too short to hold the maximum interaural delay "
            f"({2 * half_max} samples)"
        )
    n_steps = int(round(90.0 / grid_step))
    azimuths = [round(i * grid_step, 9) for i in range(-n_steps, n_steps + 1)]
    azimuths = [a for a in azimuths if -90.0 <= a <= 90.0]

    entries = []
    for az in azimuths:
        half = round(woodworth_itd(az, head_radius, speed_of_sound) * sample_rate / 2.0)
        near = np.zeros(ir_length)
        near[base - half] = 1.0
        if az == 0.0:
            entries.append(HrirEntry(az, near.copy(), near.copy()))
            continue
        cutoff = shadow_f0 * (1.0 + math.cos(math.radians(abs(az)))) / 2.0 + shadow_fmin
        pole = math.exp(-2.0 * math.pi * cutoff / sample_rate)
        far = np.zeros(ir_length)
        start = base + half
        far[start:] = (1.0 - pole) * pole ** np.arange(ir_length - start)
        if az > 0:
            entries.append(HrirEntry(az, left=far, right=near))
        else:
            entries.append(HrirEntry(az, left=near, right=far))
    return HrirBank(sample_rate=sample_rate, entries=tuple(entries))


def save_bank(bank: HrirBank, path) -> None:
    doc = {
        "sample_rate": bank.sample_rate,
        "ir_length": bank.ir_length,
        "entries": [
            {"azimuth_deg": e.azimuth_deg, "left": e.left.tolist(), "right": e.right.tolist()}
            for e in bank.entries
        ],
    }
    Path(path).write_text(json.dumps(doc))


def load_bank(path) -> HrirBank:
    """Load a bank manifest, validating structure before construction."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed bank manifest: {exc}") from exc
    if not isinstance(doc, dict) or "sample_rate" not in doc or "entries" not in doc:
        raise ValueError("malformed bank manifest: missing sample_rate or entries")
    raw = doc["entries"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("malformed bank manifest: entries must be a non-empty list")
    seen: set[float] = set()
    prev = None
    ir_length = doc.get("ir_length")
    entries = []
    for item in raw:
        try:
            az = float(item["azimuth_deg"])
            left = np.asarray(item["left"], dtype=np.float64)
            right = np.asarray(item["right"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed bank manifest entry: {exc}") from exc
        if az in seen:
            raise ValueError(f"duplicate azimuth {az}")
        seen.add(az)
        if prev is not None and az < prev:
            raise ValueError("non-monotone azimuths")
        prev = az
        if left.size != right.size or (ir_length is not None and left.size != ir_length):
            raise ValueError(f"left/right length mismatch at azimuth {az}")
        entries.append(HrirEntry(az, left, right))
    return HrirBank(sample_rate=int(doc["sample_rate"]), entries=tuple(entries))


def magnitude_basis(bank: HrirBank, max_lag: int) -> DirectionalBasis:
    """Per-azimuth cross-correlation of right against left impulse response."""
    if max_lag >= bank.ir_length:
        raise ValueError("max_lag must be smaller than the impulse-response length")
    functions = []
    for e in bank.entries:
        r = Signal(e.right, bank.sample_rate)
        l = Signal(e.left, bank.sample_rate)
        functions.append(cross_correlation(r, l, max_lag))
    return DirectionalBasis("magnitude", bank.sample_rate, bank.azimuths, tuple(functions))


def phase_basis(bank: HrirBank, epsilon: float = 1e-8) -> DirectionalBasis:
    """Per-azimuth GCC-PHAT of right against left impulse response (unit energy each)."""
    functions = []
    for e in bank.entries:
        r = Signal(e.right, bank.sample_rate)
        l = Signal(e.left, bank.sample_rate)
        functions.append(gcc_phat(r, l, epsilon))
    return DirectionalBasis("phase_only", bank.sample_rate, bank.azimuths, tuple(functions))
