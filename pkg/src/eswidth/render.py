"""Scenario construction (localized / reverb / ensemble) and binaural rendering
under the integer-delay model and the HRIR-convolution model."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .dsp import SPEED_OF_SOUND, Signal, delay
from .hrir import DEFAULT_HEAD_RADIUS, HrirBank, itd_samples

KINDS = ("localized", "reverb", "ensemble")
MAX_DECORRELATION_S = 0.030  # per-channel random delay bound


@dataclass(frozen=True)
class SourceSpec:
    azimuth_deg: float
    gain: float
    delay_samples: int = 0


@dataclass(frozen=True)
class EnsembleSpec:
    """Scenario description driving rendering.

    kind 'localized': a single unit-gain source.
    kind 'reverb': a unit-gain source at the center plus attenuated (<= 0.5) ones.
    kind 'ensemble': near-equal gains (0.9..1.1) and per-channel decorrelation delays.
    """

    kind: str
    sources: tuple[SourceSpec, ...]
    center_deg: float
    seed: int
    sample_rate: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if not self.sources:
            raise ValueError("scenario has no sources")
        max_d = MAX_DECORRELATION_S * self.sample_rate
        for s in self.sources:
            if abs(s.delay_samples) > max_d:
                raise ValueError(
                    f"decorrelation delay {s.delay_samples} exceeds +-30 ms "
                    f"({max_d:.0f} samples at {self.sample_rate} Hz)"
                )
        gains = [s.gain for s in self.sources]
        if self.kind == "localized":
            if len(self.sources) != 1 or gains[0] != 1.0:
                raise ValueError("localized scenario must have exactly one unit-gain source")
        elif self.kind == "reverb":
            dominant = [s for s in self.sources if s.gain == 1.0]
            if len(dominant) != 1 or dominant[0].azimuth_deg != self.center_deg:
                raise ValueError("reverb scenario needs exactly one unit gain at the center")
            if any(s.gain > 0.5 for s in self.sources if s is not dominant[0]):
                raise ValueError("reverb attenuated gains must be <= 0.5")
        else:
            if any(not 0.9 <= g <= 1.1 for g in gains):
                raise ValueError("ensemble gains must lie in [0.9, 1.1]")

    @property
    def azimuths(self) -> tuple[float, ...]:
        return tuple(s.azimuth_deg for s in self.sources)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "center_deg": self.center_deg,
            "seed": self.seed,
            "sample_rate": self.sample_rate,
            "sources": [
                {"azimuth_deg": s.azimuth_deg, "gain": s.gain, "delay_samples": s.delay_samples}
                for s in self.sources
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "EnsembleSpec":
        try:
            sources = tuple(
                SourceSpec(float(s["azimuth_deg"]), float(s["gain"]), int(s["delay_samples"]))
                for s in doc["sources"]
            )
            return cls(
                kind=doc["kind"],
                sources=sources,
                center_deg=float(doc["center_deg"]),
                seed=int(doc["seed"]),
                sample_rate=int(doc["sample_rate"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed scenario document: {exc}") from exc


def save_scenario(spec: EnsembleSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_json(), indent=2))


def load_scenario(path) -> EnsembleSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed scenario document: {exc}") from exc
    return EnsembleSpec.from_json(doc)


def make_scenario(
    kind: str,
    center_deg: float,
    spread_deg: float,
    n_sources: int,
    seed: int,
    sample_rate: int = 48000,
) -> EnsembleSpec:
    """Uniformly spaced sources over [center - spread/2, center + spread/2].

    Gains follow the kind: unit for localized/ensemble, attenuated draws in
    [0.2, 0.5] (deterministic from the seed) for the non-dominant reverb
    sources.  Ensemble scenarios additionally draw +-30 ms decorrelation
    delays, rounded to integer samples.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown scenario kind {kind!r}")
    if n_sources < 1:
        raise ValueError("n_sources must be >= 1")
    if kind == "localized" and (n_sources != 1 or spread_deg != 0):
        raise ValueError("localized scenario requires n_sources=1 and spread_deg=0")
    if kind == "reverb" and n_sources % 2 == 0:
        raise ValueError("reverb scenario needs an odd source count (center must be occupied)")
    if n_sources == 1:
        azimuths = [float(center_deg)]
    else:
        offsets = np.linspace(-spread_deg / 2.0, spread_deg / 2.0, n_sources)
        azimuths = [round(float(center_deg + o), 9) for o in offsets]
    if any(not -90.0 <= a <= 90.0 for a in azimuths):
        raise ValueError("spread places a source outside the bank coverage [-90, 90]")

    rng = np.random.default_rng(seed)
    gains = [1.0] * n_sources
    delays = [0] * n_sources
    if kind == "reverb":
        mid = n_sources // 2  # odd count: the middle source sits at the center
        azimuths[mid] = float(center_deg)
        draws = iter(rng.uniform(0.2, 0.5, max(n_sources - 1, 1)))
        gains = [1.0 if i == mid else float(next(draws)) for i in range(n_sources)]
    elif kind == "ensemble":
        max_d = MAX_DECORRELATION_S * sample_rate
        delays = [int(d) for d in np.rint(rng.uniform(-max_d, max_d, n_sources))]
    sources = tuple(
        SourceSpec(a, g, d) for a, g, d in zip(azimuths, gains, delays)
    )
    return EnsembleSpec(kind, sources, float(center_deg), seed, sample_rate)


@dataclass(frozen=True)
class ItdScenario:
    """Per-source integer path delays for the two ears."""

    path_delays_left: tuple[int, ...]
    path_delays_right: tuple[int, ...]

    def __post_init__(self):
        if len(self.path_delays_left) != len(self.path_delays_right):
            raise ValueError("left/right delay counts differ")
        if any(d < 0 for d in self.path_delays_left + self.path_delays_right):
            raise ValueError("path delays must be non-negative")

    @property
    def delta_p(self) -> tuple[int, ...]:
        return tuple(r - l for l, r in zip(self.path_delays_left, self.path_delays_right))

    @classmethod
    def from_delta_ps(cls, delta_ps) -> "ItdScenario":
        left = tuple(max(-d, 0) for d in delta_ps)
        right = tuple(max(d, 0) for d in delta_ps)
        return cls(left, right)

    @classmethod
    def from_spec(
        cls,
        spec: EnsembleSpec,
        head_radius: float = DEFAULT_HEAD_RADIUS,
        speed_of_sound: float = SPEED_OF_SOUND,
    ) -> "ItdScenario":
        deltas = [
            itd_samples(s.azimuth_deg, spec.sample_rate, head_radius, speed_of_sound)
            for s in spec.sources
        ]
        return cls.from_delta_ps(deltas)


def decorrelate(s: Signal, spec: EnsembleSpec) -> list[Signal]:
    """Per-channel copies sigma_i * s(n - d_i); channel count equals the source count."""
    if s.sample_rate != spec.sample_rate:
        raise ValueError("sample-rate mismatch between signal and scenario")
    max_d = max((abs(src.delay_samples) for src in spec.sources), default=0)
    if max_d > 0.1 * len(s):
        raise ValueError("input too short: decorrelation shifts would lose >10% overlap")
    return [
        delay(s, src.delay_samples, len(s)).scaled(src.gain) for src in spec.sources
    ]


def render_itd(channels: list[Signal], scenario: ItdScenario) -> tuple[Signal, Signal]:
    """Sum of per-source delayed channels for each ear (pure integer delays)."""
    n_src = len(scenario.path_delays_left)
    if len(channels) != n_src:
        raise ValueError(f"channel count {len(channels)} != scenario source count {n_src}")
    fs = channels[0].sample_rate
    if any(c.sample_rate != fs for c in channels):
        raise ValueError("channels must share a sample rate")
    total = max(len(c) for c in channels) + max(
        scenario.path_delays_left + scenario.path_delays_right
    )
    x_l = np.zeros(total)
    x_r = np.zeros(total)
    for ch, p_l, p_r in zip(channels, scenario.path_delays_left, scenario.path_delays_right):
        x_l += delay(ch, p_l, total).samples
        x_r += delay(ch, p_r, total).samples
    return Signal(x_l, fs), Signal(x_r, fs)


def render_hrir(
    channels: list[Signal], spec: EnsembleSpec, bank: HrirBank
) -> tuple[Signal, Signal]:
    """Per-ear sum of per-source convolutions with the bank impulse responses.

    Every scenario azimuth must be present in the bank exactly; interpolation
    is out of scope.  Output length is channel length + ir_length - 1.
    """
    if len(channels) != len(spec.sources):
        raise ValueError(
            f"channel count {len(channels)} != scenario source count {len(spec.sources)}"
        )
    fs = channels[0].sample_rate
    if any(c.sample_rate != fs for c in channels) or fs != bank.sample_rate:
        raise ValueError("channels and bank must share a sample rate")
    entries = [bank.entry_at(s.azimuth_deg) for s in spec.sources]
    total = max(len(c) for c in channels) + bank.ir_length - 1
    x_l = np.zeros(total)
    x_r = np.zeros(total)
    # fixed ascending source order keeps the summation bit-reproducible
    for ch, entry in zip(channels, entries):
        left = fftconvolve(ch.samples, entry.left)
        right = fftconvolve(ch.samples, entry.right)
        x_l[: left.size] += left
        x_r[: right.size] += right
    return Signal(x_l, fs), Signal(x_r, fs)


def normalize_pair(x_l: Signal, x_r: Signal, peak: float = 0.9) -> tuple[Signal, Signal]:
    """Jointly scale a binaural pair so the largest |sample| equals peak."""
    top = max(float(np.max(np.abs(x_l.samples))), float(np.max(np.abs(x_r.samples))))
    if top == 0.0:
        return x_l, x_r
    g = peak / top
    return x_l.scaled(g), x_r.scaled(g)
