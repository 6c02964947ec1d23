"""Listening-test stimulus construction: the R10/R100 anchors, per-source
narrow and test renderings, and the stimulus-set manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as sps

from .dsp import Signal, white_noise
from .hrir import HrirBank, load_bank
from .render import EnsembleSpec, SourceSpec, decorrelate, make_scenario, normalize_pair, render_hrir
from .wavio import read_mono, write_wav

MANIFEST_NAME = "stimuli.json"
DEFAULT_DURATION_S = 15.0
# 150 cm array at 1 m listening distance: atan(0.75) per side
DEFAULT_R100_SPAN_DEG = 73.74
R10_CUTOFF_HZ = 8000.0
R10_STOPBAND_DB = 60.0
WIDEBAND_EDGE_HZ = 20000.0


@dataclass(frozen=True)
class StimulusSpec:
    id: str
    role: str  # test | r10 | r100 | narrow
    path: str
    scenario: EnsembleSpec | None
    source_name: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "role": self.role,
            "path": self.path,
            "scenario": self.scenario.to_json() if self.scenario else None,
            "source_name": self.source_name,
        }


@dataclass(frozen=True)
class StimulusSet:
    sample_rate: int
    seed: int
    stimuli: tuple[StimulusSpec, ...]

    @property
    def test_ids(self) -> list[str]:
        return [s.id for s in self.stimuli if s.role == "test"]

    @property
    def references(self) -> dict[str, str]:
        by_role = {s.role: s.id for s in self.stimuli if s.role in ("r10", "r100", "narrow")}
        return {
            "r10_id": by_role.get("r10", ""),
            "r100_id": by_role.get("r100", ""),
            "narrow_id": by_role.get("narrow", ""),
        }

    def by_id(self, stimulus_id: str) -> StimulusSpec:
        for s in self.stimuli:
            if s.id == stimulus_id:
                return s
        raise KeyError(stimulus_id)


def snap_to_grid(azimuth_deg: float, grid) -> float:
    grid = np.asarray(grid, dtype=np.float64)
    return float(grid[int(np.argmin(np.abs(grid - azimuth_deg)))])


def r100_scenario(bank: HrirBank, span_deg: float, n_sources: int, seed: int) -> EnsembleSpec:
    """Maximum-width anchor: n sources spanning span_deg, snapped onto the bank grid."""
    offsets = np.linspace(-span_deg / 2.0, span_deg / 2.0, n_sources)
    azimuths = []
    for o in offsets:
        a = snap_to_grid(float(o), bank.azimuths)
        if a in azimuths:
            raise ValueError("r100 span too narrow for the bank grid (duplicate azimuth)")
        azimuths.append(a)
    rng = np.random.default_rng(seed)
    max_d = 0.030 * bank.sample_rate
    delays = [int(d) for d in np.rint(rng.uniform(-max_d, max_d, n_sources))]
    sources = tuple(SourceSpec(a, 1.0, d) for a, d in zip(azimuths, delays))
    return EnsembleSpec("ensemble", sources, 0.0, seed, bank.sample_rate)


def _fit_duration(s: Signal, duration_s: float) -> Signal:
    target = int(round(duration_s * s.sample_rate))
    if len(s) > target:
        return Signal(s.samples[:target], s.sample_rate)
    return s


def _render_spec(source: Signal, spec: EnsembleSpec, bank: HrirBank) -> tuple[Signal, Signal]:
    channels = decorrelate(source, spec)
    return normalize_pair(*render_hrir(channels, spec, bank))


def _r10_source(duration_s: float, fs: int, seed: int) -> Signal:
    noise = white_noise(int(round(duration_s * fs)), 1.0, seed, fs)
    sos_hp = sps.cheby2(8, R10_STOPBAND_DB, R10_CUTOFF_HZ, btype="highpass", fs=fs, output="sos")
    x = sps.sosfilt(sos_hp, noise.samples)
    if WIDEBAND_EDGE_HZ < fs / 2:
        sos_lp = sps.butter(8, WIDEBAND_EDGE_HZ, btype="lowpass", fs=fs, output="sos")
        x = sps.sosfilt(sos_lp, x)
    return Signal(x, fs)


def _wideband_source(duration_s: float, fs: int, seed: int) -> Signal:
    noise = white_noise(int(round(duration_s * fs)), 1.0, seed, fs)
    if WIDEBAND_EDGE_HZ < fs / 2:
        sos_lp = sps.butter(8, WIDEBAND_EDGE_HZ, btype="lowpass", fs=fs, output="sos")
        return Signal(sps.sosfilt(sos_lp, noise.samples), fs)
    return noise


def load_config(path) -> dict:
    try:
        config = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed config: {exc}") from exc
    if "signals" not in config or not config["signals"]:
        raise ValueError("config must name at least one entry under 'signals'")
    return config


def build_stimuli(config: dict, out_dir, bank: HrirBank | None = None) -> StimulusSet:
    """Render the full stimulus set described by a config dict into out_dir.

    Config keys: signals (list of {name, wav} or {name, noise_seed}), seed,
    duration_s, test_scenario {kind, center_deg, spread_deg, n_sources},
    r100_span_deg, narrow_signal, bank (path, unless a bank object is given).
    """
    if not config.get("signals"):
        raise ValueError("config must name at least one entry under 'signals'")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if bank is None:
        if "bank" not in config:
            raise ValueError("config needs a 'bank' path when no bank is supplied")
        bank = load_bank(config["bank"])
    fs = bank.sample_rate
    seed = int(config.get("seed", 0))
    duration = float(config.get("duration_s", DEFAULT_DURATION_S))
    scen_cfg = config.get(
        "test_scenario",
        {"kind": "ensemble", "center_deg": 0.0, "spread_deg": 30.0, "n_sources": 3},
    )
    span = float(config.get("r100_span_deg", DEFAULT_R100_SPAN_DEG))

    sources: dict[str, Signal] = {}
    for item in config["signals"]:
        name = item["name"]
        if "wav" in item:
            s = read_mono(item["wav"])
            if s.sample_rate != fs:
                raise ValueError(
                    f"signal {name!r} sample rate {s.sample_rate} != bank rate {fs}"
                )
        elif "noise_seed" in item:
            s = white_noise(int(round(duration * fs)), 1.0, int(item["noise_seed"]), fs)
        else:
            raise ValueError(f"signal {name!r} needs either a 'wav' path or a 'noise_seed'")
        sources[name] = _fit_duration(s, duration)

    stimuli: list[StimulusSpec] = []

    def emit(stim_id: str, role: str, pair: tuple[Signal, Signal], scenario, source_name: str):
        path = out_dir / f"{stim_id}.wav"
        write_wav(path, [pair[0], pair[1]])
        stimuli.append(StimulusSpec(stim_id, role, path.name, scenario, source_name))

    # R10 anchor: high-passed noise from a single near-center source
    r10_spec = make_scenario("localized", 0.0, 0.0, 1, seed, fs)
    emit("r10", "r10", _render_spec(_r10_source(duration, fs, seed), r10_spec, bank), r10_spec, "noise")

    # R100 anchor: wideband noise over the widest ensemble
    r100_spec = r100_scenario(bank, span, 6, seed + 1)
    emit(
        "r100",
        "r100",
        _render_spec(_wideband_source(duration, fs, seed + 1), r100_spec, bank),
        r100_spec,
        "noise",
    )

    # narrow reference: single-channel rendering of the designated source
    narrow_name = config.get("narrow_signal", config["signals"][0]["name"])
    if narrow_name not in sources:
        raise ValueError(f"narrow_signal {narrow_name!r} is not one of the configured signals")
    narrow_spec = make_scenario("localized", 0.0, 0.0, 1, seed, fs)
    emit("narrow", "narrow", _render_spec(sources[narrow_name], narrow_spec, bank), narrow_spec, narrow_name)

    # test stimuli: one scenario per source signal
    for i, item in enumerate(config["signals"]):
        name = item["name"]
        spec = make_scenario(
            scen_cfg.get("kind", "ensemble"),
            float(scen_cfg.get("center_deg", 0.0)),
            float(scen_cfg.get("spread_deg", 30.0)),
            int(scen_cfg.get("n_sources", 3)),
            seed + 10 + i,
            fs,
        )
        emit(f"test-{name}", "test", _render_spec(sources[name], spec, bank), spec, name)

    stim_set = StimulusSet(fs, seed, tuple(stimuli))
    manifest = {
        "sample_rate": fs,
        "seed": seed,
        "stimuli": [s.to_json() for s in stim_set.stimuli],
    }
    (out_dir / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2))
    return stim_set


def load_stimulus_set(stimulus_dir) -> StimulusSet:
    stimulus_dir = Path(stimulus_dir)
    manifest_path = stimulus_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise ValueError(f"no {MANIFEST_NAME} in {stimulus_dir}")
    doc = json.loads(manifest_path.read_text())
    stimuli = tuple(
        StimulusSpec(
            id=item["id"],
            role=item["role"],
            path=item["path"],
            scenario=EnsembleSpec.from_json(item["scenario"]) if item["scenario"] else None,
            source_name=item["source_name"],
        )
        for item in doc["stimuli"]
    )
    return StimulusSet(int(doc["sample_rate"]), int(doc["seed"]), stimuli)
