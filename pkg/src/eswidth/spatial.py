"""Spatial correlation transforms over an azimuth grid, the time-varying
spatiogram, peak detection, angular width, and a lag-domain spread measure."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dsp import CorrelationFunction, Signal, gcc_phat
from .hrir import DirectionalBasis

DEFAULT_LAG_WINDOW_S = 0.001  # +-1 ms projection window
DEFAULT_SILENCE_DB = 60.0  # frames this far below the loudest frame emit zero rows


@dataclass(frozen=True)
class SpatialCorrelation:
    """Values of the correlation transform over the basis azimuth grid."""

    azimuths: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "azimuths", np.asarray(self.azimuths, dtype=np.float64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.azimuths.size != self.values.size or self.azimuths.size == 0:
            raise ValueError("azimuths and values must be non-empty and match")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values contain non-finite entries")

    @property
    def argmax_azimuth(self) -> float:
        return float(self.azimuths[int(np.argmax(self.values))])


@dataclass(frozen=True)
class Spatiogram:
    """Framewise phase-only spatial correlation: frames x azimuths."""

    frame_times: np.ndarray
    azimuths: np.ndarray
    values: np.ndarray
    frame_length: int
    hop: int

    def __post_init__(self):
        if self.values.shape != (self.frame_times.size, self.azimuths.size):
            raise ValueError("values matrix does not match frame/azimuth axes")

    @property
    def n_frames(self) -> int:
        return int(self.frame_times.size)

    def active_frames(self) -> np.ndarray:
        """Boolean mask of frames that were above the silence threshold."""
        return np.any(self.values != 0.0, axis=1)


@dataclass(frozen=True)
class WidthEstimate:
    peaks: tuple[tuple[float, float], ...]  # (azimuth_deg, value), ascending azimuth
    angular_width_deg: float
    mode: str

    def to_json(self) -> dict:
        return {
            "peaks": [{"azimuth_deg": a, "value": v} for a, v in self.peaks],
            "angular_width_deg": self.angular_width_deg,
            "mode": self.mode,
        }


def _default_window(sample_rate: int) -> int:
    return int(round(DEFAULT_LAG_WINDOW_S * sample_rate))


def _project(
    r: CorrelationFunction, basis: DirectionalBasis, lag_window: int | None, kind: str
) -> SpatialCorrelation:
    if basis.kind != kind:
        raise ValueError(f"basis kind {basis.kind!r} does not match transform {kind!r}")
    if r.sample_rate != basis.sample_rate:
        raise ValueError("sample-rate mismatch between correlation and basis")
    w = _default_window(r.sample_rate) if lag_window is None else int(lag_window)
    rv = r.window(w).values
    values = np.array([fn.window(w).values @ rv for fn in basis.functions])
    return SpatialCorrelation(np.array(basis.azimuths), values, kind)


def spatial_correlation(
    r: CorrelationFunction, basis: DirectionalBasis, lag_window: int | None = None
) -> SpatialCorrelation:
    """Project a magnitude correlation onto the per-direction correlation filters.

    C(theta) = sum over |k| <= lag_window of r(k) * r_theta(k).
    """
    return _project(r, basis, lag_window, "magnitude")


def posc(
    rho: CorrelationFunction, basis: DirectionalBasis, lag_window: int | None = None
) -> SpatialCorrelation:
    """Phase-only spatial correlation: project binaural GCC-PHAT onto the
    per-direction GCC-PHAT functions.

    C_rho(theta) = sum over |k| <= lag_window of rho(k) * rho_theta(k).
    """
    return _project(rho, basis, lag_window, "phase_only")


def spatiogram(
    x_l: Signal,
    x_r: Signal,
    basis: DirectionalBasis,
    frame_ms: float = 80.0,
    overlap: float = 0.5,
    epsilon: float = 1e-8,
    lag_window: int | None = None,
    silence_db: float = DEFAULT_SILENCE_DB,
) -> Spatiogram:
    """Framewise phase-only spatial correlation with Hann-windowed frames.

    Frames whose energy falls silence_db below the loudest frame are emitted
    as all-zero rows.  Each active row equals the standalone projection of the
    identically extracted and windowed frame.
    """
    if x_l.sample_rate != x_r.sample_rate:
        raise ValueError("sample-rate mismatch")
    fs = x_l.sample_rate
    frame_length = int(round(frame_ms / 1000.0 * fs))
    if not 0 < overlap < 1:
        raise ValueError("overlap must lie in (0, 1)")
    hop = int(round(frame_length * (1.0 - overlap)))
    n = min(len(x_l), len(x_r))
    if n < frame_length:
        raise ValueError("signal shorter than one frame")
    n_frames = (n - frame_length) // hop + 1
    window = np.hanning(frame_length)

    starts = [m * hop for m in range(n_frames)]
    energies = np.array(
        [
            float(np.dot(x_l.samples[a : a + frame_length], x_l.samples[a : a + frame_length]))
            + float(np.dot(x_r.samples[a : a + frame_length], x_r.samples[a : a + frame_length]))
            for a in starts
        ]
    )
    threshold = energies.max() * 10.0 ** (-silence_db / 10.0)

    rows = np.zeros((n_frames, len(basis.azimuths)))
    for m, a in enumerate(starts):
        if energies[m] < threshold or energies[m] == 0.0:
            continue
        frame_l = Signal(x_l.samples[a : a + frame_length] * window, fs)
        frame_r = Signal(x_r.samples[a : a + frame_length] * window, fs)
        rho = gcc_phat(frame_r, frame_l, epsilon)
        rows[m] = posc(rho, basis, lag_window).values
    times = (np.array(starts) + frame_length / 2.0) / fs
    return Spatiogram(times, np.array(basis.azimuths), rows, frame_length, hop)


def _local_maxima(values: np.ndarray) -> list[int]:
    """Indices of local maxima; plateaus report their lowest index, and the
    grid boundaries count (compared against their single neighbor)."""
    n = values.size
    out = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if i == 0 and j == n - 1:  # flat input: no strict maxima
            break
        left_ok = i == 0 or values[i - 1] < values[i]
        right_ok = j == n - 1 or values[j + 1] < values[i]
        if left_ok and right_ok:
            out.append(i)
        i = j + 1
    return out


def detect_peaks(
    c: SpatialCorrelation,
    count: int | None = None,
    rel_threshold: float = 0.5,
    min_separation_deg: float = 10.0,
) -> WidthEstimate:
    """Source peaks of a spatial correlation curve.

    With count given (known source count) the `count` largest local maxima are
    kept.  Otherwise automatic mode keeps maxima at least rel_threshold of the
    global maximum, greedily by descending value, suppressing candidates
    closer than min_separation_deg to an accepted peak.
    """
    if count is not None and count < 1:
        raise ValueError("count must be >= 1")
    if count is None and not 0 < rel_threshold < 1:
        raise ValueError("rel_threshold must lie in (0, 1)")
    cands = _local_maxima(c.values)
    cands.sort(key=lambda i: -c.values[i])
    picked: list[int] = []
    if count is not None:
        mode = "known_count"
        picked = cands[:count]
    else:
        mode = "automatic"
        floor = rel_threshold * float(np.max(c.values)) if c.values.size else 0.0
        for i in cands:
            if c.values[i] < floor:
                break
            if all(abs(c.azimuths[i] - c.azimuths[j]) >= min_separation_deg for j in picked):
                picked.append(i)
    peaks = tuple(
        sorted(((float(c.azimuths[i]), float(c.values[i])) for i in picked))
    )
    return WidthEstimate(peaks, angular_width([a for a, _ in peaks]), mode)


def angular_width(peak_azimuths) -> float:
    """Azimuth difference between the extreme peaks; 0 for one peak or none."""
    azimuths = list(peak_azimuths)
    if len(azimuths) <= 1:
        return 0.0
    return float(max(azimuths) - min(azimuths))


def dispersion(c: CorrelationFunction) -> float:
    """Magnitude-weighted second-moment spread of a correlation function, in samples.

    sqrt( sum (k - kbar)^2 |v_k| / sum |v_k| ) with kbar the |v|-weighted mean lag.
    """
    weights = np.abs(c.values)
    total = float(weights.sum())
    if total == 0.0:
        raise ValueError("dispersion undefined for an all-zero correlation")
    lags = c.lags
    kbar = float((lags * weights).sum()) / total
    return math.sqrt(float(((lags - kbar) ** 2 * weights).sum()) / total)


def centroid_lag(c: CorrelationFunction, max_lag: int | None = None) -> float:
    """|v|-weighted mean lag, optionally restricted to |k| <= max_lag."""
    fn = c if max_lag is None else c.window(max_lag)
    weights = np.abs(fn.values)
    total = float(weights.sum())
    if total == 0.0:
        raise ValueError("centroid undefined for an all-zero correlation")
    return float((fn.lags * weights).sum()) / total


def write_spatial_csv(c: SpatialCorrelation, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["azimuth_deg", "value"])
        for a, v in zip(c.azimuths, c.values):
            writer.writerow([repr(float(a)), repr(float(v))])


def write_spatiogram_csv(sg: Spatiogram, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s"] + [repr(float(a)) for a in sg.azimuths])
        for t, row in zip(sg.frame_times, sg.values):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
