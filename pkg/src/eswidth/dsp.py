"""Signal containers and correlation primitives: cross-correlation, IACC, GCC-PHAT."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

SPEED_OF_SOUND = 343.0  # m/s, dry air around 20 C


def _as_samples(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled mono waveform (float64 samples at a fixed rate)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_samples(self.samples, "samples"))
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples))

    def scaled(self, gain: float) -> "Signal":
        return Signal(self.samples * gain, self.sample_rate)


@dataclass(frozen=True)
class CorrelationFunction:
    """Real sequence indexed by integer lag k over [lag_min, lag_max]."""

    values: np.ndarray
    lag_min: int
    lag_max: int
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "values", _as_samples(self.values, "values"))
        if self.lag_max - self.lag_min + 1 != self.values.size:
            raise ValueError("lag range does not match number of values")

    @property
    def lags(self) -> np.ndarray:
        return np.arange(self.lag_min, self.lag_max + 1)

    @property
    def argmax_lag(self) -> int:
        return int(self.lag_min + int(np.argmax(self.values)))

    def value_at(self, lag: int) -> float:
        if not self.lag_min <= lag <= self.lag_max:
            raise ValueError(f"lag {lag} outside [{self.lag_min}, {self.lag_max}]")
        return float(self.values[lag - self.lag_min])

    def window(self, max_lag: int) -> "CorrelationFunction":
        """Symmetric slice over lags |k| <= max_lag."""
        if max_lag < 0 or -max_lag < self.lag_min or max_lag > self.lag_max:
            raise ValueError(
                f"lag window +-{max_lag} exceeds support [{self.lag_min}, {self.lag_max}]"
            )
        i0 = -max_lag - self.lag_min
        return CorrelationFunction(
            self.values[i0 : i0 + 2 * max_lag + 1], -max_lag, max_lag, self.sample_rate
        )


@dataclass(frozen=True)
class IaccResult:
    """Normalized interaural cross-correlation, its maximum and the lag attaining it."""

    function: CorrelationFunction
    phi: float
    tau_at_max: int


def white_noise(length: int, sigma: float, seed: int, sample_rate: int = 48000) -> Signal:
    """Gaussian white noise, deterministic for a fixed seed (numpy PCG64)."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    return Signal(rng.normal(0.0, 1.0, length) * sigma, sample_rate)


def delay(x: Signal, d: int, total_length: int) -> Signal:
    """Shift x by d samples (negative = advance) into a zero-padded buffer.

    output[n] = x[n - d] wherever that index exists, zero elsewhere.
    """
    if total_length < 1:
        raise ValueError("total_length must be >= 1")
    out = np.zeros(total_length)
    src_lo = max(0, -d)
    src_hi = min(len(x), total_length - d)
    if src_hi > src_lo:
        out[src_lo + d : src_hi + d] = x.samples[src_lo:src_hi]
    return Signal(out, x.sample_rate)


def cross_correlation(x_r: Signal, x_l: Signal, max_lag: int) -> CorrelationFunction:
    """Unnormalized cross-correlation r(k) = sum_n x_r(n) * x_l(n - k).

    For x_r(n) = s(n - p_r), x_l(n) = s(n - p_l) with broadband s the peak
    sits at k = p_r - p_l.
    """
    if x_r.sample_rate != x_l.sample_rate:
        raise ValueError("sample-rate mismatch")
    if max_lag < 0 or max_lag >= min(len(x_r), len(x_l)):
        raise ValueError("max_lag must be non-negative and smaller than both signals")
    full = sps.correlate(x_r.samples, x_l.samples, mode="full", method="fft")
    # full lags run from -(len_l - 1) to +(len_r - 1); lag k sits at index k + len_l - 1
    i0 = -max_lag + len(x_l) - 1
    return CorrelationFunction(full[i0 : i0 + 2 * max_lag + 1], -max_lag, max_lag, x_r.sample_rate)


def iacc(x_l: Signal, x_r: Signal, max_lag: int) -> IaccResult:
    """Interaural cross-correlation normalized by the product of root energies.

    Returns the normalized function (values in [-1, 1]), its maximum phi and
    the lag at which the maximum occurs.
    """
    e_l = x_l.energy()
    e_r = x_r.energy()
    if e_l == 0.0 or e_r == 0.0:
        raise ValueError("iacc undefined for zero-energy input")
    raw = cross_correlation(x_r, x_l, max_lag)
    values = raw.values / np.sqrt(e_r * e_l)
    fn = CorrelationFunction(values, raw.lag_min, raw.lag_max, raw.sample_rate)
    idx = int(np.argmax(values))
    return IaccResult(function=fn, phi=float(values[idx]), tau_at_max=int(fn.lag_min + idx))


def gcc_phat(x_r: Signal, x_l: Signal, epsilon: float = 1e-8) -> CorrelationFunction:
    """Magnitude-whitened (phase transform) cross-correlation of x_r against x_l.

    The cross-spectrum X_r(w) X_l*(w) is divided by max(|X_r||X_l|, floor)
    where floor = epsilon * max bin magnitude, then inverse-transformed.  The
    scaling is such that the output has unit energy when no bin is floored.
    Lags are re-centered to [-N/2, N/2) for the internal FFT size N (next
    power of two >= twice the longer input, so the correlation is linear).
    """
    if x_r.sample_rate != x_l.sample_rate:
        raise ValueError("sample-rate mismatch")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = max(len(x_r), len(x_l))
    nfft = 1 << (2 * n - 1).bit_length()
    spec_r = np.fft.fft(x_r.samples, nfft)
    spec_l = np.fft.fft(x_l.samples, nfft)
    cross = spec_r * np.conj(spec_l)
    mag = np.abs(spec_r) * np.abs(spec_l)
    peak = float(mag.max())
    if peak == 0.0:
        raise ValueError("gcc_phat undefined: inputs have no energy (whole spectrum floored)")
    whitened = cross / np.maximum(mag, epsilon * peak)
    rho = np.real(np.fft.ifft(whitened))
    values = np.concatenate([rho[nfft // 2 :], rho[: nfft // 2]])
    return CorrelationFunction(values, -(nfft // 2), nfft // 2 - 1, x_r.sample_rate)
