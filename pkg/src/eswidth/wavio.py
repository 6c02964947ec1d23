"""RIFF WAV I/O: 16-bit PCM and 32-bit float, mono and stereo.  Samples are
handled as float64 internally and scaled to [-1, 1]."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .dsp import Signal

_PCM16_SCALE = 32767.0


def read_wav(path) -> list[Signal]:
    """Read a WAV file and return one Signal per channel (left first)."""
    path = Path(path)
    if not path.exists():
        raise ValueError(f"unreadable file: {path}")
    try:
        fs, data = wavfile.read(path)
    except Exception as exc:
        raise ValueError(f"not a readable WAV file: {path} ({exc})") from exc
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / _PCM16_SCALE
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483647.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV sample format {data.dtype} in {path}")
    if samples.ndim == 1:
        samples = samples[:, None]
    return [Signal(samples[:, ch], fs) for ch in range(samples.shape[1])]


def write_wav(path, channels, fmt: str = "float32") -> None:
    """Write one or more equal-length channels as a WAV file.

    fmt 'float32' writes IEEE float; 'pcm16' clips to [-1, 1] and scales.
    """
    if isinstance(channels, Signal):
        channels = [channels]
    if not channels:
        raise ValueError("no channels to write")
    fs = channels[0].sample_rate
    n = len(channels[0])
    if any(c.sample_rate != fs or len(c) != n for c in channels):
        raise ValueError("channels must share sample rate and length")
    data = np.stack([c.samples for c in channels], axis=1)
    if data.shape[1] == 1:
        data = data[:, 0]
    if fmt == "float32":
        wavfile.write(Path(path), fs, data.astype(np.float32))
    elif fmt == "pcm16":
        clipped = np.clip(data, -1.0, 1.0)
        wavfile.write(Path(path), fs, np.round(clipped * _PCM16_SCALE).astype(np.int16))
    else:
        raise ValueError(f"unsupported format {fmt!r} (use 'float32' or 'pcm16')")


def read_stereo(path) -> tuple[Signal, Signal]:
    """Read a stereo WAV as (left, right)."""
    chans = read_wav(path)
    if len(chans) != 2:
        raise ValueError(f"expected a stereo WAV, got {len(chans)} channel(s): {path}")
    return chans[0], chans[1]


def read_mono(path) -> Signal:
    """Read a mono WAV; a single channel is required."""
    chans = read_wav(path)
    if len(chans) != 1:
        raise ValueError(f"expected a mono WAV, got {len(chans)} channel(s): {path}")
    return chans[0]
