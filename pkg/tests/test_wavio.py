import numpy as np
import pytest

from eswidth.dsp import Signal, white_noise
from eswidth.wavio import read_mono, read_stereo, read_wav, write_wav

FS = 48000


class TestRoundTrips:
    def test_float32_mono(self, tmp_path):
        x = white_noise(1000, 0.25, seed=0)
        path = tmp_path / "mono.wav"
        write_wav(path, x)
        back = read_mono(path)
        assert back.sample_rate == FS
        assert np.allclose(back.samples, x.samples, atol=1e-7)

    def test_float32_stereo_channel_order(self, tmp_path):
        left = Signal(np.full(64, 0.5), FS)
        right = Signal(np.full(64, -0.5), FS)
        path = tmp_path / "stereo.wav"
        write_wav(path, [left, right])
        l2, r2 = read_stereo(path)
        assert np.allclose(l2.samples, 0.5) and np.allclose(r2.samples, -0.5)

    def test_pcm16_round_trip(self, tmp_path):
        x = white_noise(1000, 0.2, seed=1)
        path = tmp_path / "pcm.wav"
        write_wav(path, x, fmt="pcm16")
        back = read_mono(path)
        assert np.allclose(back.samples, x.samples, atol=1.0 / 32767)

    def test_sample_rate_preserved(self, tmp_path):
        x = white_noise(500, 0.1, seed=2, sample_rate=44100)
        path = tmp_path / "sr.wav"
        write_wav(path, x)
        assert read_mono(path).sample_rate == 44100


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="unreadable"):
            read_wav(tmp_path / "nope.wav")

    def test_not_a_wav(self, tmp_path):
        path = tmp_path / "junk.wav"
        path.write_bytes(b"definitely not RIFF")
        with pytest.raises(ValueError, match="readable WAV"):
            read_wav(path)

    def test_mono_expected(self, tmp_path):
        x = white_noise(64, 0.1, seed=3)
        path = tmp_path / "st.wav"
        write_wav(path, [x, x])
        with pytest.raises(ValueError, match="mono"):
            read_mono(path)

    def test_stereo_expected(self, tmp_path):
        x = white_noise(64, 0.1, seed=4)
        path = tmp_path / "mono.wav"
        write_wav(path, x)
        with pytest.raises(ValueError, match="stereo"):
            read_stereo(path)

    def test_mismatched_channels_rejected(self, tmp_path):
        a = white_noise(64, 0.1, seed=5)
        b = white_noise(32, 0.1, seed=6)
        with pytest.raises(ValueError, match="share"):
            write_wav(tmp_path / "bad.wav", [a, b])

    def test_unknown_format_rejected(self, tmp_path):
        x = white_noise(64, 0.1, seed=7)
        with pytest.raises(ValueError, match="format"):
            write_wav(tmp_path / "bad.wav", x, fmt="pcm24")
