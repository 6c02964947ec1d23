import numpy as np
import pytest

from eswidth.dsp import CorrelationFunction, Signal, gcc_phat, white_noise
from eswidth.render import make_scenario, render_hrir
from eswidth.spatial import (
    SpatialCorrelation,
    angular_width,
    detect_peaks,
    dispersion,
    posc,
    spatial_correlation,
    spatiogram,
    write_spatial_csv,
    write_spatiogram_csv,
)

FS = 48000


def render_noise(bank, azimuths, seeds, seconds=2):
    spec_kind = "localized" if len(azimuths) == 1 else "ensemble"
    from eswidth.render import EnsembleSpec, SourceSpec

    spec = EnsembleSpec(
        spec_kind,
        tuple(SourceSpec(a, 1.0) for a in azimuths),
        float(np.mean(azimuths)),
        0,
        FS,
    )
    chans = [white_noise(seconds * FS, 1.0, seed=s) for s in seeds]
    return render_hrir(chans, spec, bank)


class TestSpatialCorrelation:
    def test_noiseless_self_projection(self, magnitude_bank):
        idx = magnitude_bank.azimuths.index(30.0)
        curve = spatial_correlation(magnitude_bank.functions[idx], magnitude_bank)
        assert curve.argmax_azimuth == 30.0
        assert curve.kind == "magnitude"

    def test_rendered_source_peaks_near_truth(self, bank, magnitude_bank):
        from eswidth.dsp import cross_correlation

        x_l, x_r = render_noise(bank, [45.0], [31], seconds=10)
        r = cross_correlation(x_r, x_l, 64)
        curve = spatial_correlation(r, magnitude_bank)
        assert abs(curve.argmax_azimuth - 45.0) <= 5.0

    def test_kind_mismatch_rejected(self, phase_bank, magnitude_bank):
        idx = 3
        with pytest.raises(ValueError, match="kind"):
            spatial_correlation(phase_bank.functions[idx], phase_bank)

    def test_window_must_fit(self, magnitude_bank):
        fn = magnitude_bank.functions[0]
        with pytest.raises(ValueError, match="window"):
            spatial_correlation(fn, magnitude_bank, lag_window=1000)


class TestPosc:
    def test_single_source_grid_spot_check(self, bank, phase_bank):
        for az, seed in ((-65.0, 1), (0.0, 2), (85.0, 3)):
            x_l, x_r = render_noise(bank, [az], [seed])
            rho = gcc_phat(x_r, x_l)
            assert posc(rho, phase_bank).argmax_azimuth == az

    def test_three_sources_about_zero(self, bank, phase_bank):
        x_l, x_r = render_noise(bank, [-15.0, 0.0, 15.0], [4, 5, 6], seconds=4)
        curve = posc(gcc_phat(x_r, x_l), phase_bank)
        estimate = detect_peaks(curve, count=3)
        assert [a for a, _ in estimate.peaks] == [-15.0, 0.0, 15.0]
        assert estimate.angular_width_deg == 30.0

    def test_joint_scaling_invariance(self, bank, phase_bank):
        x_l, x_r = render_noise(bank, [20.0], [7], seconds=1)
        a = posc(gcc_phat(x_r, x_l), phase_bank)
        b = posc(gcc_phat(x_r.scaled(2.0), x_l.scaled(2.0)), phase_bank)
        assert np.allclose(a.values, b.values, rtol=1e-6)

    def test_mirror_symmetry(self, bank, phase_bank):
        spec = make_scenario("ensemble", 20.0, 30.0, 3, seed=8)
        mirrored = make_scenario("ensemble", -20.0, 30.0, 3, seed=8)
        chans = [white_noise(FS, 1.0, seed=40 + i) for i in range(3)]
        x_l, x_r = render_hrir(chans, spec, bank)
        # each source keeps its signal under reflection (azimuth lists are
        # ascending, so the channel order reverses), ears swap
        m_l, m_r = render_hrir(chans[::-1], mirrored, bank)
        c = posc(gcc_phat(x_r, x_l), phase_bank)
        c_m = posc(gcc_phat(m_r, m_l), phase_bank)
        assert np.allclose(c.values, c_m.values[::-1], atol=1e-9)
        assert c.argmax_azimuth == -c_m.argmax_azimuth


class TestSpatiogram:
    def test_frame_count_arithmetic(self, bank, phase_bank):
        x_l, x_r = render_noise(bank, [0.0], [9], seconds=2)
        x_l = Signal(x_l.samples[: 2 * FS], FS)
        x_r = Signal(x_r.samples[: 2 * FS], FS)
        gram = spatiogram(x_l, x_r, phase_bank)
        assert gram.frame_length == 3840 and gram.hop == 1920
        assert gram.n_frames == (2 * FS - 3840) // 1920 + 1

    def test_rows_bit_equal_standalone_projection(self, bank, phase_bank):
        x_l, x_r = render_noise(bank, [-30.0], [10], seconds=1)
        gram = spatiogram(x_l, x_r, phase_bank)
        window = np.hanning(gram.frame_length)
        for m in (0, 3, gram.n_frames - 1):
            a = m * gram.hop
            f_l = Signal(x_l.samples[a : a + gram.frame_length] * window, FS)
            f_r = Signal(x_r.samples[a : a + gram.frame_length] * window, FS)
            row = posc(gcc_phat(f_r, f_l), phase_bank).values
            assert np.array_equal(gram.values[m], row)

    def test_stationary_rows_are_stable(self, bank, phase_bank):
        x_l, x_r = render_noise(bank, [-15.0, 0.0, 15.0], [11, 12, 13], seconds=4)
        gram = spatiogram(x_l, x_r, phase_bank)
        active = gram.active_frames()
        rows = gram.values[active]
        sims = [
            float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
            for a, b in zip(rows, rows[1:])
        ]
        assert min(sims) >= 0.9

    def test_impulsive_signal_has_fewer_active_frames(self, bank, phase_bank):
        seconds = 2
        spec = make_scenario("localized", 0.0, 0.0, 1, seed=0)
        steady = white_noise(seconds * FS, 1.0, seed=14)
        clicks = np.zeros(seconds * FS)
        burst = white_noise(480, 1.0, seed=15).samples  # 10 ms bursts, 4 per second
        for start in range(0, seconds * FS, FS // 4):
            clicks[start : start + 480] = burst
        clicks *= np.sqrt(steady.energy() / np.dot(clicks, clicks))  # equal total energy
        g_steady = spatiogram(*render_hrir([steady], spec, bank), phase_bank)
        g_clicks = spatiogram(*render_hrir([Signal(clicks, FS)], spec, bank), phase_bank)
        frac_steady = g_steady.active_frames().mean()
        frac_clicks = g_clicks.active_frames().mean()
        assert frac_clicks < frac_steady

    def test_too_short_signal_rejected(self, phase_bank):
        short = white_noise(1000, 1.0, seed=0)
        with pytest.raises(ValueError, match="shorter than one frame"):
            spatiogram(short, short, phase_bank)


class TestDetectPeaks:
    def _curve(self, values):
        azimuths = np.arange(-90.0, 95.0, 5.0)[: len(values)]
        return SpatialCorrelation(azimuths, np.asarray(values, dtype=float), "phase_only")

    def test_single_peak_width_zero(self):
        values = np.exp(-0.5 * ((np.arange(-90, 95, 5) - 45.0) / 10.0) ** 2)
        est = detect_peaks(self._curve(values), count=1)
        assert est.peaks[0][0] == 45.0
        assert est.angular_width_deg == 0.0

    def test_known_count_keeps_largest(self):
        vals = np.zeros(37)
        for az, h in ((-15.0, 1.0), (0.0, 0.9), (15.0, 0.8), (60.0, 0.2)):
            vals[int((az + 90) / 5)] = h
        est = detect_peaks(self._curve(vals), count=3)
        assert [a for a, _ in est.peaks] == [-15.0, 0.0, 15.0]
        assert est.angular_width_deg == 30.0
        assert est.mode == "known_count"

    def test_automatic_threshold_and_separation(self):
        vals = np.zeros(37)
        for az, h in ((-15.0, 1.0), (0.0, 0.9), (15.0, 0.8), (60.0, 0.2)):
            vals[int((az + 90) / 5)] = h
        est = detect_peaks(self._curve(vals), rel_threshold=0.5, min_separation_deg=10.0)
        assert [a for a, _ in est.peaks] == [-15.0, 0.0, 15.0]
        assert est.mode == "automatic"

    def test_plateau_resolves_to_lowest_azimuth(self):
        vals = np.array([0.0, 1.0, 1.0, 0.0, 0.0])
        est = detect_peaks(self._curve(vals), count=1)
        assert est.peaks[0][0] == -85.0

    def test_flat_input_gives_no_peaks(self):
        est = detect_peaks(self._curve(np.ones(12)), count=2)
        assert est.peaks == ()
        assert est.angular_width_deg == 0.0

    def test_boundary_peak_detected(self):
        vals = np.linspace(0, 1, 37)
        est = detect_peaks(self._curve(vals), count=1)
        assert est.peaks[0][0] == 90.0

    def test_noiseless_self_projection_recovers_sources(self, phase_bank):
        # a sum of well-separated basis functions projects to peaks exactly there
        truth = (-60.0, 0.0, 60.0)
        parts = [
            phase_bank.functions[phase_bank.azimuths.index(a)].window(48).values for a in truth
        ]
        combined = CorrelationFunction(np.sum(parts, axis=0), -48, 48, FS)
        est = detect_peaks(posc(combined, phase_bank), count=3)
        assert tuple(a for a, _ in est.peaks) == truth


class TestAngularWidth:
    def test_three_peak_spread(self):
        assert angular_width([-15.0, 0.0, 15.0]) == 30.0

    def test_degenerate_cases(self):
        assert angular_width([]) == 0.0
        assert angular_width([45.0]) == 0.0

    def test_offset_cluster(self):
        assert angular_width([-60.0, -45.0, -30.0]) == 30.0


class TestDispersion:
    def test_single_delta_is_zero(self):
        v = np.zeros(33)
        v[20] = 2.5
        assert dispersion(CorrelationFunction(v, -16, 16, FS)) == 0.0

    def test_two_equal_deltas(self):
        v = np.zeros(33)
        v[16 - 8] = 1.0
        v[16 + 8] = 1.0
        assert dispersion(CorrelationFunction(v, -16, 16, FS)) == pytest.approx(8.0)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            dispersion(CorrelationFunction(np.zeros(5), -2, 2, FS))

    def test_localized_tighter_than_ensemble(self, bank):
        from eswidth.dsp import cross_correlation

        x_l, x_r = render_noise(bank, [0.0], [16], seconds=2)
        loc = dispersion(cross_correlation(x_r, x_l, 48))
        e_l, e_r = render_noise(bank, [-60.0, 0.0, 60.0], [17, 18, 19], seconds=2)
        ens = dispersion(cross_correlation(e_r, e_l, 48))
        assert loc < ens


class TestCsvOutputs:
    def test_spatial_csv_round_trip(self, tmp_path):
        c = SpatialCorrelation(np.array([-5.0, 0.0, 5.0]), np.array([0.1, 0.9, 0.2]), "phase_only")
        path = tmp_path / "curve.csv"
        write_spatial_csv(c, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "azimuth_deg,value"
        assert len(lines) == 4
        assert float(lines[2].split(",")[1]) == 0.9

    def test_spatiogram_csv_header(self, tmp_path, bank, phase_bank):
        x = white_noise(FS // 2, 1.0, seed=20)
        spec = make_scenario("localized", 0.0, 0.0, 1, seed=0)
        gram = spatiogram(*render_hrir([x], spec, bank), phase_bank)
        path = tmp_path / "gram.csv"
        write_spatiogram_csv(gram, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0].startswith("time_s,-90.0,")
        assert len(lines) == gram.n_frames + 1
