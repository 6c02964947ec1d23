"""Command-line entry points: bank synthesis, rendering, width analysis,
spatiograms, time-bandwidth energy, stimulus building, and the rating service."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import hrir, render, spatial, stimuli, wavio
from .dsp import gcc_phat
from .experiment import correlate_scores
from .mtbe import DEFAULT_BAND_WEIGHTS, band_weights, build_filterbank, mtbe_weighted


def _cmd_synth_hrir(args) -> int:
    bank = hrir.synth_spherical_bank(
        grid_step=args.grid,
        head_radius=args.radius,
        ir_length=args.ir_length,
        sample_rate=args.fs,
    )
    hrir.save_bank(bank, args.output)
    print(f"wrote bank with {len(bank.entries)} azimuths to {args.output}")
    return 0


def _load_or_build_scenario(args, sample_rate: int) -> render.EnsembleSpec:
    if args.scenario:
        spec = render.load_scenario(args.scenario)
        if spec.sample_rate != sample_rate:
            raise ValueError(
                f"scenario sample rate {spec.sample_rate} != input rate {sample_rate}"
            )
        return spec
    return render.make_scenario(
        args.kind, args.center, args.spread, args.sources, args.seed, sample_rate
    )


def _cmd_render(args) -> int:
    bank = hrir.load_bank(args.bank)
    source = wavio.read_mono(args.input)
    if source.sample_rate != bank.sample_rate:
        raise ValueError(
            f"input sample rate {source.sample_rate} != bank rate {bank.sample_rate}"
        )
    spec = _load_or_build_scenario(args, source.sample_rate)
    channels = render.decorrelate(source, spec)
    pair = render.normalize_pair(*render.render_hrir(channels, spec, bank))
    wavio.write_wav(args.output, [pair[0], pair[1]])
    if args.save_scenario:
        render.save_scenario(spec, args.save_scenario)
    print(f"rendered {spec.kind} scenario ({len(spec.sources)} sources) to {args.output}")
    return 0


def _analysis_inputs(args):
    bank = hrir.load_bank(args.bank)
    left, right = wavio.read_stereo(args.input)
    if left.sample_rate != bank.sample_rate:
        raise ValueError(f"input rate {left.sample_rate} != bank rate {bank.sample_rate}")
    window = (
        None if args.lag_window_ms is None else round(args.lag_window_ms / 1000.0 * bank.sample_rate)
    )
    return bank, left, right, window


def _cmd_analyze_posc(args) -> int:
    bank, left, right, window = _analysis_inputs(args)
    basis = hrir.phase_basis(bank, args.epsilon)
    rho = gcc_phat(right, left, args.epsilon)
    curve = spatial.posc(rho, basis, window)
    spatial.write_spatial_csv(curve, args.output)
    estimate = spatial.detect_peaks(
        curve,
        count=args.count,
        rel_threshold=args.rel_threshold,
        min_separation_deg=args.min_separation,
    )
    if args.width_json:
        Path(args.width_json).write_text(json.dumps(estimate.to_json(), indent=2))
    print(
        f"peaks at {[a for a, _ in estimate.peaks]} deg, "
        f"angular width {estimate.angular_width_deg:g} deg ({estimate.mode})"
    )
    return 0


def _cmd_spatiogram(args) -> int:
    bank, left, right, window = _analysis_inputs(args)
    basis = hrir.phase_basis(bank, args.epsilon)
    gram = spatial.spatiogram(
        left,
        right,
        basis,
        frame_ms=args.frame_ms,
        overlap=args.overlap,
        epsilon=args.epsilon,
        lag_window=window,
    )
    spatial.write_spatiogram_csv(gram, args.output)
    active = int(gram.active_frames().sum())
    print(f"wrote {gram.n_frames} frames ({active} active) to {args.output}")
    return 0


def _cmd_mtbe(args) -> int:
    source = wavio.read_mono(args.input)
    weights = band_weights(
        build_filterbank(source.sample_rate), args.low, args.mid, args.high
    )
    result = mtbe_weighted(source, weights, args.energy_floor)
    Path(args.output).write_text(json.dumps(result.to_json(), indent=2))
    if args.csv:
        lines = ["center_hz,mean_db"] + [
            f"{f},{m}" for f, m in zip(result.centers_hz, result.per_filter_means_db)
        ]
        Path(args.csv).write_text("\n".join(lines) + "\n")
    print(f"E_M = {result.e_m_db:.2f} dB, weighted {result.e_m_w_db:.2f} dB ({result.k} filters)")
    return 0


def _cmd_make_stimuli(args) -> int:
    config = stimuli.load_config(args.config)
    bank = hrir.load_bank(args.bank) if args.bank else None
    stim_set = stimuli.build_stimuli(config, args.output, bank)
    print(f"wrote {len(stim_set.stimuli)} stimuli to {args.output}")
    return 0


def _cmd_serve(args) -> int:
    from .service import create_app  # deferred: uvicorn/fastapi only needed here

    app = create_app(
        args.stimuli, args.results, seed=args.seed, static_dir=args.static
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_correlate(args) -> int:
    from .experiment import RatingsLog

    ratings = RatingsLog(Path(args.ratings)).latest()
    scores = json.loads(Path(args.scores).read_text())
    if not isinstance(scores, dict):
        raise ValueError("scores file must map stimulus id to a numeric score")
    report = correlate_scores(ratings, {k: float(v) for k, v in scores.items()})
    Path(args.output).write_text(json.dumps(report, indent=2))
    for listener, entry in report["per_listener"].items():
        print(f"{listener}: spearman {entry['spearman']:.3f} over {entry['n']} stimuli")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eswidth", description="Binaural ensemble-width analysis toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-hrir", help="emit a synthetic spherical-head bank as JSON")
    p.add_argument("--grid", type=float, default=5.0, help="azimuth step in degrees")
    p.add_argument("--fs", type=int, default=48000)
    p.add_argument("--radius", type=float, default=hrir.DEFAULT_HEAD_RADIUS)
    p.add_argument("--ir-length", type=int, default=256)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_synth_hrir)

    p = sub.add_parser("render", help="scenario + mono WAV -> binaural stereo WAV")
    p.add_argument("--bank", required=True)
    p.add_argument("--in", dest="input", required=True, help="mono source WAV")
    p.add_argument("-o", "--output", required=True, help="stereo WAV (left = channel 0)")
    p.add_argument("--scenario", help="scenario JSON (overrides the flags below)")
    p.add_argument("--kind", choices=render.KINDS, default="ensemble")
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--spread", type=float, default=30.0)
    p.add_argument("--sources", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--save-scenario", help="also write the scenario JSON here")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("analyze-posc", help="stereo WAV + bank -> azimuth curve CSV + width JSON")
    p.add_argument("--bank", required=True)
    p.add_argument("--in", dest="input", required=True, help="stereo WAV")
    p.add_argument("-o", "--output", required=True, help="azimuth,value CSV")
    p.add_argument("--width-json", help="write the peak/width estimate here")
    p.add_argument("--count", type=int, help="known source count; omit for automatic mode")
    p.add_argument("--rel-threshold", type=float, default=0.5)
    p.add_argument("--min-separation", type=float, default=10.0)
    p.add_argument("--lag-window-ms", type=float, default=None, help="default +-1 ms")
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.set_defaults(func=_cmd_analyze_posc)

    p = sub.add_parser("spatiogram", help="stereo WAV + bank -> framewise azimuth CSV")
    p.add_argument("--bank", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--frame-ms", type=float, default=80.0)
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--lag-window-ms", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.set_defaults(func=_cmd_spatiogram)

    p = sub.add_parser("mtbe", help="mono WAV -> time-bandwidth energy report JSON")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--csv", help="optional per-filter means CSV")
    p.add_argument("--low", type=float, default=DEFAULT_BAND_WEIGHTS["low"])
    p.add_argument("--mid", type=float, default=DEFAULT_BAND_WEIGHTS["mid"])
    p.add_argument("--high", type=float, default=DEFAULT_BAND_WEIGHTS["high"])
    p.add_argument("--energy-floor", type=float, default=None)
    p.set_defaults(func=_cmd_mtbe)

    p = sub.add_parser("make-stimuli", help="config JSON -> stimulus WAV set + manifest")
    p.add_argument("--config", required=True)
    p.add_argument("--bank", help="bank JSON (otherwise taken from the config)")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_make_stimuli)

    p = sub.add_parser("serve", help="run the rating service over a stimulus directory")
    p.add_argument("--stimuli", required=True, help="directory from make-stimuli")
    p.add_argument("--results", required=True, help="append-only ratings JSONL")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--seed", type=int, default=None, help="fix session permutations")
    p.add_argument("--static", default=None, help="serve this directory at / (panel build)")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("correlate", help="ratings log + objective scores -> rank-correlation report")
    p.add_argument("--ratings", required=True)
    p.add_argument("--scores", required=True, help="JSON map stimulus id -> score")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_correlate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
