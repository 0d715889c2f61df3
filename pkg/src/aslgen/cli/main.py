"""``aslgen`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..evalmetrics import LengthMismatch, METRIC_GROUPS, score_corpus
from ..translate import ConfigError, ProviderError, parse_label, read_corpus_tsv
from .config import load_config, tomllib
from .pipeline import EXIT_CONFIG, EXIT_DATA, EXIT_OK, Pipeline, exit_code_for, run_batch

log = logging.getLogger("aslgen")


def _config(args):
    return load_config(getattr(args, "config", None), getattr(args, "set", None) or [])


def cmd_dict_build(args) -> int:
    from ..frameqc import load_drop_frames
    from ..gloss import load_lexicon
    from ..posedict import DictionaryConfig, build_dictionary, read_clip
    from ..posedict.dictionary import save_dictionary
    from ..posedict.io import iter_clip_files
    from ..posedict.schema import PoseFrame

    lex = load_lexicon(args.lexicon) if args.lexicon else None
    clips = [read_clip(p) for p in iter_clip_files(args.clips)]
    if not clips:
        raise FileNotFoundError(f"no clip files in {args.clips}")
    drop = load_drop_frames(args.qc) if args.qc else None
    neutral = PoseFrame.from_json(json.loads(Path(args.neutral).read_text())) if args.neutral else None
    d, report = build_dictionary(clips, lex, DictionaryConfig(workers=args.workers), neutral, drop)
    save_dictionary(d, args.out)
    doc = json.dumps(report.to_json(), indent=1, sort_keys=True)
    if args.report:
        Path(args.report).write_text(doc + "\n", encoding="utf-8")
    print(doc, file=sys.stderr)
    print(f"{len(d)} clips, {len(d.by_gloss)} glosses -> {args.out}")
    return EXIT_OK


def _load_thresholds(path):
    from ..frameqc import QcThresholds
    if not path:
        return QcThresholds()
    data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    data = data.get("qc", data)
    try:
        return QcThresholds.from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def cmd_qc(args) -> int:
    from ..frameqc import classify_frames, save_qc_reports
    from ..posedict import read_clip
    from ..posedict.io import iter_clip_files
    from ..raster import load_png

    th = _load_thresholds(args.thresholds)
    reports = {}
    for p in iter_clip_files(args.clips):
        clip = read_clip(p)
        images = None
        if args.images:
            d = Path(args.images) / clip.id
            files = sorted(d.glob("*.png")) if d.is_dir() else []
            if files:
                images = [load_png(f) for f in files]
        reports[clip.id] = classify_frames(clip, images, th)
    save_qc_reports(reports, args.report, th)
    dropped = sum(len(r.rejected()) for r in reports.values())
    print(f"{len(reports)} clips, {dropped} frames rejected -> {args.report}")
    return EXIT_OK


def cmd_translate(args) -> int:
    pipe = Pipeline(_config(args))
    g = pipe.translate(args.sentence)
    if args.enforce:
        g, _ = pipe.enforce(g)
    print(g)
    return EXIT_OK


def cmd_classify(args) -> int:
    pipe = Pipeline(_config(args))
    print(pipe.classify(args.sentence).to_label())
    return EXIT_OK


def cmd_synth(args) -> int:
    from ..gloss import parse_gloss
    from ..motion import blend, blend_expressions, load_profile, save_sequence, save_sequence_jsonl, select_variants
    from ..posedict import load_dictionary

    cfg = _config(args)
    d = load_dictionary(args.dict)
    flags = parse_label(args.flags)
    b = cfg.blend
    plan = select_variants(d, parse_gloss(args.gloss), cfg.match.weights(), b.window, b.fps)
    seq = blend(plan, d, b.bookend_seconds)
    profile = load_profile(cfg.resolve(b.expression_profile) if b.expression_profile else None)
    seq = blend_expressions(seq, flags, profile)
    if args.out.endswith(".jsonl"):
        save_sequence_jsonl(seq, args.out)
    else:
        save_sequence(seq, args.out)
    print(f"{len(seq)} frames at {seq.fps:g} fps, clips {' '.join(plan.chosen)} -> {args.out}")
    return EXIT_OK


def cmd_raster(args) -> int:
    from ..motion import load_sequence, load_sequence_jsonl
    from ..raster import load_style, write_png_sequence, write_rgb24

    seq = load_sequence_jsonl(args.seq) if args.seq.endswith(".jsonl") else load_sequence(args.seq)
    style = load_style(args.style)
    frames = [seq.frame(t) for t in range(len(seq))]
    if args.rgb24:
        write_rgb24(frames, args.rgb24, style, args.workers)
    if args.out_dir:
        write_png_sequence(frames, args.out_dir, style, args.workers)
    print(f"{len(frames)} frames rendered")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    if args.offline:
        cfg.provider.kind = "offline"
    if args.sentences:
        sentences = [ln.strip() for ln in _read_lines(args.sentences) if ln.strip()]
        results = run_batch(cfg, sentences, args.out, render=not args.no_render)
        for i, res in enumerate(results):
            print(json.dumps({"index": i, "gloss": res.gloss, "flags": res.flags.to_label(),
                              "frames": res.frame_count}, sort_keys=True))
        return EXIT_OK
    res = Pipeline(cfg).run(args.sentence, args.out, render=not args.no_render)
    print(json.dumps({"gloss": res.gloss, "flags": res.flags.to_label(), "frames": res.frame_count,
                      "out": args.out}, sort_keys=True))
    return EXIT_OK


def _read_lines(path) -> list[str]:
    return [ln.rstrip("\n") for ln in open(path, encoding="utf-8")]


def cmd_eval(args) -> int:
    hyp = _read_lines(args.hyp)
    ref = _read_lines(args.ref)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    unknown = set(metrics) - set(METRIC_GROUPS)
    if unknown:
        raise ConfigError(f"unknown metrics {sorted(unknown)}")
    report = score_corpus(hyp, ref, metrics).as_dict()
    doc = json.dumps(report, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(doc + "\n", encoding="utf-8")
    print(doc)
    return EXIT_OK


def cmd_ablate(args) -> int:
    from .ablation import COLUMNS, run_ablation

    cfg = _config(args)
    test = read_corpus_tsv(args.test or cfg.resolve(cfg.data.test_set), normalize=False)
    rows = run_ablation(cfg, test, args.out)
    print("\t".join(COLUMNS))
    for r in rows:
        print("\t".join(f"{r[c]:.4f}" if isinstance(r[c], float) else str(r[c]) for c in COLUMNS))
    return EXIT_OK


def cmd_demo(args) -> int:
    from .demo import record_fixture, write_demo
    from ..translate.providers import write_fixture

    out = write_demo(args.out)
    if args.build or args.record_fixture:
        ns = argparse.Namespace(clips=str(out / "clips"), lexicon=str(out / "lexicon.tsv"),
                                out=str(out / "dict.bin"), qc=None, neutral=None, report=str(out / "ingest.json"),
                                workers=1)
        cmd_dict_build(ns)
    if args.record_fixture:
        write_fixture(out / "provider_fixture.json", record_fixture(out))
    print(f"demo workspace -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aslgen", description="English to ASL gloss, pose and conditioning frames.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", help="pipeline TOML file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config value")
        return sp

    d = sub.add_parser("dict", help="sign dictionary tools")
    dsub = d.add_subparsers(dest="dict_command", required=True)
    b = dsub.add_parser("build", help="preprocess raw clips into a dictionary")
    b.add_argument("--clips", required=True)
    b.add_argument("--lexicon")
    b.add_argument("--out", required=True)
    b.add_argument("--qc", help="QC report whose rejected frames are dropped")
    b.add_argument("--neutral", help="neutral pose JSON")
    b.add_argument("--report", help="write the ingest report here")
    b.add_argument("--workers", type=int, default=1)
    b.set_defaults(func=cmd_dict_build)

    q = sub.add_parser("qc", help="tier clip frames by landmark and blur checks")
    q.add_argument("--clips", required=True)
    q.add_argument("--images", help="directory with one sub-directory of PNG frames per clip id")
    q.add_argument("--thresholds")
    q.add_argument("--report", required=True)
    q.set_defaults(func=cmd_qc)

    t = with_config(sub.add_parser("translate", help="English sentence to gloss"))
    t.add_argument("--sentence", required=True)
    t.add_argument("--enforce", action="store_true", help="map onto the dictionary vocabulary")
    t.set_defaults(func=cmd_translate)

    c = with_config(sub.add_parser("classify", help="non-manual flags as ynq,whq,conditional,negation"))
    c.add_argument("--sentence", required=True)
    c.set_defaults(func=cmd_classify)

    s = with_config(sub.add_parser("synth", help="gloss sequence to pose sequence"))
    s.add_argument("--dict", required=True)
    s.add_argument("--gloss", required=True)
    s.add_argument("--flags", default="0,0,0,0")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("raster", help="render a pose sequence to conditioning frames")
    r.add_argument("--seq", required=True)
    r.add_argument("--style", default="default")
    r.add_argument("--out-dir")
    r.add_argument("--rgb24", help="also write a raw RGB24 stream")
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_raster)

    u = with_config(sub.add_parser("run", help="end-to-end pipeline for one sentence or a batch"))
    src = u.add_mutually_exclusive_group(required=True)
    src.add_argument("--sentence")
    src.add_argument("--sentences", help="file with one sentence per line, run on `workers` threads")
    u.add_argument("--out", required=True)
    u.add_argument("--offline", action="store_true", help="lexicon fallback, no provider")
    u.add_argument("--no-render", action="store_true")
    u.set_defaults(func=cmd_run)

    e = sub.add_parser("eval", help="score hypothesis glosses against references")
    e.add_argument("--hyp", required=True)
    e.add_argument("--ref", required=True)
    e.add_argument("--metrics", default=",".join(METRIC_GROUPS))
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    a = with_config(sub.add_parser("ablate", help="translation ablation grid"))
    a.add_argument("--test", help="english<TAB>gold gloss file (default: data.test_set)")
    a.add_argument("--out", required=True, help="results path stem (.json and .tsv)")
    a.set_defaults(func=cmd_ablate)

    m = sub.add_parser("demo", help="write a self-contained demo workspace")
    m.add_argument("--out", required=True)
    m.add_argument("--build", action="store_true", help="also build dict.bin")
    m.add_argument("--record-fixture", action="store_true", help="re-record provider_fixture.json")
    m.set_defaults(func=cmd_demo)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except (LengthMismatch, OSError, ValueError, KeyError, RuntimeError) as exc:
        code = exit_code_for(exc)
        label = {2: "config error", 3: "provider error"}.get(code, "data error")
        print(f"{label}: {exc}", file=sys.stderr)
        return code if code != EXIT_OK else EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
