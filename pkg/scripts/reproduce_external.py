"""Reproduce the externally gated translation and flag numbers with a live provider.

Needs a workspace config whose provider is ``http`` and whose data section points at the
80/20 ASLLRP split (training pairs in ``data.corpus``, held-out pairs in ``data.test_set``),
plus an API key in ASLGEN_API_KEY.  Optional ``--flags`` is an ``english<TAB>ynq,whq,cond,neg``
file for the yes/no-question precision check.

    python3 scripts/reproduce_external.py --config asllrp/config.toml --flags asllrp/flags.tsv --out results
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from aslgen.cli import Pipeline, load_config, run_ablation
from aslgen.cli.ablation import Cell
from aslgen.evalmetrics import flag_scores
from aslgen.translate import parse_label, read_corpus_tsv

# (name, cell, target BLEU-4, tolerance)
TARGETS = (
    ("best_row", Cell(True, -1, False, False), 0.276, 0.03),
    ("rag50_anonymized", Cell(True, -1, False, False, 50, True), 0.279, 0.01),
)
YNQ_PRECISION_MIN = 0.9


def read_flag_set(path: Path) -> list[tuple[str, str]]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            english, label = line.rsplit("\t", 1)
            rows.append((english.strip(), label.strip()))
    return rows


def reproduce(config: str | Path, flags: str | Path | None, out: str | Path) -> dict:
    cfg = load_config(config)
    if cfg.provider.kind != "http":
        raise SystemExit("the config must use provider.kind = 'http'")
    out = Path(out)
    test = read_corpus_tsv(cfg.resolve(cfg.data.test_set), normalize=False)
    checks = {}
    for name, cell, target, tol in TARGETS:
        row = run_ablation(cfg, test, out / name, cells=[cell])[0]
        checks[name] = {"bleu4": row["bleu4"], "target": target, "tolerance": tol,
                        "pass": abs(row["bleu4"] - target) <= tol}
    if flags:
        pairs = read_flag_set(Path(flags))
        pipe = Pipeline(cfg)
        pred = [pipe.classify(e) for e, _ in pairs]
        scores = flag_scores(pred, [parse_label(lbl) for _, lbl in pairs])
        p = scores.per_flag["ynq"].precision or 0.0
        checks["ynq_precision"] = {"precision": p, "minimum": YNQ_PRECISION_MIN, "pass": p >= YNQ_PRECISION_MIN}
    out.mkdir(parents=True, exist_ok=True)
    (out / "external_checks.json").write_text(json.dumps(checks, indent=1) + "\n", encoding="utf-8")
    return checks


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", required=True)
    p.add_argument("--flags")
    p.add_argument("--out", required=True)
    args = p.parse_args(argv)
    checks = reproduce(args.config, args.flags, args.out)
    for name, c in checks.items():
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {name}  {json.dumps(c)}")
    return 0 if all(c["pass"] for c in checks.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
