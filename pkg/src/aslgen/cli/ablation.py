"""Translation ablation grid: one MetricReport per configuration cell."""
from __future__ import annotations

import copy
import csv
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..evalmetrics import score_corpus
from ..gloss import normalize_gloss
from ..translate import ProviderClient, ProviderError, TranslationExample
from .config import AblationConfig, PipelineConfig
from .pipeline import Pipeline, StageError

COLUMNS = ("data_prep", "n_examples", "limit_vocab", "grammar_rules", "rag_n", "rag_anonymized",
           "bleu1", "bleu2", "bleu3", "bleu4", "rouge_l", "meteor", "chrf", "ter")


@dataclass(frozen=True)
class Cell:
    data_prep: bool
    n_examples: int
    limit_vocab: bool
    grammar_rules: bool
    rag_n: int = 0
    rag_anonymized: bool = False


def grid_cells(grid: AblationConfig) -> list[Cell]:
    """Cartesian product of the axes; without data prep the vocabulary cannot be limited."""
    cells = []
    for prep, n, lim, rules in itertools.product(grid.data_prep, grid.n_examples, grid.limit_vocab,
                                                 grid.grammar_rules):
        if not prep and lim:
            continue
        cells.append(Cell(bool(prep), int(n), bool(lim), bool(rules)))
    for n, anon in itertools.product(grid.rag_n, grid.rag_anonymized):
        cells.append(Cell(True, -1, bool(grid.limit_vocab[0]) if grid.limit_vocab else True,
                          bool(grid.grammar_rules[0]) if grid.grammar_rules else True, int(n), bool(anon)))
    return cells


def _cell_prompt(cfg: PipelineConfig, cell: Cell):
    p = copy.deepcopy(cfg.prompt)
    p.n_examples = cell.n_examples
    p.limit_vocab = cell.limit_vocab
    p.grammar_rules = cell.grammar_rules
    p.rag.enabled = cell.rag_n > 0
    if cell.rag_n > 0:
        p.rag.n = cell.rag_n
        p.rag.anonymized = cell.rag_anonymized
    return p


def _save(rows: list[dict], out: Path | None, complete: bool) -> None:
    if out is None:
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".json").write_text(json.dumps({"complete": complete, "rows": rows}, indent=1) + "\n",
                                        encoding="utf-8")
    with open(out.with_suffix(".tsv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, COLUMNS, delimiter="\t", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in r.items()})


def run_ablation(cfg: PipelineConfig, test_set: Sequence[TranslationExample], out: str | Path | None = None,
                 client: ProviderClient | None = None, cells: Sequence[Cell] | None = None) -> list[dict]:
    """Translate the test set under every cell and score against the gold glosses.

    Rows are written after each cell, so a provider failure leaves the finished cells on disk.
    """
    if not test_set:
        raise ValueError("empty test set")
    out = Path(out) if out is not None else None
    pipe = Pipeline(cfg, client)
    rows: list[dict] = []
    for cell in cells if cells is not None else grid_cells(cfg.ablation):
        prompt = _cell_prompt(cfg, cell)
        hyps, refs = [], []
        try:
            for ex in test_set:
                hyps.append(str(pipe.translate(ex.english, prompt, cell.data_prep)))
                refs.append(normalize_gloss(ex.gloss) if cell.data_prep else ex.gloss)
        except StageError as exc:
            if isinstance(exc.cause, ProviderError):
                _save(rows, out, complete=False)
            raise
        report = score_corpus(hyps, refs)
        rows.append({**cell.__dict__, **report.as_dict()})
        _save(rows, out, complete=False)
    _save(rows, out, complete=True)
    return rows
