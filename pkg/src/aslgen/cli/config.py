"""Pipeline configuration loaded from TOML; unknown keys are rejected."""
from __future__ import annotations

import dataclasses
import sys
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..frameqc import QcThresholds
from ..motion import MatchWeights
from ..translate import ConfigError, PromptConfig


@dataclass
class DataConfig:
    lexicon: str = "lexicon.tsv"
    corpus: str = "corpus.tsv"
    dictionary: str = "dict.bin"
    test_set: str = "test.tsv"


@dataclass
class ProviderConfig:
    kind: str = "offline"
    fixture: str = ""
    api_base: str = ""
    model: str = ""
    embed_model: str = ""
    temperature: float = 0.0
    rate: float = 2.0


@dataclass
class RagConfig:
    enabled: bool = False
    n: int = 50
    anonymized: bool = True


@dataclass
class PromptSection:
    n_examples: int = -1
    batch_size: int = 300
    limit_vocab: bool = True
    grammar_rules: bool = True
    grammar_rules_path: str = ""
    rag: RagConfig = field(default_factory=RagConfig)

    def prompt_config(self) -> PromptConfig:
        return PromptConfig(batch_size=self.batch_size, limit_vocab=self.limit_vocab,
                            grammar_rules=self.grammar_rules,
                            grammar_rules_path=self.grammar_rules_path or None,
                            n_examples=None if self.n_examples < 0 else self.n_examples)


@dataclass
class MatchConfig:
    alpha_body: float = 1.0
    alpha_face: float = 0.25
    alpha_hands: float = 0.5

    def weights(self) -> MatchWeights:
        return MatchWeights(self.alpha_body, self.alpha_face, self.alpha_hands)


@dataclass
class BlendConfig:
    window: int = 20
    fps: float = 90.0
    bookend_seconds: float = 0.5
    expression_profile: str = ""


@dataclass
class RasterConfig:
    style: str = "default"
    workers: int = 1


@dataclass
class QcConfig:
    flow_mag_max: float = 4.0
    window: int = 5
    jump_max: float = 0.05

    def thresholds(self) -> QcThresholds:
        return QcThresholds(self.flow_mag_max, self.window, self.jump_max)


@dataclass
class AblationConfig:
    data_prep: list = field(default_factory=lambda: [True])
    n_examples: list = field(default_factory=lambda: [-1])
    limit_vocab: list = field(default_factory=lambda: [True, False])
    grammar_rules: list = field(default_factory=lambda: [True, False])
    rag_n: list = field(default_factory=list)
    rag_anonymized: list = field(default_factory=lambda: [True])


@dataclass
class PipelineConfig:
    cache_dir: str = "cache"
    workers: int = 1
    data: DataConfig = field(default_factory=DataConfig)
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    prompt: PromptSection = field(default_factory=PromptSection)
    match: MatchConfig = field(default_factory=MatchConfig)
    blend: BlendConfig = field(default_factory=BlendConfig)
    raster: RasterConfig = field(default_factory=RasterConfig)
    qc: QcConfig = field(default_factory=QcConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)
    base_dir: str = field(default=".", metadata={"internal": True})

    def resolve(self, p: str) -> Path:
        """Paths in the config are relative to the config file's directory."""
        path = Path(p)
        return path if path.is_absolute() else Path(self.base_dir) / path

    def validate(self) -> "PipelineConfig":
        if self.provider.kind not in ("offline", "fixture", "http"):
            raise ConfigError(f"provider.kind must be offline, fixture or http, got {self.provider.kind!r}")
        if self.provider.kind == "fixture" and not self.provider.fixture:
            raise ConfigError("provider.fixture is required when provider.kind = 'fixture'")
        if self.prompt.batch_size <= 0:
            raise ConfigError("prompt.batch_size must be positive")
        if self.prompt.rag.n <= 0:
            raise ConfigError("prompt.rag.n must be positive")
        if self.blend.window < 0 or self.blend.fps <= 0 or self.blend.bookend_seconds < 0:
            raise ConfigError("blend window/fps/bookend_seconds out of range")
        if self.workers < 1 or self.raster.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            self.match.weights()
            self.qc.thresholds()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("base_dir")
        return d


def _coerce(value: Any, hint: Any, where: str) -> Any:
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if hint is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return value
    return value


def _build(cls, data: Mapping[str, Any], where: str = ""):
    hints = typing.get_type_hints(cls)
    known = {f.name: f for f in dataclasses.fields(cls) if not f.metadata.get("internal")}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown config key(s) {', '.join(where + k for k in unknown)}")
    kw = {}
    for name, value in data.items():
        hint = hints[name]
        if dataclasses.is_dataclass(hint):
            if not isinstance(value, Mapping):
                raise ConfigError(f"{where}{name}: expected a table")
            kw[name] = _build(hint, value, f"{where}{name}.")
        else:
            kw[name] = _coerce(value, hint, where + name)
    return cls(**kw)


def _merge(base: dict, extra: Mapping) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), Mapping):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def parse_override(text: str) -> dict:
    """``a.b.c=VALUE`` with VALUE in TOML syntax (bare words are treated as strings)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key=value")
    key, raw = text.split("=", 1)
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    out: dict = {}
    cur = out
    parts = key.strip().split(".")
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
    cur[parts[-1]] = value
    return out


def load_config(path: str | Path | None = None, overrides: list[str] | None = None,
                **top: Any) -> PipelineConfig:
    data: dict = {}
    base = Path(".")
    if path is not None:
        p = Path(path)
        try:
            data = tomllib.loads(p.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file {p} not found") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{p}: {exc}") from exc
        base = p.parent
    for o in overrides or []:
        data = _merge(data, parse_override(o))
    data = _merge(data, {k: v for k, v in top.items() if v is not None})
    cfg = _build(PipelineConfig, data)
    cfg.base_dir = str(base)
    return cfg.validate()
