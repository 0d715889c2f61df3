"""End-to-end English -> gloss -> pose sequence -> conditioning frames, with content-hashed artifacts."""
from __future__ import annotations

import hashlib
import json
import logging
import shutil
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

from ..gloss import GlossError, GlossSentence, Lexicon, load_lexicon, parse_gloss
from ..motion import (
    blend, blend_expressions, load_profile, load_sequence, save_sequence, select_variants,
)
from ..motion.matching import MissingGloss
from ..posedict import SchemaMismatch, SignDictionary, load_dictionary
from ..raster import load_style, write_png_sequence
from ..translate import (
    CachingProvider, ConfigError, FixtureReplayer, HttpProvider, HttpSettings, LinguisticFlags,
    ProviderClient, ProviderError, classify_flags, embed_corpus, enforce_vocabulary, parse_label,
    plan_prompt, read_corpus_tsv, retrieve_examples, rule_flags, translate_sentence,
)
from .config import PipelineConfig
from .offline import offline_translate

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_PROVIDER, EXIT_DATA = 0, 2, 3, 4


class StageError(RuntimeError):
    """A pipeline failure labelled with the stage it happened in."""

    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")
        self.stage = stage
        self.cause = exc

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.cause)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        return exc.exit_code
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, ProviderError):
        return EXIT_PROVIDER
    return EXIT_DATA


def sha256_bytes(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


def content_key(*parts) -> str:
    return sha256_bytes(json.dumps(parts, sort_keys=True, default=str).encode("utf-8"))


@lru_cache(maxsize=16)
def _file_hash(path: str, mtime_ns: int, size: int) -> str:
    return sha256_bytes(Path(path).read_bytes())


def file_hash(path: Path) -> str:
    st = path.stat()
    return _file_hash(str(path), st.st_mtime_ns, st.st_size)


def make_client(cfg: PipelineConfig) -> ProviderClient | None:
    kind = cfg.provider.kind
    if kind == "offline":
        return None
    if kind == "fixture":
        path = cfg.resolve(cfg.provider.fixture)
        if not path.exists():
            raise ConfigError(f"provider fixture {path} not found")
        return FixtureReplayer(path)
    p = cfg.provider
    settings = HttpSettings.from_env(api_base=p.api_base or None, model=p.model or None,
                                     embed_model=p.embed_model or None)
    settings.temperature = p.temperature
    settings.rate = p.rate
    return HttpProvider(settings)


@dataclass
class Resources:
    lexicon: Lexicon
    dictionary: SignDictionary
    dict_hash: str
    lexicon_hash: str

    @classmethod
    def load(cls, cfg: PipelineConfig) -> "Resources":
        lex_path = cfg.resolve(cfg.data.lexicon)
        dict_path = cfg.resolve(cfg.data.dictionary)
        d = load_dictionary(dict_path)
        lex = load_lexicon(lex_path).link(d.by_gloss)
        return cls(lex, d, file_hash(dict_path), file_hash(lex_path))


@dataclass
class PipelineResult:
    sentence: str
    raw_gloss: str
    gloss: str
    flags: LinguisticFlags
    substitutions: list = field(default_factory=list)
    sequence_path: Path | None = None
    frames_dir: Path | None = None
    frame_count: int = 0
    artifacts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"sentence": self.sentence, "raw_gloss": self.raw_gloss, "gloss": self.gloss,
                "flags": self.flags.to_label(), "flag_names": self.flags.as_dict(),
                "substitutions": self.substitutions, "frame_count": self.frame_count,
                "artifacts": self.artifacts}


class ArtifactStore:
    """Write-once files under ``cache_dir/artifacts`` named by stage and content hash."""

    def __init__(self, cache_dir: Path):
        self.dir = Path(cache_dir) / "artifacts"

    def path(self, stage: str, key: str, suffix: str) -> Path:
        return self.dir / f"{stage}-{key[:24]}{suffix}"

    def json(self, stage: str, key: str, compute: Callable[[], dict]) -> dict:
        p = self.path(stage, key, ".json")
        if p.exists():
            return json.loads(p.read_text(encoding="utf-8"))
        value = compute()
        self.dir.mkdir(parents=True, exist_ok=True)
        tmp = p.with_name(f"{p.name}.{threading.get_ident()}.tmp")
        tmp.write_text(json.dumps(value, indent=1, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        tmp.replace(p)
        return value

    def file(self, stage: str, key: str, suffix: str, write: Callable[[Path], None]) -> Path:
        p = self.path(stage, key, suffix)
        if not p.exists():
            self.dir.mkdir(parents=True, exist_ok=True)
            tmp = p.with_name(f"{p.name}.{threading.get_ident()}.tmp")
            if tmp.is_dir():
                shutil.rmtree(tmp)
            write(tmp)
            try:
                tmp.replace(p)
            except OSError:
                # another thread finished the same artifact first; contents are identical
                if not p.exists():
                    raise
                shutil.rmtree(tmp) if tmp.is_dir() else tmp.unlink()
        return p


def _stage(name: str):
    def wrap(fn):
        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except StageError:
                raise
            except (GlossError, MissingGloss, SchemaMismatch, ProviderError, ConfigError,
                    ValueError, KeyError, OSError) as exc:
                raise StageError(name, exc) from exc
        inner.__name__ = fn.__name__
        return inner
    return wrap


class Pipeline:
    def __init__(self, cfg: PipelineConfig, client: ProviderClient | None = None,
                 resources: Resources | None = None):
        self.cfg = cfg
        self.cache_dir = cfg.resolve(cfg.cache_dir)
        self.injected = client is not None
        self.inner = client if client is not None else self._client()
        self.store = ArtifactStore(self.cache_dir)
        self.client = CachingProvider(self.inner, self.cache_dir) if self.inner is not None else None
        self._res = resources
        self._corpus = None

    @_stage("config")
    def _client(self):
        return make_client(self.cfg)

    @property
    @_stage("load")
    def res(self) -> Resources:
        if self._res is None:
            self._res = Resources.load(self.cfg)
        return self._res

    def provider_id(self) -> str:
        if self.inner is None:
            return "offline"
        if self.injected:
            return "client:" + str(getattr(self.inner, "cache_id", type(self.inner).__name__))
        p = self.cfg.provider
        if p.kind == "fixture":
            return "fixture:" + file_hash(self.cfg.resolve(p.fixture))
        return f"{p.kind}:{p.model}:{p.temperature}:{type(self.inner).__name__}"

    def corpus(self, normalize: bool = True):
        if self._corpus is None or self._corpus[0] != normalize:
            path = self.cfg.resolve(self.cfg.data.corpus)
            self._corpus = (normalize, read_corpus_tsv(path, normalize=normalize))
        return self._corpus[1]

    # -- stages --------------------------------------------------------------

    @_stage("translate")
    def translate(self, sentence: str, prompt=None, data_prep: bool = True) -> GlossSentence:
        cfg = self.cfg
        prompt = prompt or cfg.prompt
        if self.client is None:
            key = content_key("offline-translate", sentence, self.res.lexicon_hash)
            doc = self.store.json("translate", key, lambda: {
                "sentence": sentence, "gloss": str(offline_translate(sentence, self.res.lexicon))})
            return parse_gloss(doc["gloss"], sentence)
        examples = self.corpus(normalize=data_prep)
        if prompt.rag.enabled:
            cache = self.cache_dir / f"embeddings-{'anon' if prompt.rag.anonymized else 'raw'}.bin"
            embedded = embed_corpus(examples, self.client, prompt.rag.anonymized, cache)
            examples = retrieve_examples(embedded, sentence, min(prompt.rag.n, len(embedded)),
                                         self.client, prompt.rag.anonymized)
        pcfg = prompt.prompt_config()
        if not data_prep:
            pcfg = type(pcfg)(**{**pcfg.__dict__, "limit_vocab": False})
        vocab = sorted(self.res.dictionary.by_gloss)
        plan = plan_prompt(examples, sentence, pcfg, vocab)
        key = content_key("translate", plan.conversation(), self.provider_id())
        doc = self.store.json("translate", key, lambda: {
            "sentence": sentence, "gloss": str(translate_sentence(self.client, plan))})
        return parse_gloss(doc["gloss"], sentence)

    @_stage("classify")
    def classify(self, sentence: str) -> LinguisticFlags:
        if self.client is None:
            return rule_flags(sentence)
        key = content_key("classify", sentence, self.provider_id())
        doc = self.store.json("classify", key, lambda: {
            "sentence": sentence, "flags": classify_flags(self.client, sentence).to_label()})
        return parse_label(doc["flags"])

    @_stage("enforce")
    def enforce(self, g: GlossSentence) -> tuple[GlossSentence, list]:
        key = content_key("enforce", str(g), self.res.dict_hash, self.res.lexicon_hash)

        def compute():
            e = enforce_vocabulary(g, self.res.lexicon)
            return {"gloss": str(e.sentence), "substitutions": [
                {"position": s.position, "original": s.original, "replacement": list(s.replacement),
                 "reason": s.reason} for s in e.substitutions]}
        doc = self.store.json("enforce", key, compute)
        return parse_gloss(doc["gloss"], g.source_english), doc["substitutions"]

    @_stage("synth")
    def synthesize(self, g: GlossSentence, flags: LinguisticFlags) -> Path:
        cfg = self.cfg
        b = cfg.blend
        key = content_key("synth", str(g), self.res.dict_hash, cfg.match.__dict__, b.__dict__)

        def write_plain(path: Path):
            plan = select_variants(self.res.dictionary, g, cfg.match.weights(), b.window, b.fps)
            save_sequence(blend(plan, self.res.dictionary, b.bookend_seconds), path)
        plain = self.store.file("synth", key, ".posz", write_plain)
        profile_path = cfg.resolve(b.expression_profile) if b.expression_profile else None
        ekey = content_key("expr", key, flags.to_label(),
                           file_hash(profile_path) if profile_path else "default")

        def write_expr(path: Path):
            seq = blend_expressions(load_sequence(plain), flags, load_profile(profile_path))
            save_sequence(seq, path)
        return self.store.file("expr", ekey, ".posz", write_expr)

    @_stage("raster")
    def rasterize(self, seq_path: Path) -> tuple[Path, int]:
        cfg = self.cfg
        style_name = cfg.raster.style
        style_id = style_name if style_name == "default" else file_hash(cfg.resolve(style_name))
        key = content_key("raster", file_hash(seq_path), style_id)
        style = load_style(style_name if style_name == "default" else cfg.resolve(style_name))

        def write(path: Path):
            seq = load_sequence(seq_path)
            write_png_sequence((seq.frame(t) for t in range(len(seq))), path, style, cfg.raster.workers)
        out = self.store.file("frames", key, "", write)
        return out, len(list(out.glob("frame_*.png")))

    # -- orchestration ------------------------------------------------------

    def run(self, sentence: str, out_dir: str | Path | None = None, render: bool = True) -> PipelineResult:
        sentence = sentence.strip()
        if not sentence:
            raise StageError("input", ValueError("empty sentence"))
        raw = self.translate(sentence)
        enforced, subs = self.enforce(raw)
        flags = self.classify(sentence)
        seq_path = self.synthesize(enforced, flags)
        frames_dir, n = self.rasterize(seq_path) if render else (None, 0)
        result = PipelineResult(sentence, str(raw), str(enforced), flags, subs, seq_path, frames_dir, n,
                                {"sequence": seq_path.name, "frames": frames_dir.name if frames_dir else None})
        if out_dir is not None:
            export(result, Path(out_dir))
        return result


def export(result: PipelineResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(result.sequence_path, out / "sequence.posz")
    if result.frames_dir is not None:
        dst = out / "frames"
        if dst.exists():
            shutil.rmtree(dst)
        shutil.copytree(result.frames_dir, dst)
    (out / "result.json").write_text(json.dumps(result.to_json(), indent=1, sort_keys=True) + "\n",
                                     encoding="utf-8")


def run_pipeline(cfg: PipelineConfig, sentence: str, out_dir: str | Path | None = None,
                 client: ProviderClient | None = None) -> PipelineResult:
    return Pipeline(cfg, client).run(sentence, out_dir)


def run_batch(cfg: PipelineConfig, sentences: list[str], out_dir: str | Path,
              client: ProviderClient | None = None, render: bool = True) -> list[PipelineResult]:
    """Run sentences on up to ``cfg.workers`` threads; sentence i is exported to ``out_dir/i``."""
    pipe = Pipeline(cfg, client)
    pipe.res  # load once before the threads share it
    out_dir = Path(out_dir)
    width = max(len(str(len(sentences) - 1)), 3)

    def one(i: int) -> PipelineResult:
        return pipe.run(sentences[i], out_dir / f"{i:0{width}d}", render)
    with ThreadPoolExecutor(max(cfg.workers, 1)) as pool:
        return list(pool.map(one, range(len(sentences))))
