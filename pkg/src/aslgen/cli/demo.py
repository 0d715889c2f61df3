"""Self-contained demo workspace: lexicon, few-shot corpus, procedural sign clips, config, provider fixture."""
from __future__ import annotations

import hashlib
import math
import re
import shutil
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from ..posedict import PoseClip
from ..posedict.io import write_clip_binary, write_clip_jsonl
from ..posedict.skeleton import REST_LEFT, REST_RIGHT, HandShape, compose
from ..translate import FixtureRecord, MockProvider, RecordingProvider
from ..translate.providers import write_fixture

LEXICON = [
    ("you", "IX-2p"), ("your", "POSS-2p"), ("i", "IX-1p"), ("me", "IX-1p"), ("my", "POSS-1p"),
    ("tend", "TEND"), ("usually", "TEND"), ("commute", "COMMUTE"), ("work", "WORK"),
    ("bike", "BICYCLE"), ("bicycle", "BICYCLE"), ("kid", "KID"), ("kids", "KID"), ("child", "KID"),
    ("children", "KID"), ("play", "PLAY"), ("playing", "PLAY-continuative"), ("park", "fs-P-A-R-K"),
    ("want", "WANT"), ("go", "GO"), ("store", "STORE"), ("eat", "EAT"), ("food", "FOOD"),
    ("like", "LIKE"), ("likes", "LIKE"), ("not", "NOT"), ("rain", "RAIN"), ("rains", "RAIN"),
    ("stay", "STAY"), ("home", "HOME"), ("tomorrow", "TOMORROW"), ("school", "SCHOOL"),
    ("teacher", "TEACHER"), ("book", "BOOK"), ("read", "READ"), ("happy", "HAPPY"),
    ("finish", "FINISH"), ("finished", "FINISH"), ("where", "WHERE"), ("what", "WHAT"),
    ("name", "NAME"), ("who", "WHO"), ("friend", "FRIEND"), ("car", "CAR"), ("drive", "DRIVE"),
    ("help", "HELP"), ("helps", "HELP"), ("today", "TODAY"), ("yesterday", "YESTERDAY"),
    ("coffee", "COFFEE"), ("drink", "DRINK"), ("drank", "DRINK"), ("sister", "SISTER"),
    ("brother", "BROTHER"), ("mother", "MOTHER"), ("mom", "MOTHER"), ("every day", "EVERYDAY"),
    ("how many", "HOW-MANY"),
]

CORPUS = [
    ("I want to go to the store.", "IX-1p WANT GO STORE"),
    ("Where do you work?", "IX-2p WORK WHERE"),
    ("My sister likes coffee.", "POSS-1p SISTER LIKE COFFEE"),
    ("If it rains tomorrow, I will stay home.", "TOMORROW RAIN IX-1p STAY HOME"),
    ("The teacher finished the book.", "TEACHER BOOK FINISH"),
    ("Do you like to read?", "IX-2p LIKE READ"),
    ("What is your name?", "POSS-2p NAME WHAT"),
    ("I do not drive a car.", "IX-1p DRIVE CAR NOT"),
    ("My brother rides his bike to school.", "POSS-1p BROTHER BICYCLE SCHOOL"),
    ("Did you eat today?", "TODAY IX-2p EAT FINISH"),
    ("Who is your friend?", "POSS-2p FRIEND WHO"),
    ("My mother helps me every day.", "POSS-1p MOTHER EVERYDAY HELP IX-1p"),
    ("Are you happy?", "IX-2p HAPPY"),
    ("Yesterday I drank coffee at the park.", "YESTERDAY IX-1p DRINK COFFEE fs-P-A-R-K"),
    ("The children play at school.", "KID PLAY SCHOOL"),
    ("How many books do you have?", "IX-2p BOOK HOW-MANY"),
]

TEST_SET = [
    ("Do you commute to work by bike?", "IX-2p TEND COMMUTE WORK BICYCLE"),
    ("Did the kids play at the park?", "KID PLAY-continuative fs-P-A-R-K-QMwg"),
    ("I want to eat.", "IX-1p WANT EAT"),
    ("Where is my book?", "POSS-1p BOOK WHERE"),
    ("My friend does not drive.", "POSS-1p FRIEND DRIVE NOT"),
]

# scripted completions for the two example sentences: (gloss, flag label)
RECORDED = {
    "Did the kids play at the park?": ("KID PLAY-continuative fs-P-A-R-K-QMwg", "1,0,0,0"),
    "Do you commute to work by bike?": ("IX-2p TEND COMMUTE WORK BICYCLE", "1,0,0,0"),
}

SIGN_GLOSSES = sorted({g for _, g in LEXICON if not g.startswith("fs-")}) + ["QMwg"]
LETTERS = [chr(c) for c in range(ord("A"), ord("Z") + 1)]

CONFIG = """\
# demo pipeline configuration; paths are relative to this file
cache_dir = "cache"

[data]
lexicon = "lexicon.tsv"
corpus = "corpus.tsv"
dictionary = "dict.bin"
test_set = "test.tsv"

[provider]
kind = "fixture"
fixture = "provider_fixture.json"
temperature = 0.0

[prompt]
n_examples = -1
batch_size = 300
limit_vocab = true
grammar_rules = true

[prompt.rag]
enabled = false
n = 5
anonymized = true

[match]
alpha_body = 1.0
alpha_face = 0.25
alpha_hands = 0.5

[blend]
window = 20
fps = 90.0
bookend_seconds = 0.5

[raster]
style = "default"

[qc]
flow_mag_max = 4.0
window = 5
jump_max = 0.05

[ablation]
data_prep = [true]
n_examples = [-1]
limit_vocab = [true, false]
grammar_rules = [true, false]
"""


def _rng(*key) -> np.random.Generator:
    seed = int(hashlib.sha256("\x00".join(map(str, key)).encode()).hexdigest()[:16], 16)
    return np.random.default_rng(seed)


def _lerp_shape(a: HandShape, b: HandShape, t: float) -> HandShape:
    return HandShape(
        wrist=(a.wrist[0] + t * (b.wrist[0] - a.wrist[0]), a.wrist[1] + t * (b.wrist[1] - a.wrist[1])),
        angle=a.angle + t * (b.angle - a.angle), size=a.size + t * (b.size - a.size),
        curl=a.curl + t * (b.curl - a.curl), facing=a.facing if t < 0.5 else b.facing,
        spread=a.spread + t * (b.spread - a.spread))


def _sign_keys(gloss: str, variant: int):
    rng = _rng(gloss, variant)
    two_handed = rng.random() < 0.4
    keys = []
    for _ in range(3):
        r = HandShape((rng.uniform(0.3, 0.6), rng.uniform(0.3, 0.72)), angle=rng.uniform(-0.6, 0.6),
                      curl=rng.uniform(0, 1), facing=int(rng.choice([-1, 1])), spread=rng.uniform(0, 0.2))
        if two_handed:
            l = replace(r, wrist=(1.0 - r.wrist[0] + rng.uniform(-0.03, 0.03), r.wrist[1]),
                        angle=-r.angle, facing=-r.facing)
        else:
            l = REST_LEFT
        keys.append((l, r))
    n = int(rng.integers(18, 27))
    return keys, n


def _letter_keys(letter: str):
    k = ord(letter) - ord("A")
    shape = HandShape((0.36, 0.45), angle=0.15 * ((k % 7) - 3), curl=(k % 5) / 4,
                      facing=1 if k % 3 else -1, spread=0.05 * (k % 4))
    nudge = replace(shape, wrist=(shape.wrist[0] + 0.01, shape.wrist[1] - 0.01))
    return [(REST_LEFT, shape), (REST_LEFT, nudge)], 14


def _question_keys():
    a = HandShape((0.4, 0.6), angle=0.5, curl=0.1, facing=-1, spread=0.15)
    b = HandShape((0.6, 0.6), angle=-0.5, curl=0.1, facing=1, spread=0.15)
    return [(b, a), (replace(b, wrist=(0.63, 0.58)), replace(a, wrist=(0.37, 0.58))), (b, a)], 22


def _render_clip(clip_id: str, gloss: str, keys, n: int, signer: str, rng: np.random.Generator) -> PoseClip:
    frames = []
    segs = len(keys) - 1
    for t in range(n):
        u = t / (n - 1) * segs
        i = min(int(u), segs - 1)
        f = u - i
        # ease in/out so signs start and end at rest velocity
        f = 0.5 - 0.5 * math.cos(math.pi * f)
        (l0, r0), (l1, r1) = keys[i], keys[i + 1]
        frames.append(compose(_lerp_shape(l0, l1, f), _lerp_shape(r0, r1, f)))
    groups = frames[0].schema.groups
    pts = {g: np.stack([fr[g] for fr in frames]) for g in groups}
    # camera framing differs per recording
    s = rng.uniform(0.8, 1.2)
    off = rng.uniform(-0.05, 0.05, 2)
    for g in groups:
        pts[g] = pts[g] * s
        pts[g][..., :2] += off
    valid = {g: np.ones(n, bool) for g in groups}
    lead = int(rng.integers(0, 3))
    for g in groups:
        valid[g][:lead] = False
    if rng.random() < 0.3:
        valid["left_hand"][int(rng.integers(lead + 1, n - 1))] = False
    return PoseClip(clip_id, gloss, pts, valid, 30.0, signer)


def _slug(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", s).strip("_")


def demo_clips() -> list[PoseClip]:
    clips = []
    for gloss in SIGN_GLOSSES:
        n_var = 1 + int(_rng("variants", gloss).integers(0, 3))
        for v in range(n_var):
            keys, n = _question_keys() if gloss == "QMwg" else _sign_keys(gloss, v)
            if gloss == "QMwg" and v:
                keys = [(replace(l, wrist=(l.wrist[0], l.wrist[1] + 0.03 * v)), r) for l, r in keys]
            rng = _rng("clip", gloss, v)
            clips.append(_render_clip(f"{_slug(gloss)}-v{v}", gloss, keys, n, f"signer-{v % 2}", rng))
    for letter in LETTERS:
        keys, n = _letter_keys(letter)
        clips.append(_render_clip(f"fs_{letter}-v0", f"fs-{letter}", keys, n, "signer-0", _rng("clip", letter)))
    return clips


def write_demo(out: str | Path, with_fixture: bool = True) -> Path:
    out = Path(out)
    (out / "clips").mkdir(parents=True, exist_ok=True)
    with open(out / "lexicon.tsv", "w", encoding="utf-8") as fh:
        fh.write("# word<TAB>gloss\n")
        for w, g in LEXICON:
            fh.write(f"{w}\t{g}\n")
    with open(out / "corpus.tsv", "w", encoding="utf-8") as fh:
        for e, g in CORPUS:
            fh.write(f"{e}\t{g}\n")
    with open(out / "test.tsv", "w", encoding="utf-8") as fh:
        for e, g in TEST_SET:
            fh.write(f"{e}\t{g}\n")
    for i, clip in enumerate(demo_clips()):
        if i % 2:
            write_clip_binary(clip, out / "clips" / f"{clip.id}.posc")
        else:
            write_clip_jsonl(clip, out / "clips" / f"{clip.id}.jsonl")
    (out / "config.toml").write_text(CONFIG, encoding="utf-8")
    if with_fixture:
        src = resources.files("aslgen.data").joinpath("demo_fixture.json")
        with resources.as_file(src) as p:
            shutil.copyfile(p, out / "provider_fixture.json")
    return out


def record_fixture(workspace: str | Path) -> list[FixtureRecord]:
    """Re-record the demo fixture by running the prompt plans against the scripted completions."""
    from .config import load_config
    from .pipeline import Pipeline

    workspace = Path(workspace)
    rules = []
    for sentence, (gloss, label) in RECORDED.items():
        rules.append((f"Sentence: {sentence}", label))
        rules.append((f"gloss: {sentence}", gloss))
    rec = RecordingProvider(MockProvider(rules))
    cfg = load_config(workspace / "config.toml", ["provider.kind='offline'", "cache_dir='cache-record'"])
    pipe = Pipeline(cfg, client=rec)
    for sentence in RECORDED:
        pipe.translate(sentence)
        pipe.classify(sentence)
    shutil.rmtree(cfg.resolve(cfg.cache_dir), ignore_errors=True)
    out = []
    for r in rec.records:
        sentence = next(s for s in RECORDED if s in r.note or RECORDED[s][0] == r.completion)
        stage = "classify" if "Sentence:" in r.note else "translate"
        out.append(FixtureRecord(r.hash, r.completion, f"{stage}: {sentence}"))
    return out
