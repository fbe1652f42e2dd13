"""Training-corpus assembly: select, bin, tag, shuffle, and manifest.

The pipeline is a deterministic function of (input files, config):
score the BT corpus, optionally filter or mix by score, bin the selected
pairs, tag sources (quality bins or a single BT marker) and bitext per
policy, tag translit labels, shuffle with the configured seed, then write
the corpus plus a key-value manifest capturing input hashes, cutpoints,
and counts. Running twice with the same inputs is byte-identical.
"""

from __future__ import annotations

import hashlib
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import binning as binning_mod
from . import tags, translit
from .corpus import Corpus, Origin, SentencePair, write_pairs
from .errors import (
    BtprepError,
    ConfigError,
    DuplicateId,
    SampleTooLarge,
    TooFewPairs,
)
from .kvfile import write_kv
from .quality import (
    ScoredPair,
    score_corpus_embeddings,
    score_corpus_external,
    score_corpus_roundtrip,
)

PRNG_IDENTITY = "numpy-pcg64"
EQUAL_VOLUME_TIE_BREAK = "score,pair_id"


def topk_filter(
    scored: Sequence[ScoredPair],
    count: int | None = None,
    threshold: float | None = None,
) -> list[ScoredPair]:
    """Keep the `count` highest-scored pairs, or all with score >= threshold.

    Exactly one selector must be given. Score ties under the count
    selector break toward the lower pair id; output is sorted by pair id.
    """
    if (count is None) == (threshold is None):
        raise ConfigError("exactly one of count or threshold must be given")
    if count is not None:
        if count < 0:
            raise ConfigError(f"count must be >= 0, got {count}")
        if count > len(scored):
            raise TooFewPairs(f"requested top {count} of {len(scored)} pairs")
        ranked = sorted(scored, key=lambda sp: (-sp.score, sp.pair.id))
        kept = ranked[:count]
    else:
        kept = [sp for sp in scored if sp.score >= threshold]
    return sorted(kept, key=lambda sp: sp.pair.id)


def mix_sample(
    topk: Sequence[ScoredPair],
    remainder: Sequence[ScoredPair],
    m: int,
    seed: int,
) -> list[ScoredPair]:
    """Union of topk with m remainder pairs sampled uniformly without
    replacement; deterministic under seed, sampled part sorted by pair id."""
    if m > len(remainder):
        raise SampleTooLarge(f"sample of {m} from {len(remainder)} remainder pairs")
    top_ids = {sp.pair.id for sp in topk}
    for sp in remainder:
        if sp.pair.id in top_ids:
            raise DuplicateId(f"pair {sp.pair.id} in both topk and remainder")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(remainder), size=m, replace=False) if m else []
    sampled = sorted((remainder[int(i)] for i in chosen), key=lambda sp: sp.pair.id)
    return list(topk) + sampled


@dataclass(frozen=True)
class ScoringConfig:
    """Where pair scores come from: a precomputed sidecar, embedding
    sidecars, or a round-trip translation file."""

    kind: str  # external | embeddings | roundtrip
    path: str | None = None
    src_path: str | None = None
    tgt_path: str | None = None

    def validate(self) -> None:
        if self.kind == "external" or self.kind == "roundtrip":
            if not self.path:
                raise ConfigError(f"{self.kind} scoring needs a path")
        elif self.kind == "embeddings":
            if not self.src_path or not self.tgt_path:
                raise ConfigError("embeddings scoring needs src and tgt paths")
        else:
            raise ConfigError(f"unknown scoring kind {self.kind!r}")

    def input_paths(self) -> list[str]:
        if self.kind == "embeddings":
            return [self.src_path, self.tgt_path]
        return [self.path]

    def score(self, corpus) -> list[ScoredPair]:
        if self.kind == "external":
            return list(score_corpus_external(corpus, self.path))
        if self.kind == "embeddings":
            return list(score_corpus_embeddings(corpus, self.src_path, self.tgt_path))
        return list(score_corpus_roundtrip(corpus, self.path))


@dataclass(frozen=True)
class BinningConfig:
    method: str = "equal-volume"  # equal-volume | equal-width | random
    k: int = binning_mod.DEFAULT_BINS
    seed: int = 0  # random method only

    def validate(self) -> None:
        if self.method not in ("equal-volume", "equal-width", "random"):
            raise ConfigError(f"unknown binning method {self.method!r}")
        if self.k < 1:
            raise ConfigError(f"bin count must be >= 1, got {self.k}")

    def run(self, scores: dict[int, float]) -> binning_mod.Binning:
        if self.method == "equal-volume":
            return binning_mod.equal_volume(scores, self.k)
        if self.method == "equal-width":
            return binning_mod.equal_width(scores, self.k)
        return binning_mod.random_bins(list(scores), self.k, self.seed)


@dataclass(frozen=True)
class TranslitConfig:
    """Candidate generator choice: a table file or the rule romanizer."""

    kind: str  # table | romanize
    path: str | None = None
    language: str | None = None
    n: int = translit.DEFAULT_NUM_CANDIDATES

    def validate(self) -> None:
        if self.kind == "table":
            if not self.path:
                raise ConfigError("table candidates need a path")
        elif self.kind == "romanize":
            if not self.language:
                raise ConfigError("romanize candidates need a language")
        else:
            raise ConfigError(f"unknown candidate kind {self.kind!r}")
        if self.n < 1:
            raise ConfigError(f"num candidates must be >= 1, got {self.n}")

    def generator(self) -> translit.CandidateGenerator:
        if self.kind == "table":
            return translit.TableGenerator.from_file(self.path, self.n)
        return translit.RuleRomanizer(self.language, self.n)


@dataclass(frozen=True)
class AssemblyConfig:
    bt_path: str
    output_path: str
    bitext_path: str | None = None
    scoring: ScoringConfig | None = None
    binning: BinningConfig | None = None
    bt_tag: bool = False
    bitext_policy: str = "untagged"  # untagged | fixed-top-bin | scored
    bitext_scoring: ScoringConfig | None = None
    translit_side: str = "off"  # off | target | source
    translit_gen: TranslitConfig | None = None
    filter_count: int | None = None
    filter_threshold: float | None = None
    mix_top: int | None = None
    mix_extra: int | None = None
    mix_seed: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.bt_tag and self.binning is not None:
            raise ConfigError("bt_tag and quality binning are mutually exclusive")
        if self.bitext_policy not in ("untagged", "fixed-top-bin", "scored"):
            raise ConfigError(f"unknown bitext policy {self.bitext_policy!r}")
        if self.bitext_policy != "untagged":
            if self.binning is None:
                raise ConfigError(f"{self.bitext_policy} policy requires quality binning")
            if self.bitext_path is None:
                raise ConfigError(f"{self.bitext_policy} policy requires a bitext corpus")
        if self.bitext_policy == "scored":
            if self.bitext_scoring is None:
                raise ConfigError("scored policy requires bitext scores")
            if self.binning.method == "random":
                raise ConfigError("scored policy needs score cutpoints; random binning has none")
            self.bitext_scoring.validate()
        if self.translit_side not in ("off", "target", "source"):
            raise ConfigError(f"unknown translit side {self.translit_side!r}")
        if self.translit_side != "off":
            if self.translit_gen is None:
                raise ConfigError("translit tagging requires a candidate generator")
            self.translit_gen.validate()
        if self.filter_count is not None and self.filter_threshold is not None:
            raise ConfigError("filter count and threshold are mutually exclusive")
        has_filter = self.filter_count is not None or self.filter_threshold is not None
        has_mix = self.mix_top is not None or self.mix_extra is not None
        if has_mix and (self.mix_top is None or self.mix_extra is None):
            raise ConfigError("mix needs both a top count and an extra count")
        if has_filter and has_mix:
            raise ConfigError("filter and mix are mutually exclusive")
        needs_scores = (
            has_filter
            or has_mix
            or (self.binning is not None and self.binning.method != "random")
        )
        if needs_scores and self.scoring is None:
            raise ConfigError("configuration requires scores but no scoring source given")
        if self.scoring is not None:
            self.scoring.validate()
        if self.binning is not None:
            self.binning.validate()


@contextmanager
def stage(name: str):
    """Attach the failing stage name to any domain error raised inside."""
    try:
        yield
    except BtprepError as err:
        if not getattr(err, "stage", None):
            err.stage = name
        raise


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _fmt_float(value: float) -> str:
    return repr(float(value))


def assemble_training_set(config: AssemblyConfig) -> dict[str, str]:
    """Run the full assembly; writes the corpus and `<output>.manifest`,
    returns the manifest entries."""
    with stage("config"):
        config.validate()

    with stage("read"):
        bt_pairs = Corpus(config.bt_path, Origin.BT).pairs()
        bitext_pairs = (
            Corpus(config.bitext_path, Origin.BITEXT).pairs() if config.bitext_path else []
        )

    scores: dict[int, float] = {}
    selected = bt_pairs
    if config.scoring is not None:
        with stage("score"):
            scored = config.scoring.score(bt_pairs)
            scores = {sp.pair.id: sp.score for sp in scored}
        with stage("select"):
            if config.filter_count is not None or config.filter_threshold is not None:
                kept = topk_filter(
                    scored, count=config.filter_count, threshold=config.filter_threshold
                )
            elif config.mix_top is not None:
                top = topk_filter(scored, count=config.mix_top)
                top_ids = {sp.pair.id for sp in top}
                rest = [sp for sp in scored if sp.pair.id not in top_ids]
                kept = mix_sample(top, rest, config.mix_extra, config.mix_seed)
                kept = sorted(kept, key=lambda sp: sp.pair.id)
            else:
                kept = scored
            selected = [sp.pair for sp in kept]

    binning = None
    if config.binning is not None:
        with stage("bin"):
            selected_scores = {pair.id: scores.get(pair.id, 0.0) for pair in selected}
            binning = config.binning.run(selected_scores)

    labels: dict[tuple[str, int], str] = {}
    if config.translit_side != "off":
        with stage("translit"):
            gen = config.translit_gen.generator()
            for pair in bitext_pairs:
                labels[("bitext", pair.id)] = translit.classify_pair(pair, gen)
            for pair in selected:
                labels[("bt", pair.id)] = translit.classify_pair(pair, gen)

    with stage("tag"):
        tagged_bt = []
        for pair in selected:
            if binning is not None:
                pair = tags.apply_quality_tag(pair, binning.assignment[pair.id], binning.k)
            elif config.bt_tag:
                pair = tags.apply_bt_tag(pair)
            tagged_bt.append(pair)

        bitext_bins: dict[int, int] = {}
        if config.bitext_policy == "scored":
            bitext_scored = config.bitext_scoring.score(bitext_pairs)
            bitext_bins = {
                sp.pair.id: binning_mod.apply_boundaries(
                    sp.score, binning.boundaries, binning.k
                )
                for sp in bitext_scored
            }
        tagged_bitext = []
        for pair in bitext_pairs:
            if config.bitext_policy == "fixed-top-bin":
                pair = tags.apply_quality_tag(pair, binning.k, binning.k)
            elif config.bitext_policy == "scored":
                pair = tags.apply_quality_tag(pair, bitext_bins[pair.id], binning.k)
            tagged_bitext.append(pair)

    if config.translit_side != "off":
        with stage("translit-tag"):
            tagged_bitext = [
                tags.apply_translit_tag(
                    pair, f"<{labels[('bitext', pair.id)]}>", config.translit_side
                )
                for pair in tagged_bitext
            ]
            tagged_bt = [
                tags.apply_translit_tag(
                    pair, f"<{labels[('bt', pair.id)]}>", config.translit_side
                )
                for pair in tagged_bt
            ]

    with stage("combine"):
        combined = tagged_bitext + tagged_bt
        seen = set()
        for pair in combined:
            key = (pair.origin, pair.id)
            if key in seen:
                raise DuplicateId(f"pair {pair.id} ({pair.origin.value}) appears twice")
            seen.add(key)
        if len(combined) != len(bitext_pairs) + len(selected):
            raise BtprepError("pair count not conserved across tagging")

    with stage("shuffle"):
        rng = np.random.default_rng(config.seed)
        order = rng.permutation(len(combined))
        shuffled = [combined[int(i)] for i in order]

    with stage("write"):
        write_pairs(shuffled, config.output_path)
        manifest = build_manifest(config, binning, shuffled, len(bt_pairs), len(selected))
        write_kv(manifest, manifest_path(config.output_path))
    return manifest


def manifest_path(output_path) -> Path:
    return Path(str(output_path) + ".manifest")


def build_manifest(
    config: AssemblyConfig,
    binning: binning_mod.Binning | None,
    output_pairs: Sequence[SentencePair],
    n_bt_total: int,
    n_bt_selected: int,
) -> dict[str, str]:
    from . import __version__

    entries: dict[str, str] = {
        "tool": f"btprep {__version__}",
        "prng": PRNG_IDENTITY,
        "seed": str(config.seed),
    }
    entries["bt_path"] = str(config.bt_path)
    entries["bt_sha256"] = file_sha256(config.bt_path)
    if config.bitext_path:
        entries["bitext_path"] = str(config.bitext_path)
        entries["bitext_sha256"] = file_sha256(config.bitext_path)
    for prefix, scoring in (("scores", config.scoring), ("bitext_scores", config.bitext_scoring)):
        if scoring is None:
            continue
        paths = scoring.input_paths()
        entries[f"{prefix}_kind"] = scoring.kind
        entries[f"{prefix}_inputs"] = ",".join(str(p) for p in paths)
        entries[f"{prefix}_sha256"] = ",".join(file_sha256(p) for p in paths)
    if config.translit_gen is not None and config.translit_gen.kind == "table":
        entries["candidates_sha256"] = file_sha256(config.translit_gen.path)

    entries["bitext_policy"] = config.bitext_policy
    entries["bt_tag"] = "true" if config.bt_tag else "false"
    entries["translit_side"] = config.translit_side
    if config.translit_gen is not None:
        gen = config.translit_gen
        entries["translit_candidates"] = (
            f"table:{gen.path}" if gen.kind == "table" else f"romanize:{gen.language}"
        )
        entries["translit_n"] = str(gen.n)
    if config.filter_count is not None:
        entries["filter"] = f"count:{config.filter_count}"
    elif config.filter_threshold is not None:
        entries["filter"] = f"threshold:{_fmt_float(config.filter_threshold)}"
    if config.mix_top is not None:
        entries["mix"] = f"top:{config.mix_top},extra:{config.mix_extra},seed:{config.mix_seed}"
    if binning is not None:
        entries["binning_method"] = binning.method
        entries["bins"] = str(binning.k)
        entries["bin_boundaries"] = ",".join(_fmt_float(b) for b in binning.boundaries)
        if binning.method == "equal_volume":
            entries["equal_volume_tie_break"] = EQUAL_VOLUME_TIE_BREAK
        if binning.method == "random":
            entries["binning_seed"] = str(config.binning.seed)

    entries["n_bt_total"] = str(n_bt_total)
    entries["n_bt_selected"] = str(n_bt_selected)
    entries["n_bitext"] = str(len(output_pairs) - n_bt_selected)
    entries["n_output"] = str(len(output_pairs))

    bin_counts: dict[int, int] = {}
    txn = both = 0
    for pair in output_pairs:
        tag, _ = tags.strip_leading_tag(pair.source)
        if tag and tag.startswith("<bin"):
            bin_counts[int(tag[4:-1])] = bin_counts.get(int(tag[4:-1]), 0) + 1
        for text in (pair.source, pair.target):
            leading, _ = tags.strip_all_tags(text)
            if tags.TXN_TAG in leading:
                txn += 1
            if tags.BOTH_TAG in leading:
                both += 1
    if binning is not None:
        for b in range(1, binning.k + 1):
            entries[f"bin_count_{b}"] = str(bin_counts.get(b, 0))
    if config.translit_side != "off":
        entries["txn_count"] = str(txn)
        entries["both_count"] = str(both)
    entries["oracle_only"] = "true" if config.translit_side == "source" else "false"
    return entries
