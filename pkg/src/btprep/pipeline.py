"""Round-based pipeline around external translator commands, plus the
topk grid-search harness.

External systems are opaque shell commands with path placeholders and
exit-code success signaling. Each round produces BT data, scores it,
and assembles a training corpus under `workdir/round_N/`. Round status
lives in a plain key-value state file, so a crashed run resumes at the
first round that never finished; a fully finished pipeline reruns as a
no-op. A lock file makes the workdir single-owner.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass, replace
from pathlib import Path

from filelock import FileLock, Timeout

from .assemble import AssemblyConfig, ScoringConfig, assemble_training_set, topk_filter
from .corpus import Corpus, Origin, write_pairs
from .errors import (
    CommandFailed,
    ConfigError,
    SelectorExceedsCorpus,
    TooFewPairs,
    WorkdirLocked,
)
from .kvfile import read_kv, write_kv
from .quality import score_corpus_external

STATUS_PENDING = "Pending"
STATUS_DONE = "Done"
STATUS_FAILED = "Failed"


@dataclass(frozen=True)
class PipelineConfig:
    assembly: AssemblyConfig
    workdir: str
    rounds: int = 1
    translator_command: str | None = None  # template with {input} and {output}
    scorer_command: str | None = None  # template with {corpus} and {scores}
    mono_path: str | None = None  # substituted for {input}

    def validate(self) -> None:
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.rounds > 1 and self.translator_command is None:
            raise ConfigError("multiple rounds require a translator command")
        if self.translator_command is not None:
            _check_template(self.translator_command, "{input}", "{output}")
            if not self.mono_path:
                raise ConfigError("translator command requires a mono input path")
        if self.scorer_command is not None:
            _check_template(self.scorer_command, "{corpus}", "{scores}")
        assembly = self.assembly
        if self.scorer_command is not None:
            # scoring is injected per round from the scorer command's output
            assembly = replace(assembly, scoring=ScoringConfig("external", path="per-round"))
        assembly.validate()


def _check_template(template: str, *placeholders: str) -> None:
    for ph in placeholders:
        if template.count(ph) != 1:
            raise ConfigError(f"command template must contain {ph} exactly once: {template!r}")


@dataclass(frozen=True)
class RoundResult:
    index: int
    bt_path: Path
    scores_path: Path | None
    corpus_path: Path
    manifest_path: Path


def _state_path(workdir: Path) -> Path:
    return workdir / "state"


def _read_state(workdir: Path) -> dict[str, str]:
    path = _state_path(workdir)
    return read_kv(path) if path.exists() else {}


def _set_round_status(workdir: Path, state: dict[str, str], index: int, status: str) -> None:
    state[f"round_{index}_status"] = status
    write_kv(state, _state_path(workdir))


def _run_command(command: str, round_index: int) -> None:
    proc = subprocess.run(command, shell=True)
    if proc.returncode != 0:
        raise CommandFailed(round_index, command, proc.returncode)


def run_iterative(config: PipelineConfig) -> list[RoundResult]:
    """Run all rounds, resuming past any already marked Done."""
    config.validate()
    workdir = Path(config.workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    lock = FileLock(workdir / "lock")
    try:
        lock.acquire(timeout=0)
    except Timeout:
        raise WorkdirLocked(f"workdir {workdir} is owned by another run") from None
    try:
        return _run_rounds(config, workdir)
    finally:
        lock.release()


def _run_rounds(config: PipelineConfig, workdir: Path) -> list[RoundResult]:
    state = _read_state(workdir)
    state["rounds"] = str(config.rounds)
    results = []
    for index in range(1, config.rounds + 1):
        round_dir = workdir / f"round_{index}"
        bt_path = round_dir / "bt.tsv" if config.translator_command else Path(config.assembly.bt_path)
        scores_path = round_dir / "scores.tsv" if config.scorer_command else None
        corpus_path = round_dir / "corpus.tsv"
        result = RoundResult(
            index, bt_path, scores_path, corpus_path, Path(str(corpus_path) + ".manifest")
        )
        if state.get(f"round_{index}_status") == STATUS_DONE:
            results.append(result)
            continue
        round_dir.mkdir(parents=True, exist_ok=True)
        state[f"round_{index}_input"] = str(config.mono_path or config.assembly.bt_path)
        state[f"round_{index}_bt"] = str(bt_path)
        state[f"round_{index}_corpus"] = str(corpus_path)
        _set_round_status(workdir, state, index, STATUS_PENDING)
        try:
            if config.translator_command:
                command = config.translator_command.replace(
                    "{input}", str(config.mono_path)
                ).replace("{output}", str(bt_path))
                _run_command(command, index)
            assembly = replace(config.assembly, bt_path=str(bt_path), output_path=str(corpus_path))
            if config.scorer_command:
                command = config.scorer_command.replace("{corpus}", str(bt_path)).replace(
                    "{scores}", str(scores_path)
                )
                _run_command(command, index)
                state[f"round_{index}_scores"] = str(scores_path)
                assembly = replace(
                    assembly, scoring=ScoringConfig(kind="external", path=str(scores_path))
                )
            assemble_training_set(assembly)
        except Exception:
            _set_round_status(workdir, state, index, STATUS_FAILED)
            raise
        _set_round_status(workdir, state, index, STATUS_DONE)
        results.append(result)
    return results


@dataclass(frozen=True)
class GridSearchSpec:
    corpus_path: str
    scores_path: str
    output_dir: str
    selectors: list[int] | list[float]
    kind: str = "count"  # count | threshold

    def validate(self) -> None:
        if not self.selectors:
            raise ConfigError("selectors must be non-empty")
        if self.kind not in ("count", "threshold"):
            raise ConfigError(f"unknown selector kind {self.kind!r}")
        if self.kind == "count":
            if any(int(s) != s or s < 0 for s in self.selectors):
                raise ConfigError("count selectors must be non-negative integers")
            if sorted(set(self.selectors)) != list(self.selectors):
                raise ConfigError("count selectors must be strictly increasing")


@dataclass(frozen=True)
class GridEntry:
    selector: int | float
    output_path: Path
    n_pairs: int


def run_grid_search(spec: GridSearchSpec) -> list[GridEntry]:
    """Emit one topk-filtered corpus per selector plus a report file.

    Count selections are nested: each larger count is a superset of the
    smaller ones, since ranking is fixed across selectors.
    """
    spec.validate()
    pairs = Corpus(spec.corpus_path, Origin.BT).pairs()
    scored = list(score_corpus_external(pairs, spec.scores_path))
    output_dir = Path(spec.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for selector in spec.selectors:
        if spec.kind == "count":
            if selector > len(scored):
                raise SelectorExceedsCorpus(
                    f"selector {selector} exceeds corpus size {len(scored)}"
                )
            try:
                kept = topk_filter(scored, count=int(selector))
            except TooFewPairs as err:
                raise SelectorExceedsCorpus(str(err)) from None
            name = f"top{int(selector)}.tsv"
        else:
            kept = topk_filter(scored, threshold=float(selector))
            name = f"ge{float(selector)!r}.tsv"
        out_path = output_dir / name
        write_pairs((sp.pair for sp in kept), out_path)
        entries.append(GridEntry(selector, out_path, len(kept)))
    with open(output_dir / "grid_report.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for entry in entries:
            fh.write(f"{entry.selector}\t{entry.output_path}\t{entry.n_pairs}\n")
    return entries
