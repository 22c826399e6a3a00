"""Batch evaluation: external provers over problem corpora, and the
three-word association study.

Prover runs are classified from their output by configurable regexes
(defaults match SZS status lines) with a per-process CPU limit and a
wall-clock deadline slightly above it. A missing prover binary is fatal;
unclassifiable output counts as an error outcome and the batch goes on.
"""

from __future__ import annotations

import csv
import json
import math
import os
import re
import resource
import shlex
import signal
import subprocess
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO, Any, Callable, Iterable, Mapping, Sequence

from .errors import AxselError
from .fol import And, Atom, Forall, Var
from .kb import Goal, KnowledgeBase, parse_goal
from .mapping import DEFAULT_RULES, NormalizationRules
from .selection import SelectionResult


class ProverNotFound(AxselError):
    pass


class HarnessError(AxselError):
    pass


@dataclass(frozen=True)
class OutcomePatterns:
    """First match wins, in proof, model, timeout order."""

    proof: str = r"SZS status (Theorem|Unsatisfiable)"
    model: str = r"SZS status (CounterSatisfiable|Satisfiable)"
    timeout: str = r"SZS status (Timeout|ResourceOut)"

    def classify(self, text: str) -> str | None:
        for outcome, pattern in (
            ("proof", self.proof),
            ("model", self.model),
            ("timeout", self.timeout),
        ):
            if re.search(pattern, text):
                return outcome
        return None


DEFAULT_PATTERNS = OutcomePatterns()

OUTCOMES = ("proof", "model", "timeout", "error", "skipped")


@dataclass(frozen=True)
class ProblemRun:
    problem_id: str
    strategy: str
    params: dict[str, Any]
    selected_count: int
    outcome: str
    wall_seconds: float
    cpu_seconds: float


def write_prover_input(
    kb: KnowledgeBase, selection: SelectionResult, goal: Goal, path: str | Path
) -> None:
    """Selected axioms in rank order, then the goal, prover-ready."""
    with open(path, "w", encoding="utf-8") as fh:
        for entry in selection:
            fh.write(kb.axiom(entry.axiom_id).to_tptp() + "\n")
        fh.write(goal.to_tptp())


def _format_timeout(timeout: float) -> str:
    return str(int(timeout)) if timeout == int(timeout) else str(timeout)


def render_command(template: str, input_path: Path, timeout: float) -> list[str]:
    if "{input}" not in template:
        raise HarnessError("prover command template must contain the {input} placeholder")
    argv = []
    for token in shlex.split(template):
        token = token.replace("{input}", str(input_path))
        token = token.replace("{timeout}", _format_timeout(timeout))
        argv.append(token)
    return argv


def _cpu_limit_hook(seconds: int) -> Callable[[], None]:
    def hook() -> None:
        resource.setrlimit(resource.RLIMIT_CPU, (seconds, seconds + 1))

    return hook


def _execute(
    argv: Sequence[str], log_path: Path, timeout: float, grace: float
) -> tuple[int, float, float, bool]:
    """Run one prover process: (exit code, wall s, cpu s, timed out).

    CPU time is limited by the kernel; the wall deadline of
    timeout + grace catches provers that sleep instead of computing.
    """
    start = time.monotonic()
    limit = max(1, math.ceil(timeout))
    try:
        with open(log_path, "w", encoding="utf-8") as log:
            proc = subprocess.Popen(
                argv,
                stdout=log,
                stderr=subprocess.STDOUT,
                preexec_fn=_cpu_limit_hook(limit),
            )
    except FileNotFoundError:
        raise ProverNotFound(f"prover executable {argv[0]!r} not found") from None
    deadline = start + timeout + grace
    timed_out = False
    while True:
        pid, status, usage = os.wait4(proc.pid, os.WNOHANG)
        if pid == proc.pid:
            break
        if time.monotonic() >= deadline:
            timed_out = True
            proc.kill()
            pid, status, usage = os.wait4(proc.pid, 0)
            break
        time.sleep(0.01)
    # Reaped by wait4 above; hand Popen the decoded status so it does
    # not wait again.
    proc.returncode = os.waitstatus_to_exitcode(status)
    wall = time.monotonic() - start
    cpu = usage.ru_utime + usage.ru_stime
    if proc.returncode in (-signal.SIGXCPU, -signal.SIGKILL):
        timed_out = True
    return proc.returncode, wall, cpu, timed_out


def _problem_files(problems: str | Path | Iterable[Path]) -> list[Path]:
    if isinstance(problems, (str, Path)):
        root = Path(problems)
        files = [p for p in root.iterdir() if p.suffix in (".p", ".tptp")]
        return sorted(files)
    return list(problems)


def run_corpus(
    problems: str | Path | Iterable[Path],
    kb: KnowledgeBase,
    select: Callable[[Goal], SelectionResult],
    out_dir: str | Path,
    prover_cmd: str | None = None,
    timeout: float = 15.0,
    patterns: OutcomePatterns = DEFAULT_PATTERNS,
    jobs: int = 1,
    grace: float = 1.0,
    strategy: str = "",
    params: Mapping[str, Any] | None = None,
) -> list[ProblemRun]:
    """Select and (optionally) prove every problem in a directory.

    Without a prover command every outcome is `skipped`; the prover
    input files are written either way.
    """
    files = _problem_files(problems)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_params = dict(params or {})

    def one(path: Path) -> ProblemRun:
        goal = parse_goal(path)
        selection = select(goal)
        input_path = out_dir / (path.stem + ".sel.p")
        write_prover_input(kb, selection, goal, input_path)
        if prover_cmd is None:
            return ProblemRun(path.stem, strategy, run_params, len(selection), "skipped", 0.0, 0.0)
        argv = render_command(prover_cmd, input_path, timeout)
        log_path = out_dir / (path.stem + ".out")
        _, wall, cpu, timed_out = _execute(argv, log_path, timeout, grace)
        hint = patterns.classify(log_path.read_text(encoding="utf-8", errors="replace"))
        outcome = hint or ("timeout" if timed_out else "error")
        return ProblemRun(path.stem, strategy, run_params, len(selection), outcome, wall, cpu)

    if jobs <= 1:
        return [one(path) for path in files]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, files))


def outcome_counts(runs: Iterable[ProblemRun]) -> dict[str, int]:
    counts = Counter(run.outcome for run in runs)
    return {outcome: counts.get(outcome, 0) for outcome in OUTCOMES}


# ---------------------------------------------------------------------------
# Word-association study: three query words, one hidden target word.

@dataclass(frozen=True)
class FratTask:
    query_words: tuple[str, str, str]
    target_word: str

    def __post_init__(self) -> None:
        words = (*self.query_words, self.target_word)
        if len(self.query_words) != 3:
            raise ValueError("a task has exactly 3 query words")
        for word in words:
            if not word or word != word.lower():
                raise ValueError(f"task words must be non-empty lowercase, got {word!r}")


def load_frat_tasks(source: IO[str]) -> list[FratTask]:
    """CSV rows `w1,w2,w3,target`, one task per line; header optional."""
    tasks: list[FratTask] = []
    for lineno, row in enumerate(csv.reader(source), start=1):
        if not row:
            continue
        if lineno == 1 and [f.strip() for f in row] == ["w1", "w2", "w3", "target"]:
            continue
        if len(row) != 4:
            raise HarnessError(f"line {lineno}: expected 4 comma-separated words")
        w1, w2, w3, target = (field.strip().lower() for field in row)
        tasks.append(FratTask((w1, w2, w3), target))
    return tasks


def frat_goal(task: FratTask) -> Goal:
    """Conjecture `! [X] : (w1(X) & w2(X) & w3(X))` over the query words."""
    x = Var("X")
    w1, w2, w3 = task.query_words
    body = And(And(Atom(w1, (x,)), Atom(w2, (x,))), Atom(w3, (x,)))
    return Goal.make(Forall(("X",), body))


@dataclass(frozen=True)
class FratRow:
    k: int
    tasks: int
    hits: int
    hit_rate: float
    # Mean 1-based rank of the first hit axiom, averaged over hits only;
    # None when nothing hit.
    avg_target_position: float | None
    avg_selected: float


@dataclass(frozen=True)
class FratReport:
    strategy: str
    rows: tuple[FratRow, ...]


def _axiom_word_index(
    kb: KnowledgeBase, rules: NormalizationRules
) -> dict[str, frozenset[str]]:
    out: dict[str, frozenset[str]] = {}
    for axiom in kb:
        words: set[str] = set()
        for sym in axiom.symbols:
            normalized = rules.normalize(sym)
            words.add(normalized)
            words.update(normalized.split("_"))
        out[axiom.id] = frozenset(words)
    return out


def run_frat(
    tasks: Sequence[FratTask],
    kb: KnowledgeBase,
    selector: Callable[[Goal, int], SelectionResult],
    values: Sequence[int],
    rules: NormalizationRules = DEFAULT_RULES,
    strategy: str = "vector",
) -> FratReport:
    """Evaluate one selection strategy over the task list.

    For each parameter value (k or depth, depending on the selector) a
    task is a hit when the normalized target word occurs in a selected
    axiom's normalized symbols (whole token or one of its components).
    """
    axiom_words = _axiom_word_index(kb, rules)
    rows = []
    for value in sorted(values):
        hits = 0
        positions: list[int] = []
        sizes: list[int] = []
        for task in tasks:
            goal = frat_goal(task)
            selection = selector(goal, value)
            sizes.append(len(selection))
            target = rules.normalize(task.target_word)
            for rank, entry in enumerate(selection, start=1):
                if target in axiom_words[entry.axiom_id]:
                    hits += 1
                    positions.append(rank)
                    break
        n = len(tasks)
        rows.append(
            FratRow(
                k=value,
                tasks=n,
                hits=hits,
                hit_rate=hits / n if n else 0.0,
                avg_target_position=sum(positions) / hits if hits else None,
                avg_selected=sum(sizes) / n if n else 0.0,
            )
        )
    return FratReport(strategy=strategy, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Report rendering

def emit_report(report: FratReport | Sequence[ProblemRun], fmt: str, out: IO[str]) -> None:
    """JSON or TSV rendering; corpus TSV is one row per problem run,
    study TSV one row per parameter value, ascending."""
    if fmt not in ("json", "tsv"):
        raise HarnessError(f"unknown report format {fmt!r}")
    if isinstance(report, FratReport):
        _emit_frat(report, fmt, out)
    else:
        _emit_corpus(list(report), fmt, out)


def _emit_frat(report: FratReport, fmt: str, out: IO[str]) -> None:
    if fmt == "json":
        payload = {"strategy": report.strategy, "rows": [asdict(row) for row in report.rows]}
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
        return
    out.write("k\thit_rate\tavg_target_position\tavg_selected\ttasks\thits\n")
    for row in report.rows:
        pos = "" if row.avg_target_position is None else f"{row.avg_target_position:.6g}"
        out.write(
            f"{row.k}\t{row.hit_rate:.6g}\t{pos}\t{row.avg_selected:.6g}"
            f"\t{row.tasks}\t{row.hits}\n"
        )


def _emit_corpus(runs: list[ProblemRun], fmt: str, out: IO[str]) -> None:
    if fmt == "json":
        payload = {
            "counts": outcome_counts(runs),
            "runs": [asdict(run) for run in runs],
        }
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
        return
    out.write("problem_id\tstrategy\tselected\toutcome\twall_s\tcpu_s\n")
    for run in runs:
        out.write(
            f"{run.problem_id}\t{run.strategy}\t{run.selected_count}\t{run.outcome}"
            f"\t{run.wall_seconds:.3f}\t{run.cpu_seconds:.3f}\n"
        )
