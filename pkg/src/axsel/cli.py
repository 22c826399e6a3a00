"""Command-line entry point.

Subcommands: select, stats, map build, eval prove, eval frat. Every
flag can instead come from a TOML config file (--config); flags given
on the command line win. All commands are deterministic given identical
inputs, and an empty selection is a completion, not a failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path
from typing import IO, Any, Callable, Iterator

import tomli

from .embeddings import EmbeddingStore, load_embedding
from .errors import AxselError
from .harness import emit_report, load_frat_tasks, run_corpus, run_frat
from .kb import Goal, KnowledgeBase, parse_goal, parse_kb
from .mapping import (
    SymbolMapping,
    build_mapping,
    load_lexical_table,
    load_mapping_tsv,
    write_mapping_tsv,
)
from .selection import SelectionResult
from .simsine import SimSineConfig, build_sim_trigger_index, similarity_sine_select
from .sine import SineConfig, build_trigger_index, sine_select
from .stats import compute_stats, write_stats_tsv
from .vectors import (
    GoalNotVectorizable,
    cache_path,
    load_index,
    most_similar,
    save_index,
    vb_union_sine,
    vectorize_goal,
    vectorize_kb,
)

STRATEGIES = ("sine", "simsine", "vector", "vb-union")

# Flags each strategy cannot run without.
REQUIRED = {
    "sine": ("depth",),
    "simsine": ("depth", "k", "embedding"),
    "vector": ("k", "embedding"),
    "vb-union": ("depth", "k", "embedding"),
}


class ConfigError(AxselError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="axsel", description="Axiom selection over large first-order knowledge bases.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="TOML config file; flags override its keys")
        p.add_argument("--kb", help="knowledge base file (fof axioms)")
        p.add_argument("--output", help="output file (default: stdout)")

    def strategy_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--strategy", choices=STRATEGIES)
        p.add_argument("--depth", type=int, help="trigger steps (sine, simsine, vb-union)")
        p.add_argument("--tolerance", type=float, help="trigger tolerance t >= 1 (default 1)")
        p.add_argument("--k", type=int, help="similar words / axioms (simsine, vector, vb-union)")
        p.add_argument("--embedding", help="word embedding file (text format)")
        p.add_argument("--mapping", help="mapping TSV; replaces on-the-fly construction")
        p.add_argument(
            "--lexical-table",
            action="append",
            dest="lexical_table",
            metavar="SOURCE=PATH",
            help="lexical mapping table (synonym|hyponym|instance), repeatable",
        )
        p.add_argument("--cache-dir", dest="cache_dir", help="directory for the axiom-vector cache")

    p_select = sub.add_parser("select", help="select axioms for one goal")
    common(p_select)
    strategy_opts(p_select)
    p_select.add_argument("--goal", help="goal file (premises + one conjecture)")
    p_select.add_argument("--format", choices=("tptp", "json"), help="output format (default json)")

    p_stats = sub.add_parser("stats", help="symbol occurrence/idf table")
    common(p_stats)

    p_map = sub.add_parser("map", help="symbol-to-token mapping commands")
    map_sub = p_map.add_subparsers(dest="map_command", required=True)
    p_map_build = map_sub.add_parser("build", help="build and write a mapping TSV")
    common(p_map_build)
    p_map_build.add_argument("--embedding", help="word embedding file (text format)")
    p_map_build.add_argument(
        "--lexical-table",
        action="append",
        dest="lexical_table",
        metavar="SOURCE=PATH",
        help="lexical mapping table (synonym|hyponym|instance), repeatable",
    )

    p_eval = sub.add_parser("eval", help="batch evaluation")
    eval_sub = p_eval.add_subparsers(dest="eval_command", required=True)

    p_prove = eval_sub.add_parser("prove", help="run a strategy + prover over a problem directory")
    common(p_prove)
    strategy_opts(p_prove)
    p_prove.add_argument("--problems", help="directory of goal files (*.p, *.tptp)")
    p_prove.add_argument("--out-dir", dest="out_dir", help="directory for prover inputs/logs")
    p_prove.add_argument("--prover-cmd", dest="prover_cmd", help="command template with {input} and {timeout}")
    p_prove.add_argument("--timeout", type=float, help="prover CPU seconds (default 15)")
    p_prove.add_argument("--jobs", type=int, help="parallel prover processes (default 1)")
    p_prove.add_argument("--format", choices=("json", "tsv"), help="report format (default json)")

    p_frat = eval_sub.add_parser("frat", help="three-word association study")
    common(p_frat)
    strategy_opts(p_frat)
    p_frat.add_argument("--tasks", help="task CSV: w1,w2,w3,target")
    p_frat.add_argument("--k-values", dest="k_values", help="comma-separated k sweep (vector, vb-union)")
    p_frat.add_argument("--depths", help="comma-separated depth sweep (sine, simsine)")
    p_frat.add_argument("--format", choices=("json", "tsv"), help="report format (default json)")
    return parser


def _load_config_file(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"bad config file {path}: {exc}") from None


_NON_CONFIG_KEYS = ("command", "map_command", "eval_command", "config")


def _merged(args: argparse.Namespace) -> dict[str, Any]:
    merged = _load_config_file(getattr(args, "config", None))
    for key, value in vars(args).items():
        if key in _NON_CONFIG_KEYS:
            continue
        if value is not None:
            merged[key] = value
    return merged


def _require(cfg: dict[str, Any], *keys: str) -> None:
    for key in keys:
        if cfg.get(key) is None:
            flag = key.replace("_", "-")
            raise ConfigError(f"--{flag} is required for this command")


def _check_strategy(cfg: dict[str, Any]) -> str:
    _require(cfg, "strategy")
    strategy = cfg["strategy"]
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    missing = [key for key in REQUIRED[strategy] if cfg.get(key) is None]
    if missing:
        flags = ", ".join("--" + key.replace("_", "-") for key in missing)
        raise ConfigError(f"strategy {strategy} requires {flags}")
    return strategy


@contextlib.contextmanager
def _out_stream(path: str | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _load_store(path: str) -> EmbeddingStore:
    with open(path, "r", encoding="utf-8") as fh:
        return load_embedding(fh)


def _load_tables(specs: list[str] | None) -> list[tuple[str, dict[str, str]]]:
    tables = []
    for spec in specs or []:
        source, sep, path = spec.partition("=")
        if not sep or not source or not path:
            raise ConfigError(f"bad lexical table spec {spec!r}, expected SOURCE=PATH")
        with open(path, "r", encoding="utf-8") as fh:
            tables.append((source, load_lexical_table(fh)))
    return tables


def _get_mapping(cfg: dict[str, Any], kb: KnowledgeBase, store: EmbeddingStore) -> SymbolMapping:
    if cfg.get("mapping"):
        with open(cfg["mapping"], "r", encoding="utf-8") as fh:
            return load_mapping_tsv(fh, store, kb)
    return build_mapping(kb, store, _load_tables(cfg.get("lexical_table")))


class Pipeline:
    """Everything goal-independent, built once per command: stats,
    trigger indexes, the embedding, the mapping, axiom vectors."""

    def __init__(self, kb: KnowledgeBase, cfg: dict[str, Any]):
        self.kb = kb
        self.cfg = cfg
        self.strategy = _check_strategy(cfg)
        self.stats = compute_stats(kb)
        self.tolerance = float(cfg.get("tolerance", 1.0))
        self.depth = cfg.get("depth")
        self.k = cfg.get("k")
        self.store: EmbeddingStore | None = None
        self.mapping: SymbolMapping | None = None
        if self.strategy != "sine":
            self.store = _load_store(cfg["embedding"])
            self.mapping = _get_mapping(cfg, kb, self.store)
        if self.strategy == "sine":
            self.trigger_index = build_trigger_index(
                kb, self.stats, SineConfig(self.depth, self.tolerance)
            )
        elif self.strategy == "simsine":
            sim_cfg = SimSineConfig(self.depth, self.tolerance, self.k)
            self.trigger_index = build_sim_trigger_index(
                kb, self.stats, self.store, self.mapping, sim_cfg
            )
        elif self.strategy == "vb-union":
            self.trigger_index = build_trigger_index(
                kb, self.stats, SineConfig(self.depth, self.tolerance)
            )
        if self.strategy in ("vector", "vb-union"):
            self.vector_index = self._vector_index()

    def _vector_index(self):
        cache_dir = self.cfg.get("cache_dir")
        if not cache_dir:
            return vectorize_kb(self.kb, self.stats, self.store, self.mapping)
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        path = cache_path(
            cache_dir, self.kb.digest(), self.store.digest(), self.mapping.digest()
        )
        if path.exists():
            return load_index(path)
        index = vectorize_kb(self.kb, self.stats, self.store, self.mapping)
        save_index(index, path)
        return index

    def select(self, goal: Goal) -> SelectionResult:
        if self.strategy == "sine":
            return sine_select(
                self.kb, goal, self.trigger_index, self.depth,
                params={"tolerance": self.tolerance},
            )
        if self.strategy == "simsine":
            return similarity_sine_select(
                self.kb, goal, self.trigger_index, self.depth,
                params={"tolerance": self.tolerance, "k": self.k},
            )
        gv = vectorize_goal(goal, self.stats, self.store, self.mapping)
        if self.strategy == "vector":
            return most_similar(self.vector_index, gv, self.k)
        return vb_union_sine(
            self.kb, goal, self.trigger_index, self.vector_index, gv,
            self.depth, self.k, params={"tolerance": self.tolerance},
        )

    def frat_selector(self, sweep: str) -> Callable[[Goal, int], SelectionResult]:
        """Selector with one parameter swept: k for the vector-based
        strategies (clamped to the vectorizable axiom count), depth for
        the trigger-based ones. Unvectorizable goals select nothing."""

        def run(goal: Goal, value: int) -> SelectionResult:
            if self.strategy == "sine":
                return sine_select(self.kb, goal, self.trigger_index, value,
                                   params={"tolerance": self.tolerance})
            if self.strategy == "simsine":
                return similarity_sine_select(self.kb, goal, self.trigger_index, value,
                                              params={"tolerance": self.tolerance, "k": self.k})
            gv = vectorize_goal(goal, self.stats, self.store, self.mapping)
            k = min(value, self.vector_index.present_count)
            try:
                if self.strategy == "vector":
                    return most_similar(self.vector_index, gv, k)
                return vb_union_sine(self.kb, goal, self.trigger_index, self.vector_index,
                                     gv, self.depth, k, params={"tolerance": self.tolerance})
            except GoalNotVectorizable:
                return SelectionResult(strategy=self.strategy, params={"k": k})

        if sweep == "k" and self.strategy in ("sine", "simsine"):
            raise ConfigError(f"strategy {self.strategy} sweeps --depths, not --k-values")
        if sweep == "depth" and self.strategy in ("vector", "vb-union"):
            raise ConfigError(f"strategy {self.strategy} sweeps --k-values, not --depths")
        return run


def _selection_record(goal: Goal, result: SelectionResult) -> dict[str, Any]:
    record: dict[str, Any] = {
        "goal": goal.name,
        "strategy": result.strategy,
        "params": result.params,
        "selected": result.ids(),
        "scores": [entry.score for entry in result.entries],
    }
    if any(entry.origin for entry in result.entries):
        record["origins"] = [entry.origin for entry in result.entries]
    return record


def _cmd_select(cfg: dict[str, Any]) -> int:
    _require(cfg, "kb", "goal")
    kb = parse_kb(Path(cfg["kb"]))
    goal = parse_goal(Path(cfg["goal"]))
    pipeline = Pipeline(kb, cfg)
    result = pipeline.select(goal)
    fmt = cfg.get("format", "json")
    with _out_stream(cfg.get("output")) as out:
        if fmt == "tptp":
            for entry in result:
                out.write(kb.axiom(entry.axiom_id).to_tptp() + "\n")
            out.write(goal.to_tptp())
        else:
            json.dump(_selection_record(goal, result), out, indent=2, sort_keys=True)
            out.write("\n")
    return 0


def _cmd_stats(cfg: dict[str, Any]) -> int:
    _require(cfg, "kb")
    kb = parse_kb(Path(cfg["kb"]))
    stats = compute_stats(kb)
    with _out_stream(cfg.get("output")) as out:
        write_stats_tsv(stats, out)
    return 0


def _cmd_map_build(cfg: dict[str, Any]) -> int:
    _require(cfg, "kb", "embedding")
    kb = parse_kb(Path(cfg["kb"]))
    store = _load_store(cfg["embedding"])
    mapping = build_mapping(kb, store, _load_tables(cfg.get("lexical_table")))
    with _out_stream(cfg.get("output")) as out:
        write_mapping_tsv(mapping, out)
    return 0


def _cmd_eval_prove(cfg: dict[str, Any]) -> int:
    _require(cfg, "kb", "problems", "out_dir")
    kb = parse_kb(Path(cfg["kb"]))
    pipeline = Pipeline(kb, cfg)
    runs = run_corpus(
        cfg["problems"],
        kb,
        pipeline.select,
        cfg["out_dir"],
        prover_cmd=cfg.get("prover_cmd"),
        timeout=float(cfg.get("timeout", 15.0)),
        jobs=int(cfg.get("jobs", 1)),
        strategy=pipeline.strategy,
        params={k: cfg[k] for k in ("depth", "tolerance", "k") if cfg.get(k) is not None},
    )
    with _out_stream(cfg.get("output")) as out:
        emit_report(runs, cfg.get("format", "json"), out)
    return 0


def _parse_int_list(text: str | list[int], flag: str) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    try:
        return [int(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--{flag} must be a comma-separated integer list") from None


def _cmd_eval_frat(cfg: dict[str, Any]) -> int:
    _require(cfg, "kb", "tasks")
    if cfg.get("k_values"):
        sweep = "k"
        values = _parse_int_list(cfg["k_values"], "k-values")
    elif cfg.get("depths"):
        sweep = "depth"
        values = _parse_int_list(cfg["depths"], "depths")
    else:
        raise ConfigError("one of --k-values or --depths is required")
    if not values:
        raise ConfigError("the sweep list is empty")
    # The swept parameter need not also be passed as a flag.
    cfg.setdefault(sweep, values[0])
    kb = parse_kb(Path(cfg["kb"]))
    pipeline = Pipeline(kb, cfg)
    with open(cfg["tasks"], "r", encoding="utf-8", newline="") as fh:
        tasks = load_frat_tasks(fh)
    selector = pipeline.frat_selector(sweep)
    report = run_frat(tasks, kb, selector, values, strategy=pipeline.strategy)
    with _out_stream(cfg.get("output")) as out:
        emit_report(report, cfg.get("format", "json"), out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merged(args)
        if args.command == "select":
            return _cmd_select(cfg)
        if args.command == "stats":
            return _cmd_stats(cfg)
        if args.command == "map":
            return _cmd_map_build(cfg)
        if args.command == "eval" and args.eval_command == "prove":
            return _cmd_eval_prove(cfg)
        return _cmd_eval_frat(cfg)
    except (AxselError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
