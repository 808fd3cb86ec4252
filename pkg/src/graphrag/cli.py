"""Command-line entry point.

Subcommands: gen-corpus, build (rdf | lpg | agentic-index), query,
schema dump, eval. Exit codes: 0 success, 1 usage error, 2 runtime error,
3 provider error. `--json` prints a machine-readable envelope on stdout;
wall-clock timings go to stderr so stdout stays byte-reproducible.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from . import corpus as corpus_mod
from . import evaluation, rdf_store
from .config import AppConfig
from .errors import GraphRagError, ProviderUnavailableError, ScriptMissError
from .llm import RemoteClient, ScriptedClient, ScriptedResponses
from .lpg import extract_schema, load_graph, load_graph_from_docs, save_graph
from .pipelines import AgenticPipeline, ChunkingConfig, LpgPipeline, RdfPipeline
from .pipelines.agentic import build_chunk_index
from .pipelines.lpg import render_schema_text
from .vector import load_index, save_index


@click.group()
def cli():
    """Graph RAG over fund documents: corpora, stores, pipelines, evaluation."""


def _load_config(config_path: str | None) -> AppConfig:
    return AppConfig.load(config_path) if config_path else AppConfig()


def _make_llm(config: AppConfig, llm_script: str | None):
    script_path = llm_script or config.provider.get("llm_script")
    if script_path:
        return ScriptedClient(ScriptedResponses.load(script_path))
    return RemoteClient(
        url=config.provider.get("llm_url"),
        api_key=config.provider.get("llm_key"),
        model=config.provider.get("llm_model"),
    )


@cli.command("gen-corpus")
@click.option("--n", required=True, type=int, help="Number of fund documents.")
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def gen_corpus(n, seed, out_dir, as_json):
    """Generate a synthetic corpus: one JSON file per fund."""
    docs = corpus_mod.generate_corpus(corpus_mod.CorpusConfig(n_funds=n, seed=seed))
    paths = corpus_mod.write_corpus(docs, out_dir)
    if as_json:
        click.echo(json.dumps({"written": len(paths), "out": str(out_dir)}))
    else:
        click.echo(f"wrote {len(paths)} documents to {out_dir}")


@cli.group()
def build():
    """Build retrieval artifacts from a corpus directory."""


@build.command("rdf")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def build_rdf(corpus_dir, out_file, config_path, as_json):
    """Flatten every document and save the triple store."""
    config = _load_config(config_path)
    docs = corpus_mod.load_corpus(corpus_dir)
    store = rdf_store.build_store(docs, config.flatten)
    rdf_store.save_store(store, out_file)
    stats = store.stats()
    if as_json:
        click.echo(json.dumps({"out": str(out_file), **stats}, sort_keys=True))
    else:
        click.echo(
            f"triples={stats['triples']} nodes={stats['nodes']} "
            f"predicates={stats['predicates']} -> {out_file}"
        )


@build.command("lpg")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def build_lpg(corpus_dir, out_dir, as_json):
    """Load every document into the property graph and snapshot it."""
    docs = corpus_mod.load_corpus(corpus_dir)
    metadata = corpus_mod.extract_metadata(docs)
    graph = load_graph_from_docs(docs, metadata)
    save_graph(graph, out_dir)
    payload = {"out": str(out_dir), "nodes": len(graph.nodes), "edges": len(graph.edges)}
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(f"nodes={payload['nodes']} edges={payload['edges']} -> {out_dir}")


@build.command("agentic-index")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_file", required=True, type=click.Path())
@click.option("--chunk-size", type=int, default=512, show_default=True)
@click.option("--chunk-overlap", type=int, default=64, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--json", "as_json", is_flag=True)
def build_agentic(corpus_dir, out_file, chunk_size, chunk_overlap, config_path, as_json):
    """Verbalize, chunk, and embed every document into a vector index."""
    config = _load_config(config_path)
    docs = corpus_mod.load_corpus(corpus_dir)
    chunking = ChunkingConfig(chunk_size=chunk_size, chunk_overlap=chunk_overlap)
    index = build_chunk_index(docs, chunking, flatten_cfg=config.flatten)
    save_index(index, out_file)
    if as_json:
        click.echo(json.dumps({"out": str(out_file), "chunks": len(index)}, sort_keys=True))
    else:
        click.echo(f"chunks={len(index)} -> {out_file}")


def _build_pipeline(name: str, config: AppConfig, llm):
    if name == "rdf":
        docs = corpus_mod.load_corpus(config.path("corpus"))
        store = rdf_store.load_store(config.path("rdf_store"))
        metadata = corpus_mod.extract_metadata(docs)
        return RdfPipeline(store, metadata, config.retrieval, llm)
    if name == "lpg":
        docs = corpus_mod.load_corpus(config.path("corpus"))
        metadata = corpus_mod.extract_metadata(docs)
        graph = load_graph(config.path("lpg_dir"))
        descriptions = config.paths.get("descriptions")
        schema = extract_schema(graph, descriptions)
        return LpgPipeline(graph, schema, metadata, llm)
    if name == "agentic":
        index = load_index(config.path("agentic_index"))
        return AgenticPipeline(index, config.retrieval, config.chunking, llm)
    raise click.UsageError(f"unknown pipeline {name!r}")


@cli.command("query")
@click.option("--pipeline", "pipeline_name", required=True,
              type=click.Choice(["rdf", "lpg", "agentic"]))
@click.option("--question", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--llm-script", type=click.Path(exists=True))
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True))
@click.option("--store", "store_file", type=click.Path(exists=True))
@click.option("--graph", "graph_dir", type=click.Path(exists=True))
@click.option("--index", "index_file", type=click.Path(exists=True))
@click.option("--k", type=int, help="Agentic top-K override.")
@click.option("--rerank", is_flag=True, default=None)
@click.option("--json", "as_json", is_flag=True)
def query(pipeline_name, question, config_path, llm_script, corpus_dir, store_file,
          graph_dir, index_file, k, rerank, as_json):
    """Answer one question through the chosen retrieval pipeline."""
    config = _load_config(config_path)
    for key, value in (
        ("corpus", corpus_dir), ("rdf_store", store_file),
        ("lpg_dir", graph_dir), ("agentic_index", index_file),
    ):
        if value:
            config.paths[key] = value
    if k:
        config.retrieval.top_k_docs = k
    if rerank is not None:
        config.chunking.rerank = rerank
    llm = _make_llm(config, llm_script)
    started = time.perf_counter()
    pipeline = _build_pipeline(pipeline_name, config, llm)
    result = pipeline.run(question)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    click.echo(f"elapsed_ms={elapsed_ms:.1f}", err=True)
    if as_json:
        click.echo(json.dumps(
            {
                "answer": result.answer,
                "context": result.context,
                "provenance": result.provenance,
                "timings": result.timings,
            },
            ensure_ascii=False,
        ))
    else:
        click.echo(result.answer)


@cli.group()
def schema():
    """Inspect property-graph schemas."""


@schema.command("dump")
@click.option("--graph", "graph_dir", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
def schema_dump(graph_dir, fmt):
    """Print the labels, properties, and relationship types of a graph."""
    graph = load_graph(graph_dir)
    extracted = extract_schema(graph)
    if fmt == "json":
        click.echo(json.dumps(
            {
                "labels": extracted.labels,
                "properties_per_label": extracted.properties_per_label,
                "rel_types": extracted.rel_types,
                "rel_endpoints": {
                    rel: sorted(map(list, pairs))
                    for rel, pairs in sorted(extracted.rel_endpoints.items())
                },
            },
            indent=2,
            sort_keys=True,
        ))
    else:
        click.echo(render_schema_text(extracted))


@cli.command("eval")
@click.option("--questions", "questions_file", required=True, type=click.Path(exists=True))
@click.option("--pipelines", "pipeline_names", default="rdf,lpg,agentic", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--llm-script", type=click.Path(exists=True))
@click.option("--overrides", "overrides_file", type=click.Path(exists=True),
              help="JSON map question_id -> judgment; wins over the LLM judge.")
@click.option("--json", "as_json", is_flag=True)
def eval_cmd(questions_file, pipeline_names, out_dir, config_path, llm_script,
             overrides_file, as_json):
    """Run pipelines over a question suite, judge, and write score reports."""
    config = _load_config(config_path)
    llm = _make_llm(config, llm_script)
    questions = evaluation.load_questions(questions_file)
    names = [n.strip() for n in pipeline_names.split(",") if n.strip()]
    pipelines = {name: _build_pipeline(name, config, llm) for name in names}
    overrides = None
    if overrides_file:
        overrides = json.loads(Path(overrides_file).read_text(encoding="utf-8"))
    records, _ = evaluation.run_suite(questions, pipelines, llm, overrides)
    board = evaluation.aggregate(records)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    evaluation.save_records(records, out / "records.jsonl")
    (out / "report.md").write_text(evaluation.report(board, "markdown") + "\n", encoding="utf-8")
    (out / "report.json").write_text(evaluation.report(board, "json") + "\n", encoding="utf-8")
    click.echo(evaluation.report(board, "json" if as_json else "markdown"))


def run(argv: list[str]) -> int:
    """Invoke the CLI and map failures to documented exit codes."""
    try:
        cli.main(args=argv, prog_name="graphrag", standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return 0 if exc.exit_code == 0 else 1
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        if exc.ctx is not None:
            click.echo(exc.ctx.get_usage(), err=True)
        return 1
    except (ProviderUnavailableError, ScriptMissError) as exc:
        click.echo(f"provider error: {exc}", err=True)
        return 3
    except (GraphRagError, FileNotFoundError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
