"""Command-line entry point for reproducible batch runs.

Every command is deterministic given its config and inputs; output files
embed a digest of the result-affecting config fields so runs can be tied
back to their inputs. Exit codes: 0 success, 2 input error, 3 scorer
transport error, 4 statistical degeneracy.
"""

from __future__ import annotations

import csv
import functools
import hashlib
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import report as report_mod
from .analysis import (
    ALL_CLASSES,
    CLASS_PLURAL_ARTIFICIAL,
    CLASS_PLURAL_MORPHEMIC,
    CLASS_PLURAL_NON_MORPHEMIC,
    CLASS_PLURAL_SINGLE,
    CLASS_SINGULAR,
    EmbeddingRecord,
    freq_by_scheme,
    lda_fit,
    lda_project,
    logodds_regression,
    mean_embedding,
    read_store,
    read_store_csv,
    write_store,
    write_store_csv,
)
from .errors import (
    BadInput,
    BadLayer,
    BadNounTokens,
    DegenerateClasses,
    DegenerateDistribution,
    DuplicateEntry,
    DuplicatePiece,
    EmptySelection,
    FormatError,
    InvalidLemma,
    MissingAffixPiece,
    MissingSpecial,
    RankDeficient,
    ScorerUnavailable,
    SingularScatter,
    UnknownCandidate,
    UnkLemma,
    VocabMismatch,
)
from .lexicon import Lexicon, load_lexicon, write_rejects_csv
from .probe import (
    ArticleType,
    accuracy_table,
    accuracy_table_json,
    frame_tokens,
    noun_positions,
    read_results_csv,
    run_probe,
    write_results_csv,
)
from .analysis.summary import grouped_summary
from .scorer import MockScorer, RemoteScorer, handshake
from .tokenization import (
    Scheme,
    Variant,
    artificial_tokenize,
    classify_scheme,
    read_vocab,
    tokenize,
    vocab_digest,
    write_classification_csv,
)

EXIT_INPUT = 2
EXIT_SCORER = 3
EXIT_DEGENERATE = 4

_INPUT_ERRORS = (
    OSError,
    ValueError,
    FormatError,
    DuplicateEntry,
    DuplicatePiece,
    MissingSpecial,
    MissingAffixPiece,
    UnkLemma,
    InvalidLemma,
    VocabMismatch,
    UnknownCandidate,
    BadLayer,
    BadNounTokens,
    DegenerateDistribution,
    EmptySelection,
)
_DEGENERATE_ERRORS = (DegenerateClasses, RankDeficient, SingularScatter, BadInput)

DEFAULT_LAYERS = (9, 10, 11, 12)
DEFAULT_SHRINKAGE = 1e-3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _with_exit_codes(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ScorerUnavailable as exc:
            _fail(EXIT_SCORER, str(exc))
        except _DEGENERATE_ERRORS as exc:
            _fail(EXIT_DEGENERATE, f"{type(exc).__name__}: {exc}")
        except _INPUT_ERRORS as exc:
            _fail(EXIT_INPUT, f"{type(exc).__name__}: {exc}")

    return wrapper


def _read_config_file(path: str | None) -> dict[str, str]:
    """key=value config file; '#' starts a comment, keys use - or _."""
    if path is None:
        return {}
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip().strip('"')
    return values


def _resolve(flag_value, config: dict[str, str], key: str, default, convert=str):
    """Precedence: explicit flag > config file > default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return convert(config[key])
    return default


def _parse_variants(text: str) -> tuple[Variant, ...]:
    return tuple(Variant(part.strip()) for part in text.split(",") if part.strip())


def _parse_articles(text: str) -> tuple[ArticleType, ...]:
    return tuple(ArticleType(part.strip()) for part in text.split(",") if part.strip())


def _parse_layers(text: str) -> tuple[int, ...]:
    layers = tuple(int(part) for part in text.split(",") if part.strip())
    if not layers or list(layers) != sorted(layers):
        raise ValueError(f"layers must be non-empty ascending, got {text!r}")
    return layers


def _parse_bias(text: str) -> dict[tuple[str, str], float]:
    """Bias spec: comma-separated suffix:candidate=value entries."""
    table: dict[tuple[str, str], float] = {}
    if not text:
        return table
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            key, value = part.split("=", 1)
            suffix, candidate = key.split(":", 1)
        except ValueError:
            raise ValueError(f"bad bias entry {part!r}, expected suffix:candidate=value") from None
        table[(suffix, candidate)] = float(value)
    return table


def _config_digest(fields: dict) -> str:
    return hashlib.sha256(json.dumps(fields, sort_keys=True).encode("utf-8")).hexdigest()


def _scorer_from_flags(vocab, scorer_url, mock_seed, mock_bias, seed):
    if scorer_url and mock_seed is not None:
        raise ValueError("give either --scorer-url or --mock-seed, not both")
    if scorer_url:
        return RemoteScorer(scorer_url, vocab=vocab), {"kind": "remote", "url": scorer_url}
    effective_seed = mock_seed if mock_seed is not None else seed
    bias = _parse_bias(mock_bias or "")
    descriptor = {
        "kind": "mock",
        "seed": effective_seed,
        "bias": sorted((s, c, v) for (s, c), v in bias.items()),
    }
    return MockScorer(vocab=vocab, seed=effective_seed, bias_table=bias), descriptor


def _load_inputs(vocab_path: str, lexicon_path: str, log_base: float):
    vocab = read_vocab(vocab_path)
    lexicon, rejects = load_lexicon(lexicon_path, log_base=log_base)
    return vocab, lexicon, rejects


def _write_json(path: Path, payload: dict, digest: str) -> None:
    payload = {"config_digest": digest, **payload}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


@click.group()
@click.version_option(package_name="morphoprobe")
def main():
    """Probe how subword tokenization affects article-noun number agreement."""


def _common_options(f):
    for option in reversed(
        [
            click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                         help="key=value config file; flags override it."),
            click.option("--vocab", "vocab_path", type=str, default=None, help="Vocabulary file, one piece per line."),
            click.option("--lexicon", "lexicon_path", type=str, default=None, help="Noun lexicon TSV."),
            click.option("--out", "out_dir", type=str, default=None, help="Output directory."),
            click.option("--log-base", type=float, default=None, help="Log base of input frequencies (default 10)."),
        ]
    ):
        f = option(f)
    return f


def _scorer_options(f):
    for option in reversed(
        [
            click.option("--scorer-url", type=str, default=None, help="Base URL of a remote scorer."),
            click.option("--mock-seed", type=int, default=None, help="Use the deterministic mock scorer."),
            click.option("--mock-bias", type=str, default=None,
                         help="Mock bias table, e.g. 's:las=6,s:los=6'."),
            click.option("--concurrency", type=int, default=None, help="Max in-flight scorer requests (default 8)."),
            click.option("--seed", type=int, default=None, help="Run seed (default 0)."),
        ]
    ):
        f = option(f)
    return f


def _require(value, name: str):
    if value is None:
        raise ValueError(f"missing required option --{name}")
    return value


def _prepare_common(config_path, vocab_path, lexicon_path, out_dir, log_base):
    config = _read_config_file(config_path)
    vocab_path = _require(_resolve(vocab_path, config, "vocab", None), "vocab")
    lexicon_path = _require(_resolve(lexicon_path, config, "lexicon", None), "lexicon")
    out_dir = Path(_require(_resolve(out_dir, config, "out", None), "out"))
    log_base = _resolve(log_base, config, "log_base", 10.0, float)
    out_dir.mkdir(parents=True, exist_ok=True)
    return config, vocab_path, lexicon_path, out_dir, log_base


@main.command()
@_common_options
@_with_exit_codes
def classify(config_path, vocab_path, lexicon_path, out_dir, log_base):
    """Classify every plural's tokenization scheme; write CSV and counts."""
    config, vocab_path, lexicon_path, out_dir, log_base = _prepare_common(
        config_path, vocab_path, lexicon_path, out_dir, log_base
    )
    vocab, lexicon, rejects = _load_inputs(vocab_path, lexicon_path, log_base)
    digest = _config_digest(
        {
            "command": "classify",
            "vocab": vocab_digest(vocab),
            "lexicon": lexicon.source_digest,
            "log_base": log_base,
        }
    )
    pairs = [(entry, classify_scheme(entry, vocab)) for entry in lexicon]
    with open(out_dir / "classification.csv", "w", encoding="utf-8", newline="") as f:
        write_classification_csv(f, pairs, digest)
    with open(out_dir / "rejects.csv", "w", encoding="utf-8", newline="") as f:
        write_rejects_csv(f, rejects)
    counts = {"single_token": 0, "morphemic": 0, "non_morphemic": 0, "excluded_unk": 0}
    for _, record in pairs:
        if record.contains_unk:
            counts["excluded_unk"] += 1
        else:
            counts[record.scheme.value.replace("-", "_")] += 1
    _write_json(out_dir / "summary.json", counts, digest)
    click.echo(json.dumps(counts))


@main.command()
@_common_options
@_scorer_options
@click.option("--variants", type=str, default=None, help="Comma list of original,artificial.")
@click.option("--articles", type=str, default=None, help="Comma list of definite,indefinite.")
@_with_exit_codes
def probe(config_path, vocab_path, lexicon_path, out_dir, log_base,
          scorer_url, mock_seed, mock_bias, concurrency, seed, variants, articles):
    """Run the masked-article probe; write results CSV, accuracy, summaries."""
    config, vocab_path, lexicon_path, out_dir, log_base = _prepare_common(
        config_path, vocab_path, lexicon_path, out_dir, log_base
    )
    scorer_url = _resolve(scorer_url, config, "scorer_url", None)
    mock_seed = _resolve(mock_seed, config, "mock_seed", None, int)
    mock_bias = _resolve(mock_bias, config, "mock_bias", None)
    concurrency = _resolve(concurrency, config, "concurrency", 8, int)
    seed = _resolve(seed, config, "seed", 0, int)
    variants = _parse_variants(_resolve(variants, config, "variants", "original,artificial"))
    articles = _parse_articles(_resolve(articles, config, "articles", "definite,indefinite"))

    vocab, lexicon, _ = _load_inputs(vocab_path, lexicon_path, log_base)
    scorer, descriptor = _scorer_from_flags(vocab, scorer_url, mock_seed, mock_bias, seed)
    digest = _config_digest(
        {
            "command": "probe",
            "vocab": vocab_digest(vocab),
            "lexicon": lexicon.source_digest,
            "scorer": descriptor,
            "variants": [v.value for v in variants],
            "articles": [a.value for a in articles],
            "seed": seed,
            "log_base": log_base,
        }
    )
    results_path = out_dir / "probe_results.csv"
    results = run_probe(
        lexicon,
        vocab,
        scorer,
        variants=variants,
        article_types=articles,
        concurrency=concurrency,
        flush_path=results_path,
        config_digest=digest,
    )
    with open(results_path, "w", encoding="utf-8", newline="") as f:
        write_results_csv(f, results, digest)
    table = accuracy_table(results)
    _write_json(out_dir / "accuracy.json", accuracy_table_json(table), digest)
    stats = grouped_summary(results, ("number", "scheme", "variant"))
    with open(out_dir / "logodds_summary.csv", "w", encoding="utf-8", newline="") as f:
        f.write(f"# config: {digest}\r\n")
        writer = csv.writer(f)
        writer.writerow(("number", "scheme", "variant", "mean", "sd", "n"))
        for s in stats:
            writer.writerow((*s.key, repr(s.mean), repr(s.sd), s.n))
    click.echo(f"wrote {len(results)} probe results to {results_path}")


def _embedding_wordsets(entry, vocab):
    """(class label, wordform, tokens) triples for one entry, two-token
    filter applied to multi-token classes; second return value counts
    exclusions."""
    record = classify_scheme(entry, vocab)
    if record.contains_unk:
        return [], 0
    lemma_tokens = tuple(tokenize(entry.lemma, vocab))
    if vocab.unk_piece in lemma_tokens:
        return [], 0
    excluded = 0
    sets = [(CLASS_SINGULAR, entry.lemma, lemma_tokens)]
    plural_class = {
        Scheme.SINGLE_TOKEN: CLASS_PLURAL_SINGLE,
        Scheme.MORPHEMIC: CLASS_PLURAL_MORPHEMIC,
        Scheme.NON_MORPHEMIC: CLASS_PLURAL_NON_MORPHEMIC,
    }[record.scheme]
    if plural_class == CLASS_PLURAL_SINGLE or len(record.tokens) == 2:
        sets.append((plural_class, entry.plural, record.tokens))
    else:
        excluded += 1
    if record.scheme in (Scheme.SINGLE_TOKEN, Scheme.NON_MORPHEMIC):
        artificial = artificial_tokenize(entry, vocab)
        if len(artificial.tokens) == 2:
            sets.append((CLASS_PLURAL_ARTIFICIAL, entry.plural, artificial.tokens))
        else:
            excluded += 1
    return sets, excluded


@main.command()
@_common_options
@_scorer_options
@click.option("--layers", type=str, default=None, help="Comma list of 1-based layers (default 9,10,11,12).")
@click.option("--store-format", type=click.Choice(["binary", "csv"]), default=None)
@_with_exit_codes
def embed(config_path, vocab_path, lexicon_path, out_dir, log_base,
          scorer_url, mock_seed, mock_bias, concurrency, seed, layers, store_format):
    """Extract mean noun embeddings into an embedding store."""
    config, vocab_path, lexicon_path, out_dir, log_base = _prepare_common(
        config_path, vocab_path, lexicon_path, out_dir, log_base
    )
    scorer_url = _resolve(scorer_url, config, "scorer_url", None)
    mock_seed = _resolve(mock_seed, config, "mock_seed", None, int)
    mock_bias = _resolve(mock_bias, config, "mock_bias", None)
    seed = _resolve(seed, config, "seed", 0, int)
    layers = _parse_layers(_resolve(layers, config, "layers", "9,10,11,12"))
    store_format = _resolve(store_format, config, "store_format", "binary")

    vocab, lexicon, _ = _load_inputs(vocab_path, lexicon_path, log_base)
    scorer, descriptor = _scorer_from_flags(vocab, scorer_url, mock_seed, mock_bias, seed)
    info = handshake(scorer, vocab)
    for layer in layers:
        if not (1 <= layer <= info.depth):
            raise BadLayer(f"layer {layer} outside [1, {info.depth}]")
    digest = _config_digest(
        {
            "command": "embed",
            "vocab": vocab_digest(vocab),
            "lexicon": lexicon.source_digest,
            "scorer": descriptor,
            "layers": list(layers),
            "seed": seed,
            "log_base": log_base,
        }
    )

    records: list[EmbeddingRecord] = []
    excluded_multi_token = 0
    by_class: dict[str, int] = {label: 0 for label in ALL_CLASSES}
    for entry in lexicon:
        wordsets, excluded = _embedding_wordsets(entry, vocab)
        excluded_multi_token += excluded
        for class_label, wordform, tokens in wordsets:
            states = scorer.fetch_hidden_states(frame_tokens(tokens), layers)
            vector = mean_embedding(states, noun_positions(tokens))
            records.append(EmbeddingRecord(wordform=wordform, class_label=class_label, vector=vector))
            by_class[class_label] += 1

    if not records:
        raise DegenerateClasses("no embeddable entries in lexicon")
    if store_format == "binary":
        store_path = out_dir / "embeddings.bin"
        write_store(store_path, records)
    else:
        store_path = out_dir / "embeddings.csv"
        write_store_csv(store_path, records)
    _write_json(
        out_dir / "embed_report.json",
        {
            "written": len(records),
            "by_class": by_class,
            "excluded_multi_token": excluded_multi_token,
            "dimension": int(records[0].vector.shape[0]),
            "store": store_path.name,
        },
        digest,
    )
    click.echo(f"wrote {len(records)} embeddings to {store_path}")


def _read_store_any(path: Path):
    if path.suffix == ".csv":
        return read_store_csv(path)
    return read_store(path)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--store", "store_path", type=str, default=None, help="Embedding store (.bin or .csv).")
@click.option("--classes", "class_spec", type=str, default=None,
              help="Comma list of class labels to fit on, e.g. 'singular,plural-single-token'.")
@click.option("--shrinkage", type=float, default=None, help="Within-scatter shrinkage (default 1e-3).")
@click.option("--out", "out_dir", type=str, default=None)
@_with_exit_codes
def lda(config_path, store_path, class_spec, shrinkage, out_dir):
    """Fit LDA on chosen classes and project every record."""
    config = _read_config_file(config_path)
    store_path = Path(_require(_resolve(store_path, config, "store", None), "store"))
    class_spec = _require(_resolve(class_spec, config, "classes", None), "classes")
    shrinkage = _resolve(shrinkage, config, "shrinkage", DEFAULT_SHRINKAGE, float)
    out_dir = Path(_require(_resolve(out_dir, config, "out", None), "out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    class_labels = tuple(part.strip() for part in class_spec.split(",") if part.strip())
    if len(class_labels) < 2:
        raise DegenerateClasses(f"class spec names {len(class_labels)} class(es), need >= 2")
    records = _read_store_any(store_path)
    present = {rec.class_label for rec in records}
    missing = [label for label in class_labels if label not in present]
    if missing:
        raise DegenerateClasses(f"classes not in store: {missing}")

    digest = _config_digest(
        {
            "command": "lda",
            "store": hashlib.sha256(store_path.read_bytes()).hexdigest(),
            "classes": list(class_labels),
            "shrinkage": shrinkage,
        }
    )
    fit_records = [rec for rec in records if rec.class_label in class_labels]
    model = lda_fit(fit_records, shrinkage=shrinkage)
    coordinates = lda_project(model, records)

    with open(out_dir / "projections.csv", "w", encoding="utf-8", newline="") as f:
        f.write(f"# config: {digest}\r\n")
        writer = csv.writer(f)
        writer.writerow(("wordform", "class_label", *(f"axis{i}" for i in range(model.n_axes))))
        for rec, coords in zip(records, coordinates):
            writer.writerow((rec.wordform, rec.class_label, *(repr(float(c)) for c in coords)))
    _write_json(
        out_dir / "lda_model.json",
        {
            "classes": list(class_labels),
            "eigenvalues": [float(v) for v in model.eigenvalues],
            "shrinkage": model.shrinkage,
            "lambda_eff": model.lambda_eff,
            "dimension": model.dimension,
            "n_axes": model.n_axes,
            "class_counts": {label: sum(1 for r in fit_records if r.class_label == label) for label in class_labels},
        },
        digest,
    )
    click.echo(f"fit {model.n_axes} axes over {len(fit_records)} records; projected {len(records)}")


@main.command()
@_common_options
@_with_exit_codes
def freq(config_path, vocab_path, lexicon_path, out_dir, log_base):
    """Regress log frequency on tokenization scheme (morphemic intercept)."""
    config, vocab_path, lexicon_path, out_dir, log_base = _prepare_common(
        config_path, vocab_path, lexicon_path, out_dir, log_base
    )
    vocab, lexicon, _ = _load_inputs(vocab_path, lexicon_path, log_base)
    digest = _config_digest(
        {
            "command": "freq",
            "vocab": vocab_digest(vocab),
            "lexicon": lexicon.source_digest,
            "log_base": log_base,
        }
    )
    pairs = [(entry, classify_scheme(entry, vocab)) for entry in lexicon]
    summary = freq_by_scheme(pairs)
    _write_json(out_dir / "freq_by_scheme.json", summary.to_json(), digest)
    click.echo(json.dumps(summary.to_json()["terms"], indent=2, sort_keys=True))


@main.command("report")
@click.option("--probe-csv", "probe_csv", type=click.Path(exists=True, dir_okay=False), default=None,
              help="probe_results.csv from a probe run.")
@click.option("--projections-csv", "projections_csv", type=click.Path(exists=True, dir_okay=False), default=None,
              help="projections.csv from an lda run.")
@click.option("--vocab", "vocab_path", type=str, default=None)
@click.option("--lexicon", "lexicon_path", type=str, default=None)
@click.option("--log-base", type=float, default=10.0)
@click.option("--out", "out_dir", type=str, required=True)
@_with_exit_codes
def report(probe_csv, projections_csv, vocab_path, lexicon_path, log_base, out_dir):
    """Render figures and derived tables from prior run outputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not any((probe_csv, projections_csv, vocab_path and lexicon_path)):
        raise ValueError("nothing to report: give --probe-csv, --projections-csv, or --vocab with --lexicon")
    written: list[str] = []

    pairs = None
    lexicon: Lexicon | None = None
    if vocab_path and lexicon_path:
        vocab, lexicon, _ = _load_inputs(vocab_path, lexicon_path, log_base)
        pairs = [(entry, classify_scheme(entry, vocab)) for entry in lexicon]

    if probe_csv:
        results = read_results_csv(probe_csv)
        digest = _config_digest({"command": "report", "probe_csv": hashlib.sha256(Path(probe_csv).read_bytes()).hexdigest()})
        table = accuracy_table(results)
        _write_json(out_dir / "accuracy.json", accuracy_table_json(table), digest)
        written.append("accuracy.json")
        stats = grouped_summary(results, ("number", "scheme", "variant"))
        with open(out_dir / "logodds_summary.csv", "w", encoding="utf-8", newline="") as f:
            f.write(f"# config: {digest}\r\n")
            writer = csv.writer(f)
            writer.writerow(("number", "scheme", "variant", "mean", "sd", "n"))
            for s in stats:
                writer.writerow((*s.key, repr(s.mean), repr(s.sd), s.n))
        written.append("logodds_summary.csv")
        report_mod.plot_logodds_density(results, out_dir / "logodds_density.png")
        written.append("logodds_density.png")
        if lexicon is not None:
            frequencies = {e.lemma: e.log_frequency for e in lexicon if e.log_frequency is not None}
            if frequencies:
                summary = logodds_regression(results, frequencies)
                _write_json(out_dir / "logodds_regression.json", summary.to_json(), digest)
                written.append("logodds_regression.json")

    if projections_csv:
        labels: list[str] = []
        rows: list[list[float]] = []
        with open(projections_csv, encoding="utf-8", newline="") as f:
            reader = csv.reader(line for line in f if not line.startswith("#"))
            header = next(reader)
            n_axes = len(header) - 2
            for row in reader:
                labels.append(row[1])
                rows.append([float(x) for x in row[2 : 2 + n_axes]])
        report_mod.plot_projections(labels, np.array(rows), out_dir / "lda_projections.png")
        written.append("lda_projections.png")

    if pairs is not None:
        digest = _config_digest({"command": "report", "lexicon": lexicon.source_digest})
        try:
            summary = freq_by_scheme(pairs)
        except DegenerateClasses:
            summary = None
        if summary is not None:
            _write_json(out_dir / "freq_by_scheme.json", summary.to_json(), digest)
            written.append("freq_by_scheme.json")
        report_mod.plot_freq_by_scheme(pairs, out_dir / "freq_by_scheme.png")
        written.append("freq_by_scheme.png")

    click.echo("wrote: " + ", ".join(written))


if __name__ == "__main__":
    main()
