"""Experiment grid over input selections and chunking techniques.

A grid cell is one (input selection, technique) pair. For each cell the
runner builds the pipeline, trains a fresh model on the train split
(model selection on dev happens inside training), evaluates on the test
split and records macro precision/recall/F1 plus wall time.

Reports are CSV or markdown with the fixed column set

    model,input_selection,technique,precision,recall,f1,runtime_s

and metric values formatted to 4 decimals. A read-only reference fixture
(reference_results.json, shipped with the package) carries previously
published comparison numbers for side-by-side display; those are never
training targets.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Document
from .errors import ConfigError, EmptySplitError
from .metrics import Metrics, evaluate
from .pipeline import InputSelection, PipelineConfig, technique_from_number
from .predictor import EncoderConfig, TrainConfig, forward, train

REPORT_COLUMNS = (
    "model", "input_selection", "technique",
    "precision", "recall", "f1", "runtime_s",
)

REFERENCE_RESOURCE = "reference_results.json"


@dataclass(frozen=True)
class ExperimentRow:
    model: str
    input_selection: InputSelection
    technique: int
    precision: float
    recall: float
    f1: float
    runtime_s: float
    metrics: Metrics | None = None

    def __post_init__(self):
        if isinstance(self.technique, bool) or self.technique not in (1, 2, 3):
            raise ConfigError(f"technique must be 1, 2 or 3, got {self.technique!r}")


@dataclass(frozen=True)
class GridSpec:
    selections: tuple[InputSelection, ...]
    techniques: tuple[int, ...]
    model_name: str = "hier-attn"

    def __post_init__(self):
        if not self.selections or not self.techniques:
            raise ConfigError("grid needs at least one selection and one technique")
        for t in self.techniques:
            if isinstance(t, bool) or t not in (1, 2, 3):
                raise ConfigError(f"technique must be 1, 2 or 3, got {t!r}")

    def cells(self) -> list[tuple[InputSelection, int]]:
        return [(s, t) for s in self.selections for t in self.techniques]


FULL_GRID = GridSpec(selections=tuple(InputSelection), techniques=(1, 2, 3))


def grid_spec_from_json(obj: Mapping) -> GridSpec:
    if not isinstance(obj, Mapping):
        raise ConfigError("grid spec must be a JSON object")
    raw_selections = obj.get("selections", [s.value for s in InputSelection])
    raw_techniques = obj.get("techniques", [1, 2, 3])
    if not isinstance(raw_selections, Sequence) or isinstance(raw_selections, str):
        raise ConfigError("'selections' must be an array")
    if not isinstance(raw_techniques, Sequence) or isinstance(raw_techniques, str):
        raise ConfigError("'techniques' must be an array")
    name = obj.get("model_name", "hier-attn")
    if not isinstance(name, str) or not name:
        raise ConfigError("'model_name' must be a non-empty string")
    return GridSpec(
        selections=tuple(InputSelection.from_string(s) for s in raw_selections),
        techniques=tuple(raw_techniques),
        model_name=name,
    )


def run_grid(
    corpus: Sequence[Document],
    grid: GridSpec,
    train_cfg: TrainConfig = TrainConfig(),
    encoder: EncoderConfig = EncoderConfig(),
    pipeline_defaults: PipelineConfig = PipelineConfig(),
) -> list[ExperimentRow]:
    """Train and evaluate one model per grid cell, in grid order."""
    for split in ("train", "dev", "test"):
        if not any(d.split == split for d in corpus):
            raise EmptySplitError(f"grid corpus needs a non-empty {split} split")
    test_docs = [d for d in corpus if d.split == "test"]
    golds = [d.label for d in test_docs]
    rows = []
    for selection, technique in grid.cells():
        pipeline = replace(
            pipeline_defaults,
            selection=selection,
            chunking=technique_from_number(technique),
        )
        start = time.perf_counter()
        model = train(corpus, pipeline, train_cfg, encoder)
        preds = [forward(d, model, pipeline).label for d in test_docs]
        runtime = time.perf_counter() - start
        metrics = evaluate(preds, golds)
        rows.append(
            ExperimentRow(
                model=grid.model_name,
                input_selection=selection,
                technique=technique,
                precision=metrics.precision,
                recall=metrics.recall,
                f1=metrics.f1,
                runtime_s=runtime,
                metrics=metrics,
            )
        )
    return rows


def _cells(row: ExperimentRow) -> list[str]:
    return [
        row.model,
        row.input_selection.value,
        str(row.technique),
        f"{row.precision:.4f}",
        f"{row.recall:.4f}",
        f"{row.f1:.4f}",
        f"{row.runtime_s:.4f}",
    ]


def emit_report(rows: Sequence[ExperimentRow], format: str = "csv") -> str:
    """Render rows as CSV or a markdown pipe table."""
    if not rows:
        raise ConfigError("cannot emit a report with no rows")
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow(_cells(row))
        return out.getvalue()
    if format == "markdown":
        lines = [
            "| " + " | ".join(REPORT_COLUMNS) + " |",
            "|" + "|".join("---" for _ in REPORT_COLUMNS) + "|",
        ]
        for row in rows:
            lines.append("| " + " | ".join(_cells(row)) + " |")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {format!r}")


def write_report(rows: Sequence[ExperimentRow], format: str, path: str | Path) -> None:
    Path(path).write_text(emit_report(rows, format), encoding="utf-8")


def parse_report_csv(text: str) -> list[ExperimentRow]:
    """Parse an emitted CSV report back into rows (metrics detail is lost)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigError("empty report") from None
    if tuple(header) != REPORT_COLUMNS:
        raise ConfigError(f"unexpected report columns: {header!r}")
    rows = []
    for record in reader:
        if not record:
            continue
        if len(record) != len(REPORT_COLUMNS):
            raise ConfigError(f"malformed report row: {record!r}")
        model, selection, technique, precision, recall, f1, runtime = record
        rows.append(
            ExperimentRow(
                model=model,
                input_selection=InputSelection.from_string(selection),
                technique=int(technique),
                precision=float(precision),
                recall=float(recall),
                f1=float(f1),
                runtime_s=float(runtime),
            )
        )
    return rows


def _reference_row(obj: Mapping) -> ExperimentRow:
    return ExperimentRow(
        model=obj["model"],
        input_selection=InputSelection.from_string(obj["input_selection"]),
        technique=obj["technique"],
        precision=obj["precision"],
        recall=obj["recall"],
        f1=obj["f1"],
        runtime_s=0.0,
    )


def load_reference_rows() -> dict[str, list[ExperimentRow]]:
    """Published comparison numbers, keyed by table name."""
    data = json.loads(
        resources.files("factverdict").joinpath(REFERENCE_RESOURCE).read_text("utf-8")
    )
    return {name: [_reference_row(r) for r in rows] for name, rows in data.items()}
