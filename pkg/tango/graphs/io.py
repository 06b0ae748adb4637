import json
import logging
import os
from typing import Optional

from pydantic import ValidationError

from tango.errors import DatasetFormatError, GraphError, ShapeError
from tango.graphs.datasets import DatasetSplit, GraphSample
from tango.graphs.graph import Graph
from tango.schemas.dataset import DatasetMeta, GraphRecord

logger = logging.getLogger(__name__)


def meta_path(path: str) -> str:
    return path + ".meta.json"


def to_record(sample: GraphSample, split: str) -> GraphRecord:
    return GraphRecord(
        n=sample.graph.n,
        edges=[list(e) for e in sample.graph.edges],
        x=sample.x.tolist(),
        task=sample.task,
        y_graph=sample.y_graph,
        y_node=None if sample.y_node is None else sample.y_node.tolist(),
        source=sample.source,
        family=sample.family,
        split=split,
    )


def from_record(rec: GraphRecord) -> GraphSample:
    graph = Graph.from_edges(rec.n, rec.edges)
    return GraphSample(
        graph,
        rec.x,
        rec.task,
        y_graph=rec.y_graph,
        y_node=rec.y_node,
        source=rec.source,
        family=rec.family,
    )


def write_dataset(path: str, data: DatasetSplit, meta: Optional[DatasetMeta] = None) -> int:
    """Write one JSON object per line, splits in train/val/test order."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for name, samples in data.items():
            for sample in samples:
                fh.write(to_record(sample, name).model_dump_json())
                fh.write("\n")
                count += 1
    if meta is not None:
        with open(meta_path(path), "w", encoding="utf-8") as fh:
            fh.write(meta.model_dump_json(indent=2))
    logger.info(f"Wrote {count} samples to {path}")
    return count


def read_dataset(path: str) -> DatasetSplit:
    out = DatasetSplit()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = GraphRecord.model_validate_json(line)
            except ValidationError as e:
                first = e.errors()[0] if e.errors() else {"msg": str(e)}
                raise DatasetFormatError(first["msg"], line=lineno) from e
            try:
                sample = from_record(rec)
            except (GraphError, ShapeError) as e:
                raise DatasetFormatError(str(e), line=lineno) from e
            out.split(rec.split).append(sample)

    if out.is_empty():
        logger.warning(f"Dataset file {path} holds no samples")
        out.error = "empty dataset file"
    if os.path.isfile(meta_path(path)):
        with open(meta_path(path), "r", encoding="utf-8") as fh:
            try:
                out.seed = DatasetMeta.model_validate(json.load(fh)).seed
            except (json.JSONDecodeError, ValidationError):
                logger.warning(f"Ignoring unreadable dataset metadata {meta_path(path)}")
    return out
