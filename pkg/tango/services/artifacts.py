import csv
import json
import logging
import os
from typing import Any, Dict, Iterable, Sequence

from pydantic import BaseModel

from tango.training.loop import EpochRecord

logger = logging.getLogger(__name__)

METRICS_COLUMNS = ("epoch", "train_loss", "val_loss", "val_metric")
SNAPSHOT_COLUMNS = ("step", "node", "value")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else v


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    logger.info(f"Wrote {path}")


def write_metrics_csv(path: str, records: Iterable[EpochRecord]) -> None:
    write_csv(path, METRICS_COLUMNS, ((r.epoch, r.train_loss, r.val_loss, r.val_metric) for r in records))


def write_json(path: str, payload: Any) -> None:
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.write("\n")
    logger.info(f"Wrote {path}")


def read_json(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
