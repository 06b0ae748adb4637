from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict

CHECKPOINT_FORMAT = "tango-checkpoint/1"


class ArrayRecord(BaseModel):
    shape: List[int]
    values: List[float]


class CheckpointFile(BaseModel):
    format: str = CHECKPOINT_FORMAT
    config: Dict[str, Any]
    meta: Dict[str, Any] = {}
    arrays: Dict[str, ArrayRecord]

    model_config = ConfigDict(extra="forbid")
