from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

SampleTask = Literal["diameter", "sssp", "eccentricity", "barbell-demo"]


class GraphRecord(BaseModel):
    """One line of a JSON-lines dataset file."""

    n: int
    edges: List[Tuple[int, int]]
    x: List[List[float]]
    task: SampleTask
    y_graph: Optional[float] = None
    y_node: Optional[List[float]] = None
    source: Optional[int] = None
    family: Optional[str] = None
    split: Literal["train", "val", "test"]

    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    @model_validator(mode="after")
    def _one_target(self):
        if (self.y_graph is None) == (self.y_node is None):
            raise ValueError("exactly one of y_graph / y_node must be set")
        if len(self.x) != self.n:
            raise ValueError(f"x has {len(self.x)} rows for n={self.n}")
        if self.y_node is not None and len(self.y_node) != self.n:
            raise ValueError(f"y_node has {len(self.y_node)} entries for n={self.n}")
        return self


class DatasetMeta(BaseModel):
    """Sidecar metadata written next to a generated dataset."""

    seed: int
    task: str
    sizes: Tuple[int, int, int]
    families: List[str]
    family_mix: str = "uniform"
    node_range: Tuple[int, int]
    counts: dict
