import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class CheckResult(BaseModel):
    check: str
    passed: bool = Field(alias="pass")
    value: float
    threshold: float

    model_config = ConfigDict(populate_by_name=True)


class VerifyReport(BaseModel):
    seed: int
    checks: List[CheckResult] = []
    details: Dict[str, Any] = {}

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "pass": self.passed,
            "checks": [c.model_dump(by_alias=True) for c in self.checks],
            "details": self.details,
        }
        return json.dumps(payload, indent=2)

    def table(self) -> str:
        width = max([len(c.check) for c in self.checks] + [5])
        lines = [f"{'check'.ljust(width)}  result  {'value':>12}  {'threshold':>12}"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{c.check.ljust(width)}  {status:<6}  {c.value:>12.4g}  {c.threshold:>12.4g}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


class SeedResult(BaseModel):
    seed: int
    test_metric: float
    best_epoch: int
    best_val_loss: float
    checkpoint: Optional[str] = None
    config: Optional[Dict[str, Any]] = None


class RunSummary(BaseModel):
    name: str
    model: str
    variant: str
    metric: str
    config: Dict[str, Any]
    seeds: List[SeedResult]
    test_metric_mean: float
    test_metric_std: float
    best_epoch: List[int]
