from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class _Report(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    def to_json(self) -> str:
        """Sorted keys, no timestamps: equal reports are byte-identical."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")


class FilterReportModel(_Report):
    total: int = Field(ge=0)
    accepted: int = Field(ge=0)
    rate: float = Field(ge=0.0, le=1.0)
    counts: Dict[str, int]


class DemoReportModel(_Report):
    name: str
    mode: str
    input: str
    filter: str
    branch: str
    shots: Optional[int] = None
    seed: Optional[int] = None
    reference: Dict[str, float]
    observed: Dict[str, float]
    tvd: float
    tolerance: float
    acceptance_rate: float
    accepted: Optional[int] = None
    passed: bool


class BranchCertificateModel(_Report):
    y: str
    b: str
    probability: float
    theta: Optional[int] = None
    fidelity: float
    error: Optional[str] = None


class CertificationModel(_Report):
    d0: int
    e: int
    alpha: List[int]
    passed: bool
    total_probability: float
    theta_distribution: Dict[str, float]
    branches: List[BranchCertificateModel]


class CertifyReportModel(_Report):
    rule: Dict[str, Any]
    passed: bool
    instances: List[CertificationModel]

    @classmethod
    def from_reports(cls, reports, rule) -> CertifyReportModel:
        instances = [
            CertificationModel(
                d0=report.key.d0,
                e=report.key.e,
                alpha=list(report.alpha),
                passed=report.passed,
                total_probability=round(report.total_probability, 12),
                theta_distribution={str(k): round(p, 12) for k, p in report.theta_distribution.items()},
                branches=[
                    BranchCertificateModel(
                        y=row.y,
                        b=row.b,
                        probability=round(row.probability, 12),
                        theta=row.theta,
                        fidelity=round(row.fidelity, 12),
                        error=row.error,
                    )
                    for row in report.branches
                ],
            )
            for report in reports
        ]
        return cls(
            rule={"squeeze": rule.squeeze.value, "pairing": list(rule.pairing), "sign": rule.sign.value},
            passed=all(instance.passed for instance in instances),
            instances=instances,
        )
