"""
Pydantic models shared by the verification services, the CLI and the HTTP API
"""
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from app.config import get_settings

PASS = "PASS"
FAIL = "FAIL"
INFO = "INFO"


class CheckResult(BaseModel):
    check_id: str
    status: Literal["PASS", "FAIL", "INFO"]
    detail: str = ""

    @classmethod
    def of(cls, check_id: str, passed: bool, detail: str = "") -> "CheckResult":
        return cls(check_id=check_id, status=PASS if passed else FAIL, detail=detail)

    @classmethod
    def info(cls, check_id: str, detail: str = "") -> "CheckResult":
        return cls(check_id=check_id, status=INFO, detail=detail)

    def line(self) -> str:
        return f"{self.status} {self.check_id} {self.detail}".rstrip()


class SystemReport(BaseModel):
    """Outcome of every check run against one registry entry"""
    system: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status != FAIL for check in self.checks)

    def add(self, check: CheckResult) -> None:
        self.checks.append(check)

    def extend(self, checks: List[CheckResult]) -> None:
        self.checks.extend(checks)

    def lines(self) -> List[str]:
        return [check.line() for check in self.checks]


class Prop41Report(BaseModel):
    system: str
    expectation: Literal["unconditional", "constrained", "never"]
    residual: str
    constraint: Optional[str] = None
    zero_under_constraint: Optional[bool] = None
    generic_point: Dict[str, str] = Field(default_factory=dict)
    nonzero_at_generic: Optional[bool] = None
    passed: bool


class ExactnessReport(BaseModel):
    max_relative_error: float
    tolerance: float
    evaluated: int
    skipped: List[str] = Field(default_factory=list)
    passed: bool


class JordanIdentityReport(BaseModel):
    """Both readings of the Jordan-like identity: plain matrix products and symmetrized products"""
    identities: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.identities.values())


class IntegratorConfig(BaseModel):
    method: Literal["rk4", "rk45"] = Field(default_factory=lambda: get_settings().method)
    step: float = Field(default_factory=lambda: get_settings().step)
    t_start: float = 0.0
    t_end: float = 10.0
    abs_tol: float = Field(default_factory=lambda: get_settings().abs_tol)
    rel_tol: float = Field(default_factory=lambda: get_settings().rel_tol)
    param_bindings: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_window(self) -> "IntegratorConfig":
        if self.t_end <= self.t_start:
            raise ValueError("t_end must be greater than t_start")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        return self


class DeriveRequest(BaseModel):
    system: str
    kind: Literal["biham", "jordan", "conformal"] = "biham"
    G: Optional[str] = None
    delta: Optional[str] = None


class DerivedSystemResponse(BaseModel):
    source: str
    kind: str
    N: Optional[str] = None
    G: Optional[str] = None
    Gbar: Optional[str] = None
    M: Optional[str] = None
    rhs: List[str]
    text: str


class SimulateRequest(BaseModel):
    system: str
    x0: List[float]
    params: Dict[str, float] = Field(default_factory=dict)
    t0: float = 0.0
    t1: float = 10.0
    dt: Optional[float] = None
    method: Optional[Literal["rk4", "rk45"]] = None

    @model_validator(mode="after")
    def check_state(self) -> "SimulateRequest":
        if len(self.x0) != 3:
            raise ValueError("x0 must have three components")
        return self


class VerifyResponse(BaseModel):
    system: str
    passed: bool
    checks: List[CheckResult]
