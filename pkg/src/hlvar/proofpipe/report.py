"""Stage records and errors shared by the proof pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..stepfn import format_rational


class ProofPipeError(RuntimeError):
    pass


class UnsortedPoints(ProofPipeError, ValueError):
    pass


class PreconditionViolated(ProofPipeError, ValueError):
    pass


class HypothesisViolated(ProofPipeError, ValueError):
    pass


class InvalidWitness(ProofPipeError, ValueError):
    pass


class WitnessInvalid(ProofPipeError):
    def __init__(self, n: int, k: int, what: str) -> None:
        super().__init__(f"witness at (n={n}, k={k}) fails: {what}")
        self.n, self.k, self.what = n, k, what


class EmptyInput(ProofPipeError, ValueError):
    pass


class ClassEmpty(ProofPipeError, ValueError):
    pass


class ConstructionFailed(ProofPipeError):
    """A construction that is proven to succeed did not; indicates a bug."""

    def __init__(self, stage: str, detail: str = "") -> None:
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage


class OmegaNotAttained(ProofPipeError):
    pass


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass(frozen=True)
class StageRecord:
    """``achieved`` compared against ``bound``; ``relation`` says which side must be larger."""

    name: str
    bound: Fraction
    achieved: Fraction
    relation: str = "<="  # achieved <= bound, or ">=" for achieved >= bound
    informational: bool = False
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def margin(self) -> Fraction:
        if self.relation == "<=":
            return self.bound - self.achieved
        return self.achieved - self.bound

    @property
    def ok(self) -> bool:
        if self.informational:
            return True
        # detail["strict"] marks inequalities that must hold with a positive margin
        return self.margin > 0 if self.detail.get("strict") else self.margin >= 0

    def to_json_obj(self) -> dict:
        out = {
            "name": self.name,
            "relation": self.relation,
            "bound": format_rational(self.bound),
            "achieved": format_rational(self.achieved),
            "margin": format_rational(self.margin),
            "informational": self.informational,
        }
        if self.detail:
            out["detail"] = _jsonable(self.detail)
        return out


def at_most(name: str, achieved, bound, **detail) -> StageRecord:
    return StageRecord(name, Fraction(bound), Fraction(achieved), "<=", detail=detail)


def at_least(name: str, achieved, bound, **detail) -> StageRecord:
    return StageRecord(name, Fraction(bound), Fraction(achieved), ">=", detail=detail)


@dataclass
class ChainReport:
    records: list[StageRecord] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def add(self, rec: StageRecord) -> StageRecord:
        self.records.append(rec)
        return rec

    def extend(self, other: "ChainReport") -> None:
        self.records.extend(other.records)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    def failures(self) -> list[StageRecord]:
        return [r for r in self.records if not r.ok]

    def min_margin(self) -> Fraction | None:
        m = [r.margin for r in self.records if not r.informational]
        return min(m) if m else None

    def to_json_obj(self) -> dict:
        return {
            "ok": self.ok,
            "summary": _jsonable(self.summary),
            "stages": [r.to_json_obj() for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=False)
