"""Typed configuration spaces: hyperparameter dimensions with bounds,
choices, defaults, and single-parent activation conditions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

from .errors import UnknownNameError


class HpKind(str, Enum):
    FLOAT = "float"
    INT = "int"
    CATEGORICAL = "categorical"
    ORDINAL = "ordinal"
    CONSTANT = "constant"


NUMERIC_KINDS = (HpKind.FLOAT, HpKind.INT)
CHOICE_KINDS = (HpKind.CATEGORICAL, HpKind.ORDINAL)


@dataclass(frozen=True)
class Condition:
    """Activate a hyperparameter only when its parent takes one of `values`."""

    parent: str
    values: tuple[Any, ...]

    def matches(self, parent_value: Any) -> bool:
        return parent_value in self.values


@dataclass(frozen=True)
class Hyperparameter:
    name: str
    kind: HpKind
    lower: float | None = None
    upper: float | None = None
    log_scale: bool = False
    choices: tuple[str, ...] = ()
    default: Any = None
    condition: Condition | None = None

    def __post_init__(self) -> None:
        if isinstance(self.condition, (tuple, list)):
            parent, values = self.condition
            object.__setattr__(self, "condition", Condition(parent, tuple(values)))
        if self.kind in NUMERIC_KINDS:
            if self.lower is None or self.upper is None:
                raise ValueError(f"{self.name}: numeric hyperparameter needs lower and upper")
            if not self.lower < self.upper:
                raise ValueError(f"{self.name}: lower must be < upper")
            if self.log_scale and self.lower <= 0:
                raise ValueError(f"{self.name}: log scale requires lower > 0")
            if self.default is None:
                object.__setattr__(self, "default", self._midpoint())
            if not self.contains(self.default):
                raise ValueError(f"{self.name}: default {self.default!r} outside bounds")
        elif self.kind in CHOICE_KINDS:
            object.__setattr__(self, "choices", tuple(self.choices))
            if not self.choices:
                raise ValueError(f"{self.name}: choices must be non-empty")
            if len(set(self.choices)) != len(self.choices):
                raise ValueError(f"{self.name}: choices must be unique")
            if self.default is None:
                object.__setattr__(self, "default", self.choices[0])
            if self.default not in self.choices:
                raise ValueError(f"{self.name}: default {self.default!r} not in choices")
        elif self.kind is HpKind.CONSTANT:
            if self.default is None:
                raise ValueError(f"{self.name}: constant needs a value (default)")
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"{self.name}: unknown kind {self.kind}")

    def _midpoint(self) -> float:
        if self.log_scale:
            mid = 10 ** ((math.log10(self.lower) + math.log10(self.upper)) / 2)
        else:
            mid = (self.lower + self.upper) / 2
        return int(round(mid)) if self.kind is HpKind.INT else mid

    def contains(self, value: Any) -> bool:
        """True iff `value` is legal for this hyperparameter."""
        if self.kind is HpKind.FLOAT:
            return isinstance(value, (int, float)) and not isinstance(value, bool) \
                and self.lower <= float(value) <= self.upper
        if self.kind is HpKind.INT:
            return isinstance(value, (int, float)) and not isinstance(value, bool) \
                and float(value) == int(value) and self.lower <= value <= self.upper
        if self.kind in CHOICE_KINDS:
            return value in self.choices
        return value == self.default

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"name": self.name, "type": self.kind.value, "default": self.default}
        if self.kind in NUMERIC_KINDS:
            d["lower"] = self.lower
            d["upper"] = self.upper
            d["log"] = self.log_scale
        if self.kind in CHOICE_KINDS:
            d["choices"] = list(self.choices)
        d["condition"] = (
            {"parent": self.condition.parent, "values": list(self.condition.values)}
            if self.condition
            else None
        )
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Hyperparameter":
        cond = d.get("condition")
        return cls(
            name=d["name"],
            kind=HpKind(d["type"]),
            lower=d.get("lower"),
            upper=d.get("upper"),
            log_scale=bool(d.get("log", False)),
            choices=tuple(d.get("choices") or ()),
            default=d.get("default"),
            condition=Condition(cond["parent"], tuple(cond["values"])) if cond else None,
        )


@dataclass
class ConfigurationSpace:
    """Ordered collection of hyperparameters; immutable after construction."""

    hyperparameters: list[Hyperparameter] = field(default_factory=list)

    def __post_init__(self) -> None:
        names = [hp.name for hp in self.hyperparameters]
        if len(set(names)) != len(names):
            raise ValueError("duplicate hyperparameter names")
        self._by_name = {hp.name: hp for hp in self.hyperparameters}
        self._check_conditions()

    def _check_conditions(self) -> None:
        for hp in self.hyperparameters:
            cond = hp.condition
            if cond is None:
                continue
            if cond.parent == hp.name:
                raise ValueError(f"{hp.name}: condition parent is the hyperparameter itself")
            if cond.parent not in self._by_name:
                raise ValueError(f"{hp.name}: condition parent {cond.parent!r} not in space")
        # acyclicity of the parent graph
        state: dict[str, int] = {}

        def visit(name: str) -> None:
            if state.get(name) == 1:
                raise ValueError(f"condition cycle involving {name!r}")
            if state.get(name) == 2:
                return
            state[name] = 1
            cond = self._by_name[name].condition
            if cond is not None:
                visit(cond.parent)
            state[name] = 2

        for hp in self.hyperparameters:
            visit(hp.name)

    def __iter__(self) -> Iterator[Hyperparameter]:
        return iter(self.hyperparameters)

    def __len__(self) -> int:
        return len(self.hyperparameters)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def names(self) -> list[str]:
        return [hp.name for hp in self.hyperparameters]

    def get(self, name: str) -> Hyperparameter:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownNameError("hyperparameter", name) from None

    def index(self, name: str) -> int:
        self.get(name)
        return self.names.index(name)

    def is_active(self, name: str, assignment: dict[str, Any]) -> bool:
        """Activity of `name` under a full or partial value assignment.

        A conditioned hyperparameter is active iff its parent is active and
        the parent's assigned value is one of the activating values.
        """
        cond = self._by_name[name].condition
        if cond is None:
            return True
        if cond.parent not in assignment:
            return False
        return self.is_active(cond.parent, assignment) and cond.matches(assignment[cond.parent])

    def active_subset(self, assignment: dict[str, Any]) -> dict[str, Any]:
        """Restrict a full assignment to its active hyperparameters."""
        return {
            hp.name: assignment[hp.name]
            for hp in self.hyperparameters
            if hp.name in assignment and self.is_active(hp.name, assignment)
        }

    def default_config(self) -> dict[str, Any]:
        """Default value for every hyperparameter active under the defaults."""
        full = {hp.name: hp.default for hp in self.hyperparameters}
        return self.active_subset(full)

    def settle(self, raw: dict[str, Any]) -> dict[str, Any]:
        """Resolve a possibly inconsistent assignment into a full active one.

        Activity is decided from the values the hyperparameters settle to,
        not from stale entries: deactivated entries are dropped and newly
        active hyperparameters fall back to their defaults.
        """
        values: dict[str, Any] = {}
        active: dict[str, bool] = {}

        def val(name: str) -> Any:
            if name not in values:
                values[name] = raw.get(name, self._by_name[name].default)
            return values[name]

        def is_on(name: str) -> bool:
            if name not in active:
                cond = self._by_name[name].condition
                active[name] = cond is None or (is_on(cond.parent) and cond.matches(val(cond.parent)))
            return active[name]

        return {hp.name: val(hp.name) for hp in self.hyperparameters if is_on(hp.name)}

    def to_dict(self) -> dict[str, Any]:
        return {"hyperparameters": [hp.to_dict() for hp in self.hyperparameters]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ConfigurationSpace":
        return cls([Hyperparameter.from_dict(h) for h in d["hyperparameters"]])
