"""Enumeration caps and scan budgets.

``GHOSTGAP_BUDGET`` overrides the defaults. It holds comma-separated
``key=value`` pairs (``enum_cap=1000,subset_cap=50``); a bare integer sets
``enum_cap`` only.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import ValidationError

ENV_VAR = "GHOSTGAP_BUDGET"


@dataclass(frozen=True)
class Budget:
    enum_cap: int = 10**7  # tuples in |X|^(2m) product enumeration
    subset_cap: int = 10**6  # point subsets visited by growth / VC scans
    eval_cap: int = 10**8  # (parameter, point) evaluations across a scan
    bit_cap: int = 24  # max points per packed dichotomy word

    def replace(self, **changes: int) -> Budget:
        return dataclasses.replace(self, **changes)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))


def parse_budget_string(text: str, base: Budget | None = None) -> Budget:
    base = base or Budget()
    text = text.strip()
    if not text:
        return base
    if text.isdigit():
        return base.replace(enum_cap=int(text))
    changes: dict[str, int] = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in Budget.field_names():
            raise ValidationError(f"bad budget entry {item!r}", field=ENV_VAR)
        try:
            changes[key] = int(value)
        except ValueError:
            raise ValidationError(f"budget value for {key} must be an integer", field=ENV_VAR) from None
        if changes[key] < 0:
            raise ValidationError(f"budget value for {key} must be >= 0", field=ENV_VAR)
    return base.replace(**changes)


def default_budget() -> Budget:
    """Defaults, with the environment override applied."""
    return parse_budget_string(os.environ.get(ENV_VAR, ""))
