"""Parameter files.

Two flat formats are accepted and map onto one ``SimParams``:

* a JSON object, e.g. ``{"loanlimit": -15}``
* Matlab-style assignment lines::

      N=10; %number of agents
      rl = .07/52; % interest rate on loans

  Values may be numbers, simple arithmetic on numbers, or a bare/quoted word
  (for ``price_mode``). ``%`` and ``#`` start comments.

Keys are the ``SimParams`` field names or the short names (``N``, ``rl``, ``loanlimit``, ...).
"""

from __future__ import annotations

import ast
import dataclasses
import json
import operator
import re
from typing import Any, Mapping

from .model import SimParams, ValidationError

ALIASES = {
    "N": "n_agents",
    "W": "weeks",
    "T": "weekly_transactions",
    "rl": "loan_rate_weekly",
    "rd": "deposit_rate_weekly",
    "tax": "tax_rate",
    "spendtaxes": "spend_taxes_multiple",
    "spend": "banker_spend_fraction",
    "mood": "mood_odds",
    "defaultlimit": "default_limit",
    "loanlimit": "loan_limit",
}

FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SimParams)}


class ConfigError(ValueError):
    pass


def canonical_key(key: str) -> str:
    if key in FIELD_TYPES:
        return key
    if key in ALIASES:
        return ALIASES[key]
    raise ConfigError(f"unknown parameter {key!r}")


def coerce(key: str, value: Any) -> Any:
    """Check ``value`` against the declared type of field ``key``."""
    kind = FIELD_TYPES[key]
    if kind == "int":
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    return value


def params_from_mapping(data: Mapping[str, Any]) -> SimParams:
    values: dict[str, Any] = {}
    for raw_key, raw_value in data.items():
        key = canonical_key(raw_key)
        if key in values:
            raise ConfigError(f"parameter {key!r} given more than once (check aliases)")
        values[key] = coerce(key, raw_value)
    params = SimParams(**values)
    problems = params.problems()
    if problems:
        raise ConfigError("; ".join(problems))
    return params


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _eval_value(text: str) -> Any:
    try:
        node = ast.parse(text, mode="eval").body
    except SyntaxError:
        raise ConfigError(f"cannot parse value {text!r}") from None

    def ev(n: ast.AST) -> Any:
        if isinstance(n, ast.Constant) and isinstance(n.value, (int, float, str)):
            return n.value
        if isinstance(n, ast.Name):
            return n.id
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.USub, ast.UAdd)):
            v = ev(n.operand)
            return -v if isinstance(n.op, ast.USub) else +v
        if isinstance(n, ast.BinOp) and type(n.op) in _BINOPS:
            return _BINOPS[type(n.op)](ev(n.left), ev(n.right))
        raise ConfigError(f"unsupported expression {text!r}")

    try:
        return ev(node)
    except (TypeError, ZeroDivisionError):
        raise ConfigError(f"unsupported expression {text!r}") from None


_LINE = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*(.+?)\s*;?\s*$")


def parse_assignments(text: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = re.split(r"[%#]", line, maxsplit=1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'name = value', got {line!r}")
        key, value = m.group(1), m.group(2).rstrip(";").strip()
        if key in out:
            raise ConfigError(f"line {lineno}: {key!r} assigned twice")
        out[key] = _eval_value(value)
    return out


def load_config(text: str) -> SimParams:
    """Parse a parameter document; absent keys take their defaults."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
    else:
        data = parse_assignments(text)
    try:
        return params_from_mapping(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None


def dump_config(params: SimParams) -> str:
    return json.dumps(dataclasses.asdict(params), indent=2, sort_keys=False) + "\n"
