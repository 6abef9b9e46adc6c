"""Deterministic CSV / JSON emission for scan tables."""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

ENERGY_UNIT = "hbar^2/(M L^2)"
UNITS = {
    "k": "1/L", "k_prime": "1/L", "k_prime_star": "1/L", "k_minus_k_prime_star": "1/L",
    "g": "hbar^2/(M L)", "g_prime": "hbar^2/(M L)",
    "r": "L", "xi": "L", "u": "L", "w": "L", "x_m1": "L", "x_m2": "L",
    "E_jastrow": ENERGY_UNIT, "E_variational": ENERGY_UNIT, "E_bethe": ENERGY_UNIT,
    "E_ed": ENERGY_UNIT, "E_ed_uncertainty": ENERGY_UNIT,
    "rho": "1/L", "density": "1/L^2",
    "slope": "L", "h_used": "1/L",
}
TG_UNIT = "E_TG = 4 pi^2 hbar^2/(M L^2)"


def format_value(x) -> str:
    """Fixed textual form: 17 significant digits for floats, so output is byte-stable."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def units_for(columns: Sequence[str], normalized: bool = False) -> list:
    out = []
    for c in columns:
        unit = UNITS.get(c, "1")
        if normalized and unit == ENERGY_UNIT:
            unit = TG_UNIT
        out.append(unit)
    return out


def _json_value(x):
    if isinstance(x, (bool, int, str)):
        return x
    x = float(x)
    return None if not math.isfinite(x) else x


def render(
    columns: Sequence[str],
    rows: Iterable[Sequence],
    fmt: str = "csv",
    meta: Optional[dict] = None,
    normalized: bool = False,
) -> str:
    rows = [list(r) for r in rows]
    units = units_for(columns, normalized)
    meta = dict(meta or {})
    if fmt == "json":
        payload = {
            "columns": list(columns),
            "units": dict(zip(columns, units)),
            "meta": {k: _json_value(v) if isinstance(v, float) else v for k, v in meta.items()},
            "rows": [[_json_value(x) for x in r] for r in rows],
        }
        return json.dumps(payload, indent=1, sort_keys=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    lines = ["# columns: " + ", ".join(f"{c} [{u}]" for c, u in zip(columns, units))]
    for key, value in meta.items():
        lines.append(f"# {key}: {format_value(value) if isinstance(value, float) else value}")
    lines.append(",".join(columns))
    for r in rows:
        if len(r) != len(columns):
            raise ValueError(f"row has {len(r)} fields, expected {len(columns)}")
        lines.append(",".join(format_value(x) for x in r))
    return "\n".join(lines) + "\n"


def emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
