"""Contact-material table: a small hand-editable text database.

File grammar (one record per block, blocks separated by blank lines,
'#' starts a comment line):

    material <name>
    conductivity <W/(m K)>
    effusivity <J/(m^2 K sqrt(s))>
    source <free text citation>

Names are matched case-insensitively but stored as written.  Conductivity
and effusivity must be positive and finite.  The source line is optional
free text; the bundled table cites where each value was copied from.
"""

import dataclasses
import math
from importlib import resources

from .physics import ThermalProps

_REQUIRED_FIELDS = ("conductivity", "effusivity")


class MaterialDbError(ValueError):
    """Raised for unreadable, malformed or inconsistent material files."""


@dataclasses.dataclass(frozen=True)
class MaterialRecord:
    name: str
    conductivity: float   # W/(m K)
    effusivity: float     # J/(m^2 K sqrt(s))
    source: str = ""      # free-form citation for the numbers

    def __post_init__(self):
        for label, v in (("conductivity", self.conductivity),
                         ("effusivity", self.effusivity)):
            if not (math.isfinite(v) and v > 0.0):
                raise MaterialDbError(
                    f"material {self.name!r}: {label} must be positive "
                    f"and finite, got {v}")


def to_thermal_props(record: MaterialRecord) -> ThermalProps:
    """Derive the full property triple; diffusivity = (lambda/e)^2."""
    return ThermalProps.from_conductivity_effusivity(
        record.conductivity, record.effusivity)


class MaterialDb:
    """Ordered collection of material records with case-insensitive lookup."""

    def __init__(self, records):
        self._records = list(records)
        seen = {}
        for rec in self._records:
            key = rec.name.lower()
            if key in seen:
                raise MaterialDbError(
                    f"duplicate material name {rec.name!r} "
                    f"(clashes with {seen[key]!r})")
            seen[key] = rec.name
        self._by_name = {rec.name.lower(): rec for rec in self._records}

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def names(self) -> list[str]:
        return [rec.name for rec in self._records]

    def get(self, name: str) -> MaterialRecord:
        try:
            return self._by_name[name.lower()]
        except KeyError:
            known = ", ".join(self.names())
            raise MaterialDbError(
                f"unknown material {name!r} (known: {known})") from None

    def props(self, name: str) -> ThermalProps:
        return to_thermal_props(self.get(name))


def _parse_float(value: str, path, lineno: int, field: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise MaterialDbError(
            f"{path}:{lineno}: {field} value {value!r} is not a number") from None
    if not out > 0.0:
        raise MaterialDbError(
            f"{path}:{lineno}: {field} must be positive, got {value}")
    return out


def parse_db(text: str, path="<string>") -> MaterialDb:
    records = []
    current = None        # dict of fields for the block being read
    current_line = 0      # line the current block started on

    def finish(block, lineno):
        missing = [f for f in _REQUIRED_FIELDS if f not in block]
        if missing:
            raise MaterialDbError(
                f"{path}:{lineno}: material {block['name']!r} is missing "
                f"field(s): {', '.join(missing)}")
        return MaterialRecord(name=block["name"],
                              conductivity=block["conductivity"],
                              effusivity=block["effusivity"],
                              source=block.get("source", ""))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current is not None:
                records.append(finish(current, current_line))
                current = None
            continue
        parts = line.split(None, 1)
        key = parts[0].lower()
        value = parts[1].strip() if len(parts) > 1 else ""
        if key == "material":
            if current is not None:
                records.append(finish(current, current_line))
            if not value:
                raise MaterialDbError(f"{path}:{lineno}: material line has no name")
            current = {"name": value}
            current_line = lineno
        elif key in ("conductivity", "effusivity"):
            if current is None:
                raise MaterialDbError(
                    f"{path}:{lineno}: {key} line outside a material block")
            current[key] = _parse_float(value, path, lineno, key)
        elif key == "source":
            if current is None:
                raise MaterialDbError(
                    f"{path}:{lineno}: source line outside a material block")
            current["source"] = value
        else:
            raise MaterialDbError(f"{path}:{lineno}: unrecognized field {key!r}")
    if current is not None:
        records.append(finish(current, current_line))
    if not records:
        raise MaterialDbError(f"{path}: no material records found")
    return MaterialDb(records)


def load_db(path) -> MaterialDb:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise MaterialDbError(f"cannot read material file {path}: {exc}") from None
    return parse_db(text, path=path)


def write_db(db: MaterialDb, path) -> None:
    """Write a db in the same grammar load_db reads (lossless round-trip)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# thermotouch material table\n")
        for rec in db:
            fh.write(f"\nmaterial {rec.name}\n")
            fh.write(f"conductivity {rec.conductivity!r}\n")
            fh.write(f"effusivity {rec.effusivity!r}\n")
            fh.write(f"source {rec.source}\n")


def default_db() -> MaterialDb:
    """The five bundled contact materials (four metals and wood)."""
    text = (resources.files("thermotouch") / "data" / "materials.txt").read_text(
        encoding="utf-8")
    return parse_db(text, path="thermotouch/data/materials.txt")
