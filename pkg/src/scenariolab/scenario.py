"""Scenario matrix: which attributes participate in each test scenario.

A suite file is a delimiter-separated matrix mirroring the structure of a
scenario table: a role row (main / context / collab), a header row naming
columns as ``source.attribute`` (the prediction target carries a ``*``
suffix), and one data row per scenario where ``?`` (or an empty cell) means
the attribute is ignored and any other cell means it participates.

Example::

    # window=7
    role,main,context,collab,collab,collab
    scenario_id,sarmasu.hum*,sarmasu.temp,reghin.hum,tmures.hum,ludus.hum
    standalone,x,?,?,?,?
    cadm,x,x,?,?,?
    cadm_cdm_3,x,x,x,x,x
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import DataRepository
from .errors import (
    DuplicateScenarioError,
    InsufficientNeighborsError,
    ParseError,
    UnresolvedRefError,
)

ROLES = ("main", "context", "collab")
EXCLUDED_MARKERS = ("", "?")


@dataclass(frozen=True)
class AttributeRef:
    source_id: str
    attribute: str

    def __post_init__(self):
        if not self.source_id or not self.attribute:
            raise ParseError("attribute reference needs a source and an attribute")
        if "." in self.source_id:
            raise ParseError(f"source_id {self.source_id!r} must not contain '.'")

    def __str__(self):
        return f"{self.source_id}.{self.attribute}"

    @classmethod
    def parse(cls, text: str) -> "AttributeRef":
        source, sep, attribute = text.partition(".")
        if not sep:
            raise ParseError(f"{text!r} is not of the form source.attribute")
        return cls(source.strip(), attribute.strip())


def derive_label(has_context: bool, n_collaborative: int) -> str:
    """Scenario kind from the emptiness pattern of context/collaborative."""
    if has_context:
        return f"CADM+CDM({n_collaborative})" if n_collaborative else "CADM"
    return f"CDM({n_collaborative})" if n_collaborative else "Standalone"


@dataclass(frozen=True)
class ScenarioSpec:
    scenario_id: str
    target: AttributeRef
    main_attributes: tuple[AttributeRef, ...]
    context_attributes: tuple[AttributeRef, ...] = ()
    collaborative: tuple[tuple[str, tuple[AttributeRef, ...]], ...] = ()

    def __post_init__(self):
        if not self.scenario_id:
            raise ParseError("scenario_id must be non-empty")
        if any(c in self.scenario_id for c in ",/\\\n") or "__" in self.scenario_id:
            raise ParseError(
                f"scenario_id {self.scenario_id!r} must not contain commas, "
                "slashes, newlines or '__' (ids become file names)"
            )
        if self.target not in self.main_attributes:
            raise ParseError(
                f"scenario {self.scenario_id!r}: target {self.target} must be one of "
                "the participating main attributes"
            )
        for ref in self.main_attributes:
            if ref.source_id != self.target.source_id:
                raise ParseError(
                    f"scenario {self.scenario_id!r}: main attribute {ref} is not from "
                    f"the main source {self.target.source_id!r}"
                )
        collab_sources = [sid for sid, _ in self.collaborative]
        if len(set(collab_sources)) != len(collab_sources):
            raise ParseError(
                f"scenario {self.scenario_id!r}: duplicate collaborative source"
            )
        for sid, refs in self.collaborative:
            if not refs:
                raise ParseError(
                    f"scenario {self.scenario_id!r}: collaborative source {sid!r} "
                    "contributes no attributes"
                )
            for ref in refs:
                if ref.source_id != sid:
                    raise ParseError(
                        f"scenario {self.scenario_id!r}: {ref} listed under "
                        f"collaborative source {sid!r}"
                    )
        seen = set()
        for ref in self.all_attributes():
            if ref in seen:
                raise ParseError(
                    f"scenario {self.scenario_id!r}: {ref} appears more than once"
                )
            seen.add(ref)

    @property
    def label(self) -> str:
        return derive_label(bool(self.context_attributes), len(self.collaborative))

    @property
    def main_source(self) -> str:
        return self.target.source_id

    def all_attributes(self) -> list[AttributeRef]:
        """Every participating attribute, in assembly order."""
        refs = list(self.main_attributes) + list(self.context_attributes)
        for _, collab_refs in self.collaborative:
            refs.extend(collab_refs)
        return refs


@dataclass(frozen=True)
class SuiteDefaults:
    """Shared run settings a suite file may carry; None means unset."""

    window: int | None = None
    split: float | None = None
    algorithms: tuple[str, ...] | None = None


@dataclass
class ScenarioSuite:
    scenarios: list[ScenarioSpec]
    defaults: SuiteDefaults = field(default_factory=SuiteDefaults)

    def __post_init__(self):
        if not self.scenarios:
            raise ParseError("suite contains no scenarios")
        ids = [s.scenario_id for s in self.scenarios]
        dupes = {i for i in ids if ids.count(i) > 1}
        if dupes:
            raise DuplicateScenarioError(f"duplicate scenario_id(s): {sorted(dupes)}")

    def __eq__(self, other):
        if not isinstance(other, ScenarioSuite):
            return NotImplemented
        return self.scenarios == other.scenarios and self.defaults == other.defaults

    def get(self, scenario_id: str) -> ScenarioSpec:
        for s in self.scenarios:
            if s.scenario_id == scenario_id:
                return s
        raise UnresolvedRefError(f"no scenario {scenario_id!r} in suite")


def _parse_directive(line: str) -> tuple[str, str]:
    body = line.lstrip("#").strip()
    key, sep, value = body.partition("=")
    if not sep:
        raise ParseError(f"malformed directive {line!r} (expected '# key=value')")
    return key.strip(), value.strip()


def parse_suite(path, delimiter: str = ",") -> ScenarioSuite:
    """Parse a scenario matrix file into a ScenarioSuite."""
    path = Path(path)
    window = split = algorithms = None
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        for raw in csv.reader(fh, delimiter=delimiter):
            if not raw or all(not c.strip() for c in raw):
                continue
            if raw[0].lstrip().startswith("#"):
                key, value = _parse_directive(delimiter.join(raw))
                if key == "window":
                    window = int(value)
                elif key == "split":
                    split = float(value)
                elif key == "algorithms":
                    algorithms = tuple(a.strip() for a in value.split(",") if a.strip())
                else:
                    raise ParseError(f"{path}: unknown directive {key!r}")
                continue
            rows.append([c.strip() for c in raw])

    if len(rows) < 3:
        raise ParseError(f"{path}: no scenarios (need role row, header row, data rows)")

    role_row, header_row, data_rows = rows[0], rows[1], rows[2:]
    if role_row[0] != "role":
        raise ParseError(f"{path}: first row must start with 'role'")
    if header_row[0] != "scenario_id":
        raise ParseError(f"{path}: second row must start with 'scenario_id'")
    if len(role_row) != len(header_row):
        raise ParseError(f"{path}: role row and header row differ in length")

    roles = role_row[1:]
    for r in roles:
        if r not in ROLES:
            raise ParseError(f"{path}: unknown role {r!r} (expected one of {ROLES})")

    refs = []
    target = None
    for name, role in zip(header_row[1:], roles):
        starred = name.endswith("*")
        ref = AttributeRef.parse(name[:-1] if starred else name)
        if starred:
            if target is not None:
                raise ParseError(f"{path}: more than one target column")
            if role != "main":
                raise ParseError(f"{path}: target column {ref} must have role 'main'")
            target = ref
        refs.append(ref)
    if target is None:
        raise ParseError(f"{path}: no target column (mark one header with '*')")

    scenarios = []
    for row in data_rows:
        if len(row) != len(header_row):
            raise ParseError(
                f"{path}: scenario row {row[0]!r} has {len(row)} cells, "
                f"expected {len(header_row)}"
            )
        scenario_id = row[0]
        main, context = [], []
        collab_order: list[str] = []
        collab_attrs: dict[str, list[AttributeRef]] = {}
        for cell, ref, role in zip(row[1:], refs, roles):
            if cell in EXCLUDED_MARKERS:
                continue
            if role == "main":
                main.append(ref)
            elif role == "context":
                context.append(ref)
            else:
                if ref.source_id not in collab_attrs:
                    collab_order.append(ref.source_id)
                    collab_attrs[ref.source_id] = []
                collab_attrs[ref.source_id].append(ref)
        if target not in main:
            raise ParseError(
                f"{path}: scenario {scenario_id!r} excludes the target attribute"
            )
        scenarios.append(
            ScenarioSpec(
                scenario_id=scenario_id,
                target=target,
                main_attributes=tuple(main),
                context_attributes=tuple(context),
                collaborative=tuple(
                    (sid, tuple(collab_attrs[sid])) for sid in collab_order
                ),
            )
        )

    return ScenarioSuite(
        scenarios=scenarios,
        defaults=SuiteDefaults(window=window, split=split, algorithms=algorithms),
    )


def write_suite(suite: ScenarioSuite, path, delimiter: str = ","):
    """Write a suite as a scenario matrix file (inverse of parse_suite)."""
    main_cols: list[AttributeRef] = []
    context_cols: list[AttributeRef] = []
    collab_sources: list[str] = []
    collab_cols: dict[str, list[AttributeRef]] = {}
    for spec in suite.scenarios:
        for ref in spec.main_attributes:
            if ref not in main_cols:
                main_cols.append(ref)
        for ref in spec.context_attributes:
            if ref not in context_cols:
                context_cols.append(ref)
        for sid, refs in spec.collaborative:
            if sid not in collab_cols:
                collab_sources.append(sid)
                collab_cols[sid] = []
            for ref in refs:
                if ref not in collab_cols[sid]:
                    collab_cols[sid].append(ref)

    target = suite.scenarios[0].target
    columns = [(ref, "main") for ref in main_cols]
    columns += [(ref, "context") for ref in context_cols]
    for sid in collab_sources:
        columns += [(ref, "collab") for ref in collab_cols[sid]]

    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        d = suite.defaults
        if d.window is not None:
            fh.write(f"# window={d.window}\n")
        if d.split is not None:
            fh.write(f"# split={d.split!r}\n")
        if d.algorithms is not None:
            fh.write(f"# algorithms={','.join(d.algorithms)}\n")
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(["role"] + [role for _, role in columns])
        writer.writerow(
            ["scenario_id"]
            + [f"{ref}*" if ref == target else str(ref) for ref, _ in columns]
        )
        for spec in suite.scenarios:
            included = set(spec.all_attributes())
            writer.writerow(
                [spec.scenario_id]
                + ["x" if ref in included else "?" for ref, _ in columns]
            )


def generate_presets(
    main: str,
    target_attribute: str,
    context_attribute: str,
    neighbors: list[str],
    neighbor_attribute: str,
) -> ScenarioSuite:
    """The six canonical scenarios for one main location.

    Standalone, CADM, CADM+CDM with 1/2/3 collaborative sources, and CDM
    with 3 sources. Neighbor inclusion order follows the supplied list.
    """
    if len(neighbors) < 3:
        raise InsufficientNeighborsError(
            f"need at least 3 neighbors, got {len(neighbors)}"
        )
    target = AttributeRef(main, target_attribute)
    context = (AttributeRef(main, context_attribute),)
    collab = tuple(
        (sid, (AttributeRef(sid, neighbor_attribute),)) for sid in neighbors[:3]
    )

    def spec(scenario_id, context_attrs, n_collab):
        return ScenarioSpec(
            scenario_id=scenario_id,
            target=target,
            main_attributes=(target,),
            context_attributes=context_attrs,
            collaborative=collab[:n_collab],
        )

    return ScenarioSuite(
        scenarios=[
            spec("standalone", (), 0),
            spec("cadm", context, 0),
            spec("cadm_cdm_1", context, 1),
            spec("cadm_cdm_2", context, 2),
            spec("cadm_cdm_3", context, 3),
            spec("cdm_3", (), 3),
        ]
    )


def suite_to_dict(suite: ScenarioSuite) -> dict:
    """JSON-ready description of a suite (used in run config snapshots)."""
    return {
        "defaults": {
            "window": suite.defaults.window,
            "split": suite.defaults.split,
            "algorithms": None
            if suite.defaults.algorithms is None
            else list(suite.defaults.algorithms),
        },
        "scenarios": [
            {
                "scenario_id": s.scenario_id,
                "label": s.label,
                "target": str(s.target),
                "main": [str(r) for r in s.main_attributes],
                "context": [str(r) for r in s.context_attributes],
                "collaborative": [
                    {"source": sid, "attributes": [str(r) for r in refs]}
                    for sid, refs in s.collaborative
                ],
            }
            for s in suite.scenarios
        ],
    }


def validate_suite(suite: ScenarioSuite, repo: DataRepository):
    """Check that every reference in the suite resolves against the repository."""
    for spec in suite.scenarios:
        for ref in spec.all_attributes():
            ds = repo[ref.source_id]
            if ref.attribute not in ds.attribute_names:
                raise UnresolvedRefError(
                    f"scenario {spec.scenario_id!r}: source {ref.source_id!r} has no "
                    f"attribute {ref.attribute!r}"
                )
