"""Witness facts, solvability closure, and the pairwise relation map.

Solvability propagates along the structural order (a fact solvable in a
model is solvable in every structurally stronger one; an unsolvable fact
propagates downward).  Relation candidates per model pair start from all
four relations and are trimmed by the structural order and by separating
witnesses; a singleton is a proven relation, anything larger is one of the
published two-candidate cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .model import ALL_MODELS, LightClass, ModelId, SyncMode

PROBLEMS = ("trt", "fff", "nwc", "spi", "ash", "pse")

RELATIONS = (">", "<", "perp", "equiv")
_REL_SYMBOL = {">": ">", "<": "<", "perp": "\u22a5", "equiv": "\u2261"}

# Table layout of the published relation map.
TABLE_ROWS = tuple(ModelId.parse(s) for s in (
    "OBLOT^A", "FSTA^A", "FCOM^A", "LUMI^A", "OBLOT^S", "FSTA^S",
    "FCOM^S", "LUMI^S", "OBLOT^F", "FSTA^F", "FCOM^F"))
TABLE_COLS = tuple(ModelId.parse(s) for s in (
    "LUMI^F", "FCOM^F", "FSTA^F", "OBLOT^F", "LUMI^S", "FCOM^S",
    "FSTA^S", "OBLOT^S", "LUMI^A", "FCOM^A", "FSTA^A"))


class InconsistentFacts(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class WitnessFact:
    problem: str
    model: ModelId
    solvable: bool
    lemma: str


_LIGHT_RANKS = {
    LightClass.OBLOT: frozenset({LightClass.OBLOT, LightClass.FSTA,
                                 LightClass.FCOM, LightClass.LUMI}),
    LightClass.FSTA: frozenset({LightClass.FSTA, LightClass.LUMI}),
    LightClass.FCOM: frozenset({LightClass.FCOM, LightClass.LUMI}),
    LightClass.LUMI: frozenset({LightClass.LUMI}),
}
_SYNC_RANK = {SyncMode.ASYNC: 0, SyncMode.SSYNC: 1, SyncMode.FSYNC: 2}


def structural_leq(m1: ModelId, m2: ModelId) -> bool:
    """Product order: light diamond (FSTA and FCOM incomparable) x sync chain."""
    return (m2.light in _LIGHT_RANKS[m1.light]
            and _SYNC_RANK[m1.sync] <= _SYNC_RANK[m2.sync])


SolvabilityMatrix = dict[tuple[str, ModelId], Optional[bool]]


def close(facts: Sequence[WitnessFact]) -> SolvabilityMatrix:
    """Fixpoint of the two propagation rules over the model lattice."""
    problems = tuple(dict.fromkeys(f.problem for f in facts)) or PROBLEMS
    matrix: SolvabilityMatrix = {}
    for p in problems:
        pos = [f for f in facts if f.problem == p and f.solvable]
        neg = [f for f in facts if f.problem == p and not f.solvable]
        for m in ALL_MODELS:
            up = [f for f in pos if structural_leq(f.model, m)]
            down = [f for f in neg if structural_leq(m, f.model)]
            if up and down:
                raise InconsistentFacts(
                    f"{p}: {up[0].lemma} makes {m.label()} solvable but "
                    f"{down[0].lemma} makes it unsolvable")
            matrix[(p, m)] = True if up else (False if down else None)
    return matrix


@dataclass(frozen=True)
class RelationCell:
    m1: ModelId                       # table row
    m2: ModelId                       # table column
    candidates: tuple[str, ...]       # subset of RELATIONS, canonical order
    row_over_col: tuple[str, ...]     # problems in psi(m1) \ psi(m2)
    col_over_row: tuple[str, ...]
    row_witness: Optional[str]
    col_witness: Optional[str]
    transparent: Optional[str] = None

    @property
    def proven(self) -> Optional[str]:
        return self.candidates[0] if len(self.candidates) == 1 else None


_WITNESS_PRIORITY = ("trt", "nwc", "fff", "spi", "ash", "pse")


def _pick_witness(options: Sequence[str], superior_light: LightClass,
                  row_side: bool) -> Optional[str]:
    # The published table tags FCOM rows that dominate a column with their
    # communication witness (nwc) even when trt would also separate.
    if row_side and superior_light is LightClass.FCOM and "nwc" in options:
        return "nwc"
    for p in _WITNESS_PRIORITY:
        if p in options:
            return p
    return None


def relation_candidates(m1: ModelId, m2: ModelId,
                        matrix: SolvabilityMatrix) -> RelationCell:
    if m1 == m2:
        raise ValueError("relation cells compare distinct models")
    problems = tuple(dict.fromkeys(p for (p, _m) in matrix))
    row_adv = tuple(p for p in problems
                    if matrix[(p, m1)] is True and matrix[(p, m2)] is False)
    col_adv = tuple(p for p in problems
                    if matrix[(p, m2)] is True and matrix[(p, m1)] is False)
    candidates = set(RELATIONS)
    if structural_leq(m1, m2):
        if row_adv:
            raise InconsistentFacts(
                f"{m1.label()} <= {m2.label()} but {row_adv} separate upward")
        candidates -= {">", "perp"}
    if structural_leq(m2, m1):
        if col_adv:
            raise InconsistentFacts(
                f"{m2.label()} <= {m1.label()} but {col_adv} separate upward")
        candidates -= {"<", "perp"}
    if row_adv:
        candidates -= {"equiv", "<"}
    if col_adv:
        candidates -= {"equiv", ">"}
    if not candidates:
        raise InconsistentFacts(f"no consistent relation between {m1.label()} "
                                f"and {m2.label()}")
    ordered = tuple(r for r in RELATIONS if r in candidates)
    return RelationCell(
        m1, m2, ordered, row_adv, col_adv,
        _pick_witness(row_adv, m1.light, row_side=True),
        _pick_witness(col_adv, m2.light, row_side=False))


def derive_table(facts: Sequence[WitnessFact]) -> list[RelationCell]:
    """All 66 cells of the triangular table, in the published layout."""
    matrix = close(facts)
    annotations = {(c["row"], c["col"]): c["transparent"]
                   for c in load_expected_cells() if c["transparent"]}
    cells = []
    for k, row in enumerate(TABLE_ROWS):
        for col in TABLE_COLS[:11 - k]:
            cell = relation_candidates(row, col, matrix)
            red = annotations.get((row.label(), col.label()))
            if red is not None and len(cell.candidates) > 1:
                cell = RelationCell(cell.m1, cell.m2, cell.candidates,
                                    cell.row_over_col, cell.col_over_row,
                                    cell.row_witness, cell.col_witness, red)
            cells.append(cell)
    return cells


# ---------------------------------------------------------------------------
# Embedded data
# ---------------------------------------------------------------------------

def _data_text(name: str) -> str:
    return resources.files("opaque_swarm.data").joinpath(name).read_text("utf-8")


def load_facts(path: Optional[str] = None) -> list[WitnessFact]:
    text = open(path, "r", encoding="utf-8").read() if path else _data_text("witness_facts.json")
    return [WitnessFact(rec["problem"], ModelId.parse(rec["model"]),
                        rec["solvable"], rec["lemma"])
            for rec in json.loads(text)]


def load_expected_cells() -> list[dict]:
    return json.loads(_data_text("relmap_expected.json"))


def cell_to_dict(cell: RelationCell) -> dict:
    return {
        "row": cell.m1.label(),
        "col": cell.m2.label(),
        "candidates": list(cell.candidates),
        "row_witness": cell.row_witness if "perp" in cell.candidates or ">" in cell.candidates else None,
        "col_witness": cell.col_witness if "perp" in cell.candidates or "<" in cell.candidates else None,
        "transparent": cell.transparent,
    }


def check_against_expected(cells: Sequence[RelationCell]) -> list[str]:
    """Mismatch descriptions against the embedded published table (empty = pass)."""
    expected = {(c["row"], c["col"]): c for c in load_expected_cells()}
    mismatches = []
    seen = set()
    for cell in cells:
        key = (cell.m1.label(), cell.m2.label())
        seen.add(key)
        exp = expected.get(key)
        if exp is None:
            mismatches.append(f"unexpected cell {key}")
            continue
        got = cell_to_dict(cell)
        for field in ("candidates", "row_witness", "col_witness", "transparent"):
            if got[field] != exp[field]:
                mismatches.append(
                    f"{key[0]} vs {key[1]}: {field} derived={got[field]!r} "
                    f"expected={exp[field]!r}")
    for key in expected:
        if key not in seen:
            mismatches.append(f"missing cell {key}")
    return mismatches


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _cell_text(cell: RelationCell) -> str:
    if cell.proven:
        sym = _REL_SYMBOL[cell.proven]
        if cell.proven == "<":
            return f"{sym} {cell.col_witness}"
        if cell.proven == ">":
            return f"{sym} {cell.row_witness}"
        if cell.proven == "perp":
            return f"{sym} {cell.row_witness},{cell.col_witness}"
        return sym
    syms = " or ".join(_REL_SYMBOL[c] for c in cell.candidates)
    red = f" [T:{_REL_SYMBOL[cell.transparent]}]" if cell.transparent else ""
    wit = cell.row_witness or cell.col_witness
    tag = f" {wit}" if wit else ""
    return f"{syms}{red}{tag}"


def emit_table(cells: Sequence[RelationCell], fmt: str = "text") -> str:
    """Aligned text table or CSV of the 66 pairwise cells."""
    if fmt == "csv":
        lines = ["row,col,candidates,row_witness,col_witness,transparent"]
        for cell in cells:
            d = cell_to_dict(cell)
            lines.append(",".join([
                d["row"], d["col"], "|".join(d["candidates"]),
                d["row_witness"] or "", d["col_witness"] or "",
                d["transparent"] or ""]))
        return "\n".join(lines) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    by_row: dict[str, dict[str, str]] = {}
    for cell in cells:
        by_row.setdefault(cell.m1.label(), {})[cell.m2.label()] = _cell_text(cell)
    col_labels = [m.label() for m in TABLE_COLS]
    width = max([len(_cell_text(c)) for c in cells]
                + [len(lbl) for lbl in col_labels]) + 2
    head = "".ljust(9) + "".join(lbl.center(width) for lbl in col_labels)
    lines = [head, "-" * len(head)]
    for k, row in enumerate(TABLE_ROWS):
        label = row.label().ljust(9)
        texts = [by_row[row.label()].get(c, "") for c in col_labels[:11 - k]]
        lines.append(label + "".join(t.center(width) for t in texts))
    return "\n".join(lines) + "\n"
