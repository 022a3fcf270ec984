"""TOML manifests describing a presentation, its modules and task defaults.

Example::

    [ring]
    variables = ["x", "y"]
    weights = [1, 1]

    [poisson]
    bracket."x,y" = "x"

or, for a general Lie-Rinehart algebra::

    [lie_rinehart]
    basis = ["e1", "e2"]
    basis_weights = [0, 0]
    bracket."e1,e2" = "e2"
    anchor.e1 = { t = "-t" }

    [modules.M]
    side = "left"
    rank = 1
    generator_weights = [0]
    connection.e1 = [["1"]]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import tomli
import tomli_w

from .core import LRPresentation, ModulePresentation
from .poisson import PoissonPresentation, _build_d_unchecked
from .poly import Derivation, ParseError, Poly, WeightGrading, parse_poly

__all__ = [
    "Manifest",
    "ManifestError",
    "ManifestParseError",
    "SectionConflict",
    "parse_manifest",
    "dump_manifest",
]


class ManifestError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.message = message
        self.line = line
        self.column = column


class ManifestParseError(ManifestError):
    pass


class SectionConflict(ManifestError):
    pass




@dataclass(frozen=True)
class Manifest:
    variables: tuple[str, ...]
    weights: tuple[int, ...]
    kind: str  # "poisson" or "lie_rinehart"
    poisson: PoissonPresentation | None
    lr: LRPresentation
    modules: dict = field(default_factory=dict)
    tasks: dict = field(default_factory=dict)

    @property
    def grading(self) -> WeightGrading:
        return WeightGrading(self.weights)


def _locate(text: str, value: str, offset: int) -> tuple[int | None, int | None]:
    """Line and column of character ``offset`` inside the first quoted occurrence of value."""
    for quote in ('"', "'"):
        needle = quote + value + quote
        pos = text.find(needle)
        if pos >= 0:
            start = pos + 1 + offset
            line = text.count("\n", 0, start) + 1
            col = start - (text.rfind("\n", 0, start) + 1) + 1
            return line, col
    return None, None


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def poly(self, value: Any, names, where: str) -> Poly:
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise ManifestParseError(f"{where}: expected a polynomial string, got {value!r}")
        try:
            return parse_poly(str(value), names)
        except ParseError as exc:
            line, col = _locate(self.text, str(value), exc.column - 1) if isinstance(value, str) else (None, None)
            raise ManifestParseError(f"{where}: {exc.message}", line, col) from None

    def fail(self, message: str):
        raise ManifestParseError(message)


def _split_key(key: str, names, where: str) -> tuple[int, int]:
    parts = [p.strip() for p in key.split(",")]
    if len(parts) != 2 or any(p not in names for p in parts):
        raise ManifestParseError(f"{where}: bracket key {key!r} must name two of {list(names)}")
    return names.index(parts[0]), names.index(parts[1])


def _int_list(value, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        raise ManifestParseError(f"{where} must be a list of integers")
    return tuple(value)


def _name_list(value, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(v, str) for v in value):
        raise ManifestParseError(f"{where} must be a list of names")
    for v in value:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise ManifestParseError(f"{where}: {v!r} is not a valid identifier")
    if len(set(value)) != len(value):
        raise ManifestParseError(f"{where}: duplicate names")
    return tuple(value)


def parse_manifest(text: str) -> Manifest:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ManifestParseError(f"invalid TOML: {exc.msg}", exc.lineno, exc.colno) from None
    reader = _Reader(text)
    known = {"ring", "poisson", "lie_rinehart", "modules", "tasks"}
    unknown = set(data) - known
    if unknown:
        raise ManifestParseError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "poisson" in data and "lie_rinehart" in data:
        raise SectionConflict("a manifest has either a [poisson] or a [lie_rinehart] section, not both")
    if "poisson" not in data and "lie_rinehart" not in data:
        raise ManifestParseError("missing [poisson] or [lie_rinehart] section")
    ring = data.get("ring", {})
    variables = _name_list(ring.get("variables", []), "ring.variables")
    weights = _int_list(ring.get("weights", [1] * len(variables)), "ring.weights")
    if len(weights) != len(variables):
        raise ManifestParseError("ring.weights must have one entry per variable")
    if any(w < 1 for w in weights):
        raise ManifestParseError("ring.weights must be positive")
    grading = WeightGrading(weights)
    nv = len(variables)

    poisson = None
    if "poisson" in data:
        sec = data["poisson"]
        table = {}
        for key, value in sorted(sec.get("bracket", {}).items()):
            i, j = _split_key(key, variables, "poisson.bracket")
            if i == j:
                raise ManifestParseError(f"poisson.bracket: {key!r} pairs a variable with itself")
            p = reader.poly(value, variables, f"poisson.bracket.{key!r}")
            if i > j:
                i, j, p = j, i, -p
            if (i, j) in table:
                raise ManifestParseError(f"poisson.bracket: {key!r} given twice")
            table[(i, j)] = p
        poisson = PoissonPresentation(variables, grading, table)
        lr = _build_d_unchecked(poisson)
        kind = "poisson"
    else:
        sec = data["lie_rinehart"]
        basis = _name_list(sec.get("basis", []), "lie_rinehart.basis")
        if set(basis) & set(variables):
            raise ManifestParseError("basis names must differ from variable names")
        n = len(basis)
        bw = _int_list(sec.get("basis_weights", [0] * n), "lie_rinehart.basis_weights")
        if len(bw) != n:
            raise ManifestParseError("lie_rinehart.basis_weights must have one entry per basis element")
        names = variables + basis
        bracket = {}
        for key, value in sorted(sec.get("bracket", {}).items()):
            i, j = _split_key(key, basis, "lie_rinehart.bracket")
            if i == j:
                raise ManifestParseError(f"lie_rinehart.bracket: {key!r} pairs a basis element with itself")
            big = reader.poly(value, names, f"lie_rinehart.bracket.{key!r}")
            vec = _split_linear(big, nv, n, f"lie_rinehart.bracket.{key!r}")
            if i > j:
                i, j, vec = j, i, tuple(-c for c in vec)
            if (i, j) in bracket:
                raise ManifestParseError(f"lie_rinehart.bracket: {key!r} given twice")
            bracket[(i, j)] = vec
        anchor_sec = sec.get("anchor", {})
        for key in anchor_sec:
            if key not in basis:
                raise ManifestParseError(f"lie_rinehart.anchor: unknown basis element {key!r}")
        anchor = []
        for b in basis:
            entry = anchor_sec.get(b, {})
            if not isinstance(entry, dict):
                raise ManifestParseError(f"lie_rinehart.anchor.{b} must map variables to polynomials")
            coeffs = []
            for v in entry:
                if v not in variables:
                    raise ManifestParseError(f"lie_rinehart.anchor.{b}: unknown variable {v!r}")
            for v in variables:
                coeffs.append(reader.poly(entry[v], variables, f"lie_rinehart.anchor.{b}.{v}")
                              if v in entry else Poly.zero(nv))
            anchor.append(Derivation(tuple(coeffs)))
        lr = LRPresentation(variables, grading, basis, tuple(anchor), bracket, bw, "L")
        kind = "lie_rinehart"

    modules = {}
    for name, entry in sorted(data.get("modules", {}).items()):
        modules[name] = _read_module(reader, name, entry, lr)
    tasks = dict(data.get("tasks", {}))
    allowed = {"max_degree", "max_weight", "module", "format"}
    if set(tasks) - allowed:
        raise ManifestParseError(f"unknown task keys: {', '.join(sorted(set(tasks) - allowed))}")
    return Manifest(variables, weights, kind, poisson, lr, modules, tasks)


def _split_linear(p: Poly, nv: int, n: int, where: str) -> tuple:
    """Coefficients of a polynomial in variables + basis that is linear in the basis names."""
    out = [dict() for _ in range(n)]
    for e, c in p.terms.items():
        be = e[nv:]
        if sum(be) != 1:
            raise ManifestParseError(f"{where}: every term must contain exactly one basis element")
        k = be.index(1)
        out[k][e[:nv]] = c
    return tuple(Poly(nv, d) for d in out)


def _read_module(reader: _Reader, name: str, entry: Any, lr: LRPresentation) -> ModulePresentation:
    where = f"modules.{name}"
    if not isinstance(entry, dict):
        raise ManifestParseError(f"{where} must be a table")
    side = entry.get("side", "left")
    if side not in ("left", "right"):
        raise ManifestParseError(f"{where}.side must be 'left' or 'right'")
    rank = entry.get("rank")
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise ManifestParseError(f"{where}.rank must be a positive integer")
    gw = _int_list(entry.get("generator_weights", [0] * rank), f"{where}.generator_weights")
    if len(gw) != rank:
        raise ManifestParseError(f"{where}.generator_weights must have {rank} entries")
    conn_sec = entry.get("connection", {})
    for key in conn_sec:
        if key not in lr.basis:
            raise ManifestParseError(f"{where}.connection: unknown basis element {key!r}")
    nv = lr.nvars
    conn = []
    for b in lr.basis:
        rows = conn_sec.get(b)
        if rows is None:
            conn.append(tuple(tuple(Poly.zero(nv) for _ in range(rank)) for _ in range(rank)))
            continue
        if not isinstance(rows, list) or len(rows) != rank or any(
                not isinstance(r, list) or len(r) != rank for r in rows):
            raise ManifestParseError(f"{where}.connection.{b} must be a {rank}x{rank} matrix")
        conn.append(tuple(tuple(reader.poly(x, lr.variables, f"{where}.connection.{b}") for x in r)
                          for r in rows))
    for key in set(entry) - {"side", "rank", "generator_weights", "connection"}:
        raise ManifestParseError(f"{where}: unknown key {key!r}")
    return ModulePresentation(side, rank, tuple(conn), gw, name)


def _basis_term(c: Poly, b: str, names) -> str:
    if c == 1:
        return b
    if len(c.terms) == 1:
        s = c.to_string(names)
        return f"{s}*{b}" if s != "-1" else f"-{b}"
    return f"({c.to_string(names)})*{b}"


def dump_manifest(m: Manifest) -> str:
    """Serialize a manifest back to TOML; parse_manifest(dump_manifest(m)) == m."""
    names = list(m.variables)
    data: dict = {"ring": {"variables": names, "weights": list(m.weights)}}
    if m.kind == "poisson":
        data["poisson"] = {"bracket": {
            f"{m.variables[i]},{m.variables[j]}": p.to_string(names)
            for (i, j), p in sorted(m.poisson.bracket_table.items())}}
    else:
        lr = m.lr
        bracket = {}
        for (i, j), vec in sorted(lr.bracket.items()):
            terms = [_basis_term(c, b, names) for c, b in zip(vec, lr.basis) if c.terms]
            text = terms[0]
            for t in terms[1:]:
                text += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
            bracket[f"{lr.basis[i]},{lr.basis[j]}"] = text
        anchor = {}
        for b, d in zip(lr.basis, lr.anchor):
            entry = {v: c.to_string(names) for v, c in zip(names, d.coefficients) if c.terms}
            if entry:
                anchor[b] = entry
        data["lie_rinehart"] = {"basis": list(lr.basis), "basis_weights": list(lr.basis_weights),
                                "bracket": bracket, "anchor": anchor}
    if m.modules:
        mods = {}
        for name, mod in sorted(m.modules.items()):
            conn = {}
            for b, mat in zip(m.lr.basis, mod.connection):
                if any(c.terms for row in mat for c in row):
                    conn[b] = [[c.to_string(names) for c in row] for row in mat]
            mods[name] = {"side": mod.side, "rank": mod.rank,
                          "generator_weights": list(mod.generator_weights), "connection": conn}
        data["modules"] = mods
    if m.tasks:
        data["tasks"] = dict(m.tasks)
    return tomli_w.dumps(data)
