"""Ordered designs, Steiner systems and Latin squares.

Everything here is 1-based.  Validators are exhaustive and return ``None``
when the object is valid, otherwise a :class:`Violation` describing the
first failure found.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .errors import InvalidSystem, NotPerfect, OddK, UnsupportedOrder
from .hatspace import AssignmentSet, SpaceParams, check_independent, perfect_size


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    where: tuple = ()

    def __str__(self):
        return f"{self.kind}: {self.detail}"


# -- ordered designs ---------------------------------------------------------

@dataclass(frozen=True)
class OrderedDesignArray:
    t: int
    n: int
    v: int
    columns: tuple[tuple[int, ...], ...]

    @property
    def expected_columns(self) -> int:
        return math.comb(self.v, self.t) * math.factorial(self.t)

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(col[r] for col in self.columns) for r in range(self.n)]


def validate_od(d: OrderedDesignArray) -> Violation | None:
    for idx, col in enumerate(d.columns):
        if len(col) != d.n:
            return Violation("column_length", f"column {idx} has {len(col)} entries", (idx,))
        if len(set(col)) != d.n:
            return Violation("repeated_entry", f"column {idx} = {col} repeats a value", (idx,))
        if any(not 1 <= x <= d.v for x in col):
            return Violation("out_of_range", f"column {idx} = {col} leaves 1..{d.v}", (idx,))
    if len(d.columns) != d.expected_columns:
        return Violation("column_count",
                         f"{len(d.columns)} columns, expected {d.expected_columns}")
    for rows in itertools.combinations(range(d.n), d.t):
        seen = {}
        for idx, col in enumerate(d.columns):
            key = tuple(col[r] for r in rows)
            if key in seen:
                return Violation(
                    "repeated_tuple",
                    f"rows {tuple(r + 1 for r in rows)} show {key} in columns "
                    f"{seen[key]} and {idx}",
                    (tuple(r + 1 for r in rows), key))
            seen[key] = idx
        # count equals C(v,t) t! and no repeats, so every ordered tuple occurs
    return None


def od_to_set(d: OrderedDesignArray) -> AssignmentSet:
    params = SpaceParams(d.n, d.v - d.n)
    return AssignmentSet(params, d.columns, provenance=f"OD_1({d.t},{d.n},{d.v})")


def set_to_od(s: AssignmentSet) -> OrderedDesignArray:
    p = s.params
    if len(s) != perfect_size(p):
        raise NotPerfect(f"{len(s)} members, perfect size is {perfect_size(p)}")
    bad = check_independent(s)
    if bad is not None:
        raise NotPerfect(f"adjacent members {bad.a} and {bad.b}")
    return OrderedDesignArray(p.n - 1, p.n, p.m, tuple(s))


def parse_od_text(text: str, t: int | None = None, v: int | None = None) -> OrderedDesignArray:
    """Read an OD array stored one row per line as CSV.

    A comment line such as ``# t=2 v=5`` supplies parameters; otherwise
    t defaults to rows - 1 and v to the largest entry.
    """
    meta = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            for tok in stripped[1:].split():
                key, _, val = tok.partition("=")
                if val.isdigit():
                    meta[key] = int(val)
            continue
        body.append(stripped)
    rows = [[int(x) for x in row if x.strip()] for row in csv.reader(io.StringIO("\n".join(body)))]
    if not rows:
        raise ValueError("empty OD array")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged OD array")
    n = len(rows)
    t = t if t is not None else meta.get("t", n - 1)
    v = v if v is not None else meta.get("v", max(max(r) for r in rows))
    columns = tuple(tuple(r[j] for r in rows) for j in range(width))
    return OrderedDesignArray(t, n, v, columns)


def format_od(d: OrderedDesignArray) -> str:
    lines = [f"# t={d.t} n={d.n} v={d.v}"]
    lines.extend(",".join(map(str, row)) for row in d.rows())
    return "\n".join(lines) + "\n"


# -- Steiner systems ---------------------------------------------------------

@dataclass(frozen=True)
class SteinerSystem:
    t: int
    n: int
    m: int
    blocks: tuple[tuple[int, ...], ...]


def validate_steiner(sys: SteinerSystem) -> Violation | None:
    for b in sys.blocks:
        if len(b) != sys.n or len(set(b)) != sys.n:
            return Violation("bad_block", f"block {b} is not an {sys.n}-set", (b,))
        if any(not 1 <= x <= sys.m for x in b):
            return Violation("out_of_range", f"block {b} leaves 1..{sys.m}", (b,))
    cover: dict[tuple[int, ...], int] = {}
    for b in sys.blocks:
        for sub in itertools.combinations(sorted(b), sys.t):
            cover[sub] = cover.get(sub, 0) + 1
    for sub in itertools.combinations(range(1, sys.m + 1), sys.t):
        c = cover.get(sub, 0)
        if c == 0:
            return Violation("uncovered", f"{sub} lies in no block", (sub,))
        if c > 1:
            return Violation("covered_twice", f"{sub} lies in {c} blocks", (sub,))
    return None


def steiner_to_set(sys: SteinerSystem) -> AssignmentSet:
    if sys.t != sys.n - 1:
        raise InvalidSystem(f"need t = n-1, got t={sys.t}, n={sys.n}")
    bad = validate_steiner(sys)
    if bad is not None:
        raise InvalidSystem(str(bad))
    members = {perm for b in sys.blocks for perm in itertools.permutations(b)}
    return AssignmentSet(SpaceParams(sys.n, sys.m - sys.n), members,
                         provenance=f"S({sys.t},{sys.n},{sys.m}) expanded")


def parse_steiner_text(text: str, m: int | None = None, t: int | None = None) -> SteinerSystem:
    blocks = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            blocks.append(tuple(sorted(int(x) for x in line.replace(",", " ").split())))
    if not blocks:
        raise InvalidSystem("no blocks")
    n = len(blocks[0])
    m = m if m is not None else max(max(b) for b in blocks)
    t = t if t is not None else n - 1
    return SteinerSystem(t, n, m, tuple(blocks))


# -- Latin squares -----------------------------------------------------------

@dataclass(frozen=True)
class LatinSquare:
    entries: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> LatinSquare:
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @property
    def order(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i - 1][j - 1]

    @property
    def is_latin(self) -> bool:
        return validate_latin(self) is None

    @property
    def idempotent(self) -> bool:
        return all(self.entries[i][i] == i + 1 for i in range(self.order))

    @property
    def symmetric(self) -> bool:
        m = self.order
        return all(self.entries[i][j] == self.entries[j][i] for i in range(m) for j in range(i))

    @property
    def constant_diagonal(self) -> bool:
        return len({self.entries[i][i] for i in range(self.order)}) == 1

    def flags(self) -> dict[str, bool]:
        return {"latin": self.is_latin, "idempotent": self.idempotent,
                "symmetric": self.symmetric, "constant_diagonal": self.constant_diagonal}

    def relabel(self, mapping) -> LatinSquare:
        return LatinSquare(tuple(tuple(mapping[x] for x in row) for row in self.entries))

    def format(self) -> str:
        return "\n".join(" ".join(map(str, r)) for r in self.entries) + "\n"


def validate_latin(sq: LatinSquare) -> Violation | None:
    m = sq.order
    want = set(range(1, m + 1))
    for i, row in enumerate(sq.entries, start=1):
        if len(row) != m:
            return Violation("not_square", f"row {i} has {len(row)} entries", (i,))
        if set(row) != want:
            return Violation("row", f"row {i} is not a permutation of 1..{m}", (i,))
    for j in range(m):
        col = {row[j] for row in sq.entries}
        if col != want:
            return Violation("column", f"column {j + 1} is not a permutation of 1..{m}", (j + 1,))
    return None


def parse_latin_text(text: str) -> LatinSquare:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([int(x) for x in line.replace(",", " ").split()])
    if rows and min(min(r) for r in rows) == 0:
        # 0-based labels are shifted to 1..m
        rows = [[x + 1 for x in r] for r in rows]
    return LatinSquare.from_rows(rows)


def _odd_idempotent(m: int) -> list[list[int]]:
    half = (m + 1) // 2  # inverse of 2 mod m
    return [[((i + j) * half - 1) % m + 1 for j in range(1, m + 1)] for i in range(1, m + 1)]


@lru_cache(maxsize=None)
def idempotent_latin(m: int) -> LatinSquare:
    """Idempotent Latin square of order ``m`` (m >= 3).

    Odd m: M[i,j] = (i+j)/2 mod m.  Even m: prolong the odd square of order
    m-1 along the cyclic superdiagonal (i, i+1 mod m-1), which is a
    transversal; the displaced symbols move to the new last row and column
    and the new symbol m takes their place.
    """
    if m <= 2:
        raise UnsupportedOrder(f"no idempotent Latin square of order {m}")
    if m % 2:
        return LatinSquare.from_rows(_odd_idempotent(m))
    base = _odd_idempotent(m - 1)
    b = m - 1
    rows = [r[:] + [0] for r in base] + [[0] * m]
    for i in range(b):
        j = (i + 1) % b
        displaced = base[i][j]
        rows[i][j] = m
        rows[i][b] = displaced
        rows[b][j] = displaced
    rows[b][b] = m
    sq = LatinSquare.from_rows(rows)
    assert validate_latin(sq) is None and sq.idempotent
    return sq


@lru_cache(maxsize=None)
def symmetric_latin_n4(k: int) -> LatinSquare:
    """Symmetric Latin square of order k+4 with constant diagonal k+4 (k even)."""
    if k % 2 or k < 2:
        raise OddK(f"construction needs even k >= 2, got k={k}")
    m = k + 4
    h = (k + 4) // 2  # inverse of 2 mod k+3
    rows = []
    for i in range(1, m + 1):
        row = []
        for j in range(1, m + 1):
            if i == j:
                row.append(m)
            elif i == m:
                row.append(j)
            elif j == m:
                row.append(i)
            else:
                row.append((h * (i + j) - 1) % (k + 3) + 1)
        rows.append(row)
    return LatinSquare.from_rows(rows)


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")
