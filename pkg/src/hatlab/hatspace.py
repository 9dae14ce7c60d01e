"""Hat assignments as vertices of the arrangement graph.

An assignment for ``n`` prisoners and ``k`` extra hats is a tuple of ``n``
distinct colors from ``1..n+k``.  Two assignments are adjacent when they
differ in exactly one position.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import GhostMismatch, InvalidAssignment, ParamMismatch, SetFileError
from .perm import Permutation

Assignment = tuple[int, ...]


@dataclass(frozen=True, order=True)
class SpaceParams:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one prisoner, got n={self.n}")
        if self.k < 0:
            raise ValueError(f"extra hats must be >= 0, got k={self.k}")

    @property
    def m(self) -> int:
        """Number of colors, n + k."""
        return self.n + self.k

    def __str__(self):
        return f"n={self.n} k={self.k}"


def space_size(p: SpaceParams) -> int:
    return math.factorial(p.m) // math.factorial(p.k)


def perfect_size(p: SpaceParams) -> int:
    return math.factorial(p.m) // math.factorial(p.k + 1)


def check_assignment(a: Sequence[int], p: SpaceParams) -> Assignment:
    a = tuple(int(c) for c in a)
    if len(a) != p.n:
        raise InvalidAssignment(f"{a} has length {len(a)}, expected {p.n}")
    if len(set(a)) != p.n:
        raise InvalidAssignment(f"{a} repeats a color")
    for c in a:
        if not 1 <= c <= p.m:
            raise InvalidAssignment(f"color {c} outside 1..{p.m}")
    return a


def enumerate_space(p: SpaceParams, first: int | None = None) -> Iterator[Assignment]:
    """All assignments in lexicographic order, optionally only those starting with ``first``."""
    colors = range(1, p.m + 1)
    if first is None:
        yield from itertools.permutations(colors, p.n)
        return
    rest = [c for c in colors if c != first]
    for tail in itertools.permutations(rest, p.n - 1):
        yield (first, *tail)


def is_adjacent(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        raise ParamMismatch(f"tuples of length {len(a)} and {len(b)}")
    diff = 0
    for x, y in zip(a, b):
        if x != y:
            diff += 1
            if diff > 1:
                return False
    return diff == 1


def unused_colors(a: Sequence[int], p: SpaceParams) -> tuple[int, ...]:
    used = set(a)
    return tuple(c for c in range(1, p.m + 1) if c not in used)


def augment(a: Sequence[int], ghost_order: Sequence[int]) -> Permutation:
    """Extend an assignment by ghost prisoners wearing ``ghost_order``."""
    full = tuple(a) + tuple(ghost_order)
    if sorted(full) != list(range(1, len(full) + 1)):
        raise GhostMismatch(f"ghost colors {tuple(ghost_order)} do not complete {tuple(a)}")
    return Permutation(full)


class ViolatingPair(NamedTuple):
    a: Assignment
    b: Assignment


class AssignmentSet:
    """Immutable, hash-indexed set of assignments for fixed (n, k)."""

    __slots__ = ("params", "_members", "provenance")

    def __init__(self, params: SpaceParams, members: Iterable[Sequence[int]] = (),
                 provenance: str = "", validate: bool = True):
        self.params = params
        if validate:
            self._members = frozenset(check_assignment(a, params) for a in members)
        else:
            self._members = frozenset(members)
        self.provenance = provenance

    @property
    def members(self) -> frozenset[Assignment]:
        return self._members

    def __contains__(self, a) -> bool:
        return tuple(a) in self._members

    def __len__(self):
        return len(self._members)

    def __iter__(self) -> Iterator[Assignment]:
        return iter(sorted(self._members))

    def __eq__(self, other):
        if not isinstance(other, AssignmentSet):
            return NotImplemented
        return self.params == other.params and self._members == other._members

    def __hash__(self):
        return hash((self.params, self._members))

    def __repr__(self):
        return f"AssignmentSet({self.params}, size={len(self)}, provenance={self.provenance!r})"


def check_independent(s: AssignmentSet) -> ViolatingPair | None:
    """Return None when no two members are adjacent, else one adjacent pair.

    Probes the n*k single-position substitutions of every member.
    """
    p = s.params
    members = s.members
    all_colors = range(1, p.m + 1)
    for a in sorted(members):
        used = set(a)
        spare = [c for c in all_colors if c not in used]
        for i in range(p.n):
            for c in spare:
                b = a[:i] + (c,) + a[i + 1:]
                if b in members:
                    return ViolatingPair(a, b)
    return None


def is_independent(s: AssignmentSet) -> bool:
    return check_independent(s) is None


def is_perfect(s: AssignmentSet) -> bool:
    return len(s) == perfect_size(s.params) and is_independent(s)


# -- set files ---------------------------------------------------------------

def _parse_header(line: str) -> SpaceParams:
    fields = {}
    for tok in line.split():
        key, _, val = tok.partition("=")
        if not val:
            raise SetFileError(f"bad header token {tok!r}")
        fields[key.strip()] = int(val)
    try:
        return SpaceParams(fields["n"], fields["k"])
    except KeyError:
        raise SetFileError(f"header must give n and k: {line!r}") from None


def parse_assignment_line(line: str, p: SpaceParams) -> Assignment:
    tokens = line.split()
    if len(tokens) == 1 and p.n > 1:
        if p.m > 9:
            raise SetFileError(f"compact digit form needs n+k <= 9: {line!r}")
        tokens = list(tokens[0])
    try:
        a = tuple(int(t) for t in tokens)
    except ValueError:
        raise SetFileError(f"non-integer color in {line!r}") from None
    return check_assignment(a, p)


def parse_set_text(text: str, provenance: str = "",
                   params: SpaceParams | None = None) -> AssignmentSet:
    """Parse the set-file format.

    First non-comment line is ``n=<n> k=<k>`` unless ``params`` is supplied.
    Remaining lines hold one or more assignments each, as space-separated
    colors or (when n+k <= 9) compact digit strings like ``41327``.
    """
    members = []
    header_seen = params is not None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            params = _parse_header(line)
            header_seen = True
            continue
        tokens = line.split()
        if params.m <= 9 and all(len(t) == params.n for t in tokens) and params.n > 1:
            for t in tokens:
                members.append(parse_assignment_line(t, params))
        else:
            members.append(parse_assignment_line(line, params))
    if params is None:
        raise SetFileError("missing 'n=<n> k=<k>' header")
    return AssignmentSet(params, members, provenance=provenance)


def read_set(path) -> AssignmentSet:
    path = Path(path)
    return parse_set_text(path.read_text(encoding="utf-8"), provenance=path.name)


def format_set(s: AssignmentSet) -> str:
    lines = [f"n={s.params.n} k={s.params.k}"]
    if s.provenance:
        lines.insert(0, f"# {s.provenance}")
    lines.extend(" ".join(map(str, a)) for a in s)
    return "\n".join(lines) + "\n"


def write_set(s: AssignmentSet, path) -> None:
    Path(path).write_text(format_set(s), encoding="utf-8")
