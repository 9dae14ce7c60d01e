"""Permutations in one-line form, cycle notation, and group closure.

All permutations are 1-based: ``image[i - 1]`` is the image of ``i``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    ActionEscapesTuple,
    DegreeMismatch,
    Malformed,
    OutOfRange,
    RepeatedElement,
)

EVEN = "even"
ODD = "odd"


def sequence_parity(seq: Sequence[int]) -> int:
    """Return 0 for an even arrangement of 1..len(seq), 1 for odd.

    Uses cycle decomposition: parity = (length - number of cycles) mod 2.
    """
    m = len(seq)
    seen = [False] * (m + 1)
    cycles = 0
    for start in range(1, m + 1):
        if seen[start]:
            continue
        cycles += 1
        j = start
        while not seen[j]:
            seen[j] = True
            j = seq[j - 1]
    return (m - cycles) & 1


def inversion_parity(seq: Sequence[int]) -> int:
    inv = 0
    m = len(seq)
    for i in range(m):
        si = seq[i]
        for j in range(i + 1, m):
            if seq[j] < si:
                inv += 1
    return inv & 1


@dataclass(frozen=True, order=True)
class Permutation:
    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"not a permutation of 1..{len(image)}: {image}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, m: int) -> Permutation:
        return cls(tuple(range(1, m + 1)))

    @property
    def degree(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        # (p * q)(i) = p(q(i)): q is applied first
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
        img = self.image
        return Permutation(tuple(img[j - 1] for j in other.image))

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, v in enumerate(self.image, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles of length >= 2, each starting at its smallest element."""
        seen = set()
        out = []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc = []
            j = start
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.image[j - 1]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def to_cycle_string(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def moves(self, i: int) -> bool:
        return self.image[i - 1] != i

    def __str__(self):
        return self.to_cycle_string()


def parity(p: Permutation) -> str:
    return ODD if sequence_parity(p.image) else EVEN


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, m: int) -> Permutation:
    """Parse a product of disjoint cycles such as ``"(24)(35)"`` or ``"(2 6 3 5)"``.

    Cycles without separators are read one digit per element; multi-digit
    elements need spaces or commas.  Cycles are applied left to right.
    """
    if m < 1:
        raise ValueError("degree must be positive")
    stripped = text.strip()
    pos = 0
    cycles: list[list[int]] = []
    while pos < len(stripped):
        if stripped[pos].isspace() or stripped[pos] == "*":
            pos += 1
            continue
        match = _CYCLE_RE.match(stripped, pos)
        if match is None:
            raise Malformed(f"unbalanced or stray text at offset {pos} in {text!r}")
        body = match.group(1).strip()
        pos = match.end()
        if not body:
            continue
        if re.search(r"[\s,]", body):
            tokens = [t for t in re.split(r"[\s,]+", body) if t]
        else:
            tokens = list(body)
        try:
            cycles.append([int(t) for t in tokens])
        except ValueError:
            raise Malformed(f"non-integer element in cycle ({body})") from None

    used: set[int] = set()
    for cyc in cycles:
        for x in cyc:
            if x < 1 or x > m:
                raise OutOfRange(f"element {x} outside 1..{m}")
            if x in used:
                raise RepeatedElement(f"element {x} appears more than once")
            used.add(x)

    image = list(range(1, m + 1))
    for cyc in cycles:
        # compose left to right: current image is followed by this cycle
        step = {cyc[i]: cyc[(i + 1) % len(cyc)] for i in range(len(cyc))}
        image = [step.get(v, v) for v in image]
    return Permutation(tuple(image))


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Permutation, ...]
    elements: frozenset[Permutation] = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __contains__(self, p):
        return p in self.elements


def group_closure(generators: Iterable[Permutation], degree: int | None = None) -> PermGroup:
    gens = tuple(generators)
    degrees = {g.degree for g in gens}
    if degree is not None:
        degrees.add(degree)
    if len(degrees) > 1:
        raise DegreeMismatch(f"generators of mixed degree {sorted(degrees)}")
    if not degrees:
        raise DegreeMismatch("degree required for an empty generator list")
    m = degrees.pop()

    ident = Permutation.identity(m)
    elements = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x * g
            if y not in elements:
                elements.add(y)
                queue.append(y)
    return PermGroup(m, gens, frozenset(elements))


def group_from_cycles(texts: Iterable[str], degree: int) -> PermGroup:
    return group_closure([parse_cycles(t, degree) for t in texts], degree=degree)


def act_on_positions(g: Permutation, colors: Sequence[int]) -> tuple[int, ...]:
    """Move the entry at position i to position g(i): (g.x)[g(i)] = x[i]."""
    out = list(colors)
    for i, c in enumerate(colors, start=1):
        out[g.image[i - 1] - 1] = c
    return tuple(out)


def orbit_expand(seeds, group: PermGroup):
    """Union of the position-action orbits of every seed assignment."""
    from .hatspace import AssignmentSet

    n = seeds.params.n
    if group.degree < n:
        raise DegreeMismatch(f"group degree {group.degree} < tuple length {n}")
    for g in group.elements:
        for i in range(n + 1, group.degree + 1):
            if g.moves(i):
                raise ActionEscapesTuple(f"{g} moves position {i} beyond n={n}")
    elems = sorted(group.elements)
    if group.degree > n:
        elems = [Permutation(g.image[:n]) for g in elems]
    out = set()
    for x in seeds:
        for g in elems:
            out.add(act_on_positions(g, x))
    label = f"orbit({seeds.provenance}; |G|={group.order})"
    return AssignmentSet(seeds.params, out, provenance=label)
