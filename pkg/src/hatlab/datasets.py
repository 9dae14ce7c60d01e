"""Embedded listings: assumed sets, orbit seeds, designs and Latin squares."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from importlib.resources import files

from .designs import (
    LatinSquare,
    od_to_set,
    parse_latin_text,
    parse_od_text,
    parse_steiner_text,
    steiner_to_set,
    validate_latin,
    validate_od,
    validate_steiner,
)
from .hatspace import AssignmentSet, SpaceParams, parse_set_text
from .perm import group_from_cycles, orbit_expand


@dataclass(frozen=True)
class Dataset:
    id: str
    kind: str  # set | seeds | od | steiner | latin | augmented
    filename: str
    description: str
    generators: tuple[str, ...] = ()
    degree: int = 0
    ghosts: int = 0


DATASETS = {
    d.id: d for d in [
        Dataset("dp18_n3k2", "set", "dp18_n3k2.txt",
                "double parity assumed set for n=3, k=2 (18 triples)"),
        Dataset("od_2_3_5", "od", "od_2_3_5.csv", "3x20 ordered design OD_1(2,3,5)"),
        Dataset("reps15_n4k2", "seeds", "reps15_n4k2.txt",
                "15 orbit representatives for n=4, k=2", ("(12)", "(14)(23)"), 4),
        Dataset("seeds42_n5k2", "seeds", "seeds42_n5k2.txt",
                "42 seeds for n=5, k=2", ("(24)(35)", "(1532)"), 5),
        Dataset("seeds56_n6k2", "seeds", "seeds56_n6k2.txt",
                "56 seeds for n=6, k=2", ("(1 2)(4 5)", "(2 6 3 5)"), 6),
        Dataset("seeds126_n5k4", "seeds", "seeds126_n5k4.txt",
                "126 seeds for n=5, k=4; all orderings of the first four positions",
                ("(1 2)", "(1 2 3 4)"), 5),
        Dataset("app96_n4k2", "augmented", "app96_n4k2.txt",
                "96-element bit-code example for n=4, k=2 (augmented permutations)",
                ghosts=2),
        Dataset("latin6_n3k3", "latin", "latin6_n3k3.txt", "idempotent Latin square of order 6"),
        Dataset("latin6_n4k2", "latin", "latin6_n4k2.txt",
                "symmetric constant-diagonal Latin square of order 6 (stored 0-based)"),
        Dataset("fano", "steiner", "fano.txt", "Fano plane S(2,3,7)"),
        Dataset("s4511", "steiner", "s4511.txt", "Steiner system S(4,5,11)"),
    ]
}

ALIASES = {
    "n3k2": "od_2_3_5",
    "n4k2": "reps15_n4k2",
    "n5k2": "seeds42_n5k2",
    "n6k2": "seeds56_n6k2",
    "n5k4": "seeds126_n5k4",
    "n3k4": "fano",
    "n5k6": "s4511",
}


def resolve(name: str) -> Dataset:
    key = ALIASES.get(name, name)
    try:
        return DATASETS[key]
    except KeyError:
        known = ", ".join(sorted(DATASETS) + sorted(ALIASES))
        raise KeyError(f"unknown dataset {name!r}; known: {known}") from None


def raw_text(name: str) -> str:
    return (files("hatlab") / "data" / resolve(name).filename).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def load_dataset(name: str):
    """Parse a dataset into its native object (set, design, system or square)."""
    d = resolve(name)
    text = raw_text(name)
    if d.kind in ("set", "seeds"):
        return parse_set_text(text, provenance=d.id)
    if d.kind == "augmented":
        full = parse_set_text(text, provenance=d.id)
        # stored permutations end with the ghost colors
        p = SpaceParams(full.params.n - d.ghosts, d.ghosts)
        return AssignmentSet(p, (a[:p.n] for a in full), provenance=d.id)
    if d.kind == "od":
        return parse_od_text(text)
    if d.kind == "steiner":
        return parse_steiner_text(text)
    if d.kind == "latin":
        return parse_latin_text(text)
    raise ValueError(d.kind)


def group_for(name: str):
    d = resolve(name)
    if not d.generators:
        return None
    return group_from_cycles(d.generators, d.degree)


@lru_cache(maxsize=None)
def dataset_set(name: str) -> AssignmentSet:
    """The full assignment set a dataset describes (orbits expanded)."""
    d = resolve(name)
    obj = load_dataset(d.id)
    if d.kind in ("set", "augmented"):
        return obj
    if d.kind == "seeds":
        out = orbit_expand(obj, group_for(d.id))
        out.provenance = d.id
        return out
    if d.kind == "od":
        return od_to_set(obj)
    if d.kind == "steiner":
        return steiner_to_set(obj)
    if d.id == "latin6_n3k3":
        return _latin_set_n3(obj)
    if d.id == "latin6_n4k2":
        return _latin_set_n4(obj)
    raise ValueError(f"dataset {name!r} has no assignment-set reading")


def _latin_set_n3(sq: LatinSquare) -> AssignmentSet:
    m = sq.order
    members = [(a, b, sq[a, b]) for a in range(1, m + 1) for b in range(1, m + 1) if a != b]
    return AssignmentSet(SpaceParams(3, m - 3), members, provenance="latin square, n=3")


def _latin_set_n4(sq: LatinSquare) -> AssignmentSet:
    m = sq.order
    members = [a for a in itertools.permutations(range(1, m + 1), 4)
               if sq[a[0], a[1]] == sq[a[2], a[3]]]
    return AssignmentSet(SpaceParams(4, m - 4), members, provenance="latin square, n=4")


def validate_dataset(name: str):
    """Run the validator that fits the dataset kind; None means valid."""
    from .designs import Violation
    from .hatspace import check_independent

    d = resolve(name)
    obj = load_dataset(d.id)
    if d.kind == "od":
        return validate_od(obj)
    if d.kind == "steiner":
        return validate_steiner(obj)
    if d.kind == "latin":
        return validate_latin(obj)
    bad = check_independent(dataset_set(d.id))
    if bad is not None:
        return Violation("adjacent", f"{bad.a} and {bad.b} differ in one position",
                         (bad.a, bad.b))
    return None
