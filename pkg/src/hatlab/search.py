"""Maximum independent sets of the arrangement graph at desk scale.

The bound used throughout: fixing all positions but one gives a "line" of
k+1 mutually adjacent assignments, and the lines through any single
position partition the vertex set.  An independent set therefore holds at
most one vertex per line, so ``size + (nonempty lines of position p)`` is an
upper bound for every p.
"""
from __future__ import annotations

import heapq
import itertools
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NotIndependent, TooLarge
from .hatspace import (
    AssignmentSet,
    SpaceParams,
    check_independent,
    enumerate_space,
    space_size,
)
from .perm import PermGroup, Permutation, act_on_positions

EXACT = "exact_backtracking"
GREEDY = "greedy"


@dataclass
class SearchConfig:
    mode: str = EXACT
    time_limit: float = 60.0
    symmetry_group: PermGroup | None = None
    seed_set: AssignmentSet | None = None
    lower_bound_hint: int | None = None
    ceiling: int = 5040

    def __post_init__(self):
        if self.mode not in (EXACT, GREEDY):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.seed_set is not None and check_independent(self.seed_set) is not None:
            raise NotIndependent("seed set is not independent")


@dataclass
class SearchResult:
    best_set: AssignmentSet
    optimal: bool
    nodes_explored: int
    wall_time: float
    timed_out: bool = False
    upper_bound: int = 0

    @property
    def size(self) -> int:
        return len(self.best_set)


def clique_upper_bound(p: SpaceParams) -> int:
    return space_size(p) // (p.k + 1)


class _Graph:
    """Vertices in lexicographic order with neighbor and line indices."""

    def __init__(self, p: SpaceParams):
        self.p = p
        self.vertices = list(enumerate_space(p))
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.lines: list[list[int]] = []
        line_ids: list[dict] = [dict() for _ in range(p.n)]
        for v in self.vertices:
            ids = []
            for pos in range(p.n):
                key = v[:pos] + v[pos + 1:]
                lid = line_ids[pos].setdefault(key, len(line_ids[pos]))
                ids.append(lid)
            self.lines.append(ids)
        self.line_counts = [len(d) for d in line_ids]
        self.neighbors: list[list[int]] = []
        colors = range(1, p.m + 1)
        for v in self.vertices:
            used = set(v)
            spare = [c for c in colors if c not in used]
            nb = [self.index[v[:i] + (c,) + v[i + 1:]] for i in range(p.n) for c in spare]
            self.neighbors.append(nb)


def _orbit_units(g: _Graph, group: PermGroup | None) -> list[list[int]]:
    if group is None:
        return [[i] for i in range(len(g.vertices))]
    n = g.p.n
    perms = [Permutation(h.image[:n]) if group.degree > n else h for h in group.elements]
    seen = [False] * len(g.vertices)
    units = []
    for i, v in enumerate(g.vertices):
        if seen[i]:
            continue
        orbit = sorted({g.index[act_on_positions(h, v)] for h in perms})
        for j in orbit:
            seen[j] = True
        units.append(orbit)
    return units


class _Timeout(Exception):
    pass


def _exact(g: _Graph, cfg: SearchConfig, start: float):
    p = g.p
    units = _orbit_units(g, cfg.symmetry_group)
    unit_of = [0] * len(g.vertices)
    for u, verts in enumerate(units):
        for v in verts:
            unit_of[v] = u
    # an orbit containing an internal edge can never be chosen
    blocked = set()
    for u, verts in enumerate(units):
        vs = set(verts)
        if any(w in vs for v in verts for w in g.neighbors[v]):
            blocked.add(u)

    alive = [True] * len(units)
    cnt = [[0] * c for c in g.line_counts]
    nonempty = [0] * p.n
    for v, lids in enumerate(g.lines):
        for pos, lid in enumerate(lids):
            if cnt[pos][lid] == 0:
                nonempty[pos] += 1
            cnt[pos][lid] += 1

    def kill(u, log):
        alive[u] = False
        log.append(u)
        for v in units[u]:
            for pos, lid in enumerate(g.lines[v]):
                cnt[pos][lid] -= 1
                if cnt[pos][lid] == 0:
                    nonempty[pos] -= 1

    def revive(log):
        for u in reversed(log):
            alive[u] = True
            for v in units[u]:
                for pos, lid in enumerate(g.lines[v]):
                    if cnt[pos][lid] == 0:
                        nonempty[pos] += 1
                    cnt[pos][lid] += 1

    root_log: list[int] = []
    for u in sorted(blocked):
        kill(u, root_log)

    global_bound = clique_upper_bound(p)
    best = list(cfg.seed_set) if cfg.seed_set is not None else []
    best_size = len(best)
    target = max(best_size, (cfg.lower_bound_hint or 0) - 1)
    chosen: list[int] = []
    size = 0
    nodes = 0

    # explicit stack; each frame is [unit, stage, log]
    stack: list[list] = []

    def enter(start_unit):
        nonlocal nodes, best, best_size, target
        nodes += 1
        if nodes % 2048 == 0 and time.monotonic() - start > cfg.time_limit:
            raise _Timeout
        if size + min(nonempty) <= target:
            return None
        u = start_unit
        while u < len(units) and not alive[u]:
            u += 1
        if u == len(units):
            if size > best_size:
                best = [g.vertices[v] for w in chosen for v in units[w]]
                best_size = size
                target = max(target, best_size)
            return None
        return u

    timed_out = False
    try:
        if best_size < global_bound:
            u = enter(0)
            if u is not None:
                stack.append([u, 0, None])
            while stack:
                if best_size >= global_bound:
                    break
                frame = stack[-1]
                u, stage, log = frame
                if stage == 0:
                    log = []
                    kill(u, log)
                    for v in units[u]:
                        for w in g.neighbors[v]:
                            if alive[unit_of[w]]:
                                kill(unit_of[w], log)
                    chosen.append(u)
                    size += len(units[u])
                    frame[1], frame[2] = 1, log
                    child = enter(u + 1)
                    if child is not None:
                        stack.append([child, 0, None])
                elif stage == 1:
                    revive(log)
                    chosen.pop()
                    size -= len(units[u])
                    log = []
                    kill(u, log)
                    frame[1], frame[2] = 2, log
                    child = enter(u + 1)
                    if child is not None:
                        stack.append([child, 0, None])
                else:
                    revive(log)
                    stack.pop()
    except _Timeout:
        timed_out = True
    return best, nodes, timed_out


def _greedy(g: _Graph, cfg: SearchConfig):
    alive = [True] * len(g.vertices)
    degree = [len(nb) for nb in g.neighbors]
    heap = [(d, i) for i, d in enumerate(degree)]
    heapq.heapify(heap)
    chosen = []
    if cfg.seed_set is not None:
        for a in cfg.seed_set:
            chosen.append(a)
    for a in chosen:
        i = g.index[a]
        for j in [i, *g.neighbors[i]]:
            alive[j] = False
    for i in range(len(alive)):
        if alive[i]:
            degree[i] = sum(alive[j] for j in g.neighbors[i])
    heap = [(degree[i], i) for i in range(len(alive)) if alive[i]]
    heapq.heapify(heap)
    nodes = 0
    while heap:
        d, i = heapq.heappop(heap)
        if not alive[i] or d != degree[i]:
            continue
        nodes += 1
        chosen.append(g.vertices[i])
        alive[i] = False
        for j in g.neighbors[i]:
            if alive[j]:
                alive[j] = False
                for w in g.neighbors[j]:
                    if alive[w]:
                        degree[w] -= 1
                        heapq.heappush(heap, (degree[w], w))
    return chosen, nodes


def max_independent_set(p: SpaceParams, cfg: SearchConfig | None = None) -> SearchResult:
    cfg = cfg or SearchConfig()
    start = time.monotonic()
    if cfg.seed_set is not None and cfg.seed_set.params != p:
        raise ValueError("seed set belongs to another space")
    bound = clique_upper_bound(p)
    if cfg.mode == EXACT:
        if space_size(p) > cfg.ceiling:
            raise TooLarge(f"{space_size(p)} vertices exceeds exact-search ceiling {cfg.ceiling}")
        g = _Graph(p)
        best, nodes, timed_out = _exact(g, cfg, start)
        exhausted = not timed_out
        optimal = len(best) == bound or (
            exhausted and cfg.symmetry_group is None
            and (cfg.lower_bound_hint is None or len(best) >= cfg.lower_bound_hint))
        label = "exact"
    else:
        if space_size(p) > 10 ** 6:
            raise TooLarge(f"{space_size(p)} vertices is too many for greedy search")
        g = _Graph(p)
        best, nodes = _greedy(g, cfg)
        timed_out = False
        optimal = len(best) == bound
        label = "greedy"
    result_set = AssignmentSet(p, best, provenance=f"{label} search {p}", validate=False)
    return SearchResult(result_set, optimal, nodes, time.monotonic() - start,
                        timed_out, bound)


# -- ILP export --------------------------------------------------------------

def _var(a) -> str:
    return "x_" + "_".join(map(str, a))


def iter_lines(p: SpaceParams):
    """Yield (position, index, members) for every line of the graph.

    Positions are 1-based; index counts the lines of that position from 1
    in lexicographic order of the fixed colors.
    """
    colors = range(1, p.m + 1)
    for pos in range(p.n):
        for idx, rest in enumerate(itertools.permutations(colors, p.n - 1), start=1):
            used = set(rest)
            members = [rest[:pos] + (c,) + rest[pos:] for c in colors if c not in used]
            yield pos + 1, idx, members


def _wrap(terms, per_line=8):
    chunks = [" + ".join(terms[i:i + per_line]) for i in range(0, len(terms), per_line)]
    return "\n   + ".join(chunks)


def export_ilp(p: SpaceParams, path, symmetry_group: PermGroup | None = None,
               ceiling: int = 10 ** 6) -> dict:
    """Write the maximum-independent-set model in CPLEX LP format.

    Returns a summary with the variable and constraint counts.
    """
    if space_size(p) > ceiling:
        raise TooLarge(f"{space_size(p)} variables exceeds ceiling {ceiling}")
    path = Path(path)
    if symmetry_group is None:
        return _export_plain(p, path)
    return _export_orbits(p, path, symmetry_group)


def _export_plain(p, path):
    n_cons = 0
    with path.open("w", encoding="ascii") as fh:
        fh.write(f"\\ maximum independent set of the arrangement graph, n={p.n} k={p.k}\n")
        fh.write("Maximize\n obj: ")
        fh.write(_wrap([_var(a) for a in enumerate_space(p)]))
        fh.write("\nSubject To\n")
        for pos, idx, members in iter_lines(p):
            fh.write(f" L_{pos}_{idx}: {' + '.join(_var(a) for a in members)} <= 1\n")
            n_cons += 1
        fh.write("Binaries\n")
        for a in enumerate_space(p):
            fh.write(f" {_var(a)}\n")
        fh.write("End\n")
    return {"variables": space_size(p), "constraints": n_cons, "path": str(path)}


def _export_orbits(p, path, group):
    g = _Graph(p) if space_size(p) <= 10 ** 6 else None
    units = _orbit_units(g, group)
    unit_of = {}
    for u, verts in enumerate(units):
        for v in verts:
            unit_of[g.vertices[v]] = u
    seen = set()
    rows = []
    for pos, idx, members in iter_lines(p):
        coef: dict[int, int] = {}
        for a in members:
            u = unit_of[a]
            coef[u] = coef.get(u, 0) + 1
        key = tuple(sorted(coef.items()))
        if key in seen:
            continue
        seen.add(key)
        rows.append((pos, idx, key))
    with path.open("w", encoding="ascii") as fh:
        fh.write(f"\\ orbit-aggregated model, n={p.n} k={p.k}, |G|={group.order}\n")
        fh.write("Maximize\n obj: ")
        fh.write(_wrap([f"{len(verts)} y_{u}" for u, verts in enumerate(units)]))
        fh.write("\nSubject To\n")
        for pos, idx, key in rows:
            terms = [(f"{c} y_{u}" if c != 1 else f"y_{u}") for u, c in key]
            fh.write(f" L_{pos}_{idx}: {' + '.join(terms)} <= 1\n")
        fh.write("Binaries\n")
        for u in range(len(units)):
            fh.write(f" y_{u}\n")
        fh.write("End\n")
    return {"variables": len(units), "constraints": len(rows), "path": str(path),
            "orbits": [[g.vertices[v] for v in verts] for verts in units]}


_TERM_RE = re.compile(r"^(?:(\d+)\s+)?([A-Za-z_][A-Za-z0-9_]*)$")


@dataclass
class LPModel:
    objective: dict[str, int] = field(default_factory=dict)
    constraints: dict[str, tuple[dict[str, int], int]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)


def _parse_expr(text: str) -> dict[str, int]:
    out = {}
    for term in text.split("+"):
        term = term.strip()
        m = _TERM_RE.match(term)
        if m is None:
            raise ValueError(f"bad LP term {term!r}")
        out[m.group(2)] = out.get(m.group(2), 0) + int(m.group(1) or 1)
    return out


def read_lp(path) -> LPModel:
    """Parse the subset of LP format written by :func:`export_ilp`.

    Raises ValueError on anything outside that subset, so it doubles as a
    syntax check of exported files.
    """
    model = LPModel()
    section = None
    pending: list[str] = []
    name = None

    def flush():
        nonlocal pending, name
        if not pending:
            return
        text = " + ".join(pending)
        pending = []
        if section == "max":
            model.objective = _parse_expr(text)
        elif section == "st":
            lhs, sep, rhs = text.partition("<=")
            if not sep:
                raise ValueError(f"constraint {name} lacks '<='")
            if name in model.constraints:
                raise ValueError(f"duplicate constraint name {name}")
            model.constraints[name] = (_parse_expr(lhs), int(rhs))

    with open(path, encoding="ascii") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("\\"):
                continue
            low = line.lower()
            if low in ("maximize", "subject to", "binaries", "end"):
                flush()
                section = {"maximize": "max", "subject to": "st",
                           "binaries": "bin", "end": "end"}[low]
                continue
            if section == "bin":
                model.binaries.append(line)
                continue
            if section in ("max", "st"):
                if ":" in line and not line.startswith("+"):
                    flush()
                    name, _, line = line.partition(":")
                    name = name.strip()
                pending.append(line.lstrip("+ "))
            else:
                raise ValueError(f"text outside a section: {line!r}")
    if section != "end":
        raise ValueError("LP file does not end with 'End'")
    declared = set(model.binaries)
    used = set(model.objective)
    for expr, _ in model.constraints.values():
        used.update(expr)
    if used - declared:
        raise ValueError(f"undeclared variables: {sorted(used - declared)[:5]}")
    return model
