"""Playing the sequential guessing game and measuring strategies."""
from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NotIndependent
from .hatspace import AssignmentSet, SpaceParams, check_independent, enumerate_space, space_size
from .strategies import StrategySpec, default_B, generate, modular_k2_residue

STRICT = "strict"
GREEDY_FALLBACK = "greedy_fallback"
MODES = (STRICT, GREEDY_FALLBACK)


@dataclass(frozen=True)
class GameTranscript:
    assignment: tuple[int, ...]
    guesses: tuple[int | None, ...]  # None marks an abstention
    win: bool
    mode: str

    def format(self) -> str:
        shown = " ".join("-" if g is None else str(g) for g in self.guesses)
        verdict = "WIN" if self.win else "LOSS"
        return f"{' '.join(map(str, self.assignment))} -> {shown}  {verdict}"


def play(a: Sequence[int], s, mode: str = STRICT, params: SpaceParams | None = None) -> GameTranscript:
    """Play one game against the assumed set ``s``.

    ``s`` is anything supporting ``in`` on tuples with a ``params`` or
    ``space`` attribute (an AssignmentSet or a StrategySpec).  Prisoner i
    sees positions i+1..n, trusts earlier guesses, and guesses the unique
    color keeping the configuration inside ``s``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    p = params or getattr(s, "params", None) or s.space
    a = tuple(a)
    n, m = p.n, p.m
    guesses: list[int | None] = []
    for i in range(n):
        ahead = a[i + 1:]
        excluded = set(ahead)
        excluded.update(g for g in guesses if g is not None)
        prefix = tuple(guesses)
        candidates = []
        if None not in prefix:
            for c in range(1, m + 1):
                if c not in excluded and prefix + (c,) + ahead in s:
                    candidates.append(c)
        if len(candidates) > 1:
            raise NotIndependent(
                f"prisoner {i + 1} has candidates {candidates} after {prefix}; set is not independent")
        if candidates:
            guesses.append(candidates[0])
        elif mode == STRICT:
            guesses.extend([None] * (n - i))
            break
        else:
            guesses.append(min(c for c in range(1, m + 1) if c not in excluded))
    win = tuple(guesses) == a
    return GameTranscript(a, tuple(guesses), win, mode)


@dataclass
class EvalReport:
    spec: str
    n: int
    k: int
    mode: str
    member_count: int
    space: int
    win_count: int
    probability: Fraction
    ceiling: Fraction
    bound_checks: list[tuple[str, bool]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["probability"] = str(self.probability)
        d["ceiling"] = str(self.ceiling)
        d["bound_checks"] = [[name, ok] for name, ok in self.bound_checks]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> EvalReport:
        d = dict(d)
        d["probability"] = Fraction(d["probability"])
        d["ceiling"] = Fraction(d["ceiling"])
        d["bound_checks"] = [(name, bool(ok)) for name, ok in d["bound_checks"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> EvalReport:
        return cls.from_dict(json.loads(text))

    CSV_FIELDS = ("spec", "n", "k", "mode", "member_count", "space", "win_count",
                  "probability", "ceiling", "bound_checks")

    def csv_row(self, header: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.CSV_FIELDS)
        d = self.to_dict()
        d["bound_checks"] = ";".join(f"{name}={'ok' if ok else 'FAIL'}"
                                     for name, ok in self.bound_checks)
        w.writerow([d[f] for f in self.CSV_FIELDS])
        return buf.getvalue()


def _count_wins(args):
    s, p, first, mode, strict_check = args
    wins = 0
    for a in enumerate_space(p, first):
        t = play(a, s, mode, p)
        if t.win:
            wins += 1
        if strict_check and t.win != (a in s):
            raise AssertionError(f"strict play disagrees with membership at {a}")
    return wins


def bound_checks_for(spec: StrategySpec, s: AssignmentSet, probability: Fraction) -> list[tuple[str, bool]]:
    p = spec.space
    n, k = p.n, p.k
    checks = [("ceiling_1/(k+1)", probability <= Fraction(1, k + 1))]
    if spec.name == "modular_k2" and spec.param("residue") == modular_k2_residue(n):
        checks.append(("modular_1/(2ceil(n/2)+1)",
                       probability == Fraction(1, 2 * math.ceil(n / 2) + 1)))
    if spec.name == "double_parity" and n >= 2:
        checks.append(("double_parity_formula", probability == double_parity_probability(n)))
    if spec.name == "parity_k1":
        checks.append(("perfect", probability == Fraction(1, 2)))
    if spec.name in ("cyclic_n2", "affine_n3_k2", "n3_even_k", "n3_odd_k", "n4_even_k"):
        checks.append(("perfect", probability == Fraction(1, k + 1)))
    if spec.name == "mod_t":
        t = spec.param("t")
        checks.append(("birthday_condition1",
                       distinct_mod_t_fraction(p, t) >= birthday_bound(t, k)))
    if spec.name == "appendix_code":
        B = spec.param("B")
        checks.append(("appendix_1/(4(k+1)B)", probability >= Fraction(1, 4 * (k + 1) * B)))
    return checks


def evaluate(spec: StrategySpec, mode: str = STRICT, workers: int = 1) -> EvalReport:
    """Play every assignment of the space and report exact win counts."""
    s = generate(spec, workers=workers)
    p = spec.space
    if check_independent(s) is not None:
        raise NotIndependent(f"{spec.label} does not give an independent set")
    jobs = [(s, p, f, mode, mode == STRICT) for f in range(1, p.m + 1)]
    if workers > 1 and p.m > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            wins = sum(pool.map(_count_wins, jobs))
    else:
        wins = sum(_count_wins(j) for j in jobs)
    total = space_size(p)
    prob = Fraction(wins, total)
    report = EvalReport(spec.label, p.n, p.k, mode, len(s), total, wins, prob,
                        Fraction(1, p.k + 1))
    report.bound_checks = bound_checks_for(spec, s, prob)
    return report


@dataclass(frozen=True)
class MonteCarloEstimate:
    wins: int
    samples: int
    estimate: float
    low: float
    high: float

    def contains(self, x: float) -> bool:
        return self.low <= x <= self.high


def random_assignment(rng: random.Random, p: SpaceParams) -> tuple[int, ...]:
    # random.sample is a partial Fisher-Yates shuffle of the color universe
    return tuple(rng.sample(range(1, p.m + 1), p.n))


def _mc_worker(args):
    spec, samples, seed, worker, mode = args
    rng = random.Random(f"{seed}:{worker}")
    p = spec.space
    wins = 0
    for _ in range(samples):
        if play(random_assignment(rng, p), spec, mode, p).win:
            wins += 1
    return wins


def monte_carlo(spec: StrategySpec, samples: int, rng_seed: int = 0,
                mode: str = STRICT, workers: int = 1) -> MonteCarloEstimate:
    """Estimate the win rate from uniform random assignments.

    The interval is the 95% normal approximation.  Results depend only on
    ``rng_seed`` and ``workers``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    workers = max(1, min(workers, samples))
    share = [samples // workers + (1 if i < samples % workers else 0) for i in range(workers)]
    jobs = [(spec, share[i], rng_seed, i, mode) for i in range(workers)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            wins = sum(pool.map(_mc_worker, jobs))
    else:
        wins = _mc_worker(jobs[0])
    est = wins / samples
    half = 1.96 * math.sqrt(est * (1 - est) / samples)
    return MonteCarloEstimate(wins, samples, est, max(0.0, est - half), min(1.0, est + half))


def birthday_bound(t: int, k: int) -> Fraction:
    """t!/((t-k)! t^k): chance that k uniform residues mod t are distinct."""
    if k < 0 or t < 1:
        raise ValueError("need t >= 1 and k >= 0")
    if k > t:
        return Fraction(0)
    return Fraction(math.perm(t, k), t ** k)


def distinct_mod_t_fraction(p: SpaceParams, t: int) -> Fraction:
    """Exact share of assignments whose unused colors are distinct mod t."""
    good = 0
    total = 0
    colors = range(1, p.m + 1)
    for a in enumerate_space(p):
        used = set(a)
        y = [c % t for c in colors if c not in used]
        total += 1
        if len(set(y)) == len(y):
            good += 1
    return Fraction(good, total)


def double_parity_probability(n: int) -> Fraction:
    if n % 2 == 0:
        return Fraction(1, 4) + Fraction(1, 4 * (n + 1))
    return Fraction(1, 4) + Fraction(1, 4 * (n + 2))


def appendix_lower_bound(k: int, B: int | None = None) -> Fraction:
    B = default_B(k) if B is None else B
    return Fraction(1, 4 * (k + 1) * B)
