"""Named hat-guessing strategies as membership predicates.

A strategy is the set of assignments the prisoners bet on.  Each variant
below is a pure predicate over assignments; :func:`generate` materializes
it by filtering the enumeration of the whole space.
"""
from __future__ import annotations

import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .designs import idempotent_latin, symmetric_latin_n4
from .errors import UndefinedStrategy
from .hatspace import AssignmentSet, SpaceParams, enumerate_space
from .perm import sequence_parity

NAMES = (
    "parity_k1", "modular_k2", "mod_t", "double_parity", "cyclic_n2",
    "affine_n3_k2", "n3_even_k", "n3_odd_k", "n4_even_k", "dataset",
    "appendix_code",
)

# default mod-k targets for 2 <= k <= 5 when t = k
SIGMA_T_EQ_K = {2: 1, 3: 0, 4: 2, 5: 0}


def bit(u: int, v: int) -> int:
    """0-based index of the highest binary digit where u and v differ."""
    if u == v:
        raise ValueError("bit(u, u) is undefined")
    return (u ^ v).bit_length() - 1


def default_B(k: int) -> int:
    if k < 2:
        return 1
    return math.ceil(2 * math.log2(k))


def modular_k2_residue(n: int) -> int:
    return 1 if n % 4 == 2 else 0


@dataclass(frozen=True)
class StrategySpec:
    name: str
    space: SpaceParams
    params: tuple[tuple[str, object], ...] = ()
    dataset: AssignmentSet | None = field(default=None, compare=False, repr=False)

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in self.params)

    @cached_property
    def predicate(self) -> Callable[[Sequence[int]], bool]:
        return _build_predicate(self)

    def __contains__(self, a) -> bool:
        return self.predicate(tuple(a))

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("predicate", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)


def make_strategy(name: str, n: int | None = None, k: int | None = None,
                  dataset: AssignmentSet | None = None, **params) -> StrategySpec:
    """Build and validate a strategy spec.

    ``dataset`` strategies take their space from the supplied set.
    """
    if name not in NAMES:
        raise UndefinedStrategy(f"unknown strategy {name!r}")
    if name == "dataset":
        if dataset is None:
            raise UndefinedStrategy("dataset strategy needs an AssignmentSet")
        return StrategySpec(name, dataset.params, (("source", dataset.provenance),), dataset)
    if n is None:
        raise UndefinedStrategy(f"{name} needs n")

    fixed_k = {"parity_k1": 1, "modular_k2": 2, "double_parity": 2, "affine_n3_k2": 2}
    if name in fixed_k:
        if k is None:
            k = fixed_k[name]
        elif k != fixed_k[name]:
            raise UndefinedStrategy(f"{name} requires k={fixed_k[name]}, got k={k}")
    if k is None:
        raise UndefinedStrategy(f"{name} needs k")
    space = SpaceParams(n, k)

    if name == "modular_k2":
        r = params.pop("residue", None)
        r = modular_k2_residue(n) if r is None else int(r) % (n + 2)
        params = {"residue": r}
    elif name == "double_parity":
        params = {}
    elif name == "mod_t":
        if k < 1:
            raise UndefinedStrategy("mod_t needs k >= 1")
        t = int(params.pop("t", max(1, k * k // 2)))
        if t < 1:
            raise UndefinedStrategy(f"mod_t needs t >= 1, got {t}")
        sigma = params.pop("sigma", None)
        if sigma is None:
            sigma = SIGMA_T_EQ_K.get(k, 0) if t == k else 0
        sigma = int(sigma)
        if not 0 <= sigma < t:
            raise UndefinedStrategy(f"sigma must lie in 0..{t - 1}, got {sigma}")
        if t < k:
            warnings.warn(f"mod_t with t={t} < k={k} has no members", stacklevel=2)
        params = {"t": t, "sigma": sigma}
    elif name == "appendix_code":
        B = int(params.pop("B", default_B(k)))
        if B < 1:
            raise UndefinedStrategy(f"B must be positive, got {B}")
        rs = int(params.pop("r_sum", params.pop("rs", 0)))
        rp = int(params.pop("r_pos", params.pop("rp", 0)))
        if not 0 <= rs < B or not 0 <= rp <= k:
            raise UndefinedStrategy(f"residues out of range: r_sum={rs}, r_pos={rp}")
        params = {"B": B, "r_sum": rs, "r_pos": rp}
    elif name == "cyclic_n2":
        if n != 2:
            raise UndefinedStrategy(f"cyclic_n2 needs n=2, got n={n}")
    elif name == "affine_n3_k2":
        if n != 3:
            raise UndefinedStrategy(f"affine_n3_k2 needs n=3, got n={n}")
    elif name == "n3_even_k":
        if n != 3 or k % 2:
            raise UndefinedStrategy(f"n3_even_k needs n=3 and even k, got n={n}, k={k}")
    elif name == "n3_odd_k":
        if n != 3 or k % 2 == 0:
            raise UndefinedStrategy(f"n3_odd_k needs n=3 and odd k, got n={n}, k={k}")
    elif name == "n4_even_k":
        if n != 4 or k % 2 or k < 2:
            raise UndefinedStrategy(f"n4_even_k needs n=4 and even k >= 2, got n={n}, k={k}")
    elif name == "parity_k1":
        pass
    if params and name not in ("modular_k2", "mod_t", "appendix_code"):
        raise UndefinedStrategy(f"{name} takes no parameters, got {sorted(params)}")
    return StrategySpec(name, space, tuple(params.items()))


def parse_strategy(text: str, n: int | None = None, k: int | None = None,
                   dataset_loader: Callable[[str], AssignmentSet] | None = None) -> StrategySpec:
    """Parse ``"name:key=value,..."`` as used on the command line."""
    name, _, rest = text.partition(":")
    name = name.strip()
    if name == "appendix":
        name = "appendix_code"
    if name == "dataset":
        if dataset_loader is None:
            from .datasets import dataset_set as dataset_loader
        return make_strategy("dataset", dataset=dataset_loader(rest.strip()))
    params = {}
    for item in filter(None, (x.strip() for x in rest.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise UndefinedStrategy(f"bad parameter {item!r} in {text!r}")
        params[key.strip()] = int(val)
    return make_strategy(name, n=n, k=k, **params)


# -- predicates --------------------------------------------------------------

def _unused(a, m):
    used = set(a)
    return [c for c in range(1, m + 1) if c not in used]


def _build_predicate(spec: StrategySpec) -> Callable[[Sequence[int]], bool]:
    n, k, m = spec.space.n, spec.space.k, spec.space.m
    name = spec.name

    if name == "parity_k1":
        def pred(a):
            return sequence_parity(a + tuple(_unused(a, m))) == 0
        return pred

    if name == "modular_k2":
        r = spec.param("residue")
        return lambda a: sum(a) % (n + 2) == r

    if name in ("mod_t", "double_parity"):
        t = spec.param("t", 2)
        sigma = spec.param("sigma", 1)

        def pred(a):
            y = _unused(a, m)
            if len({c % t for c in y}) != len(y):
                return False
            if sum(y) % t != sigma:
                return False
            y.sort(key=lambda c: c % t)
            return sequence_parity(a + tuple(y)) == 0
        return pred

    if name == "cyclic_n2":
        return lambda a: a[1] == a[0] % m + 1

    if name == "affine_n3_k2":
        return lambda a: a[2] == (3 * a[0] + 3 * a[1] - 1) % 5 + 1

    if name == "n3_even_k":
        h = (k + 4) // 2
        return lambda a: a[2] == ((a[0] + a[1]) * h - 1) % (k + 3) + 1

    if name == "n3_odd_k":
        rows = idempotent_latin(k + 3).entries
        return lambda a: a[2] == rows[a[0] - 1][a[1] - 1]

    if name == "n4_even_k":
        rows = symmetric_latin_n4(k).entries
        return lambda a: rows[a[0] - 1][a[1] - 1] == rows[a[2] - 1][a[3] - 1]

    if name == "dataset":
        members = spec.dataset.members
        return lambda a: a in members

    if name == "appendix_code":
        B, rs, rp = spec.param("B"), spec.param("r_sum"), spec.param("r_pos")

        def pred(a):
            key = appendix_key(a, m, k, B)
            return key is not None and key == (rs, rp)
        return pred

    raise UndefinedStrategy(name)


def appendix_key(a: Sequence[int], m: int, k: int, B: int) -> tuple[int, int] | None:
    """Residue pair (sum of b mod B, position sum mod k+1) for an assignment.

    Returns None when the even-permutation or top-bits condition fails.
    """
    y = _unused(a, m)
    if sequence_parity(tuple(a) + tuple(y)):
        return None
    b_max = bit(1, m) if m > 1 else 0
    b = [bit(y[i], y[i + 1]) for i in range(len(y) - 1)]
    floor = b_max - B
    if any(x <= floor for x in b):
        return None
    pos = sum(i for i in range(1, len(b)) if b[i - 1] < b[i])
    return sum(b) % B, pos % (k + 1)


def member(spec: StrategySpec, a: Sequence[int]) -> bool:
    return spec.predicate(tuple(a))


# -- materialization ---------------------------------------------------------

def _filter_partition(spec: StrategySpec, first: int) -> list[tuple[int, ...]]:
    pred = spec.predicate
    return [a for a in enumerate_space(spec.space, first) if pred(a)]


def generate(spec: StrategySpec, workers: int = 1) -> AssignmentSet:
    """Materialize the assumed set of a strategy.

    With ``workers > 1`` the enumeration is split by first color across
    processes; the result does not depend on the worker count.
    """
    if spec.name == "dataset":
        return spec.dataset
    p = spec.space
    firsts = range(1, p.m + 1)
    if workers > 1 and p.m > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_filter_partition, [spec] * p.m, firsts))
    else:
        parts = [_filter_partition(spec, f) for f in firsts]
    members = [a for part in parts for a in part]
    return AssignmentSet(p, members, provenance=f"{spec.label} {p}", validate=False)


def best_residues(n: int, k: int, B: int | None = None) -> tuple[int, int, int]:
    """Residue pair maximizing the bit-code strategy's member count.

    Returns ``(r_sum, r_pos, count)``; ties go to the smallest pair.
    """
    B = default_B(k) if B is None else B
    p = SpaceParams(n, k)
    counts = Counter()
    for a in enumerate_space(p):
        key = appendix_key(a, p.m, k, B)
        if key is not None:
            counts[key] += 1
    best = (0, 0, counts[(0, 0)])
    for rs in range(B):
        for rp in range(k + 1):
            c = counts[(rs, rp)]
            if c > best[2]:
                best = (rs, rp, c)
    return best


def best_sigma(n: int, k: int, t: int) -> tuple[int, int]:
    """Target sum maximizing the mod-t strategy's member count; ties to smallest."""
    p = SpaceParams(n, k)
    counts = Counter()
    for a in enumerate_space(p):
        y = _unused(a, p.m)
        if len({c % t for c in y}) != len(y):
            continue
        y.sort(key=lambda c: c % t)
        if sequence_parity(a + tuple(y)) == 0:
            counts[sum(y) % t] += 1
    best = (0, counts[0])
    for s in range(1, t):
        if counts[s] > best[1]:
            best = (s, counts[s])
    return best


def factorize(x: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= x:
        while x % d == 0:
            out[d] = out.get(d, 0) + 1
            x //= d
        d += 1
    if x > 1:
        out[x] = out.get(x, 0) + 1
    return out


def teirlinck_criterion(n: int, k: int) -> bool:
    """True when k+1 = prod p^a has prod a*(p-1) >= n."""
    if k < 0:
        raise ValueError("k must be >= 0")
    prod = 1
    for p, a in factorize(k + 1).items():
        prod *= a * (p - 1)
    return prod >= n
