"""Permutation groups on sites ``1..N``.

Permutations are tuples ``p`` with ``p[i-1] == sigma(i)``; sites are 1-based
everywhere.  A :class:`PermGroup` is built from generators and answers order,
membership and stabilizer questions through a Schreier-Sims chain; the full
element list is only materialized on request.  :class:`YoungGroup` (direct
products of symmetric groups on disjoint blocks) overrides the combinatorial
queries with closed forms so that large degrees stay cheap.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Perm = tuple[int, ...]
Site = int
Label = tuple[int, int]          # (seed weight, index within that weight)
FunctionRep = tuple[tuple[Site, Label], ...]

ELEMENT_BUDGET = 10**6


class GroupError(ValueError):
    pass


# ---------------------------------------------------------------- permutations

def identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def compose(a: Perm, b: Perm) -> Perm:
    """``(a*b)(i) = a(b(i))``."""
    return tuple(a[x - 1] for x in b)


def invert(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, x in enumerate(p, 1):
        inv[x - 1] = i
    return tuple(inv)


def check_perm(p: Sequence[int]) -> Perm:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise GroupError(f"not a permutation of 1..{len(p)}: {p}")
    return p


def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> Perm:
    img = list(range(1, n + 1))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[a - 1] = b
    return check_perm(img)


def extend(p: Perm, n: int) -> Perm:
    """Embed ``p`` into ``S_n`` acting trivially on the new sites."""
    return p + tuple(range(len(p) + 1, n + 1))


def image_set(p: Perm, K: Iterable[int]) -> frozenset[int]:
    return frozenset(p[k - 1] for k in K)


# ---------------------------------------------------------------- Schreier-Sims

class _Chain:
    """Stabilizer chain with a prescribed base prefix."""

    def __init__(self, degree: int, gens: Sequence[Perm], prefix: Sequence[int] = ()):
        self.n = degree
        self.ident = identity(degree)
        self.base: list[int] = list(prefix)
        self.strong: list[Perm] = [g for g in gens if g != self.ident]
        for g in self.strong:
            if all(g[b - 1] == b for b in self.base):
                self._extend_base(g)
        self.trans: list[dict[int, Perm]] = []
        self._build()

    def _extend_base(self, g: Perm) -> None:
        for x in range(1, self.n + 1):
            if g[x - 1] != x:
                self.base.append(x)
                return

    def _level_gens(self, i: int) -> list[Perm]:
        fixed = self.base[:i]
        return [g for g in self.strong if all(g[b - 1] == b for b in fixed)]

    def _orbit(self, i: int) -> dict[int, Perm]:
        gens = self._level_gens(i)
        b = self.base[i]
        tr = {b: self.ident}
        queue = [b]
        for x in queue:
            u = tr[x]
            for g in gens:
                y = g[x - 1]
                if y not in tr:
                    tr[y] = compose(g, u)
                    queue.append(y)
        return tr

    def _sift(self, h: Perm, start: int) -> tuple[Perm, int]:
        for lvl in range(start, len(self.base)):
            x = h[self.base[lvl] - 1]
            u = self.trans[lvl].get(x)
            if u is None:
                return h, lvl
            h = compose(invert(u), h)
        return h, len(self.base)

    def _build(self) -> None:
        self.trans = [self._orbit(i) for i in range(len(self.base))]
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            gens = self._level_gens(i)
            for beta, u in list(self.trans[i].items()):
                for s in gens:
                    su = compose(s, u)
                    h = compose(invert(self.trans[i][su[self.base[i] - 1]]), su)
                    if h == self.ident:
                        continue
                    res, j = self._sift(h, i + 1)
                    if res == self.ident and j == len(self.base):
                        continue
                    self.strong.append(res)
                    if j == len(self.base):
                        self._extend_base(res)
                        self.trans.append({})
                    for lvl in range(i + 1, j + 1):
                        self.trans[lvl] = self._orbit(lvl)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    @property
    def order(self) -> int:
        return math.prod(len(t) for t in self.trans)

    def tail_order(self, k: int) -> int:
        return math.prod(len(t) for t in self.trans[k:])

    def contains(self, p: Perm) -> bool:
        res, j = self._sift(p, 0)
        return j == len(self.base) and res == self.ident


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class Restriction:
    """Faithful action of the setwise stabilizer of ``points`` on ``points``."""

    points: tuple[int, ...]
    maps: frozenset[tuple[tuple[int, int], ...]]

    @property
    def order(self) -> int:
        return len(self.maps)

    def as_dicts(self) -> list[dict[int, int]]:
        return [dict(m) for m in sorted(self.maps)]

    def as_group(self) -> "PermGroup":
        idx = {p: i for i, p in enumerate(self.points, 1)}
        gens = [tuple(idx[dict(m)[p]] for p in self.points) for m in sorted(self.maps)]
        return PermGroup(len(self.points), gens or [identity(len(self.points))])


class PermGroup:
    """Permutation group on ``1..degree`` given by generators."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]], name: str | None = None):
        self.degree = int(degree)
        gens = []
        for g in generators:
            g = check_perm(g)
            if len(g) != self.degree:
                raise GroupError(f"generator {g} has wrong degree for {self.degree}")
            if g != identity(self.degree) and g not in gens:
                gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self.name = name or f"G({self.degree})"
        self._pointwise: dict[frozenset, int] = {}
        self._set_orbits: dict[frozenset, dict[frozenset, Perm]] = {}

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} degree={self.degree}>"

    @cached_property
    def _chain(self) -> _Chain:
        return _Chain(self.degree, self.generators)

    @cached_property
    def order(self) -> int:
        return self._chain.order

    def contains(self, p: Sequence[int]) -> bool:
        p = tuple(p)
        if len(p) != self.degree:
            return False
        return self._chain.contains(p)

    def elements(self) -> list[Perm]:
        """All elements in BFS order from the identity (budgeted)."""
        if self.order > ELEMENT_BUDGET:
            raise GroupError(f"{self.name}: order {self.order} exceeds element budget")
        return list(self._elements)

    @cached_property
    def _elements(self) -> tuple[Perm, ...]:
        e = identity(self.degree)
        seen = {e}
        queue = [e]
        for x in queue:
            for g in self.generators:
                y = compose(g, x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(queue)

    # ---- stabilizers
    def _check_subset(self, K: Iterable[int]) -> frozenset[int]:
        K = frozenset(int(k) for k in K)
        bad = [k for k in K if not 1 <= k <= self.degree]
        if bad:
            raise GroupError(f"sites {sorted(bad)} out of range 1..{self.degree}")
        return K

    def pointwise_stabilizer_order(self, K: Iterable[int]) -> int:
        K = self._check_subset(K)
        if K not in self._pointwise:
            if not K:
                self._pointwise[K] = self.order
            else:
                chain = _Chain(self.degree, self.generators, sorted(K))
                self._pointwise[K] = chain.tail_order(len(K))
        return self._pointwise[K]

    def set_orbit(self, K: Iterable[int]) -> dict[frozenset, Perm]:
        """Orbit of the set ``K`` with a transversal element mapping K onto each image."""
        K = self._check_subset(K)
        if K not in self._set_orbits:
            tr = {K: identity(self.degree)}
            queue = [K]
            for X in queue:
                u = tr[X]
                for g in self.generators:
                    Y = image_set(g, X)
                    if Y not in tr:
                        tr[Y] = compose(g, u)
                        queue.append(Y)
            self._set_orbits[K] = tr
        return self._set_orbits[K]

    def orbit_length(self, K: Iterable[int]) -> int:
        return len(self.set_orbit(K))

    def setwise_stabilizer_order(self, K: Iterable[int]) -> int:
        return self.order // self.orbit_length(K)

    def setwise_stabilizer_generators(self, K: Iterable[int]) -> list[Perm]:
        K = self._check_subset(K)
        tr = self.set_orbit(K)
        out = set()
        for X, u in tr.items():
            for g in self.generators:
                gu = compose(g, u)
                h = compose(invert(tr[image_set(gu, K)]), gu)
                if h != identity(self.degree):
                    out.add(h)
        return sorted(out)

    def restriction(self, K: Iterable[int]) -> Restriction:
        K = self._check_subset(K)
        if not K:
            raise GroupError("restriction to the empty set is undefined")
        pts = tuple(sorted(K))
        gens = [tuple(h[p - 1] for p in pts) for h in self.setwise_stabilizer_generators(K)]
        idx = {p: i for i, p in enumerate(pts, 1)}
        local = PermGroup(len(pts), [tuple(idx[x] for x in g) for g in gens])
        maps = frozenset(tuple((p, pts[e[i] - 1]) for i, p in enumerate(pts))
                         for e in local.elements())
        return Restriction(pts, maps)

    def set_maps(self, K: Iterable[int], K2: Iterable[int]) -> list[dict[int, int]]:
        """All bijections K -> K2 induced by group elements (empty if none)."""
        K, K2 = self._check_subset(K), self._check_subset(K2)
        tr = self.set_orbit(K)
        if K2 not in tr:
            return []
        if not K:
            return [{}]
        t = tr[K2]
        return [{k: t[m[k] - 1] for k in K} for m in self.restriction(K).as_dicts()]

    def is_young(self) -> bool:
        return False


class YoungGroup(PermGroup):
    """Direct product of full symmetric groups on disjoint blocks of sites."""

    def __init__(self, degree: int, blocks: Sequence[Sequence[int]], name: str | None = None):
        blocks = [tuple(sorted(b)) for b in blocks if len(b) > 0]
        covered = sorted(itertools.chain.from_iterable(blocks))
        if len(covered) != len(set(covered)) or any(not 1 <= x <= degree for x in covered):
            raise GroupError("blocks must be disjoint subsets of 1..degree")
        rest = sorted(set(range(1, degree + 1)) - set(covered))
        self.blocks: tuple[tuple[int, ...], ...] = tuple(blocks) + tuple((x,) for x in rest)
        gens = []
        for b in self.blocks:
            if len(b) >= 2:
                gens.append(from_cycles(degree, [b[:2]]))
                if len(b) >= 3:
                    gens.append(from_cycles(degree, [b]))
        super().__init__(degree, gens, name=name)
        self.block_of = {x: i for i, b in enumerate(self.blocks) for x in b}

    def is_young(self) -> bool:
        return True

    @cached_property
    def order(self) -> int:
        return math.prod(math.factorial(len(b)) for b in self.blocks)

    def contains(self, p: Sequence[int]) -> bool:
        p = tuple(p)
        return len(p) == self.degree and all(self.block_of[p[x - 1]] == self.block_of[x]
                                             for x in range(1, self.degree + 1))

    def block_counts(self, K: Iterable[int]) -> tuple[int, ...]:
        K = self._check_subset(K)
        c = Counter(self.block_of[k] for k in K)
        return tuple(c.get(i, 0) for i in range(len(self.blocks)))

    def pointwise_stabilizer_order(self, K: Iterable[int]) -> int:
        kc = self.block_counts(K)
        return math.prod(math.factorial(len(b) - k) for b, k in zip(self.blocks, kc))

    def orbit_length(self, K: Iterable[int]) -> int:
        kc = self.block_counts(K)
        return math.prod(math.comb(len(b), k) for b, k in zip(self.blocks, kc))

    def setwise_stabilizer_order(self, K: Iterable[int]) -> int:
        kc = self.block_counts(K)
        return math.prod(math.factorial(k) * math.factorial(len(b) - k)
                         for b, k in zip(self.blocks, kc))

    def restriction(self, K: Iterable[int]) -> Restriction:
        K = self._check_subset(K)
        if not K:
            raise GroupError("restriction to the empty set is undefined")
        pts = tuple(sorted(K))
        parts = [[k for k in pts if self.block_of[k] == i] for i in range(len(self.blocks))]
        parts = [p for p in parts if p]
        maps = set()
        for choice in itertools.product(*(itertools.permutations(p) for p in parts)):
            m = {}
            for p, img in zip(parts, choice):
                m.update(zip(p, img))
            maps.add(tuple(sorted(m.items())))
        return Restriction(pts, frozenset(maps))

    def set_maps(self, K: Iterable[int], K2: Iterable[int]) -> list[dict[int, int]]:
        K, K2 = self._check_subset(K), self._check_subset(K2)
        if self.block_counts(K) != self.block_counts(K2):
            return []
        out = [{}]
        for i in range(len(self.blocks)):
            src = sorted(k for k in K if self.block_of[k] == i)
            dst = sorted(k for k in K2 if self.block_of[k] == i)
            out = [{**m, **dict(zip(src, img))} for m in out for img in itertools.permutations(dst)]
        return out


def symmetric_group(n: int) -> YoungGroup:
    return YoungGroup(n, [range(1, n + 1)], name=f"S_{n}")


def trivial_group(n: int) -> PermGroup:
    return PermGroup(n, [], name=f"1_{n}")


# ---------------------------------------------------------------- stabilizer data

@dataclass(frozen=True)
class StabilizerData:
    order: int
    setwise: int
    pointwise: int
    orbit_length: int


def stabilizer_data(G: PermGroup, K: Iterable[int]) -> StabilizerData:
    K = frozenset(K)
    data = StabilizerData(G.order, G.setwise_stabilizer_order(K),
                          G.pointwise_stabilizer_order(K), G.orbit_length(K))
    assert data.orbit_length * data.setwise == data.order
    return data


def restriction_group(G: PermGroup, K: Iterable[int]) -> Restriction:
    return G.restriction(K)


# ---------------------------------------------------------------- function orbits

def act_on_function(p: Perm, f: Mapping[Site, Label]) -> dict[Site, Label]:
    """``(sigma . a)(sigma(i)) = a(i)``."""
    return {p[i - 1]: lab for i, lab in f.items()}


def function_key(f: Mapping[Site, Label]) -> FunctionRep:
    return tuple(sorted(f.items()))


def _labels_by_weight(seed_dims: Mapping[int, int]) -> dict[int, list[Label]]:
    return {w: [(w, i) for i in range(d)] for w, d in seed_dims.items() if w >= 1 and d > 0}


def _weighted_multisets(labels: dict[int, list[Label]], n: int, max_size: int) -> Iterator[tuple[Label, ...]]:
    """Nondecreasing label tuples of total weight ``n`` and length <= max_size."""
    flat = sorted(itertools.chain.from_iterable(labels.values()))

    def rec(start: int, remaining: int, size: int) -> Iterator[tuple[Label, ...]]:
        if remaining == 0:
            yield ()
            return
        if size == max_size:
            return
        for i in range(start, len(flat)):
            lab = flat[i]
            if lab[0] <= remaining:
                for rest in rec(i, remaining - lab[0], size + 1):
                    yield (lab,) + rest

    yield from rec(0, n, 0)


def _all_functions(degree: int, labels: dict[int, list[Label]], n: int) -> Iterator[dict[Site, Label]]:
    flat = sorted(itertools.chain.from_iterable(labels.values()))

    def rec(site: int, remaining: int) -> Iterator[dict[Site, Label]]:
        if remaining == 0:
            yield {}
            return
        if site > degree:
            return
        yield from rec(site + 1, remaining)
        for lab in flat:
            if lab[0] <= remaining:
                for rest in rec(site + 1, remaining - lab[0]):
                    yield {site: lab, **rest}

    yield from rec(1, n)


def function_orbit_reps(G: PermGroup, seed_dims: Mapping[int, int], n: int) -> tuple[int, list[FunctionRep]]:
    """Orbits of weight-``n`` functions ``sites -> seed basis`` under ``G``.

    Returns ``(b_n, reps)`` with each rep the lexicographically least member
    of its orbit, as a sorted tuple of ``(site, (weight, index))`` pairs.
    """
    if seed_dims.get(0, 1) != 1:
        raise ValueError("seed must be of CFT type (dim V_0 == 1)")
    if n < 0:
        return 0, []
    labels = _labels_by_weight(seed_dims)
    if G.is_young():
        reps = _young_function_reps(G, labels, n)
    else:
        reps = _generic_function_reps(G, labels, n)
    return len(reps), reps


def _young_function_reps(G: YoungGroup, labels, n: int) -> list[FunctionRep]:
    out = []

    def rec(bi: int, remaining: int, acc: list[tuple[Site, Label]]):
        if bi == len(G.blocks):
            if remaining == 0:
                out.append(tuple(sorted(acc)))
            return
        block = G.blocks[bi]
        for w in range(remaining + 1):
            for ms in _weighted_multisets(labels, w, len(block)):
                rec(bi + 1, remaining - w, acc + list(zip(block, ms)))

    rec(0, n, [])
    return sorted(out)


def _generic_function_reps(G: PermGroup, labels, n: int) -> list[FunctionRep]:
    funcs = [function_key(f) for f in _all_functions(G.degree, labels, n)]
    index = {f: i for i, f in enumerate(funcs)}
    parent = list(range(len(funcs)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, f in enumerate(funcs):
        for g in G.generators:
            j = index[function_key(act_on_function(g, dict(f)))]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    best: dict[int, FunctionRep] = {}
    for i, f in enumerate(funcs):
        r = find(i)
        if r not in best or f < best[r]:
            best[r] = f
    return sorted(best.values())


def canonical_function(G: PermGroup, f: Mapping[Site, Label]) -> FunctionRep:
    """Lexicographically least member of the orbit of ``f``."""
    if G.is_young():
        acc = []
        for block in G.blocks:
            labs = sorted(f[x] for x in block if x in f)
            acc.extend(zip(block, labs))
        return tuple(sorted(acc))
    key = function_key(f)
    seen = {key}
    queue = [key]
    for x in queue:
        for g in G.generators:
            y = function_key(act_on_function(g, dict(x)))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return min(seen)


def function_orbit_length(G: PermGroup, f: Mapping[Site, Label]) -> int:
    """|G| / |label-preserving stabilizer of f|."""
    if G.is_young():
        length = 1
        for block in G.blocks:
            labs = Counter(f[x] for x in block if x in f)
            free = len(block) - sum(labs.values())
            length *= math.factorial(len(block)) // (
                math.factorial(free) * math.prod(math.factorial(c) for c in labs.values()))
        return length
    key = function_key(f)
    seen = {key}
    queue = [key]
    for x in queue:
        for g in G.generators:
            y = function_key(act_on_function(g, dict(x)))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen)


def function_orbit(G: PermGroup, f: Mapping[Site, Label]) -> list[FunctionRep]:
    key = function_key(f)
    if G.is_young():
        blocks = []
        for block in G.blocks:
            labs = [f[x] for x in block if x in f]
            opts = set()
            for sites in itertools.combinations(block, len(labs)):
                for perm in set(itertools.permutations(labs)):
                    opts.add(tuple(zip(sites, perm)))
            blocks.append(sorted(opts))
        return sorted(tuple(sorted(itertools.chain.from_iterable(c)))
                      for c in itertools.product(*blocks))
    seen = {key}
    queue = [key]
    for x in queue:
        for g in G.generators:
            y = function_key(act_on_function(g, dict(x)))
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


# ---------------------------------------------------------------- families

class FamilyError(ValueError):
    pass


@dataclass
class GroupFamily:
    """Rule ``N -> G_N`` acting on ``I_N = {1..degree(N)}``.

    ``blocks`` (Young families only) returns the block partition at level N;
    ``growing`` flags which block indices have unbounded size.
    """

    name: str
    degree: Callable[[int], int]
    build: Callable[[int], PermGroup]
    start: int = 1
    growing: tuple[bool, ...] | None = None
    params: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def group(self, N: int) -> PermGroup:
        if N < self.start:
            raise FamilyError(f"{self.name}: level {N} below start {self.start}")
        if N not in self._cache:
            G = self.build(N)
            if G.degree != self.degree(N):
                raise FamilyError(f"{self.name}: recipe degree mismatch at N={N}")
            self._cache[N] = G
        return self._cache[N]

    @property
    def is_young(self) -> bool:
        return self.growing is not None

    def to_json(self) -> dict:
        return {"family": self.name, **self.params}


def symmetric_family() -> GroupFamily:
    return GroupFamily("symmetric", lambda N: N, symmetric_group, growing=(True,))


def pointed_symmetric_family() -> GroupFamily:
    def build(N: int) -> YoungGroup:
        return YoungGroup(N, [[1], list(range(2, N + 1))], name=f"P_{N}")
    return GroupFamily("pointed_symmetric", lambda N: N, build, growing=(False, True))


def product_family() -> GroupFamily:
    """S_N x S_N acting on odd and even sites of ``1..2N`` (interleaved so the
    vacuum padding respects the block structure)."""
    def build(N: int) -> YoungGroup:
        return YoungGroup(2 * N, [range(1, 2 * N, 2), range(2, 2 * N + 1, 2)], name=f"S_{N}xS_{N}")
    return GroupFamily("product", lambda N: 2 * N, build, growing=(True, True))


def custom_family(generators: Mapping[int, Sequence[Sequence[int]]], degrees: Mapping[int, int]) -> GroupFamily:
    gens = {int(k): v for k, v in generators.items()}
    degs = {int(k): int(v) for k, v in degrees.items()}
    levels = sorted(degs)
    for a, b in zip(levels, levels[1:]):
        if degs[a] >= degs[b]:
            raise FamilyError("custom family degrees must be strictly increasing")

    def degree(N: int) -> int:
        if N not in degs:
            raise FamilyError(f"custom family undefined at N={N}")
        return degs[N]

    def build(N: int) -> PermGroup:
        return PermGroup(degree(N), gens.get(N, []), name=f"custom_{N}")

    return GroupFamily("custom", degree, build, start=levels[0],
                       params={"generators": gens, "degrees": degs})


FAMILIES = {
    "symmetric": symmetric_family,
    "pointed_symmetric": pointed_symmetric_family,
    "product": product_family,
}


def make_family(spec: Mapping) -> GroupFamily:
    name = spec.get("family")
    if name == "custom":
        return custom_family(spec["generators"], spec["degrees"])
    if name not in FAMILIES:
        raise FamilyError(f"unknown family {name!r}; expected one of {sorted(FAMILIES) + ['custom']}")
    return FAMILIES[name]()


# ---------------------------------------------------------------- diagnostics

def is_nested(F: GroupFamily, N: int) -> bool:
    """Check that the restriction of ``G_N`` to ``I_{N-1}`` lies in ``G_{N-1}``."""
    if N - 1 < F.start:
        return True
    G, H = F.group(N), F.group(N - 1)
    prev = range(1, H.degree + 1)
    for h in G.setwise_stabilizer_generators(prev):
        if not H.contains(h[:H.degree]):
            return False
    return True


def saturation_level(seq: Sequence[tuple[int, int]]) -> int | None:
    """Smallest N in ``seq`` (pairs N, b) after which b stays constant."""
    if not seq:
        return None
    last = seq[-1][1]
    level = seq[-1][0]
    for N, b in reversed(seq):
        if b != last:
            break
        level = N
    return level


def family_diagnostics(F: GroupFamily, K: Iterable[int], n: int, N_range: Iterable[int],
                       seed_dims: Mapping[int, int] | None = None, tail: int = 3) -> dict:
    K = frozenset(K)
    Ns = sorted(N_range)
    report: dict = {"family": F.name, "K": sorted(K), "n": n, "N": Ns}
    report["nested"] = {N: is_nested(F, N) for N in Ns}
    restr = {}
    orbit_lengths = {}
    for N in Ns:
        G = F.group(N)
        if K and max(K) <= G.degree:
            restr[N] = G.restriction(K).maps
            orbit_lengths[N] = G.orbit_length(K)
    tail_ns = [N for N in Ns if N in restr][-tail:]
    stable = len({restr[N] for N in tail_ns}) == 1 if tail_ns else False
    report["restriction_stabilized"] = stable
    report["stable_restriction_order"] = len(restr[tail_ns[-1]]) if stable else None
    report["orbit_lengths"] = orbit_lengths
    tail_len = [orbit_lengths[N] for N in tail_ns]
    report["finite_orbit_flag"] = bool(tail_len) and len(set(tail_len)) == 1
    if seed_dims is not None:
        seq = [(N, function_orbit_reps(F.group(N), seed_dims, n)[0]) for N in Ns]
        report["b_n"] = dict(seq)
        report["saturation"] = saturation_level(seq)
    return report


# ---------------------------------------------------------------- configurations

@dataclass(frozen=True)
class SupportConfiguration:
    K1: frozenset[int]
    K2: frozenset[int]
    K3: frozenset[int]
    orbit_size: int | None = field(default=None, compare=False)

    @property
    def sets(self) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
        return self.K1, self.K2, self.K3

    @property
    def triple(self) -> frozenset[int]:
        return self.K1 & self.K2 & self.K3

    @property
    def union(self) -> frozenset[int]:
        return self.K1 | self.K2 | self.K3

    @property
    def one_point(self) -> frozenset[int]:
        pair = (self.K1 & self.K2) | (self.K1 & self.K3) | (self.K2 & self.K3)
        return self.union - pair

    def key(self) -> tuple:
        return tuple(tuple(sorted(s)) for s in self.sets)


def placed_support_orbits(G: PermGroup, K1: Iterable[int], K2: Iterable[int],
                          K3: Iterable[int]) -> list[SupportConfiguration]:
    """Orbits of placed triples ``(k1 K1, k2 K2, k3 K3)`` under diagonal ``G``.

    Each returned configuration carries its orbit size.
    """
    Ks = [frozenset(K) for K in (K1, K2, K3)]
    if G.is_young():
        return _young_configurations(G, Ks)
    orbits = [list(G.set_orbit(K)) for K in Ks]
    seen: set = set()
    out = []
    for trip in itertools.product(*orbits):
        if trip in seen:
            continue
        orb = {trip}
        queue = [trip]
        for x in queue:
            for g in G.generators:
                y = tuple(image_set(g, s) for s in x)
                if y not in orb:
                    orb.add(y)
                    queue.append(y)
        seen |= orb
        rep = min(orb, key=lambda t: tuple(tuple(sorted(s)) for s in t))
        out.append(SupportConfiguration(*rep, orbit_size=len(orb)))
    return sorted(out, key=SupportConfiguration.key)


_REGIONS = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1))


def _venn_profiles(k: tuple[int, int, int], size: int | None) -> Iterator[tuple[int, ...]]:
    """Region counts (7 Venn regions) realizing set sizes ``k`` within ``size`` points."""
    k1, k2, k3 = k
    for n123 in range(min(k) + 1):
        for n12 in range(min(k1, k2) - n123 + 1):
            for n13 in range(min(k1 - n123 - n12, k3 - n123) + 1):
                for n23 in range(min(k2 - n123 - n12, k3 - n123 - n13) + 1):
                    n1 = k1 - n123 - n12 - n13
                    n2 = k2 - n123 - n12 - n23
                    n3 = k3 - n123 - n13 - n23
                    if min(n1, n2, n3) < 0:
                        continue
                    prof = (n1, n2, n3, n12, n13, n23, n123)
                    if size is None or sum(prof) <= size:
                        yield prof


def young_profiles(G: YoungGroup, Ks: Sequence[frozenset[int]], unbounded: Sequence[bool] | None = None):
    """Per-block Venn profiles; blocks flagged in ``unbounded`` ignore their size."""
    counts = [G.block_counts(K) for K in Ks]
    per_block = []
    for bi, block in enumerate(G.blocks):
        k = tuple(c[bi] for c in counts)
        size = None if unbounded and unbounded[bi] else len(block)
        per_block.append(list(_venn_profiles(k, size)))
    return itertools.product(*per_block)


def place_profile(blocks: Sequence[Sequence[int]], profile: Sequence[tuple[int, ...]]):
    sets = [set(), set(), set()]
    for block, prof in zip(blocks, profile):
        pos = 0
        for region, cnt in zip(_REGIONS, prof):
            sites = block[pos:pos + cnt]
            pos += cnt
            for i in range(3):
                if region[i]:
                    sets[i].update(sites)
    return tuple(frozenset(s) for s in sets)


def profile_stabilizer_order(block_sizes: Sequence[int], profile) -> int:
    """Order of the joint setwise stabilizer of a placed Young configuration."""
    out = 1
    for size, prof in zip(block_sizes, profile):
        out *= math.prod(math.factorial(c) for c in prof) * math.factorial(size - sum(prof))
    return out


def _young_configurations(G: YoungGroup, Ks) -> list[SupportConfiguration]:
    out = []
    sizes = [len(b) for b in G.blocks]
    for profile in young_profiles(G, Ks):
        sets = place_profile(G.blocks, profile)
        stab = profile_stabilizer_order(sizes, profile)
        out.append(SupportConfiguration(*sets, orbit_size=G.order // stab))
    return sorted(out, key=SupportConfiguration.key)


def brute_force_configuration_count(G: PermGroup, K1, K2, K3) -> int:
    """Count diagonal orbits on placed triples by enumerating group elements."""
    elems = G.elements()
    imgs = [sorted({image_set(g, K) for g in elems}, key=sorted) for K in (K1, K2, K3)]
    seen = set()
    count = 0
    for trip in itertools.product(*imgs):
        if trip in seen:
            continue
        count += 1
        for g in elems:
            seen.add(tuple(image_set(g, s) for s in trip))
    return count
