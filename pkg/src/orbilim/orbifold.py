"""Finite-N permutation orbifolds ``(V^{tensor I_N})^{G_N}``.

Orbit basis: ``pi_N(a) = |G_N|^-1 sum_sigma sigma.a`` for canonical Fock words
``a``.  In this basis the coefficient of ``pi_N(a)`` in an invariant vector
``x`` equals ``sum_{a' in G a} x[a']``, i.e. ``|O_a| x[a]``.

Connecting maps use the isometric prefactor

    Q_N(K) = sqrt(|G_{N+1}| |Ghat_N^K| / (|G_N| |Ghat_{N+1}^K|))

so ``f(pi_N a) = Q_N(K_a) pi_{N+1}(g a)``.  With it the normalized orbit sums
``w_a = sum_sigma sigma.a / sqrt(|G| |Ghat^K|)`` are carried to each other and
the vacuum is fixed.  The alternative prefactor (ratio inverted in the group
orders) is available as :func:`literal_prefactor`; it scales the vacuum by
``|G_N|/|G_{N+1}|``.

Three routes to structure constants of the limit basis
``x_a = f_{MN}(pi_M a)``:

* ``definition``: expand ``Y(x_b) x_c`` with tensor modes and read off the
  coefficient of ``x_a``.
* ``group_sum``: ``P * sum_{G_N^3} c^N(s1 a, s2 b, s3 c)`` with
  ``P = sqrt(|G_M|^3 prod Ghat_M / (|G_N|^3 prod Ghat_N))``.
* ``oligo``: ``sqrt(|G_M|^3 prod Ghat_M) sum_conf M(conf, N) W(conf) inner``
  where ``inner`` runs over induced bijections of the supports and
  ``W = |Ghat^{K123}| / |joint setwise stabilizer|``.

The last two equal ``eta * definition`` with
``eta = |G_M|^2 |Ghat_M^{K_a}| |Stab_N(a)| / |Ghat_N^{K_a}|``
(``Stab_N(a)`` the label-preserving stabilizer); ``normalized=True`` divides
it out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .perm import (GroupFamily, PermGroup, SupportConfiguration, YoungGroup, canonical_function,
                   function_orbit, function_orbit_length, function_orbit_reps, placed_support_orbits)
from .scalar import RadicalScalar, sqrt_of_rational
from .seed import SeedVA, add_into
from .tensor import FockWord, tensor_mode, tensor_structure_constant

GROUP_SUM_BUDGET = 10**7
CONFIG_BUDGET = 10**5


class OrbifoldError(ValueError):
    pass


class UnsaturatedError(OrbifoldError):
    pass


# ---------------------------------------------------------------- orbifold VA

class OrbifoldVA:
    """Level-N permutation orbifold of ``seed`` under ``family.group(N)``."""

    def __init__(self, family: GroupFamily, seed: SeedVA, N: int):
        self.family = family
        self.seed = seed
        self.N = N
        self.group: PermGroup = family.group(N)
        self.degree = self.group.degree
        self.cutoff = seed.cutoff
        self._basis: dict[int, list[FockWord]] = {}
        self._expand: dict = {}
        self._orbits: dict = {}

    def __repr__(self) -> str:
        return f"<OrbifoldVA {self.family.name} N={self.N} seed={self.seed.algebra.name}>"

    @property
    def vacuum(self) -> FockWord:
        return FockWord.vacuum(self.degree)

    def seed_dims(self) -> dict[int, int]:
        return {n: len(self.seed.basis(n)) for n in range(self.seed.cutoff + 1)}

    def weight(self, a: FockWord) -> int:
        return a.weight(self.seed)

    def basis(self, n: int) -> list[FockWord]:
        if n > self.cutoff:
            raise OrbifoldError(f"weight {n} above cutoff {self.cutoff}")
        if n not in self._basis:
            _, reps = function_orbit_reps(self.group, self.seed_dims(), n)
            self._basis[n] = [FockWord.from_function(self.seed, self.degree, r) for r in reps]
        return self._basis[n]

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    def canonical(self, a: FockWord) -> FockWord:
        if a.degree != self.degree:
            raise OrbifoldError(f"degree {a.degree} does not match {self.degree}")
        rep = canonical_function(self.group, a.to_function(self.seed))
        return FockWord.from_function(self.seed, self.degree, rep)

    def orbit(self, a: FockWord) -> list[FockWord]:
        if a not in self._orbits:
            self._orbits[a] = [FockWord.from_function(self.seed, self.degree, f)
                               for f in function_orbit(self.group, a.to_function(self.seed))]
        return self._orbits[a]

    def orbit_length(self, a: FockWord) -> int:
        return function_orbit_length(self.group, a.to_function(self.seed))

    def stabilizer_order(self, a: FockWord) -> int:
        """Order of the label-preserving stabilizer of ``a``."""
        return self.group.order // self.orbit_length(a)

    def project(self, v: FockWord | Mapping[FockWord, object]) -> dict[FockWord, object]:
        """``pi_N`` of a Fock vector, expressed over orbit vectors."""
        vec = {v: 1} if isinstance(v, FockWord) else v
        out: dict = {}
        for w, c in vec.items():
            if w.degree != self.degree:
                raise OrbifoldError(f"degree {w.degree} does not match {self.degree}")
            add_into(out, {self.canonical(w): c})
        return out

    def to_fock(self, vec: Mapping[FockWord, object]) -> dict[FockWord, object]:
        """Expand orbit vectors ``pi_N(rep)`` into Fock words."""
        out: dict = {}
        for rep, c in vec.items():
            orb = self.orbit(rep)
            add_into(out, {w: 1 for w in orb}, Fraction(1, len(orb)) * c)
        return out

    def expand(self, b: FockWord, k: int, c: FockWord) -> dict[FockWord, object]:
        """``pi(b)_(k) pi(c)`` in the orbit basis.

        Uses ``pi(b)_(k) pi(c) = |O_c|^-1 sum_{c' in O_c} pi(b_(k) c')``.
        """
        key = (b, k, c)
        if key not in self._expand:
            tw = self.weight(b) + self.weight(c) - k - 1
            if max(self.weight(b), self.weight(c), tw) > self.cutoff:
                raise OrbifoldError(f"product weight {tw} above cutoff {self.cutoff}")
            out: dict = {}
            orb = self.orbit(c)
            for c2 in orb:
                add_into(out, self.project(tensor_mode(self.seed, b, k, c2)), Fraction(1, len(orb)))
            self._expand[key] = out
        return self._expand[key]

    def structure_constant(self, a: FockWord, b: FockWord, c: FockWord):
        """Structure constant in the orbit basis at this level."""
        k = self.weight(b) + self.weight(c) - self.weight(a) - 1
        return self.expand(b, k, c).get(a, 0)


# ---------------------------------------------------------------- prefactors

def _ghat(family: GroupFamily, N: int, K: Iterable[int]) -> int:
    return family.group(N).pointwise_stabilizer_order(K)


def connecting_prefactor(family: GroupFamily, N: int, K: Iterable[int]) -> RadicalScalar:
    """Isometric prefactor ``Q_N(K)`` of ``f_{N,N+1}`` on support ``K``."""
    K = frozenset(K)
    G0, G1 = family.group(N).order, family.group(N + 1).order
    return sqrt_of_rational(Fraction(G1 * _ghat(family, N, K), G0 * _ghat(family, N + 1, K)))


def literal_prefactor(family: GroupFamily, N: int, K: Iterable[int]) -> RadicalScalar:
    """``sqrt(|G_N| |Ghat_N^K| / (|G_{N+1}| |Ghat_{N+1}^K|))`` as written for the
    connecting map; differs from :func:`connecting_prefactor` by
    ``|G_N| / |G_{N+1}|``."""
    K = frozenset(K)
    G0, G1 = family.group(N).order, family.group(N + 1).order
    return sqrt_of_rational(Fraction(G0 * _ghat(family, N, K), G1 * _ghat(family, N + 1, K)))


def connecting_map(O: OrbifoldVA, vec: Mapping[FockWord, object], target: "OrbifoldVA | None" = None) -> dict:
    """``f_{N,N+1}`` on an orbit-basis expansion; returns an orbit-basis expansion at N+1."""
    nxt = target or OrbifoldVA(O.family, O.seed, O.N + 1)
    if nxt.N != O.N + 1:
        raise OrbifoldError("target must be the next level")
    out: dict = {}
    for rep, c in vec.items():
        q = connecting_prefactor(O.family, O.N, rep.support)
        add_into(out, nxt.project(rep.embed(nxt.degree)), q * c)
    return out


def connect(family: GroupFamily, seed: SeedVA, M: int, N: int, vec: Mapping[FockWord, object]) -> dict:
    """``f_{MN} = f_{N-1,N} o ... o f_{M,M+1}``."""
    if N < M:
        raise OrbifoldError("N must be >= M")
    cur = dict(vec)
    O = OrbifoldVA(family, seed, M)
    for L in range(M, N):
        nxt = OrbifoldVA(family, seed, L + 1)
        cur = connecting_map(O, cur, nxt)
        O = nxt
    return cur


def connect_closed(family: GroupFamily, M: int, N: int, K: Iterable[int]) -> RadicalScalar:
    """Telescoped prefactor of ``f_{MN}`` on a saturated orbit vector."""
    return sqrt_of_rational(Fraction(family.group(N).order * _ghat(family, M, K),
                                     family.group(M).order * _ghat(family, N, K)))


def saturation(family: GroupFamily, seed: SeedVA, n: int, N_max: int, N_min: int | None = None) -> int | None:
    """Smallest M with ``b_n(G_M) = b_n(G_N)`` for all tested ``M <= N <= N_max``.

    Returns ``None`` when the count still changes at ``N_max`` (not saturated)."""
    start = family.start if N_min is None else N_min
    dims = {w: len(seed.basis(w)) for w in range(min(n, seed.cutoff) + 1)}
    seq = [(N, function_orbit_reps(family.group(N), dims, n)[0]) for N in range(start, N_max + 1)]
    if len(seq) >= 2 and seq[-1][1] != seq[-2][1]:
        return None
    level = seq[-1][0]
    for N, b in reversed(seq):
        if b != seq[-1][1]:
            break
        level = N
    return level


# ---------------------------------------------------------------- M factors

def M_factor_formula(G: PermGroup, conf: SupportConfiguration) -> RadicalScalar:
    """``sqrt(prod |Ghat^{K_i}| / (|G| |Ghat^{K123}|^2))`` or 0 when ``K_o`` is nonempty."""
    if conf.one_point:
        return RadicalScalar()
    num = math.prod(G.pointwise_stabilizer_order(K) for K in conf.sets)
    den = G.order * G.pointwise_stabilizer_order(conf.union) ** 2
    return sqrt_of_rational(Fraction(num, den))


def _pointwise_elements(G: PermGroup, K: frozenset) -> list:
    cache = G.__dict__.setdefault("_pointwise_elements", {})
    if K not in cache:
        cache[K] = [g for g in G.elements() if all(g[k - 1] == k for k in K)]
    return cache[K]


def product_set_size(G: PermGroup, conf: SupportConfiguration) -> int:
    """``|Ghat^{K1} Ghat^{K2} Ghat^{K3}|`` by enumeration.

    Right multiplication by ``Ghat^{K3}`` does not change a permutation on
    ``K3``, so the product set is a union of cosets labelled by the images of
    ``K3`` under ``x y`` with ``x, y`` in the first two stabilizers.
    """
    K1, K2, K3 = (frozenset(K) for K in conf.sets)
    K3s = sorted(K3)
    y_images = {tuple(y[k - 1] for k in K3s) for y in _pointwise_elements(G, K2)}
    pts = sorted({p for t in y_images for p in t})
    pos = {p: i for i, p in enumerate(pts)}
    x_maps = {tuple(x[p - 1] for p in pts) for x in _pointwise_elements(G, K1)}
    images = {tuple(xm[pos[p]] for p in t) for xm in x_maps for t in y_images}
    return len(images) * G.pointwise_stabilizer_order(K3)


def M_factor_product(G: PermGroup, conf: SupportConfiguration) -> RadicalScalar:
    """``sqrt(|Ghat^{K1} Ghat^{K2} Ghat^{K3}| / |G|)`` by enumeration (small groups)."""
    return sqrt_of_rational(Fraction(product_set_size(G, conf), G.order))


@dataclass(frozen=True)
class MFactorResult:
    value: RadicalScalar
    product_form: RadicalScalar | None
    agree: bool | None


def M_factor(G: PermGroup, conf: SupportConfiguration, compare: bool = True,
             enumeration_limit: int = 5040) -> MFactorResult:
    """M-factor of a placed configuration; cross-checked against the product
    form when ``K_o`` is empty and ``|G|`` is small enough to enumerate."""
    val = M_factor_formula(G, conf)
    if not compare or conf.one_point or G.order > enumeration_limit:
        return MFactorResult(val, None, None)
    prod = M_factor_product(G, conf)
    return MFactorResult(val, prod, prod == val)


def symmetric_M(K1: int, K2: int, K3: int, n_t: int, N: int) -> RadicalScalar:
    """Closed-form M-factor for ``S_N`` and sizes ``K_i`` with triple overlap ``n_t``
    and empty one-point set."""
    total = K1 + K2 + K3 - n_t
    if total % 2 or n_t < 0 or n_t > min(K1, K2, K3):
        raise OrbifoldError("unrealizable configuration sizes")
    u = total // 2
    # pairwise-only region sizes
    n12, n13, n23 = u - K3, u - K2, u - K1
    if min(n12, n13, n23) < 0 or u > N:
        raise OrbifoldError("unrealizable configuration sizes")
    f = math.factorial
    return sqrt_of_rational(Fraction(f(N - K1) * f(N - K2) * f(N - K3), f(N) * f(N - u) ** 2))


# ---------------------------------------------------------------- structure constants

def _lift(O: OrbifoldVA, rep: FockWord) -> FockWord:
    if rep.degree > O.degree:
        raise OrbifoldError("representative lives above the target level")
    return O.canonical(rep.embed(O.degree))


def eta(family: GroupFamily, seed: SeedVA, M: int, N: int, a: FockWord) -> int | Fraction:
    """Normalization constant relating the raw sums to the definition route."""
    O = OrbifoldVA(family, seed, N)
    aN = a.embed(O.degree)
    GM = family.group(M)
    val = Fraction(GM.order ** 2 * GM.pointwise_stabilizer_order(a.support) * O.stabilizer_order(aN),
                   O.group.pointwise_stabilizer_order(a.support))
    return val.numerator if val.denominator == 1 else val


def check_saturated(family: GroupFamily, seed: SeedVA, M: int, reps: Sequence[FockWord], N_probe: int):
    for r in reps:
        n = r.weight(seed)
        b0 = function_orbit_reps(family.group(M), {w: len(seed.basis(w)) for w in range(n + 1)}, n)[0]
        b1 = function_orbit_reps(family.group(N_probe), {w: len(seed.basis(w)) for w in range(n + 1)}, n)[0]
        if b0 != b1:
            raise UnsaturatedError(f"weight {n} not saturated at M={M} (b_n {b0} vs {b1} at N={N_probe})")


def sc_definition(family, seed, M: int, N: int, a: FockWord, b: FockWord, c: FockWord):
    """Coefficient of ``x_a`` in ``x_b (k) x_c`` with ``x = f_{MN}(pi_M .)``."""
    O = OrbifoldVA(family, seed, N)
    xs = [connect(family, seed, M, N, {r: 1}) for r in (a, b, c)]
    for x in xs:
        if len(x) != 1:
            raise OrbifoldError("connecting map did not carry an orbit vector to an orbit vector")
    (aN, ca), (bN, cb), (cN, cc) = (next(iter(x.items())) for x in xs)
    k = O.weight(bN) + O.weight(cN) - O.weight(aN) - 1
    prod = O.expand(bN, k, cN)
    coef = prod.get(aN, 0)
    if coef == 0:
        return RadicalScalar()
    return RadicalScalar.coerce(coef) * cb * cc / ca


def sc_group_sum(family, seed, M: int, N: int, a, b, c, normalized: bool = True,
                 budget: int = GROUP_SUM_BUDGET):
    G = family.group(N)
    if G.order ** 3 > budget:
        raise OrbifoldError(f"|G_N|^3 = {G.order ** 3} exceeds budget {budget}")
    GM = family.group(M)
    deg = G.degree
    words = [r.embed(deg) for r in (a, b, c)]
    elems = G.elements()
    images = []
    for w in words:
        cnt: dict = {}
        for s in elems:
            x = w.act(s)
            cnt[x] = cnt.get(x, 0) + 1
        images.append(cnt)
    total = 0
    for x1, m1 in images[0].items():
        for x2, m2 in images[1].items():
            for x3, m3 in images[2].items():
                v = tensor_structure_constant(seed, x1, x2, x3)
                if v != 0:
                    total = total + m1 * m2 * m3 * v
    ghM = math.prod(GM.pointwise_stabilizer_order(w.support) for w in (a, b, c))
    ghN = math.prod(G.pointwise_stabilizer_order(w.support) for w in words)
    raw = sqrt_of_rational(Fraction(GM.order ** 3 * ghM, G.order ** 3 * ghN)) * total
    if normalized:
        return raw / eta(family, seed, M, N, a)
    return raw


def _relabel(w: FockWord, beta: Mapping[int, int], degree: int) -> FockWord:
    return FockWord.make(degree, [(beta[s], x) for s, x in w.entries])


def oligo_terms(family, seed, M: int, N: int, a, b, c):
    """Per-configuration data ``(conf, M, W, inner)`` at level N."""
    G = family.group(N)
    deg = G.degree
    words = [r.embed(deg) for r in (a, b, c)]
    Ks = [w.support for w in words]
    confs = placed_support_orbits(G, *Ks)
    if len(confs) > CONFIG_BUDGET:
        raise OrbifoldError(f"{len(confs)} configurations exceed budget {CONFIG_BUDGET}")
    out = []
    for conf in confs:
        Mv = M_factor_formula(G, conf)
        if Mv == 0:
            continue
        stab = G.order // conf.orbit_size
        W = Fraction(G.pointwise_stabilizer_order(conf.union), stab)
        inner = 0
        maps = [G.set_maps(K, K2) for K, K2 in zip(Ks, conf.sets)]
        for b1 in maps[0]:
            x1 = _relabel(words[0], b1, deg)
            for b2 in maps[1]:
                x2 = _relabel(words[1], b2, deg)
                for b3 in maps[2]:
                    v = tensor_structure_constant(seed, x1, x2, _relabel(words[2], b3, deg))
                    if v != 0:
                        inner = inner + v
        out.append((conf, Mv, W, inner))
    return out


def sc_oligo(family, seed, M: int, N: int, a, b, c, normalized: bool = True, check: bool = True):
    if check:
        check_saturated(family, seed, M, (a, b, c), N)
    GM = family.group(M)
    pre = sqrt_of_rational(GM.order ** 3 * math.prod(GM.pointwise_stabilizer_order(r.support) for r in (a, b, c)))
    raw = RadicalScalar()
    for conf, Mv, W, inner in oligo_terms(family, seed, M, N, a, b, c):
        if inner != 0:
            raw = raw + Mv * W * inner
    raw = pre * raw
    if normalized:
        return raw / eta(family, seed, M, N, a)
    return raw


METHODS = ("definition", "group_sum", "oligo")


def sc_finite(family, seed, M: int, N: int, a: FockWord, b: FockWord, c: FockWord,
              method: str = "oligo", normalized: bool = True):
    """Structure constant of the limit-basis vectors ``x_a, x_b, x_c`` (reps at level M) at level N."""
    if N < M:
        raise OrbifoldError("N must be >= M")
    if method == "definition":
        return sc_definition(family, seed, M, N, a, b, c)
    if method == "group_sum":
        return sc_group_sum(family, seed, M, N, a, b, c, normalized)
    if method == "oligo":
        return sc_oligo(family, seed, M, N, a, b, c, normalized)
    raise OrbifoldError(f"unknown method {method!r}; expected one of {METHODS}")


# ---------------------------------------------------------------- exact large-N limit (Young families)

def _young_limit_level(family: GroupFamily, M: int, sizes: Sequence[int]) -> int:
    """Level at which every growing block can host all support points."""
    need = sum(sizes)
    N = M
    while True:
        G = family.group(N)
        ok = all(len(B) >= need for B, grow in zip(G.blocks, family.growing) if grow)
        if ok:
            return N
        N += 1


def young_limit_M(G: YoungGroup, growing: Sequence[bool], conf: SupportConfiguration) -> RadicalScalar:
    """Exact ``lim_N M(conf, N)``: growing blocks contribute 1 with no triple
    overlap and 0 otherwise; fixed blocks keep their finite factor."""
    if conf.one_point:
        return RadicalScalar()
    f = math.factorial
    val = Fraction(1)
    for B, grow in zip(G.blocks, growing):
        Bs = set(B)
        ks = [len(K & Bs) for K in conf.sets]
        u = len(conf.union & Bs)
        t = len(conf.triple & Bs)
        if grow:
            if t > 0:
                return RadicalScalar()
            continue
        n = len(B)
        val *= Fraction(math.prod(f(n - k) for k in ks), f(n) * f(n - u) ** 2)
    return sqrt_of_rational(val)


def sc_limit_exact(family: GroupFamily, seed: SeedVA, M: int, a, b, c):
    """Exact ``lim_N`` of the normalized structure constant for Young families."""
    if not family.is_young:
        raise OrbifoldError("exact limits need a Young-type family")
    N = _young_limit_level(family, M, [len(r.support) for r in (a, b, c)])
    G = family.group(N)
    GM = family.group(M)
    pre = sqrt_of_rational(GM.order ** 3 * math.prod(GM.pointwise_stabilizer_order(r.support) for r in (a, b, c)))
    raw = RadicalScalar()
    for conf, _, W, inner in oligo_terms(family, seed, M, N, a, b, c):
        if inner == 0:
            continue
        Ml = young_limit_M(G, family.growing, conf)
        if Ml != 0:
            raw = raw + Ml * W * inner
    return pre * raw / eta(family, seed, M, N, a)


def representatives_at(family: GroupFamily, seed: SeedVA, M: int, n: int) -> list[FockWord]:
    return OrbifoldVA(family, seed, M).basis(n)
