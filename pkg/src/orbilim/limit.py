"""Large-N limits: convergence reports, limit Borcherds checks, factorization,
Wick correlators and free-field characters."""
from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .orbifold import (OrbifoldVA, UnsaturatedError, M_factor_formula, connect, oligo_terms, saturation,
                       sc_limit_exact, sc_oligo)
from .perm import GroupFamily, SupportConfiguration, family_diagnostics
from .scalar import RadicalScalar, sqrt_of_rational, to_float
from .seed import CutoffError, SeedVA, borcherds_check, determinant, gbinom, make_seed
from .tensor import FockWord

DEFAULT_TOLERANCE = 1e-8


class LimitError(ValueError):
    pass


class MissingEntries(LimitError):
    def __init__(self, missing: list):
        super().__init__(f"missing limit constants for {len(missing)} entries: {missing[:10]}")
        self.missing = missing


# ---------------------------------------------------------------- systems

class LimitSystem:
    """A sequence of VAs with a common labelled basis and finite-N constants."""

    name = "system"

    def basis(self, n: int) -> list: ...
    def weight(self, x) -> int: ...
    def label(self, x) -> str: ...
    def value(self, N: int, a, b, c): ...
    def exact_limit(self, a, b, c): return None
    def min_level(self, a, b, c) -> int: return 1
    def support_size(self, x) -> int: return 0 if self.weight(x) == 0 else 1

    def all_basis(self, upto: int) -> list:
        return [x for n in range(upto + 1) for x in self.basis(n)]


class SeedSequenceSystem(LimitSystem):
    """``N -> seed(N)`` on a single site, words shared across N (identity connecting maps)."""

    def __init__(self, make: Callable[[int], SeedVA], limit_seed: SeedVA | None = None, name: str = "seed_sequence"):
        self.make = make
        self.limit_seed = limit_seed
        self.name = name
        self._seeds: dict[int, SeedVA] = {}
        self.reference = limit_seed or make(1)
        self.cutoff = self.reference.cutoff

    def seed(self, N: int) -> SeedVA:
        if N not in self._seeds:
            self._seeds[N] = self.make(N)
        return self._seeds[N]

    def basis(self, n):
        return self.reference.basis(n)

    def weight(self, x):
        return self.reference.weight(x)

    def label(self, x):
        return self.reference.label(x)

    def value(self, N, a, b, c):
        return self.seed(N).structure_constant(a, b, c)

    def exact_limit(self, a, b, c):
        if self.limit_seed is None:
            return None
        return self.limit_seed.structure_constant(a, b, c)


def rescaled_virasoro_system(c=1, cutoff: int = 6) -> SeedSequenceSystem:
    return SeedSequenceSystem(lambda N: make_seed({"kind": "virasoro_rescaled", "c": c, "N": N}, cutoff),
                              make_seed({"kind": "virasoro_limit", "c": c}, cutoff),
                              name="virasoro_rescaled")


def constant_seed_system(seed: SeedVA) -> SeedSequenceSystem:
    """Trivial family: the same seed at every N."""
    return SeedSequenceSystem(lambda N: seed, seed, name=f"trivial_{seed.algebra.name}")


class OrbifoldSystem(LimitSystem):
    """Limit basis ``x_a = f_M(pi_M a)`` of a permutation-orbifold family."""

    def __init__(self, family: GroupFamily, seed: SeedVA, probe: int = 12):
        self.family = family
        self.seed = seed
        self.probe = probe
        self.cutoff = seed.cutoff
        self.name = f"{family.name}_{seed.algebra.name}"
        self._levels: dict[int, int] = {}
        self._basis: dict[int, list[FockWord]] = {}
        self._exact: dict = {}
        self._scales: dict = {}

    def level(self, n: int) -> int:
        """Saturation level of weight n (checked up to ``probe``)."""
        if n not in self._levels:
            M = saturation(self.family, self.seed, n, self.probe)
            if M is None:
                raise UnsaturatedError(f"weight {n} not saturated by N={self.probe}")
            self._levels[n] = M
        return self._levels[n]

    def basis(self, n):
        if n not in self._basis:
            M = self.level(n)
            self._basis[n] = OrbifoldVA(self.family, self.seed, M).basis(n)
        return self._basis[n]

    def weight(self, x):
        return x.weight(self.seed)

    def label(self, x):
        return x.label(self.seed)

    def support_size(self, x):
        return len(x.support)

    def min_level(self, a, b, c):
        return max(self.level(self.weight(x)) for x in (a, b, c))

    def _at(self, M: int, x: FockWord) -> FockWord:
        O = OrbifoldVA(self.family, self.seed, M)
        return O.canonical(x.embed(O.degree))

    def _scale(self, M: int, x: FockWord):
        """``f_{M_x M}(pi x) = q pi_M x`` where ``M_x`` is the level of x's weight."""
        key = (M, x)
        if key not in self._scales:
            img = connect(self.family, self.seed, self.level(self.weight(x)), M, {x: 1})
            if len(img) != 1:
                raise LimitError("connecting map left the orbit basis")
            self._scales[key] = next(iter(img.values()))
        return self._scales[key]

    def _rescale(self, M: int, a, b, c, val):
        # every basis vector lives at the saturation level of its own weight
        if val == 0:
            return val
        return val * self._scale(M, b) * self._scale(M, c) / self._scale(M, a)

    def value(self, N, a, b, c):
        M = self.min_level(a, b, c)
        if N < M:
            raise LimitError(f"level {N} below saturation level {M}")
        val = sc_oligo(self.family, self.seed, M, N, *(self._at(M, x) for x in (a, b, c)), check=False)
        return self._rescale(M, a, b, c, val)

    def exact_limit(self, a, b, c):
        if not self.family.is_young:
            return None
        key = (a, b, c)
        if key not in self._exact:
            M = self.min_level(a, b, c)
            val = sc_limit_exact(self.family, self.seed, M, *(self._at(M, x) for x in (a, b, c)))
            self._exact[key] = self._rescale(M, a, b, c, val)
        return self._exact[key]


# ---------------------------------------------------------------- convergence

def polynomial_extrapolate(points: Sequence[tuple[Fraction, Fraction]]) -> tuple[Fraction, int] | None:
    """Value at 0 of the lowest-degree polynomial through ``points`` that also
    fits every spare point (needs at least one spare)."""
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    for d in range(len(pts) - 1):
        base = pts[:d + 1]

        def lagrange(x0):
            tot = Fraction(0)
            for i, (xi, yi) in enumerate(base):
                term = yi
                for j, (xj, _) in enumerate(base):
                    if j != i:
                        term *= (x0 - xj) / (xi - xj)
                tot += term
            return tot

        if all(lagrange(x) == y for x, y in pts[d + 1:]):
            return lagrange(Fraction(0)), d
    return None


def _exact_equal(x, y) -> bool:
    return RadicalScalar.coerce(x) == RadicalScalar.coerce(y)


@dataclass
class ConvergenceReport:
    labels: tuple[str, str, str]
    samples: list[tuple[int, object, float]]
    converged: bool
    criterion: str
    limit_estimate: float
    limit_exact: object | None = None
    exact_constant: bool = False
    cauchy_gap: float = 0.0
    rate_exponent: float | None = None
    rate_prefactor: float | None = None
    fit_r2: float | None = None
    oscillating: bool = False
    cluster_values: tuple[float, ...] = ()
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        def ex(v):
            return RadicalScalar.coerce(v).to_json() if v is not None else None
        return {
            "labels": list(self.labels),
            "samples": [{"N": N, "exact": str(RadicalScalar.coerce(v)), "float": f} for N, v, f in self.samples],
            "converged": self.converged, "criterion": self.criterion,
            "limit_estimate": self.limit_estimate, "limit_exact": ex(self.limit_exact),
            "exact_constant": self.exact_constant, "cauchy_gap": self.cauchy_gap,
            "rate_exponent": self.rate_exponent, "rate_prefactor": self.rate_prefactor,
            "fit_r2": self.fit_r2, "oscillating": self.oscillating,
            "cluster_values": list(self.cluster_values), "notes": self.notes,
        }


def fit_rate(samples: Sequence[tuple[int, float]], limit: float) -> tuple[float, float, float] | None:
    """Least squares of ``log|C - limit|`` on ``log N``; returns ``(p, A, r^2)``
    for ``|C - limit| ~ A N^-p``.  Uses the largest decade of N available."""
    pts = [(N, abs(v - limit)) for N, v in samples if abs(v - limit) > 0]
    if len(pts) < 2:
        return None
    top = pts[-1][0]
    window = [(N, d) for N, d in pts if N * 10 >= top]
    if len(window) < 3:
        window = pts
    xs = [math.log(N) for N, _ in window]
    ys = [math.log(d) for _, d in window]
    if len(set(xs)) < 2:
        return None
    slope, intercept = statistics.linear_regression(xs, ys)
    if len(xs) > 2 and statistics.pvariance(ys) > 0:
        r2 = statistics.correlation(xs, ys) ** 2
    else:
        r2 = 1.0
    return -slope, math.exp(intercept), r2


def convergence_report(labels, samples: Sequence[tuple[int, object]], tolerance: float = DEFAULT_TOLERANCE,
                       exact_limit=None, tail: int | None = None) -> ConvergenceReport:
    samples = sorted(samples, key=lambda s: s[0])
    Ns = [N for N, _ in samples]
    if len(set(Ns)) != len(Ns):
        raise LimitError("sample levels must be distinct")
    if not samples:
        raise LimitError("no samples")
    floats = [(N, to_float(v)) for N, v in samples]
    tail = tail or max(2, len(samples) // 2)
    tail_vals = samples[-tail:]
    tail_f = [f for _, f in floats[-tail:]]
    gap = max(tail_f) - min(tail_f)
    constant = all(_exact_equal(v, tail_vals[-1][1]) for _, v in tail_vals)
    rep = ConvergenceReport(tuple(labels), [(N, v, f) for (N, v), (_, f) in zip(samples, floats)],
                            False, "none", floats[-1][1], cauchy_gap=gap)
    if exact_limit is not None:
        rep.limit_exact = exact_limit
        rep.limit_estimate = to_float(exact_limit)
    if constant:
        rep.exact_constant = True
        rep.converged = True
        rep.criterion = "exact_tail_constant"
        if exact_limit is None:
            rep.limit_exact = tail_vals[-1][1]
            rep.limit_estimate = floats[-1][1]
        elif not _exact_equal(exact_limit, tail_vals[-1][1]):
            rep.notes.append("tail constant but differs from supplied exact limit")
        rep.notes.append("rate undefined: exact tail")
        return rep
    if gap < tolerance:
        rep.converged = True
        rep.criterion = "cauchy"
    elif exact_limit is not None:
        # monotone approach towards the exact limit certifies convergence
        diffs = [abs(f - rep.limit_estimate) for _, f in floats]
        if all(d2 <= d1 for d1, d2 in zip(diffs, diffs[1:])) and diffs[-1] < diffs[0]:
            rep.converged = True
            rep.criterion = "exact_limit_monotone"
    else:
        # bounded oscillation between two cluster values
        evens = tail_f[::2]
        odds = tail_f[1::2]
        if evens and odds and max(evens) - min(evens) < tolerance and max(odds) - min(odds) < tolerance:
            rep.oscillating = True
            rep.cluster_values = (evens[-1], odds[-1])
    fit = fit_rate(floats, rep.limit_estimate)
    if fit is not None:
        rep.rate_exponent, rep.rate_prefactor, rep.fit_r2 = fit
    return rep


def limit_structure_constant(system: LimitSystem, a, b, c, N_range: Iterable[int],
                             tolerance: float = DEFAULT_TOLERANCE) -> ConvergenceReport:
    lo = system.min_level(a, b, c)
    Ns = sorted(N for N in N_range if N >= lo)
    if not Ns:
        raise LimitError(f"no level in range at or above saturation level {lo}")
    samples = [(N, system.value(N, a, b, c)) for N in Ns]
    rep = convergence_report(tuple(system.label(x) for x in (a, b, c)), samples, tolerance,
                             system.exact_limit(a, b, c))
    if isinstance(system, OrbifoldSystem):
        at = [system._at(lo, x) for x in (a, b, c)]
        vanishing = sum(1 for conf, *_ in oligo_terms(system.family, system.seed, lo, Ns[-1], *at) if conf.triple)
        rep.notes.append(f"configurations with triple overlap at N={Ns[-1]}: {vanishing}")
    return rep


def extrapolate_exact(system: SeedSequenceSystem, a, b, c, roots: Sequence[int] = (1, 2, 3, 4, 5, 6, 7, 8)):
    """Exact limit from perfect-square levels ``N = s^2``: the constants are
    polynomials in ``1/s``; interpolate and evaluate at 0."""
    pts = []
    for s in roots:
        v = RadicalScalar.coerce(system.value(s * s, a, b, c))
        if not v.is_rational():
            raise LimitError("expected rational values at perfect-square levels")
        pts.append((Fraction(1, s), v.to_fraction()))
    res = polynomial_extrapolate(pts)
    if res is None:
        raise LimitError("no polynomial fit with a spare point")
    return res


# ---------------------------------------------------------------- limit tables and Borcherds

class LimitTable:
    """Insert-once table of limit constants usable as a VA by :func:`borcherds_check`."""

    def __init__(self, system: LimitSystem, cutoff: int, entries: Mapping | None = None, compute: bool = True):
        self.system = system
        self.cutoff = cutoff
        self.entries: dict = dict(entries or {})
        self.compute = compute

    def weight(self, x):
        return self.system.weight(x)

    def basis(self, n):
        if n < 0:
            return []
        if n > self.cutoff:
            raise CutoffError(f"weight {n} above cutoff {self.cutoff}")
        return self.system.basis(n)

    def get(self, a, b, c):
        key = (a, b, c)
        if key not in self.entries:
            if not self.compute:
                raise MissingEntries([tuple(self.system.label(x) for x in key)])
            v = self.system.exact_limit(a, b, c)
            if v is None:
                raise LimitError("system provides no exact limit")
            self.entries.setdefault(key, v)
        return self.entries[key]

    def expand(self, b, k, c):
        n = self.weight(b) + self.weight(c) - k - 1
        if n < 0:
            return {}
        out = {}
        missing = []
        for a in self.basis(n):
            try:
                v = self.get(a, b, c)
            except MissingEntries as err:
                missing.extend(err.missing)
                continue
            if v != 0:
                out[a] = v
        if missing:
            raise MissingEntries(missing)
        return out


@dataclass
class BorcherdsResult:
    residual: object
    residual_float: float
    exact_zero: bool


def limit_borcherds_check(table: LimitTable, e, a, b, c, k: int, m: int, n: int) -> BorcherdsResult:
    r = borcherds_check(table, e, a, b, c, k, m, n)
    r = RadicalScalar.coerce(r)
    return BorcherdsResult(r, to_float(r), r.is_zero())


# ---------------------------------------------------------------- factorization

def commutator_from_B(wa: int, wb: int, B, n: int, m: int):
    """Coefficient of the identity in ``[a_n, b_m]`` for factorizing generators."""
    if wa < 1 or wb < 1:
        raise LimitError("weights must be >= 1")
    if n - wa + 1 != -m + wb - 1:
        return 0
    return B * gbinom(n, wa + wb - 1)


def fk_commutator(k: int, n: int, m: int):
    return commutator_from_B(k, k, 1, n, m)


def single_trace_generators(system: OrbifoldSystem, max_weight: int) -> list[FockWord]:
    return [x for n in range(1, max_weight + 1) for x in system.basis(n) if len(x.support) == 1]


@dataclass
class SingleTraceSplit:
    v: FockWord
    u: FockWord
    w: FockWord
    coefficient: object
    residual: dict

    def residual_supports(self) -> set[int]:
        return {len(x.support) for x in self.residual}


def single_trace_split(system: OrbifoldSystem, table: "LimitTable", v: FockWord) -> SingleTraceSplit:
    """Write ``u_(-1) w = lambda v + r`` with ``u`` the entry of v at its first
    site and ``w`` the rest (symmetric groups only, where sites may be relabelled)."""
    d = v.as_dict()
    if len(d) < 2:
        raise LimitError("needs support size >= 2")
    seed = system.seed
    first = min(d)
    rest = [d[i] for i in sorted(d) if i != first]

    def rep(entries):
        n = sum(seed.weight(x) for x in entries)
        M = system.level(n)
        G = system.family.group(M)
        if G.order != math.factorial(G.degree):
            raise LimitError("single-trace split needs the full symmetric group")
        return system._at(M, FockWord.make(M, {i + 1: x for i, x in enumerate(entries)}))

    u, w = rep([d[first]]), rep(rest)
    out = table.expand(u, -1, w)
    lam = out.pop(v, 0)
    return SingleTraceSplit(v, u, w, lam, out)


@dataclass
class FactorizationVerdict:
    factorizes: bool
    checked: int
    max_abs: float
    witnesses: list[dict]
    orbit_diagnostic: dict

    def to_json(self) -> dict:
        return {"factorizes": self.factorizes, "checked": self.checked, "max_abs": self.max_abs,
                "witnesses": self.witnesses, "orbit_diagnostic": self.orbit_diagnostic}


def factorization_check(system: LimitSystem, generators: Sequence, N_range: Iterable[int] = (),
                        tolerance: float = DEFAULT_TOLERANCE, max_witnesses: int = 5) -> FactorizationVerdict:
    """Checks that ``C_{w, u, v}`` at mode ``k >= 0`` vanishes in the limit for
    all generator pairs and nonvacuum basis ``w``; i.e. only the identity
    survives in generator commutators."""
    N_range = sorted(N_range)
    witnesses = []
    checked = 0
    max_abs = 0.0
    for u, v in itertools.product(generators, repeat=2):
        wu, wv = system.weight(u), system.weight(v)
        for ww in range(1, wu + wv):
            for w in system.basis(ww):
                val = system.exact_limit(w, u, v)
                if val is None:
                    rep = limit_structure_constant(system, w, u, v, N_range, tolerance)
                    fval = rep.limit_estimate
                else:
                    fval = to_float(val)
                checked += 1
                max_abs = max(max_abs, abs(fval))
                if abs(fval) >= tolerance and len(witnesses) < max_witnesses:
                    wit = {"w": system.label(w), "u": system.label(u), "v": system.label(v),
                           "k": wu + wv - ww - 1, "limit": fval}
                    if val is not None:
                        wit["limit_exact"] = str(RadicalScalar.coerce(val))
                    if isinstance(system, OrbifoldSystem):
                        wit.update(_triple_overlap_witness(system, w, u, v, N_range))
                    witnesses.append(wit)
    diag = {}
    if isinstance(system, OrbifoldSystem):
        fam = system.family
        Ns = N_range or list(range(max(fam.start, 2), 9))
        supports = sorted({frozenset(x.support) for x in generators}, key=sorted)
        diag["orbit_lengths"] = {}
        finite = False
        for K in supports:
            d = family_diagnostics(fam, K, 0, Ns)
            diag["orbit_lengths"][",".join(map(str, sorted(K)))] = d["orbit_lengths"]
            finite = finite or d["finite_orbit_flag"]
        diag["finite_orbit"] = finite
        diag["no_finite_orbits"] = not finite
    else:
        diag["note"] = "no permutation action"
    return FactorizationVerdict(not witnesses, checked, max_abs, witnesses, diag)


def _triple_overlap_witness(system: OrbifoldSystem, w, u, v, N_range) -> dict:
    """A contributing configuration with nonempty triple overlap and its M across N."""
    M = system.min_level(w, u, v)
    Ns = [N for N in N_range if N >= M] or [M, M + 1, M + 2]
    at = [system._at(M, x) for x in (w, u, v)]
    for conf, Mv, W, inner in oligo_terms(system.family, system.seed, M, Ns[-1], *at):
        if conf.triple and inner != 0:
            Ms = []
            for N in Ns:
                G = system.family.group(N)
                Ms.append(M_factor_formula(G, SupportConfiguration(*conf.sets)))
            return {"K_t": sorted(conf.triple), "configuration": [sorted(s) for s in conf.sets],
                    "M_values": {N: str(m) for N, m in zip(Ns, Ms)},
                    "M_constant": all(m == Ms[0] for m in Ms)}
    return {}


# ---------------------------------------------------------------- Wick

def perfect_matchings(items: Sequence[int]) -> list[list[tuple[int, int]]]:
    items = list(items)
    if not items:
        return [[]]
    if len(items) % 2:
        return []
    first, rest = items[0], items[1:]
    out = []
    for i, x in enumerate(rest):
        for m in perfect_matchings(rest[:i] + rest[i + 1:]):
            out.append([(first, x)] + m)
    return out


@dataclass
class PairingSum:
    """``sum_pairings prod B(a_i, a_j) / (z_i - z_j)^(h_i + h_j)``."""

    weights: tuple[int, ...]
    B: tuple[tuple, ...]
    pairings: list[list[tuple[int, int]]]

    def __len__(self) -> int:
        return len(self.pairings)

    def evaluate(self, zs: Sequence) -> Fraction:
        tot = 0
        for p in self.pairings:
            term = 1
            for i, j in p:
                term = term * self.B[i][j] / (Fraction(zs[i]) - Fraction(zs[j])) ** (self.weights[i] + self.weights[j])
            tot = tot + term
        return tot

    def coefficient(self, exponents: Sequence[int]):
        """Coefficient of ``prod z_i^e_i`` expanded in ``|z_1| > |z_2| > ...``."""
        tot = 0
        for p in self.pairings:
            term = 1
            for i, j in p:
                h = self.weights[i] + self.weights[j]
                q = exponents[j]
                if q < 0 or exponents[i] != -h - q:
                    term = 0
                    break
                term = term * self.B[i][j] * math.comb(h + q - 1, q)
            tot = tot + term
        return tot

    def latex(self) -> str:
        if not self.pairings:
            return "0"
        parts = []
        for p in self.pairings:
            fac = []
            for i, j in p:
                h = self.weights[i] + self.weights[j]
                fac.append(f"\\frac{{{self.B[i][j]}}}{{(z_{{{i + 1}}}-z_{{{j + 1}}})^{{{h}}}}}")
            parts.append(" ".join(fac))
        return " + ".join(parts)


def wick_correlator(weights: Sequence[int], B: Sequence[Sequence]) -> PairingSum:
    weights = tuple(int(w) for w in weights)
    n = len(weights)
    Bt = tuple(tuple(row) for row in B)
    if len(Bt) != n or any(len(r) != n for r in Bt):
        raise LimitError("B must be an n x n matrix")
    for i, j in itertools.combinations(range(n), 2):
        if weights[i] == weights[j] and Bt[i][j] != Bt[j][i]:
            raise LimitError("B must be symmetric on equal weights")
    return PairingSum(weights, Bt, perfect_matchings(range(n)) if n % 2 == 0 else [])


def mode_correlator(seed: SeedVA, modes: Sequence[tuple[int, int]]):
    """``<0| x_(m1) ... x_(mr) |0>`` by normal ordering."""
    return seed.apply_modes(list(modes)).get((), 0)


def _mode_tuples(n: int, order: int):
    """Integer n-tuples with zero sum and sum of absolute values <= order."""
    def rec(prefix, used, total):
        if len(prefix) == n - 1:
            last = -total
            if used + abs(last) <= order:
                yield prefix + (last,)
            return
        left = order - used
        for m in range(-left, left + 1):
            yield from rec(prefix + (m,), used + abs(m), total + m)
    if n == 0:
        yield ()
        return
    yield from rec((), 0, 0)


def wick_vs_modes(n_points: int, order: int = 8) -> tuple[int, int]:
    """Compare Heisenberg correlators coefficientwise; returns (checked, mismatches).

    ``<0| a_(m1) ... a_(mn) |0>`` is the coefficient of ``prod z_i^(-m_i - 1)``
    in the pairing sum expanded for ``|z_1| > ... > |z_n|``.
    """
    seed = make_seed("heisenberg", 0)
    ps = wick_correlator([1] * n_points, [[1] * n_points] * n_points)
    checked = bad = 0
    for ms in _mode_tuples(n_points, order):
        direct = mode_correlator(seed, [(0, m) for m in ms])
        wick = ps.coefficient([-m - 1 for m in ms])
        checked += 1
        if direct != wick:
            bad += 1
    return checked, bad


# ---------------------------------------------------------------- F^k data

def fk_character(k: int, order: int) -> list[int]:
    """Coefficients of ``prod_{n >= k} 1/(1 - q^n)`` up to ``q^order``."""
    if k < 1 or order < 0:
        raise LimitError("need k >= 1 and order >= 0")
    coeffs = [1] + [0] * order
    for part in range(k, order + 1):
        for j in range(part, order + 1):
            coeffs[j] += coeffs[j - part]
    return coeffs


def character_product(mults: Mapping[int, int], order: int) -> list[int]:
    out = [1] + [0] * order
    for k, Nk in mults.items():
        for _ in range(Nk):
            z = fk_character(k, order)
            out = [sum(out[i] * z[j - i] for i in range(j + 1)) for j in range(order + 1)]
    return out


@dataclass
class Decomposition:
    multiplicities: dict[int, int]
    certificate: bool
    character: list[int]
    gram_checks: dict[int, dict]

    def to_json(self) -> dict:
        return {"multiplicities": {str(k): v for k, v in self.multiplicities.items()},
                "certificate": self.certificate, "character": self.character,
                "gram_checks": {str(k): v for k, v in self.gram_checks.items()}}


class DegenerateB(LimitError):
    pass


def _positive_definite(mat) -> bool:
    return all(determinant([row[:i] for row in mat[:i]]) > 0 for i in range(1, len(mat) + 1))


def free_decomposition(dims: Sequence[int], generator_gram: Mapping[int, Sequence[Sequence]] | None = None) -> Decomposition:
    """Multiplicities ``N_k`` with ``prod_k Z_k^{N_k}`` matching ``dims``.

    ``N_n`` is the part of weight n not generated by lower generators.
    ``generator_gram`` gives B on the new quasiprimaries per weight; it must
    be nondegenerate (indefinite blocks are reported).
    """
    dims = list(dims)
    if not dims or dims[0] != 1:
        raise LimitError("dims must start with dim V_0 = 1")
    order = len(dims) - 1
    mults: dict[int, int] = {}
    for n in range(1, order + 1):
        generated = character_product(mults, order)
        extra = dims[n] - generated[n]
        if extra < 0:
            raise LimitError(f"weight {n}: dims smaller than the free algebra on lower generators")
        if extra:
            mults[n] = extra
    checks = {}
    for n, Nn in mults.items():
        if generator_gram is None or n not in generator_gram:
            checks[n] = {"status": "unchecked"}
            continue
        gram = [[Fraction(x) for x in row] for row in generator_gram[n]]
        if len(gram) != Nn:
            raise LimitError(f"weight {n}: gram size {len(gram)} != multiplicity {Nn}")
        det = determinant(gram)
        if det == 0:
            raise DegenerateB(f"weight {n}: B degenerate on new generators")
        pos = _positive_definite(gram)
        checks[n] = {"status": "ok" if pos else "indefinite", "det": str(det)}
        if pos and Nn == 1:
            checks[n]["normalization"] = str(sqrt_of_rational(gram[0][0]).inverse())
    char = character_product(mults, order)
    return Decomposition(mults, char == dims, char, checks)


def seed_generator_gram(seed: SeedVA, n: int) -> list[list]:
    """B on the quasiprimaries of weight n of a seed (rational seeds)."""
    qps = seed.quasiprimaries(n)
    gram = []
    for u in qps:
        row = []
        for v in qps:
            tot = 0
            for wu, cu in u.items():
                for wv, cv in v.items():
                    tot = tot + cu * cv * seed.bilinear_B(wu, wv)
            row.append(tot)
        gram.append(row)
    return gram
