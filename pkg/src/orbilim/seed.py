"""Seed vertex algebras built from generator mode algebras.

Conventions: ``Y(a, z) = sum_n a_(n) z^(-n-1)``.  A mode is a pair
``(generator, n)`` meaning ``x_(n)``; it annihilates the vacuum for ``n >= 0``
and has weight ``wt x - n - 1``.  Basis states are PBW words of creation
modes (``n <= -1``) sorted by (mode weight descending, generator).  Vectors are
dicts ``word -> coefficient``.

Modes of composite states are obtained from generator modes through the
iterate formula

    (x_(n) b)_(k) = sum_j (-1)^j C(n, j) [x_(n-j) b_(k+j) - (-1)^n b_(n+k-j) x_(j)]

so the generator commutators are the only input.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .scalar import RadicalScalar, parse_rational

Mode = tuple[int, int]
Word = tuple[Mode, ...]
Vector = dict
Scalar = "Fraction | RadicalScalar"

VACUUM: Word = ()


class SeedError(ValueError):
    pass


class CutoffError(SeedError):
    """A computation needs states above the weight cutoff."""


# ---------------------------------------------------------------- helpers

def gbinom(n: int, j: int) -> int:
    """Binomial coefficient valid for negative upper argument."""
    if j < 0:
        return 0
    num = 1
    den = 1
    for i in range(j):
        num *= n - i
        den *= i + 1
    return num // den


def add_into(acc: dict, vec: Mapping, scale=1) -> None:
    for w, c in vec.items():
        v = acc.get(w, 0) + scale * c
        if v == 0:
            acc.pop(w, None)
        else:
            acc[w] = v


def scale_vector(vec: Mapping, s) -> dict:
    if s == 0:
        return {}
    return {w: s * c for w, c in vec.items()}


def as_fraction(x) -> Fraction:
    if isinstance(x, RadicalScalar):
        return x.to_fraction()
    return Fraction(x)


def nullspace(matrix: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of the right kernel of a rational matrix (reduced echelon form)."""
    rows = [[Fraction(x) for x in r] for r in matrix]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] / m[col][col]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return det


# ---------------------------------------------------------------- mode algebras

@dataclass(frozen=True)
class Generator:
    name: str
    weight: int


Bracket = Callable[[Mode, Mode], tuple[list[tuple[Mode, object]], object]]


@dataclass
class ModeAlgebra:
    """Generators with a commutator rule ``[x_(m), y_(n)] = sum c_i z_(p_i) + central``.

    ``bracket`` returns the generator-mode terms and the coefficient of the
    identity.  ``rational`` records whether all coefficients are rational.
    """

    name: str
    generators: tuple[Generator, ...]
    bracket: Bracket
    rational: bool = True

    def weight(self, g: int) -> int:
        return self.generators[g].weight

    def mode_weight(self, mode: Mode) -> int:
        g, n = mode
        return self.generators[g].weight - n - 1

    def key(self, mode: Mode) -> tuple[int, int]:
        return (-self.mode_weight(mode), mode[0])

    def sl2_image(self, j: int, mode: Mode) -> tuple[Mode, int]:
        """``[L(j), x_(n)] = ((h-1)(j+1) - n) x_(n+j)`` for quasiprimary generators."""
        g, n = mode
        h = self.generators[g].weight
        return (g, n + j), (h - 1) * (j + 1) - n


def heisenberg_algebra(rank: int = 1) -> ModeAlgebra:
    gens = tuple(Generator("a" if rank == 1 else f"a{i + 1}", 1) for i in range(rank))

    def bracket(x: Mode, y: Mode):
        if x[0] == y[0] and x[1] + y[1] == 0:
            return [], Fraction(x[1])
        return [], 0

    return ModeAlgebra("heisenberg", gens, bracket)


def virasoro_algebra(c: Fraction, structure=Fraction(1), name: str = "virasoro") -> ModeAlgebra:
    """``[w_(m), w_(n)] = s (m-n) w_(m+n-1) + (c/12)((m-1)^3 - (m-1)) delta_{m+n,2}``
    with ``w_(n) = L_(n-1)`` and structure scale ``s``."""
    c = Fraction(c)
    rational = not isinstance(structure, RadicalScalar) or structure.is_rational()

    def bracket(x: Mode, y: Mode):
        m, n = x[1], y[1]
        terms = []
        if structure != 0 and m != n:
            terms.append(((0, m + n - 1), structure * (m - n)))
        central = c / 12 * ((m - 1) ** 3 - (m - 1)) if m + n == 2 else 0
        return terms, central

    return ModeAlgebra(name, (Generator("w", 2),), bracket, rational=rational)


def free_field_algebra(k: int, norm: Fraction = Fraction(1)) -> ModeAlgebra:
    """One weight-k generator with ``[v_(n), v_(m)] = B C(n, 2k-1) delta_{n-k+1, -m+k-1}``."""
    if k < 1:
        raise SeedError("free field weight must be >= 1")
    norm = Fraction(norm)

    def bracket(x: Mode, y: Mode):
        n, m = x[1], y[1]
        if n - k + 1 == -m + k - 1:
            return [], norm * gbinom(n, 2 * k - 1)
        return [], 0

    return ModeAlgebra(f"free_field_{k}", (Generator("v", k),), bracket)


# ---------------------------------------------------------------- seed VA

class SeedVA:
    """Vacuum module of a mode algebra, truncated at weight ``cutoff``."""

    def __init__(self, algebra: ModeAlgebra, cutoff: int, spec: Mapping | None = None):
        if cutoff < 0:
            raise SeedError("cutoff must be >= 0")
        self.algebra = algebra
        self.cutoff = int(cutoff)
        self.spec = dict(spec or {"kind": algebra.name})
        self._basis: dict[int, list[Word]] = {}
        self._apply_cache: dict = {}
        self._state_cache: dict = {}
        self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"<SeedVA {self.algebra.name} cutoff={self.cutoff}>"

    vacuum = VACUUM

    @property
    def rational(self) -> bool:
        return self.algebra.rational

    # ---- basis
    def weight(self, word: Word) -> int:
        return sum(self.algebra.mode_weight(m) for m in word)

    def basis(self, n: int) -> list[Word]:
        if n < 0:
            return []
        if n > self.cutoff:
            raise CutoffError(f"weight {n} above cutoff {self.cutoff}")
        with self._lock:
            if n not in self._basis:
                self._basis[n] = self._enumerate(n)
            return self._basis[n]

    def _enumerate(self, n: int) -> list[Word]:
        alg = self.algebra
        modes = []
        for g, gen in enumerate(alg.generators):
            p = -1
            while gen.weight - p - 1 <= n:
                modes.append((g, p))
                p -= 1
        modes.sort(key=alg.key)
        out = []

        def rec(start: int, remaining: int, acc: tuple):
            if remaining == 0:
                out.append(acc)
                return
            for i in range(start, len(modes)):
                w = alg.mode_weight(modes[i])
                if w <= remaining:
                    rec(i, remaining - w, acc + (modes[i],))

        rec(0, n, ())
        return sorted(out, key=lambda w: [alg.key(m) for m in w])

    def dims(self, upto: int | None = None) -> list[int]:
        upto = self.cutoff if upto is None else upto
        return [len(self.basis(n)) for n in range(upto + 1)]

    def all_basis(self, upto: int | None = None) -> list[Word]:
        upto = self.cutoff if upto is None else upto
        return [w for n in range(upto + 1) for w in self.basis(n)]

    def generator_state(self, g: int = 0) -> Word:
        return ((g, -1),)

    # ---- labels
    def label(self, word: Word) -> str:
        if not word:
            return "|0>"
        return "".join(f"{self.algebra.generators[g].name}({n})" for g, n in word)

    _LABEL_RE = re.compile(r"([A-Za-z]\w*?)\((-?\d+)\)")

    def parse(self, text: str) -> Word:
        text = text.replace(" ", "")
        if text in ("|0>", "", "vac", "1"):
            return VACUUM
        names = {gen.name: i for i, gen in enumerate(self.algebra.generators)}
        modes = []
        pos = 0
        for m in self._LABEL_RE.finditer(text):
            if m.start() != pos or m.group(1) not in names:
                raise SeedError(f"cannot parse state label {text!r}")
            modes.append((names[m.group(1)], int(m.group(2))))
            pos = m.end()
        if pos != len(text) or not modes:
            raise SeedError(f"cannot parse state label {text!r}")
        vec = self.apply_modes(modes)
        if len(vec) != 1 or next(iter(vec.values())) != 1:
            raise SeedError(f"label {text!r} is not a basis word")
        return next(iter(vec))

    # ---- generator modes
    def apply_mode(self, mode: Mode, word: Word) -> dict:
        key = (mode, word)
        hit = self._apply_cache.get(key)
        if hit is None:
            hit = self._apply(mode, word)
            self._apply_cache[key] = hit
        return hit

    def _apply(self, mode: Mode, word: Word) -> dict:
        alg = self.algebra
        if not word:
            return {} if mode[1] >= 0 else {(mode,): 1}
        first, rest = word[0], word[1:]
        if mode[1] < 0 and alg.key(mode) <= alg.key(first):
            return {(mode,) + word: 1}
        out: dict = {}
        for w, c in self.apply_mode(mode, rest).items():
            add_into(out, self.apply_mode(first, w), c)
        terms, central = alg.bracket(mode, first)
        for m3, c3 in terms:
            add_into(out, self.apply_mode(m3, rest), c3)
        if central != 0:
            add_into(out, {rest: central})
        return out

    def mode_on_vector(self, mode: Mode, vec: Mapping) -> dict:
        out: dict = {}
        for w, c in vec.items():
            add_into(out, self.apply_mode(mode, w), c)
        return out

    def apply_modes(self, modes: Sequence[Mode], vec: Mapping | None = None) -> dict:
        """Apply ``modes[0] modes[1] ... modes[-1]`` (rightmost first) to ``vec``."""
        out = dict(vec) if vec is not None else {VACUUM: 1}
        for m in reversed(modes):
            out = self.mode_on_vector(m, out)
        return out

    # ---- composite modes
    def state_mode(self, b: Word, k: int, w: Word) -> dict:
        """``b_(k) w`` for basis words ``b`` and ``w`` (no cutoff check)."""
        if self.weight(b) + self.weight(w) - k - 1 < 0:
            return {}
        key = (b, k, w)
        hit = self._state_cache.get(key)
        if hit is None:
            hit = self._state_mode(b, k, w)
            self._state_cache[key] = hit
        return hit

    def _state_mode(self, b: Word, k: int, w: Word) -> dict:
        if not b:
            return {w: 1} if k == -1 else {}
        x, rest = b[0], b[1:]
        g, n = x
        if not rest and n == -1:
            return self.apply_mode((g, k), w)
        wx = self.algebra.weight(g)
        wr, ww = self.weight(rest), self.weight(w)
        out: dict = {}
        for j in range(0, wr + ww - k):
            coef = (-1) ** j * gbinom(n, j)
            if coef:
                inner = self.state_vector_mode(rest, k + j, {w: 1})
                add_into(out, self.mode_on_vector((g, n - j), inner), coef)
        sign = -1 if n % 2 == 0 else 1
        for j in range(0, wx + ww):
            coef = (-1) ** j * gbinom(n, j)
            if coef:
                inner = self.apply_mode((g, j), w)
                add_into(out, self.state_vector_mode(rest, n + k - j, inner), sign * coef)
        return out

    def state_vector_mode(self, b: Word, k: int, vec: Mapping) -> dict:
        out: dict = {}
        for w, c in vec.items():
            add_into(out, self.state_mode(b, k, w), c)
        return out

    def apply_word_mode(self, b: Word, k: int, c: Word, strict: bool = True) -> dict:
        """``b_(k) c`` expanded in the basis."""
        target = self.weight(b) + self.weight(c) - k - 1
        if strict and max(self.weight(b), self.weight(c), target) > self.cutoff:
            raise CutoffError(f"b_({k}) c has weight {target}; cutoff {self.cutoff}")
        if target < 0:
            return {}
        return self.state_mode(b, k, c)

    expand = apply_word_mode

    def structure_constant(self, a: Word, b: Word, c: Word):
        k = self.weight(b) + self.weight(c) - self.weight(a) - 1
        return self.apply_word_mode(b, k, c).get(a, 0)

    def bilinear_B(self, a: Word, b: Word):
        k = self.weight(a) + self.weight(b) - 1
        return self.apply_word_mode(a, k, b).get(VACUUM, 0)

    # ---- sl(2)
    def L(self, j: int, vec: Mapping) -> dict:
        if j not in (-1, 0, 1):
            raise SeedError("only L(-1), L(0), L(1) are available")
        out: dict = {}
        for word, c in vec.items():
            for i, mode in enumerate(word):
                new, coef = self.algebra.sl2_image(j, mode)
                if coef == 0:
                    continue
                modes = word[:i] + (new,) + word[i + 1:]
                add_into(out, self.apply_modes(modes), c * coef)
        return out

    def quasiprimaries(self, n: int) -> list[dict]:
        """Basis of ``ker L(1)`` in weight ``n`` (rational seeds only)."""
        if not self.rational:
            raise SeedError("quasiprimary computation needs a rational seed")
        src = self.basis(n)
        if n == 0:
            return [{VACUUM: Fraction(1)}]
        tgt = self.basis(n - 1)
        idx = {w: i for i, w in enumerate(tgt)}
        mat = [[Fraction(0)] * len(src) for _ in tgt]
        for col, w in enumerate(src):
            for w2, c in self.L(1, {w: 1}).items():
                mat[idx[w2]][col] = as_fraction(c)
        out = []
        for vec in nullspace(mat, len(src)):
            out.append({w: c for w, c in zip(src, vec) if c != 0})
        return out


# ---------------------------------------------------------------- construction

SEED_KINDS = ("heisenberg", "virasoro", "virasoro_rescaled", "virasoro_limit", "free_field")


def make_seed(spec: Mapping | str, cutoff: int | None = None) -> SeedVA:
    """Build a seed from ``{"kind": ..., "c": ..., "N": ..., "k": ..., "cutoff": ...}``."""
    if isinstance(spec, str):
        spec = {"kind": spec}
    spec = dict(spec)
    kind = spec.get("kind")
    if cutoff is None:
        cutoff = spec.get("cutoff", 6)
    cutoff = int(cutoff)
    if kind == "heisenberg":
        alg = heisenberg_algebra(int(spec.get("rank", 1)))
    elif kind == "virasoro":
        alg = virasoro_algebra(parse_rational(spec.get("c", 0)))
    elif kind == "virasoro_rescaled":
        N = int(spec["N"])
        if N < 1:
            raise SeedError("rescaled Virasoro needs N >= 1")
        alg = virasoro_algebra(parse_rational(spec.get("c", 1)), RadicalScalar.sqrt(N).inverse(),
                               name="virasoro_rescaled")
    elif kind == "virasoro_limit":
        alg = virasoro_algebra(parse_rational(spec.get("c", 1)), Fraction(0), name="virasoro_limit")
    elif kind == "free_field":
        alg = free_field_algebra(int(spec.get("k", 1)), parse_rational(spec.get("B", 1)))
    else:
        raise SeedError(f"unsupported seed kind {kind!r}; expected one of {SEED_KINDS}")
    spec["cutoff"] = cutoff
    return SeedVA(alg, cutoff, spec)


# ---------------------------------------------------------------- Borcherds identity

def borcherds_residual(V, a, b, c, k: int, m: int, n: int) -> dict:
    """Residual vector (LHS - RHS) of the Borcherds identity

    ``sum_j C(m,j) (a_(n+j) b)_(m+k-j) c
      = sum_j (-1)^j C(n,j) [a_(m+n-j) b_(k+j) c - (-1)^n b_(n+k-j) a_(m+j) c]``

    with every composite product expanded through intermediate basis vectors
    d.  ``V`` needs ``weight``, ``expand`` and ``cutoff``.  Raises
    :class:`CutoffError` if some contributing d lies above the cutoff.
    """
    wa, wb, wc = V.weight(a), V.weight(b), V.weight(c)
    if wa + wb + wc - m - n - k - 2 < 0:
        return {}
    needed = max(wa + wb - n - 1, wb + wc - k - 1, wa + wc - m - 1)
    if needed > V.cutoff:
        raise CutoffError(f"intermediate weight {needed} above cutoff {V.cutoff}")
    out: dict = {}

    def through(x, p, y, z, q, scale):
        # sum_d [x_(p) y]_d  d_(q) z
        for d, cd in V.expand(x, p, y).items():
            add_into(out, V.expand(d, q, z), scale * cd)

    def outer(x, p, y, z, q, scale):
        # sum_d [y_(p) z]_d  x_(q) d
        for d, cd in V.expand(y, p, z).items():
            add_into(out, V.expand(x, q, d), scale * cd)

    for j in range(0, wa + wb - n):
        co = gbinom(m, j)
        if co:
            through(a, n + j, b, c, m + k - j, co)
    for j in range(0, wb + wc - k):
        co = (-1) ** j * gbinom(n, j)
        if co:
            outer(a, k + j, b, c, m + n - j, -co)
    sign = -1 if n % 2 else 1
    for j in range(0, wa + wc - m):
        co = (-1) ** j * gbinom(n, j)
        if co:
            outer(b, m + j, a, c, n + k - j, sign * co)
    return out


def borcherds_check(V, e, a, b, c, k: int, m: int, n: int):
    """Coefficient of ``e`` in :func:`borcherds_residual` (0 if the grading forbids e)."""
    if V.weight(e) != V.weight(a) + V.weight(b) + V.weight(c) - m - n - k - 2:
        return 0
    return borcherds_residual(V, a, b, c, k, m, n).get(e, 0)


def borcherds_windows(V, a, b, c, window: Iterable[int]) -> list[tuple[int, int, int]]:
    """(k, m, n) with m, n in ``window`` and k such that the output weight is
    within the cutoff and every intermediate weight too."""
    wa, wb, wc = V.weight(a), V.weight(b), V.weight(c)
    window = list(window)
    out = []
    for m in window:
        for n in window:
            for we in range(0, V.cutoff + 1):
                k = wa + wb + wc - m - n - 2 - we
                if max(wa + wb - n - 1, wb + wc - k - 1, wa + wc - m - 1) <= V.cutoff:
                    out.append((k, m, n))
    return out


def admissible_indices(V, e, a, b, c, window: Iterable[int]) -> list[tuple[int, int, int]]:
    """(k, m, n) with m, n in ``window``, k forced by grading and every
    intermediate weight within the cutoff."""
    wa, wb, wc, we = V.weight(a), V.weight(b), V.weight(c), V.weight(e)
    out = []
    window = list(window)
    for m in window:
        for n in window:
            k = wa + wb + wc - m - n - 2 - we
            if max(wa + wb - n - 1, wb + wc - k - 1, wa + wc - m - 1) <= V.cutoff:
                out.append((k, m, n))
    return out
