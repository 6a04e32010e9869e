"""Tensor powers of a seed: Fock words, permutation action, padding, products."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .perm import Perm, SupportConfiguration
from .seed import VACUUM, SeedVA, Word, add_into


class TensorError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class FockWord:
    """Finitely supported map ``site -> nonvacuum seed word`` on ``1..degree``."""

    degree: int
    entries: tuple[tuple[int, Word], ...]

    def __post_init__(self):
        sites = [s for s, _ in self.entries]
        if any(w == VACUUM for _, w in self.entries):
            raise TensorError("vacuum entries must be omitted")
        if sites != sorted(set(sites)):
            raise TensorError("entries must have distinct sorted sites")
        if sites and not (1 <= sites[0] and sites[-1] <= self.degree):
            raise TensorError(f"sites {sites} outside 1..{self.degree}")

    @classmethod
    def make(cls, degree: int, entries: Mapping[int, Word] | Iterable[tuple[int, Word]]) -> "FockWord":
        items = entries.items() if isinstance(entries, Mapping) else entries
        return cls(degree, tuple(sorted((int(s), tuple(w)) for s, w in items if w != VACUUM)))

    @classmethod
    def vacuum(cls, degree: int) -> "FockWord":
        return cls(degree, ())

    def as_dict(self) -> dict[int, Word]:
        return dict(self.entries)

    def at(self, site: int) -> Word:
        return self.as_dict().get(site, VACUUM)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(s for s, _ in self.entries)

    def weight(self, V: SeedVA) -> int:
        return sum(V.weight(w) for _, w in self.entries)

    def act(self, p: Perm) -> "FockWord":
        if len(p) != self.degree:
            raise TensorError(f"permutation degree {len(p)} != word degree {self.degree}")
        return FockWord.make(self.degree, [(p[s - 1], w) for s, w in self.entries])

    def embed(self, M: int) -> "FockWord":
        if M < self.degree:
            raise TensorError(f"cannot embed degree {self.degree} into {M}")
        return FockWord(M, self.entries)

    # ---- labels shared with perm.function_orbit_reps
    def to_function(self, V: SeedVA) -> dict:
        out = {}
        for s, w in self.entries:
            n = V.weight(w)
            out[s] = (n, V.basis(n).index(w))
        return out

    @classmethod
    def from_function(cls, V: SeedVA, degree: int, f: Mapping | Iterable) -> "FockWord":
        items = f.items() if isinstance(f, Mapping) else f
        return cls.make(degree, [(s, V.basis(lab[0])[lab[1]]) for s, lab in items])

    def key(self, V: SeedVA) -> tuple:
        return tuple(sorted(self.to_function(V).items()))

    def label(self, V: SeedVA) -> str:
        if not self.entries:
            return "|0>"
        return " ".join(f"{V.label(w)}@{s}" for s, w in self.entries)

    def to_json(self, V: SeedVA) -> dict:
        return {"degree": self.degree,
                "entries": [{"site": s, "state": V.label(w)} for s, w in self.entries]}

    @classmethod
    def from_json(cls, V: SeedVA, obj: Mapping) -> "FockWord":
        return cls.make(int(obj["degree"]), [(int(e["site"]), V.parse(e["state"])) for e in obj["entries"]])


def act_and_embed(v: FockWord, target: Sequence[int] | int) -> FockWord:
    """Permute sites (``target`` a permutation) or pad with vacua (``target`` a degree)."""
    if isinstance(target, int):
        return v.embed(target)
    return v.act(tuple(target))


def overlap_sets(a: FockWord, b: FockWord, c: FockWord) -> SupportConfiguration:
    if not a.degree == b.degree == c.degree:
        raise TensorError("degree mismatch")
    return SupportConfiguration(a.support, b.support, c.support)


def tensor_structure_constant(V: SeedVA, a: FockWord, b: FockWord, c: FockWord):
    """Coefficient of ``a`` in ``b_(k) c`` at the grading-forced ``k``."""
    if not a.degree == b.degree == c.degree:
        raise TensorError("degree mismatch")
    conf = overlap_sets(a, b, c)
    if conf.one_point:
        return 0
    da, db, dc = a.as_dict(), b.as_dict(), c.as_dict()
    out = 1
    for s in sorted(conf.union):
        x = V.structure_constant(da.get(s, VACUUM), db.get(s, VACUUM), dc.get(s, VACUUM))
        if x == 0:
            return 0
        out = out * x
    return out


def tensor_mode(V: SeedVA, b: FockWord, k: int, c: FockWord) -> dict:
    """Full expansion of ``b_(k) c`` over Fock words.

    ``Y(b, z)`` is the tensor product of the site fields, so the site mode
    indices ``k_s`` satisfy ``sum_s (k_s + 1) = k + 1``; sites outside the
    support of ``b`` carry the identity field.
    """
    if b.degree != c.degree:
        raise TensorError("degree mismatch")
    target = b.weight(V) + c.weight(V) - k - 1
    if target < 0:
        return {}
    db, dc = b.as_dict(), c.as_dict()
    bsites = sorted(db)
    rest_weight = sum(V.weight(w) for s, w in dc.items() if s not in db)
    budget = target - rest_weight
    if budget < 0:
        return {}
    fixed = [(s, w) for s, w in dc.items() if s not in db]
    options = []
    for s in bsites:
        opts = []
        wb, wc = V.weight(db[s]), V.weight(dc.get(s, VACUUM))
        for out_w in range(budget + 1):
            ks = wb + wc - out_w - 1
            vec = V.apply_word_mode(db[s], ks, dc.get(s, VACUUM), strict=False)
            if vec:
                opts.append((out_w, vec))
        options.append(opts)
    result: dict = {}
    for choice in itertools.product(*options):
        if sum(ow for ow, _ in choice) != budget:
            continue
        for combo in itertools.product(*(vec.items() for _, vec in choice)):
            coef = math.prod((cf for _, cf in combo), start=1)
            if coef == 0:
                continue
            entries = fixed + [(s, w) for s, (w, _) in zip(bsites, combo)]
            add_into(result, {FockWord.make(b.degree, entries): coef})
    return result


def linear_act(vec: Mapping[FockWord, object], p: Perm) -> dict:
    return {w.act(p): c for w, c in vec.items()}


def linear_embed(vec: Mapping[FockWord, object], M: int) -> dict:
    return {w.embed(M): c for w, c in vec.items()}


def fock_basis(V: SeedVA, degree: int, n: int) -> list[FockWord]:
    """All Fock words of weight ``n`` on ``degree`` sites (small cases only)."""
    out = []

    def rec(site: int, remaining: int, acc: list):
        if remaining == 0:
            out.append(FockWord.make(degree, acc))
            return
        if site > degree:
            return
        rec(site + 1, remaining, acc)
        for w in range(1, remaining + 1):
            for word in V.basis(w):
                rec(site + 1, remaining - w, acc + [(site, word)])

    rec(1, n, [])
    return out
