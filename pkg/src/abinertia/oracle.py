"""Brute-force ground truth for inertiality verdicts.

The analytic verdicts in inertia read the normal form.  Everything
here instead treats an endomorphism as an opaque function and measures
it on actual subgroups: |H + phi(H) : H| is computed exactly from an
integer lattice presentation, profiles watch how the worst index moves
across finite shadows of the group, and each violation kind has a
dedicated family template that should exhibit unbounded growth.  The
two routes share no inference code, so agreement between them is
evidence rather than circularity.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import lcm, prod
from typing import Callable, Iterable, Sequence

from .exactnum import (
    INF, OMEGA, UsageError, frac_residue, frac_valuation, hnf, is_finite,
    kernel_left, snf, solve_in_rowspace,
)
from .groupkit import (
    Coord, Cyclic, Element, GroupDesc, Nat, Prufer, TorsionFree, Truncation,
    truncate,
)
from .endokit import Endo, apply
from .inertia import (
    CRT_INCONSISTENT, DIV_NOT_SCALAR, DIV_VS_R_MISMATCH,
    NOT_FTFR_NOT_INTEGER, OMEGA_DIV_MISMATCH, PI_HAS_DIVISIBLE, TAU_NONZERO,
    TF_NOT_SCALAR, Violation,
)

__all__ = [
    "FGSubgroup", "InertnessEvidence", "WitnessFamily", "FiniteLattice",
    "index_in_sum", "naive_index_in_sum", "enumerate_subgroups",
    "sample_subgroups", "truncate_endo", "inertness_profile", "fs_profile",
    "witness_search",
]


@dataclass(frozen=True)
class FGSubgroup:
    """A finitely generated subgroup, named by a generator list."""

    group: GroupDesc
    generators: tuple[Element, ...]
    label: str = ""

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        for g in gens:
            if g.group != self.group:
                raise UsageError("generator lives in a different group")
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class InertnessEvidence:
    """Worst observed indices per truncation level."""

    per_level: tuple[tuple[int, Nat], ...]
    sampled_families: tuple[str, ...]
    verdict_hint: str  # "stable" | "growing"


@dataclass(frozen=True)
class WitnessFamily:
    """A parameterized subgroup family with unbounded index."""

    kind: str
    prime: int | None
    description: str
    depths: tuple[int, ...]
    subgroups: tuple[FGSubgroup, ...]
    indices: tuple[Nat, ...]


# ---------------------------------------------------------------------------
# exact index of H in H + phi(H)

def _presentation(group: GroupDesc,
                  gens: Sequence[Element]) -> tuple[list[list[int]], list[list[int]]]:
    """Integer vectors for the generators, plus order-relation rows.

    Every column is scaled to an integer coordinate: torsion-free values
    are multiplied through by the common denominator, divisible values
    a/p^j become a * p^(J-j) modulo the deepest layer p^J in play, and
    cyclic values stay as they are.  Relation rows carry the modulus of
    each torsion column; torsion-free columns get none.
    """
    cols = sorted({c for g in gens for c in g.support()})
    scales: list[tuple[str, int]] = []
    for c in cols:
        b = group.block(c[0])
        if isinstance(b, Cyclic):
            scales.append(("mod", b.prime ** b.exp))
        elif isinstance(b, Prufer):
            deepest = max(g.get(c).denominator for g in gens)
            scales.append(("mod", deepest))
        else:
            den = 1
            for g in gens:
                den = lcm(den, g.get(c).denominator)
            scales.append(("free", den))
    rows = []
    for g in gens:
        row = []
        for c, (kind, m) in zip(cols, scales):
            v = g.get(c)
            if kind == "free":
                row.append(v.numerator * (m // v.denominator))
            elif isinstance(v, Fraction):
                row.append(v.numerator * (m // v.denominator))
            else:
                row.append(v)
        rows.append(row)
    rel = []
    for i, (kind, m) in enumerate(scales):
        if kind == "mod":
            rel.append([m if j == i else 0 for j in range(len(cols))])
    return rows, rel


def index_in_sum(sub: FGSubgroup, phi: Endo) -> Nat:
    """Exact index |H + phi(H) : H| for a finitely generated H.

    Both subgroups are presented as integer lattices over the involved
    coordinates; the index is the product of the Smith invariant factors
    of the coefficient matrix expressing one Hermite basis over the
    other, and INF exactly when the torsion-free rank jumps.
    """
    if phi.group != sub.group:
        raise UsageError("the endomorphism acts on a different group")
    hs = [g for g in sub.generators if g]
    images = [apply(phi, g) for g in hs]
    ks = hs + [im for im in images if im]
    if not ks:
        return 1
    rows, rel = _presentation(sub.group, ks)
    basis_k = hnf(rows + rel)
    basis_h = hnf(rows[:len(hs)] + rel)
    if len(basis_h) < len(basis_k):
        return INF
    coeffs = []
    for row in basis_h:
        sol = solve_in_rowspace(basis_k, row)
        assert sol is not None, "H escaped H + phi(H)"
        coeffs.append(sol)
    diag, _, _ = snf(coeffs)
    out = 1
    for i in range(len(basis_k)):
        d = diag[i][i]
        if d == 0:  # pragma: no cover - ranks already agreed
            return INF
        out *= abs(d)
    return out


def _span(group: GroupDesc, gens: Sequence[Element]) -> set[Element]:
    zero = Element(group, {})
    seen = {zero}
    frontier = [zero]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x + g
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def naive_index_in_sum(sub: FGSubgroup, phi: Endo, limit: int = 4096) -> int:
    """Coset count by exhaustive closure; the slow cross-check."""
    group = sub.group
    if phi.group != group:
        raise UsageError("the endomorphism acts on a different group")
    order = group.order()
    if not is_finite(order) or order > limit:
        raise UsageError("naive enumeration needs a finite group of modest order")
    gens = [g for g in sub.generators if g]
    inside = _span(group, gens)
    total = _span(group, gens + [apply(phi, g) for g in gens])
    return len(total) // len(inside)


# ---------------------------------------------------------------------------
# subgroup generation

def _ambient(target: GroupDesc | Truncation) -> GroupDesc:
    return target.group if isinstance(target, Truncation) else target


def _width(b, depth: int) -> int:
    if isinstance(b, Cyclic):
        n = b.mult
    elif isinstance(b, Prufer):
        n = b.copies
    else:
        n = b.rank
    return depth if n is OMEGA else min(n, depth)


def _probe(group: GroupDesc, name: str, i: int, depth: int) -> Element:
    b = group.block(name)
    if isinstance(b, Prufer):
        return Element.unit(group, name, i, Fraction(1, b.prime ** depth))
    return Element.unit(group, name, i)


def _prelude(group: GroupDesc, depth: int) -> list[FGSubgroup]:
    """Structured deterministic families: socles, slabs, graphs."""
    out: list[FGSubgroup] = []
    seen: set[tuple[Element, ...]] = set()

    def push(label: str, gens: Iterable[Element]) -> None:
        key = tuple(g for g in gens if g)
        if key and key not in seen:
            seen.add(key)
            out.append(FGSubgroup(group, key, label))

    for name, b in group.blocks:
        w = max(1, _width(b, depth))
        if isinstance(b, Cyclic):
            e0 = Element.unit(group, name, 0)
            push(f"socle {name}", [e0.scale(b.prime ** (b.exp - 1))])
            push(f"coordinate {name}", [e0])
            if w >= 2:
                push(f"slab {name}",
                     [Element.unit(group, name, i) for i in range(w)])
        elif isinstance(b, Prufer):
            push(f"socle {name}",
                 [Element.unit(group, name, 0, Fraction(1, b.prime))])
            push(f"layer {name}", [_probe(group, name, 0, depth)])
            if w >= 2:
                push(f"slab {name}",
                     [_probe(group, name, i, depth) for i in range(w)])
        else:
            lattice = [Element.unit(group, name, i) for i in range(w)]
            push(f"lattice {name}", lattice)
            push(f"lattice {name} scaled", [u.scale(2) for u in lattice])
        if w >= 2:  # one in-block pair graph catches diagonal deviations
            push(f"graph {name}/{name}",
                 [_probe(group, name, 0, depth) + _probe(group, name, 1, depth)])
    for (n1, b1), (n2, b2) in combinations(group.blocks, 2):
        w = max(1, min(_width(b1, depth), _width(b2, depth)))
        push(f"graph {n1}/{n2}",
             [_probe(group, n1, i, depth) + _probe(group, n2, i, depth)
              for i in range(w)])
    return out


_TAIL_WINDOW = 3  # random tails stay level-independent on purpose

_SAMPLE_CACHE: dict[tuple, tuple[FGSubgroup, ...]] = {}


def sample_subgroups(target: GroupDesc | Truncation, count: int, seed: int,
                     depth: int | None = None) -> list[FGSubgroup]:
    """Deterministic mixed family of finitely generated subgroups.

    The structured prelude (socles, slabs, scaled lattices, one graph
    per block pair, scaled by depth) is always included; seeded random
    generator sets with small coefficients fill the list up to count.
    The random tail draws from a fixed shallow window regardless of
    depth, so profiles over growing depths only move through the
    structured families.
    """
    group = _ambient(target)
    if not isinstance(count, int) or count < 1:
        raise UsageError("count must be a positive integer")
    if depth is None:
        depth = target.level if isinstance(target, Truncation) else _TAIL_WINDOW
    if not isinstance(depth, int) or depth < 1:
        raise UsageError("depth must be a positive integer")

    out = list(_prelude(group, depth))
    seen = {s.generators for s in out}
    rng = random.Random(seed)
    pool = [(name, i) for name, b in group.blocks
            for i in range(max(1, _width(b, _TAIL_WINDOW)))]
    attempts = 0
    while len(out) < count and attempts < 4 * count + 32:
        attempts += 1
        gens = []
        for _ in range(rng.randint(1, 4)):
            coeffs: dict[Coord, int | Fraction] = {}
            for name, i in rng.sample(pool, rng.randint(1, min(3, len(pool)))):
                b = group.block(name)
                if isinstance(b, Cyclic):
                    coeffs[(name, i)] = rng.randrange(1, b.prime ** b.exp)
                elif isinstance(b, Prufer):
                    j = rng.randint(1, _TAIL_WINDOW)
                    coeffs[(name, i)] = Fraction(rng.randrange(1, b.prime ** j),
                                                 b.prime ** j)
                else:
                    num = rng.randint(-3, 3)
                    den = 1
                    ps = sorted(b.primes)
                    if ps and rng.random() < 0.5:
                        den = rng.choice(ps) ** rng.randint(1, 2)
                    if num:
                        coeffs[(name, i)] = Fraction(num, den)
            g = Element(group, coeffs)
            if g:
                gens.append(g)
        key = tuple(gens)
        if key and key not in seen:
            seen.add(key)
            out.append(FGSubgroup(group, key, f"random {len(out)}"))
    return out


def _samples_for(target: GroupDesc | Truncation, count: int, seed: int,
                 depth: int | None = None) -> tuple[FGSubgroup, ...]:
    key = (_ambient(target), count, seed, depth)
    hit = _SAMPLE_CACHE.get(key)
    if hit is None:
        if len(_SAMPLE_CACHE) > 512:
            _SAMPLE_CACHE.clear()
        hit = tuple(sample_subgroups(target, count, seed, depth=depth))
        _SAMPLE_CACHE[key] = hit
    return hit


def _all_elements(group: GroupDesc) -> list[Element]:
    coords = [((name, i), b.prime ** b.exp)
              for name, b in group.blocks for i in range(b.mult)]
    out = []
    for combo in product(*[range(m) for _, m in coords]):
        coeffs = {c: v for (c, _), v in zip(coords, combo) if v}
        out.append(Element(group, coeffs))
    return out


def _ekey(x: Element):
    return tuple(sorted(x.coeffs.items()))


def _join(group: GroupDesc, sub: frozenset[Element],
          extra: Element) -> frozenset[Element]:
    # sub is a subgroup, so sub + <extra> is already closed
    step = Element(group, {})
    layers = []
    for _ in range(extra.order()):
        layers.append(step)
        step = step + extra
    return frozenset(s + t for s in sub for t in layers)


def enumerate_subgroups(target: GroupDesc | Truncation,
                        limit: int = 1024) -> list[FGSubgroup]:
    """Every subgroup of a small finite group, smallest first.

    Exhaustive join closure over cyclic subgroups; refuses groups of
    order beyond the limit and lattices that grow past twenty thousand
    subgroups (elementary abelian shapes explode combinatorially).
    """
    group = _ambient(target)
    order = group.order()
    if not is_finite(order) or order > limit:
        raise UsageError("subgroup enumeration needs a finite group within the limit")
    elements = _all_elements(group)
    zero = Element(group, {})
    trivial = frozenset([zero])
    subs = {trivial}
    frontier = [trivial]
    while frontier:
        s = frontier.pop()
        for e in elements:
            if e in s:
                continue
            t = _join(group, s, e)
            if t not in subs:
                if len(subs) >= 20000:
                    raise UsageError("the subgroup lattice is too large to enumerate")
                subs.add(t)
                frontier.append(t)
    ordered = sorted(subs, key=lambda s: (len(s), sorted(map(_ekey, s))))
    out = []
    for rank, s in enumerate(ordered):
        gens: list[Element] = []
        span = {zero}
        for e in sorted(s, key=lambda x: (-(x.order()), _ekey(x))):
            if e not in span:
                gens.append(e)
                span = _span(group, gens)
                if len(span) == len(s):
                    break
        out.append(FGSubgroup(group, tuple(gens), f"enum {rank}"))
    return out


# ---------------------------------------------------------------------------
# endomorphisms on finite shadows

def _shadow_image(shadow: Truncation, img: Element) -> Element | None:
    """The image element inside the shadow, or None when it escapes."""
    coeffs: dict[Coord, int | Fraction] = {}
    for (name, i), v in img.coeffs.items():
        b = shadow.source.block(name)
        if isinstance(b, TorsionFree):
            return None
        if (b.mult if isinstance(b, Cyclic) else b.copies) is OMEGA \
                and i >= shadow.level:
            return None
        if isinstance(b, Cyclic):
            coeffs[(name, i)] = v
        else:
            if v.denominator > b.prime ** shadow.level:
                return None
            coeffs[(name, i)] = v.numerator * (b.prime ** shadow.level
                                               // v.denominator)
    return Element(shadow.group, coeffs)


def truncate_endo(phi: Endo, shadow: Truncation) -> Endo:
    """Transport the torsion action of phi onto a finite shadow.

    Torsion-free data (tf, free scalar, tau) has no finite shadow and
    is dropped; divisible blocks act as scalars or matrices on their
    cyclic towers; a bounded correction whose image reaches below the
    tower floor is dropped as well, which shifts any index by at most
    the order of the dropped image.
    """
    if phi.group != shadow.source:
        raise UsageError("the endomorphism acts on a different group")
    if shadow.sampled:
        raise UsageError("endomorphisms do not transport onto sampled "
                         "torsion-free shadows")
    level = shadow.level
    cyc: dict[str, int | dict] = {}
    for name, val in phi.cyc.items():
        cyc[name] = dict(val) if isinstance(val, dict) else val
    for p, val in phi.div.items():
        names = [n for n, b in phi.group.prufer_items() if b.prime == p]
        if isinstance(val, Fraction):
            for name in names:
                cyc[name] = frac_residue(val, p, level).value
        else:
            per_block: dict[str, dict[tuple[int, int], int]] = {}
            for (s, d), q in val.items():
                if s[0] != d[0]:
                    raise UsageError("the shadow cannot carry a divisible "
                                     "matrix across blocks")
                r = frac_residue(q, p, level).value
                if r:
                    per_block.setdefault(s[0], {})[(s[1], d[1])] = r
            cyc.update(per_block)
    fin: dict[tuple, Element] = {}
    for key, img in phi.fin.items():
        if key[0] != "c":
            continue
        _, name, idx = key
        if phi.group.block(name).mult is OMEGA and idx >= level:
            continue
        mapped = _shadow_image(shadow, img)
        if mapped is not None and mapped:
            fin[key] = mapped
    return Endo(shadow.group, cyc=cyc, fin=fin)


# ---------------------------------------------------------------------------
# profiles

def _check_levels(levels: Sequence[int]) -> list[int]:
    out = list(levels)
    if not out or any(not isinstance(x, int) or x < 1 for x in out):
        raise UsageError("levels must be positive integers")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError("levels must be strictly ascending")
    return out


def _nat_max(a: Nat, b: Nat) -> Nat:
    if not is_finite(a):
        return a
    if not is_finite(b):
        return b
    return a if a >= b else b


def inertness_profile(group: GroupDesc, phi: Endo, levels: Sequence[int],
                      samples: int = 40, seed: int = 0) -> InertnessEvidence:
    """Worst observed |H + phi(H) : H| per truncation level.

    Each level measures the truncated action over the structured shadow
    families plus the untruncated action over samples whose structured
    depth grows with the level; random tails are level-independent, so
    the hint is stable exactly when the top two level maxima agree.
    """
    if phi.group != group:
        raise UsageError("the endomorphism acts on a different group")
    lv = _check_levels(levels)
    has_torsion = any(not isinstance(b, TorsionFree) for _, b in group.blocks)
    per: list[tuple[int, Nat]] = []
    families: set[str] = set()
    for level in lv:
        worst: Nat = 1
        if has_torsion:
            shadow = truncate(group, level)
            psi = truncate_endo(phi, shadow)
            for s in _prelude(shadow.group, level):
                worst = _nat_max(worst, index_in_sum(s, psi))
                families.add(s.label.split()[0])
        for s in _samples_for(group, samples, seed, depth=level):
            worst = _nat_max(worst, index_in_sum(s, phi))
            families.add(s.label.split()[0])
        per.append((level, worst))
    # an infinite observed index is already unbounded growth
    stable = is_finite(per[-1][1]) and (len(per) < 2
                                        or per[-1][1] == per[-2][1])
    return InertnessEvidence(tuple(per), tuple(sorted(families)),
                             "stable" if stable else "growing")


class FiniteLattice:
    """A subgroup of a finite group as a full-rank integer row lattice.

    The group is flattened to Z^n modulo diag(moduli); a subgroup is
    spanned by its generator vectors together with the relation rows
    and kept in Hermite form, so the basis is square and the order is
    the modulus product divided by the pivot product.
    """

    __slots__ = ("moduli", "basis")

    def __init__(self, moduli: Sequence[int], rows: Iterable[Sequence[int]]):
        self.moduli = tuple(moduli)
        n = len(self.moduli)
        rel = [[m if j == i else 0 for j in range(n)]
               for i, m in enumerate(self.moduli)]
        self.basis = tuple(tuple(r) for r in hnf(list(rows) + rel))

    def order(self) -> int:
        det = prod(self.basis[i][i] for i in range(len(self.moduli)))
        return prod(self.moduli) // det

    def join(self, other: "FiniteLattice") -> "FiniteLattice":
        return FiniteLattice(self.moduli, self.basis + other.basis)

    def image(self, mat: Sequence[Sequence[int]]) -> "FiniteLattice":
        n = len(self.moduli)
        rows = [[sum(vec[i] * mat[i][j] for i in range(n)) for j in range(n)]
                for vec in self.basis]
        return FiniteLattice(self.moduli, rows)

    def intersect(self, other: "FiniteLattice") -> "FiniteLattice":
        stacked = [list(r) for r in self.basis]
        stacked += [[-x for x in r] for r in other.basis]
        mine = len(self.basis)
        rows = []
        for combo in kernel_left(stacked):
            n = len(self.moduli)
            rows.append([sum(combo[i] * self.basis[i][j] for i in range(mine))
                         for j in range(n)])
        return FiniteLattice(self.moduli, rows)

    def preimage(self, mat: Sequence[Sequence[int]]) -> "FiniteLattice":
        n = len(self.moduli)
        stacked = [list(mat[i]) for i in range(n)]
        stacked += [[-x for x in r] for r in self.basis]
        rows = [combo[:n] for combo in kernel_left(stacked)]
        return FiniteLattice(self.moduli, rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteLattice):
            return NotImplemented
        return self.moduli == other.moduli and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.moduli, self.basis))

    def __repr__(self) -> str:
        return f"FiniteLattice(order={self.order()})"


def _flat_space(group: GroupDesc) -> tuple[list[Coord], list[int]]:
    if not group.is_finite:
        raise UsageError("only finite groups flatten to lattices")
    coords, moduli = [], []
    for name, b in group.blocks:
        for i in range(b.mult):
            coords.append((name, i))
            moduli.append(b.prime ** b.exp)
    return coords, moduli


def fs_profile(group: GroupDesc, phi: Endo,
               levels: Sequence[int]) -> dict[int, int]:
    """Max |X^* / X_*| per truncation level, over structured samples.

    X^* is the closure of X under phi, X_* the largest phi-invariant
    subgroup of X (iterated intersection with the preimage); both are
    computed exactly on the finite shadow lattices.
    """
    if not group.is_periodic:
        raise UsageError("the FS profile needs a periodic group")
    if phi.group != group:
        raise UsageError("the endomorphism acts on a different group")
    report: dict[int, int] = {}
    for level in _check_levels(levels):
        shadow = truncate(group, level)
        psi = truncate_endo(phi, shadow)
        coords, moduli = _flat_space(shadow.group)
        mat = [[apply(psi, Element.unit(shadow.group, c[0], c[1])).get(d)
                for d in coords] for c in coords]
        worst = 1
        for s in _prelude(shadow.group, level):
            x = FiniteLattice(moduli, [[g.get(c) for c in coords]
                                       for g in s.generators])
            upper = x
            while True:
                grown = upper.join(upper.image(mat))
                if grown == upper:
                    break
                upper = grown
            lower = x
            while True:
                shrunk = lower.intersect(lower.preimage(mat))
                if shrunk == lower:
                    break
                lower = shrunk
            worst = max(worst, upper.order() // lower.order())
        report[level] = worst
    return report


# ---------------------------------------------------------------------------
# witness families, one template per violation kind

FamilyFn = Callable[[int], list[Element]]


def _tf_coords(group: GroupDesc, x: Element) -> list[Coord]:
    return [c for c in x.support()
            if isinstance(group.block(c[0]), TorsionFree)]


def _tf_parallel(group: GroupDesc, v: Element, w: Element) -> bool:
    """Is the torsion-free part of w a rational multiple of that of v?"""
    ratio = None
    for c in sorted(set(_tf_coords(group, v)) | set(_tf_coords(group, w))):
        a, b = Fraction(v.get(c)), Fraction(w.get(c))
        if a == 0:
            if b != 0:
                return False
        elif ratio is None:
            ratio = b / a
        elif b != ratio * a:
            return False
    return True


def _wit_tf_line(group: GroupDesc, phi: Endo,
                 viol: Violation) -> list[tuple[str, FamilyFn]]:
    units = [Element.unit(group, n, i) for n, i in group.tf_copies()]
    free = group.free_omega_name
    if free is not None:
        units.append(Element.unit(group, free, 0))
    candidates = list(units)
    for u, v in combinations(units, 2):
        candidates += [u + v, u + v.scale(-1)]
    for v in candidates:
        if not _tf_parallel(group, v, apply(phi, v)):
            return [("an infinite-order line moved off itself",
                     lambda n, v=v: [v])]
    return []


def _anchored_layer(group: GroupDesc, phi: Endo,
                    viol: Violation) -> list[tuple[str, FamilyFn]]:
    # deep divisible layers tied to an infinite-order anchor
    p = viol.prime
    dnames = [n for n, b in group.prufer_items() if b.prime == p]
    free = group.free_omega_name
    if free is not None:
        anchor = Element.unit(group, free, 0)
    else:
        copies = group.tf_copies()
        if not copies:
            return []
        anchor = Element.unit(group, copies[0][0], copies[0][1])
    out = []
    for name in dnames:
        def fam(n: int, name=name) -> list[Element]:
            layer = Element.unit(group, name, 0, Fraction(1, p ** n))
            return [layer + anchor]
        out.append((f"divisible layers under an infinite-order anchor at {p}",
                    fam))
    return out


def _wit_div_matrix(group: GroupDesc, phi: Endo,
                    viol: Violation) -> list[tuple[str, FamilyFn]]:
    p = viol.prime
    val = phi.div.get(p)
    if not isinstance(val, dict):
        return []
    out = []
    off = sorted((s, d) for (s, d), q in val.items() if s != d and q)
    if off:
        src = off[0][0]
        out.append((f"layers of a cross-coordinate divisible source at {p}",
                    lambda n, src=src: [Element.unit(group, src[0], src[1],
                                                     Fraction(1, p ** n))]))
    copies, _ = group.prufer_copies(p)
    for c1, c2 in combinations(copies, 2):
        if val.get((c1, c1), Fraction(0)) != val.get((c2, c2), Fraction(0)):
            def fam(n: int, c1=c1, c2=c2) -> list[Element]:
                q = Fraction(1, p ** n)
                return [Element.unit(group, c1[0], c1[1], q)
                        + Element.unit(group, c2[0], c2[1], q)]
            out.append((f"paired layers of distinct divisible scalars at {p}",
                        fam))
            break
    return out


def _wit_tau(group: GroupDesc, phi: Endo,
             viol: Violation) -> list[tuple[str, FamilyFn]]:
    out = []
    for (s, d), _ in sorted(phi.tau.items()):
        p = group.block(d[0]).prime
        out.append((f"deep {p}-fractions of a twisted source",
                    lambda n, s=s, p=p: [Element.unit(group, s[0], s[1],
                                                      Fraction(1, p ** n))]))
    return out


def _omega_residues(group: GroupDesc, phi: Endo,
                    p: int) -> list[tuple[str, int, int]]:
    out = []
    for name, b in group.cyclic_at(p):
        if b.mult is OMEGA:
            val = phi.cyc.get(name, 0)
            if isinstance(val, int):
                out.append((name, b.exp, val))
    return out


def _wit_crt(group: GroupDesc, phi: Endo,
             viol: Violation) -> list[tuple[str, FamilyFn]]:
    p = viol.prime
    blocks = _omega_residues(group, phi, p)
    out = []
    for (n1, k1, a1), (n2, k2, a2) in combinations(blocks, 2):
        if (a1 - a2) % p ** min(k1, k2):
            def fam(n: int, n1=n1, n2=n2) -> list[Element]:
                return [Element.unit(group, n1, i) + Element.unit(group, n2, i)
                        for i in range(n)]
            out.append(("graphs of residue blocks with clashing scalars", fam))
    free = group.free_omega_name
    if free is not None:
        m = phi.free_scalar
        for name, k, a in blocks:
            if (a - m) % p ** k:
                def fam(n: int, name=name) -> list[Element]:
                    return [Element.unit(group, name, i)
                            + Element.unit(group, free, i) for i in range(n)]
                out.append(("graphs of a residue block against the free "
                            "lattice", fam))
    return out


def _wit_omega_div(group: GroupDesc, phi: Endo,
                   viol: Violation) -> list[tuple[str, FamilyFn]]:
    p = viol.prime
    val = phi.div.get(p, Fraction(0))
    if not isinstance(val, Fraction):
        return []
    dname = next((n for n, b in group.prufer_items()
                  if b.prime == p and b.copies is OMEGA), None)
    if dname is None:
        return []
    out = []
    for name, k, a in _omega_residues(group, phi, p):
        gap = frac_valuation(val - a, p)
        if is_finite(gap) and gap < k:
            def fam(n: int, name=name, k=k) -> list[Element]:
                return [Element.unit(group, name, i)
                        + Element.unit(group, dname, i, Fraction(1, p ** k))
                        for i in range(n)]
            out.append(("graphs pairing residue blocks with fresh divisible "
                        "coordinates", fam))
            break
    return out


_FAMILY_BUILDERS = {
    TF_NOT_SCALAR: _wit_tf_line,
    NOT_FTFR_NOT_INTEGER: _wit_tf_line,
    PI_HAS_DIVISIBLE: _anchored_layer,
    DIV_VS_R_MISMATCH: _anchored_layer,
    DIV_NOT_SCALAR: _wit_div_matrix,
    TAU_NONZERO: _wit_tau,
    CRT_INCONSISTENT: _wit_crt,
    OMEGA_DIV_MISMATCH: _wit_omega_div,
}


def _unbounded(indices: Sequence[Nat], ratio: int) -> bool:
    if any(not is_finite(v) for v in indices):
        return True
    if len(indices) < 2:
        return False
    return all(b >= ratio * a for a, b in zip(indices, indices[1:]))


def witness_search(group: GroupDesc, phi: Endo, violation: Violation,
                   budget: int = 6) -> WitnessFamily | None:
    """A subgroup family whose index under phi grows without bound.

    Each violation kind has one dedicated template; a family counts as
    a witness when some index is infinite or the indices multiply by at
    least the violated prime at every depth step.  Returns None when no
    template shows growth within the budget.
    """
    if phi.group != group:
        raise UsageError("the endomorphism acts on a different group")
    if not isinstance(budget, int) or budget < 1:
        raise UsageError("budget must be a positive integer")
    builder = _FAMILY_BUILDERS.get(violation.kind)
    if builder is None:
        raise UsageError(f"unknown violation kind {violation.kind!r}")
    ratio = violation.prime if violation.prime is not None else 2
    for desc, fam in builder(group, phi, violation):
        depths: list[int] = []
        subgroups: list[FGSubgroup] = []
        indices: list[Nat] = []
        for n in range(1, budget + 1):
            sub = FGSubgroup(group, tuple(fam(n)),
                             f"witness {violation.kind} {n}")
            depths.append(n)
            subgroups.append(sub)
            indices.append(index_in_sum(sub, phi))
            if not is_finite(indices[-1]):
                break
        if _unbounded(indices, ratio):
            return WitnessFamily(violation.kind, violation.prime, desc,
                                 tuple(depths), tuple(subgroups),
                                 tuple(indices))
    return None
