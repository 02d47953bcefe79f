"""Finite Abelian groups presented as products of cyclic groups.

A group is Z(n_1) x ... x Z(n_r).  Elements are residue vectors, and the
dual group is identified with the same product: the character labelled by
h sends g to exp(2*pi*i * sum_k g_k*h_k / n_k).  Character values are
computed through an integer phase reduced mod lcm(n_1..n_r), so they are
exact roots of unity up to one complex exponential rounding.

Automorphisms are integer matrices acting on residue vectors.  A matrix A
gives a well defined endomorphism iff A[k][j]*n_j = 0 mod n_k for all j, k;
bijectivity is checked by exhaustive enumeration, which bounds the usable
group order.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "FiniteAbelianGroup",
    "GroupElement",
    "DualCharacter",
    "GroupAutomorphism",
    "eval_character",
    "order_of",
    "kernel_of_I_plus",
    "restriction_is_minus_identity",
    "is_subgroup",
    "identity_automorphism",
    "negation_automorphism",
    "scalar_automorphism",
    "char_table",
]

# Exhaustive checks (bijectivity, kernels) stay cheap only up to this order.
MAX_ENUMERABLE_ORDER = 100_000


def _reduced(coords: Iterable[int], orders: tuple[int, ...]) -> tuple[int, ...]:
    cs = tuple(int(c) for c in coords)
    if len(cs) != len(orders):
        raise ValueError(f"expected {len(orders)} coordinates, got {len(cs)}")
    return tuple(c % n for c, n in zip(cs, orders))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Direct product of cyclic groups Z(n_1) x ... x Z(n_r)."""

    cyclic_orders: tuple[int, ...]

    def __post_init__(self) -> None:
        orders = tuple(int(n) for n in self.cyclic_orders)
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic orders must be >= 1, got {orders}")
        object.__setattr__(self, "cyclic_orders", orders)

    @property
    def rank(self) -> int:
        return len(self.cyclic_orders)

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_orders)

    @property
    def is_odd_order(self) -> bool:
        return self.order % 2 == 1

    @property
    def exponent_lcm(self) -> int:
        return math.lcm(*self.cyclic_orders) if self.cyclic_orders else 1

    def element(self, coords: Iterable[int]) -> "GroupElement":
        return GroupElement(self, _reduced(coords, self.cyclic_orders))

    def character(self, coords: Iterable[int]) -> "DualCharacter":
        return DualCharacter(self, _reduced(coords, self.cyclic_orders))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def trivial_character(self) -> "DualCharacter":
        return DualCharacter(self, (0,) * self.rank)

    def elements(self) -> Iterator["GroupElement"]:
        for coords in product(*(range(n) for n in self.cyclic_orders)):
            yield GroupElement(self, coords)

    def characters(self) -> Iterator["DualCharacter"]:
        for coords in product(*(range(n) for n in self.cyclic_orders)):
            yield DualCharacter(self, coords)

    def index_of(self, coords) -> int:
        """Mixed-radix index of a residue vector, row-major over elements().

        Accepts a plain coordinate sequence, a GroupElement, or a
        DualCharacter (dual coordinates index the same radix grid).
        """
        if isinstance(coords, (GroupElement, DualCharacter)):
            coords = coords.coords
        idx = 0
        for c, n in zip(coords, self.cyclic_orders):
            idx = idx * n + (c % n)
        return idx

    def coords_at(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.order:
            raise ValueError(f"index {index} out of range for group of order {self.order}")
        coords = []
        for n in reversed(self.cyclic_orders):
            coords.append(index % n)
            index //= n
        return tuple(reversed(coords))

    def all_coords(self) -> np.ndarray:
        """All residue vectors as an (order, rank) integer array, index order."""
        out = np.zeros((self.order, self.rank), dtype=np.int64)
        for j, coords in enumerate(product(*(range(n) for n in self.cyclic_orders))):
            out[j] = coords
        return out

    def to_json(self) -> dict:
        return {"cyclic_orders": list(self.cyclic_orders)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteAbelianGroup":
        return cls(tuple(data["cyclic_orders"]))


def _check_same_group(a, b) -> None:
    if a.group != b.group:
        raise ValueError("operands belong to different groups")


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __add__(self, other: "GroupElement") -> "GroupElement":
        _check_same_group(self, other)
        return GroupElement(
            self.group,
            tuple((a + b) % n for a, b, n in zip(self.coords, other.coords, self.group.cyclic_orders)),
        )

    def __neg__(self) -> "GroupElement":
        return GroupElement(
            self.group, tuple((-a) % n for a, n in zip(self.coords, self.group.cyclic_orders))
        )

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def to_json(self) -> list[int]:
        return list(self.coords)


@dataclass(frozen=True)
class DualCharacter:
    """Character of the group, labelled by a residue vector of the dual."""

    group: FiniteAbelianGroup
    coords: tuple[int, ...]

    def __add__(self, other: "DualCharacter") -> "DualCharacter":
        _check_same_group(self, other)
        return DualCharacter(
            self.group,
            tuple((a + b) % n for a, b, n in zip(self.coords, other.coords, self.group.cyclic_orders)),
        )

    def __neg__(self) -> "DualCharacter":
        return DualCharacter(
            self.group, tuple((-a) % n for a, n in zip(self.coords, self.group.cyclic_orders))
        )

    def __sub__(self, other: "DualCharacter") -> "DualCharacter":
        return self + (-other)

    @property
    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __call__(self, g: GroupElement) -> complex:
        return eval_character(self, g)

    def to_json(self) -> list[int]:
        return list(self.coords)


def _phase_numerator(
    g_coords: Sequence[int], h_coords: Sequence[int], orders: Sequence[int], lcm: int
) -> int:
    total = 0
    for g, h, n in zip(g_coords, h_coords, orders):
        total += g * h * (lcm // n)
    return total % lcm


def eval_character(h: DualCharacter, g: GroupElement) -> complex:
    """Value of the character h at the element g, a root of unity."""
    _check_same_group(h, g)
    lcm = g.group.exponent_lcm
    num = _phase_numerator(g.coords, h.coords, g.group.cyclic_orders, lcm)
    if num == 0:
        return 1.0 + 0.0j
    return cmath.exp(2j * math.pi * (num / lcm))


def order_of(g: GroupElement) -> int:
    """Order of g: lcm over coordinates of n_k / gcd(g_k, n_k)."""
    return math.lcm(*(n // math.gcd(c, n) for c, n in zip(g.coords, g.group.cyclic_orders))) if g.coords else 1


def char_table(group: FiniteAbelianGroup) -> np.ndarray:
    """Complex table T[i, j] = value of character j at element i, index order."""
    coords = group.all_coords()
    lcm = group.exponent_lcm
    weights = np.array([lcm // n for n in group.cyclic_orders], dtype=np.int64)
    # integer phase numerators mod lcm keep exp arguments inside [0, 2*pi)
    nums = (coords * weights[None, :]) @ coords.T % lcm
    return np.exp(2j * np.pi * (nums / lcm))


@dataclass(frozen=True)
class GroupAutomorphism:
    """Integer matrix acting on residue vectors, validated at construction.

    Validation is eager: well-definedness is the congruence test on entries,
    bijectivity is an exhaustive image count (groups of order above
    MAX_ENUMERABLE_ORDER are rejected).
    """

    group: FiniteAbelianGroup
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        r = self.group.rank
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(rows) != r or any(len(row) != r for row in rows):
            raise ValueError(f"matrix must be {r}x{r} for this group")
        orders = self.group.cyclic_orders
        rows = tuple(
            tuple(x % orders[k] for x in row) for k, row in enumerate(rows)
        )
        object.__setattr__(self, "matrix", rows)
        for k in range(r):
            for j in range(r):
                if (rows[k][j] * orders[j]) % orders[k] != 0:
                    raise ValueError(
                        f"matrix entry [{k}][{j}]={rows[k][j]} does not respect "
                        f"orders {orders}: not a well defined endomorphism"
                    )
        if self.group.order > MAX_ENUMERABLE_ORDER:
            raise ValueError(
                f"group order {self.group.order} exceeds the exhaustive "
                f"validation bound {MAX_ENUMERABLE_ORDER}"
            )
        if not self._is_bijective():
            raise ValueError("matrix is not bijective on the group")

    def _is_bijective(self) -> bool:
        coords = self.group.all_coords()
        mat = np.array(self.matrix, dtype=np.int64)
        images = coords @ mat.T
        orders = np.array(self.group.cyclic_orders, dtype=np.int64)
        images %= orders[None, :]
        flat = np.zeros(len(images), dtype=np.int64)
        for k, n in enumerate(self.group.cyclic_orders):
            flat = flat * n + images[:, k]
        return len(np.unique(flat)) == self.group.order

    def _apply_coords(self, coords: Sequence[int]) -> tuple[int, ...]:
        orders = self.group.cyclic_orders
        return tuple(
            sum(self.matrix[k][j] * coords[j] for j in range(self.group.rank)) % orders[k]
            for k in range(self.group.rank)
        )

    def __call__(self, x: GroupElement | DualCharacter):
        if x.group != self.group:
            raise ValueError("element belongs to a different group")
        return type(x)(self.group, self._apply_coords(x.coords))

    def compose(self, other: "GroupAutomorphism") -> "GroupAutomorphism":
        """self after other, as a single matrix."""
        if other.group != self.group:
            raise ValueError("automorphisms act on different groups")
        a = np.array(self.matrix, dtype=np.int64)
        b = np.array(other.matrix, dtype=np.int64)
        return GroupAutomorphism(self.group, tuple(tuple(int(x) for x in row) for row in a @ b))

    def adjoint(self) -> "GroupAutomorphism":
        """Dual-side matrix B with (Ag, h) = (g, Bh) for all g, h.

        B[j][k] = A[k][j] * n_j / n_k, an integer exactly when A is well
        defined.
        """
        orders = self.group.cyclic_orders
        r = self.group.rank
        rows = []
        for j in range(r):
            row = []
            for k in range(r):
                num = self.matrix[k][j] * orders[j]
                row.append((num // orders[k]) % orders[j])
            rows.append(tuple(row))
        return GroupAutomorphism(self.group, tuple(rows))

    def index_map(self) -> np.ndarray:
        """Permutation p with p[index_of(x)] = index_of(self(x))."""
        coords = self.group.all_coords()
        mat = np.array(self.matrix, dtype=np.int64)
        orders = np.array(self.group.cyclic_orders, dtype=np.int64)
        images = coords @ mat.T % orders[None, :]
        flat = np.zeros(len(images), dtype=np.int64)
        for k, n in enumerate(self.group.cyclic_orders):
            flat = flat * n + images[:, k]
        return flat

    def to_json(self) -> dict:
        return {"matrix": [list(row) for row in self.matrix]}

    @classmethod
    def from_json(cls, group: FiniteAbelianGroup, data: dict) -> "GroupAutomorphism":
        return cls(group, tuple(tuple(row) for row in data["matrix"]))


def identity_automorphism(group: FiniteAbelianGroup) -> GroupAutomorphism:
    return scalar_automorphism(group, 1)


def negation_automorphism(group: FiniteAbelianGroup) -> GroupAutomorphism:
    return scalar_automorphism(group, -1)


def scalar_automorphism(group: FiniteAbelianGroup, k: int) -> GroupAutomorphism:
    r = group.rank
    return GroupAutomorphism(
        group, tuple(tuple(k if i == j else 0 for j in range(r)) for i in range(r))
    )


def kernel_of_I_plus(alpha: GroupAutomorphism) -> list[GroupElement]:
    """Elements g with g + alpha(g) = 0, in enumeration order."""
    out = []
    for g in alpha.group.elements():
        if (g + alpha(g)).is_zero:
            out.append(g)
    return out


def is_subgroup(group: FiniteAbelianGroup, elements: Iterable[GroupElement]) -> bool:
    elems = set()
    for g in elements:
        if g.group != group:
            return False
        elems.add(g.coords)
    if (0,) * group.rank not in elems:
        return False
    for a in elems:
        for b in elems:
            s = tuple((x + y) % n for x, y, n in zip(a, b, group.cyclic_orders))
            if s not in elems:
                return False
    return True


def restriction_is_minus_identity(
    alpha: GroupAutomorphism, subgroup: Iterable[GroupElement]
) -> bool:
    """True iff alpha(g) = -g for every g of the given subgroup."""
    elems = list(subgroup)
    if not is_subgroup(alpha.group, elems):
        raise ValueError("the provided elements do not form a subgroup")
    return all(alpha(g) == -g for g in elems)
