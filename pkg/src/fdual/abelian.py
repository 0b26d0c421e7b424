"""Finite abelian groups given as products of cyclic factors.

A group is named by a :class:`GroupSpec` holding the cyclic factor orders
(n1, ..., nk), written additively.  Elements are coordinate tuples reduced
mod the factor orders and are identified with indices 0..N-1 through the
mixed-radix encoding whose LAST coordinate varies fastest.  That encoding
is part of the on-disk formats (certificates, checkpoints) and must never
change.

Subsets of a group are :class:`ElementSet` bitmasks over element indices.
Characters never appear as a separate dual group: a :class:`PairingMatrix`
indexes them by group elements.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import lcm, prod
from typing import Iterable, Iterator, Sequence

import numpy as np

# Enumerating Aut(G) is brute force over generator images; this cap keeps a
# pathological group (e.g. Z_2^8) from blowing up.  Groups the toolkit
# targets (order <= 256, few factors) stay well below it.
DEFAULT_AUT_CAP = 1 << 18

MAX_GROUP_ORDER = 256


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group Z_n1 x ... x Z_nk in additive notation."""

    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            raise ValueError("group needs at least one cyclic factor")
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic factor orders must be >= 1, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def order(self) -> int:
        """Number of elements N."""
        return prod(self.orders)

    @cached_property
    def exponent(self) -> int:
        """lcm of the factor orders; every character value is an m-th root of unity."""
        return lcm(*self.orders)

    @cached_property
    def _weights(self) -> tuple[int, ...]:
        # mixed-radix place values, last coordinate fastest
        w = [1] * len(self.orders)
        for i in range(len(self.orders) - 2, -1, -1):
            w[i] = w[i + 1] * self.orders[i + 1]
        return tuple(w)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.rank:
            raise ValueError(
                f"expected {self.rank} coordinates, got {len(coords)}"
            )
        return tuple(int(c) % n for c, n in zip(coords, self.orders))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % n for x, n in zip(a, self.orders))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.orders))

    def index_of(self, coords: Sequence[int]) -> int:
        """Mixed-radix index of a coordinate tuple (reduced first)."""
        c = self.reduce(coords)
        return sum(ci * wi for ci, wi in zip(c, self._weights))

    def element(self, index: int) -> tuple[int, ...]:
        """Coordinate tuple of an element index; rejects out-of-range indices."""
        if not 0 <= index < self.order:
            raise ValueError(f"element index {index} out of range [0, {self.order})")
        coords = []
        for w, n in zip(self._weights, self.orders):
            coords.append((index // w) % n)
        return tuple(coords)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements in index order (itertools.product varies the last slot fastest)."""
        return itertools.product(*(range(n) for n in self.orders))

    def add_index(self, i: int, j: int) -> int:
        return self.index_of(self.add(self.element(i), self.element(j)))

    def neg_index(self, i: int) -> int:
        return self.index_of(self.neg(self.element(i)))

    def sub_index(self, i: int, j: int) -> int:
        return self.index_of(self.sub(self.element(i), self.element(j)))

    def element_order(self, coords: Sequence[int]) -> int:
        c = self.reduce(coords)
        o = 1
        for ci, n in zip(c, self.orders):
            if ci:
                o = lcm(o, n // _gcd(ci, n))
        return o

    def generator_indices(self) -> tuple[int, ...]:
        """Indices of the unit vectors e_1, ..., e_k."""
        out = []
        for i in range(self.rank):
            unit = [0] * self.rank
            unit[i] = 1 if self.orders[i] > 1 else 0
            out.append(self.index_of(unit))
        return tuple(out)

    def to_dict(self) -> dict:
        return {"orders": list(self.orders)}

    @classmethod
    def from_dict(cls, data: dict) -> "GroupSpec":
        if not isinstance(data, dict) or set(data) != {"orders"}:
            raise ValueError("group spec must be an object with exactly the key 'orders'")
        orders = data["orders"]
        if not isinstance(orders, list) or not orders:
            raise ValueError("group orders must be a non-empty list of integers")
        if any(not isinstance(n, int) or isinstance(n, bool) for n in orders):
            raise ValueError("group orders must be integers")
        return cls(tuple(orders))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


class ElementSet:
    """Immutable subset of element indices backed by an int bitmask."""

    __slots__ = ("mask", "_card")

    def __init__(self, mask: int = 0):
        if mask < 0:
            raise ValueError("bitmask must be non-negative")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "_card", mask.bit_count())

    def __setattr__(self, name, value):
        raise AttributeError("ElementSet is immutable")

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "ElementSet":
        mask = 0
        for i in indices:
            if i < 0:
                raise ValueError(f"negative element index {i}")
            mask |= 1 << i
        return cls(mask)

    @classmethod
    def from_coords(cls, spec: GroupSpec, coords_seq: Iterable[Sequence[int]]) -> "ElementSet":
        return cls.from_indices(spec.index_of(c) for c in coords_seq)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(self)

    def coords(self, spec: GroupSpec) -> list[tuple[int, ...]]:
        return [spec.element(i) for i in self]

    def with_element(self, i: int) -> "ElementSet":
        return ElementSet(self.mask | (1 << i))

    def __contains__(self, i: int) -> bool:
        return i >= 0 and (self.mask >> i) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def __len__(self) -> int:
        return self._card

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ElementSet) and self.mask == other.mask

    def __hash__(self) -> int:
        return hash(self.mask)

    def __repr__(self) -> str:
        return f"ElementSet({{{', '.join(map(str, self))}}})"


def translate(spec: GroupSpec, s: ElementSet, v: int) -> ElementSet:
    """The set s + v."""
    return ElementSet.from_indices(spec.add_index(i, v) for i in s)


def negate_set(spec: GroupSpec, s: ElementSet) -> ElementSet:
    return ElementSet.from_indices(spec.neg_index(i) for i in s)


def subgroup_generated(spec: GroupSpec, gens: ElementSet | Iterable[int]) -> ElementSet:
    """Smallest subgroup containing the generators (always contains 0)."""
    gen_list = list(gens)
    members = {0}
    queue = [0]
    while queue:
        x = queue.pop()
        for g in gen_list:
            y = spec.add_index(x, g)
            if y not in members:
                members.add(y)
                queue.append(y)
    return ElementSet.from_indices(members)


def stabilizer(spec: GroupSpec, s: ElementSet) -> ElementSet:
    """{h in G : h + s = s}; a subgroup of G.  Rejects the empty set."""
    if not s:
        raise ValueError("stabilizer of the empty set is undefined")
    fixers = [h for h in range(spec.order) if translate(spec, s, h) == s]
    return ElementSet.from_indices(fixers)


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairingMatrix:
    """Bilinear form B : G x G -> Z_m given by B(x, y) = sum x_i M_ij y_j mod m.

    The associated pairing is <x, y> = zeta_m^B(x, y).  Well-definedness
    (n_i * M_ij == 0 == M_ij * n_j mod m) is enforced at construction: every
    exactness argument downstream assumes it.
    """

    spec: GroupSpec
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = self.spec.rank
        m = self.spec.exponent
        rows = tuple(tuple(int(e) % m for e in row) for row in self.entries)
        if len(rows) != k or any(len(row) != k for row in rows):
            raise ValueError(f"pairing matrix must be {k}x{k}")
        for i in range(k):
            for j in range(k):
                e = rows[i][j]
                ni, nj = self.spec.orders[i], self.spec.orders[j]
                if (ni * e) % m != 0 or (e * nj) % m != 0:
                    raise ValueError(
                        f"entry M[{i}][{j}]={e} is not well-defined: "
                        f"needs n_i*M_ij == M_ij*n_j == 0 mod {m}"
                    )
        object.__setattr__(self, "entries", rows)

    def exponent(self, x: Sequence[int], y: Sequence[int]) -> int:
        """B(x, y) mod m for coordinate tuples x, y."""
        m = self.spec.exponent
        total = 0
        for i, xi in enumerate(x):
            if xi:
                row = self.entries[i]
                total += xi * sum(e * yj for e, yj in zip(row, y))
        return total % m

    def exponent_index(self, ti: int, xi: int) -> int:
        return self.exponent(self.spec.element(ti), self.spec.element(xi))

    @cached_property
    def is_nondegenerate(self) -> bool:
        """True iff x -> B(x, .) has trivial kernel (scan over G, gens suffice)."""
        gens = [self.spec.element(g) for g in self.spec.generator_indices()]
        for x in self.spec.elements():
            if any(x) and all(self.exponent(x, g) == 0 for g in gens):
                return False
        return True

    def transpose(self) -> "PairingMatrix":
        k = self.spec.rank
        return PairingMatrix(
            self.spec,
            tuple(tuple(self.entries[j][i] for j in range(k)) for i in range(k)),
        )

    def to_rows(self) -> list[list[int]]:
        return [list(row) for row in self.entries]


def standard_pairing(spec: GroupSpec) -> PairingMatrix:
    """Diagonal pairing M_ii = m / n_i; nondegenerate by construction."""
    m = spec.exponent
    k = spec.rank
    rows = tuple(
        tuple(m // spec.orders[i] if i == j else 0 for j in range(k))
        for i in range(k)
    )
    return PairingMatrix(spec, rows)


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """A group automorphism as a permutation table of element indices."""

    table: tuple[int, ...]

    def apply(self, i: int) -> int:
        return self.table[i]

    def map_set(self, s: ElementSet) -> ElementSet:
        return ElementSet.from_indices(self.table[i] for i in s)

    def is_identity(self) -> bool:
        return all(t == i for i, t in enumerate(self.table))

    def validate(self, spec: GroupSpec) -> None:
        """Exhaustively check bijectivity, pi(0)=0 and additivity; raises on failure."""
        n = spec.order
        if len(self.table) != n or sorted(self.table) != list(range(n)):
            raise ValueError("table is not a permutation of the element indices")
        if self.table[0] != 0:
            raise ValueError("automorphism must fix 0")
        for x in range(n):
            for y in range(x, n):
                if self.table[spec.add_index(x, y)] != spec.add_index(
                    self.table[x], self.table[y]
                ):
                    raise ValueError(f"not additive at ({x}, {y})")


@dataclass(frozen=True, eq=False)
class AutomorphismGroup:
    """Automorphisms of a group, tables stacked in a (A, N) int array.

    ``complete`` is False when enumeration was cut off at the cap; a partial
    list is still a valid set of automorphisms containing the identity, which
    is all symmetry pruning needs for soundness.
    """

    spec: GroupSpec
    tables: np.ndarray
    complete: bool

    def __len__(self) -> int:
        return int(self.tables.shape[0])

    def __getitem__(self, i: int) -> Automorphism:
        return Automorphism(tuple(int(v) for v in self.tables[i]))

    def __iter__(self) -> Iterator[Automorphism]:
        for i in range(len(self)):
            yield self[i]


@lru_cache(maxsize=None)
def _add_table(spec: GroupSpec) -> np.ndarray:
    """(N, N) table of index addition."""
    n = spec.order
    coords = np.array(list(spec.elements()), dtype=np.int64)
    orders = np.array(spec.orders, dtype=np.int64)
    weights = np.array(spec._weights, dtype=np.int64)
    summed = (coords[:, None, :] + coords[None, :, :]) % orders
    return (summed @ weights).astype(np.int16)


@lru_cache(maxsize=None)
def _sub_table(spec: GroupSpec) -> np.ndarray:
    """(N, N) table with entry [v, x] = index(x - v)."""
    n = spec.order
    coords = np.array(list(spec.elements()), dtype=np.int64)
    orders = np.array(spec.orders, dtype=np.int64)
    weights = np.array(spec._weights, dtype=np.int64)
    diff = (coords[None, :, :] - coords[:, None, :]) % orders
    return (diff @ weights).astype(np.int16)


def _multiple_table(spec: GroupSpec) -> np.ndarray:
    """(m+1, N) table of t*g for t = 0..m (row m equals row 0)."""
    m = spec.exponent
    n = spec.order
    add = _add_table(spec)
    out = np.zeros((m + 1, n), dtype=np.int16)
    row = np.zeros(n, dtype=np.int16)
    base = np.arange(n)
    for t in range(1, m + 1):
        row = add[row, base]
        out[t] = row
    return out


def _enumerate_aut_images(spec: GroupSpec, cap: int) -> tuple[list[tuple[int, ...]], bool]:
    """Generator-image tuples of all automorphisms, in lexicographic order.

    An image tuple (g_1, ..., g_k) with n_i * g_i = 0 defines a homomorphism
    e_i -> g_i; it is an automorphism iff the images generate G.  DFS prunes
    prefixes whose closure cannot grow back to |G|.
    """
    n = spec.order
    k = spec.rank
    mult = _multiple_table(spec)
    add = _add_table(spec)

    # slot i admits exactly the elements killed by n_i; when n_i is a
    # multiple of the exponent that is every element
    candidates: list[list[int]] = []
    for ni in spec.orders:
        t = ni % spec.exponent
        if t == 0:
            candidates.append(list(range(n)))
        else:
            candidates.append([g for g in range(n) if mult[t][g] == 0])

    # maximum closure growth still available at slot i (slots i..k-1 unchosen)
    tail_growth = [prod(spec.orders[i:]) for i in range(k)]

    results: list[tuple[int, ...]] = []
    truncated = False

    def closure_with(members: np.ndarray, g: int) -> np.ndarray:
        """members is a boolean membership mask of a subgroup; extend by g."""
        powers = [0]
        x = g
        while x != 0:
            powers.append(x)
            x = int(add[x, g])
        hits = np.flatnonzero(members)
        new = np.zeros_like(members)
        for p in powers:
            new[add[hits, p]] = True
        return new

    def order_in_quotient(members: np.ndarray, g: int) -> int:
        """Smallest t >= 1 with t*g inside the subgroup marked by members."""
        for t in range(1, spec.exponent + 1):
            if members[mult[t][g]]:
                return t
        raise AssertionError("exponent * g must land in every subgroup")

    def dfs(slot: int, members: np.ndarray, size: int, images: list[int]) -> bool:
        nonlocal truncated
        if slot == k:
            if size == n:
                results.append(tuple(images))
                if len(results) > cap:
                    truncated = True
                    results.pop()
                    return False
            return True
        if size * tail_growth[slot] < n:
            return True
        if slot == k - 1:
            # last slot: image g works iff |H| * ord(g mod H) == |G|
            need = n // size
            for g in candidates[slot]:
                if order_in_quotient(members, g) == need:
                    results.append(tuple(images + [g]))
                    if len(results) > cap:
                        truncated = True
                        results.pop()
                        return False
            return True
        for g in candidates[slot]:
            t = order_in_quotient(members, g)
            if t == 1:
                new_members, new_size = members, size
            else:
                new_members = closure_with(members, g)
                new_size = int(new_members.sum())
            images.append(g)
            keep_going = dfs(slot + 1, new_members, new_size, images)
            images.pop()
            if not keep_going:
                return False
        return True

    root = np.zeros(n, dtype=bool)
    root[0] = True
    dfs(0, root, 1, [])
    return results, not truncated


def _tables_from_images(spec: GroupSpec, image_tuples: Sequence[tuple[int, ...]]) -> np.ndarray:
    """Stack full index tables for automorphisms given by generator images."""
    n = spec.order
    k = spec.rank
    coords = np.array(list(spec.elements()), dtype=np.int64)  # (N, k)
    orders = np.array(spec.orders, dtype=np.int64)
    weights = np.array(spec._weights, dtype=np.int64)
    out = np.empty((len(image_tuples), n), dtype=np.int16)
    chunk = max(1, (1 << 22) // max(1, n * k))
    images = np.array(image_tuples, dtype=np.int64)  # (A, k) indices
    for lo in range(0, len(image_tuples), chunk):
        hi = min(lo + chunk, len(image_tuples))
        gc = coords[images[lo:hi]]  # (a, k, k): coords of each image
        mapped = np.einsum("xi,aij->axj", coords, gc) % orders
        out[lo:hi] = (mapped @ weights).astype(np.int16)
    return out


@lru_cache(maxsize=None)
def automorphism_group(spec: GroupSpec, cap: int = DEFAULT_AUT_CAP) -> AutomorphismGroup:
    """Enumerate Aut(G) by brute force over generator images.

    Returns the full group when its size is at most ``cap``; otherwise the
    first ``cap`` automorphisms in enumeration order, flagged incomplete.
    The identity is always present.  Requires |G| <= 256.
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    if spec.order > MAX_GROUP_ORDER:
        raise ValueError(
            f"automorphism enumeration supports |G| <= {MAX_GROUP_ORDER}, got {spec.order}"
        )
    image_tuples, complete = _enumerate_aut_images(spec, cap)
    identity = spec.generator_indices()
    if identity not in image_tuples:
        image_tuples = [identity] + image_tuples[: cap - 1]
    tables = _tables_from_images(spec, image_tuples)
    tables.setflags(write=False)
    return AutomorphismGroup(spec=spec, tables=tables, complete=complete)


def pairing_from_automorphism(base: PairingMatrix, alpha: Automorphism) -> PairingMatrix:
    """The pairing B'(x, y) = B(alpha(x), y); nondegenerate when base is.

    Every isomorphism G -> G^ is standard_pairing composed with some
    automorphism, so ranging alpha over Aut(G) ranges B' over all pairings.
    """
    spec = base.spec
    k = spec.rank
    gen_idx = spec.generator_indices()
    rows = []
    for i in range(k):
        a = spec.element(alpha.table[gen_idx[i]])
        row = []
        for j in range(k):
            row.append(sum(al * base.entries[l][j] for l, al in enumerate(a)) % spec.exponent)
        rows.append(tuple(row))
    return PairingMatrix(spec, tuple(rows))


# ---------------------------------------------------------------------------
# Affine-orbit canonical forms
# ---------------------------------------------------------------------------


class AffineReducer:
    """Orbit-minimum machinery for subsets under automorphisms + translations.

    The canonical form of a set S is the lexicographically smallest sorted
    index list among { pi(S) - v : pi in auts, v in pi(S) } (so every image
    contains 0).  With the full automorphism group this is constant on
    affine orbits; with a partial list it is still idempotent because the
    reduction iterates to a fixpoint.
    """

    def __init__(self, spec: GroupSpec, auts: AutomorphismGroup | Sequence[Automorphism]):
        self.spec = spec
        if isinstance(auts, AutomorphismGroup):
            tables = np.asarray(auts.tables, dtype=np.int16)
        else:
            tables = np.array([a.table for a in auts], dtype=np.int16)
            if tables.ndim != 2 or tables.shape[1] != spec.order:
                raise ValueError("automorphism tables must have one row per element")
        identity = np.arange(spec.order, dtype=np.int16)
        if not (tables == identity).all(axis=1).any():
            tables = np.vstack([identity[None, :], tables])
        self.tables = tables
        self.sub = _sub_table(spec)
        # single-word bitmask lane for |G| <= 64 (see is_canonical)
        if spec.order <= 64:
            self._bit = np.uint64(1) << np.arange(spec.order, dtype=np.uint64)
        else:
            self._bit = None

    def _orbit_images(self, idx: np.ndarray) -> np.ndarray:
        """All translated automorphic images containing 0, sorted rows."""
        images = self.tables[:, idx]  # (A, d)
        # entry [a, j, i] = index(pi_a(x_i) - pi_a(x_j))
        shifted = self.sub[images[:, :, None], images[:, None, :]]
        cand = np.sort(shifted, axis=2)
        return cand.reshape(-1, idx.shape[0])

    @staticmethod
    def _rows_less_than(rows: np.ndarray, ref: np.ndarray) -> np.ndarray:
        diff = rows.astype(np.int32) - ref.astype(np.int32)[None, :]
        nonzero = diff != 0
        first = np.argmax(nonzero, axis=1)
        has = nonzero.any(axis=1)
        vals = diff[np.arange(rows.shape[0]), first]
        return has & (vals < 0)

    def is_canonical(self, indices: Sequence[int]) -> bool:
        """True iff no image in the (single-pass) orbit is lexicographically smaller.

        Hot path of the search pruning.  For equal-size sets, sorted-list
        lexicographic order coincides with "which set owns the smallest
        element where they differ", so for |G| <= 64 each image is packed
        into one uint64 and the comparison is pure bit arithmetic, no
        sorting.  Larger groups fall back to sorting the image rows.
        """
        idx = np.asarray(indices, dtype=np.int64)
        d = idx.shape[0]
        if d == 1:
            return int(idx[0]) == 0
        images = self.tables[:, idx]  # (A, d)
        shifted = self.sub[images[:, :, None], images[:, None, :]]  # (A, d, d)
        if self._bit is not None:
            masks = np.bitwise_or.reduce(self._bit[shifted], axis=2)
            ref = np.uint64(np.bitwise_or.reduce(self._bit[idx]))
            diff = masks ^ ref
            lowest = diff & (~diff + np.uint64(1))
            smaller = (lowest & masks) != 0
            return not bool(smaller.any())
        cand = np.sort(shifted, axis=2).reshape(-1, d)
        return not bool(self._rows_less_than(cand, idx).any())

    def canonical_form(self, indices: Sequence[int]) -> tuple[int, ...]:
        """Lexicographic orbit minimum, iterated to a fixpoint."""
        cur = np.sort(np.asarray(indices, dtype=np.int64))
        while True:
            cand = self._orbit_images(cur)
            order = np.lexsort(cand.T[::-1])
            best = cand[order[0]].astype(np.int64)
            if (best == cur).all():
                return tuple(int(v) for v in cur)
            cur = best


def affine_canonical_form(
    spec: GroupSpec,
    s: ElementSet,
    auts: AutomorphismGroup | Sequence[Automorphism],
) -> ElementSet:
    """Canonical representative of the affine orbit of a nonempty set."""
    if not s:
        raise ValueError("canonical form of the empty set is undefined")
    reducer = AffineReducer(spec, auts)
    return ElementSet.from_indices(reducer.canonical_form(s.indices))
