from __future__ import annotations

import random

import pytest

from fdual.abelian import (
    AffineReducer,
    Automorphism,
    ElementSet,
    GroupSpec,
    PairingMatrix,
    affine_canonical_form,
    automorphism_group,
    negate_set,
    pairing_from_automorphism,
    stabilizer,
    standard_pairing,
    subgroup_generated,
    translate,
)

Z4 = GroupSpec((4,))
Z2Z4 = GroupSpec((2, 4))
SPEC_POOL = [
    GroupSpec(o)
    for o in [(2,), (3,), (4,), (2, 2), (6,), (8,), (2, 4), (2, 2, 2), (9,),
              (3, 3), (12,), (2, 6), (16,), (2, 8), (4, 4), (2, 2, 4),
              (2, 2, 2, 2), (8, 8), (2, 2, 4, 4)]
]


class TestGroupSpec:
    def test_element_arithmetic(self):
        assert Z4.add((3,), (2,)) == (1,)
        assert Z2Z4.add((1, 3), (1, 1)) == (0, 0)
        assert Z4.neg((1,)) == (3,)
        assert Z4.neg((0,)) == (0,)
        a = (1, 2)
        assert Z2Z4.add(a, Z2Z4.zero()) == a

    def test_mixed_radix_indexing(self):
        # last coordinate varies fastest: (1,2) -> 1*4 + 2
        assert Z2Z4.index_of((1, 2)) == 6
        assert Z2Z4.element(6) == (1, 2)

    def test_index_bijection(self):
        for spec in SPEC_POOL:
            seen = set()
            for i, coords in enumerate(spec.elements()):
                assert spec.index_of(coords) == i
                assert spec.element(i) == coords
                seen.add(coords)
            assert len(seen) == spec.order

    def test_index_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Z4.element(4)
        with pytest.raises(ValueError):
            Z4.element(-1)

    def test_orders_validated(self):
        with pytest.raises(ValueError):
            GroupSpec(())
        with pytest.raises(ValueError):
            GroupSpec((0, 2))

    def test_exponent_divides_order(self):
        for spec in SPEC_POOL:
            assert spec.order % spec.exponent == 0
            assert all(spec.exponent % n == 0 for n in spec.orders)


class TestElementSet:
    def test_roundtrip_and_cardinality(self):
        s = ElementSet.from_indices([5, 1, 3])
        assert s.indices == (1, 3, 5)
        assert len(s) == 3
        assert 3 in s and 2 not in s

    def test_translate_and_negate(self):
        s = ElementSet.from_indices([0, 1])
        assert translate(Z4, s, 2).indices == (2, 3)
        assert negate_set(Z4, s).indices == (0, 3)


class TestSubgroups:
    def test_generated_examples(self):
        assert subgroup_generated(Z4, [1]).indices == (0, 1, 2, 3)
        assert subgroup_generated(Z4, [2]).indices == (0, 2)
        z22 = GroupSpec((2, 2))
        gens = [z22.index_of((1, 0)), z22.index_of((0, 1))]
        assert len(subgroup_generated(z22, gens)) == 4

    def test_generated_closed_under_add_and_neg(self):
        rng = random.Random(11)
        for spec in SPEC_POOL[:12]:
            gens = rng.sample(range(spec.order), min(2, spec.order))
            h = subgroup_generated(spec, gens)
            for a in h:
                assert spec.neg_index(a) in h
                for b in h:
                    assert spec.add_index(a, b) in h

    def test_stabilizer_examples(self):
        assert stabilizer(Z4, ElementSet.from_indices([0, 2])).indices == (0, 2)
        assert stabilizer(Z4, ElementSet.from_indices([0, 1])).indices == (0,)
        whole = ElementSet.from_indices(range(4))
        assert stabilizer(Z4, whole) == whole

    def test_stabilizer_is_subgroup(self):
        rng = random.Random(13)
        for spec in SPEC_POOL[:12]:
            size = rng.randint(1, spec.order)
            s = ElementSet.from_indices(rng.sample(range(spec.order), size))
            st = stabilizer(spec, s)
            assert 0 in st
            for a in st:
                for b in st:
                    assert spec.add_index(a, b) in st

    def test_stabilizer_empty_rejected(self):
        with pytest.raises(ValueError):
            stabilizer(Z4, ElementSet())


class TestPairing:
    def test_standard_diagonal(self):
        assert standard_pairing(Z4).entries == ((1,),)
        assert standard_pairing(Z2Z4).entries == ((2, 0), (0, 1))
        big = standard_pairing(GroupSpec((2, 2, 4, 4)))
        assert [big.entries[i][i] for i in range(4)] == [2, 2, 1, 1]

    def test_standard_nondegenerate_everywhere(self):
        for spec in SPEC_POOL:
            if spec.order <= 64:
                assert standard_pairing(spec).is_nondegenerate

    def test_order64_pairing_nondegenerate(self, order64_pairing):
        assert order64_pairing.is_nondegenerate

    def test_degenerate_matrices(self):
        z2 = GroupSpec((2,))
        assert not PairingMatrix(z2, ((0,),)).is_nondegenerate
        assert not PairingMatrix(Z4, ((2,),)).is_nondegenerate

    def test_ill_defined_rejected(self):
        # Z2 x Z4 with exponent 4: entry 1 in the Z2 row is not well-defined
        with pytest.raises(ValueError):
            PairingMatrix(Z2Z4, ((1, 0), (0, 1)))

    def test_exponent_examples(self, order64_pairing):
        v = (1, 1, 3, 2)
        assert order64_pairing.exponent(v, v) == 0
        assert standard_pairing(Z4).exponent((1,), (1,)) == 1
        spec = order64_pairing.spec
        zero = spec.zero()
        for x in list(spec.elements())[:8]:
            assert order64_pairing.exponent(zero, x) == 0

    def test_bilinearity_sampled(self):
        rng = random.Random(17)
        for spec in SPEC_POOL[:12]:
            pairing = standard_pairing(spec)
            m = spec.exponent
            for _ in range(30):
                x, y, z = (
                    spec.element(rng.randrange(spec.order)) for _ in range(3)
                )
                left = pairing.exponent(spec.add(x, y), z)
                assert left == (pairing.exponent(x, z) + pairing.exponent(y, z)) % m
                right = pairing.exponent(x, spec.add(y, z))
                assert right == (pairing.exponent(x, y) + pairing.exponent(x, z)) % m


class TestAutomorphisms:
    @pytest.mark.parametrize(
        "orders,count",
        [((2, 2), 6), ((4,), 2), ((2, 4), 8), ((3,), 2), ((8,), 4), ((2, 2, 2), 168)],
    )
    def test_group_sizes(self, orders, count):
        group = automorphism_group(GroupSpec(orders))
        assert len(group) == count
        assert group.complete

    def test_z4_tables(self):
        tables = sorted(a.table for a in automorphism_group(Z4))
        assert tables == [(0, 1, 2, 3), (0, 3, 2, 1)]

    def test_identity_always_included(self):
        for spec in SPEC_POOL[:10]:
            group = automorphism_group(spec)
            assert any(a.is_identity() for a in group)

    def test_tables_are_homomorphisms(self):
        # exhaustive pair check on full groups of modest order, sampled rows
        # for the big ones
        rng = random.Random(23)
        for spec in SPEC_POOL:
            if spec.order > 64:
                continue
            group = automorphism_group(spec)
            picks = range(len(group)) if len(group) <= 60 else rng.sample(
                range(len(group)), 40
            )
            for i in picks:
                group[i].validate(spec)

    def test_every_table_is_additive_vectorized(self):
        # pi(x + y) == pi(x) + pi(y) for every returned table and every pair,
        # exhaustively, including the order-64 groups with 10^5+ automorphisms
        import numpy as np

        from fdual.abelian import _add_table

        for spec in SPEC_POOL:
            if spec.order > 64:
                continue
            group = automorphism_group(spec)
            add = _add_table(spec).astype(np.int64)
            tables = group.tables.astype(np.int64)
            n = spec.order
            chunk = max(1, (1 << 24) // (n * n))
            for lo in range(0, len(group), chunk):
                block = tables[lo : lo + chunk]
                lhs = block[:, add]  # pi(x + y)
                rhs = add[block[:, :, None], block[:, None, :]]  # pi(x) + pi(y)
                assert (lhs == rhs).all(), spec.orders
                assert (block[:, 0] == 0).all()

    @pytest.mark.parametrize("orders,count", [((8, 8), 1536), ((2, 2, 4, 4), 147456)])
    def test_order64_group_sizes(self, orders, count):
        # |GL_2(Z/8)| = 2^8 * |GL_2(F_2)| = 1536; the mixed group's order
        # comes out of the endomorphism-unit count for type (1,1,2,2)
        group = automorphism_group(GroupSpec(orders))
        assert len(group) == count
        assert group.complete

    def test_cap_truncates_and_flags(self):
        group = automorphism_group(GroupSpec((2, 2)), cap=2)
        assert len(group) <= 2
        assert not group.complete
        assert any(a.is_identity() for a in group)

    def test_cap_rejected(self):
        with pytest.raises(ValueError):
            automorphism_group(Z4, cap=0)

    def test_order_limit(self):
        with pytest.raises(ValueError):
            automorphism_group(GroupSpec((2,) * 9))


class TestPairingFromAutomorphism:
    def test_order64_pairing_arises_from_swap(self, order64_spec, order64_pairing):
        # swapping the two order-4 coordinates turns the standard pairing
        # into the pairing used by the order-64 instance
        base = standard_pairing(order64_spec)
        swap_images = [
            order64_spec.index_of((1, 0, 0, 0)),
            order64_spec.index_of((0, 1, 0, 0)),
            order64_spec.index_of((0, 0, 0, 1)),
            order64_spec.index_of((0, 0, 1, 0)),
        ]
        table = [0] * order64_spec.order
        for i, coords in enumerate(order64_spec.elements()):
            image = order64_spec.zero()
            for slot, c in enumerate(coords):
                scaled = tuple(
                    (c * v) % n
                    for v, n in zip(order64_spec.element(swap_images[slot]), order64_spec.orders)
                )
                image = order64_spec.add(image, scaled)
            table[i] = order64_spec.index_of(image)
        alpha = Automorphism(tuple(table))
        alpha.validate(order64_spec)
        assert pairing_from_automorphism(base, alpha).entries == order64_pairing.entries

    def test_composed_pairings_nondegenerate(self):
        rng = random.Random(29)
        for spec in SPEC_POOL[:10]:
            base = standard_pairing(spec)
            group = automorphism_group(spec)
            for _ in range(5):
                alpha = group[rng.randrange(len(group))]
                assert pairing_from_automorphism(base, alpha).is_nondegenerate


class TestCanonicalForm:
    def test_examples(self):
        auts = automorphism_group(Z4)
        assert affine_canonical_form(Z4, ElementSet.from_indices([2, 3]), auts).indices == (0, 1)
        assert affine_canonical_form(Z4, ElementSet.from_indices([0, 2]), auts).indices == (0, 2)

    def test_idempotent(self):
        rng = random.Random(31)
        for spec in SPEC_POOL[:12]:
            auts = automorphism_group(spec)
            for _ in range(20):
                size = rng.randint(1, min(6, spec.order))
                s = ElementSet.from_indices(rng.sample(range(spec.order), size))
                c1 = affine_canonical_form(spec, s, auts)
                assert affine_canonical_form(spec, c1, auts) == c1

    def test_constant_on_orbits(self):
        rng = random.Random(37)
        for spec in SPEC_POOL[:12]:
            auts = automorphism_group(spec)
            for _ in range(15):
                size = rng.randint(1, min(5, spec.order))
                s = ElementSet.from_indices(rng.sample(range(spec.order), size))
                canon = affine_canonical_form(spec, s, auts)
                alpha = auts[rng.randrange(len(auts))]
                image = alpha.map_set(s)
                v = rng.choice(image.indices)
                moved = translate(spec, image, spec.neg_index(v))
                assert 0 in moved
                assert affine_canonical_form(spec, moved, auts) == canon

    def test_is_canonical_matches_fixpoint(self):
        rng = random.Random(41)
        for spec in SPEC_POOL[:12]:
            reducer = AffineReducer(spec, automorphism_group(spec))
            for _ in range(40):
                size = rng.randint(1, min(6, spec.order))
                rest = sorted(rng.sample(range(1, spec.order), size - 1)) if size > 1 else []
                node = (0, *rest)
                assert reducer.is_canonical(node) == (reducer.canonical_form(node) == node)

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            affine_canonical_form(Z4, ElementSet(), automorphism_group(Z4))
