"""Twisted cochain complexes: coboundaries, Betti numbers, cup products,
pullbacks, and the product-bundle decomposition."""

import random

import pytest

from novikov import models
from novikov.cohomology import (LerayHirschDecomposition, TwistedComplex,
                                betti, cup, cup_untwisted, pullback_cochain,
                                pullback_on_cohomology)
from novikov.complexes import (LocalSystem, SimplicialMap, product,
                               pullback_system)
from novikov.exactlin import Q, rank


def test_square_zero_random_systems():
    for name, params, nloops in (("circle", (4,), 1), ("torus", (), 2),
                                 ("surface", (2,), 4), ("sphere", (2,), 0)):
        c = models.build(name, params).complex
        for seed in range(5):
            s = models.random_system(c, random.Random(seed))
            TwistedComplex(c, s, verify=True)  # raises on delta^2 != 0


def test_circle_vanishing_and_trivial():
    c = models.build("circle", (3,)).complex
    assert TwistedComplex(c, models.generic_system(c, (Q(2),))).betti_dims() \
        == [0, 0]
    assert TwistedComplex(c, LocalSystem.trivial(c)).betti_dims() == [1, 1]


def test_surface_genus2_dims():
    c = models.build("surface", (2,)).complex
    s = models.generic_system(c, (Q(2), Q(3), Q(1, 2), Q(5, 3)))
    assert TwistedComplex(c, s).betti_dims() == [0, 2, 0]
    assert TwistedComplex(c, LocalSystem.trivial(c)).betti_dims() == [1, 4, 1]


def test_twisted_euler_matches_characteristic():
    for name, params in (("circle", (5,)), ("torus", ()), ("surface", (2,)),
                         ("cp2", ())):
        c = models.build(name, params).complex
        for seed in range(3):
            s = models.random_system(c, random.Random(10 + seed))
            dims = TwistedComplex(c, s).betti_dims()
            assert (sum((-1) ** k * d for k, d in enumerate(dims))
                    == c.euler_characteristic())


def test_representatives_are_cocycles_not_coboundaries():
    c = models.build("torus").complex
    rep = betti(c, LocalSystem.trivial(c))
    tc = TwistedComplex(c, LocalSystem.trivial(c))
    for p, reps in enumerate(rep.representatives):
        assert len(reps) == rep.betti[p]
        red = tc.image_reducer(p)
        for v in reps:
            assert tc.is_cocycle(p, v)
            assert red.reduce(v)  # nonzero residue mod coboundaries


def test_cup_is_cocycle_and_nonzero_on_cp2():
    inst = models.build("cp2")
    tc = TwistedComplex(inst.complex, LocalSystem.trivial(inst.complex))
    hh = cup(tc, inst.h, 2, inst.h, 2)
    assert tc.is_cocycle(4, hh)
    assert tc.image_reducer(4).reduce(hh)  # h cup h != 0 in H^4
    pairing = sum((hh.get(i, Q(0)) * v
                   for i, v in inst.fundamental_top_cycle.items()), Q(0))
    assert pairing != 0


def test_cup_with_coboundary_is_coboundary():
    c = models.build("torus").complex
    tc = TwistedComplex(c, LocalSystem.trivial(c))
    rng = random.Random(2)
    a = tc.representatives(1)[0]
    noise = {rng.randrange(tc.n_cochains(0)): Q(rng.randint(1, 3))
             for _ in range(4)}
    db = tc.coboundary_of(0, noise)
    prod = cup(tc, a, 1, db, 1, check=False)
    assert tc.is_cocycle(2, prod)
    assert not tc.image_reducer(2).reduce(prod)


def test_pullback_cochain_is_chain_map():
    circ6 = models.build("circle", (6,)).complex
    circ3 = models.build("circle", (3,)).complex
    f = SimplicialMap(circ6, circ3, [v % 3 for v in range(6)])
    s = models.generic_system(circ3, (Q(3),))
    fs = pullback_system(f, s)
    tc_t = TwistedComplex(circ3, s)
    tc_s = TwistedComplex(circ6, fs)
    rng = random.Random(8)
    for _ in range(5):
        c0 = {rng.randrange(3): Q(rng.randint(-3, 3)) for _ in range(2)}
        lhs = pullback_cochain(f, s, tc_t.coboundary_of(0, c0), 1)
        rhs = tc_s.coboundary_of(0, pullback_cochain(f, s, c0, 0))
        assert lhs == rhs


def test_pullback_functorial():
    circ12 = models.build("circle", (12,)).complex
    circ6 = models.build("circle", (6,)).complex
    circ3 = models.build("circle", (3,)).complex
    f = SimplicialMap(circ12, circ6, [v % 6 for v in range(12)])
    g = SimplicialMap(circ6, circ3, [v % 3 for v in range(6)])
    gf = g.compose(f)
    s = LocalSystem.trivial(circ3)
    gs = pullback_system(g, s)
    c = {0: Q(1), 2: Q(-2, 3)}
    step = pullback_cochain(f, gs, pullback_cochain(g, s, c, 1), 1)
    assert step == pullback_cochain(gf, s, c, 1)


def test_pullback_on_cohomology_identity():
    c = models.build("cp2").complex
    s = LocalSystem.trivial(c)
    mats, rep_src, rep_tgt = pullback_on_cohomology(
        SimplicialMap.identity(c), s)
    for p, m in enumerate(mats):
        assert m.rows == m.cols == rep_tgt.betti[p]
        assert rank(m) == m.cols


def test_leray_hirsch_roundtrip_torus_cp1():
    base = models.build("circle", (3,)).complex
    fiber_inst = models.build("cp1")
    prod, pr1, pr2 = product(base, fiber_inst.complex)
    s = LocalSystem.trivial(base)
    lh = LerayHirschDecomposition(base, s, prod, pr1, pr2,
                                  fiber_inst.complex, fiber_inst.h, 1)
    rng = random.Random(6)
    for k in range(prod.dim + 1):
        basis = lh.basis_for_degree(k)
        assert len(basis) == lh.tc.betti_dims()[k]
        planted = {key: Q(rng.randint(-3, 3)) for key, _ in basis}
        planted = {k2: v for k2, v in planted.items() if v}
        vec = lh.reassemble(planted, k)
        if k >= 1:
            noise = {rng.randrange(lh.tc.n_cochains(k - 1)): Q(1)
                     for _ in range(3)}
            for cidx, v in lh.tc.coboundary_of(k - 1, noise).items():
                nv = vec.get(cidx, Q(0)) + v
                if nv:
                    vec[cidx] = nv
                else:
                    vec.pop(cidx, None)
        coeffs, _ = lh.decompose(vec, k)
        assert coeffs == planted
