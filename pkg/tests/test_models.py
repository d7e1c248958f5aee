"""Catalog models, the cp2 data asset, and system constructors."""

import random

import pytest

from novikov import models
from novikov.cohomology import TwistedComplex, betti
from novikov.complexes import LocalSystem
from novikov.exactlin import Q


def test_catalog_builds_and_validates():
    defaults = {"simplex": (2,), "sphere": (2,), "circle": (4,),
                "surface": (3,)}
    for name in models.CATALOG:
        inst = models.build(name, defaults.get(name, ()))
        inst.complex.validate()


def test_unknown_model_and_bad_params():
    with pytest.raises(models.UnknownModel):
        models.build("nonexistent")
    with pytest.raises(models.BadParams):
        models.build("circle", ())
    with pytest.raises(models.BadParams):
        models.build("circle", (2,))


def test_cp2_descriptor():
    inst = models.build("cp2")
    c = inst.complex
    assert c.f_vector() == (9, 36, 84, 90, 36)
    assert c.euler_characteristic() == 3
    assert models.is_closed_pseudomanifold(c)
    assert betti(c, LocalSystem.trivial(c),
                 with_representatives=False).betti == [1, 0, 1, 0, 1]


def test_cp2_asset_checksum_guard(tmp_path, monkeypatch):
    import hashlib
    from importlib import resources
    text = (resources.files("novikov") / "data" / "cp2_facets.txt").read_text()
    body = "\n".join(l for l in text.splitlines()
                     if not l.startswith("#")) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    for line in text.splitlines():
        if line.startswith("# sha256:"):
            assert line.split(":", 1)[1].strip() == digest


def test_surface_euler():
    for g in (1, 2, 3):
        c = models.build("surface", (g,)).complex
        assert c.euler_characteristic() == 2 - 2 * g


def test_sphere_untwisted():
    c = models.build("sphere", (3,)).complex
    assert betti(c, LocalSystem.trivial(c),
                 with_representatives=False).betti == [1, 0, 0, 1]


def test_generic_system_prescribed_monodromies():
    sigma2 = models.build("surface", (2,)).complex
    weights = (Q(2), Q(3), Q(1, 2), Q(5, 3))
    s = models.generic_system(sigma2, weights)
    loops = models.basis_loops(sigma2)
    assert len(loops) == 4
    for w, loop in zip(weights, loops):
        assert s.monodromy(loop) == w


def test_generic_system_loop_count_mismatch():
    c = models.build("sphere", (2,)).complex  # simply connected: 0 loops
    assert models.generic_system(c, ()).is_trivial()
    with pytest.raises(models.NotEnoughIndependentLoops):
        models.generic_system(c, (Q(2),))


def test_fundamental_cycles_pair_correctly():
    inst = models.build("cp2")
    tc = TwistedComplex(inst.complex, LocalSystem.trivial(inst.complex))
    # the stored degree-2 class pairs to +1 against the stored 2-cycle
    pairing = sum((inst.h.get(i, Q(0)) * v
                   for i, v in inst.fundamental_2cycle.items()), Q(0))
    assert pairing == 1
    assert tc.is_cocycle(2, inst.h)


def test_random_system_seeded_reproducible():
    c = models.build("torus").complex
    a = models.random_system(c, random.Random(42))
    b = models.random_system(c, random.Random(42))
    assert a.fingerprint() == b.fingerprint()
