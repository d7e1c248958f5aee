"""Verification suites: each checkable claim run on catalog instances.

Every check returns a CheckReport whose verdict is an exact per-degree
comparison; randomized checks take a seeded Random instance and record
the seed so failures replay.  Suites are instance lists consumed by the
command-line front end; a suite passes iff every report does.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import models, pairs
from .cohomology import (LerayHirschDecomposition, TwistedComplex, betti,
                         pullback_cochain, pullback_on_cohomology)
from .complexes import (Complex, LocalSystem, SimplicialMap, Subcomplex,
                        product, pullback_system, subcomplex)
from .exactlin import Factorization, Q, QZERO, SparseMatrix, rank
from .pairs import check_coker_ladder, les_of_pair, random_ladder


class IncoherentInstance(Exception):
    pass


@dataclass
class CheckReport:
    check: str
    instance: str
    passed: bool
    details: dict = field(default_factory=dict)
    seed: int | None = None

    def to_json_dict(self) -> dict:
        return {"check": self.check, "instance": self.instance,
                "passed": self.passed, "details": self.details,
                "seed": self.seed}


# shared caches: products and twisted complexes are expensive to rebuild
_PRODUCT_CACHE: dict = {}
_TC_CACHE: dict = {}


def product_of(a: Complex, b: Complex):
    key = (id(a), id(b))
    got = _PRODUCT_CACHE.get(key)
    if got is None:
        got = product(a, b)
        _PRODUCT_CACHE[key] = got
    return got


def tc_for(c: Complex, s: LocalSystem, verify: bool = False) -> TwistedComplex:
    key = (id(c), s.fingerprint())
    got = _TC_CACHE.get(key)
    if got is None:
        got = TwistedComplex(c, s, verify=verify)
        _TC_CACHE[key] = got
    return got


def _dims_at(dims: list[int], k: int) -> int:
    return dims[k] if 0 <= k < len(dims) else 0


def check_main_theorem(name: str, x: Complex, sx: LocalSystem,
                       z: Complex | None, sz: LocalSystem | None,
                       xtilde: Complex, st: LocalSystem, r: int,
                       e: Complex | None = None,
                       se: LocalSystem | None = None) -> CheckReport:
    """Blow-up dimension identity
    dim H^k(X~) = dim H^k(X) + sum_{j=1}^{r-1} dim H^{k-2j}(Z), all k.

    With the exceptional-divisor model E supplied, additionally asserts
    dim H^k(E) - dim H^k(Z) = sum_{j=1}^{r-1} dim H^{k-2j}(Z).
    """
    if r < 2:
        raise IncoherentInstance("codimension r must be >= 2")
    if x.dim != xtilde.dim:
        raise IncoherentInstance("X and its blow-up model differ in dim")
    x_dims = tc_for(x, sx).betti_dims()
    xt_dims = tc_for(xtilde, st).betti_dims()
    z_dims = tc_for(z, sz).betti_dims() if z is not None else []
    top = x.dim
    expected = [_dims_at(x_dims, k)
                + sum(_dims_at(z_dims, k - 2 * j) for j in range(1, r))
                for k in range(top + 1)]
    computed = [_dims_at(xt_dims, k) for k in range(top + 1)]
    details = {"x": x_dims, "z": z_dims, "xtilde": xt_dims,
               "expected": expected, "r": r}
    ok = expected == computed
    if e is not None:
        e_dims = tc_for(e, se).betti_dims()
        lhs = [_dims_at(e_dims, k) - _dims_at(z_dims, k)
               for k in range(len(e_dims))]
        rhs = [sum(_dims_at(z_dims, k - 2 * j) for j in range(1, r))
               for k in range(len(e_dims))]
        details["e"] = e_dims
        details["e_identity"] = [lhs, rhs]
        ok = ok and lhs == rhs
    return CheckReport("main-theorem", name, ok, details)


def check_proj_bundle(name: str, x: Complex, s: LocalSystem, m: int,
                      rng=None, trials: int = 10) -> CheckReport:
    """Trivial projectivized-bundle formula on X x CP^m:
    dim H^k(product; pr1* L) = sum_{j=0}^m dim H^{k-2j}(X; L),
    plus a projection/reassembly round trip on planted random cocycles.
    """
    fiber_inst = models.build("cp1" if m == 1 else "cp2")
    prod, pr1, pr2 = product_of(x, fiber_inst.complex)
    ps = pullback_system(pr1, s)
    tc = tc_for(prod, ps)
    x_dims = tc_for(x, s).betti_dims()
    prod_dims = tc.betti_dims()
    expected = [sum(_dims_at(x_dims, k - 2 * j) for j in range(m + 1))
                for k in range(prod.dim + 1)]
    details = {"x": x_dims, "product": prod_dims, "expected": expected,
               "m": m}
    ok = prod_dims == expected
    roundtrips = 0
    if ok and rng is not None and trials:
        lh = LerayHirschDecomposition(x, s, prod, pr1, pr2,
                                      fiber_inst.complex, fiber_inst.h, m,
                                      prod_system=ps)
        lh.tc = tc  # share cached factorizations
        degrees = [k for k in range(prod.dim + 1) if lh.basis_for_degree(k)]
        degrees.sort(key=tc.n_cochains)
        degrees = degrees[:3]
        for i in range(trials if degrees else 0):
            k = degrees[i % len(degrees)]
            basis = lh.basis_for_degree(k)
            planted = {}
            for key, _ in basis:
                num = rng.randint(-3, 3)
                if num:
                    planted[key] = Q(num, rng.randint(1, 3))
            x_vec = lh.reassemble(planted, k)
            if k >= 1:
                noise = {rng.randrange(tc.n_cochains(k - 1)):
                         Q(rng.randint(-2, 2)) for _ in range(12)}
                for c, v in tc.coboundary_of(k - 1, noise).items():
                    nv = x_vec.get(c, QZERO) + v
                    if nv:
                        x_vec[c] = nv
                    else:
                        x_vec.pop(c, None)
            coeffs, _ = lh.decompose(x_vec, k)
            if coeffs != planted:
                details["roundtrip_failed"] = {"degree": k}
                ok = False
                break
            roundtrips += 1
    details["roundtrips"] = roundtrips
    return CheckReport("proj-bundle", name, ok, details)


def _fundamental_one_cycle(c: Complex) -> dict:
    """Generator of the 1-cycle space of a circle, first coefficient +1."""
    boundary = TwistedComplex(c, LocalSystem.trivial(c),
                              verify=False).delta(0).transpose()
    cycles = Factorization(boundary).kernel_basis()
    if len(cycles) != 1:
        raise IncoherentInstance("source is not a circle")
    z = cycles[0]
    lead = z[min(z)]
    return {i: v / lead for i, v in z.items()}


def check_pullback_injectivity(name: str, f: SimplicialMap,
                               s: LocalSystem,
                               circle_cover: bool = False) -> CheckReport:
    """Full column rank of f* on cohomology in every degree.

    For self-covers of the circle the normalized H^1 entry — the pairing
    of a pulled-back generator against the fundamental cycles — equals
    the covering degree and is reported as a witness.
    """
    mats, rep_src, rep_tgt = pullback_on_cohomology(f, s)
    per_degree = []
    ok = True
    for p, m in enumerate(mats):
        inj = rank(m) == m.cols
        per_degree.append(inj)
        ok = ok and inj
    details = {"injective": per_degree,
               "source_betti": rep_src.betti, "target_betti": rep_tgt.betti}
    if circle_cover and rep_tgt.betti[1] == 1 and rep_src.betti[1] == 1:
        alpha = rep_tgt.representatives[1][0]
        pulled = pullback_cochain(f, s, alpha, 1)
        z_src = _fundamental_one_cycle(f.source)
        z_tgt = _fundamental_one_cycle(f.target)
        pair = lambda a, z: sum((a.get(i, QZERO) * v for i, v in z.items()),
                                QZERO)
        deg = pair(pulled, z_src) / pair(alpha, z_tgt)
        details["covering_degree"] = str(deg)
    return CheckReport("pullback-injectivity", name, ok, details)


def check_gauge_invariance(name: str, c: Complex, s: LocalSystem,
                           trials: int, rng) -> CheckReport:
    base = tc_for(c, s).betti_dims()
    gauged_dims = []
    ok = True
    for _ in range(trials):
        g = {v: Q(rng.randint(1, 12), rng.randint(1, 12))
             for v in range(c.vertex_count)}
        dims = TwistedComplex(c, s.gauge(g)).betti_dims()
        gauged_dims.append(dims)
        ok = ok and dims == base
    return CheckReport("gauge-invariance", name, ok,
                       {"betti": base, "gauged": gauged_dims,
                        "trials": trials})


def check_les_and_ladder(name: str, x: Complex, z: Subcomplex,
                         s: LocalSystem) -> CheckReport:
    """LES exactness plus the cokernel bookkeeping identity
    dim H^k(X,Z) = dim coker(i*_{k-1}) + dim ker(i*_k)."""
    try:
        les = les_of_pair(x, z, s)
    except pairs.ExactnessFailure as exc:
        return CheckReport("les", name, False, {"failure": repr(exc.args)})
    book_ok = True
    for k in range(len(les.rel_dims)):
        coker = (les.sub_dims[k - 1] - rank(les.i[k - 1])) if k >= 1 else 0
        kernel = les.abs_dims[k] - rank(les.i[k])
        if les.rel_dims[k] != coker + kernel:
            book_ok = False
    return CheckReport("les", name, book_ok,
                       {"rel": les.rel_dims, "abs": les.abs_dims,
                        "sub": les.sub_dims,
                        "alternating_sum": les.alternating_sum()})


# ---------------------------------------------------------------------------
# suites


def _generic(c: Complex, weights) -> LocalSystem:
    return models.generic_system(c, weights)


_GEN_POOL = (Q(2), Q(3), Q(1, 2), Q(5, 3), Q(7, 2), Q(4, 3))


def _generic_n(c: Complex, n: int) -> LocalSystem:
    return models.generic_system(c, (_GEN_POOL * 3)[:n])


def _circle_cover(folds: int) -> SimplicialMap:
    src = models.build("circle", (3 * folds,)).complex
    tgt = models.build("circle", (3,)).complex
    return SimplicialMap(src, tgt, [v % 3 for v in range(3 * folds)])


def suite_main_theorem(rng) -> list[CheckReport]:
    out = []
    cp2 = models.build("cp2")
    standin = models.build("blowup_cp2_standin")
    pt = models.build("simplex", (0,)).complex
    out.append(check_main_theorem(
        "blow up a point in cp2 (standin S2xS2)", cp2.complex,
        LocalSystem.trivial(cp2.complex), pt, LocalSystem.trivial(pt),
        standin.complex, LocalSystem.trivial(standin.complex), 2))

    sigma2 = models.build("surface", (2,)).complex
    s = _generic_n(sigma2, 4)
    x, xp1, _ = product_of(sigma2, cp2.complex)
    xt, tp1, _ = product_of(sigma2, standin.complex)
    cp1 = models.build("cp1")
    e, ep1, _ = product_of(sigma2, cp1.complex)
    out.append(check_main_theorem(
        "blow up sigma2 x {pt} in sigma2 x cp2, generic system",
        x, pullback_system(xp1, s), sigma2, s,
        xt, pullback_system(tp1, s), 2,
        e=e, se=pullback_system(ep1, s)))

    out.append(check_main_theorem(
        "empty center: blow-up is the identity", cp2.complex,
        LocalSystem.trivial(cp2.complex), None, None,
        cp2.complex, LocalSystem.trivial(cp2.complex), 2))

    # injectivity of the pullback under the blow-down analog
    ident = SimplicialMap.identity(cp2.complex)
    out.append(check_pullback_injectivity(
        "identity on cp2", ident, LocalSystem.trivial(cp2.complex)))
    cover = _circle_cover(2)
    out.append(check_pullback_injectivity(
        "degree-2 circle cover, untwisted", cover,
        LocalSystem.trivial(cover.target), circle_cover=True))
    out.append(check_pullback_injectivity(
        "degree-2 circle cover, target monodromy 2", cover,
        _generic(cover.target, (Q(2),)), circle_cover=True))
    return out


def suite_proj_bundle(rng) -> list[CheckReport]:
    out = []
    instances = [("pt", models.build("simplex", (0,)).complex, 0),
                 ("circle", models.build("circle", (3,)).complex, 1),
                 ("sigma2", models.build("surface", (2,)).complex, 4)]
    for name, c, nloops in instances:
        for m in (1, 2):
            for sysname in ("trivial", "generic"):
                s = (LocalSystem.trivial(c) if sysname == "trivial"
                     else _generic_n(c, nloops))
                out.append(check_proj_bundle(
                    "%s x cp%d, %s system" % (name, m, sysname),
                    c, s, m, rng=rng))
    return out


def suite_gauge(rng) -> list[CheckReport]:
    out = []
    circ = models.build("circle", (3,)).complex
    out.append(check_gauge_invariance(
        "circle(3), monodromy 2", circ, _generic(circ, (Q(2),)), 10, rng))
    sigma2 = models.build("surface", (2,)).complex
    out.append(check_gauge_invariance(
        "sigma2, generic system", sigma2, _generic_n(sigma2, 4), 10, rng))
    torus = models.build("torus").complex
    out.append(check_gauge_invariance(
        "torus, trivial system", torus, LocalSystem.trivial(torus), 5, rng))
    return out


def _les_instances():
    tri = models.build("simplex", (2,)).complex
    circ = models.build("circle", (3,)).complex
    torus = models.build("torus")
    sigma2 = models.build("surface", (2,))
    cp2 = models.build("cp2")
    return [
        ("disc rel boundary", tri,
         subcomplex(tri, tri.n_simplices(1), close_faces=True), 0),
        ("circle rel point", circ, subcomplex(circ, [(0,)]), 1),
        ("torus rel circle factor", torus.complex,
         models.torus_circle_factor(torus), 2),
        ("sigma2 rel wedge of circles", sigma2.complex,
         models.surface_wedge_circles(sigma2), 4),
        ("cp2 rel cp1", cp2.complex, models.cp1_inside_cp2(cp2), 0),
    ]


def suite_les(rng) -> list[CheckReport]:
    out = []
    for name, x, z, nloops in _les_instances():
        for sysname in ("trivial", "generic"):
            s = (LocalSystem.trivial(x) if sysname == "trivial"
                 else _generic_n(x, nloops))
            out.append(check_les_and_ladder(
                "%s, %s system" % (name, sysname), x, z, s))
    circ = models.build("circle", (3,)).complex
    full = subcomplex(circ, circ.n_simplices(1), close_faces=True)
    out.append(check_les_and_ladder("identity pair (X, X)", circ, full,
                                    _generic(circ, (Q(2),))))
    return out


def suite_coker_ladder(rng) -> list[CheckReport]:
    out = []
    good = 0
    for _ in range(100):
        rep = check_coker_ladder(random_ladder(rng))
        if not (rep.hypotheses_ok and rep.coker2_dim == rep.coker3_dim
                and rep.induced_iso):
            out.append(CheckReport("coker-ladder", "random ladder", False,
                                   {"violations": rep.violations}))
            return out
        good += 1
    rejected = []
    for which in ("i1", "i2", "i3", "i4", "i5"):
        rep = check_coker_ladder(random_ladder(rng, violate=which))
        rejected.append(not rep.hypotheses_ok)
    out.append(CheckReport("coker-ladder", "100 random + 5 violating",
                           good == 100 and all(rejected),
                           {"passing": good, "rejected": rejected}))
    return out


SUITES = {
    "main-theorem": suite_main_theorem,
    "proj-bundle": suite_proj_bundle,
    "gauge": suite_gauge,
    "les": suite_les,
    "coker-ladder": suite_coker_ladder,
}


def run_suite(name: str, seed: int = 0) -> list[CheckReport]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    out = []
    for n in names:
        rng = random.Random(seed)
        for rep in SUITES[n](rng):
            rep.seed = seed
            out.append(rep)
    return out
