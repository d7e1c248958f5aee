"""Twisted simplicial cochain complexes and their cohomology.

The coboundary twisted by a local system t transports the leading face
through the leading edge:

    (delta_t f)(v0..vp+1) = t(v0 v1) f(v1..vp+1)
                            + sum_{i>=1} (-1)^i f(v0..^vi..vp+1)

For t = 1 this is the classical simplicial coboundary; delta_t^2 = 0 is
exactly the multiplicative cocycle condition on t.  Cochains in degree p
take values in the fiber at their least vertex.
"""

from __future__ import annotations

from typing import Mapping

from .complexes import Complex, LocalSystem, SimplicialMap, pullback_system
from .exactlin import (EchelonReducer, Factorization, Q, QONE, QZERO,
                       SparseMatrix, rank)


class NotACocycle(Exception):
    pass


class SystemNotPulledBack(Exception):
    pass


class DecompositionFailed(Exception):
    pass


class CochainChain:
    """Shared rank / representative machinery for a chain of coboundary
    matrices; subclasses provide delta(p), n_cochains(p), top_degree()."""

    def __init__(self):
        self._delta: dict[int, SparseMatrix] = {}
        self._fact: dict[int, Factorization] = {}
        self._rank: dict[int, int] = {}

    def delta(self, p: int) -> SparseMatrix:  # pragma: no cover
        raise NotImplementedError

    def n_cochains(self, p: int) -> int:  # pragma: no cover
        raise NotImplementedError

    def top_degree(self) -> int:  # pragma: no cover
        raise NotImplementedError

    def verify_square_zero(self) -> None:
        for p in range(self.top_degree()):
            if not self.delta(p + 1).matmul(self.delta(p)).is_zero():
                raise AssertionError("delta^2 != 0 in degree %d" % p)

    def factorization(self, p: int) -> Factorization:
        f = self._fact.get(p)
        if f is None:
            f = Factorization(self.delta(p))
            self._fact[p] = f
            self._rank[p] = f.rank
        return f

    def delta_rank(self, p: int) -> int:
        if p < 0 or p > self.top_degree() - 1:
            return 0
        r = self._rank.get(p)
        if r is None:
            r = rank(self.delta(p))
            self._rank[p] = r
        return r

    def betti_dims(self) -> list[int]:
        """Per-degree twisted Betti numbers from exact ranks only."""
        return [self.n_cochains(p) - self.delta_rank(p) - self.delta_rank(p - 1)
                for p in range(self.top_degree() + 1)]

    def is_cocycle(self, p: int, v: Mapping) -> bool:
        return not self.delta(p).mul_vec(v)

    def coboundary_of(self, p: int, v: Mapping) -> dict:
        return self.delta(p).mul_vec(v)

    def representatives(self, p: int) -> list[dict]:
        """Deterministic representative cocycles for H^p.

        Basis of ker delta_p intersected with ker delta_{p-1}^T: over Q
        this complement of the coboundaries inside the cocycles has
        exactly Betti_p elements.
        """
        stacked = self.delta(p)
        if p >= 1:
            stacked = stacked.vstack(self.delta(p - 1).transpose())
        return Factorization(stacked).kernel_basis()

    def image_reducer(self, p: int) -> EchelonReducer:
        """Echelon span of im delta_{p-1} inside C^p."""
        red = EchelonReducer()
        if p >= 1:
            d = self.delta(p - 1)
            cols: dict[int, dict] = {}
            for (r, c), v in d.entries.items():
                cols.setdefault(c, {})[r] = v
            for c in sorted(cols):
                red.add(cols[c])
        return red

    def class_coordinates(self, p: int, v: Mapping,
                          reps: list[dict]) -> list:
        """Coordinates of the class [v] in the representative basis.

        Solves v = delta(prev) + sum c_i rep_i exactly; raises NotACocycle
        when v is no delta_t-cocycle.
        """
        if not self.is_cocycle(p, v):
            raise NotACocycle(p)
        d = self.delta(p - 1) if p >= 1 else SparseMatrix(self.n_cochains(p), 0)
        m = d.hstack(SparseMatrix.from_columns(reps, self.n_cochains(p)))
        sol = _solve_cached(m, v)
        if sol is None:
            raise NotACocycle((p, "not in span"))
        off = d.cols
        return [sol.get(off + i, QZERO) for i in range(len(reps))]


class TwistedComplex(CochainChain):
    """The chain of exact coboundary matrices delta_t per degree."""

    def __init__(self, base: Complex, system: LocalSystem,
                 verify: bool = True):
        super().__init__()
        system.validate()
        self.base = base
        self.system = system
        if verify:
            self.verify_square_zero()

    def top_degree(self) -> int:
        return self.base.dim

    def n_cochains(self, p: int) -> int:
        return len(self.base.n_simplices(p))

    def delta(self, p: int) -> SparseMatrix:
        """delta_t in degree p: rows (p+1)-simplices, cols p-simplices."""
        m = self._delta.get(p)
        if m is not None:
            return m
        cols = self.n_cochains(p)
        rows_simp = self.base.n_simplices(p + 1)
        m = SparseMatrix(len(rows_simp), cols)
        if p >= 0 and cols:
            idx = self.base.index(p)
            t = self.system.weight
            ent = m.entries
            for r, s in enumerate(rows_simp):
                c0 = idx[s[1:]]
                ent[(r, c0)] = t[(s[0], s[1])]
                sign = -1
                for i in range(1, len(s)):
                    face = s[:i] + s[i + 1:]
                    c = idx[face]
                    prev = ent.get((r, c))
                    v = (prev if prev is not None else QZERO) + sign
                    if v:
                        ent[(r, c)] = v
                    else:
                        del ent[(r, c)]
                    sign = -sign
        self._delta[p] = m
        return m

def _solve_cached(m: SparseMatrix, b: Mapping):
    from .exactlin import solve
    return solve(m, b)


class CohomologyReport:
    """Per-degree Betti numbers with verified representative cocycles."""

    def __init__(self, tc: TwistedComplex, with_representatives: bool = True):
        self.base = tc.base
        self.system = tc.system
        self.system_fingerprint = tc.system.fingerprint()
        self.betti = tc.betti_dims()
        self.representatives: list[list[dict]] = []
        if with_representatives:
            for p in range(len(self.betti)):
                reps = tc.representatives(p)
                if len(reps) != self.betti[p]:
                    raise AssertionError(
                        "representative count %d != betti %d in degree %d"
                        % (len(reps), self.betti[p], p))
                red = tc.image_reducer(p)
                for v in reps:
                    if not tc.is_cocycle(p, v):
                        raise AssertionError("representative not a cocycle")
                    if not red.reduce(v):
                        raise AssertionError("representative is a coboundary")
                self.representatives.append(reps)
        else:
            self.representatives = [[] for _ in self.betti]

    def euler_sum(self) -> int:
        return sum((-1) ** p * b for p, b in enumerate(self.betti))

    def __repr__(self):
        return "CohomologyReport(betti=%r)" % (self.betti,)


def coboundary_matrices(c: Complex, s: LocalSystem,
                        verify: bool = True) -> TwistedComplex:
    """Assemble the twisted cochain complex; delta^2 = 0 is verified."""
    return TwistedComplex(c, s, verify=verify)


def betti(c: Complex, s: LocalSystem,
          with_representatives: bool = True) -> CohomologyReport:
    """Twisted Betti numbers (and representatives) of (c, s)."""
    return CohomologyReport(TwistedComplex(c, s),
                            with_representatives=with_representatives)


def cup(tc: TwistedComplex, a: Mapping, p: int, f: Mapping, q: int,
        check: bool = True) -> dict:
    """Alexander-Whitney cup product of an untwisted p-cocycle with a
    twisted q-cocycle, with weight transport along the front face:

        (a cup f)(v0..vpq) = a(v0..vp) t(v0 vp) f(vp..vpq)

    The result is a delta_t-cocycle of degree p + q.
    """
    base = tc.base
    if check:
        if not TwistedComplex(base, LocalSystem.trivial(base),
                              verify=False).is_cocycle(p, a):
            raise NotACocycle(("untwisted factor", p))
        if not tc.is_cocycle(q, f):
            raise NotACocycle(("twisted factor", q))
    idx_p = base.index(p)
    idx_q = base.index(q)
    t = tc.system
    out = {}
    for i, s in enumerate(base.n_simplices(p + q)):
        front = s[:p + 1]
        back = s[p:]
        av = a.get(idx_p[front])
        if not av:
            continue
        fv = f.get(idx_q[back])
        if not fv:
            continue
        val = av * t.transport(s[0], s[p]) * fv
        if val:
            out[i] = val
    return out


def cup_untwisted(base: Complex, a: Mapping, p: int, f: Mapping, q: int) -> dict:
    """Plain Alexander-Whitney product of two untwisted cochains."""
    idx_p = base.index(p)
    idx_q = base.index(q)
    out = {}
    for i, s in enumerate(base.n_simplices(p + q)):
        av = a.get(idx_p[s[:p + 1]])
        if not av:
            continue
        fv = f.get(idx_q[s[p:]])
        if not fv:
            continue
        out[i] = av * fv
    return out


def pullback_cochain(f: SimplicialMap, s: LocalSystem, c: Mapping,
                     p: int) -> dict:
    """Pull a degree-p cochain back along a simplicial map.

    Image simplices are sorted with the permutation sign; degenerate
    images contribute zero; the value is transported from the fiber at
    the least image vertex to the fiber over the image of the least
    source vertex.
    """
    idx = f.target.index(p)
    out = {}
    for i, simplex in enumerate(f.source.n_simplices(p)):
        img = [f.vertex_image[v] for v in simplex]
        if len(set(img)) != len(img):
            continue
        sign = _sort_sign(img)
        key = tuple(sorted(img))
        j = idx.get(key)
        if j is None:
            continue
        cv = c.get(j)
        if not cv:
            continue
        val = sign * s.transport(img[0], key[0]) * cv
        if val:
            out[i] = val
    return out


def _sort_sign(seq) -> int:
    sign = 1
    lst = list(seq)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return sign


def pullback_on_cohomology(f: SimplicialMap, s: LocalSystem):
    """Matrices of f*: H^p(target; s) -> H^p(source; f*s) per degree.

    Returns (matrices, source report, target report); matrices[p] is a
    SparseMatrix with betti_src[p] rows and betti_tgt[p] columns.
    """
    s.validate()
    src_sys = pullback_system(f, s)
    tc_tgt = TwistedComplex(f.target, s)
    tc_src = TwistedComplex(f.source, src_sys)
    rep_tgt = CohomologyReport(tc_tgt)
    rep_src = CohomologyReport(tc_src)
    degrees = max(len(rep_tgt.betti), len(rep_src.betti))
    mats = []
    for p in range(degrees):
        bt = rep_tgt.betti[p] if p < len(rep_tgt.betti) else 0
        bs = rep_src.betti[p] if p < len(rep_src.betti) else 0
        m = SparseMatrix(bs, bt)
        for j in range(bt):
            beta = rep_tgt.representatives[p][j]
            pulled = pullback_cochain(f, s, beta, p)
            coords = tc_src.class_coordinates(p, pulled,
                                              rep_src.representatives[p])
            for i, v in enumerate(coords):
                if v:
                    m.entries[(i, j)] = v
        mats.append(m)
    return mats, rep_src, rep_tgt


class LerayHirschDecomposition:
    """Projection operators on a trivial projectivized bundle X x CP^m.

    The basis of H^k(X x CP^m; pr1* L) is {h^j cup pr1* alpha_i}; the
    operator for level j extracts the H^{k-2j}(X; L) coefficients of a
    class, and reassembly modulo coboundaries is exact.
    """

    def __init__(self, base: Complex, base_system: LocalSystem,
                 prod: Complex, pr1: SimplicialMap, pr2: SimplicialMap,
                 fiber: Complex, h: Mapping, m: int,
                 prod_system: LocalSystem | None = None):
        self.base_report = betti(base, base_system)
        expected = pullback_system(pr1, base_system)
        if prod_system is None:
            prod_system = expected
        elif prod_system.weight != expected.weight:
            raise SystemNotPulledBack()
        self.m = m
        self.prod = prod
        self.tc = TwistedComplex(prod, prod_system)
        trivial_prod = LocalSystem.trivial(prod)
        # powers of h on the product, as untwisted cocycles
        h_prod = pullback_cochain(pr2, LocalSystem.trivial(fiber), h, 2)
        self.h_powers: list = [None] * (m + 1)  # level 0 is the unit
        power = h_prod
        for j in range(1, m + 1):
            self.h_powers[j] = power
            if j < m:
                power = cup_untwisted(prod, h_prod, 2, power, 2 * j)
        self.base_system = base_system
        self.pr1 = pr1
        self._basis_cache: dict[int, tuple] = {}
        self._fact_cache: dict[int, tuple] = {}

    def basis_for_degree(self, k: int):
        """List of ((j, i), cocycle) for H^k of the product."""
        cached = self._basis_cache.get(k)
        if cached is not None:
            return cached
        out = []
        for j in range(self.m + 1):
            kb = k - 2 * j
            if kb < 0 or kb >= len(self.base_report.betti):
                continue
            for i, alpha in enumerate(self.base_report.representatives[kb]):
                pulled = pullback_cochain(self.pr1, self.base_system,
                                          alpha, kb)
                if j == 0:
                    vec = pulled
                else:
                    vec = cup(self.tc, self.h_powers[j], 2 * j, pulled, kb,
                              check=False)
                out.append(((j, i), vec))
        self._basis_cache[k] = out
        return out

    def decompose(self, x: Mapping, k: int):
        """Unique coefficients of [x] in the Leray-Hirsch basis.

        Returns ({(j, i): coefficient}, delta_solution) with
        x = delta(delta_solution) + sum coeff * basis, exactly.
        """
        if not self.tc.is_cocycle(k, x):
            raise NotACocycle(k)
        basis = self.basis_for_degree(k)
        cached = self._fact_cache.get(k)
        if cached is None:
            d = (self.tc.delta(k - 1) if k >= 1
                 else SparseMatrix(self.tc.n_cochains(k), 0))
            mat = d.hstack(SparseMatrix.from_columns(
                [vec for _, vec in basis], self.tc.n_cochains(k)))
            cached = (Factorization(mat), d.cols)
            self._fact_cache[k] = cached
        fact, off = cached
        sol = fact.solve(x)
        if sol is None:
            raise DecompositionFailed(k)
        coeffs = {}
        for idx, (ji, _) in enumerate(basis):
            v = sol.get(off + idx, QZERO)
            if v:
                coeffs[ji] = v
        delta_part = {c: v for c, v in sol.items() if c < off}
        return coeffs, delta_part

    def project(self, x: Mapping, k: int, j: int) -> dict:
        """Coefficients of level j: a vector over the H^{k-2j}(X) basis."""
        coeffs, _ = self.decompose(x, k)
        return {i: v for (jj, i), v in coeffs.items() if jj == j}

    def reassemble(self, coeffs: Mapping, k: int) -> dict:
        out: dict = {}
        for ji, vec in self.basis_for_degree(k):
            cv = coeffs.get(ji)
            if not cv:
                continue
            for c, v in vec.items():
                nv = out.get(c, QZERO) + cv * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)
        return out
