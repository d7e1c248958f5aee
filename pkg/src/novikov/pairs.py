"""Relative twisted cohomology, the long exact sequence of a pair, and
the cokernel five-lemma checker.

Relative cochains of (X, Z) are the cochains of X that vanish on Z,
indexed by the simplices of X outside Z.  The twisted coboundary of such
a cochain again vanishes on Z (every face of a Z-simplex lies in Z), so
restricting rows and columns of delta_t to the outside simplices gives a
genuine subcomplex of the twisted cochain complex.  Its cohomology is
the relative twisted cohomology, and the evident short exact sequence of
cochain complexes

    0 -> C*(X, Z) -> C*(X) -> C*(Z) -> 0

induces the long exact sequence computed here with explicit matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cohomology import CochainChain, TwistedComplex
from .complexes import (Complex, LocalSystem, SimplicialMap, Subcomplex,
                        pullback_system)
from .exactlin import EchelonReducer, Q, SparseMatrix, rank


class ExactnessFailure(Exception):
    """A node of a long exact sequence where im != ker; carries
    (degree, group) with group in {'rel', 'abs', 'sub'}."""


class RowNotExact(Exception):
    pass


class SquareNotCommuting(Exception):
    pass


class HypothesisViolated(Exception):
    """Raised only on demand; hypothesis gaps are normally reported."""


class RelativeComplex(CochainChain):
    """Twisted cochain complex of the cochains on X vanishing on Z."""

    def __init__(self, base: Complex, sub: Subcomplex, system: LocalSystem,
                 verify: bool = True):
        super().__init__()
        sub.validate()
        self.base = base
        self.sub = sub
        self.system = system
        self.full = TwistedComplex(base, system, verify=False)
        # per degree: global indices of the simplices outside Z, and the
        # inverse position map
        self._outside: dict[int, list[int]] = {}
        self._pos: dict[int, dict[int, int]] = {}
        if verify:
            self.verify_square_zero()

    def outside(self, p: int) -> list[int]:
        o = self._outside.get(p)
        if o is None:
            contains = self.sub.contains
            o = [i for i, s in enumerate(self.base.n_simplices(p))
                 if not contains(s)]
            self._outside[p] = o
            self._pos[p] = {g: k for k, g in enumerate(o)}
        return o

    def top_degree(self) -> int:
        return self.base.dim

    def n_cochains(self, p: int) -> int:
        return len(self.outside(p))

    def delta(self, p: int) -> SparseMatrix:
        m = self._delta.get(p)
        if m is not None:
            return m
        full = self.full.delta(p)
        self.outside(p), self.outside(p + 1)
        cpos = self._pos[p]
        rpos = self._pos[p + 1]
        m = SparseMatrix(len(rpos), len(cpos))
        for (r, c), v in full.entries.items():
            rr = rpos.get(r)
            if rr is not None:
                cc = cpos.get(c)
                if cc is not None:
                    m.entries[(rr, cc)] = v
        self._delta[p] = m
        return m

    def extend(self, p: int, v) -> dict:
        """Relative cochain -> cochain on X (zero on Z), global indices."""
        o = self.outside(p)
        return {o[k]: x for k, x in v.items() if x}

    def restrict(self, p: int, v, strict: bool = True) -> dict:
        """Cochain on X -> relative coordinates; with strict, refuse
        input not vanishing on Z."""
        self.outside(p)
        pos = self._pos[p]
        out = {}
        for g, x in v.items():
            if not x:
                continue
            k = pos.get(g)
            if k is None:
                if strict:
                    raise ValueError("cochain does not vanish on Z")
                continue
            out[k] = x
        return out


def relative_betti(x: Complex, z: Subcomplex, s: LocalSystem,
                   with_representatives: bool = False):
    """Betti numbers (and optionally representatives) of the pair."""
    rc = RelativeComplex(x, z, s)
    dims = rc.betti_dims()
    reps = None
    if with_representatives:
        reps = [rc.representatives(p) for p in range(x.dim + 1)]
        for p, r in enumerate(reps):
            if len(r) != dims[p]:
                raise AssertionError("representative count mismatch")
    return rc, dims, reps


def _map_matrix(images: list[dict], chain: CochainChain, p: int,
                reps: list[dict]) -> SparseMatrix:
    """Matrix of a cohomology map from per-source-basis image cocycles."""
    cols = []
    for v in images:
        coords = chain.class_coordinates(p, v, reps)
        cols.append({i: c for i, c in enumerate(coords) if c})
    return SparseMatrix.from_columns(cols, len(reps))


@dataclass
class PairLES:
    """Long exact sequence of a pair with explicit matrices.

    Maps per degree k: j[k]: H^k(X,Z) -> H^k(X), restriction
    i[k]: H^k(X) -> H^k(Z), connecting d[k]: H^k(Z) -> H^{k+1}(X,Z)
    (zero map in the top degree).
    """
    rel_dims: list[int]
    abs_dims: list[int]
    sub_dims: list[int]
    j: list[SparseMatrix]
    i: list[SparseMatrix]
    d: list[SparseMatrix]

    def alternating_sum(self) -> int:
        return sum((-1) ** k * (self.rel_dims[k] - self.abs_dims[k]
                                + self.sub_dims[k])
                   for k in range(len(self.rel_dims)))

    def verify_exactness(self) -> None:
        top = len(self.rel_dims) - 1
        for k in range(top + 1):
            incoming = self.d[k - 1] if k >= 1 else None
            _node(incoming, self.j[k], self.rel_dims[k], (k, "rel"))
            _node(self.j[k], self.i[k], self.abs_dims[k], (k, "abs"))
            _node(self.i[k], self.d[k], self.sub_dims[k], (k, "sub"))


def _node(incoming, outgoing, dim, label):
    """Exactness at one node: im(incoming) = ker(outgoing)."""
    rk_in = rank(incoming) if incoming is not None else 0
    if incoming is not None and not outgoing.matmul(incoming).is_zero():
        raise ExactnessFailure(label, "composite nonzero")
    if rk_in != dim - rank(outgoing):
        raise ExactnessFailure(label, "rank defect")


def les_of_pair(x: Complex, z: Subcomplex, s: LocalSystem,
                verify: bool = True) -> PairLES:
    rc = RelativeComplex(x, z, s)
    tc = rc.full
    tc.verify_square_zero()
    zc = z.as_complex()
    zs = pullback_system(z.inclusion(), s)
    tz = TwistedComplex(zc, zs)
    top = x.dim

    rel_reps = [rc.representatives(p) for p in range(top + 1)]
    abs_reps = [tc.representatives(p) for p in range(top + 1)]
    sub_reps = [tz.representatives(p) for p in range(min(zc.dim, top) + 1)]
    sub_reps += [[] for _ in range(top - zc.dim)]

    j_mats, i_mats, d_mats = [], [], []
    for k in range(top + 1):
        j_mats.append(_map_matrix([rc.extend(k, v) for v in rel_reps[k]],
                                  tc, k, abs_reps[k]))
        # restriction of absolute representatives to Z
        images = []
        zidx = zc.index(k) if k <= zc.dim else {}
        xsimp = x.n_simplices(k)
        for v in abs_reps[k]:
            images.append({zidx[xsimp[g]]: val for g, val in v.items()
                           if xsimp[g] in zidx})
        i_mats.append(_map_matrix(images, tz, k, sub_reps[k])
                      if k <= zc.dim else
                      SparseMatrix.zero(0, len(abs_reps[k])))
        # connecting map: extend by zero, take delta_t, land in relative
        if k + 1 <= top:
            zsimp = zc.n_simplices(k) if k <= zc.dim else []
            xidx = x.index(k)
            cols = []
            for v in sub_reps[k]:
                lift = {xidx[zsimp[g]]: val for g, val in v.items()}
                db = rc.restrict(k + 1, tc.delta(k).mul_vec(lift))
                coords = rc.class_coordinates(k + 1, db, rel_reps[k + 1])
                cols.append({i: c for i, c in enumerate(coords) if c})
            d_mats.append(SparseMatrix.from_columns(cols, len(rel_reps[k + 1])))
        else:
            d_mats.append(SparseMatrix.zero(0, len(sub_reps[k])))

    les = PairLES([len(r) for r in rel_reps], [len(r) for r in abs_reps],
                  [len(r) for r in sub_reps], j_mats, i_mats, d_mats)
    if verify:
        les.verify_exactness()
        if les.alternating_sum() != 0:
            raise ExactnessFailure(("total",), "alternating sum nonzero")
    return les


def coker_of_pullback(f: SimplicialMap, s: LocalSystem) -> list[int]:
    """Per-degree dims of coker(f*: H(target) -> H(source))."""
    from .cohomology import pullback_on_cohomology
    mats, rep_src, rep_tgt = pullback_on_cohomology(f, s)
    return [rep_src.betti[p] - rank(mats[p]) for p in range(len(mats))]


# ---------------------------------------------------------------------------
# the cokernel five-lemma


@dataclass
class LadderInstance:
    """Five-node window of a commutative ladder with exact rows.

    f[k]: A_{k+1} -> A_{k+2} and g[k]: B_{k+1} -> B_{k+2} for k = 0..3;
    vertical[k]: A_{k+1} -> B_{k+1} for k = 0..4.  Exactness is required
    (and checked) at the three interior nodes of each row, matching a
    window cut out of a long exact sequence.
    """
    a_dims: list[int]
    b_dims: list[int]
    f: list[SparseMatrix]
    g: list[SparseMatrix]
    vertical: list[SparseMatrix]

    def validate(self) -> None:
        for k in range(4):
            if (self.f[k].cols, self.f[k].rows) != (self.a_dims[k],
                                                    self.a_dims[k + 1]):
                raise ValueError("f[%d] shape" % k)
            if (self.g[k].cols, self.g[k].rows) != (self.b_dims[k],
                                                    self.b_dims[k + 1]):
                raise ValueError("g[%d] shape" % k)
        for k in range(5):
            m = self.vertical[k]
            if (m.cols, m.rows) != (self.a_dims[k], self.b_dims[k]):
                raise ValueError("vertical[%d] shape" % k)
        for k in (1, 2, 3):
            for maps, dims, who in ((self.f, self.a_dims, "A"),
                                    (self.g, self.b_dims, "B")):
                if not maps[k].matmul(maps[k - 1]).is_zero():
                    raise RowNotExact((who, k, "composite nonzero"))
                if rank(maps[k - 1]) != dims[k] - rank(maps[k]):
                    raise RowNotExact((who, k, "rank defect"))
        for k in range(4):
            left = self.g[k].matmul(self.vertical[k])
            right = self.vertical[k + 1].matmul(self.f[k])
            if left != right:
                raise SquareNotCommuting(k)


@dataclass
class CokerReport:
    hypotheses_ok: bool
    violations: list[str]
    coker2_dim: int
    coker3_dim: int
    induced: SparseMatrix | None
    induced_iso: bool


def _coker_basis(m: SparseMatrix) -> tuple[EchelonReducer, list[int]]:
    """Echelon span of im(m) plus standard basis vectors completing it."""
    red = EchelonReducer()
    for c in range(m.cols):
        red.add(m.column(c))
    extra = []
    for r in range(m.rows):
        if red.add({r: Q(1)}):
            extra.append(r)
    return red, extra


def check_coker_ladder(l: LadderInstance) -> CokerReport:
    """Verify the cokernel five-lemma conclusion on one ladder window.

    Hypotheses (computed from the matrices): vertical[0] epi,
    vertical[1], vertical[2], vertical[4] mono, vertical[3] iso.  When
    they hold, the map induced by g[1] on coker(vertical[1]) ->
    coker(vertical[2]) must be an isomorphism; when they fail, the gaps
    are reported and no conclusion is asserted.
    """
    l.validate()
    violations = []
    v = l.vertical
    if rank(v[0]) != l.b_dims[0]:
        violations.append("i1 not epi")
    for k, name in ((1, "i2"), (2, "i3"), (4, "i5")):
        if rank(v[k]) != l.a_dims[k]:
            violations.append("%s not mono" % name)
    r3 = rank(v[3])
    if r3 != l.a_dims[3] or r3 != l.b_dims[3]:
        violations.append("i4 not iso")

    im2 = EchelonReducer()
    for c in range(v[1].cols):
        im2.add(v[1].column(c))
    coker2_reps = [r for r in range(l.b_dims[1]) if im2.add({r: Q(1)})]

    im3 = SparseMatrix.from_columns([v[2].column(c) for c in range(v[2].cols)],
                                    l.b_dims[2])
    coker3_red = EchelonReducer()
    for c in range(im3.cols):
        coker3_red.add(im3.column(c))
    coker3_reps = [r for r in range(l.b_dims[2])
                   if coker3_red.add({r: Q(1)})]

    induced = None
    induced_iso = False
    if not violations:
        # coordinates of g2(rep) in the chosen coker3 basis, mod im(i3)
        basis = im3.hstack(SparseMatrix.from_columns(
            [{r: Q(1)} for r in coker3_reps], l.b_dims[2]))
        from .exactlin import solve
        cols = []
        for r in coker2_reps:
            img = l.g[1].mul_vec({r: Q(1)})
            sol = solve(basis, img)
            if sol is None:
                raise AssertionError("cokernel decomposition failed")
            cols.append({i: sol[im3.cols + i] for i in range(len(coker3_reps))
                         if sol.get(im3.cols + i)})
        induced = SparseMatrix.from_columns(cols, len(coker3_reps))
        induced_iso = (len(coker2_reps) == len(coker3_reps)
                       and rank(induced) == len(coker3_reps))
    return CokerReport(not violations, violations,
                       len(coker2_reps), len(coker3_reps),
                       induced, induced_iso)


def _random_of_rank(rng, rows: int, cols: int, need: int) -> SparseMatrix:
    """Random small-entry matrix of rank exactly `need`."""
    pool = [-2, -1, -1, 1, 1, 2, 3, 0, 0]
    if not rows or not cols:
        return SparseMatrix.zero(rows, cols)
    while True:
        ent = {}
        for r in range(rows):
            for c in range(cols):
                x = rng.choice(pool)
                if x:
                    ent[(r, c)] = Q(x)
        m = SparseMatrix(rows, cols, ent)
        if rank(m) == need:
            return m


def _random_invertible(rng, n: int) -> SparseMatrix:
    return _random_of_rank(rng, n, n, n)


# hypothesis -> strand position whose vertical block gets broken
_VIOLATE_POS = {"i1": 0, "i2": 1, "i3": 2, "i4": 3, "i5": 4}


def random_ladder(rng, max_strand: int = 2,
                  violate: str | None = None) -> LadderInstance:
    """Seeded ladder window with exact rows and commuting squares.

    Rows are built from strands: position p carries s[p] parallel copies
    of an elementary exact piece Q -> Q spanning nodes p and p+1, so
    node k has dimension s[k-1] + s[k] and the row maps project onto the
    shared strand.  Vertical maps are block per strand position — full
    rank blocks make every five-lemma hypothesis hold — and everything
    is conjugated by random invertible changes of basis to hide the
    strand structure.  `violate` in {"i1", "i2", "i3", "i4", "i5"}
    breaks the corresponding hypothesis instead (i1 by an extra B
    dimension the image misses, the others by a rank-deficient block).
    """
    s = [rng.randint(0, max_strand) for _ in range(6)]
    bs = list(s)
    bad = _VIOLATE_POS.get(violate) if violate else None
    if bad in (0, 3):
        # an extra B dimension at the position kills surjectivity only
        bs[bad] += 1
    elif bad is not None and s[bad] == 0:
        s[bad] = bs[bad] = 1
    a_dims = [s[k] + s[k + 1] for k in range(5)]
    b_dims = [bs[k] + bs[k + 1] for k in range(5)]

    blocks = []
    for p in range(6):
        need = min(s[p], bs[p])
        if bad == p and p not in (0, 3):
            need -= 1
        blocks.append(_random_of_rank(rng, bs[p], s[p], need))

    def strand_proj(src0, src1, tgt1):
        """Map (x, y) -> (y, 0): node k -> node k+1 in strand coords."""
        ent = {}
        for i in range(src1):
            ent[(i, src0 + i)] = Q(1)
        return SparseMatrix(src1 + tgt1, src0 + src1, ent)

    f = [strand_proj(s[k], s[k + 1], s[k + 2]) for k in range(4)]
    g = [strand_proj(bs[k], bs[k + 1], bs[k + 2]) for k in range(4)]

    def block_diag(m0, m1):
        ent = dict(m0.entries)
        for (r, c), x in m1.entries.items():
            ent[(r + m0.rows, c + m0.cols)] = x
        return SparseMatrix(m0.rows + m1.rows, m0.cols + m1.cols, ent)

    vertical = [block_diag(blocks[k], blocks[k + 1]) for k in range(5)]

    # hide the strand structure behind random changes of basis
    pa = [_random_invertible(rng, d) for d in a_dims]
    pb = [_random_invertible(rng, d) for d in b_dims]
    pa_inv = [_invert(m) for m in pa]
    pb_inv = [_invert(m) for m in pb]
    f = [pa[k + 1].matmul(f[k]).matmul(pa_inv[k]) for k in range(4)]
    g = [pb[k + 1].matmul(g[k]).matmul(pb_inv[k]) for k in range(4)]
    vertical = [pb[k].matmul(vertical[k]).matmul(pa_inv[k]) for k in range(5)]
    return LadderInstance(a_dims, b_dims, f, g, vertical)


def _invert(m: SparseMatrix) -> SparseMatrix:
    from .exactlin import Factorization
    fact = Factorization(m)
    cols = []
    for i in range(m.rows):
        sol = fact.solve({i: Q(1)})
        if sol is None:
            raise ValueError("matrix not invertible")
        cols.append(sol)
    return SparseMatrix.from_columns(cols, m.cols)
