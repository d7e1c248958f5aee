"""Finite ordered simplicial complexes, maps, products, rank-1 local systems.

Simplices are strictly increasing vertex tuples; the global vertex order
is the ordering structure for products, cup products and coboundaries.
A local system is a multiplicative edge-weight 1-cocycle with positive
rational values; it is the combinatorial form of a rank-1 locally
constant sheaf, classified up to gauge by its loop monodromies.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

from .exactlin import Q, QONE


class ValidationError(Exception):
    """kind in {MissingFace, DuplicateSimplex, VertexOutOfRange,
    NotFaceClosed, MissingVertex}."""

    def __init__(self, kind: str, detail):
        self.kind = kind
        self.detail = detail
        super().__init__("%s: %r" % (kind, detail))


class CocycleViolation(Exception):
    def __init__(self, triangle, lhs, rhs):
        self.triangle = triangle
        self.lhs = lhs
        self.rhs = rhs
        super().__init__("cocycle condition fails on %r: %s != %s"
                         % (triangle, lhs, rhs))


class PathNotInComplex(Exception):
    pass


class NonpositiveGauge(Exception):
    pass


class Complex:
    """Finite simplicial complex; simplices stored sorted per dimension."""

    def __init__(self, vertex_count: int,
                 simplices_by_dim: Sequence[Iterable[tuple]]):
        self.vertex_count = vertex_count
        self.simplices = [sorted(set(map(tuple, level)))
                          for level in simplices_by_dim]
        while self.simplices and not self.simplices[-1]:
            self.simplices.pop()
        self._index: list[dict] | None = None

    @classmethod
    def from_simplices(cls, vertex_count: int, simplices: Iterable,
                       close_faces: bool = False) -> "Complex":
        by_dim: dict[int, set] = {}
        for s in simplices:
            t = tuple(sorted(set(s)))
            if close_faces:
                for d in range(len(t)):
                    for face in itertools.combinations(t, d + 1):
                        by_dim.setdefault(d, set()).add(face)
            else:
                by_dim.setdefault(len(t) - 1, set()).add(t)
        if not by_dim:
            return cls(vertex_count, [])
        top = max(by_dim)
        return cls(vertex_count, [by_dim.get(d, set()) for d in range(top + 1)])

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def f_vector(self) -> tuple:
        return tuple(len(level) for level in self.simplices)

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * len(level)
                   for p, level in enumerate(self.simplices))

    def n_simplices(self, p: int) -> list[tuple]:
        if 0 <= p < len(self.simplices):
            return self.simplices[p]
        return []

    def index(self, p: int) -> dict:
        if self._index is None:
            self._index = [
                {s: i for i, s in enumerate(level)} for level in self.simplices
            ]
        if 0 <= p < len(self._index):
            return self._index[p]
        return {}

    def contains(self, simplex) -> bool:
        t = tuple(sorted(simplex))
        return t in self.index(len(t) - 1)

    def edges(self) -> list[tuple]:
        return self.n_simplices(1)

    def all_simplices(self):
        for level in self.simplices:
            yield from level

    def validate(self) -> None:
        """Raise ValidationError unless all invariants hold."""
        seen = set()
        for p, level in enumerate(self.simplices):
            prev = None
            for s in level:
                if len(s) != p + 1 or list(s) != sorted(set(s)):
                    raise ValidationError("DuplicateSimplex", s)
                if s == prev:
                    raise ValidationError("DuplicateSimplex", s)
                prev = s
                for v in s:
                    if not 0 <= v < self.vertex_count:
                        raise ValidationError("VertexOutOfRange", s)
                if s in seen:
                    raise ValidationError("DuplicateSimplex", s)
                seen.add(s)
                if p > 0:
                    idx = self.index(p - 1)
                    for i in range(p + 1):
                        face = s[:i] + s[i + 1:]
                        if face not in idx:
                            raise ValidationError("MissingFace", (s, face))

    def is_valid(self) -> bool:
        try:
            self.validate()
            return True
        except ValidationError:
            return False

    def __eq__(self, other):
        return (isinstance(other, Complex)
                and self.vertex_count == other.vertex_count
                and self.simplices == other.simplices)

    def __repr__(self):
        return "Complex(f=%r)" % (self.f_vector(),)


class Subcomplex:
    """Face-closed subset of a parent complex."""

    def __init__(self, parent: Complex, members: Iterable):
        self.parent = parent
        by_dim: dict[int, set] = {}
        for s in members:
            t = tuple(sorted(s))
            by_dim.setdefault(len(t) - 1, set()).add(t)
        top = max(by_dim) if by_dim else -1
        self.members = [frozenset(by_dim.get(d, set())) for d in range(top + 1)]

    def contains(self, simplex) -> bool:
        t = tuple(sorted(simplex))
        d = len(t) - 1
        return d < len(self.members) and t in self.members[d]

    def validate(self) -> None:
        for d, level in enumerate(self.members):
            for s in level:
                if not self.parent.contains(s):
                    raise ValidationError("NotFaceClosed", s)
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    if face and not self.contains(face):
                        raise ValidationError("NotFaceClosed", (s, face))

    def as_complex(self) -> Complex:
        return Complex(self.parent.vertex_count, self.members)

    def inclusion(self) -> "SimplicialMap":
        return SimplicialMap(self.as_complex(), self.parent,
                             list(range(self.parent.vertex_count)))

    def is_empty(self) -> bool:
        return not any(self.members)

    def __repr__(self):
        return "Subcomplex(f=%r)" % (
            tuple(len(level) for level in self.members),)


def subcomplex(c: Complex, simplices: Iterable,
               close_faces: bool = False) -> Subcomplex:
    """Subcomplex spanned by the given simplices.

    With close_faces=False the input must already be face-closed
    (NotFaceClosed otherwise); with True the closure is taken.
    """
    chosen: set = set()
    for s in simplices:
        t = tuple(sorted(s))
        if not c.contains(t):
            raise ValidationError("NotFaceClosed", t)
        if close_faces:
            for d in range(len(t)):
                chosen.update(itertools.combinations(t, d + 1))
        else:
            chosen.add(t)
    sub = Subcomplex(c, chosen)
    sub.validate()
    return sub


class SimplicialMap:
    """Vertex map whose image of every simplex is a simplex of the target."""

    def __init__(self, source: Complex, target: Complex,
                 vertex_image: Sequence[int]):
        self.source = source
        self.target = target
        self.vertex_image = list(vertex_image)

    def apply(self, simplex) -> tuple:
        """Image simplex (sorted, deduplicated)."""
        return tuple(sorted(set(self.vertex_image[v] for v in simplex)))

    def validate(self) -> None:
        for s in self.source.all_simplices():
            for v in s:
                if v >= len(self.vertex_image):
                    raise ValidationError("VertexOutOfRange", s)
            img = self.apply(s)
            if not self.target.contains(img):
                raise ValidationError("MissingFace", (s, img))

    def compose(self, inner: "SimplicialMap") -> "SimplicialMap":
        """self o inner."""
        img = [self.vertex_image[inner.vertex_image[v]]
               for v in range(len(inner.vertex_image))]
        return SimplicialMap(inner.source, self.target, img)

    @classmethod
    def identity(cls, c: Complex) -> "SimplicialMap":
        return cls(c, c, list(range(c.vertex_count)))


class LocalSystem:
    """Rank-1 local system: positive rational weight per oriented edge u<v."""

    def __init__(self, base: Complex, weight: Mapping):
        self.base = base
        self.weight = {}
        for (u, v), w in weight.items():
            if u >= v:
                raise ValidationError("DuplicateSimplex", (u, v))
            self.weight[(u, v)] = Q(w)

    @classmethod
    def trivial(cls, base: Complex) -> "LocalSystem":
        return cls(base, {e: QONE for e in base.edges()})

    def weight_of(self, u: int, v: int):
        """Weight of edge (u, v), honoring orientation: t(v,u) = 1/t(u,v)."""
        if u < v:
            w = self.weight.get((u, v))
            if w is None:
                raise PathNotInComplex((u, v))
            return w
        w = self.weight.get((v, u))
        if w is None:
            raise PathNotInComplex((u, v))
        return 1 / w

    def transport(self, u: int, w: int):
        """Factor moving a fiber value at w to the fiber at u (1 if u == w)."""
        if u == w:
            return QONE
        return self.weight_of(u, w)

    def validate(self) -> None:
        """Weights positive on all edges; t(uw) = t(uv) t(vw) per triangle."""
        for e in self.base.edges():
            w = self.weight.get(e)
            if w is None:
                raise ValidationError("MissingFace", e)
            if w <= 0:
                raise CocycleViolation(e, w, "positive")
        for (u, v, w) in self.base.n_simplices(2):
            lhs = self.weight[(u, w)]
            rhs = self.weight[(u, v)] * self.weight[(v, w)]
            if lhs != rhs:
                raise CocycleViolation((u, v, w), lhs, rhs)

    def is_trivial(self) -> bool:
        return all(w == 1 for w in self.weight.values())

    def monodromy(self, loop: Sequence[int]):
        """Ordered product of edge weights along a closed vertex path."""
        if not loop or loop[0] != loop[-1]:
            raise PathNotInComplex(loop)
        m = QONE
        for a, b in zip(loop, loop[1:]):
            m *= self.weight_of(a, b)
        return m

    def gauge(self, g: Mapping) -> "LocalSystem":
        """Rescale by a positive vertex function: t'(uv) = g(v) t(uv) / g(u)."""
        gv = {}
        for (v,) in self.base.n_simplices(0):
            x = Q(g[v]) if v in g else QONE
            if x <= 0:
                raise NonpositiveGauge(v)
            gv[v] = x
        return LocalSystem(self.base, {
            (u, v): gv[v] * w / gv[u] for (u, v), w in self.weight.items()
        })

    def fingerprint(self) -> str:
        import hashlib
        from .exactlin import rational_to_string
        h = hashlib.sha256()
        for (u, v), w in sorted(self.weight.items()):
            h.update(("%d,%d=%s;" % (u, v, rational_to_string(w))).encode())
        return h.hexdigest()[:16]


def pullback_system(f: SimplicialMap, s: LocalSystem) -> LocalSystem:
    """Inverse-image local system: t'(uv) = t(f(u) f(v)); collapsed edges
    pull back to weight 1."""
    weight = {}
    for (u, v) in f.source.edges():
        fu, fv = f.vertex_image[u], f.vertex_image[v]
        if fu == fv:
            weight[(u, v)] = QONE
        else:
            weight[(u, v)] = s.weight_of(fu, fv)
    return LocalSystem(f.source, weight)


def _grid_chains(nrows: int, ncols: int):
    """Strictly increasing chains in the (nrows x ncols) grid poset from
    (0, 0) to (nrows-1, ncols-1), steps in {right, down, diagonal}."""
    out = []

    def walk(i, j, path):
        if i == nrows - 1 and j == ncols - 1:
            out.append(tuple(path))
            return
        if i + 1 < nrows:
            walk(i + 1, j, path + [(i + 1, j)])
        if j + 1 < ncols:
            walk(i, j + 1, path + [(i, j + 1)])
        if i + 1 < nrows and j + 1 < ncols:
            walk(i + 1, j + 1, path + [(i + 1, j + 1)])

    walk(0, 0, [(0, 0)])
    return out


def product(a: Complex, b: Complex):
    """Staircase (shuffle) triangulation of |a| x |b|.

    Vertex (va, vb) gets index va * b.vertex_count + vb (lexicographic
    order).  Simplices are the chains in the product vertex order whose
    projections are simplices of the factors; enumerated per factor pair,
    so each product simplex appears exactly once.

    Returns (product complex, pr1, pr2).
    """
    nb = b.vertex_count
    chains_cache: dict = {}
    by_dim: dict[int, list] = {}
    for sa in a.all_simplices():
        la = len(sa)
        for sb in b.all_simplices():
            lb = len(sb)
            key = (la, lb)
            if key not in chains_cache:
                chains_cache[key] = _grid_chains(la, lb)
            for chain in chains_cache[key]:
                simplex = tuple(sa[i] * nb + sb[j] for i, j in chain)
                by_dim.setdefault(len(simplex) - 1, []).append(simplex)
    top = max(by_dim) if by_dim else -1
    prod = Complex(a.vertex_count * nb,
                   [by_dim.get(d, []) for d in range(top + 1)])
    pr1 = SimplicialMap(prod, a, [v // nb for v in range(prod.vertex_count)])
    pr2 = SimplicialMap(prod, b, [v % nb for v in range(prod.vertex_count)])
    return prod, pr1, pr2
