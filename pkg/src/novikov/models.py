"""Built-in catalog of complexes and local systems.

Every model is re-validated against its descriptor (f-vector, Euler
number, untwisted Betti numbers) when built; the 9-vertex projective
plane ships as a checksummed data asset and is additionally checked to
be a closed pseudomanifold with nonzero cup square.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from importlib import resources

from .complexes import (Complex, LocalSystem, SimplicialMap, Subcomplex,
                        product, subcomplex)
from .cohomology import (TwistedComplex, betti, cup_untwisted)
from .exactlin import (Factorization, Q, QONE, QZERO, SparseMatrix,
                       kernel_basis)


class UnknownModel(Exception):
    pass


class BadParams(Exception):
    pass


class DescriptorMismatch(Exception):
    pass


class NotEnoughIndependentLoops(Exception):
    pass


@dataclass
class ModelInstance:
    name: str
    params: tuple
    complex: Complex
    expected_f_vector: tuple
    expected_euler: int
    expected_betti: tuple
    h: dict | None = None                 # degree-2 generator (cp1/cp2)
    fundamental_top_cycle: dict | None = None
    fundamental_2cycle: dict | None = None
    pr1: SimplicialMap | None = None
    pr2: SimplicialMap | None = None


def simplex_complex(n: int) -> Complex:
    if n < 0:
        raise BadParams("simplex dimension must be >= 0")
    return Complex.from_simplices(n + 1, [tuple(range(n + 1))],
                                  close_faces=True)


def sphere_complex(n: int) -> Complex:
    """Boundary of the (n+1)-simplex."""
    if n < 1:
        raise BadParams("sphere dimension must be >= 1")
    verts = tuple(range(n + 2))
    facets = itertools.combinations(verts, n + 1)
    return Complex.from_simplices(n + 2, facets, close_faces=True)


def circle_complex(m: int) -> Complex:
    if m < 3:
        raise BadParams("circle needs at least 3 vertices")
    edges = [(i, i + 1) for i in range(m - 1)] + [(0, m - 1)]
    return Complex.from_simplices(m, edges, close_faces=True)


def torus_complex() -> tuple:
    return product(circle_complex(3), circle_complex(3))


def surface_complex(g: int) -> Complex:
    """Closed orientable genus-g surface as an iterated connected sum of
    staircase tori; euler number 2 - 2g."""
    if g < 1:
        raise BadParams("surface genus must be >= 1")
    torus, _, _ = torus_complex()
    current = torus
    for _ in range(g - 1):
        current = _connected_sum(current, torus)
    return current


def _connected_sum(a: Complex, b: Complex) -> Complex:
    """Glue two surfaces along a removed triangle from each.

    Vertex sets are disjoint apart from the identified triangle, so the
    union stays simplicial and no simplices merge accidentally.
    """
    tri_a = a.n_simplices(2)[0]
    tri_b = b.n_simplices(2)[0]
    offset = a.vertex_count
    relabel = {}
    for x, y in zip(tri_b, tri_a):
        relabel[x] = y
    nxt = offset
    for v in range(b.vertex_count):
        if v not in relabel:
            relabel[v] = nxt
            nxt += 1
    simplices = []
    for s in a.all_simplices():
        if s != tri_a:
            simplices.append(s)
    for s in b.all_simplices():
        if s != tri_b:
            simplices.append(tuple(sorted(relabel[v] for v in s)))
    return Complex.from_simplices(nxt, simplices)


def _load_cp2_asset() -> Complex:
    text = (resources.files("novikov") / "data" / "cp2_facets.txt").read_text()
    facet_lines = []
    checksum = None
    for line in text.splitlines():
        if line.startswith("# sha256:"):
            checksum = line.split(":", 1)[1].strip()
        elif line.startswith("#") or not line.strip():
            continue
        else:
            facet_lines.append(line)
    body = "".join(line + "\n" for line in facet_lines)
    if checksum is None or hashlib.sha256(body.encode()).hexdigest() != checksum:
        raise DescriptorMismatch("cp2 asset checksum failure")
    facets = [tuple(int(x) for x in line.split()) for line in facet_lines]
    if len(facets) != 36:
        raise DescriptorMismatch("cp2 asset must list 36 facets")
    return Complex.from_simplices(9, facets, close_faces=True)


def is_closed_pseudomanifold(c: Complex) -> bool:
    """Every codimension-1 simplex is a face of exactly two top simplices."""
    d = c.dim
    count: dict = {}
    for s in c.n_simplices(d):
        for i in range(d + 1):
            face = s[:i] + s[i + 1:]
            count[face] = count.get(face, 0) + 1
    if set(count) != set(c.n_simplices(d - 1)):
        return False
    return all(v == 2 for v in count.values())


def _top_cycle(c: Complex) -> dict | None:
    """Coherent orientation chain: kernel of the top boundary map,
    normalized so its first coefficient is +1.  None if not 1-dimensional."""
    tc = TwistedComplex(c, LocalSystem.trivial(c), verify=False)
    boundary = tc.delta(c.dim - 1).transpose()
    basis = kernel_basis(boundary)
    if len(basis) != 1:
        return None
    z = basis[0]
    first = min(z)
    scale = 1 / z[first]
    return {k: v * scale for k, v in z.items()}


def _harmonic_2class(c: Complex) -> tuple:
    """(h, z): a degree-2 cocycle generator and a 2-cycle generator with
    <h, z> = +1, both from the 1-dimensional harmonic space in degree 2."""
    tc = TwistedComplex(c, LocalSystem.trivial(c), verify=False)
    stacked = tc.delta(2).vstack(tc.delta(1).transpose())
    basis = Factorization(stacked).kernel_basis()
    if len(basis) != 1:
        raise DescriptorMismatch("degree-2 harmonic space is not a line")
    raw = basis[0]
    first = min(raw)
    scale = 1 / raw[first]
    z = {k: v * scale for k, v in raw.items()}
    pairing = sum(v * z[k] for k, v in raw.items())
    h = {k: v / pairing for k, v in raw.items()}
    return h, z


_CATALOG_CACHE: dict = {}

# name -> (parameter count, description)
CATALOG = {
    "simplex": (1, "full n-simplex"),
    "sphere": (1, "boundary of the (n+1)-simplex"),
    "circle": (1, "cycle on m >= 3 vertices"),
    "torus": (0, "circle(3) x circle(3)"),
    "surface": (1, "closed orientable genus-g surface"),
    "cp1": (0, "2-sphere as the projective line"),
    "cp2": (0, "9-vertex complex projective plane (data asset)"),
    "blowup_cp2_standin": (0, "sphere(2) x sphere(2)"),
}


def build(name: str, params: tuple = ()) -> ModelInstance:
    """Build and validate a catalog model."""
    params = tuple(int(p) for p in params)
    key = (name, params)
    if key in _CATALOG_CACHE:
        return _CATALOG_CACHE[key]
    if name not in CATALOG:
        raise UnknownModel(name)
    nparams = CATALOG[name][0]
    if len(params) != nparams:
        raise BadParams("%s expects %d parameter(s)" % (name, nparams))

    pr1 = pr2 = None
    h = None
    z2 = None
    if name == "simplex":
        n = params[0]
        c = simplex_complex(n)
        expected_betti = (1,) + (0,) * n
        expected_f = tuple(_binom(n + 1, p + 1) for p in range(n + 1))
        expected_euler = 1
    elif name == "sphere":
        n = params[0]
        c = sphere_complex(n)
        expected_betti = (1,) + (0,) * (n - 1) + (1,)
        expected_f = tuple(_binom(n + 2, p + 1) for p in range(n + 1))
        expected_euler = 1 + (-1) ** n
    elif name == "circle":
        m = params[0]
        c = circle_complex(m)
        expected_betti = (1, 1)
        expected_f = (m, m)
        expected_euler = 0
    elif name == "torus":
        c, pr1, pr2 = torus_complex()
        expected_betti = (1, 2, 1)
        expected_f = (9, 27, 18)
        expected_euler = 0
    elif name == "surface":
        g = params[0]
        c = surface_complex(g)
        expected_betti = (1, 2 * g, 1)
        expected_f = (6 * g + 3, 24 * g + 3, 16 * g + 2)
        expected_euler = 2 - 2 * g
    elif name == "cp1":
        c = sphere_complex(2)
        expected_betti = (1, 0, 1)
        expected_f = (4, 6, 4)
        expected_euler = 2
        h, z2 = _harmonic_2class(c)
    elif name == "cp2":
        c = _load_cp2_asset()
        expected_betti = (1, 0, 1, 0, 1)
        expected_f = (9, 36, 84, 90, 36)
        expected_euler = 3
        if not is_closed_pseudomanifold(c):
            raise DescriptorMismatch("cp2 asset is not a closed pseudomanifold")
        h, z2 = _harmonic_2class(c)
    elif name == "blowup_cp2_standin":
        s2 = sphere_complex(2)
        c, pr1, pr2 = product(s2, s2)
        expected_betti = (1, 0, 2, 0, 1)
        expected_f = c.f_vector()
        expected_euler = 4
    else:  # pragma: no cover
        raise UnknownModel(name)

    c.validate()
    if c.f_vector() != expected_f:
        raise DescriptorMismatch((name, "f-vector", c.f_vector(), expected_f))
    if c.euler_characteristic() != expected_euler:
        raise DescriptorMismatch((name, "euler", c.euler_characteristic()))
    report = betti(c, LocalSystem.trivial(c))
    if tuple(report.betti) != expected_betti:
        raise DescriptorMismatch((name, "betti", tuple(report.betti)))
    if h is not None:
        _check_h_generator(name, c, h, z2)

    inst = ModelInstance(
        name=name, params=params, complex=c,
        expected_f_vector=expected_f, expected_euler=expected_euler,
        expected_betti=expected_betti, h=h,
        fundamental_top_cycle=_top_cycle(c) if c.dim >= 1 else None,
        fundamental_2cycle=z2, pr1=pr1, pr2=pr2)
    _CATALOG_CACHE[key] = inst
    return inst


def _check_h_generator(name: str, c: Complex, h: dict, z2: dict) -> None:
    pairing = sum(v * z2[k] for k, v in h.items() if k in z2)
    if pairing != 1:
        raise DescriptorMismatch((name, "h pairing", pairing))
    tc = TwistedComplex(c, LocalSystem.trivial(c), verify=False)
    power = dict(h)
    deg = 2
    while deg < c.dim:
        power = cup_untwisted(c, h, 2, power, deg)
        deg += 2
    red = tc.image_reducer(deg)
    if not red.reduce(power):
        raise DescriptorMismatch((name, "h top power is a coboundary"))


def _binom(n: int, k: int) -> int:
    import math
    return math.comb(n, k)


def _loop_data(c: Complex):
    """(tree, nontree edges, factorization of the triangle-condition
    matrix restricted to non-tree columns).  Shared by generic_system,
    basis_loops and random_system; fully deterministic."""
    tree = spanning_forest(c)
    nontree = [e for e in c.edges() if e not in tree]
    col = {e: i for i, e in enumerate(nontree)}
    rows = []
    for (u, v, w) in c.n_simplices(2):
        row: dict = {}
        for e, sgn in (((u, v), 1), ((v, w), 1), ((u, w), -1)):
            j = col.get(e)
            if j is not None:
                row[j] = row.get(j, QZERO) + sgn
        rows.append({k: x for k, x in row.items() if x})
    fact = Factorization(SparseMatrix.from_row_dicts(rows, len(nontree)))
    return tree, nontree, fact


def spanning_forest(c: Complex) -> set:
    """Deterministic BFS spanning forest of the 1-skeleton (edge set)."""
    adj: dict[int, list] = {}
    for (u, v) in c.edges():
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for lst in adj.values():
        lst.sort()
    tree = set()
    seen = set()
    for (root,) in c.n_simplices(0):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            u = queue.pop(0)
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    tree.add((min(u, v), max(u, v)))
                    queue.append(v)
    return tree


def generic_system(c: Complex, loop_weights) -> LocalSystem:
    """Local system with prescribed monodromy on an explicit loop basis.

    Tree edges carry weight 1; the exponent cocycles dual to the free
    non-tree edges are computed from the triangle conditions, and the
    i-th input weight becomes the monodromy of the i-th basis loop.
    """
    weights = [Q(w) for w in loop_weights]
    for w in weights:
        if w <= 0:
            raise BadParams("loop weights must be positive")
    tree, nontree, fact = _loop_data(c)
    col = {e: i for i, e in enumerate(nontree)}
    basis = fact.kernel_basis()
    if len(weights) > len(basis):
        raise NotEnoughIndependentLoops(
            "asked for %d loops, first Betti number is %d"
            % (len(weights), len(basis)))
    exponents: dict[int, dict] = {}
    for i, vec in enumerate(basis[:len(weights)]):
        for e_idx, q in vec.items():
            if q.denominator != 1:
                raise NotEnoughIndependentLoops(
                    "non-integral exponent cocycle; pass fewer loops")
            exponents.setdefault(e_idx, {})[i] = int(q.numerator)
    weight = {}
    for e in c.edges():
        if e in tree:
            weight[e] = QONE
        else:
            val = QONE
            for i, k in exponents.get(col[e], {}).items():
                val = val * weights[i] ** k
            weight[e] = val
    s = LocalSystem(c, weight)
    s.validate()
    return s


def basis_loops(c: Complex, count: int | None = None) -> list[list[int]]:
    """Vertex loops realizing the basis used by generic_system.

    Loop i runs through the tree from v to u and closes with the free
    non-tree edge traversed u -> v (its positive direction), so its
    monodromy under generic_system is exactly the i-th weight.
    """
    tree, nontree, fact = _loop_data(c)
    parent = _tree_parents(c, tree)
    loops = []
    free = fact.free_cols if count is None else fact.free_cols[:count]
    for f in free:
        u, v = nontree[f]
        loops.append(_tree_path(v, u, parent) + [v])
    return loops


def _tree_parents(c: Complex, tree: set) -> dict:
    adj: dict[int, list] = {}
    for (u, v) in tree:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for lst in adj.values():
        lst.sort()
    parent = {}
    for (root,) in c.n_simplices(0):
        if root in parent:
            continue
        parent[root] = root
        queue = [root]
        while queue:
            u = queue.pop(0)
            for v in adj.get(u, ()):
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
    return parent


def _path_to_root(v: int, parent: dict) -> list[int]:
    path = [v]
    while parent[path[-1]] != path[-1]:
        path.append(parent[path[-1]])
    return path


def _tree_path(u: int, v: int, parent: dict) -> list[int]:
    pu = _path_to_root(u, parent)
    pv = _path_to_root(v, parent)
    su = set(pu)
    k = next(i for i, x in enumerate(pv) if x in su)
    meet = pv[k]
    return pu[:pu.index(meet) + 1] + list(reversed(pv[:k]))


def random_system(c: Complex, rng) -> LocalSystem:
    """Seeded random valid system: random loop monodromies when the
    complex has 1-cocycles to twist, then a random positive gauge."""
    _, nontree, fact = _loop_data(c)
    nloops = len(nontree) - fact.rank
    pool = [Q(2), Q(3), Q(1, 2), Q(5, 3), Q(1), Q(7, 2)]
    weights = [pool[rng.randrange(len(pool))] for _ in range(nloops)]
    s = generic_system(c, weights) if nloops else LocalSystem.trivial(c)
    gauge = {v: Q(rng.randrange(1, 12), rng.randrange(1, 12))
             for (v,) in c.n_simplices(0)}
    return s.gauge(gauge)


def cp1_inside_cp2(inst: ModelInstance) -> Subcomplex:
    """Boundary of a missing tetrahedron: a 2-sphere subcomplex of cp2."""
    c = inst.complex
    present = set(c.n_simplices(3))
    for quad in itertools.combinations(range(9), 4):
        if quad not in present:
            tris = list(itertools.combinations(quad, 3))
            return subcomplex(c, tris, close_faces=True)
    raise DescriptorMismatch("cp2 asset has no missing tetrahedron")


def surface_wedge_circles(inst: ModelInstance) -> Subcomplex:
    """Wedge of two essential circles in a surface model (both live in the
    first torus summand and meet at vertex 0)."""
    edges = [(0, 1), (1, 2), (0, 2), (0, 3), (3, 6), (0, 6)]
    return subcomplex(inst.complex, edges, close_faces=True)


def torus_circle_factor(inst: ModelInstance) -> Subcomplex:
    """The subcomplex circle(3) x {vertex 0} of the staircase torus."""
    edges = [(0, 3), (3, 6), (0, 6)]
    return subcomplex(inst.complex, edges, close_faces=True)
