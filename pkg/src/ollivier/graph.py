"""Weighted graphs, metrics, discrete calculus operators and balls.

A :class:`WeightedGraph` is an immutable snapshot ``(V, m, omega, eta)``.
Distances live in a separate :class:`Metric` (a dense all-pairs table) so
that the same graph can be paired with the combinatorial distance, a
weighted path distance, or an arbitrary user-supplied matrix.
"""

from __future__ import annotations

import heapq
import json
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Hashable, Iterable, Mapping

from .errors import GraphFormatError, MetricError, UnknownVertexError, UnreachableError, WeightError
from .numeric import exact, format_number, parse_number

Vertex = Hashable
Edge = tuple

LAPLACIAN_VARIANTS = ("general", "combinatorial", "normalized")
METRIC_MODES = ("combinatorial", "eta", "omega", "explicit")


def vertex_key(v):
    """Sort key giving a deterministic order on mixed int/str vertex ids."""
    if isinstance(v, int) and not isinstance(v, bool):
        return (0, v, "")
    return (1, 0, str(v))


def edge_key(u, v) -> Edge:
    return (u, v) if vertex_key(u) <= vertex_key(v) else (v, u)


class _Unreachable:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()


class WeightedGraph:
    """Finite undirected graph with vertex measure and edge weights.

    Parameters
    ----------
    measure : mapping vertex -> m(v)
        Vertex measure, strictly positive.
    omega : mapping (u, v) -> weight
        Primary edge weights, strictly positive; one entry per undirected edge.
    eta : mapping (u, v) -> weight, optional
        Secondary weights used by the ``eta`` metric; missing edges fall back
        to ``omega``.
    extra : mapping name -> (mapping (u, v) -> weight), optional
        Further named edge weights, carried along but not interpreted.
    """

    def __init__(self, measure: Mapping, omega: Mapping, eta: Mapping | None = None,
                 extra: Mapping[str, Mapping] | None = None):
        verts = sorted(measure, key=vertex_key)
        if len(set(verts)) != len(verts):
            raise GraphFormatError("duplicate vertex id")
        m = {}
        for v in verts:
            mv = measure[v]
            if not mv > 0:
                raise WeightError(f"nonpositive vertex measure at {v!r}", vertex=v)
            m[v] = mv
        om: dict = {}
        adj: dict = {v: [] for v in verts}
        for (u, v), w in omega.items():
            for z in (u, v):
                if z not in m:
                    raise UnknownVertexError(f"edge ({u!r}, {v!r}) references unknown vertex {z!r}")
            if u == v:
                raise GraphFormatError(f"self-loop at {u!r}")
            key = edge_key(u, v)
            if key in om:
                raise GraphFormatError(f"duplicate edge {key}")
            if not w > 0:
                raise WeightError(f"nonpositive weight on edge {key}", edge=key)
            om[key] = w
            adj[u].append(v)
            adj[v].append(u)
        et = {}
        for (u, v), w in (eta or {}).items():
            key = edge_key(u, v)
            if key not in om:
                raise GraphFormatError(f"eta given for non-edge {key}")
            if not w > 0:
                raise WeightError(f"nonpositive eta on edge {key}", edge=key)
            et[key] = w
        ex = {}
        for name, weights in (extra or {}).items():
            ex[name] = MappingProxyType({edge_key(u, v): w for (u, v), w in weights.items()})
        self._vertices = tuple(verts)
        self._m = MappingProxyType(m)
        self._omega = MappingProxyType(dict(sorted(om.items(), key=lambda kv: _ekey(kv[0]))))
        self._eta = MappingProxyType(et)
        self._extra = MappingProxyType(ex)
        self._adj = MappingProxyType(
            {v: tuple(sorted(ns, key=vertex_key)) for v, ns in adj.items()})

    @classmethod
    def from_edges(cls, edges: Iterable, measure: Mapping | None = None, vertices: Iterable = ()):
        """Build from ``(u, v)``, ``(u, v, omega)`` or ``(u, v, omega, eta)`` tuples.

        Vertex measure defaults to 1 and omega to 1; numbers are read exactly.
        """
        om, et = {}, {}
        names = list(vertices)
        for e in edges:
            u, v = e[0], e[1]
            w = parse_number(e[2]) if len(e) > 2 else Fraction(1)
            key = edge_key(u, v)
            if key in om:
                raise GraphFormatError(f"duplicate edge {key}")
            om[key] = w
            if len(e) > 3 and e[3] is not None:
                et[key] = parse_number(e[3])
            names.extend((u, v))
        meas = {v: Fraction(1) for v in names}
        for v, mv in (measure or {}).items():
            meas[v] = parse_number(mv)
        return cls(meas, om, et)

    # -- basic queries -------------------------------------------------

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return tuple(self._omega)

    def __contains__(self, v) -> bool:
        return v in self._m

    def __len__(self) -> int:
        return len(self._vertices)

    def check_vertex(self, v) -> None:
        if v not in self._m:
            raise UnknownVertexError(f"unknown vertex {v!r}", vertex=v)

    def m(self, v):
        self.check_vertex(v)
        return self._m[v]

    @property
    def measure(self) -> Mapping:
        return self._m

    def neighbors(self, v) -> tuple:
        self.check_vertex(v)
        return self._adj[v]

    def has_edge(self, u, v) -> bool:
        return edge_key(u, v) in self._omega

    def omega(self, u, v):
        try:
            return self._omega[edge_key(u, v)]
        except KeyError:
            raise GraphFormatError(f"({u!r}, {v!r}) is not an edge") from None

    def eta(self, u, v):
        key = edge_key(u, v)
        if key in self._eta:
            return self._eta[key]
        return self.omega(u, v)

    @property
    def omega_weights(self) -> Mapping:
        return self._omega

    @property
    def eta_weights(self) -> Mapping:
        """Explicitly given eta values only (the rest default to omega)."""
        return self._eta

    @property
    def extra_weights(self) -> Mapping:
        return self._extra

    def weight(self, u, v, selector: str = "omega"):
        if selector == "omega":
            return self.omega(u, v)
        if selector == "eta":
            return self.eta(u, v)
        if selector == "combinatorial":
            self.omega(u, v)
            return Fraction(1)
        if selector in self._extra:
            return self._extra[selector][edge_key(u, v)]
        raise ValueError(f"unknown weight selector {selector!r}")

    def degree(self, v) -> int:
        """Combinatorial degree."""
        return len(self.neighbors(v))

    def Deg(self, v):
        """Weighted degree ``sum_w omega_vw / m(v)``."""
        return sum((self._omega[edge_key(v, w)] for w in self.neighbors(v)), Fraction(0)) / self._m[v]

    def with_weights(self, omega: Mapping | None = None, measure: Mapping | None = None) -> "WeightedGraph":
        """New snapshot with the same edge set and replaced weights/measure."""
        om = dict(self._omega)
        if omega is not None:
            for (u, v), w in omega.items():
                key = edge_key(u, v)
                if key not in om:
                    raise GraphFormatError(f"{key} is not an edge; topology is frozen")
                om[key] = w
        meas = dict(self._m)
        if measure is not None:
            meas.update(measure)
        return WeightedGraph(meas, om, self._eta,
                             {k: dict(v) for k, v in self._extra.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self._vertices == other._vertices and dict(self._m) == dict(other._m)
                and dict(self._omega) == dict(other._omega)
                and {e: self.eta(*e) for e in self.edges} == {e: other.eta(*e) for e in other.edges}
                and {k: dict(v) for k, v in self._extra.items()}
                == {k: dict(v) for k, v in other._extra.items()})

    def __repr__(self) -> str:
        return f"WeightedGraph(|V|={len(self._vertices)}, |E|={len(self._omega)})"


def _ekey(e):
    return (vertex_key(e[0]), vertex_key(e[1]))


# -- JSON ----------------------------------------------------------------

def graph_from_json(obj) -> WeightedGraph:
    """Build a graph from the JSON schema ``{"vertices": [...], "edges": [...]}``."""
    if not isinstance(obj, dict):
        raise GraphFormatError("top level must be an object with 'vertices' and 'edges'")
    raw_vertices = obj.get("vertices", [])
    raw_edges = obj.get("edges", [])
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise GraphFormatError("'vertices' and 'edges' must be lists")
    measure = {}
    for i, rec in enumerate(raw_vertices):
        where = f"vertices[{i}]"
        if isinstance(rec, dict):
            if "id" not in rec:
                raise GraphFormatError(f"{where}: missing 'id'", field=where)
            vid = rec["id"]
            mv = _field_number(rec.get("m", 1), f"{where}.m")
        else:
            vid, mv = rec, Fraction(1)
        if not isinstance(vid, (str, int)) or isinstance(vid, bool):
            raise GraphFormatError(f"{where}: id must be a string or integer", field=where)
        if vid in measure:
            raise GraphFormatError(f"{where}: duplicate vertex {vid!r}", field=where)
        if not mv > 0:
            raise GraphFormatError(f"{where}.m: nonpositive vertex measure", field=f"{where}.m")
        measure[vid] = mv
    omega, eta, extra = {}, {}, {}
    for i, rec in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(rec, dict) or "u" not in rec or "v" not in rec:
            raise GraphFormatError(f"{where}: edge needs 'u' and 'v'", field=where)
        u, v = rec["u"], rec["v"]
        for z, name in ((u, "u"), (v, "v")):
            if z not in measure:
                raise GraphFormatError(f"{where}.{name}: dangling vertex reference {z!r}",
                                       field=f"{where}.{name}")
        if u == v:
            raise GraphFormatError(f"{where}: self-loop at {u!r}", field=where)
        key = edge_key(u, v)
        if key in omega:
            raise GraphFormatError(f"{where}: duplicate edge {key}", field=where)
        w = _field_number(rec.get("omega", 1), f"{where}.omega")
        if not w > 0:
            raise GraphFormatError(f"{where}.omega: nonpositive weight", field=f"{where}.omega")
        omega[key] = w
        if rec.get("eta") is not None:
            e = _field_number(rec["eta"], f"{where}.eta")
            if not e > 0:
                raise GraphFormatError(f"{where}.eta: nonpositive weight", field=f"{where}.eta")
            eta[key] = e
        for name, val in (rec.get("extra") or {}).items():
            extra.setdefault(name, {})[key] = _field_number(val, f"{where}.extra.{name}")
    return WeightedGraph(measure, omega, eta, extra)


def _field_number(value, where: str) -> Fraction:
    try:
        return parse_number(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise GraphFormatError(f"{where}: not a number ({exc})", field=where) from None


def graph_to_json(g: WeightedGraph) -> dict:
    verts = [{"id": v, "m": format_number(g.m(v))} for v in g.vertices]
    edges = []
    for (u, v), w in g.omega_weights.items():
        rec = {"u": u, "v": v, "omega": format_number(w)}
        if (u, v) in g.eta_weights:
            rec["eta"] = format_number(g.eta_weights[(u, v)])
        ex = {name: format_number(ws[(u, v)]) for name, ws in g.extra_weights.items() if (u, v) in ws}
        if ex:
            rec["extra"] = ex
        edges.append(rec)
    return {"vertices": verts, "edges": edges}


def load_graph(path) -> WeightedGraph:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                               line=exc.lineno) from None
    except OSError as exc:
        raise GraphFormatError(f"cannot read graph file: {exc}") from None
    return graph_from_json(obj)


def dump_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_json(g), fh, indent=2)
        fh.write("\n")


# -- distances -------------------------------------------------------------

def _edge_length(g: WeightedGraph, selector) -> Callable:
    if callable(selector):
        return selector
    if selector not in ("combinatorial", "omega", "eta") and selector not in g.extra_weights:
        raise ValueError(f"unknown weight selector {selector!r}")
    return lambda u, v: g.weight(u, v, selector)


def _dijkstra(g: WeightedGraph, length: Callable, source) -> dict:
    dist = {source: Fraction(0)}
    done = set()
    heap = [(dist[source], 0, source)]
    counter = 1
    while heap:
        du, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for w in g.neighbors(u):
            step = length(u, w)
            if not step > 0:
                raise WeightError(f"non-positive weight on edge {edge_key(u, w)}", edge=edge_key(u, w))
            alt = du + step
            if w not in dist or alt < dist[w]:
                dist[w] = alt
                heapq.heappush(heap, (alt, counter, w))
                counter += 1
    return dist


def shortest_path_distance(g: WeightedGraph, weight="eta", x=None, y=None):
    """Weighted path distance between ``x`` and ``y``.

    ``weight`` selects the edge lengths: ``"combinatorial"`` (unit lengths),
    ``"omega"``, ``"eta"``, an extra weight name, or a callable ``(u, v) -> length``.
    Returns :data:`UNREACHABLE` for pairs in different components.
    """
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        return Fraction(0)
    dist = _dijkstra(g, _edge_length(g, weight), x)
    return dist.get(y, UNREACHABLE)


class Metric:
    """Dense table of pairwise distances on the vertices of a graph.

    Values are Fractions (rational mode) or floats, with :data:`UNREACHABLE`
    for pairs with no connecting path. All metric axioms are checked on
    construction; ``tol`` relaxes the triangle check for float tables.
    """

    def __init__(self, vertices: Iterable, table: Mapping, mode: str = "explicit", *,
                 tol: float = 0, check: bool = True):
        self.vertices = tuple(sorted(vertices, key=vertex_key))
        self.mode = mode
        self._index = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        rows = [[UNREACHABLE] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = 0
        for (u, v), val in table.items():
            if u not in self._index or v not in self._index:
                raise MetricError(f"distance given for unknown vertex pair ({u!r}, {v!r})")
            rows[self._index[u]][self._index[v]] = val
        self._rows = rows
        self.tol = tol
        if check:
            self.validate()

    @classmethod
    def from_graph(cls, g: WeightedGraph, mode: str = "eta") -> "Metric":
        """All-pairs path distance with lengths from ``mode`` (combinatorial, eta, omega)."""
        if mode not in ("combinatorial", "eta", "omega"):
            raise ValueError(f"metric mode {mode!r} is not graph-derived")
        length = _edge_length(g, mode)
        table = {}
        for s in g.vertices:
            for t, dv in _dijkstra(g, length, s).items():
                table[(s, t)] = dv
        is_float = any(isinstance(v, float) for v in table.values())
        return cls(g.vertices, table, mode, tol=1e-12 if is_float else 0)

    @classmethod
    def from_matrix(cls, vertices, matrix) -> "Metric":
        vertices = list(vertices)
        table = {}
        for i, u in enumerate(vertices):
            for j, v in enumerate(vertices):
                val = matrix[i][j]
                if val is None:
                    continue
                table[(u, v)] = parse_number(val) if not isinstance(val, float) else val
        return cls(vertices, table, "explicit")

    @classmethod
    def from_json(cls, obj) -> "Metric":
        """``{"vertices": [...], "d": [[...], ...]}`` with ``null`` for unreachable."""
        try:
            return cls.from_matrix(obj["vertices"], obj["d"])
        except (KeyError, TypeError, IndexError) as exc:
            raise MetricError(f"malformed metric matrix: {exc}") from None

    def index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {v!r}", vertex=v) from None

    def __call__(self, u, v):
        return self._rows[self.index(u)][self.index(v)]

    def finite(self, u, v):
        """Distance, raising :class:`UnreachableError` for disconnected pairs."""
        val = self(u, v)
        if val is UNREACHABLE:
            raise UnreachableError(f"{u!r} and {v!r} are not connected", pair=(u, v))
        return val

    def diameter(self, subset: Iterable | None = None):
        subset = list(self.vertices if subset is None else subset)
        best = 0
        for i, u in enumerate(subset):
            for v in subset[i + 1:]:
                val = self.finite(u, v)
                if val > best:
                    best = val
        return best

    def scaled(self, c) -> "Metric":
        if not c > 0:
            raise MetricError("scale factor must be positive")
        table = {}
        for i, u in enumerate(self.vertices):
            for j, v in enumerate(self.vertices):
                val = self._rows[i][j]
                if val is not UNREACHABLE:
                    table[(u, v)] = val * c
        return Metric(self.vertices, table, self.mode, tol=self.tol, check=False)

    def exact(self) -> "Metric":
        """Copy with every finite entry converted to an exact Fraction."""
        table = {}
        for i, u in enumerate(self.vertices):
            for j, v in enumerate(self.vertices):
                val = self._rows[i][j]
                if val is not UNREACHABLE:
                    table[(u, v)] = exact(val)
        return Metric(self.vertices, table, self.mode, check=False)

    def matrix(self) -> list:
        return [list(r) for r in self._rows]

    def validate(self) -> None:
        rows, n, tol = self._rows, len(self.vertices), self.tol
        names = self.vertices
        for i in range(n):
            if rows[i][i] != 0:
                raise MetricError(f"d({names[i]!r}, {names[i]!r}) must be 0")
            for j in range(n):
                a = rows[i][j]
                if a is not UNREACHABLE and isinstance(a, (Fraction, int, float)):
                    if i != j and not a > 0:
                        raise MetricError(f"d({names[i]!r}, {names[j]!r}) must be positive")
                b = rows[j][i]
                if (a is UNREACHABLE) != (b is UNREACHABLE) or (a is not UNREACHABLE and abs(a - b) > tol):
                    raise MetricError(f"d not symmetric at ({names[i]!r}, {names[j]!r})")
        for k in range(n):
            rk = rows[k]
            for i in range(n):
                dik = rows[i][k]
                if dik is UNREACHABLE:
                    continue
                ri = rows[i]
                for j in range(n):
                    dkj = rk[j]
                    if dkj is UNREACHABLE:
                        continue
                    dij = ri[j]
                    if dij is UNREACHABLE or dij > dik + dkj + tol * (1 + abs(dik + dkj)):
                        raise MetricError(
                            f"triangle inequality fails for ({names[i]!r}, {names[k]!r}, {names[j]!r})")

    def items(self):
        for i, u in enumerate(self.vertices):
            for j, v in enumerate(self.vertices):
                yield (u, v), self._rows[i][j]

    def __repr__(self) -> str:
        return f"Metric(mode={self.mode!r}, n={len(self.vertices)})"


def metric_for(g: WeightedGraph, mode: str = "eta", matrix: Mapping | None = None) -> Metric:
    if mode == "explicit":
        if matrix is None:
            raise MetricError("explicit metric mode needs a matrix")
        met = Metric.from_json(matrix) if isinstance(matrix, dict) and "d" in matrix else matrix
        if set(met.vertices) != set(g.vertices):
            raise MetricError("explicit metric must cover exactly the graph's vertices")
        return met
    return Metric.from_graph(g, mode)


# -- discrete calculus ---------------------------------------------------

def apply_laplacian(g: WeightedGraph, variant: str, f: Mapping) -> dict:
    """Apply a graph Laplacian to the vertex function ``f``.

    ``general``: ``(1/m(x)) sum_{y~x} (f(y) - f(x)) omega_xy``;
    ``combinatorial``: the same with ``m = omega = 1``;
    ``normalized``: the same with ``m(x) = sum_{y~x} omega_xy``.
    """
    rows = laplacian_rows(g, variant)
    return {x: sum((c * f[w] for w, c in row.items()), Fraction(0)) for x, row in rows.items()}


def laplacian_rows(g: WeightedGraph, variant: str = "general") -> dict:
    """Matrix of the Laplacian as ``{x: {w: coefficient}}`` (zero entries omitted)."""
    if variant not in LAPLACIAN_VARIANTS:
        raise ValueError(f"unknown Laplacian variant {variant!r}")
    out = {}
    for x in g.vertices:
        nbrs = g.neighbors(x)
        if variant == "combinatorial":
            weights = {w: Fraction(1) for w in nbrs}
            scale = Fraction(1)
        else:
            weights = {w: g.omega(x, w) for w in nbrs}
            if variant == "general":
                scale = g.m(x)
            else:
                if not nbrs:
                    raise GraphFormatError(f"normalized Laplacian undefined at isolated vertex {x!r}",
                                           vertex=x)
                scale = sum(weights.values())
        row = {w: c / scale for w, c in weights.items()}
        if nbrs:
            row[x] = -sum(row.values())
        out[x] = row
    return out


def grad(d: Metric, f: Mapping, x, y):
    """Directional derivative ``(f(y) - f(x)) / d(x, y)``."""
    if x == y:
        raise MetricError("directional derivative needs x != y")
    return (f[y] - f[x]) / d.finite(x, y)


def metric_ball(g: WeightedGraph, d: Metric, x, r) -> frozenset:
    """Closed ball ``{z : d(x, z) <= r}``."""
    g.check_vertex(x)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    out = set()
    for z in g.vertices:
        val = d(x, z)
        if val is not UNREACHABLE and val <= r:
            out.add(z)
    return frozenset(out)
