"""Degeneration graphs: verified edges, obstructed pairs, closure,
primary (transitively reduced) edges and irreducible components.

A generic family node ``X*`` stands for the closure of the union of the
orbits of ``X^alpha``.  As a target it means the generic member: ``A -> X*``
says ``A`` degenerates to ``X^alpha`` for generic ``alpha``."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

from . import catalog, degeneration, obstruction
from .algebra import derivation_dim, left_annihilator, plus_square
from .catalog import CatalogRef, Variety
from .config import GraphConfig
from .degeneration import Side, member_certificate, orbit_dimension, verify_certificate, zero_certificate
from .obstruction import Kind, ObstructionEvidence
from .scalar import scalar, specialize

log = logging.getLogger(__name__)

# dimension of the ambient variety where it is known to be irreducible
AMBIENT_DIM = {Variety.ACOM3: 9}


class InconsistentEvidence(RuntimeError):
    """A pair is both a verified degeneration and obstructed."""


@dataclass(frozen=True)
class Edge:
    source: CatalogRef
    target: CatalogRef
    kind: str  # certificate, instance, member, zero, dimension
    certificate: object = field(compare=False, default=None)

    @property
    def evidence(self):
        if self.kind == "dimension":
            return f"dimension(orbit of {self.source} is dense)"
        name = getattr(self.certificate, "name", "") or self.kind
        return f"{self.kind}({name})" if self.kind != "certificate" else name


@dataclass
class Component:
    generic: CatalogRef
    members: tuple
    evidence: str


@dataclass
class DegenerationGraph:
    variety: Variety
    nodes: list
    edges: dict = field(default_factory=dict)  # (a, b) -> Edge, direct evidence
    nonedges: dict = field(default_factory=dict)  # (a, b) -> ObstructionEvidence
    unresolved: set = field(default_factory=set)
    _closure: set | None = field(default=None, repr=False)

    def add_edge(self, e: Edge):
        key = (e.source, e.target)
        if e.source == e.target:
            return
        self.edges.setdefault(key, e)
        self._closure = None

    def closure(self) -> set:
        """Transitively closed set of proper pairs ``(a, b)``, ``a -> b``."""
        if self._closure is None:
            succ = {n: set() for n in self.nodes}
            for a, b in self.edges:
                succ[a].add(b)
            out = set()
            for a in self.nodes:
                seen, stack = set(), list(succ[a])
                while stack:
                    x = stack.pop()
                    if x in seen:
                        continue
                    seen.add(x)
                    stack.extend(succ[x])
                out |= {(a, b) for b in seen if b != a}
            self._closure = out
        return self._closure

    def degenerates(self, a, b) -> bool | None:
        """True, False, or None when unresolved."""
        if a == b or (a, b) in self.closure():
            return True
        if (a, b) in self.nonedges:
            return False
        return None

    def status(self, a, b):
        v = self.degenerates(a, b)
        return {True: "DEGEN", False: "BLOCKED", None: "UNRESOLVED"}[v]

    def evidence(self, a, b) -> str:
        if a == b:
            return "identity"
        if (a, b) in self.edges:
            return self.edges[(a, b)].evidence
        if (a, b) in self.closure():
            path = self.path(a, b)
            return "transitive(" + " -> ".join(str(x) for x in path) + ")"
        if (a, b) in self.nonedges:
            return str(self.nonedges[(a, b)])
        return "unresolved"

    def path(self, a, b):
        """Shortest chain of direct edges from ``a`` to ``b``."""
        succ = {}
        for x, y in sorted(self.edges, key=str):
            succ.setdefault(x, []).append(y)
        prev, frontier = {a: None}, [a]
        while frontier:
            nxt = []
            for x in frontier:
                for y in succ.get(x, ()):
                    if y not in prev:
                        prev[y] = x
                        nxt.append(y)
            frontier = nxt
        if b not in prev:
            return None
        out = [b]
        while prev[out[-1]] is not None:
            out.append(prev[out[-1]])
        return out[::-1]

    def maximal_nodes(self):
        targets = {b for _, b in self.closure()}
        return [n for n in self.nodes if n not in targets]

    def check_consistency(self):
        """Raise on any pair both degenerating and obstructed, on cycles, or on
        a direct edge that does not increase Der (decrease orbit dimension for
        a family source)."""
        clo = self.closure()
        both = sorted((set(self.nonedges) & clo), key=str)
        if both:
            a, b = both[0]
            raise InconsistentEvidence(f"{a} -> {b} verified by {self.evidence(a, b)} "
                                       f"but obstructed by {self.nonedges[(a, b)]}")
        for a, b in clo:
            if (b, a) in clo:
                raise InconsistentEvidence(f"cycle between {a} and {b}")
        for (a, b), e in self.edges.items():
            if a.is_generic:
                ok = orbit_dimension(a) > orbit_dimension(b)
            else:
                ok = node_der(a) < node_der(b)
            if not ok:
                raise InconsistentEvidence(f"edge {a} -> {b} violates the dimension inequality")
            if _ann(a) > _ann(b) or _ps(a) < _ps(b):
                raise InconsistentEvidence(f"edge {a} -> {b} violates Ann_L or A^(+2) monotonicity")
        return True


# --------------------------------------------------------------------------
# node invariants


@lru_cache(maxsize=None)
def node_algebra(ref: CatalogRef):
    return catalog.get(ref)


@lru_cache(maxsize=None)
def node_der(ref: CatalogRef) -> int:
    return derivation_dim(node_algebra(ref))


@lru_cache(maxsize=None)
def _ann(ref):
    return left_annihilator(node_algebra(ref)).dim


@lru_cache(maxsize=None)
def _ps(ref):
    return plus_square(node_algebra(ref)).dim


def _node_key(ref):
    return (node_der(ref), ref.name, ref.param is not None, str(ref))


def _node_of(s):
    return s.node() if isinstance(s, Side) else None


def _s_tuple(ref: CatalogRef):
    """Table S-tuple of a node, symbolic for a generic family node."""
    return catalog.s_tuple_of_entry(ref)


# --------------------------------------------------------------------------
# edges


def _instances(cert):
    """Bindings of a certificate's free parameter that land on special nodes."""
    free = cert.free_params
    if len(free) != 1 or cert.index:
        return []
    (p,) = free
    values = []
    for s in (cert.source, cert.target):
        if not isinstance(s, Side) or not s.entry.is_family or s.entry.param is None:
            continue
        if s.value is None and s.entry.param == p:
            values += list(s.entry.specials)
        elif s.value is not None and s.value == scalar(p, (p,)):
            values += list(s.entry.specials)
    out = []
    for v in dict.fromkeys(values):
        out.append({p: scalar(v)})
    return out


def _add_certificate_edges(G: DegenerationGraph, certs):
    nodes = set(G.nodes)
    for cert in certs:
        a, b = _node_of(cert.source), _node_of(cert.target)
        if a not in nodes or b not in nodes:
            continue
        rep = verify_certificate(cert)
        if not rep.valid:
            log.warning("certificate %s failed: %s", cert.name, rep.error)
            continue
        G.add_edge(Edge(a, b, "certificate", cert))
        bad = set(rep.exceptions.values) | set(cert.excluded)
        for binding in _instances(cert):
            (v,) = binding.values()
            if v in bad:
                continue
            inst = cert.instantiate(binding)
            a2, b2 = _node_of(inst.source), _node_of(inst.target)
            if a2 not in nodes or b2 not in nodes or a2.is_generic or b2.is_generic and b2 != b:
                continue
            if verify_certificate(inst).valid:
                G.add_edge(Edge(a2, b2, "instance", inst))


def _add_structural_edges(G: DegenerationGraph):
    zero = CatalogRef("C3")
    for n in G.nodes:
        if n.name == "C3":
            continue
        if n.param is not None:
            fam = CatalogRef(n.name)
            cert = member_certificate(n.name, n.param)
            if fam in G.nodes and verify_certificate(cert).valid:
                G.add_edge(Edge(fam, n, "member", cert))
        cert = zero_certificate(n)
        if verify_certificate(cert).valid:
            G.add_edge(Edge(n, zero, "zero", cert))


def _add_dimension_edges(G: DegenerationGraph):
    """A family whose orbits fill the ambient variety has every node in the
    closure of their union."""
    amb = AMBIENT_DIM.get(G.variety)
    if amb is None:
        return
    for n in G.nodes:
        if n.is_generic and orbit_dimension(n) == amb:
            for m in G.nodes:
                if m != n and (n, m) not in G.edges:
                    G.add_edge(Edge(n, m, "dimension"))


def _relevant_certificates(variety):
    names = {e.name for e in catalog.entries_for(variety)}
    out = []
    for c in degeneration.builtin_certificates():
        if all(isinstance(s, Side) and s.name in names for s in (c.source, c.target)):
            out.append(c)
    return out


# --------------------------------------------------------------------------
# non-edges


def _invariant_evidence(a, b):
    if obstruction.der_obstruction(a, b):
        return ObstructionEvidence(Kind.DER, a, b, (f"Der {node_der(a)} vs {node_der(b)}",))
    if a.is_generic and b.name == a.name:
        return None
    if _ann(a) > _ann(b):
        return ObstructionEvidence(Kind.ANN, a, b, (f"dim Ann_L {_ann(a)} > {_ann(b)}",))
    if _ps(a) < _ps(b):
        return ObstructionEvidence(Kind.PLUS_SQUARE, a, b, (f"dim A^(+2) {_ps(a)} < {_ps(b)}",))
    return None


def _renamed_target(tup, ref):
    """Keep a generic target's parameter apart from the source's."""
    if not ref.is_generic:
        return tup
    p = ref.entry.param
    fresh = scalar(p + "_target", (p + "_target",))
    return tuple(specialize(x, {p: fresh}) for x in tup)


def _s_tuple_evidence(a, b):
    sa, sb = _s_tuple(a), _s_tuple(b)
    if sa is None or sb is None:
        return None
    if a.is_generic and b.name == a.name:
        return None
    res = obstruction.s_tuple_obstruction([sa], _renamed_target(sb, b), identically=True)
    if res.obstructed:
        forms = "; ".join("(" + ", ".join(str(x) for x in f) + ")" for f in res.forms)
        return ObstructionEvidence(Kind.STUPLE, a, b, (f"forms {forms}",))
    return None


def _rset_sources_for(n: CatalogRef):
    """``(n, R, bindings)`` for each Borel-stable set known to contain the
    orbit of ``n``; membership is rechecked exactly."""
    out = []
    A = node_algebra(n)
    if n.name == "L4" and n.param != scalar("2"):
        b = {} if n.param is None else {"alpha": n.param}
        out.append((n, obstruction.RSET_L4, b))
    elif n.name == "L5":
        out.append((n, obstruction.RSET_L5, {}))
    out = [(m, R, b) for m, R, b in out if obstruction.r_membership(A, obstruction.TABLE_BASIS, R.specialize(b))]
    if n.name != "C3" and obstruction.r_membership(A, None, obstruction.RSET_TRACELESS):
        out.append((n, obstruction.RSET_TRACELESS, {}))
    return out


def _rset_sources(G):
    return [x for n in G.nodes for x in _rset_sources_for(n)]


def _rset_evidence(a, R, bindings, b, cfg: GraphConfig):
    if b.is_generic:
        return None
    res = obstruction.orbit_avoids_rset(node_algebra(b), R, bindings, budget=cfg.budget, seed=cfg.seed)
    if not res.proven:
        return None
    if a.is_generic:
        payload = (R.name, f"exceptions {{{', '.join(str(x) for x in res.exceptions)}}}")
    elif res.exceptions:
        return None
    else:
        payload = (R.name,)
    return ObstructionEvidence(Kind.RSET, a, b, payload)


def pair_checks(a: CatalogRef, b: CatalogRef, cfg: GraphConfig | None = None) -> list:
    """Run every applicable obstruction on ``a -> b`` without stopping at the
    first success.  Returns ``(name, status, detail)`` with status
    ``BLOCKED``, ``OPEN`` (argument does not apply or does not block) or
    ``INCONCLUSIVE``."""
    cfg = cfg or GraphConfig()
    out = []
    checks = (
        ("der", lambda: obstruction.der_obstruction(a, b), f"Der {node_der(a)} vs {node_der(b)}"),
        ("ann_l", lambda: obstruction.ann_obstruction(a, b), f"dim Ann_L {_ann(a)} vs {_ann(b)}"),
        ("plus_square", lambda: obstruction.plus_square_obstruction(a, b), f"dim A^(+2) {_ps(a)} vs {_ps(b)}"),
    )
    for name, fn, detail in checks:
        out.append((name, "BLOCKED" if fn() else "OPEN", detail))
    if _s_tuple(a) is not None and _s_tuple(b) is not None:
        ev = _s_tuple_evidence(a, b)
        out.append(("s_tuple", "BLOCKED" if ev else "OPEN", str(ev) if ev else "forms vanish on the target"))
    for n, R, bnd in _rset_sources_for(a):
        if b.is_generic:
            out.append((f"rset {R.name}", "OPEN", "target must be a concrete member"))
            continue
        res = obstruction.orbit_avoids_rset(node_algebra(b), R, bnd, budget=cfg.budget, seed=cfg.seed)
        if res.verdict is obstruction.Verdict.INCONCLUSIVE:
            out.append((f"rset {R.name}", "INCONCLUSIVE", res.detail))
        elif res.proven and (a.is_generic or not res.exceptions):
            exc = ", ".join(str(x) for x in res.exceptions)
            out.append((f"rset {R.name}", "BLOCKED", f"orbit avoids R; exceptions {{{exc}}}"))
        else:
            out.append((f"rset {R.name}", "OPEN", res.verdict.value))
    return out


# --------------------------------------------------------------------------
# construction


def build_graph(variety, config: GraphConfig | None = None) -> DegenerationGraph:
    cfg = config or GraphConfig()
    variety = Variety(variety)
    nodes = sorted(catalog.all_refs(variety), key=_node_key)
    G = DegenerationGraph(variety, nodes)
    _add_certificate_edges(G, _relevant_certificates(variety))
    _add_structural_edges(G)
    _add_dimension_edges(G)
    clo = G.closure()
    pairs = [(a, b) for a in nodes for b in nodes if a != b and (a, b) not in clo]
    todo = []
    for a, b in pairs:
        ev = _invariant_evidence(a, b) if cfg.use_invariants else None
        if ev is None and cfg.use_s_tuples:
            ev = _s_tuple_evidence(a, b)
        if ev is not None:
            G.nonedges[(a, b)] = ev
        else:
            todo.append((a, b))
    if cfg.use_rsets:
        sources = {}
        for n, R, bnd in _rset_sources(G):
            sources.setdefault(n, []).append((R, bnd))
        rest = []
        for a, b in todo:
            ev = None
            for R, bnd in sources.get(a, ()):
                ev = _rset_evidence(a, R, bnd, b, cfg)
                if ev is not None:
                    break
            if ev is not None:
                G.nonedges[(a, b)] = ev
            else:
                rest.append((a, b))
        todo = rest
    if cfg.use_propagation:
        new = obstruction.propagate(clo, set(G.nonedges))
        for (x, y), (rule, a, b, c) in new.items():
            note = f"{a} -/-> {c}, {a} -> {b}" if rule == "source" else f"{a} -/-> {c}, {b} -> {c}"
            G.nonedges[(x, y)] = ObstructionEvidence(Kind.PROPAGATED, x, y, (note,))
    G.unresolved = {p for p in todo if p not in G.nonedges}
    G.check_consistency()
    return G


def primary_reduction(G: DegenerationGraph) -> list:
    """Transitive reduction of the closure: pairs ``a -> b`` with no node
    strictly between them.  Unique because the order has no cycles."""
    clo = G.closure()
    out = []
    for a, b in clo:
        if not any((a, c) in clo and (c, b) in clo for c in G.nodes if c not in (a, b)):
            out.append((a, b))
    order = {n: i for i, n in enumerate(G.nodes)}
    return sorted(out, key=lambda p: (order[p[0]], order[p[1]]))


def components(G: DegenerationGraph) -> list:
    """Irreducible components as closures of maximal nodes.  When a node's
    orbit closure has the ambient dimension it is the only component."""
    amb = AMBIENT_DIM.get(G.variety)
    if amb is not None:
        for n in G.nodes:
            if orbit_dimension(n) == amb:
                return [Component(n, tuple(G.nodes), f"orbit dimension {amb} = dim {G.variety.value}")]
    clo = G.closure()
    out = []
    for m in G.maximal_nodes():
        members = [m] + [b for b in G.nodes if (m, b) in clo]
        out.append(Component(m, tuple(members), "closure of a maximal node"))
    return out


# --------------------------------------------------------------------------
# export


def export_dot(G: DegenerationGraph, primary_only=True) -> str:
    pairs = primary_reduction(G) if primary_only else sorted(G.closure(), key=str)
    lines = [f'digraph "{G.variety.value}" {{', "  rankdir=TB;"]
    for n in G.nodes:
        label = n.label() + ("*" if n.is_generic else "")
        lines.append(f'  "{n}" [label="{label}", der={node_der(n)}];')
    for a, b in pairs:
        lines.append(f'  "{a}" -> "{b}";')
    for a, b in sorted(G.unresolved, key=str):
        lines.append(f"  // unresolved: {a} -> {b}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def adjacency(G: DegenerationGraph, primary_only=True) -> str:
    pairs = primary_reduction(G) if primary_only else sorted(G.closure(), key=str)
    succ = {n: [] for n in G.nodes}
    for a, b in pairs:
        succ[a].append(b)
    return "\n".join(f"{a}: {', '.join(str(b) for b in succ[a])}" for a in G.nodes) + "\n"


def generic_reaches(G: DegenerationGraph, a: CatalogRef, b: CatalogRef) -> bool:
    """Whether the chain of direct edges from ``a`` reaches ``b`` without
    passing to a special member.  For a generic family source this is the
    claim about the generic member rather than the union of orbits."""
    if not a.is_generic:
        return (a, b) in G.closure()
    succ = {}
    for (x, y), e in G.edges.items():
        if e.kind not in ("member", "dimension"):
            succ.setdefault(x, []).append(y)
    seen, stack = set(), list(succ.get(a, ()))
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(succ.get(x, ()))
    return b in seen
