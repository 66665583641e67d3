"""Assembly of the double decker set into components, mates, and A_f.

Decker edges live in the surface 1-skeleton (marked by the builder or by
moves).  Components are the connected pieces; a component through branch
vertices is a branch-arc (its two halves cover one double arc ending at
branch points), everything else is a circle that covers a closed double
curve together with its mate on the other sheet.
"""

from __future__ import annotations

from dataclasses import dataclass

from .surface import ComplexInvariantError


@dataclass
class DeckerComponent:
    id: str
    kind: str                  # 'circle' | 'branch-arc'
    edges: tuple               # ((edge_id, traversal_sign), ...) cyclic
    role: str                  # 'upper' | 'lower' | 'mixed'
    mate_id: str
    surface_component: str
    mate_surface_component: str
    branch_vertices: tuple = ()

    @property
    def is_circle(self):
        return self.kind == "circle"

    def edge_ids(self):
        return tuple(eid for eid, _ in self.edges)


@dataclass(frozen=True)
class AfSet:
    """Ids of decker circles whose double curve meets two distinct components."""

    circles: frozenset

    def __contains__(self, cid):
        return cid in self.circles

    def __iter__(self):
        return iter(sorted(self.circles))

    def __len__(self):
        return len(self.circles)


def assemble_decker(surface):
    """Partition marked edges into components and pair mates by lineage."""
    marked = surface.decker_edges()
    ends = {}
    for eid, e in marked.items():
        ends.setdefault(e.tail, []).append((eid, "tail"))
        ends.setdefault(e.head, []).append((eid, "head"))
    for vid, incident in ends.items():
        if len(incident) != 2:
            raise ComplexInvariantError(
                "decker set is not a 1-manifold at vertex %s (degree %d)"
                % (vid, len(incident))
            )

    visited = set()
    raw = []
    for start in sorted(marked):
        if start in visited:
            continue
        walk = [(start, 1)]
        visited.add(start)
        cur, sgn = start, 1
        while True:
            e = marked[cur]
            tip = e.head if sgn == 1 else e.tail
            nxt = [(eid, end) for eid, end in ends[tip] if eid != cur]
            if not nxt:
                # single edge closing on itself through the same vertex
                others = [(eid, end) for eid, end in ends[tip]]
                nxt = [x for x in others if x != (cur, "head" if sgn == 1 else "tail")]
            neid, nend = nxt[0]
            nsgn = 1 if nend == "tail" else -1
            if neid == start and nsgn == 1:
                break
            walk.append((neid, nsgn))
            visited.add(neid)
            cur, sgn = neid, nsgn
        raw.append(walk)

    comps = []
    for idx, walk in enumerate(raw):
        eids = [eid for eid, _ in walk]
        roles = {marked[eid].decker.role for eid in eids}
        surf_comp = {marked[eid].component for eid in eids}
        if len(surf_comp) != 1:
            raise ComplexInvariantError("decker component straddles surface components")
        branch = []
        for eid, sgn in walk:
            e = marked[eid]
            for vid in (e.tail, e.head):
                if surface.vertices[vid].branch and vid not in branch:
                    branch.append(vid)
        kind = "branch-arc" if branch else "circle"
        if kind == "circle" and len(roles) != 1:
            raise ComplexInvariantError(
                "decker circle with mixed roles: %r" % sorted(roles)
            )
        comps.append(
            {
                "edges": tuple(walk),
                "role": roles.pop() if kind == "circle" else "mixed",
                "surface": surf_comp.pop(),
                "kind": kind,
                "branch": tuple(sorted(branch)),
            }
        )

    # mate pairing through shared lineage tags
    comp_of_edge = {}
    for i, c in enumerate(comps):
        for eid, _ in c["edges"]:
            comp_of_edge[eid] = i
    by_lineage = {}
    for eid, e in marked.items():
        by_lineage.setdefault((e.decker.lineage, e.decker.role), set()).add(
            comp_of_edge[eid]
        )
    mates = [None] * len(comps)
    for i, c in enumerate(comps):
        candidates = set()
        for eid, _ in c["edges"]:
            e = marked[eid]
            other_role = "lower" if e.decker.role == "upper" else "upper"
            partners = by_lineage.get((e.decker.lineage, other_role), set())
            candidates.update(partners)
        if c["kind"] == "branch-arc":
            candidates.discard(i)
            if candidates:
                raise ComplexInvariantError("branch-arc paired with another component")
            mates[i] = i
            continue
        if len(candidates) != 1:
            raise ComplexInvariantError(
                "circle %d has ambiguous mate candidates %r" % (i, sorted(candidates))
            )
        mates[i] = candidates.pop()
    for i, m in enumerate(mates):
        if comps[i]["kind"] == "circle":
            if m == i or mates[m] != i:
                raise ComplexInvariantError("mate pairing is not a fixed-point-free involution on circles")
            if comps[i]["role"] == comps[m]["role"]:
                raise ComplexInvariantError("mated circles share a role")

    out = []
    for i, c in enumerate(comps):
        out.append(
            DeckerComponent(
                id="d%d" % i,
                kind=c["kind"],
                edges=c["edges"],
                role=c["role"],
                mate_id="d%d" % mates[i],
                surface_component=c["surface"],
                mate_surface_component=comps[mates[i]]["surface"],
                branch_vertices=c["branch"],
            )
        )
    return out


def compute_Af(decker):
    """Circles whose mate lies on a different surface component."""
    members = set()
    for c in decker:
        if c.kind != "circle":
            continue
        if c.surface_component != c.mate_surface_component:
            members.add(c.id)
    return AfSet(circles=frozenset(members))
