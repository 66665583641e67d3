"""Reconstruction of the swept surface of a movie as an oriented cell complex.

The builder extrudes a product slab before every event (each still edge
becomes a square, each still vertex a vertical edge) and performs local cell
surgery at the event level.  Double decker curves land in the 1-skeleton:

* the two passage points of a live crossing contribute one vertical decker
  edge each per slab (upper on the over strand, lower on the under strand);
* an r2+ marks the newborn bigon arcs at the creation level, joining the two
  upper traces to each other and the two lower traces to each other;
* an r2- marks the collapsing bigon arcs at the cancellation level the same
  way;
* r1+ and r1- mark the two halves of the kink loop, which meet at a branch
  vertex shared by the upper and the lower trace.

Face boundary words are chosen so that every edge is used exactly twice with
opposite induced orientations; this is the global orientation of the surface
and is re-checked after every build.
"""

from __future__ import annotations

from dataclasses import dataclass

from .movie import Observer, PGateError, ReplayEngine, is_p_movie

# tangent sign of a decker vertical per (crossing sign, strand role, upward
# time convention); derived from the two-transverse-sheets local model in
# invariant.local_model_tangent_sign and pinned by tests against it
FRAME_SIGN_TABLE = {
    (1, "upper", True): 1,
    (1, "lower", True): 1,
    (-1, "upper", True): -1,
    (-1, "lower", True): -1,
    (1, "upper", False): -1,
    (1, "lower", False): -1,
    (-1, "upper", False): 1,
    (-1, "lower", False): 1,
}


class SurfaceError(Exception):
    """Invalid surface-level input (label mismatches, open surfaces, ...)."""


class ComplexInvariantError(AssertionError):
    """Internal consistency failure; indicates a builder bug, not bad input."""


@dataclass
class DeckerMark:
    lineage: str
    role: str            # 'upper' | 'lower'
    flow: object = None  # +1/-1 along the edge cell, None until oriented
    sign: int = 0        # crossing sign for verticals, move flavour for inserts
    partner: object = None  # edge id of the opposite-role edge over the same
                            # double-curve piece, where one exists


@dataclass
class Vertex:
    id: str
    component: str
    branch: bool = False


@dataclass
class Edge:
    id: str
    tail: str
    head: str
    component: str
    decker: object = None  # DeckerMark | None


@dataclass
class Face:
    id: str
    word: tuple  # ((edge_id, +1|-1), ...)
    component: str
    kind: str


@dataclass
class ComponentInfo:
    label: str
    orient: int
    anchor_face: str
    chi: int = 0
    genus: int = 0


class SurfaceComplex:
    """Closed oriented surface with labelled components and decker marks."""

    def __init__(self, name="", ambient=1):
        self.name = name
        self.ambient = ambient
        self.vertices = {}
        self.edges = {}
        self.faces = {}
        self.components = {}
        self._counters = {"v": 0, "e": 0, "f": 0}

    # -- cell creation -----------------------------------------------------

    def _next_id(self, kind):
        n = self._counters[kind]
        self._counters[kind] = n + 1
        return "%s%d" % (kind, n)

    def new_vertex(self, component, branch=False):
        v = Vertex(self._next_id("v"), component, branch)
        self.vertices[v.id] = v
        return v

    def new_edge(self, tail, head, component, decker=None):
        e = Edge(self._next_id("e"), tail, head, component, decker)
        self.edges[e.id] = e
        return e

    def new_face(self, word, component, kind):
        f = Face(self._next_id("f"), tuple(word), component, kind)
        self.faces[f.id] = f
        return f

    # -- queries ------------------------------------------------------------

    def euler(self):
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def edge_usages(self):
        """Map edge id -> list of (face id, sign) over all boundary words."""
        out = {eid: [] for eid in self.edges}
        for f in self.faces.values():
            for eid, sgn in f.word:
                out[eid].append((f.id, sgn))
        return out

    def edge_faces(self, eid):
        return [fid for fid, _ in self.edge_usages()[eid]]

    def decker_edges(self):
        return {eid: e for eid, e in self.edges.items() if e.decker is not None}

    def letter_vertices(self, eid, sgn):
        e = self.edges[eid]
        return (e.tail, e.head) if sgn == 1 else (e.head, e.tail)

    def copy(self):
        s = SurfaceComplex(self.name, self.ambient)
        for v in self.vertices.values():
            s.vertices[v.id] = Vertex(v.id, v.component, v.branch)
        for e in self.edges.values():
            mark = None
            if e.decker is not None:
                d = e.decker
                mark = DeckerMark(d.lineage, d.role, d.flow, d.sign, d.partner)
            s.edges[e.id] = Edge(e.id, e.tail, e.head, e.component, mark)
        for f in self.faces.values():
            s.faces[f.id] = Face(f.id, f.word, f.component, f.kind)
        for c in self.components.values():
            s.components[c.label] = ComponentInfo(c.label, c.orient, c.anchor_face, c.chi, c.genus)
        s._counters = dict(self._counters)
        return s

    # -- edge subdivision ----------------------------------------------------

    def subdivide_edge(self, eid, cuts):
        """Replace an edge by a chain of cuts+1 edges, rewriting face words.

        Only legal on unmarked edges (decker marks never need splitting while
        building; moves subdivide before marking).  Returns (cells, vertices)
        in tail-to-head order.
        """
        e = self.edges[eid]
        if e.decker is not None:
            raise ComplexInvariantError("subdividing a marked decker edge %s" % eid)
        verts = [self.new_vertex(e.component) for _ in range(cuts)]
        chain = [e.tail] + [v.id for v in verts] + [e.head]
        cells = [
            self.new_edge(chain[i], chain[i + 1], e.component)
            for i in range(len(chain) - 1)
        ]
        fwd = tuple((c.id, 1) for c in cells)
        rev = tuple((c.id, -1) for c in reversed(cells))
        for f in self.faces.values():
            if all(we != eid for we, _ in f.word):
                continue
            new_word = []
            for we, ws in f.word:
                if we == eid:
                    new_word.extend(fwd if ws == 1 else rev)
                else:
                    new_word.append((we, ws))
            f.word = tuple(new_word)
        del self.edges[eid]
        return cells, verts

    # -- validation ----------------------------------------------------------

    def validate(self):
        """Closed-surface checks: edge pairing, vertex links, labels, genus."""
        usages = self.edge_usages()
        for eid, us in usages.items():
            if len(us) != 2 or us[0][1] + us[1][1] != 0:
                raise ComplexInvariantError(
                    "edge %s used %r; need exactly one +1 and one -1" % (eid, us)
                )
        for e in self.edges.values():
            if e.tail not in self.vertices or e.head not in self.vertices:
                raise ComplexInvariantError("edge %s has missing endpoints" % e.id)
            if (
                self.vertices[e.tail].component != e.component
                or self.vertices[e.head].component != e.component
            ):
                raise ComplexInvariantError("edge %s straddles components" % e.id)
        self._validate_links()
        self._validate_components()
        self._validate_decker()

    def _validate_links(self):
        # walk the corner structure around every vertex; one orbit per vertex
        # usage extremities: (face, pos, 0|1) with 0 = letter start, 1 = end
        at_vertex = {}
        end_of = {}
        for f in self.faces.values():
            w = f.word
            for i, (eid, sgn) in enumerate(w):
                start_v, end_v = self.letter_vertices(eid, sgn)
                at_vertex.setdefault(start_v, []).append((f.id, i, 0))
                at_vertex.setdefault(end_v, []).append((f.id, i, 1))
                end_of[(f.id, i, 0)] = (eid, start_v)
                end_of[(f.id, i, 1)] = (eid, end_v)
        for v in self.vertices.values():
            if v.id not in at_vertex:
                raise ComplexInvariantError("isolated vertex %s" % v.id)
        # corner step: end of letter i joins start of letter i+1 in the face
        corner_next = {}
        for f in self.faces.values():
            n = len(f.word)
            for i in range(n):
                j = (i + 1) % n
                a = (f.id, i, 1)
                b = (f.id, j, 0)
                if end_of[a][1] != end_of[b][1]:
                    raise ComplexInvariantError(
                        "face %s word does not close at position %d" % (f.id, i)
                    )
                corner_next[a] = b
                corner_next[b] = a
        # edge side step: the two usages of an edge pair their extremities
        # sitting at the same geometric end
        side_partner = {}
        by_edge = {}
        for f in self.faces.values():
            for i, (eid, sgn) in enumerate(f.word):
                by_edge.setdefault(eid, []).append((f.id, i, sgn))
        for eid, us in by_edge.items():
            (f1, i1, s1), (f2, i2, s2) = us
            # extremity at the edge tail: start of a +1 usage, end of a -1
            tail1 = (f1, i1, 0 if s1 == 1 else 1)
            tail2 = (f2, i2, 0 if s2 == 1 else 1)
            head1 = (f1, i1, 1 if s1 == 1 else 0)
            head2 = (f2, i2, 1 if s2 == 1 else 0)
            side_partner[tail1] = tail2
            side_partner[tail2] = tail1
            side_partner[head1] = head2
            side_partner[head2] = head1
        visited = set()
        orbits_at = {}
        for ext in end_of:
            if ext in visited:
                continue
            v = end_of[ext][1]
            orbits_at[v] = orbits_at.get(v, 0) + 1
            cur = ext
            while True:
                visited.add(cur)
                cur = side_partner[corner_next[cur]]
                if cur == ext:
                    break
        for v, n in orbits_at.items():
            if n != 1:
                raise ComplexInvariantError(
                    "vertex %s link has %d components; not a surface point" % (v, n)
                )

    def _validate_components(self):
        # cells of one label must form a single connected piece
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for vid in self.vertices:
            parent[("v", vid)] = ("v", vid)
        for e in self.edges.values():
            parent[("e", e.id)] = ("e", e.id)
        for f in self.faces.values():
            parent[("f", f.id)] = ("f", f.id)
        for e in self.edges.values():
            union(("e", e.id), ("v", e.tail))
            union(("e", e.id), ("v", e.head))
        for f in self.faces.values():
            for eid, _ in f.word:
                union(("f", f.id), ("e", eid))
        pieces = {}
        for vid, v in self.vertices.items():
            pieces.setdefault(v.component, set()).add(find(("v", vid)))
        for label, roots in pieces.items():
            if label not in self.components:
                raise ComplexInvariantError("cells labelled %r without a component" % label)
            if len(roots) != 1:
                raise SurfaceError(
                    "component label %r splits into %d connected pieces; "
                    "labels must name single components" % (label, len(roots))
                )
        chi_total = 0
        for label, info in self.components.items():
            nv = sum(1 for v in self.vertices.values() if v.component == label)
            ne = sum(1 for e in self.edges.values() if e.component == label)
            nf = sum(1 for f in self.faces.values() if f.component == label)
            if not (nv and ne and nf):
                raise SurfaceError("component %r has no cells" % label)
            chi = nv - ne + nf
            if chi % 2 != 0 or chi > 2:
                raise ComplexInvariantError("component %r has chi=%d" % (label, chi))
            info.chi = chi
            info.genus = (2 - chi) // 2
            chi_total += chi
        if chi_total != self.euler():
            raise ComplexInvariantError("component chi sum mismatch")

    def _validate_decker(self):
        degree = {}
        for e in self.edges.values():
            if e.decker is None:
                continue
            for v in (e.tail, e.head):
                degree[v] = degree.get(v, 0) + 1
        for v, d in degree.items():
            if d != 2:
                raise ComplexInvariantError(
                    "decker curves are not a 1-manifold: vertex %s has degree %d" % (v, d)
                )


# ---------------------------------------------------------------------------
# the builder


class _Builder(Observer):
    def __init__(self, name, ambient=1):
        self.s = SurfaceComplex(name, ambient)
        self.paths = {}      # arc name -> [edge id] traversed tail-to-head
        self.xvert = {}      # crossing id -> {'o': vertex id, 'u': vertex id}
        self.xtag = {}       # crossing id -> unique lineage tag
        self._event_bigons = {}

    # helpers ---------------------------------------------------------------

    def _start_vertex(self, arc):
        return self.s.edges[self.paths[arc][0]].tail

    def _subdivide_last(self, arc, cuts):
        path = self.paths[arc]
        cells, verts = self.s.subdivide_edge(path[-1], cuts)
        self.paths[arc] = path[:-1] + [c.id for c in cells]
        return [c.id for c in cells], [v.id for v in verts]

    # extrusion --------------------------------------------------------------

    def on_extrude(self, engine):
        vmap = {}
        for arc in sorted(self.paths):
            for eid in self.paths[arc]:
                e = self.s.edges[eid]
                for vid in (e.tail, e.head):
                    if vid not in vmap:
                        vmap[vid] = self.s.new_vertex(self.s.vertices[vid].component).id
        verticals = {}
        for vid in sorted(vmap):
            verticals[vid] = self.s.new_edge(vid, vmap[vid], self.s.vertices[vid].component).id
        new_paths = {}
        for arc in sorted(self.paths):
            new_path = []
            for eid in self.paths[arc]:
                e = self.s.edges[eid]
                top = self.s.new_edge(vmap[e.tail], vmap[e.head], e.component)
                self.s.new_face(
                    [(eid, 1), (verticals[e.head], 1), (top.id, -1), (verticals[e.tail], -1)],
                    e.component,
                    "slab",
                )
                new_path.append(top.id)
            new_paths[arc] = new_path
        self.paths = new_paths
        # vertical edges over crossing passages are decker edges
        for cid in sorted(engine.xings):
            x = engine.xings[cid]
            sigma = (
                engine.label_orient[engine.arcs[x.over_in].component]
                * engine.label_orient[engine.arcs[x.under_in].component]
            )
            flow = FRAME_SIGN_TABLE[(x.sign, "upper", True)] * sigma * self.s.ambient
            tag = self.xtag[cid]
            ov, uv = self.xvert[cid]["o"], self.xvert[cid]["u"]
            up = self.s.edges[verticals[ov]]
            lo = self.s.edges[verticals[uv]]
            up.decker = DeckerMark(tag, "upper", flow, x.sign, lo.id)
            lo.decker = DeckerMark(tag, "lower", flow, x.sign, up.id)
            self.xvert[cid] = {"o": vmap[ov], "u": vmap[uv]}

    # Morse events -----------------------------------------------------------

    def on_birth(self, engine, circle, component, orient):
        v = self.s.new_vertex(component)
        e = self.s.new_edge(v.id, v.id, component)
        cap = self.s.new_face([(e.id, -1)], component, "cap")
        self.paths[circle] = [e.id]
        if component not in self.s.components:
            self.s.components[component] = ComponentInfo(component, orient, cap.id)

    def on_death(self, engine, arc):
        comp = engine.arcs[arc].component
        word = [(eid, 1) for eid in self.paths[arc]]
        self.s.new_face(word, comp, "cap")
        del self.paths[arc]

    def on_saddle_merge(self, engine, arc_a, arc_b, survivor):
        comp = engine.arcs[arc_a].component
        va = self._start_vertex(arc_a)
        vb = self._start_vertex(arc_b)
        br1 = self.s.new_edge(vb, va, comp)  # traversed -1 by the band
        br2 = self.s.new_edge(va, vb, comp)
        word = (
            [(eid, 1) for eid in self.paths[arc_a]]
            + [(br1.id, -1)]
            + [(eid, 1) for eid in self.paths[arc_b]]
            + [(br2.id, -1)]
        )
        self.s.new_face(word, comp, "saddle")
        del self.paths[arc_a]
        del self.paths[arc_b]
        self.paths[survivor] = [br2.id, br1.id]

    def on_saddle_split(self, engine, arc, piece1, piece2):
        comp = engine.arcs[arc].component
        va = self._start_vertex(arc)
        w1 = self.s.new_vertex(comp)
        w2 = self.s.new_vertex(comp)
        s1 = self.s.new_edge(va, w1.id, comp)
        l1 = self.s.new_edge(w1.id, w1.id, comp)
        s2 = self.s.new_edge(va, w2.id, comp)
        l2 = self.s.new_edge(w2.id, w2.id, comp)
        word = (
            [(eid, 1) for eid in self.paths[arc]]
            + [(s1.id, 1), (l1.id, -1), (s1.id, -1), (s2.id, 1), (l2.id, -1), (s2.id, -1)]
        )
        self.s.new_face(word, comp, "saddle")
        del self.paths[arc]
        self.paths[piece1] = [l1.id]
        self.paths[piece2] = [l2.id]

    # crossings --------------------------------------------------------------

    def on_crossings_created(self, engine, cids):
        for cid in cids:
            self.xtag[cid] = "%s@%d" % (cid, engine._index)
        up = self._event_bigons.pop("upper", None)
        lo = self._event_bigons.pop("lower", None)
        if up is not None and lo is not None:
            self.s.edges[up].decker.partner = lo
            self.s.edges[lo].decker.partner = up

    def on_split2(self, engine, arc, bigon, out, was_loop, cid_first, cid_second, lane):
        cells, verts = self._subdivide_last(arc, 2)
        prefix = self.paths[arc][:-3]
        c1, c2, c3 = cells
        v1, v2 = verts
        self.xvert.setdefault(cid_first, {})[lane] = v1
        self.xvert.setdefault(cid_second, {})[lane] = v2
        if was_loop:
            self.paths[arc] = [c3] + prefix + [c1]
            self.paths[bigon] = [c2]
        else:
            self.paths[arc] = prefix + [c1]
            self.paths[bigon] = [c2]
            self.paths[out] = [c3]
        # the newborn bigon at the creation level joins the two nascent traces
        role = "upper" if lane == "o" else "lower"
        tag = "join:%s:%s" % tuple(
            sorted("%s@%d" % (c, engine._index) for c in (cid_first, cid_second))
        )
        self.s.edges[c2].decker = DeckerMark(tag, role, None, 0, None)
        self._event_bigons[role] = c2

    def on_split3(self, engine, arc, kink, out, was_loop, z):
        cells, verts = self._subdivide_last(arc, 3)
        prefix = self.paths[arc][:-4]
        c1, c2, c3, c4 = cells
        v1, w, v3 = verts
        self.xvert[z] = {"o": v1, "u": v3}
        self.s.vertices[w].branch = True
        if was_loop:
            self.paths[arc] = [c4] + prefix + [c1]
            self.paths[kink] = [c2, c3]
        else:
            self.paths[arc] = prefix + [c1]
            self.paths[kink] = [c2, c3]
            self.paths[out] = [c4]
        tag = "branch:%s@%d" % (z, engine._index)
        self.s.edges[c2].decker = DeckerMark(tag, "upper", None, 0, c3)
        self.s.edges[c3].decker = DeckerMark(tag, "lower", None, 0, c2)

    def on_mark_bridge(self, engine, over_arc, under_arc, x, y):
        tag = "join:%s:%s" % tuple(sorted((self.xtag[x], self.xtag[y])))
        for eid in self.paths[over_arc]:
            self.s.edges[eid].decker = DeckerMark(tag, "upper", None, 0, None)
        for eid in self.paths[under_arc]:
            self.s.edges[eid].decker = DeckerMark(tag, "lower", None, 0, None)

    def on_mark_branch_collapse(self, engine, z, loop_arc, over_end_first):
        if len(self.paths[loop_arc]) % 2 == 1:
            self._subdivide_last(loop_arc, 1)
        path = self.paths[loop_arc]
        half = len(path) // 2
        mid_vertex = self.s.edges[path[half - 1]].head
        self.s.vertices[mid_vertex].branch = True
        tag = "branch:%s" % self.xtag[z]
        first_role = "upper" if over_end_first else "lower"
        second_role = "lower" if over_end_first else "upper"
        for i, eid in enumerate(path):
            role = first_role if i < half else second_role
            partner = path[len(path) - 1 - i]
            self.s.edges[eid].decker = DeckerMark(tag, role, None, 0, partner)

    def on_merge(self, engine, chain, survivor, closed):
        merged = []
        for name in chain:
            merged.extend(self.paths.pop(name))
        self.paths[survivor] = merged

    def on_finish(self, engine):
        if self.paths:
            raise ComplexInvariantError("paths left over after a closed movie")


def build_surface(movie, ambient=1):
    """Build the oriented cell complex swept by a valid p-movie."""
    if not is_p_movie(movie):
        raise PGateError(
            "movie %r contains an r3 transition; refusing to build surface data" % movie.name
        )
    builder = _Builder(movie.name, ambient)
    engine = ReplayEngine(observer=builder)
    engine.run(movie)
    builder.s.validate()
    return builder.s


def component_summary(surface):
    """(label, genus, Euler characteristic) per component, label-sorted."""
    out = []
    for label in sorted(surface.components):
        info = surface.components[label]
        out.append((label, info.genus, info.chi))
    return out


def morse_euler(movie):
    """Euler characteristic predicted by Morse data alone."""
    chi = 0
    for ev in movie.events:
        if ev.kind in ("birth", "death"):
            chi += 1
        elif ev.kind == "saddle":
            chi -= 1
    return chi
