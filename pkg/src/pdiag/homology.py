"""Integer cellular homology for closed oriented surface complexes.

Everything here is exact: matrices are plain Python ints (arbitrary
precision), so Smith normal form pivots can grow without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class NotACycleError(ValueError):
    """Raised when a chain handed to class_of_cycle has nonzero boundary."""

    def __init__(self, bad_vertices):
        self.bad_vertices = list(bad_vertices)
        super().__init__(
            "chain is not a 1-cycle; nonzero boundary at vertices: %s"
            % ", ".join(str(v) for v in self.bad_vertices)
        )


# ---------------------------------------------------------------------------
# dense integer matrix helpers


def mat_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(m):
                    oi[j] += x * bt[j]
    return out


def mat_det(a):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def gcd_list(values):
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SNFResult:
    """S = U * M * V with U, V unimodular and S diagonal, d_i | d_{i+1}."""

    rows: int
    cols: int
    diag: list
    U: list
    V: list
    Vinv: list
    rank: int


def _snf_core(entries, nrows, ncols):
    """Sparse elimination with dense transform accumulation.

    entries: {(r, c): value}.  Returns an SNFResult.  Pivoting prefers the
    smallest absolute value (ties broken by position) so unit entries are
    consumed first and coefficient growth stays tame on incidence matrices.
    """
    m = {}
    for (r, c), v in entries.items():
        if v:
            m.setdefault(r, {})[c] = v
    U = mat_identity(nrows)
    V = mat_identity(ncols)
    Vinv = mat_identity(ncols)

    def row_add(dst, src, t):
        # R_dst += t * R_src
        srow = m.get(src)
        if srow:
            drow = m.setdefault(dst, {})
            for c, v in srow.items():
                nv = drow.get(c, 0) + t * v
                if nv:
                    drow[c] = nv
                else:
                    drow.pop(c, None)
            if not drow:
                m.pop(dst, None)
        ur = U[src]
        ud = U[dst]
        for j in range(nrows):
            ud[j] += t * ur[j]

    def col_add(dst, src, t):
        # C_dst += t * C_src ; Vinv gets the inverse op as a row op
        for r, row in list(m.items()):
            v = row.get(src)
            if v:
                nv = row.get(dst, 0) + t * v
                if nv:
                    row[dst] = nv
                else:
                    row.pop(dst, None)
                if not row:
                    m.pop(r, None)
        for i in range(ncols):
            V[i][dst] += t * V[i][src]
        vs = Vinv[src]
        vd = Vinv[dst]
        for j in range(ncols):
            vs[j] -= t * vd[j]

    def row_swap(a, b):
        if a == b:
            return
        ra, rb = m.get(a), m.get(b)
        if rb is None:
            m.pop(a, None)
        else:
            m[a] = rb
        if ra is None:
            m.pop(b, None)
        else:
            m[b] = ra
        U[a], U[b] = U[b], U[a]

    def col_swap(a, b):
        if a == b:
            return
        for row in m.values():
            va, vb = row.get(a), row.get(b)
            if vb is None:
                row.pop(a, None)
            else:
                row[a] = vb
            if va is None:
                row.pop(b, None)
            else:
                row[b] = va
        for i in range(ncols):
            V[i][a], V[i][b] = V[i][b], V[i][a]
        Vinv[a], Vinv[b] = Vinv[b], Vinv[a]

    def row_negate(r):
        row = m.get(r)
        if row:
            for c in list(row):
                row[c] = -row[c]
        U[r] = [-x for x in U[r]]

    def pick_pivot(k):
        best = None
        for r, row in m.items():
            if r < k:
                continue
            for c, v in row.items():
                if c < k:
                    continue
                key = (abs(v), r, c)
                if best is None or key < best[0]:
                    best = (key, r, c)
        if best is None:
            return None
        return best[1], best[2]

    k = 0
    limit = min(nrows, ncols)
    while k < limit:
        pos = pick_pivot(k)
        if pos is None:
            break
        row_swap(k, pos[0])
        col_swap(k, pos[1])
        pivot = m[k][k]
        # clear column k then row k; restart if a remainder survives
        dirty = True
        while dirty:
            dirty = False
            pivot = m[k][k]
            for r in [r for r in m if r > k and k in m[r]]:
                q = m[r][k] // pivot
                row_add(r, k, -q)
                if m.get(r, {}).get(k):
                    # remainder smaller than pivot: promote it
                    row_swap(k, r)
                    dirty = True
                    break
            if dirty:
                continue
            krow = m.get(k, {})
            for c in [c for c in krow if c > k]:
                q = krow[c] // pivot
                col_add(c, k, -q)
                if m.get(k, {}).get(c):
                    col_swap(k, c)
                    dirty = True
                    break
        k += 1

    # force the divisibility chain d_i | d_{i+1}
    def diag_entries():
        return [m.get(i, {}).get(i, 0) for i in range(limit)]

    changed = True
    while changed:
        changed = False
        d = diag_entries()
        for i in range(limit - 1):
            a, b = d[i], d[i + 1]
            if a and b and b % a != 0:
                # fold entry i+1 into column i and re-reduce the 2x2 block
                col_add(i, i + 1, 1)
                pivot_block(m, U, V, Vinv, i, row_add, col_add, row_swap, col_swap)
                changed = True
                break

    for i in range(limit):
        if m.get(i, {}).get(i, 0) < 0:
            row_negate(i)

    diag = diag_entries()
    rank = sum(1 for d in diag if d)
    return SNFResult(nrows, ncols, diag, U, V, Vinv, rank)


def pivot_block(m, U, V, Vinv, k, row_add, col_add, row_swap, col_swap):
    """Re-diagonalize the trailing block after a divisibility fix at k."""
    # local euclidean loop on rows/cols k, k+1
    while True:
        a = m.get(k, {}).get(k, 0)
        b = m.get(k + 1, {}).get(k, 0)
        if b == 0:
            break
        if a == 0 or (b and abs(b) < abs(a)):
            row_swap(k, k + 1)
            continue
        row_add(k + 1, k, -(b // a))
    while True:
        a = m.get(k, {}).get(k, 0)
        b = m.get(k, {}).get(k + 1, 0)
        if not b:
            break
        if a == 0 or abs(b) < abs(a):
            col_swap(k, k + 1)
            continue
        col_add(k + 1, k, -(b // a))
    # the row op may have reintroduced a column entry; settle it
    if m.get(k + 1, {}).get(k, 0):
        pivot_block(m, U, V, Vinv, k, row_add, col_add, row_swap, col_swap)


def smith_normal_form(matrix):
    """Return (U, S, V) with S = U * M * V in Smith normal form.

    `matrix` is a dense list of int rows (may be empty or ragged-free).
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    entries = {}
    for i, row in enumerate(matrix):
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        for j, v in enumerate(row):
            if v:
                entries[(i, j)] = int(v)
    res = _snf_core(entries, nrows, ncols)
    S = [[0] * ncols for _ in range(nrows)]
    for i, d in enumerate(res.diag):
        S[i][i] = d
    return res.U, S, res.V


def invariant_factors(matrix):
    U, S, V = smith_normal_form(matrix)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


# ---------------------------------------------------------------------------
# chain complexes of surface components


@dataclass
class ChainComplexData:
    """Boundary matrices and an H_1 coordinate map per surface component."""

    components: dict  # label -> _ComponentData


class _ComponentData:
    def __init__(self, label, vertices, edges, faces, d1_entries, d2_entries):
        self.label = label
        self.vertices = vertices
        self.edges = edges
        self.faces = faces
        self.vindex = {v: i for i, v in enumerate(vertices)}
        self.eindex = {e: i for i, e in enumerate(edges)}
        self.findex = {f: i for i, f in enumerate(faces)}
        self.d1 = d1_entries  # {(vrow, ecol): int}
        self.d2 = d2_entries  # {(erow, fcol): int}
        self._prepare()

    def _prepare(self):
        nv, ne, nf = len(self.vertices), len(self.edges), len(self.faces)
        snf1 = _snf_core(self.d1, nv, ne)
        self.snf1 = snf1
        rank1 = snf1.rank
        kernel_cols = list(range(rank1, ne))
        # rows of Vinv giving kernel coordinates of an edge vector
        self._kernel_rows = [snf1.Vinv[j] for j in kernel_cols]
        kdim = len(kernel_cols)
        # image of d2 expressed in kernel coordinates
        b_entries = {}
        cols = {}
        for (er, fc), v in self.d2.items():
            cols.setdefault(fc, {})[er] = v
        for fc, col in cols.items():
            for ki, krow in enumerate(self._kernel_rows):
                s = 0
                for er, v in col.items():
                    kv = krow[er]
                    if kv:
                        s += kv * v
                if s:
                    b_entries[(ki, fc)] = s
        snf2 = _snf_core(b_entries, kdim, nf)
        self.snf2 = snf2
        factors = [d for d in snf2.diag if d]
        if any(abs(d) != 1 for d in factors):
            raise AssertionError(
                "torsion in H_1 of component %r: factors %r" % (self.label, factors)
            )
        self.rank_h1 = kdim - snf2.rank
        self._quot_rows = [snf2.U[i] for i in range(snf2.rank, kdim)]

    def boundary_of_chain(self, edge_vector):
        out = {}
        col_of = {}
        for (vr, ec), v in self.d1.items():
            col_of.setdefault(ec, []).append((vr, v))
        for eid, coeff in edge_vector.items():
            ec = self.eindex[eid]
            for vr, v in col_of.get(ec, []):
                out[vr] = out.get(vr, 0) + v * coeff
        return {self.vertices[vr]: v for vr, v in out.items() if v}

    def cycle_coords(self, edge_vector):
        """H_1 coordinates of a cycle given as {edge_id: coeff}."""
        dense = [0] * len(self.edges)
        for eid, coeff in edge_vector.items():
            dense[self.eindex[eid]] = coeff
        kcoords = []
        for krow in self._kernel_rows:
            kcoords.append(sum(krow[j] * dense[j] for j in range(len(dense)) if dense[j]))
        out = []
        for qrow in self._quot_rows:
            out.append(sum(qrow[j] * kcoords[j] for j in range(len(kcoords)) if kcoords[j]))
        return tuple(out)


@dataclass(frozen=True)
class HomologyClass:
    """Per-component coordinates of a 1-cycle plus their divisibilities."""

    coords: tuple        # tuple of (label, coordinate tuple)
    divisibility: tuple  # tuple of (label, gcd of coordinates; 0 if zero)

    def divisibility_of(self, label):
        for lab, d in self.divisibility:
            if lab == label:
                return d
        raise KeyError(label)

    def is_zero(self):
        return all(d == 0 for _, d in self.divisibility)


def build_chain_complex(surface):
    """Boundary matrices (with d1*d2 = 0) and H_1 bases via integer SNF."""
    comps = {}
    by_label = {}
    for v in surface.vertices.values():
        by_label.setdefault(v.component, ([], [], []))[0].append(v.id)
    for e in surface.edges.values():
        by_label.setdefault(e.component, ([], [], []))[1].append(e.id)
    for f in surface.faces.values():
        by_label.setdefault(f.component, ([], [], []))[2].append(f.id)
    for label, (vs, es, fs) in sorted(by_label.items()):
        vs.sort()
        es.sort()
        fs.sort()
        vindex = {v: i for i, v in enumerate(vs)}
        eindex = {e: i for i, e in enumerate(es)}
        d1 = {}
        for eid in es:
            e = surface.edges[eid]
            c = eindex[eid]
            d1[(vindex[e.head], c)] = d1.get((vindex[e.head], c), 0) + 1
            d1[(vindex[e.tail], c)] = d1.get((vindex[e.tail], c), 0) - 1
        d1 = {k: v for k, v in d1.items() if v}
        d2 = {}
        for fi, fid in enumerate(fs):
            f = surface.faces[fid]
            for eid, sgn in f.word:
                r = eindex[eid]
                d2[(r, fi)] = d2.get((r, fi), 0) + sgn
        d2 = {k: v for k, v in d2.items() if v}
        _check_d1d2_zero(d1, d2, len(vs))
        comps[label] = _ComponentData(label, vs, es, fs, d1, d2)
    return ChainComplexData(components=comps)


def _check_d1d2_zero(d1, d2, nv):
    cols1 = {}
    for (vr, ec), v in d1.items():
        cols1.setdefault(ec, {})[vr] = v
    cols2 = {}
    for (er, fc), v in d2.items():
        cols2.setdefault(fc, {})[er] = v
    for fc, col in cols2.items():
        acc = {}
        for er, v in col.items():
            for vr, w in cols1.get(er, {}).items():
                acc[vr] = acc.get(vr, 0) + v * w
        if any(acc.values()):
            raise AssertionError("d1*d2 != 0 on face column %d" % fc)


def class_of_cycle(cc, edge_vector):
    """Homology class of an integer 1-chain given as {edge_id: coeff}.

    Raises NotACycleError when the chain has boundary.
    """
    per_comp = {label: {} for label in cc.components}
    owner = {}
    for label, comp in cc.components.items():
        for e in comp.edges:
            owner[e] = label
    for eid, coeff in edge_vector.items():
        if coeff:
            per_comp[owner[eid]][eid] = coeff
    coords = []
    divs = []
    for label in sorted(cc.components):
        comp = cc.components[label]
        vec = per_comp[label]
        bdry = comp.boundary_of_chain(vec)
        if bdry:
            raise NotACycleError(sorted(bdry))
        cvec = comp.cycle_coords(vec)
        coords.append((label, cvec))
        divs.append((label, gcd_list(cvec)))
    return HomologyClass(coords=tuple(coords), divisibility=tuple(divs))
