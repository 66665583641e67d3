"""Movie presentations of closed surfaces: parsing, validation, replay.

A movie is a line-oriented script of elementary transitions between link
diagram stills.  Stills are purely combinatorial: directed circles split into
arcs at crossings, each crossing recording its over/under strands and an
explicit sign.  Planar embeddability is deliberately not checked; signs and
the r2+ configuration token are trusted input.

Script grammar ('#' starts a comment, one event per line):

    movie <name>
    birth <circle> component=<label> orient=<+|->
    death <circle>
    saddle <arc> <arc>
    r1+ <arc> sign=<+|-> -> <crossing>
    r1- <crossing>
    r2+ over=<arc> under=<arc> config=<l|r> -> <crossing> <crossing>
    r2- <crossing> <crossing>
    r3 <crossing> <crossing> <crossing>
    end

Conventions baked into the event semantics (combinatorial choices scripts
depend on):

* r2+ lists its crossings in over-strand order.  config=r pushes so the
  under strand also meets the first crossing first (signs +1, -1 in listed
  order); config=l is the reversed under passage (signs -1, +1).
* r2- <x> <y> cancels the bigon whose over arc runs from x to y.  If both
  parallel and antiparallel under arcs exist, the parallel one is taken.
* r1+ kinks pass over first: the loop arc runs from the over-out slot to
  the under-in slot of the new crossing.
* New arcs created by splitting at a crossing are named <crossing>.o1 /
  <crossing>.u1 after the slot they exit; the piece containing the old
  arc's tail keeps the old name.  Removal events merge arcs back with the
  lexicographically smallest name surviving.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_IDENT = re.compile(r"^[A-Za-z0-9_.]+$")


class MovieError(Exception):
    """Base class for all movie script problems."""


class MovieSyntaxError(MovieError):
    def __init__(self, line, col, message):
        self.line = line
        self.col = col
        super().__init__("line %d, col %d: %s" % (line, col, message))


class MovieValidationError(MovieError):
    """An event that cannot fire in the still where it occurs."""

    def __init__(self, event_index, line, message):
        self.event_index = event_index
        self.line = line
        super().__init__("event %d (line %d): %s" % (event_index, line, message))


class PGateError(MovieError):
    """Movie is valid but contains a transition that would force a triple point."""


# ---------------------------------------------------------------------------
# events


@dataclass(frozen=True)
class Birth:
    circle: str
    component: str
    orient: int
    line: int = 0
    kind = "birth"


@dataclass(frozen=True)
class Death:
    circle: str
    line: int = 0
    kind = "death"


@dataclass(frozen=True)
class Saddle:
    arc_a: str
    arc_b: str
    line: int = 0
    kind = "saddle"


@dataclass(frozen=True)
class R1Plus:
    arc: str
    sign: int
    crossing: str
    line: int = 0
    kind = "r1+"


@dataclass(frozen=True)
class R1Minus:
    crossing: str
    line: int = 0
    kind = "r1-"


@dataclass(frozen=True)
class R2Plus:
    over: str
    under: str
    config: str
    x: str
    y: str
    line: int = 0
    kind = "r2+"


@dataclass(frozen=True)
class R2Minus:
    x: str
    y: str
    line: int = 0
    kind = "r2-"


@dataclass(frozen=True)
class R3:
    x: str
    y: str
    z: str
    line: int = 0
    kind = "r3"


@dataclass(frozen=True)
class Movie:
    name: str
    events: tuple
    components: tuple  # (label, orient) in first-birth order

    def component_labels(self):
        return tuple(label for label, _ in self.components)


# ---------------------------------------------------------------------------
# stills


@dataclass(frozen=True)
class StillCircle:
    id: str
    component: str
    orient: int
    arcs: tuple


@dataclass(frozen=True)
class StillCrossing:
    id: str
    sign: int
    over_in: str
    over_out: str
    under_in: str
    under_out: str


@dataclass(frozen=True)
class Still:
    circles: tuple
    crossings: tuple

    @property
    def crossing_count(self):
        return len(self.crossings)

    @property
    def is_empty(self):
        return not self.circles


# ---------------------------------------------------------------------------
# engine internals


@dataclass
class _Arc:
    name: str
    component: str
    tail: object  # None (free loop) or (crossing_id, 'o'|'u')
    head: object


@dataclass
class _Xing:
    name: str
    sign: int
    over_in: str
    over_out: str
    under_in: str
    under_out: str


class Observer:
    """Hooks fired by the replay engine, in event order.

    The surface builder subclasses this; plain replay uses the defaults.
    Structural hooks fire in lock-step with the engine's own mutations, so an
    observer mirroring arc state stays consistent at every call.
    """

    def on_extrude(self, engine):
        pass

    def on_birth(self, engine, circle, component, orient):
        pass

    def on_death(self, engine, arc):
        pass

    def on_saddle_merge(self, engine, arc_a, arc_b, survivor):
        pass

    def on_saddle_split(self, engine, arc, piece1, piece2):
        pass

    def on_split2(self, engine, arc, bigon, out, was_loop, cid_first, cid_second, lane):
        pass

    def on_split3(self, engine, arc, kink, out, was_loop, z):
        pass

    def on_crossings_created(self, engine, cids):
        pass

    def on_mark_bridge(self, engine, over_arc, under_arc, x, y):
        pass

    def on_mark_branch_collapse(self, engine, z, loop_arc, over_end_first):
        pass

    def on_merge(self, engine, chain, survivor, closed):
        pass

    def on_r3(self, engine, x, y, z):
        pass

    def on_finish(self, engine):
        pass


class ReplayEngine:
    """Applies movie events to a combinatorial still, firing observer hooks."""

    def __init__(self, observer=None):
        self.observer = observer or Observer()
        self.arcs = {}
        self.xings = {}
        self.label_orient = {}
        self.label_order = []
        self._index = -1
        self._line = 0

    # -- errors ------------------------------------------------------------

    def _err(self, message):
        raise MovieValidationError(self._index, self._line, message)

    def _need_arc(self, name):
        arc = self.arcs.get(name)
        if arc is None:
            self._err("dangling reference: no arc %r in the current still" % name)
        return arc

    def _need_xing(self, name):
        x = self.xings.get(name)
        if x is None:
            self._err("dangling reference: no crossing %r in the current still" % name)
        return x

    def _fresh_arc(self, name):
        if name in self.arcs:
            self._err("arc id %r already in use" % name)

    def _fresh_xing(self, name):
        if name in self.xings:
            self._err("crossing id %r already in use" % name)

    # -- circle walking ------------------------------------------------------

    def next_arc(self, name):
        arc = self.arcs[name]
        if arc.head is None:
            return name
        cid, lane = arc.head
        x = self.xings[cid]
        return x.over_out if lane == "o" else x.under_out

    def circle_arcs(self, start):
        out = [start]
        cur = self.next_arc(start)
        while cur != start:
            out.append(cur)
            cur = self.next_arc(cur)
        return out

    def circles(self):
        seen = set()
        out = []
        for name in sorted(self.arcs):
            if name in seen:
                continue
            cyc = self.circle_arcs(name)
            seen.update(cyc)
            out.append(cyc)
        return out

    def snapshot(self):
        circles = []
        for cyc in self.circles():
            comp = self.arcs[cyc[0]].component
            k = cyc.index(min(cyc))
            circles.append(
                StillCircle(
                    id=min(cyc),
                    component=comp,
                    orient=self.label_orient.get(comp, 1),
                    arcs=tuple(cyc[k:] + cyc[:k]),
                )
            )
        circles.sort(key=lambda c: c.id)
        xs = [
            StillCrossing(x.name, x.sign, x.over_in, x.over_out, x.under_in, x.under_out)
            for x in self.xings.values()
        ]
        xs.sort(key=lambda x: x.id)
        return Still(circles=tuple(circles), crossings=tuple(xs))

    # -- slot retargeting ----------------------------------------------------

    def _retarget_head(self, head, old, new):
        if head is None:
            return
        cid, lane = head
        x = self.xings.get(cid)
        if x is None:
            return
        if lane == "o":
            assert x.over_in == old
            x.over_in = new
        else:
            assert x.under_in == old
            x.under_in = new

    def _retarget_tail(self, tail, old, new):
        if tail is None:
            return
        cid, lane = tail
        x = self.xings.get(cid)
        if x is None:
            return
        if lane == "o":
            assert x.over_out == old
            x.over_out = new
        else:
            assert x.under_out == old
            x.under_out = new

    # -- run -----------------------------------------------------------------

    def run(self, movie, snapshots=None):
        for i, ev in enumerate(movie.events):
            self._index = i
            self._line = ev.line
            if self.arcs or self.xings:
                self.observer.on_extrude(self)
            handler = getattr(
                self, "_ev_" + ev.kind.replace("+", "plus").replace("-", "minus")
            )
            handler(ev)
            if snapshots is not None:
                snapshots.append(self.snapshot())
        self._index = len(movie.events)
        if self.arcs or self.xings:
            raise MovieValidationError(
                self._index, self._line, "final still is not empty (surface is not closed)"
            )
        self.observer.on_finish(self)

    # -- events ----------------------------------------------------------

    def _ev_birth(self, ev):
        self._fresh_arc(ev.circle)
        prev = self.label_orient.get(ev.component)
        if prev is None:
            self.label_orient[ev.component] = ev.orient
            self.label_order.append(ev.component)
        elif prev != ev.orient:
            self._err(
                "component %r was born with orientation %+d but this birth says %+d"
                % (ev.component, prev, ev.orient)
            )
        self.arcs[ev.circle] = _Arc(ev.circle, ev.component, None, None)
        self.observer.on_birth(self, ev.circle, ev.component, ev.orient)

    def _ev_death(self, ev):
        arc = self._need_arc(ev.circle)
        if arc.tail is not None or arc.head is not None:
            self._err("death of %r: Morse events need a crossing-free circle" % ev.circle)
        self.observer.on_death(self, ev.circle)
        del self.arcs[ev.circle]

    def _ev_saddle(self, ev):
        a = self._need_arc(ev.arc_a)
        b = self._need_arc(ev.arc_b)
        for arc in (a, b):
            if arc.tail is not None or arc.head is not None:
                self._err("saddle operand %r lies on an arc adjacent to a crossing" % arc.name)
        if a.component != b.component:
            self._err(
                "saddle between different components %r and %r" % (a.component, b.component)
            )
        if ev.arc_a == ev.arc_b:
            n1, n2 = ev.arc_a + ".1", ev.arc_a + ".2"
            self._fresh_arc(n1)
            self._fresh_arc(n2)
            self.observer.on_saddle_split(self, ev.arc_a, n1, n2)
            comp = a.component
            del self.arcs[ev.arc_a]
            self.arcs[n1] = _Arc(n1, comp, None, None)
            self.arcs[n2] = _Arc(n2, comp, None, None)
        else:
            survivor = min(ev.arc_a, ev.arc_b)
            self.observer.on_saddle_merge(self, ev.arc_a, ev.arc_b, survivor)
            comp = a.component
            del self.arcs[ev.arc_a]
            del self.arcs[ev.arc_b]
            self.arcs[survivor] = _Arc(survivor, comp, None, None)

    def _split_two(self, name, cid_first, cid_second, lane):
        """Cut an arc at two new crossing passages, first passage first."""
        a = self.arcs[name]
        was_loop = a.tail is None
        bigon = "%s.%s1" % (cid_first, lane)
        self._fresh_arc(bigon)
        out = None
        if was_loop:
            self.arcs[name] = _Arc(name, a.component, (cid_second, lane), (cid_first, lane))
        else:
            out = "%s.%s1" % (cid_second, lane)
            self._fresh_arc(out)
            self._retarget_head(a.head, name, out)
            self.arcs[out] = _Arc(out, a.component, (cid_second, lane), a.head)
            self.arcs[name] = _Arc(name, a.component, a.tail, (cid_first, lane))
        self.arcs[bigon] = _Arc(bigon, a.component, (cid_first, lane), (cid_second, lane))
        self.observer.on_split2(self, name, bigon, out, was_loop, cid_first, cid_second, lane)
        return bigon, out

    def _ev_r2plus(self, ev):
        self._need_arc(ev.over)
        self._need_arc(ev.under)
        if ev.x == ev.y:
            self._err("r2+ needs two distinct crossing ids")
        self._fresh_xing(ev.x)
        self._fresh_xing(ev.y)
        self._split_two(ev.over, ev.x, ev.y, "o")
        # under operand resolves after the over split; for over=under this
        # targets the remainder piece, giving the o o u u self-push pattern
        under_name = ev.under
        if ev.config == "r":
            u_first, u_second = ev.x, ev.y
            sign_x, sign_y = 1, -1
        else:
            u_first, u_second = ev.y, ev.x
            sign_x, sign_y = -1, 1
        self._need_arc(under_name)
        self._split_two(under_name, u_first, u_second, "u")
        # slot arcs are re-derived from endpoints: in the self-push case the
        # under split subdivides the over remainder a second time
        self.xings[ev.x] = self._xing_from_slots(ev.x, sign_x)
        self.xings[ev.y] = self._xing_from_slots(ev.y, sign_y)
        self.observer.on_crossings_created(self, (ev.x, ev.y))

    def _xing_from_slots(self, cid, sign):
        slots = {}
        for arc in self.arcs.values():
            if arc.head is not None and arc.head[0] == cid:
                slots["%s_in" % ("over" if arc.head[1] == "o" else "under")] = arc.name
            if arc.tail is not None and arc.tail[0] == cid:
                slots["%s_out" % ("over" if arc.tail[1] == "o" else "under")] = arc.name
        assert len(slots) == 4, (cid, slots)
        return _Xing(cid, sign, slots["over_in"], slots["over_out"],
                     slots["under_in"], slots["under_out"])

    def _ev_r2minus(self, ev):
        X = self._need_xing(ev.x)
        Y = self._need_xing(ev.y)
        if ev.x == ev.y:
            self._err("r2- needs two distinct crossings")
        p = X.over_out
        if self.arcs[p].head != (ev.y, "o"):
            self._err(
                "r2- %s %s: no over arc from %s to %s (listed order fixes the bigon)"
                % (ev.x, ev.y, ev.x, ev.y)
            )
        q = X.under_out
        if self.arcs[q].head != (ev.y, "u"):
            q = Y.under_out
            if self.arcs[q].head != (ev.x, "u"):
                self._err("r2- %s %s: no under arc joining the crossings" % (ev.x, ev.y))
        if X.sign + Y.sign != 0:
            self._err("r2- %s %s: crossing signs must be opposite" % (ev.x, ev.y))
        if p == q:
            self._err("r2- %s %s: degenerate bigon" % (ev.x, ev.y))
        self.observer.on_mark_bridge(self, p, q, ev.x, ev.y)
        self._remove_and_merge({ev.x, ev.y})

    def _ev_r1plus(self, ev):
        a = self._need_arc(ev.arc)
        self._fresh_xing(ev.crossing)
        z = ev.crossing
        was_loop = a.tail is None
        kink = "%s.o1" % z
        self._fresh_arc(kink)
        out = None
        if was_loop:
            self.arcs[ev.arc] = _Arc(ev.arc, a.component, (z, "u"), (z, "o"))
        else:
            out = "%s.u1" % z
            self._fresh_arc(out)
            self._retarget_head(a.head, ev.arc, out)
            self.arcs[out] = _Arc(out, a.component, (z, "u"), a.head)
            self.arcs[ev.arc] = _Arc(ev.arc, a.component, a.tail, (z, "o"))
        self.arcs[kink] = _Arc(kink, a.component, (z, "o"), (z, "u"))
        under_out = ev.arc if was_loop else out
        self.xings[z] = _Xing(z, ev.sign, ev.arc, kink, kink, under_out)
        self.observer.on_split3(self, ev.arc, kink, out, was_loop, z)
        self.observer.on_crossings_created(self, (z,))

    def _ev_r1minus(self, ev):
        Z = self._need_xing(ev.crossing)
        z = ev.crossing
        loop = Z.over_out
        over_end_first = True
        if not (loop == Z.under_in and self.arcs[loop].head == (z, "u")):
            loop = Z.under_out
            over_end_first = False
            if not (loop == Z.over_in and self.arcs[loop].head == (z, "o")):
                self._err("r1- %s: crossing has no kink loop" % z)
        self.observer.on_mark_branch_collapse(self, z, loop, over_end_first)
        self._remove_and_merge({z})

    def _ev_r3(self, ev):
        for cid in (ev.x, ev.y, ev.z):
            self._need_xing(cid)
        if len({ev.x, ev.y, ev.z}) != 3:
            self._err("r3 needs three distinct crossings")
        if not self._r3_triangle_ok(ev.x, ev.y, ev.z):
            self._err(
                "r3 %s %s %s: crossings do not bound a triangle with consistent heights"
                % (ev.x, ev.y, ev.z)
            )
        # the abstract still (arcs, slots, signs) is unchanged by a third
        # Reidemeister slide; only embedding data we do not track moves
        self.observer.on_r3(self, ev.x, ev.y, ev.z)

    def _r3_triangle_ok(self, x, y, z):
        trio = {x, y, z}
        sides = [
            arc
            for arc in self.arcs.values()
            if arc.tail
            and arc.head
            and arc.tail[0] in trio
            and arc.head[0] in trio
            and arc.tail[0] != arc.head[0]
        ]

        def lanes(arc):
            return (arc.tail[1], arc.head[1])

        for a in sides:
            if lanes(a) != ("o", "o"):
                continue
            for c in sides:
                if c.name == a.name or lanes(c) != ("u", "u"):
                    continue
                for b in sides:
                    if b.name in (a.name, c.name):
                        continue
                    if lanes(b) not in (("o", "u"), ("u", "o")):
                        continue
                    touched = {
                        a.tail[0], a.head[0], b.tail[0], b.head[0], c.tail[0], c.head[0],
                    }
                    if touched == trio:
                        return True
        return False

    # -- removal & merging -------------------------------------------------

    def _remove_and_merge(self, removed):
        cont = {}
        for cid in removed:
            x = self.xings[cid]
            cont[x.over_in] = x.over_out
            cont[x.under_in] = x.under_out
        for cid in removed:
            del self.xings[cid]
        participating = set(cont) | set(cont.values())
        consumed = set(cont.values())
        starts = sorted(a for a in participating if a not in consumed)
        chains = []
        seen = set()
        for start in starts:
            chain = [start]
            seen.add(start)
            cur = start
            while cur in cont:
                cur = cont[cur]
                chain.append(cur)
                seen.add(cur)
            chains.append((chain, False))
        for name in sorted(participating - seen):
            if name in seen:
                continue
            chain = [name]
            seen.add(name)
            cur = cont[name]
            while cur != name:
                chain.append(cur)
                seen.add(cur)
                cur = cont[cur]
            k = chain.index(min(chain))
            chain = chain[k:] + chain[:k]
            chains.append((chain, True))
        for chain, closed in chains:
            survivor = min(chain)
            first = self.arcs[chain[0]]
            last = self.arcs[chain[-1]]
            comp = first.component
            assert all(self.arcs[a].component == comp for a in chain)
            self.observer.on_merge(self, chain, survivor, closed)
            tail = None if closed else first.tail
            head = None if closed else last.head
            for name in chain:
                del self.arcs[name]
            self.arcs[survivor] = _Arc(survivor, comp, tail, head)
            if not closed:
                self._retarget_tail(tail, chain[0], survivor)
                self._retarget_head(head, chain[-1], survivor)


# ---------------------------------------------------------------------------
# parsing


def _syntax(line_no, col, msg):
    raise MovieSyntaxError(line_no, col, msg)


def _ident(tok, line_no, line):
    if not _IDENT.match(tok):
        _syntax(line_no, line.find(tok) + 1, "bad identifier %r" % tok)
    return tok


def _kv(tok, key, line_no, line):
    if not tok.startswith(key + "="):
        _syntax(line_no, line.find(tok) + 1, "expected %s=..., got %r" % (key, tok))
    return tok[len(key) + 1:]


def _sign_token(val, line_no, line):
    if val == "+":
        return 1
    if val == "-":
        return -1
    _syntax(line_no, line.find(val) + 1 if val else 1, "expected + or -, got %r" % val)


def parse_movie(text):
    """Parse and fully validate a movie script.

    The returned Movie has been replayed once: every event fires legally and
    the final still is empty.
    """
    name = None
    events = []
    ended = False
    n_lines = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        n_lines = line_no
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ended:
            _syntax(line_no, 1, "content after 'end'")
        toks = line.split()
        head = toks[0]
        if name is None:
            if head != "movie":
                _syntax(line_no, 1, "script must start with 'movie <name>'")
            if len(toks) != 2:
                _syntax(line_no, 1, "movie header takes exactly one name")
            name = _ident(toks[1], line_no, line)
            continue
        if head == "end":
            if len(toks) != 1:
                _syntax(line_no, line.find(toks[1]) + 1, "junk after 'end'")
            ended = True
            continue
        events.append(_parse_event(head, toks, line_no, line))
    if name is None:
        _syntax(max(n_lines, 1), 1, "empty script")
    if not ended:
        _syntax(max(n_lines, 1), 1, "missing 'end'")
    movie = Movie(name=name, events=tuple(events), components=())
    engine = ReplayEngine()
    engine.run(movie)
    comps = tuple((label, engine.label_orient[label]) for label in engine.label_order)
    return Movie(name=name, events=tuple(events), components=comps)


def _parse_event(head, toks, line_no, line):
    def arity(n):
        if len(toks) != n:
            _syntax(line_no, 1, "%s takes %d tokens, got %d" % (head, n - 1, len(toks) - 1))

    if head == "birth":
        arity(4)
        return Birth(
            circle=_ident(toks[1], line_no, line),
            component=_ident(_kv(toks[2], "component", line_no, line), line_no, line),
            orient=_sign_token(_kv(toks[3], "orient", line_no, line), line_no, line),
            line=line_no,
        )
    if head == "death":
        arity(2)
        return Death(circle=_ident(toks[1], line_no, line), line=line_no)
    if head == "saddle":
        arity(3)
        return Saddle(
            arc_a=_ident(toks[1], line_no, line),
            arc_b=_ident(toks[2], line_no, line),
            line=line_no,
        )
    if head == "r1+":
        arity(5)
        if toks[3] != "->":
            _syntax(line_no, line.find(toks[3]) + 1, "expected '->'")
        return R1Plus(
            arc=_ident(toks[1], line_no, line),
            sign=_sign_token(_kv(toks[2], "sign", line_no, line), line_no, line),
            crossing=_ident(toks[4], line_no, line),
            line=line_no,
        )
    if head == "r1-":
        arity(2)
        return R1Minus(crossing=_ident(toks[1], line_no, line), line=line_no)
    if head == "r2+":
        arity(7)
        config = _kv(toks[3], "config", line_no, line)
        if config not in ("l", "r"):
            _syntax(line_no, line.find(toks[3]) + 1, "config must be l or r")
        if toks[4] != "->":
            _syntax(line_no, line.find(toks[4]) + 1, "expected '->'")
        return R2Plus(
            over=_ident(_kv(toks[1], "over", line_no, line), line_no, line),
            under=_ident(_kv(toks[2], "under", line_no, line), line_no, line),
            config=config,
            x=_ident(toks[5], line_no, line),
            y=_ident(toks[6], line_no, line),
            line=line_no,
        )
    if head == "r2-":
        arity(3)
        return R2Minus(
            x=_ident(toks[1], line_no, line),
            y=_ident(toks[2], line_no, line),
            line=line_no,
        )
    if head == "r3":
        arity(4)
        return R3(
            x=_ident(toks[1], line_no, line),
            y=_ident(toks[2], line_no, line),
            z=_ident(toks[3], line_no, line),
            line=line_no,
        )
    _syntax(line_no, 1, "unknown event %r" % head)


# ---------------------------------------------------------------------------
# public operations


def is_p_movie(movie):
    """True when no transition would force a triple point in the projection."""
    return all(ev.kind != "r3" for ev in movie.events)


def replay(movie):
    """Stills before any event and after each one.  Deterministic ids."""
    snapshots = []
    engine = ReplayEngine()
    snapshots.append(engine.snapshot())
    engine.run(movie, snapshots=snapshots)
    return snapshots
