"""Group presentations, normal-form oracles and Cayley balls.

Supported families and their oracles:

* ``free``            -- free reduction; optional defined letters (extra
                         generators given by a word in the base letters,
                         e.g. an appended peripheral generator).
* ``free-abelian``    -- exponent-vector normal form.
* ``surface-amalgam`` -- Dehn's algorithm over the symmetrized relator set
                         (validated C'(1/6)), with half-relator swaps
                         enumerating the equal-length spellings of an
                         element so a shortlex-least representative exists.
* ``user-graph``      -- an explicit finite graph; vertex names are their
                         own normal forms.

Elements of table-backed models (any model with relators or defined
letters) are discovered by shortlex breadth-first enumeration: the first
spelling that reaches an element is its canonical word, and every reduced
base-alphabet spelling seen for it is registered as an alias so later
lookups are O(1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import MalformedWord, ResourceLimit, UnsupportedFamily
from .words import Alphabet, cyclic_rotations, free_reduce, inverse, is_power_of

DEFAULT_BUDGET = 5_000_000

FAMILIES = ("free", "free-abelian", "surface-amalgam", "user-graph")

WHOLE_GROUP = "*"


@dataclass(frozen=True)
class PeripheralSpec:
    """A cyclic (or whole-group) peripheral subgroup.

    ``letter`` is the internal letter of the generator inside the model's
    alphabet, or ``"*"`` for the whole group.  ``definition`` is the base
    word the generator was appended for (empty when it was already a
    generator of the presentation).
    """

    id: str
    letter: str
    definition: str = ""

    @property
    def whole_group(self) -> bool:
        return self.letter == WHOLE_GROUP


class _DehnEngine:
    """Dehn reduction + half-relator swaps for one symmetrized relator set."""

    def __init__(self, relators: list[str]):
        rels = []
        for r in relators:
            r = free_reduce(r)
            if not r:
                raise MalformedWord("trivial relator")
            rels.append(r)
        sym = set()
        for r in rels:
            for w in (r, inverse(r)):
                sym.update(cyclic_rotations(w))
        self.symmetrized = sorted(sym)
        self._check_small_cancellation()
        # over-half prefixes -> inverse of the complement (a shorter word)
        self.over_half: dict[str, str] = {}
        # exact-half prefixes -> inverse of the complement (equal length)
        self.half_swap: dict[str, str] = {}
        self.window_sizes = set()
        for rho in self.symmetrized:
            L = len(rho)
            h0 = L // 2 + 1
            for h in range(h0, L + 1):
                self.over_half.setdefault(rho[:h], inverse(rho[h:]))
                self.window_sizes.add(h)
            if L % 2 == 0:
                h = L // 2
                self.half_swap.setdefault(rho[:h], inverse(rho[h:]))
        self.swap_len = sorted({len(k) for k in self.half_swap})
        self.max_window = max(self.window_sizes)
        self.min_window = min(self.window_sizes)

    def _check_small_cancellation(self):
        max_piece: dict[str, int] = {}
        for r1, r2 in itertools.combinations(self.symmetrized, 2):
            cp = 0
            for a, b in zip(r1, r2):
                if a != b:
                    break
                cp += 1
            for r in (r1, r2):
                max_piece[r] = max(max_piece.get(r, 0), cp)
        for r, piece in max_piece.items():
            if 6 * piece >= len(r):
                raise UnsupportedFamily(
                    f"relator set is not C'(1/6): piece of length {piece} "
                    f"in relator of length {len(r)}"
                )

    def dehn_reduce(self, word: str) -> str:
        """Shrink until no window longer than half a relator remains."""
        w = free_reduce(word)
        changed = True
        while changed:
            changed = False
            n = len(w)
            for i in range(n):
                top = min(self.max_window, n - i)
                for h in range(top, self.min_window - 1, -1):
                    repl = self.over_half.get(w[i : i + h])
                    if repl is not None:
                        w = free_reduce(w[:i] + repl + w[i + h :])
                        changed = True
                        break
                if changed:
                    break
        return w

    def swap_closure(self, word: str, cap: int = 20000) -> tuple[set[str], str | None]:
        """All equal-length spellings reachable by exact-half swaps.

        Returns ``(closure, shorter)``; ``shorter`` is a strictly shorter
        equivalent word if a swap exposed one (the caller restarts from it).
        """
        seen = {word}
        stack = [word]
        while stack:
            w = stack.pop()
            n = len(w)
            for h in self.swap_len:
                for i in range(n - h + 1):
                    repl = self.half_swap.get(w[i : i + h])
                    if repl is None:
                        continue
                    y = free_reduce(w[:i] + repl + w[i + h :])
                    if len(y) < n:
                        return seen, self.dehn_reduce(y)
                    if y not in seen:
                        if len(seen) >= cap:
                            raise ResourceLimit("half-relator swap closure exceeded cap")
                        seen.add(y)
                        stack.append(y)
        return seen, None


class GroupModel:
    """A presentation with peripheral structure and a normal-form oracle."""

    def __init__(
        self,
        family: str,
        generators: list[str],
        relators: list[str] | None = None,
        defined: dict[str, str] | None = None,
        peripherals: list[PeripheralSpec] | None = None,
        splitting=None,
        graph=None,
        budget: int = DEFAULT_BUDGET,
    ):
        if family not in FAMILIES:
            raise UnsupportedFamily(f"unknown family {family!r}")
        self.family = family
        self.budget = budget
        self.splitting = splitting
        self.peripherals = list(peripherals or [])
        if family == "user-graph":
            if not graph:
                raise MalformedWord("user-graph family needs an explicit graph")
            self.graph = graph  # (vertex name list, edge name-pair list)
            self.alphabet = None
            self.relators = []
            self.defined = {}
            self._table = None
            return
        self.alphabet = Alphabet(generators)
        self.relators = [self._parse(r) for r in (relators or [])]
        self.defined = {}
        for name, word in (defined or {}).items():
            if name not in self.alphabet.letter:
                raise MalformedWord(f"defined generator {name!r} not in alphabet")
            self.defined[self.alphabet.letter[name]] = self._parse(word)
        self._base_letters = "".join(
            c for c in self.alphabet.letters if c not in self.defined
        )
        if family == "free-abelian" and self.defined:
            raise UnsupportedFamily("defined letters unsupported for free-abelian")
        self._dehn = None
        if family == "surface-amalgam":
            if not self.relators:
                raise MalformedWord("surface-amalgam family needs a relator")
            self._dehn = _DehnEngine([self.expand(r) for r in self.relators])
        elif family == "free":
            for r in self.relators:
                if free_reduce(self.expand(r)):
                    raise MalformedWord(f"nontrivial relator {r!r} in a free model")
        self._table = _ElementTable(self) if self._needs_table() else None

    # -- words ---------------------------------------------------------

    def _parse(self, text_or_word: str) -> str:
        if " " in text_or_word or "^" in text_or_word or not text_or_word:
            return self.alphabet.parse(text_or_word)
        for c in text_or_word:
            if c.lower() not in self.alphabet.letters:
                raise MalformedWord(f"letter {c!r} outside alphabet")
        return text_or_word

    def expand(self, word: str) -> str:
        """Rewrite defined letters into base letters and freely reduce."""
        if not self.defined:
            return free_reduce(word)
        out = []
        for c in word:
            lo = c.lower()
            if lo in self.defined:
                exp = self.defined[lo]
                out.append(exp if c.islower() else inverse(exp))
            else:
                out.append(c)
        return free_reduce("".join(out))

    def _needs_table(self) -> bool:
        if self.family == "free-abelian":
            return False
        return bool(self.defined) or self.family == "surface-amalgam"

    def base_canonical(self, base_word: str) -> str:
        """Canonical form in the base alphabet (unique per element)."""
        if self.family == "free":
            return free_reduce(base_word)
        if self.family == "free-abelian":
            return self._abelian_nf(base_word)
        return self._dehn.dehn_reduce(base_word)  # geodesic, not yet unique

    def _abelian_nf(self, word: str) -> str:
        exps: dict[str, int] = {}
        for c in word:
            exps[c.lower()] = exps.get(c.lower(), 0) + (1 if c.islower() else -1)
        out = []
        for c in self.alphabet.letters:
            k = exps.get(c, 0)
            out.append(c * k if k >= 0 else c.upper() * (-k))
        return "".join(out)

    def normal_form(self, word: str) -> str:
        """Canonical representative over the model's full generating set."""
        if self.family == "user-graph":
            if word not in self.graph[0]:
                raise MalformedWord(f"unknown vertex {word!r}")
            return word
        w = self._parse(word)
        if self._table is None:
            return self.base_canonical(w)
        return self._table.nf(w)

    def equal(self, u: str, v: str) -> bool:
        return self.normal_form(u) == self.normal_form(v)

    def nf_text(self, text: str) -> str:
        return self.alphabet.show(self.normal_form(self.alphabet.parse(text)))

    # -- fingerprints ---------------------------------------------------

    def describe(self) -> dict:
        if self.family == "user-graph":
            return {
                "family": self.family,
                "vertices": list(self.graph[0]),
                "edges": sorted(map(list, self.graph[1])),
                "peripherals": [[p.id, p.letter, p.definition] for p in self.peripherals],
            }
        return {
            "family": self.family,
            "generators": self.alphabet.names,
            "relators": [self.alphabet.show(r) for r in self.relators],
            "defined": {
                self.alphabet.name[c]: self.alphabet.show(w)
                for c, w in sorted(self.defined.items())
            },
            "peripherals": [
                [p.id, p.letter, self.alphabet.show(p.definition) if p.definition else ""]
                for p in self.peripherals
            ],
            "splitting": self.splitting.describe() if self.splitting else None,
        }


class _ElementTable:
    """Shortlex BFS element discovery for table-backed models."""

    def __init__(self, model: GroupModel):
        self.model = model
        self.words: list[str] = [""]
        self.alias: dict[str, int] = {"": 0}
        self.edges: list[tuple[int, int, str]] = []
        self.radius = 0
        self._frontier = [0]
        letters = model.alphabet.letters
        self.letters = "".join(c + c.upper() for c in letters)

    def _resolve(self, base_word: str) -> int | None:
        """Look up (and alias-register) the element of a base-alphabet word."""
        model = self.model
        w = model.base_canonical(base_word)
        hit = self.alias.get(w)
        if hit is not None:
            return hit
        if model.family != "surface-amalgam":
            return None
        while True:
            closure, shorter = model._dehn.swap_closure(w)
            found = None
            for c in closure:
                hit = self.alias.get(c)
                if hit is not None:
                    found = hit
                    break
            if found is not None:
                for c in closure:
                    self.alias[c] = found
                return found
            if shorter is None:
                self._pending_closure = closure
                return None
            w = shorter

    def _register(self, ext_word: str, base_word: str) -> int:
        idx = len(self.words)
        self.words.append(ext_word)
        if self.model.family == "surface-amalgam":
            closure = getattr(self, "_pending_closure", None) or {base_word}
            for c in closure:
                self.alias[c] = idx
            self._pending_closure = None
        else:
            self.alias[base_word] = idx
        return idx

    def enumerate_to(self, radius: int, budget: int | None = None) -> None:
        budget = budget or self.model.budget
        model = self.model
        while self.radius < radius:
            nxt = []
            for uid in self._frontier:
                u = self.words[uid]
                for s in self.letters:
                    if u and u[-1] == s.swapcase():
                        continue
                    w = u + s
                    base = model.base_canonical(model.expand(w))
                    wid = self._resolve(base)
                    if wid is None:
                        if len(self.words) >= budget:
                            raise ResourceLimit(
                                f"element budget {budget} exceeded at radius {self.radius + 1}"
                            )
                        wid = self._register(w, base)
                        nxt.append(wid)
                    self.edges.append((uid, wid, s))
            self.radius += 1
            self._frontier = nxt

    def nf(self, word: str) -> str:
        base = self.model.base_canonical(self.model.expand(word))
        wid = self._resolve(base)
        while wid is None:
            # the canonical extended word is no longer than any base spelling
            if self.radius >= len(base):
                raise ResourceLimit(f"element of {word!r} not reachable within table")
            self.enumerate_to(self.radius + 1)
            wid = self._resolve(base)
        return self.words[wid]


@dataclass
class CosetDescriptor:
    """One peripheral coset inside a ball: transversal rep + members."""

    spec_id: str
    rep: str
    members: tuple[int, ...]  # ball vertex indices, sorted by shortlex


@dataclass
class CayleyBall:
    """The full subgraph of the Cayley graph on elements of length <= radius."""

    model: GroupModel
    radius: int
    words: list[str]
    index: dict[str, int]
    wlen: list[int]
    edges: list[tuple[int, int, str]]  # (u, v, letter of the u->v generator)
    basepoint: int = 0

    @property
    def n(self) -> int:
        return len(self.words)

    def sort_key(self, idx: int):
        return self.model.alphabet.sort_key(self.words[idx])


def cayley_ball(model: GroupModel, radius: int, budget: int | None = None) -> CayleyBall:
    """Build the radius-``radius`` ball around the identity."""
    if radius < 0:
        raise MalformedWord("radius must be >= 0")
    budget = budget or model.budget
    if model.family == "user-graph":
        return _user_graph_ball(model)
    if model._table is not None:
        table = model._table
        table.enumerate_to(radius, budget)
        keep = [i for i, w in enumerate(table.words) if len(w) <= radius]
        words = [table.words[i] for i in keep]
        remap = {old: new for new, old in enumerate(keep)}
        index = {w: i for i, w in enumerate(words)}
        seen = {}
        for u, v, s in table.edges:
            if u in remap and v in remap and u != v:
                a, b = remap[u], remap[v]
                key = (min(a, b), max(a, b))
                if key not in seen:
                    seen[key] = s if a <= b else s.swapcase()
        edges = [(a, b, s) for (a, b), s in sorted(seen.items())]
        return CayleyBall(model, radius, words, index, [len(w) for w in words], edges)
    return _direct_ball(model, radius, budget)


def _direct_ball(model: GroupModel, radius: int, budget: int) -> CayleyBall:
    words = [""]
    index = {"": 0}
    edges_seen = {}
    frontier = [0]
    letters = "".join(c + c.upper() for c in model.alphabet.letters)
    for _ in range(radius):
        nxt = []
        for uid in frontier:
            u = words[uid]
            for s in letters:
                w = model.base_canonical(u + s)
                if len(w) > radius:
                    continue
                wid = index.get(w)
                if wid is None:
                    if len(words) >= budget:
                        raise ResourceLimit(f"vertex budget {budget} exceeded")
                    wid = len(words)
                    words.append(w)
                    index[w] = wid
                    if len(w) > len(u):
                        nxt.append(wid)
                if wid != uid:
                    key = (min(uid, wid), max(uid, wid))
                    if key not in edges_seen:
                        edges_seen[key] = s if uid <= wid else s.swapcase()
        frontier = nxt
    edges = [(a, b, s) for (a, b), s in sorted(edges_seen.items())]
    return CayleyBall(model, radius, words, index, [len(w) for w in words], edges)


def _user_graph_ball(model: GroupModel) -> CayleyBall:
    names, name_edges = model.graph
    index = {w: i for i, w in enumerate(names)}
    adj = {i: [] for i in range(len(names))}
    edges = []
    for a, b in name_edges:
        ia, ib = index[a], index[b]
        adj[ia].append(ib)
        adj[ib].append(ia)
        edges.append((min(ia, ib), max(ia, ib), "?"))
    # wlen = BFS distance from the first-listed vertex
    wlen = [-1] * len(names)
    wlen[0] = 0
    queue = [0]
    for v in queue:
        for u in adj[v]:
            if wlen[u] < 0:
                wlen[u] = wlen[v] + 1
                queue.append(u)
    radius = max(wlen) if wlen else 0
    return CayleyBall(model, radius, list(names), index, wlen, sorted(set(edges)))


def peripheral_cosets_in_ball(
    ball: CayleyBall, spec: PeripheralSpec, slack: int = 4
) -> list[CosetDescriptor]:
    """Partition the ball vertices lying in left cosets of the peripheral.

    Every vertex lies in exactly one left coset of a cyclic peripheral, so
    the partition covers the whole ball.  The transversal representative
    is the shortlex-least member (lexicographically least among shortest).
    Walks continue ``slack`` steps past the radius before giving up on a
    direction, guarding against non-monotone word length along the orbit.
    """
    model = ball.model
    if spec.whole_group:
        members = tuple(sorted(range(ball.n), key=ball.sort_key))
        rep = ball.words[members[0]]
        return [CosetDescriptor(spec.id, rep, members)]
    assigned = [False] * ball.n
    cosets = []
    order = sorted(range(ball.n), key=ball.sort_key)
    for start in order:
        if assigned[start]:
            continue
        members = {start}
        for step in (spec.letter, spec.letter.swapcase()):
            w = ball.words[start]
            misses = 0
            while misses <= slack:
                w = model.normal_form(w + step)
                if len(w) > ball.radius:
                    misses += 1
                    continue
                idx = ball.index.get(w)
                if idx is None or idx in members:
                    # outside this truncation or wrapped (finite orbit)
                    break
                members.add(idx)
                misses = 0
        for m in members:
            assigned[m] = True
        members = tuple(sorted(members, key=ball.sort_key))
        cosets.append(CosetDescriptor(spec.id, ball.words[members[0]], members))
    cosets.sort(key=lambda c: model.alphabet.sort_key(c.rep) if model.alphabet else c.rep)
    return cosets
