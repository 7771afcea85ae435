"""Alphabet handling and word primitives.

Internally a word is a ``str`` over single-character letters: generator
``i`` of an alphabet is the lowercase letter ``chr(ord('a') + i)`` and its
inverse is the corresponding uppercase letter, so inversion of a reduced
word is ``w[::-1].swapcase()``.  Externally words are serialized as
whitespace-separated generator names with a ``^-1`` suffix for inverses,
e.g. ``"a b^-1 a"``.
"""

from __future__ import annotations

from .errors import MalformedWord

_LOWER = "abcdefghijklmnopqrstuvwxyz"


class Alphabet:
    """Bidirectional map between generator names and internal letters."""

    def __init__(self, names: list[str]):
        if len(names) > len(_LOWER):
            raise MalformedWord(f"too many generators ({len(names)})")
        if len(set(names)) != len(names):
            raise MalformedWord(f"duplicate generator names in {names}")
        for n in names:
            if not n or not n.replace("_", "").isalnum() or n[0].isdigit():
                raise MalformedWord(f"invalid generator name {n!r}")
        self.names = list(names)
        # single lowercase names keep their own letter; everything else
        # draws from the unused pool, in order
        taken = {n for n in names if len(n) == 1 and n in _LOWER}
        pool = iter(c for c in _LOWER if c not in taken)
        self.letter = {}
        for n in names:
            self.letter[n] = n if n in taken else next(pool)
        self.name = {v: k for k, v in self.letter.items()}
        self.letters = "".join(self.letter[n] for n in names)
        # shortlex letter order: a < A < b < B < ...
        order = "".join(c + c.upper() for c in self.letters)
        self._rank = {c: chr(33 + i) for i, c in enumerate(order)}
        self._trans = str.maketrans(self._rank)

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, letter: str) -> bool:
        return letter.lower() in self.letters

    def parse(self, text: str) -> str:
        """External serialization -> internal word (not reduced)."""
        out = []
        for tok in text.split():
            inv = tok.endswith("^-1")
            base = tok[:-3] if inv else tok
            if base not in self.letter:
                raise MalformedWord(f"unknown generator {base!r} in {text!r}")
            c = self.letter[base]
            out.append(c.upper() if inv else c)
        return "".join(out)

    def show(self, word: str) -> str:
        """Internal word -> external serialization."""
        toks = []
        for c in word:
            if c.lower() not in self.name.values() and c.lower() not in self.letters:
                raise MalformedWord(f"letter {c!r} outside alphabet")
            nm = self.name[c.lower()]
            toks.append(nm + "^-1" if c.isupper() else nm)
        return " ".join(toks)

    def sort_key(self, word: str):
        """Shortlex key; generator order follows the alphabet order."""
        return (len(word), word.translate(self._trans))


def free_reduce(word: str) -> str:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[str] = []
    for c in word:
        if out and out[-1] == c.swapcase():
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def inverse(word: str) -> str:
    return word[::-1].swapcase()


def is_reduced(word: str) -> bool:
    return all(word[i] != word[i + 1].swapcase() for i in range(len(word) - 1))


def cyclic_rotations(word: str) -> list[str]:
    return [word[i:] + word[:i] for i in range(len(word))]


def is_power_of(word: str, gen: str) -> bool:
    """True iff the freely reduced `word` is gen^k for some k in Z.

    `gen` must be cyclically reduced; powers of such a word concatenate
    without cancellation, so the check is literal.
    """
    if not word:
        return True
    g = gen if word[0] == gen[0] else inverse(gen)
    n, m = len(word), len(g)
    return n % m == 0 and word == g * (n // m)
