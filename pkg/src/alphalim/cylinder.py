"""Binary sequence space {0,1}^N with cylinder sets and eventually periodic points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product


@dataclass(frozen=True, order=False)
class EP:
    """Eventually periodic sequence ``prefix + period period period ...``."""

    prefix: str
    period: str

    def __post_init__(self):
        if not self.period or set(self.prefix + self.period) - {"0", "1"}:
            raise ValueError(f"bad eventually periodic point {self.prefix}({self.period})")

    @classmethod
    def make(cls, prefix: str, period: str) -> "EP":
        # primitive root of the period
        n = len(period)
        for d in range(1, n + 1):
            if n % d == 0 and period[:d] * (n // d) == period:
                period = period[:d]
                break
        while prefix and prefix[-1] == period[-1]:
            prefix, period = prefix[:-1], period[-1] + period[:-1]
        return cls(prefix, period)

    def bit(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def head(self, n: int) -> str:
        if n <= len(self.prefix):
            return self.prefix[:n]
        reps = (n - len(self.prefix)) // len(self.period) + 1
        return (self.prefix + self.period * reps)[:n]

    def flip(self, i: int) -> "EP":
        m = max(i + 1, len(self.prefix))
        h = self.head(m + len(self.period))
        rest = h[m:]
        h = h[:i] + ("1" if h[i] == "0" else "0") + h[i + 1:m]
        return EP.make(h, rest)

    def horizon(self, other: "EP") -> int:
        """Index bound past which both sequences are periodic with a common period."""
        return max(len(self.prefix), len(other.prefix)) + math.lcm(len(self.period), len(other.period))

    def first_diff(self, other: "EP") -> int | None:
        for i in range(self.horizon(other)):
            if self.bit(i) != other.bit(i):
                return i
        return None

    def key(self, n: int = 64) -> str:
        return self.head(n)

    def __str__(self):
        return f"{self.prefix}({self.period})"


def parse_ep(s: str) -> EP:
    prefix, _, rest = s.partition("(")
    return EP.make(prefix, rest.rstrip(")"))


@dataclass(frozen=True)
class CylinderSet:
    """Closed set: union of cylinders [w] (len(w) <= depth) and finitely many points."""

    words: frozenset
    points: frozenset = frozenset()
    name: str | None = None

    @classmethod
    def make(cls, words=(), points=(), name=None) -> "CylinderSet":
        ws = set(words)
        ws = {w for w in ws if not any(w != v and w.startswith(v) for v in ws)}
        pts = {p for p in points if not any(p.head(len(w)) == w for w in ws)}
        return cls(frozenset(ws), frozenset(pts), name)

    def __contains__(self, x: EP) -> bool:
        return any(x.head(len(w)) == w for w in self.words) or x in self.points

    def contains_cylinder(self, w: str) -> bool:
        return any(w.startswith(v) for v in self.words)

    def is_empty(self) -> bool:
        return not self.words and not self.points

    def is_full(self) -> bool:
        if not self.words:
            return False
        L = max(len(w) for w in self.words)
        return all(self.contains_cylinder("".join(b)) for b in product("01", repeat=L))


@dataclass(frozen=True)
class CylinderSpace:
    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("cylinder depth must be >= 1")

    kind = "cantor"

    @property
    def description(self) -> dict:
        return {"kind": "cantor", "depth": self.depth}

    def check(self, A: CylinderSet) -> None:
        if any(len(w) > self.depth for w in A.words):
            raise ValueError(f"cylinder longer than depth {self.depth}")

    @staticmethod
    def distance(x: EP, y: EP) -> float:
        i = x.first_diff(y)
        return 0.0 if i is None else 2.0 ** -i

    def is_clopen(self, A: CylinderSet) -> bool:
        # finitely many leftover points are never open
        return not A.points

    def samples(self, A: CylinderSet | None = None, length: int | None = None) -> list[EP]:
        """Representative points: each word of ``length`` extended by a few tails."""
        L = length or self.depth
        out = []
        for bits in product("01", repeat=L):
            w = "".join(bits)
            for tail in ("0", "1", "01"):
                out.append(EP.make(w, tail))
        if A is not None:
            out.extend(A.points)
        return out
