"""Quivers, cluster seeds, mutations, and the ensemble map.

A quiver is a vertex list plus a skew-symmetric integer exchange matrix
(net arrow counts, no 2-cycles stored).  Seeds attach one rational-function
coordinate per vertex and come in two flavors that mutate differently:

* X-seeds:  X'_k = 1/X_k,  X'_i = X_i * (1 + X_k^(-sgn(e_ik)))^(-e_ik)
* A-seeds:  A'_k = (prod_{e_kj>0} A_j^e_kj + prod_{e_kj<0} A_j^-e_kj) / A_k

Mutation words are stored in composition order (rightmost step applied
first, matching the usual circle notation); the CLI and the file formats
list steps in application order and reverse on load.  Permutation steps
relabel coordinates and transport the exchange matrix.

Everything here is an immutable value; mutation returns new objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .ring import AlgebraError, RationalFunction, parse_expression

__all__ = [
    "Quiver",
    "Seed",
    "XSeed",
    "ASeed",
    "MutationStep",
    "Mutate",
    "Permute",
    "MutationWord",
    "mutate_quiver",
    "mutate_x",
    "mutate_a",
    "apply_word",
    "ensemble_map",
    "triangle_quiver",
    "seed_to_json",
    "seed_from_json",
    "word_from_json",
    "word_to_json",
]


class Quiver:
    """Vertex labels plus a skew-symmetric exchange matrix."""

    __slots__ = ("vertices", "matrix")

    def __init__(self, vertices: Sequence[str], matrix: Sequence[Sequence[int]]):
        verts = tuple(vertices)
        if len(set(verts)) != len(verts):
            raise AlgebraError("duplicate vertex labels")
        m = tuple(tuple(int(x) for x in row) for row in matrix)
        n = len(verts)
        if len(m) != n or any(len(row) != n for row in m):
            raise AlgebraError("exchange matrix shape mismatch")
        for i in range(n):
            if m[i][i] != 0:
                raise AlgebraError("exchange matrix has nonzero diagonal")
            for j in range(n):
                if m[i][j] != -m[j][i]:
                    raise AlgebraError("exchange matrix is not skew-symmetric")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, *_):
        raise AttributeError("Quiver is immutable")

    def index(self, vertex: str) -> int:
        try:
            return self.vertices.index(vertex)
        except ValueError:
            raise AlgebraError(f"unknown vertex {vertex!r}") from None

    def eps(self, i: str, j: str) -> int:
        return self.matrix[self.index(i)][self.index(j)]

    def __eq__(self, other):
        if not isinstance(other, Quiver):
            return NotImplemented
        return self.vertices == other.vertices and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.vertices, self.matrix))

    def permuted(self, perm: Mapping[str, str]) -> "Quiver":
        """Relabel by the vertex bijection: new eps[p(i)][p(j)] = eps[i][j]."""
        full = {v: perm.get(v, v) for v in self.vertices}
        if sorted(full.values()) != sorted(self.vertices):
            raise AlgebraError("permutation is not a bijection on the vertices")
        pos = {v: k for k, v in enumerate(self.vertices)}
        n = len(self.vertices)
        new = [[0] * n for _ in range(n)]
        for i, vi in enumerate(self.vertices):
            for j, vj in enumerate(self.vertices):
                new[pos[full[vi]]][pos[full[vj]]] = self.matrix[i][j]
        return Quiver(self.vertices, new)

    def __repr__(self):
        arrows = []
        for i, vi in enumerate(self.vertices):
            for j, vj in enumerate(self.vertices):
                k = self.matrix[i][j]
                if k > 0:
                    arrows.append(f"{vi}->{vj}" + (f"x{k}" if k > 1 else ""))
        return f"Quiver({', '.join(arrows) or 'no arrows'})"


def mutate_quiver(q: Quiver, k: str) -> Quiver:
    """Three-step mutation: compose through k, flip at k, cancel 2-cycles.

    On the exchange matrix this is the standard rule
    e'_ij = -e_ij if k in {i, j} else e_ij + max(0, e_ik * e_kj) * sgn(e_ik).
    """
    ki = q.index(k)
    n = len(q.vertices)
    m = [list(row) for row in q.matrix]
    new = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == ki or j == ki:
                new[i][j] = -m[i][j]
            elif m[i][ki] * m[ki][j] > 0:
                sign = 1 if m[i][ki] > 0 else -1
                new[i][j] = m[i][j] + sign * m[i][ki] * m[ki][j]
            else:
                new[i][j] = m[i][j]
    return Quiver(q.vertices, new)


@dataclass(frozen=True)
class Seed:
    quiver: Quiver
    coords: tuple[RationalFunction, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.quiver.vertices):
            raise AlgebraError("coordinate count must match vertex count")

    def coord(self, vertex: str) -> RationalFunction:
        return self.coords[self.quiver.index(vertex)]

    def coord_map(self) -> dict[str, RationalFunction]:
        return dict(zip(self.quiver.vertices, self.coords))

    def permuted(self, perm: Mapping[str, str]):
        """Quiver isomorphism sigma: new coordinate at sigma(v) is the old at v."""
        q = self.quiver.permuted(perm)
        full = {v: perm.get(v, v) for v in self.quiver.vertices}
        inv = {w: v for v, w in full.items()}
        coords = tuple(self.coord(inv[v]) for v in self.quiver.vertices)
        return type(self)(q, coords)


class XSeed(Seed):
    """Seed carrying Poisson X-coordinates."""


class ASeed(Seed):
    """Seed carrying A-coordinates (the Laurent-phenomenon side)."""


def mutate_x(seed: XSeed, k: str) -> XSeed:
    q = seed.quiver
    ki = q.index(k)
    xk = seed.coords[ki]
    coords = []
    for i, v in enumerate(q.vertices):
        if i == ki:
            coords.append(xk.inverse())
            continue
        e = q.matrix[i][ki]
        if e == 0:
            coords.append(seed.coords[i])
        elif e > 0:
            coords.append(seed.coords[i] * (1 + xk.inverse()) ** (-e))
        else:
            coords.append(seed.coords[i] * (1 + xk) ** (-e))
    return XSeed(mutate_quiver(q, k), tuple(coords))


def mutate_a(seed: ASeed, k: str) -> ASeed:
    q = seed.quiver
    ki = q.index(k)
    plus = RationalFunction.one()
    minus = RationalFunction.one()
    for j in range(len(q.vertices)):
        e = q.matrix[ki][j]
        if e > 0:
            plus = plus * seed.coords[j] ** e
        elif e < 0:
            minus = minus * seed.coords[j] ** (-e)
    coords = list(seed.coords)
    coords[ki] = (plus + minus) / seed.coords[ki]
    return ASeed(mutate_quiver(q, k), tuple(coords))


# -- mutation words ----------------------------------------------------------


@dataclass(frozen=True)
class Mutate:
    vertex: str


@dataclass(frozen=True)
class Permute:
    mapping: tuple[tuple[str, str], ...]

    @staticmethod
    def of(mapping: Mapping[str, str]) -> "Permute":
        return Permute(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)


MutationStep = Mutate | Permute


@dataclass(frozen=True)
class MutationWord:
    """Steps in composition order: the rightmost step is applied first."""

    steps: tuple[MutationStep, ...]

    @staticmethod
    def from_application_order(steps: Sequence[MutationStep]) -> "MutationWord":
        return MutationWord(tuple(reversed(tuple(steps))))

    def application_order(self) -> tuple[MutationStep, ...]:
        return tuple(reversed(self.steps))

    def __mul__(self, other: "MutationWord") -> "MutationWord":
        return MutationWord(self.steps + other.steps)

    def inverse(self) -> "MutationWord":
        out = []
        for step in self.steps:
            if isinstance(step, Mutate):
                out.append(step)
            else:
                out.append(Permute.of({w: v for v, w in step.mapping}))
        return MutationWord(tuple(reversed(out)))


def apply_step(seed: Seed, step: MutationStep) -> Seed:
    if isinstance(step, Mutate):
        if isinstance(seed, XSeed):
            return mutate_x(seed, step.vertex)
        if isinstance(seed, ASeed):
            return mutate_a(seed, step.vertex)
        raise AlgebraError("seed flavor must be XSeed or ASeed")
    return seed.permuted(step.as_dict())


def apply_word(seed: Seed, word: MutationWord) -> Seed:
    for step in word.application_order():
        seed = apply_step(seed, step)
    return seed


# -- ensemble map -------------------------------------------------------------


def ensemble_map(seed: ASeed) -> XSeed:
    """p: A-torus -> X-torus, X_i = prod_j A_j^e_ij; commutes with mutation."""
    q = seed.quiver
    coords = []
    for i in range(len(q.vertices)):
        value = RationalFunction.one()
        for j in range(len(q.vertices)):
            e = q.matrix[i][j]
            if e:
                value = value * seed.coords[j] ** e
        coords.append(value)
    return XSeed(q, tuple(coords))


# -- canned quivers ------------------------------------------------------------


def triangle_quiver(a: str, b: str, c: str) -> Quiver:
    """Oriented 3-cycle a -> b -> c -> a."""
    return Quiver(
        (a, b, c),
        (
            (0, 1, -1),
            (-1, 0, 1),
            (1, -1, 0),
        ),
    )


# -- JSON formats --------------------------------------------------------------


def seed_to_json(seed: Seed) -> str:
    payload = {
        "flavor": "x" if isinstance(seed, XSeed) else "a",
        "quiver": {
            "vertices": list(seed.quiver.vertices),
            "matrix": [list(row) for row in seed.quiver.matrix],
        },
        "coords": {v: str(c) for v, c in seed.coord_map().items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def seed_from_json(text: str) -> Seed:
    payload = json.loads(text)
    quiver = Quiver(payload["quiver"]["vertices"], payload["quiver"]["matrix"])
    coords = tuple(
        parse_expression(payload["coords"][v]) for v in quiver.vertices
    )
    flavor = payload.get("flavor", "x")
    cls = XSeed if flavor == "x" else ASeed
    return cls(quiver, coords)


def word_from_json(text: str) -> MutationWord:
    """Word files list steps in application order (leftmost applied first)."""
    payload = json.loads(text)
    steps: list[MutationStep] = []
    for item in payload:
        if "mu" in item:
            steps.append(Mutate(item["mu"]))
        elif "sigma" in item:
            steps.append(Permute.of(item["sigma"]))
        else:
            raise AlgebraError(f"unknown word step {item!r}")
    return MutationWord.from_application_order(steps)


def word_to_json(word: MutationWord) -> str:
    items = []
    for step in word.application_order():
        if isinstance(step, Mutate):
            items.append({"mu": step.vertex})
        else:
            items.append({"sigma": step.as_dict()})
    return json.dumps(items, indent=2) + "\n"
