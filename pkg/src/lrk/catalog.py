"""Small Lie algebras over Q and standard coefficient modules."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping

from .core import LRPresentation, ModulePresentation, a_tensor_g
from .poly import Derivation, Poly, WeightGrading

__all__ = [
    "lie_algebra",
    "abelian",
    "aff1",
    "heisenberg",
    "sl2",
    "so3",
    "CATALOG",
    "adjoint_module",
    "exterior_power_module",
    "trace_character_module",
    "structure_constant",
    "linear_action",
]


def lie_algebra(name: str, basis: list[str], structure: Mapping[tuple[int, int], Mapping[int, object]]) -> LRPresentation:
    """Lie algebra over Q from {(i, j): {k: c_ij^k}} with i < j."""
    n = len(basis)
    grading = WeightGrading(())
    bracket = {}
    for (i, j), vals in structure.items():
        bracket[(i, j)] = tuple(Poly.const(Fraction(vals.get(k, 0)), 0) for k in range(n))
    anchor = tuple(Derivation(()) for _ in range(n))
    return LRPresentation((), grading, tuple(basis), anchor, bracket, (0,) * n, name)


def abelian(n: int) -> LRPresentation:
    return lie_algebra(f"abelian({n})", [f"e{i + 1}" for i in range(n)], {})


def aff1() -> LRPresentation:
    return lie_algebra("aff(1)", ["e1", "e2"], {(0, 1): {1: 1}})


def heisenberg() -> LRPresentation:
    return lie_algebra("heisenberg", ["e1", "e2", "e3"], {(0, 1): {2: 1}})


def sl2() -> LRPresentation:
    # basis h, e, f
    return lie_algebra("sl(2)", ["h", "e", "f"], {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}})


def so3() -> LRPresentation:
    return lie_algebra("so(3)", ["e1", "e2", "e3"], {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}})


CATALOG = {
    "abelian1": lambda: abelian(1),
    "abelian2": lambda: abelian(2),
    "abelian3": lambda: abelian(3),
    "aff1": aff1,
    "heisenberg": heisenberg,
    "sl2": sl2,
    "so3": so3,
}


def structure_constant(g: LRPresentation, i: int, j: int, k: int) -> Fraction:
    return g.bracket_basis(i, j)[k].constant_term()


def _const_matrix(rows, nvars: int):
    return tuple(tuple(Poly.const(Fraction(x), nvars) for x in r) for r in rows)


def adjoint_module(g: LRPresentation) -> ModulePresentation:
    """g acting on itself by ad; column j of ad(e_i) is [e_i, e_j]."""
    n = g.rank
    conn = []
    for i in range(n):
        conn.append(_const_matrix([[structure_constant(g, i, j, k) for j in range(n)] for k in range(n)], g.nvars))
    return ModulePresentation("left", n, tuple(conn), (0,) * n, "ad")


def exterior_power_module(g: LRPresentation, p: int) -> ModulePresentation:
    """Lambda^p g with the derivation extension of ad; basis p-subsets in lex order."""
    n = g.rank
    subsets = list(itertools.combinations(range(n), p))
    index = {S: a for a, S in enumerate(subsets)}
    conn = []
    from .complexes import sort_sign

    for i in range(n):
        mat = [[Fraction(0)] * len(subsets) for _ in subsets]
        for col, S in enumerate(subsets):
            for pos, s in enumerate(S):
                for k in range(n):
                    c = structure_constant(g, i, s, k)
                    if not c:
                        continue
                    seq = S[:pos] + (k,) + S[pos + 1:]
                    sg, T = sort_sign(seq)
                    if sg:
                        mat[index[T]][col] += c * sg
        conn.append(_const_matrix(mat, g.nvars))
    return ModulePresentation("left", len(subsets), tuple(conn), (0,) * len(subsets), f"Lambda^{p}")


def trace_character_module(g: LRPresentation) -> ModulePresentation:
    """C_g viewed as a left module: e_i acts on the generator by -tr ad(e_i)."""
    conn = []
    for i in range(g.rank):
        tr = sum((structure_constant(g, i, j, j) for j in range(g.rank)), Fraction(0))
        conn.append(_const_matrix([[-tr]], g.nvars))
    return ModulePresentation("left", 1, tuple(conn), (0,), "C_g")


def linear_action(g: LRPresentation, grading: WeightGrading | None = None) -> list[Derivation]:
    """Derivations of Q[x_1..x_n] from the coadjoint-type action e_i -> sum_jk c_ij^k x_k d/dx_j.

    This is the action making A (x) g isomorphic to the Lie-Poisson algebroid
    of g under dx_i <-> e_i.
    """
    n = g.rank
    out = []
    for i in range(n):
        coeffs = []
        for j in range(n):
            c = Poly.zero(n)
            for k in range(n):
                s = structure_constant(g, i, j, k)
                if s:
                    c = c + Poly.var(k, n) * s
            coeffs.append(c)
        out.append(Derivation(tuple(coeffs)))
    return out


def lie_poisson_action_algebroid(g: LRPresentation, names: list[str] | None = None) -> LRPresentation:
    """A (x) g with A = Q[g*] and the linear action above."""
    n = g.rank
    names = names or [f"x{i + 1}" for i in range(n)] if n > 3 else (names or ["x", "y", "z"][:n])
    grading = WeightGrading.standard(n)
    return a_tensor_g(g, names, grading, linear_action(g), name=f"A(x){g.name}")
