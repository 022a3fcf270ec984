"""Seeded random small presentations, modules and (co)chains for property tests."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from lrk import catalog
from lrk.complexes import Chain, Cochain
from lrk.core import (
    LRPresentation,
    ModulePresentation,
    a_tensor_g,
    change_basis,
    dualizing_module,
    hom_left_left,
    hom_left_right,
    hom_right_right,
    induced_module,
    omega_module,
    tensor_left,
    tensor_right_left,
    trivial_module,
)
from lrk.poisson import PoissonPresentation, build_d, modular_cocycle_lr, right_module_a
from lrk.poly import Derivation, Poly, WeightGrading, monomial_basis


def rand_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.choice([1, 1, 1, 2, 3]))


def rand_poly(rng: random.Random, nvars: int, max_weight: int = 3, terms: int = 3,
              grading: WeightGrading | None = None) -> Poly:
    grading = grading or WeightGrading.standard(nvars)
    out = Poly.zero(nvars)
    for _ in range(terms):
        w = rng.randint(0, max_weight) if nvars else 0
        mons = monomial_basis(grading, w)
        if mons:
            out = out + rng.choice(mons) * rand_rational(rng)
    return out


def rand_invertible(rng: random.Random, n: int) -> list[list[Fraction]]:
    from lrk.linalg import SparseMatrixQ, rank

    while True:
        m = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if rank(SparseMatrixQ.from_rows(m, n)) == n:
            return m


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def _inverse(m):
    from lrk.linalg import SparseMatrixQ, solve

    n = len(m)
    cols = []
    for j in range(n):
        e = [Fraction(int(i == j)) for i in range(n)]
        cols.append(solve(SparseMatrixQ.from_rows(m, n), e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def linear_vector_fields(mats, nvars: int) -> list[Derivation]:
    """X -> -sum_ij X_ij x_j d/dx_i, a Lie homomorphism gl_n -> Der(Q[x])."""
    out = []
    for X in mats:
        coeffs = []
        for i in range(nvars):
            c = Poly.zero(nvars)
            for j in range(nvars):
                if X[i][j]:
                    c = c - Poly.var(j, nvars) * X[i][j]
            coeffs.append(c)
        out.append(Derivation(tuple(coeffs)))
    return out


# two-dimensional representations of catalog algebras
REPS_2D = {
    "aff1": [[[1, 0], [0, 0]], [[0, 1], [0, 0]]],
    "sl2": [[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]],
    "abelian2": [[[1, 0], [0, 2]], [[0, 0], [0, 1]]],
    "heisenberg": [[[0, 0], [0, 0]], [[0, 0], [0, 0]], [[0, 0], [0, 0]]],
}


@dataclass
class Sample:
    """A random presentation with flat modules built on it."""

    label: str
    lr: LRPresentation
    left: list[ModulePresentation] = field(default_factory=list)
    right: list[ModulePresentation] = field(default_factory=list)
    g_action: bool = False  # A (x) g type, where the opposite-module rule applies


def _poisson_sample(rng, seed) -> Sample:
    nv = 2
    f = rand_poly(rng, nv, max_weight=2, terms=rng.randint(1, 3))
    if f.is_zero():
        f = Poly.var(0, nv)
    p = PoissonPresentation(("x", "y"), WeightGrading.standard(nv), {(0, 1): f})
    lr = build_d(p)
    return Sample(f"poisson{{x,y}}={f}", lr, right=[right_module_a(p, lr)])


def _a_tensor_g_sample(rng, seed) -> Sample:
    name = rng.choice(sorted(REPS_2D))
    g = catalog.CATALOG[name]()
    P = rand_invertible(rng, 2)
    Pi = _inverse(P)
    mats = [_matmul(_matmul(P, [[Fraction(x) for x in r] for r in X]), Pi) for X in REPS_2D[name]]
    nv = 2
    lr = a_tensor_g(g, ("x", "y"), WeightGrading.standard(nv), linear_vector_fields(mats, nv))
    left = [induced_module(lr, mats)]
    if rng.random() < 0.5:
        lr2 = change_basis(lr, rand_invertible(rng, lr.rank))
        return Sample(f"A(x){name} rebased", lr2, g_action=False)
    return Sample(f"A(x){name}", lr, left=left, g_action=True)


def _lie_sample(rng, seed) -> Sample:
    name = rng.choice(["aff1", "heisenberg", "sl2", "so3", "abelian2", "abelian3"])
    g = catalog.CATALOG[name]()
    g = change_basis(g, rand_invertible(rng, g.rank))
    left = [catalog.adjoint_module(g)]
    if g.rank == 3:
        left.append(catalog.exterior_power_module(g, 2))
    return Sample(f"{name} rebased", g, left=left, g_action=True)


def _one_var_sample(rng, seed) -> Sample:
    g = catalog.aff1()
    t = Poly.var(0, 1)
    c = rand_rational(rng) or Fraction(1)
    action = [Derivation((-t,)), Derivation((Poly.const(c, 1),))]
    lr = a_tensor_g(g, ("t",), WeightGrading.standard(1), action)
    return Sample("A(x)aff1 on Q[t]", lr, g_action=True)


def random_sample(seed: int) -> Sample:
    rng = random.Random(seed)
    kind = seed % 4
    builder = [_poisson_sample, _a_tensor_g_sample, _lie_sample, _one_var_sample][kind]
    s = builder(rng, seed)
    lr = s.lr
    A = trivial_module(lr)
    C = dualizing_module(lr)
    s.left.insert(0, A)
    # rank-one modules from cocycles da + c * modular cocycle
    a = rand_poly(rng, lr.nvars, 2, 2)
    c = rand_rational(rng)
    mod = modular_cocycle_lr(lr)
    conn = []
    for i in range(lr.rank):
        val = lr.anchor[i](a) + mod.get(((i,), 0)) * c
        conn.append(((val,),))
    s.left.append(ModulePresentation("left", 1, tuple(conn), (0,), "cocycle"))
    s.right = [C, omega_module(lr)] + s.right
    return s


def derived_modules(lr: LRPresentation, s: Sample) -> list[tuple[str, ModulePresentation]]:
    """Outputs of every construction applied to the sample's modules."""
    out = []
    m1 = s.left[-1]
    m2 = s.left[1] if len(s.left) > 2 else s.left[0]
    n1, n2 = s.right[0], s.right[-1]
    out.append(("tensor_left", tensor_left(lr, m1, m2)))
    out.append(("hom_left_left", hom_left_left(lr, m2, m1)))
    out.append(("hom_right_right", hom_right_right(lr, n1, n2)))
    out.append(("tensor_right_left", tensor_right_left(lr, n2, m1)))
    out.append(("hom_left_right", hom_left_right(lr, m1, n1)))
    out.append(("dualizing_module", dualizing_module(lr)))
    return out


def rand_cochain(rng: random.Random, lr: LRPresentation, rank: int, k: int, max_weight: int = 3) -> Cochain:
    coords = {}
    for I in itertools.combinations(range(lr.rank), k):
        for l in range(rank):
            if rng.random() < 0.7:
                coords[(I, l)] = rand_poly(rng, lr.nvars, max_weight, 2)
    return Cochain(k, coords, lr.nvars)


def rand_chain(rng: random.Random, lr: LRPresentation, rank: int, k: int, max_weight: int = 3) -> Chain:
    coords = {}
    for J in itertools.combinations(range(lr.rank), k):
        for l in range(rank):
            if rng.random() < 0.7:
                coords[(l, J)] = rand_poly(rng, lr.nvars, max_weight, 2)
    return Chain(k, coords, lr.nvars)


def rand_element(rng: random.Random, lr: LRPresentation, max_weight: int = 2) -> tuple:
    return tuple(rand_poly(rng, lr.nvars, max_weight, 2) for _ in range(lr.rank))
