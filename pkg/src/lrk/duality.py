"""Fundamental class, cap duality, the inverse chain map and bilinear pairings.

For L of rank n with dualizing module C generated by phi (dual to
e_1 ^ ... ^ e_n), the fundamental class is the top chain e with
e cap phi_top = phi, where phi_top is the A-valued top cochain with
phi_top(e_1, ..., e_n) = 1.  Capping with e sends a k-cochain with values in
M to an (n - k)-chain with values in C (x) M, preserving weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .complexes import (
    Chain,
    ChainComplex,
    Cochain,
    CochainComplex,
    ModulePairing,
    cap,
    check_pairing,
    cup,
    shuffle_sign,
)
from .core import LRPresentation, ModulePresentation, dualizing_module, tensor_right_left, trivial_module
from .linalg import SparseMatrixQ, kernel_basis, rank, solve
from .poly import Poly, monomial_basis

__all__ = [
    "FundamentalClass",
    "PairingGram",
    "NoSolution",
    "NotInvertible",
    "DimensionMismatch",
    "fundamental_class",
    "cap_duality_map",
    "duality_phi",
    "phi_chain_map",
    "pairing_gram",
    "top_cochain",
]


class NoSolution(ArithmeticError):
    pass


class NotInvertible(ArithmeticError):
    pass


class DimensionMismatch(AssertionError):
    pass


def top_cochain(lr: LRPresentation, a: Poly | None = None) -> Cochain:
    """The A-valued n-cochain taking e_1, ..., e_n to a (default 1)."""
    a = Poly.one(lr.nvars) if a is None else a
    return Cochain(lr.rank, {(tuple(range(lr.rank)), 0): a}, lr.nvars)


@dataclass
class FundamentalClass:
    representative: Chain
    certified: bool
    solution_space_dim: int
    module: ModulePresentation

    def cap(self, lr: LRPresentation, m: ModulePresentation, c: Cochain) -> Chain:
        return cap(lr, self.module, m, self.representative, c)


def fundamental_class(lr: LRPresentation, check_weight: int = 2) -> FundamentalClass:
    """Solve for the cycle e of degree n and weight 0 with e cap phi_top = phi.

    The solution space of the cycle condition on that block is reported; the
    identity e cap (b phi_top) = b phi is then checked for every monomial b
    of weight <= ``check_weight``.
    """
    C = dualizing_module(lr)
    A = trivial_module(lr)
    n = lr.rank
    nv = lr.nvars
    cx = ChainComplex(lr, C)
    block = cx.block(n, 0)
    _, tgt, cols = cx.differential_columns(n, 0)
    # unknowns: block coordinates; equations: boundary = 0 and cap with phi_top = phi
    cycles = kernel_basis(SparseMatrixQ.from_columns(cols, len(tgt)))
    phi_top = top_cochain(lr)
    cap_rows: dict = {}
    for i in range(len(block)):
        img = cap(lr, C, A, block.basis_element(i, Chain, nv), phi_top)
        for (gen, _J), p in img.coords.items():
            for e, x in p.terms.items():
                cap_rows.setdefault((gen, e), {})[i] = x
    eq_keys = sorted(set(cap_rows) | {(0, (0,) * nv)})
    rows = []
    rhs = []
    for key in eq_keys:
        rows.append(cap_rows.get(key, {}))
        rhs.append(Fraction(1) if key == (0, (0,) * nv) else Fraction(0))
    # boundary equations, one per target coordinate
    bmat = SparseMatrixQ.from_columns(cols, len(tgt))
    full_rows = [bmat.row(r) for r in range(bmat.nrows)] + rows
    full_rhs = [Fraction(0)] * bmat.nrows + rhs
    system = SparseMatrixQ.from_rows(full_rows, len(block))
    x = solve(system, full_rhs)
    if x is None:
        raise NoSolution("no degree-n cycle of weight 0 caps phi_top to phi")
    e = block.element(x, Chain, nv)
    certified = _certify(lr, C, A, e, check_weight)
    return FundamentalClass(e, certified, len(cycles), C)


def _certify(lr, C, A, e: Chain, check_weight: int) -> bool:
    from .complexes import rinehart_boundary

    if not rinehart_boundary(lr, C, e).is_zero():
        return False
    weights = range(check_weight + 1) if lr.nvars else [0]
    for w in weights:
        for b in monomial_basis(lr.grading, w):
            got = cap(lr, C, A, e, top_cochain(lr, b))
            if got != Chain(0, {(0, ()): b}, lr.nvars):
                return False
    return True


def cap_duality_map(lr: LRPresentation, m: ModulePresentation, k: int, w: int,
                    fc: FundamentalClass | None = None, strict: bool = True) -> SparseMatrixQ:
    """Matrix of e cap (.): H^k(L, M)_w -> H_{n-k}(L, C (x) M)_w on computed bases."""
    fc = fc or fundamental_class(lr)
    C = fc.module
    CM = tensor_right_left(lr, C, m)
    coc = CochainComplex(lr, m).homology_block(k, w)
    ch = ChainComplex(lr, CM).homology_block(lr.rank - k, w)
    cols = []
    for rep in coc.representative_elements():
        cols.append(ch.class_coordinates(cap(lr, C, m, fc.representative, rep)))
    mat = SparseMatrixQ.from_columns(cols, ch.dim)
    if strict and (coc.dim != ch.dim or rank(mat) != coc.dim):
        raise NotInvertible(f"cap with the fundamental class is not invertible at k={k}, w={w}")
    return mat


def phi_chain_map(lr: LRPresentation, m: ModulePresentation, z: Chain) -> Cochain:
    """Chain-level inverse of capping with phi (x) e_1 ^ ... ^ e_n.

    (phi (x) a f_b) (x) e_J goes to the cochain taking e_{J^c} to
    sign(J^c, J) a f_b; z is a chain of C (x) M, whose generators are those of M.
    """
    n = lr.rank
    out: dict = {}
    k = n - z.degree
    for (b, J), a in z.coords.items():
        Jc = tuple(i for i in range(n) if i not in J)
        s = shuffle_sign(Jc, J)
        key = (Jc, b)
        out[key] = out[key] + a * s if key in out else a * s
    return Cochain(k, out, lr.nvars)


def duality_phi(lr: LRPresentation, m: ModulePresentation, k: int, w: int, strict: bool = True) -> SparseMatrixQ:
    """Matrix of the induced map H_{n-k}(L, C (x) M)_w -> H^k(L, M)_w on computed bases."""
    C = dualizing_module(lr)
    CM = tensor_right_left(lr, C, m)
    coc = CochainComplex(lr, m).homology_block(k, w)
    ch = ChainComplex(lr, CM).homology_block(lr.rank - k, w)
    if coc.dim != ch.dim:
        raise DimensionMismatch(
            f"dim H^{k}_{w} = {coc.dim} but dim H_{lr.rank - k}_{w}(C (x) M) = {ch.dim}")
    cols = [coc.class_coordinates(phi_chain_map(lr, m, rep)) for rep in ch.representative_elements()]
    mat = SparseMatrixQ.from_columns(cols, coc.dim)
    if strict and rank(mat) != coc.dim:
        raise NotInvertible(f"duality map is singular at k={k}, w={w}")
    return mat


@dataclass
class PairingGram:
    degree: int
    weights: tuple[int, int]
    left_dim: int
    right_dim: int
    target_dim: int
    matrix: SparseMatrixQ  # left_dim x (right_dim * target_dim)
    left_rank: int
    right_rank: int
    target_weight: int

    @property
    def nondegenerate(self) -> bool:
        return self.left_rank == self.left_dim and self.right_rank == self.right_dim

    @property
    def rank(self) -> int:
        return min(self.left_rank, self.right_rank)

    def entry(self, i: int, j: int) -> list[Fraction]:
        """Target class coordinates of rep_i cup rep_j."""
        t = self.target_dim
        return [self.matrix[i, j * t + r] for r in range(t)]


def pairing_gram(lr: LRPresentation, m1: ModulePresentation, m2: ModulePresentation,
                 pairing: ModulePairing, k: int, w1: int, w2: int) -> PairingGram:
    """Gram data of H^k(M1)_{w1} x H^{n-k}(M2)_{w2} -> H^n(M)_{w1+w2} via cup product.

    Each product is recorded by its coordinates on the full deterministic basis
    of the target; left rank uses the rows as written, right rank the
    transposed arrangement.
    """
    check_pairing(lr, pairing)
    n = lr.rank
    h1 = CochainComplex(lr, m1).homology_block(k, w1)
    h2 = CochainComplex(lr, m2).homology_block(n - k, w2)
    tw = w1 + w2
    ht = CochainComplex(lr, pairing.target).homology_block(n, tw)
    t = ht.dim
    reps1 = h1.representative_elements()
    reps2 = h2.representative_elements()
    values = {}
    for i, a in enumerate(reps1):
        for j, b in enumerate(reps2):
            values[(i, j)] = ht.class_coordinates(cup(lr, a, b, pairing, check=False))
    entries = {}
    transposed = {}
    for (i, j), coords in values.items():
        for r, x in enumerate(coords):
            if x:
                entries[(i, j * t + r)] = x
                transposed[(j, i * t + r)] = x
    mat = SparseMatrixQ(h1.dim, h2.dim * t, entries)
    tmat = SparseMatrixQ(h2.dim, h1.dim * t, transposed)
    return PairingGram(k, (w1, w2), h1.dim, h2.dim, t, mat, rank(mat), rank(tmat), tw)
