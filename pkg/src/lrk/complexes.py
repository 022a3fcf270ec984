"""Cochain and chain complexes of a Lie-Rinehart algebra with module coefficients.

A cochain of degree k with values in a left module M of rank m is stored as
``{(I, l): poly}``: the value on e_I (I strictly increasing) is
``sum_l poly * f_l``.  A chain with coefficients in a right module N is stored
as ``{(l, J): poly}`` meaning ``sum poly * f_l (x) e_J``.

Each complex splits into finite-dimensional blocks indexed by (degree,
weight).  For a weight-homogeneous presentation the weight of a cochain
coordinate is ``wt(poly) + g_l - sum_{i in I} w_i`` and of a chain coordinate
``wt(poly) + g_l + sum_{j in J} w_j``; both differentials raise weight by the
structure shift.  Inhomogeneous presentations are handled by truncating to
weight <= W and projecting, and every report is then marked ``truncated``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import LRPresentation, ModulePresentation, SideMismatch, act_left, tensor_right_left
from .linalg import Echelon, SparseMatrixQ, kernel_basis, quotient_dimension
from .poly import Poly, monomial_exponents

__all__ = [
    "Cochain",
    "Chain",
    "ModulePairing",
    "PairingNotEquivariant",
    "ce_differential",
    "rinehart_boundary",
    "contraction",
    "lie_derivative",
    "evaluate",
    "cup",
    "cap",
    "multiplication_pairing",
    "check_pairing",
    "CochainComplex",
    "ChainComplex",
    "Block",
    "CohomologyReport",
    "cohomology",
    "homology",
    "shuffle_sign",
    "sort_sign",
]


class PairingNotEquivariant(ValueError):
    pass


def sort_sign(seq: Sequence[int]) -> tuple[int, tuple]:
    """(sign, sorted tuple) of a sequence of indices; sign 0 on a repeat."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def shuffle_sign(first: Sequence[int], second: Sequence[int]) -> int:
    """Sign of the permutation putting first + second into increasing order."""
    return sort_sign(tuple(first) + tuple(second))[0]


class _Coords:
    """Sparse dict of polynomial coordinates with vector-space operations."""

    __slots__ = ("degree", "coords", "nvars")

    def __init__(self, degree: int, coords: dict | None = None, nvars: int = 0):
        self.degree = degree
        self.nvars = nvars
        self.coords = {k: v for k, v in (coords or {}).items() if v.terms}

    def _new(self, coords):
        return type(self)(self.degree, coords, self.nvars)

    def get(self, key) -> Poly:
        return self.coords.get(key, Poly.zero(self.nvars))

    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out[k] + v if k in out else v
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def times(self, a) -> "_Coords":
        """Multiply every coordinate by a polynomial or rational scalar."""
        return self._new({k: a * v for k, v in self.coords.items()})

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.degree == other.degree and self.coords == other.coords

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.coords.items()))
        return f"{type(self).__name__}(deg={self.degree}, {{{body}}})"


class Cochain(_Coords):
    """Alternating A-multilinear map from Lambda^k L to a left module; keys (I, l)."""


class Chain(_Coords):
    """Element of N (x)_A Lambda^k L; keys (l, J)."""


def _accumulate(out: dict, key, value: Poly):
    if not value.terms:
        return
    if key in out:
        s = out[key] + value
        if s.terms:
            out[key] = s
        else:
            del out[key]
    else:
        out[key] = value


def _column(m: ModulePresentation, i: int, l: int, nvars: int):
    """Column l of the i-th connection matrix as {row: poly}."""
    mat = m.connection[i]
    return {r: mat[r][l] for r in range(m.rank) if mat[r][l].terms}


# differentials -------------------------------------------------------------

def ce_differential(lr: LRPresentation, m: ModulePresentation, c: Cochain) -> Cochain:
    """Chevalley-Eilenberg-Rinehart differential of a cochain with values in a left module."""
    m.check_side("left", "coefficient module")
    k = c.degree
    n = lr.rank
    nv = lr.nvars
    out: dict = {}
    if k >= n:
        return Cochain(k + 1, {}, nv)
    # group the cochain by index tuple
    by_index: dict = {}
    for (I, l), p in c.coords.items():
        by_index.setdefault(I, {})[l] = p
    for K in itertools.combinations(range(n), k + 1):
        # sum_r (-1)^r e_{K_r} . omega(K without K_r)
        for r, i in enumerate(K):
            rest = K[:r] + K[r + 1:]
            vals = by_index.get(rest)
            if not vals:
                continue
            sgn = -1 if r % 2 else 1
            rho = lr.anchor[i]
            for l, p in vals.items():
                _accumulate(out, (K, l), rho(p) * sgn)
                for row, g in _column(m, i, l, nv).items():
                    _accumulate(out, (K, row), g * p * sgn)
        # sum_{r<s} (-1)^{r+s} omega([e_r, e_s], rest)
        for r, s in itertools.combinations(range(k + 1), 2):
            rest = K[:r] + K[r + 1:s] + K[s + 1:]
            br = lr.bracket_basis(K[r], K[s])
            sgn = -1 if (r + s) % 2 else 1
            for t, coef in enumerate(br):
                if not coef.terms:
                    continue
                ts, I = sort_sign((t,) + rest)
                if not ts:
                    continue
                vals = by_index.get(I)
                if not vals:
                    continue
                for l, p in vals.items():
                    _accumulate(out, (K, l), coef * p * (sgn * ts))
    return Cochain(k + 1, out, nv)


def rinehart_boundary(lr: LRPresentation, nmod: ModulePresentation, z: Chain) -> Chain:
    """Boundary of N (x)_A Lambda L with N a right module."""
    nmod.check_side("right", "coefficient module")
    k = z.degree
    nv = lr.nvars
    out: dict = {}
    if k == 0:
        return Chain(-1, {}, nv)
    for (l, J), p in z.coords.items():
        # sum_r (-1)^r (n e_{J_r}) (x) e_{J without J_r}
        for r, j in enumerate(J):
            rest = J[:r] + J[r + 1:]
            sgn = -1 if r % 2 else 1
            # (p f_l) e_j = p (f_l e_j) - rho_j(p) f_l and f_l e_j = R_j column l
            _accumulate(out, (l, rest), lr.anchor[j](p) * (-sgn))
            for row, g in _column(nmod, j, l, nv).items():
                _accumulate(out, (row, rest), g * p * sgn)
        for r, s in itertools.combinations(range(k), 2):
            rest = J[:r] + J[r + 1:s] + J[s + 1:]
            br = lr.bracket_basis(J[r], J[s])
            sgn = -1 if (r + s) % 2 else 1
            for t, coef in enumerate(br):
                if not coef.terms:
                    continue
                ts, K = sort_sign((t,) + rest)
                if ts:
                    _accumulate(out, (l, K), coef * p * (sgn * ts))
    return Chain(k - 1, out, nv)


# contraction, Lie derivative, evaluation -----------------------------------

def contraction(lr: LRPresentation, alpha: Sequence[Poly], c: Cochain) -> Cochain:
    """(i_alpha omega)(b_1..b_{k-1}) = omega(alpha, b_1..b_{k-1})."""
    k = c.degree
    nv = lr.nvars
    if k == 0:
        return Cochain(-1, {}, nv)
    out: dict = {}
    for (I, l), p in c.coords.items():
        for pos, i in enumerate(I):
            a = alpha[i]
            if not a.terms:
                continue
            rest = I[:pos] + I[pos + 1:]
            sgn = -1 if pos % 2 else 1
            _accumulate(out, (rest, l), a * p * sgn)
    return Cochain(k - 1, out, nv)


def _value(c: Cochain, I: tuple, rank: int, nvars: int) -> list:
    return [c.get((I, l)) for l in range(rank)]


def lie_derivative(lr: LRPresentation, m: ModulePresentation, alpha: Sequence[Poly], c: Cochain) -> Cochain:
    """(lambda_alpha omega)(x_1..x_k) = alpha.omega(x..) - sum_j omega(..[alpha, x_j]..).

    Computed directly from this formula, so that Cartan's identity
    lambda_alpha = d i_alpha + i_alpha d is a genuine check.
    """
    m.check_side("left", "coefficient module")
    k = c.degree
    nv = lr.nvars
    out: dict = {}
    for I in itertools.combinations(range(lr.rank), k):
        val = act_left(lr, m, alpha, _value(c, I, m.rank, nv))
        for l, v in enumerate(val):
            _accumulate(out, (I, l), v)
        for pos, i in enumerate(I):
            br = lr.bracket_of(alpha, lr.basis_element(i))
            for t, coef in enumerate(br):
                if not coef.terms:
                    continue
                seq = I[:pos] + (t,) + I[pos + 1:]
                ts, J = sort_sign(seq)
                if not ts:
                    continue
                for l in range(m.rank):
                    p = c.get((J, l))
                    if p.terms:
                        _accumulate(out, (I, l), coef * p * (-ts))
    return Cochain(k, out, nv)


def evaluate(lr: LRPresentation, rank: int, c: Cochain, elements: Sequence[Sequence[Poly]]) -> list:
    """omega(alpha_1, ..., alpha_k) for general elements, by multilinear expansion."""
    nv = lr.nvars
    if len(elements) != c.degree:
        raise ValueError("wrong number of arguments")
    out = [Poly.zero(nv) for _ in range(rank)]
    supports = [[i for i, a in enumerate(el) if a.terms] for el in elements]
    for choice in itertools.product(*supports):
        ts, I = sort_sign(choice)
        if not ts:
            continue
        coef = Poly.one(nv)
        for el, i in zip(elements, choice):
            coef = coef * el[i]
        for l in range(rank):
            p = c.get((I, l))
            if p.terms:
                out[l] = out[l] + coef * p * ts
    return out


# products ------------------------------------------------------------------

@dataclass(frozen=True)
class ModulePairing:
    """A-bilinear map M1 x M2 -> M of left modules, given on generators.

    ``table[(a, b)]`` is the image of f_a (x) g_b as a tuple of target coordinates.
    """

    left: ModulePresentation
    right: ModulePresentation
    target: ModulePresentation
    table: dict = field(default_factory=dict)

    def apply(self, u: Sequence[Poly], v: Sequence[Poly], nvars: int) -> list:
        out = [Poly.zero(nvars) for _ in range(self.target.rank)]
        for (a, b), img in self.table.items():
            if not (u[a].terms and v[b].terms):
                continue
            uv = u[a] * v[b]
            for t, x in enumerate(img):
                if x.terms:
                    out[t] = out[t] + uv * x
        return out


def multiplication_pairing(lr: LRPresentation, m: ModulePresentation) -> ModulePairing:
    """A (x) M -> M, a (x) v -> a v."""
    from .core import trivial_module

    nv = lr.nvars
    a = trivial_module(lr)
    table = {}
    for b in range(m.rank):
        table[(0, b)] = tuple(Poly.one(nv) if t == b else Poly.zero(nv) for t in range(m.rank))
    return ModulePairing(a, m, m, table)


def check_pairing(lr: LRPresentation, pairing: ModulePairing) -> None:
    """Raise PairingNotEquivariant unless e_i.mu(f, g) = mu(e_i f, g) + mu(f, e_i g) on generators."""
    nv = lr.nvars
    for mod in (pairing.left, pairing.right, pairing.target):
        mod.check_side("left", "paired module")

    def unit(rank, k):
        return [Poly.one(nv) if t == k else Poly.zero(nv) for t in range(rank)]

    for i in range(lr.rank):
        e = lr.basis_element(i)
        for a in range(pairing.left.rank):
            for b in range(pairing.right.rank):
                fa, gb = unit(pairing.left.rank, a), unit(pairing.right.rank, b)
                lhs = act_left(lr, pairing.target, e, pairing.apply(fa, gb, nv))
                r1 = pairing.apply(act_left(lr, pairing.left, e, fa), gb, nv)
                r2 = pairing.apply(fa, act_left(lr, pairing.right, e, gb), nv)
                if any((x - y - z).terms for x, y, z in zip(lhs, r1, r2)):
                    raise PairingNotEquivariant(
                        f"pairing fails equivariance for e{i + 1} on generators ({a}, {b})")


def cup(lr: LRPresentation, c1: Cochain, c2: Cochain, pairing: ModulePairing,
        global_sign: bool = False, check: bool = True) -> Cochain:
    """Shuffle cup product (a u b)(x_K) = sum_S sign(S, K-S) mu(a(x_S), b(x_{K-S})).

    With ``global_sign`` the result is multiplied by (-1)^{|a||b|}.
    """
    if check:
        check_pairing(lr, pairing)
    nv = lr.nvars
    p, q = c1.degree, c2.degree
    out: dict = {}
    if p < 0 or q < 0 or p + q > lr.rank:
        return Cochain(p + q, {}, nv)
    sg = -1 if (global_sign and (p * q) % 2) else 1
    r1, r2 = pairing.left.rank, pairing.right.rank
    for K in itertools.combinations(range(lr.rank), p + q):
        for S in itertools.combinations(K, p):
            T = tuple(x for x in K if x not in S)
            u = _value(c1, S, r1, nv)
            if not any(x.terms for x in u):
                continue
            v = _value(c2, T, r2, nv)
            if not any(x.terms for x in v):
                continue
            s = shuffle_sign(S, T) * sg
            for t, x in enumerate(pairing.apply(u, v, nv)):
                _accumulate(out, (K, t), x * s)
    return Cochain(p + q, out, nv)


def cap(lr: LRPresentation, nmod: ModulePresentation, mmod: ModulePresentation,
        z: Chain, c: Cochain) -> Chain:
    """Cap product N (x) Lambda^p L  x  Alt^q(L, M)  ->  (N (x) M) (x) Lambda^{p-q} L.

    (n (x) e_J) cap c = sum_S sign(S, J-S) (n (x) c(e_S)) (x) e_{J-S}; the result
    lives in tensor_right_left(N, M), generator index a * rank(M) + b.
    """
    nmod.check_side("right", "chain coefficients")
    mmod.check_side("left", "cochain coefficients")
    nv = lr.nvars
    p, q = z.degree, c.degree
    out: dict = {}
    if q > p or q < 0:
        return Chain(p - q, {}, nv)
    mr = mmod.rank
    for (a, J), zp in z.coords.items():
        for S in itertools.combinations(J, q):
            T = tuple(x for x in J if x not in S)
            s = shuffle_sign(S, T)
            for b in range(mr):
                cp = c.get((S, b))
                if cp.terms:
                    _accumulate(out, (a * mr + b, T), zp * cp * s)
    return Chain(p - q, out, nv)


# per-weight blocks ---------------------------------------------------------

class Block:
    """Finite basis of one (degree, weight) piece of a complex.

    ``basis`` lists (key, exponent) pairs in deterministic order: exterior index
    lexicographic, then module generator, then monomials in descending lex order.
    """

    def __init__(self, degree: int, weight: int, basis: list):
        self.degree = degree
        self.weight = weight
        self.basis = basis
        self.index = {b: i for i, b in enumerate(basis)}

    def __len__(self):
        return len(self.basis)

    def element(self, vec: Sequence[Fraction] | dict, kind, nvars: int):
        items = vec.items() if isinstance(vec, dict) else enumerate(vec)
        coords: dict = {}
        for i, x in items:
            if not x:
                continue
            key, e = self.basis[i]
            _accumulate(coords, key, Poly(nvars, {e: Fraction(x)}))
        return kind(self.degree, coords, nvars)

    def basis_element(self, i: int, kind, nvars: int):
        key, e = self.basis[i]
        return kind(self.degree, {key: Poly(nvars, {e: Fraction(1)})}, nvars)


class _Complex:
    """Shared block bookkeeping for cochain and chain complexes."""

    kind: type = _Coords

    def __init__(self, lr: LRPresentation, module: ModulePresentation, max_weight: int | None = None):
        self.lr = lr
        self.module = module
        self.shift = lr.structure_shift()
        if self.shift is not None and not module.is_homogeneous(lr, self.shift):
            self.shift = None
        self.truncated = self.shift is None
        self.max_weight = max_weight
        self._blocks: dict = {}
        self._maps: dict = {}
        self._hom: dict = {}

    # subclasses provide: keys(k), key_offset(key), differential(elem), target_degree(k)
    def _key_offset(self, key) -> int:
        raise NotImplementedError

    def _keys(self, k: int):
        raise NotImplementedError

    def _apply(self, elem):
        raise NotImplementedError

    def _target_degree(self, k: int) -> int:
        raise NotImplementedError

    def _valid_degree(self, k: int) -> bool:
        return 0 <= k <= self.lr.rank

    def block(self, k: int, w: int) -> Block:
        """Degree k at weight w (weight <= w when truncated)."""
        ck = (k, w)
        if ck in self._blocks:
            return self._blocks[ck]
        basis = []
        weights = self.lr.grading.variable_weights
        if self._valid_degree(k):
            for key in self._keys(k):
                off = self._key_offset(key)
                targets = range(0, w - off + 1) if self.truncated else [w - off]
                for cw in targets:
                    if cw < 0:
                        continue
                    for e in monomial_exponents(weights, cw):
                        basis.append((key, e))
        b = Block(k, w, basis)
        self._blocks[ck] = b
        return b

    def to_vector(self, elem, block: Block) -> dict:
        """Coordinates in block; components outside are dropped only when truncated."""
        vec: dict = {}
        for key, p in elem.coords.items():
            for e, c in p.terms.items():
                idx = block.index.get((key, e))
                if idx is None:
                    if self.truncated:
                        continue
                    raise ValueError(f"component {key}, {e} lies outside block ({block.degree}, {block.weight})")
                vec[idx] = c
        return vec

    def target_weight(self, w: int) -> int:
        return w if self.truncated else w + self.shift

    def source_weight(self, w: int) -> int:
        return w if self.truncated else w - self.shift

    def differential_columns(self, k: int, w: int) -> tuple[Block, Block, list]:
        """Images of the basis of block (k, w) as sparse vectors in the target block."""
        ck = (k, w)
        if ck in self._maps:
            return self._maps[ck]
        src = self.block(k, w)
        tgt = self.block(self._target_degree(k), self.target_weight(w))
        nv = self.lr.nvars
        cols = []
        for i in range(len(src)):
            img = self._apply(src.basis_element(i, self.kind, nv))
            cols.append(self.to_vector(img, tgt))
        self._maps[ck] = (src, tgt, cols)
        return self._maps[ck]

    def differential_matrix(self, k: int, w: int) -> SparseMatrixQ:
        src, tgt, cols = self.differential_columns(k, w)
        return SparseMatrixQ.from_columns(cols, len(tgt))

    def _incoming(self, k: int, w: int) -> tuple[int, int]:
        """(degree, weight) of the block mapping into (k, w)."""
        raise NotImplementedError

    def homology_block(self, k: int, w: int) -> "HomologyBlock":
        ck = (k, w)
        if ck in self._hom:
            return self._hom[ck]
        block = self.block(k, w)
        out_mat = self.differential_matrix(k, w)
        kernel = kernel_basis(out_mat) if len(block) else []
        ik, iw = self._incoming(k, w)
        images = []
        if self._valid_degree(ik):
            _, _, cols = self.differential_columns(ik, iw)
            images = [c for c in cols if c]
        dim = quotient_dimension(images, kernel)
        ech = Echelon(track=True)
        for v in images:
            ech.add(v)
        n_img = ech.count
        reps = []
        rep_index = {}
        for v in kernel:
            idx = ech.count
            if ech.add(v):
                rep_index[idx] = len(reps)
                reps.append({i: x for i, x in enumerate(v) if x})
        assert len(reps) == dim
        hb = HomologyBlock(k, w, block, reps, ech, n_img, dim, self, rep_index)
        self._hom[ck] = hb
        return hb


@dataclass
class HomologyBlock:
    degree: int
    weight: int
    block: Block
    representatives: list  # sparse vectors
    echelon: Echelon
    image_count: int
    dim: int
    complex: _Complex
    rep_index: dict  # insertion index in echelon -> representative position

    def representative_elements(self) -> list:
        nv = self.complex.lr.nvars
        return [self.block.element(v, self.complex.kind, nv) for v in self.representatives]

    def class_coordinates(self, elem_or_vec) -> list[Fraction]:
        """Coordinates of a cycle's class on the representatives; raises if not a cycle."""
        vec = elem_or_vec if isinstance(elem_or_vec, dict) else self.complex.to_vector(elem_or_vec, self.block)
        combo = self.echelon.express(vec)
        if combo is None:
            raise ValueError("vector is not a cycle of this block")
        coords = [Fraction(0)] * self.dim
        for idx, x in combo.items():
            if idx in self.rep_index:
                coords[self.rep_index[idx]] = x
        return coords

    def is_boundary(self, elem_or_vec) -> bool:
        coords = self.class_coordinates(elem_or_vec)
        return not any(coords)


class CochainComplex(_Complex):
    kind = Cochain

    def __init__(self, lr, module, max_weight=None):
        module.check_side("left", "cochain coefficients")
        super().__init__(lr, module, max_weight)

    def _keys(self, k):
        for I in itertools.combinations(range(self.lr.rank), k):
            for l in range(self.module.rank):
                yield (I, l)

    def _key_offset(self, key):
        I, l = key
        return self.module.generator_weights[l] - sum(self.lr.basis_weights[i] for i in I)

    def _apply(self, elem):
        return ce_differential(self.lr, self.module, elem)

    def _target_degree(self, k):
        return k + 1

    def _incoming(self, k, w):
        return k - 1, self.source_weight(w)


class ChainComplex(_Complex):
    kind = Chain

    def __init__(self, lr, module, max_weight=None):
        module.check_side("right", "chain coefficients")
        super().__init__(lr, module, max_weight)

    def _keys(self, k):
        for l in range(self.module.rank):
            for J in itertools.combinations(range(self.lr.rank), k):
                yield (l, J)

    def _key_offset(self, key):
        l, J = key
        return self.module.generator_weights[l] + sum(self.lr.basis_weights[j] for j in J)

    def _apply(self, elem):
        return rinehart_boundary(self.lr, self.module, elem)

    def _target_degree(self, k):
        return k - 1

    def _incoming(self, k, w):
        return k + 1, self.source_weight(w)


@dataclass
class CohomologyReport:
    """Per-(degree, weight) dimensions and representatives.

    When ``truncated`` is set the weight key means "all weights <= w" and the
    dimensions are those of the projected, truncated complex.
    """

    kind: str  # "cohomology" or "homology"
    table: dict  # (k, w) -> HomologyBlock
    truncated: bool
    shift: int | None

    def dim(self, k: int, w: int) -> int:
        return self.table[(k, w)].dim

    def dims(self) -> dict:
        return {key: hb.dim for key, hb in sorted(self.table.items())}

    def representatives(self, k: int, w: int) -> list:
        return self.table[(k, w)].representative_elements()


def _report(cx: _Complex, kind: str, degrees: Iterable[int], weights: Iterable[int]) -> CohomologyReport:
    table = {}
    for k in degrees:
        for w in weights:
            table[(k, w)] = cx.homology_block(k, w)
    return CohomologyReport(kind, table, cx.truncated, cx.shift)


def cohomology(lr: LRPresentation, m: ModulePresentation, degrees: Iterable[int] | None = None,
               weights: Iterable[int] = range(0, 1)) -> CohomologyReport:
    cx = CochainComplex(lr, m)
    if degrees is None:
        degrees = range(lr.rank + 1)
    return _report(cx, "cohomology", list(degrees), list(weights))


def homology(lr: LRPresentation, n: ModulePresentation, degrees: Iterable[int] | None = None,
             weights: Iterable[int] = range(0, 1)) -> CohomologyReport:
    cx = ChainComplex(lr, n)
    if degrees is None:
        degrees = range(lr.rank + 1)
    return _report(cx, "homology", list(degrees), list(weights))
