"""Presentations of Lie-Rinehart algebras and of (A, L)-modules on free A-modules.

An :class:`LRPresentation` is a free A-module L on basis e_1..e_n with
polynomial structure functions ``[e_i, e_j] = sum_k c_ij^k e_k`` and an anchor
``rho(e_i)``.  Elements of L are tuples of n polynomials.  Brackets of general
elements are always evaluated with the Leibniz rule
``[alpha, a beta] = alpha(a) beta + a [alpha, beta]``.

Module coordinates
------------------
A left module with connection matrices Gamma_i acts by
``e_i . v = rho_i(v) + Gamma_i v``; a right module with matrices R_i acts by
``v . e_i = R_i v - rho_i(v)``.  Column k of a matrix is the image of the k-th
generator.  General elements act through the A-linearity rule for left modules
and ``x (a alpha) = a (x alpha) - alpha(a) x`` for right modules.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import Derivation, Poly, VariableMismatch, WeightGrading, default_names

__all__ = [
    "LRPresentation",
    "ModulePresentation",
    "ValidationReport",
    "Failure",
    "SideMismatch",
    "ActionNotHomomorphism",
    "validate",
    "validate_module",
    "act_left",
    "act_right",
    "trivial_module",
    "tensor_left",
    "hom_left_left",
    "hom_right_right",
    "tensor_right_left",
    "hom_left_right",
    "dualizing_module",
    "a_tensor_g",
    "induced_module",
    "opposite_module",
    "derivations_algebra",
    "pullback_right",
    "omega_module",
    "change_basis",
]


class SideMismatch(ValueError):
    pass


class ActionNotHomomorphism(ValueError):
    pass


Matrix = tuple  # tuple of tuples of Poly


def _zero_matrix(m: int, nvars: int):
    z = Poly.zero(nvars)
    return tuple(tuple(z for _ in range(m)) for _ in range(m))


def _freeze(mat) -> Matrix:
    return tuple(tuple(row) for row in mat)


@dataclass(frozen=True)
class LRPresentation:
    variables: tuple[str, ...]
    grading: WeightGrading
    basis: tuple[str, ...]
    anchor: tuple[Derivation, ...]
    bracket: dict  # (i, j) with i < j -> tuple of n Poly
    basis_weights: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "anchor", tuple(self.anchor))
        n = len(self.basis)
        if not self.basis_weights:
            object.__setattr__(self, "basis_weights", (0,) * n)
        object.__setattr__(self, "basis_weights", tuple(int(w) for w in self.basis_weights))
        if len(self.basis_weights) != n or len(self.anchor) != n:
            raise ValueError("basis, anchor and basis_weights must have equal length")
        nv = len(self.variables)
        if self.grading.nvars != nv:
            raise VariableMismatch("grading does not match variable list")
        for d in self.anchor:
            if d.nvars != nv:
                raise VariableMismatch("anchor derivation on wrong variable count")
        table = {}
        for (i, j), vec in dict(self.bracket).items():
            vec = tuple(vec)
            if not (0 <= i < j < n):
                raise ValueError(f"bracket key {(i, j)} must satisfy 0 <= i < j < {n}")
            if len(vec) != n or any(c.nvars != nv for c in vec):
                raise ValueError(f"bracket value for {(i, j)} has wrong shape")
            if any(not c.is_zero() for c in vec):
                table[(i, j)] = vec
        object.__setattr__(self, "bracket", table)

    def __hash__(self):
        return hash((self.variables, self.basis, self.anchor,
                     tuple(sorted(self.bracket.items())), self.basis_weights))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def rank(self) -> int:
        return len(self.basis)

    # elements -----------------------------------------------------------
    def zero(self) -> tuple:
        return tuple(Poly.zero(self.nvars) for _ in self.basis)

    def basis_element(self, i: int) -> tuple:
        return tuple(Poly.one(self.nvars) if j == i else Poly.zero(self.nvars) for j in range(self.rank))

    def bracket_basis(self, i: int, j: int) -> tuple:
        if i == j:
            return self.zero()
        if i < j:
            return self.bracket.get((i, j), self.zero())
        return tuple(-c for c in self.bracket.get((j, i), self.zero()))

    def anchor_of(self, alpha: Sequence[Poly]) -> Derivation:
        total = Derivation.zero(self.nvars)
        for a, d in zip(alpha, self.anchor):
            if a.terms:
                total = total + d.times(a)
        return total

    def bracket_of(self, alpha: Sequence[Poly], beta: Sequence[Poly]) -> tuple:
        """[alpha, beta] for general elements via the Leibniz extension."""
        n = self.rank
        out = list(self.zero())
        rho_a = self.anchor_of(alpha)
        rho_b = self.anchor_of(beta)
        for j in range(n):
            # alpha(b_j) e_j - beta(a_j) e_j
            out[j] = out[j] + rho_a(beta[j]) - rho_b(alpha[j])
        for i in range(n):
            if not alpha[i].terms:
                continue
            for j in range(n):
                if i == j or not beta[j].terms:
                    continue
                c = self.bracket_basis(i, j)
                ab = alpha[i] * beta[j]
                for k in range(n):
                    if c[k].terms:
                        out[k] = out[k] + ab * c[k]
        return tuple(out)

    def names(self) -> list[str]:
        return list(self.variables) or []

    # grading ------------------------------------------------------------
    def structure_shift(self) -> int | None:
        """The common weight shift s of anchor and bracket, None if inhomogeneous.

        Homogeneity means rho(e_i) raises weight by s + w_i and c_ij^k has
        weight s + w_i + w_j - w_k.
        """
        shifts = set()
        g = self.grading
        w = self.basis_weights
        for i, d in enumerate(self.anchor):
            for v, c in enumerate(d.coefficients):
                for e in c.terms:
                    shifts.add(g.degree(e) - g.variable_weights[v] - w[i])
        for (i, j), vec in self.bracket.items():
            for k, c in enumerate(vec):
                for e in c.terms:
                    shifts.add(g.degree(e) - w[i] - w[j] + w[k])
        if len(shifts) > 1:
            return None
        return shifts.pop() if shifts else 0

    @property
    def homogeneous(self) -> bool:
        return self.structure_shift() is not None

    def describe_element(self, alpha: Sequence[Poly]) -> str:
        names = self.variables
        parts = []
        for c, b in zip(alpha, self.basis):
            if c.is_zero():
                continue
            if c == 1:
                parts.append(b)
            elif c == -1:
                parts.append(f"-{b}")
            elif len(c.terms) == 1:
                parts.append(f"{c.to_string(names)}*{b}")
            else:
                parts.append(f"({c.to_string(names)})*{b}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ModulePresentation:
    side: str
    rank: int
    connection: tuple  # one m x m matrix of Poly per L-basis element
    generator_weights: tuple[int, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        conn = tuple(_freeze(m) for m in self.connection)
        object.__setattr__(self, "connection", conn)
        if not self.generator_weights:
            object.__setattr__(self, "generator_weights", (0,) * self.rank)
        object.__setattr__(self, "generator_weights", tuple(int(g) for g in self.generator_weights))
        if len(self.generator_weights) != self.rank:
            raise ValueError("one generator weight per module generator")
        for mat in conn:
            if len(mat) != self.rank or any(len(r) != self.rank for r in mat):
                raise ValueError("connection matrices must be rank x rank")

    def __hash__(self):
        return hash((self.side, self.rank, self.connection, self.generator_weights))

    def check_side(self, side: str, what: str = "module"):
        if self.side != side:
            raise SideMismatch(f"{what} must be a {side} module, got {self.side}")

    def matrix(self, i: int):
        return self.connection[i]

    def is_homogeneous(self, lr: LRPresentation, shift: int | None = None) -> bool:
        if shift is None:
            shift = lr.structure_shift()
        if shift is None:
            return False
        g = lr.grading
        gw = self.generator_weights
        for i, mat in enumerate(self.connection):
            for l, row in enumerate(mat):
                for k, c in enumerate(row):
                    for e in c.terms:
                        if g.degree(e) != shift + lr.basis_weights[i] + gw[k] - gw[l]:
                            return False
        return True


def _check_compatible(lr: LRPresentation, m: ModulePresentation):
    if len(m.connection) != lr.rank:
        raise ValueError(f"module {m.name or ''} has {len(m.connection)} connection matrices, L has rank {lr.rank}")
    for mat in m.connection:
        for row in mat:
            for c in row:
                if c.nvars != lr.nvars:
                    raise VariableMismatch("module entries live in a different polynomial ring")


def _matvec(mat, v):
    out = []
    for row in mat:
        s = None
        for a, x in zip(row, v):
            if a.terms and x.terms:
                s = a * x if s is None else s + a * x
        out.append(s if s is not None else Poly.zero(v[0].nvars if v else 0))
    return out


def act_left(lr: LRPresentation, m: ModulePresentation, alpha: Sequence[Poly], v: Sequence[Poly]) -> tuple:
    """alpha . v for a left module, alpha a general element of L."""
    out = [Poly.zero(lr.nvars) for _ in range(m.rank)]
    for i, a in enumerate(alpha):
        if not a.terms:
            continue
        rho = lr.anchor[i]
        gv = _matvec(m.connection[i], v)
        for k in range(m.rank):
            out[k] = out[k] + a * (rho(v[k]) + gv[k])
    return tuple(out)


def act_right(lr: LRPresentation, m: ModulePresentation, v: Sequence[Poly], alpha: Sequence[Poly]) -> tuple:
    """v . alpha for a right module, using x(a alpha) = a(x alpha) - alpha(a) x."""
    out = [Poly.zero(lr.nvars) for _ in range(m.rank)]
    for i, a in enumerate(alpha):
        if not a.terms:
            continue
        rho = lr.anchor[i]
        rv = _matvec(m.connection[i], v)
        ra = rho(a)
        for k in range(m.rank):
            out[k] = out[k] + a * (rv[k] - rho(v[k])) - ra * v[k]
    return tuple(out)


# validation ----------------------------------------------------------------

@dataclass(frozen=True)
class Failure:
    kind: str
    witness: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    failures: list[Failure] = field(default_factory=list)
    homogeneous: bool = True
    shift: int | None = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> set[str]:
        return {f.kind for f in self.failures}


def _random_poly(rng: random.Random, nvars: int, max_deg: int = 2, terms: int = 3) -> Poly:
    out = {}
    for _ in range(terms):
        e = tuple(rng.randint(0, max_deg) for _ in range(nvars))
        out[e] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return Poly(nvars, out)


def _random_element(rng, lr: LRPresentation) -> tuple:
    return tuple(_random_poly(rng, lr.nvars, 1, 2) for _ in range(lr.rank))


def validate(lr: LRPresentation, seed: int = 0, samples: int = 3) -> ValidationReport:
    """Check Jacobi, anchor homomorphism and the Leibniz rules; failures are data."""
    report = ValidationReport()
    n = lr.rank
    for i, j, k in itertools.combinations(range(n), 3):
        ei, ej, ek = lr.basis_element(i), lr.basis_element(j), lr.basis_element(k)
        jac = [Poly.zero(lr.nvars)] * n
        for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
            t = lr.bracket_of(a, lr.bracket_of(b, c))
            jac = [x + y for x, y in zip(jac, t)]
        if any(x.terms for x in jac):
            report.failures.append(Failure("jacobi", (i, j, k), lr.describe_element(jac)))
    for i, j in itertools.combinations(range(n), 2):
        lhs = lr.anchor_of(lr.bracket_basis(i, j))
        rhs = lr.anchor[i].bracket(lr.anchor[j])
        if lhs != rhs:
            report.failures.append(Failure(
                "anchor-homomorphism", (i, j),
                f"rho([{lr.basis[i]},{lr.basis[j]}]) = {lhs.to_string(lr.variables)} "
                f"but [rho({lr.basis[i]}), rho({lr.basis[j]})] = {rhs.to_string(lr.variables)}"))
    rng = random.Random(seed)
    for _ in range(samples if lr.nvars else 1):
        alpha, beta = _random_element(rng, lr), _random_element(rng, lr)
        a = _random_poly(rng, lr.nvars)
        lhs = lr.bracket_of(alpha, tuple(a * b for b in beta))
        rhs = tuple(lr.anchor_of(alpha)(a) * b + a * c for b, c in zip(beta, lr.bracket_of(alpha, beta)))
        if lhs != rhs:
            report.failures.append(Failure("leibniz", (), "[alpha, a beta] != alpha(a) beta + a [alpha, beta]"))
            break
        anti = lr.bracket_of(beta, alpha)
        if any((x + y).terms for x, y in zip(lr.bracket_of(alpha, beta), anti)):
            report.failures.append(Failure("antisymmetry", (), "[alpha, beta] != -[beta, alpha]"))
            break
    report.shift = lr.structure_shift()
    report.homogeneous = report.shift is not None
    return report


def curvature(lr: LRPresentation, m: ModulePresentation, i: int, j: int):
    """Curvature matrix of the pair (i, j); zero for a flat module."""
    cols = []
    eij = lr.bracket_basis(i, j)
    ei, ej = lr.basis_element(i), lr.basis_element(j)
    for k in range(m.rank):
        f = tuple(Poly.one(lr.nvars) if l == k else Poly.zero(lr.nvars) for l in range(m.rank))
        if m.side == "left":
            a = act_left(lr, m, ei, act_left(lr, m, ej, f))
            b = act_left(lr, m, ej, act_left(lr, m, ei, f))
            c = act_left(lr, m, eij, f)
        else:
            a = act_right(lr, m, act_right(lr, m, f, ei), ej)
            b = act_right(lr, m, act_right(lr, m, f, ej), ei)
            c = act_right(lr, m, f, eij)
        cols.append(tuple(x - y - z for x, y, z in zip(a, b, c)))
    return tuple(tuple(cols[k][l] for k in range(m.rank)) for l in range(m.rank))


def validate_module(lr: LRPresentation, m: ModulePresentation) -> ValidationReport:
    report = ValidationReport()
    _check_compatible(lr, m)
    for i, j in itertools.combinations(range(lr.rank), 2):
        K = curvature(lr, m, i, j)
        if any(c.terms for row in K for c in row):
            txt = "; ".join(", ".join(c.to_string(lr.variables) for c in row) for row in K)
            report.failures.append(Failure("curvature", (i, j), f"[{txt}]"))
    report.shift = lr.structure_shift()
    report.homogeneous = report.shift is not None and m.is_homogeneous(lr, report.shift)
    return report


# constructions -------------------------------------------------------------

def _poly_matrix(lr, rows, cols):
    z = Poly.zero(lr.nvars)
    return [[z] * cols for _ in range(rows)]


def trivial_module(lr: LRPresentation, side: str = "left", name: str = "A") -> ModulePresentation:
    """A itself: the anchor action on the left, or zero connection on the right."""
    return ModulePresentation(side, 1, tuple(_zero_matrix(1, lr.nvars) for _ in range(lr.rank)), (0,), name)


def tensor_left(lr: LRPresentation, m1: ModulePresentation, m2: ModulePresentation) -> ModulePresentation:
    """M1 (x)_A M2 with the diagonal action; basis index a * m2 + b."""
    m1.check_side("left", "first factor")
    m2.check_side("left", "second factor")
    r1, r2 = m1.rank, m2.rank
    conn = []
    for i in range(lr.rank):
        G = _poly_matrix(lr, r1 * r2, r1 * r2)
        G1, G2 = m1.connection[i], m2.connection[i]
        for a in range(r1):
            for b in range(r2):
                row = a * r2 + b
                for a2 in range(r1):
                    if G1[a][a2].terms:
                        G[row][a2 * r2 + b] = G[row][a2 * r2 + b] + G1[a][a2]
                for b2 in range(r2):
                    if G2[b][b2].terms:
                        G[row][a * r2 + b2] = G[row][a * r2 + b2] + G2[b][b2]
        conn.append(G)
    weights = tuple(g1 + g2 for g1 in m1.generator_weights for g2 in m2.generator_weights)
    return ModulePresentation("left", r1 * r2, tuple(conn), weights, f"{m1.name}(x){m2.name}")


def _hom_index(l, k, r1):
    # matrix entry P[l][k] (image generator l, source generator k)
    return l * r1 + k


def hom_left_left(lr: LRPresentation, m1: ModulePresentation, m2: ModulePresentation) -> ModulePresentation:
    """Hom_A(M1, M2) with (alpha phi)(m) = alpha(phi m) - phi(alpha m)."""
    m1.check_side("left", "source")
    m2.check_side("left", "target")
    r1, r2 = m1.rank, m2.rank
    conn = []
    for i in range(lr.rank):
        G = _poly_matrix(lr, r1 * r2, r1 * r2)
        G1, G2 = m1.connection[i], m2.connection[i]
        for l in range(r2):
            for k in range(r1):
                row = _hom_index(l, k, r1)
                for j in range(r2):
                    if G2[l][j].terms:
                        col = _hom_index(j, k, r1)
                        G[row][col] = G[row][col] + G2[l][j]
                for j in range(r1):
                    if G1[j][k].terms:
                        col = _hom_index(l, j, r1)
                        G[row][col] = G[row][col] - G1[j][k]
        conn.append(G)
    weights = tuple(m2.generator_weights[l] - m1.generator_weights[k] for l in range(r2) for k in range(r1))
    return ModulePresentation("left", r1 * r2, tuple(conn), weights, f"Hom({m1.name},{m2.name})")


def hom_right_right(lr: LRPresentation, n1: ModulePresentation, n2: ModulePresentation) -> ModulePresentation:
    """Hom_A(N1, N2) with the left structure (alpha phi)(n) = phi(n alpha) - (phi n) alpha."""
    n1.check_side("right", "source")
    n2.check_side("right", "target")
    r1, r2 = n1.rank, n2.rank
    conn = []
    for i in range(lr.rank):
        G = _poly_matrix(lr, r1 * r2, r1 * r2)
        R1, R2 = n1.connection[i], n2.connection[i]
        for l in range(r2):
            for k in range(r1):
                row = _hom_index(l, k, r1)
                for j in range(r1):
                    if R1[j][k].terms:
                        col = _hom_index(l, j, r1)
                        G[row][col] = G[row][col] + R1[j][k]
                for j in range(r2):
                    if R2[l][j].terms:
                        col = _hom_index(j, k, r1)
                        G[row][col] = G[row][col] - R2[l][j]
        conn.append(G)
    weights = tuple(n2.generator_weights[l] - n1.generator_weights[k] for l in range(r2) for k in range(r1))
    return ModulePresentation("left", r1 * r2, tuple(conn), weights, f"Hom({n1.name},{n2.name})")


def tensor_right_left(lr: LRPresentation, n: ModulePresentation, m: ModulePresentation) -> ModulePresentation:
    """N (x)_A M with (n (x) m) alpha = n alpha (x) m - n (x) alpha m."""
    n.check_side("right", "first factor")
    m.check_side("left", "second factor")
    r1, r2 = n.rank, m.rank
    conn = []
    for i in range(lr.rank):
        G = _poly_matrix(lr, r1 * r2, r1 * r2)
        R, Gm = n.connection[i], m.connection[i]
        for a in range(r1):
            for b in range(r2):
                row = a * r2 + b
                for a2 in range(r1):
                    if R[a][a2].terms:
                        G[row][a2 * r2 + b] = G[row][a2 * r2 + b] + R[a][a2]
                for b2 in range(r2):
                    if Gm[b][b2].terms:
                        G[row][a * r2 + b2] = G[row][a * r2 + b2] - Gm[b][b2]
        conn.append(G)
    weights = tuple(g1 + g2 for g1 in n.generator_weights for g2 in m.generator_weights)
    return ModulePresentation("right", r1 * r2, tuple(conn), weights, f"{n.name}(x){m.name}")


def hom_left_right(lr: LRPresentation, m: ModulePresentation, n: ModulePresentation) -> ModulePresentation:
    """Hom_A(M, N) with the right structure (phi alpha)(m) = (phi m) alpha + phi(alpha m).

    The plus sign is what makes phi alpha A-linear and evaluation
    Hom_A(M, N) (x) M -> N a map of right modules.
    """
    m.check_side("left", "source")
    n.check_side("right", "target")
    r1, r2 = m.rank, n.rank
    conn = []
    for i in range(lr.rank):
        G = _poly_matrix(lr, r1 * r2, r1 * r2)
        Gm, R = m.connection[i], n.connection[i]
        for l in range(r2):
            for k in range(r1):
                row = _hom_index(l, k, r1)
                for j in range(r2):
                    if R[l][j].terms:
                        col = _hom_index(j, k, r1)
                        G[row][col] = G[row][col] + R[l][j]
                for j in range(r1):
                    if Gm[j][k].terms:
                        col = _hom_index(l, j, r1)
                        G[row][col] = G[row][col] + Gm[j][k]
        conn.append(G)
    weights = tuple(n.generator_weights[l] - m.generator_weights[k] for l in range(r2) for k in range(r1))
    return ModulePresentation("right", r1 * r2, tuple(conn), weights, f"Hom({m.name},{n.name})")


def dualizing_module(lr: LRPresentation) -> ModulePresentation:
    """C_L = Hom_A(Lambda^n L, A) with phi alpha = -lambda_alpha(phi).

    For phi dual to e_1 ^ ... ^ e_n the Lie derivative formula gives
    (lambda_{e_i} phi)(e_1, ..., e_n) = -sum_j phi(..., [e_i, e_j], ...) = -tr ad(e_i),
    so the generator is acted on by tr ad(e_i) = sum_j c_ij^j.
    """
    conn = []
    for i in range(lr.rank):
        tr = Poly.zero(lr.nvars)
        for j in range(lr.rank):
            tr = tr + lr.bracket_basis(i, j)[j]
        conn.append(((tr,),))
    return ModulePresentation("right", 1, tuple(conn), (-sum(lr.basis_weights),), "C")


def change_basis(lr: LRPresentation, P: Sequence[Sequence]) -> LRPresentation:
    """New basis e'_i = sum_j P[i][j] e_j for an invertible rational matrix P."""
    from .linalg import SparseMatrixQ, solve

    n = lr.rank
    nv = lr.nvars
    rows = [[Fraction(x) for x in r] for r in P]
    new_elems = [tuple(Poly.const(rows[i][j], nv) for j in range(n)) for i in range(n)]
    # coordinates in the new basis: solve P^T y = x for constant-coefficient parts
    PT = SparseMatrixQ.from_rows([[rows[j][i] for j in range(n)] for i in range(n)], n)
    inv_cols = []
    for k in range(n):
        e = [Fraction(0)] * n
        e[k] = Fraction(1)
        y = solve(PT, e)
        if y is None:
            raise ValueError("change of basis matrix is singular")
        inv_cols.append(y)

    def to_new(vec):
        out = [Poly.zero(nv) for _ in range(n)]
        for k, c in enumerate(vec):
            if c.terms:
                for i, y in enumerate(inv_cols[k]):
                    if y:
                        out[i] = out[i] + c * y
        return tuple(out)

    bracket = {}
    for i, j in itertools.combinations(range(n), 2):
        bracket[(i, j)] = to_new(lr.bracket_of(new_elems[i], new_elems[j]))
    anchor = tuple(lr.anchor_of(e) for e in new_elems)
    weights = lr.basis_weights
    if len(set(weights)) > 1:
        raise ValueError("change_basis requires equal basis weights")
    return LRPresentation(lr.variables, lr.grading, tuple(f"{b}'" for b in lr.basis), anchor, bracket,
                          weights, lr.name + "'")


def a_tensor_g(g: LRPresentation, variables: Sequence[str], grading: WeightGrading,
               action: Sequence[Derivation], name: str = "") -> LRPresentation:
    """L = A (x) g for a Lie algebra g acting on A = Q[variables] by derivations.

    ``action[i]`` is the derivation by which e_i acts.  It must be a Lie
    homomorphism: [action_i, action_j] = sum_k c_ij^k action_k.
    """
    if g.nvars != 0:
        raise ValueError("g must be a Lie algebra over Q (no variables)")
    nv = len(variables)
    action = tuple(action)
    if len(action) != g.rank:
        raise ValueError("one derivation per basis element of g")
    bracket = {}
    for (i, j), vec in g.bracket.items():
        bracket[(i, j)] = tuple(Poly.const(c.constant_term(), nv) for c in vec)
    for i, j in itertools.combinations(range(g.rank), 2):
        lhs = action[i].bracket(action[j])
        rhs = Derivation.zero(nv)
        for k, c in enumerate(g.bracket_basis(i, j)):
            if c.terms:
                rhs = rhs + action[k].times(Poly.const(c.constant_term(), nv))
        if lhs != rhs:
            raise ActionNotHomomorphism(
                f"[rho(e{i + 1}), rho(e{j + 1})] = {lhs.to_string(list(variables))} "
                f"differs from rho([e{i + 1}, e{j + 1}]) = {rhs.to_string(list(variables))}")
    return LRPresentation(tuple(variables), grading, g.basis, action, bracket, g.basis_weights,
                          name or f"A(x){g.name}")


def induced_module(lr: LRPresentation, matrices: Sequence[Sequence[Sequence]],
                   generator_weights: Sequence[int] = (), name: str = "") -> ModulePresentation:
    """A (x) m for a g-module m given by rational matrices, one per basis element of g."""
    nv = lr.nvars
    conn = tuple(tuple(tuple(Poly.const(Fraction(x), nv) for x in row) for row in mat) for mat in matrices)
    r = len(conn[0]) if conn else 0
    return ModulePresentation("left", r, conn, tuple(generator_weights) or (0,) * r, name or "A(x)m")


def opposite_module(lr: LRPresentation, m: ModulePresentation) -> ModulePresentation:
    """Swap sides via y alpha = -alpha y on basis elements (R_i = -Gamma_i).

    This is the A (x) g rule; for a general Lie-Rinehart algebra the result
    need not be flat, so check it with validate_module.
    """
    side = "right" if m.side == "left" else "left"
    conn = tuple(tuple(tuple(-c for c in row) for row in mat) for mat in m.connection)
    return ModulePresentation(side, m.rank, conn, m.generator_weights, f"{m.name}^op")


def derivations_algebra(variables: Sequence[str], grading: WeightGrading) -> LRPresentation:
    """Der(A) for A = Q[variables]: basis d/dx_i, abelian, anchor the identity."""
    nv = len(variables)
    anchor = tuple(Derivation.partial(i, nv) for i in range(nv))
    weights = tuple(-w for w in grading.variable_weights)
    return LRPresentation(tuple(variables), grading, tuple(f"d/d{v}" for v in variables), anchor, {},
                          weights, "Der(A)")


def pullback_right(source: LRPresentation, n: ModulePresentation, lr: LRPresentation,
                   images: Sequence[Sequence[Poly]]) -> ModulePresentation:
    """Restrict a right source-module along a morphism lr -> source.

    ``images[i]`` is the image of e_i in source coordinates; the new matrices
    are read off from the action on the module generators.
    """
    n.check_side("right")
    conn = []
    nv = lr.nvars
    for img in images:
        cols = []
        for k in range(n.rank):
            f = tuple(Poly.one(nv) if l == k else Poly.zero(nv) for l in range(n.rank))
            cols.append(act_right(source, n, f, img))
        conn.append(tuple(tuple(cols[k][l] for k in range(n.rank)) for l in range(n.rank)))
    return ModulePresentation("right", n.rank, tuple(conn), n.generator_weights, n.name)


def omega_module(lr: LRPresentation) -> ModulePresentation:
    """omega_A = dualizing module of Der(A), as a right (A, L)-module via the anchor."""
    der = derivations_algebra(lr.variables, lr.grading)
    omega = dualizing_module(der)
    images = [tuple(d.coefficients) for d in lr.anchor]
    out = pullback_right(der, omega, lr, images)
    return ModulePresentation("right", 1, out.connection, (sum(lr.grading.variable_weights),), "omega_A")
