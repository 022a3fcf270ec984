"""Poisson algebras Q[x_1..x_m]: the algebroid of differentials, modular classes, doubling.

The algebroid D has basis dx_1..dx_m with anchor rho(dx_i) = {x_i, .} and
bracket [dx_i, dx_j] = d{x_i, x_j}.  The generator dx_i gets weight
wt(x_i) - 1, so that a bracket homogeneous of polynomial degree d has
structure shift d - 1 (linear brackets are shift 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .complexes import Cochain, CochainComplex, ce_differential, cohomology, homology, lie_derivative
from .core import (
    LRPresentation,
    ModulePresentation,
    dualizing_module,
    hom_right_right,
    omega_module,
    trivial_module,
)
from .duality import top_cochain
from .poly import Derivation, Poly, WeightGrading, default_names, parse_poly

__all__ = [
    "PoissonPresentation",
    "JacobiViolation",
    "NotProportional",
    "DoublingViolation",
    "ModularData",
    "DoublingReport",
    "build_d",
    "right_module_a",
    "modular_vector_field",
    "divergence_oracle",
    "modular_cocycle_lr",
    "poisson_modular_cocycle",
    "modular_data",
    "doubling_check",
    "poisson_cohomology",
    "poisson_homology",
    "vector_field_cochain",
    "symplectic_plane",
    "linear_plane",
    "lie_poisson",
    "trivial_poisson",
]


class JacobiViolation(ValueError):
    def __init__(self, message: str, witness: tuple):
        super().__init__(message)
        self.witness = witness


class NotProportional(ValueError):
    pass


class DoublingViolation(AssertionError):
    pass


@dataclass(frozen=True)
class PoissonPresentation:
    variables: tuple[str, ...]
    grading: WeightGrading
    bracket_table: dict  # (i, j) with i < j -> Poly

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        table = {}
        for (i, j), p in dict(self.bracket_table).items():
            if not (0 <= i < j < len(self.variables)):
                raise ValueError(f"bracket key {(i, j)} must satisfy i < j")
            if p.terms:
                table[(i, j)] = p
        object.__setattr__(self, "bracket_table", table)

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self.bracket_table.items()))))

    @classmethod
    def from_strings(cls, variables: Sequence[str], brackets: Mapping[tuple[str, str], str],
                     weights: Sequence[int] | None = None) -> "PoissonPresentation":
        variables = tuple(variables)
        grading = WeightGrading(tuple(weights)) if weights else WeightGrading.standard(len(variables))
        table = {}
        for (a, b), text in brackets.items():
            i, j = variables.index(a), variables.index(b)
            p = parse_poly(text, variables)
            if i > j:
                i, j, p = j, i, -p
            if i == j:
                raise ValueError(f"bracket of {a} with itself must vanish")
            table[(i, j)] = table.get((i, j), Poly.zero(len(variables))) + p
        return cls(variables, grading, table)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def p(self, i: int, j: int) -> Poly:
        if i == j:
            return Poly.zero(self.nvars)
        if i < j:
            return self.bracket_table.get((i, j), Poly.zero(self.nvars))
        return -self.bracket_table.get((j, i), Poly.zero(self.nvars))

    def hamiltonian(self, u: Poly) -> Derivation:
        """X_u = {u, .} = sum_{a,b} p_ab d_a(u) d/dx_b."""
        m = self.nvars
        coeffs = []
        for b in range(m):
            c = Poly.zero(m)
            for a in range(m):
                pa = self.p(a, b)
                if pa.terms:
                    c = c + pa * u.diff(a)
            coeffs.append(c)
        return Derivation(tuple(coeffs))

    def bracket(self, f: Poly, g: Poly) -> Poly:
        return self.hamiltonian(f)(g)

    def jacobi_failures(self) -> list[tuple[tuple[int, int, int], Poly]]:
        out = []
        m = self.nvars
        xs = [Poly.var(i, m) for i in range(m)]
        for i, j, k in itertools.combinations(range(m), 3):
            jac = (self.bracket(xs[i], self.bracket(xs[j], xs[k]))
                   + self.bracket(xs[j], self.bracket(xs[k], xs[i]))
                   + self.bracket(xs[k], self.bracket(xs[i], xs[j])))
            if jac.terms:
                out.append(((i, j, k), jac))
        return out


def symplectic_plane() -> PoissonPresentation:
    return PoissonPresentation.from_strings(["x", "y"], {("x", "y"): "1"})


def linear_plane() -> PoissonPresentation:
    return PoissonPresentation.from_strings(["x", "y"], {("x", "y"): "x"})


def trivial_poisson(n: int) -> PoissonPresentation:
    names = default_names(n)
    return PoissonPresentation(tuple(names), WeightGrading.standard(n), {})


def lie_poisson(g: LRPresentation, names: Sequence[str] | None = None) -> PoissonPresentation:
    """{x_i, x_j} = sum_k c_ij^k x_k on the dual of a Lie algebra over Q."""
    n = g.rank
    names = tuple(names) if names else tuple(default_names(n))
    table = {}
    for (i, j), vec in g.bracket.items():
        p = Poly.zero(n)
        for k, c in enumerate(vec):
            if c.terms:
                p = p + Poly.var(k, n) * c.constant_term()
        table[(i, j)] = p
    return PoissonPresentation(names, WeightGrading.standard(n), table)


def build_d(p: PoissonPresentation) -> LRPresentation:
    """The algebroid of differentials; raises JacobiViolation with the first bad triple."""
    failures = p.jacobi_failures()
    if failures:
        (i, j, k), jac = failures[0]
        names = p.variables
        raise JacobiViolation(
            f"Jacobi fails for ({names[i]}, {names[j]}, {names[k]}): {jac.to_string(names)}", (i, j, k))
    return _build_d_unchecked(p)


def _build_d_unchecked(p: PoissonPresentation) -> LRPresentation:
    m = p.nvars
    anchor = tuple(Derivation(tuple(p.p(i, j) for j in range(m))) for i in range(m))
    bracket = {}
    for (i, j), pij in p.bracket_table.items():
        bracket[(i, j)] = tuple(pij.diff(k) for k in range(m))
    weights = tuple(w - 1 for w in p.grading.variable_weights)
    return LRPresentation(p.variables, p.grading, tuple(f"d{v}" for v in p.variables), anchor, bracket,
                          weights, "D")


def right_module_a(p: PoissonPresentation, lr: LRPresentation | None = None) -> ModulePresentation:
    """A with the right action a (b du) = {ab, u}.

    In coordinates this is the zero connection: the right-module rule turns
    a . dx_i into -rho(dx_i)(a) = {a, x_i}.
    """
    lr = lr or build_d(p)
    z = Poly.zero(p.nvars)
    conn = tuple(((z,),) for _ in range(lr.rank))
    return ModulePresentation("right", 1, conn, (0,), "A_poisson")


def _top_basis_scalar(lr: LRPresentation, beta: Poly | None) -> Fraction:
    if beta is None:
        return Fraction(1)
    if not beta.is_constant() or beta.is_zero():
        raise NotProportional("the top form must be a nonzero constant multiple of dx_1 ^ ... ^ dx_m")
    return beta.constant_term()


def modular_vector_field(p: PoissonPresentation, beta: Poly | None = None) -> Derivation:
    """Phi with lambda_{du} beta = Phi(u) beta, read off on u = x_1..x_m.

    ``beta`` is the coefficient of the chosen top form against
    dx_1 ^ ... ^ dx_m; it must be a nonzero constant.  The Lie derivative
    on Lambda^m D is computed as minus the dual Lie derivative on the top
    cochain, so lambda_{dx_i} beta = -(lambda_{dx_i} phi_top)(dx_top) beta.
    """
    lr = build_d(p)
    _top_basis_scalar(lr, beta)
    A = trivial_module(lr)
    top = top_cochain(lr)
    key = (tuple(range(lr.rank)), 0)
    coeffs = []
    for i in range(lr.rank):
        lam = lie_derivative(lr, A, lr.basis_element(i), top)
        extra = [k for k in lam.coords if k != key]
        if extra:
            raise NotProportional("Lie derivative of the top form left the top degree")
        coeffs.append(-lam.get(key))
    return Derivation(tuple(coeffs))


def divergence_oracle(p: PoissonPresentation, u: Poly) -> Poly:
    """div X_u = sum_j d/dx_j {u, x_j}, independent of the algebroid machinery."""
    m = p.nvars
    total = Poly.zero(m)
    for j in range(m):
        total = total + p.bracket(u, Poly.var(j, m)).diff(j)
    return total


def vector_field_cochain(lr: LRPresentation, field: Derivation) -> Cochain:
    """The 1-cochain du -> field(u) on D, i.e. dx_i -> field(x_i)."""
    return Cochain(1, {((i,), 0): c for i, c in enumerate(field.coefficients)}, lr.nvars)


def _connection_cochain(lr: LRPresentation, q: ModulePresentation) -> Cochain:
    if q.rank != 1 or q.side != "left":
        raise ValueError("expected a rank-one left module")
    return Cochain(1, {((i,), 0): q.connection[i][0][0] for i in range(lr.rank)}, lr.nvars)


def modular_cocycle_lr(lr: LRPresentation) -> Cochain:
    """Connection 1-cocycle of Hom_A(C_L, omega_A): e_i -> tr ad(e_i) + div rho(e_i)."""
    q = hom_right_right(lr, dualizing_module(lr), omega_module(lr))
    return _connection_cochain(lr, q)


def poisson_modular_cocycle(p: PoissonPresentation, lr: LRPresentation | None = None) -> Cochain:
    """Connection 1-cocycle of Hom_A(C, A_poisson) on D."""
    lr = lr or build_d(p)
    q = hom_right_right(lr, dualizing_module(lr), right_module_a(p, lr))
    return _connection_cochain(lr, q)


def _class_in_h1(lr: LRPresentation, c: Cochain) -> list[Fraction] | None:
    shift = lr.structure_shift()
    if shift is None:
        return None
    hb = CochainComplex(lr, trivial_module(lr)).homology_block(1, shift)
    return hb.class_coordinates(c)


@dataclass
class ModularData:
    modular_vector_field: Derivation | None
    lr_modular_cocycle: Cochain
    class_in_h1: list[Fraction] | None
    class_in_script_h1: Cochain
    closed: bool


def modular_data(lr: LRPresentation, p: PoissonPresentation | None = None) -> ModularData:
    cocycle = modular_cocycle_lr(lr)
    closed = ce_differential(lr, trivial_module(lr), cocycle).is_zero()
    field = modular_vector_field(p) if p is not None else None
    return ModularData(field, cocycle, _class_in_h1(lr, cocycle) if closed else None, cocycle, closed)


@dataclass
class DoublingReport:
    lr_cocycle: Cochain
    poisson_cocycle: Cochain
    vector_field: Derivation
    cochain_equal: bool
    class_equal: bool

    @property
    def holds(self) -> bool:
        return self.cochain_equal and self.class_equal


def doubling_check(p: PoissonPresentation, strict: bool = True) -> DoublingReport:
    """Compare the cocycle of Q_D with twice the modular vector field cochain."""
    lr = build_d(p)
    q_d = modular_cocycle_lr(lr)
    field = modular_vector_field(p)
    phi = vector_field_cochain(lr, field)
    twice = phi.times(2)
    cochain_equal = q_d == twice
    diff = q_d - twice
    class_equal = cochain_equal
    if lr.structure_shift() is not None and ce_differential(lr, trivial_module(lr), diff).is_zero():
        class_equal = not any(_class_in_h1(lr, diff))
    report = DoublingReport(q_d, poisson_modular_cocycle(p, lr), field, cochain_equal, class_equal)
    if strict and not report.holds:
        raise DoublingViolation("cocycle of Q_D differs from twice the modular vector field")
    return report


def poisson_cohomology(p: PoissonPresentation, weights: Iterable[int], degrees: Iterable[int] | None = None):
    lr = build_d(p)
    return cohomology(lr, trivial_module(lr), degrees, weights)


def poisson_homology(p: PoissonPresentation, n: ModulePresentation | None, weights: Iterable[int],
                     degrees: Iterable[int] | None = None):
    lr = build_d(p)
    n = n or right_module_a(p, lr)
    return homology(lr, n, degrees, weights)
