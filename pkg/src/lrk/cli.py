"""Command-line front end: ``lrk <command> <manifest> [options]``.

Exit codes: 0 success, 1 a mathematical check failed, 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any

from .complexes import ChainComplex, CochainComplex, multiplication_pairing
from .core import (
    LRPresentation,
    ModulePresentation,
    dualizing_module,
    tensor_right_left,
    trivial_module,
    validate,
    validate_module,
)
from .duality import (
    NotInvertible,
    cap_duality_map,
    duality_phi,
    fundamental_class,
    pairing_gram,
)
from .linalg import SparseMatrixQ, rank
from .manifest import Manifest, ManifestError, parse_manifest
from .poisson import DoublingViolation, doubling_check, modular_data, right_module_a
from .poly import format_rational

COMMANDS = ["validate", "cohomology", "homology", "duality-check", "modular", "pairing", "fundamental-class"]

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class MathFailure(Exception):
    pass


def _rat(q) -> str:
    return format_rational(Fraction(q))


def _form_key(lr: LRPresentation, idx: tuple) -> str:
    return "^".join(lr.basis[i] for i in idx) if idx else "1"


def _cochain_dict(lr: LRPresentation, c) -> dict:
    return {f"{_form_key(lr, I)}:{l}": p.to_string(lr.variables) for (I, l), p in sorted(c.coords.items())}


def _chain_dict(lr: LRPresentation, z) -> dict:
    return {f"{l}:{_form_key(lr, J)}": p.to_string(lr.variables) for (l, J), p in sorted(z.coords.items())}


def _matrix_rows(m: SparseMatrixQ) -> list:
    return [[_rat(x) for x in row] for row in m.to_dense()]


class Runner:
    def __init__(self, manifest: Manifest, args: argparse.Namespace):
        self.m = manifest
        self.lr = manifest.lr
        tasks = manifest.tasks
        self.max_degree = args.max_degree if args.max_degree is not None else tasks.get("max_degree", self.lr.rank)
        self.max_weight = args.max_weight if args.max_weight is not None else tasks.get("max_weight", 4)
        self.module_name = args.module if args.module is not None else tasks.get("module")
        self.format = args.format or tasks.get("format", "table")
        if self.format not in ("table", "structured"):
            raise UsageError(f"unknown format {self.format!r}")
        if not isinstance(self.max_degree, int) or not isinstance(self.max_weight, int):
            raise UsageError("max_degree and max_weight must be integers")
        self.max_degree = min(self.max_degree, self.lr.rank)

    # helpers ------------------------------------------------------------
    def module(self, default: str) -> ModulePresentation:
        name = self.module_name or default
        lr = self.lr
        if name in self.m.modules:
            return self.m.modules[name]
        if name == "A":
            return trivial_module(lr)
        if name == "C":
            return dualizing_module(lr)
        if name == "A_poisson":
            if self.m.poisson is None:
                raise UsageError("module A_poisson needs a [poisson] section")
            return right_module_a(self.m.poisson, lr)
        raise UsageError(f"unknown module {name!r}")

    def require_valid(self):
        if self.m.poisson is not None:
            bad = self.m.poisson.jacobi_failures()
            if bad:
                (i, j, k), _ = bad[0]
                v = self.m.variables
                raise MathFailure(f"Jacobi identity fails for ({v[i]}, {v[j]}, {v[k]})")
        rep = validate(self.lr)
        if not rep.ok:
            f = rep.failures[0]
            raise MathFailure(f"presentation invalid: {f.kind} at ({', '.join(self.lr.basis[i] for i in f.witness)})")

    def weights(self, cx) -> list[int]:
        lo = 0
        for k in range(self.max_degree + 1):
            for key in cx._keys(k):
                lo = min(lo, cx._key_offset(key))
        return list(range(lo, self.max_weight + 1))

    def header(self, cx) -> dict:
        return {"shift": cx.shift, "truncated": cx.truncated, "max_weight": self.max_weight,
                "max_degree": self.max_degree}

    # commands -----------------------------------------------------------
    def validate(self) -> tuple[dict, int]:
        lr = self.lr
        failures = []
        if self.m.poisson is not None:
            v = self.m.variables
            for (i, j, k), jac in self.m.poisson.jacobi_failures():
                failures.append({"kind": "poisson-jacobi", "witness": [v[i], v[j], v[k]],
                                 "detail": jac.to_string(v)})
        rep = validate(lr)
        for f in rep.failures:
            failures.append({"kind": f.kind, "witness": [lr.basis[i] for i in f.witness], "detail": f.detail})
        modules = {}
        if not failures:
            for name, mod in sorted(self.m.modules.items()):
                mr = validate_module(lr, mod)
                modules[name] = {"side": mod.side, "rank": mod.rank, "flat": mr.ok,
                                 "homogeneous": mr.homogeneous,
                                 "failures": [{"kind": f.kind, "witness": [lr.basis[i] for i in f.witness],
                                               "detail": f.detail} for f in mr.failures]}
        ok = not failures and all(v["flat"] for v in modules.values())
        data = {"command": "validate", "presentation": self.m.kind, "rank": lr.rank,
                "shift": rep.shift, "homogeneous": rep.homogeneous, "failures": failures,
                "modules": modules, "verdict": "all axioms hold" if ok else "axioms FAIL"}
        return data, EXIT_OK if ok else EXIT_MATH

    def _homology_table(self, cx, kind: str) -> dict:
        rows = []
        weights = self.weights(cx)
        for k in range(self.max_degree + 1):
            for w in weights:
                hb = cx.homology_block(k, w)
                reps = hb.representative_elements()
                fmt = _cochain_dict if kind == "cohomology" else _chain_dict
                rows.append({"degree": k, "weight": w, "dim": hb.dim,
                             "representatives": [fmt(self.lr, r) for r in reps]})
        return rows

    def cohomology(self):
        self.require_valid()
        mod = self.module("A")
        if mod.side != "left":
            raise UsageError("cohomology needs a left module")
        self._check_flat(mod)
        cx = CochainComplex(self.lr, mod)
        data = {"command": "cohomology", "module": mod.name or self.module_name or "A", **self.header(cx),
                "table": self._homology_table(cx, "cohomology")}
        return data, EXIT_OK

    def homology(self):
        self.require_valid()
        mod = self.module("C")
        if mod.side != "right":
            raise UsageError("homology needs a right module")
        self._check_flat(mod)
        cx = ChainComplex(self.lr, mod)
        data = {"command": "homology", "module": mod.name or self.module_name or "C", **self.header(cx),
                "table": self._homology_table(cx, "homology")}
        return data, EXIT_OK

    def _check_flat(self, mod):
        rep = validate_module(self.lr, mod)
        if not rep.ok:
            f = rep.failures[0]
            raise MathFailure(f"module {mod.name} is not flat: curvature at "
                              f"({self.lr.basis[f.witness[0]]}, {self.lr.basis[f.witness[1]]})")

    def duality_check(self):
        self.require_valid()
        lr = self.lr
        mod = self.module("A")
        if mod.side != "left":
            raise UsageError("duality-check needs a left module")
        self._check_flat(mod)
        cx = CochainComplex(lr, mod)
        if cx.truncated:
            raise MathFailure("duality check needs a weight-homogeneous presentation")
        fc = fundamental_class(lr)
        chx = ChainComplex(lr, tensor_right_left(lr, fc.module, mod))
        rows = []
        ok = fc.certified
        n = lr.rank
        for k in range(n + 1):
            for w in self.weights(cx):
                dc = cx.homology_block(k, w).dim
                dh = chx.homology_block(n - k, w).dim
                row = {"degree": k, "weight": w, "dim_cohomology": dc, "dim_homology": dh,
                       "dims_equal": dc == dh}
                if dc == dh:
                    cm = cap_duality_map(lr, mod, k, w, fc, strict=False)
                    ph = duality_phi(lr, mod, k, w, strict=False)
                    row["cap_invertible"] = rank(cm) == dc
                    row["phi_inverts_cap"] = ph.matmul(cm) == SparseMatrixQ.identity(dc)
                else:
                    row["cap_invertible"] = False
                    row["phi_inverts_cap"] = False
                ok = ok and row["dims_equal"] and row["cap_invertible"] and row["phi_inverts_cap"]
                rows.append(row)
        data = {"command": "duality-check", **self.header(cx), "fundamental_class_certified": fc.certified,
                "table": rows, "verdict": "PASS" if ok else "FAIL"}
        return data, EXIT_OK if ok else EXIT_MATH

    def modular(self):
        self.require_valid()
        lr = self.lr
        names = lr.variables
        if self.m.poisson is not None:
            rep = doubling_check(self.m.poisson, strict=False)
            data = {"command": "modular", "presentation": "poisson",
                    "modular_vector_field": rep.vector_field.to_string(names),
                    "lr_modular_cocycle": _cochain_dict(lr, rep.lr_cocycle),
                    "poisson_modular_cocycle": _cochain_dict(lr, rep.poisson_cocycle),
                    "doubling": "PASS" if rep.holds else "FAIL"}
            return data, EXIT_OK if rep.holds else EXIT_MATH
        md = modular_data(lr)
        data = {"command": "modular", "presentation": "lie_rinehart",
                "lr_modular_cocycle": _cochain_dict(lr, md.lr_modular_cocycle),
                "closed": md.closed,
                "class_in_h1": None if md.class_in_h1 is None else [_rat(x) for x in md.class_in_h1]}
        return data, EXIT_OK if md.closed else EXIT_MATH

    def pairing(self):
        self.require_valid()
        lr = self.lr
        mod = self.module("A")
        if mod.side != "left":
            raise UsageError("pairing needs a left module")
        self._check_flat(mod)
        cx = CochainComplex(lr, mod)
        if cx.truncated:
            raise MathFailure("pairing needs a weight-homogeneous presentation")
        pairing = multiplication_pairing(lr, mod)
        a = trivial_module(lr)
        weights = self.weights(CochainComplex(lr, a))
        rows = []
        for k in range(lr.rank + 1):
            for w1 in weights:
                for w2 in weights:
                    if w1 + w2 > self.max_weight:
                        continue
                    g = pairing_gram(lr, a, mod, pairing, k, w1, w2)
                    if g.left_dim == 0 and g.right_dim == 0:
                        continue
                    rows.append({"degree": k, "weights": [w1, w2], "target_weight": g.target_weight,
                                 "dims": [g.left_dim, g.right_dim, g.target_dim],
                                 "gram": _matrix_rows(g.matrix), "left_rank": g.left_rank,
                                 "right_rank": g.right_rank, "nondegenerate": g.nondegenerate})
        data = {"command": "pairing", "module": mod.name or "A", **self.header(cx), "table": rows}
        return data, EXIT_OK

    def fundamental_class(self):
        self.require_valid()
        lr = self.lr
        fc = fundamental_class(lr)
        data = {"command": "fundamental-class", "representative": _chain_dict(lr, fc.representative),
                "certified": fc.certified, "solution_space_dim": fc.solution_space_dim}
        ok = fc.certified and fc.solution_space_dim == 1
        return data, EXIT_OK if ok else EXIT_MATH


# rendering -----------------------------------------------------------------

def _render_table(data: dict) -> str:
    cmd = data["command"]
    lines = []
    head = {k: v for k, v in data.items() if k not in ("table", "command", "failures", "modules",
                                                        "representative")}
    lines.append(f"# {cmd}")
    for k, v in head.items():
        if isinstance(v, dict):
            lines.append(f"{k}:")
            for kk, vv in v.items():
                lines.append(f"  {kk} = {vv}")
        else:
            lines.append(f"{k}: {_plain(v)}")
    for f in data.get("failures", []):
        lines.append(f"FAIL {f['kind']} {tuple(f['witness'])}: {f['detail']}")
    for name, info in data.get("modules", {}).items():
        status = "flat" if info["flat"] else "NOT flat"
        lines.append(f"module {name} ({info['side']}, rank {info['rank']}): {status}")
        for f in info["failures"]:
            lines.append(f"  curvature {tuple(f['witness'])}: {f['detail']}")
    if "representative" in data:
        lines.append("representative:")
        for k, v in data["representative"].items():
            lines.append(f"  {k} = {v}")
    table = data.get("table")
    if table:
        if cmd in ("cohomology", "homology"):
            cols = ["degree", "weight", "dim"]
        elif cmd == "duality-check":
            cols = ["degree", "weight", "dim_cohomology", "dim_homology", "cap_invertible", "phi_inverts_cap"]
        else:
            cols = ["degree", "weights", "target_weight", "dims", "left_rank", "right_rank", "nondegenerate"]
        cells = [[_plain(r[c]) for c in cols] for r in table]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.rjust(wd) for c, wd in zip(cols, widths)))
        for row in cells:
            lines.append("  ".join(x.rjust(wd) for x, wd in zip(row, widths)))
        if cmd == "pairing":
            for r in table:
                lines.append(f"gram k={r['degree']} w={tuple(r['weights'])}: {r['gram']}")
    return "\n".join(lines) + "\n"


def _plain(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list):
        return "(" + ",".join(_plain(x) for x in v) + ")"
    if v is None:
        return "-"
    return str(v)


def render(data: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    return _render_table(data)


# entry point ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"lrk: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lrk", description="(Co)homology, duality and modular classes of Lie-Rinehart algebras.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("manifest", help="path to a TOML manifest")
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--max-weight", type=int, default=None, help="default 4")
    p.add_argument("--module", default=None, help="module name: A, C, A_poisson or one declared in the manifest")
    p.add_argument("--format", choices=["table", "structured"], default=None)
    return p


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        stderr.write(f"lrk: cannot read manifest: {exc.strerror}\n")
        return EXIT_USAGE
    try:
        manifest = parse_manifest(text)
        runner = Runner(manifest, args)
        method = getattr(runner, args.command.replace("-", "_"))
        data, code = method()
    except (ManifestError, UsageError) as exc:
        stderr.write(f"lrk: {exc}\n")
        return EXIT_USAGE
    except (MathFailure, NotInvertible, DoublingViolation) as exc:
        stderr.write(f"lrk: {exc}\n")
        return EXIT_MATH
    stdout.write(render(data, runner.format))
    return code


def main(argv: list[str] | None = None) -> None:
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
