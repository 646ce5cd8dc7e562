"""Command-line interface: ``difflift <command> FILE ...``.

Exit codes: 0 success, 1 a check failed, 2 the input could not be parsed.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import DEFAULT_TOL, Tolerances
from .errors import LiftingError, NonSimplePath, SchemaError
from .framework import (Framework, Stress, equilibrium_error, has_crossings, is_self_stress,
                        self_stress_basis)
from .homotopy import (PolygonalLoop, elementary_forms, lifting_of_loop, lifting_of_word,
                       recover_stress_nd, vertex_monodromy)
from .io import (export_obj, export_svg, parse_complex, parse_framework_doc, parse_path)
from .lifting2d import (differential_lifting_2d, integrate_polyhedral_lifting, jump_form,
                        normal_jump_residual, recover_stress)

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2


@dataclass
class Check:
    name: str
    status: str  # "pass" or "fail"
    max_residual: float | None = None

    def as_dict(self) -> dict:
        r = None if self.max_residual is None else float(f"{self.max_residual:.6e}")
        return {"name": self.name, "status": self.status, "max_residual": r}


@dataclass
class VerifyReport:
    checks: list[Check] = field(default_factory=list)
    parse_failed: bool = False
    errors: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.parse_failed:
            return EXIT_PARSE
        return EXIT_OK if all(c.status == "pass" for c in self.checks) else EXIT_FAIL

    def add(self, name: str, ok: bool, residual: float | None = None):
        self.checks.append(Check(name, "pass" if ok else "fail", residual))

    def as_dict(self) -> dict:
        return {"checks": [c.as_dict() for c in self.checks], "exit_code": self.exit_code}

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            r = "-" if c.max_residual is None else f"{c.max_residual:.3e}"
            lines.append(f"{c.status.upper():4}  {c.name}  (max residual {r})")
        lines.append(f"exit code {self.exit_code}")
        return "\n".join(lines)


# -- loading -----------------------------------------------------------------------

def _is_complex(text: str) -> bool:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return False
    return isinstance(doc, dict) and "face_dim" in doc


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc


def _stresses(fw: Framework, s: Stress | None, tol: Tolerances) -> list[tuple[str, Stress]]:
    if s is not None:
        return [("stress", s)]
    return [(f"basis[{k}]", b) for k, b in enumerate(self_stress_basis(fw, tol))]


# -- verification ------------------------------------------------------------------

def _guard(report: VerifyReport, name: str, fn):
    """Run ``fn`` returning (ok, residual); exceptions from the library count as failures."""
    try:
        ok, res = fn()
    except LiftingError:
        ok, res = False, None
    report.add(name, ok, res)


def _verify_framework(report, label, fw, s, tol, seed, grassmann):
    stresses = _stresses(fw, s, tol)
    if not stresses:
        report.add(f"{label}:self_stress_basis", True, 0.0)
        return
    for tag, st in stresses:
        name = f"{label}:{tag}"
        scale = max(1.0, st.max_abs() * fw.scale())
        balanced = is_self_stress(fw, st, tol)
        report.add(f"{name}:equilibrium", balanced, equilibrium_error(fw, st))
        mono = max((vertex_monodromy(fw, st, v).norm() for v in fw.vertices), default=0.0)
        report.add(f"{name}:monodromy", mono <= tol.eps_form * scale, mono)
        if fw.dim == 2:
            def consistency():
                dl = differential_lifting_2d(fw, st, tol, check_equilibrium=False)
                gap = max((float((dl.forms[a.b] - dl.forms[a.a] - jump_form(fw, st, a)).norm())
                           for a in dl.complex.adjacencies), default=0.0)
                return gap <= tol.eps_form * scale, gap
            _guard(report, f"{name}:lifting_consistency", consistency)

            def bijection():
                dl = differential_lifting_2d(fw, st, tol)
                back = recover_stress(fw, dl, tol)
                err = max((abs(back.get(e) - st.get(e)) for e in fw.edges), default=0.0)
                return err <= tol.eps_form * max(1.0, st.max_abs()), err
            _guard(report, f"{name}:bijection", bijection)
            if not has_crossings(fw, tol):
                def polyhedral():
                    pl = integrate_polyhedral_lifting(fw, st, tol)
                    res = max(pl.max_mismatch, normal_jump_residual(fw, st, pl))
                    return res <= tol.eps_form * scale, res
                _guard(report, f"{name}:polyhedral_lifting", polyhedral)
        else:
            def bijection_nd():
                forms = elementary_forms(fw, st)
                back = recover_stress_nd(fw, {e: forms[e] for e in fw.edges}, tol)
                err = max((abs(back.get(e) - st.get(e)) for e in fw.edges), default=0.0)
                return err <= tol.eps_form * max(1.0, st.max_abs()), err
            _guard(report, f"{name}:bijection", bijection_nd)
            if grassmann and fw.dim == 3 and balanced:
                from .polytopal import complex_from_framework, forceload_from_stress

                c = complex_from_framework(fw, tol)
                _guard(report, f"{name}:path_independence",
                       lambda: _path_independence(c, forceload_from_stress(fw, st), tol, seed))


def _random_flat(rng, c, k):
    centre = c.vertices.mean(axis=0)
    spread = max(1.0, float(np.abs(c.vertices - centre).max()))
    return centre + spread * rng.normal(size=(k + 1, c.ambient_dim))


def _path_independence(c, w, tol, seed, trials=5, max_draws=200):
    """Largest disagreement between pairs of random simple paths ending at a common flat."""
    from .grassmann import AffineFlat, GrassmannPath, flat_meets_hull, grassmann_lifting

    rng = np.random.default_rng(seed)
    k = c.ambient_dim - 1 - c.face_dim
    worst, draws = 0.0, 0
    final = _random_flat(rng, c, k)
    for _ in range(trials):
        vals = []
        while len(vals) < 2:
            draws += 1
            if draws > max_draws:
                raise NonSimplePath("could not draw simple random paths")
            start = _random_flat(rng, c, k) * 3.0
            try:
                if flat_meets_hull(AffineFlat(start), c):
                    continue
                mids = [_random_flat(rng, c, k) for _ in range(rng.integers(1, 3))]
                path = GrassmannPath([start, *mids, final])
                vals.append(grassmann_lifting(path, c, w, tol))
            except LiftingError:
                continue
        worst = max(worst, abs(vals[0] - vals[1]))
    scale = max(1.0, float(np.abs(w.as_vector()).max(initial=0.0)))
    return worst <= tol.eps_form * scale, worst


def _verify_complex(report, label, c, w, tol, seed, grassmann):
    from .polytopal import facet_monodromy, forceload_basis, forceload_error, is_equilibrium

    mf = c.mframework()
    loads = [("force_load", w)] if w is not None else [
        (f"basis[{k}]", b) for k, b in enumerate(forceload_basis(mf, tol))]
    report.add(f"{label}:complex_valid", True, 0.0)
    for tag, load in loads:
        name = f"{label}:{tag}"
        scale = max(1.0, float(np.abs(load.as_vector()).max(initial=0.0)))
        report.add(f"{name}:equilibrium", is_equilibrium(mf, load, tol), forceload_error(mf, load))
        mono = max((facet_monodromy(mf, load, e).norm() for e in range(len(mf.edges))
                    if mf.incident_faces(e)), default=0.0)
        report.add(f"{name}:facet_monodromy", mono <= tol.eps_form * scale, mono)
        if grassmann and is_equilibrium(mf, load, tol):
            _guard(report, f"{name}:path_independence",
                   lambda: _path_independence(c, load, tol, seed))


def run_verify(paths, seed: int = 0, tol: Tolerances = DEFAULT_TOL,
               grassmann: bool = False) -> VerifyReport:
    """Run every applicable check on each document; parse failures give exit code 2."""
    report = VerifyReport()
    for path in paths:
        label = Path(path).name
        try:
            text = _read(path)
            if _is_complex(text):
                c, w = parse_complex(text, tol)
                _verify_complex(report, label, c, w, tol, seed, grassmann)
            else:
                doc = parse_framework_doc(text, tol)
                _verify_framework(report, label, doc.framework, doc.stress, tol, seed, grassmann)
        except SchemaError as exc:
            report.parse_failed = True
            report.checks.append(Check(f"{label}:parse", "fail", None))
            report.errors.append(str(exc))
    return report


# -- command handlers ----------------------------------------------------------------

def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _vertex_id(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        return tok


def _parse_word(text: str) -> list:
    """``"1-2:+1,2-4:-1"`` -> ``[((1, 2), 1), ((2, 4), -1)]``."""
    word = []
    for item in filter(None, (p.strip() for p in text.split(","))):
        try:
            edge, sign = item.rsplit(":", 1)
            i, j = edge.split("-")
            word.append(((_vertex_id(i), _vertex_id(j)), int(sign)))
        except ValueError as exc:
            raise SchemaError(f"bad crossing word entry {item!r}") from exc
    return word


def _load_framework(args, tol):
    doc = parse_framework_doc(_read(args.file), tol)
    return doc.framework, doc.stress


def _single_stress(fw, s, tol):
    if s is not None:
        return s
    basis = self_stress_basis(fw, tol)
    if not basis:
        raise SchemaError("document has no stress and the framework has no self-stress")
    return basis[0]


def cmd_stress_basis(args, tol):
    fw, _ = _load_framework(args, tol)
    basis = self_stress_basis(fw, tol)
    payload = {"dimension": len(basis),
               "basis": [[{"i": i, "j": j, "stress": b.get((i, j))} for i, j in fw.edges] for b in basis]}
    text = [f"self-stress space dimension {len(basis)}"]
    for k, b in enumerate(basis):
        text.append(f"basis[{k}]: " + ", ".join(f"{i}-{j}: {b.get((i, j)):+.9g}" for i, j in fw.edges))
    _emit(args, payload, "\n".join(text))
    return EXIT_OK


def cmd_lift2d(args, tol):
    fw, s = _load_framework(args, tol)
    s = _single_stress(fw, s, tol)
    dl = differential_lifting_2d(fw, s, tol)
    rows = []
    for ch in dl.complex.chambers:
        rows.append({"chamber": ch.id, "bounded": ch.bounded,
                     "sample": [float(x) for x in ch.sample], "form": dl.forms[ch.id].vector().tolist()})
    text = [f"C{r['chamber']} at ({r['sample'][0]:.4g}, {r['sample'][1]:.4g}): {dl.forms[r['chamber']]}"
            for r in rows]
    payload = {"chambers": rows}
    if not has_crossings(fw, tol):
        pl = integrate_polyhedral_lifting(fw, s, tol, dl=dl)
        payload["heights"] = {str(c): [g.tolist(), off] for c, (g, off) in pl.pieces.items()}
        text.append(f"polyhedral lifting continuous (mismatch {pl.max_mismatch:.3e})")
    _emit(args, payload, "\n".join(text))
    return EXIT_OK


def cmd_lift_nd(args, tol):
    fw, s = _load_framework(args, tol)
    s = _single_stress(fw, s, tol)
    if args.loop:
        try:
            doc = json.loads(_read(args.loop))
            loop = PolygonalLoop(doc["points"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad loop document: {exc}") from exc
        apex = args.apex or doc.get("apex")
        if apex is None:
            pts = np.array(list(fw.vertices.values()))
            apex = pts.max(axis=0) + 3.0 + np.array([0.0, 0.137, 0.291])
        apex = [float(x) for x in (apex.split(",") if isinstance(apex, str) else apex)]
        form = lifting_of_loop(fw, s, loop, apex, tol, seed=args.seed)
    elif args.word:
        form = lifting_of_word(fw, s, _parse_word(args.word))
    else:
        forms = elementary_forms(fw, s)
        payload = {f"{i}-{j}": forms[(i, j)].vector().tolist() for i, j in fw.edges}
        _emit(args, {"elementary_forms": payload},
              "\n".join(f"{i}-{j}: {forms[(i, j)]}" for i, j in fw.edges))
        return EXIT_OK
    _emit(args, {"form": form.vector().tolist()}, str(form))
    return EXIT_OK


def cmd_lift_complex(args, tol):
    from .polytopal import facet_monodromy, forceload_basis, lifting_of_word_m

    c, w = parse_complex(_read(args.file), tol)
    mf = c.mframework()
    if w is None:
        basis = forceload_basis(mf, tol)
        if not basis:
            _emit(args, {"forceload_basis": []}, "no equilibrium force-load")
            return EXIT_FAIL
        w = basis[0]
    payload = {"force_load": list(w.values)}
    text = ["force-load: " + ", ".join(f"{v:+.6g}" for v in w.values)]
    mono = max((facet_monodromy(mf, w, e).norm() for e in range(len(mf.edges))), default=0.0)
    payload["max_facet_monodromy"] = mono
    text.append(f"max facet monodromy {mono:.3e}")
    if args.word:
        word = []
        for item in filter(None, (p.strip() for p in args.word.split(","))):
            f, sign = item.split(":")
            word.append((int(f), int(sign)))
        form = lifting_of_word_m(mf, w, word)
        payload["form"] = {"".join(map(str, k)): v for k, v in form.coeffs.items()}
        text.append(f"lifting: {form}")
    _emit(args, payload, "\n".join(text))
    return EXIT_OK


def cmd_grassmann_lift(args, tol):
    from .grassmann import grassmann_lifting, path_crossings
    from .polytopal import complex_from_framework, forceload_from_stress

    text = _read(args.file)
    if _is_complex(text):
        c, w = parse_complex(text, tol)
        if w is None:
            raise SchemaError("complex document needs a force_load for grassmann-lift")
    else:
        doc = parse_framework_doc(text, tol)
        s = _single_stress(doc.framework, doc.stress, tol)
        c = complex_from_framework(doc.framework, tol)
        w = forceload_from_stress(doc.framework, s)
    path = parse_path(_read(args.path))
    events = path_crossings(path, c, tol)
    value = grassmann_lifting(path, c, w, tol)
    payload = {"value": value, "crossings": [{"face": e.face, "t": e.t, "mu": e.mu} for e in events]}
    lines = [f"face {e.face} at t={e.t:.6f} mu={e.mu:+d}" for e in events]
    lines.append(f"lifting {value:.12g}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args, tol):
    report = run_verify(args.files, seed=args.seed, tol=tol, grassmann=args.grassmann)
    for msg in report.errors:
        print(msg, file=sys.stderr)
    _emit(args, report.as_dict(), report.to_text())
    return report.exit_code


def _write(args, content: str):
    if args.output:
        Path(args.output).write_text(content)
    else:
        sys.stdout.write(content)


def cmd_export_obj(args, tol):
    fw, s = _load_framework(args, tol)
    s = _single_stress(fw, s, tol)
    pl = integrate_polyhedral_lifting(fw, s, tol)
    _write(args, export_obj(pl))
    return EXIT_OK


def cmd_export_svg(args, tol):
    fw, s = _load_framework(args, tol)
    s = _single_stress(fw, s, tol)
    _write(args, export_svg(differential_lifting_2d(fw, s, tol)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eps-geom", type=float, default=None, help="geometric tolerance")
    common.add_argument("--eps-form", type=float, default=None, help="form comparison tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    common.add_argument("--format", choices=("json", "text"), default="text")

    p = argparse.ArgumentParser(prog="difflift", description="Differential liftings of stressed frameworks.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("stress-basis", parents=[common], help="basis of the self-stress space")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_stress_basis)

    sp = sub.add_parser("lift2d", parents=[common], help="chamber forms of a planar framework")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_lift2d)

    sp = sub.add_parser("lift-nd", parents=[common], help="forms on crossing words or loops")
    sp.add_argument("file")
    sp.add_argument("--word", help='crossing word such as "1-2:+1,2-4:-1"')
    sp.add_argument("--loop", help="JSON file with loop points (and optional apex)")
    sp.add_argument("--apex", help="cone apex x,y,z")
    sp.set_defaults(func=cmd_lift_nd)

    sp = sub.add_parser("lift-complex", parents=[common], help="force-loads and m-form liftings")
    sp.add_argument("file")
    sp.add_argument("--word", help='face word such as "0:+1,3:-1"')
    sp.set_defaults(func=cmd_lift_complex)

    sp = sub.add_parser("grassmann-lift", parents=[common], help="lifting along a path of flats")
    sp.add_argument("file")
    sp.add_argument("--path", required=True, help="JSON path document")
    sp.set_defaults(func=cmd_grassmann_lift)

    sp = sub.add_parser("verify", parents=[common], help="run all checks and report")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--grassmann", action="store_true", help="also test path independence")
    sp.set_defaults(func=cmd_verify)

    for name, func, what in (("export-obj", cmd_export_obj, "OBJ mesh of the polyhedral lifting"),
                             ("export-svg", cmd_export_svg, "SVG of the chamber forms")):
        sp = sub.add_parser(name, parents=[common], help=what)
        sp.add_argument("file")
        sp.add_argument("-o", "--output", help="output file (default stdout)")
        sp.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = DEFAULT_TOL.with_(eps_geom=args.eps_geom, eps_form=args.eps_form)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args, tol)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LiftingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
