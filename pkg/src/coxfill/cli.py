"""Command-line front end.

Eight subcommands drive the library: ``classify`` (diagram files),
``deform``/``limit`` (parametric families), ``realize``/``orbit``/
``truncate`` (geometric members), ``relhyp`` (relative hyperbolicity),
and ``reproduce`` (pinned result sets).  Machine-readable JSON goes to
stdout, a human summary to stderr; reports carry no timing data so a
rerun with the same inputs and seed is byte-identical.

Exit codes: 0 all checks passed, 1 a check failed, 2 parse/IO error,
3 unknown or unsupported family, 4 unknown reproduce id.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .cartan import CartanError, CartanMatrix, build_special_form, special_form_layout
from .deform import (
    DeformError,
    UnsupportedFamilyError,
    circle_space,
    deformation_space,
    limit_family,
    witnesses_at_mu,
)
from .diagram import INF, DiagramError, Infinity, classify_irreducible, parse_diagram, split_components
from .families import (
    FamilyError,
    FillingFamily,
    example_polytope,
    family_by_id,
    family_ids,
    square_pyramid_cartan,
)
from .polytopes import PolytopeError, dehn_fill, predicted_vertices
from .realization import (
    RealizeError,
    classify_vertices,
    is_hyperbolic,
    orbit_explore,
    orbit_to_ply,
    realize_cartan,
    reflections_of,
    truncatable,
    truncate_geometric,
)
from .relhyp import RelHypError, caprace_check, default_peripherals

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_IO = 2
EXIT_FAMILY = 3
EXIT_REPRODUCE = 4

REPRODUCE_IDS = (
    "cox_gp", "ex1A", "ex1B", "ex1C", "ex1D", "ex2", "mix", "appendixB", "circle",
)


class _CliFail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _jsonable(obj):
    """Recursively convert to plain JSON types with deterministic order."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Infinity):
        return "inf"
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _emit(args, command, inputs, findings, passed, total, started) -> int:
    report = {
        "command": command,
        "inputs": _jsonable(inputs),
        "findings": _jsonable(findings),
        "checks": {"passed": passed, "total": total},
    }
    indent = None if args.json else 2
    text = json.dumps(report, sort_keys=True, indent=indent)
    print(text)
    if getattr(args, "out", None) and not str(args.out).endswith(".ply"):
        Path(args.out).write_text(text + "\n")
    dt = time.monotonic() - started
    print(f"{command}: {passed}/{total} checks passed in {dt:.2f} s",
          file=sys.stderr)
    return EXIT_OK if passed == total else EXIT_CHECK


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _CliFail(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _system_from_file(path: str):
    try:
        return parse_diagram(_read_text(path))
    except DiagramError as exc:
        raise _CliFail(EXIT_IO, f"parse error in {path}: {exc}") from exc


def _parse_m(token: str):
    if token in ("inf", "oo"):
        return INF
    try:
        return int(token)
    except ValueError:
        raise _CliFail(EXIT_IO, f"bad order {token!r}; expected an integer or 'inf'")


def _parse_m_range(token: str):
    """Either a single order ('7', 'inf') or an inclusive range '3..9'."""
    if ".." in token:
        lo, hi = token.split("..", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise _CliFail(EXIT_IO, f"bad range {token!r}; expected LO..HI")
        if hi < lo:
            raise _CliFail(EXIT_IO, f"empty range {token!r}")
        return list(range(lo, hi + 1))
    return [_parse_m(token)]


def _family(family_id: str):
    try:
        return family_by_id(family_id)
    except FamilyError as exc:
        raise _CliFail(EXIT_FAMILY, str(exc)) from exc


def _member_cartan(args):
    """Resolve the realize/orbit/truncate input to a Cartan matrix.

    Accepts a CartanMatrix JSON dump, the 'appendixB' square pyramid
    (with --lam), or a filling-family id (with --m and optionally --mu).
    Returns (cartan, inputs-dict, family-or-None, m-or-None).
    """
    spec = args.input
    if spec.endswith(".json") or Path(spec).is_file():
        try:
            data = json.loads(_read_text(spec))
            A = CartanMatrix.from_json(data)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise _CliFail(EXIT_IO, f"bad Cartan JSON {spec}: {exc}") from exc
        return A, {"input": spec}, None, None
    if spec == "appendixB":
        if args.lam is None:
            raise _CliFail(EXIT_IO, "appendixB needs --lam")
        try:
            A = square_pyramid_cartan(args.lam)
        except (CartanError, ValueError) as exc:
            raise _CliFail(EXIT_IO, str(exc)) from exc
        return A, {"input": spec, "lam": args.lam}, None, None
    fam = _family(spec)
    if not isinstance(fam, FillingFamily):
        raise _CliFail(EXIT_FAMILY,
                       f"{spec} is not a filling family; realize takes a "
                       "filling family id, 'appendixB', or a Cartan JSON file")
    if args.m is None:
        raise _CliFail(EXIT_IO, f"family {spec} needs --m")
    m = _parse_m(args.m)
    two_cycle = fam.loops == 2
    inputs = {"input": spec, "m": m}
    if two_cycle:
        mu = 1.0 if args.mu is None else args.mu
        inputs["mu"] = mu
    elif args.mu is not None:
        raise _CliFail(EXIT_FAMILY, f"family {spec} has one cycle; --mu not allowed")
    W = fam.system(m)
    names = special_form_layout(W).param_names
    if isinstance(m, Infinity):
        params = {names[0]: 1.0}
        if two_cycle:
            params[names[1]] = mu
    else:
        if two_cycle:
            wits = witnesses_at_mu(fam.polytope(m), mu)
        else:
            wits = deformation_space(fam.polytope(m)).witnesses
        if not wits:
            raise _CliFail(EXIT_FAMILY,
                           f"deformation space of {spec} at m={m} is empty")
        params = dict(max(wits, key=lambda w: w[names[0]]))
    return build_special_form(W, params), inputs, fam, m


def _class_counts(geom):
    return {kind: geom.count(kind) for kind in ("elliptic", "parabolic", "loxodromic")}


def _lattice_counts(lattice):
    dims = {}
    for _, dim in lattice.faces.items():
        dims[dim] = dims.get(dim, 0) + 1
    return {str(k): v for k, v in sorted(dims.items())}


def _realization_findings(R, tol):
    geom = classify_vertices(R)
    refl = reflections_of(R, check=False)
    worst = max(refl.relation_errors.values()) if refl.relation_errors else 0.0
    return {
        "dimension": R.dimension,
        "facets": list(R.names),
        "lattice": _lattice_counts(R.lattice),
        "vertex_classes": {",".join(sorted(v)): geom.classes[v] for v in geom.classes},
        "class_counts": _class_counts(geom),
        "perfect": geom.perfect,
        "quasi_perfect": geom.quasi_perfect,
        "two_perfect": geom.two_perfect,
        "hyperbolic": is_hyperbolic(R),
        "relation_residual": worst,
        "realization": R.to_json(),
    }, worst <= max(tol, 1e-7)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_classify(args, started):
    W = _system_from_file(args.path)
    if not W.is_bound:
        raise _CliFail(EXIT_IO,
                       "diagram has unbound parameters: "
                       + ", ".join(W.symbolic_parameters()))
    comps = split_components(W)
    rows = []
    for comp in comps:
        label = classify_irreducible(comp)
        rows.append({
            "generators": list(comp.generators),
            "kind": label.kind,
            "catalog": label.catalog_name,
        })
    if len(rows) == 1:
        r = rows[0]
        summary = f"{r['kind']} {r['catalog']}" if r["catalog"] else f"{r['kind']} (irreducible)"
    else:
        summary = " x ".join(
            (r["catalog"] or f"{r['kind']}[{len(r['generators'])}]") for r in rows
        )
    findings = {
        "generators": list(W.generators),
        "rank": W.rank,
        "components": rows,
        "summary": summary,
    }
    n = len(rows)
    return _emit(args, "classify", {"path": args.path}, findings, n, n, started)


def _cmd_deform(args, started):
    fid = args.family
    tol = args.tol
    if fid in ("U", "V"):
        G = example_polytope(fid)
        try:
            space = circle_space(G) if fid == "U" else deformation_space(G)
        except UnsupportedFamilyError as exc:
            raise _CliFail(EXIT_FAMILY, str(exc)) from exc
        ok = space.checks.get("witness_max_abs_det", 0.0) <= tol
        findings = {"spaces": [{"member": fid, "space": space.to_json()}]}
        return _emit(args, "deform", {"family": fid}, findings, int(ok), 1, started)
    fam = _family(fid)
    if not isinstance(fam, FillingFamily):
        ms = [None]
    else:
        ms = _parse_m_range(args.m) if args.m else [7]
    spaces = []
    passed = 0
    for m in ms:
        G = fam.polytope(m) if m is not None else fam.polytope()
        try:
            if args.mu is not None:
                wits = witnesses_at_mu(G, args.mu)
                space_json = {
                    "kind": "FinitePoints" if wits else "Empty",
                    "witnesses": [dict(w) for w in wits],
                    "mu": args.mu,
                }
                ok = True
            else:
                space = deformation_space(G)
                space_json = space.to_json()
                ok = space.checks.get("witness_max_abs_det", 0.0) <= tol
        except UnsupportedFamilyError as exc:
            raise _CliFail(EXIT_FAMILY, str(exc)) from exc
        spaces.append({"member": fid if m is None else f"{fid} m={m}",
                       "space": space_json})
        passed += int(ok)
    inputs = {"family": fid}
    if args.m:
        inputs["m"] = args.m
    if args.mu is not None:
        inputs["mu"] = args.mu
    return _emit(args, "deform", inputs, {"spaces": spaces}, passed, len(ms), started)


def _cmd_limit(args, started):
    fam = _family(args.family)
    if not isinstance(fam, FillingFamily):
        raise _CliFail(EXIT_FAMILY, f"{args.family} is not a filling family")
    try:
        result = limit_family(args.family, mu=args.mu)
    except DeformError as exc:
        raise _CliFail(EXIT_FAMILY, str(exc)) from exc
    W_inf = fam.system(INF)
    names = special_form_layout(W_inf).param_names
    params = {names[0]: 1.0}
    if result.mu is not None:
        params[names[1]] = result.mu
    exact = build_special_form(W_inf, params)
    err = float(np.abs(result.cartan.entries - exact.entries).max())
    R = realize_cartan(exact)
    target = fam.polytope(INF).lattice
    expected_vertices = len(target.vertices())
    got_vertices = len(R.lattice.vertices())
    checks = [
        ("lambda_monotone", True),
        ("limit_matches_exact", err < 1e-7),
        ("limit_lattice", R.lattice == target and got_vertices == expected_vertices),
    ]
    findings = {
        "lam_trace": [[m, lam] for m, lam in result.lam_trace],
        "cartan": result.cartan.to_json(),
        "exact_entrywise_error": err,
        "predicted_vertices": [sorted(T) for T in predicted_vertices(result.prediction)],
        "limit_vertices": got_vertices,
        "checks": dict(checks),
    }
    passed = sum(1 for _, ok in checks if ok)
    inputs = {"family": args.family}
    if args.mu is not None:
        inputs["mu"] = args.mu
    return _emit(args, "limit", inputs, findings, passed, len(checks), started)


def _cmd_realize(args, started):
    A, inputs, fam, m = _member_cartan(args)
    try:
        R = realize_cartan(A)
    except RealizeError as exc:
        raise _CliFail(EXIT_CHECK, f"realization failed: {exc}") from exc
    findings, relations_ok = _realization_findings(R, args.tol)
    checks = 1 + int(relations_ok)
    total = 2
    if fam is not None:
        target = fam.polytope(m).lattice
        lattice_ok = R.lattice == target
        findings["lattice_matches_family"] = lattice_ok
        checks += int(lattice_ok)
        total += 1
    return _emit(args, "realize", inputs, findings, checks, total, started)


def _cmd_orbit(args, started):
    A, inputs, fam, m = _member_cartan(args)
    R = realize_cartan(A)
    orbit = orbit_explore(R, args.max_word_length,
                          samples=args.samples, seed=args.seed)
    inputs = dict(inputs, max_word_length=args.max_word_length,
                  seed=args.seed, samples=args.samples)
    findings = {
        "elements": orbit.count,
        "longest_word": max((len(w) for w in orbit.words), default=0),
        "overlap_checks": orbit.overlap_checks,
        "overlap_violations": orbit.overlap_violations,
        "hull_samples": len(orbit.hull_samples),
    }
    if args.out and str(args.out).endswith(".ply"):
        ply = orbit_to_ply(R, orbit, slice_chart=R.dimension == 4)
        Path(args.out).write_text(ply)
        findings["ply"] = {"path": str(args.out), "format": "ply"}
    ok = int(orbit.overlap_violations == 0)
    return _emit(args, "orbit", inputs, findings, ok, 1, started)


def _cmd_relhyp(args, started):
    if Path(args.input).is_file():
        W = _system_from_file(args.input)
        inputs = {"input": args.input}
    else:
        fam = _family(args.input)
        if not isinstance(fam, FillingFamily):
            W = fam.system()
            inputs = {"input": args.input}
        else:
            m = _parse_m(args.m) if args.m else 7
            W = fam.system(m)
            inputs = {"input": args.input, "m": m}
    try:
        if args.peripherals:
            subsets = json.loads(args.peripherals)
            coll = [frozenset(str(x) for x in T) for T in subsets]
        else:
            coll = default_peripherals(W)
        verdict = caprace_check(W, coll)
    except (RelHypError, json.JSONDecodeError) as exc:
        raise _CliFail(EXIT_IO, str(exc)) from exc
    findings = {
        "peripherals": [sorted(T) for T in coll],
        "verdict": verdict.to_json(),
    }
    return _emit(args, "relhyp", inputs, findings, int(verdict.holds), 1, started)


def _cmd_truncate(args, started):
    A, inputs, fam, m = _member_cartan(args)
    R = realize_cartan(A)
    geom = classify_vertices(R)
    if args.vertex:
        record = frozenset(args.vertex.split(","))
        if record not in R.lattice.faces or R.lattice.faces[record] != 0:
            raise _CliFail(EXIT_IO, f"not a vertex: {sorted(record)}")
        targets = [record]
    else:
        targets = sorted(geom.of_class("loxodromic"), key=sorted)
        if not targets:
            raise _CliFail(EXIT_CHECK, "no loxodromic vertex to truncate")
    results = []
    passed = 0
    current = R
    for v in targets:
        ok, cert = truncatable(current, v)
        entry = {
            "vertex": sorted(v),
            "class": geom.classes.get(v, "unknown"),
            "truncatable": ok,
            "pole_span_dim": cert["span_dim"],
        }
        if ok:
            current = truncate_geometric(current, v)
            entry["new_facets"] = len(current.names)
            passed += 1
        results.append(entry)
    findings = {"truncations": results}
    if passed == len(targets):
        post = classify_vertices(current)
        findings["result"] = {
            "facets": list(current.names),
            "lattice": _lattice_counts(current.lattice),
            "class_counts": _class_counts(post),
            "perfect": post.perfect,
        }
    if args.vertex:
        inputs = dict(inputs, vertex=sorted(frozenset(args.vertex.split(","))))
    return _emit(args, "truncate", inputs, findings, passed, len(targets), started)


def _cmd_reproduce(args, started):
    table = args.id
    if table not in REPRODUCE_IDS:
        raise _CliFail(EXIT_REPRODUCE,
                       f"unknown reproduce id {table!r}; "
                       f"choose from {', '.join(REPRODUCE_IDS)}")
    claims = _REPRODUCERS[table](args.tol, args.seed)
    passed = sum(1 for c in claims if c["pass"])
    findings = {"claims": claims}
    return _emit(args, "reproduce", {"id": table}, findings,
                 passed, len(claims), started)


# ---------------------------------------------------------------------------
# reproduce drivers
# ---------------------------------------------------------------------------


def _claim(cid, ok, **detail):
    return {"id": cid, "pass": bool(ok), "detail": _jsonable(detail)}


def _beta_claims(fid, tol):
    """Deformation-size pattern of one filling family over small m."""
    fam = family_by_id(fid)
    claims = []
    two_cycle = fam.loops == 2
    for m in range(3, 10):
        space = deformation_space(fam.polytope(m))
        if two_cycle:
            want_kind = "Curves"
            branches = space.checks.get("branches")
            ok = space.kind == want_kind and branches == (4 if m == 3 else 2)
            detail = {"kind": space.kind, "branches": branches}
        else:
            if m <= 6:
                ok = space.kind == "Empty"
                detail = {"kind": space.kind}
            else:
                lams = [w[k] for w in space.witnesses for k in w]
                prod = lams[0] * lams[1] if len(lams) == 2 else None
                ok = (space.kind == "FinitePoints" and len(lams) == 2
                      and abs(prod - 1.0) <= 1e-9)
                detail = {"kind": space.kind, "witness_product": prod}
        worst = space.checks.get("witness_max_abs_det", 0.0)
        ok = ok and worst <= max(tol, 1e-9)
        claims.append(_claim(f"{fid}-beta-m{m}", ok, m=m, **detail))
    return claims


def _limit_claims(fid, mu=None):
    fam = family_by_id(fid)
    result = limit_family(fid, mu=mu)
    W_inf = fam.system(INF)
    names = special_form_layout(W_inf).param_names
    params = {names[0]: 1.0}
    if mu is not None:
        params[names[1]] = mu
    exact = build_special_form(W_inf, params)
    err = float(np.abs(result.cartan.entries - exact.entries).max())
    lams = [lam for _, lam in result.lam_trace]
    decreasing = all(b < a for a, b in zip(lams, lams[1:]))
    R = realize_cartan(exact)
    target = fam.polytope(INF).lattice
    return [
        _claim(f"{fid}-limit", err < 1e-7 and decreasing,
               entrywise_error=err, lam_first=lams[0], lam_last=lams[-1]),
        _claim(f"{fid}-limit-lattice",
               R.lattice == target and len(R.lattice.vertices()) == 2 * (fam.dimension - 1) + 1,
               vertices=len(R.lattice.vertices())),
    ]


def _member_realization(fid, m, mu=None):
    fam = family_by_id(fid)
    W = fam.system(m)
    names = special_form_layout(W).param_names
    if isinstance(m, Infinity):
        params = {names[0]: 1.0}
        if fam.loops == 2:
            params[names[1]] = 1.0 if mu is None else mu
    elif fam.loops == 2:
        wits = witnesses_at_mu(fam.polytope(m), 1.0 if mu is None else mu)
        params = dict(max(wits, key=lambda w: w[names[0]]))
    else:
        wits = deformation_space(fam.polytope(m)).witnesses
        params = dict(max(wits, key=lambda w: w[names[0]]))
    return fam, realize_cartan(build_special_form(W, params))


def _vertex_class_claims(fid, expect_finite, expect_inf):
    """Vertex-class multisets of one family at m=7 and m=inf."""
    claims = []
    for m, expected in ((7, expect_finite), (INF, expect_inf)):
        mu = 1.0 if family_by_id(fid).loops == 2 else None
        fam, R = _member_realization(fid, m, mu)
        got = {k: classify_vertices(R).count(k)
               for k in ("elliptic", "parabolic", "loxodromic")}
        want = dict(zip(("elliptic", "parabolic", "loxodromic"), expected))
        tag = "inf" if isinstance(m, Infinity) else m
        claims.append(_claim(f"{fid}-classes-m{tag}", got == want,
                             got=got, want=want))
    return claims


def _reproduce_cox_gp(tol, seed):
    claims = []
    for fid in ("cox_gp-1", "cox_gp-2", "cox_gp-3"):
        claims.extend(_beta_claims(fid, tol))
        claims.extend(_limit_claims(fid, mu=1.0 if fid == "cox_gp-3" else None))
    claims.extend(_vertex_class_claims("cox_gp-1", (9, 0, 0), (6, 1, 0)))
    claims.extend(_vertex_class_claims("cox_gp-2", (7, 0, 2), (4, 1, 2)))
    return claims


def _reproduce_ex1(part, tol, seed):
    prefix = f"ex1{part}"
    fids = [f for f in family_ids() if f.startswith(prefix)]
    claims = []
    for fid in fids:
        fam = family_by_id(fid)
        mu = 1.0 if fam.loops == 2 else None
        space_ok = True
        if fam.loops == 1:
            space = deformation_space(fam.polytope(7))
            space_ok = space.kind == "FinitePoints" and len(space.witnesses) == 2
        claims.append(_claim(f"{fid}-beta-m7", space_ok))
        _, R = _member_realization(fid, 7, mu)
        lattice_ok = R.lattice == fam.polytope(7).lattice
        refl = reflections_of(R, check=False)
        worst = max(refl.relation_errors.values())
        claims.append(_claim(f"{fid}-realize-m7",
                             lattice_ok and worst <= 1e-7,
                             relation_residual=worst))
        _, Rinf = _member_realization(fid, INF, mu)
        geom = classify_vertices(Rinf)
        paras = geom.of_class("parabolic")
        apex_ok = Rinf.lattice == fam.polytope(INF).lattice and len(paras) >= 1
        claims.append(_claim(f"{fid}-realize-inf", apex_ok,
                             parabolic=len(paras)))
        G_inf = fam.polytope(INF)
        apex = frozenset(set(fam.cycle) | set(fam.m_pair))
        try:
            filled = dehn_fill(G_inf, apex, 7)
            fill_ok = filled == fam.polytope(7)
        except PolytopeError as exc:
            filled, fill_ok = str(exc), False
        claims.append(_claim(f"{fid}-dehn-fill", fill_ok))
        dp = default_peripherals(fam.system(7))
        claims.append(_claim(f"{fid}-relhyp",
                             caprace_check(fam.system(7), dp).holds,
                             peripherals=[sorted(T) for T in dp]))
    return claims


def _reproduce_ex2(tol, seed):
    claims = []
    for fid in family_ids():
        if not fid.startswith("ex2"):
            continue
        fam = family_by_id(fid)
        space = deformation_space(fam.polytope())
        want = "Curves" if fam.loops == 2 else "FinitePoints"
        worst = space.checks.get("witness_max_abs_det", 0.0)
        ok = space.kind == want and worst <= max(tol, 1e-9)
        if fam.loops == 2:
            ok = ok and space.checks.get("branches") == 2
        claims.append(_claim(f"{fid}-space", ok, kind=space.kind,
                             witness_max_abs_det=worst))
    return claims


def _reproduce_mix(tol, seed):
    claims = []
    for fid in ("mix-d5", "mix-d6"):
        fam = family_by_id(fid)
        space = deformation_space(fam.polytope())
        worst = space.checks.get("witness_max_abs_det", 0.0)
        ok = (space.kind == "Curves"
              and space.checks.get("branches") == 4
              and worst <= max(tol, 1e-9))
        claims.append(_claim(f"{fid}-space", ok, kind=space.kind,
                             branches=space.checks.get("branches"),
                             witness_max_abs_det=worst))
    return claims


def _reproduce_appendixB(tol, seed):
    claims = []
    lam_star = math.sqrt(1.5)
    for lam in (1.1, lam_star, 2.0):
        A = square_pyramid_cartan(lam)
        from .cartan import symmetrize
        sym = symmetrize(A)
        poly = 4 * lam ** 4 - 8 * lam ** 2 + 3
        ok = (sym is not None) == (abs(poly) < 1e-9)
        claims.append(_claim(f"appendixB-symmetrize-lam{lam:g}", ok,
                             lam=lam, polynomial=poly,
                             symmetrizable=sym is not None))
    apex = frozenset({"2", "3", "4", "5"})
    for lam, want_ok, want_span in ((1.1, False, 4), (lam_star, True, 3), (2.0, False, 4)):
        R = realize_cartan(square_pyramid_cartan(lam))
        ok, cert = truncatable(R, apex)
        claims.append(_claim(
            f"appendixB-truncatable-lam{lam:g}",
            ok == want_ok and cert["span_dim"] == want_span,
            truncatable=ok, span_dim=cert["span_dim"]))
    R = realize_cartan(square_pyramid_cartan(2.0))
    geom = classify_vertices(R)
    claims.append(_claim("appendixB-apex-class",
                         geom.classes[apex] == "loxodromic"
                         and geom.two_perfect and not geom.perfect,
                         apex_class=geom.classes[apex]))
    return claims


def _reproduce_circle(tol, seed):
    G = example_polytope("U")
    space = circle_space(G)
    K = space.reduced_equation["K"]
    const = 8.0 * math.cos(math.pi / 5.0) ** 2
    claims = [
        _claim("circle-constant", abs(K - const) <= 1e-12, K=K, expected=const),
        _claim("circle-identity-excluded",
               space.checks["identity_violation"] >= 1.2,
               violation=space.checks["identity_violation"]),
        _claim("circle-witnesses",
               len(space.witnesses) == 64
               and space.checks["witness_max_abs_det"] < 1e-9,
               count=len(space.witnesses),
               witness_max_abs_det=space.checks["witness_max_abs_det"]),
        _claim("circle-bounded",
               all(2.0 - 1e-9 <= v <= K / 2.0 + 1e-9
                   for w in space.witnesses
                   for v in (w["lambda"] + 1 / w["lambda"], w["mu"] + 1 / w["mu"])),
               bounds=space.checks["bounds"]),
    ]
    return claims


_REPRODUCERS = {
    "cox_gp": _reproduce_cox_gp,
    "ex1A": lambda tol, seed: _reproduce_ex1("A", tol, seed),
    "ex1B": lambda tol, seed: _reproduce_ex1("B", tol, seed),
    "ex1C": lambda tol, seed: _reproduce_ex1("C", tol, seed),
    "ex1D": lambda tol, seed: _reproduce_ex1("D", tol, seed),
    "ex2": _reproduce_ex2,
    "mix": _reproduce_mix,
    "appendixB": _reproduce_appendixB,
    "circle": _reproduce_circle,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common_flags(target, root: bool):
    """The global flags, accepted both before and after the subcommand."""
    kw = {} if root else {"default": argparse.SUPPRESS}
    target.add_argument("--json", action="store_true",
                        help="compact single-line JSON on stdout", **kw)
    target.add_argument("--seed", type=int, help="sampling seed",
                        **({"default": 0} if root else kw))
    target.add_argument("--tol", type=float,
                        help="tolerance for witness/residual checks",
                        **({"default": 1e-9} if root else kw))
    target.add_argument("--out",
                        help="also write the report (or PLY for orbit) here", **kw)


def _build_parser():
    p = argparse.ArgumentParser(
        prog="coxfill",
        description="Projective Coxeter polytopes: classification, "
                    "deformation spaces, Dehn filling limits, realization, "
                    "and relative hyperbolicity.",
    )
    _common_flags(p, root=True)
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("classify", help="classify a diagram file")
    c.add_argument("path")
    _common_flags(c, root=False)

    d = sub.add_parser("deform", help="deformation space of a family")
    d.add_argument("family", help="family id (e.g. cox_gp-1, ex2-d5-k4, U)")
    d.add_argument("--m", help="order or range LO..HI (filling families)")
    d.add_argument("--mu", type=float, help="fix the second parameter")
    _common_flags(d, root=False)

    l = sub.add_parser("limit", help="limit member of a filling family")
    l.add_argument("family")
    l.add_argument("--mu", type=float)
    _common_flags(l, root=False)

    for name, helptext in (("realize", "realize a member geometrically"),
                           ("orbit", "explore the reflection orbit"),
                           ("truncate", "truncate loxodromic vertices")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("input",
                       help="filling family id, 'appendixB', or Cartan JSON file")
        s.add_argument("--m", help="member order (int or inf)")
        s.add_argument("--mu", type=float)
        s.add_argument("--lam", type=float, help="appendixB parameter")
        if name == "orbit":
            s.add_argument("--max-word-length", type=int, default=5)
            s.add_argument("--samples", type=int, default=10000)
        if name == "truncate":
            s.add_argument("--vertex",
                           help="comma-separated facet names (default: all "
                                "loxodromic vertices)")
        _common_flags(s, root=False)

    r = sub.add_parser("relhyp", help="relative hyperbolicity check")
    r.add_argument("input", help="diagram file or family id")
    r.add_argument("--m", help="member order for filling families (default 7)")
    r.add_argument("--peripherals",
                   help='JSON list of generator lists, e.g. [["1","2","3"]]')
    _common_flags(r, root=False)

    q = sub.add_parser("reproduce", help="run a pinned result set")
    q.add_argument("id", help=", ".join(REPRODUCE_IDS))
    _common_flags(q, root=False)
    return p


_DISPATCH = {
    "classify": _cmd_classify,
    "deform": _cmd_deform,
    "limit": _cmd_limit,
    "realize": _cmd_realize,
    "orbit": _cmd_orbit,
    "relhyp": _cmd_relhyp,
    "truncate": _cmd_truncate,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        return _DISPATCH[args.cmd](args, started)
    except _CliFail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (FamilyError, UnsupportedFamilyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAMILY
    except (DiagramError, CartanError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DeformError, PolytopeError, RealizeError, RelHypError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
