"""Execute parsed scripts: build bindings, dispatch checks and computes,
collect report dictionaries, and apply expectation annotations.

Exit status contract: 0 when every report met its expectation (checks with
no annotation must come out holds or hypothesis-not-met), 1 on any verdict
or value mismatch, 2 on parse or engine errors.
"""

import time
from dataclasses import dataclass, field

from .errors import EngineError, ScriptError
from .rings import FreeElement, RingPresentation, free_space
from . import modules as mops
from .modules import (
    PolyMatrix,
    columns_to_module,
    colength,
    fitting_ideal,
    ideal_handle,
    mingens,
    module_from_gens,
    socle_module,
    soc_dim,
)
from .homology import minimal_free_resolution, resolution_entries_in_max_ideal
from .claims import (
    check_colength_isomorphism,
    check_main_equivalence,
    check_parameter_module,
    check_perfect,
    check_reduction_number_one,
    check_socle_multiplier,
    check_syzygy_coefficients,
    find_socle_witness,
    hilbert_burch_report,
    monomial_integral_closure,
)
from .script import (
    CheckStmt,
    ComputeStmt,
    ExpectStmt,
    IdealDecl,
    MatrixDecl,
    ModuleDecl,
    RingDecl,
    parse_script,
)

OK_VERDICTS = ("holds", "hypothesis-not-met", "computed")


@dataclass
class SessionOptions:
    field_override: object = None
    trunc_fixed: object = None
    trunc_cap: int = 64
    fail_fast: bool = False
    seed: object = None


@dataclass
class Session:
    options: SessionOptions = field(default_factory=SessionOptions)
    rings: dict = field(default_factory=dict)
    handles: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    binding_kinds: dict = field(default_factory=dict)


def _apply_trunc_policy(options):
    # process-wide policy: set once before execution, read by certified_level
    mops.LEVEL_POLICY["cap"] = options.trunc_cap
    mops.LEVEL_POLICY["fixed"] = options.trunc_fixed


def _module_target(session, name):
    kind, _ = session.binding_kinds[name]
    if kind == "matrix":
        return columns_to_module(session.matrices[name])
    return session.handles[name]


CHECKS = {
    "rn1": check_reduction_number_one,
    "perfect": check_perfect,
    "prop23": check_syzygy_coefficients,
    "cor25": check_colength_isomorphism,
    "param": check_parameter_module,
    "thm51": check_main_equivalence,
    "socle-mult": check_socle_multiplier,
    "witness": find_socle_witness,
}


def run_script(script, session=None):
    """Execute statements in order; returns (reports, status)."""
    session = session or Session()
    reports = []
    status = 0
    options = session.options
    _apply_trunc_policy(options)

    def mismatch():
        nonlocal status
        if status == 0:
            status = 1

    def engine_error(stmt, command, exc):
        nonlocal status
        status = 2
        reports.append(
            {
                "command": command,
                "inputs": {"position": f"{stmt.pos[0]}:{stmt.pos[1]}"},
                "verdict": "error",
                "certificates": {"message": str(exc)},
                "elapsed_ms": 0.0,
            }
        )

    for stmt in script.statements:
        try:
            if isinstance(stmt, RingDecl):
                ring = RingPresentation(
                    stmt.field_spec, stmt.vars, stmt.relations, cm=stmt.cm
                )
                session.rings[stmt.name] = ring
            elif isinstance(stmt, IdealDecl):
                ring = session.rings[stmt.ring_name]
                session.handles[stmt.name] = ideal_handle(ring, list(stmt.gens))
                session.binding_kinds[stmt.name] = ("ideal", stmt.ring_name)
            elif isinstance(stmt, MatrixDecl):
                ring = session.rings[stmt.ring_name]
                session.matrices[stmt.name] = PolyMatrix(ring, stmt.entries)
                session.binding_kinds[stmt.name] = ("matrix", stmt.ring_name)
            elif isinstance(stmt, ModuleDecl):
                ring = session.rings[stmt.ring_name]
                if stmt.mode == "cols":
                    handle = columns_to_module(PolyMatrix(ring, stmt.entries))
                else:
                    space = free_space(stmt.rank)
                    gens = [FreeElement(space, row) for row in stmt.entries]
                    handle = module_from_gens(ring, space, gens)
                session.handles[stmt.name] = handle
                session.binding_kinds[stmt.name] = ("module", stmt.ring_name)
            elif isinstance(stmt, CheckStmt):
                command = f"check {stmt.kind}"
                try:
                    target = _module_target(session, stmt.target)
                    report = CHECKS[stmt.kind](target).to_dict()
                    report["command"] = command
                    report["inputs"]["target"] = stmt.target
                    reports.append(report)
                except EngineError as exc:
                    engine_error(stmt, command, exc)
                    if options.fail_fast:
                        break
            elif isinstance(stmt, ComputeStmt):
                command = f"compute {stmt.kind}"
                try:
                    report = _run_compute(session, stmt)
                    report["inputs"]["target"] = stmt.target
                    reports.append(report)
                except EngineError as exc:
                    engine_error(stmt, command, exc)
                    if options.fail_fast:
                        break
            elif isinstance(stmt, ExpectStmt):
                if not reports:
                    raise ScriptError("expect without a preceding report", *stmt.pos)
                report = reports[-1]
                met = _expectation_met(report, stmt.value)
                report["expected"] = (
                    list(stmt.value) if isinstance(stmt.value, tuple) else stmt.value
                )
                report["expectation_met"] = met
                if not met:
                    mismatch()
        except EngineError as exc:
            engine_error(stmt, type(stmt).__name__, exc)
            if options.fail_fast:
                break

    # default expectation: un-annotated checks must not come out "fails"
    for report in reports:
        if "expected" not in report and report["verdict"] not in OK_VERDICTS:
            if report["verdict"] == "error":
                status = 2
            else:
                mismatch()
    return reports, status


def _expectation_met(report, expected):
    if isinstance(expected, str):
        return report["verdict"] == expected
    value = report["certificates"].get("value")
    if isinstance(expected, tuple):
        return list(value or ()) == list(expected)
    return value == expected


def _run_compute(session, stmt):
    kind = stmt.kind
    name = stmt.target
    binding_kind, _ = session.binding_kinds[name]
    t0 = time.perf_counter()

    def report(certs, verdict="computed"):
        return {
            "command": f"compute {kind}",
            "inputs": {},
            "verdict": verdict,
            "certificates": certs,
            "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3),
        }

    if kind == "socle":
        N = _module_target(session, name)
        M = socle_module(N)
        return report(
            {
                "value": len(M.gens),
                "generators": [N.ring.render_element(g) for g in M.gens],
            }
        )
    if kind == "colength":
        N = _module_target(session, name)
        c = colength(N)
        return report({"value": "infinite" if c == mops.INFINITE else c})
    if kind == "mingens":
        N = _module_target(session, name)
        return report({"value": mingens(N)})
    if kind == "socdim":
        N = _module_target(session, name)
        return report({"value": soc_dim(N)})
    if kind == "fitting":
        if binding_kind == "matrix":
            mat = session.matrices[name]
        else:
            mat = session.handles[name].component_matrix()
        I = fitting_ideal(mat, stmt.arg)
        return report(
            {
                "value": len(I.gens),
                "minors": stmt.arg,
                "generators": [mat.ring.render_poly(g.comps[0]) for g in I.gens],
            }
        )
    if kind == "resolve":
        if binding_kind == "matrix":
            pres = session.matrices[name]
        else:
            pres = session.handles[name].component_matrix()
        betti, cc, completed = minimal_free_resolution(pres)
        return report(
            {
                "value": list(betti.ranks),
                "completed": completed,
                "minimal": resolution_entries_in_max_ideal(cc),
                "differentials": [d.render() for d in cc.diffs],
            }
        )
    if kind == "dual-image":
        N = _module_target(session, name)
        rep = hilbert_burch_report(N).to_dict()
        rep["command"] = "compute dual-image"
        rep["certificates"]["value"] = rep["certificates"].get("betti")
        return rep
    if kind == "closure":
        N = _module_target(session, name)
        C = monomial_integral_closure(N)
        exps = sorted(next(iter(g.comps[0].terms)) for g in C.gens)
        input_exps = sorted(next(iter(g.comps[0].terms)) for g in N.gens)
        from .modules import submodule_equal

        return report(
            {
                "value": len(C.gens),
                "generators": [N.ring.render_poly(g.comps[0]) for g in C.gens],
                "exponents": [list(e) for e in exps],
                "input_exponents": [list(e) for e in input_exps],
                "already_closed": submodule_equal(C, N),
            }
        )
    raise ScriptError(f"unknown compute kind {kind!r}", *stmt.pos)
