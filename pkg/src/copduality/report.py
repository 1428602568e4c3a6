"""JSON-ready reports.  Rationals become "num/den" strings; key order is fixed."""
from __future__ import annotations

import json
from fractions import Fraction

from .copositive import zero_piece_vertices
from .duality import ConeCertificate, DualityVerdict, DuffinFW
from .gap import CPWitness, DualResult, GapReport, PrimalResult
from .immobile import ImmobileStructure, IndexSets, MinActiveSolution, PointCertificate
from .model import CopSystem, system_to_dict


def q(v):
    """Fraction (or int) to its exact string."""
    return None if v is None else str(Fraction(v))


def vec(v):
    return None if v is None else [q(a) for a in v]


def mat(M):
    return None if M is None else [vec(r) for r in M]


def parse_q(s) -> Fraction:
    return Fraction(s)


def point_certificate(c: PointCertificate) -> dict:
    return {"point": vec(c.point), "immobile": c.immobile, "method": c.method,
            "witness_x": vec(c.witness_x), "value": q(c.value)}


def slater(d: dict) -> dict:
    out = {"status": d.get("status"), "holds": d.get("holds")}
    if "margin" in d:
        out["margin"] = q(d["margin"])
    if d.get("x") is not None:
        out["x"] = vec(d["x"])
    return out


def immobile(imm: ImmobileStructure) -> dict:
    return {
        "status": imm.status,
        "vertices": [vec(v) for v in imm.vertices],
        "pieces": [[j + 1 for j in J] for J in imm.pieces],
        "pairs": [[l + 1, r + 1] for l, r in imm.pairs],
        "sigma": q(imm.sigma),
        "x_bar": vec(imm.x_bar),
        "slater": slater(imm.slater) if imm.slater else None,
        "hint_confirmed": imm.hint_confirmed,
        "certificates": [point_certificate(c) for c in imm.certificates],
        "notes": list(imm.notes),
    }


def _ks(d: dict) -> dict:
    return {str(j + 1): list(ks) for j, ks in sorted(d.items())}


def index_sets(idx: IndexSets) -> dict:
    return {
        "M": _ks(idx.M),
        "N_star": _ks(idx.Nstar),
        "N": _ks(idx.N),
        "x_kj": [{"k": k, "j": j + 1, "x": vec(x)} for (k, j), x in sorted(idx.x_kj.items())],
        "undecided": [[k, j + 1] for k, j in idx.undecided],
        "m_certificates": [{"k": k, "j": j + 1, "status": c["status"], "value": q(c["value"]),
                            "duals": vec(c["duals"])}
                           for (k, j), c in sorted(idx.m_certificates.items())],
    }


def min_active(ma: MinActiveSolution) -> dict:
    return {"x": vec(ma.x), "status": ma.status, "zero_pattern_ok": ma.zero_pattern_ok,
            "margin": q(ma.margin), "omega_points": ma.omega_points,
            "strict": [{"k": k, "j": j + 1, "value": q(v)} for (k, j), v in sorted(ma.strict.items())]}


def cone_certificate(c: ConeCertificate) -> dict:
    out = {"verdict": c.verdict, "target": vec(c.target), "domain": c.domain, "rounds": c.rounds}
    if c.pieces is not None:
        out["pieces"] = [[vec(v) for v in P] for P in c.pieces]
    if c.combination:
        out["combination"] = [{"t": vec(t), "alpha": q(a)} for t, a in c.combination]
    if c.separator is not None:
        out["separator"] = vec(c.separator)
        out["domain_minima"] = [q(m) for m in c.domain_minima]
    if c.reduction is not None:
        out["reduction_x"] = vec(c.reduction["x"])
    return out


def verdict(v: DualityVerdict) -> dict:
    out = {"overall": v.overall, "reasons": list(v.reasons), "caveat": v.caveat,
           "immobile": immobile(v.immobile)}
    if v.index_sets is not None:
        out["index_sets"] = index_sets(v.index_sets)
    if v.min_active is not None:
        out["min_active"] = min_active(v.min_active)
    c1 = v.condition_I
    if c1 is not None:
        out["condition_I"] = {
            "holds": c1.holds,
            "A1": {"holds": c1.a1.holds, "target": vec(c1.a1.target),
                   "certificate": cone_certificate(c1.a1.certificate),
                   "U_star": mat(c1.a1.U_star),
                   "residuals": vec(c1.a1.residuals),
                   "complementarity": q(c1.a1.complementarity)},
            "B1": {"holds": c1.b1.holds, "rank_A": c1.b1.rank_A, "rank_AB": c1.b1.rank_AB,
                   "A_columns": [{"i": i + 1, "j": j + 1, "a": vec(a)} for (i, j), a in c1.b1.A_columns],
                   "B_columns": [{"k": k, "j": j + 1, "b": vec(b)} for (k, j), b in c1.b1.B_columns]},
            "direct": [{"k": k, "j": j + 1, **cone_certificate(c)} for (k, j), c in sorted(c1.direct.items())],
            "agrees": c1.agrees,
        }
    if v.index_sets is not None:
        out["condition_II"] = {
            "holds": v.condition_II_holds,
            "cases": [{"k": c.k, "j": c.j + 1, "restricted_immobile": immobile(c.structure),
                       "certificate": cone_certificate(c.certificate)} for c in v.condition_II],
        }
        out["cond2"] = {"agrees": v.cond2_agrees,
                        "cases": [{"k": k, "j": j + 1, **cone_certificate(c)}
                                  for (k, j), c in sorted(v.cond2.items())]}
    return out


def cp_witness(w: CPWitness) -> dict:
    return {"atoms": [{"alpha": q(a), "t": vec(t)} for a, t in w.atoms], "U": mat(w.U),
            "residuals": vec(w.residuals), "objective": q(w.objective)}


def primal(p: PrimalResult) -> dict:
    return {"status": p.status, "value": q(p.value), "x": vec(p.x), "ray": vec(p.ray),
            "exact": p.exact, "iterations": p.iterations}


def dual(d: DualResult) -> dict:
    return {"status": d.status, "level": d.level, "value": q(d.value), "atoms_considered": d.atoms_considered,
            "witness": cp_witness(d.witness) if d.witness is not None else None}


def gap(g: GapReport) -> dict:
    return {"cost": vec(g.cost), "primal": primal(g.primal),
            "dual": dual(g.dual) if g.dual is not None else None,
            "levels": [{"level": d.level, "status": d.status, "value": q(d.value)} for d in g.levels],
            "certified_dual": q(g.certified_dual), "gap": q(g.gap), "gap_kind": g.gap_kind,
            "stabilized": g.stabilized, "weak_duality_checked": g.weak_duality_checked}


def duffin(fw: DuffinFW) -> dict:
    def label(lb):
        if lb[0] == "a":
            return {"kind": "a", "t": vec(lb[1])}
        if lb[0] == "b":
            return {"kind": "b", "k": lb[1][0], "j": lb[1][1] + 1}
        return {"kind": "e0"}
    return {
        "F": [{"k": k, "j": j + 1, "vector": vec(v)} for (k, j), v in fw.F],
        "W_tilde": [{**label(lb), "vector": vec(v)} for lb, v in fw.W_tilde],
        "W": [vec(v) for v in fw.W],
        "L_basis": [vec(v) for v in fw.L_basis],
        "L_perp_basis": [vec(v) for v in fw.Lperp_basis],
        "x_bar": vec(fw.x_bar),
        "checks": {"F_on_hyperplane": fw.f_on_hyperplane, "W_positive": fw.w_positive,
                   "orthogonal": fw.orthogonal, "cone_inclusion": fw.cone_inclusion},
        "passes": fw.passes,
        "omega_points": fw.omega_points,
    }


def copositivity(D, result, zero=None) -> dict:
    out = {"matrix": mat(D), "copositive": result.copositive, "minimum": q(result.minimum),
           "witness": vec(result.witness)}
    if zero is not None:
        out["zero_set"] = [{"support": [i + 1 for i in c.support], "point": vec(c.point),
                            "closure_vertices": [vec(v) for v in zero_piece_vertices(D, c.support)]}
                           for c in zero]
    return out


def problem(system: CopSystem) -> dict:
    return system_to_dict(system)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
