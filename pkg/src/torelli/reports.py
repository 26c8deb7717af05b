"""Canonical report payloads.

Every pipeline produces a plain jsonable dict; rationals are rendered as
`p/q` strings, coordinate vectors as sparse label -> rational maps, words
in the CLI literal syntax. Equal inputs must produce byte-identical JSON,
so everything here is sorted and the timing block is segregated by the
emitter.
"""

from __future__ import annotations

from .mcg import DepthReport
from .series import format_rational
from .sullivan import FormalityVerdict, MasseyResult
from .words import GroupWord, SurfaceGroup


def coords_json(coordinates, labels) -> dict:
    """Sparse {basis label: rational} map of a coordinate vector."""
    if coordinates is None:
        return {}
    return {labels[i]: format_rational(c)
            for i, c in enumerate(coordinates) if c}


def depth_report_json(rep: DepthReport) -> dict:
    per_gen = []
    for entry in rep.per_generator:
        item = {"generator": entry.generator, "degree": entry.degree}
        if entry.degree is not None:
            item["leading"] = coords_json(entry.coordinates, entry.basis_labels)
        per_gen.append(item)
    return {
        "kind": "depth",
        "word": rep.word,
        "max_class": rep.max_class,
        "depth": rep.depth,
        "depth_exact": rep.exact,
        "depth_text": rep.depth_text,
        "torelli": rep.torelli,
        "lemma_bound": rep.lemma_bound,
        "per_generator": per_gen,
    }


def twist_json(t, G: SurfaceGroup) -> dict:
    return {
        "name": t.name,
        "based_boundary": G.format_word(t.boundary),
        "sign": t.sign,
        "conjugated_handles": sorted(t.conjugated),
    }


def model_json(model, invariants: dict | None = None) -> dict:
    out = {
        "kind": "model",
        "genus": model.genus,
        "class": model.n,
        "generators": len(model.names),
        "export": model.export_lines(),
    }
    if invariants is not None:
        out["algebra_invariants"] = invariants
    return out


def massey_json(results: list[MasseyResult], model) -> dict:
    items = []
    for r in results:
        items.append({
            "classes": list(r.classes),
            "verdict": r.verdict_text(),
            "representative": {f"{model.names[i]}^{model.names[j]}": format_rational(c)
                               for (i, j), c in sorted(r.representative.items())},
            "indeterminacy_dim": len(r.indeterminacy_basis),
        })
    return {
        "kind": "massey",
        "defined_triples": len(items),
        "all_vanish": all(r.vanishes for r in results),
        "products": items,
    }


def verdict_json(v: FormalityVerdict) -> dict:
    out = {
        "kind": "verdict",
        "word": v.word,
        "genus": v.genus,
        "max_class": v.max_class,
        "depth": v.depth,
        "depth_exact": v.depth_exact,
        "headline": v.headline(),
        "partial_formality_class": v.partial_formality_class,
        "not_one_formal": v.not_one_formal,
        "cohomology": {
            "b1_computed": v.b1,
            "cup_kernel_dim_computed": v.cup_kernel_dim,
            "surface_block_kernel_dim_computed": v.surface_block_kernel_dim,
            "betti_vector_asserted": list(v.betti_asserted),
        },
        "model_class": v.model_class,
        "notes": v.notes,
    }
    if v.obstruction is not None:
        ob = v.obstruction
        out["obstruction"] = {
            "degree": ob.degree,
            "generator": ob.generator,
            "leading": coords_json(ob.coordinates, ob.basis_labels),
        }
    else:
        out["obstruction"] = None
        out["conjecture_flag"] = v.conjecture_flag
    return out


def dims_json(g: int, dims: tuple[int, ...], counts: list[int]) -> dict:
    return {
        "kind": "dims",
        "genus": g,
        "labute_dims": list(dims),
        "envelope_monomial_counts": counts,
    }


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------

def render_text(report: dict) -> str:
    lines = [f"torelli {report['tool']['version']} — {report['command']}"]
    for res in report.get("results", []):
        kind = res.get("kind")
        lines.append("")
        if kind == "depth":
            lines.append(f"depth report for {res['word']} (max class {res['max_class']})")
            lines.append(f"  depth: {res['depth_text']}  torelli: {res['torelli']}"
                         + (f"  lemma bound: {res['lemma_bound']}"
                            if res.get("lemma_bound") else ""))
            for p in res["per_generator"]:
                if p["degree"] is None:
                    lines.append(f"  {p['generator']}: trivial up to max class")
                else:
                    coords = ", ".join(f"{k}: {v}" for k, v in sorted(p["leading"].items()))
                    lines.append(f"  {p['generator']}: degree {p['degree']}  [{coords}]")
        elif kind == "verdict":
            lines.append(f"formality verdict for {res['word']} at genus {res['genus']}")
            lines.append(f"  {res['headline']}")
            coh = res["cohomology"]
            lines.append(f"  b1 = {coh['b1_computed']} (computed), betti vector "
                         f"{coh['betti_vector_asserted']} (asserted)")
            lines.append(f"  cup kernel on ^2 H1 = {coh['cup_kernel_dim_computed']}, "
                         f"surface block = {coh['surface_block_kernel_dim_computed']}")
            if res.get("obstruction"):
                ob = res["obstruction"]
                coords = ", ".join(f"{k}: {v}" for k, v in sorted(ob["leading"].items()))
                lines.append(f"  obstruction at N = {ob['degree']} on {ob['generator']}: [{coords}]")
            for note in res.get("notes", []):
                lines.append(f"  note: {note}")
        elif kind == "massey":
            lines.append(f"triple Massey products: {res['defined_triples']} defined, "
                         f"all vanish: {res['all_vanish']}")
            for item in res["products"]:
                if item["verdict"] != "vanishes":
                    lines.append(f"  <{', '.join(item['classes'])}> {item['verdict']}")
        elif kind == "model":
            lines.append(f"minimal model at genus {res['genus']}, class {res['class']}: "
                         f"{res['generators']} generators")
            lines.extend("  " + ln for ln in res["export"][:1])
            if "algebra_invariants" in res:
                lines.append(f"  invariants: {res['algebra_invariants']}")
        elif kind == "dims":
            lines.append(f"labute dims genus {res['genus']}: {res['labute_dims']}")
            lines.append(f"envelope monomial counts: {res['envelope_monomial_counts']}")
        elif kind == "verify":
            lines.append(f"verify suite at genus {res['genus']}, class {res['max_class']}: "
                         f"{'ALL PASS' if res['all_pass'] else 'FAILURES'}")
            for p in res["properties"]:
                lines.append(f"  [{p['status']:>4}] {p['property']}"
                             + (f" — {p['detail']}" if p.get("detail") else ""))
        elif kind == "note":
            lines.append(res["text"])
    return "\n".join(lines) + "\n"
