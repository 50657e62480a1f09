"""End-to-end run: polytope -> reduction data -> classification -> sampling, plus report rendering."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .config import ConfigSyntaxError, NonSquareFreeDiscriminant, ProblemConfig
from .delzant import NotOnLevelSet, NotSimple, build_construction, check_regular_value
from .exactmath import DiscriminantMismatch, format_scalar
from .polytope import DegeneratePolytope, check_simple
from .quasilattice import GeneratorsDoNotSpan, classify, is_lattice, polytope_faces
from .verify import RejectionBudgetExceeded, SampleReport, certify_moment_image

REPORT_FORMAT = "quasifold-report/1"
GROUP_NOTE = "isotropy groups are (Q cap span X_F) / Z-span X_F, the rational-case structure groups"


class ExitCode(IntEnum):
    OK = 0
    INTERNAL = 1
    USAGE = 2
    CONFIG = 3
    DEGENERATE = 4
    NOT_SIMPLE = 5
    NOT_REGULAR = 6
    SAMPLING = 7
    IO = 8


# every anticipated failure maps to exactly one code; order matters only for subclasses
ERROR_CODES: tuple[tuple[type[BaseException], ExitCode], ...] = (
    (ConfigSyntaxError, ExitCode.CONFIG),
    (NonSquareFreeDiscriminant, ExitCode.CONFIG),
    (DiscriminantMismatch, ExitCode.CONFIG),
    (DegeneratePolytope, ExitCode.DEGENERATE),
    (GeneratorsDoNotSpan, ExitCode.DEGENERATE),
    (NotSimple, ExitCode.NOT_SIMPLE),
    (RejectionBudgetExceeded, ExitCode.SAMPLING),
    (NotOnLevelSet, ExitCode.SAMPLING),
    (OSError, ExitCode.IO),
)


def exit_code_for(exc: BaseException) -> ExitCode:
    for cls, code in ERROR_CODES:
        if isinstance(exc, cls):
            return code
    return ExitCode.INTERNAL


@dataclass
class Report:
    sections: dict
    exit_code: ExitCode = ExitCode.OK
    samples: np.ndarray | None = field(default=None, repr=False)

    def render(self) -> str:
        return render(self.sections)

    def samples_csv(self) -> str:
        return samples_csv(self.samples)


def _exact_list(values) -> list[str]:
    return [format_scalar(x) for x in values]


def _float_list(values) -> list[float]:
    return [float(x) for x in values]


def _sample_section(r: SampleReport) -> dict:
    return {
        "samples": r.n_samples,
        "seed": r.seed,
        "acceptance_ratio": r.acceptance_ratio,
        "max_roundtrip_error": r.max_roundtrip_error,
        "max_level_residual": r.max_level_residual,
        "max_moment_residual": r.max_moment_residual,
        "extent_min": list(r.extent_min),
        "extent_max": list(r.extent_max),
        "extent_gaps": list(r.extent_gaps),
        "vertex_distances": list(r.vertex_distances),
    }


def run_pipeline(cfg: ProblemConfig, faces: str = "vertices", workers: int = 1) -> Report:
    """Run every stage; on failure the report holds the sections computed so far."""
    if faces not in ("vertices", "all"):
        raise ValueError(f"faces must be 'vertices' or 'all', got {faces!r}")
    sec: dict = {"format": REPORT_FORMAT, "status": "ok", "exit_code": 0}
    sec["input"] = {
        "ambient_dim": cfg.ambient_dim,
        "discriminant": cfg.discriminant,
        "facets": [
            {"normal": _exact_list(x), "offset": format_scalar(lam)}
            for x, lam in zip(cfg.normals, cfg.offsets)
        ],
    }
    report = Report(sec)
    try:
        _stages(cfg, sec, report, faces, workers)
    except Exception as exc:
        code = exit_code_for(exc)
        if code is ExitCode.INTERNAL:
            raise
        report.exit_code = code
        sec["status"] = code.name.lower()
        sec["exit_code"] = int(code)
        sec["diagnostics"] = {"error": type(exc).__name__, "message": str(exc)}
    return report


def _stages(cfg: ProblemConfig, sec: dict, report: Report, faces: str, workers: int) -> None:
    P = cfg.polytope()
    verts = P.vertices
    simple = check_simple(P)
    sec["polytope"] = {
        "facets": P.d,
        "vertex_count": len(verts),
        "vertices": [
            {"active": list(v.active), "exact": _exact_list(v.coords), "float": _float_list(v.coords)}
            for v in verts
        ],
        "simple": simple.is_simple,
        "offending_vertices": [list(v.active) for v in simple.offending],
    }
    if not simple:
        raise NotSimple(simple.offending)

    D = build_construction(P)
    Q = D.quasilattice
    sec["quasilattice"] = {
        "generators": Q.d,
        "rank": Q.q_rank,
        "relation_rank": int(Q.relations.shape[0]),
        "relations": [[int(x) for x in row] for row in Q.relations],
        "is_lattice": is_lattice(Q),
    }
    cert = check_regular_value(D)
    sec["regularity"] = {
        "passed": cert.passed,
        "faces_checked": cert.faces_checked,
        "offending_face": list(cert.offending_face) if cert.offending_face is not None else None,
    }
    if not cert:
        report.exit_code = ExitCode.NOT_REGULAR
        sec["status"] = "not_regular"
        sec["exit_code"] = int(ExitCode.NOT_REGULAR)
        return
    sec["construction"] = {
        "torus_rank": D.d,
        "subgroup_dim": D.dim_N,
        "quasitorus_dim": D.n,
        "dim_X": D.dim_X,
        "dim_M": D.dim_M,
        "kernel_basis": [_exact_list(row) for row in D.kernel_basis],
        "solve_face": list(D.solve_face),
    }

    all_faces = polytope_faces(P)
    result = classify(Q, all_faces)
    shown = set(polytope_faces(P, vertices_only=True)) if faces == "vertices" else set(all_faces)
    sec["isotropy"] = {
        "scope": faces,
        "note": GROUP_NOTE,
        "groups": [
            {"face": list(g.face), "invariant_factors": list(g.invariant_factors),
             "free_rank": g.free_rank, "group": str(g)}
            for g in result.groups if g.face in shown
        ],
    }
    sec["classification"] = {
        "kind": result.kind.value,
        "faces_examined": len(result.groups),
        "nontrivial_faces": [list(g.face) for g in result.nontrivial],
    }

    sample_report, samples = certify_moment_image(
        D, cfg.samples, cfg.seed, tol=cfg.tolerance, workers=workers, return_samples=True)
    report.samples = samples
    sec["sampling"] = _sample_section(sample_report)


# ---------------------------------------------------------------------------
# rendering


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return ".inf" if v > 0 else "-.inf"
        if math.isnan(v):
            return ".nan"
        text = format(v, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    return json.dumps(str(v), ensure_ascii=False)


def _emit(obj, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    for key, value in obj.items():
        if isinstance(value, dict):
            out.append(f"{pad}{key}:")
            _emit(value, indent + 1, out)
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            out.append(f"{pad}{key}:")
            for item in value:
                lines: list[str] = []
                _emit(item, 0, lines)
                out.append(f"{pad}  - {lines[0]}")
                out.extend(f"{pad}    {line}" for line in lines[1:])
        elif isinstance(value, list):
            out.append(f"{pad}{key}: {_flow(value)}")
        else:
            out.append(f"{pad}{key}: {_scalar(value)}")


def _flow(values) -> str:
    return "[" + ", ".join(_flow(v) if isinstance(v, list) else _scalar(v) for v in values) + "]"


def render(sections: dict) -> str:
    """Fixed-order YAML-compatible text; floats carry 17 significant digits."""
    out: list[str] = []
    _emit(sections, 0, out)
    return "\n".join(out) + "\n"


def samples_csv(samples: np.ndarray | None) -> str:
    buf = io.StringIO()
    if samples is None:
        return ""
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"mu_{k + 1}" for k in range(samples.shape[1])])
    for row in samples:
        w.writerow([format(float(x), ".17g") for x in row])
    return buf.getvalue()
