"""Plot-ready files: CSV point clouds, OBJ quad meshes and JSON metadata.

Every number is written with 15 significant digits in lowercase scientific
notation so repeated runs produce byte-identical files.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .assemble import AssembledHypersurface, SampleCloud, chart_grid, sample_assembly
from .errors import DomainError
from .families import SPHERE_KINDS
from .surfaces import BallChart

FMT = "{:.14e}"


def fmt(v: float) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return FMT.format(v)


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(data: dict, path) -> None:
    """Sorted keys; floats as formatted strings."""
    text = json.dumps(_json_ready(data), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def metadata(h: AssembledHypersurface) -> dict:
    meta = h.metadata()
    if h.slab is not None:
        meta["slab"] = list(h.slab)
    return meta


def cloud_header(n: int) -> list[str]:
    return (["s"] + [f"chart_{i}" for i in range(1, n)] + [f"x_{i}" for i in range(n + 1)]
            + ["t", "theta", "k"])


def write_cloud_csv(cloud: SampleCloud, path) -> int:
    """Columns s, chart_1.., x_0..x_n, t, theta, k; returns the row count."""
    pts, s, chart, theta, k, _ = cloud.flat()
    n = pts.shape[1] - 2
    table = np.column_stack([s, chart, pts, theta, k])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cloud_header(n))
        for row in table:
            w.writerow([fmt(v) for v in row])
    return table.shape[0]


def slice_axes(h: AssembledHypersurface, n_chart: int) -> list[np.ndarray]:
    """Chart axes of the 2-d slice exported as a mesh.

    For n = 3 all chart coordinates but one are frozen: polar angles at pi/2
    (a great circle of directions), flat coordinates after the first at 0.
    The slice then lies in a totally geodesic Q^2 x R.
    """
    family = h.family
    axes = chart_grid(family, n_chart)
    if family.n == 2:
        return axes
    if family.n != 3:
        raise DomainError("OBJ export covers n = 2 and n = 3 slices only")
    if family.kind in SPHERE_KINDS:
        return [np.array([0.5 * math.pi]), axes[-1]]
    return [axes[0], np.array([0.0])]


def mesh_vertices(h: AssembledHypersurface, cloud: SampleCloud) -> np.ndarray:
    """Ball-chart coordinates with the height appended, shape (pieces, n_q, n_chart, 3).

    For n = 3 slices the chart coordinate that stays constant is dropped.
    """
    pts = cloud.points.reshape(cloud.points.shape[0], cloud.points.shape[1], -1,
                               cloud.points.shape[-1])
    chart = BallChart(h.family.space)
    y = chart.to_ball(pts[..., :-1])
    xyz = np.concatenate([y, pts[..., -1:]], axis=-1)
    if xyz.shape[-1] == 4:
        spread = np.ptp(y.reshape(-1, y.shape[-1]), axis=0)
        drop = int(np.argmin(spread))
        xyz = np.delete(xyz, drop, axis=-1)
    return xyz


def write_obj(h: AssembledHypersurface, path, n_q: int = 41, n_chart: int = 24) -> tuple[int, int]:
    """Quad mesh over the (q, chart) grid of every piece; returns (vertices, faces)."""
    cloud = sample_assembly(h, n_q=n_q, n_chart=n_chart, chart_axes=slice_axes(h, n_chart))
    V = mesh_vertices(h, cloud)
    npieces, nq, nc, _ = V.shape
    lines = [f"# pieces {npieces} grid {nq}x{nc}"]
    for v in V.reshape(-1, 3):
        lines.append("v " + " ".join(fmt(c) for c in v))
    faces = 0
    for p in range(npieces):
        base = p * nq * nc
        for i in range(nq - 1):
            for j in range(nc - 1):
                a = base + i * nc + j + 1
                lines.append(f"f {a} {a + nc} {a + nc + 1} {a + 1}")
                faces += 1
    Path(path).write_text("\n".join(lines) + "\n")
    return V.shape[0] * nq * nc, faces


def export_build(h: AssembledHypersurface, prefix, n_q: int = 41, n_chart: int = 24) -> dict:
    """Mesh (n = 2, 3) or point cloud (n >= 4) plus metadata; returns written paths."""
    prefix = Path(prefix)
    out = {}
    if h.family.n in (2, 3):
        mesh = prefix.with_suffix(".obj")
        write_obj(h, mesh, n_q, n_chart)
        out["mesh"] = str(mesh)
    cloud_path = prefix.with_suffix(".csv")
    write_cloud_csv(sample_assembly(h, n_q=n_q, n_chart=n_chart), cloud_path)
    out["cloud"] = str(cloud_path)
    meta_path = prefix.with_suffix(".json")
    write_json(metadata(h), meta_path)
    out["metadata"] = str(meta_path)
    return out


def write_warped_csv(warped, path) -> int:
    """Warped points: s, chart_*, x_0..x_n, t (warped height), piece."""
    n = warped.base.shape[1] - 1
    header = (["s"] + [f"chart_{i}" for i in range(1, n)] + [f"x_{i}" for i in range(n + 1)]
              + ["t", "piece"])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(len(warped.t)):
            row = [fmt(warped.s[i])] + [fmt(v) for v in warped.chart[i]]
            row += [fmt(v) for v in warped.base[i]] + [fmt(warped.t[i]), str(int(warped.piece[i]))]
            w.writerow(row)
    return len(warped.t)


__all__ = [
    "fmt", "write_json", "metadata", "cloud_header", "write_cloud_csv", "slice_axes",
    "mesh_vertices", "write_obj", "export_build", "write_warped_csv",
]
