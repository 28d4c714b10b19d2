"""Hand-emitted ternary (barycentric) SVG plots for three-part data.

The ternary chart maps a three-part composition (a, b, c) to the plane
point (b + c/2, sqrt(3)/2 * c), i.e. onto a unit-edge triangle with part
1 at the origin, part 2 at (1, 0) and part 3 at the apex.  Points with
negative parts (out-of-simplex PCA approximations) simply land outside
the triangle.

The SVG text is assembled directly so the output is deterministic and
structurally testable: data markers carry class ``data``, rank-1
approximations ``approx``, the rank-1 subset polyline ``subset``,
residual connectors ``residual`` and the mean marker ``mean``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .benchmarks import PcaResult, clr_inv, alr_inv, ilr_inv
from .dataset import Dataset, atomic_write_text
from .errors import DimensionNotTwo, ValidationError
from .geometry import barycentric_matrix
from .psa_o import PsaODecomposition
from .psa_s import PsaSDecomposition

SQRT3_2 = float(np.sqrt(3.0) / 2.0)

#: Category colors, in sorted label order.
PALETTE = ("#d62728", "#2ca02c", "#17becf", "#9467bd",
           "#1f77b4", "#ff7f0e", "#8c564b", "#e377c2")

#: Points sampled along a curved rank-1 subset.
CURVE_SAMPLES = 128


def ternary_xy(points) -> np.ndarray:
    """Map rows (a, b, c) to plane coordinates (b + c/2, sqrt(3)/2 * c)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != 3:
        raise DimensionNotTwo(
            f"ternary charts need three parts, got {points.shape[-1]}"
        )
    x = points[..., 1] + 0.5 * points[..., 2]
    y = SQRT3_2 * points[..., 2]
    return np.column_stack([x, y])


@dataclass(frozen=True, eq=False)
class TernaryScene:
    """Everything one ternary chart draws, in three-part coordinates."""

    points: np.ndarray
    groups: tuple[str, ...] | None = None
    approximations: np.ndarray | None = None
    mean: np.ndarray | None = None
    subset: np.ndarray | None = None
    extra_markers: np.ndarray | None = None
    corner_labels: tuple[str, str, str] = ("V1", "V2", "V3")


def group_colors(groups: tuple[str, ...] | None, n: int) -> list[str]:
    """One fill color per marker.

    Categorical metadata cycles a fixed palette in sorted label order;
    metadata that parses as more than eight distinct numbers becomes a
    blue-to-red gradient.
    """
    if not groups:
        return ["#404040"] * n
    labels = list(groups)
    distinct = sorted(set(labels))
    if len(distinct) > len(PALETTE):
        try:
            numbers = np.asarray([float(g) for g in labels])
        except ValueError:
            pass
        else:
            lo, hi = numbers.min(), numbers.max()
            span = hi - lo if hi > lo else 1.0
            return [_blend("#1f77b4", "#d62728", (v - lo) / span) for v in numbers]
    color_of = {g: PALETTE[k % len(PALETTE)] for k, g in enumerate(distinct)}
    return [color_of[g] for g in labels]


def render_scene_svg(scene: TernaryScene) -> str:
    """Assemble the SVG text for one scene."""
    corners = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    corner_xy = ternary_xy(corners)

    stacks = [corner_xy, ternary_xy(scene.points)]
    for extra in (scene.approximations, scene.subset, scene.extra_markers):
        if extra is not None and len(extra):
            stacks.append(ternary_xy(extra))
    if scene.mean is not None:
        stacks.append(ternary_xy(scene.mean))
    all_xy = np.vstack(stacks)

    pad = 0.12
    xmin, ymin = all_xy.min(axis=0) - pad
    xmax, ymax = all_xy.max(axis=0) + pad
    width = 440.0
    scale = width / (xmax - xmin)
    height = (ymax - ymin) * scale

    def to_px(xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        return np.column_stack([(xy[:, 0] - xmin) * scale,
                                (ymax - xy[:, 1]) * scale])

    def fmt(v: float) -> str:
        return f"{v:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(width)}" '
        f'height="{fmt(height)}" viewBox="0 0 {fmt(width)} {fmt(height)}">',
    ]

    tri = to_px(corner_xy)
    tri_path = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in tri)
    parts.append(f'<polygon class="triangle" points="{tri_path}" '
                 'fill="none" stroke="#202020" stroke-width="1.2"/>')

    points_px = to_px(ternary_xy(scene.points))
    if scene.approximations is not None:
        approx_px = to_px(ternary_xy(scene.approximations))
        for (x0, y0), (x1, y1) in zip(points_px, approx_px):
            parts.append(f'<line class="residual" x1="{fmt(x0)}" y1="{fmt(y0)}" '
                         f'x2="{fmt(x1)}" y2="{fmt(y1)}" '
                         'stroke="#b0b0b0" stroke-width="0.6"/>')

    if scene.subset is not None and len(scene.subset):
        sub_px = to_px(ternary_xy(scene.subset))
        sub_path = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in sub_px)
        parts.append(f'<polyline class="subset" points="{sub_path}" '
                     'fill="none" stroke="#d62728" stroke-width="1.8"/>')

    if scene.extra_markers is not None and len(scene.extra_markers):
        for x, y in to_px(ternary_xy(scene.extra_markers)):
            parts.append(f'<path class="star" d="M {fmt(x - 3)} {fmt(y)} H {fmt(x + 3)} '
                         f'M {fmt(x)} {fmt(y - 3)} V {fmt(y + 3)} '
                         f'M {fmt(x - 2.1)} {fmt(y - 2.1)} L {fmt(x + 2.1)} {fmt(y + 2.1)} '
                         f'M {fmt(x - 2.1)} {fmt(y + 2.1)} L {fmt(x + 2.1)} {fmt(y - 2.1)}" '
                         'stroke="#666666" stroke-width="0.8" fill="none"/>')

    if scene.approximations is not None:
        for x, y in to_px(ternary_xy(scene.approximations)):
            parts.append(f'<circle class="approx" cx="{fmt(x)}" cy="{fmt(y)}" r="2.6" '
                         'fill="none" stroke="#303030" stroke-width="0.9"/>')

    colors = group_colors(scene.groups, len(points_px))
    for (x, y), color in zip(points_px, colors):
        parts.append(f'<circle class="data" cx="{fmt(x)}" cy="{fmt(y)}" r="3.2" '
                     f'fill="{color}" fill-opacity="0.85" stroke="none"/>')

    if scene.mean is not None:
        (mx, my), = to_px(ternary_xy(scene.mean))
        parts.append(f'<circle class="mean" cx="{fmt(mx)}" cy="{fmt(my)}" r="4.0" '
                     'fill="#000000"/>')

    anchors = ("end", "start", "middle")
    offsets = ((-6.0, 12.0), (6.0, 12.0), (0.0, -8.0))
    for (x, y), label, anchor, (dx, dy) in zip(tri, scene.corner_labels, anchors, offsets):
        parts.append(f'<text class="corner" x="{fmt(x + dx)}" y="{fmt(y + dy)}" '
                     f'text-anchor="{anchor}" font-family="sans-serif" '
                     f'font-size="13">{_escape(label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- scene builders ----------------------------------------------------

def scene_from_result(dataset: Dataset, result) -> TernaryScene:
    """Three-part scene for any fitted result on a d = 2 dataset."""
    if dataset.dimension != 2:
        raise DimensionNotTwo(
            f"dataset has {dataset.n_parts} parts; reduce to a rank-2 "
            "vertex set for a ternary chart"
        )
    groups = _groups(dataset)
    labels = tuple(dataset.column_labels)
    if isinstance(result, (PsaSDecomposition, PsaODecomposition)):
        return TernaryScene(
            points=dataset.values,
            groups=groups,
            approximations=result.approximation(1),
            mean=np.asarray(result.backwards_mean),
            subset=result.vertex_set(1).vertices,
            corner_labels=labels,
        )
    if isinstance(result, PcaResult):
        return _pca_scene(dataset, result, groups, labels)
    raise ValidationError(f"cannot draw a ternary scene for {type(result).__name__}")


def rank2_scene(decomposition, dataset: Dataset) -> TernaryScene:
    """Rank-2 reduction of a higher-dimensional PSA fit.

    Data points appear at their rank-2 barycentric coordinates; the
    rank-1 vertices, approximations and backwards mean are expressed in
    the same rank-2 vertex basis.  Corners are labelled with the pooled
    original parts.
    """
    if not isinstance(decomposition, (PsaSDecomposition, PsaODecomposition)):
        raise ValidationError("rank-2 reduction needs a PSA decomposition")
    if decomposition.dimension < 2:
        raise DimensionNotTwo("fit has no rank-2 vertex set")
    basis = decomposition.vertex_set(2)
    points = _rank2_coords(decomposition, 2)
    approx1, _ = barycentric_matrix(decomposition.approximation(1), basis.vertices)
    mean, _ = barycentric_matrix(np.asarray(decomposition.backwards_mean), basis.vertices)
    subset, _ = barycentric_matrix(decomposition.vertex_set(1).vertices, basis.vertices)
    labels = tuple(
        "+".join(dataset.column_labels[p] for p in group)
        for group in decomposition.partition(2)
    )
    return TernaryScene(
        points=np.clip(points, 0.0, None),
        groups=_groups(dataset),
        approximations=approx1,
        mean=mean[0],
        subset=subset,
        corner_labels=labels,  # type: ignore[arg-type]
    )


def emit_ternary_svg(dataset: Dataset, result, path) -> None:
    """Write the ternary chart of a fitted result; d = 2 datasets only."""
    atomic_write_text(path, render_scene_svg(scene_from_result(dataset, result)))


def _pca_scene(dataset: Dataset, result: PcaResult, groups, labels) -> TernaryScene:
    kind = result.transform.kind
    span = np.linspace(result.scores[:, 0].min(), result.scores[:, 0].max(),
                       CURVE_SAMPLES)
    line = result.mean + np.outer(span, result.components[0])
    if kind in ("clr", "alr", "ilr"):
        inverse = {"clr": clr_inv, "ilr": ilr_inv}.get(kind)
        if inverse is None:
            ref = result.transform.alr_ref
            def inverse(w):
                return alr_inv(w, ref)
        return TernaryScene(
            points=dataset.values,
            groups=groups,
            approximations=result.simplex_approximations[1],
            mean=result.simplex_approximations[0][0],
            subset=inverse(line),
            corner_labels=labels,
        )
    if kind == "power":
        project = result.hyperplane_projections
        return TernaryScene(
            points=dataset.values,
            groups=groups,
            approximations=project[1],
            mean=project[0][0],
            subset=_project_rows_to_unit_sum(line),
            extra_markers=_project_rows_to_unit_sum(result.approximations[-1]),
            corner_labels=labels,
        )
    return TernaryScene(
        points=dataset.values,
        groups=groups,
        approximations=result.approximations[1],
        mean=result.mean,
        subset=line[[0, -1]],
        corner_labels=labels,
    )


def _rank2_coords(decomposition, rank: int) -> np.ndarray:
    if isinstance(decomposition, PsaODecomposition):
        return decomposition.barycentric(rank)
    return decomposition.coefficients_at(rank)


def _project_rows_to_unit_sum(points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    excess = (points.sum(axis=-1, keepdims=True) - 1.0) / points.shape[-1]
    return points - excess


def _groups(dataset: Dataset) -> tuple[str, ...] | None:
    for column in dataset.row_metadata.values():
        return tuple(str(v) for v in column)
    return None


def _blend(hex_a: str, hex_b: str, t: float) -> str:
    a = [int(hex_a[k:k + 2], 16) for k in (1, 3, 5)]
    b = [int(hex_b[k:k + 2], 16) for k in (1, 3, 5)]
    mixed = [round(x + (y - x) * float(np.clip(t, 0.0, 1.0))) for x, y in zip(a, b)]
    return "#" + "".join(f"{v:02x}" for v in mixed)


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
