"""Raster input/output and the decomposition JSON format.

Supported inputs are 8-bit PNG (grey, grey+alpha, palette, RGB, RGBA) and
binary PPM/PGM. Intensities stay on the raw 0-255 scale.
"""

import colorsys
import json
import math
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .tensor import as_image_tensor

__all__ = [
    "ImageFormatError",
    "LABEL_PALETTE",
    "OVERLAY_COLORS",
    "load_image",
    "save_image",
    "write_label_map",
    "read_label_map",
    "write_surface_overlay",
    "overlay_colors",
    "decomposition_to_json",
    "decomposition_from_json",
    "export_decomposition",
    "import_decomposition",
]

_FORMATS = {"PNG", "PPM"}  # Pillow reports PGM/PBM as PPM
_MODES_8BIT = {"1", "L", "LA", "P", "PA", "RGB", "RGBA"}


class ImageFormatError(OSError):
    """An image file is unreadable, truncated or of an unsupported kind."""


def _build_palette():
    # golden-angle hue walk with alternating value so neighbours in index differ strongly
    colors = []
    for i in range(256):
        hue = (i * 0.6180339887498949) % 1.0
        sat = 0.85 if i % 3 else 0.6
        val = 0.95 if i % 2 == 0 else 0.7
        r, g, b = colorsys.hsv_to_rgb(hue, sat, val)
        colors.append((int(round(r * 255)), int(round(g * 255)), int(round(b * 255))))
    return tuple(colors)


#: Fixed label-map palette: entry ``i`` is the RGB colour of label ``i``.
LABEL_PALETTE = _build_palette()
#: Colour table used for surface overlays.
OVERLAY_COLORS = LABEL_PALETTE[:64]


def load_image(path):
    """Read a PNG/PPM/PGM file into an ``(H, W, N)`` float tensor.

    Grey images give ``N = 1``, colour images ``N = 3``; alpha is dropped.
    """
    path = Path(path)
    fmt = path.suffix.lstrip(".").upper() or "unknown"
    try:
        with Image.open(path) as im:
            fmt = im.format or fmt
            if fmt not in _FORMATS:
                raise ImageFormatError(f"{path}: unsupported image format {fmt} (expected PNG, PPM or PGM)")
            if im.mode not in _MODES_8BIT:
                raise ImageFormatError(f"{path}: unsupported {fmt} pixel mode {im.mode} (8-bit only)")
            im.load()
            if im.mode in ("1", "L", "LA"):
                arr = np.asarray(im.convert("L"))
            else:
                arr = np.asarray(im.convert("RGB"))
    except (ImageFormatError, FileNotFoundError):
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageFormatError(f"{path}: cannot decode {fmt} image ({exc})") from exc
    return as_image_tensor(arr.astype(float))


def save_image(tensor, path):
    """Write an integer-valued tensor with ``N`` in {1, 3} as an 8-bit PNG."""
    a = as_image_tensor(tensor)
    if a.shape[2] not in (1, 3):
        raise ValueError(f"can only save 1- or 3-channel images, got N={a.shape[2]}")
    u8 = np.clip(np.rint(a), 0, 255).astype(np.uint8)
    im = Image.fromarray(u8[:, :, 0], "L") if a.shape[2] == 1 else Image.fromarray(u8, "RGB")
    im.save(path, format="PNG")


def write_label_map(labels, path):
    """Write a label map as an indexed-colour PNG using :data:`LABEL_PALETTE`."""
    lab = np.asarray(labels)
    if lab.ndim != 2 or lab.size == 0:
        raise ValueError(f"label map must be a non-empty 2-D array, got shape {lab.shape}")
    if lab.min() < 0 or lab.max() > 255:
        raise ValueError(f"labels must lie in [0, 255] for a 256-colour palette (max {lab.max()})")
    im = Image.fromarray(lab.astype(np.uint8), "P")
    im.putpalette([c for rgb in LABEL_PALETTE for c in rgb])
    im.save(path, format="PNG")


def read_label_map(path):
    """Decode a label PNG written by :func:`write_label_map` (or a grey PNG)."""
    try:
        with Image.open(path) as im:
            if im.mode not in ("P", "L"):
                raise ImageFormatError(f"{path}: label maps must be palette or grey images, got {im.mode}")
            im.load()
            return np.asarray(im).astype(np.int64)
    except (ImageFormatError, FileNotFoundError):
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageFormatError(f"{path}: cannot decode label map ({exc})") from exc


def overlay_colors(d):
    """Colour table index per surface.

    Surfaces are coloured greedily in id order: each takes the first table
    slot, probing from ``id mod 64``, that no already-coloured 4-neighbour
    surface uses.
    """
    idx = d.surface_index_map()
    n = len(d.surfaces)
    neigh = [set() for _ in range(n)]
    for a, b in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
        diff = a != b
        for u, v in zip(a[diff].tolist(), b[diff].tolist()):
            neigh[u].add(v)
            neigh[v].add(u)
    size = len(OVERLAY_COLORS)
    slot = [-1] * n
    for i in range(n):
        used = {slot[j] for j in neigh[i] if slot[j] >= 0}
        start = i % size
        for k in range(size):
            c = (start + k) % size
            if c not in used:
                slot[i] = c
                break
        else:
            slot[i] = start
    return np.array(slot, dtype=np.int64), idx


def write_surface_overlay(d, path):
    """RGB PNG painting every surface in its own colour."""
    slot, idx = overlay_colors(d)
    table = np.array(OVERLAY_COLORS, dtype=np.uint8)
    rgb = table[slot[idx]]
    Image.fromarray(rgb, "RGB").save(path, format="PNG")


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    return format(x, ".17g")


def decomposition_to_json(d):
    """Serialise a decomposition; floats carry 17 significant digits."""
    p = d.params
    lines = [
        "{",
        f'  "height": {d.height},',
        f'  "width": {d.width},',
        f'  "n_features": {d.n_features},',
        f'  "epsilon": {_num(p.epsilon)},',
        f'  "npar": {_num(p.npar)},',
        f'  "formulation": {json.dumps(p.formulation)},',
        '  "surfaces": [',
    ]
    recs = []
    for s in d.surfaces:
        pix = ", ".join(f"[{r}, {c}]" for r, c in s.pixel_locs)
        mean = ", ".join(_num(v) for v in s.mean_feature)
        recs.append(f'    {{"id": {s.id}, "n_pixels": {s.size}, "pixels": [{pix}], "mean": [{mean}]}}')
    lines.append(",\n".join(recs))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(x for x in lines if x) + "\n"


def decomposition_from_json(text, image=None):
    """Parse and validate a decomposition document.

    Without ``image`` the surfaces carry no feature matrices. With it, the
    features are re-attached and the stored means are checked against them.
    """
    from .decompose import (
        Decomposition,
        DecompositionError,
        DecomposeParams,
        Surface,
        validate_decomposition,
    )

    try:
        doc = json.loads(text)
        params = DecomposeParams(epsilon=float(doc["epsilon"]), npar=float(doc["npar"]),
                                 formulation=str(doc["formulation"]))
        h, w, n_feat = int(doc["height"]), int(doc["width"]), int(doc["n_features"])
        recs = doc["surfaces"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DecompositionError(f"malformed decomposition document: {exc}") from exc
    img = None
    if image is not None:
        img = as_image_tensor(image)
        if img.shape != (h, w, n_feat):
            raise DecompositionError(f"image shape {img.shape} does not match document ({h}, {w}, {n_feat})")
    surfaces = []
    for rec in recs:
        try:
            locs = tuple((int(r), int(c)) for r, c in rec["pixels"])
            mean = tuple(float(v) for v in rec["mean"])
            sid = int(rec["id"])
            count = int(rec["n_pixels"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DecompositionError(f"malformed surface record: {exc}") from exc
        if count != len(locs):
            raise DecompositionError(f"surface {sid} declares {count} pixels but lists {len(locs)}")
        feats = None
        if img is not None and locs:
            arr = np.asarray(locs)
            if arr.min() >= 0 and arr[:, 0].max() < h and arr[:, 1].max() < w:
                feats = img[arr[:, 0], arr[:, 1], :].T
        surfaces.append(Surface(id=sid, pixel_locs=locs, mean_feature=mean, features=feats))
    d = Decomposition(surfaces=tuple(surfaces), params=params, height=h, width=w, n_features=n_feat)
    validate_decomposition(d)
    return d


def export_decomposition(d, path):
    Path(path).write_text(decomposition_to_json(d), encoding="utf-8")


def import_decomposition(path, image=None):
    return decomposition_from_json(Path(path).read_text(encoding="utf-8"), image=image)
