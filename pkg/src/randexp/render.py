"""Escape-time classification of a rectangle of starting points.

This is a heuristic picture: a pixel is "escaped" when its orbit passes
Re z > threshold within the iteration cap.  Dark pixels are not certified
Fatou points, and when the Julia set is the whole plane the visible
structure is only the escape *rate*.
"""

import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend
from .errors import InvalidParameterError, RandExpError
from .orbit import EscapeConfig

__all__ = ["GridSpec", "EscapeGrid", "classify_grid", "pgm_bytes", "write_pgm", "png_bytes",
           "write_png"]


@dataclass(frozen=True)
class GridSpec:
    center: complex
    width: float
    height: float
    nx: int
    ny: int

    def __post_init__(self):
        if int(self.nx) < 1 or int(self.ny) < 1:
            raise InvalidParameterError("nx and ny must be at least 1")
        if not (self.width > 0 and self.height > 0):
            raise InvalidParameterError("width and height must be positive")

    def axes(self):
        """Real parts of the columns and imaginary parts of the rows (row 0 lowest)."""
        c = complex(self.center)
        i = np.arange(self.nx, dtype=np.float64)
        j = np.arange(self.ny, dtype=np.float64)
        re = c.real + ((i + 0.5) / self.nx - 0.5) * self.width
        im = c.imag + ((j + 0.5) / self.ny - 0.5) * self.height
        return re, im

    def points(self):
        re, im = self.axes()
        return re[None, :] + 1j * im[:, None]

    def refine(self, factor=3):
        """Same rectangle with ``factor`` times more pixels per axis.

        For odd factors every old pixel centre is a new pixel centre, at
        offset (factor // 2) within its block.
        """
        return GridSpec(self.center, self.width, self.height, self.nx * factor, self.ny * factor)


@dataclass
class EscapeGrid:
    spec: GridSpec
    data: np.ndarray  # (ny, nx) int32, row 0 = lowest Im
    cap: int
    metadata: dict = field(default_factory=dict)

    @property
    def sentinel(self):
        return self.cap + 1

    def escaped_fraction(self):
        d = self.data
        return float(np.count_nonzero((d > 0) & (d <= self.cap))) / d.size


def classify_grid(seq, spec, cfg=None, n1=None, threads=1, kernels=None):
    """Escape step per pixel (0 = no escape within cfg.max_iter).

    Sequence errors mark every pixel with the sentinel cap + 1 and are
    recorded in ``metadata["error"]``.  Rows are split into chunks across
    ``threads`` workers; the result does not depend on the split.
    """
    cfg = cfg or EscapeConfig()
    k_mod = kernels or _backend.kernels
    cap = int(cfg.max_iter)
    if n1 is None:
        n1 = seq.start_index - 1
    data = np.zeros((spec.ny, spec.nx), dtype=np.int32)
    meta = {"cap": cap, "re_threshold": cfg.re_threshold, "sequence": seq.to_dict(),
            "n1": int(n1), "backend": getattr(k_mod, "__name__", "?")}
    try:
        lams = np.ascontiguousarray(seq.values(int(n1) + 1, cap))
    except RandExpError as exc:
        data[:] = cap + 1
        meta["error"] = str(exc)
        return EscapeGrid(spec, data, cap, meta)
    re, im = spec.axes()

    def job(rows):
        a, b = rows
        re0 = np.ascontiguousarray(np.broadcast_to(re[None, :], (b - a, spec.nx)).ravel())
        im0 = np.ascontiguousarray(np.broadcast_to(im[a:b, None], (b - a, spec.nx)).ravel())
        out = np.zeros(re0.size, dtype=np.int32)
        k_mod.escape_grid(lams, re0, im0, float(cfg.re_threshold), out)
        data[a:b] = out.reshape(b - a, spec.nx)

    threads = max(1, int(threads))
    nchunks = min(spec.ny, 4 * threads) if threads > 1 else 1
    edges = np.linspace(0, spec.ny, nchunks + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if threads == 1:
        for c in chunks:
            job(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(job, chunks))
    return EscapeGrid(spec, data, cap, meta)


def _gray(grid):
    d = grid.data.astype(np.int64)
    ok = (d > 0) & (d <= grid.cap)
    v = np.where(ok, (255 * d) // grid.cap, 0).astype(np.uint8)
    # image rows run top to bottom, i.e. from largest Im down
    return np.ascontiguousarray(v[::-1])


def pgm_bytes(grid):
    """Binary 8-bit PGM: value floor(255 step / cap), 0 for no escape or sentinel."""
    header = f"P5\n{grid.spec.nx} {grid.spec.ny}\n255\n".encode("ascii")
    return header + _gray(grid).tobytes()


def write_pgm(grid, path):
    path = Path(path)
    try:
        path.write_bytes(pgm_bytes(grid))
    except OSError as exc:
        raise OSError(f"cannot write PGM to {path}: {exc}") from exc
    return path


def _chunk(tag, payload):
    body = tag + payload
    return struct.pack(">I", len(payload)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)


def png_bytes(grid):
    """Grayscale PNG of the same pixels as :func:`pgm_bytes`."""
    img = _gray(grid)
    h, w = img.shape
    raw = b"".join(b"\x00" + img[r].tobytes() for r in range(h))
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + _chunk(b"IHDR", ihdr)
            + _chunk(b"IDAT", zlib.compress(raw, 9)) + _chunk(b"IEND", b""))


def write_png(grid, path):
    path = Path(path)
    try:
        path.write_bytes(png_bytes(grid))
    except OSError as exc:
        raise OSError(f"cannot write PNG to {path}: {exc}") from exc
    return path
