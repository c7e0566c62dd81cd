"""Binary PGM (P5) read/write plus a grayscale PNG convenience reader.

PGM is the canonical interchange format: fields map linearly to [0,1]
(value/maxval), masks require every pixel to be 0 or maxval. 16-bit PGM
samples are big-endian per the Netpbm spec.
"""

import numpy as np


class PgmError(ValueError):
    pass


def _read_header_token(fh):
    tok = b""
    while True:
        c = fh.read(1)
        if not c:
            raise PgmError("truncated PGM header")
        if c == b"#":  # comment to end of line
            while c not in (b"\n", b""):
                c = fh.read(1)
            continue
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM into a float64 field in [0,1]."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
        if magic == b"P2":
            raise PgmError(f"{path}: ASCII (P2) PGM not supported, use binary P5")
        if magic != b"P5":
            raise PgmError(f"{path}: not a P5 PGM (magic {magic!r})")
        width = int(_read_header_token(fh))
        height = int(_read_header_token(fh))
        maxval = int(_read_header_token(fh))
        if maxval not in (255, 65535):
            raise PgmError(f"{path}: unsupported maxval {maxval}")
        dtype = np.dtype(">u2") if maxval == 65535 else np.dtype(np.uint8)
        raw = fh.read(width * height * dtype.itemsize)
        if len(raw) != width * height * dtype.itemsize:
            raise PgmError(f"{path}: truncated pixel data")
        data = np.frombuffer(raw, dtype=dtype).reshape(height, width)
    return data.astype(np.float64) / maxval


def read_mask(path) -> np.ndarray:
    """Read a PGM whose pixels are all 0 or maxval as a {0,1} mask."""
    f = read_pgm(path)
    if not np.all((f == 0.0) | (f == 1.0)):
        raise PgmError(f"{path}: mask pixels must be 0 or maxval")
    return f


def write_pgm(path, values, maxval: int = 255):
    """Write a field in [0,1] as binary PGM (rounded to maxval levels)."""
    if maxval not in (255, 65535):
        raise PgmError(f"unsupported maxval {maxval}")
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise PgmError(f"expected 2D field, got shape {v.shape}")
    if v.min() < 0 or v.max() > 1:
        raise PgmError("field values must lie in [0,1]")
    q = np.rint(v * maxval)
    data = q.astype(">u2") if maxval == 65535 else q.astype(np.uint8)
    h, w = v.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        fh.write(data.tobytes())


def read_image(path) -> np.ndarray:
    """Read PGM, or grayscale PNG as a convenience, into a [0,1] field."""
    path = str(path)
    if path.lower().endswith(".png"):
        from PIL import Image

        img = Image.open(path).convert("L")
        return np.asarray(img, dtype=np.float64) / 255.0
    return read_pgm(path)
