"""Matrix Market exchange format reader/writer.

Supports ``coordinate real general`` (written for :class:`CsrMatrix`) and
``array real general`` (written for dense arrays). Indices are 1-based on
disk and 0-based in memory; values are emitted with 17 significant digits so
a write/read round trip reproduces every double bit-exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import MatrixMarketError
from .matrix import CsrMatrix, as_dense

_BANNER_COO = "%%MatrixMarket matrix coordinate real general"
_BANNER_ARR = "%%MatrixMarket matrix array real general"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def mm_write(path, A) -> None:
    """Write A to `path`; CSR goes to coordinate format, dense to array format."""
    if isinstance(A, CsrMatrix):
        counts = np.diff(A.indptr)
        row_ids = np.repeat(np.arange(A.rows, dtype=np.int64), counts)
        with open(path, "w") as fh:
            fh.write(_BANNER_COO + "\n")
            fh.write(f"{A.rows} {A.cols} {A.nnz}\n")
            for i, j, v in zip(row_ids, A.indices, A.data):
                fh.write(f"{i + 1} {j + 1} {_fmt(v)}\n")
    else:
        arr = as_dense(A)
        m, n = arr.shape
        with open(path, "w") as fh:
            fh.write(_BANNER_ARR + "\n")
            fh.write(f"{m} {n}\n")
            # Array format is column-major.
            for j in range(n):
                for i in range(m):
                    fh.write(_fmt(arr[i, j]) + "\n")


def mm_read(path):
    """Read a Matrix Market file; returns CsrMatrix or ndarray per its format.

    Malformed headers, out-of-range indices and duplicate coordinates raise
    :class:`MatrixMarketError` carrying the offending line number.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketError("empty file", 1)

    banner = lines[0].strip()
    parts = banner.split()
    if (
        len(parts) != 5
        or not parts[0].startswith("%%MatrixMarket")
        or parts[1].lower() != "matrix"
    ):
        raise MatrixMarketError(f"malformed banner: {banner!r}", 1)
    fmt, field, symmetry = parts[2].lower(), parts[3].lower(), parts[4].lower()
    if fmt not in ("coordinate", "array"):
        raise MatrixMarketError(f"unsupported format {fmt!r}", 1)
    if field != "real":
        raise MatrixMarketError(f"unsupported field {field!r}", 1)
    if symmetry != "general":
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", 1)

    # Skip comments/blank lines to locate the size line.
    ln = 1
    while ln < len(lines) and (not lines[ln].strip() or lines[ln].lstrip().startswith("%")):
        ln += 1
    if ln >= len(lines):
        raise MatrixMarketError("missing size line", len(lines))
    size_line_no = ln + 1
    size_parts = lines[ln].split()

    if fmt == "coordinate":
        if len(size_parts) != 3:
            raise MatrixMarketError("size line must be 'rows cols nnz'", size_line_no)
        try:
            rows, cols, nnz = (int(p) for p in size_parts)
        except ValueError:
            raise MatrixMarketError("non-integer size entry", size_line_no) from None
        ri = np.empty(nnz, dtype=np.int64)
        ci = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        k = 0
        for off, raw in enumerate(lines[ln + 1 :], start=size_line_no + 1):
            text = raw.strip()
            if not text or text.startswith("%"):
                continue
            if k >= nnz:
                raise MatrixMarketError(f"more than {nnz} entries", off)
            fields = text.split()
            if len(fields) != 3:
                raise MatrixMarketError("entry must be 'i j value'", off)
            try:
                i, j, v = int(fields[0]), int(fields[1]), float(fields[2])
            except ValueError:
                raise MatrixMarketError(f"malformed entry {text!r}", off) from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(
                    f"index ({i}, {j}) outside {rows} x {cols}", off
                )
            ri[k], ci[k], vals[k] = i - 1, j - 1, v
            k += 1
        if k != nnz:
            raise MatrixMarketError(f"expected {nnz} entries, found {k}", len(lines))
        order = np.lexsort((ci, ri))
        ri, ci, vals = ri[order], ci[order], vals[order]
        if nnz > 1:
            dup = (np.diff(ri) == 0) & (np.diff(ci) == 0)
            if np.any(dup):
                # Recover the file line of the duplicate for the error message.
                d = int(np.flatnonzero(dup)[0])
                want = (ri[d], ci[d])
                seen = 0
                for off, raw in enumerate(lines[ln + 1 :], start=size_line_no + 1):
                    text = raw.strip()
                    if not text or text.startswith("%"):
                        continue
                    fields = text.split()
                    if (int(fields[0]) - 1, int(fields[1]) - 1) == want:
                        seen += 1
                        if seen == 2:
                            raise MatrixMarketError(
                                f"duplicate coordinate ({want[0] + 1}, {want[1] + 1})",
                                off,
                            )
                raise MatrixMarketError(
                    f"duplicate coordinate ({want[0] + 1}, {want[1] + 1})",
                    len(lines),
                )
        return CsrMatrix.from_coo(rows, cols, ri, ci, vals)

    # Dense array format.
    if len(size_parts) != 2:
        raise MatrixMarketError("size line must be 'rows cols'", size_line_no)
    try:
        rows, cols = (int(p) for p in size_parts)
    except ValueError:
        raise MatrixMarketError("non-integer size entry", size_line_no) from None
    total = rows * cols
    out = np.empty(total)
    k = 0
    for off, raw in enumerate(lines[ln + 1 :], start=size_line_no + 1):
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        if k >= total:
            raise MatrixMarketError(f"more than {total} entries", off)
        try:
            out[k] = float(text)
        except ValueError:
            raise MatrixMarketError(f"malformed value {text!r}", off) from None
        k += 1
    if k != total:
        raise MatrixMarketError(f"expected {total} values, found {k}", len(lines))
    return out.reshape((cols, rows)).T.copy()
