"""Complex vector/matrix/3D-tensor containers and the quadratic-form kernels.

The hot operation of the whole simulator is w_t . H . w_r^T (plain transpose,
no conjugation; callers conjugate steering vectors themselves). Two kernel
backends sit behind the same interface: "optimized" (numpy dot) and "naive"
(pure Python loops, the fallback-container analog used as benchmark baseline).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionError

_BACKENDS = ("optimized", "naive")
_active_backend = "optimized"


def set_backend(name: str) -> None:
    """Select the default quadratic-form kernel ("optimized" or "naive")."""
    global _active_backend
    if name not in _BACKENDS:
        raise ConfigurationError(
            f"unknown backend {name!r}, expected one of {_BACKENDS}")
    _active_backend = name


def get_backend() -> str:
    return _active_backend


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class ComplexVector:
    """Immutable 1-D complex array, length >= 1."""

    __slots__ = ("_a",)

    def __init__(self, entries: Iterable[complex]):
        a = np.array(list(entries) if not isinstance(entries, np.ndarray) else entries,
                     dtype=np.complex128)
        if a.ndim != 1 or a.size < 1:
            raise DimensionError("ComplexVector requires a 1-D sequence of length >= 1")
        self._a = _freeze(a)

    @classmethod
    def zeros(cls, size: int) -> "ComplexVector":
        if size < 1:
            raise DimensionError("declared size must be >= 1")
        return cls(np.zeros(size, dtype=np.complex128))

    @property
    def entries(self) -> np.ndarray:
        return self._a

    def __len__(self) -> int:
        return self._a.size

    def __getitem__(self, i: int) -> complex:
        return complex(self._a[i])

    def norm(self) -> float:
        """Euclidean norm sqrt(sum |entry|^2)."""
        return float(np.linalg.norm(self._a))

    def __repr__(self) -> str:
        return f"ComplexVector(len={self._a.size})"


class ComplexMatrix:
    """Immutable rows x cols complex matrix, row-major storage."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError("ComplexMatrix requires a 2-D array with positive shape")
        self._a = _freeze(a)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ComplexMatrix":
        if rows < 1 or cols < 1:
            raise DimensionError("declared shape must be positive")
        return cls(np.zeros((rows, cols), dtype=np.complex128))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def entries(self) -> np.ndarray:
        return self._a

    def entry(self, r: int, c: int) -> complex:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise DimensionError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
        return complex(self._a[r, c])

    def resize(self, rows: int, cols: int) -> "ComplexMatrix":
        """New matrix of exactly (rows, cols); overlap copied, growth zero-filled."""
        if rows < 1 or cols < 1:
            raise DimensionError("resize target must be positive")
        out = np.zeros((rows, cols), dtype=np.complex128)
        r = min(rows, self.rows)
        c = min(cols, self.cols)
        out[:r, :c] = self._a[:r, :c]
        return ComplexMatrix(out)

    def __repr__(self) -> str:
        return f"ComplexMatrix({self.rows}x{self.cols})"


class ComplexTensor3:
    """Immutable stack of N equally shaped ComplexMatrix pages (page-major)."""

    __slots__ = ("_a",)

    def __init__(self, pages: Sequence[ComplexMatrix] | np.ndarray):
        if isinstance(pages, np.ndarray):
            a = np.array(pages, dtype=np.complex128)
            if a.ndim != 3:
                raise DimensionError("ComplexTensor3 requires a 3-D array")
        else:
            pages = list(pages)
            if not pages:
                raise DimensionError("ComplexTensor3 requires at least one page")
            shape = (pages[0].rows, pages[0].cols)
            for i, p in enumerate(pages):
                if (p.rows, p.cols) != shape:
                    raise DimensionError(
                        f"page {i} is {p.rows}x{p.cols}, expected {shape[0]}x{shape[1]}")
            a = np.stack([p.entries for p in pages])
        if a.shape[0] < 1 or a.shape[1] < 1 or a.shape[2] < 1:
            raise DimensionError("ComplexTensor3 requires positive dimensions")
        self._a = _freeze(a)

    @property
    def n_pages(self) -> int:
        return self._a.shape[0]

    @property
    def rows(self) -> int:
        return self._a.shape[1]

    @property
    def cols(self) -> int:
        return self._a.shape[2]

    @property
    def entries(self) -> np.ndarray:
        return self._a

    def page(self, n: int) -> ComplexMatrix:
        if not 0 <= n < self.n_pages:
            raise DimensionError(f"page {n} outside 0..{self.n_pages - 1}")
        return ComplexMatrix(self._a[n])

    def __repr__(self) -> str:
        return f"ComplexTensor3({self.n_pages} pages of {self.rows}x{self.cols})"


def _as_vec(w) -> np.ndarray:
    return w.entries if isinstance(w, ComplexVector) else np.asarray(w, dtype=np.complex128)


def _as_mat(H) -> np.ndarray:
    return H.entries if isinstance(H, ComplexMatrix) else np.asarray(H, dtype=np.complex128)


def quadratic_form(w_t, H, w_r, backend: str | None = None) -> complex:
    """sum_u sum_s w_t[u] * H[u, s] * w_r[s] (plain transpose on w_r).

    Raises DimensionError when len(w_t) != rows or len(w_r) != cols.
    """
    wt = _as_vec(w_t)
    wr = _as_vec(w_r)
    h = _as_mat(H)
    if wt.shape[0] != h.shape[0] or wr.shape[0] != h.shape[1]:
        raise DimensionError(
            f"quadratic_form: w_t({wt.shape[0]}) x H({h.shape[0]}x{h.shape[1]}) "
            f"x w_r({wr.shape[0]}) do not conform")
    if (backend or _active_backend) == "naive":
        acc = complex(0.0)
        for u in range(h.shape[0]):
            row = h[u]
            wtu = complex(wt[u])
            for s in range(h.shape[1]):
                acc += wtu * complex(row[s]) * complex(wr[s])
        return acc
    return complex(wt @ h @ wr)


def tensor_quadratic_form(w_t, H3: ComplexTensor3, w_r, backend: str | None = None) -> ComplexVector:
    """Per-page quadratic form; entry n is quadratic_form(w_t, page n, w_r)
    up to floating-point summation order.

    The optimized backend contracts all pages in one einsum call; the naive
    backend loops pages and entries.
    """
    pages = H3.entries if isinstance(H3, ComplexTensor3) else np.asarray(H3, dtype=np.complex128)
    if (backend or _active_backend) == "naive":
        out = np.empty(pages.shape[0], dtype=np.complex128)
        for n in range(pages.shape[0]):
            try:
                out[n] = quadratic_form(w_t, pages[n], w_r, backend="naive")
            except DimensionError as e:
                raise DimensionError(f"page {n}: {e}") from None
        return ComplexVector(out)
    wt = _as_vec(w_t)
    wr = _as_vec(w_r)
    if wt.shape[0] != pages.shape[1] or wr.shape[0] != pages.shape[2]:
        raise DimensionError(
            f"page 0: quadratic_form: w_t({wt.shape[0]}) x H({pages.shape[1]}x"
            f"{pages.shape[2]}) x w_r({wr.shape[0]}) do not conform")
    return ComplexVector(np.einsum("i,nij,j->n", wt, pages, wr))


def write_tensor_text(t: ComplexTensor3 | ComplexMatrix, path) -> None:
    """Plain-text serialization: header `rows cols pages`, one `re im` per entry.

    Entries follow storage order (page-major, row-major within a page). A
    matrix writes as a single page.
    """
    a = t.entries[None, :, :] if isinstance(t, ComplexMatrix) else t.entries
    with open(path, "w") as f:
        f.write(f"{a.shape[1]} {a.shape[2]} {a.shape[0]}\n")
        for z in a.ravel():
            f.write(f"{float(z.real)!r} {float(z.imag)!r}\n")


def read_tensor_text(path) -> ComplexTensor3:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 3:
            raise DimensionError("tensor text header must be `rows cols pages`")
        rows, cols, pages = (int(x) for x in header)
        data = np.loadtxt(f, dtype=np.float64, ndmin=2)
    if data.shape != (rows * cols * pages, 2):
        raise DimensionError(
            f"expected {rows * cols * pages} `re im` lines, found {data.shape[0]}")
    a = (data[:, 0] + 1j * data[:, 1]).reshape(pages, rows, cols)
    return ComplexTensor3(a)
