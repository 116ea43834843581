"""Operators on the t-fold tensor space with dense and COO forms."""
import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ValidationError


class Operator:
    """A ``d**t x d**t`` complex matrix.

    Either a dense ``ndarray`` or a scipy sparse matrix may back the operator;
    ``dense()`` and ``coo()`` materialize the other form on demand.  Operators
    are treated as immutable: the accessors return copies only when a format
    conversion happens, so callers must not mutate what they get back.
    """

    __slots__ = ("d", "t", "_dense", "_sparse")

    def __init__(self, d, t, matrix):
        d, t = int(d), int(t)
        dim = d**t
        if matrix.shape != (dim, dim):
            raise DimensionError(
                f"matrix shape {matrix.shape} does not match d**t = {dim}"
            )
        self.d = d
        self.t = t
        if sp.issparse(matrix):
            self._sparse = sp.csr_matrix(matrix, dtype=complex)
            self._dense = None
        else:
            self._dense = np.asarray(matrix, dtype=complex)
            self._sparse = None

    @property
    def dim(self):
        return self.d**self.t

    @property
    def shape(self):
        return (self.dim, self.dim)

    @property
    def is_sparse(self):
        return self._sparse is not None

    def dense(self):
        if self._dense is None:
            self._dense = self._sparse.toarray()
        return self._dense

    def sparse(self):
        if self._sparse is None:
            self._sparse = sp.csr_matrix(self._dense)
        return self._sparse

    def coo(self):
        """Sorted COO triples as ``(rows, cols, values)``."""
        m = self.sparse().tocoo()
        order = np.lexsort((m.col, m.row))
        return m.row[order], m.col[order], m.data[order]

    def matrix(self):
        """The backing matrix, whichever form is materialized (sparse preferred)."""
        return self._sparse if self._sparse is not None else self._dense

    @property
    def nnz(self):
        if self._sparse is not None:
            return self._sparse.nnz
        return int(np.count_nonzero(self._dense))

    def trace(self):
        return complex(self.matrix().diagonal().sum())

    def adjoint(self):
        return Operator(self.d, self.t, self.matrix().conj().T)

    def frobenius(self):
        if self._sparse is not None:
            return float(np.sqrt(np.sum(np.abs(self._sparse.data) ** 2)))
        return float(np.linalg.norm(self._dense))

    def _coerce(self, other):
        if isinstance(other, Operator):
            if (other.d, other.t) != (self.d, self.t):
                raise DimensionError("operators act on different spaces")
            return other.matrix()
        return other

    def __matmul__(self, other):
        out = self.matrix() @ self._coerce(other)
        if isinstance(other, Operator):
            return Operator(self.d, self.t, out)
        return out

    def __add__(self, other):
        return Operator(self.d, self.t, self.matrix() + self._coerce(other))

    def __sub__(self, other):
        return Operator(self.d, self.t, self.matrix() - self._coerce(other))

    def __mul__(self, scalar):
        return Operator(self.d, self.t, self.matrix() * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(self.d, self.t, -self.matrix())

    def allclose(self, other, atol=1e-12):
        diff = self.matrix() - self._coerce(other)
        if sp.issparse(diff):
            diff = diff.toarray()
        return bool(np.max(np.abs(diff), initial=0.0) <= atol)

    def __repr__(self):
        kind = "coo" if self.is_sparse else "dense"
        return f"Operator(d={self.d}, t={self.t}, {kind}, nnz={self.nnz})"

    # -- serialization -----------------------------------------------------

    def to_dict(self, fmt="coo"):
        """JSON-ready dict; ``fmt`` is ``"dense"`` (row-major) or ``"coo"``."""
        if fmt == "dense":
            flat = self.dense().ravel()
            data = [[float(z.real), float(z.imag)] for z in flat]
        elif fmt == "coo":
            rows, cols, vals = self.coo()
            data = [
                [int(r), int(c), float(v.real), float(v.imag)]
                for r, c, v in zip(rows, cols, vals)
            ]
        else:
            raise ValidationError(f"unknown operator format {fmt!r}")
        return {"d": self.d, "t": self.t, "dim": self.dim, "format": fmt, "data": data}

    @classmethod
    def from_dict(cls, obj):
        d, t = int(obj["d"]), int(obj["t"])
        dim = d**t
        if int(obj.get("dim", dim)) != dim:
            raise DimensionError("dim field disagrees with d**t")
        fmt = obj["format"]
        data = obj["data"]
        if fmt == "dense":
            arr = np.array([complex(re, im) for re, im in data], dtype=complex)
            if arr.size != dim * dim:
                raise DimensionError("dense payload has the wrong length")
            return cls(d, t, arr.reshape(dim, dim))
        if fmt == "coo":
            if not data:
                return cls(d, t, sp.csr_matrix((dim, dim), dtype=complex))
            arr = np.asarray(data, dtype=float)
            m = sp.coo_matrix(
                (arr[:, 2] + 1j * arr[:, 3], (arr[:, 0].astype(int), arr[:, 1].astype(int))),
                shape=(dim, dim),
            )
            return cls(d, t, m.tocsr())
        raise ValidationError(f"unknown operator format {fmt!r}")
