"""Truncated Taylor arithmetic in four variables.

A :class:`Jet` stores the Taylor coefficients of a (batch of) scalar
function(s) of ``z in R^4`` about a base point, truncated at total degree
``order``.  Coefficients live on axis 0 in graded-lex monomial order; the
remaining axes are batch axes and broadcast like numpy arrays.
"""
import functools
import itertools
import math

import numpy as np

NVAR = 4


@functools.lru_cache(maxsize=None)
def monomials(order):
    out = []
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(NVAR), deg):
            alpha = [0] * NVAR
            for i in combo:
                alpha[i] += 1
            out.append(tuple(alpha))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _index(order):
    return {a: i for i, a in enumerate(monomials(order))}


def ncoef(order):
    return math.comb(order + NVAR, NVAR)


@functools.lru_cache(maxsize=None)
def _mul_table(order):
    mons = monomials(order)
    idx = _index(order)
    rows = []
    for i, a in enumerate(mons):
        for j, b in enumerate(mons):
            if sum(a) + sum(b) <= order:
                k = idx[tuple(x + y for x, y in zip(a, b))]
                rows.append((k, i, j))
    rows.sort()
    rows = np.array(rows)
    # 0/1 summation matrix: products are gathered per pair, then summed per output by BLAS
    S = np.zeros((len(mons), len(rows)))
    S[rows[:, 0], np.arange(len(rows))] = 1.0
    return rows[:, 1], rows[:, 2], S


@functools.lru_cache(maxsize=None)
def _deriv_table(order, var):
    src = _index(order)
    idx, fac = [], []
    for b in monomials(order - 1):
        a = list(b)
        a[var] += 1
        idx.append(src[tuple(a)])
        fac.append(a[var])
    return np.array(idx), np.array(fac, dtype=float)


@functools.lru_cache(maxsize=None)
def _tensor_table(order, k):
    idx = _index(order)
    flat, fac = [], []
    for tup in itertools.product(range(NVAR), repeat=k):
        a = [0] * NVAR
        for i in tup:
            a[i] += 1
        flat.append(idx[tuple(a)])
        fac.append(math.prod(math.factorial(x) for x in a))
    return np.array(flat), np.array(fac, dtype=float)


class Jet:
    __array_priority__ = 1000

    def __init__(self, coeffs, order):
        self.c = np.asarray(coeffs, dtype=float)
        self.order = int(order)
        if self.c.shape[0] != ncoef(self.order):
            raise ValueError("coefficient axis does not match order")

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, dtype=float)
        c = np.zeros((ncoef(order),) + value.shape)
        c[0] = value
        return cls(c, order)

    @classmethod
    def variables(cls, z, order):
        """Coordinate jets at points ``z`` (shape ``(..., 4)``); batch axis 0 is the coordinate."""
        z = np.asarray(z, dtype=float)
        z = np.moveaxis(z, -1, 0)
        c = np.zeros((ncoef(order),) + z.shape)
        c[0] = z
        if order >= 1:
            for i in range(NVAR):
                c[1 + i, i] = 1.0
        return cls(c, order)

    @staticmethod
    def stack(jets, axis=0):
        order = min(j.order for j in jets)
        cs = [j.truncate(order).c for j in jets]
        shape = np.broadcast_shapes(*(c.shape for c in cs))
        cs = [np.broadcast_to(c, shape) for c in cs]
        if axis < 0:
            axis += len(shape)
        return Jet(np.stack(cs, axis=axis + 1), order)

    # shape handling -----------------------------------------------------
    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def ndim(self):
        return self.c.ndim - 1

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.c[(slice(None),) + key], self.order)

    def _axis(self, axis):
        return axis + self.ndim if axis < 0 else axis

    def sum(self, axis=0):
        return Jet(self.c.sum(axis=self._axis(axis) + 1), self.order)

    def moveaxis(self, src, dst):
        return Jet(np.moveaxis(self.c, self._axis(src) + 1, self._axis(dst) + 1), self.order)

    def reshape(self, *shape):
        return Jet(self.c.reshape((self.c.shape[0],) + tuple(shape)), self.order)

    def contract(self, arr, naxes):
        """Contract the leading ``naxes`` batch axes with the leading axes of a constant array.

        The result has batch shape ``arr.shape[naxes:] + self.shape[naxes:]``.
        """
        arr = np.asarray(arr, dtype=float)
        f = int(np.prod(self.shape[:naxes]))
        tail = arr.shape[naxes:]
        rest = self.shape[naxes:]
        c = self.c.reshape(self.c.shape[0], f, -1)
        out = arr.reshape(f, -1).T @ c
        return Jet(out.reshape((self.c.shape[0],) + tail + rest), self.order)

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise jet order")
        return Jet(self.c[: ncoef(order)], order)

    # Taylor data --------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    def tensor(self, k):
        """k-th derivative tensor at the base point, shape ``batch + (4,)*k``."""
        if k > self.order:
            raise ValueError("derivative order exceeds jet order")
        flat, fac = _tensor_table(self.order, k)
        t = self.c[flat] * fac.reshape((-1,) + (1,) * self.ndim)
        return np.moveaxis(t, 0, -1).reshape(self.shape + (NVAR,) * k)

    def deriv(self, var):
        idx, fac = _deriv_table(self.order, var)
        return Jet(self.c[idx] * fac.reshape((-1,) + (1,) * self.ndim), self.order - 1)

    def grad(self):
        return Jet.stack([self.deriv(i) for i in range(NVAR)], axis=0)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def _common(self, other):
        other = self._coerce(other)
        k = min(self.order, other.order)
        a, b = self.c[: ncoef(k)], other.c[: ncoef(k)]
        # numpy-style batch broadcasting with the coefficient axis kept in front
        if a.ndim < b.ndim:
            a = a.reshape(a.shape[:1] + (1,) * (b.ndim - a.ndim) + a.shape[1:])
        elif b.ndim < a.ndim:
            b = b.reshape(b.shape[:1] + (1,) * (a.ndim - b.ndim) + b.shape[1:])
        return Jet(a, k), Jet(b, k), k

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            c = np.array(np.broadcast_to(self.c, (self.c.shape[0],) + np.broadcast_shapes(self.shape, other.shape)))
            c[0] = c[0] + other
            return Jet(c, self.order)
        a, b, k = self._common(other)
        return Jet(a.c + b.c, k)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other, dtype=float), self.order)
        a, b, k = self._common(other)
        i, j, S = _mul_table(k)
        prod = a.c[i] * b.c[j]
        out = S @ prod.reshape(len(i), -1)
        return Jet(out.reshape((S.shape[0],) + prod.shape[1:]), k)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet.constant(np.ones(self.shape), self.order)
            for _ in range(p):
                out = out * self
            return out
        return self.power(p)

    # univariate composition --------------------------------------------
    def compose(self, taylor):
        """Return ``f(self)`` given ``taylor[k] = f^(k)(a0)/k!`` for k = 0..order."""
        d = Jet(np.array(self.c, copy=True), self.order)
        d.c[0] = 0.0
        out = Jet.constant(taylor[0], self.order)
        p = None
        for k in range(1, self.order + 1):
            p = d if p is None else p * d
            out = out + p * taylor[k]
        return out

    def reciprocal(self):
        a0 = self.value
        return self.compose([(-1.0) ** k * a0 ** (-k - 1) for k in range(self.order + 1)])

    def log(self):
        a0 = self.value
        t = [np.log(a0)] + [(-1.0) ** (k + 1) / (k * a0**k) for k in range(1, self.order + 1)]
        return self.compose(t)

    def exp(self):
        e = np.exp(self.value)
        return self.compose([e / math.factorial(k) for k in range(self.order + 1)])

    def power(self, p):
        a0 = self.value
        t = []
        for k in range(self.order + 1):
            binom = math.prod(p - i for i in range(k)) / math.factorial(k)
            t.append(binom * a0 ** (p - k))
        return self.compose(t)

    def sqrt(self):
        return self.power(0.5)

    def __repr__(self):
        return f"Jet(shape={self.shape}, order={self.order})"


def jet_matmul(a, b):
    """Matrix product over the first two batch axes of jets shaped ``(p, q, ...)`` and ``(q, s, ...)``."""
    out = None
    for j in range(a.shape[1]):
        term = a[:, j][:, None] * b[j][None, :]
        out = term if out is None else out + term
    return out


def jet_inv(m):
    """Inverse of a jet-valued square matrix ``(p, p, ...)`` by a nilpotent Neumann series."""
    m0 = np.moveaxis(m.value, (0, 1), (-2, -1))
    inv0 = np.moveaxis(np.linalg.inv(m0), (-2, -1), (0, 1))
    g0 = Jet.constant(inv0, m.order)
    d = Jet(np.array(m.c, copy=True), m.order)
    d.c[0] = 0.0
    step = -jet_matmul(g0, d)
    out = g0
    term = g0
    for _ in range(m.order):
        term = jet_matmul(step, term)
        out = out + term
    return out


def jet_det4(m):
    """Determinant of a 4x4 jet matrix by cofactor expansion."""
    def det3(rows, cols):
        r0, r1, r2 = rows
        c0, c1, c2 = cols
        return (m[r0, c0] * (m[r1, c1] * m[r2, c2] - m[r1, c2] * m[r2, c1])
                - m[r0, c1] * (m[r1, c0] * m[r2, c2] - m[r1, c2] * m[r2, c0])
                + m[r0, c2] * (m[r1, c0] * m[r2, c1] - m[r1, c1] * m[r2, c0]))
    out = None
    for j in range(4):
        cols = [c for c in range(4) if c != j]
        term = m[0, j] * det3((1, 2, 3), cols) * (-1.0) ** j
        out = term if out is None else out + term
    return out
