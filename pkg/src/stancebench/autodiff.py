"""Minimal dense-tensor reverse-mode differentiation engine.

Tensors wrap float64 numpy arrays and record their parents plus a local
backward closure as they are produced, so a backward sweep from a scalar
loss visits each node exactly once in reverse topological order.  The
op set is intentionally small: exactly what LSTM/BiLSTM, bypass
attention, 1-D convolution, and softmax classifiers need.  There is no
broadcasting beyond bias-row addition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, ValidationError

# When enabled, every op validates that its outputs are finite.
FINITE_CHECKS = True


class Tensor:
    """Immutable value node in the computation graph."""

    __slots__ = ("values", "parents", "grad_fn", "grad", "_backward_done")

    def __init__(self, values, parents=(), grad_fn=None):
        self.values = np.asarray(values, dtype=np.float64)
        if FINITE_CHECKS and not np.all(np.isfinite(self.values)):
            raise ValidationError("tensor holds non-finite values")
        self.parents = tuple(parents)
        self.grad_fn = grad_fn
        self.grad = None
        self._backward_done = False

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def item(self) -> float:
        return float(self.values)

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return multiply(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        return f"Tensor(shape={self.shape})"


class Parameter(Tensor):
    """Trainable tensor; accumulates gradients across backward calls."""

    __slots__ = ("trainable",)

    def __init__(self, values, trainable=True):
        super().__init__(values)
        self.trainable = trainable
        self.grad = np.zeros_like(self.values)

    def zero_grad(self):
        self.grad = np.zeros_like(self.values)


def constant(values) -> Tensor:
    return Tensor(values)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _make(values, parents, grad_fn) -> Tensor:
    return Tensor(values, parents=parents, grad_fn=grad_fn)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum; also accepts a (R,C) + (C,) or (1,C) bias row."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape == b.shape:
        return _make(a.values + b.values, (a, b), lambda g: (g, g))
    if len(a.shape) == 2 and b.shape in ((a.shape[1],), (1, a.shape[1])):
        def grad_fn(g):
            return g, g.sum(axis=0).reshape(b.shape)
        return _make(a.values + b.values.reshape(1, -1), (a, b), grad_fn)
    raise ShapeError(f"add shapes {a.shape} vs {b.shape}")


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _make(a.values * c, (a,), lambda g: (g * c,))


def subtract(a: Tensor, b: Tensor) -> Tensor:
    return add(a, scale(b, -1.0))


def multiply(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise ShapeError(f"multiply shapes {a.shape} vs {b.shape}")
    return _make(
        a.values * b.values, (a, b), lambda g: (g * b.values, g * a.values)
    )


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if len(a.shape) != 2 or len(b.shape) != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shapes {a.shape} vs {b.shape}")

    def grad_fn(g):
        return g @ b.values.T, a.values.T @ g

    return _make(a.values @ b.values, (a, b), grad_fn)


def concat(tensors, axis: int) -> Tensor:
    tensors = [_as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat of zero tensors")
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def grad_fn(g):
        slicer = [slice(None)] * g.ndim
        outs = []
        for k in range(len(tensors)):
            slicer[axis] = slice(offsets[k], offsets[k + 1])
            outs.append(g[tuple(slicer)])
        return tuple(outs)

    return _make(
        np.concatenate([t.values for t in tensors], axis=axis), tuple(tensors), grad_fn
    )


def transpose(a: Tensor) -> Tensor:
    if len(a.shape) != 2:
        raise ShapeError(f"transpose expects a matrix, got {a.shape}")
    return _make(a.values.T, (a,), lambda g: (g.T,))


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.values)
    return _make(out, (a,), lambda g: (g * (1.0 - out * out),))


def sigmoid(a: Tensor) -> Tensor:
    out = np.where(
        a.values >= 0,
        1.0 / (1.0 + np.exp(-np.abs(a.values))),
        np.exp(-np.abs(a.values)) / (1.0 + np.exp(-np.abs(a.values))),
    )
    return _make(out, (a,), lambda g: (g * out * (1.0 - out),))


def relu(a: Tensor) -> Tensor:
    mask = a.values > 0
    return _make(a.values * mask, (a,), lambda g: (g * mask,))


def softmax(a: Tensor) -> Tensor:
    """Row-wise softmax with max subtraction for stability."""
    if len(a.shape) != 2:
        raise ShapeError(f"softmax expects a matrix, got {a.shape}")
    shifted = a.values - a.values.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=1, keepdims=True)

    def grad_fn(g):
        dot = (g * out).sum(axis=1, keepdims=True)
        return (out * (g - dot),)

    return _make(out, (a,), grad_fn)


def cross_entropy(probs: Tensor, onehot: Tensor) -> Tensor:
    """Mean negative log likelihood of one-hot targets under `probs`."""
    if probs.shape != onehot.shape or len(probs.shape) != 2:
        raise ShapeError(f"cross_entropy shapes {probs.shape} vs {onehot.shape}")
    rows = probs.shape[0]
    picked = np.clip(probs.values, 1e-300, None)
    value = -(onehot.values * np.log(picked)).sum() / rows

    def grad_fn(g):
        return (-(onehot.values / picked) * (g / rows), None)

    return _make(value, (probs, onehot), grad_fn)


def dropout(a: Tensor, p: float, rng: np.random.Generator, train: bool = True) -> Tensor:
    """Inverted dropout: seeded mask scaled by 1/(1-p); identity at eval."""
    if not 0.0 <= p < 1.0:
        raise ValidationError(f"dropout rate must lie in [0,1), got {p}")
    if not train or p == 0.0:
        return a
    keep = rng.random(a.shape) >= p
    factor = 1.0 / (1.0 - p)
    mask = keep * factor
    return _make(a.values * mask, (a,), lambda g: (g * mask,))


def max_over_time(a: Tensor) -> Tensor:
    """Column-wise max over the time axis: (T,F) -> (1,F)."""
    if len(a.shape) != 2:
        raise ShapeError(f"max_over_time expects a matrix, got {a.shape}")
    argmax = a.values.argmax(axis=0)
    out = a.values[argmax, np.arange(a.shape[1])].reshape(1, -1)

    def grad_fn(g):
        da = np.zeros_like(a.values)
        da[argmax, np.arange(a.shape[1])] = g[0]
        return (da,)

    return _make(out, (a,), grad_fn)


def sum_all(a: Tensor) -> Tensor:
    return _make(a.values.sum(), (a,), lambda g: (np.full(a.shape, float(g)),))


def embed_rows(table: Tensor, indices) -> Tensor:
    """Gather rows of an embedding matrix; backward scatter-adds."""
    idx = np.asarray(indices, dtype=np.int64)
    if len(table.shape) != 2 or idx.ndim != 1:
        raise ShapeError(f"embed_rows expects matrix + index vector")

    def grad_fn(g):
        dt = np.zeros_like(table.values)
        np.add.at(dt, idx, g)
        return (dt,)

    return _make(table.values[idx], (table,), grad_fn)


def im2col_rows(a: Tensor, width: int) -> Tensor:
    """Stack sliding windows of `width` rows: (T,d) -> (T-width+1, width*d)."""
    T, d = a.shape
    if width < 1 or width > T:
        raise ShapeError(f"window width {width} does not fit {a.shape}")
    n = T - width + 1
    out = np.empty((n, width * d))
    for i in range(n):
        out[i] = a.values[i : i + width].reshape(-1)

    def grad_fn(g):
        da = np.zeros_like(a.values)
        for i in range(n):
            da[i : i + width] += g[i].reshape(width, d)
        return (da,)

    return _make(out, (a,), grad_fn)


class Tape:
    """Reverse-topological record of the graph reachable from a root."""

    def __init__(self, root: Tensor):
        self.order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                self.order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node.parents:
                if id(parent) not in seen:
                    stack.append((parent, False))

    def run(self, root: Tensor) -> None:
        grads: dict[int, np.ndarray] = {id(root): np.ones_like(root.values)}
        for node in reversed(self.order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if isinstance(node, Parameter):
                node.grad = node.grad + g
            else:
                node.grad = g
            if node.grad_fn is None:
                continue
            parent_grads = node.grad_fn(g)
            for parent, pg in zip(node.parents, parent_grads):
                if pg is None:
                    continue
                acc = grads.get(id(parent))
                grads[id(parent)] = pg if acc is None else acc + pg


def backward(loss: Tensor) -> None:
    """Accumulate gradients of a scalar loss into all reachable Parameters."""
    if loss.shape != ():
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss._backward_done:
        raise ValidationError("backward already ran on this graph; rebuild it first")
    loss._backward_done = True
    Tape(loss).run(loss)


@dataclass
class CoordinateCheck:
    parameter: str
    coordinate: tuple[int, ...]
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    max_rel_error: float
    tol: float
    worst: CoordinateCheck | None
    failures: list[CoordinateCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tol


def grad_check(
    builder,
    params: dict[str, Parameter],
    h: float = 1e-5,
    tol: float = 1e-5,
    max_coords: int = 200,
    seed: int = 0,
) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    `builder` must rebuild the scalar loss graph from the parameters'
    current values (and must be deterministic across calls).  Up to
    `max_coords` coordinates per parameter are sampled.  The relative
    error uses an absolute floor so near-zero gradients do not inflate.
    """
    if h <= 0:
        raise ValidationError(f"step size must be positive, got {h}")
    for p in params.values():
        p.zero_grad()
    loss = builder()
    backward(loss)
    analytic = {name: p.grad.copy() for name, p in params.items()}

    rng = np.random.default_rng(seed)
    worst: CoordinateCheck | None = None
    failures: list[CoordinateCheck] = []
    for name, p in params.items():
        size = p.values.size
        coords = (
            np.arange(size)
            if size <= max_coords
            else rng.choice(size, size=max_coords, replace=False)
        )
        flat = p.values.reshape(-1)
        for c in coords:
            original = flat[c]
            flat[c] = original + h
            up = float(builder().values)
            flat[c] = original - h
            down = float(builder().values)
            flat[c] = original
            numeric = (up - down) / (2.0 * h)
            ana = float(analytic[name].reshape(-1)[c])
            denom = max(abs(ana), abs(numeric), 1e-3)
            check = CoordinateCheck(
                parameter=name,
                coordinate=np.unravel_index(int(c), p.values.shape),
                analytic=ana,
                numeric=numeric,
                rel_error=abs(ana - numeric) / denom,
            )
            if worst is None or check.rel_error > worst.rel_error:
                worst = check
            if check.rel_error > tol:
                failures.append(check)
    return GradCheckReport(
        max_rel_error=worst.rel_error if worst else 0.0,
        tol=tol,
        worst=worst,
        failures=failures,
    )
