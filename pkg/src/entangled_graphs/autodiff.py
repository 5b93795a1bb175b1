"""Minimal reverse-mode automatic differentiation over numpy arrays.

Every Tensor wraps a float64 ndarray plus a gradient of the same shape.
Operations record a closure that routes the output gradient back to the
inputs; ``backward()`` runs the closures in reverse topological order.
Fused softmax and row-normalize kernels exist because their composite
gradients are both faster and numerically tamer than the elementwise chains.
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum grad down to ``shape``, undoing numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """An ndarray node in the computation graph."""

    __slots__ = ("data", "grad", "_backward", "_prev")

    def __init__(self, data, _prev=()):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = np.zeros_like(self.data)
        self._backward = lambda: None
        self._prev = _prev

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        out = Tensor(self.data + other.data, (self, other))

        def _backward():
            self.grad += _unbroadcast(out.grad, self.data.shape)
            other.grad += _unbroadcast(out.grad, other.data.shape)
        out._backward = _backward
        return out

    def __mul__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        out = Tensor(self.data * other.data, (self, other))

        def _backward():
            self.grad += _unbroadcast(other.data * out.grad, self.data.shape)
            other.grad += _unbroadcast(self.data * out.grad, other.data.shape)
        out._backward = _backward
        return out

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        return self + (-other)

    def __radd__(self, other):
        return self + other

    def __rmul__(self, other):
        return self * other

    def __rsub__(self, other):
        return Tensor(other) + (-self)

    def __truediv__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        return self * other.pow(-1.0)

    def pow(self, exponent: float):
        out = Tensor(self.data ** exponent, (self,))

        def _backward():
            self.grad += exponent * self.data ** (exponent - 1.0) * out.grad
        out._backward = _backward
        return out

    def matmul(self, other: "Tensor") -> "Tensor":
        out = Tensor(self.data @ other.data, (self, other))

        def _backward():
            self.grad += out.grad @ other.data.T
            other.grad += self.data.T @ out.grad
        out._backward = _backward
        return out

    def __matmul__(self, other):
        return self.matmul(other)

    # -- elementwise nonlinearities ------------------------------------------

    def exp(self):
        out = Tensor(np.exp(self.data), (self,))

        def _backward():
            self.grad += out.data * out.grad
        out._backward = _backward
        return out

    def log(self):
        out = Tensor(np.log(self.data), (self,))

        def _backward():
            self.grad += out.grad / self.data
        out._backward = _backward
        return out

    def relu(self):
        out = Tensor(np.maximum(self.data, 0.0), (self,))

        def _backward():
            self.grad += (self.data > 0.0) * out.grad
        out._backward = _backward
        return out

    # -- reductions and reshaping ---------------------------------------------

    def sum(self, axis=None, keepdims=False):
        out = Tensor(self.data.sum(axis=axis, keepdims=keepdims), (self,))

        def _backward():
            g = out.grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            self.grad += np.broadcast_to(g, self.data.shape)
        out._backward = _backward
        return out

    def mean(self, axis=None, keepdims=False):
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def transpose(self):
        out = Tensor(self.data.T, (self,))

        def _backward():
            self.grad += out.grad.T
        out._backward = _backward
        return out

    @property
    def T(self):
        return self.transpose()

    def take_rows(self, indices) -> "Tensor":
        """Gather rows; duplicate indices accumulate gradient."""
        idx = np.asarray(indices, dtype=int)
        out = Tensor(self.data[idx], (self,))

        def _backward():
            np.add.at(self.grad, idx, out.grad)
        out._backward = _backward
        return out

    def slice_cols(self, start: int, stop: int) -> "Tensor":
        out = Tensor(self.data[:, start:stop], (self,))

        def _backward():
            self.grad[:, start:stop] += out.grad
        out._backward = _backward
        return out

    # -- fused row kernels -----------------------------------------------------

    def softmax_rows(self) -> "Tensor":
        """Row softmax with max subtraction (mandatory for overflow safety)."""
        shifted = self.data - self.data.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=1, keepdims=True)
        out = Tensor(y, (self,))

        def _backward():
            g = out.grad
            self.grad += y * (g - (g * y).sum(axis=1, keepdims=True))
        out._backward = _backward
        return out

    def log_softmax_rows(self) -> "Tensor":
        shifted = self.data - self.data.max(axis=1, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        out = Tensor(shifted - lse, (self,))

        def _backward():
            g = out.grad
            soft = np.exp(out.data)
            self.grad += g - soft * g.sum(axis=1, keepdims=True)
        out._backward = _backward
        return out

    def normalize_rows(self, eps: float = 1e-12) -> "Tensor":
        """Rows scaled to unit L2 norm; norms below eps are clamped."""
        norms = np.linalg.norm(self.data, axis=1, keepdims=True)
        r = np.maximum(norms, eps)
        y = self.data / r
        out = Tensor(y, (self,))

        def _backward():
            g = out.grad
            # d(x/r)/dx with r = ||x||: g/r - x (x . g) / r^3; clamped rows
            # treat r as constant, which the mask reproduces.
            live = (norms > eps).astype(float)
            dot = (self.data * g).sum(axis=1, keepdims=True)
            self.grad += g / r - live * self.data * dot / r ** 3
        out._backward = _backward
        return out

    # -- graph traversal --------------------------------------------------------

    def backward(self):
        if self.data.size != 1:
            raise ValueError("backward() starts from a scalar loss")
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for child in node._prev:
                if id(child) not in visited:
                    stack.append((child, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            node._backward()

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)


def concat_cols(parts: list[Tensor]) -> Tensor:
    """Column-wise concatenation of 2D tensors."""
    out = Tensor(np.concatenate([p.data for p in parts], axis=1), tuple(parts))
    widths = [p.data.shape[1] for p in parts]

    def _backward():
        start = 0
        for p, w in zip(parts, widths):
            p.grad += out.grad[:, start:start + w]
            start += w
    out._backward = _backward
    return out
