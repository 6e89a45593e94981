"""
Second-order forward-mode automatic differentiation.

A HyperDual carries a value together with its gradient and Hessian with
respect to d seed variables, so one evaluation of an expression yields
H(φ), ∂H and ∂∂H at once.
"""

import numpy as np


class HyperDual:
    """f with ∇f and ∇∇f over d seed variables."""

    __slots__ = ('value', 'grad', 'hess')

    def __init__(self, value, grad, hess):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value, size):
        return cls(value, np.zeros(size), np.zeros((size, size)))

    @classmethod
    def variable(cls, value, index, size):
        grad = np.zeros(size)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((size, size)))

    @property
    def size(self):
        return len(self.grad)

    def _lift(self, other):
        if isinstance(other, HyperDual):
            return other
        return HyperDual.constant(other, self.size)

    def _chain(self, f0, f1, f2):
        """φ(self) given φ, φ' and φ'' at self.value."""
        return HyperDual(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    def __add__(self, other):
        other = self._lift(other)
        return HyperDual(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        cross = np.outer(self.grad, other.grad)
        return HyperDual(self.value * other.value,
                         self.value * other.grad + other.value * self.grad,
                         self.value * other.hess + other.value * self.hess + cross + cross.T)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.value == 0:
            raise ZeroDivisionError("division by zero in expression")
        v = self.value
        return self._chain(1.0 / v, -1.0 / v ** 2, 2.0 / v ** 3)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, k: int):
        if k == 0:
            return HyperDual.constant(1.0, self.size)
        if k < 0:
            return (self ** (-k)).reciprocal()
        v = self.value
        return self._chain(v ** k, k * v ** (k - 1), k * (k - 1) * v ** (k - 2) if k >= 2 else 0.0)

    def sin(self):
        return self._chain(np.sin(self.value), np.cos(self.value), -np.sin(self.value))

    def cos(self):
        return self._chain(np.cos(self.value), -np.sin(self.value), -np.cos(self.value))

    def exp(self):
        e = np.exp(self.value)
        return self._chain(e, e, e)

    def __repr__(self):
        return f"HyperDual({self.value}, grad={self.grad.tolist()})"
