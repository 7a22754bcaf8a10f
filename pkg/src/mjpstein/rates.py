"""Transition rate functions ``g^J(x)``.

Three kinds are supported: constants, affine functions and closed-form
functions that carry their own gradient and a bound on the Hessian norm.
All of them evaluate on arrays of points with shape ``(..., d)``.
"""

from __future__ import annotations

import numpy as np

GRID_POINTS = 41


def ball_grid(center, radius, points=GRID_POINTS):
    """Grid points of the cube around ``center`` that lie in the Euclidean ball."""
    center = np.asarray(center, dtype=float)
    d = center.shape[0]
    axis = np.linspace(-radius, radius, points)
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    mesh = mesh[np.einsum("ij,ij->i", mesh, mesh) <= radius**2 * (1 + 1e-12)]
    return center + mesh


class RateFunction:
    kind = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    # extremes over the Euclidean ball B_r(c)
    def inf_on_ball(self, c, r):
        return float(np.min(self(ball_grid(c, r))))

    def sup_abs_on_ball(self, c, r):
        return float(np.max(np.abs(self(ball_grid(c, r)))))

    def sup_grad_on_ball(self, c, r):
        g = self.gradient(ball_grid(c, r))
        return float(np.max(np.linalg.norm(g, axis=-1)))

    def sup_hessian_on_ball(self, c, r):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


class ConstantRate(RateFunction):
    kind = "constant"

    def __init__(self, value):
        self.value = float(value)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.value)

    def gradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def inf_on_ball(self, c, r):
        return self.value

    def sup_abs_on_ball(self, c, r):
        return abs(self.value)

    def sup_grad_on_ball(self, c, r):
        return 0.0

    def sup_hessian_on_ball(self, c, r):
        return 0.0

    def to_dict(self):
        return {"kind": "constant", "value": self.value}

    def __repr__(self):
        return f"ConstantRate({self.value!r})"


class AffineRate(RateFunction):
    """``g(x) = intercept + gradient . x``."""

    kind = "affine"

    def __init__(self, intercept, gradient):
        self.intercept = float(intercept)
        self.grad = np.asarray(gradient, dtype=float)

    @classmethod
    def through(cls, value, gradient, center):
        """Affine rate with ``g(center) = value``."""
        gradient = np.asarray(gradient, dtype=float)
        return cls(float(value) - float(gradient @ np.asarray(center, dtype=float)), gradient)

    def __call__(self, x):
        return self.intercept + np.asarray(x, dtype=float) @ self.grad

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.grad, x.shape).copy()

    def inf_on_ball(self, c, r):
        return float(self(c)) - r * float(np.linalg.norm(self.grad))

    def sup_abs_on_ball(self, c, r):
        v = float(self(c))
        s = r * float(np.linalg.norm(self.grad))
        return max(abs(v + s), abs(v - s))

    def sup_grad_on_ball(self, c, r):
        return float(np.linalg.norm(self.grad))

    def sup_hessian_on_ball(self, c, r):
        return 0.0

    def to_dict(self):
        return {"kind": "affine", "intercept": self.intercept, "gradient": self.grad.tolist()}

    def __repr__(self):
        return f"AffineRate({self.intercept!r}, {self.grad.tolist()!r})"


class ClosedFormRate(RateFunction):
    """A smooth rate given by callables.

    ``hessian_bound`` must bound the spectral norm of the Hessian on the
    ball the process lives in; it is taken on trust.
    """

    kind = "closed-form"

    def __init__(self, func, gradient, hessian_bound, name="custom", params=None):
        self._func = func
        self._grad = gradient
        self.hessian_bound = float(hessian_bound)
        self.name = name
        self.params = dict(params or {})

    def __call__(self, x):
        return self._func(np.asarray(x, dtype=float))

    def gradient(self, x):
        return self._grad(np.asarray(x, dtype=float))

    def sup_hessian_on_ball(self, c, r):
        return self.hessian_bound

    def to_dict(self):
        return {"kind": f"builtin:{self.name}", "params": self.params}

    def __repr__(self):
        return f"ClosedFormRate(name={self.name!r}, params={self.params!r})"


def logistic(rate, capacity, axis, d):
    """``rate * x_i * (1 - x_i / capacity)``."""
    r, K, i = float(rate), float(capacity), int(axis)

    def f(x):
        return r * x[..., i] * (1.0 - x[..., i] / K)

    def g(x):
        out = np.zeros(x.shape)
        out[..., i] = r * (1.0 - 2.0 * x[..., i] / K)
        return out

    return ClosedFormRate(f, g, 2.0 * r / K, "logistic", {"rate": r, "capacity": K, "axis": i, "d": d})


def mass_action(rate, axes, d):
    """``rate * prod_k x_{axes[k]}`` for one or two axes."""
    k = float(rate)
    axes = [int(a) for a in axes]
    if len(axes) not in (1, 2):
        raise ValueError("mass_action supports one or two reactant axes")

    def f(x):
        out = k * np.ones(x.shape[:-1])
        for a in axes:
            out = out * x[..., a]
        return out

    def g(x):
        out = np.zeros(x.shape)
        if len(axes) == 1:
            out[..., axes[0]] = k
        else:
            a, b = axes
            out[..., a] += k * x[..., b]
            out[..., b] += k * x[..., a]
        return out

    if len(axes) == 1:
        hb = 0.0
    else:
        hb = 2.0 * k if axes[0] == axes[1] else k
    return ClosedFormRate(f, g, hb, "mass_action", {"rate": k, "axes": axes, "d": d})


BUILTINS = {"logistic": logistic, "mass_action": mass_action}


def rate_from_dict(spec: dict, d: int, center=None) -> RateFunction:
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantRate(spec["value"])
    if kind == "affine":
        if "intercept" in spec:
            return AffineRate(spec["intercept"], spec["gradient"])
        if center is None:
            raise ValueError("affine rate given by value needs the process center")
        return AffineRate.through(spec["value"], spec["gradient"], center)
    if isinstance(kind, str) and kind.startswith("builtin:"):
        name = kind.split(":", 1)[1]
        if name not in BUILTINS:
            raise ValueError(f"unknown builtin rate {name!r}; available: {sorted(BUILTINS)}")
        params = dict(spec.get("params", {}))
        params.pop("d", None)
        return BUILTINS[name](d=d, **params)
    raise ValueError(f"unknown rate kind {kind!r}")


def is_smooth_kind(rate: RateFunction) -> bool:
    return isinstance(rate, (ConstantRate, AffineRate))


__all__ = [
    "RateFunction",
    "ConstantRate",
    "AffineRate",
    "ClosedFormRate",
    "BUILTINS",
    "rate_from_dict",
    "ball_grid",
    "logistic",
    "mass_action",
]
