"""Edge admittances from saddle profiles.

The admittance of a bridge is ``eps * cut / length * exp(F(z)/eps)`` where

* ``length = exp(F(z)/eps) * int exp(-g(s)/eps) ds`` over the unstable axis,
* ``cut = exp(-F(z)/eps) * int exp(-G(s')/eps) ds'`` over the stable directions.

All three are returned as :class:`~capnet.logreal.LogReal` so the Arrhenius
factor never has to be formed as a float.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import RegularGridInterpolator
from scipy.special import gammaln

from .exceptions import ProfileError
from .logreal import LogReal

DEFAULT_TOL = 1e-10
_MAX_RADIUS = 1e6


class Profile:
    """Convex function with a proper minimum 0 at the origin."""

    dim = 1

    def __call__(self, s):
        raise NotImplementedError

    def log_integral_closed(self, eps: float) -> Optional[float]:
        """``log int exp(-f/eps)`` in closed form, or None."""
        return None

    def roots(self, level: float):
        """Points ``-a < 0 < b`` on the first axis where the profile equals ``level`` (1-D only)."""
        if self.dim != 1:
            raise ProfileError("roots are defined for one-dimensional profiles")
        out = []
        for sign in (-1.0, 1.0):
            hi = 1e-6
            while self(sign * hi) < level:
                hi *= 2
                if hi > _MAX_RADIUS:
                    raise ProfileError("profile never reaches the requested level")
            out.append(sign * optimize.brentq(lambda s: self(sign * s) - level, 0.0, hi, xtol=1e-15))
        return tuple(out)

    def to_dict(self) -> dict:
        raise ProfileError(f"{type(self).__name__} is not serializable")


@dataclass(frozen=True)
class Quadratic(Profile):
    """``lam * s**2 / 2``."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ProfileError("quadratic profile needs lam > 0")

    def __call__(self, s):
        return 0.5 * self.lam * np.square(s)

    def log_integral_closed(self, eps):
        return 0.5 * math.log(2.0 * math.pi * eps / self.lam)

    def roots(self, level):
        r = math.sqrt(2.0 * level / self.lam)
        return (-r, r)

    def to_dict(self):
        return {"kind": "quadratic", "lam": self.lam}


@dataclass(frozen=True)
class EvenPower(Profile):
    """``lam * |s|**p / p`` with ``p >= 2``."""

    lam: float
    p: float = 4.0

    def __post_init__(self):
        if not self.lam > 0 or not self.p >= 2:
            raise ProfileError("even-power profile needs lam > 0 and p >= 2")

    def __call__(self, s):
        return self.lam * np.abs(s) ** self.p / self.p

    def log_integral_closed(self, eps):
        p = self.p
        return math.log(2.0) + math.log(p * eps / self.lam) / p + gammaln(1.0 + 1.0 / p)

    def roots(self, level):
        r = (level * self.p / self.lam) ** (1.0 / self.p)
        return (-r, r)

    def to_dict(self):
        return {"kind": "even-power", "lam": self.lam, "p": self.p}


@dataclass(frozen=True)
class Separable(Profile):
    """Sum of one-dimensional profiles, one per coordinate."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts or any(p.dim != 1 for p in parts):
            raise ProfileError("separable profile needs one-dimensional parts")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return len(self.parts)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.dim == 1:
            return self.parts[0](s)
        return sum(p(s[..., k]) for k, p in enumerate(self.parts))

    def log_integral_closed(self, eps):
        logs = [p.log_integral_closed(eps) for p in self.parts]
        return None if any(v is None for v in logs) else float(sum(logs))

    def roots(self, level):
        if self.dim != 1:
            raise ProfileError("roots are defined for one-dimensional profiles")
        return self.parts[0].roots(level)

    def to_dict(self):
        return {"kind": "separable", "parts": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True)
class Tabulated(Profile):
    """Piecewise-linear (1-D) or bilinear (2-D) interpolant of sampled values.

    Outside the table the profile continues linearly from the outermost
    segment (1-D) or grows with the largest boundary slope (2-D), which
    keeps it convex and proper.
    """

    axes: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        values = np.asarray(self.values, dtype=float)
        if len(axes) not in (1, 2):
            raise ProfileError("tabulated profiles support dimension 1 or 2 only")
        if values.shape != tuple(a.size for a in axes):
            raise ProfileError("table shape does not match its axes")
        for a in axes:
            if a.size < 3 or np.any(np.diff(a) <= 0) or not (a[0] < 0 < a[-1]):
                raise ProfileError("table axes must be increasing and straddle 0")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)
        if len(axes) == 2:
            object.__setattr__(self, "_interp", RegularGridInterpolator(axes, values, method="linear"))

    @property
    def dim(self):
        return len(self.axes)

    def __call__(self, s):
        if self.dim == 1:
            a, v = self.axes[0], self.values
            s = np.asarray(s, dtype=float)
            out = np.interp(s, a, v)
            left = v[0] + (s - a[0]) * (v[1] - v[0]) / (a[1] - a[0])
            right = v[-1] + (s - a[-1]) * (v[-1] - v[-2]) / (a[-1] - a[-2])
            out = np.where(s < a[0], left, np.where(s > a[-1], right, out))
            return out if out.ndim else float(out)
        s = np.asarray(s, dtype=float)
        lo = np.array([a[0] for a in self.axes])
        hi = np.array([a[-1] for a in self.axes])
        clipped = np.clip(s, lo, hi)
        base = self._interp(clipped.reshape(-1, 2)).reshape(s.shape[:-1])
        excess = np.linalg.norm(s - clipped, axis=-1)
        return base + excess * self._boundary_slope()

    def _boundary_slope(self):
        v = self.values
        slopes = [
            np.max(np.abs(np.diff(v, axis=0))) / np.min(np.diff(self.axes[0])),
            np.max(np.abs(np.diff(v, axis=1))) / np.min(np.diff(self.axes[1])),
        ]
        return max(slopes)

    def to_dict(self):
        return {"kind": "tabulated", "axes": [a.tolist() for a in self.axes], "values": self.values.tolist()}


@dataclass(frozen=True)
class FunctionProfile(Profile):
    """Any vectorized callable of the given dimension (validated by sampling)."""

    func: Callable
    dimension: int = 1

    @property
    def dim(self):
        return self.dimension

    def __call__(self, s):
        return self.func(s)


def profile_from_dict(data: dict) -> Profile:
    kind = data.get("kind")
    if kind == "quadratic":
        return Quadratic(float(data["lam"]))
    if kind == "even-power":
        return EvenPower(float(data["lam"]), float(data.get("p", 4.0)))
    if kind == "separable":
        return Separable(tuple(profile_from_dict(p) for p in data["parts"]))
    if kind == "tabulated":
        return Tabulated(tuple(data["axes"]), np.asarray(data["values"], dtype=float))
    raise ProfileError(f"unknown profile kind {kind!r}")


def validate_profile(f: Profile, radius: float = 1.0, samples: int = 41) -> None:
    """Sampled check: ``f(0) = 0``, strict growth away from 0, midpoint convexity."""
    dim = f.dim
    zero = np.zeros(dim) if dim > 1 else 0.0
    f0 = float(np.asarray(f(zero)))
    if abs(f0) > 1e-12:
        raise ProfileError(f"profile value at the origin is {f0}, expected 0")
    t = np.linspace(-radius, radius, samples)
    directions = [np.eye(dim)[k] for k in range(dim)]
    if dim == 2:
        directions += [np.array([1.0, 1.0]) / math.sqrt(2), np.array([1.0, -1.0]) / math.sqrt(2)]
    for d in directions:
        pts = t[:, None] * d[None, :] if dim > 1 else t
        vals = np.asarray(f(pts), dtype=float)
        scale = max(1.0, float(np.max(np.abs(vals))))
        nz = t != 0
        if np.any(vals[nz] <= 0):
            raise ProfileError("profile must be strictly positive away from the origin")
        mid = vals[1:-1]
        chord = 0.5 * (vals[:-2] + vals[2:])
        if np.any(mid > chord + 1e-12 * scale):
            raise ProfileError("profile fails the midpoint-convexity check")


def _check_proper_1d(f):
    for sign in (-1.0, 1.0):
        if not any(float(f(sign * r)) > 0 for r in (1e-6, 1e-3, 1.0, 1e3)):
            raise ProfileError("profile has no proper minimum at 0")


def _half_line_integral(f, sign, eps, tol, level=None):
    """``int_0^inf exp(-f(sign*s)/eps) ds``, truncated where convex growth
    bounds the remaining tail below ``tol/8`` of the estimate."""
    h = lambda s: float(f(sign * s))
    r1 = 1e-12
    while h(2.0 * r1) <= eps:
        r1 *= 2.0
        if r1 > _MAX_RADIUS:
            raise ProfileError("integral does not converge: profile too flat")
    lower_bound = r1 / math.e
    if level is not None:
        if h(r1) >= level:
            stop = optimize.brentq(lambda s: h(s) - level, 0.0, r1)
        else:
            hi = r1
            while h(hi) < level:
                hi *= 2.0
                if hi > _MAX_RADIUS:
                    raise ProfileError("profile never reaches the truncation level")
            stop = optimize.brentq(lambda s: h(s) - level, 0.0, hi, xtol=1e-15)
    else:
        stop = r1
        while True:
            value = h(stop)
            # f(s) >= value * s / stop beyond stop (convexity, f(0) = 0)
            if value > 0:
                tail = stop * eps / value * math.exp(-value / eps)
                if tail <= tol * lower_bound / 8.0:
                    break
            stop *= 2.0
            if stop > _MAX_RADIUS:
                raise ProfileError("failed to locate a truncation point")
    grid = np.array([0.0, r1, stop]) if r1 < stop else np.array([0.0, stop])
    total = 0.0
    for a, b in zip(grid[:-1], grid[1:]):
        val, _ = integrate.quad(lambda s: math.exp(-h(s) / eps), a, b, epsabs=0.0,
                                epsrel=tol / 10.0, limit=400)
        total += val
    return total


def quadrature_1d(f, eps: float, tol: float = DEFAULT_TOL, level: Optional[float] = None) -> LogReal:
    """Adaptive quadrature of ``int_R exp(-f(s)/eps) ds``.

    ``level`` restricts the integral to ``{f < level}``; otherwise the line is
    truncated at points certified by convexity to drop less than ``tol``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    _check_proper_1d(f)
    total = sum(_half_line_integral(f, sign, eps, tol, level) for sign in (-1.0, 1.0))
    return LogReal.from_log(math.log(total))


def quadrature_2d(f, eps: float, tol: float = DEFAULT_TOL) -> LogReal:
    """Tensor-product adaptive rule for ``int_{R^2} exp(-f/eps)`` on a box
    ``[-R, R]^2`` whose boundary lies where convexity bounds the tail."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    r1 = 1e-12
    while np.max(f(2.0 * r1 * corners)) <= eps:
        r1 *= 2.0
        if r1 > _MAX_RADIUS:
            raise ProfileError("integral does not converge: profile too flat")
    lower_bound = 4.0 * r1 * r1 / math.e
    t = np.linspace(-1.0, 1.0, 201)
    ring = np.concatenate([np.stack([t, np.ones_like(t)], 1), np.stack([t, -np.ones_like(t)], 1),
                           np.stack([np.ones_like(t), t], 1), np.stack([-np.ones_like(t), t], 1)])
    R = r1
    while True:
        T = float(np.min(f(R * ring)))
        if T > 0:
            k = R * eps / T
            tail = 8.0 * math.exp(-T / eps) * k * (R + k)
            if tail <= tol * lower_bound / 8.0:
                break
        R *= 2.0
        if R > _MAX_RADIUS:
            raise ProfileError("failed to locate a truncation box")
    g = lambda pts: np.exp(-np.asarray(f(pts), dtype=float) / eps)
    total = 0.0
    # quadrants keep kinks on the axes at cell boundaries
    for xa, xb in ((-R, 0.0), (0.0, R)):
        for ya, yb in ((-R, 0.0), (0.0, R)):
            res = integrate.cubature(g, [xa, ya], [xb, yb], rule="gk21", rtol=tol / 10.0, atol=0.0,
                                     max_subdivisions=20000)
            if res.status != "converged":
                raise ProfileError("2-D quadrature did not converge")
            total += float(res.estimate)
    return LogReal.from_log(math.log(total))


def _tabulated_2d(f: "Tabulated", eps: float, tol: float) -> float:
    """Cellwise tensor Gauss-Legendre inside the table (the interpolant is
    smooth on each cell), cubature outside it unless the tail is negligible."""
    ax, ay = f.axes
    nodes, weights = np.polynomial.legendre.leggauss(6)

    def cell_points(a):
        lo, hi = a[:-1, None], a[1:, None]
        half = 0.5 * (hi - lo)
        return ((lo + hi) / 2 + half * nodes).ravel(), (half * weights).ravel()

    px, wx = cell_points(ax)
    py, wy = cell_points(ay)
    X, Y = np.meshgrid(px, py, indexing="ij")
    vals = np.exp(-f(np.stack([X, Y], -1)) / eps)
    inside = float(wx @ vals @ wy)
    edge = np.concatenate([f.values[0], f.values[-1], f.values[:, 0], f.values[:, -1]])
    T = float(edge.min())
    r = min(-ax[0], ax[-1], -ay[0], ay[-1])
    k = r * eps / T
    if 8.0 * math.exp(-T / eps) * k * (r + k) <= tol * inside / 8.0:
        return math.log(inside)
    g = lambda pts: np.exp(-np.asarray(f(pts), dtype=float) / eps)
    R = max(abs(ax[0]), ax[-1], abs(ay[0]), ay[-1])
    while True:
        Tr = float(np.min(f(np.array([[R, 0.0], [-R, 0.0], [0.0, R], [0.0, -R], [R, R], [-R, -R], [R, -R], [-R, R]]))))
        k = R * eps / Tr
        if 8.0 * math.exp(-Tr / eps) * k * (R + k) <= tol * inside / 8.0:
            break
        R *= 2.0
    outside = 0.0
    xs, ys = (-R, ax[0], ax[-1], R), (-R, ay[0], ay[-1], R)
    for i in range(3):
        for j in range(3):
            if i == 1 and j == 1:
                continue
            res = integrate.cubature(g, [xs[i], ys[j]], [xs[i + 1], ys[j + 1]], rule="gk21",
                                     rtol=tol / 10.0, atol=0.0, max_subdivisions=20000)
            outside += float(res.estimate)
    return math.log(inside + outside)


def log_laplace_integral(f: Profile, eps: float, method: str = "auto", tol: float = DEFAULT_TOL) -> float:
    """``log int exp(-f/eps)`` over ``R^dim(f)``."""
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method != "quadrature":
        closed = f.log_integral_closed(eps)
        if closed is not None:
            return closed
        if method == "closed":
            raise ProfileError(f"no closed form for {type(f).__name__}")
    if isinstance(f, Separable) and f.dim > 1:
        return float(sum(log_laplace_integral(p, eps, "quadrature", tol) for p in f.parts))
    if f.dim == 1:
        return quadrature_1d(f, eps, tol).log
    if f.dim == 2:
        if isinstance(f, Tabulated):
            return _tabulated_2d(f, eps, tol)
        return quadrature_2d(f, eps, tol).log
    raise ProfileError(f"quadrature for dimension {f.dim} needs a separable or quadratic profile")


@dataclass(frozen=True)
class SaddleDescriptor:
    """Local data of one saddle: height, unstable/stable profiles, frame, cutoff.

    ``rotation`` maps local coordinates (unstable axis first) to space;
    ``translation`` is the saddle location.
    """

    saddle_height: float
    unstable: Profile
    stable: Profile
    rotation: np.ndarray = None
    translation: np.ndarray = None
    delta: float = 0.1
    omega: Optional[Callable[[float], float]] = None
    validate: bool = True

    def __post_init__(self):
        n = 1 + self.stable.dim
        if self.unstable.dim != 1:
            raise ProfileError("unstable profile must be one-dimensional")
        R = np.eye(n) if self.rotation is None else np.asarray(self.rotation, dtype=float)
        t = np.zeros(n) if self.translation is None else np.asarray(self.translation, dtype=float)
        if R.shape != (n, n) or t.shape != (n,):
            raise ProfileError(f"frame must be {n}-dimensional")
        if np.max(np.abs(R.T @ R - np.eye(n))) > 1e-12:
            raise ProfileError("frame rotation is not orthogonal")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        if not self.delta > 0:
            raise ProfileError("delta must be positive")
        if self.validate:
            validate_profile(self.unstable)
            validate_profile(self.stable)
            _check_proper_1d(self.unstable)
        if self.omega is not None:
            for d in np.linspace(4.0 * self.delta / 50, 4.0 * self.delta, 50):
                if self.omega(d) > d / 100.0:
                    raise ProfileError(f"omega({d:.3g}) exceeds {d:.3g}/100; delta is too large")

    @property
    def dimension(self) -> int:
        return 1 + self.stable.dim

    def to_local(self, x):
        return (np.asarray(x, dtype=float) - self.translation) @ self.rotation

    def to_space(self, s):
        return np.asarray(s, dtype=float) @ self.rotation.T + self.translation

    def to_dict(self) -> dict:
        d = {"height": self.saddle_height, "unstable": self.unstable.to_dict(),
             "stable": self.stable.to_dict(), "delta": self.delta,
             "translation": self.translation.tolist()}
        if self.dimension == 2:
            d["angle"] = math.atan2(self.rotation[1, 0], self.rotation[0, 0])
            if np.linalg.det(self.rotation) < 0:
                d["reflect"] = True
        else:
            d["rotation"] = self.rotation.tolist()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SaddleDescriptor":
        stable = profile_from_dict(data["stable"])
        n = 1 + stable.dim
        if "rotation" in data:
            R = np.asarray(data["rotation"], dtype=float)
        elif n == 2:
            a = float(data.get("angle", 0.0))
            R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
            if data.get("reflect"):
                R = R @ np.diag([1.0, -1.0])
        else:
            R = np.eye(n)
        return cls(float(data.get("height", 0.0)), profile_from_dict(data["unstable"]), stable, R,
                   np.asarray(data.get("translation", np.zeros(n)), dtype=float),
                   float(data.get("delta", 0.1)))


def geodesic_distance(s: SaddleDescriptor, eps: float, method: str = "auto",
                      tol: float = DEFAULT_TOL) -> LogReal:
    """``exp(F(z)/eps) * int exp(-g/eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return LogReal(math.exp(log_laplace_integral(s.unstable, eps, method, tol)), s.saddle_height / eps)


def minimal_cut(s: SaddleDescriptor, eps: float, method: str = "auto",
                tol: float = DEFAULT_TOL) -> LogReal:
    """``exp(-F(z)/eps) * int exp(-G/eps)`` over the stable directions."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return LogReal(math.exp(log_laplace_integral(s.stable, eps, method, tol)), -s.saddle_height / eps)


def admittance(s: SaddleDescriptor, eps: float, method: str = "auto",
               tol: float = DEFAULT_TOL) -> LogReal:
    """``eps * cut / length * exp(F(z)/eps)``; carried as ``prefactor * exp(-F(z)/eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    log_cut = log_laplace_integral(s.stable, eps, method, tol)
    log_len = log_laplace_integral(s.unstable, eps, method, tol)
    return LogReal(eps * math.exp(log_cut - log_len), -s.saddle_height / eps)


def quadratic_admittance(eigenvalues: Sequence[float], height: float, eps: float) -> LogReal:
    """Closed form for a Morse saddle with Hessian eigenvalues ``lam_1 < 0 < lam_2 <= ...``."""
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.size
    if lam[0] >= 0 or np.any(lam[1:] <= 0):
        raise ProfileError("need exactly one negative eigenvalue, listed first")
    pref = eps * (2 * math.pi * eps) ** ((n - 2) / 2) * math.sqrt(abs(lam[0])) / math.sqrt(np.prod(lam[1:]))
    return LogReal(pref, -height / eps)
