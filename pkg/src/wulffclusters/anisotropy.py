"""Anisotropic surface-energy densities phi on the plane.

A density is a positive, convex, positively 1-homogeneous function of a
nonzero vector.  Every built-in kind is represented through its restriction
to the unit circle, f(theta) = phi(cos theta, sin theta), together with the
first two derivatives of f.  All the differential geometry follows from f:

    phi(v)      = r * f(theta)
    grad phi(v) = f(theta) * e_r + f'(theta) * e_theta
    D2 phi(v)   = (f''(theta) + f(theta)) / r * (e_theta x e_theta)

where (r, theta) are polar coordinates of v.  The quantity f'' + f is the
tangential second derivative; it is strictly positive exactly when the
density is uniformly convex.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotDifferentiable, UnsupportedKind, ZeroVector

TWO_PI = 2.0 * math.pi

# Below this Euclidean norm a vector is treated as the origin.
ZERO_NORM = 1e-300

# Angular tolerance for the axis singularities of the l1 density.
AXIS_TOL = 1e-12


def normalize_angle(theta):
    """Map an angle (scalar or array) into [0, 2*pi)."""
    return np.asarray(theta, dtype=float) % TWO_PI


class Direction:
    """A unit vector stored as an angle with cached components."""

    __slots__ = ("theta", "vec")

    def __init__(self, theta):
        t = float(theta) % TWO_PI
        if t >= TWO_PI:  # guard for theta = -1e-20 rounding to 2*pi
            t = 0.0
        self.theta = t
        self.vec = np.array([math.cos(t), math.sin(t)])

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        if math.hypot(v[0], v[1]) < ZERO_NORM:
            raise ZeroVector("cannot build a direction from the origin")
        return cls(math.atan2(v[1], v[0]))

    def rotated(self, dtheta):
        return Direction(self.theta + dtheta)

    def antipode(self):
        return Direction(self.theta + math.pi)

    def __repr__(self):
        return f"Direction({math.degrees(self.theta):.6f} deg)"


@dataclass
class ValidationReport:
    """Outcome of the sampled hypothesis checks for a density."""

    homogeneous: bool
    positive: bool
    convex: bool
    symmetric: bool
    uniformly_convex: bool
    min_tangential_hessian: float
    samples: int

    @property
    def all_passed(self):
        return (self.homogeneous and self.positive and self.convex
                and self.symmetric and self.uniformly_convex)


class Anisotropy:
    """An anisotropic density with evaluation, gradient and Hessian access.

    Instances are immutable after construction and safe to share between
    threads.  Use the factory functions (:func:`euclidean`,
    :func:`elliptic`, ...) rather than the constructor.
    """

    def __init__(self, kind, params, profile, symmetric=True, regular=True,
                 smooth_everywhere=True):
        self.kind = kind
        self.params = dict(params)
        self._profile = profile
        self.is_symmetric = symmetric
        self.is_regular = regular
        self._smooth_everywhere = smooth_everywhere

    # ------------------------------------------------------------------
    # core evaluations

    def profile(self, theta):
        """Return (f, f', f'') on the unit circle at the given angle(s)."""
        return self._profile(np.asarray(theta, dtype=float))

    def eval(self, v):
        """phi(v) for a single vector (2,) or an array (..., 2)."""
        v = np.asarray(v, dtype=float)
        r = np.hypot(v[..., 0], v[..., 1])
        if np.any(r < ZERO_NORM):
            raise ZeroVector("phi is undefined at the origin")
        theta = np.arctan2(v[..., 1], v[..., 0])
        f, _, _ = self._profile(theta)
        out = r * f
        return float(out) if out.ndim == 0 else out

    def _check_differentiable(self, theta):
        if self._smooth_everywhere:
            return
        # l1 is non-differentiable on the coordinate axes
        off = np.abs((np.asarray(theta) + math.pi / 4) % (math.pi / 2)
                     - math.pi / 4)
        if np.any(off < AXIS_TOL):
            raise NotDifferentiable(
                f"{self.kind} has no gradient on a coordinate axis")

    def gradient(self, v):
        """grad phi(v); 0-homogeneous, so it depends on the angle only."""
        v = np.asarray(v, dtype=float)
        r = np.hypot(v[..., 0], v[..., 1])
        if np.any(r < ZERO_NORM):
            raise ZeroVector("grad phi is undefined at the origin")
        theta = np.arctan2(v[..., 1], v[..., 0])
        return self.gradient_at_angle(theta)

    def gradient_at_angle(self, theta):
        """grad phi evaluated at the unit vector with the given angle(s).

        This is the map F sending a normal direction to the corresponding
        point of the Wulff boundary.
        """
        theta = np.asarray(theta, dtype=float)
        self._check_differentiable(theta)
        f, fp, _ = self._profile(theta)
        c, s = np.cos(theta), np.sin(theta)
        out = np.stack([f * c - fp * s, f * s + fp * c], axis=-1)
        return out

    def curvature(self, theta):
        """Tangential second derivative f'' + f at the given angle(s)."""
        theta = np.asarray(theta, dtype=float)
        self._check_differentiable(theta)
        f, _, fpp = self._profile(theta)
        return fpp + f

    def hessian(self, v):
        """D2 phi(v) as a (..., 2, 2) array; rank one along the tangent."""
        v = np.asarray(v, dtype=float)
        r = np.hypot(v[..., 0], v[..., 1])
        if np.any(r < ZERO_NORM):
            raise ZeroVector("Hessian is undefined at the origin")
        theta = np.arctan2(v[..., 1], v[..., 0])
        kappa = self.curvature(theta)
        t = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
        return (kappa / r)[..., None, None] * (t[..., :, None]
                                               * t[..., None, :])

    # ------------------------------------------------------------------
    # global quantities

    def phi_range(self, n=4096):
        """(min, max) of phi over the unit circle, sampled off the axes."""
        theta = (np.arange(n) + 0.5) * TWO_PI / n
        f, _, _ = self._profile(theta)
        return float(f.min()), float(f.max())

    def validate(self, samples=1024, seed=0):
        """Sampled check of the defining hypotheses; never raises."""
        if samples < 16:
            raise ValueError("validate needs at least 16 samples")
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0.0, TWO_PI, samples)
        radii = rng.uniform(0.1, 10.0, samples)
        pts = radii[:, None] * np.stack([np.cos(theta), np.sin(theta)],
                                        axis=-1)
        vals = self.eval(pts)

        positive = bool(np.all(vals > 0.0))

        t = rng.uniform(1e-3, 1e3, samples)
        homogeneous = bool(np.all(
            np.abs(self.eval(t[:, None] * pts) - t * vals) <= 1e-9 * t * vals))

        u = pts
        w = np.roll(pts, 1, axis=0)
        convex = bool(np.all(
            self.eval(0.5 * (u + w)) - 0.5 * (self.eval(u) + self.eval(w))
            <= 1e-12 * vals.max()))

        symmetric = bool(np.allclose(self.eval(-pts), vals,
                                     rtol=1e-12, atol=0.0))

        # offset grid keeps l1 samples away from its axis singularities
        n_sweep = max(samples, 1024)
        sweep = (np.arange(n_sweep) + 0.5) * TWO_PI / n_sweep
        f, _, fpp = self._profile(sweep)
        kappa = fpp + f
        min_kappa = float(kappa.min())
        uniformly_convex = min_kappa > 1e-10 * float(f.max())

        return ValidationReport(homogeneous, positive, convex, symmetric,
                                uniformly_convex, min_kappa, samples)

    # ------------------------------------------------------------------
    # serialization

    def to_dict(self):
        return {"kind": self.kind, "params": self.params}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        params = d.get("params", {})
        if kind not in _FACTORIES:
            raise UnsupportedKind(f"unknown anisotropy kind {kind!r}")
        return _FACTORIES[kind](**params)

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"Anisotropy({self.kind}({args}))"


# ----------------------------------------------------------------------
# built-in families


def euclidean():
    """phi(v) = |v|; the Wulff shape is the unit disk."""

    def profile(theta):
        one = np.ones_like(theta)
        zero = np.zeros_like(theta)
        return one, zero, zero

    return Anisotropy("euclidean", {}, profile)


def elliptic(a, b):
    """phi(v) = sqrt(a^2 v1^2 + b^2 v2^2); Wulff shape is an ellipse."""
    if a <= 0 or b <= 0:
        raise ValueError("elliptic semi-coefficients must be positive")
    a2, b2 = float(a) ** 2, float(b) ** 2

    def profile(theta):
        c, s = np.cos(theta), np.sin(theta)
        u = a2 * c * c + b2 * s * s
        up = (b2 - a2) * np.sin(2.0 * theta)
        upp = 2.0 * (b2 - a2) * np.cos(2.0 * theta)
        f = np.sqrt(u)
        fp = up / (2.0 * f)
        fpp = upp / (2.0 * f) - up * up / (4.0 * u * f)
        return f, fp, fpp

    return Anisotropy("elliptic", {"a": float(a), "b": float(b)}, profile)


def p_norm(p):
    """phi(v) = (|v1|^p + |v2|^p)^(1/p) for p >= 2."""
    p = float(p)
    if p < 2.0:
        raise ValueError("p_norm requires p >= 2 (use smoothed_l1 for p→1)")
    if p == 2.0:
        return euclidean()

    def profile(theta):
        c, s = np.cos(theta), np.sin(theta)
        ac, as_ = np.abs(c), np.abs(s)
        g = ac ** p + as_ ** p
        # d|c|^p/dtheta = -p |c|^(p-1) sgn(c) s, and the symmetric term
        gp = p * (-ac ** (p - 1) * np.sign(c) * s
                  + as_ ** (p - 1) * np.sign(s) * c)
        gpp = p * ((p - 1) * ac ** (p - 2) * s * s
                   - ac ** (p - 1) * np.sign(c) * c
                   + (p - 1) * as_ ** (p - 2) * c * c
                   - as_ ** (p - 1) * np.sign(s) * s)
        f = g ** (1.0 / p)
        fp = f * gp / (p * g)
        fpp = f * (gpp / (p * g)
                   + (1.0 / p) * (1.0 / p - 1.0) * (gp / g) ** 2)
        return f, fp, fpp

    return Anisotropy("p_norm", {"p": p}, profile)


def crystalline_l1():
    """phi(v) = |v1| + |v2|; Wulff shape is the square [-1, 1]^2.

    Convex but neither differentiable on the axes nor uniformly convex.
    """

    def profile(theta):
        c, s = np.cos(theta), np.sin(theta)
        f = np.abs(c) + np.abs(s)
        fp = -np.sign(c) * s + np.sign(s) * c
        fpp = -f  # flat faces: f'' + f = 0 away from the axes
        return f, fp, fpp

    return Anisotropy("crystalline_l1", {}, profile, regular=False,
                      smooth_everywhere=False)


def smoothed_l1(eps):
    """Uniformly convex smoothing of the l1 density.

    phi_eps(v) = sqrt(v1^2 + eps^2 |v|^2) + sqrt(v2^2 + eps^2 |v|^2),
    which on the unit circle reads sqrt(c^2 + eps^2) + sqrt(s^2 + eps^2).
    The sup gap to l1 on the circle is at most sqrt(2) * eps.
    """
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise ValueError("smoothing parameter must lie in (0, 1]")
    e2 = eps * eps

    def profile(theta):
        c, s = np.cos(theta), np.sin(theta)
        f = fp = fpp = 0.0
        for u, up, upp in (
            (c * c + e2, -np.sin(2 * theta), -2 * np.cos(2 * theta)),
            (s * s + e2, np.sin(2 * theta), 2 * np.cos(2 * theta)),
        ):
            g = np.sqrt(u)
            f = f + g
            fp = fp + up / (2 * g)
            fpp = fpp + upp / (2 * g) - up * up / (4 * u * g)
        return f, fp, fpp

    return Anisotropy("smoothed_l1", {"eps": eps}, profile)


def custom_fourier(coeffs):
    """Even cosine series on the circle, extended 1-homogeneously.

    f(theta) = coeffs[0] + sum_k coeffs[k] * cos(2 k theta).  The series
    must define a positive, uniformly convex profile; this is checked at
    construction and violations raise :class:`UnsupportedKind`.
    """
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        raise ValueError("need at least the constant coefficient")
    ks = np.arange(len(coeffs), dtype=float)

    def profile(theta):
        theta = np.asarray(theta, dtype=float)
        flat = np.ravel(theta)
        ang = 2.0 * ks[:, None] * flat[None, :]
        cos_t = np.cos(ang)
        sin_t = np.sin(ang)
        cvec = np.asarray(coeffs)[:, None]
        f = (cvec * cos_t).sum(axis=0).reshape(theta.shape)
        fp = (-2.0 * ks[:, None] * cvec * sin_t).sum(axis=0).reshape(theta.shape)
        fpp = (-4.0 * ks[:, None] ** 2 * cvec
               * cos_t).sum(axis=0).reshape(theta.shape)
        return f, fp, fpp

    a = Anisotropy("custom_fourier", {"coeffs": coeffs}, profile)
    report = a.validate(samples=2048)
    if not report.all_passed:
        raise UnsupportedKind(
            "Fourier coefficients do not define a regular anisotropy "
            f"(min tangential Hessian {report.min_tangential_hessian:.3g})")
    return a


_FACTORIES = {
    "euclidean": euclidean,
    "elliptic": elliptic,
    "p_norm": p_norm,
    "crystalline_l1": crystalline_l1,
    "smoothed_l1": smoothed_l1,
    "custom_fourier": custom_fourier,
}


def smooth_approximation(a, eps):
    """A regular density within O(eps) of `a` uniformly on the circle.

    Regular inputs are returned unchanged.  For the l1 density the
    closed-form smoothing above is used; other non-regular kinds have no
    smoothing rule and raise :class:`UnsupportedKind`.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError("smoothing parameter must lie in (0, 1]")
    if a.is_regular:
        return a
    if a.kind == "crystalline_l1":
        return smoothed_l1(eps)
    raise UnsupportedKind(f"no smoothing rule for kind {a.kind!r}")


def sup_gap(a, b, n=10000):
    """max over the unit circle of |phi_a - phi_b| (offset angle sweep)."""
    theta = (np.arange(n) + 0.5) * TWO_PI / n
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return float(np.max(np.abs(a.eval(pts) - b.eval(pts))))


def finite_difference_gradient(a, v, h=None):
    """Central-difference gradient, used as an independent cross-check."""
    v = np.asarray(v, dtype=float)
    if h is None:
        h = 1e-6 * math.hypot(v[0], v[1])
    g = np.empty(2)
    for i in range(2):
        dv = np.zeros(2)
        dv[i] = h
        g[i] = (a.eval(v + dv) - a.eval(v - dv)) / (2.0 * h)
    return g


def finite_difference_hessian(a, v, h=None):
    """Symmetric-difference Hessian with step 1e-5 |v| by default."""
    v = np.asarray(v, dtype=float)
    if h is None:
        h = 1e-5 * math.hypot(v[0], v[1])
    H = np.empty((2, 2))
    for i in range(2):
        dv = np.zeros(2)
        dv[i] = h
        H[:, i] = (a.gradient(v + dv) - a.gradient(v - dv)) / (2.0 * h)
    return 0.5 * (H + H.T)
