"""Closed-form tensor components of a uniformly charged triangle in its local frame.

The triangle lies in ``z = 0`` with vertices ``(l, 0, 0)``, ``(0, h, 0)`` and
``(-k, 0, 0)``. The altitude through the origin splits it into the
right triangle with legs ``l`` and ``h`` (the *l-triangle*, first quadrant)
and its mirror with legs ``k`` and ``h`` (the *k-triangle*, second quadrant).
Only the third column of the local tensor is non-zero because only the
normal component of the magnetization produces surface charge:

    H'(r) = [n_xz, n_yz, n_zz] * M'_z

The ``atanh(n / d)`` terms of the antiderivatives are evaluated through the
equivalent ``asinh(n / sqrt(d**2 - n**2))`` form, which does not saturate to
``atanh(1)`` near edge lines and stays accurate in the far field.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .geometry import RightTriangleParams

_C = -1.0 / (4.0 * np.pi)

#: Points with ``|z| < GUARD_RTOL * max(h, k, l)`` are moved to that height.
GUARD_RTOL = 1e-9


class PartialTensor(NamedTuple):
    """Third column of the local tensor; each entry is a scalar or array."""

    n_xz: np.ndarray
    n_yz: np.ndarray
    n_zz: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.n_xz, self.n_yz, self.n_zz), axis=-1)


def _check_positive(**params):
    for name, value in params.items():
        if np.any(~(np.asarray(value) > 0)):
            raise ValueError(f"{name} must be positive")


def _split(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError(f"local points must have a trailing axis of length 3, got {p.shape}")
    return p[..., 0], p[..., 1], p[..., 2]


# ---------------------------------------------------------------------------
# Antiderivative kernels
# ---------------------------------------------------------------------------


def fn_F(x, y, z, yp, h, l):
    """Hypotenuse term of the x-component, as a function of the bound ``yp``.

    Equals ``h / hypot(h, l) * atanh(f_n / f_d)``.
    """
    s = np.hypot(h, l)
    e = ((x - l) * h + y * l) / s
    perp = np.sqrt(e * e + z * z)
    f_n = l * l - l * x + h * y - h * yp * (1.0 + (l / h) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return h / s * np.arcsinh(f_n / (s * perp))


def fn_G(x, y, z, yp):
    """Leg term ``atanh((y - yp) / |r - (0, yp, 0)|)``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.arcsinh((y - yp) / np.sqrt(x * x + z * z))


def fn_K(x, y, z, xp, h, l):
    """Hypotenuse term of the y-component; ``l / hypot(h, l) * atanh(k_n / k_d)``."""
    s = np.hypot(h, l)
    e = ((x - l) * h + y * l) / s
    perp = np.sqrt(e * e + z * z)
    k_n = h * h - h * y + l * x - l * xp * (1.0 + (h / l) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return l / s * np.arcsinh(k_n / (s * perp))


def fn_L(x, y, z, xp):
    """Leg term ``atanh((x - xp) / |r - (xp, 0, 0)|)``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.arcsinh((x - xp) / np.sqrt(y * y + z * z))


def _p_atan(x, y, z, xp, h, l, dist):
    p_n = x * (h - y) - xp * (h * (1.0 - x / l) - y) - h * (x * x + z * z) / l
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.arctan(p_n / (z * dist))


def fn_P(x, y, z, xp, h, l):
    """Hypotenuse solid-angle term ``atan(p_n / p_d)``."""
    dist = np.sqrt((x - xp) ** 2 + (y - h * (1.0 - xp / l)) ** 2 + z * z)
    return _p_atan(x, y, z, xp, h, l, dist)


def fn_Q(x, y, z, xp):
    """Leg solid-angle term ``-atan((x - xp) y / (z |r - (xp, 0, 0)|))``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return -np.arctan((x - xp) * y / (z * np.sqrt((x - xp) ** 2 + y * y + z * z)))


# ---------------------------------------------------------------------------
# Right-triangle components
# ---------------------------------------------------------------------------


def n_xz_l(p, h, l):
    _check_positive(h=h, l=l)
    x, y, z = _split(p)
    return _C * (fn_F(x, y, z, h, h, l) - fn_F(x, y, z, 0.0, h, l) - (fn_G(x, y, z, h) - fn_G(x, y, z, 0.0)))


def n_yz_l(p, h, l):
    _check_positive(h=h, l=l)
    x, y, z = _split(p)
    return _C * (fn_K(x, y, z, l, h, l) - fn_K(x, y, z, 0.0, h, l) - (fn_L(x, y, z, l) - fn_L(x, y, z, 0.0)))


def n_zz_l(p, h, l):
    """z-component of the l-triangle.

    In the plane ``z = 0`` the two atan pairs cancel and the component is
    zero (the principal value on the triangle itself).
    """
    _check_positive(h=h, l=l)
    x, y, z = _split(p)
    out = _C * (fn_P(x, y, z, l, h, l) - fn_P(x, y, z, 0.0, h, l) - (fn_Q(x, y, z, l) - fn_Q(x, y, z, 0.0)))
    return np.where(z == 0, 0.0, out)


def _mirror(p):
    p = np.array(p, dtype=float)
    p[..., 0] = -p[..., 0]
    return p


def n_xz_k(p, h, k):
    """x-component of the k-triangle, by reflecting the l-triangle through x = 0."""
    return -n_xz_l(_mirror(p), h, k)


def n_yz_k(p, h, k):
    return n_yz_l(_mirror(p), h, k)


def n_zz_k(p, h, k):
    return n_zz_l(_mirror(p), h, k)


def n_xz_k_explicit(p, h, k):
    """x-component of the k-triangle written out directly from the F and G terms.

    Independent transcription of :func:`n_xz_k`; the hypotenuse term is
    evaluated at the reflected abscissa ``-x`` because the k-triangle's
    hypotenuse runs from ``(-k, 0)`` to ``(0, h)``.
    """
    _check_positive(h=h, k=k)
    x, y, z = _split(p)
    return _C * (
        fn_G(x, y, z, h) - fn_G(x, y, z, 0.0) - (fn_F(-x, y, z, h, h, k) - fn_F(-x, y, z, 0.0, h, k))
    )


# ---------------------------------------------------------------------------
# Whole triangle
# ---------------------------------------------------------------------------


def guard_z(z, scale):
    """Move ``|z| < GUARD_RTOL * scale`` off the face plane, keeping the side.

    ``z == 0`` (either sign of zero) goes to the positive side.
    """
    eps = GUARD_RTOL * np.asarray(scale, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.where(np.abs(z) < eps, np.where(z < 0, -eps, eps), z)


def _local_tensor_arrays(x, y, z, h, k, l):
    """Unguarded ``(n_xz, n_yz, n_zz)`` of the whole triangle.

    Sum of the l- and k-triangle components with the terms belonging to the
    shared altitude cancelled analytically.
    """
    zz = z * z
    r_a = np.sqrt((x - l) ** 2 + y * y + zz)
    r_b = np.sqrt(x * x + (y - h) ** 2 + zz)
    r_c = np.sqrt((x + k) ** 2 + y * y + zz)

    # line integrals of 1/R along the two hypotenuses
    s_l = np.hypot(h, l)
    e_l = ((x - l) * h + y * l) / s_l
    perp_l = np.sqrt(e_l * e_l + zz)
    s_k = np.hypot(h, k)
    e_k = ((-x - k) * h + y * k) / s_k
    perp_k = np.sqrt(e_k * e_k + zz)
    with np.errstate(divide="ignore", invalid="ignore"):
        hyp_l = np.arcsinh((h * y - l * x - h * h) / (s_l * perp_l)) - np.arcsinh(
            (l * l - l * x + h * y) / (s_l * perp_l)
        )
        hyp_k = np.arcsinh((h * y + k * x - h * h) / (s_k * perp_k)) - np.arcsinh(
            (k * k + k * x + h * y) / (s_k * perp_k)
        )
        rho_y = np.sqrt(y * y + zz)
        base = np.arcsinh((x + k) / rho_y) - np.arcsinh((x - l) / rho_y)

        n_xz = _C * (h / s_l * hyp_l - h / s_k * hyp_k)
        n_yz = _C * (l / s_l * hyp_l + k / s_k * hyp_k + base)

        solid = (
            _p_atan(x, y, z, l, h, l, r_a)
            - _p_atan(x, y, z, 0.0, h, l, r_b)
            + _p_atan(-x, y, z, k, h, k, r_c)
            - _p_atan(-x, y, z, 0.0, h, k, r_b)
            + np.arctan((x - l) * y / (z * r_a))
            - np.arctan((x + k) * y / (z * r_c))
        )
    n_zz = _C * solid
    return n_xz, n_yz, n_zz


def local_tensor(p, params: RightTriangleParams) -> PartialTensor:
    """Third column of the local tensor of the full triangle at local point(s) ``p``.

    Points closer to the face plane than ``1e-9 * max(h, k, l)`` are
    evaluated at that height on their own side (``z = 0`` counts as the
    positive side), so in-plane values are one-sided limits.
    """
    x, y, z = _split(p)
    z = guard_z(z, params.scale)
    return PartialTensor(*_local_tensor_arrays(x, y, z, params.h, params.k, params.l))
