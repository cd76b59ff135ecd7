"""Meshes, discrete differential operators and the forcing decomposition.

Two desk-scale geometries are supported:

``channel1d``
    Unidirectional shear flow ``v = (v(y, t), 0, 0)`` on ``[0, L]`` with
    no-slip walls.  Velocities live on the ``M + 1`` nodes, gradients,
    stresses and minimal states on the ``M`` cell centres.  The gradient is
    the centred difference across each cell.
``periodic2d``
    An ``L x L`` periodic box on an ``M x M`` grid with spectral derivatives.
    Arrays are indexed ``[..., iy, ix]``; vector components are ordered
    ``(x, y)`` and tensors satisfy ``G[i, j] = d v_i / d x_j``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.linalg import solve_banded


@dataclass(frozen=True)
class Mesh:
    kind: str
    M: int
    L: float = 1.0

    def __post_init__(self):
        if self.kind not in ("channel1d", "periodic2d"):
            raise ValueError(f"unknown mesh kind {self.kind!r}")
        if self.M < 4:
            raise ValueError("mesh needs M >= 4")

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def is_channel(self) -> bool:
        return self.kind == "channel1d"

    @property
    def nodes(self) -> np.ndarray:
        if self.is_channel:
            return np.linspace(0.0, self.L, self.M + 1)
        return np.arange(self.M) * self.h

    @property
    def centres(self) -> np.ndarray:
        return (np.arange(self.M) + 0.5) * self.h

    @property
    def velocity_shape(self) -> tuple:
        return (self.M + 1,) if self.is_channel else (2, self.M, self.M)

    @property
    def gradient_shape(self) -> tuple:
        return (self.M,) if self.is_channel else (2, 2, self.M, self.M)

    @property
    def cell_weight(self) -> float:
        """Quadrature weight of one gradient-location sample."""
        return self.h if self.is_channel else self.h**2

    @property
    def measure(self) -> float:
        return self.L if self.is_channel else self.L**2

    @property
    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.nodes
        return np.meshgrid(x, x, indexing="xy")

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        # derivative wavenumbers; the Nyquist mode is dropped
        k = 2 * np.pi * np.fft.fftfreq(self.M, self.h)
        if self.M % 2 == 0:
            k[self.M // 2] = 0.0
        kx, ky = np.meshgrid(k, k, indexing="xy")
        return kx, ky

    @cached_property
    def _k2(self) -> np.ndarray:
        kx, ky = self.wavenumbers
        return kx**2 + ky**2

    @cached_property
    def _stiffness(self) -> np.ndarray:
        # banded (D^T h D) on interior nodes: 2/h on the diagonal, -1/h off it
        n = self.M - 1
        ab = np.zeros((3, n))
        ab[0, 1:] = -1.0 / self.h
        ab[1, :] = 2.0 / self.h
        ab[2, :-1] = -1.0 / self.h
        return ab

    # -- discrete operators on raw arrays ---------------------------------

    def grad(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if self.is_channel:
            return np.diff(v, axis=-1) / self.h
        # new axis -3 is the derivative direction j; for vectors axis -4 is i
        vh = np.fft.fft2(v)
        kx, ky = self.wavenumbers
        return np.real(np.fft.ifft2(np.stack([1j * kx * vh, 1j * ky * vh], axis=-3)))

    def div(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q)
        if self.is_channel:
            out = np.zeros(q.shape[:-1] + (self.M + 1,), dtype=q.dtype)
            out[..., 1:-1] = np.diff(q, axis=-1) / self.h
            return out
        qh = np.fft.fft2(q)
        kx, ky = self.wavenumbers
        res = 1j * kx * qh[..., 0, :, :] + 1j * ky * qh[..., 1, :, :]
        return np.real(np.fft.ifft2(res))

    def inner(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Spatial L2 pairing of gradient-location fields (sums trailing axes)."""
        nd = len(self.gradient_shape)
        axes = tuple(range(-nd, 0))
        return np.sum(a * b, axis=axes) * self.cell_weight

    def node_inner(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        nd = len(self.velocity_shape)
        axes = tuple(range(-nd, 0))
        w = self.h if self.is_channel else self.h**2
        return np.sum(a * b, axis=axes) * w

    def strain_rate(self, grad: np.ndarray) -> np.ndarray:
        """Symmetric part of the velocity gradient (shear component in the channel)."""
        if self.is_channel:
            return 0.5 * grad
        return 0.5 * (grad + np.swapaxes(grad, -3, -4))

    def project(self, v: np.ndarray) -> np.ndarray:
        """Leray projection onto divergence-free, zero-mean fields (periodic2d)."""
        vh = np.fft.fft2(v)
        kx, ky = self.wavenumbers
        k2 = np.where(self._k2 > 0, self._k2, 1.0)
        kdotv = (kx * vh[..., 0, :, :] + ky * vh[..., 1, :, :]) / k2
        out = np.stack([vh[..., 0, :, :] - kx * kdotv, vh[..., 1, :, :] - ky * kdotv], axis=-3)
        out = out * (self._k2 > 0)
        return np.real(np.fft.ifft2(out))

    def solve_unit(self, J: np.ndarray) -> np.ndarray:
        """Admissible velocity ``v`` with ``div(grad v - J) = grad p``.

        Channel: ``(D^T h D) v = D^T h J`` on interior nodes with ``v = 0`` at
        the walls.  Periodic: per-mode division after Leray projection, zero
        mean velocity.  Leading axes of ``J`` are treated as a batch.
        """
        J = np.asarray(J)
        if self.is_channel:
            batch = J.shape[:-1]
            flat = J.reshape(-1, self.M)
            rhs = (flat[:, :-1] - flat[:, 1:]).T
            inner = solve_banded((1, 1), self._stiffness, rhs)
            out = np.zeros((flat.shape[0], self.M + 1), dtype=np.result_type(J, float))
            out[:, 1:-1] = inner.T
            return out.reshape(batch + (self.M + 1,))
        Jh = np.fft.fft2(J)
        kx, ky = self.wavenumbers
        r = [1j * (Jh[..., i, 0, :, :] * kx + Jh[..., i, 1, :, :] * ky) for i in range(2)]
        k2 = np.where(self._k2 > 0, self._k2, 1.0)
        kdotr = (kx * r[0] + ky * r[1]) / k2
        vh = np.stack([r[0] - kx * kdotr, r[1] - ky * kdotr], axis=-3) / -k2
        vh = vh * (self._k2 > 0)
        out = np.fft.ifft2(vh)
        return out if np.iscomplexobj(J) else np.real(out)


@dataclass(frozen=True, eq=False)
class Field:
    mesh: Mesh
    values: np.ndarray
    location: str = "node"

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))

    def coordinates(self) -> list[np.ndarray]:
        m = self.mesh
        if m.is_channel:
            return [m.nodes if self.location == "node" else m.centres]
        x, y = m.grid
        return [x.ravel(), y.ravel()]

    def to_csv(self, path) -> None:
        """Write node coordinates followed by one column per component."""
        coords = self.coordinates()
        npts = coords[0].size
        comps = self.values.reshape(-1, npts) if self.values.size != npts else self.values.reshape(1, npts)
        names = ["y"] if self.mesh.is_channel else ["x", "y"]
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names + [f"c{i}" for i in range(comps.shape[0])])
            for i in range(npts):
                w.writerow([repr(float(c[i])) for c in coords] + [repr(float(v)) for v in comps[:, i]])


def gradient(mesh: Mesh, field: Field) -> Field:
    return Field(mesh, mesh.grad(field.values), "cell" if mesh.is_channel else "node")


def divergence(mesh: Mesh, field: Field) -> Field:
    return Field(mesh, mesh.div(field.values), "node")


@dataclass(frozen=True, eq=False)
class ForcingDecomposition:
    """``f = curl a + grad phi + residual`` with skew tensor ``A`` (``div A = curl a``)."""

    solenoidal: np.ndarray
    irrotational: np.ndarray
    stream: np.ndarray
    potential: np.ndarray
    skew: np.ndarray
    residual: np.ndarray
    mean_removed: np.ndarray


def curl_scalar(mesh: Mesh, a: np.ndarray) -> np.ndarray:
    """2-D curl of a stream function: ``(d_y a, -d_x a)``."""
    g = mesh.grad(a)
    return np.stack([g[..., 1, :, :], -g[..., 0, :, :]], axis=-3)


def skew_from_stream(a: np.ndarray) -> np.ndarray:
    """Skew tensor ``[[0, a], [-a, 0]]`` whose row divergence is ``curl a``."""
    z = np.zeros_like(a)
    return np.stack([np.stack([z, a], axis=-3), np.stack([-a, z], axis=-3)], axis=-4)


def helmholtz_decompose(mesh: Mesh, f) -> ForcingDecomposition:
    """Spectral split of a periodic body force into curl and gradient parts."""
    if mesh.is_channel:
        raise ValueError("helmholtz_decompose needs a periodic2d mesh")
    f = np.asarray(f.values if isinstance(f, Field) else f, dtype=float)
    fh = np.fft.fft2(f)
    kx, ky = mesh.wavenumbers
    k2 = mesh._k2
    nz = k2 > 0
    safe = np.where(nz, k2, 1.0)
    kdotf = (kx * fh[0] + ky * fh[1]) / safe * nz
    irr_h = np.stack([kx * kdotf, ky * kdotf])
    sol_h = np.stack([fh[0] * nz - irr_h[0], fh[1] * nz - irr_h[1]])
    phi_h = -1j * kdotf
    a_h = 1j * (kx * sol_h[1] - ky * sol_h[0]) / safe * nz
    resid_h = fh * ~nz
    back = lambda x: np.real(np.fft.ifft2(x))
    mean = f.mean(axis=(-2, -1))
    a = back(a_h)
    return ForcingDecomposition(
        solenoidal=back(sol_h),
        irrotational=back(irr_h),
        stream=a,
        potential=back(phi_h),
        skew=skew_from_stream(a),
        residual=back(resid_h),
        mean_removed=mean,
    )


def channel_force_potential(mesh: Mesh, g_nodes) -> np.ndarray:
    """Cell field ``A`` with ``A_{c} - A_{c-1} = h g`` at interior nodes, zero mean.

    This is the channel analogue of the skew tensor: ``int g w = -int A w'``
    for every ``w`` vanishing at the walls.
    """
    g = np.asarray(g_nodes, dtype=float)
    A = np.zeros(g.shape[:-1] + (mesh.M,))
    A[..., 1:] = np.cumsum(g[..., 1:-1], axis=-1) * mesh.h
    return A - A.mean(axis=-1, keepdims=True)


def effective_state_source(i0, A) -> np.ndarray:
    """``J = I0 - A`` nodewise."""
    i0 = np.asarray(i0.values if isinstance(i0, Field) else i0)
    A = np.asarray(A.values if isinstance(A, Field) else A)
    if i0.shape != A.shape:
        raise ValueError(f"shape mismatch {i0.shape} vs {A.shape}")
    return i0 - A
