"""Toy internal-source far-field interference simulator.

A point source inside the sample emits a spherical reference wave;
each scatterer single-scatters the source wave toward the detector.
In the far field (detector distance >> scene size, enforced at ratio
50) the amplitude per detector direction k_hat factorizes as

    A(k_hat) ~ 1 + sum_j f_j (e^{i k d_j} / d_j) e^{i k k_hat.(r_s - r_j)}

with d_j = |r_j - r_s|, measured in units of the reference amplitude;
the recorded intensity is |A|^2.  Scalar waves, unit scattering phase,
no polarization, and no multiple scattering by construction.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, GeometryError

__all__ = [
    "HoloScene",
    "far_field_intensity",
    "scattered_field",
    "fringe_contrast",
    "fringe_period_two_source",
    "mt_wavelength_check",
]

FAR_FIELD_RATIO = 50.0


@dataclass(frozen=True)
class HoloScene:
    """Source, scatterers, and a detector plane normal to z.

    ``scatterers`` is a sequence of (position, complex amplitude); the
    detector plane sits at z = ``detector_distance`` spanning
    ``detector_extent`` in x and y with ``grid`` = (nx, ny) pixels.
    """

    wavenumber: float
    source: tuple = (0.0, 0.0, 0.0)
    scatterers: tuple = ()
    detector_distance: float = 1.0
    detector_extent: float = 0.1
    grid: tuple = (128, 128)
    _positions: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.wavenumber <= 0:
            raise ConfigurationError("wavenumber must be > 0")
        if self.detector_distance <= 0 or self.detector_extent <= 0:
            raise ConfigurationError("detector distance and extent must be > 0")
        nx, ny = self.grid
        if nx < 1 or ny < 1:
            raise ConfigurationError("grid counts must be >= 1")
        src = np.asarray(self.source, dtype=float)
        pos = [src]
        for r, f in self.scatterers:
            r = np.asarray(r, dtype=float)
            if np.allclose(r, src):
                raise GeometryError("scatterer coincides with the source")
            pos.append(r)
        pos = np.array(pos)
        size = float(np.max(np.linalg.norm(pos, axis=1)))
        diam = 0.0
        if len(pos) > 1:
            diam = float(
                np.max(np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1))
            )
        scene = max(size, diam)
        if scene > 0 and self.detector_distance < FAR_FIELD_RATIO * scene:
            raise GeometryError(
                f"detector distance {self.detector_distance} violates the "
                f"far-field ratio {FAR_FIELD_RATIO} x scene size {scene:.3g}"
            )
        object.__setattr__(self, "source", tuple(src))
        object.__setattr__(self, "_positions", pos)

    def detector_axes(self):
        nx, ny = self.grid
        half = self.detector_extent / 2.0
        x = np.linspace(-half, half, nx) if nx > 1 else np.zeros(1)
        y = np.linspace(-half, half, ny) if ny > 1 else np.zeros(1)
        return x, y


def _directions(scene: HoloScene):
    """Unit direction per detector pixel, shape (ny, nx, 3)."""
    x, y = scene.detector_axes()
    X, Y = np.meshgrid(x, y)
    Z = np.full_like(X, scene.detector_distance)
    vec = np.stack([X, Y, Z], axis=-1)
    return vec / np.linalg.norm(vec, axis=-1, keepdims=True)


def scattered_field(scene: HoloScene) -> np.ndarray:
    """Complex far-field amplitude per pixel in reference-wave units."""
    k = scene.wavenumber
    khat = _directions(scene)
    A = np.ones(khat.shape[:2], dtype=complex)
    src = np.asarray(scene.source)
    for r, f in scene.scatterers:
        r = np.asarray(r, dtype=float)
        d = float(np.linalg.norm(r - src))
        path = np.exp(1j * k * d) / d
        phase = np.exp(1j * k * np.tensordot(khat, src - r, axes=([-1], [0])))
        A = A + f * path * phase
    return A


def far_field_intensity(scene: HoloScene) -> np.ndarray:
    """Detector-plane intensity |A|^2, shape (ny, nx)."""
    A = scattered_field(scene)
    return np.abs(A) ** 2


def fringe_contrast(grid: np.ndarray) -> float:
    """(I_max - I_min) / (I_max + I_min) over a nonnegative grid."""
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise ConfigurationError("empty intensity grid")
    hi, lo = float(np.max(g)), float(np.min(g))
    if hi + lo == 0.0:
        return 0.0
    return (hi - lo) / (hi + lo)


def fringe_period_two_source(k: float, transverse_separation: float, distance: float) -> float:
    """Small-angle period 2 pi / (k d_perp / R) of a two-point interference."""
    if min(k, transverse_separation, distance) <= 0:
        raise ConfigurationError("need positive k, separation and distance")
    return 2 * np.pi * distance / (k * transverse_separation)


def mt_wavelength_check(
    phase_velocity: float = 2.0,
    omega: float = 1e12,
    dimer_spacing: float = 4e-9,
) -> dict:
    """Coherent-mode wavelength 2 pi v / omega against the lattice spacing.

    For the microtubule preset (v = 2 m/s, omega = 1e12 rad/s) the
    wavelength is ~1.3e-11 m, far below the 4 nm dimer spacing, so the
    lattice can record high-resolution interference.  Returns the
    wavelength, the ratio to the spacing, and the sub-spacing flag.
    """
    if min(phase_velocity, omega, dimer_spacing) <= 0:
        raise ConfigurationError("all arguments must be > 0")
    lam = 2 * np.pi * phase_velocity / omega
    return {
        "wavelength": lam,
        "spacing_ratio": lam / dimer_spacing,
        "below_spacing": bool(lam < dimer_spacing),
    }
