"""Built-in parametric model pairs producing aligned snapshot ensembles.

Two desk-scale studies are bundled:

* A composite cantilever beam under a uniform load. The low-fidelity model
  is the classical beam-theory displacement of an equivalent single-material
  section, which makes every realization a scalar multiple of one shape
  (a rank-1 ensemble). The high-fidelity side is a *substitute* for a
  shear-resolving solver: the same displacement plus an analytic
  shear-compliance correction whose web area is reduced by the five holes.
  It is deliberately imperfect-but-correlated, not a reference solution.

* A one-dimensional steady diffusion problem -(a u')' = 1 with a smooth
  log-uniform random coefficient field, solved by second-order finite
  differences on a coarse (low-fidelity) and a fine (high-fidelity) grid.
  The QoI is the flux a u' sampled at the grid nodes, so the two fidelities
  have different output dimensions.

All generators are deterministic functions of (seed, config).
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, OutOfBounds, SolverFailure
from .snapshots import SnapshotMatrix

__all__ = [
    "ParameterSample",
    "BeamConfig",
    "DiffusionConfig",
    "draw_beam_samples",
    "beam_lofi",
    "beam_hifi_substitute",
    "beam_pair",
    "draw_diffusion_samples",
    "diffusion_pair",
]


@dataclass(frozen=True)
class ParameterSample:
    """One random-input realization: an opaque id plus the input vector."""

    id: str
    mu: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mu, dtype=np.float64)
        if m.ndim != 1 or m.size == 0:
            raise DimensionMismatch("mu must be a non-empty 1-D vector")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mu", m)
        object.__setattr__(self, "id", str(self.id))


# --------------------------------------------------------------------------
# composite cantilever beam
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BeamConfig:
    """Geometry, load and material ranges of the composite beam.

    The cross section stacks a bottom flange (h2), a web (h3) and a top
    flange (h1), all of width ``width``; the web carries five circular
    holes of radius ``hole_radius`` centred at ``hole_centers`` along the
    span. Inputs mu = (q, E1, E2, E3) are uniform over the given ranges.
    """

    length: float = 50.0
    h1: float = 0.1
    h2: float = 0.1
    h3: float = 5.0
    width: float = 1.0
    hole_radius: float = 1.5
    hole_centers: tuple[float, ...] = (5.0, 15.0, 25.0, 35.0, 45.0)
    q_range: tuple[float, float] = (9.0, 11.0)
    e1_range: tuple[float, float] = (0.9e6, 1.1e6)
    e2_range: tuple[float, float] = (0.9e6, 1.1e6)
    e3_range: tuple[float, float] = (0.9e4, 1.1e4)
    n_grid: int = 128
    poisson: float = 0.3
    shear_coefficient: float = 5.0 / 6.0

    def __post_init__(self):
        for name in ("length", "h1", "h2", "h3", "width", "hole_radius"):
            if getattr(self, name) <= 0.0:
                raise DimensionMismatch(f"beam geometry {name} must be positive")
        for name in ("q_range", "e1_range", "e2_range", "e3_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise DimensionMismatch(f"{name} bounds must be ordered")
        if self.n_grid < 2:
            raise DimensionMismatch("n_grid must be at least 2")
        if self._web_height_effective() <= 0.0:
            raise DimensionMismatch("holes remove the entire web shear area")

    def _web_height_effective(self) -> float:
        # hole area smeared uniformly over the span
        holes = len(self.hole_centers) * math.pi * self.hole_radius**2
        return self.h3 - holes / self.length


def _check_beam_mu(sample: ParameterSample, cfg: BeamConfig):
    mu = sample.mu
    if mu.size != 4:
        raise DimensionMismatch(f"beam inputs are (q, E1, E2, E3), got {mu.size} values")
    ranges = (cfg.q_range, cfg.e1_range, cfg.e2_range, cfg.e3_range)
    names = ("q", "E1", "E2", "E3")
    for name, value, (lo, hi) in zip(names, mu, ranges):
        if not lo <= value <= hi:
            raise OutOfBounds(
                f"sample {sample.id}: {name}={value} outside [{lo}, {hi}]"
            )
    return float(mu[0]), float(mu[1]), float(mu[2]), float(mu[3])


def _section_inertia(e1: float, e2: float, e3: float, cfg: BeamConfig) -> float:
    """Second moment of the equivalent single-material cross section.

    Flange widths are scaled by the modulus ratios (w1 = E1/E3 * w,
    w2 = E2/E3 * w); the moment is taken about the centroid of the
    three-rectangle stack.
    """
    w1 = (e1 / e3) * cfg.width
    w2 = (e2 / e3) * cfg.width
    # (width, height, centroid height measured from the section bottom)
    pieces = (
        (w2, cfg.h2, 0.5 * cfg.h2),
        (cfg.width, cfg.h3, cfg.h2 + 0.5 * cfg.h3),
        (w1, cfg.h1, cfg.h2 + cfg.h3 + 0.5 * cfg.h1),
    )
    area = sum(b * h for b, h, _ in pieces)
    centroid = sum(b * h * y for b, h, y in pieces) / area
    return sum(
        b * h**3 / 12.0 + b * h * (y - centroid) ** 2 for b, h, y in pieces
    )


def beam_grid(cfg: BeamConfig) -> np.ndarray:
    """Top-cord output points, uniform over [0, length]."""
    return np.linspace(0.0, cfg.length, cfg.n_grid)


def beam_lofi(sample: ParameterSample, cfg: BeamConfig) -> np.ndarray:
    """Beam-theory vertical displacement of the top cord.

    u(x) = -(q L^4 / 24 E I) ((x/L)^4 - 4 (x/L)^3 + 6 (x/L)^2) with E = E3
    and I the equivalent-section inertia; every realization is the same
    shape scaled by q / (E3 I).
    """
    q, e1, e2, e3 = _check_beam_mu(sample, cfg)
    inertia = _section_inertia(e1, e2, e3, cfg)
    xi = beam_grid(cfg) / cfg.length
    shape = xi**4 - 4.0 * xi**3 + 6.0 * xi**2
    return -(q * cfg.length**4 / (24.0 * e3 * inertia)) * shape


def beam_hifi_substitute(
    sample: ParameterSample, cfg: BeamConfig, shear_scale: float = 1.0
) -> np.ndarray:
    """Displacement with an added shear-compliance correction.

    The correction integrates the shear strain of a cantilever under a
    uniform load, q (L x - x^2 / 2) / (kappa G A), with the web shear area
    reduced by the five holes (smeared over the span) and G derived from E3.
    ``shear_scale = 0`` degenerates to :func:`beam_lofi` exactly. This is a
    stand-in for a shear-resolving solver, not a reference solution.
    """
    q, e1, e2, e3 = _check_beam_mu(sample, cfg)
    del e1, e2
    u = beam_lofi(sample, cfg)
    x = beam_grid(cfg)
    shear_modulus = e3 / (2.0 * (1.0 + cfg.poisson))
    shear_area = cfg.width * cfg._web_height_effective()
    correction = (
        -q * (cfg.length * x - 0.5 * x**2)
        / (cfg.shear_coefficient * shear_modulus * shear_area)
    )
    return u + shear_scale * correction


def draw_beam_samples(
    n: int, seed: int, cfg: BeamConfig | None = None
) -> list[ParameterSample]:
    """n i.i.d. uniform input samples (q, E1, E2, E3), deterministically."""
    cfg = cfg or BeamConfig()
    if n < 1:
        raise DimensionMismatch("need at least one sample")
    rng = np.random.default_rng(seed)
    ranges = (cfg.q_range, cfg.e1_range, cfg.e2_range, cfg.e3_range)
    draws = np.column_stack(
        [rng.uniform(lo, hi, size=n) for lo, hi in ranges]
    )
    return [
        ParameterSample(id=f"beam-{i:04d}", mu=draws[i]) for i in range(n)
    ]


def beam_pair(
    samples: list[ParameterSample], cfg: BeamConfig | None = None
) -> tuple[SnapshotMatrix, SnapshotMatrix]:
    """(high, low) snapshot matrices for the same samples, id-aligned."""
    cfg = cfg or BeamConfig()
    ids = tuple(s.id for s in samples)
    high = np.column_stack([beam_hifi_substitute(s, cfg) for s in samples])
    low = np.column_stack([beam_lofi(s, cfg) for s in samples])
    return (
        SnapshotMatrix(data=high, sample_ids=ids),
        SnapshotMatrix(data=low, sample_ids=ids),
    )


# --------------------------------------------------------------------------
# 1-D parametric diffusion
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffusionConfig:
    """Two-grid setup for the steady diffusion pair.

    The log-coefficient is a sine expansion log a(x) = sum_i c_i mu_i
    sin(i pi x) with amplitudes c_i = field_amplitude * field_decay^(i-1)
    and mu_i uniform on [-1, 1]; d_params modes are used. ``mesh_low`` and
    ``mesh_high`` count grid nodes including both boundaries.
    """

    mesh_low: int = 16
    mesh_high: int = 256
    d_params: int = 5
    field_amplitude: float = 1.0
    field_decay: float = 0.5

    def __post_init__(self):
        if self.mesh_low < 3 or self.mesh_high < 3:
            raise DimensionMismatch("meshes need at least 3 nodes")
        if self.mesh_low > self.mesh_high:
            raise DimensionMismatch("mesh_low must not exceed mesh_high")
        if self.d_params < 1:
            raise DimensionMismatch("d_params must be >= 1")
        if self.field_amplitude < 0.0 or not 0.0 < self.field_decay <= 1.0:
            raise DimensionMismatch("field amplitude >= 0 and decay in (0, 1] required")


def _check_diffusion_mu(sample: ParameterSample, cfg: DiffusionConfig) -> np.ndarray:
    mu = sample.mu
    if mu.size != cfg.d_params:
        raise DimensionMismatch(
            f"sample {sample.id}: expected {cfg.d_params} inputs, got {mu.size}"
        )
    if np.any(np.abs(mu) > 1.0):
        raise OutOfBounds(f"sample {sample.id}: inputs must lie in [-1, 1]")
    return mu


def _coefficient(x: np.ndarray, mu: np.ndarray, cfg: DiffusionConfig) -> np.ndarray:
    modes = np.arange(1, cfg.d_params + 1)
    amps = cfg.field_amplitude * cfg.field_decay ** (modes - 1)
    log_a = np.sin(np.pi * np.outer(x, modes)) @ (amps * mu)
    return np.exp(log_a)


def _solve_flux(mu: np.ndarray, n_nodes: int, cfg: DiffusionConfig) -> np.ndarray:
    """Solve -(a u')' = 1 on [0, 1], u(0) = u(1) = 0; return flux a u'.

    Flux-form second-order differences with the coefficient at half nodes;
    the flux uses central differences inside and second-order one-sided
    stencils at the boundaries, so a constant coefficient reproduces the
    exact linear flux (1 - 2x)/2 to roundoff.
    """
    x = np.linspace(0.0, 1.0, n_nodes)
    h = x[1] - x[0]
    a_half = _coefficient(0.5 * (x[:-1] + x[1:]), mu, cfg)
    if np.any(a_half <= 0.0):  # exp(...) > 0 always; guards future edits
        raise SolverFailure("diffusion coefficient must be positive")

    n_int = n_nodes - 2
    lower = a_half[1:-1] / h**2
    upper = lower.copy()
    diag = (a_half[:-1] + a_half[1:]) / h**2
    banded = np.zeros((3, n_int))
    banded[0, 1:] = -upper
    banded[1, :] = diag
    banded[2, :-1] = -lower
    rhs = np.ones(n_int)
    try:
        interior = scipy.linalg.solve_banded((1, 1), banded, rhs)
    except (ValueError, scipy.linalg.LinAlgError) as exc:
        raise SolverFailure(f"tridiagonal solve failed: {exc}") from exc

    u = np.zeros(n_nodes)
    u[1:-1] = interior
    du = np.empty(n_nodes)
    du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    du[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return _coefficient(x, mu, cfg) * du


def draw_diffusion_samples(
    n: int, seed: int, cfg: DiffusionConfig | None = None
) -> list[ParameterSample]:
    """n i.i.d. uniform samples on [-1, 1]^d_params, deterministically."""
    cfg = cfg or DiffusionConfig()
    if n < 1:
        raise DimensionMismatch("need at least one sample")
    rng = np.random.default_rng(seed)
    draws = rng.uniform(-1.0, 1.0, size=(n, cfg.d_params))
    return [
        ParameterSample(id=f"diff-{i:04d}", mu=draws[i]) for i in range(n)
    ]


def diffusion_pair(
    samples: list[ParameterSample], cfg: DiffusionConfig | None = None
) -> tuple[SnapshotMatrix, SnapshotMatrix]:
    """(high, low) flux snapshot matrices on the fine and coarse grids."""
    cfg = cfg or DiffusionConfig()
    ids = tuple(s.id for s in samples)
    high_cols = []
    low_cols = []
    for s in samples:
        mu = _check_diffusion_mu(s, cfg)
        high_cols.append(_solve_flux(mu, cfg.mesh_high, cfg))
        low_cols.append(_solve_flux(mu, cfg.mesh_low, cfg))
    return (
        SnapshotMatrix(data=np.column_stack(high_cols), sample_ids=ids),
        SnapshotMatrix(data=np.column_stack(low_cols), sample_ids=ids),
    )
