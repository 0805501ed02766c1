"""Split-step Fourier solver for the NLS equation with a variable coefficient.

    -1/2 lap psi + w(x, t) |psi|^2 psi = i d psi / dt

on a periodic box in one or two dimensions. w is real; each sub-step is a
pure phase multiplication, so the discrete L2 norm is conserved to rounding.
"""

import enum
import math
import struct
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import BlowUpError, DomainError, PreconditionError

SNAPSHOT_MAGIC = b"NLS1"
_HEURISTIC_LIMIT = 0.1


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class WaveField:
    values: np.ndarray
    box_lengths: Tuple[float, ...]
    time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim not in (1, 2):
            raise DomainError(f"only 1-D and 2-D fields are supported, got {vals.ndim}-D")
        for n in vals.shape:
            if n < 16 or not _is_pow2(n):
                raise DomainError(f"grid sizes must be powers of two >= 16, got {vals.shape}")
        box = tuple(float(x) for x in np.atleast_1d(self.box_lengths))
        if len(box) != vals.ndim or not all(math.isfinite(x) and x > 0 for x in box):
            raise DomainError(f"need {vals.ndim} positive box lengths, got {self.box_lengths}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "box_lengths", box)
        object.__setattr__(self, "time", float(self.time))

    @property
    def dims(self):
        return self.values.ndim

    @property
    def grid_shape(self):
        return self.values.shape

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.box_lengths, self.grid_shape))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    def axes(self):
        """Per-axis coordinates on [-L/2, L/2)."""
        return [(-0.5 + np.arange(n) / n) * L for n, L in zip(self.grid_shape, self.box_lengths)]

    def coordinates(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    def wavenumbers(self):
        return [2.0 * np.pi * np.fft.fftfreq(n, d=L / n) for n, L in zip(self.grid_shape, self.box_lengths)]

    def k_squared(self):
        ks = np.meshgrid(*self.wavenumbers(), indexing="ij")
        return sum(k * k for k in ks)

    def with_values(self, values, time=None):
        return replace(self, values=values, time=self.time if time is None else time)

    @classmethod
    def from_function(cls, func, shape, box_lengths, time=0.0):
        shape = tuple(int(n) for n in np.atleast_1d(shape))
        box = tuple(float(x) for x in np.atleast_1d(box_lengths))
        probe = cls(np.zeros(shape, dtype=complex), box, time)
        return probe.with_values(func(*probe.coordinates()))


class CoefficientKind(str, enum.Enum):
    CONSTANT = "constant"
    GAUSSIAN_ENVELOPE = "gaussian_envelope"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class CoefficientField:
    """w(x, t) = s(t) * w(x), with s an optional scalar modulation (default 1).

    constant: w(x) = value
    gaussian_envelope: w(x) = background + amplitude exp(-|x - center|^2 / width^2)
    tabulated: w(x) given on the grid, shape must match the field
    """

    kind: CoefficientKind
    value: float = 0.0
    amplitude: float = 0.0
    width: float = 1.0
    center: Tuple[float, ...] = ()
    background: float = 0.0
    table: Optional[np.ndarray] = None
    modulation: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CoefficientKind(self.kind))
        for name in ("value", "amplitude", "width", "background"):
            v = getattr(self, name)
            if isinstance(v, complex) or np.iscomplexobj(v):
                raise DomainError(f"w must be real; {name} is complex")
            if not math.isfinite(float(v)):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, float(v))
        if self.kind is CoefficientKind.GAUSSIAN_ENVELOPE and not self.width > 0:
            raise DomainError("gaussian envelope width must be positive")
        if self.kind is CoefficientKind.TABULATED:
            if self.table is None:
                raise DomainError("tabulated coefficient needs a table")
            if np.iscomplexobj(self.table):
                raise DomainError("w must be real; tabulated values are complex")
            tab = np.asarray(self.table, dtype=float)
            if not np.all(np.isfinite(tab)):
                raise DomainError("tabulated w must be finite")
            object.__setattr__(self, "table", tab)

    @classmethod
    def constant(cls, value, modulation=None):
        return cls(CoefficientKind.CONSTANT, value=value, modulation=modulation)

    @classmethod
    def gaussian_envelope(cls, amplitude, width, center=(), background=0.0, modulation=None):
        return cls(CoefficientKind.GAUSSIAN_ENVELOPE, amplitude=amplitude, width=width,
                   center=tuple(center), background=background, modulation=modulation)

    @classmethod
    def tabulated(cls, table, modulation=None):
        return cls(CoefficientKind.TABULATED, table=table, modulation=modulation)

    @property
    def time_dependent(self):
        return self.modulation is not None

    def spatial(self, wf):
        """w(x) on the grid of ``wf`` without the modulation factor."""
        if self.kind is CoefficientKind.CONSTANT:
            return np.full(wf.grid_shape, self.value)
        if self.kind is CoefficientKind.TABULATED:
            if self.table.shape != wf.grid_shape:
                raise DomainError(f"table shape {self.table.shape} != grid shape {wf.grid_shape}")
            return self.table
        center = self.center or (0.0,) * wf.dims
        if len(center) != wf.dims:
            raise DomainError("envelope center has the wrong dimension")
        r2 = sum((x - c) ** 2 for x, c in zip(wf.coordinates(), center))
        return self.background + self.amplitude * np.exp(-r2 / self.width**2)

    def scale(self, t):
        if self.modulation is None:
            return 1.0
        s = self.modulation(t)
        if isinstance(s, complex) or not math.isfinite(s):
            raise DomainError(f"modulation must be real and finite, got {s} at t={t}")
        return float(s)


def _check_heuristic(wf, wmax, dt):
    amp2 = float(np.max(np.abs(wf.values) ** 2))
    if abs(dt) * wmax * amp2 > _HEURISTIC_LIMIT:
        warnings.warn(f"dt*max|w|*max|psi|^2 = {abs(dt) * wmax * amp2:.3g}; step may be inaccurate",
                      RuntimeWarning, stacklevel=3)


class _Stepper:
    # caches the kinetic propagator and w(x) for repeated steps
    def __init__(self, wf, w, dt):
        self.dt = float(dt)
        self.w_x = w.spatial(wf)
        self.w = w
        self.kinetic = np.exp(-0.5j * wf.k_squared() * self.dt)

    def __call__(self, wf):
        dt = self.dt
        t = wf.time
        psi = wf.values
        w1 = self.w_x * self.w.scale(t + 0.25 * dt)
        w2 = self.w_x * self.w.scale(t + 0.75 * dt)
        with np.errstate(over="ignore", invalid="ignore"):
            psi = psi * np.exp(-0.5j * dt * w1 * np.abs(psi) ** 2)
            psi = np.fft.ifftn(self.kinetic * np.fft.fftn(psi))
            psi = psi * np.exp(-0.5j * dt * w2 * np.abs(psi) ** 2)
        if not np.all(np.isfinite(psi)):
            raise BlowUpError(f"non-finite field at t = {t + dt}", time=t + dt)
        return WaveField(psi, wf.box_lengths, t + dt)


def step(wf, w, dt):
    """One Strang step: half nonlinear phase, full kinetic step, half nonlinear phase.

    The modulation of w is sampled at the midpoints of the two half steps.
    A negative dt runs the scheme backwards.
    """
    if dt == 0 or not math.isfinite(dt):
        raise DomainError(f"dt must be finite and non-zero, got {dt}")
    stepper = _Stepper(wf, w, dt)
    _check_heuristic(wf, float(np.max(np.abs(stepper.w_x))) * abs(w.scale(wf.time)), dt)
    return stepper(wf)


def norm(wf):
    return math.sqrt(float(np.sum(np.abs(wf.values) ** 2)) * wf.cell_volume)


def energy(wf, w):
    """sum (1/2 |grad psi|^2 + 1/2 w |psi|^4) dV, gradient taken spectrally."""
    if w.time_dependent:
        raise PreconditionError("energy is only conserved, and only defined here, for time-independent w")
    psi_hat = np.fft.fftn(wf.values)
    # Parseval: sum |grad psi|^2 = sum k^2 |psi_hat|^2 / N
    kinetic = float(np.sum(wf.k_squared() * np.abs(psi_hat) ** 2)) / wf.values.size
    potential = float(np.sum(w.spatial(wf) * np.abs(wf.values) ** 4))
    return 0.5 * (kinetic + potential) * wf.cell_volume


@dataclass
class Trajectory:
    times: List[float] = field(default_factory=list)
    norms: List[float] = field(default_factory=list)
    energies: List[float] = field(default_factory=list)
    fields: List[WaveField] = field(default_factory=list)
    final: Optional[WaveField] = None

    def rows(self):
        for t, n, e in zip(self.times, self.norms, self.energies):
            yield t, n, e


def run(initial, w, t_final, dt, sample_every=1, keep_fields=False):
    """Advance ``initial`` to t_final in steps of dt, sampling every few steps.

    The number of steps is round((t_final - t0) / dt); t_final should be a
    multiple of dt. Energies are NaN when w depends on time. On blow-up the
    partially filled trajectory rides on the exception.
    """
    if not dt > 0 or not math.isfinite(dt):
        raise DomainError(f"dt must be positive, got {dt}")
    if int(sample_every) < 1:
        raise DomainError("sample_every must be a positive integer")
    span = t_final - initial.time
    if span < 0:
        raise DomainError("t_final lies before the initial time")
    n_steps = int(round(span / dt))
    if abs(n_steps * dt - span) > 1e-9 * max(1.0, abs(span)):
        raise DomainError(f"t_final - t0 = {span} is not a multiple of dt = {dt}")

    traj = Trajectory()

    def sample(wf):
        traj.times.append(wf.time)
        traj.norms.append(norm(wf))
        traj.energies.append(math.nan if w.time_dependent else energy(wf, w))
        if keep_fields:
            traj.fields.append(wf)

    wf = initial
    stepper = _Stepper(wf, w, dt)
    _check_heuristic(wf, float(np.max(np.abs(stepper.w_x))), dt)
    sample(wf)
    t0 = initial.time
    for i in range(1, n_steps + 1):
        try:
            wf = stepper(wf)
        except BlowUpError as exc:
            traj.final = wf
            exc.trajectory = traj
            raise
        # re-anchor the clock so that long runs do not accumulate drift in t
        wf = WaveField(wf.values, wf.box_lengths, t0 + i * dt)
        if i % sample_every == 0 or i == n_steps:
            sample(wf)
    traj.final = wf
    return traj


# ---------------------------------------------------------------------------
# initial data


def gaussian_field(shape, box_lengths, width=1.0, center=None, momentum=None, normalized=True):
    """exp(-|x - x0|^2 / (2 width^2) + i k0.x), unit norm by default."""
    wf = WaveField(np.zeros(tuple(np.atleast_1d(shape)), dtype=complex), box_lengths)
    xs = wf.coordinates()
    center = center if center is not None else [0.0] * wf.dims
    momentum = momentum if momentum is not None else [0.0] * wf.dims
    r2 = sum((x - c) ** 2 for x, c in zip(xs, center))
    phase = sum(k * x for x, k in zip(xs, momentum))
    vals = np.exp(-r2 / (2.0 * width**2) + 1j * phase)
    if normalized:
        vals = vals / (math.pi * width**2) ** (wf.dims / 4.0)
    return wf.with_values(vals)


def sech_field(shape, box_lengths, amplitude=1.0):
    """amplitude * sech(amplitude * x) in 1-D; radial sech in 2-D."""
    wf = WaveField(np.zeros(tuple(np.atleast_1d(shape)), dtype=complex), box_lengths)
    r = np.sqrt(sum(x * x for x in wf.coordinates()))
    return wf.with_values(amplitude / np.cosh(amplitude * r))


def soliton(x, t, amplitude=1.0):
    """Exact bright soliton for w = -1: A sech(A x) exp(i A^2 t / 2)."""
    return amplitude / np.cosh(amplitude * x) * np.exp(0.5j * amplitude**2 * t)


# ---------------------------------------------------------------------------
# binary snapshots: magic, uint32 dims, uint32 shape[dims], float64 box[dims],
# float64 time, then complex128 values row-major; all little-endian.


def write_snapshot(path, wf):
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", wf.dims))
        fh.write(struct.pack(f"<{wf.dims}I", *wf.grid_shape))
        fh.write(struct.pack(f"<{wf.dims}d", *wf.box_lengths))
        fh.write(struct.pack("<d", wf.time))
        fh.write(np.ascontiguousarray(wf.values, dtype="<c16").tobytes(order="C"))


def read_snapshot(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != SNAPSHOT_MAGIC:
        raise DomainError(f"{path}: not an NLS1 snapshot")
    off = 4
    (dims,) = struct.unpack_from("<I", data, off)
    off += 4
    if dims not in (1, 2):
        raise DomainError(f"{path}: bad dimension {dims}")
    shape = struct.unpack_from(f"<{dims}I", data, off)
    off += 4 * dims
    box = struct.unpack_from(f"<{dims}d", data, off)
    off += 8 * dims
    (time,) = struct.unpack_from("<d", data, off)
    off += 8
    count = int(np.prod(shape))
    if len(data) - off != 16 * count:
        raise DomainError(f"{path}: payload size does not match shape {shape}")
    vals = np.frombuffer(data, dtype="<c16", count=count, offset=off).reshape(shape)
    return WaveField(vals.astype(complex), box, time)
