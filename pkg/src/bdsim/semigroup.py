"""Per-mode solution operator of the linearized damped Boussinesq system.

For each frequency ``xi != 0`` the linear part acts on ``(omega_hat, theta_hat)``
through::

    A = [[-nu,                 -i xi1],
         [-i xi1 / |xi|^2,     -eta  ]]

with ``nu = 1, eta = 0`` in the reference setting. The exponential ``exp(tA)``
is evaluated in closed form as ``e^{mu t} [cosh(d t) I + t sinhc(d t) (A - mu I)]``
where ``mu = trace/2`` and ``d^2 = D/4`` with ``D`` the relative discriminant.
Both cosh and sinhc are entire in ``z = (d t)^2``, which removes the removable
singularity at the double eigenvalue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "DEGENERACY_THRESHOLD", "EigenPair", "PropagatorMatrix", "EnvelopeReport",
    "eigenvalues", "classify", "propagator", "propagator_oracle", "closed_form_kernels",
    "propagator_arrays", "oracle_arrays", "region_codes", "decay_envelope",
    "envelope_arrays", "certify_envelopes", "kernel_decay_profile", "loglog_slope",
    "balanced_error",
]

DEGENERACY_THRESHOLD = 1e-6
_SERIES_RADIUS = 1e-3

REGIONS = ("D1", "D2", "D3")


def _check_xi(xi) -> tuple[float, float]:
    x1, x2 = (float(v) for v in xi)
    if x1 == 0 and x2 == 0:
        raise InvalidInputError("xi must be nonzero")
    return x1, x2


@dataclass(frozen=True)
class EigenPair:
    lambda_plus: complex
    lambda_minus: complex
    discriminant: float
    regime: str


@dataclass(frozen=True)
class PropagatorMatrix:
    """Entries of ``exp(tA)``: ``omega(t) = m1 omega0 + m2 theta0``, ``theta(t) = m3 omega0 + m4 theta0``."""

    m1: complex
    m2: complex
    m3: complex
    m4: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m1, self.m2], [self.m3, self.m4]])

    @property
    def det(self) -> complex:
        return self.m1 * self.m4 - self.m2 * self.m3

    def __matmul__(self, other: "PropagatorMatrix") -> "PropagatorMatrix":
        p = self.as_array() @ other.as_array()
        return PropagatorMatrix(p[0, 0], p[0, 1], p[1, 0], p[1, 1])


def eigenvalues(xi, nu: float = 1.0, eta: float = 0.0) -> EigenPair:
    """Eigenvalues of the per-mode matrix, split into real/complex branches.

    ``discriminant`` is ``(nu - eta)^2 |xi|^2 - 4 xi1^2``, i.e. ``|xi|^2 - 4 xi1^2``
    in the reference setting.
    """
    x1, x2 = _check_xi(xi)
    ksq = x1 * x1 + x2 * x2
    disc = (nu - eta) ** 2 * ksq - 4 * x1 * x1
    mu = -(nu + eta) / 2
    if disc >= 0:
        h = math.sqrt(disc / ksq) / 2
        lp, lm = complex(mu + h), complex(mu - h)
    else:
        h = math.sqrt(-disc / ksq) / 2
        lp, lm = complex(mu, h), complex(mu, -h)
    if abs(disc) < DEGENERACY_THRESHOLD * ksq:
        regime = "degenerate"
    else:
        regime = "real" if disc >= 0 else "complex"
    return EigenPair(lp, lm, disc, regime)


def region_codes(xi1, xi2) -> np.ndarray:
    """0/1/2 for D1/D2/D3; -1 at the origin."""
    xi1 = np.asarray(xi1, float)
    xi2 = np.asarray(xi2, float)
    ksq = xi1 ** 2 + xi2 ** 2
    a = xi1 ** 2
    # squared comparisons: |xi| >= 3|xi1|  <=>  ksq >= 9 xi1^2
    code = np.where(ksq >= 9 * a, 0, np.where(ksq >= 4 * a, 1, 2))
    return np.where(ksq == 0, -1, code)


def classify(xi) -> str:
    x1, x2 = _check_xi(xi)
    ksq = x1 * x1 + x2 * x2
    a = x1 * x1
    # tolerate one ulp of roundoff in squared boundaries, e.g. xi = (1, sqrt 8)
    if ksq >= 9 * a * (1 - 4e-16):
        return "D1"
    if ksq >= 4 * a * (1 - 4e-16):
        return "D2"
    return "D3"


def _cosh_sinhc(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``cosh(sqrt z)`` and ``sinh(sqrt z)/sqrt z`` for real z (cos/sinc for z < 0)."""
    z = np.asarray(z, float)
    c = np.empty_like(z)
    s = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    zs = z[small]
    # third order in z; truncation error < z^4/8! ~ 2.5e-17 inside the radius
    c[small] = 1 + zs / 2 * (1 + zs / 12 * (1 + zs / 30))
    s[small] = 1 + zs / 6 * (1 + zs / 20 * (1 + zs / 42))
    pos = ~small & (z > 0)
    r = np.sqrt(z[pos])
    c[pos] = np.cosh(r)
    s[pos] = np.sinh(r) / r
    neg = ~small & (z < 0)
    r = np.sqrt(-z[neg])
    c[neg] = np.cos(r)
    s[neg] = np.sin(r) / r
    return c, s


def propagator_arrays(xi1, xi2, t, nu: float = 1.0, eta: float = 0.0):
    """Vectorized ``exp(tA)`` entries ``(m1, m2, m3, m4)``.

    Broadcasts over ``xi1, xi2, t``. At ``xi = 0`` the operator is taken as
    ``diag(e^{-nu t}, e^{-eta t})``.
    """
    xi1, xi2, t = np.broadcast_arrays(np.asarray(xi1, float), np.asarray(xi2, float),
                                      np.asarray(t, float))
    ksq = xi1 ** 2 + xi2 ** 2
    origin = ksq == 0
    safe = np.where(origin, 1.0, ksq)
    r = np.where(origin, 0.0, xi1 ** 2 / safe)
    mu = -(nu + eta) / 2
    half = (nu - eta) / 2
    # z = (d t)^2 with d^2 = ((nu-eta)/2)^2 - xi1^2/|xi|^2
    disc = half * half - r
    z = disc * t * t
    pos = z >= _SERIES_RADIUS
    c, s = _cosh_sinhc(np.where(pos, 0.0, z))
    ts = t * s
    emu = np.exp(mu * t)
    # growing branch: combine exponents so nothing overflows for large t
    if np.any(pos):
        d = np.sqrt(np.where(pos, disc, 0.0))
        ep = np.exp((mu + d) * t)
        em = np.exp((mu - d) * t)
        dsafe = np.where(pos, d, 1.0)
        c_e = np.where(pos, 0.5 * (ep + em), emu * c)
        ts_e = np.where(pos, (ep - em) / (2 * dsafe), emu * ts)
    else:
        c_e = emu * c
        ts_e = emu * ts
    a11 = -nu - mu
    a22 = -eta - mu
    m1 = (c_e + ts_e * a11).astype(complex)
    m4 = (c_e + ts_e * a22).astype(complex)
    m2 = -1j * xi1 * ts_e
    m3 = -1j * xi1 / safe * ts_e
    if np.any(origin):
        m1 = np.where(origin, np.exp(-nu * t), m1)
        m4 = np.where(origin, np.exp(-eta * t), m4)
        m2 = np.where(origin, 0.0, m2)
        m3 = np.where(origin, 0.0, m3)
    return m1, m2, m3, m4


def propagator(xi, t: float, nu: float = 1.0, eta: float = 0.0) -> PropagatorMatrix:
    """Exact per-mode propagator ``exp(tA)`` at one frequency."""
    _check_xi(xi)
    if t < 0:
        raise InvalidInputError("t must be nonnegative")
    m = propagator_arrays(xi[0], xi[1], t, nu, eta)
    return PropagatorMatrix(*(complex(v) for v in m))


def closed_form_kernels(xi, t: float) -> tuple[complex, complex]:
    """``M1(t), M2(t)`` from the two-branch eigenvalue formulas (reference setting).

    Direct transcription: divides by ``sqrt(| |xi|^2 - 4 xi1^2 |)`` and is
    therefore unusable on the degenerate set.
    """
    x1, x2 = _check_xi(xi)
    ep = eigenvalues(xi)
    lp, lm = ep.lambda_plus, ep.lambda_minus
    k = math.hypot(x1, x2)
    disc = k * k - 4 * x1 * x1
    if disc == 0:
        raise InvalidInputError("closed forms are singular at |xi| = 2|xi1|")
    if disc > 0:
        q = math.sqrt(disc)
        m1 = -k * (lm * np.exp(lm * t) - lp * np.exp(lp * t)) / q
        m2 = 1j * x1 * k * (np.exp(lm * t) - np.exp(lp * t)) / q
    else:
        q = math.sqrt(-disc)
        m1 = -k * (lm * np.exp(lm * t) - lp * np.exp(lp * t)) / (1j * q)
        m2 = x1 * k * (np.exp(lm * t) - np.exp(lp * t)) / q
    return complex(m1), complex(m2)


# --- independent oracle: balanced scaling-and-squaring ---------------------

_ORACLE_TOL = 1e-13


def oracle_arrays(xi1, xi2, t, nu: float = 1.0, eta: float = 0.0):
    """``exp(tA)`` by truncated Taylor series with scaling and squaring.

    The matrix is first balanced with ``D = diag(1, |xi|)`` (a similarity, so
    the exponential is recovered exactly), scaled by ``2^-j`` until its
    infinity norm is at most 1/2, summed until the remainder bound
    ``b^{K+1}/(K+1)! / (1 - b/(K+2))`` falls below 1e-13, then squared ``j``
    times. No eigenvalues are computed.
    """
    xi1, xi2, t = np.broadcast_arrays(np.asarray(xi1, float), np.asarray(xi2, float),
                                      np.asarray(t, float))
    shape = xi1.shape
    xi1, xi2, t = xi1.ravel(), xi2.ravel(), t.ravel()
    ksq = xi1 ** 2 + xi2 ** 2
    if np.any(ksq == 0):
        raise InvalidInputError("xi must be nonzero")
    kabs = np.sqrt(ksq)
    # balanced matrix times t
    b = np.zeros((xi1.size, 2, 2), complex)
    b[:, 0, 0] = -nu * t
    b[:, 0, 1] = -1j * xi1 / kabs * t
    b[:, 1, 0] = -1j * xi1 / kabs * t
    b[:, 1, 1] = -eta * t
    norm = np.abs(b).sum(axis=2).max(axis=1)
    j = np.maximum(0, np.ceil(np.log2(np.maximum(norm, 1e-300) / 0.5))).astype(int)
    b = b / (2.0 ** j)[:, None, None]
    bn = float(np.abs(b).sum(axis=2).max(axis=1).max()) if b.size else 0.0
    eye = np.broadcast_to(np.eye(2, dtype=complex), b.shape)
    out = eye.copy()
    term = eye.copy()
    kk = 0
    while True:
        kk += 1
        term = term @ b / kk
        out = out + term
        bound = bn ** (kk + 1) / math.factorial(kk + 1) / (1 - bn / (kk + 2))
        if bound <= _ORACLE_TOL:
            break
    for step in range(int(j.max()) if j.size else 0):
        sq = out @ out
        out = np.where((j > step)[:, None, None], sq, out)
    m1 = out[:, 0, 0]
    m2 = out[:, 0, 1] * kabs
    m3 = out[:, 1, 0] / kabs
    m4 = out[:, 1, 1]
    return tuple(v.reshape(shape) for v in (m1, m2, m3, m4))


def propagator_oracle(xi, t: float, nu: float = 1.0, eta: float = 0.0) -> PropagatorMatrix:
    _check_xi(xi)
    if t < 0:
        raise InvalidInputError("t must be nonnegative")
    m = oracle_arrays(xi[0], xi[1], t, nu, eta)
    return PropagatorMatrix(*(complex(v) for v in m))


def balanced_error(xi1, xi2, got, ref) -> np.ndarray:
    """Normwise relative difference of two propagators in balanced coordinates.

    Entries are compared as ``[[m1, m2/|xi|], [|xi| m3, m4]]`` so that all four
    live on the same scale; the error is ``max|diff| / max|ref|`` per mode.
    """
    kabs = np.sqrt(np.asarray(xi1, float) ** 2 + np.asarray(xi2, float) ** 2)
    scales = (1.0, 1.0 / kabs, kabs, 1.0)
    diff = np.max([np.abs(g - r) * s for g, r, s in zip(got, ref, scales)], axis=0)
    size = np.max([np.abs(r) * s for r, s in zip(ref, scales)], axis=0)
    return diff / size


# --- decay envelopes ---------------------------------------------------------

def envelope_arrays(xi1, xi2, t):
    """Region-wise envelopes for ``|M1|`` and ``|M2|`` with unit constant."""
    xi1, xi2, t = np.broadcast_arrays(np.asarray(xi1, float), np.asarray(xi2, float),
                                      np.asarray(t, float))
    ksq = xi1 ** 2 + xi2 ** 2
    r = xi1 ** 2 / np.where(ksq == 0, 1.0, ksq)
    code = region_codes(xi1, xi2)
    a = np.abs(xi1)
    slow = np.exp(-r * t)
    e1 = np.select([code == 0, code == 1, code == 2],
                   [np.exp(-t / 2) + r * slow, np.exp(-t / 18), np.exp(-t / 4)], np.nan)
    e2 = np.select([code == 0, code == 1, code == 2],
                   [a * (np.exp(-t) + slow), a * np.exp(-t / 18), a * np.exp(-t / 4)], np.nan)
    return e1, e2


def decay_envelope(xi, t: float) -> tuple[float, float]:
    _check_xi(xi)
    e1, e2 = envelope_arrays(xi[0], xi[1], t)
    return float(e1), float(e2)


@dataclass
class EnvelopeReport:
    """Fitted constants ``max |entry| / envelope`` per region and entry."""

    constants: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    lattice_bound: int = 0
    n_times: int = 0

    def get(self, region: str, entry: str) -> float:
        return self.constants[region][entry]

    def as_rows(self):
        for reg in REGIONS:
            yield reg, self.constants[reg]["m1"], self.constants[reg]["m2"], self.samples[reg]


def lattice(bound: int, period: float = 2 * np.pi):
    """Nonzero lattice frequencies with ``|m_i| <= bound``."""
    m = np.arange(-bound, bound + 1)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    keep = (m1 != 0) | (m2 != 0)
    s = 2 * np.pi / period
    return s * m1[keep].astype(float), s * m2[keep].astype(float)


def _ratio(entry, env):
    return np.where(env > 0, entry / np.where(env > 0, env, 1.0),
                    np.where(entry > 0, np.inf, 0.0))


def certify_envelopes(lattice_bound: int, t_samples, xi=None) -> EnvelopeReport:
    """Measure the constants in the region-wise decay envelopes.

    ``xi`` may be given as an explicit ``(xi1, xi2)`` pair of arrays, otherwise
    the integer lattice ``|m_i| <= lattice_bound`` is used.
    """
    t_samples = np.asarray(sorted(float(v) for v in t_samples))
    if xi is None:
        if lattice_bound < 1:
            raise InvalidInputError("lattice must be nonempty")
        xi1, xi2 = lattice(lattice_bound)
    else:
        xi1, xi2 = (np.atleast_1d(np.asarray(v, float)) for v in xi)
    if xi1.size == 0 or t_samples.size == 0:
        raise InvalidInputError("lattice and time samples must be nonempty")
    if np.any(t_samples < 0):
        raise InvalidInputError("time samples must be nonnegative")
    code = region_codes(xi1, xi2)
    best = {reg: {"m1": 0.0, "m2": 0.0} for reg in REGIONS}
    counts = {reg: int(np.sum(code == i)) for i, reg in enumerate(REGIONS)}
    chunk = max(1, 4_000_000 // max(1, xi1.size))
    for start in range(0, t_samples.size, chunk):
        tt = t_samples[start:start + chunk][:, None]
        m1, m2, _, _ = propagator_arrays(xi1[None, :], xi2[None, :], tt)
        e1, e2 = envelope_arrays(xi1[None, :], xi2[None, :], tt)
        r1 = _ratio(np.abs(m1), e1).max(axis=0)
        r2 = _ratio(np.abs(m2), e2).max(axis=0)
        for i, reg in enumerate(REGIONS):
            sel = code == i
            if np.any(sel):
                best[reg]["m1"] = max(best[reg]["m1"], float(r1[sel].max()))
                best[reg]["m2"] = max(best[reg]["m2"], float(r2[sel].max()))
    return EnvelopeReport(best, counts, int(lattice_bound), int(t_samples.size))


def kernel_decay_profile(lattice_bound: int, times, region: str = "D1"):
    """Lattice sups of ``|xi1/|xi| M1(t)|`` and ``|xi1/|xi|^2 M2(t)|`` over one region."""
    xi1, xi2 = lattice(lattice_bound)
    sel = region_codes(xi1, xi2) == REGIONS.index(region)
    xi1, xi2 = xi1[sel], xi2[sel]
    kabs = np.hypot(xi1, xi2)
    w1 = np.abs(xi1) / kabs
    w2 = np.abs(xi1) / kabs ** 2
    times = np.asarray(times, float)
    s1 = np.empty(times.size)
    s2 = np.empty(times.size)
    for i, t in enumerate(times):
        m1, m2, _, _ = propagator_arrays(xi1, xi2, t)
        s1[i] = np.max(w1 * np.abs(m1))
        s2[i] = np.max(w2 * np.abs(m2))
    return s1, s2


def loglog_slope(times, values, shift: float = 1.0) -> float:
    """Least-squares slope of ``log values`` against ``log(shift + t)``."""
    x = np.log(shift + np.asarray(times, float))
    y = np.log(np.asarray(values, float))
    return float(np.polyfit(x, y, 1)[0])
