"""Integral representation v of a radial solution and its polynomial part.

For a solution u of (-Delta)^m u = (2m-1)! exp(2m u) on R^{2m} with finite
conformal volume, the representation

    v(x) = ((2m-1)!/gamma_m) * int log(|y|/|x-y|) exp(2m u(y)) dy

differs from u by a polynomial p = u - v of even degree at most 2m-2, and
v(0) = 0 by construction.  For radial u the 2m-dimensional integral reduces
to a 1D radial quadrature against spherical averages of the kernel:

    avg over |y| = s, |x| = r  of  log(s/|x-y|)        (for v), or
    avg of |x-y|^{-2j}                                  (for Delta^j v),

each an integral over the polar angle theta with weight sin^{2m-2} theta.
The angular rule is Gauss-Legendre in theta itself (the cos theta
substitution turns the weight into the non-analytic (1-t^2)^{m-3/2}, which
degrades Gauss-Legendre for every m and is singular for m = 1), with a
dyadic composite rule near theta = 0 when r and s are within 5% of each
other, where the integrand is peaked or log-singular.  Angular weights are
normalized by their own sum, so constants average exactly.

The radial quadrature runs over the trajectory grid enriched with panel
midpoints: per panel the integrand is interpolated quadratically and
integrated against exact moments of the s^{2m-1} weight (the weight
vanishes to high order at 0, so standard rules misjudge the first panels).
The two panels around each evaluation radius are additionally subdivided
dyadically, because the kernel average has a kink (log-divergent
s-derivative) across s = r.

Error bars are additive and conservative: angular-doubling difference +
near-diagonal refinement size + a radial Richardson term (full grid vs the
2x-decimated grid, same quadratic rule) + an explicit bound on the
truncated tail s > r_end, where exp(2m u) <= C s^-q with q fitted on the
trajectory tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exactconst import constant_table
from .greenball import RadialProfile, _weighted_panel_integrals
from .shooter import RadialTrajectory
from . import tailfit

__all__ = [
    "KernelCache",
    "PolyFit1D",
    "kernel_avg",
    "compute_v",
    "compute_lap_v",
    "fit_even_polynomial",
    "rescale_check",
]

PolyFit1D = tailfit.PolyFit1D

_EXP_CAP = 700.0
_NEAR_DIAG = 0.05      # relative |r-s| gap below which the fine rule kicks in
_DYADIC_LEVELS = 40    # fine rule resolves angular scales down to pi * 2^-41


def _gl_panel(a: float, b: float, n: int):
    x, w = leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


@dataclass
class KernelCache:
    """Angular quadrature rules and memoized kernel averages for one m.

    base rule: n_theta-point Gauss-Legendre over [0, pi].  fine rule: a
    dyadic composite toward theta = 0 for near-diagonal (r ~ s) pairs.
    Weights carry the sin^{2m-2} theta measure and are normalized by their
    sum, so they add to exactly 1.
    """

    m: int
    n_theta: int = 96
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.n_theta < 64:
            raise ValueError("need at least 64 angular nodes")
        self.base_theta, self.base_w = self._weighted(
            *_gl_panel(0.0, math.pi, self.n_theta)
        )
        nodes = [_gl_panel(math.pi / 2, math.pi, 24)]
        hi = math.pi / 2
        for _ in range(_DYADIC_LEVELS):
            nodes.append(_gl_panel(hi / 2, hi, 12))
            hi /= 2
        nodes.append(_gl_panel(0.0, hi, 12))
        theta = np.concatenate([t for t, _ in nodes])
        raww = np.concatenate([w for _, w in nodes])
        self.fine_theta, self.fine_w = self._weighted(theta, raww)

    def _weighted(self, theta, raw_w):
        w = raw_w * np.sin(theta) ** (2 * self.m - 2)
        return theta, w / w.sum()

    def _rule(self, near: bool):
        return (self.fine_theta, self.fine_w) if near else (self.base_theta, self.base_w)

    def average(self, r: float, s: float, j: int = 0) -> float:
        """Spherical average of log(s/|x-y|) (j = 0) or |x-y|^{-2j} over
        |y| = s at |x| = r."""
        if j < 0 or j > self.m - 1:
            raise ValueError("j must lie in 0..m-1 (kernel integrable)")
        if r < 0 or s < 0:
            raise ValueError("radii must be non-negative")
        if s == 0.0 and j >= 1:
            if r == 0.0:
                raise ValueError("kernel undefined at r = s = 0 for j >= 1")
            return r ** (-2 * j)
        if s == 0.0:
            # log(|y|/|x-y|) degenerates with the measure; the s^{2m-1}
            # weight kills this endpoint in every integral we form
            return 0.0
        key = (r, s, j)
        got = self._memo.get(key)
        if got is None:
            got = float(self.average_many(r, np.array([s]), j)[0])
            self._memo[key] = got
        return got

    def average_many(self, r: float, s: np.ndarray, j: int = 0) -> np.ndarray:
        """Vectorized averages over an array of source radii s."""
        s = np.asarray(s, dtype=float)
        out = np.empty_like(s)
        gap = np.abs(s - r) <= _NEAR_DIAG * np.maximum(s, r)
        for near in (False, True):
            sel = gap if near else ~gap
            if not np.any(sel):
                continue
            theta, w = self._rule(near)
            ssel = s[sel][:, None]
            # (r-s)^2 + 4 r s sin^2(theta/2): exact, cancellation-free
            dist_sq = (r - ssel) ** 2 + 4.0 * r * ssel * np.sin(theta / 2) ** 2
            with np.errstate(divide="ignore"):
                if j == 0:
                    vals = np.log(np.maximum(ssel, 1e-300)) - 0.5 * np.log(dist_sq)
                    vals = np.where(ssel > 0, vals, 0.0)
                else:
                    vals = dist_sq ** (-j)
            out[sel] = vals @ w
        return out


_CACHE: dict = {}


def _get_cache(m: int, n_theta: int = 96) -> KernelCache:
    key = (m, n_theta)
    if key not in _CACHE:
        _CACHE[key] = KernelCache(m, n_theta)
    return _CACHE[key]


def kernel_avg(r: float, s: float, m: int, j: int = 0) -> float:
    """Module-level convenience over a shared per-m cache."""
    return _get_cache(m).average(r, s, j)


def _quadratic_panel_integrals(grid, f_grid, mids, f_mid, n):
    """Per-panel integrals of s^{n-1} * (quadratic interpolant of f).

    The quadratic passes through both panel ends and the midpoint; moments
    of s^{n-1} tau^k (tau the offset from the left end) are evaluated by
    binomial expansion, every term nonnegative, so the weight's high-order
    vanishing at 0 costs no accuracy.
    """
    a = grid[:-1]
    h = np.diff(grid)
    tc = mids - a
    f0, f1, fc = f_grid[:-1], f_grid[1:], f_mid
    d2 = ((f1 - f0) / h - (fc - f0) / tc) / (h - tc)
    d1 = (fc - f0) / tc - d2 * tc
    moments = [np.zeros_like(h) for _ in range(3)]
    for k in range(3):
        for i in range(n):
            moments[k] += (
                math.comb(n - 1, i) * a ** (n - 1 - i) * h ** (i + k + 1) / (i + k + 1)
            )
    return f0 * moments[0] + d1 * moments[1] + d2 * moments[2]


def _density(traj: RadialTrajectory) -> np.ndarray:
    return np.exp(np.minimum(2 * traj.m * traj.w[0], _EXP_CAP))


def _density_at(traj: RadialTrajectory, radii) -> np.ndarray:
    return np.exp(np.minimum(2 * traj.m * traj.sample_w(0, radii), _EXP_CAP))


def _tail_decay(traj: RadialTrajectory):
    """Fit exp(2mu) <= C s^-q on the tail; returns (C, q).

    Densities that underflow on the tail (u dropping like -c r^2, say)
    decay faster than any power: reported as q = inf with zero residual
    tail."""
    idx = traj.tail_indices()
    s = traj.grid[idx]
    g = _density(traj)[idx]
    if g[-1] < 1e-250:
        return float(np.max(g)), math.inf
    logs, logg = np.log(s), np.log(np.maximum(g, 1e-300))
    a = np.column_stack([np.ones_like(logs), logs])
    coef, *_ = np.linalg.lstsq(a, logg, rcond=None)
    q = -float(coef[1])
    c = float(np.max(g * s**q))
    return c, q


def _check_alpha_converged(traj: RadialTrajectory) -> None:
    if traj.termination != "reached_end":
        raise ValueError(
            f"trajectory terminated with '{traj.termination}'; "
            "the representation integral needs a full run to r_end"
        )
    idx = traj.tail_indices()
    a_end = traj.alpha_final
    rel = (a_end - traj.alpha[idx[0]]) / max(a_end, 1e-300)
    c, q = _tail_decay(traj)
    if rel > 1e-3 or q <= 2 * traj.m + 0.1:
        raise ValueError(
            "insufficient decay for the truncated representation integral: "
            f"alpha changed by {rel:.2e} over the tail window and "
            f"exp(2mu) ~ s^-{q:.2f} (need q > {2*traj.m}+0.1 and change <= 1e-3)"
        )


class _RadialIntegrator:
    """Shared radial-quadrature state for one trajectory and kernel order."""

    def __init__(self, traj: RadialTrajectory):
        self.traj = traj
        self.n = 2 * traj.m
        self.grid = traj.grid
        self.mids = 0.5 * (self.grid[:-1] + self.grid[1:])
        self.g_grid = _density(traj)
        self.g_mid = _density_at(traj, self.mids)

    def _g_quadratic(self, panel: int, pts: np.ndarray) -> np.ndarray:
        """Quadratic interpolation of the density inside one panel."""
        s0, s1 = self.grid[panel], self.grid[panel + 1]
        sc = self.mids[panel]
        f0, f1, fc = self.g_grid[panel], self.g_grid[panel + 1], self.g_mid[panel]
        h, tc = s1 - s0, sc - s0
        d2 = ((f1 - f0) / h - (fc - f0) / tc) / (h - tc)
        d1 = (fc - f0) / tc - d2 * tc
        tau = pts - s0
        return f0 + d1 * tau + d2 * tau**2

    def integral(self, r: float, cache: KernelCache, j: int, fine_zone: int = 3):
        """Returns (value, radial Richardson estimate, near-diagonal delta)."""
        kv_grid = cache.average_many(r, self.grid, j)
        kv_mid = cache.average_many(r, self.mids, j)
        h_grid = self.g_grid * kv_grid
        h_mid = self.g_mid * kv_mid
        panels = _quadratic_panel_integrals(self.grid, h_grid, self.mids, h_mid, self.n)
        # decimated grid reuses kernel values: odd points act as midpoints
        k = (h_grid.size - 1) // 2 * 2
        decimated = _quadratic_panel_integrals(
            self.grid[: k + 1 : 2], h_grid[: k + 1 : 2],
            self.grid[1 : k + 1 : 2], h_grid[1 : k + 1 : 2], self.n,
        )
        radial_est = abs(float(np.sum(panels[:k])) - float(np.sum(decimated)))

        pos = int(np.searchsorted(self.grid, r))
        correction = 0.0
        for i in range(max(0, pos - fine_zone), min(panels.size, pos + fine_zone)):
            s0, s1 = self.grid[i], self.grid[i + 1]
            if not (
                abs(s0 - r) <= _NEAR_DIAG * max(s0, r)
                or abs(s1 - r) <= _NEAR_DIAG * max(s1, r)
            ):
                continue
            pts = {s0, s1, self.mids[i]}
            if s0 < r < s1:
                for k in range(1, 9):
                    pts.add(r + (s1 - r) * 2.0**-k)
                    pts.add(r - (r - s0) * 2.0**-k)
                pts.add(r)
            else:
                if abs(s0 - r) < abs(s1 - r):
                    edge, other = s0, s1
                else:
                    edge, other = s1, s0
                for k in range(1, 9):
                    pts.add(edge + (other - edge) * 2.0**-k)
            sub = np.array(sorted(pts))
            hz = self._g_quadratic(i, sub) * cache.average_many(r, sub, j)
            refined = float(np.sum(_weighted_panel_integrals(sub, hz, self.n)))
            correction += abs(refined - panels[i])
            panels[i] = refined
        return float(np.sum(panels)), radial_est, correction


def _tail_bound(traj, r, c, q, j):
    """Bound on the dropped integral over s in (r_end, infinity)."""
    if math.isinf(q):
        return 0.0
    m = traj.m
    r_end = traj.r_max
    s = r_end * np.geomspace(1.0, 1e3, 200)
    r_eff = min(r, 0.999 * float(s[0]))
    if j == 0:
        kb = -np.log1p(-r_eff / s)  # |avg log(s/|x-y|)| <= -log(1 - r/s)
    else:
        kb = (s - r_eff) ** (-2 * j)
    integrand = s ** (2 * m - 1) * c * s ** (-q) * kb
    return float(np.trapezoid(integrand, s))


def _profile(traj, j, eval_radii, n_theta, max_err=None):
    radii = np.asarray(eval_radii, dtype=float)
    if radii.ndim != 1 or np.any(np.diff(radii) <= 0):
        raise ValueError("eval_radii must be strictly increasing")
    m = traj.m
    integ = _RadialIntegrator(traj)
    c_tail, q_tail = _tail_decay(traj)
    tab = constant_table(m)
    if j == 0:
        pref = math.factorial(2 * m - 1) / float(tab.gamma_m) * float(tab.omega_n)
    else:
        sign = -1 if j % 2 else 1
        const = (
            sign
            * 2 ** (2 * j)
            * math.factorial(j - 1)
            * math.factorial(m - 1)
            / math.factorial(m - j - 1)
            / float(tab.vol_sphere_2m)
        )
        pref = const * float(tab.omega_n)
    coarse = _get_cache(m, n_theta)
    fine = _get_cache(m, 2 * n_theta)
    vals = np.empty_like(radii)
    errs = np.empty_like(radii)
    for i, r in enumerate(radii):
        i_coarse, _, _ = integ.integral(r, coarse, j)
        i_fine, radial_est, refine_delta = integ.integral(r, fine, j)
        tail = _tail_bound(traj, r, c_tail, q_tail, j)
        err = abs(pref) * (abs(i_fine - i_coarse) + radial_est + refine_delta + tail)
        if max_err is not None and err > max_err:
            vals[i] = math.nan
            errs[i] = math.inf
        else:
            vals[i] = pref * i_fine
            errs[i] = err
    return RadialProfile(grid=radii, values=vals, m=m, err=errs)


def compute_v(
    traj: RadialTrajectory,
    eval_radii,
    n_theta: int = 96,
) -> RadialProfile:
    """Evaluate the representation integral at the requested radii.

    Values come from the doubled angular rule; the error bar stacks the
    angular-doubling difference, the radial Richardson estimate, the
    near-diagonal refinement size, and the truncated-tail bound.  Refuses
    trajectories whose conformal volume has not converged (the tail bound
    would be meaningless)."""
    _check_alpha_converged(traj)
    return _profile(traj, 0, eval_radii, n_theta)


def compute_lap_v(
    traj: RadialTrajectory,
    j: int,
    eval_radii,
    n_theta: int = 96,
    max_err: float = 1e-5,
) -> RadialProfile:
    """Delta^j v at the requested radii through the power kernel and the
    closed-form constant (-1)^j 2^{2j} (j-1)! (m-1)! / ((m-j-1)! |S^{2m}|).

    Radii whose quadrature error estimate exceeds max_err are skipped:
    their value is NaN and their error bar infinite."""
    if not 1 <= j <= traj.m - 1:
        raise ValueError("j must lie in 1..m-1")
    _check_alpha_converged(traj)
    return _profile(traj, j, eval_radii, n_theta, max_err=max_err)


def fit_even_polynomial(samples, max_deg: int, contribution_floor: float = 0.0) -> PolyFit1D:
    """Least-squares even-polynomial fit of (r, value) samples.

    samples: either a pair of arrays (r, values) or a sequence of (r, v)
    pairs.  Degree inference keeps the highest power whose contribution at
    the largest radius exceeds both 10x the residual RMS and the optional
    contribution_floor; passing the trajectory's w0 error estimate as the
    floor stops solver noise (which grows like the polyharmonic modes) from
    masquerading as genuine polynomial content.
    """
    if isinstance(samples, tuple) and len(samples) == 2:
        r, vals = samples
    else:
        arr = np.asarray(list(samples), dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("samples must be (r, values) arrays or (r, v) pairs")
        r, vals = arr[:, 0], arr[:, 1]
    return tailfit.fit_even_polynomial(
        np.asarray(r, float), np.asarray(vals, float), max_deg,
        contribution_floor=contribution_floor,
    )


def rescale_check(
    traj: RadialTrajectory,
    scale_r: float,
    eval_radii=None,
    n_theta: int = 96,
) -> float:
    """Max |v~(x) - v(scale_r * x)| over a test grid, where v~ belongs to
    the rescaled solution u(scale_r x) + log scale_r.

    The representation integral is exactly scale covariant (substituting
    y -> y/scale_r maps one integral onto the other with no additive
    constant), so the deviation measures pure quadrature error.
    """
    if scale_r <= 0:
        raise ValueError("scale_r must be positive")
    if eval_radii is None:
        top = min(20.0, traj.r_max / (2 * scale_r))
        eval_radii = np.geomspace(0.25, top, 12)
    eval_radii = np.asarray(eval_radii, dtype=float)
    scaled_traj = traj.rescaled(scale_r)
    v_scaled = compute_v(scaled_traj, eval_radii, n_theta=n_theta)
    v_orig = compute_v(traj, scale_r * eval_radii, n_theta=n_theta)
    return float(np.max(np.abs(v_scaled.values - v_orig.values)))
