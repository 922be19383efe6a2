"""Equivalence-criteria classification of radial solutions.

A finite-volume radial solution of (-Delta)^m u = (2m-1)! exp(2m u) is
either one of the explicit spherical solutions u_lam (standard) or differs
from its integral representation v by a nonconstant polynomial of even
degree with negative leading coefficient (nonstandard).  Several tail
criteria detect the dichotomy independently:

    (ii)   lim Delta u        = 0            vs  a constant a < 0
    (iii)  u(r)/r^2           -> 0           vs  a negative limit
    (iv)   deg(u - v)         = 0            vs  even degree >= 2
    (v)    scalar curvature of e^{2u}|dx|^2 bounded below  vs  -> -inf
    (vi)   rho_1 = e^{2u}(1+r^2)^2/4 bounded away from 0   vs  -> 0

classify evaluates all five on one trajectory and reports per-criterion
verdicts plus their mutual agreement.  Finite-radius data cannot certify a
limit, so each criterion may also return "inconclusive"; thresholds sit
orders of magnitude away from both the standard-solution residuals and the
nonstandard divergence rates seen at r_end = 1e3.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import tailfit
from .shooter import RadialTrajectory, SolveReport, conformal_factor_ratio, scalar_curvature

__all__ = [
    "ClassificationReport",
    "classify",
    "limit_estimate",
    "EPS_STD",
    "EPS_GROWTH",
    "R_BIG",
]

EPS_STD = 1e-3      # tolerance on limits that must vanish for standard u
EPS_GROWTH = 1e-4   # tolerance on u(r_end)/r_end^2
R_BIG = 1e4         # curvature below -R_BIG counts as unbounded
_RHO1_STD = 0.5     # rho_1 above half its tail max counts as bounded away from 0
_RHO1_DECAYED = 1e-3

_CRITERIA = ("ii", "iii", "iv", "v", "vi")
_THRESHOLDS = {
    "ii": EPS_STD,
    "iii": EPS_GROWTH,
    "iv": 0.0,
    "v": -R_BIG,
    "vi": _RHO1_STD,
}


@dataclass(frozen=True)
class ClassificationReport:
    """Per-criterion (statistic, verdict) pairs and their aggregation.

    Verdicts are "standard", "nonstandard", or "inconclusive".  agreement
    is true when every decided verdict names the same class (vacuously true
    if nothing is decided).  deltaa_estimate is the pair (j, a) for the
    largest j with a nonvanishing limit of Delta^j u, present only on
    nonstandard reports; the limit a is negative there.
    """

    m: int
    crit_ii: tuple[float, str]
    crit_iii: tuple[float, str]
    crit_iv: tuple[float, str]
    crit_v: tuple[float, str]
    crit_vi: tuple[float, str]
    overall: str
    agreement: bool
    deltaa_estimate: tuple[int, float] | None

    def criteria(self) -> dict[str, tuple[float, str]]:
        return {
            "ii": self.crit_ii,
            "iii": self.crit_iii,
            "iv": self.crit_iv,
            "v": self.crit_v,
            "vi": self.crit_vi,
        }

    def to_json_dict(self) -> dict:
        crits = [
            {
                "name": name,
                # strict JSON has no Infinity/NaN tokens; stringify those
                "statistic": float(stat) if math.isfinite(stat) else str(stat),
                "threshold": _THRESHOLDS[name],
                "verdict": verdict,
            }
            for name, (stat, verdict) in self.criteria().items()
        ]
        dd = None
        if self.deltaa_estimate is not None:
            dd = {"j": self.deltaa_estimate[0], "a": self.deltaa_estimate[1]}
        return {
            "m": self.m,
            "criteria": crits,
            "overall": self.overall,
            "agreement": self.agreement,
            "deltaa_estimate": dd,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def limit_estimate(curve) -> tuple[float, float]:
    """(value, confidence) for the large-r limit of sampled tail data.

    curve: either a pair of arrays (r, values) or a sequence of (r, v)
    pairs, already restricted to the tail window; needs >= 12 samples.
    Fits a + b/r^2 over three nested sub-windows; the widest window's
    constant is the value, the max pairwise spread the confidence.
    """
    if isinstance(curve, tuple) and len(curve) == 2:
        r, vals = curve
    else:
        arr = np.asarray(list(curve), dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("curve must be (r, values) arrays or (r, v) pairs")
        r, vals = arr[:, 0], arr[:, 1]
    est = tailfit.tail_limit(np.asarray(r, float), np.asarray(vals, float))
    return est.value, est.confidence


def _inconclusive_report(m: int) -> ClassificationReport:
    blank = (math.nan, "inconclusive")
    return ClassificationReport(
        m=m,
        crit_ii=blank,
        crit_iii=blank,
        crit_iv=blank,
        crit_v=blank,
        crit_vi=blank,
        overall="inconclusive",
        agreement=True,
        deltaa_estimate=None,
    )


def _crit_ii(report: SolveReport) -> tuple[float, str]:
    if not report.delta_limits:
        # m = 1 has no Laplacian iterate to test; other criteria decide
        return (math.nan, "inconclusive")
    est = report.delta_limits[0]
    stat = est.value
    if not math.isfinite(stat) or est.confidence > EPS_STD:
        return (stat, "inconclusive")
    if abs(stat) < EPS_STD:
        return (stat, "standard")
    if stat < -EPS_STD:
        return (stat, "nonstandard")
    return (stat, "inconclusive")


def _crit_iii(traj: RadialTrajectory) -> tuple[float, str]:
    stat = float(traj.w[0][-1] / traj.r_max**2)
    if not math.isfinite(stat):
        return (stat, "inconclusive")
    if abs(stat) < EPS_GROWTH:
        return (stat, "standard")
    if stat < -EPS_GROWTH:
        return (stat, "nonstandard")
    return (stat, "inconclusive")


def _crit_iv(fit: tailfit.PolyFit1D) -> tuple[float, str]:
    deg = fit.inferred_degree
    if deg == 0:
        return (float(deg), "standard")
    if deg >= 2 and fit.leading_coefficient < 0:
        return (float(deg), "nonstandard")
    return (float(deg), "inconclusive")


def _crit_v(traj: RadialTrajectory) -> tuple[float, str]:
    idx = traj.tail_indices()
    rg = scalar_curvature(traj)[idx]
    rg = rg[np.isfinite(rg) | (rg == -np.inf)]
    if rg.size == 0:
        return (math.nan, "inconclusive")
    stat = float(np.min(rg))
    if math.isnan(stat):
        return (stat, "inconclusive")
    return (stat, "standard" if stat > -R_BIG else "nonstandard")


def _crit_vi(traj: RadialTrajectory) -> tuple[float, str]:
    idx = traj.tail_indices()
    rho = conformal_factor_ratio(traj)[idx]
    rho = rho[np.isfinite(rho)]
    if rho.size == 0:
        return (math.nan, "inconclusive")
    if np.max(rho) == 0.0:
        # rho_1 underflowed across the whole tail window: decayed to 0
        return (0.0, "nonstandard")
    stat = float(rho[-1] / np.max(rho))
    if stat >= _RHO1_STD:
        return (stat, "standard")
    if stat < _RHO1_DECAYED:
        return (stat, "nonstandard")
    return (stat, "inconclusive")


def classify(
    traj: RadialTrajectory,
    report: SolveReport,
    fit: tailfit.PolyFit1D,
) -> ClassificationReport:
    """Evaluate criteria (ii)-(vi) on one trajectory.

    traj and report must come from the same run; fit is the even-polynomial
    fit of u - v samples (representation module).  A truncated or short run
    (termination other than reached_end, r_end < 100, or unconverged
    conformal volume) yields all-inconclusive verdicts with vacuous
    agreement rather than guesses.
    """
    if report.m != traj.m:
        raise ValueError(f"report is for m={report.m}, trajectory for m={traj.m}")
    if report.termination != traj.termination or not math.isclose(
        report.r_reached, traj.r_max, rel_tol=1e-12
    ):
        raise ValueError("report does not describe this trajectory")
    if fit.r_max > traj.r_max * (1 + 1e-12):
        raise ValueError("fit uses samples beyond the trajectory range")

    idx = traj.tail_indices()
    alpha_end = traj.alpha_final
    alpha_rel = abs(alpha_end - traj.alpha[idx[0]]) / max(abs(alpha_end), 1e-300)
    if traj.termination != "reached_end" or traj.r_max < 100.0 or alpha_rel > 1e-3:
        return _inconclusive_report(traj.m)

    crits = {
        "ii": _crit_ii(report),
        "iii": _crit_iii(traj),
        "iv": _crit_iv(fit),
        "v": _crit_v(traj),
        "vi": _crit_vi(traj),
    }
    decided = [v for _, v in crits.values() if v != "inconclusive"]
    agreement = len(set(decided)) <= 1
    overall = decided[0] if decided and agreement else "inconclusive"

    deltaa = None
    if overall == "nonstandard":
        for j in range(len(report.delta_limits), 0, -1):
            est = report.delta_limits[j - 1]
            if math.isfinite(est.value) and abs(est.value) > EPS_STD:
                deltaa = (j, est.value)
                break

    return ClassificationReport(
        m=traj.m,
        crit_ii=crits["ii"],
        crit_iii=crits["iii"],
        crit_iv=crits["iv"],
        crit_v=crits["v"],
        crit_vi=crits["vi"],
        overall=overall,
        agreement=agreement,
        deltaa_estimate=deltaa,
    )
