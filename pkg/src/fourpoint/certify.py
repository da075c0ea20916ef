"""Post-hoc checks of a finite solve report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np

from .geometry import LABELS, Configuration
from .sysbuild import PoleError, cramer_roles, det_identity, recover_X

# twice the double mantissa
CERT_PREC = 106


@dataclass
class CheckResult:
    name: str
    passed: bool
    failures: list = field(default_factory=list)
    detail: str = ""


@dataclass
class CertificateSummary:
    checks: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def to_dict(self) -> dict:
        checks = {
            name: {"passed": c.passed, "failures": list(c.failures), "detail": c.detail}
            for name, c in self.checks.items()
        }
        return {"passed": self.passed, "checks": checks}


def mp_residual(config: Configuration, coords) -> float:
    """Largest cleared-equation residual evaluated at CERT_PREC bits."""
    with mpmath.workprec(CERT_PREC):
        x1, x2, y1, y2 = (mpmath.mpc(z) for z in coords)
        worst = mpmath.mpf(0)
        for t in LABELS:
            a = config.anchors[t]
            ax, ay = mpmath.mpf(a.x.numerator) / a.x.denominator, mpmath.mpf(a.y.numerator) / a.y.denominator
            k = mpmath.mpf(config.constants[t].numerator) / config.constants[t].denominator
            p = (x1 - ax) ** 2 + (x2 - ay) ** 2
            q = (y1 - ax) ** 2 + (y2 - ay) ** 2
            worst = max(worst, abs(k * p * q - p - q))
        return float(worst)


def _has(points: list, z: np.ndarray, tol: float) -> bool:
    return any(np.max(np.abs(z - w)) <= tol * (1 + np.max(np.abs(w))) for w in points)


def certify(report, config: Configuration, tol=None) -> CertificateSummary:
    from .solver import Tolerances

    tol = tol or Tolerances()
    sols = report.solutions
    pts = [np.array(s.coords(), dtype=complex) for s in sols]
    checks = {}

    bad = [i for i, s in enumerate(sols) if mp_residual(config, s.coords()) > tol.accept]
    checks["residual"] = CheckResult("residual", not bad, bad, f"{CERT_PREC}-bit re-evaluation, bound {tol.accept:g}")

    bad = [i for i, z in enumerate(pts) if not _has(pts, np.concatenate([z[2:], z[:2]]), tol.dedupe)]
    checks["swap_closure"] = CheckResult("swap_closure", not bad, bad)

    bad = [i for i, z in enumerate(pts) if not _has(pts, z.conj(), tol.dedupe)]
    checks["conjugate_closure"] = CheckResult("conjugate_closure", not bad, bad)

    roles: Optional[tuple] = cramer_roles(config)
    if roles is None:
        checks["cramer"] = CheckResult("cramer", True, [], "skipped: all anchors collinear")
        checks["determinant"] = CheckResult("determinant", True, [], "skipped: all anchors collinear")
    else:
        bad_c, bad_d = [], []
        for i, s in enumerate(sols):
            try:
                X = recover_X(config, s.Y, roles)
                value, scale = det_identity(config, s.Y)
            except PoleError:
                bad_c.append(i)
                bad_d.append(i)
                continue
            dev = max(abs(X[0] - s.X.x), abs(X[1] - s.X.y))
            if dev > 1e-6 * (1 + max(abs(s.X.x), abs(s.X.y))):
                bad_c.append(i)
            if abs(value) > 1e-6 * max(scale, 1.0):
                bad_d.append(i)
        checks["cramer"] = CheckResult("cramer", not bad_c, bad_c)
        checks["determinant"] = CheckResult("determinant", not bad_d, bad_d)
    return CertificateSummary(checks)
