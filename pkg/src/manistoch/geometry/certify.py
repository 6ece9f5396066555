"""Empirical certification of the atlas covering constants."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UsageError
from . import sphere, torus
from .atlas import Atlas
from .base import Manifold
from .sampling import sample_uniform_batch, sample_pairs_within


@dataclass
class CertificationReport:
    manifold: str
    n_pairs: int
    declared_lambda: float
    declared_rho: float
    passed: bool
    empirical_lambda: float          # tightest bi-Lipschitz + metric constant observed
    common_chart_failures: int
    bilipschitz_violations: int
    metric_violations: int
    partition_max_defect: float      # max |sum psi - 1| over sampled points
    witnesses: list = field(default_factory=list)

    def as_dict(self):
        d = dict(self.__dict__)
        d["witnesses"] = [list(map(float, w)) for w in self.witnesses[:16]]
        return d


# relative slack for floating-point comparison of the declared bounds
_FP_SLACK = 1e-9


def certify_atlas(atlas: Atlas, n_pairs: int, rng_seed,
                  declared_lambda: float | None = None) -> CertificationReport:
    """Sample pairs with dist < rho and verify the covering-constant claims.

    Checks, for every sampled pair: membership of both points in at least one
    common chart; the two-sided bi-Lipschitz bound between chart-coordinate and
    Riemannian distance in every common chart; metric eigenvalue bounds at both
    chart images. Also verifies the partition of unity sums to one at every
    sampled point.
    """
    if n_pairs < 1:
        raise UsageError("n_pairs must be >= 1")
    lam = atlas.lam if declared_lambda is None else float(declared_lambda)
    manifold = atlas.manifold
    geom = sphere if manifold is Manifold.SPHERE2 else torus

    x, y = sample_pairs_within(manifold, n_pairs, atlas.rho, rng_seed)
    d = geom.dist(x, y)

    emp_lambda = 1.0
    witnesses = []
    common_fail = 0
    bilip_viol = 0
    metric_viol = 0

    in_chart = np.stack([c.contains(x) & c.contains(y) for c in atlas.charts], axis=1)
    any_common = in_chart.any(axis=1)
    common_fail = int(np.sum(~any_common))
    for i in np.where(~any_common)[0][:16]:
        witnesses.append(np.concatenate([x[i], y[i], [d[i]]]))

    for a, chart in enumerate(atlas.charts):
        rows = np.where(in_chart[:, a])[0]
        if rows.size == 0:
            continue
        xi = chart.to_chart(x[rows])
        eta = chart.to_chart(y[rows])
        dxi = np.linalg.norm(xi - eta, axis=1)
        dr = d[rows]
        ok = dxi > 1e-14
        ratio = np.where(ok, dr / np.where(ok, dxi, 1.0), 1.0)
        emp = np.minimum(ratio, 1.0 / ratio)
        emp_lambda = min(emp_lambda, float(emp.min(initial=1.0)))
        bad = ok & ((ratio < lam * (1.0 - _FP_SLACK)) | (ratio > (1.0 + _FP_SLACK) / lam))
        bilip_viol += int(bad.sum())
        for i in rows[np.where(bad)[0]][:8]:
            witnesses.append(np.concatenate([x[i], y[i], [d[i]]]))
        for pts_chart in (xi, eta):
            eigs = chart.metric_eigs(pts_chart)
            emp_lambda = min(emp_lambda, float(eigs.min()), float(1.0 / eigs.max()))
            badm = (eigs.min(axis=-1) < lam * (1.0 - _FP_SLACK)) | \
                   (eigs.max(axis=-1) > (1.0 + _FP_SLACK) / lam)
            metric_viol += int(badm.sum())

    pts = sample_uniform_batch(manifold, min(n_pairs, 10_000), rng_seed, stream=("part",))
    psi = atlas.partition(pts)
    part_defect = float(np.max(np.abs(psi.sum(axis=1) - 1.0)))

    passed = (common_fail == 0 and bilip_viol == 0 and metric_viol == 0
              and emp_lambda >= lam * (1.0 - _FP_SLACK) and part_defect < 1e-12)
    return CertificationReport(
        manifold=manifold.value, n_pairs=n_pairs,
        declared_lambda=lam, declared_rho=atlas.rho, passed=passed,
        empirical_lambda=emp_lambda,
        common_chart_failures=common_fail,
        bilipschitz_violations=bilip_viol,
        metric_violations=metric_viol,
        partition_max_defect=part_defect,
        witnesses=witnesses,
    )
