"""Least-squares and instrumented solvers over the sparse wage designs.

All solvers reduce to small dense normal equations (a few hundred columns),
so the heavy lifting is forming cross-products of sparse matrices.  Exactly
collinear columns are detected by a greedy left-to-right sweep that keeps
the earliest linearly independent set, so later columns lose ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.linalg import solve_triangular

from .design import (ColumnKey, DesignMatrix, build_amenity_design,
                     build_fe_design, build_iv_design, build_ols_design)
from .panel import AgeGrouping, OccupationSet, PanelDataset, ParameterSet, TimeFrame

RANK_RTOL = 1e-10

METHOD_OLS = "ols"
METHOD_IV = "iv"
METHOD_AMENITY = "amenity"
METHOD_FE = "fe"
METHOD_FE_NOBASE = "fe-nobase"
ALL_METHODS = (METHOD_OLS, METHOD_IV, METHOD_AMENITY, METHOD_FE, METHOD_FE_NOBASE)


class EstimationError(RuntimeError):
    pass


@dataclass
class EstimateSet:
    """Named coefficients from one estimation run."""

    method: str
    coefficients: dict[ColumnKey, float]
    stderr: dict[ColumnKey, float]
    dropped: list[ColumnKey] = field(default_factory=list)
    n_rows: int = 0
    n_cols: int = 0
    sigma2: float = float("nan")

    def price_changes(self, frame: TimeFrame, K: int) -> np.ndarray:
        """Price changes per (analysis year, occupation), NaN when absent."""
        years = frame.analysis_years
        out = np.full((len(years), K), np.nan)
        if self.method in (METHOD_FE, METHOD_FE_NOBASE):
            levels = self.price_levels(frame, K)
            prev = np.vstack((np.zeros((1, K)), levels[:-1]))
            d = levels - prev
            start = len(frame.years) - 1 - len(years)
            return d[start:]
        for i, y in enumerate(years):
            for k in range(K):
                v = self.coefficients.get(("dpi", int(y), k))
                if v is not None:
                    out[i, k] = v
        return out

    def price_levels(self, frame: TimeFrame, K: int) -> np.ndarray:
        """Cumulated price paths over the years the method covers.

        Difference-based methods return one row per analysis year, with the
        pre-period level normalized to zero.  The stint views return their
        level coefficients directly (years not covered by a dummy are zero by
        normalization), trimmed to the same convention.
        """
        years = frame.analysis_years
        if self.method in (METHOD_FE, METHOD_FE_NOBASE):
            all_years = frame.years
            levels = np.zeros((len(all_years), K))
            for i, y in enumerate(all_years):
                for k in range(K):
                    v = self.coefficients.get(("pi", int(y), k))
                    if v is not None:
                        levels[i, k] = v
            return levels
        d = np.nan_to_num(self.price_changes(frame, K))
        return np.cumsum(d, axis=0)

    def gamma_matrix(self, grouping: AgeGrouping, K: int):
        """(gamma_hat, sigma_gamma) arrays of shape (L, K, K), NaN when absent."""
        L = grouping.n_groups
        g = np.full((L, K, K), np.nan)
        se = np.full((L, K, K), np.nan)
        for a in range(L):
            for k in range(K):
                key = ("gdiag", a, k) if self.method not in (
                    METHOD_FE, METHOD_FE_NOBASE) else ("gfe", a, k)
                if key in self.coefficients:
                    g[a, k, k] = self.coefficients[key]
                    se[a, k, k] = self.stderr.get(key, np.nan)
                for k2 in range(K):
                    if k2 == k:
                        continue
                    ck = ("gcross", a, k, k2)
                    if ck in self.coefficients:
                        g[a, k, k2] = self.coefficients[ck]
                        se[a, k, k2] = self.stderr.get(ck, np.nan)
        return g, se

    def amenity_levels(self, frame: TimeFrame, grouping: AgeGrouping, K: int):
        """Recovered amenity paths, (L, n_analysis_years, K), or None.

        The regression coefficient on a switch column carries the negative
        of the amenity value, so the sign is flipped here.
        """
        if self.method != METHOD_AMENITY:
            return None
        years = frame.analysis_years
        out = np.full((grouping.n_groups, len(years), K), np.nan)
        found = False
        for a in range(grouping.n_groups):
            for i, y in enumerate(years):
                for k in range(K):
                    v = self.coefficients.get(("psi", a, int(y), k))
                    if v is not None:
                        out[a, i, k] = -v
                        found = True
        return out if found else None


def independent_columns(G: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Indices of a maximal left-to-right independent column set of the Gram.

    Incremental Cholesky: column j is kept iff its residual variance after
    projecting on the kept columns exceeds ``rtol`` times its diagonal.
    """
    p = G.shape[0]
    keep: list[int] = []
    Lmat = np.zeros((p, p))
    scale = np.max(np.abs(np.diag(G))) if p else 0.0
    if scale == 0.0:
        return np.array([], dtype=np.int64)
    for j in range(p):
        m = len(keep)
        if m:
            v = solve_triangular(Lmat[:m, :m], G[j, keep], lower=True)
        else:
            v = np.zeros(0)
        d = G[j, j] - v @ v
        if d > rtol * max(G[j, j], rtol * scale) and G[j, j] > rtol * scale:
            Lmat[m, :m] = v
            Lmat[m, m] = np.sqrt(d)
            keep.append(j)
    return np.array(keep, dtype=np.int64)


def _solve_named(G: np.ndarray, b: np.ndarray, columns: list[ColumnKey]):
    keep = independent_columns(G)
    dropped = [columns[j] for j in range(len(columns)) if j not in set(keep.tolist())]
    Gk = G[np.ix_(keep, keep)]
    try:
        Ginv = np.linalg.inv(Gk)
    except np.linalg.LinAlgError as exc:
        raise EstimationError("normal equations are singular") from exc
    beta_k = Ginv @ b[keep]
    beta = np.full(len(columns), np.nan)
    beta[keep] = beta_k
    return beta, keep, Ginv, dropped


def _finish(design: DesignMatrix, beta, keep, Ginv, dropped, method,
            resid_dof_extra: int = 0) -> EstimateSet:
    Xb = design.matrix @ np.nan_to_num(beta)
    resid = design.response - Xb
    dof = max(design.n_rows - len(keep) - resid_dof_extra, 1)
    sigma2 = float(resid @ resid) / dof
    se = np.full(len(beta), np.nan)
    se[keep] = np.sqrt(np.maximum(sigma2 * np.diag(Ginv), 0.0))
    coefficients = {design.columns[j]: float(beta[j])
                    for j in keep}
    stderr = {design.columns[j]: float(se[j]) for j in keep}
    return EstimateSet(method=method, coefficients=coefficients, stderr=stderr,
                       dropped=dropped, n_rows=design.n_rows,
                       n_cols=design.n_cols, sigma2=sigma2)


def solve_ols(design: DesignMatrix, method: str = METHOD_OLS) -> EstimateSet:
    X = design.matrix
    G = (X.T @ X).toarray()
    b = X.T @ design.response
    beta, keep, Ginv, dropped = _solve_named(G, b, design.columns)
    return _finish(design, beta, keep, Ginv, dropped, method)


def solve_iv(design: DesignMatrix) -> EstimateSet:
    """Two-stage least squares with the exogenous columns as own instruments."""
    if design.instruments is None:
        raise EstimationError("design carries no instruments")
    if design.n_rows == 0:
        raise EstimationError(
            "no rows meet the lag requirement; workers need at least four "
            "consecutive years of history")
    X = design.matrix
    exog = np.flatnonzero(~design.endogenous)
    Z = sparse.hstack([X[:, exog], design.instruments]).tocsr()

    M = (Z.T @ Z).toarray()
    zkeep = independent_columns(M)
    Zk = Z[:, zkeep]
    Mk = M[np.ix_(zkeep, zkeep)]
    A = (X.T @ Zk).toarray()
    zy = Zk.T @ design.response
    try:
        Minv = np.linalg.inv(Mk)
    except np.linalg.LinAlgError as exc:
        raise EstimationError("instrument cross-product is singular") from exc

    G = A @ Minv @ A.T
    b = A @ (Minv @ zy)
    beta, keep, Ginv, dropped = _solve_named(G, b, design.columns)
    return _finish(design, beta, keep, Ginv, dropped, METHOD_IV)


def solve_fe(design: DesignMatrix, method: str = METHOD_FE) -> EstimateSet:
    """Within-group regression with the group intercepts swept out."""
    if design.groups is None:
        raise EstimationError("design carries no group labels")
    X = design.matrix
    g = design.groups
    n_groups = int(g.max()) + 1
    P = sparse.coo_matrix((np.ones(len(g)), (g, np.arange(len(g)))),
                          shape=(n_groups, len(g))).tocsr()
    counts = np.asarray(P.sum(axis=1)).ravel()
    S = (P @ X).toarray()                     # group sums of regressors
    sy = P @ design.response
    Dinv = 1.0 / counts

    G = (X.T @ X).toarray() - (S * Dinv[:, None]).T @ S
    b = X.T @ design.response - S.T @ (Dinv * sy)
    beta, keep, Ginv, dropped = _solve_named(G, b, design.columns)

    # Residuals for the error scale come from the demeaned regression.
    Xb = X @ np.nan_to_num(beta)
    fitted_fe = Dinv * (sy - S @ np.nan_to_num(beta))
    resid = design.response - Xb - fitted_fe[g]
    dof = max(design.n_rows - len(keep) - n_groups, 1)
    sigma2 = float(resid @ resid) / dof
    se = np.full(len(beta), np.nan)
    se[keep] = np.sqrt(np.maximum(sigma2 * np.diag(Ginv), 0.0))
    coefficients = {design.columns[j]: float(beta[j]) for j in keep}
    stderr = {design.columns[j]: float(se[j]) for j in keep}
    return EstimateSet(method=method, coefficients=coefficients, stderr=stderr,
                       dropped=dropped, n_rows=design.n_rows,
                       n_cols=design.n_cols, sigma2=sigma2)


def estimate(panel: PanelDataset, method: str, frame: TimeFrame,
             grouping: AgeGrouping, occs: OccupationSet) -> EstimateSet:
    """Build the design for ``method`` and solve it."""
    K = occs.K
    if method == METHOD_OLS:
        return solve_ols(build_ols_design(panel, frame, grouping, K))
    if method == METHOD_IV:
        return solve_iv(build_iv_design(panel, frame, grouping, K))
    if method == METHOD_AMENITY:
        design = build_amenity_design(panel, frame, grouping, K,
                                      occs.reference_index)
        return solve_ols(design, method=METHOD_AMENITY)
    if method == METHOD_FE:
        return solve_fe(build_fe_design(panel, frame, grouping, K,
                                        with_base_period=True), METHOD_FE)
    if method == METHOD_FE_NOBASE:
        return solve_fe(build_fe_design(panel, frame, grouping, K,
                                        with_base_period=False), METHOD_FE_NOBASE)
    raise EstimationError(f"unknown method {method!r}")


def truth_price_path(params: ParameterSet, frame: TimeFrame):
    """(truth_dpi, truth_pi) per analysis year, pre-period level = 0."""
    d = np.diff(params.prices, axis=0)
    start = len(frame.years) - 1 - len(frame.analysis_years)
    d = d[start:]
    return d, np.cumsum(d, axis=0)


def prices_frame(est: EstimateSet, params: ParameterSet | None, frame: TimeFrame,
                 K: int) -> pd.DataFrame:
    """Estimated and true price paths in the output table layout.

    Without truth parameters the truth columns are written as NaN.
    """
    years = frame.analysis_years
    dpi = est.price_changes(frame, K)
    if est.method in (METHOD_FE, METHOD_FE_NOBASE):
        levels = est.price_levels(frame, K)
        start = len(frame.years) - len(years)
        pi_cum = levels[start:]
    else:
        pi_cum = est.price_levels(frame, K)
    if params is None:
        td = np.full((len(years), K), np.nan)
        tp = np.full((len(years), K), np.nan)
    else:
        td, tp = truth_price_path(params, frame)
    rows = []
    for i, y in enumerate(years):
        for k in range(K):
            rows.append((int(y), k, dpi[i, k], pi_cum[i, k], td[i, k], tp[i, k]))
    return pd.DataFrame(rows, columns=["year", "k", "dpi", "pi_cum",
                                       "truth_dpi", "truth_pi"])


def gammas_frame(est: EstimateSet, params: ParameterSet | None,
                 grouping: AgeGrouping, K: int) -> pd.DataFrame:
    g, se = est.gamma_matrix(grouping, K)
    rows = []
    for a in range(grouping.n_groups):
        for kp in range(K):
            for kc in range(K):
                if np.isnan(g[a, kp, kc]) and est.method in (
                        METHOD_FE, METHOD_FE_NOBASE) and kp != kc:
                    continue
                truth = params.gamma[a, kp, kc] if params is not None else np.nan
                rows.append((a, kp, kc, g[a, kp, kc], truth, se[a, kp, kc]))
    return pd.DataFrame(rows, columns=["age_group", "k_prev", "k_curr",
                                       "gamma_hat", "gamma_true", "sigma_gamma"])
