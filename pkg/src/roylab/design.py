"""Regressor blocks for the wage-growth and wage-level regressions.

Column keys are tuples:

    ("dpi",    year, k)            price-change block (first-difference views)
    ("pi",     year, k)            price-level block (fixed-effects view)
    ("gdiag",  a, k)               own-occupation accumulation
    ("gcross", a, k_prev, k_curr)  cross-occupation accumulation
    ("psi",    a, year, k)         average amenity value block
    ("gfe",    a, k)               accumulation slope in the stint view

Instrument keys:

    ("z_prev", year, k)            previous-choice dummy per analysis year
    ("z_hist", lag, a, k_from, k_to)  lagged transition dummy, lag in {2, 3}
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import sparse

from .panel import AgeGrouping, PanelDataset, TimeFrame

ColumnKey = tuple


def column_name(key: ColumnKey) -> str:
    return key[0] + "[" + ",".join(str(p) for p in key[1:]) + "]"


@dataclass
class DesignMatrix:
    """A sparse design with named columns, response, and optional instruments."""

    matrix: sparse.csr_matrix
    columns: list[ColumnKey]
    response: np.ndarray
    row_index: np.ndarray
    endogenous: np.ndarray                      # bool per column
    instruments: sparse.csr_matrix | None = None
    instrument_columns: list[ColumnKey] = field(default_factory=list)
    groups: np.ndarray | None = None            # stint id per row (FE view)
    empty_instruments: list[ColumnKey] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.matrix.shape[1]

    def column_support(self) -> np.ndarray:
        """Number of nonzero entries per column."""
        return np.diff(self.matrix.tocsc().indptr)

    def to_triplet_frame(self) -> pd.DataFrame:
        coo = self.matrix.tocoo()
        names = [column_name(self.columns[j]) for j in coo.col]
        return pd.DataFrame({"row": coo.row, "col_name": names, "value": coo.data})


def _csr(rows, cols, vals, shape):
    return sparse.coo_matrix((np.asarray(vals, dtype=float),
                              (np.asarray(rows), np.asarray(cols))),
                             shape=shape).tocsr()


def _price_columns(frame: TimeFrame, K: int):
    cols = [("dpi", int(y), k) for y in frame.analysis_years for k in range(K)]
    index = {key[1:]: j for j, key in enumerate(cols)}
    return cols, index


def _structural_blocks(panel: PanelDataset, frame: TimeFrame,
                       grouping: AgeGrouping, K: int, mask: np.ndarray):
    """Shared Eq.-style blocks: price, diagonal, and cross accumulation."""
    rows = np.flatnonzero(mask)
    year = panel.year[rows]
    a = panel.age_group[rows]
    kp = panel.k_prev[rows]
    kc = panel.k_curr[rows]
    L = grouping.n_groups

    price_cols, price_idx = _price_columns(frame, K)
    diag_cols = [("gdiag", aa, k) for aa in range(L) for k in range(K)]
    cross_cols = [("gcross", aa, k1, k2) for aa in range(L)
                  for k1 in range(K) for k2 in range(K) if k1 != k2]
    cross_idx = {key[1:]: j for j, key in enumerate(cross_cols)}

    r_ix, c_ix, vals = [], [], []
    n = len(rows)
    rr = np.arange(n)

    post = year > frame.base_end
    for half in (kp, kc):
        sel = post
        r_ix.append(rr[sel])
        c_ix.append(np.array([price_idx[(int(y), int(k))]
                              for y, k in zip(year[sel], half[sel])], dtype=np.int64))
        vals.append(np.full(sel.sum(), 0.5))

    # Diagonal block: weight 1/2 * (1 + 1{stay}) on the (a, k_prev) column.
    off = len(price_cols)
    r_ix.append(rr)
    c_ix.append(off + a * K + kp)
    vals.append(0.5 * (1.0 + (kp == kc)))

    off2 = off + len(diag_cols)
    sw = np.flatnonzero(kp != kc)
    r_ix.append(rr[sw])
    c_ix.append(np.array([off2 + cross_idx[(int(a[i]), int(kp[i]), int(kc[i]))]
                          for i in sw], dtype=np.int64))
    vals.append(np.full(len(sw), 0.5))

    columns = price_cols + diag_cols + cross_cols
    X = _csr(np.concatenate(r_ix), np.concatenate(c_ix), np.concatenate(vals),
             (n, len(columns)))
    return X, columns, rows


def build_ols_design(panel: PanelDataset, frame: TimeFrame, grouping: AgeGrouping,
                     K: int) -> DesignMatrix:
    """Saturated first-difference design: price, diagonal, and cross blocks."""
    mask = np.ones(panel.n_rows, dtype=bool)
    X, columns, rows = _structural_blocks(panel, frame, grouping, K, mask)
    endo = np.zeros(len(columns), dtype=bool)
    return DesignMatrix(matrix=X, columns=columns, response=panel.dlogw[rows],
                        row_index=rows, endogenous=endo)


def build_iv_design(panel: PanelDataset, frame: TimeFrame, grouping: AgeGrouping,
                    K: int) -> DesignMatrix:
    """OLS design restricted to rows with two extra lags, plus instruments.

    Instruments are the previous-choice dummies per analysis year and the
    age-interacted transition dummies built from the choices two and three
    years back.
    """
    mask = (panel.lag2 >= 0) & (panel.lag3 >= 0)
    X, columns, rows = _structural_blocks(panel, frame, grouping, K, mask)
    # Every structural column carries a current-choice component: the price
    # columns through their 1{k(t)=k} half, the accumulation columns through
    # the stay/switch indicator.  All are projected on the instrument span;
    # the predetermined halves lie inside it, so nothing is lost.
    endo = np.ones(len(columns), dtype=bool)

    year = panel.year[rows]
    a = panel.age_group[rows]
    kp = panel.k_prev[rows]
    l2 = panel.lag2[rows]
    l3 = panel.lag3[rows]
    L = grouping.n_groups
    n = len(rows)
    rr = np.arange(n)

    z_prev_cols, z_prev_idx = _price_columns(frame, K)
    z_prev_cols = [("z_prev", y, k) for (_, y, k) in z_prev_cols]
    z_hist_cols = [("z_hist", lag, aa, k1, k2) for lag in (2, 3)
                   for aa in range(L) for k1 in range(K) for k2 in range(K)]

    r_ix, c_ix = [], []
    post = year > frame.base_end
    r_ix.append(rr[post])
    c_ix.append(np.array([z_prev_idx[(int(y), int(k))]
                          for y, k in zip(year[post], kp[post])], dtype=np.int64))

    off = len(z_prev_cols)
    block = K * K * L
    r_ix.append(rr)
    c_ix.append(off + a * K * K + l2 * K + kp)
    r_ix.append(rr)
    c_ix.append(off + block + a * K * K + l3 * K + l2)

    Z = _csr(np.concatenate(r_ix), np.concatenate(c_ix),
             np.ones(sum(len(p) for p in r_ix)),
             (n, len(z_prev_cols) + len(z_hist_cols)))
    z_cols = z_prev_cols + z_hist_cols

    support = np.diff(Z.tocsc().indptr)
    empty = [z_cols[j] for j in np.flatnonzero(support == 0)]

    return DesignMatrix(matrix=X, columns=columns, response=panel.dlogw[rows],
                        row_index=rows, endogenous=endo, instruments=Z,
                        instrument_columns=z_cols, empty_instruments=empty)


def build_amenity_design(panel: PanelDataset, frame: TimeFrame,
                         grouping: AgeGrouping, K: int,
                         reference: int) -> DesignMatrix:
    """OLS design plus average-amenity columns on the occupation switches.

    The amenity column for (a, year, k) carries ``1{k(t)=k} - 1{k(t-1)=k}``
    for rows in age group a and that year; the reference occupation's
    columns are omitted to break the adding-up collinearity.
    """
    base = build_ols_design(panel, frame, grouping, K)
    rows = base.row_index
    year = panel.year[rows]
    a = panel.age_group[rows]
    kp = panel.k_prev[rows]
    kc = panel.k_curr[rows]
    L = grouping.n_groups

    psi_cols = [("psi", aa, int(y), k) for aa in range(L)
                for y in frame.analysis_years for k in range(K) if k != reference]
    psi_idx = {key[1:]: j for j, key in enumerate(psi_cols)}

    r_ix, c_ix, vals = [], [], []
    sw = np.flatnonzero((kp != kc) & (year > frame.base_end))
    for i in sw:
        for k, v in ((int(kc[i]), 1.0), (int(kp[i]), -1.0)):
            if k == reference:
                continue
            r_ix.append(i)
            c_ix.append(psi_idx[(int(a[i]), int(year[i]), k)])
            vals.append(v)

    P = _csr(r_ix, c_ix, vals, (base.n_rows, len(psi_cols)))
    X = sparse.hstack([base.matrix, P]).tocsr()
    columns = base.columns + psi_cols
    endo = np.zeros(len(columns), dtype=bool)
    return DesignMatrix(matrix=X, columns=columns, response=base.response,
                        row_index=rows, endogenous=endo)


def build_fe_design(panel: PanelDataset, frame: TimeFrame, grouping: AgeGrouping,
                    K: int, with_base_period: bool = True) -> DesignMatrix:
    """Levels design for the occupation-stint fixed-effects regression.

    Response is the log wage; the price block holds (year, occupation)
    dummies and the slope block counts, per age group, the within-stint
    years accrued in that group (so the coefficient on ("gfe", a, k) is the
    own-occupation accumulation at age group a).  Stint intercepts are not
    materialized; the solver removes them by within-stint demeaning, and
    singleton stints are dropped here because they carry no within variation.

    Without a base period, price dummies cover every year but the first and
    the slope columns for the oldest age group are pinned to zero, which is
    the usual automatic normalization.
    """
    stint = panel.lv_stint_id
    counts = np.bincount(stint, minlength=stint.max() + 1 if len(stint) else 0)
    keep = counts[stint] >= 2 if len(stint) else np.zeros(0, dtype=bool)
    rows = np.flatnonzero(keep)
    if len(rows) == 0:
        raise ValueError("no identifying variation: all stints are singletons")

    year = panel.lv_year[rows]
    age = panel.lv_age[rows]
    k = panel.lv_k[rows]
    tenure = panel.lv_tenure[rows]
    g = stint[rows]
    L = grouping.n_groups
    n = len(rows)
    rr = np.arange(n)

    if with_base_period:
        price_years = list(frame.analysis_years)
    else:
        price_years = list(frame.years[1:])
    price_cols = [("pi", int(y), kk) for y in price_years for kk in range(K)]
    price_idx = {key[1:]: j for j, key in enumerate(price_cols)}

    if with_base_period:
        slope_groups = list(range(L))
    else:
        slope_groups = list(range(L - 1))
    slope_cols = [("gfe", aa, kk) for aa in slope_groups for kk in range(K)]
    slope_pos = {key[1:]: j for j, key in enumerate(slope_cols)}

    r_ix, c_ix, vals = [], [], []
    in_price = np.array([(int(y), int(kk)) in price_idx for y, kk in zip(year, k)])
    sel = np.flatnonzero(in_price)
    r_ix.append(rr[sel])
    c_ix.append(np.array([price_idx[(int(year[i]), int(k[i]))] for i in sel],
                         dtype=np.int64))
    vals.append(np.ones(len(sel)))

    # Age-group exposure within the stint: for each row, count years tau in
    # (stint_start, t] whose previous-period age falls in group a.  Computed
    # cumulatively because stints are contiguous runs in the levels arrays.
    off = len(price_cols)
    starts = np.flatnonzero(tenure == 0)
    prev_age_group = np.where(tenure > 0,
                              grouping.group_of(np.maximum(age - 1, grouping.entry_age)),
                              0)
    onehot = np.zeros((n, L))
    within = tenure > 0
    onehot[rr[within], prev_age_group[within]] = 1.0
    cum = np.cumsum(onehot, axis=0)
    anchor = np.repeat(cum[starts] - onehot[starts],
                       np.diff(np.concatenate((starts, [n]))), axis=0)
    exposure = cum - anchor

    for aa in slope_groups:
        nz = np.flatnonzero(exposure[:, aa] > 0)
        r_ix.append(rr[nz])
        c_ix.append(np.full(len(nz), off + slope_pos[(aa, 0)], dtype=np.int64) + k[nz])
        vals.append(exposure[nz, aa])

    columns = price_cols + slope_cols
    X = _csr(np.concatenate(r_ix), np.concatenate(c_ix), np.concatenate(vals),
             (n, len(columns)))
    endo = np.zeros(len(columns), dtype=bool)
    # Re-index groups densely for the solver.
    _, g_dense = np.unique(g, return_inverse=True)
    return DesignMatrix(matrix=X, columns=columns, response=panel.lv_logw[rows],
                        row_index=rows, endogenous=endo, groups=g_dense)
