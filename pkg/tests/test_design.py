import numpy as np
import pytest

from roylab.design import (build_amenity_design, build_fe_design,
                           build_iv_design, build_ols_design, column_name)
from roylab.dgp import SeedConfig, simulate_careers
from roylab.panel import AgeGrouping, OccupationSet, TimeFrame, flatten
from roylab.scenarios import builtin_scenarios

FRAME = TimeFrame(1975, 2010, 1984)
GROUPING = AgeGrouping()
OCCS = OccupationSet()
K = 4


@pytest.fixture(scope="module")
def moderate_panel():
    sc = builtin_scenarios()["moderate-shocks"]
    careers = simulate_careers(SeedConfig(n_workers=800, seed=15),
                               sc.parameters(FRAME), FRAME, GROUPING, OCCS)
    return flatten(careers, FRAME, GROUPING)


class TestOlsDesign:
    def test_row_structure(self, moderate_panel):
        d = build_ols_design(moderate_panel, FRAME, GROUPING, K)
        X = d.matrix.tocsc()
        kinds = np.array([c[0] for c in d.columns])
        price = X[:, kinds == "dpi"]
        diag = X[:, kinds == "gdiag"]
        cross = X[:, kinds == "gcross"]
        # price block row sums are 0 (base period) or 1
        psums = np.asarray(price.sum(axis=1)).ravel()
        assert set(np.round(psums, 12)) <= {0.0, 1.0}
        post = moderate_panel.year > FRAME.base_end
        np.testing.assert_array_equal(psums > 0, post)
        # exactly one diagonal entry per row
        dcounts = np.diff(diag.tocsr().indptr)
        assert np.all(dcounts == 1)
        # at most one cross entry, present iff the row is a switch
        ccounts = np.diff(cross.tocsr().indptr)
        sw = moderate_panel.k_prev != moderate_panel.k_curr
        np.testing.assert_array_equal(ccounts, sw.astype(int))

    def test_stayer_base_period_weights(self, moderate_panel):
        d = build_ols_design(moderate_panel, FRAME, GROUPING, K)
        base = moderate_panel.year <= FRAME.base_end
        stay = moderate_panel.k_prev == moderate_panel.k_curr
        i = int(np.flatnonzero(base & stay)[0])
        row = d.matrix[i].toarray().ravel()
        nz = np.flatnonzero(row)
        assert len(nz) == 1
        key = d.columns[nz[0]]
        assert key[0] == "gdiag"
        assert row[nz[0]] == pytest.approx(1.0)

    def test_switcher_weights(self, moderate_panel):
        d = build_ols_design(moderate_panel, FRAME, GROUPING, K)
        post = moderate_panel.year > FRAME.base_end
        sw = moderate_panel.k_prev != moderate_panel.k_curr
        i = int(np.flatnonzero(post & sw)[0])
        row = d.matrix[i].toarray().ravel()
        vals = {d.columns[j][0]: row[j] for j in np.flatnonzero(row)}
        assert vals["gdiag"] == pytest.approx(0.5)
        assert vals["gcross"] == pytest.approx(0.5)

    def test_column_names_unique(self, moderate_panel):
        d = build_ols_design(moderate_panel, FRAME, GROUPING, K)
        names = [column_name(c) for c in d.columns]
        assert len(set(names)) == len(names)

    def test_triplet_dump(self, moderate_panel):
        d = build_ols_design(moderate_panel, FRAME, GROUPING, K)
        trip = d.to_triplet_frame()
        assert set(trip.columns) == {"row", "col_name", "value"}
        assert len(trip) == d.matrix.nnz


class TestIvDesign:
    def test_instrument_count(self, moderate_panel):
        d = build_iv_design(moderate_panel, FRAME, GROUPING, K)
        # (T - T_base) * K + 2 * K^2 * L = 26*4 + 2*16*3
        assert len(d.instrument_columns) == 200

    def test_short_history_contributes_no_rows(self):
        from test_panel_core import make_career
        panel = flatten([make_career(0, 1990, 30, [1, 1])], FRAME, GROUPING)
        d = build_iv_design(panel, FRAME, GROUPING, K)
        assert d.n_rows == 0

    def test_no_switches_zero_cross_instruments(self):
        from test_panel_core import make_career
        careers = [make_career(i, 1980, 30, [i % 4] * 8) for i in range(20)]
        panel = flatten(careers, FRAME, GROUPING)
        d = build_iv_design(panel, FRAME, GROUPING, K)
        kinds = np.array([c[0] for c in d.columns])
        support = d.column_support()
        assert np.all(support[kinds == "gcross"] == 0)
        assert len(d.empty_instruments) > 0

    def test_rows_have_full_lags(self, moderate_panel):
        d = build_iv_design(moderate_panel, FRAME, GROUPING, K)
        assert np.all(moderate_panel.lag2[d.row_index] >= 0)
        assert np.all(moderate_panel.lag3[d.row_index] >= 0)


class TestAmenityDesign:
    def test_stayer_rows_have_zero_psi(self, moderate_panel):
        d = build_amenity_design(moderate_panel, FRAME, GROUPING, K,
                                 OCCS.reference_index)
        kinds = np.array([c[0] for c in d.columns])
        psi = d.matrix.tocsc()[:, kinds == "psi"].tocsr()
        stay = moderate_panel.k_prev == moderate_panel.k_curr
        counts = np.diff(psi.indptr)
        assert np.all(counts[stay] == 0)

    def test_switch_signs(self, moderate_panel):
        d = build_amenity_design(moderate_panel, FRAME, GROUPING, K,
                                 OCCS.reference_index)
        post = moderate_panel.year > FRAME.base_end
        sw = ((moderate_panel.k_prev != moderate_panel.k_curr)
              & (moderate_panel.k_prev != OCCS.reference_index)
              & (moderate_panel.k_curr != OCCS.reference_index) & post)
        i = int(np.flatnonzero(sw)[0])
        row = d.matrix[i].toarray().ravel()
        psi_vals = {d.columns[j]: row[j] for j in np.flatnonzero(row)
                    if d.columns[j][0] == "psi"}
        assert sorted(psi_vals.values()) == [-1.0, 1.0]
        for (_, a, y, k), v in psi_vals.items():
            expect = moderate_panel.k_curr[i] if v > 0 else moderate_panel.k_prev[i]
            assert k == expect

    def test_reference_column_absent(self, moderate_panel):
        d = build_amenity_design(moderate_panel, FRAME, GROUPING, K,
                                 OCCS.reference_index)
        assert not any(c[0] == "psi" and c[3] == OCCS.reference_index
                       for c in d.columns)

    def test_delta_columns_sum_to_zero_with_reference(self, moderate_panel):
        # rebuilt including the reference: the ±1 entries cancel row-wise
        kp, kc = moderate_panel.k_prev, moderate_panel.k_curr
        delta = np.zeros((moderate_panel.n_rows, K))
        rows = np.arange(moderate_panel.n_rows)
        delta[rows, kc] += 1.0
        delta[rows, kp] -= 1.0
        np.testing.assert_allclose(delta.sum(axis=1), 0.0)


class TestFeDesign:
    def test_singleton_stints_dropped(self):
        from test_panel_core import make_career
        careers = [make_career(0, 1980, 30, [1, 2, 2, 2])]
        panel = flatten(careers, FRAME, GROUPING)
        d = build_fe_design(panel, FRAME, GROUPING, K)
        # the singleton opening stint is excluded
        assert d.n_rows == 3

    def test_within_demeaning_annihilates_intercepts(self, moderate_panel):
        d = build_fe_design(moderate_panel, FRAME, GROUPING, K)
        X = d.matrix.toarray()
        for g in np.unique(d.groups)[:10]:
            rows = d.groups == g
            demeaned = X[rows] - X[rows].mean(axis=0)
            assert np.allclose(demeaned.mean(axis=0), 0.0, atol=1e-12)

    def test_tenure_exposure_totals(self, moderate_panel):
        d = build_fe_design(moderate_panel, FRAME, GROUPING, K)
        kinds = np.array([c[0] for c in d.columns])
        slope = d.matrix.tocsc()[:, kinds == "gfe"].toarray()
        tenure = moderate_panel.lv_tenure[d.row_index]
        np.testing.assert_allclose(slope.sum(axis=1), tenure)

    def test_nobase_pins_last_age_group(self, moderate_panel):
        d = build_fe_design(moderate_panel, FRAME, GROUPING, K,
                            with_base_period=False)
        groups = {c[1] for c in d.columns if c[0] == "gfe"}
        assert GROUPING.n_groups - 1 not in groups
        years = {c[1] for c in d.columns if c[0] == "pi"}
        assert FRAME.first_year not in years
        assert FRAME.first_year + 1 in years
