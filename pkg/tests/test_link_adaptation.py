"""Rate tables, scheme selection, and realized error rates."""

import math

import numpy as np
import pytest

import reference as ref
from subnetsim import link_adaptation as la


@pytest.fixture(scope="module")
def table():
    return la.build_mcs_table()


class TestQfunc:
    def test_matches_oracle(self):
        for z in (-5.0, -1.0, 0.0, 0.2316, 1.0, 5.0):
            assert la.qfunc(z) == pytest.approx(float(ref.qfunc_oracle(z)), rel=1e-12)

    def test_symmetry(self):
        assert la.qfunc(0.0) == pytest.approx(0.5, rel=1e-12)
        assert la.qfunc(2.0) + la.qfunc(-2.0) == pytest.approx(1.0, rel=1e-12)


class TestBlerModel:
    def test_spot_value_unit_snr_unit_efficiency(self):
        # SE 1 with 160-bit packets needs n = 160; at 0 dB the dispersion
        # approximation gives Q(0.23165).
        got = la.bler_normal_approx(1.0, 160, 160)
        assert got == pytest.approx(ref.BLER_GAMMA1_SE1, rel=1e-9)
        assert got == pytest.approx(float(ref.qfunc_oracle(ref.BLER_GAMMA1_SE1_Z)), rel=1e-9)

    def test_matches_oracle_on_grid(self):
        for gamma_db in (-10.0, 0.0, 10.0, 25.0):
            gamma = 10.0 ** (gamma_db / 10.0)
            for n, k in ((160, 160), (320, 160), (27, 160)):
                assert la.bler_normal_approx(gamma, n, k) == pytest.approx(
                    ref.bler_oracle(gamma, n, k), rel=1e-9)

    def test_vanishes_at_high_snr(self):
        assert la.bler_normal_approx(1e6, 160, 160) < 1e-12

    def test_saturates_at_low_snr(self):
        assert la.bler_normal_approx(1e-6, 160, 160) > 1.0 - 1e-9

    def test_bounded_in_unit_interval(self):
        for gamma in 10.0 ** np.linspace(-3, 4, 50):
            b = la.bler_normal_approx(float(gamma), 160, 160)
            assert 0.0 <= b <= 1.0


class TestTableConstruction:
    def test_default_shape(self, table):
        assert len(table) == 29
        assert table.sinr_grid_db.shape == (601,)
        assert table.sinr_grid_db[0] == -20.0
        assert table.sinr_grid_db[-1] == 40.0
        assert table.curves.shape == (29, 601)

    def test_efficiencies_strictly_ascend(self, table):
        ses = [e.spectral_efficiency for e in table.entries]
        assert all(b > a for a, b in zip(ses, ses[1:]))
        assert ses[0] == 0.05859375    # QPSK at coding rate 30/1024
        assert ses[-1] == 4.5234375    # 64QAM at coding rate 772/1024

    def test_blocklength_from_efficiency(self, table):
        # n = ceil(packet_bits / SE): spot-check the ends against the oracle.
        for entry in (table.entries[0], table.entries[-1]):
            n = math.ceil(160 / entry.spectral_efficiency)
            mid = 300  # 10 dB
            gamma = 10.0 ** (table.sinr_grid_db[mid] / 10.0)
            assert entry.bler[mid] == pytest.approx(
                ref.bler_oracle(gamma, n, 160), rel=1e-9)

    def test_curves_nonincreasing(self, table):
        diffs = np.diff(table.curves, axis=1)
        assert np.all(diffs <= 1e-15)

    def test_rejects_nonpositive_efficiency(self):
        with pytest.raises(ValueError):
            la.build_mcs_table(efficiencies=(0.5, 0.0))


class TestInterpolation:
    def test_node_exact_at_grid_points(self, table):
        for row in (0, 14, 28):
            mcs_id = table.entries[row].mcs_id
            for g in (0, 140, 600):
                x = float(table.sinr_grid_db[g])
                assert la.achieved_bler(table, mcs_id, x) == table.curves[row, g]

    def test_interpolates_between_nodes(self, table):
        mcs_id = table.entries[10].mcs_id
        x0, x1 = table.sinr_grid_db[200], table.sinr_grid_db[201]
        y0 = la.achieved_bler(table, mcs_id, float(x0))
        y1 = la.achieved_bler(table, mcs_id, float(x1))
        mid = la.achieved_bler(table, mcs_id, float(0.5 * (x0 + x1)))
        assert min(y0, y1) <= mid <= max(y0, y1)
        assert mid == pytest.approx(0.5 * (y0 + y1), rel=1e-9)

    def test_clamps_outside_grid(self, table):
        mcs_id = table.entries[5].mcs_id
        assert la.achieved_bler(table, mcs_id, -60.0) == table.curves[5, 0]
        assert la.achieved_bler(table, mcs_id, 80.0) == table.curves[5, -1]


class TestSelection:
    def test_highest_feasible_entry_wins(self, table):
        mcs_id, infeasible = la.select_mcs(35.0, table, 1e-5)
        assert not infeasible
        row = table.row_of(mcs_id)
        assert la.achieved_bler(table, mcs_id, 35.0) <= 1e-5
        if row + 1 < len(table):
            nxt = table.entries[row + 1].mcs_id
            assert la.achieved_bler(table, nxt, 35.0) > 1e-5

    def test_infeasible_falls_back_to_most_robust(self, table):
        mcs_id, infeasible = la.select_mcs(-20.0, table, 1e-5)
        assert infeasible
        assert mcs_id == table.entries[0].mcs_id

    def test_selection_monotone_in_sinr(self, table):
        rows = []
        for x in np.linspace(-20.0, 40.0, 121):
            mcs_id, _ = la.select_mcs(float(x), table, 1e-3)
            rows.append(table.row_of(mcs_id))
        feasible_rows = rows[5:]
        assert all(b >= a for a, b in zip(feasible_rows, feasible_rows[1:]))

    def test_two_entry_toy_table(self, tmp_path):
        # Hand-built table with known feasibility edges at 0 dB and 10 dB.
        path = tmp_path / "toy.csv"
        lines = ["mcs_id,spectral_efficiency,sinr_db,bler"]
        for x in (-10.0, 0.0, 10.0, 20.0):
            lines.append(f"0,1.0,{x},{1e-5 if x >= 0.0 else 1.0}")
        for x in (-10.0, 0.0, 10.0, 20.0):
            lines.append(f"1,2.0,{x},{1e-5 if x >= 10.0 else 1.0}")
        path.write_text("\n".join(lines) + "\n")
        toy = la.load_mcs_table(str(path))
        assert la.select_mcs(-5.0, toy, 1e-5) == (0, True)
        assert la.select_mcs(5.0, toy, 1e-5) == (0, False)
        assert la.select_mcs(15.0, toy, 1e-5) == (1, False)


class TestAdjustedSinr:
    def test_spot_value(self):
        got = la.adjusted_sinr_db(1e-10, 3e-12, 2e-12)
        assert got == pytest.approx(ref.ADJUSTED_SINR_SPOT_DB, rel=1e-12)

    def test_exact_when_fed_truth(self):
        s, ipv, noise = 2e-10, 4e-12, 2e-12
        truth_db = 10.0 * math.log10(s / (ipv + noise))
        assert la.adjusted_sinr_db(s, ipv, noise) == pytest.approx(truth_db, rel=1e-12)

    def test_negative_estimate_clamped(self):
        a = la.adjusted_sinr_db(1e-10, -5e-12, 2e-12)
        b = la.adjusted_sinr_db(1e-10, 0.0, 2e-12)
        assert a == b

    def test_underestimate_never_lowers_sinr(self):
        low = la.adjusted_sinr_db(1e-10, 1e-12, 2e-12)
        high = la.adjusted_sinr_db(1e-10, 8e-12, 2e-12)
        assert low > high

    def test_rejects_nonpositive_signal(self):
        with pytest.raises(ValueError):
            la.adjusted_sinr_db(0.0, 1e-12, 2e-12)


class TestPersistence:
    def test_round_trip_is_exact(self, table, tmp_path):
        path = tmp_path / "table.csv"
        la.save_mcs_table(table, str(path))
        back = la.load_mcs_table(str(path))
        assert np.array_equal(back.sinr_grid_db, table.sinr_grid_db)
        assert np.array_equal(back.curves, table.curves)
        assert [e.mcs_id for e in back.entries] == [e.mcs_id for e in table.entries]
        assert [e.spectral_efficiency for e in back.entries] == \
            [e.spectral_efficiency for e in table.entries]

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(la.ParseError):
            la.load_mcs_table(str(path))

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c,d\n0,1.0,0.0,0.5\n")
        with pytest.raises(la.ParseError):
            la.load_mcs_table(str(path))

    def test_increasing_curve_rejected(self, tmp_path):
        path = tmp_path / "rising.csv"
        path.write_text(
            "mcs_id,spectral_efficiency,sinr_db,bler\n"
            "0,1.0,0.0,0.1\n"
            "0,1.0,1.0,0.5\n")
        with pytest.raises(la.MonotonicityViolation):
            la.load_mcs_table(str(path))

    def test_bler_outside_unit_interval_rejected(self, tmp_path):
        path = tmp_path / "oob.csv"
        path.write_text(
            "mcs_id,spectral_efficiency,sinr_db,bler\n"
            "0,1.0,0.0,1.5\n")
        with pytest.raises(la.ParseError):
            la.load_mcs_table(str(path))

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(la.ParseError):
            la.load_mcs_table(str(tmp_path / "nope.csv"))


class TestLaConfig:
    def test_defaults(self):
        cfg = la.LaConfig()
        assert cfg.target_bler == 1e-5
        assert cfg.packet_bits == 160
        assert cfg.table_source == "analytic"
        assert cfg.table_path is None
