import numpy as np
import pytest

from graymode.color import STANDARD, UNIFORM
from graymode.modes import BmMode, EqMode, priority
from graymode.report import (
    ModeReport,
    analyze_operator,
    from_csv,
    from_json_dict,
    to_csv,
    to_json_dict,
)
from graymode.classify import BmClass, EqClass


@pytest.fixture(scope="module")
def standard_report():
    return analyze_operator(STANDARD)


class TestModeReport:
    def test_echoes_operator_and_family(self, standard_report):
        assert standard_report.operator == STANDARD
        assert standard_report.k == pytest.approx(10.109, abs=1e-3)

    def test_classes(self, standard_report):
        assert standard_report.eq_class.label == "trapezoidal-rounded"
        assert standard_report.bm_class.kind == "regular"

    def test_rejects_mismatched_counts(self, standard_report):
        other = standard_report.eq.counts.copy()
        other[0] += 1
        other[1] -= 1
        bad_bm = BmMode(other, standard_report.bm.mean_lstar,
                        standard_report.bm.std_lstar)
        with pytest.raises(ValueError):
            ModeReport(STANDARD, standard_report.eq, bad_bm,
                       standard_report.priority, standard_report.eq_class,
                       standard_report.bm_class)


class TestCsvRoundTrip:
    def test_numeric_round_trip(self, standard_report):
        eq, bm, prio = from_csv(to_csv(standard_report))
        assert np.array_equal(eq.counts, standard_report.eq.counts)
        assert np.array_equal(prio, standard_report.priority)  # repr round-trips
        assert np.allclose(bm.mean_lstar, standard_report.bm.mean_lstar,
                           atol=1e-9, equal_nan=True)
        assert np.allclose(bm.std_lstar, standard_report.bm.std_lstar,
                           atol=1e-9, equal_nan=True)

    def test_absent_channels_emit_empty_fields(self):
        counts = np.full(256, 2, dtype=np.int64)
        counts[9] = 0
        mean = np.full(256, 40.0)
        std = np.full(256, 1.0)
        mean[9] = np.nan
        std[9] = np.nan
        eq = EqMode(counts)
        bm = BmMode(counts, mean, std)
        report = ModeReport(UNIFORM, eq, bm, priority(eq),
                            EqClass("bell"), BmClass("regular"))
        lines = to_csv(report).splitlines()
        row9 = lines[10].split(",")
        assert row9[4] == "" and row9[5] == ""
        eq2, bm2, _ = from_csv("\n".join(lines))
        assert not bm2.present[9]

    def test_header_required(self):
        with pytest.raises(ValueError):
            from_csv("a,b,c\n1,2,3\n")


class TestJsonRoundTrip:
    def test_full_round_trip(self, standard_report):
        data = to_json_dict(standard_report)
        rebuilt = from_json_dict(data)
        assert rebuilt.operator == standard_report.operator
        assert np.array_equal(rebuilt.eq.counts, standard_report.eq.counts)
        assert rebuilt.eq_class == standard_report.eq_class
        assert rebuilt.bm_class == standard_report.bm_class
        assert np.allclose(rebuilt.bm.mean_lstar, standard_report.bm.mean_lstar,
                           equal_nan=True)

    def test_payload_shape(self, standard_report):
        data = to_json_dict(standard_report)
        assert set(data) == {"operator", "eq_class", "bm_class", "eq_counts",
                             "priority", "mean_lstar", "std_lstar"}
        assert data["operator"]["k"] == pytest.approx(10.109, abs=1e-3)
        assert len(data["eq_counts"]) == 256
