import time
import warnings

import mpmath as mp
import pytest

from conftest import mpv
from rieszlab.arith import PrecisionConfig
from rieszlab.errors import BracketError, PrecisionDowngradeWarning, TableFormatError
from rieszlab.zeros import (
    CSV_HEADER,
    ZeroEntry,
    ZeroTable,
    enrich,
    load_enriched,
    load_ordinates,
    refine_zero,
    residuals,
    save_enriched,
    scan_ordinates,
    standard_ordinates_path,
    standard_table,
)


def test_bundled_ordinates_match_oracle(frozen):
    t = load_ordinates(standard_ordinates_path())
    assert len(t) == 60
    for e, ref in zip(t.entries, frozen["zeros"]):
        assert abs(e.gamma - mpv(ref["gamma"])) < 1e-25


def test_refine_zero_to_working_precision(frozen):
    g = refine_zero(14.13, PrecisionConfig(bits=256))
    assert abs(g - mpv(frozen["zeros"][0]["gamma"])) < mp.mpf(10) ** -38


def test_refine_already_refined_seed(frozen):
    cfg = PrecisionConfig(bits=128)
    g = refine_zero(refine_zero(21.0, cfg), cfg)
    assert abs(g - mpv(frozen["zeros"][1]["gamma"])) < 1e-30


def test_refine_without_zero_raises():
    with pytest.raises(BracketError):
        refine_zero(17.5, PrecisionConfig(bits=64))


def test_scan_finds_first_five_zeros(frozen):
    found = scan_ordinates(33.5, step=0.05, t_min=10.0)
    refs = [float(mpv(z["gamma"])) for z in frozen["zeros"][:5]]
    assert len(found) == 5
    assert all(abs(f - r) <= 0.025 for f, r in zip(found, refs))


def test_enriched_table_against_oracle(table30, frozen):
    assert len(table30) == 30 and table30.enriched
    for e, ref in zip(table30.entries, frozen["zeros"]):
        assert abs(e.gamma - mpv(ref["gamma"])) < 1e-38
        assert abs(e.zeta_prime - mpv(ref["zeta_prime"])) < 1e-36


def test_residuals_small(table30):
    assert max(residuals(table30.head(5))) < mp.mpf(10) ** -60


class TestTableInvariants:
    def _e(self, i, g):
        with mp.workprec(128):
            return ZeroEntry(i, mp.mpf(g))

    def test_ascending(self):
        with pytest.raises(TableFormatError):
            ZeroTable((self._e(1, 14.13), self._e(2, 14.0)), 64)

    def test_first_ordinate_window(self):
        with pytest.raises(TableFormatError):
            ZeroTable((self._e(1, 21.02),), 64)

    def test_index_sequence(self):
        with pytest.raises(TableFormatError):
            ZeroTable((self._e(2, 14.13),), 64)

    def test_head(self, table30):
        assert len(table30.head(7)) == 7


class TestFiles:
    def test_ordinate_parse_error_names_line(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("# header\n14.134725\nabc\n")
        with pytest.raises(TableFormatError, match=":3:"):
            load_ordinates(p)

    def test_ordinates_must_ascend(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("14.134725\n14.0\n")
        with pytest.raises(TableFormatError, match="ascending"):
            load_ordinates(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_ordinates(tmp_path / "nope.txt")

    def test_roundtrip(self, table30, tmp_path):
        p = tmp_path / "t.csv"
        save_enriched(table30.head(5), p)
        assert p.read_text().splitlines()[0] == ",".join(CSV_HEADER)
        back = load_enriched(p)
        for a, b in zip(back.entries, table30.entries):
            assert abs(a.gamma - b.gamma) < 1e-70
            assert abs(a.zeta_prime - b.zeta_prime) < 1e-70

    def test_downgrade_warning(self, table30, tmp_path):
        p = tmp_path / "t.csv"
        low = enrich(load_ordinates(standard_ordinates_path(), 64).head(2), PrecisionConfig(bits=64))
        save_enriched(low, p)
        with pytest.warns(PrecisionDowngradeWarning):
            load_enriched(p, bits=256)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            load_enriched(p, bits=64)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text("a,b\n")
        with pytest.raises(TableFormatError):
            load_enriched(p)

    def test_unenriched_cannot_be_saved(self, tmp_path):
        with pytest.raises(TableFormatError):
            save_enriched(load_ordinates(standard_ordinates_path()).head(2), tmp_path / "x.csv")


def test_standard_table_cache_reused(zero_cache, table30):
    t0 = time.perf_counter()
    again = standard_table(30, PrecisionConfig(), cache_dir=zero_cache)
    assert time.perf_counter() - t0 < 2.0
    assert [e.gamma for e in again.entries] == [e.gamma for e in table30.entries]
