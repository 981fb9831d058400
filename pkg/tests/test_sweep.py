import time

import pytest

from probegain import ConfigError, DomainError, InvariantError, Pumping, RelaxationSet, critical_x, kappa_curve
from probegain.critical import RegionLabel
from probegain.sweep import (
    COLUMNS,
    PRESETS,
    Range,
    SweepSpec,
    emit,
    evaluation_row,
    gain_vs_kappa_sweep,
    get_preset,
    gnuplot_script,
    load_config,
    parse_csv,
    parse_json,
    region_map,
    shipped_config,
)


class TestPresets:
    def test_neon_case_1(self):
        r = PRESETS["neon-case-1"].relaxation
        assert (r.gamma_m, r.gamma_n, r.gamma_g, r.gamma_mn) == (3e7, 5e7, 1e7, 0.5e7)
        assert (r.Gamma, r.Gamma_gn, r.Gamma_gm) == (4e7, 3e7, 2e7)

    def test_neon_case_2_swaps_m_and_g(self):
        r1 = PRESETS["neon-case-1"].relaxation
        r2 = PRESETS["neon-case-2"].relaxation
        assert (r2.gamma_m, r2.gamma_g) == (r1.gamma_g, r1.gamma_m)

    @pytest.mark.parametrize("name", ["neon-case-1", "neon-case-2"])
    def test_shipped_file_matches(self, name):
        r, pumping, spec = load_config(shipped_config(name))
        assert r == PRESETS[name].relaxation
        assert pumping is None

    def test_preset_dir(self, tmp_path, monkeypatch):
        (tmp_path / "mine.cfg").write_text("gamma_m=1\ngamma_n=2\ngamma_mn=0\ngamma_g=3\nspontaneous=true\n")
        monkeypatch.setenv("PROBEGAIN_PRESET_DIR", str(tmp_path))
        assert get_preset("mine").relaxation.Gamma_gm == 2.0
        with pytest.raises(KeyError):
            get_preset("nope")


class TestConfig:
    def test_full(self):
        text = """
        # medium
        gamma_m = 3e7
        gamma_n = 1e7
        gamma_mn = 0      # no m->n decay
        Gamma = 1e8
        Gamma_gn = 1e8
        Gamma_gm = 1e8
        dn_gn = 0.5
        dn_mn = 1.0
        x_min = 1
        x_max = 3
        x_count = 11
        kappa_min = 0.01
        kappa_max = 6
        kappa_count = 5
        log_kappa = true
        x_values = 2, 4.14, 8
        format = json
        """
        r, p, spec = load_config(text)
        assert r == PRESETS["four-region"].relaxation
        assert p == Pumping(0.5, 1.0)
        assert spec.x_range == Range(1.0, 3.0, 11)
        assert spec.kappa_range.log and spec.kappa_range.count == 5
        assert spec.x_values == (2.0, 4.14, 8.0)
        assert spec.fmt == "json"

    def test_gamma_mn_too_large(self):
        with pytest.raises(InvariantError) as exc:
            load_config("gamma_mn = 5e7\ngamma_m = 3e7\ngamma_n=1\ngamma_g=1\nspontaneous=true\n")
        assert exc.value.field == "gamma_mn"
        assert "gamma_m" in str(exc.value)

    def test_empty_lists_required(self):
        with pytest.raises(ConfigError) as exc:
            load_config("# nothing here\n\n")
        for key in ("gamma_m", "gamma_n", "gamma_mn", "Gamma_gm"):
            assert key in str(exc.value)

    def test_unknown_key_line_number(self):
        with pytest.raises(ConfigError) as exc:
            load_config("gamma_m = 1\n  bogus = 2\n")
        assert exc.value.line == 2 and exc.value.column == 3

    def test_bad_value_position(self):
        with pytest.raises(ConfigError) as exc:
            load_config("gamma_m = abc\n")
        assert (exc.value.line, exc.value.column) == (1, 11)

    def test_missing_equals(self):
        with pytest.raises(ConfigError) as exc:
            load_config("gamma_m 3\n")
        assert exc.value.line == 1

    def test_duplicate(self):
        with pytest.raises(ConfigError):
            load_config("gamma_m = 1\ngamma_m = 2\n")

    def test_spontaneous_conflict(self):
        with pytest.raises(ConfigError):
            load_config("gamma_m=1\ngamma_n=1\ngamma_mn=0\ngamma_g=1\nspontaneous=true\nGamma=2\n")

    def test_half_pumping(self):
        with pytest.raises(ConfigError):
            load_config(shipped_config("neon-case-1") + "dn_gn = 1\n")

    def test_negative_kappa_min(self):
        with pytest.raises(InvariantError):
            load_config(shipped_config("neon-case-1") + "kappa_min=-1\nkappa_max=1\nkappa_count=3\n")


class TestRange:
    def test_values(self):
        assert Range(0.0, 1.0, 3).values() == [0.0, 0.5, 1.0]
        assert Range(1.0, 100.0, 3, log=True).values() == pytest.approx([1.0, 10.0, 100.0])

    @pytest.mark.parametrize("args", [(0.0, 0.0, 10), (1.0, 0.0, 10), (0.0, 1.0, 1), (0.0, 1.0, 2, True)])
    def test_invalid(self, args):
        with pytest.raises(InvariantError):
            Range(*args)

    def test_spec_format(self):
        with pytest.raises(InvariantError):
            SweepSpec(fmt="xml")


class TestGainSweep:
    def test_fig3_shape(self, neon1):
        rows = gain_vs_kappa_sweep(neon1, [2.0, 4.14, 8.0], Range(0.0, 6.0, 601))
        assert len(rows) == 3 * 601
        minima = []
        for i, x in enumerate([2.0, 4.14, 8.0]):
            curve = rows[i * 601:(i + 1) * 601]
            assert curve[0].ratio == 1.0
            k1 = kappa_curve(1, x, neon1)
            crossing = next(ev.kappa for ev in curve if ev.ratio < 0)
            assert crossing - k1 <= 0.01 + 1e-12
            minima.append(min(ev.ratio for ev in curve))
        assert minima[0] > minima[1] > minima[2]

    def test_empty(self, neon1):
        assert gain_vs_kappa_sweep(neon1, [], Range(0.0, 1.0, 5)) == []

    def test_degenerate_kappa(self, neon1):
        with pytest.raises(InvariantError):
            gain_vs_kappa_sweep(neon1, [2.0], Range(0.0, 0.0, 5))

    def test_affine_in_x(self, neon1):
        xs = [0.5, 3.0, 11.0]
        rows = gain_vs_kappa_sweep(neon1, xs, Range(0.0, 6.0, 13))
        for j in range(13):
            a, b, c = (rows[i * 13 + j].ratio for i in range(3))
            slope = (b - a) / (xs[1] - xs[0])
            assert c == pytest.approx(a + slope * (xs[2] - xs[0]), rel=1e-12, abs=1e-14)


def _check_boundaries(grid, r):
    """First non-I row per column sits within one step of kappa_1, etc."""
    crit = critical_x(r)
    ks = grid.kappas
    step = ks[1] - ks[0]
    for j, x in enumerate(grid.xs):
        column = [grid.labels[i][j] for i in range(len(ks))]
        for a, b in zip(column, column[1:]):
            assert 0 <= b.index - a.index <= 1, (x, a, b)
        for which in (1, 2, 3):
            try:
                k = crit.kappa(which, x)
            except Exception:
                continue
            first = next((ks[i] for i, lab in enumerate(column) if lab.index > which), None)
            if k < ks[-1] - step:
                assert first is not None and 0 < first - k <= step


class TestRegionMap:
    def test_neon(self, neon1):
        grid = region_map(neon1, Range(0.5, 8.0, 200), Range(0.0, 6.0, 200))
        assert grid.present() == {RegionLabel.I, RegionLabel.II, RegionLabel.III}
        _check_boundaries(grid, neon1)

    def test_r_iv(self, r_iv):
        grid = region_map(r_iv, Range(1.0, 3.0, 200), Range(0.0, 6.0, 200))
        assert grid.present() == set(RegionLabel)
        _check_boundaries(grid, r_iv)

    def test_below_x1(self, neon1):
        grid = region_map(neon1, Range(0.1, 1.19, 50), Range(0.0, 100.0, 50))
        assert grid.present() == {RegionLabel.I}

    def test_nonpositive_x(self, neon1):
        with pytest.raises(DomainError):
            region_map(neon1, Range(-1.0, 2.0, 10), Range(0.0, 1.0, 10))

    def test_rows_match_labels(self, r_iv):
        grid = region_map(r_iv, Range(1.0, 3.0, 7), Range(0.0, 6.0, 5))
        rows = grid.rows()
        assert len(rows) == 35
        assert rows[8].region == grid.labels[1][1]
        assert rows[8].x == grid.xs[1] and rows[8].kappa == pytest.approx(grid.kappas[1])

    def test_speed(self, neon1):
        t = time.perf_counter()
        region_map(neon1, Range(0.5, 8.0, 200), Range(0.0, 6.0, 200))
        assert time.perf_counter() - t < 1.0


class TestSerialization:
    @pytest.fixture
    def rows(self, r_iv):
        evs = gain_vs_kappa_sweep(r_iv, [0.0, 1.5, 2.0, -1.0], Range(0.0, 6.0, 7))
        return [evaluation_row(ev) for ev in evs]

    @pytest.mark.parametrize("fmt,parse", [("csv", parse_csv), ("json", parse_json)])
    def test_roundtrip(self, rows, fmt, parse):
        text = emit(rows, fmt)
        again = emit(parse(text), fmt)
        assert again == text

    def test_csv_header_and_precision(self, rows):
        text = emit(rows, "csv")
        lines = text.splitlines()
        assert lines[0] == ",".join(COLUMNS)
        parsed = parse_csv(text)
        assert [p["ratio"] for p in parsed] == [r["ratio"] for r in rows]

    def test_json_key_order(self, rows):
        import json

        data = json.loads(emit(rows, "json"))
        assert list(data[0]) == list(COLUMNS)

    def test_no_region_for_nonpositive_x(self, rows):
        assert rows[0]["region"] is None  # x = 0
        assert rows[-1]["region"] is None  # x < 0

    def test_gnuplot(self):
        assert "plot 'out.csv'" in gnuplot_script("out.csv", "map")
        assert "plot 'out.csv'" in gnuplot_script("out.csv", "sweep")
