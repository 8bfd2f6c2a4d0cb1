import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetamoments.errors import ParseError, ValidationError
from zetamoments.harness import MomentReport
from zetamoments.io_cli import (CSV_HEADER, EXIT_ACCURACY, EXIT_USAGE, EXIT_VALIDATION, ingest_zeros, main,
                                parse_zeros, read_config, read_reports, reports_to_csv, write_zeros)
from zetamoments.zeta_engine import ZeroTable, find_zeros


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def zero_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("z") / "zeros.txt"
    write_zeros(find_zeros(600.0), path)
    return path


class TestZeroFiles:
    def test_round_trip(self, zero_file):
        t = ingest_zeros(zero_file)
        again = find_zeros(600.0)
        assert np.array_equal(t.ordinates, again.ordinates)
        assert t.t_max == 600.0 and t.source == "ingested"

    def test_headerless_two_column(self, tmp_path):
        g = find_zeros(60.0).ordinates
        p = tmp_path / "z.txt"
        p.write_text("".join(f"{i + 1} {x:.12f}\n" for i, x in enumerate(g)))
        t = ingest_zeros(p)
        assert t.ordinates[0] == pytest.approx(14.134725141734693, abs=1e-11)

    def test_parse_error_line(self):
        with pytest.raises(ParseError) as exc:
            parse_zeros(["# c", "14.1347", "21.02x"])
        assert "3" in str(exc.value)

    def test_unsorted(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("21.022039638771555\n14.134725141734693\n")
        with pytest.raises(ValidationError):
            ingest_zeros(p)

    def test_missing_zero_is_caught(self, tmp_path):
        g = find_zeros(100.0).ordinates
        p = tmp_path / "z.txt"
        p.write_text("".join(f"{x!r}\n" for x in np.delete(g, 5)))
        with pytest.raises(ValidationError):
            ingest_zeros(p)

    def test_empty(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("# nothing\n")
        with pytest.raises(ValidationError):
            ingest_zeros(p)


class TestReports:
    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.floats(10, 1e6), st.floats(2, 100), st.floats(-1.4, 3),
                              st.floats(1e-300, 1e300), st.floats(1e-300, 1e300), st.integers(0, 10**7)),
                    max_size=5))
    def test_round_trip_exact(self, rows):
        reps = [MomentReport(T, X, k, "jk", e, p, n) for T, X, k, e, p, n in rows]
        back = read_reports(io.StringIO(reports_to_csv(reps)))
        assert back == reps

    def test_header(self):
        assert reports_to_csv([]).strip() == ",".join(CSV_HEADER)
        with pytest.raises(ParseError):
            read_reports(io.StringIO("a,b\n"))

    def test_config(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("# comment\nt-grid = 100,200\nx=12 # inline\n")
        assert read_config(p) == {"t_grid": "100,200", "x": "12"}
        p.write_text("novalue\n")
        with pytest.raises(ParseError):
            read_config(p)


class TestCli:
    def test_ak(self):
        code, out, _ = run("ak", "--k", "1")
        assert code == 0 and out.startswith("1.0000000000")

    def test_rmt_exact(self):
        code, out, _ = run("rmt", "exact", "--n", "6", "--k", "1")
        assert code == 0 and float(out) == pytest.approx(98 / 3, rel=1e-12)

    def test_rmt_mc(self):
        code, out, _ = run("rmt", "mc", "--n", "3", "--k", "1", "--samples", "2000", "--seed", "1")
        mean, se = float(out.split()[0]), float(out.split()[2])
        assert code == 0 and abs(mean - 16 * 5 / 12) < 5 * se

    def test_predict(self):
        code, out, _ = run("predict", "i4", "--t", "1000", "--m", "2", "--n", "4")
        assert code == 1
        code, out, _ = run("predict", "conj3", "--t", "1000", "--k", "1")
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("argv", [["bogus"], ["moments", "jk", "--x", "10", "--x-rule", "1.5"],
                                      ["moments", "jk"], ["rmt", "exact", "--n", "3", "--k", "1,2"],
                                      ["moments", "jk", "--x", "10", "--threads", "zero"]])
    def test_usage_errors(self, argv):
        assert run(*argv)[0] == EXIT_USAGE

    def test_validation_exit(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("14.1\nabc\n")
        code, _, err = run("zeros", "ingest", "--in", str(p))
        assert code == EXIT_VALIDATION and "line 2" in err

    def test_accuracy_exit(self, zero_file, monkeypatch):
        from zetamoments import harness

        def fake(zeros, config, n):
            v = np.ones(n, dtype=complex)
            v[0] = 0.0
            return v
        monkeypatch.setattr(harness, "zeta_prime_values", fake)
        code, _, err = run("moments", "jk", "--k", "-1", "--t-grid", "500", "--x", "10", "--zeros", str(zero_file))
        assert code == EXIT_ACCURACY and "14.134725" in err

    def test_moments_csv(self, zero_file):
        code, out, _ = run("moments", "ratio2", "--t-grid", "300,500", "--x", "10", "--zeros", str(zero_file))
        reps = read_reports(io.StringIO(out))
        assert code == 0 and [r.T for r in reps] == [300.0, 500.0]

    def test_deterministic_csv_across_threads(self, zero_file, tmp_path):
        args = ["moments", "split", "--k", "0.5,1", "--t-grid", "400,550", "--x", "12", "--zeros", str(zero_file),
                "--deterministic"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(*args, "--out", str(a), "--threads", "1")[0] == 0
        assert run("--threads", "8", *args, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_precedence(self, zero_file, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(f"t_grid = 300\nx_rule = 1.5\nk = 2\n")
        code, out, _ = run("--config", str(cfg), "moments", "jk", "--k", "1", "--zeros", str(zero_file))
        (rep,) = read_reports(io.StringIO(out))
        assert code == 0 and rep.k == 1.0 and rep.T == 300.0
        assert rep.X == pytest.approx(np.log(300.0) ** 1.5)
        code, out, _ = run("--config", str(cfg), "moments", "jk", "--x", "7", "--zeros", str(zero_file))
        (rep,) = read_reports(io.StringIO(out))
        assert rep.X == 7.0 and rep.k == 2.0

    def test_zeros_compute(self, tmp_path):
        p = tmp_path / "z.txt"
        code, out, _ = run("zeros", "compute", "--t-max", "50", "--out", str(p))
        assert code == 0 and out.startswith("10 zeros")
        assert len(ingest_zeros(p)) == 10
