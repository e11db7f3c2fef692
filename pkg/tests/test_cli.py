import numpy as np
import pytest

from goodlattice.cli import main
from goodlattice.lattice import GeneratingVector, generate_points
from goodlattice.merit import p_alpha_exact


def run(argv):
    return main(argv)


def read_data_lines(path):
    with open(path) as fh:
        return [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]


class TestSearchCommand:
    def test_rows_ascending_and_idempotent(self, tmp_path):
        out = tmp_path / "table.csv"
        argv = ["search", "--n", "55,13", "--s", "2", "--alpha", "2",
                "--out", str(out), "--workers", "1"]
        assert run(argv) == 0
        first = out.read_bytes()
        lines = read_data_lines(out)
        assert lines[0] == "s,n,z1,z2,alpha,p_alpha"
        ns = [int(ln.split(",")[1]) for ln in lines[1:]]
        assert ns == [13, 55]
        assert run(argv) == 0
        assert out.read_bytes() == first

    def test_append_merges_new_rows(self, tmp_path):
        out = tmp_path / "table.csv"
        assert run(["search", "--n", "13", "--out", str(out)]) == 0
        assert run(["search", "--n", "21", "--out", str(out)]) == 0
        lines = read_data_lines(out)
        assert [int(ln.split(",")[1]) for ln in lines[1:]] == [13, 21]

    def test_merit_column_matches_library(self, tmp_path):
        out = tmp_path / "table.csv"
        assert run(["search", "--n", "89", "--out", str(out)]) == 0
        row = read_data_lines(out)[1].split(",")
        gv = GeneratingVector(int(row[1]), (int(row[2]), int(row[3])))
        assert float(row[5]) == p_alpha_exact(gv, 2).p_alpha

    def test_table_reads_back(self, tmp_path):
        from goodlattice.merit import read_generator_table

        out = tmp_path / "table.csv"
        assert run(["search", "--n", "13,55", "--out", str(out)]) == 0
        entries = read_generator_table(out)
        assert [mv.gv.n for mv in entries] == [13, 55]
        for mv in entries:
            assert mv.p_alpha == p_alpha_exact(mv.gv, 2).p_alpha
            assert mv.gv.z[0] == 1


class TestPointsCommand:
    def test_row_count_and_header(self, tmp_path, capsys):
        out = tmp_path / "pts.csv"
        assert run(["points", "--kind", "glt", "--n", "144", "--s", "2",
                    "--seed", "7", "--out", str(out)]) == 0
        lines = read_data_lines(out)
        assert lines[0] == "x1,x2"
        assert len(lines) == 1 + 144
        header = [ln for ln in out.read_text().splitlines() if ln.startswith("#")]
        assert any("kind=glt" in ln and "seed=7" in ln for ln in header)

    def test_zero_shift_matches_lattice(self, tmp_path):
        out = tmp_path / "pts.csv"
        assert run(["points", "--kind", "glt", "--n", "55", "--z", "1,34",
                    "--shift", "0,0", "--out", str(out)]) == 0
        got = np.array([[float(v) for v in ln.split(",")]
                        for ln in read_data_lines(out)[1:]])
        expected = generate_points(GeneratingVector(55, (1, 34))).points
        assert np.array_equal(got, expected)

    def test_rerun_byte_identical(self, tmp_path):
        out = tmp_path / "pts.csv"
        argv = ["points", "--kind", "lhs", "--n", "20", "--s", "3",
                "--seed", "3", "--out", str(out)]
        assert run(argv) == 0
        first = out.read_bytes()
        assert run(argv) == 0
        assert out.read_bytes() == first

    def test_sobol_skip_origin_flag(self, tmp_path):
        out = tmp_path / "pts.csv"
        assert run(["points", "--kind", "sobol", "--n", "4", "--s", "2",
                    "--skip-origin", "--out", str(out)]) == 0
        rows = read_data_lines(out)[1:]
        assert "0.0,0.0" not in rows


class TestMeritCommand:
    def test_stdout_row(self, capsys):
        assert run(["merit", "--n", "144", "--z", "1,89", "--alpha", "2"]) == 0
        outerr = capsys.readouterr()
        lines = [ln for ln in outerr.out.splitlines() if not ln.startswith("#")]
        assert lines[0] == "n,z1,z2,alpha,p_alpha"
        vals = lines[1].split(",")
        assert vals[:4] == ["144", "1", "89", "2.0"]
        gv = GeneratingVector(144, (1, 89))
        assert float(vals[4]) == p_alpha_exact(gv, 2).p_alpha


class TestBenchCommand:
    def test_record_cardinality_and_summary(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert run(["bench", "--integrand", "prodlinear", "--kinds", "mc,glt",
                    "--schedule", "55,89", "--trials", "4", "--seed", "1",
                    "--out", str(out), "--workers", "1"]) == 0
        records = read_data_lines(out)
        assert records[0] == "integrand,kind,n,trial,seed,abs_error"
        assert len(records) == 1 + 2 * 2 * 4
        summary = read_data_lines(tmp_path / "bench_summary.csv")
        assert summary[0] == "integrand,kind,n,mean,std,max"
        assert len(summary) == 1 + 2 * 2

    def test_workers_do_not_change_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["bench", "--integrand", "korobov2", "--kinds", "mc,sobol",
                "--schedule", "64", "--trials", "3", "--seed", "5"]
        assert run(base + ["--out", str(a), "--workers", "1"]) == 0
        assert run(base + ["--out", str(b), "--workers", "4"]) == 0
        assert read_data_lines(a) == read_data_lines(b)

    def test_unknown_integrand_exit_code(self, tmp_path):
        assert run(["bench", "--integrand", "nope", "--out",
                    str(tmp_path / "x.csv")]) == 2


class TestPinnCommand:
    def test_rows_and_determinism(self, tmp_path):
        out = tmp_path / "pinn.csv"
        argv = ["pinn", "--s", "2", "--kind", "glt", "--n", "55", "--iters", "40",
                "--seeds", "1,2", "--checkpoint-every", "20", "--out", str(out),
                "--workers", "1"]
        assert run(argv) == 0
        lines = read_data_lines(out)
        assert lines[0] == "seed,kind,n,iter,loss,rel_error"
        assert len(lines) == 1 + 2 * 2  # two seeds, checkpoints at 20 and 40
        first = out.read_bytes()
        assert run(argv) == 0
        assert out.read_bytes() == first

    def test_worker_count_invariance(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["pinn", "--kind", "mc", "--n", "13", "--iters", "10",
                "--seeds", "1,2,3", "--checkpoint-every", "10"]
        assert run(base + ["--out", str(a), "--workers", "1"]) == 0
        assert run(base + ["--out", str(b), "--workers", "3"]) == 0
        assert read_data_lines(a) == read_data_lines(b)

    def test_bad_kind_is_error(self, tmp_path):
        assert run(["pinn", "--kind", "sobol", "--n", "60", "--iters", "5",
                    "--out", str(tmp_path / "x.csv")]) == 2


class TestFailureHygiene:
    def test_no_partial_file_on_error(self, tmp_path):
        out = tmp_path / "x.csv"
        # z component equal to n is invalid, so the command fails
        assert run(["merit", "--n", "144", "--z", "1,144", "--alpha", "2",
                    "--out", str(out)]) == 2
        assert not out.exists()

    def test_unknown_flag_rejected(self):
        with pytest.raises(SystemExit):
            main(["points", "--kind", "mc", "--n", "5", "--bogus", "1"])
