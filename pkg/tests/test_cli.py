import subprocess
import sys
import time

import numpy as np
import pytest

from tricache import brute_lcc, parse_edge_list, preprocess, write_csr
from tricache.cli import EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main
from tricache.engine import CSV_HEADER
from tricache.experiments import SWEEP_HEADER

TRIANGLE_PLUS = "0 1\n1 2\n0 2\n2 3\n3 4\n2 4\n0 4\n"


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text(TRIANGLE_PLUS)
    return str(path)


def read_scores(path):
    out = {}
    for line in open(path):
        vid, score = line.split()
        out[int(vid)] = float(score)
    return out


class TestGenRmat:
    def test_generates_parseable_output(self, tmp_path):
        out = tmp_path / "rmat.txt"
        assert main(["gen-rmat", "--scale", "6", "--ef", "4",
                     "--seed", "3", "-o", str(out)]) == EXIT_OK
        el = parse_edge_list(open(out), directed=False)
        assert len(el.edges) == 4 * 64
        assert el.edges.max() < 64

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        args = ["gen-rmat", "--scale", "5", "--ef", "2", "--seed", "9"]
        main(args + ["-o", str(a)])
        main(args + ["-o", str(b)])
        assert a.read_text() == b.read_text()

    def test_bad_probabilities(self, tmp_path):
        rc = main(["gen-rmat", "--scale", "4", "--ef", "2", "--a", "0.9",
                   "-o", str(tmp_path / "x.txt")])
        assert rc == EXIT_USAGE


class TestRun:
    def test_lcc_scores_match_oracle(self, graph_file, tmp_path):
        scores_path = tmp_path / "scores.txt"
        stats_path = tmp_path / "stats.csv"
        rc = main(["run", graph_file, "--p", "2",
                   "-o", str(scores_path), "--stats-csv", str(stats_path)])
        assert rc == EXIT_OK
        ref = brute_lcc(parse_edge_list(TRIANGLE_PLUS, directed=False))
        got = read_scores(scores_path)
        assert set(got) == {0, 1, 2, 3, 4}
        for vid, score in got.items():
            assert score == pytest.approx(ref.lcc[vid], abs=1e-12)
        lines = stats_path.read_text().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3

    def test_tc_output(self, graph_file, capsys):
        assert main(["run", graph_file, "--mode", "tc", "--p", "2"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "raw 9 triangles 3" in out

    def test_tc_directed_is_usage_error(self, graph_file, capsys):
        rc = main(["run", graph_file, "--mode", "tc", "--directed"])
        assert rc == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_missing_input(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.txt")]) == EXIT_USAGE

    def test_binary_csr_input(self, graph_file, tmp_path):
        g, _ = preprocess(parse_edge_list(TRIANGLE_PLUS, directed=False))
        bin_path = tmp_path / "g.csr"
        with open(bin_path, "wb") as f:
            write_csr(g, f)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert main(["run", str(bin_path), "-o", str(a)]) == EXIT_OK
        assert main(["run", graph_file, "-o", str(b)]) == EXIT_OK
        assert read_scores(a) == read_scores(b)

    def test_cache_total_split_runs(self, graph_file, tmp_path):
        scores = tmp_path / "s.txt"
        rc = main(["run", graph_file, "--p", "2", "--cache-total", "4096",
                   "--policy", "lru", "-o", str(scores)])
        assert rc == EXIT_OK
        assert len(read_scores(scores)) == 5

    def test_relabel_preserves_scores(self, graph_file, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        main(["run", graph_file, "-o", str(a)])
        main(["run", graph_file, "--relabel", "--seed", "5", "-o", str(b)])
        assert read_scores(a) == read_scores(b)


class TestSweep:
    def test_csv_shape(self, graph_file, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", graph_file, "--p", "2", "--sizes", "0.5,256",
                   "--policies", "lru,degree", "-o", str(out)])
        assert rc == EXIT_OK
        lines = out.read_text().strip().split("\n")
        assert lines[0] == SWEEP_HEADER
        # 2 sizes x 2 policies x 2 windows data rows + 2 baseline rows.
        assert len(lines) == 1 + 8 + 2
        baselines = [l for l in lines if "compulsory-baseline" in l]
        assert len(baselines) == 2

    def test_stdout_default(self, graph_file, capsys):
        assert main(["sweep", graph_file, "--p", "2", "--sizes", "128",
                     "--window", "adjacency"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith(SWEEP_HEADER)

    def test_bad_size(self, graph_file):
        assert main(["sweep", graph_file, "--sizes", "-1"]) == EXIT_USAGE


class TestCompare:
    def test_match(self, graph_file, capsys):
        rc = main(["compare", graph_file, "--p", "2",
                   "--cache-adj-bytes", "256"])
        assert rc == EXIT_OK
        assert "max_abs_deviation" in capsys.readouterr().out

    def test_injected_fault_is_detected(self, graph_file, monkeypatch, capsys):
        from tricache import cli, oracle

        real = oracle.brute_lcc

        def corrupted(el):
            r = real(el)
            r.lcc[0] += 0.25
            return r

        monkeypatch.setattr(cli.oracle, "brute_lcc", corrupted)
        rc = main(["compare", graph_file])
        assert rc == EXIT_MISMATCH
        out = capsys.readouterr().out
        assert "first_mismatch_vertex 0" in out


class TestTcpServe:
    def test_serve_and_remote_run(self, graph_file, tmp_path):
        proc = subprocess.Popen(
            [sys.executable, "-m", "tricache.cli", "tcp-serve", graph_file,
             "--p", "2", "--bind", "127.0.0.1:0"],
            stdout=subprocess.PIPE, text=True)
        try:
            line = proc.stdout.readline()
            assert line.startswith("serving 2 partitions")
            addr = line.strip().rsplit(" ", 1)[-1]
            peers = f"{addr},{addr}"
            a, b = tmp_path / "a.txt", tmp_path / "b.txt"
            assert main(["run", graph_file, "--p", "2", "--backend", "tcp",
                         "--peers", peers, "-o", str(a)]) == EXIT_OK
            assert main(["run", graph_file, "--p", "2", "-o", str(b)]) == EXIT_OK
            assert read_scores(a) == read_scores(b)
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_self_hosted_tcp_backend(self, graph_file, tmp_path):
        scores = tmp_path / "s.txt"
        rc = main(["run", graph_file, "--p", "2", "--backend", "tcp",
                   "-o", str(scores)])
        assert rc == EXIT_OK
        assert len(read_scores(scores)) == 5

    def test_peers_without_tcp_backend(self, graph_file):
        rc = main(["run", graph_file, "--peers", "127.0.0.1:9"])
        assert rc == EXIT_USAGE
