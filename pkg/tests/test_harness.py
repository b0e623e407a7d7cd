import numpy as np
import pytest

from lowrank import linalg
from lowrank.harness import (
    CSV_HEADER,
    PhaseGridSpec,
    TrialRecord,
    admissible_ranks,
    derive_seed,
    logo_fixture,
    random_impulse_response,
    read_matrix_text,
    read_pgm,
    read_records,
    run_hankel_demo,
    run_image_recovery,
    run_phase_grid,
    run_trial,
    write_matrix_text,
    write_records,
)
from lowrank.measurement import hankel_matrix


class TestAdmissibleRanks:
    def test_cutoff(self):
        # r(2n - r) <= p
        assert admissible_ranks(10, 100) == list(range(1, 11))
        assert admissible_ranks(10, 84) == [1, 2, 3, 4, 5, 6]
        assert admissible_ranks(10, 19) == [1]
        assert admissible_ranks(10, 18) == []

    def test_run_trial_rejects_infeasible_cell(self):
        with pytest.raises(ValueError):
            run_trial(10, 20, 2, seed=0)


class TestRunTrial:
    def test_full_measurements_always_recover(self):
        rec = run_trial(6, 36, 3, seed=derive_seed(0, 6, 36, 3, 0))
        assert rec.success
        assert rec.rel_error < 1e-3

    def test_reproducible_from_seed(self):
        seed = derive_seed(5, 8, 40, 1, 2)
        a = run_trial(8, 40, 1, seed)
        b = run_trial(8, 40, 1, seed)
        assert a.rel_error == b.rel_error
        assert a.status == b.status

    def test_generous_oversampling_recovers(self):
        # 4x the degrees of freedom r(2n - r)
        rec = run_trial(10, 76, 1, seed=derive_seed(1, 10, 76, 1, 0))
        assert rec.success


class TestCsvRoundTrip:
    def test_roundtrip_exact(self, tmp_path):
        records = [
            TrialRecord(6, 20, 1, 0, 123, 0.1 / 3, False, "max_iters", 0.25),
            TrialRecord(6, 36, 2, 1, 456, 1e-9, True, "converged", 1.5),
        ]
        path = tmp_path / "grid.csv"
        write_records(path, records)
        back = read_records(path)
        assert back == sorted(records, key=TrialRecord.key)

    def test_header_is_exact(self, tmp_path):
        path = tmp_path / "grid.csv"
        write_records(path, [])
        assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("n,p,r\n1,2,3\n")
        with pytest.raises(ValueError, match="missing"):
            read_records(path)


class TestPhaseGrid:
    def test_empty_p_values(self):
        res = run_phase_grid(PhaseGridSpec(n=6, p_values=[]))
        assert res.records == []

    def test_small_grid_rates_and_resume(self, tmp_path):
        path = tmp_path / "grid.csv"
        spec = PhaseGridSpec(n=6, p_values=[20, 36], trials_per_cell=2,
                             base_seed=3)
        first = run_phase_grid(spec, csv_path=path)
        text1 = path.read_text()
        again = run_phase_grid(spec, csv_path=path)
        assert path.read_text() == text1
        assert len(first.records) == len(again.records)
        rates = first.rates
        assert all(0.0 <= v <= 1.0 for v in rates.values())
        # p = n^2 fully determines the matrix
        assert rates[(36, 1)] == 1.0

    def test_partial_csv_is_completed(self, tmp_path):
        path = tmp_path / "grid.csv"
        spec = PhaseGridSpec(n=6, p_values=[36], trials_per_cell=2,
                             base_seed=4)
        full = run_phase_grid(spec, csv_path=path)
        # drop half the records and rerun; everything except wall time must
        # come back identical (timing is the one nondeterministic field)
        partial = full.records[::2]
        write_records(path, partial)
        redone = run_phase_grid(spec, csv_path=path)
        for a, b in zip(full.records, redone.records):
            assert (a.key(), a.seed, a.rel_error, a.success, a.status) == \
                (b.key(), b.seed, b.rel_error, b.success, b.status)


class TestLogoFixture:
    def test_shape_rank_and_values(self):
        img = logo_fixture()
        assert img.shape == (46, 81)
        assert linalg.numeric_rank(img, 1e-9) == 5
        assert set(np.unique(img)) == {0.0, 0.5, 1.0}
        assert len({tuple(row) for row in img}) == 5


class TestImageRecovery:
    def test_full_identity_measurements_exact(self):
        rng = np.random.default_rng(0)
        img = rng.normal(size=(4, 5))
        from lowrank.measurement import identity_vec_op
        from lowrank.solvers import solve_alm
        op = identity_vec_op(4, 5)
        res = solve_alm(op, op.apply(img), seed=0)
        assert np.linalg.norm(res.x - img) / np.linalg.norm(img) < 1e-6

    def test_curve_entries(self):
        rng = np.random.default_rng(1)
        img = rng.normal(size=(6, 1)) @ rng.normal(size=(1, 6))
        curve = run_image_recovery(img, [30, 36], seed=2)
        assert [p for p, _ in curve] == [30, 36]
        assert curve[1][1] < 1e-3


class TestHankelDemo:
    def test_order_two_ground_truth_rank(self):
        h = random_impulse_response(2, 17, seed=3)
        assert linalg.numeric_rank(hankel_matrix(h), 1e-6) == 2

    def test_first_order_recovery(self):
        report = run_hankel_demo(1, 8, 6, seed=4)
        assert report["true_hankel_rank"] == 1
        assert report["recovered_rank"] == 1
        assert report["impulse_rel_error"] < 1e-3

    def test_order_exceeds_horizon(self):
        with pytest.raises(ValueError):
            run_hankel_demo(5, 3, 4)


class TestMatrixIo:
    def test_text_roundtrip(self, tmp_path):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(3, 4))
        path = tmp_path / "m.txt"
        write_matrix_text(path, x)
        assert np.array_equal(read_matrix_text(path), x)

    def test_text_bad_count(self, tmp_path):
        path = tmp_path / "m.txt"
        path.write_text("2 2\n1.0 2.0 3.0\n")
        with pytest.raises(ValueError):
            read_matrix_text(path)

    def test_pgm_ascii_and_binary(self, tmp_path):
        pix = np.array([[0, 128], [255, 64]], dtype=np.uint8)
        p2 = tmp_path / "a.pgm"
        p2.write_text("P2\n# comment\n2 2\n255\n0 128 255 64\n")
        a = read_pgm(p2)
        p5 = tmp_path / "b.pgm"
        p5.write_bytes(b"P5\n2 2\n255\n" + pix.tobytes())
        b = read_pgm(p5)
        assert np.allclose(a, b)
        assert a.max() == 1.0 and a.min() == 0.0

    def test_pgm_bad_magic(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P6\n1 1\n255\nxxx")
        with pytest.raises(ValueError):
            read_pgm(path)
