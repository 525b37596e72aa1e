"""Seed derivation, key=value files, and the complex cosine helper."""

import numpy as np
import pytest

from cfa1d.util import (
    ValidationError,
    complex_cosine,
    derive_seed,
    read_kv_file,
    rng_for,
    write_kv_file,
)


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(42, "split", 3) == derive_seed(42, "split", 3)

    def test_u64_range(self):
        for master in (0, 1, 42, 2**63, 2**64 - 1):
            for stream in ("split", "synth", "noise-spectra"):
                s = derive_seed(master, stream, 7)
                assert 0 <= s < 2**64

    def test_streams_decorrelated(self):
        """Streams off one master never collide, so sweeps cannot perturb splits."""
        seen = set()
        for stream in ("split", "synth", "noise-spectra"):
            for index in range(50):
                seen.add(derive_seed(42, stream, index))
        assert len(seen) == 3 * 50

    def test_master_changes_everything(self):
        a = [derive_seed(1, "split", i) for i in range(20)]
        b = [derive_seed(2, "split", i) for i in range(20)]
        assert not set(a) & set(b)

    def test_rng_for_reproducible_draws(self):
        x = rng_for(42, "split", 0).standard_normal(8)
        y = rng_for(42, "split", 0).standard_normal(8)
        assert np.array_equal(x, y)
        z = rng_for(42, "split", 1).standard_normal(8)
        assert not np.array_equal(x, z)


class TestKvFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "cfg.txt"
        write_kv_file(path, {"m": 3, "delta": "3.0", "warp": "none"})
        assert read_kv_file(path) == {"m": "3", "delta": "3.0", "warp": "none"}

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("# a comment\n\nm=3\n  reps = 20 \n")
        assert read_kv_file(path) == {"m": "3", "reps": "20"}

    def test_malformed_line_raises(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("just words\n")
        with pytest.raises(ValidationError):
            read_kv_file(path)


class TestComplexCosine:
    def test_parallel_is_one(self):
        v = np.array([1 + 2j, -3j, 0.5])
        assert complex_cosine(v, 2.5 * v) == pytest.approx(1.0, abs=1e-12)

    def test_phase_invariant(self):
        """A global e^{i theta} factor does not change alignment."""
        rng = np.random.default_rng(0)
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        w = np.exp(1.234j) * v
        assert complex_cosine(v, w) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_is_zero(self):
        assert complex_cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_zero_vector_is_zero(self):
        assert complex_cosine(np.zeros(3), np.ones(3)) == 0.0
