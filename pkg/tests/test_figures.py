import numpy as np

from subsimplex.figures import save_loading_bars, save_score_matrix


def test_score_matrix_file_and_determinism(tmp_path):
    rng = np.random.default_rng(1)
    scores = rng.normal(size=(30, 3))
    groups = tuple(str(1 + k // 10) for k in range(30))
    first = tmp_path / "a.png"
    second = tmp_path / "b.png"
    save_score_matrix(scores, ["rank 1", "rank 2", "rank 3"], first,
                      groups=groups)
    save_score_matrix(scores, ["rank 1", "rank 2", "rank 3"], second,
                      groups=groups)
    assert first.stat().st_size > 0
    assert first.read_bytes() == second.read_bytes()


def test_score_matrix_truncates_to_leading_modes(tmp_path):
    rng = np.random.default_rng(2)
    scores = rng.normal(size=(12, 7))
    path = tmp_path / "many.png"
    save_score_matrix(scores, [f"m{k}" for k in range(7)], path)
    assert path.stat().st_size > 0


def test_score_matrix_single_mode(tmp_path):
    rng = np.random.default_rng(3)
    path = tmp_path / "one.png"
    save_score_matrix(rng.normal(size=(8, 1)), ["rank 1"], path)
    assert path.stat().st_size > 0


def test_loading_bars_file_and_determinism(tmp_path):
    rng = np.random.default_rng(4)
    loadings = rng.normal(size=(2, 5))
    parts = [f"V{k + 1}" for k in range(5)]
    first = tmp_path / "a.png"
    second = tmp_path / "b.png"
    save_loading_bars(loadings, parts, ["rank 1", "rank 2"], first)
    save_loading_bars(loadings, parts, ["rank 1", "rank 2"], second)
    assert first.stat().st_size > 0
    assert first.read_bytes() == second.read_bytes()


def test_loading_bars_keeps_strongest_parts(tmp_path):
    rng = np.random.default_rng(5)
    loadings = rng.normal(size=(1, 30))
    parts = [f"part{k}" for k in range(30)]
    path = tmp_path / "wide.png"
    save_loading_bars(loadings, parts, ["rank 1"], path)
    assert path.stat().st_size > 0
