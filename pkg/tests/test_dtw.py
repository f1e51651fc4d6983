import numpy as np
import pytest
from hypothesis import given, settings

from oracles import dtw_enumerate_best
from strategies import attention_instances
from wordstamps.dtw import (
    AttentionMatrix,
    DtwPath,
    boundaries_to_transcript,
    dtw_align,
    path_to_boundaries,
    validate_dtw_path,
)
from wordstamps.errors import InvariantViolation, LengthMismatch, RowOutOfRange
from wordstamps.types import TimedWord


def path_cost(weights: np.ndarray, path: DtwPath) -> float:
    total = 0.0
    for i, j in path.steps:
        total += -float(weights[i, j])
    return total


class TestAttentionMatrix:
    def test_rejects_negative(self):
        with pytest.raises(InvariantViolation):
            AttentionMatrix(np.array([[0.5, -0.1]]))

    def test_rejects_non_finite(self):
        with pytest.raises(InvariantViolation):
            AttentionMatrix(np.array([[np.nan, 0.1]]))

    def test_rejects_empty(self):
        with pytest.raises(InvariantViolation):
            AttentionMatrix(np.zeros((0, 3)))


class TestDtwAlign:
    def test_single_cell(self):
        assert dtw_align(AttentionMatrix(np.ones((1, 1)))).steps == [(0, 0)]

    def test_identity_matrix_walks_the_diagonal(self):
        path = dtw_align(AttentionMatrix(np.eye(3)))
        assert path.steps == [(0, 0), (1, 1), (2, 2)]

    def test_single_row_sweeps_columns(self):
        path = dtw_align(AttentionMatrix(np.ones((1, 4))))
        assert path.steps == [(0, 0), (0, 1), (0, 2), (0, 3)]

    def test_tie_rule_matches_oracle_on_uniform_weights(self):
        for n, t in ((2, 2), (3, 2), (2, 4), (3, 3)):
            weights = [[0.5] * t for _ in range(n)]
            _, cells = dtw_enumerate_best(weights)
            assert dtw_align(AttentionMatrix(np.array(weights))).steps == cells

    def test_renormalize_rows_still_valid(self):
        rng = np.random.default_rng(3)
        a = AttentionMatrix(rng.uniform(0, 1, size=(4, 7)))
        validate_dtw_path(dtw_align(a, renormalize_rows=True), 4, 7)


@settings(max_examples=250)
@given(attention_instances())
def test_dtw_matches_enumeration(rows):
    weights = np.array(rows)
    expected_cost, expected_cells = dtw_enumerate_best(rows)
    path = dtw_align(AttentionMatrix(weights))
    assert path.steps == expected_cells
    assert path_cost(weights, path) == expected_cost


@settings(max_examples=200)
@given(attention_instances())
def test_path_validity_and_scaling_invariance(rows):
    weights = np.array(rows)
    path = dtw_align(AttentionMatrix(weights))
    validate_dtw_path(path, weights.shape[0], weights.shape[1])
    # positive power-of-two scaling is exact, so the tie structure survives
    for factor in (0.5, 2.0, 8.0):
        assert dtw_align(AttentionMatrix(weights * factor)).steps == path.steps


class TestBoundaries:
    def test_diagonal_boundaries(self):
        path = DtwPath([(0, 0), (1, 1), (2, 2)])
        # 80 ms columns map one-to-one onto frames
        assert path_to_boundaries(path, [0, 2], attention_frame_s=0.08) == [0, 2]

    def test_single_word_ends_at_last_column(self):
        path = dtw_align(AttentionMatrix(np.ones((2, 5))))
        assert path_to_boundaries(path, [1], attention_frame_s=0.08) == [4]

    def test_rebuckets_encoder_columns(self):
        path = DtwPath([(0, j) for j in range(11)])
        # column 10 at 20 ms = 0.2 s -> frame 2
        assert path_to_boundaries(path, [0], attention_frame_s=0.02) == [2]

    def test_row_out_of_range(self):
        path = DtwPath([(0, 0), (1, 1)])
        with pytest.raises(RowOutOfRange):
            path_to_boundaries(path, [5])
        with pytest.raises(RowOutOfRange):
            path_to_boundaries(path, [1, 1])

    def test_boundaries_monotone_on_random_paths(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            n, t = rng.integers(1, 6), rng.integers(1, 8)
            a = AttentionMatrix(rng.uniform(0, 1, size=(n, t)))
            bounds = path_to_boundaries(
                dtw_align(a), list(range(n)), attention_frame_s=0.08
            )
            assert all(b <= c for b, c in zip(bounds, bounds[1:]))


class TestBoundariesToTranscript:
    def test_shared_boundary_convention(self):
        transcript = boundaries_to_transcript(["a", "b"], [5, 9])
        assert transcript.words == [TimedWord("a", 0, 5), TimedWord("b", 5, 9)]

    def test_single_word(self):
        transcript = boundaries_to_transcript(["w"], [7])
        assert transcript.words == [TimedWord("w", 0, 7)]

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            boundaries_to_transcript(["a", "b"], [5])

    def test_result_is_monotone_asr(self):
        transcript = boundaries_to_transcript(["a", "b", "c"], [2, 2, 7])
        transcript.validate()
