import numpy as np
import pytest

from qhdyn import (
    AmbiguousMatchError,
    BiorthogonalFrame,
    ComplexSpectrumError,
    ExceptionalPointError,
    HamiltonianModel,
    build_hamiltonian,
    eig_biorthogonal,
    track_continuity,
)
from qhdyn.schedules import ScheduleSpec


def assert_frame_relations(frame, H, atol=1e-10):
    n = frame.dimension
    np.testing.assert_allclose(frame.left_bras @ frame.right_kets, np.eye(n), atol=atol)
    np.testing.assert_allclose(frame.right_kets @ frame.left_bras, np.eye(n), atol=atol)
    for k in range(n):
        np.testing.assert_allclose(
            H @ frame.right_kets[:, k], frame.energies[k] * frame.right_kets[:, k], atol=1e-9
        )
        np.testing.assert_allclose(
            frame.left_bras[k] @ H, frame.energies[k] * frame.left_bras[k], atol=1e-9
        )


def test_hermitian_diagonal_gives_canonical_frame():
    H = np.diag([1.0, 2.0]).astype(complex)
    frame = eig_biorthogonal(H)
    np.testing.assert_allclose(frame.energies, [1.0, 2.0], atol=1e-14)
    np.testing.assert_allclose(frame.right_kets, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(frame.left_bras, np.eye(2), atol=1e-14)


def test_triangular_frame_by_substitution(hand_matrix):
    frame = eig_biorthogonal(hand_matrix)
    np.testing.assert_allclose(frame.energies, [1.0, 2.0], atol=1e-12)
    assert_frame_relations(frame, hand_matrix)
    # first eigenvector is canonical; the second is (1,1)/sqrt(2) in the
    # unit-norm, real-positive-pivot gauge
    np.testing.assert_allclose(frame.right_kets[:, 0], [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(frame.right_kets[:, 1], np.array([1.0, 1.0]) / np.sqrt(2), atol=1e-12)


def test_exceptional_point_raises():
    H = np.array([[1j, 1.0], [1.0, -1j]])
    with pytest.raises(ExceptionalPointError, match="overlap"):
        eig_biorthogonal(H)


def test_reality_policy_assert():
    H = np.array([[1.2j, 1.0], [1.0, -1.2j]])  # gamma > s: imaginary pair
    with pytest.raises(ComplexSpectrumError):
        eig_biorthogonal(H, reality_policy="assert")
    frame = eig_biorthogonal(H, reality_policy="report")
    assert not frame.spectrum_is_real


def test_reconstruction_roundtrip_random():
    rng = np.random.default_rng(11)
    for _ in range(20):
        H = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        frame = eig_biorthogonal(H)
        np.testing.assert_allclose(frame.reconstruct(), H, atol=1e-9)


def test_hermitian_left_equals_right_dagger():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    H = a + a.conj().T
    frame = eig_biorthogonal(H, reality_policy="assert")
    np.testing.assert_allclose(frame.left_bras, frame.right_kets.conj().T, atol=1e-10)


def test_completeness_for_families():
    models = [
        HamiltonianModel(2, "triangular2", {"e1": 1.0, "e2": 2.0, "c": 1.0}),
        HamiltonianModel(2, "pt2", {"gamma": 0.5, "s": 1.0}),
        HamiltonianModel(4, "similarity-rand", {"energies": [0.5, 1.0, 2.0, 3.5], "seed": 7}),
        HamiltonianModel(4, "cubic-trunc", {"g": 0.1}),
    ]
    for model in models:
        H = build_hamiltonian(model, 0.0)
        frame = eig_biorthogonal(H)
        assert_frame_relations(frame, H)


def test_track_identity():
    H = np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex)
    frame = eig_biorthogonal(H)
    tracked = track_continuity(frame, frame)
    np.testing.assert_array_equal(tracked.energies, frame.energies)
    np.testing.assert_allclose(tracked.right_kets, frame.right_kets, atol=1e-15)
    np.testing.assert_allclose(tracked.left_bras, frame.left_bras, atol=1e-15)


def test_track_undoes_index_swap(hand_matrix):
    frame = eig_biorthogonal(hand_matrix)
    swap = [1, 0]
    swapped = BiorthogonalFrame(
        t=frame.t,
        energies=frame.energies[swap],
        right_kets=frame.right_kets[:, swap],
        left_bras=frame.left_bras[swap, :],
        raw_overlaps=frame.raw_overlaps[swap],
    )
    tracked = track_continuity(frame, swapped)
    np.testing.assert_allclose(tracked.energies, frame.energies, atol=1e-14)
    np.testing.assert_allclose(tracked.right_kets, frame.right_kets, atol=1e-14)


def test_track_fixes_phases():
    H = np.array([[1.0, 1.0], [0.0, 2.0]], dtype=complex)
    frame = eig_biorthogonal(H)
    z = np.exp(0.7j)
    rotated = BiorthogonalFrame(
        t=frame.t,
        energies=frame.energies.copy(),
        right_kets=frame.right_kets * z,
        left_bras=frame.left_bras * np.conj(z),
        raw_overlaps=frame.raw_overlaps.copy(),
    )
    tracked = track_continuity(frame, rotated)
    for k in range(2):
        overlap = frame.left_bras[k] @ tracked.right_kets[:, k]
        assert overlap.real > 0
        assert abs(overlap.imag) < 1e-12


def _pt2_frames(gammas, dt=None):
    frames = []
    prev = None
    for k, gamma in enumerate(gammas):
        model = HamiltonianModel(
            2, "pt2", {"gamma": 0.0, "s": 1.0}, {"gamma": ScheduleSpec("constant", base=gamma)}
        )
        frame = eig_biorthogonal(build_hamiltonian(model, 0.0), t=float(k))
        if prev is not None:
            frame = track_continuity(prev, frame)
        frames.append(frame)
        prev = frame
    return frames


def test_pt2_sweep_tracks_two_branches():
    gammas = np.linspace(0.0, 0.9, 101)
    frames = _pt2_frames(gammas)
    lower = np.array([f.energies[0].real for f in frames])
    upper = np.array([f.energies[1].real for f in frames])
    roots = np.sqrt(1.0 - gammas**2)
    np.testing.assert_allclose(lower, -roots, atol=1e-10)
    np.testing.assert_allclose(upper, roots, atol=1e-10)


def test_refined_sweep_keeps_branch_assignment():
    coarse = np.linspace(0.0, 0.9, 51)
    fine = np.linspace(0.0, 0.9, 101)
    frames_coarse = _pt2_frames(coarse)
    frames_fine = _pt2_frames(fine)
    # the fine sweep visits every coarse gamma at even indices; branch
    # assignments must agree there
    for k, frame in enumerate(frames_coarse):
        np.testing.assert_allclose(frame.energies, frames_fine[2 * k].energies, atol=1e-12)


def test_ambiguous_match_rejected():
    # prev frame orthogonal to both candidates: overlaps equal in magnitude
    prev = BiorthogonalFrame(
        t=0.0,
        energies=np.array([1.0 + 0j, 2.0 + 0j]),
        right_kets=np.eye(2, dtype=complex),
        left_bras=np.eye(2, dtype=complex),
        raw_overlaps=np.array([1.0, 1.0]),
    )
    had = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    cur = BiorthogonalFrame(
        t=0.1,
        energies=np.array([1.0 + 0j, 2.0 + 0j]),
        right_kets=had.astype(complex),
        left_bras=had.astype(complex).T,
        raw_overlaps=np.array([1.0, 1.0]),
    )
    with pytest.raises(AmbiguousMatchError):
        track_continuity(prev, cur)


def test_validate_rejects_broken_frame(hand_frame):
    broken = BiorthogonalFrame(
        t=0.0,
        energies=hand_frame.energies,
        right_kets=hand_frame.right_kets,
        left_bras=hand_frame.left_bras * 1.5,
        raw_overlaps=hand_frame.raw_overlaps,
    )
    with pytest.raises(ExceptionalPointError):
        broken.validate()
