"""Tensor-core tests.

The partial-trace oracle here is an index-loop contraction written directly
from the definition (rho'_{i i'} = sum_k rho_{ik, i'k}), independent of the
einsum implementation under test.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from welcherweg import (
    CompositeState,
    DensityOperator,
    DimensionMismatch,
    InvalidSpec,
    NameCollision,
    SubsystemSpec,
    UnknownSubsystem,
    ZeroNorm,
    fix_global_phase,
    inner_product,
    normalize,
    partial_trace,
    project,
    purity,
    tensor,
)


def qubit(name, a0, a1, normalized=False):
    return CompositeState(
        (SubsystemSpec(name, 2),), np.array([a0, a1], dtype=complex), normalized=normalized
    )


def bell(name_a="A", name_b="B"):
    amps = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return CompositeState(
        (SubsystemSpec(name_a, 2), SubsystemSpec(name_b, 2)), amps, normalized=True
    )


def random_state(rng, dims, names):
    amps = rng.normal(size=np.prod(dims)) + 1j * rng.normal(size=np.prod(dims))
    amps /= np.linalg.norm(amps)
    subs = tuple(SubsystemSpec(n, d) for n, d in zip(names, dims))
    return CompositeState(subs, amps, normalized=True)


def loop_partial_trace(rho: DensityOperator, keep) -> np.ndarray:
    """Definition-level contraction: independent oracle for partial_trace."""
    dims = rho.dims
    names = rho.names
    keep = list(keep)
    keep_axes = [names.index(n) for n in keep]
    trace_axes = [i for i in range(len(names)) if names[i] not in keep]
    keep_dims = [dims[i] for i in keep_axes]
    full = rho.matrix.reshape(dims + dims)
    d_keep = int(np.prod(keep_dims))
    out = np.zeros((d_keep, d_keep), dtype=complex)
    for flat_i in range(d_keep):
        for flat_j in range(d_keep):
            multi_i = np.unravel_index(flat_i, keep_dims)
            multi_j = np.unravel_index(flat_j, keep_dims)
            total = 0.0 + 0.0j
            trace_dims = [dims[a] for a in trace_axes]
            for flat_k in range(int(np.prod(trace_dims, dtype=int))):
                multi_k = np.unravel_index(flat_k, trace_dims) if trace_dims else ()
                left = [0] * len(dims)
                right = [0] * len(dims)
                for axis, value in zip(keep_axes, multi_i):
                    left[axis] = value
                for axis, value in zip(keep_axes, multi_j):
                    right[axis] = value
                for axis, value in zip(trace_axes, multi_k):
                    left[axis] = value
                    right[axis] = value
                total += full[tuple(left) + tuple(right)]
            out[flat_i, flat_j] = total
    return out


class TestCompositeState:
    def test_row_major_layout(self):
        # amplitude of |i>|j> sits at index i*dim_b + j
        state = tensor(qubit("A", 1, 0), qubit("B", 0, 1))
        np.testing.assert_array_equal(state.amplitudes, [0, 1, 0, 0])

    def test_axis_view_matches_flat_order(self):
        rng = np.random.default_rng(7)
        state = random_state(rng, (2, 3), ("A", "B"))
        view = state.axis_view()
        assert view.shape == (2, 3)
        assert view[1, 2] == state.amplitudes[1 * 3 + 2]

    def test_duplicate_names_rejected(self):
        with pytest.raises(NameCollision):
            CompositeState(
                (SubsystemSpec("A", 2), SubsystemSpec("A", 2)),
                np.zeros(4, dtype=complex),
            )

    def test_normalized_flag_checked(self):
        with pytest.raises(InvalidSpec):
            CompositeState(
                (SubsystemSpec("A", 2),), np.array([1.0, 1.0]), normalized=True
            )

    def test_amplitude_length_checked(self):
        with pytest.raises(DimensionMismatch):
            CompositeState((SubsystemSpec("A", 2),), np.zeros(3, dtype=complex))

    def test_amplitudes_immutable(self):
        state = qubit("A", 1, 0)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 5.0


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.3], [0.1, 0.5]], dtype=complex)
        with pytest.raises(InvalidSpec):
            DensityOperator((SubsystemSpec("A", 2),), m)

    def test_rejects_bad_trace(self):
        m = np.eye(2, dtype=complex)
        with pytest.raises(InvalidSpec):
            DensityOperator((SubsystemSpec("A", 2),), m)

    def test_rejects_negative_eigenvalue(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(InvalidSpec):
            DensityOperator((SubsystemSpec("A", 2),), m)


class TestTensor:
    def test_basis_product(self):
        state = tensor(qubit("A", 1, 0), qubit("B", 0, 1))
        np.testing.assert_array_equal(state.amplitudes, [0, 1, 0, 0])

    def test_linearity(self):
        s = 1 / np.sqrt(2)
        state = tensor(qubit("A", s, s), qubit("B", 1, 0))
        np.testing.assert_allclose(state.amplitudes, [s, 0, s, 0], atol=1e-15)

    def test_name_collision(self):
        with pytest.raises(NameCollision):
            tensor(qubit("A", 1, 0), qubit("A", 1, 0))

    def test_norm_multiplicative_100_random(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            a_amps = rng.normal(size=3) + 1j * rng.normal(size=3)
            b_amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            a = CompositeState((SubsystemSpec("A", 3),), a_amps)
            b = CompositeState((SubsystemSpec("B", 4),), b_amps)
            assert tensor(a, b).norm() == pytest.approx(
                a.norm() * b.norm(), abs=1e-12
            )

    def test_associative_up_to_flattening(self):
        rng = np.random.default_rng(5)
        a = random_state(rng, (2,), ("A",))
        b = random_state(rng, (3,), ("B",))
        c = random_state(rng, (2,), ("C",))
        left = tensor(tensor(a, b), c)
        right = tensor(a, tensor(b, c))
        assert left.names == right.names
        np.testing.assert_allclose(left.amplitudes, right.amplitudes, atol=1e-12)


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rng = np.random.default_rng(11)
        a = random_state(rng, (2,), ("A",))
        b = random_state(rng, (3,), ("B",))
        rho = tensor(a, b).to_density()
        reduced = partial_trace(rho, ["A"])
        expected = np.outer(a.amplitudes, a.amplitudes.conj())
        np.testing.assert_allclose(reduced.matrix, expected, atol=1e-12)

    def test_bell_state_maximally_mixed(self):
        reduced = partial_trace(bell().to_density(), ["A"])
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)

    def test_entangled_weights(self):
        # a = (0.6, 0.8) over orthonormal branch pairs -> diag(0.36, 0.64)
        amps = np.array([0.6, 0, 0, 0.8], dtype=complex)
        psi = CompositeState(
            (SubsystemSpec("system", 2), SubsystemSpec("apparatus", 2)),
            amps,
            normalized=True,
        )
        reduced = partial_trace(psi.to_density(), ["system"])
        np.testing.assert_allclose(reduced.matrix, np.diag([0.36, 0.64]), atol=1e-12)

    def test_matches_loop_oracle_on_random_operators(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            psi = random_state(rng, (2, 3, 2), ("A", "B", "C"))
            rho = psi.to_density()
            for keep in (["A"], ["B"], ["A", "C"], ["A", "B", "C"]):
                got = partial_trace(rho, keep)
                want = loop_partial_trace(rho, keep)
                np.testing.assert_allclose(got.matrix, want, atol=1e-12)
                assert got.names == tuple(k for k in ("A", "B", "C") if k in keep)

    def test_trace_hermiticity_positivity_preserved_200_random(self):
        rng = np.random.default_rng(314)
        for _ in range(200):
            psi = random_state(rng, (2, 4), ("A", "B"))
            reduced = partial_trace(psi.to_density(), ["A"])
            assert abs(np.trace(reduced.matrix) - 1.0) < 1e-10
            assert np.max(np.abs(reduced.matrix - reduced.matrix.conj().T)) < 1e-10
            assert np.linalg.eigvalsh(reduced.matrix).min() > -1e-10

    def test_unknown_name(self):
        with pytest.raises(UnknownSubsystem):
            partial_trace(bell().to_density(), ["Q"])

    def test_empty_keep_rejected(self):
        with pytest.raises(InvalidSpec):
            partial_trace(bell().to_density(), [])

    def test_keeps_declaration_order(self):
        rng = np.random.default_rng(4)
        psi = random_state(rng, (2, 3, 2), ("A", "B", "C"))
        reduced = partial_trace(psi.to_density(), ["C", "A"])
        assert reduced.names == ("A", "C")


class TestProject:
    def test_bell_projection(self):
        out = project(bell(), "B", np.array([1, 0], dtype=complex))
        np.testing.assert_allclose(out.amplitudes, [1 / np.sqrt(2), 0], atol=1e-15)
        assert out.norm() ** 2 == pytest.approx(0.5, abs=1e-12)

    def test_product_state_projection_preserves_other_factor(self):
        rng = np.random.default_rng(21)
        a = random_state(rng, (3,), ("A",))
        b = random_state(rng, (2,), ("B",))
        out = project(tensor(a, b), "B", b.amplitudes)
        np.testing.assert_allclose(out.amplitudes, a.amplitudes, atol=1e-12)

    def test_entangled_branch_amplitude(self):
        # a = (0.6, 0.8i); projecting onto the second pointer leaves 0.8i|xi_2>
        amps = np.zeros(4, dtype=complex)
        amps[0] = 0.6
        amps[3] = 0.8j
        psi = CompositeState(
            (SubsystemSpec("system", 2), SubsystemSpec("apparatus", 2)),
            amps,
            normalized=True,
        )
        out = project(psi, "apparatus", np.array([0, 1], dtype=complex))
        np.testing.assert_allclose(out.amplitudes, [0, 0.8j], atol=1e-15)
        assert out.norm() ** 2 == pytest.approx(0.64, abs=1e-12)

    def test_completeness_sums_to_norm(self):
        rng = np.random.default_rng(8)
        psi = random_state(rng, (3, 4), ("A", "B"))
        total = sum(
            project(psi, "B", np.eye(4)[k].astype(complex)).norm() ** 2
            for k in range(4)
        )
        assert total == pytest.approx(psi.norm() ** 2, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            project(bell(), "B", np.array([1, 0, 0], dtype=complex))


class TestScalars:
    def test_inner_product_conjugate_linear(self):
        a = qubit("A", 1, 1j)
        b = qubit("A", 2, 0)
        assert inner_product(a, b) == pytest.approx(2.0)
        assert inner_product(b, a) == pytest.approx(np.conj(inner_product(a, b)))

    def test_normalize_returns_original_norm(self):
        state, original = normalize(qubit("A", 3, 4))
        assert original == pytest.approx(5.0, abs=1e-12)
        assert state.norm() == pytest.approx(1.0, abs=1e-12)

    def test_normalize_zero_state(self):
        with pytest.raises(ZeroNorm):
            normalize(qubit("A", 0, 0))

    def test_purity_pure(self):
        assert purity(bell().to_density()) == pytest.approx(1.0, abs=1e-12)

    def test_purity_maximally_mixed(self):
        rho = partial_trace(bell().to_density(), ["A"])
        assert purity(rho) == pytest.approx(0.5, abs=1e-12)

    def test_purity_frozen_value(self):
        # 0.36^2 + 0.64^2 = 0.5392, worked by hand
        m = np.diag([0.36, 0.64]).astype(complex)
        rho = DensityOperator((SubsystemSpec("system", 2),), m)
        assert purity(rho) == pytest.approx(0.5392, abs=1e-12)

    def test_purity_product_vs_entangled_cut(self):
        rng = np.random.default_rng(55)
        product = tensor(random_state(rng, (2,), ("A",)), random_state(rng, (2,), ("B",)))
        assert purity(partial_trace(product.to_density(), ["A"])) == pytest.approx(
            1.0, abs=1e-10
        )
        assert purity(partial_trace(bell().to_density(), ["A"])) < 1.0 - 1e-10

    def test_fix_global_phase(self):
        state = qubit("A", 0, 0.5j)
        fixed = fix_global_phase(state)
        assert fixed.amplitudes[1] == pytest.approx(0.5)
        assert fixed.norm() == pytest.approx(state.norm(), abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    re=st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4),
    im=st.lists(st.floats(-1, 1, allow_nan=False), min_size=4, max_size=4),
)
def test_partial_trace_unit_trace_property(re, im):
    amps = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(amps) < 1e-6:
        return
    amps = amps / np.linalg.norm(amps)
    psi = CompositeState(
        (SubsystemSpec("A", 2), SubsystemSpec("B", 2)), amps, normalized=True
    )
    reduced = partial_trace(psi.to_density(), ["B"])
    assert abs(np.trace(reduced.matrix) - 1.0) < 1e-10
    assert np.linalg.eigvalsh(reduced.matrix).min() > -1e-10
