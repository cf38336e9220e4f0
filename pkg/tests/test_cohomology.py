from fractions import Fraction

import pytest

from cscx.cohomology import (
    CochainQuotient,
    cohomology_dims,
    de_rham_complex,
    les_check,
    mode_truncation,
    rs_cohomology,
    short_exact_splice,
    twisted_complex,
    weight_truncation,
)
from cscx.descent import rs_complex
from cscx.errors import NotAComplexError
from cscx.grading import sample_modes
from cscx.linalg import OperatorMatrix, SectionBasis


def _basis(tag, size):
    return SectionBasis(key=(tag,), labels=tuple((("w", 0), (tag, i)) for i in range(size)))


class TestCohomologyDims:
    def test_zero_complex(self):
        mats = [
            OperatorMatrix(_basis("b", 0), _basis("a", 0), {}),
            OperatorMatrix(_basis("c", 0), _basis("b", 0), {}),
        ]
        assert cohomology_dims(mats) == [0, 0, 0]

    def test_rejects_non_complex(self):
        a, b, c = _basis("a", 1), _basis("b", 1), _basis("c", 1)
        mats = [
            OperatorMatrix(b, a, {(0, 0): Fraction(1)}),
            OperatorMatrix(c, b, {(0, 0): Fraction(1)}),
        ]
        with pytest.raises(NotAComplexError) as err:
            cohomology_dims(mats)
        assert err.value.position == 0

    def test_affine_de_rham_is_scalar_in_degree_zero(self, cs_affine2):
        dims = cohomology_dims(de_rham_complex(cs_affine2, weight_truncation(6)))
        assert dims == [1, 0, 0, 0, 0]

    def test_torus_de_rham_constant_mode(self, cs_torus2):
        truncation = mode_truncation([(0, 0, 0, 0)])
        dims = cohomology_dims(de_rham_complex(cs_torus2, truncation))
        assert dims == [1, 4, 6, 4, 1]

    def test_torus_nonzero_modes_contribute_nothing(self, cs_torus2):
        for mode in sample_modes(4, 4, seed="per-mode"):
            truncation = mode_truncation([mode])
            assert cohomology_dims(de_rham_complex(cs_torus2, truncation)) == [0] * 5
            assert cohomology_dims(twisted_complex(cs_torus2, truncation)) == [0] * 5
            assert cohomology_dims(rs_complex(cs_torus2, truncation)) == [0] * 6

    def test_modular_rank_path_agrees(self, cs_torus2):
        truncation = mode_truncation([(0, 0, 0, 0), (1, 0, 0, 0)])
        mats = de_rham_complex(cs_torus2, truncation)
        assert cohomology_dims(mats, rank_method="modular") == cohomology_dims(mats)


class TestQuotient:
    def test_representatives_and_coords(self):
        # complex 0 -> Q^2 -d-> Q^2 -> 0 with d = [[0,0],[1,0]]
        a, b = _basis("a", 2), _basis("b", 2)
        d = OperatorMatrix(b, a, {(1, 0): Fraction(1)})
        h_a = CochainQuotient(None, d, 2)
        assert h_a.dim == 1  # kernel is span(e1)
        h_b = CochainQuotient(d, None, 2)
        assert h_b.dim == 1  # e1 modulo image span(e1)... representative e0
        coords = h_b.coords({0: Fraction(3)})
        assert coords == {0: Fraction(3)}


class TestSplice:
    def test_affine(self, cs_affine2):
        report = short_exact_splice(cs_affine2, weight_truncation(3))
        assert report.ok, report

    def test_torus(self, cs_torus2):
        report = short_exact_splice(
            cs_torus2, mode_truncation([(0, 0, 0, 0), (1, 1, 0, 0)])
        )
        assert report.ok, report


class TestLes:
    def test_affine_connecting_maps_vanish(self, cs_affine2):
        report = les_check(cs_affine2, weight_truncation(4))
        assert report.exact
        assert report.snake_equals_wedge
        assert all(r == 0 for r in report.connecting_ranks)
        assert list(report.total_dims) == [1, 1, 0, 0, 0, 0]

    def test_torus_connecting_ranks(self, cs_torus2):
        report = les_check(cs_torus2, mode_truncation([(0, 0, 0, 0)]))
        assert report.exact
        assert report.snake_equals_wedge
        assert list(report.connecting_ranks) == [0, 1, 4, 1, 0]
        assert list(report.total_dims) == [1, 4, 5, 5, 4, 1]


class TestReports:
    def test_affine_report(self, cs_affine2):
        report = rs_cohomology(cs_affine2, weight_truncation(6))
        assert report.dims["rs"] == [1, 1, 0, 0, 0, 0]
        assert report.dims["deRham"] == [1, 0, 0, 0, 0]
        assert report.checks["weight_stable"]
        assert report.checks["total_matches_rs"]
        assert report.les["exact"]

    def test_torus_report(self, cs_torus2):
        modes = [(0, 0, 0, 0)] + sample_modes(4, 3)
        report = rs_cohomology(cs_torus2, mode_truncation(modes))
        assert report.dims["rs"] == [1, 4, 5, 5, 4, 1]
        assert report.dims["deRham"] == [1, 4, 6, 4, 1]
        assert report.checks["sampled_modes_vanish"]
        assert report.checks["euler_zero"]
        assert report.les["exact"]
        assert report.les["connecting_ranks"] == [0, 1, 4, 1, 0]

    def test_euler_identity_from_binomials(self, cs_torus2):
        # alternating sum of the doubled primitive pattern vanishes
        from cscx.grading import binomial_primitive_dim

        n = cs_torus2.n
        fiber_dims = [binomial_primitive_dim(n, k) for k in range(n + 1)]
        fiber_dims += [binomial_primitive_dim(n, k) for k in range(n, 2 * n + 1)]
        assert sum((-1) ** k * d for k, d in enumerate(fiber_dims)) == 0

    def test_block_parallelism_gives_same_answer(self, cs_torus2, monkeypatch):
        modes = [(0, 0, 0, 0), (1, 0, 0, 0), (1, -1, 0, 2)]
        serial = les_check(cs_torus2, mode_truncation(modes))
        monkeypatch.setenv("CSCX_THREADS", "3")
        threaded = les_check(cs_torus2, mode_truncation(modes))
        assert serial == threaded
