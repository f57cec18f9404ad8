import numpy as np
import pytest

from fmmlayout.fmm import (
    Expansion,
    direct_force_at,
    force_at,
    incoming_from_points,
    outgoing_from_points,
    outgoing_to_incoming,
    translate_incoming,
    translate_outgoing,
)


def _charges(rng, n, center, halfwidth):
    return np.asarray(center) + rng.uniform(-halfwidth, halfwidth, (n, 2))


class TestOutgoing:
    def test_empty_cell_zero_coefficients(self):
        e = outgoing_from_points((0.0, 0.0), np.zeros((0, 2)), order=6)
        assert np.all(e.coeffs == 0)

    def test_single_charge_at_center(self):
        e = outgoing_from_points((1.0, 2.0), np.array([[1.0, 2.0]]), order=6)
        assert e.coeffs[0] == 1.0
        assert np.all(e.coeffs[1:] == 0)

    def test_far_field_matches_direct_sum(self, rng):
        center = (0.0, 0.0)
        pts = _charges(rng, 100, center, 0.5)
        e = outgoing_from_points(center, pts, order=16)
        target = (5.0, 1.0)  # five cell-widths away
        got = force_at(e, target)
        want = direct_force_at(target, pts)
        assert np.linalg.norm(got - want) <= 1e-6 * np.linalg.norm(want)


class TestTranslateOutgoing:
    def test_zero_expansion(self):
        e = outgoing_from_points((0.0, 0.0), np.zeros((0, 2)), order=5)
        t = translate_outgoing(e, (1.0, 1.0))
        assert np.all(t.coeffs == 0)

    def test_zero_shift_identity(self, rng):
        pts = _charges(rng, 20, (0.0, 0.0), 1.0)
        e = outgoing_from_points((0.0, 0.0), pts, order=8)
        t = translate_outgoing(e, (0.0, 0.0))
        assert np.allclose(t.coeffs, e.coeffs, rtol=0, atol=0)

    def test_recentered_matches_rebuilt(self, rng):
        child_center = (0.25, 0.25)
        pts = _charges(rng, 50, child_center, 0.25)
        child = outgoing_from_points(child_center, pts, order=12)
        parent_center = (0.5, 0.5)
        shifted = translate_outgoing(child, parent_center)
        rebuilt = outgoing_from_points(parent_center, pts, order=12)
        far = (7.0, -3.0)
        f1 = force_at(shifted, far)
        f2 = force_at(rebuilt, far)
        assert np.linalg.norm(f1 - f2) <= 1e-10 * np.linalg.norm(f2)

    def test_kind_checked(self):
        inc = Expansion("incoming", 0j, np.zeros(5, complex))
        with pytest.raises(ValueError):
            translate_outgoing(inc, (1.0, 0.0))


class TestOutgoingToIncoming:
    def test_zero_source(self):
        e = outgoing_from_points((0.0, 0.0), np.zeros((0, 2)), order=5)
        inc = outgoing_to_incoming(e, (10.0, 0.0))
        assert np.all(inc.coeffs == 0)

    def test_single_far_charge_geometric_in_order(self):
        src = np.array([[0.3, -0.2]])
        target_center = (6.0, 2.0)
        want = direct_force_at(target_center, src)
        errs = []
        for p in (4, 8, 16):
            e = outgoing_from_points((0.0, 0.0), src, order=p)
            inc = outgoing_to_incoming(e, target_center)
            got = force_at(inc, target_center)
            errs.append(np.linalg.norm(got - want) / np.linalg.norm(want))
        assert errs[0] < 1e-3
        assert errs[1] < errs[0]
        assert errs[2] < errs[1]

    def test_violated_separation_documented_blowup(self, rng):
        # the conversion carries no validity check; inside the source cell
        # the series simply stops converging, so accuracy degrades by
        # orders of magnitude compared to a well-separated target
        pts = _charges(rng, 30, (0.0, 0.0), 1.0)
        e = outgoing_from_points((0.0, 0.0), pts, order=8)
        ok_center = (8.0, 0.0)
        bad_center = (1.2, 0.0)  # overlapping the source cell's radius
        ok_err = np.linalg.norm(
            force_at(outgoing_to_incoming(e, ok_center), ok_center)
            - direct_force_at(ok_center, pts)
        )
        bad_err = np.linalg.norm(
            force_at(outgoing_to_incoming(e, bad_center), bad_center)
            - direct_force_at(bad_center, pts)
        )
        assert bad_err > 100 * ok_err


class TestTranslateIncoming:
    def test_zero(self):
        inc = Expansion("incoming", 0j, np.zeros(7, complex))
        out = translate_incoming(inc, (2.0, 2.0))
        assert np.all(out.coeffs == 0)

    def test_zero_shift_identity(self, rng):
        pts = _charges(rng, 25, (10.0, 10.0), 1.0)
        inc = incoming_from_points((0.0, 0.0), pts, order=9)
        out = translate_incoming(inc, (0.0, 0.0))
        assert np.allclose(out.coeffs, inc.coeffs, rtol=0, atol=0)

    def test_evaluation_commutes_with_shift(self, rng):
        sources = _charges(rng, 40, (10.0, -6.0), 1.0)
        parent_center = (0.0, 0.0)
        inc = incoming_from_points(parent_center, sources, order=14)
        child_center = (0.4, 0.3)
        shifted = translate_incoming(inc, child_center)
        z = (0.55, 0.35)
        f1 = force_at(inc, z)
        f2 = force_at(shifted, z)
        assert np.linalg.norm(f1 - f2) <= 1e-10 * np.linalg.norm(f1)


class TestExpansionType:
    def test_coefficient_count_is_order_plus_one(self):
        e = outgoing_from_points((0.0, 0.0), np.array([[0.1, 0.1]]), order=8)
        assert e.order == 8
        assert e.coeffs.size == 9

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Expansion("outgoing", 0j, np.array([np.inf + 0j]))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            Expansion("sideways", 0j, np.zeros(3, complex))
