import math

import numpy as np
import pytest

from gausslink import (
    BalancedForm,
    DeviceCaps,
    NetworkConfig,
    Topology,
    UnstableOperatingPointError,
    conversion_channel,
    default_loss_split,
    downconvert_mm,
    log_negativity,
    loss_channel,
    loss_slot_count,
    make_tms,
    min_sympl_eig_pt,
    mm_log_negativity,
    mm_state,
    mo_state,
    swap,
)
from gausslink.network import (
    ALL_TOPOLOGIES,
    ASYMMETRIC_SWAP_TOPOLOGIES,
    DOWN_TOPOLOGIES,
    SYMMETRIC_SWAP_TOPOLOGIES,
    SYMMETRIC_TOPOLOGIES,
)
from gausslink.sampling import random_balanced_states
from gausslink.sources import MoKind


def epr_measurement_oracle(s1: BalancedForm, s2: BalancedForm) -> np.ndarray:
    """Conditional state after a physical EPR measurement, built from scratch.

    Combines the two optical modes on a balanced beamsplitter, then
    homodynes x on one output and p on the other, applying the standard
    Gaussian conditional update for each measurement.  Returns the 4x4
    covariance matrix of the two remaining (microwave) modes.
    """
    # modes: (opt1, mw1, opt2, mw2), quadrature blocks of 2
    v = np.zeros((8, 8))
    for i, s in ((0, s1), (2, s2)):
        v[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = s.a * np.eye(2)
        v[2 * i + 2 : 2 * i + 4, 2 * i + 2 : 2 * i + 4] = s.b * np.eye(2)
        blk = s.c * np.diag([1.0, -1.0])
        v[2 * i : 2 * i + 2, 2 * i + 2 : 2 * i + 4] = blk
        v[2 * i + 2 : 2 * i + 4, 2 * i : 2 * i + 2] = blk

    bs = np.eye(8)
    h = 1.0 / math.sqrt(2.0)
    for q in range(2):  # x and p components of the two optical modes (0 and 2)
        i, j = 0 * 2 + q, 2 * 2 + q
        bs[i, i] = bs[j, j] = h
        bs[i, j] = h
        bs[j, i] = -h
    v = bs @ v @ bs.T

    def homodyne(vm, mode, quad):
        idx = [2 * mode, 2 * mode + 1]
        keep = [k for k in range(vm.shape[0]) if k not in idx]
        a = vm[np.ix_(idx, idx)]
        c = vm[np.ix_(keep, idx)]
        b = vm[np.ix_(keep, keep)]
        pi = np.zeros((2, 2))
        pi[quad, quad] = 1.0
        return b - c @ pi @ c.T / a[quad, quad]

    v = homodyne(v, 0, 0)      # x on the first beamsplitter output
    v = homodyne(v, 1, 1)      # p on the second (modes shifted down by one)
    return v


class TestTopologyType:
    def test_fourteen_topologies(self):
        assert len(DOWN_TOPOLOGIES) == 4
        assert len(SYMMETRIC_SWAP_TOPOLOGIES) == 4
        assert len(ASYMMETRIC_SWAP_TOPOLOGIES) == 6
        assert len(ALL_TOPOLOGIES) == 14
        assert len(set(ALL_TOPOLOGIES)) == 14

    def test_swap_pair_is_unordered(self):
        t1 = Topology.swap_asym(MoKind.IM, MoKind.EO)
        t2 = Topology.swap_asym(MoKind.EO, MoKind.IM)
        assert t1 == t2
        assert t1.label == "EO+IM-swap"

    def test_asym_requires_distinct_kinds(self):
        with pytest.raises(ValueError):
            Topology.swap_asym(MoKind.EO, MoKind.EO)

    def test_labels(self):
        assert Topology.down(MoKind.IM).label == "IM-down"
        assert Topology.swap_sym(MoKind.EO).label == "EO-swap"

    def test_loss_slots(self):
        assert loss_slot_count(Topology.down(MoKind.EO)) == 2
        assert loss_slot_count(Topology.down(MoKind.IM)) == 1
        assert loss_slot_count(Topology.swap_sym(MoKind.EO)) == 2
        assert loss_slot_count(Topology.swap_asym(MoKind.IM, MoKind.EO)) == 3
        assert loss_slot_count(Topology.swap_asym(MoKind.IM, MoKind.IO)) == 2

    def test_default_splits_multiply_to_tau_e(self):
        for t in ALL_TOPOLOGIES:
            split = default_loss_split(t, 0.7)
            assert math.prod(split) == pytest.approx(0.7, rel=1e-12)


class TestSwap:
    def test_identical_inputs_reduce_to_symmetric_form(self, rng):
        for a, b, c in random_balanced_states(rng, 200):
            s = BalancedForm(a, b, c)
            out = swap(s, s)
            assert out.a == pytest.approx(b - c * c / (2 * a), rel=1e-14)
            assert out.b == pytest.approx(b - c * c / (2 * a), rel=1e-14)
            assert out.c == pytest.approx(-c * c / (2 * a), rel=1e-14)

    def test_uncorrelated_partner_breaks_entanglement(self, rng):
        s1 = BalancedForm.from_cov(make_tms(1.0))
        out = swap(s1, BalancedForm(0.7, 0.9, 0.0))
        assert out.c == 0.0
        assert log_negativity(out) == 0.0

    def test_matches_homodyne_measurement_oracle(self, rng):
        for _ in range(300):
            (a1, b1, c1), (a2, b2, c2) = random_balanced_states(rng, 2)
            s1, s2 = BalancedForm(a1, b1, c1), BalancedForm(a2, b2, c2)
            got = swap(s1, s2)
            v = epr_measurement_oracle(s1, s2)
            want = BalancedForm.from_cov(
                __import__("gausslink").CovMat2((v + v.T) / 2)
            )
            np.testing.assert_allclose(
                (got.a, got.b, abs(got.c)),
                (want.a, want.b, abs(want.c)),
                rtol=1e-10,
                atol=1e-12,
            )

    def test_swapped_tms_pair_equals_tms_with_reduced_squeezing(self):
        r = 0.9
        s = BalancedForm.from_cov(make_tms(r))
        out = swap(s, s)
        # output is again a pure two-mode-squeezed form
        assert out.a**2 - out.c**2 == pytest.approx(0.25, rel=1e-12)
        r_eff = 0.5 * math.acosh(2.0 * out.a)
        ref = BalancedForm.from_cov(make_tms(r_eff))
        assert log_negativity(out) == pytest.approx(log_negativity(ref), rel=1e-12)
        assert r_eff < r


class TestDownconvert:
    def test_identity_channel_is_noop(self):
        s = BalancedForm.from_cov(make_tms(0.5))
        out = downconvert_mm(s, loss_channel(1.0))
        assert out == s

    def test_zero_transmission_separates(self):
        s = BalancedForm.from_cov(make_tms(0.5))
        out = downconvert_mm(s, loss_channel(0.0))
        assert out.c == 0.0

    def test_rejects_anisotropic_channel(self):
        from gausslink import OneModeChannel

        ch = OneModeChannel(np.diag([0.5, 0.6]), np.eye(2))
        with pytest.raises(ValueError):
            downconvert_mm(BalancedForm(1.0, 1.0, 0.3), ch)


class TestMmState:
    def setup_method(self):
        self.caps = DeviceCaps(d_a=50.0, d_b=8.0, tau_a=0.9, tau_b=0.85, n_th=1.0)

    def cfg(self, **kw):
        base = dict(c_a1=50.0, c_b1=8.0, c_a2=50.0, c_b2=8.0, r=0.6)
        base.update(kw)
        return NetworkConfig(self.caps, **base)

    def test_matches_explicit_composition_every_topology(self):
        # independent oracle: full matrix pipeline through core channels
        from gausslink import DptParams, apply_one_mode

        caps = self.caps

        def pair_for(kind):
            # IO stability needs C_a < C_b + 1; everything else can sit at caps
            return (8.5, 8.0) if kind is MoKind.IO else (50.0, 8.0)

        for t in ALL_TOPOLOGIES:
            ca1, cb1 = pair_for(t.kinds[0])
            ca2, cb2 = pair_for(t.kinds[1]) if t.scheme == "swap" else (50.0, 8.0)
            cfg = self.cfg(c_a1=ca1, c_b1=cb1, c_a2=ca2, c_b2=cb2)
            got = mm_state(t, cfg)
            r = 0.6
            split = default_loss_split(t, 1.0)

            def source(kind, c_a, c_b, tau_a):
                sig = {"EO": (-1, -1), "EM": (-1, -1), "IO": (1, -1), "IM": (-1, 1)}[kind.name]
                p = DptParams(c_a, c_b, tau_a, caps.tau_b, caps.n_th, *sig)
                return mo_state(kind, p, r, caps.rates)

            if t.scheme == "down" and t.kinds[0] is MoKind.EO:
                v = make_tms(r)
                for mode, (ca, cb) in ((1, (cfg.c_a1, cfg.c_b1)), (2, (cfg.c_a2, cfg.c_b2))):
                    p = DptParams(ca, cb, caps.tau_a, caps.tau_b, caps.n_th)
                    v = apply_one_mode(conversion_channel("down", p), v, mode)
                want = BalancedForm.from_cov(v)
            elif t.scheme == "down":
                s = source(t.kinds[0], cfg.c_a1, cfg.c_b1, caps.tau_a)
                p = DptParams(cfg.c_a2, cfg.c_b2, caps.tau_a, caps.tau_b, caps.n_th)
                v = apply_one_mode(conversion_channel("down", p), s.to_cov(), 1)
                want = BalancedForm.from_cov(v)
            else:
                s1 = source(t.kinds[0], cfg.c_a1, cfg.c_b1, caps.tau_a)
                s2 = source(t.kinds[1], cfg.c_a2, cfg.c_b2, caps.tau_a)
                want = swap(s1, s2)
            np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)

    def test_down_eo_matches_lossy_two_arm_form(self, rng):
        # MM state of the split-loss EO distribution: a = td(t1 sinh^2 r + 1/2) + nd
        caps = self.caps
        for _ in range(50):
            t1s = rng.uniform(0.5, 1.0)
            tau_e = t1s * rng.uniform(0.5, 1.0)
            t2s = tau_e / t1s
            r = rng.uniform(0.1, 1.2)
            cfg = NetworkConfig(
                caps, 20.0, 5.0, 30.0, 6.0, r=r, tau_e=tau_e, loss_split=(t1s, t2s)
            )
            got = mm_state(Topology.down(MoKind.EO), cfg)

            def dchan(ca, cb):
                ch = conversion_channel(
                    "down",
                    __import__("gausslink").DptParams(ca, cb, caps.tau_a, caps.tau_b, caps.n_th),
                )
                return ch.T[0, 0] ** 2, ch.N[0, 0]
            td1, nd1 = dchan(20.0, 5.0)
            td2, nd2 = dchan(30.0, 6.0)
            sh2 = math.sinh(r) ** 2
            assert got.a == pytest.approx(td1 * (t1s * sh2 + 0.5) + nd1, rel=1e-12)
            assert got.b == pytest.approx(td2 * (t2s * sh2 + 0.5) + nd2, rel=1e-12)
            assert abs(got.c) == pytest.approx(
                0.5 * math.sqrt(td1 * td2 * t1s * t2s) * math.sinh(2 * r), rel=1e-12
            )

    def test_tracked_product_defect_matches_direct_product(self, rng):
        # away from the instability the naive product A*B - c^2 is accurate,
        # so the cancellation-free bookkeeping must agree with it there
        from gausslink.network import _mm_excess

        caps = self.caps
        for t in ALL_TOPOLOGIES:
            for _ in range(40):
                # keep |C_a - C_b| < 1 so every blue-pump variant is stable
                ca = rng.uniform(1.0, 7.0)
                cb = min(max(ca + rng.uniform(-0.7, 0.7), 0.5), 8.0)
                cs = (ca, cb, ca, cb)
                split = default_loss_split(t, rng.uniform(0.6, 1.0))
                out = _mm_excess(t, caps, 0.7, 0.5, cs, split)
                assert out is not None
                A, B, c, P = out
                assert P == pytest.approx(A * B - c * c, rel=1e-9, abs=1e-12)

    def test_down_eo_approaches_tms_at_high_cooperativity(self):
        # lossless, noiseless, balanced high cooperativities: the two
        # conversion channels become transparent and the distributed
        # state tends to the original squeezed pair
        r = 0.8
        target = log_negativity(BalancedForm.from_cov(make_tms(r)))
        prev_gap = None
        for c in (1e2, 1e3, 1e4, 1e5):
            caps = DeviceCaps(d_a=c, d_b=c, tau_a=1.0, tau_b=1.0, n_th=0.0)
            cfg = NetworkConfig(caps, c, c, c, c, r=r)
            gap = target - mm_log_negativity(Topology.down(MoKind.EO), cfg)
            assert gap > 0.0
            if prev_gap is not None:
                assert gap < prev_gap
            prev_gap = gap
        assert prev_gap < 1e-4

    def test_im_swap_separable_at_half_transmissivity(self):
        caps = DeviceCaps(d_a=100.0, d_b=10.0, tau_a=0.5, tau_b=0.9, n_th=0.0)
        t = Topology.swap_sym(MoKind.IM)
        for n_th in (0.0, 0.5, 10.0, 1000.0):
            caps_n = DeviceCaps(100.0, 10.0, 0.5, 0.9, n_th)
            cfg = NetworkConfig(caps_n, 100.0, 10.0, 100.0, 10.0)
            assert mm_log_negativity(t, cfg) == 0.0

    def test_swap_theorem_small_sweep(self, rng):
        for _ in range(2000):
            (a1, b1, c1), (a2, b2, c2) = random_balanced_states(rng, 2)
            s1, s2 = BalancedForm(a1, b1, c1), BalancedForm(a2, b2, c2)
            e12 = log_negativity(swap(s1, s2))
            e11 = log_negativity(swap(s1, s1))
            e22 = log_negativity(swap(s2, s2))
            assert e12 <= max(e11, e22) + 1e-12

    def test_cap_violation_reports_bound(self):
        with pytest.raises(ValueError, match="C_a,1 .* <= 50"):
            mm_state(Topology.down(MoKind.EO), self.cfg(c_a1=51.0))

    def test_unstable_source_reports_bound(self):
        with pytest.raises(UnstableOperatingPointError, match="C_b"):
            mm_state(Topology.swap_sym(MoKind.IM), self.cfg(c_a1=2.0, c_b1=8.0))

    def test_bad_split_rejected(self):
        with pytest.raises(ValueError, match="multiplies"):
            mm_state(
                Topology.down(MoKind.EO),
                NetworkConfig(self.caps, 10, 5, 10, 5, r=0.5, tau_e=0.5, loss_split=(0.9, 0.9)),
            )
        with pytest.raises(ValueError, match="slot"):
            mm_state(
                Topology.down(MoKind.IM),
                NetworkConfig(self.caps, 10, 5, 10, 5, tau_e=0.5, loss_split=(0.5, 1.0)),
            )
