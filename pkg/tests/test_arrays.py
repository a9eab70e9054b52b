"""Tests for the driven cavity-array model.

The drift is checked against hand-expanded two-site equations of motion,
the diffusion against the moment equations of the isolated driven pair,
and the steady state against the replication identities (every lossless
pair reproduces the reservoir's squeezed thermal statistics, with an
alternating sign on the cross-moment).
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from entrep.arrays import (
    ArrayConfig,
    DisorderSpec,
    diffusion_matrix,
    disorder_sweep,
    drift_matrices,
    pair_entanglement_profile,
    steady_state,
)
from entrep.baselines import driving_entanglement
from entrep.errors import ConfigInvalid, NotHurwitz, OverSqueezed
from entrep.gaussian import squeezing_bound


def ladder_cross_moment(sigma: np.ndarray, j: int, k: int) -> complex:
    """<a_j a_k> for distinct modes, from the covariance entries."""
    xj, pj, xk, pk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
    return 0.25 * (
        sigma[xj, xk] - sigma[pj, pk] + 1j * (sigma[xj, pk] + sigma[pj, xk])
    )


def ladder_occupation(sigma: np.ndarray, j: int) -> float:
    """<a_j^dag a_j> from the covariance entries."""
    return 0.25 * (sigma[2 * j, 2 * j] + sigma[2 * j + 1, 2 * j + 1]) - 0.5


def end_driven_config(n_sites: int, kappa_end: float, **kwargs) -> ArrayConfig:
    """Homogeneous couplings, loss only on the last site of each array."""
    kappa = [0.0] * (2 * n_sites)
    kappa[n_sites - 1] = kappa_end
    kappa[2 * n_sites - 1] = kappa_end
    base = ArrayConfig.homogeneous(n_sites, **kwargs)
    return replace(base, kappa=tuple(kappa))


class TestArrayConfig:
    def test_homogeneous_factory(self):
        cfg = ArrayConfig.homogeneous(3, eta=2.0, kappa=0.1, nbar=1.0, mbar=1.2)
        assert cfg.eta == (2.0,) * 4
        assert cfg.kappa == (0.1,) * 6
        assert cfg.zeta == 2.0  # defaults to eta
        assert cfg.g == (0.0,) * 3
        assert cfg.driven_modes == (0, 3)
        assert cfg.is_gaussian

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_sites=0, eta=(), kappa=(), zeta=1.0, nbar=0.0, mbar=0.0),
            dict(n_sites=2, eta=(1.0,), kappa=(0.0,) * 4, zeta=1.0, nbar=0.0, mbar=0.0),
            dict(n_sites=2, eta=(1.0, 1.0), kappa=(0.0,) * 3, zeta=1.0, nbar=0.0, mbar=0.0),
            dict(n_sites=1, eta=(), kappa=(0.0, 0.0), zeta=-1.0, nbar=0.0, mbar=0.0),
            dict(n_sites=1, eta=(), kappa=(0.0, 0.0), zeta=1.0, nbar=1.0, mbar=0.0, g=(0.1, 0.2)),
        ],
    )
    def test_rejects_malformed_configs(self, kwargs):
        with pytest.raises(ConfigInvalid):
            ArrayConfig(**kwargs)

    def test_rejects_oversqueezed_reservoir(self):
        with pytest.raises(OverSqueezed):
            ArrayConfig.homogeneous(2, nbar=1.0, mbar=1.5)


class TestDrift:
    def test_single_pair_pure_damping(self):
        cfg = ArrayConfig.homogeneous(1, eta=1.0, kappa=0.0, zeta=1.0)
        mats = drift_matrices(cfg)
        assert np.array_equal(mats.ladder, -np.eye(2))
        assert np.array_equal(mats.quadrature, -np.eye(4))

    def test_two_site_hopping_by_hand(self):
        # eta = 1, kappa = zeta = 0: dx_1/dt = +p_2, dp_1/dt = -x_2, and the
        # mirrored pattern in array two; no inter-array entries anywhere.
        cfg = ArrayConfig(n_sites=2, eta=(1.0, 1.0), kappa=(0.0,) * 4, zeta=0.0, nbar=0.0, mbar=0.0)
        quad = drift_matrices(cfg).quadrature
        expected_block = np.zeros((4, 4))
        expected_block[0, 3] = 1.0   # dx_1 <- p_2
        expected_block[1, 2] = -1.0  # dp_1 <- x_2
        expected_block[2, 1] = 1.0   # dx_2 <- p_1
        expected_block[3, 0] = -1.0  # dp_2 <- x_1
        assert np.array_equal(quad[:4, :4], expected_block)
        assert np.array_equal(quad[4:, 4:], expected_block)
        assert np.array_equal(quad[:4, 4:], np.zeros((4, 4)))
        assert np.array_equal(quad[4:, :4], np.zeros((4, 4)))

    def test_quadrature_spectrum_matches_ladder_spectra(self):
        cfg = ArrayConfig(
            n_sites=3,
            eta=(1.0, 0.7, 1.2, 0.4),
            kappa=(0.1, 0.0, 0.3, 0.2, 0.0, 0.5),
            zeta=0.8,
            nbar=0.5,
            mbar=0.4,
        )
        mats = drift_matrices(cfg)

        def by_parts(values):
            return np.array(
                sorted(values, key=lambda z: (round(z.real, 8), round(z.imag, 8)))
            )

        expected = by_parts(
            np.concatenate(
                [np.linalg.eigvals(mats.ladder), np.linalg.eigvals(mats.ladder_conj)]
            )
        )
        actual = by_parts(np.linalg.eigvals(mats.quadrature))
        assert np.abs(expected - actual).max() <= 1e-10

    def test_rejects_atom_couplings(self):
        cfg = ArrayConfig.homogeneous(2, g=0.1, nbar=1.0, mbar=1.0)
        with pytest.raises(ConfigInvalid):
            drift_matrices(cfg)


class TestDiffusion:
    def test_vacuum_decay_only(self):
        cfg = ArrayConfig.homogeneous(2, eta=1.0, kappa=0.3, zeta=0.0)
        assert np.array_equal(diffusion_matrix(cfg), 0.6 * np.eye(8))

    def test_driven_site_blocks(self):
        cfg = ArrayConfig.homogeneous(2, eta=1.0, kappa=0.0, zeta=1.0, nbar=1.0, mbar=1.0)
        dmat = diffusion_matrix(cfg)
        # driven modes are 0 and 2; local blocks 2*zeta*(2*nbar+1) = 6
        assert np.allclose(np.diag(dmat), [6.0, 6.0, 0.0, 0.0, 6.0, 6.0, 0.0, 0.0])
        assert dmat[0, 4] == -4.0  # x-x cross: -4*zeta*mbar
        assert dmat[1, 5] == 4.0   # p-p cross: +4*zeta*mbar

    @pytest.mark.parametrize("nbar,frac", [(0.5, 0.5), (1.0, 0.9), (2.0, 1.0), (1.0, 0.0)])
    def test_isolated_pair_moment_equations(self, nbar, frac):
        # the moment flow d<a_0 a_1>/dt = -2 zeta <a_0 a_1> - 2 zeta mbar
        # fixes the steady cross-moment at -mbar and the occupation at nbar
        mbar = frac * squeezing_bound(nbar)
        cfg = ArrayConfig.homogeneous(1, eta=1.0, kappa=0.0, zeta=1.0, nbar=nbar, mbar=mbar)
        sigma = steady_state(cfg).sigma
        cross = ladder_cross_moment(sigma, 0, 1)
        assert abs(cross - (-mbar)) <= 1e-10
        assert abs(ladder_occupation(sigma, 0) - nbar) <= 1e-10
        assert abs(ladder_occupation(sigma, 1) - nbar) <= 1e-10

    def test_isolated_pair_reproduces_reservoir_entanglement(self):
        cfg = ArrayConfig.homogeneous(1, eta=1.0, kappa=0.0, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
        sigma = steady_state(cfg).sigma
        assert np.allclose(sigma[:2, :2], 3.0 * np.eye(2))
        assert np.allclose(sigma[2:, 2:], 3.0 * np.eye(2))
        root8 = 2.0 * math.sqrt(2.0)
        assert np.allclose(sigma[:2, 2:], np.diag([-root8, root8]))
        profile = pair_entanglement_profile(cfg)
        assert abs(profile.raw[0] - (-math.log2(3.0 - root8))) <= 1e-12


class TestSteadyState:
    def test_closed_system_has_no_steady_state(self):
        cfg = ArrayConfig.homogeneous(2, eta=1.0, kappa=0.0, zeta=0.0)
        with pytest.raises(NotHurwitz):
            steady_state(cfg)

    def test_driving_alone_stabilizes_any_length(self):
        cfg = ArrayConfig.homogeneous(4, eta=1.0, kappa=0.0, zeta=1.0, nbar=0.5, mbar=0.5)
        sigma = steady_state(cfg)
        assert sigma.n_modes == 8

    def test_lossless_replication_with_alternating_cross_sign(self):
        nbar, mbar = 1.0, math.sqrt(2.0)
        cfg = ArrayConfig.homogeneous(3, eta=1.0, kappa=0.0, zeta=1.0, nbar=nbar, mbar=mbar)
        sigma = steady_state(cfg).sigma
        for j in range(3):
            # cross-moment -mbar at the driven pair, sign alternating inward
            cross = ladder_cross_moment(sigma, j, 3 + j)
            assert abs(cross - (-1.0) ** (j + 1) * mbar) <= 1e-9
            assert abs(ladder_occupation(sigma, j) - nbar) <= 1e-9


class TestEntanglementProfile:
    def test_lossless_profile_equals_drive_reference(self):
        cfg = ArrayConfig.homogeneous(4, eta=1.0, kappa=0.0, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
        profile = pair_entanglement_profile(cfg)
        assert profile.pair_labels == (1, 2, 3, 4)
        assert np.abs(profile.raw - profile.drive_raw).max() <= 1e-10
        assert abs(profile.drive_raw - driving_entanglement(1.0, math.sqrt(2.0))) <= 1e-15

    def test_separable_drive_replicates_nothing(self):
        cfg = ArrayConfig.homogeneous(3, eta=1.0, kappa=0.05, zeta=1.0, nbar=1.0, mbar=1.0)
        profile = pair_entanglement_profile(cfg)
        assert np.array_equal(profile.raw, np.zeros(3))
        assert profile.drive_raw == 0.0

    def test_lossy_profile_structure(self):
        strong = pair_entanglement_profile(
            ArrayConfig.homogeneous(6, eta=1.0, kappa=0.1, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
        )
        weak = pair_entanglement_profile(
            ArrayConfig.homogeneous(6, eta=1.0, kappa=0.02, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
        )
        assert strong.raw.argmax() == 0
        assert strong.raw.min() > 0.0
        assert np.all(weak.raw >= strong.raw - 1e-12)

    def test_loss_never_helps(self):
        profiles = [
            pair_entanglement_profile(
                ArrayConfig.homogeneous(4, eta=1.0, kappa=k, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
            ).raw
            for k in (0.0, 0.05, 0.2)
        ]
        assert np.all(profiles[1] <= profiles[0] + 1e-9)
        assert np.all(profiles[2] <= profiles[1] + 1e-9)

    def test_replication_never_beats_the_drive(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            nbar = rng.uniform(0.2, 2.0)
            mbar = rng.uniform(0.5, 1.0) * squeezing_bound(nbar)
            cfg = ArrayConfig.homogeneous(
                3,
                eta=rng.uniform(0.5, 2.0),
                kappa=rng.uniform(0.0, 0.3),
                zeta=rng.uniform(0.5, 2.0),
                nbar=nbar,
                mbar=mbar,
            )
            profile = pair_entanglement_profile(cfg)
            assert np.all(profile.raw <= profile.drive_raw + 1e-9)

    def test_swapping_the_arrays_preserves_the_profile(self):
        rng = np.random.default_rng(9)
        n = 4
        eta_one, eta_two = rng.uniform(0.5, 1.5, n - 1), rng.uniform(0.5, 1.5, n - 1)
        kap_one, kap_two = rng.uniform(0.0, 0.2, n), rng.uniform(0.0, 0.2, n)
        cfg = ArrayConfig(
            n_sites=n,
            eta=tuple(eta_one) + tuple(eta_two),
            kappa=tuple(kap_one) + tuple(kap_two),
            zeta=1.0,
            nbar=1.0,
            mbar=1.3,
        )
        swapped = replace(
            cfg,
            eta=tuple(eta_two) + tuple(eta_one),
            kappa=tuple(kap_two) + tuple(kap_one),
        )
        direct = pair_entanglement_profile(cfg)
        mirrored = pair_entanglement_profile(swapped)
        assert np.abs(direct.raw - mirrored.raw).max() <= 1e-10

    def test_end_loss_sweep_recovers_interior_pairs(self):
        # loss on the far end only: the terminal pair decays monotonically
        # while interior pairs dip and then recover as the end site is
        # overdamped out of the dynamics
        lossless = pair_entanglement_profile(
            ArrayConfig.homogeneous(5, eta=1.0, kappa=0.0, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
        )
        grid = np.logspace(-2, 2, 9)
        curves = np.array(
            [
                pair_entanglement_profile(
                    end_driven_config(5, k, eta=1.0, zeta=1.0, nbar=1.0, mbar=math.sqrt(2.0))
                ).normalized
                for k in grid
            ]
        )
        assert np.all(np.diff(curves[:, -1]) <= 1e-10)
        interior = curves[:, 1:-1]
        assert np.all(interior[-1] >= 0.95 * lossless.normalized[1:-1])
        assert np.all(interior.min(axis=0) < interior[0] - 1e-6)


class TestDisorder:
    def make_spec(self, delta_xi=0.2, samples=6, seed=77):
        base = ArrayConfig.homogeneous(3, eta=1.0, kappa=0.02, zeta=1.0, nbar=1.0, mbar=1.3)
        return DisorderSpec(base=base, delta_xi=delta_xi, samples=samples, seed=seed)

    def test_deterministic_under_seed(self):
        first = disorder_sweep(self.make_spec())
        second = disorder_sweep(self.make_spec())
        assert np.array_equal(first.norm_mean, second.norm_mean)
        assert np.array_equal(first.norm_min, second.norm_min)
        assert np.array_equal(first.norm_sem, second.norm_sem)

    def test_worker_count_does_not_change_results(self):
        serial = disorder_sweep(self.make_spec(samples=8))
        parallel = disorder_sweep(self.make_spec(samples=8), workers=2)
        assert np.array_equal(serial.norm_mean, parallel.norm_mean)
        assert np.array_equal(serial.raw_mean, parallel.raw_mean)

    def test_zero_width_collapses_to_homogeneous(self):
        spec = self.make_spec(delta_xi=0.0, samples=4)
        result = disorder_sweep(spec)
        homogeneous = pair_entanglement_profile(spec.base)
        assert np.abs(result.norm_mean - homogeneous.normalized).max() <= 1e-12
        assert np.array_equal(result.norm_min, result.norm_max)
        assert np.array_equal(result.norm_sem, np.zeros(3))

    def test_spread_statistics_are_consistent(self):
        result = disorder_sweep(self.make_spec(delta_xi=0.5, samples=12))
        assert np.all(result.norm_min <= result.norm_mean + 1e-15)
        assert np.all(result.norm_mean <= result.norm_max + 1e-15)
        assert np.all(result.norm_sem >= 0.0)

    def test_rejects_inhomogeneous_base_and_wide_disorder(self):
        base = ArrayConfig(
            n_sites=2, eta=(1.0, 0.9), kappa=(0.0,) * 4, zeta=1.0, nbar=0.5, mbar=0.5
        )
        with pytest.raises(ConfigInvalid):
            DisorderSpec(base=base, delta_xi=0.1, samples=2, seed=1)
        good = ArrayConfig.homogeneous(2, eta=1.0, zeta=1.0, nbar=0.5, mbar=0.5)
        with pytest.raises(ConfigInvalid):
            DisorderSpec(base=good, delta_xi=1.0, samples=2, seed=1)
