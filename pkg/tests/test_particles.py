from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxlab import particles as P
from relaxlab.model import mean_jump_length, zeta


@pytest.fixture(scope="module")
def rates16():
    return P.build_rates(16, 2.0)


# ------------------------------------------------------------------ rates


def test_jump_law_normalised():
    r = P.build_rates(64, 2.0)
    assert r.p[1] == pytest.approx(1 / zeta(3.0), rel=1e-12)
    # p summed to N plus the exact tail beyond N equals one
    assert r.r_minus[1] == pytest.approx(1.0, abs=1e-9)
    assert r.mean_jump == pytest.approx(mean_jump_length(2.0))


def test_reservoir_tail_decay():
    """r_-(i) = sum_{k >= i} p(k) behaves like c i^-g / g."""
    r = P.build_rates(1024, 2.0)
    i = np.array([10, 100, 500])
    approx = r.c * i**-2.0 / 2.0
    assert np.all(np.abs(r.r_minus[i] / approx - 1) < 0.15)
    assert np.allclose(r.r_plus[1:], r.r_minus[1:][::-1])


def test_bulk_truncated_at_right_edge(rates16):
    assert rates16.bulk[15] == 0.0
    assert rates16.bulk[14] == pytest.approx(rates16.p[1])
    assert np.all(np.diff(rates16.bulk[1:]) <= 0)


@pytest.mark.parametrize("N, gamma", [(3, 2.0), (16, 1.0), (16, 0.5)])
def test_build_rates_rejects(N, gamma):
    with pytest.raises(ValueError):
        P.build_rates(N, gamma)


@pytest.mark.parametrize("kwargs", [dict(alpha=1.2), dict(beta=-0.1), dict(gamma=0.9)])
def test_state_validation(kwargs):
    args = dict(N=8, gamma=2.0, alpha=0.5, beta=0.5, profile=0.5)
    args.update(kwargs)
    with pytest.raises(ValueError):
        P.ParticleState.bernoulli(**args)


def test_state_rejects_non_binary_configuration():
    with pytest.raises(ValueError):
        P.ParticleState(8, np.array([0, 1, 2, 0, 0, 0, 0, 0]), 2.0, 0.5, 0.5)


# ---------------------------------------------------------------- Fenwick


@settings(max_examples=40)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=200), st.integers(0, 2**31))
def test_fenwick_matches_cumsum_search(vals, seed):
    n = len(vals)
    rates = np.zeros(n + 1)
    rates[1:] = vals
    tree = np.zeros(n + 1)
    P._fenwick_build(rates, tree)
    total = rates.sum()
    assert P._fenwick_total(tree) == pytest.approx(total)
    if total == 0:
        return
    log2n = max(n.bit_length() - 1, 0)
    cum = np.cumsum(rates)
    rng = np.random.default_rng(seed)
    for u in rng.random(20) * total:
        i = P._fenwick_find(tree, u, log2n)
        assert i == min(int(np.searchsorted(cum, u, side="left")), n)
    # random update keeps sums exact
    j = int(rng.integers(1, n + 1))
    P._fenwick_add(tree, j, 3.0)
    assert P._fenwick_total(tree) == pytest.approx(total + 3.0)


# -------------------------------------------------------------- dynamics


def test_single_particle_drift():
    """One particle far from the edge with no reservoirs moves at mean speed m N per unit time."""
    N, T, seeds = 4096, 2e-3, range(40)
    d = []
    for s in seeds:
        eta = np.zeros(N, dtype=np.int8)
        eta[1] = 1
        st_ = P.ParticleState(N, eta, 2.0, 0.0, 0.0, rng_seed=s, reservoirs=False)
        d.append(P.simulate(st_, T).displacement / (N * T))
    se = np.std(d) / np.sqrt(len(d))
    assert abs(np.mean(d) - mean_jump_length(2.0)) < 4 * se + 0.05


def test_full_reservoir_fills_lattice():
    st_ = P.ParticleState.bernoulli(64, 2.0, 1.0, 1.0, 0.0, seed=1)
    s = P.simulate(st_, 5.0)
    assert st_.count == 63 and s.exits.sum() == 0


def test_empty_reservoir_drains_lattice():
    st_ = P.ParticleState.bernoulli(64, 2.0, 0.0, 0.0, 1.0, seed=1)
    s = P.simulate(st_, 5.0)
    assert st_.count == 0 and s.entries.sum() == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_count_balance(seed):
    st_ = P.ParticleState.bernoulli(128, 2.0, 0.8, 0.2, 0.5, seed=seed)
    s = P.simulate(st_, 0.5, sample_times=[0.25, 0.5])
    assert s.final_count - s.initial_count == s.net_inflow
    assert s.eta[-1].sum() == s.final_count


def test_closed_system_conserves_count():
    st_ = P.ParticleState.bernoulli(128, 2.0, 0.3, 0.3, 0.5, seed=4, reservoirs=False)
    n0 = st_.count
    s = P.simulate(st_, 0.5)
    assert st_.count == n0 and s.entries.sum() == s.exits.sum() == 0 and s.n_events > 0


def test_seeded_determinism():
    a = P.run_ensemble(128, 2.0, 0.8, 0.2, 0.5, 0.5, [0.25, 0.5], [7], batches=3)[0]
    b = P.run_ensemble(128, 2.0, 0.8, 0.2, 0.5, 0.5, [0.25, 0.5], [7], batches=3)[0]
    assert np.array_equal(a.eta, b.eta) and np.array_equal(a.occupation, b.occupation)
    assert a.n_events == b.n_events


def test_workers_do_not_change_results():
    serial = P.run_ensemble(128, 2.0, 0.8, 0.2, 0.5, 0.5, [0.5], range(4), workers=1)
    threaded = P.run_ensemble(128, 2.0, 0.8, 0.2, 0.5, 0.5, [0.5], range(4), workers=3)
    assert all(np.array_equal(a.eta, b.eta) for a, b in zip(serial, threaded))


def test_event_log_replay_respects_exclusion():
    s = P.run_ensemble(64, 2.0, 0.7, 0.3, 0.5, 0.2, [0.2], [3], log_events=5000)[0]
    log = s.event_log
    assert len(log) == min(5000, s.n_events)
    assert np.all(np.diff(log["t"]) >= 0)
    eta = np.concatenate([[0], s.initial_eta]).astype(int)
    for ev in log:
        i, j, kind = int(ev["site"]), int(ev["target"]), int(ev["kind"])
        if kind in (P.EV_ENTER_LEFT, P.EV_ENTER_RIGHT):
            assert eta[i] == 0
            eta[i] = 1
        elif kind in (P.EV_EXIT_LEFT, P.EV_EXIT_RIGHT):
            assert eta[i] == 1
            eta[i] = 0
        elif kind == P.EV_JUMP:
            assert eta[i] == 1 and eta[j] == 0 and j > i
            eta[i], eta[j] = 0, 1
    if len(log) == s.n_events:
        assert np.array_equal(eta[1:], s.eta[-1])


def test_simulate_argument_checks():
    st_ = P.ParticleState.bernoulli(32, 2.0, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        P.simulate(st_, 1.0, sample_times=[2.0])
    with pytest.raises(ValueError):
        P.simulate(st_, 1.0, rates=P.build_rates(16, 2.0))
    P.simulate(st_, 0.5)
    with pytest.raises(ValueError):
        P.simulate(st_, 0.25)


def test_audit_runs_without_desync():
    st_ = P.ParticleState.bernoulli(256, 2.0, 0.8, 0.2, 0.5, seed=2)
    s = P.simulate(st_, 0.5, audit_every=1000)
    assert s.n_events > 10_000


# -------------------------------------------------------------- densities


def test_all_ones_density():
    assert np.all(P.block_average(np.ones(255), 256, 64) == 1.0)


def test_checkerboard_density():
    N, n = 256, 64
    eta = (np.arange(1, N) % 2).astype(float)
    dens = P.block_average(eta, N, n)
    sizes = P.block_sizes(N, n)
    assert sizes.sum() == N - 1
    assert np.all(np.abs(dens - 0.5) <= 1 / (2 * sizes) + 1e-15)


def test_density_needs_enough_sites():
    with pytest.raises(ValueError):
        P.block_average(np.ones(31), 32, 64)


def test_empirical_density_window():
    runs = P.run_ensemble(128, 2.0, 0.8, 0.2, 0.5, 0.5, [0.25, 0.375, 0.5], range(2))
    fld = P.empirical_density(runs, 16, window=(0.3, 0.5))
    assert np.allclose(fld.u, np.mean(fld.history_u[1:], axis=0))
    assert fld.times().tolist() == [0.25, 0.375, 0.5]
    with pytest.raises(ValueError):
        P.empirical_density(runs, 16, window=(0.0, 0.1))


def test_hydrodynamic_flux_speed():
    s = P.hydrodynamic_scenario(2.0, 0.8, 0.2, 0.5, 1.0)
    assert s.flux(np.array(0.5)) == pytest.approx(mean_jump_length(2.0) / 4)
    lit = P.hydrodynamic_scenario(2.0, 0.8, 0.2, 0.5, 1.0, literal_flux=True)
    assert lit.flux(np.array(0.5)) == pytest.approx(0.25)


def test_equilibrium_within_three_standard_errors():
    """Reservoirs at equal density keep every site at that density (seeds 0-9, batch means)."""
    from tests.helpers import equilibrium_zscores

    z = equilibrium_zscores()
    assert np.max(np.abs(z)) < 3.0
