"""Long-jump totally asymmetric exclusion on {1, ..., N-1} with infinitely extended reservoirs.

Bulk: a particle at i jumps to the vacant site i + k (k >= 1, i + k <= N - 1)
at rate N p(k), p(k) = c k^-(1+gamma). Reservoirs: site i gains a particle at
rate N^gamma alpha r_-(i) and loses one at rate N^gamma (1 - alpha) r_-(i),
with r_-(i) = sum_{k >= i} p(k) (same on the right with beta, r_+(i)).

The simulation is an exact Gillespie chain over one event class per site,
stored in a Fenwick tree. Bulk jumps are drawn from the site's total jump
rate and discarded when the target is occupied (thinning), which keeps every
update local; the discarded proposals are exact null events of the chain.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from relaxlab.fv_solver import Field, Grid
from relaxlab.model.flux import quadratic_traffic
from relaxlab.model.scenario import make_canonical_scenario, mean_jump_length
from relaxlab.model.special import c_gamma, tail_sums

AUDIT_EVERY = 1_000_000
AUDIT_TOL = 1e-8

# event-log kinds
EV_ENTER_LEFT, EV_ENTER_RIGHT, EV_EXIT_LEFT, EV_EXIT_RIGHT, EV_JUMP, EV_NULL = range(6)
EVENT_NAMES = ("enter-left", "enter-right", "exit-left", "exit-right", "jump", "null")


class RateDesyncError(RuntimeError):
    pass


@dataclass(frozen=True)
class RateTables:
    """Jump law and reservoir tails for lattice size N (index arrays by k or i)."""

    N: int
    gamma: float
    c: float
    p: np.ndarray  # p[k], k = 0..N, p[0] = 0
    cdf: np.ndarray  # cdf[k] = sum_{j <= k} p(j)
    r_minus: np.ndarray  # r_minus[i] = sum_{k >= i} p(k), i = 1..N-1
    r_plus: np.ndarray  # r_plus[i] = sum_{k >= N - i} p(k)
    bulk: np.ndarray  # bulk[i] = sum_{k <= N-1-i} p(k), jumps that stay in the lattice

    @property
    def mean_jump(self) -> float:
        return mean_jump_length(self.gamma)


def build_rates(N: int, gamma: float) -> RateTables:
    if N < 4:
        raise ValueError(f"lattice size N must be >= 4, got {N}")
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1 (finite mean jump), got {gamma}")
    c = c_gamma(gamma)
    k = np.arange(N + 1, dtype=float)
    p = np.zeros(N + 1)
    p[1:] = c * k[1:] ** (-(1.0 + gamma))
    cdf = np.cumsum(p)
    tails = c * tail_sums(1.0 + gamma, N)  # tails[i] = sum_{k >= i} p(k), exact tail beyond N
    i = np.arange(N)
    r_minus = np.zeros(N)
    r_plus = np.zeros(N)
    bulk = np.zeros(N)
    r_minus[1:] = tails[1:N]
    r_plus[1:] = tails[N - i[1:]]
    bulk[1:] = cdf[N - 1 - i[1:]]
    return RateTables(N, float(gamma), c, p, cdf, r_minus, r_plus, bulk)


@dataclass
class ParticleState:
    N: int
    eta: np.ndarray  # int8 occupancy, index 0 unused so eta[i] is site i
    gamma: float
    alpha: float
    beta: float
    t: float = 0.0
    rng_seed: int = 0
    reservoirs: bool = True
    rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError("gamma must exceed 1")
        for name, v in (("alpha", self.alpha), ("beta", self.beta)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        self.eta = np.asarray(self.eta, dtype=np.int8)
        if self.eta.shape != (self.N,) or np.any((self.eta != 0) & (self.eta != 1)):
            raise ValueError("eta must be a 0/1 array of length N (index 0 unused)")
        self.eta[0] = 0
        if self.rng is None:
            self.rng = np.random.default_rng(self.rng_seed)

    @classmethod
    def bernoulli(cls, N, gamma, alpha, beta, profile, seed: int = 0, reservoirs: bool = True) -> ParticleState:
        """Product Bernoulli start with site densities profile(i/N) (a number or a function of x)."""
        rng = np.random.default_rng(seed)
        x = np.arange(N) / N
        dens = np.asarray(profile(x) if callable(profile) else np.full(N, float(profile)), dtype=float)
        eta = (rng.random(N) < dens).astype(np.int8)
        return cls(N, eta, gamma, alpha, beta, 0.0, seed, reservoirs, rng)

    @property
    def sites(self) -> np.ndarray:
        return self.eta[1:]

    @property
    def count(self) -> int:
        return int(self.eta[1:].sum())


@dataclass
class ParticleSamples:
    N: int
    times: np.ndarray
    eta: np.ndarray  # (len(times), N-1) snapshots of sites 1..N-1
    entries: np.ndarray  # [left, right]
    exits: np.ndarray
    n_events: int
    n_null: int
    displacement: int  # total lattice distance travelled by bulk jumps
    occupation: np.ndarray | None = None  # (batches, N-1) time-averaged occupancy per batch
    batch_edges: np.ndarray | None = None
    initial_count: int = 0
    final_count: int = 0
    event_log: np.ndarray | None = None  # structured (t, kind, site, target), first log_events events
    initial_eta: np.ndarray | None = None

    @property
    def net_inflow(self) -> int:
        return int(self.entries.sum() - self.exits.sum())


# -------------------------------------------------------------- numba kernel

@numba.njit(cache=True)
def _site_rate(i, eta, Ng, Nb, alpha, beta, rm, rp, bulk, reservoirs):
    r = 0.0
    if reservoirs:
        if eta[i] == 0:
            r += Ng * (alpha * rm[i] + beta * rp[i])
        else:
            r += Ng * ((1.0 - alpha) * rm[i] + (1.0 - beta) * rp[i])
    if eta[i] == 1:
        r += Nb * bulk[i]
    return r


@numba.njit(cache=True)
def _fenwick_build(rates, tree):
    n = rates.shape[0] - 1
    for i in range(1, n + 1):
        tree[i] = rates[i]
    for i in range(1, n + 1):
        j = i + (i & (-i))
        if j <= n:
            tree[j] += tree[i]


@numba.njit(cache=True)
def _fenwick_add(tree, i, delta):
    n = tree.shape[0] - 1
    while i <= n:
        tree[i] += delta
        i += i & (-i)


@numba.njit(cache=True)
def _fenwick_find(tree, target, log2n):
    """Smallest index i with prefix sum >= target (prefix sums of positive rates)."""
    n = tree.shape[0] - 1
    pos = 0
    step = 1 << log2n
    while step > 0:
        nxt = pos + step
        if nxt <= n and tree[nxt] < target:
            pos = nxt
            target -= tree[nxt]
        step >>= 1
    return min(pos + 1, n)


@numba.njit(cache=True)
def _fenwick_total(tree):
    n = tree.shape[0] - 1
    s = 0.0
    i = n
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


@numba.njit(cache=True, nogil=True)
def _simulate(eta, t0, horizon, sample_times, out_eta, batch_edges, occ, rng,
              N, gamma, alpha, beta, rm, rp, bulk, cdf, reservoirs, audit_every, audit_tol,
              log_t, log_kind, log_i, log_j):
    n = N - 1  # sites 1..n
    Ng = float(N) ** gamma
    Nb = float(N)
    rates = np.zeros(n + 1)
    tree = np.zeros(n + 1)
    for i in range(1, n + 1):
        rates[i] = _site_rate(i, eta, Ng, Nb, alpha, beta, rm, rp, bulk, reservoirs)
    _fenwick_build(rates, tree)
    log2n = 0
    while (1 << (log2n + 1)) <= n:
        log2n += 1
    total = _fenwick_total(tree)

    entries = np.zeros(2, dtype=np.int64)
    exits = np.zeros(2, dtype=np.int64)
    n_events = 0
    n_null = 0
    disp = 0
    status = 0
    n_logged = 0
    cap = log_t.shape[0]
    t = t0
    n_samples = sample_times.shape[0]
    s_idx = 0
    n_batches = occ.shape[0]
    b_idx = 0
    last = np.full(n + 1, t0)
    # skip batches/samples that precede t0
    while b_idx < n_batches and batch_edges[b_idx + 1] <= t0:
        b_idx += 1

    while True:
        if total <= 0.0:
            t_next = np.inf
        else:
            t_next = t - math.log(1.0 - rng.random()) / total
        t_stop = t_next if t_next < horizon else horizon
        # samples and batch boundaries passed before the next event
        while s_idx < n_samples and sample_times[s_idx] <= t_stop:
            for i in range(1, n + 1):
                out_eta[s_idx, i - 1] = eta[i]
            s_idx += 1
        while b_idx < n_batches and batch_edges[b_idx + 1] <= t_stop:
            edge = batch_edges[b_idx + 1]
            for i in range(1, n + 1):
                occ[b_idx, i - 1] += eta[i] * (edge - last[i])
                last[i] = edge
            b_idx += 1
        if t_next >= horizon:
            t = horizon
            break
        t = t_next
        n_events += 1

        i = _fenwick_find(tree, rng.random() * total, log2n)
        ri = rates[i]
        u = rng.random() * ri
        changed_a = -1
        changed_b = -1
        kind = EV_NULL
        target_site = i
        if reservoirs:
            if eta[i] == 0:
                left = Ng * alpha * rm[i]
                res = left + Ng * beta * rp[i]
            else:
                left = Ng * (1.0 - alpha) * rm[i]
                res = left + Ng * (1.0 - beta) * rp[i]
        else:
            left = 0.0
            res = 0.0
        if u < res:
            side = 0 if u < left else 1
            if b_idx < n_batches:
                occ[b_idx, i - 1] += eta[i] * (t - last[i])
            last[i] = t
            if eta[i] == 0:
                eta[i] = 1
                entries[side] += 1
                kind = EV_ENTER_LEFT + side
            else:
                eta[i] = 0
                exits[side] += 1
                kind = EV_EXIT_LEFT + side
            changed_a = i
        else:
            # bulk jump with law p restricted to k <= n - i, by inverse CDF
            kmax = n - i
            if kmax < 1:
                n_null += 1
            else:
                target = rng.random() * cdf[kmax]
                k = np.searchsorted(cdf[: kmax + 1], target, side="right")
                if k < 1:
                    k = 1
                if k > kmax:
                    k = kmax
                j = i + k
                if eta[j] == 1:
                    n_null += 1
                else:
                    if b_idx < n_batches:
                        occ[b_idx, i - 1] += eta[i] * (t - last[i])
                        occ[b_idx, j - 1] += eta[j] * (t - last[j])
                    last[i] = t
                    last[j] = t
                    eta[i] = 0
                    eta[j] = 1
                    disp += k
                    changed_a = i
                    changed_b = j
                    kind = EV_JUMP
                    target_site = j
        if n_logged < cap:
            log_t[n_logged] = t
            log_kind[n_logged] = kind
            log_i[n_logged] = i
            log_j[n_logged] = target_site
            n_logged += 1
        for c in (changed_a, changed_b):
            if c > 0:
                new = _site_rate(c, eta, Ng, Nb, alpha, beta, rm, rp, bulk, reservoirs)
                _fenwick_add(tree, c, new - rates[c])
                rates[c] = new
        total = _fenwick_total(tree)

        if n_events % audit_every == 0:
            exact = 0.0
            for s in range(1, n + 1):
                exact += _site_rate(s, eta, Ng, Nb, alpha, beta, rm, rp, bulk, reservoirs)
            if abs(exact - total) > audit_tol * max(exact, 1.0):
                status = 1
                break
            for s in range(1, n + 1):
                rates[s] = _site_rate(s, eta, Ng, Nb, alpha, beta, rm, rp, bulk, reservoirs)
            _fenwick_build(rates, tree)
            total = _fenwick_total(tree)

    # flush the last open batch
    if b_idx < n_batches:
        edge = min(batch_edges[b_idx + 1], t)
        for i in range(1, n + 1):
            occ[b_idx, i - 1] += eta[i] * (edge - last[i])
    return t, entries, exits, n_events, n_null, disp, status, n_logged


LOG_DTYPE = np.dtype([("t", "f8"), ("kind", "i1"), ("site", "i8"), ("target", "i8")])


def simulate(state: ParticleState, horizon: float, sample_times=(), batches: int = 0,
             rates: RateTables | None = None, audit_every: int = AUDIT_EVERY,
             log_events: int = 0) -> ParticleSamples:
    """Run the chain from ``state.t`` to ``horizon`` (macroscopic time), mutating ``state``.

    ``sample_times`` get eta snapshots; ``batches > 0`` additionally records the
    exact time-averaged occupancy of each site over that many equal batches of
    [state.t, horizon]. ``log_events > 0`` keeps the first that many events.
    """
    if horizon < state.t:
        raise ValueError("horizon precedes the current time")
    rates = rates or build_rates(state.N, state.gamma)
    if rates.N != state.N or rates.gamma != state.gamma:
        raise ValueError("rate tables do not match the state")
    times = np.asarray(sorted(float(s) for s in sample_times), dtype=float)
    if len(times) and (times[0] < state.t or times[-1] > horizon):
        raise ValueError("sample times must lie in [state.t, horizon]")
    out = np.zeros((len(times), state.N - 1), dtype=np.int8)
    edges = np.linspace(state.t, horizon, batches + 1) if batches > 0 else np.array([state.t, state.t])
    occ = np.zeros((max(batches, 0), state.N - 1))
    count0 = state.count
    eta0 = state.sites.copy() if log_events > 0 else None
    cap = max(int(log_events), 0)
    log_t, log_kind = np.zeros(cap), np.zeros(cap, dtype=np.int8)
    log_i, log_j = np.zeros(cap, dtype=np.int64), np.zeros(cap, dtype=np.int64)
    t, entries, exits, n_ev, n_null, disp, status, n_logged = _simulate(
        state.eta, float(state.t), float(horizon), times, out, edges, occ, state.rng,
        state.N, state.gamma, float(state.alpha), float(state.beta),
        rates.r_minus, rates.r_plus, rates.bulk, rates.cdf, bool(state.reservoirs), int(audit_every), AUDIT_TOL,
        log_t, log_kind, log_i, log_j,
    )
    log = None
    if cap:
        log = np.zeros(n_logged, dtype=LOG_DTYPE)
        log["t"], log["kind"] = log_t[:n_logged], log_kind[:n_logged]
        log["site"], log["target"] = log_i[:n_logged], log_j[:n_logged]
    if status:
        raise RateDesyncError(f"rate structure out of sync after {n_ev} events")
    state.t = t
    if batches > 0:
        occ /= np.diff(edges)[:, None]
    return ParticleSamples(state.N, times, out, entries, exits, int(n_ev), int(n_null), int(disp),
                           occ if batches > 0 else None, edges if batches > 0 else None, count0, state.count,
                           log, eta0)


# ------------------------------------------------------------ densities

def _cell_index(N: int, n_cells: int) -> np.ndarray:
    i = np.arange(1, N)
    return np.minimum((i * n_cells) // N, n_cells - 1)


def block_average(eta_sites: np.ndarray, N: int, n_cells: int) -> np.ndarray:
    """Cell averages of site values; cell j holds the sites with i/N in [j/n, (j+1)/n)."""
    if N < n_cells:
        raise ValueError(f"lattice size N={N} is smaller than n_cells={n_cells}")
    idx = _cell_index(N, n_cells)
    eta_sites = np.asarray(eta_sites, dtype=float)
    counts = np.bincount(idx, minlength=n_cells)
    if eta_sites.ndim == 1:
        return np.bincount(idx, weights=eta_sites, minlength=n_cells) / counts
    return np.array([np.bincount(idx, weights=row, minlength=n_cells) / counts for row in eta_sites])


def block_sizes(N: int, n_cells: int) -> np.ndarray:
    return np.bincount(_cell_index(N, n_cells), minlength=n_cells)


def empirical_density(samples, n_cells: int, window=None) -> Field:
    """Block-averaged density on the PDE grid.

    ``samples`` is one ParticleSamples or a list of them (seeds are averaged).
    With ``window=(s, t)`` the returned ``u`` averages the snapshots with
    times in [s, t]; the history holds the per-time ensemble averages.
    """
    runs = [samples] if isinstance(samples, ParticleSamples) else list(samples)
    if not runs or len(runs[0].times) == 0:
        raise ValueError("need at least one sample")
    N = runs[0].N
    times = runs[0].times
    for r in runs:
        if r.N != N or not np.array_equal(r.times, times):
            raise ValueError("ensemble members must share N and sample times")
    mean_eta = np.mean([r.eta.astype(float) for r in runs], axis=0)
    dens = block_average(mean_eta, N, n_cells)
    grid = Grid.uniform(n_cells)
    fld = Field(grid, dens[-1].copy(), float(times[-1]), scenario_name=f"particles(N={N})")
    for t, d in zip(times, dens):
        fld.history_t.append(float(t))
        fld.history_u.append(d)
    if window is not None:
        s, t = window
        sel = (times >= s - 1e-12) & (times <= t + 1e-12)
        if not sel.any():
            raise ValueError(f"no samples inside window {window}")
        fld.u = dens[sel].mean(axis=0)
        fld.t = float(t)
    return fld


def hydrodynamic_scenario(gamma: float, alpha: float, beta: float, u0, T: float, literal_flux: bool = False):
    """Canonical PDE matching the particle system.

    The long-jump TASEP carries current m u(1-u) with m = sum_k k p(k); with
    ``literal_flux`` the unit-speed flux u(1-u) is used instead.
    """
    flux = None if literal_flux else quadratic_traffic(mean_jump_length(gamma))
    return make_canonical_scenario(gamma, alpha, beta, u0, T, flux=flux,
                                   name=f"hydrodynamic(gamma={gamma:g})")


def run_ensemble(N, gamma, alpha, beta, profile, T, sample_times, seeds, batches: int = 0,
                 reservoirs: bool = True, workers: int = 1, log_events: int = 0) -> list[ParticleSamples]:
    """Independent trajectories, one per seed, sharing the rate tables.

    Each trajectory owns its generator, so results do not depend on ``workers``.
    """
    rates = build_rates(N, gamma)

    def one(seed):
        st = ParticleState.bernoulli(N, gamma, alpha, beta, profile, seed=seed, reservoirs=reservoirs)
        return simulate(st, T, sample_times, batches=batches, rates=rates, log_events=log_events)

    seeds = list(seeds)
    if workers <= 1 or len(seeds) <= 1:
        return [one(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, seeds))
