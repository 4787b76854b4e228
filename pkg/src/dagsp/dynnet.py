"""Dynamic contact networks, their time-unrolled DAG, and SIR infection signals.

Node ``(v, t)`` of the unrolled DAG (``t`` is the 0-based time index, with
one extra final step ``m``) has node index and topological position
``t * n_individuals + v``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import as_seed_sequence
from .dag import WeightedDag
from .exceptions import InitialExceedsPopulation, NegativeDistance, ParseError

__all__ = [
    "DynamicNetwork",
    "SirConfig",
    "SirTrace",
    "unroll",
    "assign_influence_weights",
    "infection_force",
    "sir_simulate",
    "ingest_contacts",
    "synth_contacts",
]

SUSCEPTIBLE, INFECTED, RECOVERED = 0, 1, 2


@dataclass(frozen=True)
class DynamicNetwork:
    """Undirected contacts ``(t, u, v, distance)`` among ``n_individuals`` over ``n_times`` steps.

    ``t`` is a 0-based time index. Contacts are stored with ``u < v``, one
    per unordered pair and time step.
    """

    n_individuals: int
    n_times: int
    contacts: tuple = ()
    times: tuple | None = None

    def __post_init__(self):
        norm = {}
        for t, u, v, d in self.contacts:
            t, u, v, d = int(t), int(u), int(v), float(d)
            if d < 0:
                raise NegativeDistance(f"negative distance {d} at t={t}")
            if u == v:
                continue
            if not (0 <= u < self.n_individuals and 0 <= v < self.n_individuals):
                raise ValueError(f"individual out of range in contact {(t, u, v)}")
            if not 0 <= t < self.n_times:
                raise ValueError(f"time index {t} out of range")
            key = (t, min(u, v), max(u, v))
            norm[key] = min(d, norm.get(key, np.inf))
        contacts = tuple((t, u, v, d) for (t, u, v), d in sorted(norm.items()))
        object.__setattr__(self, "contacts", contacts)
        if self.times is None:
            object.__setattr__(self, "times", tuple(range(self.n_times)))

    def with_cutoff(self, cutoff):
        """Drop contacts farther apart than ``cutoff``."""
        kept = tuple(c for c in self.contacts if c[3] <= cutoff)
        return DynamicNetwork(self.n_individuals, self.n_times, kept, self.times)

    def contacts_at(self, t):
        return [c for c in self.contacts if c[0] == t]

    def node(self, v, t):
        return t * self.n_individuals + v


@dataclass(frozen=True)
class SirConfig:
    rho: float = 10.0
    eps: float = 20.0
    recovery_delay: int = 5
    initial_infected: int = 9
    seed: int | None = None

    def __post_init__(self):
        if self.rho <= 0 or self.eps <= 0:
            raise ValueError("rho and eps must be positive")
        if self.recovery_delay < 1:
            raise ValueError("recovery_delay must be at least 1")
        if self.initial_infected < 0:
            raise ValueError("initial_infected must be nonnegative")


@dataclass
class SirTrace:
    """Simulated epidemic.

    ``state[t, v]`` is 0/1/2 for susceptible/infected/recovered over
    ``n_times + 1`` steps (the extra last step copies the one before).
    ``signal`` is the binary infection indicator flattened in DAG order.
    """

    state: np.ndarray
    infected_at: np.ndarray = field(default=None)

    @property
    def signal(self):
        return (self.state == INFECTED).astype(float).ravel()

    def infected(self, t):
        return set(np.flatnonzero(self.state[t] == INFECTED).tolist())

    def susceptible(self, t):
        return set(np.flatnonzero(self.state[t] == SUSCEPTIBLE).tolist())

    def recovered(self, t):
        return set(np.flatnonzero(self.state[t] == RECOVERED).tolist())


def _labels(net):
    return [f"{v}@{t}" for t in range(net.n_times + 1) for v in range(net.n_individuals)]


def _unrolled_edges(net, contact_weight):
    nv = net.n_individuals
    edges = []
    for t in range(net.n_times):
        for v in range(nv):
            edges.append((t * nv + v, (t + 1) * nv + v, 1.0))
    for t, u, v, d in net.contacts:
        w = contact_weight(d)
        if w == 0.0:
            continue
        edges.append((t * nv + u, (t + 1) * nv + v, w))
        edges.append((t * nv + v, (t + 1) * nv + u, w))
    return edges


def unroll(net: DynamicNetwork) -> WeightedDag:
    """Time-unrolled DAG with unit weights; ``|V| * (m + 1)`` nodes.

    Each individual links to itself one step later, and each contact at
    step ``t`` links both individuals to each other at step ``t + 1``.
    """
    n = net.n_individuals * (net.n_times + 1)
    edges = _unrolled_edges(net, lambda d: 1.0)
    return WeightedDag(n, edges, labels=_labels(net), topo_order=np.arange(n))


def assign_influence_weights(dag: WeightedDag, net: DynamicNetwork) -> WeightedDag:
    """Self edges keep weight 1, contact edges get ``exp(-distance)``.

    Contacts whose weight underflows to 0 are not edges.
    """
    if dag.n != net.n_individuals * (net.n_times + 1):
        raise ValueError("dag does not match the network size")
    edges = _unrolled_edges(net, lambda d: float(np.exp(-d)))
    return WeightedDag(dag.n, edges, labels=dag.labels, topo_order=dag.topo_order)


def infection_force(d, rho=10.0, eps=20.0):
    """Cutoff exponential ``exp(-d / rho)`` for ``d <= eps``, else 0."""
    d = np.asarray(d, dtype=float)
    return np.where(d <= eps, np.exp(-d / rho), 0.0)


def sir_simulate(net: DynamicNetwork, cfg: SirConfig, seed=None) -> SirTrace:
    """Discrete-time SIR run on the contact network.

    ``initial_infected`` individuals are infected at step 0. A susceptible
    ``v`` is infected at ``t + 1`` with probability ``1 - exp(-force)``,
    where ``force`` sums :func:`infection_force` over its contacts with
    individuals infected at ``t``. Infection at ``t`` lasts until
    ``t + recovery_delay``, after which the individual is immune.
    """
    nv, m = net.n_individuals, net.n_times
    if cfg.initial_infected > nv:
        raise InitialExceedsPopulation(f"{cfg.initial_infected} initial infections among {nv} individuals")
    ss = as_seed_sequence(cfg.seed if seed is None else seed)
    init_rng, step_rng = (np.random.default_rng(s) for s in ss.spawn(2))

    by_time = [[] for _ in range(m)]
    for t, u, v, d in net.contacts:
        by_time[t].append((u, v, d))

    state = np.zeros((m + 1, nv), dtype=np.int8)
    infected_at = np.full(nv, -1, dtype=np.int64)
    if m == 0:
        return SirTrace(state, infected_at)
    seeds = init_rng.choice(nv, size=cfg.initial_infected, replace=False)
    state[0, seeds] = INFECTED
    infected_at[seeds] = 0

    for t in range(m - 1):
        cur = state[t]
        force = np.zeros(nv)
        for u, v, d in by_time[t]:
            lam = float(infection_force(d, cfg.rho, cfg.eps))
            if cur[u] == INFECTED and cur[v] == SUSCEPTIBLE:
                force[v] += lam
            if cur[v] == INFECTED and cur[u] == SUSCEPTIBLE:
                force[u] += lam
        draws = step_rng.random(nv)
        nxt = cur.copy()
        newly = (cur == SUSCEPTIBLE) & (draws < 1.0 - np.exp(-force))
        nxt[newly] = INFECTED
        infected_at[newly] = t + 1
        recover = (cur == INFECTED) & (infected_at >= 0) & (t + 1 - infected_at >= cfg.recovery_delay)
        nxt[recover] = RECOVERED
        state[t + 1] = nxt
    state[m] = state[m - 1]
    return SirTrace(state, infected_at)


def ingest_contacts(path, stride=1, cutoff=None, n_individuals=None) -> DynamicNetwork:
    """Read a ``t,u,v,distance`` CSV.

    Time stamps are sorted and mapped to consecutive indices, keeping only
    every ``stride``-th one. Individuals may be integers or arbitrary
    labels (mapped in first-appearance order).
    """
    if stride < 1:
        raise ValueError("stride must be at least 1")
    rows = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return DynamicNetwork(n_individuals or 0, 0)
        header = [h.strip().lower() for h in header]
        if header != ["t", "u", "v", "distance"]:
            raise ParseError(f"expected header t,u,v,distance, got {','.join(header)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line=lineno)
            t, u, v, d = (c.strip() for c in row)
            try:
                tval, dval = float(t), float(d)
            except ValueError:
                raise ParseError(f"non-numeric time or distance {t!r}, {d!r}", line=lineno) from None
            if dval < 0:
                raise NegativeDistance(f"line {lineno}: negative distance {dval}")
            rows.append((tval, u, v, dval))

    ids = {}
    for _, u, v, _ in rows:
        for x in (u, v):
            if x not in ids:
                ids[x] = len(ids)
    if all(x.lstrip("-").isdigit() for x in ids):
        ids = {x: int(x) for x in ids}
    n_ind = n_individuals if n_individuals is not None else (max(ids.values()) + 1 if ids else 0)

    stamps = sorted({r[0] for r in rows})
    kept = stamps[::stride]
    t_index = {ts: i for i, ts in enumerate(kept)}
    contacts = [
        (t_index[t], ids[u], ids[v], d)
        for t, u, v, d in rows
        if t in t_index and (cutoff is None or d <= cutoff)
    ]
    return DynamicNetwork(n_ind, len(kept), tuple(contacts), times=tuple(kept))


def synth_contacts(n_individuals, n_times, arena=100.0, step=5.0, contact_radius=20.0,
                   n_hubs=4, hub_pull=0.3, positions=None, seed=None) -> DynamicNetwork:
    """Seeded random-walk proximity data.

    Individuals start at ``positions`` (or uniformly in a square arena of
    side ``arena``) and at every step move by a Gaussian displacement of
    scale ``step`` plus a pull of strength ``hub_pull`` toward one of
    ``n_hubs`` fixed gathering points, reflected at the walls. Every pair
    closer than ``contact_radius`` at a step is recorded with its distance.
    """
    rng = np.random.default_rng(seed)
    if positions is None:
        pos = rng.uniform(0.0, arena, size=(n_individuals, 2))
    else:
        pos = np.array(positions, dtype=float).reshape(n_individuals, 2)
    hubs = rng.uniform(0.2 * arena, 0.8 * arena, size=(max(n_hubs, 1), 2))
    home = rng.integers(0, hubs.shape[0], size=n_individuals)
    iu, ju = np.triu_indices(n_individuals, k=1)
    contacts = []
    for t in range(n_times):
        diff = pos[iu] - pos[ju]
        dist = np.sqrt((diff ** 2).sum(axis=1))
        close = dist <= contact_radius
        contacts.extend(zip([t] * int(close.sum()), iu[close].tolist(), ju[close].tolist(), dist[close].tolist()))
        if n_hubs > 0 and hub_pull > 0:
            target = hubs[rng.integers(0, hubs.shape[0], size=n_individuals)]
            target = np.where((rng.random(n_individuals) < 0.7)[:, None], hubs[home], target)
            pos = pos + hub_pull * (target - pos)
        pos = pos + step * rng.standard_normal(pos.shape)
        pos = np.abs(pos)
        pos = arena - np.abs(arena - pos)
    return DynamicNetwork(n_individuals, n_times, tuple(contacts))
