"""Diamond-lattice percolation under fusion photon loss.

The lattice has L^3 unit cells with two sites per cell, the two
five-qubit microclusters assembled inside the cell. Site (c,0) bonds to
(c,1) within the cell, and each (c,1) bonds to the (c+x,0), (c+y,0) and
(c+t,0) sites of the neighboring cells: a coordination-4 diamond graph.
The transverse axes (x, y) are periodic; the time-slice axis t is open and
carries the two spanning faces t=0 and t=L-1.

Eight fusions are attempted per cell. Four assemble the microclusters
(F_C/F_E for site 0, F_D/F_F for site 1) and consume photons of a single
microcluster; F_B consumes one photon from each microcluster of the cell
and creates the intra-cell bond; F_A/F_G/F_H consume one photon from this
cell and one from a neighbor, creating the inter-cell bonds. Every fusion
uses a boosted gate: success probability 3/4 when no photon is lost, plus
an ancilla Bell pair whose photons are lossy at rate a_l because they need
active synchronization. Under the relative scheme exactly one photon per
fusion is actively delayed (loss rate p_l); under the standard scheme both
fusion photons pass through switching networks. The per-fusion loss
probability is f_l = 1 - (1-p_l)^n_lossy * (1-a_l)^2 with n_lossy = 1
(relative) or 2 (standard).

Outcome semantics are configurable. The defaults: a heralded failure
leaves the bond absent and the sites intact; a failure by loss removes the
bond and damages microclusters. Loss damage is attributable under the
relative scheme (only the delayed photon can have vanished, so only its
microcluster is discarded) but not under the standard scheme (either input
may be missing, so both endpoint microclusters are discarded). That
attribution gap, on top of the smaller f_l, is what the relative scheme
buys in loss tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FUSION_SUCCESS_PROB = 0.75

SCHEME_RMUX = "rmux"
SCHEME_STANDARD = "standard"

SUCCESS = "success"
FAIL_HERALDED = "fail_heralded"
FAIL_LOSS = "fail_loss"

# Photon roles within one unit cell: (ghz index 1..6, emission label a|b|c).
# Type A photons stay in the cluster as data qubits; type B photons are
# fused without active delay; type C photons are fused after active delay.
_TYPE_A = {(2, "b"), (5, "b")}
_TYPE_B = {(1, "c"), (2, "a"), (2, "c"), (3, "c"), (4, "c"), (5, "a"),
           (5, "c"), (6, "c")}
_TYPE_C = {(1, "a"), (1, "b"), (3, "a"), (3, "b"), (4, "a"), (4, "b"),
           (6, "a"), (6, "b")}

# Which photons each fusion consumes. The delayed photon fixes which
# microcluster is damaged when a loss is attributable; "own"/"x+"/"y+"/"t+"
# say which cell the photon comes from relative to the fusion's home cell.
PHOTON_ASSIGNMENT = {
    "F_C": {"delayed": ("own", 1, "a"), "passive": ("own", 2, "a")},
    "F_E": {"delayed": ("own", 3, "a"), "passive": ("own", 2, "c")},
    "F_D": {"delayed": ("own", 4, "a"), "passive": ("own", 5, "a")},
    "F_F": {"delayed": ("own", 6, "a"), "passive": ("own", 5, "c")},
    "F_B": {"delayed": ("own", 3, "b"), "passive": ("own", 4, "c")},
    "F_A": {"delayed": ("own", 4, "b"), "passive": ("x+", 1, "c")},
    "F_G": {"delayed": ("own", 6, "b"), "passive": ("y+", 3, "c")},
    "F_H": {"delayed": ("t+", 1, "b"), "passive": ("own", 6, "c")},
}

# Photon-accounting classes: the five fusions consuming only this cell's
# photons (10 photons) versus the three half-shared with neighbors (6).
SITE_FORMING_IDS = ("F_B", "F_C", "F_D", "F_E", "F_F")
BOND_FORMING_IDS = ("F_A", "F_G", "F_H")


def classify_photon(ghz: int, label: str) -> str:
    """Loss class of one unit-cell photon: "A", "B" or "C"."""
    key = (ghz, label)
    if key in _TYPE_A:
        return "A"
    if key in _TYPE_B:
        return "B"
    if key in _TYPE_C:
        return "C"
    raise ValueError(f"unknown photon G{ghz}({label})")


def lossy_inputs(scheme: str) -> int:
    """Actively delayed fusion photons per gate: 1 relative, 2 standard."""
    if scheme == SCHEME_RMUX:
        return 1
    if scheme == SCHEME_STANDARD:
        return 2
    raise ValueError(f"unknown scheme {scheme!r}")


def fusion_loss_probability(p_l: float, a_l: float, n_lossy: int) -> float:
    """Probability that a boosted fusion fails because a photon vanished."""
    if not 0.0 <= p_l <= 1.0 or not 0.0 <= a_l <= 1.0:
        raise ValueError("loss rates must be in [0, 1]")
    if n_lossy not in (1, 2):
        raise ValueError(f"n_lossy must be 1 or 2, got {n_lossy}")
    return 1.0 - (1.0 - p_l) ** n_lossy * (1.0 - a_l) ** 2


@dataclass(frozen=True)
class OutcomeSemantics:
    """How fusion outcomes act on the lattice.

    heralded_bond_connect_prob: chance a heralded (lossless) bond-fusion
        failure still creates the bond. Default 0: failed fusions connect
        nothing.
    loss_kills_owner_site: a fusion that fails by loss removes the
        microcluster that owned the vanished photon.
    standard_loss_damages_both_ends: under the standard scheme a lost
        photon at a bond fusion cannot be attributed, so both endpoint
        microclusters are discarded. Set False to use owner-only damage for
        both schemes.
    heralded_site_kill_prob: chance a heralded failure of a
        microcluster-assembly fusion (F_C/F_E/F_D/F_F) leaves that
        microcluster unusable. Default 0 (site retained); the calibrated
        preset raises it to reproduce the published loss thresholds.
    """

    heralded_bond_connect_prob: float = 0.0
    loss_kills_owner_site: bool = True
    standard_loss_damages_both_ends: bool = True
    heralded_site_kill_prob: float = 0.0

    def __post_init__(self):
        for name in ("heralded_bond_connect_prob", "heralded_site_kill_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


# Calibrated against the published 90%-spanning thresholds at L=10
# (scan over the knob at 400-800 trials/probe): 0.45 lands the relative
# scheme at ~0.071 and the standard scheme at ~0.029 tolerable loss.
CALIBRATED_HERALDED_SITE_KILL = 0.45


def calibrated_semantics() -> OutcomeSemantics:
    """Semantics configuration calibrated against the published thresholds."""
    return OutcomeSemantics(
        heralded_site_kill_prob=CALIBRATED_HERALDED_SITE_KILL)


@dataclass(frozen=True)
class FusionSpec:
    """One fusion of one unit cell, resolved to lattice indices."""

    fusion_id: str               # "F_A" .. "F_H"
    cell: tuple
    fusion_class: str            # photon-accounting class
    owner_site: int              # damaged on attributed loss
    endpoints: tuple | None     # (site, site) when the fusion makes a bond
    bond_index: int              # -1 for microcluster-assembly fusions


class DiamondLattice:
    """L^3-cell diamond lattice with its per-cell fusion table."""

    # sampling kinds: assembly fusions touch a site, the rest make bonds
    _KIND_SITE = 0
    _KIND_BOND = 1

    def __init__(self, L: int, periodic_transverse: bool = True):
        if L < 2:
            raise ValueError(f"lattice needs L >= 2 cells per axis, got {L}")
        self.L = L
        self.periodic_transverse = periodic_transverse
        self.n_cells = L ** 3
        self.n_sites = 2 * self.n_cells
        self._build()

    def cell_index(self, x: int, y: int, t: int) -> int:
        L = self.L
        return x + L * y + L * L * t

    def site_index(self, x: int, y: int, t: int, sub: int) -> int:
        return 2 * self.cell_index(x, y, t) + sub

    def _build(self):
        L = self.L
        fusion_kind = []
        fusion_owner = []
        fusion_site_a = []
        fusion_site_b = []
        fusion_bond = []
        bonds = []
        specs = []

        def add_site_fusion(fid, cell, owner):
            specs.append(FusionSpec(fid, cell, "site_forming", owner, None, -1))
            fusion_kind.append(self._KIND_SITE)
            fusion_owner.append(owner)
            fusion_site_a.append(-1)
            fusion_site_b.append(-1)
            fusion_bond.append(-1)

        def add_bond_fusion(fid, cell, owner, a, b, fclass):
            bond_idx = len(bonds)
            bonds.append((a, b))
            specs.append(FusionSpec(fid, cell, fclass, owner, (a, b), bond_idx))
            fusion_kind.append(self._KIND_BOND)
            fusion_owner.append(owner)
            fusion_site_a.append(a)
            fusion_site_b.append(b)
            fusion_bond.append(bond_idx)

        for t in range(L):
            for y in range(L):
                for x in range(L):
                    cell = (x, y, t)
                    s0 = self.site_index(x, y, t, 0)
                    s1 = self.site_index(x, y, t, 1)
                    add_site_fusion("F_C", cell, s0)
                    add_site_fusion("F_E", cell, s0)
                    add_site_fusion("F_D", cell, s1)
                    add_site_fusion("F_F", cell, s1)
                    # Intra-cell bond; consumes one photon of each
                    # microcluster, counted with the cell's own ten.
                    add_bond_fusion("F_B", cell, s0, s0, s1, "site_forming")
                    if self.periodic_transverse or x + 1 < L:
                        nb = self.site_index((x + 1) % L, y, t, 0)
                        add_bond_fusion("F_A", cell, s1, s1, nb, "bond_forming")
                    if self.periodic_transverse or y + 1 < L:
                        nb = self.site_index(x, (y + 1) % L, t, 0)
                        add_bond_fusion("F_G", cell, s1, s1, nb, "bond_forming")
                    if t + 1 < L:       # spanning axis is open
                        nb = self.site_index(x, y, t + 1, 0)
                        add_bond_fusion("F_H", cell, nb, s1, nb, "bond_forming")

        self.fusion_specs = specs
        self.fusion_kind = np.array(fusion_kind, dtype=np.uint8)
        self.fusion_owner = np.array(fusion_owner, dtype=np.int64)
        self.fusion_site_a = np.array(fusion_site_a, dtype=np.int64)
        self.fusion_site_b = np.array(fusion_site_b, dtype=np.int64)
        self.fusion_bond = np.array(fusion_bond, dtype=np.int64)
        self.n_fusions = len(specs)
        self.bond_site_a = np.array([a for a, _ in bonds], dtype=np.int64)
        self.bond_site_b = np.array([b for _, b in bonds], dtype=np.int64)
        self.n_bonds = len(bonds)
        sites = np.arange(self.n_sites)
        slice_of_site = sites // 2 // (self.L * self.L)
        self.face_start_sites = sites[slice_of_site == 0]
        self.face_end_sites = sites[slice_of_site == self.L - 1]


@dataclass
class LatticeState:
    """One sampled configuration: alive sites, present bonds, outcome tally."""

    lattice: DiamondLattice
    scheme: str
    p_l: float
    a_l: float
    semantics: OutcomeSemantics
    site_alive: np.ndarray
    bond_present: np.ndarray
    outcome_counts: dict = field(default_factory=dict)


def sample_lattice_state(lattice: DiamondLattice, scheme: str, p_l: float,
                         a_l: float, semantics: OutcomeSemantics,
                         rng: np.random.Generator) -> LatticeState:
    """Sample every fusion independently and apply the outcome semantics.

    The RNG consumption pattern is fixed (four uniform draws per fusion)
    regardless of scheme or semantics, so runs with the same generator
    state are coupled: the standard scheme's loss events are a superset of
    the relative scheme's, which makes scheme dominance exact per trial.
    """
    f_l = fusion_loss_probability(p_l, a_l, lossy_inputs(scheme))
    n = lattice.n_fusions
    u = rng.random(n)
    v = rng.random(n)
    w_site = rng.random(n)
    w_bond = rng.random(n)

    loss = u < f_l
    success = ~loss & (v < FUSION_SUCCESS_PROB)
    heralded = ~loss & ~success

    is_site = lattice.fusion_kind == DiamondLattice._KIND_SITE
    is_bond = ~is_site
    site_alive = np.ones(lattice.n_sites, dtype=bool)

    if semantics.loss_kills_owner_site:
        site_alive[lattice.fusion_owner[loss & is_site]] = False
        bond_loss = loss & is_bond
        if scheme == SCHEME_STANDARD and semantics.standard_loss_damages_both_ends:
            site_alive[lattice.fusion_site_a[bond_loss]] = False
            site_alive[lattice.fusion_site_b[bond_loss]] = False
        else:
            site_alive[lattice.fusion_owner[bond_loss]] = False

    r = semantics.heralded_site_kill_prob
    if r > 0.0:
        killed = heralded & is_site & (w_site < r)
        site_alive[lattice.fusion_owner[killed]] = False

    connected = success.copy()
    q = semantics.heralded_bond_connect_prob
    if q > 0.0:
        connected |= heralded & (w_bond < q)
    bond_present = np.zeros(lattice.n_bonds, dtype=bool)
    sel = is_bond & connected
    bond_present[lattice.fusion_bond[sel]] = True

    counts = {SUCCESS: int(success.sum()),
              FAIL_HERALDED: int(heralded.sum()),
              FAIL_LOSS: int(loss.sum())}
    return LatticeState(lattice=lattice, scheme=scheme, p_l=p_l, a_l=a_l,
                        semantics=semantics, site_alive=site_alive,
                        bond_present=bond_present, outcome_counts=counts)


def spans(state: LatticeState) -> bool:
    """Union-find spanning check between the two open faces.

    Alive sites are merged along present bonds whose endpoints are both
    alive; the state spans when some component holds an alive site on each
    face. Plain-list union by size with path halving; the DSU is local to
    the call, so trials can run concurrently.
    """
    lat = state.lattice
    alive = state.site_alive
    idx = np.flatnonzero(state.bond_present)
    ends_a = lat.bond_site_a[idx]
    ends_b = lat.bond_site_b[idx]
    ok = alive[ends_a] & alive[ends_b]

    parent = list(range(lat.n_sites))
    size = [1] * lat.n_sites

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]   # path halving
            x = parent[x]
        return x

    for a, b in zip(ends_a[ok].tolist(), ends_b[ok].tolist()):
        ra = find(a)
        rb = find(b)
        if ra == rb:
            continue
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]

    start_roots = {find(s) for s in lat.face_start_sites.tolist() if alive[s]}
    if not start_roots:
        return False
    return any(find(s) in start_roots
               for s in lat.face_end_sites.tolist() if alive[s])


def percolation_probability(L: int, scheme: str, p_l: float, a_l: float,
                            trials: int, seed: int,
                            semantics: OutcomeSemantics | None = None,
                            lattice: DiamondLattice | None = None):
    """Spanning fraction over independent sampled lattices, with stderr."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if semantics is None:
        semantics = OutcomeSemantics()
    if lattice is None:
        lattice = DiamondLattice(L)
    children = np.random.SeedSequence(seed).spawn(trials)
    hits = 0
    for child in children:
        rng = np.random.Generator(np.random.PCG64(child))
        state = sample_lattice_state(lattice, scheme, p_l, a_l, semantics, rng)
        if spans(state):
            hits += 1
    p_hat = hits / trials
    stderr = float(np.sqrt(p_hat * (1.0 - p_hat) / trials))
    return p_hat, stderr


def loss_threshold(scheme: str, target: float, a_l: float, L: int,
                   trials: int, tolerance: float, seed: int,
                   semantics: OutcomeSemantics | None = None,
                   equal_ancilla_loss: bool = False) -> float:
    """Bisection for the photon-loss rate where spanning crosses `target`.

    Each probe runs `trials` independent lattices with a probe-specific
    derived seed; raises when the lattice is already below target at zero
    loss. With equal_ancilla_loss the ancilla photons are scanned jointly
    at the same rate as the delayed photons (a_l is ignored), the variant
    quoted for fully lossy switching.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0, 1), got {target}")
    if semantics is None:
        semantics = OutcomeSemantics()
    lattice = DiamondLattice(L)
    master = np.random.SeedSequence(seed)
    probe_counter = [0]

    def prob_at(p_l: float) -> float:
        probe_seed = np.random.SeedSequence(
            entropy=master.entropy, spawn_key=(probe_counter[0],))
        probe_counter[0] += 1
        children = probe_seed.spawn(trials)
        ancilla = p_l if equal_ancilla_loss else a_l
        hits = 0
        for child in children:
            rng = np.random.Generator(np.random.PCG64(child))
            state = sample_lattice_state(lattice, scheme, p_l, ancilla,
                                         semantics, rng)
            if spans(state):
                hits += 1
        return hits / trials

    if prob_at(0.0) < target:
        raise ValueError(
            f"lattice does not reach target {target} even at zero loss "
            f"(scheme={scheme}, a_l={a_l}, L={L})")

    lo, hi = 0.0, 0.04
    while prob_at(hi) >= target:
        lo = hi
        hi *= 2.0
        if hi >= 1.0:
            hi = 1.0
            break
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if prob_at(mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FrontierResult:
    points: tuple                # ((a_l, p_l_threshold), ...)
    slope: float
    intercept: float
    residuals: tuple


def tradeoff_frontier(scheme: str, target: float, a_l_grid, L: int,
                      trials: int, seed: int,
                      semantics: OutcomeSemantics | None = None,
                      tolerance: float = 0.002) -> FrontierResult:
    """Loss-threshold frontier over ancilla-loss values, with a linear fit."""
    a_l_grid = list(a_l_grid)
    if not a_l_grid:
        raise ValueError("a_l grid must be nonempty")
    points = []
    for i, a_l in enumerate(a_l_grid):
        p_star = loss_threshold(scheme, target, a_l, L, trials, tolerance,
                                seed + i, semantics)
        points.append((float(a_l), float(p_star)))
    xs = np.array([a for a, _ in points])
    ys = np.array([p for _, p in points])
    slope, intercept = np.polyfit(xs, ys, 1)
    residuals = ys - (slope * xs + intercept)
    return FrontierResult(points=tuple(points), slope=float(slope),
                          intercept=float(intercept),
                          residuals=tuple(float(r) for r in residuals))
