"""Binary-delay switching networks: achievable delays, routing, clashes.

An s-switch network has s-1 delaying stages followed by one output-selection
switch. Stage i sits between a pass rail (rail 0) and a delay rail (rail 1)
of length stage_delays[i] bins; the delays are the powers of two
1, 2, 4, ..., 2^(s-2), so every total delay up to 2^(s-1)-1 decomposes
uniquely into a set of stage delays. A photon's path is therefore forced by
its requested delay: it takes the delay rail at exactly the stages whose
delay appears in the binary decomposition.

Each 2x2 switch applies one shared setting (bar or cross) per time bin. Two
photons meeting at the same switch in the same bin clash when their forced
paths demand opposite settings (or would co-occupy a rail, which is the
same physical impossibility). Because paths are forced, clashes are a
pairwise property of requests; routing detects them stage by stage and
reports the first conflicting stage for each implicated photon.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def max_delay(s: int) -> int:
    """Largest delay reachable with s 2x2 switches: 2^(s-1) - 1."""
    if s < 1:
        raise ValueError(f"switch count must be >= 1, got {s}")
    return 2 ** (s - 1) - 1


def depth_for_bins(k: int) -> tuple[int, int]:
    """Round a bin count up to a network-addressable size.

    Returns (k_up, depth) with k_up = 2^ceil(log2 k) and
    depth = 1 + log2(k_up) switches.
    """
    if k < 1:
        raise ValueError(f"bin count must be >= 1, got {k}")
    k_up = 1 << (k - 1).bit_length()
    depth = 1 + (k_up.bit_length() - 1)
    return k_up, depth


@dataclass(frozen=True)
class DelayNetwork:
    """Fixed topology of an s-switch binary-delay network.

    Delaying stages are ordered ascending (1, 2, 4, ...) by default, which
    matches the drawn cascades; clash statistics depend on the ordering, so
    descending=True is available for sensitivity checks.
    """

    s: int
    descending: bool = False
    stage_delays: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"switch count must be >= 1, got {self.s}")
        delays = tuple(1 << i for i in range(self.s - 1))
        if self.descending:
            delays = tuple(reversed(delays))
        object.__setattr__(self, "stage_delays", delays)

    @property
    def max_delay(self) -> int:
        return max_delay(self.s)


@dataclass(frozen=True)
class RoutingRequest:
    """One photon to be delayed: arrives at arrival_bin, needs delay bins."""

    arrival_bin: int
    delay: int


@dataclass(frozen=True)
class ClashRecord:
    stage: int                     # switch index (s-1 is the output switch)
    time_bin: int
    request_a: int                 # indices into the routed request list
    request_b: int


@dataclass
class RoutingResult:
    routed: list                   # (request_index, request, rails) triples
    clashes: list                  # ClashRecord list

    @property
    def clash_free(self) -> bool:
        return not self.clashes


def _stage_schedule(req: RoutingRequest, network: DelayNetwork):
    """Yield (switch_index, time_bin, in_rail, out_rail) along the forced path.

    Covers the s-1 delaying stages plus the output-selection switch, whose
    out rail is the single designated output port (rail 0).
    """
    delays = network.stage_delays
    t = req.arrival_bin
    in_rail = 0
    for i, delta in enumerate(delays):
        out_rail = 1 if req.delay & delta else 0
        yield i, t, in_rail, out_rail
        if out_rail:
            t += delta
        in_rail = out_rail
    yield len(delays), t, in_rail, 0


def request_rails(req: RoutingRequest, network: DelayNetwork) -> tuple[int, ...]:
    """Rail choice (0 pass, 1 delay) at each delaying stage."""
    return tuple(1 if req.delay & d else 0 for d in network.stage_delays)


def _conflict_at(in_a, out_a, in_b, out_b) -> bool:
    # Same input rail = earlier physical co-location; otherwise the shared
    # switch setting is bar iff in==out, and the settings must agree.
    if in_a == in_b:
        return True
    return (in_a == out_a) != (in_b == out_b)


def requests_conflict(a: RoutingRequest, b: RoutingRequest,
                      network: DelayNetwork) -> bool:
    """True when the two forced paths cannot share the network."""
    if abs(a.arrival_bin - b.arrival_bin) > max(a.delay, b.delay):
        return False
    sched_b = list(_stage_schedule(b, network))
    for (i, t, ina, outa), (_, tb, inb, outb) in zip(_stage_schedule(a, network), sched_b):
        if t == tb and _conflict_at(ina, outa, inb, outb):
            return True
    return False


def route(requests, network: DelayNetwork) -> RoutingResult:
    """Simulate all requests through the cascade and detect every clash.

    Requests implicated in a clash are dropped at the first conflicting
    stage (their downstream routing is undefined); the rest are routed to
    arrival_bin + delay on the output port. Raises on out-of-range delays.
    """
    d_max = network.max_delay
    for req in requests:
        if not 0 <= req.delay <= d_max:
            raise ValueError(
                f"delay {req.delay} outside [0, {d_max}] for s={network.s}")
        if req.arrival_bin < 0:
            raise ValueError(f"arrival bin must be >= 0, got {req.arrival_bin}")

    schedules = [list(_stage_schedule(req, network)) for req in requests]
    alive = set(range(len(requests)))
    clashes = []

    for stage in range(network.s):
        by_bin = {}
        for idx in alive:
            _, t, in_r, out_r = schedules[idx][stage]
            by_bin.setdefault(t, []).append((idx, in_r, out_r))
        implicated = set()
        for t, members in by_bin.items():
            if len(members) < 2:
                continue
            for j in range(len(members)):
                for k in range(j + 1, len(members)):
                    ia, ina, outa = members[j]
                    ib, inb, outb = members[k]
                    if _conflict_at(ina, outa, inb, outb):
                        clashes.append(ClashRecord(stage, t, ia, ib))
                        implicated.add(ia)
                        implicated.add(ib)
        alive -= implicated

    routed = [(idx, requests[idx], request_rails(requests[idx], network))
              for idx in sorted(alive)]
    return RoutingResult(routed=routed, clashes=clashes)


def routing_trace_rows(result: RoutingResult, network: DelayNetwork):
    """Debug dump rows: (photon_id, arrival_bin, delay, stage, rail, bin_at_stage).

    Only cleanly routed photons are traced; the output switch appears as the
    last stage with rail 0.
    """
    rows = []
    for idx, req, _rails in result.routed:
        for stage, t, _in_r, out_r in _stage_schedule(req, network):
            rows.append((idx, req.arrival_bin, req.delay, stage, out_r, t))
    return rows
