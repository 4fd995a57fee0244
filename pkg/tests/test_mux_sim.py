import pytest

from rmux.mux_sim import (
    rmux_splits,
    simulate_bell_rmux,
    simulate_bell_standard,
    simulate_two_stream,
    standard_splits,
)


def test_two_stream_determinism():
    a = simulate_two_stream(0.1, 4, 400, "realistic", reps=10, seed=77)
    b = simulate_two_stream(0.1, 4, 400, "realistic", reps=10, seed=77)
    assert a == b
    c = simulate_two_stream(0.1, 4, 400, "realistic", reps=10, seed=78)
    assert c.matched_fraction_mean != a.matched_fraction_mean


def test_two_stream_single_switch_is_coincidence_matching():
    # d_max = 0: only photons already in the same bin can pair
    st = simulate_two_stream(0.2, 1, 2000, "realistic", reps=8, seed=5)
    # coincidence fraction: 2 p^2 n / (2 p n) = p
    assert st.matched_fraction_mean == pytest.approx(0.2, abs=0.03)
    assert st.clash_rate_mean == 0.0


def test_two_stream_strategy_ordering_and_monotonicity():
    stats = {}
    for strat in ("hungarian_no_clash", "hungarian_with_clash", "realistic"):
        for s in (2, 5, 7):
            stats[(strat, s)] = simulate_two_stream(
                0.1, s, 600, strat, reps=25, seed=31)
    for s in (2, 5, 7):
        h = stats[("hungarian_no_clash", s)].matched_fraction_mean
        c = stats[("hungarian_with_clash", s)].matched_fraction_mean
        r = stats[("realistic", s)].matched_fraction_mean
        assert h >= c >= r
    for strat in ("hungarian_no_clash", "realistic"):
        assert (stats[(strat, 2)].matched_fraction_mean
                < stats[(strat, 5)].matched_fraction_mean
                < stats[(strat, 7)].matched_fraction_mean)


def test_two_stream_validation():
    with pytest.raises(ValueError):
        simulate_two_stream(0.1, 3, 100, "realistic", reps=0, seed=1)
    with pytest.raises(ValueError):
        simulate_two_stream(0.1, 3, 100, "nope", reps=1, seed=1)


def test_split_enumeration():
    assert standard_splits(5) == [(1, 1)]
    assert standard_splits(9) == [(1, 5), (2, 1)]
    assert standard_splits(4) == []
    assert rmux_splits(5) == [(1, 3), (2, 1)]
    assert rmux_splits(2) == []


def test_bell_zero_emission_gives_zero_rate():
    for fn in (simulate_bell_standard, simulate_bell_rmux):
        st = fn(0.0, 8, 2000, reps=3, seed=2)
        assert st.bells_per_bin == 0.0


def test_bell_saturated_source_approaches_gate_limit():
    # p1 = 1 with the (1, 1) split: every bin attempts, acceptance is 1/8
    st = simulate_bell_standard(1.0, 5, 4000, reps=10, seed=6)
    assert st.best_split == (1, 1)
    assert st.bells_per_bin == pytest.approx(1 / 8, abs=0.01)


def test_bell_relative_beats_standard_and_determinism():
    std = simulate_bell_standard(0.1, 12, 4000, reps=15, seed=9)
    rmx = simulate_bell_rmux(0.1, 12, 4000, reps=15, seed=9)
    assert rmx.bells_per_bin >= std.bells_per_bin
    again = simulate_bell_rmux(0.1, 12, 4000, reps=15, seed=9)
    assert again == rmx


def test_bell_infeasible_budget_rejected():
    with pytest.raises(ValueError):
        simulate_bell_standard(0.1, 4, 1000, reps=1, seed=1)
    with pytest.raises(ValueError):
        simulate_bell_rmux(0.1, 2, 1000, reps=1, seed=1)


def test_bell_conservation_bound():
    # no photon is consumed twice, so the Bell rate can never exceed the
    # per-bin photon rate of any single stream
    for fn in (simulate_bell_standard, simulate_bell_rmux):
        st = fn(0.5, 9, 2000, reps=5, seed=21)
        assert st.bells_per_bin <= 0.5


def test_bell_rate_monotone_in_budget():
    for fn in (simulate_bell_standard, simulate_bell_rmux):
        prev = None
        for budget in (6, 10, 14):
            st = fn(0.1, budget, 4000, reps=12, seed=29)
            if prev is not None:
                assert (st.bells_per_bin
                        >= prev.bells_per_bin - 2 * (st.stderr + prev.stderr))
            prev = st
