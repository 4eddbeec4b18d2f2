import numpy as np
import pytest

from _graphs import random_connected
from wellconnected.errors import GraphTooLargeError
from wellconnected.graph import build_grid, complete_graph, cycle_graph, path_graph, star_graph
from wellconnected.search import SearchConfig, brute_force_lwcs, enumerate_wcs, lwcs_dfs
from wellconnected.wcs import Classification, per_avg, upper_bound, verify_wcs


def graphs(count, max_n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_connected(int(rng.integers(1, max_n + 1)), float(rng.uniform(0.05, 0.6)), rng)


def test_brute_force_examples():
    assert len(brute_force_lwcs(cycle_graph(4))) == 3
    assert brute_force_lwcs(path_graph(3)).members == {0, 2}
    assert brute_force_lwcs(star_graph(4)).members == {1, 2, 3, 4}
    with pytest.raises(GraphTooLargeError):
        brute_force_lwcs(path_graph(19))


def test_brute_force_tie_rule():
    # C4 has four WCSs of size 3, all with the same PER: smallest list wins
    assert brute_force_lwcs(cycle_graph(4)).members == {0, 1, 2}


def test_enumerate_sizes():
    sets = list(enumerate_wcs(cycle_graph(4), 3))
    assert len(sets) == 4


@pytest.mark.parametrize("n", [1, 2, 5, 7])
def test_complete_graph(n):
    assert len(lwcs_dfs(complete_graph(n)).best) == n


def test_grid_5x5_conn4_optimum():
    r = lwcs_dfs(build_grid(5, 5))
    assert len(r.best) == 14 and r.proven_optimal
    assert r.best_per == pytest.approx(0.89, abs=0.02)


def test_matches_oracle_and_invariants():
    for g in graphs(80, 9, 1):
        r = lwcs_dfs(g)
        assert r.proven_optimal
        assert len(r.best) == len(brute_force_lwcs(g))
        assert verify_wcs(g, r.best.members) is Classification.WCS
        assert len(r.best) <= max(upper_bound(g), 1)
        sizes = [s for _, s in r.history]
        assert sizes == sorted(sizes)


def test_tie_break_keeps_highest_per():
    for g in graphs(40, 8, 2):
        r = lwcs_dfs(g)
        best = brute_force_lwcs(g)
        assert r.best_per == pytest.approx(per_avg(g, best.members))


@pytest.mark.parametrize("changes", [
    dict(exclusion=False),
    dict(exclusion=False, use_memo=False),
    dict(use_bound=False),
    dict(exclusion=False, use_bound=False),
    dict(warm_start_restarts=0),
    dict(tie_break_per=False),
])
def test_variants_agree(changes):
    for g in graphs(40, 8, 3):
        base = lwcs_dfs(g)
        other = lwcs_dfs(g, SearchConfig(**changes))
        assert len(other.best) == len(base.best)
        assert other.proven_optimal == base.proven_optimal


def test_memo_only_changes_node_count():
    g = build_grid(3, 3)
    with_memo = lwcs_dfs(g, SearchConfig(exclusion=False, warm_start_restarts=0))
    without = lwcs_dfs(g, SearchConfig(exclusion=False, use_memo=False, warm_start_restarts=0))
    assert len(with_memo.best) == len(without.best)
    assert with_memo.nodes_expanded < without.nodes_expanded


def test_deadline_reports_incumbent():
    r = lwcs_dfs(build_grid(12, 12), SearchConfig(deadline=0.05))
    assert not r.proven_optimal
    assert verify_wcs(build_grid(12, 12), r.best.members) is Classification.WCS
    with pytest.raises(ValueError):
        SearchConfig(deadline=0)


def test_forbidden_vertices():
    g = star_graph(4)
    r = lwcs_dfs(g, forbidden={1})
    assert r.best.members == {2, 3, 4}
    for g in graphs(20, 8, 4):
        r = lwcs_dfs(g, forbidden={0})
        best = max((len(s) for s in enumerate_wcs(g) if 0 not in s), default=0)
        assert 0 not in r.best.members and len(r.best) == best


def test_progress_lines(capsys):
    lwcs_dfs(build_grid(4, 4), SearchConfig(report_interval=0.0))
    err = capsys.readouterr().err
    assert err.startswith("t=") and "incumbent=" in err and "expanded=" in err


def test_result_json():
    data = lwcs_dfs(cycle_graph(4)).to_json()
    assert data["size"] == 3 and data["classification"] == "WCS" and data["proven_optimal"]
