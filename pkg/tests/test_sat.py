import json
import random

import pytest

from wellconnected.errors import DecodeError, DimacsError
from wellconnected.sat import (
    CnfFormula,
    RoleKind,
    Verdict,
    decide_sat,
    decode_assignment,
    dump_reduction,
    literal_vertex,
    pad_polarities,
    parse_dimacs,
    reduce_to_lwcs,
    truth_table_sat,
)
from wellconnected.search import brute_force_lwcs, enumerate_wcs

SAMPLE = [(1, 2, 3), (2, -3, -4), (-1, 3, 4), (1, -2, -4)]


def sample():
    return CnfFormula(4, tuple(SAMPLE))


def random_formula(rng, n, m):
    return CnfFormula(n, tuple(tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3)) for _ in range(m)))


def test_parse_examples(fixtures):
    f = parse_dimacs("p cnf 1 1\n1 -1 1 0\n")
    assert (f.variable_count, f.clause_count) == (1, 1)
    g = parse_dimacs((fixtures / "sample4.cnf").read_text())
    assert g == sample()
    assert parse_dimacs(g.to_dimacs()) == g


def test_parse_multiline_clause():
    assert parse_dimacs("c x\np cnf 2 1\n1\n-2 2 0\n").clauses == ((1, -2, 2),)


@pytest.mark.parametrize("text", [
    "p cnf 2 1\n1 2 0\n",
    "p cnf 2 1\n1 2 3 0\n",
    "p cnf 2 1\n1 2 -1\n",
    "p cnf 2 2\n1 2 -1 0\n",
    "1 2 -1 0\n",
    "p cnf 2\n",
    "p cnf 2 1\n1 x 2 0\n",
])
def test_parse_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_from_clauses_widens():
    f = CnfFormula.from_clauses([(1,), (-1, 2)])
    assert f.clauses == ((1, 1, 1), (-1, 2, 2))
    with pytest.raises(DimacsError):
        CnfFormula.from_clauses([()])


def test_reduction_structure():
    r = reduce_to_lwcs(sample())
    g = r.graph
    assert g.n == 17 and g.edge_count == 32 and r.target_size == 12
    n = 4
    for i in range(1, n + 1):
        x, nx_, y = literal_vertex(i), literal_vertex(-i), r.gadget_vertex(i)
        assert g.has_edge(x, nx_) and g.has_edge(x, y) and g.has_edge(nx_, y)
        assert g.has_edge(r.auxiliary_vertex, x) and g.has_edge(r.auxiliary_vertex, nx_)
    for j, clause in enumerate(SAMPLE):
        assert set(g.adjacency[r.clause_vertex(j)]) == {literal_vertex(-lit) for lit in clause}
    kinds = [role.kind for role in r.roles]
    assert kinds.count(RoleKind.CLAUSE) == 4 and kinds[-1] is RoleKind.AUXILIARY


def test_reduction_edge_count_formula():
    rng = random.Random(0)
    for _ in range(30):
        n, m = rng.randint(1, 5), rng.randint(1, 6)
        clauses = tuple(tuple(rng.sample([v * rng.choice((1, -1)) for v in range(1, n + 1)] * 3, 3))
                        for _ in range(m))
        f = CnfFormula(n, clauses)
        g = reduce_to_lwcs(f).graph
        distinct = sum(len(set(c)) for c in clauses)
        assert g.n == 3 * n + m + 1
        assert g.edge_count == 5 * n + distinct


def test_reduction_json():
    data = json.loads(dump_reduction(reduce_to_lwcs(sample())))
    assert data["n"] == 17 and len(data["roles"]) == 17 and data["roles"][-1] == "AUXILIARY"


def test_padding():
    f = CnfFormula.from_clauses([(1, 2, 2)])
    p = pad_polarities(f)
    assert p.variable_count == 3
    lits = {lit for c in p.clauses for lit in c}
    assert all(v in lits and -v in lits for v in range(1, 4))
    assert (truth_table_sat(p) is None) == (truth_table_sat(f) is None)
    one = CnfFormula(1, ((1, -1, 1),))
    assert pad_polarities(one) == one
    assert reduce_to_lwcs(one).graph.n == 5
    assert pad_polarities(sample()) == sample()


def test_sample_round_trip():
    r = reduce_to_lwcs(sample())
    best = brute_force_lwcs(r.graph)
    assert len(best) == 12
    a = decode_assignment(r, best.members)
    assert sample().satisfied_by(a)


def test_decode_rules():
    r = reduce_to_lwcs(sample())
    assert decode_assignment(r, {0, 1}) is None
    # the triangle x1, not x1, y1 is itself a WCS but holds both literals
    bogus = {0, 1} | set(range(2, 12))
    with pytest.raises(DecodeError):
        decode_assignment(r, bogus)


def test_decide_sample():
    d = decide_sat(sample())
    assert d.verdict is Verdict.SAT and d.lwcs_size == 12 and sample().satisfied_by(d.assignment)


@pytest.mark.parametrize("name", ["contradiction.cnf", "unsat3.cnf"])
def test_decide_unsat(fixtures, name):
    f = parse_dimacs((fixtures / name).read_text())
    assert decide_sat(f).verdict is Verdict.UNSAT


def test_decide_matches_truth_table():
    rng = random.Random(1)
    for _ in range(60):
        f = random_formula(rng, rng.randint(1, 4), rng.randint(1, 6))
        d = decide_sat(f)
        oracle = truth_table_sat(f)
        assert d.verdict is (Verdict.SAT if oracle else Verdict.UNSAT)
        if oracle:
            assert f.satisfied_by(d.assignment)


def test_auxiliary_vertex_breaks_one_variable_dichotomy():
    # (x) and (not x): a WCS through z reaches 2n + m although unsatisfiable
    f = CnfFormula.from_clauses([(1,), (-1,)])
    r = reduce_to_lwcs(pad_polarities(f))
    assert truth_table_sat(f) is None
    assert len(brute_force_lwcs(r.graph)) >= r.target_size
    assert r.auxiliary_vertex in brute_force_lwcs(r.graph).members
    z_free = max(len(s) for s in enumerate_wcs(r.graph) if r.auxiliary_vertex not in s)
    assert z_free < r.target_size


def test_size_dichotomy_without_z():
    rng = random.Random(2)
    for _ in range(40):
        f = pad_polarities(random_formula(rng, rng.randint(1, 3), rng.randint(1, 4)))
        r = reduce_to_lwcs(f)
        if r.graph.n > 16:
            continue
        z_free = max(len(s) for s in enumerate_wcs(r.graph) if r.auxiliary_vertex not in s)
        assert (z_free == r.target_size) == (truth_table_sat(f) is not None)
        assert z_free <= r.target_size


def test_size_dichotomy_two_or_more_variables():
    rng = random.Random(3)
    checked = 0
    while checked < 25:
        f = pad_polarities(random_formula(rng, rng.randint(2, 3), rng.randint(1, 4)))
        r = reduce_to_lwcs(f)
        if r.graph.n > 16:
            continue
        checked += 1
        size = len(brute_force_lwcs(r.graph))
        assert (size == r.target_size) == (truth_table_sat(f) is not None)


def test_no_triangle_gives_both_literals():
    rng = random.Random(4)
    for _ in range(10):
        f = pad_polarities(random_formula(rng, 2, rng.randint(1, 3)))
        r = reduce_to_lwcs(f)
        n = f.variable_count
        triangles = [{literal_vertex(i), literal_vertex(-i), r.gadget_vertex(i)} for i in range(1, n + 1)]
        for s in enumerate_wcs(r.graph):
            if s in triangles:
                continue  # the triangle alone is the one exception
            for i in range(1, n + 1):
                assert not {literal_vertex(i), literal_vertex(-i)} <= s
