import pytest

from polykernel.dancing_links import (
    DlxMatrix, LifoViolation, brute_force, fix_and_reduce, format_milp, format_solution,
    parse_milp, parse_set_partition, search, solve_exact_cover, solve_partition,
)
from polykernel.polyhedra import DomainError

# rows A..D of the worked system over x1..x5
WORKED = [[2, 4], [3, 5], [1, 3], [1, 2, 3]]

MILP_TEXT = """OBJECTIVE
3 x1 - 2 x2 + 1/2 y1 + y2
CONSTRAINTS
c1: x1 + 2 y1 <= 4
c2: x2 - y2 <= 1
PARTITION
p1: y1 y2
INTEGERS
x1 y1 y2
"""


def test_worked_system_structure_and_solution():
    m = DlxMatrix(WORKED)
    assert len(m.headers) == 4
    assert m.data_node_count == 10
    for policy in ("first", "fewest"):
        res = search(m, policy, check_restore=True)
        assert res.solution == (3, 4)
        assert m.is_restored()
    assert format_solution((3, 4)) == "SOLUTION x3 x4"


def test_branch_x2_empties_row_c():
    m = DlxMatrix(WORKED, debug=True)
    A, _, C, D = m.headers
    node_x2 = next(n for n in m.row_nodes(A) if m.var[n] == 2)
    m.cover(A)
    j = m.U[node_x2]
    while j != node_x2:
        m.cover(m.H[j])
        j = m.U[j]
    assert C in m.live_rows()
    assert m.row_nodes(C) == []
    with pytest.raises(LifoViolation):
        m.uncover(A)
    m.uncover(D)
    m.uncover(A)
    assert m.is_restored()


def test_infeasible_systems():
    assert not solve_exact_cover([[1], [1, 2], [2]]).feasible
    assert format_solution(None) == "INFEASIBLE"
    m = DlxMatrix([[1, 2], []])
    assert m.infeasible and not search(m).feasible


def test_aborted_search_restores_links():
    rows = [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1], [1, 3, 5]]
    m = DlxMatrix(rows)
    res = search(m, node_limit=2)
    assert res.solution is None
    assert m.is_restored()


def test_oracle_agreement(rng):
    for _ in range(200):
        nv = rng.randint(1, 12)
        rows = [rng.sample(range(1, nv + 1), rng.randint(1, min(nv, 4))) for _ in range(rng.randint(1, 8))]
        sols = brute_force(rows)
        verdicts = set()
        for policy in ("first", "fewest"):
            res = solve_exact_cover(rows, policy, check_restore=True)
            verdicts.add(res.feasible)
            if res.feasible:
                assert res.solution in sols
        assert verdicts == {bool(sols)}


def test_invalid_rows():
    with pytest.raises(ValueError):
        DlxMatrix([[1, 1]])
    with pytest.raises(ValueError):
        DlxMatrix([[-1]])


def test_parse_set_partition():
    assert parse_set_partition("4 5\n2 4\n3 5\n1 3\n1 2 3\n") == WORKED
    for bad in ["", "2 3\n1\n", "1 3\n4\n", "1 x\n1\n"]:
        with pytest.raises(ValueError):
            parse_set_partition(bad)


def test_milp_round_trip_and_reduction():
    milp = parse_milp(MILP_TEXT)
    assert parse_milp(format_milp(milp)) == milp
    y0 = solve_partition(milp)
    assert y0 == {"y1": 1, "y2": 0}
    red = fix_and_reduce(milp, y0)
    assert red.constraints == [("c1", {"x1": 1}, 2), ("c2", {"x2": 1}, 1)]
    assert red.offset == 0.5 and red.integers == ["x1"]
    assert red.partition == []
    assert format_milp(red).startswith("OBJECTIVE\n3/1 x1 - 2/1 x2\nOFFSET 1/2\n")


def test_milp_without_coupling_keeps_constraints():
    milp = parse_milp("OBJECTIVE\nx\nCONSTRAINTS\nc: x <= 3\nPARTITION\np: y\n")
    red = fix_and_reduce(milp, solve_partition(milp))
    assert red.constraints == milp.constraints


def test_milp_errors():
    milp = parse_milp(MILP_TEXT)
    with pytest.raises(DomainError):
        fix_and_reduce(milp, {"y1": 1, "y2": 1})
    bad = parse_milp("OBJECTIVE\nx\nCONSTRAINTS\nPARTITION\na: y1\nb: y1 y2\nc: y2\n")
    with pytest.raises(DomainError):
        solve_partition(bad)
    for text in ["x + y\n", "CONSTRAINTS\nc: x >= 1\n", "OBJECTIVE\n3 x ++\n"]:
        with pytest.raises(ValueError):
            parse_milp(text)
