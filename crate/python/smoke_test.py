"""Smoke test for the semirandom extension module."""

import semirandom as sr


def main():
    s = sr.ProposalStream(4, seed=7)
    edges = [edge for _, _, edge in s]
    assert sorted(edges) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    try:
        s.next_proposal()
    except sr.SemirandomError:
        pass
    else:
        raise AssertionError("exhausted stream should raise")

    aux = sr.ProposalStream(100, seed=1, phases=3, phase_length=50)
    log = [(phase, edge) for _, phase, edge in aux]
    assert len(log) == 150
    assert sr.repeated_edge_count([(1, (0, 1)), (2, (0, 1))]) == 1

    petersen = sr.Graph(10)
    for i in range(5):
        petersen.add_edge(i, (i + 1) % 5)
        petersen.add_edge(i, i + 5)
        petersen.add_edge(i + 5, (i + 2) % 5 + 5)
    assert sr.is_d_connected(petersen, 3)["holds"]
    verdict = sr.is_d_connected(petersen, 4)
    assert not verdict["holds"] and len(verdict["cutset"]) == 3
    assert sr.brute_force_connectivity(petersen) == 3
    assert petersen.neighborhood([0]) == [1, 4, 5]

    single = sr.Graph(5, [(0, 1)])
    assert sr.peel(single, 4)["g_prime"] == []
    blocks = [(b + i, b + j) for b in (0, 6) for i in range(6) for j in range(i + 1, 6)]
    assert len(sr.find_fragile(sr.Graph(12, blocks + [(0, 6), (1, 7), (2, 8)]), 4)) == 12

    cycle = sr.long_cycle(3, [(0, 2), (2, 1), (1, 0)])
    assert sorted(cycle) == [0, 1, 2]

    assert sr.round_budget(1000, 0.3) == 4491
    assert sr.edge_budget(1000, 4, 0.3) == 2600
    plan = sr.phase_plan(1000, 4)
    assert plan["t"] == 4491 and plan["phases"][-1][0] == "boost"

    report = sr.run_trial(300, 2, seed=5)
    assert report["rounds_used"] <= report["t_budget"]
    assert report["edges_accepted"] <= report["b_budget"]
    rows = sr.run_sweep([200], [2, 4], trials=3, seed=10)
    assert [r["seed"] for r in rows] == [10, 11, 12, 10, 11, 12]
    assert rows == sr.run_sweep([200], [2, 4], trials=3, seed=10, workers=2)
    print("smoke test passed")


if __name__ == "__main__":
    main()
