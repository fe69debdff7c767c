"""Smoke test for the pyccgraph extension.

    pip install --no-build-isolation ./crates/py
    python python/smoke_test.py
"""

import pyccgraph


def main():
    r = pyccgraph.Ring("M(2,GF(2))")
    assert len(r) == 16
    assert r.element("[[1,0],[0,1]]") == 9
    assert r.render(9) == "[[1,0],[0,1]]"
    assert r.is_nilpotent(2) and r.is_unit(9)

    g = r.graph()
    assert g.vertex_count == 16
    assert g.diameter() == 1
    assert g.girth() == 3
    assert g.distance(9, 0) is None
    assert sorted(g.closure(0)) == [0, 2, 4, 15]
    assert g.export("csv").startswith("u,v\n")

    m3 = pyccgraph.Ring("M(3,GF(2))").graph(threads=1)
    levels = m3.closure(0)
    assert len(levels) == 64 and max(levels.values()) == 2
    assert m3.diameter() == 2

    assert pyccgraph.Ring("Z(12)").graph().edge_count == 0
    try:
        pyccgraph.Ring("GF(6)")
    except ValueError:
        pass
    else:
        raise AssertionError("GF(6) accepted")

    chain = pyccgraph.free_algebra_chain(3)
    assert len(chain) == 3

    j = pyccgraph.jordan(pyccgraph.Ring("M(3,GF(2))"), "[[0,1,0],[0,0,1],[0,0,0]]")
    assert j["jordan_partition"] == [3] and j["char_poly"] == "x^3"

    report = pyccgraph.run_suite("identities", ["Z(6)"])
    assert report["summary"]["failed"] == 0, report["summary"]
    print("ok:", report["summary"])


if __name__ == "__main__":
    main()
