"""Smoke test for the pyrostore extension module.

Build and install it first:

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import tempfile

import pyrostore

SUB = "<http://www.w3.org/2000/01/rdf-schema#subPropertyOf>"

SCHEMA = f"""
<pb> {SUB} <pa> .
<pc> {SUB} <pa> .
<pd> {SUB} <pc> .
<pe> {SUB} <pc> .
"""

DATA = """
<a> <pa> <b> .
<c> <pc> <d> .
<e> <pb> <f> .
<a> <pf> <d> .
<g> <pe> <h> .
"""

QUERY = "SELECT ?o WHERE { ?s :pa ?o . }"


def check_small_example():
    onto = pyrostore.Ontology(SCHEMA)
    assert onto.sub_properties("pc") == ["pc", "pd", "pe"], onto.sub_properties("pc")
    assert onto.top_property_of("pe") == "pa"

    expected = [["b"], ["d"], ["f"], ["h"]]
    assert pyrostore.oracle(QUERY, DATA, SCHEMA) == expected
    for layout in ("triple", "vp", "ro"):
        for orientation in ("row", "column"):
            store = pyrostore.Store(DATA, SCHEMA, layout, orientation)
            result = store.query(QUERY)
            assert result.rows == expected, (layout, orientation, result.rows)
            assert result.columns == ["o"]
            assert store.query(QUERY, subsume=False).rows == [["b"]]

    ro = pyrostore.Store(DATA, SCHEMA, "ro")
    assert sorted(ro.relations()) == [("pa", 3, 4), ("pf", 2, 1), ("type", 2, 0)]
    assert ro.emit_sql(QUERY) == "SELECT object FROM pa;"
    assert "UNION" in pyrostore.Store(DATA, SCHEMA, "vp").emit_sql(QUERY)

    with tempfile.TemporaryDirectory() as d:
        ro.save(d)
        again = pyrostore.Store.open(d)
        assert again.layout == "ro" and len(again) == 5
        assert again.query(QUERY).rows == expected


def check_university():
    schema = pyrostore.bundled_ontology()
    data = pyrostore.generate(1, seed=42)
    assert data == pyrostore.generate(1, seed=42)
    assert pyrostore.validate(data, schema) == []

    store = pyrostore.Store(data, schema, "ro")
    prefix = "PREFIX ub: <http://swat.cse.lehigh.edu/onto/univ-bench.owl#>\n"
    q16 = prefix + "SELECT ?X ?Y WHERE { ?X ub:teacherOf ?Y . ?X a ub:AdministrativeStaff . }"
    unsat = store.query(q16)
    assert unsat.unsat and unsat.relations_scanned == 0 and len(unsat) == 0
    assert unsat.explanation.startswith("UNSAT: pattern #0:")
    assert store.touched_rows() == 0

    q17 = prefix + "SELECT ?X ?Y WHERE { ?X ub:teacherOf ?Y . ?X a ub:Faculty . }"
    kept = store.query(q17)
    dropped = store.query(q17, assume_conformant=True)
    assert (kept.relations_scanned, kept.joins) == (2, 1)
    assert (dropped.relations_scanned, dropped.joins) == (1, 0)
    assert kept.rows == dropped.rows and len(kept) > 0
    assert "scans=1 joins=0" in store.explain(q17, assume_conformant=True)

    report = pyrostore.bench(schema, data)
    assert len(report) == 90
    rows = {}
    for cell in report:
        rows.setdefault(cell["query_id"], set()).add(cell["rows"])
    assert all(len(counts) == 1 for counts in rows.values()), rows
    assert rows["q16"] == {0}


def check_errors():
    for bad in (lambda: pyrostore.parse_query("SELECT ?x WHERE { ?x nope:p ?y }"),
                lambda: pyrostore.Store(DATA, SCHEMA, "columnar"),
                lambda: pyrostore.Store("<a> <b> .", SCHEMA)):
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")
    try:
        pyrostore.Store.open("/nonexistent/store")
    except OSError as e:
        assert "/nonexistent/store" in str(e)
    else:
        raise AssertionError("expected OSError")


if __name__ == "__main__":
    check_small_example()
    check_university()
    check_errors()
    print("smoke test ok")
