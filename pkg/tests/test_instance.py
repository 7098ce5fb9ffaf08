import json

from rdmkit import (
    TupleRef,
    Instance,
    load_instance,
    save_instance,
    random_instance,
    delete_tuples,
    instance_to_dict,
    instance_from_dict,
    dumps_instance,
    parse_query,
    DataError,
    MissingRelationError,
    MalformedDataError,
    UnknownTupleError,
    DuplicateRowWarning,
    MultiplicityIgnoredWarning,
)
from rdmkit.fixtures import data_path

import pytest


def write(directory, name, text):
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{name}.csv").write_text(text)


def test_load(mcdormand):
    q, inst = mcdormand
    assert inst.semantics == "set"
    assert len(inst) == 6
    assert inst.get("Oscar:1").values == ("McDormand",)
    assert inst.get("ActsIn:2").values == ("McDormand", "Blood Simple")
    assert [t.id for t in inst.relation("ActsIn")] == ["ActsIn:1", "ActsIn:2"]
    assert len(inst.endogenous_tuples(q)) == 6
    assert "Spouse:1" in inst
    assert "Spouse:2" not in inst
    assert inst.weight("Oscar:1") == 1

    with pytest.raises(UnknownTupleError):
        inst.get("Oscar:2")
    with pytest.raises(MissingRelationError):
        inst.relation("Award")


def test_load_without_query():
    inst = load_instance(data_path("mcdormand"))
    assert set(inst.relations) == {"Oscar", "ActsIn", "DirectedBy", "Spouse"}
    assert inst.arities["Oscar"] == 1


def test_bag(mcdormand_bag):
    q, inst = mcdormand_bag
    assert inst.semantics == "bag"
    assert inst.get("Oscar:1").multiplicity == 2
    assert inst.weight("Oscar:1") == 2
    assert inst.weight("Oscar:1", "set") == 1

    with pytest.warns(MultiplicityIgnoredWarning):
        inst = load_instance(data_path("mcdormand_bag"), "set", query=q)
    assert inst.get("Oscar:1").multiplicity == 1


def test_duplicates(tmp_path):
    write(tmp_path, "R", "c1\na\na\nb\n")
    with pytest.warns(DuplicateRowWarning):
        inst = load_instance(tmp_path)
    assert [t.id for t in inst.relation("R")] == ["R:1", "R:3"]

    write(tmp_path / "bag", "R", "c1,_mult\na,2\nb,1\na,1\n")
    with pytest.warns(DuplicateRowWarning):
        inst = load_instance(tmp_path / "bag", "bag")
    assert inst.get("R:1").multiplicity == 3
    assert len(inst) == 2


def test_malformed(tmp_path):
    q = parse_query("q() :- R(x, y).")

    write(tmp_path / "header", "R", "x,y\na,b\n")
    with pytest.raises(MalformedDataError):
        load_instance(tmp_path / "header", query=q)

    write(tmp_path / "arity", "R", "c1\na\n")
    with pytest.raises(MalformedDataError):
        load_instance(tmp_path / "arity", query=q)

    write(tmp_path / "fields", "R", "c1,c2\na\n")
    with pytest.raises(MalformedDataError):
        load_instance(tmp_path / "fields", query=q)

    write(tmp_path / "mult", "R", "c1,c2,_mult\na,b,two\n")
    with pytest.raises(MalformedDataError):
        load_instance(tmp_path / "mult", "bag", query=q)

    write(tmp_path / "zero", "R", "c1,c2,_mult\na,b,0\n")
    with pytest.raises(MalformedDataError):
        load_instance(tmp_path / "zero", "bag", query=q)

    (tmp_path / "missing").mkdir()
    with pytest.raises(MissingRelationError):
        load_instance(tmp_path / "missing", query=q)

    with pytest.raises(MissingRelationError):
        load_instance(tmp_path / "nowhere", query=q)

    with pytest.raises(DataError):
        load_instance(tmp_path / "header", "multiset", query=q)


def test_invalid_instances():
    with pytest.raises(DataError):
        Instance({"R": (TupleRef("R", 1, ("a",), 2),)}, {"R": 1}, "set")

    with pytest.raises(DataError):
        Instance({"R": (TupleRef("R", 1, ("a",)), TupleRef("R", 2, ("a",)))}, {"R": 1})

    with pytest.raises(DataError):
        Instance({"R": (TupleRef("R", 1, ("a", "b")),)}, {"R": 1})

    with pytest.raises(DataError):
        TupleRef("R", 0, ("a",))


def test_save_roundtrip(tmp_path, mcdormand, mcdormand_bag):
    for _, inst in (mcdormand, mcdormand_bag):
        out = tmp_path / inst.semantics
        save_instance(inst, out)
        again = load_instance(out, inst.semantics)
        assert instance_to_dict(again) == instance_to_dict(inst)

    assert (tmp_path / "bag" / "Oscar.csv").read_text() == "c1,_mult\nMcDormand,2\n"
    assert (tmp_path / "set" / "Oscar.csv").read_text() == "c1\nMcDormand\n"


def test_dict_roundtrip(mcdormand_bag):
    _, inst = mcdormand_bag
    data = instance_to_dict(inst)
    assert data["relations"]["Oscar"]["rows"][0] == {
        "id": "Oscar:1",
        "values": ["McDormand"],
        "multiplicity": 2,
    }
    assert instance_to_dict(instance_from_dict(data)) == data

    with pytest.raises(MalformedDataError):
        instance_from_dict({"relations": {}})


def test_json_text_roundtrip(mcdormand_bag, tmp_path):
    _, inst = mcdormand_bag
    text = dumps_instance(inst)
    assert json.loads(text) == instance_to_dict(inst)

    path = tmp_path / "mcdormand.json"
    path.write_text(text, encoding="utf-8")
    again = instance_from_dict(json.loads(path.read_text(encoding="utf-8")))
    assert again.semantics == "bag"
    assert again.weight("Oscar:1") == 2
    assert dumps_instance(again) == text


@pytest.mark.parametrize("semantics", ["set", "bag"])
def test_random_instance(semantics):
    q = parse_query("q() :- R(x, y), S(y, z).")
    inst1 = random_instance(q, 6, 3, seed=7, semantics=semantics)
    inst2 = random_instance(q, 6, 3, seed=7, semantics=semantics)
    assert instance_to_dict(inst1) == instance_to_dict(inst2)
    assert set(inst1.relations) == {"R", "S"}
    for t in inst1.tuples():
        assert len(t.values) == 2
        assert all(v in ("c1", "c2", "c3") for v in t.values)
        assert 1 <= t.multiplicity <= (3 if semantics == "bag" else 1)
    for name in ("R", "S"):
        rows = inst1.relation(name)
        assert len(rows) <= 6
        assert [t.row for t in rows] == list(range(1, len(rows) + 1))

    with pytest.raises(ValueError):
        random_instance(q, 3, 0, seed=1)


def test_delete_tuples(mcdormand):
    _, inst = mcdormand
    smaller = delete_tuples(inst, ["Oscar:1", inst.get("ActsIn:2")])
    assert len(smaller) == 4
    assert "Oscar:1" not in smaller
    assert smaller.get("ActsIn:1") == inst.get("ActsIn:1")
    assert len(inst) == 6

    assert delete_tuples(inst, []) is inst

    with pytest.raises(UnknownTupleError):
        delete_tuples(inst, ["Oscar:7"])
