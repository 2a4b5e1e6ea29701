import json

import pytest

from resyduo.errors import DraftNotFoundError, VocabularyError
from resyduo.store import ProjectStore


def make_store(tmp_path, **kwargs):
    return ProjectStore(tmp_path / "projects.json", **kwargs)


def test_create_assigns_sequential_ids(tmp_path):
    store = make_store(tmp_path)
    a = store.create("first")
    b = store.create("second")
    assert a.id == "d000001"
    assert b.id == "d000002"
    assert a.selected_components == ()
    assert a.sketch == ""


def test_get_and_list(tmp_path):
    store = make_store(tmp_path)
    a = store.create("alpha", ["led"], "void setup() {}")
    assert store.get(a.id) == a
    b = store.create("beta")
    assert [d.id for d in store.list()] == [a.id, b.id]


def test_update_only_touches_given_fields(tmp_path):
    clock = iter(range(100)).__next__
    store = make_store(tmp_path, clock=lambda: float(clock()))
    d = store.create("draft", ["led"], "code")
    updated = store.update(d.id, name="renamed")
    assert updated.name == "renamed"
    assert updated.selected_components == ("led",)
    assert updated.sketch == "code"
    assert updated.updated_at > d.updated_at
    updated = store.update(d.id, selected_components=["servo", "led", "servo"])
    assert updated.selected_components == ("led", "servo")


def test_delete(tmp_path):
    store = make_store(tmp_path)
    d = store.create("doomed")
    store.delete(d.id)
    assert store.list() == []
    with pytest.raises(DraftNotFoundError):
        store.get(d.id)
    with pytest.raises(DraftNotFoundError):
        store.delete(d.id)


def test_unknown_ids_raise(tmp_path):
    store = make_store(tmp_path)
    with pytest.raises(DraftNotFoundError):
        store.get("d999999")
    with pytest.raises(DraftNotFoundError):
        store.update("d999999", name="x")


def test_sketch_round_trip_preserves_bytes(tmp_path):
    store = make_store(tmp_path)
    d = store.create("sketchy")
    text = "#include <Servo.h>\r\n\tvoid setup() {\n  // üñïçödé\n}\n"
    store.put_sketch(d.id, text)
    assert store.get_sketch(d.id) == text


def test_vocabulary_guard(tmp_path):
    store = make_store(tmp_path, vocabulary={"led", "servo"})
    d = store.create("ok", ["led"])
    assert d.selected_components == ("led",)
    with pytest.raises(VocabularyError):
        store.create("bad", ["led", "flux-capacitor"])
    with pytest.raises(VocabularyError):
        store.update(d.id, selected_components=["warp-core"])
    # nothing partial went through
    assert store.get(d.id).selected_components == ("led",)


def test_no_vocabulary_accepts_anything(tmp_path):
    store = make_store(tmp_path)
    d = store.create("free", ["anything-goes"])
    assert d.selected_components == ("anything-goes",)


def test_state_survives_reopen(tmp_path):
    store = make_store(tmp_path)
    d = store.create("persist", ["led"], "blink")
    reopened = make_store(tmp_path)
    assert reopened.get(d.id) == d
    # id sequence continues instead of recycling
    assert reopened.create("next").id == "d000002"


def test_store_file_is_plain_json(tmp_path):
    store = make_store(tmp_path)
    store.create("inspectable")
    with open(tmp_path / "projects.json") as fh:
        obj = json.load(fh)
    assert obj["next_id"] == 2
    assert set(obj["drafts"]) == {"d000001"}
