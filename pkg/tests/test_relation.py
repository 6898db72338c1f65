import datetime as dt

import pytest
from hypothesis import given, settings, strategies as st

from sigjoin.errors import DuplicateHeader, MissingColumn, SchemaError, TypeParseError
from sigjoin.join import nested_loop_join
from sigjoin.relation import (PRINTABLE, GenSpec, Relation, Schema, emit_csv, generate_pair,
                              load_csv, read_schema, write_schema)

SCHEMA = Schema((("id", "integer"), ("name", "string")), "name")


def _write(tmp_path, text, name="r.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_header_only(tmp_path):
    rel = load_csv(_write(tmp_path, "id,name\n"), SCHEMA)
    assert len(rel) == 0


def test_two_rows(tmp_path):
    rel = load_csv(_write(tmp_path, "id,name\n1,ann\n2,bob\n"), SCHEMA)
    assert len(rel) == 2
    assert rel.schema.key_column == "name"
    assert rel.rows == [(1, "ann"), (2, "bob")]


def test_header_order_is_free(tmp_path):
    rel = load_csv(_write(tmp_path, "name,id\nann,1\n"), SCHEMA)
    assert rel.rows == [(1, "ann")]


def test_type_error_names_row_2(tmp_path):
    with pytest.raises(TypeParseError) as exc:
        load_csv(_write(tmp_path, "id,name\nx1,ann\n"), SCHEMA)
    assert exc.value.row == 2 and exc.value.column == "id"


def test_header_errors(tmp_path):
    with pytest.raises(DuplicateHeader):
        load_csv(_write(tmp_path, "id,name,id\n"), SCHEMA)
    with pytest.raises(MissingColumn):
        load_csv(_write(tmp_path, "id\n1\n"), SCHEMA)
    with pytest.raises(SchemaError):
        load_csv(_write(tmp_path, "id,name,extra\n"), SCHEMA)


def test_schema_validation():
    with pytest.raises(SchemaError):
        Schema((("a", "string"),), "b")
    with pytest.raises(SchemaError):
        Schema((("a", "blob"),), "a")


def test_round_trip_generated(tmp_path):
    gen = generate_pair(GenSpec(50, 80, 12, seed=3))
    path = tmp_path / "r.csv"
    emit_csv(gen.r, path)
    write_schema(gen.r.schema, tmp_path / "r.schema")
    back = load_csv(path, read_schema(tmp_path / "r.schema"))
    assert back == gen.r
    emit_csv(back, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


text_values = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\r\x00"),
                      max_size=12)


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(-10**9, 10**9), text_values, st.dates()), max_size=8))
def test_round_trip_property(tmp_path_factory, rows):
    schema = Schema((("id", "integer"), ("name", "string"), ("day", "date")), "name")
    path = tmp_path_factory.mktemp("rt") / "x.csv"
    emit_csv(Relation(schema, rows), path)
    assert load_csv(path, schema).rows == [tuple(r) for r in rows]


def test_generator_deterministic():
    spec = GenSpec(200, 300, 10, seed=42)
    a, b = generate_pair(spec), generate_pair(spec)
    assert a.r == b.r and a.s == b.s and a.match_count == b.match_count
    assert generate_pair(GenSpec(200, 300, 10, seed=43)).r != a.r


def test_generator_shape():
    gen = generate_pair(GenSpec(100, 150, 9, row_bytes=128, seed=1))
    keys = gen.r.column("key") + gen.s.column("key")
    assert all(len(k) == 9 and set(k.encode()) <= set(PRINTABLE) for k in keys)
    assert isinstance(gen.r.rows[0][3], dt.date)


@pytest.mark.parametrize("seed", range(4))
def test_planted_count_matches_oracle(seed):
    gen = generate_pair(GenSpec(400, 900, 3 + seed, selectivity=0.004, seed=seed))
    assert len(nested_loop_join(gen.r, gen.s)) == gen.match_count


def test_default_selectivity_hits_15000():
    for seed in range(5):
        gen = generate_pair(GenSpec(10_000, 20_000, 20, seed=seed))
        assert abs(gen.match_count - 15_000) <= 1_500


def test_zero_selectivity():
    gen = generate_pair(GenSpec(300, 300, 6, selectivity=0.0, seed=5))
    assert gen.match_count == 0
    assert len(nested_loop_join(gen.r, gen.s)) == 0


def test_spec_validation():
    for bad in (dict(card_r=0), dict(card_r=5, card_s=4), dict(attr_len=0), dict(selectivity=1.5)):
        with pytest.raises(ValueError):
            GenSpec(**bad)
