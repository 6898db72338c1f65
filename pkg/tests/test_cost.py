import random
from dataclasses import replace

import pytest

from sigjoin.cost import (COMPONENTS, UNIT_COSTS, CostParams, default_params, disk_ios,
                          dump_config, evaluate, memory_needed, parse_config)
from sigjoin.errors import ConfigError


def test_memory_needed_examples():
    assert memory_needed(100, 10) == 10
    assert memory_needed(1, 1) == 1
    assert memory_needed(1000, 10) == 100
    assert memory_needed(101, 10) == 11


def test_disk_ios_examples():
    assert disk_ios(100, 20) == 520
    assert disk_ios(100, 100) == 200
    assert disk_ios(1, 0) == 6
    for b in (1, 7, 1000):
        assert disk_ios(b, 0) == 6 * b
    with pytest.raises(ValueError):
        disk_ios(10, 11)


def test_zero_costs_leave_memory():
    bd = evaluate(CostParams(b=50, k=10, r_area=50))
    assert bd.total == 10 + 100
    bd = evaluate(CostParams(b=8, k=8, r_area=8, m=5, n=9))
    assert bd.build_buckets == bd.build_hash == bd.probe_hash == bd.output_result == 0


def test_composite_183():
    per_tuple = {u: 1 for u in UNIT_COSTS if u not in ("write_hsign_to_disk", "disk_input_tuples_result",
                                                        "materialize_t")}
    bd = evaluate(CostParams(b=1, k=1, r_area=1, m=10, n=20, L_f=1, **per_tuple))
    assert (bd.build_buckets, bd.build_hash, bd.probe_hash) == (90, 30, 60)
    assert (bd.disk_ios, bd.memory_needed_pages, bd.output_result) == (2, 1, 0)
    assert bd.total == 183


def test_doubling_n():
    p = replace(default_params(), n=1000)
    a, b = evaluate(p), evaluate(replace(p, n=2000))
    assert b.probe_hash == pytest.approx(2 * a.probe_hash)
    assert b.build_hash == a.build_hash


def _random_params(rng):
    b = rng.randint(1, 500)
    return CostParams(b=b, k=rng.randint(1, 50), r_area=rng.randint(0, b), m=rng.randint(0, 10_000),
                      n=rng.randint(0, 10_000), L_f=rng.randint(1, 4),
                      **{u: rng.randint(0, 1000) for u in UNIT_COSTS})


def test_superposition_linearity():
    rng = random.Random(5)
    for _ in range(100):
        p = _random_params(rng)
        u1 = {u: rng.randint(0, 1000) for u in UNIT_COSTS}
        u2 = {u: rng.randint(0, 1000) for u in UNIT_COSTS}
        c1, c2 = rng.randint(0, 9), rng.randint(0, 9)
        mixed = {u: c1 * u1[u] + c2 * u2[u] for u in UNIT_COSTS}
        zero = evaluate(p.with_units({u: 0 for u in UNIT_COSTS})).as_dict()
        e1, e2, em = (evaluate(p.with_units(u)).as_dict() for u in (u1, u2, mixed))
        for c in COMPONENTS:
            assert em[c] - zero[c] == c1 * (e1[c] - zero[c]) + c2 * (e2[c] - zero[c])


def test_monotonicity():
    rng = random.Random(8)
    for _ in range(100):
        p = _random_params(rng)
        base = evaluate(p).as_dict()
        for name in UNIT_COSTS + ("m", "n", "L_f"):
            bumped = evaluate(replace(p, **{name: getattr(p, name) + 1})).as_dict()
            assert all(bumped[c] >= base[c] for c in COMPONENTS)
        bigger = evaluate(replace(p, b=p.b + 1)).as_dict()
        assert all(bigger[c] >= base[c] for c in COMPONENTS)
        if p.r_area < p.b:
            assert evaluate(replace(p, r_area=p.r_area + 1)).disk_ios < base["disk_ios"]


def test_param_validation():
    for bad in (dict(b=0), dict(k=0), dict(b=5, r_area=6), dict(m=-1), dict(L_f=0.5), dict(hash_bucket=-1)):
        with pytest.raises(ValueError):
            CostParams(**bad)


def test_config_round_trip():
    p = default_params()
    assert parse_config(dump_config(p)) == p


def test_config_parsing():
    p = parse_config("# comment\nb = 100\nk=10\n\nr = 20   # alias\nlf = 2\n")
    assert (p.b, p.k, p.r_area, p.L_f) == (100, 10, 20, 2)


@pytest.mark.parametrize("text,line", [("b = 1\nnonsense\n", 2), ("b = x\n", 1),
                                       ("\n\nwhat = 3\n", 3), ("k = 1.5\n", 1), ("b = nan\n", 1)])
def test_config_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line


def test_default_profile_is_sane():
    p = default_params()
    bd = evaluate(p)
    assert p.b == 313 and p.m == 10_000
    assert bd.total > 0 and bd.grace_temp_ios == 4 * (p.b - p.r_area)
