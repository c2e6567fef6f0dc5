"""Triple computation, the extension operator, its norm, and the limit harness."""

from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from chainlab.adjust import adjust_family
from chainlab.core import InputError, is_chain
from chainlab.generators import DyadicGround, marciszewski_family, random_bit_indices
from chainlab.lineop import (
    FunctionOnLine,
    InconsistencyError,
    LineModel,
    TripleTable,
    apply_operator,
    coincident_schedule,
    compute_triples,
    continuity_harness,
    fourth_flip_witness,
    function_from_text,
    function_to_text,
    harness_report_to_text,
    limit_eval_point,
    model_from_text,
    model_to_text,
    no_fourth_flip_check,
    norm_witness,
    operator_norm,
    triple_pattern,
    triple_table_to_text,
)

from oracles import build_family, mixed_corpus

Y3 = (F(1, 4), F(1, 2), F(3, 4))
MODEL3 = LineModel(carrier=Y3 + (F(1),), dense_points=Y3)


def _family3(*traces):
    return build_family(list(traces), indices=Y3)


def test_triples_for_absent_element_all_fall_back_to_max():
    fam = _family3("000")
    table = compute_triples(fam, MODEL3)
    assert table.triples[0] == (F(1), F(1), F(1))


def test_triples_frozen_examples():
    fam = _family3("011", "010")
    table = compute_triples(fam, MODEL3)
    assert table.triples[0] == (F(1, 2), F(1), F(1))
    assert table.triples[1] == (F(1, 2), F(3, 4), F(1))


def test_triples_require_matching_dense_points_and_validation():
    fam = _family3("010")
    with pytest.raises(InputError):
        compute_triples(fam, LineModel.from_dense(Y3[:2]))
    bad = build_family(["1010"])
    with pytest.raises(InputError, match="witness"):
        compute_triples(bad, LineModel.from_dense(bad.indices))


def test_triples_are_always_ordered():
    rng = random.Random(71)
    for _ in range(80):
        fam = mixed_corpus(rng.randrange(10**6), 1, 8, 10)[0]
        if not len(fam):
            continue
        adjusted, _ = adjust_family(fam)
        table = compute_triples(adjusted, LineModel.from_dense(adjusted.indices))
        for x0, x1, x2 in table.triples:
            assert x0 <= x1 <= x2


def test_triple_table_rejects_unordered_rows():
    with pytest.raises(InputError):
        TripleTable(((F(2), F(1), F(3)),))


def test_model_shape_is_validated():
    with pytest.raises(InputError):
        LineModel(carrier=(), dense_points=())
    with pytest.raises(InputError):
        LineModel(carrier=(F(1), F(1)), dense_points=())
    with pytest.raises(InputError):
        LineModel(carrier=(F(1),), dense_points=(F(2),))


def test_operator_constant_function_stays_constant():
    fam = _family3("011", "010", "000")
    table = compute_triples(fam, MODEL3)
    f = FunctionOnLine({p: F(7, 3) for p in MODEL3.carrier})
    out = apply_operator(f, table)
    assert all(v == F(7, 3) for v in out.on_ground.values())
    assert out.on_carrier is f


def test_operator_cancellation_when_first_two_coincide():
    table = TripleTable(((F(1, 2), F(1, 2), F(3, 4)),))
    f = FunctionOnLine({F(1, 2): F(5), F(3, 4): F(-2)})
    assert apply_operator(f, table).on_ground[0] == F(-2)


def test_operator_step_function_substitution():
    # step that is 1 up to 1/2 and 0 beyond: Ef = f(1/2) - f(3/4) + f(1)
    table = TripleTable(((F(1, 2), F(3, 4), F(1)),))
    f = FunctionOnLine(
        {p: (F(1) if p <= F(1, 2) else F(0)) for p in MODEL3.carrier}
    )
    assert apply_operator(f, table).on_ground[0] == F(1) - F(0) + F(0)


def test_operator_requires_values_at_triple_points():
    table = TripleTable(((F(1, 2), F(3, 4), F(1)),))
    with pytest.raises(InputError):
        apply_operator(FunctionOnLine({F(1, 2): F(1)}), table)


def test_operator_is_linear():
    rng = random.Random(17)
    fam = _family3("011", "010", "001", "111")
    table = compute_triples(fam, MODEL3)
    for _ in range(50):
        rand_fraction = lambda: F(rng.randint(-8, 8), rng.randint(1, 8))
        f = FunctionOnLine({p: rand_fraction() for p in MODEL3.carrier})
        g = FunctionOnLine({p: rand_fraction() for p in MODEL3.carrier})
        a, b = rand_fraction(), rand_fraction()
        combo = FunctionOnLine(
            {p: a * f.values[p] + b * g.values[p] for p in MODEL3.carrier}
        )
        lhs = apply_operator(combo, table).on_ground
        ef = apply_operator(f, table).on_ground
        eg = apply_operator(g, table).on_ground
        assert lhs == {n: a * ef[n] + b * eg[n] for n in lhs}


def test_norm_is_one_without_a_strict_triple():
    assert operator_norm(TripleTable(((F(1), F(1), F(1)),))) == 1
    assert operator_norm(TripleTable(((F(1), F(1), F(2)), (F(1), F(2), F(2))))) == 1


def test_norm_is_three_with_a_strict_triple():
    mixed = TripleTable(((F(1), F(1), F(1)), (F(1), F(2), F(3))))
    assert operator_norm(mixed) == 3
    n, f = norm_witness(mixed, (F(1), F(2), F(3)))
    assert n == 1
    assert f.sup_norm() == 1
    assert apply_operator(f, mixed).on_ground[1] == 3


def test_norm_bounds_every_unit_function():
    rng = random.Random(29)
    for _ in range(60):
        fam = mixed_corpus(rng.randrange(10**6), 1, 7, 8)[0]
        adjusted, _ = adjust_family(fam)
        model = LineModel.from_dense(adjusted.indices) if len(adjusted) else None
        if model is None:
            continue
        table = compute_triples(adjusted, model)
        norm = operator_norm(table)
        assert norm <= 3
        f = FunctionOnLine(
            {p: F(rng.randint(-6, 6), rng.randint(1, 6)) for p in model.carrier}
        )
        sup_f = f.sup_norm()
        out = apply_operator(f, table)
        assert all(abs(v) <= norm * sup_f for v in out.on_ground.values())


def test_chain_family_collapses_to_norm_one():
    rng = random.Random(31)
    for _ in range(40):
        size = rng.randint(1, 10)
        width = rng.randint(1, 6)
        mask = 0
        masks = []
        for _ in range(width):
            mask |= rng.getrandbits(size)
            masks.append(mask)
        fam = build_family(
            ["".join("1" if m >> n & 1 else "0" for m in masks) for n in range(size)]
        )
        assert is_chain(fam)
        model = LineModel.from_dense(fam.indices)
        table = compute_triples(fam, model)
        assert operator_norm(table) == 1
        for x0, x1, x2 in table.triples:
            assert x1 == x2 == model.max_point or x0 == x1 == x2


def test_fourth_flip_check():
    fam = _family3("010")
    table = compute_triples(fam, MODEL3)
    assert no_fourth_flip_check(fam, table)
    pattern = build_family(["1010"])
    handmade = TripleTable(
        ((pattern.indices[0], pattern.indices[1], pattern.indices[2]),)
    )
    assert fourth_flip_witness(pattern, handmade) == (0, pattern.indices[3])
    absent = _family3("000")
    assert no_fourth_flip_check(absent, compute_triples(absent, MODEL3))
    with pytest.raises(InputError):
        fourth_flip_witness(fam, TripleTable(()))


def test_fourth_flip_holds_for_all_adjusted_families():
    rng = random.Random(37)
    for _ in range(80):
        fam = mixed_corpus(rng.randrange(10**6), 1, 8, 10)[0]
        if not len(fam):
            continue
        adjusted, _ = adjust_family(fam)
        table = compute_triples(adjusted, LineModel.from_dense(adjusted.indices))
        assert no_fourth_flip_check(adjusted, table)


@pytest.mark.parametrize(
    "triple,expected",
    [
        ((F(1), F(1), F(1)), F(1)),
        ((F(1), F(2), F(2)), F(1)),
        ((F(1), F(1), F(2)), F(2)),
    ],
)
def test_limit_eval_point_decision_table(triple, expected):
    assert limit_eval_point(*triple) == expected


def test_limit_eval_point_errors():
    with pytest.raises(InputError):
        limit_eval_point(F(2), F(1), F(3))
    with pytest.raises(InconsistencyError):
        limit_eval_point(F(1), F(2), F(3))


def test_trichotomy_identity_on_accepted_triples():
    rng = random.Random(41)
    for _ in range(100):
        a, b = sorted(F(rng.randint(0, 30), 8) for _ in range(2))
        triple = rng.choice([(a, a, a), (a, b, b), (a, a, b)])
        z = limit_eval_point(*triple)
        f = {p: F(rng.randint(-9, 9), rng.randint(1, 5)) for p in {a, b}}
        assert f[triple[0]] - f[triple[1]] + f[triple[2]] == f[z]


def test_harness_constant_schedule():
    fam = _family3("000")  # triple (1, 1, 1) at the carrier top
    f = FunctionOnLine({p: p + 1 for p in MODEL3.carrier})
    report = continuity_harness(fam, MODEL3, [(0, 0), (0, 1), (0, 2)], f)
    assert report.limit_point == F(1)
    assert report.identity_holds
    assert all(step.operator_value == F(2) for step in report.steps)


def test_harness_final_coincidence_cancels():
    fam = _family3("011")  # triple (1/2, 1, 1): evaluation lands at 1/2
    f = FunctionOnLine({p: 3 * p for p in MODEL3.carrier})
    report = continuity_harness(fam, MODEL3, [(0, 0)], f)
    assert report.final_triple == (F(1, 2), F(1), F(1))
    assert report.limit_point == F(1, 2)
    assert report.final_operator_value == f.values[F(1, 2)]
    assert report.identity_holds


def test_harness_rejects_non_monotone_schedules():
    fam = _family3("011", "000", "011")
    f = FunctionOnLine({p: p for p in MODEL3.carrier})
    with pytest.raises(InputError, match="monotone"):
        continuity_harness(fam, MODEL3, [(0, 0), (1, 1), (0, 2)], f)
    with pytest.raises(InputError):
        continuity_harness(fam, MODEL3, [], f)


def test_harness_flags_strict_final_triple():
    fam = _family3("010")  # (1/2, 3/4, 1) is strict in the extended carrier
    f = FunctionOnLine({p: p for p in MODEL3.carrier})
    with pytest.raises(InconsistencyError):
        continuity_harness(fam, MODEL3, [(0, 0)], f)


def test_coincident_schedules_from_adjusted_families_never_flag():
    rng = random.Random(43)
    runs = 0
    for _ in range(60):
        xs = random_bit_indices(rng, 5, rng.randint(3, 12))
        fam = marciszewski_family(xs, DyadicGround(5))
        adjusted, _ = adjust_family(fam)
        model = LineModel.from_dense(adjusted.indices)
        table = compute_triples(adjusted, model)
        schedule = coincident_schedule(table)
        if not schedule:
            continue
        runs += 1
        f = FunctionOnLine(
            {p: F(rng.randint(-9, 9), rng.randint(1, 7)) for p in model.carrier}
        )
        report = continuity_harness(adjusted, model, schedule, f)
        assert report.identity_holds
        for step in report.steps:
            assert triple_pattern(step.triple) != "x0<x1<x2"
    assert runs > 30


def test_harness_report_text_is_stable():
    fam = _family3("011")
    f = FunctionOnLine({p: 2 * p for p in MODEL3.carrier})
    report = continuity_harness(fam, MODEL3, [(0, 0)], f)
    assert harness_report_to_text(report) == (
        "# stage\tn\tx0\tx1\tx2\tpattern\tEf\n"
        "0\t0\t1/2\t1/1\t1/1\tx0<x1=x2\t1\n"
        "# z\t1/2\n"
        "# f(z)\t1\n"
        "# identity\tok\n"
    )


def test_text_formats_round_trip():
    table = TripleTable(((F(1, 2), F(3, 4), F(1)), (F(1), F(1), F(1))))
    assert triple_table_to_text(table) == (
        "# n\tx0\tx1\tx2\tpattern\n"
        "0\t1/2\t3/4\t1/1\tx0<x1<x2\n"
        "1\t1/1\t1/1\t1/1\tx0=x1=x2\n"
    )
    f = FunctionOnLine({F(1, 2): F(-3, 7), F(1): F(2)})
    assert function_from_text(function_to_text(f)) == f
    model = MODEL3
    assert model_from_text(model_to_text(model)) == model
    with pytest.raises(InputError):
        function_from_text("{}")
    with pytest.raises(InputError):
        model_from_text('{"carrier": ["1/2"]}')
