import itertools

import pytest

from conftest import empty_model, random_model
from tsmverify.encode import classification_cnf, classify_via_sat, encode_tsm
from tsmverify.logic import TRUE, Iff, VarPool
from tsmverify.solver import solve_embedded
from tsmverify.tm import Monomial, TsmModel, classify


def test_xor_via_sat(xor):
    assert classify_via_sat(xor, (1, 0)) == 0
    assert classify_via_sat(xor, (1, 1)) == 1


def test_empty_model_via_sat():
    m = empty_model(3, 2)
    for bits in itertools.product((0, 1), repeat=3):
        assert classify_via_sat(m, bits) == 0


def test_literal_output_form_misreads_ties():
    # without the tie variable a draw in the votes satisfies the output
    m = empty_model(2, 2)
    assert classify_via_sat(m, (0, 0), break_ties=False) == 1
    assert classify(m, (0, 0)) == 0


def test_width_one_model():
    m = TsmModel(2, (Monomial.of(1),), (Monomial.of(2),))
    pool = VarPool()
    enc = encode_tsm(m, pool, break_ties=False)
    assert len(enc.out_parts) == 1
    last = enc.formula.args[-1]
    assert last == Iff(enc.out_parts[0], enc.output)
    for bits in itertools.product((0, 1), repeat=2):
        assert classify_via_sat(m, bits) == classify(m, bits)


def test_empty_monomial_encodes_as_true():
    m = empty_model(1, 1)
    enc = encode_tsm(m, VarPool())
    assert enc.formula.args[0] == Iff(enc.v_neg[0], TRUE)
    assert enc.formula.args[1] == Iff(enc.v_pos[0], TRUE)


def test_stable_tags(xor):
    pool = VarPool()
    encode_tsm(xor, pool, tag="a")
    for tag in ("input:x1", "input:x2", "a:out", "a:out:1", "a:out:2", "a:v:+:1", "a:v:-:2", "a:tie"):
        assert tag in pool
    assert pool.var("input:x1").id == 1


def test_output_is_functional(rng):
    # with inputs fixed, the true class is satisfiable and the other one is not
    for _ in range(30):
        m = random_model(rng, 4, 3)
        for bits in itertools.product((0, 1), repeat=4):
            y = classify(m, bits)
            assert solve_embedded(classification_cnf(m, bits, output=y)[0]).is_sat
            assert not solve_embedded(classification_cnf(m, bits, output=1 - y)[0]).is_sat


def test_matches_classify_random(rng):
    for _ in range(40):
        m = random_model(rng, 4, int(rng.integers(1, 4)))
        for bits in itertools.product((0, 1), repeat=4):
            assert classify_via_sat(m, bits) == classify(m, bits)
