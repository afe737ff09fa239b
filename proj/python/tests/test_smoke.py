import random

import pytest

import ldsc


def test_entropy_and_exponent():
    assert ldsc.binary_entropy(0.5) == 1.0
    assert abs(ldsc.error_exponent(0.6, "11/100") - 0.0088) < 5e-4
    assert ldsc.error_exponent(0.3, 0.11) == 0.0


def test_lossless_round_trip():
    plan = ldsc.make_lossless_plan(10, 4, 3, "11/100")
    box, uncovered = ldsc.compress("0000100010", plan)
    assert uncovered == 0
    assert box.decompress() == "0000100010"
    assert box.decode_symbol(4) == (1, 3)
    assert box.decode_symbol(9) == (0, 1)  # raw tail
    data = box.to_bytes()
    assert data[:4] == b"LDSC" and len(data) == 43
    assert ldsc.Container.from_bytes(data).decompress() == "0000100010"


def test_planner():
    plan = ldsc.plan_lossless(1 << 16, 0.6, 1e-3, "11/100")
    assert plan.exact_error <= 1e-3
    assert plan.code_bits == -(-6 * plan.block_len // 10)
    with pytest.raises(ldsc.PlanningError):
        ldsc.plan_lossless(1 << 16, 0.45, 1e-3, "11/100")
    with pytest.raises(ldsc.PlanningError):
        ldsc.plan_lossless(1 << 16, 0.6, 1e-3, "11/100", max_block_len=64)


def test_sampled_locality():
    rng = random.Random(3)
    plan = ldsc.plan_lossless(4096, 0.6, 1e-3, "11/100")
    bits = "".join("1" if rng.random() < 0.11 else "0" for _ in range(4096))
    box, uncovered = ldsc.compress(bits, plan, workers=2)
    assert uncovered == 0
    full = (4096 // plan.block_len) * plan.block_len
    for i in rng.sample(range(4096), 200):
        bit, reads = box.decode_symbol(i)
        assert bit == int(bits[i])
        assert reads == (plan.code_bits if i < full else 1)


def test_lossy_repetition_code():
    plan = ldsc.plan_lossy(7, 0.25, 1, "1/2")
    assert (plan.block_len, plan.code_bits) == (3, 1)
    assert plan.codewords == [0, 7]
    assert abs(plan.d_achieved - 0.25) < 1e-12
    box = ldsc.compress_lossy("0110001", plan)
    assert box.mode == "lossy"
    assert box.decompress() == "1110001"


def test_converse_checks():
    assert ldsc.best_2local_success(2, 1, "1/2") == 0.5
    report = ldsc.verify_subspace_bounds(4, [0.1, 0.3, 0.5])
    assert report["subspaces"] == 91 and report["violations"] == 0
    assert abs(ldsc.linear_decoder_error(["100"], 0.3) - 0.51) < 1e-12


def test_bad_bytes():
    with pytest.raises(ldsc.FormatError):
        ldsc.Container.from_bytes(b"JUNK")
