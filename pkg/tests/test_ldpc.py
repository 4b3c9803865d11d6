"""Code construction, systematic encoding, and sum-product decoding."""

import numpy as np
import pytest

from uwbsim import ldpc


@pytest.fixture(scope="module")
def small():
    return ldpc.construct_regular(k=24, n=48, seed=3)


@pytest.fixture(scope="module")
def code():
    return ldpc.default_code()


def _bpsk_llr(codeword, sigma, rng):
    x = 1.0 - 2.0 * codeword
    y = x + sigma * rng.standard_normal(codeword.size)
    return 2.0 * y / sigma ** 2


# ---------------------------------------------------------------------------
# construction


def test_degree_profile_is_3_6_regular(small, code):
    for c in (small, code):
        assert np.all(c.H.sum(axis=0) == 3)
        assert np.all(c.H.sum(axis=1) == 6)


def test_no_length_four_cycles(code):
    # two variable nodes never share more than one check
    gram = code.H.astype(np.int64) @ code.H.astype(np.int64).T
    off = gram - np.diag(np.diag(gram))
    assert off.max() <= 1


def test_dimensions_and_rate(small, code):
    assert (code.n, code.k) == (1600, 800)
    assert code.rate == 0.5
    assert (small.n, small.k) == (48, 24)


def test_info_and_parity_positions_partition_codeword(code):
    merged = np.concatenate([code.info_positions, code.parity_positions])
    assert np.array_equal(np.sort(merged), np.arange(code.n))


def test_construction_is_seed_deterministic():
    a = ldpc.construct_regular(k=24, n=48, seed=9)
    b = ldpc.construct_regular(k=24, n=48, seed=9)
    c = ldpc.construct_regular(k=24, n=48, seed=10)
    assert np.array_equal(a.H, b.H)
    assert not np.array_equal(a.H, c.H)


# ---------------------------------------------------------------------------
# encoding


def test_zero_info_encodes_to_zero(code):
    cw = ldpc.encode(code, np.zeros(code.k, dtype=np.uint8))
    assert not cw.any()


def test_random_codewords_satisfy_every_check(code):
    rng = np.random.default_rng(0)
    for _ in range(5):
        cw = ldpc.encode(code, rng.integers(0, 2, code.k))
        assert ldpc.check(code, cw)
        assert ldpc.syndrome_weight(code, cw) == 0


def test_encode_rejects_wrong_length(code):
    with pytest.raises(ValueError):
        ldpc.encode(code, np.zeros(code.k + 1, dtype=np.uint8))


def test_extract_info_round_trip(code):
    rng = np.random.default_rng(1)
    info = rng.integers(0, 2, code.k).astype(np.uint8)
    assert np.array_equal(ldpc.extract_info(code, ldpc.encode(code, info)), info)


def test_single_bit_flip_breaks_col_weight_checks(code):
    cw = ldpc.encode(code, np.zeros(code.k, dtype=np.uint8))
    cw[137] ^= 1
    assert ldpc.syndrome_weight(code, cw) == 3


# ---------------------------------------------------------------------------
# decoding


def test_confident_valid_codeword_is_fixed_point(code):
    rng = np.random.default_rng(2)
    cw = ldpc.encode(code, rng.integers(0, 2, code.k))
    llr = 20.0 * (1.0 - 2.0 * cw.astype(float))
    res = ldpc.decode(code, llr, max_iter=10)
    assert np.array_equal(res.hard_bits, cw)
    assert res.checks_satisfied and res.n_unsatisfied == 0
    assert res.n_iterations == 1            # early stop on the first pass


def test_zero_llrs_stay_uninformative(small):
    res = ldpc.decode(small, np.zeros(small.n), max_iter=5, early_stop=False)
    assert np.allclose(res.extrinsic_llr, 0.0)
    assert np.allclose(res.posterior_llr, 0.0)


def test_extrinsic_excludes_own_channel_llr(small):
    # after one iteration the message into variable i is built only from the
    # other variables' channel LLRs
    rng = np.random.default_rng(3)
    base = rng.normal(0.0, 2.0, small.n)
    ref = ldpc.decode(small, base, max_iter=1, early_stop=False)
    for i in (0, 17, small.n - 1):
        bumped = base.copy()
        bumped[i] += 10.0
        out = ldpc.decode(small, bumped, max_iter=1, early_stop=False)
        assert out.extrinsic_llr[i] == pytest.approx(ref.extrinsic_llr[i],
                                                     rel=1e-12)


def test_decode_rejects_wrong_length(code):
    with pytest.raises(ValueError):
        ldpc.decode(code, np.zeros(code.n - 1))


def test_decoding_cleans_awgn_at_moderate_snr(code):
    # rate-1/2 BPSK at Eb/N0 = 2.5 dB sits safely inside the waterfall
    ebn0 = 10 ** (2.5 / 10)
    sigma = float(np.sqrt(1.0 / (2 * code.rate * ebn0)))
    rng = np.random.default_rng(4)
    for _ in range(10):
        cw = ldpc.encode(code, rng.integers(0, 2, code.k))
        res = ldpc.decode(code, _bpsk_llr(cw, sigma, rng), max_iter=50)
        assert res.checks_satisfied
        assert np.array_equal(res.hard_bits, cw)


def test_posterior_is_channel_plus_extrinsic(small):
    rng = np.random.default_rng(5)
    llr = rng.normal(0.0, 2.0, small.n)
    res = ldpc.decode(small, llr, max_iter=3, early_stop=False)
    assert np.allclose(res.posterior_llr, llr + res.extrinsic_llr,
                       rtol=1e-12, atol=1e-12)


# ---------------------------------------------------------------------------
# persistence


def test_alist_round_trip(tmp_path, small):
    path = tmp_path / "code.alist"
    ldpc.export_alist(small, path)
    H = ldpc.import_alist(path)
    assert np.array_equal(H, small.H)
