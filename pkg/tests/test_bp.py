import itertools

import numpy as np
import pytest

from cbdecode.bp import BPDecoder, bp_cb_decode, bp_decode, event_weights
from cbdecode.cb import CBParams, run_schedule
from cbdecode.gf2 import BinaryMatrix, mat_vec_mod2
from cbdecode.noise import data_qubit_model, sample_shot, shot_rng


def chain_code():
    return BinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])


def exact_marginals(m, syndrome, priors):
    num = np.zeros(m.cols)
    den = 0.0
    for bits in itertools.product([0, 1], repeat=m.cols):
        e = np.array(bits, dtype=np.uint8)
        if np.array_equal(mat_vec_mod2(m, e), syndrome):
            w = float(np.prod(np.where(e == 1, priors, 1.0 - priors)))
            num += w * e
            den += w
    return num / den


def test_zero_syndrome_converges_at_iteration_zero():
    m = chain_code()
    res = bp_decode(m, np.zeros(2, dtype=np.uint8), np.array([0.1, 0.2, 0.3]))
    assert res.converged and res.iterations == 0
    assert not res.hard_decision.any()


def test_single_check_single_mechanism_forced():
    m = BinaryMatrix.from_dense([[1]])
    res = bp_decode(m, np.array([1], dtype=np.uint8), np.array([0.1]))
    assert res.hard_decision.tolist() == [1]
    assert res.converged


def test_marginals_exact_on_tree():
    m = chain_code()
    priors = np.array([0.1, 0.1, 0.1])
    for syndrome in ([0, 0], [0, 1], [1, 0], [1, 1]):
        s = np.array(syndrome, dtype=np.uint8)
        res = bp_decode(m, s, priors, max_iters=40, stop_on_match=False)
        exact = exact_marginals(m, s, priors)
        assert np.abs(res.marginals - exact).max() < 1e-9


def test_marginals_exact_on_tree_asymmetric_priors():
    m = BinaryMatrix.from_dense([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]])
    priors = np.array([0.02, 0.3, 0.11, 0.47])
    for syndrome in ([1, 0, 1], [0, 1, 0], [1, 1, 1]):
        s = np.array(syndrome, dtype=np.uint8)
        res = bp_decode(m, s, priors, max_iters=60, stop_on_match=False)
        exact = exact_marginals(m, s, priors)
        assert np.abs(res.marginals - exact).max() < 1e-9


def test_prior_validation():
    m = chain_code()
    s = np.zeros(2, dtype=np.uint8)
    with pytest.raises(ValueError):
        bp_decode(m, s, np.array([0.0, 0.1, 0.1]))
    with pytest.raises(ValueError):
        bp_decode(m, s, np.array([0.6, 0.1, 0.1]))


def test_llrs_follow_marginals_and_are_clamped():
    m = BinaryMatrix.from_dense([[1]])
    res = bp_decode(m, np.array([1], dtype=np.uint8), np.array([1e-9]), max_iters=5,
                    stop_on_match=False)
    assert res.llrs.max() <= 25.0 and res.llrs.min() >= -25.0
    # hard decision flips exactly where the marginal exceeds 1/2
    assert np.array_equal(res.hard_decision, (res.marginals > 0.5).astype(np.uint8))


def test_event_weights_examples():
    w = event_weights(np.array([0.5, 2.0, -1.0]))
    assert np.allclose(w, [2.5, 4.0, 1.0])
    assert event_weights(np.array([3.0, 3.0])).tolist() == [1.0, 1.0]
    shifted = event_weights(np.array([0.5, 2.0, -1.0]) + 7.5)
    assert np.allclose(shifted, w)
    assert event_weights(np.array([4.0, 1.2, 9.9])).min() == 1.0
    with pytest.raises(ValueError):
        event_weights(np.array([]))


def test_unit_weights_match_plain_schedule(bb72):
    # with all event weights equal to 1 the weighted engine must make the
    # same decisions as the plain one over the same step range
    m = bb72.hz
    params = CBParams(5, 12, 3)
    ones = np.ones(m.cols)
    rng = np.random.default_rng(77)
    for _ in range(40):
        e = (rng.random(72) < 0.05).astype(np.uint8)
        s = mat_vec_mod2(m, e)
        plain = run_schedule(s, params, m, range(2, 6), float)
        weighted = run_schedule(
            s, params, m, range(2, 6), float, event_weights=ones
        )
        assert np.array_equal(plain, weighted)


def test_bp_cb_returns_bp_answer_when_it_matches(bb72):
    model, _ = data_qubit_model(bb72, 0.05)
    params = CBParams(6, 10, 3)
    dec = BPDecoder(model.noise_matrix, model.priors)
    found_converged = False
    for i in range(40):
        shot = sample_shot(model, shot_rng(3, i))
        res = dec.decode(shot.syndrome, 30)
        out = bp_cb_decode(shot.syndrome, params, model, decoder=dec)
        if res.converged:
            found_converged = True
            assert np.array_equal(out, res.hard_decision)
    assert found_converged


def test_bp_cb_zero_syndrome(bb72):
    model, _ = data_qubit_model(bb72, 0.05)
    out = bp_cb_decode(np.zeros(36, dtype=np.uint8), CBParams(6, 10, 3), model)
    assert not out.any()


def test_bp_cb_soundness(bb72):
    model, _ = data_qubit_model(bb72, 0.08)
    params = CBParams(6, 10, 3)
    dec = BPDecoder(model.noise_matrix, model.priors)
    m = model.noise_matrix
    non_trivial = 0
    for i in range(200):
        shot = sample_shot(model, shot_rng(13, i))
        out = bp_cb_decode(shot.syndrome, params, model, decoder=dec)
        if out.any():
            non_trivial += 1
            assert np.array_equal(mat_vec_mod2(m, out), shot.syndrome)
    assert non_trivial > 100


def test_bp_cb_rescues_some_bp_failures(bb72):
    model, _ = data_qubit_model(bb72, 0.08)
    params = CBParams(6, 10, 3)
    dec = BPDecoder(model.noise_matrix, model.priors)
    rescued = 0
    for i in range(300):
        shot = sample_shot(model, shot_rng(29, i))
        if not shot.syndrome.any():
            continue
        res = dec.decode(shot.syndrome, 30)
        if res.converged:
            continue
        out = bp_cb_decode(shot.syndrome, params, model, decoder=dec)
        if out.any():
            rescued += 1
    assert rescued >= 5


def test_detector_model_round_trip_through_decoder(bb72):
    # weighted decoding over a phenomenological-style model stays sound
    from cbdecode.noise import phenomenological_model

    model = phenomenological_model(bb72, 0.03, 0.03, 3)
    params = CBParams(6, 36, 3)
    dec = BPDecoder(model.noise_matrix, model.priors)
    for i in range(40):
        shot = sample_shot(model, shot_rng(4, i))
        out = bp_cb_decode(shot.syndrome, params, model, decoder=dec)
        if out.any():
            assert np.array_equal(
                mat_vec_mod2(model.noise_matrix, out), shot.syndrome
            )
