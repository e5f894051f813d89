import numpy as np
import pytest

from polar_ae.automorphism import admissible_mask, is_automorphism
from polar_ae.channel import transmit
from polar_ae.code import contains, encode
from polar_ae.construction import design_ga, load_5g_sequence
from polar_ae.decoders import DecodeResult, correlation, sc_decode
from polar_ae.ensemble import (
    AEDecoder,
    DecoderSpec,
    Ensemble,
    EnsembleError,
    InnerDecoder,
    ae_decode,
    build_ensemble,
    select_best,
)


def _noisy(code, snr, count, rng):
    payload = rng.integers(0, 2, (count, code.K), dtype=np.uint8)
    return encode(code, payload), transmit(code, payload, snr, rng)


def test_m1_is_identity(code16_7, rng):
    ens = build_ensemble(code16_7, 1, "utl", rng)
    assert ens.M == 1 and ens.perms[0].is_identity()
    _, llr = _noisy(code16_7, 2.0, 300, rng)
    assert np.array_equal(ae_decode(code16_7, llr, ens).codeword, sc_decode(code16_7, llr).codeword)


def test_16_7_two_branches(code16_7):
    ens = build_ensemble(code16_7, 2, "utl", 0)
    assert ens.M == 2
    assert ens.transforms[1].A[1, 2] == 1 and ens.transforms[1].A.sum() == 5
    assert is_automorphism(code16_7, ens.perms[1])
    with pytest.raises(EnsembleError, match="1 non-trivial"):
        build_ensemble(code16_7, 3, "utl", 0)


def test_t0_code_rejected():
    code = next(load_5g_sequence(7).code(K) for K in range(1, 128)
                if admissible_mask(load_5g_sequence(7).code(K)).t == 0)
    with pytest.raises(EnsembleError, match="0 non-trivial UTL automorphisms"):
        build_ensemble(code, 2, "utl", 0)
    with pytest.raises(EnsembleError):
        build_ensemble(code, 0, "utl", 0)
    with pytest.raises(EnsembleError):
        build_ensemble(code, 2, "bogus", 0)


def test_ensemble_invariants():
    code = design_ga(7, 10.5).code(100)
    for group in ("utl", "lta", "utlxlta"):
        ens = build_ensemble(code, 8, group, 5)
        assert ens.perms[0].is_identity()
        assert len({p.map.tobytes() for p in ens.perms}) == 8
        assert all(is_automorphism(code, p) for p in ens.perms)
        assert ens.describe()["branches"] == 8
    with pytest.raises(EnsembleError):
        Ensemble([ens.perms[1], ens.perms[0]])
    with pytest.raises(EnsembleError):
        Ensemble([ens.perms[0], ens.perms[1], ens.perms[1]])


def test_seeded_ensemble_reproducible():
    code = design_ga(7, 10.5).code(100)
    a = build_ensemble(code, 8, "utlxlta", 11)
    b = build_ensemble(code, 8, "utlxlta", 11)
    assert [p.map.tolist() for p in a.perms] == [p.map.tolist() for p in b.perms]


def test_lta_absorbed_by_sc(rng):
    code = design_ga(7, 10.5).code(100)
    ens = build_ensemble(code, 8, "lta", rng)
    _, llr = _noisy(code, 3.0, 500, rng)
    ae = ae_decode(code, llr, ens)
    assert np.array_equal(ae.codeword, sc_decode(code, llr).codeword)


def test_utl_ae_not_worse_than_sc(rm13, rng):
    x, llr = _noisy(rm13, 3.0, 10_000, rng)
    ens = build_ensemble(rm13, 8, "utl", rng)
    e_ae = np.mean(np.any(ae_decode(rm13, llr, ens).codeword != x, axis=1))
    e_sc = np.mean(np.any(sc_decode(rm13, llr).codeword != x, axis=1))
    assert e_ae <= e_sc


def test_select_best_examples():
    llr = np.ones(8)
    zero = DecodeResult(np.zeros(8, np.uint8), np.zeros(4, np.uint8), 8.0)
    ones = DecodeResult(np.ones(8, np.uint8), np.ones(4, np.uint8), -8.0)
    assert select_best([zero], llr) is zero
    assert select_best([ones], llr) is ones
    assert select_best([ones, zero], llr) is zero
    with pytest.raises(ValueError):
        select_best([], llr)
    # tie goes to the earliest candidate
    other = DecodeResult(np.zeros(8, np.uint8), np.zeros(4, np.uint8), 8.0)
    assert select_best([other, zero], llr) is other


def test_hard_decision_codeword_selected(rm13, rng):
    x, _ = _noisy(rm13, 3.0, 1, rng)
    llr = (1 - 2.0 * x[0]) * rng.uniform(0.1, 3, 8)
    cands = [DecodeResult(c, None, 0) for c in encode(rm13, np.eye(4, dtype=np.uint8))] + \
            [DecodeResult(x[0], None, 0)]
    assert np.array_equal(select_best(cands, llr).codeword, x[0])


@pytest.mark.parametrize("inner", ["sc", "scl", "bp"])
def test_ae_properties(inner, rng):
    code = design_ga(6, 4.0).code(32)
    ens = build_ensemble(code, 4, "utlxlta", rng, inner=InnerDecoder(inner, 4, 20))
    _, llr = _noisy(code, 2.0, 300, rng)
    ae = ae_decode(code, llr, ens)
    assert all(contains(code, row) for row in ae.codeword)
    branch0 = ens.inner(code, llr)
    assert np.all(correlation(ae.codeword, llr) >= correlation(branch0.codeword, llr) - 1e-9)
    assert np.array_equal(encode(code, ae.payload), ae.codeword)
    # order invariance when the metrics are distinct
    rev = Ensemble([ens.perms[0]] + ens.perms[:0:-1], ens.inner)
    ae_rev = ae_decode(code, llr, rev)
    assert np.array_equal(ae.codeword, ae_rev.codeword)


def test_ae_single_frame(code16_7, rng):
    ens = build_ensemble(code16_7, 2, "utl", rng)
    res = ae_decode(code16_7, np.full(16, 3.0), ens)
    assert res.codeword.shape == (16,) and not res.codeword.any()


def test_ae_estimator_and_spec(rm13, rng):
    est = AEDecoder(rm13, n_branches=4, group="utl", random_state=1).fit()
    assert est.ensemble_.M == 4
    x, llr = _noisy(rm13, 6.0, 500, rng)
    assert est.score(llr, x) > 0.95
    spec = DecoderSpec.from_dict({"decoder": "bp", "ae_branches": 8, "ae_group": "utlxlta"})
    assert spec.label == "AE8-BP(UTLXLTA)"
    assert DecoderSpec(decoder="scl", list_size=4).label == "SCL-4"
    assert isinstance(spec.build(rm13, seed=0), AEDecoder)
    with pytest.raises(ValueError):
        DecoderSpec.from_dict({"decoder": "sc", "foo": 1})
    with pytest.raises(ValueError):
        DecoderSpec(decoder="ml")
