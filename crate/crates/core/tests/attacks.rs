use qcldpc::attacks::otd::shift_between;
use qcldpc::attacks::*;
use qcldpc::bits::BitVec;
use qcldpc::circulant::RingPoly;
use qcldpc::error::Error;
use qcldpc::mceliece::{encrypt_with_error, keygen, KeyVariant, PrivateKey, PublicKey};
use qcldpc::params::SystemParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn key(variant: KeyVariant, params: SystemParams, seed: u64) -> (PrivateKey, PublicKey) {
    keygen(params, variant, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn is_shifted_q(sk: &PrivateKey, row: usize, tau: &RingPoly) -> bool {
    shift_between(sk.q().block(row, row), tau).is_some()
}

fn dual_cfg(pk: &PublicKey, seed: u64) -> SternConfig {
    let p = &pk.params;
    SternConfig::optimal(
        p.n(),
        p.n() - p.k(),
        p.dc() * p.m,
        (p.n() - p.k()) as f64,
        20,
        seed,
    )
}

#[test]
fn dual_attack_breaks_permutation_keys() {
    let (_, pk) = key(KeyVariant::Permutation, SystemParams::toy(), 1);
    let rows = dual_code_attack(&pk, &dual_cfg(&pk, 1)).unwrap();
    assert!(!rows.is_empty());
    let gpub = pk.gpub.to_dense();
    for r in &rows {
        assert!(r.weight() <= pk.params.dc());
        assert!(gpub.mul_vec(r).unwrap().is_zero());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let u = BitVec::random(pk.params.k(), &mut rng);
        let (x, _) = encrypt_with_error(&pk, &u, &mut rng).unwrap();
        assert_eq!(decrypt_with_dual_rows(&pk, &rows, &x).unwrap(), u);
    }
}

#[test]
fn dual_attack_stalls_at_inflated_weight() {
    // d_c·m = 60, about n/4
    let params = SystemParams {
        m: 5,
        ..SystemParams::toy()
    };
    let (_, pk) = key(KeyVariant::Hardened, params, 3);
    assert!(dual_code_attack(&pk, &dual_cfg(&pk, 3)).unwrap().is_empty());
}

#[test]
fn extended_code_contains_shifted_errors() {
    let (_, pk) = key(KeyVariant::Hardened, SystemParams::toy(), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = BitVec::random(pk.params.k(), &mut rng);
    let (x, e) = encrypt_with_error(&pk, &u, &mut rng).unwrap();
    let one = build_extended_code(&pk, &x, 1).unwrap();
    assert_eq!(one.generator.rows(), pk.params.k() + 1);
    assert!(one.generator.solve_left(&e).is_some());
    let four = build_extended_code(&pk, &x, 4).unwrap();
    let parity = four.generator.kernel();
    for s in 0..4 {
        let es = qcldpc::circulant::vec_block_shift(&e, 4, s).unwrap();
        assert!(parity.mul_vec(&es).unwrap().is_zero());
    }
    assert!(build_extended_code(&pk, &x, 0).is_err());
}

#[test]
fn decoding_attack_recovers_error_and_message() {
    let (_, pk) = key(KeyVariant::Hardened, SystemParams::toy(), 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = &pk.params;
    let cfg = SternConfig::optimal(p.n(), p.k() + 8, p.t_prime, 8.0, 200, 5);
    for _ in 0..3 {
        let u = BitVec::random(p.k(), &mut rng);
        let (x, e) = encrypt_with_error(&pk, &u, &mut rng).unwrap();
        let out = decoding_attack(&pk, &x, 8, &cfg).unwrap();
        assert_eq!(out.error, e);
        assert_eq!(out.message, u);
    }
    let noise = BitVec::random(p.n(), &mut rng);
    assert_eq!(decoding_attack(&pk, &noise, 8, &cfg), Err(Error::NotFound));
}

#[test]
fn decoding_attack_without_errors() {
    let params = SystemParams {
        t_prime: 0,
        ..SystemParams::toy()
    };
    let (_, pk) = key(KeyVariant::Hardened, params, 6);
    let u = BitVec::random(pk.params.k(), &mut ChaCha8Rng::seed_from_u64(6));
    let x = pk.encode(&u).unwrap();
    let out = decoding_attack(&pk, &x, 1, &SternConfig::new(1, 1, 1, 0)).unwrap();
    assert!(out.error.is_zero());
    assert_eq!(out.message, u);
}

#[test]
fn otd_strategies_recover_weak_keys() {
    for seed in 0..20 {
        let (sk, pk) = key(KeyVariant::WeakOtd, SystemParams::toy(), 100 + seed);
        let s1 = otd_strategy1(&pk).unwrap();
        let s2 = otd_strategy2(&pk).unwrap();
        for (a, b) in s1.iter().zip(&s2) {
            assert!(a.candidates.iter().all(|t| is_shifted_q(&sk, a.row, t)));
            assert!(b.candidates.iter().all(|t| is_shifted_q(&sk, b.row, t)));
            assert!(a.candidates.iter().any(|t| b.candidates.contains(t)));
        }
        let p = &pk.params;
        let cfg = SternConfig::optimal(p.k(), p.p, p.m * p.k0(), p.p as f64, 50, seed);
        let s3 = otd_strategy3(&pk, &cfg).unwrap();
        for rec in &s3 {
            let l = shift_between(sk.q().block(rec.row, rec.row), &rec.candidates[0]).unwrap();
            // τ = x^l·q_i, so the recovered row is x^{-l}·S_i
            for (j, b) in rec.s_row.iter().enumerate() {
                assert_eq!(b.rotate(l), *sk.s().block(rec.row, j));
            }
        }
    }
}

#[test]
fn otd_strategies_fail_on_hardened_keys() {
    for seed in 0..20 {
        let (_, pk) = key(KeyVariant::Hardened, SystemParams::toy(), 200 + seed);
        assert_eq!(otd_strategy1(&pk), Err(Error::NoCandidate));
        assert_eq!(otd_strategy2(&pk), Err(Error::NoCandidate));
        let p = &pk.params;
        let cfg = SternConfig::optimal(p.k(), p.p, p.m * p.k0(), p.p as f64, 50, seed);
        assert_eq!(otd_strategy3(&pk, &cfg), Err(Error::NotFound));
    }
}

#[test]
fn otd_degenerate_single_weight() {
    let params = SystemParams {
        m: 1,
        ..SystemParams::toy()
    };
    let (sk, pk) = key(KeyVariant::WeakOtd, params, 9);
    let recs = otd_strategy1(&pk).unwrap();
    for rec in recs {
        // every nonzero g_ij is itself a monomial times q_i
        assert!(!rec.candidates.is_empty() && rec.candidates.len() <= params.k0());
        assert!(rec
            .candidates
            .iter()
            .all(|t| t.weight() == 1 && is_shifted_q(&sk, rec.row, t)));
    }
}
