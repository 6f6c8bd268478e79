//! Circulant arithmetic against dense GF(2) matrices and a schoolbook
//! convolution.

use qcldpc::bits::{BitMatrix, BitVec};
use qcldpc::circulant::{join_blocks, split_blocks, QcBlockMatrix, RingPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: usize = 1000;

fn random_qc(rng: &mut ChaCha8Rng, p: usize, rows: usize, cols: usize) -> QcBlockMatrix {
    let blocks = (0..rows * cols).map(|_| sparse_or_dense(rng, p)).collect();
    QcBlockMatrix::from_blocks(p, rows, cols, blocks).unwrap()
}

/// Mix of light and uniform polynomials so both multiplier paths run.
fn sparse_or_dense(rng: &mut ChaCha8Rng, p: usize) -> RingPoly {
    if rng.gen_bool(0.5) {
        let w = rng.gen_range(0..=p.min(5));
        RingPoly::random_with_weight(p, w, rng)
    } else {
        RingPoly::random(p, rng)
    }
}

fn schoolbook(a: &RingPoly, b: &RingPoly) -> RingPoly {
    let p = a.p();
    let mut c = vec![false; p];
    for i in 0..p {
        for j in 0..p {
            if a.coeff(i) && b.coeff(j) {
                c[(i + j) % p] ^= true;
            }
        }
    }
    RingPoly::from_support(p, (0..p).filter(|&i| c[i]))
}

#[test]
fn ring_operations_match_dense_circulants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    let mut invertible = 0;
    for _ in 0..CASES {
        let p = rng.gen_range(1..=32);
        let a = sparse_or_dense(&mut rng, p);
        let b = sparse_or_dense(&mut rng, p);
        let (da, db) = (a.to_dense(), b.to_dense());

        assert_eq!((&a * &b).to_dense(), da.mul(&db).unwrap(), "product, p={p}");
        let sum = (&a + &b).to_dense();
        for r in 0..p {
            assert_eq!(sum.row(r), da.row(r).xor(&db.row(r)));
        }
        assert_eq!(a.transpose().to_dense(), da.transpose());
        let s = rng.gen_range(0..p);
        assert_eq!(
            a.rotate(s).to_dense(),
            RingPoly::monomial(p, s).to_dense().mul(&da).unwrap()
        );
        let had = a.hadamard(&b).unwrap();
        assert!((0..p).all(|i| had.coeff(i) == (a.coeff(i) && b.coeff(i))));

        match (a.inverse(), da.inverse()) {
            (Ok(inv), Some(dinv)) => {
                assert_eq!(inv.to_dense(), dinv);
                invertible += 1;
            }
            (Err(_), None) => {}
            (mine, dense) => panic!(
                "p={p}: ring says {:?}, dense says {:?}",
                mine.is_ok(),
                dense.is_some()
            ),
        }

        let v = BitVec::random(p, &mut rng);
        let prod = &RingPoly::from_bits(&v) * &a;
        assert_eq!(prod.to_bits(), da.left_mul_vec(&v).unwrap());
    }
    assert!(invertible > CASES / 10, "{invertible} invertible cases");
}

#[test]
fn block_operations_match_dense_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b12);
    let mut invertible = 0;
    for _ in 0..CASES {
        let p = rng.gen_range(1..=32);
        let (r, c, c2) = (
            rng.gen_range(1..=3),
            rng.gen_range(1..=3),
            rng.gen_range(1..=3),
        );
        let a = random_qc(&mut rng, p, r, c);
        let b = random_qc(&mut rng, p, c, c2);
        let b2 = random_qc(&mut rng, p, c, c2);

        assert_eq!(
            a.try_mul(&b).unwrap().to_dense(),
            a.to_dense().mul(&b.to_dense()).unwrap()
        );
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
        assert_eq!(QcBlockMatrix::from_dense(&a.to_dense(), p).unwrap(), a);

        let sum = b.try_add(&b2).unwrap();
        let (ds, d1, d2) = (sum.to_dense(), b.to_dense(), b2.to_dense());
        for row in 0..ds.rows() {
            assert_eq!(ds.row(row), d1.row(row).xor(&d2.row(row)));
        }

        let v = BitVec::random(r * p, &mut rng);
        assert_eq!(
            a.left_mul_bits(&v).unwrap(),
            a.to_dense().left_mul_vec(&v).unwrap()
        );
        let blocks = split_blocks(&v, p).unwrap();
        assert_eq!(
            join_blocks(&a.left_mul_blocks(&blocks).unwrap()),
            a.left_mul_bits(&v).unwrap()
        );

        // up to 7 block rows reaches the dense fallback beyond the adjugate
        let r = rng.gen_range(1..=7);
        let sq = random_qc(&mut rng, p, r, r);
        match (sq.inverse(), sq.to_dense().inverse()) {
            (Ok(inv), Some(dinv)) => {
                assert_eq!(inv.to_dense(), dinv);
                invertible += 1;
            }
            (Err(_), None) => {}
            (mine, dense) => panic!(
                "p={p}, {r}×{r}: block says {:?}, dense says {:?}",
                mine.is_ok(),
                dense.is_some()
            ),
        }
    }
    assert!(invertible > CASES / 20, "{invertible} invertible cases");
}

#[test]
fn products_match_schoolbook_at_larger_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c13);
    for _ in 0..200 {
        let p = rng.gen_range(33..=700);
        let a = sparse_or_dense(&mut rng, p);
        let b = sparse_or_dense(&mut rng, p);
        assert_eq!(&a * &b, schoolbook(&a, &b), "p={p}");
        if let Ok(inv) = a.inverse() {
            assert!((&a * &inv).is_one());
        }
    }
}

#[test]
fn dense_elimination_oracle_agrees_with_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d14);
    for _ in 0..200 {
        let n = rng.gen_range(1..=20);
        let m = BitMatrix::random(n, n, &mut rng);
        let inv = m.inverse();
        assert_eq!(inv.is_some(), m.rank() == n);
        if let Some(inv) = inv {
            assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(n));
        }
    }
}
