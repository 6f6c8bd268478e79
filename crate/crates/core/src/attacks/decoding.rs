//! Decoding attack: the intentional error is a minimum-weight word of the
//! public code extended by shifted ciphertexts.

use crate::attacks::stern::{Stern, SternConfig};
use crate::bits::{BitMatrix, BitVec};
use crate::circulant::vec_block_shift;
use crate::error::{Error, Result};
use crate::mceliece::PublicKey;
use crate::rng::substream;

#[derive(Clone, Debug)]
pub struct ExtendedCode {
    /// Rows of `G'` followed by `x` shifted by `0..r`.
    pub generator: BitMatrix,
    pub r: usize,
}

pub fn build_extended_code(pk: &PublicKey, x: &BitVec, r: usize) -> Result<ExtendedCode> {
    let params = &pk.params;
    if r == 0 || r > params.p {
        return Err(Error::InvalidParams(format!(
            "r = {r} outside 1..={}",
            params.p
        )));
    }
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: x.len(),
        });
    }
    let mut rows = pk.gpub.to_dense().row_vecs();
    for s in 0..r {
        rows.push(vec_block_shift(x, params.n0, s)?);
    }
    Ok(ExtendedCode {
        generator: BitMatrix::from_rows(params.n(), &rows),
        r,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingAttackOutcome {
    pub error: BitVec,
    pub message: BitVec,
    /// Block shift of the error word that Stern returned.
    pub shift: usize,
    pub iterations: usize,
}

/// Search the `r`-fold extension for weight-`t'` words, unshift them and
/// keep the first whose removal leaves a public codeword.
pub fn decoding_attack(
    pk: &PublicKey,
    x: &BitVec,
    r: usize,
    cfg: &SternConfig,
) -> Result<DecodingAttackOutcome> {
    let params = &pk.params;
    let gpub = pk.gpub.to_dense();
    let recover = |e: &BitVec| -> Option<BitVec> {
        let u = gpub.solve_left(&x.xor(e))?;
        (pk.encode(&u).ok()?.xor(e) == *x).then_some(u)
    };
    if params.t_prime == 0 {
        let e = BitVec::zeros(params.n());
        let message = recover(&e).ok_or(Error::NotFound)?;
        return Ok(DecodingAttackOutcome {
            error: e,
            message,
            shift: 0,
            iterations: 0,
        });
    }
    let ext = build_extended_code(pk, x, r)?;
    let stern = Stern::new(&ext.generator, params.t_prime, cfg.g, cfg.l)?;
    for i in 0..cfg.max_iterations {
        for cand in stern.iteration(&mut substream(cfg.seed, i as u64)) {
            if cand.weight() != params.t_prime {
                continue;
            }
            for s in 0..params.p {
                let e = vec_block_shift(&cand, params.n0, (params.p - s) % params.p)?;
                if let Some(message) = recover(&e) {
                    return Ok(DecodingAttackOutcome {
                        error: e,
                        message,
                        shift: s,
                        iterations: i + 1,
                    });
                }
            }
        }
    }
    Err(Error::NotFound)
}
