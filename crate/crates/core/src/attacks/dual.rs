//! Low-weight rows of the public parity-check matrix, searched in the dual
//! of the public code.

use std::collections::HashSet;

use crate::attacks::stern::{Stern, SternConfig};
use crate::bits::BitVec;
use crate::circulant::vec_block_shift;
use crate::decoder::{Decoder, DecoderConfig, TannerGraph};
use crate::error::{Error, Result};
use crate::mceliece::PublicKey;
use crate::rng::substream;

/// Stern on the dual of `⟨G'⟩` at weight `d_c·m`. Every returned row is
/// orthogonal to the public generator.
pub fn dual_code_attack(pk: &PublicKey, cfg: &SternConfig) -> Result<Vec<BitVec>> {
    let gpub = pk.gpub.to_dense();
    let w = pk.params.dc() * pk.params.m;
    let stern = Stern::new(&gpub.kernel(), w, cfg.g, cfg.l)?;
    for i in 0..cfg.max_iterations {
        let rows = stern.iteration(&mut substream(cfg.seed, i as u64));
        if !rows.is_empty() {
            for r in &rows {
                assert!(
                    gpub.mul_vec(r)?.is_zero(),
                    "dual codeword not orthogonal to G'"
                );
            }
            return Ok(rows);
        }
    }
    Ok(Vec::new())
}

/// Decode `x` with the parity checks spanned by all quasi-cyclic shifts of
/// `rows`, then solve for the message and confirm it re-encrypts to within
/// `t'` of `x`.
pub fn decrypt_with_dual_rows(pk: &PublicKey, rows: &[BitVec], x: &BitVec) -> Result<BitVec> {
    let params = &pk.params;
    let mut checks: HashSet<Vec<usize>> = HashSet::new();
    for r in rows {
        for s in 0..params.p {
            checks.insert(vec_block_shift(r, params.n0, s)?.support().collect());
        }
    }
    let mut checks: Vec<Vec<usize>> = checks.into_iter().collect();
    checks.sort();
    let graph = TannerGraph::from_rows(params.n(), &checks)?;
    let out = Decoder::new(&graph, DecoderConfig::new(params.t_prime))?.decode(x)?;
    if !out.success {
        return Err(Error::DecodeFailure);
    }
    let u = pk
        .gpub
        .to_dense()
        .solve_left(&out.codeword)
        .ok_or(Error::DecodeFailure)?;
    if pk.encode(&u)?.distance(x) != params.t_prime {
        return Err(Error::DecodeFailure);
    }
    Ok(u)
}
