//! Monte Carlo over the McEliece channel (exactly `t` flips per frame).

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVec;
use crate::code::QcLdpcCode;
use crate::decoder::{Decoder, DecoderConfig, Quantizer, TannerGraph};
use crate::error::{Error, Result};
use crate::mceliece::random_error;
use crate::rng::substream;

/// Flip exactly `t` uniformly chosen positions of `c`.
pub fn mceliece_channel<R: Rng + ?Sized>(c: &BitVec, t: usize, rng: &mut R) -> Result<BitVec> {
    if t > c.len() {
        return Err(Error::InvalidParams(format!(
            "t = {t} exceeds n = {}",
            c.len()
        )));
    }
    Ok(c.xor(&random_error(c.len(), t, rng)))
}

/// Decoder settings shared by every frame; the channel error count comes
/// from the run itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub max_iterations: usize,
    pub quantizer: Option<Quantizer>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            quantizer: None,
        }
    }
}

impl SimConfig {
    pub fn with_max_iterations(max_iterations: usize) -> Self {
        Self {
            max_iterations,
            ..Self::default()
        }
    }

    fn decoder_config(&self, t: usize) -> DecoderConfig {
        DecoderConfig {
            quantizer: self.quantizer,
            ..DecoderConfig::new(t).with_max_iterations(self.max_iterations)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub t: usize,
    pub frames_run: usize,
    pub frame_errors: usize,
    /// Information-bit errors, counted on failed or miscorrected frames only.
    pub bit_errors: usize,
    /// Frames declared successful whose codeword differs from the truth.
    pub undetected: usize,
    pub fer: f64,
    pub ber: f64,
    pub i_ave: f64,
    pub wall_time_secs: f64,
}

impl SimReport {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &SimReport) -> bool {
        SimReport {
            wall_time_secs: 0.0,
            ..self.clone()
        } == SimReport {
            wall_time_secs: 0.0,
            ..other.clone()
        }
    }
}

#[derive(Default)]
struct Tally {
    frame_errors: usize,
    bit_errors: usize,
    undetected: usize,
    iterations: usize,
}

/// Encode random messages, corrupt each with exactly `t` errors, decode and
/// compare with the transmitted codeword.
pub fn run_fer(
    code: &QcLdpcCode,
    t: usize,
    frames: usize,
    sim: SimConfig,
    seed: u64,
) -> Result<SimReport> {
    if frames == 0 {
        return Err(Error::InvalidParams(
            "at least one frame is required".into(),
        ));
    }
    let (n, k) = (code.n(), code.k());
    if t > n {
        return Err(Error::InvalidParams(format!("t = {t} exceeds n = {n}")));
    }
    let graph = TannerGraph::from_qc(code.h());
    let cfg = sim.decoder_config(t);
    Decoder::new(&graph, cfg)?;
    let start = Instant::now();
    let tally = (0..frames as u64)
        .into_par_iter()
        .map_init(
            || Decoder::new(&graph, cfg).expect("config checked above"),
            |dec, i| {
                let mut rng = substream(seed, i);
                let u = BitVec::random(k, &mut rng);
                let c = code.encode(&u).expect("message length k");
                let x = mceliece_channel(&c, t, &mut rng).expect("t <= n");
                let out = dec.decode(&x).expect("word length n");
                assert!(
                    !out.success
                        || graph
                            .satisfied(&(0..n).map(|j| out.codeword.get(j)).collect::<Vec<_>>())
                );
                let wrong = out.codeword != c;
                Tally {
                    frame_errors: (wrong || !out.success) as usize,
                    bit_errors: if wrong {
                        out.codeword.slice(0, k).distance(&u)
                    } else {
                        0
                    },
                    undetected: (wrong && out.success) as usize,
                    iterations: out.iterations_used,
                }
            },
        )
        .reduce(Tally::default, |a, b| Tally {
            frame_errors: a.frame_errors + b.frame_errors,
            bit_errors: a.bit_errors + b.bit_errors,
            undetected: a.undetected + b.undetected,
            iterations: a.iterations + b.iterations,
        });
    Ok(SimReport {
        t,
        frames_run: frames,
        frame_errors: tally.frame_errors,
        bit_errors: tally.bit_errors,
        undetected: tally.undetected,
        fer: tally.frame_errors as f64 / frames as f64,
        ber: tally.bit_errors as f64 / (frames as f64 * k as f64),
        i_ave: tally.iterations as f64 / frames as f64,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// `run_fer` at each error count, sharing the seed.
pub fn sweep(
    code: &QcLdpcCode,
    ts: &[usize],
    frames: usize,
    sim: SimConfig,
    seed: u64,
) -> Result<Vec<SimReport>> {
    ts.iter()
        .map(|&t| run_fer(code, t, frames, sim, seed))
        .collect()
}
