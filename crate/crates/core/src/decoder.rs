//! Log-likelihood-ratio sum-product decoding with a flooding schedule.

use crate::bits::BitVec;
use crate::circulant::{join_blocks, split_blocks, QcBlockMatrix};
use crate::error::{Error, Result};

/// Saturation bound for every message and posterior.
pub const LLR_CLAMP: f64 = 25.0;
const TANH_LIMIT: f64 = 1.0 - 1e-12;

/// `H·v^T` for a circulant-block parity-check matrix.
pub fn syndrome(h: &QcBlockMatrix, v: &BitVec) -> Result<BitVec> {
    let n = h.cols() * h.p();
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: v.len(),
        });
    }
    // v·H^T, block-row by block-row
    let blocks = split_blocks(v, h.p())?;
    Ok(join_blocks(&h.transpose().left_mul_blocks(&blocks)?))
}

/// Bipartite graph of a sparse parity-check matrix. Edges are numbered in
/// check-major order.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    n: usize,
    check_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    var_ptr: Vec<usize>,
    var_edges: Vec<usize>,
}

impl TannerGraph {
    /// Build from the support of each parity-check row.
    pub fn from_rows(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let mut check_ptr = Vec::with_capacity(rows.len() + 1);
        let mut edge_var = Vec::new();
        check_ptr.push(0);
        for row in rows {
            let mut sorted = row.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if let Some(&last) = sorted.last() {
                if last >= n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        actual: last + 1,
                    });
                }
            }
            edge_var.extend_from_slice(&sorted);
            check_ptr.push(edge_var.len());
        }
        let mut degree = vec![0usize; n];
        for &v in &edge_var {
            degree[v] += 1;
        }
        let mut var_ptr = vec![0usize; n + 1];
        for v in 0..n {
            var_ptr[v + 1] = var_ptr[v] + degree[v];
        }
        let mut fill = var_ptr.clone();
        let mut var_edges = vec![0usize; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[fill[v]] = e;
            fill[v] += 1;
        }
        Ok(Self {
            n,
            check_ptr,
            edge_var,
            var_ptr,
            var_edges,
        })
    }

    /// Row `(R, i)` of the expansion has ones at `(C, i + e mod p)` for every
    /// `e` in the support of block `(R, C)`.
    pub fn from_qc(h: &QcBlockMatrix) -> Self {
        let p = h.p();
        let supports: Vec<Vec<usize>> = h.blocks().iter().map(|b| b.support().collect()).collect();
        let mut rows = Vec::with_capacity(h.rows() * p);
        for r in 0..h.rows() {
            for i in 0..p {
                let mut row = Vec::new();
                for c in 0..h.cols() {
                    row.extend(
                        supports[r * h.cols() + c]
                            .iter()
                            .map(|&e| c * p + (i + e) % p),
                    );
                }
                rows.push(row);
            }
        }
        Self::from_rows(h.cols() * p, &rows).expect("supports lie inside the block grid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn checks(&self) -> usize {
        self.check_ptr.len() - 1
    }

    pub fn edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn check_support(&self, c: usize) -> &[usize] {
        &self.edge_var[self.check_ptr[c]..self.check_ptr[c + 1]]
    }

    /// True iff every check has even parity on `bits`.
    pub fn satisfied(&self, bits: &[bool]) -> bool {
        (0..self.checks())
            .all(|c| self.check_support(c).iter().filter(|&&v| bits[v]).count() % 2 == 0)
    }
}

/// Uniform saturating quantizer on `[-range, range]` with `2^bits - 1` levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantizer {
    pub bits: u32,
    pub range: f64,
}

impl Quantizer {
    pub fn new(bits: u32, range: f64) -> Result<Self> {
        if !(1..=24).contains(&bits) || range <= 0.0 || range.is_nan() {
            return Err(Error::InvalidParams(format!(
                "quantizer needs 1..=24 bits and a positive range, got {bits} and {range}"
            )));
        }
        Ok(Self { bits, range })
    }

    /// `bits`-bit quantizer spanning the decoder's full saturation range.
    pub fn with_bits(bits: u32) -> Result<Self> {
        Self::new(bits, LLR_CLAMP)
    }

    fn step(&self) -> f64 {
        let levels = ((1u64 << (self.bits - 1)) - 1).max(1) as f64;
        self.range / levels
    }

    pub fn apply(&self, v: f64) -> f64 {
        let s = self.step();
        ((v / s).round() * s).clamp(-self.range, self.range)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderConfig {
    /// At least 1.
    pub max_iterations: usize,
    /// Number of channel errors; sets the crossover `t/n` used for the
    /// initial likelihoods.
    pub channel_errors: usize,
    pub early_stop: bool,
    pub quantizer: Option<Quantizer>,
}

impl DecoderConfig {
    pub fn new(channel_errors: usize) -> Self {
        Self {
            max_iterations: 100,
            channel_errors,
            early_stop: true,
            quantizer: None,
        }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    /// Channel LLR magnitude `ln((1-ρ)/ρ)` with `ρ = t/n`, clamped.
    pub fn channel_llr(&self, n: usize) -> f64 {
        let rho = (self.channel_errors as f64 / n.max(1) as f64).clamp(1e-12, 1.0 - 1e-12);
        ((1.0 - rho) / rho).ln().clamp(-LLR_CLAMP, LLR_CLAMP)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// Final hard decision; a codeword whenever `success` holds.
    pub codeword: BitVec,
    /// Rounds of message passing, counting the initial syndrome check as one.
    pub iterations_used: usize,
    pub success: bool,
}

/// Per-graph decoder holding message scratch space.
pub struct Decoder<'g> {
    graph: &'g TannerGraph,
    cfg: DecoderConfig,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    tanh: Vec<f64>,
    prefix: Vec<f64>,
}

impl<'g> Decoder<'g> {
    pub fn new(graph: &'g TannerGraph, cfg: DecoderConfig) -> Result<Self> {
        if cfg.max_iterations == 0 {
            return Err(Error::InvalidParams(
                "max_iterations must be at least 1".into(),
            ));
        }
        if cfg.channel_errors > graph.n {
            return Err(Error::InvalidParams(format!(
                "t = {} exceeds n = {}",
                cfg.channel_errors, graph.n
            )));
        }
        let e = graph.edges();
        let max_deg = (0..graph.checks())
            .map(|c| graph.check_support(c).len())
            .max()
            .unwrap_or(0);
        Ok(Self {
            graph,
            cfg,
            c2v: vec![0.0; e],
            v2c: vec![0.0; e],
            tanh: vec![0.0; max_deg],
            prefix: vec![0.0; max_deg + 1],
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    fn quantize(&self, v: f64) -> f64 {
        let v = v.clamp(-LLR_CLAMP, LLR_CLAMP);
        match self.cfg.quantizer {
            Some(q) => q.apply(v),
            None => v,
        }
    }

    pub fn decode(&mut self, x: &BitVec) -> Result<DecodeOutcome> {
        let g = self.graph;
        if x.len() != g.n {
            return Err(Error::LengthMismatch {
                expected: g.n,
                actual: x.len(),
            });
        }
        let received: Vec<bool> = (0..g.n).map(|i| x.get(i)).collect();
        let l0 = self.cfg.channel_llr(g.n);
        let channel: Vec<f64> = received
            .iter()
            .map(|&b| self.quantize(if b { -l0 } else { l0 }))
            .collect();
        let mut hard = received.clone();
        if g.satisfied(&hard) && self.cfg.early_stop {
            return Ok(self.outcome(&hard, 1, true));
        }
        for (e, &v) in g.edge_var.iter().enumerate() {
            self.v2c[e] = channel[v];
        }
        let mut rounds = 0;
        let mut ok = false;
        while rounds < self.cfg.max_iterations {
            rounds += 1;
            self.check_update();
            self.variable_update(&channel, &received, &mut hard);
            ok = g.satisfied(&hard);
            if ok && self.cfg.early_stop {
                break;
            }
        }
        Ok(self.outcome(&hard, rounds.max(1), ok))
    }

    fn outcome(&self, hard: &[bool], iterations_used: usize, success: bool) -> DecodeOutcome {
        DecodeOutcome {
            codeword: BitVec::from_bools(hard),
            iterations_used,
            success,
        }
    }

    fn check_update(&mut self) {
        let g = self.graph;
        for c in 0..g.checks() {
            let (lo, hi) = (g.check_ptr[c], g.check_ptr[c + 1]);
            let d = hi - lo;
            for j in 0..d {
                self.tanh[j] = (0.5 * self.v2c[lo + j]).tanh();
            }
            self.prefix[0] = 1.0;
            for j in 0..d {
                self.prefix[j + 1] = self.prefix[j] * self.tanh[j];
            }
            let mut suffix = 1.0;
            for j in (0..d).rev() {
                let prod = (self.prefix[j] * suffix).clamp(-TANH_LIMIT, TANH_LIMIT);
                self.c2v[lo + j] = self.quantize(2.0 * prod.atanh());
                suffix *= self.tanh[j];
            }
        }
    }

    fn variable_update(&mut self, channel: &[f64], received: &[bool], hard: &mut [bool]) {
        let g = self.graph;
        for v in 0..g.n {
            let edges = &g.var_edges[g.var_ptr[v]..g.var_ptr[v + 1]];
            let total = channel[v] + edges.iter().map(|&e| self.c2v[e]).sum::<f64>();
            hard[v] = if total == 0.0 {
                received[v]
            } else {
                total < 0.0
            };
            for &e in edges {
                self.v2c[e] = self.quantize(total - self.c2v[e]);
            }
        }
    }
}

/// One-shot decode against a circulant-block parity-check matrix.
pub fn decode(h: &QcBlockMatrix, x: &BitVec, cfg: DecoderConfig) -> Result<DecodeOutcome> {
    let graph = TannerGraph::from_qc(h);
    Decoder::new(&graph, cfg)?.decode(x)
}
