use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a QC-LDPC McEliece instance.
///
/// `n0` circulant blocks of size `p` per parity-check row, each of column
/// weight `dv`; `Q` has row/column weight `m`; `t_prime` intentional errors
/// are added at encryption.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemParams {
    pub n0: usize,
    pub dv: usize,
    pub p: usize,
    pub m: usize,
    pub t_prime: usize,
}

impl SystemParams {
    pub const fn new(n0: usize, dv: usize, p: usize, m: usize, t_prime: usize) -> Self {
        Self {
            n0,
            dv,
            p,
            m,
            t_prime,
        }
    }

    /// The three reference parameter sets (1, 2, 3).
    pub fn preset(system: u8) -> Option<Self> {
        match system {
            1 => Some(Self::new(4, 13, 4096, 7, 27)),
            2 => Some(Self::new(3, 13, 8192, 11, 40)),
            3 => Some(Self::new(3, 15, 16384, 13, 60)),
            _ => None,
        }
    }

    /// Desk-scale parameters used by the executable attacks.
    pub const fn toy() -> Self {
        Self::new(4, 3, 64, 3, 2)
    }

    pub fn k0(&self) -> usize {
        self.n0 - 1
    }

    pub fn n(&self) -> usize {
        self.n0 * self.p
    }

    pub fn k(&self) -> usize {
        self.k0() * self.p
    }

    /// Row weight of the secret parity-check matrix.
    pub fn dc(&self) -> usize {
        self.n0 * self.dv
    }

    /// Error weight seen by the LDPC decoder after multiplication by `Q`.
    pub fn t(&self) -> usize {
        self.t_prime * self.m
    }

    pub fn rate(&self) -> f64 {
        self.k0() as f64 / self.n0 as f64
    }

    /// Public key size in bytes: `k0·n0·p` bits rounded up.
    pub fn key_size_bytes(&self) -> usize {
        (self.k0() * self.n0 * self.p).div_ceil(8)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n0 < 2 {
            return bad(format!("n0 must be at least 2, got {}", self.n0));
        }
        if self.dv == 0 || self.p == 0 || self.m == 0 {
            return bad("dv, p and m must be positive".into());
        }
        if self.p <= self.dc() * self.m {
            return bad(format!(
                "p = {} must exceed d_c·m = {}",
                self.p,
                self.dc() * self.m
            ));
        }
        if self.n0 * self.dv * (self.dv - 1) >= self.p {
            return bad(format!(
                "no room for a difference family: n0·dv·(dv-1) = {} >= p",
                self.n0 * self.dv * (self.dv - 1)
            ));
        }
        if self.t_prime > self.n() {
            return bad(format!("t' = {} exceeds n = {}", self.t_prime, self.n()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_reference_table() {
        let s1 = SystemParams::preset(1).unwrap();
        assert_eq!((s1.n(), s1.k(), s1.t(), s1.dc()), (16384, 12288, 189, 52));
        assert_eq!(s1.key_size_bytes(), 6144);
        let s2 = SystemParams::preset(2).unwrap();
        assert_eq!((s2.n(), s2.k(), s2.t()), (24576, 16384, 440));
        assert_eq!(s2.key_size_bytes(), 6144);
        let s3 = SystemParams::preset(3).unwrap();
        assert_eq!((s3.n(), s3.k(), s3.t()), (49152, 32768, 780));
        assert_eq!(s3.key_size_bytes(), 12288);
        assert!((s1.rate() - 0.75).abs() < 1e-12);
        for s in [s1, s2, s3, SystemParams::toy()] {
            s.validate().unwrap();
        }
        assert!(SystemParams::preset(4).is_none());
    }

    #[test]
    fn validation_rejects_crowded_blocks() {
        assert!(SystemParams::new(4, 13, 512, 7, 27).validate().is_err());
        assert!(SystemParams::new(1, 3, 64, 3, 2).validate().is_err());
        assert!(SystemParams::new(4, 3, 64, 0, 2).validate().is_err());
    }
}
