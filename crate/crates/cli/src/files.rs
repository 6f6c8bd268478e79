//! Binary key and message files.
//!
//! Key file layout, all integers little-endian:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `QCLM`                           |
//! | 4      | 1    | format version (1)                     |
//! | 5      | 1    | kind: 0 public, 1 private              |
//! | 6      | 1    | variant: 0 hardened, 1 weak-otd, 2 perm |
//! | 7      | 1    | `n0`                                   |
//! | 8      | 1    | `d_v`                                  |
//! | 9      | 1    | `m`                                    |
//! | 10     | 2    | `t'`                                   |
//! | 12     | 4    | `p`                                    |
//! | 16     | ..   | circulant first rows                   |
//!
//! Each circulant is stored as its first row in `ceil(p/8)` bytes, bit `j`
//! of byte `i` holding coefficient `8i + j`. Blocks follow row-major grid
//! order: `G'` (`k0×n0`) for public keys; `H` (`1×n0`), `S` (`k0×k0`) and
//! `Q` (`n0×n0`) for private keys.

use qcldpc::bits::BitVec;
use qcldpc::circulant::{QcBlockMatrix, RingPoly};
use qcldpc::mceliece::{KeyVariant, PrivateKey, PublicKey};
use qcldpc::params::SystemParams;

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"QCLM";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyKind {
    Public = 0,
    Private = 1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyHeader {
    pub kind: KeyKind,
    pub variant: KeyVariant,
    pub params: SystemParams,
}

impl KeyHeader {
    fn encode(&self) -> CliResult<Vec<u8>> {
        let p = &self.params;
        let byte = |v: usize, name: &str| {
            u8::try_from(v)
                .map_err(|_| CliError::invalid(format!("{name} = {v} does not fit in one byte")))
        };
        let t = u16::try_from(p.t_prime).map_err(|_| {
            CliError::invalid(format!("t' = {} does not fit in two bytes", p.t_prime))
        })?;
        let pw = u32::try_from(p.p)
            .map_err(|_| CliError::invalid(format!("p = {} does not fit in four bytes", p.p)))?;
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&[VERSION, self.kind as u8, self.variant.code()]);
        out.extend_from_slice(&[byte(p.n0, "n0")?, byte(p.dv, "d_v")?, byte(p.m, "m")?]);
        out.extend_from_slice(&t.to_le_bytes());
        out.extend_from_slice(&pw.to_le_bytes());
        debug_assert_eq!(out.len(), HEADER_LEN);
        Ok(out)
    }

    fn decode(bytes: &[u8]) -> CliResult<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(CliError::invalid(format!(
                "key file truncated: {} bytes, header needs {HEADER_LEN}",
                bytes.len()
            )));
        }
        if &bytes[0..4] != MAGIC {
            return Err(CliError::invalid("not a key file (bad magic)"));
        }
        if bytes[4] != VERSION {
            return Err(CliError::invalid(format!(
                "unsupported key file version {}",
                bytes[4]
            )));
        }
        let kind = match bytes[5] {
            0 => KeyKind::Public,
            1 => KeyKind::Private,
            k => return Err(CliError::invalid(format!("unknown key kind {k}"))),
        };
        let variant = KeyVariant::from_code(bytes[6])
            .ok_or_else(|| CliError::invalid(format!("unknown variant {}", bytes[6])))?;
        let params = SystemParams {
            n0: bytes[7] as usize,
            dv: bytes[8] as usize,
            m: bytes[9] as usize,
            t_prime: u16::from_le_bytes([bytes[10], bytes[11]]) as usize,
            p: u32::from_le_bytes([bytes[12], bytes[13], bytes[14], bytes[15]]) as usize,
        };
        params.validate()?;
        Ok(Self {
            kind,
            variant,
            params,
        })
    }

    /// Number of circulant blocks in the payload.
    pub fn block_count(&self) -> usize {
        let (n0, k0) = (self.params.n0, self.params.k0());
        match self.kind {
            KeyKind::Public => k0 * n0,
            KeyKind::Private => n0 + k0 * k0 + n0 * n0,
        }
    }

    pub fn file_len(&self) -> usize {
        HEADER_LEN + self.block_count() * self.params.p.div_ceil(8)
    }
}

fn push_blocks(out: &mut Vec<u8>, m: &QcBlockMatrix) {
    for b in m.blocks() {
        out.extend_from_slice(&b.to_bytes());
    }
}

struct BlockReader<'a> {
    p: usize,
    bytes: &'a [u8],
}

impl BlockReader<'_> {
    fn matrix(&mut self, rows: usize, cols: usize) -> CliResult<QcBlockMatrix> {
        let width = self.p.div_ceil(8);
        let mut blocks = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let (head, rest) = self.bytes.split_at(width);
            blocks.push(RingPoly::from_bytes(self.p, head)?);
            self.bytes = rest;
        }
        Ok(QcBlockMatrix::from_blocks(self.p, rows, cols, blocks)?)
    }
}

fn checked_payload(bytes: &[u8], want: KeyKind) -> CliResult<(KeyHeader, &[u8])> {
    let header = KeyHeader::decode(bytes)?;
    if header.kind != want {
        return Err(CliError::invalid(
            format!("expected a {want:?} key, found a {:?} key", header.kind).to_lowercase(),
        ));
    }
    if bytes.len() != header.file_len() {
        return Err(CliError::invalid(format!(
            "key file has {} bytes, parameters require {}",
            bytes.len(),
            header.file_len()
        )));
    }
    Ok((header, &bytes[HEADER_LEN..]))
}

pub fn encode_public(pk: &PublicKey) -> CliResult<Vec<u8>> {
    let header = KeyHeader {
        kind: KeyKind::Public,
        variant: pk.variant,
        params: pk.params,
    };
    let mut out = header.encode()?;
    push_blocks(&mut out, &pk.gpub);
    debug_assert_eq!(out.len(), header.file_len());
    Ok(out)
}

pub fn decode_public(bytes: &[u8]) -> CliResult<PublicKey> {
    let (h, payload) = checked_payload(bytes, KeyKind::Public)?;
    let mut r = BlockReader {
        p: h.params.p,
        bytes: payload,
    };
    let gpub = r.matrix(h.params.k0(), h.params.n0)?;
    Ok(PublicKey::new(h.params, h.variant, gpub)?)
}

pub fn encode_private(sk: &PrivateKey) -> CliResult<Vec<u8>> {
    let header = KeyHeader {
        kind: KeyKind::Private,
        variant: sk.variant(),
        params: *sk.params(),
    };
    let mut out = header.encode()?;
    push_blocks(&mut out, sk.h());
    push_blocks(&mut out, sk.s());
    push_blocks(&mut out, sk.q());
    debug_assert_eq!(out.len(), header.file_len());
    Ok(out)
}

pub fn decode_private(bytes: &[u8]) -> CliResult<PrivateKey> {
    let (h, payload) = checked_payload(bytes, KeyKind::Private)?;
    let (n0, k0) = (h.params.n0, h.params.k0());
    let mut r = BlockReader {
        p: h.params.p,
        bytes: payload,
    };
    let hm = r.matrix(1, n0)?;
    let s = r.matrix(k0, k0)?;
    let q = r.matrix(n0, n0)?;
    Ok(PrivateKey::from_parts(h.params, h.variant, hm, s, q)?)
}

/// Payload bytes of a public key, `k0·n0·ceil(p/8)`.
pub fn public_payload_len(params: &SystemParams) -> usize {
    params.k0() * params.n0 * params.p.div_ceil(8)
}

/// Pack a cleartext or ciphertext, `ceil(len/8)` bytes, LSB-first.
pub fn encode_message(v: &BitVec) -> Vec<u8> {
    v.to_bytes()
}

/// Unpack exactly `bits` bits; the length must match and padding must be
/// zero.
pub fn decode_message(bytes: &[u8], bits: usize) -> CliResult<BitVec> {
    if bytes.len() != bits.div_ceil(8) {
        return Err(CliError::invalid(format!(
            "message file has {} bytes, expected {} for {bits} bits",
            bytes.len(),
            bits.div_ceil(8)
        )));
    }
    Ok(BitVec::from_bytes(bytes, bits)?)
}
