//! Hand-assembled key files pin the on-disk layout byte for byte.

use qcldpc::circulant::{QcBlockMatrix, RingPoly};
use qcldpc::mceliece::{KeyVariant, PrivateKey, PublicKey};
use qcldpc::params::SystemParams;
use qcldpc_cli::files::{decode_private, decode_public, encode_private, encode_public};

fn poly(p: usize, support: &[usize]) -> RingPoly {
    RingPoly::from_support(p, support.iter().copied())
}

#[test]
fn public_key_layout() {
    // p = 10 is not a multiple of 8: two bytes per block, top six bits zero
    let params = SystemParams::new(2, 1, 10, 1, 1);
    let gpub =
        QcBlockMatrix::from_blocks(10, 1, 2, vec![poly(10, &[0, 1, 2]), poly(10, &[3, 7, 9])])
            .unwrap();
    let pk = PublicKey::new(params, KeyVariant::WeakOtd, gpub).unwrap();
    let golden: Vec<u8> = vec![
        b'Q',
        b'C',
        b'L',
        b'M', // magic
        1,    // version
        0,    // public
        1,    // weak-otd
        2,
        1,
        1, // n0, d_v, m
        1,
        0, // t'
        10,
        0,
        0,
        0, // p
        0b0000_0111,
        0b0000_0000, // 1 + x + x^2
        0b1000_1000,
        0b0000_0010, // x^3 + x^7 + x^9
    ];
    assert_eq!(encode_public(&pk).unwrap(), golden);
    assert_eq!(decode_public(&golden).unwrap(), pk);

    let mut dirty = golden.clone();
    *dirty.last_mut().unwrap() |= 0b0000_0100; // coefficient 10 does not exist
    assert!(decode_public(&dirty).is_err());
}

#[test]
fn private_key_layout() {
    let p = 8;
    let params = SystemParams::new(2, 1, p, 1, 1);
    let h = QcBlockMatrix::from_blocks(p, 1, 2, vec![poly(p, &[0]), poly(p, &[3])]).unwrap();
    let s = QcBlockMatrix::from_blocks(p, 1, 1, vec![poly(p, &[1])]).unwrap();
    let q = QcBlockMatrix::from_blocks(
        p,
        2,
        2,
        vec![
            poly(p, &[2]),
            RingPoly::zero(p),
            RingPoly::zero(p),
            poly(p, &[5]),
        ],
    )
    .unwrap();
    let sk = PrivateKey::from_parts(params, KeyVariant::Hardened, h, s, q).unwrap();
    let golden: Vec<u8> = vec![
        b'Q', b'C', b'L', b'M', 1, 1, 0, 2, 1, 1, 1, 0, 8, 0, 0, 0, //
        0x01, 0x08, // H
        0x02, // S
        0x04, 0x00, 0x00, 0x20, // Q
    ];
    let bytes = encode_private(&sk).unwrap();
    assert_eq!(bytes, golden);
    let back = decode_private(&golden).unwrap();
    assert_eq!(encode_private(&back).unwrap(), golden);
    assert_eq!(back.derive_public().unwrap(), sk.derive_public().unwrap());
}
