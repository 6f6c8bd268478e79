//! Desk-scale executable attacks. Every recovered secret is checked against
//! public data before it is reported.

pub mod decoding;
pub mod dual;
pub mod otd;
pub mod stern;

pub use decoding::{build_extended_code, decoding_attack, DecodingAttackOutcome, ExtendedCode};
pub use dual::{decrypt_with_dual_rows, dual_code_attack};
pub use otd::{otd_strategy1, otd_strategy2, otd_strategy3, OtdRowRecovery};
pub use stern::{stern_search, Stern, SternConfig};
