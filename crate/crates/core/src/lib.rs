pub mod analysis;
pub mod attacks;
pub mod bits;
pub mod circulant;
pub mod code;
pub mod decoder;
pub mod error;
pub mod mceliece;
pub mod params;
pub mod rng;
pub mod sim;
