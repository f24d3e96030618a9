//! Exact-arithmetic machinery for computing automorphism groups of
//! (τ,τ̄)-generic Enriques surfaces via Borcherds' method: hyperbolic
//! lattices, discriminant-form gluing, chamber geometry, and the orbit
//! procedures behind the volume and curve/fibration tables.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! nothing in this crate touches floating point.

pub mod ade;
pub mod chambers;
pub mod data_io;
pub mod discforms;
pub mod enriques;
pub mod genus;
pub mod lattices;
pub mod orbit_engine;
pub mod exact_linalg;
pub mod permgroup;

pub use exact_linalg::{Int, IntMatrix, Rat};
