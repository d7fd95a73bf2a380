//! Zimin word avoidance.
//!
//! Deciders for Zimin-word and general pattern instances, exhaustive search
//! for the avoidance threshold `f(n, q)` (the least `M` such that every
//! `q`-ary word of length `M` encounters `Z_n`), randomized search for long
//! avoiding words, and exact evaluation of the classical upper and lower
//! bounds on `f(n, q)`.

pub mod bounds;
pub mod error;
pub mod golden;
pub mod pattern;
pub mod render;
pub mod scanner;
pub mod search;
pub mod witness;
pub mod word;

pub use bounds::{BoundValue, InstanceCount, MomentBound};
pub use error::{Error, Result};
pub use pattern::{
    encounters_pattern, encounters_zimin, instance_of_pattern, is_unavoidable, is_zimin_instance,
    MorphismWitness, Pattern, Span,
};
pub use render::{decode_pbm, encode_pbm, RenderSpec};
pub use scanner::ZiminScanner;
pub use search::{
    certify_avoids, compute_f, enumerate_avoiders, verify_avoids, SearchOptions, SearchReport,
};
pub use word::{zimin, zimin_ruler, Rendering, Word};
