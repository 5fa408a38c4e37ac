//! Exact computations with local GL₂-shtukas over truncated nilpotent rings.
//!
//! The crate builds up from finite fields ([`fq`]) and the truncated rings
//! F_q[ζ, h]/(ζ, h)^N ([`trunc`]) to Laurent series and matrices over them ([`series`],
//! [`matrix`]). On top of these sit the universal Rapoport–Zink point and its
//! classification algorithm ([`shtuka`]), the Carlitz module ([`carlitz`]) and the
//! Hodge-Pink lattice with its period ([`hodge_pink`]).

pub mod carlitz;
pub mod fq;
pub mod hodge_pink;
pub mod json;
pub mod matrix;
pub mod rigid;
pub mod selfcheck;
pub mod series;
pub mod shtuka;
pub mod trunc;
