//! A two-stage block video codec built on sparse approximation.
//!
//! Every 16×16 block of an inter frame is first approximated by a sparse
//! combination of candidate blocks taken from the previous reconstructed
//! frame: all integer motion displacements in a search window form a
//! self-adaptive dictionary, and [`solver::eomp`] picks atoms greedily while
//! keeping the remaining candidates orthonormal to the ones already chosen.
//! When new atoms stop reducing the residual fast enough, the block switches
//! to a second stage that codes the residual in a DCT basis made orthogonal
//! to the chosen atoms ([`transform::orthonormalize_against`]). Both stages
//! use a deadzone quantizer, and all syntax is written by a context-adaptive
//! binary arithmetic coder ([`entropy`]).
//!
//! ```
//! use twostage::codec::{encode_sequence, decode_sequence, CodecParams};
//! use twostage::synthetic::{ClipSpec, generate_clip};
//!
//! let frames = generate_clip(&ClipSpec { width: 48, height: 32, frames: 2, ..ClipSpec::default() });
//! let params = CodecParams { q1: 8.0, q2: 8.0, termination_ratio: 0.1, search_radius: 8, ..CodecParams::default() };
//! let encoded = encode_sequence(&frames, &params).unwrap();
//! let decoded = decode_sequence(&encoded.bitstream).unwrap();
//! assert_eq!(decoded, encoded.reconstructions);
//! ```
//!
//! The guide in `book/` walks through each stage in more depth; its code
//! listings are compiled and run as doc-tests of this crate.

pub mod codec;
pub mod dictionary;
pub mod entropy;
mod error;
pub mod frame;
pub mod harness;
pub mod quant;
pub mod solver;
pub mod synthetic;
pub mod transform;
pub mod vector;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/dictionary.md")]
    mod dictionary {}
    #[doc = include_str!("../../../book/src/eomp.md")]
    mod eomp {}
    #[doc = include_str!("../../../book/src/quantizer.md")]
    mod quantizer {}
    #[doc = include_str!("../../../book/src/second-stage.md")]
    mod second_stage {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/bitstream.md")]
    mod bitstream {}
    #[doc = include_str!("../../../book/src/rd-sweeps.md")]
    mod rd_sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
