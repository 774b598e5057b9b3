//! Characteristic filters of finite unipotent matrix groups over `Z_p` and
//! their refinement through the adjoint, centroid and derivation rings of
//! the associated graded Lie ring.

pub mod algrep;
pub mod bimap;
pub mod cli;
pub mod error;
pub mod filter;
pub mod group;
pub mod liering;
pub mod linalg;
pub mod monoid;
pub mod refine;
pub mod ring;

pub use error::{Error, Result};
