//! Hankel, Toeplitz and shift operators between Köthe sequence spaces.
//!
//! Every quantified statement ("for each k there exists m", "sup < ∞",
//! "the series converges") is evaluated on finite windows and reported as
//! `CertifiedAtScale`, `RefutedAtScale` or `Inconclusive`.

pub mod certificate;
pub mod certify;
pub mod error;
pub mod growth;
pub mod logval;
pub mod operators;
pub mod presets;
pub mod sequences;
pub mod spaces;

pub use certificate::{Certificate, CertificateKind, Condition, EvidenceRow, SearchBounds, Status};
pub use error::{CertifyError, SequenceError, SpaceError};
pub use logval::{Coord, LogSum, LogValue, SignedSum};
pub use sequences::{ExponentSequence, IndexWindow};
pub use spaces::{basis_element, KotheMatrix, SequenceElement, SeminormResult, Symbol};
