//! Veech groups of the regular double n-gon and the regular 2n-gon.

pub mod error;
pub mod freewords;
pub mod homology;
pub mod matgroup;
pub mod matrix;
pub mod presentation;
pub mod snf;
pub mod star;
pub mod surfaces;
pub mod verify;
pub mod wohlfahrt;

pub use error::{Error, Result};
pub use freewords::{FreeAuto, FreeEndo, FreeWord};
pub use homology::{HomologyBasis, HomologyRep, XnHomologyPack};
pub use matgroup::{ElementTable, PointPartition};
pub use matrix::{IntMatrix, ModMatrix};
pub use presentation::{Family, Gen, VeechWord};
pub use snf::{ModLinearSystem, ModSolution};
pub use star::{SingularityAction, StarDecision};
pub use surfaces::{SurfaceModel, ValidationReport};
pub use verify::{Scope, VerifyReport};
pub use wohlfahrt::{CosetGraph, NonCongruenceCertificate};
