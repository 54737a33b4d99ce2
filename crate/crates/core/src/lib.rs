//! Modular representations of finite groups over prime fields, with tools for
//! relative projectivity and twisted induction along cyclic p-group extensions.

pub mod error;
pub mod groups;
pub mod harness;
pub(crate) mod hom;
pub mod linalg;
pub mod morph;
pub mod relproj;
pub mod report;
pub mod reps;
pub mod telescope;
pub mod twist;

pub use error::{Error, Result};
pub use groups::{Group, SubgroupEmbedding};
pub use linalg::{Matrix, Prime};
pub use morph::{EquivariantMap, ShortExactSeq};
pub use report::Report;
pub use reps::Module;
