//! Subjective-logic opinion calculus with Dirichlet-distribution uncertainty
//! measures, the relaxed evidential loss family, a from-scratch MLP trainer,
//! and a desk-scale experiment harness for OOD-detection studies.

pub mod data;
pub mod dirichlet;
pub mod error;
pub mod harness;
pub mod losses;
pub mod metrics;
pub mod nn;
pub mod numerics;
pub mod selftest;
pub mod sl;

pub use dirichlet::{KlMode, UncertaintyReport};
pub use error::{Error, Result};
pub use losses::{LossConfig, LossForm};
pub use numerics::EvidenceFunction;
pub use sl::{DirichletParams, DomainConfig, EvidenceVector, Opinion};
