//! Exact computation of the Adams-Novikov E2-term of Behrens' spectrum Q(2)
//! at the prime 3.
//!
//! The computation runs over the 3-local integers with no floating point
//! anywhere: sparse Laurent-type rings in fixed monomial bases ([`rings`]),
//! the Hopf-algebroid self-maps and the assembled double-complex maps
//! ([`hopf`]), the filtration kernels/cokernels ([`kercoker`]), Smith/Howell
//! reduction over `Z/3^K` ([`snf`]), the connecting homomorphisms per
//! internal degree ([`connecting`]), and the chart assembly with the lone
//! higher differential ([`spectral`]).

pub mod chart;
pub mod connecting;
pub mod error;
pub mod hopf;
pub mod kercoker;
pub mod local;
pub mod rings;
pub mod snf;
pub mod spectral;
pub mod verify;

pub use error::{ArithError, Q2Error, Result};
pub use local::{adic_lemma_check, Local3, Residue, Val3};
