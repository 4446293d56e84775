//! Projective models of the Deligne–Lusztig curves of type ²A₂, ²B₂ and ²G₂
//! over small finite fields, with exact point enumeration, power-series
//! branches and checks of the curve identities.

pub mod branch;
pub mod counts;
pub mod enumerate;
pub mod error;
pub mod exterior;
pub mod gf;
pub mod hermitian;
pub mod linalg;
pub mod model;
pub mod report;
pub mod octonion;
pub mod ree;
pub mod ring;
pub mod series;
pub mod suzuki;
pub mod suites;
pub mod sym;

pub use error::{Error, Result};
pub use gf::{Fe, Field};
pub use model::{CurveModel, Family, Params};
pub use ring::FrobRing;
