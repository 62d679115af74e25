//! Symmetry criterion and test-function energy bounds for sign-changing
//! solutions of the Yamabe equation on the round sphere Sⁿ.

pub mod bubble;
pub mod criterion;
pub mod energy;
pub mod error;
pub mod group;
pub mod quadrature;
pub mod report;
pub mod sphere;
pub mod summation;

pub use error::{Error, Result};
