//! Scalar abstraction for the numeric core.
//!
//! Everything that touches expression values, network weights, or densities is
//! generic over [`Scalar`]; concrete aliases for `f64` (the default used by the
//! CLI) and `f32` live at the crate root.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::distributions::uniform::SampleUniform;
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point element type: `f32` or `f64`.
pub trait Scalar:
    Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + SampleUniform
    + FromStr
    + Serialize
    + DeserializeOwned
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Convert a finite `f64` constant into this scalar type.
    fn cast(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant converts into any Scalar")
    }

    /// Widen to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
