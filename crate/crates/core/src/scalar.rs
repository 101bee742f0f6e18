//! Scalar traits the generic parts of the crate are written against.
//!
//! Linear algebra over subspaces needs exact zero tests during pivoting, so
//! it is bounded by [`ExactField`], which only rational types implement.
//! Quantities that are merely summed and compared (the weighted fill behind
//! the combinatorial lower bound) use [`OrderedScalar`], which floats satisfy
//! as well.

use std::fmt::Debug;
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// A field with exact arithmetic: `a - a == 0` holds structurally.
pub trait ExactField: Num + Clone + Debug + Neg<Output = Self> {}

impl<T> ExactField for Ratio<T> where T: Clone + Integer + Signed + Debug {}

/// An ordered ring element that can be built from small integers.
pub trait OrderedScalar: Num + Clone + PartialOrd + FromPrimitive + Debug {}

impl<T> OrderedScalar for T where T: Num + Clone + PartialOrd + FromPrimitive + Debug {}
