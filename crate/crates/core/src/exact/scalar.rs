use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

/// An ordered field with exact division.
///
/// The kernel never rounds, so only exact types qualify: `Ratio<BigInt>`
/// for production use and the fixed-width ratios for quick experiments
/// (these panic on overflow rather than wrapping). Floating point types are
/// deliberately not implemented.
pub trait ExactField: Clone + Ord + Signed + Debug + Display + Send + Sync + 'static {
    fn from_int(n: i64) -> Self;

    /// Largest integer not above `self`, if it fits in an `i64`.
    fn floor_int(&self) -> Option<i64>;

    /// Smallest integer not below `self`, if it fits in an `i64`.
    fn ceil_int(&self) -> Option<i64>;

    fn is_integral(&self) -> bool;
}

impl ExactField for Ratio<BigInt> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn floor_int(&self) -> Option<i64> {
        self.floor().to_integer().to_i64()
    }

    fn ceil_int(&self) -> Option<i64> {
        self.ceil().to_integer().to_i64()
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

macro_rules! impl_exact_field_for_ratio {
    ($($int:ty),*) => {$(
        impl ExactField for Ratio<$int> {
            fn from_int(n: i64) -> Self {
                Ratio::from_integer(<$int>::try_from(n).expect("integer out of range"))
            }

            fn floor_int(&self) -> Option<i64> {
                i64::try_from(self.floor().to_integer()).ok()
            }

            fn ceil_int(&self) -> Option<i64> {
                i64::try_from(self.ceil().to_integer()).ok()
            }

            fn is_integral(&self) -> bool {
                self.is_integer()
            }
        }
    )*};
}

impl_exact_field_for_ratio!(i64, i128);

/// Inner product of an integer vector with a field vector.
pub fn dot_int<T: ExactField>(ints: &[i64], xs: &[T]) -> T {
    debug_assert_eq!(ints.len(), xs.len());
    ints.iter()
        .zip(xs)
        .fold(T::zero(), |acc, (&a, x)| acc + T::from_int(a) * x.clone())
}

pub fn dot<T: ExactField>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn to_field<T: ExactField>(ints: &[i64]) -> Vec<T> {
    ints.iter().map(|&a| T::from_int(a)).collect()
}
