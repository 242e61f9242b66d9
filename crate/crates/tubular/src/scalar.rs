//! Scalar abstraction for the lattice and linear-algebra layers.
//!
//! Everything in this crate is exact: lattice coordinates are signed
//! integers, kernels and ranks are computed over the corresponding field
//! of fractions. The concrete instantiations live at the crate root
//! (`Coeff` for lattice work, a wider type for the brute-force solver).

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{NumAssign, NumCast, PrimInt, Signed, ToPrimitive};
use std::fmt::{Debug, Display};
use std::hash::Hash;

/// Signed integer scalar: the coefficient ring of every lattice in this
/// crate. Implemented by the primitive signed integer types.
pub trait Scalar:
    PrimInt + Signed + Integer + NumAssign + Debug + Display + Hash + 'static
{
    fn from_i64(v: i64) -> Self {
        <Self as NumCast>::from(v).expect("scalar conversion out of range")
    }
    fn as_i64(&self) -> i64 {
        ToPrimitive::to_i64(self).expect("scalar does not fit in i64")
    }
}

impl<T> Scalar for T where
    T: PrimInt + Signed + Integer + NumAssign + Debug + Display + Hash + 'static
{
}

/// Exact fraction over a [`Scalar`].
pub type Rat<S> = Ratio<S>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(<i128 as Scalar>::from_i64(-7).as_i64(), -7);
        assert_eq!(<i64 as Scalar>::from_i64(42), 42i64);
    }

    #[test]
    fn rationals_reduce() {
        let r: Rat<i64> = Rat::new(6, -4);
        assert_eq!((*r.numer(), *r.denom()), (-3, 2));
    }
}
