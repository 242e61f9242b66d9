//! Slopes: elements of Q ∪ {∞} written as d/r in lowest terms with r >= 0.
//! The symbol ∞ is (1, 0) and is the maximum of the total order.

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SlopeError {
    #[error("slope 0/0 is undefined")]
    ZeroOverZero,
    #[error("slope denominator must be nonnegative (got {0})")]
    NegativeDenominator(i64),
}

/// A reduced fraction d/r with r >= 0; r = 0 encodes ∞ as (1, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    num: i64,
    den: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { num: 1, den: 0 };
    pub const ZERO: Slope = Slope { num: 0, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Slope, SlopeError> {
        if den < 0 {
            return Err(SlopeError::NegativeDenominator(den));
        }
        if den == 0 {
            if num == 0 {
                return Err(SlopeError::ZeroOverZero);
            }
            return Ok(Slope::INFINITY);
        }
        let g = num.gcd(&den);
        Ok(Slope {
            num: num / g,
            den: den / g,
        })
    }

    pub fn from_int(n: i64) -> Slope {
        Slope { num: n, den: 1 }
    }

    /// Degree/rank of an actual class; rank may be negative for virtual
    /// classes, so the sign is pushed into the numerator.
    pub fn from_deg_rank(deg: i64, rank: i64) -> Option<Slope> {
        if rank == 0 {
            return (deg > 0).then_some(Slope::INFINITY);
        }
        let (num, den) = if rank < 0 { (-deg, -rank) } else { (deg, rank) };
        Some(Slope::new(num, den).expect("den > 0"))
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    /// Numerator `d` of the reduced form.
    pub fn numerator(&self) -> i64 {
        self.num
    }

    /// Denominator `r` of the reduced form, zero for ∞.
    pub fn denominator(&self) -> i64 {
        self.den
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            // cross-multiply; denominators are positive here
            (false, false) => (self.num as i128 * other.den as i128)
                .cmp(&(other.num as i128 * self.den as i128)),
        }
    }
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
