//! Cost arithmetic.
//!
//! Solvers are generic over [`Cost`]. `f64` is the fast default. For exact
//! runs, weights (which are doubles, hence dyadic rationals) are rescaled by a
//! common power of two into [`Fixed`] integers whenever the sums fit, and
//! otherwise carried as [`BigRational`].

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub trait Cost: Clone + Debug + PartialEq + PartialOrd + Send + Sync {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;

    /// Approximate value (raw scaled units for [`Fixed`]).
    fn to_f64(&self) -> f64;

    /// Equality for exact types; relative 1e-9 agreement for `f64`.
    fn close_to(&self, other: &Self) -> bool {
        self == other
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("costs are never NaN")
    }
}

impl Cost for f64 {
    fn zero() -> Self {
        0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn close_to(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-9 * other.abs().max(1.0)
    }
}

/// Weight scaled by `2^shift` into an integer; all values of one run share
/// the shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed(pub i128);

impl Cost for Fixed {
    fn zero() -> Self {
        Fixed(0)
    }
    fn plus(&self, other: &Self) -> Self {
        Fixed(self.0.checked_add(other.0).expect("fixed-point cost overflow"))
    }
    fn minus(&self, other: &Self) -> Self {
        Fixed(self.0.checked_sub(other.0).expect("fixed-point cost overflow"))
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn to_f64(&self) -> f64 {
        self.0 as f64
    }
}

impl Cost for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Common power-of-two scale turning a weight vector into exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedScale {
    pub shift: u32,
}

// headroom for sums and the signed lazy offsets in the cost tree
const FIXED_LIMIT_BITS: u32 = 120;

impl FixedScale {
    /// Returns `None` when some weight is not finite or the scaled total would
    /// not leave enough headroom in an `i128`.
    pub fn for_weights(weights: &[f64]) -> Option<FixedScale> {
        let mut shift: i64 = 0;
        let mut total = 0.0f64;
        for &w in weights {
            if !w.is_finite() {
                return None;
            }
            total += w.abs();
            if w == 0.0 {
                continue;
            }
            let (mantissa, exponent, _) = num_traits::Float::integer_decode(w);
            let tz = mantissa.trailing_zeros() as i64;
            let lowest = exponent as i64 + tz;
            shift = shift.max(-lowest);
        }
        if shift > 1100 {
            return None;
        }
        let bits = if total == 0.0 { 0.0 } else { total.log2() + 2.0 };
        if bits + shift as f64 >= FIXED_LIMIT_BITS as f64 {
            return None;
        }
        Some(FixedScale { shift: shift as u32 })
    }

    pub fn to_fixed(&self, w: f64) -> Fixed {
        let r = BigRational::from_float(w).expect("finite weight");
        let scaled = r * BigRational::from_integer(BigInt::from(1) << self.shift);
        assert!(scaled.is_integer(), "weight {w} not representable at shift {}", self.shift);
        Fixed(scaled.to_integer().to_i128().expect("fixed-point weight fits"))
    }

    pub fn to_rational(&self, v: Fixed) -> BigRational {
        BigRational::new(BigInt::from(v.0), BigInt::from(1) << self.shift)
    }
}

pub fn rational_of(w: f64) -> BigRational {
    BigRational::from_float(w).expect("finite weight")
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

/// Total-order wrapper so costs can key ordered collections.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdCost<C>(pub C);

impl<C: Cost> Eq for OrdCost<C> {}

impl<C: Cost> PartialOrd for OrdCost<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Cost> Ord for OrdCost<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
