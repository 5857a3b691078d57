//! Scalar abstraction shared by the valence, reward and planning code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real number type the agents compute with.
///
/// Blanket-implemented for every float satisfying the bounds, so `f32` and
/// `f64` both work out of the box.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        assert_eq!(<f64 as Scalar>::lit(0.04), 0.04);
        assert_eq!(<f32 as Scalar>::lit(-0.3), -0.3f32);
        assert_eq!(<f32 as Scalar>::lit(10.0).to_f64_lossy(), 10.0);
    }
}
