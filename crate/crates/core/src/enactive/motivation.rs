use crate::enactive::interaction::Primitive;
use crate::scalar::Scalar;

/// Fixed valence of each primitive interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotivationModel<T> {
    pub step: T,
    pub step_fail: T,
    pub turn_left: T,
    pub turn_right: T,
}

impl<T: Scalar> Default for MotivationModel<T> {
    fn default() -> Self {
        Self {
            step: T::lit(10.0),
            step_fail: T::lit(-1.0),
            turn_left: T::lit(-0.3),
            turn_right: T::lit(-0.3),
        }
    }
}

impl<T: Scalar> MotivationModel<T> {
    pub fn primitive(&self, p: Primitive) -> T {
        self.table()[p.index()]
    }

    /// Valences in [`Primitive::ALL`] order.
    pub fn table(&self) -> [T; 4] {
        [self.step_fail, self.step, self.turn_left, self.turn_right]
    }

    /// Valence of an interaction given how often each primitive occurs in it.
    pub fn of_counts(&self, counts: &[u32; 4]) -> T {
        self.table()
            .iter()
            .zip(counts)
            .fold(T::zero(), |acc, (v, &n)| acc + *v * T::from_u32(n).unwrap_or_else(T::zero))
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            step: self.step * c,
            step_fail: self.step_fail * c,
            turn_left: self.turn_left * c,
            turn_right: self.turn_right * c,
        }
    }
}
