use crate::math::{Real, Vec3};

use super::DeviceError;

/// One loop in a cascade: `η·u_c + y_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopTerm<T> {
    pub effectiveness: T,
    pub command: T,
    pub offset: T,
}

impl<T: Real> LoopTerm<T> {
    pub fn new(effectiveness: T, command: T, offset: T) -> Self {
        Self { effectiveness, command, offset }
    }

    pub fn healthy(command: T) -> Self {
        Self::new(T::one(), command, T::zero())
    }

    pub fn value(&self) -> T {
        self.effectiveness * self.command + self.offset
    }
}

/// Sum of parallel terms, each a product of loops in series:
/// `y = Σ_j Π_i [η_ij·u_ij + y_o,ij]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMedSpec<T> {
    terms: Vec<Vec<LoopTerm<T>>>,
}

impl<T: Real> GeneralMedSpec<T> {
    pub fn new(terms: Vec<Vec<LoopTerm<T>>>) -> Result<Self, DeviceError> {
        if terms.is_empty() {
            return Err(DeviceError::EmptyCascade("at least one parallel term is required"));
        }
        if terms.iter().any(|t| t.is_empty()) {
            return Err(DeviceError::EmptyCascade("every parallel term needs at least one loop"));
        }
        for l in terms.iter().flatten() {
            if !(l.effectiveness >= T::zero() && l.effectiveness <= T::one()) {
                return Err(DeviceError::EffectivenessOutOfRange(l.effectiveness.as_f64()));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[Vec<LoopTerm<T>>] {
        &self.terms
    }

    /// Product of each parallel term.
    pub fn term_outputs(&self) -> Vec<T> {
        self.terms.iter().map(|series| series.iter().fold(T::one(), |p, l| p * l.value())).collect()
    }

    pub fn output(&self) -> T {
        self.term_outputs().into_iter().fold(T::zero(), |s, y| s + y)
    }

    /// Torque when parallel term `j` acts along `directions[j]` with the
    /// gyroscopic sign convention `τ = −Σ_j y_j·t̂_j`.
    pub fn torque(&self, directions: &[Vec3<T>]) -> Result<Vec3<T>, DeviceError> {
        if directions.len() != self.terms.len() {
            return Err(DeviceError::DimensionMismatch {
                what: "torque directions",
                expected: self.terms.len(),
                got: directions.len(),
            });
        }
        Ok(self.term_outputs().into_iter().zip(directions).fold(Vec3::zeros(), |acc, (y, d)| acc - *d * y))
    }
}

pub fn general_med_output<T: Real>(spec: &GeneralMedSpec<T>) -> T {
    spec.output()
}
