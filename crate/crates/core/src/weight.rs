//! Weight functions `mu(t)` and their accumulated weight
//! `phi(t) = int_0^t mu(s)/s ds`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::semi_infinite;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("power exponent must be positive, got {0}")]
    BadAlpha(f64),
    #[error("log-power exponent must exceed 1, got {0}")]
    BadBeta(f64),
    #[error("upper time T0 must be positive (and < 1 for log-power weights), got {0}")]
    BadT0(f64),
    #[error("t = {t} outside (0, {t0}]")]
    OutOfRange { t: f64, t0: f64 },
}

/// Admissible weight families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind<T> {
    /// `mu(t) = t^alpha`, `alpha > 0`.
    Power { alpha: T },
    /// `mu(t) = (log(1/t))^(-beta)`, `beta > 1`.
    LogPower { beta: T },
}

/// A weight function on `(0, T0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFn<T> {
    kind: WeightKind<T>,
    t0: T,
}

impl<T: Real> WeightFn<T> {
    pub fn new(kind: WeightKind<T>, t0: T) -> Result<Self, WeightError> {
        if !(t0 > T::zero()) || !t0.is_finite() {
            return Err(WeightError::BadT0(crate::scalar::to_f64(t0)));
        }
        match kind {
            WeightKind::Power { alpha } => {
                if !(alpha > T::zero()) || !alpha.is_finite() {
                    return Err(WeightError::BadAlpha(crate::scalar::to_f64(alpha)));
                }
            }
            WeightKind::LogPower { beta } => {
                if !(beta > T::one()) || !beta.is_finite() {
                    return Err(WeightError::BadBeta(crate::scalar::to_f64(beta)));
                }
                if !(t0 < T::one()) {
                    return Err(WeightError::BadT0(crate::scalar::to_f64(t0)));
                }
            }
        }
        Ok(Self { kind, t0 })
    }

    pub fn power(alpha: T, t0: T) -> Result<Self, WeightError> {
        Self::new(WeightKind::Power { alpha }, t0)
    }

    pub fn log_power(beta: T, t0: T) -> Result<Self, WeightError> {
        Self::new(WeightKind::LogPower { beta }, t0)
    }

    /// `mu(t) = t` on `(0, t0]`.
    pub fn identity(t0: T) -> Self {
        Self::power(T::one(), t0).expect("identity weight is admissible")
    }

    pub fn kind(&self) -> WeightKind<T> {
        self.kind
    }

    pub fn t0(&self) -> T {
        self.t0
    }

    fn check(&self, t: T) -> Result<(), WeightError> {
        if t > T::zero() && t <= self.t0 {
            Ok(())
        } else {
            Err(WeightError::OutOfRange {
                t: crate::scalar::to_f64(t),
                t0: crate::scalar::to_f64(self.t0),
            })
        }
    }

    /// `mu(t)`, defined on `(0, T0]`.
    pub fn eval(&self, t: T) -> Result<T, WeightError> {
        self.check(t)?;
        Ok(self.mu(t))
    }

    // Unchecked formula; also used by the quadrature fallback below t0.
    fn mu(&self, t: T) -> T {
        match self.kind {
            WeightKind::Power { alpha } => t.powf(alpha),
            WeightKind::LogPower { beta } => (-t.ln()).powf(-beta),
        }
    }

    // mu at s = exp(-l), without forming s (which underflows long before
    // the log-power tail is negligible).
    fn mu_log(&self, l: T) -> T {
        match self.kind {
            WeightKind::Power { alpha } => (-alpha * l).exp(),
            WeightKind::LogPower { beta } => l.powf(-beta),
        }
    }

    /// `phi(t)` through the closed-form antiderivative.
    pub fn phi(&self, t: T) -> Result<T, WeightError> {
        PhiWeight::closed_form(*self).eval(t)
    }
}

/// How `phi` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMethod {
    ClosedForm,
    Quadrature,
}

/// The accumulated weight `phi(t) = int_0^t mu(s)/s ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiWeight<T> {
    pub weight: WeightFn<T>,
    pub method: PhiMethod,
}

impl<T: Real> PhiWeight<T> {
    pub fn closed_form(weight: WeightFn<T>) -> Self {
        Self { weight, method: PhiMethod::ClosedForm }
    }

    pub fn quadrature(weight: WeightFn<T>) -> Self {
        Self { weight, method: PhiMethod::Quadrature }
    }

    pub fn eval(&self, t: T) -> Result<T, WeightError> {
        self.weight.check(t)?;
        Ok(match self.method {
            PhiMethod::ClosedForm => match self.weight.kind {
                WeightKind::Power { alpha } => t.powf(alpha) / alpha,
                WeightKind::LogPower { beta } => (-t.ln()).powf(T::one() - beta) / (beta - T::one()),
            },
            PhiMethod::Quadrature => self.integrate(t),
        })
    }

    // int_0^t mu(s)/s ds = int_0^inf mu(t e^{-y}) dy, then y = S (e^r - 1)
    // so both weight families decay exponentially in r.
    fn integrate(&self, t: T) -> T {
        let l0 = -t.ln();
        let scale = l0.max(T::one());
        let w = self.weight;
        semi_infinite(
            |r: T| {
                let y = scale * (r.exp() - T::one());
                let v = w.mu_log(l0 + y) * scale * r.exp();
                if v.is_finite() {
                    v
                } else {
                    T::zero()
                }
            },
            lit(1e-12),
        )
    }
}
