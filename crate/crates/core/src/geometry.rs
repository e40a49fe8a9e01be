//! Discs `D_R`, sectors `S(theta, R)` and their boundary distances.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{to_f64, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("sector half-opening must lie in (0, pi), got {0}")]
    BadOpening(f64),
    #[error("sector half-opening {theta} must be below pi/(2p) = {limit} for p = {p}")]
    OpeningTooWide { theta: f64, p: u32, limit: f64 },
    #[error("sector excludes the origin")]
    Origin,
    #[error("shrink factor must lie in (0, 1], got {0}")]
    BadShrink(f64),
}

/// Open disc `|x| < radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc<T> {
    radius: T,
}

impl<T: Real> Disc<T> {
    pub fn new(radius: T) -> Result<Self, GeometryError> {
        if radius > T::zero() && radius.is_finite() {
            Ok(Self { radius })
        } else {
            Err(GeometryError::BadRadius(to_f64(radius)))
        }
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn contains(&self, x: Complex<T>) -> bool {
        x.norm() < self.radius
    }
}

/// Open sector `{0 < |x| < R, |arg x| < theta}` with the principal argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector<T> {
    theta: T,
    radius: T,
}

impl<T: Real> Sector<T> {
    pub fn new(theta: T, radius: T) -> Result<Self, GeometryError> {
        if !(theta > T::zero() && theta < T::PI()) {
            return Err(GeometryError::BadOpening(to_f64(theta)));
        }
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(GeometryError::BadRadius(to_f64(radius)));
        }
        Ok(Self { theta, radius })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Checks the Case-3 opening constraint `theta < pi/(2p)`.
    pub fn check_opening(&self, p: u32) -> Result<(), GeometryError> {
        let limit = T::PI() / (T::from_u32(2 * p).unwrap_or_else(T::one));
        if p == 0 || self.theta < limit {
            Ok(())
        } else {
            Err(GeometryError::OpeningTooWide {
                theta: to_f64(self.theta),
                p,
                limit: to_f64(limit),
            })
        }
    }

    pub fn contains(&self, x: Complex<T>) -> bool {
        let r = x.norm();
        r > T::zero() && r < self.radius && x.arg().abs() < self.theta
    }

    /// `d_S(x) = min{log(R/|x|), theta - |arg x|}`; positive exactly on the
    /// open sector.
    pub fn distance(&self, x: Complex<T>) -> Result<T, GeometryError> {
        let r = x.norm();
        if r == T::zero() {
            return Err(GeometryError::Origin);
        }
        Ok((self.radius / r).ln().min(self.theta - x.arg().abs()))
    }

    /// `S(eta * theta, eta * R)`.
    pub fn shrunk(&self, eta: T) -> Result<Self, GeometryError> {
        if !(eta > T::zero() && eta <= T::one()) {
            return Err(GeometryError::BadShrink(to_f64(eta)));
        }
        Ok(Self { theta: self.theta * eta, radius: self.radius * eta })
    }

    /// Euclidean distance from an interior point to the sector boundary.
    pub fn euclidean_margin(&self, x: Complex<T>) -> T {
        let r = x.norm();
        let ang = self.theta - x.arg().abs();
        let to_ray = if ang >= T::FRAC_PI_2() { r } else { r * ang.sin() };
        (self.radius - r).min(to_ray)
    }
}

/// Region in which characteristics are followed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain<T> {
    Disc(Disc<T>),
    Sector(Sector<T>),
}

impl<T: Real> Domain<T> {
    pub fn contains(&self, x: Complex<T>) -> bool {
        match self {
            Domain::Disc(d) => d.contains(x),
            Domain::Sector(s) => s.contains(x),
        }
    }

    pub fn radius(&self) -> T {
        match self {
            Domain::Disc(d) => d.radius(),
            Domain::Sector(s) => s.radius(),
        }
    }
}

impl<T> From<Disc<T>> for Domain<T> {
    fn from(d: Disc<T>) -> Self {
        Domain::Disc(d)
    }
}

impl<T> From<Sector<T>> for Domain<T> {
    fn from(s: Sector<T>) -> Self {
        Domain::Sector(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn distance_examples() {
        let s = Sector::new(0.2, 1.0).unwrap();
        assert!((s.distance(c(0.5, 0.0)).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(s.distance(c(1.0, 0.0)).unwrap(), 0.0);
        let s = Sector::new(0.3f64, 2.0).unwrap();
        let x = Complex::from_polar(1.0, 0.1);
        assert!((s.distance(x).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(s.distance(c(0.0, 0.0)), Err(GeometryError::Origin));
    }

    #[test]
    fn shrink_examples() {
        let s = Sector::new(0.3f64, 1.0).unwrap();
        assert_eq!(s.shrunk(1.0).unwrap(), s);
        let h = s.shrunk(0.5).unwrap();
        assert!((h.theta() - 0.15).abs() < 1e-15 && (h.radius() - 0.5).abs() < 1e-15);
        let s = Sector::new(0.2f64, 2.0).unwrap();
        let h = s.shrunk(0.1).unwrap();
        assert!((h.theta() - 0.02).abs() < 1e-15 && (h.radius() - 0.2).abs() < 1e-15);
        assert!(s.shrunk(0.0).is_err());
        assert!(s.shrunk(1.5).is_err());
    }

    #[test]
    fn membership_and_opening() {
        let s = Sector::new(0.5, 1.0).unwrap();
        assert!(s.contains(c(0.5, 0.1)));
        assert!(!s.contains(c(0.0, 0.0)));
        assert!(!s.contains(c(-0.5, 0.0)));
        assert!(s.check_opening(1).is_ok());
        assert!(s.check_opening(4).is_err());
        assert!(Sector::new(std::f64::consts::PI, 1.0).is_err());
        let d = Disc::new(1.0).unwrap();
        assert!(d.contains(c(0.0, 0.99)) && !d.contains(c(1.0, 0.0)));
        assert!(Disc::new(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn distance_positive_iff_interior(r in 0.01f64..2.0, a in -3.0f64..3.0) {
            let s = Sector::new(0.4, 1.0).unwrap();
            let x = Complex::from_polar(r, a);
            let d = s.distance(x).unwrap();
            prop_assert_eq!(d > 0.0, s.contains(x));
        }

        #[test]
        fn distance_scales_with_shrink(r in 0.01f64..1.0, a in -0.3f64..0.3, eta in 0.05f64..1.0) {
            let s = Sector::new(0.3f64, 1.0).unwrap();
            let y = Complex::from_polar(r, a);
            let lhs = s.shrunk(eta).unwrap().distance(y * eta).unwrap();
            let rhs = (1.0 / r).ln().min(eta * 0.3 - a.abs());
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
