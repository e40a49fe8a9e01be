//! Deterministic sample grids in time and space.

use num_complex::Complex;

use crate::geometry::{Disc, Sector};
use crate::scalar::{count, lit, Real};

/// Geometric time samples in `(t_min, t_max]`, sorted ascending, together
/// with a set of space samples strictly inside a disc or sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub times: Vec<T>,
    pub points: Vec<Complex<T>>,
}

/// `n` geometric samples from `t_max` down to just above `t_min`, ascending.
/// The first sample is `t_max` itself; `t_min` is excluded.
pub fn time_ladder<T: Real>(t_min: T, t_max: T, n: usize) -> Vec<T> {
    assert!(t_min > T::zero() && t_max > t_min && n >= 1);
    let ratio = (t_min / t_max).ln() / count::<T>(n);
    let mut out: Vec<T> = (0..n).map(|k| t_max * (ratio * count::<T>(k)).exp()).collect();
    out.reverse();
    out
}

/// `n` samples including both ends, log-spaced, ascending.
pub fn geometric_inclusive<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(lo > T::zero() && hi >= lo && n >= 2);
    let step = (hi / lo).ln() / count::<T>(n - 1);
    (0..n).map(|k| lo * (step * count::<T>(k)).exp()).collect()
}

/// Concentric circles of radii `R (1 - edge) k / n_circles` with `n_angles`
/// rays each, plus the centre. Every point lies strictly inside the disc.
pub fn disc_points<T: Real>(disc: Disc<T>, n_circles: usize, n_angles: usize, edge: T) -> Vec<Complex<T>> {
    let r_out = disc.radius() * (T::one() - edge);
    let mut pts = vec![Complex::new(T::zero(), T::zero())];
    for k in 1..=n_circles {
        let r = r_out * count::<T>(k) / count::<T>(n_circles);
        for j in 0..n_angles {
            let th = T::TAU() * count::<T>(j) / count::<T>(n_angles);
            pts.push(Complex::from_polar(r, th));
        }
    }
    pts
}

/// Log-radius x angle lattice inside a sector: radii from
/// `R (1 - edge)` down to `R (1 - edge) * inner` geometrically, angles
/// uniformly in `[-(1 - edge) theta, (1 - edge) theta]`.
pub fn sector_points<T: Real>(
    sector: Sector<T>,
    n_radii: usize,
    n_angles: usize,
    edge: T,
    inner: T,
) -> Vec<Complex<T>> {
    let r_out = sector.radius() * (T::one() - edge);
    let radii = if n_radii == 1 {
        vec![r_out]
    } else {
        geometric_inclusive(r_out * inner, r_out, n_radii)
    };
    let th_out = sector.theta() * (T::one() - edge);
    let mut pts = Vec::with_capacity(n_radii * n_angles);
    for &r in &radii {
        for j in 0..n_angles {
            let th = if n_angles == 1 {
                T::zero()
            } else {
                -th_out + (th_out + th_out) * count::<T>(j) / count::<T>(n_angles - 1)
            };
            pts.push(Complex::from_polar(r, th));
        }
    }
    pts
}

impl<T: Real> Grid<T> {
    pub fn disc(t_min: T, t_max: T, n_times: usize, disc: Disc<T>, n_circles: usize, n_angles: usize) -> Self {
        Self {
            times: time_ladder(t_min, t_max, n_times),
            points: disc_points(disc, n_circles, n_angles, lit(1e-3)),
        }
    }

    pub fn sector(t_min: T, t_max: T, n_times: usize, sector: Sector<T>, n_radii: usize, n_angles: usize) -> Self {
        Self {
            times: time_ladder(t_min, t_max, n_times),
            points: sector_points(sector, n_radii, n_angles, lit(1e-3), lit(1e-2)),
        }
    }

    /// Times sorted from the largest toward zero.
    pub fn times_descending(&self) -> Vec<T> {
        let mut t = self.times.clone();
        t.sort_by(|a, b| b.partial_cmp(a).expect("finite times"));
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_sorted_positive_and_open_at_bottom() {
        let t = time_ladder(1e-6f64, 0.1, 10);
        assert_eq!(t.len(), 10);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t[0] > 1e-6);
        assert!((t[9] - 0.1).abs() < 1e-16);
    }

    #[test]
    fn space_samples_inside_domain() {
        let d = Disc::new(0.5).unwrap();
        let pts = disc_points(d, 4, 16, 1e-3);
        assert_eq!(pts.len(), 65);
        assert!(pts.iter().all(|&p| d.contains(p)));
        let s = Sector::new(0.2, 0.1).unwrap();
        let pts = sector_points(s, 8, 8, 1e-3, 1e-2);
        assert_eq!(pts.len(), 64);
        assert!(pts.iter().all(|&p| s.contains(p)));
    }
}
