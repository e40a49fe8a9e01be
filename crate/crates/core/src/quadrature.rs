//! Quadrature rules: fixed Gauss-Legendre, adaptive Gauss-Kronrod,
//! cumulative trapezoid, and the Cauchy-circle derivative.

use num_complex::Complex;

use crate::scalar::{count, lit, Real};

const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

const K15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss-7 weights at K15_NODES[1], [3], [5], [7].
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes and weights of the 16-point Gauss-Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_16_unit<T: Real>() -> [(T, T); 16] {
    let half: T = lit(0.5);
    let mut out = [(T::zero(), T::zero()); 16];
    for k in 0..8 {
        let x: T = lit(GL16_NODES[k]);
        let w: T = lit(GL16_WEIGHTS[k]);
        out[2 * k] = (half * (T::one() - x), half * w);
        out[2 * k + 1] = (half * (T::one() + x), half * w);
    }
    out
}

/// `int_0^1 f(s) ds` with the 16-point Gauss-Legendre rule. Exact for
/// polynomials of degree <= 31.
pub fn gauss_legendre_16<T: Real, V, F>(mut f: F) -> V
where
    V: std::ops::Add<Output = V> + std::ops::Mul<T, Output = V> + Default,
    F: FnMut(T) -> V,
{
    gauss_legendre_16_unit::<T>()
        .iter()
        .fold(V::default(), |acc, &(s, w)| acc + f(s) * w)
}

fn kronrod_panel<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T) -> (T, T) {
    let half: T = lit(0.5);
    let c = half * (a + b);
    let h = half * (b - a);
    let mut k = T::zero();
    let mut g = T::zero();
    for i in 0..8 {
        let x: T = lit(K15_NODES[i]);
        let wk: T = lit(K15_WEIGHTS[i]);
        let fx = if i == 7 {
            f(c)
        } else {
            f(c - h * x) + f(c + h * x)
        };
        k += wk * fx;
        if i % 2 == 1 {
            g += lit::<T>(G7_WEIGHTS[i / 2]) * fx;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a real integrand
/// over `[a, b]`. Returns the estimate and the accumulated error bound.
pub fn adaptive_gk<T: Real>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
) -> (T, T) {
    let (v0, e0) = kronrod_panel(&mut f, a, b);
    let mut panels = vec![(a, b, v0, e0)];
    let max_panels = 4000;
    loop {
        let total: T = panels.iter().fold(T::zero(), |s, p| s + p.2);
        let err: T = panels.iter().fold(T::zero(), |s, p| s + p.3);
        if err <= abs_tol.max(rel_tol * total.abs()) || panels.len() >= max_panels {
            return (total, err);
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |(bi, be), (i, p)| {
                if p.3 > be {
                    (i, p.3)
                } else {
                    (bi, be)
                }
            });
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = (pa + pb) * lit(0.5);
        let (v1, e1) = kronrod_panel(&mut f, pa, mid);
        let (v2, e2) = kronrod_panel(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

/// `int_0^inf f(r) dr` for integrands decaying at least exponentially,
/// by adaptive panels `[0,1], [1,2], [2,4], ...` until the tail is negligible.
pub fn semi_infinite<T: Real>(mut f: impl FnMut(T) -> T, rel_tol: T) -> T {
    let mut total = T::zero();
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut quiet = 0;
    for _ in 0..64 {
        let (v, _) = adaptive_gk(&mut f, lo, hi, T::min_positive_value(), rel_tol * lit(1e-2));
        total += v;
        if v.abs() <= rel_tol * lit::<T>(1e-3) * total.abs() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi = hi + hi;
    }
    total
}

/// Running trapezoid integral of samples `(s_k, f_k)`; entry `k` holds
/// `int_{s_0}^{s_k} f ds` (signed by the direction of `s`).
pub fn cumulative_trapezoid<T: Real>(s: &[T], f: &[Complex<T>]) -> Vec<Complex<T>> {
    assert_eq!(s.len(), f.len());
    let mut out = Vec::with_capacity(s.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..s.len() {
        if k > 0 {
            acc += (f[k] + f[k - 1]) * ((s[k] - s[k - 1]) * lit(0.5));
        }
        out.push(acc);
    }
    out
}

/// First derivative of a holomorphic function by the `n`-point trapezoid
/// rule on the circle `|z - x| = r` (Cauchy's integral formula).
pub fn cauchy_derivative<T: Real>(
    f: impl Fn(Complex<T>) -> Complex<T>,
    x: Complex<T>,
    r: T,
    n: usize,
) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for k in 0..n {
        let th = T::TAU() * count::<T>(k) / count::<T>(n);
        let e = Complex::from_polar(T::one(), th);
        acc += f(x + e * r) * e.conj();
    }
    acc / (r * count::<T>(n))
}
