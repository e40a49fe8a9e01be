//! `singpde` is a laboratory for singular first-order PDEs of the form
//!
//! ```text
//!     t * du/dt = F(t, x, u, du/dx)          (or F(t, x, u, x*du/dx) in Euler form)
//! ```
//!
//! with `t > 0` real and `x` complex. It classifies an equation by the
//! behaviour of `dF/dv(t,x,0,0)` near `x = 0`, builds the holomorphic formal
//! solution `u0(t,x) = sum u_ij t^i x^j`, integrates complex characteristics
//! toward the singular time `t -> 0` in log-time, and audits the vanishing
//! double limit `limsup_R lim_sigma sup |u| / R^2` that separates the unique
//! small solution from spurious ones.
//!
//! Everything numeric is generic over [`Real`] (`f32` / `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod audit;
pub mod characteristics;
pub mod classify;
pub mod expr;
pub mod gallery;
pub mod geometry;
pub mod grid;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod weight;

pub use num_complex::Complex;
pub use scalar::Real;

pub use audit::{AuditReport, SolutionField, Verdict};
pub use characteristics::{CharTrace, FieldSpec, TraceStatus};
pub use classify::CaseClass;
pub use expr::{Expr, PdeSpec, Var};
pub use geometry::{Disc, Domain, Sector};
pub use grid::Grid;
pub use series::DoubleSeries;
pub use weight::{PhiWeight, WeightFn};

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;
pub type Expr64 = Expr<f64>;
pub type PdeSpec64 = PdeSpec<f64>;
pub type WeightFn64 = WeightFn<f64>;
pub type Sector64 = Sector<f64>;
pub type Disc64 = Disc<f64>;
pub type Grid64 = Grid<f64>;
pub type CaseClass64 = CaseClass<f64>;
pub type DoubleSeries64 = DoubleSeries<f64>;
pub type SolutionField64 = SolutionField<f64>;
pub type FieldSpec64 = FieldSpec<f64>;
pub type CharTrace64 = CharTrace<f64>;
