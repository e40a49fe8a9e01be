use super::{Expr, Var};
use crate::scalar::{count, Real};

pub(super) fn diff<T: Real>(e: &Expr<T>, var: Var) -> Expr<T> {
    if !e.depends_on(var) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var(v) => {
            if *v == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Neg(a) => Expr::neg(diff(a, var)),
        Expr::Add(a, b) => Expr::add(diff(a, var), diff(b, var)),
        Expr::Sub(a, b) => Expr::sub(diff(a, var), diff(b, var)),
        Expr::Mul(a, b) => Expr::add(
            Expr::mul(diff(a, var), (**b).clone()),
            Expr::mul((**a).clone(), diff(b, var)),
        ),
        Expr::Div(a, b) => {
            // (a/b)' = a'/b - a b'/b^2
            let first = Expr::div(diff(a, var), (**b).clone());
            let db = diff(b, var);
            if db.is_zero() {
                return first;
            }
            let second = Expr::div(Expr::mul((**a).clone(), db), Expr::pow((**b).clone(), 2));
            Expr::sub(first, second)
        }
        Expr::Pow(a, n) => {
            if *n == 0 {
                return Expr::zero();
            }
            let coef = Expr::real(count::<T>(*n as usize));
            Expr::mul(Expr::mul(coef, Expr::pow((**a).clone(), n - 1)), diff(a, var))
        }
        Expr::Exp(a) => Expr::mul(Expr::exp((**a).clone()), diff(a, var)),
        Expr::Log(a) => Expr::div(diff(a, var), (**a).clone()),
    }
}
