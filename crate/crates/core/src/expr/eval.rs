use thiserror::Error;

use super::{BinaryOp, Expr, Func, Var};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable {0} is not bound")]
    UnboundVariable(Var),
    #[error("{function} is undefined at {argument}")]
    DomainError {
        function: &'static str,
        argument: f64,
    },
    #[error("division by zero")]
    DivisionByZero,
}

/// Values for `x`, `y`, `z`; unset variables are unbound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bindings<T> {
    values: [Option<T>; 3],
}

impl<T: Copy> Default for Bindings<T> {
    fn default() -> Self {
        Self { values: [None; 3] }
    }
}

impl<T: Copy> Bindings<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: T) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: Var, value: T) {
        self.values[var.index()] = Some(value);
    }

    pub fn get(&self, var: Var) -> Option<T> {
        self.values[var.index()]
    }

    /// Bound variables with their values, in `x, y, z` order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, T)> + '_ {
        Var::ALL
            .into_iter()
            .filter_map(|v| self.get(v).map(|x| (v, x)))
    }
}

impl<T: Copy> FromIterator<(Var, T)> for Bindings<T> {
    fn from_iter<I: IntoIterator<Item = (Var, T)>>(iter: I) -> Self {
        let mut b = Self::new();
        for (v, x) in iter {
            b.set(v, x);
        }
        b
    }
}

fn domain_error<T: Real>(function: &'static str, argument: T) -> EvalError {
    EvalError::DomainError {
        function,
        argument: argument.to_f64().unwrap_or(f64::NAN),
    }
}

impl Expr {
    /// Evaluates the tree in scalar type `T`.
    ///
    /// Infinite results can only come from overflow; dividing by an exact
    /// zero is [`EvalError::DivisionByZero`].
    pub fn eval<T: Real>(&self, bindings: &Bindings<T>) -> Result<T, EvalError> {
        match self {
            Expr::Const(v) => Ok(T::from_f64(*v).unwrap_or_else(T::nan)),
            Expr::Var(v) => bindings.get(*v).ok_or(EvalError::UnboundVariable(*v)),
            Expr::Neg(e) => Ok(-e.eval(bindings)?),
            Expr::Binary(op, l, r) => {
                let a = l.eval(bindings)?;
                let b = r.eval(bindings)?;
                match op {
                    BinaryOp::Add => Ok(a + b),
                    BinaryOp::Sub => Ok(a - b),
                    BinaryOp::Mul => Ok(a * b),
                    BinaryOp::Div => {
                        if b == T::zero() {
                            Err(EvalError::DivisionByZero)
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinaryOp::Pow => pow(a, b),
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(bindings)?;
                match f {
                    Func::Ln if a <= T::zero() => Err(domain_error("ln", a)),
                    Func::Ln => Ok(a.ln()),
                    Func::Exp => Ok(a.exp()),
                    Func::Sqrt if a < T::zero() => Err(domain_error("sqrt", a)),
                    Func::Sqrt => Ok(a.sqrt()),
                    Func::Abs => Ok(a.abs()),
                }
            }
        }
    }

    /// Evaluates an expression that references no variables.
    pub fn eval_const(&self) -> Result<f64, EvalError> {
        self.eval(&Bindings::<f64>::new())
    }
}

/// Integer exponents use repeated multiplication so `ln(y)^3` stays exact
/// in sign for negative bases; other exponents need a non-negative base.
fn pow<T: Real>(base: T, exponent: T) -> Result<T, EvalError> {
    if exponent.fract() == T::zero() && exponent.abs() <= T::lit(64.0) {
        let n = exponent.to_i32().expect("small integer exponent");
        if n < 0 && base == T::zero() {
            return Err(EvalError::DivisionByZero);
        }
        return Ok(base.powi(n));
    }
    if base < T::zero() {
        return Err(domain_error("^", base));
    }
    if base == T::zero() && exponent < T::zero() {
        return Err(EvalError::DivisionByZero);
    }
    Ok(base.powf(exponent))
}
