use thiserror::Error;

use crate::ast::{BinOp, Expr, Ident, State, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {var}@{at} is unbound")]
    UnboundVariable { var: Ident, at: Ident },
    #[error("`{op}` cannot be applied to {left} and {right}")]
    TypeMismatch {
        op: &'static str,
        left: &'static str,
        right: &'static str,
    },
    #[error("`!` expects a boolean, found {0}")]
    NotBoolean(&'static str),
    #[error("integer overflow in `{0}`")]
    Overflow(&'static str),
}

/// Big-step evaluation `σ(e@at) ⇓ v`. Unlocated reads are resolved at `at`;
/// `e'@P` inside `e` moves evaluation of `e'` to `P`.
pub fn eval_expr(s: &State, e: &Expr, at: &Ident) -> Result<Value, EvalError> {
    match e {
        Expr::Lit(v) => Ok(v.clone()),
        Expr::Var(x) => s.get(x, at).cloned().ok_or_else(|| EvalError::UnboundVariable {
            var: x.clone(),
            at: at.clone(),
        }),
        Expr::At(inner, p) => eval_expr(s, inner, p),
        Expr::Not(inner) => match eval_expr(s, inner, at)? {
            Value::Bool(b) => Ok(Value::Bool(!b)),
            other => Err(EvalError::NotBoolean(other.type_name())),
        },
        Expr::Bin(op, l, r) => {
            let l = eval_expr(s, l, at)?;
            let r = eval_expr(s, r, at)?;
            apply(*op, l, r)
        }
    }
}

fn apply(op: BinOp, l: Value, r: Value) -> Result<Value, EvalError> {
    let mismatch = |l: &Value, r: &Value| EvalError::TypeMismatch {
        op: op.symbol(),
        left: l.type_name(),
        right: r.type_name(),
    };
    Ok(match (op, &l, &r) {
        (BinOp::Add, Value::Int(a), Value::Int(b)) => Value::Int(a.checked_add(*b).ok_or(EvalError::Overflow("+"))?),
        (BinOp::Sub, Value::Int(a), Value::Int(b)) => Value::Int(a.checked_sub(*b).ok_or(EvalError::Overflow("-"))?),
        (BinOp::Lt, Value::Int(a), Value::Int(b)) => Value::Bool(a < b),
        (BinOp::Concat, Value::Str(a), Value::Str(b)) => Value::Str(format!("{a}{b}")),
        (BinOp::Eq | BinOp::Ne, _, _) if l.type_name() == r.type_name() => Value::Bool((l == r) == (op == BinOp::Eq)),
        _ => return Err(mismatch(&l, &r)),
    })
}
