#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Mul => a * b,
            BinOp::Div => a / b,
            BinOp::Pow => a.powf(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    pub fn test(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Atan,
    Abs,
    Sign,
    Min,
    Max,
}

impl Func {
    pub const ALL: [Func; 8] =
        [Func::Log, Func::Exp, Func::Sqrt, Func::Atan, Func::Abs, Func::Sign, Func::Min, Func::Max];

    pub fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    pub fn apply1(self, x: f64) -> f64 {
        match self {
            Func::Log => x.ln(),
            Func::Exp => x.exp(),
            Func::Sqrt => x.sqrt(),
            Func::Atan => x.atan(),
            Func::Abs => x.abs(),
            Func::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    // 0 stays 0, NaN stays NaN
                    x
                }
            }
            Func::Min | Func::Max => f64::NAN,
        }
    }

    /// NaN in either argument propagates, unlike `f64::min`.
    pub fn apply2(self, a: f64, b: f64) -> f64 {
        if a.is_nan() || b.is_nan() {
            return f64::NAN;
        }
        match self {
            Func::Min => a.min(b),
            Func::Max => a.max(b),
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub op: CmpOp,
    pub lhs: ExprAst,
    pub rhs: ExprAst,
}

/// Expression tree over the single variable `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(f64),
    Var,
    Neg(Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Vec<ExprAst>),
    Piecewise { arms: Vec<(Condition, ExprAst)>, otherwise: Box<ExprAst> },
}

impl ExprAst {
    /// Direct recursive interpretation.
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ExprAst::Const(c) => *c,
            ExprAst::Var => s,
            ExprAst::Neg(e) => -e.eval(s),
            ExprAst::Binary(op, a, b) => op.apply(a.eval(s), b.eval(s)),
            ExprAst::Call(f, args) => match args.as_slice() {
                [x] => f.apply1(x.eval(s)),
                [x, y] => f.apply2(x.eval(s), y.eval(s)),
                _ => f64::NAN,
            },
            ExprAst::Piecewise { arms, otherwise } => {
                for (cond, branch) in arms {
                    if cond.op.test(cond.lhs.eval(s), cond.rhs.eval(s)) {
                        return branch.eval(s);
                    }
                }
                otherwise.eval(s)
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprAst::Const(_) | ExprAst::Var => 1,
            ExprAst::Neg(e) => 1 + e.depth(),
            ExprAst::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
            ExprAst::Call(_, args) => 1 + args.iter().map(ExprAst::depth).max().unwrap_or(0),
            ExprAst::Piecewise { arms, otherwise } => {
                let arm_depth = arms
                    .iter()
                    .map(|(c, e)| c.lhs.depth().max(c.rhs.depth()).max(e.depth()))
                    .max()
                    .unwrap_or(0);
                1 + arm_depth.max(otherwise.depth())
            }
        }
    }
}

/// Canonical printer. Every binary node is parenthesized, so the output
/// reparses to an identical tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(c) => write!(f, "{c:?}"),
            ExprAst::Var => f.write_str("s"),
            ExprAst::Neg(e) => write!(f, "(-{e})"),
            ExprAst::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ExprAst::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            ExprAst::Piecewise { arms, otherwise } => {
                f.write_str("piece { ")?;
                for (c, e) in arms {
                    write!(f, "{} {} {} => {e}, ", c.lhs, c.op.symbol(), c.rhs)?;
                }
                write!(f, "else => {otherwise} }}")
            }
        }
    }
}
