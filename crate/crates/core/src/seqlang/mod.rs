//! Symbolic parameter families over the integer index `n`.
//!
//! Families are small arithmetic expressions in `n` built from constants,
//! `n`, `abs(n)`, `alt(n)` (= `(-1)^n`), the four arithmetic operators,
//! rational powers, `exp` and `log1p`. They parameterize the Gaussian
//! product measures (`b` rows must be strictly positive) and every
//! criterion series is assembled from them, so evaluation stays exact and
//! the asymptotic class extraction stays conservative: a class other than
//! [`AsymptoticClass::Unknown`] is a proven statement about the family.

mod asym;
mod parser;

pub(crate) use asym::{Ends, Leading};

use num_traits::ToPrimitive;
use std::fmt;

/// Exact rational exponents for the power operator.
pub type Rational = num_rational::Ratio<i64>;

/// Abstract syntax tree over the integer variable `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyExpr {
    Const(f64),
    /// The variable `n` itself.
    Var,
    /// `abs(n)`.
    AbsVar,
    /// `alt(n)` = `(-1)^n`.
    Alt,
    Add(Box<FamilyExpr>, Box<FamilyExpr>),
    Sub(Box<FamilyExpr>, Box<FamilyExpr>),
    Mul(Box<FamilyExpr>, Box<FamilyExpr>),
    Div(Box<FamilyExpr>, Box<FamilyExpr>),
    /// Power with a rational exponent.
    Pow(Box<FamilyExpr>, Rational),
    Exp(Box<FamilyExpr>),
    /// `log1p(x)` = `log(1 + x)`.
    Log1p(Box<FamilyExpr>),
}

/// Parse error with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

/// Runtime evaluation failure at a concrete index.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("division by zero at n = {n}")]
    DivisionByZero { n: i64 },
    #[error("log1p of {value} (<= -1) at n = {n}")]
    LogDomain { n: i64, value: f64 },
    #[error("negative base {base} under non-integer exponent at n = {n}")]
    NegativeBasePower { n: i64, base: f64 },
    #[error("evaluation produced NaN at n = {n}")]
    NotANumber { n: i64 },
}

/// Sound asymptotic class of a family as `|n| -> infinity`.
///
/// `PowerLaw(p)` asserts that `f(n) / |n|^p` tends to a nonzero constant
/// along each parity class; `ExpGrowth`/`ExpDecay` assert superpolynomial
/// growth/decay of `|f|`; `Alternating` wraps the class of `|f|` when the
/// sign flips with the parity of `n`. `Unknown` is returned whenever the
/// extraction rules do not apply: never guessed.
#[derive(Debug, Clone, PartialEq)]
pub enum AsymptoticClass {
    PowerLaw(Rational),
    ExpGrowth,
    ExpDecay,
    Bounded,
    Alternating(Box<AsymptoticClass>),
    Unknown,
}

/// Parse a family from its textual form.
pub fn parse_family(text: &str) -> Result<FamilyExpr, ParseError> {
    parser::parse(text)
}

/// Evaluate a family at the integer index `n`.
pub fn eval_family(f: &FamilyExpr, n: i64) -> Result<f64, DomainError> {
    f.eval(n)
}

/// Extract the asymptotic class of a family.
pub fn asymptotic_class(f: &FamilyExpr) -> AsymptoticClass {
    asym::project(&asym::ends(f))
}

// the add/sub/mul/div associated functions are folding builders taking
// operands by value, not operator-trait impls
#[allow(clippy::should_implement_trait)]
impl FamilyExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parser::parse(text)
    }

    pub fn eval(&self, n: i64) -> Result<f64, DomainError> {
        let v = match self {
            FamilyExpr::Const(c) => *c,
            FamilyExpr::Var => n as f64,
            FamilyExpr::AbsVar => n.unsigned_abs() as f64,
            FamilyExpr::Alt => {
                if n.rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            FamilyExpr::Add(a, b) => a.eval(n)? + b.eval(n)?,
            FamilyExpr::Sub(a, b) => a.eval(n)? - b.eval(n)?,
            FamilyExpr::Mul(a, b) => a.eval(n)? * b.eval(n)?,
            FamilyExpr::Div(a, b) => {
                let den = b.eval(n)?;
                if den == 0.0 {
                    return Err(DomainError::DivisionByZero { n });
                }
                a.eval(n)? / den
            }
            FamilyExpr::Pow(base, r) => {
                let b = base.eval(n)?;
                let e = r.to_f64().expect("rational exponent fits f64");
                if b < 0.0 && !r.is_integer() {
                    return Err(DomainError::NegativeBasePower { n, base: b });
                }
                if b == 0.0 && e < 0.0 {
                    return Err(DomainError::DivisionByZero { n });
                }
                b.powf(e)
            }
            FamilyExpr::Exp(a) => a.eval(n)?.exp(),
            FamilyExpr::Log1p(a) => {
                let x = a.eval(n)?;
                if x <= -1.0 {
                    return Err(DomainError::LogDomain { n, value: x });
                }
                x.ln_1p()
            }
        };
        if v.is_nan() {
            return Err(DomainError::NotANumber { n });
        }
        Ok(v)
    }

    /// Constant value of the expression, if it is a literal constant node.
    pub fn as_const(&self) -> Option<f64> {
        match self {
            FamilyExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, FamilyExpr::Const(c) if *c == 0.0)
    }

    // ---- smart constructors -------------------------------------------
    //
    // Used when composing criterion summands out of validated families.
    // The folds preserve real-arithmetic semantics on the composition
    // domain (denominators are positive b-families): exact zero
    // coefficients annihilate their factor before any f64 overflow can
    // turn `0 * inf` into NaN.

    pub fn num(c: f64) -> Self {
        FamilyExpr::Const(c)
    }

    pub fn add(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => return FamilyExpr::Const(x + y),
            (Some(0.0), None) => return b,
            (None, Some(0.0)) => return a,
            _ => {}
        }
        FamilyExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Self, b: Self) -> Self {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return FamilyExpr::Const(x - y);
        }
        if b.is_zero() {
            return a;
        }
        if a == b {
            return FamilyExpr::Const(0.0);
        }
        FamilyExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => return FamilyExpr::Const(x * y),
            (Some(0.0), _) | (_, Some(0.0)) => return FamilyExpr::Const(0.0),
            (Some(1.0), None) => return b,
            (None, Some(1.0)) => return a,
            _ => {}
        }
        FamilyExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Self, b: Self) -> Self {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if y != 0.0 {
                return FamilyExpr::Const(x / y);
            }
        }
        if a.is_zero() {
            return FamilyExpr::Const(0.0);
        }
        if b.as_const() == Some(1.0) {
            return a;
        }
        if a == b {
            return FamilyExpr::Const(1.0);
        }
        FamilyExpr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Self, r: Rational) -> Self {
        if r == Rational::from_integer(1) {
            return a;
        }
        if let Some(x) = a.as_const() {
            let e = r.to_f64().expect("rational exponent fits f64");
            if x > 0.0 || (x != 0.0 && r.is_integer()) || (x == 0.0 && e > 0.0) {
                return FamilyExpr::Const(x.powf(e));
            }
        }
        FamilyExpr::Pow(Box::new(a), r)
    }

    pub fn sq(a: Self) -> Self {
        Self::pow(a, Rational::from_integer(2))
    }

    pub fn sqrt(a: Self) -> Self {
        Self::pow(a, Rational::new(1, 2))
    }

    pub fn recip(a: Self) -> Self {
        Self::div(FamilyExpr::Const(1.0), a)
    }

    pub fn exp(a: Self) -> Self {
        if let Some(x) = a.as_const() {
            return FamilyExpr::Const(x.exp());
        }
        FamilyExpr::Exp(Box::new(a))
    }

    pub fn log1p(a: Self) -> Self {
        if let Some(x) = a.as_const() {
            if x > -1.0 {
                return FamilyExpr::Const(x.ln_1p());
            }
        }
        FamilyExpr::Log1p(Box::new(a))
    }

    pub(crate) fn ends(&self) -> Ends {
        asym::ends(self)
    }
}

// Precedence levels used by the printer: additive 1, multiplicative 2,
// power 3, atoms 4.
fn fmt_prec(e: &FamilyExpr, parent: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match e {
        FamilyExpr::Add(..) | FamilyExpr::Sub(..) => 1,
        FamilyExpr::Mul(..) | FamilyExpr::Div(..) => 2,
        FamilyExpr::Pow(..) => 3,
        _ => 4,
    };
    let paren = prec < parent;
    if paren {
        write!(f, "(")?;
    }
    match e {
        FamilyExpr::Const(c) => {
            if *c < 0.0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        FamilyExpr::Var => write!(f, "n")?,
        FamilyExpr::AbsVar => write!(f, "abs(n)")?,
        FamilyExpr::Alt => write!(f, "alt(n)")?,
        FamilyExpr::Add(a, b) => {
            fmt_prec(a, 1, f)?;
            write!(f, " + ")?;
            fmt_prec(b, 2, f)?;
        }
        FamilyExpr::Sub(a, b) => {
            fmt_prec(a, 1, f)?;
            write!(f, " - ")?;
            fmt_prec(b, 2, f)?;
        }
        FamilyExpr::Mul(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, " * ")?;
            fmt_prec(b, 3, f)?;
        }
        FamilyExpr::Div(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, " / ")?;
            fmt_prec(b, 3, f)?;
        }
        FamilyExpr::Pow(a, r) => {
            fmt_prec(a, 4, f)?;
            if r.is_integer() && *r.numer() >= 0 {
                write!(f, "^{}", r.numer())?;
            } else {
                write!(f, "^({}/{})", r.numer(), r.denom())?;
            }
        }
        FamilyExpr::Exp(a) => {
            write!(f, "exp(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")?;
        }
        FamilyExpr::Log1p(a) => {
            write!(f, "log1p(")?;
            fmt_prec(a, 0, f)?;
            write!(f, ")")?;
        }
    }
    if paren {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for FamilyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FamilyExpr {
        parse_family(s).unwrap()
    }

    #[test]
    fn parse_constant_one() {
        assert_eq!(p("1"), FamilyExpr::Const(1.0));
    }

    #[test]
    fn parse_exp_of_negated_abs() {
        // structural: exp node over negated |n|
        match p("exp(-abs(n))") {
            FamilyExpr::Exp(inner) => match *inner {
                FamilyExpr::Mul(a, b) => {
                    assert_eq!(*a, FamilyExpr::Const(-1.0));
                    assert_eq!(*b, FamilyExpr::AbsVar);
                }
                other => panic!("expected negated abs, got {other:?}"),
            },
            other => panic!("expected exp node, got {other:?}"),
        }
    }

    #[test]
    fn parse_alternating_reciprocal_value() {
        let f = p("(-1)^n / (1+abs(n))");
        assert_eq!(f.eval(2).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn eval_square_at_negative() {
        assert_eq!(p("n^2").eval(-3).unwrap(), 9.0);
    }

    #[test]
    fn eval_exp_abs_at_zero() {
        assert_eq!(p("exp(-abs(n))").eval(0).unwrap(), 1.0);
    }

    #[test]
    fn eval_harmonic_like() {
        assert_eq!(p("1/(1+abs(n))").eval(4).unwrap(), 0.2);
    }

    #[test]
    fn eval_domain_errors() {
        assert!(matches!(
            p("1/n").eval(0),
            Err(DomainError::DivisionByZero { n: 0 })
        ));
        assert!(matches!(
            p("log1p(n)").eval(-2),
            Err(DomainError::LogDomain { .. })
        ));
        assert!(matches!(
            p("n^(1/2)").eval(-1),
            Err(DomainError::NegativeBasePower { .. })
        ));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match parse_family("1 + ") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse_family("2*m") {
            Err(ParseError::UnknownIdentifier { offset, name }) => {
                assert_eq!(offset, 2);
                assert_eq!(name, "m");
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
        assert!(parse_family("").is_err());
    }

    #[test]
    fn rational_exponent_required() {
        assert!(parse_family("n^n").is_err());
        assert!(parse_family("2^(1/3)").is_ok());
        let f = p("abs(n)^(3/2)");
        assert_eq!(f.eval(4).unwrap(), 8.0);
    }

    #[test]
    fn alt_parity_on_negatives() {
        let f = p("alt(n)");
        assert_eq!(f.eval(-3).unwrap(), -1.0);
        assert_eq!(f.eval(-4).unwrap(), 1.0);
        assert_eq!(f.eval(0).unwrap(), 1.0);
    }

    #[test]
    fn class_power_law_squares() {
        assert_eq!(
            asymptotic_class(&p("n^2")),
            AsymptoticClass::PowerLaw(Rational::from_integer(2))
        );
    }

    #[test]
    fn class_exp_growth() {
        assert_eq!(asymptotic_class(&p("exp(abs(n))")), AsymptoticClass::ExpGrowth);
        assert_eq!(asymptotic_class(&p("exp(-abs(n))")), AsymptoticClass::ExpDecay);
    }

    #[test]
    fn class_reciprocal_power() {
        assert_eq!(
            asymptotic_class(&p("3/(1+abs(n))")),
            AsymptoticClass::PowerLaw(Rational::from_integer(-1))
        );
    }

    #[test]
    fn class_alternating() {
        match asymptotic_class(&p("(-1)^n / (1+abs(n))")) {
            AsymptoticClass::Alternating(base) => {
                assert_eq!(*base, AsymptoticClass::PowerLaw(Rational::from_integer(-1)));
            }
            other => panic!("expected alternating, got {other:?}"),
        }
    }

    #[test]
    fn class_parity_dependent_constants_are_power_law_zero() {
        // nonzero limit along each parity class (3 on even, 1 on odd)
        assert_eq!(
            asymptotic_class(&p("2 + alt(n)")),
            AsymptoticClass::PowerLaw(Rational::from_integer(0))
        );
    }

    #[test]
    fn class_unknown_on_cancellation() {
        // leading orders cancel; second-order behaviour is invisible
        assert_eq!(
            asymptotic_class(&p("(1+abs(n)) - abs(n)")),
            AsymptoticClass::Unknown
        );
    }

    #[test]
    fn unparse_roundtrips_by_value() {
        for src in [
            "1",
            "exp(-abs(n))",
            "(-1)^n / (1+abs(n))",
            "n^2 + 3*n - 4/(1+abs(n))",
            "abs(n)^(3/2) * exp(n / (1 + abs(n)))",
            "log1p(abs(n)) - 2",
        ] {
            let ast = p(src);
            let round = p(&ast.to_string());
            for n in -50..=50 {
                match (ast.eval(n), round.eval(n)) {
                    (Ok(a), Ok(b)) => assert!(
                        (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                        "{src} at {n}: {a} vs {b}"
                    ),
                    (Err(_), Err(_)) => {}
                    other => panic!("{src} at {n}: mismatch {other:?}"),
                }
            }
        }
    }
}
