//! Conservative leading-order asymptotics for family expressions.
//!
//! Behaviour is tracked along the four "ends" of the two-sided integer
//! line: (n -> +inf, even), (+inf, odd), (-inf, even), (-inf, odd).
//! Direction matters because of the bare variable `n`, parity because of
//! `alt(n)`. Each end carries a [`Leading`] term together with an
//! exactness flag: an exact leading term has no hidden lower-order part,
//! so exact cancellations collapse to [`Leading::Zero`] while inexact
//! ones degrade to [`Leading::Unknown`]. Every rule is sound: `Unknown`
//! is the answer whenever the true behaviour is not forced.

use super::{AsymptoticClass, FamilyExpr, Rational};
use num_traits::ToPrimitive;

/// Leading behaviour along one end, as `|n| -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Leading {
    /// Identically zero on this end.
    Zero,
    /// `c * |n|^p * ln(|n|)^lq * (1 + o(1))`, `c != 0`; `exact` means the
    /// `(1 + o(1))` factor is exactly 1.
    Pow {
        p: Rational,
        lq: Rational,
        c: f64,
        exact: bool,
    },
    /// `k * exp(h(n))` with `h ~ c * |n|^p * ln(|n|)^lq`, `p > 0` or
    /// (`p = 0`, `lq > 1`); `c != 0`. When `exact` (tight), the value is
    /// `k * exp(c|n|^p ln^lq) * (1 + o(1))`: the exponent error stays
    /// bounded, so exponent-cancelling products collapse to the constant
    /// `k1 k2`. For non-tight terms only the exponent scale is known and
    /// only the sign of `k` is meaningful (0 = unknown).
    Exp {
        p: Rational,
        lq: Rational,
        c: f64,
        k: f64,
        exact: bool,
    },
    /// Grows (`grow`) or decays faster than any `exp(c|n|^p)`; only the
    /// sign is tracked (0 = unknown).
    Hyper { grow: bool, sign: f64 },
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ends {
    pub pe: Leading,
    pub po: Leading,
    pub ne: Leading,
    pub no: Leading,
}

impl Ends {
    fn uniform(l: Leading) -> Self {
        Ends {
            pe: l,
            po: l,
            ne: l,
            no: l,
        }
    }

    fn map2(a: &Ends, b: &Ends, f: impl Fn(Leading, Leading) -> Leading) -> Ends {
        Ends {
            pe: f(a.pe, b.pe),
            po: f(a.po, b.po),
            ne: f(a.ne, b.ne),
            no: f(a.no, b.no),
        }
    }

    fn map(a: &Ends, f: impl Fn(Leading) -> Leading) -> Ends {
        Ends {
            pe: f(a.pe),
            po: f(a.po),
            ne: f(a.ne),
            no: f(a.no),
        }
    }

    pub(crate) fn all(&self) -> [Leading; 4] {
        [self.pe, self.po, self.ne, self.no]
    }

    /// Ends reachable when summation runs over n >= 1 only.
    pub(crate) fn positive(&self) -> [Leading; 2] {
        [self.pe, self.po]
    }
}

fn r0() -> Rational {
    Rational::from_integer(0)
}
fn r1() -> Rational {
    Rational::from_integer(1)
}

pub(crate) fn ends(e: &FamilyExpr) -> Ends {
    match e {
        FamilyExpr::Const(c) => {
            if *c == 0.0 {
                Ends::uniform(Leading::Zero)
            } else if c.is_finite() {
                Ends::uniform(Leading::Pow {
                    p: r0(),
                    lq: r0(),
                    c: *c,
                    exact: true,
                })
            } else {
                Ends::uniform(Leading::Unknown)
            }
        }
        FamilyExpr::Var => {
            let plus = Leading::Pow {
                p: r1(),
                lq: r0(),
                c: 1.0,
                exact: true,
            };
            let minus = Leading::Pow {
                p: r1(),
                lq: r0(),
                c: -1.0,
                exact: true,
            };
            Ends {
                pe: plus,
                po: plus,
                ne: minus,
                no: minus,
            }
        }
        FamilyExpr::AbsVar => Ends::uniform(Leading::Pow {
            p: r1(),
            lq: r0(),
            c: 1.0,
            exact: true,
        }),
        FamilyExpr::Alt => {
            let one = Leading::Pow {
                p: r0(),
                lq: r0(),
                c: 1.0,
                exact: true,
            };
            let neg = Leading::Pow {
                p: r0(),
                lq: r0(),
                c: -1.0,
                exact: true,
            };
            Ends {
                pe: one,
                po: neg,
                ne: one,
                no: neg,
            }
        }
        FamilyExpr::Add(a, b) => Ends::map2(&ends(a), &ends(b), add),
        FamilyExpr::Sub(a, b) => Ends::map2(&ends(a), &ends(b), |x, y| add(x, neg(y))),
        FamilyExpr::Mul(a, b) => Ends::map2(&ends(a), &ends(b), mul),
        FamilyExpr::Div(a, b) => Ends::map2(&ends(a), &ends(b), |x, y| mul(x, recip(y))),
        FamilyExpr::Pow(a, r) => Ends::map(&ends(a), |x| pow_rat(x, *r)),
        FamilyExpr::Exp(a) => Ends::map(&ends(a), exp_of),
        FamilyExpr::Log1p(a) => Ends::map(&ends(a), log1p_of),
    }
}

/// Relative tolerance below which a sum of inexact leading coefficients is
/// treated as a possible cancellation.
const CANCEL_EPS: f64 = 1e-10;

/// A `Pow` that absorbed a lower-order term is no longer literally exact.
fn clear_literal_exact(l: Leading) -> Leading {
    match l {
        Leading::Pow { p, lq, c, .. } => Leading::Pow {
            p,
            lq,
            c,
            exact: false,
        },
        other => other,
    }
}

fn neg(l: Leading) -> Leading {
    match l {
        Leading::Zero => Leading::Zero,
        Leading::Pow { p, lq, c, exact } => Leading::Pow {
            p,
            lq,
            c: -c,
            exact,
        },
        Leading::Exp { p, lq, c, k, exact } => Leading::Exp {
            p,
            lq,
            c,
            k: -k,
            exact,
        },
        Leading::Hyper { grow, sign } => Leading::Hyper { grow, sign: -sign },
        Leading::Unknown => Leading::Unknown,
    }
}

/// Compare exponent scales `c1 |n|^p1 ln^lq1` vs `c2 |n|^p2 ln^lq2` by
/// their eventual values as n -> infinity.
fn exp_scale_cmp(
    p1: Rational,
    lq1: Rational,
    c1: f64,
    p2: Rational,
    lq2: Rational,
    c2: f64,
) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    debug_assert!(c1 != 0.0 && c2 != 0.0);
    match (c1 > 0.0, c2 > 0.0) {
        (true, false) => Greater,
        (false, true) => Less,
        (true, true) => match (p1, lq1).cmp(&(p2, lq2)) {
            Equal => c1.partial_cmp(&c2).unwrap_or(Equal),
            ord => ord,
        },
        (false, false) => match (p2, lq2).cmp(&(p1, lq1)) {
            Equal => c1.partial_cmp(&c2).unwrap_or(Equal),
            ord => ord,
        },
    }
}

fn add(a: Leading, b: Leading) -> Leading {
    use Leading::*;
    match (a, b) {
        (Zero, x) | (x, Zero) => x,
        (Unknown, _) | (_, Unknown) => Unknown,

        (
            Hyper {
                grow: true,
                sign: s1,
            },
            Hyper {
                grow: true,
                sign: s2,
            },
        ) => {
            if s1 == s2 && s1 != 0.0 {
                Hyper {
                    grow: true,
                    sign: s1,
                }
            } else {
                Unknown
            }
        }
        (h @ Hyper { grow: true, .. }, _) | (_, h @ Hyper { grow: true, .. }) => h,
        (
            Hyper {
                grow: false,
                sign: s1,
            },
            Hyper {
                grow: false,
                sign: s2,
            },
        ) => Hyper {
            grow: false,
            sign: if s1 == s2 { s1 } else { 0.0 },
        },
        (Hyper { grow: false, .. }, x) | (x, Hyper { grow: false, .. }) => clear_literal_exact(x),

        (
            Exp {
                p: p1,
                lq: q1,
                c: c1,
                k: k1,
                exact: e1,
            },
            Exp {
                p: p2,
                lq: q2,
                c: c2,
                k: k2,
                exact: e2,
            },
        ) => {
            if (p1, q1, c1) == (p2, q2, c2) {
                if e1 && e2 {
                    let k = k1 + k2;
                    if k == 0.0 {
                        // tight means (1 + o(1)) factors: equal-and-opposite
                        // leading terms leave an unknown remainder
                        Unknown
                    } else {
                        Exp {
                            p: p1,
                            lq: q1,
                            c: c1,
                            k,
                            exact: true,
                        }
                    }
                } else if c1 > 0.0 {
                    if k1.signum() == k2.signum() && k1 != 0.0 {
                        Exp {
                            p: p1,
                            lq: q1,
                            c: c1,
                            k: k1.signum(),
                            exact: false,
                        }
                    } else {
                        Unknown
                    }
                } else {
                    Exp {
                        p: p1,
                        lq: q1,
                        c: c1,
                        k: if k1.signum() == k2.signum() {
                            k1.signum()
                        } else {
                            0.0
                        },
                        exact: false,
                    }
                }
            } else {
                // strictly separated exponent scales: the dominant term
                // absorbs the other inside its own (1 + o(1)) factor, so
                // tightness survives
                match exp_scale_cmp(p1, q1, c1, p2, q2, c2) {
                    std::cmp::Ordering::Greater => Exp {
                        p: p1,
                        lq: q1,
                        c: c1,
                        k: k1,
                        exact: e1,
                    },
                    std::cmp::Ordering::Less => Exp {
                        p: p2,
                        lq: q2,
                        c: c2,
                        k: k2,
                        exact: e2,
                    },
                    std::cmp::Ordering::Equal => Unknown,
                }
            }
        }
        (e @ Exp { c, .. }, pw @ Pow { .. }) | (pw @ Pow { .. }, e @ Exp { c, .. }) => {
            if c > 0.0 {
                // polynomially bounded terms vanish inside the (1 + o(1))
                // of a growing exponential
                e
            } else {
                clear_literal_exact(pw)
            }
        }

        (
            Pow {
                p: p1,
                lq: q1,
                c: c1,
                exact: e1,
            },
            Pow {
                p: p2,
                lq: q2,
                c: c2,
                exact: e2,
            },
        ) => match (p1, q1).cmp(&(p2, q2)) {
            std::cmp::Ordering::Greater => Pow {
                p: p1,
                lq: q1,
                c: c1,
                exact: false,
            },
            std::cmp::Ordering::Less => Pow {
                p: p2,
                lq: q2,
                c: c2,
                exact: false,
            },
            std::cmp::Ordering::Equal => {
                let c = c1 + c2;
                if e1 && e2 {
                    if c == 0.0 {
                        Zero
                    } else {
                        Pow {
                            p: p1,
                            lq: q1,
                            c,
                            exact: true,
                        }
                    }
                } else if c.abs() <= CANCEL_EPS * (c1.abs() + c2.abs()) {
                    Unknown
                } else {
                    Pow {
                        p: p1,
                        lq: q1,
                        c,
                        exact: false,
                    }
                }
            }
        },
    }
}

fn is_pure_const(l: Leading) -> Option<(f64, bool)> {
    match l {
        Leading::Pow { p, lq, c, exact } if p == r0() && lq == r0() => Some((c, exact)),
        _ => None,
    }
}

fn mul(a: Leading, b: Leading) -> Leading {
    use Leading::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Zero,
        (Unknown, _) | (_, Unknown) => Unknown,

        (
            Pow {
                p: p1,
                lq: q1,
                c: c1,
                exact: e1,
            },
            Pow {
                p: p2,
                lq: q2,
                c: c2,
                exact: e2,
            },
        ) => Pow {
            p: p1 + p2,
            lq: q1 + q2,
            c: c1 * c2,
            exact: e1 && e2,
        },

        (pw @ Pow { .. }, ex @ Exp { .. }) | (ex @ Exp { .. }, pw @ Pow { .. }) => {
            let Exp { p, lq, c, k, exact } = ex else {
                unreachable!()
            };
            // a pure constant factor keeps the representation exact;
            // genuine polynomial factors are absorbed inexactly
            if let Some((cc, ce)) = is_pure_const(pw) {
                Exp {
                    p,
                    lq,
                    c,
                    k: k * cc,
                    exact: exact && ce,
                }
            } else {
                let csign = match pw {
                    Pow { c, .. } => c.signum(),
                    _ => unreachable!(),
                };
                Exp {
                    p,
                    lq,
                    c,
                    k: k.signum() * csign,
                    exact: false,
                }
            }
        }
        (
            Exp {
                p: p1,
                lq: q1,
                c: c1,
                k: k1,
                exact: e1,
            },
            Exp {
                p: p2,
                lq: q2,
                c: c2,
                k: k2,
                exact: e2,
            },
        ) => {
            let k = if e1 && e2 { k1 * k2 } else { (k1 * k2).signum() };
            if (p1, q1) == (p2, q2) {
                let c = c1 + c2;
                if e1 && e2 {
                    if c == 0.0 {
                        // tight scales cancel exactly: the product tends to
                        // the constant k1 k2
                        if k == 0.0 {
                            Unknown
                        } else {
                            Pow {
                                p: r0(),
                                lq: r0(),
                                c: k,
                                exact: false,
                            }
                        }
                    } else {
                        Exp {
                            p: p1,
                            lq: q1,
                            c,
                            k,
                            exact: true,
                        }
                    }
                } else if c.abs() <= CANCEL_EPS * (c1.abs() + c2.abs()) {
                    Unknown
                } else {
                    Exp {
                        p: p1,
                        lq: q1,
                        c,
                        k,
                        exact: false,
                    }
                }
            } else if (p1, q1) > (p2, q2) {
                Exp {
                    p: p1,
                    lq: q1,
                    c: c1,
                    k,
                    exact: false,
                }
            } else {
                Exp {
                    p: p2,
                    lq: q2,
                    c: c2,
                    k,
                    exact: false,
                }
            }
        }

        (Hyper { grow: g1, sign: s1 }, Hyper { grow: g2, sign: s2 }) => {
            if g1 == g2 {
                Hyper {
                    grow: g1,
                    sign: s1 * s2,
                }
            } else {
                Unknown
            }
        }
        (Hyper { grow, sign }, Pow { c, .. }) | (Pow { c, .. }, Hyper { grow, sign }) => Hyper {
            grow,
            sign: sign * c.signum(),
        },
        (Hyper { grow, sign: s1 }, Exp { c, k, .. }) | (Exp { c, k, .. }, Hyper { grow, sign: s1 }) => {
            if grow == (c > 0.0) {
                Hyper {
                    grow,
                    sign: s1 * k.signum(),
                }
            } else {
                Unknown
            }
        }
    }
}

fn recip(a: Leading) -> Leading {
    use Leading::*;
    match a {
        Zero => Unknown,
        Unknown => Unknown,
        Pow { p, lq, c, exact } => Pow {
            p: -p,
            lq: -lq,
            c: 1.0 / c,
            exact,
        },
        Exp { p, lq, c, k, exact } => Exp {
            p,
            lq,
            c: -c,
            k: if exact { 1.0 / k } else { k.signum() },
            exact,
        },
        Hyper { grow, sign } => Hyper { grow: !grow, sign },
    }
}

fn pow_rat(a: Leading, r: Rational) -> Leading {
    use Leading::*;
    if r == r0() {
        return Pow {
            p: r0(),
            lq: r0(),
            c: 1.0,
            exact: true,
        };
    }
    let rf = r.to_f64().unwrap();
    let int_exp = r.is_integer();
    let even_int = int_exp && r.numer() % 2 == 0;
    let coeff_pow = |c: f64| -> Option<f64> {
        if c > 0.0 {
            Some(c.powf(rf))
        } else if int_exp {
            Some(c.powi(*r.numer() as i32))
        } else {
            None
        }
    };
    match a {
        Zero => {
            if rf > 0.0 {
                Zero
            } else {
                Unknown
            }
        }
        Unknown => Unknown,
        Pow { p, lq, c, exact } => match coeff_pow(c) {
            Some(c2) => Pow {
                p: p * r,
                lq: lq * r,
                c: c2,
                exact,
            },
            None => Unknown,
        },
        Exp { p, lq, c, k, exact } => {
            let k2 = if exact {
                match coeff_pow(k) {
                    Some(v) => v,
                    None => return Unknown,
                }
            } else if k > 0.0 || even_int {
                1.0
            } else if int_exp && k != 0.0 {
                k.signum()
            } else {
                return Unknown;
            };
            Exp {
                p,
                lq,
                c: c * rf,
                k: k2,
                exact,
            }
        }
        Hyper { grow, sign } => {
            let s2 = if sign > 0.0 || even_int {
                1.0
            } else if int_exp && sign != 0.0 {
                sign
            } else {
                return Unknown;
            };
            Hyper {
                grow: if rf > 0.0 { grow } else { !grow },
                sign: s2,
            }
        }
    }
}

fn exp_of(a: Leading) -> Leading {
    use Leading::*;
    match a {
        Zero => Pow {
            p: r0(),
            lq: r0(),
            c: 1.0,
            exact: true,
        },
        Unknown => Unknown,
        Pow { p, lq, c, exact } => {
            if p > r0() || (p == r0() && lq > r1()) {
                Exp {
                    p,
                    lq,
                    c,
                    k: 1.0,
                    exact,
                }
            } else if p == r0() && lq == r1() {
                // argument ~ c ln n: e^arg is n^c up to unknown sub-power
                // corrections
                Unknown
            } else if p == r0() && lq == r0() {
                Pow {
                    p: r0(),
                    lq: r0(),
                    c: c.exp(),
                    exact,
                }
            } else {
                // argument -> 0
                Pow {
                    p: r0(),
                    lq: r0(),
                    c: 1.0,
                    exact: false,
                }
            }
        }
        Exp { c, k, .. } => {
            if c > 0.0 {
                if k > 0.0 {
                    Hyper {
                        grow: true,
                        sign: 1.0,
                    }
                } else if k < 0.0 {
                    Hyper {
                        grow: false,
                        sign: 1.0,
                    }
                } else {
                    Unknown
                }
            } else {
                Pow {
                    p: r0(),
                    lq: r0(),
                    c: 1.0,
                    exact: false,
                }
            }
        }
        Hyper { grow: true, sign } => {
            if sign > 0.0 {
                Hyper {
                    grow: true,
                    sign: 1.0,
                }
            } else if sign < 0.0 {
                Hyper {
                    grow: false,
                    sign: 1.0,
                }
            } else {
                Unknown
            }
        }
        Hyper { grow: false, .. } => Pow {
            p: r0(),
            lq: r0(),
            c: 1.0,
            exact: false,
        },
    }
}

fn log1p_of(a: Leading) -> Leading {
    use Leading::*;
    match a {
        Zero => Zero,
        Unknown => Unknown,
        Pow { p, lq, c, .. } => {
            if p > r0() {
                if c > 0.0 {
                    Pow {
                        p: r0(),
                        lq: r1(),
                        c: p.to_f64().unwrap(),
                        exact: false,
                    }
                } else {
                    Unknown
                }
            } else if p == r0() && lq > r0() {
                Unknown
            } else if p == r0() && lq == r0() {
                if c > -1.0 && c.ln_1p() != 0.0 {
                    Pow {
                        p: r0(),
                        lq: r0(),
                        c: c.ln_1p(),
                        exact: false,
                    }
                } else {
                    Unknown
                }
            } else {
                // argument -> 0: log1p(x) ~ x
                Pow {
                    p,
                    lq,
                    c,
                    exact: false,
                }
            }
        }
        Exp { p, lq, c, k, .. } => {
            if c > 0.0 {
                if k > 0.0 {
                    // ln(1 + k e^h) ~ h
                    Pow {
                        p,
                        lq,
                        c,
                        exact: false,
                    }
                } else {
                    Unknown
                }
            } else {
                Exp {
                    p,
                    lq,
                    c,
                    k: k.signum(),
                    exact: false,
                }
            }
        }
        Hyper { grow: false, sign } => Hyper { grow: false, sign },
        Hyper { grow: true, .. } => Unknown,
    }
}

// ---- public projection --------------------------------------------------

fn is_bounded(l: Leading) -> bool {
    match l {
        Leading::Zero => true,
        Leading::Pow { p, lq, .. } => p < r0() || (p == r0() && lq <= r0()),
        Leading::Exp { c, .. } => c < 0.0,
        Leading::Hyper { grow, .. } => !grow,
        Leading::Unknown => false,
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn project(e: &Ends) -> AsymptoticClass {
    let [pe, po, ne, no] = e.all();

    // Single power law: same exponent on all ends, no log factor,
    // direction-consistent coefficients within each parity class. The
    // per-parity constants may differ; an exact sign flip between the
    // parities is reported as Alternating.
    if let (
        Leading::Pow {
            p, lq: q1, c: c1, ..
        },
        Leading::Pow {
            p: p2,
            lq: q2,
            c: c2,
            ..
        },
        Leading::Pow {
            p: p3,
            lq: q3,
            c: c3,
            ..
        },
        Leading::Pow {
            p: p4,
            lq: q4,
            c: c4,
            ..
        },
    ) = (pe, po, ne, no)
    {
        let same_p = p == p2 && p == p3 && p == p4;
        let no_logs = [q1, q2, q3, q4].iter().all(|q| *q == r0());
        if same_p && no_logs && close(c1, c3) && close(c2, c4) {
            if close(c1, -c2) {
                return AsymptoticClass::Alternating(Box::new(AsymptoticClass::PowerLaw(p)));
            }
            return AsymptoticClass::PowerLaw(p);
        }
    }

    let growing = |l: Leading| {
        matches!(l, Leading::Exp { c, .. } if c > 0.0)
            || matches!(l, Leading::Hyper { grow: true, .. })
    };
    if e.all().into_iter().all(growing) {
        return AsymptoticClass::ExpGrowth;
    }
    let exp_decaying = |l: Leading| {
        matches!(l, Leading::Zero)
            || matches!(l, Leading::Exp { c, .. } if c < 0.0)
            || matches!(l, Leading::Hyper { grow: false, .. })
    };
    if e.all().into_iter().all(exp_decaying) {
        let sign_of = |l: Leading| match l {
            Leading::Exp { k, .. } => k.signum(),
            Leading::Hyper { sign, .. } => sign,
            _ => 0.0,
        };
        let (s1, s2, s3, s4) = (sign_of(pe), sign_of(po), sign_of(ne), sign_of(no));
        if s1 != 0.0 && s1 == -s2 && s1 == s3 && s2 == s4 {
            return AsymptoticClass::Alternating(Box::new(AsymptoticClass::ExpDecay));
        }
        return AsymptoticClass::ExpDecay;
    }
    if e.all().into_iter().all(is_bounded) {
        return AsymptoticClass::Bounded;
    }
    AsymptoticClass::Unknown
}
