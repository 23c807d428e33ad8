//! Exact inner products of generator words via Gaussian moment calculus.
//!
//! Functionals built from coordinates `x_{kn}` and the lowering operators
//! `D_{kn} = d/dx_{kn} - b_{kn}(x_{kn} - a_{kn})` applied to the constant
//! function 1 are polynomials in the centered coordinates
//! `y_{kn} = x_{kn} - a_{kn}`. Their L^2(mu) inner products reduce to
//! products of one-dimensional central moments `E[y^2] = 1/(2b)`,
//! `E[y^4] = 3/(4b^2)`, odd moments 0.

use super::IrredError;
use crate::series::MeasureFamilySpec;
use std::collections::BTreeMap;

type VarId = (usize, i64);
type Monomial = BTreeMap<VarId, u32>;

/// Polynomial in centered coordinates.
#[derive(Debug, Clone, Default)]
pub(super) struct Poly {
    terms: Vec<(f64, Monomial)>,
}

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly {
            terms: vec![(c, Monomial::new())],
        }
    }

    fn normalize(mut self) -> Self {
        let mut map: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (c, m) in self.terms.drain(..) {
            *map.entry(m).or_insert(0.0) += c;
        }
        Poly {
            terms: map
                .into_iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(m, c)| (c, m))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly { terms }.normalize()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::new();
        for (c1, m1) in &self.terms {
            for (c2, m2) in &other.terms {
                let mut m = m1.clone();
                for (v, p) in m2 {
                    *m.entry(*v).or_insert(0) += p;
                }
                terms.push((c1 * c2, m));
            }
        }
        Poly { terms }.normalize()
    }

    /// Multiply by the centered coordinate `y_v`.
    pub fn mul_var(&self, v: VarId) -> Poly {
        let mut terms = self.terms.clone();
        for (_, m) in &mut terms {
            *m.entry(v).or_insert(0) += 1;
        }
        Poly { terms }
    }

    /// Multiply by the raw coordinate `x_v = y_v + a_v`.
    pub fn mul_coord(&self, v: VarId, a: f64) -> Poly {
        let shifted = Poly {
            terms: self
                .terms
                .iter()
                .map(|(c, m)| (c * a, m.clone()))
                .collect(),
        };
        self.mul_var(v).add(&shifted).normalize()
    }

    /// Apply `D_v = d/dy_v - b y_v`.
    pub fn apply_d(&self, v: VarId, b: f64) -> Poly {
        let mut out = Vec::new();
        for (c, m) in &self.terms {
            // derivative part
            if let Some(&p) = m.get(&v) {
                if p > 0 {
                    let mut dm = m.clone();
                    if p == 1 {
                        dm.remove(&v);
                    } else {
                        dm.insert(v, p - 1);
                    }
                    out.push((c * p as f64, dm));
                }
            }
            // -b y part
            let mut bm = m.clone();
            *bm.entry(v).or_insert(0) += 1;
            out.push((-b * c, bm));
        }
        Poly { terms: out }.normalize()
    }

    /// Expectation under the product Gaussian with precisions from `spec`.
    pub fn expectation(&self, spec: &MeasureFamilySpec) -> Result<f64, IrredError> {
        let mut total = 0.0;
        'terms: for (c, m) in &self.terms {
            let mut factor = *c;
            for ((row, idx), p) in m {
                if p % 2 == 1 {
                    continue 'terms;
                }
                let b = spec.b_row(*row).eval(*idx).map_err(crate::series::SeriesError::from)?;
                factor *= central_even_moment(*p, b);
            }
            total += factor;
        }
        Ok(total)
    }
}

/// `E[y^p]` for even `p`: `(p-1)!! / (2b)^{p/2}`.
fn central_even_moment(p: u32, b: f64) -> f64 {
    let half = p / 2;
    let mut double_fact = 1.0;
    let mut k = p as i64 - 1;
    while k > 1 {
        double_fact *= k as f64;
        k -= 2;
    }
    double_fact / (2.0 * b).powi(half as i32)
}
