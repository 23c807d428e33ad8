//! Exact finite-dimensional commutant laboratory.
//!
//! The commutant of a matrix set `{T_g}` is the nullspace of the stacked
//! Sylvester operators `B -> B T_g - T_g B` on the d^2-dimensional space
//! of matrices; ranks and nullspaces are decided by SVD with a relative
//! singular-value threshold. The lab replays three exact computations:
//! the three-point coset action of the symmetric group on three letters
//! (a reducible permutation representation whose commutant is
//! two-dimensional while the permutation centralizer is trivial), the
//! commutation theorem for regular representations of small finite
//! groups, and Schur-Weyl double-commutant dimensions on tiny tensor
//! powers.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CommlabError {
    #[error("invalid group table: {reason}")]
    InvalidGroupTable { reason: String },
    #[error("dimension {dim} exceeds the supported bound {bound}")]
    SizeLimitExceeded { dim: usize, bound: usize },
    #[error("generator {index} is not invertible")]
    SingularGenerator { index: usize },
    #[error("element list not closed under products")]
    NotClosed,
}

/// Relative singular-value threshold for rank/nullspace decisions.
const SVD_RTOL: f64 = 1e-8;

/// A finite-dimensional real representation given by generator matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRep {
    dim: usize,
    generators: Vec<DMatrix<f64>>,
    elements: Option<Vec<DMatrix<f64>>>,
}

impl FiniteRep {
    pub fn new(generators: Vec<DMatrix<f64>>) -> Result<Self, CommlabError> {
        let dim = generators
            .first()
            .map(|g| g.nrows())
            .ok_or(CommlabError::InvalidGroupTable {
                reason: "no generators".into(),
            })?;
        for (i, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(CommlabError::InvalidGroupTable {
                    reason: format!("generator {i} is not {dim}x{dim}"),
                });
            }
            if !g.clone().lu().is_invertible() {
                return Err(CommlabError::SingularGenerator { index: i });
            }
        }
        Ok(FiniteRep {
            dim,
            generators,
            elements: None,
        })
    }

    /// Attach the full element list; it must be closed under products to
    /// within 1e-10 (each product matches some listed element).
    pub fn with_elements(mut self, elements: Vec<DMatrix<f64>>) -> Result<Self, CommlabError> {
        let close = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a - b).amax() <= 1e-10;
        for x in &elements {
            for y in &elements {
                let prod = x * y;
                if !elements.iter().any(|e| close(e, &prod)) {
                    return Err(CommlabError::NotClosed);
                }
            }
        }
        self.elements = Some(elements);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }
}

/// Basis of `{B : B T_g = T_g B for all generators}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantBasis {
    pub basis: Vec<DMatrix<f64>>,
    pub dim: usize,
}

/// Nullspace of a stacked linear operator (at least as many rows as
/// columns), via SVD.
fn nullspace(op: &DMatrix<f64>) -> Vec<DVector<f64>> {
    debug_assert!(op.nrows() >= op.ncols());
    let svd = op.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = SVD_RTOL * max_sv.max(1e-300);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    (rank..v_t.nrows()).map(|i| v_t.row(i).transpose()).collect()
}

fn rank_of(op: &DMatrix<f64>) -> usize {
    let svd = op.clone().svd(false, false);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let tol = SVD_RTOL * max_sv.max(1e-300);
    svd.singular_values.iter().filter(|s| **s > tol).count()
}

/// Column-major vectorization stack of the Sylvester maps
/// `B -> B T - T B` for every `T` in `mats`.
fn sylvester_stack(mats: &[DMatrix<f64>], d: usize) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(d, d);
    let mut rows = Vec::with_capacity(mats.len());
    for t in mats {
        // vec(B T) = (T^T (x) I) vec B, vec(T B) = (I (x) T) vec B
        let m = t.transpose().kronecker(&id) - id.kronecker(t);
        rows.push(m);
    }
    let total = d * d * mats.len();
    let mut stacked = DMatrix::<f64>::zeros(total, d * d);
    for (i, m) in rows.iter().enumerate() {
        stacked.view_mut((i * d * d, 0), (d * d, d * d)).copy_from(m);
    }
    stacked
}

/// Commutant of the generator set, solved as one linear system in the
/// d^2 matrix entries.
pub fn commutant_basis(rep: &FiniteRep) -> Result<CommutantBasis, CommlabError> {
    let d = rep.dim();
    if d > 64 {
        return Err(CommlabError::SizeLimitExceeded { dim: d, bound: 64 });
    }
    let stacked = sylvester_stack(rep.generators(), d);
    let basis: Vec<DMatrix<f64>> = nullspace(&stacked)
        .into_iter()
        .map(|v| DMatrix::from_column_slice(d, d, v.as_slice()))
        .collect();
    Ok(CommutantBasis {
        dim: basis.len(),
        basis,
    })
}

/// Dimension of the span of a matrix list (as vectors in R^{d^2}).
pub fn span_dim(mats: &[DMatrix<f64>]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let d2 = mats[0].nrows() * mats[0].ncols();
    let mut stack = DMatrix::<f64>::zeros(mats.len(), d2);
    for (i, m) in mats.iter().enumerate() {
        for (j, v) in m.iter().enumerate() {
            stack[(i, j)] = *v;
        }
    }
    rank_of(&stack)
}

/// Incremental orthonormal span tracker (Gram-Schmidt with
/// reorthogonalization) for vectorized matrices.
struct SpanAccumulator {
    basis: Vec<DVector<f64>>,
}

impl SpanAccumulator {
    fn new() -> Self {
        SpanAccumulator { basis: Vec::new() }
    }

    /// Insert if the matrix carries a new direction; returns whether the
    /// span grew.
    fn try_insert(&mut self, mat: &DMatrix<f64>) -> bool {
        let mut v = DVector::from_column_slice(mat.as_slice());
        let norm0 = v.norm();
        if norm0 == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for b in &self.basis {
                let coef = v.dot(b);
                v.axpy(-coef, b, 1.0);
            }
        }
        let residual = v.norm();
        if residual > 1e-9 * norm0 {
            self.basis.push(v / residual);
            true
        } else {
            false
        }
    }
}

/// Span of the unital algebra generated by a matrix list: breadth-first
/// closure under right multiplication by the generators.
pub fn algebra_span(mats: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let Some(first) = mats.first() else {
        return Vec::new();
    };
    let d = first.nrows();
    let mut acc = SpanAccumulator::new();
    let mut basis_mats: Vec<DMatrix<f64>> = Vec::new();
    let mut frontier: Vec<DMatrix<f64>> = vec![DMatrix::identity(d, d)];
    frontier.extend(mats.iter().cloned());
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for mat in frontier {
            if acc.try_insert(&mat) {
                for g in mats {
                    next.push(&mat * g);
                }
                basis_mats.push(mat);
            }
        }
        frontier = next;
    }
    basis_mats
}

// ---- the three-letter coset example ---------------------------------------

/// Report on the coset action of the symmetric group on three letters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosetExampleReport {
    pub t_sigma1: Vec<Vec<f64>>,
    pub t_sigma2: Vec<Vec<f64>>,
    pub involutions_ok: bool,
    pub braid_ok: bool,
    pub invariant_vector_ok: bool,
    pub commutant_dim: usize,
    /// Permutation matrices commuting with both generators (should be
    /// just the identity: the permutation centralizer is trivial even
    /// though the commutant is 2-dimensional).
    pub permutation_centralizer_size: usize,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// The coset permutation action: x0 is fixed by the first transposition
/// and swapped with x1 by the second; x1, x2 swap under the first.
pub fn s3_coset_example() -> Result<CosetExampleReport, CommlabError> {
    let t1 = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    let t2 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let id = DMatrix::<f64>::identity(3, 3);

    let involutions_ok = (&t1 * &t1 - &id).amax() == 0.0 && (&t2 * &t2 - &id).amax() == 0.0;
    let braid_ok = (&t1 * &t2 * &t1 - &t2 * &t1 * &t2).amax() == 0.0;

    let ones = DVector::from_element(3, 1.0);
    let invariant_vector_ok = (&t1 * &ones - &ones).amax() == 0.0 && (&t2 * &ones - &ones).amax() == 0.0;

    let rep = FiniteRep::new(vec![t1.clone(), t2.clone()])?;
    let commutant = commutant_basis(&rep)?;

    // all six 3x3 permutation matrices
    let mut centralizer = 0usize;
    let perms = [
        [0usize, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for p in perms {
        let mut pm = DMatrix::<f64>::zeros(3, 3);
        for (j, &i) in p.iter().enumerate() {
            pm[(i, j)] = 1.0;
        }
        if (&pm * &t1 - &t1 * &pm).amax() <= 1e-10 && (&pm * &t2 - &t2 * &pm).amax() <= 1e-10 {
            centralizer += 1;
        }
    }

    Ok(CosetExampleReport {
        t_sigma1: rows_of(&t1),
        t_sigma2: rows_of(&t2),
        involutions_ok,
        braid_ok,
        invariant_vector_ok,
        commutant_dim: commutant.dim,
        permutation_centralizer_size: centralizer,
    })
}

// ---- regular representations and the commutation theorem ------------------

/// Multiplication table of a finite group: `table[g][h] = g * h` with
/// element 0 the identity.
pub type GroupTable = Vec<Vec<usize>>;

pub fn cyclic_group_table(n: usize) -> GroupTable {
    (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect()
}

/// The symmetric group on three letters, elements enumerated as
/// permutations in one-line notation.
pub fn s3_group_table() -> GroupTable {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
        [1, 2, 0],
        [2, 0, 1],
    ];
    let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
        // (p ∘ q)(i) = p(q(i))
        [p[q[0]], p[q[1]], p[q[2]]]
    };
    let index_of = |r: &[usize; 3]| perms.iter().position(|p| p == r).unwrap();
    perms
        .iter()
        .map(|p| perms.iter().map(|q| index_of(&compose(p, q))).collect())
        .collect()
}

fn validate_group_table(table: &GroupTable) -> Result<(), CommlabError> {
    let n = table.len();
    if n == 0 {
        return Err(CommlabError::InvalidGroupTable {
            reason: "empty table".into(),
        });
    }
    for row in table {
        if row.len() != n || row.iter().any(|v| *v >= n) {
            return Err(CommlabError::InvalidGroupTable {
                reason: "table is not square over 0..n".into(),
            });
        }
    }
    // identity at index 0
    for g in 0..n {
        if table[0][g] != g || table[g][0] != g {
            return Err(CommlabError::InvalidGroupTable {
                reason: "element 0 is not the identity".into(),
            });
        }
    }
    // inverses
    for g in 0..n {
        if !(0..n).any(|h| table[g][h] == 0 && table[h][g] == 0) {
            return Err(CommlabError::InvalidGroupTable {
                reason: format!("element {g} has no inverse"),
            });
        }
    }
    // associativity
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                if table[table[g][h]][k] != table[g][table[h][k]] {
                    return Err(CommlabError::InvalidGroupTable {
                        reason: "not associative".into(),
                    });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DixmierReport {
    pub order: usize,
    /// Dimension of the commutant of the right regular representation.
    pub right_commutant_dim: usize,
    /// Dimension of the span of the left translations.
    pub left_span_dim: usize,
    /// Every left translation commutes with every right translation.
    pub left_inside_commutant: bool,
    pub dims_match: bool,
}

/// Commutation-theorem check for a finite group: the commutant of the
/// right regular representation has dimension |G| and is spanned by the
/// left regular representation.
pub fn dixmier_check(table: &GroupTable) -> Result<DixmierReport, CommlabError> {
    validate_group_table(table)?;
    let n = table.len();
    if n > 24 {
        return Err(CommlabError::SizeLimitExceeded { dim: n, bound: 24 });
    }
    let inverse = |g: usize| (0..n).find(|&h| table[g][h] == 0).unwrap();

    // right translation rho_t: e_x -> e_{x t^{-1}}; left lambda_s: e_x -> e_{s x}
    let mut rights = Vec::with_capacity(n);
    let mut lefts = Vec::with_capacity(n);
    for t in 0..n {
        let t_inv = inverse(t);
        let mut rho = DMatrix::<f64>::zeros(n, n);
        let mut lam = DMatrix::<f64>::zeros(n, n);
        for x in 0..n {
            rho[(table[x][t_inv], x)] = 1.0;
            lam[(table[t][x], x)] = 1.0;
        }
        rights.push(rho);
        lefts.push(lam);
    }

    let rep = FiniteRep::new(rights.clone())?;
    let commutant = commutant_basis(&rep)?;
    let left_span = span_dim(&lefts);

    let mut left_inside = true;
    'outer: for lam in &lefts {
        for rho in &rights {
            if (lam * rho - rho * lam).amax() > 1e-10 {
                left_inside = false;
                break 'outer;
            }
        }
    }

    Ok(DixmierReport {
        order: n,
        right_commutant_dim: commutant.dim,
        left_span_dim: left_span,
        left_inside_commutant: left_inside,
        dims_match: commutant.dim == left_span && left_span == n,
    })
}

// ---- Schur-Weyl at tiny scale ----------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurWeylReport {
    pub m: usize,
    pub n: usize,
    pub space_dim: usize,
    /// Dimension of the span of the symmetric-group action.
    pub perm_span_dim: usize,
    /// Dimension of the algebra generated by sampled `g^{(x) n}`.
    pub gl_algebra_dim: usize,
    /// Dimension of the commutant of the GL side.
    pub gl_commutant_dim: usize,
    /// Dimension of the commutant of the permutation side.
    pub perm_commutant_dim: usize,
    /// `gl_commutant_dim == perm_span_dim` and
    /// `perm_commutant_dim == gl_algebra_dim`.
    pub mutual_commutants_ok: bool,
    /// Span unchanged when a fourth generic sample is added.
    pub span_stable: bool,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Matrix of the permutation action on `(R^m)^{(x) n}`: the basis vector
/// with digit string `(i_1..i_n)` maps to the one with the digits moved
/// to the slots the permutation prescribes.
fn perm_action(m: usize, n: usize, sigma: &[usize]) -> DMatrix<f64> {
    let dim = m.pow(n as u32);
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    for idx in 0..dim {
        // digits of idx, slot 0 fastest
        let mut digits = vec![0usize; n];
        let mut rest = idx;
        for d in digits.iter_mut() {
            *d = rest % m;
            rest /= m;
        }
        let mut moved = vec![0usize; n];
        for slot in 0..n {
            moved[sigma[slot]] = digits[slot];
        }
        let mut target = 0usize;
        for slot in (0..n).rev() {
            target = target * m + moved[slot];
        }
        out[(target, idx)] = 1.0;
    }
    out
}

fn kron_power(g: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut out = g.clone();
    for _ in 1..n {
        out = out.kronecker(g);
    }
    out
}

/// Schur-Weyl double-commutant check on `(R^m)^{(x) n}` with
/// `m^n <= 81`. The GL side is sampled by 3 seeded pseudo-random
/// invertible matrices; span stability is verified with a fourth.
pub fn schur_weyl_check(m: usize, n: usize) -> Result<SchurWeylReport, CommlabError> {
    if m < 2 || n < 2 {
        return Err(CommlabError::InvalidGroupTable {
            reason: "need m >= 2 and n >= 2".into(),
        });
    }
    let dim = m
        .checked_pow(n as u32)
        .filter(|d| *d <= 81)
        .ok_or(CommlabError::SizeLimitExceeded {
            dim: m.pow(n as u32),
            bound: 81,
        })?;

    let perms: Vec<DMatrix<f64>> = permutations(n)
        .iter()
        .map(|sigma| perm_action(m, n, sigma))
        .collect();
    let perm_span_dim = span_dim(&perms);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5357);
    let mut samples = Vec::new();
    while samples.len() < 4 {
        let g: DMatrix<f64> = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
        if g.determinant().abs() > 0.1 {
            samples.push(g);
        }
    }
    let powers: Vec<DMatrix<f64>> = samples.iter().map(|g| kron_power(g, n)).collect();

    let gl_algebra = algebra_span(&powers[..3]);
    let gl_algebra_dim = gl_algebra.len();
    let with_fourth = algebra_span(&powers);
    let span_stable = with_fourth.len() == gl_algebra_dim;

    let gl_rep = FiniteRep::new(powers[..3].to_vec())?;
    let gl_commutant_dim = commutant_basis(&gl_rep)?.dim;

    // adjacent transpositions generate the group, so they determine the
    // commutant; this keeps the Sylvester stack small
    let transpositions: Vec<DMatrix<f64>> = (0..n - 1)
        .map(|k| {
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.swap(k, k + 1);
            perm_action(m, n, &sigma)
        })
        .collect();
    let perm_rep = FiniteRep::new(transpositions)?;
    let perm_commutant_dim = commutant_basis(&perm_rep)?.dim;

    Ok(SchurWeylReport {
        m,
        n,
        space_dim: dim,
        perm_span_dim,
        gl_algebra_dim,
        gl_commutant_dim,
        perm_commutant_dim,
        mutual_commutants_ok: gl_commutant_dim == perm_span_dim
            && perm_commutant_dim == gl_algebra_dim,
        span_stable,
    })
}
