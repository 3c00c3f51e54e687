//! Thin layer over `faer`: sparse assembly, dense generalized symmetric
//! eigenproblems, and shift-invert subspace iteration for the low end of a
//! sparse spectrum.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::matmul::sparse_dense_matmul;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Accum, Mat, MatRef, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type SparseMat = SparseColMat<usize, f64>;

/// Largest DOF count handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 3000;

/// Accumulates `(row, col, value)` entries; duplicates are summed on build.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.entries.push(Triplet::new(i, j, v));
        }
    }

    /// Adds `s * a b^T` restricted to the listed indices.
    pub fn push_outer(&mut self, idx: &[usize], a: &[f64], b: &[f64], s: f64) {
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                self.push(i, j, s * a[p] * b[q]);
            }
        }
    }

    pub fn build(&self) -> Result<SparseMat> {
        SparseMat::try_new_from_triplets(self.n, self.n, &self.entries)
            .map_err(|e| Error::SolverFailure(format!("sparse assembly: {e:?}")))
    }
}

pub fn spmm(a: &SparseMat, x: MatRef<'_, f64>) -> Mat<f64> {
    let mut out = Mat::zeros(a.nrows(), x.ncols());
    sparse_dense_matmul(out.as_mut(), Accum::Replace, a.as_ref(), x, 1.0, Par::Seq);
    out
}

pub fn spmv(a: &SparseMat, x: &[f64]) -> Vec<f64> {
    let xm = MatRef::from_column_major_slice(x, x.len(), 1);
    let y = spmm(a, xm);
    (0..a.nrows()).map(|i| y[(i, 0)]).collect()
}

pub fn quadratic(a: &SparseMat, x: &[f64]) -> f64 {
    spmv(a, x).iter().zip(x).map(|(a, b)| a * b).sum()
}

pub fn to_dense(a: &SparseMat) -> Mat<f64> {
    a.to_dense()
}

/// Maximum absolute row sum: an upper bound on the spectral radius.
pub fn gershgorin_bound(a: &SparseMat) -> f64 {
    let mut rows = vec![0.0; a.nrows()];
    let r = a.as_ref();
    for j in 0..a.ncols() {
        for (i, v) in r.row_idx_of_col(j).zip(r.val_of_col(j)) {
            rows[i] += v.abs();
        }
    }
    rows.into_iter().fold(0.0, f64::max)
}

/// Eigenpairs sorted by ascending eigenvalue; vectors are M-orthonormal
/// columns.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

fn sym(m: MatRef<'_, f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Solves `Q x = mu M x` for symmetric `Q` and symmetric positive definite `M`.
pub fn generalized_eigen_dense(q: MatRef<'_, f64>, m: MatRef<'_, f64>) -> Result<EigenPairs> {
    let n = q.nrows();
    if n == 0 {
        return Ok(EigenPairs { values: vec![], vectors: Mat::zeros(0, 0) });
    }
    let llt = sym(m)
        .llt(Side::Lower)
        .map_err(|e| Error::SolverFailure(format!("mass matrix is not positive definite: {e:?}")))?;
    let l = llt.L();
    // C = L^-1 Q L^-T
    let mut t = sym(q);
    l.solve_lower_triangular_in_place(t.as_mut());
    let mut c = t.transpose().to_owned();
    l.solve_lower_triangular_in_place(c.as_mut());
    let evd = sym(c.as_ref())
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::SolverFailure(format!("dense eigensolver: {e:?}")))?;
    let mut x = evd.U().to_owned();
    l.transpose().solve_upper_triangular_in_place(x.as_mut());
    let s = evd.S().column_vector();
    Ok(EigenPairs { values: (0..n).map(|i| s[i]).collect(), vectors: x })
}

/// Dense generalized problem with a diagonal mass matrix.
pub fn generalized_eigen_diag(q: MatRef<'_, f64>, m: &[f64]) -> Result<EigenPairs> {
    let n = q.nrows();
    if m.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::SolverFailure("mass matrix is not positive definite".into()));
    }
    let s: Vec<f64> = m.iter().map(|x| 1.0 / x.sqrt()).collect();
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (q[(i, j)] + q[(j, i)]) * s[i] * s[j]);
    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::SolverFailure(format!("dense eigensolver: {e:?}")))?;
    let u = evd.U();
    let vals = evd.S().column_vector();
    Ok(EigenPairs {
        values: (0..n).map(|i| vals[i]).collect(),
        vectors: Mat::from_fn(n, n, |i, j| u[(i, j)] * s[i]),
    })
}

#[derive(Clone, Debug)]
pub struct SubspaceOptions {
    pub block: usize,
    pub min_iter: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self { block: 8, min_iter: 3, max_iter: 300, tol: 1e-10, seed: 0x5eed }
    }
}

/// Rayleigh-Ritz of `(K, diag(m))` on the column span of `y`.
fn rayleigh_ritz(k: &SparseMat, m: &[f64], y: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let ky = spmm(k, y);
    let p = y.ncols();
    let my = Mat::from_fn(y.nrows(), p, |r, j| m[r] * y[(r, j)]);
    let kr = y.transpose() * &ky;
    let mr = y.transpose() * &my;
    // drop numerically dependent directions before the small solve
    let evd = sym(mr.as_ref())
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::SolverFailure(format!("{e:?}")))?;
    let mv = evd.S().column_vector();
    let top = (0..p).map(|i| mv[i]).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..p).filter(|&i| mv[i] > 1e-12 * top).collect();
    let basis = Mat::from_fn(p, keep.len(), |i, j| evd.U()[(i, keep[j])] / mv[keep[j]].sqrt());
    let kred = basis.transpose() * &kr * &basis;
    let ev = sym(kred.as_ref())
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::SolverFailure(format!("{e:?}")))?;
    let vals = ev.S().column_vector();
    let coeffs = &basis * ev.U();
    let x = y * &coeffs;
    Ok(((0..keep.len()).map(|i| vals[i]).collect(), x))
}

/// Lowest eigenpairs of `K x = mu diag(m) x` by block inverse iteration on
/// `(K + shift M)`, which must be positive definite. The first `nev` Ritz
/// pairs are iterated to relative residual `tol`; `augment` columns are
/// added to the final Rayleigh-Ritz space, so Ritz counts below any
/// threshold are at least those of the augmenting span.
pub fn shift_invert_lowest(
    k: &SparseMat,
    m: &[f64],
    shift: f64,
    nev: usize,
    opts: &SubspaceOptions,
    augment: Option<MatRef<'_, f64>>,
) -> Result<EigenPairs> {
    let n = k.nrows();
    let p = opts.block.max(nev).min(n);
    let mut shifted = TripletBuilder::new(n);
    let kr = k.as_ref();
    for j in 0..n {
        for (i, v) in kr.row_idx_of_col(j).zip(kr.val_of_col(j)) {
            shifted.push(i, j, *v);
        }
        shifted.push(j, j, shift * m[j]);
    }
    let llt = shifted
        .build()?
        .sp_cholesky(Side::Lower)
        .map_err(|_| Error::NotDefinite(shift))?;
    let scale = gershgorin_bound(k).max(f64::MIN_POSITIVE);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = Mat::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
    let mut vals = vec![];
    for it in 0..opts.max_iter {
        let mx = Mat::from_fn(n, x.ncols(), |i, j| m[i] * x[(i, j)]);
        let y = llt.solve(&mx);
        let (v, xn) = rayleigh_ritz(k, m, y.as_ref())?;

        x = xn;
        vals = v;
        if x.ncols() < nev {
            return Err(Error::SolverFailure("subspace collapsed".into()));
        }
        let kx = spmm(k, x.as_ref());
        let worst = (0..nev)
            .map(|j| {
                let mut r2 = 0.0;
                let mut x2 = 0.0;
                for i in 0..n {
                    let r = kx[(i, j)] - vals[j] * m[i] * x[(i, j)];
                    r2 += r * r;
                    x2 += x[(i, j)] * x[(i, j)];
                }
                (r2 / x2).sqrt() / scale
            })
            .fold(0.0, f64::max);
        if worst < opts.tol && it + 1 >= opts.min_iter {
            if let Some(a) = augment {
                let joined = Mat::from_fn(n, x.ncols() + a.ncols(), |i, j| {
                    if j < x.ncols() {
                        x[(i, j)]
                    } else {
                        a[(i, j - x.ncols())]
                    }
                });
                let (v, xa) = rayleigh_ritz(k, m, joined.as_ref())?;
                return Ok(EigenPairs { values: v, vectors: xa });
            }
            return Ok(EigenPairs { values: vals, vectors: x });
        }
    }
    Err(Error::SolverFailure(format!(
        "subspace iteration did not converge in {} steps (lowest Ritz values {:?})",
        opts.max_iter,
        &vals[..nev.min(vals.len())]
    )))
}
