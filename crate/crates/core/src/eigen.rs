//! Lowest eigenvalues of symmetric operators.
//!
//! Small problems go to a dense cyclic Jacobi solver. Larger ones use Lanczos
//! with full reorthogonalization and explicit locking: every run works in the
//! orthogonal complement of the vectors locked so far, so exact
//! multiplicities (which a single Krylov sequence cannot resolve) are picked
//! up by later runs. A final run in the complement certifies that nothing
//! below the k-th locked value was missed. Start vectors come from a fixed
//! integer hash, so results are reproducible bit for bit.

use crate::error::EigenError;

/// A symmetric linear operator given only through its action.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Adapts a closure to [`SymmetricOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> SymmetricOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Relative residual at which a Ritz pair counts as converged.
    pub tol: f64,
    /// Maximum Krylov dimension of a single run.
    pub max_krylov: usize,
    /// Maximum number of Lanczos runs.
    pub max_runs: usize,
    /// Problems of at most this dimension are solved densely.
    pub dense_threshold: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_krylov: 400, max_runs: 200, dense_threshold: 400 }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic start vector; `attempt` selects an independent one.
pub fn start_vector(dim: usize, attempt: u64) -> Vec<f64> {
    (0..dim as u64)
        .map(|i| {
            let h = splitmix64(i ^ (attempt << 40) ^ 0x5eed);
            (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Eigenvalues (ascending) of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += a[i][i] * a[i][i];
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Symmetric tridiagonal eigensolver (implicit QL). `diag` has length m,
/// `off[i] = T[i][i+1]`. Returns eigenvalues and the eigenvector matrix
/// `z[row][col]`; when `last_row_only` is set only the final row of `z`
/// is accumulated.
fn tridiagonal_eigen(diag: &[f64], off: &[f64], last_row_only: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let rows: Vec<usize> = if last_row_only { vec![n - 1] } else { (0..n).collect() };
    let mut z: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            let mut row = vec![0.0; n];
            row[r] = 1.0;
            row
        })
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let fz = row[i + 1];
                    row[i + 1] = s * row[i] + c * fz;
                    row[i] = c * row[i] - s * fz;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    (d, z)
}

struct RitzPair {
    value: f64,
    vector: Vec<f64>,
}

struct RunOutcome {
    /// Converged pairs, ascending, forming the lowest consecutive block.
    converged: Vec<RitzPair>,
    worst_residual: f64,
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            axpy(-c, v, w);
        }
    }
}

fn lanczos_run(
    op: &dyn SymmetricOperator,
    locked: &[Vec<f64>],
    start: Vec<f64>,
    want: usize,
    opts: &EigenOptions,
) -> Option<RunOutcome> {
    let dim = op.dim();
    let max_steps = opts.max_krylov.min(dim - locked.len()).max(1);
    let mut q = start;
    orthogonalize(&mut q, locked);
    let nq = norm(&q);
    if nq < 1e-8 {
        return None;
    }
    q.iter_mut().for_each(|x| *x /= nq);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut scale = 0.0f64;
    let mut last_check = None;

    for j in 0..max_steps {
        op.apply(&q, &mut w);
        let a = dot(&q, &w);
        axpy(-a, &q, &mut w);
        if let Some(prev) = basis.last() {
            axpy(-beta[j - 1], prev, &mut w);
        }
        basis.push(q.clone());
        alpha.push(a);
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        beta.push(b);
        scale = scale.max(a.abs() + b);

        let invariant = b <= 1e-13 * scale;
        let at_end = j + 1 == max_steps;
        if invariant || at_end || (j + 1) % 5 == 0 || j + 1 == want {
            let (vals, zlast) = tridiagonal_eigen(&alpha, &beta, true);
            let mut order: Vec<usize> = (0..vals.len()).collect();
            order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
            let residual = |i: usize| if invariant { 0.0 } else { (b * zlast[0][i]).abs() };
            let tol_of = |i: usize| opts.tol * vals[i].abs().max(1e-3 * scale);
            let mut block = 0;
            while block < order.len() && residual(order[block]) <= tol_of(order[block]) {
                block += 1;
            }
            let worst = order.iter().take(want).map(|&i| residual(i)).fold(0.0, f64::max);
            last_check = Some((block, worst));
            if block >= want.min(order.len()) || invariant || at_end {
                let (_, z) = tridiagonal_eigen(&alpha, &beta, false);
                let converged = order
                    .iter()
                    .take(block)
                    .map(|&i| {
                        let mut x = vec![0.0; dim];
                        for (r, v) in basis.iter().enumerate() {
                            axpy(z[r][i], v, &mut x);
                        }
                        let nx = norm(&x);
                        x.iter_mut().for_each(|c| *c /= nx);
                        RitzPair { value: vals[i], vector: x }
                    })
                    .collect();
                return Some(RunOutcome { converged, worst_residual: worst });
            }
        }
        q = w.iter().map(|x| x / b).collect();
    }
    last_check.map(|(_, worst)| RunOutcome { converged: Vec::new(), worst_residual: worst })
}

fn dense_from_operator(op: &dyn SymmetricOperator) -> Vec<Vec<f64>> {
    let n = op.dim();
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            a[i][j] = col[i];
        }
    }
    // symmetrize against rounding in the operator
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = m;
            a[j][i] = m;
        }
    }
    a
}

/// The `k` smallest eigenvalues of a symmetric operator, ascending.
pub fn eigensolve_symmetric_lowest(op: &dyn SymmetricOperator, k: usize, opts: &EigenOptions) -> Result<Vec<f64>, EigenError> {
    let dim = op.dim();
    if k > dim {
        return Err(EigenError::TooMany { k, dim });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if dim <= opts.dense_threshold {
        let mut ev = jacobi_eigenvalues(dense_from_operator(op));
        ev.truncate(k);
        return Ok(ev);
    }

    let mut locked_vals: Vec<f64> = Vec::new();
    let mut locked_vecs: Vec<Vec<f64>> = Vec::new();
    let mut last_residual = f64::NAN;
    for run in 0..opts.max_runs {
        if locked_vecs.len() == dim {
            break;
        }
        let verifying = locked_vals.len() >= k;
        let want = if verifying { 1 } else { k - locked_vals.len() };
        let Some(outcome) = lanczos_run(op, &locked_vecs, start_vector(dim, run as u64), want, opts) else {
            continue;
        };
        last_residual = outcome.worst_residual;
        if verifying {
            let mut sorted = locked_vals.clone();
            sorted.sort_by(f64::total_cmp);
            let kth = sorted[k - 1];
            let slack = opts.tol * kth.abs().max(f64::MIN_POSITIVE) * 10.0;
            match outcome.converged.first() {
                Some(p) if p.value < kth - slack => {}
                Some(_) => {
                    sorted.truncate(k);
                    return Ok(sorted);
                }
                None => continue,
            }
        }
        for pair in outcome.converged {
            locked_vals.push(pair.value);
            locked_vecs.push(pair.vector);
        }
    }
    if locked_vecs.len() == dim && locked_vals.len() >= k {
        locked_vals.sort_by(f64::total_cmp);
        locked_vals.truncate(k);
        return Ok(locked_vals);
    }
    Err(EigenError::NoConvergence { locked: locked_vals.len(), wanted: k, restarts: opts.max_runs, residual: last_residual })
}

/// Symmetric band matrix storing the lower band: `A[i][i-d]` for `d <= bandwidth`.
#[derive(Debug, Clone)]
pub struct BandedSymmetric {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedSymmetric {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self { n, bandwidth, data: vec![0.0; n * (bandwidth + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        (d <= self.bandwidth).then_some(hi * (self.bandwidth + 1) + d)
    }

    /// Adds `v` to `A[i][j]` (and by symmetry `A[j][i]`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bandwidth));
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let bw = self.bandwidth;
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let row = &self.data[i * (bw + 1)..(i + 1) * (bw + 1)];
            y[i] += row[0] * x[i];
            for d in 1..=bw.min(i) {
                let a = row[d];
                if a != 0.0 {
                    y[i] += a * x[i - d];
                    y[i - d] += a * x[i];
                }
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Banded Cholesky factorization `A = G G^T`.
    pub fn cholesky(&self) -> Result<BandedCholesky, EigenError> {
        let bw = self.bandwidth;
        let w = bw + 1;
        let mut g = self.data.clone();
        for i in 0..self.n {
            let jmin = i.saturating_sub(bw);
            for j in jmin..=i {
                let kmin = jmin.max(j.saturating_sub(bw));
                let mut s = g[i * w + (i - j)];
                for k in kmin..j {
                    s -= g[i * w + (i - k)] * g[j * w + (j - k)];
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(EigenError::NotPositiveDefinite { pivot: i, value: s });
                    }
                    g[i * w] = s.sqrt();
                } else {
                    g[i * w + (i - j)] = s / g[j * w];
                }
            }
        }
        Ok(BandedCholesky { n: self.n, bandwidth: bw, g })
    }
}

impl SymmetricOperator for BandedSymmetric {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bandwidth: usize,
    g: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        let w = self.bandwidth + 1;
        x.copy_from_slice(b);
        for i in 0..self.n {
            let mut s = x[i];
            for k in i.saturating_sub(self.bandwidth)..i {
                s -= self.g[i * w + (i - k)] * x[k];
            }
            x[i] = s / self.g[i * w];
        }
        for i in (0..self.n).rev() {
            let mut s = x[i];
            for k in (i + 1)..self.n.min(i + w) {
                s -= self.g[k * w + (k - i)] * x[k];
            }
            x[i] = s / self.g[i * w];
        }
    }
}

/// `x -> -A^{-1} x`; its lowest eigenvalues are `-1/λ` for the lowest `λ` of `A`.
struct NegatedInverse<'a>(&'a BandedCholesky);

impl SymmetricOperator for NegatedInverse<'_> {
    fn dim(&self) -> usize {
        self.0.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.solve(x, y);
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

/// The `k` smallest eigenvalues of a symmetric positive definite band matrix,
/// by shift-invert Lanczos (or densely when small).
pub fn lowest_eigenvalues_banded(a: &BandedSymmetric, k: usize, opts: &EigenOptions) -> Result<Vec<f64>, EigenError> {
    if k > a.dim() {
        return Err(EigenError::TooMany { k, dim: a.dim() });
    }
    if a.dim() <= opts.dense_threshold {
        let mut ev = jacobi_eigenvalues(a.to_dense());
        ev.truncate(k);
        return Ok(ev);
    }
    let chol = a.cholesky()?;
    let inv = NegatedInverse(&chol);
    let theta = eigensolve_symmetric_lowest(&inv, k, opts)?;
    let mut ev: Vec<f64> = theta.iter().map(|t| -1.0 / t).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn diagonal(n: usize) -> impl SymmetricOperator {
        FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
            for (i, (yi, xi)) in y.iter_mut().zip(x).enumerate() {
                *yi = (i + 1) as f64 * xi;
            }
        })
    }

    fn laplacian_1d(n: usize) -> BandedSymmetric {
        let h = 1.0 / (n + 1) as f64;
        let mut a = BandedSymmetric::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0 / (h * h));
            if i > 0 {
                a.add(i, i - 1, -1.0 / (h * h));
            }
        }
        a
    }

    #[test]
    fn diagonal_dense_and_lanczos() {
        let op = diagonal(10);
        assert_eq!(eigensolve_symmetric_lowest(&op, 3, &EigenOptions::default()).unwrap(), vec![1.0, 2.0, 3.0]);
        let op = diagonal(600);
        let opts = EigenOptions { dense_threshold: 0, max_krylov: 600, ..Default::default() };
        let ev = eigensolve_symmetric_lowest(&op, 3, &opts).unwrap();
        for (i, v) in ev.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-9, "{ev:?}");
        }
    }

    #[test]
    fn lanczos_resolves_exact_multiplicity() {
        // spectrum 1, 2, 2, 2, 3, 4, ... : copies of 2 need locking restarts
        let n = 800;
        let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
            for (i, (yi, xi)) in y.iter_mut().zip(x).enumerate() {
                let d = match i {
                    0 => 1.0,
                    1..=3 => 2.0,
                    _ => (i - 1) as f64,
                };
                *yi = d * xi;
            }
        });
        let opts = EigenOptions { dense_threshold: 0, max_krylov: 800, ..Default::default() };
        let ev = eigensolve_symmetric_lowest(&op, 6, &opts).unwrap();
        let expect = [1.0, 2.0, 2.0, 2.0, 3.0, 4.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{ev:?}");
        }
    }

    #[test]
    fn tridiagonal_matches_closed_form() {
        let n = 50;
        let h = 1.0 / (n + 1) as f64;
        let (mut vals, _) = tridiagonal_eigen(&vec![2.0 / (h * h); n], &vec![-1.0 / (h * h); n], false);
        vals.sort_by(f64::total_cmp);
        for (m, v) in vals.iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - (PI * (m + 1) as f64 * h).cos());
            assert!((v - exact).abs() <= 1e-10 * exact);
        }
    }

    #[test]
    fn laplacian_1d_closed_form_all_paths() {
        for (n, opts) in [
            (100, EigenOptions::default()),
            (1500, EigenOptions::default()),
            (300, EigenOptions { dense_threshold: 0, max_krylov: 300, ..Default::default() }),
        ] {
            let a = laplacian_1d(n);
            let h = 1.0 / (n + 1) as f64;
            let ev = if n == 300 {
                eigensolve_symmetric_lowest(&a, 4, &opts).unwrap()
            } else {
                lowest_eigenvalues_banded(&a, 4, &opts).unwrap()
            };
            for (m, v) in ev.iter().enumerate() {
                let exact = 2.0 / (h * h) * (1.0 - (PI * (m + 1) as f64 * h).cos());
                assert!((v - exact).abs() <= 1e-10 * exact, "n={n} m={m}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn cholesky_solves_and_detects_indefinite() {
        let a = laplacian_1d(20);
        let chol = a.cholesky().unwrap();
        let b: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; 20];
        chol.solve(&b, &mut x);
        let mut ax = vec![0.0; 20];
        a.matvec(&x, &mut ax);
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-10);
        }
        let mut bad = BandedSymmetric::zeros(2, 1);
        bad.add(0, 0, 1.0);
        bad.add(1, 1, 1.0);
        bad.add(1, 0, 2.0);
        assert!(matches!(bad.cholesky(), Err(EigenError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn deterministic_output() {
        let a = laplacian_1d(1200);
        let x = lowest_eigenvalues_banded(&a, 5, &EigenOptions::default()).unwrap();
        let y = lowest_eigenvalues_banded(&a, 5, &EigenOptions::default()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn too_many_requested() {
        assert!(matches!(
            eigensolve_symmetric_lowest(&diagonal(3), 4, &EigenOptions::default()),
            Err(EigenError::TooMany { .. })
        ));
    }
}
