//! Dense least squares by Householder QR with column pivoting.
//!
//! Rank-deficient systems get the minimum-norm solution through a complete
//! orthogonal decomposition: the numerically nonzero rows `[R11 R12]` of the
//! pivoted factor are themselves factored from the right, so the free
//! directions are set to zero in an orthonormal basis rather than in the
//! original coordinates.
//!
//! The element type is any [`Field`]: real `f32`/`f64` or their complex
//! counterparts. A matrix-free [`lsqr`] is also provided for large real
//! systems whose matrix is only available through products.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Scalar field for the QR solver.
pub trait Field:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Real: Real;

    fn zero() -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    fn abs_sqr(self) -> Self::Real;

    fn abs(self) -> Self::Real {
        num_traits::Float::sqrt(self.abs_sqr())
    }

    fn scale(self, r: Self::Real) -> Self {
        self * Self::from_real(r)
    }
}

impl<T: Real> Field for T {
    type Real = T;
    fn zero() -> Self {
        T::zero()
    }
    fn from_real(r: T) -> Self {
        r
    }
    fn conj(self) -> Self {
        self
    }
    fn abs_sqr(self) -> T {
        self * self
    }
    fn abs(self) -> T {
        num_traits::Float::abs(self)
    }
    fn scale(self, r: T) -> Self {
        self * r
    }
}

impl<T: Real> Field for Complex<T> {
    type Real = T;
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn abs_sqr(self) -> T {
        self.norm_sqr()
    }
    fn abs(self) -> T {
        self.norm()
    }
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    /// Builds from column vectors of equal length.
    pub fn from_columns(rows: usize, columns: Vec<Vec<F>>) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            assert_eq!(c.len(), rows, "column length");
            data.extend(c);
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[j * self.rows + i] = v;
    }

    pub fn column(&self, j: usize) -> &[F] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [F] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.column(j)) {
                *o = *o + a * xj;
            }
        }
        out
    }

    fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (left, right) = self.data.split_at_mut(hi * self.rows);
        left[lo * self.rows..(lo + 1) * self.rows].swap_with_slice(&mut right[..self.rows]);
    }
}

/// Solution of `min_x ||A x - b||`.
#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution<F: Field> {
    pub x: Vec<F>,
    /// Numerical rank of `A`.
    pub rank: usize,
    /// `||A x - b||^2`.
    pub residual: F::Real,
}

/// Conjugate inner product `sum conj(a_i) b_i`.
fn dotc<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x.conj() * y)
}

fn norm_sqr<F: Field>(a: &[F]) -> F::Real {
    a.iter().map(|&x| x.abs_sqr()).sum()
}

/// One Householder reflector `H = I - beta v v^H` acting on rows `offset..`.
struct Reflector<F: Field> {
    v: Vec<F>,
    beta: F::Real,
}

impl<F: Field> Reflector<F> {
    /// Reflector mapping `x` onto a multiple of `e1`; returns it with the
    /// resulting leading entry.
    fn new(x: &[F]) -> (Self, F) {
        let alpha = num_traits::Float::sqrt(norm_sqr(x));
        let zero = <F::Real as num_traits::Zero>::zero();
        if alpha == zero {
            return (
                Self {
                    v: vec![F::zero(); x.len()],
                    beta: zero,
                },
                F::zero(),
            );
        }
        let x0 = x[0];
        let x0_abs = x0.abs();
        let phase = if x0_abs == zero {
            F::from_real(<F::Real as num_traits::One>::one())
        } else {
            x0.scale(<F::Real as num_traits::One>::one() / x0_abs)
        };
        let mut v = x.to_vec();
        v[0] = x0 + phase.scale(alpha);
        let vn = norm_sqr(&v);
        let two = F::Real::lit(2.0);
        (Self { v, beta: two / vn }, -phase.scale(alpha))
    }

    fn apply(&self, y: &mut [F]) {
        if self.beta == <F::Real as num_traits::Zero>::zero() {
            return;
        }
        let s = dotc(&self.v, y).scale(self.beta);
        for (yi, &vi) in y.iter_mut().zip(&self.v) {
            *yi = *yi - vi * s;
        }
    }
}

/// Column-pivoted QR of an `m x n` matrix.
pub struct PivotedQr<F: Field> {
    rows: usize,
    cols: usize,
    /// Upper triangle holds `R` (excluding the diagonal, kept in `diag`).
    work: Matrix<F>,
    diag: Vec<F>,
    reflectors: Vec<Reflector<F>>,
    perm: Vec<usize>,
}

impl<F: Field> PivotedQr<F> {
    pub fn new(a: Matrix<F>) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut work = a;
        let steps = m.min(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut norms: Vec<F::Real> = (0..n).map(|j| norm_sqr(work.column(j))).collect();
        let mut reference = norms.clone();
        let mut diag = Vec::with_capacity(steps);
        let mut reflectors = Vec::with_capacity(steps);
        let recompute_ratio = F::Real::lit(0.1);

        for j in 0..steps {
            let p = (j..n)
                .max_by(|&a, &b| {
                    norms[a]
                        .partial_cmp(&norms[b])
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(b.cmp(&a))
                })
                .unwrap_or(j);
            work.swap_columns(j, p);
            perm.swap(j, p);
            norms.swap(j, p);
            reference.swap(j, p);

            let (h, r_jj) = Reflector::new(&work.column(j)[j..]);
            for c in j + 1..n {
                h.apply(&mut work.column_mut(c)[j..]);
                // downdate the trailing column norm; recompute on cancellation
                let top = work.get(j, c).abs_sqr();
                let updated = norms[c] - top;
                if updated <= reference[c] * recompute_ratio {
                    norms[c] = norm_sqr(&work.column(c)[j + 1..]);
                    reference[c] = norms[c];
                } else {
                    norms[c] = updated;
                }
            }
            diag.push(r_jj);
            reflectors.push(h);
        }
        Self {
            rows: m,
            cols: n,
            work,
            diag,
            reflectors,
            perm,
        }
    }

    /// Numerical rank with threshold `max(m, n) * eps * |R_00|`.
    pub fn rank(&self) -> usize {
        let Some(first) = self.diag.first() else {
            return 0;
        };
        let r00 = first.abs();
        if r00 == <F::Real as num_traits::Zero>::zero() {
            return 0;
        }
        let tol = r00
            * F::Real::from_usize_lossy(self.rows.max(self.cols))
            * <F::Real as num_traits::Float>::epsilon();
        self.diag.iter().take_while(|d| d.abs() > tol).count()
    }

    fn r(&self, i: usize, j: usize) -> F {
        if i == j {
            self.diag[i]
        } else {
            self.work.get(i, j)
        }
    }

    /// Minimum-norm least-squares solution for right-hand side `b`.
    pub fn solve(&self, b: &[F]) -> LsSolution<F> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let n = self.cols;
        let mut c = b.to_vec();
        for (j, h) in self.reflectors.iter().enumerate() {
            h.apply(&mut c[j..]);
        }
        let rank = self.rank();
        let residual = norm_sqr(&c[rank..]);
        let mut xp = vec![F::zero(); n];
        if rank == n {
            for i in (0..n).rev() {
                let mut s = c[i];
                for j in i + 1..n {
                    s = s - self.r(i, j) * xp[j];
                }
                xp[i] = s / self.diag[i];
            }
        } else if rank > 0 {
            xp = self.min_norm_trapezoid(&c[..rank], rank);
        }
        let mut x = vec![F::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = xp[i];
        }
        LsSolution { x, rank, residual }
    }

    /// Minimum-norm solution of `W y = c` with `W = R[0..r, 0..n]`, via a QR
    /// factorization of `W^H`.
    fn min_norm_trapezoid(&self, c: &[F], r: usize) -> Vec<F> {
        let n = self.cols;
        // columns of W^H are conjugated rows of W
        let mut wh = Matrix::zeros(n, r);
        for i in 0..r {
            for j in i..n {
                wh.set(j, i, self.r(i, j).conj());
            }
        }
        let mut tdiag = Vec::with_capacity(r);
        let mut refl = Vec::with_capacity(r);
        for j in 0..r {
            let (h, d) = Reflector::new(&wh.column(j)[j..]);
            for col in j + 1..r {
                h.apply(&mut wh.column_mut(col)[j..]);
            }
            tdiag.push(d);
            refl.push(h);
        }
        // W = T^H Z^H, solve T^H y1 = c (lower triangular)
        let t = |i: usize, j: usize| if i == j { tdiag[i] } else { wh.get(i, j) };
        let mut y = vec![F::zero(); n];
        for i in 0..r {
            let mut s = c[i];
            for j in 0..i {
                s = s - t(j, i).conj() * y[j];
            }
            y[i] = s / tdiag[i].conj();
        }
        // x = Z y, Z = H_0 H_1 ... H_{r-1}
        for (j, h) in refl.iter().enumerate().rev() {
            h.apply(&mut y[j..]);
        }
        y
    }
}

/// Minimum-norm least-squares solve of `A x = b`.
pub fn solve_least_squares<F: Field>(a: Matrix<F>, b: &[F]) -> LsSolution<F> {
    PivotedQr::new(a).solve(b)
}

/// Matrix-free LSQR for real systems.
///
/// `forward(x)` must return `A x` (length `m`) and `adjoint(y)` must return
/// `A^T y` (length `n`). Stops when the normal-equation residual estimate
/// `||A^T r|| / (||A|| ||r||)` falls below `tol` or after `max_iter` steps.
pub fn lsqr<T, Fw, Ad>(
    forward: Fw,
    adjoint: Ad,
    n: usize,
    b: &[T],
    tol: T,
    max_iter: usize,
) -> Vec<T>
where
    T: Real,
    Fw: Fn(&[T]) -> Vec<T>,
    Ad: Fn(&[T]) -> Vec<T>,
{
    let norm = |v: &[T]| v.iter().map(|&x| x * x).sum::<T>().sqrt();
    let mut x = vec![T::zero(); n];
    let mut u = b.to_vec();
    let mut beta = norm(&u);
    if beta == T::zero() {
        return x;
    }
    u.iter_mut().for_each(|v| *v = *v / beta);
    let mut v = adjoint(&u);
    let mut alpha = norm(&v);
    if alpha == T::zero() {
        return x;
    }
    v.iter_mut().for_each(|e| *e = *e / alpha);
    let mut w = v.clone();
    let mut phibar = beta;
    let mut rhobar = alpha;
    let mut anorm_sq = T::zero();

    for _ in 0..max_iter {
        let av = forward(&v);
        for (ui, &a) in u.iter_mut().zip(&av) {
            *ui = a - alpha * *ui;
        }
        beta = norm(&u);
        if beta > T::zero() {
            u.iter_mut().for_each(|e| *e = *e / beta);
        }
        anorm_sq = anorm_sq + alpha * alpha + beta * beta;
        let atu = adjoint(&u);
        for (vi, &a) in v.iter_mut().zip(&atu) {
            *vi = a - beta * *vi;
        }
        alpha = norm(&v);
        if alpha > T::zero() {
            v.iter_mut().for_each(|e| *e = *e / alpha);
        }

        let rho = (rhobar * rhobar + beta * beta).sqrt();
        let cs = rhobar / rho;
        let sn = beta / rho;
        let theta = sn * alpha;
        rhobar = -cs * alpha;
        let phi = cs * phibar;
        phibar = sn * phibar;

        let t1 = phi / rho;
        let t2 = theta / rho;
        for ((xi, wi), &vi) in x.iter_mut().zip(w.iter_mut()).zip(&v) {
            *xi = *xi + t1 * *wi;
            *wi = vi - t2 * *wi;
        }

        // ||A^T r|| = phibar * alpha * |cs|
        let arnorm = phibar * alpha * cs.abs();
        if phibar == T::zero() || arnorm <= tol * anorm_sq.sqrt() * phibar {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    /// Gaussian elimination on `A^H A x = A^H b`.
    fn normal_equations(a: &Matrix<C>, b: &[C]) -> Vec<C> {
        let n = a.cols();
        let mut g = vec![vec![C::new(0.0, 0.0); n + 1]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = dotc(a.column(i), a.column(j));
            }
            g[i][n] = dotc(a.column(i), b);
        }
        for col in 0..n {
            let p = (col..n)
                .max_by(|&x, &y| g[x][col].norm().partial_cmp(&g[y][col].norm()).unwrap())
                .unwrap();
            g.swap(col, p);
            for row in col + 1..n {
                let f = g[row][col] / g[col][col];
                for k in col..=n {
                    let v = g[col][k];
                    g[row][k] -= f * v;
                }
            }
        }
        let mut x = vec![C::new(0.0, 0.0); n];
        for i in (0..n).rev() {
            let mut s = g[i][n];
            for j in i + 1..n {
                s -= g[i][j] * x[j];
            }
            x[i] = s / g[i][i];
        }
        x
    }

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix<C> {
        let cols = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        Matrix::from_columns(m, cols)
    }

    #[test]
    fn matches_normal_equations_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 30, 7);
            let b: Vec<C> = (0..30)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let oracle = normal_equations(&a, &b);
            let sol = solve_least_squares(a.clone(), &b);
            assert_eq!(sol.rank, 7);
            for (x, y) in sol.x.iter().zip(&oracle) {
                assert!((x - y).norm() < 1e-10);
            }
            let r: f64 = a
                .mul_vec(&sol.x)
                .iter()
                .zip(&b)
                .map(|(p, q)| (p - q).norm_sqr())
                .sum();
            assert!((r - sol.residual).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // columns 0 and 1 identical: min-norm solution splits weight evenly
        let a = Matrix::from_columns(3, vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let sol = solve_least_squares(a, &[2.0, 3.0, 1.0]);
        assert_eq!(sol.rank, 2);
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.x[2] - 3.0).abs() < 1e-12);
        assert!((sol.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_complex_matches_pseudoinverse_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = random_matrix(&mut rng, 12, 3);
        // append a combination of existing columns
        let mut cols: Vec<Vec<C>> = (0..3).map(|j| base.column(j).to_vec()).collect();
        let combo: Vec<C> = (0..12)
            .map(|i| base.get(i, 0) * C::new(0.5, -1.0) + base.get(i, 2) * C::new(2.0, 0.0))
            .collect();
        cols.push(combo);
        let a = Matrix::from_columns(12, cols);
        let b: Vec<C> = (0..12).map(|i| C::new(i as f64, 1.0)).collect();
        let sol = solve_least_squares(a.clone(), &b);
        assert_eq!(sol.rank, 3);
        // min-norm solution is orthogonal to the null vector (0.5-1j, 0, 2, -1)
        let null = [C::new(0.5, -1.0), C::new(0.0, 0.0), C::new(2.0, 0.0), C::new(-1.0, 0.0)];
        let ip = dotc(&null, &sol.x);
        assert!(ip.norm() < 1e-10, "{ip}");
        // and still optimal: residual equals the full-rank residual of the base
        let base_sol = solve_least_squares(base, &b);
        assert!((sol.residual - base_sol.residual).abs() < 1e-9);
    }

    #[test]
    fn zero_matrix_gives_zero_solution() {
        let a = Matrix::<C>::zeros(5, 3);
        let b = vec![C::new(1.0, 0.0); 5];
        let sol = solve_least_squares(a, &b);
        assert_eq!(sol.rank, 0);
        assert!(sol.x.iter().all(|x| x.norm() == 0.0));
        assert!((sol.residual - 5.0).abs() < 1e-12);
    }

    #[test]
    fn lsqr_matches_qr() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (m, n) = (40, 10);
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let a = Matrix::from_columns(m, cols);
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let qr = solve_least_squares(a.clone(), &b);
        let fwd = |x: &[f64]| a.mul_vec(x);
        let adj = |y: &[f64]| (0..n).map(|j| dotc(a.column(j), y)).collect::<Vec<_>>();
        let x = lsqr(fwd, adj, n, &b, 1e-14, 500);
        for (p, q) in x.iter().zip(&qr.x) {
            assert!((p - q).abs() < 1e-8);
        }
    }
}
