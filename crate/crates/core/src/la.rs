//! Small linear-algebra pieces shared by the solver stack: slice helpers,
//! a symmetric banded matrix with Cholesky factorization (the discretized
//! problems couple only neighboring nodes, so their Hessian models are
//! banded), and a tiny dense solver for low-rank corrections.

use crate::real::Real;

/// Symmetric matrix stored as its lower band: row `i` holds `H[i, i-k]`
/// for `k = 0..=hb`, so only entries with `|i-j| <= hb` are representable.
#[derive(Debug, Clone)]
pub struct SymBand<R> {
    n: usize,
    hb: usize,
    data: Vec<R>,
}

impl<R: Real> SymBand<R> {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        let hb = half_bandwidth.min(n.saturating_sub(1));
        SymBand {
            n,
            hb,
            data: vec![R::zero(); n * (hb + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.hb
    }

    /// Accumulate `v` into `H[i, j]` (and by symmetry `H[j, i]`).
    /// Entries outside the band are rejected.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: R) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = r - c;
        debug_assert!(k <= self.hb, "entry ({i},{j}) outside band {}", self.hb);
        self.data[r * (self.hb + 1) + k] = self.data[r * (self.hb + 1) + k] + v;
    }

    #[cfg(test)]
    fn at(&self, i: usize, j: usize) -> R {
        debug_assert!(i >= j && i - j <= self.hb);
        self.data[i * (self.hb + 1) + (i - j)]
    }

    pub fn diag_max(&self) -> R {
        let mut m = R::zero();
        for i in 0..self.n {
            m = m.max(self.data[i * (self.hb + 1)].abs());
        }
        m
    }

    /// Appends `extra` zero rows/columns, keeping the half-bandwidth. Used to
    /// extend a node-structured band with trailing auxiliary scalars (e.g.
    /// the Chebyshev attainment variable).
    pub fn push_rows(&mut self, extra: usize) {
        self.n += extra;
        self.data.resize(self.n * (self.hb + 1), R::zero());
    }

    /// Attempt a Cholesky factorization of `H + shift·I`, leaving `self`
    /// untouched. Returns `None` when a pivot is not safely positive.
    pub fn cholesky(&self, shift: R) -> Option<BandChol<R>> {
        let n = self.n;
        let hb = self.hb;
        let mut l = self.data.clone();
        let tiny = R::lit(1e-300);
        for i in 0..n {
            l[i * (hb + 1)] = l[i * (hb + 1)] + shift;
        }
        for i in 0..n {
            let lo = i.saturating_sub(hb);
            for j in lo..=i {
                let mut sum = l[i * (hb + 1) + (i - j)];
                let klo = lo.max(j.saturating_sub(hb));
                for k in klo..j {
                    sum = sum - l[i * (hb + 1) + (i - k)] * l[j * (hb + 1) + (j - k)];
                }
                if j < i {
                    l[i * (hb + 1) + (i - j)] = sum / l[j * (hb + 1)];
                } else {
                    if !(sum > tiny) || !sum.is_finite() {
                        return None;
                    }
                    l[i * (hb + 1)] = sum.sqrt();
                }
            }
        }
        Some(BandChol { n, hb, l })
    }
}

/// Lower-triangular banded Cholesky factor `L` with `H = L·Lᵀ`.
#[derive(Debug, Clone)]
pub struct BandChol<R> {
    n: usize,
    hb: usize,
    l: Vec<R>,
}

impl<R: Real> BandChol<R> {
    /// Overwrite `b` with `H⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [R]) {
        debug_assert_eq!(b.len(), self.n);
        let hb = self.hb;
        for i in 0..self.n {
            let mut sum = b[i];
            for k in i.saturating_sub(hb)..i {
                sum = sum - self.l[i * (hb + 1) + (i - k)] * b[k];
            }
            b[i] = sum / self.l[i * (hb + 1)];
        }
        for i in (0..self.n).rev() {
            let mut sum = b[i];
            let hi = (i + hb).min(self.n - 1);
            for k in i + 1..=hi {
                sum = sum - self.l[k * (hb + 1) + (k - i)] * b[k];
            }
            b[i] = sum / self.l[i * (hb + 1)];
        }
    }
}

/// Solve the dense system `A x = b` in place (`b` becomes `x`) by Gaussian
/// elimination with partial pivoting; `A` is `m×m` row-major and is
/// destroyed. Returns `false` on a (numerically) singular pivot.
pub(crate) fn solve_dense_in_place<R: Real>(a: &mut [R], b: &mut [R], m: usize) -> bool {
    debug_assert_eq!(a.len(), m * m);
    debug_assert_eq!(b.len(), m);
    for col in 0..m {
        let mut piv = col;
        let mut best = a[col * m + col].abs();
        for r in col + 1..m {
            let v = a[r * m + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > R::lit(1e-300)) {
            return false;
        }
        if piv != col {
            for c in 0..m {
                a.swap(piv * m + c, col * m + c);
            }
            b.swap(piv, col);
        }
        let d = a[col * m + col];
        for r in col + 1..m {
            let f = a[r * m + col] / d;
            if f == R::zero() {
                continue;
            }
            for c in col..m {
                a[r * m + c] = a[r * m + c] - f * a[col * m + c];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    for col in (0..m).rev() {
        let mut sum = b[col];
        for c in col + 1..m {
            sum = sum - a[col * m + c] * b[c];
        }
        b[col] = sum / a[col * m + col];
    }
    true
}

#[inline]
pub(crate) fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub(crate) fn norm_sq<R: Real>(a: &[R]) -> R {
    dot(a, a)
}

#[inline]
pub(crate) fn inf_norm<R: Real>(a: &[R]) -> R {
    a.iter().fold(R::zero(), |m, &x| m.max(x.abs()))
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy<R: Real>(alpha: R, x: &[R], y: &mut [R]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

#[inline]
pub(crate) fn dot3<R: Real>(a: &[R; 3], b: &[R; 3]) -> R {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn norm3_sq<R: Real>(a: &[R; 3]) -> R {
    dot3(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic pseudo-random stream, enough for test matrices.
    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    /// Random banded SPD matrix: B = A·Aᵀ + I restricted to the band shape.
    fn random_spd_band(n: usize, hb: usize, seed: u64) -> (SymBand<f64>, Vec<f64>) {
        let mut s = seed;
        let mut dense = vec![0.0f64; n * n];
        // Lower-banded random A ⇒ A·Aᵀ is banded with the same half-bandwidth.
        let mut a = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i.saturating_sub(hb)..=i {
                a[i * n + j] = lcg(&mut s);
            }
            a[i * n + i] += 2.0;
        }
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += a[i * n + k] * a[j * n + k];
                }
                dense[i * n + j] = v;
            }
        }
        let mut band = SymBand::zeros(n, hb);
        for i in 0..n {
            for j in i.saturating_sub(hb)..=i {
                band.add(i, j, dense[i * n + j]);
            }
        }
        (band, dense)
    }

    #[test]
    fn banded_cholesky_solves_spd_system() {
        for &(n, hb) in &[(1usize, 0usize), (5, 1), (12, 3), (40, 7)] {
            let (band, dense) = random_spd_band(n, hb, 42 + n as u64);
            let chol = band.cholesky(0.0).expect("SPD");
            let mut state = 7u64;
            let xstar: Vec<f64> = (0..n).map(|_| lcg(&mut state)).collect();
            let mut b = vec![0.0; n];
            for i in 0..n {
                for j in 0..n {
                    b[i] += dense[i * n + j] * xstar[j];
                }
            }
            chol.solve_in_place(&mut b);
            for i in 0..n {
                assert!(
                    (b[i] - xstar[i]).abs() < 1e-9,
                    "n={n} hb={hb} i={i}: {} vs {}",
                    b[i],
                    xstar[i]
                );
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_and_shift_recovers() {
        let mut band = SymBand::zeros(3, 1);
        band.add(0, 0, 1.0);
        band.add(1, 1, -2.0);
        band.add(2, 2, 1.0);
        assert!(band.cholesky(0.0).is_none());
        assert!(band.cholesky(3.0).is_some());
    }

    #[test]
    fn symmetric_add_accumulates_both_triangles() {
        let mut band = SymBand::zeros(4, 2);
        band.add(2, 0, 0.25);
        band.add(0, 2, 0.5);
        assert_eq!(band.at(2, 0), 0.75);
        band.add(3, 3, 4.0);
        assert_eq!(band.diag_max(), 4.0);
    }

    #[test]
    fn push_rows_extends_with_zeros_and_preserves_solves() {
        // Factor a 3x3 diag(2,3,4) extended by one zero row that we then fill.
        let mut band = SymBand::zeros(3, 1);
        band.add(0, 0, 2.0f64);
        band.add(1, 1, 3.0);
        band.add(2, 2, 4.0);
        band.push_rows(1);
        assert_eq!(band.n(), 4);
        assert_eq!(band.half_bandwidth(), 1);
        band.add(3, 3, 5.0);
        band.add(3, 2, 1.0);
        let chol = band.cholesky(0.0).expect("SPD after filling the new row");
        // Solve against a dense reference: A = [[2,0,0,0],[0,3,0,0],[0,0,4,1],[0,0,1,5]].
        let mut b = vec![2.0f64, 6.0, 9.0, 12.0];
        chol.solve_in_place(&mut b);
        // x = (1, 2, (9*5-12)/(20-1), (12*4-9)/(20-1)) = (1, 2, 33/19, 39/19)
        assert!((b[0] - 1.0).abs() < 1e-12);
        assert!((b[1] - 2.0).abs() < 1e-12);
        assert!((b[2] - 33.0 / 19.0).abs() < 1e-12);
        assert!((b[3] - 39.0 / 19.0).abs() < 1e-12);
    }

    #[test]
    fn dense_solver_matches_known_solution() {
        let mut a = vec![2.0f64, 1.0, -1.0, -3.0, -1.0, 2.0, -2.0, 1.0, 2.0];
        let mut b = vec![8.0f64, -11.0, -3.0];
        assert!(solve_dense_in_place(&mut a, &mut b, 3));
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] - 3.0).abs() < 1e-12);
        assert!((b[2] - (-1.0)).abs() < 1e-12);
        let mut sing = vec![1.0f64, 2.0, 2.0, 4.0];
        let mut rhs = vec![1.0f64, 2.0];
        assert!(!solve_dense_in_place(&mut sing, &mut rhs, 2));
    }
}
