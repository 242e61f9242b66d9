//! Dense exact matrices and the little linear algebra this crate needs:
//! products, Gaussian elimination over a field of fractions, and kernel
//! lattices of integer matrices via diagonalization with unimodular
//! column bookkeeping.

use crate::scalar::{Rat, Scalar};
use num_traits::{One, Zero};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Zero> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

impl<T: Copy + Zero + One + PartialEq + std::ops::Mul<Output = T> + std::ops::Add<Output = T>>
    Mat<T>
{
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == T::zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .fold(T::zero(), |acc, c| acc + self.get(r, c) * v[c])
            })
            .collect()
    }
}

impl<T: Copy + Zero + std::ops::Neg<Output = T>> Mat<T> {
    pub fn neg(&self) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| -x).collect(),
        }
    }
}

impl<S: Scalar> Mat<S> {
    pub fn to_rationals(&self) -> Mat<Rat<S>> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Rat::from_integer(x)).collect(),
        }
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F>(m: &mut Mat<F>) -> Vec<usize>
where
    F: Copy
        + Zero
        + One
        + PartialEq
        + std::ops::Sub<Output = F>
        + std::ops::Mul<Output = F>
        + std::ops::Div<Output = F>,
{
    let mut pivots = Vec::new();
    let mut lead = 0usize;
    for col in 0..m.cols {
        if lead >= m.rows {
            break;
        }
        let Some(pr) = (lead..m.rows).find(|&r| m.get(r, col) != F::zero()) else {
            continue;
        };
        m.swap_rows(lead, pr);
        let inv = m.get(lead, col);
        for c in col..m.cols {
            let v = m.get(lead, c) / inv;
            m.set(lead, c, v);
        }
        for r in 0..m.rows {
            if r == lead {
                continue;
            }
            let f = m.get(r, col);
            if f == F::zero() {
                continue;
            }
            for c in col..m.cols {
                let v = m.get(r, c) - f * m.get(lead, c);
                m.set(r, c, v);
            }
        }
        pivots.push(col);
        lead += 1;
    }
    pivots
}

pub fn rank<F>(m: &Mat<F>) -> usize
where
    F: Copy
        + Zero
        + One
        + PartialEq
        + std::ops::Sub<Output = F>
        + std::ops::Mul<Output = F>
        + std::ops::Div<Output = F>,
{
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of the right kernel { v : m v = 0 } over the field `F`.
pub fn kernel_basis<F>(m: &Mat<F>) -> Vec<Vec<F>>
where
    F: Copy
        + Zero
        + One
        + PartialEq
        + std::ops::Sub<Output = F>
        + std::ops::Neg<Output = F>
        + std::ops::Mul<Output = F>
        + std::ops::Div<Output = F>,
{
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![F::zero(); m.cols];
            v[fc] = F::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -work.get(prow, fc);
            }
            v
        })
        .collect()
}

pub fn kernel_dim<F>(m: &Mat<F>) -> usize
where
    F: Copy
        + Zero
        + One
        + PartialEq
        + std::ops::Sub<Output = F>
        + std::ops::Mul<Output = F>
        + std::ops::Div<Output = F>,
{
    m.cols - rank(m)
}

/// Basis of the saturated integer kernel lattice { v in Z^n : m v = 0 }.
///
/// Diagonalizes by elementary row and column operations, mirroring the
/// column operations on a unimodular matrix; the columns matching zero
/// diagonal entries then generate the kernel as a direct summand, so no
/// finite-index sublattice sneaks in.
pub fn integer_kernel_basis<S: Scalar>(m: &Mat<S>) -> Vec<Vec<S>> {
    let n = m.cols;
    let mut a = m.clone();
    let mut v: Mat<S> = Mat::identity(n);
    let steps = m.rows.min(n);
    for k in 0..steps {
        loop {
            // smallest nonzero entry of the trailing block as pivot
            let mut pivot: Option<(usize, usize)> = None;
            for r in k..a.rows {
                for c in k..a.cols {
                    let x = a.get(r, c);
                    if x != S::zero()
                        && pivot.is_none_or(|(pr, pc)| x.abs() < a.get(pr, pc).abs())
                    {
                        pivot = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = pivot else {
                return kernel_cols(&a, &v, k);
            };
            a.swap_rows(k, pr);
            a.swap_cols(k, pc);
            v.swap_cols(k, pc);
            let mut dirty = false;
            let piv = a.get(k, k);
            for r in k + 1..a.rows {
                let q = a.get(r, k).div_floor(&piv);
                if q != S::zero() {
                    for c in k..a.cols {
                        let val = a.get(r, c) - q * a.get(k, c);
                        a.set(r, c, val);
                    }
                }
                if a.get(r, k) != S::zero() {
                    dirty = true;
                }
            }
            for c in k + 1..a.cols {
                let q = a.get(k, c).div_floor(&piv);
                if q != S::zero() {
                    for r in k..a.rows {
                        let val = a.get(r, c) - q * a.get(r, k);
                        a.set(r, c, val);
                    }
                    for r in 0..n {
                        let val = v.get(r, c) - q * v.get(r, k);
                        v.set(r, c, val);
                    }
                }
                if a.get(k, c) != S::zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
    }
    kernel_cols(&a, &v, steps)
}

fn kernel_cols<S: Scalar>(a: &Mat<S>, v: &Mat<S>, handled: usize) -> Vec<Vec<S>> {
    let mut basis = Vec::new();
    for c in 0..a.cols() {
        let diag_zero = c >= handled || a.get(c, c) == S::zero();
        if diag_zero && a.col(c).iter().all(|&x| x == S::zero()) {
            basis.push(v.col(c));
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Rat<i64>;

    fn qm(rows: Vec<Vec<i64>>) -> Mat<Q> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Q::from_integer).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel_of_singular_matrix() {
        let m = qm(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 1, 1]]);
        assert_eq!(rank(&m), 2);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        let im = Mat::from_rows(vec![
            vec![1, 2, 3].into_iter().map(Q::from_integer).collect(),
            vec![2, 4, 6].into_iter().map(Q::from_integer).collect(),
            vec![1, 1, 1].into_iter().map(Q::from_integer).collect(),
        ]);
        for v in &k {
            assert!(im.apply(v).iter().all(|x| *x == Q::from_integer(0)));
        }
    }

    #[test]
    fn integer_kernel_is_saturated() {
        // Q-kernel of (2 4) is spanned by (2,-1); the lattice kernel too.
        let m: Mat<i64> = Mat::from_rows(vec![vec![2, 4]]);
        let k = integer_kernel_basis(&m);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(2 * v[0] + 4 * v[1], 0);
        assert_eq!(num_integer::gcd(v[0], v[1]), 1);
    }

    #[test]
    fn integer_kernel_of_full_rank_matrix_is_empty() {
        let m: Mat<i64> = Mat::from_rows(vec![vec![1, 1], vec![0, 3]]);
        assert!(integer_kernel_basis(&m).is_empty());
    }

    #[test]
    fn integer_kernel_rank_two() {
        let m: Mat<i64> = Mat::from_rows(vec![
            vec![2, 0, -1, -1],
            vec![0, 0, 0, 0],
            vec![-2, 0, 1, 1],
        ]);
        let k = integer_kernel_basis(&m);
        assert_eq!(k.len(), 3);
        for v in &k {
            for r in 0..m.rows() {
                let s: i64 = (0..4).map(|c| m.get(r, c) * v[c]).sum();
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn matrix_product_and_apply_agree() {
        let a = qm(vec![vec![1, 2], vec![3, 4]]);
        let b = qm(vec![vec![0, 1], vec![1, 1]]);
        let ab = a.mul(&b);
        let v = vec![Q::from_integer(5), Q::from_integer(-1)];
        assert_eq!(ab.apply(&v), a.apply(&b.apply(&v)));
    }
}
