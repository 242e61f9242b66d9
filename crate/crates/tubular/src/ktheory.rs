//! The Grothendieck lattice of the line: Euler form, the translate τ as a
//! lattice map, the radical basis (u, w), rank/degree/slope, and classes
//! of line bundles and of slope-∞ tube objects.
//!
//! The basis is `[O]`, `[S_pt]`, and `[S_{i,j}]` for i = 1..t and
//! j = 1..p_i-1, where `O` is the structure sheaf, `S_pt` the simple at
//! an ordinary point (one class for all of them), and `S_{i,j}` the arm
//! simples, with `S_{i,j} = coker(O((j-1)x_i) -> O(j x_i))`. The omitted
//! index j = 0 expands as `[S_{i,0}] = [S_pt] - sum_{j>=1} [S_{i,j}]`.
//!
//! Every Gram and τ entry is assembled from short exact sequences and then
//! validated: the build fails unless `⟨x,y⟩ = -⟨y,τx⟩` holds as a matrix
//! identity, the symmetrized radical has rank two, and the normalization
//! `deg[O] = 0`, `deg[S_pt] = p`, `rk[O] = 1`, `rk[S_pt] = 0` has an
//! integral solution with `⟨u,w⟩ = p`.

use crate::geometry::{Geometry, LElement, LGen, PointId};
use crate::linalg::{self, Mat};
use crate::scalar::{Rat, Scalar};
use crate::slope::Slope;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KTheoryError {
    #[error("radical of the symmetrized Euler form has rank {0}, expected 2")]
    RadicalRankError(usize),
    #[error("no integral (u, w) satisfies the rank/degree normalization: {0}")]
    NormalizationError(String),
    #[error("slope undefined: rank 0 and degree {0} <= 0")]
    SlopeUndefined(i64),
}

/// Integer vector over the fixed basis of K_0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KClass<S> {
    coords: Vec<S>,
}

impl<S: Scalar> KClass<S> {
    pub fn zero(n: usize) -> Self {
        KClass {
            coords: vec![S::zero(); n],
        }
    }

    pub fn from_coords(coords: Vec<S>) -> Self {
        KClass { coords }
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        KClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        KClass {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        KClass {
            coords: self.coords.iter().map(|&a| -a).collect(),
        }
    }

    pub fn scale(&self, k: S) -> Self {
        KClass {
            coords: self.coords.iter().map(|&a| a * k).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// The Euler form data of a fixed geometry.
#[derive(Debug, Clone)]
pub struct EulerTable<S> {
    geo: Geometry,
    n: usize,
    /// start of the block of arm i (1-based) in the basis
    arm_offset: Vec<usize>,
    gram: Mat<S>,
    tau: Mat<S>,
    tau_inv: Mat<S>,
    u: KClass<S>,
    w: KClass<S>,
}

const IDX_O: usize = 0;
const IDX_PT: usize = 1;

pub fn build_euler_table<S: Scalar>(geo: &Geometry) -> Result<EulerTable<S>, KTheoryError> {
    let t = geo.arm_count();
    let weights = geo.weights();
    let mut arm_offset = Vec::with_capacity(t);
    let mut n = 2;
    for &p_i in weights {
        arm_offset.push(n);
        n += p_i as usize - 1;
    }

    let mut gram: Mat<S> = Mat::zeros(n, n);
    gram.set(IDX_O, IDX_O, S::one());
    gram.set(IDX_O, IDX_PT, S::one());
    gram.set(IDX_PT, IDX_O, -S::one());
    // ⟨S_pt, S_pt⟩ = 0, ⟨O, S_{i,j}⟩ = 0, arm blocks vs S_pt = 0,
    // distinct arms orthogonal: all already zero.
    for (i, &p_i) in weights.iter().enumerate() {
        let off = arm_offset[i];
        let pi = p_i as usize;
        // ⟨S_{i,1}, O⟩ = -1 and ⟨S_{i,j}, O⟩ = 0 for j > 1
        gram.set(off, IDX_O, -S::one());
        for j in 1..pi {
            for jp in 1..pi {
                let mut v = S::zero();
                if j == jp {
                    v += S::one();
                }
                if jp == j - 1 {
                    v -= S::one();
                }
                if !v.is_zero() {
                    gram.set(off + j - 1, off + jp - 1, v);
                }
            }
        }
    }

    // τ on the basis, one column per basis class.
    let mut tau: Mat<S> = Mat::zeros(n, n);
    let mut tau_inv: Mat<S> = Mat::zeros(n, n);
    let set_col = |m: &mut Mat<S>, col: usize, class: &KClass<S>| {
        for (r, &v) in class.coords().iter().enumerate() {
            m.set(r, col, v);
        }
    };

    let simple_class = |i: usize, j: i64| -> KClass<S> {
        arm_simple_class_raw(n, &arm_offset, weights, i, j)
    };

    // τ[O] = [O(omega)] = [O] - 2[S_pt] + sum_{i,j>=1} [S_{i,j}]
    let mut tau_o = KClass::zero(n);
    tau_o.coords[IDX_O] = S::one();
    tau_o.coords[IDX_PT] = -S::from_i64(2);
    for (i, &p_i) in weights.iter().enumerate() {
        for j in 1..p_i as usize {
            tau_o.coords[arm_offset[i] + j - 1] = S::one();
        }
    }
    set_col(&mut tau, IDX_O, &tau_o);
    // τ⁻¹[O] = [O(-omega)] = [O] + (2-t)[S_pt] + sum_i [S_{i,1}]
    let mut tau_inv_o = KClass::zero(n);
    tau_inv_o.coords[IDX_O] = S::one();
    tau_inv_o.coords[IDX_PT] = S::from_i64(2 - t as i64);
    for off in &arm_offset {
        tau_inv_o.coords[*off] = S::one();
    }
    set_col(&mut tau_inv, IDX_O, &tau_inv_o);

    // τ fixes [S_pt]
    tau.set(IDX_PT, IDX_PT, S::one());
    tau_inv.set(IDX_PT, IDX_PT, S::one());

    // τ[S_{i,j}] = [S_{i,j-1}], τ⁻¹[S_{i,j}] = [S_{i,j+1}]
    for (i, &p_i) in weights.iter().enumerate() {
        for j in 1..p_i as usize {
            let col = arm_offset[i] + j - 1;
            set_col(&mut tau, col, &simple_class(i + 1, j as i64 - 1));
            set_col(&mut tau_inv, col, &simple_class(i + 1, j as i64 + 1));
        }
    }

    // Serre duality as a matrix identity: gram^T = -(gram · tau).
    if gram.transpose() != gram.mul(&tau).neg() {
        return Err(KTheoryError::NormalizationError(
            "assembled τ does not transcribe Serre duality".into(),
        ));
    }
    if tau.mul(&tau_inv) != Mat::identity(n) {
        return Err(KTheoryError::NormalizationError(
            "assembled τ and τ⁻¹ are not inverse".into(),
        ));
    }

    // Radical of the symmetrized form.
    let sym = {
        let mut s = Mat::zeros(n, n);
        let gt = gram.transpose();
        for r in 0..n {
            for c in 0..n {
                s.set(r, c, gram.get(r, c) + gt.get(r, c));
            }
        }
        s
    };
    let radical = linalg::integer_kernel_basis(&sym);
    if radical.len() != 2 {
        return Err(KTheoryError::RadicalRankError(radical.len()));
    }

    // Normalize: deg = ⟨u,-⟩ with deg[O] = 0, deg[S_pt] = p;
    //            rk = ⟨-,w⟩ with rk[O] = 1, rk[S_pt] = 0.
    let p = S::from_i64(geo.p() as i64);
    let r0 = KClass::from_coords(radical[0].clone());
    let r1 = KClass::from_coords(radical[1].clone());
    let pairing = |a: &KClass<S>, b: &KClass<S>| -> S { euler_raw(&gram, a, b) };

    let basis_o = {
        let mut c = KClass::zero(n);
        c.coords[IDX_O] = S::one();
        c
    };
    let basis_pt = {
        let mut c = KClass::zero(n);
        c.coords[IDX_PT] = S::one();
        c
    };

    // u = a r0 + b r1 with ⟨u, e_O⟩ = 0, ⟨u, e_pt⟩ = p
    let u = solve_in_radical(
        &r0,
        &r1,
        pairing(&r0, &basis_o),
        pairing(&r1, &basis_o),
        S::zero(),
        pairing(&r0, &basis_pt),
        pairing(&r1, &basis_pt),
        p,
    )
    .ok_or_else(|| KTheoryError::NormalizationError("no integral u".into()))?;
    // w = a r0 + b r1 with ⟨e_O, w⟩ = 1, ⟨e_pt, w⟩ = 0
    let w = solve_in_radical(
        &r0,
        &r1,
        pairing(&basis_o, &r0),
        pairing(&basis_o, &r1),
        S::one(),
        pairing(&basis_pt, &r0),
        pairing(&basis_pt, &r1),
        S::zero(),
    )
    .ok_or_else(|| KTheoryError::NormalizationError("no integral w".into()))?;

    if pairing(&u, &w) != p || !pairing(&u, &u).is_zero() || !pairing(&w, &w).is_zero() {
        return Err(KTheoryError::NormalizationError(format!(
            "radical pairing off: ⟨u,w⟩ = {}, expected p = {}",
            pairing(&u, &w),
            p
        )));
    }

    Ok(EulerTable {
        geo: geo.clone(),
        n,
        arm_offset,
        gram,
        tau,
        tau_inv,
        u,
        w,
    })
}

/// Solves x = a r0 + b r1 subject to two linear conditions
/// c0(x) = t0, c1(x) = t1, where ci(a r0 + b r1) = a ci0 + b ci1.
#[allow(clippy::too_many_arguments)]
fn solve_in_radical<S: Scalar>(
    r0: &KClass<S>,
    r1: &KClass<S>,
    c00: S,
    c01: S,
    t0: S,
    c10: S,
    c11: S,
    t1: S,
) -> Option<KClass<S>> {
    let det = c00 * c11 - c01 * c10;
    if det.is_zero() {
        return None;
    }
    let qa = Rat::new(t0 * c11 - t1 * c01, det);
    let qb = Rat::new(c00 * t1 - c10 * t0, det);
    if !qa.is_integer() || !qb.is_integer() {
        return None;
    }
    Some(r0.scale(qa.to_integer()).add(&r1.scale(qb.to_integer())))
}

fn euler_raw<S: Scalar>(gram: &Mat<S>, a: &KClass<S>, b: &KClass<S>) -> S {
    let mut acc = S::zero();
    for (r, &ar) in a.coords().iter().enumerate() {
        if ar.is_zero() {
            continue;
        }
        for (c, &bc) in b.coords().iter().enumerate() {
            if bc.is_zero() {
                continue;
            }
            acc += ar * gram.get(r, c) * bc;
        }
    }
    acc
}

/// [S_{i,j}] for any integer j, reducing mod p_i and expanding the
/// non-basis index j = 0 as [S_pt] - sum of the others.
fn arm_simple_class_raw<S: Scalar>(
    n: usize,
    arm_offset: &[usize],
    weights: &[u32],
    arm: usize,
    j: i64,
) -> KClass<S> {
    let p_i = weights[arm - 1] as i64;
    let jr = j.rem_euclid(p_i) as usize;
    let off = arm_offset[arm - 1];
    let mut c = KClass::zero(n);
    if jr == 0 {
        c.coords[IDX_PT] = S::one();
        for jj in 1..p_i as usize {
            c.coords[off + jj - 1] = -S::one();
        }
    } else {
        c.coords[off + jr - 1] = S::one();
    }
    c
}

impl<S: Scalar> EulerTable<S> {
    pub fn geometry(&self) -> &Geometry {
        &self.geo
    }

    /// Dimension of the lattice: 2 + sum (p_i - 1).
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> i64 {
        self.geo.p() as i64
    }

    pub fn class_o(&self) -> KClass<S> {
        let mut c = KClass::zero(self.n);
        c.coords[IDX_O] = S::one();
        c
    }

    pub fn class_spt(&self) -> KClass<S> {
        let mut c = KClass::zero(self.n);
        c.coords[IDX_PT] = S::one();
        c
    }

    /// [S_{arm,j}], j taken mod p_arm, with the j = 0 expansion.
    pub fn arm_simple_class(&self, arm: usize, j: i64) -> KClass<S> {
        assert!(arm >= 1 && arm <= self.geo.arm_count(), "arm out of range");
        arm_simple_class_raw(self.n, &self.arm_offset, self.geo.weights(), arm, j)
    }

    /// Class of the simple over a point with the given ray index.
    pub fn point_simple_class(&self, pt: &PointId, ray: i64) -> KClass<S> {
        match pt {
            PointId::Exceptional(i) => self.arm_simple_class(*i, ray),
            PointId::Ordinary(_) => self.class_spt(),
        }
    }

    pub fn basis_classes(&self) -> Vec<KClass<S>> {
        (0..self.n)
            .map(|i| {
                let mut c = KClass::zero(self.n);
                c.coords[i] = S::one();
                c
            })
            .collect()
    }

    pub fn u(&self) -> &KClass<S> {
        &self.u
    }

    pub fn w(&self) -> &KClass<S> {
        &self.w
    }

    pub fn euler(&self, a: &KClass<S>, b: &KClass<S>) -> S {
        assert_eq!(a.dim(), self.n);
        assert_eq!(b.dim(), self.n);
        euler_raw(&self.gram, a, b)
    }

    pub fn tau_class(&self, a: &KClass<S>) -> KClass<S> {
        KClass::from_coords(self.tau.apply(a.coords()))
    }

    pub fn tau_inv_class(&self, a: &KClass<S>) -> KClass<S> {
        KClass::from_coords(self.tau_inv.apply(a.coords()))
    }

    pub fn rank(&self, a: &KClass<S>) -> S {
        self.euler(a, &self.w)
    }

    pub fn degree(&self, a: &KClass<S>) -> S {
        self.euler(&self.u, a)
    }

    pub fn slope(&self, a: &KClass<S>) -> Result<Slope, KTheoryError> {
        let rk = self.rank(a).as_i64();
        let deg = self.degree(a).as_i64();
        Slope::from_deg_rank(deg, rk).ok_or(KTheoryError::SlopeUndefined(deg))
    }

    /// Sum over a full τ-period: equals rk(a)deg(b) - rk(b)deg(a).
    pub fn riemann_roch(&self, a: &KClass<S>, b: &KClass<S>) -> S {
        let mut acc = S::zero();
        let mut cur = a.clone();
        for _ in 0..self.p() {
            acc += self.euler(&cur, b);
            cur = self.tau_class(&cur);
        }
        acc
    }

    /// Class of the line bundle O(x), walked along a canonical path.
    pub fn line_bundle_class(&self, x: &LElement) -> KClass<S> {
        self.class_along_path(&self.geo.lcanonical_path(x)).1
    }

    /// Walks a generator path from zero, accumulating the class; the
    /// result only depends on the endpoint, which randomized tests check.
    pub fn class_along_path(&self, path: &[LGen]) -> (LElement, KClass<S>) {
        let geo = &self.geo;
        let mut cur = geo.lzero();
        let mut class = self.class_o();
        for g in path {
            match *g {
                LGen::PlusC => {
                    class = class.add(&self.class_spt());
                    cur = geo.ladd(
                        &cur,
                        &LElement {
                            l: 1,
                            lambda: vec![0; geo.arm_count()],
                        },
                    );
                }
                LGen::MinusC => {
                    class = class.sub(&self.class_spt());
                    cur = geo.ladd(
                        &cur,
                        &LElement {
                            l: -1,
                            lambda: vec![0; geo.arm_count()],
                        },
                    );
                }
                LGen::PlusX(i) => {
                    class = class.add(&self.arm_simple_class(i, cur.lambda[i - 1] + 1));
                    let mut lambda = vec![0; geo.arm_count()];
                    lambda[i - 1] = 1;
                    cur = geo.ladd(&cur, &LElement { l: 0, lambda });
                }
                LGen::MinusX(i) => {
                    class = class.sub(&self.arm_simple_class(i, cur.lambda[i - 1]));
                    let mut lambda = vec![0; geo.arm_count()];
                    lambda[i - 1] = -1;
                    cur = geo.ladd(&cur, &LElement { l: 0, lambda });
                }
            }
        }
        (cur, class)
    }

    /// Class of the slope-∞ tube object with the given socle ray and
    /// length: composition factors ascend from the socle.
    pub fn tube_object_class_inf(&self, pt: &PointId, socle: i64, len: u32) -> KClass<S> {
        match pt {
            PointId::Ordinary(_) => self.class_spt().scale(S::from_i64(len as i64)),
            PointId::Exceptional(i) => {
                let mut acc = KClass::zero(self.n);
                for m in 0..len as i64 {
                    acc = acc.add(&self.arm_simple_class(*i, socle + m));
                }
                acc
            }
        }
    }

    /// `[G_q] = r·u + d·w` for q = d/r in lowest terms.
    pub fn generic_class(&self, q: Slope) -> KClass<S> {
        self.u
            .scale(S::from_i64(q.denominator()))
            .add(&self.w.scale(S::from_i64(q.numerator())))
    }

    /// Basis of the radical of the symmetrized form (for diagnostics and
    /// the invariant suite).
    pub fn symmetrized_radical_basis(&self) -> Vec<KClass<S>> {
        let gt = self.gram.transpose();
        let mut sym = Mat::zeros(self.n, self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                sym.set(r, c, self.gram.get(r, c) + gt.get(r, c));
            }
        }
        linalg::integer_kernel_basis(&sym)
            .into_iter()
            .map(KClass::from_coords)
            .collect()
    }
}
