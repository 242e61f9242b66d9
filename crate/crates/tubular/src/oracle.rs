//! Independent brute-force referee for the tube formulas.
//!
//! A rank-d tube is realized as nilpotent representations of the cyclic
//! quiver with vertices Z/d and one arrow v → v+1. Hom dimensions are
//! the solution-space dimensions of the intertwiner equations
//! f_{v+1} A_v = B_v f_v, solved exactly over the rationals. Ext is
//! always routed through the translate (never by explicit extensions).
//!
//! Labeling dictionary: inside a representation the arrow action moves
//! basis vectors toward the socle, so composition factors descend in the
//! vertex index while tube rays ascend from the socle. The two labelings
//! are matched by negating indices: the tube object with socle ray s
//! corresponds to the representation with socle vertex -s (mod d), and
//! the translate (socle - 1 on rays) becomes vertex + 1 on
//! representations. `rep_of_tube` applies this.

use crate::linalg::{self, Mat};
use crate::scalar::{Rat, Scalar};
use crate::tube::ray_add;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("truncation cap {cap} too small: need at least len + 2d = {need}")]
    CapTooSmall { cap: u32, need: u32 },
}

/// Nilpotent representation of the cyclic quiver on d vertices;
/// `maps[v]` is the matrix of the arrow v → v+1 (mod d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicRep<S: Scalar> {
    d: usize,
    dims: Vec<usize>,
    maps: Vec<Mat<Rat<S>>>,
}

impl<S: Scalar> CyclicRep<S> {
    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn map(&self, v: usize) -> &Mat<Rat<S>> {
        &self.maps[v]
    }
}

/// The uniserial nilpotent representation with the given socle vertex and
/// length: basis z_0 (socle) .. z_{len-1}, z_j at vertex socle - j, the
/// arrow sending z_j to z_{j-1} and z_0 to zero.
pub fn build_indecomposable<S: Scalar>(d: usize, socle: usize, len: u32) -> CyclicRep<S> {
    assert!(d >= 1 && len >= 1);
    let vertex = |j: u32| ray_add(d, socle % d, -(j as i64));
    let mut dims = vec![0usize; d];
    // position of z_j within its vertex
    let mut pos = Vec::with_capacity(len as usize);
    for j in 0..len {
        let v = vertex(j);
        pos.push(dims[v]);
        dims[v] += 1;
    }
    let mut maps: Vec<Mat<Rat<S>>> = (0..d)
        .map(|v| Mat::zeros(dims[(v + 1) % d], dims[v]))
        .collect();
    for j in 1..len {
        let v = vertex(j);
        debug_assert_eq!((v + 1) % d, vertex(j - 1));
        maps[v].set(pos[(j - 1) as usize], pos[j as usize], Rat::from_integer(S::one()));
    }
    CyclicRep { d, dims, maps }
}

/// Representation matching the tube object with the given socle ray.
pub fn rep_of_tube<S: Scalar>(d: usize, socle: usize, len: u32) -> CyclicRep<S> {
    build_indecomposable(d, ray_add(d, 0, -(socle as i64)), len)
}

/// Dimension of the space of intertwiners A → B, by exact elimination.
pub fn oracle_hom_dim<S: Scalar>(a: &CyclicRep<S>, b: &CyclicRep<S>) -> usize {
    assert_eq!(a.d, b.d, "representations over different cyclic quivers");
    let sys = intertwiner_system(a, b);
    if sys.cols() == 0 {
        return 0;
    }
    linalg::kernel_dim(&sys)
}

/// Basis of the intertwiner space, one matrix per vertex, flattened back
/// from the kernel of the constraint system.
pub fn oracle_hom_basis<S: Scalar>(a: &CyclicRep<S>, b: &CyclicRep<S>) -> Vec<Vec<Mat<Rat<S>>>> {
    let sys = intertwiner_system(a, b);
    if sys.cols() == 0 {
        return Vec::new();
    }
    linalg::kernel_basis(&sys)
        .into_iter()
        .map(|flat| unflatten(a, b, &flat))
        .collect()
}

/// Unknowns: entries of f_v (shape b.dims[v] × a.dims[v]) for all v.
/// One equation block per arrow v: f_{v+1} A_v - B_v f_v = 0.
fn intertwiner_system<S: Scalar>(a: &CyclicRep<S>, b: &CyclicRep<S>) -> Mat<Rat<S>> {
    let d = a.d;
    let mut offsets = Vec::with_capacity(d);
    let mut total = 0usize;
    for v in 0..d {
        offsets.push(total);
        total += b.dims[v] * a.dims[v];
    }
    let idx = |v: usize, r: usize, c: usize| offsets[v] + r * a.dims[v] + c;

    let n_eqs: usize = (0..d).map(|v| b.dims[(v + 1) % d] * a.dims[v]).sum();
    let mut sys = Mat::zeros(n_eqs, total);
    let mut eq = 0usize;
    for v in 0..d {
        let w = (v + 1) % d;
        for rp in 0..b.dims[w] {
            for c in 0..a.dims[v] {
                // sum_k f_w[rp][k] * A_v[k][c] - sum_r B_v[rp][r] * f_v[r][c]
                for k in 0..a.dims[w] {
                    let coeff = a.maps[v].get(k, c);
                    if !num_traits::Zero::is_zero(&coeff) {
                        let cur = sys.get(eq, idx(w, rp, k));
                        sys.set(eq, idx(w, rp, k), cur + coeff);
                    }
                }
                for r in 0..b.dims[v] {
                    let coeff = b.maps[v].get(rp, r);
                    if !num_traits::Zero::is_zero(&coeff) {
                        let cur = sys.get(eq, idx(v, r, c));
                        sys.set(eq, idx(v, r, c), cur - coeff);
                    }
                }
                eq += 1;
            }
        }
    }
    sys
}

fn unflatten<S: Scalar>(a: &CyclicRep<S>, b: &CyclicRep<S>, flat: &[Rat<S>]) -> Vec<Mat<Rat<S>>> {
    let mut out = Vec::with_capacity(a.d);
    let mut off = 0usize;
    for v in 0..a.d {
        let mut m = Mat::zeros(b.dims[v], a.dims[v]);
        for r in 0..b.dims[v] {
            for c in 0..a.dims[v] {
                m.set(r, c, flat[off + r * a.dims[v] + c]);
            }
        }
        off += b.dims[v] * a.dims[v];
        out.push(m);
    }
    out
}

/// Tower flavor for `truncation_limit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tower {
    /// Chain `S[1] → S[2] → ...` over the given socle ray.
    Pruefer { socle: usize },
    /// Chain `... → S[-2] → S[-1]` over the given top ray.
    Adic { top: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationReport {
    /// dim Hom(X, stage m) for m = 1..=cap.
    pub dims: Vec<usize>,
    pub stabilized: bool,
    pub stable_value: Option<usize>,
    /// For adic towers: rank of the induced map
    /// Hom(X, S[-(m+1)]) → Hom(X, S[-m]). Zero from the start when X is
    /// a mouth object; for longer X single steps keep rank, and only the
    /// composites die.
    pub transition_ranks: Option<Vec<usize>>,
    /// For adic towers: rank of the image of the composite
    /// Hom(X, S[-cap]) → Hom(X, S[-m]). Eventually zero: each step drops
    /// the image length, so the system is pro-zero.
    pub stable_image_ranks: Option<Vec<usize>>,
}

/// Runs Hom(X, -) along a truncation tower of the tube, reporting the
/// dimension sequence, whether it stabilizes past the guaranteed window,
/// and (for adic towers) the ranks of the connecting maps.
pub fn truncation_limit<S: Scalar>(
    d: usize,
    x: (usize, u32),
    tower: Tower,
    cap: u32,
) -> Result<StabilizationReport, OracleError> {
    let need = x.1 + 2 * d as u32;
    if cap < need {
        return Err(OracleError::CapTooSmall { cap, need });
    }
    let xr = rep_of_tube::<S>(d, x.0, x.1);
    match tower {
        Tower::Pruefer { socle } => {
            let dims: Vec<usize> = (1..=cap)
                .map(|m| oracle_hom_dim(&xr, &rep_of_tube(d, socle, m)))
                .collect();
            let tail = &dims[(x.1 as usize - 1)..];
            let stabilized = tail.windows(2).all(|w| w[0] == w[1]);
            Ok(StabilizationReport {
                stable_value: stabilized.then(|| *dims.last().unwrap()),
                dims,
                stabilized,
                transition_ranks: None,
                stable_image_ranks: None,
            })
        }
        Tower::Adic { top } => {
            // stage m is the length-m object with the fixed top ray
            let stage =
                |m: u32| rep_of_tube::<S>(d, ray_add(d, top, -(m as i64 - 1)), m);
            let dims: Vec<usize> = (1..=cap).map(|m| oracle_hom_dim(&xr, &stage(m))).collect();
            let mut ranks = Vec::with_capacity(cap as usize - 1);
            for m in 1..cap {
                ranks.push(adic_transition_rank(&xr, d, top, m));
            }
            // composite images from the top of the window downwards
            let mut stable = vec![0usize; cap as usize - 1];
            let mut current = oracle_hom_basis(&xr, &stage(cap));
            for m in (1..cap).rev() {
                let big = stage(m + 1);
                let small = stage(m);
                let proj = adic_projection(&big, &small, d);
                current = current
                    .iter()
                    .map(|f| (0..d).map(|v| proj[v].mul(&f[v])).collect::<Vec<_>>())
                    .collect();
                stable[m as usize - 1] = flattened_rank(&small, &xr, &current);
            }
            // every composite of at least X.len steps is zero
            let window = (cap - x.1).max(1) as usize - 1;
            let stabilized = stable[..window].iter().all(|&r| r == 0);
            Ok(StabilizationReport {
                stable_value: stabilized.then_some(0),
                dims,
                stabilized,
                transition_ranks: Some(ranks),
                stable_image_ranks: Some(stable),
            })
        }
    }
}

fn flattened_rank<S: Scalar>(
    target: &CyclicRep<S>,
    source: &CyclicRep<S>,
    maps: &[Vec<Mat<Rat<S>>>],
) -> usize {
    if maps.is_empty() {
        return 0;
    }
    let d = source.rank();
    let cols: usize = (0..d).map(|v| target.dims[v] * source.dims[v]).sum();
    if cols == 0 {
        return 0;
    }
    let rows: Vec<Vec<Rat<S>>> = maps
        .iter()
        .map(|f| {
            let mut flat = Vec::with_capacity(cols);
            for v in 0..d {
                for r in 0..target.dims[v] {
                    for c in 0..source.dims[v] {
                        flat.push(f[v].get(r, c));
                    }
                }
            }
            flat
        })
        .collect();
    linalg::rank(&Mat::from_rows(rows))
}

/// Rank of Hom(X, S[-(m+1)]) → Hom(X, S[-m]) induced by the canonical
/// epimorphism that kills the socle.
fn adic_transition_rank<S: Scalar>(xr: &CyclicRep<S>, d: usize, top: usize, m: u32) -> usize {
    let big = rep_of_tube::<S>(d, ray_add(d, top, -(m as i64)), m + 1);
    let small = rep_of_tube::<S>(d, ray_add(d, top, -(m as i64 - 1)), m);
    let basis = oracle_hom_basis(xr, &big);
    if basis.is_empty() {
        return 0;
    }
    let proj = adic_projection(&big, &small, d);
    let composed: Vec<Vec<Mat<Rat<S>>>> = basis
        .iter()
        .map(|f| (0..d).map(|v| proj[v].mul(&f[v])).collect())
        .collect();
    flattened_rank(&small, xr, &composed)
}

/// Per-vertex matrices of the epimorphism S[-(m+1)] ↠ S[-m]: z_j ↦ z'_{j-1}.
fn adic_projection<S: Scalar>(
    big: &CyclicRep<S>,
    small: &CyclicRep<S>,
    d: usize,
) -> Vec<Mat<Rat<S>>> {
    // both reps were built by build_indecomposable, so basis vector z_j of
    // the big rep sits at vertex socle_big - j; recompute positions
    let positions = |rep: &CyclicRep<S>, socle: usize, len: u32| {
        let mut dims = vec![0usize; d];
        let mut pos = Vec::with_capacity(len as usize);
        for j in 0..len {
            let v = ray_add(d, socle, -(j as i64));
            pos.push((v, dims[v]));
            dims[v] += 1;
        }
        debug_assert_eq!(dims.as_slice(), rep.dims());
        pos
    };
    let socle_big = vertex_of_socle(big);
    let socle_small = vertex_of_socle(small);
    let len_big = big.total_dim() as u32;
    let pos_big = positions(big, socle_big, len_big);
    let pos_small = positions(small, socle_small, len_big - 1);
    let mut mats: Vec<Mat<Rat<S>>> = (0..d)
        .map(|v| Mat::zeros(small.dims[v], big.dims[v]))
        .collect();
    for j in 1..len_big as usize {
        let (vb, pb) = pos_big[j];
        let (vs, ps) = pos_small[j - 1];
        debug_assert_eq!(vb, vs);
        mats[vb].set(ps, pb, Rat::from_integer(S::one()));
    }
    mats
}

/// Socle vertex of a uniserial representation: the unique vertex whose
/// incoming basis chain ends there; recovered from the kernel of the
/// total arrow map.
fn vertex_of_socle<S: Scalar>(rep: &CyclicRep<S>) -> usize {
    for v in 0..rep.d {
        let m = &rep.maps[v];
        // a socle vector at v is killed by the arrow out of v
        let killed = rep.dims[v] > linalg::rank(m);
        if rep.dims[v] > 0 && (m.rows() == 0 || killed) {
            return v;
        }
    }
    panic!("representation has no socle vertex");
}
