//! Combinatorics of a stable tube of rank d.
//!
//! An indecomposable of the tube is a pair (socle ray, length); its
//! quasi-composition factors ascend from the socle: socle, socle+1, ...,
//! socle+len-1 (mod d). The translate τ shifts socle rays down by one.
//! Hom dimensions follow from uniseriality: a map X → Y factors as a
//! quotient of X identified with a subobject of Y, so
//!
//!   dim Hom(X, Y) = #{ j : 1 <= j <= min(lx, ly),
//!                      sx + lx - j ≡ sy (mod d) },
//!
//! and Ext¹(X, Y) = Hom(Y, τX) by Serre duality. The brute-force module
//! `oracle` confirms these counts against explicit linear algebra.

use crate::geometry::{Geometry, PointId};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TubeError {
    #[error("exact adic Ext dimensions are only pinned for quasi-simple arguments (len {0} > 1)")]
    LengthNotSupported(u32),
}

/// Indecomposable of finite length in a tube: socle ray and length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TubeObject {
    pub point: PointId,
    pub socle: usize,
    pub len: u32,
}

/// Direct limit of the chain `S → S[2] → ...` over a fixed socle ray.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrueferObject {
    pub point: PointId,
    pub socle: usize,
}

/// Inverse limit of the chain ... → S[-2] → S over a fixed top ray.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdicObject {
    pub point: PointId,
    pub top: usize,
}

impl TubeObject {
    pub fn new(geo: &Geometry, point: PointId, socle: i64, len: u32) -> Self {
        assert!(len >= 1, "tube objects have positive length");
        let d = geo.tube_rank(&point);
        TubeObject {
            point,
            socle: socle.rem_euclid(d as i64) as usize,
            len,
        }
    }

    /// Ray index of the top: socle + len - 1 (mod d).
    pub fn top(&self, geo: &Geometry) -> usize {
        let d = geo.tube_rank(&self.point);
        ray_add(d, self.socle, self.len as i64 - 1)
    }

    pub fn is_mouth(&self) -> bool {
        self.len == 1
    }
}

/// Ray arithmetic mod the tube rank.
pub fn ray_add(d: usize, ray: usize, shift: i64) -> usize {
    (ray as i64 + shift).rem_euclid(d as i64) as usize
}

// ---- raw combinatorial core, parametric in the tube rank ----

/// dim Hom between (socle, len) pairs in a rank-d tube.
pub fn hom_dim_raw(d: usize, x: (usize, u32), y: (usize, u32)) -> u32 {
    let (sx, lx) = x;
    let (sy, ly) = y;
    let mut count = 0;
    for j in 1..=lx.min(ly) {
        if ray_add(d, sx, lx as i64 - j as i64) == sy % d {
            count += 1;
        }
    }
    count
}

pub fn tau_raw(d: usize, x: (usize, u32)) -> (usize, u32) {
    (ray_add(d, x.0, -1), x.1)
}

pub fn tau_inv_raw(d: usize, x: (usize, u32)) -> (usize, u32) {
    (ray_add(d, x.0, 1), x.1)
}

pub fn ext_dim_raw(d: usize, x: (usize, u32), y: (usize, u32)) -> u32 {
    hom_dim_raw(d, y, tau_raw(d, x))
}

/// dim Hom(X, S[∞]) for the Pruefer sheaf over socle ray `sp`: the
/// stabilized value of `dim Hom(X, S[m])`, reached once m >= X.len.
pub fn hom_to_pruefer_raw(d: usize, x: (usize, u32), sp: usize) -> u32 {
    let (sx, lx) = x;
    let mut count = 0;
    for j in 1..=lx {
        if ray_add(d, sx, lx as i64 - j as i64) == sp % d {
            count += 1;
        }
    }
    count
}

// ---- typed operations over a fixed geometry ----

pub fn tau(geo: &Geometry, x: &TubeObject) -> TubeObject {
    let d = geo.tube_rank(&x.point);
    TubeObject {
        point: x.point.clone(),
        socle: ray_add(d, x.socle, -1),
        len: x.len,
    }
}

pub fn tau_inv(geo: &Geometry, x: &TubeObject) -> TubeObject {
    let d = geo.tube_rank(&x.point);
    TubeObject {
        point: x.point.clone(),
        socle: ray_add(d, x.socle, 1),
        len: x.len,
    }
}

/// Zero when the objects live over different points.
pub fn tube_hom_dim(geo: &Geometry, x: &TubeObject, y: &TubeObject) -> u32 {
    if x.point != y.point {
        return 0;
    }
    hom_dim_raw(
        geo.tube_rank(&x.point),
        (x.socle, x.len),
        (y.socle, y.len),
    )
}

pub fn tube_ext_dim(geo: &Geometry, x: &TubeObject, y: &TubeObject) -> u32 {
    if x.point != y.point {
        return 0;
    }
    tube_hom_dim(geo, y, &tau(geo, x))
}

/// The almost-split sequence 0 → τX → M → X → 0 inside the tube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArSequence {
    pub sub: TubeObject,
    pub middle: Vec<TubeObject>,
    pub quot: TubeObject,
}

pub fn ar_sequence(geo: &Geometry, x: &TubeObject) -> ArSequence {
    let d = geo.tube_rank(&x.point);
    let mut middle = vec![TubeObject {
        point: x.point.clone(),
        socle: ray_add(d, x.socle, -1),
        len: x.len + 1,
    }];
    if x.len > 1 {
        middle.push(TubeObject {
            point: x.point.clone(),
            socle: x.socle,
            len: x.len - 1,
        });
    }
    ArSequence {
        sub: tau(geo, x),
        middle,
        quot: x.clone(),
    }
}

/// dim Hom(X, S[∞]); Ext¹ into a Pruefer object of the same slope is
/// always zero, which `homext` encodes.
pub fn hom_to_pruefer(geo: &Geometry, x: &TubeObject, p: &PrueferObject) -> u32 {
    if x.point != p.point {
        return 0;
    }
    hom_to_pruefer_raw(geo.tube_rank(&x.point), (x.socle, x.len), p.socle)
}

/// dim Ext¹(E, S[-∞]) for a quasi-simple E: one exactly when E is the
/// translate-back τ⁻¹ of the mouth object on the adic's top ray.
pub fn ext_to_adic(geo: &Geometry, e: &TubeObject, a: &AdicObject) -> Result<u32, TubeError> {
    if e.len != 1 {
        return Err(TubeError::LengthNotSupported(e.len));
    }
    if e.point != a.point {
        return Ok(0);
    }
    let d = geo.tube_rank(&e.point);
    Ok(u32::from(e.socle == ray_add(d, a.top, 1)))
}
