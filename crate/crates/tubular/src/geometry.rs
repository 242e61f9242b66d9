//! Weight data for a genus-one weighted projective line and arithmetic in
//! the rank-one twist group L(p).
//!
//! Only the four tubular weight types are accepted: every slope category
//! of such a line decomposes into tube families, which is what the rest
//! of the crate relies on. Points are combinatorial: exceptional points
//! are arm indices carrying the weights, ordinary points are a finite
//! user-declared set of labels (each carrying a rank-one tube).

use thiserror::Error;

/// The four genus-one weight multisets, in their conventional order.
pub const TUBULAR_TYPES: [&[u32]; 4] = [&[2, 2, 2, 2], &[3, 3, 3], &[4, 4, 2], &[6, 3, 2]];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("weights ({0:?}) are not one of the genus-one types (2,2,2,2), (3,3,3), (4,4,2), (6,3,2)")]
    NonTubularWeights(Vec<u32>),
    #[error("duplicate ordinary point label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid ordinary point label `{0}` (must match [A-Za-z_][A-Za-z0-9_]* and not collide with arm indices e1..e{1})")]
    InvalidLabel(String, usize),
}

/// A point of the line: an arm index (1-based) or an ordinary label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointId {
    Exceptional(usize),
    Ordinary(String),
}

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointId::Exceptional(i) => write!(f, "e{i}"),
            PointId::Ordinary(label) => write!(f, "o:{label}"),
        }
    }
}

/// Element of the twist group in coordinates (l, lambda_1..lambda_t) for
/// l*c + sum lambda_i * x_i, subject to p_i * x_i = c. Normal form keeps
/// 0 <= lambda_i < p_i.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LElement {
    pub l: i64,
    pub lambda: Vec<i64>,
}

/// One generator step in the twist group; used to walk paths when
/// checking that class computations are independent of rewriting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LGen {
    PlusC,
    MinusC,
    PlusX(usize),
    MinusX(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometry {
    weights: Vec<u32>,
    p: u32,
    ordinary: Vec<String>,
}

fn lcm_all(ws: &[u32]) -> u32 {
    ws.iter().fold(1u32, |a, &b| num_integer::lcm(a, b))
}

fn valid_label(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Validates the weight data and fixes the point set.
pub fn make_geometry(weights: &[u32], ordinary_labels: &[&str]) -> Result<Geometry, GeometryError> {
    let mut sorted = weights.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    if !TUBULAR_TYPES.iter().any(|t| t == &sorted.as_slice()) {
        return Err(GeometryError::NonTubularWeights(weights.to_vec()));
    }
    let t = weights.len();
    let mut seen = std::collections::BTreeSet::new();
    for &label in ordinary_labels {
        let collides_with_arm = label
            .strip_prefix('e')
            .and_then(|rest| rest.parse::<usize>().ok())
            .is_some_and(|k| k >= 1 && k <= t);
        if !valid_label(label) || collides_with_arm {
            return Err(GeometryError::InvalidLabel(label.to_string(), t));
        }
        if !seen.insert(label) {
            return Err(GeometryError::DuplicateLabel(label.to_string()));
        }
    }
    Ok(Geometry {
        weights: weights.to_vec(),
        p: lcm_all(weights),
        ordinary: ordinary_labels.iter().map(|s| s.to_string()).collect(),
    })
}

impl Geometry {
    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// Number of arms.
    pub fn arm_count(&self) -> usize {
        self.weights.len()
    }

    /// l.c.m. of the weights.
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ordinary_labels(&self) -> &[String] {
        &self.ordinary
    }

    pub fn has_point(&self, pt: &PointId) -> bool {
        match pt {
            PointId::Exceptional(i) => *i >= 1 && *i <= self.arm_count(),
            PointId::Ordinary(label) => self.ordinary.iter().any(|l| l == label),
        }
    }

    /// Rank of the tube over a point: the weight for an arm, one for an
    /// ordinary point.
    pub fn tube_rank(&self, pt: &PointId) -> usize {
        match pt {
            PointId::Exceptional(i) => {
                assert!(*i >= 1 && *i <= self.arm_count(), "arm index out of range");
                self.weights[i - 1] as usize
            }
            PointId::Ordinary(_) => 1,
        }
    }

    /// All declared points: the arms followed by the ordinary labels.
    pub fn points(&self) -> Vec<PointId> {
        let mut pts: Vec<PointId> = (1..=self.arm_count()).map(PointId::Exceptional).collect();
        pts.extend(self.ordinary.iter().cloned().map(PointId::Ordinary));
        pts
    }

    /// Normal form: carries lambda_i into l via p_i * x_i = c until
    /// 0 <= lambda_i < p_i. Idempotent.
    pub fn lnormalize(&self, l: i64, lambda: &[i64]) -> LElement {
        assert_eq!(lambda.len(), self.arm_count(), "lambda length != arm count");
        let mut out_l = l;
        let mut out_lambda = Vec::with_capacity(lambda.len());
        for (i, &li) in lambda.iter().enumerate() {
            let p_i = self.weights[i] as i64;
            let rem = li.rem_euclid(p_i);
            out_l += (li - rem) / p_i;
            out_lambda.push(rem);
        }
        LElement {
            l: out_l,
            lambda: out_lambda,
        }
    }

    pub fn lzero(&self) -> LElement {
        LElement {
            l: 0,
            lambda: vec![0; self.arm_count()],
        }
    }

    pub fn ladd(&self, a: &LElement, b: &LElement) -> LElement {
        let lambda: Vec<i64> = a
            .lambda
            .iter()
            .zip(&b.lambda)
            .map(|(x, y)| x + y)
            .collect();
        self.lnormalize(a.l + b.l, &lambda)
    }

    pub fn lneg(&self, a: &LElement) -> LElement {
        let lambda: Vec<i64> = a.lambda.iter().map(|x| -x).collect();
        self.lnormalize(-a.l, &lambda)
    }

    pub fn lsub(&self, a: &LElement, b: &LElement) -> LElement {
        self.ladd(a, &self.lneg(b))
    }

    /// The dualizing element (t-2)c - sum x_i in normal form. For every
    /// genus-one type this is -2c + sum (p_i - 1) x_i.
    pub fn omega(&self) -> LElement {
        let t = self.arm_count() as i64;
        self.lnormalize(t - 2, &vec![-1; self.arm_count()])
    }

    /// Whether the twist has a section, i.e. lies in the positive cone.
    /// In normal form this is exactly l >= 0.
    pub fn is_effective(&self, x: &LElement) -> bool {
        self.lnormalize(x.l, &x.lambda).l >= 0
    }

    /// Degree form on twists: l*p + sum lambda_i * (p / p_i).
    pub fn ldegree(&self, x: &LElement) -> i64 {
        let n = self.lnormalize(x.l, &x.lambda);
        let p = self.p as i64;
        n.l * p
            + n.lambda
                .iter()
                .zip(&self.weights)
                .map(|(&li, &pi)| li * (p / pi as i64))
                .sum::<i64>()
    }

    /// Endpoint of a generator path starting at zero.
    pub fn lpath_endpoint(&self, path: &[LGen]) -> LElement {
        let mut cur = self.lzero();
        for g in path {
            let step = match g {
                LGen::PlusC => LElement {
                    l: 1,
                    lambda: vec![0; self.arm_count()],
                },
                LGen::MinusC => LElement {
                    l: -1,
                    lambda: vec![0; self.arm_count()],
                },
                LGen::PlusX(i) => {
                    let mut lambda = vec![0; self.arm_count()];
                    lambda[i - 1] = 1;
                    LElement { l: 0, lambda }
                }
                LGen::MinusX(i) => {
                    let mut lambda = vec![0; self.arm_count()];
                    lambda[i - 1] = -1;
                    LElement { l: 0, lambda }
                }
            };
            cur = self.ladd(&cur, &step);
        }
        cur
    }

    /// A canonical path from zero to the normal form of `x`.
    pub fn lcanonical_path(&self, x: &LElement) -> Vec<LGen> {
        let n = self.lnormalize(x.l, &x.lambda);
        let mut path = Vec::new();
        for (i, &li) in n.lambda.iter().enumerate() {
            for _ in 0..li {
                path.push(LGen::PlusX(i + 1));
            }
        }
        let (gen, count) = if n.l >= 0 {
            (LGen::PlusC, n.l)
        } else {
            (LGen::MinusC, -n.l)
        };
        for _ in 0..count {
            path.push(gen);
        }
        path
    }
}
