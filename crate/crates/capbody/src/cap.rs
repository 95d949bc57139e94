//! Caps, cap bodies, packings, symmetry predicates and the k-tangent
//! classification.
//!
//! A vertex `v` outside the unit ball is dual to the closed spherical cap
//! `{p ∈ S^{d-1} : ⟨p, v⟩ ≥ 1}`, whose center is `v/‖v‖` and whose spherical
//! radius `r` satisfies `cos r = 1/‖v‖`. The caps induced by a valid cap
//! body form a packing: closed caps may touch, interiors stay disjoint.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::{
    angular_distance, norm, reflect_coordinate, scale, TolerancePolicy, UnitVector,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CapError {
    #[error("vertex with norm {0} is not strictly outside the unit ball")]
    VertexInsideBall(f64),
    #[error("cap radius {0} is outside (0, π/2); a radius ≥ π/2 would make the body unbounded")]
    InvalidRadius(f64),
    #[error("point lies inside the cap (distance {dist}, radius {radius})")]
    PointInsideCap { dist: f64, radius: f64 },
    #[error("k must satisfy 2 ≤ k ≤ dim, got k={k}, dim={dim}")]
    InvalidTangencyCount { k: usize, dim: usize },
    #[error("caps {i} and {j} overlap: inner product exceeds packing bound by {overlap:.3e}")]
    PackingViolation { i: usize, j: usize, overlap: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Sphere(#[from] crate::sphere::SphereError),
}

/// A closed spherical cap: unit center and spherical radius in (0, π/2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CapRaw", into = "CapRaw")]
pub struct Cap {
    center: UnitVector,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
struct CapRaw {
    center: Vec<f64>,
    radius: f64,
}

impl TryFrom<CapRaw> for Cap {
    type Error = CapError;
    fn try_from(raw: CapRaw) -> Result<Self, CapError> {
        let center = UnitVector::new(raw.center, &TolerancePolicy::default())?;
        Cap::new(center, raw.radius)
    }
}

impl From<Cap> for CapRaw {
    fn from(c: Cap) -> CapRaw {
        CapRaw {
            center: c.center.coords().to_vec(),
            radius: c.radius,
        }
    }
}

impl Cap {
    pub fn new(center: UnitVector, radius: f64) -> Result<Self, CapError> {
        if !(radius > 0.0 && radius < std::f64::consts::FRAC_PI_2) {
            return Err(CapError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &UnitVector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn antipodal(&self) -> Cap {
        Cap {
            center: self.center.negated(),
            radius: self.radius,
        }
    }

    pub fn reflected(&self, axis: usize) -> Cap {
        Cap {
            center: reflect_coordinate(&self.center, axis),
            radius: self.radius,
        }
    }
}

/// The cap dual to an outside vertex: center `v/‖v‖`, radius `arccos(1/‖v‖)`.
pub fn cap_from_vertex(v: &[f64], tol: &TolerancePolicy) -> Result<Cap, CapError> {
    let n = norm(v);
    if n < 1.0 + tol.strict {
        return Err(CapError::VertexInsideBall(n));
    }
    let center = UnitVector::normalized(v)?;
    Cap::new(center, (1.0 / n).acos())
}

/// The vertex dual to a cap: `center / cos(radius)`.
pub fn vertex_from_cap(c: &Cap) -> Vec<f64> {
    scale(c.center.coords(), 1.0 / c.radius.cos())
}

/// Result of checking the pairwise packing condition
/// `⟨cᵢ, cⱼ⟩ ≤ cos(rᵢ + rⱼ)`. On failure reports the worst offending pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PackingCheck {
    Ok,
    Violation { i: usize, j: usize, overlap: f64 },
}

impl PackingCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, PackingCheck::Ok)
    }
}

/// Touching caps (equality) are accepted, with `tol.strict` slack on the
/// inner product.
pub fn validate_packing(caps: &[Cap], tol: &TolerancePolicy) -> PackingCheck {
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..caps.len() {
        for j in (i + 1)..caps.len() {
            let ip = caps[i].center.dot(&caps[j].center);
            let overlap = ip - (caps[i].radius + caps[j].radius).cos();
            if overlap > tol.strict && worst.map_or(true, |(_, _, w)| overlap > w) {
                worst = Some((i, j, overlap));
            }
        }
    }
    match worst {
        None => PackingCheck::Ok,
        Some((i, j, overlap)) => PackingCheck::Violation { i, j, overlap },
    }
}

/// A validated packing of closed caps on S^{d-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PackingRaw", into = "PackingRaw")]
pub struct Packing {
    dim: usize,
    caps: Vec<Cap>,
}

#[derive(Serialize, Deserialize)]
struct PackingRaw {
    dim: usize,
    caps: Vec<Cap>,
}

impl TryFrom<PackingRaw> for Packing {
    type Error = CapError;
    fn try_from(raw: PackingRaw) -> Result<Self, CapError> {
        Packing::new(raw.dim, raw.caps, &TolerancePolicy::default())
    }
}

impl From<Packing> for PackingRaw {
    fn from(p: Packing) -> PackingRaw {
        PackingRaw {
            dim: p.dim,
            caps: p.caps,
        }
    }
}

impl Packing {
    pub fn new(dim: usize, caps: Vec<Cap>, tol: &TolerancePolicy) -> Result<Self, CapError> {
        for c in &caps {
            if c.dim() != dim {
                return Err(CapError::DimensionMismatch {
                    expected: dim,
                    got: c.dim(),
                });
            }
        }
        match validate_packing(&caps, tol) {
            PackingCheck::Ok => Ok(Self { dim, caps }),
            PackingCheck::Violation { i, j, overlap } => {
                Err(CapError::PackingViolation { i, j, overlap })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }
}

/// A cap body: finitely many vertices strictly outside the unit ball whose
/// induced caps pack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CapBodyRaw", into = "CapBodyRaw")]
pub struct CapBody {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CapBodyRaw {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl TryFrom<CapBodyRaw> for CapBody {
    type Error = CapError;
    fn try_from(raw: CapBodyRaw) -> Result<Self, CapError> {
        CapBody::new(raw.dim, raw.vertices, &TolerancePolicy::default())
    }
}

impl From<CapBody> for CapBodyRaw {
    fn from(b: CapBody) -> CapBodyRaw {
        CapBodyRaw {
            dim: b.dim,
            vertices: b.vertices,
        }
    }
}

impl CapBody {
    pub fn new(
        dim: usize,
        vertices: Vec<Vec<f64>>,
        tol: &TolerancePolicy,
    ) -> Result<Self, CapError> {
        let mut caps = Vec::with_capacity(vertices.len());
        for v in &vertices {
            if v.len() != dim {
                return Err(CapError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            caps.push(cap_from_vertex(v, tol)?);
        }
        match validate_packing(&caps, tol) {
            PackingCheck::Ok => Ok(Self { dim, vertices }),
            PackingCheck::Violation { i, j, overlap } => {
                Err(CapError::PackingViolation { i, j, overlap })
            }
        }
    }

    pub fn from_packing(p: &Packing, tol: &TolerancePolicy) -> Result<Self, CapError> {
        CapBody::new(p.dim, p.caps.iter().map(vertex_from_cap).collect(), tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// The induced caps, in vertex order.
    pub fn caps(&self, tol: &TolerancePolicy) -> Vec<Cap> {
        self.vertices
            .iter()
            .map(|v| cap_from_vertex(v, tol).expect("validated on construction"))
            .collect()
    }

    pub fn to_packing(&self, tol: &TolerancePolicy) -> Packing {
        Packing {
            dim: self.dim,
            caps: self.caps(tol),
        }
    }
}

fn find_matching_cap(caps: &[Cap], target: &Cap, tol: &TolerancePolicy) -> bool {
    caps.iter().any(|c| {
        angular_distance(&c.center, &target.center) <= tol.band
            && (c.radius - target.radius).abs() <= tol.band
    })
}

/// Whether every cap has an antipodal partner of equal radius.
pub fn is_centrally_symmetric(p: &Packing, tol: &TolerancePolicy) -> bool {
    p.caps
        .iter()
        .all(|c| find_matching_cap(&p.caps, &c.antipodal(), tol))
}

/// Whether the cap multiset is closed under every coordinate reflection.
/// Caps centered on a coordinate greatsphere are their own image under that
/// reflection.
pub fn is_unconditional(p: &Packing, tol: &TolerancePolicy) -> bool {
    (0..p.dim).all(|axis| {
        p.caps
            .iter()
            .all(|c| find_matching_cap(&p.caps, &c.reflected(axis), tol))
    })
}

/// The forced radius of a cap tangent to `k` coordinate greatspheres with its
/// center on the remaining `d−k`: `arcsin(1/√k)`.
pub fn k_tangent_radius(k: usize, dim: usize) -> Result<f64, CapError> {
    if k < 2 || k > dim {
        return Err(CapError::InvalidTangencyCount { k, dim });
    }
    Ok((1.0 / (k as f64).sqrt()).asin())
}

/// Which coordinate greatspheres a cap is tangent to, and which it is
/// centered on. Tangency count `k` is at least 2: a cap tangent to a single
/// greatsphere would be a hemisphere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTangentProfile {
    pub tangent_axes: BTreeSet<usize>,
    pub centered_axes: BTreeSet<usize>,
}

impl KTangentProfile {
    pub fn k(&self) -> usize {
        self.tangent_axes.len()
    }
}

/// Classifies a cap as k-tangent, or returns `None`.
///
/// Signs are normalized first (the representative with non-negative center
/// coordinates is classified), so the result is invariant under coordinate
/// reflections.
pub fn classify_k_tangent(c: &Cap, tol: &TolerancePolicy) -> Option<KTangentProfile> {
    let d = c.dim();
    let sin_r = c.radius.sin();
    let mut tangent = BTreeSet::new();
    let mut centered = BTreeSet::new();
    for (i, &x) in c.center.coords().iter().enumerate() {
        let a = x.abs();
        if (a - sin_r).abs() <= tol.band {
            tangent.insert(i);
        } else if a <= tol.band {
            centered.insert(i);
        } else {
            return None;
        }
    }
    let k = tangent.len();
    if k < 2 {
        return None;
    }
    let expected = k_tangent_radius(k, d).ok()?;
    if (c.radius - expected).abs() > tol.band {
        return None;
    }
    Some(KTangentProfile {
        tangent_axes: tangent,
        centered_axes: centered,
    })
}

/// Necessary condition for a set of k₁-tangent caps and a set of k₂-tangent
/// caps to pack on S^{d-1}: `k₁ + k₂ − d ≤ √((k₁−1)(k₂−1)) − 1`.
pub fn ktangent_sets_compatible(k1: usize, k2: usize, d: usize) -> bool {
    assert!(k1 >= 2 && k1 <= d && k2 >= 2 && k2 <= d);
    (k1 + k2) as f64 - d as f64 <= (((k1 - 1) * (k2 - 1)) as f64).sqrt() - 1.0
}

/// Validates a system of distinct k-tangent families: every pair must pass
/// [`ktangent_sets_compatible`], and two 2-tangent families must use
/// disjoint tangency axes (packing forces the shared-axis count to zero).
pub fn ktangent_family_system_valid(families: &[KTangentProfile], d: usize) -> bool {
    for i in 0..families.len() {
        for j in (i + 1)..families.len() {
            let (a, b) = (&families[i], &families[j]);
            if !ktangent_sets_compatible(a.k(), b.k(), d) {
                return false;
            }
            if a.k() == 2 && b.k() == 2 && !a.tangent_axes.is_disjoint(&b.tangent_axes) {
                return false;
            }
        }
    }
    true
}

/// Sine of the half view angle of `cap` from an outside point `p`:
/// `sin α = sin r / sin d(p, center)`.
///
/// For points beyond the antipodal mirror of the cap the ratio exceeds 1 and
/// no tangent great circles through `p` exist; the raw ratio is returned and
/// the caller decides.
pub fn view_angle_sin(cap: &Cap, p: &UnitVector, tol: &TolerancePolicy) -> Result<f64, CapError> {
    let dist = angular_distance(cap.center(), p);
    if dist <= cap.radius + tol.strict {
        return Err(CapError::PointInsideCap {
            dist,
            radius: cap.radius,
        });
    }
    Ok(cap.radius.sin() / dist.sin())
}
