//! Primitives on the unit sphere S^{d-1}: validated unit vectors, angular
//! distances, rotations, coordinate reflections, and the tolerance policy
//! that every geometric predicate consults.
//!
//! All decision predicates in this crate reduce to a signed margin compared
//! against [`TolerancePolicy`]: a strict inequality is only called satisfied
//! with at least `strict` slack, and anything within `band` of the decision
//! boundary is reported [`Verdict::Undecided`] instead of being forced to a
//! side.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SphereError {
    #[error("vector has dimension {0}, supported dimensions are 2..=4")]
    UnsupportedDimension(usize),
    #[error("vector norm {norm} is not within {tol} of 1")]
    NotUnit { norm: f64, tol: f64 },
    #[error("cannot normalize a near-zero vector (norm {0})")]
    ZeroVector(f64),
    #[error("invalid tolerance policy: must satisfy 0 < unit < strict < band < 1e-3")]
    InvalidTolerances,
}

/// Global comparison thresholds for geometric predicates.
///
/// Invariant: `0 < unit < strict < band < 1e-3`.
///
/// * `unit` — slack allowed on "has Euclidean norm 1" checks;
/// * `strict` — margin required before a strict inequality is called
///   satisfied (minimum margin of a valid certificate);
/// * `band` — half-width of the undecided zone around a decision boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub unit: f64,
    pub strict: f64,
    pub band: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            unit: 1e-12,
            strict: 1e-9,
            band: 1e-6,
        }
    }
}

impl TolerancePolicy {
    pub fn new(unit: f64, strict: f64, band: f64) -> Result<Self, SphereError> {
        if 0.0 < unit && unit < strict && strict < band && band < 1e-3 {
            Ok(Self { unit, strict, band })
        } else {
            Err(SphereError::InvalidTolerances)
        }
    }

    /// Three-way decision on a signed margin: positive margins beyond the
    /// band hold, negative margins beyond the band fail, anything inside
    /// `±band` is undecided.
    pub fn verdict(&self, margin: f64) -> Verdict {
        if margin >= self.band {
            Verdict::Holds
        } else if margin <= -self.band {
            Verdict::Fails
        } else {
            Verdict::Undecided
        }
    }

    /// Whether a margin clears the strict-inequality threshold.
    pub fn strictly(&self, margin: f64) -> bool {
        margin >= self.strict
    }
}

/// Outcome of a tolerance-aware predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    pub fn fails(self) -> bool {
        self == Verdict::Fails
    }

    pub fn undecided(self) -> bool {
        self == Verdict::Undecided
    }
}

// ---------------------------------------------------------------------------
// Plain vector helpers. These operate on raw slices so callers can avoid
// round-tripping through UnitVector in inner loops.
// ---------------------------------------------------------------------------

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add_scaled(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// A point on S^{d-1}, validated to unit norm on construction.
///
/// Dimensions 2, 3 and 4 are supported; the code is generic in `d` but the
/// constructors reject anything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Wraps coordinates that are already unit within `tol.unit`.
    pub fn new(coords: Vec<f64>, tol: &TolerancePolicy) -> Result<Self, SphereError> {
        if !(2..=4).contains(&coords.len()) {
            return Err(SphereError::UnsupportedDimension(coords.len()));
        }
        let n = norm(&coords);
        if (n - 1.0).abs() > tol.unit {
            return Err(SphereError::NotUnit { norm: n, tol: tol.unit });
        }
        Ok(Self(coords))
    }

    /// Normalizes arbitrary coordinates onto the sphere.
    pub fn normalized(coords: &[f64]) -> Result<Self, SphereError> {
        if !(2..=4).contains(&coords.len()) {
            return Err(SphereError::UnsupportedDimension(coords.len()));
        }
        let n = norm(coords);
        if n < 1e-12 {
            return Err(SphereError::ZeroVector(n));
        }
        Ok(Self(scale(coords, 1.0 / n)))
    }

    /// The coordinate axis `e_i` (0-based) in dimension `dim`.
    pub fn axis(dim: usize, i: usize) -> Self {
        assert!((2..=4).contains(&dim) && i < dim);
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn negated(&self) -> UnitVector {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = SphereError;

    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        UnitVector::new(coords, &TolerancePolicy::default())
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(v: UnitVector) -> Vec<f64> {
        v.0
    }
}

/// Angular (geodesic) distance between two points of S^{d-1}, in [0, π].
///
/// The inner product is clamped to [-1, 1] before `acos`, so rounding noise
/// never produces NaN.
pub fn angular_distance(a: &UnitVector, b: &UnitVector) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Negates coordinate `axis` (0-based); mirror image in the corresponding
/// coordinate hyperplane.
pub fn reflect_coordinate(v: &UnitVector, axis: usize) -> UnitVector {
    assert!(axis < v.dim());
    let mut c = v.coords().to_vec();
    c[axis] = -c[axis];
    UnitVector(c)
}

/// A d×d rotation matrix (orthogonal, det +1), stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    dim: usize,
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.m[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                m[i * dim + j] = f(i, j);
            }
        }
        Self { dim, m }
    }

    /// The rotation carrying `a` to `b`, acting in the plane they span and
    /// fixing its orthogonal complement.
    ///
    /// For antipodal inputs the rotation plane is spanned by `a` and the
    /// lowest-index coordinate axis not parallel to `a`, which makes the
    /// result deterministic.
    pub fn taking(a: &UnitVector, b: &UnitVector, tol: &TolerancePolicy) -> Rotation {
        assert_eq!(a.dim(), b.dim());
        let d = a.dim();
        let c = a.dot(b).clamp(-1.0, 1.0);

        if 1.0 - c <= tol.unit {
            return Rotation::identity(d);
        }
        if 1.0 + c <= tol.band {
            // b = -a: rotate by π in the plane spanned by a and a fixed axis.
            let axis = (0..d)
                .min_by(|&i, &j| {
                    a.coords()[i]
                        .abs()
                        .partial_cmp(&a.coords()[j].abs())
                        .unwrap()
                        .then(i.cmp(&j))
                })
                .unwrap();
            let mut w: Vec<f64> = UnitVector::axis(d, axis).coords().to_vec();
            let proj = dot(&w, a.coords());
            w = add_scaled(&w, a.coords(), -proj);
            let w = scale(&w, 1.0 / norm(&w));
            let ac = a.coords();
            return Rotation::from_fn(d, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                id - 2.0 * ac[i] * ac[j] - 2.0 * w[i] * w[j]
            });
        }

        // Gram-Schmidt: w completes a to an orthonormal basis of span{a, b}.
        let w = add_scaled(b.coords(), a.coords(), -c);
        let w = scale(&w, 1.0 / norm(&w));
        let s = (1.0 - c * c).max(0.0).sqrt();
        let ac = a.coords();
        Rotation::from_fn(a.dim(), |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id + s * (w[i] * ac[j] - ac[i] * w[j]) + (c - 1.0) * (ac[i] * ac[j] + w[i] * w[j])
        })
    }

    /// Planar rotation by `angle` in the (i, j) coordinate plane, fixing all
    /// other axes. `e_i` maps to `cos·e_i + sin·e_j`.
    pub fn in_plane(dim: usize, i: usize, j: usize, angle: f64) -> Rotation {
        assert!(i < dim && j < dim && i != j);
        let (s, c) = angle.sin_cos();
        Rotation::from_fn(dim, |r, col| match (r, col) {
            (r, c2) if r == i && c2 == i => c,
            (r, c2) if r == j && c2 == j => c,
            (r, c2) if r == i && c2 == j => -s,
            (r, c2) if r == j && c2 == i => s,
            (r, c2) if r == c2 => 1.0,
            _ => 0.0,
        })
    }

    /// Rotation about a coordinate axis in d=3: fixes the axis and turns the
    /// orthogonal plane by `angle` (right-handed).
    pub fn about_axis(axis: usize, angle: f64) -> Rotation {
        assert!(axis < 3);
        let (i, j) = match axis {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        Rotation::in_plane(3, i, j, angle)
    }

    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| dot(&self.m[i * self.dim..(i + 1) * self.dim], v))
            .collect()
    }

    pub fn apply(&self, v: &UnitVector) -> UnitVector {
        let mut out = self.apply_vec(v.coords());
        // Rotations preserve norms up to rounding; renormalize so repeated
        // application cannot drift out of the unit invariant.
        let n = norm(&out);
        for x in &mut out {
            *x /= n;
        }
        UnitVector(out)
    }

    pub fn transpose(&self) -> Rotation {
        Rotation::from_fn(self.dim, |i, j| self.m[j * self.dim + i])
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        Rotation::from_fn(d, |i, j| {
            (0..d).map(|k| self.m[i * d + k] * other.m[k * d + j]).sum()
        })
    }

    /// Max deviation of RᵀR from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let g: f64 = (0..d).map(|k| self.m[k * d + i] * self.m[k * d + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn uv(c: &[f64]) -> UnitVector {
        UnitVector::new(c.to_vec(), &tol()).unwrap()
    }

    #[test]
    fn tolerance_ordering_enforced() {
        assert!(TolerancePolicy::new(1e-12, 1e-9, 1e-6).is_ok());
        assert!(TolerancePolicy::new(1e-9, 1e-12, 1e-6).is_err());
        assert!(TolerancePolicy::new(1e-12, 1e-9, 1e-2).is_err());
        assert!(TolerancePolicy::new(0.0, 1e-9, 1e-6).is_err());
    }

    #[test]
    fn angular_distance_axes() {
        let e1 = UnitVector::axis(3, 0);
        let e2 = UnitVector::axis(3, 1);
        assert_eq!(angular_distance(&e1, &e1), 0.0);
        assert!((angular_distance(&e1, &e1.negated()) - PI).abs() < 1e-15);
        assert!((angular_distance(&e1, &e2) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rotation_taking_identity_and_quarter_turn() {
        let e1 = UnitVector::axis(3, 0);
        let e3 = UnitVector::axis(3, 2);
        let r = Rotation::taking(&e3, &e3, &tol());
        assert_eq!(r, Rotation::identity(3));

        let r = Rotation::taking(&e1, &e3, &tol());
        let img = r.apply(&e1);
        assert!(angular_distance(&img, &e3) < 1e-12);
        assert!(r.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn rotation_taking_antipodal() {
        for a in [
            uv(&[0.0, 0.0, 1.0]),
            uv(&[1.0, 0.0, 0.0]),
            UnitVector::normalized(&[0.3, -0.4, 0.8]).unwrap(),
            UnitVector::normalized(&[0.1, 0.2, -0.3, 0.9]).unwrap(),
        ] {
            let b = a.negated();
            let r = Rotation::taking(&a, &b, &tol());
            let img = r.apply(&a);
            for (x, y) in img.coords().iter().zip(b.coords()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!(r.orthogonality_defect() < 1e-12);
        }
    }

    #[test]
    fn about_axis_examples() {
        let r = Rotation::about_axis(2, 0.0);
        assert_eq!(r, Rotation::identity(3));

        let r = Rotation::about_axis(2, FRAC_PI_2);
        let e1 = UnitVector::axis(3, 0);
        let e2 = UnitVector::axis(3, 1);
        let e3 = UnitVector::axis(3, 2);
        assert!(angular_distance(&r.apply(&e1), &e2) < 1e-12);
        for phi in [0.1, 1.0, 2.5, -0.7] {
            let r = Rotation::about_axis(2, phi);
            assert!(angular_distance(&r.apply(&e3), &e3) < 1e-12);
        }
    }

    #[test]
    fn reflection_examples() {
        let v = uv(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(reflect_coordinate(&v, 0).coords(), &[-1.0, 0.0, 0.0, 0.0]);

        let w = uv(&[0.5, 0.5, 0.5, 0.5]);
        assert_eq!(reflect_coordinate(&w, 2).coords(), &[0.5, 0.5, -0.5, 0.5]);
        assert_eq!(reflect_coordinate(&reflect_coordinate(&w, 2), 2), w);
    }

    #[test]
    fn verdict_banding() {
        let t = tol();
        assert_eq!(t.verdict(1e-3), Verdict::Holds);
        assert_eq!(t.verdict(-1e-3), Verdict::Fails);
        assert_eq!(t.verdict(1e-7), Verdict::Undecided);
        assert_eq!(t.verdict(-1e-7), Verdict::Undecided);
        assert_eq!(t.verdict(0.0), Verdict::Undecided);
    }

    #[test]
    fn unit_vector_rejects_bad_input() {
        assert!(UnitVector::new(vec![1.0, 1.0], &tol()).is_err());
        assert!(UnitVector::new(vec![1.0], &tol()).is_err());
        assert!(UnitVector::normalized(&[0.0, 0.0, 0.0]).is_err());
    }
}
