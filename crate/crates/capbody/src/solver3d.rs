//! Six illumination directions for a centrally symmetric cap packing on S².
//!
//! The construction finds three pairwise orthogonal great circles that
//! separate every cap; the six directions are then the ± normals of those
//! circles. A largest cap is rotated to the north pole first. If the
//! coordinate great circles already separate everything, the axes win.
//! Otherwise some cap meets all three circles — which pins its radius to
//! π/4 and its center to the equator — and turning the frame about the pole
//! so that one circle passes through that cap's center resolves the
//! obstruction. Every branch re-validates its output with the certificate
//! checker instead of trusting the construction.

use serde::{Deserialize, Serialize};

use crate::cap::{is_centrally_symmetric, validate_packing, Cap, CapBody, Packing, PackingCheck};
use crate::illumination::{verify_illumination, DirectionSet, IlluminationCertificate};
use crate::sphere::{Rotation, TolerancePolicy, UnitVector};
use crate::SolveError;

use std::f64::consts::FRAC_PI_4;

/// Which branch produced the separating frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch3D {
    /// The coordinate great circles separate every cap after the polar
    /// normalization.
    CoordinateAxes,
    /// The frame was additionally turned about the pole so a great circle
    /// passes through the center of an equatorial π/4 cap.
    RealignedToEquatorCap,
}

/// A separating orthonormal frame with its validated certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution3D {
    /// The frame normalization applied to the packing (body coordinates →
    /// separating frame).
    pub rotation: Rotation,
    pub branch: Branch3D,
    /// Six directions in the original coordinates: ±f₁, ±f₂, ±f₃ for the
    /// orthonormal frame rows f_i.
    pub directions: DirectionSet,
    pub certificate: IlluminationCertificate,
}

/// Sign-normalized representative of an axis through ±c: the first
/// coordinate that is not essentially zero is made positive.
fn canonical_center(coords: &[f64]) -> Vec<f64> {
    match coords.iter().find(|x| x.abs() > 1e-14) {
        Some(x) if *x < 0.0 => coords.iter().map(|v| -v).collect(),
        _ => coords.to_vec(),
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Margin of the best separating coordinate great circle for a cap.
fn best_axis_margin(cap: &Cap) -> f64 {
    let sin_r = cap.radius().sin();
    cap.center()
        .coords()
        .iter()
        .map(|x| x.abs() - sin_r)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Produces six illumination directions for a centrally symmetric packing
/// on S², together with a validated certificate.
pub fn solve_central_s2(p: &Packing, tol: &TolerancePolicy) -> Result<Solution3D, SolveError> {
    if p.dim() != 3 {
        return Err(SolveError::InvalidInput(format!(
            "expected dimension 3, got {}",
            p.dim()
        )));
    }
    if let PackingCheck::Violation { i, j, overlap } = validate_packing(p.caps(), tol) {
        return Err(SolveError::InvalidPacking { i, j, overlap });
    }
    if !is_centrally_symmetric(p, tol) {
        return Err(SolveError::NotCentrallySymmetric);
    }

    // Normalize: a largest cap (ties broken on the sign-normalized center,
    // lexicographically) goes to the north pole.
    let rotation = match p
        .caps()
        .iter()
        .max_by(|a, b| {
            a.radius().partial_cmp(&b.radius()).unwrap().then_with(|| {
                // Reversed lexicographic order so max_by picks the smallest.
                let (ca, cb) = (
                    canonical_center(a.center().coords()),
                    canonical_center(b.center().coords()),
                );
                if lex_less(&cb, &ca) {
                    std::cmp::Ordering::Less
                } else if lex_less(&ca, &cb) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
        }) {
        Some(cap_max) => {
            let canonical = UnitVector::normalized(&canonical_center(cap_max.center().coords()))
                .expect("cap center is unit");
            Rotation::taking(&canonical, &UnitVector::axis(3, 2), tol)
        }
        None => Rotation::identity(3),
    };

    let rotated: Vec<Cap> = p
        .caps()
        .iter()
        .map(|c| Cap::new(rotation.apply(c.center()), c.radius()).expect("radius unchanged"))
        .collect();

    // Caps grazing a circle within the undecided band count as unseparated;
    // the realignment branch re-verifies, so this is only conservative.
    let unseparated: Vec<&Cap> = rotated
        .iter()
        .filter(|c| !tol.verdict(best_axis_margin(c)).holds())
        .collect();

    let (branch, frame) = if unseparated.is_empty() {
        (Branch3D::CoordinateAxes, rotation.clone())
    } else {
        let problem = unseparated
            .iter()
            .min_by(|a, b| {
                let (ca, cb) = (
                    canonical_center(a.center().coords()),
                    canonical_center(b.center().coords()),
                );
                if lex_less(&ca, &cb) {
                    std::cmp::Ordering::Less
                } else if lex_less(&cb, &ca) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .expect("non-empty");

        let r_max = rotated
            .iter()
            .map(|c| c.radius())
            .fold(f64::NEG_INFINITY, f64::max);
        if (r_max - FRAC_PI_4).abs() > tol.band {
            return Err(SolveError::InternalContradiction(format!(
                "a cap meets all three great circles but the largest radius {r_max} is not π/4"
            )));
        }
        if (problem.radius() - FRAC_PI_4).abs() > tol.band {
            return Err(SolveError::InternalContradiction(format!(
                "unseparated cap radius {} is not π/4",
                problem.radius()
            )));
        }
        let mut center = problem.center().coords().to_vec();
        if center[2].abs() > tol.band {
            return Err(SolveError::InternalContradiction(format!(
                "unseparated cap center {center:?} is off the equator"
            )));
        }
        // Center already lies within the band of the equator; switch to the
        // antipodal cap if it ended up on the far side of the pole.
        if center[2] < -tol.band {
            center = center.iter().map(|x| -x).collect();
        }
        let azimuth = center[1].atan2(center[0]);
        // Turn the frame so one great circle passes through the cap center
        // (the cap lands on an axis and its twin pair on the other).
        let realign = Rotation::about_axis(2, -azimuth);
        (
            Branch3D::RealignedToEquatorCap,
            realign.compose(&rotation),
        )
    };

    // Directions: ± rows of the frame, pulled back to input coordinates.
    let rows = frame.rows();
    let mut dirs = Vec::with_capacity(6);
    for row in &rows {
        dirs.push(UnitVector::normalized(row).expect("rotation row"));
    }
    for row in &rows {
        let neg: Vec<f64> = row.iter().map(|x| -x).collect();
        dirs.push(UnitVector::normalized(&neg).expect("rotation row"));
    }
    let directions = DirectionSet::new(3, dirs).map_err(|e| {
        SolveError::InternalContradiction(format!("direction construction failed: {e}"))
    })?;

    let body = CapBody::from_packing(p, tol)
        .map_err(|e| SolveError::InvalidInput(format!("packing has no dual body: {e}")))?;
    let certificate = verify_illumination(&body, &directions, tol).map_err(|e| {
        SolveError::InternalContradiction(format!(
            "constructed frame fails verification ({branch:?}): {e}"
        ))
    })?;

    Ok(Solution3D {
        rotation: frame,
        branch,
        directions,
        certificate,
    })
}
