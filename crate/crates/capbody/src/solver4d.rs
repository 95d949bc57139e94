//! Eight illumination directions for an unconditionally symmetric cap
//! packing on S³.
//!
//! If the four coordinate greatspheres separate every cap, the ±axes win.
//! Otherwise every unseparated cap must be k-tangent (tangent to k
//! coordinate greatspheres, centered on the rest, radius arcsin(1/√k)), and
//! the compatibility rules between k-tangent families leave exactly four
//! configurations up to signed permutation of the axes. Each has a known
//! system of four pairwise orthogonal separating greatspheres; the solver
//! detects the configuration, maps it to canonical coordinates, pulls the
//! canonical normals back and re-validates the result with the certificate
//! checker.
//!
//! The module also hosts the stranded-point search (the point maximizing
//! the distance to the nearest cap) and grid feasibility searches
//! certifying that no cap can evade the two- and three-tangent separating
//! systems.

use serde::{Deserialize, Serialize};

use crate::cap::{
    classify_k_tangent, is_unconditional, ktangent_family_system_valid, validate_packing, Cap,
    CapBody, KTangentProfile, Packing, PackingCheck,
};
use crate::illumination::{verify_illumination, DirectionSet, IlluminationCertificate};
use crate::sampling::sphere_lattice;
use crate::sphere::{dot, norm, TolerancePolicy, UnitVector};
use crate::SolveError;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// The canonical unseparated-cap configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseKind {
    /// Every cap is separated by a coordinate greatsphere already.
    CoordinateAxesSuffice,
    /// Two 2-tangent families on disjoint axis pairs (8 caps, radii π/4).
    EightTwoTangent,
    /// One 4-tangent family (16 caps, radii π/6).
    SixteenFourTangent,
    /// One 2-tangent family (4 caps, radii π/4).
    FourTwoTangent,
    /// One 3-tangent family (8 caps, radii arcsin(1/√3)).
    EightThreeTangent,
}

/// A signed permutation of the four axes: maps instance coordinates to the
/// canonical frame via `y[i] = sign[i] · x[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub perm: [usize; 4],
    pub signs: [i8; 4],
}

impl SignedPermutation {
    pub fn identity() -> Self {
        Self {
            perm: [0, 1, 2, 3],
            signs: [1, 1, 1, 1],
        }
    }

    pub fn is_identity(&self) -> bool {
        self == &Self::identity()
    }

    /// Instance coordinates → canonical coordinates.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..4)
            .map(|i| f64::from(self.signs[i]) * x[self.perm[i]])
            .collect()
    }

    /// Canonical coordinates → instance coordinates.
    pub fn apply_inverse(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; 4];
        for i in 0..4 {
            x[self.perm[i]] = f64::from(self.signs[i]) * y[i];
        }
        x
    }

    /// All 384 signed permutations, identity first, in a fixed order.
    pub fn enumerate() -> Vec<SignedPermutation> {
        let mut perms = Vec::new();
        let mut axes = [0usize, 1, 2, 3];
        permutations(&mut axes, 0, &mut perms);
        let mut out = Vec::with_capacity(384);
        for perm in perms {
            for mask in 0..16u8 {
                let signs = [
                    if mask & 1 == 0 { 1 } else { -1 },
                    if mask & 2 == 0 { 1 } else { -1 },
                    if mask & 4 == 0 { 1 } else { -1 },
                    if mask & 8 == 0 { 1 } else { -1 },
                ];
                out.push(SignedPermutation { perm, signs });
            }
        }
        out
    }
}

fn permutations(axes: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
    if k == 4 {
        out.push(*axes);
        return;
    }
    for i in k..4 {
        axes.swap(k, i);
        permutations(axes, k + 1, out);
        axes.swap(k, i);
    }
}

/// Detected configuration and the signed permutation normalizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseId {
    pub kind: CaseKind,
    pub axis_map: SignedPermutation,
}

/// An illumination solution on S³.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution4D {
    pub case: CaseId,
    /// Eight directions: ± four pairwise orthogonal greatsphere normals.
    pub directions: DirectionSet,
    pub certificate: IlluminationCertificate,
}

fn best_axis_margin(cap: &Cap) -> f64 {
    let sin_r = cap.radius().sin();
    cap.center()
        .coords()
        .iter()
        .map(|x| x.abs() - sin_r)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The canonical center patterns of each configuration (non-negative
/// representatives; the orbit is their sign closure).
fn canonical_centers(kind: CaseKind) -> Vec<Vec<f64>> {
    let h = 0.5f64.sqrt();
    let s3 = (1.0f64 / 3.0).sqrt();
    let patterns: Vec<Vec<f64>> = match kind {
        CaseKind::CoordinateAxesSuffice => return Vec::new(),
        CaseKind::EightTwoTangent => vec![vec![h, h, 0.0, 0.0], vec![0.0, 0.0, h, h]],
        CaseKind::SixteenFourTangent => vec![vec![0.5, 0.5, 0.5, 0.5]],
        CaseKind::FourTwoTangent => vec![vec![h, h, 0.0, 0.0]],
        CaseKind::EightThreeTangent => vec![vec![s3, s3, s3, 0.0]],
    };
    let mut out = Vec::new();
    for p in patterns {
        out.extend(sign_closure(&p));
    }
    out
}

fn sign_closure(pattern: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![pattern.to_vec()];
    for i in 0..pattern.len() {
        if pattern[i] != 0.0 {
            let mut flipped: Vec<Vec<f64>> = out
                .iter()
                .map(|v| {
                    let mut w = v.clone();
                    w[i] = -w[i];
                    w
                })
                .collect();
            out.append(&mut flipped);
        }
    }
    out
}

/// Classifies the unseparated caps of an unconditional packing on S³ and
/// derives the signed permutation bringing them to canonical coordinates.
pub fn detect_case(p: &Packing, tol: &TolerancePolicy) -> Result<CaseId, SolveError> {
    if p.dim() != 4 {
        return Err(SolveError::InvalidInput(format!(
            "expected dimension 4, got {}",
            p.dim()
        )));
    }
    if let PackingCheck::Violation { i, j, overlap } = validate_packing(p.caps(), tol) {
        return Err(SolveError::InvalidPacking { i, j, overlap });
    }
    if !is_unconditional(p, tol) {
        return Err(SolveError::NotUnconditional);
    }

    // Grazing caps count as unseparated; the final verification of the
    // solver is the safety net.
    let unseparated: Vec<&Cap> = p
        .caps()
        .iter()
        .filter(|c| !tol.verdict(best_axis_margin(c)).holds())
        .collect();
    if unseparated.is_empty() {
        return Ok(CaseId {
            kind: CaseKind::CoordinateAxesSuffice,
            axis_map: SignedPermutation::identity(),
        });
    }

    // Every unseparated cap must be k-tangent in a valid unconditional
    // packing; group them into families by tangency axes.
    let mut families: Vec<(KTangentProfile, usize)> = Vec::new();
    for c in &unseparated {
        let profile = classify_k_tangent(c, tol).ok_or_else(|| {
            SolveError::InvalidInput(format!(
                "cap at {:?} (radius {}) is not separated by the coordinate greatspheres \
                 and is not k-tangent",
                c.center().coords(),
                c.radius()
            ))
        })?;
        match families.iter_mut().find(|(f, _)| *f == profile) {
            Some((_, count)) => *count += 1,
            None => families.push((profile, 1)),
        }
    }
    let profiles: Vec<KTangentProfile> = families.iter().map(|(f, _)| f.clone()).collect();
    if !ktangent_family_system_valid(&profiles, 4) {
        return Err(SolveError::UnrecognizedConfiguration(format!(
            "incompatible k-tangent families: {profiles:?}"
        )));
    }

    let ks: Vec<usize> = profiles.iter().map(|f| f.k()).collect();
    let kind = match ks.as_slice() {
        [2] => CaseKind::FourTwoTangent,
        [3] => CaseKind::EightThreeTangent,
        [4] => CaseKind::SixteenFourTangent,
        [2, 2] => CaseKind::EightTwoTangent,
        other => {
            return Err(SolveError::UnrecognizedConfiguration(format!(
                "k-tangent families with k = {other:?}"
            )))
        }
    };

    let targets = canonical_centers(kind);
    if targets.len() != unseparated.len() {
        return Err(SolveError::UnrecognizedConfiguration(format!(
            "expected {} unseparated caps for {kind:?}, found {}",
            targets.len(),
            unseparated.len()
        )));
    }

    // First signed permutation mapping every unseparated center onto the
    // canonical set. Enumeration starts at the identity, so canonical
    // instances map to themselves.
    let axis_map = SignedPermutation::enumerate()
        .into_iter()
        .find(|sp| {
            unseparated.iter().all(|c| {
                let mapped = sp.apply(c.center().coords());
                targets
                    .iter()
                    .any(|t| norm(&crate::sphere::sub(&mapped, t)) <= tol.band * 4.0)
            })
        })
        .ok_or_else(|| {
            SolveError::UnrecognizedConfiguration(format!(
                "no signed permutation maps the {kind:?} instance onto canonical coordinates"
            ))
        })?;

    Ok(CaseId { kind, axis_map })
}

/// Canonical separating greatsphere normals for each configuration.
fn canonical_normals(kind: CaseKind) -> [Vec<f64>; 4] {
    let h = 0.5f64.sqrt();
    match kind {
        CaseKind::CoordinateAxesSuffice => [
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ],
        CaseKind::EightTwoTangent | CaseKind::SixteenFourTangent => [
            vec![h, h, 0.0, 0.0],
            vec![h, -h, 0.0, 0.0],
            vec![0.0, 0.0, h, h],
            vec![0.0, 0.0, h, -h],
        ],
        CaseKind::FourTwoTangent | CaseKind::EightThreeTangent => [
            vec![h, h, 0.0, 0.0],
            vec![h, -h, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ],
    }
}

/// Produces eight illumination directions for an unconditionally symmetric
/// packing on S³, with a validated certificate.
pub fn solve_unconditional_s3(
    p: &Packing,
    tol: &TolerancePolicy,
) -> Result<Solution4D, SolveError> {
    let case = detect_case(p, tol)?;
    let normals = canonical_normals(case.kind);

    let mut dirs = Vec::with_capacity(8);
    for n in &normals {
        let pulled = case.axis_map.apply_inverse(n);
        dirs.push(UnitVector::normalized(&pulled).expect("normal is unit"));
    }
    for n in &normals {
        let pulled = case.axis_map.apply_inverse(n);
        let neg: Vec<f64> = pulled.iter().map(|x| -x).collect();
        dirs.push(UnitVector::normalized(&neg).expect("normal is unit"));
    }
    let directions = DirectionSet::new(4, dirs).map_err(|e| {
        SolveError::InternalContradiction(format!("direction construction failed: {e}"))
    })?;

    let body = CapBody::from_packing(p, tol)
        .map_err(|e| SolveError::InvalidInput(format!("packing has no dual body: {e}")))?;
    let certificate = verify_illumination(&body, &directions, tol).map_err(|e| {
        SolveError::InternalContradiction(format!(
            "separating system for {:?} fails verification: {e}",
            case.kind
        ))
    })?;

    Ok(Solution4D {
        case,
        directions,
        certificate,
    })
}

/// A stranded point: maximizer of the distance to the nearest cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stranded {
    pub point: UnitVector,
    pub dist: f64,
}

fn min_cap_clearance(caps: &[Cap], x: &[f64]) -> f64 {
    caps.iter()
        .map(|c| {
            let d = dot(c.center().coords(), x).clamp(-1.0, 1.0).acos();
            d - c.radius()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Maximizes the spherical distance to the nearest cap over a quasi-uniform
/// grid of `grid_points` directions, then refines locally by golden-section
/// line searches on the sphere down to a 1e-9 bracket.
pub fn stranded_distance(p: &Packing, grid_points: usize) -> Stranded {
    assert!(!p.is_empty(), "stranded point needs at least one cap");
    let dim = p.dim();
    let caps = p.caps();

    // Grid phase. Comparisons happen in inner-product space: x improves on
    // the incumbent iff every cap center has ⟨c, x⟩ below cos(best + r).
    let mut best_x: Vec<f64> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut thresholds: Vec<f64> = vec![f64::INFINITY; caps.len()];
    for x in sphere_lattice(dim, grid_points.max(1), 0) {
        let improves = caps
            .iter()
            .zip(&thresholds)
            .all(|(c, &th)| dot(c.center().coords(), &x) < th);
        if improves {
            let v = min_cap_clearance(&caps, &x);
            if v > best {
                best = v;
                best_x = x;
                for (c, th) in caps.iter().zip(thresholds.iter_mut()) {
                    let a = best + c.radius();
                    *th = if a >= PI { -1.0 } else { a.cos() };
                }
            }
        }
    }

    // Refinement phase: golden-section along rotating tangent directions.
    let area = match dim {
        2 => std::f64::consts::TAU,
        3 => 4.0 * PI,
        _ => 2.0 * PI * PI,
    };
    let spacing = (area / grid_points.max(1) as f64).powf(1.0 / (dim as f64 - 1.0));
    let mut h = 2.0 * spacing;
    let mut sweep = 0u64;
    while h > 1e-9 && sweep < 400 {
        let mut improved = false;
        for t in tangent_directions(&best_x, sweep) {
            let (theta, val) = golden_max(
                |theta| {
                    let cand = geodesic_step(&best_x, &t, theta);
                    min_cap_clearance(&caps, &cand)
                },
                -h,
                h,
                1e-12,
            );
            if val > best {
                best_x = geodesic_step(&best_x, &t, theta);
                best = val;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
        sweep += 1;
    }

    Stranded {
        point: UnitVector::normalized(&best_x).expect("grid point"),
        dist: best,
    }
}

/// An orthonormal basis of the tangent space at `x`, built from a frame
/// that varies with the sweep index so line searches are not locked to one
/// set of ridge directions.
fn tangent_directions(x: &[f64], sweep: u64) -> Vec<Vec<f64>> {
    let d = x.len();
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
    // Seed frame: coordinate axes rotated inside alternating planes by an
    // angle stepping with the sweep.
    let angle = 0.618_033_988_749_895 * sweep as f64;
    let (s, c) = angle.sin_cos();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    for i in 0..d {
        let j = (i + 1 + (sweep as usize) % (d - 1)) % d;
        let mut v = vec![0.0; d];
        v[i] = c;
        v[j] += s;
        frame.push(v);
    }
    for v in frame {
        let mut w = v;
        for b in &basis {
            let proj = dot(&w, b);
            w = crate::sphere::add_scaled(&w, b, -proj);
        }
        let n = norm(&w);
        if n > 1e-9 {
            let unit: Vec<f64> = w.iter().map(|y| y / n).collect();
            basis.push(unit.clone());
            dirs.push(unit);
        }
    }
    dirs
}

fn geodesic_step(x: &[f64], t: &[f64], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let out: Vec<f64> = x.iter().zip(t).map(|(a, b)| c * a + s * b).collect();
    let n = norm(&out);
    out.iter().map(|v| v / n).collect()
}

/// Golden-section maximization of a unimodal-enough function on [lo, hi].
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, eps: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > eps {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// A candidate cap produced by the escape searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeCandidate {
    pub center: [f64; 4],
    pub radius: f64,
}

/// Grid search for a cap that packs with the four 2-tangent caps, meets all
/// four separating greatspheres of their system, yet avoids the first
/// coordinate greatsphere. Every constraint is relaxed by a slack
/// proportional to `resolution`, so an empty result certifies infeasibility
/// off-grid as well. Returns the first relaxed-feasible grid point, if any.
pub fn search_cap_evading_two_tangent_system(resolution: f64) -> Option<EscapeCandidate> {
    let slack = 2.0 * resolution;
    let mut r0 = resolution;
    while r0 < FRAC_PI_2 {
        let sin_r = r0.sin();
        let pack_bound = (r0 + FRAC_PI_4).cos() * 2.0f64.sqrt(); // x₁ + x₂ ≤ √2·cos(r₀+π/4)
        let f_bound = 2.0f64.sqrt() * sin_r; // x₁ + x₂ ≤ √2·sin r₀ (meets F₁)

        let x1_lo = (sin_r - slack).max(0.0);
        let x1_hi = (pack_bound + slack).min(f_bound + slack).min(1.0);
        let mut x1 = x1_lo;
        while x1 <= x1_hi {
            let x2_hi = (pack_bound - x1 + slack)
                .min(f_bound - x1 + slack)
                .min(1.0);
            let mut x2 = 0.0;
            while x2 <= x2_hi {
                // Meets F₂: |x₁ - x₂| ≤ √2·sin r₀.
                if (x1 - x2).abs() <= f_bound + slack {
                    let mut x3 = 0.0;
                    let x3_hi = (sin_r + slack).min(1.0);
                    while x3 <= x3_hi {
                        let rem = 1.0 - x1 * x1 - x2 * x2 - x3 * x3;
                        if rem >= -1e-12 {
                            let x4 = rem.max(0.0).sqrt();
                            // Meets G₄ and avoids G₁ (x₁ handled by range).
                            if x4 <= sin_r + slack {
                                return Some(EscapeCandidate {
                                    center: [x1, x2, x3, x4],
                                    radius: r0,
                                });
                            }
                        }
                        x3 += resolution;
                    }
                }
                x2 += resolution;
            }
            x1 += resolution;
        }
        r0 += resolution;
    }
    None
}

/// Grid search for a cap satisfying the full constraint list of the
/// 3-tangent separating system: packs with the eight 3-tangent caps, meets
/// F₁, F₂, G₃ and G₄, avoids G₁, with x₂ either on G₂ or clear of it.
/// Coordinates pinned by the constraints to finitely many values (x₃ and x₄
/// on {0, sin r₀}) are enumerated exactly; r₀ and x₂ run on the grid.
pub fn search_cap_evading_three_tangent_system(resolution: f64) -> Option<EscapeCandidate> {
    let slack = 2.0 * resolution;
    let rt2 = 2.0f64.sqrt();
    let mut r0 = resolution;
    while r0 < FRAC_PI_2 {
        let sin_r = r0.sin();
        let pack_bound = rt2 * r0.cos() - sin_r; // x₁ + x₂ + x₃ bound
        let f_bound = rt2 * sin_r; // x₁ + x₂ bound

        // x₂ ranges over {0} and the grid of [sin r₀, 1].
        let mut x2_candidates = vec![0.0];
        let mut x2 = sin_r - slack.min(sin_r);
        while x2 <= 1.0 {
            if x2 >= sin_r - slack {
                x2_candidates.push(x2);
            }
            x2 += resolution;
        }

        for &x2 in &x2_candidates {
            for x3 in [0.0, sin_r] {
                for x4 in [0.0, sin_r] {
                    let rem = 1.0 - x2 * x2 - x3 * x3 - x4 * x4;
                    if rem < -1e-12 {
                        continue;
                    }
                    let x1 = rem.max(0.0).sqrt();
                    let avoids_g1 = x1 > sin_r - slack;
                    let packs = x1 + x2 + x3 <= pack_bound + slack;
                    let meets_f = x1 + x2 <= f_bound + slack && (x1 - x2).abs() <= f_bound + slack;
                    if avoids_g1 && packs && meets_f {
                        return Some(EscapeCandidate {
                            center: [x1, x2, x3, x4],
                            radius: r0,
                        });
                    }
                }
            }
        }
        r0 += resolution;
    }
    None
}

/// Threshold radius below which a cap cannot satisfy the two-tangent escape
/// constraints: arcsin(1/√5).
pub fn two_tangent_escape_radius_bound() -> f64 {
    (1.0 / 5.0f64.sqrt()).asin()
}

/// Threshold radius from the three-tangent analysis: arcsin(√2/√11).
pub fn three_tangent_escape_radius_bound() -> f64 {
    (2.0f64 / 11.0).sqrt().asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs;
    use crate::sphere::angular_distance;
    use std::collections::BTreeSet;
    use std::f64::consts::FRAC_PI_6;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn detects_canonical_cases_with_identity_map() {
        let t = tol();
        let cases = [
            (configs::sixteen_4t(), CaseKind::SixteenFourTangent),
            (configs::eight_2t(), CaseKind::EightTwoTangent),
            (configs::four_2t(), CaseKind::FourTwoTangent),
            (configs::eight_3t(), CaseKind::EightThreeTangent),
        ];
        for (p, kind) in cases {
            let case = detect_case(&p, &t).unwrap();
            assert_eq!(case.kind, kind);
            assert!(case.axis_map.is_identity(), "{kind:?}");
        }
    }

    #[test]
    fn empty_packing_uses_axes() {
        let t = tol();
        let p = Packing::new(4, Vec::new(), &t).unwrap();
        let case = detect_case(&p, &t).unwrap();
        assert_eq!(case.kind, CaseKind::CoordinateAxesSuffice);
        let sol = solve_unconditional_s3(&p, &t).unwrap();
        assert_eq!(sol.directions.len(), 8);
        for i in 0..4 {
            let e = UnitVector::axis(4, i);
            assert!(sol
                .directions
                .directions
                .iter()
                .any(|u| angular_distance(u, &e) < 1e-12));
        }
    }

    #[test]
    fn permuted_four_2t_detected_with_axis_map() {
        // 2-tangent caps on axes {1, 2} instead of {0, 1}.
        let t = tol();
        let h = 0.5f64.sqrt();
        let mut caps = Vec::new();
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                caps.push(
                    Cap::new(
                        UnitVector::normalized(&[0.0, s1 * h, s2 * h, 0.0]).unwrap(),
                        FRAC_PI_4,
                    )
                    .unwrap(),
                );
            }
        }
        let p = Packing::new(4, caps, &t).unwrap();
        let case = detect_case(&p, &t).unwrap();
        assert_eq!(case.kind, CaseKind::FourTwoTangent);
        assert!(!case.axis_map.is_identity());
        // The map must send the tangency axes {1, 2} to {0, 1}.
        let mapped: BTreeSet<usize> = [1usize, 2]
            .iter()
            .map(|&a| case.axis_map.perm.iter().position(|&q| q == a).unwrap())
            .collect();
        assert_eq!(mapped, BTreeSet::from([0, 1]));

        let sol = solve_unconditional_s3(&p, &t).unwrap();
        assert!(sol.certificate.cover_ok);
        assert_eq!(sol.directions.len(), 8);
    }

    #[test]
    fn sixteen_4t_margins_match_expectation() {
        let t = tol();
        let sol = solve_unconditional_s3(&configs::sixteen_4t(), &t).unwrap();
        assert_eq!(sol.case.kind, CaseKind::SixteenFourTangent);
        // Every cap is separated with margin 1/√2 - 1/2.
        let expected = 0.5f64.sqrt() - 0.5;
        for m in &sol.certificate.margins {
            assert!((m - expected).abs() < 1e-12);
        }
        assert!(sol.certificate.cover_margin > 0.0);
    }

    #[test]
    fn eight_3t_solves_with_mixed_system() {
        let t = tol();
        let sol = solve_unconditional_s3(&configs::eight_3t(), &t).unwrap();
        assert_eq!(sol.case.kind, CaseKind::EightThreeTangent);
        assert!(sol.certificate.cover_ok);
        assert_eq!(sol.directions.len(), 8);
        assert!(sol.directions.is_symmetric(&t));
    }

    #[test]
    fn rejects_non_unconditional() {
        let t = tol();
        let p = Packing::new(
            4,
            vec![Cap::new(
                UnitVector::normalized(&[0.5, 0.5, 0.5, 0.5]).unwrap(),
                FRAC_PI_6,
            )
            .unwrap()],
            &t,
        )
        .unwrap();
        assert!(matches!(
            detect_case(&p, &t),
            Err(SolveError::NotUnconditional)
        ));
    }

    #[test]
    fn solver_normals_are_orthogonal_pairs() {
        let t = tol();
        for p in [configs::eight_2t(), configs::four_2t()] {
            let sol = solve_unconditional_s3(&p, &t).unwrap();
            let d = &sol.directions.directions;
            assert_eq!(d.len(), 8);
            // First four are pairwise orthogonal; last four their negations.
            for i in 0..4 {
                for j in (i + 1)..4 {
                    assert!(d[i].dot(&d[j]).abs() < 1e-12);
                }
                assert!(angular_distance(&d[i], &d[i + 4].negated()) < 1e-12);
            }
        }
    }

    #[test]
    fn stranded_single_cap() {
        let t = tol();
        let p = Packing::new(
            3,
            vec![Cap::new(UnitVector::axis(3, 2), FRAC_PI_4).unwrap()],
            &t,
        )
        .unwrap();
        let s = stranded_distance(&p, 20_000);
        assert!((s.dist - (PI - FRAC_PI_4)).abs() < 1e-6);
        assert!(angular_distance(&s.point, &UnitVector::axis(3, 2).negated()) < 1e-3);
    }

    #[test]
    fn escape_searches_find_nothing_at_coarse_resolution() {
        // Smoke test at a coarse grid; the acceptance suite runs 1e-3.
        assert_eq!(search_cap_evading_two_tangent_system(0.01), None);
        assert_eq!(search_cap_evading_three_tangent_system(0.01), None);
    }

    #[test]
    fn escape_radius_bounds() {
        assert!((two_tangent_escape_radius_bound() - 0.4636476090008061).abs() < 1e-12);
        assert!((three_tangent_escape_radius_bound() - 0.4405106630046985).abs() < 1e-12);
        assert!(two_tangent_escape_radius_bound() < FRAC_PI_6);
        assert!(three_tangent_escape_radius_bound() < FRAC_PI_6);
    }
}
