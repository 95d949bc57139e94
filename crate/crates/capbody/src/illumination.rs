//! Illumination predicates, hemisphere separation, the sphere-cover test and
//! the certificate checker.
//!
//! A direction set illuminates a cap body exactly when every induced cap is
//! separated by the open hemisphere opposite one of the directions, and
//! those hemispheres jointly cover the sphere. Separation of a cap
//! `(c, r)` by the hemisphere with pole `w` means `⟨w, c⟩ > sin r`.
//!
//! Covering is decided by a linear feasibility solve: the hemispheres with
//! poles `w₁…w_k` cover S^{d-1} iff no unit `x` satisfies `⟨x, wⱼ⟩ ≤ 0` for
//! all `j`, i.e. iff the origin is interior to `conv{wⱼ}`. The reported
//! cover margin is the distance from the origin to the hull boundary,
//! obtained by brute-force facet enumeration (the hulls here have at most a
//! few dozen points in dimension ≤ 4).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap::{cap_from_vertex, Cap, CapBody, CapError};
use crate::lp::{self, LpOutcome};
use crate::sphere::{angular_distance, dot, norm, TolerancePolicy, UnitVector, Verdict};

/// A non-empty set of candidate illumination directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    pub dim: usize,
    pub directions: Vec<UnitVector>,
}

impl DirectionSet {
    pub fn new(dim: usize, directions: Vec<UnitVector>) -> Result<Self, CapError> {
        if directions.is_empty() {
            return Err(CapError::DimensionMismatch {
                expected: dim,
                got: 0,
            });
        }
        for d in &directions {
            if d.dim() != dim {
                return Err(CapError::DimensionMismatch {
                    expected: dim,
                    got: d.dim(),
                });
            }
        }
        Ok(Self { dim, directions })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Poles of the hemispheres each direction contributes (`w = -u`).
    pub fn poles(&self) -> Vec<UnitVector> {
        self.directions.iter().map(|u| u.negated()).collect()
    }

    /// Whether the set is closed under negation within `tol.band`.
    pub fn is_symmetric(&self, tol: &TolerancePolicy) -> bool {
        self.directions.iter().all(|u| {
            let n = u.negated();
            self.directions
                .iter()
                .any(|v| angular_distance(v, &n) <= tol.band)
        })
    }
}

/// Per-cap assignment of a separating direction, with margins, plus the
/// sphere-cover witness. Valid certificates have every margin and the cover
/// margin at least `tol.strict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminationCertificate {
    /// For each cap, the index of the direction whose opposite hemisphere
    /// separates it.
    pub assignment: Vec<usize>,
    /// Separation margin per cap: `⟨-u, center⟩ - sin r` for the assigned
    /// direction.
    pub margins: Vec<f64>,
    pub cover_ok: bool,
    /// Distance from the origin to the boundary of the pole hull; positive
    /// iff the hemispheres cover the sphere with room to spare.
    pub cover_margin: f64,
}

impl IlluminationCertificate {
    pub fn worst_separation_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum VerifyFailure {
    /// No direction separates this cap; reports the cap with the worst best
    /// margin over all directions.
    #[error("cap {cap} is not separated by any direction (best margin {margin:.3e})")]
    Unseparated { cap: usize, margin: f64 },
    #[error("hemispheres do not cover the sphere (margin {margin:.3e}); uncovered direction {witness:?}")]
    Uncovered { witness: Vec<f64>, margin: f64 },
    #[error("dimension mismatch between body ({body}) and directions ({dirs})")]
    DimensionMismatch { body: usize, dirs: usize },
    #[error(transparent)]
    Cap(#[from] CapError),
}

/// Margin of the vertex-illumination inequality `⟨v, u⟩ < -√(‖v‖² - 1)`.
pub fn vertex_illumination_margin(v: &[f64], u: &UnitVector) -> f64 {
    let n2 = dot(v, v);
    -dot(v, u.coords()) - (n2 - 1.0).max(0.0).sqrt()
}

/// Whether direction `u` illuminates the vertex `v` of a cap body:
/// `⟨v, u⟩ < -√(‖v‖² - 1)`, with the usual undecided band.
pub fn illuminates_vertex(
    v: &[f64],
    u: &UnitVector,
    tol: &TolerancePolicy,
) -> Result<Verdict, CapError> {
    let n = norm(v);
    if n < 1.0 + tol.strict {
        return Err(CapError::VertexInsideBall(n));
    }
    Ok(tol.verdict(vertex_illumination_margin(v, u)))
}

/// Whether direction `u` illuminates a boundary point lying on the sphere:
/// `⟨p, u⟩ < 0`.
pub fn illuminates_sphere_point(p: &UnitVector, u: &UnitVector, tol: &TolerancePolicy) -> Verdict {
    tol.verdict(-p.dot(u))
}

/// Margin of `⟨pole, center⟩ > sin r` (cap strictly inside the open
/// hemisphere around `pole`).
pub fn hemisphere_separation_margin(c: &Cap, pole: &UnitVector) -> f64 {
    c.center().dot(pole) - c.radius().sin()
}

/// Whether the open hemisphere centered at `pole` separates the cap.
pub fn hemisphere_separates(c: &Cap, pole: &UnitVector, tol: &TolerancePolicy) -> Verdict {
    tol.verdict(hemisphere_separation_margin(c, pole))
}

/// Margin of `|⟨normal, center⟩| > sin r` (cap strictly on one side of the
/// greatsphere with the given normal).
pub fn greatsphere_separation_margin(c: &Cap, normal: &UnitVector) -> f64 {
    c.center().dot(normal).abs() - c.radius().sin()
}

/// Whether the greatsphere normal to `normal` separates the cap into one of
/// its open hemispheres.
pub fn greatsphere_separates(c: &Cap, normal: &UnitVector, tol: &TolerancePolicy) -> bool {
    tol.strictly(greatsphere_separation_margin(c, normal))
}

/// Outcome of the hemisphere cover test.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    pub covers: bool,
    /// Signed distance from the origin to the boundary of `conv(poles)`;
    /// positive when covered.
    pub margin: f64,
    /// A direction missed by every open hemisphere, when not covered.
    pub witness: Option<UnitVector>,
}

/// Do the open hemispheres with the given poles cover the whole sphere?
///
/// Decided by the LP `maximize δ s.t. ⟨x, wⱼ⟩ ≤ -δ, ‖x‖∞ ≤ 1`: a positive
/// optimum exhibits an uncovered direction. Otherwise facet enumeration of
/// the pole hull yields the exact interior margin (or a grazing witness).
pub fn hemispheres_cover(poles: &[UnitVector], tol: &TolerancePolicy) -> CoverResult {
    assert!(!poles.is_empty(), "cover test needs at least one pole");
    let d = poles[0].dim();

    // Variables z = (y₁..y_d, δ) ≥ 0 with x = y - 1 (componentwise).
    // ⟨w, x⟩ ≤ -δ  becomes  ⟨w, y⟩ + δ ≤ Σᵢ wᵢ;  |xᵢ| ≤ 1 becomes yᵢ ≤ 2.
    let mut rows = Vec::with_capacity(poles.len() + d);
    let mut b = Vec::with_capacity(poles.len() + d);
    for w in poles {
        let mut row = w.coords().to_vec();
        row.push(1.0);
        rows.push(row);
        b.push(w.coords().iter().sum());
    }
    for i in 0..d {
        let mut row = vec![0.0; d + 1];
        row[i] = 1.0;
        rows.push(row);
        b.push(2.0);
    }
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;

    // (x, δ) = (0, 0) is always feasible and the box bounds δ.
    let (delta, x) = match lp::maximize(&obj, &rows, &b) {
        LpOutcome::Optimal { objective, x } => {
            let xs: Vec<f64> = (0..d).map(|i| x[i] - 1.0).collect();
            (objective, xs)
        }
        other => unreachable!("cover LP is feasible and bounded, got {other:?}"),
    };

    if delta > 1e-9 && norm(&x) > 1e-9 {
        // The origin is strictly outside the pole hull. The exact margin is
        // the negated distance to the hull, attained opposite the nearest
        // hull point.
        let (dist, nearest) = nearest_hull_point(poles);
        let away: Vec<f64> = nearest.iter().map(|v| -v).collect();
        let witness = UnitVector::normalized(&away)
            .or_else(|_| UnitVector::normalized(&x))
            .expect("nonzero witness");
        return CoverResult {
            covers: false,
            margin: -dist,
            witness: Some(witness),
        };
    }

    // LP optimum is zero: the origin lies in the hull or on its boundary.
    match hull_min_facet_offset(poles) {
        Some((offset, normal)) => {
            let covers = tol.strictly(offset);
            let witness = if covers {
                None
            } else {
                Some(UnitVector::normalized(&normal).expect("facet normal"))
            };
            CoverResult {
                covers,
                margin: offset,
                witness,
            }
        }
        None => {
            // Degenerate hull (fewer than d affinely independent points):
            // any direction orthogonal to the pole span is uncovered.
            let witness = orthogonal_complement_direction(poles, d);
            CoverResult {
                covers: false,
                margin: 0.0,
                witness,
            }
        }
    }
}

/// Distance from the origin to `conv(points)` and the nearest hull point,
/// by Carathéodory enumeration: the nearest point lies in some face spanned
/// by at most d+1 affinely independent vertices, and the minimum-norm point
/// of each candidate face's affine hull is a small linear solve.
fn nearest_hull_point(points: &[UnitVector]) -> (f64, Vec<f64>) {
    let d = points[0].dim();
    let mut best = (f64::INFINITY, vec![0.0; d]);
    for size in 1..=(d + 1).min(points.len()) {
        for idx in combinations(points.len(), size) {
            if let Some(p) = min_norm_affine(points, &idx) {
                let n = norm(&p);
                if n < best.0 {
                    best = (n, p);
                }
            }
        }
    }
    best
}

/// Minimum-norm point of the affine hull of the chosen points, or `None`
/// when it falls outside their convex hull (negative barycentrics) or the
/// points are affinely dependent.
fn min_norm_affine(points: &[UnitVector], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    let d = points[0].dim();
    // Solve [[G, 1], [1ᵀ, 0]] (λ, ν) = (0, 1) with G the Gram matrix.
    let n = k + 1;
    let mut m = vec![vec![0.0; n + 1]; n];
    for a in 0..k {
        for b in 0..k {
            m[a][b] = points[idx[a]].dot(&points[idx[b]]);
        }
        m[a][k] = 1.0;
        m[k][a] = 1.0;
    }
    m[k][n] = 1.0;
    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                if f != 0.0 {
                    for j in col..=n {
                        m[row][j] -= f * m[col][j];
                    }
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..k).map(|a| m[a][n] / m[a][a]).collect();
    if lambda.iter().any(|&l| l < -1e-12) {
        return None;
    }
    let mut p = vec![0.0; d];
    for (a, &l) in lambda.iter().enumerate() {
        for (slot, &c) in p.iter_mut().zip(points[idx[a]].coords()) {
            *slot += l * c;
        }
    }
    Some(p)
}

/// Minimum offset over supporting hyperplanes of `conv(points)` spanned by
/// `d`-subsets, with its outward unit normal. Equals the distance from the
/// origin to the hull boundary when the origin is interior.
fn hull_min_facet_offset(points: &[UnitVector]) -> Option<(f64, Vec<f64>)> {
    let d = points[0].dim();
    if points.len() < d {
        return None;
    }
    let side_eps = 1e-9;
    let mut best: Option<(f64, Vec<f64>)> = None;

    for idx in combinations(points.len(), d) {
        let Some(n) = hyperplane_normal(points, &idx) else {
            continue;
        };
        let h = dot(&n, points[idx[0]].coords());
        for sign in [1.0, -1.0] {
            let off = sign * h;
            let supporting = points
                .iter()
                .all(|p| sign * dot(&n, p.coords()) <= off + side_eps);
            if supporting && best.as_ref().map_or(true, |(b, _)| off < *b) {
                best = Some((off, n.iter().map(|x| sign * x).collect()));
            }
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance to the next k-combination of 0..n.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] + 1 <= n - (k - i) {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Unit normal of the affine hyperplane through the chosen points, or `None`
/// if they are affinely degenerate.
fn hyperplane_normal(points: &[UnitVector], idx: &[usize]) -> Option<Vec<f64>> {
    let d = points[0].dim();
    // Rows: p_k - p_0 for the remaining subset points; the hyperplane normal
    // spans their null space.
    let base = points[idx[0]].coords();
    let mut m: Vec<Vec<f64>> = idx[1..]
        .iter()
        .map(|&k| crate::sphere::sub(points[k].coords(), base))
        .collect();

    let rows = m.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let (best_row, best_val) = (r..rows)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val < 1e-10 {
            continue;
        }
        m.swap(r, best_row);
        let p = m[r][c];
        for i in 0..rows {
            if i != r {
                let f = m[i][c] / p;
                if f != 0.0 {
                    for j in 0..d {
                        m[i][j] -= f * m[r][j];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if r != d - 1 {
        return None; // degenerate subset
    }
    let free_col = (0..d).find(|c| !pivot_cols.contains(c))?;
    let mut n = vec![0.0; d];
    n[free_col] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        n[pc] = -m[row][free_col] / m[row][pc];
    }
    let len = norm(&n);
    Some(n.iter().map(|x| x / len).collect())
}

fn orthogonal_complement_direction(points: &[UnitVector], d: usize) -> Option<UnitVector> {
    // Gram-Schmidt the pole span, then orthogonalize each axis against it.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let mut v = p.coords().to_vec();
        for b in &basis {
            let proj = dot(&v, b);
            v = crate::sphere::add_scaled(&v, b, -proj);
        }
        let n = norm(&v);
        if n > 1e-9 {
            basis.push(crate::sphere::scale(&v, 1.0 / n));
        }
    }
    for i in 0..d {
        let mut v = UnitVector::axis(d, i).coords().to_vec();
        for b in &basis {
            let proj = dot(&v, b);
            v = crate::sphere::add_scaled(&v, b, -proj);
        }
        if norm(&v) > 1e-6 {
            return UnitVector::normalized(&v).ok();
        }
    }
    None
}

/// Checks that the directions illuminate the body: every induced cap must be
/// separated by the hemisphere opposite some direction with margin at least
/// `tol.strict`, and those hemispheres must cover the sphere.
///
/// On failure, names the cap with the worst best-margin (not merely the
/// first offender) or the uncovered direction.
pub fn verify_illumination(
    body: &CapBody,
    dirs: &DirectionSet,
    tol: &TolerancePolicy,
) -> Result<IlluminationCertificate, VerifyFailure> {
    if body.dim() != dirs.dim {
        return Err(VerifyFailure::DimensionMismatch {
            body: body.dim(),
            dirs: dirs.dim,
        });
    }
    let poles = dirs.poles();
    let mut assignment = Vec::with_capacity(body.vertices().len());
    let mut margins = Vec::with_capacity(body.vertices().len());
    let mut worst: Option<(usize, f64)> = None;

    for (i, v) in body.vertices().iter().enumerate() {
        let cap = cap_from_vertex(v, tol)?;
        let (j, margin) = poles
            .iter()
            .enumerate()
            .map(|(j, w)| (j, hemisphere_separation_margin(&cap, w)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("direction set is non-empty");
        assignment.push(j);
        margins.push(margin);
        if margin < tol.strict && worst.map_or(true, |(_, m)| margin < m) {
            worst = Some((i, margin));
        }
    }
    if let Some((cap, margin)) = worst {
        return Err(VerifyFailure::Unseparated { cap, margin });
    }

    let cover = hemispheres_cover(&poles, tol);
    if !cover.covers {
        return Err(VerifyFailure::Uncovered {
            witness: cover
                .witness
                .map(|w| w.coords().to_vec())
                .unwrap_or_default(),
            margin: cover.margin,
        });
    }
    Ok(IlluminationCertificate {
        assignment,
        margins,
        cover_ok: true,
        cover_margin: cover.margin,
    })
}

/// Whether a single open hemisphere can separate both caps: possible iff the
/// centers are strictly closer than `π - r₁ - r₂`.
pub fn pair_separable_by_one_hemisphere(c1: &Cap, c2: &Cap, tol: &TolerancePolicy) -> bool {
    let dist = angular_distance(c1.center(), c2.center());
    dist < std::f64::consts::PI - c1.radius() - c2.radius() - tol.strict
}
