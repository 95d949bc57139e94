//! Canned reference configurations and seeded random packing generators.
//!
//! All randomness flows from an explicit 64-bit seed through ChaCha8, so a
//! given configuration is reproducible byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cap::{validate_packing, Cap, Packing, PackingCheck};
use crate::sampling::random_unit_vector;
use crate::sphere::{reflect_coordinate, TolerancePolicy, UnitVector};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

fn cap(coords: &[f64], radius: f64) -> Cap {
    Cap::new(UnitVector::normalized(coords).unwrap(), radius).unwrap()
}

/// All distinct sign flips of a non-negative coordinate pattern.
fn sign_orbit(pattern: &[f64]) -> Vec<Vec<f64>> {
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

fn orbit_packing(dim: usize, pattern: &[f64], radius: f64) -> Packing {
    let caps = sign_orbit(pattern)
        .into_iter()
        .map(|c| cap(&c, radius))
        .collect();
    Packing::new(dim, caps, &TolerancePolicy::default()).expect("reference configuration packs")
}

/// Six π/4 caps on S²: one pair at the poles, four equally spaced on the
/// equator starting at azimuth `phi`. At `phi = π/4` the equator caps meet
/// all three coordinate great circles; the octahedral reference case.
pub fn octahedron_s2(phi: f64) -> Packing {
    let mut caps = vec![cap(&[0.0, 0.0, 1.0], FRAC_PI_4), cap(&[0.0, 0.0, -1.0], FRAC_PI_4)];
    for k in 0..4 {
        let a = phi + FRAC_PI_2 * k as f64;
        caps.push(cap(&[a.cos(), a.sin(), 0.0], FRAC_PI_4));
    }
    Packing::new(3, caps, &TolerancePolicy::default()).expect("octahedral packing")
}

/// Two families of four 2-tangent caps on S³ with radii π/4, tangent to the
/// {0,1} and {2,3} coordinate greatsphere pairs respectively.
pub fn eight_2t() -> Packing {
    let h = 0.5f64.sqrt();
    let mut caps: Vec<Cap> = sign_orbit(&[h, h, 0.0, 0.0])
        .into_iter()
        .map(|c| cap(&c, FRAC_PI_4))
        .collect();
    caps.extend(
        sign_orbit(&[0.0, 0.0, h, h])
            .into_iter()
            .map(|c| cap(&c, FRAC_PI_4)),
    );
    Packing::new(4, caps, &TolerancePolicy::default()).expect("eight 2-tangent caps pack")
}

/// Sixteen 4-tangent caps on S³: centers (±½, ±½, ±½, ±½), radii π/6.
pub fn sixteen_4t() -> Packing {
    orbit_packing(4, &[0.5, 0.5, 0.5, 0.5], FRAC_PI_6)
}

/// Four 2-tangent caps on S³ with radii π/4, tangent to the first two
/// coordinate greatspheres.
pub fn four_2t() -> Packing {
    let h = 0.5f64.sqrt();
    orbit_packing(4, &[h, h, 0.0, 0.0], FRAC_PI_4)
}

/// Eight 3-tangent caps on S³ with radii arcsin(1/√3).
pub fn eight_3t() -> Packing {
    let s = (1.0f64 / 3.0).sqrt();
    orbit_packing(4, &[s, s, s, 0.0], s.asin())
}

/// A canned configuration by CLI name.
pub fn canned(name: &str) -> Option<Packing> {
    match name {
        "octahedron-s2" => Some(octahedron_s2(FRAC_PI_4)),
        "eight-2t" => Some(eight_2t()),
        "sixteen-4t" => Some(sixteen_4t()),
        "four-2t" => Some(four_2t()),
        "eight-3t" => Some(eight_3t()),
        _ => None,
    }
}

pub const CANNED_NAMES: [&str; 5] = [
    "octahedron-s2",
    "eight-2t",
    "sixteen-4t",
    "four-2t",
    "eight-3t",
];

/// Parameters for the random generators.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    /// Target number of caps (counting every member of a symmetry orbit).
    pub n_caps: usize,
    pub radius_range: (f64, f64),
    /// Consecutive rejected proposals tolerated before giving up.
    pub max_rejections: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_caps: 10,
            radius_range: (0.05, 0.6),
            max_rejections: 100_000,
        }
    }
}

/// A generated packing; `stalled` is set when the rejection budget ran out
/// before the target count was reached.
#[derive(Debug, Clone)]
pub struct Generated {
    pub packing: Packing,
    pub stalled: bool,
}

fn radius_in<R: Rng + ?Sized>(rng: &mut R, range: (f64, f64)) -> f64 {
    let (lo, hi) = range;
    let r: f64 = if hi > lo { rng.gen_range(lo..hi) } else { lo };
    r.clamp(1e-3, FRAC_PI_2 - 1e-3)
}

fn packs_with(existing: &[Cap], candidates: &[Cap], tol: &TolerancePolicy) -> bool {
    let mut all = existing.to_vec();
    all.extend_from_slice(candidates);
    matches!(validate_packing(&all, tol), PackingCheck::Ok)
}

/// Rejection-samples antipodal cap pairs on S² until `n_caps` caps are
/// accepted (an odd target yields one cap fewer).
pub fn generate_central_s2(cfg: &GenConfig, tol: &TolerancePolicy) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut caps: Vec<Cap> = Vec::new();
    let mut rejections = 0;
    let mut stalled = false;

    while caps.len() + 2 <= cfg.n_caps {
        let center = random_unit_vector(3, &mut rng);
        let radius = radius_in(&mut rng, cfg.radius_range);
        let pair = [
            Cap::new(center.clone(), radius).expect("radius clamped"),
            Cap::new(center.negated(), radius).expect("radius clamped"),
        ];
        if packs_with(&caps, &pair, tol) {
            caps.extend(pair);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= cfg.max_rejections {
                stalled = true;
                break;
            }
        }
    }

    Generated {
        packing: Packing::new(3, caps, tol).expect("accepted caps pack"),
        stalled,
    }
}

/// The full reflection orbit of a cap under the coordinate reflections of
/// S³, without duplicates.
fn reflection_orbit(seed_cap: &Cap, tol: &TolerancePolicy) -> Vec<Cap> {
    let mut orbit: Vec<Cap> = vec![seed_cap.clone()];
    for axis in 0..seed_cap.dim() {
        let mut images: Vec<Cap> = Vec::new();
        for c in &orbit {
            let img = Cap::new(reflect_coordinate(c.center(), axis), c.radius()).unwrap();
            let dup = orbit.iter().chain(images.iter()).any(|o| {
                crate::sphere::angular_distance(o.center(), img.center()) <= tol.band
            });
            if !dup {
                images.push(img);
            }
        }
        orbit.extend(images);
    }
    orbit
}

/// Rejection-samples unconditional orbits on S³, optionally seeding with a
/// canned tangent family first. `cfg.n_caps` counts the additional caps on
/// top of the seed family.
///
/// Orbit centers are drawn on a random support (some coordinates exactly
/// zero) so orbits of size 2, 4, 8 and 16 all occur.
pub fn generate_unconditional_s3(
    cfg: &GenConfig,
    seed_family: Option<&Packing>,
    tol: &TolerancePolicy,
) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut caps: Vec<Cap> = seed_family.map(|p| p.caps().to_vec()).unwrap_or_default();
    let base = caps.len();
    let mut rejections = 0;
    let mut stalled = false;

    while caps.len() - base < cfg.n_caps {
        // Pick how many coordinates are non-zero, then a direction on them.
        let support = rng.gen_range(1..=4usize);
        let mut coords = [0.0; 4];
        let dir = random_unit_vector(support.max(2), &mut rng);
        for (slot, &x) in coords.iter_mut().zip(dir.coords()) {
            *slot = x.abs().max(1e-9);
        }
        // `support` may be 1: collapse to a single axis.
        if support == 1 {
            coords = [1.0, 0.0, 0.0, 0.0];
        } else {
            for c in coords.iter_mut().skip(support) {
                *c = 0.0;
            }
        }
        // Scatter the support over the four axes.
        for i in (1..4).rev() {
            let j = rng.gen_range(0..=i);
            coords.swap(i, j);
        }
        let norm = crate::sphere::norm(&coords);
        if norm < 1e-9 {
            continue;
        }
        let center = UnitVector::normalized(&coords).unwrap();
        let radius = radius_in(&mut rng, cfg.radius_range);
        let orbit = reflection_orbit(&Cap::new(center, radius).unwrap(), tol);

        if caps.len() - base + orbit.len() <= cfg.n_caps && packs_with(&caps, &orbit, tol) {
            caps.extend(orbit);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= cfg.max_rejections {
                stalled = true;
                break;
            }
        }
    }

    Generated {
        packing: Packing::new(4, caps, tol).expect("accepted caps pack"),
        stalled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::{is_centrally_symmetric, is_unconditional};

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn canned_cases_have_expected_sizes() {
        assert_eq!(octahedron_s2(FRAC_PI_4).len(), 6);
        assert_eq!(eight_2t().len(), 8);
        assert_eq!(sixteen_4t().len(), 16);
        assert_eq!(four_2t().len(), 4);
        assert_eq!(eight_3t().len(), 8);
        for name in CANNED_NAMES {
            assert!(canned(name).is_some());
        }
        assert!(canned("nonsense").is_none());
    }

    #[test]
    fn canned_cases_are_symmetric() {
        let t = tol();
        assert!(is_centrally_symmetric(&octahedron_s2(FRAC_PI_4), &t));
        for p in [eight_2t(), sixteen_4t(), four_2t(), eight_3t()] {
            assert!(is_unconditional(&p, &t));
        }
    }

    #[test]
    fn central_generator_is_deterministic_and_symmetric() {
        let t = tol();
        let cfg = GenConfig {
            seed: 42,
            n_caps: 12,
            radius_range: (0.05, 0.5),
            ..GenConfig::default()
        };
        let a = generate_central_s2(&cfg, &t);
        let b = generate_central_s2(&cfg, &t);
        assert_eq!(a.packing, b.packing);
        assert!(!a.stalled);
        assert_eq!(a.packing.len(), 12);
        assert!(is_centrally_symmetric(&a.packing, &t));
    }

    #[test]
    fn central_generator_rounds_odd_targets_down() {
        let t = tol();
        let cfg = GenConfig {
            seed: 1,
            n_caps: 7,
            ..GenConfig::default()
        };
        let g = generate_central_s2(&cfg, &t);
        assert_eq!(g.packing.len(), 6);
    }

    #[test]
    fn unconditional_generator_extends_canned_family() {
        let t = tol();
        let seed_family = sixteen_4t();
        let cfg = GenConfig {
            seed: 3,
            n_caps: 12,
            radius_range: (0.05, 0.4),
            ..GenConfig::default()
        };
        let g = generate_unconditional_s3(&cfg, Some(&seed_family), &t);
        assert!(g.packing.len() >= seed_family.len());
        assert!(is_unconditional(&g.packing, &t));
    }

    #[test]
    fn unconditional_generator_standalone() {
        let t = tol();
        let cfg = GenConfig {
            seed: 9,
            n_caps: 16,
            radius_range: (0.05, 0.4),
            ..GenConfig::default()
        };
        let g = generate_unconditional_s3(&cfg, None, &t);
        assert!(is_unconditional(&g.packing, &t));
        assert!(g.packing.len() <= 16);
    }
}
