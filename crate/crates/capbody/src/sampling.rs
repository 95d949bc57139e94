//! Quasi-uniform and random point generation on S^{d-1}.
//!
//! The lattices are deterministic for a given seed: the seed only shifts the
//! phase of the underlying low-discrepancy sequence, so coverage quality is
//! unchanged while distinct seeds decorrelate runs.

use rand::Rng;

use crate::sphere::UnitVector;

const GOLDEN: f64 = 1.618033988749895;
// Plastic constant and the additive recurrence steps derived from it.
const PLASTIC: f64 = 1.324717957244746;

fn fract(x: f64) -> f64 {
    x - x.floor()
}

fn seed_offsets(seed: u64) -> [f64; 3] {
    // Three decorrelated phases in [0, 1) from a splitmix-style hash.
    let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = || {
        s ^= s >> 30;
        s = s.wrapping_mul(0xbf58476d1ce4e5b9);
        s ^= s >> 27;
        s = s.wrapping_mul(0x94d049bb133111eb);
        s ^= s >> 31;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    [next(), next(), next()]
}

/// A quasi-uniform lattice of `n` points on S^{d-1} for d ∈ {2, 3, 4}.
///
/// d=3 uses the golden-angle spiral; d=4 uses an additive low-discrepancy
/// sequence pushed through area-preserving torus coordinates.
pub fn sphere_lattice(dim: usize, n: usize, seed: u64) -> impl Iterator<Item = Vec<f64>> {
    assert!((2..=4).contains(&dim));
    let off = seed_offsets(seed);
    let tau = std::f64::consts::TAU;
    (0..n).map(move |i| {
        let fi = i as f64;
        match dim {
            2 => {
                let a = tau * fract((fi + 0.5) / n as f64 + off[0]);
                vec![a.cos(), a.sin()]
            }
            3 => {
                let z = 1.0 - 2.0 * (fi + 0.5) / n as f64;
                let s = (1.0 - z * z).max(0.0).sqrt();
                let a = tau * fract(fi / GOLDEN + off[0]);
                vec![s * a.cos(), s * a.sin(), z]
            }
            _ => {
                let u = fract(fi * (1.0 / PLASTIC) + off[0]);
                let v = fract(fi * (1.0 / (PLASTIC * PLASTIC)) + off[1]);
                let w = fract((fi + 0.5) / n as f64 + off[2]);
                hopf_point(u, v, w)
            }
        }
    })
}

/// Area-preserving map from the unit cube onto S³: torus angles from `u, v`,
/// the latitude-like coordinate from `w`.
fn hopf_point(u: f64, v: f64, w: f64) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let xi1 = tau * u;
    let xi2 = tau * v;
    let eta = w.sqrt().clamp(0.0, 1.0).asin();
    let (se, ce) = eta.sin_cos();
    vec![ce * xi1.cos(), ce * xi1.sin(), se * xi2.cos(), se * xi2.sin()]
}

/// A uniformly distributed point of S^{d-1} drawn from `rng`.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitVector {
    let coords = match dim {
        2 => {
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            vec![a.cos(), a.sin()]
        }
        3 => {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).max(0.0).sqrt();
            vec![s * a.cos(), s * a.sin(), z]
        }
        4 => hopf_point(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()),
        other => panic!("unsupported dimension {other}"),
    };
    UnitVector::normalized(&coords).expect("nonzero by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lattice_points_are_unit() {
        for dim in 2..=4 {
            for p in sphere_lattice(dim, 500, 7) {
                assert!((norm(&p) - 1.0).abs() < 1e-12, "dim {dim}");
            }
        }
    }

    #[test]
    fn lattice_is_deterministic_and_seed_sensitive() {
        let a: Vec<_> = sphere_lattice(3, 100, 1).collect();
        let b: Vec<_> = sphere_lattice(3, 100, 1).collect();
        let c: Vec<_> = sphere_lattice(3, 100, 2).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn lattice_covers_every_moderate_cap() {
        // Any spherical cap of radius 0.2 on S² must catch at least one of
        // 10⁴ lattice points.
        let n = 10_000;
        let probes: Vec<Vec<f64>> = sphere_lattice(3, 50, 99).collect();
        for c in probes {
            let hit = sphere_lattice(3, n, 0)
                .any(|p| crate::sphere::dot(&p, &c) > (0.2f64).cos());
            assert!(hit);
        }
    }

    #[test]
    fn random_points_have_balanced_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for dim in [3usize, 4] {
            let n = 20_000;
            let mut mean = vec![0.0; dim];
            let mut second = vec![0.0; dim];
            for _ in 0..n {
                let p = random_unit_vector(dim, &mut rng);
                for (k, &x) in p.coords().iter().enumerate() {
                    mean[k] += x;
                    second[k] += x * x;
                }
            }
            for k in 0..dim {
                assert!((mean[k] / n as f64).abs() < 0.02, "dim {dim} axis {k}");
                assert!(
                    (second[k] / n as f64 - 1.0 / dim as f64).abs() < 0.02,
                    "dim {dim} axis {k}"
                );
            }
        }
    }
}
