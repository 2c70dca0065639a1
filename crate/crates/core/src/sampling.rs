//! Reproducible sample points from a seeded ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Uniform points in the ball of radius `radius`, rejecting those within `margin` of the origin or of `x_{n+1} = 0`.
pub fn ball_points(seed: u64, dim: usize, count: usize, radius: f64, margin: f64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dir = unit_vector(&mut rng, dim);
        let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
        let p: Vec<f64> = dir.iter().map(|c| r * c).collect();
        if r > margin && p[dim - 1].abs() > margin {
            out.push(p);
        }
    }
    out
}

/// Points on the sphere of radius `radius`, away from the plane `x_{n+1} = 0`.
pub fn sphere_points(seed: u64, dim: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dir = unit_vector(&mut rng, dim);
        if dir[dim - 1].abs() > 1e-3 {
            out.push(dir.into_iter().map(|c| radius * c).collect());
        }
    }
    out
}
