//! Deterministic point sets on spheres and balls, and seeded RNG streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// RNG stream for work item `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Uniform direction on the unit sphere in R^n.
pub fn random_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-12 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Uniform point in the closed unit ball of R^n.
pub fn random_in_ball<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let dir = random_direction(rng, n);
    let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
    dir.into_iter().map(|x| x * r).collect()
}

/// `count` points of the Fibonacci lattice on S² ⊂ R³.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `count` equally spaced points on the unit circle.
pub fn circle(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / count as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Deterministic unit directions in R^n: `±1` for n = 1, an equally spaced
/// circle for n = 2, a Fibonacci lattice for n = 3 and seeded Gaussian
/// directions above. The coordinate axes `±e_i` are always included.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs = match n {
        0 => return Vec::new(),
        1 => return vec![vec![1.0], vec![-1.0]],
        2 => circle(count.max(4)),
        3 => fibonacci_sphere(count.max(6)),
        _ => {
            let mut rng = stream(seed, 0x5EED);
            (0..count).map(|_| random_direction(&mut rng, n)).collect()
        }
    };
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            dirs.push(e);
        }
    }
    dirs
}

/// Completes `vectors` by Gram–Schmidt, dropping any that are numerically
/// dependent on the earlier ones.
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let r = norm(&w);
        if r > 1e-10 * norm(v).max(1e-300) && r > 0.0 {
            out.push(w.into_iter().map(|x| x / r).collect());
        }
    }
    out
}

/// Random orthonormal `k`-frame in R^n from Gaussian vectors.
pub fn random_frame<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<f64>> {
    loop {
        let raw: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let frame = gram_schmidt(&raw);
        if frame.len() == k {
            return frame;
        }
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn frames_are_orthonormal() {
        let mut rng = stream(7, 1);
        let f = random_frame(&mut rng, 5, 3);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&f[i], &f[j]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn directions_are_unit_and_deterministic() {
        for n in 1..6 {
            let a = sphere_directions(n, 64, 3);
            assert_eq!(a, sphere_directions(n, 64, 3));
            assert!(a.iter().all(|v| (norm(v) - 1.0).abs() < 1e-12));
        }
    }
}
