//! Reference implementations used as test oracles. None of these call into
//! the library's numerics.

#![allow(dead_code)]

use ofdm_lssvm::Cf64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Cf64 {
    Cf64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cf(rng: &mut ChaCha8Rng, scale: f64) -> Cf64 {
    c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// `J0(x) = (1/pi) * integral_0^pi cos(x sin t) dt`, composite Simpson.
pub fn bessel_j0(x: f64) -> f64 {
    let n = 2000;
    let h = std::f64::consts::PI / n as f64;
    let f = |t: f64| (x * t.sin()).cos();
    let mut s = f(0.0) + f(std::f64::consts::PI);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0 / std::f64::consts::PI
}

/// First positive zero of J0 by bisection.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn rbf_matrix(positions: &[usize], sigma: f64) -> Vec<Vec<f64>> {
    positions
        .iter()
        .map(|&p| {
            positions
                .iter()
                .map(|&q| {
                    let d = p as f64 - q as f64;
                    (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .collect()
        })
        .collect()
}

/// `(G + gamma I)^-1 y`, real and imaginary parts solved separately.
pub fn kernel_ridge(g: &[Vec<f64>], gamma: f64, y: &[Cf64]) -> Vec<Cf64> {
    let mut a = g.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += gamma;
    }
    let re = solve_dense(a.clone(), y.iter().map(|v| v.re).collect());
    let im = solve_dense(a, y.iter().map(|v| v.im).collect());
    re.into_iter().zip(im).map(|(r, i)| c(r, i)).collect()
}

/// Real dual `-1/2 psi'(G + gamma I)psi + psi'y - eps |psi|_1`.
pub fn real_dual(g: &[Vec<f64>], gamma: f64, eps: f64, y: &[f64], psi: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += psi[i] * g[i][j] * psi[j];
        }
        quad += gamma * psi[i] * psi[i];
    }
    let lin: f64 = psi.iter().zip(y).map(|(p, v)| p * v).sum();
    let l1: f64 = psi.iter().map(|p| p.abs()).sum();
    -0.5 * quad + lin - eps * l1
}

/// Projected gradient ascent on the split multipliers `alpha, alpha* in [0, C]`
/// with `psi = alpha - alpha*`. Returns `psi`.
pub fn projected_gradient(
    g: &[Vec<f64>],
    gamma: f64,
    eps: f64,
    cap: f64,
    y: &[f64],
    iterations: usize,
    step: f64,
) -> Vec<f64> {
    let n = y.len();
    let mut pos = vec![0.0; n];
    let mut neg = vec![0.0; n];
    for _ in 0..iterations {
        let psi: Vec<f64> = pos.iter().zip(&neg).map(|(a, b)| a - b).collect();
        for i in 0..n {
            let kpsi: f64 = (0..n).map(|j| g[i][j] * psi[j]).sum::<f64>() + gamma * psi[i];
            let grad = y[i] - kpsi;
            pos[i] = (pos[i] + step * (grad - eps)).clamp(0.0, cap);
            neg[i] = (neg[i] + step * (-grad - eps)).clamp(0.0, cap);
        }
    }
    pos.iter().zip(&neg).map(|(a, b)| a - b).collect()
}

pub fn max_abs_diff(a: &[Cf64], b: &[Cf64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_norm(a: &[Cf64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Naive unitary DFT of `x`.
pub fn dft(x: &[Cf64]) -> Vec<Cf64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| v * Cf64::from_polar(1.0, -std::f64::consts::TAU * ((k * t) % n) as f64 / n as f64))
                .sum::<Cf64>()
                / (n as f64).sqrt()
        })
        .collect()
}

pub fn db(x: f64) -> f64 {
    10.0 * x.log10()
}
