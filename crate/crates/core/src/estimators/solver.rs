//! Complex LS-SVM training in the dual.
//!
//! With `ψ_m = (α_R,m - α*_R,m) + j (α_I,m - α*_I,m)` and the bias fixed at
//! zero, the dual
//!
//! ```text
//! max  -½ ψᴴ (G + γI) ψ + Re(ψᴴ y) - ε 1ᵀ(α_R + α*_R + α_I + α*_I)
//! s.t. 0 <= α <= C
//! ```
//!
//! separates into two real problems, one for `Re ψ` and one for `Im ψ`,
//! because `G` is real and symmetric. Complementary slackness keeps at most one
//! of each `(α, α*)` pair nonzero, so the ε term becomes `ε (|Re ψ|₁ + |Im ψ|₁)`
//! and every real coefficient lives in `[-C, C]`.
//!
//! By the conjugate form of the ε-Huber cost the optimum satisfies
//! `ψ_m = L'(e_m)` with `e = y - Gψ`: samples in the insensitive zone have
//! `ψ_m = 0`, samples in the linear zone sit on the box at `±C`, and the
//! quadratic zone is the free set. Each iteration is an active-set pass:
//! the free coordinates solve their linear system exactly and move toward
//! it, stopping to pin any coordinate that reaches the box or crosses the
//! kink at zero. A cyclic coordinate-ascent sweep follows whenever the
//! residual is still above tolerance. Both moves are exact ascent on a
//! concave function, so the objective never decreases.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::huber::{epsilon_huber, zone, SvmHyper, Zone};
use super::kernel::rbf_gram;
use super::PilotEstimate;
use crate::{Cf64, ConvergenceFailure, Error, Result};

/// Support threshold relative to the largest `|ψ_m|`.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// The four non-negative multiplier families of the dual.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    pub re_pos: Vec<f64>,
    pub re_neg: Vec<f64>,
    pub im_pos: Vec<f64>,
    pub im_neg: Vec<f64>,
}

impl Multipliers {
    pub fn zeros(n: usize) -> Self {
        Self {
            re_pos: vec![0.0; n],
            re_neg: vec![0.0; n],
            im_pos: vec![0.0; n],
            im_neg: vec![0.0; n],
        }
    }

    /// Splits `ψ` into positive and negative parts (complementary by construction).
    pub fn from_psi(psi: &[Cf64]) -> Self {
        Self {
            re_pos: psi.iter().map(|p| p.re.max(0.0)).collect(),
            re_neg: psi.iter().map(|p| (-p.re).max(0.0)).collect(),
            im_pos: psi.iter().map(|p| p.im.max(0.0)).collect(),
            im_neg: psi.iter().map(|p| (-p.im).max(0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.re_pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re_pos.is_empty()
    }

    pub fn psi(&self) -> Vec<Cf64> {
        (0..self.len())
            .map(|m| {
                Cf64::new(
                    self.re_pos[m] - self.re_neg[m],
                    self.im_pos[m] - self.im_neg[m],
                )
            })
            .collect()
    }

    fn families(&self) -> [&Vec<f64>; 4] {
        [&self.re_pos, &self.re_neg, &self.im_pos, &self.im_neg]
    }
}

fn check_square(gram: &DMatrix<f64>, n: usize) -> Result<()> {
    if gram.nrows() != n || gram.ncols() != n {
        return Err(Error::InputShape(format!(
            "Gram matrix is {}x{}, expected {n}x{n}",
            gram.nrows(),
            gram.ncols()
        )));
    }
    Ok(())
}

/// Dual objective evaluated on the four multiplier families.
pub fn dual_objective(
    alphas: &Multipliers,
    gram: &DMatrix<f64>,
    y_pilots: &[Cf64],
    hyper: &SvmHyper,
) -> Result<f64> {
    let n = y_pilots.len();
    if alphas.families().iter().any(|f| f.len() != n) {
        return Err(Error::InputShape(format!(
            "multiplier vectors must all have length {n}"
        )));
    }
    check_square(gram, n)?;
    for (name, fam) in ["alpha_re", "alpha_re*", "alpha_im", "alpha_im*"]
        .iter()
        .zip(alphas.families())
    {
        if let Some((m, v)) = fam.iter().enumerate().find(|(_, &v)| !(0.0..=hyper.c).contains(&v)) {
            return Err(Error::Domain(format!(
                "{name}[{m}] = {v} outside [0, C = {}]",
                hyper.c
            )));
        }
    }
    let psi = alphas.psi();
    let alpha_sum: f64 = alphas.families().iter().flat_map(|f| f.iter()).sum();
    Ok(quadratic_part(&psi, gram, y_pilots, hyper) - hyper.epsilon * alpha_sum)
}

/// `-½ ψᴴ (G + γI) ψ + Re(ψᴴ y)`.
fn quadratic_part(psi: &[Cf64], gram: &DMatrix<f64>, y: &[Cf64], hyper: &SvmHyper) -> f64 {
    let n = psi.len();
    let mut quad = 0.0;
    let mut lin = 0.0;
    for u in 0..n {
        let mut g_psi = Cf64::new(0.0, 0.0);
        for v in 0..n {
            g_psi += psi[v] * gram[(u, v)];
        }
        quad += (psi[u].conj() * (g_psi + psi[u] * hyper.gamma)).re;
        lin += (psi[u].conj() * y[u]).re;
    }
    -0.5 * quad + lin
}

/// Dual objective with complementary multipliers implied by `ψ`.
pub fn dual_objective_psi(psi: &[Cf64], gram: &DMatrix<f64>, y: &[Cf64], hyper: &SvmHyper) -> f64 {
    let l1: f64 = psi.iter().map(|p| p.re.abs() + p.im.abs()).sum();
    quadratic_part(psi, gram, y, hyper) - hyper.epsilon * l1
}

/// Primal cost `½‖w‖² + Σ L(e_m)` at `w = Σ ψ_m φ(P_m)`.
pub fn primal_objective(psi: &[Cf64], gram: &DMatrix<f64>, y: &[Cf64], hyper: &SvmHyper) -> f64 {
    let n = psi.len();
    let mut reg = 0.0;
    let mut loss = 0.0;
    for u in 0..n {
        let mut g_psi = Cf64::new(0.0, 0.0);
        for v in 0..n {
            g_psi += psi[v] * gram[(u, v)];
        }
        reg += (psi[u].conj() * g_psi).re;
        loss += epsilon_huber(y[u] - g_psi, hyper);
    }
    0.5 * reg + loss
}

/// One solver iteration, as written to JSON-lines traces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub objective: f64,
    pub residual: f64,
    /// Fraction of the first active-set move taken, real then imaginary part.
    pub step: [f64; 2],
    pub coordinate_sweep: bool,
    /// Sample counts in the real quadratic, real linear, imaginary quadratic
    /// and imaginary linear zones.
    pub zones: [usize; 4],
}

/// A trained estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub psi: Vec<Cf64>,
    pub bias: Cf64,
    pub support_mask: Vec<bool>,
    pub iterations: usize,
    pub final_objective: f64,
    pub residual: f64,
    /// Objective before the first iteration followed by one entry per iteration.
    pub objective_trace: Vec<f64>,
    pub trace: Vec<IterationRecord>,
}

impl DualSolution {
    pub fn multipliers(&self) -> Multipliers {
        Multipliers::from_psi(&self.psi)
    }

    pub fn support_count(&self) -> usize {
        self.support_mask.iter().filter(|&&s| s).count()
    }

    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain record") + "\n")
            .collect()
    }
}

fn support_mask(psi: &[Cf64]) -> Vec<bool> {
    let max = psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
    psi.iter()
        .map(|p| max > 0.0 && p.norm() > SUPPORT_THRESHOLD * max)
        .collect()
}

/// One of the two decoupled real subproblems.
struct RealPart<'a> {
    gram: &'a DMatrix<f64>,
    y: Vec<f64>,
    psi: Vec<f64>,
    /// Cached `G ψ`.
    g_psi: Vec<f64>,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

impl<'a> RealPart<'a> {
    fn new(gram: &'a DMatrix<f64>, y: Vec<f64>) -> Self {
        let n = y.len();
        Self {
            gram,
            y,
            psi: vec![0.0; n],
            g_psi: vec![0.0; n],
        }
    }

    fn refresh(&mut self) {
        let n = self.psi.len();
        for u in 0..n {
            self.g_psi[u] = (0..n).map(|v| self.gram[(u, v)] * self.psi[v]).sum();
        }
    }

    /// Scale of the terms summed by [`Self::objective`], for rounding bounds.
    fn magnitude(&self, h: &SvmHyper) -> f64 {
        self.psi
            .iter()
            .zip(&self.g_psi)
            .zip(&self.y)
            .map(|((&p, &gp), &y)| p.abs() * (gp.abs() + h.gamma * p.abs() + y.abs() + h.epsilon))
            .sum()
    }

    fn objective(&self, h: &SvmHyper) -> f64 {
        self.psi
            .iter()
            .zip(&self.g_psi)
            .zip(&self.y)
            .map(|((&p, &gp), &y)| -0.5 * p * (gp + h.gamma * p) + p * y - h.epsilon * p.abs())
            .sum()
    }

    /// Sup-norm of `ψ - prox(ψ + ∇)`, zero exactly at the optimum, relative
    /// to the scale of `ψ` and `y` once that exceeds one.
    fn residual(&self, h: &SvmHyper) -> f64 {
        let scale = self
            .psi
            .iter()
            .chain(&self.y)
            .map(|v| v.abs())
            .fold(1.0, f64::max);
        let raw = self
            .psi
            .iter()
            .zip(&self.g_psi)
            .zip(&self.y)
            .map(|((&p, &gp), &y)| {
                let grad = y - gp - h.gamma * p;
                let prox = soft_threshold(p + grad, h.epsilon).clamp(-h.c, h.c);
                (p - prox).abs()
            })
            .fold(0.0, f64::max);
        raw / scale
    }

    /// Zone counts `[quadratic, linear]` of the current primal residuals.
    fn zone_counts(&self, h: &SvmHyper) -> [usize; 2] {
        let mut counts = [0, 0];
        for (y, gp) in self.y.iter().zip(&self.g_psi) {
            match zone(y - gp, h) {
                Zone::Quadratic => counts[0] += 1,
                Zone::Linear => counts[1] += 1,
                Zone::Insensitive => {}
            }
        }
        counts
    }

    fn gradient(&self, m: usize, h: &SvmHyper) -> f64 {
        self.y[m] - self.g_psi[m] - h.gamma * self.psi[m]
    }

    /// How far coordinate `m` is from optimal with the others held fixed.
    fn violation(&self, m: usize, h: &SvmHyper) -> f64 {
        let (p, g) = (self.psi[m], self.gradient(m, h));
        if p == 0.0 {
            (g.abs() - h.epsilon).max(0.0)
        } else if p == h.c {
            (h.epsilon - g).max(0.0)
        } else if p == -h.c {
            (g + h.epsilon).max(0.0)
        } else {
            (g - h.epsilon * p.signum()).abs()
        }
    }

    /// Maximiser of the dual over `free` with every other coordinate held
    /// and the signs of the free ones fixed:
    /// `(G_FF + γI) ψ_F = y_F - ε s_F - G_FB ψ_B`.
    fn face_target(&self, free: &[usize], signs: &[f64], h: &SvmHyper) -> Result<Vec<f64>> {
        let k = free.len();
        let rhs = DVector::from_fn(k, |u, _| {
            let m = free[u];
            let own: f64 = free.iter().map(|&v| self.gram[(m, v)] * self.psi[v]).sum();
            self.y[m] - h.epsilon * signs[u] - (self.g_psi[m] - own)
        });
        let system = DMatrix::from_fn(k, k, |u, v| {
            self.gram[(free[u], free[v])] + if u == v { h.gamma } else { 0.0 }
        });
        let chol = system
            .cholesky()
            .ok_or_else(|| Error::Domain("face system is not positive definite".into()))?;
        Ok(chol.solve(&rhs).iter().copied().collect())
    }

    /// One active-set pass. Coordinates strictly inside the box are free
    /// (away from zero as well when `ε > 0`, where the cost has a kink), and
    /// held coordinates whose gradient pushes them off are released. The
    /// iterate then moves toward the face maximiser; a coordinate that
    /// reaches the box, or zero across the kink, is pinned there and the
    /// smaller face re-solved, until a maximiser is reached without leaving
    /// the face. The dual is a concave quadratic on each face, so the
    /// objective cannot drop. Returns the fraction of the first move taken.
    fn face_step(&mut self, h: &SvmHyper) -> Result<f64> {
        let n = self.y.len();
        let kinked = h.epsilon > 0.0;
        let floor = if kinked { 0.0 } else { -h.c };
        let interior: Vec<usize> = (0..n)
            .filter(|&m| self.psi[m].abs() < h.c && (!kinked || self.psi[m] != 0.0))
            .collect();
        let mut violators: Vec<(usize, f64)> = (0..n)
            .filter(|m| !interior.contains(m))
            .map(|m| (m, self.violation(m, h)))
            .filter(|&(_, v)| v > 0.0)
            .collect();
        violators.sort_by(|a, b| b.1.total_cmp(&a.1));
        let released: Vec<usize> = violators.iter().map(|&(m, _)| m).collect();

        // Releasing everything at once can send a coordinate the wrong way;
        // fall back to the worst violator, then to the interior alone.
        let mut attempts = vec![&released[..]];
        if released.len() > 1 {
            attempts.push(&released[..1]);
        }
        attempts.push(&[]);

        let before = self.objective(h);
        let start = (self.psi.clone(), self.g_psi.clone());
        for release in attempts {
            let mut free: Vec<usize> = interior.iter().chain(release).copied().collect();
            // Orientation of each free coordinate: it lives in [floor, C]
            // after multiplying by its sign.
            let mut signs: Vec<f64> = free
                .iter()
                .map(|&m| {
                    let p = self.psi[m];
                    if !kinked {
                        1.0
                    } else if p == 0.0 {
                        self.gradient(m, h).signum()
                    } else {
                        p.signum()
                    }
                })
                .collect();
            let mut first = None;
            while !free.is_empty() {
                let target = self.face_target(&free, &signs, h)?;
                let limits: Vec<f64> = free
                    .iter()
                    .zip(&signs)
                    .zip(&target)
                    .map(|((&m, &s), &z)| {
                        let (p, z) = (s * self.psi[m], s * z);
                        if z > h.c {
                            (h.c - p) / (z - p)
                        } else if z < floor {
                            (p - floor) / (p - z)
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect();
                let step = limits.iter().copied().fold(1.0, f64::min);
                if first.is_none() {
                    let moves = free.iter().zip(&target).any(|(&m, &z)| z != self.psi[m]);
                    if !(step > 0.0) || !moves {
                        break;
                    }
                    first = Some(step);
                }
                let mut keep = vec![true; free.len()];
                for (u, &m) in free.iter().enumerate() {
                    let s = signs[u];
                    self.psi[m] = if limits[u] <= step {
                        keep[u] = false;
                        s * if s * target[u] > h.c { h.c } else { floor }
                    } else if step == 1.0 {
                        target[u]
                    } else {
                        self.psi[m] + step * (target[u] - self.psi[m])
                    };
                }
                self.refresh();
                if step == 1.0 {
                    break;
                }
                let mut it = keep.iter();
                free.retain(|_| *it.next().expect("same length"));
                let mut it = keep.iter();
                signs.retain(|_| *it.next().expect("same length"));
            }
            let Some(step) = first else { continue };
            if self.objective(h) < before - 64.0 * f64::EPSILON * self.magnitude(h) {
                // ascent is exact on each face, so only rounding can get here
                (self.psi, self.g_psi) = start;
                return Ok(0.0);
            }
            return Ok(step);
        }
        Ok(0.0)
    }

    /// One cyclic pass of exact coordinate maximisation.
    fn coordinate_sweep(&mut self, h: &SvmHyper) {
        let n = self.y.len();
        for m in 0..n {
            let q_mm = self.gram[(m, m)] + h.gamma;
            let r = self.y[m] - self.g_psi[m] - h.gamma * self.psi[m] + q_mm * self.psi[m];
            let new = (soft_threshold(r, h.epsilon) / q_mm).clamp(-h.c, h.c);
            let delta = new - self.psi[m];
            if delta != 0.0 {
                self.psi[m] = new;
                for u in 0..n {
                    self.g_psi[u] += delta * self.gram[(u, m)];
                }
            }
        }
        self.refresh();
    }
}

/// Trains on `pilots` with an RBF Gram matrix of width `hyper.rbf_sigma`.
pub fn solve_lssvm(pilots: &PilotEstimate, hyper: &SvmHyper) -> Result<DualSolution> {
    hyper.validate()?;
    let gram = rbf_gram(&pilots.positions, hyper.rbf_sigma)?;
    solve_with_gram(&gram, &pilots.values, hyper)
}

/// Trains against a precomputed Gram matrix (any Mercer kernel).
pub fn solve_with_gram(gram: &DMatrix<f64>, y: &[Cf64], hyper: &SvmHyper) -> Result<DualSolution> {
    hyper.validate()?;
    let n = y.len();
    if n == 0 {
        return Err(Error::InputShape("no pilots to train on".into()));
    }
    check_square(gram, n)?;
    let mut parts = [
        RealPart::new(gram, y.iter().map(|v| v.re).collect()),
        RealPart::new(gram, y.iter().map(|v| v.im).collect()),
    ];
    let objective = |parts: &[RealPart; 2]| parts[0].objective(hyper) + parts[1].objective(hyper);
    let residual = |parts: &[RealPart; 2]| parts[0].residual(hyper).max(parts[1].residual(hyper));

    let mut objective_trace = vec![objective(&parts)];
    let mut trace = Vec::new();
    let mut res = residual(&parts);
    let mut iterations = 0;
    while res > hyper.tol {
        if iterations == hyper.max_iter {
            let psi = combine(&parts);
            return Err(Error::Convergence(Box::new(ConvergenceFailure {
                iterations,
                residual: res,
                tol: hyper.tol,
                last_psi: psi,
                objective_trace,
            })));
        }
        iterations += 1;
        let [re_z, im_z] = [parts[0].zone_counts(hyper), parts[1].zone_counts(hyper)];
        let mut step = [0.0; 2];
        for (i, part) in parts.iter_mut().enumerate() {
            if part.residual(hyper) > hyper.tol {
                step[i] = part.face_step(hyper)?;
            }
        }
        // the sweep adjusts held coordinates the face step leaves alone
        let mut sweep = false;
        for part in parts.iter_mut() {
            if part.residual(hyper) > hyper.tol {
                part.coordinate_sweep(hyper);
                sweep = true;
            }
        }
        res = residual(&parts);
        let obj = objective(&parts);
        objective_trace.push(obj);
        trace.push(IterationRecord {
            iteration: iterations,
            objective: obj,
            residual: res,
            step,
            coordinate_sweep: sweep,
            zones: [re_z[0], re_z[1], im_z[0], im_z[1]],
        });
    }

    let psi = combine(&parts);
    Ok(DualSolution {
        support_mask: support_mask(&psi),
        bias: Cf64::new(0.0, 0.0),
        iterations,
        final_objective: *objective_trace.last().expect("initial entry"),
        residual: res,
        objective_trace,
        trace,
        psi,
    })
}

fn combine(parts: &[RealPart; 2]) -> Vec<Cf64> {
    parts[0]
        .psi
        .iter()
        .zip(&parts[1].psi)
        .map(|(&re, &im)| Cf64::new(re, im))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn hyper(epsilon: f64, gamma: f64, c: f64, sigma: f64) -> SvmHyper {
        SvmHyper {
            epsilon,
            gamma,
            c,
            rbf_sigma: sigma,
            tol: 1e-12,
            max_iter: 500,
        }
    }

    fn random_targets(n: usize, seed: u64, scale: f64) -> Vec<Cf64> {
        let mut rng = crate::rng::seeded(seed);
        (0..n)
            .map(|_| Cf64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
            .collect()
    }

    #[test]
    fn zero_multipliers_give_zero_objective() {
        let g = rbf_gram(&[0, 6, 12], 6.0).unwrap();
        let y = random_targets(3, 1, 1.0);
        let v = dual_objective(&Multipliers::zeros(3), &g, &y, &hyper(0.1, 0.5, 1.0, 6.0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn box_violations_are_domain_errors() {
        let g = rbf_gram(&[0, 6], 6.0).unwrap();
        let y = random_targets(2, 1, 1.0);
        let mut a = Multipliers::zeros(2);
        a.im_neg[1] = 1.5;
        assert!(matches!(
            dual_objective(&a, &g, &y, &hyper(0.0, 1.0, 1.0, 6.0)),
            Err(Error::Domain(_))
        ));
        a.im_neg[1] = -0.1;
        assert!(matches!(
            dual_objective(&a, &g, &y, &hyper(0.0, 1.0, 1.0, 6.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn single_pilot_stationary_point() {
        let y = [Cf64::new(0.8, -0.6)];
        let g = DMatrix::from_element(1, 1, 1.0);
        let gamma = 0.25;
        let h = hyper(0.0, gamma, 1e6, 1.0);
        let sol = solve_with_gram(&g, &y, &h).unwrap();
        assert!((sol.psi[0] - y[0] / (1.0 + gamma)).norm() < 1e-12);
        let want = y[0].norm_sqr() / (2.0 * (1.0 + gamma));
        assert!((sol.final_objective - want).abs() < 1e-12);
        let alphas = sol.multipliers();
        assert!((dual_objective(&alphas, &g, &y, &h).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn insensitive_targets_give_zero_psi() {
        let pilots = PilotEstimate::new(vec![0, 6, 12, 18], vec![Cf64::new(0.3, -0.2); 4]).unwrap();
        let sol = solve_lssvm(&pilots, &hyper(0.5, 0.1, 1.0, 6.0)).unwrap();
        assert!(sol.psi.iter().all(|p| *p == Cf64::new(0.0, 0.0)));
        assert_eq!(sol.support_count(), 0);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn kkt_and_box_hold_at_the_optimum() {
        let positions: Vec<usize> = (0..20).map(|m| 3 * m).collect();
        let y = random_targets(20, 7, 2.0);
        let h = hyper(0.2, 0.3, 0.8, 5.0);
        let pilots = PilotEstimate::new(positions.clone(), y.clone()).unwrap();
        let sol = solve_lssvm(&pilots, &h).unwrap();
        let g = rbf_gram(&positions, h.rbf_sigma).unwrap();
        for (m, p) in sol.psi.iter().enumerate() {
            assert!(p.re.abs() <= h.c && p.im.abs() <= h.c);
            let e: Cf64 = y[m] - (0..20).map(|v| sol.psi[v] * g[(m, v)]).sum::<Cf64>();
            // ψ equals the cost derivative at its own residual
            assert!((p.re - super::super::huber::huber_real_derivative(e.re, &h)).abs() < 1e-8);
            assert!((p.im - super::super::huber::huber_real_derivative(e.im, &h)).abs() < 1e-8);
        }
        let a = sol.multipliers();
        for m in 0..20 {
            assert!(a.re_pos[m] * a.re_neg[m] == 0.0 && a.im_pos[m] * a.im_neg[m] == 0.0);
        }
        // strong duality
        let primal = primal_objective(&sol.psi, &g, &y, &h);
        assert!((primal - sol.final_objective).abs() < 1e-8 * primal.abs().max(1.0));
    }

    #[test]
    fn objective_never_decreases() {
        for seed in 0..20 {
            let positions: Vec<usize> = (0..30).map(|m| 6 * m).collect();
            let y = random_targets(30, seed, 3.0);
            let h = hyper(0.05 * (seed % 3) as f64, 0.05, 0.5, 12.0);
            let sol = solve_lssvm(&PilotEstimate::new(positions, y).unwrap(), &h).unwrap();
            for w in sol.objective_trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "seed {seed}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn iteration_cap_reports_last_iterate() {
        let positions: Vec<usize> = (0..30).map(|m| 6 * m).collect();
        let y = random_targets(30, 3, 3.0);
        let h = SvmHyper {
            max_iter: 1,
            ..hyper(0.1, 0.01, 0.2, 12.0)
        };
        match solve_lssvm(&PilotEstimate::new(positions, y).unwrap(), &h) {
            Err(Error::Convergence(f)) => {
                assert_eq!(f.iterations, 1);
                assert_eq!(f.last_psi.len(), 30);
                assert_eq!(f.objective_trace.len(), 2);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn trace_is_json_lines() {
        let positions: Vec<usize> = (0..10).map(|m| 6 * m).collect();
        let sol = solve_lssvm(
            &PilotEstimate::new(positions, random_targets(10, 2, 1.0)).unwrap(),
            &hyper(0.0, 0.1, 0.3, 6.0),
        )
        .unwrap();
        let text = sol.trace_jsonl();
        assert_eq!(text.lines().count(), sol.iterations);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["objective"].is_f64());
        }
    }
}
