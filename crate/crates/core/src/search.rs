//! Seeded numerical searches over pure quantum states.
//!
//! Every search here is deterministic given its [`SearchConfig`]: parallel
//! grid evaluation reduces by `(value, index)` so the thread count never
//! changes the answer.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::DEFAULT_TOL;

/// Knobs shared by every heuristic search in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Polar resolution of the Bloch-sphere grid; the azimuth uses `2·grid`.
    pub grid: usize,
    /// Random restarts for searches without an exhaustive grid.
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: 180,
            restarts: 500,
            seed: 0,
            tol: DEFAULT_TOL,
        }
    }
}

impl SearchConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn bloch_state(theta: f64, phi: f64) -> [Complex64; 2] {
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Hermitian-basis coordinates of the projector onto [`bloch_state`].
pub(crate) fn bloch_projector_coeffs(theta: f64, phi: f64) -> [f64; 4] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (st, ct) = theta.sin_cos();
    [r, r * st * phi.cos(), r * st * phi.sin(), r * ct]
}

/// Haar-random pure state via normalized complex Gaussians.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&mut v);
    v
}

pub(crate) fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// Result of a search: the minimum seen and where.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SphereMin {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

fn grid_point(i: usize, j: usize, grid: usize) -> (f64, f64) {
    let theta = if grid > 1 { PI * i as f64 / (grid - 1) as f64 } else { 0.0 };
    let phi = 2.0 * PI * j as f64 / (2 * grid) as f64;
    (theta, phi)
}

/// Minimizes `f(θ, φ)` over the Bloch sphere: exhaustive grid, then
/// coordinate descent from the best grid points until the step drops
/// below 1e-6.
pub(crate) fn minimize_on_sphere<F>(f: F, grid: usize) -> SphereMin
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let grid = grid.max(2);
    let azimuth = 2 * grid;
    let mut samples: Vec<(f64, usize)> = (0..grid)
        .into_par_iter()
        .flat_map_iter(|i| {
            let f = &f;
            (0..azimuth).map(move |j| {
                let (t, p) = grid_point(i, j, grid);
                (f(t, p), i * azimuth + j)
            })
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let step0 = PI / (grid - 1) as f64;
    let mut best: Option<SphereMin> = None;
    for &(value, idx) in samples.iter().take(4) {
        let (theta, phi) = grid_point(idx / azimuth, idx % azimuth, grid);
        let refined = coordinate_descent(&f, SphereMin { value, theta, phi }, step0);
        if best.is_none_or(|b| refined.value < b.value) {
            best = Some(refined);
        }
    }
    best.expect("grid is nonempty")
}

fn coordinate_descent<F: Fn(f64, f64) -> f64>(f: &F, start: SphereMin, step0: f64) -> SphereMin {
    let mut cur = start;
    let mut step = step0;
    while step >= 1e-6 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (t, p) = (cur.theta + dt, cur.phi + dp);
            let v = f(t, p);
            if v < cur.value {
                cur = SphereMin { value: v, theta: t, phi: p };
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    cur
}

/// Random-restart local search of `f` over unit vectors in `C^d`.
pub(crate) fn minimize_pure_state<F>(d: usize, f: F, cfg: &SearchConfig) -> (f64, Vec<Complex64>)
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    let restarts = cfg.restarts.max(1);
    let results: Vec<(f64, Vec<Complex64>, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut psi = random_pure_state(d, &mut rng);
            let mut val = f(&psi);
            let mut step = 0.5;
            let mut fails = 0;
            while step > 1e-7 {
                let mut cand: Vec<Complex64> = psi
                    .iter()
                    .map(|z| {
                        z + Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
                            * step
                    })
                    .collect();
                normalize(&mut cand);
                let cv = f(&cand);
                if cv < val {
                    psi = cand;
                    val = cv;
                    fails = 0;
                } else {
                    fails += 1;
                    if fails >= 8 {
                        step *= 0.5;
                        fails = 0;
                    }
                }
            }
            (val, psi, r)
        })
        .collect();
    let (v, psi, _) = results
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)))
        .expect("at least one restart");
    (v, psi)
}
