//! Run configuration embedded into every report for reproducibility.

use bosonic_core::char_fn::Sampler;
use bosonic_core::fock::QuadratureGrid;
use bosonic_core::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Structural identity tolerance.
    pub tol: f64,
    /// Eigenvalue nonnegativity tolerance.
    pub eig_tol: f64,
    /// Kernel-membership threshold for canonical coefficients.
    pub rank_tol: f64,
    pub cutoff: usize,
    pub grid_radius: f64,
    pub grid_step: f64,
    pub epsilons: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 20200917,
            tol: 1e-9,
            eig_tol: 1e-8,
            rank_tol: 1e-10,
            cutoff: 20,
            grid_radius: 8.0,
            grid_step: 0.05,
            epsilons: vec![0.2, 0.1, 0.05, 0.02, 0.01],
        }
    }
}

impl RunConfig {
    pub fn sampler(&self) -> Sampler {
        Sampler::with_seed(self.seed)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            structural: self.tol,
            eigen: self.eig_tol,
            rank: self.rank_tol,
        }
    }

    pub fn grid(&self) -> Result<QuadratureGrid, String> {
        QuadratureGrid::new(self.grid_radius, self.grid_step).map_err(|e| e.to_string())
    }
}

/// Worker cap from the BOSONIC_THREADS environment variable (default 1).
pub fn worker_cap() -> usize {
    std::env::var("BOSONIC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1)
}
