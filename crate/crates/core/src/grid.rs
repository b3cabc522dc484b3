//! Discretized phase space: a periodic 1-D spatial mesh crossed with a
//! truncated uniform Cartesian velocity lattice.
//!
//! The velocity quadrature is the composite midpoint rule per axis, so the
//! lattice is symmetric under `v -> -v`, contains `v = 0` for odd node
//! counts, and integrates odd functions to exactly zero. All reductions go
//! through [`PhaseGrid::integrate`], a compensated (Neumaier) sum in fixed
//! node order, so conservation diagnostics are deterministic.

use crate::error::{KineticError, Result};
use crate::vecn::Vec3;

/// Parameters for [`PhaseGrid::new`].
#[derive(Debug, Clone)]
pub struct GridConfig {
    /// Spatial period `a1` of the 1-D domain.
    pub domain_length: f64,
    /// Number of spatial cells.
    pub n_cells: usize,
    /// Velocity dimension `d` in {1, 2, 3}.
    pub velocity_dim: usize,
    /// Lattice half-width; each axis covers `[-v_max, v_max]`.
    pub v_max: f64,
    /// Velocity nodes per axis.
    pub nodes_per_axis: usize,
}

impl GridConfig {
    /// Single-cell (space-homogeneous) grid.
    pub fn homogeneous(velocity_dim: usize, v_max: f64, nodes_per_axis: usize) -> Self {
        GridConfig {
            domain_length: 1.0,
            n_cells: 1,
            velocity_dim,
            v_max,
            nodes_per_axis,
        }
    }
}

/// Immutable phase-space discretization shared by every moment integral.
#[derive(Debug, Clone)]
pub struct PhaseGrid {
    domain_length: f64,
    n_cells: usize,
    dx: f64,
    velocity_dim: usize,
    v_max: f64,
    nodes_per_axis: usize,
    nodes: Vec<Vec3>,
    speed2: Vec<f64>,
    weights: Vec<f64>,
}

impl PhaseGrid {
    pub fn new(cfg: &GridConfig) -> Result<Self> {
        if !(cfg.domain_length > 0.0) {
            return Err(KineticError::config(
                "domain_length",
                format!("must be positive, got {}", cfg.domain_length),
            ));
        }
        if cfg.n_cells == 0 {
            return Err(KineticError::config("n_cells", "must be at least 1"));
        }
        if !(1..=3).contains(&cfg.velocity_dim) {
            return Err(KineticError::config(
                "velocity_dim",
                format!("must be 1, 2 or 3, got {}", cfg.velocity_dim),
            ));
        }
        if !(cfg.v_max > 0.0) {
            return Err(KineticError::config(
                "v_max",
                format!("must be positive, got {}", cfg.v_max),
            ));
        }
        if cfg.nodes_per_axis < 2 {
            return Err(KineticError::config(
                "nodes_per_axis",
                format!("must be at least 2, got {}", cfg.nodes_per_axis),
            ));
        }

        let d = cfg.velocity_dim;
        let n = cfg.nodes_per_axis;
        let dv = 2.0 * cfg.v_max / n as f64;
        // Cell-centered axis nodes: -v_max + (j + 1/2) dv.
        let axis: Vec<f64> = (0..n)
            .map(|j| -cfg.v_max + (j as f64 + 0.5) * dv)
            .collect();

        let n_nodes = n.pow(d as u32);
        let mut nodes = Vec::with_capacity(n_nodes);
        let mut speed2 = Vec::with_capacity(n_nodes);
        let weight = dv.powi(d as i32);
        for idx in 0..n_nodes {
            let mut v: Vec3 = [0.0; 3];
            let mut rem = idx;
            // Axis 0 varies fastest.
            for item in v.iter_mut().take(d) {
                *item = axis[rem % n];
                rem /= n;
            }
            speed2.push(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            nodes.push(v);
        }

        Ok(PhaseGrid {
            domain_length: cfg.domain_length,
            n_cells: cfg.n_cells,
            dx: cfg.domain_length / cfg.n_cells as f64,
            velocity_dim: d,
            v_max: cfg.v_max,
            nodes_per_axis: n,
            nodes,
            speed2,
            weights: vec![weight; n_nodes],
        })
    }

    pub fn velocity_dim(&self) -> usize {
        self.velocity_dim
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    /// Spatial cell width.
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Velocity spacing per axis.
    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / self.nodes_per_axis as f64
    }

    /// Center coordinate of spatial cell `i`.
    pub fn cell_x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    /// Squared speed `|v|^2` per node, precomputed.
    pub fn speed2(&self) -> &[f64] {
        &self.speed2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the mirror node `v -> -v`.
    pub fn mirror_node(&self, idx: usize) -> usize {
        let n = self.nodes_per_axis;
        let mut rem = idx;
        let mut out = 0;
        let mut stride = 1;
        for _ in 0..self.velocity_dim {
            let j = rem % n;
            rem /= n;
            out += (n - 1 - j) * stride;
            stride *= n;
        }
        out
    }

    /// Velocity-space quadrature of per-node `values`: sum of w_i values_i
    /// with compensated summation in fixed node order.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(KineticError::Dimension(format!(
                "integrand has {} values, lattice has {} nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        let mut acc = Neumaier::default();
        for (w, v) in self.weights.iter().zip(values) {
            acc.add(w * v);
        }
        Ok(acc.value())
    }
}

/// Neumaier-compensated accumulator. Additions happen in call order; the
/// result is independent of the platform's FMA availability.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_1d(v_max: f64, nodes: usize) -> PhaseGrid {
        PhaseGrid::new(&GridConfig::homogeneous(1, v_max, nodes)).unwrap()
    }

    #[test]
    fn uniform_midpoint_weights_1d() {
        let g = grid_1d(8.0, 64);
        assert!(g.weights().iter().all(|&w| (w - 0.25).abs() < 1e-15));
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - 16.0).abs() < 16.0 * 1e-12);
    }

    #[test]
    fn weight_sum_is_box_volume_3d() {
        let g = PhaseGrid::new(&GridConfig::homogeneous(3, 6.0, 32)).unwrap();
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - 1728.0).abs() < 1728.0 * 1e-12, "sum = {sum}");
    }

    #[test]
    fn zero_node_count_is_a_config_error() {
        let err = PhaseGrid::new(&GridConfig::homogeneous(2, 5.0, 0)).unwrap_err();
        match err {
            KineticError::Config { key, .. } => assert_eq!(key, "nodes_per_axis"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_dimension_and_sizes_rejected() {
        assert!(PhaseGrid::new(&GridConfig::homogeneous(4, 5.0, 8)).is_err());
        assert!(PhaseGrid::new(&GridConfig::homogeneous(2, -1.0, 8)).is_err());
        let mut cfg = GridConfig::homogeneous(1, 5.0, 8);
        cfg.domain_length = 0.0;
        assert!(PhaseGrid::new(&cfg).is_err());
    }

    #[test]
    fn odd_axis_count_contains_zero_node() {
        let g = grid_1d(4.0, 33);
        assert!(g.nodes().iter().any(|v| v[0].abs() < 1e-14));
        let g2 = grid_1d(4.0, 32);
        assert!(g2.nodes().iter().all(|v| v[0].abs() > 1e-14));
    }

    #[test]
    fn lattice_is_mirror_symmetric() {
        let g = PhaseGrid::new(&GridConfig::homogeneous(3, 5.0, 6)).unwrap();
        for i in 0..g.n_nodes() {
            let j = g.mirror_node(i);
            let vi = g.nodes()[i];
            let vj = g.nodes()[j];
            for a in 0..3 {
                assert!((vi[a] + vj[a]).abs() < 1e-14);
            }
            assert!((g.weights()[i] - g.weights()[j]).abs() == 0.0);
        }
    }

    #[test]
    fn constant_integrand_gives_box_measure() {
        let g = grid_1d(8.0, 64);
        let ones = vec![1.0; g.n_nodes()];
        assert!((g.integrate(&ones).unwrap() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_normalization_matches_erf_oracle() {
        // Standard 1-D Maxwellian (n=1, u=0, T=1, m=1) on [-8, 8] x 128.
        let g = grid_1d(8.0, 128);
        let vals: Vec<f64> = g
            .nodes()
            .iter()
            .map(|v| (-0.5 * v[0] * v[0]).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        let q = g.integrate(&vals).unwrap();
        // Exact mass on the truncated box.
        let oracle = statrs::function::erf::erf(8.0 / 2.0_f64.sqrt());
        assert!((q - oracle).abs() < 1e-10, "q = {q}, oracle = {oracle}");
        assert!((q - 1.0).abs() < 1e-10);
    }

    #[test]
    fn odd_integrand_vanishes_on_symmetric_lattice() {
        let g = grid_1d(8.0, 128);
        let vals: Vec<f64> = g
            .nodes()
            .iter()
            .map(|v| v[0] * (-0.5 * v[0] * v[0]).exp())
            .collect();
        assert!(g.integrate(&vals).unwrap().abs() < 1e-14);
    }

    #[test]
    fn integrate_rejects_length_mismatch() {
        let g = grid_1d(8.0, 16);
        assert!(matches!(
            g.integrate(&[0.0; 4]),
            Err(KineticError::Dimension(_))
        ));
    }

    #[test]
    fn quadrature_is_linear() {
        let g = grid_1d(6.0, 48);
        let f: Vec<f64> = g.nodes().iter().map(|v| (v[0] * 1.3).cos()).collect();
        let h: Vec<f64> = g.nodes().iter().map(|v| (0.2 * v[0]).exp()).collect();
        let (a, b) = (2.5, -0.75);
        let combo: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let lhs = g.integrate(&combo).unwrap();
        let rhs = a * g.integrate(&f).unwrap() + b * g.integrate(&h).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        assert!((lhs - rhs).abs() <= 1e-13 * scale);
    }
}
