use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Computational domain: an interval or an axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// Lebesgue measure `|Ω|`.
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
        }
    }
}

/// Uniform simplicial mesh. In 2D every grid square is split into two
/// triangles along its `(i, j) - (i+1, j+1)` diagonal.
#[derive(Debug, Clone)]
pub struct Mesh {
    domain: Domain,
    dim: usize,
    shape: [usize; 2],
    spacing: [f64; 2],
    points: Vec<[f64; 2]>,
    cell_nodes: Vec<usize>,
    shape_grads: Vec<[f64; 2]>,
    volumes: Vec<f64>,
    boundary: Vec<bool>,
    lumped_mass: Vec<f64>,
    interior: Vec<usize>,
    dof: Vec<Option<usize>>,
}

fn divisions(extent: f64, h: f64) -> Result<usize> {
    let n = (extent / h).round();
    if !(n >= 1.0 && n < 1e7) {
        return Err(Error::InvalidParameter(format!(
            "cell size {h} does not fit extent {extent}"
        )));
    }
    Ok(n as usize)
}

/// Build the uniform mesh of `domain` with cell size close to `h`. The
/// actual spacing is `extent / round(extent / h)`.
pub fn build_mesh(domain: Domain, h: f64) -> Result<Mesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("cell size must be positive, got {h}")));
    }
    match domain {
        Domain::Interval { lo, hi } => {
            if !(hi > lo) {
                return Err(Error::InvalidParameter(format!("empty interval ({lo}, {hi})")));
            }
            let nc = divisions(hi - lo, h)?;
            let dx = (hi - lo) / nc as f64;
            let points = (0..=nc).map(|i| [lo + dx * i as f64, 0.0]).collect();
            let mut cell_nodes = Vec::with_capacity(2 * nc);
            let mut shape_grads = Vec::with_capacity(2 * nc);
            for c in 0..nc {
                cell_nodes.extend([c, c + 1]);
                shape_grads.extend([[-1.0 / dx, 0.0], [1.0 / dx, 0.0]]);
            }
            let mut boundary = vec![false; nc + 1];
            boundary[0] = true;
            boundary[nc] = true;
            Ok(Mesh::finish(domain, 1, [nc + 1, 1], [dx, 0.0], points, cell_nodes, shape_grads, vec![dx; nc], boundary))
        }
        Domain::Rectangle { lo, hi } => {
            if !(hi[0] > lo[0] && hi[1] > lo[1]) {
                return Err(Error::InvalidParameter(format!("empty rectangle {lo:?} x {hi:?}")));
            }
            let (ncx, ncy) = (divisions(hi[0] - lo[0], h)?, divisions(hi[1] - lo[1], h)?);
            let (dx, dy) = ((hi[0] - lo[0]) / ncx as f64, (hi[1] - lo[1]) / ncy as f64);
            let (nx, ny) = (ncx + 1, ncy + 1);
            let id = |i: usize, j: usize| j * nx + i;
            let mut points = Vec::with_capacity(nx * ny);
            let mut boundary = Vec::with_capacity(nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    points.push([lo[0] + dx * i as f64, lo[1] + dy * j as f64]);
                    boundary.push(i == 0 || j == 0 || i == ncx || j == ncy);
                }
            }
            let mut cell_nodes = Vec::with_capacity(6 * ncx * ncy);
            let mut shape_grads = Vec::with_capacity(6 * ncx * ncy);
            for j in 0..ncy {
                for i in 0..ncx {
                    // lower-right triangle: (i,j), (i+1,j), (i+1,j+1)
                    cell_nodes.extend([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    shape_grads.extend([[-1.0 / dx, 0.0], [1.0 / dx, -1.0 / dy], [0.0, 1.0 / dy]]);
                    // upper-left triangle: (i,j), (i+1,j+1), (i,j+1)
                    cell_nodes.extend([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                    shape_grads.extend([[0.0, -1.0 / dy], [1.0 / dx, 0.0], [-1.0 / dx, 1.0 / dy]]);
                }
            }
            let volumes = vec![0.5 * dx * dy; 2 * ncx * ncy];
            Ok(Mesh::finish(domain, 2, [nx, ny], [dx, dy], points, cell_nodes, shape_grads, volumes, boundary))
        }
    }
}

impl Mesh {
    #[allow(clippy::too_many_arguments)]
    fn finish(
        domain: Domain,
        dim: usize,
        shape: [usize; 2],
        spacing: [f64; 2],
        points: Vec<[f64; 2]>,
        cell_nodes: Vec<usize>,
        shape_grads: Vec<[f64; 2]>,
        volumes: Vec<f64>,
        boundary: Vec<bool>,
    ) -> Mesh {
        let npc = dim + 1;
        let mut lumped_mass = vec![0.0; points.len()];
        for (c, &vol) in volumes.iter().enumerate() {
            for &n in &cell_nodes[c * npc..(c + 1) * npc] {
                lumped_mass[n] += vol / npc as f64;
            }
        }
        let mut interior = Vec::new();
        let mut dof = vec![None; points.len()];
        for (n, &b) in boundary.iter().enumerate() {
            if !b {
                dof[n] = Some(interior.len());
                interior.push(n);
            }
        }
        Mesh {
            domain,
            dim,
            shape,
            spacing,
            points,
            cell_nodes,
            shape_grads,
            volumes,
            boundary,
            lumped_mass,
            interior,
            dof,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis (`[n, 1]` in 1D).
    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    /// Largest grid spacing.
    pub fn h(&self) -> f64 {
        self.spacing[0].max(self.spacing[1])
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    pub fn cell_count(&self) -> usize {
        self.volumes.len()
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.dim + 1
    }

    /// Coordinates of node `n` (the second entry is zero in 1D).
    pub fn point(&self, n: usize) -> [f64; 2] {
        self.points[n]
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Coordinates of node `n` as a slice of length `dim`.
    pub fn coords(&self, n: usize) -> &[f64] {
        &self.points[n][..self.dim]
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let npc = self.dim + 1;
        &self.cell_nodes[c * npc..(c + 1) * npc]
    }

    /// Gradients of the local hat functions on cell `c`.
    pub fn cell_shape_grads(&self, c: usize) -> &[[f64; 2]] {
        let npc = self.dim + 1;
        &self.shape_grads[c * npc..(c + 1) * npc]
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.volumes[c]
    }

    pub fn cell_centroid(&self, c: usize) -> [f64; 2] {
        let nodes = self.cell(c);
        let k = nodes.len() as f64;
        let mut x = [0.0; 2];
        for &n in nodes {
            x[0] += self.points[n][0] / k;
            x[1] += self.points[n][1] / k;
        }
        x
    }

    pub fn is_boundary(&self, n: usize) -> bool {
        self.boundary[n]
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary.iter().enumerate().filter(|(_, &b)| b).map(|(n, _)| n)
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    /// Position of node `n` in the interior unknown vector.
    pub fn dof(&self, n: usize) -> Option<usize> {
        self.dof[n]
    }

    /// `∫ φ_n`, the row sum of the mass matrix.
    pub fn lumped_mass(&self, n: usize) -> f64 {
        self.lumped_mass[n]
    }
}
