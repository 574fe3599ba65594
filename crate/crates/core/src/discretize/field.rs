use std::io::{BufRead, Write};
use std::sync::Arc;

use super::Mesh;
use crate::{Error, Result};

/// Nodal values of a continuous piecewise-linear function.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for {} nodes",
                values.len(),
                mesh.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at node {i}")));
        }
        Ok(DiscreteField { mesh, values })
    }

    pub fn zeros(mesh: Arc<Mesh>) -> Self {
        let n = mesh.node_count();
        DiscreteField { mesh, values: vec![0.0; n] }
    }

    pub fn constant(mesh: Arc<Mesh>, c: f64) -> Self {
        let n = mesh.node_count();
        DiscreteField { mesh, values: vec![c; n] }
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(mesh: Arc<Mesh>, f: F) -> Self {
        let values = (0..mesh.node_count()).map(|n| f(mesh.coords(n))).collect();
        DiscreteField { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `(node, value)` pairs on the boundary.
    pub fn boundary_trace(&self) -> Vec<(usize, f64)> {
        self.mesh.boundary_nodes().map(|n| (n, self.values[n])).collect()
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.mesh.interior_nodes().iter().map(|&n| self.values[n]).collect()
    }

    /// Exact gradient of the interpolant on cell `c` (second entry zero in 1D).
    pub fn cell_gradient(&self, c: usize) -> [f64; 2] {
        cell_gradient(&self.mesh, &self.values, c)
    }

    pub fn cell_mean(&self, c: usize) -> f64 {
        let nodes = self.mesh.cell(c);
        nodes.iter().map(|&n| self.values[n]).sum::<f64>() / nodes.len() as f64
    }

    /// Nodal gradients as the volume-weighted average of the adjacent cell
    /// gradients.
    pub fn nodal_gradients(&self) -> Vec<[f64; 2]> {
        nodal_gradients(&self.mesh, &self.values)
    }

    /// `max_c |∇u|_c`.
    pub fn max_gradient(&self) -> f64 {
        (0..self.mesh.cell_count())
            .map(|c| {
                let g = self.cell_gradient(c);
                g[0].hypot(g[1])
            })
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Write `node_id,x[,y],value` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.mesh.dim() == 1 {
            writeln!(w, "node_id,x,value")?;
        } else {
            writeln!(w, "node_id,x,y,value")?;
        }
        for (n, v) in self.values.iter().enumerate() {
            let p = self.mesh.point(n);
            if self.mesh.dim() == 1 {
                writeln!(w, "{n},{:?},{v:?}", p[0])?;
            } else {
                writeln!(w, "{n},{:?},{:?},{v:?}", p[0], p[1])?;
            }
        }
        Ok(())
    }

    /// Read values written by [`DiscreteField::write_csv`] back onto `mesh`.
    pub fn read_csv<R: BufRead>(mesh: Arc<Mesh>, r: R) -> Result<Self> {
        let mut values = vec![f64::NAN; mesh.node_count()];
        let cols = mesh.dim() + 2;
        for (line_no, line) in r.lines().enumerate().skip(1) {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            let bad = || Error::config(format!("csv line {}", line_no + 1), format!("malformed row `{line}`"));
            if parts.len() != cols {
                return Err(bad());
            }
            let n: usize = parts[0].trim().parse().map_err(|_| bad())?;
            let v: f64 = parts[cols - 1].trim().parse().map_err(|_| bad())?;
            if n >= values.len() {
                return Err(bad());
            }
            values[n] = v;
        }
        DiscreteField::new(mesh, values)
    }
}

pub(crate) fn cell_gradient(mesh: &Mesh, values: &[f64], c: usize) -> [f64; 2] {
    let mut g = [0.0; 2];
    for (&n, phi) in mesh.cell(c).iter().zip(mesh.cell_shape_grads(c)) {
        g[0] += values[n] * phi[0];
        g[1] += values[n] * phi[1];
    }
    g
}

pub(crate) fn nodal_gradients(mesh: &Mesh, values: &[f64]) -> Vec<[f64; 2]> {
    let mut acc = vec![[0.0; 2]; mesh.node_count()];
    let mut weight = vec![0.0; mesh.node_count()];
    for c in 0..mesh.cell_count() {
        let g = cell_gradient(mesh, values, c);
        let vol = mesh.cell_volume(c);
        for &n in mesh.cell(c) {
            acc[n][0] += vol * g[0];
            acc[n][1] += vol * g[1];
            weight[n] += vol;
        }
    }
    acc.iter()
        .zip(weight)
        .map(|(a, w)| [a[0] / w, a[1] / w])
        .collect()
}
