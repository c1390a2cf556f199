//! Uniform triangulation of the unit square for first-order finite elements.
//!
//! The square is divided into `2^level x 2^level` cells, each split by its
//! lower-left to upper-right diagonal. Boundary nodes carry homogeneous
//! Dirichlet data; only interior nodes are unknowns.

use crate::sum::Accumulator;
use crate::{Error, Result};

/// One triangle with all quantities the assembly needs: vertex node ids,
/// area, centroid, and the local stiffness pattern
/// `loc[a][b] = area * (grad phi_a . grad phi_b)` for a unit diffusion
/// coefficient.
#[derive(Debug, Clone)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub area: f64,
    pub centroid: [f64; 2],
    pub loc: [[f64; 3]; 3],
}

#[derive(Debug, Clone)]
pub struct Mesh {
    level: u32,
    cells_per_side: usize,
    h: f64,
    coords: Vec<[f64; 2]>,
    triangles: Vec<Triangle>,
    interior: Vec<usize>,
    /// Node id to position in `interior`, or None on the boundary.
    interior_index: Vec<Option<u32>>,
}

impl Mesh {
    /// Mesh width `h = 2^-level`. Level 1 is the smallest mesh with an
    /// interior node; level 12 caps the node count at a workstation scale.
    pub fn new(level: u32) -> Result<Self> {
        if !(1..=12).contains(&level) {
            return Err(Error::InvalidConfig(format!(
                "mesh level must lie in 1..=12, got {level}"
            )));
        }
        let m = 1usize << level;
        let h = 1.0 / m as f64;
        let nodes_per_side = m + 1;
        let node_id = |i: usize, j: usize| j * nodes_per_side + i;

        let mut coords = Vec::with_capacity(nodes_per_side * nodes_per_side);
        for j in 0..nodes_per_side {
            for i in 0..nodes_per_side {
                coords.push([i as f64 * h, j as f64 * h]);
            }
        }

        let mut triangles = Vec::with_capacity(2 * m * m);
        for j in 0..m {
            for i in 0..m {
                let quad = [
                    node_id(i, j),
                    node_id(i + 1, j),
                    node_id(i + 1, j + 1),
                    node_id(i, j + 1),
                ];
                triangles.push(make_triangle(&coords, [quad[0], quad[1], quad[2]]));
                triangles.push(make_triangle(&coords, [quad[0], quad[2], quad[3]]));
            }
        }

        let mut interior = Vec::with_capacity((m - 1) * (m - 1));
        let mut interior_index = vec![None; coords.len()];
        for j in 1..m {
            for i in 1..m {
                let id = node_id(i, j);
                interior_index[id] = Some(interior.len() as u32);
                interior.push(id);
            }
        }

        Ok(Mesh {
            level,
            cells_per_side: m,
            h,
            coords,
            triangles,
            interior,
            interior_index,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn node_coords(&self, id: usize) -> [f64; 2] {
        self.coords[id]
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_index[node].map(|i| i as usize)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.interior_index[node].is_none()
    }

    /// Node id of the grid point `(i, j)`, mainly for tests.
    pub fn grid_node(&self, i: usize, j: usize) -> usize {
        j * (self.cells_per_side + 1) + i
    }
}

fn make_triangle(coords: &[[f64; 2]], vertices: [usize; 3]) -> Triangle {
    let p0 = coords[vertices[0]];
    let p1 = coords[vertices[1]];
    let p2 = coords[vertices[2]];
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    let area = det.abs() / 2.0;
    let centroid = [
        (p0[0] + p1[0] + p2[0]) / 3.0,
        (p0[1] + p1[1] + p2[1]) / 3.0,
    ];
    // grad phi_a = (b_a, c_a) / det for the P1 basis on this triangle.
    let b = [p1[1] - p2[1], p2[1] - p0[1], p0[1] - p1[1]];
    let c = [p2[0] - p1[0], p0[0] - p2[0], p1[0] - p0[0]];
    let mut loc = [[0.0; 3]; 3];
    for a in 0..3 {
        for bb in 0..3 {
            loc[a][bb] = area * (b[a] * b[bb] + c[a] * c[bb]) / (det * det);
        }
    }
    Triangle {
        vertices,
        area,
        centroid,
        loc,
    }
}

/// Exact integral over the unit square of the piecewise-linear interpolant
/// with the given nodal values: each triangle contributes its area times the
/// mean of its vertex values.
pub fn qoi(mesh: &Mesh, u: &[f64]) -> Result<f64> {
    if u.len() != mesh.num_nodes() {
        return Err(Error::DimensionMismatch {
            context: "qoi nodal values",
            expected: mesh.num_nodes(),
            actual: u.len(),
        });
    }
    let mut acc = Accumulator::new();
    for tri in mesh.triangles() {
        let [a, b, c] = tri.vertices;
        acc.add(tri.area * (u[a] + u[b] + u[c]) / 3.0);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_geometry() {
        for level in [1u32, 3, 5] {
            let mesh = Mesh::new(level).unwrap();
            let m = 1usize << level;
            assert_eq!(mesh.num_nodes(), (m + 1) * (m + 1));
            assert_eq!(mesh.triangles().len(), 2 * m * m);
            assert_eq!(mesh.interior().len(), (m - 1) * (m - 1));
            let total: f64 = mesh.triangles().iter().map(|t| t.area).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for t in mesh.triangles() {
                assert!((t.area - mesh.h() * mesh.h() / 2.0).abs() < 1e-16);
            }
        }
        assert!(Mesh::new(0).is_err());
        assert!(Mesh::new(13).is_err());
    }

    #[test]
    fn boundary_classification() {
        let mesh = Mesh::new(2).unwrap();
        let m = 4;
        for j in 0..=m {
            for i in 0..=m {
                let id = mesh.grid_node(i, j);
                let on_edge = i == 0 || j == 0 || i == m || j == m;
                assert_eq!(mesh.is_boundary(id), on_edge, "({i}, {j})");
                assert_eq!(mesh.interior_index(id).is_none(), on_edge);
            }
        }
    }

    #[test]
    fn local_stiffness_rows_sum_to_zero() {
        // Gradients of the three P1 basis functions sum to zero, so each row
        // of the local pattern must too.
        let mesh = Mesh::new(3).unwrap();
        for t in mesh.triangles() {
            for a in 0..3 {
                let row: f64 = t.loc[a].iter().sum();
                assert!(row.abs() < 1e-15);
                assert!(t.loc[a][a] > 0.0);
            }
        }
    }

    #[test]
    fn qoi_of_simple_fields() {
        let mesh = Mesh::new(4).unwrap();
        let n = mesh.num_nodes();
        assert_eq!(qoi(&mesh, &vec![2.5; n]).unwrap(), 2.5);
        assert_eq!(qoi(&mesh, &vec![0.0; n]).unwrap(), 0.0);

        // A hat function at one interior node integrates to a third of its
        // patch area, which is h^2 on this triangulation.
        let mut hat = vec![0.0; n];
        hat[mesh.interior()[5]] = 1.0;
        let h = mesh.h();
        assert!((qoi(&mesh, &hat).unwrap() - h * h).abs() < 1e-16);

        // Linearity holds exactly up to round-off.
        let u: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
        let v: Vec<f64> = (0..n).map(|k| (k as f64 * 0.11).cos()).collect();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        let lhs = qoi(&mesh, &combo).unwrap();
        let rhs = 2.0 * qoi(&mesh, &u).unwrap() - 3.0 * qoi(&mesh, &v).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);

        assert!(qoi(&mesh, &vec![0.0; n - 1]).is_err());
    }
}
