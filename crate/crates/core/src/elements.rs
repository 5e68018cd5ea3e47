//! Reference Lagrange elements on triangles and segments, quadrature rules,
//! and function spaces (dof maps plus Dirichlet masks).
//!
//! Reference triangle: vertices (0,0), (1,0), (0,1). Reference segment: [0,1].
//! P2 triangle nodes are ordered vertices first, then edge midpoints
//! (mid(0,1), mid(1,2), mid(2,0)).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Bc, EdgeKey, Field, InterfaceMesh, SubdomainMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementFamily {
    Lagrange,
}

/// Scalar basis values and reference gradients on the triangle.
pub fn tri_basis(degree: usize, p: [f64; 2]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    let (x, y) = (p[0], p[1]);
    let l0 = 1.0 - x - y;
    let l1 = x;
    let l2 = y;
    match degree {
        0 => Ok((vec![1.0], vec![[0.0, 0.0]])),
        1 => Ok((
            vec![l0, l1, l2],
            vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]],
        )),
        2 => {
            let values = vec![
                l0 * (2.0 * l0 - 1.0),
                l1 * (2.0 * l1 - 1.0),
                l2 * (2.0 * l2 - 1.0),
                4.0 * l0 * l1,
                4.0 * l1 * l2,
                4.0 * l2 * l0,
            ];
            let d0 = [-1.0, -1.0];
            let d1 = [1.0, 0.0];
            let d2 = [0.0, 1.0];
            let g = |a: f64, da: [f64; 2]| [(4.0 * a - 1.0) * da[0], (4.0 * a - 1.0) * da[1]];
            let ge = |a: f64, da: [f64; 2], b: f64, db: [f64; 2]| {
                [4.0 * (da[0] * b + a * db[0]), 4.0 * (da[1] * b + a * db[1])]
            };
            let grads = vec![
                g(l0, d0),
                g(l1, d1),
                g(l2, d2),
                ge(l0, d0, l1, d1),
                ge(l1, d1, l2, d2),
                ge(l2, d2, l0, d0),
            ];
            Ok((values, grads))
        }
        d => Err(Error::UnsupportedDegree(d)),
    }
}

/// Scalar basis values and reference derivatives on the segment.
pub fn seg_basis(degree: usize, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    match degree {
        0 => Ok((vec![1.0], vec![0.0])),
        1 => Ok((vec![1.0 - t, t], vec![-1.0, 1.0])),
        2 => Ok((
            vec![
                (1.0 - t) * (1.0 - 2.0 * t),
                t * (2.0 * t - 1.0),
                4.0 * t * (1.0 - t),
            ],
            vec![4.0 * t - 3.0, 4.0 * t - 1.0, 4.0 - 8.0 * t],
        )),
        d => Err(Error::UnsupportedDegree(d)),
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Reference coordinates; for segments only the first component is used.
    pub points: Vec<[f64; 2]>,
    /// Reference-measure weights (sum to 1/2 on the triangle, 1 on the segment).
    pub weights: Vec<f64>,
}

/// Gauss-Legendre rule on [0,1], exact through the stated polynomial order.
pub fn segment_quadrature(order: usize) -> Result<QuadratureRule> {
    let (nodes, weights): (Vec<f64>, Vec<f64>) = match order {
        0 | 1 => (vec![0.5], vec![1.0]),
        2 | 3 => {
            let d = 0.5 / 3.0_f64.sqrt();
            (vec![0.5 - d, 0.5 + d], vec![0.5, 0.5])
        }
        4 | 5 => {
            let d = 0.5 * (3.0_f64 / 5.0).sqrt();
            (
                vec![0.5 - d, 0.5, 0.5 + d],
                vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
            )
        }
        6 | 7 => {
            let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0_f64 / 5.0).sqrt()).sqrt() * 0.5;
            let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0_f64 / 5.0).sqrt()).sqrt() * 0.5;
            let wa = (18.0 + 30.0_f64.sqrt()) / 72.0;
            let wb = (18.0 - 30.0_f64.sqrt()) / 72.0;
            (
                vec![0.5 - b, 0.5 - a, 0.5 + a, 0.5 + b],
                vec![wb, wa, wa, wb],
            )
        }
        o => return Err(Error::UnsupportedOrder(o)),
    };
    Ok(QuadratureRule {
        points: nodes.iter().map(|&t| [t, 0.0]).collect(),
        weights,
    })
}

/// Symmetric rules on the reference triangle, exact through the stated order.
pub fn triangle_quadrature(order: usize) -> Result<QuadratureRule> {
    // weights below are normalized to unit total and scaled by the reference
    // area 1/2 at the end
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut wts: Vec<f64> = Vec::new();
    let push3 = |a: f64, w: f64, pts: &mut Vec<[f64; 2]>, wts: &mut Vec<f64>| {
        let b = 1.0 - 2.0 * a;
        for p in [[a, a], [b, a], [a, b]] {
            pts.push(p);
            wts.push(w);
        }
    };
    match order {
        0 | 1 => {
            pts.push([1.0 / 3.0, 1.0 / 3.0]);
            wts.push(1.0);
        }
        2 => {
            push3(1.0 / 6.0, 1.0 / 3.0, &mut pts, &mut wts);
        }
        3 | 4 => {
            push3(0.445948490915965, 0.223381589678011, &mut pts, &mut wts);
            push3(0.091576213509771, 0.109951743655322, &mut pts, &mut wts);
        }
        5 => {
            pts.push([1.0 / 3.0, 1.0 / 3.0]);
            wts.push(0.225);
            push3(0.470142064105115, 0.132394152788506, &mut pts, &mut wts);
            push3(0.101286507323456, 0.125939180544827, &mut pts, &mut wts);
        }
        6 => {
            push3(0.249286745170910, 0.116786275726379, &mut pts, &mut wts);
            push3(0.063089014491502, 0.050844906370207, &mut pts, &mut wts);
            let (a, b, w) = (0.310352451033785, 0.053145049844816, 0.082851075618374);
            let c = 1.0 - a - b;
            for p in [[a, b], [b, a], [a, c], [c, a], [b, c], [c, b]] {
                pts.push(p);
                wts.push(w);
            }
        }
        o => return Err(Error::UnsupportedOrder(o)),
    }
    for w in &mut wts {
        *w *= 0.5;
    }
    Ok(QuadratureRule {
        points: pts,
        weights: wts,
    })
}

/// Affine map from the reference triangle onto a physical cell.
#[derive(Debug, Clone, Copy)]
pub struct AffineTri {
    pub origin: [f64; 2],
    pub jac: [[f64; 2]; 2],
    pub det: f64,
    inv_jt: [[f64; 2]; 2],
}

impl AffineTri {
    pub fn new(v: [[f64; 2]; 3]) -> Self {
        let jac = [
            [v[1][0] - v[0][0], v[2][0] - v[0][0]],
            [v[1][1] - v[0][1], v[2][1] - v[0][1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        // inverse transpose maps reference gradients to physical gradients
        let inv_jt = [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]];
        AffineTri {
            origin: v[0],
            jac,
            det,
            inv_jt,
        }
    }

    pub fn to_physical(&self, r: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * r[0] + self.jac[0][1] * r[1],
            self.origin[1] + self.jac[1][0] * r[0] + self.jac[1][1] * r[1],
        ]
    }

    pub fn to_reference(&self, p: [f64; 2]) -> [f64; 2] {
        let dx = p[0] - self.origin[0];
        let dy = p[1] - self.origin[1];
        [
            (self.jac[1][1] * dx - self.jac[0][1] * dy) / self.det,
            (-self.jac[1][0] * dx + self.jac[0][0] * dy) / self.det,
        ]
    }

    pub fn grad_to_physical(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jt[0][0] * g[0] + self.inv_jt[0][1] * g[1],
            self.inv_jt[1][0] * g[0] + self.inv_jt[1][1] * g[1],
        ]
    }
}

#[derive(Debug, Clone)]
pub enum SpaceMesh {
    Subdomain(Arc<SubdomainMesh>),
    Interface(Arc<InterfaceMesh>),
}

/// A Lagrange finite element space over one mesh.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    pub mesh: SpaceMesh,
    pub family: ElementFamily,
    pub degree: usize,
    pub components: usize,
    /// Per-cell global dof indices; component-interleaved (dof = node * nc + c).
    pub dofmap: Vec<Vec<usize>>,
    pub ndof: usize,
    /// Constrained (homogeneous Dirichlet) dofs.
    pub dirichlet: Vec<bool>,
    /// Node coordinates used for nodal interpolation.
    node_coords: Vec<[f64; 2]>,
}

impl FunctionSpace {
    pub fn cell_count(&self) -> usize {
        self.dofmap.len()
    }

    pub fn local_dofs(&self) -> usize {
        self.dofmap[0].len()
    }

    pub fn scalar_basis_len(&self) -> usize {
        self.local_dofs() / self.components
    }

    pub fn subdomain(&self) -> Option<&Arc<SubdomainMesh>> {
        match &self.mesh {
            SpaceMesh::Subdomain(m) => Some(m),
            _ => None,
        }
    }

    pub fn interface(&self) -> Option<&Arc<InterfaceMesh>> {
        match &self.mesh {
            SpaceMesh::Interface(m) => Some(m),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ndof / self.components
    }

    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    /// Nodal interpolation of a (vector-valued when components = 2) function.
    pub fn interpolate<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn([f64; 2]) -> Vec<f64>,
    {
        let nc = self.components;
        let mut coeffs = vec![0.0; self.ndof];
        for (node, &p) in self.node_coords.iter().enumerate() {
            let v = f(p);
            assert_eq!(v.len(), nc);
            for c in 0..nc {
                coeffs[node * nc + c] = v[c];
            }
        }
        coeffs
    }

    /// Zero out Dirichlet-masked entries in place.
    pub fn apply_mask(&self, coeffs: &mut [f64]) {
        for (i, &m) in self.dirichlet.iter().enumerate() {
            if m {
                coeffs[i] = 0.0;
            }
        }
    }
}

/// Build a function space over a subdomain mesh. `dirichlet_field` selects
/// which field's Dirichlet-tagged edges constrain the space (`None` leaves the
/// space unconstrained, as for the fluid pressure).
pub fn build_space(
    mesh: &Arc<SubdomainMesh>,
    family: ElementFamily,
    degree: usize,
    components: usize,
    dirichlet_field: Option<Field>,
) -> Result<FunctionSpace> {
    if degree > 2 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let nv = mesh.vertex_count();
    let nt = mesh.cell_count();
    let edges: Vec<EdgeKey> = mesh.edges();
    let edge_index: std::collections::BTreeMap<EdgeKey, usize> = edges
        .iter()
        .enumerate()
        .map(|(k, &e)| (e, k))
        .collect();

    let n_nodes = match degree {
        0 => nt,
        1 => nv,
        2 => nv + edges.len(),
        _ => unreachable!(),
    };
    let nc = components;

    let mut node_coords = vec![[0.0; 2]; n_nodes];
    let mut dofmap = Vec::with_capacity(nt);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let nodes: Vec<usize> = match degree {
            0 => vec![t],
            1 => tri.to_vec(),
            2 => {
                let mut n = tri.to_vec();
                for k in 0..3 {
                    let key = if tri[k] < tri[(k + 1) % 3] {
                        (tri[k], tri[(k + 1) % 3])
                    } else {
                        (tri[(k + 1) % 3], tri[k])
                    };
                    n.push(nv + edge_index[&key]);
                }
                n
            }
            _ => unreachable!(),
        };
        let verts = mesh.cell_vertices(t);
        match degree {
            0 => {
                node_coords[t] = [
                    (verts[0][0] + verts[1][0] + verts[2][0]) / 3.0,
                    (verts[0][1] + verts[1][1] + verts[2][1]) / 3.0,
                ];
            }
            1 | 2 => {
                for k in 0..3 {
                    node_coords[tri[k]] = verts[k];
                }
                if degree == 2 {
                    for k in 0..3 {
                        node_coords[nodes[3 + k]] = [
                            0.5 * (verts[k][0] + verts[(k + 1) % 3][0]),
                            0.5 * (verts[k][1] + verts[(k + 1) % 3][1]),
                        ];
                    }
                }
            }
            _ => unreachable!(),
        }
        let mut local = Vec::with_capacity(nodes.len() * nc);
        for &n in &nodes {
            for c in 0..nc {
                local.push(n * nc + c);
            }
        }
        dofmap.push(local);
    }

    let mut dirichlet = vec![false; n_nodes * nc];
    if let Some(field) = dirichlet_field {
        for (&(a, b), tag) in &mesh.boundary_edges {
            if tag.bc_for(field) != Some(Bc::Dirichlet) {
                continue;
            }
            if degree >= 1 {
                for v in [a, b] {
                    for c in 0..nc {
                        dirichlet[v * nc + c] = true;
                    }
                }
            }
            if degree == 2 {
                let e = edge_index[&(a, b)];
                for c in 0..nc {
                    dirichlet[(nv + e) * nc + c] = true;
                }
            }
        }
    }

    Ok(FunctionSpace {
        mesh: SpaceMesh::Subdomain(Arc::clone(mesh)),
        family,
        degree,
        components,
        dofmap,
        ndof: n_nodes * nc,
        dirichlet,
        node_coords,
    })
}

/// Build a Lagrange space on the 1D interface mesh. Multiplier spaces carry no
/// Dirichlet constraints. Degree 0 is discontinuous (one node per segment);
/// degrees 1 and 2 are continuous.
pub fn build_interface_space(
    mesh: &Arc<InterfaceMesh>,
    family: ElementFamily,
    degree: usize,
    components: usize,
) -> Result<FunctionSpace> {
    if degree > 2 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let ns = mesh.segment_count();
    let nv = mesh.vertices.len();
    let n_nodes = match degree {
        0 => ns,
        1 => nv,
        2 => nv + ns,
        _ => unreachable!(),
    };
    let nc = components;
    let mut node_coords = vec![[0.0; 2]; n_nodes];
    let mut dofmap = Vec::with_capacity(ns);
    for (s, seg) in mesh.segments.iter().enumerate() {
        let (a, b) = (mesh.vertices[seg[0]], mesh.vertices[seg[1]]);
        let nodes: Vec<usize> = match degree {
            0 => {
                node_coords[s] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                vec![s]
            }
            1 => {
                node_coords[seg[0]] = a;
                node_coords[seg[1]] = b;
                vec![seg[0], seg[1]]
            }
            2 => {
                node_coords[seg[0]] = a;
                node_coords[seg[1]] = b;
                node_coords[nv + s] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                vec![seg[0], seg[1], nv + s]
            }
            _ => unreachable!(),
        };
        let mut local = Vec::with_capacity(nodes.len() * nc);
        for &n in &nodes {
            for c in 0..nc {
                local.push(n * nc + c);
            }
        }
        dofmap.push(local);
    }
    Ok(FunctionSpace {
        mesh: SpaceMesh::Interface(Arc::clone(mesh)),
        family,
        degree,
        components,
        dofmap,
        ndof: n_nodes * nc,
        dirichlet: vec![false; n_nodes * nc],
        node_coords,
    })
}

/// Evaluate a coefficient vector of `space` at a reference point of `cell`:
/// returns per-component values and physical gradients.
pub fn eval_at(
    space: &FunctionSpace,
    coeffs: &[f64],
    cell: usize,
    ref_pt: [f64; 2],
) -> (Vec<f64>, Vec<[f64; 2]>) {
    let mesh = space.subdomain().expect("volume space");
    let map = AffineTri::new(mesh.cell_vertices(cell));
    let (vals, grads) = tri_basis(space.degree, ref_pt).unwrap();
    let nc = space.components;
    let mut value = vec![0.0; nc];
    let mut grad = vec![[0.0; 2]; nc];
    for (k, &v) in vals.iter().enumerate() {
        let g = map.grad_to_physical(grads[k]);
        for c in 0..nc {
            let dof = space.dofmap[cell][k * nc + c];
            value[c] += coeffs[dof] * v;
            grad[c][0] += coeffs[dof] * g[0];
            grad[c][1] += coeffs[dof] * g[1];
        }
    }
    (value, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, Bc, EdgeTags, Rect, SideTags, SubdomainId};

    fn unit_fluid_mesh(nx: usize, ny: usize, bc: Bc) -> Arc<SubdomainMesh> {
        let t = EdgeTags::Fluid(bc);
        Arc::new(
            build_rect_mesh(
                Rect::new(0.0, 0.0, 1.0, 1.0),
                nx,
                ny,
                SubdomainId::Fluid,
                &SideTags {
                    left: t,
                    right: t,
                    bottom: t,
                    top: t,
                },
            )
            .unwrap(),
        )
    }

    #[test]
    fn p1_triangle_barycenter() {
        let (v, _) = tri_basis(1, [1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for x in v {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn p2_partition_of_unity() {
        for p in [[0.2, 0.3], [0.0, 0.0], [0.5, 0.5], [0.1, 0.85]] {
            let (v, g) = tri_basis(2, p).unwrap();
            let s: f64 = v.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            let gx: f64 = g.iter().map(|q| q[0]).sum();
            let gy: f64 = g.iter().map(|q| q[1]).sum();
            assert!(gx.abs() < 1e-13 && gy.abs() < 1e-13);
        }
    }

    #[test]
    fn p1_segment_midpoint() {
        let (v, g) = seg_basis(1, 0.5).unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        assert_eq!(g, vec![-1.0, 1.0]);
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(
            tri_basis(3, [0.1, 0.1]),
            Err(Error::UnsupportedDegree(3))
        ));
    }

    #[test]
    fn triangle_order1_single_point() {
        let q = triangle_quadrature(1).unwrap();
        assert_eq!(q.points.len(), 1);
        assert!((q.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn segment_gauss_cubic() {
        let q = segment_quadrature(3).unwrap();
        assert_eq!(q.points.len(), 2);
        let integral: f64 = q
            .points
            .iter()
            .zip(&q.weights)
            .map(|(p, w)| w * p[0].powi(3))
            .sum();
        assert!((integral - 0.25).abs() < 1e-15);
    }

    /// Exact reference-triangle moments: int x^a y^b = a! b! / (a+b+2)!.
    fn tri_moment(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>().max(1.0);
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn triangle_rules_exact_on_monomials() {
        for order in 1..=6usize {
            let q = triangle_quadrature(order).unwrap();
            for a in 0..=order as u32 {
                for b in 0..=(order as u32 - a) {
                    let num: f64 = q
                        .points
                        .iter()
                        .zip(&q.weights)
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = tri_moment(a, b);
                    assert!(
                        (num - exact).abs() < 1e-14,
                        "order {order} monomial x^{a} y^{b}: {num} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_order4_x2y2() {
        // int over reference triangle of x^2 y^2 = 2! 2! / 6! = 1/180
        let q = triangle_quadrature(4).unwrap();
        let num: f64 = q
            .points
            .iter()
            .zip(&q.weights)
            .map(|(p, w)| w * p[0] * p[0] * p[1] * p[1])
            .sum();
        assert!((num - 1.0 / 180.0).abs() < 1e-14);
    }

    #[test]
    fn segment_rules_exact_on_monomials() {
        for order in 1..=7usize {
            let q = segment_quadrature(order).unwrap();
            for a in 0..=order as u32 {
                let num: f64 = q
                    .points
                    .iter()
                    .zip(&q.weights)
                    .map(|(p, w)| w * p[0].powi(a as i32))
                    .sum();
                let exact = 1.0 / (a as f64 + 1.0);
                assert!((num - exact).abs() < 1e-14, "order {order} t^{a}");
            }
        }
    }

    #[test]
    fn unsupported_order() {
        assert!(matches!(
            triangle_quadrature(7),
            Err(Error::UnsupportedOrder(7))
        ));
        assert!(matches!(
            segment_quadrature(8),
            Err(Error::UnsupportedOrder(8))
        ));
    }

    #[test]
    fn p2_vector_space_dof_count() {
        // 2-triangle unit square: 4 vertices + 5 edges = 9 nodes, x2 components
        let mesh = unit_fluid_mesh(1, 1, Bc::Dirichlet);
        let sp = build_space(&mesh, ElementFamily::Lagrange, 2, 2, Some(Field::FluidVelocity))
            .unwrap();
        assert_eq!(sp.ndof, 18);
    }

    #[test]
    fn p1_scalar_full_dirichlet_mask() {
        let mesh = unit_fluid_mesh(1, 1, Bc::Dirichlet);
        let sp = build_space(&mesh, ElementFamily::Lagrange, 1, 1, Some(Field::FluidVelocity))
            .unwrap();
        assert_eq!(sp.ndof, 4);
        assert!(sp.dirichlet.iter().all(|&m| m));
    }

    #[test]
    fn p0_interface_space() {
        let g = crate::mesh::build_two_square_geometry(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            Rect::new(0.0, 1.0, 1.0, 2.0),
            4,
            2,
            2,
        )
        .unwrap();
        let sp = build_interface_space(&g.interface, ElementFamily::Lagrange, 0, 1).unwrap();
        assert_eq!(sp.ndof, 4);
        assert!(sp.dirichlet.iter().all(|&m| !m));
    }

    #[test]
    fn affine_interpolation_reproduced() {
        let mesh = unit_fluid_mesh(3, 2, Bc::Neumann);
        for degree in [1usize, 2] {
            let sp = build_space(&mesh, ElementFamily::Lagrange, degree, 1, None).unwrap();
            let f = |p: [f64; 2]| vec![2.5 * p[0] - 1.25 * p[1] + 0.75];
            let coeffs = sp.interpolate(f);
            let q = triangle_quadrature(3).unwrap();
            for cell in 0..mesh.cell_count() {
                let map = AffineTri::new(mesh.cell_vertices(cell));
                for &rp in &q.points {
                    let (val, grad) = eval_at(&sp, &coeffs, cell, rp);
                    let xy = map.to_physical(rp);
                    let exact = 2.5 * xy[0] - 1.25 * xy[1] + 0.75;
                    assert!((val[0] - exact).abs() < 1e-13);
                    assert!((grad[0][0] - 2.5).abs() < 1e-12);
                    assert!((grad[0][1] + 1.25).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn reference_roundtrip() {
        let mesh = unit_fluid_mesh(2, 2, Bc::Neumann);
        let map = AffineTri::new(mesh.cell_vertices(3));
        let r = [0.21, 0.37];
        let p = map.to_physical(r);
        let r2 = map.to_reference(p);
        assert!((r[0] - r2[0]).abs() < 1e-14 && (r[1] - r2[1]).abs() < 1e-14);
    }
}
