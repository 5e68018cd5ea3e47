//! Structured triangulations of the two rectangular subdomains and the shared
//! 1D interface.
//!
//! Geometry is restricted to axis-aligned rectangles whose shared side is a
//! horizontal or vertical straight segment. Each grid quad is split along the
//! same diagonal, so meshes are quasi-uniform by construction and the two
//! subdomain triangulations induce bit-identical traces on the interface.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdomainId {
    Fluid,
    Poro,
}

/// Boundary condition kind carried by a tagged edge, per field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    Neumann,
    Interface,
}

/// Per-edge tags. Fluid edges constrain the velocity; poroelastic edges carry
/// independent tags for the displacement and the pore pressure, which may
/// differ on the same geometric edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTags {
    Fluid(Bc),
    Poro { disp: Bc, pressure: Bc },
}

impl EdgeTags {
    pub fn is_interface(&self) -> bool {
        match self {
            EdgeTags::Fluid(bc) => *bc == Bc::Interface,
            EdgeTags::Poro { disp, pressure } => {
                // the interface is shared by both poro fields; mixed tags on one
                // edge would make the trace spaces ambiguous
                *disp == Bc::Interface || *pressure == Bc::Interface
            }
        }
    }
}

/// The field a function space discretizes, used to pick the Dirichlet tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    FluidVelocity,
    FluidPressure,
    Displacement,
    PorePressure,
}

impl EdgeTags {
    pub fn bc_for(&self, field: Field) -> Option<Bc> {
        match (self, field) {
            (EdgeTags::Fluid(bc), Field::FluidVelocity) => Some(*bc),
            (EdgeTags::Poro { disp, .. }, Field::Displacement) => Some(*disp),
            (EdgeTags::Poro { pressure, .. }, Field::PorePressure) => Some(*pressure),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// Tags for the four sides of a rectangular subdomain, in the order
/// left, right, bottom, top.
#[derive(Debug, Clone, Copy)]
pub struct SideTags {
    pub left: EdgeTags,
    pub right: EdgeTags,
    pub bottom: EdgeTags,
    pub top: EdgeTags,
}

pub type EdgeKey = (usize, usize);

fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug)]
pub struct SubdomainMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: BTreeMap<EdgeKey, EdgeTags>,
    pub subdomain_id: SubdomainId,
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl SubdomainMesh {
    pub fn cell_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [
            self.vertices[tri[0]],
            self.vertices[tri[1]],
            self.vertices[tri[2]],
        ]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.cell_vertices(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Diameter of the largest cell.
    pub fn h_max(&self) -> f64 {
        let hx = (self.rect.x1 - self.rect.x0) / self.nx as f64;
        let hy = (self.rect.y1 - self.rect.y0) / self.ny as f64;
        hx.hypot(hy)
    }

    /// All undirected edges of the triangulation, sorted; used for P2 dof
    /// numbering.
    pub fn edges(&self) -> Vec<EdgeKey> {
        let mut set = std::collections::BTreeSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                set.insert(edge_key(tri[k], tri[(k + 1) % 3]));
            }
        }
        set.into_iter().collect()
    }

    /// The unique triangle containing boundary edge `(a, b)`, plus the local
    /// edge index (edge k connects local vertices k and k+1 mod 3).
    pub fn boundary_edge_cell(&self, key: EdgeKey) -> Option<(usize, usize)> {
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                if edge_key(tri[k], tri[(k + 1) % 3]) == key {
                    return Some((t, k));
                }
            }
        }
        None
    }
}

/// Build a structured triangulation of `rect` with `nx` by `ny` quads, each
/// split along its lower-left/upper-right diagonal (2 nx ny triangles).
pub fn build_rect_mesh(
    rect: Rect,
    nx: usize,
    ny: usize,
    subdomain_id: SubdomainId,
    tags: &SideTags,
) -> Result<SubdomainMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::ZeroCells { nx, ny });
    }
    if !(rect.x1 > rect.x0 && rect.y1 > rect.y0)
        || !rect.x0.is_finite()
        || !rect.y0.is_finite()
        || !rect.x1.is_finite()
        || !rect.y1.is_finite()
    {
        return Err(Error::InvalidRect {
            x0: rect.x0,
            y0: rect.y0,
            x1: rect.x1,
            y1: rect.y1,
        });
    }
    for side in [tags.left, tags.right, tags.bottom, tags.top] {
        let ok = matches!(
            (subdomain_id, side),
            (SubdomainId::Fluid, EdgeTags::Fluid(_)) | (SubdomainId::Poro, EdgeTags::Poro { .. })
        );
        if !ok {
            return Err(Error::TagSpec(format!(
                "side tag {side:?} incompatible with {subdomain_id:?}"
            )));
        }
    }

    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // exact endpoint coordinates so traces from both sides match
            // bit-for-bit
            let x = if i == nx {
                rect.x1
            } else {
                rect.x0 + (rect.x1 - rect.x0) * i as f64 / nx as f64
            };
            let y = if j == ny {
                rect.y1
            } else {
                rect.y0 + (rect.y1 - rect.y0) * j as f64 / ny as f64
            };
            vertices.push([x, y]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v01 = vid(i, j + 1);
            let v11 = vid(i + 1, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }

    let mut boundary_edges = BTreeMap::new();
    for i in 0..nx {
        boundary_edges.insert(edge_key(vid(i, 0), vid(i + 1, 0)), tags.bottom);
        boundary_edges.insert(edge_key(vid(i, ny), vid(i + 1, ny)), tags.top);
    }
    for j in 0..ny {
        boundary_edges.insert(edge_key(vid(0, j), vid(0, j + 1)), tags.left);
        boundary_edges.insert(edge_key(vid(nx, j), vid(nx, j + 1)), tags.right);
    }

    Ok(SubdomainMesh {
        vertices,
        triangles,
        boundary_edges,
        subdomain_id,
        rect,
        nx,
        ny,
    })
}

/// Axis-aligned interface segment between the two subdomains.
#[derive(Debug, Clone, Copy)]
pub struct GammaLine {
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl GammaLine {
    pub fn horizontal(&self) -> bool {
        self.start[1] == self.end[1]
    }

    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        if self.horizontal() {
            p[1] == self.start[1]
                && p[0] >= self.start[0].min(self.end[0])
                && p[0] <= self.start[0].max(self.end[0])
        } else {
            p[0] == self.start[0]
                && p[1] >= self.start[1].min(self.end[1])
                && p[1] <= self.start[1].max(self.end[1])
        }
    }
}

#[derive(Debug)]
pub struct InterfaceMesh {
    /// Interface points ordered by arclength.
    pub vertices: Vec<[f64; 2]>,
    /// Consecutive index pairs into `vertices`.
    pub segments: Vec<[usize; 2]>,
    pub n_f: [f64; 2],
    pub n_p: [f64; 2],
    pub tau: [f64; 2],
    /// Per segment: (triangle, local edge) in the fluid mesh.
    pub f_adj: Vec<(usize, usize)>,
    /// Per segment: (triangle, local edge) in the poro mesh.
    pub p_adj: Vec<(usize, usize)>,
    /// Map from interface vertex to the owning vertex id in each subdomain
    /// mesh (fluid, poro); used to glue volume dofs to trace dofs.
    pub f_vertex: Vec<usize>,
    pub p_vertex: Vec<usize>,
}

impl InterfaceMesh {
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn segment_points(&self, s: usize) -> ([f64; 2], [f64; 2]) {
        let [a, b] = self.segments[s];
        (self.vertices[a], self.vertices[b])
    }

    pub fn segment_length(&self, s: usize) -> f64 {
        let (a, b) = self.segment_points(s);
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    pub fn length(&self) -> f64 {
        (0..self.segments.len()).map(|s| self.segment_length(s)).sum()
    }

    /// Arclength coordinate of interface vertex `v` measured from the first
    /// vertex.
    pub fn arclength(&self, v: usize) -> f64 {
        let p0 = self.vertices[0];
        let p = self.vertices[v];
        (p[0] - p0[0]).hypot(p[1] - p0[1])
    }
}

fn collect_interface_vertices(
    mesh: &SubdomainMesh,
    gamma: &GammaLine,
    field_is_fluid: bool,
) -> Result<Vec<(f64, usize)>> {
    let mut on_line: Vec<(f64, usize)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (&(a, b), tag) in &mesh.boundary_edges {
        let is_iface = match (tag, field_is_fluid) {
            (EdgeTags::Fluid(bc), true) => *bc == Bc::Interface,
            (EdgeTags::Poro { disp, pressure }, false) => {
                if (*disp == Bc::Interface) != (*pressure == Bc::Interface) {
                    return Err(Error::TagSpec(
                        "poro edge must be interface for both fields or neither".into(),
                    ));
                }
                *disp == Bc::Interface
            }
            _ => {
                return Err(Error::TagSpec(
                    "boundary tag variant does not match subdomain".into(),
                ))
            }
        };
        if !is_iface {
            continue;
        }
        for v in [a, b] {
            let p = mesh.vertices[v];
            if !gamma.contains(p) {
                return Err(Error::NotOnLine(p[0], p[1]));
            }
            if seen.insert(v) {
                let s = if gamma.horizontal() {
                    p[0] - gamma.start[0].min(gamma.end[0])
                } else {
                    p[1] - gamma.start[1].min(gamma.end[1])
                };
                on_line.push((s, v));
            }
        }
    }
    on_line.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(on_line)
}

/// Extract the shared interface mesh from the two subdomain meshes. The
/// interface-tagged traces must coincide exactly; `n_f` points out of the
/// fluid subdomain.
pub fn extract_interface(
    mesh_f: &SubdomainMesh,
    mesh_p: &SubdomainMesh,
    gamma: GammaLine,
) -> Result<InterfaceMesh> {
    if mesh_f.subdomain_id != SubdomainId::Fluid || mesh_p.subdomain_id != SubdomainId::Poro {
        return Err(Error::TagSpec(
            "extract_interface expects (fluid, poro) meshes in that order".into(),
        ));
    }
    let fv = collect_interface_vertices(mesh_f, &gamma, true)?;
    let pv = collect_interface_vertices(mesh_p, &gamma, false)?;
    if fv.len() != pv.len() {
        return Err(Error::NonMatching(format!(
            "{} fluid vs {} poro interface vertices",
            fv.len(),
            pv.len()
        )));
    }
    if fv.len() < 2 {
        return Err(Error::NonMatching("interface has no segments".into()));
    }
    for (a, b) in fv.iter().zip(pv.iter()) {
        let (pa, pb) = (mesh_f.vertices[a.1], mesh_p.vertices[b.1]);
        if pa != pb {
            return Err(Error::NonMatching(format!(
                "trace vertices differ: ({}, {}) vs ({}, {})",
                pa[0], pa[1], pb[0], pb[1]
            )));
        }
    }

    let vertices: Vec<[f64; 2]> = fv.iter().map(|&(_, v)| mesh_f.vertices[v]).collect();
    let f_vertex: Vec<usize> = fv.iter().map(|&(_, v)| v).collect();
    let p_vertex: Vec<usize> = pv.iter().map(|&(_, v)| v).collect();
    let segments: Vec<[usize; 2]> = (0..vertices.len() - 1).map(|k| [k, k + 1]).collect();

    // outward normal of the fluid domain on gamma
    let (n_f, tau) = if gamma.horizontal() {
        let fluid_below = 0.5 * (mesh_f.rect.y0 + mesh_f.rect.y1) < gamma.start[1];
        (if fluid_below { [0.0, 1.0] } else { [0.0, -1.0] }, [1.0, 0.0])
    } else {
        let fluid_left = 0.5 * (mesh_f.rect.x0 + mesh_f.rect.x1) < gamma.start[0];
        (if fluid_left { [1.0, 0.0] } else { [-1.0, 0.0] }, [0.0, 1.0])
    };
    let n_p = [-n_f[0], -n_f[1]];

    let mut f_adj = Vec::with_capacity(segments.len());
    let mut p_adj = Vec::with_capacity(segments.len());
    for seg in &segments {
        let kf = edge_key(f_vertex[seg[0]], f_vertex[seg[1]]);
        let kp = edge_key(p_vertex[seg[0]], p_vertex[seg[1]]);
        let fa = mesh_f
            .boundary_edge_cell(kf)
            .ok_or_else(|| Error::NonMatching("fluid trace edge is not a mesh edge".into()))?;
        let pa = mesh_p
            .boundary_edge_cell(kp)
            .ok_or_else(|| Error::NonMatching("poro trace edge is not a mesh edge".into()))?;
        f_adj.push(fa);
        p_adj.push(pa);
    }

    Ok(InterfaceMesh {
        vertices,
        segments,
        n_f,
        n_p,
        tau,
        f_adj,
        p_adj,
        f_vertex,
        p_vertex,
    })
}

/// Standard two-rectangle configuration used by the verification experiments:
/// Dirichlet on the left/right sides of both subdomains (for all fields),
/// Neumann on the fluid bottom and the poro top, interface on the shared side.
pub struct TwoSquareGeometry {
    pub mesh_f: Arc<SubdomainMesh>,
    pub mesh_p: Arc<SubdomainMesh>,
    pub interface: Arc<InterfaceMesh>,
}

/// Build the stacked geometry `fluid_rect` below `poro_rect` (or any pair of
/// rects sharing one full side) at the given resolutions.
pub fn build_two_square_geometry(
    fluid_rect: Rect,
    poro_rect: Rect,
    nx: usize,
    ny_f: usize,
    ny_p: usize,
) -> Result<TwoSquareGeometry> {
    let gamma = shared_side(&fluid_rect, &poro_rect)?;
    let horizontal = gamma.horizontal();

    let iface_side_f;
    let iface_side_p;
    if horizontal {
        let fluid_below = 0.5 * (fluid_rect.y0 + fluid_rect.y1) < gamma.start[1];
        iface_side_f = if fluid_below { 3 } else { 2 }; // top : bottom
        iface_side_p = if fluid_below { 2 } else { 3 };
    } else {
        let fluid_left = 0.5 * (fluid_rect.x0 + fluid_rect.x1) < gamma.start[0];
        iface_side_f = if fluid_left { 1 } else { 0 }; // right : left
        iface_side_p = if fluid_left { 0 } else { 1 };
    }

    // sides: 0 left, 1 right, 2 bottom, 3 top
    let fluid_tag = |side: usize| {
        if side == iface_side_f {
            EdgeTags::Fluid(Bc::Interface)
        } else if (horizontal && (side == 0 || side == 1)) || (!horizontal && (side == 2 || side == 3))
        {
            EdgeTags::Fluid(Bc::Dirichlet)
        } else {
            EdgeTags::Fluid(Bc::Neumann)
        }
    };
    let poro_tag = |side: usize| {
        if side == iface_side_p {
            EdgeTags::Poro {
                disp: Bc::Interface,
                pressure: Bc::Interface,
            }
        } else if (horizontal && (side == 0 || side == 1)) || (!horizontal && (side == 2 || side == 3))
        {
            EdgeTags::Poro {
                disp: Bc::Dirichlet,
                pressure: Bc::Dirichlet,
            }
        } else {
            EdgeTags::Poro {
                disp: Bc::Neumann,
                pressure: Bc::Neumann,
            }
        }
    };

    let tags_f = SideTags {
        left: fluid_tag(0),
        right: fluid_tag(1),
        bottom: fluid_tag(2),
        top: fluid_tag(3),
    };
    let tags_p = SideTags {
        left: poro_tag(0),
        right: poro_tag(1),
        bottom: poro_tag(2),
        top: poro_tag(3),
    };

    let (nx_f, nyf) = if horizontal { (nx, ny_f) } else { (ny_f, nx) };
    let (nx_p, nyp) = if horizontal { (nx, ny_p) } else { (ny_p, nx) };
    let mesh_f = Arc::new(build_rect_mesh(
        fluid_rect,
        nx_f,
        nyf,
        SubdomainId::Fluid,
        &tags_f,
    )?);
    let mesh_p = Arc::new(build_rect_mesh(
        poro_rect,
        nx_p,
        nyp,
        SubdomainId::Poro,
        &tags_p,
    )?);
    let interface = Arc::new(extract_interface(&mesh_f, &mesh_p, gamma)?);
    Ok(TwoSquareGeometry {
        mesh_f,
        mesh_p,
        interface,
    })
}

/// The full side shared by the two rectangles.
pub fn shared_side(a: &Rect, b: &Rect) -> Result<GammaLine> {
    let eq = |p: f64, q: f64| p == q;
    // horizontal contact: a above/below b with identical x-extent
    if eq(a.x0, b.x0) && eq(a.x1, b.x1) {
        if eq(a.y1, b.y0) {
            return Ok(GammaLine {
                start: [a.x0, a.y1],
                end: [a.x1, a.y1],
            });
        }
        if eq(b.y1, a.y0) {
            return Ok(GammaLine {
                start: [a.x0, a.y0],
                end: [a.x1, a.y0],
            });
        }
    }
    if eq(a.y0, b.y0) && eq(a.y1, b.y1) {
        if eq(a.x1, b.x0) {
            return Ok(GammaLine {
                start: [a.x1, a.y0],
                end: [a.x1, a.y1],
            });
        }
        if eq(b.x1, a.x0) {
            return Ok(GammaLine {
                start: [a.x0, a.y0],
                end: [a.x0, a.y1],
            });
        }
    }
    Err(Error::InvalidRect {
        x0: b.x0,
        y0: b.y0,
        x1: b.x1,
        y1: b.y1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fluid_tags(bc: Bc) -> SideTags {
        let t = EdgeTags::Fluid(bc);
        SideTags {
            left: t,
            right: t,
            bottom: t,
            top: t,
        }
    }

    #[test]
    fn smallest_mesh() {
        let m = build_rect_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            1,
            1,
            SubdomainId::Fluid,
            &fluid_tags(Bc::Dirichlet),
        )
        .unwrap();
        assert_eq!(m.triangles.len(), 2);
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.boundary_edges.len(), 4);
        for t in 0..2 {
            assert!(m.signed_area(t) > 0.0);
        }
    }

    #[test]
    fn area_partition_2x2() {
        let m = build_rect_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            2,
            2,
            SubdomainId::Fluid,
            &fluid_tags(Bc::Neumann),
        )
        .unwrap();
        assert_eq!(m.triangles.len(), 8);
        let area: f64 = (0..m.triangles.len()).map(|t| m.signed_area(t)).sum();
        assert!((area - 1.0).abs() < 1e-14);
    }

    #[test]
    fn interior_edges_shared_by_two_triangles() {
        // 3x2 mesh: count edge incidences by brute force enumeration
        let m = build_rect_mesh(
            Rect::new(0.0, 1.0, 1.0, 2.0),
            3,
            2,
            SubdomainId::Poro,
            &SideTags {
                left: EdgeTags::Poro {
                    disp: Bc::Dirichlet,
                    pressure: Bc::Dirichlet,
                },
                right: EdgeTags::Poro {
                    disp: Bc::Dirichlet,
                    pressure: Bc::Neumann,
                },
                bottom: EdgeTags::Poro {
                    disp: Bc::Interface,
                    pressure: Bc::Interface,
                },
                top: EdgeTags::Poro {
                    disp: Bc::Neumann,
                    pressure: Bc::Neumann,
                },
            },
        )
        .unwrap();
        assert_eq!(m.triangles.len(), 12);
        let mut incidence: BTreeMap<EdgeKey, usize> = BTreeMap::new();
        for tri in &m.triangles {
            for k in 0..3 {
                *incidence.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (key, count) in incidence {
            if m.boundary_edges.contains_key(&key) {
                assert_eq!(count, 1, "boundary edge {key:?}");
            } else {
                assert_eq!(count, 2, "interior edge {key:?}");
            }
        }
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert!(matches!(
            build_rect_mesh(r, 0, 1, SubdomainId::Fluid, &fluid_tags(Bc::Dirichlet)),
            Err(Error::ZeroCells { .. })
        ));
        assert!(matches!(
            build_rect_mesh(
                Rect::new(0.0, 0.0, 0.0, 1.0),
                1,
                1,
                SubdomainId::Fluid,
                &fluid_tags(Bc::Dirichlet)
            ),
            Err(Error::InvalidRect { .. })
        ));
    }

    #[test]
    fn interface_extraction_stacked() {
        let g = build_two_square_geometry(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            Rect::new(0.0, 1.0, 1.0, 2.0),
            2,
            2,
            2,
        )
        .unwrap();
        let iface = &g.interface;
        assert_eq!(iface.segments.len(), 2);
        assert_eq!(iface.n_f, [0.0, 1.0]);
        assert_eq!(iface.n_p, [0.0, -1.0]);
        assert_eq!(iface.tau, [1.0, 0.0]);
        assert_eq!(iface.f_adj.len(), 2);
        let total: f64 = (0..2).map(|s| iface.segment_length(s)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn interface_orientation_flips_when_fluid_on_top() {
        let g = build_two_square_geometry(
            Rect::new(0.0, 1.0, 1.0, 2.0),
            Rect::new(0.0, 0.0, 1.0, 1.0),
            2,
            2,
            2,
        )
        .unwrap();
        assert_eq!(g.interface.n_f, [0.0, -1.0]);
        assert_eq!(g.interface.n_p, [0.0, 1.0]);
    }

    #[test]
    fn mismatched_traces_rejected() {
        let gamma = GammaLine {
            start: [0.0, 1.0],
            end: [1.0, 1.0],
        };
        let mesh_f = build_rect_mesh(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            2,
            2,
            SubdomainId::Fluid,
            &SideTags {
                left: EdgeTags::Fluid(Bc::Dirichlet),
                right: EdgeTags::Fluid(Bc::Dirichlet),
                bottom: EdgeTags::Fluid(Bc::Neumann),
                top: EdgeTags::Fluid(Bc::Interface),
            },
        )
        .unwrap();
        let poro = EdgeTags::Poro {
            disp: Bc::Dirichlet,
            pressure: Bc::Dirichlet,
        };
        let mesh_p = build_rect_mesh(
            Rect::new(0.0, 1.0, 1.0, 2.0),
            3,
            2,
            SubdomainId::Poro,
            &SideTags {
                left: poro,
                right: poro,
                bottom: EdgeTags::Poro {
                    disp: Bc::Interface,
                    pressure: Bc::Interface,
                },
                top: poro,
            },
        )
        .unwrap();
        assert!(matches!(
            extract_interface(&mesh_f, &mesh_p, gamma),
            Err(Error::NonMatching(_))
        ));
    }

    #[test]
    fn vertical_interface() {
        let g = build_two_square_geometry(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            Rect::new(1.0, 0.0, 2.0, 1.0),
            3,
            2,
            2,
        )
        .unwrap();
        assert_eq!(g.interface.n_f, [1.0, 0.0]);
        assert_eq!(g.interface.tau, [0.0, 1.0]);
        assert_eq!(g.interface.segments.len(), 3);
        assert!((g.interface.length() - 1.0).abs() < 1e-14);
    }
}
