//! Assembly of every bilinear form and load functional of the coupled
//! Stokes/Biot system, including the fractional-order interface Gram matrix.
//!
//! All forms are assembled in the dt-scaled variables in which the monolithic
//! saddle point system is posed; the time stepper unscales solutions on
//! output.

use crate::elements::{
    eval_at, seg_basis, segment_quadrature, tri_basis, triangle_quadrature, AffineTri,
    FunctionSpace,
};
use crate::error::{Error, Result};
use crate::mesh::{Bc, Field, InterfaceMesh, SubdomainId, SubdomainMesh};
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Model constants. All strictly positive; `eps_bar` weights the fractional
/// stabilization block of the saddle point operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub rho_f: f64,
    pub nu_f: f64,
    pub rho_p: f64,
    pub nu_p: f64,
    pub lambda_lame: f64,
    pub alpha: f64,
    pub s0: f64,
    pub kappa: f64,
    pub beta_bjs: f64,
    pub eps_bar: f64,
}

impl PhysicalParams {
    /// All parameters set to one; the baseline for the verification suites.
    pub fn ones() -> Self {
        PhysicalParams {
            rho_f: 1.0,
            nu_f: 1.0,
            rho_p: 1.0,
            nu_p: 1.0,
            lambda_lame: 1.0,
            alpha: 1.0,
            s0: 1.0,
            kappa: 1.0,
            beta_bjs: 1.0,
            eps_bar: 1.0,
        }
    }

    pub fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("rho_f", self.rho_f),
            ("nu_f", self.nu_f),
            ("rho_p", self.rho_p),
            ("nu_p", self.nu_p),
            ("lambda", self.lambda_lame),
            ("alpha", self.alpha),
            ("s0", self.s0),
            ("kappa", self.kappa),
            ("beta", self.beta_bjs),
            ("eps_bar", self.eps_bar),
        ]
    }

    /// Every parameter must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.fields() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParam { name, value });
            }
        }
        Ok(())
    }

    /// Validation with `eps_bar = 0` allowed (experimental override only).
    pub fn validate_allow_zero_eps(&self) -> Result<()> {
        for (name, value) in self.fields() {
            if name == "eps_bar" {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(Error::NonPositiveParam { name, value });
                }
            } else if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParam { name, value });
            }
        }
        Ok(())
    }
}

/// The seven discrete spaces of the coupled system.
pub struct FormSpaces<'a> {
    pub u: &'a FunctionSpace,
    pub p_f: &'a FunctionSpace,
    pub eta: &'a FunctionSpace,
    pub p_p: &'a FunctionSpace,
    pub g1: &'a FunctionSpace,
    pub g2: &'a FunctionSpace,
    pub lam: &'a FunctionSpace,
}

impl<'a> FormSpaces<'a> {
    pub fn mesh_f(&self) -> &SubdomainMesh {
        self.u.subdomain().expect("u lives on the fluid mesh")
    }

    pub fn mesh_p(&self) -> &SubdomainMesh {
        self.eta.subdomain().expect("eta lives on the poro mesh")
    }

    pub fn interface(&self) -> &InterfaceMesh {
        self.g1.interface().expect("g1 lives on the interface")
    }
}

// quadrature orders: volume integrands are at most P2 x P2 products of
// polynomial data (degree 4); loads carry smooth non-polynomial data, so they
// get the strongest available rules
const VOLUME_ORDER: usize = 5;
const LOAD_VOLUME_ORDER: usize = 6;
const IFACE_ORDER: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeFormId {
    /// Velocity/displacement block: rho_f (u,v) + 2 nu_f dt (D u, D v)
    /// + rho_p (eta, phi) + 2 nu_p dt^2 (D eta, D phi) + dt^2 lambda (div, div).
    A1,
    /// Pore pressure block: s0/dt^2 (p, w) + kappa/dt (grad p, grad w).
    A2,
    /// -alpha (div phi, w): displacement tested against pore pressure.
    Bpp,
    /// -(div v, q): velocity tested against fluid pressure.
    Bpf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceFormId {
    /// 1/(beta dt) (g2, s2) on gamma.
    Ag,
    /// -<phi, s1 n_p> - <v, s1 n_f>; rows in the g1 space, columns over (u, eta).
    Bg1,
    /// (phi, s2 tau) - (v, s2 tau); rows in the g2 space, columns over (u, eta).
    Bg2,
    /// <s1, mu>; rows in the g1 space, columns in the lambda space.
    Blm,
    /// (w, mu) on gamma; rows in the pore pressure space, columns in lambda.
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadId {
    F1,
    F2,
    F3,
    F4,
}

/// Time-step data: forcings and Neumann data evaluated at the new time level.
/// Neumann closures receive (point, outward unit normal).
pub struct StepData<'a> {
    pub f_f: Option<&'a dyn Fn([f64; 2]) -> [f64; 2]>,
    pub f_eta: Option<&'a dyn Fn([f64; 2]) -> [f64; 2]>,
    pub f_p: Option<&'a dyn Fn([f64; 2]) -> f64>,
    pub traction_f: Option<&'a dyn Fn([f64; 2], [f64; 2]) -> [f64; 2]>,
    pub traction_p: Option<&'a dyn Fn([f64; 2], [f64; 2]) -> [f64; 2]>,
    pub flux_p: Option<&'a dyn Fn([f64; 2], [f64; 2]) -> f64>,
    pub defects: Option<InterfaceDefects<'a>>,
}

impl<'a> Default for StepData<'a> {
    fn default() -> Self {
        StepData {
            f_f: None,
            f_eta: None,
            f_p: None,
            traction_f: None,
            traction_p: None,
            flux_p: None,
            defects: None,
        }
    }
}

/// Interface defect data for manufactured solutions: residuals of the three
/// multiplier conditions and of the stress balance, plus the exact flux
/// multiplier for the stabilization-consistent right-hand side.
pub struct InterfaceDefects<'a> {
    pub rho1: &'a dyn Fn([f64; 2]) -> f64,
    pub rho2: &'a dyn Fn([f64; 2]) -> f64,
    pub rho3: &'a dyn Fn([f64; 2]) -> f64,
    pub rho4: &'a dyn Fn([f64; 2]) -> [f64; 2],
    pub lambda_exact: &'a dyn Fn([f64; 2]) -> f64,
}

/// Previous-step fields (unscaled) needed by the right-hand sides.
pub struct LoadHistory<'a> {
    pub u: &'a [f64],
    pub eta: &'a [f64],
    pub eta_prev: &'a [f64],
    pub p_p: &'a [f64],
}

// ---------------------------------------------------------------------------
// generic volume assemblers
// ---------------------------------------------------------------------------

fn check_volume(space: &FunctionSpace, id: SubdomainId, what: &str) -> Result<()> {
    match space.subdomain() {
        Some(m) if m.subdomain_id == id => Ok(()),
        _ => Err(Error::SpaceMismatch(format!(
            "{what} expects a volume space on the {id:?} mesh"
        ))),
    }
}

/// weight * (phi_i, phi_j), componentwise dot product for vector spaces.
pub fn mass_matrix(space: &FunctionSpace, weight: f64) -> CsrMatrix {
    let mesh = space.subdomain().expect("volume space");
    let quad = triangle_quadrature(VOLUME_ORDER).unwrap();
    let nc = space.components;
    let nb = space.scalar_basis_len();
    let mut out = TripletBuilder::new(space.ndof, space.ndof);
    for cell in 0..mesh.cell_count() {
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let dofs = &space.dofmap[cell];
        let mut local = vec![0.0; nb * nb];
        for (q, &rp) in quad.points.iter().enumerate() {
            let (vals, _) = tri_basis(space.degree, rp).unwrap();
            let w = quad.weights[q] * map.det.abs();
            for a in 0..nb {
                for b in 0..nb {
                    local[a * nb + b] += w * vals[a] * vals[b];
                }
            }
        }
        for a in 0..nb {
            for b in 0..nb {
                let v = weight * local[a * nb + b];
                for c in 0..nc {
                    out.add(dofs[a * nc + c], dofs[b * nc + c], v);
                }
            }
        }
    }
    out.build()
}

/// weight * (D(phi_i), D(phi_j)) for a vector space, with
/// D(v) = (grad v + grad v^T) / 2.
pub fn deformation_stiffness(space: &FunctionSpace, weight: f64) -> CsrMatrix {
    assert_eq!(space.components, 2);
    let mesh = space.subdomain().expect("volume space");
    let quad = triangle_quadrature(VOLUME_ORDER).unwrap();
    let nb = space.scalar_basis_len();
    let mut out = TripletBuilder::new(space.ndof, space.ndof);
    for cell in 0..mesh.cell_count() {
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let dofs = &space.dofmap[cell];
        // physical gradients are constant in q only for P1; recompute per point
        for (q, &rp) in quad.points.iter().enumerate() {
            let (_, grads) = tri_basis(space.degree, rp).unwrap();
            let w = quad.weights[q] * map.det.abs();
            let pg: Vec<[f64; 2]> = grads.iter().map(|&g| map.grad_to_physical(g)).collect();
            // basis function (a, c) has D entries built from e_c (x) grad phi_a
            for a in 0..nb {
                for ca in 0..2 {
                    let da = sym_grad(pg[a], ca);
                    for b in 0..nb {
                        for cb in 0..2 {
                            let db = sym_grad(pg[b], cb);
                            let dd = da[0] * db[0] + 2.0 * da[1] * db[1] + da[2] * db[2];
                            out.add(dofs[a * 2 + ca], dofs[b * 2 + cb], weight * w * dd);
                        }
                    }
                }
            }
        }
    }
    out.build()
}

/// D(phi e_c) packed as (D11, D12, D22).
fn sym_grad(g: [f64; 2], c: usize) -> [f64; 3] {
    if c == 0 {
        [g[0], 0.5 * g[1], 0.0]
    } else {
        [0.0, 0.5 * g[0], g[1]]
    }
}

/// weight * (grad phi_i, grad phi_j) for a scalar space.
pub fn grad_stiffness(space: &FunctionSpace, weight: f64) -> CsrMatrix {
    assert_eq!(space.components, 1);
    let mesh = space.subdomain().expect("volume space");
    let quad = triangle_quadrature(VOLUME_ORDER).unwrap();
    let nb = space.scalar_basis_len();
    let mut out = TripletBuilder::new(space.ndof, space.ndof);
    for cell in 0..mesh.cell_count() {
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let dofs = &space.dofmap[cell];
        for (q, &rp) in quad.points.iter().enumerate() {
            let (_, grads) = tri_basis(space.degree, rp).unwrap();
            let w = quad.weights[q] * map.det.abs();
            let pg: Vec<[f64; 2]> = grads.iter().map(|&g| map.grad_to_physical(g)).collect();
            for a in 0..nb {
                for b in 0..nb {
                    out.add(
                        dofs[a],
                        dofs[b],
                        weight * w * (pg[a][0] * pg[b][0] + pg[a][1] * pg[b][1]),
                    );
                }
            }
        }
    }
    out.build()
}

/// weight * (div phi_i, div phi_j) for a vector space.
pub fn div_div_stiffness(space: &FunctionSpace, weight: f64) -> CsrMatrix {
    assert_eq!(space.components, 2);
    let mesh = space.subdomain().expect("volume space");
    let quad = triangle_quadrature(VOLUME_ORDER).unwrap();
    let nb = space.scalar_basis_len();
    let mut out = TripletBuilder::new(space.ndof, space.ndof);
    for cell in 0..mesh.cell_count() {
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let dofs = &space.dofmap[cell];
        for (q, &rp) in quad.points.iter().enumerate() {
            let (_, grads) = tri_basis(space.degree, rp).unwrap();
            let w = quad.weights[q] * map.det.abs();
            let pg: Vec<[f64; 2]> = grads.iter().map(|&g| map.grad_to_physical(g)).collect();
            for a in 0..nb {
                for ca in 0..2 {
                    let diva = pg[a][ca];
                    for b in 0..nb {
                        for cb in 0..2 {
                            out.add(dofs[a * 2 + ca], dofs[b * 2 + cb], weight * w * diva * pg[b][cb]);
                        }
                    }
                }
            }
        }
    }
    out.build()
}

/// weight * (div phi_j, q_i): rows in the scalar space, columns in the vector
/// space. Both spaces must live on the same mesh.
pub fn div_pressure_coupling(
    vec_space: &FunctionSpace,
    scalar_space: &FunctionSpace,
    weight: f64,
) -> Result<CsrMatrix> {
    let mesh = vec_space.subdomain().expect("volume space");
    let mesh2 = scalar_space.subdomain().expect("volume space");
    if !std::ptr::eq(&**mesh, &**mesh2) {
        return Err(Error::SpaceMismatch(
            "div/pressure coupling needs both spaces on one mesh".into(),
        ));
    }
    let quad = triangle_quadrature(VOLUME_ORDER).unwrap();
    let nbv = vec_space.scalar_basis_len();
    let nbs = scalar_space.scalar_basis_len();
    let mut out = TripletBuilder::new(scalar_space.ndof, vec_space.ndof);
    for cell in 0..mesh.cell_count() {
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let vdofs = &vec_space.dofmap[cell];
        let sdofs = &scalar_space.dofmap[cell];
        for (q, &rp) in quad.points.iter().enumerate() {
            let (_, vgrads) = tri_basis(vec_space.degree, rp).unwrap();
            let (svals, _) = tri_basis(scalar_space.degree, rp).unwrap();
            let w = quad.weights[q] * map.det.abs();
            let pg: Vec<[f64; 2]> = vgrads.iter().map(|&g| map.grad_to_physical(g)).collect();
            for i in 0..nbs {
                for b in 0..nbv {
                    for cb in 0..2 {
                        out.add(sdofs[i], vdofs[b * 2 + cb], weight * w * pg[b][cb] * svals[i]);
                    }
                }
            }
        }
    }
    Ok(out.build())
}

pub fn assemble_volume_form(
    id: VolumeFormId,
    spaces: &FormSpaces,
    params: &PhysicalParams,
    dt: f64,
) -> Result<CsrMatrix> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveParam {
            name: "dt",
            value: dt,
        });
    }
    match id {
        VolumeFormId::A1 => {
            check_volume(spaces.u, SubdomainId::Fluid, "A1")?;
            check_volume(spaces.eta, SubdomainId::Poro, "A1")?;
            let nu = spaces.u.ndof;
            let nx = spaces.eta.ndof;
            let mu = mass_matrix(spaces.u, params.rho_f);
            let ku = deformation_stiffness(spaces.u, 2.0 * params.nu_f * dt);
            let mx = mass_matrix(spaces.eta, params.rho_p);
            let kx = deformation_stiffness(spaces.eta, 2.0 * params.nu_p * dt * dt);
            let dx = div_div_stiffness(spaces.eta, params.lambda_lame * dt * dt);
            let mut out = TripletBuilder::new(nu + nx, nu + nx);
            for (m, off) in [(&mu, 0), (&ku, 0), (&mx, nu), (&kx, nu), (&dx, nu)] {
                add_block(&mut out, m, off, off, 1.0);
            }
            Ok(out.build())
        }
        VolumeFormId::A2 => {
            check_volume(spaces.p_p, SubdomainId::Poro, "A2")?;
            let m = mass_matrix(spaces.p_p, params.s0 / (dt * dt));
            let k = grad_stiffness(spaces.p_p, params.kappa / dt);
            let mut out = TripletBuilder::new(spaces.p_p.ndof, spaces.p_p.ndof);
            add_block(&mut out, &m, 0, 0, 1.0);
            add_block(&mut out, &k, 0, 0, 1.0);
            Ok(out.build())
        }
        VolumeFormId::Bpp => {
            check_volume(spaces.eta, SubdomainId::Poro, "Bpp")?;
            check_volume(spaces.p_p, SubdomainId::Poro, "Bpp")?;
            div_pressure_coupling(spaces.eta, spaces.p_p, -params.alpha)
        }
        VolumeFormId::Bpf => {
            check_volume(spaces.u, SubdomainId::Fluid, "Bpf")?;
            check_volume(spaces.p_f, SubdomainId::Fluid, "Bpf")?;
            div_pressure_coupling(spaces.u, spaces.p_f, -1.0)
        }
    }
}

pub(crate) fn add_block(
    out: &mut TripletBuilder,
    m: &CsrMatrix,
    row_off: usize,
    col_off: usize,
    scale: f64,
) {
    for i in 0..m.nrows {
        let (cols, vals) = m.row(i);
        for (c, v) in cols.iter().zip(vals) {
            out.add(row_off + i, col_off + c, scale * v);
        }
    }
}

// ---------------------------------------------------------------------------
// interface assemblers
// ---------------------------------------------------------------------------

/// Evaluate the scalar basis of a gamma space on segment `s` at parameter `t`.
fn gamma_basis(space: &FunctionSpace, s: usize, t: f64) -> (Vec<f64>, &[usize]) {
    let (vals, _) = seg_basis(space.degree, t).unwrap();
    (vals, space.dofmap[s].as_slice())
}

/// weight * (m_i, m_j) on gamma.
pub fn interface_mass(space: &FunctionSpace, weight: f64) -> CsrMatrix {
    let iface = space.interface().expect("gamma space");
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let mut out = TripletBuilder::new(space.ndof, space.ndof);
    for s in 0..iface.segment_count() {
        let h = iface.segment_length(s);
        for (q, p) in quad.points.iter().enumerate() {
            let w = quad.weights[q] * h;
            let (vals, dofs) = gamma_basis(space, s, p[0]);
            for (a, &va) in vals.iter().enumerate() {
                for (b, &vb) in vals.iter().enumerate() {
                    out.add(dofs[a], dofs[b], weight * w * va * vb);
                }
            }
        }
    }
    out.build()
}

/// Which subdomain a trace is taken from.
fn trace_side(space: &FunctionSpace) -> Result<SubdomainId> {
    match space.subdomain() {
        Some(m) => Ok(m.subdomain_id),
        None => Err(Error::SpaceMismatch("trace of a non-volume space".into())),
    }
}

/// Rows: gamma space; columns: volume vector space. Entry (i, j) equals
/// weight * int_gamma (phi_j . dir) m_i ds.
pub fn trace_vector_pairing(
    vol: &FunctionSpace,
    gamma: &FunctionSpace,
    iface: &InterfaceMesh,
    dir: [f64; 2],
    weight: f64,
) -> Result<CsrMatrix> {
    assert_eq!(vol.components, 2);
    let side = trace_side(vol)?;
    let mesh = vol.subdomain().unwrap();
    let adj = match side {
        SubdomainId::Fluid => &iface.f_adj,
        SubdomainId::Poro => &iface.p_adj,
    };
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let nb = vol.scalar_basis_len();
    let mut out = TripletBuilder::new(gamma.ndof, vol.ndof);
    for s in 0..iface.segment_count() {
        let (pa, pb) = iface.segment_points(s);
        let h = iface.segment_length(s);
        let (cell, _) = adj[s];
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let vdofs = &vol.dofmap[cell];
        for (q, p) in quad.points.iter().enumerate() {
            let t = p[0];
            let w = quad.weights[q] * h;
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let rp = map.to_reference(x);
            let (vvals, _) = tri_basis(vol.degree, rp).unwrap();
            let (gvals, gdofs) = gamma_basis(gamma, s, t);
            for (i, &gi) in gvals.iter().enumerate() {
                for b in 0..nb {
                    for cb in 0..2 {
                        out.add(
                            gdofs[i],
                            vdofs[b * 2 + cb],
                            weight * w * gi * vvals[b] * dir[cb],
                        );
                    }
                }
            }
        }
    }
    Ok(out.build())
}

/// Rows: gamma space; columns: volume scalar space. Entry (i, j) equals
/// weight * int_gamma phi_j m_i ds.
pub fn trace_scalar_pairing(
    vol: &FunctionSpace,
    gamma: &FunctionSpace,
    iface: &InterfaceMesh,
    weight: f64,
) -> Result<CsrMatrix> {
    assert_eq!(vol.components, 1);
    let side = trace_side(vol)?;
    let mesh = vol.subdomain().unwrap();
    let adj = match side {
        SubdomainId::Fluid => &iface.f_adj,
        SubdomainId::Poro => &iface.p_adj,
    };
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let mut out = TripletBuilder::new(gamma.ndof, vol.ndof);
    for s in 0..iface.segment_count() {
        let (pa, pb) = iface.segment_points(s);
        let h = iface.segment_length(s);
        let (cell, _) = adj[s];
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let vdofs = &vol.dofmap[cell];
        for (q, p) in quad.points.iter().enumerate() {
            let t = p[0];
            let w = quad.weights[q] * h;
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let rp = map.to_reference(x);
            let (vvals, _) = tri_basis(vol.degree, rp).unwrap();
            let (gvals, gdofs) = gamma_basis(gamma, s, t);
            for (i, &gi) in gvals.iter().enumerate() {
                for (b, &vb) in vvals.iter().enumerate() {
                    out.add(gdofs[i], vdofs[b], weight * w * gi * vb);
                }
            }
        }
    }
    Ok(out.build())
}

/// Gamma-space-to-gamma-space pairing weight * (a_j, b_i) for two different
/// interface spaces (rows in `rows`, columns in `cols`).
pub fn gamma_pairing(
    rows: &FunctionSpace,
    cols: &FunctionSpace,
    weight: f64,
) -> CsrMatrix {
    let iface = rows.interface().expect("gamma space");
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let mut out = TripletBuilder::new(rows.ndof, cols.ndof);
    for s in 0..iface.segment_count() {
        let h = iface.segment_length(s);
        for (q, p) in quad.points.iter().enumerate() {
            let w = quad.weights[q] * h;
            let (rvals, rdofs) = gamma_basis(rows, s, p[0]);
            let (cvals, cdofs) = gamma_basis(cols, s, p[0]);
            for (i, &ri) in rvals.iter().enumerate() {
                for (j, &cj) in cvals.iter().enumerate() {
                    out.add(rdofs[i], cdofs[j], weight * w * ri * cj);
                }
            }
        }
    }
    out.build()
}

pub fn assemble_interface_form(
    id: InterfaceFormId,
    spaces: &FormSpaces,
    params: &PhysicalParams,
    dt: f64,
) -> Result<CsrMatrix> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveParam {
            name: "dt",
            value: dt,
        });
    }
    let iface = spaces.interface();
    if (iface.n_f[0] * iface.n_p[0] + iface.n_f[1] * iface.n_p[1] + 1.0).abs() != 0.0 {
        return Err(Error::OrientationError("n_f . n_p must equal -1".into()));
    }
    match id {
        InterfaceFormId::Ag => Ok(interface_mass(
            spaces.g2,
            1.0 / (params.beta_bjs * dt),
        )),
        InterfaceFormId::Bg1 => {
            let bu = trace_vector_pairing(spaces.u, spaces.g1, iface, iface.n_f, -1.0)?;
            let bx = trace_vector_pairing(spaces.eta, spaces.g1, iface, iface.n_p, -1.0)?;
            let mut out = TripletBuilder::new(spaces.g1.ndof, spaces.u.ndof + spaces.eta.ndof);
            add_block(&mut out, &bu, 0, 0, 1.0);
            add_block(&mut out, &bx, 0, spaces.u.ndof, 1.0);
            Ok(out.build())
        }
        InterfaceFormId::Bg2 => {
            let bu = trace_vector_pairing(spaces.u, spaces.g2, iface, iface.tau, -1.0)?;
            let bx = trace_vector_pairing(spaces.eta, spaces.g2, iface, iface.tau, 1.0)?;
            let mut out = TripletBuilder::new(spaces.g2.ndof, spaces.u.ndof + spaces.eta.ndof);
            add_block(&mut out, &bu, 0, 0, 1.0);
            add_block(&mut out, &bx, 0, spaces.u.ndof, 1.0);
            Ok(out.build())
        }
        InterfaceFormId::Blm => Ok(gamma_pairing(spaces.g1, spaces.lam, 1.0)),
        InterfaceFormId::B2 => {
            // trace pairing comes out with gamma rows; B2 wants pore-pressure rows
            let p = trace_scalar_pairing(spaces.p_p, spaces.lam, iface, 1.0)?;
            Ok(p.transpose())
        }
    }
}

// ---------------------------------------------------------------------------
// fractional H^{1/2} Gram on gamma
// ---------------------------------------------------------------------------

/// Gram matrix of (u, v) = (u, v)_{0,gamma} + |u, v|_{1/2,gamma} for the
/// continuous piecewise-linear multiplier space, where the seminorm part is
/// the double integral of (u(x)-u(y)) (v(x)-v(y)) / |x-y|^2 over gamma x gamma.
///
/// Identical segment pairs integrate a constant (P1 increments cancel the
/// kernel exactly); pairs sharing a vertex are reduced to smooth 1D integrals
/// by splitting along the diagonal through the shared vertex; separated pairs
/// use an 8x8 tensor Gauss rule.
pub fn assemble_h_half_gram(lambda_space: &FunctionSpace) -> Result<CsrMatrix> {
    let iface = lambda_space
        .interface()
        .ok_or_else(|| Error::SpaceMismatch("H^1/2 gram needs a gamma space".into()))?;
    if lambda_space.degree != 1 || lambda_space.components != 1 {
        return Err(Error::SpaceMismatch(
            "H^1/2 gram implemented for continuous scalar P1 multipliers".into(),
        ));
    }
    let ns = iface.segment_count();
    let n = lambda_space.ndof;

    // arclength coordinates of the interface vertices
    let arc: Vec<f64> = (0..iface.vertices.len()).map(|v| iface.arclength(v)).collect();
    let seg_nodes: Vec<[usize; 2]> = iface.segments.clone();
    let h = |s: usize| arc[seg_nodes[s][1]] - arc[seg_nodes[s][0]];

    // local slope of basis `dof` on segment s (dof is a vertex index)
    let slope = |s: usize, dof: usize| -> f64 {
        if dof == seg_nodes[s][0] {
            -1.0 / h(s)
        } else if dof == seg_nodes[s][1] {
            1.0 / h(s)
        } else {
            0.0
        }
    };
    let value_at = |dof: usize, x: f64, s: usize| -> f64 {
        // P1 value of basis `dof` at arclength x inside segment s
        let t = (x - arc[seg_nodes[s][0]]) / h(s);
        if dof == seg_nodes[s][0] {
            1.0 - t
        } else if dof == seg_nodes[s][1] {
            t
        } else {
            0.0
        }
    };

    let gauss8 = segment_quadrature(7).unwrap();
    let gauss8: Vec<(f64, f64)> = {
        // 8-point Gauss on [0,1] assembled from two scaled 4-point rules
        let mut pts = Vec::new();
        for half in 0..2 {
            for (p, w) in gauss8.points.iter().zip(&gauss8.weights) {
                pts.push((0.5 * (half as f64 + p[0]), 0.5 * w));
            }
        }
        pts
    };
    let duffy = {
        // 16-point Gauss on [0,1] from four scaled 4-point rules
        let base = segment_quadrature(7).unwrap();
        let mut pts = Vec::new();
        for quarter in 0..4 {
            for (p, w) in base.points.iter().zip(&base.weights) {
                pts.push((0.25 * (quarter as f64 + p[0]), 0.25 * w));
            }
        }
        pts
    };

    let mut j_dense = vec![0.0; n * n];
    let add = |a: usize, b: usize, v: f64, j_dense: &mut Vec<f64>| {
        j_dense[a * n + b] += v;
    };

    for e in 0..ns {
        let dofs_e = [seg_nodes[e][0], seg_nodes[e][1]];
        for f in 0..ns {
            let dofs_f = [seg_nodes[f][0], seg_nodes[f][1]];
            let mut dofs: Vec<usize> = dofs_e.to_vec();
            for d in dofs_f {
                if !dofs.contains(&d) {
                    dofs.push(d);
                }
            }
            if e == f {
                let he = h(e);
                for &a in &dofs {
                    for &b in &dofs {
                        add(a, b, slope(e, a) * slope(e, b) * he * he, &mut j_dense);
                    }
                }
            } else if seg_nodes[e][1] == seg_nodes[f][0] || seg_nodes[f][1] == seg_nodes[e][0] {
                // segments share one vertex; measure xi into the lower segment,
                // zeta into the upper one, and split along the diagonal
                let (lo, hi) = if seg_nodes[e][1] == seg_nodes[f][0] {
                    (e, f)
                } else {
                    (f, e)
                };
                let (hl, hh) = (h(lo), h(hi));
                for &a in &dofs {
                    let (sa_lo, sa_hi) = (slope(lo, a), slope(hi, a));
                    for &b in &dofs {
                        let (sb_lo, sb_hi) = (slope(lo, b), slope(hi, b));
                        // phi(c - xi) - phi(c + zeta) = -(s_lo xi + s_hi zeta)
                        // triangle 1: zeta = xi u, u in [0, hh/hl]
                        let r1 = hh / hl;
                        let mut i1 = 0.0;
                        for &(t, w) in &duffy {
                            let u = r1 * t;
                            i1 += w * r1 * (sa_lo + sa_hi * u) * (sb_lo + sb_hi * u)
                                / ((1.0 + u) * (1.0 + u));
                        }
                        // triangle 2: xi = zeta v, v in [0, hl/hh]
                        let r2 = hl / hh;
                        let mut i2 = 0.0;
                        for &(t, w) in &duffy {
                            let v = r2 * t;
                            i2 += w * r2 * (sa_lo * v + sa_hi) * (sb_lo * v + sb_hi)
                                / ((v + 1.0) * (v + 1.0));
                        }
                        add(a, b, 0.5 * hl * hl * i1 + 0.5 * hh * hh * i2, &mut j_dense);
                    }
                }
            } else {
                let (he, hf) = (h(e), h(f));
                let (xe, xf) = (arc[seg_nodes[e][0]], arc[seg_nodes[f][0]]);
                for &(te, we) in &gauss8 {
                    let xx = xe + he * te;
                    for &(tf, wf) in &gauss8 {
                        let yy = xf + hf * tf;
                        let d2 = (xx - yy) * (xx - yy);
                        let w = we * wf * he * hf;
                        for &a in &dofs {
                            let fa = value_at(a, xx, e) - value_at(a, yy, f);
                            if fa == 0.0 {
                                continue;
                            }
                            for &b in &dofs {
                                let fb = value_at(b, xx, e) - value_at(b, yy, f);
                                add(a, b, w * fa * fb / d2, &mut j_dense);
                            }
                        }
                    }
                }
            }
        }
    }

    // full inner product: L2 mass + seminorm
    let mass = interface_mass(lambda_space, 1.0);
    let mut out = TripletBuilder::new(n, n);
    add_block(&mut out, &mass, 0, 0, 1.0);
    for a in 0..n {
        for b in 0..n {
            out.add(a, b, j_dense[a * n + b]);
        }
    }
    Ok(out.build())
}

// ---------------------------------------------------------------------------
// loads
// ---------------------------------------------------------------------------

/// Volume load weight * int f . phi_i for all test functions of `space`.
fn volume_load<FV>(space: &FunctionSpace, f: &FV, weight: f64) -> Vec<f64>
where
    FV: Fn([f64; 2]) -> Vec<f64> + ?Sized,
{
    let mesh = space.subdomain().expect("volume space");
    let quad = triangle_quadrature(LOAD_VOLUME_ORDER).unwrap();
    let nc = space.components;
    let nb = space.scalar_basis_len();
    let mut out = vec![0.0; space.ndof];
    for cell in 0..mesh.cell_count() {
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let dofs = &space.dofmap[cell];
        for (q, &rp) in quad.points.iter().enumerate() {
            let (vals, _) = tri_basis(space.degree, rp).unwrap();
            let w = quad.weights[q] * map.det.abs() * weight;
            let x = map.to_physical(rp);
            let fv = f(x);
            for a in 0..nb {
                for c in 0..nc {
                    out[dofs[a * nc + c]] += w * vals[a] * fv[c];
                }
            }
        }
    }
    out
}

/// Boundary load weight * int_{Gamma_N} data(x, n) . phi_i over edges tagged
/// Neumann for `field`.
fn neumann_load<FD>(space: &FunctionSpace, field: Field, data: &FD, weight: f64) -> Vec<f64>
where
    FD: Fn([f64; 2], [f64; 2]) -> Vec<f64> + ?Sized,
{
    let mesh = space.subdomain().expect("volume space");
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let nc = space.components;
    let mut out = vec![0.0; space.ndof];
    for (&(va, vb), tag) in &mesh.boundary_edges {
        if tag.bc_for(field) != Some(Bc::Neumann) {
            continue;
        }
        let (cell, _) = mesh
            .boundary_edge_cell((va, vb))
            .expect("boundary edge has a cell");
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let (pa, pb) = (mesh.vertices[va], mesh.vertices[vb]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        // outward normal: rotate the edge direction and orient away from the
        // opposite triangle vertex
        let dirv = [(pb[0] - pa[0]) / len, (pb[1] - pa[1]) / len];
        let mut normal = [dirv[1], -dirv[0]];
        let centroid = {
            let v = mesh.cell_vertices(cell);
            [
                (v[0][0] + v[1][0] + v[2][0]) / 3.0,
                (v[0][1] + v[1][1] + v[2][1]) / 3.0,
            ]
        };
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        if (mid[0] - centroid[0]) * normal[0] + (mid[1] - centroid[1]) * normal[1] < 0.0 {
            normal = [-normal[0], -normal[1]];
        }
        let dofs = &space.dofmap[cell];
        let nb = space.scalar_basis_len();
        for (q, p) in quad.points.iter().enumerate() {
            let t = p[0];
            let w = quad.weights[q] * len * weight;
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let rp = map.to_reference(x);
            let (vals, _) = tri_basis(space.degree, rp).unwrap();
            let dv = data(x, normal);
            for a in 0..nb {
                for c in 0..nc {
                    out[dofs[a * nc + c]] += w * vals[a] * dv[c];
                }
            }
        }
    }
    out
}

/// Interface load weight * int_gamma f(x) . (trace of phi_i) for a volume space.
fn interface_volume_load<FD>(
    space: &FunctionSpace,
    iface: &InterfaceMesh,
    f: &FD,
    weight: f64,
) -> Vec<f64>
where
    FD: Fn([f64; 2]) -> Vec<f64> + ?Sized,
{
    let side = trace_side(space).expect("volume space");
    let mesh = space.subdomain().unwrap();
    let adj = match side {
        SubdomainId::Fluid => &iface.f_adj,
        SubdomainId::Poro => &iface.p_adj,
    };
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let nc = space.components;
    let nb = space.scalar_basis_len();
    let mut out = vec![0.0; space.ndof];
    for s in 0..iface.segment_count() {
        let (pa, pb) = iface.segment_points(s);
        let h = iface.segment_length(s);
        let (cell, _) = adj[s];
        let map = AffineTri::new(mesh.cell_vertices(cell));
        let dofs = &space.dofmap[cell];
        for (q, p) in quad.points.iter().enumerate() {
            let t = p[0];
            let w = quad.weights[q] * h * weight;
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let rp = map.to_reference(x);
            let (vals, _) = tri_basis(space.degree, rp).unwrap();
            let fv = f(x);
            for a in 0..nb {
                for c in 0..nc {
                    out[dofs[a * nc + c]] += w * vals[a] * fv[c];
                }
            }
        }
    }
    out
}

/// Interface load weight * int_gamma f(x) m_i for a gamma space.
fn interface_gamma_load<FD>(space: &FunctionSpace, f: &FD, weight: f64) -> Vec<f64>
where
    FD: Fn([f64; 2]) -> f64 + ?Sized,
{
    let iface = space.interface().expect("gamma space");
    let quad = segment_quadrature(IFACE_ORDER).unwrap();
    let mut out = vec![0.0; space.ndof];
    for s in 0..iface.segment_count() {
        let (pa, pb) = iface.segment_points(s);
        let h = iface.segment_length(s);
        for (q, p) in quad.points.iter().enumerate() {
            let t = p[0];
            let w = quad.weights[q] * h * weight;
            let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
            let (vals, dofs) = gamma_basis(space, s, t);
            for (a, &va) in vals.iter().enumerate() {
                out[dofs[a]] += w * va * f(x);
            }
        }
    }
    out
}

/// Evaluate a finite element field's trace on the interface as a closure
/// helper: returns (value per component) at an interface point.
fn trace_eval(
    space: &FunctionSpace,
    iface: &InterfaceMesh,
    coeffs: &[f64],
    s: usize,
    t: f64,
) -> Vec<f64> {
    let side = trace_side(space).expect("volume space");
    let mesh = space.subdomain().unwrap();
    let adj = match side {
        SubdomainId::Fluid => &iface.f_adj,
        SubdomainId::Poro => &iface.p_adj,
    };
    let (pa, pb) = iface.segment_points(s);
    let x = [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])];
    let (cell, _) = adj[s];
    let map = AffineTri::new(mesh.cell_vertices(cell));
    let (value, _) = eval_at(space, coeffs, cell, map.to_reference(x));
    value
}

/// Assemble one right-hand-side functional. `history` is required for F1-F4
/// whenever previous-step terms enter (absent history means step 0 with
/// missing initial data).
pub fn assemble_load(
    id: LoadId,
    spaces: &FormSpaces,
    data: &StepData,
    history: Option<&LoadHistory>,
    params: &PhysicalParams,
    dt: f64,
) -> Result<Vec<f64>> {
    let hist = history.ok_or(Error::MissingHistory(0))?;
    let iface = spaces.interface();
    match id {
        LoadId::F1 => {
            let nu = spaces.u.ndof;
            let nx = spaces.eta.ndof;
            if hist.u.len() != nu || hist.eta.len() != nx || hist.eta_prev.len() != nx {
                return Err(Error::DimensionMismatch {
                    expected: nu + 2 * nx,
                    got: hist.u.len() + hist.eta.len() + hist.eta_prev.len(),
                });
            }
            let mut out = vec![0.0; nu + nx];
            if let Some(ff) = data.f_f {
                let l = volume_load(spaces.u, &|x| ff(x).to_vec(), dt);
                for (o, v) in out[..nu].iter_mut().zip(l) {
                    *o += v;
                }
            }
            if let Some(tr) = data.traction_f {
                let l = neumann_load(spaces.u, Field::FluidVelocity, &|x, n| tr(x, n).to_vec(), dt);
                for (o, v) in out[..nu].iter_mut().zip(l) {
                    *o += v;
                }
            }
            if let Some(fe) = data.f_eta {
                let l = volume_load(spaces.eta, &|x| fe(x).to_vec(), dt);
                for (o, v) in out[nu..].iter_mut().zip(l) {
                    *o += v;
                }
            }
            if let Some(tr) = data.traction_p {
                let l = neumann_load(spaces.eta, Field::Displacement, &|x, n| tr(x, n).to_vec(), dt);
                for (o, v) in out[nu..].iter_mut().zip(l) {
                    *o += v;
                }
            }
            // rho_f (u^n, v)
            let mu = mass_matrix(spaces.u, params.rho_f);
            for (o, v) in out[..nu].iter_mut().zip(mu.mul_vec(hist.u)) {
                *o += v;
            }
            // rho_p ((2 eta^n - eta^{n-1}) / dt, phi)
            let mx = mass_matrix(spaces.eta, params.rho_p / dt);
            let comb: Vec<f64> = hist
                .eta
                .iter()
                .zip(hist.eta_prev)
                .map(|(a, b)| 2.0 * a - b)
                .collect();
            for (o, v) in out[nu..].iter_mut().zip(mx.mul_vec(&comb)) {
                *o += v;
            }
            // stress-jump defect on gamma (manufactured cases only)
            if let Some(defects) = &data.defects {
                let l = interface_volume_load(spaces.eta, iface, &|x| (defects.rho4)(x).to_vec(), dt);
                for (o, v) in out[nu..].iter_mut().zip(l) {
                    *o += v;
                }
            }
            Ok(out)
        }
        LoadId::F2 => {
            let np = spaces.p_p.ndof;
            if hist.p_p.len() != np {
                return Err(Error::DimensionMismatch {
                    expected: np,
                    got: hist.p_p.len(),
                });
            }
            let mut out = vec![0.0; np];
            if let Some(fp) = data.f_p {
                let l = volume_load(spaces.p_p, &|x| vec![fp(x)], 1.0);
                for (o, v) in out.iter_mut().zip(l) {
                    *o += v;
                }
            }
            if let Some(fl) = data.flux_p {
                let l = neumann_load(spaces.p_p, Field::PorePressure, &|x, n| vec![fl(x, n)], 1.0);
                for (o, v) in out.iter_mut().zip(l) {
                    *o += v;
                }
            }
            // (s0 / dt) (p_p^n, w)
            let m = mass_matrix(spaces.p_p, params.s0 / dt);
            for (o, v) in out.iter_mut().zip(m.mul_vec(hist.p_p)) {
                *o += v;
            }
            // (alpha / dt) (div eta^n, w) = -(1/dt) Bpp eta^n
            let bpp = assemble_volume_form(VolumeFormId::Bpp, spaces, params, dt)?;
            for (o, v) in out.iter_mut().zip(bpp.mul_vec(hist.eta)) {
                *o -= v / dt;
            }
            Ok(out)
        }
        LoadId::F3 => {
            // <(eta^n / dt) . n_p, s1> + <rho1, s1>
            let mut out = vec![0.0; spaces.g1.ndof];
            let n_p = iface.n_p;
            let eta = hist.eta;
            let eta_space = spaces.eta;
            let quad = segment_quadrature(IFACE_ORDER).unwrap();
            for s in 0..iface.segment_count() {
                let h = iface.segment_length(s);
                for (q, p) in quad.points.iter().enumerate() {
                    let t = p[0];
                    let w = quad.weights[q] * h;
                    let ev = trace_eval(eta_space, iface, eta, s, t);
                    let val = (ev[0] * n_p[0] + ev[1] * n_p[1]) / dt;
                    let (gvals, gdofs) = gamma_basis(spaces.g1, s, t);
                    for (a, &ga) in gvals.iter().enumerate() {
                        out[gdofs[a]] += w * ga * val;
                    }
                }
            }
            if let Some(defects) = &data.defects {
                let l = interface_gamma_load(spaces.g1, defects.rho1, 1.0);
                for (o, v) in out.iter_mut().zip(l) {
                    *o += v;
                }
            }
            Ok(out)
        }
        LoadId::F4 => {
            // -((eta^n / dt) . tau, s2) + (1/beta) (rho3, s2)
            let mut out = vec![0.0; spaces.g2.ndof];
            let tau = iface.tau;
            let quad = segment_quadrature(IFACE_ORDER).unwrap();
            for s in 0..iface.segment_count() {
                let h = iface.segment_length(s);
                for (q, p) in quad.points.iter().enumerate() {
                    let t = p[0];
                    let w = quad.weights[q] * h;
                    let ev = trace_eval(spaces.eta, iface, hist.eta, s, t);
                    let val = -(ev[0] * tau[0] + ev[1] * tau[1]) / dt;
                    let (gvals, gdofs) = gamma_basis(spaces.g2, s, t);
                    for (a, &ga) in gvals.iter().enumerate() {
                        out[gdofs[a]] += w * ga * val;
                    }
                }
            }
            if let Some(defects) = &data.defects {
                let l = interface_gamma_load(spaces.g2, defects.rho3, 1.0 / params.beta_bjs);
                for (o, v) in out.iter_mut().zip(l) {
                    *o += v;
                }
            }
            Ok(out)
        }
    }
}

/// Extra right-hand side for the lambda-row equation when manufactured defect
/// data is active: dt (rho2, mu) + eps_bar * S * I_h(lambda_exact), where S is
/// the fractional Gram. Zero when no defects are present.
pub fn assemble_defect_lambda_rhs(
    spaces: &FormSpaces,
    data: &StepData,
    s_gram: &CsrMatrix,
    params: &PhysicalParams,
    dt: f64,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; spaces.lam.ndof];
    if let Some(defects) = &data.defects {
        let l = interface_gamma_load(spaces.lam, defects.rho2, dt);
        for (o, v) in out.iter_mut().zip(l) {
            *o += v;
        }
        let lam_star = spaces.lam.interpolate(|x| vec![(defects.lambda_exact)(x)]);
        for (o, v) in out.iter_mut().zip(s_gram.mul_vec(&lam_star)) {
            *o += params.eps_bar * v;
        }
    }
    Ok(out)
}
