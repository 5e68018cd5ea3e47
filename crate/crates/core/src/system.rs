//! The monolithic saddle point system.
//!
//! Unknown grouping: the coercive block collects velocity, displacement, pore
//! pressure, the tangential-stress multiplier, and the flux multiplier
//! (`M = U x X x Q_p x L_g2 x L_lam`); the constraint block collects the fluid
//! pressure and the normal-stress multiplier (`Z = Q_f x L_g1`). The assembled
//! operator is
//!
//! ```text
//!   [ A_M   B^T ] [ m ]   [ F_M  ]
//!   [ B     0   ] [ z ] = [ -F_3 ]
//! ```
//!
//! where every off-diagonal coupling inside `A_M` enters in skew-symmetric
//! pairs, so the symmetric part of `A_M` is block diagonal and positive
//! definite for positive parameters. Homogeneous Dirichlet constraints are
//! eliminated symmetrically (zeroed rows/columns, unit diagonal).

use std::sync::Arc;

use crate::elements::{
    build_interface_space, build_space, ElementFamily, FunctionSpace,
};
use crate::error::{Error, Result};
use crate::forms::{
    self, assemble_h_half_gram, assemble_interface_form, assemble_volume_form, FormSpaces,
    InterfaceFormId, PhysicalParams, VolumeFormId,
};
use crate::mesh::{Field, TwoSquareGeometry};
use crate::solver;
use crate::sparse::{saddle_point_matrix, CsrMatrix, TripletBuilder};

/// The seven discrete spaces: Taylor-Hood (vector P2 / scalar P1) on each
/// subdomain, piecewise-constant multipliers for the two stress components,
/// and continuous P1 for the flux multiplier.
pub struct Spaces {
    pub u: FunctionSpace,
    pub p_f: FunctionSpace,
    pub eta: FunctionSpace,
    pub p_p: FunctionSpace,
    pub g1: FunctionSpace,
    pub g2: FunctionSpace,
    pub lam: FunctionSpace,
}

impl Spaces {
    pub fn forms(&self) -> FormSpaces<'_> {
        FormSpaces {
            u: &self.u,
            p_f: &self.p_f,
            eta: &self.eta,
            p_p: &self.p_p,
            g1: &self.g1,
            g2: &self.g2,
            lam: &self.lam,
        }
    }
}

pub fn build_spaces(geo: &TwoSquareGeometry) -> Result<Spaces> {
    let fam = ElementFamily::Lagrange;
    Ok(Spaces {
        u: build_space(&geo.mesh_f, fam, 2, 2, Some(Field::FluidVelocity))?,
        p_f: build_space(&geo.mesh_f, fam, 1, 1, None)?,
        eta: build_space(&geo.mesh_p, fam, 2, 2, Some(Field::Displacement))?,
        p_p: build_space(&geo.mesh_p, fam, 1, 1, Some(Field::PorePressure))?,
        g1: build_interface_space(&geo.interface, fam, 0, 1)?,
        g2: build_interface_space(&geo.interface, fam, 0, 1)?,
        lam: build_interface_space(&geo.interface, fam, 1, 1)?,
    })
}

/// Dof layout of the coercive block `M`.
#[derive(Debug, Clone, Copy)]
pub struct MOffsets {
    pub u: usize,
    pub eta: usize,
    pub p_p: usize,
    pub g2: usize,
    pub lam: usize,
    pub total: usize,
}

/// Dof layout of the constraint block `Z`.
#[derive(Debug, Clone, Copy)]
pub struct ZOffsets {
    pub p_f: usize,
    pub g1: usize,
    pub total: usize,
}

/// Component Gram/stiffness matrices retained for energy evaluation and norm
/// computations (all unweighted).
pub struct NormOps {
    pub mass_u: CsrMatrix,
    pub def_u: CsrMatrix,
    pub mass_eta: CsrMatrix,
    pub def_eta: CsrMatrix,
    pub div_eta: CsrMatrix,
    pub mass_pp: CsrMatrix,
    pub grad_pp: CsrMatrix,
    pub mass_pf: CsrMatrix,
    pub mass_g2: CsrMatrix,
    /// Fractional H^{1/2} Gram on the flux multiplier space.
    pub s_lam: CsrMatrix,
    /// L2 pairing between the normal-stress and flux multiplier spaces.
    pub r_pair: CsrMatrix,
}

pub struct BlockSystem {
    pub a_m: CsrMatrix,
    pub b_mz: CsrMatrix,
    pub g_m: CsrMatrix,
    pub g_z: CsrMatrix,
    pub m_off: MOffsets,
    pub z_off: ZOffsets,
    /// Dirichlet mask over the M block (Z is unconstrained).
    pub mask_m: Vec<bool>,
    /// Unconstrained M dofs.
    pub free_m: Vec<usize>,
    pub norms: NormOps,
    pub params: PhysicalParams,
    pub dt: f64,
}

impl CsrMatrix {
    /// Symmetric elimination: zero masked rows and columns, unit diagonal.
    pub fn eliminate_symmetric(&self, mask: &[bool]) -> CsrMatrix {
        assert_eq!(self.nrows, self.ncols);
        let mut b = TripletBuilder::new(self.nrows, self.ncols);
        for i in 0..self.nrows {
            if mask[i] {
                b.add(i, i, 1.0);
                continue;
            }
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if !mask[*c] {
                    b.add(i, *c, *v);
                }
            }
        }
        b.build()
    }

    /// Zero out masked columns (for constraint rows acting on eliminated dofs).
    pub fn eliminate_columns(&self, mask: &[bool]) -> CsrMatrix {
        let mut b = TripletBuilder::new(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if !mask[*c] {
                    b.add(i, *c, *v);
                }
            }
        }
        b.build()
    }
}

/// Assemble the full MF(4) block system with its norm Gram matrices.
pub fn build_block_system(
    spaces: &Spaces,
    params: &PhysicalParams,
    dt: f64,
) -> Result<BlockSystem> {
    build_block_system_inner(spaces, params, dt, false)
}

/// As `build_block_system`, but allows `eps_bar == 0` (drops the stabilization
/// block; the well-posedness guarantee no longer applies).
pub fn build_block_system_unstabilized(
    spaces: &Spaces,
    params: &PhysicalParams,
    dt: f64,
) -> Result<BlockSystem> {
    build_block_system_inner(spaces, params, dt, true)
}

fn build_block_system_inner(
    spaces: &Spaces,
    params: &PhysicalParams,
    dt: f64,
    allow_zero_eps: bool,
) -> Result<BlockSystem> {
    if allow_zero_eps {
        params.validate_allow_zero_eps()?;
    } else {
        params.validate()?;
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::NonPositiveParam {
            name: "dt",
            value: dt,
        });
    }
    let fs = spaces.forms();
    let (nu, nx, np, ng2, nlam) = (
        spaces.u.ndof,
        spaces.eta.ndof,
        spaces.p_p.ndof,
        spaces.g2.ndof,
        spaces.lam.ndof,
    );
    let (nq, ng1) = (spaces.p_f.ndof, spaces.g1.ndof);
    let m_off = MOffsets {
        u: 0,
        eta: nu,
        p_p: nu + nx,
        g2: nu + nx + np,
        lam: nu + nx + np + ng2,
        total: nu + nx + np + ng2 + nlam,
    };
    let z_off = ZOffsets {
        p_f: 0,
        g1: nq,
        total: nq + ng1,
    };

    // ---- sub-blocks
    let a1 = assemble_volume_form(VolumeFormId::A1, &fs, params, dt)?;
    let a2 = assemble_volume_form(VolumeFormId::A2, &fs, params, dt)?;
    let bpp = assemble_volume_form(VolumeFormId::Bpp, &fs, params, dt)?;
    let bpf = assemble_volume_form(VolumeFormId::Bpf, &fs, params, dt)?;
    let ag = assemble_interface_form(InterfaceFormId::Ag, &fs, params, dt)?;
    let bg1 = assemble_interface_form(InterfaceFormId::Bg1, &fs, params, dt)?;
    let bg2 = assemble_interface_form(InterfaceFormId::Bg2, &fs, params, dt)?;
    let blm = assemble_interface_form(InterfaceFormId::Blm, &fs, params, dt)?;
    let b2 = assemble_interface_form(InterfaceFormId::B2, &fs, params, dt)?;
    let s_lam = assemble_h_half_gram(&spaces.lam)?;

    // ---- A_M
    let mut am = TripletBuilder::new(m_off.total, m_off.total);
    forms::add_block(&mut am, &a1, m_off.u, m_off.u, 1.0);
    forms::add_block(&mut am, &a2, m_off.p_p, m_off.p_p, 1.0);
    forms::add_block(&mut am, &ag, m_off.g2, m_off.g2, 1.0);
    // tangential-stress coupling, skew pair
    forms::add_block(&mut am, &bg2.transpose(), m_off.u, m_off.g2, 1.0);
    forms::add_block(&mut am, &bg2, m_off.g2, m_off.u, -1.0);
    // displacement/pore-pressure coupling, skew pair
    let bpp_t = bpp.transpose();
    forms::add_block(&mut am, &bpp_t, m_off.eta, m_off.p_p, 1.0);
    forms::add_block(&mut am, &bpp, m_off.p_p, m_off.eta, -1.0);
    // pore-pressure/flux-multiplier coupling, skew pair
    forms::add_block(&mut am, &b2, m_off.p_p, m_off.lam, -1.0);
    forms::add_block(&mut am, &b2.transpose(), m_off.lam, m_off.p_p, 1.0);
    // fractional stabilization
    if params.eps_bar > 0.0 {
        forms::add_block(&mut am, &s_lam, m_off.lam, m_off.lam, params.eps_bar);
    }
    let a_m_raw = am.build();

    // ---- B_MZ
    let mut b = TripletBuilder::new(z_off.total, m_off.total);
    forms::add_block(&mut b, &bpf, z_off.p_f, m_off.u, 1.0);
    forms::add_block(&mut b, &bg1, z_off.g1, m_off.u, 1.0);
    forms::add_block(&mut b, &blm, z_off.g1, m_off.lam, 1.0);
    let b_raw = b.build();

    // ---- Dirichlet masks over M
    let mut mask_m = vec![false; m_off.total];
    for (i, &m) in spaces.u.dirichlet.iter().enumerate() {
        mask_m[m_off.u + i] = m;
    }
    for (i, &m) in spaces.eta.dirichlet.iter().enumerate() {
        mask_m[m_off.eta + i] = m;
    }
    for (i, &m) in spaces.p_p.dirichlet.iter().enumerate() {
        mask_m[m_off.p_p + i] = m;
    }
    let free_m: Vec<usize> = (0..m_off.total).filter(|&i| !mask_m[i]).collect();

    let a_m = a_m_raw.eliminate_symmetric(&mask_m);
    let b_mz = b_raw.eliminate_columns(&mask_m);

    // ---- norm Gram matrices
    let mass_u = forms::mass_matrix(&spaces.u, 1.0);
    let def_u = forms::deformation_stiffness(&spaces.u, 1.0);
    let mass_eta = forms::mass_matrix(&spaces.eta, 1.0);
    let def_eta = forms::deformation_stiffness(&spaces.eta, 1.0);
    let div_eta = forms::div_div_stiffness(&spaces.eta, 1.0);
    let mass_pp = forms::mass_matrix(&spaces.p_p, 1.0);
    let grad_pp = forms::grad_stiffness(&spaces.p_p, 1.0);
    let mass_pf = forms::mass_matrix(&spaces.p_f, 1.0);
    let mass_g2 = forms::interface_mass(&spaces.g2, 1.0);
    let r_pair = forms::gamma_pairing(&spaces.g1, &spaces.lam, 1.0);

    let mut gm = TripletBuilder::new(m_off.total, m_off.total);
    forms::add_block(&mut gm, &mass_u, m_off.u, m_off.u, 1.0);
    forms::add_block(&mut gm, &def_u, m_off.u, m_off.u, 1.0);
    forms::add_block(&mut gm, &mass_eta, m_off.eta, m_off.eta, 1.0);
    forms::add_block(&mut gm, &def_eta, m_off.eta, m_off.eta, 1.0);
    forms::add_block(&mut gm, &mass_pp, m_off.p_p, m_off.p_p, 1.0);
    forms::add_block(&mut gm, &grad_pp, m_off.p_p, m_off.p_p, 1.0);
    forms::add_block(&mut gm, &mass_g2, m_off.g2, m_off.g2, 1.0);
    forms::add_block(&mut gm, &s_lam, m_off.lam, m_off.lam, 1.0);
    let g_m = gm.build().eliminate_symmetric(&mask_m);

    // G_Z: L2 mass on the fluid pressure; computable dual Gram
    // R S^{-1} R^T on the normal-stress multiplier
    let dual_g1 = dual_gram(&r_pair, &s_lam)?;
    let mut gz = TripletBuilder::new(z_off.total, z_off.total);
    forms::add_block(&mut gz, &mass_pf, z_off.p_f, z_off.p_f, 1.0);
    forms::add_block(&mut gz, &dual_g1, z_off.g1, z_off.g1, 1.0);
    let g_z = gz.build();

    Ok(BlockSystem {
        a_m,
        b_mz,
        g_m,
        g_z,
        m_off,
        z_off,
        mask_m,
        free_m,
        norms: NormOps {
            mass_u,
            def_u,
            mass_eta,
            def_eta,
            div_eta,
            mass_pp,
            grad_pp,
            mass_pf,
            mass_g2,
            s_lam,
            r_pair,
        },
        params: *params,
        dt,
    })
}

/// Discrete dual-norm Gram R S^{-1} R^T: realizes the negative-order norm on
/// the normal-stress multiplier through the fractional Gram on the flux space.
fn dual_gram(r: &CsrMatrix, s: &CsrMatrix) -> Result<CsrMatrix> {
    let sd = s.to_dense();
    let chol = nalgebra::linalg::Cholesky::new(sd)
        .ok_or_else(|| Error::SingularBlock("fractional Gram is not SPD".into()))?;
    let rd = r.to_dense();
    let sirt = chol.solve(&rd.transpose());
    let out = &rd * sirt;
    Ok(CsrMatrix::from_dense(&out, 0.0))
}

impl BlockSystem {
    pub fn m_dim(&self) -> usize {
        self.m_off.total
    }

    pub fn z_dim(&self) -> usize {
        self.z_off.total
    }

    /// The full symmetric-indefinite two-by-two block matrix.
    pub fn full_matrix(&self) -> CsrMatrix {
        saddle_point_matrix(&self.a_m, &self.b_mz)
    }

    /// Symmetric part of `A_M` restricted to unconstrained dofs.
    pub fn a_m_sym_free(&self) -> CsrMatrix {
        let at = self.a_m.transpose();
        let mut b = TripletBuilder::new(self.a_m.nrows, self.a_m.ncols);
        forms::add_block(&mut b, &self.a_m, 0, 0, 0.5);
        forms::add_block(&mut b, &at, 0, 0, 0.5);
        b.build().restrict(&self.free_m, &self.free_m)
    }

    pub fn g_m_free(&self) -> CsrMatrix {
        self.g_m.restrict(&self.free_m, &self.free_m)
    }

    pub fn b_mz_free(&self) -> CsrMatrix {
        let all_rows: Vec<usize> = (0..self.z_off.total).collect();
        self.b_mz.restrict(&all_rows, &self.free_m)
    }

    /// Split a full solution vector into the (M, Z) parts.
    pub fn split_solution<'a>(&self, full: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        full.split_at(self.m_off.total)
    }

    /// Euclidean norms of the per-equation algebraic residuals, in the order:
    /// fluid momentum, fluid mass, structure momentum, pore pressure,
    /// tangential-stress multiplier, flux multiplier, normal-stress constraint.
    pub fn residual(&self, state_scaled: &[f64], rhs: &[f64]) -> Result<[f64; 7]> {
        let total = self.m_off.total + self.z_off.total;
        if state_scaled.len() != total || rhs.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                got: state_scaled.len().min(rhs.len()),
            });
        }
        let full = self.full_matrix();
        let ax = full.mul_vec(state_scaled);
        let r: Vec<f64> = ax.iter().zip(rhs).map(|(a, b)| a - b).collect();
        let m = self.m_off;
        let nrm = |lo: usize, hi: usize| -> f64 {
            r[lo..hi].iter().map(|v| v * v).sum::<f64>().sqrt()
        };
        let zbase = m.total;
        Ok([
            nrm(m.u, m.eta),
            nrm(zbase + self.z_off.p_f, zbase + self.z_off.g1),
            nrm(m.eta, m.p_p),
            nrm(m.p_p, m.g2),
            nrm(m.g2, m.lam),
            nrm(m.lam, m.total),
            nrm(zbase + self.z_off.g1, zbase + self.z_off.total),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_two_square_geometry, Rect};

    pub(crate) fn standard_geometry(n: usize) -> TwoSquareGeometry {
        build_two_square_geometry(
            Rect::new(0.0, 0.0, 1.0, 1.0),
            Rect::new(0.0, 1.0, 1.0, 2.0),
            n,
            n,
            n,
        )
        .unwrap()
    }

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    #[test]
    fn zero_kappa_rejected() {
        let geo = standard_geometry(1);
        let spaces = build_spaces(&geo).unwrap();
        let mut params = PhysicalParams::ones();
        params.kappa = 0.0;
        assert!(matches!(
            build_block_system(&spaces, &params, 1.0),
            Err(Error::NonPositiveParam { name: "kappa", .. })
        ));
    }

    #[test]
    fn quadratic_form_matches_norm_decomposition() {
        let geo = standard_geometry(2);
        let spaces = build_spaces(&geo).unwrap();
        let params = PhysicalParams {
            rho_f: 1.3,
            nu_f: 0.7,
            rho_p: 0.9,
            nu_p: 1.7,
            lambda_lame: 2.1,
            alpha: 0.8,
            s0: 0.6,
            kappa: 0.05,
            beta_bjs: 3.0,
            eps_bar: 1e-3,
        };
        let dt = 0.2;
        let sys = build_block_system(&spaces, &params, dt).unwrap();
        let mut st = 0x12345678ABCDEFu64;
        let mut m: Vec<f64> = (0..sys.m_dim()).map(|_| xorshift(&mut st)).collect();
        for (i, &masked) in sys.mask_m.iter().enumerate() {
            if masked {
                m[i] = 0.0;
            }
        }
        let quad = sys.a_m.quadratic_form(&m, &m);

        let off = sys.m_off;
        let u = &m[off.u..off.eta];
        let eta = &m[off.eta..off.p_p];
        let pp = &m[off.p_p..off.g2];
        let g2 = &m[off.g2..off.lam];
        let lam = &m[off.lam..off.total];
        let n = &sys.norms;
        let expected = params.rho_f * n.mass_u.quadratic_form(u, u)
            + 2.0 * params.nu_f * dt * n.def_u.quadratic_form(u, u)
            + params.rho_p * n.mass_eta.quadratic_form(eta, eta)
            + 2.0 * params.nu_p * dt * dt * n.def_eta.quadratic_form(eta, eta)
            + dt * dt * params.lambda_lame * n.div_eta.quadratic_form(eta, eta)
            + params.s0 / (dt * dt) * n.mass_pp.quadratic_form(pp, pp)
            + params.kappa / dt * n.grad_pp.quadratic_form(pp, pp)
            + 1.0 / (params.beta_bjs * dt) * n.mass_g2.quadratic_form(g2, g2)
            + params.eps_bar * n.s_lam.quadratic_form(lam, lam);
        assert!(
            (quad - expected).abs() <= 1e-11 * expected.abs(),
            "{quad} vs {expected}"
        );
    }

    #[test]
    fn skew_coupling_cancels_exactly() {
        let geo = standard_geometry(2);
        let spaces = build_spaces(&geo).unwrap();
        let sys = build_block_system(&spaces, &PhysicalParams::ones(), 0.5).unwrap();
        let mut st = 0xFEED5EEDu64;
        for _ in 0..5 {
            let mut m: Vec<f64> = (0..sys.m_dim()).map(|_| xorshift(&mut st)).collect();
            for (i, &masked) in sys.mask_m.iter().enumerate() {
                if masked {
                    m[i] = 0.0;
                }
            }
            // m^T (A - A^T) m = 0 identically
            let amx = sys.a_m.mul_vec(&m);
            let atx = sys.a_m.transpose().mul_vec(&m);
            let diff: f64 = m
                .iter()
                .zip(amx.iter().zip(&atx))
                .map(|(mi, (a, b))| mi * (a - b))
                .sum();
            let scale: f64 = m.iter().zip(&amx).map(|(a, b)| a * b).sum();
            assert!(diff.abs() <= 1e-12 * scale.abs().max(1.0));
        }
    }

    #[test]
    fn constraint_row_divergence_value() {
        // B_MZ row for (q = 1, s1 = 0) applied to v = (x, 0): -(div v, 1) = -1
        let geo = standard_geometry(2);
        let spaces = build_spaces(&geo).unwrap();
        let sys = build_block_system(&spaces, &PhysicalParams::ones(), 1.0).unwrap();
        let v = spaces.u.interpolate(|p| vec![p[0], 0.0]);
        let mut m = vec![0.0; sys.m_dim()];
        m[..spaces.u.ndof].copy_from_slice(&v);
        // no Dirichlet elimination on this probe: use the raw interpolant but
        // the left/right sides are Dirichlet for u, so restrict to the raw
        // matrix instead
        let q_ones = vec![1.0; spaces.p_f.ndof];
        let bm = sys.b_mz.mul_vec(&m);
        let val: f64 = q_ones
            .iter()
            .enumerate()
            .map(|(i, q)| q * bm[sys.z_off.p_f + i])
            .sum();
        // masked dofs zeroed the interpolant on the Dirichlet sides, so
        // compare against the divergence integral of the masked field instead
        // of the exact -1; rebuild without elimination for the exact value
        let fs = spaces.forms();
        let bpf = assemble_volume_form(VolumeFormId::Bpf, &fs, &PhysicalParams::ones(), 1.0).unwrap();
        let bv = bpf.mul_vec(&v);
        let exact: f64 = bv.iter().sum();
        assert!((exact + 1.0).abs() < 1e-12, "raw Bpf gives {exact}");
        // and the assembled system's masked version agrees with the masked probe
        let mut vm = v.clone();
        spaces.u.apply_mask(&mut vm);
        let bvm = bpf.mul_vec(&vm);
        let masked_exact: f64 = bvm.iter().sum();
        assert!((val - masked_exact).abs() < 1e-12);
    }

    #[test]
    fn full_matrix_dims_and_symmetry() {
        let geo = standard_geometry(1);
        let spaces = build_spaces(&geo).unwrap();
        let sys = build_block_system(&spaces, &PhysicalParams::ones(), 0.1).unwrap();
        let full = sys.full_matrix();
        assert_eq!(full.nrows, sys.m_dim() + sys.z_dim());
        // structural symmetry of the sparsity pattern
        for i in 0..full.nrows {
            let (cols, _) = full.row(i);
            for &c in cols {
                let (rc, _) = full.row(c);
                assert!(rc.binary_search(&i).is_ok(), "pattern asymmetric at ({i},{c})");
            }
        }
    }

    #[test]
    fn smallest_mesh_factorizes_with_nonzero_pivots() {
        let geo = standard_geometry(1);
        let spaces = build_spaces(&geo).unwrap();
        let sys = build_block_system(&spaces, &PhysicalParams::ones(), 0.1).unwrap();
        let full = sys.full_matrix();
        // independent dense determinant oracle: fraction-free elimination
        let n = full.nrows;
        let mut a = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            let (cols, vals) = full.row(i);
            for (c, v) in cols.iter().zip(vals) {
                a[i][*c] = *v;
            }
        }
        let mut det_sign = 1.0f64;
        let mut log_det = 0.0f64;
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
                .unwrap();
            if piv != k {
                a.swap(k, piv);
                det_sign = -det_sign;
            }
            assert!(a[k][k].abs() > 1e-12, "zero pivot at {k}");
            log_det += a[k][k].abs().ln();
            det_sign *= a[k][k].signum();
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        assert!(log_det.is_finite() && det_sign != 0.0);
        // and the production factorization agrees that the matrix is regular
        assert!(solver::factorize(&full).is_ok());
    }

    #[test]
    fn residual_blocks() {
        let geo = standard_geometry(1);
        let spaces = build_spaces(&geo).unwrap();
        let sys = build_block_system(&spaces, &PhysicalParams::ones(), 0.1).unwrap();
        let total = sys.m_dim() + sys.z_dim();
        // zero state, zero loads: all residuals zero
        let r = sys.residual(&vec![0.0; total], &vec![0.0; total]).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
        // zero state, nonzero F1 rhs: only momentum blocks nonzero
        let mut rhs = vec![0.0; total];
        for i in 0..spaces.u.ndof {
            if !sys.mask_m[i] {
                rhs[i] = 1.0;
            }
        }
        let r = sys.residual(&vec![0.0; total], &rhs).unwrap();
        assert!(r[0] > 0.0);
        assert!(r[1] == 0.0 && r[2] == 0.0 && r[3] == 0.0 && r[4] == 0.0 && r[5] == 0.0 && r[6] == 0.0);
    }
}
