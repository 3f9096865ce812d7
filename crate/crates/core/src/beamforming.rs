//! Statistical-CSI zero-forcing.
//!
//! Everything the rate and gradient code needs is read off the inverse Gram
//! matrix `G⁻¹ = (H̄ᴴH̄)⁻¹` of the LoS channel:
//!
//! * `f1(m)  = |h̄_m w_m|²          = 1 / [G⁻¹]_mm`
//! * `f3(m,j) = |w_jᴴ w_m|²         = |[G⁻¹]_jm|² / ([G⁻¹]_jj [G⁻¹]_mm)`
//! * `f2(m)  = tr(Ψ_m²)             = Σ_{i,j≠m} P_i P_j f3(i,j)` (with `f3(i,i) = 1`)
//!
//! [`zf_beamformers`] builds the projector-based beamformers explicitly; it
//! exists for reporting and as an independent cross-check of the closed
//! forms above.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::geometry::{steering_row, AntennaLayout};

/// Condition number above which a Gram matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// `H̄(t)`: N×M, column m is the conjugate transpose of user m's steering row.
#[derive(Debug, Clone, PartialEq)]
pub struct LosMatrix(pub DMatrix<Complex64>);

impl LosMatrix {
    pub fn num_antennas(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.0.ncols()
    }

    /// `h̄_m` as a row (the conjugate of column m).
    pub fn row(&self, m: usize) -> Vec<Complex64> {
        self.0.column(m).iter().map(|z| z.conj()).collect()
    }
}

/// `(H̄ᴴH̄)⁻¹`, Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GramInverse(pub DMatrix<Complex64>);

impl GramInverse {
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    /// Real diagonal entry `[G⁻¹]_mm`.
    pub fn diag(&self, m: usize) -> f64 {
        self.0[(m, m)].re
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }
}

/// Unit-norm ZF beamformers, one column per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfBeamformers(pub DMatrix<Complex64>);

impl ZfBeamformers {
    pub fn column(&self, m: usize) -> Vec<Complex64> {
        self.0.column(m).iter().copied().collect()
    }
}

pub fn los_matrix(layout: &AntennaLayout, cfg: &SystemConfig) -> LosMatrix {
    let n = layout.len();
    let m = cfg.num_users;
    let mut h = DMatrix::zeros(n, m);
    for u in 0..m {
        for (i, z) in steering_row(layout, cfg, u).into_iter().enumerate() {
            h[(i, u)] = z.conj();
        }
    }
    LosMatrix(h)
}

/// Gram matrix `H̄ᴴH̄`.
pub fn gram(h: &LosMatrix) -> DMatrix<Complex64> {
    h.0.adjoint() * &h.0
}

/// Ratio of extreme eigenvalues of a Hermitian positive semi-definite matrix.
pub fn condition_number(a: &DMatrix<Complex64>) -> f64 {
    let eig = a.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn hermitian_inverse(a: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let cond = condition_number(&a);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let inv = a
        .cholesky()
        .ok_or(Error::IllConditioned {
            condition: f64::INFINITY,
        })?
        .inverse();
    Ok((&inv + inv.adjoint()).scale(0.5))
}

pub fn gram_inverse(h: &LosMatrix) -> Result<GramInverse> {
    hermitian_inverse(gram(h)).map(GramInverse)
}

/// Projector-based ZF: `w_m ∝ (I − H̄_m(H̄_mᴴH̄_m)⁻¹H̄_mᴴ) h̄_mᴴ`, where `H̄_m`
/// drops column m.
pub fn zf_beamformers(h: &LosMatrix) -> Result<ZfBeamformers> {
    let n = h.num_antennas();
    let m = h.num_users();
    let cond = condition_number(&gram(h));
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let mut w = DMatrix::zeros(n, m);
    for u in 0..m {
        let target = h.0.column(u).into_owned();
        let dir = if m == 1 {
            target
        } else {
            let others = h.0.clone().remove_column(u);
            let inner = hermitian_inverse(others.adjoint() * &others)?;
            let proj = &others * inner * others.adjoint();
            &target - proj * &target
        };
        let norm = dir.norm();
        w.set_column(u, &dir.unscale(norm));
    }
    Ok(ZfBeamformers(w))
}

/// Beamforming gain `|h̄_m w_m|²`.
pub fn f1(g: &GramInverse, m: usize) -> f64 {
    1.0 / g.diag(m)
}

/// Beamformer cross-correlation `|w_jᴴ w_m|²`; 1 when `j == m`.
pub fn f3(g: &GramInverse, m: usize, j: usize) -> f64 {
    g.get(j, m).norm_sqr() / (g.diag(j) * g.diag(m))
}

/// Interference trace `tr(Ψ_m²)` with `Ψ_m = Σ_{j≠m} P_j w_j w_jᴴ`.
pub fn f2(g: &GramInverse, powers: &[f64], m: usize) -> f64 {
    let users = g.size();
    let mut acc = 0.0;
    for i in (0..users).filter(|&i| i != m) {
        for j in (0..users).filter(|&j| j != m) {
            acc += powers[i] * powers[j] * f3(g, i, j);
        }
    }
    acc
}

/// The three channel functionals for every user, computed once per layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFunctionals {
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    /// `f3[m][j]`, symmetric, with ones on the diagonal.
    pub f3: Vec<Vec<f64>>,
}

impl ChannelFunctionals {
    pub fn from_gram_inverse(g: &GramInverse, powers: &[f64]) -> Self {
        let m = g.size();
        let f3m: Vec<Vec<f64>> = (0..m)
            .map(|a| (0..m).map(|b| f3(g, a, b)).collect())
            .collect();
        let f2v = (0..m)
            .map(|u| {
                let mut acc = 0.0;
                for i in (0..m).filter(|&i| i != u) {
                    for j in (0..m).filter(|&j| j != u) {
                        acc += powers[i] * powers[j] * f3m[i][j];
                    }
                }
                acc
            })
            .collect();
        ChannelFunctionals {
            f1: (0..m).map(|u| f1(g, u)).collect(),
            f2: f2v,
            f3: f3m,
        }
    }
}

/// LoS matrix, its Gram inverse and the derived functionals for one layout.
#[derive(Debug, Clone)]
pub struct LayoutState {
    pub los: LosMatrix,
    pub gram_inv: GramInverse,
    pub functionals: ChannelFunctionals,
}

impl LayoutState {
    pub fn new(layout: &AntennaLayout, cfg: &SystemConfig) -> Result<Self> {
        let los = los_matrix(layout, cfg);
        let gram_inv = gram_inverse(&los)?;
        let functionals = ChannelFunctionals::from_gram_inverse(&gram_inv, &cfg.tx_power);
        Ok(LayoutState {
            los,
            gram_inv,
            functionals,
        })
    }
}
