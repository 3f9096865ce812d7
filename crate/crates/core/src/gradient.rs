//! Analytic gradient of the closed-form sum rate with respect to every
//! antenna coordinate.
//!
//! Moving antenna n along one axis only changes column n of `H̄ᴴ`; its
//! derivative is the vector `b` of [`steering_derivative`]. From there:
//!
//! ```text
//! ∂G    = b h̄[n]ᴴ + h̄[n] bᴴ                 (rank-two update of H̄ᴴH̄)
//! ∂G⁻¹  = −G⁻¹ ∂G G⁻¹
//! ∂f1   = −[∂G⁻¹]_mm / [G⁻¹]_mm²
//! ∂f3   = quotient rule on |[G⁻¹]_jm|² / ([G⁻¹]_jj [G⁻¹]_mm)
//! ∂f2   = Σ_{i,j≠m} P_i P_j ∂f3(i,j)
//! ∂R    = (∂f4 + (∂f5 f6 − f5 ∂f6)/f6²) / ((f4 + f5/f6) ln 2)
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::beamforming::{ChannelFunctionals, GramInverse, LayoutState};
use crate::config::SystemConfig;
use crate::error::Result;
use crate::geometry::AntennaLayout;
use crate::rate::{approx_rate, Objective, RateConstants};

/// Coordinate axis of an antenna position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }
}

/// `∂(Σ_m R_m)/∂t`: row 0 holds x-derivatives, row 1 y-derivatives, one
/// column per antenna. Units are bits/s/Hz per wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutGradient(pub DMatrix<f64>);

impl LayoutGradient {
    pub fn zeros(n: usize) -> Self {
        LayoutGradient(DMatrix::zeros(2, n))
    }

    pub fn num_antennas(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, n: usize, axis: Axis) -> f64 {
        self.0[(axis.index(), n)]
    }

    /// `[∂/∂x_n, ∂/∂y_n]`.
    pub fn column(&self, n: usize) -> [f64; 2] {
        [self.0[(0, n)], self.0[(1, n)]]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// `∂h̄_m[n]/∂(axis)` for every user: `j k c_m e^{j k t_nᵀ a_m}`, where
/// `c_m` is `cosθ sinφ` for x and `sinθ` for y.
pub fn steering_derivative(
    layout: &AntennaLayout,
    cfg: &SystemConfig,
    n: usize,
    axis: Axis,
) -> Vec<Complex64> {
    let k = cfg.wavenumber();
    let p = layout.position(n);
    (0..cfg.num_users)
        .map(|m| {
            let a = cfg.direction(m);
            let phase = k * (p[0] * a[0] + p[1] * a[1]);
            Complex64::new(0.0, k * a[axis.index()]) * Complex64::from_polar(1.0, phase)
        })
        .collect()
}

/// `∂G⁻¹` for a move of antenna `n` along `axis`.
pub fn gram_inverse_derivative(
    layout: &AntennaLayout,
    cfg: &SystemConfig,
    q: &GramInverse,
    n: usize,
    axis: Axis,
) -> DMatrix<Complex64> {
    let users = cfg.num_users;
    let b = steering_derivative(layout, cfg, n, axis);
    let k = cfg.wavenumber();
    let p = layout.position(n);
    let h: Vec<Complex64> = (0..users)
        .map(|m| {
            let a = cfg.direction(m);
            Complex64::from_polar(1.0, k * (p[0] * a[0] + p[1] * a[1]))
        })
        .collect();
    let dg = DMatrix::from_fn(users, users, |i, j| b[i] * h[j].conj() + h[i] * b[j].conj());
    -(&q.0 * dg * &q.0)
}

/// Derivatives of all three functionals for one coordinate move.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDerivatives {
    pub df1: Vec<f64>,
    pub df2: Vec<f64>,
    /// `df3[m][j]`, symmetric with zeros on the diagonal.
    pub df3: Vec<Vec<f64>>,
}

/// `(∂f1, ∂f2, ∂f3)` for every user given `G⁻¹` and its derivative.
pub fn f_derivatives(q: &GramInverse, dq: &DMatrix<Complex64>, powers: &[f64]) -> FunctionalDerivatives {
    let users = q.size();
    let d = |i: usize| q.diag(i);
    let dd = |i: usize| dq[(i, i)].re;
    let df1 = (0..users).map(|m| -dd(m) / (d(m) * d(m))).collect();
    let df3: Vec<Vec<f64>> = (0..users)
        .map(|m| {
            (0..users)
                .map(|j| {
                    if j == m {
                        return 0.0;
                    }
                    let qjm = q.get(j, m);
                    let num = qjm.norm_sqr();
                    let dnum = 2.0 * (qjm.conj() * dq[(j, m)]).re;
                    let den = d(j) * d(m);
                    let dden = dd(j) * d(m) + d(j) * dd(m);
                    (dnum * den - num * dden) / (den * den)
                })
                .collect()
        })
        .collect();
    let df2 = (0..users)
        .map(|m| {
            let mut acc = 0.0;
            for i in (0..users).filter(|&i| i != m) {
                for j in (0..users).filter(|&j| j != m && j != i) {
                    acc += powers[i] * powers[j] * df3[i][j];
                }
            }
            acc
        })
        .collect();
    FunctionalDerivatives { df1, df2, df3 }
}

/// `∂R_m` of one user given the functionals and their derivatives.
pub fn rate_derivative(c: &RateConstants, f: &ChannelFunctionals, df: &FunctionalDerivatives) -> f64 {
    let m = c.user;
    let (f1, f2) = (f.f1[m], f.f2[m]);
    let (df1, df2) = (df.df1[m], df.df2[m]);
    let sum = |w: &[f64], v: &[f64]| -> f64 {
        w.iter()
            .zip(v)
            .enumerate()
            .filter(|&(j, _)| j != m)
            .map(|(_, (a, b))| a * b)
            .sum()
    };
    let t = c.terms(f);
    let df4 = c.w2 * df1 + df2 * (c.w3 + c.w4 * f1) + f2 * c.w4 * df1 + sum(&c.w5, &df.df3[m]);
    let df5 = df2 * (c.w7 + c.w8 * f1) + f2 * c.w8 * df1 + sum(&c.w9, &df.df3[m]);
    let s = sum(&c.w12, &f.f3[m]);
    let ds = sum(&c.w12, &df.df3[m]);
    let g = c.w13 * f1 + c.w14;
    let df6 = c.w11 * df2 + (ds * g - s * c.w13 * df1) / (g * g);
    (df4 + (df5 * t.f6 - t.f5 * df6) / (t.f6 * t.f6)) / (t.argument() * std::f64::consts::LN_2)
}

/// Gradient of the closed-form sum rate. Users whose rate is clamped at
/// zero contribute nothing.
pub fn objective_gradient(obj: &Objective, layout: &AntennaLayout) -> Result<LayoutGradient> {
    let state = LayoutState::new(layout, &obj.cfg)?;
    gradient_at_state(obj, layout, &state)
}

pub fn gradient_at_state(
    obj: &Objective,
    layout: &AntennaLayout,
    state: &LayoutState,
) -> Result<LayoutGradient> {
    let active: Vec<&RateConstants> = obj
        .constants
        .iter()
        .map(|c| approx_rate(&c.terms(&state.functionals)).map(|v| (c, v.clamped)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, clamped)| !clamped)
        .map(|(c, _)| c)
        .collect();
    let mut grad = LayoutGradient::zeros(layout.len());
    for n in 0..layout.len() {
        for axis in Axis::BOTH {
            let dq = gram_inverse_derivative(layout, &obj.cfg, &state.gram_inv, n, axis);
            let df = f_derivatives(&state.gram_inv, &dq, &obj.cfg.tx_power);
            grad.0[(axis.index(), n)] = active
                .iter()
                .map(|c| rate_derivative(c, &state.functionals, &df))
                .sum();
        }
    }
    Ok(grad)
}

/// Objective value and gradient from a single Gram inversion.
pub fn value_and_gradient(obj: &Objective, layout: &AntennaLayout) -> Result<(f64, LayoutGradient)> {
    let state = LayoutState::new(layout, &obj.cfg)?;
    let value = obj.evaluate_state(&state)?.sum;
    Ok((value, gradient_at_state(obj, layout, &state)?))
}

/// Central-difference step, in wavelengths.
pub const FD_STEP: f64 = 1e-6;
pub const FD_RTOL: f64 = 1e-5;
pub const FD_ATOL: f64 = 1e-10;

/// Central-difference derivative of `f` along one coordinate.
pub fn central_difference<F>(layout: &AntennaLayout, n: usize, axis: Axis, step: f64, f: F) -> Result<f64>
where
    F: Fn(&AntennaLayout) -> Result<f64>,
{
    let mut plus = layout.clone();
    *plus.coord_mut(n, axis.index()) += step;
    let mut minus = layout.clone();
    *minus.coord_mut(n, axis.index()) -= step;
    Ok((f(&plus)? - f(&minus)?) / (2.0 * step))
}

/// `|analytic − numeric| ≤ rtol·max(|analytic|, |numeric|) + atol`.
pub fn within_tolerance(analytic: f64, numeric: f64, rtol: f64, atol: f64) -> bool {
    (analytic - numeric).abs() <= rtol * analytic.abs().max(numeric.abs()) + atol
}

/// Outcome of comparing the analytic gradient against central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub analytic: LayoutGradient,
    pub numeric: LayoutGradient,
    /// Largest `|a − n| / max(|a|, |n|)` over entries above the floor.
    pub max_relative_error: f64,
    pub passed: bool,
}

/// Finite-difference verification of [`objective_gradient`].
pub fn check_gradient(obj: &Objective, layout: &AntennaLayout, step: f64) -> Result<GradientCheck> {
    let analytic = objective_gradient(obj, layout)?;
    let mut numeric = LayoutGradient::zeros(layout.len());
    for n in 0..layout.len() {
        for axis in Axis::BOTH {
            numeric.0[(axis.index(), n)] = central_difference(layout, n, axis, step, |t| obj.value(t))?;
        }
    }
    let mut worst = 0.0f64;
    let mut passed = true;
    for (a, b) in analytic.0.iter().zip(numeric.0.iter()) {
        passed &= within_tolerance(*a, *b, FD_RTOL, FD_ATOL);
        let scale = a.abs().max(b.abs());
        if scale > FD_ATOL {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Ok(GradientCheck {
        analytic,
        numeric,
        max_relative_error: worst,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{gram_inverse, los_matrix};
    use crate::config::reference_scenario;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        reference_scenario(5, 1.0, 15.0, 0.2)
    }

    fn single_user() -> SystemConfig {
        let mut c = cfg();
        c.num_users = 1;
        for v in [
            &mut c.tx_power,
            &mut c.large_scale_gain,
            &mut c.rician_k,
            &mut c.elevation_aod,
            &mut c.azimuth_aod,
        ] {
            v.truncate(1);
        }
        c
    }

    fn functionals(layout: &AntennaLayout, cfg: &SystemConfig) -> ChannelFunctionals {
        LayoutState::new(layout, cfg).unwrap().functionals
    }

    #[test]
    fn steering_derivative_zero_direction() {
        let mut c = cfg();
        c.elevation_aod[0] = 0.0;
        c.azimuth_aod[0] = 0.0;
        let t = AntennaLayout::centers(&c.regions);
        let b = steering_derivative(&t, &c, 2, Axis::X);
        assert_eq!(b[0].norm(), 0.0);
        for m in 0..4 {
            let a = c.direction(m);
            for axis in Axis::BOTH {
                let b = steering_derivative(&t, &c, 2, axis);
                assert!((b[m].norm() - c.wavenumber() * a[axis.index()].abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn steering_derivative_matches_fd() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let t = AntennaLayout::random(&c.regions, &mut rng);
            for n in 0..5 {
                for axis in Axis::BOTH {
                    let b = steering_derivative(&t, &c, n, axis);
                    for m in 0..4 {
                        for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
                            let fd = central_difference(&t, n, axis, FD_STEP, |l| {
                                Ok(part(crate::geometry::steering_row(l, &c, m)[n]))
                            })
                            .unwrap();
                            assert!(within_tolerance(part(b[m]), fd, FD_RTOL, 1e-8), "{} vs {fd}", part(b[m]));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn single_user_derivatives_vanish() {
        let c = single_user();
        let t = AntennaLayout::centers(&c.regions);
        let q = gram_inverse(&los_matrix(&t, &c)).unwrap();
        let dq = gram_inverse_derivative(&t, &c, &q, 1, Axis::X);
        assert!(dq[(0, 0)].norm() < 1e-15);
        let df = f_derivatives(&q, &dq, &c.tx_power);
        assert!(df.df1[0].abs() < 1e-12);
        let g = objective_gradient(&Objective::new(&c), &t).unwrap();
        assert!(g.max_abs() < 1e-9);
    }

    #[test]
    fn gram_inverse_derivative_hermitian_and_fd() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let t = AntennaLayout::random(&c.regions, &mut rng);
            let q = gram_inverse(&los_matrix(&t, &c)).unwrap();
            for n in 0..5 {
                for axis in Axis::BOTH {
                    let dq = gram_inverse_derivative(&t, &c, &q, n, axis);
                    assert!((&dq - dq.adjoint()).norm() < 1e-10 * dq.norm().max(1.0));
                    for i in 0..4 {
                        for j in 0..4 {
                            for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
                                let fd = central_difference(&t, n, axis, FD_STEP, |l| {
                                    Ok(part(gram_inverse(&los_matrix(l, &c))?.get(i, j)))
                                })
                                .unwrap();
                                let a = part(dq[(i, j)]);
                                assert!(within_tolerance(a, fd, FD_RTOL, 1e-8), "{a} vs {fd}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn functional_derivatives_match_fd() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let t = AntennaLayout::random(&c.regions, &mut rng);
            let q = gram_inverse(&los_matrix(&t, &c)).unwrap();
            for n in 0..5 {
                for axis in Axis::BOTH {
                    let df = f_derivatives(&q, &gram_inverse_derivative(&t, &c, &q, n, axis), &c.tx_power);
                    for m in 0..4 {
                        let fd1 = central_difference(&t, n, axis, FD_STEP, |l| Ok(functionals(l, &c).f1[m])).unwrap();
                        assert!(within_tolerance(df.df1[m], fd1, FD_RTOL, 1e-8), "f1 {} vs {fd1}", df.df1[m]);
                        let fd2 = central_difference(&t, n, axis, FD_STEP, |l| Ok(functionals(l, &c).f2[m])).unwrap();
                        assert!(within_tolerance(df.df2[m], fd2, FD_RTOL, 1e-6), "f2 {} vs {fd2}", df.df2[m]);
                        for j in 0..4 {
                            assert!((df.df3[m][j] - df.df3[j][m]).abs() < 1e-12);
                            let fd3 =
                                central_difference(&t, n, axis, FD_STEP, |l| Ok(functionals(l, &c).f3[m][j])).unwrap();
                            assert!(within_tolerance(df.df3[m][j], fd3, FD_RTOL, 1e-9), "f3 {} vs {fd3}", df.df3[m][j]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn objective_gradient_matches_fd() {
        let c = cfg();
        let obj = Objective::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let t = AntennaLayout::random(&c.regions, &mut rng);
            let check = check_gradient(&obj, &t, FD_STEP).unwrap();
            assert!(check.passed, "max relative error {}", check.max_relative_error);
        }
    }

    #[test]
    fn gradient_translation_covariant() {
        let c = cfg();
        let obj = Objective::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let t = AntennaLayout::random(&c.regions, &mut rng);
            let a = objective_gradient(&obj, &t).unwrap();
            let b = objective_gradient(&obj, &t.translated([0.37, -1.2])).unwrap();
            assert!((&a.0 - &b.0).amax() < 1e-8);
            // a rigid shift leaves the objective unchanged
            for axis in 0..2 {
                let total: f64 = a.0.row(axis).sum();
                assert!(total.abs() < 1e-8, "axis {axis}: {total}");
            }
        }
    }
}
