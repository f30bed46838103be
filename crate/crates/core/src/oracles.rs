//! Closed-form and ODE-based reference bounds.
//!
//! * [`w_closed_form`] / [`w_inf`]: the spatially homogeneous logistic
//!   supersolution `W' = λW − ν₀W^ρ` and its initial-data-free envelope.
//! * [`linear_bound`]: exponential bound for the linear problem.
//! * [`z_radial`]: the radial large solution of `−Δz = λz − βz^ρ` that is
//!   infinite on the sphere of radius `a`.
//! * [`tau_unbounded`]: the waiting time after which the linear problem on a
//!   set `E` dominates a multiple of the principal eigenfunction of `D ⊂ E`.
//! * [`subsolution_growth`]: the one-mode lower bound.

use std::f64::consts::E;

use crate::error::{ConfigError, Error, Result};
use crate::grid::Field;
use crate::spectral::EigenPair;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeBoundParams {
    pub lambda: f64,
    pub nu0: f64,
    pub rho: f64,
    pub w0: f64,
}

/// `W(t)` solving `W' = λW − ν₀W^ρ`, `W(0) = w0`.
pub fn w_closed_form(p: &OdeBoundParams, t: f64) -> f64 {
    if p.w0 == 0.0 {
        return 0.0;
    }
    let q = p.rho - 1.0;
    let inv = if p.lambda == 0.0 {
        p.nu0 * q * t + p.w0.powf(-q)
    } else {
        let decay = (-p.lambda * q * t).exp();
        // (1 − e^{−λqt})/λ written stably for small λqt
        let frac = -(-p.lambda * q * t).exp_m1() / p.lambda;
        p.nu0 * frac + decay * p.w0.powf(-q)
    };
    inv.powf(-1.0 / q)
}

/// `W_∞(t)`: the limit of `W(t)` as `w0 → ∞`.
pub fn w_inf(lambda: f64, nu0: f64, rho: f64, t: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(ConfigError::invariant(
            "oracle",
            "W_∞ requires λ > 0 (the envelope is derived under effective growth)",
        )
        .into());
    }
    if !(t > 0.0) {
        return Err(ConfigError::invariant("oracle", "W_∞ requires t > 0").into());
    }
    let q = rho - 1.0;
    let frac = -(-lambda * q * t).exp_m1() / lambda;
    Ok((nu0 * frac).powf(-1.0 / q))
}

/// `M·e^{(λ−λ₁)(t−t₀)}·‖u₀‖_∞`.
pub fn linear_bound(lambda: f64, lambda1h: f64, m: f64, u0_sup: f64, t_minus_t0: f64) -> f64 {
    m * ((lambda - lambda1h) * t_minus_t0).exp() * u0_sup
}

/// Radial profile of the boundary blow-up solution on `B(0, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    /// Target radius.
    pub a: f64,
    /// Radius at which the computed profile blows up.
    pub blowup_radius: f64,
    pub z0: f64,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub rho: f64,
    pub beta: f64,
}

impl RadialProfile {
    /// Linear interpolation of the profile; `None` beyond the last sample.
    pub fn eval(&self, r: f64) -> Option<f64> {
        if r < 0.0 {
            return None;
        }
        let k = self.r.partition_point(|&s| s <= r);
        if k == 0 {
            return Some(self.z[0]);
        }
        if k == self.r.len() {
            return (r == self.r[k - 1]).then(|| self.z[k - 1]);
        }
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let w = (r - r0) / (r1 - r0);
        Some(self.z[k - 1] * (1.0 - w) + self.z[k] * w)
    }

    /// `(2(ρ+1)/(β(ρ−1)²))^{1/(ρ−1)}`.
    pub fn asymptotic_constant(&self) -> f64 {
        blowup_constant(self.rho, self.beta)
    }
}

pub fn blowup_constant(rho: f64, beta: f64) -> f64 {
    (2.0 * (rho + 1.0) / (beta * (rho - 1.0).powi(2))).powf(1.0 / (rho - 1.0))
}

pub const DEFAULT_PROFILE_CAP: f64 = 1e8;

struct RadialOde {
    lambda: f64,
    beta: f64,
    rho: f64,
    dim: usize,
}

impl RadialOde {
    /// `(z, z')' ` at radius `r`.
    fn rhs(&self, r: f64, z: f64, dz: f64) -> (f64, f64) {
        let zp = z.max(0.0).powf(self.rho);
        let forcing = self.beta * zp - self.lambda * z;
        let ddz = if r == 0.0 {
            // z'' + (N−1) z''(0) = forcing at the origin
            forcing / self.dim as f64
        } else {
            forcing - (self.dim as f64 - 1.0) / r * dz
        };
        (dz, ddz)
    }

    fn rk4(&self, r: f64, z: f64, dz: f64, h: f64) -> (f64, f64) {
        let (k1a, k1b) = self.rhs(r, z, dz);
        let (k2a, k2b) = self.rhs(r + h / 2.0, z + h / 2.0 * k1a, dz + h / 2.0 * k1b);
        let (k3a, k3b) = self.rhs(r + h / 2.0, z + h / 2.0 * k2a, dz + h / 2.0 * k2b);
        let (k4a, k4b) = self.rhs(r + h, z + h * k3a, dz + h * k3b);
        (
            z + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
            dz + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
        )
    }

    /// Integrates from `z(0) = z0` up to `r_max` or until `z > cap`.
    ///
    /// Returns the samples and the blow-up radius estimate, `None` when the
    /// solution stays below the cap on `[0, r_max]`.
    fn shoot(&self, z0: f64, r_max: f64, cap: f64, keep: bool) -> (Vec<(f64, f64)>, Option<f64>) {
        let p = 2.0 / (self.rho - 1.0);
        let h_max = r_max / 2000.0;
        let mut r = 0.0;
        let mut z = z0;
        let mut dz = 0.0;
        let mut out = Vec::new();
        if keep {
            out.push((r, z));
        }
        while r < r_max {
            // step bounded by a fraction of the blow-up scale z/z' = (R−r)/p
            let scale = if dz > 0.0 { z / dz } else { f64::INFINITY };
            let h = h_max.min(0.02 * scale).min(r_max - r);
            let (zn, dzn) = self.rk4(r, z, dz, h);
            r += h;
            z = zn;
            dz = dzn;
            if !z.is_finite() || !dz.is_finite() {
                return (out, Some(r));
            }
            if keep {
                out.push((r, z));
            }
            if z > cap {
                // z ≈ C (R − r)^{−p}  ⇒  R − r ≈ p z / z'
                return (out, Some(r + p * z / dz));
            }
            if z < 0.0 {
                return (out, None);
            }
        }
        (out, None)
    }
}

/// Radial large solution of `−Δz = λz − βz^ρ` on `B(0, a)` by shooting on `z(0)`.
pub fn z_radial(a: f64, lambda: f64, beta: f64, rho: f64, dim: usize) -> Result<RadialProfile> {
    z_radial_with_cap(a, lambda, beta, rho, dim, DEFAULT_PROFILE_CAP)
}

pub fn z_radial_with_cap(
    a: f64,
    lambda: f64,
    beta: f64,
    rho: f64,
    dim: usize,
    cap: f64,
) -> Result<RadialProfile> {
    if !(a > 0.0 && beta > 0.0 && rho > 1.0 && (dim == 1 || dim == 2 || dim == 3)) {
        return Err(ConfigError::invariant(
            "oracle",
            "z_radial needs a > 0, β > 0, ρ > 1 and dimension 1..3",
        )
        .into());
    }
    let ode = RadialOde {
        lambda,
        beta,
        rho,
        dim,
    };
    let r_max = 2.0 * a;
    let radius = |z0: f64| ode.shoot(z0, r_max, cap, false).1.unwrap_or(f64::INFINITY);
    // any z0 at or below the positive equilibrium never blows up
    let eq = if lambda > 0.0 {
        (lambda / beta).powf(1.0 / (rho - 1.0))
    } else {
        0.0
    };
    let mut lo = if eq > 0.0 { eq } else { 1e-8 };
    let mut hi = lo.max(1.0) * 2.0;
    let mut tries = 0;
    while radius(hi) >= a {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 200 || hi > cap {
            return Err(Error::Bracketing { lo, hi });
        }
    }
    if radius(lo) <= a {
        return Err(Error::Bracketing { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = radius(mid);
        if r > a {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    let z0 = 0.5 * (lo + hi);
    let (samples, blowup) = ode.shoot(z0, r_max, cap, true);
    let blowup_radius = blowup.ok_or(Error::Bracketing { lo, hi })?;
    if (blowup_radius - a).abs() > 1e-6 {
        return Err(Error::Bracketing { lo, hi });
    }
    let (r, z) = samples.into_iter().unzip();
    Ok(RadialProfile {
        a,
        blowup_radius,
        z0,
        r,
        z,
        rho,
        beta,
    })
}

/// Inputs of the waiting-time formula for the linear problem on `E ⊃ D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauInputs {
    pub dim: usize,
    pub lam: f64,
    pub lam1_e: f64,
    pub lam2_e: f64,
    /// Surrogate for the embedding constant of `H^N(E) ↪ L^∞(E)`.
    pub c_inf: f64,
    /// `‖v₀‖_{L²(E)}`
    pub v0_norm: f64,
    /// `⟨v₀, φ₁^E⟩`
    pub alpha1: f64,
    /// `inf_D φ₁^E`
    pub inf_phi1_d: f64,
    /// `max_D φ₁^D`
    pub max_phi1_d: f64,
    pub gamma: f64,
}

impl TauInputs {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let ok = self.lam > self.lam1_e
            && self.lam2_e > self.lam1_e
            && self.alpha1 > 0.0
            && self.gamma > 1.0
            && self.inf_phi1_d > 0.0
            && self.max_phi1_d > 0.0
            && self.v0_norm > 0.0
            && self.c_inf > 0.0
            && self.dim >= 1;
        if ok {
            Ok(())
        } else {
            Err(ConfigError::invariant(
                "oracle",
                "tau needs λ > λ₁^E, λ₂^E > λ₁^E, α₁ > 0, γ > 1 and positive eigenfunction bounds",
            ))
        }
    }

    /// The embedding branch of the waiting time.
    pub fn smoothing_branch(&self) -> f64 {
        let n = self.dim as f64;
        n * self.lam2_e / (2.0 * E * (self.lam2_e - self.lam1_e))
            * (2.0 * self.c_inf * self.v0_norm / (self.alpha1 * self.inf_phi1_d)).powf(2.0 / n)
    }

    /// The growth branch of the waiting time.
    pub fn growth_branch(&self) -> f64 {
        1.0 / (self.lam - self.lam1_e)
            * (2.0 * self.gamma * self.max_phi1_d / (self.alpha1 * self.inf_phi1_d)).ln()
    }
}

/// Waiting time after which `v(t) ≥ γ φ₁^D` on `D`.
pub fn tau_unbounded(input: &TauInputs) -> Result<f64> {
    input.validate()?;
    Ok(input.smoothing_branch().max(input.growth_branch()))
}

/// `e^{(λ−λ₁^E)t} ⟨u₀, φ₁^E⟩ φ₁^E`.
pub fn subsolution_growth(lambda: f64, eigen: &EigenPair, u0: &Field, t: f64) -> Field {
    let coeff = u0.restricted(&eigen.mask).dot(&eigen.vector);
    eigen
        .vector
        .scaled(((lambda - eigen.value) * t).exp() * coeff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_equilibrium_is_constant() {
        let p = OdeBoundParams {
            lambda: 3.0,
            nu0: 1.5,
            rho: 2.5,
            w0: (3.0_f64 / 1.5).powf(1.0 / 1.5),
        };
        for t in [0.0, 0.1, 1.0, 10.0] {
            assert!((w_closed_form(&p, t) - p.w0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_direct_value() {
        let p = OdeBoundParams {
            lambda: 1.0,
            nu0: 1.0,
            rho: 2.0,
            w0: 2.0,
        };
        assert!((w_closed_form(&p, 2.0_f64.ln()) - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(w_closed_form(&OdeBoundParams { w0: 0.0, ..p }, 1.0), 0.0);
    }

    #[test]
    fn zero_lambda_limit_is_continuous() {
        let base = OdeBoundParams {
            lambda: 0.0,
            nu0: 2.0,
            rho: 3.0,
            w0: 1.5,
        };
        let near = OdeBoundParams {
            lambda: 1e-9,
            ..base
        };
        assert!((w_closed_form(&base, 0.7) - w_closed_form(&near, 0.7)).abs() < 1e-8);
    }

    #[test]
    fn w_inf_values() {
        assert!((w_inf(1.0, 1.0, 2.0, 2.0_f64.ln()).unwrap() - 2.0).abs() < 1e-14);
        assert!((w_inf(1.0, 1.0, 2.0, 60.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(w_inf(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(w_inf(-1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn linear_bound_trivia() {
        assert_eq!(linear_bound(3.0, 2.0, 1.5, 2.0, 0.0), 3.0);
        assert_eq!(linear_bound(2.0, 2.0, 1.0, 2.0, 7.0), 2.0);
    }

    #[test]
    fn blowup_constants() {
        assert!((blowup_constant(2.0, 1.0) - 6.0).abs() < 1e-14);
        assert!((blowup_constant(3.0, 1.0) - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tau_formula_structure() {
        let base = TauInputs {
            dim: 2,
            lam: 30.0,
            lam1_e: 20.0,
            lam2_e: 50.0,
            c_inf: 1.0,
            v0_norm: 1.0,
            alpha1: 0.8,
            inf_phi1_d: 1.2,
            max_phi1_d: 4.0,
            gamma: 2.0,
        };
        let doubled = TauInputs { gamma: 4.0, ..base };
        assert!(
            (doubled.growth_branch() - base.growth_branch() - 2.0_f64.ln() / 10.0).abs() < 1e-12
        );
        assert_eq!(doubled.smoothing_branch(), base.smoothing_branch());
        let close = TauInputs {
            lam: 20.0 + 1e-9,
            ..base
        };
        assert!(tau_unbounded(&close).unwrap() > 1e8);
        assert!(tau_unbounded(&TauInputs { gamma: 1.0, ..base }).is_err());
    }
}
