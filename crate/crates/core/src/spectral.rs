//! Dirichlet eigenpairs of `-Δ_h` on masked subdomains and the
//! characteristic value `λ₀(K)` obtained from shrinking neighborhoods.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, SetShape};
use crate::grid::{cg_solve, Field, Grid, Mask, SpdOperator, Stencil};

pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;
pub const DEFAULT_LAMBDA0_CAP: f64 = 1e4;
const INNER_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 5000;

/// Eigenvalue with an `L²`-normalized eigenvector supported on `mask`.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Field,
    pub mask: Mask,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda0Verdict {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda0Estimate {
    /// Strictly decreasing dilation radii.
    pub deltas: Vec<f64>,
    /// `λ₁` of each neighborhood; may stop early once the cap is exceeded.
    pub values: Vec<f64>,
    pub verdict: Lambda0Verdict,
}

impl Lambda0Estimate {
    pub fn value(&self) -> f64 {
        match self.verdict {
            Lambda0Verdict::Finite(v) => v,
            Lambda0Verdict::Infinite => f64::INFINITY,
        }
    }
}

fn check_mask(grid: &Grid, m: &Mask) -> Result<()> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let comps = grid.components(m).len();
    if comps > 1 {
        return Err(Error::DisconnectedMask { components: comps });
    }
    Ok(())
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse iteration on the compressed operator, optionally orthogonal to `deflate`.
fn inverse_iteration(
    stencil: &Stencil,
    start: Vec<f64>,
    deflate: Option<&[f64]>,
    tol: f64,
) -> Result<(f64, Vec<f64>)> {
    let op = SpdOperator {
        stencil,
        shift: 0.0,
        c: None,
    };
    let project = |x: &mut Vec<f64>| {
        if let Some(d) = deflate {
            let c = dot(x, d) / dot(d, d);
            x.iter_mut().zip(d).for_each(|(v, w)| *v -= c * w);
        }
    };
    let mut x = start;
    project(&mut x);
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut ax = vec![0.0; x.len()];
    stencil.apply(&x, &mut ax);
    let mut lam = dot(&x, &ax);
    let res_tol = tol.sqrt().max(1e-9);
    for sweep in 0..MAX_SWEEPS {
        let guess: Vec<f64> = x.iter().map(|v| v / lam).collect();
        let (mut y, _) = cg_solve(&op, &x, Some(&guess), INNER_TOL)?;
        project(&mut y);
        let ny = norm2(&y);
        y.iter_mut().for_each(|v| *v /= ny);
        stencil.apply(&y, &mut ax);
        let lam_new = dot(&y, &ax);
        let residual = ax
            .iter()
            .zip(&y)
            .map(|(a, v)| (a - lam_new * v).powi(2))
            .sum::<f64>()
            .sqrt()
            / lam_new;
        let shift = (lam_new - lam).abs() / lam_new;
        x = y;
        lam = lam_new;
        if sweep > 0 && shift <= tol && residual <= res_tol {
            return Ok((lam, x));
        }
    }
    Err(Error::NoConvergence {
        what: "inverse iteration",
        iterations: MAX_SWEEPS,
        residual: lam,
    })
}

fn to_eigenpair(grid: &Grid, stencil: &Stencil, mask: &Mask, value: f64, x: &[f64]) -> EigenPair {
    let mut vector = stencil.scatter(grid, x);
    if vector.values.iter().sum::<f64>() < 0.0 {
        vector = vector.scaled(-1.0);
    }
    let norm = vector.l2_norm();
    EigenPair {
        value,
        vector: vector.scaled(1.0 / norm),
        mask: mask.clone(),
    }
}

/// Principal Dirichlet eigenpair of `-Δ_h` on a connected mask.
pub fn principal_eigenpair(grid: &Grid, m: &Mask, tol: f64) -> Result<EigenPair> {
    check_mask(grid, m)?;
    let stencil = Stencil::new(grid, m);
    let (value, x) = inverse_iteration(&stencil, vec![1.0; stencil.len()], None, tol)?;
    Ok(to_eigenpair(grid, &stencil, m, value, &x))
}

/// Block size of the subspace iteration for the second eigenpair.
const BLOCK: usize = 4;

/// Modified Gram-Schmidt; drops vectors that become numerically dependent.
fn orthonormalize(vs: &mut Vec<Vec<f64>>) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs.drain(..) {
        for q in &out {
            let c = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
        }
        let n = norm2(&v);
        if n > 1e-12 {
            v.iter_mut().for_each(|a| *a /= n);
            out.push(v);
        }
    }
    *vs = out;
}

/// Second Dirichlet eigenpair: subspace inverse iteration orthogonal to
/// the principal vector, with Rayleigh-Ritz on a small block.
///
/// A plain deflated iteration stalls when `λ₂` is (nearly) double, as for
/// discs and squares; the block makes its convergence rate `λ₂/λ₆`.
pub fn second_eigenpair(grid: &Grid, m: &Mask, tol: f64) -> Result<EigenPair> {
    check_mask(grid, m)?;
    let stencil = Stencil::new(grid, m);
    let len = stencil.len();
    if len < 2 {
        return Err(Error::Unsupported(
            "second eigenvalue needs at least two nodes".into(),
        ));
    }
    let (_, phi1) = inverse_iteration(&stencil, vec![1.0; len], None, tol)?;
    let deflate = |v: &mut Vec<f64>| {
        let c = dot(v, &phi1);
        v.iter_mut().zip(&phi1).for_each(|(a, b)| *a -= c * b);
    };
    let op = SpdOperator {
        stencil: &stencil,
        shift: 0.0,
        c: None,
    };
    let width = BLOCK.min(len - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0005_eed2);
    let mut basis: Vec<Vec<f64>> = (0..width)
        .map(|_| {
            let mut v: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            deflate(&mut v);
            v
        })
        .collect();
    orthonormalize(&mut basis);
    let res_tol = tol.sqrt().max(1e-9);
    let mut prev = f64::INFINITY;
    let mut ax = vec![0.0; len];
    for _ in 0..MAX_SWEEPS {
        let mut next = Vec::with_capacity(basis.len());
        for x in &basis {
            let (mut y, _) = cg_solve(&op, x, None, INNER_TOL)?;
            deflate(&mut y);
            next.push(y);
        }
        orthonormalize(&mut next);
        if next.is_empty() {
            return Err(Error::Unsupported("second eigenvalue: mask has a single mode".into()));
        }
        let k = next.len();
        let images: Vec<Vec<f64>> = next
            .iter()
            .map(|y| {
                let mut out = vec![0.0; len];
                stencil.apply(y, &mut out);
                out
            })
            .collect();
        let h = nalgebra::DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&next[i], &images[j]) + dot(&next[j], &images[i])));
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        basis = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; len];
                for (i, y) in next.iter().enumerate() {
                    let w = eig.eigenvectors[(i, c)];
                    v.iter_mut().zip(y).for_each(|(a, b)| *a += w * b);
                }
                v
            })
            .collect();
        let theta = eig.eigenvalues[order[0]];
        stencil.apply(&basis[0], &mut ax);
        let residual = ax
            .iter()
            .zip(&basis[0])
            .map(|(a, v)| (a - theta * v).powi(2))
            .sum::<f64>()
            .sqrt()
            / theta;
        let shift = (theta - prev).abs() / theta;
        prev = theta;
        if shift <= tol && residual <= res_tol {
            return Ok(to_eigenpair(grid, &stencil, m, theta, &basis[0]));
        }
    }
    Err(Error::NoConvergence {
        what: "block inverse iteration",
        iterations: MAX_SWEEPS,
        residual: prev,
    })
}

pub fn second_eigenvalue(grid: &Grid, m: &Mask, tol: f64) -> Result<f64> {
    Ok(second_eigenpair(grid, m, tol)?.value)
}

/// `λ₁` of a possibly disconnected mask: the minimum over its components.
pub fn lambda1_of_mask(grid: &Grid, m: &Mask, tol: f64) -> Result<f64> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut best = f64::INFINITY;
    for comp in grid.components(m) {
        best = best.min(principal_eigenpair(grid, &comp, tol)?.value);
    }
    Ok(best)
}

/// Principal eigenpair of the component of `m` with the smallest eigenvalue.
pub fn principal_of_components(grid: &Grid, m: &Mask, tol: f64) -> Result<EigenPair> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut best: Option<EigenPair> = None;
    for comp in grid.components(m) {
        let pair = principal_eigenpair(grid, &comp, tol)?;
        if best.as_ref().is_none_or(|b| pair.value < b.value) {
            best = Some(pair);
        }
    }
    best.ok_or(Error::EmptyMask)
}

/// Default dilation schedule `{8, 6, 4, 3, 2}·h`.
///
/// Neighborhoods stay close to `K`, so few of them reach `∂Ω` and the
/// extrapolation sees genuine dilations.
pub fn default_deltas(grid: &Grid) -> Vec<f64> {
    [8.0, 6.0, 4.0, 3.0, 2.0].iter().map(|k| k * grid.h).collect()
}

/// `λ₀(K)` from the neighborhoods `{d(·, K) ≤ δ}`.
///
/// Each value is `λ₁` of a neighborhood; the limit is extrapolated by a
/// least-squares line in `λ^{-1/2}` against `δ`, which is exact for balls
/// and first-order accurate for sets with smooth boundary. An extrapolated
/// `λ^{-1/2}` at or below `cap^{-1/2}` means the values diverge.
pub fn lambda0_of_set(grid: &Grid, k: &SetShape, deltas: &[f64], cap: f64) -> Result<Lambda0Estimate> {
    if k.is_empty() {
        return Err(Error::Unsupported("lambda0 of the empty set".into()));
    }
    lambda0_by(grid, deltas, cap, |d| grid.mask_within(k, d))
}

/// `λ₀` of a node set, with neighborhoods obtained by dilating the mask.
///
/// An empty mask stands for the empty set, whose `λ₀` is infinite.
pub fn lambda0_of_mask(grid: &Grid, m: &Mask, deltas: &[f64], cap: f64) -> Result<Lambda0Estimate> {
    if m.is_empty() {
        check_deltas(grid, deltas)?;
        return Ok(Lambda0Estimate {
            deltas: Vec::new(),
            values: Vec::new(),
            verdict: Lambda0Verdict::Infinite,
        });
    }
    lambda0_by(grid, deltas, cap, |d| grid.dilate_mask(m, d))
}

fn check_deltas(grid: &Grid, deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Unsupported("deltas must be strictly decreasing".into()));
    }
    let smallest = deltas[deltas.len() - 1];
    if smallest < 2.0 * grid.h * (1.0 - 1e-9) {
        return Err(Error::Unsupported(format!(
            "smallest delta {smallest} is below twice the mesh width {}",
            grid.h
        )));
    }
    Ok(())
}

fn lambda0_by(
    grid: &Grid,
    deltas: &[f64],
    cap: f64,
    neighborhood: impl Fn(f64) -> Mask,
) -> Result<Lambda0Estimate> {
    check_deltas(grid, deltas)?;
    let outer = grid.boundary_adjacent(&grid.mask);
    let mut values = Vec::with_capacity(deltas.len());
    let mut used = Vec::with_capacity(deltas.len());
    let mut clipped = Vec::with_capacity(deltas.len());
    let mut prev: Option<(Mask, f64)> = None;
    for &d in deltas {
        let m = neighborhood(d);
        let value = match &prev {
            Some((pm, pv)) if *pm == m => *pv,
            _ => lambda1_of_mask(grid, &m, DEFAULT_EIGEN_TOL)?,
        };
        clipped.push(outer.iter().any(|&k| m.get(k)));
        values.push(value);
        used.push(d);
        prev = Some((m, value));
        if value > cap {
            break;
        }
    }
    let last = values[values.len() - 1];
    let verdict = if last > cap {
        Lambda0Verdict::Infinite
    } else {
        // neighborhoods cut off by ∂Ω are not dilations; keep them out of the
        // fit while at least two unclipped ones remain, else fit the two
        // smallest, which are cut the least
        let free: Vec<usize> = (0..values.len()).filter(|&i| !clipped[i]).collect();
        let pick: Vec<usize> = if free.len() >= 2 {
            free
        } else {
            (values.len().saturating_sub(2)..values.len()).collect()
        };
        let (fd, fv): (Vec<f64>, Vec<f64>) = pick.iter().map(|&i| (used[i], values[i])).unzip();
        let ell0 = extrapolate_inverse_sqrt(&fd, &fv);
        if ell0 <= cap.powf(-0.5) {
            Lambda0Verdict::Infinite
        } else {
            Lambda0Verdict::Finite(ell0.powi(-2))
        }
    };
    Ok(Lambda0Estimate {
        deltas: used,
        values,
        verdict,
    })
}

/// Intercept at `δ = 0` of the least-squares line through `(δ, λ^{-1/2})`.
fn extrapolate_inverse_sqrt(deltas: &[f64], values: &[f64]) -> f64 {
    let ell: Vec<f64> = values.iter().map(|v| v.powf(-0.5)).collect();
    let n = deltas.len() as f64;
    if deltas.len() < 2 {
        return ell[0];
    }
    let mx = deltas.iter().sum::<f64>() / n;
    let my = ell.iter().sum::<f64>() / n;
    let sxx: f64 = deltas.iter().map(|d| (d - mx).powi(2)).sum();
    let sxy: f64 = deltas.iter().zip(&ell).map(|(d, l)| (d - mx) * (l - my)).sum();
    if sxx == 0.0 {
        return my;
    }
    my - sxy / sxx * mx
}

/// `J₀(x)` by its power series; accurate to machine precision for `|x| ≤ 8`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// First positive zero of `J₀` by bisection on `[2, 3]`.
pub fn j0_first_zero() -> f64 {
    let (mut a, mut b) = (2.0_f64, 3.0_f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if bessel_j0(a) * bessel_j0(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

pub fn analytic_lambda1_domain(domain: &DomainSpec) -> f64 {
    match *domain {
        DomainSpec::Interval { lo, hi } => (PI / (hi - lo)).powi(2),
        DomainSpec::Rectangle { lo, hi } => {
            PI * PI * ((hi.x - lo.x).powi(-2) + (hi.y - lo.y).powi(-2))
        }
        DomainSpec::Disc { radius, .. } => (j0_first_zero() / radius).powi(2),
    }
}

/// Closed-form `λ₁` for a ball in dimension `dim`.
pub fn analytic_lambda1_set(shape: &SetShape, dim: usize) -> Result<f64> {
    match (shape, dim) {
        (SetShape::Ball { radius, .. }, 1) if *radius > 0.0 => Ok(PI * PI / (4.0 * radius * radius)),
        (SetShape::Ball { radius, .. }, 2) if *radius > 0.0 => Ok((j0_first_zero() / radius).powi(2)),
        _ => Err(Error::Unsupported(format!(
            "no closed-form eigenvalue for {shape:?} in dimension {dim}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    #[test]
    fn j0_zero_matches_integral_representation() {
        // J0(x) = (1/π) ∫_0^π cos(x sin θ) dθ, composite Simpson
        let j0 = |x: f64| {
            let n = 2000;
            let h = PI / n as f64;
            let mut s = 0.0;
            for k in 0..=n {
                let w = if k == 0 || k == n {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s += w * (x * (k as f64 * h).sin()).cos();
            }
            s * h / 3.0 / PI
        };
        let z = j0_first_zero();
        assert!(j0(z).abs() < 1e-12);
        assert!((z - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((analytic_lambda1_domain(&DomainSpec::Disc {
            center: Point::default(),
            radius: 1.0
        }) - 5.783_185_962_946_784)
            .abs()
            < 1e-10);
    }

    #[test]
    fn analytic_values() {
        let sq = DomainSpec::unit_square();
        assert!((analytic_lambda1_domain(&sq) - 2.0 * PI * PI).abs() < 1e-12);
        let rect = DomainSpec::Rectangle {
            lo: Point::default(),
            hi: Point::new(1.0, 2.0),
        };
        assert!((analytic_lambda1_domain(&rect) - 12.337_005_501_361_698).abs() < 1e-9);
        let b = SetShape::ball(Point::default(), 0.5);
        assert!((analytic_lambda1_set(&b, 1).unwrap() - PI * PI).abs() < 1e-12);
        assert!(analytic_lambda1_set(&SetShape::Empty, 2).is_err());
    }

    #[test]
    fn square_first_two_eigenvalues_match_discrete_formula() {
        let g = Grid::new(DomainSpec::unit_square(), 24).unwrap();
        let h = g.h;
        let mode = |k: f64| 4.0 / (h * h) * (k * PI * h / 2.0).sin().powi(2);
        let p = principal_eigenpair(&g, &g.mask, 1e-12).unwrap();
        assert!((p.value - 2.0 * mode(1.0)).abs() < 1e-8 * p.value);
        assert!((p.vector.l2_norm() - 1.0).abs() < 1e-12);
        assert!(g.mask.indices().all(|i| p.vector.values[i] > 0.0));
        let l2 = second_eigenvalue(&g, &g.mask, 1e-12).unwrap();
        assert!((l2 - mode(1.0) - mode(2.0)).abs() < 1e-6 * l2);
    }

    #[test]
    fn disconnected_mask_rejected() {
        let g = Grid::new(DomainSpec::unit_square(), 32).unwrap();
        let s = SetShape::Union(vec![
            SetShape::ball(Point::new(0.25, 0.5), 0.1),
            SetShape::ball(Point::new(0.75, 0.5), 0.1),
        ]);
        let m = g.mask_from_shape(&s);
        assert!(matches!(
            principal_eigenpair(&g, &m, 1e-10),
            Err(Error::DisconnectedMask { components: 2 })
        ));
        let single = g.mask_from_shape(&SetShape::ball(Point::new(0.25, 0.5), 0.1));
        let lam = lambda1_of_mask(&g, &m, 1e-10).unwrap();
        let lam_single = principal_eigenpair(&g, &single, 1e-10).unwrap().value;
        assert!((lam - lam_single).abs() < 1e-8 * lam);
    }

    #[test]
    fn extrapolation_is_exact_for_linear_inverse_sqrt() {
        let deltas = [0.4, 0.2, 0.1];
        let values: Vec<f64> = deltas.iter().map(|d| (0.5_f64 + 2.0 * d).powi(-2)).collect();
        assert!((extrapolate_inverse_sqrt(&deltas, &values) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn lambda0_rejects_bad_schedules() {
        let g = Grid::new(DomainSpec::unit_square(), 32).unwrap();
        let b = SetShape::ball(Point::new(0.5, 0.5), 0.2);
        assert!(lambda0_of_set(&g, &b, &[0.1, 0.2], 1e4).is_err());
        assert!(lambda0_of_set(&g, &b, &[0.1, g.h], 1e4).is_err());
        assert!(lambda0_of_set(&g, &SetShape::Empty, &[0.1], 1e4).is_err());
    }
}
