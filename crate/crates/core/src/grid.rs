//! Node-centered Cartesian discretization of Ω.
//!
//! Nodes sit at `lo + (i+1)h` inside the bounding box of the domain; a node
//! belongs to the grid mask iff it lies in the open domain. Every field is
//! stored as a full box array and is zero off its mask, which encodes the
//! homogeneous Dirichlet condition. Linear algebra runs on compressed vectors
//! indexed by the active nodes of a [`Stencil`].

use std::collections::VecDeque;

use crate::error::{ConfigError, Error, Result};
use crate::geometry::{DomainSpec, Point, SetShape};

/// Sentinel for a missing neighbor in a [`Stencil`].
pub const NONE: u32 = u32::MAX;

/// Boolean flag per box node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn empty(grid: &Grid) -> Self {
        Mask {
            width: grid.width,
            height: grid.height,
            bits: vec![false; grid.width * grid.height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height);
        Mask {
            width,
            height,
            bits,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn get(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub fn set(&mut self, idx: usize, v: bool) {
        self.bits[idx] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn union_with(&mut self, other: &Mask) {
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Mask) {
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Scalar grid function stored on the full node box.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub width: usize,
    pub height: usize,
    pub h: f64,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Field {
            width: grid.width,
            height: grid.height,
            h: grid.h,
            dim: grid.dim(),
            values: vec![0.0; grid.width * grid.height],
        }
    }

    /// Samples `f` on the nodes of `mask`, zero elsewhere.
    pub fn from_fn(grid: &Grid, mask: &Mask, f: impl Fn(Point) -> f64) -> Self {
        let mut out = Field::zeros(grid);
        for idx in mask.indices() {
            out.values[idx] = f(grid.node_point(idx));
        }
        out
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Discrete `L²` norm with nodal quadrature.
    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Discrete `L²` inner product.
    pub fn dot(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.cell_volume()
    }

    pub fn scaled(&self, s: f64) -> Field {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Zeroes every value off `mask`.
    pub fn restricted(&self, mask: &Mask) -> Field {
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if !mask.get(i) {
                *v = 0.0;
            }
        }
        out
    }

    pub fn min_on(&self, mask: &Mask) -> f64 {
        mask.indices()
            .map(|i| self.values[i])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_on(&self, mask: &Mask) -> f64 {
        mask.indices()
            .map(|i| self.values[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Compressed 5-point (3-point in 1D) negative Laplacian on a mask.
#[derive(Debug, Clone)]
pub struct Stencil {
    /// Box index of each active node, in row-major order.
    pub nodes: Vec<usize>,
    nbrs: Vec<[u32; 4]>,
    inv_h2: f64,
    diag: f64,
}

impl Stencil {
    pub fn new(grid: &Grid, mask: &Mask) -> Self {
        let mut slot = vec![NONE; mask.len()];
        let nodes: Vec<usize> = mask.indices().collect();
        for (k, &idx) in nodes.iter().enumerate() {
            slot[idx] = k as u32;
        }
        let nbrs = nodes
            .iter()
            .map(|&idx| {
                let mut out = [NONE; 4];
                for (d, nb) in grid.neighbors(idx).iter().enumerate() {
                    if let Some(j) = nb {
                        out[d] = slot[*j];
                    }
                }
                out
            })
            .collect();
        let inv_h2 = 1.0 / (grid.h * grid.h);
        Stencil {
            nodes,
            nbrs,
            inv_h2,
            diag: 2.0 * grid.dim() as f64 * inv_h2,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Diagonal entry of `-Δ_h`.
    pub fn diag(&self) -> f64 {
        self.diag
    }

    /// `y = -Δ_h x` with zero Dirichlet data off the mask.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (k, nb) in self.nbrs.iter().enumerate() {
            let mut s = 0.0;
            for &j in nb {
                if j != NONE {
                    s += x[j as usize];
                }
            }
            y[k] = self.diag * x[k] - self.inv_h2 * s;
        }
    }

    /// Number of in-mask neighbors of active node `k`.
    pub fn degree(&self, k: usize) -> usize {
        self.nbrs[k].iter().filter(|&&j| j != NONE).count()
    }

    pub fn gather(&self, f: &Field) -> Vec<f64> {
        self.nodes.iter().map(|&i| f.values[i]).collect()
    }

    pub fn scatter(&self, grid: &Grid, x: &[f64]) -> Field {
        let mut out = Field::zeros(grid);
        for (k, &i) in self.nodes.iter().enumerate() {
            out.values[i] = x[k];
        }
        out
    }
}

/// The operator `shift·I − Δ_h + diag(c)` on the nodes of a stencil.
#[derive(Debug, Clone, Copy)]
pub struct SpdOperator<'a> {
    pub stencil: &'a Stencil,
    pub shift: f64,
    pub c: Option<&'a [f64]>,
}

impl SpdOperator<'_> {
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.stencil.apply(x, y);
        for k in 0..y.len() {
            let c = self.c.map_or(0.0, |c| c[k]);
            y[k] += (self.shift + c) * x[k];
        }
    }

    fn diagonal(&self, k: usize) -> f64 {
        self.stencil.diag + self.shift + self.c.map_or(0.0, |c| c[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
}

pub const DEFAULT_SOLVE_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients.
pub fn cg_solve(
    op: &SpdOperator<'_>,
    rhs: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = rhs.len();
    let bnorm = dot(rhs, rhs).sqrt();
    if bnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let max_iter = 10_000 + 4 * n;
    let inv_diag: Vec<f64> = (0..n).map(|k| 1.0 / op.diagonal(k)).collect();
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut ax = vec![0.0; n];
    op.apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut rnorm = dot(&r, &r).sqrt();
    let mut it = 0;
    while rnorm > tol * bnorm {
        if it == max_iter || !rnorm.is_finite() {
            return Err(Error::NoConvergence {
                what: "conjugate gradient solve",
                iterations: it,
                residual: rnorm / bnorm,
            });
        }
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(Error::NoConvergence {
                what: "conjugate gradient solve (operator not positive definite)",
                iterations: it,
                residual: rnorm / bnorm,
            });
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        // periodic true-residual refresh limits drift at tight tolerances
        if (it + 1) % 200 == 0 {
            op.apply(&x, &mut ax);
            for k in 0..n {
                r[k] = rhs[k] - ax[k];
            }
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        rnorm = dot(&r, &r).sqrt();
        it += 1;
    }
    Ok((
        x,
        SolveStats {
            iterations: it,
            residual: rnorm / bnorm,
        },
    ))
}

/// Solves `(shift·I − Δ_h + diag(c)) x = rhs` on `mask`.
pub fn solve_spd(
    grid: &Grid,
    mask: &Mask,
    shift: f64,
    c: Option<&Field>,
    rhs: &Field,
    tol: f64,
) -> Result<Field> {
    let stencil = Stencil::new(grid, mask);
    let c = c.map(|c| stencil.gather(c));
    let op = SpdOperator {
        stencil: &stencil,
        shift,
        c: c.as_deref(),
    };
    let (x, _) = cg_solve(&op, &stencil.gather(rhs), None, tol)?;
    Ok(stencil.scatter(grid, &x))
}

/// Uniform grid over the bounding box of a domain.
#[derive(Debug, Clone)]
pub struct Grid {
    pub domain: DomainSpec,
    /// Cells along the shortest side.
    pub n: usize,
    pub h: f64,
    /// Nodes along x.
    pub width: usize,
    /// Nodes along y (1 in one dimension).
    pub height: usize,
    origin: Point,
    pub mask: Mask,
    stencil: Stencil,
}

impl Grid {
    pub fn new(domain: DomainSpec, n: usize) -> Result<Self> {
        domain.validate()?;
        if n < 2 {
            return Err(ConfigError::invariant("domain", "resolution must be >= 2").into());
        }
        let (lo, hi) = domain.bounding_box();
        let (h, width, height) = match domain {
            DomainSpec::Interval { .. } => {
                let h = (hi.x - lo.x) / n as f64;
                (h, n - 1, 1)
            }
            _ => {
                let wx = hi.x - lo.x;
                let wy = hi.y - lo.y;
                let h = wx.min(wy) / n as f64;
                let cells = |w: f64| ((w / h) - 1e-9).ceil() as usize;
                (h, cells(wx) - 1, cells(wy) - 1)
            }
        };
        let origin = if domain.dim() == 1 {
            Point::on_line(lo.x + h)
        } else {
            Point::new(lo.x + h, lo.y + h)
        };
        let mut grid = Grid {
            domain,
            n,
            h,
            width,
            height,
            origin,
            mask: Mask {
                width,
                height,
                bits: Vec::new(),
            },
            stencil: Stencil {
                nodes: Vec::new(),
                nbrs: Vec::new(),
                inv_h2: 0.0,
                diag: 0.0,
            },
        };
        let bits = (0..width * height)
            .map(|idx| grid.domain.contains(grid.node_point(idx)))
            .collect();
        grid.mask = Mask::from_bits(width, height, bits);
        if grid.mask.is_empty() {
            return Err(ConfigError::invariant("domain", "grid has no interior nodes").into());
        }
        grid.stencil = Stencil::new(&grid, &grid.mask);
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn node_point(&self, idx: usize) -> Point {
        let (i, j) = self.coords(idx);
        if self.dim() == 1 {
            Point::on_line(self.origin.x + i as f64 * self.h)
        } else {
            Point::new(
                self.origin.x + i as f64 * self.h,
                self.origin.y + j as f64 * self.h,
            )
        }
    }

    /// Nearest node to `p` (clamped to the box).
    pub fn nearest_node(&self, p: Point) -> usize {
        let fi = ((p.x - self.origin.x) / self.h).round();
        let i = fi.clamp(0.0, (self.width - 1) as f64) as usize;
        let j = if self.dim() == 1 {
            0
        } else {
            let fj = ((p.y - self.origin.y) / self.h).round();
            fj.clamp(0.0, (self.height - 1) as f64) as usize
        };
        self.index(i, j)
    }

    /// Box neighbors in the order west, east, south, north.
    pub fn neighbors(&self, idx: usize) -> [Option<usize>; 4] {
        let (i, j) = self.coords(idx);
        let mut out = [None; 4];
        if i > 0 {
            out[0] = Some(idx - 1);
        }
        if i + 1 < self.width {
            out[1] = Some(idx + 1);
        }
        if self.dim() == 2 {
            if j > 0 {
                out[2] = Some(idx - self.width);
            }
            if j + 1 < self.height {
                out[3] = Some(idx + self.width);
            }
        }
        out
    }

    /// Stencil on the full grid mask.
    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    /// `-Δ_h f` on the grid mask.
    pub fn neg_laplacian(&self, f: &Field) -> Field {
        let x = self.stencil.gather(f);
        let mut y = vec![0.0; x.len()];
        self.stencil.apply(&x, &mut y);
        self.stencil.scatter(self, &y)
    }

    /// `Δ_h f` on the grid mask.
    pub fn laplacian(&self, f: &Field) -> Field {
        self.neg_laplacian(f).scaled(-1.0)
    }

    /// Grid nodes lying in the closed set `s`.
    pub fn mask_from_shape(&self, s: &SetShape) -> Mask {
        self.mask_within(s, 0.0)
    }

    /// Grid nodes at distance at most `delta` from the set `s`.
    pub fn mask_within(&self, s: &SetShape, delta: f64) -> Mask {
        let eps = 1e-9 * self.h;
        let bits = (0..self.len())
            .map(|idx| {
                self.mask.get(idx)
                    && s.distance(self.node_point(idx))
                        .is_some_and(|d| d <= delta + eps)
            })
            .collect();
        Mask::from_bits(self.width, self.height, bits)
    }

    /// Grid nodes within Euclidean distance `delta` of a node of `m`.
    pub fn dilate_mask(&self, m: &Mask, delta: f64) -> Mask {
        let mut out = m.clone();
        if delta <= 0.0 {
            return out;
        }
        let reach = (delta / self.h + 1e-9).floor() as i64;
        let r2 = (delta / self.h) * (delta / self.h) + 1e-9;
        let jr = if self.dim() == 1 { 0 } else { reach };
        let mut offsets = Vec::new();
        for dj in -jr..=jr {
            for di in -reach..=reach {
                if (di * di + dj * dj) as f64 <= r2 {
                    offsets.push((di, dj));
                }
            }
        }
        for idx in m.indices() {
            // interior nodes of m add nothing beyond their boundary neighbors
            if self.neighbors(idx).iter().all(|nb| nb.is_some_and(|j| m.get(j)))
                && self.dim() == 2
                && reach > 0
            {
                continue;
            }
            let (i, j) = self.coords(idx);
            for &(di, dj) in &offsets {
                let ii = i as i64 + di;
                let jj = j as i64 + dj;
                if ii < 0 || jj < 0 || ii >= self.width as i64 || jj >= self.height as i64 {
                    continue;
                }
                let k = self.index(ii as usize, jj as usize);
                if self.mask.get(k) {
                    out.set(k, true);
                }
            }
        }
        out
    }

    /// Connected components of `m` under nearest-neighbor adjacency.
    pub fn components(&self, m: &Mask) -> Vec<Mask> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in m.indices() {
            if seen[start] {
                continue;
            }
            let mut comp = Mask::empty(self);
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(k) = queue.pop_front() {
                comp.set(k, true);
                for nb in self.neighbors(k).into_iter().flatten() {
                    if m.get(nb) && !seen[nb] {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self, m: &Mask) -> bool {
        self.components(m).len() == 1
    }

    /// Nodes of `m` with at least one nearest neighbor outside `m`.
    pub fn boundary_adjacent(&self, m: &Mask) -> Vec<usize> {
        m.indices()
            .filter(|&idx| {
                let nbs = self.neighbors(idx);
                let expected = if self.dim() == 1 { 2 } else { 4 };
                let inside = nbs.iter().flatten().filter(|&&j| m.get(j)).count();
                inside < expected
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square(n: usize) -> Grid {
        Grid::new(DomainSpec::unit_square(), n).unwrap()
    }

    #[test]
    fn counts_interior_nodes() {
        let g = unit_square(4);
        assert_eq!(g.mask.count(), 9);
        assert!((g.h - 0.25).abs() < 1e-15);
        let p = g.node_point(g.index(0, 0));
        assert!((p.x - 0.25).abs() < 1e-15 && (p.y - 0.25).abs() < 1e-15);
    }

    #[test]
    fn disc_mask_has_dihedral_symmetry() {
        let g = Grid::new(
            DomainSpec::Disc {
                center: Point::default(),
                radius: 1.0,
            },
            8,
        )
        .unwrap();
        let w = g.width;
        let at = |i: usize, j: usize| g.mask.get(g.index(i, j));
        for j in 0..w {
            for i in 0..w {
                let v = at(i, j);
                assert_eq!(v, at(w - 1 - i, j));
                assert_eq!(v, at(i, w - 1 - j));
                assert_eq!(v, at(j, i));
            }
        }
    }

    #[test]
    fn deterministic_masks() {
        let a = unit_square(17);
        let b = unit_square(17);
        assert_eq!(a.mask, b.mask);
    }

    #[test]
    fn constant_annihilated_at_interior_node() {
        let g = unit_square(16);
        let f = Field::from_fn(&g, &g.mask, |_| 1.0);
        let lf = g.neg_laplacian(&f);
        assert_eq!(lf.values[g.index(7, 7)], 0.0);
    }

    #[test]
    fn sine_is_discrete_eigenfunction() {
        let n = 32;
        let g = unit_square(n);
        let f = Field::from_fn(&g, &g.mask, |p| (PI * p.x).sin() * (PI * p.y).sin());
        let lam = 2.0 * 4.0 / (g.h * g.h) * (PI * g.h / 2.0).sin().powi(2);
        let lf = g.neg_laplacian(&f);
        for idx in g.mask.indices() {
            assert!((lf.values[idx] - lam * f.values[idx]).abs() < 1e-12 * lam);
        }
    }

    #[test]
    fn one_dimensional_stencil() {
        let g = Grid::new(DomainSpec::Interval { lo: 0.0, hi: 4.0 }, 4).unwrap();
        assert_eq!(g.mask.count(), 3);
        let mut f = Field::zeros(&g);
        f.values[1] = 1.0;
        let lf = g.neg_laplacian(&f);
        assert_eq!(lf.values[1], 2.0);
        assert_eq!(lf.values[0], -1.0);
    }

    #[test]
    fn solve_zero_rhs() {
        let g = unit_square(8);
        let rhs = Field::zeros(&g);
        let x = solve_spd(&g, &g.mask, 1.0, None, &rhs, 1e-10).unwrap();
        assert!(x.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solve_recovers_eigenfunction() {
        let g = unit_square(24);
        let sine = Field::from_fn(&g, &g.mask, |p| (PI * p.x).sin() * (PI * p.y).sin());
        let lam = 8.0 / (g.h * g.h) * (PI * g.h / 2.0).sin().powi(2);
        let rhs = sine.scaled(1.0 + lam);
        let x = solve_spd(&g, &g.mask, 1.0, None, &rhs, 1e-12).unwrap();
        for idx in g.mask.indices() {
            assert!((x.values[idx] - sine.values[idx]).abs() < 1e-9);
        }
    }

    #[test]
    fn dilation_by_zero_is_identity() {
        let g = unit_square(32);
        let m = g.mask_from_shape(&SetShape::ball(Point::new(0.5, 0.5), 0.2));
        assert_eq!(g.dilate_mask(&m, 0.0), m);
    }

    #[test]
    fn components_of_two_balls() {
        let g = unit_square(32);
        let s = SetShape::Union(vec![
            SetShape::ball(Point::new(0.25, 0.5), 0.1),
            SetShape::ball(Point::new(0.75, 0.5), 0.1),
        ]);
        let m = g.mask_from_shape(&s);
        assert_eq!(g.components(&m).len(), 2);
        assert!(g.is_connected(&g.mask));
    }
}
