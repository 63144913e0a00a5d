//! Discrete certification that separately convex, homogeneous functions are
//! bounded below, and the ℝ⁴ example.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::solve;
use crate::field::fd_weights;
use crate::lp::{solve_max, LpProblem, SimplexOptions};
use crate::{Error, Rational, Result};

/// Lattice points on the ℓ∞-spheres of radii `ρ^m`, `m = −M..=M`, plus the
/// origin, stored as integers in units of `1/(h·ρ^M)` with `h = (n−1)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousGrid {
    d: usize,
    n: usize,
    layers: usize,
    rho: i64,
    nodes: Vec<Vec<i64>>,
    layer: Vec<Option<i32>>,
    index: BTreeMap<Vec<i64>, usize>,
}

impl HomogeneousGrid {
    pub fn new(d: usize, n: usize, layers: usize, rho: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if n < 3 || n % 2 == 0 {
            return Err(Error::Config(format!("resolution must be odd and >= 3, got {n}")));
        }
        if rho < 2 {
            return Err(Error::Config(format!("layer ratio must be >= 2, got {rho}")));
        }
        let h = ((n - 1) / 2) as i64;
        let mut nodes = vec![vec![0i64; d]];
        let mut layer = vec![None];
        let mut c = vec![-h; d];
        for m in -(layers as i32)..=(layers as i32) {
            let scale = rho.pow((m + layers as i32) as u32);
            c.iter_mut().for_each(|v| *v = -h);
            loop {
                if c.iter().any(|v| v.abs() == h) {
                    nodes.push(c.iter().map(|v| v * scale).collect());
                    layer.push(Some(m));
                }
                let mut k = 0;
                while k < d {
                    c[k] += 1;
                    if c[k] <= h {
                        break;
                    }
                    c[k] = -h;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
        let index = nodes.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        Ok(HomogeneousGrid { d, n, layers, rho, nodes, layer, index })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn rho(&self) -> i64 {
        self.rho
    }

    /// Integer length of the unit: real coordinates are `node / unit`.
    pub fn unit(&self) -> i64 {
        ((self.n - 1) / 2) as i64 * self.rho.pow(self.layers as u32)
    }

    pub fn nodes(&self) -> &[Vec<i64>] {
        &self.nodes
    }

    pub fn layer(&self, i: usize) -> Option<i32> {
        self.layer[i]
    }

    pub fn find(&self, x: &[i64]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn coords(&self, i: usize) -> Vec<f64> {
        let u = self.unit() as f64;
        self.nodes[i].iter().map(|&v| v as f64 / u).collect()
    }

    pub fn sup_norm(&self, i: usize) -> f64 {
        self.nodes[i].iter().map(|v| v.abs()).max().unwrap_or(0) as f64 / self.unit() as f64
    }
}

/// Three consecutive collinear nodes along `axis`; convexity reads
/// `F(mid) ≤ w_lo·F(lo) + w_hi·F(hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub axis: usize,
    pub nodes: [usize; 3],
    pub weights: [Rational; 2],
}

/// Minimize `F` at a chosen node over separately convex, even,
/// `p`-homogeneous `F` with `F ≤ ‖x‖_∞^p` and `F(0) = 0`.
#[derive(Clone, Debug)]
pub struct SepConvexProgram {
    grid: HomogeneousGrid,
    p: f64,
    triples: Vec<Triple>,
    reps: Vec<Vec<i64>>,
    /// Per node: representative index and layer `m`, `None` at the origin.
    node_rep: Vec<Option<(usize, i32)>>,
    target: usize,
}

impl SepConvexProgram {
    /// The objective node defaults to `e₁` on the unit sphere.
    pub fn new(grid: HomogeneousGrid, p: f64) -> Result<Self> {
        let mut e1 = vec![0i64; grid.d];
        e1[0] = grid.unit();
        Self::with_target(grid, p, &e1)
    }

    pub fn with_target(grid: HomogeneousGrid, p: f64, target: &[i64]) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("homogeneity order must be >= 1, got {p}")));
        }
        let mut triples = Vec::new();
        for axis in 0..grid.d {
            let mut lines: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
            for (i, x) in grid.nodes.iter().enumerate() {
                let mut key = x.clone();
                key.remove(axis);
                lines.entry(key).or_default().push(i);
            }
            for pts in lines.values_mut() {
                pts.sort_by_key(|&i| grid.nodes[i][axis]);
                for w in pts.windows(3) {
                    let (a, b, c) = (grid.nodes[w[0]][axis], grid.nodes[w[1]][axis], grid.nodes[w[2]][axis]);
                    let span = Rational::from_integer((c - a).into());
                    let weights = [
                        Rational::from_integer((c - b).into()) / span.clone(),
                        Rational::from_integer((b - a).into()) / span,
                    ];
                    triples.push(Triple { axis, nodes: [w[0], w[1], w[2]], weights });
                }
            }
        }
        let base = grid.rho.pow(grid.layers as u32);
        let mut rep_index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
        let mut reps = Vec::new();
        let mut node_rep = Vec::with_capacity(grid.nodes.len());
        for (i, x) in grid.nodes.iter().enumerate() {
            let Some(m) = grid.layer[i] else {
                node_rep.push(None);
                continue;
            };
            let scale = grid.rho.pow((m + grid.layers as i32) as u32);
            let y: Vec<i64> = x.iter().map(|v| v / scale * base).collect();
            let neg: Vec<i64> = y.iter().map(|v| -v).collect();
            let y = if neg > y { neg } else { y };
            let next = reps.len();
            let r = *rep_index.entry(y.clone()).or_insert(next);
            if r == next {
                reps.push(y);
            }
            node_rep.push(Some((r, m)));
        }
        let t = grid.find(target).ok_or_else(|| Error::Config("objective node is not a grid node".into()))?;
        let target = node_rep[t].ok_or_else(|| Error::Config("objective node must differ from the origin".into()))?.0;
        Ok(SepConvexProgram { grid, p, triples, reps, node_rep, target })
    }

    pub fn grid(&self) -> &HomogeneousGrid {
        &self.grid
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Orbit representatives on the unit sphere (one per `±` pair).
    pub fn representatives(&self) -> &[Vec<i64>] {
        &self.reps
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Node index of the objective representative.
    pub fn target_node(&self) -> usize {
        self.grid.find(&self.reps[self.target]).expect("representatives are nodes")
    }

    /// Pairs `(x, ρx)` of nodes linked by homogeneity.
    pub fn homogeneity_links(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, x) in self.grid.nodes.iter().enumerate() {
            if self.grid.layer[i].is_none() {
                continue;
            }
            let y: Vec<i64> = x.iter().map(|v| v * self.grid.rho).collect();
            if let Some(j) = self.grid.find(&y) {
                out.push((i, j));
            }
        }
        out
    }

    /// Pairs `(x, −x)` with `x` lexicographically larger.
    pub fn evenness_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, x) in self.grid.nodes.iter().enumerate() {
            let neg: Vec<i64> = x.iter().map(|v| -v).collect();
            if *x > neg {
                if let Some(j) = self.grid.find(&neg) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn layer_factor(&self, m: i32) -> f64 {
        (self.grid.rho as f64).powf(m as f64 * self.p)
    }

    fn layer_factor_exact(&self, m: i32) -> Option<Rational> {
        if self.p.fract() != 0.0 || self.p > 64.0 {
            return None;
        }
        let e = m * self.p as i32;
        let r = Rational::from_integer(self.grid.rho.into());
        Some(if e >= 0 { r.pow(e) } else { Rational::one() / r.pow(-e) })
    }

    /// `F` at every node from values at the representatives.
    pub fn extend(&self, rep_values: &[f64]) -> Vec<f64> {
        self.node_rep
            .iter()
            .map(|r| match r {
                None => 0.0,
                Some((k, m)) => self.layer_factor(*m) * rep_values[*k],
            })
            .collect()
    }

    /// Largest violation of convexity and normalization by a node function.
    pub fn violation(&self, node_values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for tr in &self.triples {
            let [a, b, c] = tr.nodes;
            let wa = tr.weights[0].to_f64().unwrap_or(f64::NAN);
            let wc = tr.weights[1].to_f64().unwrap_or(f64::NAN);
            worst = worst.max(node_values[b] - wa * node_values[a] - wc * node_values[c]);
        }
        for (i, v) in node_values.iter().enumerate() {
            worst = worst.max(v - self.grid.sup_norm(i).powf(self.p));
        }
        worst
    }

    /// Convexity rows over the representatives: `Σ_k g_k F_k ≥ 0`, deduplicated.
    fn reduced_rows(&self) -> (Vec<Vec<f64>>, Option<Vec<BTreeMap<usize, Rational>>>) {
        let exact = self.layer_factor_exact(0).is_some();
        let mut seen: BTreeMap<Vec<(usize, i64)>, ()> = BTreeMap::new();
        let mut rows = Vec::new();
        let mut exact_rows = Vec::new();
        for tr in &self.triples {
            let mut row: BTreeMap<usize, (f64, Option<Rational>)> = BTreeMap::new();
            let coeffs = [
                (tr.nodes[0], tr.weights[0].clone()),
                (tr.nodes[2], tr.weights[1].clone()),
                (tr.nodes[1], -Rational::one()),
            ];
            for (node, w) in coeffs {
                let Some((k, m)) = self.node_rep[node] else { continue };
                let entry = row.entry(k).or_insert((0.0, if exact { Some(Rational::zero()) } else { None }));
                entry.0 += w.to_f64().unwrap_or(f64::NAN) * self.layer_factor(m);
                if let (Some(acc), Some(f)) = (entry.1.as_mut(), self.layer_factor_exact(m)) {
                    *acc += w * f;
                }
            }
            row.retain(|_, (v, q)| match q {
                Some(q) => !q.is_zero(),
                None => *v != 0.0,
            });
            if row.is_empty() {
                continue;
            }
            let scale = row.values().fold(0.0f64, |a, (v, _)| a.max(v.abs()));
            let key: Vec<(usize, i64)> = row.iter().map(|(k, (v, _))| (*k, (v / scale * 1e9).round() as i64)).collect();
            if seen.insert(key, ()).is_some() {
                continue;
            }
            let mut dense = vec![0.0; self.reps.len()];
            for (k, (v, _)) in &row {
                dense[*k] = *v;
            }
            rows.push(dense);
            if exact {
                exact_rows.push(row.into_iter().map(|(k, (_, q))| (k, q.unwrap_or_default())).collect());
            }
        }
        (rows, if exact { Some(exact_rows) } else { None })
    }

    pub fn solve(&self) -> Result<SepConvexSolution> {
        let (g, exact_rows) = self.reduced_rows();
        let nvars = self.reps.len();
        // s = 1 − F turns F ≤ 1 into s ≥ 0 and G·F ≥ 0 into G·s ≤ G·1
        let b: Vec<f64> = g.iter().map(|row| row.iter().sum::<f64>()).collect();
        let a = g;
        let mut c = vec![0.0; nvars];
        c[self.target] = 1.0;
        let lp = LpProblem { a, b, c };
        let sol = solve_max(&lp, &SimplexOptions::default())?;
        let rep_values: Vec<f64> = sol.x.iter().map(|s| 1.0 - s).collect();
        let optimum = 1.0 - sol.value;
        // float certificate: y ≥ 0 with Aᵀy ≥ c bounds the objective by bᵀy
        let mut dual_residual: f64 = 0.0;
        for j in 0..nvars {
            let r: f64 = lp.a.iter().zip(&sol.y).map(|(row, y)| row[j] * y).sum::<f64>() - lp.c[j];
            dual_residual = dual_residual.max(-r);
        }
        let dual_bound = 1.0 - lp.b.iter().zip(&sol.y).map(|(b, y)| b * y).sum::<f64>();
        let certificate = match exact_rows {
            Some(rows) => exact_certificate(&rows, nvars, self.target, &sol.tight_rows, &sol.basic_columns),
            None => None,
        };
        let node_values = self.extend(&rep_values);
        let primal_violation = self.violation(&node_values);
        Ok(SepConvexSolution {
            optimum,
            dual_bound,
            dual_residual,
            exact_bound: certificate.as_ref().map(|c| c.bound.clone()),
            certificate,
            primal_violation,
            rep_values,
            node_values,
            multipliers: sol.y,
            rows: lp.a.len(),
            variables: nvars,
            pivots: sol.pivots,
        })
    }
}

/// Row multipliers `y ≥ 0` with `Σ_i y_i g_i ≥ e_target` componentwise.
/// Since `s = 1 − F ≥ 0` and `g_i·s ≤ g_i·1`, this gives
/// `F(target) ≥ 1 − Σ_i y_i (g_i·1)` for every feasible `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCertificate {
    pub multipliers: Vec<(usize, Rational)>,
    pub bound: Rational,
}

fn exact_certificate(
    rows: &[BTreeMap<usize, Rational>],
    nvars: usize,
    target: usize,
    tight: &[usize],
    basic: &[usize],
) -> Option<ExactCertificate> {
    // complementary slackness: Σ_{i∈tight} g_ij y_i = c_j on the basic columns
    if tight.len() != basic.len() {
        return None;
    }
    let system: Vec<Vec<Rational>> = basic
        .iter()
        .map(|&j| tight.iter().map(|&i| rows[i].get(&j).cloned().unwrap_or_default()).collect())
        .collect();
    let rhs: Vec<Rational> = basic.iter().map(|&j| if j == target { Rational::one() } else { Rational::zero() }).collect();
    let y = if basic.is_empty() { Vec::new() } else { solve(&system, &rhs)? };
    if y.iter().any(|v| v.is_negative()) {
        return None;
    }
    let mut reduced = vec![Rational::zero(); nvars];
    let mut by = Rational::zero();
    for (&i, yi) in tight.iter().zip(&y) {
        let mut rowsum = Rational::zero();
        for (&j, g) in &rows[i] {
            reduced[j] += g * yi;
            rowsum += g;
        }
        by += rowsum * yi;
    }
    for (j, r) in reduced.iter().enumerate() {
        let c = if j == target { Rational::one() } else { Rational::zero() };
        if *r < c {
            return None;
        }
    }
    Some(ExactCertificate {
        multipliers: tight.iter().cloned().zip(y).filter(|(_, v)| !v.is_zero()).collect(),
        bound: Rational::one() - by,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SepConvexSolution {
    /// Minimum of `F` at the objective node.
    pub optimum: f64,
    /// Lower bound implied by the floating-point multipliers.
    pub dual_bound: f64,
    /// Largest violation of dual feasibility by those multipliers.
    pub dual_residual: f64,
    pub exact_bound: Option<Rational>,
    pub certificate: Option<ExactCertificate>,
    /// Largest constraint violation of the primal witness.
    pub primal_violation: f64,
    pub rep_values: Vec<f64>,
    pub node_values: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub rows: usize,
    pub variables: usize,
    pub pivots: usize,
}

impl SepConvexSolution {
    pub fn certified(&self, tol: f64) -> bool {
        let float_ok = self.dual_residual <= tol && self.primal_violation <= tol;
        match &self.exact_bound {
            Some(b) => float_ok && b.to_f64().is_some_and(|v| (v - self.optimum).abs() <= tol),
            None => float_ok,
        }
    }
}

pub fn min_certificate(prog: &SepConvexProgram) -> Result<SepConvexSolution> {
    prog.solve()
}

/// Optimum at every representative node (exploratory).
pub fn node_sweep(grid: &HomogeneousGrid, p: f64) -> Result<Vec<(Vec<f64>, f64)>> {
    let base = SepConvexProgram::new(grid.clone(), p)?;
    let u = grid.unit() as f64;
    base.representatives()
        .iter()
        .map(|r| {
            let prog = SepConvexProgram::with_target(grid.clone(), p, r)?;
            Ok((r.iter().map(|v| *v as f64 / u).collect(), prog.solve()?.optimum))
        })
        .collect()
}

/// `max(0, −min second difference)` of `f` over the lattice `h·{−k..k}^d`.
pub fn check_separately_convex(f: impl Fn(&[f64]) -> f64, d: usize, k: i64, h: f64) -> f64 {
    let side = (2 * k + 1) as usize;
    let total = side.pow(d as u32);
    let mut worst: f64 = 0.0;
    let mut x = vec![0.0; d];
    for p in 0..total {
        let mut rest = p;
        let mut idx = vec![0i64; d];
        for v in idx.iter_mut() {
            *v = (rest % side) as i64 - k;
            rest /= side;
        }
        for axis in 0..d {
            if idx[axis].abs() == k {
                continue;
            }
            for (xi, ii) in x.iter_mut().zip(&idx) {
                *xi = *ii as f64 * h;
            }
            let mid = f(&x);
            x[axis] -= h;
            let lo = f(&x);
            x[axis] += 2.0 * h;
            let hi = f(&x);
            worst = worst.max(-(lo + hi - 2.0 * mid));
        }
    }
    worst
}

/// `(x₁² + x₂² + x₃² − x₄²) / √(x₁² + x₂² + x₃²)`.
pub fn r4_example(x: &[f64]) -> Result<f64> {
    if x.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: x.len() });
    }
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if r2 == 0.0 {
        return Err(Error::SingularAxis);
    }
    Ok((r2 - x[3] * x[3]) / r2.sqrt())
}

/// Discrete Laplacian of [`r4_example`] at each point, nine points per axis.
pub fn subharmonic_check(points: &[[f64; 4]], h: f64) -> Result<Vec<f64>> {
    let w: Vec<(isize, f64)> = fd_weights(2, 8).into_iter().map(|(o, w)| (o, w.to_f64().unwrap_or(f64::NAN))).collect();
    points
        .iter()
        .map(|x| {
            let mut lap = 0.0;
            for axis in 0..4 {
                let mut acc = 0.0;
                for &(o, wk) in &w {
                    let mut y = *x;
                    y[axis] += o as f64 * h;
                    acc += wk * r4_example(&y)?;
                }
                lap += acc / (h * h);
            }
            Ok(lap)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_structure() {
        let g = HomogeneousGrid::new(2, 5, 1, 2).unwrap();
        // 16 boundary points of a 5×5 square per layer, three layers, origin
        assert_eq!(g.nodes().len(), 49);
        assert_eq!(g.unit(), 4);
        for x in g.nodes() {
            let neg: Vec<i64> = x.iter().map(|v| -v).collect();
            assert!(g.find(&neg).is_some());
        }
        assert!(HomogeneousGrid::new(2, 4, 1, 2).is_err());
    }

    #[test]
    fn one_dimensional_program_is_zero() {
        let prog = SepConvexProgram::new(HomogeneousGrid::new(1, 3, 2, 2).unwrap(), 1.0).unwrap();
        let s = prog.solve().unwrap();
        assert!(s.optimum.abs() < 1e-12, "{}", s.optimum);
        assert_eq!(s.exact_bound, Some(Rational::zero()));
    }

    #[test]
    fn sup_norm_is_feasible() {
        let prog = SepConvexProgram::new(HomogeneousGrid::new(2, 5, 1, 2).unwrap(), 1.0).unwrap();
        let f: Vec<f64> = (0..prog.grid().nodes().len()).map(|i| prog.grid().sup_norm(i)).collect();
        assert!(prog.violation(&f) <= 1e-15);
        assert_eq!(f[prog.target_node()], 1.0);
        let linear: Vec<f64> = (0..f.len()).map(|i| prog.grid().coords(i)[0]).collect();
        assert!(prog.violation(&linear) <= 1e-15);
    }

    #[test]
    fn small_two_dimensional_program() {
        let prog = SepConvexProgram::new(HomogeneousGrid::new(2, 5, 1, 2).unwrap(), 1.0).unwrap();
        let s = prog.solve().unwrap();
        assert!(s.optimum >= -1e-9, "{}", s.optimum);
        assert!(s.certified(1e-9), "{s:?}");
        for (a, b) in prog.homogeneity_links() {
            assert!((s.node_values[b] - 2.0 * s.node_values[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn separate_convexity_examples() {
        let h = 0.25;
        assert_eq!(check_separately_convex(|x| x[0] * x[1], 2, 3, h), 0.0);
        assert_eq!(check_separately_convex(|x| x.iter().map(|v| v * v).sum(), 2, 3, h), 0.0);
        let r = check_separately_convex(|x| -x[0] * x[0], 2, 3, h);
        assert!((r - 2.0 * h * h).abs() < 1e-15);
    }

    #[test]
    fn r4_values() {
        assert_eq!(r4_example(&[0.0, 0.0, 1.0, 2.0]).unwrap(), -3.0);
        assert_eq!(r4_example(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(r4_example(&[0.0, 0.0, 0.0, 1.0]), Err(Error::SingularAxis));
        let lap = subharmonic_check(&[[0.3, -0.4, 0.5, 1.1]], 1e-2).unwrap();
        assert!(lap[0].abs() < 1e-6, "{}", lap[0]);
    }
}
