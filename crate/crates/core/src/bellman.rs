//! The integrand `V` and upper estimates of `B(e) = inf_φ ∫ V(e + ∇_A φ)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;

use rand::Rng;

use crate::algebra::GradientSpace;
use crate::field::{DerivativeScheme, Differentiator, OperatorStack, ScalarField, StackBuffers};
use crate::optim::{minimize, DescentOptions, SmoothPower};
use crate::ratio::abs_pow;
use crate::stats::median_nonzero_abs;
use crate::{seeded_rng, Error, Result};

/// `V(e) = Σ_{j≥2}|T̃_j e|^p − c|T̃₁ e|^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct VFunction {
    space: GradientSpace,
    c: f64,
    p: f64,
    coeffs: Vec<Vec<f64>>,
}

impl VFunction {
    pub fn new(space: GradientSpace, c: f64, p: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Config(format!("c must be a finite non-negative number, got {c}")));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("p must be >= 1, got {p}")));
        }
        if space.operator_count() < 2 {
            return Err(Error::EmptyInput("need at least two operators"));
        }
        let coeffs = space.functionals_f64();
        Ok(VFunction { space, c, p, coeffs })
    }

    pub fn space(&self) -> &GradientSpace {
        &self.space
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `(T̃_j e)_j`, accumulated in the same order as the grid evaluation.
    pub fn functionals(&self, e: &[f64]) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|row| {
                let mut t = 0.0;
                for (&c, &ek) in row.iter().zip(e) {
                    if c != 0.0 {
                        t += c * ek;
                    }
                }
                t
            })
            .collect()
    }

    fn combine(&self, t: impl Iterator<Item = f64>) -> f64 {
        let mut first = 0.0;
        let mut rest = 0.0;
        for (j, v) in t.enumerate() {
            if j == 0 {
                first = abs_pow(v, self.p);
            } else {
                rest += abs_pow(v, self.p);
            }
        }
        rest - self.c * first
    }

    /// `V(e)` without dimension checks.
    pub fn value(&self, e: &[f64]) -> f64 {
        self.combine(self.functionals(e).into_iter())
    }
}

pub fn evaluate_v(vf: &VFunction, e: &[f64]) -> Result<f64> {
    check_e(vf, e)?;
    Ok(vf.value(e))
}

fn check_e(vf: &VFunction, e: &[f64]) -> Result<()> {
    if e.len() != vf.space.dim_e() {
        return Err(Error::DimensionMismatch { expected: vf.space.dim_e(), found: e.len() });
    }
    Ok(())
}

/// Mean anchored at the first entry, so constant inputs are reproduced exactly.
fn anchored_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut it = values;
    let Some(first) = it.next() else { return 0.0 };
    let mut n = 1usize;
    let mut acc = 0.0;
    for v in it {
        acc += v - first;
        n += 1;
    }
    first + acc / n as f64
}

/// `∫ V(e + ∇_A f)` on a fixed grid, with a smoothed companion for descent.
#[derive(Clone, Debug)]
pub struct BellmanProblem {
    vf: VFunction,
    stack: OperatorStack,
}

impl BellmanProblem {
    pub fn new(vf: VFunction, sizes: &[usize], scheme: DerivativeScheme) -> Result<Self> {
        let stack = OperatorStack::new(&vf.space, sizes, scheme)?;
        Ok(BellmanProblem { vf, stack })
    }

    pub fn v(&self) -> &VFunction {
        &self.vf
    }

    pub fn stack(&self) -> &OperatorStack {
        &self.stack
    }

    pub fn zero_field(&self) -> ScalarField {
        self.stack.differentiator().zero_field()
    }

    pub fn objective_values(&self, e: &[f64], values: &[f64], buf: &mut StackBuffers) -> f64 {
        self.stack.forward(values, Some(e), buf);
        let t = &buf.t;
        anchored_mean((0..self.stack.len()).map(|i| self.vf.combine(t.iter().map(|tj| tj[i]))))
    }

    pub fn objective(&self, e: &[f64], f: &ScalarField) -> Result<f64> {
        check_e(&self.vf, e)?;
        if f.grid() != self.stack.differentiator().grid() {
            return Err(Error::DimensionMismatch { expected: self.stack.len(), found: f.grid().len() });
        }
        Ok(self.objective_values(e, f.values(), &mut self.stack.buffers()))
    }

    fn smoothed(&self, e: &[f64], values: &[f64], mu: f64, grad: Option<&mut [f64]>, buf: &mut StackBuffers) -> f64 {
        let s = SmoothPower::new(self.vf.p, mu);
        self.stack.forward(values, Some(e), buf);
        let n = self.stack.len() as f64;
        let mut total = 0.0;
        for (j, t) in buf.t.iter().enumerate() {
            let w = if j == 0 { -self.vf.c } else { 1.0 };
            total += w * t.iter().map(|x| s.value(*x)).sum::<f64>();
        }
        if let Some(g) = grad {
            for (j, t) in buf.t.iter_mut().enumerate() {
                let w = if j == 0 { -self.vf.c } else { 1.0 } / n;
                t.iter_mut().for_each(|x| *x = w * s.eval(*x).1);
            }
            self.stack.backward(buf, g);
        }
        total / n
    }

    /// Seeded noise whose generalized gradient has RMS `scale`.
    pub fn noise(&self, scale: f64, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed);
        let mut x: Vec<f64> = self.stack.mask().iter().map(|m| m * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        let mut buf = self.stack.buffers();
        self.stack.forward(&x, None, &mut buf);
        let ms = buf.t.iter().flatten().map(|v| v * v).sum::<f64>() / (buf.t.len() * self.stack.len()) as f64;
        if ms > 0.0 {
            let k = scale / ms.sqrt();
            x.iter_mut().for_each(|v| *v *= k);
        }
        x
    }
}

/// `objective(vf, e, f) = mean_x V(e + ∇_A f(x))` with the default scheme.
pub fn objective(vf: &VFunction, e: &[f64], f: &ScalarField) -> Result<f64> {
    BellmanProblem::new(vf.clone(), f.grid().sizes(), DerivativeScheme::default())?.objective(e, f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellmanOptions {
    pub budget: usize,
    pub stages: usize,
    pub seed: u64,
    /// RMS of `∇_A φ₀` relative to `‖e‖`.
    pub init_scale: f64,
    /// Independent random starts (best of).
    pub restarts: usize,
    pub scheme: DerivativeScheme,
    pub step_scale: f64,
}

impl Default for BellmanOptions {
    fn default() -> Self {
        BellmanOptions {
            budget: 400,
            stages: 4,
            seed: 0,
            init_scale: 1.0,
            restarts: 1,
            scheme: DerivativeScheme::default(),
            step_scale: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellmanEstimate {
    pub e: Vec<f64>,
    pub value: f64,
    /// `V(e)`, the value at `φ ≡ 0`.
    pub v_value: f64,
    pub iterations: usize,
    pub grid: Vec<usize>,
    pub seed: u64,
    /// Best value at half budget minus the final best value.
    pub gap: f64,
    /// `(iteration, best value so far)`, starting with `(0, V(e))`.
    pub trace: Vec<(usize, f64)>,
    pub witness: ScalarField,
}

impl BellmanProblem {
    /// Minimizes the objective over supported fields. With `start`, the first
    /// run begins there instead of at seeded noise.
    pub fn upper(&self, e: &[f64], start: Option<&[f64]>, opts: &BellmanOptions) -> Result<BellmanEstimate> {
        check_e(&self.vf, e)?;
        let mut buf = self.stack.buffers();
        let mut obs = self.stack.buffers();
        let zero = vec![0.0; self.stack.len()];
        let v_value = self.objective_values(e, &zero, &mut buf);
        let mut best = (v_value, zero);
        let mut trace = vec![(0usize, v_value)];
        let enorm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = opts.init_scale * if enorm > 0.0 { enorm } else { 1.0 };
        let per_run = opts.budget / opts.restarts.max(1);
        let per_stage = per_run / opts.stages.max(1);
        let half = opts.budget / 2;
        let mut at_half = None;
        let mut done = 0usize;
        for r in 0..opts.restarts.max(1) {
            let mut x = match (r, start) {
                (0, Some(s)) => s.iter().zip(self.stack.mask()).map(|(v, m)| v * m).collect(),
                _ => self.noise(scale, opts.seed.wrapping_add(r as u64)),
            };
            let start_value = self.objective_values(e, &x, &mut obs);
            if start_value < best.0 {
                best = (start_value, x.clone());
            }
            self.stack.forward(&x, Some(e), &mut buf);
            let mu0 = 0.1 * median_nonzero_abs(buf.t.iter().flatten()).unwrap_or(scale);
            for m in 0..opts.stages.max(1) {
                let mu = mu0 * (0.5f64).powi(m as i32);
                let descent = DescentOptions { iterations: per_stage, step_scale: opts.step_scale, ..Default::default() };
                let out = minimize(
                    |v, g| self.smoothed(e, v, mu, g, &mut buf),
                    x,
                    &descent,
                    |it, v| {
                        let val = self.objective_values(e, v, &mut obs);
                        if val < best.0 {
                            best = (val, v.to_vec());
                        }
                        trace.push((done + it, best.0));
                        if at_half.is_none() && done + it >= half {
                            at_half = Some(best.0);
                        }
                    },
                );
                done += out.iterations;
                x = out.x;
            }
        }
        let gap = at_half.unwrap_or(best.0) - best.0;
        let grid = self.stack.differentiator().grid().clone();
        let support = Some(self.stack.differentiator().support());
        Ok(BellmanEstimate {
            e: e.to_vec(),
            value: best.0,
            v_value,
            iterations: done,
            grid: grid.sizes().to_vec(),
            seed: opts.seed,
            gap,
            trace,
            witness: ScalarField::from_values(grid, best.1, support)?,
        })
    }
}

pub fn bellman_upper(vf: &VFunction, e: &[f64], sizes: &[usize], opts: &BellmanOptions) -> Result<BellmanEstimate> {
    BellmanProblem::new(vf.clone(), sizes, opts.scheme)?.upper(e, None, opts)
}

/// `B̂(e)` against the mean of `B̂(e + ∇_A φ(ξ))` over sampled `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiConvexityReport {
    pub center: f64,
    pub mean_shifted: f64,
    /// Largest estimator gap among all runs.
    pub gap: f64,
    /// `max(0, center − mean_shifted − gap)`; nonzero values are anomalies.
    pub anomaly: f64,
    pub samples: usize,
}

/// Samples `ξ` at evenly strided support points of `φ`.
pub fn quasi_convexity_check(
    problem: &BellmanProblem,
    e: &[f64],
    phi: &ScalarField,
    samples: usize,
    opts: &BellmanOptions,
) -> Result<QuasiConvexityReport> {
    if samples == 0 {
        return Err(Error::EmptyInput("samples"));
    }
    let space = problem.v().space();
    let sizes = phi.grid().sizes().to_vec();
    let grad = Differentiator::for_space(space, &sizes, opts.scheme)?.gradient(phi)?;
    let support: Vec<usize> = (0..phi.grid().len()).filter(|&p| problem.stack().mask()[p] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::EmptyInput("support"));
    }
    let center = problem.upper(e, None, opts)?;
    let mut gap = center.gap;
    let mut total = 0.0;
    for k in 0..samples {
        let p = support[k * support.len() / samples];
        let shifted: Vec<f64> = e.iter().zip(grad.vector_at(p)).map(|(a, b)| a + b).collect();
        let est = problem.upper(&shifted, None, opts)?;
        gap = gap.max(est.gap);
        total += est.value;
    }
    let mean_shifted = total / samples as f64;
    Ok(QuasiConvexityReport {
        center: center.value,
        mean_shifted,
        gap,
        anomaly: (center.value - mean_shifted - gap).max(0.0),
        samples,
    })
}

/// Midpoint and cosine-mean convexity residuals along one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneResidual {
    /// `max_λ g(e) − ½(g(e+λv) + g(e−λv))`.
    pub midpoint: f64,
    /// `max_λ g(e) − mean_t g(e + λ cos(2πt) v)`.
    pub cosine_mean: f64,
    /// `(λ, midpoint, cosine)` per sampled `λ`.
    pub rows: Vec<(f64, f64, f64)>,
}

impl RankOneResidual {
    pub fn within(&self, tol: f64) -> bool {
        self.midpoint <= tol && self.cosine_mean <= tol
    }
}

pub const COSINE_SAMPLES: usize = 64;

pub fn check_rank_one_midpoint(
    mut g: impl FnMut(&[f64]) -> f64,
    e: &[f64],
    direction: &[f64],
    lambdas: &[f64],
) -> RankOneResidual {
    let at = |lambda: f64| -> Vec<f64> { e.iter().zip(direction).map(|(a, b)| a + lambda * b).collect() };
    let g0 = g(e);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let mid = g0 - 0.5 * (g(&at(l)) + g(&at(-l)));
        let tau = 2.0 * core::f64::consts::PI;
        let mut acc = 0.0;
        for i in 0..COSINE_SAMPLES {
            let t = (i as f64 + 0.5) / COSINE_SAMPLES as f64;
            acc += g(&at(l * (tau * t).cos()));
        }
        rows.push((l, mid, g0 - acc / COSINE_SAMPLES as f64));
    }
    let max = |k: fn(&(f64, f64, f64)) -> f64| rows.iter().map(k).fold(f64::NEG_INFINITY, f64::max);
    RankOneResidual { midpoint: max(|r| r.1), cosine_mean: max(|r| r.2), rows }
}
