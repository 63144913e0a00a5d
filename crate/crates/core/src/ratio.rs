//! Scale-invariant search for violations of `‖T₁f‖ ≲ Σ_{j≥2}‖T_jf‖`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;

use rand::Rng;

use crate::algebra::{build_gradient_space, DifferentialOperator, GradientSpace};
use crate::field::{prolong, DerivativeScheme, OperatorStack, ScalarField, StackBuffers};
use crate::optim::{minimize, DescentOptions, SmoothPower};
use crate::stats::median_nonzero_abs;
use crate::{seeded_rng, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RatioOptions {
    /// Descent iterations per grid level, split evenly over the stages.
    pub budget: usize,
    /// Number of smoothing levels `μ_m = μ₀·2^{−m}`.
    pub stages: usize,
    /// First stage used on warm-started levels.
    pub warm_stage: usize,
    pub seed: u64,
    pub max_restarts: usize,
    pub scheme: DerivativeScheme,
    /// Exponent of the norms; 1 for the L¹ ratio.
    pub p: f64,
    pub step_scale: f64,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions {
            budget: 2000,
            stages: 8,
            warm_stage: 0,
            seed: 0,
            max_restarts: 5,
            scheme: DerivativeScheme::default(),
            p: 1.0,
            step_scale: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRun {
    pub ratio: f64,
    pub start_ratio: f64,
    pub witness: ScalarField,
    /// `(iteration, best ratio so far)`.
    pub trace: Vec<(usize, f64)>,
    pub iterations: usize,
}

impl RatioRun {
    pub fn grid(&self) -> &[usize] {
        self.witness.grid().sizes()
    }
}

/// `Σ|T₁f|^p / Σ_{j≥2}Σ|T_jf|^p` on a fixed grid.
#[derive(Clone, Debug)]
pub struct RatioProblem {
    stack: OperatorStack,
    p: f64,
}

impl RatioProblem {
    pub fn new(space: &GradientSpace, sizes: &[usize], scheme: DerivativeScheme, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Config(format!("exponent must be >= 1, got {p}")));
        }
        if space.operator_count() < 2 {
            return Err(Error::EmptyInput("need at least two operators"));
        }
        Ok(RatioProblem { stack: OperatorStack::new(space, sizes, scheme)?, p })
    }

    pub fn stack(&self) -> &OperatorStack {
        &self.stack
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn power_sums(&self, buf: &StackBuffers) -> (f64, f64) {
        let p = self.p;
        let sum = |v: &[f64]| v.iter().map(|x| abs_pow(*x, p)).sum::<f64>();
        (sum(&buf.t[0]), buf.t[1..].iter().map(|t| sum(t)).sum())
    }

    /// Exact ratio, or `None` when the denominator vanishes.
    pub fn ratio(&self, values: &[f64], buf: &mut StackBuffers) -> Option<f64> {
        self.stack.forward(values, None, buf);
        let (num, den) = self.power_sums(buf);
        if den > 0.0 {
            Some(num / den)
        } else {
            None
        }
    }

    pub fn ratio_of(&self, f: &ScalarField) -> Option<f64> {
        self.ratio(f.values(), &mut self.stack.buffers())
    }

    /// `μ₀ = 0.1 · median |T_j f|` over nonzero entries.
    pub fn base_smoothing(&self, values: &[f64], buf: &mut StackBuffers) -> f64 {
        self.stack.forward(values, None, buf);
        0.1 * median_nonzero_abs(buf.t.iter().flatten()).unwrap_or(1.0)
    }

    /// `log Σ s(T_jf)_{j≥2} − log Σ s(T₁f)` and its gradient.
    pub fn smoothed(&self, values: &[f64], mu: f64, grad: Option<&mut [f64]>, buf: &mut StackBuffers) -> f64 {
        let s = SmoothPower::new(self.p, mu);
        self.stack.forward(values, None, buf);
        let num: f64 = buf.t[0].iter().map(|x| s.value(*x)).sum();
        let den: f64 = buf.t[1..].iter().flatten().map(|x| s.value(*x)).sum();
        if !(num > 0.0 && den > 0.0) {
            return f64::INFINITY;
        }
        let value = den.ln() - num.ln();
        if let Some(g) = grad {
            for (j, t) in buf.t.iter_mut().enumerate() {
                let w = if j == 0 { -1.0 / num } else { 1.0 / den };
                t.iter_mut().for_each(|x| *x = w * s.eval(*x).1);
            }
            self.stack.backward(buf, g);
        }
        value
    }

    fn random_start(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.stack.mask().iter().map(|m| m * (2.0 * rng.gen::<f64>() - 1.0)).collect()
    }

    /// Runs the smoothing continuation from `start` (or seeded noise).
    pub fn maximize(&self, start: Option<&[f64]>, opts: &RatioOptions) -> Result<RatioRun> {
        let mut buf = self.stack.buffers();
        let mut rng = seeded_rng(opts.seed);
        let mut x = match start {
            Some(s) if self.ratio(s, &mut buf).is_some_and(|r| r.is_finite()) => s.to_vec(),
            _ => {
                let mut attempt = 0;
                loop {
                    let x = self.random_start(&mut rng);
                    if self.ratio(&x, &mut buf).is_some() {
                        break x;
                    }
                    attempt += 1;
                    if attempt > opts.max_restarts {
                        return Err(Error::DegenerateStart { attempts: attempt });
                    }
                }
            }
        };
        for (v, m) in x.iter_mut().zip(self.stack.mask()) {
            *v *= m;
        }
        let start_ratio = self.ratio(&x, &mut buf).unwrap_or(0.0);
        let mut best = (start_ratio, x.clone());
        let mut trace = vec![(0usize, start_ratio)];
        let first_stage = if start.is_some() { opts.warm_stage.min(opts.stages.saturating_sub(1)) } else { 0 };
        let mu0 = self.base_smoothing(&x, &mut buf) * (2.0f64).powi(first_stage as i32);
        let per_stage = opts.budget / opts.stages.max(1);
        let mut done = 0usize;
        let mut obs_buf = self.stack.buffers();
        for m in first_stage..opts.stages {
            let mu = mu0 * (0.5f64).powi(m as i32);
            let descent = DescentOptions { iterations: per_stage, step_scale: opts.step_scale, ..Default::default() };
            let out = minimize(
                |v, g| self.smoothed(v, mu, g, &mut buf),
                x,
                &descent,
                |it, v| {
                    if let Some(r) = self.ratio(v, &mut obs_buf) {
                        if r > best.0 {
                            best = (r, v.to_vec());
                        }
                    }
                    trace.push((done + it, best.0));
                },
            );
            done += out.iterations;
            x = out.x;
        }
        let mut witness = best.1;
        normalize_max(&mut witness);
        let grid = self.stack.differentiator().grid().clone();
        let support = Some(self.stack.differentiator().support());
        Ok(RatioRun {
            ratio: best.0,
            start_ratio,
            witness: ScalarField::from_values(grid, witness, support)?,
            trace,
            iterations: done,
        })
    }
}

pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x.abs()
    } else {
        x.abs().powf(p)
    }
}

fn normalize_max(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale > 0.0 && scale.is_finite() {
        v.iter_mut().for_each(|x| *x /= scale);
    }
}

/// Best ratio on one grid, started from seeded noise.
pub fn minimize_ratio(ops: &[DifferentialOperator], sizes: &[usize], opts: &RatioOptions) -> Result<RatioRun> {
    let space = build_gradient_space(ops)?;
    RatioProblem::new(&space, sizes, opts.scheme, opts.p)?.maximize(None, opts)
}

/// Runs a grid schedule, warm-starting each level from the prolonged
/// witness of the previous one.
pub fn ratio_trend(ops: &[DifferentialOperator], schedule: &[Vec<usize>], opts: &RatioOptions) -> Result<Vec<RatioRun>> {
    let space = build_gradient_space(ops)?;
    let mut runs: Vec<RatioRun> = Vec::with_capacity(schedule.len());
    for sizes in schedule {
        let problem = RatioProblem::new(&space, sizes, opts.scheme, opts.p)?;
        let start = match runs.last() {
            Some(prev) => Some(refine(prev.witness.values(), prev.grid(), sizes)?),
            None => None,
        };
        runs.push(problem.maximize(start.as_deref(), opts)?);
    }
    Ok(runs)
}

/// Prolongs samples from `from` to `to`; each ratio must be a power of two.
pub fn refine(values: &[f64], from: &[usize], to: &[usize]) -> Result<Vec<f64>> {
    if from.len() != to.len() {
        return Err(Error::DimensionMismatch { expected: from.len(), found: to.len() });
    }
    let mut factors = Vec::with_capacity(from.len());
    for (axis, (&a, &b)) in from.iter().zip(to).enumerate() {
        if b % a != 0 || !(b / a).is_power_of_two() {
            return Err(Error::Config(format!(
                "axis {axis}: cannot refine {a} to {b} (need a power-of-two multiple)"
            )));
        }
        factors.push(b / a);
    }
    Ok(prolong(values, from, &factors).0)
}

/// `n_i = base_i · 2^{m}` for `m = 0..levels`.
pub fn dyadic_schedule(base: &[usize], levels: usize) -> Vec<Vec<usize>> {
    (0..levels).map(|m| base.iter().map(|n| n << m).collect()).collect()
}

/// `n_i = base_i · 2^{γ_i m}`, mirroring the anisotropic dilation.
pub fn anisotropic_schedule(base: &[usize], gamma: &[u64], levels: usize) -> Vec<Vec<usize>> {
    (0..levels)
        .map(|m| base.iter().zip(gamma).map(|(n, g)| n << (*g as usize * m)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_operator;

    fn family(src: &[&str]) -> Vec<DifferentialOperator> {
        src.iter().map(|s| parse_operator(s, 2).unwrap()).collect()
    }

    fn quick(seed: u64) -> RatioOptions {
        RatioOptions { budget: 80, stages: 4, seed, ..Default::default() }
    }

    #[test]
    fn identical_operators() {
        let run = minimize_ratio(&family(&["d1*d2", "d1*d2"]), &[16, 16], &quick(0)).unwrap();
        assert_eq!(run.ratio, 1.0);
        assert_eq!(run.start_ratio, 1.0);
    }

    #[test]
    fn deterministic_and_monotone() {
        let ops = family(&["d1*d2", "d1^2", "d2^2"]);
        let a = minimize_ratio(&ops, &[24, 24], &quick(7)).unwrap();
        let b = minimize_ratio(&ops, &[24, 24], &quick(7)).unwrap();
        assert_eq!(a, b);
        assert!(a.trace.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!(a.ratio >= a.start_ratio);
        let max = a.witness.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((max - 1.0).abs() < 1e-15);
        let space = build_gradient_space(&ops).unwrap();
        let problem = RatioProblem::new(&space, &[24, 24], DerivativeScheme::default(), 1.0).unwrap();
        let again = problem.ratio_of(&a.witness).unwrap();
        assert!((again - a.ratio).abs() <= 1e-9 * a.ratio);
    }

    #[test]
    fn dependent_family_bounded() {
        let ops = family(&["d1^2 + d2^2", "d1^2", "d2^2"]);
        let space = build_gradient_space(&ops).unwrap();
        let problem = RatioProblem::new(&space, &[20, 20], DerivativeScheme::default(), 1.0).unwrap();
        let mut rng = seeded_rng(3);
        let mut buf = problem.stack().buffers();
        for _ in 0..20 {
            let x = problem.random_start(&mut rng);
            assert!(problem.ratio(&x, &mut buf).unwrap() <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn schedules() {
        assert_eq!(dyadic_schedule(&[32, 32], 3), [[32, 32], [64, 64], [128, 128]]);
        assert_eq!(anisotropic_schedule(&[16, 256], &[1, 2], 2), [[16, 256], [32, 1024]]);
        assert!(matches!(refine(&[0.0; 12], &[3, 4], &[9, 8]), Err(Error::Config(_))));
        assert_eq!(refine(&[0.0; 12], &[3, 4], &[6, 8]).unwrap().len(), 48);
    }

    #[test]
    fn spectral_needs_even_sizes() {
        let opts = RatioOptions { scheme: DerivativeScheme::Spectral, ..quick(0) };
        assert!(matches!(minimize_ratio(&family(&["d1*d2", "d1^2"]), &[17, 16], &opts), Err(Error::Config(_))));
    }
}
