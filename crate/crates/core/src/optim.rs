//! Smoothed powers and an accelerated first-order minimizer.

use alloc::vec;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;

/// `|x|^p` with the kink at the origin replaced by a quadratic on `|x| ≤ μ`
/// and shifted so that `s(0) = 0`; `p = 1` is the Huber function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothPower {
    p: f64,
    mu: f64,
    shift: f64,
    quad: f64,
}

impl SmoothPower {
    pub fn new(p: f64, mu: f64) -> Self {
        let shift = mu.powf(p) * (1.0 - p / 2.0);
        SmoothPower { p, mu, shift, quad: 0.5 * p * mu.powf(p - 2.0) }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn value(&self, x: f64) -> f64 {
        let a = x.abs();
        if a > self.mu {
            self.pow(a) - self.shift
        } else {
            self.quad * x * x
        }
    }

    /// Value and derivative.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let a = x.abs();
        if a > self.mu {
            let pa = self.pow(a);
            (pa - self.shift, self.p * pa / x)
        } else {
            (self.quad * x * x, 2.0 * self.quad * x)
        }
    }

    fn pow(&self, a: f64) -> f64 {
        if self.p == 1.0 {
            a
        } else {
            a.powf(self.p)
        }
    }
}

/// Options for [`minimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct DescentOptions {
    pub iterations: usize,
    /// First trial step is `step_scale · ‖x₀‖ / ‖∇f(x₀)‖`.
    pub step_scale: f64,
    pub growth: f64,
    pub max_backtracks: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions { iterations: 500, step_scale: 1e-3, growth: 1.2, max_backtracks: 60 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nesterov descent with backtracking, function-value restarts and step
/// growth. `f(x, Some(g))` must return the value and write the gradient.
/// `observe(iter, x)` is called after every accepted step.
pub fn minimize<F, O>(mut f: F, x0: Vec<f64>, opts: &DescentOptions, mut observe: O) -> DescentOutcome
where
    F: FnMut(&[f64], Option<&mut [f64]>) -> f64,
    O: FnMut(usize, &[f64]),
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut fx = f(&x, Some(&mut g));
    let mut evaluations = 1;
    let gnorm = dot(&g, &g).sqrt();
    let xnorm = dot(&x, &x).sqrt();
    let mut step = if gnorm > 0.0 && xnorm > 0.0 {
        opts.step_scale * xnorm / gnorm
    } else if gnorm > 0.0 {
        opts.step_scale / gnorm
    } else {
        return DescentOutcome { x, value: fx, iterations: 0, evaluations, restarts: 0 };
    };
    let mut y = x.clone();
    let mut xn = vec![0.0; n];
    let mut t = 1.0;
    let mut restarts = 0;
    let mut fy = fx;
    // when set, `g` and `fy` already hold the data at `y == x`
    let mut y_is_x = true;
    let mut iterations = 0;
    while iterations < opts.iterations {
        iterations += 1;
        if !y_is_x {
            fy = f(&y, Some(&mut g));
            evaluations += 1;
        }
        let g2 = dot(&g, &g);
        if g2 == 0.0 || !fy.is_finite() {
            break;
        }
        let mut fnew;
        let mut tries = 0;
        loop {
            for i in 0..n {
                xn[i] = y[i] - step * g[i];
            }
            fnew = f(&xn, None);
            evaluations += 1;
            if fnew <= fy - 0.5 * step * g2 || tries >= opts.max_backtracks {
                break;
            }
            step *= 0.5;
            tries += 1;
        }
        if !(fnew <= fx) {
            // momentum overshot: restart from the last accepted point
            if y_is_x {
                break;
            }
            y.copy_from_slice(&x);
            fy = f(&y, Some(&mut g));
            evaluations += 1;
            y_is_x = true;
            t = 1.0;
            restarts += 1;
            continue;
        }
        let tn = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / tn;
        for i in 0..n {
            y[i] = xn[i] + beta * (xn[i] - x[i]);
        }
        core::mem::swap(&mut x, &mut xn);
        fx = fnew;
        t = tn;
        y_is_x = false;
        step *= opts.growth;
        observe(iterations, &x);
    }
    DescentOutcome { x, value: fx, iterations, evaluations, restarts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_power_is_continuous_and_consistent() {
        for &p in &[1.0, 1.25, 1.5, 2.0] {
            let s = SmoothPower::new(p, 0.3);
            assert_eq!(s.value(0.0), 0.0);
            let (a, b) = (s.value(0.3 - 1e-12), s.value(0.3 + 1e-12));
            assert!((a - b).abs() < 1e-9);
            for &x in &[-2.0, -0.1, 0.05, 0.7] {
                let h = 1e-6;
                let fd = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
                assert!((s.eval(x).1 - fd).abs() < 1e-5, "p={p} x={x}");
                assert_eq!(s.eval(x).0, s.value(x));
            }
            // |x|^p − c₀ outside
            assert!((s.value(2.0) - (2.0f64.powf(p) - 0.3f64.powf(p) * (1.0 - p / 2.0))).abs() < 1e-12);
        }
        let huber = SmoothPower::new(1.0, 0.5);
        assert_eq!(huber.value(0.25), 0.0625);
        assert_eq!(huber.value(-2.0), 1.75);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let diag = [1.0, 10.0, 100.0];
        let f = |x: &[f64], g: Option<&mut [f64]>| {
            if let Some(g) = g {
                for i in 0..3 {
                    g[i] = diag[i] * (x[i] - 1.0);
                }
            }
            (0..3).map(|i| 0.5 * diag[i] * (x[i] - 1.0).powi(2)).sum()
        };
        let mut last = f64::INFINITY;
        let out = minimize(
            f,
            vec![3.0, -2.0, 5.0],
            &DescentOptions { iterations: 400, ..Default::default() },
            |_, x| {
                let v = f(x, None);
                assert!(v <= last + 1e-15);
                last = v;
            },
        );
        assert!(out.value < 1e-10, "{}", out.value);
    }
}
