//! Dyadic martingales, periodic martingale transforms and ratio search.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::Float as _;
use num_integer::Integer;
use rand::Rng;

use crate::algebra::solve;
use crate::{seeded_rng, Error, Rational, Result};

pub const MAX_DEPTH: usize = 24;

/// The dyadic filtration of `[0,1)` up to `depth`; each atom splits into two
/// halves, so the growth factor is `1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicFiltration {
    pub depth: usize,
}

impl DyadicFiltration {
    pub fn atoms(&self, level: usize) -> usize {
        1 << level
    }

    pub const GROWTH: f64 = 0.5;
}

/// Values `f_0, …, f_N`; level `n` is constant on the `2ⁿ` dyadic atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMartingale {
    levels: Vec<Vec<f64>>,
}

impl FiniteMartingale {
    /// Checks the level sizes; the martingale property is checked separately
    /// by [`FiniteMartingale::defect`].
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyInput("martingale levels"));
        }
        if levels.len() - 1 > MAX_DEPTH {
            return Err(Error::Config(format!("depth {} exceeds {MAX_DEPTH}", levels.len() - 1)));
        }
        for (n, l) in levels.iter().enumerate() {
            if l.len() != 1 << n {
                return Err(Error::DimensionMismatch { expected: 1 << n, found: l.len() });
            }
        }
        Ok(FiniteMartingale { levels })
    }

    /// `f_n` on child atoms `2k, 2k+1` equals `f_{n−1}(k) ± h_n(k)`.
    pub fn from_haar(f0: f64, coeffs: &[Vec<f64>]) -> Result<Self> {
        let mut levels = vec![vec![f0]];
        for (n, h) in coeffs.iter().enumerate() {
            if h.len() != 1 << n {
                return Err(Error::DimensionMismatch { expected: 1 << n, found: h.len() });
            }
            let prev = levels.last().expect("non-empty");
            let next = prev.iter().zip(h).flat_map(|(p, c)| [p + c, p - c]).collect();
            levels.push(next);
        }
        Self::new(levels)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Largest `|mean of children − parent|` over all atoms.
    pub fn defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.levels.windows(2) {
            for (k, p) in w[0].iter().enumerate() {
                worst = worst.max((0.5 * (w[1][2 * k] + w[1][2 * k + 1]) - p).abs());
            }
        }
        worst
    }

    /// `‖f‖₁ = E|f_N|`.
    pub fn l1_norm(&self) -> f64 {
        let last = self.levels.last().expect("non-empty");
        last.iter().map(|v| v.abs()).sum::<f64>() / last.len() as f64
    }
}

/// A periodic multiplier sequence `α_0, α_1, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformSequence {
    values: Vec<f64>,
}

impl TransformSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("transform period"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("transform values must be finite".into()));
        }
        Ok(TransformSequence { values })
    }

    pub fn constant(v: f64) -> Self {
        TransformSequence { values: vec![v] }
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, n: usize) -> f64 {
        self.values[n % self.values.len()]
    }
}

/// `T_α[f]_n = Σ_{j≤n} α_{j−1}(f_j − f_{j−1})`.
pub fn transform(alpha: &TransformSequence, f: &FiniteMartingale) -> FiniteMartingale {
    let mut levels = vec![vec![0.0]];
    for j in 1..f.levels.len() {
        let a = alpha.at(j - 1);
        let prev = &levels[j - 1];
        let next = (0..f.levels[j].len())
            .map(|i| prev[i / 2] + a * (f.levels[j][i] - f.levels[j - 1][i / 2]))
            .collect();
        levels.push(next);
    }
    FiniteMartingale { levels }
}

/// Exact `λ` with `α¹_n = Σ_j λ_j α^j_n` for all `n`, or `None`.
pub fn span_test(alphas: &[TransformSequence]) -> Result<Option<Vec<Rational>>> {
    if alphas.len() < 2 {
        return Err(Error::EmptyInput("need at least two sequences"));
    }
    let period = alphas.iter().fold(1usize, |l, a| l.lcm(&a.period()));
    let q = |v: f64| Rational::from_float(v).expect("finite by construction");
    let rows: Vec<Vec<Rational>> = (0..period).map(|n| alphas[1..].iter().map(|a| q(a.at(n))).collect()).collect();
    let rhs: Vec<Rational> = (0..period).map(|n| q(alphas[0].at(n))).collect();
    Ok(solve(&rows, &rhs))
}

/// Haar coefficients, one vector per level.
pub type HaarCoefficients = Vec<Vec<f64>>;

/// `‖T_{α¹}f‖₁ / Σ_{j≥2}‖T_{α^j}f‖₁` for a martingale given by Haar coefficients.
pub fn transform_ratio(alphas: &[TransformSequence], coeffs: &[Vec<f64>]) -> Option<f64> {
    let norms: Vec<f64> = alphas.iter().map(|a| transformed_l1(a, coeffs)).collect();
    let den: f64 = norms[1..].iter().sum();
    if den > 0.0 {
        Some(norms[0] / den)
    } else {
        None
    }
}

fn transformed_l1(alpha: &TransformSequence, coeffs: &[Vec<f64>]) -> f64 {
    let mut cur = vec![0.0];
    for (n, h) in coeffs.iter().enumerate() {
        let a = alpha.at(n);
        cur = cur.iter().zip(h).flat_map(|(p, c)| [p + a * c, p - a * c]).collect();
    }
    cur.iter().map(|v| v.abs()).sum::<f64>() / cur.len() as f64
}

/// How a level's increment is scaled by the running gauge `G ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Step {
    /// `±c·G`; the gauge is unchanged.
    Walk(f64),
    /// `±c·G`, and the gauge becomes `2G` on one child and `0` on the other.
    Double(f64),
}

/// Builds Haar coefficients from a per-level step plan, starting at `G = 1`.
pub fn gauge_martingale(plan: &[Step]) -> HaarCoefficients {
    let mut gauge = vec![1.0];
    let mut out = Vec::with_capacity(plan.len());
    for step in plan {
        match *step {
            Step::Walk(c) => {
                out.push(gauge.iter().map(|g| c * g).collect());
                gauge = gauge.iter().flat_map(|g| [*g, *g]).collect();
            }
            Step::Double(c) => {
                out.push(gauge.iter().map(|g| c * g).collect());
                gauge = gauge.iter().flat_map(|g| [2.0 * g, 0.0]).collect();
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct MartingaleSearch {
    pub ratio: f64,
    pub witness: FiniteMartingale,
    /// Which construction produced the witness.
    pub origin: &'static str,
}

/// Best ratio over random-sign Haar martingales, greedy ascent over gauge
/// plans, and a lacunary plan that walks where `α¹` acts and doubles elsewhere.
pub fn ratio_search(alphas: &[TransformSequence], depth: usize, trials: usize, seed: u64) -> Result<MartingaleSearch> {
    if alphas.len() < 2 {
        return Err(Error::EmptyInput("need at least two sequences"));
    }
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Config(format!("depth must be in 1..={MAX_DEPTH}, got {depth}")));
    }
    let mut best: Option<(f64, HaarCoefficients, &'static str)> = None;
    let offer = |r: Option<f64>, c: HaarCoefficients, origin: &'static str, best: &mut Option<(f64, HaarCoefficients, &'static str)>| {
        if let Some(r) = r {
            if best.as_ref().is_none_or(|b| r > b.0) {
                *best = Some((r, c, origin));
            }
        }
    };
    let mut rng = seeded_rng(seed);
    for _ in 0..trials {
        let weights: Vec<f64> = (0..depth).map(|_| rng.gen::<f64>()).collect();
        let c: HaarCoefficients = (0..depth)
            .map(|n| (0..1usize << n).map(|_| if rng.gen::<bool>() { weights[n] } else { -weights[n] }).collect())
            .collect();
        let r = transform_ratio(alphas, &c);
        offer(r, c, "random", &mut best);
    }
    let lacunary: Vec<Step> =
        (0..depth).map(|n| if alphas[0].at(n) != 0.0 { Step::Walk(1.0) } else { Step::Double(1.0) }).collect();
    let c = gauge_martingale(&lacunary);
    offer(transform_ratio(alphas, &c), c, "lacunary", &mut best);
    let (plan, r) = greedy_plan(alphas, depth, &mut rng);
    let c = gauge_martingale(&plan);
    if r.is_some() {
        offer(transform_ratio(alphas, &c), c, "greedy", &mut best);
    }
    let (ratio, coeffs, origin) = best.ok_or(Error::DegenerateStart { attempts: trials + 2 })?;
    Ok(MartingaleSearch { ratio, witness: FiniteMartingale::from_haar(0.0, &coeffs)?, origin })
}

const GREEDY_SCALES: [f64; 5] = [0.0, 0.5, 1.0, 2.0, -1.0];
const GREEDY_PASSES: usize = 4;

fn greedy_plan(alphas: &[TransformSequence], depth: usize, rng: &mut impl Rng) -> (Vec<Step>, Option<f64>) {
    let mut plan: Vec<Step> = (0..depth).map(|_| Step::Walk(rng.gen_range(0.5..1.5))).collect();
    let score = |p: &[Step]| transform_ratio(alphas, &gauge_martingale(p)).unwrap_or(-1.0);
    let mut current = score(&plan);
    for _ in 0..GREEDY_PASSES {
        let mut improved = false;
        for n in 0..depth {
            for &c in &GREEDY_SCALES {
                for cand in [Step::Walk(c), Step::Double(c)] {
                    let keep = plan[n];
                    plan[n] = cand;
                    let s = score(&plan);
                    if s > current + 1e-12 {
                        current = s;
                        improved = true;
                    } else {
                        plan[n] = keep;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    (plan, if current >= 0.0 { Some(current) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> TransformSequence {
        TransformSequence::new(v.to_vec()).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn transform_examples() {
        let f = FiniteMartingale::from_haar(0.5, &[vec![1.0], vec![0.25, -2.0]]).unwrap();
        assert_eq!(f.defect(), 0.0);
        let t = transform(&TransformSequence::constant(1.0), &f);
        for (a, b) in t.level(2).iter().zip(f.level(2)) {
            assert_eq!(*a, b - 0.5);
        }
        let z = transform(&TransformSequence::constant(0.0), &f);
        assert!(z.levels().iter().flatten().all(|v| *v == 0.0));
        let h = FiniteMartingale::from_haar(0.0, &[vec![1.0]]).unwrap();
        assert_eq!(transform(&seq(&[2.0]), &h).level(1), &[2.0, -2.0]);
    }

    #[test]
    fn span_examples() {
        assert_eq!(span_test(&[seq(&[1.0, 3.0]), seq(&[1.0, 3.0])]).unwrap(), Some(vec![q(1)]));
        assert_eq!(span_test(&[seq(&[1.0, 0.0]), seq(&[0.0, 1.0])]).unwrap(), None);
        let a2 = seq(&[1.0, 0.0, 2.0]);
        let a3 = seq(&[0.0, 1.0]);
        let a1 = seq(&(0..6).map(|n| 2.0 * a2.at(n) + a3.at(n)).collect::<Vec<_>>());
        assert_eq!(span_test(&[a1, a2, a3]).unwrap(), Some(vec![q(2), q(1)]));
    }

    #[test]
    fn ratio_examples() {
        let a = seq(&[1.0, 0.5, -2.0]);
        let same = ratio_search(&[a.clone(), a.clone()], 8, 10, 1).unwrap();
        assert_eq!(same.ratio, 1.0);
        let double = seq(&[2.0, 1.0, -4.0]);
        assert_eq!(ratio_search(&[double, a], 8, 10, 1).unwrap().ratio, 2.0);
    }

    #[test]
    fn lacunary_grows_with_depth() {
        let alphas = [seq(&[1.0, 0.0]), seq(&[0.0, 1.0])];
        let r8 = ratio_search(&alphas, 8, 20, 3).unwrap();
        let r16 = ratio_search(&alphas, 16, 20, 3).unwrap();
        assert!(r16.ratio >= 1.05 * r8.ratio, "{} vs {}", r16.ratio, r8.ratio);
        assert!(r16.witness.defect() <= 1e-12);
    }
}
