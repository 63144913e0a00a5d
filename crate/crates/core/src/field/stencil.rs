use alloc::vec::Vec;

// float methods without std
#[allow(unused_imports)]
use num_traits::{Float as _, ToPrimitive};

use crate::algebra::solve;
use crate::Rational;

/// Exact centered finite-difference weights for `d^m/dx^m` (unit spacing),
/// as `(offset, weight)` pairs.
pub fn fd_weights(order: u32, accuracy: usize) -> Vec<(isize, Rational)> {
    let r = if order == 0 { 0 } else { ((order as usize + 1) / 2 - 1 + accuracy / 2) as isize };
    let offsets: Vec<isize> = (-r..=r).collect();
    let npts = offsets.len();
    let rows: Vec<Vec<Rational>> = (0..npts)
        .map(|k| offsets.iter().map(|&o| Rational::from_integer(o.into()).pow(k as i32)).collect())
        .collect();
    let mut rhs = alloc::vec![Rational::from_integer(0.into()); npts];
    let fact: num_bigint::BigInt = (1..=order as u64).product::<u64>().into();
    if (order as usize) < npts {
        rhs[order as usize] = Rational::from_integer(fact);
    }
    let w = solve(&rows, &rhs).expect("Vandermonde system is nonsingular");
    offsets.into_iter().zip(w).filter(|(_, w)| *w != Rational::from_integer(0.into())).collect()
}

/// Circulant weights of trigonometric differentiation on `n` points of `[0,1)`.
pub fn spectral_weights(order: u32, n: usize) -> Vec<(isize, f64)> {
    let tau = 2.0 * core::f64::consts::PI;
    let half = (n / 2) as isize;
    let quarter_turns = core::f64::consts::FRAC_PI_2 * order as f64;
    (0..n as isize)
        .map(|k| {
            let mut w = 0.0;
            for j in (-half + 1)..=half {
                if j == half && order % 2 == 1 {
                    continue;
                }
                // Re[(iτj)^m e^{−iτjk/n}]
                w += (tau * j as f64).powi(order as i32) * (quarter_turns - tau * (j * k) as f64 / n as f64).cos();
            }
            let off = if k > half { k - n as isize } else { k };
            (off, w / n as f64)
        })
        .collect()
}

/// A one-dimensional periodic stencil scaled to the grid spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    taps: Vec<(isize, f64)>,
}

impl Stencil {
    pub fn finite_difference(order: u32, accuracy: usize, n: usize) -> Self {
        let scale = (n as f64).powi(order as i32);
        let taps = fd_weights(order, accuracy)
            .into_iter()
            .map(|(o, w)| (o, w.to_f64().unwrap_or(f64::NAN) * scale))
            .collect();
        Stencil { taps }
    }

    pub fn spectral(order: u32, n: usize) -> Self {
        Stencil { taps: spectral_weights(order, n) }
    }

    pub fn taps(&self) -> &[(isize, f64)] {
        &self.taps
    }

    pub fn radius(&self) -> usize {
        self.taps.iter().map(|(o, _)| o.unsigned_abs()).max().unwrap_or(0)
    }

    /// `dst[i] = Σ w·src[i + o]` along `axis` (or `src[i − o]` for the adjoint).
    pub fn apply(&self, src: &[f64], dst: &mut [f64], sizes: &[usize], axis: usize, adjoint: bool) {
        let n = sizes[axis];
        let inner: usize = sizes[axis + 1..].iter().product();
        let outer: usize = sizes[..axis].iter().product();
        let taps: Vec<(usize, f64)> = self
            .taps
            .iter()
            .map(|&(o, w)| {
                let o = if adjoint { -o } else { o };
                (o.rem_euclid(n as isize) as usize, w)
            })
            .collect();
        if inner == 1 {
            for b in 0..outer {
                let s = &src[b * n..(b + 1) * n];
                let d = &mut dst[b * n..(b + 1) * n];
                for (i, di) in d.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for &(o, w) in &taps {
                        let mut j = i + o;
                        if j >= n {
                            j -= n;
                        }
                        acc += w * s[j];
                    }
                    *di = acc;
                }
            }
            return;
        }
        for b in 0..outer {
            let base = b * n * inner;
            for i in 0..n {
                let drow = &mut dst[base + i * inner..base + (i + 1) * inner];
                drow.iter_mut().for_each(|v| *v = 0.0);
                for &(o, w) in &taps {
                    let mut j = i + o;
                    if j >= n {
                        j -= n;
                    }
                    let srow = &src[base + j * inner..base + (j + 1) * inner];
                    for (dv, sv) in drow.iter_mut().zip(srow) {
                        *dv += w * sv;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn classic_weights() {
        assert_eq!(fd_weights(1, 2), vec![(-1, q(-1, 2)), (1, q(1, 2))]);
        assert_eq!(fd_weights(2, 2), vec![(-1, q(1, 1)), (0, q(-2, 1)), (1, q(1, 1))]);
        assert_eq!(
            fd_weights(1, 4),
            vec![(-2, q(1, 12)), (-1, q(-2, 3)), (1, q(2, 3)), (2, q(-1, 12))]
        );
        assert_eq!(
            fd_weights(2, 4),
            vec![(-2, q(-1, 12)), (-1, q(4, 3)), (0, q(-5, 2)), (1, q(4, 3)), (2, q(-1, 12))]
        );
        assert_eq!(fd_weights(4, 4).len(), 7);
        assert_eq!(fd_weights(0, 4), vec![(0, q(1, 1))]);
    }

    #[test]
    fn weights_are_symmetric_by_parity() {
        for m in 1..6u32 {
            let w = fd_weights(m, 4);
            for (o, v) in &w {
                let mirror = w.iter().find(|(p, _)| *p == -o).map(|(_, v)| v.clone()).unwrap();
                let sign = if m % 2 == 0 { 1 } else { -1 };
                assert_eq!(mirror, v * Rational::from_integer(sign.into()));
            }
        }
    }

    #[test]
    fn spectral_first_derivative_matches_symbol() {
        let n = 8;
        let st = Stencil::spectral(1, n);
        let tau = 2.0 * core::f64::consts::PI;
        for freq in 1..4 {
            let f: Vec<f64> = (0..n).map(|i| (tau * freq as f64 * i as f64 / n as f64).cos()).collect();
            let mut g = vec![0.0; n];
            st.apply(&f, &mut g, &[n], 0, false);
            for i in 0..n {
                let expect = -tau * freq as f64 * (tau * freq as f64 * i as f64 / n as f64).sin();
                assert!((g[i] - expect).abs() < 1e-9, "freq {freq} i {i}: {} vs {expect}", g[i]);
            }
        }
    }
}
