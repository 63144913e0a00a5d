use alloc::vec;
use alloc::vec::Vec;

/// Doubles the resolution along one periodic axis with 4-point cubic
/// interpolation.
pub fn prolong_axis(values: &[f64], sizes: &[usize], axis: usize) -> (Vec<f64>, Vec<usize>) {
    let n = sizes[axis];
    let inner: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    let mut new_sizes = sizes.to_vec();
    new_sizes[axis] = 2 * n;
    let mut out = vec![0.0; values.len() * 2];
    for b in 0..outer {
        let src = &values[b * n * inner..(b + 1) * n * inner];
        let dst = &mut out[b * 2 * n * inner..(b + 1) * 2 * n * inner];
        for i in 0..n {
            let at = |k: isize| &src[(k.rem_euclid(n as isize) as usize) * inner..][..inner];
            let i = i as isize;
            let (m1, c0, c1, c2) = (at(i - 1), at(i), at(i + 1), at(i + 2));
            let ii = i as usize;
            dst[2 * ii * inner..(2 * ii + 1) * inner].copy_from_slice(c0);
            let odd = &mut dst[(2 * ii + 1) * inner..(2 * ii + 2) * inner];
            for t in 0..inner {
                odd[t] = (-m1[t] + 9.0 * c0[t] + 9.0 * c1[t] - c2[t]) / 16.0;
            }
        }
    }
    (out, new_sizes)
}

/// Refines by `factors[j]` (powers of two) along each axis.
pub fn prolong(values: &[f64], sizes: &[usize], factors: &[usize]) -> (Vec<f64>, Vec<usize>) {
    let mut v = values.to_vec();
    let mut s = sizes.to_vec();
    for (axis, &f) in factors.iter().enumerate() {
        assert!(f.is_power_of_two(), "refinement factor must be a power of two");
        let mut f = f;
        while f > 1 {
            let (nv, ns) = prolong_axis(&v, &s, axis);
            v = nv;
            s = ns;
            f /= 2;
        }
    }
    (v, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_locally() {
        let n = 16;
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x * x * x;
        let v: Vec<f64> = (0..n).map(|i| f(i as f64)).collect();
        let (w, s) = prolong_axis(&v, &[n], 0);
        assert_eq!(s, vec![32]);
        for i in 2..n - 3 {
            assert_eq!(w[2 * i], v[i]);
            assert!((w[2 * i + 1] - f(i as f64 + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_dimensional_factors() {
        let v: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let (w, s) = prolong(&v, &[4, 4], &[2, 4]);
        assert_eq!(s, vec![8, 16]);
        assert_eq!(w.len(), 128);
        assert_eq!(w[0], v[0]);
        assert_eq!(w[2 * 16 + 4], v[4 + 1]);
    }
}
