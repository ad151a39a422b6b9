//! Small scalar numerics shared by the solvers: compensated summation,
//! bracketed one-dimensional search and fixed Gauss-Legendre quadrature.

/// Neumaier-compensated sum of the terms, added in order of decreasing
/// magnitude.
pub fn compensated_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in terms.iter() {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns `(argmax, max)`. The endpoints are compared against the interior
/// optimum so a monotone `f` returns the better endpoint.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, x_tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(|x| -f(x), a, b, x_tol);
    (x, -v)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (zero counts as either).
/// When both endpoints are positive and the ratio `hi / lo` is large the
/// midpoint is taken geometrically so that brackets spanning many decades
/// shrink in relative terms.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    for _ in 0..2000 {
        if (hi - lo).abs() <= x_tol {
            break;
        }
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

// 10-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// 10-point Gauss-Legendre approximation of the integral of `f` over `[a, b]`.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += w * (f(c - r * x) + f(c + r * x));
    }
    acc * r
}

/// Natural logarithm of `n!`.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}
