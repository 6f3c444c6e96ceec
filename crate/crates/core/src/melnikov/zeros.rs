//! Zero counting for sampled Melnikov functions: sign changes with
//! bisection refinement and near-tangency flags.

use super::MelnikovError;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct ZeroCountOptions {
    /// Target bracket width.
    pub bracket_width: f64,
    /// |M| below this at a local extremum flags a multiplicity suspect.
    pub tangency_tol: f64,
    /// Initial samples when the caller's grid is sparse.
    pub min_samples: usize,
}

impl Default for ZeroCountOptions {
    fn default() -> Self {
        Self {
            bracket_width: 1e-6,
            tangency_tol: 1e-7,
            min_samples: 17,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroCount {
    pub count: usize,
    /// One refined `(lo, hi)` bracket per sign change.
    pub brackets: Vec<(f64, f64)>,
    /// Local extrema with |M| under the tangency tolerance: possible
    /// multiple zeros that bisection cannot certify.
    pub suspects: Vec<f64>,
}

/// Counts zeros of `f` on `[lo, hi]` by sign changes over a grid (refined
/// automatically), bisecting each bracket down to the target width.
pub fn count_zeros<F>(
    mut f: F,
    interval: (f64, f64),
    opts: &ZeroCountOptions,
) -> Result<ZeroCount, MelnikovError>
where
    F: FnMut(f64) -> Result<f64, MelnikovError>,
{
    let (lo, hi) = interval;
    assert!(hi > lo, "empty interval");
    let n = opts.min_samples.max(3);
    let mut xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push(f(x)?);
    }
    // One refinement pass around small-magnitude regions so that closely
    // spaced sign changes get separated.
    let scale = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut extra = Vec::new();
    for w in xs.windows(2).zip(vals.windows(2)) {
        let ((x0, x1), (v0, v1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
        if v0.abs() < 0.05 * scale || v1.abs() < 0.05 * scale {
            extra.push(0.5 * (x0 + x1));
        }
    }
    for x in extra {
        let v = f(x)?;
        let pos = xs.partition_point(|&u| u < x);
        xs.insert(pos, x);
        vals.insert(pos, v);
    }

    let mut brackets = Vec::new();
    let mut suspects = Vec::new();
    for i in 0..xs.len() - 1 {
        let (mut a, mut b) = (xs[i], xs[i + 1]);
        let (mut fa, mut fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 {
            // Exact zero at a sample: treat as a degenerate bracket.
            brackets.push((a, a));
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        // Bisection to the target width.
        let mut stalled = false;
        while b - a > opts.bracket_width {
            let mid = 0.5 * (a + b);
            let fm = f(mid)?;
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                b = mid;
                fb = fm;
            }
            if fa.abs() < 1e-14 * scale && fb.abs() < 1e-14 * scale {
                stalled = true;
                break;
            }
        }
        if stalled {
            return Err(MelnikovError::InconclusiveZero(0.5 * (a + b)));
        }
        brackets.push((a, b));
    }
    // Near-tangency scan: refine each interior local minimum of |value|
    // that has no sign change and test it against the tolerance.
    for i in 1..xs.len() - 1 {
        let v = vals[i];
        if v == 0.0
            || v.abs() > vals[i - 1].abs()
            || v.abs() > vals[i + 1].abs()
            || vals[i - 1].signum() != vals[i + 1].signum()
        {
            continue;
        }
        let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
        let mut best = (xs[i], v.abs());
        for _ in 0..60 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            let f1 = f(m1)?.abs();
            let f2 = f(m2)?.abs();
            if f1 < best.1 {
                best = (m1, f1);
            }
            if f2 < best.1 {
                best = (m2, f2);
            }
            if f1 < f2 {
                b = m2;
            } else {
                a = m1;
            }
            if b - a < opts.bracket_width {
                break;
            }
        }
        if best.1 < opts.tangency_tol * scale {
            suspects.push(best.0);
        }
    }
    Ok(ZeroCount {
        count: brackets.len(),
        brackets,
        suspects,
    })
}
