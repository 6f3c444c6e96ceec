//! Analytic continuation of the Picard-Fuchs system along paths in the
//! complex p-plane, and monodromy around singular points.

use super::eig::{eigenvalues, CMat, C64};
use super::rk::{integrate_to, RkOptions};
use super::NumericError;
use serde::Serialize;

/// A linear system `dv/dp = Ω(p)·v` with a known singular locus.
pub trait LinearSystem {
    fn dim(&self) -> usize;
    /// Writes `Ω(p)·v` into `out`.
    fn apply(&self, p: C64, v: &[C64], out: &mut [C64]);
    fn singular_points(&self) -> Vec<C64>;
}

#[derive(Clone, Debug)]
pub struct ContinuationOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Required clearance between the path and the singular locus.
    pub margin: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            atol: 1e-15,
            margin: 1e-3,
        }
    }
}

fn point_segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / denom;
    let t = t.clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

fn check_polyline_margin<S: LinearSystem + ?Sized>(
    sys: &S,
    path: &[C64],
    margin: f64,
) -> Result<(), NumericError> {
    for seg in path.windows(2) {
        for s in sys.singular_points() {
            let d = point_segment_distance(s, seg[0], seg[1]);
            if d < margin {
                return Err(NumericError::SingularityTooClose { dist: d, margin });
            }
        }
    }
    Ok(())
}

/// Continues `v0` along the polyline `path` (straight segments).
pub fn continue_system<S: LinearSystem + ?Sized>(
    sys: &S,
    path: &[C64],
    v0: Vec<C64>,
    opts: &ContinuationOptions,
) -> Result<Vec<C64>, NumericError> {
    assert!(path.len() >= 2, "path needs at least two points");
    assert_eq!(v0.len(), sys.dim());
    check_polyline_margin(sys, path, opts.margin)?;
    let mut v = v0;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let dp = b - a;
        let rhs = |s: f64, y: &Vec<C64>| -> Vec<C64> {
            let p = a + dp * s;
            let mut out = vec![C64::new(0.0, 0.0); y.len()];
            sys.apply(p, y, &mut out);
            for o in out.iter_mut() {
                *o *= dp;
            }
            out
        };
        v = integrate_to(
            rhs,
            0.0,
            1.0,
            v,
            RkOptions {
                rtol: opts.rtol,
                atol: opts.atol,
                h_max: 0.2,
                ..Default::default()
            },
        )?;
    }
    Ok(v)
}

/// Monodromy of the system around a circle `|p - center| = radius`,
/// starting (and ending) at `center + radius`.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyResult {
    pub center: [f64; 2],
    pub radius: f64,
    /// Row-major matrix entries as `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub eigenvalues: Vec<[f64; 2]>,
    /// Distance of each eigenvalue to the nearest root of unity of order
    /// at most the configured bound, with that root's order.
    pub quasiunipotency: Vec<QuasiunipotencyEntry>,
    pub det: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiunipotencyEntry {
    pub eigenvalue: [f64; 2],
    pub distance: f64,
    pub order: u32,
}

impl MonodromyResult {
    pub fn matrix_cmat(&self) -> CMat {
        let n = self.matrix.len();
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C64::new(self.matrix[i][j][0], self.matrix[i][j][1]);
            }
        }
        m
    }
}

/// Distance from `z` to the nearest root of unity of order <= `max_order`;
/// returns `(distance, order)`.
pub fn nearest_root_of_unity(z: C64, max_order: u32) -> (f64, u32) {
    let mut best = (f64::INFINITY, 1u32);
    for q in 1..=max_order {
        for k in 0..q {
            let root = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64);
            let d = (z - root).norm();
            // Prefer the lowest order among floating-point ties.
            if d + 1e-13 < best.0 {
                best = (d, q);
            }
        }
    }
    best
}

/// Continues the identity frame once around the circle and packages the
/// fundamental monodromy matrix with its spectral diagnostics.
pub fn monodromy<S: LinearSystem + ?Sized>(
    sys: &S,
    center: C64,
    radius: f64,
    max_root_order: u32,
    opts: &ContinuationOptions,
) -> Result<MonodromyResult, NumericError> {
    let n = sys.dim();
    // Margin: the circle itself must clear every singular point.
    for s in sys.singular_points() {
        let d = ((s - center).norm() - radius).abs();
        if d < opts.margin {
            return Err(NumericError::SingularityTooClose {
                dist: d,
                margin: opts.margin,
            });
        }
    }
    // State = fundamental matrix, row-stacked; dV/dθ = p'(θ)·Ω(p(θ))·V.
    let mut v0 = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v0[i * n + i] = C64::new(1.0, 0.0);
    }
    let rhs = |theta: f64, y: &Vec<C64>| -> Vec<C64> {
        let p = center + C64::from_polar(radius, theta);
        let dp = C64::new(0.0, 1.0) * C64::from_polar(radius, theta);
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        let mut col = vec![C64::new(0.0, 0.0); n];
        let mut res = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = y[i * n + j];
            }
            sys.apply(p, &col, &mut res);
            for i in 0..n {
                out[i * n + j] = res[i] * dp;
            }
        }
        out
    };
    let vend = integrate_to(
        rhs,
        0.0,
        2.0 * std::f64::consts::PI,
        v0,
        RkOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            h_max: 0.1,
            ..Default::default()
        },
    )?;
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = vend[i * n + j];
        }
    }
    let eigs = eigenvalues(&m);
    let quasi = eigs
        .iter()
        .map(|&z| {
            let (distance, order) = nearest_root_of_unity(z, max_root_order);
            QuasiunipotencyEntry {
                eigenvalue: [z.re, z.im],
                distance,
                order,
            }
        })
        .collect();
    Ok(MonodromyResult {
        center: [center.re, center.im],
        radius,
        matrix: (0..n)
            .map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect(),
        eigenvalues: eigs.iter().map(|z| [z.re, z.im]).collect(),
        quasiunipotency: quasi,
        det: {
            let d = m.det();
            [d.re, d.im]
        },
    })
}
