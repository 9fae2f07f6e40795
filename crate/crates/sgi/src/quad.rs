//! Panel-adaptive Gauss-Legendre quadrature in one and two dimensions.
//!
//! The panel-splitting strategy is fully deterministic for a fixed
//! [`QuadratureSpec`]: no randomness, no wall-clock, no hash iteration, so
//! repeated runs produce bit-identical results.

use crate::error::{Error, Result};

/// Controls for the adaptive quadrature engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per panel (per axis in 2-D).
    pub node_count: usize,
    /// Maximum number of panels before giving up.
    pub panel_count: usize,
    /// Target: error estimate <= relative_tolerance * integral scale.
    pub relative_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            node_count: 15,
            panel_count: 4096,
            relative_tolerance: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 2 {
            return Err(Error::InvalidParameter {
                name: "node_count",
                reason: "must be >= 2",
                value: self.node_count as f64,
            });
        }
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance <= 1e-2) {
            return Err(Error::InvalidParameter {
                name: "relative_tolerance",
                reason: "must lie in (0, 1e-2]",
                value: self.relative_tolerance,
            });
        }
        Ok(())
    }
}

/// Integral value together with the achieved error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) via the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((-x, w));
    }
    rule
}

struct Panel {
    a: f64,
    b: f64,
    /// refined value: sum over the two half-panels
    fine: f64,
    /// |refined - coarse|
    err: f64,
    /// refined integral of |f|
    abs: f64,
}

fn eval_interval<F: Fn(f64) -> f64>(f: &F, rule: &[(f64, f64)], a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    let mut abs = 0.0;
    for &(x, w) in rule {
        let v = f(c + h * x);
        sum += w * v;
        abs += w * v.abs();
    }
    (sum * h, abs * h)
}

fn make_panel<F: Fn(f64) -> f64>(f: &F, rule: &[(f64, f64)], a: f64, b: f64) -> Panel {
    let (coarse, _) = eval_interval(f, rule, a, b);
    let m = 0.5 * (a + b);
    let (l, la) = eval_interval(f, rule, a, m);
    let (r, ra) = eval_interval(f, rule, m, b);
    Panel {
        a,
        b,
        fine: l + r,
        err: (l + r - coarse).abs(),
        abs: la + ra,
    }
}

/// Adaptive 1-D integral of `f` over [a, b].
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if a == b {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0 });
    }
    let rule = gauss_legendre(spec.node_count);
    let mut panels = vec![make_panel(&f, &rule, a, b)];
    loop {
        let total: f64 = panels.iter().map(|p| p.fine).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let total_abs: f64 = panels.iter().map(|p| p.abs).sum();
        let scale = total.abs().max(total_abs).max(f64::MIN_POSITIVE);
        if total_err <= spec.relative_tolerance * scale {
            return Ok(QuadResult { value: total, error_estimate: total_err });
        }
        if panels.len() >= spec.panel_count {
            return Err(Error::QuadratureNonConvergence {
                achieved: total_err / scale,
                requested: spec.relative_tolerance,
            });
        }
        // split the worst panel; ties resolved by the leftmost index
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| p.err.partial_cmp(&q.err).unwrap().then(j.cmp(i)))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, .. } = panels[worst];
        let m = 0.5 * (a + b);
        panels[worst] = make_panel(&f, &rule, a, m);
        panels.push(make_panel(&f, &rule, m, b));
    }
}

struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    fine: f64,
    err: f64,
    abs: f64,
}

fn eval_rect<F: Fn(f64, f64) -> f64>(
    f: &F,
    rule: &[(f64, f64)],
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> (f64, f64) {
    let cx = 0.5 * (x0 + x1);
    let hx = 0.5 * (x1 - x0);
    let cy = 0.5 * (y0 + y1);
    let hy = 0.5 * (y1 - y0);
    let mut sum = 0.0;
    let mut abs = 0.0;
    for &(xi, wi) in rule {
        let x = cx + hx * xi;
        for &(yj, wj) in rule {
            let v = f(x, cy + hy * yj);
            sum += wi * wj * v;
            abs += wi * wj * v.abs();
        }
    }
    (sum * hx * hy, abs * hx * hy)
}

fn make_cell<F: Fn(f64, f64) -> f64>(
    f: &F,
    rule: &[(f64, f64)],
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
) -> Cell {
    let (coarse, _) = eval_rect(f, rule, x0, x1, y0, y1);
    let mx = 0.5 * (x0 + x1);
    let my = 0.5 * (y0 + y1);
    let mut fine = 0.0;
    let mut abs = 0.0;
    for &(qx0, qx1, qy0, qy1) in &[
        (x0, mx, y0, my),
        (mx, x1, y0, my),
        (x0, mx, my, y1),
        (mx, x1, my, y1),
    ] {
        let (v, a) = eval_rect(f, rule, qx0, qx1, qy0, qy1);
        fine += v;
        abs += a;
    }
    Cell {
        x0,
        x1,
        y0,
        y1,
        fine,
        err: (fine - coarse).abs(),
        abs,
    }
}

/// Adaptive 2-D integral of `f` over the rectangle [x0,x1] x [y0,y1].
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    domain: (f64, f64, f64, f64),
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    let (x0, x1, y0, y1) = domain;
    if x0 == x1 || y0 == y1 {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0 });
    }
    let rule = gauss_legendre(spec.node_count);
    let mut cells = vec![make_cell(&f, &rule, x0, x1, y0, y1)];
    loop {
        let total: f64 = cells.iter().map(|c| c.fine).sum();
        let total_err: f64 = cells.iter().map(|c| c.err).sum();
        let total_abs: f64 = cells.iter().map(|c| c.abs).sum();
        let scale = total.abs().max(total_abs).max(f64::MIN_POSITIVE);
        if total_err <= spec.relative_tolerance * scale {
            return Ok(QuadResult { value: total, error_estimate: total_err });
        }
        if cells.len() >= spec.panel_count {
            return Err(Error::QuadratureNonConvergence {
                achieved: total_err / scale,
                requested: spec.relative_tolerance,
            });
        }
        let worst = cells
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| p.err.partial_cmp(&q.err).unwrap().then(j.cmp(i)))
            .map(|(i, _)| i)
            .unwrap();
        let Cell { x0, x1, y0, y1, .. } = cells[worst];
        let mx = 0.5 * (x0 + x1);
        let my = 0.5 * (y0 + y1);
        cells[worst] = make_cell(&f, &rule, x0, mx, y0, my);
        cells.push(make_cell(&f, &rule, mx, x1, y0, my));
        cells.push(make_cell(&f, &rule, x0, mx, my, y1));
        cells.push(make_cell(&f, &rule, mx, x1, my, y1));
    }
}
