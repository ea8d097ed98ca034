//! One- and two-dimensional quadrature.
//!
//! The workhorse is adaptive Simpson with the Richardson correction
//! `(S2 - S1)/15` applied on accepted panels. Tolerances are mixed: a panel
//! is accepted when `|S2 - S1| <= 15 * max(abs_floor, rel_tol * |S2|)`
//! scaled by the panel's share of the interval.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_floor: 1e-12,
            max_depth: 48,
        }
    }
}

struct Simpson<'a, F: FnMut(f64) -> Result<f64>> {
    f: &'a mut F,
    opts: QuadOptions,
    evals: usize,
}

impl<'a, F: FnMut(f64) -> Result<f64>> Simpson<'a, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evals += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let both = left + right;
        let delta = both - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(both + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureNonConvergence(format!(
                "panel [{:.6e}, {:.6e}] still has error {:.3e} at maximum depth",
                a, b, delta.abs()
            )));
        }
        let half = (0.5 * tol).max(self.opts.abs_floor * 0.5);
        Ok(self.recurse(a, m, fa, flm, fm, left, half, depth - 1)?
            + self.recurse(m, b, fm, frm, fb, right, half, depth - 1)?)
    }
}

/// Adaptive Simpson integral of `f` over `[a, b]`.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let mut s = Simpson {
        f: &mut f,
        opts,
        evals: 0,
    };
    // Seed with a coarse composite estimate so the tolerance is relative to
    // the size of the whole integral, not the first panel.
    let n = 16;
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=2 * n).map(|i| a + 0.5 * h * i as f64).collect();
    let mut fx = Vec::with_capacity(xs.len());
    for &x in &xs {
        fx.push(s.eval(x)?);
    }
    let mut coarse = 0.0;
    for i in 0..n {
        coarse += h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    }
    let tol_total = (opts.rel_tol * coarse.abs()).max(opts.abs_floor);
    let mut total = 0.0;
    for i in 0..n {
        let (fa, fm, fb) = (fx[2 * i], fx[2 * i + 1], fx[2 * i + 2]);
        let whole = h / 6.0 * (fa + 4.0 * fm + fb);
        total += s.recurse(
            xs[2 * i],
            xs[2 * i + 2],
            fa,
            fm,
            fb,
            whole,
            tol_total / n as f64,
            opts.max_depth,
        )?;
    }
    Ok(total)
}

/// Iterated adaptive Simpson over the rectangle `[x0,x1] x [y0,y1]`.
pub fn adaptive_simpson_2d<F>(
    f: F,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    opts: QuadOptions,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let inner = QuadOptions {
        rel_tol: opts.rel_tol * 0.1,
        ..opts
    };
    adaptive_simpson(
        |x| adaptive_simpson(|y| f(x, y), y0, y1, inner),
        x0,
        x1,
        opts,
    )
}

/// Composite Simpson with `n` (even) panels, used for refinement studies.
pub fn composite_simpson<F>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = if n % 2 == 1 { n + 1 } else { n };
    let h = (b - a) / n as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64)?;
    }
    Ok(acc * h / 3.0)
}

/// Observed convergence order from three estimates at step sizes h, h/2, h/4.
pub fn observed_order(coarse: f64, mid: f64, fine: f64) -> f64 {
    ((coarse - mid).abs() / (mid - fine).abs()).log2()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Richardson extrapolation of samples `values[k] ~ L + c1 h_k + c2 h_k^2 + ...`
/// taken at step sizes `hs[k]` (Neville tableau at h = 0).
pub fn richardson_limit(hs: &[f64], values: &[f64]) -> f64 {
    let n = hs.len();
    let mut t = values.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            t[i] = (hs[i - k] * t[i] - hs[i] * t[i - 1]) / (hs[i - k] - hs[i]);
        }
    }
    t[n - 1]
}
