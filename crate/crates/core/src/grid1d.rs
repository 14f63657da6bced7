//! One-dimensional density evolution on a uniform grid.
//!
//! Densities are nodal values on `m` equally spaced points and integrate to
//! one under the trapezoidal rule. Gaussian convolutions use a sampled kernel
//! truncated at 8 standard deviations and renormalised to unit discrete mass;
//! the truncated tail is below `1e-14` of the kernel mass.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::targets::Target;

/// Tail mass tolerated outside the grid domain.
pub const TAIL_MASS_TOL: f64 = 1e-10;

/// Kernel half-width in standard deviations.
pub const KERNEL_WIDTH_SD: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity1D {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    clipped_mass: f64,
}

impl GridDensity1D {
    /// Normalizes raw nodal values; negative values are clipped to zero and
    /// the clipped mass is recorded.
    pub fn from_values(lo: f64, hi: f64, mut values: Vec<f64>) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("domain", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if values.len() < 3 {
            return Err(invalid("m", "need at least 3 grid points"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotANumber {
                context: "grid density values",
            });
        }
        let h = (hi - lo) / (values.len() - 1) as f64;
        let mut clipped = 0.0;
        for v in values.iter_mut() {
            if *v < 0.0 {
                clipped += -*v * h;
                *v = 0.0;
            }
        }
        let mass = trapezoid(&values, h);
        if !(mass > 0.0) {
            return Err(invalid("values", "density has zero mass on the grid"));
        }
        values.iter_mut().for_each(|v| *v /= mass);
        Ok(GridDensity1D {
            lo,
            hi,
            values,
            clipped_mass: clipped,
        })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass removed by clipping negative values at construction.
    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    pub fn x(&self, i: usize) -> f64 {
        self.lo + self.spacing() * i as f64
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.values.len()).map(move |i| self.lo + h * i as f64)
    }

    /// Trapezoidal integral of `g(x) * rho(x)`.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.spacing();
        let w: Vec<f64> = self.xs().zip(&self.values).map(|(x, v)| g(x) * v).collect();
        trapezoid(&w, h)
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.spacing())
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|x| (x - m) * (x - m))
    }

    /// Linear interpolation; zero outside the domain.
    pub fn interpolate(&self, x: f64) -> f64 {
        interp(&self.values, self.lo, self.spacing(), x)
    }

    /// Mass of the piecewise-linear density on `[a, b]`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if b <= a {
            return 0.0;
        }
        let h = self.spacing();
        let mut pts = vec![a];
        let first = ((a - self.lo) / h).floor() as usize + 1;
        let mut i = first;
        while i < self.values.len() && self.x(i) < b {
            pts.push(self.x(i));
            i += 1;
        }
        pts.push(b);
        pts.windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.interpolate(w[0]) + self.interpolate(w[1])))
            .sum()
    }

    /// Same domain and spacing.
    pub fn same_grid(&self, other: &GridDensity1D) -> bool {
        self.values.len() == other.values.len() && self.lo == other.lo && self.hi == other.hi
    }

    /// Two-column CSV `x,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# x: grid node; value: normalized density\nx,value\n");
        for (x, v) in self.xs().zip(&self.values) {
            let _ = writeln!(out, "{x:?},{v:?}");
        }
        out
    }

    fn renormalized(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        Self::from_values(lo, hi, values)
    }
}

pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

fn interp(values: &[f64], lo: f64, h: f64, x: f64) -> f64 {
    let s = (x - lo) / h;
    let last = (values.len() - 1) as f64;
    if !(s >= 0.0) || s > last {
        return 0.0;
    }
    let i = (s.floor() as usize).min(values.len() - 2);
    let w = s - i as f64;
    values[i] * (1.0 - w) + values[i + 1] * w
}

/// Samples a density on `m >= 101` points of `[lo, hi]` and normalizes it.
///
/// Tail mass is estimated from the density one spacing beyond each endpoint,
/// times `100 h`; estimates above `1e-10` are rejected.
pub fn discretize(density: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> Result<GridDensity1D> {
    if m < 101 {
        return Err(invalid("m", format!("need at least 101 points, got {m}")));
    }
    if !(hi > lo) {
        return Err(invalid("domain", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let h = (hi - lo) / (m - 1) as f64;
    let estimate = (density(lo - h).abs() + density(hi + h).abs()) * h * 100.0;
    if !(estimate <= TAIL_MASS_TOL) {
        return Err(Error::TailMass { estimate, lo, hi });
    }
    let values: Vec<f64> = (0..m).map(|i| density(lo + h * i as f64)).collect();
    GridDensity1D::from_values(lo, hi, values)
}

/// Discretizes a normalized 1D target `exp(-f)`.
pub fn discretize_target(target: &Target, lo: f64, hi: f64, m: usize) -> Result<GridDensity1D> {
    require_1d(target)?;
    discretize(|x| target.density(&[x]), lo, hi, m)
}

fn require_1d(target: &Target) -> Result<()> {
    if target.dimension() != 1 {
        return Err(invalid(
            "target",
            format!("grid engine is 1D, target has dimension {}", target.dimension()),
        ));
    }
    Ok(())
}

/// Largest stable explicit time step: `min(0.4 h^2, 0.4 h / max|f'|)`.
pub fn max_fokker_planck_dt(rho: &GridDensity1D, target: &Target) -> f64 {
    let h = rho.spacing();
    let max_grad = rho.xs().map(|x| target.gradient_1d(x).abs()).fold(0.0f64, f64::max);
    let diffusion = 0.4 * h * h;
    if max_grad > 0.0 {
        diffusion.min(0.4 * h / max_grad)
    } else {
        diffusion
    }
}

/// One explicit finite-volume step of `d rho/dt = (rho f')' + rho''` with
/// zero-flux boundaries.
///
/// The flux is written as `nu (rho / nu)'` with the interface weight
/// `sqrt(nu_i nu_{i+1})`, which only needs potential differences and keeps
/// the nodal samples of `exp(-f)` exactly stationary. Boundary nodes carry
/// half cells so that trapezoidal mass is conserved.
pub fn fokker_planck_step(rho: &GridDensity1D, target: &Target, dt: f64) -> Result<GridDensity1D> {
    require_1d(target)?;
    let max_dt = max_fokker_planck_dt(rho, target);
    if !(dt > 0.0) || dt > max_dt {
        return Err(Error::Cfl { dt, max_dt });
    }
    let m = rho.len();
    let h = rho.spacing();
    let f: Vec<f64> = rho.xs().map(|x| target.potential(&[x])).collect();
    let v = rho.values();
    // flux[i] is the leftward mass flow from node i+1 into node i
    let flux: Vec<f64> = (0..m - 1)
        .map(|i| {
            let df = 0.5 * (f[i + 1] - f[i]);
            (v[i + 1] * df.exp() - v[i] * (-df).exp()) / h
        })
        .collect();
    let mut next = Vec::with_capacity(m);
    for i in 0..m {
        let right = if i + 1 < m { flux[i] } else { 0.0 };
        let left = if i > 0 { flux[i - 1] } else { 0.0 };
        let width = if i == 0 || i == m - 1 { 0.5 * h } else { h };
        next.push(v[i] + dt * (right - left) / width);
    }
    GridDensity1D::renormalized(rho.lo, rho.hi, next)
}

/// Sampled `N(0, var)` kernel on spacing `h`, truncated at 8 sd, unit sum.
fn gaussian_kernel(var: f64, h: f64) -> Vec<f64> {
    let sd = var.sqrt();
    let half = (KERNEL_WIDTH_SD * sd / h).ceil() as usize;
    if half == 0 {
        return vec![1.0];
    }
    let mut k: Vec<f64> = (0..=2 * half)
        .map(|j| {
            let x = (j as f64 - half as f64) * h;
            (-x * x / (2.0 * var)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= s);
    k
}

fn convolve(values: &[f64], kernel: &[f64]) -> Vec<f64> {
    let m = values.len();
    let half = kernel.len() / 2;
    (0..m)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(m - 1);
            (lo..=hi).map(|j| values[j] * kernel[j + half - i]).sum()
        })
        .collect()
}

/// Convolution with `N(0, 2t)`.
pub fn heat_flow_grid(rho: &GridDensity1D, t: f64) -> Result<GridDensity1D> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let kernel = gaussian_kernel(2.0 * t, rho.spacing());
    GridDensity1D::renormalized(rho.lo, rho.hi, convolve(&rho.values, &kernel))
}

/// Solves `x - eps f'(x) = y` for increasing `T` by bisection to `1e-12`.
fn invert_gradient_step(target: &Target, eps: f64, y: f64, guess: f64) -> f64 {
    let t = |x: f64| x - eps * target.gradient_1d(x);
    let mut width = 1.0;
    let (mut a, mut b) = (guess - width, guess + width);
    while t(a) > y {
        width *= 2.0;
        a = guess - width;
    }
    width = 1.0;
    while t(b) < y {
        width *= 2.0;
        b = guess + width;
    }
    for _ in 0..200 {
        if b - a <= 1e-12 {
            break;
        }
        let mid = 0.5 * (a + b);
        if t(mid) < y {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Exact-in-law ULA step on the grid: pushforward under `T(x) = x - eps f'(x)`
/// by change of variables, then convolution with `N(0, 2 eps)`.
pub fn ula_density_step(rho: &GridDensity1D, target: &Target, eps: f64) -> Result<GridDensity1D> {
    require_1d(target)?;
    let l = target.smoothness();
    if !(eps > 0.0) || eps >= 1.0 / l {
        return Err(Error::StepSizeWindow {
            eps,
            window: format!("0 < eps < 1/L = {} (x - eps f'(x) must be a bijection)", 1.0 / l),
        });
    }
    let mut pushed = Vec::with_capacity(rho.len());
    let mut guess = rho.lo;
    for y in rho.xs() {
        let x = invert_gradient_step(target, eps, y, guess);
        guess = x;
        let jac = 1.0 - eps * target.second_derivative_1d(x);
        pushed.push(rho.interpolate(x) / jac);
    }
    let kernel = gaussian_kernel(2.0 * eps, rho.spacing());
    GridDensity1D::renormalized(rho.lo, rho.hi, convolve(&pushed, &kernel))
}

/// Iterates [`ula_density_step`] until the sup-norm change per step drops
/// below `tol` or `max_steps` is reached; returns the density and steps taken.
pub fn ula_density_fixed_point(
    start: &GridDensity1D,
    target: &Target,
    eps: f64,
    tol: f64,
    max_steps: usize,
) -> Result<(GridDensity1D, usize)> {
    let mut cur = start.clone();
    for k in 1..=max_steps {
        let next = ula_density_step(&cur, target, eps)?;
        let change = next
            .values()
            .iter()
            .zip(cur.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        cur = next;
        if change < tol {
            return Ok((cur, k));
        }
    }
    Ok((cur, max_steps))
}
