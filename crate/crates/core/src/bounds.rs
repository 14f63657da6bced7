//! Evaluators for the KL and Rényi convergence bounds of ULA and Langevin
//! dynamics, plus step-size planners.
//!
//! Every evaluator returns a [`BoundReport`] carrying its inputs and the
//! right-hand side; attach an observed value with [`BoundReport::with_observed`].

use std::fmt;

use crate::divergence::Divergence;
use crate::error::{invalid, Error, Result};
use crate::isoperimetry::{self, InequalityKind};

/// Default slack for `observed <= bound + tol`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Shortest round-trip formatting with `inf` for infinity.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem_id: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub bound: Divergence,
    /// Derived quantities such as a companion W2 bound or a burn-in index.
    pub extras: Vec<(&'static str, f64)>,
    observed: Option<Divergence>,
    satisfied: Option<bool>,
}

impl BoundReport {
    fn new(theorem_id: &'static str, inputs: Vec<(&'static str, f64)>, bound: Divergence) -> Self {
        BoundReport {
            theorem_id,
            inputs,
            bound,
            extras: Vec::new(),
            observed: None,
            satisfied: None,
        }
    }

    fn extra(mut self, name: &'static str, value: f64) -> Self {
        self.extras.push((name, value));
        self
    }

    /// Records an observed value and whether it lies below `bound + tol`.
    pub fn with_observed(mut self, observed: Divergence, tol: f64) -> Self {
        self.satisfied = Some(observed.le_with_slack(self.bound, tol));
        self.observed = Some(observed);
        self
    }

    pub fn observed(&self) -> Option<Divergence> {
        self.observed
    }

    pub fn satisfied(&self) -> Option<bool> {
        self.satisfied
    }

    pub fn input(&self, name: &str) -> Option<f64> {
        self.inputs.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn extra_value(&self, name: &str) -> Option<f64> {
        self.extras.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["theorem_id".to_string()];
        cols.extend(self.inputs.iter().map(|(n, _)| n.to_string()));
        cols.extend(self.extras.iter().map(|(n, _)| n.to_string()));
        cols.extend(["bound", "observed", "satisfied"].map(String::from));
        cols.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        let mut cols = vec![self.theorem_id.to_string()];
        cols.extend(self.inputs.iter().map(|&(_, v)| fmt_f64(v)));
        cols.extend(self.extras.iter().map(|&(_, v)| fmt_f64(v)));
        cols.push(fmt_f64(self.bound.value()));
        cols.push(self.observed.map(|o| fmt_f64(o.value())).unwrap_or_default());
        cols.push(self.satisfied.map(|s| s.to_string()).unwrap_or_default());
        cols.join(",")
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(name, format!("must be finite and positive, got {v}")));
    }
    Ok(())
}

fn nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(invalid(name, format!("must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn divergence_input(name: &'static str, v: f64) -> Result<Divergence> {
    if v.is_nan() || v < 0.0 {
        return Err(invalid(name, format!("must be a nonnegative divergence, got {v}")));
    }
    Divergence::new(v)
}

/// Step-size cap `alpha / (4 L^2)` of the KL analysis.
pub fn kl_step_cap(alpha: f64, smoothness: f64) -> f64 {
    alpha / (4.0 * smoothness * smoothness)
}

fn check_kl_regime(alpha: f64, smoothness: f64, n: usize, eps: f64, check_cap: bool) -> Result<()> {
    positive("alpha", alpha)?;
    positive("L", smoothness)?;
    positive("eps", eps)?;
    if n == 0 {
        return Err(invalid("n", "dimension must be at least 1"));
    }
    if check_cap {
        if alpha > smoothness {
            return Err(invalid(
                "alpha",
                format!("need alpha <= L, got alpha = {alpha}, L = {smoothness}"),
            ));
        }
        let cap = kl_step_cap(alpha, smoothness);
        if eps > cap {
            return Err(Error::StepSizeWindow {
                eps,
                window: format!("eps <= alpha/(4 L^2) = {cap}"),
            });
        }
    }
    Ok(())
}

/// `e^{-alpha eps k} H0 + 8 eps n L^2 / alpha` for KL along ULA under LSI.
pub fn kl_ula_bound(alpha: f64, smoothness: f64, n: usize, eps: f64, k: u64, h0: f64) -> Result<BoundReport> {
    kl_ula_bound_with(alpha, smoothness, n, eps, k, h0, true)
}

/// [`kl_ula_bound`] with the step-size cap check optional, for exercising
/// deliberately violated bounds.
pub fn kl_ula_bound_with(
    alpha: f64,
    smoothness: f64,
    n: usize,
    eps: f64,
    k: u64,
    h0: f64,
    check_cap: bool,
) -> Result<BoundReport> {
    check_kl_regime(alpha, smoothness, n, eps, check_cap)?;
    let h0d = divergence_input("H0", h0)?;
    let bias = 8.0 * eps * n as f64 * smoothness * smoothness / alpha;
    let decay = (-alpha * eps * k as f64).exp();
    let bound = h0d.scale(decay)? + Divergence::new(bias)?;
    Ok(BoundReport::new(
        "kl_ula",
        vec![
            ("alpha", alpha),
            ("L", smoothness),
            ("n", n as f64),
            ("eps", eps),
            ("k", k as f64),
            ("H0", h0),
        ],
        bound,
    ))
}

/// One-step recursion `e^{-alpha eps} H_k + 6 eps^2 n L^2`.
pub fn one_step_bound(alpha: f64, smoothness: f64, n: usize, eps: f64, hk: f64) -> Result<BoundReport> {
    check_kl_regime(alpha, smoothness, n, eps, true)?;
    let hkd = divergence_input("Hk", hk)?;
    let bound =
        hkd.scale((-alpha * eps).exp())? + Divergence::new(6.0 * eps * eps * n as f64 * smoothness * smoothness)?;
    Ok(BoundReport::new(
        "kl_ula_one_step",
        vec![
            ("alpha", alpha),
            ("L", smoothness),
            ("n", n as f64),
            ("eps", eps),
            ("Hk", hk),
        ],
        bound,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    LsiKl,
    LsiRenyi,
    PiRenyi,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::LsiKl => "LSI-KL",
            Regime::LsiRenyi => "LSI-Renyi",
            Regime::PiRenyi => "PI-Renyi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub eps: f64,
    pub k: u64,
    pub delta: f64,
    pub regime: Regime,
}

fn ceil_iterations(x: f64) -> u64 {
    if x <= 1.0 {
        1
    } else {
        x.ceil() as u64
    }
}

/// Step size `(alpha/(4L^2)) min(1, delta/(4n))` and iteration count
/// `ceil(ln(2 H0/delta)/(alpha eps))` reaching KL accuracy `delta`.
///
/// If rounding leaves the evaluated bound above `delta`, `k` is increased
/// until it is not.
pub fn plan_kl(alpha: f64, smoothness: f64, n: usize, delta: f64, h0: f64) -> Result<StepPlan> {
    positive("alpha", alpha)?;
    positive("L", smoothness)?;
    positive("delta", delta)?;
    positive("H0", h0)?;
    if n == 0 {
        return Err(invalid("n", "dimension must be at least 1"));
    }
    let mut eps = kl_step_cap(alpha, smoothness) * (delta / (4.0 * n as f64)).min(1.0);
    let mut k = ceil_iterations((2.0 * h0 / delta).ln() / (alpha * eps));
    let bias = |e: f64| 8.0 * e * n as f64 * smoothness * smoothness / alpha;
    while bias(eps) > delta / 2.0 {
        eps = eps.next_down();
    }
    while (-alpha * eps * k as f64).exp() * h0 + bias(eps) > delta {
        k += 1;
    }
    Ok(StepPlan {
        eps,
        k,
        delta,
        regime: Regime::LsiKl,
    })
}

/// `e^{-2 alpha t} H0`, with the companion bound
/// `W2 <= sqrt(2 H0/alpha) e^{-alpha t}` in `extras`.
pub fn langevin_kl_rate(alpha: f64, t: f64, h0: f64) -> Result<BoundReport> {
    positive("alpha", alpha)?;
    nonnegative("t", t)?;
    let h0d = divergence_input("H0", h0)?;
    let bound = h0d.scale((-2.0 * alpha * t).exp())?;
    let w2 = (2.0 * h0 / alpha).sqrt() * (-alpha * t).exp();
    Ok(BoundReport::new("langevin_kl", vec![("alpha", alpha), ("t", t), ("H0", h0)], bound).extra("w2_bound", w2))
}

fn check_order(q: f64, min: f64, strict: bool) -> Result<()> {
    let ok = if strict { q > min } else { q >= min };
    if !ok || !q.is_finite() {
        let rel = if strict { ">" } else { ">=" };
        return Err(invalid("q", format!("need q {rel} {min}, got {q}")));
    }
    Ok(())
}

/// `e^{-2 alpha t / q} R0` for Rényi divergence along Langevin dynamics under LSI.
pub fn renyi_ld_rate(alpha: f64, q: f64, t: f64, r0: f64) -> Result<BoundReport> {
    positive("alpha", alpha)?;
    check_order(q, 1.0, false)?;
    nonnegative("t", t)?;
    let r0d = divergence_input("R0", r0)?;
    let bound = r0d.scale((-2.0 * alpha * t / q).exp())?;
    Ok(BoundReport::new(
        "renyi_langevin_lsi",
        vec![("alpha", alpha), ("q", q), ("t", t), ("R0", r0)],
        bound,
    ))
}

/// Linear decay at rate `rate` while the value is at least 1, then
/// exponential decay at the same rate from the crossing.
fn two_phase(r0: f64, rate: f64, time: f64) -> f64 {
    if r0 <= 1.0 {
        return (-rate * time).exp() * r0;
    }
    let crossing = (r0 - 1.0) / rate;
    if time <= crossing {
        r0 - rate * time
    } else {
        (-rate * (time - crossing)).exp()
    }
}

/// Two-phase bound for Rényi divergence along Langevin dynamics under PI:
/// `R0 - 2 alpha t / q` until it reaches 1, then `e^{-2 alpha (t - t1)/q}`.
pub fn renyi_lp_rate(alpha: f64, q: f64, t: f64, r0: f64) -> Result<BoundReport> {
    positive("alpha", alpha)?;
    check_order(q, 2.0, false)?;
    nonnegative("t", t)?;
    if !(r0 >= 0.0) || !r0.is_finite() {
        return Err(invalid("R0", format!("must be finite and nonnegative, got {r0}")));
    }
    let rate = 2.0 * alpha / q;
    let bound = Divergence::new(two_phase(r0, rate, t))?;
    let t1 = if r0 >= 1.0 { (r0 - 1.0) / rate } else { 0.0 };
    Ok(BoundReport::new(
        "renyi_langevin_pi",
        vec![("alpha", alpha), ("q", q), ("t", t), ("R0", r0)],
        bound,
    )
    .extra("t1", t1))
}

/// `q_t = 1 + e^{2 alpha t} (q0 - 1)`.
pub fn hypercontractivity_schedule(alpha: f64, q0: f64, t: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    check_order(q0, 1.0, true)?;
    nonnegative("t", t)?;
    Ok(1.0 + (2.0 * alpha * t).exp() * (q0 - 1.0))
}

/// `t0 = ln((q - 1)/(q0 - 1)) / (2 alpha)`, the time for order `q0` to grow to `q`.
pub fn renyi_waiting_time(alpha: f64, q0: f64, q: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    check_order(q0, 1.0, true)?;
    if !(q >= q0) {
        return Err(invalid("q", format!("need q >= q0 = {q0}, got {q}")));
    }
    Ok(((q - 1.0) / (q0 - 1.0)).ln() / (2.0 * alpha))
}

/// `(q - 1/2)/(q - 1)`.
pub fn decomposition_prefactor(q: f64) -> Result<f64> {
    check_order(q, 1.0, true)?;
    Ok((q - 0.5) / (q - 1.0))
}

/// `((q - 1/2)/(q - 1)) R_{2q}(rho | nu_eps) + R_{2q-1}(nu_eps | nu)`.
pub fn renyi_decomp_bound(r_2q_biased: Divergence, r_2qm1_bias: Divergence, q: f64) -> Result<Divergence> {
    let pre = decomposition_prefactor(q)?;
    Ok(r_2q_biased.scale(pre)? + r_2qm1_bias)
}

/// Growth function `g(eps) = c eps^p` bounding the bias `R_q(nu_eps | nu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFunction {
    c: f64,
    p: f64,
}

impl GrowthFunction {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        positive("c", c)?;
        positive("p", p)?;
        Ok(GrowthFunction { c, p })
    }

    /// `n alpha^2 q^2 eps^2 / (8 (q - 1)(1 - q eps_max alpha / 2))`, the
    /// Gaussian bias bound at order `q`, valid on `(0, eps_max]`.
    pub fn gaussian(n: usize, alpha: f64, q: f64, eps_max: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        check_order(q, 1.0, true)?;
        positive("eps_max", eps_max)?;
        let slack = 1.0 - q * eps_max * alpha / 2.0;
        if !(slack > 0.0) {
            return Err(invalid(
                "eps_max",
                format!("need q eps_max alpha / 2 < 1, got {}", 1.0 - slack),
            ));
        }
        let c = n as f64 * alpha * alpha * q * q / (8.0 * (q - 1.0) * slack);
        Self::new(c, 2.0)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eval(&self, eps: f64) -> f64 {
        self.c * eps.powf(self.p)
    }

    /// Largest `eps` with `g(eps) <= value`.
    pub fn inverse(&self, value: f64) -> f64 {
        (value / self.c).powf(1.0 / self.p)
    }
}

fn check_renyi_window(beta: f64, smoothness: f64, eps: f64) -> Result<()> {
    positive("beta", beta)?;
    positive("L", smoothness)?;
    positive("eps", eps)?;
    let window = isoperimetry::ula_limit_window(beta, smoothness);
    if eps > window {
        return Err(Error::StepSizeWindow {
            eps,
            window: format!("eps <= min(1/(3L), 1/(9 beta)) = {window}"),
        });
    }
    Ok(())
}

/// `((q - 1/2)/(q - 1)) R0_2q e^{-beta eps k/(2q)} + g(eps)` for Rényi
/// divergence along ULA when the biased limit satisfies LSI with constant `beta`.
pub fn renyi_ula_lsi_bound(
    beta: f64,
    smoothness: f64,
    q: f64,
    eps: f64,
    k: u64,
    r0_2q: f64,
    g: &GrowthFunction,
) -> Result<BoundReport> {
    check_renyi_window(beta, smoothness, eps)?;
    let pre = decomposition_prefactor(q)?;
    let r0 = divergence_input("R0_2q", r0_2q)?;
    let decay = (-beta * eps * k as f64 / (2.0 * q)).exp();
    let bound = r0.scale(pre * decay)? + Divergence::new(g.eval(eps))?;
    Ok(BoundReport::new(
        "renyi_ula_lsi",
        vec![
            ("beta", beta),
            ("L", smoothness),
            ("q", q),
            ("eps", eps),
            ("k", k as f64),
            ("R0_2q", r0_2q),
        ],
        bound,
    )
    .extra("bias", g.eval(eps)))
}

/// Burn-in `k0 = (2q/(beta eps)) (R0_2q - 1)`.
pub fn renyi_pi_burn_in(beta: f64, q: f64, eps: f64, r0_2q: f64) -> f64 {
    2.0 * q / (beta * eps) * (r0_2q - 1.0)
}

/// `((q - 1/2)/(q - 1)) e^{-beta eps (k - k0)/(2q)} + g(eps)` for `k >= k0`
/// when the biased limit satisfies PI with constant `beta`; `k0` is in `extras`.
pub fn renyi_ula_pi_bound(
    beta: f64,
    smoothness: f64,
    q: f64,
    eps: f64,
    k: u64,
    r0_2q: f64,
    g: &GrowthFunction,
) -> Result<BoundReport> {
    check_renyi_window(beta, smoothness, eps)?;
    let pre = decomposition_prefactor(q)?;
    if !(r0_2q >= 1.0) || !r0_2q.is_finite() {
        return Err(invalid("R0_2q", format!("need 1 <= R0_2q < inf, got {r0_2q}")));
    }
    let k0 = renyi_pi_burn_in(beta, q, eps, r0_2q);
    if (k as f64) < k0 {
        return Err(Error::BelowBurnIn { k, k0 });
    }
    let decay = (-beta * eps * (k as f64 - k0) / (2.0 * q)).exp();
    let bound = Divergence::new(pre * decay + g.eval(eps))?;
    Ok(BoundReport::new(
        "renyi_ula_pi",
        vec![
            ("beta", beta),
            ("L", smoothness),
            ("q", q),
            ("eps", eps),
            ("k", k as f64),
            ("R0_2q", r0_2q),
        ],
        bound,
    )
    .extra("k0", k0)
    .extra("bias", g.eval(eps)))
}

/// Rate of `R_q(rho_k | nu_eps)` towards the biased limit: `e^{-beta eps k/q} R0`
/// under LSI; under PI (`q >= 2`) linear decay `R0 - beta eps k/q` while the value
/// is at least 1, then exponential from the crossing.
pub fn biased_limit_renyi_rate(
    kind: InequalityKind,
    beta: f64,
    smoothness: f64,
    q: f64,
    eps: f64,
    k: u64,
    r0: f64,
) -> Result<BoundReport> {
    check_renyi_window(beta, smoothness, eps)?;
    let inputs = vec![
        ("beta", beta),
        ("L", smoothness),
        ("q", q),
        ("eps", eps),
        ("k", k as f64),
        ("R0", r0),
    ];
    let rate = beta * eps / q;
    match kind {
        InequalityKind::Lsi => {
            check_order(q, 1.0, false)?;
            let r0d = divergence_input("R0", r0)?;
            let bound = r0d.scale((-rate * k as f64).exp())?;
            Ok(BoundReport::new("renyi_biased_limit_lsi", inputs, bound))
        }
        InequalityKind::Pi => {
            check_order(q, 2.0, false)?;
            if !(r0 >= 0.0) || !r0.is_finite() {
                return Err(invalid("R0", format!("must be finite and nonnegative, got {r0}")));
            }
            let bound = Divergence::new(two_phase(r0, rate, k as f64))?;
            Ok(BoundReport::new("renyi_biased_limit_pi", inputs, bound))
        }
    }
}

/// Plans `(eps, k)` so that the Rényi ULA bound is at most `delta`: the
/// bias takes half the budget through `g^{-1}(delta/2)` and the decay the other half.
pub fn plan_renyi(
    kind: InequalityKind,
    beta: f64,
    smoothness: f64,
    q: f64,
    delta: f64,
    r0_2q: f64,
    g: &GrowthFunction,
) -> Result<StepPlan> {
    positive("delta", delta)?;
    positive("beta", beta)?;
    positive("L", smoothness)?;
    let pre = decomposition_prefactor(q)?;
    let eps = isoperimetry::ula_limit_window(beta, smoothness).min(g.inverse(delta / 2.0));
    let scale = 2.0 * q / (beta * eps);
    let (regime, mut k) = match kind {
        InequalityKind::Lsi => (
            Regime::LsiRenyi,
            ceil_iterations(scale * (2.0 * pre * r0_2q / delta).ln()),
        ),
        InequalityKind::Pi => {
            let k0 = renyi_pi_burn_in(beta, q, eps, r0_2q).max(0.0);
            (
                Regime::PiRenyi,
                ceil_iterations(k0 + scale * (2.0 * pre / delta).ln().max(0.0)),
            )
        }
    };
    let eval = |k: u64| match kind {
        InequalityKind::Lsi => renyi_ula_lsi_bound(beta, smoothness, q, eps, k, r0_2q, g),
        InequalityKind::Pi => renyi_ula_pi_bound(beta, smoothness, q, eps, k, r0_2q, g),
    };
    loop {
        match eval(k) {
            Ok(r) if r.bound.value() <= delta => break,
            Ok(_) | Err(Error::BelowBurnIn { .. }) => k += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(StepPlan { eps, k, delta, regime })
}

/// `(n L, 4 L^2 H / alpha + 2 n L)`: bounds on `E|grad f|^2` under the target
/// and under a law at KL divergence `H`.
pub fn grad_moment_bounds(alpha: f64, smoothness: f64, n: usize, h: Option<f64>) -> Result<(f64, Option<f64>)> {
    positive("alpha", alpha)?;
    positive("L", smoothness)?;
    let stationary = n as f64 * smoothness;
    let general = match h {
        Some(h) => {
            nonnegative("H", h)?;
            Some(4.0 * smoothness * smoothness * h / alpha + 2.0 * stationary)
        }
        None => None,
    };
    Ok((stationary, general))
}

/// `f(x*) + (n/2) ln(L / (2 pi))`: bound on KL and every `R_q` for the
/// start `N(x*, I/L)`.
pub fn gaussian_start_bound(f_star: f64, n: usize, smoothness: f64) -> Result<f64> {
    positive("L", smoothness)?;
    Ok(f_star + 0.5 * n as f64 * (smoothness / (2.0 * std::f64::consts::PI)).ln())
}
