//! Certified log-Sobolev (LSI) and Poincaré (PI) constants.
//!
//! A [`IsoperimetryCert`] carries a constant together with the derivation
//! that produced it. The derivation is a postfix program: base facts push a
//! constant, unary rules transform the top of the stack and `tensorize`
//! combines the two topmost entries. Each step records the constant it
//! produced, so the chain can be printed as `rule(args) -> constant` lines
//! and replayed from text.
//!
//! All rules produce lower bounds. They are exact for Gaussian measures
//! (except bounded perturbation, which is flagged `NONTIGHT`).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityKind {
    Lsi,
    Pi,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityKind::Lsi => "LSI",
            InequalityKind::Pi => "PI",
        })
    }
}

impl FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LSI" => Ok(InequalityKind::Lsi),
            "PI" => Ok(InequalityKind::Pi),
            other => Err(Error::Parse {
                line: 0,
                reason: format!("unknown inequality kind `{other}`"),
            }),
        }
    }
}

/// One rule application.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// Strong convexity `alpha` of the potential gives LSI(alpha).
    BakryEmery {
        strong_convexity: f64,
    },
    /// A constant taken as given (e.g. an exact Gaussian constant or an assumption).
    Assumed {
        kind: InequalityKind,
        constant: f64,
    },
    LipschitzPushforward {
        lip: f64,
    },
    GaussianConvolution {
        t: f64,
    },
    Tensorize,
    /// Holley–Stroock: multiply by `exp(-osc)`. `domain` records where the
    /// oscillation was measured when it came from a grid scan.
    BoundedPerturbation {
        osc: f64,
        domain: Option<(f64, f64)>,
    },
    LsiImpliesPi,
    /// `((1 + eps L)^2 / beta + 2 eps)^-1`, the constant of the gradient-step
    /// pushforward of the biased limit followed by heat flow for time `eps`.
    UlaLimit {
        smoothness: f64,
        eps: f64,
    },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::BakryEmery { .. } => "bakry_emery",
            Rule::Assumed { .. } => "assumed",
            Rule::LipschitzPushforward { .. } => "lipschitz_pushforward",
            Rule::GaussianConvolution { .. } => "gaussian_convolution",
            Rule::Tensorize => "tensorize",
            Rule::BoundedPerturbation { .. } => "bounded_perturbation",
            Rule::LsiImpliesPi => "lsi_implies_pi",
            Rule::UlaLimit { .. } => "ula_limit",
        }
    }

    pub fn is_tight(&self) -> bool {
        !matches!(self, Rule::BoundedPerturbation { .. })
    }

    fn args(&self) -> String {
        match self {
            Rule::BakryEmery { strong_convexity } => format!("{strong_convexity:?}"),
            Rule::Assumed { kind, constant } => format!("{kind}, {constant:?}"),
            Rule::LipschitzPushforward { lip } => format!("{lip:?}"),
            Rule::GaussianConvolution { t } => format!("{t:?}"),
            Rule::Tensorize | Rule::LsiImpliesPi => String::new(),
            Rule::BoundedPerturbation { osc, domain } => match domain {
                Some((lo, hi)) => format!("{osc:?}, {lo:?}, {hi:?}"),
                None => format!("{osc:?}"),
            },
            Rule::UlaLimit { smoothness, eps } => format!("{smoothness:?}, {eps:?}"),
        }
    }
}

/// A rule application and the constant it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rule: Rule,
    pub kind: InequalityKind,
    pub constant: f64,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}) -> {} {:?}",
            self.rule.name(),
            self.rule.args(),
            self.kind,
            self.constant
        )?;
        if !self.rule.is_tight() {
            f.write_str(" NONTIGHT")?;
        }
        Ok(())
    }
}

/// A certified isoperimetry constant with its derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoperimetryCert {
    kind: InequalityKind,
    constant: f64,
    chain: Vec<Step>,
}

fn positive(name: &'static str, rule: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Rule {
            rule,
            reason: format!("{name} must be positive and finite, got {v}"),
        });
    }
    Ok(())
}

impl IsoperimetryCert {
    pub fn kind(&self) -> InequalityKind {
        self.kind
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn chain(&self) -> &[Step] {
        &self.chain
    }

    /// True when every rule in the chain is tight on Gaussians.
    pub fn is_tight(&self) -> bool {
        self.chain.iter().all(|s| s.rule.is_tight())
    }

    /// Starts a chain from a constant taken as given.
    pub fn assumed(kind: InequalityKind, constant: f64) -> Result<Self> {
        positive("constant", "assumed", constant)?;
        Ok(Self::base(Rule::Assumed { kind, constant }, kind, constant))
    }

    fn base(rule: Rule, kind: InequalityKind, constant: f64) -> Self {
        IsoperimetryCert {
            kind,
            constant,
            chain: vec![Step { rule, kind, constant }],
        }
    }

    fn push(mut self, rule: Rule, kind: InequalityKind, constant: f64) -> Self {
        self.kind = kind;
        self.constant = constant;
        self.chain.push(Step { rule, kind, constant });
        self
    }

    /// One `rule(args) -> KIND constant` line per step.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for step in &self.chain {
            out.push_str(&step.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form and replays it. Recorded constants must match the
    /// replayed ones bit-for-bit.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let (rule, kind, constant) = parse_line(line).map_err(|reason| Error::Parse { line: i + 1, reason })?;
            rules.push((i + 1, rule, kind, constant));
        }
        let replayed = replay(rules.iter().map(|(_, r, _, _)| r.clone()))?;
        for ((line, _, kind, constant), step) in rules.iter().zip(replayed.chain.iter()) {
            if step.constant.to_bits() != constant.to_bits() || step.kind != *kind {
                return Err(Error::Parse {
                    line: *line,
                    reason: format!(
                        "recorded {kind} {constant:?} but replay gives {} {:?}",
                        step.kind, step.constant
                    ),
                });
            }
        }
        Ok(replayed)
    }

    /// Recomputes the constant from the rules alone.
    pub fn replay_constant(&self) -> Result<f64> {
        Ok(replay(self.chain.iter().map(|s| s.rule.clone()))?.constant)
    }
}

/// Runs a postfix rule program.
pub fn replay(rules: impl IntoIterator<Item = Rule>) -> Result<IsoperimetryCert> {
    let mut stack: Vec<IsoperimetryCert> = Vec::new();
    for rule in rules {
        let next = match rule {
            Rule::BakryEmery { strong_convexity } => bakry_emery(strong_convexity)?,
            Rule::Assumed { kind, constant } => IsoperimetryCert::assumed(kind, constant)?,
            Rule::Tensorize => {
                let b = stack.pop();
                let a = stack.pop();
                match (a, b) {
                    (Some(a), Some(b)) => tensorize(&a, &b)?,
                    _ => {
                        return Err(Error::Rule {
                            rule: "tensorize",
                            reason: "needs two parent certificates".into(),
                        })
                    }
                }
            }
            unary => {
                let top = stack.pop().ok_or_else(|| Error::Rule {
                    rule: unary.name(),
                    reason: "no certificate to transform".into(),
                })?;
                apply_unary(top, unary)?
            }
        };
        stack.push(next);
    }
    match (stack.pop(), stack.is_empty()) {
        (Some(cert), true) => Ok(cert),
        (None, _) => Err(Error::Rule {
            rule: "replay",
            reason: "empty derivation".into(),
        }),
        (Some(_), false) => Err(Error::Rule {
            rule: "replay",
            reason: "derivation leaves more than one certificate".into(),
        }),
    }
}

fn apply_unary(cert: IsoperimetryCert, rule: Rule) -> Result<IsoperimetryCert> {
    match rule {
        Rule::LipschitzPushforward { lip } => lipschitz_pushforward(cert, lip),
        Rule::GaussianConvolution { t } => gaussian_convolution(cert, t),
        Rule::BoundedPerturbation { osc, domain } => bounded_perturbation_on(cert, osc, domain),
        Rule::LsiImpliesPi => lsi_implies_pi(cert),
        Rule::UlaLimit { smoothness, eps } => ula_limit_cert(cert, smoothness, eps),
        Rule::BakryEmery { .. } | Rule::Assumed { .. } | Rule::Tensorize => unreachable!(),
    }
}

fn parse_line(line: &str) -> std::result::Result<(Rule, InequalityKind, f64), String> {
    let open = line.find('(').ok_or("missing `(`")?;
    let close = line.find(')').ok_or("missing `)`")?;
    let name = &line[..open];
    let args: Vec<&str> = line[open + 1..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let rest = line[close + 1..].trim();
    let rest = rest.strip_prefix("->").ok_or("missing `->`")?;
    let mut fields = rest.split_whitespace();
    let kind: InequalityKind = fields
        .next()
        .ok_or("missing kind")?
        .parse()
        .map_err(|e: Error| e.to_string())?;
    let constant: f64 = fields
        .next()
        .ok_or("missing constant")?
        .parse()
        .map_err(|e| format!("bad constant: {e}"))?;
    let num = |i: usize| -> std::result::Result<f64, String> {
        args.get(i)
            .ok_or_else(|| format!("`{name}` expects argument {}", i + 1))?
            .parse::<f64>()
            .map_err(|e| format!("bad argument: {e}"))
    };
    let rule = match name {
        "bakry_emery" => Rule::BakryEmery {
            strong_convexity: num(0)?,
        },
        "assumed" => Rule::Assumed {
            kind: args
                .first()
                .ok_or("`assumed` expects a kind")?
                .parse()
                .map_err(|e: Error| e.to_string())?,
            constant: num(1)?,
        },
        "lipschitz_pushforward" => Rule::LipschitzPushforward { lip: num(0)? },
        "gaussian_convolution" => Rule::GaussianConvolution { t: num(0)? },
        "tensorize" => Rule::Tensorize,
        "bounded_perturbation" => Rule::BoundedPerturbation {
            osc: num(0)?,
            domain: if args.len() >= 3 {
                Some((num(1)?, num(2)?))
            } else {
                None
            },
        },
        "lsi_implies_pi" => Rule::LsiImpliesPi,
        "ula_limit" => Rule::UlaLimit {
            smoothness: num(0)?,
            eps: num(1)?,
        },
        other => return Err(format!("unknown rule `{other}`")),
    };
    Ok((rule, kind, constant))
}

/// An `alpha`-strongly convex potential satisfies LSI with constant `alpha`.
pub fn bakry_emery(strong_convexity: f64) -> Result<IsoperimetryCert> {
    positive("strong convexity", "bakry_emery", strong_convexity)?;
    Ok(IsoperimetryCert::base(
        Rule::BakryEmery { strong_convexity },
        InequalityKind::Lsi,
        strong_convexity,
    ))
}

/// Pushforward under an `lip`-Lipschitz map: constant `alpha / lip^2`.
pub fn lipschitz_pushforward(cert: IsoperimetryCert, lip: f64) -> Result<IsoperimetryCert> {
    positive("Lipschitz constant", "lipschitz_pushforward", lip)?;
    let c = cert.constant / (lip * lip);
    let kind = cert.kind;
    Ok(cert.push(Rule::LipschitzPushforward { lip }, kind, c))
}

/// Convolution with `N(0, 2t I)`: constant `(1/alpha + 2t)^-1`.
pub fn gaussian_convolution(cert: IsoperimetryCert, t: f64) -> Result<IsoperimetryCert> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Rule {
            rule: "gaussian_convolution",
            reason: format!("time must be finite and nonnegative, got {t}"),
        });
    }
    let c = 1.0 / (1.0 / cert.constant + 2.0 * t);
    let kind = cert.kind;
    Ok(cert.push(Rule::GaussianConvolution { t }, kind, c))
}

/// Product measure: `min(alpha1, alpha2)`.
pub fn tensorize(a: &IsoperimetryCert, b: &IsoperimetryCert) -> Result<IsoperimetryCert> {
    if a.kind != b.kind {
        return Err(Error::Rule {
            rule: "tensorize",
            reason: format!("cannot tensorize {} with {}", a.kind, b.kind),
        });
    }
    let mut chain = a.chain.clone();
    chain.extend(b.chain.iter().cloned());
    let merged = IsoperimetryCert {
        kind: a.kind,
        constant: a.constant,
        chain,
    };
    Ok(merged.push(Rule::Tensorize, a.kind, a.constant.min(b.constant)))
}

/// Bounded perturbation with oscillation `osc = sup - inf` of the
/// log-density change: constant times `exp(-osc)`.
pub fn bounded_perturbation(cert: IsoperimetryCert, osc: f64) -> Result<IsoperimetryCert> {
    bounded_perturbation_on(cert, osc, None)
}

pub fn bounded_perturbation_on(
    cert: IsoperimetryCert,
    osc: f64,
    domain: Option<(f64, f64)>,
) -> Result<IsoperimetryCert> {
    if !(osc >= 0.0) || !osc.is_finite() {
        return Err(Error::Rule {
            rule: "bounded_perturbation",
            reason: format!("oscillation must be finite and nonnegative, got {osc}"),
        });
    }
    let c = cert.constant * (-osc).exp();
    let kind = cert.kind;
    Ok(cert.push(Rule::BoundedPerturbation { osc, domain }, kind, c))
}

pub fn lsi_implies_pi(cert: IsoperimetryCert) -> Result<IsoperimetryCert> {
    if cert.kind != InequalityKind::Lsi {
        return Err(Error::Rule {
            rule: "lsi_implies_pi",
            reason: "certificate is already PI".into(),
        });
    }
    let c = cert.constant;
    Ok(cert.push(Rule::LsiImpliesPi, InequalityKind::Pi, c))
}

/// Largest step size for which [`ula_limit_cert`] applies.
pub fn ula_limit_window(beta: f64, smoothness: f64) -> f64 {
    (1.0 / (3.0 * smoothness)).min(1.0 / (9.0 * beta))
}

/// Constant `((1 + eps L)^2 / beta + 2 eps)^-1` for the biased limit after a
/// gradient step and heat flow; at least `beta / 2` on the admissible window.
pub fn ula_limit_cert(cert: IsoperimetryCert, smoothness: f64, eps: f64) -> Result<IsoperimetryCert> {
    positive("smoothness", "ula_limit", smoothness)?;
    positive("step size", "ula_limit", eps)?;
    let beta = cert.constant;
    if eps > 1.0 / (3.0 * smoothness) {
        return Err(Error::Rule {
            rule: "ula_limit",
            reason: format!("eps = {eps} exceeds 1/(3L) = {}", 1.0 / (3.0 * smoothness)),
        });
    }
    if eps > 1.0 / (9.0 * beta) {
        return Err(Error::Rule {
            rule: "ula_limit",
            reason: format!("eps = {eps} exceeds 1/(9 beta) = {}", 1.0 / (9.0 * beta)),
        });
    }
    let s = 1.0 + eps * smoothness;
    let c = 1.0 / (s * s / beta + 2.0 * eps);
    debug_assert!(c >= 0.5 * beta * (1.0 - 1e-12));
    let kind = cert.kind;
    Ok(cert.push(Rule::UlaLimit { smoothness, eps }, kind, c))
}

/// The `beta / 2` floor guaranteed by [`ula_limit_cert`] on its window.
pub fn ula_limit_floor(beta: f64) -> f64 {
    0.5 * beta
}

/// Exact LSI (and PI) constant of a Gaussian: the inverse of the largest
/// covariance eigenvalue.
pub fn gaussian_exact_constant(max_cov_eigenvalue: f64) -> f64 {
    1.0 / max_cov_eigenvalue
}

/// Oscillation `sup - inf` of `delta` sampled on `m` uniform points in `[lo, hi]`.
pub fn oscillation_on_grid(delta: impl Fn(f64) -> f64, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / (m - 1) as f64;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..m {
        let v = delta(lo + h * i as f64);
        min = min.min(v);
        max = max.max(v);
    }
    max - min
}
