//! Exponent algebra for the trace space of `W^{1,p} ∩ L^q` on half-spaces.
//!
//! Everything here is closed-form double precision arithmetic. The identities
//! tying `p`, `q`, `r` and `β` together are exact in exact arithmetic, so the
//! tests hold them to [`IDENTITY_TOL`] relative error.

use std::fmt;
use std::str::FromStr;

use crate::error::{out_of_range, Error, Result};

/// Relative tolerance for the exponent identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// A Lebesgue exponent in `[1, ∞]`, with infinity kept as its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LebesgueExponent {
    Finite(f64),
    Infinite,
}

impl LebesgueExponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            LebesgueExponent::Finite(v) => Some(v),
            LebesgueExponent::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LebesgueExponent::Infinite)
    }

    /// Finite value or an error naming `what`.
    pub fn require_finite(self, what: &str) -> Result<f64> {
        self.finite()
            .ok_or_else(|| Error::OutOfRange(format!("{what} must be finite")))
    }
}

impl From<f64> for LebesgueExponent {
    fn from(v: f64) -> Self {
        if v.is_infinite() {
            LebesgueExponent::Infinite
        } else {
            LebesgueExponent::Finite(v)
        }
    }
}

impl fmt::Display for LebesgueExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LebesgueExponent::Finite(v) => write!(f, "{v}"),
            LebesgueExponent::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for LebesgueExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(LebesgueExponent::Infinite),
            _ => t
                .parse::<f64>()
                .map(LebesgueExponent::from)
                .map_err(|_| Error::Config(format!("not an exponent: {t:?}"))),
        }
    }
}

/// `p* = n p / (n - p)`.
pub fn sobolev_conjugate(p: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    if !(p >= 1.0 && p < nf) {
        return out_of_range(format!("sobolev conjugate needs 1 <= p < n, got p={p}, n={n}"));
    }
    Ok(nf * p / (nf - p))
}

/// `p̄ = p (n-1)/(n-p)`, the integrability of `W^{1-1/p,p}(R^{n-1})` traces.
pub fn boundary_sobolev_exponent(p: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    if !(p >= 1.0 && p < nf) {
        return out_of_range(format!("p̄ needs 1 <= p < n, got p={p}, n={n}"));
    }
    Ok(p * (nf - 1.0) / (nf - p))
}

/// Trace exponent `r = 1 + q (1 - 1/p)`.
pub fn trace_exponent(p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0 && q > p && q.is_finite()) {
        return out_of_range(format!("trace exponent needs 1 < p < q < inf, got p={p}, q={q}"));
    }
    Ok(1.0 + q * (1.0 - 1.0 / p))
}

/// Truncation exponent `β = q/p - 1`; satisfies `q - β = r`.
pub fn beta_exponent(p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0 && q > p && q.is_finite()) {
        return out_of_range(format!("beta needs 1 < p < q < inf, got p={p}, q={q}"));
    }
    Ok(q / p - 1.0)
}

/// Exponents for a valid `(n, p, q)` with `1 < p < n` and `q > p*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSet {
    pub n: usize,
    pub p: f64,
    pub q: LebesgueExponent,
    pub p_star: f64,
    pub p_bar: f64,
    /// Fractional smoothness `1 - 1/p` of the trace space.
    pub s: f64,
    /// Trace integrability; infinite exactly when `q` is.
    pub r: LebesgueExponent,
    /// `None` for `q = ∞`, which uses the mollifier lifting instead.
    pub beta: Option<f64>,
}

impl ExponentSet {
    pub fn new(n: usize, p: f64, q: impl Into<LebesgueExponent>) -> Result<Self> {
        let q = q.into();
        if n < 2 {
            return out_of_range(format!("dimension n must be >= 2, got {n}"));
        }
        if !(p > 1.0 && p < n as f64) {
            return out_of_range(format!("need 1 < p < n, got p={p}, n={n}"));
        }
        let p_star = sobolev_conjugate(p, n)?;
        let p_bar = boundary_sobolev_exponent(p, n)?;
        let (r, beta) = match q {
            LebesgueExponent::Infinite => (LebesgueExponent::Infinite, None),
            LebesgueExponent::Finite(qv) => {
                if !(qv > p_star) {
                    return out_of_range(format!("need q > p* = {p_star}, got q={qv}"));
                }
                (
                    LebesgueExponent::Finite(trace_exponent(p, qv)?),
                    Some(beta_exponent(p, qv)?),
                )
            }
        };
        Ok(Self {
            n,
            p,
            q,
            p_star,
            p_bar,
            s: 1.0 - 1.0 / p,
            r,
            beta,
        })
    }

    /// Hölder conjugate `p' = p/(p-1)`.
    pub fn p_prime(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `(q, r, β)` for finite `q`.
    pub fn finite_triplet(&self) -> Result<(f64, f64, f64)> {
        let q = self.q.require_finite("q")?;
        let r = self.r.require_finite("r")?;
        Ok((q, r, self.beta.expect("finite q always carries beta")))
    }
}

/// Exponents appearing when one tries to reach the trace space by interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationExponents {
    /// Complex interpolation parameter between `L^{p*}` and `L^∞`.
    pub theta: f64,
    /// `1/p_θ = θ/p + (1-θ)/q` evaluated at `theta`.
    pub p_theta: f64,
    /// Boundary exponent reached by interpolating the two endpoint trace results.
    pub r_tilde: f64,
    /// Smallest admissible Gagliardo–Nirenberg parameter.
    pub theta_min: f64,
    /// Best boundary integrability of the Gagliardo–Nirenberg route; equals `r`.
    pub p_max: f64,
}

/// Interpolation comparison exponents for `1 < p < n`, `p* <= q < ∞`.
///
/// `q = p*` is accepted as the endpoint where `θ = 0` and `r̃ = r = p̄`.
pub fn interpolation_exponents(n: usize, p: f64, q: f64) -> Result<InterpolationExponents> {
    if n < 2 || !(p > 1.0 && p < n as f64) {
        return out_of_range(format!("need n >= 2 and 1 < p < n, got n={n}, p={p}"));
    }
    let p_star = sobolev_conjugate(p, n)?;
    if !q.is_finite() || q < p_star * (1.0 - IDENTITY_TOL) {
        return out_of_range(format!("need p* = {p_star} <= q < inf, got q={q}"));
    }
    let nf = n as f64;
    let theta = (1.0 - p_star / q).max(0.0);
    let p_theta = 1.0 / (theta / p + (1.0 - theta) / q);
    let r_tilde = (nf - 1.0) * q / nf;
    let theta_min = p / (p * q - q + p);
    let p_max = 1.0 / theta_min;

    let r = trace_exponent(p, q)?;
    debug_assert!((p_max - r).abs() <= IDENTITY_TOL * r);
    debug_assert!(r_tilde >= r * (1.0 - IDENTITY_TOL));
    Ok(InterpolationExponents {
        theta,
        p_theta,
        r_tilde,
        theta_min,
        p_max,
    })
}
