//! Check rows and the CSV files written per experiment.

use std::io::Write;

use crate::error::Result;
use crate::exponents::{ExponentSet, LebesgueExponent};

/// How `value` is compared with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    AtMost,
    AtLeast,
    /// Pass/fail decided elsewhere (e.g. a combination of conditions).
    Flag,
}

/// One evaluated invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check_name: String,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<LebesgueExponent>,
    pub r: Option<LebesgueExponent>,
    pub beta: Option<f64>,
    pub h: Option<f64>,
    pub value: f64,
    pub bound: f64,
    pub kind: BoundKind,
    pub pass: bool,
}

impl CheckRow {
    /// `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { kind: BoundKind::AtMost, ..Self::with_status(name, value, bound, value <= bound) }
    }

    /// `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { kind: BoundKind::AtLeast, ..Self::with_status(name, value, bound, value >= bound) }
    }

    pub fn with_status(name: impl Into<String>, value: f64, bound: f64, pass: bool) -> Self {
        Self {
            check_name: name.into(),
            n: None,
            p: None,
            q: None,
            r: None,
            beta: None,
            h: None,
            value,
            bound,
            kind: BoundKind::Flag,
            pass,
        }
    }

    pub fn exponents(mut self, e: &ExponentSet) -> Self {
        self.n = Some(e.n);
        self.p = Some(e.p);
        self.q = Some(e.q);
        self.r = Some(e.r);
        self.beta = e.beta;
        self
    }

    pub fn dim(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn spacing(mut self, h: f64) -> Self {
        self.h = Some(h);
        self
    }

    /// Relative slack, signed so that non-negative means "holds" for
    /// compared rows; flag rows and rows without a finite bound report
    /// `+1`/`-1`.
    pub fn margin(&self) -> f64 {
        let scale = if self.bound != 0.0 { self.bound.abs() } else { 1.0 };
        if !self.bound.is_finite() && self.kind != BoundKind::Flag {
            // informational row: no finite bound to measure slack against
            return if self.pass { 1.0 } else { -1.0 };
        }
        match self.kind {
            BoundKind::AtMost => (self.bound - self.value) / scale,
            BoundKind::AtLeast => (self.value - self.bound) / scale,
            BoundKind::Flag => {
                if self.pass {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn exponent(v: Option<LebesgueExponent>) -> String {
    match v {
        Some(LebesgueExponent::Finite(x)) => x.to_string(),
        Some(LebesgueExponent::Infinite) => "inf".into(),
        None => String::new(),
    }
}

/// `check_name,n,p,q,r,beta,h,value,bound,margin`.
pub fn write_checks<W: Write>(rows: &[CheckRow], w: &mut W) -> Result<()> {
    writeln!(w, "check_name,n,p,q,r,beta,h,value,bound,margin")?;
    for c in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            c.check_name,
            opt(c.n),
            opt(c.p),
            exponent(c.q),
            exponent(c.r),
            opt(c.beta),
            opt(c.h),
            c.value,
            c.bound,
            c.margin()
        )?;
    }
    Ok(())
}

/// `check_name,status,hard`.
pub fn write_summary<W: Write>(rows: &[(String, bool, bool)], w: &mut W) -> Result<()> {
    writeln!(w, "check_name,status,hard")?;
    for (name, pass, hard) in rows {
        writeln!(w, "{name},{},{hard}", if *pass { "pass" } else { "fail" })?;
    }
    Ok(())
}
