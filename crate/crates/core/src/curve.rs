//! Sampled time series and their CSV form.
//!
//! ```text
//! # kind,Pe,kappa_d,t_d,x0,a
//! # exit_flow,4,0,1,0.01,1
//! t,y
//! 1.0000000000000000e-3,1.2345678901234567e-8
//! ```
//!
//! The two metadata comment lines are optional on input, as is the `t,y`
//! header. Values are written with 17 significant digits.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{RadError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    ExitFlow,
    NormalizedExitFlow,
    Concentration,
    Holdup,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::ExitFlow => "exit_flow",
            CurveKind::NormalizedExitFlow => "normalized_exit_flow",
            CurveKind::Concentration => "concentration",
            CurveKind::Holdup => "holdup",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveKind {
    type Err = RadError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "exit_flow" => Ok(CurveKind::ExitFlow),
            "normalized_exit_flow" | "normalized" => Ok(CurveKind::NormalizedExitFlow),
            "concentration" => Ok(CurveKind::Concentration),
            "holdup" => Ok(CurveKind::Holdup),
            other => Err(RadError::InvalidCurve(format!("unknown curve kind `{other}`"))),
        }
    }
}

/// Parameters a curve was generated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMeta {
    pub pe: f64,
    pub kappa_d: f64,
    pub t_d: f64,
    pub x0: f64,
    pub a: f64,
    /// Series terms available to the evaluation, if analytic.
    pub terms: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    samples: Vec<(f64, f64)>,
    meta: Option<CurveMeta>,
}

/// Formats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Curve {
    /// Fails unless times are strictly increasing and every value is finite.
    pub fn new(kind: CurveKind, samples: Vec<(f64, f64)>, meta: Option<CurveMeta>) -> Result<Self> {
        if samples.is_empty() {
            return Err(RadError::InvalidCurve("no samples".into()));
        }
        for (i, &(t, y)) in samples.iter().enumerate() {
            if !t.is_finite() || !y.is_finite() {
                return Err(RadError::InvalidCurve(format!("non-finite sample at index {i}")));
            }
            if i > 0 && t <= samples[i - 1].0 {
                return Err(RadError::InvalidCurve(format!(
                    "times not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Self { kind, samples, meta })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn meta(&self) -> Option<&CurveMeta> {
        self.meta.as_ref()
    }

    pub fn with_meta(mut self, meta: Option<CurveMeta>) -> Self {
        self.meta = meta;
        self
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Applies `f(t, y)` to every value.
    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let samples = self.samples.iter().map(|&(t, y)| (t, f(t, y))).collect();
        Curve::new(self.kind, samples, self.meta)
    }

    /// Linear interpolation; `None` outside the sampled range.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.0 < t);
        if idx == 0 {
            return Some(self.samples[0].1);
        }
        let (t1, y1) = self.samples[idx];
        if t1 == t {
            return Some(y1);
        }
        let (t0, y0) = self.samples[idx - 1];
        Some(y0 + (y1 - y0) * (t - t0) / (t1 - t0))
    }

    /// Trapezoidal `∫ t^m y dt` over the sampled range.
    pub fn trapezoid_moment(&self, m: i32) -> f64 {
        self.samples
            .windows(2)
            .map(|w| {
                let (t0, y0) = w[0];
                let (t1, y1) = w[1];
                0.5 * (t1 - t0) * (t0.powi(m) * y0 + t1.powi(m) * y1)
            })
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(48 * (self.samples.len() + 3));
        if let Some(m) = &self.meta {
            out.push_str("# kind,Pe,kappa_d,t_d,x0,a\n");
            let _ = writeln!(
                out,
                "# {},{},{},{},{},{}",
                self.kind,
                fmt_f64(m.pe),
                fmt_f64(m.kappa_d),
                fmt_f64(m.t_d),
                fmt_f64(m.x0),
                fmt_f64(m.a)
            );
            if let Some(n) = m.terms {
                let _ = writeln!(out, "# max_terms,{n}");
            }
        } else {
            let _ = writeln!(out, "# kind\n# {}", self.kind);
        }
        out.push_str("t,y\n");
        for &(t, y) in &self.samples {
            let _ = writeln!(out, "{},{}", fmt_f64(t), fmt_f64(y));
        }
        out
    }

    /// Parses the CSV form. Files without metadata come back as
    /// [`CurveKind::ExitFlow`] with `meta = None`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut kind = CurveKind::ExitFlow;
        let mut meta: Option<CurveMeta> = None;
        let mut terms = None;
        let mut expect_values = false;
        let mut samples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let fields: Vec<&str> = comment.split(',').map(str::trim).collect();
                if fields.first() == Some(&"kind") {
                    expect_values = true;
                } else if expect_values {
                    expect_values = false;
                    kind = fields[0].parse()?;
                    if fields.len() >= 6 {
                        let num = |i: usize| -> Result<f64> {
                            fields[i].parse().map_err(|_| RadError::Parse {
                                line: line_no,
                                reason: format!("bad metadata value `{}`", fields[i]),
                            })
                        };
                        meta = Some(CurveMeta {
                            pe: num(1)?,
                            kappa_d: num(2)?,
                            t_d: num(3)?,
                            x0: num(4)?,
                            a: num(5)?,
                            terms: None,
                        });
                    }
                } else if fields.first() == Some(&"max_terms") && fields.len() == 2 {
                    terms = fields[1].parse().ok();
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(RadError::Parse {
                    line: line_no,
                    reason: format!("expected 2 columns, found {}", fields.len()),
                });
            }
            match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
                (Ok(t), Ok(y)) => samples.push((t, y)),
                _ if samples.is_empty() => continue, // column header
                _ => {
                    return Err(RadError::Parse {
                        line: line_no,
                        reason: "non-numeric sample".into(),
                    })
                }
            }
        }
        if let Some(m) = meta.as_mut() {
            m.terms = terms;
        }
        Curve::new(kind, samples, meta)
    }
}
