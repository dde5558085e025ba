use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Detector samples from one analyzer rotation, angles strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarimeterScan {
    samples: Vec<(f64, f64)>,
    step_deg: f64,
}

impl PolarimeterScan {
    /// The step is taken as the smallest spacing between angles.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let step = samples
            .windows(2)
            .map(|w| w[1].0 - w[0].0)
            .fold(f64::INFINITY, f64::min);
        let step = if step.is_finite() { step } else { 0.0 };
        Self::with_step(samples, step)
    }

    pub fn with_step(samples: Vec<(f64, f64)>, step_deg: f64) -> Result<Self> {
        for (i, &(t, v)) in samples.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::InvalidScan(format!("sample {i} is not finite")));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidScan(format!(
                "angles must increase strictly (sample {} after {})",
                samples[i + 1].0,
                samples[i].0
            )));
        }
        Ok(Self { samples, step_deg })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn step_deg(&self) -> f64 {
        self.step_deg
    }

    /// Covered angle range including one step, so a full rotation sampled
    /// every 0.5° spans 360°.
    pub fn span_deg(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.0 - a.0 + self.step_deg,
            _ => 0.0,
        }
    }

    /// Two whitespace- or comma-separated columns per line; `#` starts a
    /// comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            if fields.len() != 2 {
                return Err(parse_err(format!(
                    "expected 2 columns, found {}",
                    fields.len()
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| parse_err(format!("'{s}': {e}")))
            };
            samples.push((num(fields[0])?, num(fields[1])?));
        }
        Self::new(samples)
    }

    pub fn to_text(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str("# theta_deg intensity\n");
        for &(t, v) in &self.samples {
            let _ = writeln!(out, "{t} {v}");
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path, comments: &[String]) -> Result<()> {
        std::fs::write(path, self.to_text(comments))?;
        Ok(())
    }
}
