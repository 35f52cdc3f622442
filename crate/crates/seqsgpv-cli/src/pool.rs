//! Bootstrap outcome pool ingest: one numeric value per line, with an
//! optional single header line. Every rejected row is reported by line
//! number.

use std::path::Path;

use crate::CliError;

#[derive(Debug)]
pub struct PoolSummary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl std::fmt::Display for PoolSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} outcomes, mean {:.6}, sd {:.6}, range [{:.6}, {:.6}]",
            self.count, self.mean, self.sd, self.min, self.max
        )
    }
}

pub fn ingest_pool(path: &Path) -> Result<(Vec<f64>, PoolSummary), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read pool {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let entry = line.trim();
        if entry.is_empty() {
            continue;
        }
        match entry.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(CliError::Data(format!(
                    "pool line {line_no}: non-finite value {v}"
                )))
            }
            // a single leading header line is tolerated
            Err(_) if line_no == 1 => {}
            Err(_) => {
                return Err(CliError::Data(format!(
                    "pool line {line_no}: not a number: {entry:?}"
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Data(format!(
            "pool {} holds no outcomes",
            path.display()
        )));
    }

    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let sd = if count > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let summary = PoolSummary {
        count,
        mean,
        sd,
        min,
        max,
    };
    Ok((values, summary))
}
