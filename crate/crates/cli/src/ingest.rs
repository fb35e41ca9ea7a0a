//! CSV ingestion: header-resolved columns `label` (optional), `x` or
//! `x1`..`xd`, and `y`; or a bare `y` series for the autoregressive path.

use std::path::Path;

use cpkernel_core::{lag_embed, Sample};

use crate::{CliError, CliResult};

struct Layout {
    label: Option<usize>,
    x_cols: Vec<usize>, // column index per covariate dimension
    y: usize,
}

fn resolve_layout(headers: &csv::StringRecord, autoregressive: bool) -> CliResult<Layout> {
    let mut label = None;
    let mut y = None;
    let mut plain_x = None;
    let mut numbered: Vec<(usize, usize)> = Vec::new();
    for (idx, name) in headers.iter().enumerate() {
        match name.trim() {
            "label" => label = Some(idx),
            "y" => y = Some(idx),
            "x" => plain_x = Some(idx),
            other => {
                if let Some(suffix) = other.strip_prefix('x') {
                    if let Ok(dim) = suffix.parse::<usize>() {
                        numbered.push((dim, idx));
                    }
                }
            }
        }
    }
    let y = y.ok_or_else(|| CliError::Usage("missing response column 'y'".into()))?;

    if autoregressive {
        if plain_x.is_some() || !numbered.is_empty() {
            return Err(CliError::Usage(
                "--autoregressive expects a single response column 'y', but covariate columns are present".into(),
            ));
        }
        return Ok(Layout {
            label,
            x_cols: Vec::new(),
            y,
        });
    }

    let x_cols = match (plain_x, numbered.is_empty()) {
        (Some(_), false) => {
            return Err(CliError::Usage(
                "covariates must be named either 'x' or 'x1'..'xd', not both".into(),
            ))
        }
        (Some(idx), true) => vec![idx],
        (None, false) => {
            numbered.sort();
            for (expected, (dim, _)) in numbered.iter().enumerate() {
                if *dim != expected + 1 {
                    return Err(CliError::Usage(
                        "covariate columns must be named x1..xd consecutively".into(),
                    ));
                }
            }
            numbered.into_iter().map(|(_, idx)| idx).collect()
        }
        (None, true) => {
            return Err(CliError::Usage(
                "missing covariate column 'x' (or 'x1'..'xd')".into(),
            ))
        }
    };
    Ok(Layout { label, x_cols, y })
}

fn parse_cell(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> CliResult<f64> {
    let raw = record.get(idx).ok_or_else(|| {
        CliError::Usage(format!("line {line}: missing value in column '{name}'"))
    })?;
    raw.trim().parse::<f64>().map_err(|_| {
        CliError::Usage(format!(
            "line {line}, column '{name}': invalid numeric value '{raw}'"
        ))
    })
}

/// Reads a CSV file into a [`Sample`]. With `autoregressive` the `y` column
/// is treated as a series and embedded against its own lag.
pub fn ingest_csv(path: &Path, autoregressive: bool) -> CliResult<Sample> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Usage(format!("cannot read CSV header: {e}")))?
        .clone();
    let layout = resolve_layout(&headers, autoregressive)?;

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        for &idx in &layout.x_cols {
            xs.push(parse_cell(&record, idx, &headers[idx], line)?);
        }
        ys.push(parse_cell(&record, layout.y, "y", line)?);
        if let Some(idx) = layout.label {
            labels.push(record.get(idx).unwrap_or_default().to_string());
        }
    }

    if autoregressive {
        let label_slice = if labels.is_empty() {
            None
        } else {
            Some(labels.as_slice())
        };
        return Ok(lag_embed(&ys, label_slice)?);
    }

    let dims = layout.x_cols.len();
    let mut sample = Sample::new(xs, dims, ys)?;
    if !labels.is_empty() {
        sample = sample.with_labels(labels)?;
    }
    Ok(sample)
}

/// Writes a sample back to CSV in the layout `ingest_csv` reads. Floats are
/// printed in shortest round-trip form, so a rewritten sample re-ingests
/// value-identically.
pub fn write_sample_csv(path: &Path, sample: &Sample) -> CliResult<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let d = sample.dim();
    let mut header: Vec<String> = Vec::new();
    if sample.labels().is_some() {
        header.push("label".into());
    }
    if d == 1 {
        header.push("x".into());
    } else {
        header.extend((1..=d).map(|j| format!("x{j}")));
    }
    header.push("y".into());
    writeln!(out, "{}", header.join(","))?;
    for i in 0..sample.len() {
        let mut fields: Vec<String> = Vec::new();
        if let Some(labels) = sample.labels() {
            fields.push(labels[i].clone());
        }
        fields.extend(sample.x_row(i).iter().map(|v| v.to_string()));
        fields.push(sample.y()[i].to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
