//! File formats: fixation-sequence CSV, saliency raster JSON / plain text,
//! and CSV / SVG serialization of summary curves and envelope bands.
//!
//! Sequence CSV: header `subject,order,x,y` with an optional trailing `t_ms`
//! column; one row per fixation; `order` is 1-based and strictly increasing
//! within each subject. The window is not stored in the CSV; it comes from
//! the run configuration.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::saliency::SaliencyMap;
use crate::summary::{EnvelopeBand, SummaryCurve};
use crate::types::{FixationSequence, Point, Window};
use crate::Result;

// ---------------------------------------------------------------------------
// Fixation sequence CSV
// ---------------------------------------------------------------------------

/// Read all sequences from a CSV file, grouping rows by subject in order of
/// first appearance. Every sequence is validated against `window`.
pub fn read_sequences_csv(path: &Path, window: &Window) -> Result<Vec<FixationSequence>> {
    read_sequences(BufReader::new(File::open(path)?), window)
}

/// Read sequences from any reader (see [`read_sequences_csv`]).
pub fn read_sequences<R: Read>(reader: R, window: &Window) -> Result<Vec<FixationSequence>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let has_time = match cols.as_slice() {
        ["subject", "order", "x", "y"] => false,
        ["subject", "order", "x", "y", "t_ms"] => true,
        other => {
            return Err(Error::Config(format!(
                "unexpected CSV header {other:?}; expected subject,order,x,y[,t_ms]"
            )))
        }
    };

    // subjects in order of first appearance
    let mut order_of: Vec<String> = Vec::new();
    let mut grouped: Vec<(Vec<u64>, Vec<Point>, Vec<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let subject = record.get(0).unwrap_or_default().to_string();
        let parse = |i: usize, name: &str| -> Result<f64> {
            record
                .get(i)
                .unwrap_or_default()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse {name} in row {record:?}")))
        };
        let order = record
            .get(1)
            .unwrap_or_default()
            .parse::<u64>()
            .map_err(|_| Error::Config(format!("cannot parse order in row {record:?}")))?;
        let p = Point::new(parse(2, "x")?, parse(3, "y")?);
        let t = if has_time { parse(4, "t_ms")? } else { 0.0 };

        let slot = match order_of.iter().position(|s| s == &subject) {
            Some(i) => i,
            None => {
                order_of.push(subject);
                grouped.push((Vec::new(), Vec::new(), Vec::new()));
                grouped.len() - 1
            }
        };
        let (orders, points, times) = &mut grouped[slot];
        match orders.last() {
            None if order != 1 => {
                return Err(Error::Config(format!(
                    "subject {:?}: first order must be 1, got {order}",
                    order_of[slot]
                )))
            }
            Some(&prev) if order <= prev => {
                return Err(Error::Config(format!(
                    "subject {:?}: order must be strictly increasing ({prev} then {order})",
                    order_of[slot]
                )))
            }
            _ => {}
        }
        orders.push(order);
        points.push(p);
        times.push(t);
    }

    let mut out = Vec::with_capacity(grouped.len());
    for (subject, (_, points, times)) in order_of.into_iter().zip(grouped) {
        let mut seq = FixationSequence::new(points, *window);
        seq.subject = Some(subject);
        if has_time {
            seq.times_ms = Some(times);
        }
        seq.validate()?;
        out.push(seq);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

/// Write sequences to a CSV file. Subjects without an identifier are named
/// `seq{i}` by position.
pub fn write_sequences_csv(path: &Path, seqs: &[FixationSequence]) -> Result<()> {
    write_sequences(BufWriter::new(File::create(path)?), seqs)
}

/// Write sequences to any writer (see [`write_sequences_csv`]).
pub fn write_sequences<W: Write>(writer: W, seqs: &[FixationSequence]) -> Result<()> {
    let has_time = seqs.iter().any(|s| s.times_ms.is_some());
    let mut wtr = csv::Writer::from_writer(writer);
    if has_time {
        wtr.write_record(["subject", "order", "x", "y", "t_ms"])?;
    } else {
        wtr.write_record(["subject", "order", "x", "y"])?;
    }
    for (i, seq) in seqs.iter().enumerate() {
        let subject = seq.subject.clone().unwrap_or_else(|| format!("seq{i}"));
        for (k, p) in seq.points.iter().enumerate() {
            let order = (k + 1).to_string();
            if has_time {
                let t = seq
                    .times_ms
                    .as_ref()
                    .and_then(|ts| ts.get(k))
                    .copied()
                    .unwrap_or(0.0);
                wtr.write_record([
                    subject.as_str(),
                    &order,
                    &p.x.to_string(),
                    &p.y.to_string(),
                    &t.to_string(),
                ])?;
            } else {
                wtr.write_record([subject.as_str(), &order, &p.x.to_string(), &p.y.to_string()])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Saliency rasters
// ---------------------------------------------------------------------------

/// On-disk raster layout: window header plus row-major values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterFile {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl RasterFile {
    pub fn from_map(map: &SaliencyMap) -> Self {
        let (nx, ny) = map.dims();
        RasterFile {
            window: *map.window(),
            nx,
            ny,
            values: map.values().to_vec(),
        }
    }

    pub fn into_map(self) -> Result<SaliencyMap> {
        SaliencyMap::new(self.window, self.nx, self.ny, self.values)
    }
}

pub fn write_raster_json(path: &Path, map: &SaliencyMap) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(file, &RasterFile::from_map(map))?;
    Ok(())
}

pub fn read_raster_json(path: &Path) -> Result<SaliencyMap> {
    let file = BufReader::new(File::open(path)?);
    let raster: RasterFile = serde_json::from_reader(file)?;
    raster.into_map()
}

/// Import a plain whitespace-separated text grid: `ny` lines of `nx` numbers,
/// top row first (row-major with the last line holding the lowest-`y` row is
/// not assumed; lines map to rows `j = 0..ny` directly).
pub fn read_raster_text(path: &Path, window: &Window) -> Result<SaliencyMap> {
    let text = std::fs::read_to_string(path)?;
    parse_raster_text(&text, window)
}

pub fn parse_raster_text(text: &str, window: &Window) -> Result<SaliencyMap> {
    let mut values = Vec::new();
    let mut nx = None;
    let mut ny = 0usize;
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Config(format!("cannot parse raster value {tok:?}")))
            })
            .collect::<Result<_>>()?;
        match nx {
            None => nx = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Config(format!(
                    "ragged raster: line has {} values, expected {w}",
                    row.len()
                )))
            }
            _ => {}
        }
        values.extend(row);
        ny += 1;
    }
    let nx = nx.ok_or(Error::EmptyInput)?;
    SaliencyMap::new(*window, nx, ny, values)
}

// ---------------------------------------------------------------------------
// Summary curves and bands
// ---------------------------------------------------------------------------

/// Write a curve as `k,value` rows.
pub fn write_curve_csv(path: &Path, curve: &SummaryCurve) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    wtr.write_record(["k", "value"])?;
    for (k, v) in curve.values.iter().enumerate() {
        wtr.write_record([(k + 1).to_string(), v.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Write a band as `k,lower,upper` rows.
pub fn write_band_csv(path: &Path, band: &EnvelopeBand) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    wtr.write_record(["k", "lower", "upper"])?;
    for k in 0..band.lower.len() {
        wtr.write_record([
            (k + 1).to_string(),
            band.lower[k].to_string(),
            band.upper[k].to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Minimal SVG line plot of a curve on top of an optional envelope band,
/// for quick visual inspection only.
pub fn write_curve_svg(path: &Path, curve: &SummaryCurve, band: Option<&EnvelopeBand>) -> Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    let n = curve.values.len().max(2);
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for &v in &curve.values {
        ymin = ymin.min(v);
        ymax = ymax.max(v);
    }
    if let Some(b) = band {
        for &v in b.lower.iter().chain(b.upper.iter()) {
            ymin = ymin.min(v);
            ymax = ymax.max(v);
        }
    }
    if ymax <= ymin {
        ymax = ymin + 1.0;
    }
    let sx = |k: usize| PAD + (k as f64 / (n - 1) as f64) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - ymin) / (ymax - ymin) * (H - 2.0 * PAD);
    let polyline = |vals: &[f64]| -> String {
        vals.iter()
            .enumerate()
            .map(|(k, &v)| format!("{:.2},{:.2}", sx(k), sy(v)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if let Some(b) = band {
        let mut area: Vec<String> = Vec::new();
        for (k, &v) in b.upper.iter().enumerate() {
            area.push(format!("{:.2},{:.2}", sx(k), sy(v)));
        }
        for (k, &v) in b.lower.iter().enumerate().rev() {
            area.push(format!("{:.2},{:.2}", sx(k), sy(v)));
        }
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"#cfd8e8\" stroke=\"none\"/>\n",
            area.join(" ")
        ));
    }
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\"/>\n",
        polyline(&curve.values)
    ));
    svg.push_str(&format!(
        "<text x=\"{PAD}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
        curve.tag.name()
    ));
    svg.push_str("</svg>\n");
    File::create(path)?.write_all(svg.as_bytes())?;
    Ok(())
}
