//! Text formats: ROC CSV, cycle-profile CSV, signal dumps and threshold files.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! file back yields bit-identical values.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::detect::{DetectorKind, Threshold};
use crate::error::{Error, Result};
use crate::scd::CycleProfile;
use crate::siggen::SampleBuffer;

use super::{sort_points, RocPoint};

pub const ROC_HEADER: &str =
    "detector,snr_db,target_pf,threshold,measured_pf,measured_pd,h0_trials,h1_trials";
pub const PROFILE_HEADER: &str = "alpha_hz,i_alpha";
const SIGNAL_HEADER_PREFIX: &str = "# sample_rate_hz=";

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_f64(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("'{field}' is not a number")))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn format_roc_csv(points: &[RocPoint]) -> String {
    let mut sorted = points.to_vec();
    sort_points(&mut sorted);
    let mut out = String::from(ROC_HEADER);
    out.push('\n');
    for p in &sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.detector, p.snr_db, p.target_pf, p.threshold, p.measured_pf, p.measured_pd,
            p.h0_trials, p.h1_trials
        ));
    }
    out
}

pub fn emit_roc_csv(points: &[RocPoint], path: &Path) -> Result<()> {
    write_file(path, &format_roc_csv(points))
}

pub fn read_roc_csv(path: &Path) -> Result<Vec<RocPoint>> {
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == ROC_HEADER => {}
        _ => return Err(parse_err(path, 1, "missing ROC header")),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let ln = i + 1;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return Err(parse_err(path, ln, format!("expected 8 fields, got {}", f.len())));
            }
            let count = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(path, ln, format!("'{s}' is not a count")))
            };
            Ok(RocPoint {
                detector: f[0].parse().map_err(|e: Error| parse_err(path, ln, e.to_string()))?,
                snr_db: parse_f64(path, ln, f[1])?,
                target_pf: parse_f64(path, ln, f[2])?,
                threshold: parse_f64(path, ln, f[3])?,
                measured_pf: parse_f64(path, ln, f[4])?,
                measured_pd: parse_f64(path, ln, f[5])?,
                h0_trials: count(f[6])?,
                h1_trials: count(f[7])?,
            })
        })
        .collect()
}

pub fn format_profile_csv(profile: &CycleProfile) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for (a, m) in profile.alphas_hz.iter().zip(&profile.magnitudes) {
        out.push_str(&format!("{a},{m}\n"));
    }
    out
}

pub fn emit_profile_csv(profile: &CycleProfile, path: &Path) -> Result<()> {
    write_file(path, &format_profile_csv(profile))
}

pub fn read_profile_csv(path: &Path) -> Result<CycleProfile> {
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == PROFILE_HEADER => {}
        _ => return Err(parse_err(path, 1, "missing profile header")),
    }
    let mut profile = CycleProfile {
        alphas_hz: Vec::new(),
        magnitudes: Vec::new(),
    };
    for (i, l) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let (a, m) = l
            .split_once(',')
            .ok_or_else(|| parse_err(path, i + 1, "expected two fields"))?;
        profile.alphas_hz.push(parse_f64(path, i + 1, a)?);
        profile.magnitudes.push(parse_f64(path, i + 1, m)?);
    }
    Ok(profile)
}

/// `# sample_rate_hz=<rate>` followed by one sample per line.
pub fn write_signal<W: Write>(buf: &SampleBuffer, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SIGNAL_HEADER_PREFIX}{}", buf.sample_rate_hz())?;
    for x in buf.samples() {
        writeln!(w, "{x}")?;
    }
    w.flush()
}

pub fn save_signal(buf: &SampleBuffer, path: &Path) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_signal(buf, std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

pub fn load_signal(path: &Path) -> Result<SampleBuffer> {
    let text = read_file(path)?;
    let mut lines = text.lines().enumerate();
    let rate = match lines.next() {
        Some((_, h)) if h.starts_with(SIGNAL_HEADER_PREFIX) => {
            parse_f64(path, 1, &h[SIGNAL_HEADER_PREFIX.len()..])?
        }
        _ => {
            return Err(parse_err(
                path,
                1,
                format!("first line must be '{SIGNAL_HEADER_PREFIX}<value>'"),
            ))
        }
    };
    let samples = lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_f64(path, i + 1, l))
        .collect::<Result<Vec<f64>>>()?;
    SampleBuffer::new(samples, rate).map_err(|e| parse_err(path, 1, e.to_string()))
}

/// Single line `detector,target_pf,threshold`.
pub fn format_threshold(t: &Threshold) -> String {
    format!("{},{},{}\n", t.detector, t.target_pf, t.value)
}

pub fn save_threshold(t: &Threshold, path: &Path) -> Result<()> {
    write_file(path, &format_threshold(t))
}

/// The calibration sample size is not stored in the file and comes back as 0.
pub fn load_threshold(path: &Path) -> Result<Threshold> {
    let text = read_file(path)?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| parse_err(path, 1, "empty threshold file"))?;
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 3 {
        return Err(parse_err(path, 1, "expected detector,target_pf,threshold"));
    }
    let detector: DetectorKind = f[0]
        .trim()
        .parse()
        .map_err(|e: Error| parse_err(path, 1, e.to_string()))?;
    Ok(Threshold {
        detector,
        target_pf: parse_f64(path, 1, f[1])?,
        value: parse_f64(path, 1, f[2])?,
        calibration_trials: 0,
    })
}
