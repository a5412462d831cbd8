//! Time-tag streams: CSV ingestion, binning into fixed windows, joint count
//! histograms and their comparison with theory.
//!
//! Timestamps are kept as integer tenths of a nanosecond so that a 3.3 ns
//! detector resolution is exact.
//!
//! Tag CSV format, one event per line:
//!
//! ```text
//! channel,timestamp_ns
//! # duration_ns = 240000
//! 0,33
//! 1,412.5
//! ```
//!
//! The header is optional. Channel `0` is the `+` port, `1` the `−` port.
//! Timestamps carry at most one decimal digit. Lines starting with `#` are
//! comments; `# duration_ns = T` declares the stream length, which otherwise
//! ends one resolution tick after the last tag.

use std::io::{self, BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::photostat::JointPhotocountDistribution;
use crate::simkit::{sample_poisson, TrialOutcome};

pub const HEADER: &str = "channel,timestamp_ns";
const DURATION_KEY: &str = "duration_ns";

/// Normalized residual magnitude counted as agreement.
pub const AGREEMENT_UNITS: f64 = 2.0;
/// Fraction of occupied cells that must agree for a consistent comparison.
pub const AGREEMENT_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagRecord {
    /// `0` for the `+` port, `1` for the `−` port.
    pub channel: u8,
    /// Tenths of a nanosecond since stream start.
    pub timestamp: u64,
}

impl TagRecord {
    pub fn timestamp_ns(&self) -> f64 {
        self.timestamp as f64 / 10.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagStream {
    pub records: Vec<TagRecord>,
    /// Declared stream length in tenths of a nanosecond.
    pub duration: Option<u64>,
}

impl TagStream {
    /// Stream length in tenths of a nanosecond.
    pub fn end(&self, resolution: u64) -> u64 {
        let last = self.records.last().map_or(0, |r| r.timestamp + resolution);
        self.duration.map_or(last, |d| d.max(last))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{HEADER}")?;
        if let Some(d) = self.duration {
            writeln!(out, "# {DURATION_KEY} = {}", format_tenths(d))?;
        }
        for r in &self.records {
            writeln!(out, "{},{}", r.channel, format_tenths(r.timestamp))?;
        }
        Ok(())
    }
}

fn format_tenths(t: u64) -> String {
    if t.is_multiple_of(10) {
        format!("{}", t / 10)
    } else {
        format!("{}.{}", t / 10, t % 10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinningConfig {
    pub window_ns: u64,
    /// Detector resolution in tenths of a nanosecond.
    pub resolution_tenths: u64,
    pub truncation: usize,
}

impl Default for BinningConfig {
    fn default() -> Self {
        Self {
            window_ns: 80_000,
            resolution_tenths: 33,
            truncation: 15,
        }
    }
}

impl BinningConfig {
    pub fn window_tenths(&self) -> u64 {
        self.window_ns * 10
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_ns == 0 || self.resolution_tenths == 0 {
            return Err(Error::domain("window and resolution must be > 0"));
        }
        if self.window_tenths() < self.resolution_tenths {
            return Err(Error::domain("window must be longer than the resolution"));
        }
        if self.truncation < 1 {
            return Err(Error::domain("truncation K must be >= 1"));
        }
        Ok(())
    }
}

/// Decimal nanoseconds with at most one fractional digit, in tenths.
fn parse_timestamp(field: &str) -> std::result::Result<u64, String> {
    let (int, frac) = match field.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (field, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) {
        return Err(format!("invalid timestamp {field:?}"));
    }
    let tenth = match frac {
        None => 0,
        Some(f) if f.len() == 1 && digits(f) => u64::from(f.as_bytes()[0] - b'0'),
        Some(_) => {
            return Err(format!(
                "timestamp {field:?} has more than one decimal digit"
            ))
        }
    };
    int.parse::<u64>()
        .ok()
        .and_then(|v| v.checked_mul(10))
        .and_then(|v| v.checked_add(tenth))
        .ok_or_else(|| format!("timestamp {field:?} out of range"))
}

fn parse_duration(comment: &str) -> Option<std::result::Result<u64, String>> {
    let (key, value) = comment.split_once('=')?;
    (key.trim() == DURATION_KEY).then(|| parse_timestamp(value.trim()))
}

/// Reads a tag CSV, checking the channel, the format and that timestamps
/// never decrease.
pub fn parse_tags<R: BufRead>(input: R) -> Result<TagStream> {
    parse_with(input, None)
}

/// [`parse_tags`] that also requires timestamps to be multiples of the
/// resolution.
pub fn parse_tags_checked<R: BufRead>(input: R, resolution_tenths: u64) -> Result<TagStream> {
    if resolution_tenths == 0 {
        return Err(Error::domain("resolution must be > 0"));
    }
    parse_with(input, Some(resolution_tenths))
}

fn parse_with<R: BufRead>(input: R, resolution: Option<u64>) -> Result<TagStream> {
    let mut stream = TagStream::default();
    let mut seen_data = false;
    for (index, line) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let fail = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let text = line.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if let Some(parsed) = parse_duration(comment) {
                stream.duration = Some(parsed.map_err(fail)?);
            }
            continue;
        }
        if !seen_data && text.trim() == HEADER {
            seen_data = true;
            continue;
        }
        seen_data = true;
        let (channel, timestamp) = text
            .split_once(',')
            .ok_or_else(|| fail(format!("expected `channel,timestamp_ns`, got {text:?}")))?;
        let channel = match channel.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(fail(format!("channel must be 0 or 1, got {other:?}"))),
        };
        let timestamp = parse_timestamp(timestamp.trim()).map_err(fail)?;
        if let Some(last) = stream.records.last() {
            if timestamp < last.timestamp {
                return Err(fail(format!(
                    "timestamp {} precedes {}",
                    format_tenths(timestamp),
                    format_tenths(last.timestamp)
                )));
            }
        }
        if let Some(res) = resolution {
            if timestamp % res != 0 {
                return Err(fail(format!(
                    "timestamp {} is not a multiple of the resolution {}",
                    format_tenths(timestamp),
                    format_tenths(res)
                )));
            }
        }
        stream.records.push(TagRecord { channel, timestamp });
    }
    Ok(stream)
}

/// Per-window `(k, k′)` counts without clamping. Windows are contiguous
/// from `t = 0`; the trailing partial window is dropped.
pub fn window_counts(stream: &TagStream, config: &BinningConfig) -> Vec<TrialOutcome> {
    let width = config.window_tenths();
    let windows = (stream.end(config.resolution_tenths) / width) as usize;
    let mut out = vec![TrialOutcome::new(0, 0); windows];
    for r in &stream.records {
        let w = (r.timestamp / width) as usize;
        if w >= windows {
            break;
        }
        match r.channel {
            0 => out[w].k_plus += 1,
            _ => out[w].k_minus += 1,
        }
    }
    out
}

/// Per-window counts clamped at the configured truncation.
pub fn bin_counts(stream: &TagStream, config: &BinningConfig) -> Vec<TrialOutcome> {
    let k = config.truncation;
    window_counts(stream, config)
        .into_iter()
        .map(|o| o.clamped(k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalHistogram {
    truncation: usize,
    counts: Vec<u64>,
    total: u64,
}

impl EmpiricalHistogram {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn get(&self, k: usize, k_prime: usize) -> u64 {
        self.counts[k * (self.truncation + 1) + k_prime]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,kprime,count")?;
        let side = self.truncation + 1;
        for k in 0..side {
            for kp in 0..side {
                writeln!(out, "{k},{kp},{}", self.get(k, kp))?;
            }
        }
        Ok(())
    }
}

/// Multiplicities of the outcomes, each clamped at `K`.
pub fn histogram(outcomes: &[TrialOutcome], truncation: usize) -> EmpiricalHistogram {
    let side = truncation + 1;
    let mut counts = vec![0u64; side * side];
    for o in outcomes {
        let o = o.clamped(truncation);
        counts[o.k_plus * side + o.k_minus] += 1;
    }
    EmpiricalHistogram {
        truncation,
        counts,
        total: outcomes.len() as u64,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryComparison {
    /// `N_kk′ − total · P_kk′`, row-major.
    pub residuals: Vec<f64>,
    /// Residuals over `√max(N_kk′, 1)`.
    pub normalized: Vec<f64>,
    pub occupied_cells: usize,
    /// Fraction of occupied cells with `|normalized| ≤ 2`.
    pub within_two: f64,
    pub total_variation: f64,
}

impl TheoryComparison {
    pub fn is_consistent(&self) -> bool {
        self.within_two >= AGREEMENT_FRACTION
    }
}

pub fn compare_to_theory(
    hist: &EmpiricalHistogram,
    theory: &JointPhotocountDistribution,
) -> Result<TheoryComparison> {
    if hist.truncation != theory.truncation() {
        return Err(Error::domain(format!(
            "histogram K = {} but theory K = {}",
            hist.truncation,
            theory.truncation()
        )));
    }
    if hist.total == 0 {
        return Err(Error::domain("histogram is empty"));
    }
    let total = hist.total as f64;
    let mut residuals = Vec::with_capacity(hist.counts.len());
    let mut normalized = Vec::with_capacity(hist.counts.len());
    let (mut occupied, mut agree, mut tv) = (0usize, 0usize, 0.0);
    for (&n, &p) in hist.counts.iter().zip(theory.probs()) {
        let r = n as f64 - total * p;
        let z = r / (n.max(1) as f64).sqrt();
        if n > 0 {
            occupied += 1;
            if z.abs() <= AGREEMENT_UNITS {
                agree += 1;
            }
        }
        tv += (n as f64 / total - p).abs();
        residuals.push(r);
        normalized.push(z);
    }
    Ok(TheoryComparison {
        residuals,
        normalized,
        occupied_cells: occupied,
        within_two: agree as f64 / occupied as f64,
        total_variation: 0.5 * tv,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTags {
    pub stream: TagStream,
    /// Counts drawn for each window before any clamping.
    pub counts: Vec<TrialOutcome>,
}

/// Random-phase tag stream: per window a uniform phase, Poisson counts at
/// `I±`, and each event at a uniformly chosen resolution tick inside the
/// window. The declared duration covers exactly `windows` windows.
pub fn synthesize_tags<R: Rng + ?Sized>(
    rng: &mut R,
    energy_per_window: f64,
    vis_magnitude: f64,
    config: &BinningConfig,
    windows: usize,
) -> Result<SyntheticTags> {
    config.validate()?;
    if windows < 1 {
        return Err(Error::domain("windows must be >= 1"));
    }
    if !(0.0..=1.0).contains(&vis_magnitude) {
        return Err(Error::domain(format!(
            "visibility magnitude must be in [0, 1], got {vis_magnitude}"
        )));
    }
    if !energy_per_window.is_finite() || energy_per_window < 0.0 {
        return Err(Error::domain("energy per window must be >= 0"));
    }
    let width = config.window_tenths();
    let res = config.resolution_tenths;
    let mut records = Vec::with_capacity((windows as f64 * energy_per_window * 1.1) as usize);
    let mut counts = Vec::with_capacity(windows);
    let mut events = Vec::new();
    for w in 0..windows as u64 {
        let start = w * width;
        let first_tick = start.div_ceil(res);
        let ticks = (start + width).div_ceil(res) - first_tick;
        let phi = rng.random::<f64>() * std::f64::consts::TAU;
        let plus = 0.5 * energy_per_window * (1.0 + vis_magnitude * phi.cos());
        let minus = (energy_per_window - plus).max(0.0);
        let outcome = TrialOutcome::new(sample_poisson(rng, plus), sample_poisson(rng, minus));
        events.clear();
        for (channel, n) in [(0u8, outcome.k_plus), (1u8, outcome.k_minus)] {
            for _ in 0..n {
                let tick = first_tick + rng.random_range(0..ticks);
                events.push(TagRecord {
                    channel,
                    timestamp: tick * res,
                });
            }
        }
        events.sort_unstable_by_key(|r| (r.timestamp, r.channel));
        records.extend_from_slice(&events);
        counts.push(outcome);
    }
    Ok(SyntheticTags {
        stream: TagStream {
            records,
            duration: Some(windows as u64 * width),
        },
        counts,
    })
}
