//! File formats: parity traces, PSD exports, sweep CSVs, device tables.
//!
//! Text formats are line oriented, lossless for every field they carry
//! (floats print in shortest round-trip form), and parse back bit-exact.
//! The trace text format stores the measured values plus run metadata;
//! ground truth and mapping metadata travel only in the JSON variant.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::cohort::DeviceRecord;
use crate::error::{Error, Result};
use crate::spectral::PsdEstimate;
use crate::sweep::{SweepPoint, TemperatureSweep};
use crate::telegraph::{DiscardReason, ParityTrace};

/// Spectral convention note carried in PSD export headers: spectra are of
/// the +-1 parity sequence, not of switching events.
pub const PSD_CONVENTION: &str = "parity-sequence";

/// Device table column header (stable contract).
pub const DEVICE_TABLE_HEADER: &str =
    "device_id,material,design,style,gap_um,paddle_w_um,paddle_h_um,f01_ghz,t1_us,qpt_rate_hz,re_y_norm";

/// Sweep file column header (stable contract).
pub const SWEEP_HEADER: &str = "t_mk,gamma_qp_hz,gamma_err_hz";

// ---------------------------------------------------------------- traces

/// Serialize a trace to the line-oriented text format:
/// `# dt=<s> seed=<u64> discarded=<bool>` (plus a reason line when
/// discarded), then one `+1`/`-1` per line.
pub fn trace_to_text(trace: &ParityTrace) -> String {
    let mut out = String::with_capacity(trace.values.len() * 3 + 64);
    out.push_str(&format!(
        "# dt={} seed={} discarded={}\n",
        trace.dt, trace.seed, trace.discarded
    ));
    if trace.discarded {
        out.push_str(&format!("# discard_reason={}\n", trace.discard_reason));
    }
    for v in &trace.values {
        out.push_str(if *v > 0 { "+1\n" } else { "-1\n" });
    }
    out
}

/// Parse the text format back into a trace (measured values and metadata
/// only; `true_values` and mapping metadata live in the JSON variant).
pub fn trace_from_text(text: &str) -> Result<ParityTrace> {
    let mut dt = None;
    let mut seed = None;
    let mut discarded = None;
    let mut reason = DiscardReason::None;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for field in rest.split_whitespace() {
                let Some((key, value)) = field.split_once('=') else {
                    return Err(Error::Parse(format!(
                        "line {}: malformed header field '{field}'",
                        lineno + 1
                    )));
                };
                match key {
                    "dt" => {
                        dt = Some(value.parse::<f64>().map_err(|e| {
                            Error::Parse(format!("line {}: bad dt: {e}", lineno + 1))
                        })?)
                    }
                    "seed" => {
                        seed = Some(value.parse::<u64>().map_err(|e| {
                            Error::Parse(format!("line {}: bad seed: {e}", lineno + 1))
                        })?)
                    }
                    "discarded" => {
                        discarded = Some(value.parse::<bool>().map_err(|e| {
                            Error::Parse(format!("line {}: bad discarded: {e}", lineno + 1))
                        })?)
                    }
                    "discard_reason" => {
                        reason = match value {
                            "none" => DiscardReason::None,
                            "charge-drift" => DiscardReason::ChargeDrift,
                            other => {
                                return Err(Error::Parse(format!(
                                    "line {}: unknown discard reason '{other}'",
                                    lineno + 1
                                )))
                            }
                        }
                    }
                    other => {
                        return Err(Error::Parse(format!(
                            "line {}: unknown header key '{other}'",
                            lineno + 1
                        )))
                    }
                }
            }
            continue;
        }
        match line {
            "+1" | "1" => values.push(1),
            "-1" => values.push(-1),
            other => {
                return Err(Error::Parse(format!(
                    "line {}: expected +1 or -1, got '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    let dt = dt.ok_or_else(|| Error::Parse("missing dt header".into()))?;
    let seed = seed.ok_or_else(|| Error::Parse("missing seed header".into()))?;
    let discarded = discarded.ok_or_else(|| Error::Parse("missing discarded header".into()))?;
    if values.is_empty() {
        return Err(Error::Parse("trace has no samples".into()));
    }
    Ok(ParityTrace {
        values,
        dt,
        seed,
        true_values: None,
        discarded,
        discard_reason: reason,
        mapping: None,
    })
}

/// Compact JSON variant carrying every trace field.
pub fn trace_to_json(trace: &ParityTrace) -> Result<String> {
    serde_json::to_string(trace).map_err(|e| Error::Parse(e.to_string()))
}

pub fn trace_from_json(json: &str) -> Result<ParityTrace> {
    serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
}

// ------------------------------------------------------------------ PSDs

/// Two-column PSD export (`Hz`, `1/Hz`) with a metadata header.
pub fn psd_to_text(psd: &PsdEstimate) -> String {
    let mut out = String::with_capacity(psd.freqs.len() * 24 + 128);
    out.push_str(&format!(
        "# dt={} segment_length={} n_averages={} window={} convention={}\n",
        psd.dt, psd.segment_length, psd.n_averages, psd.window, PSD_CONVENTION
    ));
    for (f, p) in psd.freqs.iter().zip(&psd.power) {
        out.push_str(&format!("{f} {p}\n"));
    }
    out
}

/// Parse a PSD export back.
pub fn psd_from_text(text: &str) -> Result<PsdEstimate> {
    use crate::spectral::Window;
    let mut dt = None;
    let mut segment_length = None;
    let mut n_averages = None;
    let mut window = None;
    let mut freqs = Vec::new();
    let mut power = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for field in rest.split_whitespace() {
                let Some((key, value)) = field.split_once('=') else {
                    continue;
                };
                match key {
                    "dt" => dt = value.parse::<f64>().ok(),
                    "segment_length" => segment_length = value.parse::<usize>().ok(),
                    "n_averages" => n_averages = value.parse::<usize>().ok(),
                    "window" => {
                        window = Some(match value {
                            "rectangular" => Window::Rectangular,
                            "hann" => Window::Hann,
                            other => {
                                return Err(Error::Parse(format!(
                                    "line {}: unknown window '{other}'",
                                    lineno + 1
                                )))
                            }
                        })
                    }
                    _ => {}
                }
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(f), Some(p)) = (parts.next(), parts.next()) else {
            return Err(Error::Parse(format!(
                "line {}: expected two columns",
                lineno + 1
            )));
        };
        freqs.push(
            f.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: bad frequency: {e}", lineno + 1)))?,
        );
        power.push(
            p.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: bad power: {e}", lineno + 1)))?,
        );
    }
    Ok(PsdEstimate {
        freqs,
        power,
        n_averages: n_averages.ok_or_else(|| Error::Parse("missing n_averages".into()))?,
        dt: dt.ok_or_else(|| Error::Parse("missing dt".into()))?,
        segment_length: segment_length
            .ok_or_else(|| Error::Parse("missing segment_length".into()))?,
        window: window.ok_or_else(|| Error::Parse("missing window".into()))?,
    })
}

// ----------------------------------------------------------------- sweeps

/// Write a sweep as `t_mk,gamma_qp_hz,gamma_err_hz` CSV (empty error field
/// when absent).
pub fn sweep_to_csv(sweep: &TemperatureSweep) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for p in &sweep.points {
        match p.gamma_err_hz {
            Some(e) => out.push_str(&format!("{},{},{}\n", p.t_mk, p.gamma_hz, e)),
            None => out.push_str(&format!("{},{},\n", p.t_mk, p.gamma_hz)),
        }
    }
    out
}

/// Parse a sweep CSV.
pub fn sweep_from_csv(text: &str) -> Result<TemperatureSweep> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    {
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
        let expected: Vec<&str> = SWEEP_HEADER.split(',').collect();
        let got: Vec<&str> = headers.iter().collect();
        if got.len() < 2 || got[..2] != expected[..2] {
            return Err(Error::Parse(format!(
                "sweep header mismatch: expected '{SWEEP_HEADER}', got '{}'",
                got.join(",")
            )));
        }
    }
    let mut points = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
        let t_mk: f64 = row
            .get(0)
            .ok_or_else(|| Error::Parse(format!("row {}: missing t_mk", i + 1)))?
            .parse()
            .map_err(|e| Error::Parse(format!("row {}: bad t_mk: {e}", i + 1)))?;
        let gamma_hz: f64 = row
            .get(1)
            .ok_or_else(|| Error::Parse(format!("row {}: missing rate", i + 1)))?
            .parse()
            .map_err(|e| Error::Parse(format!("row {}: bad rate: {e}", i + 1)))?;
        let gamma_err_hz = match row.get(2) {
            None | Some("") => None,
            Some(v) => Some(
                v.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: bad error: {e}", i + 1)))?,
            ),
        };
        points.push(SweepPoint {
            t_mk,
            gamma_hz,
            gamma_err_hz,
        });
    }
    TemperatureSweep::new(points)
}

// ----------------------------------------------------------- device table

/// A rejected device-table row with its line number and reason.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

/// Parse a device table, collecting row-level problems instead of failing
/// the whole file. Duplicated device ids are rejected row-by-row.
pub fn read_device_table(text: &str) -> Result<(Vec<DeviceRecord>, Vec<RowError>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    {
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?;
        let got: Vec<&str> = headers.iter().collect();
        let expected: Vec<&str> = DEVICE_TABLE_HEADER.split(',').collect();
        if got != expected {
            return Err(Error::Parse(format!(
                "device table header mismatch: expected '{DEVICE_TABLE_HEADER}'"
            )));
        }
    }
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2; // header is line 1
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        match parse_device_row(&row) {
            Ok(rec) => {
                if let Some(prev) = seen.insert(rec.device_id.clone(), line) {
                    errors.push(RowError {
                        line,
                        message: format!(
                            "duplicate device_id '{}' (first seen on line {prev})",
                            rec.device_id
                        ),
                    });
                } else {
                    records.push(rec);
                }
            }
            Err(e) => errors.push(RowError {
                line,
                message: e.to_string(),
            }),
        }
    }
    Ok((records, errors))
}

fn parse_device_row(row: &csv::StringRecord) -> Result<DeviceRecord> {
    let field = |i: usize, name: &str| -> Result<&str> {
        row.get(i)
            .ok_or_else(|| Error::Parse(format!("missing column '{name}'")))
    };
    let num = |i: usize, name: &str| -> Result<f64> {
        field(i, name)?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad {name}: {e}")))
    };
    let t1_us = num(8, "t1_us")?;
    let re_y = match field(10, "re_y_norm")? {
        "" => None,
        v => Some(
            v.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad re_y_norm: {e}")))?,
        ),
    };
    let record = DeviceRecord {
        device_id: field(0, "device_id")?.to_string(),
        material: field(1, "material")?.parse()?,
        design: field(2, "design")?.parse()?,
        style: field(3, "style")?.parse()?,
        gap_um: num(4, "gap_um")?,
        paddle_w_um: num(5, "paddle_w_um")?,
        paddle_h_um: num(6, "paddle_h_um")?,
        f01_ghz: num(7, "f01_ghz")?,
        t1_us,
        gamma1_hz: 1.0 / (t1_us * 1e-6),
        qpt_rate_hz: num(9, "qpt_rate_hz")?,
        re_y_norm: re_y,
    };
    record.validate()?;
    Ok(record)
}

/// Write a device table in the stable column order.
pub fn write_device_table(records: &[DeviceRecord]) -> String {
    let mut out = String::from(DEVICE_TABLE_HEADER);
    out.push('\n');
    for r in records {
        let re_y = r.re_y_norm.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.device_id,
            r.material,
            r.design,
            r.style,
            r.gap_um,
            r.paddle_w_um,
            r.paddle_h_um,
            r.f01_ghz,
            r.t1_us,
            r.qpt_rate_hz,
            re_y
        ));
    }
    out
}

// ------------------------------------------------------------ I/O helpers

/// Read a whole file as text.
pub fn read_text(path: &std::path::Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Line-buffered reader convenience for large trace files.
pub fn read_trace_file(path: &std::path::Path) -> Result<ParityTrace> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        return trace_from_json(&read_text(path)?);
    }
    let file = std::fs::File::open(path)?;
    let mut text = String::new();
    for line in std::io::BufReader::new(file).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    trace_from_text(&text)
}

/// Atomically write `contents` to `path` (temp file + rename in the target
/// directory).
pub fn write_atomic(path: &std::path::Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile_in(dir)?;
    tmp.1.write_all(contents.as_bytes())?;
    tmp.1.sync_all()?;
    drop(tmp.1);
    std::fs::rename(&tmp.0, path)?;
    Ok(())
}

fn tempfile_in(dir: &std::path::Path) -> Result<(std::path::PathBuf, std::fs::File)> {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    for _ in 0..64 {
        let name = format!(
            ".tmp-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        );
        let candidate = dir.join(name);
        match std::fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&candidate)
        {
            Ok(f) => return Ok((candidate, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(Error::Io(std::io::Error::other(
        "could not create a temporary file",
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telegraph::{simulate_telegraph, TelegraphConfig};

    fn sample_trace() -> ParityTrace {
        simulate_telegraph(&TelegraphConfig {
            gamma_hz: 17.0,
            fs_hz: 2e3,
            n_samples: 512,
            seed: 99,
        })
        .unwrap()
    }

    #[test]
    fn trace_text_round_trip_is_bit_exact() {
        let mut t = sample_trace();
        t.dt = 0.0005000000000000001; // not representable as a short decimal
        let text = trace_to_text(&t);
        let back = trace_from_text(&text).unwrap();
        assert_eq!(back.values, t.values);
        assert_eq!(back.dt.to_bits(), t.dt.to_bits());
        assert_eq!(back.seed, t.seed);
        assert_eq!(back.discarded, t.discarded);
        // And serialization is deterministic.
        assert_eq!(text, trace_to_text(&back));
    }

    #[test]
    fn discarded_trace_round_trips_reason() {
        let mut t = sample_trace();
        t.discarded = true;
        t.discard_reason = DiscardReason::ChargeDrift;
        let back = trace_from_text(&trace_to_text(&t)).unwrap();
        assert!(back.discarded);
        assert_eq!(back.discard_reason, DiscardReason::ChargeDrift);
    }

    #[test]
    fn trace_json_round_trip_keeps_truth_and_meta() {
        use crate::protocol::{apply_cp_mapping, MappingConfig};
        let cfg = MappingConfig {
            ramsey_delay_s: Some(5e-6),
            ..MappingConfig::default()
        };
        let mapped = apply_cp_mapping(&sample_trace(), &cfg, 3).unwrap();
        let json = trace_to_json(&mapped).unwrap();
        let back = trace_from_json(&json).unwrap();
        assert_eq!(back, mapped);
    }

    #[test]
    fn malformed_traces_are_rejected() {
        assert!(trace_from_text("") .is_err());
        assert!(trace_from_text("# dt=0.1 seed=1 discarded=false\n+2\n").is_err());
        assert!(trace_from_text("# dt=x seed=1 discarded=false\n+1\n").is_err());
        assert!(trace_from_text("+1\n-1\n").is_err()); // missing header
    }

    #[test]
    fn psd_text_round_trip() {
        use crate::spectral::{estimate_psd, Window};
        let psd = estimate_psd(&sample_trace(), 128, Window::Hann).unwrap();
        let text = psd_to_text(&psd);
        assert!(text.contains("convention=parity-sequence"));
        let back = psd_from_text(&text).unwrap();
        assert_eq!(back, psd);
    }

    #[test]
    fn sweep_csv_round_trip_with_and_without_errors() {
        let sweep = TemperatureSweep::new(vec![
            SweepPoint { t_mk: 20.0, gamma_hz: 1.25, gamma_err_hz: Some(0.06) },
            SweepPoint { t_mk: 45.5, gamma_hz: 2.5, gamma_err_hz: None },
            SweepPoint { t_mk: 99.0, gamma_hz: 30.125, gamma_err_hz: Some(1.5) },
        ])
        .unwrap();
        let csv = sweep_to_csv(&sweep);
        assert!(csv.starts_with(SWEEP_HEADER));
        let back = sweep_from_csv(&csv).unwrap();
        assert_eq!(back, sweep);
        assert!(sweep_from_csv("wrong,header\n1,2\n").is_err());
    }

    #[test]
    fn device_table_round_trip_and_row_errors() {
        use crate::synth::{generate_cohort, CohortSpec};
        let cohort = generate_cohort(&CohortSpec::default(), 3).unwrap();
        let text = write_device_table(&cohort.devices);
        let (records, errors) = read_device_table(&text).unwrap();
        assert!(errors.is_empty(), "{errors:?}");
        assert_eq!(records.len(), cohort.devices.len());
        for (a, b) in records.iter().zip(&cohort.devices) {
            assert_eq!(a.device_id, b.device_id);
            assert_eq!(a.qpt_rate_hz.to_bits(), b.qpt_rate_hz.to_bits());
            assert_eq!(
                a.re_y_norm.map(f64::to_bits),
                b.re_y_norm.map(f64::to_bits)
            );
        }
    }

    #[test]
    fn bad_rows_are_collected_not_fatal() {
        let text = format!(
            "{DEVICE_TABLE_HEADER}\n\
             dev-1,Nb,C,non-tapered,20,500,60,5.0,100,5.0,\n\
             dev-2,Unobtainium,C,non-tapered,20,500,60,5.0,100,5.0,\n\
             dev-3,Nb,Z,non-tapered,20,500,60,5.0,100,5.0,\n\
             dev-1,Nb,C,non-tapered,20,500,60,5.0,100,5.0,\n\
             dev-4,Nb,C,non-tapered,20,500,60,5.0,100,5.0,1.7\n"
        );
        let (records, errors) = read_device_table(&text).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(errors.len(), 4);
        assert!(errors[0].message.contains("material"));
        assert!(errors[1].message.contains("design"));
        assert!(errors[2].message.contains("duplicate"));
        assert!(errors[3].message.contains("re_y_norm"));
    }

    #[test]
    fn atomic_write_creates_parents_and_replaces() {
        let dir = std::env::temp_dir().join(format!("qpt-fmt-test-{}", std::process::id()));
        let path = dir.join("nested/out.txt");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

