//! Quality-report CSV emission.
//!
//! Schema: `label,band,psnr_db,ssim,mpsnr_db,mssim,seconds`. A report emits
//! one row per band (band numbered from 1, summary columns empty) followed by
//! a summary row with `band = mean`. Reals are printed with six decimals,
//! seconds with three, infinities as `inf`; an absent wall time is an empty
//! field. Grid runs that fail emit a single row with `band = failed`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::metrics::QualityReport;

pub const REPORT_HEADER: [&str; 7] = [
    "label", "band", "psnr_db", "ssim", "mpsnr_db", "mssim", "seconds",
];

/// One labelled quality report, optionally timed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub label: String,
    pub report: QualityReport,
    pub seconds: Option<f64>,
}

pub fn fmt_real(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.6}")
    }
}

fn fmt_seconds(s: Option<f64>) -> String {
    s.map(|s| format!("{s:.3}")).unwrap_or_default()
}

/// Streaming writer for the report schema.
pub struct ReportWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        inner.write_record(REPORT_HEADER)?;
        Ok(Self { inner })
    }

    pub fn write_report(
        &mut self,
        label: &str,
        report: &QualityReport,
        seconds: Option<f64>,
    ) -> Result<()> {
        for (b, (p, s)) in report
            .psnr_per_band
            .iter()
            .zip(&report.ssim_per_band)
            .enumerate()
        {
            self.inner.write_record([
                label,
                &(b + 1).to_string(),
                &fmt_real(*p),
                &fmt_real(*s),
                "",
                "",
                "",
            ])?;
        }
        self.write_summary(label, report.mpsnr, report.mssim, seconds)
    }

    pub fn write_summary(
        &mut self,
        label: &str,
        mpsnr: f64,
        mssim: f64,
        seconds: Option<f64>,
    ) -> Result<()> {
        self.inner.write_record([
            label,
            "mean",
            "",
            "",
            &fmt_real(mpsnr),
            &fmt_real(mssim),
            &fmt_seconds(seconds),
        ])?;
        Ok(())
    }

    pub fn write_failed(&mut self, label: &str, seconds: Option<f64>) -> Result<()> {
        self.inner
            .write_record([label, "failed", "", "", "", "", &fmt_seconds(seconds)])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| crate::error::Error::Io(e.into_error()))
    }
}

pub fn write_report_csv_to<W: Write>(entries: &[ReportEntry], out: W) -> Result<W> {
    let mut w = ReportWriter::new(out)?;
    for e in entries {
        w.write_report(&e.label, &e.report, e.seconds)?;
    }
    w.finish()
}

pub fn write_report_csv(entries: &[ReportEntry], path: impl AsRef<Path>) -> Result<()> {
    write_report_csv_to(entries, File::create(path)?)?;
    Ok(())
}
