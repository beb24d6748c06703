//! Plot-ready CSV and JSON writers. Floats use the shortest representation
//! that round-trips, so files carry full precision.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::record::SweepRecord;
use super::report::ReportBundle;
use crate::convertibility::Observable;
use crate::{Error, Result, ScalingFit};

/// One row of `fit.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub observable: Option<Observable>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms_residual: f64,
    pub n_points: usize,
}

impl From<&ScalingFit> for FitSummary {
    fn from(f: &ScalingFit) -> Self {
        FitSummary {
            observable: f.observable,
            a: f.a,
            b: f.b,
            c: f.c,
            rms_residual: f.rms_residual,
            n_points: f.points.len(),
        }
    }
}

/// `n_sites,h,energy,lam1,lam2,lam3,lam4`
pub fn write_spectra_csv(mut out: impl Write, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(out, "n_sites,h,energy,lam1,lam2,lam3,lam4")?;
    for r in records {
        write!(out, "{},{},{}", r.n_sites, r.h, r.energy)?;
        for l in &r.lambdas {
            write!(out, ",{l}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `n_sites,h,block_size,alpha,entropy`, with `0`, `1` and `inf` rows.
pub fn write_renyi_csv(mut out: impl Write, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(out, "n_sites,h,block_size,alpha,entropy")?;
    for r in records {
        for (alpha, s) in r.renyi.points() {
            writeln!(out, "{},{},{},{alpha},{s}", r.n_sites, r.h, r.block_size())?;
        }
    }
    Ok(())
}

/// `n_sites,h_lo,h_hi,locc_verdict,elocc_verdict`
pub fn write_verdicts_csv(mut out: impl Write, report: &ReportBundle) -> io::Result<()> {
    writeln!(out, "n_sites,h_lo,h_hi,locc_verdict,elocc_verdict")?;
    for size in &report.sizes {
        for s in &size.steps {
            writeln!(out, "{},{},{},{},{}", size.n_sites, s.h_lo, s.h_hi, s.locc.direction, s.elocc.direction)?;
        }
    }
    Ok(())
}

/// `n_sites,observable,h_min,f_min`; sizes without a minimum are omitted.
pub fn write_minima_csv(mut out: impl Write, report: &ReportBundle) -> io::Result<()> {
    writeln!(out, "n_sites,observable,h_min,f_min")?;
    for size in &report.sizes {
        for m in size.minimum_f2.iter().chain(&size.minimum_f3) {
            writeln!(out, "{},{},{},{}", size.n_sites, m.observable, m.h_min, m.f_min)?;
        }
    }
    Ok(())
}

/// `n_sites,h,f1,f2,f3,d1,d2,d3`
pub fn write_profiles_csv(mut out: impl Write, report: &ReportBundle) -> io::Result<()> {
    writeln!(out, "n_sites,h,f1,f2,f3,d1,d2,d3")?;
    for size in &report.sizes {
        let p = &size.profile;
        for i in 0..p.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                p.n_sites, p.h_grid[i], p.f1[i], p.f2[i], p.f3[i], p.d1[i], p.d2[i], p.d3[i]
            )?;
        }
    }
    Ok(())
}

/// JSON array of [`FitSummary`] objects.
pub fn write_fit_json(mut out: impl Write, report: &ReportBundle) -> io::Result<()> {
    let fits: Vec<FitSummary> = report.fits().map(FitSummary::from).collect();
    serde_json::to_writer_pretty(&mut out, &fits)?;
    writeln!(out)
}

pub fn write_report_json(mut out: impl Write, report: &ReportBundle) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)
}

fn to_file(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes the full file set into `dir`.
pub fn write_all(dir: &Path, records: &[SweepRecord], report: &ReportBundle) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    to_file(&dir.join("spectra.csv"), |w| write_spectra_csv(w, records))?;
    to_file(&dir.join("renyi.csv"), |w| write_renyi_csv(w, records))?;
    to_file(&dir.join("verdicts.csv"), |w| write_verdicts_csv(w, report))?;
    to_file(&dir.join("minima.csv"), |w| write_minima_csv(w, report))?;
    to_file(&dir.join("profiles.csv"), |w| write_profiles_csv(w, report))?;
    to_file(&dir.join("fit.json"), |w| write_fit_json(w, report))?;
    to_file(&dir.join("report.json"), |w| write_report_json(w, report))
}
