//! CSV and JSON writers. Every float is written as `{:.11e}` so files from
//! different runs can be compared byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use jcesd_core::analytic::{
    concurrence_rwa_pair, concurrence_transformed, effective_params, photon_numbers,
    rwa_oscillation,
};
use jcesd_core::{ConcurrenceSeries, DisplacedSpectrum};

use crate::error::CliError;

pub fn fmt_f(x: f64) -> String {
    format!("{x:.11e}")
}

/// `run.csv` → `run.<suffix>`.
pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub const SPECTRUM_HEADER: &str = "index,parity,energy,n_tr";

pub fn spectrum_csv(spec: &DisplacedSpectrum) -> String {
    let mut levels: Vec<_> = spec.levels.iter().collect();
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut s = format!("{SPECTRUM_HEADER}\n");
    for (i, l) in levels.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{}",
            l.parity.label(),
            fmt_f(l.energy),
            spec.n_tr
        );
    }
    s
}

pub const DYNAMICS_HEADER: &str = "t,C_exact,C_rwa,C_transformed,n_ph1,n_ph2,norm_err";

pub fn dynamics_csv(series: &ConcurrenceSeries) -> String {
    let mut s = format!("{DYNAMICS_HEADER}\n");
    for row in dynamics_rows(series) {
        s.push_str(&row);
        s.push('\n');
    }
    s
}

/// Rows of [`DYNAMICS_HEADER`] without the trailing newline.
pub fn dynamics_rows(series: &ConcurrenceSeries) -> impl Iterator<Item = String> + '_ {
    let (p1, p2, bell) = (&series.params1, &series.params2, &series.bell);
    series.times.iter().enumerate().map(move |(i, &t)| {
        [
            t,
            series.concurrence[i],
            concurrence_rwa_pair(p1, p2, bell, t),
            concurrence_transformed(p1, p2, bell, t),
            series.photon1[i],
            series.photon2[i],
            series.norm_error[i],
        ]
        .map(fmt_f)
        .join(",")
    })
}

pub const SERIES_HEADER: &str = "t,C,n_ph1,n_ph2,norm_err";

/// Exact series only.
pub fn series_csv(series: &ConcurrenceSeries) -> String {
    let mut s = format!("{SERIES_HEADER}\n");
    for i in 0..series.times.len() {
        let row = [
            series.times[i],
            series.concurrence[i],
            series.photon1[i],
            series.photon2[i],
            series.norm_error[i],
        ];
        let _ = writeln!(s, "{}", row.map(fmt_f).join(","));
    }
    s
}

/// Exact, RWA and transformed curves in long form, tagged by a `source`
/// column. Closed-form rows carry their own photon numbers and a zero norm
/// error.
pub fn sources_csv(series: &ConcurrenceSeries) -> String {
    let (p1, p2, bell) = (&series.params1, &series.params2, &series.bell);
    let (rwa1, rwa2) = (rwa_oscillation(p1), rwa_oscillation(p2));
    let (tr1, tr2) = (
        effective_params(p1).oscillation(),
        effective_params(p2).oscillation(),
    );
    let mut s = String::from("t,source,C,n_ph1,n_ph2,norm_err\n");
    for (i, &t) in series.times.iter().enumerate() {
        let exact = (
            series.concurrence[i],
            (series.photon1[i], series.photon2[i]),
            series.norm_error[i],
        );
        let rwa = (
            concurrence_rwa_pair(p1, p2, bell, t),
            photon_numbers(&rwa1, &rwa2, bell, t),
            0.0,
        );
        let tr = (
            concurrence_transformed(p1, p2, bell, t),
            photon_numbers(&tr1, &tr2, bell, t),
            0.0,
        );
        for (source, (c, (n1, n2), err)) in [("exact", exact), ("rwa", rwa), ("transformed", tr)] {
            let nums = [c, n1, n2, err].map(fmt_f).join(",");
            let _ = writeln!(s, "{},{source},{nums}", fmt_f(t));
        }
    }
    s
}

pub fn intervals_json(intervals: &[(f64, f64)]) -> Result<String, CliError> {
    let pairs: Vec<[f64; 2]> = intervals.iter().map(|&(a, b)| [a, b]).collect();
    Ok(serde_json::to_string_pretty(&pairs)? + "\n")
}
