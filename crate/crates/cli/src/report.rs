//! One-shot analysis bundle: six CSVs plus `manifest.json`.

use std::path::Path;

use serde::Serialize;

use scalefit_core::io::{format_f64, write_curve, write_rows};
use scalefit_core::scaling::{default_fit_window, hurst_spectrum, locality_curve, KneePoint};
use scalefit_core::synth::ModelSpec;
use scalefit_core::wavelet::wavelet_hurst;

use crate::args::{ReportArgs, WaveletFlags};
use crate::clock::Clock;
use crate::commands::{describe_knee, detect, load, table_for, wavelet_locality};
use crate::failure::{CliResult, Failure};

pub const MANIFEST_FORMAT: &str = "scalefit-report/1";

pub const FILES: [&str; 6] = [
    "cumulant_table.csv",
    "hurst_spectrum.csv",
    "locality_cumulant.csv",
    "locality_wavelet.csv",
    "logscale.csv",
    "knees.csv",
];

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    created: String,
    input: String,
    trace_length: usize,
    model: Option<&'a ModelSpec>,
    parameters: Parameters,
    estimates: Estimates,
    files: [&'static str; 6],
}

#[derive(Serialize)]
struct Parameters {
    max_order: u32,
    window: u32,
    knee_threshold: f64,
    wavelet_family: &'static str,
    wavelet_levels: u32,
    cumulant_octaves: [u32; 2],
    wavelet_octaves: [u32; 2],
}

#[derive(Serialize)]
struct Estimates {
    cumulant_hurst: Vec<(u32, f64)>,
    wavelet_hurst: f64,
    cumulant_knee: KneeSummary,
    wavelet_knee: KneeSummary,
}

#[derive(Serialize)]
struct KneeSummary {
    octave: f64,
    left_slope: f64,
    right_slope: f64,
    sse_reduction: f64,
    significant: bool,
}

impl KneeSummary {
    fn new(k: &KneePoint, threshold: f64) -> Self {
        Self {
            octave: k.octave,
            left_slope: k.left_slope,
            right_slope: k.right_slope,
            sse_reduction: k.sse_reduction,
            significant: k.is_significant(threshold),
        }
    }

    fn row(&self, method: &str) -> Vec<String> {
        vec![
            method.to_string(),
            format_f64(self.octave),
            format_f64(self.left_slope),
            format_f64(self.right_slope),
            format_f64(self.sse_reduction),
            self.significant.to_string(),
        ]
    }
}

pub fn run(a: &ReportArgs, clock: &Clock, verbose: bool) -> CliResult<()> {
    let trace = load(&a.input, verbose)?;
    let created = clock.timestamp()?;

    let table = table_for(&trace, a.max_order, None)?;
    let window = default_fit_window(&table);
    let spectrum =
        hurst_spectrum(&table, window).map_err(Failure::during("cumulant estimation"))?;
    let cumulant_curve = locality_curve(&table, 2, a.window)
        .map_err(Failure::during("cumulant locality curve"))?;
    let flags = WaveletFlags {
        family: Some(a.family),
        levels: None,
    };
    let (diag, wavelet_curve) = wavelet_locality(&trace, flags, a.window)?;
    let (j1, j2) = diag.default_fit_range();
    let wavelet_est =
        wavelet_hurst(&diag, j1, j2).map_err(Failure::during("wavelet estimation"))?;
    let cumulant_knee = detect(&cumulant_curve, "cumulant knee detection")?;
    let wavelet_knee = detect(&wavelet_curve, "wavelet knee detection")?;

    let dir = &a.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| {
        Failure::Compute(format!("creating {}: {e}", dir.display()))
    })?;
    let path = |name: &str| dir.join(name);
    write_curve(&table, &path(FILES[0])).map_err(Failure::output)?;
    write_curve(&spectrum, &path(FILES[1])).map_err(Failure::output)?;
    write_curve(&cumulant_curve, &path(FILES[2])).map_err(Failure::output)?;
    write_curve(&wavelet_curve, &path(FILES[3])).map_err(Failure::output)?;
    write_curve(&diag, &path(FILES[4])).map_err(Failure::output)?;
    let knees = [
        KneeSummary::new(&cumulant_knee, a.knee_threshold),
        KneeSummary::new(&wavelet_knee, a.knee_threshold),
    ];
    write_rows(
        &path(FILES[5]),
        &["method", "octave", "left_slope", "right_slope", "sse_reduction", "significant"],
        &[knees[0].row("cumulant"), knees[1].row("wavelet")],
    )
    .map_err(Failure::output)?;

    let [cumulant_knee_summary, wavelet_knee_summary] = knees;
    let manifest = Manifest {
        format: MANIFEST_FORMAT,
        created,
        input: a.input.display().to_string(),
        trace_length: trace.len(),
        model: trace.meta.model.as_ref(),
        parameters: Parameters {
            max_order: a.max_order,
            window: a.window,
            knee_threshold: a.knee_threshold,
            wavelet_family: a.family.name(),
            wavelet_levels: diag.octaves.len() as u32,
            cumulant_octaves: [window.lo, window.hi],
            wavelet_octaves: [j1, j2],
        },
        estimates: Estimates {
            cumulant_hurst: spectrum.values().map(|(m, h, _)| (m, h)).collect(),
            wavelet_hurst: wavelet_est.hurst,
            cumulant_knee: cumulant_knee_summary,
            wavelet_knee: wavelet_knee_summary,
        },
        files: FILES,
    };
    write_manifest(&manifest, &path("manifest.json"))?;

    for (m, h, r2) in spectrum.values() {
        println!("cumulant H({m}) = {h:.6} (r_squared {r2:.6}, octaves {window})");
    }
    for (m, why) in &spectrum.omitted {
        println!("omitted order {m}: {why}");
    }
    println!(
        "wavelet H = {:.6} (octaves [{j1}, {j2}])",
        wavelet_est.hurst
    );
    println!("cumulant {}", describe_knee(&cumulant_knee, a.knee_threshold));
    println!("wavelet {}", describe_knee(&wavelet_knee, a.knee_threshold));
    println!("wrote {} files and manifest.json to {}", FILES.len(), dir.display());
    Ok(())
}

fn write_manifest(m: &Manifest<'_>, path: &Path) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(m)
        .map_err(|e| Failure::Compute(format!("encoding manifest: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Failure::Compute(format!("writing output: {}: {e}", path.display())))
}
