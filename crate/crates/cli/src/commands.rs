//! Subcommand implementations other than `report`.

use std::path::Path;

use scalefit_core::aggregate::{aggregate as block_sums, build_dyadic_pyramid, build_pyramid};
use scalefit_core::cumulant::{cumulant_scaling_table, CumulantTable};
use scalefit_core::io::{read_trace, sidecar_path, write_curve, write_rows, format_f64};
use scalefit_core::numeric::compensated_sum;
use scalefit_core::scaling::{
    default_fit_window, fit_loglog, hurst_spectrum, locality_curve, table_octaves,
    variance_time_hurst, HurstCurve, KneePoint, LocalityCurve, OctaveRange,
};
use scalefit_core::synth::{
    generate_cascade, generate_fgn, generate_multifractal, CascadeSpec, FgnSpec, ModelSpec,
    Multipliers, Trace, TraceMeta,
};
use scalefit_core::wavelet::{
    logscale_diagram, wavelet_hurst, wavelet_locality_curve, LogscaleDiagram, WaveletSpec,
};
use scalefit_core::Error;

use crate::args::{
    AggregateArgs, CumulantArgs, GenerateArgs, HurstArgs, HurstMethod, LocalityArgs,
    LocalityMethod, Model, OctaveArgs, WaveletArgs, WaveletFlags,
};
use crate::clock::Clock;
use crate::failure::{CliResult, Failure};

/// Reads a trace; every failure here is an input problem (exit 2).
pub fn load(path: &Path, verbose: bool) -> CliResult<Trace> {
    if !path.exists() {
        return Err(Failure::usage(format!(
            "input file {} does not exist",
            path.display()
        )));
    }
    let loaded = read_trace(path)
        .map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))?;
    if loaded.sidecar_missing {
        eprintln!(
            "warning: {} not found; continuing without metadata",
            sidecar_path(path).display()
        );
    }
    if verbose {
        eprintln!("read {} samples from {}", loaded.trace.len(), path.display());
    }
    Ok(loaded.trace)
}

fn mean_and_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = compensated_sum(x) / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = x.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, compensated_sum(&dev) / (n - 1.0))
}

pub fn generate(a: &GenerateArgs, clock: &Clock) -> CliResult<()> {
    let created = clock.timestamp()?;
    let depth = a.length.ilog2();
    let cascade = CascadeSpec {
        depth,
        multipliers: if a.equal_split {
            Multipliers::EqualSplit
        } else {
            Multipliers::Beta { shape: a.shape }
        },
        total_mass: a.mass,
        seed: a.cascade_seed.unwrap_or(a.seed.wrapping_add(1)),
    };
    let fgn = FgnSpec::new(a.hurst, a.length, a.variance, a.seed)
        .map_err(Failure::during("generate"))?;
    let mut trace = match a.model {
        Model::Fgn => generate_fgn(&fgn),
        Model::Cascade => generate_cascade(&CascadeSpec { seed: a.seed, ..cascade }),
        Model::Multifractal => generate_multifractal(&fgn, &cascade),
    }
    .map_err(Failure::during("generate"))?;
    trace.meta.created = Some(created);
    scalefit_core::io::write_trace(&trace, &a.out).map_err(Failure::output)?;

    let (mean, variance) = mean_and_variance(trace.samples());
    println!("model: {}", trace.meta.model.as_ref().map_or("unknown", ModelSpec::name));
    println!("length: {}", trace.len());
    println!("mean: {mean:.6}");
    println!("variance: {variance:.6}");
    println!("seed: {}", a.seed);
    if a.model == Model::Multifractal {
        println!("cascade seed: {}", cascade.seed);
    }
    println!(
        "wrote {} and {}",
        a.out.display(),
        sidecar_path(&a.out).display()
    );
    Ok(())
}

pub fn aggregate(a: &AggregateArgs, clock: &Clock, verbose: bool) -> CliResult<()> {
    let trace = load(&a.input, verbose)?;
    if a.scale > trace.len() {
        return Err(Failure::usage(format!(
            "--scale {} exceeds the trace length {}",
            a.scale,
            trace.len()
        )));
    }
    let created = clock.timestamp()?;
    let sums = block_sums(trace.samples(), a.scale).map_err(Failure::during("aggregate"))?;
    let blocks = sums.len();
    let meta = TraceMeta {
        model: Some(ModelSpec::Aggregate {
            scale: a.scale,
            source: trace.meta.model.clone().map(Box::new),
        }),
        created: Some(created),
    };
    let out = Trace::new(sums, meta).map_err(Failure::during("aggregate"))?;
    scalefit_core::io::write_trace(&out, &a.out).map_err(Failure::output)?;
    println!(
        "aggregated {} samples into {blocks} blocks of {}; wrote {}",
        trace.len(),
        a.scale,
        a.out.display()
    );
    Ok(())
}

/// Cumulant table over the dyadic scales or an explicit scale list.
pub fn table_for(trace: &Trace, max_order: u32, scales: Option<&[usize]>) -> CliResult<CumulantTable> {
    let pyramid = match scales {
        Some(s) => build_pyramid(trace.samples(), s),
        None => build_dyadic_pyramid(trace.samples()),
    }
    .map_err(Failure::during("aggregation"))?;
    cumulant_scaling_table(&pyramid, max_order).map_err(Failure::during("cumulant table"))
}

pub fn cumulants(a: &CumulantArgs, verbose: bool) -> CliResult<()> {
    let trace = load(&a.input, verbose)?;
    let table = table_for(&trace, a.max_order, a.scales.as_deref())?;
    println!("{:>5} {:>9} {:>9} {:>15}  status", "order", "scale", "blocks", "cumulant");
    for &m in table.orders() {
        for ((n, v, status), b) in table.row(m).into_iter().flatten().zip(table.block_counts()) {
            println!("{m:>5} {n:>9} {b:>9} {v:>15.6e}  {status:?}");
        }
    }
    if let Some(out) = &a.out {
        write_curve(&table, out).map_err(Failure::output)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

/// Explicit or default octave window, checked against the table.
pub fn fit_window(table: &CumulantTable, flags: OctaveArgs) -> CliResult<OctaveRange> {
    let default = default_fit_window(table);
    let span = table_octaves(table);
    let lo = flags.lo.unwrap_or(default.lo);
    let hi = flags.hi.unwrap_or(default.hi);
    if lo > hi {
        return Err(Failure::usage(format!("--lo {lo} exceeds --hi {hi}")));
    }
    if hi > span.hi {
        return Err(Failure::usage(format!(
            "--hi {hi} is beyond the coarsest available octave {}",
            span.hi
        )));
    }
    OctaveRange::new(lo, hi).map_err(Failure::during("octave window"))
}

pub fn wavelet_spec(flags: WaveletFlags, len: usize) -> CliResult<WaveletSpec> {
    if !len.is_power_of_two() {
        return Err(Failure::usage(format!(
            "wavelet analysis needs a power-of-two trace length, got {len}"
        )));
    }
    let max = WaveletSpec::max_levels(len);
    if max < 1 {
        return Err(Failure::usage(format!(
            "a length-{len} trace is too short for wavelet analysis"
        )));
    }
    let levels = flags.levels.unwrap_or(max);
    if levels > max {
        return Err(Failure::usage(format!(
            "--levels {levels} exceeds the maximum {max} for a length-{len} trace"
        )));
    }
    Ok(WaveletSpec {
        family: flags.family.unwrap_or_default(),
        levels,
    })
}

pub fn wavelet_range(diag: &LogscaleDiagram, j1: Option<u32>, j2: Option<u32>) -> CliResult<(u32, u32)> {
    let (d1, d2) = diag.default_fit_range();
    let (j1, j2) = (j1.unwrap_or(d1), j2.unwrap_or(d2));
    let last = diag.octaves.len() as u32;
    if j1 < 1 || j2 > last || j1 >= j2 {
        return Err(Failure::usage(format!(
            "--j1 {j1} / --j2 {j2} must satisfy 1 <= j1 < j2 <= {last}"
        )));
    }
    Ok((j1, j2))
}

fn has_wavelet_flags(w: &WaveletFlags) -> bool {
    w.family.is_some() || w.levels.is_some()
}

pub fn hurst(a: &HurstArgs, verbose: bool) -> CliResult<()> {
    let wavelet_flags = has_wavelet_flags(&a.wavelet) || a.j1.is_some() || a.j2.is_some();
    if a.method != HurstMethod::Wavelet && wavelet_flags {
        return Err(Failure::usage(
            "--family, --levels, --j1 and --j2 apply only to --method wavelet",
        ));
    }
    if a.method != HurstMethod::Cumulant && (a.order.is_some() || a.max_order.is_some()) {
        return Err(Failure::usage(
            "--order and --max-order apply only to --method cumulant",
        ));
    }
    if a.method == HurstMethod::Wavelet && (a.octaves.lo.is_some() || a.octaves.hi.is_some()) {
        return Err(Failure::usage(
            "--lo and --hi select block-size octaves; use --j1 and --j2 with --method wavelet",
        ));
    }
    if a.order.is_some() && a.max_order.is_some() {
        return Err(Failure::usage("--order and --max-order are mutually exclusive"));
    }

    let trace = load(&a.input, verbose)?;
    match a.method {
        HurstMethod::Cumulant => {
            let max_order = a.order.map_or(a.max_order.unwrap_or(4), |m| m.max(2));
            let table = table_for(&trace, max_order, None)?;
            let window = fit_window(&table, a.octaves)?;
            let curve = match a.order {
                Some(m) => {
                    let fit = fit_loglog(&table, m, window)
                        .map_err(Failure::during("cumulant estimation"))?;
                    HurstCurve {
                        entries: [(m, fit)].into_iter().collect(),
                        window,
                        omitted: Vec::new(),
                    }
                }
                None => hurst_spectrum(&table, window)
                    .map_err(Failure::during("cumulant estimation"))?,
            };
            println!("method: cumulant");
            println!("octaves: {window}");
            println!("{:>5} {:>10} {:>10} {:>6}", "order", "hurst", "r_squared", "scales");
            for (m, fit) in &curve.entries {
                println!(
                    "{m:>5} {:>10.6} {:>10.6} {:>6}",
                    fit.hurst(),
                    fit.r_squared,
                    fit.points_used
                );
                if fit.hurst_out_of_range() {
                    eprintln!("warning: H({m}) = {:.6} lies outside (0, 1)", fit.hurst());
                }
            }
            for (m, why) in &curve.omitted {
                println!("omitted order {m}: {why}");
            }
            if let Some(out) = &a.out {
                write_curve(&curve, out).map_err(Failure::output)?;
                println!("wrote {}", out.display());
            }
        }
        HurstMethod::Variance => {
            let table = table_for(&trace, 2, None)?;
            let window = fit_window(&table, a.octaves)?;
            let pyramid = build_dyadic_pyramid(trace.samples()).map_err(Failure::during("aggregation"))?;
            let fit = variance_time_hurst(&pyramid, window)
                .map_err(Failure::during("variance-time estimation"))?;
            println!("method: variance");
            println!("octaves: {window}");
            println!("hurst: {:.6}", fit.hurst);
            println!("r_squared: {:.6}", fit.r_squared);
            write_single(a.out.as_deref(), "variance", fit.hurst, fit.r_squared, window.lo, window.hi)?;
        }
        HurstMethod::Wavelet => {
            let spec = wavelet_spec(a.wavelet, trace.len())?;
            let diag = logscale_diagram(trace.samples(), &spec)
                .map_err(Failure::during("wavelet transform"))?;
            let (j1, j2) = wavelet_range(&diag, a.j1, a.j2)?;
            let est = wavelet_hurst(&diag, j1, j2).map_err(Failure::during("wavelet estimation"))?;
            println!("method: wavelet ({})", spec.family.name());
            println!("octaves: [{j1}, {j2}]");
            println!("hurst: {:.6}", est.hurst);
            println!("alpha: {:.6}", est.alpha);
            println!("r_squared: {:.6}", est.r_squared);
            write_single(a.out.as_deref(), "wavelet", est.hurst, est.r_squared, j1, j2)?;
        }
    }
    Ok(())
}

fn write_single(out: Option<&Path>, method: &str, h: f64, r2: f64, lo: u32, hi: u32) -> CliResult<()> {
    if let Some(out) = out {
        write_rows(
            out,
            &["method", "hurst", "r_squared", "octave_lo", "octave_hi"],
            &[vec![
                method.to_string(),
                format_f64(h),
                format_f64(r2),
                lo.to_string(),
                hi.to_string(),
            ]],
        )
        .map_err(Failure::output)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

pub fn cumulant_locality(trace: &Trace, order: u32, width: u32) -> CliResult<LocalityCurve> {
    let table = table_for(trace, order.max(2), None)?;
    locality_curve(&table, order, width).map_err(Failure::during("cumulant locality curve"))
}

pub fn wavelet_locality(trace: &Trace, flags: WaveletFlags, width: u32) -> CliResult<(LogscaleDiagram, LocalityCurve)> {
    let spec = wavelet_spec(flags, trace.len())?;
    let diag = logscale_diagram(trace.samples(), &spec).map_err(Failure::during("wavelet transform"))?;
    let curve = wavelet_locality_curve(&diag, width).map_err(Failure::during("wavelet locality curve"))?;
    Ok((diag, curve))
}

pub fn detect(curve: &LocalityCurve, what: &str) -> CliResult<KneePoint> {
    curve.knee().map_err(|e: Error| Failure::during(what)(e))
}

pub fn describe_knee(k: &KneePoint, threshold: f64) -> String {
    if k.is_significant(threshold) {
        format!(
            "knee at octave {:.4}: left slope {:.6}, right slope {:.6}, sse reduction {:.2}%",
            k.octave,
            k.left_slope,
            k.right_slope,
            100.0 * k.sse_reduction
        )
    } else {
        format!(
            "no significant knee: sse reduction {:.2}% is below the {:.2}% threshold (best split at octave {:.4})",
            100.0 * k.sse_reduction,
            100.0 * threshold,
            k.octave
        )
    }
}

pub fn locality(a: &LocalityArgs, verbose: bool) -> CliResult<()> {
    if a.method == LocalityMethod::Cumulant && has_wavelet_flags(&a.wavelet) {
        return Err(Failure::usage("--family and --levels apply only to --method wavelet"));
    }
    if a.method == LocalityMethod::Wavelet && a.order.is_some() {
        return Err(Failure::usage("--order applies only to --method cumulant"));
    }
    let trace = load(&a.input, verbose)?;
    let curve = match a.method {
        LocalityMethod::Cumulant => cumulant_locality(&trace, a.order.unwrap_or(2), a.window)?,
        LocalityMethod::Wavelet => wavelet_locality(&trace, a.wavelet, a.window)?.1,
    };
    write_curve(&curve, &a.out).map_err(Failure::output)?;
    println!("{:>8} {:>10}", "octave", "hurst");
    for (j, h) in &curve.points {
        println!("{j:>8.2} {h:>10.6}");
    }
    println!("spread: {:.6}", curve.spread());
    println!("wrote {}", a.out.display());
    let knee = detect(&curve, "knee detection")?;
    println!("{}", describe_knee(&knee, a.knee_threshold));
    Ok(())
}

pub fn wavelet(a: &WaveletArgs, verbose: bool) -> CliResult<()> {
    let trace = load(&a.input, verbose)?;
    let spec = wavelet_spec(a.wavelet, trace.len())?;
    let diag = logscale_diagram(trace.samples(), &spec).map_err(Failure::during("wavelet transform"))?;
    let (j1, j2) = wavelet_range(&diag, a.j1, a.j2)?;
    println!("family: {}", spec.family.name());
    println!("{:>6} {:>12} {:>8}", "octave", "log2_energy", "count");
    for ((j, e), n) in diag.octaves.iter().zip(&diag.energy).zip(&diag.counts) {
        println!("{j:>6} {:>12.6} {n:>8}", e.log2());
    }
    if let Some(out) = &a.out {
        write_curve(&diag, out).map_err(Failure::output)?;
        println!("wrote {}", out.display());
    }
    let est = wavelet_hurst(&diag, j1, j2).map_err(Failure::during("wavelet estimation"))?;
    println!(
        "hurst {:.6} (alpha {:.6}, r_squared {:.6}) over octaves [{j1}, {j2}]",
        est.hurst, est.alpha, est.r_squared
    );
    Ok(())
}
