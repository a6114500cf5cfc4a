//! CSV emission and terminal summaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mlpr_core::solvers::IterationTrace;

use crate::run::BenchRow;
use crate::Method;

/// Trace columns: `step,cum_map_evals,residual,wall_seconds,is_extrapolated`.
pub fn write_trace_csv(path: &Path, trace: &IterationTrace) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "step,cum_map_evals,residual,wall_seconds,is_extrapolated"
    )?;
    for s in &trace.steps {
        writeln!(
            out,
            "{},{},{:e},{:.6},{}",
            s.step,
            s.cum_map_evals,
            s.residual,
            s.wall_seconds,
            u8::from(s.is_extrapolated)
        )?;
    }
    Ok(())
}

/// Final iterate, one entry per line, full precision.
pub fn write_final_vector(path: &Path, vector: &[f64]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for x in vector {
        writeln!(out, "{x:e}")?;
    }
    Ok(())
}

pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "run,seed,method,iterations,map_evals,wall_seconds,final_residual,solved"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:e},{}",
            r.run,
            r.seed,
            r.method.name(),
            r.iterations,
            r.map_evals,
            r.wall_seconds,
            r.final_residual,
            u8::from(r.solved)
        )?;
    }
    Ok(())
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len().is_multiple_of(2) {
        0.5 * (values[mid - 1] + values[mid])
    } else {
        values[mid]
    }
}

pub fn print_bench_summary(methods: &[Method], rows: &[BenchRow], failures: usize) {
    for &method in methods {
        let subset: Vec<&BenchRow> = rows.iter().filter(|r| r.method == method).collect();
        if subset.is_empty() {
            continue;
        }
        let solved = subset.iter().filter(|r| r.solved).count();
        let mut residuals: Vec<f64> = subset.iter().map(|r| r.final_residual).collect();
        let mut evals: Vec<f64> = subset.iter().map(|r| r.map_evals as f64).collect();
        let seconds: f64 = subset.iter().map(|r| r.wall_seconds).sum();
        println!(
            "method={} solved={}/{} median_residual={:.3e} median_evals={} total_seconds={:.3}",
            method.name(),
            solved,
            subset.len(),
            median(&mut residuals),
            median(&mut evals).round() as u64,
            seconds
        );
    }
    if failures > 0 {
        println!("failed_runs={failures}");
    }
}
