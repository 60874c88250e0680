//! Scaling measurements: median wall time over repetitions on an instance
//! ladder, and a least-squares fit of `log t` against `log n`.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use crate::compile::CompiledPattern;
use crate::copies::{enumerate_copies_with, Mode};
use crate::error::Result;
use crate::geometry::PointSet;
use crate::hypercubes::enumerate_hypercubes_with;
use crate::report::{CountingReporter, EngineOptions};
use crate::squares::{baseline_squares_with, enumerate_squares_with};
use crate::testkit::{generate, InstanceSpec};

/// Rows faster than this are dominated by timer and scheduling noise and are
/// left out of the fit.
pub const MIN_RELIABLE_SECONDS: f64 = 2e-3;

#[derive(Clone, Debug)]
pub enum BenchEngine {
    /// Squares with the label engine.
    Squares,
    /// Squares with ordered-map lookups in place of labels.
    SquaresBaseline,
    Hypercubes,
    Copies(Box<CompiledPattern>, Mode),
}

impl fmt::Display for BenchEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchEngine::Squares => f.write_str("amplified"),
            BenchEngine::SquaresBaseline => f.write_str("baseline"),
            BenchEngine::Hypercubes => f.write_str("hypercubes"),
            BenchEngine::Copies(..) => f.write_str("copies"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub engine: String,
    pub instance: String,
    pub n: usize,
    /// Median over the repetitions.
    pub seconds: f64,
    pub count: u64,
    /// Below [`MIN_RELIABLE_SECONDS`]; excluded from the fit.
    pub below_resolution: bool,
}

/// Runs `engine` once in count-only mode, sequentially and without exact
/// rechecks.
pub fn count_once(engine: &BenchEngine, points: &PointSet) -> Result<u64> {
    let options = EngineOptions {
        threshold: None,
        threads: 0,
        check_exact: false,
    };
    let mut counter = CountingReporter::default();
    match engine {
        BenchEngine::Squares => enumerate_squares_with(points, &options, &mut counter)?,
        BenchEngine::SquaresBaseline => baseline_squares_with(points, &options, &mut counter)?,
        BenchEngine::Hypercubes => enumerate_hypercubes_with(points, &options, &mut counter)?,
        BenchEngine::Copies(compiled, mode) => enumerate_copies_with(points, compiled, *mode, &options, &mut counter)?,
    };
    Ok(counter.count)
}

/// Median seconds and the (repetition-invariant) count.
pub fn time_engine(engine: &BenchEngine, points: &PointSet, repetitions: usize) -> Result<(f64, u64)> {
    let mut times = Vec::with_capacity(repetitions.max(1));
    let mut count = None;
    for _ in 0..repetitions.max(1) {
        let start = Instant::now();
        let c = count_once(engine, points)?;
        times.push(start.elapsed().as_secs_f64());
        assert!(count.is_none_or(|prev| prev == c), "repetitions disagree on the count");
        count = Some(c);
    }
    times.sort_by(f64::total_cmp);
    Ok((times[times.len() / 2], count.unwrap_or(0)))
}

pub fn run_ladder(engine: &BenchEngine, specs: &[InstanceSpec], repetitions: usize) -> Result<(Vec<BenchRow>, Option<f64>)> {
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let points = generate(spec)?;
        let (seconds, count) = time_engine(engine, &points, repetitions)?;
        rows.push(BenchRow {
            engine: engine.to_string(),
            instance: spec.to_string(),
            n: points.len(),
            seconds,
            count,
            below_resolution: seconds < MIN_RELIABLE_SECONDS,
        });
    }
    let slope = fit_slope(&rows);
    Ok((rows, slope))
}

/// Least-squares slope of `ln seconds` on `ln n` over the reliable rows;
/// `None` with fewer than two distinct sizes.
pub fn fit_slope(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.below_resolution && r.n > 0)
        .map(|r| ((r.n as f64).ln(), r.seconds.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// CSV rows `engine,instance,n,seconds,count` followed by `slope=<float>`
/// (`slope=nan` when no fit was possible). Flagged rows carry a trailing
/// `# below clock resolution` comment line.
pub fn write_csv(mut out: impl Write, rows: &[BenchRow], slope: Option<f64>) -> std::io::Result<()> {
    writeln!(out, "engine,instance,n,seconds,count")?;
    for r in rows {
        writeln!(out, "{},{},{},{:.6},{}", r.engine, r.instance, r.n, r.seconds, r.count)?;
        if r.below_resolution {
            writeln!(out, "# {} below clock resolution, excluded from fit", r.instance)?;
        }
    }
    match slope {
        Some(s) => writeln!(out, "slope={s:.4}"),
        None => writeln!(out, "slope=nan"),
    }
}

/// Square grids of the given sides.
pub fn grid_ladder(sides: &[usize], dim: usize) -> Vec<InstanceSpec> {
    sides.iter().map(|&side| InstanceSpec::Grid { side, dim }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, seconds: f64) -> BenchRow {
        BenchRow {
            engine: "x".into(),
            instance: "i".into(),
            n,
            seconds,
            count: 0,
            below_resolution: seconds < MIN_RELIABLE_SECONDS,
        }
    }

    #[test]
    fn slope_of_a_power_law() {
        let rows: Vec<BenchRow> = [1000usize, 4000, 16000]
            .iter()
            .map(|&n| row(n, 1e-6 * (n as f64).powf(1.5)))
            .collect();
        assert!((fit_slope(&rows).unwrap() - 1.5).abs() < 1e-9);
        let mut with_noise = rows.clone();
        with_noise.insert(0, row(10, 1e-5));
        assert!((fit_slope(&with_noise).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(fit_slope(&rows[..1]), None);
    }

    #[test]
    fn ladder_counts_and_csv() {
        let (rows, _) = run_ladder(&BenchEngine::Squares, &grid_ladder(&[3, 10], 2), 3).unwrap();
        assert_eq!(rows.iter().map(|r| r.count).collect::<Vec<_>>(), vec![5, 285]);
        let (base, _) = run_ladder(&BenchEngine::SquaresBaseline, &grid_ladder(&[3, 10], 2), 1).unwrap();
        assert_eq!(base[1].count, 285);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows, Some(1.25)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("engine,instance,n,seconds,count\namplified,grid-3^2,9,"));
        assert!(text.ends_with("slope=1.2500\n"));
    }
}
