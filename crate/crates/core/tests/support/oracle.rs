//! Naive recomputation of every reported metric from raw per-question
//! human-match counts. Loops follow the engine's summation order so the
//! comparison can be exact.

#![allow(clippy::needless_range_loop)]

use visrobust::metrics::{MetricReport, SubMetric};

/// Match counts: `clean[v][q]` and `corrupted[v][c][level - 1][q]`.
#[derive(Clone, Debug)]
pub struct RawRun {
    pub models: Vec<String>,
    pub corruptions: Vec<String>,
    pub clean: Vec<Vec<usize>>,
    pub corrupted: Vec<Vec<Vec<Vec<usize>>>>,
}

fn question_accuracy(matches: usize) -> f64 {
    let a = matches as f64 / 3.0;
    if a > 1.0 {
        1.0
    } else {
        a
    }
}

fn mean_accuracy(counts: &[usize]) -> f64 {
    let mut sum = 0.0;
    for &m in counts {
        sum += question_accuracy(m);
    }
    sum / counts.len() as f64
}

struct Cells {
    acc: Vec<Vec<[f64; 6]>>,
    avg: Vec<Vec<f64>>,
    raw: Vec<Vec<[Option<f64>; 5]>>,
}

fn cells(run: &RawRun) -> Cells {
    let (nv, nc) = (run.models.len(), run.corruptions.len());
    let mut acc = vec![vec![[0.0; 6]; nc]; nv];
    let mut avg = vec![vec![0.0; nc]; nv];
    let mut raw = vec![vec![[None; 5]; nc]; nv];
    for v in 0..nv {
        let clean = mean_accuracy(&run.clean[v]);
        for c in 0..nc {
            let mut a = [clean; 6];
            for l in 1..6 {
                a[l] = mean_accuracy(&run.corrupted[v][c][l - 1]);
            }
            let mut e = [0.0; 6];
            for l in 0..6 {
                e[l] = 1.0 - a[l];
            }
            let mut asum = 0.0;
            for l in 0..6 {
                asum += a[l];
            }
            avg[v][c] = asum / 6.0;

            let f = if e[0] == 0.0 {
                if e[1] == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            } else {
                Some((e[1] - e[0]) / e[0])
            };
            let (mut lo, mut hi) = (e[0], e[0]);
            for l in 1..6 {
                if e[l] < lo {
                    lo = e[l];
                }
                if e[l] > hi {
                    hi = e[l];
                }
            }
            let r = if lo == 0.0 {
                if hi == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            } else {
                Some((hi - lo) / lo)
            };
            let mut esum = 0.0;
            for l in 0..6 {
                esum += e[l];
            }
            let emean = esum / 6.0;
            let (mut num, mut den) = (0.0, 0.0);
            for l in 0..6 {
                let dx = l as f64 - 2.5;
                num += dx * (e[l] - emean);
                den += dx * dx;
            }
            let rho = num / den;
            let mu = 1.0 - asum / 6.0;
            let mut dsum = 0.0;
            for l in 1..6 {
                dsum += e[l] - e[0];
            }
            let delta = dsum / 5.0;
            acc[v][c] = a;
            raw[v][c] = [f, r, Some(rho), Some(mu), Some(delta)];
        }
    }
    Cells { acc, avg, raw }
}

fn scale(raw: &[Vec<[Option<f64>; 5]>]) -> Vec<Vec<[Option<f64>; 5]>> {
    let mut out = raw.to_vec();
    for k in 0..5 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for row in raw {
            for cell in row {
                if let Some(x) = cell[k] {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
        }
        for (v, row) in raw.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                out[v][c][k] = cell[k].map(|x| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 });
            }
        }
    }
    out
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in values.flatten() {
        sum += x;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

fn weighted(aggs: [Option<f64>; 5], w: [f64; 5]) -> Option<f64> {
    let mut total = 0.0;
    for k in 0..5 {
        if w[k] != 0.0 {
            total += w[k] * aggs[k]?;
        }
    }
    Some(total)
}

fn eq_opt(what: &str, got: Option<f64>, want: Option<f64>) -> Result<(), String> {
    match (got, want) {
        (Some(g), Some(w)) if g.to_bits() == w.to_bits() => Ok(()),
        (None, None) => Ok(()),
        _ => Err(format!("{what}: report {got:?}, oracle {want:?}")),
    }
}

fn eq(what: &str, got: f64, want: f64) -> Result<(), String> {
    eq_opt(what, Some(got), Some(want))
}

/// Compares every value of `report` with the oracle at full precision;
/// returns the number of values checked.
pub fn check(run: &RawRun, report: &MetricReport) -> Result<usize, String> {
    let (nv, nc) = (run.models.len(), run.corruptions.len());
    let w = report.weights.as_array();
    let cells = cells(run);
    let scaled = scale(&cells.raw);
    let mut checked = 0usize;

    for v in 0..nv {
        for c in 0..nc {
            let name = format!("{}/{}", run.models[v], run.corruptions[c]);
            let cell = report
                .cells
                .iter()
                .find(|x| x.model == run.models[v] && x.corruption == run.corruptions[c])
                .ok_or_else(|| format!("{name}: missing cell"))?;
            for l in 0..6 {
                eq(&format!("{name} error[{l}]"), cell.errors[l], 1.0 - cells.acc[v][c][l])?;
            }
            eq(&format!("{name} A_vc"), cell.average_accuracy, cells.avg[v][c])?;
            let base = cells.acc[v][0][0];
            eq(
                &format!("{name} rel"),
                cell.relative_drop,
                (base - cells.avg[v][c]) / base,
            )?;
            for (k, m) in SubMetric::ALL.iter().enumerate() {
                eq_opt(&format!("{name} raw {m}"), *cell.raw.get(*m), cells.raw[v][c][k])?;
                eq_opt(&format!("{name} scaled {m}"), *cell.scaled.get(*m), scaled[v][c][k])?;
            }
            checked += 6 + 2 + 10;
        }
    }

    for v in 0..nv {
        let r = report.model(&run.models[v]).ok_or("missing model")?;
        let name = &run.models[v];
        let base = cells.acc[v][0][0];
        let mut s = 0.0;
        for c in 0..nc {
            s += cells.avg[v][c];
        }
        let a_v = s / nc as f64;
        eq(&format!("{name} clean"), r.clean_accuracy, base)?;
        eq(&format!("{name} A_v"), r.average_accuracy, a_v)?;
        eq(&format!("{name} rel"), r.relative_drop, (base - a_v) / base)?;
        let mut aggs = [None; 5];
        for (k, m) in SubMetric::ALL.iter().enumerate() {
            eq_opt(
                &format!("{name} raw {m}"),
                *r.raw.get(*m),
                mean_defined((0..nc).map(|c| cells.raw[v][c][k])),
            )?;
            aggs[k] = mean_defined((0..nc).map(|c| scaled[v][c][k]));
            eq_opt(&format!("{name} scaled {m}"), *r.scaled.get(*m), aggs[k])?;
        }
        eq_opt(&format!("{name} VRE"), r.vre, weighted(aggs, w))?;
        checked += 3 + 10 + 1;
    }

    let mut base_sum = 0.0;
    for v in 0..nv {
        base_sum += cells.acc[v][0][0];
    }
    for c in 0..nc {
        let r = report.corruption(&run.corruptions[c]).ok_or("missing corruption")?;
        let name = &run.corruptions[c];
        let (mut s, mut drop) = (0.0, 0.0);
        for v in 0..nv {
            s += cells.avg[v][c];
            drop += cells.acc[v][0][0] - cells.avg[v][c];
        }
        eq(&format!("{name} A_c"), r.average_accuracy, s / nv as f64)?;
        eq(&format!("{name} rel"), r.relative_drop, drop / base_sum)?;
        let mut aggs = [None; 5];
        for (k, m) in SubMetric::ALL.iter().enumerate() {
            eq_opt(
                &format!("{name} raw {m}"),
                *r.raw.get(*m),
                mean_defined((0..nv).map(|v| cells.raw[v][c][k])),
            )?;
            aggs[k] = mean_defined((0..nv).map(|v| scaled[v][c][k]));
            eq_opt(&format!("{name} scaled {m}"), *r.scaled.get(*m), aggs[k])?;
        }
        eq_opt(&format!("{name} VRE"), r.vre, weighted(aggs, w))?;
        checked += 2 + 10 + 1;
    }
    Ok(checked)
}
