use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::RunConfig;
use super::report::*;
use crate::error::{Error, Result};
use crate::model::{SystemConfig, Topology};
use crate::perturbation::{coupling_warning, gamma_segment, perturbative_doublets, within_weak_coupling};
use crate::rmt::{
    number_variance_reference, reference_distance, Ensemble, GeneratorSettings, GoeTable, ReferenceDistribution,
    GOE_WIGNER_DISTANCE, GOE_WIGNER_TOLERANCE,
};
use crate::rootfinder::{find_spectrum, Coverage, Level, Spectrum};
use crate::statistics::{
    normalize_mean, number_variance, small_s_exponent, unfold_levels, ComparisonReport, EmpiricalCdf, SpacingSeries,
};

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }

    fn stop(self, summary: &mut RunSummary, phase: &str) {
        *summary.timings.entry(phase.to_string()).or_default() += self.0.elapsed().as_secs_f64();
    }
}

fn create_output(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn solve(cfg: &RunConfig, alpha: f64) -> Result<(SystemConfig, Spectrum)> {
    let system = cfg.system(alpha)?;
    let policy = cfg.policy(&system)?;
    let spectrum = find_spectrum(&system, Coverage::Count(cfg.roots), &policy)?;
    Ok((system, spectrum))
}

fn spectrum_summary(system: &SystemConfig, spectrum: &Spectrum) -> SpectrumSummary {
    SpectrumSummary {
        topology: system.topology(),
        alpha: system.alpha(),
        beta: system.beta(),
        n: system.n(),
        roots_found: spectrum.len(),
        distinct_levels: spectrum.levels.len(),
        k_max: spectrum.k_max(),
        max_residual: spectrum.diagnostics.max_residual,
        method: spectrum.diagnostics.method.clone(),
        count_check: spectrum.diagnostics.count_check.clone(),
    }
}

pub fn spectrum(cfg: &RunConfig) -> Result<RunSummary> {
    let alpha = cfg.single_alpha()?;
    let mut summary = RunSummary::new("spectrum", cfg);
    let t = Timer::start();
    let (system, spectrum) = solve(cfg, alpha)?;
    t.stop(&mut summary, "solve");
    create_output(&cfg.output)?;
    let t = Timer::start();
    write_roots(&cfg.output.join("roots.tsv"), system.topology(), alpha, &spectrum.levels)?;
    t.stop(&mut summary, "write");
    summary.spectrum = Some(spectrum_summary(&system, &spectrum));
    Ok(summary)
}

fn class_summary(class: &str, raw: &[f64], bin_width: Option<f64>, dir: &Path, index: &[usize]) -> Result<ClassSummary> {
    let mut out = ClassSummary {
        class: class.to_string(),
        count: raw.len(),
        raw_mean: if raw.is_empty() { 0.0 } else { raw.iter().sum::<f64>() / raw.len() as f64 },
        delta_f_w: None,
        delta_f_goe: None,
        ks_w: None,
        ks_goe: None,
        small_s_exponent: None,
        small_s_plain_slope: None,
        note: None,
    };
    let normalized = match normalize_mean(raw) {
        Ok(v) => v,
        Err(e) => {
            out.note = Some(format!("degenerate class: {e}"));
            write_spacings(&dir.join(format!("spacings_{class}.tsv")), index, raw, None)?;
            return Ok(out);
        }
    };
    write_spacings(&dir.join(format!("spacings_{class}.tsv")), index, raw, Some(&normalized))?;
    let report = ComparisonReport::new(raw, bin_width)?;
    out.delta_f_w = Some(report.delta_f_w);
    out.delta_f_goe = Some(report.delta_f_goe);
    out.ks_w = Some(report.ks_w);
    out.ks_goe = Some(report.ks_goe);
    match small_s_exponent(&normalized) {
        Ok(fit) => {
            out.small_s_exponent = Some(fit.exponent);
            out.small_s_plain_slope = Some(fit.plain_slope);
        }
        Err(e) => out.note = Some(format!("no small-s fit: {e}")),
    }

    let mut tsv = Tsv::create(
        &dir.join(format!("histogram_{class}.tsv")),
        &[format!("{class} spacings rescaled to unit mean")],
        &["left", "right", "count", "density", "wigner", "goe", "poisson"],
    )?;
    let h = &report.histogram;
    for (i, c) in h.centers().enumerate() {
        tsv.row(&[
            &h.edges[i],
            &h.edges[i + 1],
            &h.counts[i],
            &h.densities[i],
            &ReferenceDistribution::Wigner.pdf(c),
            &ReferenceDistribution::Goe.pdf(c),
            &ReferenceDistribution::Poisson.pdf(c),
        ])?;
    }
    tsv.finish()?;

    let ecdf = EmpiricalCdf::new(&normalized)?;
    let mut tsv = Tsv::create(
        &dir.join(format!("ecdf_{class}.tsv")),
        &[format!("{class} spacings rescaled to unit mean, sampled on a 0.01 grid")],
        &["s", "empirical", "wigner", "goe"],
    )?;
    let top = ecdf.sorted().last().copied().unwrap_or(0.0).max(4.0);
    for i in 0..=(top / 0.01).ceil() as usize {
        let s = i as f64 * 0.01;
        tsv.row(&[
            &format!("{s:.2}"),
            &ecdf.eval(s),
            &ReferenceDistribution::Wigner.cdf(s),
            &ReferenceDistribution::Goe.cdf(s),
        ])?;
    }
    tsv.finish()?;
    Ok(out)
}

fn write_spacings(path: &Path, index: &[usize], raw: &[f64], normalized: Option<&[f64]>) -> Result<()> {
    let mut tsv = Tsv::create(path, &[], &["l", "s", "s_normalized"])?;
    for (i, s) in raw.iter().enumerate() {
        match normalized {
            Some(v) => tsv.row(&[&index[i], s, &v[i]])?,
            None => tsv.row(&[&index[i], s, &"nan"])?,
        }
    }
    tsv.finish()
}

fn load_levels(cfg: &RunConfig, summary: &mut RunSummary) -> Result<(Topology, Vec<Level>)> {
    if let Some(path) = &cfg.roots_file {
        let t = Timer::start();
        let loaded = read_roots(path)?;
        t.stop(summary, "load");
        return Ok(loaded);
    }
    let alpha = cfg.single_alpha()?;
    let t = Timer::start();
    let (system, spectrum) = solve(cfg, alpha)?;
    t.stop(summary, "solve");
    summary.spectrum = Some(spectrum_summary(&system, &spectrum));
    Ok((spectrum.topology, spectrum.levels))
}

pub fn analyze(cfg: &RunConfig) -> Result<RunSummary> {
    let mut summary = RunSummary::new("analyze", cfg);
    let (topology, levels) = load_levels(cfg, &mut summary)?;
    create_output(&cfg.output)?;
    let t = Timer::start();
    let unfolded = unfold_levels(topology, &levels, cfg.drop);
    let series = SpacingSeries::new(unfolded.clone())?;
    let all_index: Vec<usize> = (1..=series.spacings.len()).collect();
    let odd_index: Vec<usize> = all_index.iter().copied().step_by(2).collect();
    let even_index: Vec<usize> = all_index.iter().copied().skip(1).step_by(2).collect();
    for (class, raw, index) in [
        ("odd", series.odd(), odd_index),
        ("even", series.even(), even_index),
        ("all", series.spacings.clone(), all_index),
    ] {
        summary
            .classes
            .push(class_summary(class, &raw, cfg.bin_width, &cfg.output, &index)?);
    }
    t.stop(&mut summary, "spacings");

    let t = Timer::start();
    match number_variance(&unfolded, &cfg.l_grid) {
        Ok(curve) => {
            let mut tsv = Tsv::create(
                &cfg.output.join("number_variance.tsv"),
                &["unfolded levels e = 2k, windows [a, a+L) at stride L/4".to_string()],
                &["L", "sigma2", "windows", "goe", "gue", "poisson"],
            )?;
            for i in 0..curve.l.len() {
                let l = curve.l[i];
                let r = |e| number_variance_reference(e, l).unwrap_or(0.0);
                tsv.row(&[
                    &l,
                    &curve.sigma2[i],
                    &curve.windows[i],
                    &r(Ensemble::Goe),
                    &r(Ensemble::Gue),
                    &r(Ensemble::Poisson),
                ])?;
            }
            tsv.finish()?;
        }
        Err(e) => summary.warnings.push(format!("number variance skipped: {e}")),
    }
    t.stop(&mut summary, "number_variance");
    Ok(summary)
}

fn sweep_point(cfg: &RunConfig, alpha: f64) -> SweepRow {
    let mut row = SweepRow {
        alpha,
        beta: crate::model::beta_of_alpha(alpha).unwrap_or(f64::NAN),
        status: "ok".into(),
        roots: 0,
        delta_f_w: None,
        delta_f_goe: None,
        ks_w: None,
        ks_goe: None,
        message: None,
    };
    let (_, spectrum) = match solve(cfg, alpha) {
        Ok(s) => s,
        Err(e) => {
            row.status = "error".into();
            row.message = Some(e.to_string());
            return row;
        }
    };
    row.roots = spectrum.len();
    let unfolded = unfold_levels(spectrum.topology, &spectrum.levels, cfg.drop);
    let odd = match SpacingSeries::new(unfolded) {
        Ok(s) => s.odd(),
        Err(e) => {
            row.status = "error".into();
            row.message = Some(e.to_string());
            return row;
        }
    };
    match ComparisonReport::new(&odd, cfg.bin_width) {
        Ok(r) => {
            row.delta_f_w = Some(r.delta_f_w);
            row.delta_f_goe = Some(r.delta_f_goe);
            row.ks_w = Some(r.ks_w);
            row.ks_goe = Some(r.ks_goe);
        }
        Err(e) => {
            row.status = "degenerate".into();
            row.message = Some(e.to_string());
        }
    }
    row
}

/// Index of an interior minimum of `values` (ignoring missing entries), if any.
pub fn interior_minimum(values: &[Option<f64>]) -> Option<usize> {
    let present: Vec<(usize, f64)> = values.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    let (pos, _) = present
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    (pos > 0 && pos + 1 < present.len()).then(|| present[pos].0)
}

pub fn sweep(cfg: &RunConfig) -> Result<RunSummary> {
    let alphas = cfg.alphas()?;
    let mut summary = RunSummary::new("sweep", cfg);
    let t = Timer::start();
    let rows: Vec<SweepRow> = alphas.par_iter().map(|&a| sweep_point(cfg, a)).collect();
    t.stop(&mut summary, "sweep");
    create_output(&cfg.output)?;
    let mut tsv = Tsv::create(
        &cfg.output.join("sweep.tsv"),
        &["odd spacings rescaled to unit mean".to_string()],
        &["alpha", "beta", "status", "roots", "delta_f_w", "delta_f_goe", "ks_w", "ks_goe"],
    )?;
    let cell = |v: Option<f64>| v.map_or("nan".to_string(), |v| v.to_string());
    for r in &rows {
        tsv.row(&[
            &r.alpha,
            &r.beta,
            &r.status,
            &r.roots,
            &cell(r.delta_f_w),
            &cell(r.delta_f_goe),
            &cell(r.ks_w),
            &cell(r.ks_goe),
        ])?;
    }
    tsv.finish()?;
    for r in rows.iter().filter(|r| r.status == "error") {
        summary.warnings.push(format!(
            "alpha = {}: {}",
            r.alpha,
            r.message.as_deref().unwrap_or("failed")
        ));
    }
    let w: Vec<_> = rows.iter().map(|r| r.delta_f_w).collect();
    let g: Vec<_> = rows.iter().map(|r| r.delta_f_goe).collect();
    let (iw, ig) = (interior_minimum(&w), interior_minimum(&g));
    summary.sweep_minima = Some(SweepMinima {
        delta_f_w_alpha: iw.map(|i| rows[i].alpha),
        delta_f_w: iw.and_then(|i| rows[i].delta_f_w),
        delta_f_goe_alpha: ig.map(|i| rows[i].alpha),
        delta_f_goe: ig.and_then(|i| rows[i].delta_f_goe),
    });
    summary.sweep = rows;
    Ok(summary)
}

pub fn perturb_check(cfg: &RunConfig) -> Result<RunSummary> {
    let alpha = cfg.single_alpha()?;
    let mut summary = RunSummary::new("perturb-check", cfg);
    let system = cfg.system(alpha)?;
    let policy = cfg.policy(&system)?;
    if let Some(w) = coupling_warning(&system) {
        eprintln!("warning: {w}");
        summary.warnings.push(w);
    }
    let doublets = cfg.doublets;
    let beta = system.beta();
    let t = Timer::start();
    // the ring needs 2J + 1 roots, the segment J
    let coverage = match system.topology() {
        Topology::Circle => Coverage::Count(2 * doublets + 1),
        Topology::Segment => Coverage::Count(doublets),
    };
    let spectrum = find_spectrum(&system, coverage, &policy)?;
    t.stop(&mut summary, "solve");
    create_output(&cfg.output)?;

    let mut max_error: f64 = 0.0;
    let mut max_odd: f64 = 0.0;
    match system.topology() {
        Topology::Circle => {
            let roots = spectrum.roots();
            let gaps = spectrum.gaps();
            let pred = perturbative_doublets(&system, doublets as u64)?;
            let mut tsv = Tsv::create(
                &cfg.output.join("perturbation.tsv"),
                &[format!("alpha = {alpha}, beta = {beta:e}")],
                &["j", "k_lower", "k_upper", "pred_lower", "pred_upper", "error", "odd_spacing", "pred_odd_spacing"],
            )?;
            for p in &pred {
                let pair: Vec<f64> = roots
                    .iter()
                    .zip(&gaps)
                    .filter(|(_, g)| **g == p.j)
                    .map(|(k, _)| *k)
                    .collect();
                let [lo, hi] = pair[..] else {
                    return Err(Error::Completeness {
                        lo: p.j as f64 - 0.5,
                        hi: p.j as f64 + 0.5,
                        detail: format!("doublet {} has {} roots", p.j, pair.len()),
                    });
                };
                let err = (lo - p.k_lower).abs().max((hi - p.k_upper).abs());
                let odd = 2.0 * (hi - lo);
                max_error = max_error.max(err);
                max_odd = max_odd.max((odd - p.predicted_odd_spacing).abs());
                tsv.row(&[&p.j, &lo, &hi, &p.k_lower, &p.k_upper, &err, &odd, &p.predicted_odd_spacing])?;
            }
            tsv.finish()?;
        }
        Topology::Segment => {
            let mut tsv = Tsv::create(
                &cfg.output.join("perturbation.tsv"),
                &[format!("alpha = {alpha}, beta = {beta:e}")],
                &["j", "k", "pred", "gamma", "error"],
            )?;
            for (j, k) in (1u64..).zip(spectrum.roots()) {
                let p = gamma_segment(j, system.positions(), beta);
                let err = (k - p.k_pred).abs();
                max_error = max_error.max(err);
                tsv.row(&[&j, &k, &p.k_pred, &p.gamma, &err])?;
            }
            tsv.finish()?;
        }
    }
    summary.perturbation = Some(PerturbationSummary {
        doublets,
        beta,
        weak_coupling: within_weak_coupling(&system),
        max_error,
        max_error_over_beta2: if beta == 0.0 { 0.0 } else { max_error / (beta * beta) },
        max_odd_spacing_error: max_odd,
    });
    summary.spectrum = Some(spectrum_summary(&system, &spectrum));
    Ok(summary)
}

pub fn rmt_table(cfg: &RunConfig) -> Result<RunSummary> {
    let mut summary = RunSummary::new("rmt-table", cfg);
    let settings = GeneratorSettings {
        accuracy: cfg.accuracy,
        ..GeneratorSettings::default()
    };
    let t = Timer::start();
    let table = crate::rmt::build_goe_table(&settings)?;
    t.stop(&mut summary, "generate");
    create_output(&cfg.output)?;
    let path: PathBuf = cfg.output.join("goe_table.txt");
    table.write(&path)?;
    let delta = table.metadata.delta_wigner;
    let passed = (delta - GOE_WIGNER_DISTANCE).abs() < GOE_WIGNER_TOLERANCE;
    let _ = writeln!(
        std::io::stdout(),
        "Delta(F_GOE - F_W) = {delta:.6e} (reference {GOE_WIGNER_DISTANCE:.4e} +/- {GOE_WIGNER_TOLERANCE:.0e})"
    );
    summary.table = Some(TableSummary {
        path,
        points: table.values.len(),
        step: table.step,
        accuracy: table.metadata.accuracy,
        delta_wigner: delta,
        reference: GOE_WIGNER_DISTANCE,
        self_check_passed: passed,
    });
    Ok(summary)
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Fast internal consistency checks of the numerical building blocks.
pub fn selftest(cfg: &RunConfig) -> Result<RunSummary> {
    let mut summary = RunSummary::new("selftest", cfg);
    let t = Timer::start();
    let mut checks = Vec::new();

    let free = SystemConfig::with_prime_positions(Topology::Circle, 1.0, 5)?;
    let s = find_spectrum(&free, Coverage::Count(20), &crate::ScanPolicy::for_config(&free))?;
    let ok = s.levels.iter().filter(|l| l.gap > 0).all(|l| l.multiplicity == 2 && (l.k - l.gap as f64).abs() < 1e-10);
    checks.push(check("free ring roots k = j, doubly degenerate", ok, format!("{} levels", s.levels.len())));

    let one = SystemConfig::new(Topology::Circle, 2.0, vec![1.0])?;
    let s = find_spectrum(&one, Coverage::Count(5), &crate::ScanPolicy::for_config(&one))?;
    let shift = (1.0 - one.beta().powi(2)).sqrt().acos() / std::f64::consts::TAU;
    let expect = [1.0 - shift, 1.0 + shift, 2.0 - shift, 2.0 + shift];
    let roots = s.roots();
    let err = expect.iter().zip(&roots[1..]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(check("single interaction closed form", err < 1e-10, format!("max error {err:.2e}")));

    let table = GoeTable::shipped();
    let delta = reference_distance(ReferenceDistribution::Goe, ReferenceDistribution::Wigner);
    let consistent = (delta - table.metadata.delta_wigner).abs() < 1e-9;
    checks.push(check(
        "shipped GOE table integrates to its recorded distance",
        consistent,
        format!("{delta:.6e}"),
    ));
    let nv = number_variance_reference(Ensemble::Poisson, 2.0)?;
    checks.push(check("Poisson number variance", nv == 2.0, format!("{nv}")));

    t.stop(&mut summary, "checks");
    for c in &checks {
        let _ = writeln!(std::io::stdout(), "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    summary.checks = checks;
    create_output(&cfg.output)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_minimum_ignores_edges_and_gaps() {
        assert_eq!(interior_minimum(&[Some(3.0), Some(1.0), Some(2.0)]), Some(1));
        assert_eq!(interior_minimum(&[Some(1.0), Some(2.0), Some(3.0)]), None);
        assert_eq!(interior_minimum(&[None, Some(3.0), None, Some(1.0), Some(2.0)]), Some(3));
        assert_eq!(interior_minimum(&[]), None);
    }
}
