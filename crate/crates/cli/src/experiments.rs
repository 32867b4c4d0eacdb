//! One runner per subcommand. Runners only compute tables; [`execute`]
//! writes them and the manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use rayon::prelude::*;
use toomqca::data::{check_gadget_conditions, exrec_correctness, gadget, CodeSpec, Counterexample, PauliFault};
use toomqca::lattice::{DataRule, Init, LatticeState, ScheduleParams, Site};
use toomqca::noise::{derive_seed, trial_seed, FaultPath, KeyedRng, NoiseParams};
use toomqca::renorm::{
    estimate_level_noise, lifetime_experiment, placement_trial, renorm_flow, LifetimeConfig, SparsityConfig,
};
use toomqca::runtime::{effective_fault_rate, local_min_density, run_async, run_ct, same_registers, CtParams};
use toomqca::schedule::{solve_params, step, FeasibilityConstraints, Recorder, SiteRule};
use toomqca::stats::ks_exponential;
use toomqca::structure::{erosion_check, singular_sites, Triangle};

use crate::config::*;
use crate::manifest::{RunManifest, TOOL, VERSION};
use crate::table::Table;
use crate::{row, CliError};

/// Largest relative gap tolerated between the iterated and closed-form flow.
pub const FLOW_TOLERANCE: f64 = 1e-12;

/// Tables and findings of one experiment.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub seeds: BTreeMap<String, Seed>,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    /// First invariant the run found broken, if any.
    pub violation: Option<String>,
}

impl Outcome {
    fn seed(&mut self, master: Seed, label: &str) -> u64 {
        let s = derive_seed(master.0, label);
        self.seeds.insert(label.to_string(), Seed(s));
        s
    }

    fn violate(&mut self, msg: String) {
        if self.violation.is_none() {
            self.violation = Some(msg);
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
    pub summary: Vec<String>,
    pub violation: Option<String>,
}

/// Runs `cfg`, writing its CSV files and manifest into `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<RunReport, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let started = now();
    let outcome = run(cfg)?;
    let mut outputs = BTreeMap::new();
    for t in &outcome.tables {
        outputs.insert(t.file_name(), t.write(out)?);
    }
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        master_seed: cfg.seed,
        started,
        finished: now(),
        config: cfg.clone(),
        derived_seeds: outcome.seeds,
        outputs,
    };
    let manifest_path = manifest.save(out)?;
    Ok(RunReport { manifest, manifest_path, summary: outcome.summary, violation: outcome.violation })
}

#[derive(Debug)]
pub struct ReplayReport {
    pub run: RunReport,
    /// Outputs whose digest differs from the original manifest, or that are missing.
    pub mismatched: Vec<String>,
}

/// Re-runs the experiment recorded in a manifest and compares output digests.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<ReplayReport, CliError> {
    let original = RunManifest::load(manifest_path)?;
    let run = execute(&original.config, out)?;
    let mut mismatched: Vec<String> = original
        .outputs
        .iter()
        .filter(|(f, d)| run.manifest.outputs.get(*f) != Some(*d))
        .map(|(f, _)| f.clone())
        .collect();
    mismatched.extend(run.manifest.outputs.keys().filter(|f| !original.outputs.contains_key(*f)).cloned());
    Ok(ReplayReport { run, mismatched })
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Computes the tables of `cfg` without touching the file system.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut o = Outcome::default();
    match &cfg.experiment {
        Experiment::RunSync(s) => run_sync_exp(cfg, s, &mut o)?,
        Experiment::RunAsync(s) => run_async_exp(cfg, s, &mut o)?,
        Experiment::RunCt(s) => run_ct_exp(cfg, s, &mut o)?,
        Experiment::ExrecScan(s) => exrec_scan(cfg, s, &mut o)?,
        Experiment::ThresholdFlow(s) => threshold_flow(s, &mut o)?,
        Experiment::GadgetCheck(s) => gadget_check(s, &mut o)?,
        Experiment::Lifetime(s) => lifetime(cfg, s, &mut o)?,
        Experiment::SolveParams(s) => solve(cfg, s, &mut o)?,
        Experiment::ErosionTest(s) => erosion(cfg, s, &mut o)?,
    }
    Ok(o)
}

fn side(n: usize, p: &ScheduleParams, blocks: usize) -> usize {
    if n == 0 {
        blocks * p.m as usize
    } else {
        n
    }
}

fn noise(p: f64, layer: NoiseLayer) -> Result<NoiseParams, CliError> {
    let nz = NoiseParams { targets: layer.targets(), ..NoiseParams::iid(p) };
    nz.validate()?;
    Ok(nz)
}

fn rule(params: ScheduleParams, table: TableKind, gating: bool) -> SiteRule {
    match table.table() {
        Some(t) => SiteRule::with_table(params, t, gating),
        None => SiteRule { params, table: None, gating },
    }
}

fn data_ones(lat: &LatticeState) -> usize {
    lat.data.bits().map_or(0, |b| b.iter().filter(|&&v| v == 1).count())
}

fn run_sync_exp(cfg: &RunConfig, s: &SyncSpec, o: &mut Outcome) -> Result<(), CliError> {
    let params = cfg.schedule.resolve()?;
    let n = side(s.n, &params, 2);
    let steps = if s.steps == 0 { 2 * params.t } else { s.steps };
    let nz = noise(s.p, s.layer)?;
    let rl = rule(params, s.table, s.gating);
    let rng = KeyedRng::new(o.seed(cfg.seed, "run-sync"));
    let mut lat = LatticeState::new(n, params, Init::Ideal, DataRule::default())?;
    let mut path = FaultPath::new(rng.seed, nz.p);
    let mut rec = Recorder::default();
    let mut t = Table::new("run-sync", &["step", "singular_sites", "data_ones", "faults", "ideal"]);
    let stride = s.stride.max(1);
    let push = |t: &mut Table, k: u64, lat: &LatticeState, faults: usize| {
        let sing = singular_sites(lat, lat.global_time).len();
        t.push(row![k, sing, data_ones(lat), faults, sing == 0]);
        sing
    };
    push(&mut t, 0, &lat, 0);
    let mut worst = 0;
    for k in 1..=steps {
        step(&mut lat, &rl, &nz, &rng, &mut path, &mut rec)?;
        if k % stride == 0 || k == steps {
            worst = worst.max(push(&mut t, k, &lat, path.len()));
        }
    }
    let st = &rec.stats;
    let mut stats = Table::new(
        "run-sync-stats",
        &["steps", "data_ops", "cross_block_calls", "gated", "inconsistent_cross_exec", "inconsistent_cross_exec_actual", "miscontrolled"],
    );
    stats.push(row![
        st.steps,
        st.data_ops,
        st.cross_block_calls,
        st.gated,
        st.inconsistent_cross_exec,
        st.inconsistent_cross_exec_actual,
        st.miscontrolled
    ]);
    o.summary.push(format!("{steps} steps on {n}x{n}, {} faults, final singular sites {}", path.len(), singular_sites(&lat, lat.global_time).len()));
    if nz.p == 0.0 && worst > 0 {
        o.violate(format!("noiseless run left the codeword ({worst} singular sites)"));
    }
    if s.gating && st.inconsistent_cross_exec > 0 {
        o.violate(format!("{} inconsistently controlled cross-block gates ran with gating on", st.inconsistent_cross_exec));
    }
    o.tables.extend([t, stats]);
    Ok(())
}

fn run_async_exp(cfg: &RunConfig, s: &AsyncSpec, o: &mut Outcome) -> Result<(), CliError> {
    let params = cfg.schedule.resolve()?;
    let n = side(s.n, &params, 2);
    let nz = noise(s.p, s.layer)?;
    let rl = rule(params, s.table, s.gating);
    let rng = KeyedRng::new(o.seed(cfg.seed, "run-async"));
    let lat = LatticeState::new(n, params, Init::Ideal, DataRule::default())?;
    let every = if s.sample_every == 0 { (n * n) as u64 } else { s.sample_every };
    let tr = run_async(lat.clone(), &rl, s.events, &nz, &rng, s.check_slices, false, every)?;
    let st = &tr.lattice.stats;
    let mut dens = Table::new("run-async-density", &["event", "local_min_fraction"]);
    for (e, f) in &tr.density {
        dens.push(row![e, f]);
    }
    let min_c = tr.lattice.min_counter();
    let max_c = tr.lattice.cur.counter.iter().copied().max().unwrap_or(0);
    let mut slices_checked = 0u64;
    if s.check_slices {
        let mut sync = lat;
        let mut path = FaultPath::new(rng.seed, nz.p);
        let mut rec = Recorder::default();
        for c in 0..=min_c {
            if c > 0 {
                step(&mut sync, &rl, &nz, &rng, &mut path, &mut rec)?;
            }
            let sl = tr.lattice.slice(c).ok_or_else(|| CliError::Other(format!("slice {c} unavailable")))?;
            if !same_registers(&sl, &sync) {
                o.violate(format!("asynchronous slice {c} differs from the synchronous state"));
                break;
            }
            slices_checked += 1;
        }
    }
    let mut sum = Table::new(
        "run-async-summary",
        &["events", "accepted", "rejected", "max_gap", "gap_violations", "min_counter", "max_counter", "slices_checked", "faults"],
    );
    sum.push(row![st.attempts, st.accepted, st.rejected, st.max_gap, st.gap_violations, min_c, max_c, slices_checked, tr.path.len()]);
    o.summary.push(format!(
        "{} events, {} accepted, max neighbor gap {}, {slices_checked} slices match the synchronous run",
        st.attempts, st.accepted, st.max_gap
    ));
    if st.gap_violations > 0 || st.max_gap > 1 {
        o.violate(format!("neighbor counter gap reached {}", st.max_gap));
    }
    o.tables.extend([dens, sum]);
    Ok(())
}

fn run_ct_exp(cfg: &RunConfig, s: &CtSpec, o: &mut Outcome) -> Result<(), CliError> {
    let params = cfg.schedule.resolve()?;
    let n = side(s.n, &params, 2);
    let rl = rule(params, s.table, true);
    let seed = o.seed(cfg.seed, "run-ct");
    let lat = LatticeState::new(n, params, Init::Ideal, DataRule::default())?;
    let cp = CtParams {
        targets: s.layer.targets(),
        sample_rate: s.sample_rate,
        gap_cap: s.gap_cap,
        ..CtParams::new(s.p, s.duration)
    };
    let tr = run_ct(lat, &rl, &cp, seed)?;
    let mut dens = Table::new("run-ct-density", &["time", "local_min_fraction"]);
    for (t, v) in &tr.density {
        dens.push(row![t, v]);
    }
    let burn = if s.burn_in < 0.0 { s.duration / 3.0 } else { s.burn_in };
    let est = local_min_density(&tr, burn, s.batches, 0.95);
    let (v, hw) = est.map_or((f64::NAN, f64::NAN), |e| (e.v, e.half_width));
    let ks = ks_exponential(&tr.gaps, 1.0 + s.p);
    let eff = effective_fault_rate(&tr);
    let mut sum = Table::new(
        "run-ct-summary",
        &[
            "attempts", "accepted", "noise_events", "noisy_accepted", "v", "v_half_width", "effective_fault_rate", "p_over_v",
            "ks_d", "ks_p", "gaps", "max_gap",
        ],
    );
    let st = &tr.lattice.stats;
    sum.push(row![tr.attempts, tr.accepted, tr.noise_events, tr.noisy_accepted, v, hw, eff, s.p / v, ks.d, ks.p_value, ks.n, st.max_gap]);
    o.summary.push(format!("v = {v:.4} +- {hw:.4}, effective fault rate {eff:.3e}, waiting-time KS p = {:.3}", ks.p_value));
    if st.gap_violations > 0 {
        o.violate(format!("neighbor counter gap reached {}", st.max_gap));
    }
    o.tables.extend([dens, sum]);
    Ok(())
}

fn exrec_scan(cfg: &RunConfig, s: &ScanSpec, o: &mut Outcome) -> Result<(), CliError> {
    match s.mode {
        ScanMode::Placements => {
            let params = cfg.schedule.resolve()?;
            let n = side(s.n, &params, 3);
            let seed = o.seed(cfg.seed, "exrec-placements");
            let outs: Vec<_> = (0..s.trials)
                .into_par_iter()
                .map(|k| placement_trial(&params, n, seed, k))
                .collect::<Result<_, _>>()?;
            let mut t = Table::new("exrec-scan-placements", &["trial", "bi", "bj", "slice", "h", "r", "clusters_out", "correct"]);
            for p in &outs {
                t.push(row![p.trial, p.target.bi, p.target.bj, p.target.slice, p.h, p.r, p.clusters_out, p.correct]);
            }
            let failures = outs.iter().filter(|p| !p.correct).count();
            let worst = outs.iter().map(|p| p.clusters_out).max().unwrap_or(0);
            o.summary.push(format!("{} placements, {failures} incorrect, at most {worst} output clusters (t_EC_S = {})", s.trials, params.t_ec_s));
            if failures > 0 {
                o.violate(format!("{failures} placements with h + r <= t_EC_S left more than t_EC_S clusters"));
            }
            o.tables.push(t);
        }
        ScanMode::Sparsity => {
            let mut pts = Table::new(
                "exrec-scan-sparsity",
                &["t_ec_s", "p", "eta", "exrecs", "direct_bad", "p_direct_bad", "ci_lo", "ci_hi", "bad", "p_bad", "eta_eff", "retained"],
            );
            let mut fits = Table::new("exrec-scan-fits", &["t_ec_s", "raw_slope", "raw_se", "strength_slope", "strength_se", "implied_a_s"]);
            for &t in &s.t_ec_s {
                let seed = o.seed(cfg.seed, &format!("exrec-sparsity-{t}"));
                let sc = SparsityConfig {
                    p_grid: s.p_grid.clone(),
                    min_events: s.min_events,
                    max_exrecs: s.max_exrecs,
                    ..SparsityConfig::small(t, seed)
                };
                let rep = estimate_level_noise(&sc)?;
                for p in &rep.points {
                    pts.push(row![t, p.p, p.eta, p.exrecs, p.direct_bad, p.p_direct_bad, p.ci_lo, p.ci_hi, p.bad, p.p_bad, p.eta_eff, p.retained]);
                }
                let f = |v: Option<f64>| v.map_or("".to_string(), |x| x.to_string());
                fits.push(row![
                    t,
                    f(rep.raw_fit.map(|x| x.slope)),
                    f(rep.raw_fit.map(|x| x.slope_se)),
                    f(rep.strength_fit.map(|x| x.slope)),
                    f(rep.strength_fit.map(|x| x.slope_se)),
                    f(rep.implied_a_s)
                ]);
                o.summary.push(format!(
                    "t_EC_S = {t}: raw slope {:.3}, strength slope {:.3}",
                    rep.raw_fit.map_or(f64::NAN, |x| x.slope),
                    rep.strength_fit.map_or(f64::NAN, |x| x.slope)
                ));
            }
            o.tables.extend([pts, fits]);
        }
    }
    Ok(())
}

fn threshold_flow(s: &FlowSpec, o: &mut Outcome) -> Result<(), CliError> {
    let fl = renorm_flow(s.eta0, s.a, s.t_ec, s.k)?;
    let mut t = Table::new("threshold-flow", &["level", "eta", "closed_form", "rel_err", "eta_th"]);
    for (l, (e, c)) in fl.eta_per_level.iter().zip(&fl.closed_form).enumerate() {
        let rel = if e == c { 0.0 } else { (e - c).abs() / e.abs().max(c.abs()) };
        t.push(row![l, e, c, rel, fl.eta_th]);
    }
    o.summary.push(format!(
        "eta_th = {}, eta_{} = {:e}, {}",
        fl.eta_th,
        s.k,
        fl.eta_log(),
        if fl.suppressing { "below threshold" } else { "at or above threshold" }
    ));
    if fl.max_rel_err > FLOW_TOLERANCE {
        o.violate(format!("iterated flow deviates from the closed form by {:e}", fl.max_rel_err));
    }
    o.tables.push(t);
    Ok(())
}

fn faults_text(f: &[PauliFault]) -> String {
    f.iter().map(|f| format!("{}:{:x}:{:x}", f.location, f.x, f.z)).collect::<Vec<_>>().join(" ")
}

fn ce_cells(ce: &Option<Counterexample>) -> Vec<String> {
    match ce {
        Some(c) => row![
            c.logical_input,
            format!("{:x}:{:x}", c.input_error.x, c.input_error.z),
            faults_text(&c.faults),
            c.detail
        ],
        None => vec![String::new(); 4],
    }
}

fn gadget_check(s: &GadgetSpec, o: &mut Outcome) -> Result<(), CliError> {
    let code = match s.code {
        CodeChoice::Rep3 => CodeSpec::repetition3(),
        CodeChoice::Steane => CodeSpec::steane(),
    };
    let max_faults = if s.max_faults == 0 { code.t_ec_d } else { s.max_faults };
    let header = ["gadget", "code", "condition", "max_faults", "cases", "failures", "pass", "logical_input", "input_error", "faults", "detail"];
    let mut t = Table::new("gadget-check", &header);
    if s.gadget == "rep3-cnot-exrec" {
        let (ex, lead) = gadget::repetition_cnot_exrec();
        let r = exrec_correctness(&ex, lead, &code, max_faults)?;
        let mut cells = row![r.exrec, code.name, "good-exrec", r.max_faults, r.good_cases, r.good_failures, r.passed()];
        cells.extend(ce_cells(&r.counterexample));
        t.push(cells);
        t.push({
            let mut c = row![r.exrec, code.name, "bad-exrec-contrast", r.max_faults + 1, r.bad_cases, r.bad_failures, ""];
            c.extend(ce_cells(&None));
            c
        });
        o.summary.push(format!("{}: {} good cases, {} failures", r.exrec, r.good_cases, r.good_failures));
    } else {
        let g = gadget::builtin(&s.gadget).ok_or_else(|| CliError::Config(format!("unknown gadget `{}`", s.gadget)))?;
        let r = check_gadget_conditions(&g, &code, code.t_ec_d, max_faults, s.case_cap)?;
        let mut a1 = row![r.gadget, r.code, "A1", r.max_faults, r.a1_cases, !r.a1_pass as u8, r.a1_pass];
        a1.extend(ce_cells(&r.a1_counterexample));
        t.push(a1);
        if let Some(pass) = r.a2_pass {
            let mut a2 = row![r.gadget, r.code, "A2", r.max_faults, r.a2_cases, !pass as u8, pass];
            a2.extend(ce_cells(&r.a2_counterexample));
            t.push(a2);
        }
        o.summary.push(format!(
            "{} on {}: A1 {}, A2 {}{}",
            r.gadget,
            r.code,
            if r.a1_pass { "pass" } else { "FAIL" },
            match r.a2_pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "n/a",
            },
            if r.partial { " (partial enumeration)" } else { "" }
        ));
    }
    o.tables.push(t);
    Ok(())
}

fn lifetime(cfg: &RunConfig, s: &LifetimeSpec, o: &mut Outcome) -> Result<(), CliError> {
    let lc = LifetimeConfig {
        sizes: s.sizes.clone(),
        p_grid: s.p.clone(),
        trials: s.trials,
        cap: s.cap,
        seed: o.seed(cfg.seed, "lifetime"),
        conf: s.conf,
        m: cfg.schedule.m as usize,
    };
    let (rows, sums) = lifetime_experiment(&lc)?;
    let mut rt = Table::new("lifetime-trials", &["L", "p", "trial", "lifetime", "censored"]);
    for r in &rows {
        rt.push(row![r.l, s.p[r.p_index], r.trial, r.lifetime, r.censored]);
    }
    let mut st = Table::new(
        "lifetime-medians",
        &["L", "p", "trials", "censored", "median", "ci_lo", "ci_hi", "median_censored", "ci_censored", "k_max"],
    );
    for m in &sums {
        st.push(row![m.l, m.p, m.trials, m.censored, m.median, m.ci_lo, m.ci_hi, m.median_censored, m.ci_censored, m.k_max]);
        o.summary.push(format!(
            "L = {:>4}, p = {}: median {}{} [{}, {}]",
            m.l,
            m.p,
            m.median,
            if m.median_censored { " (censored)" } else { "" },
            m.ci_lo,
            m.ci_hi
        ));
    }
    o.tables.extend([rt, st]);
    Ok(())
}

fn solve(cfg: &RunConfig, s: &SolveSpec, o: &mut Outcome) -> Result<(), CliError> {
    let c = FeasibilityConstraints {
        d_d: s.d_d,
        c_sim: s.c_sim,
        c_prog: s.c_prog,
        c_dim: s.c_dim,
        t_code: cfg.schedule.t_code,
        t_ref_min: s.t_ref_min,
    };
    let cand = cfg.schedule.params();
    let f = solve_params(&c, s.use_schedule.then_some(&cand), s.m_cap)?;
    let p = f.params;
    let mut t = Table::new("solve-params", &["M", "T_ref", "T_code", "T_sim", "T0", "T", "d", "consistent"]);
    t.push(row![p.m, p.t_ref, p.t_code, p.t_sim, p.t0, p.t, p.d, f.consistent]);
    let mut ch = Table::new("solve-params-checks", &["constraint", "holds"]);
    for (name, holds) in &f.checks {
        ch.push(row![name, holds]);
    }
    o.summary.push(format!("M = {}, T0 = {}, T_sim = {}, d = {}", p.m, p.t0, p.t_sim, p.d));
    if !f.consistent {
        o.violate("solver returned parameters that fail a constraint".into());
    }
    o.tables.extend([t, ch]);
    Ok(())
}

/// One erosion trial: a random triangle, a random nonempty subset of its
/// sites as the error set, and noiseless Toom steps until it must be empty.
pub fn erosion_trial(n: usize, max_offset: i64, seed: u64, k: u64) -> Result<(Triangle, usize, bool), CliError> {
    let rng = KeyedRng::new(trial_seed(seed, k));
    let draw = |lane: u64, hi: i64| (rng.uniform(0, lane, 0) * (hi + 1) as f64) as i64;
    let tri = Triangle::new(
        (draw(0, n as i64 - 1), draw(1, n as i64 - 1)),
        draw(2, max_offset),
        draw(3, max_offset),
        draw(4, max_offset),
    );
    let pts = tri.sites();
    let mut chosen: Vec<_> = pts.iter().enumerate().filter(|(j, _)| rng.uniform(1, *j as u64, 0) < 0.5).map(|(_, p)| *p).collect();
    if chosen.is_empty() {
        chosen.push(pts[(draw(5, pts.len() as i64 - 1)) as usize]);
    }
    let ni = n as i64;
    let sites: Vec<Site> = chosen.iter().map(|p| Site::new(p.0.rem_euclid(ni) as usize, p.1.rem_euclid(ni) as usize)).collect();
    let ok = erosion_check(&sites, &[tri], (tri.norm() + 2) as usize, n)?;
    Ok((tri, sites.len(), ok))
}

fn erosion(cfg: &RunConfig, s: &ErosionSpec, o: &mut Outcome) -> Result<(), CliError> {
    if s.max_offset < 0 || 3 * s.max_offset + 2 >= s.n as i64 / 2 {
        return Err(CliError::Config(format!("triangles with offsets up to {} do not fit a {}-torus", s.max_offset, s.n)));
    }
    let seed = o.seed(cfg.seed, "erosion-test");
    let res: Vec<_> = (0..s.trials)
        .into_par_iter()
        .map(|k| erosion_trial(s.n, s.max_offset, seed, k))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new("erosion-test", &["trial", "anchor_i", "anchor_j", "a", "b", "c", "sites", "contained"]);
    for (k, (tri, m, ok)) in res.iter().enumerate() {
        t.push(row![k, tri.anchor.0, tri.anchor.1, tri.a, tri.b, tri.c, m, ok]);
    }
    let passed = res.iter().filter(|r| r.2).count();
    o.summary.push(format!("{passed}/{} error sets stayed inside their eroding triangles", s.trials));
    if passed as u64 != s.trials {
        o.violate(format!("{} error sets escaped their triangles", s.trials - passed as u64));
    }
    o.tables.push(t);
    Ok(())
}
