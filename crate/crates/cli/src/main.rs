//! Command-line front end: problem-file parsing, dispatch, JSON reports.
//!
//! Exit codes: 0 success, 2 schema error, 3 truncation insufficient,
//! 4 certification failure, 5 infeasible / depth exceeded.

mod problem;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use limitflow_core::curve::{
    self, classify_compactness, h_functional, kappa_and_angles, limit_set, radius_expand,
    stratify, AnglesOutcome, Compactness, LimitSet,
};
use limitflow_core::harness::{
    self, cluster_scan, mass_check, sample_mu_a, sample_mu_a_filtered, sector_mass_check,
    weyl_test, Predicted,
};
use limitflow_core::lattice::{AmbientPoint, ClosedSubgroup, Lattice};
use limitflow_core::linalg::{RealSubspace, RealSubspaceExact};
use limitflow_core::multiflow::{
    compose, enumerate_complete_sequences, good_disc, leading_powers,
};
use limitflow_core::{Error as CoreError, DEFAULT_PREC};

use problem::ProblemFile;
use report::*;

#[derive(Parser)]
#[command(
    name = "limitflow",
    about = "Limit sets of algebraic flows in commutative complex Lie groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem file (JSON, schema_version 1).
    #[arg(global = true)]
    problem: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Comma-separated list of scales.
    #[arg(long, global = true)]
    a_grid: Option<String>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the sampled measure as CSV to this path.
    #[arg(long, global = true)]
    dump_samples: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Stratify a curve and classify compactness.
    AnalyzeCurve,
    /// Almost-Γ-radii and per-radius expansions.
    Radii,
    /// The full limit set of a one-variable flow.
    LimitSet,
    /// Leading powers of a multi-variable map.
    LeadingPowers,
    /// Complete leading sequences (cones, λ) of a multi-variable map.
    Sequences,
    /// Good holomorphic disc for a chosen complete sequence.
    GoodDisc {
        #[arg(long, default_value_t = 0)]
        sequence: usize,
        #[arg(long, default_value_t = 16)]
        n0_cap: usize,
    },
    /// Weyl-sum equidistribution against the computed limit set.
    VerifyEquidist,
    /// Mass asymptotics of the pushed-forward measure.
    MassCheck,
    /// Empirical cluster scan against predicted components.
    ClusterScan,
    /// Smallest sub-semi-torus containing the image of a subspace.
    AlwHull,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn schema_err(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
    }
}

fn core_err(e: CoreError) -> Failure {
    let code = match &e {
        CoreError::TruncationInsufficient(_) => 3,
        CoreError::CertificationFailure(_) => 4,
        CoreError::Infeasible(_) | CoreError::DepthExceeded => 5,
        _ => 2,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn load_problem(cli: &Cli) -> Result<ProblemFile, Failure> {
    let Some(path) = &cli.problem else {
        return Err(schema_err("missing problem file argument"));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema_err(format!("cannot read {path}: {e}")))?;
    let pf: ProblemFile =
        serde_json::from_str(&text).map_err(|e| schema_err(format!("schema error: {e}")))?;
    pf.validate().map_err(schema_err)?;
    Ok(pf)
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value)
        .map_err(|e| schema_err(format!("serialization: {e}")))?;
    println!("{s}");
    Ok(())
}

fn parse_a_grid(cli: &Cli, pf: &ProblemFile, default: &[f64]) -> Result<Vec<f64>, Failure> {
    if let Some(s) = &cli.a_grid {
        return s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| schema_err(format!("bad a-grid entry {x}: {e}")))
            })
            .collect();
    }
    if let Some(h) = &pf.harness {
        if let Some(g) = &h.a_grid {
            return Ok(g.clone());
        }
    }
    Ok(default.to_vec())
}

struct Settings {
    seed: u64,
    prec: u32,
    samples: usize,
    tolerance: f64,
    depth: usize,
    degree: i64,
}

fn settings(cli: &Cli, pf: &ProblemFile) -> Settings {
    let h = pf.harness.as_ref();
    Settings {
        seed: cli.seed.or(h.and_then(|h| h.seed)).unwrap_or(7),
        prec: cli
            .precision_bits
            .or(h.and_then(|h| h.precision_bits))
            .unwrap_or(DEFAULT_PREC),
        samples: cli
            .samples
            .or(h.and_then(|h| h.samples))
            .unwrap_or(100_000),
        tolerance: cli
            .tolerance
            .or(h.and_then(|h| h.tolerance))
            .unwrap_or(0.05),
        depth: cli.depth.unwrap_or(8),
        degree: h.and_then(|h| h.degree).unwrap_or(3),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let pf = load_problem(cli)?;
    let lattice = pf.build_lattice().map_err(schema_err)?;
    let st = settings(cli, &pf);
    match &cli.command {
        Command::AnalyzeCurve => analyze_curve(&pf, &lattice),
        Command::Radii => radii(&pf, &lattice, &st),
        Command::LimitSet => limit_set_cmd(&pf, &lattice, &st),
        Command::LeadingPowers => leading_powers_cmd(&pf),
        Command::Sequences => sequences_cmd(&pf, &st),
        Command::GoodDisc { sequence, n0_cap } => good_disc_cmd(&pf, *sequence, *n0_cap),
        Command::VerifyEquidist => verify_equidist(cli, &pf, &lattice, &st),
        Command::MassCheck => mass_check_cmd(cli, &pf, &lattice, &st),
        Command::ClusterScan => cluster_scan_cmd(&pf, &lattice, &st),
        Command::AlwHull => alw_hull_cmd(&pf, &lattice),
    }
}

fn need_curve(pf: &ProblemFile) -> Result<limitflow_core::curve::LaurentCurve, Failure> {
    pf.build_curve()
        .map_err(schema_err)?
        .ok_or_else(|| schema_err("this command needs a curve descriptor"))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeReport {
    outcome: String,
    stratification: Option<StratificationJson>,
    compactness: Option<String>,
    single_limit_point: Option<BaseJson>,
}

fn analyze_curve(pf: &ProblemFile, lattice: &Lattice) -> Result<(), Failure> {
    let f = need_curve(pf)?;
    match stratify(&f) {
        Err(CoreError::NoPoles) => {
            let p = lattice.reduce(&f.coeff(0)).map_err(core_err)?;
            emit(&AnalyzeReport {
                outcome: "single limit point".into(),
                stratification: None,
                compactness: None,
                single_limit_point: Some(BaseJson {
                    mode: "exact",
                    compact: rat_strs(&p.compact),
                    transverse: rat_strs(&p.transverse),
                }),
            })
        }
        Err(e) => Err(core_err(e)),
        Ok(s) => {
            let c = classify_compactness(&s, lattice);
            emit(&AnalyzeReport {
                outcome: "stratified".into(),
                stratification: Some(stratification_json(&s)),
                compactness: Some(format!("{c:?}")),
                single_limit_point: None,
            })
        }
    }
}

#[derive(Serialize)]
struct RadiiReport {
    angles: Option<AnglesJson>,
    no_almost_gamma_radius: bool,
    records: Vec<RadiusJson>,
}

fn radii(pf: &ProblemFile, lattice: &Lattice, st: &Settings) -> Result<(), Failure> {
    let f = need_curve(pf)?;
    let s = stratify(&f).map_err(core_err)?;
    if classify_compactness(&s, lattice) == Compactness::Compact {
        return Err(schema_err(
            "compact case: the radius analysis does not apply (use limit-set)",
        ));
    }
    match kappa_and_angles(&s, lattice).map_err(core_err)? {
        AnglesOutcome::NoAlmostGammaRadius { .. } => emit(&RadiiReport {
            angles: None,
            no_almost_gamma_radius: true,
            records: vec![],
        }),
        AnglesOutcome::Radii(a) => {
            let mut records = Vec::new();
            for p in 0..a.num_radii() {
                let rec = radius_expand(&f, &s, &a, lattice, p, st.prec).map_err(core_err)?;
                records.push(radius_json(&rec, lattice));
            }
            emit(&RadiiReport {
                angles: Some(angles_json(&a)),
                no_almost_gamma_radius: false,
                records,
            })
        }
    }
}

#[derive(Serialize)]
struct ComponentJson {
    radii: Vec<usize>,
    subgroup: SubgroupJson,
}

#[derive(Serialize)]
struct LimitSetReportJson {
    outcome: String,
    reason: Option<String>,
    stratification: Option<StratificationJson>,
    angles: Option<AnglesJson>,
    single_point: Option<BaseJson>,
    compact_component: Option<SubgroupJson>,
    components: Vec<ComponentJson>,
    records: Vec<RadiusJson>,
}

fn limit_set_cmd(pf: &ProblemFile, lattice: &Lattice, st: &Settings) -> Result<(), Failure> {
    let f = need_curve(pf)?;
    let rep = limit_set(&f, lattice, st.prec).map_err(core_err)?;
    let mut out = LimitSetReportJson {
        outcome: String::new(),
        reason: None,
        stratification: rep.stratification.as_ref().map(stratification_json),
        angles: rep.angles.as_ref().map(angles_json),
        single_point: None,
        compact_component: None,
        components: vec![],
        records: vec![],
    };
    match &rep.outcome {
        LimitSet::SinglePoint(p) => {
            out.outcome = "single_point".into();
            out.single_point = Some(BaseJson {
                mode: "exact",
                compact: rat_strs(&p.compact),
                transverse: rat_strs(&p.transverse),
            });
        }
        LimitSet::Empty { reason } => {
            out.outcome = "empty".into();
            out.reason = Some(reason.clone());
        }
        LimitSet::Compact(h) => {
            out.outcome = "compact".into();
            out.compact_component = Some(subgroup_json(h, lattice));
        }
        LimitSet::Components {
            components,
            records,
        } => {
            out.outcome = "components".into();
            out.components = components
                .iter()
                .map(|(radii, h)| ComponentJson {
                    radii: radii.clone(),
                    subgroup: subgroup_json(h, lattice),
                })
                .collect();
            out.records = records.iter().map(|r| radius_json(r, lattice)).collect();
        }
    }
    emit(&out)
}

#[derive(Serialize)]
struct LeadingPowersReport {
    powers: Vec<Vec<i64>>,
}

fn leading_powers_cmd(pf: &ProblemFile) -> Result<(), Failure> {
    let f = pf
        .build_multi_map()
        .map_err(schema_err)?
        .ok_or_else(|| schema_err("this command needs a multi_map descriptor"))?;
    emit(&LeadingPowersReport {
        powers: leading_powers(&f),
    })
}

#[derive(Serialize)]
struct SequencesReport {
    sequences: Vec<SequenceJson>,
    depth_exceeded: bool,
}

fn sequences_cmd(pf: &ProblemFile, st: &Settings) -> Result<(), Failure> {
    let f = pf
        .build_multi_map()
        .map_err(schema_err)?
        .ok_or_else(|| schema_err("this command needs a multi_map descriptor"))?;
    let res = enumerate_complete_sequences(&f, st.depth).map_err(core_err)?;
    let report = SequencesReport {
        sequences: res.sequences.iter().map(sequence_json).collect(),
        depth_exceeded: res.depth_exceeded,
    };
    emit(&report)?;
    if res.depth_exceeded {
        return Err(Failure {
            code: 5,
            message: "depth bound exceeded; report above is partial".into(),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct GoodDiscReport {
    sequence: SequenceJson,
    disc: GoodDiscJson,
    composed_pole_subspace_matches: bool,
}

fn good_disc_cmd(pf: &ProblemFile, index: usize, n0_cap: usize) -> Result<(), Failure> {
    let f = pf
        .build_multi_map()
        .map_err(schema_err)?
        .ok_or_else(|| schema_err("this command needs a multi_map descriptor"))?;
    let res = enumerate_complete_sequences(&f, 8).map_err(core_err)?;
    let seq = res
        .sequences
        .get(index)
        .ok_or_else(|| schema_err(format!("no sequence with index {index}")))?;
    let disc = good_disc(seq, &f, None, n0_cap).map_err(core_err)?;
    // End-to-end check: the composed curve realizes F_B as its pole space.
    let composed = compose(&f, &disc, disc.m_big * 4 + 8).map_err(core_err)?;
    let matches = match stratify(&composed) {
        Ok(s) => s.f_k() == &seq.f_b,
        Err(CoreError::NoPoles) => seq.f_b.dim() == 0,
        Err(e) => return Err(core_err(e)),
    };
    emit(&GoodDiscReport {
        sequence: sequence_json(seq),
        disc: good_disc_json(&disc, f.l),
        composed_pole_subspace_matches: matches,
    })
}

#[derive(Serialize)]
struct EquidistRow {
    a: f64,
    samples: usize,
    max_non_annihilating: f64,
    min_annihilating: f64,
    pass: bool,
}

#[derive(Serialize)]
struct EquidistComponent {
    target: String,
    radii: Vec<usize>,
    rows: Vec<EquidistRow>,
    monotone_within_noise: bool,
    pass: bool,
}

#[derive(Serialize)]
struct EquidistReport {
    tolerance: f64,
    degree: i64,
    components: Vec<EquidistComponent>,
    pass: bool,
}

fn verify_equidist(
    cli: &Cli,
    pf: &ProblemFile,
    lattice: &Lattice,
    st: &Settings,
) -> Result<(), Failure> {
    let f = need_curve(pf)?;
    let default_grid: Vec<f64> = (5..=10).map(|k| 2f64.powi(-k)).collect();
    let a_grid = parse_a_grid(cli, pf, &default_grid)?;
    let rep = limit_set(&f, lattice, st.prec).map_err(core_err)?;
    let dom = pf.domain(st.samples, st.seed);
    let mut components = Vec::new();
    match &rep.outcome {
        LimitSet::Compact(h) => {
            let rows = equidist_rows(&f, &dom, lattice, h, &a_grid, st, None)?;
            components.push(finish_component("compact closure".into(), vec![], rows, st));
        }
        LimitSet::Components {
            components: comps, ..
        } => {
            let s = rep.stratification.as_ref().expect("non-compact path");
            let a = rep.angles.as_ref().expect("non-compact path");
            let h_row = h_functional(s, a, lattice).map_err(core_err)?;
            let h_f64: Vec<(f64, f64)> =
                h_row.row.iter().map(|c| c.to_f64_pair()).collect();
            let a_bound = pf
                .harness
                .as_ref()
                .and_then(|h| h.sector.as_ref())
                .map(|s| s.a_bound)
                .unwrap_or(1.0);
            for (radii, h) in comps {
                let directions = a.directions.clone();
                let radii_set = radii.clone();
                let filter = move |x: (f64, f64)| {
                    // Nearest almost-Γ-radius must be in the retained set.
                    let arg = x.1.atan2(x.0).rem_euclid(std::f64::consts::TAU);
                    let mut best = (f64::INFINITY, usize::MAX);
                    for (p, th) in directions.iter().enumerate() {
                        let mut d = (arg - th).abs();
                        d = d.min(std::f64::consts::TAU - d);
                        if d < best.0 {
                            best = (d, p);
                        }
                    }
                    radii_set.contains(&best.1)
                };
                let rows = equidist_rows(
                    &f,
                    &dom,
                    lattice,
                    h,
                    &a_grid,
                    st,
                    Some((&filter, &h_f64, a_bound)),
                )?;
                components.push(finish_component(
                    "Γ-radius component".into(),
                    radii.clone(),
                    rows,
                    st,
                ));
            }
        }
        LimitSet::SinglePoint(_) | LimitSet::Empty { .. } => {
            return Err(schema_err(
                "verify-equidist needs a non-trivial limit set (closure is a point or empty)",
            ));
        }
    }
    let pass = components.iter().all(|c| c.pass);
    let report = EquidistReport {
        tolerance: st.tolerance,
        degree: st.degree,
        components,
        pass,
    };
    if cli.format == Format::Csv {
        let mut out = String::from("component,a,max_non_annihilating,min_annihilating,pass\n");
        for c in &report.components {
            for r in &c.rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.target, r.a, r.max_non_annihilating, r.min_annihilating, r.pass
                ));
            }
        }
        print!("{out}");
        return Ok(());
    }
    emit(&report)
}

type SectorFilter<'a> = (&'a dyn Fn((f64, f64)) -> bool, &'a [(f64, f64)], f64);

fn equidist_rows(
    f: &limitflow_core::curve::LaurentCurve,
    dom: &harness::SampleDomain,
    lattice: &Lattice,
    h: &ClosedSubgroup,
    a_grid: &[f64],
    st: &Settings,
    sector: Option<SectorFilter>,
) -> Result<Vec<EquidistRow>, Failure> {
    let mut rows = Vec::new();
    for &a in a_grid {
        let mu = match &sector {
            None => sample_mu_a(f, dom, (a, 0.0), lattice).map_err(core_err)?,
            Some((angle_filter, h_row, a_bound)) => {
                let h_row = h_row.to_vec();
                let a_bound = *a_bound;
                let full = move |x: (f64, f64)| {
                    if !angle_filter(x) {
                        return false;
                    }
                    // |Im H(f(x))| < A
                    let val = f.eval_f64(x);
                    let mut im = 0.0;
                    for (z, c) in val.iter().zip(&h_row) {
                        im += c.0 * z.1 + c.1 * z.0;
                    }
                    im.abs() < a_bound
                };
                sample_mu_a_filtered(f, dom, (a, 0.0), lattice, Some(&full))
                    .map_err(core_err)?
            }
        };
        let w = weyl_test(&mu, h, lattice, st.degree, st.tolerance).map_err(core_err)?;
        rows.push(EquidistRow {
            a,
            samples: w.samples,
            max_non_annihilating: w.max_non_annihilating,
            min_annihilating: w.min_annihilating,
            pass: w.max_non_annihilating <= st.tolerance,
        });
    }
    Ok(rows)
}

fn finish_component(
    target: String,
    radii: Vec<usize>,
    rows: Vec<EquidistRow>,
    st: &Settings,
) -> EquidistComponent {
    let monotone = rows.windows(2).all(|w| {
        let noise = 1.0 / (w[0].samples.max(1) as f64).sqrt();
        w[1].max_non_annihilating <= (2.0 * w[0].max_non_annihilating).max(2.0 * noise)
    });
    let pass = rows
        .last()
        .map(|r| r.max_non_annihilating <= st.tolerance)
        .unwrap_or(false)
        && monotone;
    EquidistComponent {
        target,
        radii,
        rows,
        monotone_within_noise: monotone,
        pass,
    }
}

#[derive(Serialize)]
struct MassCheckReport {
    lambda0: f64,
    rows: Vec<harness::MassRow>,
    error_slope: Option<f64>,
    sector: Option<harness::SectorMassReport>,
}

fn mass_check_cmd(
    cli: &Cli,
    pf: &ProblemFile,
    lattice: &Lattice,
    st: &Settings,
) -> Result<(), Failure> {
    let f = need_curve(pf)?;
    let default_grid: Vec<f64> = (4..=8).map(|k| 2f64.powi(-k)).collect();
    let a_grid = parse_a_grid(cli, pf, &default_grid)?;
    let dom = pf.domain(st.samples, st.seed);
    let base = mass_check(&f, &dom, lattice, &a_grid).map_err(core_err)?;
    if let Some(path) = &cli.dump_samples {
        let mu = sample_mu_a(&f, &dom, (a_grid[0], 0.0), lattice).map_err(core_err)?;
        std::fs::write(path, mu.to_csv())
            .map_err(|e| schema_err(format!("cannot write {path}: {e}")))?;
    }
    // Sector variant when the problem declares one.
    let sector = if let Some(cfg) = pf.harness.as_ref().and_then(|h| h.sector.as_ref()) {
        let s = stratify(&f).map_err(core_err)?;
        let AnglesOutcome::Radii(a) = kappa_and_angles(&s, lattice).map_err(core_err)? else {
            return Err(schema_err("sector mass check needs an almost-Γ-radius"));
        };
        let h = h_functional(&s, &a, lattice).map_err(core_err)?;
        let h_f64: Vec<(f64, f64)> = h.row.iter().map(|c| c.to_f64_pair()).collect();
        Some(
            sector_mass_check(
                &f,
                &dom,
                &a_grid,
                &h_f64,
                cfg.a_bound,
                a.d_kappa,
                &a.directions,
                cfg.p,
            )
            .map_err(core_err)?,
        )
    } else {
        None
    };
    let report = MassCheckReport {
        lambda0: base.lambda0,
        rows: base.rows,
        error_slope: base.error_slope,
        sector,
    };
    if cli.format == Format::Csv {
        let mut out = String::from("a,mass,ratio\n");
        for r in &report.rows {
            out.push_str(&format!("{},{},{}\n", r.a, r.mass, r.ratio));
        }
        print!("{out}");
        return Ok(());
    }
    emit(&report)
}

#[derive(Serialize)]
struct ScanResult {
    name: String,
    report: harness::ClusterReport,
}

#[derive(Serialize)]
struct ClusterScanReport {
    scans: Vec<ScanResult>,
}

fn cluster_scan_cmd(pf: &ProblemFile, lattice: &Lattice, st: &Settings) -> Result<(), Failure> {
    let map = pf
        .build_polymap()
        .map_err(schema_err)?
        .ok_or_else(|| schema_err("this command needs a polymap descriptor"))?;
    let Some(h) = &pf.harness else {
        return Err(schema_err("cluster-scan needs a harness section with scans"));
    };
    let mut out = Vec::new();
    for scan in &h.scans {
        let region = scan.region(st.samples, st.seed);
        let predicted = build_predicted(scan, lattice)?;
        let delta = scan.delta.unwrap_or(0.1);
        let rep = cluster_scan(&map, &region, lattice, &predicted, delta).map_err(core_err)?;
        out.push(ScanResult {
            name: scan.name.clone(),
            report: rep,
        });
    }
    emit(&ClusterScanReport { scans: out })
}

fn build_predicted(
    scan: &problem::ScanSpec,
    lattice: &Lattice,
) -> Result<Predicted, Failure> {
    let Some(spec) = &scan.predicted else {
        return Ok(Predicted::None);
    };
    let rows = spec
        .direction_real
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| {
                    s.parse::<limitflow_core::exact::GaussianRational>()
                        .map(|g| g.re)
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(schema_err)?;
    let dir = RealSubspaceExact::span(&rows).map_err(core_err)?;
    let base = match &spec.base_real {
        None => AmbientPoint::zero(lattice.real_dim()),
        Some(b) => AmbientPoint::Exact(
            b.iter()
                .map(|s| {
                    s.parse::<limitflow_core::exact::GaussianRational>()
                        .map(|g| g.re)
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(schema_err)?,
        ),
    };
    match &spec.curve {
        None => {
            let subgroup = lattice
                .subgroup_closure(&RealSubspace::Exact(dir), &base)
                .map_err(core_err)?;
            Ok(Predicted::Subgroup(subgroup))
        }
        Some(c) => {
            // Augment the direction with the curve coordinate plane, so
            // the subgroup distance measures only transverse escape.
            let mut rows = dir.basis_rows();
            let m = lattice.real_dim();
            for k in [2 * c.coord, 2 * c.coord + 1] {
                let mut e = vec![limitflow_core::exact::rat_int(0); m];
                e[k] = limitflow_core::exact::rat_int(1);
                rows.push(e);
            }
            let aug = RealSubspaceExact::span(&rows).map_err(core_err)?;
            let subgroup_aug = lattice
                .subgroup_closure(&RealSubspace::Exact(aug), &base)
                .map_err(core_err)?;
            let poly = c
                .poly
                .iter()
                .map(|x| x.to_f64().map_err(schema_err))
                .collect::<Result<Vec<_>, _>>()?;
            let frac: limitflow_core::exact::GaussianRational =
                c.dir_pi.parse().map_err(schema_err)?;
            let (fr, _) = frac.to_f64_pair();
            Ok(Predicted::SubgroupPlusCurve {
                subgroup_aug,
                coord: c.coord,
                poly,
                dir_angle: std::f64::consts::PI * fr,
                shell: c.shell,
            })
        }
    }
}

#[derive(Serialize)]
struct AlwReport {
    input_dim: usize,
    hull: SubgroupJson,
}

fn alw_hull_cmd(pf: &ProblemFile, lattice: &Lattice) -> Result<(), Failure> {
    // Either an explicit subspace, or the pole subspace F_k of the curve.
    let sub = if let Some(s) = pf.build_subspace().map_err(schema_err)? {
        s
    } else {
        let f = need_curve(pf)?;
        let s = stratify(&f).map_err(core_err)?;
        s.f_k().clone()
    };
    let h = curve::alw_hull(&sub, lattice).map_err(core_err)?;
    emit(&AlwReport {
        input_dim: sub.dim(),
        hull: subgroup_json(&h, lattice),
    })
}
