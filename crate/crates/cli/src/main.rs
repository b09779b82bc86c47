//! `fkg-lab`: command-line front end for exact E_n computation and the
//! verification harness.

mod args;
mod input;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use fkg_core::engine::{en, Backend, EnResult, MomentTable, StaircaseOracle};
use fkg_core::lattice::StaircaseSeq;
use fkg_core::rational::{serde_pq, serde_pq_vec, to_pq};
use fkg_core::series::{extract_en_via_series, geometric_mean_coeffs, PrimesEncoding};
use fkg_core::verify::{
    argmin_structure, check_proposition, exhaustive_scan, random_scan, random_staircase,
    rectangle_scan, seeded_rng, ArgminReport, PropCheckReport, PropId, ScanOptions, ScanReport,
    ScanTarget,
};
use fkg_core::{Error, Rational};
use serde::Serialize;

use args::{
    BenchCommand, Cli, Command, ComputeArgs, GlobalOpts, SearchCommand, SeriesCommand, VerifyArgs,
};
use input::Input;
use output::{Report, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Input(String),
    Io(String),
    /// A checked property failed; the report has already been written.
    Property(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Property(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::InvalidStaircase(_)
                | Error::MismatchedResolution(..)
                | Error::InvalidArgument(_) => 2,
                Error::CapExceeded { .. } | Error::BudgetExceeded { .. } => 3,
                Error::Invariant(_) => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "invalid input: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Property(s) => write!(f, "property failure: {s}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    if g.list_limit == 0 {
        return Err(CliError::Input("--list-limit must be at least 1".into()));
    }
    match cli.command {
        Command::Compute(a) => compute(&g, a),
        Command::Verify(a) => verify(&g, a),
        Command::Search(c) => search(&g, c),
        Command::Series(c) => series(&g, c),
        Command::Bench(c) => bench(&g, c),
    }
}

fn scan_options(g: &GlobalOpts) -> ScanOptions {
    ScanOptions {
        budget: g.budget,
        workers: g.workers,
        list_limit: g.list_limit,
    }
}

fn compute(g: &GlobalOpts, a: ComputeArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::new("compute", None, g);
    cfg.input = Some(a.input.display().to_string());
    cfg.backend = Some(a.backend.to_string());
    let mut input = Input::read(&a.input)?;
    if let Some(n) = a.n {
        input = input.take(n)?;
    }
    cfg.n = Some(input.len().to_string());
    let result: EnResult = input.evaluate(a.backend)?;
    let rows = vec![vec![
        to_pq(&result.value),
        result.backend.to_string(),
        result.terms.to_string(),
    ]];
    Report {
        config: cfg,
        result,
        header: vec!["value", "backend", "terms"],
        rows,
    }
    .emit(g)
}

#[derive(Serialize)]
struct VerifySummary {
    passed: bool,
    reports: Vec<PropCheckReport>,
}

fn verify(g: &GlobalOpts, a: VerifyArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::new("verify", None, g);
    cfg.m = Some(a.m);
    cfg.n = Some(a.n.to_string());
    let props: Vec<PropId> = match a.prop {
        Some(p) => {
            cfg.prop = Some(p.to_string());
            vec![p]
        }
        None => {
            cfg.prop = Some("all".into());
            PropId::ALL.to_vec()
        }
    };
    let opts = scan_options(g);
    let mut reports = Vec::new();
    for p in props {
        let r = check_proposition(p, a.m, a.n, &opts)?;
        eprintln!(
            "{:<10} m={} n={} instances={:<8} failures={:<4} {}",
            r.prop.as_str(),
            r.m,
            r.n,
            r.instances_checked,
            r.failure_count,
            if r.passed() { "ok" } else { "FAIL" }
        );
        reports.push(r);
    }
    let passed = reports.iter().all(PropCheckReport::passed);
    let mut rows = Vec::new();
    for r in &reports {
        let base = vec![
            r.prop.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.instances_checked.to_string(),
            r.failure_count.to_string(),
        ];
        if r.failures.is_empty() {
            rows.push([base.clone(), vec![String::new(); 6]].concat());
        }
        for f in &r.failures {
            let funcs: Vec<String> = f.functions.iter().map(|s| s.to_string()).collect();
            let set = f
                .set
                .as_ref()
                .map(|s| {
                    s.cells()
                        .map(|(i, j)| format!("({i},{j})"))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .unwrap_or_default();
            rows.push(
                [
                    base.clone(),
                    vec![
                        funcs.join(" "),
                        set,
                        f.descent.map(|d| d.to_string()).unwrap_or_default(),
                        f.relation.clone(),
                        to_pq(&f.lhs),
                        to_pq(&f.rhs),
                    ],
                ]
                .concat(),
            );
        }
    }
    let header = vec![
        "prop",
        "m",
        "n",
        "instances",
        "failures",
        "functions",
        "set",
        "descent",
        "relation",
        "lhs",
        "rhs",
    ];
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.prop.to_string())
        .collect();
    Report {
        config: cfg,
        result: VerifySummary { passed, reports },
        header,
        rows,
    }
    .emit(g)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Property(format!(
            "counterexamples found for {}",
            failed.join(", ")
        )))
    }
}

fn scan_rows(r: &ScanReport) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = r
        .argmin
        .iter()
        .map(|w| vec!["argmin".into(), w.to_string(), to_pq(&r.min_value)])
        .collect();
    rows.extend(
        r.violations
            .iter()
            .map(|v| vec!["violation".into(), v.witness.to_string(), to_pq(&v.value)]),
    );
    rows
}

fn emit_scan(g: &GlobalOpts, cfg: RunConfig, report: ScanReport) -> Result<(), CliError> {
    eprintln!(
        "evaluated={} min={} argmins={} violations={} elapsed={:.3}s",
        report.evaluated,
        to_pq(&report.min_value),
        report.argmin_count,
        report.violation_count,
        report.elapsed.as_secs_f64()
    );
    let rows = scan_rows(&report);
    let theorem_broken = report.target == ScanTarget::En && report.violation_count > 0;
    let count = report.violation_count;
    Report {
        config: cfg,
        result: report,
        header: vec!["kind", "witness", "value"],
        rows,
    }
    .emit(g)?;
    if theorem_broken {
        return Err(CliError::Property(format!("{count} tuples with E_n < 0")));
    }
    Ok(())
}

fn target_name(t: ScanTarget) -> &'static str {
    match t {
        ScanTarget::En => "en",
        ScanTarget::Kappa3 => "kappa3",
    }
}

fn search(g: &GlobalOpts, c: SearchCommand) -> Result<(), CliError> {
    let opts = scan_options(g);
    match c {
        SearchCommand::Exhaustive { m, n, target } => {
            let mut cfg = RunConfig::new("search", Some("exhaustive"), g);
            cfg.m = Some(m);
            cfg.n = Some(n.to_string());
            cfg.target = Some(target_name(target).into());
            emit_scan(g, cfg, exhaustive_scan(m, n, target, &opts)?)
        }
        SearchCommand::Random { m, n, trials } => {
            let mut cfg = RunConfig::new("search", Some("random"), g);
            cfg.m = Some(m);
            cfg.n = Some(n.to_string());
            cfg.trials = Some(trials);
            cfg.target = Some("en".into());
            emit_scan(g, cfg, random_scan(m, n, trials, g.seed, &opts)?)
        }
        SearchCommand::Kappa3 { m } => {
            let mut cfg = RunConfig::new("search", Some("kappa3"), g);
            cfg.m = Some(m);
            cfg.n = Some("3".into());
            cfg.target = Some("kappa3".into());
            emit_scan(g, cfg, exhaustive_scan(m, 3, ScanTarget::Kappa3, &opts)?)
        }
        SearchCommand::Rectangle { k, n, trials } => {
            let mut cfg = RunConfig::new("search", Some("rectangle"), g);
            cfg.k = Some(k);
            cfg.n = Some(n.to_string());
            cfg.trials = Some(trials);
            cfg.target = Some("en".into());
            emit_scan(g, cfg, rectangle_scan(k, n, trials, g.seed, &opts)?)
        }
        SearchCommand::Argmin { m, n } => {
            let mut cfg = RunConfig::new("search", Some("argmin"), g);
            cfg.m = Some(m);
            cfg.n = Some(n.to_string());
            let r: ArgminReport = argmin_structure(m, n, &opts)?;
            eprintln!(
                "minimizers={} extremal={} min={} max_lambda={} all_constant={}",
                r.minimizer_count,
                r.extremal_count,
                to_pq(&r.min_value),
                to_pq(&r.max_lambda),
                r.all_constant
            );
            let rows = r
                .extremal
                .iter()
                .map(|w| vec!["extremal".into(), w.to_string(), to_pq(&r.min_value)])
                .collect();
            let all_constant = r.all_constant;
            Report {
                config: cfg,
                result: r,
                header: vec!["kind", "witness", "value"],
                rows,
            }
            .emit(g)?;
            if all_constant {
                Ok(())
            } else {
                Err(CliError::Property(
                    "an extremal tuple has a non-constant sequence".into(),
                ))
            }
        }
    }
}

#[derive(Serialize)]
struct CoeffReport {
    degree: usize,
    #[serde(with = "serde_pq_vec")]
    coeffs: Vec<Rational>,
}

#[derive(Serialize)]
struct EquivReport {
    n: usize,
    exponents: Vec<u64>,
    target: u64,
    #[serde(with = "serde_pq")]
    coefficient: Rational,
    #[serde(with = "serde_pq")]
    direct: Rational,
    agrees: bool,
}

fn series(g: &GlobalOpts, c: SeriesCommand) -> Result<(), CliError> {
    match c {
        SeriesCommand::Gmean { input, degree } => {
            let mut cfg = RunConfig::new("series", Some("gmean"), g);
            cfg.input = Some(input.display().to_string());
            cfg.degree = Some(degree);
            let fs = Input::read(&input)?.grid_functions()?;
            cfg.n = Some(fs.len().to_string());
            let coeffs = geometric_mean_coeffs(&fs, degree)?;
            let rows = coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| vec![(i + 1).to_string(), to_pq(c)])
                .collect();
            Report {
                config: cfg,
                result: CoeffReport { degree, coeffs },
                header: vec!["power", "coeff"],
                rows,
            }
            .emit(g)
        }
        SeriesCommand::Equiv {
            input,
            n,
            allow_large,
        } => {
            let mut cfg = RunConfig::new("series", Some("equiv"), g);
            cfg.input = Some(input.display().to_string());
            cfg.n = Some(n.to_string());
            cfg.allow_large = Some(allow_large);
            let input = Input::read(&input)?.take(n)?;
            let fs = input.grid_functions()?;
            let coefficient = extract_en_via_series(&fs, allow_large)?;
            let direct = input.evaluate(Backend::Partition)?.value;
            let enc = PrimesEncoding::new(n)?;
            let agrees = coefficient == direct;
            let rows = vec![vec![
                n.to_string(),
                enc.target.to_string(),
                to_pq(&coefficient),
                to_pq(&direct),
            ]];
            let report = EquivReport {
                n,
                exponents: enc.exponents,
                target: enc.target,
                coefficient,
                direct,
                agrees,
            };
            Report {
                config: cfg,
                result: report,
                header: vec!["n", "target", "coefficient", "direct"],
                rows,
            }
            .emit(g)?;
            if agrees {
                Ok(())
            } else {
                Err(CliError::Property(
                    "series coefficient differs from E_n".into(),
                ))
            }
        }
    }
}

#[derive(Serialize)]
struct BackendTiming {
    n: usize,
    backend: Backend,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    terms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    millis: f64,
}

#[derive(Serialize)]
struct OracleTiming {
    m: usize,
    n: usize,
    moments: usize,
    millis: f64,
}

fn random_oracle(m: usize, n: usize, seed: u64) -> Result<StaircaseOracle, CliError> {
    let mut rng = seeded_rng(seed);
    let seqs: Vec<StaircaseSeq> = (0..n).map(|_| random_staircase(m, &mut rng)).collect();
    Ok(StaircaseOracle::new(seqs)?)
}

fn bench(g: &GlobalOpts, c: BenchCommand) -> Result<(), CliError> {
    match c {
        BenchCommand::Backends { n, m, backend } => {
            let mut cfg = RunConfig::new("bench", Some("backends"), g);
            cfg.m = Some(m);
            cfg.n = Some(format!("{}..{}", n.start(), n.end()));
            let backends = if backend.is_empty() {
                Backend::ALL.to_vec()
            } else {
                backend
            };
            cfg.backend = Some(
                backends
                    .iter()
                    .map(Backend::as_str)
                    .collect::<Vec<_>>()
                    .join(","),
            );
            let mut timings = Vec::new();
            for size in n {
                let oracle = random_oracle(m, size, g.seed)?;
                for &b in &backends {
                    let started = Instant::now();
                    let outcome = en(&oracle, b);
                    let millis = started.elapsed().as_secs_f64() * 1e3;
                    let t = match outcome {
                        Ok(r) => BackendTiming {
                            n: size,
                            backend: b,
                            status: "ok",
                            terms: Some(r.terms),
                            value: Some(to_pq(&r.value)),
                            millis,
                        },
                        Err(Error::CapExceeded { .. }) => BackendTiming {
                            n: size,
                            backend: b,
                            status: "refused",
                            terms: None,
                            value: None,
                            millis,
                        },
                        Err(e) => return Err(e.into()),
                    };
                    eprintln!(
                        "n={:<3} {:<10} {:<8} {:>10.3} ms",
                        t.n,
                        b.as_str(),
                        t.status,
                        t.millis
                    );
                    timings.push(t);
                }
            }
            let rows = timings
                .iter()
                .map(|t| {
                    vec![
                        t.n.to_string(),
                        t.backend.to_string(),
                        t.status.to_string(),
                        t.terms.map(|x| x.to_string()).unwrap_or_default(),
                        t.value.clone().unwrap_or_default(),
                        format!("{:.3}", t.millis),
                    ]
                })
                .collect();
            let header = vec!["n", "backend", "status", "terms", "value", "millis"];
            Report {
                config: cfg,
                result: timings,
                header,
                rows,
            }
            .emit(g)
        }
        BenchCommand::Oracle { m, n } => {
            let mut cfg = RunConfig::new("bench", Some("oracle"), g);
            cfg.m = Some(m);
            cfg.n = Some(n.to_string());
            if m == 0 {
                return Err(CliError::Input("--m must be at least 1".into()));
            }
            let oracle = random_oracle(m, n, g.seed)?;
            let started = Instant::now();
            let table = MomentTable::build(&oracle)?;
            let millis = started.elapsed().as_secs_f64() * 1e3;
            let moments = (1usize << table.n()) - 1;
            eprintln!("m={m} n={n} moments={moments} {millis:.3} ms");
            let rows = vec![vec![
                m.to_string(),
                n.to_string(),
                moments.to_string(),
                format!("{millis:.3}"),
            ]];
            let result = OracleTiming {
                m,
                n,
                moments,
                millis,
            };
            Report {
                config: cfg,
                result,
                header: vec!["m", "n", "moments", "millis"],
                rows,
            }
            .emit(g)
        }
    }
}
