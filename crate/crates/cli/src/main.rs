//! `swaplab`: reduce Max 2-SAT formulas to facility-location or k-means
//! instances, run exact local search on any of the three problems, verify
//! the reductions' guarantees by brute force, and embed k-means tables into
//! Euclidean coordinates.
//!
//! Exit codes: 0 on success, 1 when a verified claim is violated, 2 on
//! usage or input errors.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use swaplab_core::doc::{self, InstanceMeta, LoadedInstance};
use swaplab_core::embed;
use swaplab_core::oracle::{self, OracleReport, ReductionTarget, DEFAULT_SIZE_CAP};
use swaplab_core::rational::{format_rational, parse_rational};
use swaplab_core::reduce::{self, ReductionParams};
use swaplab_core::sat::{parse_wcnf, Assignment, SatInstance};
use swaplab_core::search::{DkmSwap, MuflSwap, SatFlip};
use swaplab_core::{
    local_search, DkmInstance, MuflInstance, PivotRule, SearchConfig, SolutionSet, Trajectory,
};

use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "swaplab",
    version,
    about = "Exact local-search laboratory for Max 2-SAT, facility location, and k-means"
)]
struct Cli {
    /// Seed for randomized start solutions and instance generation
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Numerical tolerance for embedding decisions
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Path for the produced artifact (instance, report, ...)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Path for the trajectory log written by `solve`
    #[arg(long, global = true)]
    log: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Mufl,
    Dkm,
}

impl Target {
    fn to_reduction(self) -> ReductionTarget {
        match self {
            Target::Mufl => ReductionTarget::Mufl,
            Target::Dkm => ReductionTarget::Dkm,
        }
    }

    fn name(self) -> &'static str {
        self.to_reduction().name()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetOrBoth {
    Mufl,
    Dkm,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PivotArg {
    Best,
    First,
}

impl PivotArg {
    fn to_rule(self) -> PivotRule {
        match self {
            PivotArg::Best => PivotRule::BestImprovement,
            PivotArg::First => PivotRule::FirstImprovement,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a facility-location or k-means instance from a WCNF formula
    Reduce {
        /// Problem to reduce to
        #[arg(long, value_enum)]
        target: Target,
        /// Separation parameter, a rational strictly between 1 and 2
        #[arg(long, default_value = "3/2")]
        c: String,
        /// Input formula (WCNF dialect)
        input: PathBuf,
    },
    /// Run local search on a WCNF formula or an instance document
    Solve {
        /// Pivot rule
        #[arg(long, value_enum, default_value = "best")]
        pivot: PivotArg,
        /// Start solution: `all-open`, `all-false`, `all-true`, `random`,
        /// a 0/1 assignment string, or comma-separated site labels
        #[arg(long)]
        start: Option<String>,
        /// Stop after this many improving steps
        #[arg(long)]
        max_steps: Option<u64>,
        /// Input: WCNF formula or instance JSON
        input: PathBuf,
    },
    /// Exhaustively verify the reduction claims for one formula
    Verify {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, default_value = "3/2")]
        c: String,
        /// Check the claims against this instance document instead of the
        /// freshly built reduction (for auditing externally produced files)
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Maximum number of solutions an exhaustive scan may visit
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: u128,
        /// Input formula (WCNF dialect)
        input: PathBuf,
    },
    /// Embed a k-means instance document into Euclidean coordinates
    Embed {
        /// Instance JSON of kind `dkm`
        input: PathBuf,
    },
    /// Run verification campaigns over seeded random formulas
    Oracle {
        /// Number of random instances to verify
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = 4)]
        num_vars: u32,
        #[arg(long, default_value_t = 6)]
        num_clauses: usize,
        #[arg(long, default_value_t = 9)]
        max_weight: u64,
        #[arg(long, value_enum, default_value = "both")]
        target: TargetOrBoth,
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        cap: u128,
        #[arg(long, default_value = "3/2")]
        c: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Reduce { target, c, input } => cmd_reduce(&cli, *target, c, input),
        Command::Solve {
            pivot,
            start,
            max_steps,
            input,
        } => cmd_solve(&cli, *pivot, start.as_deref(), *max_steps, input),
        Command::Verify {
            target,
            c,
            instance,
            cap,
            input,
        } => cmd_verify(&cli, *target, c, instance.as_deref(), *cap, input),
        Command::Embed { input } => cmd_embed(&cli, input),
        Command::Oracle {
            count,
            num_vars,
            num_clauses,
            max_weight,
            target,
            cap,
            c,
        } => cmd_oracle(
            &cli,
            *count,
            *num_vars,
            *num_clauses,
            *max_weight,
            *target,
            *cap,
            c,
        ),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_wcnf(path: &Path) -> Result<SatInstance> {
    let text = read_to_string(path)?;
    parse_wcnf(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_params(c: &str) -> Result<ReductionParams> {
    let c = parse_rational(c)?;
    Ok(ReductionParams::new(c)?)
}

fn cmd_reduce(cli: &Cli, target: Target, c: &str, input: &Path) -> Result<ExitCode> {
    let sat = load_wcnf(input)?;
    let params = parse_params(c)?;
    let (json, summary) = match target {
        Target::Mufl => {
            let instance = reduce::mufl::build(&sat, &params)?;
            let meta = InstanceMeta::for_mufl(&sat, params.c());
            let json = doc::mufl_to_json(&instance, Some(meta))?;
            let summary = format!(
                "kind: mufl\nsites: {}\nfacilities: {}\nclients: {}\nopening_cost: 2",
                instance.num_sites(),
                instance.num_facilities(),
                instance.num_clients(),
            );
            (json, summary)
        }
        Target::Dkm => {
            let instance = reduce::dkm::build(&sat, &params)?;
            let meta = InstanceMeta::for_dkm(&sat, params.c());
            let eps = meta.eps.clone().expect("dkm meta carries eps");
            let json = doc::dkm_to_json(&instance, Some(meta))?;
            let summary = format!(
                "kind: dkm\nsites: {}\nK: {}\neps: {}",
                instance.num_points(),
                instance.k(),
                eps,
            );
            (json, summary)
        }
    };
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| input.with_extension(format!("{}.json", target.name())));
    std::fs::write(&out, &json).with_context(|| format!("writing {}", out.display()))?;
    println!("{summary}");
    println!("wrote: {}", out.display());
    RunManifest::new(
        "reduce",
        json!({
            "target": target.name(),
            "c": format_rational(params.c()),
            "seed": cli.seed,
            "tol": cli.tol,
        }),
    )
    .input(input)
    .output(&out)
    .write_next_to(&out)?;
    Ok(ExitCode::SUCCESS)
}

/// What `solve` is about to run on, after sniffing the input.
enum SolveProblem {
    Sat(SatInstance),
    Mufl(MuflInstance),
    Dkm(DkmInstance),
}

fn sniff_input(path: &Path) -> Result<SolveProblem> {
    let text = read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        match doc::from_json(&text)? {
            LoadedInstance::Mufl(instance, _) => Ok(SolveProblem::Mufl(instance)),
            LoadedInstance::Dkm(instance, _) => Ok(SolveProblem::Dkm(instance)),
        }
    } else {
        Ok(SolveProblem::Sat(parse_wcnf(&text)?))
    }
}

fn parse_site_list(spec: &str, labels: &[String]) -> Result<SolutionSet> {
    let mut members = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        let index = labels
            .iter()
            .position(|l| l == token)
            .ok_or_else(|| anyhow!("`{token}` does not name a selectable site"))?;
        members.push(index);
    }
    Ok(SolutionSet::from_members(members))
}

fn sat_start(spec: &str, num_vars: u32, seed: u64) -> Result<Assignment> {
    use rand::SeedableRng;
    match spec {
        "all-false" => Ok(Assignment::all_false(num_vars)),
        "all-true" => Ok(Assignment::all_true(num_vars)),
        "random" => Ok(Assignment::random(
            num_vars,
            &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed),
        )),
        "all-open" => bail!("`all-open` applies to facility sets, not assignments"),
        bits => bits
            .parse::<Assignment>()
            .map_err(|_| anyhow!("`{bits}` is not a 0/1 assignment string")),
    }
}

fn mufl_start(spec: &str, instance: &MuflInstance, seed: u64) -> Result<SolutionSet> {
    use rand::SeedableRng;
    match spec {
        "all-open" => Ok(SolutionSet::from_members(0..instance.num_facilities())),
        "random" => Ok(SolutionSet::random_nonempty(
            instance.num_facilities(),
            &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed),
        )),
        labels => {
            let facility_labels: Vec<String> = instance
                .facilities()
                .iter()
                .map(|&site| instance.site_labels()[site].clone())
                .collect();
            parse_site_list(labels, &facility_labels)
        }
    }
}

fn dkm_start(spec: &str, instance: &DkmInstance, seed: u64) -> Result<SolutionSet> {
    use rand::SeedableRng;
    match spec {
        "all-open" => {
            if instance.k() == instance.num_points() {
                Ok(SolutionSet::from_members(0..instance.num_points()))
            } else {
                bail!(
                    "`all-open` is infeasible: the instance requires exactly K = {} of {} points",
                    instance.k(),
                    instance.num_points()
                )
            }
        }
        "random" => Ok(SolutionSet::random_k_subset(
            instance.num_points(),
            instance.k(),
            &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed),
        )),
        labels => parse_site_list(labels, instance.labels()),
    }
}

fn format_sites(open: &SolutionSet, labels: &[String]) -> String {
    let names: Vec<&str> = open.iter().map(|i| labels[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn cmd_solve(
    cli: &Cli,
    pivot: PivotArg,
    start: Option<&str>,
    max_steps: Option<u64>,
    input: &Path,
) -> Result<ExitCode> {
    let config = SearchConfig {
        pivot_rule: pivot.to_rule(),
        max_steps,
        seed: cli.seed,
    };
    match sniff_input(input)? {
        SolveProblem::Sat(instance) => {
            let start = sat_start(start.unwrap_or("all-false"), instance.num_vars(), cli.seed)?;
            let problem = SatFlip {
                instance: &instance,
            };
            let trajectory = local_search(&problem, start, &config)?;
            report_solve(
                cli,
                "sat",
                &trajectory,
                |t: &Assignment| t.to_string(),
                input,
                &config,
            )
        }
        SolveProblem::Mufl(instance) => {
            let start = mufl_start(start.unwrap_or("all-open"), &instance, cli.seed)?;
            let problem = MuflSwap {
                instance: &instance,
            };
            let trajectory = local_search(&problem, start, &config)?;
            report_solve(
                cli,
                "mufl",
                &trajectory,
                |o| format_sites(o, instance.site_labels()),
                input,
                &config,
            )
        }
        SolveProblem::Dkm(instance) => {
            let start = dkm_start(start.unwrap_or("random"), &instance, cli.seed)?;
            let problem = DkmSwap {
                instance: &instance,
            };
            let trajectory = local_search(&problem, start, &config)?;
            report_solve(
                cli,
                "dkm",
                &trajectory,
                |o| format_sites(o, instance.labels()),
                input,
                &config,
            )
        }
    }?;
    Ok(ExitCode::SUCCESS)
}

fn report_solve<S, C: std::fmt::Display>(
    cli: &Cli,
    kind: &str,
    trajectory: &Trajectory<S, C>,
    show: impl Fn(&S) -> String,
    input: &Path,
    config: &SearchConfig,
) -> Result<()> {
    println!("problem: {kind}");
    println!(
        "start: {} cost: {}",
        show(&trajectory.start),
        trajectory.start_cost
    );
    println!(
        "final: {} cost: {}",
        show(trajectory.final_solution()),
        trajectory.final_cost()
    );
    println!("steps: {}", trajectory.num_steps());
    println!("terminated: {}", trajectory.terminated);
    println!("local_optimum: {}", trajectory.reached_local_optimum());
    if let Some(log) = &cli.log {
        let mut buffer = Vec::new();
        trajectory.write_log(&mut buffer)?;
        std::fs::write(log, buffer).with_context(|| format!("writing {}", log.display()))?;
        RunManifest::new(
            "solve",
            json!({
                "kind": kind,
                "pivot": config.pivot_rule.to_string(),
                "seed": config.seed,
                "max_steps": config.max_steps,
            }),
        )
        .input(input)
        .output(log)
        .write_next_to(log)?;
    }
    Ok(())
}

fn print_report(report: &OracleReport) -> Result<()> {
    println!(
        "target: {}  N={} M={} c={}",
        report.target, report.num_vars, report.num_clauses, report.c
    );
    println!("solutions scanned: {}", report.solutions_scanned);
    println!(
        "local optima: {} (reasonable: {})",
        report.local_optima, report.reasonable_local_optima
    );
    println!("violations: {}", report.violations.len());
    for violation in &report.violations {
        println!("  {}: {}", violation.claim, violation.witness);
    }
    println!("{}", serde_json::to_string(report)?);
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    target: Target,
    c: &str,
    instance: Option<&Path>,
    cap: u128,
    input: &Path,
) -> Result<ExitCode> {
    let sat = load_wcnf(input)?;
    let params = parse_params(c)?;
    let report = match instance {
        None => oracle::verify_reduction(&sat, &params, target.to_reduction(), cap)?,
        Some(path) => {
            let loaded = doc::from_json(&read_to_string(path)?)?;
            match (target, loaded) {
                (Target::Mufl, LoadedInstance::Mufl(reduced, _)) => {
                    oracle::verify_mufl_claims(&sat, &params, &reduced, cap)?
                }
                (Target::Dkm, LoadedInstance::Dkm(reduced, _)) => {
                    oracle::verify_dkm_claims(&sat, &params, &reduced, cap)?
                }
                _ => bail!("instance document kind does not match --target"),
            }
        }
    };
    print_report(&report)?;
    if let Some(out) = &cli.out {
        let body = serde_json::to_string_pretty(&report)? + "\n";
        std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))?;
        RunManifest::new(
            "verify",
            json!({
                "target": report.target,
                "c": report.c,
                "cap": cap.to_string(),
                "seed": cli.seed,
            }),
        )
        .input(input)
        .output(out)
        .write_next_to(out)?;
    }
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_embed(cli: &Cli, input: &Path) -> Result<ExitCode> {
    let text = read_to_string(input)?;
    let (instance, meta) = match doc::from_json(&text)? {
        LoadedInstance::Dkm(instance, meta) => (instance, meta),
        LoadedInstance::Mufl(..) => bail!("embed expects an instance of kind `dkm`"),
    };
    warn_when_gaps_near_tolerance(&instance, cli.tol);
    let table = instance.distances().to_f64_matrix();
    let embedded = embed::embed_squared_euclidean(&table, cli.tol)?;
    println!("dimension: {}", embedded.dimension);
    println!("reconstruction_error: {:e}", embedded.reconstruction_error);

    let bound_ok = match &meta {
        Some(meta) => {
            let bound = meta.n.max(meta.m as u32).saturating_sub(1) as usize;
            let ok = embedded.dimension >= bound;
            println!(
                "dimension_bound: max{{N,M}}-1 = {bound}: {}",
                if ok { "satisfied" } else { "violated" }
            );
            ok
        }
        None => {
            println!("dimension_bound: skipped (no meta)");
            true
        }
    };

    let updated = instance.with_coords(embedded.coords.clone())?;
    let out = cli.out.clone().unwrap_or_else(|| input.to_path_buf());
    let body = doc::dkm_to_json(&updated, meta)?;
    std::fs::write(&out, body).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote: {}", out.display());
    RunManifest::new("embed", json!({ "tol": cli.tol, "seed": cli.seed }))
        .input(input)
        .output(&out)
        .write_next_to(&out)?;
    Ok(if bound_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// The rank decisions have to resolve eigenvalue gaps on the order of the
/// smallest difference between distinct table entries; warn when that
/// resolution comes close to the configured tolerance.
fn warn_when_gaps_near_tolerance(instance: &DkmInstance, tol: f64) {
    let mut values: Vec<f64> = instance.distances().lower_triangle_f64();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let min_gap = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if min_gap.is_finite() && min_gap < 100.0 * tol {
        eprintln!(
            "warning: minimum distance gap {min_gap:e} is within 100x of tolerance {tol:e}; \
             rank decisions may be unreliable"
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    cli: &Cli,
    count: u64,
    num_vars: u32,
    num_clauses: usize,
    max_weight: u64,
    target: TargetOrBoth,
    cap: u128,
    c: &str,
) -> Result<ExitCode> {
    let params = parse_params(c)?;
    let instance_params = oracle::InstanceParams {
        num_vars,
        num_clauses,
        max_weight,
    };
    let targets: &[ReductionTarget] = match target {
        TargetOrBoth::Mufl => &[ReductionTarget::Mufl],
        TargetOrBoth::Dkm => &[ReductionTarget::Dkm],
        TargetOrBoth::Both => &[ReductionTarget::Mufl, ReductionTarget::Dkm],
    };
    let mut reports = Vec::new();
    let mut total_violations = 0usize;
    for offset in 0..count {
        let seed = cli.seed.wrapping_add(offset);
        let sat = oracle::random_instance(&instance_params, seed);
        for &t in targets {
            let report = oracle::verify_reduction(&sat, &params, t, cap)?;
            println!(
                "seed={seed} target={} N={} M={} scanned={} optima={} violations={}",
                report.target,
                report.num_vars,
                report.num_clauses,
                report.solutions_scanned,
                report.local_optima,
                report.violations.len()
            );
            total_violations += report.violations.len();
            reports.push(report);
        }
    }
    println!(
        "campaign: {} runs, {} violations",
        reports.len(),
        total_violations
    );
    let summary = json!({
        "runs": reports.len(),
        "violations": total_violations,
        "reports": reports,
    });
    println!("{summary}");
    if let Some(out) = &cli.out {
        let body = serde_json::to_string_pretty(&summary)? + "\n";
        std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))?;
        RunManifest::new(
            "oracle",
            json!({
                "count": count,
                "num_vars": num_vars,
                "num_clauses": num_clauses,
                "max_weight": max_weight,
                "cap": cap.to_string(),
                "c": format_rational(params.c()),
                "seed": cli.seed,
            }),
        )
        .output(out)
        .write_next_to(out)?;
    }
    Ok(if total_violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
