use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use witworld::builtins::{builtin_map, builtin_vector, BUILTIN_MAPS, BUILTIN_VECTORS};
use witworld::compose::{effect_check, state_check};
use witworld::json::{assemblage_from_json, assemblage_to_json, effect_input_from_json, vector_from_json};
use witworld::protocols::{
    best_deterministic_chsh, bloch_grid, chsh_value, pr_box_probability, rsp_as_assemblage, rsp_assemblage_deviation,
    rsp_run, PrBoxKit,
};
use witworld::search::bloch_state;
use witworld::steering::{lhs_check, ns_check, named_assemblage, Assemblage, LhsOutcome, NAMED_ASSEMBLAGES};
use witworld::transforms::{positivity_check, quantum_cp_check, trace_condition_check, TraceMode};
use witworld::{Error, GptVector, LinearMap, MembershipVerdict, SearchConfig};

const EXIT_REJECTED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATAERR: u8 = 65;

/// Constructions and membership checks for composite GPT systems.
#[derive(Debug, Parser)]
#[command(name = "witworld", version)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_name = "G")]
    grid: Option<usize>,
    #[arg(long, value_name = "R")]
    restarts: Option<usize>,
    /// Defaults to $WITWORLD_SEED, then 0.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapTest {
    Positivity,
    Cp,
    TracePreserving,
    TraceNonincreasing,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PR-box statistics from the gbit-pair state.
    Prbox,
    /// Remote state preparation of cos(θ/2)|0⟩ + e^{iφ}sin(θ/2)|1⟩.
    Rsp {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        /// Also build the instrumental assemblage on an N-point grid.
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
    },
    /// State-cone membership of a vector (file or builtin:NAME).
    CheckState {
        file: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Effect validity, optionally with a separable certificate.
    CheckEffect {
        file: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Positivity, complete positivity or trace conditions of a map.
    CheckMap {
        file: String,
        #[arg(long, value_enum)]
        test: MapTest,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Build a named assemblage.
    Assemblage {
        name: String,
        #[arg(long)]
        verify_ns: bool,
        #[arg(long)]
        verify_lhs: bool,
        /// Write the assemblage as JSON.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// LHS feasibility of an assemblage (file or builtin:NAME).
    Lhs { file: String },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Unsupported(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Input(_) => EXIT_DATAERR,
            Failure::Unsupported(_) => EXIT_INCONCLUSIVE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Unsupported(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) => Failure::Unsupported(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn verdict_code(v: &MembershipVerdict) -> u8 {
    match v {
        MembershipVerdict::Accepted { .. } => 0,
        MembershipVerdict::Rejected { .. } => EXIT_REJECTED,
        MembershipVerdict::InconclusiveAccept { .. } => EXIT_INCONCLUSIVE,
    }
}

/// `-0.0000` reads badly.
fn fixed(x: f64, places: usize) -> String {
    let s = format!("{x:.places$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn verdict_text(v: &MembershipVerdict) -> String {
    let mut out = format!("verdict: {} (margin {:.6e})", v.label(), v.margin() + 0.0);
    if let MembershipVerdict::InconclusiveAccept { reason, .. } = v {
        out.push_str(&format!("\nreason: {reason}"));
    }
    if let Some(w) = v.witness() {
        out.push_str(&format!("\ncertificate: {}", serde_json::to_string(w).expect("witness serializes")));
    }
    out
}

fn search_config(args: &SearchArgs) -> Result<SearchConfig, Failure> {
    let mut cfg = SearchConfig::default();
    let seed = match (args.seed, std::env::var("WITWORLD_SEED")) {
        (Some(s), _) => s,
        (None, Ok(s)) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("WITWORLD_SEED={s:?} is not an unsigned integer")))?,
        (None, Err(_)) => 0,
    };
    cfg.seed = seed;
    if let Some(g) = args.grid {
        cfg.grid = g;
    }
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    Ok(cfg)
}

fn builtin_name(arg: &str) -> Option<&str> {
    arg.strip_prefix("builtin:")
}

fn read_json(path: &str) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn unknown(kind: &str, name: &str, known: &[&str]) -> Failure {
    Failure::Usage(format!("unknown builtin {kind} {name:?}; expected one of {}", known.join(", ")))
}

fn load_vector(arg: &str) -> Result<GptVector, Failure> {
    match builtin_name(arg) {
        Some(n) => builtin_vector(n).ok_or_else(|| unknown("vector", n, BUILTIN_VECTORS)),
        None => Ok(vector_from_json(&read_json(arg)?)?),
    }
}

fn load_map(arg: &str) -> Result<LinearMap, Failure> {
    match builtin_name(arg) {
        Some(n) => builtin_map(n).ok_or_else(|| unknown("map", n, BUILTIN_MAPS)),
        None => serde_json::from_value(read_json(arg)?).map_err(|e| Failure::Input(format!("{arg}: {e}"))),
    }
}

fn load_assemblage(arg: &str, cfg: &SearchConfig) -> Result<Assemblage, Failure> {
    match builtin_name(arg) {
        Some(n) if NAMED_ASSEMBLAGES.contains(&n) => Ok(named_assemblage(n, cfg)?),
        Some(n) => Err(unknown("assemblage", n, NAMED_ASSEMBLAGES)),
        None => Ok(assemblage_from_json(&read_json(arg)?, cfg.tol)?),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn report_verdict(json: bool, subject: &str, v: &MembershipVerdict, extra: Value) -> u8 {
    if json {
        let mut obj = json!({ "subject": subject, "result": v });
        if let (Value::Object(o), Value::Object(e)) = (&mut obj, extra) {
            o.extend(e);
        }
        print_json(&obj);
    } else {
        println!("{subject}");
        println!("{}", verdict_text(v));
    }
    verdict_code(v)
}

fn cmd_prbox(json: bool) -> Outcome {
    let kit = PrBoxKit::new();
    let p = |a, b, x, y| pr_box_probability(&kit, a, b, x, y);
    let chsh = chsh_value(p, 1e-12)?;
    let (classical, strategy) = best_deterministic_chsh();
    let table: Vec<Vec<f64>> = (0..4)
        .map(|xy| (0..4).map(|ab| p(ab >> 1, ab & 1, xy >> 1, xy & 1)).collect())
        .collect();
    if json {
        print_json(&json!({
            "rows": ["x=0,y=0", "x=0,y=1", "x=1,y=0", "x=1,y=1"],
            "columns": ["a=0,b=0", "a=0,b=1", "a=1,b=0", "a=1,b=1"],
            "table": table,
            "chsh": chsh,
            "best_deterministic_chsh": classical,
            "best_deterministic_strategy": strategy,
        }));
    } else {
        println!("p(ab|xy)   ab=00   ab=01   ab=10   ab=11");
        for (xy, row) in table.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:>7}", fixed(*v, 4))).collect();
            println!("xy={}{}    {}", xy >> 1, xy & 1, cells.join(" "));
        }
        println!("CHSH = {}", fixed(chsh, 4));
        println!("best deterministic CHSH = {}", fixed(classical, 4));
    }
    Ok(0)
}

fn cmd_rsp(json: bool, theta: f64, phi: f64, grid: Option<usize>) -> Outcome {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Failure::Usage("--theta and --phi must be finite".into()));
    }
    let psi = bloch_state(theta, phi);
    let run = rsp_run(&psi)?;
    let tol = SearchConfig::default().tol;
    let mut ok = run.trace_distance < tol;
    let grid_report = match grid {
        Some(0) => return Err(Failure::Usage("--grid must be positive".into())),
        Some(n) => {
            let points = bloch_grid(n);
            let asm = rsp_as_assemblage(&points)?;
            let deviation = rsp_assemblage_deviation(&asm, &points)?;
            let ns = ns_check(&asm, tol)?;
            ok &= deviation < tol && ns.is_accepted();
            Some((n, deviation, ns))
        }
        None => None,
    };
    if json {
        let mut report = run.report_json();
        if let Some((n, deviation, ns)) = &grid_report {
            report["grid"] = json!({ "points": n, "max_trace_distance": deviation, "ns": ns });
        }
        print_json(&report);
    } else {
        println!("psi = ({:.6}{:+.6}i, {:.6}{:+.6}i)", psi[0].re, psi[0].im, psi[1].re, psi[1].im);
        for b in &run.branches {
            let action = if b.a == 0 { "identity" } else { "universal-NOT" };
            println!("Alice sends a={} (weight {:.6}); Bob applies {action}", b.a, b.weight);
        }
        println!("bits sent = {}", run.bits_sent);
        println!("trace distance = {:.3e}", run.trace_distance);
        if let Some((n, deviation, ns)) = &grid_report {
            println!("grid of {n} states: max trace distance = {deviation:.3e}, NS {}", ns.label());
        }
    }
    Ok(if ok { 0 } else { EXIT_REJECTED })
}

fn cmd_check_state(json: bool, file: &str, search: &SearchArgs) -> Outcome {
    let cfg = search_config(search)?;
    let v = load_vector(file)?;
    let verdict = state_check(&v, &cfg)?;
    Ok(report_verdict(json, &format!("state on {}", v.system()), &verdict, json!({})))
}

fn cmd_check_effect(json: bool, file: &str, search: &SearchArgs) -> Outcome {
    let cfg = search_config(search)?;
    let (e, cert) = match builtin_name(file) {
        Some(_) => (load_vector(file)?, None),
        None => effect_input_from_json(&read_json(file)?)?,
    };
    let verdict = effect_check(&e, cert.as_ref(), &cfg)?;
    Ok(report_verdict(json, &format!("effect on {}", e.system()), &verdict, json!({})))
}

fn cmd_check_map(json: bool, file: &str, test: MapTest, search: &SearchArgs) -> Outcome {
    let cfg = search_config(search)?;
    let t = load_map(file)?;
    let subject = format!("map {} -> {}", t.domain(), t.codomain());
    match test {
        MapTest::Positivity => Ok(report_verdict(json, &subject, &positivity_check(&t, &cfg)?, json!({}))),
        MapTest::Cp => {
            let (verdict, lambda) = quantum_cp_check(&t, cfg.tol)?;
            if !json {
                println!("min Choi eigenvalue = {}", fixed(lambda, 4));
            }
            Ok(report_verdict(json, &subject, &verdict, json!({ "min_choi_eigenvalue": lambda })))
        }
        MapTest::TracePreserving => Ok(report_verdict(
            json,
            &subject,
            &trace_condition_check(&t, TraceMode::Preserving, &cfg)?,
            json!({}),
        )),
        MapTest::TraceNonincreasing => Ok(report_verdict(
            json,
            &subject,
            &trace_condition_check(&t, TraceMode::NonIncreasing, &cfg)?,
            json!({}),
        )),
    }
}

fn lhs_text(outcome: &LhsOutcome) -> String {
    match outcome {
        LhsOutcome::Feasible { model, reconstruction_error } => format!(
            "LHS: feasible ({} strategies with weight, reconstruction error {:.3e})",
            model.weights.iter().filter(|&&w| w > 0.0).count(),
            reconstruction_error
        ),
        LhsOutcome::Infeasible { certificate } => format!(
            "LHS: infeasible (steering inequality value {:.6e} < bound {})\ncertificate: {}",
            certificate.value,
            certificate.bound,
            serde_json::to_string(certificate).expect("certificate serializes")
        ),
    }
}

fn cmd_assemblage(
    json: bool,
    name: &str,
    verify_ns: bool,
    verify_lhs: bool,
    emit: Option<&PathBuf>,
    search: &SearchArgs,
) -> Outcome {
    let cfg = search_config(search)?;
    let name = builtin_name(name).unwrap_or(name);
    if !NAMED_ASSEMBLAGES.contains(&name) {
        return Err(unknown("assemblage", name, NAMED_ASSEMBLAGES));
    }
    let asm = named_assemblage(name, &cfg)?;
    let mut code = 0;
    let ns = if verify_ns { Some(ns_check(&asm, cfg.tol)?) } else { None };
    if let Some(v) = &ns {
        code = verdict_code(v);
    }
    let lhs = if verify_lhs {
        Some(match lhs_check(&asm, cfg.tol) {
            Ok(o) => Ok(o),
            Err(Error::Unsupported(m)) => Err(m),
            Err(e) => return Err(e.into()),
        })
    } else {
        None
    };
    if let Some(path) = emit {
        let text = serde_json::to_string_pretty(&assemblage_to_json(&asm)).expect("assemblage serializes");
        std::fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    if json {
        let mut report = json!({
            "assemblage": name,
            "scenario": asm.scenario().to_string(),
            "outcomes": asm.outcomes(),
            "settings": asm.settings(),
        });
        if let Some(v) = &ns {
            report["ns"] = serde_json::to_value(v).expect("verdict serializes");
        }
        match &lhs {
            Some(Ok(o)) => report["lhs"] = serde_json::to_value(o).expect("outcome serializes"),
            Some(Err(m)) => report["lhs"] = json!({ "lhs": "unsupported", "reason": m }),
            None => {}
        }
        print_json(&report);
    } else {
        println!(
            "{name}: {} scenario, outcomes {:?}, settings {:?}",
            asm.scenario(),
            asm.outcomes(),
            asm.settings()
        );
        if let Some(v) = &ns {
            println!("NS {}", verdict_text(v));
        }
        match &lhs {
            Some(Ok(o)) => println!("{}", lhs_text(o)),
            Some(Err(m)) => println!("LHS: unsupported ({m})"),
            None => {}
        }
    }
    Ok(code)
}

fn cmd_lhs(json: bool, file: &str) -> Outcome {
    let cfg = search_config(&SearchArgs { grid: None, restarts: None, seed: None })?;
    let asm = load_assemblage(file, &cfg)?;
    let outcome = lhs_check(&asm, cfg.tol)?;
    if json {
        print_json(&serde_json::to_value(&outcome).expect("outcome serializes"));
    } else {
        println!("{}", lhs_text(&outcome));
    }
    Ok(if outcome.is_feasible() { 0 } else { EXIT_REJECTED })
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let json = cli.json;
    match &cli.command {
        Command::Prbox => cmd_prbox(json),
        Command::Rsp { theta, phi, grid } => cmd_rsp(json, *theta, *phi, *grid),
        Command::CheckState { file, search } => cmd_check_state(json, file, search),
        Command::CheckEffect { file, search } => cmd_check_effect(json, file, search),
        Command::CheckMap { file, test, search } => cmd_check_map(json, file, *test, search),
        Command::Assemblage {
            name,
            verify_ns,
            verify_lhs,
            emit,
            search,
        } => cmd_assemblage(json, name, *verify_ns, *verify_lhs, emit.as_ref(), search),
        Command::Lhs { file } => cmd_lhs(json, file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("witworld: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
