//! `qtoroidal`: every verification as a subcommand with a JSON report.
//! Exit status 0 iff all checks pass, 1 if some check fails, 2 on bad input.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use qtoroidal::classical_weights::{label_from_list, Group, WeightLabel};
use qtoroidal::decomposer::{centralizer_bruteforce, decompose, TruncationWindow};
use qtoroidal::highest_weight::lemmas::{run_lemma, LemmaOptions, LEMMA_IDS};
use qtoroidal::highest_weight::{build_hwv, cartan_generators, eta_eval, hwv_factors, verify_hwv, VerifyOptions};
use qtoroidal::qfield::QMode;
use qtoroidal::toroidal::{Cocycle, DualPair, Pair};
use qtoroidal::verify::{axioms_suite, dualpair_suite, representation_suite, SuiteOptions};
use qtoroidal::weyl_fock::Flavor;
use qtoroidal::Half;

#[derive(Parser)]
#[command(name = "qtoroidal", version, about = "Exact checks for toroidal Howe dual pairs on oscillator Fock modules")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Global {
    /// key = value file; flags given on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// gl, so-sp or sp-so
    #[arg(long, global = true)]
    pair: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    /// int or half
    #[arg(long, global = true)]
    flavor: Option<String>,
    #[arg(long, global = true)]
    a_max: Option<i64>,
    #[arg(long, global = true)]
    b_max: Option<i64>,
    /// a half-integer such as 2 or 3/2
    #[arg(long, global = true)]
    max_energy: Option<String>,
    #[arg(long, global = true)]
    max_zero_modes: Option<usize>,
    /// symbolic or rational
    #[arg(long, global = true)]
    q_mode: Option<String>,
    /// specialization point s0 = q^(1/2) for rational mode
    #[arg(long, global = true)]
    s0: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// random samples for the randomized suites
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Field, torus and Jacobi identities
    VerifyAxioms {
        /// use a deliberately broken central term
        #[arg(long)]
        corrupt_cocycle: bool,
    },
    /// The oscillator representation property and r-support oracle
    VerifyRep,
    /// Generator-level commutation and homomorphism checks of a pair
    VerifyDualpair,
    /// Build v_μ and verify it
    Hwv {
        #[arg(long)]
        mu: String,
    },
    /// η_μ on the toroidal Cartan generators
    Eta {
        #[arg(long)]
        mu: String,
    },
    /// One of the mechanized commutator lemmas
    Lemma {
        #[arg(long)]
        id: String,
    },
    /// Joint singular search and degree bookkeeping in a truncation window
    Decompose,
    /// Brute-force centralizers in a generator window (a_max)
    Centralizer,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyAxioms { .. } => "verify-axioms",
            Command::VerifyRep => "verify-rep",
            Command::VerifyDualpair => "verify-dualpair",
            Command::Hwv { .. } => "hwv",
            Command::Eta { .. } => "eta",
            Command::Lemma { .. } => "lemma",
            Command::Decompose => "decompose",
            Command::Centralizer => "centralizer",
        }
    }

    /// Whether the command works at q = s0² by default.
    fn rational_by_default(&self) -> bool {
        matches!(self, Command::Decompose | Command::Centralizer)
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn run_err(e: impl ToString) -> Failure {
    Failure::Run(e.to_string())
}

fn read_config(path: &PathBuf) -> Result<HashMap<String, String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), k + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

struct Layer {
    config: HashMap<String, String>,
}

impl Layer {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: ToString,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.config.get(key) {
            Some(s) => s.parse::<T>().map(Some).map_err(|e| usage(format!("config {key}: {}", e.to_string()))),
            None => Ok(None),
        }
    }
}

struct Settings {
    pair: Pair,
    m: usize,
    n: usize,
    flavor: Flavor,
    a_max: Option<i64>,
    b_max: Option<i64>,
    max_energy: Half,
    max_zero_modes: usize,
    mode: QMode,
    s0: BigRational,
    seed: u64,
    samples: Option<usize>,
    out: Option<PathBuf>,
}

impl Settings {
    fn resolve(g: &Global, cmd: &Command) -> Result<Settings, Failure> {
        let layer = Layer { config: match &g.config { Some(p) => read_config(p)?, None => HashMap::new() } };
        let pair = layer.get(g.pair.clone(), "pair")?.unwrap_or_else(|| "gl".into());
        let pair = Pair::from_str(&pair).map_err(usage)?;
        let flavor = layer.get(g.flavor.clone(), "flavor")?.unwrap_or_else(|| "half".into());
        let flavor = Flavor::from_str(&flavor).map_err(usage)?;
        let n = layer.get(g.n, "n")?.unwrap_or(1);
        let m = layer.get(g.m, "m")?.unwrap_or(1);
        if n == 0 || m == 0 {
            return Err(usage("--n and --m must be positive"));
        }
        let s0 = layer.get(g.s0.clone(), "s0")?.unwrap_or_else(|| "2".into());
        let s0 = BigRational::from_str(&s0).map_err(|_| usage(format!("--s0 {s0:?} is not a rational number")))?;
        let q_mode = layer.get(g.q_mode.clone(), "q-mode")?;
        let mode = match q_mode.as_deref() {
            None if cmd.rational_by_default() => QMode::Rational(s0.clone()),
            None | Some("symbolic") => QMode::Symbolic,
            Some("rational") => QMode::Rational(s0.clone()),
            Some(other) => return Err(usage(format!("unknown --q-mode {other:?} (expected symbolic or rational)"))),
        };
        let max_energy = layer.get(g.max_energy.clone(), "max-energy")?.unwrap_or_else(|| "2".into());
        let max_energy = Half::from_str(&max_energy).map_err(usage)?;
        if max_energy.is_negative() {
            return Err(usage("--max-energy must be nonnegative"));
        }
        let jobs: Option<usize> = layer.get(g.jobs, "jobs")?;
        if let Some(j) = jobs {
            // ignore the error when a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
        }
        Ok(Settings {
            pair,
            m,
            n,
            flavor,
            a_max: layer.get(g.a_max, "a-max")?,
            b_max: layer.get(g.b_max, "b-max")?,
            max_energy,
            max_zero_modes: layer.get(g.max_zero_modes, "max-zero-modes")?.unwrap_or(3),
            mode,
            s0,
            seed: layer.get(g.seed, "seed")?.unwrap_or(0),
            samples: layer.get(g.samples, "samples")?,
            out: g.out.clone().or(layer.get(None, "out")?),
        })
    }

    fn dp(&self) -> DualPair {
        DualPair::new(self.pair, self.m, self.n)
    }

    fn suite(&self, a: i64, b: i64, samples: usize) -> SuiteOptions {
        SuiteOptions {
            a_max: self.a_max.unwrap_or(a),
            b_max: self.b_max.unwrap_or(b),
            samples: self.samples.unwrap_or(samples),
            seed: self.seed,
            mode: self.mode.clone(),
            max_energy: Half::from_int(3),
            cocycle: Cocycle::Standard,
        }
    }

    fn label(&self, mu: &str) -> Result<WeightLabel, Failure> {
        if mu.contains(':') {
            return WeightLabel::from_str(mu).map_err(usage);
        }
        label_from_list(Group::for_pair(&self.dp()), mu).map_err(usage)
    }

    fn to_json(&self) -> Value {
        json!({
            "pair": self.pair.name(),
            "m": self.m,
            "n": self.n,
            "flavor": self.flavor.name(),
            "a_max": self.a_max,
            "b_max": self.b_max,
            "max_energy": self.max_energy.to_string(),
            "max_zero_modes": self.max_zero_modes,
            "q_mode": self.mode.name(),
            "s0": self.s0.to_string(),
            "seed": self.seed,
            "samples": self.samples,
        })
    }
}

fn execute(cmd: &Command, s: &Settings) -> Result<(bool, Value), Failure> {
    let dp = s.dp();
    match cmd {
        Command::VerifyAxioms { corrupt_cocycle } => {
            let mut opts = s.suite(3, 3, 500);
            if *corrupt_cocycle {
                opts.cocycle = Cocycle::AbsDegree;
            }
            let r = axioms_suite(&opts).map_err(run_err)?;
            Ok((r.passed, serde_json::to_value(&r).map_err(run_err)?))
        }
        Command::VerifyRep => {
            let r = representation_suite(&s.suite(2, 2, 200)).map_err(run_err)?;
            Ok((r.passed, serde_json::to_value(&r).map_err(run_err)?))
        }
        Command::VerifyDualpair => {
            let r = dualpair_suite(&dp, &s.suite(2, 2, 40)).map_err(run_err)?;
            Ok((r.passed, serde_json::to_value(&r).map_err(run_err)?))
        }
        Command::Hwv { mu } => {
            let label = s.label(mu)?;
            let hwv = build_hwv(&dp, &label, s.flavor).map_err(usage)?;
            let opts = VerifyOptions {
                a_max: s.a_max.unwrap_or(3),
                b_max: s.b_max.unwrap_or(3),
                mode: s.mode.clone(),
                seed: s.seed,
                ..VerifyOptions::default()
            };
            let report = verify_hwv(&dp, &hwv, s.flavor, &opts).map_err(run_err)?;
            let eta = eta_table(&dp, &label, s.flavor, opts.b_max)?;
            let passed = report.passed;
            let report = serde_json::to_value(&report).map_err(run_err)?;
            Ok((passed, json!({ "eta": eta, "verification": report })))
        }
        Command::Eta { mu } => {
            let label = s.label(mu)?;
            let eta = eta_table(&dp, &label, s.flavor, s.b_max.unwrap_or(3))?;
            Ok((true, json!({ "label": label.to_string(), "eta": eta })))
        }
        Command::Lemma { id } => {
            if !LEMMA_IDS.contains(&id.as_str()) {
                return Err(usage(format!("unknown lemma {id:?}; expected one of {}", LEMMA_IDS.join(", "))));
            }
            let d = LemmaOptions::default();
            let opts = LemmaOptions {
                a_max: s.a_max.unwrap_or(d.a_max),
                b_max: s.b_max.unwrap_or(d.b_max),
                mode: s.mode.clone(),
                seed: s.seed,
                ..d
            };
            let r = run_lemma(id, s.m, s.n, s.flavor, &opts).map_err(usage)?;
            Ok((r.passed, serde_json::to_value(&r).map_err(run_err)?))
        }
        Command::Decompose => {
            let QMode::Rational(s0) = &s.mode else {
                return Err(usage("decompose runs exact elimination at q = s0^2; use --q-mode rational"));
            };
            let mut window = TruncationWindow::new(s.max_energy, s.max_zero_modes);
            window.a_max = s.a_max.unwrap_or(window.a_max);
            window.b_max = s.b_max.unwrap_or(window.b_max);
            let r = decompose(&dp, s.flavor, &window, s0).map_err(usage)?;
            Ok((r.passed, serde_json::to_value(&r).map_err(run_err)?))
        }
        Command::Centralizer => {
            let QMode::Rational(s0) = &s.mode else {
                return Err(usage("centralizer runs exact elimination at q = s0^2; use --q-mode rational"));
            };
            let r = centralizer_bruteforce(&dp, s.a_max.unwrap_or(1), s0).map_err(run_err)?;
            Ok((r.passed, serde_json::to_value(&r).map_err(run_err)?))
        }
    }
}

fn eta_table(dp: &DualPair, label: &WeightLabel, flavor: Flavor, b_max: i64) -> Result<Value, Failure> {
    let plan = hwv_factors(dp, label, flavor).map_err(usage)?;
    let mut rows = Vec::new();
    for g in cartan_generators(dp, b_max) {
        let v = eta_eval(dp, &plan.eta_weight, flavor, &g).map_err(run_err)?;
        rows.push(json!({ "generator": g.to_string(), "value": v.to_string() }));
    }
    Ok(Value::Array(rows))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Settings::resolve(&cli.global, &cli.command).and_then(|s| {
        let (passed, report) = execute(&cli.command, &s)?;
        let envelope = json!({
            "schema": "report_v1",
            "command": cli.command.name(),
            "config": s.to_json(),
            "passed": passed,
            "report": report,
        });
        let text = serde_json::to_string_pretty(&envelope).expect("json");
        match &s.out {
            Some(p) => fs::write(p, text + "\n").map_err(|e| run_err(format!("{}: {e}", p.display())))?,
            None => {
                let mut out = std::io::stdout().lock();
                if let Err(e) = writeln!(out, "{text}") {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        return Err(run_err(e));
                    }
                }
            }
        }
        Ok(passed)
    });
    match result {
        Ok(true) => {
            eprintln!("{}: pass", cli.command.name());
            ExitCode::SUCCESS
        }
        Ok(false) => {
            eprintln!("{}: FAIL", cli.command.name());
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
