use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use causal_control::controllability::{
    c_star, c_star_trace, solve, usm_adversarial_cbn, Budget, ControlProblem, Objective, SolveValue,
};
use causal_control::intervention::{interventional_prob, IpClass};
use causal_control::random::{random_instance, random_parametrization, rng, RandomConfig};
use causal_control::verify::{Suite, Verifier};
use clap::{Parser, Subcommand};

use crate::format::{parse_network, Network};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cbnctl",
    version,
    about = "Driver sets and intervention policies for discrete causal Bayesian networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Print the backward-chaining driver set and its trace.
    Drivers { file: PathBuf },
    /// Probability of the targets under the file's policies.
    Eval { file: PathBuf },
    /// Pick drivers and policies for an objective.
    Solve {
        file: PathBuf,
        /// min-min, max-max, min-max or max-min.
        #[arg(long)]
        objective: Objective,
        /// Largest joint state space to enumerate.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Check the controllability guarantees exhaustively.
    Verify {
        file: PathBuf,
        /// lemma3, sufficiency, usm, extremality, minimax or all.
        #[arg(long)]
        suite: SuiteSelection,
        /// Draw a random parametrization when the file has no cpds.
        #[arg(long)]
        seed: Option<u64>,
        /// Largest joint state space to enumerate.
        #[arg(long)]
        budget: Option<usize>,
        /// Policy classes for the lemma3 suite.
        #[arg(long = "class", value_delimiter = ',', default_value = "1,2,inf")]
        classes: Vec<IpClass>,
    },
    /// Write the adversarial parametrization for the file's structure.
    Usm {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a random network.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        min_nodes: usize,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
        #[arg(long, default_value_t = 2)]
        card: usize,
        /// Destination file; the network is printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteSelection {
    One(Suite),
    All,
}

impl FromStr for SuiteSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(SuiteSelection::All);
        }
        s.parse().map(SuiteSelection::One).map_err(|_| {
            format!("unknown suite `{s}` (expected lemma3, sufficiency, usm, extremality, minimax or all)")
        })
    }
}

impl SuiteSelection {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteSelection::One(s) => vec![s],
            SuiteSelection::All => Suite::ALL.to_vec(),
        }
    }

    fn name(self) -> String {
        match self {
            SuiteSelection::One(s) => s.to_string(),
            SuiteSelection::All => "all".into(),
        }
    }
}

/// A finished command: its report and whether a verification failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub failed: bool,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome {
            report,
            failed: false,
        }
    }
}

fn p9(x: f64) -> String {
    format!("{x:.9}")
}

fn read(path: &Path) -> Result<Network, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| match e {
        CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn problem(net: &Network, objective: Objective) -> Result<ControlProblem, CliError> {
    if net.desired.is_empty() {
        return Err(CliError::Invalid(
            "targets: at least one target is required".into(),
        ));
    }
    Ok(ControlProblem::new(
        net.dag.clone(),
        net.intervenable.clone(),
        net.desired.clone(),
        objective,
    )?)
}

fn budget(states: Option<usize>) -> Budget {
    let mut b = Budget::default();
    if let Some(s) = states {
        b.max_states = s;
    }
    b
}

fn indent(text: &str, by: &str) -> String {
    text.lines()
        .map(|l| format!("{by}{l}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Command {
    /// The command line, reconstructed from the parsed arguments.
    pub fn echo(&self) -> String {
        let mut s = String::from("cbnctl ");
        match self {
            Command::Drivers { file } => write!(s, "drivers {}", file.display()),
            Command::Eval { file } => write!(s, "eval {}", file.display()),
            Command::Solve {
                file,
                objective,
                budget,
            } => {
                write!(s, "solve {} --objective {objective}", file.display()).unwrap();
                budget.map_or(Ok(()), |b| write!(s, " --budget {b}"))
            }
            Command::Verify {
                file,
                suite,
                seed,
                budget,
                classes,
            } => {
                write!(s, "verify {} --suite {}", file.display(), suite.name()).unwrap();
                if let Some(seed) = seed {
                    write!(s, " --seed {seed}").unwrap();
                }
                if let Some(b) = budget {
                    write!(s, " --budget {b}").unwrap();
                }
                let classes: Vec<String> = classes
                    .iter()
                    .map(|c| c.to_string().trim_start_matches("class-").to_string())
                    .collect();
                if classes != ["1", "2", "inf"] {
                    write!(s, " --class {}", classes.join(",")).unwrap();
                }
                Ok(())
            }
            Command::Usm { file, out } => {
                write!(s, "usm {} --out {}", file.display(), out.display())
            }
            Command::Generate {
                seed,
                min_nodes,
                max_nodes,
                card,
                out,
            } => {
                write!(
                    s,
                    "generate --seed {seed} --min-nodes {min_nodes} --max-nodes {max_nodes} --card {card}"
                )
                .unwrap();
                out.as_ref()
                    .map_or(Ok(()), |o| write!(s, " --out {}", o.display()))
            }
        }
        .expect("writing to a string");
        s
    }
}

/// Runs one command.
pub fn run(command: &Command) -> Result<Outcome, CliError> {
    let mut r = format!("command: {}\n", command.echo());
    match command {
        Command::Drivers { file } => drivers(&read(file)?, &mut r)?,
        Command::Eval { file } => eval(&read(file)?, &mut r)?,
        Command::Solve {
            file,
            objective,
            budget: states,
        } => solve_cmd(&read(file)?, *objective, &budget(*states), &mut r)?,
        Command::Verify {
            file,
            suite,
            seed,
            budget: states,
            classes,
        } => {
            let failed = verify(
                &read(file)?,
                *suite,
                *seed,
                &budget(*states),
                classes,
                &mut r,
            )?;
            return Ok(Outcome { report: r, failed });
        }
        Command::Usm { file, out } => usm(&read(file)?, out, &mut r)?,
        Command::Generate {
            seed,
            min_nodes,
            max_nodes,
            card,
            out,
        } => {
            let text = generate(*seed, *min_nodes, *max_nodes, *card)?;
            match out {
                Some(path) => {
                    write(path, &text)?;
                    writeln!(r, "seed: {seed}\nwrote: {}", path.display()).unwrap();
                }
                None => return Ok(Outcome::ok(text)),
            }
        }
    }
    Ok(Outcome::ok(r))
}

fn drivers(net: &Network, r: &mut String) -> Result<(), CliError> {
    let p = problem(net, Objective::MaxMax)?;
    let dag = &net.dag;
    let trace = c_star_trace(&p);
    writeln!(r, "targets: {}", net.desired.fmt_with(dag)).unwrap();
    writeln!(r, "intervenable: {}", dag.fmt_set(&net.intervenable)).unwrap();
    writeln!(r, "drivers: {}", dag.fmt_set(&c_star(&p).members)).unwrap();
    writeln!(r, "backward chain:").unwrap();
    let width = trace
        .visited
        .iter()
        .map(|&v| dag.name(v).len())
        .max()
        .unwrap_or(0);
    for &v in &trace.visited {
        let kind = if trace.terminals.contains(&v) {
            "terminal (intervenable)"
        } else if dag.parents(v).is_empty() {
            "root"
        } else {
            "passed"
        };
        let target = if p.targets().contains(&v) {
            ", target"
        } else {
            ""
        };
        writeln!(r, "  {:width$}  {kind}{target}", dag.name(v)).unwrap();
    }
    let screened: Vec<_> = net.intervenable.difference(&trace.visited).collect();
    writeln!(r, "not reached: {}", dag.fmt_set(screened)).unwrap();
    Ok(())
}

fn eval(net: &Network, r: &mut String) -> Result<(), CliError> {
    let cbn = net
        .cbn
        .as_ref()
        .ok_or_else(|| CliError::Invalid("eval needs cpds for every node".into()))?;
    if net.desired.is_empty() {
        return Err(CliError::Invalid(
            "targets: at least one target is required".into(),
        ));
    }
    let value = interventional_prob(cbn, &net.policies, &net.desired)?;
    writeln!(r, "event: {}", net.desired.fmt_with(&net.dag)).unwrap();
    writeln!(r, "intervention:").unwrap();
    writeln!(
        r,
        "{}",
        indent(&net.policies.describe(&net.dag, &net.cards), "  ")
    )
    .unwrap();
    writeln!(r, "probability: {}", p9(value)).unwrap();
    Ok(())
}

fn solve_cmd(
    net: &Network,
    objective: Objective,
    budget: &Budget,
    r: &mut String,
) -> Result<(), CliError> {
    let p = problem(net, objective)?;
    let result = solve(&p, net.cbn.as_ref(), budget)?;
    let dag = &net.dag;
    writeln!(r, "objective: {objective}").unwrap();
    writeln!(r, "targets: {}", net.desired.fmt_with(dag)).unwrap();
    writeln!(r, "drivers: {}", dag.fmt_set(&result.drivers.members)).unwrap();
    writeln!(r, "method: {}", result.drivers.provenance).unwrap();
    match &result.value {
        SolveValue::StructuralOnly => writeln!(r, "value: structural-only").unwrap(),
        SolveValue::Exact { value, witness } => {
            writeln!(r, "value: {}", p9(*value)).unwrap();
            writeln!(r, "witness:").unwrap();
            writeln!(r, "{}", indent(&witness.describe(dag, &net.cards), "  ")).unwrap();
        }
    }
    Ok(())
}

fn verify(
    net: &Network,
    selection: SuiteSelection,
    seed: Option<u64>,
    budget: &Budget,
    classes: &[IpClass],
    r: &mut String,
) -> Result<bool, CliError> {
    let p = problem(net, Objective::MaxMax)?;
    let drawn;
    let cbn = match (&net.cbn, seed) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid(
                "--seed draws a parametrization, but the file already has cpds".into(),
            ))
        }
        (Some(cbn), None) => Some(cbn),
        (None, Some(seed)) => {
            drawn = random_parametrization(&mut rng(seed), &net.dag, net.cards.clone(), 0.2)?;
            Some(&drawn)
        }
        (None, None) => None,
    };
    let suites = selection.suites();
    if cbn.is_none() && suites.iter().any(|&s| s != Suite::Usm) {
        return Err(CliError::Invalid(format!(
            "suite {} needs cpds: add them to the file or pass --seed",
            selection.name()
        )));
    }
    match seed {
        Some(s) => writeln!(r, "seed: {s} (random parametrization)").unwrap(),
        None => writeln!(r, "seed: none").unwrap(),
    }
    writeln!(r, "budget: {} states", budget.max_states).unwrap();
    writeln!(r, "targets: {}", net.desired.fmt_with(&net.dag)).unwrap();
    writeln!(r, "intervenable: {}", net.dag.fmt_set(&net.intervenable)).unwrap();

    let mut verifier = Verifier::new(&p, cbn, budget.clone())?;
    let mut total = 0;
    let mut failures = 0;
    for suite in suites {
        let checks = match suite {
            Suite::Lemma3 => verifier.lemma3(classes)?,
            other => verifier.run(other)?,
        };
        for c in checks {
            total += 1;
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if !c.passed {
                failures += 1;
            }
            writeln!(r, "[{tag}] {suite}: {}", c.name).unwrap();
            writeln!(r, "{}", indent(&c.detail, "       ")).unwrap();
        }
    }
    if failures == 0 {
        writeln!(r, "result: PASS ({total} checks)").unwrap();
    } else {
        writeln!(r, "result: FAIL ({failures} of {total} checks failed)").unwrap();
    }
    Ok(failures > 0)
}

fn usm(net: &Network, out: &Path, r: &mut String) -> Result<(), CliError> {
    let p = problem(net, Objective::MaxMax)?;
    let drivers = c_star(&p).members;
    let (cbn, desired) = usm_adversarial_cbn(&net.dag, &drivers, &p.targets())?;
    let adversarial = Network {
        dag: net.dag.clone(),
        cards: cbn.cards().to_vec(),
        intervenable: net.intervenable.clone(),
        desired,
        cbn: Some(cbn),
        policies: Default::default(),
    };
    write(out, &adversarial.to_toml())?;
    writeln!(r, "drivers: {}", net.dag.fmt_set(&drivers)).unwrap();
    writeln!(r, "targets: {}", adversarial.desired.fmt_with(&net.dag)).unwrap();
    writeln!(r, "wrote: {}", out.display()).unwrap();
    Ok(())
}

/// A random network in file form, with the seed in a leading comment.
pub fn generate(
    seed: u64,
    min_nodes: usize,
    max_nodes: usize,
    card: usize,
) -> Result<String, CliError> {
    if min_nodes == 0 || min_nodes > max_nodes {
        return Err(CliError::Invalid(
            "--min-nodes must be at least 1 and at most --max-nodes".into(),
        ));
    }
    if card < 2 {
        return Err(CliError::Invalid("--card must be at least 2".into()));
    }
    let config = RandomConfig {
        min_nodes,
        max_nodes,
        card,
        ..RandomConfig::default()
    };
    let inst = random_instance(seed, &config);
    let net = Network {
        dag: inst.cbn.dag().clone(),
        cards: inst.cbn.cards().to_vec(),
        intervenable: inst.intervenable,
        desired: inst.desired,
        cbn: Some(inst.cbn),
        policies: Default::default(),
    };
    Ok(format!(
        "# cbnctl generate --seed {seed}\n{}",
        net.to_toml()
    ))
}
