mod commands;
mod sweep;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "hitset", version, about = "Extremal set hitting times for finite Markov chains")]
pub struct Cli {
    /// Chain JSON file; read from standard input when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub chain: Option<std::path::PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stationary distribution and its residual.
    Stationary,
    /// Expected hitting times of a target set from every state.
    Hit {
        /// Comma-separated state indices or labels.
        #[arg(long)]
        target: String,
    },
    /// The whole step function α ↦ T(α).
    Profile,
    /// T(α) with a maximizing set and start state.
    Talpha {
        #[arg(long)]
        alpha: f64,
    },
    /// max π(A)·E_x[τ_A] over nonempty proper subsets.
    Tprod,
    /// Mixing time with the table of worst-row distances.
    Mix {
        #[arg(long, default_value_t = hitset::mixing::DEFAULT_CAP)]
        cap: u64,
    },
    /// Cèsaro mixing time.
    Ces {
        #[arg(long, default_value_t = hitset::mixing::DEFAULT_CAP)]
        cap: u64,
    },
    /// Build one of the extremal example chains and print it as chain JSON.
    #[command(subcommand)]
    Construct(Construct),
    /// Check inequalities; exits 1 if any fails.
    #[command(subcommand)]
    Check(Check),
    /// Monte Carlo estimate of a hitting time or an occupation count.
    Simulate(SimulateArgs),
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    ThreeState {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
    },
    TwoState {
        #[arg(long)]
        gamma: f64,
        #[arg(long = "big-n")]
        big_n: f64,
    },
    /// Realize a hittable step function given as spec JSON.
    Lshaped {
        #[arg(long, value_name = "PATH")]
        spec: std::path::PathBuf,
        /// Double N up to this many times when an entry leaves [0, 1].
        #[arg(long, default_value_t = 0)]
        doublings: u32,
    },
    /// Realize the dyadic step approximation of a decreasing profile.
    Dyadic {
        #[arg(long)]
        n: u32,
        #[arg(long = "big-n", default_value_t = 1.0)]
        big_n: f64,
        #[arg(long, value_enum, default_value_t = Shape::CappedInverse)]
        shape: Shape,
        /// Cap for `capped-inverse`: min(1/α, cap), shifted to equal 1 at 1/2.
        #[arg(long, default_value_t = 5.0)]
        cap: f64,
        /// Exponent for `power`: (2α)^(-exponent), exponent in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        exponent: f64,
        #[arg(long, default_value_t = 0)]
        doublings: u32,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    CappedInverse,
    Power,
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// T(α) ≤ T(β) + (1/α - 1) T(1-β) ≤ T(β)/α.
    Star {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// π(A) ≤ d⁺(A,C)/(d⁺(A,C) + d⁻(C,A)); every ordered pair when no sets are given.
    Ratio {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        c: Option<String>,
    },
    /// Cycle inequality π(A) E_ν[τ_A] ≤ (1 - π(A)) E_μ[τ_C] and its rearrangements.
    Dist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        c: String,
    },
    /// Occupation identity over one A → C → A cycle.
    Occupation {
        #[arg(long)]
        a: String,
        #[arg(long)]
        c: String,
        /// Counted set; every singleton and the full state space when omitted.
        #[arg(long)]
        s: Option<String>,
    },
    Lemma42 {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        t: f64,
    },
    Prop41,
    /// Every verifier over one chain or a seeded batch of random chains.
    All(AllArgs),
}

#[derive(Args, Debug)]
pub struct AllArgs {
    /// Number of random chains; uses --chain when omitted.
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long, default_value_t = 5)]
    pub states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Start state (hitting mode; optional point mass in occupation mode).
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, conflicts_with_all = ["avoid", "count"])]
    pub target: Option<String>,
    #[arg(long, requires = "count")]
    pub avoid: Option<String>,
    #[arg(long, requires = "avoid")]
    pub count: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "step-cap", default_value_t = hitset::sim::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
}

/// Why a run stopped early.
pub enum Failure {
    /// At least one check did not hold; the reports are already printed.
    Violated,
    Input(String),
}

impl From<hitset::Error> for Failure {
    fn from(e: hitset::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = commands::run(&cli, &mut out);
    print!("{out}");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violated) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
