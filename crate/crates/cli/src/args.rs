use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "lorentz-lab",
    version,
    about = "Optimal Lorentz ranges of the Calderón operator: computations and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Seed for generated corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// JSON file whose keys mirror the long flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate ψ(u) = inf_{w>1} φ(uw)/(1+log w) and its minimizer.
    Psi {
        #[command(flatten)]
        common: Common,
        /// φ as JSON, inline or a file path.
        #[arg(long)]
        phi: Option<String>,
        /// A single u; otherwise a geometric grid centred at 1.
        #[arg(long)]
        u: Option<f64>,
        #[arg(long)]
        decades: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// G_ψ(u)/φ(u) over a geometric grid.
    CheckContinuous {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        /// ψ as JSON; defaults to the tabulated ψ of φ.
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        decades: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// The sequence form of the criterion for n = 1..=N.
    CheckDiscrete {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        /// Largest n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Witness y with χ_(0,u) ≤ Sμ(y), or μ(x) ≤ Sμ(y) for a step x.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        u: Option<f64>,
        /// Decreasing step as {"layers":[[alpha,u],...]}.
        #[arg(long)]
        x: Option<String>,
    },
    /// Hilbert transform of a step, or the lower bound |Hx(-t)| ≥ Sμ(t)/2π.
    Hilbert {
        #[command(flatten)]
        common: Common,
        /// Decreasing step as {"layers":[[alpha,u],...]}.
        #[arg(long)]
        x: Option<String>,
        /// Evaluate Hx at this point instead of running the check.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long)]
        decades: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// ‖Sμ(x)‖_{L1+L∞} ≤ ‖x‖_{Λφ₀} ≤ 2‖Sμ(x)‖_{L1+L∞} for one step or a corpus.
    Phi0Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Triangular truncation of a matrix and its weak-(1,1) ratio.
    Truncate {
        #[command(flatten)]
        common: Common,
        /// Matrix JSON; otherwise a seeded complex Gaussian of size --dim.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Double operator integral with divided differences, and the commutator identity.
    Doi {
        #[command(flatten)]
        common: Common,
        /// Lipschitz function as {"knots":[[x,f],...]}.
        #[arg(long)]
        f: Option<String>,
        /// Hermitian matrix JSON.
        #[arg(long)]
        a: Option<String>,
        /// Hermitian matrix JSON used as B in [A,B].
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Run the verification suite.
    Suite {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        decades: Option<f64>,
        /// Run sequentially.
        #[arg(long)]
        serial: bool,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Psi { common, .. }
            | Command::CheckContinuous { common, .. }
            | Command::CheckDiscrete { common, .. }
            | Command::Witness { common, .. }
            | Command::Hilbert { common, .. }
            | Command::Phi0Check { common, .. }
            | Command::Truncate { common, .. }
            | Command::Doi { common, .. }
            | Command::Suite { common, .. } => common,
        }
    }
}
