use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ffpp::gf::DEFAULT_FIELD_CAP;
use ffpp::graphs::DEFAULT_GIRTH_CAP;
use ffpp::pp::Conjecture;

#[derive(Debug, Parser)]
#[command(
    name = "ffpp",
    version,
    about = "Exhaustive permutation-polynomial, identity and girth checks over small finite fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the full report as JSON to this path
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,

    /// Write sweep rows as CSV to this path
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,

    /// Worker threads (default: available cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Directory for cached results
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,

    /// Largest q for which girths are computed
    #[arg(long, global = true, env = "FFPP_GIRTH_CAP", default_value_t = DEFAULT_GIRTH_CAP)]
    pub girth_cap: u64,

    /// Largest field order accepted
    #[arg(long, global = true, env = "FFPP_FIELD_CAP", default_value_t = DEFAULT_FIELD_CAP)]
    pub field_cap: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Direct PP tests of A_k and B_k for every k, with per-q verdicts
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        /// A, B or two; all three when omitted
        #[arg(long)]
        which: Option<Conjecture>,
        /// Also run the binomial-sum criterion for A_k
        #[arg(long)]
        with_criterion: bool,
        /// Also test girth >= 8 of the matching monomial graph
        #[arg(long)]
        with_girth: bool,
    },
    /// Digit-identity grids (q with e >= 3) and closing sums (odd primes p)
    Identities {
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        p: Vec<u64>,
    },
    /// Girth of G_q(XY, X^k Y^2k), or of G_q(X^a Y^b, X^c Y^d) with --exps a,b,c,d
    Girth {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',', conflicts_with = "exps")]
        k: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        exps: Option<Vec<u64>>,
    },
    /// Every check for all odd prime powers up to --q-max
    VerifyAll {
        #[arg(long, default_value_t = 27)]
        q_max: u64,
    },
    /// Modulus and generator of each field
    FieldInfo {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
    },
}
