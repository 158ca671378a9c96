use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ADDCOMB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "addcomb-out";

#[derive(Debug, Parser)]
#[command(
    name = "addcomb",
    version,
    about = "Reproducible additive-combinatorics experiments",
    long_about = "Reproducible additive-combinatorics experiments.\n\n\
        Every run writes JSON-lines records and CSV tables into the output \
        directory together with manifest.json (argv, seed, version, output \
        files, wall time). Data files depend only on the arguments, never on \
        the thread count or the clock.\n\n\
        Exit codes: 0 success, 2 a checked property failed, 3 budget or scale \
        limit reached, 64 usage error.",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads for data-parallel loops (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output directory (default: $ADDCOMB_OUT_DIR, else ./addcomb-out).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AmbientKind {
    /// Integer interval [1, N] (or the span of --set when N is omitted).
    Int,
    /// Cyclic group Z/NZ.
    Cyclic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count k-subsets whose sumset has at most m elements.
    #[command(long_about = "Count k-subsets whose sumset has at most m elements.\n\n\
        Exercises the counting of sets with small doubling: exact enumeration \
        with pruning, the per-|A+A| breakdown, optional listing, and the \
        closed-form upper bound ceil(2^{delta k}) C(floor(K k/2), k) N^{floor(K+delta)} \
        on the number of k-sets with |A+A| <= K k.")]
    Count(CountArgs),
    /// Check Pollard's averaged representation inequality in Z/qZ.
    #[command(long_about = "Check Pollard's averaged representation inequality \
        (N_1 + ... + N_t)/t >= min(2|S|, q) - t in Z/qZ, where N_t counts \
        elements with at least t representations as s + s'. Optionally reports \
        the popular-sums bound derived from it for a given beta.")]
    Pollard(PollardArgs),
    /// Freiman dimension, homomorphism counts, stabilizers and short dilates.
    #[command(long_about = "Freiman dimension r of a set via exact rational rank, \
        with Freiman's lemma |A+A| >= (r+1)|A| - C(r+1,2), the count of Freiman \
        homomorphisms into [1, N] against N^{r+1}, the affine stabilizer of a \
        subset of Z/pZ, and the dilates of A fitting in a short cyclic interval.")]
    Freiman(FreimanArgs),
    /// Fourier regularity: decompositions, pair tests, counting, Dirichlet.
    #[command(subcommand)]
    Regularity(RegularityCommand),
    /// M-dissociation tests, greedy dissociated subsets and their sizes.
    #[command(long_about = "Exhaustive search for vanishing integer combinations of \
        l1 weight at most M, greedy maximal M-dissociated subsets, and the \
        experiment comparing their size d with 2|A+A|/|A|.")]
    Dissociate(DissociateArgs),
    /// Graph cluster decompositions with the leftover, separation and diameter checks.
    #[command(long_about = "Decompose a vertex set A of a graph into blocks of \
        diameter at most D with no edges between blocks, leaving at most \
        32(|A|/D)^2 vertices out. Runs on seeded G(n, p) instances or a path.")]
    Cluster(ClusterArgs),
    /// Vertex isoperimetry of initial simplicial segments in Z_{>=0}^d.
    #[command(long_about = "Checks |S + {e_1..e_d}| >= (1/2 - eps) d |S| for initial \
        segments S of the simplicial order of size floor(C d), and reports the \
        expansion of the degree-2 ball.")]
    Isoperimetry(IsoArgs),
    /// Clique numbers of random Cayley sum graphs of Z/NZ.
    #[command(long_about = "Draws uniform random A in Z/NZ, builds the Cayley sum \
        graph (x ~ y iff x + y in A), computes the exact clique number and \
        counts samples exceeding (2 + eps) log2 N. Optionally evaluates the \
        expected number of k-cliques, sum over k-sets C of 2^{-|C +^ C|}, in \
        two independent ways.")]
    Cayley(CayleyArgs),
    /// Distribution of the number of naturals missed by A + A.
    #[command(long_about = "Monte-Carlo distribution of s = |N \\ (A + A)| for random \
        A (each n with probability 1/2), truncated at horizon 10 s_max, with \
        the fitted exponent -(2/s) log2 a(s), the check a(s) >= a(s-2)/2, an \
        exhaustive cross-check at a small horizon and a truncation check.")]
    Missing(MissingArgs),
    /// Run the built-in invariant battery.
    Selftest,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, value_enum)]
    pub ambient: AmbientKind,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long)]
    pub k: usize,
    /// Sumset size budget; omit to tabulate every k-set.
    #[arg(long)]
    pub m: Option<usize>,
    /// Use the restricted sumset A +^ A.
    #[arg(long)]
    pub restricted: bool,
    /// Also list up to this many sets.
    #[arg(long)]
    pub list: Option<usize>,
    /// Ceiling on C(N, k).
    #[arg(long, default_value_t = 1e9)]
    pub ceiling: f64,
    /// Doubling K for the closed-form bound (rational, e.g. 3 or 5/2).
    #[arg(long)]
    pub bound_k: Option<String>,
    /// Slack delta for the closed-form bound (rational).
    #[arg(long, default_value = "1/10")]
    pub bound_delta: String,
}

#[derive(Debug, Args)]
pub struct PollardArgs {
    /// Prime modulus.
    #[arg(long)]
    pub q: u64,
    /// A single set to report on.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub set: Option<Vec<i64>>,
    /// Check every subset of Z/qZ and every t.
    #[arg(long)]
    pub exhaustive: bool,
    /// Random (S, t) pairs to check.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Beta for the popular-sums report on --set.
    #[arg(long)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct FreimanArgs {
    #[arg(long, value_enum)]
    pub ambient: AmbientKind,
    #[arg(long = "N")]
    pub n: Option<u64>,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub set: Vec<i64>,
    /// Count Freiman homomorphisms into [1, this].
    #[arg(long)]
    pub homs: Option<u64>,
    /// Report the affine stabilizer (cyclic, prime N).
    #[arg(long)]
    pub stabilizer: bool,
    /// Report the dilates fitting in a cyclic interval shorter than this.
    #[arg(long)]
    pub dilate_len: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum RegularityCommand {
    /// Energy-increment decomposition of seeded random subsets of Z/pZ.
    #[command(long_about = "Energy-increment decomposition of seeded random subsets \
        of Z/pZ into q cells of a dilate, refined until at least (1 - eps) q^2 \
        cell pairs are certified eps-regular. Records the energy trace with \
        its edge tolerances and checks that most pairs satisfy \
        min(|A_i|, |A_j|) <= eps p/q or |A_i + A_j| >= (2 - eps) p/q.")]
    Decompose(DecomposeArgs),
    /// Certified eps-regularity test for seeded random interval pairs.
    Pair(PairArgs),
    /// Counting-term identity and the sumset lower bound for regular pairs.
    #[command(long_about = "Splits the incidence count sum 1_A(x) 1_A'(y) 1_S(x+y) \
        into a main term and three error terms in exact arithmetic, and checks \
        |A + A'| >= (2 - 8 eps) L for pairs certified eps^7-regular.")]
    Counting(CountingArgs),
    /// Least d <= Q with ||d theta|| <= 1/Q.
    Dirichlet(DirichletArgs),
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub q_min: Option<u64>,
    #[arg(long)]
    pub l_floor: Option<u64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long = "L")]
    pub l: i64,
    #[arg(long)]
    pub eps: f64,
    /// Element density of each random set.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CountingArgs {
    #[arg(long = "L")]
    pub l: i64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    /// Phase as a decimal or fraction, read exactly.
    #[arg(long)]
    pub theta: String,
    #[arg(long = "Q")]
    pub q: u64,
}

#[derive(Debug, Args)]
pub struct DissociateArgs {
    #[arg(long, value_enum, default_value = "int")]
    pub ambient: AmbientKind,
    #[arg(long = "N")]
    pub n: Option<u64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub set: Option<Vec<i64>>,
    #[arg(long = "M")]
    pub m: u64,
    /// Run the size experiment on random k-subsets of Z/NZ instead.
    #[arg(long)]
    pub experiment: bool,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 10)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Vertices of each random graph.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    /// Edge probability.
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Probability that a vertex belongs to A.
    #[arg(long, default_value_t = 0.6)]
    pub density: f64,
    /// Scales D to run on each instance.
    #[arg(long = "D", value_delimiter = ',', default_value = "8,16,32")]
    pub d: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the path on n vertices with A = everything.
    #[arg(long)]
    pub path: bool,
}

#[derive(Debug, Args)]
pub struct IsoArgs {
    #[arg(long, default_value_t = 10)]
    pub d_min: usize,
    #[arg(long, default_value_t = 14)]
    pub d_max: usize,
    /// Segment size is floor(C d).
    #[arg(long = "C", default_value = "5/2")]
    pub c: String,
    #[arg(long, default_value = "3/20")]
    pub eps: String,
    /// Dimension of the degree-2 ball to report.
    #[arg(long, default_value_t = 10)]
    pub ball_d: usize,
}

#[derive(Debug, Args)]
pub struct CayleyArgs {
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long, default_value_t = 50)]
    pub samples: u64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate the expected number of k-cliques exactly.
    #[arg(long)]
    pub expected_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MissingArgs {
    #[arg(long, default_value_t = 14)]
    pub s_max: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare a Monte-Carlo run at this horizon with exhaustive enumeration.
    #[arg(long)]
    pub exact_horizon: Option<usize>,
    /// Samples for the truncation check at horizon 10 s_max + 40.
    #[arg(long, default_value_t = 0)]
    pub truncation_samples: u64,
}
