use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Quantum exponential manifold toolkit. Matrix arguments are file paths or
/// inline JSON of the form {"block_dims":[..],"blocks":[[[[re,im],..],..],..]}.
#[derive(Debug, Parser)]
#[command(name = "qexp", version)]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Include wall time in the report (makes the output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative entropy S(ω‖ρ).
    Entropy(PairArgs),
    /// Shifted entropy F_ρ(ω) = S(ω‖ρ) − ω(1) for a self-adjoint ω.
    FRho(PairArgs),
    /// Perturbed functional ρ^h = exp(log ρ + h).
    Perturb(PerturbArgs),
    /// C_ρ(h) = ρ^h(1) and its gradient.
    CRho(CRhoArgs),
    /// Exponential Orlicz norm ‖a‖_{exp,ρ}.
    NormExp(NormExpArgs),
    /// Logarithmic Orlicz norm ‖ψ‖_{log,ρ}.
    NormLog(NormLogArgs),
    /// Kosaki norm ‖h‖_{p,ρ}.
    NormLp(NormLpArgs),
    /// Canonical divergence D_ρ(h‖k), optionally with the three-point relation.
    Divergence(DivergenceArgs),
    /// Petz dual T*_ρ(a).
    PetzDual(PetzDualArgs),
    /// Petz recovery map T_ρ(σ).
    Recovery(RecoveryArgs),
    /// Sufficiency certificates for the pair {ρ, ρ^h}.
    CheckSufficiency(SufficiencyArgs),
    /// Transport an exponential family through T*_ρ.
    TransportFamily(TransportArgs),
    /// Chart map h ↦ ρ^h, or its inverse σ ↦ log σ − log ρ.
    Chart(ChartArgs),
    /// Chart transition h1 ↦ h1 + log ρ1 − log ρ2.
    Transition(TransitionArgs),
    /// Rényi-type function f(α).
    RenyiF(RenyiArgs),
    /// Seeded randomized check of every identity and inequality.
    PropertySuite(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub omega: String,
    #[arg(long)]
    pub rho: String,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub h: String,
}

#[derive(Debug, Args)]
pub struct CRhoArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub h: String,
    /// Also compare the central difference along this direction with ⟨b, ρ^h⟩.
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long, default_value_t = 1e-5)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct NormExpArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub a: String,
    /// Relative tolerance of the bisection on λ.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct NormLogArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub psi: String,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Gradient tolerance of the inner Ψ_ρ solver.
    #[arg(long, default_value_t = 1e-10)]
    pub solver_tol: f64,
    /// Iteration cap of the inner Ψ_ρ solver.
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Also report Ψ_ρ(ψ) by both the sup and the inf route.
    #[arg(long)]
    pub certificate: bool,
}

#[derive(Debug, Args)]
pub struct NormLpArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub h: String,
    /// Exponent in [1, ∞]; "inf" for ∞.
    #[arg(long)]
    pub p: String,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub h: String,
    #[arg(long)]
    pub k: String,
    /// Third point for the three-point relation.
    #[arg(long)]
    pub l: Option<String>,
}

#[derive(Debug, Args)]
pub struct PetzDualArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub a: String,
    /// Fail instead of compressing to the support of T(ρ).
    #[arg(long)]
    pub no_support_restriction: bool,
}

#[derive(Debug, Args)]
pub struct RecoveryArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub sigma: String,
    #[arg(long)]
    pub no_support_restriction: bool,
}

#[derive(Debug, Args)]
pub struct SufficiencyArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub rho: String,
    #[arg(long)]
    pub h: String,
}

#[derive(Debug, Args)]
pub struct TransportArgs {
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub rho: String,
    /// JSON array of matrices (or {"family": [...]}).
    #[arg(long)]
    pub family: String,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    #[arg(long)]
    pub rho: String,
    /// Point to map forward.
    #[arg(long, conflicts_with = "sigma", required_unless_present = "sigma")]
    pub h: Option<String>,
    /// Faithful functional to map back.
    #[arg(long)]
    pub sigma: Option<String>,
}

#[derive(Debug, Args)]
pub struct TransitionArgs {
    #[arg(long)]
    pub rho1: String,
    #[arg(long)]
    pub rho2: String,
    #[arg(long)]
    pub h1: String,
}

#[derive(Debug, Args)]
pub struct RenyiArgs {
    #[arg(long)]
    pub omega: String,
    #[arg(long)]
    pub rho: String,
    /// One or more values α > 1, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Matrix dimensions, comma separated (each ≤ 8).
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Re-run the failures recorded in a previous report.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Run only the named invariants, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Override an invariant's threshold, as NAME=VALUE. Repeatable.
    #[arg(long, hide = true)]
    pub threshold: Vec<String>,
}
