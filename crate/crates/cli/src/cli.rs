use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "entrocone", version, about = "Entropy vectors, inequality catalogs and entropy cones")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Global {
    /// Numerical tolerance for violations and flatness.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for all randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Work budget for enumerations.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Add wall-clock timing to reports (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CatalogFamily {
    /// Strong subadditivity and weak monotonicity.
    Xi,
    /// Elemental Shannon inequalities.
    Shannon,
    /// Extreme rays of the dual of the Xi cone.
    Pippenger,
    /// Shannon, Xi, and for four parties Zhang-Yeung and Ingleton.
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy vector of a distribution or quantum state.
    Entropy {
        file: String,
        #[arg(long, conflicts_with = "classical")]
        quantum: bool,
        #[arg(long)]
        classical: bool,
    },
    /// Evaluate an inequality catalog on an entropy vector.
    Check {
        file: String,
        /// Number of parties of the catalog (defaults to that of the vector).
        #[arg(long)]
        catalog: Option<usize>,
        #[arg(long, value_enum, default_value_t = CatalogFamily::Xi)]
        family: CatalogFamily,
    },
    /// Stabilizer entropy of a generator file, or enumeration of isotropic submodules.
    Stab {
        #[arg(required_unless_present = "enumerate")]
        file: Option<String>,
        /// Enumerate isotropic submodules for N parties and local dimension D.
        #[arg(long, num_args = 2, value_names = ["N", "D"], conflicts_with = "file")]
        enumerate: Option<Vec<u64>>,
        /// Same as --format csv.
        #[arg(long)]
        emit_csv: bool,
    },
    /// Dualize a cone, list its extreme rays, or test a facet.
    Cone {
        file: String,
        #[arg(long, group = "op")]
        dualize: bool,
        #[arg(long, group = "op")]
        extremal: bool,
        /// Catalog name or comma-separated coefficients over nonempty subsets.
        #[arg(long, group = "op", allow_hyphen_values = true)]
        facet: Option<String>,
    },
    /// Type classes and Young-diagram combinatorics.
    Types {
        #[command(subcommand)]
        op: TypesOp,
    },
    /// Entropy differential and extremal-ray verdict of a state.
    Rays { file: String },
    /// Rank vector of a subspace family file.
    Rank { file: String },
    /// Write an inequality catalog as a cone file.
    Catalog {
        n: usize,
        #[arg(long, value_enum, default_value_t = CatalogFamily::Xi)]
        family: CatalogFamily,
    },
}

#[derive(Debug, Subcommand)]
pub enum TypesOp {
    /// Size of a type class, e.g. `32,32`.
    Size { counts: String },
    /// Group-less Chan-Yeung vector of a rational distribution.
    Cy {
        file: String,
        #[arg(long)]
        k: u64,
    },
    /// Kostka number for a shape and a content.
    Kostka { shape: String, content: String },
    /// Classical Kronecker coefficient `h^lambda_{mu nu}`.
    Kron { lambda: String, mu: String, nu: String },
    /// Restriction of a unitary irrep to the symmetric group.
    Restrict { mu: String, d: usize },
    /// Probability mass of the empirical-distribution ball.
    Aep {
        /// Comma-separated probabilities.
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Dimensions of the Specht, permutation and (with --d) Weyl modules.
    Dims {
        lambda: String,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Check `sum dim M^lambda d!/prod(lambda+)! = d^n`.
    SchurWeyl { d: usize, n: usize },
}
