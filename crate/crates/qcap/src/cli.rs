use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;

use qcap_core::capacity::{constrained_holevo_capacity, gap_d, CapacityResult, GapConfig, OptimizerConfig};
use qcap_core::channels::{DensityOperator, QuantumChannel};
use qcap_core::entropic::{entropy_exchange, mutual_information, vn_entropy};
use qcap_core::equality::{equality_test, hat_equality_test, two_rank_separation, EqualityConfig, EqualityReport};
use qcap_core::gaussian::{
    classify_complementary, classify_direct, comp_rel_subspace, one_mode_type, GaussianClassification, OneModeType,
};

use crate::error::CliError;
use crate::format::{ChannelDocument, Document, GaussianDocument, StateDocument};
use crate::report::{self, num, Obj};

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Entropic analysis of quantum channels and Gaussian channel parameters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input state document; defaults to the maximally mixed state.
    #[arg(long, global = true, value_name = "FILE")]
    pub state: Option<PathBuf>,
    /// Structural tolerance for equality decisions and separation.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for every randomized procedure.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Optimizer restarts (outer restarts for `gap`).
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schema and validity check for any document kind.
    Validate { input: PathBuf },
    /// Entropies, constrained capacity, mutual information and their slacks.
    Analyze { input: PathBuf },
    /// Decide whether the constrained capacity equals the mutual information.
    Equality { input: PathBuf },
    /// Decide whether the constrained capacity equals the input entropy.
    HatEquality { input: PathBuf },
    /// Estimate the noise gap max over states of I − C̄.
    Gap { input: PathBuf },
    /// Search for a rank-two state with I − C̄ above the tolerance.
    Separate { input: PathBuf },
    /// Case classification of Gaussian channel parameters.
    GaussianClassify { input: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Analyze { .. } => "analyze",
            Command::Equality { .. } => "equality",
            Command::HatEquality { .. } => "hat-equality",
            Command::Gap { .. } => "gap",
            Command::Separate { .. } => "separate",
            Command::GaussianClassify { .. } => "gaussian-classify",
        }
    }

    fn input(&self) -> &Path {
        match self {
            Command::Validate { input }
            | Command::Analyze { input }
            | Command::Equality { input }
            | Command::HatEquality { input }
            | Command::Gap { input }
            | Command::Separate { input }
            | Command::GaussianClassify { input } => input,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load_channel(path: &Path) -> Result<QuantumChannel, CliError> {
    ChannelDocument::parse(&read(path)?)?.to_channel()
}

impl Cli {
    fn capacity_config(&self) -> OptimizerConfig {
        let mut cfg = OptimizerConfig {
            seed: self.seed,
            ..OptimizerConfig::default()
        };
        if let Some(r) = self.restarts {
            cfg.restarts = r;
        }
        cfg
    }

    fn equality_config(&self) -> EqualityConfig {
        EqualityConfig {
            capacity: self.capacity_config(),
            ..EqualityConfig::default()
        }
        .with_seed(self.seed)
    }

    fn load_state(&self, dim: usize) -> Result<DensityOperator, CliError> {
        let rho = match &self.state {
            Some(p) => StateDocument::parse(&read(p)?)?.to_state()?,
            None => DensityOperator::maximally_mixed(dim),
        };
        if rho.dim() != dim {
            return Err(CliError::Schema {
                path: "dim".into(),
                message: format!("state has dimension {}, channel input is {dim}", rho.dim()),
            });
        }
        Ok(rho)
    }

    fn inputs(&self) -> Value {
        let restarts = self.restarts.map_or(Value::Null, Value::from);
        let state = self
            .state
            .as_ref()
            .map_or(Value::from("maximally_mixed"), |p| Value::from(p.display().to_string()));
        Obj::new()
            .set("command", self.command.name())
            .set("input", self.command.input().display().to_string())
            .set("restarts", restarts)
            .set("seed", self.seed)
            .set("state", state)
            .num("tol", self.tol)
            .build()
    }

    /// Runs the selected subcommand and returns the report value.
    pub fn execute(&self) -> Result<Value, CliError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        let input = self.command.input();
        let body = match &self.command {
            Command::Validate { .. } => validate(&read(input)?)?,
            Command::Analyze { .. } => {
                let ch = load_channel(input)?;
                let rho = self.load_state(ch.dim_in())?;
                analyze(&ch, &rho, &self.capacity_config())?
            }
            Command::Equality { .. } => {
                let ch = load_channel(input)?;
                let rho = self.load_state(ch.dim_in())?;
                equality_report(&equality_test(&ch, &rho, self.tol, &self.equality_config())?)
            }
            Command::HatEquality { .. } => {
                let ch = load_channel(input)?;
                let rho = self.load_state(ch.dim_in())?;
                equality_report(&hat_equality_test(&ch, &rho, self.tol, &self.equality_config())?)
            }
            Command::Gap { .. } => {
                let ch = load_channel(input)?;
                let mut cfg = GapConfig::default().with_seed(self.seed);
                if let Some(r) = self.restarts {
                    cfg.outer_restarts = r;
                }
                let g = gap_d(&ch, &cfg)?;
                Obj::new()
                    .num("gap", g.value)
                    .set("evaluations", g.evaluations)
                    .num("mutual_information", g.mutual_information)
                    .set("capacity", capacity_report(&g.capacity))
                    .set("state", report::state(&g.state))
                    .build()
            }
            Command::Separate { .. } => {
                let ch = load_channel(input)?;
                match two_rank_separation(&ch, self.tol, &self.equality_config())? {
                    None => Obj::new()
                        .set("found", false)
                        .set("note", "channel is completely depolarizing")
                        .build(),
                    Some(s) => Obj::new()
                        .set("found", true)
                        .num("gap", s.gap)
                        .num("coherence", s.coherence)
                        .set("phi", report::vector(&s.phi))
                        .set("psi", report::vector(&s.psi))
                        .set("state", report::state(&s.state))
                        .build(),
                }
            }
            Command::GaussianClassify { .. } => gaussian(&GaussianDocument::parse(&read(input)?)?)?,
        };
        Ok(Obj::new().set("inputs", self.inputs()).set("report", body).build())
    }
}

fn validate(text: &str) -> Result<Value, CliError> {
    Ok(match Document::parse(text)? {
        Document::Channel(doc) => {
            let ch = doc.to_channel()?;
            Obj::new()
                .set("kind", "channel")
                .set("valid", true)
                .set("dim_in", ch.dim_in())
                .set("dim_out", ch.dim_out())
                .set("kraus_count", ch.kraus().len())
                .build()
        }
        Document::State(doc) => {
            let rho = doc.to_state()?;
            Obj::new()
                .set("kind", "state")
                .set("valid", true)
                .set("dim", rho.dim())
                .set("rank", rho.rank()?)
                .num("entropy", vn_entropy(&rho)?)
                .build()
        }
        Document::Gaussian(doc) => {
            let p = doc.to_params()?;
            Obj::new()
                .set("kind", "gaussian")
                .set("valid", true)
                .set("s_a", p.s_a())
                .set("s_b", p.s_b())
                .num("nid_min_eigenvalue", p.nid_min_eigenvalue()?)
                .set("warnings", p.warnings())
                .build()
        }
    })
}

fn capacity_report(c: &CapacityResult) -> Value {
    Obj::new()
        .num("value", c.value)
        .set("converged", c.converged)
        .set("restarts_used", c.restarts_used)
        .set("best_restart", c.best_restart)
        .num("optimizer_slack", c.slack)
        .set("ensemble_size", c.best_ensemble.len())
        .build()
}

fn analyze(ch: &QuantumChannel, rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<Value, CliError> {
    let h = vn_entropy(rho)?;
    let cap = constrained_holevo_capacity(ch, rho, cfg)?;
    let info = mutual_information(ch, rho)?;
    let exchange = entropy_exchange(ch, rho)?;
    let output = vn_entropy(&ch.apply(rho)?)?;
    Ok(Obj::new()
        .num("input_entropy", h)
        .num("output_entropy", output)
        .num("entropy_exchange", exchange)
        .num("mutual_information", info)
        .set("capacity", capacity_report(&cap))
        .set(
            "slacks",
            Obj::new()
                .num("entropy_minus_capacity", h - cap.value)
                .num("information_minus_capacity", info - cap.value)
                .num("twice_entropy_minus_information", 2.0 * h - info)
                .build(),
        )
        .build())
}

fn equality_report(r: &EqualityReport) -> Value {
    let certificate = r.certificate.as_ref().map_or(Value::Null, |f| {
        Value::Array(f.vectors().iter().map(|v| report::vector(v)).collect())
    });
    Obj::new()
        .set("verdict", format!("{:?}", r.verdict))
        .set("reason", format!("{:?}", r.reason))
        .set("method", format!("{:?}", r.method))
        .set("numeric_gap", r.numeric_gap.map_or(Value::Null, num))
        .num("residual", r.residual)
        .set("certificate", certificate)
        .set("diagnostics", r.diagnostics.clone())
        .build()
}

fn classification(c: &GaussianClassification) -> Value {
    Obj::new()
        .set("case", c.case.label())
        .set("ran_dim", c.ran_k_dim)
        .set("complement_dim", c.complement_dim)
        .set("complement_symplectic_rank", c.complement_symplectic_rank)
        .set(
            "complement_basis",
            Value::Array(c.complement_basis.iter().map(|v| report::real_vector(v)).collect()),
        )
        .set("notes", c.notes.clone())
        .build()
}

fn mode_type(t: &OneModeType) -> Value {
    let base = Obj::new().set("label", t.label());
    match t {
        OneModeType::Other {
            rank_k,
            form_preserved,
            rank_alpha,
        } => base
            .set("rank_k", *rank_k)
            .set("form_preserved", *form_preserved)
            .set("rank_alpha", *rank_alpha)
            .build(),
        _ => base.build(),
    }
}

fn gaussian(doc: &GaussianDocument) -> Result<Value, CliError> {
    let p = doc.to_params()?;
    let rel = comp_rel_subspace(&p)?;
    let one_mode = match one_mode_type(&p) {
        Ok(t) => mode_type(&t),
        Err(qcap_core::Error::NotOneMode { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    Ok(Obj::new()
        .set("nid", true)
        .num("nid_min_eigenvalue", p.nid_min_eigenvalue()?)
        .set("direct", classification(&classify_direct(&p)?))
        .set("complementary", classification(&classify_complementary(&p)?))
        .set(
            "comp_rel_subspace",
            Obj::new()
                .set("dim", rel.subspace.dim())
                .set(
                    "basis",
                    Value::Array(rel.subspace.basis().iter().map(|v| report::real_vector(v)).collect()),
                )
                .set("kernel_alpha_dim", rel.kernel_alpha.dim())
                .build(),
        )
        .set("one_mode_type", one_mode)
        .set("warnings", p.warnings())
        .build())
}

/// Renders the report in the requested form.
pub fn render(cli: &Cli, v: &Value) -> String {
    if cli.json {
        report::to_json(v)
    } else {
        report::to_text(v)
    }
}

/// Parses `args`, runs the command and writes the report. Returns the
/// process exit code; diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli.execute().and_then(|v| {
        let text = render(&cli, &v);
        match &cli.out {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
