use clap::{Args, Parser, Subcommand};
use orthotensor::coefficients::residual_check;
use orthotensor::expansion::{
    contract_ap, multipoles, potential_direct, potential_series, reconstruct, ChargeDistribution,
};
use orthotensor::moments::build_moment_table;
use orthotensor::polynomials::PolynomialFamily;
use orthotensor::verification::{check_appendix_identities, gram_matrix, monte_carlo_inner};
use orthotensor::weights::{Weight, WeightRegistry, WeightSpec};
use orthotensor::{Error, Result};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "orthotensor",
    version,
    about = "Orthonormal tensor polynomials under radial weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Weight family name
    #[arg(long, default_value = "gaussian")]
    weight: String,
    /// Spatial dimension D
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Temperature (fermi_dirac, bose_einstein, graphene)
    #[arg(long)]
    theta: Option<f64>,
    /// Fugacity (fermi_dirac, bose_einstein, graphene)
    #[arg(long)]
    z: Option<f64>,
    /// Screening parameter (yukawa)
    #[arg(long)]
    mu: Option<f64>,
    /// Write the JSON result to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Moment table I0..I8
    Moments(Common),
    /// Coefficient set
    Coeffs(Common),
    /// Components of P_N at a point
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<f64>,
    },
    /// Gram matrix, moment identities and equation residuals against a tolerance
    #[command(alias = "gram")]
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Adds a Monte Carlo estimate of two Gram entries with this seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Coefficients of P_0..P_4 in D = 1, constant term first
    Project1d(Common),
    /// Truncated expansion of f(xi - u)
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<f64>,
    },
    /// Orthonormal multipoles of a point-charge CSV and the potential at xi
    Multipole {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long)]
        charges: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        xi: Vec<f64>,
    },
}

impl Common {
    fn spec(&self) -> WeightSpec {
        let mut spec = WeightSpec::new(self.weight.as_str());
        for (key, value) in [("theta", self.theta), ("z", self.z), ("mu", self.mu)] {
            if let Some(v) = value {
                spec = spec.with(key, v);
            }
        }
        spec
    }

    fn weight(&self) -> Result<Arc<dyn Weight>> {
        WeightRegistry::with_builtins().build(&self.spec())
    }

    fn family(&self) -> Result<PolynomialFamily> {
        PolynomialFamily::new(self.weight()?, self.dim)
    }
}

/// Result document plus whether it counts as a pass.
struct Outcome {
    body: Value,
    pass: bool,
}

impl From<Value> for Outcome {
    fn from(body: Value) -> Self {
        Outcome { body, pass: true }
    }
}

fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Moments(c) => {
            let table = build_moment_table(c.weight()?.as_ref(), c.dim, 4)?;
            Ok(json!(table).into())
        }
        Command::Coeffs(c) => Ok(json!(c.family()?.coeffs).into()),
        Command::Eval { common, order, xi } => {
            let fam = common.family()?;
            let tensor = fam.eval_tensor(*order, xi)?;
            Ok(
                json!({ "weight": common.spec(), "order": order, "xi": xi, "tensor": tensor })
                    .into(),
            )
        }
        Command::Verify { common, tol, seed } => {
            if tol.is_nan() || *tol <= 0.0 {
                return Err(Error::Domain(format!(
                    "tolerance must be positive, got {tol}"
                )));
            }
            let fam = common.family()?;
            let mut report = gram_matrix(&fam)?;
            report.wall_time_s = None;
            let residual = residual_check(&fam.coeffs, &fam.table);
            let appendix = check_appendix_identities(&fam.table, fam.dim)?;
            let achieved = report.max_deviation.max(residual).max(appendix);
            let mut body = json!({
                "gram": report,
                "equation_residual": residual,
                "moment_identity_error": appendix,
                "tolerance": tol,
                "achieved": achieved,
                "pass": achieved <= *tol,
            });
            if let Some(seed) = seed {
                let a = monte_carlo_inner(&fam, 1, &[1], 1, &[1], 100_000, *seed)?;
                let b = monte_carlo_inner(&fam, 2, &[1, 1], 2, &[1, 1], 100_000, *seed)?;
                body["monte_carlo"] = json!({
                    "seed": seed,
                    "entries": [
                        { "m": 1, "n": 1, "i": [1], "j": [1], "exact": 1.0, "estimate": a },
                        { "m": 2, "n": 2, "i": [1, 1], "j": [1, 1], "exact": 2.0, "estimate": b },
                    ],
                });
            }
            Ok(Outcome {
                body,
                pass: achieved <= *tol,
            })
        }
        Command::Project1d(c) => {
            if c.dim != 1 {
                return Err(Error::Domain(format!(
                    "project1d needs --dim 1, got {}",
                    c.dim
                )));
            }
            let polys = c.family()?.project_1d()?;
            Ok(json!({ "weight": c.spec(), "polynomials": polys }).into())
        }
        Command::Expand {
            common,
            order,
            xi,
            u,
        } => {
            let fam = common.family()?;
            let series = reconstruct(&fam, u, xi, *order)?;
            let shifted: Vec<f64> = xi.iter().zip(u).map(|(x, v)| x - v).collect();
            let exact = fam.weight_at(&shifted)?;
            let contractions = contract_ap(&fam, u, xi)?;
            Ok(json!({
                "weight": common.spec(),
                "order": order,
                "xi": xi,
                "u": u,
                "reconstruction": series,
                "exact": exact,
                "relative_error": (series - exact) / exact,
                "contractions": contractions,
            })
            .into())
        }
        Command::Multipole {
            common,
            order,
            charges,
            xi,
        } => {
            let fam = common.family()?;
            let text = std::fs::read_to_string(charges)
                .map_err(|e| Error::Io(format!("{}: {e}", charges.display())))?;
            let rho = ChargeDistribution::from_csv(&text, fam.dim)?;
            let q = multipoles(&fam, &rho)?;
            let series = potential_series(&fam, &rho, xi, *order)?;
            let direct = potential_direct(&fam, &rho, xi)?;
            Ok(json!({
                "weight": common.spec(),
                "order": order,
                "xi": xi,
                "charges": rho.charges.len(),
                "multipoles": q,
                "potential_series": series,
                "potential_direct": direct,
                "relative_error": (series - direct) / direct,
            })
            .into())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Convergence { .. } => 3,
        Error::Consistency(_) => 1,
        _ => 2,
    }
}

fn error_body(kind: &str, message: String) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

fn print(body: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(body).expect("JSON values serialize")
    );
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            print(&error_body(
                "usage",
                e.render().to_string().trim().to_string(),
            ));
            return ExitCode::from(2);
        }
    };
    let out = match &cli.command {
        Command::Moments(c) | Command::Coeffs(c) | Command::Project1d(c) => c.out.clone(),
        Command::Eval { common, .. }
        | Command::Verify { common, .. }
        | Command::Expand { common, .. }
        | Command::Multipole { common, .. } => common.out.clone(),
    };
    match run(&cli.command) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.body).expect("JSON values serialize");
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    print(&error_body("io", format!("{}: {e}", path.display())));
                    return ExitCode::from(2);
                }
            } else {
                println!("{text}");
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let mut body = error_body(e.kind(), e.to_string());
            if let Error::Convergence {
                requested,
                achieved,
                evals,
            } = &e
            {
                body["error"]["requested"] = json!(requested);
                body["error"]["achieved"] = json!(achieved);
                body["error"]["evals"] = json!(evals);
            }
            print(&body);
            ExitCode::from(exit_code(&e))
        }
    }
}
