use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use autorbit_core::{Complex, ContourConfig, EntireFunction, Result};

#[derive(Debug, Parser)]
#[command(name = "autorbit", version, about = "Orbits of entire functions and checks of their identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover the orbit of z inside a disk.
    Orbit(OrbitArgs),
    /// Run identity suites.
    Verify(VerifyArgs),
    /// Counting function, order estimate and Wiman radii.
    Density(DensityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionName {
    Exp,
    Cossqrt,
    /// (cos w^(1/4) + cosh w^(1/4)) / 2
    Quarter,
    /// w^n
    Monomial,
    /// w^2 + w
    Quadzz,
    /// Polynomial with ascending --coeffs.
    Poly,
    /// p(w) exp(g(w)) with --coeffs for p and --gcoeffs for g.
    Polyexp,
    /// c exp(w) + w
    Ng,
}

#[derive(Debug, Clone, Args)]
pub struct FunctionArgs {
    #[arg(long, value_enum)]
    pub function: Option<FunctionName>,
    /// Exponent for the monomial.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Ascending coefficients, comma separated; complex values as `1-2i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<String>,
    /// Ascending coefficients of g for `polyexp`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gcoeffs: Vec<String>,
    /// The constant c for `ng`.
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    pub c: String,
}

#[derive(Debug, Clone, Args)]
pub struct QuadratureArgs {
    /// Initial node count on each circle (power of two).
    #[arg(long)]
    pub nodes_initial: Option<usize>,
    #[arg(long)]
    pub max_doublings: Option<u32>,
    #[arg(long)]
    pub tol_abs: Option<f64>,
    #[arg(long)]
    pub tol_rel: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long)]
    pub radius: f64,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Vieta,
    Jensen,
    Derivsum,
    Vanishing,
    Density,
    Fixedpoints,
    Reconstruction,
    Expg,
    Tshift,
    Nesting,
    Fiber,
    Cycle,
    Folner,
    Metric,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[command(flatten)]
    pub function: FunctionArgs,
    /// Base point; each suite has its own default.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Second point for two-point identities.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Extra random base points for the derivative-sum suite.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, default_value = "1+0i", allow_hyphen_values = true)]
    pub z: String,
    /// Radius grid `lo:hi:log` or `lo:hi:lin`, with an optional fourth field
    /// for the number of points (default 4 per decade, or 16).
    #[arg(long)]
    pub rgrid: Option<String>,
    /// Search for Wiman radii instead of using a grid.
    #[arg(long)]
    pub wiman: bool,
    /// Order used for the densities and the Wiman test.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 1e2)]
    pub r_lo: f64,
    #[arg(long, default_value_t = 1e8)]
    pub r_hi: f64,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn bad(message: String) -> autorbit_core::Error {
    autorbit_core::Error::InvalidInput { message }
}

/// Parses `1`, `-2.5`, `3i`, `-i`, `1+0i`, `2-1e-3i`; `j` is accepted for `i`.
pub fn parse_complex(text: &str) -> Result<Complex> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let fail = || bad(format!("not a complex number: {text:?}"));
    if s.is_empty() {
        return Err(fail());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| fail());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| fail())?,
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| fail())? };
    Ok(Complex::new(re, im))
}

fn parse_list(items: &[String]) -> Result<Vec<Complex>> {
    items.iter().map(|s| parse_complex(s)).collect()
}

impl FunctionArgs {
    pub fn name_or(&self, default: FunctionName) -> FunctionName {
        self.function.unwrap_or(default)
    }

    pub fn build(&self, default: FunctionName) -> Result<EntireFunction> {
        match self.name_or(default) {
            FunctionName::Exp => Ok(EntireFunction::exp()),
            FunctionName::Cossqrt => Ok(EntireFunction::cos_sqrt()),
            FunctionName::Quarter => Ok(EntireFunction::quarter_order()),
            FunctionName::Monomial => {
                if self.n == 0 {
                    return Err(bad("monomial exponent must be positive".into()));
                }
                Ok(EntireFunction::monomial(self.n))
            }
            FunctionName::Quadzz => Ok(EntireFunction::quadratic_zz()),
            FunctionName::Poly => {
                if self.coeffs.is_empty() {
                    return Err(bad("poly needs --coeffs".into()));
                }
                EntireFunction::polynomial(&parse_list(&self.coeffs)?)
            }
            FunctionName::Polyexp => {
                let one = Complex::new(1.0, 0.0);
                // (w - 1)(w - 2) e^w unless given
                let p = if self.coeffs.is_empty() {
                    vec![Complex::new(2.0, 0.0), Complex::new(-3.0, 0.0), one]
                } else {
                    parse_list(&self.coeffs)?
                };
                let g = if self.gcoeffs.is_empty() { vec![Complex::new(0.0, 0.0), one] } else { parse_list(&self.gcoeffs)? };
                EntireFunction::poly_times_exp(&p, &g)
            }
            FunctionName::Ng => Ok(EntireFunction::ng_factor(parse_complex(&self.c)?)),
        }
    }
}

impl QuadratureArgs {
    pub fn config(&self) -> Result<ContourConfig> {
        let mut cfg = ContourConfig::default();
        if let Some(n) = self.nodes_initial {
            cfg.nodes_initial = n;
        }
        if let Some(d) = self.max_doublings {
            cfg.max_doublings = d;
        }
        if let Some(t) = self.tol_abs {
            cfg.tol_abs = t;
        }
        if let Some(t) = self.tol_rel {
            cfg.tol_rel = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `lo:hi:log[:count]` or `lo:hi:lin[:count]`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let fail = || bad(format!("radius grid must look like lo:hi:log[:count], got {text:?}"));
    if !(3..=4).contains(&parts.len()) {
        return Err(fail());
    }
    let lo: f64 = parts[0].parse().map_err(|_| fail())?;
    let hi: f64 = parts[1].parse().map_err(|_| fail())?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(fail());
    }
    let log = match parts[2] {
        "log" => true,
        "lin" => false,
        _ => return Err(fail()),
    };
    let count = match parts.get(3) {
        Some(c) => c.parse::<usize>().map_err(|_| fail())?,
        None if log => ((hi / lo).log10() * 4.0).ceil() as usize + 1,
        None => 16,
    };
    if count < 2 {
        return Err(fail());
    }
    let t = |i: usize| i as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if log { lo * (hi / lo).powf(t(i)) } else { lo + (hi - lo) * t(i) })
        .collect())
}
