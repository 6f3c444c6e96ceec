//! Job configuration: a single self-describing TOML file.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Hamiltonian polynomial in x, y, e.g. `"1/2*y^2 + 1/3*x^3 - x"`.
    pub hamiltonian: String,
    /// Perturbation 1-form ω = P dx + Q dy as two polynomial strings.
    #[serde(default)]
    pub perturbation: Option<Perturbation>,
    /// Truncation length for iterated integrals (`connection`, `verify-pf`,
    /// `monodromy`).
    #[serde(default = "default_k")]
    pub k: usize,
    /// Melnikov order cap for the `melnikov` and `zeros` commands.
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Nest interval on the transversal.
    pub p_interval: [f64; 2],
    /// Seed base point; must lie on a closed oval.
    pub p_seed: f64,
    /// Number of nest sample points.
    #[serde(default = "default_samples")]
    pub nest_samples: usize,
    /// Master seed: all sample placement derives from it.
    #[serde(default)]
    pub seed: u64,
    pub commands: Vec<CommandName>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub p: String,
    pub q: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Certify,
    Decompose,
    Connection,
    VerifyPf,
    Monodromy,
    Melnikov,
    PoincareFit,
    Zeros,
}

impl std::fmt::Display for CommandName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CommandName::Certify => "certify",
            CommandName::Decompose => "decompose",
            CommandName::Connection => "connection",
            CommandName::VerifyPf => "verify-pf",
            CommandName::Monodromy => "monodromy",
            CommandName::Melnikov => "melnikov",
            CommandName::PoincareFit => "poincare-fit",
            CommandName::Zeros => "zeros",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Quadrature relative tolerance.
    pub quadrature_rtol: f64,
    /// Allowed |H - t| drift on traces.
    pub level_tol: f64,
    /// Vanishing threshold for ∮ω_j relative to the oval arclength scale.
    pub melnikov_vanish: f64,
    /// Clearance between continuation paths and the singular locus.
    pub continuation_margin: f64,
    /// Monodromy loop radius.
    pub monodromy_radius: f64,
    /// Root-of-unity search bound for quasiunipotency.
    pub root_order: u32,
    /// ε-grid for the Poincaré fit.
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub eps_count: usize,
    /// Target bracket width for zero counting.
    pub zero_bracket: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature_rtol: 1e-12,
            level_tol: 1e-10,
            melnikov_vanish: 1e-7,
            continuation_margin: 1e-3,
            monodromy_radius: 0.35,
            root_order: 60,
            eps_lo: 1e-4,
            eps_hi: 1e-2,
            eps_count: 8,
            zero_bracket: 1e-6,
        }
    }
}

fn default_k() -> usize {
    2
}

fn default_k_max() -> usize {
    3
}

fn default_samples() -> usize {
    9
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: JobConfig = toml::from_str(text).context("malformed job config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.p_interval[1] <= self.p_interval[0] {
            bail!("config field `p_interval`: upper bound must exceed lower bound");
        }
        if self.nest_samples < 2 {
            bail!("config field `nest_samples`: need at least 2");
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("quadrature_rtol", t.quadrature_rtol),
            ("level_tol", t.level_tol),
            ("melnikov_vanish", t.melnikov_vanish),
            ("continuation_margin", t.continuation_margin),
            ("monodromy_radius", t.monodromy_radius),
            ("eps_lo", t.eps_lo),
            ("eps_hi", t.eps_hi),
            ("zero_bracket", t.zero_bracket),
        ] {
            if !(v > 0.0) {
                bail!("config field `tolerances.{name}`: must be positive, got {v}");
            }
        }
        let needs_omega = self.commands.iter().any(|c| {
            matches!(
                c,
                CommandName::Decompose
                    | CommandName::Melnikov
                    | CommandName::PoincareFit
                    | CommandName::Zeros
            )
        });
        if needs_omega && self.perturbation.is_none() {
            bail!("config field `perturbation`: required by the requested commands");
        }
        Ok(())
    }

    /// Deterministic nest sample points: an even grid over `p_interval`
    /// with a seed-derived golden-ratio phase, away from the endpoints.
    pub fn nest_points(&self) -> Vec<f64> {
        let [lo, hi] = self.p_interval;
        let n = self.nest_samples;
        let phase = (self.seed as f64 * 0.618_033_988_749_894_9).fract() * 0.5;
        (0..n)
            .map(|i| {
                let u = (i as f64 + 0.25 + phase) / (n as f64 + 0.5);
                lo + (hi - lo) * u
            })
            .collect()
    }
}

pub const EXAMPLE_CONFIG: &str = r#"# nestpf job configuration
#
# Polynomials use the grammar documented in the README: rational
# coefficients like 3/2, variables x and y, '*' for products, '^' for
# powers. One-forms are written per component below.

hamiltonian = "1/2*y^2 + 1/3*x^3 - x"
k = 2            # iterated-integral truncation for connection/verify-pf/monodromy
k_max = 3        # Melnikov order cap
p_interval = [0.45, 1.1]
p_seed = 0.8
nest_samples = 9
seed = 42
commands = ["certify", "connection", "verify-pf", "monodromy", "melnikov", "zeros"]
"#;

pub const EXAMPLE_TAIL: &str = r#"
# Perturbation ω = P dx + Q dy (needed by decompose/melnikov/poincare-fit/zeros).
[perturbation]
p = "y^3 + x*y"
q = "0"

[tolerances]
# All entries optional; these are the defaults.
quadrature_rtol = 1e-12
level_tol = 1e-10
melnikov_vanish = 1e-7
continuation_margin = 1e-3
monodromy_radius = 0.35
root_order = 60
eps_lo = 1e-4
eps_hi = 1e-2
eps_count = 8
zero_bracket = 1e-6
"#;
