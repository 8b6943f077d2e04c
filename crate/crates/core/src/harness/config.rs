//! Scenario configuration files.
//!
//! A config is a TOML document with a top-level `scenario` key and the
//! sections `[model]`, `[data]`, `[grid]`, `[integrator]`, `[virial]`,
//! `[weights]`, `[identity]`, `[skyrmion]`, `[thresholds]` and `[run]`. Every
//! key except `scenario` has a default. `--set section.key=value` overrides
//! are applied to the parsed document before validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{FunctionalKind, LemmaForm, VirialConfig};
use crate::error::{Error, Result};
use crate::grid::{build_grid, RadialGrid};
use crate::integrator::IntegratorConfig;
use crate::model::{ModelKind, ModelParams};
use crate::state::InitialDataSpec;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Conservation,
    IdentityVerification,
    ExteriorDecay,
    IntegrabilityBound,
    WeightedGrowth,
    VirialSign,
    AnchoredMonotone,
    Skyrmion,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Conservation => "conservation",
            Scenario::IdentityVerification => "identity-verification",
            Scenario::ExteriorDecay => "exterior-decay",
            Scenario::IntegrabilityBound => "integrability-bound",
            Scenario::WeightedGrowth => "weighted-growth",
            Scenario::VirialSign => "virial-sign",
            Scenario::AnchoredMonotone => "anchored-monotone",
            Scenario::Skyrmion => "skyrmion",
        }
    }

    /// Whether the scenario time-steps a field (everything but the Skyrmion).
    pub fn evolves(self) -> bool {
        self != Scenario::Skyrmion
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub alpha: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            kind: ModelKind::Skyrme,
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub cells: usize,
    pub r_max: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            cells: 4096,
            r_max: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VirialSection {
    /// `None` selects -1 (Skyrme) or `(n - 2)/8` (Adkins-Nappi).
    pub gamma: Option<f64>,
    /// Momentum-weight exponents checked by the virial-sign scenario; empty
    /// selects 6, 7, 8 (Skyrme) or 5, 7, 10 (Adkins-Nappi).
    pub exponents: Vec<f64>,
    pub b: f64,
    pub c0: f64,
    pub lemma_form: LemmaForm,
    /// Also rerun at half amplitude and compare the virial remainder (Skyrme only).
    pub remainder_scaling: bool,
}

impl Default for VirialSection {
    fn default() -> Self {
        let v = VirialConfig::default();
        Self {
            gamma: None,
            exponents: Vec::new(),
            b: v.b,
            c0: v.c0,
            lemma_form: v.lemma_form,
            remainder_scaling: true,
        }
    }
}

impl VirialSection {
    pub fn exponents_for(&self, model: ModelKind) -> Vec<f64> {
        if !self.exponents.is_empty() {
            return self.exponents.clone();
        }
        match model {
            ModelKind::Skyrme => vec![6.0, 7.0, 8.0],
            ModelKind::AdkinsNappi => vec![5.0, 7.0, 10.0],
        }
    }

    pub fn config(&self, n: f64) -> VirialConfig {
        VirialConfig {
            gamma: self.gamma,
            n,
            b: self.b,
            c0: self.c0,
            lemma_form: self.lemma_form,
        }
    }
}

/// Parameters of the tanh weights and the power-law exponent lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsSection {
    pub scale: f64,
    pub sigma: f64,
    pub sigma_tilde: f64,
    pub t0: f64,
    pub identity_exponents: Vec<f64>,
    pub growth_exponents: Vec<f64>,
}

impl Default for WeightsSection {
    fn default() -> Self {
        Self {
            scale: 1.0,
            sigma: -1.5,
            sigma_tilde: -1.25,
            t0: 20.0,
            identity_exponents: vec![4.0, 6.0],
            growth_exponents: vec![3.0, 4.0],
        }
    }
}

impl WeightsSection {
    pub fn tanh_cone(&self) -> Weight {
        Weight::TanhCone {
            scale: self.scale,
            sigma: self.sigma,
        }
    }

    pub fn half_tanh(&self) -> Weight {
        Weight::HalfTanhShifted {
            scale: self.scale,
            sigma: self.sigma,
            sigma_tilde: self.sigma_tilde,
            t0: self.t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCheck {
    pub kind: FunctionalKind,
    pub weight: Weight,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitySection {
    /// Empty selects the local energy with the tanh cone plus the momentum
    /// and dilation functionals with every identity exponent.
    pub checks: Vec<IdentityCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkyrmionSection {
    /// Couplings whose rescaled profiles are compared with the configured one.
    pub collapse_alphas: Vec<f64>,
}

impl Default for SkyrmionSection {
    fn default() -> Self {
        Self {
            collapse_alphas: vec![0.5, 2.0],
        }
    }
}

/// Every pass/fail threshold used by the scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub energy_drift: f64,
    pub convergence_min: f64,
    pub convergence_max: f64,
    pub identity_window: [f64; 2],
    pub exterior_ratio: f64,
    pub decay_margin: f64,
    pub finite_speed: f64,
    pub finite_speed_cells: f64,
    pub integrability_start: f64,
    pub integrability_split: f64,
    pub tail_fraction: f64,
    pub growth_window: [f64; 2],
    pub growth_slack: f64,
    pub sign_tolerance: f64,
    pub smallness_linf: f64,
    pub scaling_min: f64,
    pub scaling_max: f64,
    pub monotone_start: f64,
    pub bracket: f64,
    pub static_residual: f64,
    pub boundary: f64,
    pub collapse: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            energy_drift: 1e-5,
            convergence_min: 3.5,
            convergence_max: 4.5,
            identity_window: [1.0, 10.0],
            exterior_ratio: 1e-8,
            decay_margin: 1.0,
            finite_speed: 1e-10,
            finite_speed_cells: 4.0,
            integrability_start: 2.0,
            integrability_split: 20.0,
            tail_fraction: 0.05,
            growth_window: [10.0, 40.0],
            growth_slack: 0.3,
            sign_tolerance: 1e-3,
            smallness_linf: 0.05,
            scaling_min: 3.0,
            scaling_max: 6.0,
            monotone_start: 2.0,
            bracket: 1e-10,
            static_residual: 1e-6,
            boundary: 1e-2,
            collapse: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub name: Option<String>,
    pub output_dir: Option<PathBuf>,
    /// `None` selects 2 for identity verification and 1 otherwise.
    pub refinement_levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub data: InitialDataSpec,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub virial: VirialSection,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub identity: IdentitySection,
    #[serde(default)]
    pub skyrmion: SkyrmionSection,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub run: RunSection,
}

/// Environment variable that replaces the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "SKYRME_OUT_DIR";

impl ScenarioConfig {
    /// Fully defaulted config for a scenario and model.
    pub fn new(scenario: Scenario, model: ModelKind) -> Self {
        Self {
            scenario,
            model: ModelSection {
                kind: model,
                ..Default::default()
            },
            data: InitialDataSpec::default(),
            grid: GridSection::default(),
            integrator: IntegratorConfig::default(),
            virial: VirialSection::default(),
            weights: WeightsSection::default(),
            identity: IdentitySection::default(),
            skyrmion: SkyrmionSection::default(),
            thresholds: Thresholds::default(),
            run: RunSection::default(),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.model.kind, self.model.alpha)
    }

    pub fn build_grid(&self) -> Result<RadialGrid> {
        build_grid(self.grid.cells, self.grid.r_max)
    }

    pub fn refinement_levels(&self) -> usize {
        self.run.refinement_levels.unwrap_or(match self.scenario {
            Scenario::IdentityVerification => 2,
            _ => 1,
        })
    }

    pub fn name(&self) -> String {
        self.run.name.clone().unwrap_or_else(|| format!("{}-{}", self.scenario, self.model.kind))
    }

    /// Output directory: `$SKYRME_OUT_DIR/<name>` when the variable is set,
    /// else `run.output_dir`, else `out/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(base) if !base.is_empty() => PathBuf::from(base).join(self.name()),
            _ => self
                .run
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("out").join(self.name())),
        }
    }

    /// The identity checks to run, with defaults filled in.
    pub fn identity_checks(&self) -> Vec<IdentityCheck> {
        if !self.identity.checks.is_empty() {
            return self.identity.checks.clone();
        }
        let (local, momentum, dilation) = match self.model.kind {
            ModelKind::Skyrme => (
                FunctionalKind::SkyrmeLocalEnergy,
                FunctionalKind::SkyrmeMomentum,
                FunctionalKind::SkyrmeDilation,
            ),
            ModelKind::AdkinsNappi => (
                FunctionalKind::AdkinsNappiLocalEnergy,
                FunctionalKind::AdkinsNappiMomentum,
                FunctionalKind::AdkinsNappiDilation,
            ),
        };
        let mut checks = vec![IdentityCheck {
            kind: local,
            weight: self.weights.tanh_cone(),
        }];
        for kind in [momentum, dilation] {
            for &n in &self.weights.identity_exponents {
                checks.push(IdentityCheck {
                    kind,
                    weight: Weight::power(n),
                });
            }
        }
        checks
    }

    /// Checks every invariant; the error names the violated one.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::ConfigInvalid(m));
        let params = self.params().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        let grid = self.build_grid().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        self.data.validate().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        self.integrator
            .validate()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        if !(self.virial.b > 0.0) {
            return invalid(format!(
                "virial.b = {} must be positive (the exterior region r > (1 + b) t needs b > 0)",
                self.virial.b
            ));
        }
        self.virial
            .config(6.0)
            .validate()
            .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        for w in [self.weights.tanh_cone(), self.weights.half_tanh()] {
            w.validate().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        }
        if self.refinement_levels() == 0 {
            return invalid("run.refinement_levels must be at least 1".into());
        }
        for check in &self.identity.checks {
            check
                .kind
                .check_model(&params)
                .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
            check.weight.validate().map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        }
        let t = &self.thresholds;
        if t.convergence_min > t.convergence_max || t.scaling_min > t.scaling_max {
            return invalid("threshold ranges must have min <= max".into());
        }
        match self.scenario {
            Scenario::Skyrmion => {
                if params.kind != ModelKind::Skyrme {
                    return invalid("the skyrmion scenario needs model.kind = \"skyrme\"".into());
                }
                if self.skyrmion.collapse_alphas.iter().any(|a| !(*a > 0.0)) {
                    return invalid("skyrmion.collapse_alphas must be positive".into());
                }
                return Ok(());
            }
            Scenario::Conservation if self.integrator.sponge => {
                return invalid("conservation runs must not enable the sponge layer".into());
            }
            Scenario::IntegrabilityBound if self.weights.sigma.abs() <= 1.0 => {
                return invalid(format!(
                    "weights.sigma = {} must satisfy |sigma| > 1 for the integrability bound",
                    self.weights.sigma
                ));
            }
            Scenario::IntegrabilityBound
                if !(t.integrability_start < t.integrability_split && t.integrability_split < self.integrator.t_end) =>
            {
                return invalid(format!(
                    "integrability needs start {} < split {} < t_end {}",
                    t.integrability_start, t.integrability_split, self.integrator.t_end
                ));
            }
            Scenario::WeightedGrowth
                if !(t.growth_window[0] > 0.0
                    && t.growth_window[0] < t.growth_window[1]
                    && t.growth_window[1] <= self.integrator.t_end) =>
            {
                return invalid(format!(
                    "growth window {:?} must satisfy 0 < lo < hi <= t_end = {}",
                    t.growth_window, self.integrator.t_end
                ));
            }
            Scenario::AnchoredMonotone
                if !(t.monotone_start < self.weights.t0 && self.weights.t0 <= self.integrator.t_end) =>
            {
                return invalid(format!(
                    "anchored window needs monotone_start {} < weights.t0 {} <= t_end {}",
                    t.monotone_start, self.weights.t0, self.integrator.t_end
                ));
            }
            _ => {}
        }
        if !self.integrator.sponge {
            let needed = self.data.support_radius() + self.integrator.t_end + 2.0 * grid.spacing();
            if grid.r_max() < needed {
                return invalid(format!(
                    "causal domain violated: r_max = {} < support {} + t_end {} + 2h = {needed}",
                    grid.r_max(),
                    self.data.support_radius(),
                    self.integrator.t_end
                ));
            }
        }
        Ok(())
    }

    /// Same config with `level` halvings of the grid spacing; the observer
    /// stride stays fixed in steps so the record spacing halves too.
    pub fn refined(&self, level: usize) -> Self {
        let mut c = self.clone();
        c.grid.cells = self.grid.cells << level;
        c
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn parse_error(text: &str, e: toml::de::Error) -> Error {
    match e.span() {
        Some(span) => Error::ConfigParse {
            line: line_of(text, span.start),
            message: e.message().to_string(),
        },
        None => Error::ConfigInvalid(e.message().to_string()),
    }
}

/// Parses a TOML value given on the command line; bare words become strings.
fn parse_override_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Applies `key=value` with a dotted key to a parsed document.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::ConfigInvalid(format!("override {assignment:?} is not of the form key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::ConfigInvalid(format!("override key {key:?} is malformed")));
    }
    let mut table = doc;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(Error::ConfigInvalid(format!("override key {key:?}: {part} is not a section"))),
        };
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_override_value(raw.trim()));
    Ok(())
}

/// Parses and validates config text with overrides applied in order.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = if overrides.is_empty() {
        toml::from_str(text).map_err(|e| parse_error(text, e))?
    } else {
        let mut doc: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, e))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        doc.try_into().map_err(|e: toml::de::Error| Error::ConfigInvalid(e.message().to_string()))?
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, overrides)
}
