//! Energies, weighted energies, virial functionals and the closed-form
//! right-hand sides of their time derivatives, plus helpers that compare
//! those right-hand sides with numerical time derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{radial_derivative, RadialGrid};
use crate::model::{face_radius, kinetic_factor, potential_bracket, stable_g1, ModelKind, ModelParams};
use crate::quadrature::NeumaierSum;
use crate::state::FieldState;
use crate::weight::{Weight, WeightEval};

/// Functionals with a known time-derivative identity.
///
/// "Local energy" kinds integrate `weight * r^2 * e` where `r^2 e` is the
/// energy density, so a constant weight of one gives the energy.
/// "Momentum" kinds integrate `weight * u_t * u_r` (times `f(u)` for Skyrme),
/// "dilation" kinds integrate `weight * u_t * u` (likewise). The combined
/// virials are `momentum + gamma * dilation` with the weights `r^n` and
/// `r^(n-1)` taken from [`VirialConfig::n`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionalKind {
    SkyrmeEnergy,
    AdkinsNappiEnergy,
    WeightedEnergy,
    SkyrmeLocalEnergy,
    AdkinsNappiLocalEnergy,
    SkyrmeMomentum,
    SkyrmeDilation,
    AdkinsNappiMomentum,
    AdkinsNappiDilation,
    SkyrmeVirial,
    AdkinsNappiVirial,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 11] = [
        FunctionalKind::SkyrmeEnergy,
        FunctionalKind::AdkinsNappiEnergy,
        FunctionalKind::WeightedEnergy,
        FunctionalKind::SkyrmeLocalEnergy,
        FunctionalKind::AdkinsNappiLocalEnergy,
        FunctionalKind::SkyrmeMomentum,
        FunctionalKind::SkyrmeDilation,
        FunctionalKind::AdkinsNappiMomentum,
        FunctionalKind::AdkinsNappiDilation,
        FunctionalKind::SkyrmeVirial,
        FunctionalKind::AdkinsNappiVirial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionalKind::SkyrmeEnergy => "skyrme-energy",
            FunctionalKind::AdkinsNappiEnergy => "adkins-nappi-energy",
            FunctionalKind::WeightedEnergy => "weighted-energy",
            FunctionalKind::SkyrmeLocalEnergy => "skyrme-local-energy",
            FunctionalKind::AdkinsNappiLocalEnergy => "adkins-nappi-local-energy",
            FunctionalKind::SkyrmeMomentum => "skyrme-momentum",
            FunctionalKind::SkyrmeDilation => "skyrme-dilation",
            FunctionalKind::AdkinsNappiMomentum => "adkins-nappi-momentum",
            FunctionalKind::AdkinsNappiDilation => "adkins-nappi-dilation",
            FunctionalKind::SkyrmeVirial => "skyrme-virial",
            FunctionalKind::AdkinsNappiVirial => "adkins-nappi-virial",
        }
    }

    /// Model the functional belongs to; `None` for the model-agnostic weighted energy.
    pub fn model(self) -> Option<ModelKind> {
        use FunctionalKind::*;
        match self {
            SkyrmeEnergy | SkyrmeLocalEnergy | SkyrmeMomentum | SkyrmeDilation | SkyrmeVirial => Some(ModelKind::Skyrme),
            AdkinsNappiEnergy | AdkinsNappiLocalEnergy | AdkinsNappiMomentum | AdkinsNappiDilation | AdkinsNappiVirial => {
                Some(ModelKind::AdkinsNappi)
            }
            WeightedEnergy => None,
        }
    }

    /// Whether the functional uses the caller-supplied weight.
    pub fn uses_weight(self) -> bool {
        use FunctionalKind::*;
        !matches!(self, SkyrmeEnergy | AdkinsNappiEnergy | SkyrmeVirial | AdkinsNappiVirial)
    }

    pub fn check_model(self, params: &ModelParams) -> Result<()> {
        match self.model() {
            Some(m) if m != params.kind => Err(Error::IncompatibleKind {
                kind: self.name().into(),
                model: params.kind.name().into(),
            }),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which version of the momentum-type derivative identities to evaluate.
///
/// `Corrected` is the identity that actually holds for the equations of
/// motion. `AsPrinted` keeps two coefficients of the published form: the
/// Skyrme momentum quartic term `-(alpha^2/2) p(r) sin^2 u (u_t^2 + u_r^2)`
/// and the Adkins-Nappi momentum factor `1/2` on `(2 psi/r - psi') sin^2 u / r^2`.
/// Its identity residual does not converge to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaForm {
    #[default]
    Corrected,
    AsPrinted,
}

/// Parameters of the virial functionals and the exterior-cone diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VirialConfig {
    /// Combination coefficient; `None` selects the model default.
    pub gamma: Option<f64>,
    /// Exponent of the momentum weight `r^n`; the dilation weight is `r^(n-1)`.
    pub n: f64,
    /// Cone opening: the exterior region is `r > (1 + b) t`.
    pub b: f64,
    /// Decay rate of the integrability kernel `exp(-c0 |r + sigma t|)`.
    pub c0: f64,
    pub lemma_form: LemmaForm,
}

impl Default for VirialConfig {
    fn default() -> Self {
        Self {
            gamma: None,
            n: 6.0,
            b: 0.5,
            c0: 2.0,
            lemma_form: LemmaForm::Corrected,
        }
    }
}

/// Skyrme combination coefficient.
pub const SKYRME_GAMMA: f64 = -1.0;

/// Adkins-Nappi combination coefficient `(n - 2) / 8`.
pub fn adkins_nappi_gamma(n: f64) -> f64 {
    (n - 2.0) / 8.0
}

impl VirialConfig {
    pub fn gamma_for(&self, model: ModelKind) -> f64 {
        self.gamma.unwrap_or(match model {
            ModelKind::Skyrme => SKYRME_GAMMA,
            ModelKind::AdkinsNappi => adkins_nappi_gamma(self.n),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!("cone opening b = {} must be positive", self.b)));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidParameter(format!("decay rate c0 = {} must be positive", self.c0)));
        }
        if !self.n.is_finite() || self.gamma.is_some_and(|g| !g.is_finite()) {
            return Err(Error::InvalidParameter("virial exponent and gamma must be finite".into()));
        }
        Ok(())
    }
}

/// Per-time diagnostics row; columns keep insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub values: Vec<(String, f64)>,
    pub residuals: Vec<(String, f64)>,
    pub linf_u: f64,
}

impl DiagnosticsSample {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }
}

/// Node-wise field data shared by all integrands.
struct Fields<'a> {
    h: f64,
    t: f64,
    u: &'a [f64],
    ut: &'a [f64],
    ur: Vec<f64>,
}

impl<'a> Fields<'a> {
    fn new(state: &'a FieldState, grid: &RadialGrid) -> Self {
        Self {
            h: grid.spacing(),
            t: state.t,
            u: &state.u,
            ut: &state.ut,
            ur: radial_derivative(&state.u, grid),
        }
    }

    #[inline]
    fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    /// Midpoint rule of `term(i, r)` over the nodes, in node order.
    fn integrate(&self, mut term: impl FnMut(usize, f64) -> f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for i in 0..self.u.len() {
            acc.add(term(i, self.r(i)));
        }
        acc.value() * self.h
    }
}

/// Energy density divided by `r^2` with a node derivative for `u_r`.
#[inline]
fn energy_bracket(params: &ModelParams, r: f64, u: f64, ut: f64, ur: f64) -> f64 {
    kinetic_factor(params, u, r) * (ut * ut + ur * ur) + potential_bracket(params, u, r)
}

/// Discrete energy conserved by the evolution scheme, with `r^2` replaced by
/// `weight` and restricted to points with `r > r_min`. Kinetic and potential
/// terms live on nodes, the gradient term on the faces between nodes.
fn scheme_energy(fields: &Fields<'_>, params: &ModelParams, weight: &Weight, r_min: Option<f64>) -> f64 {
    let t = fields.t;
    scheme_energy_with(fields, params, |r| weight.value(r, t), r_min)
}

fn scheme_energy_with(fields: &Fields<'_>, params: &ModelParams, weight: impl Fn(f64) -> f64, r_min: Option<f64>) -> f64 {
    let keep = |r: f64| r_min.is_none_or(|m| r > m);
    let n = fields.u.len();
    let mut acc = NeumaierSum::new();
    for i in 0..n {
        let r = fields.r(i);
        if keep(r) {
            let u = fields.u[i];
            let ut = fields.ut[i];
            acc.add(weight(r) * (kinetic_factor(params, u, r) * ut * ut + potential_bracket(params, u, r)));
        }
    }
    for j in 0..n.saturating_sub(1) {
        let big_r = face_radius(j, fields.h);
        if keep(big_r) {
            let d = (fields.u[j + 1] - fields.u[j]) / fields.h;
            let f = kinetic_factor(params, 0.5 * (fields.u[j] + fields.u[j + 1]), big_r);
            acc.add(weight(big_r) * f * d * d);
        }
    }
    acc.value() * fields.h
}

/// Conserved energy of the state's model. Computed as the weighted energy
/// with weight `r^2`, so the two agree bit for bit.
///
/// This is the discrete energy that the flux-form evolution conserves; the
/// gradient term uses face differences rather than node derivatives.
pub fn energy(state: &FieldState, grid: &RadialGrid, params: &ModelParams) -> f64 {
    scheme_energy(&Fields::new(state, grid), params, &Weight::power(2.0), None)
}

/// Energy with `r^2` replaced by a static weight.
pub fn weighted_energy(state: &FieldState, grid: &RadialGrid, params: &ModelParams, weight: &Weight) -> Result<f64> {
    if weight.is_time_dependent() {
        return Err(Error::TimeDependentWeight(weight.to_string()));
    }
    Ok(scheme_energy(&Fields::new(state, grid), params, weight, None))
}

/// Energy restricted to nodes and faces with `r > (1 + b) t`.
pub fn exterior_energy(state: &FieldState, grid: &RadialGrid, params: &ModelParams, b: f64) -> f64 {
    scheme_energy(&Fields::new(state, grid), params, &Weight::power(2.0), Some((1.0 + b) * state.t))
}

/// `int exp(-c0 |r + sigma t|) r^2 (u_t^2 + u_r^2) dr` at the state's time.
pub fn cone_kinetic_integral(state: &FieldState, grid: &RadialGrid, sigma: f64, c0: f64) -> f64 {
    let fields = Fields::new(state, grid);
    fields.integrate(|i, r| {
        let k = (-c0 * (r + sigma * fields.t).abs()).exp();
        k * r * r * (fields.ut[i] * fields.ut[i] + fields.ur[i] * fields.ur[i])
    })
}

fn weights_for(kind: FunctionalKind, weight: &Weight, config: &VirialConfig) -> Result<Weight> {
    weight.validate()?;
    if matches!(kind, FunctionalKind::SkyrmeVirial | FunctionalKind::AdkinsNappiVirial) {
        return Ok(Weight::power(config.n));
    }
    if matches!(kind, FunctionalKind::WeightedEnergy) && weight.is_time_dependent() {
        return Err(Error::TimeDependentWeight(weight.to_string()));
    }
    Ok(*weight)
}

/// Value of a functional. For the combined virials `weight` is ignored and
/// `r^n`, `r^(n-1)` are used.
pub fn functional_value(
    kind: FunctionalKind,
    state: &FieldState,
    grid: &RadialGrid,
    params: &ModelParams,
    weight: &Weight,
    config: &VirialConfig,
) -> Result<f64> {
    kind.check_model(params)?;
    let w = weights_for(kind, weight, config)?;
    let fields = Fields::new(state, grid);
    let t = state.t;
    let a2 = params.alpha * params.alpha;
    let fu = |i: usize, r: f64| -> f64 {
        match params.kind {
            ModelKind::Skyrme => {
                let s = fields.u[i].sin();
                1.0 + 2.0 * a2 * s * s / (r * r)
            }
            ModelKind::AdkinsNappi => 1.0,
        }
    };
    use FunctionalKind::*;
    Ok(match kind {
        SkyrmeEnergy | AdkinsNappiEnergy => scheme_energy(&fields, params, &Weight::power(2.0), None),
        WeightedEnergy => scheme_energy(&fields, params, &w, None),
        SkyrmeLocalEnergy | AdkinsNappiLocalEnergy => scheme_energy_with(&fields, params, |r| r * r * w.value(r, t), None),
        SkyrmeMomentum | AdkinsNappiMomentum => {
            fields.integrate(|i, r| w.value(r, t) * fu(i, r) * fields.ut[i] * fields.ur[i])
        }
        SkyrmeDilation | AdkinsNappiDilation => {
            fields.integrate(|i, r| w.value(r, t) * fu(i, r) * fields.ut[i] * fields.u[i])
        }
        SkyrmeVirial | AdkinsNappiVirial => {
            let gamma = config.gamma_for(params.kind);
            fields.integrate(|i, r| {
                let psi = r.powf(config.n);
                psi * fu(i, r) * fields.ut[i] * (fields.ur[i] + gamma * fields.u[i] / r)
            })
        }
    })
}

/// Closed-form time derivative of a functional, evaluated on the state.
pub fn functional_rhs(
    kind: FunctionalKind,
    state: &FieldState,
    grid: &RadialGrid,
    params: &ModelParams,
    weight: &Weight,
    config: &VirialConfig,
) -> Result<f64> {
    kind.check_model(params)?;
    let w = weights_for(kind, weight, config)?;
    let fields = Fields::new(state, grid);
    let form = config.lemma_form;
    use FunctionalKind::*;
    Ok(match kind {
        SkyrmeEnergy | AdkinsNappiEnergy | WeightedEnergy => 0.0,
        SkyrmeLocalEnergy | AdkinsNappiLocalEnergy => fields.integrate(|i, r| local_energy_rate(&fields, params, &w.eval(r, fields.t), i, r)),
        SkyrmeMomentum => fields.integrate(|i, r| skyrme_momentum_rate(&fields, params.alpha, &w.eval(r, fields.t), i, r, form)),
        SkyrmeDilation => fields.integrate(|i, r| skyrme_dilation_rate(&fields, params.alpha, &w.eval(r, fields.t), i, r)),
        AdkinsNappiMomentum => fields.integrate(|i, r| an_momentum_rate(&fields, &w.eval(r, fields.t), i, r, form)),
        AdkinsNappiDilation => fields.integrate(|i, r| an_dilation_rate(&fields, &w.eval(r, fields.t), i, r)),
        SkyrmeVirial | AdkinsNappiVirial => {
            let gamma = config.gamma_for(params.kind);
            let n = config.n;
            fields.integrate(|i, r| {
                let psi = Weight::power(n).eval(r, fields.t);
                let phi = Weight::power(n - 1.0).eval(r, fields.t);
                if params.kind == ModelKind::Skyrme {
                    skyrme_momentum_rate(&fields, params.alpha, &psi, i, r, form)
                        + gamma * skyrme_dilation_rate(&fields, params.alpha, &phi, i, r)
                } else {
                    an_momentum_rate(&fields, &psi, i, r, form) + gamma * an_dilation_rate(&fields, &phi, i, r)
                }
            })
        }
    })
}

#[inline]
fn local_energy_rate(fields: &Fields<'_>, params: &ModelParams, w: &WeightEval, i: usize, r: f64) -> f64 {
    let (u, ut, ur) = (fields.u[i], fields.ut[i], fields.ur[i]);
    let f = match params.kind {
        ModelKind::Skyrme => {
            let s = u.sin();
            1.0 + 2.0 * params.alpha * params.alpha * s * s / (r * r)
        }
        ModelKind::AdkinsNappi => 1.0,
    };
    r * r * (w.dt * energy_bracket(params, r, u, ut, ur) - 2.0 * w.dr * f * ut * ur)
}

#[inline]
fn skyrme_momentum_rate(fields: &Fields<'_>, alpha: f64, psi: &WeightEval, i: usize, r: f64, form: LemmaForm) -> f64 {
    let (u, ut, ur) = (fields.u[i], fields.ut[i], fields.ur[i]);
    let a2 = alpha * alpha;
    let s = u.sin();
    let s2 = s * s;
    let (r2, r3) = (r * r, r * r * r);
    let p = psi.dr / r2 - 4.0 * psi.value / r3;
    let q = psi.dr / r2 - 2.0 * psi.value / r3;
    let kin = ut * ut + ur * ur;
    let quartic_kin = match form {
        LemmaForm::Corrected => -a2 * q * s2 * kin,
        LemmaForm::AsPrinted => -0.5 * a2 * p * s2 * kin,
    };
    -0.5 * psi.dr * ut * ut - 0.5 * p * r2 * ur * ur + quartic_kin + q * s2 + 0.5 * a2 * p * s2 * s2 / r2
}

#[inline]
fn skyrme_dilation_rate(fields: &Fields<'_>, alpha: f64, phi: &WeightEval, i: usize, r: f64) -> f64 {
    let (u, ut, ur) = (fields.u[i], fields.ut[i], fields.ur[i]);
    let a2 = alpha * alpha;
    let (s, c) = u.sin_cos();
    let s2 = s * s;
    let sin2u = 2.0 * s * c;
    let (r2, r3) = (r * r, r * r * r);
    let (ph, ph1, ph2) = (phi.value, phi.dr, phi.drr);
    let diff = ut * ut - ur * ur;
    // d/dr (phi / r)
    let ph_over_r_dr = (ph1 * r - ph) / r2;
    a2 * ph / r2 * (sin2u * u + 2.0 * s2) * diff + ph * diff
        - (ph_over_r_dr - 0.5 * ph2) * u * u
        - ph * sin2u * u / r2
        + a2 * (r * ph2 - 4.0 * ph1 + 6.0 * ph / r) * s2 * u * u / r3
        - a2 * (ph / r) * u * sin2u * s2 / r3
        + a2 * (ph1 - 2.0 * ph / r) * sin2u * ur * u * u / r2
}

#[inline]
fn an_momentum_rate(fields: &Fields<'_>, psi: &WeightEval, i: usize, r: f64, form: LemmaForm) -> f64 {
    let (u, ut, ur) = (fields.u[i], fields.ut[i], fields.ur[i]);
    let s = u.sin();
    let g = stable_g1(u);
    let (ps, ps1) = (psi.value, psi.dr);
    let r2 = r * r;
    let sin_coef = match form {
        LemmaForm::Corrected => 1.0,
        LemmaForm::AsPrinted => 0.5,
    };
    -0.5 * ps1 * ut * ut - (0.5 * ps1 - 2.0 * ps / r) * ur * ur - sin_coef * (2.0 * ps / r - ps1) * s * s / r2
        - 0.5 * (4.0 * ps / r - ps1) * g * g / (r2 * r2)
}

#[inline]
fn an_dilation_rate(fields: &Fields<'_>, phi: &WeightEval, i: usize, r: f64) -> f64 {
    let (u, ut, ur) = (fields.u[i], fields.ut[i], fields.ur[i]);
    let (s, c) = u.sin_cos();
    let g = stable_g1(u);
    let (ph, ph1, ph2) = (phi.value, phi.dr, phi.drr);
    let r2 = r * r;
    ph * ut * ut - (ph1 * r - ph - 0.5 * r2 * ph2) * u * u / r2 - ph * ur * ur - ph / r2 * u * 2.0 * s * c
        - ph / (r2 * r2) * u * g * 2.0 * s * s
}

/// Coefficients of the quadratic part of the Skyrme combined-virial rate
/// with weights `r^n`, `r^(n-1)`, each multiplying `r^(n-1)` times
/// `u_t^2`, `u_r^2`, `u^2/r^2`, `alpha^2 (u^2/r^2)(u_t^2+u_r^2)`, `alpha^2 u^4/r^4`.
pub fn skyrme_virial_leading_coefficients(n: f64, gamma: f64) -> [f64; 5] {
    let half_nn1 = 0.5 * n * (n - 1.0);
    [
        -0.5 * (n - 2.0 * gamma),
        -0.5 * (n + 2.0 * gamma - 4.0),
        -((2.0 - gamma) + (2.0 * gamma - 1.0) * n - gamma * half_nn1),
        -(n - (2.0 + 4.0 * gamma)),
        -(-0.5 * (1.0 - 6.0 * gamma) * n + (2.0 - 4.0 * gamma) - gamma * half_nn1),
    ]
}

/// Leading small-field form of the Skyrme combined-virial rate.
pub fn skyrme_virial_leading(state: &FieldState, grid: &RadialGrid, params: &ModelParams, config: &VirialConfig) -> Result<f64> {
    FunctionalKind::SkyrmeVirial.check_model(params)?;
    let gamma = config.gamma_for(ModelKind::Skyrme);
    let c = skyrme_virial_leading_coefficients(config.n, gamma);
    let a2 = params.alpha * params.alpha;
    let fields = Fields::new(state, grid);
    Ok(fields.integrate(|i, r| {
        let (u, ut, ur) = (fields.u[i], fields.ut[i], fields.ur[i]);
        let x = u * u / (r * r);
        r.powf(config.n - 1.0)
            * (c[0] * ut * ut + c[1] * ur * ur + c[2] * x + c[3] * a2 * x * (ut * ut + ur * ur) + c[4] * a2 * x * x)
    }))
}

/// Full Skyrme combined-virial rate minus its leading small-field form.
/// Uses the corrected identity regardless of `config.lemma_form`.
pub fn he_remainder(state: &FieldState, grid: &RadialGrid, params: &ModelParams, config: &VirialConfig) -> Result<f64> {
    let cfg = VirialConfig {
        lemma_form: LemmaForm::Corrected,
        ..*config
    };
    let full = functional_rhs(FunctionalKind::SkyrmeVirial, state, grid, params, &Weight::power(cfg.n), &cfg)?;
    Ok(full - skyrme_virial_leading(state, grid, params, &cfg)?)
}

/// Trapezoid-in-time accumulation of [`cone_kinetic_integral`] from `t_start` on.
#[derive(Debug, Clone)]
pub struct IntegrabilityAccumulator {
    pub sigma: f64,
    pub c0: f64,
    pub t_start: f64,
    last: Option<(f64, f64)>,
    sum: NeumaierSum,
    partials: Vec<(f64, f64)>,
}

impl IntegrabilityAccumulator {
    pub fn new(sigma: f64, c0: f64, t_start: f64) -> Result<Self> {
        if !(sigma.abs() > 1.0 && c0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "integrability kernel needs |sigma| > 1 and c0 > 0 (got sigma = {sigma}, c0 = {c0})"
            )));
        }
        Ok(Self {
            sigma,
            c0,
            t_start,
            last: None,
            sum: NeumaierSum::new(),
            partials: Vec::new(),
        })
    }

    /// Adds the state at its time; states before `t_start` are skipped.
    pub fn push(&mut self, state: &FieldState, grid: &RadialGrid) {
        if state.t < self.t_start - 1e-12 {
            return;
        }
        let q = cone_kinetic_integral(state, grid, self.sigma, self.c0);
        self.push_value(state.t, q);
    }

    /// Adds a precomputed spatial integral at time `t`.
    pub fn push_value(&mut self, t: f64, q: f64) {
        if let Some((t_prev, q_prev)) = self.last {
            self.sum.add(0.5 * (t - t_prev) * (q + q_prev));
        }
        self.last = Some((t, q));
        self.partials.push((t, self.sum.value()));
    }

    pub fn total(&self) -> f64 {
        self.sum.value()
    }

    /// `(t, S(t))` after every pushed state.
    pub fn partial_sums(&self) -> &[(f64, f64)] {
        &self.partials
    }

    /// `S` at the last pushed time not exceeding `t`.
    pub fn partial_sum_at(&self, t: f64) -> Option<f64> {
        self.partials
            .iter()
            .take_while(|(s, _)| *s <= t + 1e-9)
            .last()
            .map(|&(_, v)| v)
    }
}

/// Residuals `|(F(t_{i+1}) - F(t_{i-1})) / (2 dt) - RHS(t_i)|` on interior
/// records, returned with their times.
pub fn identity_residual_series(times: &[f64], values: &[f64], rhs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = times.len();
    if n < 3 || values.len() != n || rhs.len() != n {
        return Err(Error::TooFewRecords {
            needed: 3,
            got: n.min(values.len()).min(rhs.len()),
        });
    }
    let step = times[1] - times[0];
    for w in times.windows(2) {
        let d = w[1] - w[0];
        if (d - step).abs() > 1e-9 * step.abs().max(1.0) {
            return Err(Error::NonUniformRecords { expected: step, found: d });
        }
    }
    Ok((1..n - 1)
        .map(|i| {
            let deriv = (values[i + 1] - values[i - 1]) / (2.0 * step);
            (times[i], (deriv - rhs[i]).abs())
        })
        .collect())
}
