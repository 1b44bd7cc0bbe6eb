//! Rate experiments: error of an expansion over a list of times, a
//! log-log fit, and the bound constant `error / (t^{target} · ‖w f‖)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::field::{sample, PolyGaussian, ScalarField};
use crate::heisenberg::HGridFunction;
use crate::kernels::KernelSpec;
use crate::numeric::{decay_fit, weighted_lp_norm, xp_norm, DecayFit, DimensionSplit, Grid, WeightSpec};

use super::expansion::{
    expansion_error, heisenberg_expansion_error, source_grid, ErrorSample, ExpansionKind, ExpansionRule,
    FirstOrderFields, GridSettings,
};

/// The expansions whose decay rates are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Classical heat flow, `|α| ≤ k`, weight `|z|^{k+1}` in `L^p`.
    #[serde(alias = "intro-isotropic", alias = "intro_isotropic", alias = "intro")]
    Isotropic,
    /// Classical heat flow, `|α| ≤ k`, controlled by the split `𝒳^p` norm.
    #[serde(alias = "thm2_5")]
    IsotropicSplitData,
    /// Mixed-order flow, `|β|+2|γ| ≤ k`, weight `1+|x|^{k+1}+|y|^{k+1}`.
    #[serde(alias = "thm3_2")]
    MixedOrder,
    /// Mixed-order flow, `|β|+2|γ| ≤ k` with `k` odd, weight `1+|x|^{k+1}+|y|^{(k+1)/2}`.
    #[serde(alias = "thm1_1")]
    MixedOrderBalanced,
    /// Heisenberg heat flow, mass and first z-moments, weight `1+|z|²+|θ|`.
    #[serde(alias = "thm1_3")]
    Heisenberg,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Isotropic,
        Experiment::IsotropicSplitData,
        Experiment::MixedOrder,
        Experiment::MixedOrderBalanced,
        Experiment::Heisenberg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Isotropic => "isotropic",
            Experiment::IsotropicSplitData => "isotropic_split_data",
            Experiment::MixedOrder => "mixed_order",
            Experiment::MixedOrderBalanced => "mixed_order_balanced",
            Experiment::Heisenberg => "heisenberg",
        }
    }

    /// Exponent `−(k+1)/2`, `−(k+1)/4` or `−1`.
    pub fn target_slope(&self, k: u32) -> f64 {
        match self {
            Experiment::Isotropic | Experiment::IsotropicSplitData => -((k + 1) as f64) / 2.0,
            Experiment::MixedOrder | Experiment::MixedOrderBalanced => -((k + 1) as f64) / 4.0,
            Experiment::Heisenberg => -1.0,
        }
    }

    /// Slack on the fitted slope.
    pub fn tolerance(&self) -> f64 {
        match self {
            Experiment::Heisenberg => 0.07,
            _ => 0.05,
        }
    }

    pub fn default_times(&self) -> Vec<f64> {
        match self {
            Experiment::Heisenberg => vec![1.0, 2.0, 4.0, 8.0, 16.0],
            _ => (0..7).map(|j| 2f64.powi(j)).collect(),
        }
    }

    fn rule_kind(&self) -> ExpansionKind {
        match self {
            Experiment::Isotropic | Experiment::IsotropicSplitData => ExpansionKind::IsotropicFull,
            Experiment::MixedOrder | Experiment::MixedOrderBalanced => ExpansionKind::MixedOrder,
            Experiment::Heisenberg => ExpansionKind::HeisenbergFirstOrder,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use serde::de::{value::StrDeserializer, IntoDeserializer};
        let de: StrDeserializer<'_, serde::de::value::Error> = s.into_deserializer();
        Experiment::deserialize(de).map_err(|_| Error::Argument(format!("unknown experiment '{s}'")))
    }
}

/// Variables of an experiment: a split `ℝᵐ × ℝⁿ` for the spectral flows,
/// or the rank `n` of `ℍⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dimensions {
    Split { m: usize, n: usize },
    Group { n: usize },
}

impl Dimensions {
    pub fn total(&self) -> usize {
        match *self {
            Dimensions::Split { m, n } => m + n,
            Dimensions::Group { n } => 2 * n + 1,
        }
    }
}

/// Initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Datum {
    /// `(1 + 0.6 z₀ + 0.4 z_{N−1}²) exp(−Σ aᵢ(zᵢ−cᵢ)²)` with staggered rates
    /// and centers, so no moment vanishes by symmetry.
    Skewed {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `Σ c_e z^e exp(−Σ aᵢ(zᵢ−cᵢ)²)`.
    PolyGaussian { terms: Vec<(f64, Vec<u32>)>, rates: Vec<f64>, centers: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl Default for Datum {
    fn default() -> Self {
        Datum::Skewed { scale: 1.0 }
    }
}

impl Datum {
    pub fn build(&self, dims: usize) -> Result<PolyGaussian> {
        match self {
            Datum::Skewed { scale } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return arg_err("datum scale must be positive");
                }
                let mut e0 = vec![0; dims];
                e0[0] = 1;
                let mut e1 = vec![0; dims];
                e1[dims - 1] += 2;
                let rates = (0..dims).map(|i| (1.5 + 0.25 * i as f64) / (scale * scale)).collect();
                let centers = (0..dims).map(|i| scale * (0.3 - 0.25 * i as f64)).collect();
                PolyGaussian::new(vec![(1.0, vec![0; dims]), (0.6 / scale, e0), (0.4 / (scale * scale), e1)], rates, centers)
            }
            Datum::PolyGaussian { terms, rates, centers } => {
                if rates.len() != dims {
                    return arg_err(format!("datum has {} rates, the experiment needs {dims}", rates.len()));
                }
                if rates.iter().any(|&a| a <= 0.0) {
                    return arg_err("datum rates must be positive so that every moment is finite");
                }
                PolyGaussian::new(terms.clone(), rates.clone(), centers.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSetup {
    #[serde(alias = "theorem")]
    pub experiment: Experiment,
    pub dims: Dimensions,
    pub k: u32,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(alias = "t_list")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub datum: Datum,
    #[serde(default)]
    pub grid: GridSettings,
    #[serde(default)]
    pub fields: FirstOrderFields,
}

impl ExperimentSetup {
    /// Defaults for the experiment on the smallest admissible dimensions.
    pub fn new(experiment: Experiment, k: u32) -> Self {
        let dims = match experiment {
            Experiment::Heisenberg => Dimensions::Group { n: 1 },
            _ => Dimensions::Split { m: 1, n: 1 },
        };
        ExperimentSetup {
            experiment,
            dims,
            k,
            p: 1.0,
            times: experiment.default_times(),
            datum: Datum::default(),
            grid: GridSettings::default(),
            fields: FirstOrderFields::default(),
        }
    }

    pub fn spec(&self) -> Result<KernelSpec> {
        match (self.experiment, self.dims) {
            (Experiment::Heisenberg, Dimensions::Group { n }) => Ok(KernelSpec::Heisenberg { n }),
            (Experiment::Heisenberg, _) => arg_err("the heisenberg experiment takes dims {\"n\": …}"),
            (_, Dimensions::Group { .. }) => arg_err("spectral experiments take dims {\"m\": …, \"n\": …}"),
            (Experiment::Isotropic | Experiment::IsotropicSplitData, Dimensions::Split { m, n }) => {
                Ok(KernelSpec::Isotropic { dim: m + n })
            }
            (_, Dimensions::Split { m, n }) => Ok(KernelSpec::mixed(DimensionSplit::new(m, n)?)),
        }
    }

    pub fn rule(&self) -> ExpansionRule {
        ExpansionRule { kind: self.experiment.rule_kind(), k: self.k, p: self.p, fields: self.fields }
    }

    /// Checks the hypotheses of the estimate being measured; the message
    /// names the violated condition.
    pub fn validate(&self) -> Result<()> {
        let spec = self.spec()?;
        spec.validate()?;
        self.grid.validate()?;
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return arg_err(format!("p must satisfy 1 ≤ p < ∞, got {}", self.p));
        }
        if self.times.len() < 3 {
            return arg_err(format!("need at least 3 times, got {}", self.times.len()));
        }
        if self.times[0] <= 0.0 || self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return arg_err("times must be positive and strictly increasing");
        }
        let big_n = self.dims.total();
        match self.experiment {
            Experiment::Isotropic => {
                if big_n > 1 && self.p > big_n as f64 / (big_n as f64 - 1.0) + 1e-12 {
                    return arg_err(format!("p must satisfy p ≤ N/(N−1) = {}", big_n as f64 / (big_n as f64 - 1.0)));
                }
            }
            Experiment::IsotropicSplitData => {
                if let Dimensions::Split { m, n } = self.dims {
                    // a block of one variable imposes no upper bound
                    for (d, name) in [(m, "m"), (n, "n")] {
                        if d > 1 && self.p >= d as f64 / (d as f64 - 1.0) {
                            return arg_err(format!(
                                "p must satisfy p < {name}/({name}−1) = {}",
                                d as f64 / (d as f64 - 1.0)
                            ));
                        }
                    }
                }
            }
            Experiment::MixedOrder => {
                if self.p != 1.0 {
                    return arg_err("the mixed-order estimate with weight 1+|x|^{k+1}+|y|^{k+1} is for p = 1");
                }
            }
            Experiment::MixedOrderBalanced => {
                if self.k % 2 == 0 {
                    return arg_err("k must be odd");
                }
                if self.p != 1.0 {
                    return arg_err("the balanced mixed-order estimate is for p = 1");
                }
            }
            Experiment::Heisenberg => {
                if self.k != 1 {
                    return arg_err("the heisenberg expansion uses mass and first moments: k must be 1");
                }
                if self.p != 1.0 {
                    return arg_err("the heisenberg estimate is in L¹: p must be 1");
                }
            }
        }
        self.rule().validate(&spec)?;
        self.datum.build(big_n).map(|_| ())
    }

    fn bound_weight(&self) -> Option<WeightSpec> {
        let k1 = (self.k + 1) as f64;
        match (self.experiment, self.dims) {
            (Experiment::Isotropic, _) => Some(WeightSpec::RadialPower { a: k1 }),
            (Experiment::IsotropicSplitData, _) => None,
            (Experiment::MixedOrder, Dimensions::Split { m, .. }) => Some(WeightSpec::Additive { m, a: k1, b: k1 }),
            (Experiment::MixedOrderBalanced, Dimensions::Split { m, .. }) => {
                Some(WeightSpec::Additive { m, a: k1, b: k1 / 2.0 })
            }
            (Experiment::Heisenberg, Dimensions::Group { n }) => Some(WeightSpec::Additive { m: 2 * n, a: 2.0, b: 1.0 }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRecord {
    pub t: f64,
    pub error: f64,
    /// `error / (t^{target} · bound_norm)`.
    pub constant: f64,
    pub grid: Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub dims: Dimensions,
    pub k: u32,
    pub p: f64,
    pub fields: FirstOrderFields,
    pub records: Vec<TimeRecord>,
    pub fit: DecayFit,
    pub target_slope: f64,
    pub tolerance: f64,
    /// The weighted norm of the datum on the right of the estimate.
    pub bound_norm: f64,
    /// Largest over smallest bound constant along the time list.
    pub constant_ratio: f64,
    /// `slope ≤ target + tolerance`.
    pub pass: bool,
}

impl ExperimentReport {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.error).collect()
    }

    pub fn constant_stable(&self, max_ratio: f64) -> bool {
        self.constant_ratio < max_ratio
    }
}

/// Runs the experiment over its time list. Times are processed
/// independently; records come back in time order.
pub fn run_theorem(setup: &ExperimentSetup) -> Result<ExperimentReport> {
    setup.validate()?;
    let spec = setup.spec()?;
    let rule = setup.rule();
    let big_n = setup.dims.total();
    let f = setup.datum.build(big_n)?;
    let error_weight = WeightSpec::UNIT;

    let (samples, bound_norm) = match spec {
        KernelSpec::Heisenberg { n } => {
            let src = HGridFunction::sample(&f, &source_grid(n, &setup.grid)?)?;
            let w = setup.bound_weight().expect("heisenberg weight");
            let norm = weighted_lp_norm(src.data(), &w, 1.0)?;
            let samples = setup
                .times
                .par_iter()
                .map(|&t| heisenberg_expansion_error(&src, &rule, t, &error_weight, &setup.grid))
                .collect::<Result<Vec<ErrorSample>>>()?;
            (samples, norm)
        }
        _ => {
            let norm = datum_norm(setup, &f)?;
            let samples = setup
                .times
                .par_iter()
                .map(|&t| expansion_error(&f, &spec, &rule, t, &error_weight, &setup.grid))
                .collect::<Result<Vec<ErrorSample>>>()?;
            (samples, norm)
        }
    };

    let target = setup.experiment.target_slope(setup.k);
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let errors: Vec<f64> = samples.iter().map(|s| s.error).collect();
    let fit = decay_fit(&times, &errors)?;
    let records: Vec<TimeRecord> = samples
        .into_iter()
        .map(|s| TimeRecord { t: s.t, error: s.error, constant: s.error / (s.t.powf(target) * bound_norm), grid: s.grid })
        .collect();
    let cmax = records.iter().map(|r| r.constant).fold(0.0, f64::max);
    let cmin = records.iter().map(|r| r.constant).fold(f64::INFINITY, f64::min);
    let tolerance = setup.experiment.tolerance();
    Ok(ExperimentReport {
        experiment: setup.experiment,
        dims: setup.dims,
        k: setup.k,
        p: setup.p,
        fields: setup.fields,
        pass: fit.slope <= target + tolerance,
        records,
        fit,
        target_slope: target,
        tolerance,
        bound_norm,
        constant_ratio: cmax / cmin,
    })
}

/// The datum's weighted norm, sampled on a cube over its decay radius.
fn datum_norm(setup: &ExperimentSetup, f: &PolyGaussian) -> Result<f64> {
    let big_n = setup.dims.total();
    let h = setup.grid.spacing;
    let m = {
        let m = (2.0 * f.radius() / h).ceil() as usize;
        (m + m % 2).max(8)
    };
    let grid = Grid::cube(big_n, 0.5 * m as f64 * h, m)?;
    let fg = sample(f, &grid)?;
    match (setup.experiment, setup.dims) {
        (Experiment::IsotropicSplitData, Dimensions::Split { m, n }) => {
            xp_norm(&fg, DimensionSplit::new(m, n)?, setup.k, setup.p)
        }
        _ => {
            let w = setup.bound_weight().ok_or_else(|| Error::Argument("experiment has no bound weight".into()))?;
            weighted_lp_norm(&fg, &w, setup.p)
        }
    }
}
