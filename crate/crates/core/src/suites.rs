//! Randomized residual suites for the decomposition and Taylor identities.
//!
//! Each instance draws a Gaussian×polynomial `f`, test function `φ` and
//! evaluation point from a seeded generator; a second pass uses polynomial
//! `φ`, for which every remainder integral is evaluated exactly.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::field::PolyGaussian;
use crate::heisenberg::{h_decomposition_check, h_taylor_check, HPoint};
use crate::moments::{taylor_split_check, verify_decomposition, DecompositionRule, QuadSettings};
use crate::numeric::{DimensionSplit, MultiIndex};

/// The identities with a residual suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `f = Σ_{|α|≤k} (−1)^{|α|} m_α/α! D^αδ₀ + Σ_{|α|=k+1} D^αF_α`.
    #[serde(alias = "2.1", alias = "lemma2_1")]
    FullDecomposition,
    /// Taylor in `y`, then in `x` for every y-derivative, at a point.
    #[serde(alias = "2.2", alias = "lemma2_2")]
    SplitTaylor,
    /// Decomposition with main terms `|β|+|γ| ≤ k`.
    #[serde(alias = "2.3", alias = "lemma2_3")]
    SplitDecomposition,
    /// Decomposition with main terms `|β|+2|γ| ≤ k`, `k` odd.
    #[serde(alias = "3.3", alias = "lemma3_3")]
    AnisotropicDecomposition,
    /// First-order Taylor formula on `ℍⁿ` along `Z_j` and `Θ`.
    #[serde(alias = "4.4", alias = "lemma4_4")]
    GroupTaylor,
    /// Decomposition on `ℍⁿ` into mass, first z-moments, `ΘF` and `Z_jZ_kF_jk`.
    #[serde(alias = "4.5", alias = "thm4_5")]
    GroupDecomposition,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::FullDecomposition,
        Identity::SplitTaylor,
        Identity::SplitDecomposition,
        Identity::AnisotropicDecomposition,
        Identity::GroupTaylor,
        Identity::GroupDecomposition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::FullDecomposition => "full_decomposition",
            Identity::SplitTaylor => "split_taylor",
            Identity::SplitDecomposition => "split_decomposition",
            Identity::AnisotropicDecomposition => "anisotropic_decomposition",
            Identity::GroupTaylor => "group_taylor",
            Identity::GroupDecomposition => "group_decomposition",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use serde::de::{value::StrDeserializer, IntoDeserializer};
        let de: StrDeserializer<'_, serde::de::value::Error> = s.into_deserializer();
        Identity::deserialize(de).map_err(|_| Error::Argument(format!("unknown identity '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub identity: Identity,
    /// Expansion order; ignored on `ℍⁿ`.
    pub k: u32,
    /// Total dimension `N` of the full decomposition.
    pub dim: usize,
    /// Split of the split and anisotropic identities.
    pub m: usize,
    pub n: usize,
    /// Rank of `ℍⁿ`.
    pub group_rank: usize,
    pub instances: usize,
    pub seed: u64,
    pub settings: QuadSettings,
}

impl SuiteConfig {
    pub fn new(identity: Identity) -> Self {
        SuiteConfig {
            identity,
            k: 1,
            dim: 2,
            m: 1,
            n: 1,
            group_rank: 1,
            instances: 20,
            seed: 0x5eed,
            settings: QuadSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return arg_err("a suite needs at least one instance");
        }
        if self.k > 5 {
            return arg_err(format!("k ≤ 5 is supported, got {}", self.k));
        }
        match self.identity {
            Identity::FullDecomposition if !(1..=3).contains(&self.dim) => arg_err("dim must be 1, 2 or 3"),
            Identity::SplitTaylor | Identity::SplitDecomposition | Identity::AnisotropicDecomposition
                if self.m == 0 || self.n == 0 || self.m + self.n > 3 =>
            {
                arg_err("the split needs m, n ≥ 1 and m + n ≤ 3")
            }
            Identity::AnisotropicDecomposition if self.k % 2 == 0 => arg_err("k must be odd"),
            Identity::GroupTaylor | Identity::GroupDecomposition if self.group_rank != 1 => {
                arg_err("the group suites run on ℍ¹")
            }
            _ => Ok(()),
        }
    }

    fn dims(&self) -> usize {
        match self.identity {
            Identity::FullDecomposition => self.dim,
            Identity::GroupTaylor | Identity::GroupDecomposition => 2 * self.group_rank + 1,
            _ => self.m + self.n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub identity: Identity,
    pub instances: usize,
    /// Largest residual over the Gaussian test functions.
    pub max_residual: f64,
    /// Largest residual over the polynomial test functions.
    pub polynomial_max_residual: f64,
    pub tolerance: f64,
    pub polynomial_tolerance: f64,
    pub pass: bool,
}

pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const POLYNOMIAL_TOLERANCE: f64 = 1e-10;

fn random_datum(rng: &mut ChaCha8Rng, dims: usize, degree: u32) -> Result<PolyGaussian> {
    let rates = (0..dims).map(|_| rng.gen_range(0.8..2.0)).collect();
    let centers = (0..dims).map(|_| rng.gen_range(-0.4..0.4)).collect();
    let mut terms = vec![(1.0, vec![0; dims])];
    let extra = rng.gen_range(1..=2);
    for _ in 0..extra {
        let mut e = vec![0; dims];
        let mut left = rng.gen_range(1..=degree.max(1));
        while left > 0 {
            e[rng.gen_range(0..dims)] += 1;
            left -= 1;
        }
        terms.push((rng.gen_range(-0.5..0.5), e));
    }
    PolyGaussian::new(terms, rates, centers)
}

/// A polynomial whose degree makes every remainder vanish, or (for the
/// pointwise formulas) be integrated exactly.
fn random_polynomial(rng: &mut ChaCha8Rng, dims: usize, degree: u32, keep: impl Fn(&MultiIndex) -> bool) -> Result<PolyGaussian> {
    let terms = MultiIndex::up_to(dims, degree)
        .into_iter()
        .filter(|a| keep(a))
        .map(|a| (rng.gen_range(-1.0..1.0), a.exponents().to_vec()))
        .collect();
    PolyGaussian::polynomial(dims, terms)
}

fn random_point(rng: &mut ChaCha8Rng, dims: usize) -> Vec<f64> {
    (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn residual(cfg: &SuiteConfig, f: &PolyGaussian, phi: &PolyGaussian, z: &[f64]) -> Result<f64> {
    let k = cfg.k;
    let split = || DimensionSplit::new(cfg.m, cfg.n);
    match cfg.identity {
        Identity::FullDecomposition => verify_decomposition(f, phi, None, k, DecompositionRule::Full, &cfg.settings),
        Identity::SplitDecomposition => {
            verify_decomposition(f, phi, Some(split()?), k, DecompositionRule::Split, &cfg.settings)
        }
        Identity::AnisotropicDecomposition => {
            verify_decomposition(f, phi, Some(split()?), k, DecompositionRule::Anisotropic, &cfg.settings)
        }
        Identity::SplitTaylor => taylor_split_check(phi, split()?, z, k),
        Identity::GroupTaylor => {
            let (zz, theta) = z.split_at(z.len() - 1);
            h_taylor_check(phi, &HPoint::new(zz.to_vec(), theta[0])?)
        }
        Identity::GroupDecomposition => h_decomposition_check(Arc::new(f.clone()), phi, &cfg.settings),
    }
}

/// Runs `instances` random cases with Gaussian `φ` and as many with
/// polynomial `φ`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let dims = cfg.dims();
    // polynomial φ of this degree is annihilated by every remainder
    // (decompositions) or has polynomial remainder integrands (Taylor)
    let poly_degree = match cfg.identity {
        Identity::FullDecomposition | Identity::SplitDecomposition | Identity::AnisotropicDecomposition => cfg.k,
        Identity::SplitTaylor => cfg.k + 2,
        Identity::GroupTaylor => 3,
        Identity::GroupDecomposition => 1,
    };
    let mut max_residual: f64 = 0.0;
    let mut poly_max: f64 = 0.0;
    for i in 0..cfg.instances {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let f = random_datum(&mut rng, dims, 2)?;
        let phi = random_datum(&mut rng, dims, cfg.k.max(1) + 1)?;
        let z = random_point(&mut rng, dims);
        let r = residual(cfg, &f, &phi, &z)?;
        max_residual = max_residual.max(r);
        let poly = if cfg.identity == Identity::GroupDecomposition {
            // z-linear data: the Θ and Z_jZ_k terms vanish
            let mut terms = vec![(rng.gen_range(-1.0..1.0), vec![0; dims])];
            for j in 0..dims - 1 {
                terms.push((rng.gen_range(-1.0..1.0), MultiIndex::unit(dims, j).exponents().to_vec()));
            }
            PolyGaussian::polynomial(dims, terms)?
        } else {
            let m = cfg.m;
            let anisotropic = cfg.identity == Identity::AnisotropicDecomposition;
            random_polynomial(&mut rng, dims, poly_degree, |a| {
                let (b, g) = a.split_at(m);
                !anisotropic || b.order() + 2 * g.order() <= cfg.k
            })?
        };
        poly_max = poly_max.max(residual(cfg, &f, &poly, &z)?);
    }
    let pass = max_residual < RESIDUAL_TOLERANCE && poly_max < POLYNOMIAL_TOLERANCE;
    Ok(SuiteReport {
        identity: cfg.identity,
        instances: cfg.instances,
        max_residual,
        polynomial_max_residual: poly_max,
        tolerance: RESIDUAL_TOLERANCE,
        polynomial_tolerance: POLYNOMIAL_TOLERANCE,
        pass,
    })
}
