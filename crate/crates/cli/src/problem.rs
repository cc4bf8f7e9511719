//! Problem-file schema (version 1) and parsing into core types.
//!
//! A problem file is a single self-describing JSON bundle: the lattice, one
//! flow descriptor (curve, multi-variable map, or polynomial map for
//! scans), and optional harness configuration. Command-line flags override
//! file fields.

use num_traits::Zero;
use serde::Deserialize;

use limitflow_core::curve::LaurentCurve;
use limitflow_core::exact::GaussianRational as Gq;
use limitflow_core::harness::{CoordRegion, PolyMap, RegionSpec, SampleDomain};
use limitflow_core::lattice::Lattice;
use limitflow_core::linalg::{CVec, ComplexSubspace};
use limitflow_core::multiflow::MultiLaurentMap;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub curve: Option<CurveSpec>,
    #[serde(default)]
    pub multi_map: Option<MultiMapSpec>,
    #[serde(default)]
    pub polymap: Option<PolyMapSpec>,
    #[serde(default)]
    pub subspace: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub harness: Option<HarnessSpec>,
}

#[derive(Debug, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub generators: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
pub struct CurveSpec {
    pub n: usize,
    pub terms: Vec<CurveTerm>,
    pub truncation: i64,
}

#[derive(Debug, Deserialize)]
pub struct CurveTerm {
    pub e: i64,
    pub v: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct MultiMapSpec {
    pub dim: usize,
    pub l: usize,
    pub q: usize,
    pub terms: Vec<MultiTerm>,
    pub trunc: TruncSpec,
}

#[derive(Debug, Deserialize)]
pub struct MultiTerm {
    pub beta: Vec<i64>,
    #[serde(default)]
    pub theta: Vec<i64>,
    pub v: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct TruncSpec {
    pub beta: i64,
    pub theta: i64,
}

#[derive(Debug, Deserialize)]
pub struct PolyMapSpec {
    pub q: usize,
    pub components: Vec<PolyComponent>,
}

#[derive(Debug, Deserialize)]
pub struct PolyComponent {
    pub terms: Vec<PolyTerm>,
}

#[derive(Debug, Deserialize)]
pub struct PolyTerm {
    pub pow: Vec<i64>,
    pub c: Coefficient,
}

/// Either an exact scalar string or `{"cis": "p/q"}` for `e^{2πi p/q}`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Exact(String),
    Cis { cis: String },
    Pair([f64; 2]),
}

impl Coefficient {
    pub fn to_f64(&self) -> Result<(f64, f64), String> {
        match self {
            Coefficient::Exact(s) => {
                let g: Gq = s.parse()?;
                Ok(g.to_f64_pair())
            }
            Coefficient::Cis { cis } => {
                let frac: Gq = cis.parse()?;
                if !frac.im.is_zero() {
                    return Err("cis fraction must be real".into());
                }
                let (x, _) = frac.to_f64_pair();
                let ang = std::f64::consts::TAU * x;
                Ok((ang.cos(), ang.sin()))
            }
            Coefficient::Pair(p) => Ok((p[0], p[1])),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct HarnessSpec {
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub a_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub precision_bits: Option<u32>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub degree: Option<i64>,
    #[serde(default)]
    pub sector: Option<SectorConfig>,
    #[serde(default)]
    pub scans: Vec<ScanSpec>,
}

#[derive(Debug, Deserialize)]
pub struct DomainSpec {
    pub r0: f64,
    pub r1: f64,
    pub theta0: f64,
    pub theta1: f64,
}

#[derive(Debug, Deserialize)]
pub struct SectorConfig {
    pub a_bound: f64,
    pub p: usize,
}

#[derive(Debug, Deserialize)]
pub struct ScanSpec {
    pub name: String,
    pub coords: Vec<CoordSpec>,
    pub window: f64,
    #[serde(default)]
    pub solve: bool,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub predicted: Option<PredictedSpec>,
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoordSpec {
    Bounded { re: [f64; 2], im: [f64; 2] },
    Radial { r: [f64; 2] },
}

#[derive(Debug, Deserialize)]
pub struct PredictedSpec {
    /// Realified direction rows (length `2n`, rational strings).
    pub direction_real: Vec<Vec<String>>,
    #[serde(default)]
    pub base_real: Option<Vec<String>>,
    #[serde(default)]
    pub curve: Option<CurvePredicateSpec>,
}

#[derive(Debug, Deserialize)]
pub struct CurvePredicateSpec {
    /// Which complex coordinate carries the curve.
    pub coord: usize,
    /// Polynomial coefficients, constant first.
    pub poly: Vec<Coefficient>,
    /// Direction angle as a fraction of π (e.g. "1/4").
    pub dir_pi: String,
    #[serde(default = "default_shell")]
    pub shell: i64,
}

fn default_shell() -> i64 {
    4
}

fn parse_cvec(row: &[String]) -> Result<CVec, String> {
    row.iter().map(|s| s.parse::<Gq>()).collect()
}

impl ProblemFile {
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != 1 {
            return Err(format!(
                "unsupported schema_version {} (expected 1)",
                self.schema_version
            ));
        }
        let flows = [
            self.curve.is_some(),
            self.multi_map.is_some(),
            self.polymap.is_some(),
        ]
        .iter()
        .filter(|x| **x)
        .count();
        if flows > 1 {
            return Err("give exactly one of curve, multi_map, polymap".into());
        }
        Ok(())
    }

    pub fn build_lattice(&self) -> Result<Lattice, String> {
        let gens = self
            .lattice
            .generators
            .iter()
            .map(|g| parse_cvec(g))
            .collect::<Result<Vec<_>, _>>()?;
        Lattice::new(self.lattice.n, gens).map_err(|e| e.to_string())
    }

    pub fn build_curve(&self) -> Result<Option<LaurentCurve>, String> {
        let Some(spec) = &self.curve else {
            return Ok(None);
        };
        if spec.n != self.lattice.n {
            return Err("curve and lattice dimensions differ".into());
        }
        let terms = spec
            .terms
            .iter()
            .map(|t| Ok((t.e, parse_cvec(&t.v)?)))
            .collect::<Result<Vec<_>, String>>()?;
        LaurentCurve::new(spec.n, terms, spec.truncation)
            .map(Some)
            .map_err(|e| e.to_string())
    }

    pub fn build_multi_map(&self) -> Result<Option<MultiLaurentMap>, String> {
        let Some(spec) = &self.multi_map else {
            return Ok(None);
        };
        if spec.dim != self.lattice.n {
            return Err("multi_map and lattice dimensions differ".into());
        }
        let terms = spec
            .terms
            .iter()
            .map(|t| Ok(((t.beta.clone(), t.theta.clone()), parse_cvec(&t.v)?)))
            .collect::<Result<Vec<_>, String>>()?;
        MultiLaurentMap::new(
            spec.dim,
            spec.l,
            spec.q,
            terms,
            spec.trunc.beta,
            spec.trunc.theta,
        )
        .map(Some)
        .map_err(|e| e.to_string())
    }

    pub fn build_polymap(&self) -> Result<Option<PolyMap>, String> {
        let Some(spec) = &self.polymap else {
            return Ok(None);
        };
        if spec.components.len() != self.lattice.n {
            return Err("polymap component count must equal the lattice dimension".into());
        }
        let components = spec
            .components
            .iter()
            .map(|c| {
                c.terms
                    .iter()
                    .map(|t| {
                        if t.pow.len() != spec.q {
                            return Err("polymap power length".to_string());
                        }
                        if t.pow.iter().any(|&p| p < 0) {
                            return Err("polymap powers must be >= 0".to_string());
                        }
                        Ok((t.pow.clone(), t.c.to_f64()?))
                    })
                    .collect::<Result<Vec<_>, String>>()
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Some(PolyMap {
            q: spec.q,
            components,
        }))
    }

    pub fn build_subspace(&self) -> Result<Option<ComplexSubspace>, String> {
        let Some(rows) = &self.subspace else {
            return Ok(None);
        };
        let vecs = rows
            .iter()
            .map(|r| parse_cvec(r))
            .collect::<Result<Vec<_>, _>>()?;
        ComplexSubspace::span(&vecs).map(Some).map_err(|e| e.to_string())
    }

    pub fn domain(&self, samples: usize, seed: u64) -> SampleDomain {
        let d = self.harness.as_ref().and_then(|h| h.domain.as_ref());
        match d {
            Some(d) => SampleDomain {
                r0: d.r0,
                r1: d.r1,
                theta0: d.theta0,
                theta1: d.theta1,
                n: samples,
                seed,
            },
            None => SampleDomain {
                r0: 0.5,
                r1: 1.0 - 1e-9,
                theta0: 0.0,
                theta1: std::f64::consts::TAU,
                n: samples,
                seed,
            },
        }
    }
}

impl ScanSpec {
    pub fn region(&self, default_samples: usize, seed: u64) -> RegionSpec {
        RegionSpec {
            coords: self
                .coords
                .iter()
                .map(|c| match c {
                    CoordSpec::Bounded { re, im } => CoordRegion::Bounded {
                        re: (re[0], re[1]),
                        im: (im[0], im[1]),
                    },
                    CoordSpec::Radial { r } => CoordRegion::Radial { r: (r[0], r[1]) },
                })
                .collect(),
            window: self.window,
            solve: self.solve,
            samples: self.samples.unwrap_or(default_samples),
            seed,
        }
    }
}
