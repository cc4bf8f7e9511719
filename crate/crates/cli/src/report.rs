//! JSON report shapes. Reports are deterministic: fixed field order, all
//! exact scalars as canonical strings, floats through the standard
//! shortest-roundtrip formatter.

use serde::Serialize;

use limitflow_core::curve::{AngleData, RadiusRecord, Stratification};
use limitflow_core::exact::{GaussianRational as Gq, Rat};
use limitflow_core::lattice::{Base, ClosedSubgroup, Lattice};
use limitflow_core::linalg::{ComplexSubspace, RealSubspace};
use limitflow_core::multiflow::{GoodDisc, LeadingSequence};

pub fn rat_str(r: &Rat) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn gq_strs(v: &[Gq]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn rat_strs(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_str).collect()
}

#[derive(Serialize)]
pub struct SubspaceJson {
    pub dim: usize,
    pub rows: Vec<Vec<String>>,
}

pub fn complex_subspace_json(s: &ComplexSubspace) -> SubspaceJson {
    SubspaceJson {
        dim: s.dim(),
        rows: s.basis_rows().iter().map(|r| gq_strs(r)).collect(),
    }
}

#[derive(Serialize)]
pub struct RealSubspaceJson {
    pub mode: &'static str,
    pub dim: usize,
    pub rows: Vec<Vec<String>>,
}

pub fn real_subspace_json(s: &RealSubspace) -> RealSubspaceJson {
    match s {
        RealSubspace::Exact(e) => RealSubspaceJson {
            mode: "exact",
            dim: e.dim(),
            rows: e.basis_rows().iter().map(|r| rat_strs(r)).collect(),
        },
        RealSubspace::Certified(b) => RealSubspaceJson {
            mode: "certified",
            dim: b.dim(),
            rows: b
                .rows
                .iter()
                .map(|r| r.iter().map(ball_entry_json).collect())
                .collect(),
        },
    }
}

/// Ball scalar as `{"mid": …, "rad": …, "bits": P}`.
pub fn ball_entry_json(x: &limitflow_core::ball::RealBall) -> String {
    format!(
        "{{\"mid\": \"{:.17e}\", \"rad\": \"{:.3e}\", \"bits\": {}}}",
        x.mid_f64(),
        x.rad_f64(),
        x.prec
    )
}

#[derive(Serialize)]
pub struct BaseJson {
    pub mode: &'static str,
    pub compact: Vec<String>,
    pub transverse: Vec<String>,
}

#[derive(Serialize)]
pub struct SubgroupJson {
    pub real_dim: usize,
    pub compact_dim: usize,
    pub compact_set: bool,
    pub direction: RealSubspaceJson,
    pub compact_direction: SubspaceRealRows,
    pub base: BaseJson,
}

#[derive(Serialize)]
pub struct SubspaceRealRows {
    pub rows: Vec<Vec<String>>,
}

pub fn subgroup_json(h: &ClosedSubgroup, _lattice: &Lattice) -> SubgroupJson {
    let base = match &h.base {
        Base::Exact(t) => BaseJson {
            mode: "exact",
            compact: rat_strs(&t.compact),
            transverse: rat_strs(&t.transverse),
        },
        Base::Approx(t) => BaseJson {
            mode: "approx",
            compact: t.compact.iter().map(|x| format!("{x:.17e}")).collect(),
            transverse: t.transverse.iter().map(|x| format!("{x:.17e}")).collect(),
        },
    };
    SubgroupJson {
        real_dim: h.dim(),
        compact_dim: h.compact_dir.dim(),
        compact_set: h.is_compact_set(),
        direction: real_subspace_json(&h.direction),
        compact_direction: SubspaceRealRows {
            rows: h
                .compact_dir
                .basis_rows()
                .iter()
                .map(|r| rat_strs(r))
                .collect(),
        },
        base,
    }
}

#[derive(Serialize)]
pub struct StratificationJson {
    pub k: usize,
    pub degrees: Vec<i64>,
    pub vectors: Vec<Vec<String>>,
    pub translate: Vec<String>,
    pub flag_dims: Vec<usize>,
}

pub fn stratification_json(s: &Stratification) -> StratificationJson {
    StratificationJson {
        k: s.k,
        degrees: s.degrees.clone(),
        vectors: s.vectors.iter().map(|v| gq_strs(v)).collect(),
        translate: gq_strs(&s.v_last),
        flag_dims: s.chain.iter().map(|c| c.dim()).collect(),
    }
}

#[derive(Serialize)]
pub struct AnglesJson {
    pub kappa: usize,
    pub d_kappa: i64,
    pub direction_pair: (String, String),
    pub mu: String,
    pub norm_sq: String,
    pub radius_directions: Vec<f64>,
}

pub fn angles_json(a: &AngleData) -> AnglesJson {
    AnglesJson {
        kappa: a.kappa,
        d_kappa: a.d_kappa,
        direction_pair: (a.dir_pair.0.to_string(), a.dir_pair.1.to_string()),
        mu: a.mu.to_string(),
        norm_sq: rat_str(&a.norm_sq),
        radius_directions: a.directions.clone(),
    }
}

#[derive(Serialize)]
pub struct RadiusJson {
    pub p: usize,
    pub exact: bool,
    pub deltas: Vec<i64>,
    pub gamma_memberships: Vec<String>,
    pub is_gamma_radius: bool,
    pub thetas: Option<Vec<Vec<String>>>,
    pub translate: Option<Vec<String>>,
    pub fprime_dim: usize,
    pub component: Option<SubgroupJson>,
}

pub fn radius_json(r: &RadiusRecord, lattice: &Lattice) -> RadiusJson {
    RadiusJson {
        p: r.p,
        exact: r.exact,
        deltas: r.deltas.clone(),
        gamma_memberships: r
            .gamma_memberships
            .iter()
            .map(|t| format!("{t:?}"))
            .collect(),
        is_gamma_radius: r.is_gamma_radius,
        thetas: r
            .thetas_exact
            .as_ref()
            .map(|(ts, _)| ts.iter().map(|t| gq_strs(t)).collect()),
        translate: r.thetas_exact.as_ref().map(|(_, c)| gq_strs(c)),
        fprime_dim: r.fprime_dim,
        component: r.component.as_ref().map(|h| subgroup_json(h, lattice)),
    }
}

#[derive(Serialize)]
pub struct SequenceJson {
    pub betas: Vec<Vec<i64>>,
    pub f_b: SubspaceJson,
    pub sigma_minus_generators: Vec<Vec<String>>,
    pub sigma_geq_generators: Vec<Vec<String>>,
    pub sigma_zero: Vec<Vec<String>>,
    pub b_zero: Vec<Vec<i64>>,
    pub b_plus: Vec<Vec<i64>>,
    pub lambda: Vec<String>,
    pub l4_certificate: String,
}

pub fn sequence_json(s: &LeadingSequence) -> SequenceJson {
    SequenceJson {
        betas: s.betas.clone(),
        f_b: complex_subspace_json(&s.f_b),
        sigma_minus_generators: s
            .sigma_minus
            .generators
            .iter()
            .map(|g| rat_strs(g))
            .collect(),
        sigma_geq_generators: s
            .sigma_geq
            .generators
            .iter()
            .map(|g| rat_strs(g))
            .collect(),
        sigma_zero: s.sigma_zero.iter().map(|g| rat_strs(g)).collect(),
        b_zero: s.b_zero.clone(),
        b_plus: s.b_plus.clone(),
        lambda: s.lambda.iter().map(|x| x.to_string()).collect(),
        l4_certificate: match &s.l4_certificate {
            Some(limitflow_core::cones::TrivialityCertificate::Separator(v)) => {
                format!("separator {:?}", rat_strs(v))
            }
            Some(limitflow_core::cones::TrivialityCertificate::EmptyIntersection) => {
                "empty intersection (double description)".into()
            }
            None => "none".into(),
        },
    }
}

#[derive(Serialize)]
pub struct GoodDiscJson {
    pub n0: i64,
    pub n: i64,
    pub gamma: Vec<i64>,
    pub m: i64,
    pub lambda: Vec<String>,
    pub alpha: Vec<String>,
    pub b_target: Vec<String>,
    pub phi: Vec<String>,
}

pub fn good_disc_json(d: &GoodDisc, l: usize) -> GoodDiscJson {
    GoodDiscJson {
        n0: d.n0,
        n: d.n_big,
        gamma: d.gamma.clone(),
        m: d.m_big,
        lambda: d.lambda.iter().map(|x| x.to_string()).collect(),
        alpha: gq_strs(&d.alpha),
        b_target: gq_strs(&d.b_target),
        phi: d.describe(l),
    }
}
