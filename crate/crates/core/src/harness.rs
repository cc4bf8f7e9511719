//! Monte-Carlo verification of the measure-level claims: mass asymptotics,
//! Weyl-sum equidistribution against computed closures, sector geometry and
//! empirical cluster scans.
//!
//! All sampling is low-discrepancy (a scrambled Kronecker/lattice rule with
//! a PCG-seeded shift) and every accumulation is reduced over fixed-size
//! chunks, so reports are bit-identical for identical seed, sample count
//! and precision.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::curve::LaurentCurve;
use crate::lattice::{ClosedSubgroup, Lattice, SubgroupProjector, TorusPointF};
use crate::linalg::rat_to_f64 as limitflow_core_rat_to_f64;
use crate::{Error, Result};

pub use crate::curve::SectorSpec;

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

/// Minimal PCG32 (XSH-RR), used only to scramble sample lattices.
#[derive(Clone)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Pcg32 {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut p = Pcg32 {
            state: 0,
            inc: (stream << 1) | 1,
        };
        p.next_u32();
        p.state = p.state.wrapping_add(seed);
        p.next_u32();
        p
    }

    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.state = old
            .wrapping_mul(6364136223846793005)
            .wrapping_add(self.inc);
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    pub fn next_f64(&mut self) -> f64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (((hi << 21) ^ lo) & ((1 << 53) - 1)) as f64 / (1u64 << 53) as f64
    }
}

/// Fixed-chunk pairwise reduction: the result does not depend on how the
/// chunks were produced.
pub fn tree_sum(mut parts: Vec<f64>) -> f64 {
    if parts.is_empty() {
        return 0.0;
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        for pair in parts.chunks(2) {
            next.push(if pair.len() == 2 {
                pair[0] + pair[1]
            } else {
                pair[0]
            });
        }
        parts = next;
    }
    parts[0]
}

pub const CHUNK: usize = 4096;

// ---------------------------------------------------------------------------
// Sampling domains and empirical measures
// ---------------------------------------------------------------------------

/// Annulus sector `{ r0 < |x| < r1, θ ∈ [θ0, θ1] }`, relatively compact in
/// the punctured disc.
#[derive(Clone, Debug, Serialize)]
pub struct SampleDomain {
    pub r0: f64,
    pub r1: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub n: usize,
    pub seed: u64,
}

impl SampleDomain {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.r0 && self.r0 < self.r1 && self.r1 < 1.0) {
            return Err(Error::Invalid(
                "domain radii must satisfy 0 < r0 < r1 < 1".into(),
            ));
        }
        if self.theta1 < self.theta0 {
            return Err(Error::Invalid("empty angle range".into()));
        }
        Ok(())
    }

    pub fn delta_theta(&self) -> f64 {
        self.theta1 - self.theta0
    }
}

/// Weighted reduced samples approximating `μ_a`.
#[derive(Debug)]
pub struct EmpiricalMeasure {
    /// Sample points `x` in the scaled domain (re, im interleaved).
    pub xs: Vec<f64>,
    /// Compact coordinates, row-major `n_samples x rank`.
    pub compact: Vec<f64>,
    /// Transverse coordinates, row-major.
    pub transverse: Vec<f64>,
    pub weights: Vec<f64>,
    pub rank: usize,
    pub tr_len: usize,
    pub total_mass: f64,
    /// Normalization constant `λ0` of the mass lemma (quadrature value).
    pub lambda0: f64,
    pub pole_order: i64,
    pub a: (f64, f64),
}

impl EmpiricalMeasure {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> TorusPointF {
        TorusPointF {
            compact: self.compact[i * self.rank..(i + 1) * self.rank].to_vec(),
            transverse: self.transverse[i * self.tr_len..(i + 1) * self.tr_len].to_vec(),
        }
    }

    /// CSV dump: sample point, weight, torus coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_re,x_im,weight");
        for j in 0..self.rank {
            out.push_str(&format!(",t{j}"));
        }
        for j in 0..self.tr_len {
            out.push_str(&format!(",s{j}"));
        }
        out.push('\n');
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e}",
                self.xs[2 * i],
                self.xs[2 * i + 1],
                self.weights[i]
            ));
            for j in 0..self.rank {
                out.push_str(&format!(",{:.17e}", self.compact[i * self.rank + j]));
            }
            for j in 0..self.tr_len {
                out.push_str(&format!(",{:.17e}", self.transverse[i * self.tr_len + j]));
            }
            out.push('\n');
        }
        out
    }
}

/// Adaptive Simpson quadrature of `∫ g` on `[a,b]`.
fn adaptive_simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let s = |x0: f64, x1: f64| {
        let mid = 0.5 * (x0 + x1);
        (x1 - x0) / 6.0 * (g(x0) + 4.0 * g(mid) + g(x1))
    };
    let whole = s(a, b);
    let left = s(a, m);
    let right = s(m, b);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(g, a, m, tol / 2.0, depth - 1)
            + adaptive_simpson(g, m, b, tol / 2.0, depth - 1)
    }
}

/// `λ0 = d^2 ||v1||^2 ∫_U |x|^{-2d-2} (i dx ∧ dx̄)` by adaptive quadrature
/// over the annulus sector (the angular factor is exact).
pub fn lambda0(f: &LaurentCurve, dom: &SampleDomain) -> Result<f64> {
    let d = f.pole_bound();
    if d == 0 {
        return Err(Error::NoPoles);
    }
    let v1 = f.coeff(-d);
    let v1_norm2: f64 = v1
        .iter()
        .map(|c| {
            let (re, im) = c.to_f64_pair();
            re * re + im * im
        })
        .sum();
    let radial = adaptive_simpson(
        &|r: f64| r.powi((-2 * d - 1) as i32),
        dom.r0,
        dom.r1,
        1e-12,
        40,
    );
    // (i dx ∧ dx̄) = 2 dA = 2 r dr dθ.
    Ok((d * d) as f64 * v1_norm2 * 2.0 * dom.delta_theta() * radial)
}

fn cnorm2(z: (f64, f64)) -> f64 {
    z.0 * z.0 + z.1 * z.1
}

/// Push `f_* [U_a] ∧ ω_E` through the reduction. Sampling uses an exact
/// importance profile for the leading-order radial factor, so a pure
/// monomial map integrates exactly.
pub fn sample_mu_a(
    f: &LaurentCurve,
    dom: &SampleDomain,
    a: (f64, f64),
    lattice: &Lattice,
) -> Result<EmpiricalMeasure> {
    sample_mu_a_filtered(f, dom, a, lattice, None)
}

/// Variant keeping only sample points accepted by the filter (used for
/// sector-restricted measures).
pub fn sample_mu_a_filtered(
    f: &LaurentCurve,
    dom: &SampleDomain,
    a: (f64, f64),
    lattice: &Lattice,
    filter: Option<&dyn Fn((f64, f64)) -> bool>,
) -> Result<EmpiricalMeasure> {
    dom.validate()?;
    if a == (0.0, 0.0) {
        return Err(Error::Invalid("scale a must be non-zero".into()));
    }
    let d = f.pole_bound();
    if d == 0 {
        return Err(Error::NoPoles);
    }
    let rank = lattice.rank();
    let tr_len = lattice.real_dim() - rank;
    let lam0 = lambda0(f, dom)?;
    let deriv = f.derivative();
    let n = dom.n;
    let mut xs = Vec::with_capacity(2 * n);
    let mut compact = Vec::with_capacity(n * rank);
    let mut transverse = Vec::with_capacity(n * tr_len);
    let mut weights = Vec::with_capacity(n);
    // Importance profile: Φ(r) = r^{-2d} uniformized.
    let phi0 = dom.r0.powi(-2 * d as i32);
    let phi1 = dom.r1.powi(-2 * d as i32);
    let dphi = phi0 - phi1;
    let cell = dom.delta_theta() * dphi / (d as f64 * n as f64);
    let mut rng = Pcg32::new(dom.seed, 0x6c69746f);
    let shift_u = rng.next_f64();
    let shift_v = rng.next_f64();
    let golden = 0.618_033_988_749_894_9_f64;
    let mut mass_parts = Vec::with_capacity(n.div_ceil(CHUNK));
    let mut chunk_acc = 0.0;
    for k in 0..n {
        let u = ((k as f64 + 0.5) / n as f64 + shift_u).fract();
        let v = ((k as f64) * golden + shift_v).fract();
        let r = (phi0 + u * (phi1 - phi0)).powf(-0.5 / d as f64);
        let th = dom.theta0 + dom.delta_theta() * v;
        let y = (r * th.cos(), r * th.sin());
        let x = (a.0 * y.0 - a.1 * y.1, a.0 * y.1 + a.1 * y.0);
        if let Some(filt) = filter {
            if !filt(x) {
                if (k + 1) % CHUNK == 0 {
                    mass_parts.push(chunk_acc);
                    chunk_acc = 0.0;
                }
                continue;
            }
        }
        // w = ||f'(x)||^2 |a|^2 |y|^{2d+2} * cell
        let fp = deriv.eval_f64(x);
        let fp2: f64 = fp.iter().map(|&z| cnorm2(z)).sum();
        let w = fp2 * cnorm2(a) * r.powi((2 * d + 2) as i32) * cell;
        let val = f.eval_f64(x);
        let mut ambient = Vec::with_capacity(2 * val.len());
        for z in &val {
            ambient.push(z.0);
            ambient.push(z.1);
        }
        let t = lattice.reduce_f64(&ambient);
        xs.push(x.0);
        xs.push(x.1);
        compact.extend_from_slice(&t.compact);
        transverse.extend_from_slice(&t.transverse);
        weights.push(w);
        chunk_acc += w;
        if (k + 1) % CHUNK == 0 {
            mass_parts.push(chunk_acc);
            chunk_acc = 0.0;
        }
    }
    if n % CHUNK != 0 {
        mass_parts.push(chunk_acc);
    }
    Ok(EmpiricalMeasure {
        xs,
        compact,
        transverse,
        weights,
        rank,
        tr_len,
        total_mass: tree_sum(mass_parts),
        lambda0: lam0,
        pole_order: d,
        a,
    })
}

// ---------------------------------------------------------------------------
// Mass checks
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct MassRow {
    pub a: f64,
    pub mass: f64,
    pub ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct MassReport {
    pub lambda0: f64,
    pub rows: Vec<MassRow>,
    /// Log-log slope of `|ratio - 1|` against `a` (when definite).
    pub error_slope: Option<f64>,
}

/// Ratios `mass / (λ0 |a|^{-2d})` over a grid of scales.
pub fn mass_check(
    f: &LaurentCurve,
    dom: &SampleDomain,
    lattice: &Lattice,
    a_grid: &[f64],
) -> Result<MassReport> {
    let d = f.pole_bound();
    let mut rows = Vec::new();
    let mut pts = Vec::new();
    let mut lam0 = 0.0;
    for &a in a_grid {
        let mu = sample_mu_a(f, dom, (a, 0.0), lattice)?;
        lam0 = mu.lambda0;
        let predicted = mu.lambda0 * a.abs().powi(-2 * d as i32);
        let ratio = mu.total_mass / predicted;
        if (ratio - 1.0).abs() > 1e-14 {
            pts.push((a.abs().ln(), (ratio - 1.0).abs().ln()));
        }
        rows.push(MassRow {
            a,
            mass: mu.total_mass,
            ratio,
        });
    }
    let error_slope = if pts.len() >= 2 {
        Some(linear_slope(&pts))
    } else {
        None
    };
    Ok(MassReport {
        lambda0: lam0,
        rows,
        error_slope,
    })
}

fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[derive(Debug, Serialize)]
pub struct SectorMassRow {
    pub a: f64,
    pub sector_mass: f64,
    /// `a^{2d - d_κ} * mass(E_A)`: constant in the limit.
    pub normalized: f64,
}

#[derive(Debug, Serialize)]
pub struct SectorMassReport {
    pub rows: Vec<SectorMassRow>,
    pub max_relative_spread: f64,
}

/// Sector variant of the mass lemma: integrate only where
/// `|Im H(f(x))| < A` and the sample leans toward the radius `p`.
///
/// The sector shrinks like `a^{d_κ}` in angle, so the angular variable is
/// sampled in two strata: a window around the radius direction wide enough
/// to contain the sector, and the remainder of the domain. Both strata are
/// weighted by their own cell measure, so the estimator stays unbiased.
pub fn sector_mass_check(
    f: &LaurentCurve,
    dom: &SampleDomain,
    a_grid: &[f64],
    h_row: &[(f64, f64)],
    a_bound: f64,
    d_kappa: i64,
    radius_directions: &[f64],
    p: usize,
) -> Result<SectorMassReport> {
    let d = f.pole_bound();
    if d == 0 {
        return Err(Error::NoPoles);
    }
    let deriv = f.derivative();
    let theta_p = radius_directions.get(p).copied().unwrap_or(0.0);
    let mut rows = Vec::new();
    for &a in a_grid {
        let n = dom.n.max(2);
        let phi0 = dom.r0.powi(-2 * d as i32);
        let phi1 = dom.r1.powi(-2 * d as i32);
        let mut rng = Pcg32::new(dom.seed, 0x6c69746f);
        let shift_u = rng.next_f64();
        let shift_v = rng.next_f64();
        let golden = 0.618_033_988_749_894_9_f64;
        // Angular strata: window around the radius, then the rest.
        let half = 4.0 * a_bound * (a * dom.r1).powi(d_kappa as i32) / d_kappa as f64;
        let w_lo = (theta_p - half).max(dom.theta0);
        let w_hi = (theta_p + half).min(dom.theta1);
        let window = (w_lo, w_hi.max(w_lo));
        let rest_len = (window.0 - dom.theta0) + (dom.theta1 - window.1);
        let win_len = window.1 - window.0;
        let n_w = n / 2;
        let n_r = n - n_w;
        let mut parts = Vec::new();
        let mut acc = 0.0;
        let push_sample = |k: usize, theta: f64, dtheta: f64, acc: &mut f64| {
            let u = ((k as f64 + 0.5) / n as f64 + shift_u).fract();
            let r = (phi0 + u * (phi1 - phi0)).powf(-0.5 / d as f64);
            let y = (r * theta.cos(), r * theta.sin());
            let x = (a * y.0, a * y.1);
            // Nearest radius must be p.
            if radius_directions.len() > 1 {
                let arg = x.1.atan2(x.0).rem_euclid(std::f64::consts::TAU);
                let mut best = (f64::INFINITY, usize::MAX);
                for (pi, dir) in radius_directions.iter().enumerate() {
                    let mut dd = (arg - dir).abs();
                    dd = dd.min(std::f64::consts::TAU - dd);
                    if dd < best.0 {
                        best = (dd, pi);
                    }
                }
                if best.1 != p {
                    return;
                }
            }
            let val = f.eval_f64(x);
            let mut h_im = 0.0;
            for (z, c) in val.iter().zip(h_row) {
                h_im += c.0 * z.1 + c.1 * z.0;
            }
            if h_im.abs() >= a_bound {
                return;
            }
            let fp = deriv.eval_f64(x);
            let fp2: f64 = fp.iter().map(|&z| cnorm2(z)).sum();
            *acc += fp2 * (a * a) * r.powi((2 * d + 2) as i32) * (phi0 - phi1) * dtheta
                / d as f64;
        };
        if win_len > 0.0 {
            let dtheta = win_len / n_w as f64;
            for k in 0..n_w {
                let v = ((k as f64) * golden + shift_v).fract();
                push_sample(k, window.0 + win_len * v, dtheta, &mut acc);
                if (k + 1) % CHUNK == 0 {
                    parts.push(acc);
                    acc = 0.0;
                }
            }
        }
        if rest_len > 0.0 {
            let dtheta = rest_len / n_r as f64;
            for k in 0..n_r {
                let v = ((k as f64) * golden + shift_v).fract();
                let off = rest_len * v;
                let theta = if off < window.0 - dom.theta0 {
                    dom.theta0 + off
                } else {
                    window.1 + (off - (window.0 - dom.theta0))
                };
                push_sample(n_w + k, theta, dtheta, &mut acc);
                if (n_w + k + 1) % CHUNK == 0 {
                    parts.push(acc);
                    acc = 0.0;
                }
            }
        }
        parts.push(acc);
        let mass = tree_sum(parts);
        rows.push(SectorMassRow {
            a,
            sector_mass: mass,
            normalized: a.abs().powi((2 * d - d_kappa) as i32) * mass,
        });
    }
    let vals: Vec<f64> = rows.iter().map(|r| r.normalized).collect();
    let mean = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
    let max_rel = vals
        .iter()
        .map(|v| (v - mean).abs() / mean.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Ok(SectorMassReport {
        rows,
        max_relative_spread: max_rel,
    })
}

// ---------------------------------------------------------------------------
// Weyl sums
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct WeylEntry {
    pub m: Vec<i64>,
    pub magnitude: f64,
}

#[derive(Debug, Serialize)]
pub struct WeylReport {
    pub annihilating: Vec<WeylEntry>,
    pub non_annihilating: Vec<WeylEntry>,
    pub max_non_annihilating: f64,
    pub min_annihilating: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
}

/// Normalized character sums `Ŵ(m) = Σ w_j χ_m(p_j) / Σ w_j` for all `m`
/// with coefficients bounded by `degree`, classified against the subgroup.
pub fn weyl_test(
    mu: &EmpiricalMeasure,
    h: &ClosedSubgroup,
    lattice: &Lattice,
    degree: i64,
    tolerance: f64,
) -> Result<WeylReport> {
    let (ann, non) = lattice.dual_annihilator(h, degree)?;
    let r = mu.rank;
    let n = mu.len();
    let mut all: Vec<Vec<i64>> = ann.clone();
    all.extend(non.iter().map(|(m, _)| m.clone()));
    // Per-character chunked sums.
    let chunks = n.div_ceil(CHUNK);
    let mut re_parts = vec![vec![0.0; chunks]; all.len()];
    let mut im_parts = vec![vec![0.0; chunks]; all.len()];
    let mut w_parts = vec![0.0; chunks];
    for c in 0..chunks {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(n);
        for i in lo..hi {
            let t = &mu.compact[i * r..(i + 1) * r];
            let w = mu.weights[i];
            w_parts[c] += w;
            for (mi, m) in all.iter().enumerate() {
                let phase: f64 = m
                    .iter()
                    .zip(t)
                    .map(|(&mj, &tj)| mj as f64 * tj)
                    .sum::<f64>()
                    * std::f64::consts::TAU;
                re_parts[mi][c] += w * phase.cos();
                im_parts[mi][c] += w * phase.sin();
            }
        }
    }
    let total_w = tree_sum(w_parts);
    if total_w <= 0.0 {
        return Err(Error::Invalid("empirical measure has zero mass".into()));
    }
    let mags: Vec<f64> = (0..all.len())
        .map(|mi| {
            let re = tree_sum(re_parts[mi].clone());
            let im = tree_sum(im_parts[mi].clone());
            (re * re + im * im).sqrt() / total_w
        })
        .collect();
    let mut annihilating = Vec::new();
    let mut non_annihilating = Vec::new();
    for (mi, m) in all.iter().enumerate() {
        let entry = WeylEntry {
            m: m.clone(),
            magnitude: mags[mi],
        };
        if mi < ann.len() {
            annihilating.push(entry);
        } else {
            non_annihilating.push(entry);
        }
    }
    let max_non = non_annihilating
        .iter()
        .map(|e| e.magnitude)
        .fold(0.0, f64::max);
    let min_ann = annihilating
        .iter()
        .map(|e| e.magnitude)
        .fold(f64::INFINITY, f64::min);
    let pass = max_non <= tolerance && min_ann >= 0.5;
    Ok(WeylReport {
        annihilating,
        non_annihilating,
        max_non_annihilating: max_non,
        min_annihilating: min_ann,
        tolerance,
        pass,
        samples: n,
    })
}

// ---------------------------------------------------------------------------
// Cluster scans
// ---------------------------------------------------------------------------

/// Polynomial map `C^q -> C^n` with f64 coefficients, for boundary scans.
#[derive(Clone, Debug)]
pub struct PolyMap {
    pub q: usize,
    /// One component: list of (powers, coefficient).
    pub components: Vec<Vec<(Vec<i64>, (f64, f64))>>,
}

impl PolyMap {
    pub fn eval(&self, z: &[(f64, f64)]) -> Vec<(f64, f64)> {
        self.components
            .iter()
            .map(|terms| {
                let mut acc = (0.0, 0.0);
                for (pow, c) in terms {
                    let mut m = (1.0, 0.0);
                    for (zj, &e) in z.iter().zip(pow) {
                        for _ in 0..e {
                            m = (m.0 * zj.0 - m.1 * zj.1, m.0 * zj.1 + m.1 * zj.0);
                        }
                    }
                    acc.0 += c.0 * m.0 - c.1 * m.1;
                    acc.1 += c.0 * m.1 + c.1 * m.0;
                }
                acc
            })
            .collect()
    }
}

/// How one parameter coordinate is driven during a scan.
#[derive(Clone, Debug)]
pub enum CoordRegion {
    /// Stay in a bounded box.
    Bounded { re: (f64, f64), im: (f64, f64) },
    /// Drive to infinity: `|z|` log-uniform in the range, phase free.
    Radial { r: (f64, f64) },
}

#[derive(Clone, Debug)]
pub struct RegionSpec {
    pub coords: Vec<CoordRegion>,
    /// Half-width of the `Γ_R` tube defining retention.
    pub window: f64,
    /// Gauss-Newton projection onto the tube manifold before testing
    /// retention (needed when the tube has positive codimension in the
    /// radial directions).
    pub solve: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Predicted limit set for distance reporting.
pub enum Predicted {
    None,
    Subgroup(ClosedSubgroup),
    /// Subgroup translated along a plane curve in one coordinate:
    /// `{ arg(poly(s)) ∈ {θ, θ+π} } ∪ {poly(s)=0}` in the given slot.
    /// `subgroup_aug` must contain the curve coordinate plane in its
    /// direction, so it measures escape transverse to the whole set.
    SubgroupPlusCurve {
        subgroup_aug: ClosedSubgroup,
        coord: usize,
        poly: Vec<(f64, f64)>,
        dir_angle: f64,
        shell: i64,
    },
}

#[derive(Debug, Serialize)]
pub struct CoverageReport {
    pub grid_dim: usize,
    pub cells: usize,
    pub hit: usize,
    pub covered: bool,
    pub delta: f64,
}

#[derive(Debug, Serialize)]
pub struct ClusterReport {
    pub attempts: usize,
    pub retained: usize,
    pub fraction_retained: f64,
    pub max_distance_to_predicted: Option<f64>,
    pub mean_distance_to_predicted: Option<f64>,
    pub coverage: Option<CoverageReport>,
}

/// Drive parameters to the boundary, retain samples staying in a bounded
/// tube around `Γ_R`, and compare against a predicted set.
pub fn cluster_scan(
    map: &PolyMap,
    region: &RegionSpec,
    lattice: &Lattice,
    predicted: &Predicted,
    delta: f64,
) -> Result<ClusterReport> {
    if region.coords.len() != map.q {
        return Err(Error::DimensionMismatch("region/coordinate count".into()));
    }
    let mut rng = Pcg32::new(region.seed, 0x636c7573);
    let mut retained_pts: Vec<TorusPointF> = Vec::new();
    let tr_len = lattice.real_dim() - lattice.rank();
    let mut attempts = 0usize;
    // One projector per scan; construction runs a lattice reduction.
    let projector = match predicted {
        Predicted::Subgroup(h) => Some(SubgroupProjector::new(lattice, h)),
        Predicted::SubgroupPlusCurve { subgroup_aug, .. } => {
            Some(SubgroupProjector::new(lattice, subgroup_aug))
        }
        Predicted::None => None,
    };
    for _ in 0..region.samples {
        attempts += 1;
        // Draw a start.
        let mut z: Vec<(f64, f64)> = Vec::with_capacity(map.q);
        let mut radial_targets: Vec<(usize, f64)> = Vec::new();
        for (j, c) in region.coords.iter().enumerate() {
            match c {
                CoordRegion::Bounded { re, im } => {
                    let x = re.0 + (re.1 - re.0) * rng.next_f64();
                    let y = im.0 + (im.1 - im.0) * rng.next_f64();
                    z.push((x, y));
                }
                CoordRegion::Radial { r } => {
                    let rho = (r.0.ln() + (r.1.ln() - r.0.ln()) * rng.next_f64()).exp();
                    let phase = std::f64::consts::TAU * rng.next_f64();
                    z.push((rho * phase.cos(), rho * phase.sin()));
                    radial_targets.push((j, rho));
                }
            }
        }
        // Tube targets for the transverse coordinates of the image.
        let targets: Vec<f64> = (0..tr_len)
            .map(|_| region.window * (2.0 * rng.next_f64() - 1.0))
            .collect();
        if region.solve {
            if !gauss_newton_project(map, lattice, &mut z, &radial_targets, &targets) {
                continue;
            }
        }
        // Retention: image stays within the Γ_R window.
        let w = map.eval(&z);
        let mut ambient = Vec::with_capacity(2 * w.len());
        for v in &w {
            ambient.push(v.0);
            ambient.push(v.1);
        }
        let reduced = lattice.reduce_f64(&ambient);
        if reduced
            .transverse
            .iter()
            .any(|s| s.abs() > region.window)
        {
            continue;
        }
        retained_pts.push(reduced);
    }
    let retained = retained_pts.len();
    let (max_d, mean_d) = match predicted {
        Predicted::None => (None, None),
        _ if retained == 0 => (None, None),
        _ => {
            let dists: Vec<f64> = retained_pts
                .iter()
                .map(|p| predicted_distance(predicted, projector.as_ref(), p, lattice))
                .collect();
            let max = dists.iter().cloned().fold(0.0, f64::max);
            let mean = dists.iter().sum::<f64>() / dists.len() as f64;
            (Some(max), Some(mean))
        }
    };
    let coverage = match predicted {
        Predicted::Subgroup(h) if retained > 0 => {
            Some(coverage_of_compact(&retained_pts, h, lattice, delta))
        }
        _ => None,
    };
    Ok(ClusterReport {
        attempts,
        retained,
        fraction_retained: retained as f64 / attempts.max(1) as f64,
        max_distance_to_predicted: max_d,
        mean_distance_to_predicted: mean_d,
        coverage,
    })
}

fn predicted_distance(
    predicted: &Predicted,
    projector: Option<&SubgroupProjector>,
    p: &TorusPointF,
    lattice: &Lattice,
) -> f64 {
    match predicted {
        Predicted::None => 0.0,
        Predicted::Subgroup(_) => projector.expect("built above").distance(lattice, p),
        Predicted::SubgroupPlusCurve {
            coord,
            poly,
            dir_angle,
            shell,
            ..
        } => {
            // Escape transverse to subgroup + curve plane, plus the
            // in-plane distance to the curve.
            let aug_d = projector.expect("built above").distance(lattice, p);
            // Reconstruct the complex coordinate from split coordinates:
            // valid for product lattices where slot `coord` carries one
            // compact (real) and one transverse (imaginary) direction.
            let s_re = p.compact.get(*coord).copied().unwrap_or(0.0);
            let s_im = p.transverse.get(*coord).copied().unwrap_or(0.0);
            let mut best = f64::INFINITY;
            for k in -shell..=*shell {
                let s = (s_re + k as f64, s_im);
                best = best.min(curve_distance(poly, *dir_angle, s));
            }
            (aug_d * aug_d + best * best).sqrt()
        }
    }
}

/// Distance from `s` to `{ Im(e^{-iθ} poly(s)) = 0 }` by projected Newton.
fn curve_distance(poly: &[(f64, f64)], dir_angle: f64, s0: (f64, f64)) -> f64 {
    let eta = ((-dir_angle).cos(), (-dir_angle).sin());
    let eval = |s: (f64, f64)| -> ((f64, f64), (f64, f64)) {
        // returns (p(s), p'(s))
        let mut p = (0.0, 0.0);
        let mut dp = (0.0, 0.0);
        for (k, c) in poly.iter().enumerate().rev() {
            // Horner for p and dp
            dp = (
                dp.0 * s.0 - dp.1 * s.1 + p.0,
                dp.0 * s.1 + dp.1 * s.0 + p.1,
            );
            p = (p.0 * s.0 - p.1 * s.1 + c.0, p.0 * s.1 + p.1 * s.0 + c.1);
            let _ = k;
        }
        (p, dp)
    };
    let g = |s: (f64, f64)| -> f64 {
        let (p, _) = eval(s);
        eta.0 * p.1 + eta.1 * p.0
    };
    let mut s = s0;
    for _ in 0..24 {
        let (p, dp) = eval(s);
        let gval = eta.0 * p.1 + eta.1 * p.0;
        if gval.abs() < 1e-14 {
            break;
        }
        // gradient of g as a complex number
        let etadp = (
            eta.0 * dp.0 - eta.1 * dp.1,
            eta.0 * dp.1 + eta.1 * dp.0,
        );
        let grad = (etadp.1, etadp.0); // (Im, Re)
        let n2 = grad.0 * grad.0 + grad.1 * grad.1;
        if n2 < 1e-30 {
            break;
        }
        s = (s.0 - gval * grad.0 / n2, s.1 - gval * grad.1 / n2);
    }
    let moved = ((s.0 - s0.0).powi(2) + (s.1 - s0.1).powi(2)).sqrt();
    if g(s).abs() < 1e-9 {
        moved
    } else {
        f64::INFINITY
    }
}

/// Gauss-Newton projection onto `{ transverse(map(z)) = targets,
/// |z_j| = ρ_j }` with the bounded coordinates staying near their draw.
fn gauss_newton_project(
    map: &PolyMap,
    lattice: &Lattice,
    z: &mut Vec<(f64, f64)>,
    radial_targets: &[(usize, f64)],
    targets: &[f64],
) -> bool {
    let q = map.q;
    let nvar = 2 * q;
    let neq = targets.len() + radial_targets.len();
    let residual = |z: &Vec<(f64, f64)>| -> Vec<f64> {
        let w = map.eval(z);
        let mut ambient = Vec::with_capacity(2 * w.len());
        for v in &w {
            ambient.push(v.0);
            ambient.push(v.1);
        }
        let (_, s) = lattice.split_coords_f64(&ambient);
        let mut r: Vec<f64> = s.iter().zip(targets).map(|(a, b)| a - b).collect();
        for (j, rho) in radial_targets {
            let n = (z[*j].0 * z[*j].0 + z[*j].1 * z[*j].1).sqrt();
            r.push((n - rho) / rho);
        }
        r
    };
    for _ in 0..60 {
        let r0 = residual(z);
        let err: f64 = r0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if err < 1e-10 {
            return true;
        }
        // Numerical Jacobian.
        let mut jac = vec![vec![0.0; nvar]; neq];
        for v in 0..nvar {
            let (j, im) = (v / 2, v % 2 == 1);
            let scale = 1e-7 * (1.0 + (z[j].0 * z[j].0 + z[j].1 * z[j].1).sqrt());
            let mut zp = z.clone();
            if im {
                zp[j].1 += scale;
            } else {
                zp[j].0 += scale;
            }
            let rp = residual(&zp);
            for e in 0..neq {
                jac[e][v] = (rp[e] - r0[e]) / scale;
            }
        }
        // Solve J^T J δ = -J^T r (ridge-regularized).
        let mut jtj = vec![vec![0.0; nvar]; nvar];
        let mut jtr = vec![0.0; nvar];
        for a in 0..nvar {
            for b in 0..nvar {
                let mut acc = 0.0;
                for e in 0..neq {
                    acc += jac[e][a] * jac[e][b];
                }
                jtj[a][b] = acc;
            }
            jtj[a][a] += 1e-12;
            let mut acc = 0.0;
            for e in 0..neq {
                acc += jac[e][a] * r0[e];
            }
            jtr[a] = -acc;
        }
        let Some(delta) = solve_dense(&mut jtj, &mut jtr) else {
            return false;
        };
        // Trust region scaled to the coordinate magnitudes, so radial
        // phases can travel around large circles.
        let scale: f64 = z
            .iter()
            .map(|p| (p.0 * p.0 + p.1 * p.1).sqrt())
            .fold(1.0, f64::max);
        let step = delta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cap = 0.5 * scale;
        let damp = if step > cap { cap / step } else { 1.0 };
        for j in 0..q {
            z[j].0 += damp * delta[2 * j];
            z[j].1 += damp * delta[2 * j + 1];
        }
        if !z.iter().all(|p| p.0.is_finite() && p.1.is_finite()) {
            return false;
        }
    }
    let r = residual(z);
    r.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-6
}

fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for j in col..n {
            a[col][j] /= d;
        }
        b[col] /= d;
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in col..n {
                    a[r][j] -= f * a[col][j];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some(b.to_vec())
}

/// δ-net coverage of the compact cross-section of a subgroup by samples.
///
/// Grid points are generated along an integer frame basis of the compact
/// direction; samples are bucketed by their compact coordinates so each
/// grid point only probes its neighborhood.
pub fn coverage_of_compact(
    samples: &[TorusPointF],
    h: &ClosedSubgroup,
    lattice: &Lattice,
    delta: f64,
) -> CoverageReport {
    let r = lattice.rank();
    let mut frame_rows: Vec<Vec<f64>> = Vec::new();
    for row in h.compact_dir.basis_rows() {
        if let Ok(t) = lattice.frame_coords(&row) {
            let denom_lcm = t.iter().fold(num_bigint::BigInt::from(1), |acc, x| {
                num_integer::Integer::lcm(&acc, x.denom())
            });
            let ints: Vec<f64> = t
                .iter()
                .map(|x| {
                    (x.numer() * (&denom_lcm / x.denom()))
                        .to_f64()
                        .unwrap_or(0.0)
                })
                .collect();
            frame_rows.push(ints);
        }
    }
    let d = frame_rows.len();
    if d == 0 || d > 3 {
        return CoverageReport {
            grid_dim: d,
            cells: 0,
            hit: 0,
            covered: d == 0,
            delta,
        };
    }
    let base = h.base_f64();
    // Bucket samples by compact coordinates, cell size δ.
    let cell = delta.max(1e-9);
    let n_cells = (1.0 / cell).ceil().max(1.0) as i64;
    let key = |t: &[f64]| -> Vec<i64> {
        t.iter()
            .map(|x| ((x.rem_euclid(1.0) / cell).floor() as i64).min(n_cells - 1))
            .collect()
    };
    let mut buckets: std::collections::HashMap<Vec<i64>, Vec<usize>> =
        std::collections::HashMap::new();
    for (i, p) in samples.iter().enumerate() {
        buckets.entry(key(&p.compact[..r])).or_default().push(i);
    }
    let zero_tr = vec![0.0; lattice.real_dim() - r];
    // Per-dimension grid resolution from each row's own norm.
    let steps: Vec<usize> = frame_rows
        .iter()
        .map(|row| {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            ((2.0 * norm * (d as f64).sqrt()) / delta).ceil() as usize + 1
        })
        .collect();
    let mut grid_pts: Vec<Vec<f64>> = vec![vec![]];
    for &st in &steps {
        let mut next = Vec::new();
        for g in &grid_pts {
            for sidx in 0..st {
                let mut v = g.clone();
                v.push(sidx as f64 / st as f64);
                next.push(v);
            }
        }
        grid_pts = next;
    }
    // Neighbor offsets (±2 cells per coordinate).
    let mut offsets: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for o in &offsets {
            for k in -2i64..=2 {
                let mut w = o.clone();
                w.push(k);
                next.push(w);
            }
        }
        offsets = next;
    }
    // Wrapped-coordinate distance; enough for bucketed near neighbors.
    let gens: Vec<Vec<f64>> = (0..r)
        .map(|j| {
            lattice
                .gens_real()[j]
                .iter()
                .map(limitflow_core_rat_to_f64)
                .collect()
        })
        .collect();
    let quick_dist = |a: &[f64], b: &[f64]| -> f64 {
        let m = gens.first().map_or(0, |g| g.len());
        let mut x = vec![0.0; m];
        for j in 0..r {
            let mut dt = a[j] - b[j];
            dt -= dt.round();
            if dt != 0.0 {
                for i in 0..m {
                    x[i] += dt * gens[j][i];
                }
            }
        }
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    };
    let mut hit = 0;
    for u in &grid_pts {
        let mut t = vec![0.0; r];
        for (ui, row) in u.iter().zip(&frame_rows) {
            for (tk, rk) in t.iter_mut().zip(row) {
                *tk += ui * rk;
            }
        }
        for (tk, bk) in t.iter_mut().zip(&base.compact) {
            *tk = (*tk + bk).rem_euclid(1.0);
        }
        let gp = TorusPointF {
            compact: t.clone(),
            transverse: zero_tr.clone(),
        };
        let center = key(&t);
        let mut found = false;
        'probe: for off in &offsets {
            let nk: Vec<i64> = center
                .iter()
                .zip(off)
                .map(|(c, o)| (c + o).rem_euclid(n_cells))
                .collect();
            if let Some(ids) = buckets.get(&nk) {
                for &i in ids {
                    if quick_dist(&samples[i].compact[..r], &gp.compact) <= delta {
                        found = true;
                        break 'probe;
                    }
                }
            }
        }
        if found {
            hit += 1;
        }
    }
    CoverageReport {
        grid_dim: d,
        cells: grid_pts.len(),
        hit,
        covered: hit == grid_pts.len(),
        delta,
    }
}
