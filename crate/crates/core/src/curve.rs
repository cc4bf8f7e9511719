//! One-dimensional flows: stratification of a Laurent curve, almost-Γ and
//! Γ-radii, the per-radius expansion, limit sets, and the ALW hull.
//!
//! The input is a Laurent polynomial `f: D* -> E` with exact coefficients
//! and a declared truncation order; analytic factors `1 + O(x)` are
//! represented by the retained higher terms, and any structural decision
//! that would touch an unspecified coefficient raises
//! `TruncationInsufficient`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ball::{nth_root_certified, ComplexBall};
use crate::exact::{rationalize_f64, GaussianRational as Gq, Rat};
use crate::lattice::{AmbientPoint, ClosedSubgroup, Lattice, TorusPoint};
use crate::linalg::{
    mul_i_real, realify, realify_ball, realify_subspace, BallVec, CVec,
    ComplexSubspace, RVec, RealSubspace, RealSubspaceBall, RealSubspaceExact,
};
use crate::mat::Mat;
use crate::series::{Coeff, Ser, VSer};
use crate::{Error, Result, Trilean};

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

/// Finite Laurent data `f(x) = Σ_e x^e v_e` with all terms of exponent
/// `>= truncation` unspecified.
#[derive(Clone, Debug)]
pub struct LaurentCurve {
    pub dim: usize,
    pub terms: BTreeMap<i64, CVec>,
    pub truncation: i64,
}

impl LaurentCurve {
    pub fn new(dim: usize, terms: Vec<(i64, CVec)>, truncation: i64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, v) in terms {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "curve term at {e} has length {} (dim {dim})",
                    v.len()
                )));
            }
            if e >= truncation {
                return Err(Error::Invalid(format!(
                    "term at exponent {e} is at or above the truncation {truncation}"
                )));
            }
            if !v.iter().all(|c| c.is_zero()) {
                map.insert(e, v);
            }
        }
        Ok(LaurentCurve {
            dim,
            terms: map,
            truncation,
        })
    }

    /// Largest pole order (0 for bounded maps).
    pub fn pole_bound(&self) -> i64 {
        self.terms.keys().next().map_or(0, |e| (-e).max(0))
    }

    pub fn has_pole(&self) -> bool {
        self.pole_bound() > 0
    }

    pub fn coeff(&self, e: i64) -> CVec {
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| vec![Gq::zero(); self.dim])
    }

    pub fn to_vser(&self) -> VSer<Gq> {
        let mut v = VSer::zero(self.dim, self.truncation);
        for (e, c) in &self.terms {
            v.set(*e, c.clone());
        }
        v
    }

    /// Evaluate at a complex point (f64), for sampling work.
    pub fn eval_f64(&self, x: (f64, f64)) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); self.dim];
        for (e, c) in &self.terms {
            let xe = cpow(x, *e);
            for (o, q) in out.iter_mut().zip(c) {
                let (re, im) = q.to_f64_pair();
                o.0 += re * xe.0 - im * xe.1;
                o.1 += re * xe.1 + im * xe.0;
            }
        }
        out
    }

    /// Derivative coefficients, for density weights.
    pub fn derivative(&self) -> LaurentCurve {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if *e == 0 {
                continue;
            }
            let f = Gq::from_rat(Rat::from_integer((*e).into()));
            terms.insert(e - 1, c.iter().map(|q| q * &f).collect::<CVec>());
        }
        LaurentCurve {
            dim: self.dim,
            terms,
            truncation: self.truncation - 1,
        }
    }
}

fn cpow(x: (f64, f64), e: i64) -> (f64, f64) {
    let r = (x.0 * x.0 + x.1 * x.1).sqrt();
    let th = x.1.atan2(x.0);
    let rp = r.powi(e as i32);
    let ang = th * e as f64;
    (rp * ang.cos(), rp * ang.sin())
}

// ---------------------------------------------------------------------------
// Stratification
// ---------------------------------------------------------------------------

/// Leading-term data `d_1 > ... > d_k`, vectors `v_l` and the flag chain
/// `F_1 ⊂ ... ⊂ F_k`, with the affine part `V = F_k + v_{k+1}`.
#[derive(Clone, Debug)]
pub struct Stratification {
    pub k: usize,
    pub degrees: Vec<i64>,
    pub vectors: Vec<CVec>,
    /// Translate `v_{k+1}`, reduced modulo `F_k`.
    pub v_last: CVec,
    pub chain: Vec<ComplexSubspace>,
}

impl Stratification {
    pub fn f_k(&self) -> &ComplexSubspace {
        self.chain.last().expect("k >= 1")
    }

    pub fn f_l(&self, l: usize) -> ComplexSubspace {
        if l == 0 {
            ComplexSubspace::zero(self.chain[0].ambient)
        } else {
            self.chain[l - 1].clone()
        }
    }
}

/// The inductive leading-term construction. `d_{l+1}` is the largest pole
/// order of the projection of `f` modulo `F_l` and `v_{l+1}` its leading
/// coefficient, lifted to non-pivot coordinates.
pub fn stratify(f: &LaurentCurve) -> Result<Stratification> {
    if !f.has_pole() {
        return Err(Error::NoPoles);
    }
    if f.truncation < 1 {
        return Err(Error::TruncationInsufficient(
            "constant term is undetermined (truncation < 1)".into(),
        ));
    }
    let n = f.dim;
    let mut chain: Vec<ComplexSubspace> = Vec::new();
    let mut degrees = Vec::new();
    let mut vectors: Vec<CVec> = Vec::new();
    let mut current = ComplexSubspace::zero(n);
    loop {
        let mut found = None;
        for (e, c) in f.terms.range(..0) {
            let red = current.reduce(c);
            if !red.iter().all(|x| x.is_zero()) {
                found = Some((*e, red));
                break;
            }
        }
        let Some((e, v)) = found else {
            break;
        };
        degrees.push(-e);
        let mut rows = current.basis_rows();
        rows.push(v.clone());
        current = ComplexSubspace::span(&rows)?;
        vectors.push(v);
        chain.push(current.clone());
        if chain.len() > n {
            return Err(Error::Invalid("stratification exceeded ambient dimension".into()));
        }
    }
    let v_last = current.reduce(&f.coeff(0));
    Ok(Stratification {
        k: chain.len(),
        degrees,
        vectors,
        v_last,
        chain,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compactness {
    Compact,
    NonCompact,
}

/// Hypothesis (H1) test: the closure is compact iff `F_k ⊆ Γ_R`,
/// i.e. every basis vector and its `i`-multiple lie in `Γ_R`.
pub fn classify_compactness(s: &Stratification, lattice: &Lattice) -> Compactness {
    for row in s.f_k().basis_rows() {
        if !lattice.in_gamma_r(&row).is_in() {
            return Compactness::NonCompact;
        }
        let irow: CVec = row.iter().map(|z| z.mul_i()).collect();
        if !lattice.in_gamma_r(&irow).is_in() {
            return Compactness::NonCompact;
        }
    }
    Compactness::Compact
}

/// Compact case: the limit set is the closure of `π(V)`.
pub fn limit_set_compact(s: &Stratification, lattice: &Lattice) -> Result<ClosedSubgroup> {
    let dir = realify_subspace(s.f_k());
    lattice.subgroup_closure(
        &RealSubspace::Exact(dir),
        &AmbientPoint::from_complex(&s.v_last),
    )
}

// ---------------------------------------------------------------------------
// Almost-Γ-radii
// ---------------------------------------------------------------------------

/// Data of the almost-Γ-radius family: the index `κ`, the exact direction
/// pair `(c0, s0)` with `(c0 - i s0) v_κ ∈ Γ_R`, and the unit `λ` with
/// `λ^{d_κ} v_κ ∈ Γ_R` (exact when the norm is a perfect square).
#[derive(Clone, Debug)]
pub struct AngleData {
    /// 1-based index of the first stratum escaping `Γ_R`.
    pub kappa: usize,
    pub d_kappa: i64,
    /// Primitive integer solution `(c0, s0)`.
    pub dir_pair: (BigInt, BigInt),
    /// `μ = c0 - i s0`; `μ v_κ ∈ Γ_R` and `λ^{d_κ} = μ / |μ|`.
    pub mu: Gq,
    /// `|μ|^2 = c0^2 + s0^2`.
    pub norm_sq: Rat,
    /// Radius directions `θ_p = arg λ + p π / d_κ` (reporting only).
    pub directions: Vec<f64>,
}

impl AngleData {
    pub fn num_radii(&self) -> usize {
        2 * self.d_kappa as usize
    }

    pub fn lambda_arg(&self) -> f64 {
        let (re, im) = self.mu.to_f64_pair();
        // λ^{d_κ} = μ/|μ|; principal d_κ-th root.
        im.atan2(re) / self.d_kappa as f64
    }
}

#[derive(Clone, Debug)]
pub enum AnglesOutcome {
    /// No direction keeps the leading stratum near `Γ_R`: `Λ_f` is empty.
    NoAlmostGammaRadius { kappa: usize },
    Radii(AngleData),
}

pub fn kappa_and_angles(s: &Stratification, lattice: &Lattice) -> Result<AnglesOutcome> {
    let mut kappa = None;
    for (l, v) in s.vectors.iter().enumerate() {
        let iv: CVec = v.iter().map(|z| z.mul_i()).collect();
        if !(lattice.in_gamma_r(v).is_in() && lattice.in_gamma_r(&iv).is_in()) {
            kappa = Some(l + 1);
            break;
        }
    }
    let kappa = kappa.ok_or_else(|| {
        Error::Invalid("kappa_and_angles called on a compact-case stratification".into())
    })?;
    let v = &s.vectors[kappa - 1];
    let x = realify(v);
    let iv: CVec = v.iter().map(|z| z.mul_i()).collect();
    let y = realify(&iv);
    // Solve c*x - s*y ∈ Γ_R: the transverse parts must cancel.
    let (_, sx) = lattice.split_coords(&x);
    let (_, sy) = lattice.split_coords(&y);
    let mut rows = Vec::new();
    for j in 0..sx.len() {
        rows.push(vec![sx[j].clone(), -sy[j].clone()]);
    }
    let m = Mat::from_rows(rows);
    let kern = if sx.is_empty() {
        Mat::identity(2)
    } else {
        m.kernel()
    };
    match kern.rows {
        0 => Ok(AnglesOutcome::NoAlmostGammaRadius { kappa }),
        1 => {
            let c = kern.row(0);
            // Primitive integer representative with positive leading entry.
            let lcm = c
                .iter()
                .fold(BigInt::from(1), |acc, r| num_integer::Integer::lcm(&acc, r.denom()));
            let mut c0 = c[0].numer() * (&lcm / c[0].denom());
            let mut s0 = c[1].numer() * (&lcm / c[1].denom());
            let g = num_integer::Integer::gcd(&c0, &s0);
            if !g.is_zero() {
                c0 /= &g;
                s0 /= &g;
            }
            if c0.is_negative() || (c0.is_zero() && s0.is_negative()) {
                c0 = -c0;
                s0 = -s0;
            }
            let mu = Gq::new(
                Rat::from_integer(c0.clone()),
                -Rat::from_integer(s0.clone()),
            );
            let norm_sq = mu.norm_sq();
            let d_kappa = s.degrees[kappa - 1];
            let mut data = AngleData {
                kappa,
                d_kappa,
                dir_pair: (c0, s0),
                mu,
                norm_sq,
                directions: vec![],
            };
            let base = data.lambda_arg();
            data.directions = (0..data.num_radii())
                .map(|p| {
                    let two_pi = 2.0 * std::f64::consts::PI;
                    (base + p as f64 * std::f64::consts::PI / d_kappa as f64).rem_euclid(two_pi)
                })
                .collect();
            Ok(AnglesOutcome::Radii(data))
        }
        _ => Err(Error::Invalid(
            "two-dimensional angle solution contradicts the choice of kappa".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// The functional H and the coordinate x'
// ---------------------------------------------------------------------------

/// `H` with `Im H = 0` on `Γ_R`, `H = 0` on `F_{κ-1}` and `H(μ v_κ) = |μ|^2`.
///
/// Normalizing against `μ v_κ` instead of the unit vector `λ^{d_κ} v_κ`
/// keeps `H` Gaussian-rational; the two choices differ by the positive
/// real factor `|μ|`, which rescales `x'` and none of the structural
/// outputs.
#[derive(Clone, Debug)]
pub struct HFunctional {
    pub row: CVec,
    /// `μ̄ = H(v_κ)`: the leading coefficient of `H(f)` at `x^{-d_κ}`.
    pub mu_bar: Gq,
}

pub fn h_functional(
    s: &Stratification,
    angles: &AngleData,
    lattice: &Lattice,
) -> Result<HFunctional> {
    let n = s.f_k().ambient;
    let v = &s.vectors[angles.kappa - 1];
    let w: CVec = v.iter().map(|z| z * &angles.mu).collect();
    // Unknowns u in R^{2n}: a_j = u_{2j} + i u_{2j+1}.
    let mut rows: Vec<RVec> = Vec::new();
    let mut rhs: Vec<Rat> = Vec::new();
    for g in lattice.gamma_r.basis_rows() {
        // Im(H(g)) = Σ_j u_{2j} Im(g_j) + u_{2j+1} Re(g_j) = 0
        let gz = crate::linalg::unrealify(&g);
        let mut row = vec![Rat::zero(); 2 * n];
        for j in 0..n {
            row[2 * j] = gz[j].im.clone();
            row[2 * j + 1] = gz[j].re.clone();
        }
        rows.push(row);
        rhs.push(Rat::zero());
    }
    // Re(H(w)) = Σ_j u_{2j} Re(w_j) - u_{2j+1} Im(w_j) = |μ|^2.
    let mut row = vec![Rat::zero(); 2 * n];
    for j in 0..n {
        row[2 * j] = w[j].re.clone();
        row[2 * j + 1] = -w[j].im.clone();
    }
    rows.push(row);
    rhs.push(angles.norm_sq.clone());
    let m = Mat::from_rows(rows);
    let u = m.solve(&rhs).ok_or_else(|| {
        Error::Invalid("no functional separates Γ_R from the leading stratum".into())
    })?;
    let row: CVec = (0..n)
        .map(|j| Gq::new(u[2 * j].clone(), u[2 * j + 1].clone()))
        .collect();
    // H(v_κ) = H(μ v_κ)/μ = |μ|^2/μ = conj(μ).
    let mu_bar = angles.mu.conj();
    Ok(HFunctional { row, mu_bar })
}

// ---------------------------------------------------------------------------
// Per-radius expansion
// ---------------------------------------------------------------------------

/// Outcome of the expansion along one almost-Γ-radius.
#[derive(Clone, Debug)]
pub struct RadiusRecord {
    pub p: usize,
    /// Whether the whole analysis ran over exact scalars.
    pub exact: bool,
    /// `δ_0 > ... > δ_m`.
    pub deltas: Vec<i64>,
    /// Memberships `ϑ_j ∈ Γ_R` in radius order.
    pub gamma_memberships: Vec<Trilean>,
    pub is_gamma_radius: bool,
    /// `ϑ_0..ϑ_m` and the translate `ϑ_{m+1}` (exact path only).
    pub thetas_exact: Option<(Vec<CVec>, CVec)>,
    pub thetas_f64: Vec<Vec<(f64, f64)>>,
    pub theta_const_f64: Vec<(f64, f64)>,
    /// dim `F'_m` (real).
    pub fprime_dim: usize,
    /// `V' = iRϑ_0 + F'_m + ϑ_{m+1}` and its closure, for Γ-radii.
    pub component: Option<ClosedSubgroup>,
    pub sigma_f64: (f64, f64),
}

/// `σ = ω_p λ̃^{-1}`: the only scalar of the expansion that can leave
/// `Q(i)`. `σ^{d_κ} = (-1)^p μ̄` exactly.
enum Sigma {
    Exact(Gq),
    Ball(ComplexBall),
}

fn sigma_for(p: usize, angles: &AngleData, prec: u32) -> Result<(Sigma, (f64, f64))> {
    let d = angles.d_kappa as u32;
    let mu_bar = angles.mu.conj();
    let sign = if p % 2 == 0 { Gq::one() } else { -Gq::one() };
    let tau = &mu_bar * &sign;
    // Float seed: principal root of μ̄ rotated by p π / d.
    let (re, im) = mu_bar.to_f64_pair();
    let r = (re * re + im * im).sqrt().powf(1.0 / d as f64);
    let phi = im.atan2(re) / d as f64 + p as f64 * std::f64::consts::PI / d as f64;
    let seed = (r * phi.cos(), r * phi.sin());
    // Exact root attempt with bounded-height rationalization.
    if let (Some(a), Some(b)) = (
        rationalize_f64(seed.0, crate::DEFAULT_HEIGHT_BOUND),
        rationalize_f64(seed.1, crate::DEFAULT_HEIGHT_BOUND),
    ) {
        let cand = Gq::new(a, b);
        let (cre, cim) = cand.to_f64_pair();
        if ((cre - seed.0).powi(2) + (cim - seed.1).powi(2)).sqrt() < 1e-9
            && cand.powi(d as i64) == tau
        {
            return Ok((Sigma::Exact(cand), seed));
        }
    }
    let ball = nth_root_certified(&tau, d, seed, prec)?;
    Ok((Sigma::Ball(ball), seed))
}

/// `g̃` with `H(f(x)) = μ̄ x^{-d_κ} (1 + g̃(x))`.
fn h_series(f: &LaurentCurve, h: &HFunctional, d_kappa: i64) -> Result<Ser<Gq>> {
    let hf = f.to_vser().apply_functional(&h.row);
    let scaled = hf.shift(d_kappa).scale(&h.mu_bar.recip());
    if scaled.coeff(0) != Gq::one() {
        return Err(Error::Invalid(
            "H(f) does not have the expected leading term".into(),
        ));
    }
    let mut g = scaled;
    g.set(0, Gq::zero());
    if g.low() < 1 && g.low() != i64::MAX / 4 {
        return Err(Error::Invalid("H(f) has unexpected lower-order poles".into()));
    }
    Ok(g)
}

/// Composition `p(u)` for a series `p` supported on exponents >= 0 and `u`
/// of positive valuation.
fn compose<S: Coeff>(p: &Ser<S>, u: &Ser<S>) -> Ser<S> {
    assert!(u.low() >= 1, "composition needs positive valuation");
    let hi = p.terms.keys().max().copied().unwrap_or(-1);
    let mut res: Ser<S> = Ser::zero(i64::MAX / 4);
    for m in (0..=hi).rev() {
        res = res.mul(u);
        let c = p.coeff(m);
        if !c.is_zero_c() {
            res = res.add(&Ser::monomial(0, c, i64::MAX / 4));
        }
    }
    let cap = p.order.saturating_mul(u.low().max(1)).min(i64::MAX / 4);
    res.order = res.order.min(cap).min(u.order);
    res
}

/// Solve `R(r) Q(σ r R(r)) = 1` for the reversion factor `R`, `R(0) = 1`.
fn reversion_factor<S: Coeff>(q: &Ser<S>, sigma: &S) -> Result<Ser<S>> {
    let ord = q.order.max(1);
    let mut r: Ser<S> = Ser::constant(S::one_c(), ord);
    for _ in 0..ord {
        let u = r.shift(1).scale(sigma);
        let qu = compose(q, &u);
        let next = qu.recip()?;
        r = next;
    }
    Ok(r)
}

/// `W(r) = f(σ r R(r))`: the expansion of the flow along the radius.
fn curve_along_radius<S: Coeff>(
    f: &LaurentCurve,
    sigma: &S,
    r_factor: &Ser<S>,
    prec: u32,
) -> Result<VSer<S>> {
    let xr = r_factor.shift(1).scale(sigma);
    let lo = *f.terms.keys().next().expect("curve has terms");
    let hi = *f.terms.keys().last().expect("curve has terms");
    let mut pow = xr.powi(lo)?;
    let mut acc: VSer<S> = VSer::zero(f.dim, f.truncation);
    for e in lo..=hi {
        if let Some(c) = f.terms.get(&e) {
            let cs: Vec<S> = c.iter().map(|q| S::from_gauss_c(q, prec)).collect();
            let mut unit: VSer<S> = VSer::zero(f.dim, i64::MAX / 4);
            unit.set(0, cs);
            acc = acc.add(&unit.mul_ser(&pow));
        }
        if e < hi {
            pow = pow.mul(&xr);
        }
    }
    Ok(acc)
}

/// Real leading-term extraction modulo a growing real span, exact scalars.
struct RealStratExact {
    span: RealSubspaceExact,
}

impl RealStratExact {
    fn new(seed: RealSubspaceExact) -> Self {
        RealStratExact { span: seed }
    }

    /// Residual of `v` modulo the span; `None` when it vanishes.
    fn residual(&mut self, v: &RVec, absorb: bool) -> Result<Option<RVec>> {
        let red = self.span.reduce(v);
        if red.iter().all(|x| x.is_zero()) {
            return Ok(None);
        }
        if absorb {
            let mut rows = self.span.basis_rows();
            rows.push(red.clone());
            self.span = RealSubspaceExact::span(&rows)?;
        }
        Ok(Some(red))
    }
}

/// Expansion along the almost-Γ-radius `p`.
pub fn radius_expand(
    f: &LaurentCurve,
    s: &Stratification,
    angles: &AngleData,
    lattice: &Lattice,
    p: usize,
    prec: u32,
) -> Result<RadiusRecord> {
    match radius_expand_at(f, s, angles, lattice, p, prec) {
        Err(Error::CertificationFailure(_)) => {
            // Escalate once at doubled precision before giving up.
            radius_expand_at(f, s, angles, lattice, p, 2 * prec)
        }
        other => other,
    }
}

fn radius_expand_at(
    f: &LaurentCurve,
    s: &Stratification,
    angles: &AngleData,
    lattice: &Lattice,
    p: usize,
    prec: u32,
) -> Result<RadiusRecord> {
    let h = h_functional(s, angles, lattice)?;
    let g = h_series(f, &h, angles.d_kappa)?;
    let q = Ser::one_plus_pow_neg_inv(&g, angles.d_kappa as u32, prec)?;
    let (sigma, sigma_f64) = sigma_for(p, angles, prec)?;
    match sigma {
        Sigma::Exact(z) => {
            let r = reversion_factor(&q, &z)?;
            let w = curve_along_radius(f, &z, &r, prec)?;
            finish_exact(w, s, angles, lattice, p, sigma_f64)
        }
        Sigma::Ball(z) => {
            let qb: Ser<ComplexBall> = {
                let mut out = Ser::zero(q.order);
                for (e, c) in &q.terms {
                    out.set(*e, ComplexBall::from_gauss(c, prec));
                }
                out
            };
            let r = reversion_factor(&qb, &z)?;
            let w = curve_along_radius(f, &z, &r, prec)?;
            finish_ball(w, s, angles, lattice, p, sigma_f64, prec)
        }
    }
}

fn finish_exact(
    w: VSer<Gq>,
    s: &Stratification,
    angles: &AngleData,
    lattice: &Lattice,
    p: usize,
    sigma_f64: (f64, f64),
) -> Result<RadiusRecord> {
    if w.order < 1 {
        return Err(Error::TruncationInsufficient(
            "radius expansion does not reach the constant term".into(),
        ));
    }
    let seed = realify_subspace(&s.f_l(angles.kappa - 1));
    let mut strat = RealStratExact::new(seed);
    let mut deltas = Vec::new();
    let mut thetas: Vec<CVec> = Vec::new();
    let mut memberships = Vec::new();
    let exps: Vec<i64> = w.terms.range(..0).map(|(e, _)| *e).collect();
    for e in exps {
        let v = w.coeff(e);
        let rv = realify(&v);
        if let Some(res) = strat.residual(&rv, true)? {
            deltas.push(-e);
            let theta = crate::linalg::unrealify(&res);
            memberships.push(if lattice.gamma_r.contains(&res) {
                Trilean::In
            } else {
                Trilean::Out
            });
            thetas.push(theta);
        }
    }
    if deltas.first() != Some(&angles.d_kappa) {
        return Err(Error::Invalid(format!(
            "leading radius exponent {:?} differs from d_kappa {}",
            deltas.first(),
            angles.d_kappa
        )));
    }
    let const_term = w.coeff(0);
    let theta_const = strat.span.reduce(&realify(&const_term));
    let theta_const_c = crate::linalg::unrealify(&theta_const);
    let is_gamma = memberships.iter().all(|t| t.is_in());
    let component = if is_gamma {
        // V' = iRϑ_0 + F'_m + ϑ_{m+1}.
        let mut rows = strat.span.basis_rows();
        rows.push(mul_i_real(&realify(&thetas[0])));
        let dir = RealSubspaceExact::span(&rows)?;
        Some(lattice.subgroup_closure(
            &RealSubspace::Exact(dir),
            &AmbientPoint::Exact(theta_const.clone()),
        )?)
    } else {
        None
    };
    Ok(RadiusRecord {
        p,
        exact: true,
        deltas,
        gamma_memberships: memberships,
        is_gamma_radius: is_gamma,
        thetas_f64: thetas
            .iter()
            .map(|t| t.iter().map(|q| q.to_f64_pair()).collect())
            .collect(),
        theta_const_f64: theta_const_c.iter().map(|q| q.to_f64_pair()).collect(),
        thetas_exact: Some((thetas, theta_const_c)),
        fprime_dim: strat.span.dim(),
        component,
        sigma_f64,
    })
}

fn finish_ball(
    w: VSer<ComplexBall>,
    s: &Stratification,
    angles: &AngleData,
    lattice: &Lattice,
    p: usize,
    sigma_f64: (f64, f64),
    prec: u32,
) -> Result<RadiusRecord> {
    if w.order < 1 {
        return Err(Error::TruncationInsufficient(
            "radius expansion does not reach the constant term".into(),
        ));
    }
    let n2 = 2 * w.dim;
    let mut span = RealSubspaceBall::new(n2, prec);
    for row in realify_subspace(&s.f_l(angles.kappa - 1)).basis_rows() {
        let ball_row: Vec<_> = row
            .iter()
            .map(|r| crate::ball::RealBall::from_rat(r, prec))
            .collect();
        span.try_add_row(&ball_row)?;
    }
    let mut deltas = Vec::new();
    let mut thetas_f64: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut memberships = Vec::new();
    let exps: Vec<i64> = w.terms.range(..0).map(|(e, _)| *e).collect();
    for e in exps {
        let v = w.coeff(e);
        let rv = realify_ball(&v);
        let red = span.reduce(&rv)?;
        if red.iter().any(|b| b.definitely_nonzero()) {
            deltas.push(-e);
            memberships.push(lattice.in_gamma_r_ball_real(&red));
            thetas_f64.push(
                red.chunks(2)
                    .map(|c| (c[0].mid_f64(), c[1].mid_f64()))
                    .collect(),
            );
            // Absorb into the span.
            if span.try_add_row(&red)?.is_none() {
                return Err(Error::CertificationFailure(
                    "pivot lost while growing the radius span".into(),
                ));
            }
        } else if !red
            .iter()
            .all(|b| b.rad_f64() < 2f64.powi(-((prec / 4) as i32)))
        {
            return Err(Error::CertificationFailure(format!(
                "residual at exponent {e} undecidable at precision {prec}"
            )));
        }
    }
    if memberships.iter().any(|t| *t == Trilean::Undecided) {
        return Err(Error::CertificationFailure(
            "Γ_R membership of a radius coefficient is undecided".into(),
        ));
    }
    let const_red = span.reduce(&realify_ball(&w.coeff(0)))?;
    let theta_const_f64: Vec<(f64, f64)> = const_red
        .chunks(2)
        .map(|c| (c[0].mid_f64(), c[1].mid_f64()))
        .collect();
    let is_gamma = memberships.iter().all(|t| t.is_in());
    let component = if is_gamma {
        let mut dir = span.clone();
        // iϑ_0 direction, rebuilt from the leading coefficient.
        let lead = w.coeff(-deltas[0]);
        let ilead: BallVec = lead.iter().map(|b| b.mul_i()).collect();
        let _ = dir.try_add_row(&realify_ball(&ilead))?;
        let base: Vec<f64> = const_red
            .iter()
            .map(|b| b.mid_f64())
            .collect();
        Some(lattice.subgroup_closure(
            &RealSubspace::Certified(dir),
            &AmbientPoint::Approx(base),
        )?)
    } else {
        None
    };
    Ok(RadiusRecord {
        p,
        exact: false,
        deltas,
        gamma_memberships: memberships,
        is_gamma_radius: is_gamma,
        thetas_exact: None,
        thetas_f64,
        theta_const_f64,
        fprime_dim: span.dim(),
        component,
        sigma_f64,
    })
}

// ---------------------------------------------------------------------------
// Limit sets
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum LimitSet {
    /// (H0) fails: the map extends and the limit is one point.
    SinglePoint(TorusPoint),
    /// No almost-Γ-radius, or no Γ-radius.
    Empty { reason: String },
    /// Compact case: closure of `π(V)`.
    Compact(ClosedSubgroup),
    /// One closed subgroup per Γ-radius, deduplicated by set equality.
    Components {
        components: Vec<(Vec<usize>, ClosedSubgroup)>,
        records: Vec<RadiusRecord>,
    },
}

pub struct LimitSetReport {
    pub stratification: Option<Stratification>,
    pub angles: Option<AngleData>,
    pub outcome: LimitSet,
}

pub fn limit_set(f: &LaurentCurve, lattice: &Lattice, prec: u32) -> Result<LimitSetReport> {
    if f.dim != lattice.ambient {
        return Err(Error::DimensionMismatch(
            "curve and lattice dimensions differ".into(),
        ));
    }
    let s = match stratify(f) {
        Err(Error::NoPoles) => {
            let point = lattice.reduce(&f.coeff(0))?;
            return Ok(LimitSetReport {
                stratification: None,
                angles: None,
                outcome: LimitSet::SinglePoint(point),
            });
        }
        other => other?,
    };
    if classify_compactness(&s, lattice) == Compactness::Compact {
        let h = limit_set_compact(&s, lattice)?;
        return Ok(LimitSetReport {
            stratification: Some(s),
            angles: None,
            outcome: LimitSet::Compact(h),
        });
    }
    let angles = match kappa_and_angles(&s, lattice)? {
        AnglesOutcome::NoAlmostGammaRadius { kappa } => {
            return Ok(LimitSetReport {
                stratification: Some(s),
                angles: None,
                outcome: LimitSet::Empty {
                    reason: format!(
                        "no almost-Γ-radius: stratum {kappa} stays outside Γ_R in every direction"
                    ),
                },
            });
        }
        AnglesOutcome::Radii(a) => a,
    };
    let mut records = Vec::new();
    for p in 0..angles.num_radii() {
        records.push(radius_expand(f, &s, &angles, lattice, p, prec)?);
    }
    let mut components: Vec<(Vec<usize>, ClosedSubgroup)> = Vec::new();
    for rec in &records {
        if let Some(h) = &rec.component {
            match components
                .iter_mut()
                .find(|(_, existing)| existing.same_set(h, lattice))
            {
                Some((ps, _)) => ps.push(rec.p),
                None => components.push((vec![rec.p], h.clone())),
            }
        }
    }
    if components.is_empty() {
        return Ok(LimitSetReport {
            stratification: Some(s),
            angles: Some(angles),
            outcome: LimitSet::Empty {
                reason: "no Γ-radius among the almost-Γ-radii".into(),
            },
        });
    }
    Ok(LimitSetReport {
        stratification: Some(s),
        angles: Some(angles),
        outcome: LimitSet::Components {
            components,
            records,
        },
    })
}

// ---------------------------------------------------------------------------
// ALW hull
// ---------------------------------------------------------------------------

/// Smallest sub-semi-torus whose group contains `π(F)`: iterate complex
/// closure and lattice saturation until the direction stabilizes.
pub fn alw_hull(f_sub: &ComplexSubspace, lattice: &Lattice) -> Result<ClosedSubgroup> {
    let mut s = realify_subspace(f_sub);
    for _ in 0..=2 * lattice.ambient {
        let complex = s.sum(&s.mul_i()?)?;
        let inter = complex.intersect(&lattice.gamma_r)?;
        let sat = lattice.saturate_sub(&inter)?;
        let next = complex.sum(&sat)?;
        if next.dim() == s.dim() {
            return lattice.subgroup_closure(
                &RealSubspace::Exact(next),
                &AmbientPoint::zero(lattice.real_dim()),
            );
        }
        s = next;
    }
    Err(Error::Invalid("ALW hull iteration failed to stabilize".into()))
}

/// Certified variant for ball directions.
pub fn alw_hull_ball(rows: Vec<BallVec>, lattice: &Lattice, prec: u32) -> Result<ClosedSubgroup> {
    let mut sub = RealSubspaceBall::new(lattice.real_dim(), prec);
    for row in rows {
        let real = realify_ball(&row);
        let _ = sub.try_add_row(&real)?;
        let irow: BallVec = row.iter().map(|b| b.mul_i()).collect();
        let _ = sub.try_add_row(&realify_ball(&irow))?;
    }
    let mut current = sub;
    for _ in 0..=2 * lattice.ambient {
        let h = lattice.subgroup_closure(
            &RealSubspace::Certified(current.clone()),
            &AmbientPoint::zero(lattice.real_dim()),
        )?;
        let RealSubspace::Certified(mut next) = h.direction.clone() else {
            unreachable!("certified closure keeps certified mode");
        };
        // Close under multiplication by i.
        let mut grew = false;
        let rows: Vec<_> = next.rows.clone();
        for r in rows {
            let ir: Vec<crate::ball::RealBall> = mul_i_ball(&r);
            if next.try_add_row(&ir)?.is_some() {
                grew = true;
            }
        }
        if !grew && next.dim() == current.dim() {
            return lattice.subgroup_closure(
                &RealSubspace::Certified(next),
                &AmbientPoint::zero(lattice.real_dim()),
            );
        }
        current = next;
    }
    Err(Error::Invalid("ALW hull iteration failed to stabilize".into()))
}

fn mul_i_ball(v: &[crate::ball::RealBall]) -> Vec<crate::ball::RealBall> {
    let mut out = Vec::with_capacity(v.len());
    for c in v.chunks(2) {
        out.push(c[1].neg());
        out.push(c[0].clone());
    }
    out
}

/// Sector `Ω_{A,p}` around the radius `L'_p`.
#[derive(Clone, Copy, Debug)]
pub struct SectorSpec {
    pub a: f64,
    pub p: usize,
    pub d_kappa: i64,
}

impl SectorSpec {
    /// Decode `x' = r e^{i(θ + pπ)/d_κ}` and test `|sin θ| < A r^{d_κ}`
    /// with `|θ| <= π/2`.
    pub fn contains(&self, xprime: (f64, f64)) -> bool {
        let r = (xprime.0 * xprime.0 + xprime.1 * xprime.1).sqrt();
        if r <= 0.0 {
            return false;
        }
        let psi = xprime.1.atan2(xprime.0);
        let mut theta = self.d_kappa as f64 * psi - self.p as f64 * std::f64::consts::PI;
        let two_pi = 2.0 * std::f64::consts::PI;
        theta = theta.rem_euclid(two_pi);
        if theta > std::f64::consts::PI {
            theta -= two_pi;
        }
        if theta.abs() > std::f64::consts::FRAC_PI_2 {
            return false;
        }
        theta.sin().abs() < self.a * r.powi(self.d_kappa as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};
    use crate::linalg::cvec;

    fn curve(dim: usize, terms: Vec<(i64, CVec)>, t: i64) -> LaurentCurve {
        LaurentCurve::new(dim, terms, t).unwrap()
    }

    fn model_curve() -> LaurentCurve {
        // f(x) = (x^{-2}, x^{-1})
        curve(
            2,
            vec![(-2, cvec(&[(1, 0), (0, 0)])), (-1, cvec(&[(0, 0), (1, 0)]))],
            1,
        )
    }

    fn mixed_lattice() -> Lattice {
        // Γ = Z x (Z + iZ)
        Lattice::new(
            2,
            vec![
                cvec(&[(1, 0), (0, 0)]),
                cvec(&[(0, 0), (1, 0)]),
                cvec(&[(0, 0), (0, 1)]),
            ],
        )
        .unwrap()
    }

    fn full_lattice_c2() -> Lattice {
        // Γ = Z^2 + iZ^2
        Lattice::new(
            2,
            vec![
                cvec(&[(1, 0), (0, 0)]),
                cvec(&[(0, 1), (0, 0)]),
                cvec(&[(0, 0), (1, 0)]),
                cvec(&[(0, 0), (0, 1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn stratify_two_pole_example() {
        let s = stratify(&model_curve()).unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.degrees, vec![2, 1]);
        assert_eq!(s.vectors[0], cvec(&[(1, 0), (0, 0)]));
        assert_eq!(s.vectors[1], cvec(&[(0, 0), (1, 0)]));
        assert!(s.v_last.iter().all(|c| c.is_zero()));
        assert_eq!(s.f_k().dim(), 2);
    }

    #[test]
    fn stratify_single_pole_with_translate() {
        // f = x^{-1}(1,0) + (0,5)
        let f = curve(
            2,
            vec![(-1, cvec(&[(1, 0), (0, 0)])), (0, cvec(&[(0, 0), (5, 0)]))],
            1,
        );
        let s = stratify(&f).unwrap();
        assert_eq!(s.k, 1);
        assert_eq!(s.degrees, vec![1]);
        assert_eq!(s.v_last, cvec(&[(0, 0), (5, 0)]));
    }

    #[test]
    fn stratify_nested_strata() {
        // f = x^{-2}(1,1) + x^{-1}(1,-1): v_2 = (1,-1) mod C(1,1).
        let f = curve(
            2,
            vec![(-2, cvec(&[(1, 0), (1, 0)])), (-1, cvec(&[(1, 0), (-1, 0)]))],
            1,
        );
        let s = stratify(&f).unwrap();
        assert_eq!(s.k, 2);
        assert_eq!(s.degrees, vec![2, 1]);
        // v_2 is congruent to (1,-1) modulo F_1.
        let diff: CVec = s.vectors[1]
            .iter()
            .zip(&cvec(&[(1, 0), (-1, 0)]))
            .map(|(a, b)| a - b)
            .collect();
        assert!(s.f_l(1).contains(&diff));
        assert_eq!(s.f_k().dim(), 2);
    }

    #[test]
    fn stratify_no_poles_and_truncation_guard() {
        let f = curve(1, vec![(0, cvec(&[(3, 0)]))], 2);
        assert!(matches!(stratify(&f), Err(Error::NoPoles)));
        let g = LaurentCurve::new(1, vec![(-1, cvec(&[(1, 0)]))], 0).unwrap();
        assert!(matches!(
            stratify(&g),
            Err(Error::TruncationInsufficient(_))
        ));
    }

    #[test]
    fn stratify_reconstruction_and_uniqueness() {
        // Reconstructing Σ x^{-d_l} v_l + v_{k+1} reproduces the principal
        // part, and perturbing v_2 by an element of F_1 changes nothing.
        let f = curve(
            2,
            vec![(-3, cvec(&[(2, 1), (0, 0)])), (-1, cvec(&[(1, 0), (4, 2)]))],
            1,
        );
        let s = stratify(&f).unwrap();
        let mut rebuilt: BTreeMap<i64, CVec> = BTreeMap::new();
        for (d, v) in s.degrees.iter().zip(&s.vectors) {
            rebuilt.insert(-d, v.clone());
        }
        for (e, c) in f.terms.range(..0) {
            // principal part must agree modulo earlier strata
            let got = rebuilt.get(e).cloned().unwrap();
            let idx = s.degrees.iter().position(|d| -d == *e).unwrap();
            let diff: CVec = got.iter().zip(c).map(|(a, b)| a - b).collect();
            assert!(s.f_l(idx).contains(&diff));
        }
        // Perturb the x^{-1} coefficient by v_1: same chain.
        let mut terms2 = f.terms.clone();
        let perturbed: CVec = terms2[&-1]
            .iter()
            .zip(&s.vectors[0])
            .map(|(a, b)| a + b)
            .collect();
        terms2.insert(-1, perturbed);
        let f2 = LaurentCurve {
            dim: 2,
            terms: terms2,
            truncation: 1,
        };
        let s2 = stratify(&f2).unwrap();
        assert_eq!(s.degrees, s2.degrees);
        for (a, b) in s.chain.iter().zip(&s2.chain) {
            assert!(a == b, "flag chain must be invariant");
        }
    }

    #[test]
    fn classify_examples() {
        // f = x^{-1} on C/(Z+iZ): compact.
        let l1 = Lattice::new(1, vec![vec![Gq::one()], vec![Gq::i()]]).unwrap();
        let f1 = curve(1, vec![(-1, cvec(&[(1, 0)]))], 1);
        let s1 = stratify(&f1).unwrap();
        assert_eq!(classify_compactness(&s1, &l1), Compactness::Compact);
        // Two-pole model example: non-compact.
        let s2 = stratify(&model_curve()).unwrap();
        assert_eq!(
            classify_compactness(&s2, &mixed_lattice()),
            Compactness::NonCompact
        );
        // f = x^{-1}(1,0) in C^2 with full lattice: compact.
        let f3 = curve(2, vec![(-1, cvec(&[(1, 0), (0, 0)]))], 1);
        let s3 = stratify(&f3).unwrap();
        assert_eq!(
            classify_compactness(&s3, &full_lattice_c2()),
            Compactness::Compact
        );
    }

    #[test]
    fn limit_set_compact_examples() {
        let l1 = Lattice::new(1, vec![vec![Gq::one()], vec![Gq::i()]]).unwrap();
        let f1 = curve(1, vec![(-1, cvec(&[(1, 0)]))], 1);
        let h1 = limit_set_compact(&stratify(&f1).unwrap(), &l1).unwrap();
        assert_eq!(h1.dim(), 2);
        assert!(h1.is_compact_set());
        // Translated subtorus π(C x {0}) + (0, c) with c = 1/3 + i/2.
        let f2 = curve(
            2,
            vec![
                (-1, cvec(&[(1, 0), (0, 0)])),
                (0, vec![Gq::zero(), Gq::from_pair((1, 3), (1, 2))]),
            ],
            1,
        );
        let h2 = limit_set_compact(&stratify(&f2).unwrap(), &full_lattice_c2()).unwrap();
        assert_eq!(h2.dim(), 2);
        assert!(h2.is_compact_set());
        let base = h2.base_f64();
        assert_eq!(base.compact[0], 0.0);
        assert_eq!(base.compact[1], 0.0);
        assert!((base.compact[2] - 1.0 / 3.0).abs() < 1e-12);
        assert!((base.compact[3] - 0.5).abs() < 1e-12);
        // Full torus from nested strata.
        let f3 = curve(
            2,
            vec![(-2, cvec(&[(1, 0), (1, 0)])), (-1, cvec(&[(1, 0), (-1, 0)]))],
            1,
        );
        let h3 = limit_set_compact(&stratify(&f3).unwrap(), &full_lattice_c2()).unwrap();
        assert_eq!(h3.dim(), 4);
    }

    #[test]
    fn kappa_two_pole_example() {
        let s = stratify(&model_curve()).unwrap();
        let out = kappa_and_angles(&s, &mixed_lattice()).unwrap();
        let AnglesOutcome::Radii(a) = out else {
            panic!("expected radii");
        };
        assert_eq!(a.kappa, 1);
        assert_eq!(a.d_kappa, 2);
        assert_eq!(a.mu, Gq::one());
        assert_eq!(a.num_radii(), 4);
        let expected = [0.0, 1.0, 2.0, 3.0].map(|p| p * std::f64::consts::FRAC_PI_2);
        for (got, want) in a.directions.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_no_almost_gamma_radius() {
        // E = C^2, Γ = Z(1,0), f = x^{-1}(0,1).
        let l = Lattice::new(2, vec![cvec(&[(1, 0), (0, 0)])]).unwrap();
        let f = curve(2, vec![(-1, cvec(&[(0, 0), (1, 0)]))], 1);
        let s = stratify(&f).unwrap();
        assert!(matches!(
            kappa_and_angles(&s, &l).unwrap(),
            AnglesOutcome::NoAlmostGammaRadius { kappa: 1 }
        ));
    }

    #[test]
    fn kappa_two_directions() {
        // f = x^{-1}(1,1), Γ = Z x (Z+iZ): κ=1, directions {0, π}.
        let f = curve(2, vec![(-1, cvec(&[(1, 0), (1, 0)]))], 1);
        let s = stratify(&f).unwrap();
        let AnglesOutcome::Radii(a) = kappa_and_angles(&s, &mixed_lattice()).unwrap() else {
            panic!()
        };
        assert_eq!(a.kappa, 1);
        assert_eq!(a.d_kappa, 1);
        assert_eq!(a.num_radii(), 2);
        assert!((a.directions[0] - 0.0).abs() < 1e-12);
        assert!((a.directions[1] - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn radius_expand_two_pole_example() {
        let f = model_curve();
        let l = mixed_lattice();
        let s = stratify(&f).unwrap();
        let AnglesOutcome::Radii(a) = kappa_and_angles(&s, &l).unwrap() else {
            panic!()
        };
        for p in 0..4 {
            let rec = radius_expand(&f, &s, &a, &l, p, 128).unwrap();
            assert!(rec.exact, "model example runs on the exact path");
            assert_eq!(rec.deltas, vec![2, 1], "p={p}");
            assert!(rec.is_gamma_radius, "p={p}");
            let (thetas, tconst) = rec.thetas_exact.as_ref().unwrap();
            // ϑ_0 = ±(1,0), ϑ_1 = ±(0,1) or ±(0,i) depending on parity.
            let t0 = &thetas[0];
            assert!(t0[1].is_zero());
            assert_eq!(t0[0].norm_sq(), rat_int(1));
            let t1 = &thetas[1];
            assert!(t1[0].is_zero());
            assert_eq!(t1[1].norm_sq(), rat_int(1));
            if p % 2 == 0 {
                assert!(t1[1].im.is_zero(), "p even: second stratum real");
            } else {
                assert!(t1[1].re.is_zero(), "p odd: second stratum imaginary");
            }
            assert!(tconst.iter().all(|c| c.is_zero()));
            let comp = rec.component.as_ref().unwrap();
            assert_eq!(comp.dim(), 3);
            assert_eq!(comp.compact_dir.dim(), 2);
        }
    }

    #[test]
    fn radius_expand_non_gamma_radius() {
        // f = (x^{-2}, i x^{-1}), Γ = Z^2 ⊂ C^2: ϑ_1 = (0,i) is outside Γ_R.
        let l = Lattice::new(2, vec![cvec(&[(1, 0), (0, 0)]), cvec(&[(0, 0), (1, 0)])]).unwrap();
        let f = curve(
            2,
            vec![(-2, cvec(&[(1, 0), (0, 0)])), (-1, cvec(&[(0, 0), (0, 1)]))],
            1,
        );
        let s = stratify(&f).unwrap();
        let AnglesOutcome::Radii(a) = kappa_and_angles(&s, &l).unwrap() else {
            panic!()
        };
        let rec = radius_expand(&f, &s, &a, &l, 0, 128).unwrap();
        assert_eq!(rec.deltas, vec![2, 1]);
        assert_eq!(rec.gamma_memberships[0], Trilean::In);
        assert_eq!(rec.gamma_memberships[1], Trilean::Out);
        assert!(!rec.is_gamma_radius);
    }

    #[test]
    fn limit_set_two_pole_example_two_semitori() {
        let report = limit_set(&model_curve(), &mixed_lattice(), 128).unwrap();
        let LimitSet::Components { components, .. } = &report.outcome else {
            panic!("expected components");
        };
        assert_eq!(components.len(), 2, "two distinct semi-tori");
        let radii: Vec<Vec<usize>> = components.iter().map(|(p, _)| p.clone()).collect();
        assert!(radii.contains(&vec![0, 2]));
        assert!(radii.contains(&vec![1, 3]));
        for (_, h) in components {
            assert_eq!(h.dim(), 3);
            assert_eq!(h.compact_dir.dim(), 2);
            assert!(!h.is_compact_set());
        }
    }

    #[test]
    fn limit_set_empty_and_full() {
        let l = Lattice::new(2, vec![cvec(&[(1, 0), (0, 0)])]).unwrap();
        let f = curve(2, vec![(-1, cvec(&[(0, 0), (1, 0)]))], 1);
        let report = limit_set(&f, &l, 128).unwrap();
        assert!(matches!(report.outcome, LimitSet::Empty { .. }));
        let l1 = Lattice::new(1, vec![vec![Gq::one()], vec![Gq::i()]]).unwrap();
        let f1 = curve(1, vec![(-1, cvec(&[(1, 0)]))], 1);
        let report = limit_set(&f1, &l1, 128).unwrap();
        let LimitSet::Compact(h) = report.outcome else {
            panic!()
        };
        assert_eq!(h.dim(), 2);
        // Pole-free curve: single point.
        let f0 = curve(1, vec![(0, cvec(&[(7, 3)]))], 1);
        let report = limit_set(&f0, &l1, 128).unwrap();
        assert!(matches!(report.outcome, LimitSet::SinglePoint(_)));
    }

    #[test]
    fn alw_hull_examples() {
        let l1 = Lattice::new(1, vec![vec![Gq::one()], vec![Gq::i()]]).unwrap();
        let h = alw_hull(&ComplexSubspace::full(1), &l1).unwrap();
        assert_eq!(h.dim(), 2);
        let l2 = full_lattice_c2();
        let f = ComplexSubspace::span(&[cvec(&[(1, 0), (0, 0)])]).unwrap();
        let h = alw_hull(&f, &l2).unwrap();
        assert_eq!(h.dim(), 2);
        assert!(h.is_compact_set());
        // Ball case: C(1, sqrt2) saturates to the full torus.
        let prec = 192;
        let s2 = crate::ball::sqrt_rat(&rat(2, 1), prec).unwrap();
        let row: BallVec = vec![
            ComplexBall::from_gauss(&Gq::one(), prec),
            ComplexBall::new(s2.mid, crate::ball::Dyadic::zero(), s2.rad, prec),
        ];
        let h = alw_hull_ball(vec![row], &l2, prec).unwrap();
        assert_eq!(h.compact_dir.dim(), 4, "hull is the full torus");
    }

    #[test]
    fn sector_membership_examples() {
        let spec = SectorSpec {
            a: 1.0,
            p: 0,
            d_kappa: 2,
        };
        // θ = 0.008: |sin θ| ≈ 0.008 < 0.01.
        let x = (0.1 * (0.004f64).cos(), 0.1 * (0.004f64).sin());
        assert!(spec.contains(x));
        // On the radius: θ = 0.
        assert!(spec.contains((0.05, 0.0)));
        // θ = 0.02: |sin θ| ≈ 0.02 >= 0.01.
        let x = (0.1 * (0.01f64).cos(), 0.1 * (0.01f64).sin());
        assert!(!spec.contains(x));
    }

    #[test]
    fn fprime_complexifies_to_fk() {
        // F'_m + i F'_m = F_k along every radius of the worked example.
        let f = model_curve();
        let l = mixed_lattice();
        let s = stratify(&f).unwrap();
        let AnglesOutcome::Radii(a) = kappa_and_angles(&s, &l).unwrap() else {
            panic!()
        };
        for p in 0..4 {
            let rec = radius_expand(&f, &s, &a, &l, p, 128).unwrap();
            // Rebuild F'_m from the exact thetas.
            let (thetas, _) = rec.thetas_exact.as_ref().unwrap();
            let mut rows = crate::linalg::realify_subspace(&s.f_l(a.kappa - 1)).basis_rows();
            for t in thetas {
                rows.push(crate::linalg::realify(t));
            }
            let fprime = crate::linalg::RealSubspaceExact::span(&rows).unwrap();
            let complexified = crate::linalg::complexify(&fprime).unwrap();
            assert!(&complexified == s.f_k(), "p={p}");
        }
    }

    #[test]
    fn limit_components_attract_radius_samples() {
        // Points f(x) for x sliding down a Γ-radius approach the returned
        // component of the limit set.
        let f = model_curve();
        let l = mixed_lattice();
        let report = limit_set(&f, &l, 128).unwrap();
        let LimitSet::Components { components, .. } = &report.outcome else {
            panic!()
        };
        let angles = report.angles.as_ref().unwrap();
        for (radii, h) in components {
            let proj = crate::lattice::SubgroupProjector::new(&l, h);
            for &p in radii {
                let theta = angles.directions[p];
                for k in 6..=10 {
                    let r = 2f64.powi(-k);
                    let x = (r * theta.cos(), r * theta.sin());
                    let val = f.eval_f64(x);
                    let mut ambient = Vec::new();
                    for z in &val {
                        ambient.push(z.0);
                        ambient.push(z.1);
                    }
                    let pt = l.reduce_f64(&ambient);
                    let d = proj.distance(&l, &pt);
                    // Approach rate is O(r) for this curve.
                    assert!(d <= 8.0 * r, "p={p} r={r}: distance {d}");
                }
            }
        }
    }

    #[test]
    fn vprime_inside_v() {
        // V' directions inside realify(F_k), translate matching v_{k+1}.
        let f = model_curve();
        let l = mixed_lattice();
        let s = stratify(&f).unwrap();
        let AnglesOutcome::Radii(a) = kappa_and_angles(&s, &l).unwrap() else {
            panic!()
        };
        let fk_real = realify_subspace(s.f_k());
        for p in 0..4 {
            let rec = radius_expand(&f, &s, &a, &l, p, 128).unwrap();
            let comp = rec.component.unwrap();
            let dir = comp.direction.as_exact().unwrap();
            for row in dir.basis_rows() {
                assert!(fk_real.contains(&row), "V' ⊂ V at p={p}");
            }
            let (_, tconst) = rec.thetas_exact.unwrap();
            let diff: CVec = tconst.iter().zip(&s.v_last).map(|(x, y)| x - y).collect();
            assert!(s.f_k().contains(&diff), "translates agree modulo F_k");
        }
    }
}
