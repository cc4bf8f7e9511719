//! The discrete subgroup `Γ`, the quotient group `T = E/Γ`, and closures of
//! subspace images.
//!
//! A lattice is given by `r <= 2n` exact generators whose realifications are
//! linearly independent over `Q`; for rational data this is equivalent to
//! independence over `R` and certifies discreteness and rank. The fixed
//! complement of `Γ_R` is the rational coordinate subspace on the non-pivot
//! columns of the echelonized generator matrix, which makes the split
//! coordinates of a point unique and reproducible.

use num_traits::{ToPrimitive, Zero};

use crate::ball::RealBall;
use crate::exact::Rat;
use crate::linalg::{
    self, rat_to_f64, realify, rational_saturation_frame, rvec_to_f64, BallVec, CVec, RVec,
    RealSubspace, RealSubspaceBall, RealSubspaceExact,
};
use crate::mat::Mat;
use crate::{Error, Result, Trilean, DEFAULT_HEIGHT_BOUND};

#[derive(Clone)]
pub struct Lattice {
    /// Complex dimension `n` of the ambient space.
    pub ambient: usize,
    pub generators: Vec<CVec>,
    /// Real span `Γ_R` of the realified generators.
    pub gamma_r: RealSubspaceExact,
    split_inv: Mat<Rat>,
    split_inv_f64: Vec<f64>,
    complement_cols: Vec<usize>,
    gens_real: Vec<RVec>,
    gens_real_f64: Vec<Vec<f64>>,
    shell: Vec<Vec<i32>>,
}

impl Lattice {
    pub fn new(ambient: usize, generators: Vec<CVec>) -> Result<Self> {
        let r = generators.len();
        let m = 2 * ambient;
        if r > m {
            return Err(Error::Invalid(format!("lattice rank {r} exceeds 2n = {m}")));
        }
        for g in &generators {
            if g.len() != ambient {
                return Err(Error::DimensionMismatch(
                    "lattice generator of wrong dimension".into(),
                ));
            }
        }
        let gens_real: Vec<RVec> = generators.iter().map(|g| realify(g)).collect();
        let gamma_r = RealSubspaceExact::span(&gens_real)?;
        if gamma_r.dim() != r {
            return Err(Error::Invalid(
                "lattice generators are dependent over Q; rank is not certified".into(),
            ));
        }
        let mut ech = Mat::from_rows(gens_real.clone());
        let pivots = ech.rref();
        let complement_cols: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
        let mut split = Mat::zero(m, m);
        for (j, g) in gens_real.iter().enumerate() {
            for i in 0..m {
                split[(i, j)] = g[i].clone();
            }
        }
        for (j, &c) in complement_cols.iter().enumerate() {
            split[(c, r + j)] = Rat::from_integer(1.into());
        }
        let split_inv = split
            .inverse()
            .ok_or_else(|| Error::Invalid("generator/complement matrix is singular".into()))?;
        let split_inv_f64 = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| rat_to_f64(&split_inv[(i, j)]))
            .collect();
        let gens_real_f64 = gens_real.iter().map(|g| rvec_to_f64(g)).collect();
        Ok(Lattice {
            ambient,
            generators,
            gamma_r,
            split_inv,
            split_inv_f64,
            complement_cols,
            gens_real,
            gens_real_f64,
            shell: shell_vectors(r),
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn real_dim(&self) -> usize {
        2 * self.ambient
    }

    /// `T` is compact iff the lattice has full rank `2n`.
    pub fn is_compact(&self) -> bool {
        self.rank() == 2 * self.ambient
    }

    pub fn gens_real(&self) -> &[RVec] {
        &self.gens_real
    }

    /// Split coordinates `(t, s)` of a realified point: `x = G t + C s`.
    pub fn split_coords(&self, x: &[Rat]) -> (RVec, RVec) {
        let mut c = self.split_inv.mul_vec(x);
        let s = c.split_off(self.rank());
        (c, s)
    }

    pub fn split_coords_f64(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.real_dim();
        debug_assert_eq!(x.len(), m);
        let mut c = vec![0.0; m];
        for (i, ci) in c.iter_mut().enumerate() {
            let row = &self.split_inv_f64[i * m..(i + 1) * m];
            *ci = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        let s = c.split_off(self.rank());
        (c, s)
    }

    /// Frame coordinates of a vector that must lie in `Γ_R`.
    pub fn frame_coords(&self, x: &[Rat]) -> Result<RVec> {
        let (t, s) = self.split_coords(x);
        if s.iter().any(|v| !v.is_zero()) {
            return Err(Error::Invalid("vector is not in Γ_R".into()));
        }
        Ok(t)
    }

    pub fn split_coords_ball(&self, x: &[RealBall]) -> (Vec<RealBall>, Vec<RealBall>) {
        let m = self.real_dim();
        let prec = x.iter().map(|b| b.prec).max().unwrap_or(crate::DEFAULT_PREC);
        let mut c: Vec<RealBall> = Vec::with_capacity(m);
        for i in 0..m {
            let mut acc = RealBall::zero(prec);
            for j in 0..m {
                if self.split_inv[(i, j)].is_zero() {
                    continue;
                }
                acc = acc.add(&x[j].mul_rat(&self.split_inv[(i, j)]));
            }
            c.push(acc);
        }
        let s = c.split_off(self.rank());
        (c, s)
    }

    /// Reduce a point of `E` modulo `Γ`.
    pub fn reduce(&self, p: &CVec) -> Result<TorusPoint> {
        if p.len() != self.ambient {
            return Err(Error::DimensionMismatch("reduce: wrong dimension".into()));
        }
        self.reduce_real(&realify(p))
    }

    pub fn reduce_real(&self, x: &[Rat]) -> Result<TorusPoint> {
        if x.len() != self.real_dim() {
            return Err(Error::DimensionMismatch("reduce: wrong dimension".into()));
        }
        let (t, s) = self.split_coords(x);
        Ok(TorusPoint {
            compact: t.iter().map(frac).collect(),
            transverse: s,
        })
    }

    pub fn reduce_f64(&self, x: &[f64]) -> TorusPointF {
        let (t, s) = self.split_coords_f64(x);
        TorusPointF {
            compact: t.into_iter().map(frac_f64).collect(),
            transverse: s,
        }
    }

    /// Three-valued membership of a vector in `Γ_R`.
    pub fn in_gamma_r(&self, v: &CVec) -> Trilean {
        if self.gamma_r.contains(&realify(v)) {
            Trilean::In
        } else {
            Trilean::Out
        }
    }

    pub fn in_gamma_r_ball(&self, v: &BallVec) -> Trilean {
        self.in_gamma_r_ball_real(&linalg::realify_ball(v))
    }

    pub fn in_gamma_r_ball_real(&self, x: &[RealBall]) -> Trilean {
        let (_, s) = self.split_coords_ball(x);
        if s.iter().any(|b| b.definitely_nonzero()) {
            return Trilean::Out;
        }
        let prec = x.iter().map(|b| b.prec).max().unwrap_or(crate::DEFAULT_PREC);
        if s.iter().all(|b| plausibly_zero(b, prec)) {
            Trilean::In
        } else {
            Trilean::Undecided
        }
    }

    /// Saturation of an exact subspace of `Γ_R`: rational inputs are their
    /// own saturation, so this mostly validates frame-rationality.
    pub fn saturate_sub(&self, sub: &RealSubspaceExact) -> Result<RealSubspaceExact> {
        let mut frame_rows = Vec::new();
        for row in sub.basis_rows() {
            frame_rows.push(self.frame_coords(&row)?);
        }
        let sat = rational_saturation_frame(self.rank(), &frame_rows, &[], DEFAULT_HEIGHT_BOUND)?;
        self.frame_to_std(&sat)
    }

    fn frame_to_std(&self, frame_sub: &RealSubspaceExact) -> Result<RealSubspaceExact> {
        let rows: Vec<RVec> = frame_sub
            .basis_rows()
            .iter()
            .map(|c| self.frame_to_ambient(c))
            .collect();
        RealSubspaceExact::span(&rows)
    }

    pub fn frame_to_ambient(&self, c: &[Rat]) -> RVec {
        let mut x = vec![Rat::zero(); self.real_dim()];
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for i in 0..self.real_dim() {
                x[i] += cj * &self.gens_real[j][i];
            }
        }
        x
    }

    /// Closure of `π(base + F)` as a translated closed connected subgroup:
    /// iterate `S <- S + sat_Γ(S ∩ Γ_R)` to its fixed point.
    pub fn subgroup_closure(&self, f: &RealSubspace, base: &AmbientPoint) -> Result<ClosedSubgroup> {
        let (direction, compact_dir) = match f {
            RealSubspace::Exact(s) => {
                let mut s = s.clone();
                loop {
                    let inter = s.intersect(&self.gamma_r)?;
                    let sat = self.saturate_sub(&inter)?;
                    let next = s.sum(&sat)?;
                    if next.dim() == s.dim() {
                        break (RealSubspace::Exact(next), sat);
                    }
                    s = next;
                }
            }
            RealSubspace::Certified(s) => self.closure_certified(s)?,
        };
        let base = self.normalize_base(base, &direction, &compact_dir);
        Ok(ClosedSubgroup {
            n: self.ambient,
            direction,
            compact_dir,
            base,
        })
    }

    /// Certified branch: find the plausible intersection with `Γ_R` by ball
    /// elimination on the transverse parts, then saturate it through
    /// integer relations.
    fn closure_certified(
        &self,
        s: &RealSubspaceBall,
    ) -> Result<(RealSubspace, RealSubspaceExact)> {
        let prec = s.prec;
        let tr_len = self.real_dim() - self.rank();
        // Eliminate on transverse coordinates; rows whose transverse part
        // vanishes (plausibly) span the intersection with Γ_R.
        let mut elim = RealSubspaceBall::new(tr_len + self.rank(), prec);
        let mut inter_frame: Vec<Vec<RealBall>> = Vec::new();
        for row in &s.rows {
            let (t, tr) = self.split_coords_ball(row);
            let mut joint = tr.clone();
            joint.extend(t.clone());
            let reduced = elim.reduce(&joint)?;
            let (tr_res, t_res) = reduced.split_at(tr_len);
            if tr_res.iter().any(|b| b.definitely_nonzero()) {
                // Genuinely transverse direction; keep for elimination.
                let mut best: Option<(usize, f64)> = None;
                for (j, x) in tr_res.iter().enumerate() {
                    if x.definitely_nonzero() {
                        let lo = x.mid_f64().abs() - x.rad_f64();
                        if best.is_none_or(|(_, b)| lo > b) {
                            best = Some((j, lo));
                        }
                    }
                }
                elim.rows.push(reduced.clone());
                elim.pivots.push(best.unwrap().0);
            } else if tr_res.iter().all(|b| plausibly_zero(b, prec)) {
                inter_frame.push(t_res.to_vec());
            } else {
                return Err(Error::CertificationFailure(
                    "subspace ∩ Γ_R undecidable at working precision".into(),
                ));
            }
        }
        let sat_frame =
            rational_saturation_frame(self.rank(), &[], &inter_frame, DEFAULT_HEIGHT_BOUND)?;
        let sat_std = self.frame_to_std(&sat_frame)?;
        // Direction: saturated compact part plus the original rows.
        let mut dir = RealSubspaceBall::new(s.ambient, prec);
        for row in sat_std.basis_rows() {
            let ball_row: Vec<RealBall> =
                row.iter().map(|r| RealBall::from_rat(r, prec)).collect();
            let _ = dir.try_add_row(&ball_row)?;
        }
        for row in &s.rows {
            let _ = dir.try_add_row(row)?;
        }
        Ok((RealSubspace::Certified(dir), sat_std))
    }

    /// Convention for coinciding cosets: the base is the reduction of the
    /// orthogonal projection of 0 onto the coset `base + S`.
    fn normalize_base(
        &self,
        base: &AmbientPoint,
        direction: &RealSubspace,
        compact_dir: &RealSubspaceExact,
    ) -> Base {
        match (base, direction) {
            (AmbientPoint::Exact(t), RealSubspace::Exact(dir)) => {
                let proj = dir.project_orthogonal(t);
                let rep: RVec = t.iter().zip(&proj).map(|(a, b)| a - b).collect();
                Base::Exact(self.reduce_real(&rep).expect("dimension checked"))
            }
            (base, _) => {
                let x = match base {
                    AmbientPoint::Exact(t) => rvec_to_f64(t),
                    AmbientPoint::Approx(t) => t.clone(),
                };
                let rows = direction_rows_f64(direction, compact_dir);
                let onb = orthonormalize(&rows, self.real_dim());
                let mut rep = x.clone();
                for b in &onb {
                    let dot: f64 = b.iter().zip(&rep).map(|(u, v)| u * v).sum();
                    for i in 0..rep.len() {
                        rep[i] -= dot * b[i];
                    }
                }
                Base::Approx(self.reduce_f64(&rep))
            }
        }
    }

    /// Torus distance between reduced points: exact shell search over the
    /// compact coordinates, direct on the transverse factor.
    pub fn torus_distance_sq(&self, p: &TorusPoint, q: &TorusPoint) -> Rat {
        let mut best: Option<Rat> = None;
        let deltas: Vec<Rat> = p
            .compact
            .iter()
            .zip(&q.compact)
            .map(|(a, b)| a - b)
            .collect();
        for k in &self.shell {
            let mut x = vec![Rat::zero(); self.real_dim()];
            for (j, d) in deltas.iter().enumerate() {
                let c = d + Rat::from_integer(k[j].into());
                if c.is_zero() {
                    continue;
                }
                for i in 0..self.real_dim() {
                    x[i] += &c * &self.gens_real[j][i];
                }
            }
            for (j, &col) in self.complement_cols.iter().enumerate() {
                x[col] += &p.transverse[j] - &q.transverse[j];
            }
            let d2: Rat = x.iter().map(|v| v * v).sum();
            best = Some(match best {
                None => d2,
                Some(b) if d2 < b => d2,
                Some(b) => b,
            });
        }
        best.unwrap_or_else(Rat::zero)
    }

    pub fn torus_distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        rat_to_f64(&self.torus_distance_sq(p, q)).sqrt()
    }

    pub fn torus_distance_f64(&self, p: &TorusPointF, q: &TorusPointF) -> f64 {
        let r = self.rank();
        let m = self.real_dim();
        let mut best = f64::INFINITY;
        for k in &self.shell {
            let mut x = vec![0.0; m];
            for j in 0..r {
                let c = p.compact[j] - q.compact[j] + k[j] as f64;
                for i in 0..m {
                    x[i] += c * self.gens_real_f64[j][i];
                }
            }
            for (j, &col) in self.complement_cols.iter().enumerate() {
                x[col] += p.transverse[j] - q.transverse[j];
            }
            let d2: f64 = x.iter().map(|v| v * v).sum();
            best = best.min(d2);
        }
        best.sqrt()
    }

    /// Distance (f64) from a reduced point to a closed subgroup.
    pub fn distance_to_subgroup(&self, p: &TorusPointF, h: &ClosedSubgroup) -> f64 {
        let proj = SubgroupProjector::new(self, h);
        proj.distance(self, p)
    }

    /// Dual functionals `m` (integral on `Γ`, coefficients bounded by `d`)
    /// whose character is constant on the subgroup, and the complement
    /// list, each non-annihilator with a witness direction row.
    pub fn dual_annihilator(
        &self,
        h: &ClosedSubgroup,
        d: i64,
    ) -> Result<(Vec<Vec<i64>>, Vec<(Vec<i64>, RVec)>)> {
        let dir = h.direction.as_exact().ok_or_else(|| {
            Error::CertificationFailure("dual characters need an exact direction".into())
        })?;
        let r = self.rank();
        let mut t_rows: Vec<(RVec, RVec)> = Vec::new(); // (t-part, original row)
        for row in dir.basis_rows() {
            let (t, _) = self.split_coords(&row);
            t_rows.push((t, row));
        }
        let mut ann = Vec::new();
        let mut non = Vec::new();
        for m in box_iter(r, d) {
            let witness = t_rows.iter().find(|(t, _)| {
                let dot: Rat = t
                    .iter()
                    .zip(&m)
                    .map(|(ti, &mi)| ti * Rat::from_integer(mi.into()))
                    .sum();
                !dot.is_zero()
            });
            match witness {
                None => ann.push(m),
                Some((_, row)) => non.push((m, row.clone())),
            }
        }
        Ok((ann, non))
    }
}

fn plausibly_zero(b: &RealBall, prec: u32) -> bool {
    b.rad_f64() < 2f64.powi(-((prec / 4) as i32))
        && b.mid_f64().abs() <= 4.0 * b.rad_f64().max(f64::MIN_POSITIVE)
}

fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

fn frac_f64(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn shell_vectors(r: usize) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::with_capacity(out.len() * 3);
        for v in &out {
            for k in [0i32, -1, 1] {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn box_iter(r: usize, d: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for v in &out {
            for k in -d..=d {
                let mut w = v.clone();
                w.push(k);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn direction_rows_f64(dir: &RealSubspace, compact: &RealSubspaceExact) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = match dir {
        RealSubspace::Exact(s) => s.basis_rows().iter().map(|r| rvec_to_f64(r)).collect(),
        RealSubspace::Certified(s) => s
            .rows
            .iter()
            .map(|r| r.iter().map(|b| b.mid_f64()).collect())
            .collect(),
    };
    for r in compact.basis_rows() {
        rows.push(rvec_to_f64(&r));
    }
    rows
}

fn orthonormalize(rows: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    let mut onb: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        v.resize(m, 0.0);
        for _ in 0..2 {
            for b in &onb {
                let dot: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                for i in 0..m {
                    v[i] -= dot * b[i];
                }
            }
        }
        let n = linalg::norm_f64(&v);
        if n > 1e-9 {
            for x in &mut v {
                *x /= n;
            }
            onb.push(v);
        }
    }
    onb
}

/// Cached orthonormal frame for repeated point-to-subgroup distances.
///
/// The representative of a difference can carry lattice wraps far along
/// the direction, so distances are computed in the quotient: the lattice
/// generators are projected transverse to the direction, an integer basis
/// of that projected lattice is extracted by LLL (kernel combinations
/// along the subgroup drop out), and Babai rounding plus a unit shell
/// finds the nearest quotient-lattice point.
pub struct SubgroupProjector {
    onb: Vec<Vec<f64>>,
    base: TorusPointF,
    /// Basis vectors of the projected generator lattice (f64 images).
    q_basis: Vec<Vec<f64>>,
    normal_inv: Vec<Vec<f64>>,
    q_shell: Vec<Vec<i32>>,
}

impl SubgroupProjector {
    pub fn new(lattice: &Lattice, h: &ClosedSubgroup) -> Self {
        let m = lattice.real_dim();
        let r = lattice.rank();
        let rows = direction_rows_f64(&h.direction, &h.compact_dir);
        let onb = orthonormalize(&rows, m);
        let residual = |v: &[f64]| -> Vec<f64> {
            let mut x = v.to_vec();
            for b in &onb {
                let dot: f64 = b.iter().zip(&x).map(|(u, w)| u * w).sum();
                for i in 0..m {
                    x[i] -= dot * b[i];
                }
            }
            x
        };
        let pg: Vec<Vec<f64>> = (0..r)
            .map(|j| residual(&lattice.gens_real_f64[j]))
            .collect();
        // Integer basis of the projected lattice via the LLL embedding
        // (W*I | K * images). The identity block is weighted so rounding
        // noise in the scaled images cannot masquerade as huge
        // near-kernel combinations; true kernel rows still sort first.
        let scale = 2f64.powi(40);
        let weight = num_bigint::BigInt::from(1u64 << 20);
        let mut emb: Vec<Vec<num_bigint::BigInt>> = Vec::with_capacity(r);
        for j in 0..r {
            let mut row = vec![num_bigint::BigInt::from(0); r + m];
            row[j] = weight.clone();
            for i in 0..m {
                row[r + i] = num_bigint::BigInt::from((pg[j][i] * scale).round() as i64);
            }
            emb.push(row);
        }
        let reduced = crate::lll::lll_reduce(emb);
        let mut q_basis: Vec<Vec<f64>> = Vec::new();
        for row in &reduced {
            let combo: Vec<num_bigint::BigInt> =
                row[..r].iter().map(|x| x / &weight).collect();
            if combo.iter().all(|x| x.is_zero()) {
                continue;
            }
            // Recompute the image in f64 from the integer combination.
            let mut img = vec![0.0; m];
            for (j, c) in combo.iter().enumerate() {
                let cf = c.to_f64().unwrap_or(0.0);
                if cf != 0.0 {
                    for i in 0..m {
                        img[i] += cf * pg[j][i];
                    }
                }
            }
            let norm = crate::linalg::norm_f64(&img);
            if norm > 1e-7 {
                q_basis.push(img);
            }
        }
        let rq = q_basis.len();
        let mut normal = vec![vec![0.0; rq]; rq];
        for a in 0..rq {
            for b in 0..rq {
                normal[a][b] = q_basis[a]
                    .iter()
                    .zip(&q_basis[b])
                    .map(|(x, y)| x * y)
                    .sum();
            }
        }
        let normal_inv = invert_f64(&normal).unwrap_or_default();
        SubgroupProjector {
            onb,
            base: h.base_f64(),
            q_basis,
            normal_inv,
            q_shell: shell_vectors_i32(rq),
        }
    }

    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut x = v.to_vec();
        for b in &self.onb {
            let dot: f64 = b.iter().zip(&x).map(|(u, w)| u * w).sum();
            for i in 0..x.len() {
                x[i] -= dot * b[i];
            }
        }
        x
    }

    pub fn distance(&self, lattice: &Lattice, p: &TorusPointF) -> f64 {
        let r = lattice.rank();
        let m = lattice.real_dim();
        let mut rep = vec![0.0; m];
        for j in 0..r {
            let c = p.compact[j] - self.base.compact[j];
            for i in 0..m {
                rep[i] += c * lattice.gens_real_f64[j][i];
            }
        }
        for (j, &col) in lattice.complement_cols.iter().enumerate() {
            rep[col] += p.transverse[j] - self.base.transverse[j];
        }
        let w = self.residual(&rep);
        let rq = self.q_basis.len();
        if rq == 0 || self.normal_inv.is_empty() {
            return crate::linalg::norm_f64(&w);
        }
        // Babai rounding in the quotient basis, then a unit shell.
        let rhs: Vec<f64> = (0..rq)
            .map(|a| -self.q_basis[a].iter().zip(&w).map(|(x, y)| x * y).sum::<f64>())
            .collect();
        let k0: Vec<f64> = (0..rq)
            .map(|a| {
                self.normal_inv[a]
                    .iter()
                    .zip(&rhs)
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    .round()
            })
            .collect();
        let mut best = f64::INFINITY;
        for k in &self.q_shell {
            let mut x = w.clone();
            for j in 0..rq {
                let kj = k0[j] + k[j] as f64;
                if kj != 0.0 {
                    for i in 0..m {
                        x[i] += kj * self.q_basis[j][i];
                    }
                }
            }
            let d2: f64 = x.iter().map(|v| v * v).sum();
            best = best.min(d2);
        }
        best.sqrt()
    }
}

fn shell_vectors_i32(r: usize) -> Vec<Vec<i32>> {
    shell_vectors(r)
}

fn invert_f64(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for j in 0..2 * n {
            m[col][j] /= d;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for j in 0..2 * n {
                    m[r][j] -= f * m[col][j];
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Point of `T` in split coordinates: compact coordinates in `[0,1)` along
/// the generators, exact transverse coordinates in the fixed complement.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    pub compact: Vec<Rat>,
    pub transverse: Vec<Rat>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TorusPointF {
    pub compact: Vec<f64>,
    pub transverse: Vec<f64>,
}

impl TorusPoint {
    pub fn to_f64(&self) -> TorusPointF {
        TorusPointF {
            compact: rvec_to_f64(&self.compact),
            transverse: rvec_to_f64(&self.transverse),
        }
    }
}

/// A point of `E` in realified ambient coordinates, before reduction.
#[derive(Clone, Debug)]
pub enum AmbientPoint {
    Exact(RVec),
    Approx(Vec<f64>),
}

impl AmbientPoint {
    pub fn zero(real_dim: usize) -> Self {
        AmbientPoint::Exact(vec![Rat::zero(); real_dim])
    }

    pub fn from_complex(v: &CVec) -> Self {
        AmbientPoint::Exact(realify(v))
    }
}

#[derive(Clone, Debug)]
pub enum Base {
    Exact(TorusPoint),
    Approx(TorusPointF),
}

/// Translated connected closed real Lie subgroup `π(base) + π(S)`.
///
/// The direction satisfies the saturation fixed point: `S ∩ Γ_R` is
/// rational in the lattice frame and equal to its own saturation, the
/// representation-level condition for the image to be closed.
#[derive(Clone, Debug)]
pub struct ClosedSubgroup {
    pub n: usize,
    pub direction: RealSubspace,
    /// Saturated `S ∩ Γ_R` (exact rational; the wrapped directions).
    pub compact_dir: RealSubspaceExact,
    pub base: Base,
}

impl ClosedSubgroup {
    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    /// The subgroup is a compact set iff every direction wraps.
    pub fn is_compact_set(&self) -> bool {
        self.direction.dim() == self.compact_dir.dim()
    }

    pub fn base_f64(&self) -> TorusPointF {
        match &self.base {
            Base::Exact(t) => t.to_f64(),
            Base::Approx(t) => t.clone(),
        }
    }

    /// Set equality for exact-direction subgroups: identical canonical
    /// direction and base difference inside the subgroup.
    pub fn same_set(&self, other: &ClosedSubgroup, lattice: &Lattice) -> bool {
        match (self.direction.as_exact(), other.direction.as_exact()) {
            (Some(a), Some(b)) if a == b => {}
            _ => return false,
        }
        lattice.distance_to_subgroup(&self.base_f64(), other) < 1e-9
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int, GaussianRational as Gq};
    use crate::linalg::cvec;
    use num_traits::One;

    fn gauss_int_lattice() -> Lattice {
        // Γ = Z + iZ in C.
        Lattice::new(1, vec![vec![Gq::one()], vec![Gq::i()]]).unwrap()
    }

    fn mixed_lattice() -> Lattice {
        // Γ = Z x (Z + iZ) in C^2.
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

    #[test]
    fn reduce_fractional_parts() {
        let l = gauss_int_lattice();
        let p = vec![Gq::new(rat(27, 10), rat(16, 5))];
        let t = l.reduce(&p).unwrap();
        assert_eq!(t.compact, vec![rat(7, 10), rat(1, 5)]);
        assert!(t.transverse.is_empty());
    }

    #[test]
    fn reduce_split_coordinates() {
        let l = mixed_lattice();
        let p = vec![Gq::new(rat(3, 2), rat(2, 1)), Gq::new(rat(1, 4), rat(1, 2))];
        let t = l.reduce(&p).unwrap();
        assert_eq!(t.compact, vec![rat(1, 2), rat(1, 4), rat(1, 2)]);
        assert_eq!(t.transverse, vec![rat(2, 1)]);
    }

    #[test]
    fn reduce_periodic_under_lattice() {
        let l = mixed_lattice();
        let mut state = 1u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 33) as i64 % 7) - 3
        };
        for _ in 0..100 {
            let p = vec![
                Gq::new(rat(rnd(), 7), rat(rnd(), 5)),
                Gq::new(rat(rnd(), 3), rat(rnd(), 11)),
            ];
            let g: CVec = vec![
                Gq::new(rat_int(rnd()), Rat::zero()),
                Gq::new(rat_int(rnd()), rat_int(rnd())),
            ];
            let shifted: CVec = p.iter().zip(&g).map(|(x, y)| x + y).collect();
            assert_eq!(l.reduce(&p).unwrap(), l.reduce(&shifted).unwrap());
        }
    }

    #[test]
    fn gamma_r_membership() {
        let l = mixed_lattice();
        assert!(l
            .in_gamma_r(&vec![
                Gq::new(rat(1, 2), Rat::zero()),
                Gq::new(Rat::zero(), rat_int(3)),
            ])
            .is_in());
        assert!(l.in_gamma_r(&vec![Gq::i(), Gq::zero()]).is_out());
    }

    #[test]
    fn in_gamma_r_ball_certified_out() {
        // Γ = Z^2 in C^2; ball vector (1, i sqrt2) is certified outside R^2.
        let l = Lattice::new(2, vec![cvec(&[(1, 0), (0, 0)]), cvec(&[(0, 0), (1, 0)])]).unwrap();
        let prec = 128;
        let s2 = crate::ball::sqrt_rat(&rat(2, 1), prec).unwrap();
        let v: BallVec = vec![
            crate::ball::ComplexBall::from_gauss(&Gq::one(), prec),
            crate::ball::ComplexBall::new(crate::ball::Dyadic::zero(), s2.mid, s2.rad, prec),
        ];
        assert!(l.in_gamma_r_ball(&v).is_out());
    }

    #[test]
    fn torus_distance_wraparound() {
        let l = gauss_int_lattice();
        let p = TorusPoint {
            compact: vec![rat(1, 10), rat(9, 10)],
            transverse: vec![],
        };
        let q = TorusPoint {
            compact: vec![rat(9, 10), rat(1, 10)],
            transverse: vec![],
        };
        assert_eq!(l.torus_distance_sq(&p, &q), rat(8, 100));
        assert_eq!(l.torus_distance_sq(&p, &p), rat(0, 1));
    }

    #[test]
    fn torus_distance_invariant_under_lattice_shift() {
        let l = mixed_lattice();
        let mut state = 7u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(11);
            ((state >> 33) as i64 % 9) - 4
        };
        for _ in 0..100 {
            let p = vec![
                Gq::new(rat(rnd(), 7), rat(rnd(), 5)),
                Gq::new(rat(rnd(), 3), rat(rnd(), 11)),
            ];
            let q = vec![
                Gq::new(rat(rnd(), 2), rat(rnd(), 9)),
                Gq::new(rat(rnd(), 13), rat(rnd(), 4)),
            ];
            let g: CVec = vec![
                Gq::new(rat_int(rnd()), Rat::zero()),
                Gq::new(rat_int(rnd()), rat_int(rnd())),
            ];
            let q_shift: CVec = q.iter().zip(&g).map(|(x, y)| x + y).collect();
            let d1 = l.torus_distance_sq(&l.reduce(&p).unwrap(), &l.reduce(&q).unwrap());
            let d2 = l.torus_distance_sq(&l.reduce(&p).unwrap(), &l.reduce(&q_shift).unwrap());
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn closure_rational_line_is_circle() {
        let l = gauss_int_lattice();
        let f = RealSubspaceExact::span(&[vec![rat_int(1), rat_int(0)]]).unwrap();
        let h = l
            .subgroup_closure(&RealSubspace::Exact(f), &AmbientPoint::zero(2))
            .unwrap();
        assert_eq!(h.dim(), 1);
        assert!(h.is_compact_set());
    }

    #[test]
    fn closure_irrational_line_is_dense() {
        let l = gauss_int_lattice();
        let prec = 192;
        let s2 = crate::ball::sqrt_rat(&rat(2, 1), prec).unwrap();
        let mut sub = RealSubspaceBall::new(2, prec);
        let row = vec![RealBall::from_rat(&rat_int(1), prec), s2];
        sub.try_add_row(&row).unwrap().unwrap();
        let h = l
            .subgroup_closure(&RealSubspace::Certified(sub), &AmbientPoint::zero(2))
            .unwrap();
        assert_eq!(h.compact_dir.dim(), 2, "saturation must fill R^2");
    }

    #[test]
    fn closure_complex_line_in_mixed_lattice() {
        let l = mixed_lattice();
        let f = crate::linalg::realify_subspace(
            &crate::linalg::ComplexSubspace::span(&[cvec(&[(1, 0), (0, 0)])]).unwrap(),
        );
        let h = l
            .subgroup_closure(&RealSubspace::Exact(f), &AmbientPoint::zero(4))
            .unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.compact_dir.dim(), 1);
        assert!(!h.is_compact_set());
    }

    #[test]
    fn closure_idempotent() {
        let l = mixed_lattice();
        let f = RealSubspaceExact::span(&[
            vec![rat_int(1), rat_int(0), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(1), rat_int(0), rat_int(0)],
        ])
        .unwrap();
        let h = l
            .subgroup_closure(&RealSubspace::Exact(f), &AmbientPoint::zero(4))
            .unwrap();
        let h2 = l
            .subgroup_closure(&h.direction, &AmbientPoint::zero(4))
            .unwrap();
        assert!(h.direction.as_exact().unwrap() == h2.direction.as_exact().unwrap());
    }

    #[test]
    fn dual_annihilator_axis() {
        let l = gauss_int_lattice();
        let f = RealSubspaceExact::span(&[vec![rat_int(1), rat_int(0)]]).unwrap();
        let h = l
            .subgroup_closure(&RealSubspace::Exact(f), &AmbientPoint::zero(2))
            .unwrap();
        let (ann, non) = l.dual_annihilator(&h, 2).unwrap();
        assert!(ann.iter().all(|m| m[0] == 0));
        assert_eq!(ann.len(), 5);
        assert_eq!(non.len(), 20);
        for (m, witness) in &non {
            let (t, _) = l.split_coords(witness);
            let dot: Rat = t
                .iter()
                .zip(m)
                .map(|(ti, &mi)| ti * Rat::from_integer(mi.into()))
                .sum();
            assert!(!dot.is_zero());
        }
    }

    #[test]
    fn dual_annihilator_full_torus_and_slope() {
        let l = gauss_int_lattice();
        let full = l
            .subgroup_closure(
                &RealSubspace::Exact(RealSubspaceExact::full(2)),
                &AmbientPoint::zero(2),
            )
            .unwrap();
        let (ann, _) = l.dual_annihilator(&full, 3).unwrap();
        assert_eq!(ann, vec![vec![0, 0]]);
        let line = RealSubspaceExact::span(&[vec![rat_int(2), rat_int(1)]]).unwrap();
        let h = l
            .subgroup_closure(&RealSubspace::Exact(line), &AmbientPoint::zero(2))
            .unwrap();
        let (mut ann, _) = l.dual_annihilator(&h, 4).unwrap();
        ann.sort();
        assert_eq!(
            ann,
            vec![vec![-2, 4], vec![-1, 2], vec![0, 0], vec![1, -2], vec![2, -4]]
        );
    }

    #[test]
    fn same_set_detects_translate() {
        let l = gauss_int_lattice();
        let f = RealSubspaceExact::span(&[vec![rat_int(1), rat_int(0)]]).unwrap();
        let a = l
            .subgroup_closure(
                &RealSubspace::Exact(f.clone()),
                &AmbientPoint::Exact(vec![rat(1, 3), rat_int(0)]),
            )
            .unwrap();
        // Same coset: base shifted along the direction and by a lattice vector.
        let b = l
            .subgroup_closure(
                &RealSubspace::Exact(f.clone()),
                &AmbientPoint::Exact(vec![rat(7, 2), rat_int(1)]),
            )
            .unwrap();
        assert!(a.same_set(&b, &l));
        let c = l
            .subgroup_closure(
                &RealSubspace::Exact(f),
                &AmbientPoint::Exact(vec![rat_int(0), rat(1, 3)]),
            )
            .unwrap();
        assert!(!a.same_set(&c, &l));
    }
}
