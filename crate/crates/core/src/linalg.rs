//! Subspace algebra over `Q(i)` and its realification.
//!
//! Subspaces are stored as reduced row echelon bases, so equal subspaces
//! have identical representations and equality is structural. Real
//! subspaces come in two modes: `Exact` (rational entries, canonical) and
//! `Certified` (ball entries with independence witnessed by a pivot minor
//! whose ball excludes zero).

use num_traits::{Signed, Zero};

use crate::ball::{ComplexBall, RealBall};
use crate::exact::{GaussianRational as Gq, Rat};
use crate::lll;
use crate::mat::Mat;
use crate::{Error, Result, Trilean};

/// Exact complex vector in `E ~ C^n`.
pub type CVec = Vec<Gq>;
/// Exact real vector (realified coordinates, dimension `2n`).
pub type RVec = Vec<Rat>;
/// Complex ball vector.
pub type BallVec = Vec<ComplexBall>;

pub fn cvec(entries: &[(i64, i64)]) -> CVec {
    entries
        .iter()
        .map(|&(re, im)| Gq::from_pair((re, 1), (im, 1)))
        .collect()
}

pub fn rvec(entries: &[i64]) -> RVec {
    entries.iter().map(|&x| crate::exact::rat_int(x)).collect()
}

/// Interleaved realification `(Re z_1, Im z_1, ..., Re z_n, Im z_n)`.
///
/// This ordering is fixed crate-wide; every module converting between `C^n`
/// and `R^2n` goes through these two functions.
pub fn realify(v: &[Gq]) -> RVec {
    let mut out = Vec::with_capacity(2 * v.len());
    for z in v {
        out.push(z.re.clone());
        out.push(z.im.clone());
    }
    out
}

pub fn unrealify(v: &[Rat]) -> CVec {
    assert!(v.len() % 2 == 0);
    v.chunks(2)
        .map(|c| Gq::new(c[0].clone(), c[1].clone()))
        .collect()
}

/// Multiplication by `i` on realified coordinates.
pub fn mul_i_real(v: &[Rat]) -> RVec {
    let mut out = Vec::with_capacity(v.len());
    for c in v.chunks(2) {
        out.push(-c[1].clone());
        out.push(c[0].clone());
    }
    out
}

pub fn realify_ball(v: &[ComplexBall]) -> Vec<RealBall> {
    let mut out = Vec::with_capacity(2 * v.len());
    for z in v {
        out.push(z.re_ball());
        out.push(z.im_ball());
    }
    out
}

// ---------------------------------------------------------------------------
// Complex subspaces
// ---------------------------------------------------------------------------

/// Complex vector subspace of `C^n` in canonical echelon form.
#[derive(Clone, PartialEq)]
pub struct ComplexSubspace {
    pub ambient: usize,
    pub basis: Mat<Gq>,
    pub pivots: Vec<usize>,
}

impl ComplexSubspace {
    pub fn zero(ambient: usize) -> Self {
        ComplexSubspace {
            ambient,
            basis: Mat::zero(0, ambient),
            pivots: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        ComplexSubspace {
            ambient,
            basis: Mat::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(vectors: &[CVec]) -> Result<Self> {
        let ambient = vectors.first().map_or(0, |v| v.len());
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "span: vector of length {} among vectors of length {ambient}",
                    v.len()
                )));
            }
        }
        let mut m = Mat::from_rows(vectors.to_vec());
        if ambient == 0 {
            return Ok(ComplexSubspace::zero(0));
        }
        m.cols = ambient; // from_rows on empty input yields cols 0
        let pivots = m.rref();
        Ok(ComplexSubspace {
            ambient,
            basis: m,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// Reduce `v` against the echelon basis; the residual is supported on
    /// non-pivot coordinates and vanishes iff `v` is in the subspace.
    pub fn reduce(&self, v: &[Gq]) -> CVec {
        assert_eq!(v.len(), self.ambient);
        let mut r = v.to_vec();
        for (row, &c) in self.pivots.iter().enumerate() {
            if !r[c].is_zero() {
                let f = r[c].clone();
                for j in 0..self.ambient {
                    let s = &f * &self.basis[(row, j)];
                    r[j] = &r[j] - &s;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Gq]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of the canonical projection `E -> E/F` with respect to
    /// the non-pivot coordinate complement.
    pub fn quotient_project(&self, v: &[Gq]) -> Result<CVec> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "quotient_project: vector length {} vs ambient {}",
                v.len(),
                self.ambient
            )));
        }
        let r = self.reduce(v);
        Ok(self
            .non_pivots()
            .into_iter()
            .map(|c| r[c].clone())
            .collect())
    }

    /// Lift quotient coordinates back to `E`, supported on non-pivot slots.
    pub fn lift(&self, q: &[Gq]) -> CVec {
        let np = self.non_pivots();
        assert_eq!(q.len(), np.len());
        let mut v = vec![Gq::zero(); self.ambient];
        for (k, &c) in np.iter().enumerate() {
            v[c] = q[k].clone();
        }
        v
    }

    pub fn non_pivots(&self) -> Vec<usize> {
        (0..self.ambient)
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }

    pub fn sum(&self, other: &ComplexSubspace) -> Result<Self> {
        let mut rows: Vec<CVec> = self.basis.rows_iter().map(|r| r.to_vec()).collect();
        rows.extend(other.basis.rows_iter().map(|r| r.to_vec()));
        if rows.is_empty() {
            return Ok(ComplexSubspace::zero(self.ambient));
        }
        ComplexSubspace::span(&rows)
    }

    pub fn basis_rows(&self) -> Vec<CVec> {
        self.basis.rows_iter().map(|r| r.to_vec()).collect()
    }
}

impl std::fmt::Debug for ComplexSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ComplexSubspace(dim {} of C^{})", self.dim(), self.ambient)
    }
}

// ---------------------------------------------------------------------------
// Real subspaces
// ---------------------------------------------------------------------------

/// Real vector subspace of `R^m` with exact rational canonical basis.
#[derive(Clone, PartialEq)]
pub struct RealSubspaceExact {
    pub ambient: usize,
    pub basis: Mat<Rat>,
    pub pivots: Vec<usize>,
}

impl RealSubspaceExact {
    pub fn zero(ambient: usize) -> Self {
        RealSubspaceExact {
            ambient,
            basis: Mat::zero(0, ambient),
            pivots: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        RealSubspaceExact {
            ambient,
            basis: Mat::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(vectors: &[RVec]) -> Result<Self> {
        let ambient = vectors.first().map_or(0, |v| v.len());
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch("span: ragged real vectors".into()));
            }
        }
        let mut m = Mat::from_rows(vectors.to_vec());
        let pivots = m.rref();
        Ok(RealSubspaceExact {
            ambient,
            basis: m,
            pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn reduce(&self, v: &[Rat]) -> RVec {
        assert_eq!(v.len(), self.ambient);
        let mut r = v.to_vec();
        for (row, &c) in self.pivots.iter().enumerate() {
            if !r[c].is_zero() {
                let f = r[c].clone();
                for j in 0..self.ambient {
                    let s = &f * &self.basis[(row, j)];
                    r[j] = &r[j] - &s;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    pub fn sum(&self, other: &RealSubspaceExact) -> Result<Self> {
        let mut rows: Vec<RVec> = self.basis.rows_iter().map(|r| r.to_vec()).collect();
        rows.extend(other.basis.rows_iter().map(|r| r.to_vec()));
        if rows.is_empty() {
            return Ok(RealSubspaceExact::zero(self.ambient));
        }
        RealSubspaceExact::span(&rows)
    }

    /// Rows annihilating the subspace: a basis of `{ y : y . s = 0 }`.
    pub fn annihilator(&self) -> Mat<Rat> {
        if self.dim() == 0 {
            return Mat::identity(self.ambient);
        }
        self.basis.kernel()
    }

    pub fn intersect(&self, other: &RealSubspaceExact) -> Result<Self> {
        assert_eq!(self.ambient, other.ambient);
        let mut rows: Vec<RVec> = self.annihilator().rows_iter().map(|r| r.to_vec()).collect();
        rows.extend(other.annihilator().rows_iter().map(|r| r.to_vec()));
        if rows.is_empty() {
            return Ok(RealSubspaceExact::full(self.ambient));
        }
        let stacked = Mat::from_rows(rows);
        let kern = stacked.kernel();
        if kern.rows == 0 {
            return Ok(RealSubspaceExact::zero(self.ambient));
        }
        RealSubspaceExact::span(&kern.rows_iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    /// Image under multiplication by `i` (on realified coordinates).
    pub fn mul_i(&self) -> Result<Self> {
        let rows: Vec<RVec> = self
            .basis
            .rows_iter()
            .map(|r| mul_i_real(r))
            .collect();
        RealSubspaceExact::span(&rows)
    }

    pub fn basis_rows(&self) -> Vec<RVec> {
        self.basis.rows_iter().map(|r| r.to_vec()).collect()
    }

    /// Orthogonal projection of `v` onto the subspace (standard inner
    /// product on the realified coordinates).
    pub fn project_orthogonal(&self, v: &[Rat]) -> RVec {
        let k = self.dim();
        if k == 0 {
            return vec![Rat::zero(); self.ambient];
        }
        // Solve (B B^T) c = B v, projection = B^T c.
        let mut gram = Mat::zero(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = Rat::zero();
                for t in 0..self.ambient {
                    acc += &self.basis[(i, t)] * &self.basis[(j, t)];
                }
                gram[(i, j)] = acc;
            }
        }
        let rhs: Vec<Rat> = (0..k)
            .map(|i| {
                let mut acc = Rat::zero();
                for t in 0..self.ambient {
                    acc += &self.basis[(i, t)] * &v[t];
                }
                acc
            })
            .collect();
        let c = gram.solve(&rhs).expect("gram matrix is invertible");
        (0..self.ambient)
            .map(|t| {
                let mut acc = Rat::zero();
                for i in 0..k {
                    acc += &c[i] * &self.basis[(i, t)];
                }
                acc
            })
            .collect()
    }
}

impl std::fmt::Debug for RealSubspaceExact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RealSubspaceExact(dim {} of R^{})", self.dim(), self.ambient)
    }
}

/// Real span of the realification of a complex subspace.
pub fn realify_subspace(f: &ComplexSubspace) -> RealSubspaceExact {
    let mut rows = Vec::new();
    for r in f.basis.rows_iter() {
        let re = realify(r);
        rows.push(mul_i_real(&re));
        rows.push(re);
    }
    if rows.is_empty() {
        return RealSubspaceExact::zero(2 * f.ambient);
    }
    RealSubspaceExact::span(&rows).expect("consistent dimensions")
}

/// Smallest complex subspace containing a real subspace of `R^2n`.
pub fn complexify(s: &RealSubspaceExact) -> Result<ComplexSubspace> {
    let mut rows: Vec<CVec> = Vec::new();
    for r in s.basis.rows_iter() {
        rows.push(unrealify(r));
        rows.push(unrealify(&mul_i_real(r)));
    }
    if rows.is_empty() {
        return Ok(ComplexSubspace::zero(s.ambient / 2));
    }
    ComplexSubspace::span(&rows)
}

// ---------------------------------------------------------------------------
// Certified (ball) real subspaces
// ---------------------------------------------------------------------------

/// Real subspace with ball entries. Independence of the stored rows is
/// witnessed by pivot entries whose balls exclude zero.
#[derive(Clone)]
pub struct RealSubspaceBall {
    pub ambient: usize,
    pub rows: Vec<Vec<RealBall>>,
    pub pivots: Vec<usize>,
    pub prec: u32,
}

impl RealSubspaceBall {
    pub fn new(ambient: usize, prec: u32) -> Self {
        RealSubspaceBall {
            ambient,
            rows: vec![],
            pivots: vec![],
            prec,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Eliminate the pivot coordinates of `v`; the residual is an enclosure
    /// of the representative of `v` modulo the subspace.
    pub fn reduce(&self, v: &[RealBall]) -> Result<Vec<RealBall>> {
        let mut r = v.to_vec();
        for (row, &c) in self.pivots.iter().enumerate() {
            let piv = &self.rows[row][c];
            let factor = div_ball(&r[c], piv)?;
            for j in 0..self.ambient {
                let s = factor.mul(&self.rows[row][j]);
                r[j] = r[j].sub(&s);
            }
        }
        Ok(r)
    }

    /// Add a row if some residual coordinate is certified non-zero.
    /// Returns the pivot column, or `None` when the residual may vanish.
    pub fn try_add_row(&mut self, v: &[RealBall]) -> Result<Option<usize>> {
        let r = self.reduce(v)?;
        // Choose the residual entry with the largest certified lower bound.
        let mut best: Option<(usize, f64)> = None;
        for (j, x) in r.iter().enumerate() {
            if x.definitely_nonzero() {
                let lo = x.mid_f64().abs() - x.rad_f64();
                if best.map_or(true, |(_, b)| lo > b) {
                    best = Some((j, lo));
                }
            }
        }
        match best {
            Some((j, _)) => {
                self.rows.push(r);
                self.pivots.push(j);
                Ok(Some(j))
            }
            None => Ok(None),
        }
    }

    /// All residual entries certified non-vanishing <-> vector certainly
    /// outside the subspace.
    pub fn membership(&self, v: &[RealBall]) -> Result<Trilean> {
        let r = self.reduce(v)?;
        if r.iter().any(|x| x.definitely_nonzero()) {
            return Ok(Trilean::Out);
        }
        // All coordinates contain zero: plausibly inside, never certain.
        let tiny = r.iter().all(|x| {
            x.rad_f64() < 2f64.powi(-((self.prec / 4) as i32)) && x.mid_f64().abs() <= 4.0 * x.rad_f64().max(f64::MIN_POSITIVE)
        });
        if tiny {
            Ok(Trilean::In)
        } else {
            Ok(Trilean::Undecided)
        }
    }
}

fn div_ball(a: &RealBall, b: &RealBall) -> Result<RealBall> {
    // Promote to complex to reuse the certified reciprocal.
    let ca = ComplexBall::new(a.mid.clone(), crate::ball::Dyadic::zero(), a.rad, a.prec);
    let cb = ComplexBall::new(b.mid.clone(), crate::ball::Dyadic::zero(), b.rad, b.prec);
    let q = ca.div(&cb)?;
    Ok(RealBall {
        mid: q.re,
        rad: q.rad,
        prec: a.prec.max(b.prec),
    })
}

/// Exact or certified real subspace (the two modes of the analysis).
#[derive(Clone)]
pub enum RealSubspace {
    Exact(RealSubspaceExact),
    Certified(RealSubspaceBall),
}

impl RealSubspace {
    pub fn ambient(&self) -> usize {
        match self {
            RealSubspace::Exact(s) => s.ambient,
            RealSubspace::Certified(s) => s.ambient,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RealSubspace::Exact(s) => s.dim(),
            RealSubspace::Certified(s) => s.dim(),
        }
    }

    pub fn as_exact(&self) -> Option<&RealSubspaceExact> {
        match self {
            RealSubspace::Exact(s) => Some(s),
            RealSubspace::Certified(_) => None,
        }
    }
}

impl std::fmt::Debug for RealSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealSubspace::Exact(s) => write!(f, "{s:?}"),
            RealSubspace::Certified(s) => {
                write!(f, "RealSubspaceBall(dim {} of R^{})", s.dim(), s.ambient)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rational saturation
// ---------------------------------------------------------------------------

/// Smallest subspace containing `S` that is rational in the given frame.
///
/// `frame_coords` are the coordinates of a spanning set of `S` with respect
/// to a rational frame (for lattice work: the realified `Γ` generators).
/// Exact inputs are returned as their own span; ball inputs go through
/// integer-relation detection with the configured height bound.
pub fn rational_saturation_frame(
    frame_dim: usize,
    exact_coords: &[RVec],
    ball_coords: &[Vec<RealBall>],
    height_bound: i64,
) -> Result<RealSubspaceExact> {
    if ball_coords.is_empty() {
        return RealSubspaceExact::span(exact_coords.to_vec().as_slice());
    }
    // Relation lattice: integer vectors m with m . x = 0 for every exact and
    // ball generator. The saturation is its annihilator.
    let relations = lll::common_relations(frame_dim, exact_coords, ball_coords, height_bound)?;
    let sat = if relations.is_empty() {
        RealSubspaceExact::full(frame_dim)
    } else {
        let rel_rows: Vec<RVec> = relations
            .iter()
            .map(|m| m.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        let m = Mat::from_rows(rel_rows);
        let kern = m.kernel();
        RealSubspaceExact::span(&kern.rows_iter().map(|r| r.to_vec()).collect::<Vec<_>>())?
    };
    // Sanity: the saturation must contain the exact part.
    for v in exact_coords {
        if !sat.contains(v) {
            return Err(Error::CertificationFailure(
                "saturation misses an exact generator".into(),
            ));
        }
    }
    Ok(sat)
}

/// Euclidean norm used by distance helpers on f64 data.
pub fn norm_f64(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn rvec_to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}

/// Height of the largest numerator/denominator in a rational vector.
pub fn rvec_height(v: &[Rat]) -> num_bigint::BigInt {
    let mut h = num_bigint::BigInt::zero();
    for r in v {
        h = h.max(r.numer().abs()).max(r.denom().abs());
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn gq(re: (i64, i64), im: (i64, i64)) -> Gq {
        Gq::from_pair(re, im)
    }

    #[test]
    fn span_scalar_multiples() {
        // span{(1,0),(i,0)} over C is the line C x {0}.
        let s = ComplexSubspace::span(&[cvec(&[(1, 0), (0, 0)]), vec![Gq::i(), Gq::zero()]])
            .unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&vec![gq((7, 3), (1, 5)), Gq::zero()]));
    }

    #[test]
    fn span_full_plane() {
        let s = ComplexSubspace::span(&[cvec(&[(1, 0), (1, 0)]), cvec(&[(1, 0), (-1, 0)])]).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn span_rank_two_of_three() {
        let s = ComplexSubspace::span(&[
            cvec(&[(1, 0), (2, 0)]),
            cvec(&[(2, 0), (4, 0)]),
            cvec(&[(1, 0), (3, 0)]),
        ])
        .unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn echelon_canonical_under_shuffle() {
        let v1 = cvec(&[(1, 2), (0, 1), (3, 0)]);
        let v2 = cvec(&[(0, 0), (2, 0), (1, 1)]);
        let a = ComplexSubspace::span(&[v1.clone(), v2.clone()]).unwrap();
        let scaled: CVec = v1.iter().map(|x| x * &gq((0, 1), (3, 2))).collect();
        let b = ComplexSubspace::span(&[v2, scaled]).unwrap();
        assert!(a == b, "same span must have identical echelon bases");
    }

    #[test]
    fn quotient_projection_examples() {
        // F = C x {0}: projection keeps the second coordinate.
        let f = ComplexSubspace::span(&[cvec(&[(1, 0), (0, 0)])]).unwrap();
        let q = f
            .quotient_project(&vec![gq((3, 1), (1, 1)), gq((2, 1), (-1, 1))])
            .unwrap();
        assert_eq!(q, vec![gq((2, 1), (-1, 1))]);
        // Kernel case.
        let z = f.quotient_project(&vec![gq((5, 1), (2, 1)), Gq::zero()]).unwrap();
        assert!(z.iter().all(|x| x.is_zero()));
        // F = span{(1,1)}: project (2,0); the generator maps to 0.
        let f = ComplexSubspace::span(&[cvec(&[(1, 0), (1, 0)])]).unwrap();
        let q = f.quotient_project(&cvec(&[(2, 0), (0, 0)])).unwrap();
        assert_eq!(q.len(), 1);
        assert!(!q[0].is_zero());
        let k = f.quotient_project(&cvec(&[(1, 0), (1, 0)])).unwrap();
        assert!(k[0].is_zero());
    }

    #[test]
    fn realify_examples() {
        let v = vec![gq((1, 1), (1, 1)), gq((2, 1), (0, 1))];
        assert_eq!(realify(&v), vec![rat_int(1), rat_int(1), rat_int(2), rat_int(0)]);
        let iv: CVec = cvec(&[(1, 0), (0, 0)]).iter().map(|z| z.mul_i()).collect();
        assert_eq!(realify(&iv), vec![rat_int(0), rat_int(1), rat_int(0), rat_int(0)]);
    }

    #[test]
    fn quotient_is_linear_kernel_exactly_f() {
        let f = ComplexSubspace::span(&[cvec(&[(1, 0), (1, 0), (0, 0)])]).unwrap();
        let a = cvec(&[(1, 0), (2, 0), (3, 0)]);
        let b = cvec(&[(0, 1), (1, 1), (1, 0)]);
        let qa = f.quotient_project(&a).unwrap();
        let qb = f.quotient_project(&b).unwrap();
        let sum: CVec = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let qs = f.quotient_project(&sum).unwrap();
        for k in 0..qs.len() {
            assert_eq!(qs[k], &qa[k] + &qb[k]);
        }
    }

    #[test]
    fn intersect_and_complexify() {
        let a = RealSubspaceExact::span(&[rvec(&[1, 0, 0, 0]), rvec(&[0, 1, 0, 0])]).unwrap();
        let b = RealSubspaceExact::span(&[rvec(&[0, 1, 0, 0]), rvec(&[0, 0, 1, 0])]).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&rvec(&[0, 1, 0, 0])));
        let cx = complexify(&c).unwrap();
        assert_eq!(cx.dim(), 1);
    }

    #[test]
    fn saturation_exact_is_identity() {
        let s = rational_saturation_frame(2, &[vec![rat(1, 1), rat(2, 1)]], &[], 1000).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&vec![rat(1, 1), rat(2, 1)]));
    }

    #[test]
    fn project_orthogonal_idempotent() {
        let s = RealSubspaceExact::span(&[rvec(&[1, 1, 0]), rvec(&[0, 0, 1])]).unwrap();
        let p = s.project_orthogonal(&vec![rat_int(2), rat_int(0), rat_int(5)]);
        assert!(s.contains(&p));
        let p2 = s.project_orthogonal(&p);
        assert_eq!(p, p2);
        // Residual orthogonal to the subspace.
        let r: Vec<Rat> = vec![rat_int(2) - &p[0], rat_int(0) - &p[1], rat_int(5) - &p[2]];
        for row in s.basis_rows() {
            let dot = row
                .iter()
                .zip(&r)
                .fold(Rat::zero(), |acc, (x, y)| acc + x * y);
            assert!(dot.is_zero());
        }
    }
}
