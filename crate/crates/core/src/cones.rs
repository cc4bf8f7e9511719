//! Exact rational polyhedral cones: double description, salience,
//! trivial-intersection certificates and the separating integer functional.
//!
//! Everything here is exact; the dimensions in play are small (the number
//! of singular variables), so the double description method with
//! combinatorial adjacency is comfortable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exact::Rat;
use crate::mat::Mat;
use crate::{Error, Result};

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale a rational vector to a primitive integer one (positive multiple).
fn primitive_ray(v: &[Rat]) -> Vec<Rat> {
    let lcm = v
        .iter()
        .fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = v.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rat::from_integer(x / &g))
        .collect()
}

/// V-representation `lineality ⊕ cone(rays)` computed by double
/// description from a list of homogeneous inequalities `a·x >= 0`.
#[derive(Clone, Debug)]
struct VRep {
    lineality: Vec<Vec<Rat>>,
    rays: Vec<Vec<Rat>>,
    /// Tight-constraint bitmask per ray, for adjacency tests.
    tight: Vec<u128>,
}

fn tight_set(r: &[Rat], ineqs: &[Vec<Rat>], upto: usize) -> u128 {
    let mut t = 0u128;
    for (ci, a) in ineqs.iter().enumerate().take(upto) {
        if dot(a, r).is_zero() {
            t |= 1 << ci;
        }
    }
    t
}

fn dd_from_inequalities(dim: usize, ineqs: &[Vec<Rat>]) -> VRep {
    assert!(ineqs.len() <= 128, "too many constraints for the bitmask");
    let mut lin: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut v = vec![Rat::zero(); dim];
            v[i] = Rat::from_integer(1.into());
            v
        })
        .collect();
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    for (ci, a) in ineqs.iter().enumerate() {
        // Case 1: the constraint is non-zero on the lineality space. The
        // splitting vector becomes a ray; everything else is projected
        // into the hyperplane.
        if let Some(pos) = lin.iter().position(|v| !dot(a, v).is_zero()) {
            let mut v0 = lin.remove(pos);
            if dot(a, &v0).is_negative() {
                for x in &mut v0 {
                    *x = -x.clone();
                }
            }
            let d0 = dot(a, &v0);
            for w in &mut lin {
                let f = dot(a, w) / &d0;
                for (wi, vi) in w.iter_mut().zip(&v0) {
                    *wi -= &f * vi;
                }
            }
            for r in rays.iter_mut() {
                let f = dot(a, r) / &d0;
                for (ri, vi) in r.iter_mut().zip(&v0) {
                    *ri -= &f * vi;
                }
                *r = primitive_ray(r);
            }
            rays.push(primitive_ray(&v0));
            rays.retain(|r| r.iter().any(|x| !x.is_zero()));
            continue;
        }
        // Case 2: classic ray splitting with combinatorial adjacency.
        // Tight sets are recomputed exactly; the incremental bookkeeping
        // is too easy to get wrong across lineality descents.
        let tight: Vec<u128> = rays.iter().map(|r| tight_set(r, ineqs, ci)).collect();
        let vals: Vec<Rat> = rays.iter().map(|r| dot(a, r)).collect();
        let mut new_rays = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if !vals[i].is_negative() {
                new_rays.push(r.clone());
            }
        }
        for i in 0..rays.len() {
            if !vals[i].is_positive() {
                continue;
            }
            for j in 0..rays.len() {
                if !vals[j].is_negative() {
                    continue;
                }
                let common = tight[i] & tight[j];
                let adjacent = (0..rays.len())
                    .all(|k| k == i || k == j || (common & !tight[k]) != 0);
                if !adjacent {
                    continue;
                }
                let mut comb = vec![Rat::zero(); dim];
                for t in 0..dim {
                    comb[t] = &vals[i] * &rays[j][t] - &vals[j] * &rays[i][t];
                }
                if comb.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let comb = primitive_ray(&comb);
                if !new_rays.contains(&comb) {
                    new_rays.push(comb);
                }
            }
        }
        // Deduplicate parallel rays.
        let mut kept: Vec<Vec<Rat>> = Vec::new();
        for r in new_rays {
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        rays = kept;
    }
    let tight = rays
        .iter()
        .map(|r| tight_set(r, ineqs, ineqs.len()))
        .collect();
    VRep {
        lineality: lin,
        rays,
        tight,
    }
}

impl VRep {
    /// Drop rays that are non-extreme (tight set strictly dominated).
    fn minimize(&mut self) {
        let n = self.rays.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && keep[j]
                    && (self.tight[i] & !self.tight[j]) == 0
                    && (self.tight[i] != self.tight[j] || i > j)
                {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut rays = Vec::new();
        let mut tight = Vec::new();
        for (i, k) in keep.iter().enumerate() {
            if *k {
                rays.push(self.rays[i].clone());
                tight.push(self.tight[i]);
            }
        }
        self.rays = rays;
        self.tight = tight;
    }
}

/// Which coordinate orthant to adjoin to the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orthant {
    None,
    NonNeg,
    NonPos,
}

/// Rational polyhedral cone with both descriptions stored.
#[derive(Clone, Debug)]
pub struct RationalCone {
    pub dim: usize,
    pub generators: Vec<Vec<Rat>>,
    /// Inequalities `a·x >= 0`.
    pub facets: Vec<Vec<Rat>>,
    /// Equalities `a·x = 0` (cut out the linear span).
    pub equalities: Vec<Vec<Rat>>,
    /// Basis of the lineality space (the smallest face, `zero_face`).
    pub zero_face: Vec<Vec<Rat>>,
    pub is_salient: bool,
}

/// Build a cone from generators, optionally adjoining an orthant.
/// Facets are computed by double description on the polar side.
pub fn build_cone(dim: usize, gens: &[Vec<Rat>], orthant: Orthant) -> Result<RationalCone> {
    let mut generators: Vec<Vec<Rat>> = Vec::new();
    for g in gens {
        if g.len() != dim {
            return Err(Error::DimensionMismatch("cone generator dimension".into()));
        }
        if g.iter().all(|x| x.is_zero()) {
            continue;
        }
        let p = primitive_ray(g);
        if !generators.contains(&p) {
            generators.push(p);
        }
    }
    match orthant {
        Orthant::None => {}
        Orthant::NonNeg | Orthant::NonPos => {
            let sign: Rat = if orthant == Orthant::NonNeg {
                Rat::from_integer(1.into())
            } else {
                Rat::from_integer((-1).into())
            };
            for i in 0..dim {
                let mut v = vec![Rat::zero(); dim];
                v[i] = sign.clone();
                if !generators.contains(&v) {
                    generators.push(v);
                }
            }
        }
    }
    // Polar: {y : g·y >= 0 for all generators}; its rays are our facets and
    // its lineality is the orthogonal complement of span(generators).
    let mut polar = dd_from_inequalities(dim, &generators);
    polar.minimize();
    let facets: Vec<Vec<Rat>> = polar.rays.clone();
    let equalities: Vec<Vec<Rat>> = polar
        .lineality
        .iter()
        .map(|v| primitive_ray(v))
        .collect();
    // Lineality of the cone itself: x with facets·x = 0 and equalities·x = 0.
    let mut rows: Vec<Vec<Rat>> = facets.iter().chain(equalities.iter()).cloned().collect();
    let zero_face: Vec<Vec<Rat>> = if rows.is_empty() {
        (0..dim)
            .map(|i| {
                let mut v = vec![Rat::zero(); dim];
                v[i] = Rat::from_integer(1.into());
                v
            })
            .collect()
    } else {
        let m = Mat::from_rows(std::mem::take(&mut rows));
        m.kernel().rows_iter().map(|r| primitive_ray(r)).collect()
    };
    let is_salient = zero_face.is_empty();
    let cone = RationalCone {
        dim,
        generators,
        facets,
        equalities,
        zero_face,
        is_salient,
    };
    debug_assert!(cone.generators.iter().all(|g| cone.contains(g)));
    Ok(cone)
}

impl RationalCone {
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|a| !dot(a, x).is_negative())
            && self.equalities.iter().all(|a| dot(a, x).is_zero())
    }

    /// Membership in the smallest face (the lineality space).
    pub fn in_zero_face(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|a| dot(a, x).is_zero())
            && self.equalities.iter().all(|a| dot(a, x).is_zero())
    }

    /// Recompute generators from the stored facets (used by round-trip
    /// verification): double description on the facet/equality system.
    pub fn regenerate(&self) -> VRepPublic {
        let mut ineqs = self.facets.clone();
        for e in &self.equalities {
            ineqs.push(e.clone());
            ineqs.push(e.iter().map(|x| -x.clone()).collect());
        }
        let mut v = dd_from_inequalities(self.dim, &ineqs);
        v.minimize();
        VRepPublic {
            lineality: v.lineality,
            rays: v.rays,
        }
    }

    /// Mutual-inclusion equality with another cone.
    pub fn same_cone(&self, other: &RationalCone) -> bool {
        self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
            && self.zero_face.iter().all(|v| {
                other.contains(v) && other.contains(&v.iter().map(|x| -x.clone()).collect::<Vec<_>>())
            })
            && other.zero_face.iter().all(|v| {
                self.contains(v) && self.contains(&v.iter().map(|x| -x.clone()).collect::<Vec<_>>())
            })
    }
}

#[derive(Clone, Debug)]
pub struct VRepPublic {
    pub lineality: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
}

// ---------------------------------------------------------------------------
// Trivial intersection
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum TrivialityCertificate {
    /// `λ·x < 0` on `C1 \ 0` and `λ·x > 0` on `C2 \ 0`.
    Separator(Vec<Rat>),
    /// Intersection verified empty by double description; no strict
    /// separator exists (a cone is not salient).
    EmptyIntersection,
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    pub trivial: bool,
    pub certificate: Option<TrivialityCertificate>,
    /// Common ray when the intersection is non-trivial.
    pub witness: Option<Vec<Rat>>,
}

/// Decide `C1 ∩ C2 = {0}` with an exact certificate either way.
pub fn intersect_trivially(c1: &RationalCone, c2: &RationalCone) -> Result<IntersectionReport> {
    if c1.dim != c2.dim {
        return Err(Error::DimensionMismatch("cone dimensions differ".into()));
    }
    let mut ineqs = Vec::new();
    ineqs.extend(c1.facets.iter().cloned());
    ineqs.extend(c2.facets.iter().cloned());
    for e in c1.equalities.iter().chain(c2.equalities.iter()) {
        ineqs.push(e.clone());
        ineqs.push(e.iter().map(|x| -x.clone()).collect());
    }
    let mut v = dd_from_inequalities(c1.dim, &ineqs);
    v.minimize();
    if let Some(w) = v.lineality.first().or_else(|| v.rays.first()) {
        return Ok(IntersectionReport {
            trivial: false,
            certificate: None,
            witness: Some(w.clone()),
        });
    }
    // Strict separator via exact LP, when both cones are salient.
    if c1.is_salient && c2.is_salient {
        let mut cons: Vec<(Vec<Rat>, Rat)> = Vec::new(); // a·λ <= b
        for g in &c1.generators {
            cons.push((g.clone(), Rat::from_integer((-1).into())));
        }
        for g in &c2.generators {
            cons.push((
                g.iter().map(|x| -x.clone()).collect(),
                Rat::from_integer((-1).into()),
            ));
        }
        if let Some(lambda) = lp_feasible_free(c1.dim, &cons) {
            return Ok(IntersectionReport {
                trivial: true,
                certificate: Some(TrivialityCertificate::Separator(lambda)),
                witness: None,
            });
        }
    }
    Ok(IntersectionReport {
        trivial: true,
        certificate: Some(TrivialityCertificate::EmptyIntersection),
        witness: None,
    })
}

// ---------------------------------------------------------------------------
// Exact LP (phase-1 simplex, Bland's rule)
// ---------------------------------------------------------------------------

/// Feasibility of `a·x <= b` with free variables; returns a solution.
pub fn lp_feasible_free(dim: usize, cons: &[(Vec<Rat>, Rat)]) -> Option<Vec<Rat>> {
    // Split free variables x = u - v with u, v >= 0.
    let n = 2 * dim;
    let m = cons.len();
    // Rows: a·u - a·v + s_i = b_i with s_i >= 0; artificials where b < 0.
    // Tableau columns: n structural + m slack + artificials + rhs.
    let mut art_cols = 0;
    for (_, b) in cons {
        if b.is_negative() {
            art_cols += 1;
        }
    }
    let cols = n + m + art_cols + 1;
    let mut t = vec![vec![Rat::zero(); cols]; m + 1];
    let mut basis = vec![0usize; m];
    let mut art_seen = 0;
    for (i, (a, b)) in cons.iter().enumerate() {
        let neg = b.is_negative();
        let sign: Rat = if neg {
            Rat::from_integer((-1).into())
        } else {
            Rat::from_integer(1.into())
        };
        for j in 0..dim {
            t[i][j] = &sign * &a[j];
            t[i][dim + j] = -(&sign * &a[j]);
        }
        t[i][n + i] = sign.clone(); // slack (negated row keeps s coefficient ±1)
        t[i][cols - 1] = &sign * b;
        if neg {
            let ac = n + m + art_seen;
            t[i][ac] = Rat::from_integer(1.into());
            basis[i] = ac;
            art_seen += 1;
        } else {
            basis[i] = n + i;
        }
    }
    // Objective: minimize the sum of artificials. Start from unit costs on
    // the artificial columns, then price out the basic artificial rows.
    for c in n + m..cols - 1 {
        t[m][c] = Rat::from_integer(1.into());
    }
    for i in 0..m {
        if basis[i] >= n + m {
            let row = t[i].clone();
            for j in 0..cols {
                t[m][j] -= &row[j];
            }
        }
    }
    // Simplex with Bland's rule.
    loop {
        let Some(pivot_col) = (0..cols - 1).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut pivot_row = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if t[i][pivot_col].is_positive() {
                let ratio = &t[i][cols - 1] / &t[i][pivot_col];
                let better = match &best {
                    None => true,
                    Some(b) => &ratio < b || (&ratio == b && basis[i] < basis[pivot_row.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    pivot_row = Some(i);
                }
            }
        }
        let Some(pr) = pivot_row else {
            return None; // unbounded phase-1 cannot happen; treat as infeasible
        };
        let pv = t[pr][pivot_col].clone();
        for j in 0..cols {
            t[pr][j] = &t[pr][j] / &pv;
        }
        for i in 0..=m {
            if i != pr && !t[i][pivot_col].is_zero() {
                let f = t[i][pivot_col].clone();
                for j in 0..cols {
                    let s = &f * &t[pr][j];
                    t[i][j] = &t[i][j] - &s;
                }
            }
        }
        basis[pr] = pivot_col;
    }
    if t[m][cols - 1].is_zero() {
        let mut x = vec![Rat::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[i][cols - 1].clone();
            }
        }
        Some((0..dim).map(|j| &x[j] - &x[dim + j]).collect())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Separating λ
// ---------------------------------------------------------------------------

fn idot(a: &[BigInt], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .map(|(x, y)| Rat::from_integer(x.clone()) * y)
        .sum()
}

/// Strictly positive integer functional with `λ·β < 0` on `b_minus`,
/// `λ·β = 0` on `b_zero` and `λ·β > 0` on `b_plus`. Deterministic:
/// minimal ℓ1-norm, ties broken lexicographically.
pub fn separating_lambda(
    dim: usize,
    b_minus: &[Vec<Rat>],
    b_zero: &[Vec<Rat>],
    b_plus: &[Vec<Rat>],
) -> Result<Vec<BigInt>> {
    // Rational feasibility first: bounds the integer search.
    let one = Rat::from_integer(1.into());
    let mut cons: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for i in 0..dim {
        let mut a = vec![Rat::zero(); dim];
        a[i] = -one.clone();
        cons.push((a, -one.clone())); // λ_i >= 1
    }
    for b in b_minus {
        cons.push((b.clone(), -one.clone())); // λ·β <= -1
    }
    for b in b_plus {
        cons.push((b.iter().map(|x| -x.clone()).collect(), -one.clone())); // λ·β >= 1
    }
    for b in b_zero {
        cons.push((b.clone(), Rat::zero()));
        cons.push((b.iter().map(|x| -x.clone()).collect(), Rat::zero()));
    }
    let sol = lp_feasible_free(dim, &cons)
        .ok_or_else(|| Error::Infeasible("no separating functional exists".into()))?;
    // Integer bound: scale the rational solution by the lcm of denominators.
    let lcm = sol
        .iter()
        .fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let scaled: Vec<BigInt> = sol.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
    let cap: BigInt = scaled.iter().map(|x| x.abs()).sum();
    let cap_i64 = cap.to_string().parse::<i64>().unwrap_or(i64::MAX / 2);
    let check = |lam: &[BigInt]| -> bool {
        b_minus.iter().all(|b| idot(lam, b).is_negative())
            && b_zero.iter().all(|b| idot(lam, b).is_zero())
            && b_plus.iter().all(|b| idot(lam, b).is_positive())
    };
    let mut total = dim as i64;
    while total <= cap_i64.max(dim as i64) {
        if let Some(lam) = first_composition(dim, total, &check) {
            return Ok(lam);
        }
        total += 1;
    }
    Err(Error::Infeasible(
        "integer search exhausted below the LP bound".into(),
    ))
}

/// Lexicographically first composition of `total` into `dim` positive
/// parts passing the predicate.
fn first_composition(
    dim: usize,
    total: i64,
    check: &dyn Fn(&[BigInt]) -> bool,
) -> Option<Vec<BigInt>> {
    fn rec(
        dim: usize,
        left: i64,
        acc: &mut Vec<BigInt>,
        check: &dyn Fn(&[BigInt]) -> bool,
    ) -> Option<Vec<BigInt>> {
        if acc.len() == dim - 1 {
            if left >= 1 {
                acc.push(BigInt::from(left));
                if check(acc) {
                    return Some(acc.clone());
                }
                acc.pop();
            }
            return None;
        }
        let remaining_slots = (dim - acc.len() - 1) as i64;
        for v in 1..=(left - remaining_slots) {
            acc.push(BigInt::from(v));
            if let Some(hit) = rec(dim, left - v, acc, check) {
                return Some(hit);
            }
            acc.pop();
        }
        None
    }
    let mut acc = Vec::new();
    rec(dim, total, &mut acc, check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_int};

    fn rv(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn salient_with_nonpos_orthant() {
        // gens {(-1,2)} + nonpos orthant: salient.
        let c = build_cone(2, &[rv(&[-1, 2])], Orthant::NonPos).unwrap();
        assert!(c.is_salient);
        assert!(c.zero_face.is_empty());
        assert!(c.contains(&rv(&[-1, 2])));
        assert!(c.contains(&rv(&[-1, -1])));
        assert!(!c.contains(&rv(&[1, 1])));
        assert!(c.contains(&rv(&[0, -1])));
    }

    #[test]
    fn opposite_rays_not_salient() {
        let c = build_cone(2, &[rv(&[-1, 0]), rv(&[1, 0])], Orthant::None).unwrap();
        assert!(!c.is_salient);
        assert_eq!(c.zero_face.len(), 1);
    }

    #[test]
    fn zero_face_is_x_axis() {
        let c = build_cone(2, &[rv(&[1, 0]), rv(&[-1, 0]), rv(&[0, 1])], Orthant::None).unwrap();
        assert_eq!(c.zero_face.len(), 1);
        let z = &c.zero_face[0];
        assert!(z[1].is_zero() && !z[0].is_zero());
        assert!(c.in_zero_face(&rv(&[5, 0])));
        assert!(!c.in_zero_face(&rv(&[0, 1])));
    }

    #[test]
    fn orthants_intersect_trivially() {
        let neg = build_cone(2, &[], Orthant::NonPos).unwrap();
        let pos = build_cone(2, &[], Orthant::NonNeg).unwrap();
        let rep = intersect_trivially(&neg, &pos).unwrap();
        assert!(rep.trivial);
        match rep.certificate.unwrap() {
            TrivialityCertificate::Separator(l) => {
                for g in &neg.generators {
                    assert!(dot(&l, g).is_negative());
                }
                for g in &pos.generators {
                    assert!(dot(&l, g).is_positive());
                }
            }
            other => panic!("expected separator, got {other:?}"),
        }
    }

    #[test]
    fn separated_cones_with_certificate() {
        let c1 = build_cone(
            2,
            &[rv(&[-1, 2]), rv(&[-1, 0]), rv(&[0, -1])],
            Orthant::None,
        )
        .unwrap();
        let c2 = build_cone(2, &[rv(&[1, 0]), rv(&[0, 1]), rv(&[2, -1])], Orthant::None).unwrap();
        let rep = intersect_trivially(&c1, &c2).unwrap();
        assert!(rep.trivial, "witness: {:?}", rep.witness);
        assert!(matches!(
            rep.certificate,
            Some(TrivialityCertificate::Separator(_))
        ));
    }

    #[test]
    fn shared_boundary_ray_witness() {
        // cone{(-1,2)}+nonpos vs nonneg+{(0,-1)}: share the ray (0,-1).
        let c1 = build_cone(2, &[rv(&[-1, 2])], Orthant::NonPos).unwrap();
        let c2 = build_cone(2, &[rv(&[0, -1])], Orthant::NonNeg).unwrap();
        let rep = intersect_trivially(&c1, &c2).unwrap();
        assert!(!rep.trivial);
        let w = rep.witness.unwrap();
        assert!(c1.contains(&w) && c2.contains(&w));
        assert!(w.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn lambda_examples() {
        // Minimal ℓ1 solution with the required signs is (3,1).
        let l = separating_lambda(2, &[rv(&[-1, 2])], &[], &[rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(l, vec![BigInt::from(3), BigInt::from(1)]);
        // Unconstrained: (1,1).
        let l = separating_lambda(2, &[], &[], &[]).unwrap();
        assert_eq!(l, vec![BigInt::from(1), BigInt::from(1)]);
        // Zero set forces equal components.
        let l = separating_lambda(2, &[rv(&[-2, 1])], &[rv(&[1, -1])], &[]).unwrap();
        assert_eq!(l, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn lambda_infeasible() {
        // β and -β both required negative: impossible.
        let r = separating_lambda(2, &[rv(&[1, 0]), rv(&[-1, 0])], &[], &[]);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    fn random_cone(state: &mut u64, dim: usize) -> RationalCone {
        let mut rnd = || {
            *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*state >> 33) as i64 % 17) - 8
        };
        let count = 1 + (rnd().unsigned_abs() as usize % 5);
        let gens: Vec<Vec<Rat>> = (0..count)
            .map(|_| (0..dim).map(|_| rat_int(rnd())).collect())
            .collect();
        let orthant = match rnd().rem_euclid(3) {
            0 => Orthant::None,
            1 => Orthant::NonNeg,
            _ => Orthant::NonPos,
        };
        build_cone(dim, &gens, orthant).unwrap()
    }

    #[test]
    fn double_description_round_trip() {
        let mut state = 42u64;
        for case in 0..200 {
            let dim = 2 + (case % 3);
            let c = random_cone(&mut state, dim);
            // facets -> generators and compare by mutual inclusion.
            let v = c.regenerate();
            for r in &v.rays {
                assert!(c.contains(r), "case {case}: regenerated ray escapes");
            }
            for l in &v.lineality {
                assert!(c.contains(l), "case {case}");
                assert!(
                    c.contains(&l.iter().map(|x| -x.clone()).collect::<Vec<_>>()),
                    "case {case}"
                );
            }
            // Every original generator must be recoverable: rebuild from
            // the regenerated rays and lineality and compare as sets.
            let mut gens2 = v.rays.clone();
            for l in &v.lineality {
                gens2.push(l.clone());
                gens2.push(l.iter().map(|x| -x.clone()).collect());
            }
            let c2 = build_cone(dim, &gens2, Orthant::None).unwrap();
            assert!(c.same_cone(&c2), "case {case}: round trip changed the cone");
        }
    }

    #[test]
    fn salience_matches_negation_test() {
        let mut state = 7u64;
        for case in 0..60 {
            let dim = 2 + (case % 3);
            let c = random_cone(&mut state, dim);
            let neg = build_cone(
                dim,
                &c.generators
                    .iter()
                    .map(|g| g.iter().map(|x| -x.clone()).collect())
                    .collect::<Vec<_>>(),
                Orthant::None,
            )
            .unwrap();
            let rep = intersect_trivially(&c, &neg).unwrap();
            assert_eq!(c.is_salient, rep.trivial, "case {case}");
        }
    }

    #[test]
    fn lambda_matches_exhaustive_search() {
        let mut state = 11u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(99);
            ((state >> 33) as i64 % 9) - 4
        };
        for case in 0..60 {
            let dim = 2 + (case % 2);
            let minus: Vec<Vec<Rat>> = (0..2)
                .map(|_| {
                    let mut v: Vec<Rat> = (0..dim).map(|_| rat_int(rnd())).collect();
                    // Make feasibility likely: force a negative entry.
                    v[0] = rat_int(-(1 + rnd().abs()));
                    v
                })
                .collect();
            let plus: Vec<Vec<Rat>> = (0..2)
                .map(|_| (0..dim).map(|_| rat_int(rnd().abs())).collect())
                .collect();
            let plus: Vec<Vec<Rat>> = plus
                .into_iter()
                .filter(|v| v.iter().any(|x| !x.is_zero()))
                .collect();
            match separating_lambda(dim, &minus, &[], &plus) {
                Ok(lam) => {
                    // Exhaustive check over ||λ||_1 <= 20.
                    let found = exhaustive_min(dim, 20, &|l: &[BigInt]| {
                        minus.iter().all(|b| idot(l, b).is_negative())
                            && plus.iter().all(|b| idot(l, b).is_positive())
                    });
                    let lam_l1: BigInt = lam.iter().map(|x| x.abs()).sum();
                    let found = found.expect("exhaustive search must agree on feasibility");
                    let found_l1: BigInt = found.iter().map(|x| x.abs()).sum();
                    if lam_l1 <= BigInt::from(20) {
                        assert_eq!(lam, found, "case {case}");
                        assert_eq!(lam_l1, found_l1);
                    }
                }
                Err(Error::Infeasible(_)) => {
                    let found = exhaustive_min(dim, 20, &|l: &[BigInt]| {
                        minus.iter().all(|b| idot(l, b).is_negative())
                            && plus.iter().all(|b| idot(l, b).is_positive())
                    });
                    assert!(found.is_none(), "case {case}: LP missed a solution");
                }
                Err(e) => panic!("case {case}: {e}"),
            }
        }
    }

    fn exhaustive_min(
        dim: usize,
        cap: i64,
        check: &dyn Fn(&[BigInt]) -> bool,
    ) -> Option<Vec<BigInt>> {
        for total in dim as i64..=cap {
            if let Some(l) = first_composition(dim, total, check) {
                return Some(l);
            }
        }
        None
    }

    #[test]
    fn lp_simple_feasibility() {
        // x <= -1 and -x <= -2 -> x <= -1, x >= 2: infeasible.
        let infeasible = lp_feasible_free(
            1,
            &[
                (vec![rat_int(1)], rat_int(-1)),
                (vec![rat_int(-1)], rat_int(-2)),
            ],
        );
        assert!(infeasible.is_none());
        let feasible = lp_feasible_free(
            2,
            &[
                (vec![rat_int(1), rat_int(1)], rat_int(-3)),
                (vec![rat_int(-1), rat_int(0)], rat_int(10)),
            ],
        )
        .unwrap();
        assert!(&feasible[0] + &feasible[1] <= rat(-3, 1));
    }
}
