//! Integer-relation detection for rational saturation and certified
//! reconstruction.
//!
//! A textbook LLL reduction over exact rational Gram-Schmidt data, plus the
//! embedding that turns "find integer m with m . x ~ 0 for these ball
//! vectors" into a short-vector problem. Relations found numerically are
//! only accepted when the residual ball still contains zero and is small
//! relative to the working precision; certified-nonzero residuals reject a
//! candidate outright.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ball::{Dyadic, RealBall};
use crate::exact::Rat;
use crate::linalg::RVec;
use crate::mat::Mat;
use crate::{Error, Result};

/// Lovász parameter 3/4.
fn delta() -> Rat {
    crate::exact::rat(3, 4)
}


/// LLL reduction of an integer lattice basis (rows).
pub fn lll_reduce(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    if n == 0 {
        return basis;
    }
    // Rational Gram-Schmidt, recomputed as rows change. Sizes here are tiny
    // (a handful of rows), so the quadratic recomputation is fine.
    fn gram(basis: &[Vec<BigInt>]) -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let n = basis.len();
        let mut mu = vec![vec![Rat::zero(); n]; n];
        let mut b_star: Vec<Vec<Rat>> = Vec::with_capacity(n);
        let mut norms = vec![Rat::zero(); n];
        for i in 0..n {
            let mut v: Vec<Rat> = basis[i]
                .iter()
                .map(|x| Rat::from_integer(x.clone()))
                .collect();
            for j in 0..i {
                let num: Rat = basis[i]
                    .iter()
                    .zip(&b_star[j])
                    .map(|(x, y)| Rat::from_integer(x.clone()) * y)
                    .sum();
                let m = if norms[j].is_zero() {
                    Rat::zero()
                } else {
                    num / &norms[j]
                };
                mu[i][j] = m.clone();
                for (vk, bk) in v.iter_mut().zip(&b_star[j]) {
                    *vk -= &m * bk;
                }
            }
            norms[i] = v.iter().map(|x| x * x).sum();
            b_star.push(v);
        }
        (mu, norms)
    }

    let mut k = 1;
    let (mut mu, mut norms) = gram(&basis);
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 10_000 {
            break; // degenerate input; return best effort
        }
        // Size reduction.
        for j in (0..k).rev() {
            let half = crate::exact::rat(1, 2);
            if mu[k][j].abs() > half {
                let q = round_rat(&mu[k][j]);
                if !q.is_zero() {
                    for t in 0..basis[k].len() {
                        let s = &q * &basis[j][t];
                        basis[k][t] = &basis[k][t] - s;
                    }
                    let (m2, n2) = gram(&basis);
                    mu = m2;
                    norms = n2;
                }
            }
        }
        // Lovász condition.
        let lhs = &norms[k];
        let rhs = (delta() - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let (m2, n2) = gram(&basis);
            mu = m2;
            norms = n2;
            k = k.max(2) - 1;
            if k == 0 {
                k = 1;
            }
        }
    }
    basis
}

fn round_rat(r: &Rat) -> BigInt {
    let two = BigInt::from(2);
    let (n, d) = (r.numer().clone(), r.denom().clone());
    // round half away from zero
    let doubled = &n * &two + if n.is_negative() { -d.clone() } else { d.clone() };
    doubled / (d * two)
}

/// Truncate `d * 2^s` to an integer.
pub fn dyadic_scaled_int(d: &Dyadic, s: i64) -> BigInt {
    if d.is_zero() {
        return BigInt::zero();
    }
    let e = d.exp + s;
    if e >= 0 {
        &d.man << e as u64
    } else {
        &d.man >> (-e) as u64
    }
}

fn ball_dot_int(m: &[BigInt], xs: &[RealBall]) -> RealBall {
    let prec = xs.first().map_or(64, |x| x.prec);
    let mut acc = RealBall::zero(prec);
    for (c, x) in m.iter().zip(xs) {
        if c.is_zero() {
            continue;
        }
        let term = x.mul_rat(&Rat::from_integer(c.clone()));
        acc = acc.add(&term);
    }
    acc
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &v {
        g = g.gcd(x);
    }
    if !g.is_zero() && g != BigInt::from(1) {
        for x in &mut v {
            *x /= &g;
        }
    }
    // Fix sign: first non-zero entry positive.
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut v {
                *x = -x.clone();
            }
        }
    }
    v
}

/// Spanning set of the space of integer relations `m` with `m . v = 0` for
/// every exact generator and (up to certification) every ball generator.
///
/// Relations beyond the height bound are treated as absent, which can only
/// make the resulting saturation larger.
pub fn common_relations(
    frame_dim: usize,
    exact_coords: &[RVec],
    ball_coords: &[Vec<RealBall>],
    height_bound: i64,
) -> Result<Vec<Vec<BigInt>>> {
    // Exact constraints first: m lies in the rational kernel of the exact
    // generator matrix.
    let w_basis: Vec<Vec<BigInt>> = if exact_coords.is_empty() {
        (0..frame_dim)
            .map(|i| {
                let mut v = vec![BigInt::zero(); frame_dim];
                v[i] = BigInt::from(1);
                v
            })
            .collect()
    } else {
        let m = Mat::from_rows(exact_coords.to_vec());
        let kern = m.kernel();
        kern.rows_iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
                primitive(
                    row.iter()
                        .map(|r| r.numer() * (&lcm / r.denom()))
                        .collect(),
                )
            })
            .collect()
    };
    if w_basis.is_empty() {
        return Ok(vec![]);
    }
    if ball_coords.is_empty() {
        return Ok(w_basis);
    }
    let prec = ball_coords
        .iter()
        .flat_map(|v| v.iter().map(|x| x.prec))
        .max()
        .unwrap_or(crate::DEFAULT_PREC);
    let scale = (prec / 2) as i64;
    let wn = w_basis.len();
    // Embedding rows: (c_j coordinates | scaled images of the ball dots).
    let mut rows = Vec::with_capacity(wn);
    for (j, w) in w_basis.iter().enumerate() {
        let mut row = vec![BigInt::zero(); wn + ball_coords.len()];
        row[j] = BigInt::from(1);
        for (t, x) in ball_coords.iter().enumerate() {
            let d = ball_dot_int(w, x);
            row[wn + t] = dyadic_scaled_int(&d.mid, scale);
        }
        rows.push(row);
    }
    let reduced = lll_reduce(rows);
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    let image_cut = BigInt::from(1) << (scale as u64 / 2);
    'cand: for row in &reduced {
        let c = &row[..wn];
        if c.iter().all(|x| x.is_zero()) {
            continue;
        }
        if row[wn..].iter().any(|x| x.abs() > image_cut) {
            continue;
        }
        // m = sum c_j w_j
        let mut m = vec![BigInt::zero(); frame_dim];
        for (cj, w) in c.iter().zip(&w_basis) {
            for (mi, wi) in m.iter_mut().zip(w) {
                *mi += cj * wi;
            }
        }
        let m = primitive(m);
        if m.iter().any(|x| x.abs() > BigInt::from(height_bound)) {
            continue;
        }
        // Certified screening of the candidate.
        for x in ball_coords {
            let d = ball_dot_int(&m, x);
            if d.definitely_nonzero() {
                continue 'cand;
            }
            let h: f64 = m.iter().map(|c| c.to_f64().unwrap_or(1e18).abs()).sum();
            let tol = 2f64.powi(-((prec / 4) as i32)) * (1.0 + h);
            if d.rad_f64().max(d.mid_f64().abs()) > tol {
                return Err(Error::CertificationFailure(format!(
                    "integer relation {m:?} undecidable at precision {prec}"
                )));
            }
        }
        relations.push(m);
    }
    // Keep an independent subset for a stable answer.
    relations.sort();
    relations.dedup();
    Ok(independent_subset(relations, frame_dim))
}

fn independent_subset(rels: Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    let mut kept: Vec<Vec<BigInt>> = Vec::new();
    for r in rels {
        let mut rows: Vec<Vec<Rat>> = kept
            .iter()
            .map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect();
        rows.push(r.iter().map(|x| Rat::from_integer(x.clone())).collect());
        let m = Mat::from_rows(rows);
        if m.rank() == kept.len() + 1 {
            kept.push(r);
        }
        if kept.len() == dim {
            break;
        }
    }
    kept
}
