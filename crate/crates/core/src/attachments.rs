//! Dual vectors, heights, attached hyperplanes and attached lines for a
//! pair (ball, rational point).
//!
//! `a⁺(B,P) = (a, b)` minimizes `ξ = max{‖a‖∞, |b + z_B·a|}` over the
//! admissible set `{(a,b) ≠ 0 : a·p + bs ≡ 0 (mod q), ‖a‖∞ ≤ q^λ,
//! |b + z_B·a| ≤ q^μ + ρ(B)^{1/2}}`. Ties are broken lexicographically on
//! `(a_1, …, a_{d−1}, b)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::diophantine::{RationalPoint, Weight};
use crate::error::{Error, Result};
use crate::exact::{ceil, floor, fmt_rational, sup_norm, Ball, LinComb, PowerTerm, Radical, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualVector {
    pub a: Vec<BigInt>,
    pub b: BigInt,
    pub xi: Rational,
}

/// Integer form of `F_{B,P}(w) = a·w_x + b·w_y − C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachedHyperplane {
    pub a: Vec<BigInt>,
    pub b: BigInt,
    pub c: BigInt,
}

/// `v⁺(B,P) = (v, u) ∈ Λ_P`, stored with its representation
/// `(v, u) = c·(p/q, s/q) + (c_1, …, c_{d−1}, c_d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinePoint {
    pub v: Vec<Rational>,
    pub u: Rational,
    pub c: BigInt,
    pub shift: Vec<BigInt>,
}

fn rat(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

fn dot(a: &[BigInt], z: &[Rational]) -> Rational {
    a.iter().zip(z).map(|(ai, zi)| rat(ai) * zi).sum()
}

/// `⌊q^(m/w)⌋` for `m ≥ 0` by integer root isolation.
pub fn floor_power(q: &BigInt, e: &Rational) -> BigInt {
    let m = e.numer().to_u32().expect("nonnegative exponent");
    let w = e.denom().to_u32().expect("root index fits u32");
    num_traits::pow::pow(q.clone(), m as usize).nth_root(w)
}

/// Integers in `[center − width, center + width]` ordered by distance from
/// `center`, the smaller integer first on ties.
pub(crate) fn center_out(center: &Rational, width: &Rational) -> Vec<BigInt> {
    let lo = ceil(&(center - width));
    let hi = floor(&(center + width));
    let mut v = Vec::new();
    let mut n = lo;
    while n <= hi {
        v.push(n.clone());
        n += 1;
    }
    v.sort_by(|x, y| {
        let dx = (rat(x) - center).abs();
        let dy = (rat(y) - center).abs();
        dx.cmp(&dy).then(x.cmp(y))
    });
    v
}

fn check(ball: &Ball, point: &RationalPoint, w: &Weight) -> Result<()> {
    if ball.dim() != w.space_dim() {
        return Err(Error::DimensionMismatch { expected: w.space_dim(), got: ball.dim() });
    }
    if point.d() != w.d {
        return Err(Error::DimensionMismatch { expected: w.d, got: point.d() });
    }
    if !point.is_reduced() {
        return Err(Error::InvalidParameter("rational point must be reduced".into()));
    }
    Ok(())
}

/// Computes `a⁺(B,P)` and `ξ(B,P)`.
pub fn dual_search(ball: &Ball, point: &RationalPoint, w: &Weight) -> Result<DualVector> {
    check(ball, point, w)?;
    let q = &point.q;
    let zb = ball.z();
    let amax = floor_power(q, &w.lambda);
    let qmu = Radical::of_int(q, &w.mu);
    let b_width = qmu.bounds(32).1 + &ball.sigma;
    let n = w.d - 1;
    // b·s ≡ −a·p (mod q) has solutions iff g | a·p, forming one class mod q/g
    let g = point.s.gcd(q);
    let modulus = q / &g;
    let s_inv = (&point.s / &g).extended_gcd(&modulus).x.mod_floor(&modulus);

    let mut best: Option<DualVector> = None;
    let mut a: Vec<BigInt> = vec![-amax.clone(); n];
    loop {
        let anorm = a.iter().map(|x| x.abs()).max().expect("d >= 2");
        let skip = best.as_ref().is_some_and(|bv| rat(&anorm) > bv.xi);
        if !skip {
            let zdot = dot(&a, zb);
            let ap: BigInt = a.iter().zip(&point.p).map(|(x, y)| x * y).sum();
            let width = match &best {
                Some(bv) if bv.xi < b_width => bv.xi.clone(),
                _ => b_width.clone(),
            };
            let blo = ceil(&(-&zdot - &width));
            let bhi = floor(&(-&zdot + &width));
            let (quot, rem) = (-&ap).div_mod_floor(&g);
            let mut b = if rem.is_zero() {
                let class = (quot * &s_inv).mod_floor(&modulus);
                &blo + (class - &blo).mod_floor(&modulus)
            } else {
                &bhi + 1
            };
            while b <= bhi {
                let resid = (rat(&b) + &zdot).abs();
                let nonzero = !b.is_zero() || !anorm.is_zero();
                let admissible = nonzero
                    && LinComb::rational(resid.clone())
                        .sub(&LinComb::rational(ball.sigma.clone()))
                        .sub(&LinComb::term(Rational::from_integer(1.into()), qmu.clone()))
                        .sign()
                        != Ordering::Greater;
                if admissible {
                    let xi = std::cmp::max(rat(&anorm), resid);
                    if best.as_ref().is_none_or(|bv| xi < bv.xi) {
                        best = Some(DualVector { a: a.clone(), b: b.clone(), xi });
                    }
                }
                b += &modulus;
            }
        }
        // next a in lexicographic order
        let mut k = n;
        loop {
            if k == 0 {
                return best.ok_or_else(|| {
                    Error::Invariant("admissible dual set is empty (Minkowski bound violated)".into())
                });
            }
            k -= 1;
            if a[k] < amax {
                a[k] += 1;
                for x in a.iter_mut().skip(k + 1) {
                    *x = -amax.clone();
                }
                break;
            }
        }
    }
}

/// `H_B(P) = q(P) ξ(B,P)`.
pub fn height(ball: &Ball, point: &RationalPoint, w: &Weight) -> Result<Rational> {
    Ok(rat(&point.q) * dual_search(ball, point, w)?.xi)
}

pub fn attached_hyperplane(dual: &DualVector, point: &RationalPoint) -> Result<AttachedHyperplane> {
    let num: BigInt = dual.a.iter().zip(&point.p).map(|(x, y)| x * y).sum::<BigInt>() + &dual.b * &point.s;
    let (c, r) = num.div_rem(&point.q);
    if !r.is_zero() {
        return Err(Error::Invariant("C(B,P) is not an integer".into()));
    }
    Ok(AttachedHyperplane { a: dual.a.clone(), b: dual.b.clone(), c })
}

impl AttachedHyperplane {
    /// `F(w) = a·w_x + b·w_y − C` for `w ∈ Q^d`.
    pub fn eval(&self, wpt: &[Rational]) -> Result<Rational> {
        if wpt.len() != self.a.len() + 1 {
            return Err(Error::DimensionMismatch { expected: self.a.len() + 1, got: wpt.len() });
        }
        let n = self.a.len();
        Ok(dot(&self.a, &wpt[..n]) + rat(&self.b) * &wpt[n] - rat(&self.c))
    }
}

/// `functional_eval`: exact value of the attached functional.
pub fn functional_eval(h: &AttachedHyperplane, wpt: &[Rational]) -> Result<Rational> {
    h.eval(wpt)
}

/// Computes `v⁺(B,P)` with `‖v − u z_B‖∞ ≤ 2d q^{−λ}` and
/// `|u| ≤ 2d ξ q^{−λ−μ}`.
pub fn attach_line(ball: &Ball, point: &RationalPoint, w: &Weight) -> Result<LinePoint> {
    let dual = dual_search(ball, point, w)?;
    attach_line_with(ball, point, w, &dual.xi)
}

pub fn attach_line_with(ball: &Ball, point: &RationalPoint, w: &Weight, xi: &Rational) -> Result<LinePoint> {
    check(ball, point, w)?;
    let q = &point.q;
    let zb = ball.z();
    let two_d = Rational::from_integer(BigInt::from(2 * w.d));
    let u_bound = PowerTerm::new(&two_d * xi, Radical::of_int(q, &-(&w.lambda + &w.mu)));
    let v_bound = PowerTerm::new(two_d, Radical::of_int(q, &-&w.lambda));
    let uw = u_bound.upper_bound(32);
    let vw = v_bound.upper_bound(32);
    let mut c = BigInt::zero();
    while &c < q {
        let su = Rational::new(&c * &point.s, q.clone());
        for cd in center_out(&-&su, &uw) {
            let u = &su + rat(&cd);
            if PowerTerm::new(u.abs(), Radical::of_int(q, &Rational::zero())).cmp_term(&u_bound) == Ordering::Greater {
                continue;
            }
            let bases: Vec<Rational> = point.p.iter().map(|pi| Rational::new(&c * pi, q.clone())).collect();
            let ranges: Vec<Vec<BigInt>> = bases
                .iter()
                .zip(zb)
                .map(|(bi, zi)| center_out(&(&u * zi - bi), &vw))
                .collect();
            if ranges.iter().any(|r| r.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; ranges.len()];
            'combo: loop {
                let shift: Vec<BigInt> = idx.iter().zip(&ranges).map(|(&i, r)| r[i].clone()).collect();
                let v: Vec<Rational> = bases.iter().zip(&shift).map(|(b, s)| b + rat(s)).collect();
                let dev: Vec<Rational> = v.iter().zip(zb).map(|(vi, zi)| vi - &u * zi).collect();
                let nonzero = !u.is_zero() || v.iter().any(|x| !x.is_zero());
                if nonzero && PowerTerm::rational(sup_norm(&dev)).cmp_term(&v_bound) != Ordering::Greater {
                    let mut full = shift;
                    full.push(cd.clone());
                    return Ok(LinePoint { v, u, c, shift: full });
                }
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < ranges[k].len() {
                        continue 'combo;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        c += 1;
    }
    Err(Error::Invariant("no attached line direction found".into()))
}

impl LinePoint {
    /// `q·(v,u) − c·(p,s) ∈ q Z^d`.
    pub fn in_lattice(&self, point: &RationalPoint) -> bool {
        let q = rat(&point.q);
        let c = rat(&self.c);
        self.v
            .iter()
            .chain(std::iter::once(&self.u))
            .zip(point.p.iter().chain(std::iter::once(&point.s)))
            .all(|(x, a)| {
                let diff = &q * x - &c * rat(a);
                diff.is_integer() && diff.to_integer().mod_floor(&point.q).is_zero()
            })
    }
}

/// JSON record printed by `schmidt attach`.
#[derive(Serialize)]
pub struct AttachReport {
    pub a: Vec<String>,
    pub b: String,
    pub xi: String,
    #[serde(rename = "H")]
    pub height: String,
    #[serde(rename = "C")]
    pub c_const: String,
    pub v: Vec<String>,
    pub u: String,
    pub c: String,
}

pub fn attach_report(ball: &Ball, point: &RationalPoint, w: &Weight) -> Result<AttachReport> {
    let dual = dual_search(ball, point, w)?;
    let h = attached_hyperplane(&dual, point)?;
    let line = attach_line_with(ball, point, w, &dual.xi)?;
    Ok(AttachReport {
        a: dual.a.iter().map(|x| x.to_string()).collect(),
        b: dual.b.to_string(),
        xi: fmt_rational(&dual.xi),
        height: fmt_rational(&(rat(&point.q) * &dual.xi)),
        c_const: h.c.to_string(),
        v: line.v.iter().map(fmt_rational).collect(),
        u: fmt_rational(&line.u),
        c: line.c.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat as r};

    fn ball_z(z: (i64, i64), rho: (i64, i64)) -> Ball {
        Ball::new(vec![r(0, 1), r(0, 1), r(z.0, z.1)], r(rho.0, rho.1)).unwrap()
    }

    fn half() -> RationalPoint {
        RationalPoint::reduce(vec![int(1)], int(1), int(2)).unwrap()
    }

    #[test]
    fn dual_for_half() {
        let w = Weight::uniform(2);
        let dv = dual_search(&ball_z((0, 1), (1, 100)), &half(), &w).unwrap();
        assert_eq!((dv.a[0].clone(), dv.b.clone(), dv.xi.clone()), (int(-1), int(-1), r(1, 1)));
        assert_eq!(height(&ball_z((0, 1), (1, 100)), &half(), &w).unwrap(), r(2, 1));
    }

    #[test]
    fn dual_for_origin() {
        let w = Weight::new(2, r(2, 3), r(1, 3)).unwrap();
        let o = RationalPoint::reduce(vec![int(0)], int(0), int(1)).unwrap();
        let dv = dual_search(&ball_z((0, 1), (1, 100)), &o, &w).unwrap();
        assert_eq!(dv.xi, r(1, 1));
        assert_eq!(height(&ball_z((0, 1), (1, 100)), &o, &w).unwrap(), r(1, 1));
    }

    #[test]
    fn hyperplane_for_half() {
        let w = Weight::uniform(2);
        let dv = dual_search(&ball_z((0, 1), (1, 100)), &half(), &w).unwrap();
        let h = attached_hyperplane(&dv, &half()).unwrap();
        assert_eq!(h.c, int(-1));
        assert_eq!(h.eval(&half().coords()).unwrap(), r(0, 1));
        assert_eq!(h.eval(&[r(0, 1), r(0, 1)]).unwrap(), r(1, 1));
    }

    #[test]
    fn line_for_origin_and_half() {
        let w = Weight::uniform(2);
        let o = RationalPoint::reduce(vec![int(0)], int(0), int(1)).unwrap();
        let lp = attach_line(&ball_z((0, 1), (1, 100)), &o, &w).unwrap();
        assert_eq!((lp.v[0].clone(), lp.u.clone()), (r(-1, 1), r(0, 1)));
        let lh = attach_line(&ball_z((0, 1), (1, 100)), &half(), &w).unwrap();
        assert!(lh.in_lattice(&half()));
        assert!(lh.u.abs() <= r(2, 1));
    }

    #[test]
    fn center_out_order() {
        let v = center_out(&r(1, 3), &r(2, 1));
        assert_eq!(v, vec![int(0), int(1), int(-1), int(2)]);
    }

    #[test]
    fn floor_powers() {
        assert_eq!(floor_power(&int(60), &r(1, 2)), int(7));
        assert_eq!(floor_power(&int(8), &r(2, 3)), int(4));
        assert_eq!(floor_power(&int(1), &r(1, 3)), int(1));
    }
}
