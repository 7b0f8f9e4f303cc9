use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{exact_sqrt, fmt_rational, sup_norm, Rational};
use crate::error::{Error, Result};

/// Closed sup-norm ball in `R^{2d-1}`, coordinates ordered `(x, y, z)`.
///
/// The radius is stored together with its rational square root so that
/// `rho^(1/2)` enters admissibility bounds exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    #[serde(with = "crate::serde_util::rational_vec")]
    pub center: Vec<Rational>,
    #[serde(with = "crate::serde_util::rational")]
    pub rho: Rational,
    #[serde(with = "crate::serde_util::rational")]
    pub sigma: Rational,
}

impl Ball {
    /// Ball of radius `sigma^2`.
    pub fn from_sqrt_radius(center: Vec<Rational>, sigma: Rational) -> Result<Self> {
        if !sigma.is_positive() {
            return Err(Error::InvalidParameter("radius must be positive".into()));
        }
        if center.len() % 2 == 0 || center.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "center must have odd dimension 2d-1 >= 3, got {}",
                center.len()
            )));
        }
        let rho = &sigma * &sigma;
        Ok(Ball { center, rho, sigma })
    }

    pub fn new(center: Vec<Rational>, rho: Rational) -> Result<Self> {
        let sigma = exact_sqrt(&rho).ok_or_else(|| Error::NonSquareRadius(fmt_rational(&rho)))?;
        Ball::from_sqrt_radius(center, sigma)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// The `d` of `R^{2d-1}`.
    pub fn d(&self) -> usize {
        self.center.len().div_ceil(2)
    }

    pub fn x(&self) -> &[Rational] {
        &self.center[..self.d() - 1]
    }

    pub fn y(&self) -> &Rational {
        &self.center[self.d() - 1]
    }

    pub fn z(&self) -> &[Rational] {
        &self.center[self.d()..]
    }

    /// Closed coordinate range `[c_i - rho, c_i + rho]`.
    pub fn range(&self, i: usize) -> (Rational, Rational) {
        (&self.center[i] - &self.rho, &self.center[i] + &self.rho)
    }

    pub fn contains(&self, p: &[Rational]) -> Result<bool> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        Ok(p.iter()
            .zip(&self.center)
            .all(|(a, c)| (a - c).abs() <= self.rho))
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Ball) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let diff: Vec<Rational> = self.center.iter().zip(&other.center).map(|(a, b)| a - b).collect();
        sup_norm(&diff) + &self.rho <= other.rho
    }

    /// True iff no point of the ball lies in the open neighborhood.
    pub fn avoids(&self, nbhd: &HyperplaneNbhd) -> bool {
        if nbhd.normal.len() != self.dim() {
            return false;
        }
        let n1: BigInt = nbhd.normal.iter().map(|a| a.abs()).sum();
        let gap = nbhd.signed_residual(&self.center).abs() - &self.rho * Rational::from_integer(n1);
        if gap.is_negative() {
            return false;
        }
        let n2 = Rational::from_integer(nbhd.normal_norm_sq());
        &gap * &gap >= &nbhd.delta * &nbhd.delta * n2
    }
}

/// Open Euclidean `delta`-neighborhood of `{p : normal·p = offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneNbhd {
    #[serde(with = "crate::serde_util::bigint_vec")]
    pub normal: Vec<BigInt>,
    #[serde(with = "crate::serde_util::bigint")]
    pub offset: BigInt,
    #[serde(with = "crate::serde_util::rational")]
    pub delta: Rational,
}

impl HyperplaneNbhd {
    pub fn new(normal: Vec<BigInt>, offset: BigInt, delta: Rational) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::InvalidParameter("hyperplane normal is zero".into()));
        }
        if !delta.is_positive() {
            return Err(Error::InvalidParameter("neighborhood width must be positive".into()));
        }
        Ok(HyperplaneNbhd { normal, offset, delta })
    }

    /// Slab around the hyperplane with integer direction `normal` passing
    /// through a rational point; the normal is rescaled to clear denominators.
    pub fn through_point(normal: &[BigInt], point: &[Rational], delta: Rational) -> Result<Self> {
        if normal.len() != point.len() {
            return Err(Error::DimensionMismatch { expected: normal.len(), got: point.len() });
        }
        let value: Rational = normal
            .iter()
            .zip(point)
            .map(|(a, p)| Rational::from_integer(a.clone()) * p)
            .sum();
        let den = value.denom().clone();
        let normal = normal.iter().map(|a| a * &den).collect();
        HyperplaneNbhd::new(normal, value.numer().clone(), delta)
    }

    pub fn signed_residual(&self, p: &[Rational]) -> Rational {
        let dot: Rational = self
            .normal
            .iter()
            .zip(p)
            .map(|(a, x)| Rational::from_integer(a.clone()) * x)
            .sum();
        dot - Rational::from_integer(self.offset.clone())
    }

    pub fn normal_norm_sq(&self) -> BigInt {
        self.normal.iter().map(|a| a * a).sum()
    }

    /// Strict membership: squared distance below `delta^2`.
    pub fn contains(&self, p: &[Rational]) -> bool {
        if p.len() != self.normal.len() {
            return false;
        }
        let r = self.signed_residual(p);
        &r * &r < &self.delta * &self.delta * Rational::from_integer(self.normal_norm_sq())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn ball(c: &[(i64, i64)], rho: (i64, i64)) -> Ball {
        Ball::new(c.iter().map(|&(n, d)| rat(n, d)).collect(), rat(rho.0, rho.1)).unwrap()
    }

    #[test]
    fn contains_examples() {
        let b = ball(&[(0, 1), (0, 1), (0, 1)], (1, 1));
        assert!(b.contains(&[rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap());
        assert!(b.contains(&[rat(1, 1), rat(1, 1), rat(1, 1)]).unwrap());
        assert!(!b.contains(&[rat(1, 1), rat(0, 1), rat(9, 8)]).unwrap());
        assert!(b.contains(&[rat(1, 1)]).is_err());
    }

    #[test]
    fn subset_examples() {
        let big = ball(&[(0, 1), (0, 1), (0, 1)], (1, 1));
        assert!(big.is_subset_of(&big));
        assert!(ball(&[(1, 2), (0, 1), (0, 1)], (1, 4)).is_subset_of(&big));
        assert!(!ball(&[(7, 8), (0, 1), (0, 1)], (1, 4)).is_subset_of(&big));
    }

    #[test]
    fn avoid_examples() {
        let l = HyperplaneNbhd::new(vec![int(1), int(0), int(0)], int(0), rat(1, 4)).unwrap();
        assert!(half_box(&[(1, 1), (0, 1), (0, 1)]).avoids(&l));
        assert!(!half_box(&[(0, 1), (0, 1), (0, 1)]).avoids(&l));
        let l3 = HyperplaneNbhd::new(vec![int(1), int(1), int(1)], int(3), rat(1, 10)).unwrap();
        assert!(!ball(&[(1, 1), (1, 1), (1, 1)], (1, 10000)).avoids(&l3));
    }

    // rho = 1/2 is not a rational square, but avoidance only reads the box.
    fn half_box(c: &[(i64, i64)]) -> Ball {
        let mut b = ball(c, (1, 4));
        b.rho = rat(1, 2);
        b
    }

    #[test]
    fn through_point_scales_normal() {
        let l = HyperplaneNbhd::through_point(
            &[int(1), int(0), int(0)],
            &[rat(1, 3), rat(0, 1), rat(0, 1)],
            rat(1, 10),
        )
        .unwrap();
        assert_eq!(l.normal[0], int(3));
        assert!(l.contains(&[rat(1, 3), rat(5, 1), rat(0, 1)]));
        assert!(!l.contains(&[rat(1, 3) + rat(1, 10), rat(0, 1), rat(0, 1)]));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Ball::new(vec![rat(0, 1); 3], rat(1, 2)).is_err());
        assert!(Ball::new(vec![rat(0, 1); 2], rat(1, 4)).is_err());
        assert!(HyperplaneNbhd::new(vec![int(0); 3], int(1), rat(1, 2)).is_err());
    }
}
