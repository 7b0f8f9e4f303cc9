//! Exact LLL reduction and shortest-vector enumeration over rational bases.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{ceil, floor, rat_int, sqrt_ceil, to_f64, Rational};

/// Node cap for the enumeration tree. LLL-reduced bases in dimension ≤ 6
/// stay far below it.
const MAX_NODES: u64 = 5_000_000;

#[derive(Clone, Debug)]
pub struct Shortest {
    pub len_sq: Rational,
    /// Integer coefficients with respect to the input generators.
    pub coeffs: Vec<BigInt>,
    pub vector: Vec<Rational>,
}

impl Shortest {
    pub fn length(&self) -> f64 {
        to_f64(&self.len_sq).sqrt()
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram-Schmidt data: `mu[i][j]` for `j < i` and squared norms `bstar`.
struct Gso {
    mu: Vec<Vec<Rational>>,
    bstar: Vec<Rational>,
}

fn gso(b: &[Vec<Rational>]) -> Result<Gso> {
    let n = b.len();
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::zero(); n]; n];
    let mut bstar = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            let m = dot(&b[i], &star[j]) / &bstar[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= &m * sk;
            }
            mu[i][j] = m;
        }
        let nsq = dot(&v, &v);
        if nsq.is_zero() {
            return Err(Error::SingularBasis);
        }
        bstar.push(nsq);
        star.push(v);
    }
    Ok(Gso { mu, bstar })
}

/// LLL with `δ = 3/4`. Returns the reduced generators and the unimodular
/// transform `T` with `reduced[i] = Σ_j T[i][j] input[j]`.
pub fn lll(input: &[Vec<Rational>]) -> Result<(Vec<Vec<Rational>>, Vec<Vec<BigInt>>)> {
    let n = input.len();
    let mut b = input.to_vec();
    let mut t: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let delta = Rational::new(3.into(), 4.into());
    let mut g = gso(&b)?;
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = g.mu[k][j].round().to_integer();
            if !r.is_zero() {
                let rr = rat_int(&r);
                let (lo, hi) = b.split_at_mut(k);
                for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                    *x -= &rr * y;
                }
                let (tlo, thi) = t.split_at_mut(k);
                for (x, y) in thi[0].iter_mut().zip(&tlo[j]) {
                    *x -= &r * y;
                }
                g = gso(&b)?;
            }
        }
        let m = &g.mu[k][k - 1];
        if g.bstar[k] < (&delta - m * m) * &g.bstar[k - 1] {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            g = gso(&b)?;
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    Ok((b, t))
}

/// Shortest nonzero vector of the lattice spanned by `generators`
/// (linearly independent, equal length).
pub fn shortest_vector(generators: &[Vec<Rational>]) -> Result<Shortest> {
    let n = generators.len();
    if n == 0 || generators.iter().any(|g| g.len() != generators[0].len()) {
        return Err(Error::InvalidParameter("generators must be nonempty and equal length".into()));
    }
    let (b, t) = lll(generators)?;
    let g = gso(&b)?;
    let mut best_x = vec![BigInt::zero(); n];
    best_x[0] = BigInt::one();
    let mut best = g.bstar[0].clone();
    let mut x = vec![BigInt::zero(); n];
    let mut nodes = 0u64;
    enumerate(&g, n, &Rational::zero(), &mut x, &mut best, &mut best_x, &mut nodes)?;

    let vector: Vec<Rational> = (0..b[0].len())
        .map(|c| (0..n).map(|i| rat_int(&best_x[i]) * &b[i][c]).sum())
        .collect();
    let coeffs: Vec<BigInt> = (0..n).map(|j| (0..n).map(|i| &best_x[i] * &t[i][j]).sum()).collect();
    Ok(Shortest { len_sq: best, coeffs, vector })
}

/// Depth-first Fincke–Pohst over levels `level-1 … 0` with partial squared
/// length `partial`. Only strictly shorter vectors replace the incumbent.
fn enumerate(
    g: &Gso,
    level: usize,
    partial: &Rational,
    x: &mut Vec<BigInt>,
    best: &mut Rational,
    best_x: &mut Vec<BigInt>,
    nodes: &mut u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > MAX_NODES {
        return Err(Error::BudgetExceeded(MAX_NODES));
    }
    if level == 0 {
        if x.iter().any(|c| !c.is_zero()) && partial < best {
            *best = partial.clone();
            *best_x = x.clone();
        }
        return Ok(());
    }
    let i = level - 1;
    let n = x.len();
    let center: Rational = -(i + 1..n).map(|j| rat_int(&x[j]) * &g.mu[j][i]).sum::<Rational>();
    let room = &*best - partial;
    if room.is_negative() {
        return Ok(());
    }
    let w = sqrt_ceil(&(room / &g.bstar[i]), 64);
    let lo = ceil(&(&center - &w));
    let hi = floor(&(&center + &w));
    let mut c = lo;
    while c <= hi {
        let diff = rat_int(&c) - &center;
        let next = partial + &diff * &diff * &g.bstar[i];
        if next <= *best {
            x[i] = c.clone();
            enumerate(g, i, &next, x, best, best_x, nodes)?;
        }
        c += 1;
    }
    x[i] = BigInt::zero();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn cols(m: &[[i64; 3]; 3]) -> Vec<Vec<Rational>> {
        (0..3).map(|j| (0..3).map(|i| rat(m[i][j], 1)).collect()).collect()
    }

    #[test]
    fn identity_systole() {
        let s = shortest_vector(&cols(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]])).unwrap();
        assert_eq!(s.len_sq, rat(1, 1));
    }

    #[test]
    fn diagonal_systole() {
        let g = vec![
            vec![rat(2, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(0, 1), rat(1, 2)],
        ];
        let s = shortest_vector(&g).unwrap();
        assert_eq!(s.len_sq, rat(1, 4));
        assert_eq!(s.vector[2].abs(), rat(1, 2));
        assert_eq!(s.coeffs.iter().map(|c| c.abs()).collect::<Vec<_>>(), vec![int(0), int(0), int(1)]);
    }

    #[test]
    fn unimodular_integer_basis() {
        let s = shortest_vector(&cols(&[[1, 7, 3], [0, 1, 5], [2, 14, 7]])).unwrap();
        assert_eq!(s.len_sq, rat(1, 1));
    }

    #[test]
    fn coefficients_reproduce_vector() {
        let g = vec![
            vec![rat(5, 1), rat(3, 7)],
            vec![rat(13, 2), rat(1, 2)],
        ];
        let s = shortest_vector(&g).unwrap();
        for c in 0..2 {
            let v: Rational = (0..2).map(|i| rat_int(&s.coeffs[i]) * &g[i][c]).sum();
            assert_eq!(v, s.vector[c]);
        }
    }

    #[test]
    fn singular_rejected() {
        let g = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert_eq!(shortest_vector(&g).unwrap_err(), Error::SingularBasis);
    }
}
