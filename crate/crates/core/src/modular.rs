//! Exact determinants of polynomial matrices by evaluation and interpolation
//! modulo word-size primes, recombined with the Chinese remainder theorem.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::Matrix;
use crate::poly::Poly;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Primes below `2^31`, descending.
pub fn primes() -> impl Iterator<Item = u64> {
    (3..(1u64 << 31)).rev().step_by(2).filter(|&n| is_prime(n))
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn big_mod(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

/// Determinant of a square matrix over `Z/p`, destroying the input.
pub fn det_mod_p(a: &mut [Vec<u64>], p: u64) -> u64 {
    let n = a.len();
    let mut acc = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| a[i][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            acc = (p - acc) % p;
        }
        acc = acc * a[col][col] % p;
        let inv = inv_mod(a[col][col], p);
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for row in rest.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let f = row[col] * inv % p;
            for c in col..n {
                row[c] = (row[c] + p - f * prow[c] % p) % p;
            }
        }
    }
    acc
}

/// Coefficients of the polynomial taking `values[i]` at `t = i`, over `Z/p`.
pub fn interpolate_mod_p(values: &[u64], p: u64) -> Vec<u64> {
    let n = values.len();
    // divided differences
    let mut dd = values.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            let num = (dd[i] + p - dd[i - 1]) % p;
            dd[i] = num * inv_mod(k as u64, p) % p;
        }
    }
    // Horner expansion of the Newton form
    let mut coeffs = vec![0u64; n];
    for k in (0..n).rev() {
        // coeffs = coeffs * (t - k) + dd[k]
        let mut next = vec![0u64; n];
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            if i + 1 < n {
                next[i + 1] = (next[i + 1] + coeffs[i]) % p;
            }
            next[i] = (next[i] + p - coeffs[i] * (k as u64 % p) % p) % p;
        }
        next[0] = (next[0] + dd[k]) % p;
        coeffs = next;
    }
    coeffs
}

/// Determinant of a polynomial matrix, exactly.
pub fn det_poly(m: &Matrix<Poly<BigRational>>) -> Poly<BigRational> {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    // clear denominators row by row
    let mut scale = BigInt::one();
    let mut ints: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(n);
    for row in m {
        let mut l = BigInt::one();
        for e in row {
            for c in e.coeffs() {
                l = l.lcm(c.denom());
            }
        }
        scale *= &l;
        ints.push(
            row.iter()
                .map(|e| e.coeffs().iter().map(|c| c.numer() * (&l / c.denom())).collect())
                .collect(),
        );
    }
    let row_deg: usize =
        ints.iter().map(|r| r.iter().map(|e| e.len().saturating_sub(1)).max().unwrap_or(0)).sum();
    let col_deg: usize = (0..n)
        .map(|j| ints.iter().map(|r| r[j].len().saturating_sub(1)).max().unwrap_or(0))
        .sum();
    let bound_deg = row_deg.min(col_deg);
    let mut bound = BigInt::one();
    for r in &ints {
        let s: BigInt = r.iter().flat_map(|e| e.iter()).map(|c| c.abs()).sum();
        bound *= s;
    }
    if bound.is_zero() {
        return Poly::zero();
    }
    let target = bound * 2;
    let mut modulus = BigInt::one();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); bound_deg + 1];
    for p in primes() {
        if modulus > target {
            break;
        }
        let reduced: Vec<Vec<Vec<u64>>> = ints
            .iter()
            .map(|r| r.iter().map(|e| e.iter().map(|c| big_mod(c, p)).collect()).collect())
            .collect();
        let mut values = Vec::with_capacity(bound_deg + 1);
        for t in 0..=bound_deg as u64 {
            let mut a: Vec<Vec<u64>> = reduced
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|e| e.iter().rev().fold(0u64, |h, &c| (h * t + c) % p))
                        .collect()
                })
                .collect();
            values.push(det_mod_p(&mut a, p));
        }
        let coeffs = interpolate_mod_p(&values, p);
        let pb = BigInt::from(p);
        let minv = BigInt::from(inv_mod(big_mod(&modulus, p), p));
        for (x, &r) in acc.iter_mut().zip(&coeffs) {
            let diff = (BigInt::from(r) - &*x).mod_floor(&pb);
            let k = (diff * &minv).mod_floor(&pb);
            *x += &modulus * k;
        }
        modulus *= pb;
    }
    let half = &modulus >> 1;
    let coeffs = acc
        .into_iter()
        .map(|c| {
            let c = if c > half { c - &modulus } else { c };
            BigRational::new(c, scale.clone())
        })
        .collect();
    Poly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    type P = Poly<BigRational>;

    fn p(c: &[i64]) -> P {
        P::new(c.iter().map(|&v| qi(v)).collect())
    }

    /// Fraction-free elimination over `Q[t]`; slow, used as an oracle.
    fn bareiss(m: &Matrix<P>) -> P {
        let n = m.len();
        let mut a = m.clone();
        let mut prev = P::one();
        let mut sign = false;
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return P::zero();
                };
                a.swap(k, s);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j].clone() * &a[k][k] - a[i][k].clone() * &a[k][j];
                    let (qq, r) = num.div_rem(&prev);
                    assert!(r.is_zero());
                    a[i][j] = qq;
                }
            }
            prev = a[k][k].clone();
        }
        if sign {
            -prev
        } else {
            prev
        }
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let pr = 1_000_003;
        let f = |t: u64| (3 + 5 * t + 7 * t * t) % pr;
        let vals: Vec<u64> = (0..3).map(f).collect();
        assert_eq!(interpolate_mod_p(&vals, pr), vec![3, 5, 7]);
    }

    #[test]
    fn matches_bareiss_oracle() {
        let m = vec![
            vec![p(&[1, 2]), p(&[0, 0, 3]), p(&[-4])],
            vec![P::new(vec![q(1, 2), q(-3, 7)]), p(&[5, 1]), p(&[0, 1])],
            vec![p(&[2]), p(&[-1, 0, 1]), p(&[9, -9])],
        ];
        assert_eq!(det_poly(&m), bareiss(&m));
    }

    #[test]
    fn large_coefficients_survive_crt() {
        let big = BigRational::from_integer(BigInt::from(10).pow(40));
        let m = vec![
            vec![P::new(vec![big.clone(), qi(1)]), p(&[1])],
            vec![p(&[1]), P::new(vec![big.clone(), qi(-1)])],
        ];
        assert_eq!(det_poly(&m), bareiss(&m));
    }

    #[test]
    fn singular_matrix() {
        let m = vec![vec![p(&[1, 1]), p(&[2, 2])], vec![p(&[3]), p(&[6])]];
        assert!(det_poly(&m).is_zero());
    }
}
