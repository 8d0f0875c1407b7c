//! Univariate polynomials over a [`FieldSpec`], coefficients low degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactlin::{FieldSpec, Scalar};

pub(crate) type Poly = Vec<Scalar>;

pub(crate) fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn degree(p: &Poly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub(crate) fn mul(k: FieldSpec, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.axpy(&out[i + j], x, y);
        }
    }
    trim(out)
}

pub(crate) fn sub(k: FieldSpec, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let z = Scalar::zero();
    trim(
        (0..n)
            .map(|i| k.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect(),
    )
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub(crate) fn div_rem(k: FieldSpec, a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = k.inv(&b[db]).expect("nonzero lead");
    let mut r = trim(a.clone());
    let mut q = vec![Scalar::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = k.mul(&r[dr], &lead_inv);
        q[dr - db] = c.clone();
        for (i, y) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = k.sub(&r[idx], &k.mul(&c, y));
        }
        r = trim(r);
    }
    (trim(q), r)
}

/// `(g, u, v)` with `u·a + v·b = g` and `g` monic.
pub(crate) fn ext_gcd(k: FieldSpec, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (trim(a.clone()), trim(b.clone()));
    let (mut s0, mut s1): (Poly, Poly) = (vec![Scalar::one()], Vec::new());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![Scalar::one()]);
    while degree(&r1).is_some() {
        let (q, r) = div_rem(k, &r0, &r1);
        let s2 = sub(k, &s0, &mul(k, &q, &s1));
        let t2 = sub(k, &t0, &mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if let Some(d) = degree(&r0) {
        let inv = k.inv(&r0[d]).expect("nonzero lead");
        let scale = |p: &Poly| trim(p.iter().map(|c| k.mul(&inv, c)).collect());
        (scale(&r0), scale(&s0), scale(&t0))
    } else {
        (r0, s0, t0)
    }
}

/// `(t - λ)^a`.
pub(crate) fn linear_power(k: FieldSpec, lambda: &Scalar, a: usize) -> Poly {
    let lin = vec![k.neg(lambda), Scalar::one()];
    (0..a).fold(vec![Scalar::one()], |acc, _| mul(k, &acc, &lin))
}

pub(crate) fn eval(k: FieldSpec, p: &Poly, x: &Scalar) -> Scalar {
    p.iter()
        .rev()
        .fold(Scalar::zero(), |acc, c| k.add(&k.mul(&acc, x), c))
}

/// Multiplicity of `λ` as a root, and the cofactor.
pub(crate) fn split_root(k: FieldSpec, p: &Poly, lambda: &Scalar) -> (usize, Poly) {
    let lin = vec![k.neg(lambda), Scalar::one()];
    let mut cur = trim(p.clone());
    let mut mult = 0;
    loop {
        let (q, r) = div_rem(k, &cur, &lin);
        if degree(&r).is_some() || degree(&cur).is_none_or(|d| d == 0) {
            return (mult, cur);
        }
        cur = q;
        mult += 1;
    }
}

fn divisors(n: &BigInt, cap: u64) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let small = n.to_u64().filter(|v| *v <= cap)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Roots in the base field, ascending in the natural order of
/// representatives. Roots whose search space is too large to enumerate are
/// not reported.
pub(crate) fn roots(k: FieldSpec, p: &Poly) -> Vec<Scalar> {
    let p = trim(p.clone());
    if degree(&p).is_none_or(|d| d == 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    match k {
        FieldSpec::PrimeField(q) => {
            if q <= 1 << 20 {
                for i in 0..q {
                    let x = Scalar::from_integer(BigInt::from(i));
                    if eval(k, &p, &x).is_zero() {
                        out.push(x);
                    }
                }
            }
        }
        FieldSpec::Rationals => {
            let lcm = p
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let ints: Vec<BigInt> = p
                .iter()
                .map(|c| (c * Scalar::from_integer(lcm.clone())).to_integer())
                .collect();
            let low = ints.iter().position(|c| !c.is_zero()).expect("nonzero");
            if low > 0 {
                out.push(Scalar::zero());
            }
            let a0 = &ints[low];
            let an = ints.last().expect("nonzero");
            if let (Some(ps), Some(qs)) = (divisors(a0, 1 << 24), divisors(an, 1 << 24)) {
                let mut cands: Vec<Scalar> = Vec::new();
                for num in &ps {
                    for den in &qs {
                        let x = Scalar::new(num.clone(), den.clone());
                        cands.push(x.clone());
                        cands.push(-x);
                    }
                }
                cands.sort();
                cands.dedup();
                for x in cands {
                    if eval(k, &p, &x).is_zero() {
                        out.push(x);
                    }
                }
            }
            out.sort();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn p(cs: &[i64]) -> Poly {
        cs.iter().map(|c| Q.from_i64(*c)).collect()
    }

    #[test]
    fn rational_roots() {
        // 2t^2 - 3t + 1 = (2t - 1)(t - 1)
        let r = roots(Q, &p(&[1, -3, 2]));
        assert_eq!(r, vec![Scalar::new(1.into(), 2.into()), Q.one()]);
        assert!(roots(Q, &p(&[-2, 0, 1])).is_empty());
        assert_eq!(roots(Q, &p(&[0, 0, 1])), vec![Q.zero()]);
    }

    #[test]
    fn gcd_identity() {
        let a = p(&[0, 0, 1]);
        let b = p(&[-1, 1]);
        let (g, u, v) = ext_gcd(Q, &a, &b);
        assert_eq!(g, p(&[1]));
        let lhs = sub(Q, &mul(Q, &u, &a), &mul(Q, &[Q.from_i64(-1)].to_vec(), &mul(Q, &v, &b)));
        assert_eq!(lhs, g);
    }

    #[test]
    fn multiplicity() {
        let f = mul(Q, &linear_power(Q, &Q.one(), 2), &p(&[3, 1]));
        let (m, g) = split_root(Q, &f, &Q.one());
        assert_eq!(m, 2);
        assert_eq!(g, p(&[3, 1]));
    }
}
