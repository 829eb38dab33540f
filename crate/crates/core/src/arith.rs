//! Exact scalar arithmetic: Laurent polynomials over the integers, rational
//! functions in one variable `v`, the bar involution `v -> v^-1`, and the
//! balanced quantum integers / factorials / binomials.
//!
//! These are the scalars of everything else in the crate, so all operations
//! are exact and every value has a unique structural normal form.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Laurent polynomial in `v` with arbitrary-precision integer coefficients.
///
/// Invariant: no zero coefficients are stored, so structural equality of the
/// sorted term map is equality of polynomials.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, BigInt::one())
    }

    /// The generator `v`.
    pub fn v() -> Self {
        Self::monomial(1, BigInt::one())
    }

    /// `c * v^k`.
    pub fn monomial(exp: i64, coeff: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(0, BigInt::from(c))
    }

    pub fn from_terms(pairs: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(e, c) in pairs {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map_or(false, |c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    /// Highest exponent, if nonzero.
    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Lowest exponent, if nonzero.
    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.max_exp().map_or_else(BigInt::zero, |e| self.coeff(e))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// The bar involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// gcd of all coefficients (nonnegative); zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }

    /// True if every coefficient is nonnegative.
    pub fn coeffs_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// True if all exponents are `<= 0` (element of `Z[v^-1]`).
    pub fn in_z_v_inverse(&self) -> bool {
        self.max_exp().map_or(true, |e| e <= 0)
    }

    /// True if all exponents are `< 0` (element of `v^-1 Z[v^-1]`).
    pub fn in_v_inverse_lattice(&self) -> bool {
        self.max_exp().map_or(true, |e| e < 0)
    }

    /// Exact division; `None` if `divisor` does not divide `self` in Z[v,v^-1].
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let dmax = divisor.max_exp().unwrap();
        let dlead = divisor.leading_coeff();
        // In an exact division the quotient exponents lie in this range;
        // dropping below the floor means the divisor does not divide.
        let floor = self.min_exp().unwrap() - divisor.min_exp().unwrap();
        while !rem.is_zero() {
            let rmax = rem.max_exp().unwrap();
            let rlead = rem.leading_coeff();
            let (q, r) = rlead.div_rem(&dlead);
            if !r.is_zero() {
                return None;
            }
            let shift = rmax - dmax;
            if shift < floor {
                return None;
            }
            let term = Self::monomial(shift, q);
            rem = rem.sub(&divisor.mul(&term));
            quot = quot.add(&term);
        }
        Some(quot)
    }

    /// Substitute `v -> r` over the rationals (used only in tests/oracles).
    pub fn eval_rational(&self, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut p = BigRational::one();
            if *e >= 0 {
                for _ in 0..*e {
                    p *= r;
                }
            } else {
                for _ in 0..(-*e) {
                    p /= r;
                }
            }
            acc += BigRational::from(c.clone()) * p;
        }
        acc
    }

    /// JSON rendering: object mapping decimal-string exponents to
    /// decimal-string coefficients.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| (e.to_string(), serde_json::Value::String(c.to_string())))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Config("Laurent polynomial JSON must be an object".into()))?;
        let mut p = Self::zero();
        for (k, v) in obj {
            let exp: i64 = k
                .parse()
                .map_err(|_| Error::Config(format!("bad exponent key {k:?}")))?;
            let coeff = match v {
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|_| Error::Config(format!("bad coefficient {s:?}")))?,
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::Config(format!("bad coefficient {n}")))?,
                _ => return Err(Error::Config("coefficient must be string or integer".into())),
            };
            p.add_term(exp, coeff);
        }
        Ok(p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let coeff_part = if mag.is_one() && *e != 0 {
                None
            } else {
                Some(mag.to_string())
            };
            let var_part = match *e {
                0 => None,
                1 => Some("v".to_string()),
                k => Some(format!("v^{k}")),
            };
            match (coeff_part, var_part) {
                (Some(c), Some(v)) => write!(f, "{c}*{v}")?,
                (Some(c), None) => write!(f, "{c}")?,
                (None, Some(v)) => write!(f, "{v}")?,
                (None, None) => unreachable!(),
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Balanced quantum integer `[n] = (v^n - v^-n)/(v - v^-1)`.
pub fn qint(n: i64) -> Result<LaurentPoly> {
    if n < 0 {
        return Err(Error::Config(format!("qint: negative argument {n}")));
    }
    let mut p = LaurentPoly::zero();
    let mut e = n - 1;
    while e >= 1 - n {
        p.add_term(e, BigInt::one());
        e -= 2;
    }
    Ok(p)
}

/// `[n]! = [1][2]...[n]`, with `[0]! = 1`.
pub fn qfact(n: i64) -> Result<LaurentPoly> {
    if n < 0 {
        return Err(Error::Config(format!("qfact: negative argument {n}")));
    }
    let mut p = LaurentPoly::one();
    for k in 1..=n {
        p = p.mul(&qint(k)?);
    }
    Ok(p)
}

/// Balanced Gaussian binomial, computed by exact division of factorials.
pub fn qbinom(n: i64, k: i64) -> Result<LaurentPoly> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::Config(format!("qbinom: bad arguments ({n},{k})")));
    }
    let num = qfact(n)?;
    let den = qfact(k)?.mul(&qfact(n - k)?);
    num.div_exact(&den)
        .ok_or_else(|| Error::Math(format!("qbinom({n},{k}): division not exact")))
}

/// A rational function in `v`, kept in a canonical reduced form:
/// numerator and denominator are coprime Laurent polynomials with coprime
/// contents, the denominator has lowest exponent 0 and positive leading
/// coefficient. Equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

/// gcd of two integer polynomials (given as dense coefficient vectors over Q),
/// returned as a primitive integer polynomial, monic-sign-normalized.
fn poly_gcd_dense(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> Vec<BigInt> {
    fn trim(p: &mut Vec<BigRational>) {
        while p.last().map_or(false, |c| c.is_zero()) {
            p.pop();
        }
    }
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        while a.len() >= b.len() && !a.is_empty() {
            let factor = a.last().unwrap() / b.last().unwrap();
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                let t = &factor * c;
                a[i + shift] -= t;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if a.is_empty() {
        return vec![];
    }
    // Clear denominators and make primitive with positive leading coefficient.
    let mut lcm = BigInt::one();
    for c in &a {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = a.iter().map(|c| (c * BigRational::from(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if !g.is_zero() {
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
    }
    if ints.last().unwrap().is_negative() {
        for c in ints.iter_mut() {
            *c = -&*c;
        }
    }
    ints
}

/// gcd of two Laurent polynomials as ordinary polynomials after shifting both
/// to lowest exponent 0; `v` factors are dropped (they are units).
fn laurent_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let to_dense = |p: &LaurentPoly| -> Vec<BigRational> {
        let lo = p.min_exp().unwrap();
        let hi = p.max_exp().unwrap();
        let mut out = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in p.terms() {
            out[(e - lo) as usize] = BigRational::from(c.clone());
        }
        out
    };
    let g = poly_gcd_dense(to_dense(a), to_dense(b));
    let mut out = LaurentPoly::zero();
    for (i, c) in g.into_iter().enumerate() {
        out.add_term(i as i64, c);
    }
    out
}

impl RationalFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Math("rational function with zero denominator".into()));
        }
        let mut r = RationalFunc { num, den };
        r.normalize();
        Ok(r)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return;
        }
        let g = laurent_gcd(&self.num, &self.den);
        if !g.is_one() && !g.is_zero() {
            self.num = self.num.div_exact(&g).expect("gcd divides numerator");
            self.den = self.den.div_exact(&g).expect("gcd divides denominator");
        }
        // Shift denominator to lowest exponent 0.
        let s = self.den.min_exp().unwrap();
        self.den = self.den.shift(-s);
        self.num = self.num.shift(-s);
        // Coprime contents.
        let cg = self.num.content().gcd(&self.den.content());
        if !cg.is_one() && !cg.is_zero() {
            self.num = self
                .num
                .div_exact(&LaurentPoly::monomial(0, cg.clone()))
                .unwrap();
            self.den = self.den.div_exact(&LaurentPoly::monomial(0, cg)).unwrap();
        }
        // Positive leading coefficient of denominator.
        if self.den.leading_coeff().is_negative() {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    pub fn zero() -> Self {
        RationalFunc {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        RationalFunc {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        RationalFunc {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_laurent(LaurentPoly::from_int(c))
    }

    /// `v^k` as a rational function.
    pub fn v_pow(k: i64) -> Self {
        Self::from_laurent(LaurentPoly::monomial(k, BigInt::one()))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The underlying Laurent polynomial, if the denominator is trivial
    /// up to a unit.
    pub fn as_laurent(&self) -> Option<LaurentPoly> {
        if self.den.is_one() {
            Some(self.num.clone())
        } else if self.den.terms.len() == 1 {
            // denominator c*v^k with k = 0 by normalization; c > 1 means
            // a genuine rational coefficient.
            None
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero denominator")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Math("division by zero rational function".into()));
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn bar(&self) -> Self {
        Self::new(self.num.bar(), self.den.bar()).expect("nonzero denominator")
    }

    pub fn scale_laurent(&self, p: &LaurentPoly) -> Self {
        Self::new(self.num.mul(p), self.den.clone()).expect("nonzero denominator")
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Coefficients of the expansion at `v = infinity` (i.e. as a power
    /// series in `v^-1`) for every exponent `>= lowest`. The expansion is
    /// finite upward, so this returns the complete head of the series.
    pub fn expansion_at_infinity(&self, lowest: i64) -> BTreeMap<i64, BigRational> {
        let mut out = BTreeMap::new();
        if self.is_zero() {
            return out;
        }
        let nhi = self.num.max_exp().unwrap();
        let dhi = self.den.max_exp().unwrap();
        let top = nhi - dhi;
        if top < lowest {
            return out;
        }
        let order = (top - lowest) as usize + 1;
        // num = v^nhi * sum a_k u^k, den = v^dhi * sum b_k u^k with u = v^-1.
        let series = |p: &LaurentPoly, hi: i64| -> Vec<BigRational> {
            let mut s = vec![BigRational::zero(); order];
            for (e, c) in p.terms() {
                let k = (hi - e) as usize;
                if k < order {
                    s[k] = BigRational::from(c.clone());
                }
            }
            s
        };
        let a = series(&self.num, nhi);
        let b = series(&self.den, dhi);
        // Power-series division c = a / b, b[0] != 0.
        let mut c = vec![BigRational::zero(); order];
        for k in 0..order {
            let mut acc = a[k].clone();
            for j in 0..k {
                acc -= &c[j] * &b[k - j];
            }
            c[k] = acc / &b[0];
        }
        for (k, coeff) in c.into_iter().enumerate() {
            if !coeff.is_zero() {
                out.insert(top - k as i64, coeff);
            }
        }
        out
    }

    /// Check membership in `delta + v^-1 Z[[v^-1]]` up to exponent
    /// `-order` of the expansion at infinity.
    pub fn is_almost(&self, delta: i64, order: i64) -> bool {
        let exp = self.expansion_at_infinity(-order);
        for (e, c) in &exp {
            if *e > 0 && !c.is_zero() {
                return false;
            }
            if *e == 0 && *c != BigRational::from(BigInt::from(delta)) {
                return false;
            }
            if *e < 0 && !c.denom().is_one() {
                return false;
            }
        }
        if delta != 0 && !exp.contains_key(&0) {
            return false;
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        if self.den.is_one() {
            self.num.to_json()
        } else {
            let mut map = serde_json::Map::new();
            map.insert("num".into(), self.num.to_json());
            map.insert("den".into(), self.den.to_json());
            serde_json::Value::Object(map)
        }
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(pairs)
    }

    #[test]
    fn laurent_add_sub_mul() {
        // (v + 1) + (v^-1 - 1) = v + v^-1
        let a = lp(&[(1, 1), (0, 1)]);
        let b = lp(&[(-1, 1), (0, -1)]);
        assert_eq!(a.add(&b), lp(&[(1, 1), (-1, 1)]));
        // (v - v^-1)(v + v^-1) = v^2 - v^-2
        let c = lp(&[(1, 1), (-1, -1)]);
        let d = lp(&[(1, 1), (-1, 1)]);
        assert_eq!(c.mul(&d), lp(&[(2, 1), (-2, -1)]));
        // p - p = 0
        assert!(c.sub(&c).is_zero());
    }

    #[test]
    fn bar_involution() {
        let p = lp(&[(2, 1), (-1, 3)]);
        assert_eq!(p.bar(), lp(&[(-2, 1), (1, 3)]));
        assert_eq!(p.bar().bar(), p);
        assert_eq!(lp(&[(0, 5)]).bar(), lp(&[(0, 5)]));
    }

    #[test]
    fn bar_is_ring_involution() {
        let a = lp(&[(3, 2), (0, -1), (-2, 5)]);
        let b = lp(&[(1, 7), (-4, 1)]);
        assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
        assert_eq!(a.add(&b).bar(), a.bar().add(&b.bar()));
    }

    #[test]
    fn quantum_integers() {
        assert!(qint(0).unwrap().is_zero());
        assert_eq!(qint(2).unwrap(), lp(&[(1, 1), (-1, 1)]));
        assert!(qfact(0).unwrap().is_one());
        assert!(qint(-1).is_err());
    }

    #[test]
    fn qbinom_4_2() {
        let expected = lp(&[(4, 1), (2, 1), (0, 2), (-2, 1), (-4, 1)]);
        assert_eq!(qbinom(4, 2).unwrap(), expected);
    }

    #[test]
    fn qbinom_bar_invariant_nonnegative() {
        for n in 0..=12 {
            for k in 0..=n {
                let b = qbinom(n, k).unwrap();
                assert!(b.is_bar_invariant(), "qbinom({n},{k}) not bar-invariant");
                assert!(b.coeffs_nonnegative(), "qbinom({n},{k}) has negative coeff");
            }
        }
    }

    #[test]
    fn rational_normalization() {
        // (v^2 - 1)/(v - 1) = (v + 1)/1
        let r = RationalFunc::new(lp(&[(2, 1), (0, -1)]), lp(&[(1, 1), (0, -1)])).unwrap();
        assert_eq!(r, RationalFunc::from_laurent(lp(&[(1, 1), (0, 1)])));
        assert_eq!(r.as_laurent().unwrap(), lp(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn rational_field_ops() {
        let x = RationalFunc::new(lp(&[(3, 2), (-1, 5)]), lp(&[(2, 1), (0, 3)])).unwrap();
        assert!(x.div(&x).unwrap().is_one());
        // 1/(1 - v^-2) * (1 - v^-2) = 1
        let y = RationalFunc::from_laurent(lp(&[(0, 1), (-2, -1)]));
        assert!(y.inv().unwrap().mul(&y).is_one());
        assert!(x.div(&RationalFunc::zero()).is_err());
    }

    #[test]
    fn expansion_at_infinity() {
        // 1/(1 - v^-2) = 1 + v^-2 + v^-4 + ...
        let y = RationalFunc::from_laurent(lp(&[(0, 1), (-2, -1)]))
            .inv()
            .unwrap();
        let exp = y.expansion_at_infinity(-4);
        assert_eq!(exp.get(&0), Some(&BigRational::one()));
        assert_eq!(exp.get(&-2), Some(&BigRational::one()));
        assert_eq!(exp.get(&-4), Some(&BigRational::one()));
        assert_eq!(exp.get(&-1), None);
        assert!(y.is_almost(1, 10));
        assert!(!y.sub(&RationalFunc::one()).is_almost(1, 10));
        assert!(y.sub(&RationalFunc::one()).is_almost(0, 10));
    }

    #[test]
    fn json_round_trip() {
        let p = lp(&[(5, 123456789), (-3, -42), (0, 7)]);
        let j = p.to_json();
        assert_eq!(LaurentPoly::from_json(&j).unwrap(), p);
    }

    #[test]
    fn display_format() {
        assert_eq!(lp(&[(2, 1), (-1, 3)]).to_string(), "v^2 + 3*v^-1");
        assert_eq!(lp(&[(1, -1), (0, 2)]).to_string(), "-v + 2");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }
}
