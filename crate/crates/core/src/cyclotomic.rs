//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! Elements are stored in the power basis {zeta_N^k : 0 <= k < phi(N)} with
//! big-rational coordinates, always reduced modulo the N-th cyclotomic
//! polynomial Phi_N so that equality is coefficient-wise. Arithmetic between
//! different conductors lifts both operands into Q(zeta_lcm) first.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::integer::Integer;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num::rational::BigRational;

/// Largest conductor accepted by constructors; keeps phi(N) <= 96.
pub const MAX_CONDUCTOR: u64 = 360;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    Rational::from(BigInt::from(p))
}

/// Euler totient by trial-division factorization.
pub fn phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients (ascending degree, monic) of the N-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Phi_d for each divisor d of n, ascending, via exact integer division of
    // x^d - 1 by the product of the previously computed Phi_e, e | d, e < d.
    let mut local: HashMap<u64, Arc<Vec<BigInt>>> = HashMap::new();
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    for &d in &divisors {
        if cache.lock().unwrap().contains_key(&d) {
            local.insert(d, cache.lock().unwrap()[&d].clone());
            continue;
        }
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        let mut quot = num;
        for &e in &divisors {
            if e < d && d % e == 0 {
                let phi_e = local[&e].clone();
                quot = int_poly_exact_div(&quot, &phi_e);
            }
        }
        let arc = Arc::new(quot);
        local.insert(d, arc.clone());
        cache.lock().unwrap().insert(d, arc);
    }
    local[&n].clone()
}

/// Exact division of integer polynomials (ascending coefficients), divisor monic.
fn int_poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    while rem.len() > 1 && rem.last().unwrap().is_zero() {
        rem.pop();
    }
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![BigInt::zero(); qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd].clone();
        quot[k] = c.clone();
        for (i, dc) in den.iter().enumerate() {
            rem[k + i] -= &c * dc;
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

#[derive(Debug, Clone)]
pub struct Cyclotomic {
    conductor: u64,
    coeffs: Vec<Rational>, // length phi(conductor), reduced mod Phi_N
}

impl Cyclotomic {
    fn from_dense(conductor: u64, mut dense: Vec<Rational>) -> Self {
        let deg = phi(conductor) as usize;
        let p = cyclotomic_polynomial(conductor);
        // Remainder modulo the monic Phi_N.
        if dense.len() > deg {
            for k in (deg..dense.len()).rev() {
                if dense[k].is_zero() {
                    continue;
                }
                let c = std::mem::replace(&mut dense[k], Rational::zero());
                for (i, pc) in p.iter().enumerate().take(deg) {
                    let delta = &c * Rational::from(pc.clone());
                    dense[k - deg + i] -= delta;
                }
            }
        }
        dense.resize(deg, Rational::zero());
        Cyclotomic {
            conductor,
            coeffs: dense,
        }
    }

    pub fn zero() -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![Rational::zero()],
        }
    }

    pub fn one() -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![Rational::one()],
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(rat_int(k))
    }

    /// zeta_N^exp, with exp taken modulo N (negative allowed).
    pub fn zeta_pow(n: u64, exp: i64) -> Result<Self> {
        if n == 0 || n > MAX_CONDUCTOR {
            return Err(Error::InvalidParameter(format!(
                "conductor {n} outside 1..={MAX_CONDUCTOR}"
            )));
        }
        let e = exp.rem_euclid(n as i64) as usize;
        let mut dense = vec![Rational::zero(); e + 1];
        dense[e] = Rational::one();
        Ok(Self::from_dense(n, dense))
    }

    /// A primitive k-th root of unity in Q(zeta_N); requires k | N.
    pub fn root_of_unity(k: u64, n: u64) -> Result<Self> {
        if k == 0 || n == 0 || n % k != 0 {
            return Err(Error::ConductorMismatch(format!("{k} does not divide {n}")));
        }
        Self::zeta_pow(n, (n / k) as i64)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Same element represented in Q(zeta_M); requires N | M.
    pub fn lift(&self, m: u64) -> Result<Self> {
        if m == 0 || m % self.conductor != 0 {
            return Err(Error::ConductorMismatch(format!(
                "{} does not divide {}",
                self.conductor, m
            )));
        }
        if m > MAX_CONDUCTOR {
            return Err(Error::InvalidParameter(format!(
                "conductor {m} exceeds cap {MAX_CONDUCTOR}"
            )));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let step = (m / self.conductor) as usize;
        let mut dense = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            dense[i * step] = c.clone();
        }
        Ok(Self::from_dense(m, dense))
    }

    fn lift_pair(&self, other: &Self) -> Result<(Self, Self)> {
        let m = self.conductor.lcm(&other.conductor);
        Ok((self.lift(m)?, other.lift(m)?))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.lift_pair(other).expect("lcm lift");
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        Cyclotomic {
            conductor: a.conductor,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.lift_pair(other).expect("lcm lift");
        let mut dense = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                dense[i + j] += x * y;
            }
        }
        Self::from_dense(a.conductor, dense)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x]
    /// against Phi_N.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.to_rational() {
            return Ok(Self::from_rational(r.recip()));
        }
        let n = self.conductor;
        let phi_n: Vec<Rational> = cyclotomic_polynomial(n)
            .iter()
            .map(|c| Rational::from(c.clone()))
            .collect();
        // Invariants: r0 = s0 * self (mod Phi), r1 = s1 * self (mod Phi).
        let mut r0 = phi_n;
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<Rational> = vec![];
        let mut s1 = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = qpoly_divmod(&r0, &r1);
            let s = qpoly_sub(&s0, &qpoly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant gcd (Phi_N is irreducible, self != 0).
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let dense: Vec<Rational> = s0.iter().map(|x| x * &c).collect();
        Ok(Self::from_dense(n, dense))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Cyclotomic::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Galois conjugation zeta_N -> zeta_N^{-1} (complex conjugation).
    pub fn conj(&self) -> Self {
        let n = self.conductor;
        let len = self.coeffs.len().max(1);
        let mut dense = vec![Rational::zero(); n as usize];
        if n == 1 {
            return self.clone();
        }
        for (i, c) in self.coeffs.iter().enumerate().take(len) {
            let e = (n as usize - i) % n as usize;
            dense[e] += c;
        }
        Self::from_dense(n, dense)
    }

    /// Float image under zeta_N -> exp(2 pi i / N).
    pub fn approx(&self) -> Complex64 {
        let n = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / n;
            let cf = c.to_f64().unwrap_or_else(|| {
                c.numer().to_f64().unwrap() / c.denom().to_f64().unwrap()
            });
            acc += Complex64::new(ang.cos(), ang.sin()) * cf;
        }
        acc
    }
}

/// Checked arithmetic as exposed on the CLI: operands must share a conductor.
pub fn cyc_arith(a: &Cyclotomic, b: &Cyclotomic, op: &str) -> Result<Cyclotomic> {
    if a.conductor != b.conductor {
        return Err(Error::ConductorMismatch(format!(
            "conductors {} and {}; lift to the lcm first",
            a.conductor, b.conductor
        )));
    }
    match op {
        "add" => Ok(a.add(b)),
        "sub" => Ok(a.sub(b)),
        "mul" => Ok(a.mul(b)),
        "div" => a.div(b),
        other => Err(Error::InvalidParameter(format!("unknown op {other}"))),
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        match self.lift_pair(other) {
            Ok((a, b)) => a.coeffs == b.coeffs,
            Err(_) => false,
        }
    }
}

impl Eq for Cyclotomic {}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qpoly_divmod(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let lead = den[dd].clone();
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + dd] / &lead;
        quot[k] = c.clone();
        for (i, dc) in den.iter().enumerate() {
            let delta = &c * dc;
            rem[k + i] -= delta;
        }
    }
    trim(&mut rem);
    (quot, rem)
}

fn qpoly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn qpoly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{}", format_rational(&r));
        }
        let mut first = true;
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let neg = c.is_negative();
            let body = if k == 0 {
                format_rational(&mag)
            } else if mag.is_one() {
                format!("z({})^{}", self.conductor, k)
            } else {
                format!("{}*z({})^{}", format_rational(&mag), self.conductor, k)
            };
            if first {
                if neg {
                    out.push('-');
                }
                out.push_str(&body);
                first = false;
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        write!(f, "{out}")
    }
}
