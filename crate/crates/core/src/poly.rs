//! Sparse exact multivariate polynomials over the cyclotomic field, with
//! graded-lexicographic canonical term order, composition, exact division,
//! linear substitution by group elements, and polynomial-matrix determinants.

use std::collections::BTreeMap;
use std::fmt;

use num::complex::Complex64;

use crate::cyclotomic::{format_rational, Cyclotomic};
use crate::error::{Error, Result};
use crate::linalg::{mat_inverse, CMatrix};

/// Exponent vector ordered graded-lexicographically: higher total degree wins,
/// ties broken by the leftmost differing exponent (z1 > z2 > ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Cyclotomic>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Cyclotomic) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Cyclotomic::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, Cyclotomic::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, coeff: Cyclotomic) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Poly::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(MultiIndex(exps), coeff);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Cyclotomic {
        self.terms.get(idx).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    /// None for the zero polynomial (its degree is "minus infinity").
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    /// Some(d) iff nonzero and every term has total degree d.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.total_degree()?;
        if self.terms.keys().all(|m| m.degree() == d) {
            Some(d)
        } else {
            None
        }
    }

    fn insert_term(&mut self, idx: MultiIndex, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.insert_term(idx.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let exps: Vec<u32> = i.0.iter().zip(j.0.iter()).map(|(x, y)| x + y).collect();
                out.insert_term(MultiIndex(exps), a.mul(b));
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(i, a)| (i.clone(), a.mul(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn homogeneous_component(&self, k: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.degree() == k)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn truncate_degree(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.degree() <= d)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitution q(subs_1, ..., subs_m); q has m variables, the subs share
    /// their own variable count.
    pub fn compose(&self, subs: &[Poly]) -> Result<Poly> {
        if subs.len() != self.nvars {
            return Err(Error::ArityMismatch(format!(
                "{} substitutions for {} variables",
                subs.len(),
                self.nvars
            )));
        }
        let n = if subs.is_empty() { 0 } else { subs[0].nvars };
        if subs.iter().any(|s| s.nvars != n) {
            return Err(Error::ArityMismatch(
                "substitution polynomials disagree on variable count".into(),
            ));
        }
        // Power cache per substituted variable.
        let mut max_e = vec![0u32; self.nvars];
        for idx in self.terms.keys() {
            for (i, &e) in idx.0.iter().enumerate() {
                max_e[i] = max_e[i].max(e);
            }
        }
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(self.nvars);
        for (i, s) in subs.iter().enumerate() {
            let mut ps = vec![Poly::one(n)];
            for e in 1..=max_e[i] {
                let next = ps[(e - 1) as usize].mul(s);
                ps.push(next);
            }
            powers.push(ps);
        }
        let mut out = Poly::zero(n);
        for (idx, c) in &self.terms {
            let mut term = Poly::constant(n, c.clone());
            for (i, &e) in idx.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Greedy leading-term exact division; errors with NotDivisible when the
    /// reduction gets stuck (the remainder is then provably nonzero).
    pub fn exact_divide(&self, g: &Poly) -> Result<Poly> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        assert_eq!(self.nvars, g.nvars);
        let (g_lm, g_lc) = g.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while !rem.is_zero() {
            let (r_lm, r_lc) = rem.terms.iter().next_back().unwrap();
            let mut exps = Vec::with_capacity(self.nvars);
            for (a, b) in r_lm.0.iter().zip(g_lm.0.iter()) {
                if a < b {
                    return Err(Error::NotDivisible);
                }
                exps.push(a - b);
            }
            let c = r_lc.div(g_lc)?;
            let mono = Poly::monomial(self.nvars, exps, c);
            rem = rem.sub(&mono.mul(g));
            quot = quot.add(&mono);
        }
        Ok(quot)
    }

    /// The action (g.f)(z) = f(g^{-1} z) for an invertible matrix g.
    pub fn act(&self, g: &CMatrix) -> Result<Poly> {
        let n = self.nvars;
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeError(format!("matrix is not {n}x{n}")));
        }
        let inv = mat_inverse(g)?;
        self.substitute_linear(&inv)
    }

    /// f(M z): substitute z_i -> sum_j M[i][j] z_j.
    pub fn substitute_linear(&self, m: &CMatrix) -> Result<Poly> {
        let n = self.nvars;
        let subs: Vec<Poly> = (0..n)
            .map(|i| {
                let mut s = Poly::zero(n);
                for j in 0..n {
                    if !m[i][j].is_zero() {
                        s = s.add(&Poly::var(n, j).scale(&m[i][j]));
                    }
                }
                s
            })
            .collect();
        self.compose(&subs)
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (idx, c) in &self.terms {
            let e = idx.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = idx.0.clone();
            exps[i] = e - 1;
            out.insert_term(MultiIndex(exps), c.mul(&Cyclotomic::from_int(e as i64)));
        }
        out
    }

    /// Coefficient-wise complex conjugation (variables untouched).
    pub fn conj_coeffs(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in &self.terms {
            let mut v = c.approx();
            for (i, &e) in idx.0.iter().enumerate() {
                v *= point[i].powu(e);
            }
            acc += v;
        }
        acc
    }

    /// Coefficient vector on an externally supplied monomial list.
    pub fn to_vector(&self, basis: &BTreeMap<MultiIndex, usize>) -> Vec<Cyclotomic> {
        let mut v = vec![Cyclotomic::zero(); basis.len()];
        for (idx, c) in &self.terms {
            let pos = basis
                .get(idx)
                .unwrap_or_else(|| panic!("monomial outside basis: {idx:?}"));
            v[*pos] = c.clone();
        }
        v
    }

    pub fn format_with_letter(&self, letter: char) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (idx, c) in self.terms.iter().rev() {
            let mono = format_monomial(idx, self.nvars, letter);
            let (sign_neg, body) = format_coeff_mono(c, &mono);
            if first {
                if sign_neg {
                    out.push('-');
                }
                out.push_str(&body);
                first = false;
            } else {
                out.push_str(if sign_neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        out
    }
}

fn format_monomial(idx: &MultiIndex, nvars: usize, letter: char) -> String {
    let mut parts = vec![];
    for (i, &e) in idx.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = if nvars == 1 {
            letter.to_string()
        } else {
            format!("{letter}{}", i + 1)
        };
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

/// Returns (is_negative, body) with the sign factored out when possible.
fn format_coeff_mono(c: &Cyclotomic, mono: &str) -> (bool, String) {
    if let Some(r) = c.to_rational() {
        use num::traits::{One, Signed};
        let neg = r.is_negative();
        let mag = r.abs();
        let body = if mono.is_empty() {
            format_rational(&mag)
        } else if mag.is_one() {
            mono.to_string()
        } else {
            format!("{}*{}", format_rational(&mag), mono)
        };
        (neg, body)
    } else {
        let body = if mono.is_empty() {
            format!("({c})")
        } else {
            format!("({c})*{mono}")
        };
        (false, body)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with_letter('z'))
    }
}

// ---------------------------------------------------------------------------
// Polynomial matrices.

#[derive(Debug, Clone)]
pub struct PolyMatrix {
    pub entries: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        if self.entries.is_empty() {
            0
        } else {
            self.entries[0].len()
        }
    }
}

/// Determinant via expansion by minors with column-subset memoization
/// (exact, division-free; fine up to ~12 rows).
pub fn poly_det(m: &PolyMatrix) -> Result<Poly> {
    let d = m.nrows();
    if d == 0 || m.ncols() != d {
        return Err(Error::ShapeError(format!(
            "determinant of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let nvars = m.entries[0][0].nvars();
    Ok(det_rows(&m.entries, nvars))
}

pub(crate) fn det_rows(rows: &[Vec<Poly>], nvars: usize) -> Poly {
    let d = rows.len();
    use std::collections::HashMap;
    // minors[s] = det of the last r rows on the column set s.
    let mut minors: HashMap<u32, Poly> = HashMap::new();
    minors.insert(0, Poly::one(nvars));
    for r in (0..d).rev() {
        let size = d - r;
        let mut next: HashMap<u32, Poly> = HashMap::new();
        for mask in 0u32..(1 << d) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let mut acc = Poly::zero(nvars);
            let mut sign_pos = true;
            for j in 0..d {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let entry = &rows[r][j];
                if !entry.is_zero() {
                    let sub = &minors[&(mask & !(1 << j))];
                    let prod = entry.mul(sub);
                    acc = if sign_pos { acc.add(&prod) } else { acc.sub(&prod) };
                }
                sign_pos = !sign_pos;
            }
            next.insert(mask, acc);
        }
        minors = next;
    }
    minors.remove(&((1u32 << d) - 1)).unwrap()
}

/// Naive cofactor expansion, used to cross-check det_rows in tests.
pub fn poly_det_cofactor(m: &PolyMatrix) -> Result<Poly> {
    let d = m.nrows();
    if d == 0 || m.ncols() != d {
        return Err(Error::ShapeError("non-square".into()));
    }
    let nvars = m.entries[0][0].nvars();
    fn go(rows: &[Vec<Poly>], cols: &[usize], nvars: usize) -> Poly {
        if cols.len() == 1 {
            return rows[0][cols[0]].clone();
        }
        let mut acc = Poly::zero(nvars);
        for (pos, &j) in cols.iter().enumerate() {
            if rows[0][j].is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
            let sub = go(&rows[1..], &rest, nvars);
            let prod = rows[0][j].mul(&sub);
            acc = if pos % 2 == 0 { acc.add(&prod) } else { acc.sub(&prod) };
        }
        acc
    }
    let cols: Vec<usize> = (0..d).collect();
    Ok(go(&m.entries, &cols, nvars))
}

pub fn poly_jacobian_det(fs: &[Poly]) -> Result<Poly> {
    let n = fs.len();
    if n == 0 || fs.iter().any(|f| f.nvars() != n) {
        return Err(Error::ArityMismatch(format!(
            "{n} polynomials must each have {n} variables"
        )));
    }
    let entries: Vec<Vec<Poly>> = fs
        .iter()
        .map(|f| (0..n).map(|j| f.partial(j)).collect())
        .collect();
    poly_det(&PolyMatrix { entries })
}

/// All monomials in nvars variables with total degree <= d, graded-lex
/// ascending, mapped to their position.
pub fn monomial_basis(nvars: usize, d: u32) -> BTreeMap<MultiIndex, usize> {
    let mut idxs = vec![];
    fn gen(nvars: usize, pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if pos == nvars {
            out.push(MultiIndex(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            gen(nvars, pos + 1, left - e, cur, out);
            cur.pop();
        }
    }
    gen(nvars, 0, d, &mut vec![], &mut idxs);
    idxs.sort();
    idxs.into_iter()
        .enumerate()
        .map(|(pos, idx)| (idx, pos))
        .collect()
}

/// Homogeneous monomials of exact degree d, graded-lex ascending.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<MultiIndex> {
    monomial_basis(nvars, d)
        .into_keys()
        .filter(|m| m.degree() == d)
        .collect()
}

// ---------------------------------------------------------------------------
// Parsing.

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
    letter: char,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, nvars: usize, letter: char) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            nvars,
            letter,
            src,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at position {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("integer overflow"))
    }

    fn parse_expr(&mut self) -> Result<Poly> {
        let mut acc;
        match self.peek() {
            Some('-') => {
                self.bump();
                acc = self.parse_term()?.neg();
            }
            Some('+') => {
                self.bump();
                acc = self.parse_term()?;
            }
            _ => acc = self.parse_term()?,
        }
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?);
                }
                Some('-') => {
                    self.bump();
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<Poly> {
        let mut acc = self.parse_factor()?;
        while let Some('*') = self.peek() {
            self.bump();
            acc = acc.mul(&self.parse_factor()?);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Poly> {
        let base = self.parse_atom()?;
        if let Some('^') = self.peek() {
            self.bump();
            let e = self.parse_uint()?;
            if e > 64 {
                return Err(self.err("exponent too large"));
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.parse_expr()?;
                if self.bump() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let p = self.parse_uint()? as i64;
                let r = if self.peek() == Some('/') {
                    self.bump();
                    let q = self.parse_uint()? as i64;
                    if q == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    crate::cyclotomic::rat(p, q)
                } else {
                    crate::cyclotomic::rat_int(p)
                };
                Ok(Poly::constant(self.nvars, Cyclotomic::from_rational(r)))
            }
            Some('z') if self.letter != 'z' => self.parse_root_or_var('z', false),
            Some(c) if c == self.letter => self.parse_root_or_var(c, true),
            Some(c) => Err(self.err(&format!("unexpected character {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// Handles `z(N)^k` roots of unity, and variables when allowed.
    fn parse_root_or_var(&mut self, c: char, var_ok: bool) -> Result<Poly> {
        self.bump();
        match self.peek() {
            Some('(') if c == 'z' => {
                self.bump();
                let n = self.parse_uint()?;
                if self.bump() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                let mut e: i64 = 1;
                if self.peek() == Some('^') {
                    self.bump();
                    e = self.parse_uint()? as i64;
                }
                let z = Cyclotomic::zeta_pow(n, e)?;
                return Ok(Poly::constant(self.nvars, z));
            }
            Some(d) if d.is_ascii_digit() && var_ok => {
                self.bump();
                let i = d.to_digit(10).unwrap() as usize;
                if i == 0 || i > self.nvars {
                    return Err(self.err(&format!("variable {c}{i} outside 1..={}", self.nvars)));
                }
                return Ok(Poly::var(self.nvars, i - 1));
            }
            _ if var_ok => {
                if self.nvars != 1 {
                    return Err(self.err(&format!(
                        "bare {c} only allowed with one variable (have {})",
                        self.nvars
                    )));
                }
                return Ok(Poly::var(1, 0));
            }
            _ => Err(self.err("expected variable or root of unity")),
        }
    }
}

/// Parse a polynomial in variables z1..z9 (or z when nvars = 1).
pub fn parse_poly(src: &str, nvars: usize) -> Result<Poly> {
    let mut p = Parser::new(src, nvars, 'z');
    let out = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parse a polynomial in theta-coordinates u1..u9 (or u when nvars = 1).
pub fn parse_theta_poly(src: &str, nvars: usize) -> Result<Poly> {
    let mut p = Parser::new(src, nvars, 'u');
    let out = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parse a cyclotomic scalar written in the shared grammar.
pub fn parse_cyclotomic(src: &str) -> Result<Cyclotomic> {
    let p = parse_theta_poly(src, 1)?;
    if let Some(d) = p.total_degree() {
        if d > 0 {
            return Err(Error::Parse(format!("{src:?} is not a scalar")));
        }
    }
    Ok(p.coeff(&MultiIndex::zero(1)))
}
