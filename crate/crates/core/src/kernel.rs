//! Diagonal reproducing kernels with exact rational weights, their
//! group-invariance check, isotypic kernel blocks, transported kernels on the
//! image of the parameter map, and the reducing-submodule reports for
//! monomial maps on the disc and polydisc.
//!
//! Kernel truncations live in a 2n-variable polynomial ring: the first n
//! variables are z, the last n are the formal conjugates of w. The group acts
//! on the conjugate block through the entrywise-conjugated matrix, which
//! keeps all computations inside exact polynomial arithmetic.

use num::{BigInt, One, Zero};

use crate::cyclotomic::{Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::group::{group_builtin, GroupSpec, Irrep, PseudoreflectionGroup};
use crate::invariant::{inv_hsop, Hsop};
use crate::isotypic::{iso_module_rank, WeightedInnerProduct};
use crate::linalg::{identity, CMatrix};
use crate::poly::{monomial_basis, poly_jacobian_det, MultiIndex, Poly};
use crate::report::Report;

type Rule = Box<dyn Fn(&MultiIndex) -> Rational + Send + Sync>;

pub struct DiagonalKernel {
    pub nvars: usize,
    pub name: String,
    rule: Rule,
}

fn rat_u(p: u64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// (lambda)_k = lambda (lambda+1) ... (lambda+k-1).
fn rising_factorial(lambda: &Rational, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= lambda + rat_u(i as u64);
    }
    acc
}

fn factorial(k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 1..=k {
        acc *= rat_u(i as u64);
    }
    acc
}

impl DiagonalKernel {
    pub fn weight(&self, m: &MultiIndex) -> Rational {
        (self.rule)(m)
    }

    pub fn custom(
        nvars: usize,
        name: impl Into<String>,
        rule: impl Fn(&MultiIndex) -> Rational + Send + Sync + 'static,
    ) -> Self {
        DiagonalKernel {
            nvars,
            name: name.into(),
            rule: Box::new(rule),
        }
    }

    pub fn hardy_disc() -> Self {
        Self::custom(1, "hardy", |_| Rational::one())
    }

    /// Weighted Bergman weights a_k = (lambda)_k / k!; lambda = 2 is the
    /// unweighted Bergman space with a_k = k + 1.
    pub fn bergman_disc(lambda: Rational) -> Result<Self> {
        if lambda <= Rational::zero() {
            return Err(Error::InvalidParameter("bergman needs lambda > 0".into()));
        }
        let name = format!("bergman:{lambda}");
        Ok(Self::custom(1, name, move |m| {
            rising_factorial(&lambda, m.0[0]) / factorial(m.0[0])
        }))
    }

    pub fn dirichlet_disc() -> Self {
        Self::custom(1, "dirichlet", |m| {
            Rational::one() / rat_u(m.0[0] as u64 + 1)
        })
    }

    /// Tensor product over the polydisc: weights multiply factor-wise.
    pub fn product(factors: Vec<DiagonalKernel>) -> Self {
        let nvars: usize = factors.iter().map(|f| f.nvars).sum();
        let name = factors
            .iter()
            .map(|f| f.name.clone())
            .collect::<Vec<_>>()
            .join("*");
        DiagonalKernel {
            nvars,
            name,
            rule: Box::new(move |m| {
                let mut acc = Rational::one();
                let mut at = 0;
                for f in &factors {
                    let part = MultiIndex(m.0[at..at + f.nvars].to_vec());
                    acc *= f.weight(&part);
                    at += f.nvars;
                }
                acc
            }),
        }
    }

    /// Expansion of sum_k ((lambda)_k / k!) <z, w>^k on the ball:
    /// a_I = (lambda)_{|I|} / prod I_i!.
    pub fn ball_power(lambda: Rational, n: usize) -> Result<Self> {
        if lambda <= Rational::zero() {
            return Err(Error::InvalidParameter("ball needs lambda > 0".into()));
        }
        let name = format!("ball:{lambda}:{n}");
        Ok(Self::custom(n, name, move |m| {
            let total: u32 = m.0.iter().sum();
            let mut acc = rising_factorial(&lambda, total);
            for &e in &m.0 {
                acc /= factorial(e);
            }
            acc
        }))
    }

    /// Kernel spec grammar: `hardy`, `bergman:L`, `dirichlet`, `ball:L:n`,
    /// or `*`-joined one-variable specs for polydisc products; L is an
    /// integer or `p/q`.
    pub fn parse(spec: &str) -> Result<Self> {
        fn parse_lambda(s: &str) -> Result<Rational> {
            let parse_int = |t: &str| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
            };
            if let Some((p, q)) = s.split_once('/') {
                let den = parse_int(q)?;
                if den == 0 {
                    return Err(Error::Parse("zero denominator".into()));
                }
                Ok(crate::cyclotomic::rat(parse_int(p)?, den))
            } else {
                Ok(Rational::from_integer(BigInt::from(parse_int(s)?)))
            }
        }
        fn parse_one(tok: &str) -> Result<DiagonalKernel> {
            let mut parts = tok.split(':');
            match parts.next() {
                Some("hardy") => Ok(DiagonalKernel::hardy_disc()),
                Some("dirichlet") => Ok(DiagonalKernel::dirichlet_disc()),
                Some("bergman") => {
                    let l = parts
                        .next()
                        .ok_or_else(|| Error::Parse("bergman needs :lambda".into()))?;
                    DiagonalKernel::bergman_disc(parse_lambda(l)?)
                }
                Some("ball") => {
                    let l = parts
                        .next()
                        .ok_or_else(|| Error::Parse("ball needs :lambda:n".into()))?;
                    let n = parts
                        .next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse("ball needs :lambda:n".into()))?;
                    DiagonalKernel::ball_power(parse_lambda(l)?, n)
                }
                other => Err(Error::Parse(format!("unknown kernel {other:?}"))),
            }
        }
        let toks: Vec<&str> = spec.split('*').collect();
        if toks.len() == 1 {
            parse_one(toks[0])
        } else {
            let factors = toks
                .iter()
                .map(|t| parse_one(t))
                .collect::<Result<Vec<_>>>()?;
            if factors.iter().any(|f| f.nvars != 1) {
                return Err(Error::Parse(
                    "polydisc products take one-variable factors".into(),
                ));
            }
            Ok(DiagonalKernel::product(factors))
        }
    }

    /// Sum of a_I z^I wbar^I over |I| <= D, in 2n variables.
    pub fn truncate(&self, d: u32) -> Poly {
        let n = self.nvars;
        let mut acc = Poly::zero(2 * n);
        for m in monomial_basis(n, d).into_keys() {
            let a = self.weight(&m);
            if a.is_zero() {
                continue;
            }
            let mut exps = m.0.clone();
            exps.extend_from_slice(&m.0);
            acc = acc.add(&Poly::monomial(
                2 * n,
                exps,
                Cyclotomic::from_rational(a),
            ));
        }
        acc
    }

    pub fn inner_product(&self, d: u32) -> Result<WeightedInnerProduct> {
        let trunc_rule = &self.rule;
        WeightedInnerProduct::new(self.nvars, d, |m| (trunc_rule)(m))
    }
}

fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.len(), b.len());
    let mut out = identity(na + nb);
    for i in 0..na {
        for j in 0..na {
            out[i][j] = a[i][j].clone();
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            out[na + i][na + j] = b[i][j].clone();
        }
    }
    out
}

fn conj_matrix(a: &CMatrix) -> CMatrix {
    a.iter()
        .map(|row| row.iter().map(|c| c.conj()).collect())
        .collect()
}

/// K(sigma z, sigma w) = K(z, w) for all generators, exact at truncation.
pub fn ker_check_invariance(k: &DiagonalKernel, g: &PseudoreflectionGroup, d: u32) -> bool {
    if k.nvars != g.n {
        return false;
    }
    let trunc = k.truncate(d);
    g.generators.iter().all(|&gi| {
        let m = &g.elements[gi].matrix;
        let both = block_diag(m, &conj_matrix(m));
        trunc.substitute_linear(&both).map(|t| t == trunc).unwrap_or(false)
    })
}

/// The kernel of the reducing submodule attached to an irrep:
/// (deg / |G|) sum_sigma conj(chi(sigma)) K(sigma^{-1} z, w), truncated.
pub fn ker_block(
    k: &DiagonalKernel,
    g: &PseudoreflectionGroup,
    irrep: &Irrep,
    d: u32,
) -> Result<Poly> {
    if !ker_check_invariance(k, g, d) {
        return Err(Error::KernelNotInvariant);
    }
    let trunc = k.truncate(d);
    let id = identity(g.n);
    let mut acc = Poly::zero(2 * g.n);
    for (s, e) in g.elements.iter().enumerate() {
        let chi = irrep.character[s].conj();
        if chi.is_zero() {
            continue;
        }
        let inv = &g.elements[g.inverse[e.index]].matrix;
        let moved = trunc.substitute_linear(&block_diag(inv, &id))?;
        acc = acc.add(&moved.scale(&chi));
    }
    let scale = crate::cyclotomic::rat(irrep.degree as i64, g.order() as i64);
    Ok(acc.scale(&Cyclotomic::from_rational(scale)))
}

/// Coefficients of the kernel transported to the image of the parameter map,
/// normalized so that |G|^2 p(z) K'(theta(z), theta(w)) conj(p(w)) equals the
/// kernel block.
#[derive(Debug, Clone)]
pub struct TransportedKernel {
    pub irrep: String,
    pub generator: Poly,
    pub coeffs: Vec<(MultiIndex, Rational)>,
}

fn cyclic_moduli(g: &PseudoreflectionGroup) -> Result<Vec<u64>> {
    match &g.spec {
        Some(GroupSpec::Cyclic(m)) => Ok(vec![*m]),
        Some(GroupSpec::ProductCyclic(ms)) => Ok(ms.clone()),
        _ => Err(Error::Unsupported(
            "transported kernels need a cyclic or product-of-cyclics group".into(),
        )),
    }
}

/// Solves |G|^2 p(z) K'(theta(z), theta(w)) conj(p(w)) = K_irrep(z, w) for
/// the coefficients of K' by exponent bookkeeping, then checks the
/// reconstruction exactly.
pub fn ker_transported(
    k: &DiagonalKernel,
    g: &PseudoreflectionGroup,
    irrep: &Irrep,
    p: &Poly,
    d: u32,
) -> Result<TransportedKernel> {
    if irrep.degree != 1 {
        return Err(Error::Unsupported(
            "transported kernels are scalar: need a one-dimensional irrep".into(),
        ));
    }
    let ms = cyclic_moduli(g)?;
    let n = g.n;
    if p.num_terms() != 1 {
        return Err(Error::InvalidParameter("generator must be a monomial".into()));
    }
    let (e_idx, e_coeff) = p.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
    if !e_coeff.is_one() {
        return Err(Error::InvalidParameter("generator must be monic".into()));
    }
    let block = ker_block(k, g, irrep, d)?;
    let gsq = rat_u((g.order() * g.order()) as u64);
    let mut coeffs: Vec<(MultiIndex, Rational)> = vec![];
    for (idx, c) in block.terms() {
        let (zi, wi) = (&idx.0[..n], &idx.0[n..]);
        if zi != wi {
            return Err(Error::NotDivisible);
        }
        let mut kexp = vec![0u32; n];
        for i in 0..n {
            if zi[i] < e_idx.0[i] || (zi[i] - e_idx.0[i]) % ms[i] as u32 != 0 {
                return Err(Error::NotDivisible);
            }
            kexp[i] = (zi[i] - e_idx.0[i]) / ms[i] as u32;
        }
        let c = c
            .to_rational()
            .ok_or_else(|| Error::InternalInconsistency("non-rational block weight".into()))?;
        coeffs.push((MultiIndex(kexp), c / gsq.clone()));
    }
    coeffs.sort_by(|a, b| a.0.cmp(&b.0));
    // Reconstruction check: the round trip is exact.
    let mut recon = Poly::zero(2 * n);
    for (kexp, a) in &coeffs {
        let mut exps = vec![0u32; 2 * n];
        for i in 0..n {
            exps[i] = e_idx.0[i] + kexp.0[i] * ms[i] as u32;
            exps[n + i] = exps[i];
        }
        recon = recon.add(&Poly::monomial(
            2 * n,
            exps,
            Cyclotomic::from_rational(a * gsq.clone()),
        ));
    }
    if recon != block {
        return Err(Error::InternalInconsistency(
            "transported kernel round trip failed".into(),
        ));
    }
    Ok(TransportedKernel {
        irrep: irrep.label.clone(),
        generator: p.clone(),
        coeffs,
    })
}

fn embed_z(f: &Poly, n: usize) -> Poly {
    let mut out = Poly::zero(2 * n);
    for (idx, c) in f.terms() {
        let mut exps = idx.0.clone();
        exps.extend(std::iter::repeat(0).take(n));
        out = out.add(&Poly::monomial(2 * n, exps, c.clone()));
    }
    out
}

fn embed_w(f: &Poly, n: usize) -> Poly {
    let mut out = Poly::zero(2 * n);
    for (idx, c) in f.terms() {
        let mut exps = vec![0u32; n];
        exps.extend_from_slice(&idx.0);
        out = out.add(&Poly::monomial(2 * n, exps, c.conj()));
    }
    out
}

/// The determinant-character block factors through the Jacobian of the
/// parameters: the block divides exactly by J(z) conj(J)(w) and the quotient
/// is invariant in each variable group, certifying it is a function of
/// (theta(z), theta(w)).
pub fn ker_jacobian_block(
    k: &DiagonalKernel,
    g: &PseudoreflectionGroup,
    hsop: &Hsop,
    d: u32,
) -> Result<Report> {
    let mu = g.irrep_by_label("det")?.clone();
    let block = ker_block(k, g, &mu, d)?;
    let jac = poly_jacobian_det(&hsop.thetas)?;
    let jz = embed_z(&jac, g.n);
    let jw = embed_w(&jac, g.n);
    let mut report = Report::new();
    let quotient = block
        .exact_divide(&jz)
        .and_then(|q| q.exact_divide(&jw));
    report.record("block divisible by J(z) conj(J)(w)", quotient.is_ok());
    if let Ok(q) = quotient {
        let id = identity(g.n);
        let z_invariant = g.generators.iter().all(|&gi| {
            let m = &g.elements[gi].matrix;
            q.substitute_linear(&block_diag(m, &id)).map(|t| t == q).unwrap_or(false)
        });
        report.record("quotient invariant in z", z_invariant);
        let w_invariant = g.generators.iter().all(|&gi| {
            let m = conj_matrix(&g.elements[gi].matrix);
            q.substitute_linear(&block_diag(&id, &m)).map(|t| t == q).unwrap_or(false)
        });
        report.record("quotient invariant in conj(w)", w_invariant);
    }
    Ok(report)
}

fn reducing_report(
    g: &PseudoreflectionGroup,
    k: &DiagonalKernel,
    ms: &[u64],
    d: u32,
) -> Result<Report> {
    let mut report = Report::new();
    let hsop = inv_hsop(g)?;
    let w = k.inner_product(d)?;
    let n = g.n;
    let monos: Vec<MultiIndex> = monomial_basis(n, d).into_keys().collect();
    let expected_blocks: u64 = ms.iter().product();
    report.record(
        format!("block count {} = product of moduli", g.order()),
        g.order() as u64 == expected_blocks,
    );
    let mut seen = std::collections::BTreeSet::new();
    let mut block_sets: Vec<Vec<MultiIndex>> = vec![];
    for ir in &g.irreps {
        let p = crate::isotypic::Projector::coarse(g, ir);
        let mut members = vec![];
        let mut clean = true;
        for m in &monos {
            let mono = Poly::monomial(n, m.0.clone(), Cyclotomic::one());
            let proj = p.apply(g, &mono);
            if proj == mono {
                members.push(m.clone());
            } else if !proj.is_zero() {
                clean = false;
            }
        }
        report.record(
            format!("projection for {} acts diagonally on monomials", ir.label),
            clean,
        );
        // Every member shares one residue pattern: members of the span
        // z^{m k + j} for a fixed offset j.
        let offsets: std::collections::BTreeSet<Vec<u32>> = members
            .iter()
            .map(|m| {
                m.0.iter()
                    .zip(ms.iter())
                    .map(|(&e, &mi)| e % mi as u32)
                    .collect()
            })
            .collect();
        report.record(
            format!("block {} is one residue class", ir.label),
            offsets.len() == 1,
        );
        for m in &members {
            seen.insert(m.clone());
        }
        block_sets.push(members);
        report.record(
            format!("block {} has rank 1", ir.label),
            iso_module_rank(g, &hsop, ir, d) == 1,
        );
    }
    report.record("blocks cover every monomial", seen.len() == monos.len());
    // Mutual orthogonality under the weighted inner product.
    let mut orthogonal = true;
    for a in 0..block_sets.len() {
        for b in a + 1..block_sets.len() {
            for ma in &block_sets[a] {
                for mb in &block_sets[b] {
                    let pa = Poly::monomial(n, ma.0.clone(), Cyclotomic::one());
                    let pb = Poly::monomial(n, mb.0.clone(), Cyclotomic::one());
                    if !w.inner(&pa, &pb).is_zero() {
                        orthogonal = false;
                    }
                }
            }
        }
    }
    report.record("blocks mutually orthogonal", orthogonal);
    Ok(report)
}

/// Reducing-submodule report for z -> z^m on the disc: the m kernel blocks
/// are the residue-class spans, mutually orthogonal, complete, and each of
/// rank one over C[z^m].
pub fn ker_disc_reducing(m: u64, k: &DiagonalKernel, d: u32) -> Result<Report> {
    if k.nvars != 1 {
        return Err(Error::ShapeError("disc report needs a one-variable kernel".into()));
    }
    if m == 1 {
        let mut report = Report::new();
        report.record("single block spans everything", true);
        return Ok(report);
    }
    let g = group_builtin(&GroupSpec::Cyclic(m))?;
    reducing_report(&g, k, &[m], d)
}

/// The polydisc analogue for z -> (z_1^{m_1}, ..., z_n^{m_n}).
pub fn ker_polydisc_reducing(ms: &[u64], k: &DiagonalKernel, d: u32) -> Result<Report> {
    if k.nvars != ms.len() {
        return Err(Error::ShapeError(
            "kernel arity must match the exponent list".into(),
        ));
    }
    let g = group_builtin(&GroupSpec::ProductCyclic(ms.to_vec()))?;
    reducing_report(&g, k, ms, d)
}
