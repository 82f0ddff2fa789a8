//! Invariant rings of the catalog groups: canonical homogeneous systems of
//! parameters, the degree bookkeeping coming from the Poincaré series, module
//! bases of C[z] over the invariant ring, and exact rewriting of invariant
//! polynomials in terms of the parameters.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{GroupSpec, PseudoreflectionGroup};
use crate::linalg::{CMatrix, LinearSolver, RowSpace};
use crate::poly::{monomials_of_degree, poly_jacobian_det, MultiIndex, Poly};

#[derive(Debug, Clone)]
pub struct Hsop {
    pub thetas: Vec<Poly>,
    pub degrees: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct ModuleBasis {
    pub polys: Vec<Poly>,
    pub degrees: Vec<u32>,
}

/// An invariant written as a polynomial q(u_1, ..., u_n) in the parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantExpression {
    pub q: Poly,
}

fn elementary_symmetric(nvars: usize, k: usize) -> Poly {
    let mut acc = Poly::zero(nvars);
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let mut exps = vec![0u32; nvars];
        for &i in &subset {
            exps[i] = 1;
        }
        acc = acc.add(&Poly::monomial(
            nvars,
            exps,
            crate::cyclotomic::Cyclotomic::one(),
        ));
        // next k-subset of {0..nvars}
        let mut i = k;
        loop {
            if i == 0 {
                return acc;
            }
            i -= 1;
            if subset[i] != i + nvars - k {
                break;
            }
            if i == 0 {
                return acc;
            }
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

fn shift_vars(f: &Poly, total: usize, offset: usize) -> Poly {
    let mut out = Poly::zero(total);
    for (idx, c) in f.terms() {
        let mut exps = vec![0u32; total];
        for (i, &e) in idx.0.iter().enumerate() {
            exps[offset + i] = e;
        }
        out = out.add(&Poly::monomial(total, exps, c.clone()));
    }
    out
}

fn hsop_for_spec(spec: &GroupSpec) -> Result<Vec<Poly>> {
    match spec {
        GroupSpec::Cyclic(m) => Ok(vec![Poly::var(1, 0).pow(*m as u32)]),
        GroupSpec::ProductCyclic(ms) => {
            let n = ms.len();
            Ok((0..n)
                .map(|i| Poly::var(n, i).pow(ms[i] as u32))
                .collect())
        }
        GroupSpec::Symmetric(n) => Ok((1..=*n).map(|k| elementary_symmetric(*n, k)).collect()),
        GroupSpec::Dihedral(k) => {
            let z1 = Poly::var(2, 0);
            let z2 = Poly::var(2, 1);
            Ok(vec![
                z1.mul(&z2),
                z1.pow(*k as u32).add(&z2.pow(*k as u32)),
            ])
        }
        GroupSpec::Product(a, b) => {
            let ta = hsop_for_spec(a)?;
            let tb = hsop_for_spec(b)?;
            let na = a.dimension();
            let total = na + b.dimension();
            let mut out: Vec<Poly> = ta.iter().map(|f| shift_vars(f, total, 0)).collect();
            out.extend(tb.iter().map(|f| shift_vars(f, total, na)));
            Ok(out)
        }
    }
}

fn check_invariant_on_generators(g: &PseudoreflectionGroup, f: &Poly) -> Result<()> {
    for &gi in &g.generators {
        if f.act(&g.elements[gi].matrix)? != *f {
            return Err(Error::NotInvariant(format!("{f}")));
        }
    }
    Ok(())
}

/// The canonical homogeneous system of parameters of a catalog group, checked
/// at construction: each theta is invariant, the degrees multiply to the group
/// order, sum of (d_i - 1) matches the pseudoreflection count, and the
/// Jacobian determinant is nonzero (algebraic independence).
pub fn inv_hsop(g: &PseudoreflectionGroup) -> Result<Hsop> {
    let spec = g
        .spec
        .as_ref()
        .ok_or_else(|| Error::Unsupported("hsop registry needs a builtin group".into()))?;
    let thetas = hsop_for_spec(spec)?;
    let degrees: Vec<u32> = thetas
        .iter()
        .map(|t| t.homogeneous_degree().expect("homogeneous theta"))
        .collect();
    for t in &thetas {
        check_invariant_on_generators(g, t)?;
    }
    let prod: u64 = degrees.iter().map(|&d| d as u64).product();
    if prod != g.order() as u64 {
        return Err(Error::InternalInconsistency(
            "hsop degrees do not multiply to |G|".into(),
        ));
    }
    let sum: usize = degrees.iter().map(|&d| d as usize - 1).sum();
    if sum != g.pseudoreflections().len() {
        return Err(Error::InternalInconsistency(
            "sum(d_i - 1) mismatches pseudoreflection count".into(),
        ));
    }
    if poly_jacobian_det(&thetas)?.is_zero() {
        return Err(Error::InternalInconsistency("hsop jacobian vanishes".into()));
    }
    Ok(Hsop { thetas, degrees })
}

/// Expands prod_i (1 + t + ... + t^{d_i - 1}); entry k is the number of basis
/// elements of degree k.
pub fn poincare_coefficients(degrees: &[u32]) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for &d in degrees {
        let mut next = vec![0u64; coeffs.len() + d as usize - 1];
        for (i, &c) in coeffs.iter().enumerate() {
            for j in 0..d as usize {
                next[i + j] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Sorted multiset of module-basis degrees predicted by the Poincaré series.
pub fn inv_basis_degrees(hsop: &Hsop) -> Vec<u32> {
    let coeffs = poincare_coefficients(&hsop.degrees);
    let mut out = vec![];
    for (k, &c) in coeffs.iter().enumerate() {
        for _ in 0..c {
            out.push(k as u32);
        }
    }
    out
}

fn monomial_basis_polys(spec: &GroupSpec) -> Option<Vec<MultiIndex>> {
    match spec {
        GroupSpec::Cyclic(m) => Some((0..*m as u32).map(|k| MultiIndex(vec![k])).collect()),
        GroupSpec::ProductCyclic(ms) => {
            let mut out = vec![MultiIndex(vec![])];
            for &m in ms {
                let mut next = vec![];
                for t in &out {
                    for k in 0..m as u32 {
                        let mut e = t.0.clone();
                        e.push(k);
                        next.push(MultiIndex(e));
                    }
                }
                out = next;
            }
            Some(out)
        }
        GroupSpec::Symmetric(n) => {
            // Staircase monomials z_1^{k_1} ... z_{n-1}^{k_{n-1}}, 0 <= k_i <= i.
            let mut out = vec![vec![]];
            for i in 1..*n {
                let mut next = vec![];
                for t in &out {
                    for k in 0..=i as u32 {
                        let mut e: Vec<u32> = t.clone();
                        e.push(k);
                        next.push(e);
                    }
                }
                out = next;
            }
            Some(
                out.into_iter()
                    .map(|mut e| {
                        e.push(0);
                        MultiIndex(e)
                    })
                    .collect(),
            )
        }
        GroupSpec::Dihedral(_) => None,
        GroupSpec::Product(a, b) => {
            let ba = monomial_basis_polys(a)?;
            let bb = monomial_basis_polys(b)?;
            let mut out = vec![];
            for x in &ba {
                for y in &bb {
                    let mut e = x.0.clone();
                    e.extend_from_slice(&y.0);
                    out.push(MultiIndex(e));
                }
            }
            Some(out)
        }
    }
}

/// Per-degree coinvariant reduction: inside each homogeneous degree, row
/// reduce the span of theta multiples and keep the complement coordinates.
/// Coordinates are ordered by ascending graded-lex index, so pivots consume
/// the earliest monomials and the survivors are deterministic.
fn coinvariant_basis(hsop: &Hsop, predicted: &[u32]) -> Result<Vec<MultiIndex>> {
    let n = hsop.thetas[0].nvars();
    let max_deg = *predicted.last().unwrap();
    let mut counts = vec![0usize; max_deg as usize + 1];
    for &e in predicted {
        counts[e as usize] += 1;
    }
    let mut out = vec![];
    for delta in 0..=max_deg {
        let monos = monomials_of_degree(n, delta);
        let index: HashMap<&MultiIndex, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rs = RowSpace::new(monos.len());
        for (ti, theta) in hsop.thetas.iter().enumerate() {
            let d = hsop.degrees[ti];
            if d > delta {
                continue;
            }
            for h in monomials_of_degree(n, delta - d) {
                let prod = theta.mul(&Poly::monomial(
                    n,
                    h.0.clone(),
                    crate::cyclotomic::Cyclotomic::one(),
                ));
                let mut v = vec![crate::cyclotomic::Cyclotomic::zero(); monos.len()];
                for (idx, c) in prod.terms() {
                    v[index[idx]] = c.clone();
                }
                rs.insert(v);
            }
        }
        let pivots: std::collections::BTreeSet<usize> = rs.pivots().iter().copied().collect();
        let free: Vec<&MultiIndex> = monos
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .map(|(_, m)| m)
            .collect();
        if free.len() != counts[delta as usize] {
            return Err(Error::InternalInconsistency(format!(
                "coinvariant count {} at degree {delta}, expected {}",
                free.len(),
                counts[delta as usize]
            )));
        }
        out.extend(free.into_iter().cloned());
    }
    Ok(out)
}

/// A homogeneous basis of C[z] as a free module over the invariant ring, with
/// closed forms for the monomial families and the coinvariant reduction
/// otherwise. Degrees are checked against the Poincaré prediction.
pub fn inv_module_basis(g: &PseudoreflectionGroup, hsop: &Hsop) -> Result<ModuleBasis> {
    let spec = g
        .spec
        .as_ref()
        .ok_or_else(|| Error::Unsupported("module basis needs a builtin group".into()))?;
    let predicted = inv_basis_degrees(hsop);
    let mut monos = match monomial_basis_polys(spec) {
        Some(m) => m,
        None => coinvariant_basis(hsop, &predicted)?,
    };
    monos.sort();
    let degrees: Vec<u32> = monos.iter().map(|m| m.degree()).collect();
    let mut sorted = degrees.clone();
    sorted.sort_unstable();
    if sorted != predicted {
        return Err(Error::InternalInconsistency(
            "module basis degrees mismatch Poincaré prediction".into(),
        ));
    }
    let n = g.n;
    let polys = monos
        .into_iter()
        .map(|m| Poly::monomial(n, m.0, crate::cyclotomic::Cyclotomic::one()))
        .collect();
    Ok(ModuleBasis { polys, degrees })
}

/// Exponent tuples K with sum K_i * degrees_i = target.
pub fn weighted_exponents(degrees: &[u32], target: u32) -> Vec<Vec<u32>> {
    fn rec(degrees: &[u32], target: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if degrees.is_empty() {
            if target == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let d = degrees[0];
        let mut k = 0;
        while k * d <= target {
            acc.push(k);
            rec(&degrees[1..], target - k * d, acc, out);
            acc.pop();
            k += 1;
        }
    }
    let mut out = vec![];
    rec(degrees, target, &mut vec![], &mut out);
    out
}

/// Rewrites invariants in the parameters, caching one linear solver per
/// homogeneous degree so repeated calls against the same hsop stay cheap.
pub struct InvRewriter {
    hsop: Hsop,
    cache: HashMap<u32, (Vec<Vec<u32>>, LinearSolver)>,
}

impl InvRewriter {
    pub fn new(hsop: &Hsop) -> Self {
        InvRewriter {
            hsop: hsop.clone(),
            cache: HashMap::new(),
        }
    }

    fn solver_for(&mut self, delta: u32) -> &(Vec<Vec<u32>>, LinearSolver) {
        let hsop = &self.hsop;
        self.cache.entry(delta).or_insert_with(|| {
            let n = hsop.thetas[0].nvars();
            let tuples = weighted_exponents(&hsop.degrees, delta);
            let monos = monomials_of_degree(n, delta);
            let index: HashMap<&MultiIndex, usize> =
                monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
            // Rows: degree-delta monomials; columns: products theta^K.
            let mut a: CMatrix =
                vec![vec![crate::cyclotomic::Cyclotomic::zero(); tuples.len()]; monos.len()];
            for (col, tuple) in tuples.iter().enumerate() {
                let mut prod = Poly::one(n);
                for (i, &k) in tuple.iter().enumerate() {
                    if k > 0 {
                        prod = prod.mul(&hsop.thetas[i].pow(k));
                    }
                }
                for (idx, c) in prod.terms() {
                    a[index[idx]][col] = c.clone();
                }
            }
            (tuples, LinearSolver::new(&a))
        })
    }

    /// q with q(theta_1, ..., theta_n) = f, exact; fails with NotInvariant
    /// when f lies outside the invariant ring.
    pub fn rewrite(&mut self, f: &Poly) -> Result<InvariantExpression> {
        let n = self.hsop.thetas[0].nvars();
        if f.nvars() != n {
            return Err(Error::ArityMismatch(format!(
                "poly has {} variables, hsop has {n}",
                f.nvars()
            )));
        }
        let nthetas = self.hsop.thetas.len();
        let mut q = Poly::zero(nthetas);
        let Some(maxdeg) = f.total_degree() else {
            return Ok(InvariantExpression { q });
        };
        for delta in 0..=maxdeg {
            let comp = f.homogeneous_component(delta);
            if comp.is_zero() {
                continue;
            }
            let monos = monomials_of_degree(n, delta);
            let b: Vec<crate::cyclotomic::Cyclotomic> =
                monos.iter().map(|m| comp.coeff(m)).collect();
            let (tuples, solver) = self.solver_for(delta);
            let Some(x) = solver.solve(&b) else {
                return Err(Error::NotInvariant(format!(
                    "degree-{delta} component is not in the invariant ring"
                )));
            };
            for (col, tuple) in tuples.iter().enumerate() {
                if !x[col].is_zero() {
                    q = q.add(&Poly::monomial(nthetas, tuple.clone(), x[col].clone()));
                }
            }
        }
        Ok(InvariantExpression { q })
    }
}

pub fn inv_rewrite(f: &Poly, hsop: &Hsop) -> Result<InvariantExpression> {
    InvRewriter::new(hsop).rewrite(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_builtin, GroupSpec};
    use crate::poly::{parse_poly, parse_theta_poly};

    fn builtin(spec: GroupSpec) -> PseudoreflectionGroup {
        group_builtin(&spec).unwrap()
    }

    #[test]
    fn hsop_examples() {
        let s2 = builtin(GroupSpec::Symmetric(2));
        let h = inv_hsop(&s2).unwrap();
        assert_eq!(h.thetas[0], parse_poly("z1 + z2", 2).unwrap());
        assert_eq!(h.thetas[1], parse_poly("z1*z2", 2).unwrap());
        assert_eq!(h.degrees, vec![1, 2]);

        let z4 = builtin(GroupSpec::Cyclic(4));
        let h = inv_hsop(&z4).unwrap();
        assert_eq!(h.thetas[0], parse_poly("z^4", 1).unwrap());

        let d5 = builtin(GroupSpec::Dihedral(5));
        let h = inv_hsop(&d5).unwrap();
        assert_eq!(h.thetas[0], parse_poly("z1*z2", 2).unwrap());
        assert_eq!(h.thetas[1], parse_poly("z1^5 + z2^5", 2).unwrap());

        let s4 = builtin(GroupSpec::Symmetric(4));
        let h = inv_hsop(&s4).unwrap();
        assert_eq!(h.degrees, vec![1, 2, 3, 4]);

        let prod = builtin(GroupSpec::Product(
            Box::new(GroupSpec::Cyclic(2)),
            Box::new(GroupSpec::Symmetric(2)),
        ));
        let h = inv_hsop(&prod).unwrap();
        assert_eq!(h.thetas[0], parse_poly("z1^2", 3).unwrap());
        assert_eq!(h.thetas[1], parse_poly("z2 + z3", 3).unwrap());
        assert_eq!(h.thetas[2], parse_poly("z2*z3", 3).unwrap());
    }

    #[test]
    fn basis_degree_multisets() {
        let h = Hsop {
            thetas: vec![Poly::var(2, 0), Poly::var(2, 1)],
            degrees: vec![1, 2],
        };
        assert_eq!(inv_basis_degrees(&h), vec![0, 1]);
        let h = Hsop {
            thetas: vec![],
            degrees: vec![2, 3],
        };
        assert_eq!(inv_basis_degrees(&h), vec![0, 1, 1, 2, 2, 3]);
        let h = Hsop {
            thetas: vec![],
            degrees: vec![5],
        };
        assert_eq!(inv_basis_degrees(&h), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn module_basis_closed_forms() {
        let s2 = builtin(GroupSpec::Symmetric(2));
        let b = inv_module_basis(&s2, &inv_hsop(&s2).unwrap()).unwrap();
        assert_eq!(b.polys[0], Poly::one(2));
        assert_eq!(b.polys[1], parse_poly("z1", 2).unwrap());

        let z3 = builtin(GroupSpec::Cyclic(3));
        let b = inv_module_basis(&z3, &inv_hsop(&z3).unwrap()).unwrap();
        let expect: Vec<Poly> = ["1", "z", "z^2"]
            .iter()
            .map(|s| parse_poly(s, 1).unwrap())
            .collect();
        assert_eq!(b.polys, expect);
    }

    #[test]
    fn dihedral_coinvariant_basis() {
        let d3 = builtin(GroupSpec::Dihedral(3));
        let b = inv_module_basis(&d3, &inv_hsop(&d3).unwrap()).unwrap();
        let mut degs = b.degrees.clone();
        degs.sort_unstable();
        assert_eq!(degs, vec![0, 1, 1, 2, 2, 3]);
        let set: std::collections::BTreeSet<String> =
            b.polys.iter().map(|p| p.to_string()).collect();
        let expect: std::collections::BTreeSet<String> =
            ["1", "z1", "z2", "z1^2", "z2^2", "z1^3"]
                .iter()
                .map(|s| parse_poly(s, 2).unwrap().to_string())
                .collect();
        assert_eq!(set, expect);
    }

    #[test]
    fn all_small_builtins_match_poincare() {
        for spec in [
            GroupSpec::Cyclic(2),
            GroupSpec::Cyclic(5),
            GroupSpec::Symmetric(3),
            GroupSpec::Dihedral(3),
            GroupSpec::Dihedral(4),
            GroupSpec::Dihedral(6),
            GroupSpec::ProductCyclic(vec![2, 3]),
            GroupSpec::Product(
                Box::new(GroupSpec::Cyclic(2)),
                Box::new(GroupSpec::Symmetric(2)),
            ),
        ] {
            let g = builtin(spec);
            let h = inv_hsop(&g).unwrap();
            let b = inv_module_basis(&g, &h).unwrap();
            assert_eq!(b.polys.len(), g.order());
            assert_eq!(b.polys[0], Poly::one(g.n));
            let mut degs = b.degrees.clone();
            degs.sort_unstable();
            assert_eq!(degs, inv_basis_degrees(&h), "degrees for {}", g.name);
            // Degree sum identity: sum e_j = |G| * (#pseudoreflections) / 2.
            let sum: u32 = b.degrees.iter().sum();
            assert_eq!(
                sum as usize * 2,
                g.order() * g.pseudoreflections().len(),
                "degree sum for {}",
                g.name
            );
        }
    }

    #[test]
    fn rewrite_examples() {
        let s2 = builtin(GroupSpec::Symmetric(2));
        let h = inv_hsop(&s2).unwrap();
        let q = inv_rewrite(&parse_poly("z1^2 + z2^2", 2).unwrap(), &h).unwrap();
        assert_eq!(q.q, parse_theta_poly("u1^2 - 2*u2", 2).unwrap());

        let q = inv_rewrite(&parse_poly("7", 2).unwrap(), &h).unwrap();
        assert_eq!(q.q, parse_theta_poly("7", 2).unwrap());

        let z3 = builtin(GroupSpec::Cyclic(3));
        let h3 = inv_hsop(&z3).unwrap();
        let q = inv_rewrite(&parse_poly("z^6", 1).unwrap(), &h3).unwrap();
        assert_eq!(q.q, parse_theta_poly("u^2", 1).unwrap());

        assert!(matches!(
            inv_rewrite(&parse_poly("z1", 2).unwrap(), &h),
            Err(Error::NotInvariant(_))
        ));
    }

    #[test]
    fn rewrite_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for spec in [GroupSpec::Symmetric(3), GroupSpec::Dihedral(4)] {
            let g = builtin(spec);
            let h = inv_hsop(&g).unwrap();
            let mut rewriter = InvRewriter::new(&h);
            for _ in 0..10 {
                let mut q = Poly::zero(g.n);
                for _ in 0..4 {
                    let exps: Vec<u32> =
                        (0..g.n).map(|_| rng.gen_range(0..3u32)).collect();
                    let c = crate::cyclotomic::Cyclotomic::from_int(rng.gen_range(-5..6));
                    q = q.add(&Poly::monomial(g.n, exps, c));
                }
                let f = q.compose(&h.thetas).unwrap();
                let back = rewriter.rewrite(&f).unwrap();
                assert_eq!(back.q.compose(&h.thetas).unwrap(), f);
            }
        }
    }

    #[test]
    fn freeness_dimension_count() {
        // dim C[z]_{<=D} = sum_j #{K : sum K_i d_i <= D - e_j}
        for spec in [GroupSpec::Symmetric(2), GroupSpec::Dihedral(3)] {
            let g = builtin(spec);
            let h = inv_hsop(&g).unwrap();
            let b = inv_module_basis(&g, &h).unwrap();
            for cap in 0..=8u32 {
                let total: usize = (0..=cap)
                    .map(|d| monomials_of_degree(g.n, d).len())
                    .sum();
                let mut pieces = 0usize;
                for &e in &b.degrees {
                    if e > cap {
                        continue;
                    }
                    for delta in 0..=(cap - e) {
                        pieces += weighted_exponents(&h.degrees, delta).len();
                    }
                }
                assert_eq!(total, pieces, "{} at cap {cap}", g.name);
            }
        }
    }
}
