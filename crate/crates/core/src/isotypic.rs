//! Isotypic projection operators on polynomial spaces: the coarse averaging
//! projections attached to each irreducible character, their matrix-entry
//! refinements, the operator algebra relations between them, commutation with
//! multiplication by invariants, adjoint identities under kernel-induced
//! inner products, and module-rank counts at truncation.

use std::collections::BTreeMap;

use crate::cyclotomic::{rat, Cyclotomic, Rational};
use crate::error::{Error, Result};
use crate::group::{Irrep, PseudoreflectionGroup};
use crate::invariant::Hsop;
use crate::linalg::RowSpace;
use crate::poly::{monomial_basis, MultiIndex, Poly};
use crate::report::Report;

/// f composed with the inverse of element idx, using the group's inverse
/// table instead of a matrix inversion.
pub fn act_element(g: &PseudoreflectionGroup, idx: usize, f: &Poly) -> Poly {
    f.substitute_linear(&g.elements[g.inverse[idx]].matrix)
        .expect("group matrix has the right shape")
}

/// A projection P f = scale * sum_sigma coeff(sigma) * f(sigma^{-1} z),
/// with the coefficient table precomputed per group element.
///
/// For the coarse projection of an irrep the coefficient is the character at
/// the inverse element; for the fine refinement (i, j) it is the (j, i) entry
/// of the matrix model at the inverse element.
#[derive(Debug, Clone)]
pub struct Projector {
    pub label: String,
    scale: Rational,
    coeffs: Vec<Cyclotomic>,
}

impl Projector {
    pub fn coarse(g: &PseudoreflectionGroup, irrep: &Irrep) -> Projector {
        let coeffs = (0..g.order())
            .map(|s| irrep.character[g.inverse[s]].clone())
            .collect();
        Projector {
            label: irrep.label.clone(),
            scale: rat(irrep.degree as i64, g.order() as i64),
            coeffs,
        }
    }

    /// Indices i, j are 1-based to match the usual operator notation.
    pub fn fine(g: &PseudoreflectionGroup, irrep: &Irrep, i: usize, j: usize) -> Result<Projector> {
        let model = irrep.model.as_ref().ok_or_else(|| {
            Error::NoMatrixModel(format!("irrep {} has characters only", irrep.label))
        })?;
        if i == 0 || j == 0 || i > irrep.degree || j > irrep.degree {
            return Err(Error::InvalidParameter(format!(
                "fine indices ({i}, {j}) out of range for degree {}",
                irrep.degree
            )));
        }
        let coeffs = (0..g.order())
            .map(|s| model[g.inverse[s]][j - 1][i - 1].clone())
            .collect();
        Ok(Projector {
            label: format!("{}[{i},{j}]", irrep.label),
            scale: rat(irrep.degree as i64, g.order() as i64),
            coeffs,
        })
    }

    pub fn apply(&self, g: &PseudoreflectionGroup, f: &Poly) -> Poly {
        let mut acc = Poly::zero(f.nvars());
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&act_element(g, s, f).scale(c));
        }
        acc.scale(&Cyclotomic::from_rational(self.scale.clone()))
    }
}

/// Projects f onto one isotypic component, or one fine component when (i, j)
/// is given.
pub fn iso_project(
    f: &Poly,
    g: &PseudoreflectionGroup,
    irrep: &Irrep,
    fine: Option<(usize, usize)>,
) -> Result<Poly> {
    if f.nvars() != g.n {
        return Err(Error::ArityMismatch(format!(
            "poly has {} variables, group acts on {}",
            f.nvars(),
            g.n
        )));
    }
    let p = match fine {
        None => Projector::coarse(g, irrep),
        Some((i, j)) => Projector::fine(g, irrep, i, j)?,
    };
    Ok(p.apply(g, f))
}

/// Splits f across all irreps in catalog order; the parts sum back to f.
pub fn iso_decompose(f: &Poly, g: &PseudoreflectionGroup) -> Result<Vec<(String, Poly)>> {
    g.irreps
        .iter()
        .map(|ir| Ok((ir.label.clone(), iso_project(f, g, ir, None)?)))
        .collect()
}

fn basis_monomials(n: usize, d: u32) -> Vec<Poly> {
    monomial_basis(n, d)
        .into_keys()
        .map(|m| Poly::monomial(n, m.0, Cyclotomic::one()))
        .collect()
}

fn fine_specs(g: &PseudoreflectionGroup) -> Vec<(usize, Projector, usize, usize)> {
    let mut out = vec![];
    for (k, ir) in g.irreps.iter().enumerate() {
        if ir.model.is_none() {
            continue;
        }
        for i in 1..=ir.degree {
            for j in 1..=ir.degree {
                out.push((k, Projector::fine(g, ir, i, j).unwrap(), i, j));
            }
        }
    }
    out
}

/// Exact operator checks on C[z]_{<= D}: orthogonal idempotence of the coarse
/// projections, the fine composition rule, resolution of the identity, and
/// the coarse = sum-of-diagonal-fine identity.
pub fn iso_verify_algebra(g: &PseudoreflectionGroup, d: u32) -> Report {
    let mut report = Report::new();
    let monos = basis_monomials(g.n, d);
    let coarse: Vec<Projector> = g.irreps.iter().map(|ir| Projector::coarse(g, ir)).collect();
    for (a, pa) in coarse.iter().enumerate() {
        for (b, pb) in coarse.iter().enumerate() {
            let pass = monos.iter().all(|u| {
                let lhs = pa.apply(g, &pb.apply(g, u));
                let rhs = if a == b {
                    pa.apply(g, u)
                } else {
                    Poly::zero(g.n)
                };
                lhs == rhs
            });
            report.record(format!("P[{}] o P[{}]", pa.label, pb.label), pass);
        }
    }
    let fines = fine_specs(g);
    for (ka, pa, ia, ja) in &fines {
        for (kb, pb, ib, jb) in &fines {
            let pass = monos.iter().all(|u| {
                let lhs = pa.apply(g, &pb.apply(g, u));
                let rhs = if ka == kb && *ja == *ib {
                    Projector::fine(g, &g.irreps[*ka], *ia, *jb)
                        .unwrap()
                        .apply(g, u)
                } else {
                    Poly::zero(g.n)
                };
                lhs == rhs
            });
            report.record(format!("{} o {}", pa.label, pb.label), pass);
        }
    }
    let pass = monos.iter().all(|u| {
        let mut acc = Poly::zero(g.n);
        for p in &coarse {
            acc = acc.add(&p.apply(g, u));
        }
        acc == *u
    });
    report.record("sum of coarse projections = id", pass);
    for (k, ir) in g.irreps.iter().enumerate() {
        if ir.model.is_none() {
            continue;
        }
        let pass = monos.iter().all(|u| {
            let mut acc = Poly::zero(g.n);
            for (kk, p, i, j) in &fines {
                if *kk == k && i == j {
                    acc = acc.add(&p.apply(g, u));
                }
            }
            acc == coarse[k].apply(g, u)
        });
        report.record(format!("P[{}] = sum of diagonal fines", ir.label), pass);
    }
    if g.irreps.iter().all(|ir| ir.model.is_some()) {
        let pass = monos.iter().all(|u| {
            let mut acc = Poly::zero(g.n);
            for (_, p, i, j) in &fines {
                if i == j {
                    acc = acc.add(&p.apply(g, u));
                }
            }
            acc == *u
        });
        report.record("sum of all diagonal fines = id", pass);
    }
    report
}

/// P(theta_k * f) = theta_k * P(f) on all monomials of degree <= D, for every
/// parameter and every projection (coarse and fine).
pub fn iso_commute_with_mtheta(g: &PseudoreflectionGroup, hsop: &Hsop, d: u32) -> Report {
    let mut report = Report::new();
    let monos = basis_monomials(g.n, d);
    let mut projectors: Vec<Projector> =
        g.irreps.iter().map(|ir| Projector::coarse(g, ir)).collect();
    projectors.extend(fine_specs(g).into_iter().map(|(_, p, _, _)| p));
    for (k, theta) in hsop.thetas.iter().enumerate() {
        for p in &projectors {
            let pass = monos.iter().all(|u| {
                p.apply(g, &theta.mul(u)) == theta.mul(&p.apply(g, u))
            });
            report.record(format!("M_theta{} commutes with P[{}]", k + 1, p.label), pass);
        }
    }
    report
}

/// The inner product in which the monomials are orthogonal with
/// ||z^I||^2 = 1/a_I, induced by a diagonal kernel with weights a_I.
pub struct WeightedInnerProduct {
    pub nvars: usize,
    pub degree_cap: u32,
    weights: BTreeMap<MultiIndex, Rational>,
}

impl WeightedInnerProduct {
    pub fn new(
        nvars: usize,
        degree_cap: u32,
        rule: impl Fn(&MultiIndex) -> Rational,
    ) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for m in monomial_basis(nvars, degree_cap).into_keys() {
            let a = rule(&m);
            if a <= Rational::from_integer(0.into()) {
                return Err(Error::InvalidParameter(format!(
                    "non-positive kernel weight at {:?}",
                    m.0
                )));
            }
            weights.insert(m, a);
        }
        Ok(WeightedInnerProduct {
            nvars,
            degree_cap,
            weights,
        })
    }

    /// <f, g> = sum_I f_I conj(g_I) / a_I.
    pub fn inner(&self, f: &Poly, g: &Poly) -> Cyclotomic {
        let mut acc = Cyclotomic::zero();
        for (idx, c) in f.terms() {
            let gc = g.coeff(idx);
            if gc.is_zero() {
                continue;
            }
            let a = self
                .weights
                .get(idx)
                .expect("monomial within the truncation degree");
            acc = acc.add(&c.mul(&gc.conj()).scale(&(Rational::from_integer(1.into()) / a.clone())));
        }
        acc
    }
}

/// Adjoint identities in the weighted inner product: the group action must be
/// unitary for the weights (otherwise KernelNotInvariant), the coarse
/// projections are self-adjoint, and each fine projection satisfies
/// (P^{ij})* P^{ij} = P^{jj} and preserves norms on the image of P^{jj}.
///
/// Everything is phrased through inner products of basis monomials, which
/// keeps the computation inside the cyclotomic field (no square roots).
pub fn iso_adjoint_identities(
    g: &PseudoreflectionGroup,
    w: &WeightedInnerProduct,
    d: u32,
) -> Result<Report> {
    if w.nvars != g.n || w.degree_cap < d {
        return Err(Error::ShapeError(
            "inner product does not cover the truncation".into(),
        ));
    }
    let monos = basis_monomials(g.n, d);
    for &gi in &g.generators {
        for u in &monos {
            for v in &monos {
                let gu = act_element(g, g.inverse[gi], u);
                let gv = act_element(g, g.inverse[gi], v);
                if w.inner(&gu, &gv) != w.inner(u, v) {
                    return Err(Error::KernelNotInvariant);
                }
            }
        }
    }
    let mut report = Report::new();
    for ir in &g.irreps {
        let p = Projector::coarse(g, ir);
        let pass = monos.iter().all(|u| {
            monos
                .iter()
                .all(|v| w.inner(&p.apply(g, u), v) == w.inner(u, &p.apply(g, v)))
        });
        report.record(format!("P[{}] self-adjoint", ir.label), pass);
    }
    for (k, pij, _i, j) in fine_specs(g) {
        let pjj = Projector::fine(g, &g.irreps[k], j, j).unwrap();
        let pass = monos.iter().all(|u| {
            monos.iter().all(|v| {
                w.inner(&pij.apply(g, u), &pij.apply(g, v)) == w.inner(&pjj.apply(g, u), v)
            })
        });
        report.record(format!("{}* o {} = {}", pij.label, pij.label, pjj.label), pass);
        let pass = monos.iter().all(|u| {
            let f = pjj.apply(g, u);
            let pf = pij.apply(g, &f);
            w.inner(&pf, &pf) == w.inner(&f, &f)
        });
        report.record(
            format!("{} isometric on image of {}", pij.label, pjj.label),
            pass,
        );
    }
    Ok(report)
}

fn poly_to_vec(f: &Poly, index: &BTreeMap<MultiIndex, usize>) -> Vec<Cyclotomic> {
    f.to_vector(index)
}

/// Minimal-generator count of the isotypic piece over the invariant ring at
/// truncation: dim P V_{<=D} minus dim of the span of theta_i * P V_{<=D-d_i}.
/// Stabilizes at (deg irrep)^2 once D clears the basis degrees.
pub fn iso_module_rank(
    g: &PseudoreflectionGroup,
    hsop: &Hsop,
    irrep: &Irrep,
    d: u32,
) -> usize {
    let index = monomial_basis(g.n, d);
    let p = Projector::coarse(g, irrep);
    let monos = basis_monomials(g.n, d);
    let mut image = RowSpace::new(index.len());
    for u in &monos {
        let pu = p.apply(g, u);
        if !pu.is_zero() {
            image.insert(poly_to_vec(&pu, &index));
        }
    }
    let mut shifted = RowSpace::new(index.len());
    for (k, theta) in hsop.thetas.iter().enumerate() {
        let dk = hsop.degrees[k];
        if dk > d {
            continue;
        }
        for u in basis_monomials(g.n, d - dk) {
            let pu = p.apply(g, &u);
            if pu.is_zero() {
                continue;
            }
            shifted.insert(poly_to_vec(&theta.mul(&pu), &index));
        }
    }
    image.dim() - shifted.dim()
}

/// Dimension at w = 0 of the joint kernel of the adjoint shifts: the
/// orthogonal complement of sum_i theta_i C[z]_{<=D-d_i} inside C[z]_{<=D}.
/// The weighted inner product fixes the complement but not its dimension.
pub fn iso_joint_kernel_dim(
    g: &PseudoreflectionGroup,
    hsop: &Hsop,
    w: &WeightedInnerProduct,
    d: u32,
) -> usize {
    assert!(w.nvars == g.n && w.degree_cap >= d);
    let index = monomial_basis(g.n, d);
    let total = index.len();
    let mut span = RowSpace::new(total);
    for (k, theta) in hsop.thetas.iter().enumerate() {
        let dk = hsop.degrees[k];
        if dk > d {
            continue;
        }
        for u in basis_monomials(g.n, d - dk) {
            span.insert(poly_to_vec(&theta.mul(&u), &index));
        }
    }
    total - span.dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{group_builtin, GroupSpec};
    use crate::invariant::inv_hsop;
    use crate::poly::parse_poly;

    fn hardy_weights() -> impl Fn(&MultiIndex) -> Rational {
        |_m: &MultiIndex| Rational::from_integer(1.into())
    }

    #[test]
    fn projection_examples() {
        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let z1 = parse_poly("z1", 2).unwrap();
        let triv = iso_project(&z1, &s2, s2.irrep_by_label("triv").unwrap(), None).unwrap();
        assert_eq!(triv, parse_poly("1/2*z1 + 1/2*z2", 2).unwrap());
        let sgn = iso_project(&z1, &s2, s2.irrep_by_label("sign").unwrap(), None).unwrap();
        assert_eq!(sgn, parse_poly("1/2*z1 - 1/2*z2", 2).unwrap());

        let s3 = group_builtin(&GroupSpec::Symmetric(3)).unwrap();
        let z1 = parse_poly("z1", 3).unwrap();
        let std = iso_project(&z1, &s3, s3.irrep_by_label("std").unwrap(), None).unwrap();
        assert_eq!(
            std,
            parse_poly("2/3*z1 - 1/3*z2 - 1/3*z3", 3).unwrap()
        );
    }

    #[test]
    fn fine_projection_weights() {
        let d3 = group_builtin(&GroupSpec::Dihedral(3)).unwrap();
        let rho = d3.irrep_by_label("rho1").unwrap();
        let z1 = parse_poly("z1", 2).unwrap();
        let p22 = iso_project(&z1, &d3, rho, Some((2, 2))).unwrap();
        let p11 = iso_project(&z1, &d3, rho, Some((1, 1))).unwrap();
        // z1 carries rotation weight zeta^{-1}; exactly one diagonal fine
        // projection keeps it, the other kills it.
        let kept = if p22 == z1 { &p11 } else { &p22 };
        assert!(p22 == z1 || p11 == z1);
        assert!(kept.is_zero());
    }

    #[test]
    fn fine_needs_model() {
        let s4 = group_builtin(&GroupSpec::Symmetric(4)).unwrap();
        let f = parse_poly("z1", 4).unwrap();
        let std3 = s4.irreps.iter().find(|ir| ir.label == "std3").unwrap();
        assert!(matches!(
            iso_project(&f, &s4, std3, Some((1, 1))),
            Err(Error::NoMatrixModel(_))
        ));
        // Coarse projection works from characters alone.
        iso_project(&f, &s4, std3, None).unwrap();
    }

    #[test]
    fn decompose_sums_to_input() {
        for spec in [
            GroupSpec::Symmetric(2),
            GroupSpec::Dihedral(3),
            GroupSpec::Cyclic(4),
        ] {
            let g = group_builtin(&spec).unwrap();
            let f = if g.n == 1 {
                parse_poly("z^3 + 2*z + 1", 1).unwrap()
            } else {
                parse_poly("z1^2 + 3*z1*z2 - z2", 2).unwrap()
            };
            let parts = iso_decompose(&f, &g).unwrap();
            let mut acc = Poly::zero(g.n);
            for (label, p) in &parts {
                // Each part is fixed by its own re-projection.
                let ir = g.irreps.iter().find(|ir| ir.label == *label).unwrap();
                assert_eq!(iso_project(p, &g, ir, None).unwrap(), *p);
                acc = acc.add(p);
            }
            assert_eq!(acc, f);
        }
        // Invariant input: all mass on the trivial irrep.
        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let f = parse_poly("z1*z2 + z1 + z2", 2).unwrap();
        for (label, p) in iso_decompose(&f, &s2).unwrap() {
            if label == "triv" {
                assert_eq!(p, f);
            } else {
                assert!(p.is_zero());
            }
        }
    }

    #[test]
    fn algebra_reports_pass() {
        for spec in [
            GroupSpec::Symmetric(2),
            GroupSpec::Symmetric(3),
            GroupSpec::Dihedral(3),
        ] {
            let g = group_builtin(&spec).unwrap();
            let report = iso_verify_algebra(&g, 3);
            assert!(report.all_pass(), "{}: {:?}", g.name, report.failed());
        }
    }

    #[test]
    fn commutation_and_counterexample_guard() {
        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let h = inv_hsop(&s2).unwrap();
        let report = iso_commute_with_mtheta(&s2, &h, 3);
        assert!(report.all_pass());
        // Multiplying by the non-invariant z1 does not commute with P_sign.
        let sgn = Projector::coarse(&s2, s2.irrep_by_label("sign").unwrap());
        let one = Poly::one(2);
        let z1 = parse_poly("z1", 2).unwrap();
        let lhs = sgn.apply(&s2, &z1.mul(&one));
        let rhs = z1.mul(&sgn.apply(&s2, &one));
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn adjoint_identities_hardy() {
        for spec in [GroupSpec::Symmetric(2), GroupSpec::Dihedral(3)] {
            let g = group_builtin(&spec).unwrap();
            let w = WeightedInnerProduct::new(2, 4, hardy_weights()).unwrap();
            let report = iso_adjoint_identities(&g, &w, 4).unwrap();
            assert!(report.all_pass(), "{}: {:?}", g.name, report.failed());
        }
        // Asymmetric weights are rejected for S_2.
        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let w = WeightedInnerProduct::new(2, 3, |m: &MultiIndex| {
            rat(1 + m.0[1] as i64, 1)
        })
        .unwrap();
        assert!(matches!(
            iso_adjoint_identities(&s2, &w, 3),
            Err(Error::KernelNotInvariant)
        ));
    }

    #[test]
    fn module_ranks() {
        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let h2 = inv_hsop(&s2).unwrap();
        assert_eq!(
            iso_module_rank(&s2, &h2, s2.irrep_by_label("sign").unwrap(), 4),
            1
        );
        assert_eq!(
            iso_module_rank(&s2, &h2, s2.irrep_by_label("triv").unwrap(), 4),
            1
        );

        let s3 = group_builtin(&GroupSpec::Symmetric(3)).unwrap();
        let h3 = inv_hsop(&s3).unwrap();
        assert_eq!(
            iso_module_rank(&s3, &h3, s3.irrep_by_label("std").unwrap(), 4),
            4
        );
    }

    #[test]
    fn joint_kernel_dims() {
        let z3 = group_builtin(&GroupSpec::Cyclic(3)).unwrap();
        let h = inv_hsop(&z3).unwrap();
        let w = WeightedInnerProduct::new(1, 4, hardy_weights()).unwrap();
        assert_eq!(iso_joint_kernel_dim(&z3, &h, &w, 4), 3);

        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let h = inv_hsop(&s2).unwrap();
        let w = WeightedInnerProduct::new(2, 3, |m: &MultiIndex| {
            // Bergman-like polydisc weights (k+1 per factor).
            rat(((m.0[0] + 1) * (m.0[1] + 1)) as i64, 1)
        })
        .unwrap();
        assert_eq!(iso_joint_kernel_dim(&s2, &h, &w, 3), 2);
    }
}
