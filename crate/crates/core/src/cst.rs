//! The Lambda matrix of a pseudoreflection group, its determinant identities,
//! and the Cramer-rule decomposition of a polynomial into module-basis
//! components with invariant coefficients.

use std::cell::OnceCell;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{PseudoreflectionGroup, ReflectingHyperplane};
use crate::invariant::{inv_hsop, inv_module_basis, Hsop, InvRewriter, InvariantExpression, ModuleBasis};
use crate::poly::{poly_det, poly_jacobian_det, Poly, PolyMatrix};

/// The d x d matrix with entry (i, j) = p_j acted on by the i-th group
/// element, in canonical element and basis order.
///
/// Its determinant is nonzero and homogeneous of degree d*m/2 (d the group
/// order, m the pseudoreflection count); both facts are validated at
/// construction. The adjugate is computed lazily and cached, since one
/// adjugate serves every decomposition against the same group.
pub struct LambdaMatrix {
    pub matrix: PolyMatrix,
    pub det: Poly,
    adjugate: OnceCell<Vec<Vec<Poly>>>,
}

pub fn cst_lambda(g: &PseudoreflectionGroup, basis: &ModuleBasis) -> Result<LambdaMatrix> {
    let d = g.order();
    if basis.polys.len() != d {
        return Err(Error::ShapeError("basis size must equal group order".into()));
    }
    let mut entries = Vec::with_capacity(d);
    for e in &g.elements {
        let mut row = Vec::with_capacity(d);
        for p in &basis.polys {
            row.push(p.act(&e.matrix)?);
        }
        entries.push(row);
    }
    let matrix = PolyMatrix { entries };
    let det = poly_det(&matrix)?;
    if det.is_zero() {
        return Err(Error::InternalInconsistency("det Lambda vanishes".into()));
    }
    let m = g.pseudoreflections().len();
    let expected = (d * m / 2) as u32;
    if det.homogeneous_degree() != Some(expected) {
        return Err(Error::InternalInconsistency(format!(
            "det Lambda degree {:?}, expected {expected}",
            det.homogeneous_degree()
        )));
    }
    Ok(LambdaMatrix {
        matrix,
        det,
        adjugate: OnceCell::new(),
    })
}

impl LambdaMatrix {
    /// adj[j][i] = (-1)^{i+j} * minor(i, j), so that adj * Lambda = det * I.
    pub fn adjugate(&self) -> &Vec<Vec<Poly>> {
        self.adjugate.get_or_init(|| {
            let d = self.matrix.nrows();
            let mut adj = vec![vec![Poly::zero(0); d]; d];
            for i in 0..d {
                let rows: Vec<usize> = (0..d).filter(|&r| r != i).collect();
                for j in 0..d {
                    let sub = PolyMatrix {
                        entries: rows
                            .iter()
                            .map(|&r| {
                                (0..d)
                                    .filter(|&c| c != j)
                                    .map(|c| self.matrix.entries[r][c].clone())
                                    .collect()
                            })
                            .collect(),
                    };
                    let mut minor = poly_det(&sub).expect("square minor");
                    if (i + j) % 2 == 1 {
                        minor = minor.neg();
                    }
                    adj[j][i] = minor;
                }
            }
            adj
        })
    }
}

/// Divides det Lambda by the product of hyperplane forms raised to
/// d*(m_i - 1)/2 and returns the remaining nonzero constant.
pub fn cst_det_factorization(
    l: &LambdaMatrix,
    hyperplanes: &[ReflectingHyperplane],
) -> Result<Cyclotomic> {
    let d = l.matrix.nrows();
    let mut quotient = l.det.clone();
    for h in hyperplanes {
        let e = d * (h.order - 1);
        if e % 2 != 0 {
            return Err(Error::FactorizationFailure(
                "odd exponent d*(m_i - 1)".into(),
            ));
        }
        quotient = quotient
            .exact_divide(&h.linear_form.pow((e / 2) as u32))
            .map_err(|_| Error::FactorizationFailure("hyperplane power does not divide".into()))?;
    }
    match quotient.homogeneous_degree() {
        Some(0) => Ok(quotient
            .terms()
            .next()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Cyclotomic::zero)),
        _ => Err(Error::FactorizationFailure(
            "non-constant quotient after hyperplane division".into(),
        )),
    }
}

/// Checks the two Jacobian relations and returns the pinned constants:
/// J_theta = c1 * prod L_i^{m_i - 1}, and det Lambda = c2 * J_theta^{d/2}
/// for even d, or c2 * (prod L_i^{(m_i-1)/2})^d for odd d (each m_i - 1 is
/// then even).
pub fn cst_jacobian_relations(
    hsop: &Hsop,
    hyperplanes: &[ReflectingHyperplane],
    l: &LambdaMatrix,
) -> Result<(Cyclotomic, Cyclotomic)> {
    let nvars = hsop.thetas[0].nvars();
    let jac = poly_jacobian_det(&hsop.thetas)?;
    let mut prod = Poly::one(nvars);
    for h in hyperplanes {
        prod = prod.mul(&h.linear_form.pow((h.order - 1) as u32));
    }
    let c1_poly = jac
        .exact_divide(&prod)
        .map_err(|_| Error::FactorizationFailure("J_theta not divisible by hyperplane product".into()))?;
    if c1_poly.homogeneous_degree() != Some(0) {
        return Err(Error::FactorizationFailure("J_theta quotient not constant".into()));
    }
    let c1 = c1_poly.terms().next().map(|(_, c)| c.clone()).unwrap();
    let d = l.matrix.nrows();
    let divisor = if d % 2 == 0 {
        jac.pow((d / 2) as u32)
    } else {
        let mut half = Poly::one(nvars);
        for h in hyperplanes {
            if (h.order - 1) % 2 != 0 {
                return Err(Error::FactorizationFailure(
                    "odd d with odd m_i - 1".into(),
                ));
            }
            half = half.mul(&h.linear_form.pow(((h.order - 1) / 2) as u32));
        }
        half.pow(d as u32)
    };
    let c2_poly = l
        .det
        .exact_divide(&divisor)
        .map_err(|_| Error::FactorizationFailure("det Lambda power division fails".into()))?;
    if c2_poly.homogeneous_degree() != Some(0) {
        return Err(Error::FactorizationFailure("det Lambda quotient not constant".into()));
    }
    let c2 = c2_poly.terms().next().map(|(_, c)| c.clone()).unwrap();
    Ok((c1, c2))
}

#[derive(Debug, Clone)]
pub struct CstDecomposition {
    pub coefficients: Vec<Poly>,
    pub theta_forms: Vec<InvariantExpression>,
}

/// Everything needed to decompose polynomials against one group, with the
/// adjugate and the per-degree rewrite solvers cached across calls.
pub struct CstEngine<'g> {
    pub group: &'g PseudoreflectionGroup,
    pub hsop: Hsop,
    pub basis: ModuleBasis,
    pub lambda: LambdaMatrix,
    rewriter: InvRewriter,
}

impl<'g> CstEngine<'g> {
    pub fn new(group: &'g PseudoreflectionGroup) -> Result<Self> {
        let hsop = inv_hsop(group)?;
        let basis = inv_module_basis(group, &hsop)?;
        let lambda = cst_lambda(group, &basis)?;
        let rewriter = InvRewriter::new(&hsop);
        Ok(CstEngine {
            group,
            hsop,
            basis,
            lambda,
            rewriter,
        })
    }

    /// The unique expression f = sum_j p_j * f_j with every f_j invariant:
    /// Cramer's rule against Lambda, exact division by det Lambda, an
    /// invariance check on the generators, theta-rewriting of each f_j, and a
    /// full reconstruction check.
    pub fn decompose(&mut self, f: &Poly) -> Result<CstDecomposition> {
        if f.nvars() != self.group.n {
            return Err(Error::ArityMismatch(format!(
                "poly has {} variables, group acts on {}",
                f.nvars(),
                self.group.n
            )));
        }
        let d = self.group.order();
        let x: Vec<Poly> = self
            .group
            .elements
            .iter()
            .map(|e| f.act(&e.matrix))
            .collect::<Result<_>>()?;
        let adj = self.lambda.adjugate();
        let mut coefficients = Vec::with_capacity(d);
        for j in 0..d {
            let mut tilde = Poly::zero(self.group.n);
            for (i, xi) in x.iter().enumerate() {
                if !adj[j][i].is_zero() && !xi.is_zero() {
                    tilde = tilde.add(&adj[j][i].mul(xi));
                }
            }
            let fj = if tilde.is_zero() {
                tilde
            } else {
                tilde.exact_divide(&self.lambda.det).map_err(|_| {
                    Error::InternalInconsistency(format!(
                        "component {j} not divisible by det Lambda"
                    ))
                })?
            };
            for &gi in &self.group.generators {
                if fj.act(&self.group.elements[gi].matrix)? != fj {
                    return Err(Error::InternalInconsistency(format!(
                        "component {j} is not invariant"
                    )));
                }
            }
            coefficients.push(fj);
        }
        let mut theta_forms = Vec::with_capacity(d);
        for fj in &coefficients {
            theta_forms.push(self.rewriter.rewrite(fj)?);
        }
        let mut recon = Poly::zero(self.group.n);
        for (p, fj) in self.basis.polys.iter().zip(coefficients.iter()) {
            recon = recon.add(&p.mul(fj));
        }
        if recon != *f {
            return Err(Error::InternalInconsistency(
                "reconstruction does not match input".into(),
            ));
        }
        Ok(CstDecomposition {
            coefficients,
            theta_forms,
        })
    }

    /// Decomposes the degree-cap truncation of f homogeneous component by
    /// component and sums; the outputs are the truncations of the analytic
    /// coefficient series.
    pub fn decompose_series(&mut self, f: &Poly, cap: u32) -> Result<CstDecomposition> {
        let truncated = f.truncate_degree(cap);
        let d = self.group.order();
        let mut coefficients = vec![Poly::zero(self.group.n); d];
        if let Some(maxdeg) = truncated.total_degree() {
            for delta in 0..=maxdeg {
                let comp = truncated.homogeneous_component(delta);
                if comp.is_zero() {
                    continue;
                }
                let part = self.decompose(&comp)?;
                for j in 0..d {
                    coefficients[j] = coefficients[j].add(&part.coefficients[j]);
                }
            }
        }
        let mut theta_forms = Vec::with_capacity(d);
        for fj in &coefficients {
            theta_forms.push(self.rewriter.rewrite(fj)?);
        }
        Ok(CstDecomposition {
            coefficients,
            theta_forms,
        })
    }
}
