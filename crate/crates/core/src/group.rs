//! Finite pseudoreflection groups as explicit unitary matrix groups over a
//! cyclotomic field: breadth-first closure from generators, reflecting
//! hyperplane data, the builtin families (cyclic, products of cyclics,
//! symmetric n <= 4, dihedral, direct products), and their catalogs of
//! irreducible representations.

use std::collections::HashMap;

use num::integer::Integer;

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::linalg::{conj_transpose, identity, mat_eq, mat_mul, rank, CMatrix};
use crate::poly::Poly;

pub const DEFAULT_CAP: usize = 512;

#[derive(Debug, Clone)]
pub struct GroupElement {
    pub matrix: CMatrix,
    pub order: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(u64),
    ProductCyclic(Vec<u64>),
    Symmetric(usize),
    Dihedral(u64),
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    pub fn name(&self) -> String {
        match self {
            GroupSpec::Cyclic(m) => format!("Z{m}"),
            GroupSpec::ProductCyclic(ms) => ms
                .iter()
                .map(|m| format!("Z{m}"))
                .collect::<Vec<_>>()
                .join("x"),
            GroupSpec::Symmetric(n) => format!("S{n}"),
            GroupSpec::Dihedral(k) => format!("D{k}"),
            GroupSpec::Product(a, b) => format!("{}*{}", a.name(), b.name()),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            GroupSpec::Cyclic(_) => 1,
            GroupSpec::ProductCyclic(ms) => ms.len(),
            GroupSpec::Symmetric(n) => *n,
            GroupSpec::Dihedral(_) => 2,
            GroupSpec::Product(a, b) => a.dimension() + b.dimension(),
        }
    }
}

/// Parse CLI group spec strings: `Z3`, `Z2xZ3`, `S4`, `D5`, `A*B`.
pub fn parse_group_spec(s: &str) -> Result<GroupSpec> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('*') {
        return Ok(GroupSpec::Product(
            Box::new(parse_group_spec(a)?),
            Box::new(parse_group_spec(b)?),
        ));
    }
    if s.contains('x') {
        let ms = s
            .split('x')
            .map(|part| {
                let part = part.trim();
                part.strip_prefix('Z')
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad product factor {part:?}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        return Ok(GroupSpec::ProductCyclic(ms));
    }
    let (head, tail) = s.split_at(1);
    let num = tail
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("bad group spec {s:?}")))?;
    match head {
        "Z" => Ok(GroupSpec::Cyclic(num)),
        "S" => Ok(GroupSpec::Symmetric(num as usize)),
        "D" => Ok(GroupSpec::Dihedral(num)),
        _ => Err(Error::Parse(format!("bad group spec {s:?}"))),
    }
}

#[derive(Debug, Clone)]
pub struct Irrep {
    pub label: String,
    pub degree: usize,
    /// chi(sigma) indexed by element position.
    pub character: Vec<Cyclotomic>,
    /// Unitary matrix model per element, where available.
    pub model: Option<Vec<CMatrix>>,
}

#[derive(Debug, Clone)]
pub struct ReflectingHyperplane {
    /// Normalized homogeneous linear form (leading graded-lex coefficient 1).
    pub linear_form: Poly,
    /// Order m_i of the pointwise stabilizer.
    pub order: usize,
    pub stabilizer: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PseudoreflectionGroup {
    pub n: usize,
    pub conductor: u64,
    pub name: String,
    pub elements: Vec<GroupElement>,
    pub generators: Vec<usize>,
    pub mult: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    /// For each non-identity element: (parent index, generator slot) with
    /// element = parent * generators[slot]; drives matrix-model propagation.
    words: Vec<Option<(usize, usize)>>,
    pub reflection_generated: bool,
    pub irreps: Vec<Irrep>,
    pub spec: Option<GroupSpec>,
}

fn matrix_text(m: &CMatrix) -> String {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn cmatrix_det(m: &CMatrix) -> Cyclotomic {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Cyclotomic::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: CMatrix = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&cmatrix_det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// rank(I - g) = 1 together with g != I characterizes a pseudoreflection
/// (finite order is guaranteed for members of a finite group).
pub fn is_pseudoreflection(matrix: &CMatrix) -> bool {
    let n = matrix.len();
    let id = identity(n);
    if mat_eq(matrix, &id) {
        return false;
    }
    let diff: CMatrix = (0..n)
        .map(|i| (0..n).map(|j| id[i][j].sub(&matrix[i][j])).collect())
        .collect();
    rank(&diff) == 1
}

struct Closure {
    elements: Vec<CMatrix>,
    words: Vec<Option<(usize, usize)>>,
    gen_indices: Vec<usize>,
}

fn closure(gens: &[CMatrix], cap: usize) -> Result<Closure> {
    let n = gens[0].len();
    let id = identity(n);
    let mut elements = vec![id.clone()];
    let mut lookup: HashMap<String, usize> = HashMap::new();
    lookup.insert(matrix_text(&id), 0);
    let mut words: Vec<Option<(usize, usize)>> = vec![None];
    let mut cursor = 0;
    while cursor < elements.len() {
        for (gi, g) in gens.iter().enumerate() {
            let prod = mat_mul(&elements[cursor], g);
            let key = matrix_text(&prod);
            if !lookup.contains_key(&key) {
                if elements.len() >= cap {
                    return Err(Error::GroupTooLarge(cap));
                }
                lookup.insert(key, elements.len());
                elements.push(prod);
                words.push(Some((cursor, gi)));
            }
        }
        cursor += 1;
    }
    let gen_indices = gens
        .iter()
        .map(|g| lookup[&matrix_text(g)])
        .collect();
    Ok(Closure {
        elements,
        words,
        gen_indices,
    })
}

fn build_group(
    gens_sorted: Vec<CMatrix>,
    cap: usize,
    conductor: u64,
    name: String,
    spec: Option<GroupSpec>,
) -> Result<PseudoreflectionGroup> {
    let n = gens_sorted[0].len();
    // Preconditions: unitary generators of finite order.
    for g in &gens_sorted {
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeError("generators must be square, same size".into()));
        }
        if !mat_eq(&mat_mul(&conj_transpose(g), g), &identity(n)) {
            return Err(Error::InvalidParameter("generator is not unitary".into()));
        }
        let mut p = g.clone();
        let mut order = 1;
        while !mat_eq(&p, &identity(n)) {
            p = mat_mul(&p, g);
            order += 1;
            if order > cap {
                return Err(Error::NotFiniteOrder);
            }
        }
    }
    let cl = closure(&gens_sorted, cap)?;
    let d = cl.elements.len();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    for (i, m) in cl.elements.iter().enumerate() {
        lookup.insert(matrix_text(m), i);
    }
    let mut mult = vec![vec![0usize; d]; d];
    for i in 0..d {
        for j in 0..d {
            let prod = mat_mul(&cl.elements[i], &cl.elements[j]);
            mult[i][j] = lookup[&matrix_text(&prod)];
        }
    }
    let mut inverse = vec![0usize; d];
    for i in 0..d {
        inverse[i] = (0..d).find(|&j| mult[i][j] == 0).unwrap();
    }
    let mut orders = vec![0usize; d];
    for i in 0..d {
        let mut t = i;
        let mut o = 1;
        while t != 0 {
            t = mult[t][i];
            o += 1;
        }
        orders[i] = o;
    }
    let elements: Vec<GroupElement> = cl
        .elements
        .into_iter()
        .enumerate()
        .map(|(index, matrix)| GroupElement {
            matrix,
            order: orders[index],
            index,
        })
        .collect();
    // Does the set of pseudoreflections regenerate the group?
    let prefl: Vec<CMatrix> = elements
        .iter()
        .filter(|e| is_pseudoreflection(&e.matrix))
        .map(|e| e.matrix.clone())
        .collect();
    let reflection_generated = if prefl.is_empty() {
        d == 1
    } else {
        closure(&prefl, cap).map(|c| c.elements.len() == d).unwrap_or(false)
    };
    Ok(PseudoreflectionGroup {
        n,
        conductor,
        name,
        elements,
        generators: cl.gen_indices,
        mult,
        inverse,
        words: cl.words,
        reflection_generated,
        irreps: vec![],
        spec,
    })
}

/// Breadth-first closure of arbitrary unitary generators; the irrep catalog is
/// only available through the builtin constructors.
pub fn group_generate(generators: &[CMatrix], cap: usize) -> Result<PseudoreflectionGroup> {
    if generators.is_empty() {
        return Err(Error::InvalidParameter("no generators".into()));
    }
    let mut conductor = 1u64;
    for g in generators {
        for row in g {
            for c in row {
                conductor = conductor.lcm(&c.conductor());
            }
        }
    }
    let mut gens: Vec<CMatrix> = generators
        .iter()
        .map(|g| {
            g.iter()
                .map(|row| row.iter().map(|c| c.lift(conductor).unwrap()).collect())
                .collect()
        })
        .collect();
    gens.sort_by_key(matrix_text);
    gens.dedup_by_key(|g| matrix_text(g));
    build_group(gens, cap, conductor, "custom".into(), None)
}

impl PseudoreflectionGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn pseudoreflections(&self) -> Vec<usize> {
        self.elements
            .iter()
            .filter(|e| is_pseudoreflection(&e.matrix))
            .map(|e| e.index)
            .collect()
    }

    pub fn determinant_character(&self) -> Vec<Cyclotomic> {
        self.elements
            .iter()
            .map(|e| cmatrix_det(&e.matrix))
            .collect()
    }

    /// Look up an irrep by label; `triv` always resolves to the trivial
    /// character and `sign`/`det` to the one matching sigma -> det(sigma).
    pub fn irrep_by_label(&self, label: &str) -> Result<&Irrep> {
        if let Some(ir) = self.irreps.iter().find(|ir| ir.label == label) {
            return Ok(ir);
        }
        match label {
            "triv" | "trivial" => self
                .irreps
                .iter()
                .find(|ir| ir.degree == 1 && ir.character.iter().all(|c| c.is_one()))
                .ok_or_else(|| Error::Unsupported("no trivial irrep in catalog".into())),
            "sign" | "det" => {
                let det = self.determinant_character();
                self.irreps
                    .iter()
                    .find(|ir| ir.degree == 1 && ir.character == det)
                    .ok_or_else(|| {
                        Error::Unsupported("no determinant character in catalog".into())
                    })
            }
            _ => Err(Error::Unsupported(format!(
                "irrep {label:?} not in catalog for {}",
                self.name
            ))),
        }
    }

    /// Model matrices for each element from generator images, in element order.
    fn propagate_model(&self, images: &[CMatrix]) -> Vec<CMatrix> {
        let deg = images[0].len();
        let mut model: Vec<CMatrix> = Vec::with_capacity(self.order());
        model.push(identity(deg));
        for idx in 1..self.order() {
            let (p, g) = self.words[idx].expect("non-identity element has a word");
            model.push(mat_mul(&model[p], &images[g]));
        }
        model
    }

    fn push_irrep_from_images(&mut self, label: &str, images: Vec<CMatrix>) {
        let model = self.propagate_model(&images);
        let character = model
            .iter()
            .map(|m| {
                let mut t = Cyclotomic::zero();
                for (i, row) in m.iter().enumerate() {
                    t = t.add(&row[i]);
                }
                t
            })
            .collect();
        self.irreps.push(Irrep {
            label: label.to_string(),
            degree: images[0].len(),
            character,
            model: Some(model),
        });
    }
}

/// Distinct reflecting hyperplanes with stabilizer orders m_i.
pub fn group_hyperplanes(g: &PseudoreflectionGroup) -> Result<Vec<ReflectingHyperplane>> {
    let n = g.n;
    let id = identity(n);
    let mut planes: Vec<(Vec<Cyclotomic>, Vec<usize>)> = vec![];
    let prefl = g.pseudoreflections();
    if prefl.is_empty() {
        return Err(Error::InvalidParameter(
            "group contains no pseudoreflection".into(),
        ));
    }
    for &idx in &prefl {
        let m = &g.elements[idx].matrix;
        let diff: CMatrix = (0..n)
            .map(|i| (0..n).map(|j| id[i][j].sub(&m[i][j])).collect())
            .collect();
        let row = diff
            .iter()
            .find(|r| r.iter().any(|c| !c.is_zero()))
            .expect("rank-1 difference has a nonzero row");
        let lead = row.iter().find(|c| !c.is_zero()).unwrap();
        let inv = lead.inv()?;
        let form: Vec<Cyclotomic> = row.iter().map(|c| c.mul(&inv)).collect();
        match planes.iter_mut().find(|(f, _)| *f == form) {
            Some((_, stab)) => stab.push(idx),
            None => planes.push((form, vec![idx])),
        }
    }
    let mut out = vec![];
    for (form, mut stab) in planes {
        stab.insert(0, 0); // identity
        // The pointwise stabilizer must be cyclic: some member's order equals
        // its size.
        let m_i = stab.len();
        if !stab.iter().any(|&s| g.elements[s].order == m_i) {
            return Err(Error::InternalInconsistency(
                "hyperplane stabilizer is not cyclic".into(),
            ));
        }
        let mut lf = Poly::zero(n);
        for (j, c) in form.iter().enumerate() {
            if !c.is_zero() {
                lf = lf.add(&Poly::var(n, j).scale(c));
            }
        }
        out.push(ReflectingHyperplane {
            linear_form: lf,
            order: m_i,
            stabilizer: stab,
        });
    }
    let total: usize = out.iter().map(|h| h.order - 1).sum();
    if total != prefl.len() {
        return Err(Error::InternalInconsistency(format!(
            "sum(m_i - 1) = {total} but {} pseudoreflections",
            prefl.len()
        )));
    }
    // Deterministic order: by linear form text.
    out.sort_by_key(|h| h.linear_form.to_string());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Builtin families.

fn zeta(n: u64) -> Cyclotomic {
    Cyclotomic::zeta_pow(n, 1).unwrap()
}

fn lift_matrix(m: &CMatrix, conductor: u64) -> CMatrix {
    m.iter()
        .map(|row| row.iter().map(|c| c.lift(conductor).unwrap()).collect())
        .collect()
}

fn diag(entries: Vec<Cyclotomic>) -> CMatrix {
    let n = entries.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        entries[i].clone()
                    } else {
                        Cyclotomic::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn permutation_matrix(n: usize, perm: &[usize]) -> CMatrix {
    // Column j carries e_{perm[j]}.
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if perm[j] == i {
                        Cyclotomic::one()
                    } else {
                        Cyclotomic::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn perm_of_matrix(m: &CMatrix) -> Vec<usize> {
    let n = m.len();
    (0..n)
        .map(|j| (0..n).find(|&i| m[i][j].is_one()).expect("permutation matrix"))
        .collect()
}

fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = vec![];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur];
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable();
    cycles.reverse();
    cycles
}

fn perm_sign(perm: &[usize]) -> i64 {
    let transpositions: usize = cycle_type(perm).iter().map(|c| c - 1).sum();
    if transpositions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sorts generator matrices by canonical text; returns them together with the
/// map sorted-slot -> original position, used to permute catalog images.
fn sort_generators(gens: Vec<CMatrix>) -> (Vec<CMatrix>, Vec<usize>) {
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by_key(|&i| matrix_text(&gens[i]));
    let sorted = order.iter().map(|&i| gens[i].clone()).collect();
    (sorted, order)
}

/// The standard matrix realization of a builtin family, with the irrep
/// catalog attached.
pub fn group_builtin(spec: &GroupSpec) -> Result<PseudoreflectionGroup> {
    match spec {
        GroupSpec::Cyclic(m) => {
            if *m < 2 {
                return Err(Error::Unsupported("cyclic(m) needs m >= 2".into()));
            }
            build_product_cyclic(&[*m], spec)
        }
        GroupSpec::ProductCyclic(ms) => {
            if ms.is_empty() || ms.iter().any(|&m| m < 2) {
                return Err(Error::Unsupported("product factors need m >= 2".into()));
            }
            build_product_cyclic(ms, spec)
        }
        GroupSpec::Symmetric(n) => build_symmetric(*n, spec),
        GroupSpec::Dihedral(k) => build_dihedral(*k, spec),
        GroupSpec::Product(a, b) => build_direct_product(a, b, spec),
    }
}

fn build_product_cyclic(ms: &[u64], spec: &GroupSpec) -> Result<PseudoreflectionGroup> {
    let n = ms.len();
    let conductor = ms.iter().fold(1u64, |acc, m| acc.lcm(m));
    if conductor > crate::cyclotomic::MAX_CONDUCTOR {
        return Err(Error::InvalidParameter("conductor cap exceeded".into()));
    }
    let gens_orig: Vec<CMatrix> = (0..n)
        .map(|i| {
            let entries: Vec<Cyclotomic> = (0..n)
                .map(|j| {
                    if i == j {
                        zeta(ms[i]).lift(conductor).unwrap()
                    } else {
                        Cyclotomic::one().lift(conductor).unwrap()
                    }
                })
                .collect();
            diag(entries)
        })
        .collect();
    let (gens, perm) = sort_generators(gens_orig);
    let mut g = build_group(gens, DEFAULT_CAP, conductor, spec.name(), Some(spec.clone()))?;
    // Characters chi_j, one per exponent tuple, in lexicographic tuple order.
    let mut tuples = vec![vec![]];
    for &m in ms {
        let mut next = vec![];
        for t in &tuples {
            for j in 0..m {
                let mut t2: Vec<u64> = t.clone();
                t2.push(j);
                next.push(t2);
            }
        }
        tuples = next;
    }
    for t in tuples {
        let label = if n == 1 {
            format!("chi{}", t[0])
        } else {
            format!(
                "chi{}",
                t.iter().map(|j| j.to_string()).collect::<Vec<_>>().join("_")
            )
        };
        let images: Vec<CMatrix> = (0..n)
            .map(|slot| {
                let i = perm[slot];
                vec![vec![zeta(ms[i])
                    .pow(t[i] as i64)
                    .unwrap()
                    .lift(conductor)
                    .unwrap()]]
            })
            .collect();
        g.push_irrep_from_images(&label, images);
    }
    Ok(g)
}

fn build_symmetric(n: usize, spec: &GroupSpec) -> Result<PseudoreflectionGroup> {
    if !(2..=4).contains(&n) {
        return Err(Error::Unsupported("symmetric(n) supports 2 <= n <= 4".into()));
    }
    let conductor = match n {
        2 => 2,
        3 => 6,
        _ => 12,
    };
    let gens_orig: Vec<CMatrix> = (0..n - 1)
        .map(|i| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(i, i + 1);
            lift_matrix(&permutation_matrix(n, &perm), conductor)
        })
        .collect();
    let (gens, perm) = sort_generators(gens_orig);
    let mut g = build_group(gens, DEFAULT_CAP, conductor, spec.name(), Some(spec.clone()))?;
    let one = || vec![vec![Cyclotomic::one().lift(conductor).unwrap()]];
    let neg = || vec![vec![Cyclotomic::from_int(-1).lift(conductor).unwrap()]];
    g.push_irrep_from_images("triv", (0..n - 1).map(|_| one()).collect());
    g.push_irrep_from_images("sign", (0..n - 1).map(|_| neg()).collect());
    let two_dim = || {
        let z3 = zeta(3).lift(conductor).unwrap();
        let sigma = vec![
            vec![Cyclotomic::zero(), Cyclotomic::one().lift(conductor).unwrap()],
            vec![Cyclotomic::one().lift(conductor).unwrap(), Cyclotomic::zero()],
        ];
        let sigma_delta = vec![
            vec![Cyclotomic::zero(), z3.conj()],
            vec![z3, Cyclotomic::zero()],
        ];
        (sigma, sigma_delta)
    };
    match n {
        3 => {
            // Standard 2-dim model through the dihedral realization:
            // (12) -> swap, (23) -> swap * diag(zeta_3, zeta_3^{-1}).
            let (sigma, sigma_delta) = two_dim();
            let images_orig = vec![sigma, sigma_delta];
            let images: Vec<CMatrix> = perm.iter().map(|&i| images_orig[i].clone()).collect();
            g.push_irrep_from_images("std", images);
        }
        4 => {
            // 2-dim irrep through the quotient onto the action on the three
            // pairings {12|34, 13|24, 14|23}: (12) and (34) act as the same
            // transposition, (23) as another.
            let (sigma, sigma_delta) = two_dim();
            let images_orig = vec![sigma_delta.clone(), sigma, sigma_delta];
            let images: Vec<CMatrix> = perm.iter().map(|&i| images_orig[i].clone()).collect();
            g.push_irrep_from_images("std2", images);
            // The two 3-dim irreps keep characters only (no exact unitary
            // model at this conductor).
            let perms: Vec<Vec<usize>> = g
                .elements
                .iter()
                .map(|e| perm_of_matrix(&e.matrix))
                .collect();
            for (label, flip) in [("std3", false), ("std3sign", true)] {
                let character: Vec<Cyclotomic> = perms
                    .iter()
                    .map(|p| {
                        let base = match cycle_type(p).as_slice() {
                            [1, 1, 1, 1] => 3,
                            [2, 1, 1] => 1,
                            [2, 2] => -1,
                            [3, 1] => 0,
                            [4] => -1,
                            other => panic!("unexpected cycle type {other:?}"),
                        };
                        let v = if flip { base * perm_sign(p) } else { base };
                        Cyclotomic::from_int(v).lift(conductor).unwrap()
                    })
                    .collect();
                g.irreps.push(Irrep {
                    label: label.into(),
                    degree: 3,
                    character,
                    model: None,
                });
            }
        }
        _ => {}
    }
    Ok(g)
}

fn build_dihedral(k: u64, spec: &GroupSpec) -> Result<PseudoreflectionGroup> {
    if k < 2 {
        return Err(Error::Unsupported("dihedral(k) needs k >= 2".into()));
    }
    let conductor = k.lcm(&2);
    if conductor > crate::cyclotomic::MAX_CONDUCTOR {
        return Err(Error::InvalidParameter("conductor cap exceeded".into()));
    }
    let zk = zeta(k).lift(conductor).unwrap();
    let delta = diag(vec![zk.clone(), zk.conj()]);
    let sigma = vec![
        vec![Cyclotomic::zero(), Cyclotomic::one().lift(conductor).unwrap()],
        vec![Cyclotomic::one().lift(conductor).unwrap(), Cyclotomic::zero()],
    ];
    let gens_orig = vec![delta, sigma];
    let (gens, perm) = sort_generators(gens_orig);
    let mut g = build_group(gens, DEFAULT_CAP, conductor, spec.name(), Some(spec.clone()))?;
    let scalar = |v: i64| vec![vec![Cyclotomic::from_int(v).lift(conductor).unwrap()]];
    // One-dimensional characters: images listed per original slot (delta, sigma).
    let mut one_dims: Vec<(&str, [i64; 2])> = vec![("triv", [1, 1]), ("sgn", [1, -1])];
    if k % 2 == 0 {
        one_dims.push(("rot", [-1, 1]));
        one_dims.push(("rotsgn", [-1, -1]));
    }
    for (label, vals) in one_dims {
        let images: Vec<CMatrix> = perm.iter().map(|&i| scalar(vals[i])).collect();
        g.push_irrep_from_images(label, images);
    }
    let hmax = if k % 2 == 0 { k / 2 - 1 } else { (k - 1) / 2 };
    for h in 1..=hmax {
        let zh = zk.pow(h as i64).unwrap();
        let delta_img = diag(vec![zh.clone(), zh.conj()]);
        let sigma_img = vec![
            vec![Cyclotomic::zero(), Cyclotomic::one().lift(conductor).unwrap()],
            vec![Cyclotomic::one().lift(conductor).unwrap(), Cyclotomic::zero()],
        ];
        let images_orig = [delta_img, sigma_img];
        let images: Vec<CMatrix> = perm.iter().map(|&i| images_orig[i].clone()).collect();
        g.push_irrep_from_images(&format!("rho{h}"), images);
    }
    Ok(g)
}

fn build_direct_product(
    a_spec: &GroupSpec,
    b_spec: &GroupSpec,
    spec: &GroupSpec,
) -> Result<PseudoreflectionGroup> {
    let ga = group_builtin(a_spec)?;
    let gb = group_builtin(b_spec)?;
    let conductor = ga.conductor.lcm(&gb.conductor);
    if conductor > crate::cyclotomic::MAX_CONDUCTOR {
        return Err(Error::InvalidParameter("conductor cap exceeded".into()));
    }
    let na = ga.n;
    let nb = gb.n;
    let n = na + nb;
    let embed_a = |m: &CMatrix| -> CMatrix {
        let mut out = identity(n);
        for i in 0..na {
            for j in 0..na {
                out[i][j] = m[i][j].clone();
            }
        }
        lift_matrix(&out, conductor)
    };
    let embed_b = |m: &CMatrix| -> CMatrix {
        let mut out = identity(n);
        for i in 0..nb {
            for j in 0..nb {
                out[na + i][na + j] = m[i][j].clone();
            }
        }
        lift_matrix(&out, conductor)
    };
    let mut gens_orig: Vec<CMatrix> = vec![];
    for &gi in &ga.generators {
        gens_orig.push(embed_a(&ga.elements[gi].matrix));
    }
    for &gi in &gb.generators {
        gens_orig.push(embed_b(&gb.elements[gi].matrix));
    }
    let (gens, _) = sort_generators(gens_orig);
    let mut g = build_group(gens, DEFAULT_CAP, conductor, spec.name(), Some(spec.clone()))?;
    if g.order() != ga.order() * gb.order() {
        return Err(Error::InternalInconsistency(
            "direct product order mismatch".into(),
        ));
    }
    // Identify each element's factor components by block extraction.
    let mut comp: Vec<(usize, usize)> = Vec::with_capacity(g.order());
    for e in &g.elements {
        let block_a: CMatrix = (0..na)
            .map(|i| (0..na).map(|j| e.matrix[i][j].clone()).collect())
            .collect();
        let block_b: CMatrix = (0..nb)
            .map(|i| (0..nb).map(|j| e.matrix[na + i][na + j].clone()).collect())
            .collect();
        let ia = ga
            .elements
            .iter()
            .position(|f| mat_eq(&f.matrix, &lift_matrix(&block_a, conductor).iter().map(|r| r.to_vec()).collect()))
            .or_else(|| ga.elements.iter().position(|f| {
                f.matrix
                    .iter()
                    .zip(block_a.iter())
                    .all(|(r1, r2)| r1.iter().zip(r2.iter()).all(|(x, y)| x == y))
            }))
            .ok_or_else(|| Error::InternalInconsistency("block not in factor".into()))?;
        let ib = gb
            .elements
            .iter()
            .position(|f| {
                f.matrix
                    .iter()
                    .zip(block_b.iter())
                    .all(|(r1, r2)| r1.iter().zip(r2.iter()).all(|(x, y)| x == y))
            })
            .ok_or_else(|| Error::InternalInconsistency("block not in factor".into()))?;
        comp.push((ia, ib));
    }
    for ir_a in &ga.irreps {
        for ir_b in &gb.irreps {
            let label = format!("{}x{}", ir_a.label, ir_b.label);
            let degree = ir_a.degree * ir_b.degree;
            let character: Vec<Cyclotomic> = comp
                .iter()
                .map(|&(ia, ib)| {
                    ir_a.character[ia]
                        .mul(&ir_b.character[ib])
                        .lift(conductor)
                        .unwrap()
                })
                .collect();
            let model = match (&ir_a.model, &ir_b.model) {
                (Some(ma), Some(mb)) => Some(
                    comp.iter()
                        .map(|&(ia, ib)| kron(&ma[ia], &mb[ib], conductor))
                        .collect(),
                ),
                _ => None,
            };
            g.irreps.push(Irrep {
                label,
                degree,
                character,
                model,
            });
        }
    }
    Ok(g)
}

fn kron(a: &CMatrix, b: &CMatrix, conductor: u64) -> CMatrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Cyclotomic::zero(); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] =
                        a[i][j].mul(&b[k][l]).lift(conductor).unwrap();
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_cyclic_three() {
        let g = group_generate(&[vec![vec![zeta(3)]]], 16).unwrap();
        assert_eq!(g.order(), 3);
        assert!(g.reflection_generated);
    }

    #[test]
    fn generate_swap_is_s2() {
        let swap = vec![
            vec![Cyclotomic::zero(), Cyclotomic::one()],
            vec![Cyclotomic::one(), Cyclotomic::zero()],
        ];
        let g = group_generate(&[swap], 16).unwrap();
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn generate_dihedral_six() {
        let delta = diag(vec![zeta(3), zeta(3).conj()]);
        let swap = vec![
            vec![Cyclotomic::zero(), Cyclotomic::one()],
            vec![Cyclotomic::one(), Cyclotomic::zero()],
        ];
        let g = group_generate(&[delta, swap], 32).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.reflection_generated);
    }

    #[test]
    fn rotation_only_group_is_flagged() {
        let delta = diag(vec![zeta(3), zeta(3).conj()]);
        let g = group_generate(&[delta], 16).unwrap();
        assert_eq!(g.order(), 3);
        assert!(!g.reflection_generated);
    }

    #[test]
    fn pseudoreflection_predicate() {
        assert!(!is_pseudoreflection(&identity(2)));
        assert!(is_pseudoreflection(&vec![vec![zeta(3)]]));
        let rot = diag(vec![zeta(3), zeta(3).conj()]);
        assert!(!is_pseudoreflection(&rot));
    }

    #[test]
    fn builtin_orders_and_reflection_counts() {
        let z4 = group_builtin(&GroupSpec::Cyclic(4)).unwrap();
        assert_eq!(z4.order(), 4);
        assert_eq!(z4.pseudoreflections().len(), 3);
        let s3 = group_builtin(&GroupSpec::Symmetric(3)).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(s3.pseudoreflections().len(), 3);
        let d5 = group_builtin(&GroupSpec::Dihedral(5)).unwrap();
        assert_eq!(d5.order(), 10);
        assert_eq!(d5.pseudoreflections().len(), 5);
    }

    #[test]
    fn hyperplanes_examples() {
        let s2 = group_builtin(&GroupSpec::Symmetric(2)).unwrap();
        let hs = group_hyperplanes(&s2).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].order, 2);
        assert_eq!(hs[0].linear_form, crate::poly::parse_poly("z1 - z2", 2).unwrap());

        let z3 = group_builtin(&GroupSpec::Cyclic(3)).unwrap();
        let hz = group_hyperplanes(&z3).unwrap();
        assert_eq!(hz.len(), 1);
        assert_eq!(hz[0].order, 3);
        assert_eq!(hz[0].linear_form, crate::poly::parse_poly("z", 1).unwrap());

        let d3 = group_builtin(&GroupSpec::Dihedral(3)).unwrap();
        let hd = group_hyperplanes(&d3).unwrap();
        assert_eq!(hd.len(), 3);
        assert!(hd.iter().all(|h| h.order == 2));
    }

    #[test]
    fn irrep_degree_sums() {
        for spec in [
            GroupSpec::Cyclic(3),
            GroupSpec::Symmetric(3),
            GroupSpec::Symmetric(4),
            GroupSpec::Dihedral(4),
            GroupSpec::Dihedral(5),
            GroupSpec::ProductCyclic(vec![2, 3]),
            GroupSpec::Product(
                Box::new(GroupSpec::Cyclic(2)),
                Box::new(GroupSpec::Symmetric(2)),
            ),
        ] {
            let g = group_builtin(&spec).unwrap();
            let sum: usize = g.irreps.iter().map(|ir| ir.degree * ir.degree).sum();
            assert_eq!(sum, g.order(), "degree sum for {}", g.name);
        }
    }

    #[test]
    fn character_orthogonality() {
        for spec in [
            GroupSpec::Cyclic(4),
            GroupSpec::Symmetric(3),
            GroupSpec::Symmetric(4),
            GroupSpec::Dihedral(3),
            GroupSpec::Dihedral(4),
        ] {
            let g = group_builtin(&spec).unwrap();
            let d = g.order();
            for (a, ir_a) in g.irreps.iter().enumerate() {
                for (b, ir_b) in g.irreps.iter().enumerate() {
                    let mut acc = Cyclotomic::zero();
                    for s in 0..d {
                        acc = acc.add(&ir_a.character[s].mul(&ir_b.character[s].conj()));
                    }
                    let expected = if a == b {
                        Cyclotomic::from_int(d as i64)
                    } else {
                        Cyclotomic::zero()
                    };
                    assert_eq!(acc, expected, "{} x {} in {}", ir_a.label, ir_b.label, g.name);
                }
            }
        }
    }

    #[test]
    fn models_are_homomorphisms() {
        for spec in [
            GroupSpec::Symmetric(3),
            GroupSpec::Symmetric(4),
            GroupSpec::Dihedral(4),
            GroupSpec::Dihedral(5),
        ] {
            let g = group_builtin(&spec).unwrap();
            for ir in &g.irreps {
                let Some(model) = &ir.model else { continue };
                for i in 0..g.order() {
                    // unitary
                    assert!(mat_eq(
                        &mat_mul(&conj_transpose(&model[i]), &model[i]),
                        &identity(ir.degree)
                    ));
                    // character = trace
                    let mut t = Cyclotomic::zero();
                    for (r, row) in model[i].iter().enumerate() {
                        t = t.add(&row[r]);
                    }
                    assert_eq!(t, ir.character[i]);
                    for j in 0..g.order() {
                        let prod = mat_mul(&model[i], &model[j]);
                        assert!(
                            mat_eq(&prod, &model[g.mult[i][j]]),
                            "{} {} model homomorphism",
                            g.name,
                            ir.label
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multiplication_table_is_latin_square() {
        let g = group_builtin(&GroupSpec::Dihedral(4)).unwrap();
        let d = g.order();
        for i in 0..d {
            let row: std::collections::BTreeSet<usize> = g.mult[i].iter().copied().collect();
            assert_eq!(row.len(), d);
            assert_eq!(g.mult[i][g.inverse[i]], 0);
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_group_spec("Z3").unwrap(), GroupSpec::Cyclic(3));
        assert_eq!(
            parse_group_spec("Z2xZ3").unwrap(),
            GroupSpec::ProductCyclic(vec![2, 3])
        );
        assert_eq!(parse_group_spec("S4").unwrap(), GroupSpec::Symmetric(4));
        assert_eq!(parse_group_spec("D5").unwrap(), GroupSpec::Dihedral(5));
        assert!(matches!(
            parse_group_spec("Z2*S2").unwrap(),
            GroupSpec::Product(_, _)
        ));
        assert!(parse_group_spec("Q8").is_err());
    }

    #[test]
    fn irrep_aliases() {
        let z3 = group_builtin(&GroupSpec::Cyclic(3)).unwrap();
        assert_eq!(z3.irrep_by_label("triv").unwrap().label, "chi0");
        // det(delta) = zeta_3, matching chi1.
        assert_eq!(z3.irrep_by_label("det").unwrap().label, "chi1");
        let s3 = group_builtin(&GroupSpec::Symmetric(3)).unwrap();
        assert_eq!(s3.irrep_by_label("sign").unwrap().label, "sign");
    }
}
