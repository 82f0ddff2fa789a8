//! Command-line front end: group catalogs, hsops and module bases,
//! decompositions, projections, kernel blocks, and the verification suites,
//! with optional JSON output for golden-file testing.

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::cst::{cst_det_factorization, cst_jacobian_relations, CstEngine};
use crate::cyclotomic::Rational;
use crate::error::{Error, Result};
use crate::group::{group_builtin, group_hyperplanes, parse_group_spec, PseudoreflectionGroup};
use crate::invariant::{inv_hsop, inv_module_basis, poincare_coefficients};
use crate::isotypic::{iso_commute_with_mtheta, iso_project, iso_verify_algebra};
use crate::kernel::{
    ker_block, ker_check_invariance, ker_disc_reducing, ker_jacobian_block, ker_polydisc_reducing,
    ker_transported, DiagonalKernel,
};
use crate::poly::{parse_poly, Poly};
use crate::report::Report;

#[derive(Parser)]
#[command(name = "cstlab", version, about = "Exact invariant theory of finite pseudoreflection groups")]
struct Cli {
    /// Emit a single JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized parts of the verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include floating-point approximations alongside exact values.
    #[arg(long, global = true)]
    approx: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Catalog report for a builtin group (Z5, Z2xZ3, S3, D4, Z2*S2, ...).
    Group { spec: String },
    /// Canonical parameter system and Poincaré polynomial.
    Hsop { spec: String },
    /// Module basis over the invariant ring.
    Basis { spec: String },
    /// Decompose a polynomial into basis components with invariant coefficients.
    Decompose {
        #[arg(long)]
        group: String,
        #[arg(long)]
        poly: String,
        /// Treat the input as a series truncation at this degree.
        #[arg(long)]
        series: Option<u32>,
    },
    /// Project a polynomial onto an isotypic (or fine) component.
    Project {
        #[arg(long)]
        group: String,
        #[arg(long)]
        irrep: String,
        /// Matrix-entry refinement "i,j" (1-based).
        #[arg(long)]
        fine: Option<String>,
        #[arg(long)]
        poly: String,
    },
    /// Kernel block for an irrep, with transported coefficients when available.
    Kernel {
        /// Kernel spec: hardy, bergman:L, dirichlet, ball:L:n, or *-products.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        group: String,
        #[arg(long)]
        block: String,
        #[arg(long, default_value_t = 8)]
        degree: u32,
    },
    /// Run a verification suite: lambda, cst, isotypic, kernels, or all.
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}

fn builtin(spec: &str) -> Result<PseudoreflectionGroup> {
    group_builtin(&parse_group_spec(spec)?)
}

fn poincare_text(degrees: &[u32]) -> String {
    let coeffs = poincare_coefficients(degrees);
    let mut parts = vec![];
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let body = match k {
            0 => c.to_string(),
            1 if c == 1 => "t".into(),
            1 => format!("{c}*t"),
            _ if c == 1 => format!("t^{k}"),
            _ => format!("{c}*t^{k}"),
        };
        parts.push(body);
    }
    parts.join(" + ")
}

fn rational_str(r: &Rational) -> String {
    crate::cyclotomic::format_rational(r)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.cmd {
        Cmd::Group { spec } => cmd_group(cli, spec),
        Cmd::Hsop { spec } => cmd_hsop(cli, spec),
        Cmd::Basis { spec } => cmd_basis(cli, spec),
        Cmd::Decompose {
            group,
            poly,
            series,
        } => cmd_decompose(cli, group, poly, *series),
        Cmd::Project {
            group,
            irrep,
            fine,
            poly,
        } => cmd_project(cli, group, irrep, fine.as_deref(), poly),
        Cmd::Kernel {
            spec,
            group,
            block,
            degree,
        } => cmd_kernel(cli, spec, group, block, *degree),
        Cmd::Verify {
            group,
            suite,
            degree,
        } => cmd_verify(cli, group, suite, *degree),
    }
}

fn cmd_group(cli: &Cli, spec: &str) -> Result<i32> {
    let g = builtin(spec)?;
    let hyperplanes = group_hyperplanes(&g)?;
    if cli.json {
        let out = json!({
            "name": g.name,
            "order": g.order(),
            "dimension": g.n,
            "conductor": g.conductor,
            "pseudoreflections": g.pseudoreflections().len(),
            "reflection_generated": g.reflection_generated,
            "hyperplanes": hyperplanes.iter().map(|h| json!({
                "form": h.linear_form.to_string(),
                "order": h.order,
            })).collect::<Vec<_>>(),
            "irreps": g.irreps.iter().map(|ir| json!({
                "label": ir.label,
                "degree": ir.degree,
                "model_available": ir.model.is_some(),
            })).collect::<Vec<_>>(),
        });
        println!("{out}");
    } else {
        println!(
            "group {}: order {}, {} pseudoreflections, reflection-generated: {}",
            g.name,
            g.order(),
            g.pseudoreflections().len(),
            g.reflection_generated
        );
        println!("conductor {}", g.conductor);
        for h in &hyperplanes {
            println!("hyperplane {} (stabilizer order {})", h.linear_form, h.order);
        }
        for ir in &g.irreps {
            println!(
                "irrep {} (degree {}{})",
                ir.label,
                ir.degree,
                if ir.model.is_some() { ", model" } else { "" }
            );
        }
    }
    Ok(0)
}

fn cmd_hsop(cli: &Cli, spec: &str) -> Result<i32> {
    let g = builtin(spec)?;
    let h = inv_hsop(&g)?;
    if cli.json {
        let out = json!({
            "group": g.name,
            "thetas": h.thetas.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "degrees": h.degrees,
            "poincare": poincare_text(&h.degrees),
        });
        println!("{out}");
    } else {
        for (i, t) in h.thetas.iter().enumerate() {
            println!("theta{} = {} (degree {})", i + 1, t, h.degrees[i]);
        }
        println!("poincare: {}", poincare_text(&h.degrees));
    }
    Ok(0)
}

fn cmd_basis(cli: &Cli, spec: &str) -> Result<i32> {
    let g = builtin(spec)?;
    let h = inv_hsop(&g)?;
    let b = inv_module_basis(&g, &h)?;
    if cli.json {
        let out = json!({
            "group": g.name,
            "basis": b.polys.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "degrees": b.degrees,
            "poincare": poincare_text(&h.degrees),
        });
        println!("{out}");
    } else {
        for (p, e) in b.polys.iter().zip(b.degrees.iter()) {
            println!("p = {p} (degree {e})");
        }
        println!("poincare: {}", poincare_text(&h.degrees));
    }
    Ok(0)
}

fn cmd_decompose(cli: &Cli, group: &str, poly: &str, series: Option<u32>) -> Result<i32> {
    let g = builtin(group)?;
    let f = parse_poly(poly, g.n)?;
    let mut engine = CstEngine::new(&g)?;
    let dec = match series {
        Some(cap) => engine.decompose_series(&f, cap)?,
        None => engine.decompose(&f)?,
    };
    let mut recon = Poly::zero(g.n);
    for (p, c) in engine.basis.polys.iter().zip(dec.coefficients.iter()) {
        recon = recon.add(&p.mul(c));
    }
    let reconstructed = match series {
        Some(cap) => recon == f.truncate_degree(cap),
        None => recon == f,
    };
    if cli.json {
        let mut out = json!({
            "group": g.name,
            "basis": engine.basis.polys.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "coefficients": dec.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "theta_forms": dec.theta_forms.iter().map(|q| q.q.format_with_letter('u')).collect::<Vec<_>>(),
            "reconstructed": reconstructed,
        });
        if cli.approx {
            let approx: Vec<Value> = dec
                .coefficients
                .iter()
                .map(|c| {
                    Value::Array(
                        c.terms()
                            .map(|(idx, coeff)| {
                                let a = coeff.approx();
                                json!([format!("{:?}", idx.0), a.re, a.im])
                            })
                            .collect(),
                    )
                })
                .collect();
            out["approx_coefficients"] = Value::Array(approx);
        }
        println!("{out}");
    } else {
        for (j, (c, q)) in dec
            .coefficients
            .iter()
            .zip(dec.theta_forms.iter())
            .enumerate()
        {
            println!(
                "f_{} = {}  (p = {}, q = {})",
                j + 1,
                c,
                engine.basis.polys[j],
                q.q.format_with_letter('u')
            );
        }
        println!("reconstructed: {reconstructed}");
    }
    Ok(if reconstructed { 0 } else { 1 })
}

fn cmd_project(cli: &Cli, group: &str, irrep: &str, fine: Option<&str>, poly: &str) -> Result<i32> {
    let g = builtin(group)?;
    let f = parse_poly(poly, g.n)?;
    let ir = g.irrep_by_label(irrep)?;
    let fine = match fine {
        None => None,
        Some(s) => {
            let (i, j) = s
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| Error::Parse(format!("bad --fine {s:?}, expected i,j")))?;
            Some((i, j))
        }
    };
    let proj = iso_project(&f, &g, ir, fine)?;
    if cli.json {
        let mut out = json!({
            "group": g.name,
            "irrep": ir.label,
            "fine": fine.map(|(i, j)| json!([i, j])),
            "projection": proj.to_string(),
        });
        if cli.approx {
            let approx: Vec<Value> = proj
                .terms()
                .map(|(idx, c)| {
                    let a = c.approx();
                    json!([format!("{:?}", idx.0), a.re, a.im])
                })
                .collect();
            out["approx_projection"] = Value::Array(approx);
        }
        println!("{out}");
    } else {
        println!("{proj}");
    }
    Ok(0)
}

fn kernel_vars(n: usize) -> (Vec<String>, Vec<String>) {
    let z: Vec<String> = (0..n).map(|i| format!("z{}", i + 1)).collect();
    let w: Vec<String> = (0..n).map(|i| format!("w{}", i + 1)).collect();
    (z, w)
}

fn cmd_kernel(cli: &Cli, spec: &str, group: &str, block: &str, degree: u32) -> Result<i32> {
    let g = builtin(group)?;
    let k = DiagonalKernel::parse(spec)?;
    if k.nvars != g.n {
        return Err(Error::ShapeError(format!(
            "kernel has {} variables, group acts on {}",
            k.nvars, g.n
        )));
    }
    let ir = g.irrep_by_label(block)?;
    let b = ker_block(&k, &g, ir, degree)?;
    // Try the transported form with the lowest-degree monomial generator of
    // the block.
    let transported = (|| {
        let h = inv_hsop(&g).ok()?;
        let basis = inv_module_basis(&g, &h).ok()?;
        let p = crate::isotypic::Projector::coarse(&g, ir);
        let gen = basis
            .polys
            .iter()
            .find(|q| p.apply(&g, q) == **q)?
            .clone();
        ker_transported(&k, &g, ir, &gen, degree).ok()
    })();
    let n = g.n;
    if cli.json {
        let coeffs: Vec<Value> = b
            .terms()
            .map(|(idx, c)| {
                json!([
                    idx.0[..n].to_vec(),
                    idx.0[n..].to_vec(),
                    c.to_string(),
                ])
            })
            .collect();
        let mut out = json!({
            "kernel": k.name,
            "group": g.name,
            "irrep": ir.label,
            "degree": degree,
            "block_coeffs": coeffs,
            "transported": transported.as_ref().map(|t| json!({
                "generator": t.generator.to_string(),
                "coeffs": t.coeffs.iter().map(|(m, a)| json!([m.0.clone(), rational_str(a)])).collect::<Vec<_>>(),
            })),
        });
        if cli.approx {
            if let Some(t) = &transported {
                out["transported_approx"] = Value::Array(
                    t.coeffs
                        .iter()
                        .map(|(m, a)| {
                            let f = approx_rational(a);
                            json!([m.0.clone(), f])
                        })
                        .collect(),
                );
            }
        }
        println!("{out}");
    } else {
        let (zv, wv) = kernel_vars(n);
        println!("block {} of {} for {}:", ir.label, k.name, g.name);
        for (idx, c) in b.terms() {
            let mut mono = vec![];
            for (i, &e) in idx.0[..n].iter().enumerate() {
                if e > 0 {
                    mono.push(format!("{}^{}", zv[i], e));
                }
            }
            for (i, &e) in idx.0[n..].iter().enumerate() {
                if e > 0 {
                    mono.push(format!("conj({})^{}", wv[i], e));
                }
            }
            println!("  {} * {}", c, mono.join("*"));
        }
        if let Some(t) = &transported {
            println!("transported (generator {}):", t.generator);
            for (m, a) in &t.coeffs {
                println!("  {:?} -> {}", m.0, rational_str(a));
            }
        }
    }
    Ok(0)
}

fn approx_rational(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn suite_lambda(g: &PseudoreflectionGroup, _seed: u64, _degree: u32) -> Result<Report> {
    let mut report = Report::new();
    let engine = CstEngine::new(g)?;
    let d = g.order();
    let m = g.pseudoreflections().len();
    report.record(
        "det Lambda degree = d*m/2",
        engine.lambda.det.homogeneous_degree() == Some((d * m / 2) as u32),
    );
    let hyperplanes = group_hyperplanes(g)?;
    match cst_det_factorization(&engine.lambda, &hyperplanes) {
        Ok(c) => report.record("hyperplane factorization constant nonzero", !c.is_zero()),
        Err(_) => report.record("hyperplane factorization constant nonzero", false),
    }
    match cst_jacobian_relations(&engine.hsop, &hyperplanes, &engine.lambda) {
        Ok((c1, c2)) => {
            report.record("J_theta factors through hyperplanes", !c1.is_zero());
            report.record("det Lambda is a Jacobian power", !c2.is_zero());
        }
        Err(_) => {
            report.record("J_theta factors through hyperplanes", false);
            report.record("det Lambda is a Jacobian power", false);
        }
    }
    Ok(report)
}

fn random_poly(rng: &mut impl rand::Rng, nvars: usize, maxdeg: u32) -> Poly {
    let mut f = Poly::zero(nvars);
    for _ in 0..8 {
        let exps: Vec<u32> = (0..nvars)
            .map(|_| rng.gen_range(0..=maxdeg / nvars as u32))
            .collect();
        let c = crate::cyclotomic::Cyclotomic::from_rational(crate::cyclotomic::rat(
            rng.gen_range(-9..10),
            rng.gen_range(1..5),
        ));
        f = f.add(&Poly::monomial(nvars, exps, c));
    }
    f
}

fn suite_cst(g: &PseudoreflectionGroup, seed: u64, degree: u32) -> Result<Report> {
    use rand::SeedableRng;
    let mut report = Report::new();
    let mut engine = CstEngine::new(g)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    for _ in 0..10 {
        let f = random_poly(&mut rng, g.n, degree);
        match engine.decompose(&f) {
            Ok(dec) => {
                let mut recon = Poly::zero(g.n);
                for (p, q) in engine.basis.polys.iter().zip(dec.theta_forms.iter()) {
                    recon = recon.add(&p.mul(&q.q.compose(&engine.hsop.thetas)?));
                }
                if recon != f {
                    ok = false;
                }
            }
            Err(_) => ok = false,
        }
    }
    report.record("10 random decompositions reconstruct exactly", ok);
    Ok(report)
}

fn suite_isotypic(g: &PseudoreflectionGroup, _seed: u64, degree: u32) -> Result<Report> {
    let mut report = iso_verify_algebra(g, degree.min(4));
    let h = inv_hsop(g)?;
    report.merge(iso_commute_with_mtheta(g, &h, degree.min(3)));
    Ok(report)
}

fn polydisc_hardy(n: usize) -> DiagonalKernel {
    DiagonalKernel::product((0..n).map(|_| DiagonalKernel::hardy_disc()).collect())
}

fn suite_kernels(g: &PseudoreflectionGroup, _seed: u64, degree: u32) -> Result<Report> {
    use crate::group::GroupSpec;
    let mut report = Report::new();
    let k = polydisc_hardy(g.n);
    report.record(
        "polydisc Hardy kernel is invariant",
        ker_check_invariance(&k, g, degree),
    );
    let mut sum = Poly::zero(2 * g.n);
    for ir in &g.irreps {
        sum = sum.add(&ker_block(&k, g, ir, degree)?);
    }
    report.record("kernel blocks sum to the kernel", sum == k.truncate(degree));
    let h = inv_hsop(g)?;
    report.merge(ker_jacobian_block(&k, g, &h, degree)?);
    match &g.spec {
        Some(GroupSpec::Cyclic(m)) => {
            report.merge(ker_disc_reducing(*m, &DiagonalKernel::hardy_disc(), degree)?);
        }
        Some(GroupSpec::ProductCyclic(ms)) => {
            report.merge(ker_polydisc_reducing(ms, &k, degree)?);
        }
        _ => {}
    }
    // The weighted inner product is positive and admits the adjoint checks.
    let w = k.inner_product(degree)?;
    match crate::isotypic::iso_adjoint_identities(g, &w, degree.min(3)) {
        Ok(r) => report.merge(r),
        Err(_) => report.record("adjoint identities", false),
    }
    let _ = w;
    Ok(report)
}

fn cmd_verify(cli: &Cli, group: &str, suite: &str, degree: u32) -> Result<i32> {
    let g = builtin(group)?;
    let suites: Vec<(&str, fn(&PseudoreflectionGroup, u64, u32) -> Result<Report>)> = match suite {
        "lambda" => vec![("lambda", suite_lambda)],
        "cst" => vec![("cst", suite_cst)],
        "isotypic" => vec![("isotypic", suite_isotypic)],
        "kernels" => vec![("kernels", suite_kernels)],
        "all" => vec![
            ("lambda", suite_lambda),
            ("cst", suite_cst),
            ("isotypic", suite_isotypic),
            ("kernels", suite_kernels),
        ],
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite {other:?} (expected lambda, cst, isotypic, kernels, all)"
            )))
        }
    };
    let mut all_pass = true;
    let mut results = vec![];
    for (name, f) in suites {
        let report = f(&g, cli.seed, degree)?;
        all_pass &= report.all_pass();
        results.push((name, report));
    }
    if cli.json {
        let out = json!({
            "group": g.name,
            "degree": degree,
            "seed": cli.seed,
            "suites": results.iter().map(|(name, r)| json!({
                "suite": name,
                "passed": r.passed(),
                "total": r.checks.len(),
                "failures": r.failed().iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "all_pass": all_pass,
        });
        println!("{out}");
    } else {
        for (name, r) in &results {
            println!("suite {name}: {}/{} checks pass", r.passed(), r.checks.len());
            for c in r.failed() {
                println!("  FAIL {}", c.name);
            }
        }
    }
    Ok(if all_pass { 0 } else { 1 })
}
