//! Command implementations. Each returns the process exit code:
//! 0 success/affirmed, 1 verification failed, 2 build/config error,
//! 3 inconclusive, 4 not found.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use treegibbs::analysis::{uniqueness_condition, Verdict};
use treegibbs::grid::{QuadratureRule, Scheme};
use treegibbs::kernels::{
    catalog, find_k0, four_cycle_kernel, k2_kernel, k3_kernel, k_ge4_kernel, Kernel, KernelFamily,
    MomentSystem, XiExpr,
};
use treegibbs::operators::{a_to_hammerstein, apply_h, rescale_pair, PairForm};
use treegibbs::solver::{
    catalog_pairs, find_cycles, preferred_scheme, verify_catalog, PairClass, SolverConfig,
};
use treegibbs::{Real, DENSE_SCAN_POINTS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BUILD_ERROR: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

/// Everything a command needs to know, after flag/config merging.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub family: Option<String>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub xi: Option<String>,
    pub xi_seed: u64,
    pub xi_file: Option<PathBuf>,
    pub kernel_file: Option<PathBuf>,
    pub j: f64,
    pub beta: f64,
    pub nodes: usize,
    pub scheme: Option<Scheme>,
    pub seed: u64,
    pub starts: usize,
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub damping: Option<f64>,
    pub dedup_radius: Option<f64>,
    pub perturbation: Option<f64>,
    pub k_max: Option<u32>,
    pub out: PathBuf,
}

fn fail(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_BUILD_ERROR
}

fn ensure_out(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let file = fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::to_writer_pretty(file, value).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(())
}

/// Parses the family flag into a [`KernelFamily`], pulling its parameters.
fn parse_family(resolved: &Resolved) -> Result<KernelFamily, String> {
    let name = resolved
        .family
        .as_deref()
        .ok_or("a --family is required here")?;
    match name {
        "k2_family" => Ok(KernelFamily::K2 {
            n: resolved.n.ok_or("k2_family needs --n (root order)")?,
        }),
        "k3_family" => Ok(KernelFamily::K3),
        "k_ge4_family" => Ok(KernelFamily::KGe4 {
            k: resolved.k.ok_or("k_ge4_family needs --k (branching order)")?,
        }),
        "four_cycle_family" => Ok(KernelFamily::FourCycle {
            k: resolved.k.ok_or("four_cycle_family needs --k (branching order)")?,
        }),
        "generic_xi" => Ok(KernelFamily::GenericXi {
            j: resolved.j,
            beta: resolved.beta,
        }),
        other => Err(format!(
            "unknown family `{other}`; usage: one of k2_family, k3_family, k_ge4_family, four_cycle_family, generic_xi (see `treegibbs catalog`)"
        )),
    }
}

fn parse_xi(resolved: &Resolved) -> Result<XiExpr, String> {
    match resolved.xi.as_deref() {
        Some("zero") => Ok(XiExpr::Zero),
        Some("product") => Ok(XiExpr::Product),
        Some("random_symmetric") | Some("random") => Ok(XiExpr::RandomSymmetric {
            seed: resolved.xi_seed,
        }),
        Some(other) => Err(format!(
            "unknown xi expression `{other}` (zero | product | random_symmetric)"
        )),
        None => Err("an --xi expression is required here".into()),
    }
}

fn file_slug(family: &KernelFamily) -> String {
    match family {
        KernelFamily::GenericXi { .. } => "generic_xi".into(),
        KernelFamily::K2 { n } => format!("k2_family_n{n}"),
        KernelFamily::K3 => "k3_family".into(),
        KernelFamily::KGe4 { k } => format!("k_ge4_family_k{k}"),
        KernelFamily::FourCycle { k } => format!("four_cycle_family_k{k}"),
        KernelFamily::File => "file".into(),
    }
}

/// Builds the kernel a command should operate on, from whichever source the
/// flags selected: an exported kernel matrix, an interaction matrix, a
/// builtin interaction expression, or a catalog family.
fn build_kernel(resolved: &Resolved) -> Result<Kernel<Real>, String> {
    let scheme_for = |family: Option<&KernelFamily>| {
        resolved.scheme.unwrap_or_else(|| {
            family.map_or(Scheme::GaussLegendre, preferred_scheme)
        })
    };
    if let Some(path) = &resolved.kernel_file {
        let rule = QuadratureRule::<Real>::build(scheme_for(None), resolved.nodes)
            .map_err(|e| e.to_string())?;
        let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        return Kernel::read_matrix_csv(rule, BufReader::new(file)).map_err(|e| e.to_string());
    }
    if let Some(path) = &resolved.xi_file {
        let rule = QuadratureRule::<Real>::build(scheme_for(None), resolved.nodes)
            .map_err(|e| e.to_string())?;
        let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let raw = Kernel::read_matrix_csv(Arc::clone(&rule), BufReader::new(file))
            .map_err(|e| e.to_string())?;
        return Kernel::from_xi_grid(
            rule,
            raw.matrix(),
            raw.row_zero(),
            resolved.j,
            resolved.beta,
        )
        .map_err(|e| e.to_string());
    }
    if resolved.xi.is_some() {
        let expr = parse_xi(resolved)?;
        let rule = QuadratureRule::<Real>::build(scheme_for(None), resolved.nodes)
            .map_err(|e| e.to_string())?;
        return expr
            .kernel(rule, resolved.j, resolved.beta)
            .map_err(|e| e.to_string());
    }
    let family = parse_family(resolved)?;
    let rule = QuadratureRule::<Real>::build(scheme_for(Some(&family)), resolved.nodes)
        .map_err(|e| e.to_string())?;
    match family {
        KernelFamily::K2 { n } => k2_kernel(rule, n).map_err(|e| e.to_string()),
        KernelFamily::K3 => k3_kernel(rule).map_err(|e| e.to_string()),
        KernelFamily::KGe4 { k } => k_ge4_kernel(rule, k).map_err(|e| e.to_string()),
        KernelFamily::FourCycle { k } => {
            let system = MomentSystem::solve().map_err(|e| e.to_string())?;
            four_cycle_kernel(rule, k, &system).map_err(|e| e.to_string())
        }
        KernelFamily::GenericXi { j, beta } => {
            let expr = parse_xi(resolved)
                .map_err(|e| format!("generic_xi needs an interaction: {e}"))?;
            expr.kernel(rule, j, beta).map_err(|e| e.to_string())
        }
        KernelFamily::File => Err("family `file` needs --kernel-file".into()),
    }
}

pub fn cmd_catalog() -> i32 {
    println!("{:<18} {:<12} guarantee", "family", "order");
    for entry in catalog() {
        println!(
            "{:<18} {:<12} {}",
            entry.name, entry.branching_order, entry.guarantee
        );
        println!("{:<18} {:<12}   parameters: {}", "", "", entry.parameters);
    }
    EXIT_OK
}

fn write_pair_csv(
    path: &Path,
    rule_nodes: &[Real],
    columns: [&[Real]; 4],
) -> Result<(), String> {
    let mut text = String::from("t,f,g,Hf,Hg\n");
    for (i, &t) in rule_nodes.iter().enumerate() {
        text.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t, columns[0][i], columns[1][i], columns[2][i], columns[3][i]
        ));
    }
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_verify(resolved: &Resolved) -> i32 {
    let family = match parse_family(resolved) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let tol = resolved.tol.unwrap_or(1e-6);
    let report = match verify_catalog::<Real>(&family, resolved.nodes, tol) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = ensure_out(&resolved.out) {
        return fail(e);
    }
    let slug = file_slug(&family);
    let json_path = resolved.out.join(format!("verify_{slug}.json"));
    if let Err(e) = write_json(&json_path, &report) {
        return fail(e);
    }

    // Plot data: the verified pair and its Hammerstein images.
    let scheme = resolved.scheme.unwrap_or_else(|| preferred_scheme(&family));
    if let Ok(rule) = QuadratureRule::<Real>::build(scheme, resolved.nodes) {
        if let Ok(kernel) = rebuild_for_plot(&family, Arc::clone(&rule)) {
            if let Some(pairs) = catalog_pairs(&kernel) {
                for (idx, (f, g, k)) in pairs.iter().enumerate() {
                    let hf = apply_h(&kernel, f, *k).expect("same rule");
                    let hg = apply_h(&kernel, g, *k).expect("same rule");
                    let csv = resolved.out.join(format!("verify_{slug}_pair{idx}.csv"));
                    let nodes: Vec<Real> = rule.nodes().to_vec();
                    let _ = write_pair_csv(
                        &csv,
                        &nodes,
                        [f.values(), g.values(), hf.values(), hg.values()],
                    );
                }
            }
        }
    }

    for entry in &report.entries {
        println!(
            "{}: k = {}, residuals ({:.3e}, {:.3e}), at 2N ({:.3e}, {:.3e}) -> {}",
            entry.label,
            entry.k,
            entry.residuals.0,
            entry.residuals.1,
            entry.residuals_doubled.0,
            entry.residuals_doubled.1,
            if entry.pass { "ok" } else { "FAILED" }
        );
    }
    println!("report: {}", json_path.display());
    if report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

fn rebuild_for_plot(
    family: &KernelFamily,
    rule: Arc<QuadratureRule<Real>>,
) -> Result<Kernel<Real>, String> {
    match family {
        KernelFamily::K2 { n } => k2_kernel(rule, *n).map_err(|e| e.to_string()),
        KernelFamily::K3 => k3_kernel(rule).map_err(|e| e.to_string()),
        KernelFamily::KGe4 { k } => k_ge4_kernel(rule, *k).map_err(|e| e.to_string()),
        KernelFamily::FourCycle { k } => {
            let system = MomentSystem::solve().map_err(|e| e.to_string())?;
            four_cycle_kernel(rule, *k, &system).map_err(|e| e.to_string())
        }
        other => Err(format!("{other} has no closed forms")),
    }
}

#[derive(Serialize)]
struct SolveReportOut {
    family: String,
    k: u32,
    nodes: usize,
    scheme: String,
    seed: u64,
    start_count: usize,
    pairs: Vec<PairOut>,
    failures: Vec<FailureOut>,
}

#[derive(Serialize)]
struct PairOut {
    index: usize,
    class: PairClass,
    start: String,
    iterations: usize,
    separation: f64,
    residuals: (f64, f64),
    form: String,
    lambda: Option<(f64, f64)>,
    csv: String,
    t: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

#[derive(Serialize)]
struct FailureOut {
    start: String,
    #[serde(flatten)]
    failure: treegibbs::solver::StartFailure,
}

pub fn cmd_solve(resolved: &Resolved) -> i32 {
    let k = match resolved.k {
        Some(k) if k >= 1 => k,
        Some(_) | None => return fail("solve needs --k >= 1 (branching order)"),
    };
    if k == 1 {
        eprintln!(
            "note: at branching order 1 the period-2 system admits no pair with f != g; \
             expect fixed points only"
        );
    }
    let kernel = match build_kernel(resolved) {
        Ok(k) => k,
        Err(e) => return fail(e),
    };
    let mut config = SolverConfig::<Real>::new(k).with_seed(resolved.seed);
    config.random_starts = resolved.starts;
    if let Some(t) = resolved.tol {
        config.tolerance = t;
    }
    if let Some(m) = resolved.max_iterations {
        config.max_iterations = m;
    }
    if let Some(d) = resolved.damping {
        config.damping = d;
    }
    if let Some(r) = resolved.dedup_radius {
        config.dedup_radius = r;
    }
    if let Some(p) = resolved.perturbation {
        config.perturbation = p;
    }
    let result = match find_cycles(&kernel, &config) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = ensure_out(&resolved.out) {
        return fail(e);
    }
    let slug = file_slug(&kernel.family());
    let nodes: Vec<Real> = kernel.rule().nodes().to_vec();
    let mut pairs_out = Vec::new();
    for (index, solved) in result.pairs.iter().enumerate() {
        // Report solutions in plain Hammerstein form when the conversion
        // chain applies; at k = 1 the recursion form is the statement.
        let (f, g, form, lambda) = if k >= 2 {
            let lambda_form = match a_to_hammerstein(&kernel, &solved.pair) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let (l1, l2) = lambda_form.lambda.unwrap();
            let plain = match rescale_pair(&lambda_form.f, &lambda_form.g, l1, l2, k) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            (plain.f, plain.g, PairForm::Hammerstein, Some((l1, l2)))
        } else {
            (
                solved.pair.f.clone(),
                solved.pair.g.clone(),
                PairForm::AForm,
                None,
            )
        };
        let hf = apply_h(&kernel, &f, k).expect("same rule");
        let hg = apply_h(&kernel, &g, k).expect("same rule");
        let csv_name = format!("solve_{slug}_pair{index}.csv");
        let csv_path = resolved.out.join(&csv_name);
        if let Err(e) = write_pair_csv(
            &csv_path,
            &nodes,
            [f.values(), g.values(), hf.values(), hg.values()],
        ) {
            return fail(e);
        }
        let (r1, r2) = solved.pair.residuals.unwrap_or((f64::NAN, f64::NAN));
        pairs_out.push(PairOut {
            index,
            class: solved.class,
            start: solved.start_label.clone(),
            iterations: solved.iterations,
            separation: solved.separation,
            residuals: (r1, r2),
            form: format!("{form:?}"),
            lambda,
            csv: csv_name,
            t: nodes.clone(),
            f: f.values().to_vec(),
            g: g.values().to_vec(),
        });
    }
    let report = SolveReportOut {
        family: kernel.family().to_string(),
        k,
        nodes: nodes.len(),
        scheme: kernel.rule().scheme().to_string(),
        seed: resolved.seed,
        start_count: result.start_count,
        pairs: pairs_out,
        failures: result
            .failures
            .iter()
            .map(|(start, failure)| FailureOut {
                start: start.clone(),
                failure: failure.clone(),
            })
            .collect(),
    };
    let json_path = resolved.out.join(format!("solve_{slug}.json"));
    if let Err(e) = write_json(&json_path, &report) {
        return fail(e);
    }
    for pair in &report.pairs {
        println!(
            "pair {}: {:?} from {} in {} iterations, separation {:.3e}, residuals ({:.3e}, {:.3e})",
            pair.index,
            pair.class,
            pair.start,
            pair.iterations,
            pair.separation,
            pair.residuals.0,
            pair.residuals.1
        );
    }
    println!(
        "{} pairs, {} failed starts; report: {}",
        report.pairs.len(),
        report.failures.len(),
        json_path.display()
    );
    EXIT_OK
}

pub fn cmd_uniq(resolved: &Resolved) -> i32 {
    let k = match resolved.k {
        Some(k) if k >= 2 => k,
        _ => return fail("uniq needs --k >= 2 (the condition is stated for k >= 2)"),
    };
    let kernel = match build_kernel(resolved) {
        Ok(k) => k,
        Err(e) => return fail(e),
    };
    let report = match uniqueness_condition(&kernel, k, DENSE_SCAN_POINTS) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = ensure_out(&resolved.out) {
        return fail(e);
    }
    let path = resolved
        .out
        .join(format!("uniq_{}.json", file_slug(&kernel.family())));
    if let Err(e) = write_json(&path, &report) {
        return fail(e);
    }
    println!(
        "M = {:.6e}, m = {:.6e}, (M/m)^k - (m/M)^k = {:.6e}, threshold 1/k = {:.6e}",
        report.max, report.min, report.uniqueness_lhs, report.threshold
    );
    match report.verdict {
        Verdict::NoPeriod2Guaranteed => {
            println!("verdict: no_period2_guaranteed (no period-2 pair with f != g exists)");
            EXIT_OK
        }
        Verdict::Inconclusive => {
            println!("verdict: inconclusive (the sufficient condition does not apply)");
            EXIT_INCONCLUSIVE
        }
    }
}

#[derive(Serialize)]
struct K0Report {
    k_max: u32,
    k0: Option<u32>,
    dense_min: Option<f64>,
    grid_points: usize,
}

pub fn cmd_k0(resolved: &Resolved) -> i32 {
    let k_max = match resolved.k_max {
        Some(k) if k >= 2 => k,
        _ => return fail("k0 needs --k-max >= 2"),
    };
    let system = match MomentSystem::solve() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let found = find_k0(&system, k_max, DENSE_SCAN_POINTS);
    if let Err(e) = ensure_out(&resolved.out) {
        return fail(e);
    }
    let report = K0Report {
        k_max,
        k0: found.map(|(k, _)| k),
        dense_min: found.map(|(_, m)| m),
        grid_points: DENSE_SCAN_POINTS,
    };
    let path = resolved.out.join("k0.json");
    if let Err(e) = write_json(&path, &report) {
        return fail(e);
    }
    match found {
        Some((k0, min)) => {
            println!("k0 = {k0} (dense-grid min {min:.6e})");
            EXIT_OK
        }
        None => {
            println!("no positive order found below k_max = {k_max}");
            EXIT_NOT_FOUND
        }
    }
}

pub fn cmd_export_kernel(resolved: &Resolved) -> i32 {
    let kernel = match build_kernel(resolved) {
        Ok(k) => k,
        Err(e) => return fail(e),
    };
    if let Err(e) = ensure_out(&resolved.out) {
        return fail(e);
    }
    let slug = file_slug(&kernel.family());
    let csv_path = resolved.out.join(format!("kernel_{slug}.csv"));
    let file = match fs::File::create(&csv_path) {
        Ok(f) => f,
        Err(e) => return fail(format!("{}: {e}", csv_path.display())),
    };
    if let Err(e) = kernel.write_matrix_csv(std::io::BufWriter::new(file)) {
        return fail(e);
    }
    // Sidecar metadata, with a fresh dense scan when the kernel supports it.
    let mut kernel = kernel;
    if kernel.scan().is_none() {
        kernel.run_scan(DENSE_SCAN_POINTS);
    }
    let meta_path = resolved.out.join(format!("kernel_{slug}.json"));
    if let Err(e) = write_json(&meta_path, &kernel.metadata()) {
        return fail(e);
    }
    println!(
        "wrote {} and {}",
        csv_path.display(),
        meta_path.display()
    );
    EXIT_OK
}

