//! Hermite algebra: orthogonality by quadrature and by Monte Carlo, and the
//! monomial expansions `x^m = Σ_p p! C(m,p) μ_{m-p} H_p` for small `m`.

use fbmvar_core::hermite::{hermite_all, hermite_inner_product, monomial_in_hermite, GaussHermite};
use fbmvar_core::numeric::CompensatedSum;
use fbmvar_core::rng::{path_rng, replicate_seed, standard_normal};
use fbmvar_core::WeightFunction;

use super::{Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::parallel::par_chunks;
use crate::report::{Estimate, Report};

const MAX_DEGREE: usize = 6;
const QUADRATURE_NODES: usize = 40;
const QUADRATURE_TOL: f64 = 1e-10;
const CORRELATION: f64 = 0.5;
const CHUNK: usize = 10_000;

/// `(m, coefficients of H_0..H_m)` for the monomials checked exactly.
const EXPANSIONS: [(u32, &[u128]); 4] = [
    (2, &[1, 0, 2]),
    (3, &[0, 3, 0, 6]),
    (4, &[3, 0, 12, 0, 24]),
    (5, &[0, 15, 0, 60, 0, 120]),
];

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.5,
            order: MAX_DEGREE as u32,
            weight: WeightFunction::One,
            levels: vec![1],
            replicates: 1_000_000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let mut report = Report::new("hermite-algebra");
    report.echo("seed", s.seed);
    report.echo("replicates", s.replicates as u64);
    report.echo("max_degree", MAX_DEGREE as u64);
    report.echo("correlation", CORRELATION);

    // Quadrature with c = 1: E[H_p(X) H_q(X)] = 1{p=q}/q!.
    let gh = GaussHermite::new(QUADRATURE_NODES);
    let mut worst: f64 = 0.0;
    for p in 0..=MAX_DEGREE as u32 {
        for q in 0..=MAX_DEGREE as u32 {
            let v = gh.expectation(|x| {
                let mut h = [0.0; MAX_DEGREE + 1];
                hermite_all(x, &mut h);
                h[p as usize] * h[q as usize]
            });
            worst = worst.max((v - hermite_inner_product(p, q, 1.0)).abs());
        }
    }
    report.put("quadrature_max_error", Estimate::exact(worst));
    report.check(
        "orthogonality by quadrature",
        format!("|E[H_p H_q] - 1{{p=q}}/q!| <= {QUADRATURE_TOL:e} for p, q <= {MAX_DEGREE}"),
        format!("max error {worst:e}"),
        worst <= QUADRATURE_TOL,
    );

    // Monte Carlo with correlation c: per chunk sums of each product and its square.
    let d = MAX_DEGREE;
    let c = CORRELATION;
    let chunks = par_chunks(s.replicates, CHUNK, |range| {
        let mut rng = path_rng(replicate_seed(s.seed, (range.start / CHUNK) as u64));
        let mut sums = vec![(0.0f64, 0.0f64); d * d];
        let (mut hx, mut hy) = ([0.0; MAX_DEGREE + 1], [0.0; MAX_DEGREE + 1]);
        for _ in range {
            let x = standard_normal(&mut rng);
            let z = standard_normal(&mut rng);
            let y = c * x + (1.0 - c * c).sqrt() * z;
            hermite_all(x, &mut hx);
            hermite_all(y, &mut hy);
            for p in 1..=d {
                for q in 1..=d {
                    let v = hx[p] * hy[q];
                    let e = &mut sums[(p - 1) * d + q - 1];
                    e.0 += v;
                    e.1 += v * v;
                }
            }
        }
        sums
    });
    let n = s.replicates as f64;
    let mut outside = Vec::new();
    let mut max_z: f64 = 0.0;
    for p in 1..=d {
        for q in 1..=d {
            let (mut a, mut b) = (CompensatedSum::new(), CompensatedSum::new());
            for ch in &chunks {
                a.add(ch[(p - 1) * d + q - 1].0);
                b.add(ch[(p - 1) * d + q - 1].1);
            }
            let mean = a.value() / n;
            let var = (b.value() / n - mean * mean) * n / (n - 1.0);
            let se = (var / n).sqrt();
            let exact = hermite_inner_product(p as u32, q as u32, c);
            let z = (mean - exact) / se;
            max_z = max_z.max(z.abs());
            if z.abs() > 3.0 {
                outside.push(format!("({p},{q}): z = {z:.2}"));
            }
            if p == q {
                report.put(&format!("mc_inner_{p}{q}"), Estimate::mc(mean, se));
            }
        }
    }
    report.put("mc_max_abs_z", Estimate::exact(max_z));
    report.check(
        "orthogonality by Monte Carlo",
        format!("E[H_p(X) H_q(Y)] within 3 SE of 1{{p=q}} c^q/q! at c = {c}, 1 <= p, q <= {d}"),
        if outside.is_empty() {
            format!("all {} pairs inside; max |z| = {max_z:.2}", d * d)
        } else {
            format!("outside: {}", outside.join(", "))
        },
        outside.is_empty(),
    );

    let mut mismatches = Vec::new();
    for (m, table) in EXPANSIONS {
        let e = monomial_in_hermite(m);
        let got: Vec<Option<u128>> = (0..=m).map(|p| e.exact_coefficient(p)).collect();
        let want: Vec<Option<u128>> = table.iter().map(|&v| Some(v)).collect();
        if got != want {
            mismatches.push(format!("x^{m}: {got:?}"));
        }
    }
    report.check(
        "monomial expansions",
        "x^2..x^5 match the closed-form table exactly",
        if mismatches.is_empty() { "all exact".to_string() } else { mismatches.join("; ") },
        mismatches.is_empty(),
    );
    Ok(report)
}
