//! Release gate: one test per shipped numerical guarantee, each asserted at
//! its stated tolerance. `cargo test --test acceptance` prints one pass/fail
//! line per criterion.

use dirac_spectral::asymptotics::{
    asymptotics_ladder, check_ladder, exp_norm_sandwich, lemma1_sweep, CombinationCoefficients,
};
use dirac_spectral::bvp::{
    adjoint_conditions, biorthogonal_pair_on, boundary_bilinear, eigenfunction_on,
    find_eigenvalues, BiorthogonalPair, BoundaryConditions, Rectangle,
};
use dirac_spectral::expansion::{
    apply_projector, divergence_witness, projector_norm, DivergenceVerdict,
};
use dirac_spectral::solver::{oracle_constant_rebased, solve_fundamental, FundamentalMatrix};
use dirac_spectral::{Complex, Grid, GridFunction2, Potential, SpectralParameter};
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn solve(v: &Potential, lambda: Complex) -> FundamentalMatrix {
    let param = SpectralParameter::auto(lambda);
    let grid = Arc::new(Grid::for_parameter(lambda));
    let (fm, _) = solve_fundamental(v, param, &grid, 1e-12).unwrap();
    assert_liouville(&fm, lambda);
    fm
}

// de-phased determinant must be constant in x on every converged solve
fn assert_liouville(fm: &FundamentalMatrix, lambda: Complex) {
    let spread = fm.dephased_det_spread();
    assert!(spread < 1e-8, "det spread {spread:.3e} at λ = {lambda}");
}

fn trig_preset() -> Potential {
    // P = e^{2ix}, Q = e^{−ix}
    Potential::TrigPoly {
        p_coeffs: vec![(2, c(1.0, 0.0))],
        q_coeffs: vec![(-1, c(1.0, 0.0))],
    }
}

fn demo_bc() -> BoundaryConditions {
    let row = |v: [f64; 4]| v.map(|x| c(x, 0.0));
    BoundaryConditions::new([row([1.0, 0.0, 0.0, 0.0]), row([0.0, 1.0, 0.0, -2.0])]).unwrap()
}

/// Im λ of the demo spectrum: −ln2/π.
fn demo_im() -> f64 {
    -(2.0f64.ln()) / PI
}

fn demo_pairs() -> Vec<BiorthogonalPair> {
    let grid = Arc::new(Grid::for_parameter(c(5.0, 2.0)));
    let bc = demo_bc();
    (-2..=2)
        .map(|n| {
            let lambda = c(2.0 * f64::from(n), demo_im());
            biorthogonal_pair_on(&Potential::Zero, &bc, lambda, &grid, 1e-12).unwrap()
        })
        .collect()
}

#[test]
fn criterion_01_zero_potential_exactness() {
    let start = Instant::now();
    let lambdas = [
        (3.0, 0.5),
        (-3.0, -0.5),
        (10.0, 5.0),
        (-10.0, 5.0),
        (25.0, -20.0),
        (-25.0, 20.0),
        (60.0, 50.0),
        (-60.0, -50.0),
        (95.0, 2.0),
        (-95.0, -2.0),
        (7.0, -35.0),
        (-7.0, 35.0),
        (40.0, 12.0),
        (-40.0, -12.0),
        (80.0, -44.0),
        (-80.0, 44.0),
        (15.0, 0.0),
        (-15.0, 0.0),
        (2.0, 50.0),
        (2.0, -50.0),
    ];
    assert_eq!(lambdas.len(), 20);
    for (re, im) in lambdas {
        let lambda = c(re, im);
        let fm = solve(&Potential::Zero, lambda);
        let grid = fm.grid().clone();
        let one = c(1.0, 0.0);

        // remainders vanish: the de-phased columns are the identity columns
        let col1 = fm.dephased_column(1);
        let col2 = fm.dephased_column(2);
        for i in 0..grid.len() {
            let (e11, e21) = col1.at(i);
            let (e12, e22) = col2.at(i);
            for b in [e11 - one, e21, e12, e22 - one] {
                assert!(b.norm() < 1e-12, "remainder {b} at λ = {lambda}");
            }
        }

        // materialized matrix is diag(e^{iλx}, e^{−iλx})
        let y1 = fm.column(1);
        let y2 = fm.column(2);
        for (i, &x) in grid.nodes().iter().enumerate() {
            let ph1 = (c(0.0, 1.0) * lambda * x).exp();
            let ph2 = (-c(0.0, 1.0) * lambda * x).exp();
            let (a11, a21) = y1.at(i);
            let (a12, a22) = y2.at(i);
            assert!((a11 - ph1).norm() <= 1e-12 * ph1.norm());
            assert!((a22 - ph2).norm() <= 1e-12 * ph2.norm());
            assert!(a21.norm() <= 1e-12 * ph1.norm());
            assert!(a12.norm() <= 1e-12 * ph2.norm());
        }
    }
    assert!(start.elapsed().as_secs_f64() < 5.0, "budget exceeded");
}

#[test]
fn criterion_02_constant_potential_oracle() {
    let start = Instant::now();
    let p = c(1.0, 0.0);
    let q = c(1.0, 0.0);
    let v = Potential::constant(p, q);
    // |Im λ| stays below ~2.9: comparing de-phased entries divides the
    // oracle by e^{−|Im λ|x}, so its rounding noise grows like e^{2|Im λ|π}
    // and larger τ would sink the comparison, not the solver
    let lambdas = [
        (2.0, 1.0),
        (-2.0, 1.0),
        (5.0, -1.0),
        (-5.0, -1.0),
        (8.0, 2.0),
        (-8.0, -2.0),
        (12.0, 0.5),
        (3.0, -2.0),
        (20.0, 1.5),
        (-20.0, -1.5),
    ];
    assert_eq!(lambdas.len(), 10);
    for (re, im) in lambdas {
        let lambda = c(re, im);
        let param = SpectralParameter::auto(lambda);
        let fm = solve(&v, lambda);
        let grid = fm.grid().clone();
        let col1 = fm.dephased_column(1);
        let col2 = fm.dephased_column(2);
        let mut worst = 0.0f64;
        for (i, &x) in grid.nodes().iter().enumerate() {
            let w = oracle_constant_rebased(p, q, &param, x);
            let ph1 = (c(0.0, 1.0) * lambda * x).exp();
            let ph2 = (-c(0.0, 1.0) * lambda * x).exp();
            let (e11, e21) = col1.at(i);
            let (e12, e22) = col2.at(i);
            worst = worst
                .max((e11 - w[0][0] / ph1).norm())
                .max((e21 - w[1][0] / ph1).norm())
                .max((e12 - w[0][1] / ph2).norm())
                .max((e22 - w[1][1] / ph2).norm());
        }
        assert!(worst < 1e-8, "de-phased mismatch {worst:.3e} at λ = {lambda}");
    }
    assert!(start.elapsed().as_secs_f64() < 10.0, "budget exceeded");
}

#[test]
fn criterion_03_triangular_closed_form() {
    // P = e^{2ix}, Q = 0: b₁₂(x) = −(e^{2ix} − e^{2iλx})/(2(1−λ)), all else 0
    let v = Potential::TrigPoly {
        p_coeffs: vec![(2, c(1.0, 0.0))],
        q_coeffs: vec![],
    };
    let lambda = c(3.0, 1.0);
    let fm = solve(&v, lambda);
    let grid = fm.grid().clone();
    let b12 = fm.dephased_column(2);
    let mut worst = 0.0f64;
    for (i, &x) in grid.nodes().iter().enumerate() {
        let expect =
            -((c(0.0, 2.0) * x).exp() - (c(0.0, 2.0) * lambda * x).exp()) / (2.0 * (c(1.0, 0.0) - lambda));
        worst = worst.max((b12.at(i).0 - expect).norm());
    }
    assert!(worst < 1e-9, "b₁₂ closed-form mismatch {worst:.3e}");
}

#[test]
fn criterion_04_liouville_invariant() {
    // `solve` asserts the spread on every solve in this suite; this sweep
    // pins the invariant across potential kinds and both half-planes
    let potentials = [
        Potential::Zero,
        Potential::constant(c(1.0, 0.0), c(1.0, 0.0)),
        Potential::constant(c(0.3, 1.2), c(-0.8, 0.4)),
        trig_preset(),
    ];
    for v in &potentials {
        for (re, im) in [(5.0, 1.0), (-5.0, 1.0), (12.0, -3.0), (20.0, 8.0)] {
            let fm = solve(v, c(re, im));
            assert!(fm.dephased_det_spread() < 1e-8);
        }
    }
}

#[test]
fn criterion_05_exponential_norm_sandwich() {
    let taus: Vec<f64> = (0..=50).map(f64::from).collect();
    let (plus, minus) = exp_norm_sandwich(&taus);
    for report in [&plus, &minus] {
        assert_eq!(report.count, 51);
        let ratio = report.upper / report.lower;
        assert!(
            ratio <= 4.6,
            "{}: band ratio {ratio} exceeds 4.6",
            report.quantity
        );
    }
    // frozen scan endpoints of sqrt((1−e^{−2πτ})/(2τ))·(√τ+1)
    assert!((plus.lower - 0.80710678118654752).abs() < 1e-12);
    assert!((plus.upper - 1.772453850905516).abs() < 1e-12);
    assert!((minus.lower - plus.lower).abs() < 1e-12);
    assert!((minus.upper - plus.upper).abs() < 1e-12);
}

#[test]
fn criterion_06_asymptotic_ladder_diagnostics() {
    let start = Instant::now();
    let taus = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    for v in [Potential::constant(c(1.0, 0.0), c(1.0, 0.0)), trig_preset()] {
        let rows = asymptotics_ladder(&v, 20.0, &taus, 1e-12).unwrap();
        let verdict = check_ladder(&rows);
        assert!(verdict.ok(), "violations: {:?}", verdict.violations);
    }
    assert!(start.elapsed().as_secs_f64() < 60.0, "budget exceeded");
}

#[test]
fn criterion_07_pairing_ratio_sweep() {
    let coeffs = CombinationCoefficients::default();

    // closed form on the zero potential: r(τ) = 2πτ/sinh(2πτ)
    let outcome = lemma1_sweep(
        &Potential::Zero,
        10.0,
        &[1.0, 2.0, 4.0],
        &coeffs,
        false,
        1e-12,
    )
    .unwrap();
    assert!(outcome.skipped.is_empty());
    let expected = [
        0.023467059305403782992,
        8.7646473015615518e-5,
        6.1130651543193509e-10,
    ];
    for (row, want) in outcome.rows.iter().zip(expected) {
        let rel = (row.ratio - want).abs() / want;
        assert!(rel < 1e-9, "τ = {}: ratio off by {rel:.3e}", row.tau);
    }

    // non-zero presets: strict decrease for τ ≥ 2 and r(32) < 1e-3.
    // single-column combinations pair a decaying y with a growing z, so the
    // inner product stays O(1) while the norms blow up; mixing both columns
    // instead lets a cross term grow with the norms and the ratio only decays
    // algebraically, never reaching 1e-3 over this range
    let single = CombinationCoefficients {
        c1: c(1.0, 0.0),
        c2: c(0.0, 0.0),
        c1_adj: c(1.0, 0.0),
        c2_adj: c(0.0, 0.0),
    };
    let taus = [2.0, 4.0, 8.0, 16.0, 32.0];
    for v in [Potential::constant(c(1.0, 0.0), c(1.0, 0.0)), trig_preset()] {
        let outcome = lemma1_sweep(&v, 20.0, &taus, &single, false, 1e-12).unwrap();
        assert!(outcome.skipped.is_empty());
        assert_eq!(outcome.rows.len(), taus.len());
        for pair in outcome.rows.windows(2) {
            assert!(
                pair[1].ratio < pair[0].ratio,
                "ratio not decreasing: {} → {}",
                pair[0].ratio,
                pair[1].ratio
            );
        }
        assert!(outcome.rows.last().unwrap().ratio < 1e-3);

        // normalized form: log(‖y‖‖z‖) grows across the sweep
        let outcome = lemma1_sweep(&v, 20.0, &taus, &single, true, 1e-12).unwrap();
        let products: Vec<f64> = outcome
            .rows
            .iter()
            .map(|r| r.log_norm_product.unwrap())
            .collect();
        for pair in products.windows(2) {
            assert!(
                pair[1] > pair[0],
                "normalized product not growing: {} → {}",
                pair[0],
                pair[1]
            );
        }
    }
}

#[test]
fn criterion_08_eigenvalue_search() {
    // separated conditions y₁(0) = 0, y₂(0) = 2y₂(π): λ_n = 2n − i·ln2/π
    let region = Rectangle::new((-5.0, 5.0), (-2.0, 2.0)).unwrap();
    let report = find_eigenvalues(&Potential::Zero, &demo_bc(), region, 1e-10).unwrap();
    assert_eq!(report.eigenvalues.len(), 5);
    assert_eq!(report.winding_total, 5);
    for (n, pt) in (-2..=2).zip(&report.eigenvalues) {
        let want = c(2.0 * f64::from(n), demo_im());
        assert!(
            (pt.lambda - want).norm() < 1e-8,
            "λ = {} vs expected {want}",
            pt.lambda
        );
        assert_eq!(pt.multiplicity, 1);
    }

    // periodic conditions: double eigenvalues at λ = 2n
    let row = |v: [f64; 4]| v.map(|x| c(x, 0.0));
    let periodic =
        BoundaryConditions::new([row([1.0, 0.0, -1.0, 0.0]), row([0.0, 1.0, 0.0, -1.0])]).unwrap();
    let region = Rectangle::new((-3.0, 3.0), (-1.0, 1.0)).unwrap();
    let report = find_eigenvalues(&Potential::Zero, &periodic, region, 1e-10).unwrap();
    assert_eq!(report.winding_total, 6);
    assert_eq!(report.eigenvalues.len(), 3);
    for (want, pt) in [-2.0, 0.0, 2.0].iter().zip(&report.eigenvalues) {
        assert!((pt.lambda - c(*want, 0.0)).norm() < 1e-8);
        assert_eq!(pt.multiplicity, 2);
    }

    // winding totals count records with multiplicity on every region
    let sum: usize = report.eigenvalues.iter().map(|p| p.multiplicity).sum();
    assert_eq!(report.winding_total, sum);
}

#[test]
fn criterion_09_biorthogonality_and_boundary_identity() {
    // ⟨y_n, z_k⟩ = δ_{nk} across the demo spectrum
    let pairs = demo_pairs();
    for (i, a) in pairs.iter().enumerate() {
        for (j, b) in pairs.iter().enumerate() {
            let g = a.y.inner_product(&b.z).unwrap();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!(
                (g - c(want, 0.0)).norm() < 1e-7,
                "⟨y_{i}, z_{j}⟩ = {g}"
            );
        }
    }

    // Lagrange identity: the boundary bilinear form vanishes for any y
    // satisfying the conditions paired with any z satisfying the adjoint
    // conditions, found here as eigenfunctions at 50 seeded index draws
    let bc = demo_bc();
    let adj = adjoint_conditions(&bc).unwrap();
    let grid = Arc::new(Grid::for_parameter(c(25.0, 1.0)));
    let ys: Vec<GridFunction2> = (-12..=12)
        .map(|n| {
            let lambda = c(2.0 * f64::from(n), demo_im());
            eigenfunction_on(&Potential::Zero, &bc, lambda, &grid, 1e-12).unwrap()
        })
        .collect();
    let zs: Vec<GridFunction2> = (-12..=12)
        .map(|n| {
            let lambda = c(2.0 * f64::from(n), -demo_im());
            eigenfunction_on(&Potential::Zero, &adj, lambda, &grid, 1e-12).unwrap()
        })
        .collect();
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut draw = |m: usize| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as usize % m
    };
    for _ in 0..50 {
        let (i, j) = (draw(ys.len()), draw(zs.len()));
        let b = boundary_bilinear(&ys[i], &zs[j]);
        assert!(b.norm() < 1e-8, "bilinear form {b} for pair ({i}, {j})");
    }
}

#[test]
fn criterion_10_projector_norms_and_divergence() {
    let expected = 3.0 / (4.0 * 2.0f64.ln());
    let pairs = demo_pairs();
    for pair in &pairs {
        let pn = projector_norm(pair).unwrap();

        // exact norm: attained by the analytic maximizer f = z/‖z‖
        let z_norm = pair.z.h_norm();
        let f_star = pair.z.scale(c((-z_norm.log_value).exp(), 0.0));
        let attained = apply_projector(pair, &f_star).unwrap().h_norm();
        let rel = (attained.log_value - pn.exact.log_value).abs();
        assert!(rel < 1e-10, "maximizer misses the norm by e^{rel:.3e}");

        // component lower bound holds on every pair
        assert!(pn.exact.log_value >= pn.component_bound.log_value - 1e-12);

        // demo system: ‖𝔓_n‖ = 3/(4·ln2) for every n
        let got = pn.exact.to_linear();
        assert!(
            (got - expected).abs() < 1e-7,
            "‖𝔓‖ = {got} vs {expected}"
        );
    }

    // flat norms across the demo system: bounded
    let probe = {
        let grid = pairs[0].y.grid().clone();
        GridFunction2::from_fn(grid, |_| (c(1.0, 0.0), c(1.0, 0.0)))
    };
    let report = divergence_witness(&pairs, &probe).unwrap();
    assert_eq!(report.verdict, DivergenceVerdict::Bounded);

    // synthetic system with τ_n = log(n+1), n ≤ 30: norms follow
    // sinh(πτ)/(πτ), and the trend verdict flags the growth
    let grid = Arc::new(Grid::new(64, 10).unwrap());
    let synthetic: Vec<BiorthogonalPair> = (1..=30)
        .map(|n| {
            let tau = f64::from(n + 1).ln();
            let norm_y = ((1.0 - (-2.0 * PI * tau).exp()) / (2.0 * tau)).sqrt();
            let y = GridFunction2::from_fn(grid.clone(), |x| {
                (c((-tau * x).exp() / norm_y, 0.0), c(0.0, 0.0))
            });
            let w = norm_y / PI;
            let z = GridFunction2::from_fn(grid.clone(), |x| {
                (c(w * (tau * x).exp(), 0.0), c(0.0, 0.0))
            });
            let raw = y.inner_product(&z).unwrap() / z.h_norm().to_linear();
            BiorthogonalPair {
                lambda: c(0.0, tau),
                y,
                z,
                raw_pairing: raw,
            }
        })
        .collect();
    let probe = GridFunction2::from_fn(grid, |_| (c(1.0, 0.0), c(1.0, 0.0)));
    let report = divergence_witness(&synthetic, &probe).unwrap();
    for row in &report.rows {
        let tau = row.im_lambda;
        let want = (PI * tau).sinh().ln() - (PI * tau).ln();
        let rel = (row.log_projector_norm - want).abs() / want.abs();
        assert!(rel < 1e-9, "norm at τ = {tau} off by {rel:.3e}");
    }
    assert_eq!(report.verdict, DivergenceVerdict::UnboundedTrend);
    // growth linkage: the climb is at least π·(τ_max − τ_min)/2
    let tau_min = 2.0f64.ln();
    let tau_max = 31.0f64.ln();
    let climb = report.max_log_full - report.rows[0].log_projector_norm;
    assert!(climb >= PI * (tau_max - tau_min) / 2.0);
}

#[test]
fn criterion_11_cli_golden_reproduction() {
    let demo = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo");
    for name in ["fundamental", "asymptotics", "lemma1", "eigs", "expansion"] {
        let golden = demo.join("golden").join(name);
        let tmp = tempfile::tempdir().unwrap();
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_dirac-spectral"))
            .arg("--config")
            .arg(demo.join(format!("{name}.toml")))
            .arg("--out")
            .arg(tmp.path())
            .arg("--threads")
            .arg("2")
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let mut compared = 0;
        for entry in std::fs::read_dir(&golden).unwrap() {
            let entry = entry.unwrap();
            let want = std::fs::read(entry.path()).unwrap();
            let got = std::fs::read(tmp.path().join(entry.file_name()))
                .unwrap_or_else(|_| panic!("{name}: missing {:?}", entry.file_name()));
            assert_eq!(
                want,
                got,
                "{name}: {:?} differs from the golden copy",
                entry.file_name()
            );
            compared += 1;
        }
        assert!(compared >= 2, "{name}: golden directory is empty");
    }
}
