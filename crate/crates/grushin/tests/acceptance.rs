//! Acceptance suite: eight end-to-end checks, each with pinned tolerances
//! and a wall-clock budget. Every test prints a single `[k/8] ... PASS`
//! line on success; a failing assert names the offending instance so the
//! report stays actionable.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use grushin::curvature::{ricci_closed, ricci_fd, ricci_lemma, EffectiveDim};
use grushin::geodesics::{
    convexity_probe, dimension_exponent, distance_bvp, distance_graph_oracle, flow, hamiltonian,
    GeodesicState,
};
use grushin::model::{Family, SpaceModel};
use grushin::regions::{
    default_scan_grid, feasible_beta, feasible_beta_gamma, kmax_closed, kmax_numeric,
};
use grushin::transport::{
    cd_slice_check, find_cd_violation, tau, tau_tilde, DistortionInput, SliceMeasure,
    CD_MARGIN_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(slot: usize, label: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "{label}: exceeded the {budget:?} budget (took {elapsed:?})"
    );
    println!("[{slot}/8] {label}: PASS ({:.2}s)", elapsed.as_secs_f64());
}

/// Round-sphere and hyperbolic-plane reductions: with trivial warp power
/// and matching measure exponent the potential vanishes and the N = 2
/// tensor must equal the constant sectional curvature in both slots.
#[test]
fn constant_curvature_reductions_are_exact() {
    let start = Instant::now();
    let sphere = SpaceModel::sphere(0.0, 0.0).unwrap();
    let hyperbolic = SpaceModel::hyperbolic(0.0, 0.0).unwrap();
    let n = EffectiveDim::Finite(2.0);
    for i in 0..20 {
        let frac = i as f64 / 19.0;
        let xs = 0.05 + (FRAC_PI_2 - 0.1) * frac;
        let r = ricci_lemma(&sphere, xs, n).unwrap();
        assert!((r.rxx - 1.0).abs() <= 1e-10, "sphere rxx at x = {xs}: {}", r.rxx);
        assert!(
            (r.ryy_over_gyy - 1.0).abs() <= 1e-10,
            "sphere ryy at x = {xs}: {}",
            r.ryy_over_gyy
        );
        let xh = 0.05 + 2.95 * frac;
        let r = ricci_lemma(&hyperbolic, xh, n).unwrap();
        assert!((r.rxx + 1.0).abs() <= 1e-10, "hyperbolic rxx at x = {xh}: {}", r.rxx);
        assert!(
            (r.ryy_over_gyy + 1.0).abs() <= 1e-10,
            "hyperbolic ryy at x = {xh}: {}",
            r.ryy_over_gyy
        );
    }
    report(1, "constant-curvature reductions", start, Duration::from_secs(1));
}

/// The structural formula, the per-family closed forms, and a finite
/// difference of the raw definition must agree on random admissible
/// inputs across every family and dimension band.
#[test]
fn curvature_routes_agree_on_random_spaces() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0052_1CC1);
    let mut checked = 0usize;
    while checked < 10_000 {
        let family = match rng.gen_range(0u8..4) {
            0 => Family::Plane,
            1 => Family::Sphere,
            2 => Family::Hyperbolic,
            _ => Family::Infinity,
        };
        let (space, x) = match family {
            Family::Infinity => {
                let beta = rng.gen_range(0.5..3.5);
                let gamma = rng.gen_range(0.3..2.0);
                (SpaceModel::infinity(beta, gamma).unwrap(), rng.gen_range(0.55..2.2))
            }
            _ => {
                let alpha = rng.gen_range(0.0..2.0);
                let beta = alpha + rng.gen_range(0.0..3.0);
                let space = SpaceModel::from_parts(family, alpha, beta, None).unwrap();
                let x = if family == Family::Sphere {
                    rng.gen_range(0.3..1.25)
                } else {
                    rng.gen_range(0.35..2.2)
                };
                (space, x)
            }
        };
        let n = match rng.gen_range(0u8..4) {
            0 => EffectiveDim::Infinite,
            1 => EffectiveDim::Finite(rng.gen_range(-40.0..-3.0)),
            _ => EffectiveDim::Finite(rng.gen_range(2.6..40.0)),
        };
        let lemma = ricci_lemma(&space, x, n).unwrap();
        let closed = ricci_closed(&space, x, n).unwrap();
        let fd = ricci_fd(&space, x, n, 1e-5).unwrap();
        for (l, c, f, tag) in [
            (lemma.rxx, closed.rxx, fd.rxx, "rxx"),
            (lemma.ryy_over_gyy, closed.ryy_over_gyy, fd.ryy_over_gyy, "ryy"),
        ] {
            assert!(
                (l - c).abs() <= 1e-9 * (1.0 + c.abs()),
                "{space} {tag} at x = {x}, N = {n:?}: lemma {l} vs closed {c}"
            );
            assert!(
                (f - l).abs() <= 1e-4,
                "{space} {tag} at x = {x}, N = {n:?}: fd {f} vs lemma {l}"
            );
        }
        checked += 1;
    }
    report(2, "curvature route agreement (10000 draws)", start, Duration::from_secs(30));
}

/// Reference feasibility statements: the flat hyperbolic boundary case,
/// the width-zero spherical window, the power-law half-line, the fast
/// decay margins, and the negative-dimension witness.
#[test]
fn reference_region_statements_hold() {
    let start = Instant::now();

    let flat = kmax_closed(&SpaceModel::hyperbolic(1.0, 2.0).unwrap(), EffectiveDim::Infinite).unwrap();
    assert!(flat.feasible, "hyperbolic boundary case must be feasible");
    assert_eq!(flat.kmax, Some(0.0), "hyperbolic boundary kmax must be exactly zero");

    let hline = feasible_beta(Family::Hyperbolic, 1.0, EffectiveDim::Infinite, 0.0)
        .unwrap()
        .expect("hyperbolic beta window at K = 0 must be nonempty");
    assert_eq!(hline.lo, 2.0, "hyperbolic beta window must start at 2");
    assert!(hline.hi.is_infinite(), "hyperbolic beta window must be a half-line");

    let point = feasible_beta(Family::Sphere, 1.0, EffectiveDim::Finite(10.0), 0.0)
        .unwrap()
        .expect("spherical beta window at N = 10 must be nonempty");
    assert!(
        (point.lo - 4.0).abs() <= 1e-12 && (point.hi - 4.0).abs() <= 1e-12,
        "spherical beta window must pin beta = 4, got [{}, {}]",
        point.lo,
        point.hi
    );
    assert!(point.width() <= 1e-12, "spherical beta window must have zero width");

    let pline = feasible_beta(Family::Plane, 1.0, EffectiveDim::Infinite, 0.0)
        .unwrap()
        .expect("power-law beta window at K = 0 must be nonempty");
    assert_eq!(pline.lo, 2.0, "power-law beta window must start at 2");
    assert!(pline.hi.is_infinite(), "power-law beta window must be a half-line");

    let (ok, margin) = feasible_beta_gamma(3.0, 1.0).unwrap();
    assert!(ok, "fast-decay (3, 1) must be feasible at N = infinity");
    assert!((margin - 7.0).abs() <= 1e-12, "fast-decay margin must be 7, got {margin}");
    let fast = SpaceModel::infinity(3.0, 1.0).unwrap();
    for nf in [3.0, 10.0, 100.0] {
        let r = kmax_closed(&fast, EffectiveDim::Finite(nf)).unwrap();
        assert!(!r.feasible, "fast-decay geometry must be infeasible at N = {nf}");
    }

    let neg = kmax_closed(&SpaceModel::hyperbolic(2.0, 6.0).unwrap(), EffectiveDim::Finite(-34.0))
        .unwrap();
    assert!(neg.feasible, "hyperbolic (2, 6) must be feasible at N = -34");
    assert!(
        neg.kmax.unwrap() >= 0.0,
        "hyperbolic (2, 6) at N = -34 must admit K = 0, got kmax {:?}",
        neg.kmax
    );

    report(3, "reference region statements", start, Duration::from_secs(1));
}

fn draw_feasible_candidate(family: Family, rng: &mut ChaCha8Rng) -> (SpaceModel, EffectiveDim) {
    let space = match family {
        Family::Infinity => {
            SpaceModel::infinity(rng.gen_range(2.1..5.0), rng.gen_range(0.25..2.0)).unwrap()
        }
        _ => {
            let alpha = rng.gen_range(0.0..1.5);
            SpaceModel::from_parts(family, alpha, alpha + rng.gen_range(0.0..4.0), None).unwrap()
        }
    };
    let n = if family == Family::Infinity {
        if rng.gen::<f64>() < 0.5 {
            EffectiveDim::Infinite
        } else {
            EffectiveDim::Finite(rng.gen_range(-40.0..-3.0))
        }
    } else {
        let roll = rng.gen::<f64>();
        if roll < 0.5 {
            EffectiveDim::Infinite
        } else if roll < 0.8 {
            EffectiveDim::Finite(rng.gen_range(2.6..40.0))
        } else {
            EffectiveDim::Finite(rng.gen_range(-40.0..-3.0))
        }
    };
    (space, n)
}

/// Grid minimization of the pointwise tensor must reproduce the closed
/// feasibility thresholds on 500 random feasible cells per family.
#[test]
fn scanned_kmax_matches_closed_forms() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEA5_1B1E);
    for family in [Family::Plane, Family::Sphere, Family::Hyperbolic, Family::Infinity] {
        let mut accepted = 0usize;
        let mut attempts = 0usize;
        while accepted < 500 {
            attempts += 1;
            assert!(attempts < 500_000, "feasible-cell sampling starved for {family:?}");
            let (space, n) = draw_feasible_candidate(family, &mut rng);
            let Ok(closed) = kmax_closed(&space, n) else { continue };
            if !closed.feasible {
                continue;
            }
            let target = closed.kmax.unwrap();
            let grid = default_scan_grid(&space, 900);
            let numeric = kmax_numeric(&space, n, &grid).unwrap();
            assert!(
                (numeric - target).abs() <= 1e-5,
                "{space} at N = {n:?}: numeric kmax {numeric} vs closed {target}"
            );
            accepted += 1;
        }
    }
    report(4, "numeric kmax vs closed forms (500 per family)", start, Duration::from_secs(60));
}

/// Hamiltonian flow conserves energy to 1e-8 over T = 5; two-point
/// distances sit inside the grid-graph oracle window; the triangle
/// inequality and midpoint convexity hold to solver tolerance.
#[test]
fn geodesic_flow_and_distances_verify() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6E0_DE51C);

    let flow_spaces = [
        SpaceModel::plane(1.0, 2.0).unwrap(),
        SpaceModel::sphere(1.0, 4.0).unwrap(),
        SpaceModel::hyperbolic(1.0, 2.0).unwrap(),
        SpaceModel::infinity(3.0, 1.0).unwrap(),
    ];
    for space in &flow_spaces {
        let (_, hi) = space.domain();
        let hi_eff = hi.min(4.0) * 0.7;
        let mut done = 0usize;
        while done < 100 {
            let s0 = GeodesicState {
                x: rng.gen_range(0.2..hi_eff),
                y: rng.gen_range(-1.0..1.0),
                u: rng.gen_range(-1.0..1.0),
                v: rng.gen_range(-1.5..1.5),
            };
            let h0 = hamiltonian(space, &s0).unwrap();
            if h0 <= 1e-12 {
                continue;
            }
            let traj = flow(space, &s0, 5.0, 1e-10).unwrap();
            for (t, s) in &traj.samples {
                if let Ok(h) = hamiltonian(space, s) {
                    let drift = (h - h0).abs() / h0;
                    assert!(
                        drift <= 1e-8,
                        "{space}: relative energy drift {drift:.3e} at t = {t} from {s0:?}"
                    );
                }
            }
            done += 1;
        }
    }
    println!("    flow-energy leg: {:.1}s", start.elapsed().as_secs_f64());

    let oracle_cases = [
        (SpaceModel::plane(1.0, 1.0).unwrap(), 0.45, 1.6, 0.6),
        (SpaceModel::hyperbolic(1.0, 1.0).unwrap(), 0.45, 1.6, 0.6),
        (SpaceModel::sphere(1.0, 4.0).unwrap(), 0.3, 1.1, 0.5),
        (SpaceModel::infinity(3.0, 1.0).unwrap(), 0.5, 1.6, 0.4),
    ];
    for (space, lo, hi, ymax) in oracle_cases {
        for _ in 0..10 {
            let p = (rng.gen_range(lo..hi), rng.gen_range(-ymax..ymax));
            let q = (rng.gen_range(lo..hi), rng.gen_range(-ymax..ymax));
            let d = distance_bvp(&space, p, q, 16).unwrap();
            let oracle = distance_graph_oracle(&space, p, q, 400).unwrap();
            assert!(
                oracle >= d - 1e-3 && oracle - d <= 0.1 * oracle,
                "{space}: bvp distance {d} vs oracle {oracle} for {p:?} -> {q:?}"
            );
        }
    }

    println!("    oracle leg: {:.1}s", start.elapsed().as_secs_f64());

    let triangle_cases = [
        (SpaceModel::plane(1.0, 2.0).unwrap(), 0.5, 1.9, 0.8, 70usize),
        (SpaceModel::hyperbolic(1.0, 2.0).unwrap(), 0.5, 1.9, 0.8, 50),
        (SpaceModel::sphere(1.0, 4.0).unwrap(), 0.3, 1.2, 0.6, 40),
        (SpaceModel::infinity(3.0, 1.0).unwrap(), 0.5, 1.7, 0.5, 40),
    ];
    for (space, lo, hi, ymax, count) in triangle_cases {
        for _ in 0..count {
            let mut pt = || (rng.gen_range(lo..hi), rng.gen_range(-ymax..ymax));
            let (p, q, r) = (pt(), pt(), pt());
            let dpq = distance_bvp(&space, p, q, 8).unwrap();
            let dqr = distance_bvp(&space, q, r, 8).unwrap();
            let dpr = distance_bvp(&space, p, r, 8).unwrap();
            assert!(
                dpq + dqr - dpr >= -1e-6,
                "{space}: triangle slack {} for {p:?}, {q:?}, {r:?}",
                dpq + dqr - dpr
            );
        }
    }

    println!("    triangle leg: {:.1}s", start.elapsed().as_secs_f64());

    let convexity_cases = [
        (SpaceModel::plane(1.0, 1.0).unwrap(), 0.5, 1.6, 0.5, 50usize),
        (SpaceModel::sphere(1.0, 4.0).unwrap(), 0.35, 1.05, 0.4, 50),
    ];
    for (space, lo, hi, ymax, count) in convexity_cases {
        for _ in 0..count {
            let p = (rng.gen_range(lo..hi), rng.gen_range(-ymax..ymax));
            let q = (rng.gen_range(lo..hi), rng.gen_range(-ymax..ymax));
            let probe = convexity_probe(&space, p, q).unwrap();
            assert!(
                probe >= -1e-9,
                "{space}: convexity probe {probe:.3e} for {p:?} -> {q:?}"
            );
        }
    }

    report(5, "geodesic flow, distances, and convexity", start, Duration::from_secs(300));
}

/// Near-boundary metric balls scale with the anisotropic dimension:
/// exponent 2 for warp power 1, exponent 3 for warp power 2, and a
/// strictly increasing profile for the flat-to-infinite-order family.
#[test]
fn boundary_scaling_matches_effective_dimension() {
    let start = Instant::now();
    let e1 = dimension_exponent(&SpaceModel::plane(1.0, 1.0).unwrap(), 1e-3).unwrap();
    assert!((e1 - 2.0).abs() <= 0.1, "warp power 1 exponent {e1}");
    let e2 = dimension_exponent(&SpaceModel::plane(2.0, 2.0).unwrap(), 1e-3).unwrap();
    assert!((e2 - 3.0).abs() <= 0.15, "warp power 2 exponent {e2}");
    let fast = SpaceModel::infinity(3.0, 1.0).unwrap();
    let es: Vec<f64> = [1e-1, 1e-2, 1e-3]
        .iter()
        .map(|&d| dimension_exponent(&fast, d).unwrap())
        .collect();
    assert!(
        es[0] < es[1] && es[1] < es[2],
        "fast-decay exponents must increase strictly as delta shrinks: {es:?}"
    );
    report(6, "boundary scaling exponents", start, Duration::from_secs(120));
}

/// Displacement interpolation between random bump measures clears the
/// curvature-dimension inequality on four reference geometries, and the
/// search procedure exhibits a genuine violation on an infeasible one.
#[test]
fn slice_transport_certifies_reference_regions() {
    let start = Instant::now();
    let configs = [
        (SpaceModel::plane(1.0, 2.0).unwrap(), EffectiveDim::Infinite, 0.35, 3.5),
        (SpaceModel::hyperbolic(1.0, 2.0).unwrap(), EffectiveDim::Infinite, 0.35, 3.5),
        (SpaceModel::sphere(1.0, 4.0).unwrap(), EffectiveDim::Finite(10.0), 0.2, 1.45),
        (SpaceModel::infinity(3.0, 1.0).unwrap(), EffectiveDim::Infinite, 0.4, 3.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x00CD_5EED);
    let tgrid = [0.25, 0.5, 0.75];
    for (space, n, lo, hi) in configs {
        let span = hi - lo;
        for trial in 0..50 {
            let support = |rng: &mut ChaCha8Rng| {
                let w = span * rng.gen_range(0.06..0.22);
                let a = rng.gen_range(lo..hi - w);
                (a, a + w)
            };
            let (a0, b0) = support(&mut rng);
            let (a1, b1) = support(&mut rng);
            let mu0 = SliceMeasure::bump(&space, a0, b0).unwrap();
            let mu1 = SliceMeasure::bump(&space, a1, b1).unwrap();
            let cd = cd_slice_check(&space, 0.0, n, &mu0, &mu1, &tgrid).unwrap();
            assert!(
                cd.pass,
                "{space} at N = {n:?}, trial {trial}: min margin {} for [{a0:.4}, {b0:.4}] -> [{a1:.4}, {b1:.4}]",
                cd.min_margin
            );
        }
    }

    let witness = find_cd_violation(
        &SpaceModel::hyperbolic(2.0, 3.0).unwrap(),
        0.0,
        EffectiveDim::Finite(10.0),
        200,
        0x71A6_D00D,
    )
    .unwrap()
    .expect("no violation found for the infeasible reference geometry within 200 trials");
    assert!(
        witness.report.min_margin < -CD_MARGIN_TOL,
        "violation witness margin {} is not below threshold",
        witness.report.min_margin
    );

    report(7, "slice-transport CD certification", start, Duration::from_secs(300));
}

/// Randomized sweep over the distortion coefficients: the blow-up branch
/// triggers exactly per the defining inequalities, the zero-curvature
/// line reproduces t exactly, and both coefficients are continuous
/// across K = 0 at first order.
#[test]
fn distortion_branch_structure_is_exact() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD157_0AC3);
    for _ in 0..100_000 {
        let theta = rng.gen_range(0.0..3.0);
        let roll = rng.gen::<f64>();
        let t = if roll < 0.08 {
            0.0
        } else if roll < 0.16 {
            1.0
        } else {
            rng.gen::<f64>()
        };
        let n = if rng.gen::<f64>() < 0.06 { 1.0 } else { rng.gen_range(1.0..40.0) };
        let k = if rng.gen::<f64>() < 0.05 { 0.0 } else { rng.gen_range(-8.0..8.0) };
        let kt2 = k * theta * theta;

        let v = tau(&DistortionInput { k, n, t, theta });
        let infinite = kt2 > 0.0 && (n - 1.0) * PI * PI <= kt2;
        assert_eq!(
            v == f64::INFINITY,
            infinite,
            "forward branch mismatch at K = {k}, N = {n}, t = {t}, theta = {theta}: {v}"
        );
        if !infinite {
            assert!(
                v.is_finite() && v >= 0.0,
                "forward coefficient out of range at K = {k}, N = {n}, t = {t}, theta = {theta}: {v}"
            );
            if kt2 == 0.0 {
                assert_eq!(v, t, "forward coefficient must equal t on the flat line");
            }
        }
        assert_eq!(tau(&DistortionInput { k: 0.0, n, t, theta }), t);
        let theta_c = rng.gen_range(0.1..2.0);
        for ks in [1e-11, -1e-11] {
            if ks > 0.0 && (n - 1.0) * PI * PI <= ks * theta_c * theta_c {
                continue;
            }
            let vc = tau(&DistortionInput { k: ks, n, t, theta: theta_c });
            assert!(
                (vc - t).abs() <= 1e-10,
                "forward continuity at K = {ks}, N = {n}, t = {t}, theta = {theta_c}: {vc}"
            );
        }

        let nn = -rng.gen_range(0.5..40.0);
        let vt = tau_tilde(&DistortionInput { k, n: nn, t, theta });
        let blowup = (nn - 1.0) * PI * PI >= kt2;
        if blowup {
            assert_eq!(
                vt,
                f64::INFINITY,
                "reverse coefficient must blow up at K = {k}, N = {nn}, t = {t}, theta = {theta}"
            );
        } else if kt2 == 0.0 {
            assert_eq!(vt, t, "reverse coefficient must equal t on the flat line");
        } else if kt2 > 0.0 {
            assert!(
                vt.is_finite() && vt >= 0.0,
                "reverse coefficient out of range at K = {k}, N = {nn}, t = {t}, theta = {theta}: {vt}"
            );
        } else if !vt.is_finite() {
            let a = theta * (k / nn).sqrt();
            let q = (t * a).sin() / a.sin();
            assert!(
                !(q > 0.0),
                "reverse coefficient infinite with positive quotient {q} at K = {k}, N = {nn}, t = {t}, theta = {theta}"
            );
        } else {
            assert!(vt >= 0.0, "reverse coefficient negative: {vt}");
        }
        assert_eq!(tau_tilde(&DistortionInput { k: 0.0, n: nn, t, theta }), t);
        for ks in [1e-11, -1e-11] {
            let vc = tau_tilde(&DistortionInput { k: ks, n: nn, t, theta: theta_c });
            assert!(
                (vc - t).abs() <= 1e-10,
                "reverse continuity at K = {ks}, N = {nn}, t = {t}, theta = {theta_c}: {vc}"
            );
        }
    }
    report(8, "distortion coefficient branch sweep", start, Duration::from_secs(5));
}
