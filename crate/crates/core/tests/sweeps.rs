use ptspec::oracle::{scarf_crossing_v2, square_well_levels};
use ptspec::spectrum::real_roots_in;
use ptspec::{detect_crossings, locate_eps, mirror_defect, real_spectrum, sweep, Method, Model, PotentialSpec, SweepConfig};

fn count_real(spec: &PotentialSpec, cfg: &SweepConfig, v2: f64) -> usize {
    real_spectrum(&spec.with_v2(v2), cfg.method, &cfg.solver).unwrap().len()
}

#[test]
fn zero_length_sweep_is_the_hermitian_spectrum() {
    let spec = PotentialSpec::rect(20.0, 0.0, 2.0);
    let cfg = SweepConfig::new(&spec, Method::AnalyticRect, 0.0, 0.0);
    let curves = sweep(&spec, &cfg).unwrap();
    assert_eq!(curves.v2_grid, vec![0.0]);
    let levels = curves.spectrum_at(0.0);
    let exact = square_well_levels(20.0, 2.0);
    assert_eq!(levels.len(), exact.len());
    for (a, b) in levels.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-8);
    }
    assert!(locate_eps(&spec, &curves, &cfg).unwrap().is_empty());
}

#[test]
fn rect_eps_bracket_a_loss_of_two_levels() {
    let spec = PotentialSpec::rect(40.0, 0.0, 2.0);
    let cfg = SweepConfig::new(&spec, Method::AnalyticRect, 0.0, 8.0).with_steps(160);
    let curves = sweep(&spec, &cfg).unwrap();
    let eps = locate_eps(&spec, &curves, &cfg).unwrap();
    assert_eq!(eps.len(), 4);
    for ep in &eps {
        assert!(!ep.ambiguous);
        assert!(ep.bracket.1 - ep.bracket.0 <= cfg.ep_tol_v2 * 1.000001);
        let before = count_real(&spec, &cfg, ep.v2c - cfg.ep_tol_v2);
        let after = count_real(&spec, &cfg, ep.v2c + cfg.ep_tol_v2);
        assert_eq!(before, after + 2, "EP at {}", ep.v2c);
        assert!(ep.e_c < 0.0 && ep.e_c > -40.0);
    }
    // one level leaves through the threshold instead of pairing
    assert_eq!(curves.exits.len(), 1);
    assert!(detect_crossings(&curves).is_empty());
}

#[test]
fn rect_methods_agree_on_eps() {
    let spec = PotentialSpec::rect(20.0, 0.0, 2.0);
    let run = |m| {
        let cfg = SweepConfig::new(&spec, m, 0.0, 5.0).with_steps(100);
        let c = sweep(&spec, &cfg).unwrap();
        locate_eps(&spec, &c, &cfg).unwrap()
    };
    let a = run(Method::AnalyticRect);
    let s = run(Method::Shooting);
    assert_eq!(a.len(), s.len());
    for (x, y) in a.iter().zip(&s) {
        assert!((x.v2c - y.v2c).abs() <= 2e-3);
        assert_eq!(x.branch_pair, y.branch_pair);
    }
}

#[test]
fn mirrored_sweep_matches() {
    let spec = PotentialSpec::rect(20.0, 0.0, 2.0);
    let fwd = sweep(&spec, &SweepConfig::new(&spec, Method::AnalyticRect, 0.0, 4.0).with_steps(40)).unwrap();
    let back = sweep(&spec, &SweepConfig::new(&spec, Method::AnalyticRect, -4.0, 0.0).with_steps(40)).unwrap();
    let d = mirror_defect(&fwd, &back).unwrap();
    assert!(d <= 1e-6, "{d:e}");
    // most of the grid pairs up
    let paired = fwd.v2_grid.iter().filter(|&&v| back.v2_grid.iter().any(|&w| (w + v).abs() < 1e-9)).count();
    assert!(paired >= 41, "{paired}");
}

#[test]
fn branches_are_labelled_by_initial_energy() {
    let spec = PotentialSpec::rect(20.0, 0.0, 2.0);
    let curves = sweep(&spec, &SweepConfig::new(&spec, Method::AnalyticRect, 0.0, 2.0).with_steps(20)).unwrap();
    let starts: Vec<f64> = curves.branches.iter().map(|b| b.first().1).collect();
    assert!(starts.windows(2).all(|w| w[0] < w[1]));
    for (i, b) in curves.branches.iter().enumerate() {
        assert_eq!(b.label, i);
    }
}

#[test]
fn scarf_levels_cross_at_closed_form_points() {
    let v1 = 10.0;
    let spec = PotentialSpec::new(Model::ScarfII, v1, 0.0);
    let cfg = SweepConfig::new(&spec, Method::Shooting, 0.0, 11.0).with_steps(88);
    let curves = sweep(&spec, &cfg).unwrap();
    let crossings = detect_crossings(&curves);
    assert!(!crossings.is_empty());
    let expected = [scarf_crossing_v2(v1, 1), scarf_crossing_v2(v1, 2)];
    for c in &crossings {
        let near = expected.iter().any(|v| (c.v2_star - v).abs() < 0.05);
        assert!(near, "unexpected crossing {c:?}");
    }
    let eps = locate_eps(&spec, &curves, &cfg).unwrap();
    let first = eps.iter().map(|e| e.v2c).fold(f64::INFINITY, f64::min);
    assert!((first - (v1 + 0.25)).abs() / (v1 + 0.25) < 0.01, "{first}");
}

#[test]
fn local_roots_resolve_a_close_pair() {
    // just below the first rect EP the coalescing pair is 0.1 apart
    let spec = PotentialSpec::rect(40.0, 0.955, 2.0);
    let s = ptspec::SolverSettings::for_spec(&spec);
    let all = real_spectrum(&spec, Method::AnalyticRect, &s).unwrap().eigenvalues;
    let gaps: Vec<f64> = all.windows(2).map(|w| w[1] - w[0]).collect();
    let k = gaps.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let local = real_roots_in(&spec, Method::Shooting, &s, all[k] - 0.5, all[k + 1] + 0.5, 50).unwrap();
    assert_eq!(local.len(), 2, "{local:?}");
    assert!((local[0] - all[k]).abs() < 1e-6 && (local[1] - all[k + 1]).abs() < 1e-6);
}

#[test]
fn method_model_mismatch_is_rejected() {
    let spec = PotentialSpec::rect(20.0, 0.0, 2.0);
    let cfg = SweepConfig::new(&spec, Method::WcPencil, 0.0, 1.0);
    assert!(sweep(&spec, &cfg).is_err());
    let g = PotentialSpec::new(Model::Gaussian, 50.0, 0.0);
    let cfg = SweepConfig::new(&g, Method::AnalyticRect, 0.0, 1.0);
    assert!(sweep(&g, &cfg).is_err());
}
