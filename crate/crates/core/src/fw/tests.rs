use super::*;
use crate::instances::quadratic_instance;

fn exact_cfg(iters: usize) -> FwConfig {
    FwConfig {
        max_iters: Some(iters),
        ..FwConfig::default()
    }
}

#[test]
fn step_size_values() {
    assert_eq!(step_size(1.0, 0).unwrap(), 1.0);
    assert_eq!(step_size(1.0, 2).unwrap(), 0.5);
    assert_eq!(step_size(0.5, 0).unwrap(), 2.0);
    assert!(step_size(0.0, 1).is_err());
    assert!(step_size(1.5, 1).is_err());
}

#[test]
fn clamped_step_keeps_iterate_in_hull() {
    let inst = quadratic_instance(10, 3, 2);
    let mut p = HullPoint::centroid(&inst.points);
    let eta = step_size(0.5, 0).unwrap().min(1.0);
    p.step_toward(&inst.points, 4, eta);
    p.verify(&inst.points).unwrap();
    assert_eq!(p, HullPoint::vertex(&inst.points, 4));
}

#[test]
fn duality_gap_basics() {
    assert_eq!(duality_gap(&[1.0, 2.0], &[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
    assert!(duality_gap(&[1.0], &[1.0, 2.0], &[0.0, 0.0]).is_err());
}

#[test]
fn budget_formula() {
    let cfg = FwConfig {
        epsilon: 0.01,
        c: 0.5,
        beta: 2.0,
        ..FwConfig::default()
    };
    assert_eq!(
        cfg.iteration_budget(3.0),
        (2.0 * 2.0 * 9.0 / (0.25 * 0.01_f64)).ceil() as usize
    );
    let capped = FwConfig {
        max_iters: Some(5),
        ..cfg
    };
    assert_eq!(capped.iteration_budget(3.0), 5);
}

#[test]
fn exact_converges_to_vertex_target() {
    let inst = quadratic_instance(30, 6, 3);
    let obj = Quadratic::new(inst.points.point(7).to_vec());
    let out = fw_exact(&obj, &inst.points, &exact_cfg(5000)).unwrap();
    assert!(out.trace.final_objective < 1e-6);
    out.point.verify(&inst.points).unwrap();
}

#[test]
fn exact_rate_and_certificates() {
    let inst = quadratic_instance(60, 10, 4);
    let obj = Quadratic::new(inst.mu.clone());
    let d = inst.points.diameter_bound();
    let out = fw_exact(&obj, &inst.points, &exact_cfg(400)).unwrap();
    for rec in &out.trace.records {
        assert!(rec.gap_surrogate >= rec.objective - 1e-12);
        assert!(rec.gap_surrogate >= -1e-12);
        if rec.t >= 1 {
            assert!(rec.objective <= 2.0 * d * d / (rec.t as f64 + 1.0) + 1e-9);
        }
    }
    let ts: Vec<usize> = out.trace.records.iter().map(|r| r.t).collect();
    assert!(ts.windows(2).all(|w| w[1] == w[0] + 1));
}

#[test]
fn single_point_is_already_optimal() {
    let pts = PointSet::from_rows(&[vec![1.0, 2.0]]).unwrap();
    let obj = Quadratic::new(vec![0.0, 0.0]);
    let out = fw_exact(&obj, &pts, &exact_cfg(10)).unwrap();
    assert_eq!(out.point.value, vec![1.0, 2.0]);
    assert!(out.trace.records.iter().all(|r| r.gap_surrogate == 0.0));
}

#[test]
fn zero_gradient_stops_immediately() {
    let inst = quadratic_instance(10, 3, 5);
    let obj = Quadratic::new(inst.points.centroid());
    let out = fw_accelerated(&obj, &inst.points, &exact_cfg(10)).unwrap();
    assert_eq!(out.trace.reason, Convergence::ZeroGradient);
    assert!(out.trace.records.is_empty());
}

#[test]
fn exact_oracle_in_threshold_loop_converges() {
    let inst = quadratic_instance(40, 8, 6);
    let obj = Quadratic::new(inst.mu.clone());
    let cfg = FwConfig {
        epsilon: 1e-3,
        c: 0.9,
        ..FwConfig::default()
    };
    let out = fw_accelerated(&obj, &inst.points, &cfg).unwrap();
    assert!(out.trace.final_objective <= 1e-3, "{}", out.trace.final_objective);
    out.point.verify(&inst.points).unwrap();
    for w in out.trace.fail_events.windows(2) {
        assert!(w[1].r < w[0].r);
    }
}

#[test]
fn always_failing_oracle_both_ways() {
    let inst = quadratic_instance(30, 5, 7);
    let never = OracleKind::LshJl(crate::lsh_jl::RobustMaxipParams {
        probe_budget: Some(0),
        k_jl: Some(2),
        kappa: Some(1),
        ..Default::default()
    });
    // Starting next to the optimum: the threshold is reached and the true gap is tiny.
    let mut mu = inst.points.point(0).to_vec();
    mu[0] += 1e-5;
    let obj = Quadratic::new(mu);
    let cfg = FwConfig {
        init: Init::Vertex(0),
        oracle: never.clone(),
        ..FwConfig::default()
    };
    let out = fw_accelerated(&obj, &inst.points, &cfg).unwrap();
    assert_eq!(out.trace.reason, Convergence::Threshold);
    assert!(out.trace.final_objective <= cfg.epsilon);

    // A target far below the reach of 64 halvings stalls instead.
    let obj = Quadratic::new(inst.mu.clone());
    let cfg = FwConfig {
        epsilon: 1e-40,
        oracle: never,
        ..FwConfig::default()
    };
    assert!(matches!(
        fw_accelerated(&obj, &inst.points, &cfg),
        Err(Error::Stall { .. })
    ));
}

#[test]
fn fallback_exact_takes_over_on_misses() {
    let inst = quadratic_instance(30, 5, 8);
    let never = OracleKind::LshJl(crate::lsh_jl::RobustMaxipParams {
        probe_budget: Some(0),
        k_jl: Some(2),
        kappa: Some(1),
        ..Default::default()
    });
    let obj = Quadratic::new(inst.mu.clone());
    let cfg = FwConfig {
        oracle: never,
        fallback_exact: true,
        max_iters: Some(200),
        ..FwConfig::default()
    };
    let out = fw_accelerated(&obj, &inst.points, &cfg).unwrap();
    assert!(out.trace.records.iter().all(|r| r.outcome == Outcome::Exact));
}

#[test]
fn csv_has_header_and_rows() {
    let inst = quadratic_instance(10, 3, 9);
    let obj = Quadratic::new(inst.mu.clone());
    let out = fw_exact(&obj, &inst.points, &exact_cfg(5)).unwrap();
    let csv = out.trace.to_csv();
    assert!(csv.starts_with("t,eta,r,outcome,gap_surrogate,objective\n"));
    assert_eq!(csv.lines().count(), 6);
}
