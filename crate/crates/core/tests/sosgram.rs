mod common;

use num_complex::Complex64;

use common::load;
use strongcert::hermite::hermite_of_system;
use strongcert::sdpsolve::{check_solution, solve, SolverConfig, SolverStatus};
use strongcert::sosgram::{
    build_relaxation, dump_json, lower_bound_hierarchy, read_sdpa, sos_lower_bound, write_sdpa,
    RelaxationMode, SosOutcome,
};
use strongcert::trigpoly::{MultiIndex, TrigPoly, TrigPolyMatrix};
use strongcert::Error;

fn cosine(shift: f64) -> TrigPolyMatrix {
    TrigPolyMatrix::from_scalar(
        TrigPoly::from_terms(
            1,
            [
                (MultiIndex::new(vec![0]), Complex64::new(shift, 0.0)),
                (MultiIndex::new(vec![1]), Complex64::new(1.0, 0.0)),
                (MultiIndex::new(vec![-1]), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap(),
    )
}

#[test]
fn n3m2_outcomes_around_gamma0() {
    let sys = load("n3m2.json");
    let run = |g: f64| {
        let h = hermite_of_system(&sys, g).unwrap();
        sos_lower_bound(&h.h, 3, &SolverConfig::default()).unwrap()
    };
    let one = run(1.0);
    assert!(one.is_certified());
    assert!((one.raw_bound.unwrap() - 0.30757).abs() < 1e-4);
    assert!(run(0.751).is_certified());
    let below = run(0.750);
    assert!(below.is_infeasible());
    assert!(below.raw_bound.unwrap() < 0.0);
}

#[test]
fn certificate_reconstructs_polynomial() {
    let h = cosine(3.0);
    let s = sos_lower_bound(&h, 1, &SolverConfig::default()).unwrap();
    let SosOutcome::Certified(c) = &s.outcome else {
        panic!("not certified: {:?}", s.outcome)
    };
    // exact minimum is 1
    assert!((s.raw_bound.unwrap() - 1.0).abs() < 1e-7);
    assert!(s.lower_bound.unwrap() <= 1.0 + 1e-12);
    for t in [0.0, 0.7, 2.0, 3.1] {
        let want = h.eval_angles(&[t])[(0, 0)].re;
        let got = c.reconstruct(&[t])[(0, 0)].re;
        assert!((want - got).abs() < 1e-6, "{want} vs {got}");
    }
}

#[test]
fn negative_polynomial_yields_farkas_ray() {
    let s = sos_lower_bound(&cosine(1.0), 1, &SolverConfig::default()).unwrap();
    assert!(s.is_infeasible());
    assert!((s.raw_bound.unwrap() + 1.0).abs() < 1e-6);
}

#[test]
fn hierarchy_best_is_running_maximum() {
    let h = hermite_of_system(&load("n3m2.json"), 1.0).unwrap();
    let rows = lower_bound_hierarchy(&h.h, 3, 4, &SolverConfig::default()).unwrap();
    assert_eq!(rows.len(), 2);
    let mut best = f64::NEG_INFINITY;
    for r in &rows {
        assert_eq!(r.status, SolverStatus::Optimal);
        best = best.max(r.bound.unwrap());
        assert_eq!(r.best, Some(best));
    }
    assert!(lower_bound_hierarchy(&h.h, 4, 3, &SolverConfig::default()).is_err());
}

#[test]
fn order_below_degree_is_rejected() {
    let h = hermite_of_system(&load("n3m2.json"), 1.0).unwrap();
    assert!(matches!(
        build_relaxation(&h.h, 1, RelaxationMode::Feasibility),
        Err(Error::BasisTooSmall { .. })
    ));
}

#[test]
fn sdpa_round_trip_is_exact() {
    let h = hermite_of_system(&load("n3m2.json"), 1.0).unwrap();
    let r = build_relaxation(&h.h, 3, RelaxationMode::Feasibility).unwrap();
    let text = write_sdpa(&r.problem);
    let back = read_sdpa(&text).unwrap();
    assert_eq!(back.b, r.problem.b);
    assert_eq!(back.c, r.problem.c);
    assert_eq!(back.a, r.problem.a);
    assert_eq!(write_sdpa(&back), text);
    assert_eq!(text.lines().nth(2), Some("96"));
    let cfg = SolverConfig::default();
    let res = solve(&back, &cfg).unwrap();
    assert!(check_solution(&back, &res.x, &res.y, &res.z, &cfg).passed);

    let json = dump_json(&r.problem);
    assert_eq!(json["dims"]["S"], 48);
    assert_eq!(json["K"]["psd"][0], 96);
}

#[test]
fn sdpa_reader_accepts_comments_and_separators() {
    let text = "\"a comment\n* another\n1\n1\n2\n{1.5}\n0 1 1 1 -1\n1 1 1 1 1\n1 1 2 2 1\n";
    let p = read_sdpa(text).unwrap();
    assert_eq!(p.b, vec![1.5]);
    assert_eq!(p.block(), 2);
    assert_eq!(p.a[0].nnz(), 2);
}

#[test]
fn sdpa_reader_rejects_malformed_input() {
    for bad in [
        "",
        "1\n2\n2\n1\n",
        "1\n1\n2\n1 2\n",
        "1\n1\n2\n1\n1 1 3 3 1\n",
        "1\n1\n2\n1\n2 1 1 1 1\n",
        "1\n1\n2\n1\n1 1 1 x\n",
    ] {
        assert!(matches!(read_sdpa(bad), Err(Error::Sdpa(_))), "{bad:?}");
    }
}
