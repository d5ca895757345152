use growdiff::critical::{envelope_bounds_general, perturbed_motion, Envelope};
use growdiff::exact::SeriesSolution;
use growdiff::motion::{BoundaryMotion, EtaSpec, PhysicsParams, SeparableParams};
use growdiff::numeric::{solve_u, SolverConfig};
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit() -> PhysicsParams {
    PhysicsParams::new(1.0, 1.0).unwrap()
}

fn sine(n: usize) -> Vec<f64> {
    (0..=n).map(|i| (PI * i as f64 / n as f64).sin()).collect()
}

#[test]
fn perturbed_motion_lies_between_gamma_bounds() {
    let phys = unit();
    let m = perturbed_motion(1.0, 2.0).unwrap();
    assert!(m.is_symmetric());
    let pair = envelope_bounds_general(&m, &phys, |x| (PI * x).sin(), None, 2.0, 256, 24).unwrap();
    assert!(pair.bounds.gamma0_lo < pair.bounds.gamma0_hi);
    let times: Vec<f64> = (1..=5).map(|k| 0.4 * k as f64).collect();
    let n = 512;
    let sol = solve_u(&m, &phys, &sine(n), &SolverConfig::uniform(n, 1e-4), &times).unwrap();
    for (k, &t) in times.iter().enumerate() {
        let scale = sol.field[k].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for &xi in &[0.1, 0.3, 0.5, 0.8] {
            let u = sol.value_at(k, xi);
            let lo = pair.lower.u(xi, t).unwrap();
            let hi = pair.upper.u(xi, t).unwrap();
            assert!((u - lo) / scale >= -1e-8, "lower at {xi},{t}: {lo} > {u}");
            assert!((hi - u) / scale >= -1e-8, "upper at {xi},{t}: {hi} < {u}");
        }
    }
}

#[test]
fn inner_domain_stays_below_outer() {
    let phys = unit();
    let inner = BoundaryMotion::separable(SeparableParams::fixed(1.0)).unwrap();
    let outer = BoundaryMotion::separable(SeparableParams::linear(1.0, 0.8).with_drift(-0.4, 0.0)).unwrap();
    let exact = SeriesSolution::build(outer, phys, |x| (PI * x).sin(), 512, 24).unwrap();
    let times = [0.25, 0.5, 1.0, 2.0];
    let n = 400;
    let sol = solve_u(&inner, &phys, &sine(n), &SolverConfig::uniform(n, 1e-3), &times).unwrap();
    for (k, &t) in times.iter().enumerate() {
        for i in 1..n {
            let x = i as f64 / n as f64;
            let outer_psi = exact.eval_physical(x, t).unwrap();
            assert!(sol.field[k][i] <= outer_psi + 1e-8 * outer_psi.abs().max(1.0), "x={x} t={t}");
        }
    }
}

fn critical_envelope() -> Envelope {
    let m = BoundaryMotion::critical(1.5, EtaSpec::default(), 2.0, &unit()).unwrap();
    Envelope::new(m, unit(), 1e3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn residual_signs_hold(f in 0.0f64..1.0, g in 0.001f64..0.999, h in 0.001f64..0.999) {
        let env = critical_envelope();
        let on = env.onset().unwrap();
        let t = on + (1e3 - on) * f;
        let l0 = env.motion().l0();
        let p = growdiff::critical::potential(env.motion(), &unit(), t).unwrap().p;
        let xi = growdiff::critical::kappa() * l0 / p.cbrt() * g;
        prop_assert!(env.sub_residual(xi, t).unwrap() <= 1e-6);
        prop_assert!(env.super_residual(h * l0, t).unwrap() >= -1e-6);
        let (sub, sup) = (env.sub(xi, t).unwrap(), env.sup(xi, t).unwrap());
        prop_assert!(sub >= 0.0 && sup >= 0.0);
    }
}
