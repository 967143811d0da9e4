use quasi1d::oracle::{pair_scattering_length, ring_brute_force, strip_scattering_length, StripProblem};
use quasi1d::ring::ring_spectrum;
use quasi1d::twobody::{build_kernel, solve_scattering_length, KernelParams};
use quasi1d::*;

#[test]
fn ring_levels_appear_in_dense_spectrum() {
    let spec = TrapSpec::harmonic(0.1, 10);
    let s = solve_transverse(&spec).unwrap();
    for u in [-1.0, 2.0, 15.0] {
        let dense = ring_brute_force(&spec, 10, u).unwrap();
        let levels = ring_spectrum(&s, u, 10).unwrap();
        assert!(!levels.is_empty());
        for level in levels {
            let e = level.energy + s.ground_energy();
            let nearest = dense.iter().map(|d| (d - e).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "U = {u}, k = {}: {nearest}", level.k);
        }
    }
}

#[test]
fn strip_converges_in_length() {
    let spec = TrapSpec::harmonic(1e-2, 20);
    let s = solve_transverse(&spec).unwrap();
    let exact = single::effective_u1d(&s, -2.0, 0.0).unwrap().a.unwrap();
    let mut last = f64::INFINITY;
    for lx in [100, 200, 400] {
        let a = strip_scattering_length(&StripProblem { lx, spec: spec.clone(), u: -2.0 }).unwrap().a;
        let err = ((a - exact) / exact).abs();
        assert!(err <= last.max(1e-10));
        last = err;
    }
    assert!(last < 1e-6);
}

#[test]
fn pair_oracle_across_couplings() {
    let spec = TrapSpec::two_site(1.0);
    let s = solve_transverse(&spec).unwrap();
    let kernel = build_kernel(&s, KernelParams::new(2)).unwrap();
    for u in [-40.0, -12.0, -3.0, 0.7, 9.0] {
        let a = solve_scattering_length(&kernel, u).unwrap().a.unwrap();
        let brute = pair_scattering_length(&StripProblem { lx: 80, spec: spec.clone(), u }, 0.0).unwrap().a;
        assert!(((a - brute) / brute).abs() < 1e-6, "{u}: {a} vs {brute}");
    }
}

#[test]
fn pair_oracle_at_finite_total_momentum() {
    let spec = TrapSpec::harmonic(0.2, 3);
    let s = solve_transverse(&spec).unwrap();
    let total_k = 0.8;
    let kernel = build_kernel(&s, KernelParams { total_k, ..KernelParams::new(s.len()) }).unwrap();
    let a = solve_scattering_length(&kernel, -3.0).unwrap().a.unwrap();
    let brute = pair_scattering_length(&StripProblem { lx: 100, spec, u: -3.0 }, total_k).unwrap().a;
    assert!(((a - brute) / brute).abs() < 1e-6, "{a} vs {brute}");
}
