//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};

use quasi1d::continuum::{continuum_sum, Well};
use quasi1d::oracle::{pair_scattering_length, strip_scattering_length, StripProblem};
use quasi1d::ring::{ring_cir_crossings, ring_momentum, ring_momentum_infinite_channels, ring_spectrum};
use quasi1d::single::sign_changes;
use quasi1d::spa::{linspace, spa_fit};
use quasi1d::twobody::kernel::{overlap, pair_channels};
use quasi1d::twobody::resonances::ResonanceClass;
use quasi1d::twobody::*;
use quasi1d::*;

mod tol {
    pub const TWO_SITE_CIR: f64 = 0.01;
    pub const C1: f64 = 0.02;
    pub const C2: f64 = 0.7;
    pub const SPA_ESTIMATE: f64 = 0.05;
    pub const BROAD_CIR: f64 = 0.005;
    pub const BORN: f64 = 1e-8;
    pub const STRONG_COUPLING: f64 = 1e-4;
    pub const QUADRATURE: f64 = 1e-8;
    pub const FREE_RING_K: f64 = 1e-12;
    pub const RING_INFINITE: f64 = 1e-6;
    pub const ORACLE: f64 = 1e-6;
    pub const SYMMETRY: f64 = 1e-12;
    pub const PARITY: f64 = 1e-12;
    pub const CUTOFF: f64 = 1e-4;
}

type Outcome = std::result::Result<Vec<String>, Vec<String>>;

/// Collects the failed checks of one criterion.
#[derive(Default)]
struct Checks {
    notes: Vec<String>,
    failed: bool,
}

impl Checks {
    fn check(&mut self, ok: bool, note: String) {
        self.notes.push(format!("{}{note}", if ok { "" } else { "✗ " }));
        self.failed |= !ok;
    }

    fn finish(self) -> Outcome {
        if self.failed {
            Err(self.notes)
        } else {
            Ok(self.notes)
        }
    }
}

fn harmonic_kernel(omega: f64, nc: usize) -> (TransverseSpectrum, OverlapKernel) {
    let s = solve_transverse(&TrapSpec::harmonic_complete(omega, nc).unwrap()).unwrap();
    let k = build_kernel(&s, KernelParams::new(nc)).unwrap();
    (s, k)
}

fn two_site_kernel() -> OverlapKernel {
    let s = solve_transverse(&TrapSpec::two_site(1.0)).unwrap();
    build_kernel(&s, KernelParams::new(2)).unwrap()
}

fn tail_fit(kernel: &OverlapKernel, poles: &[f64]) -> spa::SpaFit {
    let curve: Vec<(f64, f64)> = linspace(-1000.0, -900.0, 50)
        .into_iter()
        .map(|u| (u, solve_scattering_length(kernel, u).unwrap().u1d))
        .collect();
    spa_fit(&curve, kernel.r0000, poles).unwrap()
}

fn criterion_1() -> Outcome {
    let mut c = Checks::default();
    let report = locate_resonances(&two_site_kernel(), (-50.0, 20.0)).unwrap();
    let positions: Vec<f64> = report.cirs().map(|r| r.u_cir).collect();
    let broad = report.broad().unwrap().u_cir;
    c.check((broad + 29.35).abs() <= tol::TWO_SITE_CIR, format!("broad CIR {broad:.4} (expected -29.35 ± {})", tol::TWO_SITE_CIR));
    c.check(positions.len() == 2, format!("CIRs {positions:.4?}"));
    c.check(report.zero_crossings.len() == 1, format!("zero crossings {:.4?}", report.zero_crossings));
    c.finish()
}

fn criterion_2() -> Outcome {
    let mut c = Checks::default();
    let kernel = two_site_kernel();
    let poles: Vec<f64> = SpectralKernel::new(&kernel).poles().iter().map(|p| p.0).collect();
    let fit = tail_fit(&kernel, &poles);
    c.check((fit.c1 - 21.57).abs() <= tol::C1, format!("c1 {:.4} (expected 21.57 ± {})", fit.c1, tol::C1));
    c.check((fit.c2 + 661.22).abs() <= tol::C2, format!("c2 {:.3} (expected -661.22 ± {})", fit.c2, tol::C2));
    c.check(
        (fit.estimate_c1 + 28.76).abs() <= tol::SPA_ESTIMATE,
        format!("estimate from c1 {:.4} (expected -28.76 ± {})", fit.estimate_c1, tol::SPA_ESTIMATE),
    );
    let e2 = fit.estimate_c2.unwrap_or(f64::NAN);
    c.check((e2 + 29.69).abs() <= tol::SPA_ESTIMATE, format!("estimate from c2 {e2:.4} (expected -29.69 ± {})", tol::SPA_ESTIMATE));
    c.finish()
}

fn harmonic_criterion(omega: f64, nc: usize, broad_expected: f64, count: usize, narrow: Option<usize>, spa_range: (f64, f64)) -> Outcome {
    let mut c = Checks::default();
    let (_, kernel) = harmonic_kernel(omega, nc);
    let report = locate_resonances(&kernel, (-10.0, 5.0)).unwrap();
    let broad = report.broad().unwrap().u_cir;
    c.check(
        (broad - broad_expected).abs() <= tol::BROAD_CIR,
        format!("broad CIR {broad:.5} (expected {broad_expected} ± {})", tol::BROAD_CIR),
    );
    let positions: Vec<f64> = report.cirs().map(|r| r.u_cir).collect();
    c.check(positions.len() == count, format!("{} CIRs {positions:.4?}", positions.len()));
    if let Some(narrow) = narrow {
        let n = report.count(ResonanceClass::Narrow);
        c.check(n == narrow, format!("{n} narrow"));
    }
    let poles: Vec<f64> = report.resonances.iter().map(|r| r.u_cir).collect();
    let fit = tail_fit(&kernel, &poles);
    let est = fit.estimate();
    c.check(
        est >= spa_range.0 && est <= spa_range.1,
        format!("SPA estimate {est:.4} (spread {:.4}) in [{}, {}]", fit.spread().unwrap_or(f64::NAN), spa_range.0, spa_range.1),
    );
    c.finish()
}

fn criterion_3() -> Outcome {
    harmonic_criterion(1e-3, 41, -4.792, 3, Some(2), (-4.9, -4.7))
}

fn criterion_4() -> Outcome {
    harmonic_criterion(1e-1, 21, -8.286, 4, None, (-8.4, -8.2))
}

fn criterion_5() -> Outcome {
    let mut c = Checks::default();
    for (name, kernel) in [("two-site", two_site_kernel()), ("harmonic 0.1", harmonic_kernel(0.1, 21).1)] {
        let poles = SpectralKernel::new(&kernel).poles();
        let first = poles.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let mut worst = 0.0f64;
        // at order 100 the truncation error scales as |U/U_CIR|^100
        for frac in [-0.8, -0.5, -0.1, 0.1, 0.5, 0.8] {
            let u = frac * first.abs();
            let born = born_series(&kernel, u, 100).unwrap().i00();
            let direct = solve_scattering_length(&kernel, u).unwrap().i00();
            worst = worst.max(((born - direct) / direct).abs());
        }
        c.check(worst <= tol::BORN, format!("{name}: worst Born/direct deviation {worst:.1e} inside |U| < {:.4}", first.abs()));
        let beyond = born_series(&kernel, 1.2 * first, 100);
        c.check(matches!(beyond, Err(Error::Diverging { .. })), format!("{name}: U = {:.4} -> {}", 1.2 * first, describe(&beyond)));
    }
    c.finish()
}

fn describe<T>(r: &Result<T>) -> String {
    match r {
        Ok(_) => "converged".into(),
        Err(e) => e.kind().into(),
    }
}

fn criterion_6() -> Outcome {
    let mut c = Checks::default();
    let s = solve_transverse(&TrapSpec::harmonic(1e-3, 200)).unwrap();
    let cir = single::u_cir(&s, 0.0, ChannelCutoff::All).unwrap();
    let u_c = cir.u_cir().unwrap();
    let zero = single::effective_u1d_with(&s, &cir, 0.0).unwrap().u1d;
    c.check(zero == 0.0, format!("U1D(0) = {zero}"));
    let limit = -u_c * s.origin_amplitude(0).powi(2);
    for u in [-1e6, 1e6] {
        let v = single::effective_u1d_with(&s, &cir, u).unwrap().u1d;
        let dev = ((v - limit) / limit).abs();
        c.check(dev < tol::STRONG_COUPLING, format!("U1D({u:e}) relative deviation {dev:.1e}"));
    }
    let grid = linspace(-30.0, 30.0, 600);
    let changes = sign_changes(&s, &cir, &grid).unwrap();
    let step = grid[1] - grid[0];
    let poles: Vec<&f64> = changes.iter().filter(|u| u.abs() > step).collect();
    c.check(
        poles.len() == 1 && (poles[0] - u_c).abs() <= step,
        format!("sign changes away from U = 0: {poles:.3?}, U_CIR = {u_c:.5}"),
    );
    c.finish()
}

fn criterion_7() -> Outcome {
    let mut c = Checks::default();
    let mut values = Vec::new();
    let mut worst = 0.0f64;
    let mut finite = true;
    for v0 in linspace(0.1, 20.0, 60) {
        let well = Well::from_spec(&TrapSpec::delta_well(v0, 1)).unwrap();
        let e0 = v0 - (v0 * v0 + 4.0).sqrt();
        let sum = continuum_sum(&well, e0, 0.0).unwrap();
        finite &= sum.value.is_finite() && sum.value != 0.0;
        worst = worst.max((sum.value - sum.crosscheck).abs());
        values.push((v0, 1.0 / sum.value));
    }
    c.check(finite, "S(0) finite and nonzero for V0 in [0.1, 20]".into());
    c.check(worst <= tol::QUADRATURE, format!("adaptive vs trapezoid worst difference {worst:.1e}"));
    let monotone = values.windows(2).all(|w| w[1].1 < w[0].1);
    c.check(
        monotone && values.iter().all(|v| v.1 < 0.0),
        format!("U_CIR decreasing and negative: {:.3} at V0 = 0.1 to {:.3} at V0 = 20", values[0].1, values.last().unwrap().1),
    );
    c.finish()
}

fn criterion_8() -> Outcome {
    let mut c = Checks::default();
    let s = solve_transverse(&TrapSpec::harmonic(1e-3, 200)).unwrap();
    let mut worst = 0.0f64;
    for l in [10, 50, 1000] {
        for sol in ring_spectrum(&s, 0.0, l).unwrap() {
            let m = (sol.k * l as f64 / (2.0 * PI)).round();
            worst = worst.max((sol.k - 2.0 * PI * m / l as f64).abs());
        }
    }
    c.check(worst <= tol::FREE_RING_K, format!("U = 0: worst |k - 2πm/L| = {worst:.1e}"));

    let mut worst = 0.0f64;
    let mut mismatched = 0;
    let mut compared = 0;
    for u in linspace(-30.0, 30.0, 61) {
        let lowest = |finite: bool| {
            (0..2).find_map(|b| {
                let r = if finite { ring_momentum(&s, u, 1000, b) } else { ring_momentum_infinite_channels(&s, u, 1000, b) };
                r.ok()
            })
        };
        match (lowest(true), lowest(false)) {
            (Some(a), Some(b)) if a.branch == b.branch => {
                compared += 1;
                worst = worst.max((a.energy - b.energy).abs());
            }
            (None, None) => {}
            _ => mismatched += 1,
        }
    }
    c.check(
        worst <= tol::RING_INFINITE && mismatched == 0,
        format!("L = 1000 lowest level vs infinite-line coupling: worst {worst:.1e} over {compared} couplings"),
    );

    let mut all_negative = true;
    let mut total = 0;
    for l in [10, 50, 1000] {
        let crossings = ring_cir_crossings(&s, l, -1e6, 1e6).unwrap();
        total += crossings.len();
        all_negative &= crossings.iter().all(|u| *u < 0.0);
        // each crossing really moves a level through the fermionized momentum
        if let Some(&u) = crossings.first() {
            let k_f = PI / l as f64;
            let nearest = |u: f64| {
                ring_spectrum(&s, u, l)
                    .unwrap()
                    .into_iter()
                    .map(|r| r.k)
                    .min_by(|a, b| (a - k_f).abs().total_cmp(&(b - k_f).abs()))
                    .unwrap_or(f64::NAN)
            };
            let h = 1e-3 * u.abs();
            all_negative &= (nearest(u - h) - k_f) * (nearest(u + h) - k_f) < 0.0;
        }
    }
    c.check(all_negative && total > 0, format!("{total} fermionized-energy crossings, all at U < 0"));
    c.finish()
}

fn criterion_9() -> Outcome {
    let mut c = Checks::default();
    let spec = TrapSpec::harmonic(1e-2, 20);
    let s = solve_transverse(&spec).unwrap();
    let channel = single::effective_u1d(&s, -2.0, 0.0).unwrap().a.unwrap();
    let brute = strip_scattering_length(&StripProblem { lx: 400, spec, u: -2.0 }).unwrap().a;
    let dev = ((channel - brute) / brute).abs();
    c.check(dev <= tol::ORACLE, format!("single particle: a = {channel:.10} vs strip {brute:.10} ({dev:.1e})"));

    let spec = TrapSpec::two_site(1.0);
    let kernel = two_site_kernel();
    let channel = solve_scattering_length(&kernel, -5.0).unwrap();
    let brute = pair_scattering_length(&StripProblem { lx: 60, spec: spec.clone(), u: -5.0 }, 0.0).unwrap().a;
    let a = channel.a.unwrap();
    let dev = ((a - brute) / brute).abs();
    c.check(dev <= tol::ORACLE, format!("two-site pair: a = {a:.10} vs strip {brute:.10} ({dev:.1e})"));

    // the opposite conventions either cannot be evaluated or miss the oracle
    let s = solve_transverse(&spec).unwrap();
    let flipped = build_kernel(&s, KernelParams { sign: JkSign::Flipped, ..KernelParams::new(2) });
    let opposite_a = 2.0 * kernel.j_k / channel.u1d;
    let rejected = matches!(flipped, Err(Error::OpenChannel { .. })) && ((opposite_a - brute) / brute).abs() > 1.0;
    c.check(rejected, format!("flipped J_K: {}; a = +2J_K/U1D gives {opposite_a:.4}", describe(&flipped)));

    let small = TrapSpec::harmonic(0.1, 3);
    let s = solve_transverse(&small).unwrap();
    let k = build_kernel(&s, KernelParams::new(s.len())).unwrap();
    let a = solve_scattering_length(&k, -5.0).unwrap().a.unwrap();
    let brute = pair_scattering_length(&StripProblem { lx: 80, spec: small, u: -5.0 }, 0.0).unwrap().a;
    let flipped = build_kernel(&s, KernelParams { sign: JkSign::Flipped, ..KernelParams::new(s.len()) });
    c.check(
        ((a - brute) / brute).abs() <= tol::ORACLE && flipped.is_err(),
        format!("harmonic 0.1 pair: a = {a:.10} vs strip {brute:.10}; flipped J_K: {}", describe(&flipped)),
    );
    c.finish()
}

fn criterion_10() -> Outcome {
    let mut c = Checks::default();
    let u_points = [-20.0, -2.0, 2.0, 20.0];
    for (omega, nc) in [(1e-3, 41), (1e-1, 21)] {
        let (s, kernel) = harmonic_kernel(omega, nc);
        let alphas_ok = kernel.channels.iter().all(|ch| ch.alpha.alpha > 0.0 && ch.alpha.alpha < 1.0 && ch.alpha.denominator < 0.0);
        let single_ok = single::u_cir(&s, 0.0, ChannelCutoff::All)
            .unwrap()
            .alphas
            .iter()
            .flatten()
            .all(|a| a.alpha > 0.0 && a.alpha < 1.0 && a.denominator < 0.0);
        c.check(alphas_ok && single_ok, format!("Ω = {omega}: α in (0, 1), denominators negative over {} pair channels", kernel.len()));
        let asym = kernel.asymmetry();
        c.check(asym <= tol::SYMMETRY, format!("Ω = {omega}: kernel asymmetry {asym:.1e}"));
        let mut parity = 0.0f64;
        let even: Vec<(usize, usize)> = pair_channels(&s, nc).into_iter().map(|p| (p.0, p.1)).collect();
        for n1 in 0..nc {
            for n2 in n1..nc {
                if !even.contains(&(n1, n2)) && (n1, n2) != (0, 0) {
                    parity = parity.max(overlap(&s, (n1, n2), (0, 0)).abs());
                }
            }
        }
        c.check(parity <= tol::PARITY, format!("Ω = {omega}: largest odd-pair entrance overlap {parity:.1e}"));
        let (_, wider) = harmonic_kernel(omega, nc + 10);
        let mut worst = 0.0f64;
        for u in u_points {
            let a = solve_scattering_length(&kernel, u).unwrap().u1d;
            let b = solve_scattering_length(&wider, u).unwrap().u1d;
            worst = worst.max(((a - b) / b).abs());
        }
        c.check(worst <= tol::CUTOFF, format!("Ω = {omega}: Nc = {nc} vs {} worst relative change {worst:.1e}", nc + 10));
    }
    c.finish()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("two-site CIR position, two CIRs and one zero crossing", criterion_1),
        ("two-site SPA fit constants and estimates", criterion_2),
        ("harmonic Ω = 1e-3, Nc = 41 resonances", criterion_3),
        ("harmonic Ω = 1e-1, Nc = 21 resonances", criterion_4),
        ("Born series order 100", criterion_5),
        ("single-particle limits", criterion_6),
        ("continuum delta well", criterion_7),
        ("ring quantization", criterion_8),
        ("oracle equivalence and J_K sign", criterion_9),
        ("invariant suites", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(vec![format!("panicked: {}", msg.unwrap_or_default())])
        });
        let (tag, notes) = match outcome {
            Ok(n) => ("PASS", n),
            Err(n) => {
                failures += 1;
                ("FAIL", n)
            }
        };
        println!("{tag} {:>2} {name}: {}", i + 1, notes.join("; "));
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
