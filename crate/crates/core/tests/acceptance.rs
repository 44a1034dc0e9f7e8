//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, TAU};
use std::time::Instant;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use spinball::dynamics::{evolve, trace_shift_check, FieldSegment, Omega};
use spinball::lift::{classify_loop, lift_path, BallState, DEFAULT_CLOSURE_TOL};
use spinball::measurement::{measure_axis, statistics, SessionRng, SESSION_STREAM};
use spinball::phase::{berry_experiment, geodesic_increments, GeodesicLoop, Spin};
use spinball::session::{run_script, write_frame, SessionConfig, SessionEvent};
use spinball::state::{bloch_point, bloch_vector};
use spinball::{Frame, So3, Spinor, Su2, Vec3};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn turn(state: &BallState, axis: Vec3, total: f64, steps: usize) -> BallState {
    (0..steps).fold(*state, |s, _| s.step(axis, total / steps as f64).unwrap())
}

fn sign_flip() -> Outcome {
    let mut r = rng(1);
    let mut worst_2pi: f64 = 0.0;
    let mut worst_4pi: f64 = 0.0;
    for _ in 0..20 {
        let axis = unit_vector(&mut r);
        let s0 = spinor(&mut r);
        let ball = BallState::init(s0).unwrap();
        let once = turn(&ball, axis, TAU, 360);
        worst_2pi = worst_2pi.max(once.spinor.distance(&s0.scale(Complex64::new(-1.0, 0.0))));
        let twice = turn(&once, axis, TAU, 360);
        worst_4pi = worst_4pi.max(twice.spinor.distance(&s0));
    }
    check(
        worst_2pi < 1e-8 && worst_4pi < 1e-8,
        format!("max error 2π {worst_2pi:.2e}, 4π {worst_4pi:.2e} (tol 1e-8)"),
    )
}

fn random_su2(r: &mut rand_chacha::ChaCha8Rng) -> Su2 {
    Su2::from_axis_angle(unit_vector(r), r.gen_range(-TAU..TAU)).unwrap()
}

fn homomorphism() -> Outcome {
    let mut r = rng(2);
    let mut worst_hom: f64 = 0.0;
    for _ in 0..1000 {
        let (u1, u2) = (random_su2(&mut r), random_su2(&mut r));
        let product = mat3_mul(&u1.project().m, &u2.project().m);
        worst_hom = worst_hom.max(frobenius(&u1.compose(&u2).project().m, &product));
    }
    // smooth random paths: a precessing axis turning at a varying rate
    let mut worst_path: f64 = 0.0;
    for _ in 0..20 {
        let a = unit_vector(&mut r);
        let b = unit_vector(&mut r);
        let rate = r.gen_range(1.0..3.0);
        let wobble = r.gen_range(0.1..1.0);
        let path: Vec<So3> = (0..=720)
            .map(|k| {
                let t = k as f64 / 720.0;
                let axis = (a.scale((wobble * TAU * t).cos()) + b.scale((wobble * TAU * t).sin()))
                    .normalized()
                    .unwrap_or(a);
                So3::from_axis_angle(axis, rate * TAU * t * t).unwrap()
            })
            .collect();
        let states = lift_path(&path, &BallState::default()).unwrap();
        for (s, o) in states.iter().zip(&path) {
            worst_path = worst_path.max(frobenius(&s.lift.project().m, &o.m));
            worst_path = worst_path.max(frobenius(&s.orientation.m, &o.m));
        }
    }
    check(
        worst_hom < 1e-9 && worst_path < 1e-8,
        format!("homomorphism {worst_hom:.2e} (tol 1e-9), path reprojection {worst_path:.2e} (tol 1e-8)"),
    )
}

fn bloch_consistency() -> Outcome {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = unit_vector(&mut r);
        let inc = geodesic_increments(Vec3::Z, m, 180).unwrap();
        let end = BallState::default().follow(Frame::World, &inc).unwrap();
        worst = worst.max((bloch_point(&end.spinor).unit_vector - m).norm());
    }
    check(worst < 1e-8, format!("max |bloch - M| {worst:.2e} (tol 1e-8)"))
}

fn fiber_law() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s0 = spinor(&mut r);
        let delta = r.gen_range(-2.0 * TAU..2.0 * TAU);
        let ball = BallState::init(s0).unwrap();
        let axis = bloch_vector(&s0).normalized().unwrap();
        let steps = (delta.abs() / 0.5).ceil().max(1.0) as usize;
        let end = turn(&ball, axis, delta, steps);
        let expect = s0.scale(Complex64::from_polar(1.0, -delta / 2.0));
        worst = worst.max(end.spinor.distance(&expect));
    }
    check(worst < 1e-10, format!("max error {worst:.2e} (tol 1e-10)"))
}

fn berry_phase() -> Outcome {
    let started = Instant::now();
    let octant = GeodesicLoop::new(vec![Vec3::Z, Vec3::X, Vec3::Y]);
    let up = berry_experiment(&octant, Spin::Up).unwrap();
    let down = berry_experiment(&octant, Spin::Down).unwrap();
    let up_err = (up.overlap_phase + FRAC_PI_4).abs();
    let down_err = (down.overlap_phase - FRAC_PI_4).abs();
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c) = triangle_from_z(&mut r);
        let report = berry_experiment(&GeodesicLoop::new(vec![a, b, c]), Spin::Up).unwrap();
        worst = worst.max(wrap(report.overlap_phase + girard_area(a, b, c) / 2.0).abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    check(
        up_err < 1e-6 && down_err < 1e-6 && worst < 1e-6 && elapsed < 10.0,
        format!(
            "octant up {:.9} (err {up_err:.1e}), down {:.9} (err {down_err:.1e}); triangles max {worst:.2e} (tol 1e-6); {elapsed:.2} s",
            up.overlap_phase, down.overlap_phase
        ),
    )
}

fn sampled_loop(f: impl Fn(f64) -> So3) -> Vec<So3> {
    (0..=360).map(|k| f(k as f64 / 360.0)).collect()
}

fn gamma_of(path: &[So3]) -> f64 {
    let states = lift_path(path, &BallState::default()).unwrap();
    classify_loop(&states, DEFAULT_CLOSURE_TOL).unwrap().gamma
}

fn homotopic_phase() -> Outcome {
    let mut r = rng(6);
    let mut failures = Vec::new();
    for i in 0..10 {
        let a = unit_vector(&mut r);
        let tilt = unit_vector(&mut r);
        let base = So3::from_axis_angle(tilt, r.gen_range(0.0..3.0)).unwrap();
        // 2π about a fixed axis, seen from a rotated base orientation
        let one = sampled_loop(|t| So3::from_axis_angle(a, TAU * t).unwrap() * base);
        // 4π
        let two = sampled_loop(|t| So3::from_axis_angle(a, 2.0 * TAU * t).unwrap() * base);
        // out to 3π/2 and back along the same path
        let back = sampled_loop(|t| {
            let s = if t <= 0.5 { t } else { 1.0 - t };
            So3::from_axis_angle(a, 3.0 * PI * s).unwrap() * base
        });
        // a cone wobble of the axis, contractible
        let cone = sampled_loop(|t| {
            let n = Vec3::new(0.4 * (TAU * t).cos(), 0.4 * (TAU * t).sin(), 1.0).normalized().unwrap();
            So3::from_axis_angle(n, 0.8).unwrap().compose(&So3::from_axis_angle(Vec3::Z, -0.8).unwrap()) * base
        });
        let g = [gamma_of(&one), gamma_of(&two), gamma_of(&back), gamma_of(&cone)];
        let want = [PI, 0.0, 0.0, 0.0];
        for (k, (got, exp)) in g.iter().zip(want).enumerate() {
            if wrap(got - exp).abs() > 1e-12 {
                failures.push(format!("family {i} loop {k}: {got}"));
            }
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "40 loops at 360 samples: 2π → π, 4π/retraced/cone → 0".into()
        } else {
            failures.join("; ")
        },
    )
}

fn larmor() -> Outcome {
    let b0 = 1.5;
    let t = 2.0;
    let s0 = Spinor::normalize(Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.7)).unwrap();
    let ball = BallState::init(s0).unwrap();
    let seg = FieldSegment::constant(Vec3::Z.scale(b0), 0.0, t, t / 1e4);
    let out = evolve(&ball, &seg).unwrap().spinor;
    let analytic = Spinor {
        alpha: s0.alpha * Complex64::from_polar(1.0, -b0 * t),
        beta: s0.beta * Complex64::from_polar(1.0, b0 * t),
    };
    let analytic_err = out.distance(&analytic);

    // a single exponential for a general constant Ω
    let omega = Vec3::new(0.3, -0.7, 0.5);
    let seg = FieldSegment::constant(omega, 0.0, t, t / 1e4);
    let stepped = evolve(&ball, &seg).unwrap().spinor;
    let single = Su2::from_axis_angle(omega.normalized().unwrap(), 2.0 * omega.norm() * t)
        .unwrap()
        .apply(&s0);
    let oracle = mat_apply(&expm_minus_i(&hermitian(0.0, omega), t), &s0);
    let exact_err = stepped.distance(&single).max(single.distance(&oracle));

    // The midpoint exponential is exact for constant Ω, so the dt-halving
    // ratio is measured on a Larmor field with a rotating transverse part.
    let field = RotatingField { b0, b: 0.4, w: 1.1 };
    let exact = field.exact(&s0, t);
    let err = |n: usize| {
        let seg = FieldSegment::new(Omega::varying(move |s| field.at(s)), 0.0, t, t / n as f64);
        evolve(&ball, &seg).unwrap().spinor.distance(&exact)
    };
    let ratio = err(400) / err(800);
    check(
        analytic_err < 1e-8 && exact_err < 1e-8 && (3.5..=4.5).contains(&ratio),
        format!(
            "analytic {analytic_err:.2e}, single exponential {exact_err:.2e} (tol 1e-8); dt-halving ratio {ratio:.3} (want [3.5, 4.5])"
        ),
    )
}

fn trace_absorption() -> Outcome {
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s0 = BallState::init(spinor(&mut r)).unwrap();
        let omega = unit_vector(&mut r).scale(r.gen_range(0.1..2.0));
        let (t0, t1) = (r.gen_range(-1.0..1.0), r.gen_range(1.5..3.0));
        let c = r.gen_range(-5.0..5.0);
        let seg = FieldSegment::constant(omega, t0, t1, 1e-3);
        let shift = trace_shift_check(&s0, &seg, c).unwrap();
        let expect = -c * (t1 - t0);
        worst = worst.max(wrap(shift.phase - expect).abs()).max(shift.ray_mismatch);
    }
    check(worst < 1e-8, format!("max phase/ray error {worst:.2e} over 20 cases (tol 1e-8)"))
}

fn balanced_state() -> Spinor {
    Spinor {
        alpha: Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
        beta: Complex64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_4),
    }
}

/// `|n⟩` written out from spherical angles, independent of the rotation code.
fn ket(n: Vec3) -> Spinor {
    let theta = n.z.clamp(-1.0, 1.0).acos();
    let phi = n.y.atan2(n.x);
    Spinor {
        alpha: Complex64::new((theta / 2.0).cos(), 0.0),
        beta: Complex64::from_polar((theta / 2.0).sin(), phi),
    }
}

fn measurement_statistics() -> Outcome {
    let started = Instant::now();
    let s = balanced_state();
    let report = statistics(&s, Vec3::Z, 100_000, 2024).unwrap();
    let freq_err = (report.p_hat - 0.5).abs();

    let ball = BallState::init(s).unwrap();
    let mut rng_ = SessionRng::new(11, SESSION_STREAM);
    let mut post_ok = true;
    for _ in 0..1000 {
        let (rec, _) = measure_axis(&ball, Vec3::Z, &mut rng_).unwrap();
        let p = rec.post_state;
        post_ok &= if rec.outcome > 0 {
            p.alpha == s.alpha / s.alpha.norm()
                && p.beta == Complex64::new(0.0, 0.0)
                && (p.alpha - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15
        } else {
            p.beta == s.beta / s.beta.norm()
                && p.alpha == Complex64::new(0.0, 0.0)
                && (p.beta - Complex64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-15
        };
    }

    let mut r = rng(9);
    let mut worst_p: f64 = 0.0;
    let mut all_within = true;
    for i in 0..20 {
        let n = unit_vector(&mut r);
        let psi = spinor(&mut r);
        let direct = ket(n).inner(&psi).norm_sqr();
        let mut gen = SessionRng::new(i, SESSION_STREAM);
        let (rec, _) = measure_axis(&BallState::init(psi).unwrap(), n, &mut gen).unwrap();
        worst_p = worst_p.max((rec.p_up - direct).abs());
        let stats = statistics(&psi, n, 100_000, 100 + i).unwrap();
        let sigma = (direct * (1.0 - direct) / 1e5).sqrt();
        all_within &= (stats.p_hat - direct).abs() <= 5.0 * sigma;
    }
    let elapsed = started.elapsed().as_secs_f64();
    check(
        freq_err <= 0.0079 && post_ok && worst_p < 1e-12 && all_within && elapsed < 30.0,
        format!(
            "p̂ {:.5} (|Δ| {freq_err:.5} ≤ 0.0079); post states exact: {post_ok}; 20 axes: max |p - |⟨n|ψ⟩|²| {worst_p:.1e}, all within 5σ: {all_within}; {elapsed:.2} s",
            report.p_hat
        ),
    )
}

fn determinism() -> Outcome {
    let events = vec![
        SessionEvent::Rotate {
            axis: Vec3::X,
            angle: PI / 2.0,
            steps: None,
        },
        SessionEvent::Measure { axis: Vec3::Z },
        SessionEvent::Fiber { delta: 1.0, steps: Some(10) },
        SessionEvent::Field {
            omega: Vec3::new(0.2, 0.1, 0.9),
            t0: 0.0,
            t1: 1.0,
            dt: 0.01,
        },
        SessionEvent::Measure {
            axis: Vec3::new(0.0, 0.6, 0.8),
        },
        SessionEvent::Geodesic {
            from: Vec3::Z,
            to: Vec3::Y,
            steps: None,
        },
        SessionEvent::Measure { axis: Vec3::X },
        SessionEvent::Annotate { text: "end".into() },
    ];
    let config = SessionConfig {
        seed: 424242,
        ..SessionConfig::default()
    };
    let bytes = || {
        let (frames, _) = run_script(&events, config).unwrap();
        let mut out = Vec::new();
        for f in &frames {
            write_frame(f, &mut out).unwrap();
        }
        out
    };
    let (a, b) = (bytes(), bytes());
    check(a == b && !a.is_empty(), format!("two runs, {} bytes each, identical: {}", a.len(), a == b))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("sign flip", sign_flip),
        ("homomorphism & projection", homomorphism),
        ("bloch consistency", bloch_consistency),
        ("fiber law", fiber_law),
        ("berry phase", berry_phase),
        ("homotopic phase", homotopic_phase),
        ("larmor", larmor),
        ("trace absorption", trace_absorption),
        ("measurement statistics", measurement_statistics),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
