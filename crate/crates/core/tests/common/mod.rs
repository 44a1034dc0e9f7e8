//! Test-only helpers and oracles. Nothing here calls into the lifting or
//! area code it is used to check.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinball::{Spinor, Vec3};

pub type C2x2 = [[Complex64; 2]; 2];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(r: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v.scale(1.0 / n);
        }
    }
}

pub fn spinor(r: &mut ChaCha8Rng) -> Spinor {
    let a = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let b = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    Spinor::normalize(a, b).unwrap()
}

pub fn pauli() -> [C2x2; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]]
}

pub fn mat_mul(a: &C2x2, b: &C2x2) -> C2x2 {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn mat_apply(m: &C2x2, s: &Spinor) -> Spinor {
    Spinor {
        alpha: m[0][0] * s.alpha + m[0][1] * s.beta,
        beta: m[1][0] * s.alpha + m[1][1] * s.beta,
    }
}

/// `Σ cᵢ σᵢ` for a real vector `c`, plus `a·I`.
pub fn hermitian(a: f64, c: Vec3) -> C2x2 {
    let p = pauli();
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = p[0][i][j] * c.x + p[1][i][j] * c.y + p[2][i][j] * c.z;
        }
        m[i][i] += a;
    }
    m
}

/// `exp(−i·h·t)` by scaling and squaring a truncated Taylor series.
pub fn expm_minus_i(h: &C2x2, t: f64) -> C2x2 {
    let mut a = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut norm: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] = -Complex64::i() * h[i][j] * t;
            norm = norm.max(a[i][j].norm());
        }
    }
    let mut squarings = 0;
    while norm > 0.05 {
        norm /= 2.0;
        squarings += 1;
    }
    let scale = 0.5f64.powi(squarings);
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut sum = [[one, zero], [zero, one]];
    let mut term = sum;
    for k in 1..20 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

/// Interior angle of a spherical triangle at vertex `a`.
fn interior_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let tb = (b - a.scale(a.dot(b))).normalized().unwrap();
    let tc = (c - a.scale(a.dot(c))).normalized().unwrap();
    tb.dot(tc).clamp(-1.0, 1.0).acos()
}

/// Girard: area = sum of interior angles − π, signed by orientation.
pub fn girard_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let excess = interior_angle(a, b, c) + interior_angle(b, c, a) + interior_angle(c, a, b) - std::f64::consts::PI;
    excess * a.dot(b.cross(c)).signum()
}

/// Random spherical triangle with ẑ as first vertex, kept away from the
/// degenerate configurations the Girard oracle cannot resolve.
pub fn triangle_from_z(r: &mut ChaCha8Rng) -> (Vec3, Vec3, Vec3) {
    loop {
        let b = unit_vector(r);
        let c = unit_vector(r);
        let a = Vec3::Z;
        let min_side = [(a, b), (b, c), (c, a)]
            .iter()
            .map(|(p, q)| (*p - *q).norm().min((*p + *q).norm()))
            .fold(f64::INFINITY, f64::min);
        // hemisphere-sized or larger triangles have an ambiguous "inside"
        // for the angle-sum oracle
        let det = a.dot(b.cross(c)).abs();
        if min_side > 0.05 && det > 1e-3 && girard_area(a, b, c).abs() < std::f64::consts::PI {
            return (a, b, c);
        }
    }
}

pub fn wrap(x: f64) -> f64 {
    spinball::state::wrap_angle(x)
}

/// Plain 3×3 matrix product, no re-orthonormalization.
pub fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

pub fn frobenius(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += (a[i][j] - b[i][j]).powi(2);
        }
    }
    acc.sqrt()
}

/// Field `(b cos ωt, b sin ωt, b0)` used where a time-dependent Larmor
/// problem with a closed form is needed.
#[derive(Debug, Clone, Copy)]
pub struct RotatingField {
    pub b0: f64,
    pub b: f64,
    pub w: f64,
}

impl RotatingField {
    pub fn at(&self, t: f64) -> Vec3 {
        Vec3::new(self.b * (self.w * t).cos(), self.b * (self.w * t).sin(), self.b0)
    }

    /// Exact state at `t` under `H = Ω(t)·σ`, from the rotating frame where
    /// the Hamiltonian is constant.
    pub fn exact(&self, s0: &Spinor, t: f64) -> Spinor {
        let frame = expm_minus_i(&hermitian(0.0, Vec3::new(0.0, 0.0, self.w / 2.0)), t);
        let inner = expm_minus_i(&hermitian(0.0, Vec3::new(self.b, 0.0, self.b0 - self.w / 2.0)), t);
        mat_apply(&mat_mul(&frame, &inner), s0)
    }
}
