//! SU(2) and SO(3) elements, their exponential maps, the two-to-one
//! projection between them, and the action of SU(2) on spinors.
//!
//! # Quaternion identification
//!
//! An [`Su2`] with components `(w, x, y, z)` stands for the 2×2 matrix
//!
//! ```text
//! U = w·I − i(x·σx + y·σy + z·σz)
//!
//!   = | w − iz     −y − ix |
//!     | y − ix      w + iz |
//! ```
//!
//! so that `exp(−iθ σ·n / 2) = (cos θ/2, sin θ/2 · n)`. Matrix products then
//! coincide with the Hamilton product, and the projection to SO(3) is the
//! usual `v ↦ q v q*` (right-handed, positive angle = counterclockwise seen
//! from the tip of the axis). Every half-angle sign in the crate follows from
//! this table; nothing else hard-codes a sign.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const AXIS_TOL: f64 = 1e-9;
pub(crate) const NORM_TOL: f64 = 1e-12;
/// Relative rotations closer than this to π have no unique lift.
pub const AMBIGUITY_TOL: f64 = 1e-9;

/// Plain 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale(1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Checks `|self| = 1` within the axis tolerance.
    pub fn require_unit(self) -> Result<Vec3> {
        let n = self.norm();
        if !n.is_finite() || (n - 1.0).abs() > AXIS_TOL {
            return Err(Error::NonUnitAxis { norm: n });
        }
        Ok(self)
    }

    /// Some unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(self) -> Vec3 {
        let helper = if self.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
        self.cross(helper).normalized().unwrap_or(Vec3::Z)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Unit quaternion standing for an element of SU(2); see the module docs
/// for the matrix identification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Su2 {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for Su2 {
    fn from(a: [f64; 4]) -> Self {
        Su2 {
            w: a[0],
            x: a[1],
            y: a[2],
            z: a[3],
        }
    }
}

impl From<Su2> for [f64; 4] {
    fn from(q: Su2) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };
    pub const MINUS_IDENTITY: Su2 = Su2 {
        w: -1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// `exp(−i·angle·σ·axis/2)`. Any real angle is accepted: 2π gives −I.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Su2> {
        let axis = axis.require_unit()?;
        if !angle.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        Ok(Self::from_axis_angle_unchecked(axis, angle))
    }

    pub(crate) fn from_axis_angle_unchecked(axis: Vec3, angle: f64) -> Su2 {
        let (s, c) = (0.5 * angle).sin_cos();
        Su2 {
            w: c,
            x: s * axis.x,
            y: s * axis.y,
            z: s * axis.z,
        }
        .renormalized()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn renormalized(self) -> Su2 {
        let n = self.norm();
        Su2 {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    /// Euclidean dot product of the quaternion components.
    pub fn dot(&self, o: &Su2) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Hamilton product `self ∘ o` (apply `o` first), renormalized.
    pub fn compose(&self, o: &Su2) -> Su2 {
        let (a, b) = (self, o);
        Su2 {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
        .renormalized()
    }

    /// Inverse (the Hermitian adjoint of the matrix).
    pub fn inverse(&self) -> Su2 {
        Su2 {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// The 2×2 complex matrix, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let Su2 { w, x, y, z } = *self;
        [
            [Complex64::new(w, -z), Complex64::new(-y, -x)],
            [Complex64::new(y, -x), Complex64::new(w, z)],
        ]
    }

    /// Action on a spinor: `U·(α, β)`.
    pub fn apply(&self, s: &Spinor) -> Spinor {
        let m = self.matrix();
        Spinor {
            alpha: m[0][0] * s.alpha + m[0][1] * s.beta,
            beta: m[1][0] * s.alpha + m[1][1] * s.beta,
        }
    }

    /// Rotation axis and angle in `[0, 2π]`; the axis is `ẑ` for the identity.
    pub fn axis_angle(&self) -> (Vec3, f64) {
        let v = Vec3::new(self.x, self.y, self.z);
        let s = v.norm();
        let angle = 2.0 * s.atan2(self.w);
        match v.normalized() {
            Some(axis) if s > 0.0 => (axis, angle),
            _ => (Vec3::Z, angle),
        }
    }

    /// The two-to-one map onto SO(3); `u` and `−u` project identically.
    pub fn project(&self) -> So3 {
        let Su2 { w, x, y, z } = *self;
        So3 {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }
}

impl Neg for Su2 {
    type Output = Su2;
    fn neg(self) -> Su2 {
        Su2 {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl Mul for Su2 {
    type Output = Su2;
    fn mul(self, o: Su2) -> Su2 {
        self.compose(&o)
    }
}

/// Proper rotation of the physical ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3 {
    pub m: [[f64; 3]; 3],
}

impl So3 {
    pub const IDENTITY: So3 = So3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Rodrigues rotation by `angle` about `axis` (right-handed).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<So3> {
        let n = axis.require_unit()?;
        if !angle.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Ok(So3 {
            m: [
                [
                    c + t * n.x * n.x,
                    t * n.x * n.y - s * n.z,
                    t * n.x * n.z + s * n.y,
                ],
                [
                    t * n.y * n.x + s * n.z,
                    c + t * n.y * n.y,
                    t * n.y * n.z - s * n.x,
                ],
                [
                    t * n.z * n.x - s * n.y,
                    t * n.z * n.y + s * n.x,
                    c + t * n.z * n.z,
                ],
            ],
        })
    }

    /// Matrix product `self · o` (apply `o` first).
    pub fn compose(&self, o: &So3) -> So3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        So3 { m }.orthonormalized()
    }

    pub fn transpose(&self) -> So3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[j][i];
            }
        }
        So3 { m }
    }

    pub fn rotate(&self, v: Vec3) -> Vec3 {
        let r = |i: usize| self.m[i][0] * v.x + self.m[i][1] * v.y + self.m[i][2] * v.z;
        Vec3::new(r(0), r(1), r(2))
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Frobenius distance between two matrices.
    pub fn distance(&self, o: &So3) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = self.m[i][j] - o.m[i][j];
                acc += d * d;
            }
        }
        acc.sqrt()
    }

    /// Unit quaternion with `w ≥ 0` projecting onto this rotation.
    pub fn to_quaternion(&self) -> Su2 {
        let m = &self.m;
        let trace = m[0][0] + m[1][1] + m[2][2];
        // Shepperd: branch on the largest diagonal term for stability.
        let q = if trace > m[0][0].max(m[1][1]).max(m[2][2]) {
            let s = 2.0 * (1.0 + trace).sqrt();
            Su2 {
                w: 0.25 * s,
                x: (m[2][1] - m[1][2]) / s,
                y: (m[0][2] - m[2][0]) / s,
                z: (m[1][0] - m[0][1]) / s,
            }
        } else if m[0][0] >= m[1][1] && m[0][0] >= m[2][2] {
            let s = 2.0 * (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt();
            Su2 {
                w: (m[2][1] - m[1][2]) / s,
                x: 0.25 * s,
                y: (m[0][1] + m[1][0]) / s,
                z: (m[0][2] + m[2][0]) / s,
            }
        } else if m[1][1] >= m[2][2] {
            let s = 2.0 * (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt();
            Su2 {
                w: (m[0][2] - m[2][0]) / s,
                x: (m[0][1] + m[1][0]) / s,
                y: 0.25 * s,
                z: (m[1][2] + m[2][1]) / s,
            }
        } else {
            let s = 2.0 * (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt();
            Su2 {
                w: (m[1][0] - m[0][1]) / s,
                x: (m[0][2] + m[2][0]) / s,
                y: (m[1][2] + m[2][1]) / s,
                z: 0.25 * s,
            }
        };
        let q = q.renormalized();
        if q.w < 0.0 {
            -q
        } else {
            q
        }
    }

    /// Re-orthonormalizes through the quaternion route.
    fn orthonormalized(self) -> So3 {
        self.to_quaternion().project()
    }

    /// Axis and angle in `[0, π]` of the rotation taking `self` to `other`,
    /// i.e. `R(axis, angle) · self = other`.
    pub fn relative(&self, other: &So3) -> Result<(Vec3, f64)> {
        let delta = other.compose_raw(&self.transpose());
        let (axis, angle) = delta.to_quaternion().axis_angle();
        if (std::f64::consts::PI - angle).abs() <= AMBIGUITY_TOL {
            return Err(Error::AmbiguousRelativeRotation { angle });
        }
        Ok((axis, angle))
    }

    fn compose_raw(&self, o: &So3) -> So3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        So3 { m }
    }
}

impl Mul for So3 {
    type Output = So3;
    fn mul(self, o: So3) -> So3 {
        self.compose(&o)
    }
}

/// Normalized pair of amplitudes `α|↑⟩ + β|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Spinor {
    pub const UP: Spinor = Spinor {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
    };
    pub const DOWN: Spinor = Spinor {
        alpha: Complex64::new(0.0, 0.0),
        beta: Complex64::new(1.0, 0.0),
    };

    /// Validating constructor; the amplitudes are stored verbatim.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Spinor> {
        let s = Spinor { alpha, beta };
        let n = s.norm_sqr();
        if !n.is_finite() {
            return Err(Error::NonFinite("spinor"));
        }
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::UnnormalizedSpinor { norm_sq: n });
        }
        Ok(s)
    }

    /// Scales arbitrary nonzero amplitudes onto the unit sphere.
    pub fn normalize(alpha: Complex64, beta: Complex64) -> Result<Spinor> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::UnnormalizedSpinor { norm_sq: n * n });
        }
        Ok(Spinor {
            alpha: alpha / n,
            beta: beta / n,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// `⟨self|o⟩`.
    pub fn inner(&self, o: &Spinor) -> Complex64 {
        self.alpha.conj() * o.alpha + self.beta.conj() * o.beta
    }

    pub fn scale(&self, c: Complex64) -> Spinor {
        Spinor {
            alpha: self.alpha * c,
            beta: self.beta * c,
        }
    }

    /// Largest componentwise modulus difference.
    pub fn distance(&self, o: &Spinor) -> f64 {
        (self.alpha - o.alpha).norm().max((self.beta - o.beta).norm())
    }
}

impl Default for Spinor {
    fn default() -> Self {
        Spinor::UP
    }
}

impl Serialize for Spinor {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        [[self.alpha.re, self.alpha.im], [self.beta.re, self.beta.im]].serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Spinor {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let [[ar, ai], [br, bi]] = <[[f64; 2]; 2]>::deserialize(de)?;
        Ok(Spinor {
            alpha: Complex64::new(ar, ai),
            beta: Complex64::new(br, bi),
        })
    }
}
