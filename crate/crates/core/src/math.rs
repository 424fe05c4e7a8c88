//! Small f64 vector/ray/box toolkit for world-space geometry.
//!
//! Everything downstream (traversal, culling, depth encoding) is specified to
//! be bit-deterministic, so all geometry math runs in f64 with no SIMD or
//! fast-math shortcuts.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    pub const ZERO: Vec3 = vec3(0.0, 0.0, 0.0);

    pub fn splat(v: f64) -> Vec3 {
        vec3(v, v, v)
    }

    pub fn axis(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {i} out of range"),
        }
    }

    pub fn with_axis(mut self, i: usize, v: f64) -> Vec3 {
        match i {
            0 => self.x = v,
            1 => self.y = v,
            2 => self.z = v,
            _ => panic!("axis index {i} out of range"),
        }
        self
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn length_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn length(self) -> f64 {
        self.length_squared().sqrt()
    }

    /// Unit vector; panics on a zero-length input.
    pub fn normalized(self) -> Vec3 {
        let len = self.length();
        assert!(len > 0.0, "cannot normalize a zero vector");
        self / len
    }

    pub fn abs(self) -> Vec3 {
        vec3(self.x.abs(), self.y.abs(), self.z.abs())
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        vec3(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        vec3(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    /// Index of the component with the largest magnitude (ties pick the
    /// earliest axis).
    pub fn dominant_axis(self) -> usize {
        let a = self.abs();
        if a.x >= a.y && a.x >= a.z {
            0
        } else if a.y >= a.z {
            1
        } else {
            2
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        vec3(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        vec3(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        vec3(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        vec3(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        vec3(self.x / s, self.y / s, self.z / s)
    }
}

/// Ray with an arbitrary (not necessarily unit) direction. The parameter `t`
/// is measured in units of `dir`, so callers that need world-unit parameters
/// pass a unit direction or scale origin and direction together.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3) -> Ray {
        Ray { origin, dir }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// Axis-aligned box, closed on both ends for intersection purposes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Aabb {
        Aabb { min, max }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    /// Half-open containment test: min <= p < max per axis. Used for region
    /// ownership so a point on a shared face belongs to exactly one box.
    pub fn contains_half_open(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x < self.max.x
            && p.y >= self.min.y
            && p.y < self.max.y
            && p.z >= self.min.z
            && p.z < self.max.z
    }

    /// Euclidean distance from `p` to the box (0 when inside).
    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        let dz = (self.min.z - p.z).max(0.0).max(p.z - self.max.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Slab intersection clipped to `[t_lo, t_hi]`. Returns the clipped
    /// `(t_enter, t_exit)` interval when non-empty.
    pub fn intersect_ray(&self, ray: &Ray, t_lo: f64, t_hi: f64) -> Option<(f64, f64)> {
        let (enter, exit, _) = slab_interval(self.min, self.max, ray)?;
        let enter_c = enter.max(t_lo);
        let exit_c = exit.min(t_hi);
        if enter_c <= exit_c {
            Some((enter_c, exit_c))
        } else {
            None
        }
    }
}

/// Unclipped slab interval plus the axis whose slab bounds the entry
/// (the face the ray crosses when it enters the box). Returns `None` when the
/// ray misses the slab volume entirely, including rays parallel to an axis
/// and outside that slab.
pub fn slab_interval(min: Vec3, max: Vec3, ray: &Ray) -> Option<(f64, f64, usize)> {
    let mut enter = f64::NEG_INFINITY;
    let mut exit = f64::INFINITY;
    let mut enter_axis = 0usize;
    for axis in 0..3 {
        let o = ray.origin.axis(axis);
        let d = ray.dir.axis(axis);
        let lo = min.axis(axis);
        let hi = max.axis(axis);
        if d == 0.0 {
            if o < lo || o > hi {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d;
        let (mut t0, mut t1) = ((lo - o) * inv, (hi - o) * inv);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0 > enter {
            enter = t0;
            enter_axis = axis;
        }
        if t1 < exit {
            exit = t1;
        }
        if enter > exit {
            return None;
        }
    }
    Some((enter, exit, enter_axis))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_hits_and_misses() {
        let min = vec3(0.0, 0.0, 0.0);
        let max = vec3(4.0, 4.0, 4.0);
        let r = Ray::new(vec3(-1.0, 2.0, 2.0), vec3(1.0, 0.0, 0.0));
        let (t0, t1, axis) = slab_interval(min, max, &r).unwrap();
        assert_eq!((t0, t1, axis), (1.0, 5.0, 0));

        let miss = Ray::new(vec3(-1.0, 5.0, 2.0), vec3(1.0, 0.0, 0.0));
        assert!(slab_interval(min, max, &miss).is_none());
    }

    #[test]
    fn aabb_point_distance() {
        let b = Aabb::new(vec3(0.0, 0.0, 0.0), vec3(1.0, 1.0, 1.0));
        assert_eq!(b.distance_to_point(vec3(0.5, 0.5, 0.5)), 0.0);
        assert_eq!(b.distance_to_point(vec3(2.0, 0.5, 0.5)), 1.0);
        let d = b.distance_to_point(vec3(2.0, 2.0, 0.5));
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn dominant_axis_prefers_earlier_on_ties() {
        assert_eq!(vec3(1.0, -1.0, 0.5).dominant_axis(), 0);
        assert_eq!(vec3(0.1, -2.0, 2.0).dominant_axis(), 1);
        assert_eq!(vec3(0.0, 0.0, -3.0).dominant_axis(), 2);
    }
}
