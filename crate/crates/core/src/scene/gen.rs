//! Deterministic procedural scene generators.
//!
//! Every generator is a pure function of `(SceneSpec, WorldConfig)`: the same
//! spec and seed always produce a bit-identical world. Terrain noise is a
//! hash-based value noise rather than any particular library so that output
//! never drifts across dependency upgrades.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DenseWorld, SceneError, WorldConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SceneKind {
    /// Axis-aligned solid box of voxels at a global LOD-0 origin.
    SolidBox { origin: [u32; 3], extent: [u32; 3] },
    /// Menger sponge of the given level over a `3^level`-edge cube at the
    /// world origin. Occupies exactly `20^level` voxels.
    Menger { level: u32 },
    /// Value-noise heightfield filling columns from y=0 up to the sampled
    /// height.
    Terrain { amplitude: f64, frequency: f64 },
    /// Ground slab plus randomly placed colored boxes.
    BoxesCity {
        count: u32,
        min_size: u32,
        max_size: u32,
    },
}

/// Generator selector plus the seed that fixes all of its random choices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub kind: SceneKind,
}

impl SceneSpec {
    pub fn new(seed: u64, kind: SceneKind) -> SceneSpec {
        SceneSpec { seed, kind }
    }
}

/// Parse a compact CLI form: `kind:key=value,key=value`.
///
/// Examples: `solid_box:origin=4x0x4,extent=24x16x24`, `menger:level=3`,
/// `terrain:amplitude=24,frequency=0.03`,
/// `boxes_city:count=40,min_size=3,max_size=10`. The seed is supplied
/// separately (CLI `--seed`), so `FromStr` yields a `SceneKind`.
impl FromStr for SceneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, r),
            None => (s, ""),
        };
        let mut args = std::collections::BTreeMap::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            args.insert(k.trim().to_string(), v.trim().to_string());
        }
        let triple = |key: &str, default: [u32; 3]| -> Result<[u32; 3], String> {
            match args.get(key) {
                None => Ok(default),
                Some(v) => {
                    let parts: Vec<&str> = v.split('x').collect();
                    let parse = |s: &str| s.parse::<u32>().map_err(|e| format!("{key}: {e}"));
                    match parts.as_slice() {
                        [a] => {
                            let n = parse(a)?;
                            Ok([n, n, n])
                        }
                        [a, b, c] => Ok([parse(a)?, parse(b)?, parse(c)?]),
                        _ => Err(format!("{key}: expected N or AxBxC, got `{v}`")),
                    }
                }
            }
        };
        let num_u32 = |key: &str, default: u32| -> Result<u32, String> {
            args.get(key)
                .map(|v| v.parse::<u32>().map_err(|e| format!("{key}: {e}")))
                .unwrap_or(Ok(default))
        };
        let num_f64 = |key: &str, default: f64| -> Result<f64, String> {
            args.get(key)
                .map(|v| v.parse::<f64>().map_err(|e| format!("{key}: {e}")))
                .unwrap_or(Ok(default))
        };
        match kind {
            "solid_box" => Ok(SceneKind::SolidBox {
                origin: triple("origin", [0, 0, 0])?,
                extent: triple("extent", [8, 8, 8])?,
            }),
            "menger" => Ok(SceneKind::Menger {
                level: num_u32("level", 3)?,
            }),
            "terrain" => Ok(SceneKind::Terrain {
                amplitude: num_f64("amplitude", 16.0)?,
                frequency: num_f64("frequency", 0.05)?,
            }),
            "boxes_city" => Ok(SceneKind::BoxesCity {
                count: num_u32("count", 32)?,
                min_size: num_u32("min_size", 3)?,
                max_size: num_u32("max_size", 10)?,
            }),
            other => Err(format!(
                "unknown scene kind `{other}` (expected solid_box|menger|terrain|boxes_city)"
            )),
        }
    }
}

/// Generate the dense LOD-0 world for a spec. Only non-empty chunks are
/// materialized.
pub fn generate(spec: &SceneSpec, config: &WorldConfig) -> Result<DenseWorld, SceneError> {
    config.validate()?;
    let mut world = DenseWorld::new(*config);
    let dims = config.global_voxel_dims();
    match spec.kind {
        SceneKind::SolidBox { origin, extent } => {
            for a in 0..3 {
                if origin[a].checked_add(extent[a]).map_or(true, |e| e > dims[a]) {
                    return Err(SceneError::OutOfBounds(format!(
                        "solid_box origin {origin:?} + extent {extent:?} exceeds {dims:?}"
                    )));
                }
            }
            for z in origin[2]..origin[2] + extent[2] {
                for y in origin[1]..origin[1] + extent[1] {
                    for x in origin[0]..origin[0] + extent[0] {
                        world.set_global([x, y, z], box_band_color(y));
                    }
                }
            }
        }
        SceneKind::Menger { level } => {
            if level > 8 {
                return Err(SceneError::OutOfBounds(format!(
                    "menger level {level} too deep"
                )));
            }
            let edge = 3u32.pow(level);
            if dims.iter().any(|&d| edge > d) {
                return Err(SceneError::OutOfBounds(format!(
                    "menger edge {edge} exceeds world {dims:?}"
                )));
            }
            for z in 0..edge {
                for y in 0..edge {
                    for x in 0..edge {
                        if menger_occupied(x, y, z, level) {
                            world.set_global([x, y, z], menger_color(x, y, z, spec.seed));
                        }
                    }
                }
            }
        }
        SceneKind::Terrain {
            amplitude,
            frequency,
        } => {
            if !(amplitude.is_finite() && amplitude >= 0.0 && frequency.is_finite() && frequency > 0.0)
            {
                return Err(SceneError::OutOfBounds(format!(
                    "terrain amplitude {amplitude} / frequency {frequency} invalid"
                )));
            }
            let base = dims[1] as f64 * 0.35;
            for z in 0..dims[2] {
                for x in 0..dims[0] {
                    let n = fbm2(spec.seed, x as f64 * frequency, z as f64 * frequency, 4);
                    let h = (base + amplitude * n).round().clamp(1.0, dims[1] as f64) as u32;
                    for y in 0..h {
                        world.set_global([x, y, z], terrain_color(x, y, z, h, dims[1], spec.seed));
                    }
                }
            }
        }
        SceneKind::BoxesCity {
            count,
            min_size,
            max_size,
        } => {
            if min_size == 0 || min_size > max_size || dims.iter().any(|&d| max_size > d) {
                return Err(SceneError::OutOfBounds(format!(
                    "boxes_city sizes [{min_size}, {max_size}] invalid for world {dims:?}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            // Thin ground slab so the scene is connected.
            let ground = 2.min(dims[1]);
            for z in 0..dims[2] {
                for y in 0..ground {
                    for x in 0..dims[0] {
                        world.set_global([x, y, z], [84, 90, 96]);
                    }
                }
            }
            for _ in 0..count {
                let size: [u32; 3] =
                    std::array::from_fn(|_| rng.gen_range(min_size..=max_size));
                let pos: [u32; 3] =
                    std::array::from_fn(|a| rng.gen_range(0..=(dims[a] - size[a])));
                let color = CITY_PALETTE[rng.gen_range(0..CITY_PALETTE.len())];
                for z in pos[2]..pos[2] + size[2] {
                    for y in pos[1]..pos[1] + size[1] {
                        for x in pos[0]..pos[0] + size[0] {
                            world.set_global([x, y, z], color);
                        }
                    }
                }
            }
        }
    }
    Ok(world)
}

const CITY_PALETTE: [[u8; 3]; 8] = [
    [196, 84, 72],
    [212, 170, 96],
    [96, 148, 196],
    [116, 180, 110],
    [180, 120, 190],
    [230, 220, 200],
    [90, 90, 110],
    [240, 160, 60],
];

fn box_band_color(y: u32) -> [u8; 3] {
    if (y / 4) % 2 == 0 {
        [188, 72, 56]
    } else {
        [214, 168, 70]
    }
}

/// A cell is removed when at least two of its base-3 digits are 1 at any
/// digit position.
fn menger_occupied(mut x: u32, mut y: u32, mut z: u32, level: u32) -> bool {
    for _ in 0..level {
        let ones = (x % 3 == 1) as u32 + (y % 3 == 1) as u32 + (z % 3 == 1) as u32;
        if ones >= 2 {
            return false;
        }
        x /= 3;
        y /= 3;
        z /= 3;
    }
    true
}

fn menger_color(x: u32, y: u32, z: u32, seed: u64) -> [u8; 3] {
    let h = hash3(seed, x as u64, y as u64, z as u64 ^ 0x6d65);
    let band = ((x + y + z) % 5) as usize;
    let palette: [[u8; 3]; 5] = [
        [222, 196, 140],
        [196, 150, 100],
        [170, 120, 86],
        [214, 178, 120],
        [150, 104, 78],
    ];
    let mut c = palette[band];
    // Small per-voxel jitter keeps color blocks from being trivially uniform.
    c[0] = (c[0] as i32 + ((h & 7) as i32 - 3)).clamp(0, 255) as u8;
    c
}

fn terrain_color(x: u32, y: u32, z: u32, h: u32, world_h: u32, seed: u64) -> [u8; 3] {
    let j = (hash3(seed ^ 0x7465, x as u64, y as u64, z as u64) & 7) as i32 - 3;
    let jit = |c: [u8; 3]| -> [u8; 3] {
        std::array::from_fn(|i| (c[i] as i32 + j).clamp(0, 255) as u8)
    };
    let snow_line = (world_h as f64 * 0.75) as u32;
    if y + 1 == h {
        if h >= snow_line {
            jit([235, 238, 242]) // snow cap
        } else {
            jit([88, 160, 66]) // grass
        }
    } else if y + 4 >= h {
        jit([134, 96, 60]) // dirt
    } else {
        jit([120, 120, 126]) // stone
    }
}

// splitmix64; stable, dependency-free bit mixing for noise lattices.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn hash3(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    splitmix64(seed ^ splitmix64(a ^ splitmix64(b ^ splitmix64(c))))
}

/// Lattice value in [-1, 1].
fn lattice(seed: u64, ix: i64, iz: i64) -> f64 {
    let h = hash3(seed, ix as u64, iz as u64, 0x6c61);
    (h >> 11) as f64 / ((1u64 << 53) as f64) * 2.0 - 1.0
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Bilinear value noise in [-1, 1].
fn noise2(seed: u64, x: f64, z: f64) -> f64 {
    let x0 = x.floor();
    let z0 = z.floor();
    let tx = smoothstep(x - x0);
    let tz = smoothstep(z - z0);
    let (ix, iz) = (x0 as i64, z0 as i64);
    let v00 = lattice(seed, ix, iz);
    let v10 = lattice(seed, ix + 1, iz);
    let v01 = lattice(seed, ix, iz + 1);
    let v11 = lattice(seed, ix + 1, iz + 1);
    let a = v00 + (v10 - v00) * tx;
    let b = v01 + (v11 - v01) * tx;
    a + (b - a) * tz
}

/// Octave-summed value noise, normalized back into [-1, 1].
fn fbm2(seed: u64, x: f64, z: f64, octaves: u32) -> f64 {
    let mut sum = 0.0;
    let mut amp = 1.0;
    let mut norm = 0.0;
    let mut fx = x;
    let mut fz = z;
    for o in 0..octaves {
        sum += amp * noise2(seed.wrapping_add(o as u64 * 0x9e37), fx, fz);
        norm += amp;
        amp *= 0.5;
        fx *= 2.0;
        fz *= 2.0;
    }
    sum / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(res: u32, dims: [u32; 3]) -> WorldConfig {
        WorldConfig::new(res, 1.0, dims).unwrap()
    }

    #[test]
    fn solid_box_counts_exactly() {
        let spec = SceneSpec::new(
            0,
            SceneKind::SolidBox {
                origin: [2, 2, 2],
                extent: [8, 8, 8],
            },
        );
        let w = generate(&spec, &cfg(16, [1, 1, 1])).unwrap();
        assert_eq!(w.total_occupied(), 512);
    }

    #[test]
    fn solid_box_out_of_bounds_errors() {
        let spec = SceneSpec::new(
            0,
            SceneKind::SolidBox {
                origin: [12, 0, 0],
                extent: [8, 8, 8],
            },
        );
        assert!(matches!(
            generate(&spec, &cfg(16, [1, 1, 1])),
            Err(SceneError::OutOfBounds(_))
        ));
    }

    #[test]
    fn menger_closed_form_counts() {
        for level in 0..=2u32 {
            let spec = SceneSpec::new(3, SceneKind::Menger { level });
            let w = generate(&spec, &cfg(16, [1, 1, 1])).unwrap();
            assert_eq!(w.total_occupied(), 20u64.pow(level), "level {level}");
        }
    }

    #[test]
    fn terrain_is_deterministic_and_bounded() {
        let spec = SceneSpec::new(
            7,
            SceneKind::Terrain {
                amplitude: 6.0,
                frequency: 0.11,
            },
        );
        let c = cfg(16, [2, 1, 2]);
        let a = generate(&spec, &c).unwrap();
        let b = generate(&spec, &c).unwrap();
        assert_eq!(a.total_occupied(), b.total_occupied());
        for (ka, ca) in a.chunkify() {
            let cb = b.chunk(&ka).expect("same chunk set");
            assert_eq!(ca, cb);
        }
        // Every column has at least bedrock and stays within the world.
        let dims = c.global_voxel_dims();
        for z in 0..dims[2] {
            for x in 0..dims[0] {
                assert_eq!(a.query_global([x, 0, z]).unwrap().is_some(), true);
            }
        }
    }

    #[test]
    fn boxes_city_seeds_differ() {
        let c = cfg(16, [2, 1, 2]);
        let kind = SceneKind::BoxesCity {
            count: 10,
            min_size: 2,
            max_size: 5,
        };
        let a = generate(&SceneSpec::new(1, kind), &c).unwrap();
        let b = generate(&SceneSpec::new(2, kind), &c).unwrap();
        let a2 = generate(&SceneSpec::new(1, kind), &c).unwrap();
        assert_eq!(a.total_occupied(), a2.total_occupied());
        assert_ne!(
            (a.total_occupied(), a.chunk_count()),
            (b.total_occupied(), b.chunk_count())
        );
    }

    #[test]
    fn scene_kind_parsing() {
        assert_eq!(
            "solid_box:origin=1x2x3,extent=4".parse::<SceneKind>().unwrap(),
            SceneKind::SolidBox {
                origin: [1, 2, 3],
                extent: [4, 4, 4]
            }
        );
        assert_eq!(
            "menger:level=2".parse::<SceneKind>().unwrap(),
            SceneKind::Menger { level: 2 }
        );
        assert!("fractal:level=2".parse::<SceneKind>().is_err());
        assert!("menger:level=x".parse::<SceneKind>().is_err());
    }
}
