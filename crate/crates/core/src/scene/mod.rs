//! World/chunk coordinate systems, dense voxel storage, and procedural scene
//! generation.
//!
//! The world is a grid of axis-aligned cubic regions. Each region holds one
//! chunk of `chunk_res`^3 voxels; a chunk at LOD `n` covers a region that is
//! `2^n` times larger than a LOD-0 region at the same voxel resolution.

mod gen;
mod io;

pub use gen::{generate, SceneKind, SceneSpec};
pub use io::{load_dense, save_dense, SceneIoError};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{vec3, Aabb, Vec3};

/// Voxel coordinate local to a chunk, in `[0, chunk_res)` per axis.
pub type VoxelCoord = [u32; 3];

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid world config: {0}")]
    BadConfig(String),
    #[error("scene does not fit in world bounds: {0}")]
    OutOfBounds(String),
    #[error("voxel coordinate {0:?} outside world bounds {1:?}")]
    CoordOutOfBounds([u32; 3], [u32; 3]),
}

/// Global world layout: voxels per chunk edge, world size of a LOD-0 voxel,
/// and the number of LOD-0 chunks per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    /// Voxels per chunk edge. Power of two in `8..=256`.
    pub chunk_res: u32,
    /// World units spanned by one LOD-0 voxel.
    pub voxel_size: f64,
    /// LOD-0 chunk count per axis; each component a power of two.
    pub world_dims: [u32; 3],
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            chunk_res: 256,
            voxel_size: 1.0,
            world_dims: [1, 1, 1],
        }
    }
}

impl WorldConfig {
    pub fn new(chunk_res: u32, voxel_size: f64, world_dims: [u32; 3]) -> Result<Self, SceneError> {
        let cfg = WorldConfig {
            chunk_res,
            voxel_size,
            world_dims,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !matches!(self.chunk_res, 8 | 16 | 32 | 64 | 128 | 256) {
            return Err(SceneError::BadConfig(format!(
                "chunk_res must be a power of two in 8..=256, got {}",
                self.chunk_res
            )));
        }
        if !(self.voxel_size.is_finite() && self.voxel_size > 0.0) {
            return Err(SceneError::BadConfig(format!(
                "voxel_size must be positive, got {}",
                self.voxel_size
            )));
        }
        for d in self.world_dims {
            if d == 0 || !d.is_power_of_two() {
                return Err(SceneError::BadConfig(format!(
                    "world_dims components must be powers of two >= 1, got {:?}",
                    self.world_dims
                )));
            }
        }
        Ok(())
    }

    /// Number of LOD levels: `log2(max world_dims) + 1`. The top level has a
    /// single root chunk covering the whole world.
    pub fn lod_levels(&self) -> u8 {
        let max = self.world_dims.iter().copied().max().unwrap();
        max.trailing_zeros() as u8 + 1
    }

    /// Chunk-grid dimensions at a LOD level (at least 1 per axis so the root
    /// always exists even for non-cubic worlds).
    pub fn dims_at(&self, lod: u8) -> [u32; 3] {
        let d = self.world_dims;
        [
            (d[0] >> lod).max(1),
            (d[1] >> lod).max(1),
            (d[2] >> lod).max(1),
        ]
    }

    /// World edge length of a chunk region at `lod`.
    pub fn region_size(&self, lod: u8) -> f64 {
        self.chunk_res as f64 * self.voxel_size * (1u64 << lod) as f64
    }

    /// World size of one voxel of a chunk at `lod`.
    pub fn voxel_world_size(&self, lod: u8) -> f64 {
        self.voxel_size * (1u64 << lod) as f64
    }

    /// World-space region covered by a chunk.
    pub fn region_aabb(&self, key: ChunkKey) -> Aabb {
        let size = self.region_size(key.lod);
        let min = vec3(
            key.pos[0] as f64 * size,
            key.pos[1] as f64 * size,
            key.pos[2] as f64 * size,
        );
        Aabb::new(min, min + Vec3::splat(size))
    }

    /// World-space box of a voxel span `[vmin, vmax]` (inclusive) inside a
    /// chunk.
    pub fn voxel_span_aabb(&self, key: ChunkKey, vmin: VoxelCoord, vmax: VoxelCoord) -> Aabb {
        let vs = self.voxel_world_size(key.lod);
        let region = self.region_aabb(key);
        let min = region.min
            + vec3(
                vmin[0] as f64 * vs,
                vmin[1] as f64 * vs,
                vmin[2] as f64 * vs,
            );
        let max = region.min
            + vec3(
                (vmax[0] + 1) as f64 * vs,
                (vmax[1] + 1) as f64 * vs,
                (vmax[2] + 1) as f64 * vs,
            );
        Aabb::new(min, max)
    }

    /// Total LOD-0 voxel grid dimensions of the world.
    pub fn global_voxel_dims(&self) -> [u32; 3] {
        [
            self.world_dims[0] * self.chunk_res,
            self.world_dims[1] * self.chunk_res,
            self.world_dims[2] * self.chunk_res,
        ]
    }
}

/// Address of a chunk: LOD level plus chunk coordinates at that level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChunkKey {
    pub lod: u8,
    pub pos: [u32; 3],
}

impl ChunkKey {
    pub fn new(lod: u8, pos: [u32; 3]) -> ChunkKey {
        ChunkKey { lod, pos }
    }

    pub fn lod0(pos: [u32; 3]) -> ChunkKey {
        ChunkKey { lod: 0, pos }
    }

    pub fn parent(&self) -> Option<ChunkKey> {
        if self.lod == u8::MAX {
            return None;
        }
        Some(ChunkKey {
            lod: self.lod + 1,
            pos: [self.pos[0] >> 1, self.pos[1] >> 1, self.pos[2] >> 1],
        })
    }

    /// The eight child keys one level finer, in octant order
    /// `x | y<<1 | z<<2`.
    pub fn children(&self) -> [ChunkKey; 8] {
        assert!(self.lod > 0, "LOD-0 chunks have no children");
        std::array::from_fn(|o| {
            let o = o as u32;
            ChunkKey {
                lod: self.lod - 1,
                pos: [
                    self.pos[0] * 2 + (o & 1),
                    self.pos[1] * 2 + ((o >> 1) & 1),
                    self.pos[2] * 2 + ((o >> 2) & 1),
                ],
            }
        })
    }

    /// True when `self` strictly contains `other` in the implicit octree.
    pub fn is_ancestor_of(&self, other: &ChunkKey) -> bool {
        if self.lod <= other.lod {
            return false;
        }
        let shift = self.lod - other.lod;
        (0..3).all(|a| (other.pos[a] >> shift) == self.pos[a])
    }
}

/// Dense occupancy + color grid for one chunk region. Colors are meaningful
/// only at occupied voxels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseChunk {
    res: u32,
    occ: Vec<u64>,
    colors: Vec<[u8; 3]>,
    occupied: u32,
}

impl DenseChunk {
    pub fn new(res: u32) -> DenseChunk {
        assert!(res.is_power_of_two() && (8..=256).contains(&res));
        let cells = (res as usize).pow(3);
        DenseChunk {
            res,
            occ: vec![0u64; cells.div_ceil(64)],
            colors: vec![[0; 3]; cells],
            occupied: 0,
        }
    }

    pub fn res(&self) -> u32 {
        self.res
    }

    pub fn occupied_count(&self) -> u32 {
        self.occupied
    }

    pub fn is_empty(&self) -> bool {
        self.occupied == 0
    }

    fn index(&self, v: VoxelCoord) -> usize {
        debug_assert!(v.iter().all(|&c| c < self.res));
        ((v[2] * self.res + v[1]) * self.res + v[0]) as usize
    }

    pub fn occupied_at(&self, v: VoxelCoord) -> bool {
        let i = self.index(v);
        self.occ[i / 64] >> (i % 64) & 1 == 1
    }

    /// Color of an occupied voxel; `None` when empty.
    pub fn get(&self, v: VoxelCoord) -> Option<[u8; 3]> {
        if self.occupied_at(v) {
            Some(self.colors[self.index(v)])
        } else {
            None
        }
    }

    pub fn set(&mut self, v: VoxelCoord, color: [u8; 3]) {
        let i = self.index(v);
        let word = &mut self.occ[i / 64];
        let bit = 1u64 << (i % 64);
        if *word & bit == 0 {
            *word |= bit;
            self.occupied += 1;
        }
        self.colors[i] = color;
    }

    /// Inclusive voxel bounds of the occupied region; `None` for an empty
    /// chunk.
    pub fn occupied_bounds(&self) -> Option<(VoxelCoord, VoxelCoord)> {
        if self.is_empty() {
            return None;
        }
        let mut min = [u32::MAX; 3];
        let mut max = [0u32; 3];
        for (v, _) in self.iter_occupied() {
            for a in 0..3 {
                min[a] = min[a].min(v[a]);
                max[a] = max[a].max(v[a]);
            }
        }
        Some((min, max))
    }

    /// Iterate occupied voxels in linear-index order (x fastest).
    pub fn iter_occupied(&self) -> impl Iterator<Item = (VoxelCoord, [u8; 3])> + '_ {
        let res = self.res;
        (0..res).flat_map(move |z| {
            (0..res).flat_map(move |y| {
                (0..res).filter_map(move |x| self.get([x, y, z]).map(|c| ([x, y, z], c)))
            })
        })
    }
}

/// All non-empty LOD-0 chunks of a generated world.
#[derive(Clone, Debug, Default)]
pub struct DenseWorld {
    pub config: WorldConfig,
    chunks: BTreeMap<ChunkKey, DenseChunk>,
}

impl DenseWorld {
    pub fn new(config: WorldConfig) -> DenseWorld {
        DenseWorld {
            config,
            chunks: BTreeMap::new(),
        }
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }

    pub fn chunk(&self, key: &ChunkKey) -> Option<&DenseChunk> {
        self.chunks.get(key)
    }

    pub fn total_occupied(&self) -> u64 {
        self.chunks.values().map(|c| c.occupied_count() as u64).sum()
    }

    /// Insert a voxel at a global LOD-0 coordinate, materializing its chunk
    /// on first touch. Panics outside world bounds (generators pre-validate).
    pub fn set_global(&mut self, g: [u32; 3], color: [u8; 3]) {
        let dims = self.config.global_voxel_dims();
        assert!(
            (0..3).all(|a| g[a] < dims[a]),
            "voxel {g:?} outside world {dims:?}"
        );
        let res = self.config.chunk_res;
        let key = ChunkKey::lod0([g[0] / res, g[1] / res, g[2] / res]);
        let local = [g[0] % res, g[1] % res, g[2] % res];
        self.chunks
            .entry(key)
            .or_insert_with(|| DenseChunk::new(res))
            .set(local, color);
    }

    /// Exact readback of the generated world at a global LOD-0 coordinate.
    pub fn query_global(&self, g: [u32; 3]) -> Result<Option<[u8; 3]>, SceneError> {
        let dims = self.config.global_voxel_dims();
        if (0..3).any(|a| g[a] >= dims[a]) {
            return Err(SceneError::CoordOutOfBounds(g, dims));
        }
        let res = self.config.chunk_res;
        let key = ChunkKey::lod0([g[0] / res, g[1] / res, g[2] / res]);
        let local = [g[0] % res, g[1] % res, g[2] % res];
        Ok(self.chunk(&key).and_then(|c| c.get(local)))
    }

    /// Decompose the world into its per-chunk parts. One entry per non-empty
    /// chunk; the union of entries reproduces the world exactly.
    pub fn chunkify(&self) -> Vec<(ChunkKey, &DenseChunk)> {
        self.chunks.iter().map(|(k, c)| (*k, c)).collect()
    }

    /// Consume the world into an owned per-chunk map (pyramid build input).
    pub fn into_chunks(self) -> BTreeMap<ChunkKey, DenseChunk> {
        self.chunks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(WorldConfig::new(12, 1.0, [1, 1, 1]).is_err());
        assert!(WorldConfig::new(32, 0.0, [1, 1, 1]).is_err());
        assert!(WorldConfig::new(32, 1.0, [3, 1, 1]).is_err());
        let cfg = WorldConfig::new(32, 0.5, [4, 2, 4]).unwrap();
        assert_eq!(cfg.lod_levels(), 3);
        assert_eq!(cfg.dims_at(2), [1, 1, 1]);
        assert_eq!(cfg.region_size(1), 32.0);
    }

    #[test]
    fn chunk_key_tree_relations() {
        let parent = ChunkKey::new(1, [1, 0, 2]);
        let kids = parent.children();
        assert_eq!(kids[0], ChunkKey::new(0, [2, 0, 4]));
        assert_eq!(kids[7], ChunkKey::new(0, [3, 1, 5]));
        for k in kids {
            assert!(parent.is_ancestor_of(&k));
            assert_eq!(k.parent().unwrap(), parent);
        }
        assert!(!parent.is_ancestor_of(&parent));
        assert!(!parent.is_ancestor_of(&ChunkKey::new(0, [0, 0, 0])));
    }

    #[test]
    fn dense_chunk_set_get() {
        let mut c = DenseChunk::new(16);
        assert!(c.is_empty());
        c.set([3, 4, 5], [10, 20, 30]);
        c.set([3, 4, 5], [11, 21, 31]); // overwrite, count stays 1
        assert_eq!(c.occupied_count(), 1);
        assert_eq!(c.get([3, 4, 5]), Some([11, 21, 31]));
        assert_eq!(c.get([3, 4, 6]), None);
        assert_eq!(c.occupied_bounds(), Some(([3, 4, 5], [3, 4, 5])));
    }

    #[test]
    fn world_query_bounds() {
        let cfg = WorldConfig::new(16, 1.0, [2, 2, 2]).unwrap();
        let mut w = DenseWorld::new(cfg);
        w.set_global([17, 0, 0], [1, 2, 3]);
        assert_eq!(w.query_global([17, 0, 0]).unwrap(), Some([1, 2, 3]));
        assert_eq!(w.query_global([16, 0, 0]).unwrap(), None);
        assert!(w.query_global([32, 0, 0]).is_err());
        assert_eq!(w.chunk_count(), 1);
    }

    #[test]
    fn chunkify_is_exact_partition() {
        let cfg = WorldConfig::new(16, 1.0, [2, 1, 1]).unwrap();
        let mut w = DenseWorld::new(cfg);
        // A box spanning two chunks along x.
        for x in 12..20 {
            for y in 0..4 {
                for z in 0..4 {
                    w.set_global([x, y, z], [x as u8, y as u8, z as u8]);
                }
            }
        }
        let parts = w.chunkify();
        assert_eq!(parts.len(), 2);
        let total: u64 = parts.iter().map(|(_, c)| c.occupied_count() as u64).sum();
        assert_eq!(total, 8 * 4 * 4);
        // Per-voxel agreement between the dense scan and the chunk parts.
        for x in 0..32u32 {
            for y in 0..16u32 {
                for z in 0..16u32 {
                    let direct = w.query_global([x, y, z]).unwrap();
                    let key = ChunkKey::lod0([x / 16, y / 16, z / 16]);
                    let via_chunk = parts
                        .iter()
                        .find(|(k, _)| *k == key)
                        .and_then(|(_, c)| c.get([x % 16, y % 16, z % 16]));
                    assert_eq!(direct, via_chunk);
                }
            }
        }
    }
}
