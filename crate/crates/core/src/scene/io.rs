//! Raw dense world import/export.
//!
//! Format `AOKD` version 1, little-endian throughout:
//!
//! ```text
//! magic          4 bytes  "AOKD"
//! version        u32      1
//! chunk_res      u32
//! voxel_size     f64
//! world_dims     3 x u32
//! chunk_count    u32
//! per chunk:
//!   cx, cy, cz   3 x u32  LOD-0 chunk coordinates
//!   run_count    u32
//!   runs         run_count x u32; alternating empty/occupied run lengths
//!                over the chunk's linear voxel order (x fastest, then y,
//!                then z), starting with an empty run (possibly 0); runs sum
//!                to chunk_res^3
//!   colors       3 bytes per occupied voxel, linear order
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{ChunkKey, DenseChunk, DenseWorld, WorldConfig};

pub const DENSE_MAGIC: [u8; 4] = *b"AOKD";
pub const DENSE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SceneIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: expected AOKD")]
    BadMagic,
    #[error("unsupported version {0}")]
    BadVersion(u32),
    #[error("corrupt dense file: {0}")]
    Corrupt(String),
}

pub fn save_dense(world: &DenseWorld, path: &Path) -> Result<(), SceneIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&DENSE_MAGIC)?;
    w.write_all(&DENSE_VERSION.to_le_bytes())?;
    let cfg = &world.config;
    w.write_all(&cfg.chunk_res.to_le_bytes())?;
    w.write_all(&cfg.voxel_size.to_le_bytes())?;
    for d in cfg.world_dims {
        w.write_all(&d.to_le_bytes())?;
    }
    let chunks = world.chunkify();
    w.write_all(&(chunks.len() as u32).to_le_bytes())?;
    for (key, chunk) in chunks {
        for c in key.pos {
            w.write_all(&c.to_le_bytes())?;
        }
        let (runs, colors) = rle_encode(chunk);
        w.write_all(&(runs.len() as u32).to_le_bytes())?;
        for r in &runs {
            w.write_all(&r.to_le_bytes())?;
        }
        for c in &colors {
            w.write_all(c)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_dense(path: &Path) -> Result<DenseWorld, SceneIoError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != DENSE_MAGIC {
        return Err(SceneIoError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != DENSE_VERSION {
        return Err(SceneIoError::BadVersion(version));
    }
    let chunk_res = read_u32(&mut r)?;
    let voxel_size = f64::from_le_bytes(read_array::<8>(&mut r)?);
    let world_dims = [read_u32(&mut r)?, read_u32(&mut r)?, read_u32(&mut r)?];
    let config = WorldConfig::new(chunk_res, voxel_size, world_dims)
        .map_err(|e| SceneIoError::Corrupt(e.to_string()))?;
    let chunk_count = read_u32(&mut r)?;
    let mut world = DenseWorld::new(config);
    let cells = (chunk_res as u64).pow(3);
    for _ in 0..chunk_count {
        let pos = [read_u32(&mut r)?, read_u32(&mut r)?, read_u32(&mut r)?];
        let dims0 = config.dims_at(0);
        if (0..3).any(|a| pos[a] >= dims0[a]) {
            return Err(SceneIoError::Corrupt(format!(
                "chunk coordinate {pos:?} outside {dims0:?}"
            )));
        }
        let run_count = read_u32(&mut r)?;
        let mut runs = Vec::with_capacity(run_count as usize);
        let mut total = 0u64;
        let mut occupied = 0u64;
        for i in 0..run_count {
            let run = read_u32(&mut r)? as u64;
            total += run;
            if i % 2 == 1 {
                occupied += run;
            }
            runs.push(run as u32);
        }
        if total != cells {
            return Err(SceneIoError::Corrupt(format!(
                "runs sum to {total}, expected {cells}"
            )));
        }
        if occupied == 0 {
            return Err(SceneIoError::Corrupt("stored chunk is empty".into()));
        }
        let mut colors = vec![0u8; occupied as usize * 3];
        r.read_exact(&mut colors)?;
        let chunk = rle_decode(chunk_res, &runs, &colors);
        let base = [pos[0] * chunk_res, pos[1] * chunk_res, pos[2] * chunk_res];
        for (v, c) in chunk.iter_occupied() {
            world.set_global([base[0] + v[0], base[1] + v[1], base[2] + v[2]], c);
        }
        let _ = ChunkKey::lod0(pos);
    }
    Ok(world)
}

fn rle_encode(chunk: &DenseChunk) -> (Vec<u32>, Vec<[u8; 3]>) {
    let res = chunk.res();
    let mut runs = Vec::new();
    let mut colors = Vec::new();
    let mut current_occupied = false; // runs start with an empty run
    let mut run_len = 0u32;
    for z in 0..res {
        for y in 0..res {
            for x in 0..res {
                let occ = chunk.occupied_at([x, y, z]);
                if occ {
                    colors.push(chunk.get([x, y, z]).unwrap());
                }
                if occ == current_occupied {
                    run_len += 1;
                } else {
                    runs.push(run_len);
                    current_occupied = occ;
                    run_len = 1;
                }
            }
        }
    }
    runs.push(run_len);
    (runs, colors)
}

fn rle_decode(res: u32, runs: &[u32], colors: &[u8]) -> DenseChunk {
    let mut chunk = DenseChunk::new(res);
    let mut idx = 0u64;
    let mut color_idx = 0usize;
    for (i, &run) in runs.iter().enumerate() {
        let occupied = i % 2 == 1;
        for _ in 0..run {
            if occupied {
                let x = (idx % res as u64) as u32;
                let y = (idx / res as u64 % res as u64) as u32;
                let z = (idx / (res as u64 * res as u64)) as u32;
                let c = [
                    colors[color_idx * 3],
                    colors[color_idx * 3 + 1],
                    colors[color_idx * 3 + 2],
                ];
                chunk.set([x, y, z], c);
                color_idx += 1;
            }
            idx += 1;
        }
    }
    chunk
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, SceneIoError> {
    Ok(u32::from_le_bytes(read_array::<4>(r)?))
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N], SceneIoError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{generate, SceneKind, SceneSpec};

    #[test]
    fn dense_roundtrip() {
        let cfg = WorldConfig::new(16, 0.5, [2, 1, 2]).unwrap();
        let spec = SceneSpec::new(
            11,
            SceneKind::Terrain {
                amplitude: 5.0,
                frequency: 0.2,
            },
        );
        let world = generate(&spec, &cfg).unwrap();
        let dir = std::env::temp_dir().join("voxstream_dense_roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.aokd");
        save_dense(&world, &path).unwrap();
        let loaded = load_dense(&path).unwrap();
        assert_eq!(loaded.config, world.config);
        assert_eq!(loaded.chunk_count(), world.chunk_count());
        for (key, chunk) in world.chunkify() {
            assert_eq!(loaded.chunk(&key), Some(chunk));
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = std::env::temp_dir().join("voxstream_dense_badmagic");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.aokd");
        std::fs::write(&path, b"NOPE____________").unwrap();
        assert!(matches!(load_dense(&path), Err(SceneIoError::BadMagic)));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn truncated_file_is_rejected() {
        let cfg = WorldConfig::new(16, 1.0, [1, 1, 1]).unwrap();
        let spec = SceneSpec::new(
            0,
            SceneKind::SolidBox {
                origin: [0, 0, 0],
                extent: [4, 4, 4],
            },
        );
        let world = generate(&spec, &cfg).unwrap();
        let dir = std::env::temp_dir().join("voxstream_dense_trunc");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.aokd");
        save_dense(&world, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 7]).unwrap();
        assert!(matches!(load_dense(&path), Err(SceneIoError::Io(_))));
        std::fs::remove_file(&path).ok();
    }
}
