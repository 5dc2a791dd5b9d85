//! Writes order-type database files (`otypesNN.b08` / `otypesNN.b16`): one
//! realizing point set per order type of `n` points, mirror images
//! identified, as fixed-size records of unsigned coordinates. Two-byte
//! coordinates are written little-endian.

mod canon;
mod enumerate;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;
use log::info;
use seplines::otdb::{database_file_name, CoordWidth};

use crate::enumerate::{Level, Resolution};

/// Known numbers of order types of n points in general position, n = 3..=9.
const KNOWN_COUNTS: [(usize, usize); 7] = [
    (3, 1),
    (4, 2),
    (5, 3),
    (6, 16),
    (7, 135),
    (8, 3315),
    (9, 158_817),
];

#[derive(Parser)]
#[command(about = "Enumerate order types of small planar point sets and write database files")]
struct Args {
    /// Output directory.
    #[arg(long, default_value = "data")]
    out: PathBuf,
    /// Largest point count to generate (3..=9).
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Realizations kept per order type as parents for the next size.
    #[arg(long, default_value_t = 20)]
    keep: usize,
    /// Perturbed copies of each parent tried when extending to 9 points.
    #[arg(long, default_value_t = 0)]
    variants: usize,
    /// Extra rounds of extension to 9 points, run while the count is below
    /// the known value: first from finer-scaled parents, then from
    /// realizations found so far with one point removed.
    #[arg(long, default_value_t = 8)]
    rounds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write files even if a count differs from the known value.
    #[arg(long)]
    force: bool,
}

fn write_level(args: &Args, level: &Level) -> Result<()> {
    let n = level.n;
    let width = CoordWidth::for_n(n);
    let path = args.out.join(database_file_name(n));
    let mut bytes = Vec::with_capacity(level.len() * 2 * n * width.bytes());
    for realizations in level.types.values() {
        for &[x, y] in &realizations[0] {
            for c in [x, y] {
                match width {
                    CoordWidth::U8 => {
                        bytes.push(u8::try_from(c).context("coordinate exceeds one byte")?)
                    }
                    CoordWidth::U16 => bytes.extend_from_slice(
                        &u16::try_from(c)
                            .context("coordinate exceeds two bytes")?
                            .to_le_bytes(),
                    ),
                }
            }
        }
    }
    fs::File::create(&path)
        .and_then(|mut f| f.write_all(&bytes))
        .with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {} ({} records)", path.display(), level.len());
    Ok(())
}

fn known_count(n: usize) -> Option<usize> {
    KNOWN_COUNTS.iter().find(|(m, _)| *m == n).map(|&(_, c)| c)
}

fn check_count(args: &Args, level: &Level) -> Result<()> {
    let expected = known_count(level.n);
    println!(
        "n = {}: {} order types (expected {})",
        level.n,
        level.len(),
        expected.unwrap_or(0)
    );
    if expected != Some(level.len()) && !args.force {
        bail!(
            "order type count for n = {} is {}, expected {:?}",
            level.n,
            level.len(),
            expected
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::init();
    let args = Args::parse();
    if !(3..=9).contains(&args.max_n) {
        bail!("--max-n must be in 3..=9");
    }
    fs::create_dir_all(&args.out)?;
    let mut rng = enumerate::rng(args.seed);

    let mut level = enumerate::triangles(256, args.keep, &mut rng);
    check_count(&args, &level)?;
    write_level(&args, &level)?;
    while level.n < args.max_n {
        level = if level.n < 8 {
            enumerate::extend_on_grid(&level, 256, args.keep, &mut rng)
        } else {
            let mut next = Level::new(level.n + 1);
            enumerate::extend_by_arrangement(
                &level,
                &mut next,
                Resolution::Coarse,
                args.variants,
                true,
                &mut rng,
            );
            let expected = known_count(next.n);
            for round in 0..args.rounds {
                if expected.is_some_and(|c| next.len() >= c) {
                    break;
                }
                info!("round {}: {} order types so far", round + 1, next.len());
                if round == 0 {
                    enumerate::extend_by_arrangement(
                        &level,
                        &mut next,
                        Resolution::Fine,
                        0,
                        true,
                        &mut rng,
                    );
                } else {
                    enumerate::extend_by_deletion(&mut next, &mut rng);
                }
            }
            next
        };
        check_count(&args, &level)?;
        write_level(&args, &level)?;
    }
    Ok(())
}
