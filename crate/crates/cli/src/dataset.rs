use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use trackfuse_core::dataset::{self, CorpusStats, Heatmap, VocDocument};
use trackfuse_core::formats::pgm;
use walkdir::WalkDir;

use crate::error::{write_file, CliError};

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory tree of Pascal VOC XML files.
    #[arg(long)]
    pub annotations: PathBuf,
    /// Leave out objects flagged as difficult.
    #[arg(long)]
    pub exclude_difficult: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// 16-bit PGM of per-pixel counts (clipped at 65535).
    #[arg(long)]
    pub output: PathBuf,
    /// Plain-text summary of the heatmap.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// 8-bit display image, counts scaled so the busiest pixel is white.
    #[arg(long)]
    pub display: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Directory receiving one `.txt` label file per XML file, mirroring the tree.
    #[arg(long)]
    pub output: PathBuf,
}

/// Sorted XML files under `root`, as (relative path, absolute path).
fn xml_files(root: &Path) -> Result<Vec<(PathBuf, PathBuf)>, CliError> {
    let mut out = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::Io(format!("{}: {e}", root.display())))?;
        let path = entry.path();
        if entry.file_type().is_file()
            && path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("xml"))
        {
            let rel = path.strip_prefix(root).unwrap_or(path).to_path_buf();
            out.push((rel, path.to_path_buf()));
        }
    }
    Ok(out)
}

fn load_one(path: &Path, exclude_difficult: bool) -> Result<VocDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut doc = dataset::parse_voc(&text).map_err(|e| CliError::format_in(path, e))?;
    if doc.image_id.is_empty() {
        doc.image_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for rec in &mut doc.objects {
            rec.image_id.clone_from(&doc.image_id);
        }
    }
    if exclude_difficult {
        doc.objects = dataset::without_difficult(&doc.objects);
    }
    Ok(doc)
}

/// Parses every annotation file in parallel; results keep path order.
fn load_corpus(args: &CorpusArgs) -> Result<Vec<(PathBuf, VocDocument)>, CliError> {
    xml_files(&args.annotations)?
        .into_par_iter()
        .map(|(rel, abs)| load_one(&abs, args.exclude_difficult).map(|d| (rel, d)))
        .collect()
}

pub fn stats(args: &StatsArgs) -> Result<(), CliError> {
    let docs = load_corpus(&args.corpus)?;
    let stats = docs.iter().fold(CorpusStats::default(), |acc, (_, d)| {
        acc.merge(&CorpusStats::from_image(&d.objects))
    });
    let json = serde_json::to_string_pretty(&stats).expect("stats serialize") + "\n";
    match &args.output {
        Some(path) => write_file(path, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

pub fn heatmap(args: &HeatmapArgs) -> Result<(), CliError> {
    let docs = load_corpus(&args.corpus)?;
    let map = docs
        .par_iter()
        .fold(Heatmap::new, |mut map, (_, d)| {
            d.objects.iter().for_each(|r| map.add(r));
            map
        })
        .reduce(Heatmap::new, |mut a, b| {
            a.merge(&b);
            a
        });
    let samples: Vec<u16> = map
        .counts()
        .iter()
        .map(|&c| c.min(u32::from(u16::MAX)) as u16)
        .collect();
    write_file(
        &args.output,
        pgm::write_u16(map.width(), map.height(), &samples),
    )?;

    if let Some(path) = &args.summary {
        let annotations: usize = docs.iter().map(|(_, d)| d.objects.len()).sum();
        let text = format!(
            "canvas: {}x{}\nimages: {}\nannotations: {}\ncovered_pixels: {}\nmax_count: {}\ntotal_count: {}\n",
            map.width(),
            map.height(),
            docs.len(),
            annotations,
            map.covered(),
            map.max(),
            map.total()
        );
        write_file(path, text)?;
    }
    if let Some(path) = &args.display {
        let max = f64::from(map.max().max(1));
        let data = map
            .counts()
            .iter()
            .map(|&c| (255.0 * f64::from(c) / max).round() as u8)
            .collect();
        let frame = trackfuse_core::FrameBuffer::new(map.width(), map.height(), data)
            .expect("canvas sized");
        write_file(path, pgm::write_frame(&frame))?;
    }
    Ok(())
}

pub fn convert(args: &ConvertArgs) -> Result<(), CliError> {
    let docs = load_corpus(&args.corpus)?;
    for (rel, doc) in &docs {
        let target = args.output.join(rel).with_extension("txt");
        write_file(&target, dataset::labels_file(&doc.objects))?;
    }
    Ok(())
}
