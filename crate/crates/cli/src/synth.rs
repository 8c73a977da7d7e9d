use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Context};
use discloc::annotation::{DatasetManifest, Label, ManifestImage};
use discloc::evaluation::GroundTruthLine;
use discloc::imaging::encode_png;
use discloc::synth::{Corpus, SynthConfig};

use crate::args::SynthArgs;
use crate::output::{jobs, to_jsonl, write_atomic, write_json};
use crate::Status;

pub fn synth(args: SynthArgs) -> anyhow::Result<Status> {
    if args.n == 0 {
        bail!("--n must be positive");
    }
    let corpus = Corpus::generate(args.n, args.seed, &SynthConfig::default());
    let image_dir = args.out.join("images");
    std::fs::create_dir_all(&image_dir).with_context(|| format!("cannot create {}", image_dir.display()))?;

    let next = AtomicUsize::new(0);
    let workers = jobs(args.jobs).min(args.n);
    std::thread::scope(|s| -> anyhow::Result<()> {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| -> anyhow::Result<()> {
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some((id, scene)) = corpus.scenes.get(i) else {
                            return Ok(());
                        };
                        let png = encode_png(&scene.render(1.0))?;
                        write_atomic(&image_dir.join(format!("{id}.png")), &png)?;
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().expect("render worker panicked")?;
        }
        Ok(())
    })?;

    let entries = corpus.entries();
    let manifest = DatasetManifest {
        dataset_name: format!("synthetic-{}", args.seed),
        images: entries
            .iter()
            .map(|e| ManifestImage {
                image_id: e.image_id.clone(),
                path: PathBuf::from("images").join(format!("{}.png", e.image_id)),
                width: e.width,
                height: e.height,
                label: Label::Unlabeled,
            })
            .collect(),
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;
    let gt = entries.iter().map(|e| GroundTruthLine {
        image_id: e.image_id.clone(),
        bbox: e.gt_box,
    });
    write_atomic(&args.out.join("gt.jsonl"), to_jsonl(gt).as_bytes())?;
    write_atomic(&args.out.join("generator.jsonl"), to_jsonl(&entries).as_bytes())?;
    let fringes = entries.iter().filter(|e| e.fringe).count();
    let spotted = entries.iter().filter(|e| e.spots > 0).count();
    eprintln!(
        "wrote {} images to {} ({fringes} with fringe, {spotted} with spots)",
        entries.len(),
        args.out.display()
    );
    Ok(Status::Ok)
}
