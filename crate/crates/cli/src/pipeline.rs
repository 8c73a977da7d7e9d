use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::Utc;
use discloc::annotation::{
    export_ground_truth, generate_proposals, propose_all, AnnotationStore, DatasetManifest, Durability,
};
use discloc::localizer::LocalizerConfig;
use discloc::{BoundingBox, Circle};
use serde::Serialize;

use crate::args::{BatchArgs, ExportArgs, LocalizeArgs, ProposeArgs, ServeArgs};
use crate::output::{jobs, to_jsonl, write_atomic};
use crate::Status;

struct Batch {
    manifest: DatasetManifest,
    base_dir: PathBuf,
    config: LocalizerConfig,
    jobs: usize,
}

fn load_manifest(path: &Path) -> anyhow::Result<(DatasetManifest, PathBuf)> {
    let manifest = DatasetManifest::load(path).with_context(|| format!("manifest {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((manifest, base))
}

fn load_batch(args: &BatchArgs) -> anyhow::Result<Batch> {
    let (manifest, base_dir) = load_manifest(&args.manifest)?;
    let config = match &args.config {
        Some(p) => LocalizerConfig::load(p).with_context(|| format!("config {}", p.display()))?,
        None => LocalizerConfig::default(),
    };
    Ok(Batch {
        manifest,
        base_dir,
        config,
        jobs: jobs(args.jobs),
    })
}

fn report_failures<'a>(failures: impl IntoIterator<Item = (&'a str, &'a str)>) -> Status {
    let mut any = false;
    for (id, message) in failures {
        eprintln!("failed: {id}: {message}");
        any = true;
    }
    if any {
        Status::ItemFailures
    } else {
        Status::Ok
    }
}

#[derive(Serialize)]
struct PredictionOut<'a> {
    image_id: &'a str,
    #[serde(rename = "box")]
    bbox: Option<BoundingBox>,
    #[serde(skip_serializing_if = "Option::is_none")]
    circle: Option<Circle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    retina: Option<Circle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

pub fn localize(args: LocalizeArgs) -> anyhow::Result<Status> {
    let batch = load_batch(&args.batch)?;
    if batch.manifest.images.is_empty() {
        bail!("manifest has no images");
    }
    let proposals = propose_all(&batch.manifest, &batch.base_dir, &batch.config, batch.jobs);
    let lines = proposals.iter().map(|p| match &p.outcome {
        Ok(d) => PredictionOut {
            image_id: &p.image_id,
            bbox: Some(d.bbox),
            circle: Some(d.circle),
            retina: Some(d.retina),
            error: None,
        },
        Err(e) => PredictionOut {
            image_id: &p.image_id,
            bbox: None,
            circle: None,
            retina: None,
            error: Some(e),
        },
    });
    write_atomic(&args.out, to_jsonl(lines).as_bytes())?;
    Ok(report_failures(
        proposals
            .iter()
            .filter_map(|p| p.outcome.as_ref().err().map(|e| (p.image_id.as_str(), e.as_str()))),
    ))
}

pub fn propose(args: ProposeArgs) -> anyhow::Result<Status> {
    let batch = load_batch(&args.batch)?;
    let (store, proposals) = generate_proposals(
        &batch.manifest,
        &batch.base_dir,
        &batch.config,
        batch.jobs,
        Some((&args.store, Durability::Sync)),
        Utc::now(),
    )?;
    let p = store.progress();
    eprintln!(
        "{} records: {} proposed, {} rejected by the localizer",
        store.len(),
        p.proposed,
        p.rejected
    );
    Ok(report_failures(
        proposals
            .iter()
            .filter_map(|p| p.outcome.as_ref().err().map(|e| (p.image_id.as_str(), e.as_str()))),
    ))
}

pub fn serve(args: ServeArgs) -> anyhow::Result<Status> {
    let (manifest, base_dir) = load_manifest(&args.manifest)?;
    let store = AnnotationStore::open(&args.store, Durability::Sync)
        .with_context(|| format!("store {}", args.store.display()))?;
    if let Some(missing) = manifest.images.iter().find(|m| store.get(&m.image_id).is_none()) {
        bail!("store has no record for manifest image `{}`", missing.image_id);
    }
    let state = discloc_server::AppState::new(store, manifest, base_dir);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(discloc_server::serve(state, &args.listen, |addr| {
        eprintln!("serving review API on http://{addr}/api/images");
    }))?;
    Ok(Status::Ok)
}

pub fn export_gt(args: ExportArgs) -> anyhow::Result<Status> {
    let store = AnnotationStore::open(&args.store, Durability::Flush)
        .with_context(|| format!("store {}", args.store.display()))?;
    let export = export_ground_truth(&store);
    if let Some(path) = &args.manifest {
        let (manifest, _) = load_manifest(path)?;
        for line in &export.lines {
            let Some(img) = manifest.get(&line.image_id) else {
                bail!("exported image `{}` is not in the manifest", line.image_id);
            };
            if !line.bbox.fits_within(img.width, img.height) {
                bail!("box for `{}` exceeds {}x{}", line.image_id, img.width, img.height);
            }
        }
    }
    write_atomic(&args.out, export.to_jsonl().as_bytes())?;
    let s = export.summary;
    eprintln!(
        "exported {} boxes (accepted {}, corrected {}; rejected {}, unreviewed {})",
        export.lines.len(),
        s.accepted,
        s.corrected,
        s.rejected,
        s.proposed
    );
    Ok(Status::Ok)
}
