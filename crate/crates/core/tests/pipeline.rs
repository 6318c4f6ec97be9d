//! End-to-end flow through the public API at a tiny scale: generate a
//! dataset on disk, train briefly from the manifest, sample, and score.

use coatlab::dataset::{self, DatasetConfig, Manifest, TrainingTask, MANIFEST_FILE};
use coatlab::eval::{
    aggregate_report, evaluate_sample, run_benchmark, BenchmarkOptions, Channel, MethodSpec,
    Prediction,
};
use coatlab::render::ChannelStack;
use coatlab::rng::Rng;
use coatlab::toyflow::{
    self, build_conditioning, embed_traits, load_checkpoint, sample_image, save_checkpoint,
    TrainConfig,
};

#[test]
fn generate_train_sample_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let config = DatasetConfig {
        image_width: 24,
        image_height: 24,
        object_count: 2,
        viewpoint_count: 2,
        variants_per_group: 2,
        ..DatasetConfig::default()
    };
    let manifest = dataset::generate::<f32>(dir.path(), &config, 12, false).unwrap();
    manifest.validate(dir.path()).unwrap();
    assert_eq!(manifest.groups.len(), 4);

    // Reload the manifest from disk and train a handful of steps.
    let manifest = Manifest::load(&dir.path().join(MANIFEST_FILE)).unwrap();
    let groups: Vec<_> = manifest
        .groups
        .iter()
        .map(|g| dataset::load_group_images::<f64>(dir.path(), g).unwrap())
        .collect();
    let train_config = TrainConfig {
        total_steps: 20,
        batch_size: 4,
        image_size: 24,
        hidden_dim: 12,
        learning_rate: 1e-3,
        warmup_steps: 5,
        seed: 2,
        ..TrainConfig::default()
    };
    let output = toyflow::train(&groups, &train_config).unwrap();
    assert_eq!(output.losses.len(), 20);
    assert!(output.losses.iter().all(|l| l.is_finite()));

    // Checkpoint round-trips through disk and still samples deterministically.
    let ckpt = dir.path().join("model.ckpt");
    save_checkpoint(&output.model, &train_config, &ckpt).unwrap();
    let (model, loaded_config) = load_checkpoint(&ckpt).unwrap();
    assert_eq!(loaded_config, train_config);

    let group = &groups[0];
    let variant = &group.variants[0];
    let input_planes = group.original.to_planes();
    let albedo_planes = variant.projected_albedo.to_planes();
    let input_refs: Vec<&[f64]> = input_planes.iter().map(|p| p.as_slice()).collect();
    let albedo_refs: Vec<&[f64]> = albedo_planes.iter().map(|p| p.as_slice()).collect();
    let cond = build_conditioning(
        &input_refs,
        &albedo_refs,
        group.mask.data(),
        24,
        24,
        24,
        24,
        loaded_config.patch_size,
    )
    .unwrap();
    let tokens = embed_traits(
        Some(&variant.traits),
        TrainingTask::AddUniform,
        &model.table(),
    );
    let a = sample_image(&model, &cond, &tokens, 8, &mut Rng::new(3), 24, 24, 2).unwrap();
    let b = sample_image(&model, &cond, &tokens, 8, &mut Rng::new(3), 24, 24, 2).unwrap();
    assert_eq!(a, b);

    // Score the sampled image and the stored ground truth.
    let gt = ChannelStack::<f64>::load_dir(
        &dir.path().join(manifest.groups[0].variants[0].channels.dir()),
    )
    .unwrap();
    let scores = evaluate_sample(&Prediction::Rgb(a), &gt).unwrap();
    assert!(scores[&Channel::Image].is_finite());

    // The benchmark runner agrees with direct evaluation for the oracle.
    let results = run_benchmark(
        &manifest,
        dir.path(),
        &[MethodSpec::Oracle, MethodSpec::Identity],
        &BenchmarkOptions::default(),
    )
    .unwrap();
    let report = aggregate_report(&results).unwrap();
    let oracle_row = report.rows.iter().find(|r| r.method == "oracle").unwrap();
    assert_eq!(oracle_row.means[&Channel::Image], 99.0);
}
