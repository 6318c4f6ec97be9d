use super::tests_support::test_scene;
use super::*;
use crate::coating::{CoatAlbedo, CoatingSpec, TraitVector};
use crate::mesh::shapes;
use crate::rng::Rng;

fn full_mask_coat(
    stack: &ChannelStack<f64>,
    traits: TraitVector<f64>,
    albedo: Vec3<f64>,
) -> CoatingSpec<f64> {
    CoatingSpec::new(traits, CoatAlbedo::Uniform(albedo), stack.object_mask.clone()).unwrap()
}

fn masked_mse(a: &ColorImage<f64>, b: &ColorImage<f64>, mask: &ScalarMap<f64>) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for y in 0..a.height() {
        for x in 0..a.width() {
            if mask.get(x, y) > 0.0 {
                let d = a.get(x, y) - b.get(x, y);
                sum += d.dot(d);
                n += 3;
            }
        }
    }
    sum / n as f64
}

#[test]
fn background_pixels_follow_the_no_hit_convention() {
    let mut scene = test_scene(32, 32, 0.0);
    scene.floor = None;
    let stack = render_uncoated(&scene).unwrap();
    // Top-left corner looks past the sphere.
    assert_eq!(stack.depth.get(0, 0), f64::INFINITY);
    assert_eq!(stack.normals.get(0, 0), Vec3::zero());
    assert_eq!(stack.object_mask.get(0, 0), 0.0);
    assert_eq!(stack.image.get(0, 0), scene.ambient);
}

#[test]
fn lambertian_patch_head_on_matches_analytic_shading() {
    // A rect facing the camera straight on, lit head-on by a unit
    // directional light; albedo 0.5, ambient 0, no detail noise.
    let scene = SceneSpec {
        object: SceneObject::Rect {
            center: Vec3::of(0.0, 0.0, 0.0),
            edge_u: Vec3::of(4.0, 0.0, 0.0),
            edge_v: Vec3::of(0.0, 4.0, 0.0),
        },
        object_material: BaseMaterial::uniform(Vec3::splat(0.5), 1.0, 0.0),
        floor: None,
        lights: vec![Light::Directional {
            direction: Vec3::of(0.0, 0.0, -1.0),
            intensity: Vec3::splat(1.0),
        }],
        ambient: Vec3::zero(),
        camera: Camera {
            position: Vec3::of(0.0, 0.0, 3.0),
            look_at: Vec3::zero(),
            fov_y_deg: 50.0,
            width: 17,
            height: 17,
        },
        detail_amplitude: 0.0,
    };
    let stack = render_uncoated(&scene).unwrap();
    for y in 0..17 {
        for x in 0..17 {
            assert_eq!(stack.object_mask.get(x, y), 1.0, "patch should fill view");
            let shading = stack.shading.get(x, y);
            assert!((shading - Vec3::splat(1.0)).length() < 1e-12);
            let image = stack.image.get(x, y);
            // image = albedo * shading + specular; roughness 1 keeps the
            // GGX lobe below 0.05 per channel.
            for c in 0..3 {
                let spec = image.0[c] - 0.5;
                assert!(spec >= 0.0, "specular must be non-negative");
                assert!(spec < 0.05, "specular {spec} too large at ({x},{y})");
            }
        }
    }
    // Center pixel view direction is exactly the normal: check the analytic
    // normal-incidence value D * F0 / 4 (G = 1) for alpha = 1.
    let analytic = (1.0 / std::f64::consts::PI) * 0.04 / 4.0;
    let center = stack.image.get(8, 8).x() - 0.5;
    assert!(
        (center - analytic).abs() < 1e-3,
        "center specular {center} vs analytic {analytic}"
    );
}

#[test]
fn residual_identity_holds_bitwise() {
    let scene = test_scene(48, 48, 0.3);
    let stack = render_uncoated(&scene).unwrap();
    for y in 0..48 {
        for x in 0..48 {
            let expect = stack.image.get(x, y) - stack.albedo.get(x, y) * stack.shading.get(x, y);
            assert_eq!(stack.residual.get(x, y), expect);
        }
    }
    // Coated renders too.
    let coat = full_mask_coat(
        &stack,
        TraitVector::new(0.4, 0.0, 0.0, 0.6).unwrap(),
        Vec3::of(0.8, 0.2, 0.1),
    );
    let coated = render_coated(&scene, &coat).unwrap();
    for y in 0..48 {
        for x in 0..48 {
            let expect =
                coated.image.get(x, y) - coated.albedo.get(x, y) * coated.shading.get(x, y);
            assert_eq!(coated.residual.get(x, y), expect);
        }
    }
}

#[test]
fn transparent_zero_thickness_coat_is_a_no_op_within_tolerance() {
    let scene = test_scene(64, 64, 0.25);
    let base = render_uncoated(&scene).unwrap();
    let coat = full_mask_coat(
        &base,
        TraitVector::new(0.85, 0.0, 1.0, 0.0).unwrap(),
        Vec3::of(0.9, 0.1, 0.1),
    );
    let coated = render_coated(&scene, &coat).unwrap();
    let mse = masked_mse(&coated.image, &base.image, &coat.mask);
    let psnr = 10.0 * (1.0 / mse).log10();
    assert!(psnr >= 40.0, "no-op coat PSNR {psnr}");
}

#[test]
fn off_mask_pixels_are_bit_identical() {
    let scene = test_scene(48, 48, 0.25);
    let base = render_uncoated(&scene).unwrap();
    let mut rng = Rng::new(7);
    let mask = generate_mask(&base, &mut rng, 0.5).unwrap();
    let coat = CoatingSpec::new(
        TraitVector::new(0.3, 1.0, 0.0, 0.8).unwrap(),
        CoatAlbedo::Uniform(Vec3::of(0.2, 0.6, 0.9)),
        mask.clone(),
    )
    .unwrap();
    let coated = render_coated(&scene, &coat).unwrap();
    let mut on_mask = 0;
    for y in 0..48 {
        for x in 0..48 {
            if mask.get(x, y) == 0.0 {
                assert_eq!(coated.image.get(x, y), base.image.get(x, y));
                assert_eq!(coated.albedo.get(x, y), base.albedo.get(x, y));
                assert_eq!(coated.normals.get(x, y), base.normals.get(x, y));
            } else {
                on_mask += 1;
            }
        }
    }
    assert!(on_mask > 0, "mask should cover part of the object");
    // Geometry is coat-invariant everywhere.
    assert_eq!(coated.depth, base.depth);
    assert_eq!(coated.object_mask, base.object_mask);
}

#[test]
fn opaque_thick_coat_smooths_normals() {
    let scene = test_scene(64, 64, 0.5);
    let base = render_uncoated(&scene).unwrap();
    let traits_thick = TraitVector::new(0.5, 0.0, 0.0, 1.0).unwrap();
    let coat = full_mask_coat(&base, traits_thick, Vec3::of(0.7, 0.3, 0.2));
    let coated = render_coated(&scene, &coat).unwrap();
    let var = |stack: &ChannelStack<f64>| {
        let mut mean = Vec3::<f64>::zero();
        let mut n = 0.0;
        for y in 0..64 {
            for x in 0..64 {
                if coat.mask.get(x, y) > 0.0 {
                    mean += stack.normals.get(x, y);
                    n += 1.0;
                }
            }
        }
        mean = mean / n;
        let mut var = 0.0;
        for y in 0..64 {
            for x in 0..64 {
                if coat.mask.get(x, y) > 0.0 {
                    let d = stack.normals.get(x, y) - mean;
                    var += d.dot(d);
                }
            }
        }
        var / n
    };
    assert!(
        var(&coated) < var(&base),
        "thick opaque coat should reduce normal variance ({} vs {})",
        var(&coated),
        var(&base)
    );
}

#[test]
fn lights_off_and_no_ambient_renders_black() {
    let mut scene = test_scene(24, 24, 0.0);
    scene.ambient = Vec3::zero();
    scene.lights = vec![Light::Directional {
        direction: Vec3::of(0.0, -1.0, 0.0),
        intensity: Vec3::zero(),
    }];
    let stack = render_uncoated(&scene).unwrap();
    assert!(stack.image.pixels().all(|p| p == Vec3::zero()));
}

#[test]
fn identical_scene_renders_identically() {
    let scene = test_scene(32, 32, 0.4);
    let a = render_uncoated(&scene).unwrap();
    let b = render_uncoated(&scene).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mesh_objects_render_with_interpolated_normals() {
    let mut scene = test_scene(32, 32, 0.0);
    scene.object = SceneObject::Mesh(
        shapes::icosphere::<f64>(2, 0.8).translated(Vec3::of(0.0, 0.8, 0.0)),
    );
    let stack = render_uncoated(&scene).unwrap();
    let hits = stack
        .object_mask
        .data()
        .iter()
        .filter(|v| **v > 0.0)
        .count();
    assert!(hits > 50, "mesh sphere should be visible, got {hits} px");
    // Normals on the silhouette are unit length.
    for y in 0..32 {
        for x in 0..32 {
            if stack.object_mask.get(x, y) > 0.0 {
                let n = stack.normals.get(x, y);
                assert!((n.length() - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn scene_validation_rejects_bad_configs() {
    let mut scene = test_scene(0, 32, 0.0);
    assert!(matches!(
        render_uncoated(&scene),
        Err(RenderError::EmptyImage)
    ));
    scene = test_scene(32, 32, 0.0);
    scene.lights.clear();
    assert!(matches!(render_uncoated(&scene), Err(RenderError::NoLights)));
    scene = test_scene(32, 32, 0.0);
    scene.camera.fov_y_deg = 180.0;
    assert!(matches!(render_uncoated(&scene), Err(RenderError::BadFov(_))));
    scene = test_scene(32, 32, 1.5);
    assert!(matches!(
        render_uncoated(&scene),
        Err(RenderError::BadDetailAmplitude(_))
    ));
}

#[test]
fn coat_mask_size_mismatch_is_an_error() {
    let scene = test_scene(32, 32, 0.0);
    let coat = CoatingSpec::new(
        TraitVector::new(0.5, 0.0, 0.0, 0.5).unwrap(),
        CoatAlbedo::Uniform(Vec3::splat(0.5)),
        ScalarMap::new(16, 16),
    )
    .unwrap();
    assert!(matches!(
        render_coated(&scene, &coat),
        Err(RenderError::MaskSizeMismatch { .. })
    ));
}

#[test]
fn generated_masks_are_deterministic_and_on_object() {
    let scene = test_scene(48, 48, 0.0);
    let stack = render_uncoated(&scene).unwrap();
    let a = generate_mask(&stack, &mut Rng::new(42), 0.5).unwrap();
    let b = generate_mask(&stack, &mut Rng::new(42), 0.5).unwrap();
    assert_eq!(a, b);
    for i in 0..48 * 48 {
        if stack.object_mask.data()[i] == 0.0 {
            assert_eq!(a.data()[i], 0.0, "mask leaked off the object");
        }
    }
    // Coverage lands within +-10% of the target.
    let obj = stack
        .object_mask
        .data()
        .iter()
        .filter(|v| **v > 0.0)
        .count() as f64;
    let on = a.data().iter().filter(|v| **v > 0.0).count() as f64;
    let frac = on / obj;
    assert!(
        (frac - 0.5).abs() <= 0.05 + 1.0 / obj,
        "coverage {frac} not within 10% of 0.5"
    );
}

#[test]
fn full_coverage_mask_equals_silhouette() {
    let scene = test_scene(32, 32, 0.0);
    let stack = render_uncoated(&scene).unwrap();
    let mask = generate_mask(&stack, &mut Rng::new(1), 1.0).unwrap();
    assert_eq!(mask, stack.object_mask);
}

#[test]
fn empty_silhouette_is_an_error() {
    let mut scene = test_scene(16, 16, 0.0);
    // Push the sphere far behind the camera.
    scene.object = SceneObject::Sphere {
        center: Vec3::of(0.0, 0.0, 100.0),
        radius: 0.5,
    };
    let stack = render_uncoated(&scene).unwrap();
    assert!(matches!(
        generate_mask(&stack, &mut Rng::new(3), 0.5),
        Err(RenderError::EmptySilhouette)
    ));
}

#[test]
fn thickness_sweep_increases_visible_change_for_transmissive_coat() {
    let scene = test_scene(64, 64, 0.3);
    let base = render_uncoated(&scene).unwrap();
    let mut prev = -1.0;
    for thickness in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let coat = full_mask_coat(
            &base,
            TraitVector::new(0.6, 0.0, 1.0, thickness).unwrap(),
            Vec3::of(0.85, 0.15, 0.1),
        );
        let coated = render_coated(&scene, &coat).unwrap();
        let mut sum = 0.0;
        let mut n = 0.0;
        for y in 0..64 {
            for x in 0..64 {
                if coat.mask.get(x, y) > 0.0 {
                    let d = coated.image.get(x, y) - base.image.get(x, y);
                    sum += d.0.iter().map(|v| v.abs()).sum::<f64>();
                    n += 3.0;
                }
            }
        }
        let mad = sum / n;
        assert!(
            mad >= prev,
            "mean |coated - uncoated| decreased: {mad} < {prev} at thickness {thickness}"
        );
        prev = mad;
    }
}

#[test]
fn render_is_identical_for_any_thread_count() {
    let scene = test_scene(40, 40, 0.4);
    let multi = render_uncoated(&scene).unwrap();
    let single_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single = single_pool.install(|| render_uncoated(&scene).unwrap());
    assert_eq!(multi, single);
}

#[test]
fn radiance_channels_are_non_negative() {
    let scene = test_scene(32, 32, 0.4);
    let stack = render_uncoated(&scene).unwrap();
    assert!(stack.image.is_non_negative());
    assert!(stack.albedo.is_non_negative());
    assert!(stack.shading.is_non_negative());
}
