//! Shared fixtures for in-crate tests.

use super::*;

/// Fixed scene used across tests: a sphere on a floor, one point and one
/// directional light, modest ambient.
pub(crate) fn test_scene(width: usize, height: usize, detail_amplitude: f64) -> SceneSpec<f64> {
    SceneSpec {
        object: SceneObject::Sphere {
            center: Vec3::of(0.0, 0.8, 0.0),
            radius: 0.8,
        },
        object_material: BaseMaterial::uniform(Vec3::of(0.55, 0.52, 0.48), 0.55, 0.0),
        floor: Some(Floor {
            y: 0.0,
            material: BaseMaterial::uniform(Vec3::of(0.7, 0.7, 0.7), 0.8, 0.0),
        }),
        lights: vec![
            Light::Directional {
                direction: Vec3::of(-0.4, -1.0, -0.3).normalized(),
                intensity: Vec3::of(0.85, 0.8, 0.75),
            },
            Light::Point {
                position: Vec3::of(2.5, 3.5, 2.0),
                intensity: Vec3::of(6.0, 6.0, 7.0),
            },
        ],
        ambient: Vec3::of(0.08, 0.08, 0.1),
        camera: Camera {
            position: Vec3::of(0.0, 1.6, 3.2),
            look_at: Vec3::of(0.0, 0.7, 0.0),
            fov_y_deg: 40.0,
            width,
            height,
        },
        detail_amplitude,
    }
}

/// An uncoated render of the fixed test scene.
pub(crate) fn test_stack(size: usize) -> ChannelStack<f64> {
    render_uncoated(&test_scene(size, size, 0.3)).expect("test scene renders")
}
