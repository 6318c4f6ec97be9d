//! Global trait and task conditioning tokens.
//!
//! Every trait owns a positional vector identifying it plus value vectors
//! that scale with the trait value: continuous traits (roughness) use one
//! value vector, binary traits (metalness, transmission) use separate
//! on/off vectors, and thickness uses separate vectors for solid and
//! transmissive coats. Four task vectors complete the table.

use crate::coating::TraitVector;
use crate::dataset::TrainingTask;
use crate::num::Real;

pub const SLOT_ROUGHNESS_POS: usize = 0;
pub const SLOT_ROUGHNESS_VAL: usize = 1;
pub const SLOT_METALNESS_POS: usize = 2;
pub const SLOT_METALNESS_ON: usize = 3;
pub const SLOT_METALNESS_OFF: usize = 4;
pub const SLOT_TRANSMISSION_POS: usize = 5;
pub const SLOT_TRANSMISSION_ON: usize = 6;
pub const SLOT_TRANSMISSION_OFF: usize = 7;
pub const SLOT_THICKNESS_POS: usize = 8;
pub const SLOT_THICKNESS_SOLID: usize = 9;
pub const SLOT_THICKNESS_TRANSMISSIVE: usize = 10;
pub const SLOT_TASK_BASE: usize = 11;
pub const TABLE_SLOTS: usize = 15;

pub const SLOT_NAMES: [&str; TABLE_SLOTS] = [
    "roughness_pos",
    "roughness_val",
    "metalness_pos",
    "metalness_on",
    "metalness_off",
    "transmission_pos",
    "transmission_on",
    "transmission_off",
    "thickness_pos",
    "thickness_solid",
    "thickness_transmissive",
    "task_add_textured",
    "task_add_uniform",
    "task_replace",
    "task_remove",
];

/// Borrowed view of the 15 x D table (stored inside the model parameters).
#[derive(Clone, Copy, Debug)]
pub struct TraitEmbeddingTable<'a, T> {
    pub dim: usize,
    pub data: &'a [T],
}

impl<'a, T: Real> TraitEmbeddingTable<'a, T> {
    pub fn new(dim: usize, data: &'a [T]) -> Self {
        assert_eq!(data.len(), TABLE_SLOTS * dim, "table data length");
        TraitEmbeddingTable { dim, data }
    }

    #[inline]
    pub fn slot(&self, i: usize) -> &'a [T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// How each emitted token was assembled: `(slot, coefficient)` pairs.
/// Training routes gradients back through this.
pub type TokenRoute = Vec<(usize, f64)>;

fn assemble<T: Real>(table: &TraitEmbeddingTable<'_, T>, route: &TokenRoute) -> Vec<T> {
    let mut out = vec![T::zero(); table.dim];
    for (slot, coeff) in route {
        let vec = table.slot(*slot);
        let c = T::of(*coeff);
        for (o, v) in out.iter_mut().zip(vec) {
            *o += c * *v;
        }
    }
    out
}

/// Token routes for a task + optional trait vector. The remove task (and
/// any sample without traits) is conditioned by its task token alone.
pub fn trait_token_routes<T: Real>(
    traits: Option<&TraitVector<T>>,
    task: TrainingTask,
) -> Vec<TokenRoute> {
    let mut routes = vec![vec![(SLOT_TASK_BASE + task.index(), 1.0)]];
    if task == TrainingTask::Remove {
        return routes;
    }
    let traits = match traits {
        Some(t) => t,
        None => return routes,
    };
    routes.push(vec![
        (SLOT_ROUGHNESS_POS, 1.0),
        (SLOT_ROUGHNESS_VAL, traits.roughness.as_f64()),
    ]);
    let metal_slot = if traits.metalness.as_f64() >= 0.5 {
        SLOT_METALNESS_ON
    } else {
        SLOT_METALNESS_OFF
    };
    routes.push(vec![(SLOT_METALNESS_POS, 1.0), (metal_slot, 1.0)]);
    let transmissive = traits.transmission.as_f64() >= 0.5;
    let trans_slot = if transmissive {
        SLOT_TRANSMISSION_ON
    } else {
        SLOT_TRANSMISSION_OFF
    };
    routes.push(vec![(SLOT_TRANSMISSION_POS, 1.0), (trans_slot, 1.0)]);
    let thickness_slot = if transmissive {
        SLOT_THICKNESS_TRANSMISSIVE
    } else {
        SLOT_THICKNESS_SOLID
    };
    routes.push(vec![
        (SLOT_THICKNESS_POS, 1.0),
        (thickness_slot, traits.thickness.as_f64()),
    ]);
    routes
}

/// Conditioning tokens: `E = E_pos + x * E_val` per trait, preceded by the
/// task token.
pub fn embed_traits<T: Real>(
    traits: Option<&TraitVector<T>>,
    task: TrainingTask,
    table: &TraitEmbeddingTable<'_, T>,
) -> Vec<Vec<T>> {
    trait_token_routes(traits, task)
        .iter()
        .map(|route| assemble(table, route))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn table_data(dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        (0..TABLE_SLOTS * dim)
            .map(|_| rng.range(-1.0, 1.0))
            .collect()
    }

    #[test]
    fn zero_roughness_token_is_exactly_the_positional_vector() {
        let data = table_data(6, 1);
        let table = TraitEmbeddingTable::new(6, &data);
        let traits = TraitVector::new(0.0f64, 0.0, 0.0, 0.0).unwrap();
        let tokens = embed_traits(Some(&traits), TrainingTask::AddUniform, &table);
        assert_eq!(tokens.len(), 5);
        assert_eq!(tokens[1], table.slot(SLOT_ROUGHNESS_POS).to_vec());
        // Thickness 0 likewise collapses to its positional vector.
        assert_eq!(tokens[4], table.slot(SLOT_THICKNESS_POS).to_vec());
    }

    #[test]
    fn remove_task_emits_a_single_token() {
        let data = table_data(4, 2);
        let table = TraitEmbeddingTable::new(4, &data);
        let tokens = embed_traits::<f64>(None, TrainingTask::Remove, &table);
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0], table.slot(SLOT_TASK_BASE + 3).to_vec());
    }

    #[test]
    fn binary_trait_tokens_differ_by_on_minus_off() {
        let data = table_data(5, 3);
        let table = TraitEmbeddingTable::new(5, &data);
        let on = TraitVector::new(0.5f64, 1.0, 0.0, 0.5).unwrap();
        let off = TraitVector::new(0.5f64, 0.0, 0.0, 0.5).unwrap();
        let tok_on = embed_traits(Some(&on), TrainingTask::Replace, &table);
        let tok_off = embed_traits(Some(&off), TrainingTask::Replace, &table);
        let diff: Vec<f64> = tok_on[2]
            .iter()
            .zip(&tok_off[2])
            .map(|(a, b)| a - b)
            .collect();
        let expect: Vec<f64> = table
            .slot(SLOT_METALNESS_ON)
            .iter()
            .zip(table.slot(SLOT_METALNESS_OFF))
            .map(|(a, b)| a - b)
            .collect();
        for (d, e) in diff.iter().zip(&expect) {
            assert!((d - e).abs() < 1e-15);
        }
    }

    #[test]
    fn thickness_uses_the_transmission_specific_value_vector() {
        let data = table_data(4, 4);
        let table = TraitEmbeddingTable::new(4, &data);
        let solid = TraitVector::new(0.2f64, 0.0, 0.0, 0.7).unwrap();
        let transmissive = TraitVector::new(0.2f64, 0.0, 1.0, 0.7).unwrap();
        let tok_solid = embed_traits(Some(&solid), TrainingTask::AddUniform, &table);
        let tok_trans = embed_traits(Some(&transmissive), TrainingTask::AddUniform, &table);
        let expect_solid: Vec<f64> = table
            .slot(SLOT_THICKNESS_POS)
            .iter()
            .zip(table.slot(SLOT_THICKNESS_SOLID))
            .map(|(p, v)| p + 0.7 * v)
            .collect();
        for (a, b) in tok_solid[4].iter().zip(&expect_solid) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_ne!(tok_solid[4], tok_trans[4]);
    }
}
