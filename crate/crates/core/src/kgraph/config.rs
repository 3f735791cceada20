use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{EdgeCategory, GraphError};
use crate::vectorize::LnConstraints;

/// Construction tunables. Missing fields in a config file take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub vector_capacity: usize,
    pub ln_constraints: LnConstraints,
    pub xvec_similarity_threshold: f64,
    pub fc_fc_min_pattern_mass: u32,
    pub fc_fc_mass_cap: u32,
    #[serde(
        serialize_with = "serialize_categories",
        deserialize_with = "deserialize_categories"
    )]
    pub enabled_relation_categories: BTreeSet<EdgeCategory>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            vector_capacity: 20,
            ln_constraints: LnConstraints::default(),
            xvec_similarity_threshold: 0.25,
            fc_fc_min_pattern_mass: 3,
            fc_fc_mass_cap: 9,
            enabled_relation_categories: EdgeCategory::ALL.into_iter().collect(),
        }
    }
}

impl GraphConfig {
    pub fn with_categories(mut self, categories: impl IntoIterator<Item = EdgeCategory>) -> Self {
        self.enabled_relation_categories = categories.into_iter().collect();
        self
    }

    pub fn enabled(&self, category: EdgeCategory) -> bool {
        self.enabled_relation_categories.contains(&category)
    }

    pub fn any_linking_enabled(&self) -> bool {
        EdgeCategory::LINKING.iter().any(|c| self.enabled(*c))
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.vector_capacity == 0 {
            return Err(GraphError::InvalidConfig("vector_capacity must be >= 1".into()));
        }
        let tau = self.xvec_similarity_threshold;
        if !(tau > 0.0 && tau < 1.0) {
            return Err(GraphError::InvalidConfig(format!(
                "xvec_similarity_threshold {tau} outside (0, 1)"
            )));
        }
        if self.fc_fc_min_pattern_mass < 1 || self.fc_fc_mass_cap < self.fc_fc_min_pattern_mass {
            return Err(GraphError::InvalidConfig(
                "need fc_fc_mass_cap >= fc_fc_min_pattern_mass >= 1".into(),
            ));
        }
        self.ln_constraints.validate()?;
        Ok(())
    }
}

fn serialize_categories<S: Serializer>(set: &BTreeSet<EdgeCategory>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(set.iter())
}

fn deserialize_categories<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeSet<EdgeCategory>, D::Error> {
    let names = Vec::<String>::deserialize(d)?;
    let mut out = BTreeSet::new();
    for name in names {
        let group = EdgeCategory::parse_group(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown relation category {name:?}")))?;
        out.extend(group);
    }
    Ok(out)
}
