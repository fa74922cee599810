use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const BUILTIN: &str = include_str!("../../data/relations.toml");

/// Slotted templates for one relation. `qa_frames[0]` is the base frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTemplates {
    #[serde(rename = "id")]
    pub relation_id: String,
    #[serde(default)]
    pub label: String,
    pub object_type: String,
    pub base_statement: String,
    pub qa_frames: Vec<String>,
    pub wp_frame: String,
    pub fc_frame: String,
}

impl RelationTemplates {
    /// Number of QA frames, base included.
    pub fn frame_count(&self) -> usize {
        self.qa_frames.len()
    }

    pub fn base_frame(&self) -> &str {
        &self.qa_frames[0]
    }

    fn validate(&self) -> Result<()> {
        let fail = |what: &str, msg: &str| {
            Err(Error::Templates(format!(
                "{}: {what}: {msg}",
                self.relation_id
            )))
        };
        if self.relation_id.trim().is_empty() {
            return Err(Error::Templates("relation with empty id".into()));
        }
        if self.qa_frames.is_empty() {
            return fail("qa_frames", "at least one frame is required");
        }
        expect_slots(&self.base_statement, 1, 1).or_else(|m| fail("base_statement", &m))?;
        for (i, frame) in self.qa_frames.iter().enumerate() {
            expect_slots(frame, 1, 0).or_else(|m| fail(&format!("qa_frames[{i}]"), &m))?;
        }
        expect_slots(&self.wp_frame, 1, 0).or_else(|m| fail("wp_frame", &m))?;
        if !self.wp_frame.trim_end().ends_with('_') {
            return fail("wp_frame", "must end with the completion slot `_`");
        }
        expect_slots(&self.fc_frame, 1, 1).or_else(|m| fail("fc_frame", &m))?;
        Ok(())
    }
}

fn expect_slots(s: &str, x: usize, y: usize) -> std::result::Result<(), String> {
    let nx = s.matches("[X]").count();
    let ny = s.matches("[Y]").count();
    if nx != x || ny != y {
        return Err(format!(
            "expected [X]x{x} and [Y]x{y}, found [X]x{nx} and [Y]x{ny} in {s:?}"
        ));
    }
    Ok(())
}

/// Templates keyed by relation id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateRegistry {
    relations: BTreeMap<String, RelationTemplates>,
}

#[derive(Deserialize)]
struct RegistryFile {
    #[serde(default)]
    relation: Vec<RelationTemplates>,
}

impl TemplateRegistry {
    pub fn get(&self, relation_id: &str) -> Option<&RelationTemplates> {
        self.relations.get(relation_id)
    }

    pub fn require(&self, relation_id: &str) -> Result<&RelationTemplates> {
        self.get(relation_id)
            .ok_or_else(|| Error::MissingTemplates(relation_id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationTemplates> {
        self.relations.values()
    }

    pub fn insert(&mut self, templates: RelationTemplates) -> Result<()> {
        templates.validate()?;
        self.relations
            .insert(templates.relation_id.clone(), templates);
        Ok(())
    }
}

impl FromIterator<RelationTemplates> for TemplateRegistry {
    /// Panics on invalid templates; use [`TemplateRegistry::insert`] for
    /// fallible construction.
    fn from_iter<I: IntoIterator<Item = RelationTemplates>>(iter: I) -> Self {
        let mut reg = TemplateRegistry::default();
        for t in iter {
            reg.insert(t).expect("invalid relation templates");
        }
        reg
    }
}

/// Parse a TOML registry made of `[[relation]]` tables.
pub fn parse_registry(text: &str) -> Result<TemplateRegistry> {
    let file: RegistryFile = toml::from_str(text)?;
    let mut reg = TemplateRegistry::default();
    for t in file.relation {
        if reg.get(&t.relation_id).is_some() {
            return Err(Error::Templates(format!(
                "relation {} declared twice",
                t.relation_id
            )));
        }
        reg.insert(t)?;
    }
    Ok(reg)
}

pub fn read_registry(path: &Path) -> Result<TemplateRegistry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_registry(&text)
}

/// The shipped registry covering the 20 T-REx relations.
pub fn builtin_registry() -> TemplateRegistry {
    parse_registry(BUILTIN).expect("built-in registry is valid")
}
