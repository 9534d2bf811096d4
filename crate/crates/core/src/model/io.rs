//! JSON instance and placement files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CharacterCandidate, Instance, Mode, Placement, Stencil};
use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    format_version: u32,
    mode: Mode,
    stencil: Stencil,
    regions: usize,
    candidates: Vec<CharacterCandidate>,
    seed: u64,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

impl Instance {
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            format_version: FORMAT_VERSION,
            mode: self.mode,
            stencil: self.stencil.clone(),
            regions: self.regions,
            candidates: self.candidates.clone(),
            seed: self.seed,
        };
        let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
        text.push('\n');
        text
    }

    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Instance> {
        let file: InstanceFile = serde_json::from_str(text).map_err(parse_error)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "format_version = {FORMAT_VERSION} (found {})",
                file.format_version
            )));
        }
        let instance = Instance {
            mode: file.mode,
            stencil: file.stencil,
            regions: file.regions,
            candidates: file.candidates,
            seed: file.seed,
        };
        instance.validate()?;
        Ok(instance)
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&fs::read_to_string(path)?)
}

pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance.to_json())?;
    Ok(())
}

pub fn load_placement(path: impl AsRef<Path>) -> Result<Placement> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(parse_error)
}

pub fn save_placement(placement: &Placement, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(placement).expect("placement serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
