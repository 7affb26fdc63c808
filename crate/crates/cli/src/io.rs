//! JSON and text formats read and written by the command line.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use orthosefe_core::gadgets::NaeInput;
use orthosefe_core::instance::edge_key;
use orthosefe_core::{CycleInstance, Instance, RawInstance, RotationSystem, Side, SideAssignment};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub k: usize,
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shared: Option<Vec<[String; 2]>>,
    pub exclusive: Vec<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isolated: Option<Vec<String>>,
}

fn pairs(l: &[[String; 2]]) -> Vec<(String, String)> {
    l.iter().map(|[a, b]| (a.clone(), b.clone())).collect()
}

fn arrays(l: &[(String, String)]) -> Vec<[String; 2]> {
    l.iter().map(|(a, b)| [a.clone(), b.clone()]).collect()
}

impl From<&InstanceFile> for RawInstance {
    fn from(f: &InstanceFile) -> RawInstance {
        RawInstance {
            k: f.k,
            vertices: f.vertices.clone(),
            cycle: f.cycle.clone(),
            shared: f.shared.as_deref().map(pairs),
            exclusive: f.exclusive.iter().map(|l| pairs(l)).collect(),
            isolated: f.isolated.clone(),
        }
    }
}

impl From<&RawInstance> for InstanceFile {
    fn from(r: &RawInstance) -> InstanceFile {
        InstanceFile {
            k: r.k,
            vertices: r.vertices.clone(),
            cycle: r.cycle.clone(),
            shared: r.shared.as_deref().map(arrays),
            exclusive: r.exclusive.iter().map(|l| arrays(l)).collect(),
            isolated: r.isolated.clone().filter(|l| !l.is_empty()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub assignment: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RotationFile {
    pub rotations: BTreeMap<String, Vec<String>>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn parse_instance(text: &str) -> Result<Instance, CliError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::input(e.to_string()))?;
    RawInstance::from(&file).build().map_err(|e| CliError::input(e.to_string()))
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = read(path)?;
    parse_instance(&text).map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))
}

pub fn instance_json(inst: &Instance) -> String {
    to_json(&InstanceFile::from(&inst.to_raw()))
}

pub fn cycle_json(c: &CycleInstance) -> String {
    to_json(&InstanceFile::from(&c.to_raw()))
}

pub fn witness_file(c: &CycleInstance, a: &SideAssignment) -> WitnessFile {
    let mut assignment = BTreeMap::new();
    for (g, list) in c.exclusive_all().iter().enumerate() {
        for (i, &e) in list.iter().enumerate() {
            assignment.insert(edge_key(c.names(), e), a.get(g, i).letter().to_string());
        }
    }
    WitnessFile { assignment }
}

/// Reads sides back; every exclusive edge must appear exactly once.
pub fn assignment_from(c: &CycleInstance, w: &WitnessFile) -> Result<SideAssignment, CliError> {
    let mut used = 0;
    let mut sides = Vec::with_capacity(c.k());
    for list in c.exclusive_all() {
        let mut l = Vec::with_capacity(list.len());
        for &e in list {
            let key = edge_key(c.names(), e);
            let side = match w.assignment.get(&key).map(String::as_str) {
                Some("L") => Side::Left,
                Some("R") => Side::Right,
                Some(other) => return Err(CliError::input(format!("edge {key}: side must be \"L\" or \"R\", got {other:?}"))),
                None => return Err(CliError::input(format!("witness has no side for edge {key}"))),
            };
            used += 1;
            l.push(side);
        }
        sides.push(l);
    }
    if used != w.assignment.len() {
        let extra = w.assignment.keys().find(|k| !c.exclusive_all().iter().flatten().any(|&e| &edge_key(c.names(), e) == *k));
        return Err(CliError::input(format!("witness names an edge that is not exclusive: {}", extra.map_or("?", |s| s))));
    }
    Ok(SideAssignment { sides })
}

pub fn load_witness(path: &Path) -> Result<WitnessFile, CliError> {
    parse(path, &read(path)?)
}

pub fn rotation_file(names: &[String], r: &RotationSystem) -> RotationFile {
    let rotations = (0..r.n()).map(|v| (names[v].clone(), r.rot[v].iter().map(|&w| names[w].clone()).collect())).collect();
    RotationFile { rotations }
}

pub fn rotation_from(names: &[String], f: &RotationFile) -> Result<RotationSystem, CliError> {
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let id = |s: &str| index.get(s).copied().ok_or_else(|| CliError::input(format!("rotation names unknown vertex `{s}`")));
    let mut rot = vec![Vec::new(); names.len()];
    for (v, list) in &f.rotations {
        let v = id(v)?;
        rot[v] = list.iter().map(|w| id(w)).collect::<Result<_, _>>()?;
    }
    Ok(RotationSystem::new(rot))
}

pub fn load_rotation(path: &Path) -> Result<RotationFile, CliError> {
    parse(path, &read(path)?)
}

/// One clause of three variable names per line. Blank lines and lines
/// starting with `#` are skipped; variables are numbered by first use.
pub fn parse_nae(text: &str) -> Result<(NaeInput, Vec<String>), CliError> {
    let mut names: Vec<String> = Vec::new();
    let mut clauses = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() != 3 {
            return Err(CliError::input(format!("line {}: expected three variables, found {}", line_no + 1, words.len())));
        }
        let mut clause = [0usize; 3];
        for (slot, w) in clause.iter_mut().zip(&words) {
            *slot = match names.iter().position(|n| n == w) {
                Some(i) => i,
                None => {
                    names.push(w.to_string());
                    names.len() - 1
                }
            };
        }
        clauses.push(clause);
    }
    let f = NaeInput::new(names.len(), clauses).map_err(|e| CliError::input(e.to_string()))?;
    Ok((f, names))
}

pub fn load_nae(path: &Path) -> Result<(NaeInput, Vec<String>), CliError> {
    parse_nae(&read(path)?).map_err(|e| CliError::input(format!("{}: {}", path.display(), e.message)))
}
