//! Independent re-check of a factorization witness.

use serde::{Deserialize, Serialize};

use crate::classify::is_order_preserving;
use crate::ptrans::{sample_points, PiecewiseMap};

use super::{model_generator, FactorizationWitness, Tag};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn check(name: &str, outcome: Result<(), String>) -> CheckResult {
    match outcome {
        Ok(()) => CheckResult {
            name: name.into(),
            pass: true,
            detail: String::new(),
        },
        Err(detail) => CheckResult {
            name: name.into(),
            pass: false,
            detail,
        },
    }
}

fn composition_check(w: &FactorizationWitness, samples: usize, seed: u64) -> Result<(), String> {
    if w.factors.is_empty() {
        return Err("empty word".into());
    }
    if let Some(f) = w.factors.iter().find(|f| f.map.model != w.input.model) {
        return Err(format!(
            "factor on {} but input on {}",
            f.map.model, w.input.model
        ));
    }
    let mut maps: Vec<&PiecewiseMap> = vec![&w.input];
    maps.extend(w.factors.iter().map(|f| &f.map));
    let points = sample_points(&maps, samples, seed).map_err(|e| e.to_string())?;
    for x in &points {
        let mut y = x.clone();
        for f in &w.factors {
            y = f.map.evaluate(&y).map_err(|e| format!("at {x}: {e}"))?;
        }
        let expected = w.input.evaluate(x).map_err(|e| e.to_string())?;
        if y != expected {
            return Err(format!("word sends {x} to {y}, input to {expected}"));
        }
    }
    let composed = w.composition().map_err(|e| e.to_string())?;
    if !composed.equal_structural(&w.input) {
        return Err("composed pieces differ from the input".into());
    }
    Ok(())
}

fn order_check(w: &FactorizationWitness) -> Result<(), String> {
    for (i, f) in w.factors.iter().enumerate() {
        if f.tag == Tag::OrderPreserving && !is_order_preserving(&f.map) {
            return Err(format!(
                "factor {i} is tagged O but is not order-preserving"
            ));
        }
    }
    Ok(())
}

fn generator_check(w: &FactorizationWitness) -> Result<(), String> {
    if !w.factors.iter().any(|f| f.tag == Tag::Generator) {
        return Ok(());
    }
    let expected = model_generator(&w.input.model, &w.params).map_err(|e| e.to_string())?;
    for (i, f) in w.factors.iter().enumerate() {
        if f.tag == Tag::Generator && !f.map.equal_structural(&expected) {
            return Err(format!("factor {i} is tagged G but is not the generator"));
        }
    }
    Ok(())
}

fn presence_check(w: &FactorizationWitness) -> Result<(), String> {
    if is_order_preserving(&w.input) || w.factors.iter().any(|f| f.tag == Tag::Generator) {
        Ok(())
    } else {
        Err("input is not order-preserving but the word has no generator".into())
    }
}

/// Sequential evaluation on seeded samples plus structural composition, O tags,
/// G tags, and presence of a generator when one is needed.
pub fn verify_witness(w: &FactorizationWitness, samples: usize, seed: u64) -> VerifyReport {
    VerifyReport {
        checks: vec![
            check("composition", composition_check(w, samples, seed)),
            check("o_tags", order_check(w)),
            check("g_tags", generator_check(w)),
            check("generator_present", presence_check(w)),
        ],
    }
}
