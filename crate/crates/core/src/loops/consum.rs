use serde::{Deserialize, Serialize};

use super::LoopError;
use crate::Z2;

/// Components of the intersection with their μ values, and the names used
/// for the two coassociatives in the output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectedSumDescriptor {
    pub mu: Vec<Z2>,
    #[serde(default = "default_plus")]
    pub plus_name: String,
    #[serde(default = "default_minus")]
    pub minus_name: String,
}

fn default_plus() -> String {
    "X+".into()
}

fn default_minus() -> String {
    "X-".into()
}

impl ConnectedSumDescriptor {
    pub fn new(mu: Vec<Z2>) -> Self {
        ConnectedSumDescriptor {
            mu,
            plus_name: default_plus(),
            minus_name: default_minus(),
        }
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescriptorReport {
    pub canonical: String,
    pub wall: Option<String>,
    pub mu_plus: usize,
    pub mu_minus: usize,
}

fn summand(count: usize, name: &str) -> Option<String> {
    match count {
        0 => None,
        1 => Some(name.to_string()),
        c => Some(format!("{c}{name}")),
    }
}

fn join(head: [&str; 2], parts: &[(usize, &str)]) -> String {
    head.iter()
        .map(|s| s.to_string())
        .chain(parts.iter().filter_map(|(c, n)| summand(*c, n)))
        .collect::<Vec<_>>()
        .join(" # ")
}

/// Diffeomorphism type of the generalized connected sum as a string.
///
/// `μ₊` components contribute `S²×S²`, `μ₋` contribute `CP²#CP²bar`, and
/// there are `k − 1` copies of `S¹×S³`. When `μ₋ ≥ 1` the `S²×S²` summands
/// can be traded, giving the second form.
pub fn connected_sum_descriptor(d: &ConnectedSumDescriptor) -> Result<DescriptorReport, LoopError> {
    let k = d.k();
    if k == 0 {
        return Err(LoopError::EmptyComponents);
    }
    let mu_plus = d.mu.iter().filter(|m| **m == Z2::Plus).count();
    let mu_minus = k - mu_plus;
    let head = [d.plus_name.as_str(), d.minus_name.as_str()];
    let canonical = join(
        head,
        &[(mu_plus, "(S2xS2)"), (mu_minus, "(CP2#CP2bar)"), (k - 1, "(S1xS3)")],
    );
    let wall = (mu_minus >= 1).then(|| join(head, &[(k, "(CP2#CP2bar)"), (k - 1, "(S1xS3)")]));
    Ok(DescriptorReport {
        canonical,
        wall,
        mu_plus,
        mu_minus,
    })
}
