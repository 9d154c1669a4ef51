// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{ParetoPoint, SearchError};
use crate::networks::Objective;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveMinimum {
    pub objective: Objective,
    /// `None` when every point is above budget on this objective.
    pub minimum: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frontier {
    pub objectives: Vec<Objective>,
    /// Non-dominated points in input order; among points with equal
    /// objective vectors only the first is kept.
    pub points: Vec<ParetoPoint>,
    pub minima: Vec<ObjectiveMinimum>,
    /// Index into `points` of the first point attaining every minimum.
    pub simultaneous: Option<usize>,
}

/// Objective values with above-budget mapped to `i64::MAX`.
pub(crate) fn key(point: &ParetoPoint, objectives: &[Objective]) -> Vec<i64> {
    objectives
        .iter()
        .map(|&o| point.metrics.objective(o).unwrap_or(i64::MAX))
        .collect()
}

/// `a` is at most `b` everywhere and below it somewhere.
pub(crate) fn dominates(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

pub fn pareto_frontier(points: &[ParetoPoint], objectives: &[Objective]) -> Result<Frontier, SearchError> {
    if points.is_empty() {
        return Err(SearchError::EmptyPointSet);
    }
    if objectives.is_empty() {
        return Err(SearchError::NoObjectives);
    }
    let keys: Vec<Vec<i64>> = points.iter().map(|p| key(p, objectives)).collect();

    // Sweep in lexicographic key order: a point can only be dominated by one
    // with a lexicographically smaller key, so comparing against the kept
    // set suffices.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let shadowed = kept
            .iter()
            .any(|&k| keys[k] == keys[i] || dominates(&keys[k], &keys[i]));
        if !shadowed {
            kept.push(i);
        }
    }
    kept.sort_unstable();

    let minima: Vec<ObjectiveMinimum> = objectives
        .iter()
        .enumerate()
        .map(|(j, &objective)| ObjectiveMinimum {
            objective,
            minimum: keys.iter().map(|k| k[j]).min().filter(|&m| m != i64::MAX),
        })
        .collect();
    let target: Vec<i64> = minima.iter().map(|m| m.minimum.unwrap_or(i64::MAX)).collect();
    let frontier: Vec<ParetoPoint> = kept.iter().map(|&i| points[i].clone()).collect();
    let simultaneous = kept.iter().position(|&i| keys[i] == target);
    Ok(Frontier {
        objectives: objectives.to_vec(),
        points: frontier,
        minima,
        simultaneous,
    })
}
