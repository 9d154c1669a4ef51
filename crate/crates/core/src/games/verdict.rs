// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::params::Theorem;
use super::state::{GameState, Status};
use crate::bits::{encode_pair, BitString};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictWitness {
    /// Absent for conclusions that do not involve a program pair.
    pub p: Option<BitString>,
    pub q: Option<BitString>,
    pub conclusion: String,
    /// Declared or certified values on each side; `None` is unbounded.
    pub lhs: Option<i64>,
    pub rhs: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Verdict {
    Pass { pairs_checked: u64 },
    Fail { witness: VerdictWitness },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<i64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b) as i64),
        (a, b) => a.or(b).map(i64::from),
    }
}

/// Checks the theorem's conclusion for every program pair of the final
/// candidate. `C(p,q)` is the declared bound; conditional complexities use
/// the smaller of the declared bound and `C_A`.
pub fn verdict(state: &GameState) -> Verdict {
    if let Status::ConstructorStuck { cause } = state.status() {
        return Verdict::Fail {
            witness: VerdictWitness {
                p: None,
                q: None,
                conclusion: format!("constructor stuck: {cause:?}"),
                lhs: None,
                rhs: None,
            },
        };
    }
    let spec = state.spec();
    let c = state.candidate();
    let table = state.table();
    let a = state.agraph();
    let eps = spec.epsilon as i64;
    let upper = |u: &BitString, v: &BitString| min_opt(a.c_a(u, v), table.get(u, v));

    if spec.theorem == Theorem::GapPrivF {
        let k_minus_l = spec.k as i64 - spec.l as i64;
        if let Some(b) = table.get(&encode_pair(&c.y, &c.z), &c.x) {
            if (b as i64) < k_minus_l {
                return Verdict::Fail {
                    witness: VerdictWitness {
                        p: None,
                        q: None,
                        conclusion: "C(y,z|x) >= k - l".to_string(),
                        lhs: Some(b as i64),
                        rhs: Some(k_minus_l),
                    },
                };
            }
        }
    }

    let ps = state.programs_y(&c.x, &c.y);
    let qs = state.programs_z(&c.x, &c.y, &c.z);
    let yz = encode_pair(&c.y, &c.z);
    let mut checked = 0;
    for p in &ps {
        for q in &qs {
            checked += 1;
            let pq = encode_pair(p, q);
            let Some(cpq) = table.unconditional(&pq).map(i64::from) else {
                continue;
            };
            let (conclusion, rhs) = match spec.theorem {
                Theorem::GapCpqE => ("C(p,q) >= C(y,z|x) + ε", upper(&yz, &c.x).map(|v| v + eps)),
                Theorem::GapCpqF => (
                    "C(p,q) >= max{C(y,z|x), C(z|y)} + ε",
                    upper(&yz, &c.x).zip(upper(&c.z, &c.y)).map(|(a, b)| a.max(b) + eps),
                ),
                Theorem::GapPrivE => ("C(p,q) - C(p,q|x) >= ε", upper(&pq, &c.x).map(|v| v + eps)),
                Theorem::GapPrivF => (
                    "C(p,q) - C(p,q|x,l) >= l + ε",
                    upper(&pq, &state.simplification_condition(&c.x)).map(|v| v + spec.l as i64 + eps),
                ),
            };
            if rhs.map_or(true, |r| cpq < r) {
                return Verdict::Fail {
                    witness: VerdictWitness {
                        p: Some(p.clone()),
                        q: Some(q.clone()),
                        conclusion: conclusion.to_string(),
                        lhs: Some(cpq),
                        rhs,
                    },
                };
            }
        }
    }
    Verdict::Pass { pairs_checked: checked }
}
