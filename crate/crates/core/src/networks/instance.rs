// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{NetworkError, Role};
use crate::bits::{join, BitString};

/// The strings `w, x, y, z`; roles a topology does not use stay empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Instance {
    pub w: BitString,
    pub x: BitString,
    pub y: BitString,
    pub z: BitString,
}

impl Instance {
    /// Panics on non-binary input; use [`Instance::parse`] for untrusted text.
    pub fn new(w: &str, x: &str, y: &str, z: &str) -> Self {
        let b = |s: &str| -> BitString {
            if s.is_empty() {
                BitString::empty()
            } else {
                s.parse().expect("binary string")
            }
        };
        Self {
            w: b(w),
            x: b(x),
            y: b(y),
            z: b(z),
        }
    }

    pub fn get(&self, role: Role) -> &BitString {
        match role {
            Role::W => &self.w,
            Role::X => &self.x,
            Role::Y => &self.y,
            Role::Z => &self.z,
        }
    }

    pub fn set(&mut self, role: Role, value: BitString) {
        match role {
            Role::W => self.w = value,
            Role::X => self.x = value,
            Role::Y => self.y = value,
            Role::Z => self.z = value,
        }
    }

    pub fn join(&self, roles: &[Role]) -> BitString {
        let parts: Vec<&BitString> = roles.iter().map(|&r| self.get(r)).collect();
        join(&parts)
    }

    pub fn max_len(&self) -> usize {
        [&self.w, &self.x, &self.y, &self.z]
            .iter()
            .map(|s| s.len())
            .max()
            .unwrap_or(0)
    }

    /// Lines `name=value` for `w, x, y, z`; missing names are empty, `-` or
    /// an empty value is the empty string, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut inst = Instance::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| NetworkError::Instance { line: idx + 1, message };
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected name=value".to_string()))?;
            let role = match name.trim() {
                "w" => Role::W,
                "x" => Role::X,
                "y" => Role::Y,
                "z" => Role::Z,
                other => return Err(err(format!("unknown name {other:?}"))),
            };
            let value = value.trim();
            let value = if value.is_empty() {
                BitString::empty()
            } else {
                value.parse().map_err(|e| err(format!("{e}")))?
            };
            inst.set(role, value);
        }
        Ok(inst)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for role in [Role::W, Role::X, Role::Y, Role::Z] {
            let _ = writeln!(out, "{}={}", role.name(), self.get(role));
        }
        out
    }
}

/// Every instance whose strings in `roles` have length at most `max_len`,
/// in length-lex order with the first role most significant.
pub fn all_instances(roles: &[Role], max_len: usize) -> Vec<Instance> {
    let strings: Vec<BitString> = BitString::all_up_to(max_len).collect();
    let mut out = vec![Instance::default()];
    for &role in roles {
        out = out
            .into_iter()
            .flat_map(|inst| {
                strings.iter().map(move |s| {
                    let mut next = inst.clone();
                    next.set(role, s.clone());
                    next
                })
            })
            .collect();
    }
    out
}
