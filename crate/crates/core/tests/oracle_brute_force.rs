// SPDX-License-Identifier: Apache-2.0

//! The structural oracle against plain enumeration of every program up to the
//! budget, in length-lex order.

use kolmonet::system::TableEntry;
use kolmonet::{bits, encode_pair, BitString, Complexity, ComplexityOracle, DescriptionSystem, ProgramBudget};

fn brute(system: &DescriptionSystem, u: &BitString, v: &BitString, budget: usize) -> Option<BitString> {
    BitString::all_up_to(budget).find(|p| system.run(p, v).output().as_ref() == Some(u))
}

fn check_all(system: DescriptionSystem, strings: &[BitString], budget: u32) {
    let oracle = ComplexityOracle::new(system.clone()).with_budget(ProgramBudget::Absolute(budget));
    for u in strings {
        for v in strings {
            let expected = brute(&system, u, v, budget as usize);
            let got = oracle.witness(u, v);
            assert_eq!(got.as_ref().map(|w| &w.program), expected.as_ref(), "u={u} v={v}");
            let c = oracle.complexity(u, v);
            match expected {
                Some(p) => assert_eq!(c, Complexity::Bits(p.len() as u32)),
                None => assert_eq!(c, Complexity::AboveBudget),
            }
        }
    }
}

fn small_strings() -> Vec<BitString> {
    let mut s: Vec<BitString> = BitString::all_up_to(3).collect();
    s.push(encode_pair(&bits("1"), &bits("0")));
    s.push(encode_pair(&bits(""), &bits("01")));
    s.push(encode_pair(&encode_pair(&bits("1"), &bits("")), &bits("1")));
    s
}

#[test]
fn table_free_matches_enumeration() {
    check_all(DescriptionSystem::new(), &small_strings(), 10);
}

#[test]
fn tabled_system_matches_enumeration() {
    let entries = [
        ("", "", "111111111"),
        ("0", "01", "0110"),
        ("1", "01", "0110"),
        ("00", "-", "10"),
        ("", "1", "000"),
    ];
    let sys = DescriptionSystem::new()
        .extend_with(entries.iter().map(|(r, c, o)| TableEntry {
            r: bits(r),
            condition: c.parse().unwrap(),
            output: bits(o),
        }))
        .unwrap();
    let mut strings = small_strings();
    strings.extend([bits("111111111"), bits("0110"), bits("000")]);
    check_all(sys, &strings, 10);
}

#[test]
fn tight_budget_reports_above_budget() {
    let strings: Vec<BitString> = BitString::all_up_to(3).collect();
    check_all(DescriptionSystem::new(), &strings, 3);
}
