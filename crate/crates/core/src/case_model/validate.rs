//! Structural and numeric invariant checks on a [`CaseData`].

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{BusKind, CaseData, ControlMode};

/// One broken invariant: which entity, and what rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: impl Into<String>) -> Self {
        Self { entity: entity.into(), rule: rule.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

/// Checks every case invariant. Never panics; an empty list means the case is usable.
pub fn validate_case(case: &CaseData) -> Vec<Violation> {
    let mut out = Vec::new();
    let ac_index: HashMap<u32, usize> =
        case.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();
    let dc_index: HashMap<u32, usize> =
        case.dc_buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();

    if !(case.s_base > 0.0) {
        out.push(Violation::new("case", "s_base must be positive"));
    }
    if ac_index.len() != case.buses.len() {
        out.push(Violation::new("case", "duplicate AC bus id"));
    }
    if dc_index.len() != case.dc_buses.len() {
        out.push(Violation::new("case", "duplicate DC bus id"));
    }

    for b in &case.buses {
        let e = format!("bus {}", b.id);
        if !(b.v_min < b.v_max) {
            out.push(Violation::new(&e, "v_min must be below v_max"));
        }
        if !(b.v_ref >= b.v_min && b.v_ref <= b.v_max) {
            out.push(Violation::new(&e, "v_ref outside voltage bounds"));
        }
    }

    for (i, br) in case.branches.iter().enumerate() {
        let e = format!("branch {} ({}-{})", i + 1, br.from, br.to);
        if !ac_index.contains_key(&br.from) || !ac_index.contains_key(&br.to) {
            out.push(Violation::new(&e, "unknown bus reference"));
        }
        if !(br.r >= 0.0) {
            out.push(Violation::new(&e, "negative resistance"));
        }
        if !(br.x != 0.0 && br.x.is_finite()) {
            out.push(Violation::new(&e, "zero reactance"));
        }
        if !(br.s_max > 0.0) {
            out.push(Violation::new(&e, "s_max must be positive"));
        }
        if let Some(tap) = &br.tap {
            if !(tap.ratio_min < tap.ratio_max) {
                out.push(Violation::new(&e, "tap ratio_min must be below ratio_max"));
            } else if !divides(tap.ratio_min, tap.ratio_max, tap.step) {
                out.push(Violation::new(&e, "step does not divide range"));
            }
            if !(tap.ratio >= tap.ratio_min && tap.ratio <= tap.ratio_max) {
                out.push(Violation::new(&e, "tap ratio outside range"));
            }
        }
    }

    for (i, g) in case.generators.iter().enumerate() {
        let e = format!("generator {} (bus {})", i + 1, g.bus);
        if !ac_index.contains_key(&g.bus) {
            out.push(Violation::new(&e, "unknown bus reference"));
        }
        if !(g.p_min <= g.p_max) {
            out.push(Violation::new(&e, "p_min exceeds p_max"));
        }
        if !(g.q_min <= g.q_max) {
            out.push(Violation::new(&e, "q_min exceeds q_max"));
        }
        if !(g.cost_a >= 0.0) {
            out.push(Violation::new(&e, "negative quadratic cost"));
        }
    }

    for (i, s) in case.shunts.iter().enumerate() {
        let e = format!("shunt {} (bus {})", i + 1, s.bus);
        if !ac_index.contains_key(&s.bus) {
            out.push(Violation::new(&e, "unknown bus reference"));
        }
        if !(s.q_min <= s.q_max) {
            out.push(Violation::new(&e, "q_min exceeds q_max"));
        } else if !divides(s.q_min, s.q_max, s.step) {
            out.push(Violation::new(&e, "step does not divide range"));
        }
    }

    check_ac_islands(case, &ac_index, &mut out);

    for b in &case.dc_buses {
        let e = format!("DC bus {}", b.id);
        if !(b.u_min < b.u_max) {
            out.push(Violation::new(&e, "u_min must be below u_max"));
        }
        if !(b.u_ref >= b.u_min && b.u_ref <= b.u_max) {
            out.push(Violation::new(&e, "u_ref outside voltage bounds"));
        }
        if let Some(i_max) = b.i_max {
            if !(i_max > 0.0) {
                out.push(Violation::new(&e, "i_max must be positive"));
            }
        }
    }

    for (i, br) in case.dc_branches.iter().enumerate() {
        let e = format!("DC branch {} ({}-{})", i + 1, br.from, br.to);
        if !dc_index.contains_key(&br.from) || !dc_index.contains_key(&br.to) {
            out.push(Violation::new(&e, "unknown DC bus reference"));
        }
        if !(br.r > 0.0) {
            out.push(Violation::new(&e, "resistance must be positive"));
        }
        if !(br.i_max > 0.0) {
            out.push(Violation::new(&e, "i_max must be positive"));
        }
    }

    check_converters(case, &ac_index, &dc_index, &mut out);
    check_dc_grid(case, &dc_index, &mut out);
    out
}

fn divides(lo: f64, hi: f64, step: f64) -> bool {
    if !(step > 0.0) || !step.is_finite() {
        return false;
    }
    let n = (hi - lo) / step;
    n.round() >= 1.0 && (n - n.round()).abs() <= 1e-9 * n.max(1.0)
}

fn check_ac_islands(case: &CaseData, ac_index: &HashMap<u32, usize>, out: &mut Vec<Violation>) {
    let n = case.buses.len();
    let mut uf = UnionFind::new(n);
    for br in &case.branches {
        if let (Some(&a), Some(&b)) = (ac_index.get(&br.from), ac_index.get(&br.to)) {
            uf.union(a, b);
        }
    }
    let mut slacks: HashMap<usize, usize> = HashMap::new();
    let mut roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    for (i, b) in case.buses.iter().enumerate() {
        if b.kind == BusKind::Slack {
            *slacks.entry(roots[i]).or_default() += 1;
        }
    }
    let first_bus = roots.clone();
    roots.sort_unstable();
    roots.dedup();
    for root in roots {
        let bus = case.buses[first_bus.iter().position(|&r| r == root).unwrap()].id;
        let e = format!("AC island containing bus {bus}");
        match slacks.get(&root).copied().unwrap_or(0) {
            0 => out.push(Violation::new(e, "no slack bus")),
            1 => {}
            _ => out.push(Violation::new(e, "multiple slack buses")),
        }
    }
}

fn check_converters(
    case: &CaseData,
    ac_index: &HashMap<u32, usize>,
    dc_index: &HashMap<u32, usize>,
    out: &mut Vec<Violation>,
) {
    let mut dc_cover = vec![0usize; case.dc_buses.len()];
    for (k, c) in case.converters.iter().enumerate() {
        let e = format!("converter {} (AC bus {})", k + 1, c.ac_bus);
        match ac_index.get(&c.ac_bus) {
            None => out.push(Violation::new(&e, "unknown AC bus reference")),
            Some(&i) => {
                let regulated = case.buses[i].kind != BusKind::Pq
                    || case.generators.iter().any(|g| g.bus == c.ac_bus);
                if c.mode.pins_ac_voltage() && regulated {
                    out.push(Violation::new(&e, "AC voltage control on a generator bus"));
                }
            }
        }
        match dc_index.get(&c.dc_bus) {
            None => out.push(Violation::new(&e, "unknown DC bus reference")),
            Some(&j) => dc_cover[j] += 1,
        }
        if !(c.x_xfmr != 0.0 && c.x_xfmr.is_finite()) {
            out.push(Violation::new(&e, "zero coupling reactance"));
        }
        if !(c.r_xfmr >= 0.0) {
            out.push(Violation::new(&e, "negative coupling resistance"));
        }
        if !(c.pq_circle.r_min >= 0.0 && c.pq_circle.r_max > c.pq_circle.r_min) {
            out.push(Violation::new(&e, "capability radii must satisfy r_max > r_min >= 0"));
        }
        if !(c.p_s_min <= c.p_s_max) || !(c.q_s_min <= c.q_s_max) {
            out.push(Violation::new(&e, "inconsistent power bounds"));
        }
        if !(c.loss_a >= 0.0 && c.loss_b >= 0.0 && c.loss_c >= 0.0) {
            out.push(Violation::new(&e, "negative loss coefficient"));
        }
        if let ControlMode::Droop { slope, .. } = c.mode {
            if !(slope > 0.0) {
                out.push(Violation::new(&e, "droop slope must be positive"));
            }
        }
    }
    for (j, b) in case.dc_buses.iter().enumerate() {
        match dc_cover[j] {
            1 => {}
            0 => out.push(Violation::new(format!("DC bus {}", b.id), "no converter attached")),
            _ => out.push(Violation::new(format!("DC bus {}", b.id), "multiple converters attached")),
        }
    }
}

fn check_dc_grid(case: &CaseData, dc_index: &HashMap<u32, usize>, out: &mut Vec<Violation>) {
    if case.converters.is_empty() && case.dc_buses.is_empty() {
        return;
    }
    let slacks = case.converters.iter().filter(|c| c.mode.is_dc_slack()).count();
    let droops = case.converters.iter().filter(|c| c.mode.is_droop()).count();
    if droops == 0 {
        match slacks {
            0 => out.push(Violation::new("DC grid", "no DC slack")),
            1 => {}
            _ => out.push(Violation::new("DC grid", "multiple DC slack converters")),
        }
    }
    let n = case.dc_buses.len();
    let mut uf = UnionFind::new(n);
    for br in &case.dc_branches {
        if let (Some(&a), Some(&b)) = (dc_index.get(&br.from), dc_index.get(&br.to)) {
            uf.union(a, b);
        }
    }
    if n > 0 && (1..n).any(|i| uf.find(i) != uf.find(0)) {
        out.push(Violation::new("DC grid", "DC grid not connected"));
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_model::{shipped_case, TapChanger, SHIPPED_CASES};

    fn rules(case: &CaseData) -> Vec<String> {
        validate_case(case).into_iter().map(|v| v.rule).collect()
    }

    #[test]
    fn shipped_cases_are_valid() {
        for name in SHIPPED_CASES {
            let case = shipped_case(name).unwrap();
            assert!(validate_case(&case).is_empty(), "{name}: {:?}", validate_case(&case));
        }
    }

    #[test]
    fn missing_dc_slack() {
        let mut case = shipped_case("case14_2t").unwrap();
        case.converters[1].mode = ControlMode::ConstPsConstQs { p_s: 0.495, q_s: -0.105 };
        assert_eq!(rules(&case), vec!["no DC slack"]);
    }

    #[test]
    fn two_dc_slacks() {
        let mut case = shipped_case("case14_2t").unwrap();
        case.converters[0].mode = ControlMode::ConstUdcConstQs { u_dc: 1.0, q_s: 0.1 };
        assert_eq!(rules(&case), vec!["multiple DC slack converters"]);
    }

    #[test]
    fn droop_grid_needs_no_slack() {
        let mut case = shipped_case("case14_3t").unwrap();
        for c in &mut case.converters {
            c.mode = ControlMode::Droop { slope: 0.005, u_dc: 1.0, p_s: 0.0, q_s: 0.0 };
        }
        assert!(rules(&case).is_empty());
    }

    #[test]
    fn bad_tap_step() {
        let mut case = shipped_case("case14_ac").unwrap();
        let i = case.tapped_branches()[0];
        case.branches[i].tap =
            Some(TapChanger { ratio: 1.0, ratio_min: 0.9, ratio_max: 1.1, step: 0.3 });
        assert_eq!(rules(&case), vec!["step does not divide range"]);
    }

    #[test]
    fn island_without_slack() {
        let mut case = shipped_case("case14_ac").unwrap();
        // bus 8 hangs off bus 7 only
        case.branches.retain(|b| !(b.from == 7 && b.to == 8));
        assert_eq!(rules(&case), vec!["no slack bus"]);
    }

    #[test]
    fn disconnected_dc_grid() {
        let mut case = shipped_case("case14_2t").unwrap();
        case.dc_branches.clear();
        assert_eq!(rules(&case), vec!["DC grid not connected"]);
    }

    #[test]
    fn voltage_pin_on_generator_bus() {
        let mut case = shipped_case("case14_3t").unwrap();
        case.converters[0].mode = ControlMode::ConstPsConstUs { p_s: 0.877, u_s: 1.04 };
        assert_eq!(rules(&case), vec!["AC voltage control on a generator bus"]);
    }

    #[test]
    fn dangling_references_are_reported() {
        let mut case = shipped_case("case14_2t").unwrap();
        case.converters[0].ac_bus = 99;
        case.dc_branches[0].to = 7;
        let r = rules(&case);
        assert!(r.contains(&"unknown AC bus reference".to_string()));
        assert!(r.contains(&"unknown DC bus reference".to_string()));
    }

    #[test]
    fn bad_numbers() {
        let mut case = shipped_case("case14_2t").unwrap();
        case.buses[3].v_min = 1.2;
        case.branches[0].x = 0.0;
        case.generators[0].cost_a = -1.0;
        case.dc_branches[0].r = 0.0;
        case.converters[0].pq_circle.r_min = 2.0;
        assert_eq!(validate_case(&case).len(), 6);
    }
}
