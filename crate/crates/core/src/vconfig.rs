//! V-configurations: local correspondence certificates, the numeric
//! identities satisfied by symmetric configurations, parameter derivation
//! for diameter-2 V-configurations, and an isomorph-free classifier.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::catalog::quadric_configuration;
use crate::config::{coplanar_by, Graph, IncidenceProfile, LineConfiguration};
use crate::error::{Error, Result};
use crate::iso::{canonical_form, canonical_lines, graph_isomorphism};

/// `phi_p`: the lines through `point` (ids `lines[i]`) sent to points
/// `images[i]` of V, matching coplanarity with collinearity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCorrespondence {
    pub point: usize,
    pub lines: Vec<usize>,
    pub images: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VConfigFailure {
    pub point: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VConfigReport {
    pub holds: bool,
    pub witnesses: Vec<LocalCorrespondence>,
    pub failure: Option<VConfigFailure>,
}

/// Finds `phi_p` as a graph isomorphism between (lines through `p`,
/// coplanarity) and (points of V, collinearity).
pub fn local_correspondence(
    w: &LineConfiguration,
    v_graph: &Graph,
    p: usize,
) -> std::result::Result<LocalCorrespondence, String> {
    let through = w.lines_through(p);
    if through.len() != v_graph.num_vertices() {
        return Err(format!(
            "{} lines through the point, but V has {} points",
            through.len(),
            v_graph.num_vertices()
        ));
    }
    let cop = w.coplanarity_graph_at(p);
    if cop.num_edges() != v_graph.num_edges() {
        return Err(format!(
            "{} coplanar pairs of lines, but V has {} collinear pairs",
            cop.num_edges(),
            v_graph.num_edges()
        ));
    }
    let images = graph_isomorphism(&cop, v_graph).ok_or_else(|| {
        "coplanarity graph is not isomorphic to the collinearity graph of V".to_string()
    })?;
    Ok(LocalCorrespondence {
        point: p,
        lines: through.to_vec(),
        images,
    })
}

/// Checks every point of `w`; stops at the first failure.
pub fn is_v_configuration(w: &LineConfiguration, v: &LineConfiguration) -> VConfigReport {
    let v_graph = v.incidence_graph();
    let mut witnesses = Vec::with_capacity(w.num_points());
    for p in 0..w.num_points() {
        match local_correspondence(w, &v_graph, p) {
            Ok(lc) => witnesses.push(lc),
            Err(reason) => {
                return VConfigReport {
                    holds: false,
                    witnesses,
                    failure: Some(VConfigFailure { point: p, reason }),
                }
            }
        }
    }
    VConfigReport {
        holds: true,
        witnesses,
        failure: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
}

/// One evaluated identity with both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericCheck {
    pub item: String,
    pub statement: String,
    pub lhs: Option<i64>,
    pub rhs: Option<i64>,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl NumericCheck {
    fn eq(item: &str, statement: String, lhs: i64, rhs: i64) -> Self {
        let status = if lhs == rhs {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        NumericCheck {
            item: item.into(),
            statement,
            lhs: Some(lhs),
            rhs: Some(rhs),
            status,
            note: None,
        }
    }

    fn inapplicable(item: &str, statement: String, note: impl Into<String>) -> Self {
        NumericCheck {
            item: item.into(),
            statement,
            lhs: None,
            rhs: None,
            status: CheckStatus::Inapplicable,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericsReport {
    pub checks: Vec<NumericCheck>,
}

impl NumericsReport {
    /// No failures (inapplicable items are not failures).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn item(&self, item: &str) -> Vec<&NumericCheck> {
        self.checks.iter().filter(|c| c.item == item).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Inapplicable => "n/a ",
            };
            let sides = match (c.lhs, c.rhs) {
                (Some(l), Some(r)) => format!("  [{l} vs {r}]"),
                _ => String::new(),
            };
            s.push_str(&format!("[{mark}] ({}) {}{}", c.item, c.statement, sides));
            if let Some(n) = &c.note {
                s.push_str(&format!("  -- {n}"));
            }
            s.push('\n');
        }
        s
    }
}

fn sz(x: usize) -> i64 {
    x as i64
}

/// Realized distances: `i` with `v_i > 0`.
fn realized(p: &IncidenceProfile) -> Vec<i64> {
    (0..=p.max_distance() as i64)
        .filter(|&i| p.vi(i) > 0)
        .collect()
}

/// Edge double count between distance classes: `v_i v_{i,j} = v_j v_{j,i}`.
pub fn edge_count_identity_checks(p: &IncidenceProfile) -> Vec<NumericCheck> {
    let r = realized(p);
    let mut out = Vec::new();
    for &i in &r {
        for &j in &r {
            if j <= i {
                continue;
            }
            out.push(NumericCheck::eq(
                "edges",
                format!("v_{i} v_{{{i},{j}}} = v_{j} v_{{{j},{i}}}"),
                sz(p.vi(i) * p.vij(i, j)),
                sz(p.vi(j) * p.vij(j, i)),
            ));
        }
    }
    out
}

/// The relation with the indices of the pair counts transposed,
/// `v_i v_{j,i} = v_j v_{i,j}`, evaluated literally.
pub fn transposed_identity_checks(p: &IncidenceProfile) -> Vec<NumericCheck> {
    let r = realized(p);
    let mut out = Vec::new();
    for &i in &r {
        for &j in &r {
            if j <= i {
                continue;
            }
            out.push(NumericCheck::eq(
                "transposed",
                format!("v_{i} v_{{{j},{i}}} = v_{j} v_{{{i},{j}}}"),
                sz(p.vi(i) * p.vij(j, i)),
                sz(p.vi(j) * p.vij(i, j)),
            ));
        }
    }
    out
}

/// Effective `v_2` of V for the two-way split of `w_2`: the number of points
/// neither equal nor collinear to a given one. Equals the measured `v_2`
/// when V is connected of diameter at most 2.
fn effective_v2(v: &IncidenceProfile, points: usize) -> i64 {
    sz(points) - 1 - sz(v.vi(1))
}

/// Evaluates identities (1)-(3) on `w`, the edge double count, and, when
/// `v` is supplied, (4)-(7) for `w` as a V-configuration.
pub fn check_numeric_relations(
    w: &LineConfiguration,
    v: Option<&LineConfiguration>,
) -> NumericsReport {
    let wp = w.profile();
    let mut checks = Vec::new();
    if !wp.symmetric || !wp.is_connected() {
        let why = if !wp.symmetric {
            "W is not symmetric"
        } else {
            "W is not connected"
        };
        for item in ["1", "2", "3"] {
            checks.push(NumericCheck::inapplicable(
                item,
                format!("identity ({item})"),
                why,
            ));
        }
        return NumericsReport { checks };
    }
    let r = realized(&wp);
    for &i in &r {
        let rhs = wp.vij(i, i - 1) + wp.vij(i, i) + wp.vij(i, i + 1);
        checks.push(NumericCheck::eq(
            "1",
            format!(
                "v_1 = v_{{{i},{}}} + v_{{{i},{i}}} + v_{{{i},{}}}",
                i - 1,
                i + 1
            ),
            sz(wp.vi(1)),
            sz(rhs),
        ));
    }
    for &i in &r {
        let rhs = wp.vij(i - 1, i) * wp.vi(i - 1)
            + wp.vij(i, i) * wp.vi(i)
            + wp.vij(i + 1, i) * wp.vi(i + 1);
        checks.push(NumericCheck::eq(
            "2",
            format!(
                "v_1 v_{i} = v_{{{},{i}}} v_{} + v_{{{i},{i}}} v_{i} + v_{{{},{i}}} v_{}",
                i - 1,
                i - 1,
                i + 1,
                i + 1
            ),
            sz(wp.vi(1) * wp.vi(i)),
            sz(rhs),
        ));
    }
    checks.push(NumericCheck::eq("3", "v_0 = 1".into(), sz(wp.vi(0)), 1));
    checks.push(NumericCheck::eq(
        "3",
        "v_{0,0} = 0".into(),
        sz(wp.vij(0, 0)),
        0,
    ));
    checks.push(NumericCheck::eq(
        "3",
        "v_{0,1} = v_1".into(),
        sz(wp.vij(0, 1)),
        sz(wp.vi(1)),
    ));
    if wp.vi(1) > 0 {
        checks.push(NumericCheck::eq(
            "3",
            "v_{1,0} = 1".into(),
            sz(wp.vij(1, 0)),
            1,
        ));
    } else {
        checks.push(NumericCheck::inapplicable(
            "3",
            "v_{1,0} = 1".into(),
            "no collinear points",
        ));
    }
    checks.extend(edge_count_identity_checks(&wp));

    let Some(v) = v else {
        return NumericsReport { checks };
    };
    let vp = v.profile();
    let pv = v.num_points();
    let diam = wp.diameter.unwrap_or(0);

    if diam >= 2 {
        let c = NumericCheck {
            item: "4".into(),
            statement: "w_{2,2} >= w_{2,1}".into(),
            lhs: Some(sz(wp.vij(2, 2))),
            rhs: Some(sz(wp.vij(2, 1))),
            status: if wp.vij(2, 2) >= wp.vij(2, 1) {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        };
        checks.push(c);
    } else {
        checks.push(NumericCheck::inapplicable(
            "4",
            "w_{2,2} >= w_{2,1}".into(),
            "W has diameter 1, no W_2",
        ));
    }

    checks.push(NumericCheck::eq(
        "5",
        "w_1 = 2|P_V|".into(),
        sz(wp.vi(1)),
        2 * sz(pv),
    ));

    if vp.symmetric {
        checks.push(NumericCheck::eq(
            "6",
            "w_{1,1} = 2 v_1 + 1".into(),
            sz(wp.vij(1, 1)),
            2 * sz(vp.vi(1)) + 1,
        ));
    } else {
        checks.push(NumericCheck::inapplicable(
            "6",
            "w_{1,1} = 2 v_1 + 1".into(),
            "V is not symmetric",
        ));
    }

    let statement = "w_2 = |P_V| or w_2 = 4 v_2".to_string();
    if diam < 2 {
        checks.push(NumericCheck::inapplicable(
            "7",
            statement,
            "W has diameter 1, no W_2",
        ));
    } else if !vp.symmetric {
        checks.push(NumericCheck::inapplicable(
            "7",
            statement,
            "V is not symmetric",
        ));
    } else if vp.vi(3) != 0 || wp.vi(3) != 0 {
        checks.push(NumericCheck::inapplicable(
            "7",
            statement,
            "needs v_3 = w_3 = 0",
        ));
    } else {
        let w2 = sz(wp.vi(2));
        let (v2, how) = if vp.is_connected() {
            (sz(vp.vi(2)), "measured v_2".to_string())
        } else {
            let e = effective_v2(&vp, pv);
            (
                e,
                format!("V disconnected: v_2 taken as |P_V| - 1 - v_1 = {e}"),
            )
        };
        let branch_a = sz(pv);
        let branch_b = 4 * v2;
        let (rhs, status) = if w2 == branch_b {
            (branch_b, CheckStatus::Pass)
        } else if w2 == branch_a {
            (branch_a, CheckStatus::Pass)
        } else {
            (branch_b, CheckStatus::Fail)
        };
        checks.push(
            NumericCheck {
                item: "7".into(),
                statement,
                lhs: Some(w2),
                rhs: Some(rhs),
                status,
                note: None,
            }
            .with_note(format!("|P_V| = {branch_a}, 4 v_2 = {branch_b}; {how}")),
        );
    }
    NumericsReport { checks }
}

/// Measured invariants of V that feed [`derive_parameters`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VInvariants {
    pub points: u64,
    pub v1: u64,
    pub v2: u64,
    /// V has no lines; `v1 = v2 = 0` and the split of `w_2` uses
    /// `|P_V| - 1` in place of `v_2`.
    pub no_lines: bool,
}

impl VInvariants {
    pub fn measure(v: &LineConfiguration) -> Result<Self> {
        let p = v.profile();
        if !p.symmetric {
            return Err(Error::InvalidArgument("V must be symmetric".into()));
        }
        let no_lines = v.lines().is_empty();
        if !no_lines && !p.is_connected() {
            return Err(Error::InvalidArgument(
                "V must be connected or have no lines".into(),
            ));
        }
        if p.max_distance() > 2 {
            return Err(Error::InvalidArgument(
                "V must have diameter at most 2".into(),
            ));
        }
        Ok(VInvariants {
            points: v.num_points() as u64,
            v1: p.vi(1) as u64,
            v2: p.vi(2) as u64,
            no_lines,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub quantity: String,
    pub value: i64,
    pub identity: String,
}

/// The intersection numbers `w_i`, `w_{i,j}` (0 <= i, j <= 2) forced on a
/// connected symmetric V-configuration of diameter at most 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterTable {
    pub w: [i64; 3],
    pub w_pair: [[i64; 3]; 3],
    pub total_points: i64,
    pub lines_per_point: i64,
    pub diameter: u32,
    pub steps: Vec<DerivationStep>,
    pub rejected_branches: Vec<String>,
}

impl ParameterTable {
    pub fn w11(&self) -> i64 {
        self.w_pair[1][1]
    }

    pub fn w12(&self) -> i64 {
        self.w_pair[1][2]
    }

    pub fn w21(&self) -> i64 {
        self.w_pair[2][1]
    }

    pub fn w22(&self) -> i64 {
        self.w_pair[2][2]
    }

    /// Whether a measured profile matches the table in every entry.
    pub fn matches(&self, p: &IncidenceProfile) -> bool {
        if !p.symmetric || !p.is_connected() || p.max_distance() as u32 != self.diameter {
            return false;
        }
        (0..3).all(|i| {
            sz(p.vi(i as i64)) == self.w[i]
                && (0..3).all(|j| sz(p.vij(i as i64, j as i64)) == self.w_pair[i][j])
        })
    }
}

/// Runs the identity chain: (3), w_1 = 2|P_V|, w_{1,1} = 2v_1 + 1, the row
/// sum for i = 1, then both branches of the w_2 dichotomy, each completed
/// through `w_1 w_{1,2} = w_2 w_{2,1}` and the row sum for i = 2 and kept
/// only if it survives w_{2,2} >= w_{2,1} and the size bounds.
pub fn derive_parameters(inv: VInvariants) -> Result<ParameterTable> {
    if inv.points == 0 {
        return Err(Error::InvalidArgument("V has no points".into()));
    }
    let pv = inv.points as i64;
    let v1 = if inv.no_lines { 0 } else { inv.v1 as i64 };
    let v2_eff = pv - 1 - v1;
    if !inv.no_lines && inv.v2 as i64 != v2_eff {
        return Err(Error::InvalidArgument(format!(
            "v_2 = {} but |P_V| - 1 - v_1 = {v2_eff}: V must have diameter at most 2",
            inv.v2
        )));
    }
    let mut steps = Vec::new();
    let mut step = |q: &str, v: i64, id: &str| {
        steps.push(DerivationStep {
            quantity: q.into(),
            value: v,
            identity: id.into(),
        });
    };
    step("w_0", 1, "(3) w_0 = 1");
    step("w_{0,0}", 0, "(3) w_{0,0} = 0");
    step("w_{1,0}", 1, "(3) w_{1,0} = 1");
    let w1 = 2 * pv;
    step("w_1", w1, "(5) w_1 = 2|P_V|");
    step("w_{0,1}", w1, "(3) w_{0,1} = w_1");
    let w11 = 2 * v1 + 1;
    step("w_{1,1}", w11, "(6) w_{1,1} = 2 v_1 + 1");
    let w12 = w1 - 1 - w11;
    step("w_{1,2}", w12, "(1) w_1 = w_{1,0} + w_{1,1} + w_{1,2}");
    if inv.no_lines {
        step("v_2 (effective)", v2_eff, "|P_V| - 1 - v_1, V has no lines");
    }

    let mut candidates = vec![pv, 4 * v2_eff];
    candidates.dedup();
    let mut rejected = Vec::new();
    let mut feasible: Vec<(i64, i64, i64)> = Vec::new();
    for w2 in candidates {
        let origin = if w2 == pv {
            "w_2 = |P_V|"
        } else {
            "w_2 = 4 v_2"
        };
        if w2 == 0 {
            if w12 == 0 {
                feasible.push((0, 0, 0));
            } else {
                rejected.push(format!(
                    "{origin} = 0: w_{{1,2}} = {w12} needs W_2 nonempty"
                ));
            }
            continue;
        }
        if w12 == 0 {
            rejected.push(format!(
                "{origin} = {w2}: w_{{1,2}} = 0 leaves W_2 unreachable"
            ));
            continue;
        }
        if (w1 * w12) % w2 != 0 {
            rejected.push(format!(
                "{origin} = {w2}: w_1 w_{{1,2}} = {} is not divisible by w_2",
                w1 * w12
            ));
            continue;
        }
        let w21 = w1 * w12 / w2;
        let w22 = w1 - w21;
        if w22 < w21 {
            rejected.push(format!(
                "{origin} = {w2}: w_{{2,1}} = {w21}, w_{{2,2}} = {w22} violates (4) w_{{2,2}} >= w_{{2,1}}"
            ));
            continue;
        }
        if w12 > w2 || w22 > w2 - 1 {
            rejected.push(format!(
                "{origin} = {w2}: w_{{1,2}} = {w12}, w_{{2,2}} = {w22} exceed the size of W_2"
            ));
            continue;
        }
        feasible.push((w2, w21, w22));
    }
    let (w2, w21, w22) = match feasible.as_slice() {
        [one] => *one,
        [] => {
            return Err(Error::Inconsistent(format!(
                "no branch of the w_2 dichotomy survives: {}",
                rejected.join("; ")
            )))
        }
        _ => {
            return Err(Error::Inconsistent(format!(
                "both branches of the w_2 dichotomy survive: {feasible:?}"
            )))
        }
    };
    let diameter = if w2 == 0 { 1 } else { 2 };
    if w2 == 0 {
        step("w_2", 0, "(7) dichotomy; diameter 1, no W_2 row");
    } else {
        step("w_2", w2, "(7) dichotomy, other branch rejected");
        step("w_{2,1}", w21, "w_1 w_{1,2} = w_2 w_{2,1}");
        step("w_{2,2}", w22, "(1) w_1 = w_{2,1} + w_{2,2}");
    }
    let total = 1 + w1 + w2;
    step("|W|", total, "1 + w_1 + w_2");
    Ok(ParameterTable {
        w: [1, w1, w2],
        w_pair: [[0, w1, 0], [1, w11, w12], [0, w21, w22]],
        total_points: total,
        lines_per_point: pv,
        diameter,
        steps,
        rejected_branches: rejected,
    })
}

/// A disagreement between a closed-form expression and the measured value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub n: u32,
    pub quantity: String,
    pub closed_form: String,
    pub closed_value: i64,
    pub measured: i64,
    pub difference: i64,
}

/// For V = Q_{2n}^- and W = Q_{2n+2}^-, compares the measured `w_{1,1}` and
/// `w_{1,2}` against the closed forms `2^{2n-1} - 2^n - 4` and
/// `2^{2n} - 2^{2n-1} + 1`, and the transposed product relation against the
/// edge count. Only disagreements are returned.
pub fn closed_form_discrepancies(ns: &[u32]) -> Result<Vec<Discrepancy>> {
    let mut out = Vec::new();
    for &n in ns {
        if !(2..=3).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "closed forms are compared for n = 2, 3, got {n}"
            )));
        }
        let w = quadric_configuration(n as usize + 1)?.profile();
        let pow = |e: u32| 1i64 << e;
        let rows = [
            (
                "w_{1,1}",
                "2^{2n-1} - 2^n - 4",
                pow(2 * n - 1) - pow(n) - 4,
                sz(w.vij(1, 1)),
            ),
            (
                "w_{1,2}",
                "2^{2n} - 2^{2n-1} + 1",
                pow(2 * n) - pow(2 * n - 1) + 1,
                sz(w.vij(1, 2)),
            ),
            (
                "w_1 w_{2,1} (vs w_2 w_{1,2})",
                "w_2 w_{1,2}",
                sz(w.vi(2) * w.vij(1, 2)),
                sz(w.vi(1) * w.vij(2, 1)),
            ),
        ];
        for (quantity, closed_form, closed_value, measured) in rows {
            if closed_value != measured {
                out.push(Discrepancy {
                    n,
                    quantity: quantity.into(),
                    closed_form: closed_form.into(),
                    closed_value,
                    measured,
                    difference: measured - closed_value,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub applicable: bool,
    pub holds: bool,
    pub roots_checked: usize,
    /// Every line avoiding the root meets W_1 once and W_2 twice.
    pub lines_split: bool,
    /// Each point of W_1 is collinear with exactly half of W_2.
    pub half_split: bool,
    pub w12: usize,
    pub w2: usize,
    /// W_2 points are determined by their choice of one non-root point on
    /// each line through the root.
    pub choices_injective: bool,
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Checks the structure that pins down the lines of a diameter-2
/// V-configuration, from every point taken as root.
pub fn verify_reconstruction_argument(
    w: &LineConfiguration,
    v: &LineConfiguration,
) -> ReconstructionReport {
    let prof = w.profile();
    let mut report = ReconstructionReport {
        applicable: false,
        holds: false,
        roots_checked: 0,
        lines_split: false,
        half_split: false,
        w12: 0,
        w2: 0,
        choices_injective: false,
        failures: Vec::new(),
        note: None,
    };
    if !prof.symmetric || prof.diameter != Some(2) {
        report.note = Some(match prof.diameter {
            Some(1) => "W has diameter 1, no W_2".into(),
            _ => "W is not a connected symmetric configuration of diameter 2".into(),
        });
        return report;
    }
    if (0..w.num_points()).any(|p| w.degree(p) != v.num_points()) {
        report.note = Some("lines per point differ from |P_V|".into());
        return report;
    }
    report.applicable = true;
    report.w12 = prof.vij(1, 2);
    report.w2 = prof.vi(2);
    let g = w.incidence_graph();
    let mut lines_split = true;
    let mut half_split = 2 * report.w12 == report.w2;
    let mut injective = true;
    for root in 0..w.num_points() {
        let dist = g.distances_from(root);
        let level = |x: usize| dist[x].unwrap_or(usize::MAX);
        for l in w.lines() {
            if l.contains(&root) {
                continue;
            }
            let ones = l.iter().filter(|&&x| level(x) == 1).count();
            let twos = l.iter().filter(|&&x| level(x) == 2).count();
            if (ones, twos) != (1, 2) {
                lines_split = false;
                report.failures.push(format!(
                    "root {root}: line {l:?} meets W_1 {ones} times, W_2 {twos} times"
                ));
            }
        }
        let w2_points: Vec<usize> = (0..w.num_points()).filter(|&x| level(x) == 2).collect();
        for x in (0..w.num_points()).filter(|&x| level(x) == 1) {
            let c = g.neighbors(x).iter().filter(|&&y| level(y) == 2).count();
            if 2 * c != w2_points.len() {
                half_split = false;
                report.failures.push(format!(
                    "root {root}: point {x} sees {c} of {} W_2 points",
                    w2_points.len()
                ));
            }
        }
        let mut seen = HashSet::new();
        for &q in &w2_points {
            let mut choice = Vec::with_capacity(w.degree(root));
            for &lid in w.lines_through(root) {
                let hits: Vec<usize> = w.lines()[lid]
                    .iter()
                    .copied()
                    .filter(|&x| x != root && g.has_edge(q, x))
                    .collect();
                if hits.len() != 1 {
                    injective = false;
                    report.failures.push(format!(
                        "root {root}: W_2 point {q} meets {} points of line {lid}",
                        hits.len()
                    ));
                }
                choice.push(hits.first().copied().unwrap_or(usize::MAX));
            }
            if !seen.insert(choice) {
                injective = false;
                report.failures.push(format!(
                    "root {root}: W_2 point {q} repeats a choice vector"
                ));
            }
        }
        report.roots_checked += 1;
    }
    report.failures.truncate(20);
    report.lines_split = lines_split;
    report.half_split = half_split;
    report.choices_injective = injective;
    report.holds = lines_split && half_split && injective;
    report
}

/// Node and wall-clock limits for the classifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            max_time: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Complete,
    BudgetExhausted,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub canonical_checks: u64,
    pub canonical_us: u64,
    pub isomorph_rejections: u64,
    pub rejections: BTreeMap<String, u64>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    /// One representative per isomorphism class, in discovery order.
    pub classes: Vec<LineConfiguration>,
    pub table: ParameterTable,
    pub stats: SearchStats,
}

const NO_POINT: u32 = u32::MAX;

struct Classifier<'a> {
    v: &'a LineConfiguration,
    table: ParameterTable,
    n: usize,
    k: usize,
    w11: u32,
    w21: u32,
    reconstruction: bool,
    in_w1: Vec<bool>,
    lines: Vec<[usize; 3]>,
    deg: Vec<usize>,
    adj: Vec<Vec<u64>>,
    third: Vec<u32>,
    v_edges: usize,
    v_max_degree: usize,
    seen_partial: HashSet<Vec<Vec<u32>>>,
    class_keys: HashSet<Vec<Vec<u32>>>,
    classes: Vec<LineConfiguration>,
    stats: SearchStats,
    budget: SearchBudget,
    start: Instant,
    exhausted: bool,
}

impl<'a> Classifier<'a> {
    fn new(v: &'a LineConfiguration, table: ParameterTable, budget: SearchBudget) -> Self {
        let n = table.total_points as usize;
        let k = table.lines_per_point as usize;
        let words = n.div_ceil(64);
        let vg = v.incidence_graph();
        let mut in_w1 = vec![false; n];
        for x in in_w1.iter_mut().take(2 * k + 1).skip(1) {
            *x = true;
        }
        Classifier {
            v,
            w11: table.w11() as u32,
            w21: table.w21() as u32,
            // with w_{1,1} = 1 two points of W_1 never share a line off the
            // root, and w_{2,1} = |P_V| then leaves one W_1 point per line
            reconstruction: table.diameter == 2
                && table.w11() == 1
                && table.w21() == table.lines_per_point,
            table,
            n,
            k,
            in_w1,
            lines: Vec::new(),
            deg: vec![0; n],
            adj: vec![vec![0u64; words]; n],
            third: vec![NO_POINT; n * n],
            v_edges: vg.num_edges(),
            v_max_degree: (0..vg.num_vertices())
                .map(|x| vg.neighbors(x).len())
                .max()
                .unwrap_or(0),
            seen_partial: HashSet::new(),
            class_keys: HashSet::new(),
            classes: Vec::new(),
            stats: SearchStats::default(),
            budget,
            start: Instant::now(),
            exhausted: false,
        }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.third[a * self.n + b] != NO_POINT
    }

    fn third_of(&self, a: usize, b: usize) -> Option<usize> {
        match self.third[a * self.n + b] {
            NO_POINT => None,
            t => Some(t as usize),
        }
    }

    fn common(&self, a: usize, b: usize) -> u32 {
        self.adj[a]
            .iter()
            .zip(&self.adj[b])
            .map(|(x, y)| (x & y).count_ones())
            .sum()
    }

    fn neighbors(&self, a: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &word) in self.adj[a].iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                out.push(wi * 64 + t);
                bits &= bits - 1;
            }
        }
        out
    }

    fn set_line(&mut self, l: [usize; 3], on: bool) {
        let [a, b, c] = l;
        for (x, y, z) in [(a, b, c), (a, c, b), (b, c, a)] {
            let n = self.n;
            let t = if on { z as u32 } else { NO_POINT };
            self.third[x * n + y] = t;
            self.third[y * n + x] = t;
            let (wx, bx) = (y / 64, 1u64 << (y % 64));
            let (wy, by) = (x / 64, 1u64 << (x % 64));
            if on {
                self.adj[x][wx] |= bx;
                self.adj[y][wy] |= by;
            } else {
                self.adj[x][wx] &= !bx;
                self.adj[y][wy] &= !by;
            }
        }
        for p in l {
            if on {
                self.deg[p] += 1;
            } else {
                self.deg[p] -= 1;
            }
        }
        if on {
            self.lines.push(l);
        } else {
            self.lines.pop();
        }
    }

    fn reject(&mut self, why: &str) {
        *self.stats.rejections.entry(why.to_string()).or_insert(0) += 1;
    }

    /// Upper bounds on common-neighbour counts for pairs touched by the
    /// newest line.
    fn pair_ok(&self, a: usize, b: usize) -> bool {
        let c = self.common(a, b);
        if self.adjacent(a, b) {
            c <= self.w11
        } else if self.deg[a] == self.k || self.deg[b] == self.k {
            self.table.diameter == 2 && c <= self.w21
        } else {
            c <= self.w11.max(self.w21)
        }
    }

    fn bounds_ok(&self, l: [usize; 3]) -> bool {
        for (a, b) in [(l[0], l[1]), (l[0], l[2]), (l[1], l[2])] {
            if !self.pair_ok(a, b) {
                return false;
            }
            for c in self.neighbors(a) {
                if c != b && !self.pair_ok(b, c) {
                    return false;
                }
            }
            for c in self.neighbors(b) {
                if c != a && !self.pair_ok(a, c) {
                    return false;
                }
            }
        }
        true
    }

    /// Once both points of a pair are full their common neighbourhood is final.
    fn exact_ok(&self, p: usize) -> bool {
        (0..self.n)
            .filter(|&q| q != p && self.deg[q] == self.k)
            .all(|q| {
                let c = self.common(p, q);
                if self.adjacent(p, q) {
                    c == self.w11
                } else {
                    self.table.diameter == 2 && c == self.w21
                }
            })
    }

    /// Coplanarity only grows as lines are added, so a completed point may
    /// never exceed the collinearity counts of V.
    fn local_ok(&self, p: usize) -> bool {
        let through: Vec<[usize; 3]> = self
            .lines
            .iter()
            .copied()
            .filter(|l| l.contains(&p))
            .collect();
        let mut degs = vec![0usize; through.len()];
        let mut edges = 0;
        for i in 0..through.len() {
            for j in (i + 1)..through.len() {
                if coplanar_by(|a, b| self.third_of(a, b), through[i], through[j]) {
                    edges += 1;
                    degs[i] += 1;
                    degs[j] += 1;
                }
            }
        }
        edges <= self.v_edges && degs.iter().all(|&d| d <= self.v_max_degree)
    }

    fn partial_key(&self) -> Vec<Vec<u32>> {
        let mut pos = vec![usize::MAX; self.n];
        let mut m = 0;
        for (slot, &d) in pos.iter_mut().zip(&self.deg) {
            if d > 0 {
                *slot = m;
                m += 1;
            }
        }
        let lines: Vec<[usize; 3]> = self
            .lines
            .iter()
            .map(|l| [pos[l[0]], pos[l[1]], pos[l[2]]])
            .collect();
        let mut key = canonical_lines(m, &lines).certificate;
        key.push(vec![(self.n - m) as u32]);
        key
    }

    fn candidates(&self, x: usize) -> Vec<(usize, usize)> {
        let fresh: Vec<usize> = (0..self.n).filter(|&p| self.deg[p] == 0).take(2).collect();
        let open = |p: usize| p != x && self.deg[p] < self.k && !self.adjacent(x, p);
        let mut out = Vec::new();
        for y in (0..self.n).filter(|&y| open(y)) {
            let y_fresh = self.deg[y] == 0;
            if y_fresh && Some(&y) != fresh.first() {
                continue;
            }
            for z in ((y + 1)..self.n).filter(|&z| open(z)) {
                if self.adjacent(y, z) {
                    continue;
                }
                if self.deg[z] == 0 {
                    let allowed = if y_fresh { fresh.get(1) } else { fresh.first() };
                    if Some(&z) != allowed {
                        continue;
                    }
                }
                if self.reconstruction {
                    let ones = [x, y, z].iter().filter(|&&p| self.in_w1[p]).count();
                    if ones != 1 {
                        continue;
                    }
                }
                out.push((y, z));
            }
        }
        out
    }

    fn out_of_budget(&mut self) -> bool {
        if self.stats.nodes >= self.budget.max_nodes {
            self.exhausted = true;
        } else if let Some(limit) = self.budget.max_time {
            if self.stats.nodes.is_multiple_of(256) && self.start.elapsed() >= limit {
                self.exhausted = true;
            }
        }
        self.exhausted
    }

    fn dfs(&mut self) {
        let Some(x) = (0..self.n).find(|&p| self.deg[p] < self.k) else {
            self.leaf();
            return;
        };
        for (y, z) in self.candidates(x) {
            if self.out_of_budget() {
                return;
            }
            self.stats.nodes += 1;
            let l = [x, y, z];
            self.set_line(l, true);
            if !self.bounds_ok(l) {
                self.reject("common-neighbour bound");
            } else if !l.iter().all(|&p| self.deg[p] < self.k || self.exact_ok(p)) {
                self.reject("exact intersection numbers");
            } else if !l.iter().all(|&p| self.deg[p] < self.k || self.local_ok(p)) {
                self.reject("local correspondence");
            } else if !self.fresh_partial() {
                self.stats.isomorph_rejections += 1;
            } else {
                self.dfs();
            }
            self.set_line(l, false);
            if self.exhausted {
                return;
            }
        }
    }

    fn fresh_partial(&mut self) -> bool {
        self.stats.canonical_checks += 1;
        let t = Instant::now();
        let key = self.partial_key();
        self.stats.canonical_us += t.elapsed().as_micros() as u64;
        self.seen_partial.insert(key)
    }

    fn leaf(&mut self) {
        self.stats.leaves += 1;
        let Ok(w) = LineConfiguration::unlabeled(self.n, self.lines.clone()) else {
            self.reject("leaf: invalid configuration");
            return;
        };
        if !self.table.matches(&w.profile()) {
            self.reject("leaf: profile differs from the parameter table");
            return;
        }
        if !is_v_configuration(&w, self.v).holds {
            self.reject("leaf: not a V-configuration");
            return;
        }
        let key = canonical_form(&w).certificate;
        if self.class_keys.insert(key) {
            self.classes.push(w);
        }
    }

    fn run(&mut self) {
        // root 0 with lines {0, 2i+1, 2i+2}
        for i in 0..self.k {
            self.set_line([0, 2 * i + 1, 2 * i + 2], true);
        }
        if self.k > 0 && self.local_ok(0) {
            self.dfs();
        }
        self.stats.wall_ms = self.start.elapsed().as_millis() as u64;
    }
}

/// All connected symmetric V-configurations with the parameters derived from
/// V, up to isomorphism.
///
/// Points are `0..|W|`; the root `0` carries the lines `{0, 2i+1, 2i+2}`.
/// Lines are then added for the lowest point still short of `|P_V|` lines.
/// Untouched points are interchangeable and only the first two may enter a
/// new line. After every line the canonical form of the partial
/// configuration is recorded and repeats are cut; every pruning rule is
/// invariant under relabeling, so one representative per class suffices. Pairs are
/// bounded by the derived `w_{1,1}` and `w_{2,1}` as they grow, completed
/// points must satisfy them exactly, and the lines through a completed point
/// may not be more coplanar than V is collinear. When `w_{1,1} = 1` and
/// `w_{2,1} = |P_V|`, every line off the root meets `W_1` exactly once. Completed candidates
/// are checked against the table and as V-configurations before their
/// canonical forms are compared.
pub fn classify_v_configurations(
    v: &LineConfiguration,
    budget: SearchBudget,
) -> Result<Classification> {
    let table = derive_parameters(VInvariants::measure(v)?)?;
    let mut c = Classifier::new(v, table, budget);
    c.run();
    Ok(Classification {
        verdict: if c.exhausted {
            Verdict::BudgetExhausted
        } else {
            Verdict::Complete
        },
        classes: c.classes,
        table: c.table,
        stats: c.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{fano, projective_configuration};

    fn inv(points: u64, v1: u64, v2: u64, no_lines: bool) -> VInvariants {
        VInvariants {
            points,
            v1,
            v2,
            no_lines,
        }
    }

    #[test]
    fn parameters_from_five_points() {
        let t = derive_parameters(inv(5, 0, 0, true)).unwrap();
        assert_eq!(t.w, [1, 10, 16]);
        assert_eq!((t.w11(), t.w12(), t.w21(), t.w22()), (1, 8, 5, 5));
        assert_eq!(t.total_points, 27);
        assert_eq!(t.diameter, 2);
        assert_eq!(t.rejected_branches.len(), 1);
        assert!(t.rejected_branches[0].contains("violates (4)"));
    }

    #[test]
    fn parameters_from_q6() {
        let t = derive_parameters(inv(27, 10, 16, false)).unwrap();
        assert_eq!(t.w, [1, 54, 64]);
        assert_eq!((t.w11(), t.w12(), t.w21(), t.w22()), (21, 32, 27, 27));
        assert_eq!(t.total_points, 119);
    }

    #[test]
    fn parameters_from_p1_are_diameter_one() {
        let t = derive_parameters(inv(3, 2, 0, false)).unwrap();
        assert_eq!(t.diameter, 1);
        assert_eq!(t.w, [1, 6, 0]);
        assert_eq!(t.total_points, 7);
        assert_eq!(t.w11(), 5);
    }

    #[test]
    fn parameters_reject_bad_inputs() {
        assert!(derive_parameters(inv(0, 0, 0, true)).is_err());
        // v_2 inconsistent with diameter <= 2
        assert!(derive_parameters(inv(10, 3, 2, false)).is_err());
    }

    #[test]
    fn fano_numerics_degenerate() {
        let r = check_numeric_relations(&fano(), Some(&projective_configuration(1).unwrap()));
        assert!(r.passed());
        assert_eq!(r.item("5")[0].lhs, Some(6));
        assert_eq!(r.item("6")[0].status, CheckStatus::Pass);
        assert_eq!(r.item("4")[0].status, CheckStatus::Inapplicable);
        assert_eq!(r.item("7")[0].status, CheckStatus::Inapplicable);
    }

    #[test]
    fn line_is_v_configuration_of_one_point() {
        let line = projective_configuration(1).unwrap();
        assert!(is_v_configuration(&line, &LineConfiguration::isolated_points(1)).holds);
        let r = is_v_configuration(&line, &LineConfiguration::isolated_points(2));
        assert!(!r.holds);
        assert_eq!(r.failure.unwrap().point, 0);
    }

    #[test]
    fn reconstruction_inapplicable_on_fano() {
        let r = verify_reconstruction_argument(&fano(), &projective_configuration(1).unwrap());
        assert!(!r.applicable);
        assert!(r.note.unwrap().contains("diameter 1"));
    }

    #[test]
    fn classify_p1_finds_the_plane() {
        let out = classify_v_configurations(
            &projective_configuration(1).unwrap(),
            SearchBudget::nodes(1_000_000),
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::Complete);
        assert_eq!(out.classes.len(), 1);
        assert!(crate::iso::are_isomorphic(&out.classes[0], &fano()).is_some());
    }

    #[test]
    fn tiny_budget_is_reported() {
        let out = classify_v_configurations(
            &LineConfiguration::isolated_points(5),
            SearchBudget::nodes(3),
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::BudgetExhausted);
        assert_eq!(out.stats.nodes, 3);
    }
}
