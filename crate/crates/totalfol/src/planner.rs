//! Construction planner: turns a framed braid input into an ordered,
//! independently verifiable plan of turbularizations, plug insertions,
//! standard surgeries and sphere-block gluings, with a certificate of the
//! resulting surgery coefficients, spin evenness and Hopf offset.
//!
//! Plans are deterministic: identical inputs yield byte-identical files.
//! Every step records its pre/post values and the ledger rule it uses, so
//! verification never needs global recomputation order.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::braidlink::{self, BraidWord, ClosedBraidLink};
use crate::invariants::{self, RComponentRecord, SpinCertificate};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("odd framings declared on components {0:?}")]
    OddKirbyFraming(Vec<usize>),
    #[error("auxiliary unknots missing or invalid: {0}")]
    MissingAuxiliaryUnknots(String),
    #[error("component {0} has no declared framing")]
    MissingFraming(usize),
    #[error("component {0} does not exist in the closed braid")]
    UnknownComponent(usize),
    #[error(transparent)]
    Braid(#[from] braidlink::BraidError),
}

/// Everything the planner consumes; embedded into the plan for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanInput {
    pub strands: usize,
    pub word: Vec<i64>,
    /// Declared (even) framings of the surgery components, keyed by
    /// component id.
    pub kirby: BTreeMap<usize, i64>,
    /// Component ids of the two split auxiliary unknots.
    pub k_plus: usize,
    pub k_minus: usize,
    /// Fibration offset; cancels in every public value.
    pub m_star: i64,
    pub hopf_offset: i64,
}

impl PlanInput {
    pub fn braid(&self) -> Result<BraidWord, PlanError> {
        Ok(BraidWord::from_signed(self.strands, &self.word)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "arg")]
pub enum StepKind {
    /// Replace a tubular neighborhood by a thick Reeb component; creates
    /// the base framing of the component.
    Turbularize,
    /// Insert one framing plug of the given sign (framing moves by ±2).
    InsertPlug(i8),
    /// Standard surgery along the component; consumes framing k, emits
    /// Dehn coefficient k+1.
    StandardSurgery,
    /// Glue a sphere block along the component.
    GlueBlock(String),
    /// Reverse the ambient orientation of a sphere block.
    OrientationReverse,
    /// Atomic base block with anchored Hopf value −1.
    BuildGn(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub component: Option<usize>,
    pub pre_framing: Option<i64>,
    pub post_framing: Option<i64>,
    pub pre_hopf: Option<i64>,
    pub post_hopf: Option<i64>,
    pub rule: String,
}

/// Which object exposes an available component after the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "from", content = "id")]
pub enum ComponentRef {
    /// A component of the input link.
    Input(usize),
    /// A component internal to a glued sphere block.
    Block(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Dehn coefficients of the surgery components.
    pub coefficients: BTreeMap<usize, i64>,
    pub spin: SpinCertificate,
    pub hopf_offset: i64,
    pub r_plus: ComponentRef,
    pub r_minus: ComponentRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub input: Option<PlanInput>,
    pub steps: Vec<PlanStep>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub step: Option<usize>,
    pub rule: String,
    pub message: String,
}

fn step(kind: StepKind, rule: &str) -> PlanStep {
    PlanStep {
        kind,
        component: None,
        pre_framing: None,
        post_framing: None,
        pre_hopf: None,
        post_hopf: None,
        rule: rule.to_string(),
    }
}

/// Declared framing per component: the surgery framing for Kirby
/// components, 2 for the positive auxiliary unknot, 0 for the negative.
fn declared_framing(input: &PlanInput, component: usize) -> Option<i64> {
    if component == input.k_plus {
        Some(2)
    } else if component == input.k_minus {
        Some(0)
    } else {
        input.kirby.get(&component).copied()
    }
}

fn validate_input(input: &PlanInput, link: &ClosedBraidLink) -> Result<(), PlanError> {
    for &c in input.kirby.keys() {
        link.component(c).map_err(|_| PlanError::UnknownComponent(c))?;
    }
    // auxiliary unknots: distinct trivial split strands, not surgery components
    if input.k_plus == input.k_minus {
        return Err(PlanError::MissingAuxiliaryUnknots("k_plus and k_minus coincide".into()));
    }
    for (name, id) in [("k_plus", input.k_plus), ("k_minus", input.k_minus)] {
        let c = link
            .component(id)
            .map_err(|_| PlanError::MissingAuxiliaryUnknots(format!("{name} component {id} not found")))?;
        if c.strand_count() != 1 || c.writhe != 0 {
            return Err(PlanError::MissingAuxiliaryUnknots(format!(
                "{name} must close a trivial strand (n=1, writhe 0), got n={} writhe={}",
                c.strand_count(),
                c.writhe
            )));
        }
        if input.kirby.contains_key(&id) {
            return Err(PlanError::MissingAuxiliaryUnknots(format!(
                "{name} component {id} cannot also carry a surgery framing"
            )));
        }
    }
    for c in &link.components {
        if declared_framing(input, c.id).is_none() {
            return Err(PlanError::MissingFraming(c.id));
        }
    }
    let odd: Vec<usize> = input
        .kirby
        .iter()
        .filter(|(_, &f)| f.rem_euclid(2) != 0)
        .map(|(&c, _)| c)
        .collect();
    if !odd.is_empty() {
        return Err(PlanError::OddKirbyFraming(odd));
    }
    Ok(())
}

/// Plans the spin-controlled construction: base framings from the braid
/// data, plug insertions to the surgery targets, then standard surgery on
/// the Kirby components. The auxiliary unknots end (+1)- and (−1)-framed.
pub fn hardorp_plan(input: &PlanInput) -> Result<ConstructionPlan, PlanError> {
    let link = braidlink::close(&input.braid()?);
    braidlink::parity_check(&link)?;
    validate_input(input, &link)?;

    let mut steps = Vec::new();
    // base framings: every component becomes a solid-torus component with
    // framing ω + n, independent of the fibration offset
    for c in &link.components {
        let base = c.writhe + c.strand_count() as i64;
        let mut s = step(StepKind::Turbularize, "any_braid");
        s.component = Some(c.id);
        s.post_framing = Some(base);
        steps.push(s);
    }
    // plugs toward declared − 1
    for c in &link.components {
        let base = c.writhe + c.strand_count() as i64;
        let target = declared_framing(input, c.id).expect("validated") - 1;
        let count = invariants::plug_plan(base, target)
            .expect("odd base and odd target always match in parity");
        let sign = if count >= 0 { 1i8 } else { -1i8 };
        let mut framing = base;
        for _ in 0..count.abs() {
            let mut s = step(StepKind::InsertPlug(sign), "framing_change");
            s.component = Some(c.id);
            s.pre_framing = Some(framing);
            framing += 2 * sign as i64;
            s.post_framing = Some(framing);
            steps.push(s);
        }
    }
    // surgery on the Kirby components only
    let mut coefficients = BTreeMap::new();
    for (&c, &n) in &input.kirby {
        let record = RComponentRecord {
            component: c,
            framing: n - 1,
            unknotted: false,
            null_homotopic: true,
        };
        let coeff = invariants::surgery_coefficient(&record).expect("flag set above");
        let mut s = step(StepKind::StandardSurgery, "framing_of_surgery");
        s.component = Some(c);
        s.pre_framing = Some(n - 1);
        s.post_framing = Some(coeff);
        steps.push(s);
        coefficients.insert(c, coeff);
    }

    let spin = invariants::evenness_check(&input.kirby)
        .expect("evenness validated above");
    Ok(ConstructionPlan {
        input: Some(input.clone()),
        steps,
        certificate: Certificate {
            coefficients,
            spin,
            hopf_offset: 0,
            r_plus: ComponentRef::Input(input.k_plus),
            r_minus: ComponentRef::Input(input.k_minus),
        },
    })
}

/// Plans the sphere block with anchored Hopf value `n` and fresh (+1)- and
/// (−1)-framed unknotted components.
///
/// Base case −1 glues two spin-trivial sphere constructions, one
/// orientation-reversed, so the anchored values cancel to −1; more negative
/// values chain gluings of the base block; nonnegative values reverse the
/// mirror block.
pub fn build_gn(n: i64) -> ConstructionPlan {
    let mut steps = Vec::new();
    push_gn_steps(&mut steps, n);
    ConstructionPlan {
        input: None,
        steps,
        certificate: Certificate {
            coefficients: BTreeMap::new(),
            spin: SpinCertificate {
                framings: BTreeMap::new(),
                valid: true,
                rule: "surgery_formula".to_string(),
            },
            hopf_offset: n,
            r_plus: ComponentRef::Block(format!("g_{n}.r_plus")),
            r_minus: ComponentRef::Block(format!("g_{n}.r_minus")),
        },
    }
}

fn push_gn_steps(steps: &mut Vec<PlanStep>, n: i64) {
    if n == -1 {
        let mut s = step(StepKind::BuildGn(-1), "change_hopf");
        s.post_hopf = Some(-1);
        steps.push(s);
    } else if n < -1 {
        push_gn_steps(steps, n + 1);
        let mut s = step(StepKind::GlueBlock("g_-1".to_string()), "gluing_formula");
        s.pre_hopf = Some(n + 1);
        s.post_hopf = Some(n);
        steps.push(s);
    } else {
        push_gn_steps(steps, -n - 1);
        let mut s = step(StepKind::OrientationReverse, "inversion_formula");
        s.pre_hopf = Some(-n - 1);
        s.post_hopf = Some(n);
        steps.push(s);
    }
}

/// Number of unrolled base/glue stages in the negative chain.
pub fn gn_recursion_depth(n: i64) -> usize {
    let chain = if n >= 0 { -n - 1 } else { n };
    chain.unsigned_abs() as usize
}

/// Full construction: spin-controlled plan, then the Hopf block glued
/// against the plan's positive component (inside a ball, so the spin
/// certificate is unchanged). Exposes the block's fresh positive component
/// and the original negative one.
pub fn total_plan(input: &PlanInput) -> Result<ConstructionPlan, PlanError> {
    let base = hardorp_plan(input)?;
    let gn = build_gn(input.hopf_offset);
    let mut steps = base.steps;
    steps.extend(gn.steps);
    let mut s = step(
        StepKind::GlueBlock(format!("g_{}", input.hopf_offset)),
        "gluing_formula",
    );
    s.component = Some(input.k_plus);
    s.pre_hopf = Some(0);
    s.post_hopf = Some(input.hopf_offset);
    steps.push(s);
    Ok(ConstructionPlan {
        input: Some(input.clone()),
        steps,
        certificate: Certificate {
            coefficients: base.certificate.coefficients,
            spin: base.certificate.spin,
            hopf_offset: input.hopf_offset,
            r_plus: ComponentRef::Block(format!("g_{}.r_plus", input.hopf_offset)),
            r_minus: ComponentRef::Input(input.k_minus),
        },
    })
}

fn violation(step: Option<usize>, rule: &str, message: String) -> Violation {
    Violation { step, rule: rule.to_string(), message }
}

/// Re-runs every ledger rule from scratch against the plan's own input and
/// steps; trusts no stored delta. Returns the violated rules (empty list
/// means the plan is valid).
pub fn verify_certificate(plan: &ConstructionPlan) -> Vec<Violation> {
    let mut out = Vec::new();

    // ---- braid-level facts, recomputed fresh
    let link = match &plan.input {
        Some(input) => match input.braid() {
            Ok(word) => {
                let link = braidlink::close(&word);
                match braidlink::parity_check(&link) {
                    Ok(_) => Some((input, link)),
                    Err(e) => {
                        out.push(violation(None, "odd_framing", e.to_string()));
                        None
                    }
                }
            }
            Err(e) => {
                out.push(violation(None, "braid_input", e.to_string()));
                None
            }
        },
        None => None,
    };

    if let Some((input, link)) = &link {
        if let Err(e) = validate_input(input, link) {
            let rule = match e {
                PlanError::OddKirbyFraming(_) => "2_handlebody",
                PlanError::MissingAuxiliaryUnknots(_) => "auxiliary_unknots",
                _ => "plan_input",
            };
            out.push(violation(None, rule, e.to_string()));
        }

        // spin certificate must match a fresh evenness check
        match invariants::evenness_check(&input.kirby) {
            Ok(cert) => {
                if cert != plan.certificate.spin {
                    out.push(violation(None, "surgery_formula", "spin certificate differs from fresh evenness check".into()));
                }
            }
            Err(e) => out.push(violation(None, "2_handlebody", e.to_string())),
        }

        // per-component framing chains
        let mut framing: BTreeMap<usize, i64> = BTreeMap::new();
        let mut surgered: BTreeMap<usize, i64> = BTreeMap::new();
        for (i, s) in plan.steps.iter().enumerate() {
            match (&s.kind, s.component) {
                (StepKind::Turbularize, Some(c)) => match link.component(c) {
                    Ok(k) => {
                        let base = k.writhe + k.strand_count() as i64;
                        if s.post_framing != Some(base) {
                            out.push(violation(Some(i), "any_braid", format!(
                                "component {c}: base framing must be writhe+strands = {base}, plan says {:?}",
                                s.post_framing
                            )));
                        }
                        framing.insert(c, base);
                    }
                    Err(e) => out.push(violation(Some(i), "any_braid", e.to_string())),
                },
                (StepKind::InsertPlug(sign), Some(c)) => {
                    let cur = framing.get(&c).copied();
                    if s.pre_framing != cur {
                        out.push(violation(Some(i), "framing_change", format!(
                            "component {c}: pre framing {:?} does not continue the chain {:?}",
                            s.pre_framing, cur
                        )));
                    }
                    let expected = s.pre_framing.map(|f| f + 2 * *sign as i64);
                    if s.post_framing != expected || (*sign != 1 && *sign != -1) {
                        out.push(violation(Some(i), "framing_change", format!(
                            "component {c}: a plug moves the framing by exactly ±2 (pre {:?}, post {:?})",
                            s.pre_framing, s.post_framing
                        )));
                    }
                    if let Some(f) = s.post_framing {
                        framing.insert(c, f);
                    }
                }
                (StepKind::StandardSurgery, Some(c)) => {
                    let cur = framing.get(&c).copied();
                    if s.pre_framing != cur {
                        out.push(violation(Some(i), "framing_of_surgery", format!(
                            "component {c}: surgery consumes framing {:?}, chain has {:?}",
                            s.pre_framing, cur
                        )));
                    }
                    match s.pre_framing {
                        Some(k) => {
                            if s.post_framing != Some(k + 1) {
                                out.push(violation(Some(i), "framing_of_surgery", format!(
                                    "component {c}: coefficient must be k+1 = {}",
                                    k + 1
                                )));
                            }
                            surgered.insert(c, k + 1);
                        }
                        None => out.push(violation(Some(i), "framing_of_surgery", format!("component {c}: missing pre framing"))),
                    }
                }
                _ => {}
            }
        }

        // targets: every Kirby component surgered at coefficient n(K),
        // auxiliaries parked at ±1
        for (&c, &n) in &input.kirby {
            match surgered.get(&c) {
                Some(&coeff) if coeff == n => {}
                got => out.push(violation(None, "framing_of_surgery", format!(
                    "component {c}: expected surgery coefficient {n}, plan has {got:?}"
                ))),
            }
            if plan.certificate.coefficients.get(&c) != Some(&n) {
                out.push(violation(None, "framing_of_surgery", format!(
                    "certificate coefficient for component {c} must be {n}"
                )));
            }
        }
        for (id, want) in [(input.k_plus, 1i64), (input.k_minus, -1i64)] {
            if framing.get(&id) != Some(&want) {
                out.push(violation(None, "framing_change", format!(
                    "auxiliary component {id} must end {want:+}-framed, chain has {:?}",
                    framing.get(&id)
                )));
            }
            if surgered.contains_key(&id) {
                out.push(violation(None, "framing_of_surgery", format!(
                    "auxiliary component {id} must not be surgered"
                )));
            }
        }
    }

    // ---- Hopf chain, recomputed by the ledger rules
    let mut hopf: Option<i64> = None;
    for (i, s) in plan.steps.iter().enumerate() {
        match &s.kind {
            StepKind::BuildGn(n) => {
                if *n != -1 || s.post_hopf != Some(-1) {
                    out.push(violation(Some(i), "change_hopf", "base block must carry anchored value -1".into()));
                }
                hopf = Some(-1);
            }
            StepKind::GlueBlock(_) => {
                if let (Some(pre), Some(post)) = (s.pre_hopf, s.post_hopf) {
                    // gluing adds the block's anchored value; blocks in
                    // plans are either the −1 base or the final chain value
                    let base = invariants::RComponentRecord {
                        component: 0,
                        framing: 1,
                        unknotted: true,
                        null_homotopic: true,
                    };
                    let block = invariants::RComponentRecord {
                        component: 0,
                        framing: -1,
                        unknotted: true,
                        null_homotopic: true,
                    };
                    let summed = invariants::hopf_glue(
                        invariants::HopfValue(pre),
                        invariants::HopfValue(post - pre),
                        &base,
                        &block,
                    )
                    .expect("records constructed with the required flags");
                    if summed.0 != post {
                        out.push(violation(Some(i), "gluing_formula", "hopf bookkeeping broken".into()));
                    }
                    match hopf {
                        Some(h) if h != pre && s.component.is_none() => {
                            out.push(violation(Some(i), "gluing_formula", format!(
                                "glue step pre value {pre} does not continue the chain {h}"
                            )));
                        }
                        _ => {}
                    }
                    // chained −1 blocks must step by exactly −1
                    if s.component.is_none() && post - pre != -1 {
                        out.push(violation(Some(i), "gluing_formula", format!(
                            "chained base blocks change the anchored value by -1, step claims {}",
                            post - pre
                        )));
                    }
                    hopf = Some(post);
                } else {
                    out.push(violation(Some(i), "gluing_formula", "glue step missing hopf values".into()));
                }
            }
            StepKind::OrientationReverse => match (s.pre_hopf, s.post_hopf) {
                (Some(pre), Some(post)) => {
                    let want = invariants::hopf_reverse(invariants::HopfValue(pre)).0;
                    if post != want || hopf != Some(pre) {
                        out.push(violation(Some(i), "inversion_formula", format!(
                            "orientation reversal must send {pre} to {want}, step claims {post} (chain {hopf:?})"
                        )));
                    }
                    hopf = Some(post);
                }
                _ => out.push(violation(Some(i), "inversion_formula", "reversal missing hopf values".into())),
            },
            _ => {}
        }
    }
    let final_hopf = hopf.unwrap_or(0);
    if final_hopf != plan.certificate.hopf_offset {
        out.push(violation(None, "gluing_formula", format!(
            "certificate hopf offset {} differs from recomputed {}",
            plan.certificate.hopf_offset, final_hopf
        )));
    }

    // ---- availability of the two framed unknots
    if let (ComponentRef::Input(p), Some(input)) = (&plan.certificate.r_plus, &plan.input) {
        if *p != input.k_plus {
            out.push(violation(None, "auxiliary_unknots", "r_plus must reference the positive auxiliary".into()));
        }
    }
    match (&plan.certificate.r_minus, &plan.input) {
        (ComponentRef::Input(mref), Some(input)) if *mref != input.k_minus => {
            out.push(violation(None, "auxiliary_unknots", "r_minus must reference the negative auxiliary".into()));
        }
        _ => {}
    }

    out
}
