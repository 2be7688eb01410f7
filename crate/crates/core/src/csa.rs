//! Leader selection for lobsters by covering detected MPCS.
//!
//! Steps: 0 validate and start empty; 1 twins; 2 quads; 3 check; 4 spine
//! patterns; 5 check; 6 add spine vertices that follow a loaded vertex but
//! carry nothing themselves, checking after each one (or once, in strict mode).

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::control::{minimum_hitting_set_uncounted, LeaderSet};
use crate::error::Result;
use crate::graph::{attachment_profile, find_spine, AttachmentProfile, Graph};
use crate::mpcs::{detect_quads, detect_spine_patterns, detect_twins, CriticalRecord};
use crate::Vertex;

/// Largest follower count certified by the exact oracle under [`Certify::Auto`].
pub const AUTO_CERTIFY_MAX_FOLLOWERS: usize = 30;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsaMode {
    /// Cover all MPCS found so far with a minimum hitting set.
    #[default]
    HittingSet,
    /// Take one vertex from every MPCS not already hit.
    PerSet,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certify {
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsaOptions {
    pub mode: CsaMode,
    /// Per-set mode picks uniformly from the set with this seed instead of
    /// taking the lowest id.
    pub seed: Option<u64>,
    /// Add every fallback vertex at once, then check.
    pub strict_step6: bool,
    pub certify: Certify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    CantFind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepEntry {
    pub step: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mpcs: Option<Vec<Vertex>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<Vertex>,
    /// Leader covering this entry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leader: Option<Vertex>,
    /// Outcome of a controllability check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub controllable: Option<bool>,
}

impl StepEntry {
    fn check(step: u8, controllable: bool) -> Self {
        StepEntry {
            step,
            mpcs: None,
            fallback: None,
            leader: None,
            controllable: Some(controllable),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderReport {
    pub leaders: Vec<Vertex>,
    pub steps: Vec<StepEntry>,
    pub verdict_float: bool,
    pub verdict_exact: Option<bool>,
    pub status: Status,
    /// Check step (3, 5 or 6) that first succeeded.
    pub found_at_step: Option<u8>,
    pub n: usize,
    pub mpcs: Vec<CriticalRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl LeaderReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serialisable")
    }
}

/// Spine vertices whose predecessor carries attachments while they carry none,
/// scanning both directions, in ascending spine order.
pub fn step6_fallback_vertices(profile: &AttachmentProfile) -> Vec<Vertex> {
    let loads = &profile.loads;
    let len = loads.len();
    let mut pick = vec![false; len];
    for i in 1..len {
        if loads[i - 1].load() > 0 && loads[i].load() == 0 {
            pick[i] = true;
        }
        let j = len - 1 - i;
        if loads[j + 1].load() > 0 && loads[j].load() == 0 {
            pick[j] = true;
        }
    }
    (0..len).filter(|&i| pick[i]).map(|i| loads[i].vertex).collect()
}

struct Runner<'a> {
    an: &'a Analysis,
    opts: CsaOptions,
    rng: Option<ChaCha8Rng>,
    leaders: Vec<Vertex>,
    catalog: Vec<CriticalRecord>,
    steps: Vec<StepEntry>,
}

impl Runner<'_> {
    fn add_mpcs(&mut self, step: u8, found: Vec<CriticalRecord>) {
        for rec in found {
            if self.catalog.iter().any(|r| r.vertices == rec.vertices) {
                continue;
            }
            if self.opts.mode == CsaMode::PerSet && !rec.vertices.iter().any(|v| self.leaders.contains(v)) {
                let v = match self.rng.as_mut() {
                    Some(rng) => *rec.vertices.choose(rng).expect("MPCS are nonempty"),
                    None => rec.vertices[0],
                };
                self.leaders.push(v);
            }
            self.steps.push(StepEntry {
                step,
                mpcs: Some(rec.vertices.clone()),
                fallback: None,
                leader: None,
                controllable: None,
            });
            self.catalog.push(rec);
        }
        if self.opts.mode == CsaMode::HittingSet {
            let sets: Vec<Vec<Vertex>> = self.catalog.iter().map(|r| r.vertices.clone()).collect();
            self.leaders = minimum_hitting_set_uncounted(&sets).set;
        }
        self.leaders.sort_unstable();
        self.leaders.dedup();
        for e in &mut self.steps {
            if let Some(s) = &e.mpcs {
                e.leader = s.iter().copied().find(|v| self.leaders.contains(v));
            }
        }
    }

    fn check(&mut self, step: u8) -> Result<bool> {
        let ok = if self.leaders.is_empty() {
            false
        } else {
            let set = LeaderSet::new(self.an.n(), &self.leaders)?;
            self.an.controllable(&set)?.controllable
        };
        self.steps.push(StepEntry::check(step, ok));
        Ok(ok)
    }

    fn fallback(&mut self, vertices: &[Vertex]) -> Result<bool> {
        let fresh: Vec<Vertex> = vertices.iter().copied().filter(|v| !self.leaders.contains(v)).collect();
        for &v in &fresh {
            self.leaders.push(v);
            self.leaders.sort_unstable();
            self.steps.push(StepEntry {
                step: 6,
                mpcs: None,
                fallback: Some(v),
                leader: Some(v),
                controllable: None,
            });
            if !self.opts.strict_step6 && self.check(6)? {
                return Ok(true);
            }
        }
        if self.opts.strict_step6 || fresh.is_empty() {
            return self.check(6);
        }
        Ok(false)
    }
}

/// Runs the algorithm on a lobster. Non-trees and trees with a vertex farther
/// than 2 from the spine are rejected.
pub fn run_csa(g: &Graph, opts: CsaOptions) -> Result<LeaderReport> {
    let spine = find_spine(g)?;
    let profile = attachment_profile(g, &spine)?;
    let an = Analysis::new(g.clone())?;
    run_csa_on(&an, &spine, &profile, opts)
}

/// As [`run_csa`], reusing an existing analysis and attachment profile.
pub fn run_csa_on(
    an: &Analysis,
    spine: &[Vertex],
    profile: &AttachmentProfile,
    opts: CsaOptions,
) -> Result<LeaderReport> {
    let mut run = Runner {
        an,
        opts,
        rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
        leaders: Vec::new(),
        catalog: Vec::new(),
        steps: Vec::new(),
    };
    run.add_mpcs(1, detect_twins(an)?);
    run.add_mpcs(2, detect_quads(an)?);
    let mut found_at = None;
    if run.check(3)? {
        found_at = Some(3);
    } else {
        run.add_mpcs(4, detect_spine_patterns(an, spine)?);
        if run.check(5)? {
            found_at = Some(5);
        } else if run.fallback(&step6_fallback_vertices(profile))? {
            found_at = Some(6);
        }
    }

    let mut report = LeaderReport {
        leaders: run.leaders,
        steps: run.steps,
        verdict_float: found_at.is_some(),
        verdict_exact: None,
        status: if found_at.is_some() { Status::Found } else { Status::CantFind },
        found_at_step: found_at,
        n: an.n(),
        mpcs: run.catalog,
        warnings: Vec::new(),
    };
    if report.leaders.is_empty() {
        report.warnings.push("no MPCS detected and no fallback vertices; empty leader set".into());
    }
    if report.status == Status::Found {
        let followers = an.n() - report.leaders.len();
        let certify = match opts.certify {
            Certify::Always => true,
            Certify::Never => false,
            Certify::Auto => followers <= AUTO_CERTIFY_MAX_FOLLOWERS,
        };
        if certify {
            let set = LeaderSet::new(an.n(), &report.leaders)?;
            let exact = an.kalman_exact(&set)?.controllable;
            report.verdict_exact = Some(exact);
            if !exact {
                report.status = Status::CantFind;
                report.found_at_step = None;
                report.warnings.push("exact oracle rejected the floating-point verdict".into());
            }
        }
    }
    Ok(report)
}
