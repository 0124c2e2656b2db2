use std::time::Instant;

use verlinde_core::verlinde::{
    check_arb_quot_identity, check_quot_symmetry, check_rank_level_symmetry,
    check_su_quot_identity, check_vi_forms, conformal_block_dim, quot_intersection,
    quot_intersection_roots, verlinde_arbitrary, verlinde_su, ArbDegreeParams, CheckReport,
    RankLevelParams,
};
use verlinde_core::{CertifiedInteger, Error, EvalOptions, Result};

use crate::record::{decimal_upper, ParamVal, Record, ReportCell, ValueCell};

/// Every integer-valued command, shared between single invocations and table
/// sweeps so both produce byte-identical records.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Formula {
    SuVerlinde,
    Quot,
    QuotRoots,
    ArbDegree,
    ConformalBlock,
    CheckSuQuot,
    CheckArbQuot,
    CheckStSym,
    CheckRankLevel,
    CheckViForms,
}

impl Formula {
    pub fn from_name(name: &str) -> Option<Formula> {
        Some(match name {
            "su-verlinde" => Formula::SuVerlinde,
            "quot" => Formula::Quot,
            "quot-roots" => Formula::QuotRoots,
            "arb-degree" => Formula::ArbDegree,
            "conformal-block" => Formula::ConformalBlock,
            "check-su-quot" => Formula::CheckSuQuot,
            "check-arb-quot" => Formula::CheckArbQuot,
            "check-st-sym" => Formula::CheckStSym,
            "check-rank-level" => Formula::CheckRankLevel,
            "check-vi-forms" => Formula::CheckViForms,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Formula::SuVerlinde => "su-verlinde",
            Formula::Quot => "quot",
            Formula::QuotRoots => "quot-roots",
            Formula::ArbDegree => "arb-degree",
            Formula::ConformalBlock => "conformal-block",
            Formula::CheckSuQuot => "check-su-quot",
            Formula::CheckArbQuot => "check-arb-quot",
            Formula::CheckStSym => "check-st-sym",
            Formula::CheckRankLevel => "check-rank-level",
            Formula::CheckViForms => "check-vi-forms",
        }
    }

    /// Canonical parameter order, fixing both CSV columns and sweep keys.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Formula::ArbDegree | Formula::ConformalBlock | Formula::CheckArbQuot => {
                &["h", "k", "r", "d", "g"]
            }
            _ => &["r", "k", "g"],
        }
    }

    /// Evaluates on `vals` (aligned with `param_names`) and renders a record.
    pub fn run(&self, vals: &[i64], opts: &EvalOptions) -> Result<Record> {
        let names = self.param_names();
        assert_eq!(vals.len(), names.len());
        let params: Vec<(String, ParamVal)> = names
            .iter()
            .zip(vals)
            .map(|(n, v)| (n.to_string(), ParamVal::Int(*v)))
            .collect();

        let u = |i: usize| -> Result<u32> {
            u32::try_from(vals[i]).map_err(|_| {
                Error::InvalidParams(format!("{} must be a nonnegative integer", names[i]))
            })
        };
        let start = Instant::now();
        let record = match self {
            Formula::SuVerlinde => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                integer_record(self.name(), params, &verlinde_su(p, opts)?, start)
            }
            Formula::Quot => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                integer_record(self.name(), params, &quot_intersection(p, opts)?, start)
            }
            Formula::QuotRoots => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                integer_record(self.name(), params, &quot_intersection_roots(p, opts)?, start)
            }
            Formula::ArbDegree => {
                let p = ArbDegreeParams::new(u(0)?, u(1)?, u(2)?, u(3)?, u(4)?);
                integer_record(self.name(), params, &verlinde_arbitrary(p, opts)?, start)
            }
            Formula::ConformalBlock => {
                let p = ArbDegreeParams::new(u(0)?, u(1)?, u(2)?, u(3)?, u(4)?);
                integer_record(self.name(), params, &conformal_block_dim(p, opts)?, start)
            }
            Formula::CheckSuQuot => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                check_record(self.name(), params, &check_su_quot_identity(p, opts)?, start)
            }
            Formula::CheckArbQuot => {
                let p = ArbDegreeParams::new(u(0)?, u(1)?, u(2)?, u(3)?, u(4)?);
                check_record(self.name(), params, &check_arb_quot_identity(p, opts)?, start)
            }
            Formula::CheckStSym => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                check_record(self.name(), params, &check_quot_symmetry(p, opts)?, start)
            }
            Formula::CheckRankLevel => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                check_record(self.name(), params, &check_rank_level_symmetry(p, opts)?, start)
            }
            Formula::CheckViForms => {
                let p = RankLevelParams::new(u(0)?, u(1)?, u(2)?);
                check_record(self.name(), params, &check_vi_forms(p, opts)?, start)
            }
        };
        Ok(record)
    }
}

pub fn elapsed_ms(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}

fn integer_record(
    command: &str,
    params: Vec<(String, ParamVal)>,
    ci: &CertifiedInteger,
    start: Instant,
) -> Record {
    Record {
        command: command.to_string(),
        params,
        value: ValueCell::Int(ci.value.clone()),
        certified: true,
        precision_bits: ci.source.prec(),
        error_radius: decimal_upper(&ci.source.rad().to_dyadic(), 3),
        elapsed_ms: elapsed_ms(start),
        report: None,
    }
}

fn check_record(
    command: &str,
    params: Vec<(String, ParamVal)>,
    rep: &CheckReport,
    start: Instant,
) -> Record {
    Record {
        command: command.to_string(),
        params,
        value: ValueCell::Int(rep.lhs.clone()),
        certified: true,
        precision_bits: rep.precision_bits,
        // Both sides are exact integers by the time they are compared.
        error_radius: "0".to_string(),
        elapsed_ms: elapsed_ms(start),
        report: Some(ReportCell {
            holds: rep.holds,
            lhs: Some(rep.lhs.clone()),
            rhs: Some(rep.rhs.clone()),
            label: rep.label.clone(),
        }),
    }
}
