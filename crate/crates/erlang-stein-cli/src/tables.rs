//! The three moment-accuracy tables.

use erlang_stein::ctmc::{stationary_pmf_with, StationaryOptions};
use erlang_stein::diffusion::DiffusionDensity;
use erlang_stein::metrics::{mean_error, moment_error};
use erlang_stein::{ModelParams, Result};

use crate::report::{fixed2, rounded, sci2, Record};

pub const TABLE1_BLOCKS: [(u64, [f64; 5]); 2] = [
    (5, [3.0, 4.0, 4.9, 4.95, 4.99]),
    (500, [300.0, 400.0, 490.0, 495.0, 499.0]),
];
pub const TABLE2_LOADS: [f64; 6] = [300.0, 400.0, 490.0, 495.0, 499.0, 499.9];
pub const TABLE3_LOADS: [f64; 4] = [499.0, 499.9, 499.95, 499.99];
pub const TABLE_SERVERS: u64 = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub n: u64,
    pub r: f64,
    pub mean_x: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Row {
    pub r: f64,
    pub m2: f64,
    pub m2_err: f64,
    pub m10: f64,
    pub m10_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table3Row {
    pub r: f64,
    pub abs_zeta: f64,
    pub m2: f64,
    pub err: f64,
    pub zeta_err: f64,
    pub zeta_half_err: f64,
    pub zeta_three_half_err: f64,
}

fn prepare(r: f64, n: u64, tail_tol: f64, order: u32) -> Result<(erlang_stein::ctmc::DiscreteStationary, DiffusionDensity)> {
    let params = ModelParams::erlang_c(r, 1.0, n)?;
    let pmf = stationary_pmf_with(
        params,
        StationaryOptions {
            tail_tol,
            certify_order: order,
            ..StationaryOptions::default()
        },
    )?;
    let d = DiffusionDensity::new(&pmf.model)?;
    Ok((pmf, d))
}

/// `E X(∞)` and the mean error for `n ∈ {5, 500}`.
pub fn run_table1(tail_tol: f64) -> Result<Vec<Table1Row>> {
    let mut rows = Vec::with_capacity(10);
    for (n, loads) in TABLE1_BLOCKS {
        for r in loads {
            let (pmf, d) = prepare(r, n, tail_tol, 1)?;
            rows.push(Table1Row {
                n,
                r,
                mean_x: pmf.mean_count(),
                error: mean_error(&pmf, &d)?,
            });
        }
    }
    Ok(rows)
}

/// Second and tenth scaled moments at `n = 500`.
pub fn run_table2(tail_tol: f64) -> Result<Vec<Table2Row>> {
    TABLE2_LOADS
        .iter()
        .map(|&r| {
            let (pmf, d) = prepare(r, TABLE_SERVERS, tail_tol, 10)?;
            let two = moment_error(&pmf, &d, 2)?;
            let ten = moment_error(&pmf, &d, 10)?;
            Ok(Table2Row {
                r,
                m2: two.exact_m,
                m2_err: two.diff_m,
                m10: ten.exact_m,
                m10_err: ten.diff_m,
            })
        })
        .collect()
}

/// Second-moment error scaled by powers of `|ζ|` near heavy traffic.
pub fn run_table3(tail_tol: f64) -> Result<Vec<Table3Row>> {
    TABLE3_LOADS
        .iter()
        .map(|&r| {
            let (pmf, d) = prepare(r, TABLE_SERVERS, tail_tol, 2)?;
            let two = moment_error(&pmf, &d, 2)?;
            let z = pmf.model.zeta.abs();
            Ok(Table3Row {
                r,
                abs_zeta: z,
                m2: two.exact_m,
                err: two.diff_m,
                zeta_err: z * two.diff_m,
                zeta_half_err: z.sqrt() * two.diff_m,
                zeta_three_half_err: z.powf(1.5) * two.diff_m,
            })
        })
        .collect()
}

impl Table1Row {
    pub fn record(&self) -> Record {
        Record::new()
            .with("n", self.n)
            .with("R", self.r)
            .with("mean_X", self.mean_x)
            .with("error", self.error)
            .with("mean_X_rounded", fixed2(self.mean_x))
            .with("error_rounded", rounded(self.error))
    }
}

impl Table2Row {
    pub fn record(&self) -> Record {
        Record::new()
            .with("R", self.r)
            .with("m2", self.m2)
            .with("m2_err", self.m2_err)
            .with("m10", self.m10)
            .with("m10_err", self.m10_err)
            .with("m2_rounded", rounded(self.m2))
            .with("m2_err_rounded", rounded(self.m2_err))
            .with("m10_rounded", sci2(self.m10))
            .with("m10_err_rounded", rounded(self.m10_err))
    }
}

impl Table3Row {
    pub fn record(&self) -> Record {
        Record::new()
            .with("R", self.r)
            .with("abs_zeta", self.abs_zeta)
            .with("m2", self.m2)
            .with("err", self.err)
            .with("zeta_err", self.zeta_err)
            .with("zeta_half_err", self.zeta_half_err)
            .with("zeta_three_half_err", self.zeta_three_half_err)
            .with("abs_zeta_rounded", sci2(self.abs_zeta))
            .with("m2_rounded", sci2(self.m2))
            .with("err_rounded", fixed2(self.err))
            .with("zeta_err_rounded", sci2(self.zeta_err))
            .with("zeta_half_err_rounded", fixed2(self.zeta_half_err))
            .with("zeta_three_half_err_rounded", sci2(self.zeta_three_half_err))
    }
}
