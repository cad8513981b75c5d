//! Country economic value added: NOPAT less a capital charge on total wealth.

use serde::Serialize;
use thiserror::Error;

use crate::indicators::CountryEconomy;

#[derive(Debug, Error, PartialEq)]
pub enum EvaError {
    #[error("{field} = {value} is outside [0, 1)")]
    RateOutOfRange { field: &'static str, value: f64 },
    #[error("{0} is not finite")]
    NonFinite(&'static str),
    #[error("gdp must be non-negative, got {0}")]
    NegativeGdp(f64),
    #[error("total wealth must be positive to imply a rate, got {0}")]
    NonPositiveWealth(f64),
    #[error("an EVA series needs at least one record")]
    Empty,
}

pub type Result<T, E = EvaError> = std::result::Result<T, E>;

fn check_rate(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(EvaError::RateOutOfRange { field, value })
    }
}

fn check_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(EvaError::NonFinite(field))
    }
}

/// Net operating profit after taxes: `gdp · (1 − atr)`.
pub fn nopat(gdp: f64, atr: f64) -> Result<f64> {
    check_finite("gdp", gdp)?;
    if gdp < 0.0 {
        return Err(EvaError::NegativeGdp(gdp));
    }
    check_rate("aggregate_tax_rate", atr)?;
    Ok(gdp * (1.0 - atr))
}

/// Produced + human + natural capital + net foreign assets.
pub fn total_wealth(produced: f64, human: f64, natural: f64, net_foreign: f64) -> Result<f64> {
    check_finite("produced_capital", produced)?;
    check_finite("human_capital", human)?;
    check_finite("natural_capital", natural)?;
    check_finite("net_foreign_assets", net_foreign)?;
    Ok(produced + human + natural + net_foreign)
}

/// `nopat − total_wealth · cbr`.
pub fn eva_value(nopat: f64, total_wealth: f64, cbr: f64) -> Result<f64> {
    check_finite("nopat", nopat)?;
    check_finite("total_wealth", total_wealth)?;
    check_rate("central_bank_rate", cbr)?;
    Ok(nopat - total_wealth * cbr)
}

/// Central bank rate that reproduces a given EVA: `(gdp·(1−atr) − eva) / tw`.
pub fn implied_cbr(gdp: f64, atr: f64, total_wealth: f64, eva: f64) -> Result<f64> {
    check_finite("total_wealth", total_wealth)?;
    check_finite("eva", eva)?;
    if total_wealth <= 0.0 {
        return Err(EvaError::NonPositiveWealth(total_wealth));
    }
    Ok((nopat(gdp, atr)? - eva) / total_wealth)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaRecord {
    /// Calendar year, or offset from the base year for projections.
    pub year: i32,
    pub gdp: f64,
    pub nopat: f64,
    pub total_wealth: f64,
    pub capital_charge: f64,
    pub eva: f64,
}

impl EvaRecord {
    pub fn compute(year: i32, gdp: f64, atr: f64, total_wealth: f64, cbr: f64) -> Result<Self> {
        let nopat = nopat(gdp, atr)?;
        let eva = eva_value(nopat, total_wealth, cbr)?;
        Ok(Self {
            year,
            gdp,
            nopat,
            total_wealth,
            capital_charge: total_wealth * cbr,
            eva,
        })
    }
}

/// Mean, minimum and maximum EVA with the years they occur in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaSummary {
    pub mean: f64,
    pub min: f64,
    pub min_year: i32,
    pub max: f64,
    pub max_year: i32,
}

/// Ordered EVA records. Summary statistics are always derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaSeries {
    records: Vec<EvaRecord>,
}

impl EvaSeries {
    pub fn from_records(records: Vec<EvaRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(EvaError::Empty);
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[EvaRecord] {
        &self.records
    }

    pub fn eva_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.eva).collect()
    }

    pub fn mean_eva(&self) -> f64 {
        self.records.iter().map(|r| r.eva).sum::<f64>() / self.records.len() as f64
    }

    /// Earliest record holding the minimum EVA.
    pub fn min_eva(&self) -> (i32, f64) {
        let mut best = &self.records[0];
        for r in &self.records[1..] {
            if r.eva < best.eva {
                best = r;
            }
        }
        (best.year, best.eva)
    }

    /// Earliest record holding the maximum EVA.
    pub fn max_eva(&self) -> (i32, f64) {
        let mut best = &self.records[0];
        for r in &self.records[1..] {
            if r.eva > best.eva {
                best = r;
            }
        }
        (best.year, best.eva)
    }

    pub fn summary(&self) -> EvaSummary {
        let (min_year, min) = self.min_eva();
        let (max_year, max) = self.max_eva();
        EvaSummary {
            mean: self.mean_eva(),
            min,
            min_year,
            max,
            max_year,
        }
    }
}

/// Applies NOPAT, total wealth and EVA year by year over an economy.
pub fn eva_series(econ: &CountryEconomy) -> Result<EvaSeries> {
    let atr = econ.aggregate_tax_rate();
    let cbr = econ.central_bank_rate();
    let components = econ
        .produced_capital()
        .values()
        .zip(econ.human_capital().values())
        .zip(econ.natural_capital().values())
        .zip(econ.net_foreign_assets().values());
    let records = econ
        .gdp()
        .points()
        .iter()
        .zip(components)
        .map(|(&(year, gdp), (((pc, hc), nc), nfa))| {
            EvaRecord::compute(year, gdp, atr, total_wealth(pc, hc, nc, nfa)?, cbr)
        })
        .collect::<Result<Vec<_>>>()?;
    EvaSeries::from_records(records)
}
