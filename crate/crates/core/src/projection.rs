//! Forward projection under an R&D growth scenario, plus discounting.
//!
//! GDP grows each year by `elasticity × rd_growth`. Projected periods are
//! integer offsets `1..=horizon` from the configured base year.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::eva::{EvaError, EvaRecord, EvaSeries};
use crate::indicators::{CountryEconomy, IndicatorError, IndicatorSeries, SeriesSource, Unit};

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("rd_growth must exceed -1, got {0}")]
    RdGrowth(f64),
    #[error("{field} = {value} is outside [0, 1)")]
    RateOutOfRange { field: &'static str, value: f64 },
    #[error("{field} = {value} is not a valid fraction")]
    InvalidFraction { field: &'static str, value: f64 },
    #[error("{0} is not finite")]
    NonFinite(&'static str),
    #[error("total wealth path covers {found}, expected offsets 1-{horizon}")]
    WealthPathCoverage { found: String, horizon: u32 },
    #[error("gdp path covers {found}, expected offsets 1-{horizon}")]
    GdpPathCoverage { found: String, horizon: u32 },
    #[error("base gdp must be positive, got {0}")]
    NonPositiveBaseGdp(f64),
    #[error("projected gdp is zero at offset {0}")]
    ZeroGdp(i32),
    #[error("projection base year {config} does not match the economy's last year {economy}")]
    BaseYearMismatch { config: i32, economy: i32 },
    #[error("invalid projection configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Eva(#[from] EvaError),
    #[error(transparent)]
    Series(#[from] IndicatorError),
}

pub type Result<T, E = ProjectionError> = std::result::Result<T, E>;

fn check_rate(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(ProjectionError::RateOutOfRange { field, value })
    }
}

/// Scenario parameters for a projection run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionConfig {
    base_year: i32,
    horizon: u32,
    rd_growth: f64,
    elasticity: f64,
    discount_rate: Option<f64>,
    base_rd_share: f64,
    total_wealth_path: IndicatorSeries,
    ai_share_target: Option<f64>,
}

impl ProjectionConfig {
    /// `total_wealth_path` must be keyed by offsets `1..=horizon`.
    pub fn new(
        base_year: i32,
        horizon: u32,
        rd_growth: f64,
        elasticity: f64,
        base_rd_share: f64,
        total_wealth_path: IndicatorSeries,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(ProjectionError::ZeroHorizon);
        }
        if !rd_growth.is_finite() {
            return Err(ProjectionError::NonFinite("rd_growth"));
        }
        if rd_growth <= -1.0 {
            return Err(ProjectionError::RdGrowth(rd_growth));
        }
        if !elasticity.is_finite() {
            return Err(ProjectionError::NonFinite("elasticity"));
        }
        if !(base_rd_share.is_finite() && (0.0..=1.0).contains(&base_rd_share)) {
            return Err(ProjectionError::InvalidFraction {
                field: "base_rd_share",
                value: base_rd_share,
            });
        }
        let expected = 1..=horizon as i32;
        if !total_wealth_path.years().eq(expected) {
            return Err(ProjectionError::WealthPathCoverage {
                found: total_wealth_path.span(),
                horizon,
            });
        }
        Ok(Self {
            base_year,
            horizon,
            rd_growth,
            elasticity,
            discount_rate: None,
            base_rd_share,
            total_wealth_path: total_wealth_path.renamed("total_wealth"),
            ai_share_target: None,
        })
    }

    pub fn with_discount_rate(mut self, rate: f64) -> Result<Self> {
        check_rate("discount_rate", rate)?;
        self.discount_rate = Some(rate);
        Ok(self)
    }

    /// Recorded for reporting only; no projection equation reads it.
    pub fn with_ai_share_target(mut self, share: f64) -> Result<Self> {
        if !(share.is_finite() && (0.0..=1.0).contains(&share)) {
            return Err(ProjectionError::InvalidFraction {
                field: "ai_share_target",
                value: share,
            });
        }
        self.ai_share_target = Some(share);
        Ok(self)
    }

    pub fn base_year(&self) -> i32 {
        self.base_year
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn rd_growth(&self) -> f64 {
        self.rd_growth
    }

    pub fn elasticity(&self) -> f64 {
        self.elasticity
    }

    pub fn base_rd_share(&self) -> f64 {
        self.base_rd_share
    }

    pub fn total_wealth_path(&self) -> &IndicatorSeries {
        &self.total_wealth_path
    }

    pub fn ai_share_target(&self) -> Option<f64> {
        self.ai_share_target
    }

    /// Explicit discount rate, if one was configured.
    pub fn configured_discount_rate(&self) -> Option<f64> {
        self.discount_rate
    }

    /// Discount rate, falling back to the economy's central bank rate.
    pub fn discount_rate_for(&self, econ: &CountryEconomy) -> f64 {
        self.discount_rate.unwrap_or(econ.central_bank_rate())
    }

    /// Yearly GDP growth factor `1 + elasticity · rd_growth`.
    pub fn gdp_growth_factor(&self) -> f64 {
        1.0 + self.elasticity * self.rd_growth
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionFile {
    base_year: i32,
    horizon: u32,
    rd_growth: f64,
    elasticity: f64,
    discount_rate: Option<f64>,
    base_rd_share: f64,
    total_wealth_path: SeriesSource,
    ai_share_target: Option<f64>,
}

/// A projection configuration and the files it referenced.
#[derive(Debug, Clone)]
pub struct LoadedProjection {
    pub config: ProjectionConfig,
    pub sources: Vec<PathBuf>,
}

/// Parses the projection section of a configuration document.
pub fn load_projection_in(text: &str, base_dir: Option<&Path>) -> Result<LoadedProjection> {
    let file: ProjectionFile =
        serde_json::from_str(text).map_err(|e| ProjectionError::Config(e.to_string()))?;
    let mut sources = Vec::new();
    let path = file.total_wealth_path.resolve(
        "total_wealth",
        Unit::BillionsUsd,
        base_dir,
        &mut sources,
    )?;
    let mut config = ProjectionConfig::new(
        file.base_year,
        file.horizon,
        file.rd_growth,
        file.elasticity,
        file.base_rd_share,
        path,
    )?;
    if let Some(rate) = file.discount_rate {
        config = config.with_discount_rate(rate)?;
    }
    if let Some(share) = file.ai_share_target {
        config = config.with_ai_share_target(share)?;
    }
    Ok(LoadedProjection { config, sources })
}

pub fn load_projection(text: &str) -> Result<ProjectionConfig> {
    load_projection_in(text, None).map(|l| l.config)
}

pub fn load_projection_file(path: &Path) -> Result<LoadedProjection> {
    let text = std::fs::read_to_string(path).map_err(|source| IndicatorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_projection_in(&text, path.parent())
}

/// GDP path `base_gdp · (1 + elasticity · rd_growth)^t` for `t = 1..=horizon`.
pub fn project_gdp(base_gdp: f64, cfg: &ProjectionConfig) -> Result<IndicatorSeries> {
    if !(base_gdp.is_finite() && base_gdp > 0.0) {
        return Err(ProjectionError::NonPositiveBaseGdp(base_gdp));
    }
    let factor = cfg.gdp_growth_factor();
    let mut gdp = base_gdp;
    let points = (1..=cfg.horizon as i32)
        .map(|t| {
            gdp *= factor;
            (t, gdp)
        })
        .collect();
    Ok(IndicatorSeries::new("gdp", Unit::BillionsUsd, points)?)
}

/// R&D share of GDP along a projected GDP path.
///
/// R&D spending compounds at `rd_growth` from `base_rd_share · base_gdp`;
/// the share at offset `t` is that spending divided by `gdp_t`.
pub fn project_rd_share(
    cfg: &ProjectionConfig,
    base_gdp: f64,
    gdp_path: &IndicatorSeries,
) -> Result<IndicatorSeries> {
    if !gdp_path.years().eq(1..=cfg.horizon as i32) {
        return Err(ProjectionError::GdpPathCoverage {
            found: gdp_path.span(),
            horizon: cfg.horizon,
        });
    }
    let growth = 1.0 + cfg.rd_growth;
    let mut rd = cfg.base_rd_share * base_gdp;
    let mut points = Vec::with_capacity(gdp_path.len());
    for &(t, gdp) in gdp_path.points() {
        if gdp == 0.0 {
            return Err(ProjectionError::ZeroGdp(t));
        }
        rd *= growth;
        points.push((t, rd / gdp));
    }
    Ok(IndicatorSeries::new("rd_share", Unit::Fraction, points)?)
}

/// EVA over the projection horizon at the economy's central bank rate.
pub fn project_eva(econ: &CountryEconomy, cfg: &ProjectionConfig) -> Result<EvaSeries> {
    if cfg.base_year != econ.base_year() {
        return Err(ProjectionError::BaseYearMismatch {
            config: cfg.base_year,
            economy: econ.base_year(),
        });
    }
    let gdp = project_gdp(econ.base_gdp(), cfg)?;
    let records = gdp
        .points()
        .iter()
        .zip(cfg.total_wealth_path.values())
        .map(|(&(t, g), tw)| {
            EvaRecord::compute(
                t,
                g,
                econ.aggregate_tax_rate(),
                tw,
                econ.central_bank_rate(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvaSeries::from_records(records)?)
}

/// Running discounted sums; element `k` discounts the first `k + 1` values,
/// the first value discounted once.
pub fn cumulative_pv(values: &[f64], rate: f64) -> Result<Vec<f64>> {
    check_rate("discount_rate", rate)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ProjectionError::NonFinite("cash flow"));
    }
    let mut factor = 1.0;
    let mut total = 0.0;
    Ok(values
        .iter()
        .map(|v| {
            factor /= 1.0 + rate;
            total += v * factor;
            total
        })
        .collect())
}

/// `Σ values[t] / (1 + rate)^t` for `t = 1..=n`.
pub fn present_value(values: &[f64], rate: f64) -> Result<f64> {
    Ok(cumulative_pv(values, rate)?.last().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicators::load_economy;

    const TABLE2_EVA: [f64; 9] = [
        10.74, 11.00, 11.01, 11.04, 10.69, 10.56, 10.44, 10.31, 10.18,
    ];

    fn offsets(values: &[f64]) -> IndicatorSeries {
        let points = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as i32 + 1, v))
            .collect();
        IndicatorSeries::new("tw", Unit::BillionsUsd, points).unwrap()
    }

    fn georgia_cfg() -> ProjectionConfig {
        load_projection(include_str!("../fixtures/georgia/projection.json")).unwrap()
    }

    fn flat_cfg(horizon: u32, rd_growth: f64, elasticity: f64) -> ProjectionConfig {
        let tw = vec![150.0; horizon as usize];
        ProjectionConfig::new(2022, horizon, rd_growth, elasticity, 0.0023, offsets(&tw)).unwrap()
    }

    #[test]
    fn gdp_path_matches_table() {
        let gdp = project_gdp(24.78, &georgia_cfg()).unwrap();
        assert!((gdp.value_at(1).unwrap() - 24.95).abs() < 0.01);
        assert!((gdp.value_at(9).unwrap() - 26.39).abs() < 0.02);
    }

    #[test]
    fn zero_growth_is_flat() {
        let gdp = project_gdp(24.78, &flat_cfg(5, 0.0, 0.07)).unwrap();
        assert!(gdp.values().all(|v| v == 24.78));
        assert!(project_gdp(0.0, &flat_cfg(5, 0.0, 0.07)).is_err());
    }

    #[test]
    fn rd_share_endpoint() {
        let cfg = georgia_cfg();
        let gdp = project_gdp(24.78, &cfg).unwrap();
        let share = project_rd_share(&cfg, 24.78, &gdp).unwrap();
        // 0.0023 · 1.1⁹ / 1.00702502⁹
        let expected = 0.0023 * 1.1f64.powi(9) / 1.00702502f64.powi(9);
        assert!((share.value_at(9).unwrap() - expected).abs() < 1e-12);
        assert!((share.value_at(9).unwrap() - 0.0051).abs() < 2e-4);
    }

    #[test]
    fn rd_share_single_step_and_flat() {
        let cfg = flat_cfg(1, 0.10, 0.0702502);
        let gdp = project_gdp(24.78, &cfg).unwrap();
        let share = project_rd_share(&cfg, 24.78, &gdp).unwrap();
        let ratio = share.value_at(1).unwrap() / 0.0023;
        assert!((ratio - 1.1 / 1.00702502).abs() < 1e-12);

        let cfg = flat_cfg(4, 0.0, 0.0702502);
        let gdp = project_gdp(24.78, &cfg).unwrap();
        let share = project_rd_share(&cfg, 24.78, &gdp).unwrap();
        assert!(share.values().all(|v| (v - 0.0023).abs() < 1e-15));
    }

    #[test]
    fn rd_share_rejects_bad_path() {
        let cfg = flat_cfg(3, 0.1, 0.07);
        let short =
            IndicatorSeries::new("gdp", Unit::BillionsUsd, vec![(1, 1.0), (2, 1.0)]).unwrap();
        assert!(matches!(
            project_rd_share(&cfg, 1.0, &short),
            Err(ProjectionError::GdpPathCoverage { .. })
        ));
        let zero = offsets(&[1.0, 0.0, 1.0]).renamed("gdp");
        assert!(matches!(
            project_rd_share(&cfg, 1.0, &zero),
            Err(ProjectionError::ZeroGdp(2))
        ));
    }

    #[test]
    fn projected_eva_summary() {
        let econ = load_economy(include_str!("../fixtures/georgia/economy.json")).unwrap();
        let s = project_eva(&econ, &georgia_cfg()).unwrap();
        let sum = s.summary();
        assert!((sum.mean - 10.66).abs() < 0.05);
        assert_eq!((sum.min_year, sum.max_year), (9, 4));
        assert!((sum.min - 10.18).abs() < 0.01);
        assert!((sum.max - 11.04).abs() < 0.01);
    }

    #[test]
    fn horizon_one_and_steady_state() {
        let econ = load_economy(include_str!("../fixtures/georgia/economy.json")).unwrap();
        let cfg = flat_cfg(1, 0.1, 0.07);
        let s = project_eva(&econ, &cfg).unwrap();
        assert_eq!(s.records().len(), 1);
        let r = s.records()[0];
        assert!((r.eva - (r.nopat - 150.0 * econ.central_bank_rate())).abs() < 1e-12);

        let s = project_eva(&econ, &flat_cfg(6, 0.1, 0.0)).unwrap();
        let first = s.records()[0].eva;
        assert!(s.records().iter().all(|r| r.eva == first));
    }

    #[test]
    fn base_year_must_match() {
        let econ = load_economy(include_str!("../fixtures/georgia/economy.json")).unwrap();
        let tw = offsets(&[150.0]);
        let cfg = ProjectionConfig::new(2020, 1, 0.1, 0.07, 0.0023, tw).unwrap();
        assert!(matches!(
            project_eva(&econ, &cfg),
            Err(ProjectionError::BaseYearMismatch {
                config: 2020,
                economy: 2022
            })
        ));
    }

    #[test]
    fn config_validation() {
        let tw = offsets(&[1.0, 2.0]);
        assert!(matches!(
            ProjectionConfig::new(2022, 0, 0.1, 0.07, 0.0023, tw.clone()),
            Err(ProjectionError::ZeroHorizon)
        ));
        assert!(matches!(
            ProjectionConfig::new(2022, 2, -1.0, 0.07, 0.0023, tw.clone()),
            Err(ProjectionError::RdGrowth(_))
        ));
        assert!(matches!(
            ProjectionConfig::new(2022, 3, 0.1, 0.07, 0.0023, tw.clone()),
            Err(ProjectionError::WealthPathCoverage { horizon: 3, .. })
        ));
        let cfg = ProjectionConfig::new(2022, 2, 0.1, 0.07, 0.0023, tw).unwrap();
        assert!(cfg.clone().with_discount_rate(1.0).is_err());
        assert!(cfg.clone().with_ai_share_target(1.5).is_err());
        assert_eq!(
            cfg.with_ai_share_target(0.3).unwrap().ai_share_target(),
            Some(0.3)
        );
    }

    #[test]
    fn fixture_carries_annotation_and_rate() {
        let cfg = georgia_cfg();
        assert_eq!(cfg.ai_share_target(), Some(0.30));
        assert_eq!(cfg.configured_discount_rate(), Some(0.083));
        assert_eq!(cfg.horizon(), 9);
    }

    #[test]
    fn discounting_table_two() {
        let pv = present_value(&TABLE2_EVA, 0.083).unwrap();
        assert!((pv - 66.1).abs() < 0.5, "{pv}");
        let plain = present_value(&TABLE2_EVA, 0.0).unwrap();
        assert!((plain - 95.97).abs() < 0.05);
        assert!((present_value(&[5.0], 0.25).unwrap() - 4.0).abs() < 1e-15);
        assert!(present_value(&TABLE2_EVA, 1.0).is_err());
    }

    #[test]
    fn cumulative_table_two() {
        let c = cumulative_pv(&TABLE2_EVA, 0.083).unwrap();
        assert_eq!(c.len(), 9);
        assert!((c[7] - 61.1).abs() < 0.5);
        assert!((c[8] - 66.1).abs() < 0.5);
        assert_eq!(c[8], present_value(&TABLE2_EVA, 0.083).unwrap());
        assert!(cumulative_pv(&[], 0.083).unwrap().is_empty());
    }
}
