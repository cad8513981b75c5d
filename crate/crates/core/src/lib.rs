//! R&D elasticity, country economic value added, EVA projection and
//! sovereign rating-gap analysis.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`regression`] estimates the elasticity of GDP with respect to R&D
//!    spending from a log-log OLS fit, with a two-sided t-test.
//! 2. [`eva`] computes a country's EVA as NOPAT minus a capital charge on
//!    total wealth; [`projection`] carries it forward under an R&D growth
//!    scenario and discounts the stream.
//! 3. [`ratinggap`] averages a peer rating group, classifies each indicator
//!    gap, totals the required investment and finds how many years of
//!    discounted EVA cover it.
//!
//! [`cli`] and [`report`] wire the stages into report documents.

pub mod cli;
pub mod eva;
pub mod indicators;
pub mod projection;
pub mod ratinggap;
pub mod regression;
pub mod report;

pub use eva::{eva_series, EvaRecord, EvaSeries};
pub use indicators::{CountryEconomy, Indicator, IndicatorSeries, PeerIndicatorRecord, Unit};
pub use projection::{present_value, ProjectionConfig};
pub use ratinggap::{RatingGapReport, YearsToClose};
pub use regression::{estimate_elasticity, RegressionResult};
pub use report::ReportDocument;
