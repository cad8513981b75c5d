//! Peer-group comparison against a higher sovereign rating tier.
//!
//! Peer averages are plain arithmetic means over the countries included for
//! each indicator. Exclusions are explicit: either a named country mask or a
//! single-outlier rule, configured per indicator.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{Indicator, IndicatorError, PeerIndicatorRecord};
use crate::projection::{cumulative_pv, ProjectionError};

#[derive(Debug, Error)]
pub enum RatingGapError {
    #[error("no peers left for `{0}` after exclusions")]
    EmptyInclusion(Indicator),
    #[error("peer set is empty")]
    NoPeers,
    #[error("exclusion for `{indicator}` names unknown country `{country}`")]
    UnknownCountry {
        indicator: Indicator,
        country: String,
    },
    #[error("outlier factor must be positive and finite, got {0}")]
    InvalidFactor(f64),
    #[error("investment components are empty")]
    EmptyComponents,
    #[error("investment component `{name}` is negative or non-finite ({amount})")]
    InvalidComponent { name: String, amount: f64 },
    #[error("target {target} is below current {current}; no investment is defined")]
    TargetBelowCurrent { current: f64, target: f64 },
    #[error("population must be positive, got {0}")]
    NonPositivePopulation(f64),
    #[error("required investment must be non-negative, got {0}")]
    InvalidRequirement(f64),
    #[error("invalid gap configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Series(#[from] IndicatorError),
}

pub type Result<T, E = RatingGapError> = std::result::Result<T, E>;

pub const DEFAULT_OUTLIER_FACTOR: f64 = 3.0;

/// How peers are excluded from one indicator's average.
#[derive(Debug, Clone, PartialEq)]
pub enum ExclusionRule {
    /// Drop these countries.
    Mask(BTreeSet<String>),
    /// Drop the single value farthest from the median of the others when
    /// its magnitude exceeds `factor` times that median's magnitude.
    Outlier { factor: f64 },
}

impl ExclusionRule {
    pub fn mask<I, S>(countries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ExclusionRule::Mask(countries.into_iter().map(Into::into).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExclusionRules {
    rules: BTreeMap<Indicator, ExclusionRule>,
}

impl ExclusionRules {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with(mut self, indicator: Indicator, rule: ExclusionRule) -> Self {
        self.rules.insert(indicator, rule);
        self
    }

    pub fn get(&self, indicator: Indicator) -> Option<&ExclusionRule> {
        self.rules.get(&indicator)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorAverage {
    pub indicator: Indicator,
    pub average: f64,
    pub included: Vec<String>,
    pub excluded: Vec<String>,
}

/// Per-indicator peer averages with the countries behind each.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeerAggregate {
    entries: Vec<IndicatorAverage>,
}

impl PeerAggregate {
    pub fn get(&self, indicator: Indicator) -> &IndicatorAverage {
        &self.entries[indicator.index()]
    }

    pub fn average(&self, indicator: Indicator) -> f64 {
        self.get(indicator).average
    }

    pub fn entries(&self) -> &[IndicatorAverage] {
        &self.entries
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Index of the value the outlier rule would drop, if any.
fn outlier_index(values: &[f64], factor: f64) -> Option<usize> {
    if values.len() < 2 {
        return None;
    }
    let mut worst: Option<(usize, f64, f64)> = None;
    for i in 0..values.len() {
        let mut rest: Vec<f64> = values
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        let med = median(&mut rest);
        let distance = (values[i] - med).abs();
        if worst.is_none_or(|(_, d, _)| distance > d) {
            worst = Some((i, distance, med));
        }
    }
    let (i, _, med) = worst?;
    (values[i].abs() > factor * med.abs()).then_some(i)
}

/// Averages each indicator over the peers that survive its exclusion rule.
pub fn peer_aggregate(
    peers: &[PeerIndicatorRecord],
    rules: &ExclusionRules,
) -> Result<PeerAggregate> {
    if peers.is_empty() {
        return Err(RatingGapError::NoPeers);
    }
    let known: BTreeSet<&str> = peers.iter().map(|p| p.country.as_str()).collect();
    let mut entries = Vec::with_capacity(Indicator::ALL.len());
    for indicator in Indicator::ALL {
        let values: Vec<f64> = peers.iter().map(|p| p.get(indicator)).collect();
        let dropped: Vec<bool> = match rules.get(indicator) {
            None => vec![false; peers.len()],
            Some(ExclusionRule::Mask(mask)) => {
                if let Some(unknown) = mask.iter().find(|c| !known.contains(c.as_str())) {
                    return Err(RatingGapError::UnknownCountry {
                        indicator,
                        country: unknown.clone(),
                    });
                }
                peers.iter().map(|p| mask.contains(&p.country)).collect()
            }
            Some(ExclusionRule::Outlier { factor }) => {
                if !(factor.is_finite() && *factor > 0.0) {
                    return Err(RatingGapError::InvalidFactor(*factor));
                }
                let hit = outlier_index(&values, *factor);
                (0..peers.len()).map(|i| Some(i) == hit).collect()
            }
        };
        let mut included = Vec::new();
        let mut excluded = Vec::new();
        let mut sum = 0.0;
        for ((peer, value), drop) in peers.iter().zip(&values).zip(&dropped) {
            if *drop {
                excluded.push(peer.country.clone());
            } else {
                included.push(peer.country.clone());
                sum += value;
            }
        }
        if included.is_empty() {
            return Err(RatingGapError::EmptyInclusion(indicator));
        }
        entries.push(IndicatorAverage {
            indicator,
            average: sum / included.len() as f64,
            included,
            excluded,
        });
    }
    Ok(PeerAggregate { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Better,
    Worse,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Better => "better",
            Direction::Worse => "worse",
        }
    }
}

/// Classifies a subject value against a peer average. Ties count as better.
pub fn classify(subject: f64, peer_average: f64, higher_is_better: bool) -> Direction {
    let better = if higher_is_better {
        subject >= peer_average
    } else {
        subject <= peer_average
    };
    if better {
        Direction::Better
    } else {
        Direction::Worse
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorGap {
    pub indicator: Indicator,
    pub subject_value: f64,
    pub peer_average: f64,
    pub higher_is_better: bool,
    pub direction: Direction,
}

pub fn indicator_gaps(subject: &PeerIndicatorRecord, agg: &PeerAggregate) -> Vec<IndicatorGap> {
    Indicator::ALL
        .into_iter()
        .map(|indicator| {
            let subject_value = subject.get(indicator);
            let peer_average = agg.average(indicator);
            let higher_is_better = indicator.higher_is_better();
            IndicatorGap {
                indicator,
                subject_value,
                peer_average,
                higher_is_better,
                direction: classify(subject_value, peer_average, higher_is_better),
            }
        })
        .collect()
}

/// Investment needed to lift GDP per capita: thousands of USD per person
/// times millions of people, in billions of USD.
pub fn per_capita_investment(
    current_pc: f64,
    target_pc: f64,
    population_millions: f64,
) -> Result<f64> {
    if !(population_millions.is_finite() && population_millions > 0.0) {
        return Err(RatingGapError::NonPositivePopulation(population_millions));
    }
    if target_pc.is_nan() || current_pc.is_nan() || target_pc < current_pc {
        return Err(RatingGapError::TargetBelowCurrent {
            current: current_pc,
            target: target_pc,
        });
    }
    Ok((target_pc - current_pc) * population_millions)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvestmentComponent {
    pub name: String,
    pub amount: f64,
}

impl InvestmentComponent {
    pub fn new(name: impl Into<String>, amount: f64) -> Self {
        Self {
            name: name.into(),
            amount,
        }
    }
}

/// Correctly rounded sum of exact doubles (Shewchuk partials), so the
/// result does not depend on summation order.
pub(crate) fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    // Round the partials (largest last) to the nearest double.
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}

/// Sum of the investment components.
pub fn total_required_investment(components: &[InvestmentComponent]) -> Result<f64> {
    if components.is_empty() {
        return Err(RatingGapError::EmptyComponents);
    }
    if let Some(bad) = components
        .iter()
        .find(|c| !(c.amount.is_finite() && c.amount >= 0.0))
    {
        return Err(RatingGapError::InvalidComponent {
            name: bad.name.clone(),
            amount: bad.amount,
        });
    }
    Ok(exact_sum(components.iter().map(|c| c.amount)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum YearsToClose {
    Years(u32),
    Unreachable,
}

/// First period whose cumulative discounted EVA covers `required`.
pub fn years_to_close(eva_path: &[f64], discount_rate: f64, required: f64) -> Result<YearsToClose> {
    if !(required.is_finite() && required >= 0.0) {
        return Err(RatingGapError::InvalidRequirement(required));
    }
    let cumulative = cumulative_pv(eva_path, discount_rate)?;
    Ok(cumulative
        .iter()
        .position(|&pv| pv >= required)
        .map_or(YearsToClose::Unreachable, |k| {
            YearsToClose::Years(k as u32 + 1)
        }))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RuleSpec {
    Mask(Vec<String>),
    Outlier { outlier_factor: Option<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GapFile {
    #[serde(default)]
    exclusions: BTreeMap<String, RuleSpec>,
    population_millions: Option<f64>,
    #[serde(default)]
    investment_components: Vec<InvestmentComponent>,
    #[serde(default)]
    omitted_requirements: Vec<String>,
}

/// Exclusions, investment inputs and informational requirements.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GapConfig {
    pub exclusions: ExclusionRules,
    pub population_millions: Option<f64>,
    pub investment_components: Vec<InvestmentComponent>,
    /// Indicators whose level gap is reported but left out of the total.
    pub omitted_requirements: Vec<Indicator>,
}

pub fn load_gap_config(text: &str) -> Result<GapConfig> {
    let file: GapFile =
        serde_json::from_str(text).map_err(|e| RatingGapError::Config(e.to_string()))?;
    let mut exclusions = ExclusionRules::none();
    for (name, spec) in file.exclusions {
        let indicator: Indicator = name.parse()?;
        let rule = match spec {
            RuleSpec::Mask(countries) => ExclusionRule::mask(countries),
            RuleSpec::Outlier { outlier_factor } => ExclusionRule::Outlier {
                factor: outlier_factor.unwrap_or(DEFAULT_OUTLIER_FACTOR),
            },
        };
        exclusions = exclusions.with(indicator, rule);
    }
    let omitted_requirements = file
        .omitted_requirements
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<Indicator>, _>>()?;
    Ok(GapConfig {
        exclusions,
        population_millions: file.population_millions,
        investment_components: file.investment_components,
        omitted_requirements,
    })
}

pub fn load_gap_config_file(path: &Path) -> Result<GapConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| IndicatorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_gap_config(&text)
}

/// A requirement reported for context and excluded from the total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InformationalRequirement {
    pub name: String,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingGapReport {
    pub subject_country: String,
    pub aggregate: PeerAggregate,
    pub gaps: Vec<IndicatorGap>,
    pub investment_components: Vec<InvestmentComponent>,
    pub total_required_investment: f64,
    pub informational: Vec<InformationalRequirement>,
    pub years_to_close: Option<YearsToClose>,
}

/// Discounted EVA stream used to test whether the requirement can be met.
#[derive(Debug, Clone, Copy)]
pub struct EvaStream<'a> {
    pub values: &'a [f64],
    pub discount_rate: f64,
}

pub fn rating_gap_report(
    subject: &PeerIndicatorRecord,
    peers: &[PeerIndicatorRecord],
    cfg: &GapConfig,
    stream: Option<EvaStream<'_>>,
) -> Result<RatingGapReport> {
    let aggregate = peer_aggregate(peers, &cfg.exclusions)?;
    let gaps = indicator_gaps(subject, &aggregate);
    let total = total_required_investment(&cfg.investment_components)?;

    let mut informational = Vec::new();
    for &indicator in &cfg.omitted_requirements {
        let gap = aggregate.average(indicator) - subject.get(indicator);
        let shortfall = if indicator.higher_is_better() {
            gap
        } else {
            -gap
        };
        informational.push(InformationalRequirement {
            name: indicator.column().to_string(),
            amount: shortfall.max(0.0),
        });
    }
    if let Some(population) = cfg.population_millions {
        let current = subject.get(Indicator::GdpPerCapita);
        let target = aggregate.average(Indicator::GdpPerCapita);
        if target >= current {
            informational.push(InformationalRequirement {
                name: "gdp_per_capita_estimate".into(),
                amount: per_capita_investment(current, target, population)?,
            });
        }
    }

    let years_to_close = stream
        .map(|s| years_to_close(s.values, s.discount_rate, total))
        .transpose()?;

    Ok(RatingGapReport {
        subject_country: subject.country.clone(),
        aggregate,
        gaps,
        investment_components: cfg.investment_components.clone(),
        total_required_investment: total,
        informational,
        years_to_close,
    })
}
