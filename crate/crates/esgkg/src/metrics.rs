//! Quality metrics and cost accounting.
//!
//! Five scores are computed after validation: semantic accuracy, schema
//! compliance, relationship retention, cost per validated entity, and the
//! cost waste ratio. All functions are pure, work in full precision, and
//! report percentages rounded half-up to one decimal only at the summary
//! layer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::TokenUsage;
use crate::validation::{PassCount, RuleId, ValidationReport};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("per-rule results are missing {0}")]
    MissingRule(String),
}

/// A percentage in `[0, 100]`. `degenerate` marks a zero denominator, where
/// the score is defined as 0 by convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percent {
    pub value: f64,
    pub degenerate: bool,
}

impl Percent {
    fn of(value: f64) -> Percent {
        Percent { value, degenerate: false }
    }

    fn degenerate_zero() -> Percent {
        Percent { value: 0.0, degenerate: true }
    }
}

/// Half-up rounding to one decimal place, the reporting precision.
pub fn round1(value: f64) -> f64 {
    (value * 10.0).round() / 10.0
}

/// Share of entities whose type assignment survived semantic verification.
pub fn semantic_accuracy(correct: u64, total: u64) -> Result<Percent, MetricsError> {
    if correct > total {
        return Err(MetricsError::InvalidArgument(format!(
            "correct ({correct}) exceeds total ({total})"
        )));
    }
    if total == 0 {
        return Ok(Percent::degenerate_zero());
    }
    Ok(Percent::of(correct as f64 * 100.0 / total as f64))
}

/// Unweighted mean of the six per-rule pass percentages. A rule with no
/// items in its domain is vacuously compliant and contributes 100.
pub fn schema_compliance(per_rule_pass: &BTreeMap<String, PassCount>) -> Result<Percent, MetricsError> {
    let mut sum = 0.0;
    for rule in RuleId::SCHEMA_RULES {
        let pass = per_rule_pass
            .get(rule.as_str())
            .ok_or_else(|| MetricsError::MissingRule(rule.as_str().to_string()))?;
        sum += if pass.total == 0 {
            100.0
        } else {
            pass.passed as f64 * 100.0 / pass.total as f64
        };
    }
    Ok(Percent::of(sum / RuleId::SCHEMA_RULES.len() as f64))
}

/// Share of extracted relationships that survived validation.
pub fn relationship_retention(validated: u64, extracted: u64) -> Result<Percent, MetricsError> {
    if validated > extracted {
        return Err(MetricsError::InvalidArgument(format!(
            "validated ({validated}) exceeds extracted ({extracted})"
        )));
    }
    if extracted == 0 {
        return Ok(Percent::degenerate_zero());
    }
    Ok(Percent::of(validated as f64 * 100.0 / extracted as f64))
}

/// Share of extraction spend that produced no validated entity. Computed as
/// the exact complement of the retained share, so
/// `cost_waste_ratio + retained_share = 100` holds to the last bit.
pub fn cost_waste_ratio(filtered: u64, extracted: u64) -> Result<Percent, MetricsError> {
    if filtered > extracted {
        return Err(MetricsError::InvalidArgument(format!(
            "filtered ({filtered}) exceeds extracted ({extracted})"
        )));
    }
    if extracted == 0 {
        return Ok(Percent::degenerate_zero());
    }
    let retained = (extracted - filtered) as f64 * 100.0 / extracted as f64;
    Ok(Percent::of(100.0 - retained))
}

/// Per-model prices in USD per million tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPrice {
    pub input_per_mtok: f64,
    pub output_per_mtok: f64,
}

/// User-supplied price table; dollar figures in reports carry its version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceTable {
    pub version: String,
    pub models: BTreeMap<String, ModelPrice>,
}

impl PriceTable {
    pub fn zero() -> PriceTable {
        PriceTable { version: "unpriced".into(), models: BTreeMap::new() }
    }
}

fn stage_cost(usage: TokenUsage, price: ModelPrice) -> f64 {
    usage.input as f64 * price.input_per_mtok / 1e6 + usage.output as f64 * price.output_per_mtok / 1e6
}

/// Token and dollar accounting for one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    pub model: String,
    pub price_table_version: String,
    pub stage2_tokens: TokenUsage,
    pub stage3_tokens: TokenUsage,
    pub stage2_cost: f64,
    pub stage3_cost: f64,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl CostLedger {
    /// Prices the recorded token usage. A model missing from the table
    /// prices at zero with a warning rather than failing the run.
    pub fn from_usage(
        model: &str,
        stage2_tokens: TokenUsage,
        stage3_tokens: TokenUsage,
        prices: &PriceTable,
    ) -> CostLedger {
        let mut warnings = Vec::new();
        let price = match prices.models.get(model) {
            Some(p) => *p,
            None => {
                warnings.push(format!(
                    "model {model:?} is not in price table {:?}; costs reported as 0",
                    prices.version
                ));
                ModelPrice { input_per_mtok: 0.0, output_per_mtok: 0.0 }
            }
        };
        CostLedger {
            model: model.to_string(),
            price_table_version: prices.version.clone(),
            stage2_tokens,
            stage3_tokens,
            stage2_cost: stage_cost(stage2_tokens, price),
            stage3_cost: stage_cost(stage3_tokens, price),
            warnings,
        }
    }

    pub fn total_cost(&self) -> f64 {
        self.stage2_cost + self.stage3_cost
    }
}

/// Cost per validated entity; a run with zero validated entities has no
/// finite unit cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostPerEntity {
    Finite(f64),
    Infinite,
}

impl CostPerEntity {
    pub fn finite(&self) -> Option<f64> {
        match self {
            CostPerEntity::Finite(v) => Some(*v),
            CostPerEntity::Infinite => None,
        }
    }
}

/// Extraction + semantic-validation spend per validated entity.
pub fn cost_per_entity(ledger: &CostLedger, validated_entities: u64) -> CostPerEntity {
    if validated_entities == 0 {
        return CostPerEntity::Infinite;
    }
    CostPerEntity::Finite(ledger.total_cost() / validated_entities as f64)
}

/// The five scores as reported: percentages rounded half-up to one decimal,
/// costs in full precision, with degenerate inputs flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    pub semantic_accuracy: f64,
    pub schema_compliance: f64,
    pub relationship_retention: f64,
    /// `None` means no entity survived validation (infinite unit cost).
    pub cost_per_entity: Option<f64>,
    pub cost_waste_ratio: f64,
    #[serde(default)]
    pub degenerate_flags: Vec<String>,
}

/// Raw Stage 2 output sizes, the denominators of retention and waste.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedCounts {
    pub entities: u64,
    pub relationships: u64,
}

/// Computes the summary off a validation report, the raw extraction counts
/// and the priced ledger.
pub fn compute_quality_metrics(
    extracted: ExtractedCounts,
    report: &ValidationReport,
    ledger: &CostLedger,
) -> Result<QualityMetrics, MetricsError> {
    let mut flags = Vec::new();
    let mut track = |name: &str, p: Percent| {
        if p.degenerate {
            flags.push(format!("{name}: zero denominator"));
        }
        p.value
    };

    let accuracy = track(
        "semantic_accuracy",
        semantic_accuracy(report.semantically_correct_entities(), report.input_counts.entities)?,
    );
    let compliance = track("schema_compliance", schema_compliance(&report.per_rule_pass)?);
    let retention = track(
        "relationship_retention",
        relationship_retention(report.output_counts.relationships, extracted.relationships)?,
    );
    let validated_entities = report.output_counts.entities;
    if extracted.entities < validated_entities {
        return Err(MetricsError::InvalidArgument(format!(
            "validated entities ({validated_entities}) exceed extracted ({})",
            extracted.entities
        )));
    }
    let waste = track(
        "cost_waste_ratio",
        cost_waste_ratio(extracted.entities - validated_entities, extracted.entities)?,
    );
    let unit_cost = cost_per_entity(ledger, validated_entities);
    if unit_cost.finite().is_none() {
        flags.push("cost_per_entity: no validated entities".to_string());
    }

    Ok(QualityMetrics {
        semantic_accuracy: round1(accuracy),
        schema_compliance: round1(compliance),
        relationship_retention: round1(retention),
        cost_per_entity: unit_cost.finite(),
        cost_waste_ratio: round1(waste),
        degenerate_flags: flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pass(passed: u64, total: u64) -> PassCount {
        PassCount { passed, total }
    }

    fn rule_map(entries: [(u64, u64); 6]) -> BTreeMap<String, PassCount> {
        RuleId::SCHEMA_RULES
            .iter()
            .zip(entries)
            .map(|(r, (p, t))| (r.as_str().to_string(), pass(p, t)))
            .collect()
    }

    #[test]
    fn semantic_accuracy_examples() {
        assert_eq!(semantic_accuracy(295, 295).unwrap().value, 100.0);
        let v = semantic_accuracy(62, 69).unwrap().value;
        assert!((v - 89.9).abs() <= 0.05, "{v}");
        let degenerate = semantic_accuracy(0, 0).unwrap();
        assert_eq!(degenerate.value, 0.0);
        assert!(degenerate.degenerate);
        assert!(semantic_accuracy(5, 3).is_err());
    }

    #[test]
    fn schema_compliance_examples() {
        let all_pass = rule_map([(10, 10), (10, 10), (10, 10), (10, 10), (10, 10), (10, 10)]);
        assert_eq!(schema_compliance(&all_pass).unwrap().value, 100.0);

        let mixed = rule_map([(100, 100), (100, 100), (92, 100), (100, 100), (98, 100), (97, 100)]);
        let v = schema_compliance(&mixed).unwrap().value;
        assert!((v - 97.83).abs() <= 0.01, "{v}");

        let vacuous = rule_map([(10, 10), (10, 10), (10, 10), (0, 0), (10, 10), (10, 10)]);
        assert_eq!(schema_compliance(&vacuous).unwrap().value, 100.0);

        let mut missing = all_pass.clone();
        missing.remove("VR004");
        assert_eq!(schema_compliance(&missing), Err(MetricsError::MissingRule("VR004".into())));
    }

    #[test]
    fn relationship_retention_examples() {
        let v = relationship_retention(42, 53).unwrap().value;
        assert!((v - 79.2).abs() <= 0.05, "{v}");
        let v = relationship_retention(64, 71).unwrap().value;
        assert!((v - 90.1).abs() <= 0.05, "{v}");
        assert_eq!(relationship_retention(0, 161).unwrap().value, 0.0);
        assert!(relationship_retention(2, 1).is_err());
    }

    #[test]
    fn cost_waste_ratio_examples() {
        let v = cost_waste_ratio(69, 364).unwrap().value;
        assert!((v - 19.0).abs() <= 0.1, "{v}");
        let v = cost_waste_ratio(213, 219).unwrap().value;
        assert!((v - 97.3).abs() <= 0.1, "{v}");
        assert_eq!(cost_waste_ratio(0, 100).unwrap().value, 0.0);
        assert!(cost_waste_ratio(0, 0).unwrap().degenerate);
    }

    #[test]
    fn waste_complements_retained_share_exactly() {
        for (filtered, extracted) in [(1u64, 3u64), (69, 364), (213, 219), (0, 7), (7, 7), (1, 10)] {
            let waste = cost_waste_ratio(filtered, extracted).unwrap().value;
            let retained = (extracted - filtered) as f64 * 100.0 / extracted as f64;
            assert_eq!(waste + retained, 100.0, "({filtered}, {extracted})");
        }
    }

    fn method_comparison_ledger(total: f64) -> CostLedger {
        // Prices and token counts chosen so the stage costs sum to `total`.
        let mut models = BTreeMap::new();
        models.insert("model-x".into(), ModelPrice { input_per_mtok: 2.0, output_per_mtok: 10.0 });
        let prices = PriceTable { version: "test".into(), models };
        let (s2, s3) = if (total - 4.57).abs() < 1e-9 {
            // 3.0 + 1.0 = 4.0 and 0.5 + 0.07 = 0.57
            (TokenUsage::new(1_500_000, 100_000), TokenUsage::new(250_000, 7_000))
        } else {
            // 4.0 + 0.48
            (TokenUsage::new(2_000_000, 0), TokenUsage::new(0, 48_000))
        };
        CostLedger::from_usage("model-x", s2, s3, &prices)
    }

    #[test]
    fn cost_per_entity_reproduces_the_method_comparison() {
        let guided = method_comparison_ledger(4.57);
        assert!((guided.total_cost() - 4.57).abs() < 1e-9);
        let per_entity = cost_per_entity(&guided, 295).finite().unwrap();
        assert!((per_entity - 0.0155).abs() <= 0.0005, "{per_entity}");

        let baseline = method_comparison_ledger(4.48);
        let baseline_per_entity = cost_per_entity(&baseline, 6).finite().unwrap();
        assert!((baseline_per_entity - 0.747).abs() <= 0.005, "{baseline_per_entity}");

        let ratio = baseline_per_entity / per_entity;
        assert!((ratio - 48.0).abs() <= 1.0, "{ratio}");

        assert_eq!(cost_per_entity(&guided, 0), CostPerEntity::Infinite);
    }

    #[test]
    fn ledger_cost_is_the_exact_token_price_product() {
        let ledger = method_comparison_ledger(4.57);
        assert_eq!(
            ledger.stage2_cost,
            ledger.stage2_tokens.input as f64 * 2.0 / 1e6
                + ledger.stage2_tokens.output as f64 * 10.0 / 1e6
        );
        assert_eq!(
            ledger.stage3_cost,
            ledger.stage3_tokens.input as f64 * 2.0 / 1e6
                + ledger.stage3_tokens.output as f64 * 10.0 / 1e6
        );
    }

    #[test]
    fn unpriced_models_warn_and_cost_zero() {
        let ledger = CostLedger::from_usage(
            "unknown-model",
            TokenUsage::new(1000, 100),
            TokenUsage::default(),
            &PriceTable::zero(),
        );
        assert_eq!(ledger.total_cost(), 0.0);
        assert!(!ledger.warnings.is_empty());
    }

    #[test]
    fn more_validated_entities_never_cost_more_per_entity() {
        let ledger = method_comparison_ledger(4.57);
        let mut last = f64::INFINITY;
        for n in [1u64, 2, 10, 100, 295, 1000] {
            let v = cost_per_entity(&ledger, n).finite().unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn rounding_is_half_up_to_one_decimal() {
        assert_eq!(round1(89.855), 89.9);
        assert_eq!(round1(79.245), 79.2); // 79.245 is stored below the halfway point
        assert_eq!(round1(97.25), 97.3);
        assert_eq!(round1(0.04), 0.0);
    }
}
