use serde::{Deserialize, Serialize};

use super::{
    aggregate, average_accuracy, corruption_average, min_max_scale, model_average, relative_accuracy_drop, vre, Axis,
    EvaluationGrid, MetricsError, PerSubMetric, ScaleRange, SubMetric, SubMetricSet, WeightVector,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    /// `A_{v,0}`
    pub clean_accuracy: f64,
    /// `A_v`
    pub average_accuracy: f64,
    /// `A^rel_v` as a fraction.
    pub relative_drop: f64,
    /// `ℳ_v` from unscaled sub-metrics.
    pub raw: PerSubMetric<Option<f64>>,
    /// `ℳ_v` from min-max scaled sub-metrics.
    pub scaled: PerSubMetric<Option<f64>>,
    /// Undefined cells left out of each aggregate.
    pub skipped: PerSubMetric<usize>,
    pub vre: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionReport {
    pub corruption: String,
    /// `A_c`
    pub average_accuracy: f64,
    /// `A^rel_c` as a fraction.
    pub relative_drop: f64,
    pub raw: PerSubMetric<Option<f64>>,
    pub scaled: PerSubMetric<Option<f64>>,
    pub skipped: PerSubMetric<usize>,
    pub vre: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub model: String,
    pub corruption: String,
    /// `A_{v,c}`
    pub average_accuracy: f64,
    /// `A^rel_{v,c}` as a fraction.
    pub relative_drop: f64,
    pub errors: Vec<f64>,
    pub raw: PerSubMetric<Option<f64>>,
    pub scaled: PerSubMetric<Option<f64>>,
}

/// Everything derived from one grid and one weight vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub weights: WeightVector,
    pub scaling: PerSubMetric<ScaleRange>,
    pub models: Vec<ModelReport>,
    pub corruptions: Vec<CorruptionReport>,
    pub cells: Vec<CellReport>,
}

fn axis_values(set: &SubMetricSet, axis: Axis) -> (Vec<PerSubMetric<Option<f64>>>, Vec<PerSubMetric<usize>>) {
    let aggs = PerSubMetric::from_fn(|m| aggregate(set.get(m), axis));
    let n = aggs.first_drop.len();
    let values = (0..n).map(|i| aggs.map(|_, a| a[i].value)).collect();
    let skipped = (0..n).map(|i| aggs.map(|_, a| a[i].skipped)).collect();
    (values, skipped)
}

impl MetricReport {
    pub fn compute(grid: &EvaluationGrid, weights: WeightVector) -> Result<Self, MetricsError> {
        let avg = average_accuracy(grid);
        let drops = relative_accuracy_drop(grid)?;
        let raw = SubMetricSet::compute(grid);
        let (scaled, scaling) = min_max_scale(&raw);

        let (raw_v, skipped_v) = axis_values(&raw, Axis::Model);
        let (scaled_v, _) = axis_values(&scaled, Axis::Model);
        let vre_v = vre(&scaled, &weights, Axis::Model);
        let models = grid
            .models()
            .iter()
            .enumerate()
            .map(|(v, name)| ModelReport {
                model: name.clone(),
                clean_accuracy: grid.clean_accuracy(v),
                average_accuracy: model_average(&avg)[v],
                relative_drop: drops.model[v],
                raw: raw_v[v],
                scaled: scaled_v[v],
                skipped: skipped_v[v],
                vre: vre_v[v],
            })
            .collect();

        let (raw_c, skipped_c) = axis_values(&raw, Axis::Corruption);
        let (scaled_c, _) = axis_values(&scaled, Axis::Corruption);
        let vre_c = vre(&scaled, &weights, Axis::Corruption);
        let a_c = corruption_average(&avg);
        let corruptions = grid
            .corruptions()
            .iter()
            .enumerate()
            .map(|(c, name)| CorruptionReport {
                corruption: name.clone(),
                average_accuracy: a_c[c],
                relative_drop: drops.corruption[c],
                raw: raw_c[c],
                scaled: scaled_c[c],
                skipped: skipped_c[c],
                vre: vre_c[c],
            })
            .collect();

        let mut cells = Vec::with_capacity(grid.n_models() * grid.n_corruptions());
        for (v, m) in grid.models().iter().enumerate() {
            for (c, name) in grid.corruptions().iter().enumerate() {
                cells.push(CellReport {
                    model: m.clone(),
                    corruption: name.clone(),
                    average_accuracy: *avg.get(v, c),
                    relative_drop: *drops.cell.get(v, c),
                    errors: grid.errors(v, c).to_vec(),
                    raw: PerSubMetric::from_fn(|k| *raw.get(k).get(v, c)),
                    scaled: PerSubMetric::from_fn(|k| *scaled.get(k).get(v, c)),
                });
            }
        }
        Ok(Self {
            weights,
            scaling,
            models,
            corruptions,
            cells,
        })
    }

    pub fn model(&self, name: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == name)
    }

    pub fn corruption(&self, name: &str) -> Option<&CorruptionReport> {
        self.corruptions.iter().find(|c| c.corruption == name)
    }

    /// Model names sorted by ascending VRE (most robust first); undefined last.
    pub fn model_ranking(&self) -> Vec<&str> {
        rank(self.models.iter().map(|m| (m.model.as_str(), m.vre)))
    }

    /// Corruption names sorted by descending VRE (strongest first).
    pub fn corruption_ranking(&self) -> Vec<&str> {
        let mut r = rank(
            self.corruptions
                .iter()
                .map(|c| (c.corruption.as_str(), c.vre.map(|x| -x))),
        );
        r.truncate(self.corruptions.len());
        r
    }

    pub fn raw_model(&self, name: &str, m: SubMetric) -> Option<f64> {
        *self.model(name)?.raw.get(m)
    }
}

fn rank<'a>(items: impl Iterator<Item = (&'a str, Option<f64>)>) -> Vec<&'a str> {
    let mut v: Vec<(&str, Option<f64>)> = items.collect();
    v.sort_by(|a, b| match (a.1, b.1) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    v.into_iter().map(|(n, _)| n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_report_shape() {
        let g = EvaluationGrid::reference();
        let r = MetricReport::compute(&g, WeightVector::equal()).unwrap();
        assert_eq!(r.models.len(), 4);
        assert_eq!(r.corruptions.len(), 14);
        assert_eq!(r.cells.len(), 56);
        assert_eq!(r.model_ranking(), ["ViLT", "BLIP", "VLE", "PNP"]);
        assert_eq!(&r.corruption_ranking()[..2], ["shot_noise", "zoom_blur"]);
        assert_eq!(r.corruption_ranking().last(), Some(&"brightness"));
    }

    #[test]
    fn mu_plus_average_accuracy_is_one() {
        let g = EvaluationGrid::reference();
        let r = MetricReport::compute(&g, WeightVector::equal()).unwrap();
        for cell in &r.cells {
            assert_eq!(cell.raw.average_error.unwrap(), 1.0 - cell.average_accuracy);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = EvaluationGrid::reference();
        let r = MetricReport::compute(&g, WeightVector::equal()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: MetricReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
