use serde::Serialize;

/// Counts of (gold, predicted) label pairs; rows are gold, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Self {
        let k = labels.len();
        ConfusionMatrix {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            counts: vec![0; k * k],
        }
    }

    pub fn from_pairs<S: AsRef<str>>(labels: &[S], gold: &[usize], pred: &[usize]) -> Self {
        assert_eq!(gold.len(), pred.len(), "label sequences differ in length");
        let mut cm = ConfusionMatrix::new(labels);
        for (&g, &p) in gold.iter().zip(pred) {
            cm.add(g, p);
        }
        cm
    }

    /// Builds a matrix from explicit rows.
    pub fn from_rows<S: AsRef<str>>(labels: &[S], rows: &[Vec<u64>]) -> Self {
        let mut cm = ConfusionMatrix::new(labels);
        let k = labels.len();
        assert_eq!(rows.len(), k);
        for (g, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), k);
            cm.counts[g * k..(g + 1) * k].copy_from_slice(row);
        }
        cm
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn add(&mut self, gold: usize, pred: usize) {
        let k = self.k();
        self.counts[gold * k + pred] += 1;
    }

    pub fn get(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold * self.k() + pred]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sum(&self, gold: usize) -> u64 {
        (0..self.k()).map(|p| self.get(gold, p)).sum()
    }

    pub fn col_sum(&self, pred: usize) -> u64 {
        (0..self.k()).map(|g| self.get(g, pred)).sum()
    }

    /// The sub-matrix of labels that occur in gold or in the prediction.
    pub fn observed(&self) -> ConfusionMatrix {
        let keep: Vec<usize> = (0..self.k())
            .filter(|&c| self.row_sum(c) + self.col_sum(c) > 0)
            .collect();
        let mut out = ConfusionMatrix::new(&keep.iter().map(|&c| self.labels[c].as_str()).collect::<Vec<_>>());
        let k = keep.len();
        for (i, &g) in keep.iter().enumerate() {
            for (j, &p) in keep.iter().enumerate() {
                out.counts[i * k + j] = self.get(g, p);
            }
        }
        out
    }

    /// Adds `other`'s counts. Both must share the label vocabulary.
    pub fn merge(&mut self, other: &ConfusionMatrix) {
        assert_eq!(self.labels, other.labels, "merging matrices over different labels");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Unweighted mean of the per-class values.
    #[default]
    Macro,
    /// Values from the pooled counts of the included classes.
    Micro,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold count.
    pub support: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-class precision, recall and F1 for every label of `cm`.
pub fn per_class(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    (0..cm.k())
        .map(|c| {
            let precision = ratio(cm.get(c, c), cm.col_sum(c));
            let recall = ratio(cm.get(c, c), cm.row_sum(c));
            ClassMetrics {
                label: cm.labels()[c].clone(),
                precision,
                recall,
                f1: harmonic(precision, recall),
                support: cm.row_sum(c),
            }
        })
        .collect()
}

/// Averaged precision, recall and F1 over every class except `exclude`.
/// An empty denominator counts as 0.
pub fn macro_prf(cm: &ConfusionMatrix, exclude: Option<&str>, averaging: Averaging) -> Prf {
    let included: Vec<usize> = (0..cm.k())
        .filter(|&c| exclude != Some(cm.labels()[c].as_str()))
        .collect();
    if included.is_empty() {
        return Prf::default();
    }
    match averaging {
        Averaging::Macro => {
            let classes = per_class(cm);
            let n = included.len() as f64;
            let mean = |f: fn(&ClassMetrics) -> f64| included.iter().map(|&c| f(&classes[c])).sum::<f64>() / n;
            Prf {
                precision: mean(|m| m.precision),
                recall: mean(|m| m.recall),
                f1: mean(|m| m.f1),
            }
        }
        Averaging::Micro => {
            let tp: u64 = included.iter().map(|&c| cm.get(c, c)).sum();
            let predicted: u64 = included.iter().map(|&c| cm.col_sum(c)).sum();
            let gold: u64 = included.iter().map(|&c| cm.row_sum(c)).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, gold);
            Prf {
                precision,
                recall,
                f1: harmonic(precision, recall),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ABC: [&str; 3] = ["a", "b", "c"];

    #[test]
    fn diagonal_is_perfect() {
        let cm = ConfusionMatrix::from_rows(&ABC, &[vec![3, 0, 0], vec![0, 1, 0], vec![0, 0, 9]]);
        let m = macro_prf(&cm, None, Averaging::Macro);
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        assert_eq!(macro_prf(&cm, None, Averaging::Micro).f1, 1.0);
    }

    #[test]
    fn three_class_by_hand() {
        let cm = ConfusionMatrix::from_rows(&ABC, &[vec![5, 1, 0], vec![2, 3, 0], vec![0, 0, 4]]);
        // Column sums 7, 4, 4; row sums 6, 5, 4.
        let p = [5.0 / 7.0, 3.0 / 4.0, 1.0];
        let r = [5.0 / 6.0, 3.0 / 5.0, 1.0];
        let f: Vec<f64> = (0..3).map(|i| 2.0 * p[i] * r[i] / (p[i] + r[i])).collect();
        let m = macro_prf(&cm, None, Averaging::Macro);
        assert!((m.precision - p.iter().sum::<f64>() / 3.0).abs() < 1e-15);
        assert!((m.recall - r.iter().sum::<f64>() / 3.0).abs() < 1e-15);
        assert!((m.f1 - f.iter().sum::<f64>() / 3.0).abs() < 1e-15);

        let focused = macro_prf(&cm, Some("a"), Averaging::Macro);
        assert!((focused.f1 - (f[1] + f[2]) / 2.0).abs() < 1e-15);

        let micro = macro_prf(&cm, None, Averaging::Micro);
        assert!((micro.f1 - 12.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn empty_class_counts_as_zero() {
        let cm = ConfusionMatrix::from_rows(&ABC, &[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 0]]);
        let pc = per_class(&cm);
        assert_eq!((pc[2].precision, pc[2].recall, pc[2].f1), (0.0, 0.0, 0.0));
        assert!((macro_prf(&cm, None, Averaging::Macro).f1 - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn observed_drops_unused_labels() {
        let cm = ConfusionMatrix::from_rows(&ABC, &[vec![2, 0, 1], vec![0, 0, 0], vec![0, 0, 3]]);
        let o = cm.observed();
        assert_eq!(o.labels(), &["a", "c"]);
        assert_eq!((o.get(0, 1), o.get(1, 1)), (1, 3));
    }

    #[test]
    fn merge_adds() {
        let mut a = ConfusionMatrix::from_pairs(&ABC, &[0, 1], &[0, 2]);
        let b = ConfusionMatrix::from_pairs(&ABC, &[2], &[2]);
        a.merge(&b);
        assert_eq!(a, ConfusionMatrix::from_pairs(&ABC, &[0, 1, 2], &[0, 2, 2]));
        assert_eq!(a.total(), 3);
    }

    fn matrix() -> impl Strategy<Value = Vec<Vec<u64>>> {
        (2usize..6).prop_flat_map(|k| prop::collection::vec(prop::collection::vec(0u64..20, k), k))
    }

    proptest! {
        #[test]
        fn permuting_classes_keeps_macro(rows in matrix(), seed in any::<u64>()) {
            let k = rows.len();
            let labels: Vec<String> = (0..k).map(|i| format!("l{i}")).collect();
            let mut perm: Vec<usize> = (0..k).collect();
            crate::rng::SplitMix64::new(seed).shuffle(&mut perm);
            let permuted: Vec<Vec<u64>> = (0..k).map(|g| (0..k).map(|p| rows[perm[g]][perm[p]]).collect()).collect();
            let plabels: Vec<String> = perm.iter().map(|&i| labels[i].clone()).collect();
            let a = macro_prf(&ConfusionMatrix::from_rows(&labels, &rows), None, Averaging::Macro);
            let b = macro_prf(&ConfusionMatrix::from_rows(&plabels, &permuted), None, Averaging::Macro);
            prop_assert!((a.f1 - b.f1).abs() < 1e-12);
            prop_assert!((a.precision - b.precision).abs() < 1e-12);
            let fa = macro_prf(&ConfusionMatrix::from_rows(&labels, &rows), Some("l0"), Averaging::Macro);
            let fb = macro_prf(&ConfusionMatrix::from_rows(&plabels, &permuted), Some("l0"), Averaging::Macro);
            prop_assert!((fa.f1 - fb.f1).abs() < 1e-12);
        }

        #[test]
        fn moving_off_diagonal_never_helps(rows in matrix(), pick in any::<(usize, usize)>()) {
            let k = rows.len();
            let c = pick.0 % k;
            let mut to = pick.1 % k;
            if to == c { to = (to + 1) % k; }
            prop_assume!(rows[c][c] > 0);
            let labels: Vec<String> = (0..k).map(|i| format!("l{i}")).collect();
            let before = macro_prf(&ConfusionMatrix::from_rows(&labels, &rows), None, Averaging::Macro).f1;
            let mut moved = rows.clone();
            moved[c][c] -= 1;
            moved[c][to] += 1;
            let after = macro_prf(&ConfusionMatrix::from_rows(&labels, &moved), None, Averaging::Macro).f1;
            prop_assert!(after <= before + 1e-12, "{before} -> {after}");
        }

        #[test]
        fn values_in_unit_interval(rows in matrix()) {
            let labels: Vec<String> = (0..rows.len()).map(|i| format!("l{i}")).collect();
            let cm = ConfusionMatrix::from_rows(&labels, &rows);
            for m in per_class(&cm) {
                for v in [m.precision, m.recall, m.f1] {
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }
}
