use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netmodel::io::Table;
use crate::{row, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CompareOptions {
    /// Column naming the instance in both tables.
    pub id_column: String,
    pub column_a: String,
    pub column_b: String,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            id_column: "instance".into(),
            column_a: "cost".into(),
            column_b: "cost".into(),
            resamples: 2000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionRow {
    pub id: String,
    pub a: f64,
    pub b: f64,
    /// `(a - b) / a`.
    pub reduction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    /// In the order of table `a`.
    pub rows: Vec<ReductionRow>,
    pub mean: f64,
    /// Percentile bootstrap interval of the mean.
    pub ci95: (f64, f64),
}

impl Comparison {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["instance", "a", "b", "reduction"]);
        for r in &self.rows {
            t.push(row![r.id.as_str(), r.a, r.b, r.reduction]);
        }
        t
    }
}

fn keyed(t: &Table, id: &str, col: &str) -> Result<Vec<(String, f64)>> {
    let ids = t.column(id)?;
    let vals = t.float_column(col)?;
    Ok(ids.into_iter().map(str::to_string).zip(vals).collect())
}

/// Per-row and mean relative reduction of `b` against `a`, matched by id.
pub fn compare(a: &Table, b: &Table, opts: &CompareOptions) -> Result<Comparison> {
    let left = keyed(a, &opts.id_column, &opts.column_a)?;
    let right: HashMap<String, f64> = keyed(b, &opts.id_column, &opts.column_b)?.into_iter().collect();
    if right.len() != left.len() {
        return Err(Error::InvalidArgument(format!(
            "tables have {} and {} distinct instances",
            left.len(),
            right.len()
        )));
    }
    let mut rows = Vec::with_capacity(left.len());
    for (id, va) in left {
        let vb = *right
            .get(&id)
            .ok_or_else(|| Error::InvalidArgument(format!("instance `{id}` missing from the second table")))?;
        let reduction = if va == vb {
            0.0
        } else if va == 0.0 {
            return Err(Error::InvalidArgument(format!("instance `{id}` has zero baseline")));
        } else {
            (va - vb) / va
        };
        rows.push(ReductionRow { id, a: va, b: vb, reduction });
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no rows to compare".into()));
    }
    let r: Vec<f64> = rows.iter().map(|x| x.reduction).collect();
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut boot: Vec<f64> = (0..opts.resamples.max(1))
        .map(|_| (0..r.len()).map(|_| r[rng.gen_range(0..r.len())]).sum::<f64>() / r.len() as f64)
        .collect();
    boot.sort_by(f64::total_cmp);
    let at = |q: f64| boot[((q * (boot.len() - 1) as f64).round()) as usize];
    Ok(Comparison { rows, mean, ci95: (at(0.025), at(0.975)) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, f64)]) -> Table {
        let mut t = Table::new(&["instance", "cost"]);
        for (id, c) in rows {
            t.push(row![*id, *c]);
        }
        t
    }

    #[test]
    fn identical_tables_reduce_nothing() {
        let t = table(&[("a", 3.0), ("b", 5.0)]);
        let c = compare(&t, &t, &CompareOptions::default()).unwrap();
        assert_eq!((c.mean, c.ci95), (0.0, (0.0, 0.0)));
    }

    #[test]
    fn butterfly_row_is_five_percent() {
        let c = compare(&table(&[("fixture", 10.0)]), &table(&[("fixture", 9.5)]), &CompareOptions::default()).unwrap();
        assert!((c.mean - 0.05).abs() < 1e-12);
    }

    #[test]
    fn matches_by_id_not_order() {
        let a = table(&[("x", 4.0), ("y", 2.0)]);
        let b = table(&[("y", 1.0), ("x", 3.0)]);
        let c = compare(&a, &b, &CompareOptions::default()).unwrap();
        assert_eq!(c.rows[0].reduction, 0.25);
        assert_eq!(c.rows[1].reduction, 0.5);
        assert!(c.ci95.0 <= c.mean && c.mean <= c.ci95.1);
    }

    #[test]
    fn mismatched_ids_are_an_error() {
        let a = table(&[("x", 4.0)]);
        let b = table(&[("z", 4.0)]);
        assert!(compare(&a, &b, &CompareOptions::default()).is_err());
    }
}
