use serde::{Deserialize, Serialize};

/// How several input vectors are combined into one network input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMap {
    /// Plain concatenation.
    #[default]
    Concat,
    /// Flattened outer product. With one-hot parts this is a one-hot code of
    /// the joint index, so a linear network becomes a lookup table.
    Outer,
}

impl FeatureMap {
    pub fn dim(self, parts: &[usize]) -> usize {
        match self {
            FeatureMap::Concat => parts.iter().sum(),
            FeatureMap::Outer => parts.iter().product(),
        }
    }

    pub fn apply(self, parts: &[&[f64]]) -> Vec<f64> {
        match self {
            FeatureMap::Concat => parts.iter().flat_map(|p| p.iter().copied()).collect(),
            FeatureMap::Outer => {
                let mut acc = vec![1.0];
                for p in parts {
                    let mut next = Vec::with_capacity(acc.len() * p.len());
                    for a in &acc {
                        next.extend(p.iter().map(|v| a * v));
                    }
                    acc = next;
                }
                acc
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outer_of_one_hots_is_one_hot() {
        let f = FeatureMap::Outer.apply(&[&[0.0, 1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(f, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(FeatureMap::Outer.dim(&[3, 2]), 6);
        assert_eq!(FeatureMap::Concat.apply(&[&[1.0], &[2.0, 3.0]]), vec![1.0, 2.0, 3.0]);
    }
}
