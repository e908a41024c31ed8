//! Parameter checkpoints.
//!
//! Layout: a first line holding a JSON header, then one parameter value per
//! line in scientific notation with 17 significant digits. Networks are
//! written first in header order, then named plain vectors.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Activation, LayerShape, Mlp};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct NetHeader {
    name: String,
    layer_shapes: Vec<(usize, usize)>,
    activations: Vec<Activation>,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorHeader {
    name: String,
    len: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    kind: String,
    seed: u64,
    nets: Vec<NetHeader>,
    vectors: Vec<VectorHeader>,
}

/// A named bundle of networks and plain vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub kind: String,
    pub seed: u64,
    pub nets: Vec<(String, Mlp)>,
    pub vectors: Vec<(String, Vec<f64>)>,
}

impl Checkpoint {
    pub fn new(kind: impl Into<String>, seed: u64) -> Self {
        Self {
            kind: kind.into(),
            seed,
            nets: Vec::new(),
            vectors: Vec::new(),
        }
    }

    pub fn with_net(mut self, name: &str, net: &Mlp) -> Self {
        self.nets.push((name.to_owned(), net.clone()));
        self
    }

    pub fn with_vector(mut self, name: &str, values: &[f64]) -> Self {
        self.vectors.push((name.to_owned(), values.to_vec()));
        self
    }

    pub fn net(&self, name: &str) -> Result<&Mlp> {
        self.nets
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::Missing(format!("network '{name}' in checkpoint")))
    }

    pub fn vector(&self, name: &str) -> Result<&[f64]> {
        self.vectors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::Missing(format!("vector '{name}' in checkpoint")))
    }

    pub fn expect_kind(&self, kind: &str) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "checkpoint holds a '{}', expected a '{kind}'",
                self.kind
            )))
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let header = Header {
            kind: self.kind.clone(),
            seed: self.seed,
            nets: self
                .nets
                .iter()
                .map(|(name, net)| NetHeader {
                    name: name.clone(),
                    layer_shapes: net.shapes().iter().map(|s| (s.inputs, s.outputs)).collect(),
                    activations: net.activations().to_vec(),
                    seed: net.seed(),
                })
                .collect(),
            vectors: self
                .vectors
                .iter()
                .map(|(name, v)| VectorHeader {
                    name: name.clone(),
                    len: v.len(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        let values = self
            .nets
            .iter()
            .flat_map(|(_, n)| n.params().iter())
            .chain(self.vectors.iter().flat_map(|(_, v)| v.iter()));
        for v in values {
            writeln!(w, "{v:.16e}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let malformed = |line: u64, message: String| Error::Malformed {
            path: path.to_owned(),
            line,
            message,
        };
        let mut lines = BufReader::new(File::open(path)?).lines();
        let first = lines
            .next()
            .ok_or_else(|| malformed(1, "missing header".into()))??;
        let header: Header =
            serde_json::from_str(&first).map_err(|e| malformed(1, e.to_string()))?;
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let v: f64 = line
                .trim()
                .parse()
                .map_err(|e| malformed(i as u64 + 2, format!("{e}: '{line}'")))?;
            values.push(v);
        }
        let mut cursor = values.into_iter();
        let mut take = |n: usize| -> Result<Vec<f64>> {
            let chunk: Vec<f64> = cursor.by_ref().take(n).collect();
            if chunk.len() == n {
                Ok(chunk)
            } else {
                Err(malformed(0, "checkpoint body shorter than header declares".into()))
            }
        };
        let mut nets = Vec::with_capacity(header.nets.len());
        for nh in header.nets {
            let shapes: Vec<LayerShape> = nh
                .layer_shapes
                .iter()
                .map(|&(inputs, outputs)| LayerShape { inputs, outputs })
                .collect();
            let count: usize = shapes.iter().map(|s| s.inputs * s.outputs + s.outputs).sum();
            let params = take(count)?;
            nets.push((nh.name, Mlp::from_parts(shapes, nh.activations, params, nh.seed)?));
        }
        let mut vectors = Vec::with_capacity(header.vectors.len());
        for vh in header.vectors {
            vectors.push((vh.name, take(vh.len)?));
        }
        if cursor.next().is_some() {
            return Err(malformed(0, "checkpoint body longer than header declares".into()));
        }
        Ok(Self {
            kind: header.kind,
            seed: header.seed,
            nets,
            vectors,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip_is_bit_exact(seed in any::<u64>(), hidden in 1usize..12, extra in proptest::collection::vec(any::<f64>(), 0..6)) {
            let mut net = Mlp::new(&[3, hidden, 2], Activation::Tanh, Activation::Identity, seed);
            // Exercise awkward magnitudes and signed zeros.
            net.params_mut()[0] = -0.0;
            net.params_mut()[1] = 1e-300;
            net.params_mut()[2] = f64::MAX;
            let ckpt = Checkpoint::new("test", seed).with_net("a", &net).with_vector("v", &extra);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("c.ckpt");
            ckpt.save(&path).unwrap();
            let back = Checkpoint::load(&path).unwrap();
            prop_assert_eq!(back.kind.as_str(), "test");
            prop_assert_eq!(back.net("a").unwrap(), &net);
            let v = back.vector("v").unwrap();
            prop_assert_eq!(v.len(), extra.len());
            for (a, b) in v.iter().zip(&extra) {
                prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
            }
        }
    }

    #[test]
    fn truncated_body_is_rejected() {
        let net = Mlp::new(&[2, 2], Activation::Identity, Activation::Identity, 0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ckpt");
        Checkpoint::new("t", 0).with_net("n", &net).save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cut: Vec<&str> = text.lines().take(3).collect();
        std::fs::write(&path, cut.join("\n")).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(Error::Malformed { .. })));
    }
}
