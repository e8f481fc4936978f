//! `DOML` model files.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! magic     4 bytes "DOML"
//! version   u16
//! kind      u8   0 knn, 1 rdf, 2 svr, 3 baseline
//! set       u8   1..3
//! target    u8   0 wer, 1 p_ue
//! encoding  u8   0 ordinal, 1 one-hot
//! columns   u32 count, then per column u32 length + UTF-8
//! devices   same layout as columns
//! scaler    u32 width, then width × (f64 mean | f64 sd | u8 constant)
//! payload   kind-specific, see the writers below
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::baseline::Baseline;
use super::design::{Design, DeviceEncoding};
use super::knn::Knn;
use super::rdf::{Forest, Node, Tree, LEAF};
use super::scaler::Scaler;
use super::svr::Svr;
use super::trained::{ModelKind, Params, TrainedModel};
use super::{ModelError, TargetKind};
use crate::features::FeatureSetId;

pub const MODEL_MAGIC: [u8; 4] = *b"DOML";
pub const MODEL_VERSION: u16 = 1;

struct Enc(Vec<u8>);

impl Enc {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn strs(&mut self, v: &[String]) {
        self.u32(v.len() as u32);
        v.iter().for_each(|s| self.str(s));
    }
}

pub fn save_model<W: Write>(model: &TrainedModel, mut sink: W) -> Result<u64, ModelError> {
    let mut e = Enc(Vec::new());
    e.0.extend_from_slice(&MODEL_MAGIC);
    e.0.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    e.u8(model.kind().tag());
    e.u8(model.design.feature_set.tag());
    e.u8(model.target.tag());
    e.u8(model.design.encoding.tag());
    e.strs(&model.design.columns);
    e.strs(&model.design.devices);
    let s = &model.scaler;
    e.u32(s.width() as u32);
    for j in 0..s.width() {
        e.f64(s.means[j]);
        e.f64(s.sds[j]);
        e.u8(s.constant[j] as u8);
    }
    match &model.params {
        Params::Knn(m) => {
            e.u32(m.k as u32);
            e.u64(m.points.len() as u64);
            e.u32(m.points.first().map_or(0, |p| p.len()) as u32);
            m.points.iter().flatten().for_each(|&v| e.f64(v));
            m.targets.iter().for_each(|&v| e.f64(v));
        }
        Params::Rdf(f) => {
            e.u32(f.trees.len() as u32);
            for t in &f.trees {
                e.u32(t.nodes.len() as u32);
                for n in &t.nodes {
                    e.u32(n.feature);
                    e.f64(n.value);
                    e.u32(n.left);
                    e.u32(n.right);
                }
            }
        }
        Params::Svr(m) => {
            e.f64(m.gamma);
            e.f64(m.rho);
            e.f64(m.objective);
            e.u64(m.iterations as u64);
            e.u64(m.support.len() as u64);
            e.u32(m.support.first().map_or(0, |p| p.len()) as u32);
            for (s, b) in m.support.iter().zip(&m.coef) {
                s.iter().for_each(|&v| e.f64(v));
                e.f64(*b);
            }
        }
        Params::Baseline(b) => {
            e.u64(b.cells.len() as u64);
            for ((dev, (t, temp)), (mean, n)) in &b.cells {
                e.str(dev);
                e.u64(*t);
                e.u64(*temp);
                e.f64(*mean);
                e.u64(*n);
            }
            e.u64(b.fallback.len() as u64);
            for ((t, temp), (mean, n)) in &b.fallback {
                e.u64(*t);
                e.u64(*temp);
                e.f64(*mean);
                e.u64(*n);
            }
        }
    }
    sink.write_all(&e.0)?;
    sink.flush()?;
    Ok(e.0.len() as u64)
}

struct Dec<R> {
    src: R,
}

impl<R: Read> Dec<R> {
    fn bytes<const N: usize>(&mut self, what: &'static str) -> Result<[u8; N], ModelError> {
        let mut b = [0u8; N];
        self.src.read_exact(&mut b).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => ModelError::Truncated(what),
            _ => ModelError::Io(e),
        })?;
        Ok(b)
    }
    fn u8(&mut self, what: &'static str) -> Result<u8, ModelError> {
        Ok(self.bytes::<1>(what)?[0])
    }
    fn u32(&mut self, what: &'static str) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.bytes(what)?))
    }
    fn u64(&mut self, what: &'static str) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.bytes(what)?))
    }
    fn f64(&mut self, what: &'static str) -> Result<f64, ModelError> {
        Ok(f64::from_le_bytes(self.bytes(what)?))
    }
    /// A count that must fit in memory sensibly.
    fn len(&mut self, n: u64, what: &'static str) -> Result<usize, ModelError> {
        if n > 1 << 32 {
            return Err(ModelError::Corrupt(format!("{what} count {n} is implausible")));
        }
        Ok(n as usize)
    }
    fn str(&mut self, what: &'static str) -> Result<String, ModelError> {
        let n = self.u32(what)? as usize;
        if n > 1 << 20 {
            return Err(ModelError::Corrupt(format!("{what} length {n} is implausible")));
        }
        let mut b = vec![0u8; n];
        self.src.read_exact(&mut b).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => ModelError::Truncated(what),
            _ => ModelError::Io(e),
        })?;
        String::from_utf8(b).map_err(|_| ModelError::Corrupt(format!("{what} is not UTF-8")))
    }
    fn strs(&mut self, what: &'static str) -> Result<Vec<String>, ModelError> {
        let n = self.u32(what)?;
        let n = self.len(n as u64, what)?;
        (0..n).map(|_| self.str(what)).collect()
    }
}

pub fn load_model<R: Read>(source: R) -> Result<TrainedModel, ModelError> {
    let mut d = Dec { src: source };
    let magic: [u8; 4] = d.bytes("magic")?;
    if magic != MODEL_MAGIC {
        return Err(ModelError::BadMagic(magic));
    }
    let version = u16::from_le_bytes(d.bytes("version")?);
    if version != MODEL_VERSION {
        return Err(ModelError::UnsupportedVersion(version));
    }
    let tag = d.u8("kind")?;
    let kind = ModelKind::from_tag(tag).ok_or_else(|| ModelError::Corrupt(format!("unknown model kind {tag}")))?;
    let tag = d.u8("feature set")?;
    let feature_set =
        FeatureSetId::from_tag(tag).ok_or_else(|| ModelError::Corrupt(format!("unknown feature set {tag}")))?;
    let tag = d.u8("target")?;
    let target = TargetKind::from_tag(tag).ok_or_else(|| ModelError::Corrupt(format!("unknown target {tag}")))?;
    let tag = d.u8("encoding")?;
    let encoding =
        DeviceEncoding::from_tag(tag).ok_or_else(|| ModelError::Corrupt(format!("unknown encoding {tag}")))?;
    let columns = d.strs("columns")?;
    let devices = d.strs("devices")?;
    if devices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::Corrupt("device list is not sorted".into()));
    }
    let design = Design { feature_set, columns, devices, encoding };

    let width = d.u32("scaler")? as usize;
    let width = d.len(width as u64, "scaler")?;
    let mut scaler = Scaler {
        means: Vec::with_capacity(width),
        sds: Vec::with_capacity(width),
        constant: Vec::with_capacity(width),
    };
    for _ in 0..width {
        scaler.means.push(d.f64("scaler")?);
        scaler.sds.push(d.f64("scaler")?);
        scaler.constant.push(d.u8("scaler")? != 0);
    }
    if kind != ModelKind::Baseline && width != design.width() {
        return Err(ModelError::Corrupt(format!("scaler width {width} but design width {}", design.width())));
    }

    let params = match kind {
        ModelKind::Knn => {
            let k = d.u32("knn")? as usize;
            let n = d.u64("knn")?;
            let n = d.len(n, "knn points")?;
            let dim = d.u32("knn")? as usize;
            check_dim(dim, width)?;
            let mut points = Vec::with_capacity(n.min(1 << 20));
            for _ in 0..n {
                points.push((0..dim).map(|_| d.f64("knn points")).collect::<Result<Vec<_>, _>>()?);
            }
            let targets = (0..n).map(|_| d.f64("knn targets")).collect::<Result<Vec<_>, _>>()?;
            Params::Knn(Knn::fit(points, targets, k).map_err(|e| ModelError::Corrupt(e.to_string()))?)
        }
        ModelKind::Rdf => {
            let n_trees = d.u32("forest")? as usize;
            if n_trees == 0 {
                return Err(ModelError::Corrupt("forest has no trees".into()));
            }
            let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
            for _ in 0..n_trees {
                let n_nodes = d.u32("tree")? as usize;
                let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
                for _ in 0..n_nodes {
                    nodes.push(Node {
                        feature: d.u32("node")?,
                        value: d.f64("node")?,
                        left: d.u32("node")?,
                        right: d.u32("node")?,
                    });
                }
                check_tree(&nodes, width)?;
                trees.push(Tree { nodes });
            }
            Params::Rdf(Forest { trees })
        }
        ModelKind::Svr => {
            let gamma = d.f64("svr")?;
            let rho = d.f64("svr")?;
            let objective = d.f64("svr")?;
            let iterations = d.u64("svr")? as usize;
            let n = d.u64("svr")?;
            let n = d.len(n, "support vectors")?;
            let dim = d.u32("svr")? as usize;
            check_dim(dim, width)?;
            let (mut support, mut coef) = (Vec::with_capacity(n.min(1 << 20)), Vec::with_capacity(n.min(1 << 20)));
            for _ in 0..n {
                support.push((0..dim).map(|_| d.f64("support vectors")).collect::<Result<Vec<_>, _>>()?);
                coef.push(d.f64("support vectors")?);
            }
            Params::Svr(Svr { gamma, rho, support, coef, objective, iterations })
        }
        ModelKind::Baseline => {
            let n = d.u64("baseline")?;
            let n = d.len(n, "baseline cells")?;
            let mut cells = BTreeMap::new();
            for _ in 0..n {
                let dev = d.str("baseline cells")?;
                let key = (d.u64("baseline cells")?, d.u64("baseline cells")?);
                cells.insert((dev, key), (d.f64("baseline cells")?, d.u64("baseline cells")?));
            }
            let n = d.u64("baseline")?;
            let n = d.len(n, "baseline fallback")?;
            let mut fallback = BTreeMap::new();
            for _ in 0..n {
                let key = (d.u64("baseline fallback")?, d.u64("baseline fallback")?);
                fallback.insert(key, (d.f64("baseline fallback")?, d.u64("baseline fallback")?));
            }
            Params::Baseline(Baseline { cells, fallback })
        }
    };
    let mut rest = Vec::new();
    d.src.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(ModelError::Corrupt(format!("{} trailing bytes", rest.len())));
    }
    Ok(TrainedModel { target, design, scaler, params })
}

/// Loads a model and checks it is of the expected kind.
pub fn load_model_as<R: Read>(source: R, expected: ModelKind) -> Result<TrainedModel, ModelError> {
    let m = load_model(source)?;
    if m.kind() != expected {
        return Err(ModelError::KindMismatch { expected: expected.to_string(), found: m.kind().to_string() });
    }
    Ok(m)
}

fn check_dim(dim: usize, width: usize) -> Result<(), ModelError> {
    if dim != width {
        return Err(ModelError::Corrupt(format!("point width {dim} but scaler width {width}")));
    }
    Ok(())
}

fn check_tree(nodes: &[Node], width: usize) -> Result<(), ModelError> {
    if nodes.is_empty() {
        return Err(ModelError::Corrupt("empty tree".into()));
    }
    for (i, n) in nodes.iter().enumerate() {
        if n.feature == LEAF {
            continue;
        }
        // children are stored after their parent, which rules out cycles
        let ok = (n.feature as usize) < width
            && (n.left as usize) > i
            && (n.right as usize) > i
            && (n.left as usize) < nodes.len()
            && (n.right as usize) < nodes.len();
        if !ok {
            return Err(ModelError::Corrupt(format!("tree node {i} is malformed")));
        }
    }
    Ok(())
}
