use crate::dataset::PairInstance;
use std::collections::{BTreeMap, HashSet};

/// Feature hashing parameters. `dim` must be a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureConfig {
    pub dim: usize,
    pub hash_seed: u64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            dim: 1 << 18,
            hash_seed: 0,
        }
    }
}

impl FeatureConfig {
    pub fn with_dim(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "feature dimension must be a power of two");
        FeatureConfig {
            dim,
            ..Default::default()
        }
    }

    fn index(&self, ns: Namespace, token: &str) -> u32 {
        let mut bytes = Vec::with_capacity(9 + token.len());
        bytes.extend_from_slice(&self.hash_seed.to_le_bytes());
        bytes.push(ns as u8);
        bytes.extend_from_slice(token.as_bytes());
        (fnv1a64(&bytes) & (self.dim as u64 - 1)) as u32
    }
}

/// Feature namespaces; the discriminant is mixed into the hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Namespace {
    Head = 0,
    Tail = 1,
    HeadContext = 2,
    TailContext = 3,
    Overlap = 4,
    Length = 5,
}

/// Sparse feature vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn from_accumulated(dim: usize, acc: BTreeMap<u32, f64>) -> Self {
        SparseVector {
            dim,
            entries: acc.into_iter().filter(|(_, v)| *v != 0.0).collect(),
        }
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| dense[i as usize] * v).sum()
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Lowercases and splits on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn length_bucket(tokens: usize) -> u32 {
    // floor(log2(1 + n))
    usize::BITS - 1 - (tokens + 1).leading_zeros()
}

/// Hashed bag-of-words over the four text fields, two overlap counts and
/// log-scale length buckets.
///
/// The overlap namespace holds the number of distinct tokens shared by head
/// and tail text (`text`), and the number shared by the head side and the
/// tail side once contexts are included (`side`). Empty fields add nothing.
pub fn featurize(inst: &PairInstance, cfg: &FeatureConfig) -> SparseVector {
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    let fields = [
        (Namespace::Head, "head", &inst.head_text),
        (Namespace::Tail, "tail", &inst.tail_text),
        (Namespace::HeadContext, "head_context", &inst.head_context),
        (Namespace::TailContext, "tail_context", &inst.tail_context),
    ];
    let mut tokens: Vec<Vec<String>> = Vec::with_capacity(4);
    for (ns, name, text) in fields {
        let toks = tokenize(text);
        if !toks.is_empty() {
            for t in &toks {
                *acc.entry(cfg.index(ns, t)).or_insert(0.0) += 1.0;
            }
            let bucket = format!("{name}:{}", length_bucket(toks.len()));
            *acc.entry(cfg.index(Namespace::Length, &bucket)).or_insert(0.0) += 1.0;
        }
        tokens.push(toks);
    }
    let head = set(&[&tokens[0]]);
    let tail = set(&[&tokens[1]]);
    let text_overlap = head.intersection(&tail).count();
    let head_side = set(&[&tokens[0], &tokens[2]]);
    let tail_side = set(&[&tokens[1], &tokens[3]]);
    let side_overlap = head_side.intersection(&tail_side).count();
    for (key, count) in [("text", text_overlap), ("side", side_overlap)] {
        if count > 0 {
            *acc.entry(cfg.index(Namespace::Overlap, key)).or_insert(0.0) += count as f64;
        }
    }
    SparseVector::from_accumulated(cfg.dim, acc)
}

fn set<'a>(v: &[&'a Vec<String>]) -> HashSet<&'a str> {
    v.iter().flat_map(|t| t.iter().map(String::as_str)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn tokenization() {
        assert_eq!(tokenize("Hello, WORLD!! it's 2024"), vec!["hello", "world", "it", "s", "2024"]);
        assert_eq!(tokenize("Ärger über"), vec!["ärger", "über"]);
        assert!(tokenize(" -- ").is_empty());
    }

    #[test]
    fn buckets() {
        assert_eq!(length_bucket(0), 0);
        assert_eq!(length_bucket(1), 1);
        assert_eq!(length_bucket(2), 1);
        assert_eq!(length_bucket(3), 2);
        assert_eq!(length_bucket(7), 3);
    }

    #[test]
    fn overlap_of_identical_texts() {
        let cfg = FeatureConfig::default();
        let inst = PairInstance::plain("hello world", "hello world");
        let v = featurize(&inst, &cfg);
        let text_idx = cfg.index(Namespace::Overlap, "text");
        let value = v.entries.iter().find(|(i, _)| *i == text_idx).unwrap().1;
        assert_eq!(value, 2.0);
        assert_eq!(v, featurize(&inst, &cfg));
        assert!(v.entries.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn empty_contexts_add_nothing() {
        let cfg = FeatureConfig::default();
        let plain = PairInstance::plain("a b", "c");
        let v = featurize(&plain, &cfg);
        // 3 unigrams, 2 length buckets, no overlap.
        let total: f64 = v.entries.iter().map(|e| e.1).sum();
        assert_eq!(total, 5.0);
        let ctx_idx = cfg.index(Namespace::HeadContext, "a");
        assert!(v.entries.iter().all(|(i, _)| *i != ctx_idx));
    }
}
