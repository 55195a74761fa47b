//! Published tables and candidate lists, embedded at build time.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

const TABLES: &str = include_str!("../data/tables.toml");
const DESK: &str = include_str!("../data/desk.toml");
const N2_LIST: &str = include_str!("../data/n2_list.txt");
const LEMMA_N3: &str = include_str!("../data/lemma_n3.txt");
const LEMMA_N4: &str = include_str!("../data/lemma_n4.txt");
const LEMMA_N5: &str = include_str!("../data/lemma_n5.txt");
const LEMMA_N6: &str = include_str!("../data/lemma_n6.txt");

#[derive(Debug, Clone, Deserialize)]
pub struct PairTable {
    pub m: u32,
    pub pairs: Vec<(u64, u32)>,
}

/// Exceptional `β` for one `(q, n)`.
#[derive(Debug, Clone, Deserialize)]
pub struct BetaRow {
    pub q: u64,
    pub n: u32,
    #[serde(default)]
    pub all: bool,
    #[serde(default)]
    pub values: Vec<u64>,
    #[serde(default)]
    pub roots: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct M2Exceptions {
    pub exceptions: Vec<(u64, u32, String)>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Tables {
    pub t2: PairTable,
    t3: BTreeMap<String, toml::Value>,
    pub t5: Vec<BetaRow>,
    pub t6: Vec<BetaRow>,
    t7: BTreeMap<String, Vec<u32>>,
    t8: BTreeMap<String, Vec<u32>>,
    pub m2_exceptions: M2Exceptions,
}

fn keyed<'a>(map: impl Iterator<Item = (&'a String, Vec<u64>)>, prefix: char) -> BTreeMap<u64, Vec<u64>> {
    map.filter_map(|(k, v)| Some((k.strip_prefix(prefix)?.parse().ok()?, v))).collect()
}

impl Tables {
    /// `n ↦ q` list, as printed.
    pub fn t3(&self) -> BTreeMap<u64, Vec<u64>> {
        let rows = self.t3.iter().filter_map(|(k, v)| {
            let arr = v.as_array()?;
            Some((k, arr.iter().filter_map(|x| x.as_integer().map(|i| i as u64)).collect()))
        });
        keyed(rows, 'n')
    }

    pub fn t3_m(&self) -> u32 {
        self.t3.get("m").and_then(|v| v.as_integer()).unwrap_or(2) as u32
    }

    /// `q ↦ n` list, as printed.
    pub fn t7(&self) -> BTreeMap<u64, Vec<u64>> {
        keyed(self.t7.iter().map(|(k, v)| (k, v.iter().map(|&n| n as u64).collect())), 'q')
    }

    pub fn t8(&self) -> BTreeMap<u64, Vec<u64>> {
        keyed(self.t8.iter().map(|(k, v)| (k, v.iter().map(|&n| n as u64).collect())), 'q')
    }
}

pub fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| toml::from_str(TABLES).expect("embedded tables parse"))
}

#[derive(Debug, Clone, Deserialize)]
pub struct DeskT2 {
    pub n_min: u32,
    pub n_max: u32,
    pub q_max: u64,
    pub qn_max_log10: u32,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DeskT4 {
    pub n6: u64,
    pub n5: u64,
    pub n4: u64,
    pub n3: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DeskN2List {
    pub q_max: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DeskSearch {
    pub exceptions_qn_max: u64,
    pub m2_qn_max: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Desk {
    pub t2: DeskT2,
    pub t4: DeskT4,
    pub n2_list: DeskN2List,
    pub search: DeskSearch,
}

pub fn desk() -> &'static Desk {
    static D: OnceLock<Desk> = OnceLock::new();
    D.get_or_init(|| toml::from_str(DESK).expect("embedded desk caps parse"))
}

fn parse_list(s: &str) -> Vec<u64> {
    s.split_whitespace().map(|t| t.parse().expect("embedded list holds integers")).collect()
}

/// The `q` left open for `n = 2`, `m = 3`.
pub fn n2_list() -> Vec<u64> {
    parse_list(N2_LIST)
}

/// The `q` left open for `m = 3` and `n ∈ 3..=6`.
pub fn lemma_list(n: u32) -> Option<Vec<u64>> {
    Some(parse_list(match n {
        3 => LEMMA_N3,
        4 => LEMMA_N4,
        5 => LEMMA_N5,
        6 => LEMMA_N6,
        _ => return None,
    }))
}

/// Pairs left open for `m = 3`: the `n ≥ 7` table, the `n = 3..6` lists
/// and the `n = 2` list.
pub fn m3_candidates() -> Vec<(u64, u32)> {
    let mut out = tables().t2.pairs.clone();
    for n in (3..=6).rev() {
        out.extend(lemma_list(n).unwrap().into_iter().map(|q| (q, n)));
    }
    out.extend(n2_list().into_iter().map(|q| (q, 2)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_parses() {
        let t = tables();
        assert_eq!(t.t2.pairs.len(), 18);
        assert_eq!(t.t3().values().map(Vec::len).sum::<usize>(), 155);
        assert_eq!(t.t3_m(), 2);
        assert_eq!(t.t7()[&2][0], 36);
        assert_eq!(t.t8().len(), 6);
        assert_eq!(t.t5.len(), 10);
        assert_eq!(t.t6.len(), 8);
        assert_eq!(n2_list().len(), 1373);
        assert_eq!(*n2_list().last().unwrap(), 3847271);
        assert_eq!(m3_candidates().len(), 1532);
        assert_eq!(desk().t2.q_max, 100);
    }
}
