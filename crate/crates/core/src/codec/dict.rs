//! Per-column dictionaries.

use std::collections::HashMap;

use super::elastic::{elastic_decode, elastic_encode, read_varint, write_varint};
use crate::error::{Error, Result};

/// Distinct values in first-occurrence order, each prefixed by its varint
/// length, plus the elastic-encoded index of every value.
pub fn dict_encode<V: AsRef<[u8]>>(values: &[V]) -> (Vec<u8>, Vec<u8>) {
    let mut ids: HashMap<&[u8], i64> = HashMap::new();
    let mut dict = Vec::new();
    let mut indices = Vec::with_capacity(values.len());
    for v in values {
        let v = v.as_ref();
        let next = ids.len() as i64;
        let id = *ids.entry(v).or_insert_with(|| {
            write_varint(v.len() as u64, &mut dict);
            dict.extend_from_slice(v);
            next
        });
        indices.push(id);
    }
    (dict, elastic_encode(&indices))
}

pub fn dict_entries(dict: &[u8]) -> Result<Vec<&[u8]>> {
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < dict.len() {
        let len = read_varint(dict, &mut pos)? as usize;
        let end = pos
            .checked_add(len)
            .filter(|&e| e <= dict.len())
            .ok_or_else(|| Error::corrupt(format!("dictionary entry at byte {pos} runs past the blob")))?;
        out.push(&dict[pos..end]);
        pos = end;
    }
    Ok(out)
}

pub fn dict_decode(dict: &[u8], indices: &[u8], count: usize) -> Result<Vec<Vec<u8>>> {
    let entries = dict_entries(dict)?;
    elastic_decode(indices, count)?
        .into_iter()
        .map(|i| {
            usize::try_from(i)
                .ok()
                .and_then(|i| entries.get(i))
                .map(|e| e.to_vec())
                .ok_or_else(|| Error::corrupt(format!("dictionary index {i} out of range ({} entries)", entries.len())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_symbols() {
        let (dict, idx) = dict_encode(&["INFO", "INFO", "WARN", "INFO"]);
        assert_eq!(dict_entries(&dict).unwrap(), vec![&b"INFO"[..], b"WARN"]);
        assert_eq!(idx, vec![0, 0, 2, 0]);
        assert_eq!(dict_decode(&dict, &idx, 4).unwrap(), vec![b"INFO".to_vec(), b"INFO".to_vec(), b"WARN".to_vec(), b"INFO".to_vec()]);
    }

    #[test]
    fn constant_column() {
        let values = vec!["x"; 1000];
        let (dict, idx) = dict_encode(&values);
        assert_eq!(dict_entries(&dict).unwrap().len(), 1);
        assert_eq!(idx, vec![0; 1000]);
    }

    #[test]
    fn bad_index_is_corruption() {
        let (dict, _) = dict_encode(&["a"]);
        assert!(dict_decode(&dict, &elastic_encode(&[1]), 1).is_err());
        assert!(dict_entries(&[5, b'a']).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(picks in prop::collection::vec(0usize..50, 0..500)) {
            let tokens: Vec<String> = (0..50).map(|i| format!("t{i}")).collect();
            let values: Vec<&str> = picks.iter().map(|&i| tokens[i].as_str()).collect();
            let (dict, idx) = dict_encode(&values);
            let back = dict_decode(&dict, &idx, values.len()).unwrap();
            prop_assert!(back.iter().zip(&values).all(|(a, b)| a == b.as_bytes()));
        }
    }
}
