use std::collections::BTreeMap;

use proptest::prelude::*;

use datar::config::{parse_config, serialize_config, DatarConfig};
use datar::engine::{EngineKind, Params, StorageEngine};
use datar::engines::storage::{LogStoreEngine, MemStoreEngine};
use datar::model::{replay, BigData, LineageEntry, OpRegistry, Record, Value};
use datar::tasks::{register_tasks, sort_strings};

fn word_records(words: &[String]) -> Vec<Record> {
    words.iter().map(Record::text).collect()
}

proptest! {
    /// Any mix of Action and Transformation applications replays to the
    /// same records from the origin entry alone.
    #[test]
    fn lineage_replay_is_exact(
        size in 0usize..200,
        seed in 0u64..1000,
        steps in proptest::collection::vec(any::<bool>(), 0..6),
    ) {
        let mut ops = OpRegistry::new();
        register_tasks(&mut ops);
        ops.register("reverse", |records, _| {
            let mut out = records.to_vec();
            out.reverse();
            Ok(out)
        });

        let records = datar::engines::input::generate_records("words", size, seed).unwrap();
        let mut bd = BigData::from_records(
            records,
            LineageEntry::origin_generator("words", size, seed),
        );
        for as_action in steps {
            let name = if as_action { "sort" } else { "reverse" };
            let f = ops.get(name).unwrap().clone();
            if as_action {
                bd = bd.apply_action(name, f.as_ref(), BTreeMap::new()).unwrap();
            } else {
                bd.apply_transformation(name, f.as_ref(), BTreeMap::new()).unwrap();
            }
        }

        let replayed = replay(&bd.lineage, &ops).unwrap();
        prop_assert_eq!(replayed.records, bd.records);
    }

    #[test]
    fn stores_round_trip_arbitrary_records(
        words in proptest::collection::vec("[a-z]{1,12}", 0..50),
        pairs in proptest::collection::vec(("[a-z]{1,8}", any::<i64>()), 0..50),
    ) {
        let mut records = word_records(&words);
        for (k, v) in &pairs {
            records.push(Record::new(k.clone(), Value::Pair(k.clone(), *v)).unwrap());
        }
        let bd = BigData::from_records(records, LineageEntry::origin_generator("words", 0, 0));

        let mut handle = MemStoreEngine::new().open(&Params::new()).unwrap();
        handle.write(&bd).unwrap();
        prop_assert_eq!(&handle.read(bd.id).unwrap().records, &bd.records);

        let dir = tempfile::tempdir().unwrap();
        let mut params = Params::new();
        params.insert("dir".into(), dir.path().display().to_string());
        let mut handle = LogStoreEngine::new().open(&params).unwrap();
        handle.write(&bd).unwrap();
        prop_assert_eq!(&handle.read(bd.id).unwrap().records, &bd.records);
    }

    /// The sorted output is ordered and is a permutation of the input.
    #[test]
    fn sort_is_ordered_permutation(words in proptest::collection::vec("[a-zA-Z0-9]{1,10}", 0..100)) {
        let sorted = sort_strings(&word_records(&words)).unwrap();
        let got: Vec<&str> = sorted
            .iter()
            .map(|r| match &r.value {
                Value::Text(s) => s.as_str(),
                _ => unreachable!(),
            })
            .collect();
        prop_assert!(got.windows(2).all(|w| w[0].as_bytes() <= w[1].as_bytes()));
        let mut expected: Vec<&str> = words.iter().map(String::as_str).collect();
        expected.sort_unstable();
        let mut resorted = got.clone();
        resorted.sort_unstable();
        prop_assert_eq!(resorted, expected);
    }

    #[test]
    fn config_survives_serialize_parse_round_trip(
        input in prop_oneof!["file", "generator"],
        storage in prop_oneof!["memstore", "logstore"],
        output in prop_oneof!["table", "json", "svg"],
        params in proptest::collection::btree_map("[a-z][a-z0-9_]{0,8}", "[a-z0-9./_-]{1,12}", 0..6),
    ) {
        let mut slots = BTreeMap::new();
        slots.insert(EngineKind::Input, input.to_string());
        slots.insert(EngineKind::Storage, storage.to_string());
        slots.insert(EngineKind::Computation, "builtin".to_string());
        slots.insert(EngineKind::Control, "standalone".to_string());
        slots.insert(EngineKind::Output, output.to_string());
        let mut config = DatarConfig::new(slots).unwrap();
        config.set_params(EngineKind::Input, &input, params.clone());
        config.set_params(EngineKind::Storage, &storage, params);

        let text = serialize_config(&config);
        let reparsed = parse_config(&text).unwrap();
        prop_assert_eq!(serialize_config(&reparsed), text);
        prop_assert_eq!(reparsed, config);
    }
}
