// Every example must keep running as the library evolves.

mod generate_corpus {
    #![allow(dead_code)]
    include!("../examples/generate_corpus.rs");

    #[test]
    fn runs() {
        let dir = tempfile::tempdir().unwrap();
        run_example(dir.path().join("c.jsonl"), 6).unwrap();
    }
}

macro_rules! example {
    ($name:ident) => {
        mod $name {
            #![allow(dead_code)]
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                run_example().unwrap();
            }
        }
    };
}

example!(bio_conversion);
example!(slot_boundary_detection);
example!(span_clustering);
example!(state_labeling);
example!(transition_graph);
example!(clustering_metrics);
example!(baselines);
example!(augmentation);

mod end_to_end {
    #![allow(dead_code)]
    include!("../examples/end_to_end.rs");

    #[test]
    fn runs() {
        let dir = tempfile::tempdir().unwrap();
        run_example(dir.path().to_path_buf()).unwrap();
    }
}
