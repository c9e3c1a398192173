use circlemap::{
    build_atlas, load_atlas, save_atlas, AtlasSpec, Error, FamilySpec, Generator, Rational,
    RotationConfig, TongueAtlas,
};

fn spec(generator: Generator) -> AtlasSpec {
    AtlasSpec {
        family: FamilySpec {
            name: "sine-l".into(),
            l: 3,
        },
        tol: 1e-10,
        generator,
    }
}

fn small() -> TongueAtlas {
    build_atlas(&spec(Generator::Farey { q_max: 7 }), 2, &RotationConfig::default()).unwrap()
}

#[test]
fn save_load_round_trip() {
    let atlas = small();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("atlas.jsonl");
    save_atlas(&atlas, &path).unwrap();
    let back = load_atlas(&path).unwrap();
    assert_eq!(back.to_jsonl(), atlas.to_jsonl());
    assert_eq!(back.fingerprint(), atlas.fingerprint());
    let third = Rational::from((1, 3));
    assert_eq!(back.center(&third).unwrap(), atlas.center(&third).unwrap());
}

#[test]
fn result_does_not_depend_on_jobs() {
    let g = Generator::Harmonic {
        domain: "1/3:1/2".into(),
        depth: 2,
        cutoff: 3,
        locking_depth: 1,
    };
    let cfg = RotationConfig::default();
    let one = build_atlas(&spec(g.clone()), 1, &cfg).unwrap();
    let four = build_atlas(&spec(g), 4, &cfg).unwrap();
    assert_eq!(one.to_jsonl(), four.to_jsonl());
    assert!(one.records().iter().any(|r| r.locking.is_none()));
}

#[test]
fn tampering_is_detected() {
    let text = small().to_jsonl();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[3] = lines[3].replacen("e-1", "e-2", 1);
    let edited = lines.join("\n") + "\n";
    assert!(matches!(
        TongueAtlas::from_jsonl(&edited),
        Err(Error::CorruptAtlas(_))
    ));

    let dropped: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
    assert!(matches!(
        TongueAtlas::from_jsonl(&dropped),
        Err(Error::CorruptAtlas(_))
    ));

    let bumped = text.replacen("\"format_version\":1", "\"format_version\":2", 1);
    assert!(matches!(
        TongueAtlas::from_jsonl(&bumped),
        Err(Error::VersionMismatch(2))
    ));
}

#[test]
fn missing_entries_are_reported() {
    let atlas = small();
    assert!(matches!(
        atlas.center(&Rational::from((1, 8))),
        Err(Error::MissingCenter(_))
    ));
    let h = build_atlas(
        &spec(Generator::Harmonic {
            domain: "0/1:1/1".into(),
            depth: 1,
            cutoff: 2,
            locking_depth: 0,
        }),
        1,
        &RotationConfig::default(),
    )
    .unwrap();
    assert!(h.center(&Rational::from((1, 3))).is_ok());
    assert!(matches!(
        h.tongue(&Rational::from((1, 3))),
        Err(Error::MissingLocking(_))
    ));
}
