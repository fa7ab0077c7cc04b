//! Regenerates the on-disk fixture corpus from the in-tree instances.
//!
//! The corpus is committed; this writer exists so it can be rebuilt after a
//! format change. Run on demand:
//! `cargo test -p specpos regenerate -- --ignored`.
//!
//! Every document is round-tripped through the parser before being written,
//! and `fixtures/cycle.spec` is maintained by hand because the serializer
//! cannot produce an invalid diagram.

use std::fs;
use std::path::PathBuf;

use crate::doc::{parse, serialize, spectrum_document, InstanceDocument};
use crate::partition::MinfeasiblePartition;
use crate::precompletion::{spec_a, Mode};
use crate::ring::Characteristic;
use crate::testutil::{
    chain4, set_flags, split, split_partition, xyz, xyz_partition, xyzw, xyzw_partition,
};
use crate::SpecDiagram;

fn fixtures_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn write(rel: &str, doc: &InstanceDocument) {
    let path = fixtures_root().join(rel);
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    let text = serialize(doc);
    assert_eq!(&parse(&text).unwrap(), doc, "{rel} must round-trip");
    fs::write(path, text).unwrap();
}

fn instance(
    diagram: SpecDiagram,
    partition: Option<MinfeasiblePartition>,
    characteristic: Option<Characteristic>,
    metadata: &[(&str, &str)],
) -> InstanceDocument {
    InstanceDocument {
        diagram,
        partition,
        characteristic,
        metadata: metadata
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        bounds: Default::default(),
    }
}

fn condition_fixture(
    diagram: SpecDiagram,
    partition: MinfeasiblePartition,
    characteristic: Characteristic,
    metadata: &[(&str, &str)],
) -> InstanceDocument {
    instance(diagram, Some(partition), Some(characteristic), metadata)
}

#[test]
#[ignore = "rewrites the fixture corpus; run explicitly when the format changes"]
fn regenerate() {
    write(
        "xyz.spec",
        &instance(
            xyz(),
            Some(xyz_partition()),
            Some(Characteristic::Prime { p: 5 }),
            &[("name", "three-component hypersurface")],
        ),
    );
    write(
        "split.spec",
        &instance(
            split(),
            Some(split_partition()),
            Some(Characteristic::Prime { p: 5 }),
            &[("name", "split variant: one prime over both collapsed minimals")],
        ),
    );
    write(
        "xyzw.spec",
        &instance(
            xyzw(),
            Some(xyzw_partition()),
            Some(Characteristic::Prime { p: 5 }),
            &[("name", "four minimals with two shared height-one primes")],
        ),
    );
    write(
        "badpartition.spec",
        &instance(
            xyz(),
            Some(MinfeasiblePartition::new(
                vec!["xy".into()],
                vec![vec!["xy".into()]],
            )),
            None,
            &[("name", "invalid: minimal z lies under no member of C")],
        ),
    );

    write(
        "expected/xyz-spec-a-exact.json",
        &spectrum_document(&spec_a(&xyz(), &xyz_partition(), Mode::Exact).unwrap()),
    );
    write(
        "expected/xyz-spec-a-countable.json",
        &spectrum_document(&spec_a(&xyz(), &xyz_partition(), Mode::Countable).unwrap()),
    );

    conditions();
}

/// The characteristic-condition table. Each file's metadata states the
/// expected outcome: `expect_cases` (comma-joined, possibly empty),
/// `expect_verdict`, `expect_iv` (a/b/c, mixed characteristic only), and
/// optional `expect_warning` / `expect_no_warning` substrings.
fn conditions() {
    write(
        "conditions/cond-i-prime.spec",
        &condition_fixture(
            xyz(),
            xyz_partition(),
            Characteristic::Prime { p: 5 },
            &[
                ("expect_cases", "i"),
                ("expect_verdict", "Constructive"),
                ("name", "prime characteristic holds outright"),
            ],
        ),
    );

    write(
        "conditions/cond-ii-rational.spec",
        &condition_fixture(
            xyz(),
            xyz_partition(),
            Characteristic::ZeroMzZero,
            &[
                ("expect_cases", "ii"),
                ("expect_verdict", "Constructive"),
                ("name", "equicharacteristic zero with no prime in M"),
            ],
        ),
    );

    let mut d = xyz();
    for id in ["x", "y", "z"] {
        set_flags(&mut d, id, Some(false), None, None);
    }
    write(
        "conditions/cond-iii.spec",
        &condition_fixture(
            d,
            xyz_partition(),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", "iii,iv"),
                ("expect_iv", "true,true,true"),
                ("expect_verdict", "Constructive"),
                ("expect_warning", "minimal nodes only"),
                ("name", "p outside every C member"),
            ],
        ),
    );

    let mut d = xyz();
    set_flags(&mut d, "x", Some(true), Some(false), None);
    set_flags(&mut d, "y", Some(true), Some(false), None);
    set_flags(&mut d, "z", Some(false), None, None);
    write(
        "conditions/cond-iv.spec",
        &condition_fixture(
            d,
            xyz_partition(),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", "iv"),
                ("expect_iv", "true,true,true"),
                ("expect_verdict", "Constructive"),
                ("name", "p inside some C members, all three sub-conditions hold"),
            ],
        ),
    );

    let mut d = chain4();
    set_flags(&mut d, "q", Some(true), Some(false), None);
    set_flags(&mut d, "a", Some(false), None, Some(true));
    set_flags(&mut d, "big", Some(true), None, None);
    write(
        "conditions/cond-iv-a-fail.spec",
        &condition_fixture(
            d,
            MinfeasiblePartition::new(vec!["big".into()], vec![vec!["big".into()]]),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", ""),
                ("expect_iv", "false,true,true"),
                ("expect_verdict", "Obstructed"),
                ("expect_warning", "single non-minimal node"),
                ("name", "associated prime under a C member misses p"),
            ],
        ),
    );

    let mut d = xyz();
    set_flags(&mut d, "x", Some(true), Some(false), None);
    set_flags(&mut d, "y", Some(false), None, None);
    set_flags(&mut d, "z", Some(false), None, None);
    write(
        "conditions/cond-iv-b-fail.spec",
        &condition_fixture(
            d,
            xyz_partition(),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", ""),
                ("expect_iv", "true,false,true"),
                ("expect_verdict", "Obstructed"),
                ("name", "a subcollection mixes members with and without p"),
            ],
        ),
    );

    let mut d = xyz();
    set_flags(&mut d, "x", Some(true), Some(true), None);
    set_flags(&mut d, "y", Some(true), Some(false), None);
    set_flags(&mut d, "z", Some(true), None, None);
    write(
        "conditions/cond-iv-c-fail.spec",
        &condition_fixture(
            d,
            xyz_partition(),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", ""),
                ("expect_iv", "true,true,false"),
                ("expect_verdict", "Undetermined"),
                ("name", "annihilator condition fails, necessity hypothesis drops"),
            ],
        ),
    );

    let mut d = xyz();
    set_flags(&mut d, "x", None, Some(false), None);
    set_flags(&mut d, "y", None, Some(false), None);
    set_flags(&mut d, "z", None, Some(true), None);
    write(
        "conditions/cond-v.spec",
        &condition_fixture(
            d,
            xyz_partition(),
            Characteristic::PrimePower { p: 2, k: 3 },
            &[
                ("expect_cases", "v"),
                ("expect_verdict", "Constructive"),
                ("name", "prime power with the single-minimal slot waived"),
            ],
        ),
    );

    let mut d = xyz();
    set_flags(&mut d, "x", None, Some(true), None);
    set_flags(&mut d, "y", None, Some(false), None);
    write(
        "conditions/cond-v-fail.spec",
        &condition_fixture(
            d,
            xyz_partition(),
            Characteristic::PrimePower { p: 2, k: 2 },
            &[
                ("expect_cases", ""),
                ("expect_verdict", "Undetermined"),
                ("name", "prime power with the annihilator inside a checked member"),
            ],
        ),
    );

    let mut d = chain4();
    set_flags(&mut d, "q", Some(false), None, None);
    set_flags(&mut d, "big", Some(false), None, None);
    write(
        "conditions/cond-singleton-warning.spec",
        &condition_fixture(
            d,
            MinfeasiblePartition::new(vec!["big".into()], vec![vec!["big".into()]]),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", "iii,iv"),
                ("expect_iv", "true,true,true"),
                ("expect_verdict", "Constructive"),
                ("expect_warning", "single non-minimal node"),
                ("name", "lone non-minimal subcollection stays enforced"),
            ],
        ),
    );

    let mut d = chain4();
    set_flags(&mut d, "q", Some(true), Some(false), None);
    set_flags(&mut d, "a", Some(true), Some(false), Some(true));
    set_flags(&mut d, "big", Some(true), None, None);
    write(
        "conditions/cond-embedded-warning.spec",
        &condition_fixture(
            d,
            MinfeasiblePartition::new(vec!["big".into()], vec![vec!["big".into()]]),
            Characteristic::ZeroMzP { p: 2 },
            &[
                ("expect_cases", "iv"),
                ("expect_iv", "true,true,true"),
                ("expect_verdict", "Constructive"),
                ("expect_no_warning", "minimal nodes only"),
                ("name", "embedded associated prime joins the checks"),
            ],
        ),
    );

    let mut d = xyzw();
    set_flags(&mut d, "xz", Some(true), Some(false), None);
    set_flags(&mut d, "yz", Some(true), Some(false), None);
    set_flags(&mut d, "xw", Some(true), Some(false), None);
    set_flags(&mut d, "yw", Some(false), None, None);
    write(
        "conditions/cond-mixed-c2.spec",
        &condition_fixture(
            d,
            xyzw_partition(),
            Characteristic::ZeroMzP { p: 3 },
            &[
                ("expect_cases", "iv"),
                ("expect_iv", "true,true,true"),
                ("expect_verdict", "Constructive"),
                ("name", "two subcollections, one waived, under mixed characteristic"),
            ],
        ),
    );
}
