//! Golden-file check: the canonical serialization of every basis family
//! element with 2l <= 3 is pinned.

use quatlab::actions::ALL_FAMILIES;
use quatlab::bases::basis_or_zero;
use std::fmt::Write;

#[test]
fn ktype_bases_match_golden_file() {
    let mut out = String::new();
    for fam in ALL_FAMILIES {
        for two_l in 0..=3 {
            for idx in fam.enumerate(two_l) {
                let sym = basis_or_zero(fam, idx);
                writeln!(
                    out,
                    "{:?} 2l={} 2m={} 2n={}: {}",
                    fam,
                    idx.two_l,
                    idx.two_m,
                    idx.two_n,
                    sym.to_canonical_string()
                )
                .unwrap();
            }
        }
    }
    let golden = include_str!("golden/ktype_bases_2l_le_3.txt");
    assert_eq!(out, golden, "basis serialization drifted from the golden file");
}
