use simonq::circuits::{build_encryption_circuit, build_h_circuit_d2};
use simonq::decompose::{summarize_resources, LoweringScheme};
use simonq::simon::Variant;

// variant, rounds, not, cnot, toffoli, t-depth, full-depth, qubits
const ROWS: &[(Variant, usize, u64, u64, u64, u64, u64, u64)] = &[
    (Variant::Simon32_64, 32, 448, 2816, 512, 288, 1024, 96),
    (Variant::Simon32_64, 19, 240, 1568, 304, 171, 608, 96),
    (Variant::Simon48_72, 36, 792, 3312, 864, 432, 1512, 120),
    (Variant::Simon48_72, 19, 384, 1680, 456, 228, 798, 120),
    (Variant::Simon48_96, 36, 768, 4800, 864, 432, 1512, 144),
    (Variant::Simon48_96, 19, 360, 2352, 456, 228, 798, 144),
    (Variant::Simon64_96, 42, 1248, 5184, 1344, 630, 2184, 160),
    (Variant::Simon64_96, 26, 736, 3136, 832, 390, 1352, 160),
    (Variant::Simon64_128, 44, 1280, 7936, 1408, 660, 2288, 192),
    (Variant::Simon64_128, 26, 704, 4480, 832, 390, 1352, 192),
];

#[test]
fn encryption_rows_all_variants() {
    for &(v, rounds, not, cnot, tof, td, fd, q) in ROWS {
        let (c, _) = build_encryption_circuit(&v.params(), rounds).unwrap();
        let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
        let got = (r.not, r.cnot, r.toff_s, r.t_depth, r.full_depth, r.qubits);
        assert_eq!(got, (not, cnot, tof, td, fd, q), "{v} {rounds}");
        assert_eq!(r.toff_c, 7 * tof);
        assert_eq!(r.toff_h, 2 * tof);
        assert_eq!(r.t, 7 * tof);
        assert_eq!(r.cliff, not + cnot + 10 * tof);
    }
}

#[test]
fn encryption_t_depth_is_three_toffoli_stages() {
    for v in Variant::ALL {
        let (c, _) = build_encryption_circuit(&v.params(), 19).unwrap();
        let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
        assert_eq!(r.t_depth, 3 * r.toffoli_depth, "{v}");
    }
}

#[test]
fn h_circuit_inventory() {
    let (c, _, _) = build_h_circuit_d2().unwrap();
    let r = summarize_resources(&c, LoweringScheme::paper()).unwrap();
    assert_eq!((r.cnot, r.toff_s, r.toffoli_depth), (212, 68, 16));
    assert_eq!((r.t_depth, r.full_depth, r.qubits), (57, 117, 121));
}
