//! Bundled code fixtures, their printed syndrome tables and a plain-text
//! catalog format.
//!
//! Qudit 0 is the leftmost tensor factor. Printed tables label qudits
//! little-endian (label j is qudit n-1-j) except the three-qubit table, whose
//! labels count from 1 (label k is qudit k-1).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::codes::{concatenate, encoder_from_stabilizers, single_qudit_paulis, CodeSpec, KlMode, Syndrome};
use crate::error::{Error, Result};
use crate::gates::Circuit;
use crate::pauli::{PauliWord, StabilizerSet};

pub const CODE_NAMES: [&str; 9] = [
    "bit-flip",
    "phase-flip",
    "four-qubit",
    "five-qubit",
    "nine-qubit",
    "qutrit-shift",
    "qutrit-phase",
    "qutrit-erasure",
    "nine-qutrit",
];

fn letters(words: &[&str]) -> Result<StabilizerSet> {
    StabilizerSet::new(words.iter().map(|w| PauliWord::from_letters(w)).collect::<Result<_>>()?)
}

fn x_type(d: u32, a: &[u32]) -> PauliWord {
    PauliWord::from_exponents(d, a, &vec![0; a.len()]).expect("valid exponents")
}

fn z_type(d: u32, b: &[u32]) -> PauliWord {
    PauliWord::from_exponents(d, &vec![0; b.len()], b).expect("valid exponents")
}

fn powers_on(d: u32, n: usize, q: usize, x: bool) -> Vec<PauliWord> {
    (1..d).map(|p| if x { PauliWord::single(d, n, q, p, 0) } else { PauliWord::single(d, n, q, 0, p) }).collect()
}

pub fn bit_flip() -> Result<CodeSpec> {
    let enc = Circuit::new(2, 3).cx(0, 1).cx(0, 2);
    let errs = (0..3).map(|q| PauliWord::x_on(2, 3, q)).collect();
    CodeSpec::new("bit-flip", enc, 1, letters(&["IZZ", "ZIZ"])?, errs, KlMode::Strict)
}

pub fn phase_flip() -> Result<CodeSpec> {
    let enc = Circuit::new(2, 3).cx(0, 1).cx(0, 2).h(0).h(1).h(2);
    let errs = (0..3).map(|q| PauliWord::z_on(2, 3, q)).collect();
    CodeSpec::new("phase-flip", enc, 1, letters(&["IXX", "XIX"])?, errs, KlMode::Strict)
}

/// The [[4,2,2]] detection code; input `|a,b,0,0>` maps to
/// `|c, b+c, a+c, a+b+c>` summed over c.
pub fn four_qubit() -> Result<CodeSpec> {
    let enc = Circuit::new(2, 4).cx(0, 2).cx(0, 3).cx(1, 3).cx(2, 0).h(0).cx(0, 1).cx(0, 2).cx(0, 3);
    CodeSpec::new("four-qubit", enc, 2, letters(&["ZZZZ", "XXXX"])?, single_qudit_paulis(2, 4), KlMode::Detection)
}

pub fn five_qubit() -> Result<CodeSpec> {
    let stabs = letters(&["XIZZY", "ZXYIY", "IYYZX", "ZIXXX"])?;
    let enc = encoder_from_stabilizers(2, 5, &stabs)?;
    CodeSpec::new("five-qubit", enc, 1, stabs, single_qudit_paulis(2, 5), KlMode::Strict)
}

pub fn nine_qubit() -> Result<CodeSpec> {
    let mut enc = Circuit::new(2, 9).cx(0, 3).cx(0, 6).h(0).h(3).h(6);
    for b in [0, 3, 6] {
        enc = enc.cx(b, b + 1).cx(b, b + 2);
    }
    let stabs = letters(&[
        "IIIIZZIZZ",
        "IZZIIIIII",
        "IZZZIZZIZ",
        "IIIIZZIII",
        "IZZIIIZZI",
        "ZIZIIIZZI",
        "XXXXXXIII",
        "XXXIIIXXX",
    ])?;
    CodeSpec::new("nine-qubit", enc, 1, stabs, single_qudit_paulis(2, 9), KlMode::Degenerate)
}

/// Qutrit code against shifts: `|j_L> = |j, 2j, j>`.
pub fn qutrit_shift() -> Result<CodeSpec> {
    let enc = Circuit::new(3, 3).cx(0, 1).cx(1, 2);
    let stabs = StabilizerSet::new(vec![z_type(3, &[2, 2, 0]), z_type(3, &[2, 1, 2])])?;
    let errs = (0..3).flat_map(|q| powers_on(3, 3, q, true)).collect();
    CodeSpec::new("qutrit-shift", enc, 1, stabs, errs, KlMode::Strict)
}

/// Qutrit code against phase errors: `|k_L>` is the uniform superposition of
/// `|abc>` with `a + b + c = k mod 3`.
pub fn qutrit_phase() -> Result<CodeSpec> {
    let enc = Circuit::new(3, 3).h(1).h(2).cx(1, 0).cx(2, 0);
    let stabs = StabilizerSet::new(vec![x_type(3, &[1, 1, 1]), x_type(3, &[2, 1, 0])])?;
    let errs = (0..3).flat_map(|q| powers_on(3, 3, q, false)).collect();
    CodeSpec::new("qutrit-phase", enc, 1, stabs, errs, KlMode::Strict)
}

/// Corrects any X or Z power on qudit 2, the erased position.
pub fn qutrit_erasure() -> Result<CodeSpec> {
    let enc = Circuit::new(3, 3).cx(0, 1).cx(1, 2).cx(2, 0).h(0).cx(0, 2);
    let stabs = StabilizerSet::new(vec![x_type(3, &[2, 0, 1]), z_type(3, &[1, 1, 1])])?;
    let mut errs = powers_on(3, 3, 2, true);
    errs.extend(powers_on(3, 3, 2, false));
    CodeSpec::new("qutrit-erasure", enc, 1, stabs, errs, KlMode::Strict)
}

pub fn nine_qutrit() -> Result<CodeSpec> {
    let mut code = concatenate(&qutrit_phase()?, &qutrit_shift()?)?;
    code.name = "nine-qutrit".into();
    Ok(code)
}

pub fn code_by_name(name: &str) -> Result<CodeSpec> {
    match name {
        "bit-flip" => bit_flip(),
        "phase-flip" => phase_flip(),
        "four-qubit" => four_qubit(),
        "five-qubit" => five_qubit(),
        "nine-qubit" => nine_qubit(),
        "qutrit-shift" => qutrit_shift(),
        "qutrit-phase" => qutrit_phase(),
        "qutrit-erasure" => qutrit_erasure(),
        "nine-qutrit" => nine_qutrit(),
        other => Err(Error::UnknownCode(other.to_string())),
    }
}

pub fn all_codes() -> Result<Vec<CodeSpec>> {
    CODE_NAMES.iter().map(|n| code_by_name(n)).collect()
}

/// One printed row of a syndrome table.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    pub label: String,
    pub error: PauliWord,
    pub printed: Syndrome,
}

fn row(label: &str, error: PauliWord, printed: &[u32]) -> GoldenRow {
    GoldenRow { label: label.to_string(), error, printed: Syndrome(printed.to_vec()) }
}

/// Printed syndrome table rows for `code`; empty when none was printed.
pub fn golden_table(code: &str) -> Vec<GoldenRow> {
    let mut rows = Vec::new();
    match code {
        "bit-flip" | "phase-flip" => {
            let x = code == "bit-flip";
            let letter = if x { "X" } else { "Z" };
            rows.push(row("I", PauliWord::identity(2, 3), &[0, 0]));
            for (k, s) in [(1usize, [0, 1]), (2, [1, 0]), (3, [1, 1])] {
                let e = if x { PauliWord::x_on(2, 3, k - 1) } else { PauliWord::z_on(2, 3, k - 1) };
                rows.push(row(&format!("{letter}_{k}"), e, &s));
            }
        }
        "four-qubit" => {
            rows.push(row("I", PauliWord::identity(2, 4), &[0, 0]));
            for j in 0..4 {
                rows.push(row(&format!("X_{j}"), PauliWord::x_on(2, 4, 3 - j), &[1, 0]));
            }
            for j in 0..4 {
                rows.push(row(&format!("Z_{j}"), PauliWord::z_on(2, 4, 3 - j), &[0, 1]));
            }
        }
        "five-qubit" => {
            rows.push(row("I", PauliWord::identity(2, 5), &[0, 0, 0, 0]));
            let xs = [[1, 1, 0, 1], [1, 0, 1, 0], [1, 1, 1, 0], [0, 0, 1, 0], [0, 1, 0, 1]];
            for (j, s) in xs.iter().enumerate() {
                rows.push(row(&format!("X_{j}"), PauliWord::x_on(2, 5, 4 - j), s));
            }
            let zs = [[1, 1, 1, 1], [0, 0, 0, 1], [1, 0, 1, 1], [0, 1, 1, 0], [1, 0, 0, 0]];
            for (j, s) in zs.iter().enumerate() {
                rows.push(row(&format!("Z_{j}"), PauliWord::z_on(2, 5, 4 - j), s));
            }
        }
        "qutrit-shift" => {
            rows.push(row("I", PauliWord::identity(3, 3), &[0, 0]));
            let printed = [[[0, 2], [0, 1]], [[2, 1], [1, 2]], [[2, 2], [1, 1]]];
            for (j, pair) in printed.iter().enumerate() {
                for (p, s) in pair.iter().enumerate() {
                    let label = if p == 0 { format!("X_{j}") } else { format!("X_{j}^2") };
                    rows.push(row(&label, PauliWord::single(3, 3, 2 - j, p as u32 + 1, 0), s));
                }
            }
        }
        "qutrit-phase" => {
            rows.push(row("I", PauliWord::identity(3, 3), &[0, 0]));
            let printed = [[[2, 0], [1, 0]], [[2, 2], [1, 1]], [[2, 1], [1, 2]]];
            for (j, pair) in printed.iter().enumerate() {
                for (p, s) in pair.iter().enumerate() {
                    let label = if p == 0 { format!("Z_{j}") } else { format!("Z_{j}^2") };
                    rows.push(row(&label, PauliWord::single(3, 3, 2 - j, 0, p as u32 + 1), s));
                }
            }
        }
        "qutrit-erasure" => {
            rows.push(row("I", PauliWord::identity(3, 3), &[0, 0]));
            rows.push(row("X", PauliWord::single(3, 3, 2, 1, 0), &[0, 1]));
            rows.push(row("X^2", PauliWord::single(3, 3, 2, 2, 0), &[0, 2]));
            rows.push(row("Z", PauliWord::single(3, 3, 2, 0, 1), &[2, 0]));
            rows.push(row("Z^2", PauliWord::single(3, 3, 2, 0, 2), &[1, 0]));
        }
        _ => {}
    }
    rows
}

/// Serializes codes in the catalog format:
///
/// ```text
/// code <name>
/// d <d>
/// n <n>
/// k <k>
/// mode strict|degenerate|detection
/// detect-only yes|no
/// circuit
/// <one gate per line>
/// end
/// stabilizers
/// <one Pauli word per line>
/// end
/// correctable
/// <one Pauli word per line>
/// end
/// table
/// <syndrome> <recovery word>
/// end
/// ```
pub fn write_catalog(codes: &[CodeSpec]) -> String {
    let mut out = String::new();
    for code in codes {
        let _ = writeln!(out, "code {}", code.name);
        let _ = writeln!(out, "d {}\nn {}\nk {}", code.d, code.n, code.k);
        let _ = writeln!(out, "mode {}", code.kl_mode);
        let _ = writeln!(out, "detect-only {}", if code.detect_only { "yes" } else { "no" });
        let _ = write!(out, "circuit\n{}end\n", code.encoder);
        out.push_str("stabilizers\n");
        for s in &code.stabilizers.generators {
            let _ = writeln!(out, "{s}");
        }
        out.push_str("end\ncorrectable\n");
        for e in &code.correctable {
            let _ = writeln!(out, "{e}");
        }
        out.push_str("end\ntable\n");
        for (s, r) in &code.syndrome_table {
            let _ = writeln!(out, "{s} {r}");
        }
        out.push_str("end\n\n");
    }
    out
}

pub fn parse_catalog(text: &str) -> Result<Vec<CodeSpec>> {
    let mut codes = Vec::new();
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).peekable();
    let err = |msg: String| Error::Parse(format!("catalog: {msg}"));
    while let Some(line) = lines.next() {
        let name = line.strip_prefix("code ").ok_or_else(|| err(format!("expected 'code <name>', got '{line}'")))?.trim().to_string();
        let mut field = |key: &str| -> Result<String> {
            let l = lines.next().ok_or_else(|| err(format!("{name}: missing {key}")))?;
            l.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| err(format!("{name}: expected '{key}', got '{l}'")))
        };
        let num = |v: String| v.parse::<usize>().map_err(|_| err(format!("bad number '{v}'")));
        let d = num(field("d")?)? as u32;
        let n = num(field("n")?)?;
        let k = num(field("k")?)?;
        let mode: KlMode = field("mode")?.parse()?;
        let detect_only = match field("detect-only")?.as_str() {
            "yes" => true,
            "no" => false,
            other => return Err(err(format!("bad detect-only '{other}'"))),
        };
        let mut block = |key: &str| -> Result<Vec<String>> {
            let head = lines.next().ok_or_else(|| err(format!("{name}: missing {key}")))?;
            if head != key {
                return Err(err(format!("{name}: expected '{key}', got '{head}'")));
            }
            let mut body = Vec::new();
            loop {
                match lines.next() {
                    Some("end") => return Ok(body),
                    Some(l) => body.push(l.to_string()),
                    None => return Err(err(format!("{name}: unterminated {key} block"))),
                }
            }
        };
        let circuit = Circuit::parse(d, n, &block("circuit")?.join("\n"))?;
        let stabs = StabilizerSet::new(block("stabilizers")?.iter().map(|l| PauliWord::parse(d, l)).collect::<Result<_>>()?)?;
        let correctable = block("correctable")?.iter().map(|l| PauliWord::parse(d, l)).collect::<Result<_>>()?;
        let mut table = BTreeMap::new();
        for l in block("table")? {
            let (s, w) = l.split_once(' ').ok_or_else(|| err(format!("bad table line '{l}'")))?;
            table.insert(s.parse::<Syndrome>()?, PauliWord::parse(d, w)?);
        }
        codes.push(CodeSpec::from_parts(&name, circuit, k, stabs, table, correctable, detect_only, mode)?);
    }
    Ok(codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{check_kl, logical_basis, measure_syndrome, run_cycle, run_cycle_with_error};
    use crate::noise::PauliChannelSpec;
    use crate::state::{c, CVector, KrausChannel, QuditState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn from_terms(d: u32, n: usize, terms: &[(&[u32], (f64, f64))]) -> QuditState {
        let mut amps = CVector::zeros((d as usize).pow(n as u32));
        for (dg, (re, im)) in terms {
            amps[crate::state::index_of(dg, d)] += c(*re, *im);
        }
        QuditState::new(d, n, amps).unwrap().normalized().unwrap()
    }

    #[test]
    fn fixtures_build_and_stabilize() {
        for code in all_codes().unwrap() {
            let basis = logical_basis(&code).unwrap();
            assert_eq!(basis.len(), code.logical_dim());
            for s in &code.stabilizers.generators {
                for b in &basis {
                    let img = s.apply(b).unwrap();
                    assert!((img.inner(b) - c(1.0, 0.0)).norm() < 1e-9, "{}: {s} does not fix codeword", code.name);
                }
            }
            assert!(code.stabilizers.is_independent().unwrap(), "{}", code.name);
            assert_eq!(code.stabilizers.len(), code.n - code.k, "{}", code.name);
        }
    }

    #[test]
    fn printed_codewords() {
        let bf = logical_basis(&bit_flip().unwrap()).unwrap();
        assert_eq!(bf[1].amps[7], c(1.0, 0.0));
        let pf = logical_basis(&phase_flip().unwrap()).unwrap();
        assert!(pf[0].amps.iter().all(|a| (a.re - 1.0 / 8f64.sqrt()).abs() < 1e-12));
        // |---> has sign (-1)^{popcount}
        assert!((pf[1].amps[7].re + 1.0 / 8f64.sqrt()).abs() < 1e-12);

        // printed shift-code words lie in the span of |j,2j,j>
        let shift = logical_basis(&qutrit_shift().unwrap()).unwrap();
        for k in 0..3i64 {
            let terms = [
                (&[0u32, 0, 0][..], (1.0, 0.0)),
                (&[1, 2, 1][..], (crate::state::root_of_unity(k, 3).re, crate::state::root_of_unity(k, 3).im)),
                (&[2, 1, 2][..], (crate::state::root_of_unity(2 * k, 3).re, crate::state::root_of_unity(2 * k, 3).im)),
            ];
            let printed = from_terms(3, 3, &terms);
            let weight: f64 = shift.iter().map(|b| b.inner(&printed).norm_sqr()).sum();
            assert!((weight - 1.0).abs() < 1e-12);
        }

        let erasure = logical_basis(&qutrit_erasure().unwrap()).unwrap();
        let printed = [[[0u32, 0, 0], [1, 0, 2], [2, 0, 1]], [[0, 2, 1], [1, 2, 0], [2, 2, 2]], [[0, 1, 2], [1, 1, 1], [2, 1, 0]]];
        for (j, words) in printed.iter().enumerate() {
            let terms: Vec<(&[u32], (f64, f64))> = words.iter().map(|w| (&w[..], (1.0, 0.0))).collect();
            let expected = from_terms(3, 3, &terms);
            assert!((erasure[j].inner(&expected).norm() - 1.0).abs() < 1e-12, "erasure |{j}_L>");
        }

        let phase = logical_basis(&qutrit_phase().unwrap()).unwrap();
        for (k, b) in phase.iter().enumerate() {
            for idx in 0..27 {
                let dg = crate::state::digits(idx, 3, 3);
                let on = (dg.iter().sum::<u32>() % 3) as usize == k;
                assert!((b.amps[idx].norm() - if on { 1.0 / 3.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn golden_tables_except_two_printed_cells() {
        let mut mismatches = Vec::new();
        for name in CODE_NAMES {
            let code = code_by_name(name).unwrap();
            for r in golden_table(name) {
                if code.syndrome(&r.error).unwrap() != r.printed {
                    mismatches.push(format!("{name} {}", r.label));
                }
            }
        }
        assert_eq!(mismatches, vec!["five-qubit X_0", "five-qubit Z_2"]);
    }

    #[test]
    fn kl_per_fixture() {
        for code in all_codes().unwrap() {
            let report = check_kl(&code, &code.correctable, code.kl_mode).unwrap();
            assert!(report.all_satisfied(), "{}: {report}", code.name);
        }
        let nine = nine_qubit().unwrap();
        assert!(!check_kl(&nine, &nine.correctable, KlMode::Strict).unwrap().all_satisfied());
        let bf = bit_flip().unwrap();
        assert!(!check_kl(&bf, &[PauliWord::z_on(2, 3, 0)], KlMode::Strict).unwrap().all_satisfied());
        let report = check_kl(&bf, &bf.correctable, KlMode::Strict).unwrap();
        assert_eq!(report.classes[0].total(), 1);
        assert_eq!(report.classes[1].total(), 12);
        assert_eq!(report.classes[2].total(), 12);
    }

    #[test]
    fn measured_syndromes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let five = five_qubit().unwrap();
        let zero = logical_basis(&five).unwrap().remove(0);
        let (s, post) = measure_syndrome(&zero, &five, &mut rng).unwrap();
        assert!(s.is_trivial());
        assert!((post.inner(&zero).norm() - 1.0).abs() < 1e-12);
        let hit = PauliWord::x_on(2, 5, 2).apply(&zero).unwrap();
        assert_eq!(measure_syndrome(&hit, &five, &mut rng).unwrap().0, Syndrome(vec![1, 1, 1, 0]));
        let er = qutrit_erasure().unwrap();
        let w = PauliWord::z_on(3, 3, 2).apply(&logical_basis(&er).unwrap()[1]).unwrap();
        assert_eq!(measure_syndrome(&w, &er, &mut rng).unwrap().0, Syndrome(vec![2, 0]));
    }

    #[test]
    fn every_correctable_error_recovers() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for code in all_codes().unwrap() {
            if code.detect_only {
                continue;
            }
            for e in &code.correctable {
                for _ in 0..3 {
                    let psi = QuditState::random(code.d, code.k, &mut rng).unwrap();
                    let (f, _) = run_cycle_with_error(&code, e, &psi, &mut rng).unwrap();
                    assert!(f > 1.0 - 1e-9, "{} {e}: {f}", code.name);
                }
            }
        }
    }

    #[test]
    fn detection_code_flags_every_single_error() {
        let code = four_qubit().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for e in single_qudit_paulis(2, 4) {
            assert!(!code.syndrome(&e).unwrap().is_trivial());
            let psi = QuditState::random(2, 2, &mut rng).unwrap();
            assert!(matches!(run_cycle_with_error(&code, &e, &psi, &mut rng), Err(Error::MissingRecovery(_))));
        }
    }

    #[test]
    fn cycle_examples() {
        let code = bit_flip().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let zero = QuditState::basis(2, 1, 0).unwrap();
        let (f, s) = run_cycle(&code, &KrausChannel::identity(2), &zero, &mut rng).unwrap();
        assert_eq!((f, s.is_trivial()), (1.0, true));
        let two = PauliWord::x_on(2, 3, 0).mul(&PauliWord::x_on(2, 3, 1)).unwrap();
        assert!(run_cycle_with_error(&code, &two, &zero, &mut rng).unwrap().0 < 1e-12);
        let always = PauliChannelSpec::bit_flip(2, 1.0).unwrap().kraus().unwrap();
        let full = crate::noise::tensor_channel(&PauliChannelSpec::bit_flip(2, 0.0).unwrap().kraus().unwrap(), 3).unwrap();
        assert_eq!(run_cycle(&code, &full, &zero, &mut rng).unwrap().0, 1.0);
        // X on every qubit is a logical flip
        assert!(run_cycle(&code, &always, &zero, &mut rng).unwrap().0 < 1e-12);
    }

    #[test]
    fn concatenations_match_nine_unit_fixtures() {
        let shor = concatenate(&phase_flip().unwrap(), &bit_flip().unwrap()).unwrap();
        let fixture = nine_qubit().unwrap();
        assert!(shor.stabilizers.same_group(&fixture.stabilizers).unwrap());
        for (a, b) in logical_basis(&shor).unwrap().iter().zip(logical_basis(&fixture).unwrap().iter()) {
            assert!((a.inner(b).norm() - 1.0).abs() < 1e-9);
        }
        assert_eq!(shor.correctable.len(), 27);
        let nq = nine_qutrit().unwrap();
        assert_eq!(nq.stabilizers.len(), 8);
        assert_eq!(nq.correctable.len(), 72);
        let lifted: Vec<&PauliWord> = nq.stabilizers.generators[6..].iter().collect();
        assert_eq!(lifted[0].x, vec![1, 2, 1, 1, 2, 1, 1, 2, 1]);
        assert_eq!(lifted[1].x, vec![2, 1, 2, 1, 2, 1, 0, 0, 0]);
    }

    #[test]
    fn trivial_inner_leaves_outer_unchanged() {
        let trivial = CodeSpec::new("bare", Circuit::new(2, 1), 1, StabilizerSet::new(vec![]).unwrap(), vec![], KlMode::Strict).unwrap();
        let outer = bit_flip().unwrap();
        let cat = concatenate(&outer, &trivial).unwrap();
        assert_eq!(cat.stabilizers, outer.stabilizers);
        for (a, b) in logical_basis(&cat).unwrap().iter().zip(logical_basis(&outer).unwrap().iter()) {
            assert!((a.inner(b).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn catalog_round_trip() {
        let codes = all_codes().unwrap();
        let text = write_catalog(&codes);
        let back = parse_catalog(&text).unwrap();
        assert_eq!(back.len(), codes.len());
        for (a, b) in codes.iter().zip(&back) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.stabilizers, b.stabilizers);
            assert_eq!(a.syndrome_table, b.syndrome_table);
            assert_eq!(a.correctable, b.correctable);
            let (la, lb) = (logical_basis(a).unwrap(), logical_basis(b).unwrap());
            for (x, y) in la.iter().zip(&lb) {
                assert!((x.inner(y).norm() - 1.0).abs() < 1e-9);
            }
        }
        assert!(code_by_name("seven-qubit").is_err());
        assert!(parse_catalog("code x\nd 2\n").is_err());
    }
}
