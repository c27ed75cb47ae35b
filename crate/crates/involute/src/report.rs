//! Machine-readable report emission: canonical JSON (sorted keys, exact
//! rationals as integer-string pairs) and CSV for external plotting.

use serde_json::{json, Value};

use crate::linearized::DivergenceCertificate;
use crate::scalar::rational_pair;

/// Canonical certificate JSON: verdict, parameters, the growth estimate,
/// and one row per coefficient index `n = 2 ..= N` with the exact
/// coefficient (as rational string pairs) and its growth root
/// `|c_n|^(1/n)`.
pub fn certificate_to_json(cert: &DivergenceCertificate) -> Value {
    let rows: Vec<Value> = (2..=cert.n_max())
        .map(|n| {
            let c = &cert.coeffs()[n];
            json!({
                "n": n,
                "c_re": rational_pair(c.re()),
                "c_im": rational_pair(c.im()),
                "root": cert.c_roots()[n],
            })
        })
        .collect();
    json!({
        "N": cert.n_max(),
        "eps": rational_pair(cert.epsilon()),
        "pass": cert.pass(),
        "s_radius_estimate": cert.s_radius_estimate(),
        "max_s_root": cert.max_s_root(),
        "tail_increasing": cert.tail_increasing(),
        "table": rows,
    })
}

/// CSV of the scale-free root test, one data row per `n = 2 ..= N`:
/// `n, |S_n|^(1/n)`.
pub fn certificate_to_csv(cert: &DivergenceCertificate) -> String {
    let mut out = String::from("n,s_root\n");
    for n in 2..=cert.n_max() {
        out.push_str(&format!("{},{}\n", n, cert.s_roots()[n]));
    }
    out
}

/// Render a JSON value in the repository's canonical style: two-space
/// pretty printing (serde's default) with sorted object keys and a
/// trailing newline. Byte-identical for identical values.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON serialization cannot fail");
    s.push('\n');
    s
}
