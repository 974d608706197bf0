use pyo3::ffi::c_str;
use pyo3::prelude::*;
use teamsplit::teamsplit as extension;

fn with_module<F: FnOnce(Python<'_>)>(f: F) {
    pyo3::append_to_inittab!(extension);
    Python::initialize();
    Python::attach(f);
}

#[test]
fn python_round_trip() {
    with_module(|py| {
        py.run(
            c_str!(
                r#"
import teamsplit as ts
f = ts.generate_formation("platoon_wedge", seed=3)
b = f["bundle"]
assert b.n == 29 and b.kinds == ["spatial", "connectivity", "hierarchy"]
r = ts.divide(b, 5, seed=1)
assert len(r["labels"]) == 29 and all(s > 0 for s in r["team_sizes"])
assert ts.Bundle.from_json(b.to_json()) == b
s, alpha, rho = ts.katz_similarity(b, beta=0.25)
assert abs(alpha * rho - 0.25) < 1e-9
try:
    ts.Bundle([[[0.0, -1.0], [1.0, 0.0]]], ["spatial"])
except ts.TeamsplitError as e:
    assert "negative" in str(e) or "(0, 1)" in str(e), str(e)
else:
    raise AssertionError("negative weight accepted")
"#
            ),
            None,
            None,
        )
        .unwrap_or_else(|e| panic!("{e}"));
    });
}
