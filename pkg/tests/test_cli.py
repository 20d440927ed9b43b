import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from etfgap.cli import main
from etfgap.cmx import CmxFormatError, parse_cmx, read_cmx, render_cmx, write_cmx
from etfgap.constructions import harmonic_etf, simplex_etf, singer_difference_set
from etfgap.frame import Frame
from etfgap.gap_certificate import certify
from etfgap.verification import verify_frame


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def singer2_file(tmp_path):
    path = tmp_path / "f.cmx"
    code, out, _ = run("construct", "--kind", "singer", "--q", "2", "--out", str(path))
    assert code == 0 and "d=3 n=7" in out
    return path


# -- cmx-1 ---------------------------------------------------------------------

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=12))
def test_cmx_round_trip_is_bitwise(pairs):
    m = np.array([complex(a, b) for a, b in pairs]).reshape(1, -1)
    back = parse_cmx(render_cmx(m))
    assert back.shape == m.shape
    assert back.view(np.float64).tobytes() == m.view(np.float64).tobytes()


def test_cmx_negative_zero_survives():
    m = np.array([[complex(-0.0, -0.0)]])
    back = parse_cmx(render_cmx(m))
    assert np.signbit(back.real[0, 0]) and np.signbit(back.imag[0, 0])


def test_cmx_uses_17_digits():
    text = render_cmx(np.array([[1 / 3 + 0j]]))
    assert "0.33333333333333331" in text


@pytest.mark.parametrize(
    "text",
    [
        "",
        '{"format": "cmx-2", "rows": 1, "cols": 1, "entries": [[1, 0]]}',
        '{"format": "cmx-1", "rows": 1, "cols": 2, "entries": [[1, 0]]}',
        '{"format": "cmx-1", "rows": 1, "cols": 1, "entries": [[1]]}',
        '{"format": "cmx-1", "rows": 1, "cols": 1, "entries": [[NaN, 0]]}',
        '{"format": "cmx-1", "rows": 1.5, "cols": 1, "entries": [[1, 0]]}',
    ],
)
def test_cmx_rejects_malformed(text):
    with pytest.raises(CmxFormatError):
        parse_cmx(text)


def test_cmx_file_helpers(tmp_path):
    m = simplex_etf(3).matrix
    write_cmx(tmp_path / "s.cmx", m)
    assert np.array_equal(read_cmx(tmp_path / "s.cmx"), m)


# -- construct -----------------------------------------------------------------

def test_construct_singer_file(singer2_file):
    m = read_cmx(singer2_file)
    assert m.shape == (3, 7)


def test_construct_simplex_stdout():
    code, out, err = run("construct", "--kind", "simplex", "--d", "2")
    assert code == 0
    assert parse_cmx(out).shape == (2, 3)
    assert "alpha=0.5" in err


def test_construct_singer_not_prime_power():
    code, _, err = run("construct", "--kind", "singer", "--q", "6")
    assert code == 1 and "NotPrimePower" in err


def test_construct_harmonic_and_naimark(tmp_path):
    code, out, _ = run("construct", "--kind", "harmonic", "--v", "7", "--set", "0,1,3", "--naimark")
    assert code == 0 and parse_cmx(out).shape == (4, 7)
    set_file = tmp_path / "ds.txt"
    set_file.write_text("0 1 3 9\n")
    code, out, _ = run("construct", "--kind", "harmonic", "--v", "13", "--set-file", str(set_file))
    assert code == 0 and parse_cmx(out).shape == (4, 13)


def test_construct_usage_errors():
    assert run("construct", "--kind", "singer")[0] == 2
    assert run("construct", "--kind", "bogus")[0] == 2
    assert run("construct", "--kind", "harmonic", "--v", "7", "--set", "0,1,2")[0] == 1
    assert run("construct", "--kind", "harmonic", "--v", "7", "--set", "a,b")[0] == 2


# -- verify --------------------------------------------------------------------

def test_verify_singer(singer2_file):
    code, out, _ = run("verify", str(singer2_file))
    assert code == 0 and "0.4714045208" in out


def test_verify_rescaled_column(tmp_path):
    m = np.array(simplex_etf(3).matrix)
    m[:, 2] *= 2
    write_cmx(tmp_path / "bad.cmx", m)
    code, out, _ = run("verify", str(tmp_path / "bad.cmx"))
    assert code == 1 and "unit_norm    FAIL" in out


def test_verify_truncated_and_missing(singer2_file, tmp_path):
    trunc = tmp_path / "t.cmx"
    trunc.write_text(singer2_file.read_text()[:200])
    assert run("verify", str(trunc))[0] == 2
    assert run("verify", str(tmp_path / "nope.cmx"))[0] == 2


def test_verify_json_is_byte_identical(singer2_file):
    a = run("verify", str(singer2_file), "--format", "json")[1]
    b = run("verify", str(singer2_file), "--format", "json")[1]
    assert a == b
    payload = json.loads(a)
    assert payload["tool"]["name"] == "etfgap"
    assert payload["tolerances"] == {"tol": 1e-10}
    assert len(payload["input_sha256"]) == 64
    assert payload["report"]["passed"] is True


def test_round_trip_verify_equivalent(singer2_file):
    mem = verify_frame(harmonic_etf(singer_difference_set(2)))
    disk = verify_frame(Frame(read_cmx(singer2_file)))
    for field in ("unit_norm_residual", "tightness_residual", "equiangularity_spread", "alpha_observed"):
        assert abs(getattr(mem, field) - getattr(disk, field)) <= 1e-12


# -- certify-gap ---------------------------------------------------------------

def test_certify_gap_singer(singer2_file):
    code, out, _ = run("certify-gap", str(singer2_file))
    assert code == 0
    assert "rank_K=4 nullity_K=2 rank_R=4" in out and "lambda=3/4" in out


def test_certify_gap_simplex(tmp_path):
    write_cmx(tmp_path / "s.cmx", simplex_etf(2).matrix)
    code, out, _ = run("certify-gap", str(tmp_path / "s.cmx"))
    assert code == 0 and "not-applicable" in out


def test_certify_gap_random(tmp_path, rng):
    m = rng.normal(size=(3, 7)) + 1j * rng.normal(size=(3, 7))
    write_cmx(tmp_path / "r.cmx", m)
    code, _, err = run("certify-gap", str(tmp_path / "r.cmx"))
    assert code == 1 and "verification" in err


def test_certify_gap_json(singer2_file):
    a = run("certify-gap", str(singer2_file), "--format", "json")[1]
    assert a == run("certify-gap", str(singer2_file), "--format", "json")[1]
    payload = json.loads(a)
    assert payload["tolerances"] == {"tol": 1e-10, "rel_tol": 1e-9}
    rep = payload["report"]
    assert rep["ranks"] == {"rank_K": 4, "nullity_K": 2, "rank_R": 4}
    assert rep["bound"]["value"] == 7 and rep["passed"]


# -- admissible ----------------------------------------------------------------

def test_admissible_single():
    code, out, _ = run("admissible", "--d", "3", "--n", "8")
    assert code == 1 and "excluded: singer-zauner-gap, szollosi-(3,8)" in out
    code, out, _ = run("admissible", "--d", "6", "--n", "31")
    assert code == 0 and "singer(5)" in out
    code, out, _ = run("admissible", "--d", "4", "--n", "6", "--format", "json")
    assert code == 1 and json.loads(out)["conditions"]["naimark-gerzon"] == "violated"


def test_admissible_scan_csv():
    code, out, _ = run("admissible", "--dmax", "8", "--nmax", "64", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1 + sum(64 - d + 1 for d in range(1, 9))
    assert lines[0].startswith("d,n,gerzon")


def test_admissible_usage():
    assert run("admissible", "--d", "3")[0] == 2
    assert run("admissible")[0] == 2
    assert run("admissible", "--d", "3", "--n", "8", "--dmax", "3", "--nmax", "4")[0] == 2
    assert run("admissible", "--d", "3", "--n", "2")[0] == 2


def test_module_entry_point(singer2_file):
    proc = subprocess.run(
        [sys.executable, "-m", "etfgap", "certify-gap", str(singer2_file)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "certified" in proc.stdout


def test_round_trip_certify_matches_memory(singer2_file):
    a = certify(Frame(read_cmx(singer2_file))).to_dict()
    b = certify(harmonic_etf(singer_difference_set(2))).to_dict()
    assert a == b
