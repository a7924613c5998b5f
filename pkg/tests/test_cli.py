"""Description-file grammar, canonical round-trips, and report plumbing."""
import json
from fractions import Fraction
from pathlib import Path

import pytest

import abinertia
from abinertia.cli import (
    ParseError, ParsedInput, SessionConfig, main, parse, run, serialize,
)
from abinertia.endokit import classify, validate
from abinertia.exactnum import OMEGA, UsageError

F = Fraction
CORPUS = sorted((Path(__file__).parent / "corpus").glob("*.txt"))

SEC3 = ("group A { block B = cyclic(p=5,k=1,mult=1)"
        " block C = torsionfree(pi={5},rank=1) }\n"
        "endo phi on A { tf[C.0->C.0] = 1/5 }\n")


def corpus(stem):
    path = Path(__file__).parent / "corpus" / f"{stem}.txt"
    return str(path)


def config(command, *stems, **kw):
    return SessionConfig(command, tuple(corpus(s) for s in stems), **kw)


# -- grammar ---------------------------------------------------------------

def test_quasi_example_parses_and_classifies():
    parsed = parse(SEC3)
    group, endos = parsed
    assert parsed.group_name == "A" and set(endos) == {"phi"}
    assert group.block("B").prime == 5
    receipt = classify(endos["phi"])
    assert receipt.quasi == (0, frozenset({5}), F(1, 5))


def test_empty_group_body_is_rejected():
    with pytest.raises(ParseError):
        parse("group A { }")


def test_errors_carry_line_and_column():
    text = "group A {\n  block B = cyclic(p=2, k=1, mult=1)\n  block B = prufer(p=2, copies=1)\n}\n"
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.line == 3 and exc.value.col == 9
    assert "line 3, column 9" in str(exc.value)


def test_composite_prime_is_rejected():
    with pytest.raises(ParseError, match="9 is not prime"):
        parse("group A { block B = cyclic(p=9, k=1, mult=1) }")


def test_single_group_per_file():
    base = "group A { block B = cyclic(p=2,k=1,mult=1) }\n"
    with pytest.raises(ParseError, match="single group"):
        parse(base + base)
    with pytest.raises(ParseError, match="before its endomorphisms"):
        parse("endo e on A { }")
    with pytest.raises(ParseError, match="no group"):
        parse("# nothing here\n")


def test_reference_checks_are_positioned():
    base = "group A { block B = cyclic(p=2,k=1,mult=1) block D = prufer(p=2,copies=1) }\n"
    cases = [
        ("endo e on Z { }", "unknown group"),
        ("endo e on A { cyc[X] = 1; }", "unknown block"),
        ("endo e on A { cyc[D] = 1; }", "not a cyclic block"),
        ("endo e on A { div[B] = 1; }", "not a divisible block"),
        ("endo e on A { tf[B.0 -> B.0] = 1; }", "not a torsion-free block"),
        ("endo e on A { tf[D] = 1; }", "infinite-rank free block"),
        ("endo e on A { cyc[B] = 1; cyc[B] = 2; }", "duplicate cyc"),
        ("endo e on A { fin[B.0] = { }; fin[B.0] = { }; }", "duplicate fin"),
        ("endo e on A { cyc[B] = 1/2; }", "not a rational"),
        ("endo e on A { fin[B.0 mod 2] = { }; }", "torsion-free source"),
    ]
    for text, needle in cases:
        with pytest.raises(ParseError, match=needle):
            parse(base + text)


def test_matrix_entries_stay_local():
    base = ("group A { block B = cyclic(p=2,k=1,mult=2)"
            " block C = cyclic(p=2,k=1,mult=2)"
            " block D = prufer(p=2,copies=1) block E = prufer(p=3,copies=1) }\n")
    with pytest.raises(ParseError, match="within one block"):
        parse(base + "endo e on A { cyc[B.0 -> C.0] = 1; }")
    with pytest.raises(ParseError, match="within one prime"):
        parse(base + "endo e on A { div[D.0 -> E.0] = 1; }")
    with pytest.raises(ParseError, match="already has a scalar"):
        parse(base + "endo e on A { div[D] = 1; div[D.0 -> D.0] = 1; }")


def test_comments_and_omega_literals():
    text = ("# leading note\n"
            "group A {  # trailing note\n"
            "  block B = cyclic(p=2, k=3, mult=omega)\n"
            "  block L = torsionfree(pi={}, rank=omega)\n"
            "}\n")
    group, _ = parse(text)
    assert group.block("B").mult is OMEGA
    assert group.block("L").rank is OMEGA


def test_negative_rationals_parse():
    base = "group A { block C = torsionfree(pi={3}, rank=2) }\n"
    _, endos = parse(base + "endo e on A { tf[C.0 -> C.1] = -1/3; }")
    assert endos["e"].tf[(("C", 0), ("C", 1))] == F(-1, 3)


# -- canonical serialization --------------------------------------------------

def test_corpus_files_are_canonical_fixed_points():
    assert len(CORPUS) >= 6
    for path in CORPUS:
        text = path.read_text(encoding="utf-8")
        assert serialize(parse(text)) == text, path.name


def test_corpus_endos_validate_clean():
    for path in CORPUS:
        _, endos = parse(path.read_text(encoding="utf-8"))
        for name, phi in endos.items():
            assert validate(phi) == [], (path.name, name)


def test_serialize_is_a_projection():
    messy = ("group P { block D = prufer(p=3, copies=2)"
             " block B = cyclic(p=3, k=1, mult=2) }\n"
             "endo s on P {\n"
             "  div[D.1 -> D.1] = 2; div[D.0 -> D.0] = 2;\n"
             "  cyc[B.0->B.0]=0\n"
             "}\n")
    parsed = parse(messy)
    assert parsed.endos["s"].div == {3: F(2)}
    assert parsed.endos["s"].cyc == {}
    canon = serialize(parsed)
    assert "div[D] = 2;" in canon
    assert "cyc[" not in canon
    assert parse(canon) == parsed
    assert serialize(parse(canon)) == canon


# -- sessions ------------------------------------------------------------------

def test_check_identity_is_inertial():
    code, text = run(config("check", "quasi"))
    assert code == 0
    report = json.loads(text)
    views = report["results"][corpus("quasi")]
    assert views["ident"]["verdict"] == "inertial"
    assert views["ident"]["violations"] == []
    assert views["phi"]["verdict"] == "inertial"
    assert views["phi"]["certificate"]["r"] == "1/5"


def test_check_and_oracle_agree_on_prufer_negatives():
    code, text = run(config("check", "prufer_pair"))
    assert code == 0
    views = json.loads(text)["results"][corpus("prufer_pair")]
    assert views["skew"]["verdict"] == "non-inertial"
    assert views["twist"]["verdict"] == "non-inertial"
    assert views["triple"]["verdict"] == "inertial"

    code, text = run(config("oracle", "prufer_pair", levels=(2, 3), samples=8,
                            budget=3))
    assert code == 0
    views = json.loads(text)["results"][corpus("prufer_pair")]
    for name in ("skew", "twist"):
        view = views[name]
        assert view["profile"]["hint"] == "growing"
        assert view["witnesses"] and view["consistent"]
        kinds = {w["kind"] for w in view["witnesses"]}
        assert kinds == {"DIV_NOT_SCALAR"}
    assert views["triple"]["profile"]["hint"] == "stable"
    assert views["triple"]["fs_profile"] == {"2": 1, "3": 1}


def test_injected_verdict_trips_the_contradiction_exit():
    code, _ = run(config("oracle", "critical", levels=(2, 3), samples=8,
                         inject_verdict="non-inertial"))
    assert code == 2
    code, _ = run(config("oracle", "prufer_pair", levels=(2, 3), samples=8,
                         inject_verdict="inertial"))
    assert code == 2


def test_reports_are_byte_identical_across_runs():
    cfg = config("oracle", "critical", "periodic", levels=(2, 3), samples=12,
                 seed=41)
    one = run(cfg)
    two = run(cfg)
    assert one == two
    reseeded = run(config("oracle", "critical", "periodic", levels=(2, 3),
                          samples=12, seed=42))
    assert reseeded[1] != one[1]


def test_report_shape_and_stamps():
    cfg = config("analyze", "mixed", seed=9)
    _, text = run(cfg)
    report = json.loads(text)
    assert list(report) == ["command", "inputs", "results", "seed", "version"]
    assert report["seed"] == 9
    assert report["version"] == abinertia.__version__
    assert text.startswith('{"command":"analyze"')
    view = report["results"][corpus("mixed")]
    assert view["torsion_free_rank"] == "omega"
    assert view["primes"]["2"]["critical"] is True
    assert view["h_descriptor"] is None


def test_analyze_reports_descriptor_and_bridge_type():
    _, text = run(config("analyze", "critical"))
    view = json.loads(text)["results"][corpus("critical")]
    assert view["nm_type"] == {"2": 2}
    assert view["h_descriptor"] == {"2": ["inf", "inf"]}
    assert view["endos"]["mini"]["mini"] == [1, [2]]


def test_decompose_command_reassembles():
    code, text = run(config("decompose", "critical"))
    assert code == 0
    views = json.loads(text)["results"][corpus("critical")]
    for name, view in views.items():
        assert view["sum_exact"] is True, name
    assert views["bridge"]["nm_mini"] == [2, [2]]
    assert views["bridge"]["ui_h_class"]["value"]["exceptions"] == {"2": "1"}


def test_decompose_rejects_non_inertial_input():
    with pytest.raises(UsageError, match="skew"):
        run(config("decompose", "prufer_pair"))


def test_defect_command_measures_matrices():
    _, text = run(config("defect", "vector", samples=30, seed=5))
    views = json.loads(text)["results"][corpus("vector")]
    assert views["scale"]["defect"] == 0
    assert views["scale"]["max_inert_codim"] == 0
    assert views["companion"]["defect"] == 2
    assert views["companion"]["max_inert_codim"] == 1
    for view in views.values():
        assert view["field"] == 2 and view["dimension"] == 3
        assert view["growth"]["max_growth"] <= view["growth"]["bound"]


def test_defect_needs_an_elementary_group():
    with pytest.raises(UsageError, match="elementary abelian"):
        run(config("defect", "critical"))


def test_oracle_exhaustive_shadow_check():
    _, text = run(config("oracle", "critical", levels=(2, 3), samples=8,
                         enumerate_all=True))
    views = json.loads(text)["results"][corpus("critical")]
    assert views["bridge"]["exhaustive"] == {
        "level": 2, "subgroups": 129, "max_index": 2}
    assert views["double"]["exhaustive"]["max_index"] == 1


def test_validation_failures_become_usage_errors(tmp_path):
    bad = tmp_path / "leak.txt"
    bad.write_text(SEC3.replace("1/5", "1/3"), encoding="utf-8")
    with pytest.raises(UsageError, match="escapes the target primes"):
        run(SessionConfig("check", (str(bad),)))


def test_config_validation():
    good = config("check", "quasi")
    for broken in (
        SessionConfig("explode", good.inputs),
        SessionConfig("check", ()),
        SessionConfig("check", good.inputs, levels=(4, 2)),
        SessionConfig("check", good.inputs, levels=()),
        SessionConfig("check", good.inputs, samples=0),
        SessionConfig("check", good.inputs, budget=0),
        SessionConfig("check", good.inputs, seed=-1),
        SessionConfig("check", good.inputs, inject_verdict="maybe"),
    ):
        with pytest.raises(UsageError):
            run(broken)


# -- entry point -----------------------------------------------------------------

def test_main_writes_stdout_and_files(tmp_path, capsys):
    assert main(["check", corpus("quasi")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["command"] == "check"

    out = tmp_path / "report.json"
    assert main(["check", corpus("quasi"), "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text(encoding="utf-8"))["command"] == "check"


def test_main_maps_usage_problems_to_exit_one(tmp_path, capsys):
    cases = (
        ["check", str(tmp_path / "missing.txt")],
        ["check", corpus("quasi"), "--levels", "4,2"],
        ["check", corpus("quasi"), "--levels", "two"],
        ["frobnicate", corpus("quasi")],
        ["decompose", corpus("prufer_pair")],
    )
    for argv in cases:
        assert main(argv) == 1, argv
        err = capsys.readouterr().err
        assert err.startswith("error:"), argv


def test_main_reports_the_contradiction_exit(capsys):
    argv = ["oracle", corpus("prufer_pair"), "--levels", "2,3", "--samples",
            "8", "--inject-verdict", "inertial"]
    assert main(argv) == 2
    report = json.loads(capsys.readouterr().out)
    views = report["results"][corpus("prufer_pair")]
    assert not views["skew"]["consistent"]


def test_parsed_input_equality():
    one = parse(SEC3)
    two = parse(serialize(one))
    assert one == two
    assert two != ParsedInput("B", one.group, one.endos)
