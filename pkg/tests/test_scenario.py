import pytest
from hypothesis import given
from hypothesis import strategies as st

from scenariolab import (
    AttributeRef,
    ScenarioSpec,
    derive_label,
    generate_presets,
    parse_suite,
    validate_suite,
    write_suite,
)
from scenariolab.errors import (
    DuplicateScenarioError,
    InsufficientNeighborsError,
    ParseError,
    UnresolvedRefError,
)

from conftest import make_dataset, make_repo

SUITE_TEXT = """\
# window=7
# split=0.8
role,main,context,collab,collab,collab
scenario_id,alfa.hum*,alfa.temp,bravo.hum,charlie.hum,delta.hum
standalone,x,?,?,?,?
cadm,x,x,?,?,?
cadm_cdm_3,x,x,x,x,x
"""


def presets():
    return generate_presets("alfa", "hum", "temp", ["bravo", "charlie", "delta"], "hum")


def test_presets_structure():
    suite = presets()
    assert [s.scenario_id for s in suite.scenarios] == [
        "standalone", "cadm", "cadm_cdm_1", "cadm_cdm_2", "cadm_cdm_3", "cdm_3",
    ]
    assert [s.label for s in suite.scenarios] == [
        "Standalone", "CADM", "CADM+CDM(1)", "CADM+CDM(2)", "CADM+CDM(3)", "CDM(3)",
    ]
    for s in suite.scenarios:
        assert s.target == AttributeRef("alfa", "hum")
        assert s.main_attributes == (AttributeRef("alfa", "hum"),)


def test_presets_neighbor_prefixes():
    suite = presets()
    two = suite.get("cadm_cdm_2")
    assert [sid for sid, _ in two.collaborative] == ["bravo", "charlie"]
    three = suite.get("cadm_cdm_3")
    assert [sid for sid, _ in three.collaborative] == ["bravo", "charlie", "delta"]
    assert suite.get("cdm_3").context_attributes == ()


def test_presets_need_three_neighbors():
    with pytest.raises(InsufficientNeighborsError):
        generate_presets("alfa", "hum", "temp", ["bravo", "charlie"], "hum")


def test_standalone_attributes_subset_of_all_others():
    suite = presets()
    standalone = set(suite.get("standalone").all_attributes())
    for s in suite.scenarios:
        assert standalone <= set(s.all_attributes())


def test_parse_suite_labels(tmp_path):
    path = tmp_path / "suite.csv"
    path.write_text(SUITE_TEXT)
    suite = parse_suite(path)
    assert suite.defaults.window == 7
    assert suite.defaults.split == 0.8
    assert suite.get("standalone").label == "Standalone"
    assert suite.get("cadm").label == "CADM"
    three = suite.get("cadm_cdm_3")
    assert three.label == "CADM+CDM(3)"
    assert [sid for sid, _ in three.collaborative] == ["bravo", "charlie", "delta"]


def test_parse_empty_file(tmp_path):
    path = tmp_path / "suite.csv"
    path.write_text("")
    with pytest.raises(ParseError, match="no scenarios"):
        parse_suite(path)


def test_parse_duplicate_scenario_id(tmp_path):
    path = tmp_path / "suite.csv"
    path.write_text(
        "role,main\nscenario_id,alfa.hum*\nsame,x\nsame,x\n"
    )
    with pytest.raises(DuplicateScenarioError):
        parse_suite(path)


def test_round_trip_presets(tmp_path):
    suite = presets()
    path = tmp_path / "suite.csv"
    write_suite(suite, path)
    assert parse_suite(path) == suite


def test_round_trip_parsed_file(tmp_path):
    path = tmp_path / "suite.csv"
    path.write_text(SUITE_TEXT)
    suite = parse_suite(path)
    path2 = tmp_path / "again.csv"
    write_suite(suite, path2)
    assert parse_suite(path2) == suite


@given(has_context=st.booleans(), n_collab=st.integers(min_value=0, max_value=5))
def test_label_matches_emptiness_pattern(has_context, n_collab):
    label = derive_label(has_context, n_collab)
    if not has_context and n_collab == 0:
        assert label == "Standalone"
    elif has_context and n_collab == 0:
        assert label == "CADM"
    elif has_context:
        assert label == f"CADM+CDM({n_collab})"
    else:
        assert label == f"CDM({n_collab})"


@given(
    n_main=st.integers(min_value=1, max_value=3),
    has_context=st.booleans(),
    n_collab=st.integers(min_value=0, max_value=3),
)
def test_spec_label_property(n_main, has_context, n_collab):
    main = tuple(AttributeRef("m", f"a{i}") for i in range(n_main))
    spec = ScenarioSpec(
        scenario_id="s",
        target=main[0],
        main_attributes=main,
        context_attributes=(AttributeRef("m", "ctx"),) if has_context else (),
        collaborative=tuple(
            (f"n{i}", (AttributeRef(f"n{i}", "hum"),)) for i in range(n_collab)
        ),
    )
    assert spec.label == derive_label(has_context, n_collab)


def test_duplicate_attribute_rejected():
    ref = AttributeRef("m", "hum")
    with pytest.raises(ParseError, match="more than once"):
        ScenarioSpec(
            scenario_id="s",
            target=ref,
            main_attributes=(ref,),
            context_attributes=(ref,),
        )


def test_validate_suite_against_repo():
    repo = make_repo(
        make_dataset("alfa", {"temp": [1, 2, 3], "hum": [4, 5, 6]}),
        make_dataset("bravo", {"hum": [7, 8, 9]}),
        make_dataset("charlie", {"hum": [1, 1, 2]}),
        make_dataset("delta", {"hum": [3, 2, 1]}),
    )
    validate_suite(presets(), repo)

    bad = generate_presets("alfa", "hum", "pressure", ["bravo", "charlie", "delta"], "hum")
    with pytest.raises(UnresolvedRefError, match="pressure"):
        validate_suite(bad, repo)

    missing_source = generate_presets("alfa", "hum", "temp", ["bravo", "charlie", "echo"], "hum")
    with pytest.raises(UnresolvedRefError, match="echo"):
        validate_suite(missing_source, repo)
