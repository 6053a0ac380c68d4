from triangular_lsd.acceptance import CRITERIA, CATALAN_VOLUMES, CriterionResult, format_table, run_acceptance


def test_criteria_are_numbered():
    assert [number for number, _, _ in CRITERIA] == list(range(1, 16))


def test_exact_criteria_pass():
    results = run_acceptance("quick", seed=1, only=(1, 2, 3, 10, 14))
    assert [r.number for r in results] == [1, 2, 3, 10, 14]
    assert all(r.passed for r in results), format_table(results)


def test_catalan_volumes_cover_short_words():
    assert len(CATALAN_VOLUMES) == 1 + 2 + 5


def test_failing_check_is_reported(mocker):
    mocker.patch("triangular_lsd.acceptance.CRITERIA",
                 [(1, "always fails", mocker.Mock(side_effect=RuntimeError("boom")))])
    results = run_acceptance("quick")
    assert len(results) == 1
    assert not results[0].passed
    assert "boom" in results[0].detail


def test_format_table():
    table = format_table([CriterionResult(4, "Spectral moments", True, "m2=0.5", 1.0),
                          CriterionResult(5, "Universality", False, "m2=0.7", 2.0)])
    lines = table.splitlines()
    assert len(lines) == 3
    assert "PASS" in lines[1]
    assert "FAIL" in lines[2]
