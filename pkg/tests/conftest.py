"""Shared hooks: per-criterion PASS/FAIL summary for the acceptance suite."""

CRITERIA = {
    1: "perfect Table 1 cells",
    2: "exact strategy probabilities",
    3: "strict play wins exactly on members",
    4: "ordered design equivalences",
    5: "exact independence numbers",
    6: "bit-code strategy bounds and 96-element listing",
    7: "Teirlinck criterion",
    8: "Latin square matrices",
    9: "desk-scale exclusions and (7,2) LP export",
}

_results: dict[int, list[bool]] = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _results.setdefault(crit, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        outcomes = _results.get(n)
        if outcomes is None:
            verdict = "NOT RUN"
        else:
            verdict = "PASS" if all(outcomes) else "FAIL"
        tr.write_line(f"criterion {n}: {verdict}  {CRITERIA[n]} ({len(outcomes or [])} checks)")

