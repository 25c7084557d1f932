from collections import defaultdict

_OUTCOMES = defaultdict(list)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    k = dict(report.user_properties).get("criterion")
    if k is None:
        return
    details = [v for name, v in report.user_properties if name == "detail"]
    _OUTCOMES[k].append((report.nodeid.split("::")[-1], report.outcome, details))


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_OUTCOMES):
        runs = _OUTCOMES[k]
        ok = all(outcome == "passed" for _, outcome, _ in runs)
        failed = [name for name, outcome, _ in runs if outcome != "passed"]
        notes = "; ".join(d for _, _, ds in runs for d in ds)
        line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f" (failed: {', '.join(failed)})"
        if notes:
            line += f" | {notes}"
        tr.write_line(line)
