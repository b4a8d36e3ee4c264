import copy

import pytest

from synstrip.harness import ExperimentConfig


def small_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig(epochs=4, batch_size=32, eval_batch_size=64)
    cfg.model.hidden = [24, 24]
    cfg.data.synthetic.classes = 4
    cfg.data.synthetic.samples_per_class = 80
    cfg.data.synthetic.dim = 12
    cfg.output.figures = False
    for key, value in overrides.items():
        target = cfg
        *path, last = key.split("__")
        for part in path:
            target = getattr(target, part)
        setattr(target, last, value)
    return cfg.validate()


@pytest.fixture
def make_config():
    return lambda **kw: copy.deepcopy(small_config(**kw))


# --- one pass/fail line per acceptance criterion ------------------------------

_criteria: dict[str, list] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        name = getattr(item, "originalname", item.name)
        if name.startswith("test_criterion_"):
            doc = (item.function.__doc__ or "").strip().splitlines()
            _criteria[item.nodeid] = [name, doc[0] if doc else "", None, ""]


def pytest_runtest_logreport(report):
    entry = _criteria.get(report.nodeid)
    if entry is None:
        return
    if report.skipped:
        entry[2] = "SKIP"
        reason = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        entry[3] = reason.replace("Skipped: ", "")
    elif report.failed:
        entry[2] = "FAIL"
    elif report.when == "call" and entry[2] is None:
        entry[2] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, doc, status, reason in _criteria.values():
        line = f"{status or 'NOT RUN':<7} {name}: {doc}"
        if reason:
            line += f"  ({reason})"
        terminalreporter.write_line(line)
