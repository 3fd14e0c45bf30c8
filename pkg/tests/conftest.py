import pytest

from l2h.complexes import presentation_complex
from l2h.groups import infer_descriptor
from l2h.presentation import load_presentation, parse_presentation
from l2h.cli import corpus_path

CORPUS = ["circle", "f2", "torus", "rp2", "f2xf2", "f2cubed"]


def load(name):
    P = load_presentation(str(corpus_path(name + ".grp")))
    return P, infer_descriptor(P)


def from_text(text):
    P = parse_presentation(text)
    return P, infer_descriptor(P)


@pytest.fixture(scope="session")
def corpus():
    out = {}
    for name in CORPUS:
        P, g = load(name)
        out[name] = (P, g, presentation_complex(P, g))
    return out


@pytest.fixture(scope="session")
def f2cubed_record():
    """The full construction on the triple product, shared by several test files."""
    from l2h.construction import construct

    import time

    P, g = load("f2cubed")
    start = time.perf_counter()
    rec = construct(P, g)
    rec.elapsed = time.perf_counter() - start
    return rec


ACCEPTANCE = {}


def record_criterion(number, ok, detail=""):
    ACCEPTANCE[number] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
