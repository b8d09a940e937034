import importlib.resources as resources

import pytest

from radialkb.corpus import Lexicon, load_lexicon


def data_text(name: str) -> str:
    return (resources.files("radialkb") / "data" / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def demo_lexicon() -> Lexicon:
    return load_lexicon(data_text("lexicon_small.tsv").splitlines())


@pytest.fixture(scope="session")
def reduced_lexicon(demo_lexicon) -> Lexicon:
    """The 200-word desk-scale lexicon used across optimizer tests."""
    return demo_lexicon.top(200)
