from importlib import resources

import pytest

from funtag.corpus import load_corpus, parse_sentence_line
from funtag.grammar import default_grammar
from funtag.model import train

# Figure 3: input chunks and the expected tagged output.
FIG3_INPUT = ("NC[မမ/n.person]#CC[နှင့်/cc.chunk]#NC[လှလှ/n.person]#PPC[သည်/ppm.subj]"
              "#NC[ကျောင်း/n.location]#PPC[သို့/ppm.place]#NC[စက်ဘီး/n.objects]"
              "#PPC[ဖြင့်/ppm.use]#VC[သွား/v.common]#SFC[သည်/sf]။")
FIG3_OUTPUT = ("PSubj[မမ]#CCC[နှင့်]#PSubj[လှလှ]#SubjP[သည်]#PPla[ကျောင်း]#PlaP[သို့]"
               "#PUse[စက်ဘီး]#UseP[ဖြင့်]#Active[သွားသည်]။")
FIG3_TAGS = ["PSubj", "CCC", "PSubj", "SubjP", "PPla", "PlaP", "PUse", "UseP", "Active"]

# Tag sequences of the four parsing figures.
FIG4 = ["PSubj", "SubjP", "PObj", "ObjP", "PPcomplO", "PcomplOP", "Active"]
FIG5 = ["Subj", "Active", "CCP", "Subj", "Active"]
FIG6 = ["Subj", "Active", "CCA", "PSubj", "SubjP", "Ada"]
FIG7 = ["Subj", "Ada", "CCS", "PSubj", "SubjP", "PObj", "ObjP", "Active"]


def sample_corpus_path():
    return resources.files("funtag").joinpath("data").joinpath("sample_corpus.txt")


@pytest.fixture(scope="session")
def sample_corpus():
    with sample_corpus_path().open(encoding="utf-8") as f:
        return load_corpus(f)


@pytest.fixture(scope="session")
def demo_model(sample_corpus):
    return train(sample_corpus)


@pytest.fixture(scope="session")
def grammar():
    return default_grammar()


@pytest.fixture
def fig3_sentence():
    return parse_sentence_line(FIG3_INPUT)


# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
