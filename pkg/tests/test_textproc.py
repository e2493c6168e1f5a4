import pytest
from hypothesis import given
from hypothesis import strategies as st

from lectern.errors import InvalidParams
from lectern.textproc import FilterConfig, Sentence, filter_sentences, retained_sentences, segment_sentences


def texts(raw):
    return [s.text for s in segment_sentences(raw)]


def as_sentences(*items):
    return [Sentence(i, t) for i, t in enumerate(items)]


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("Hello there. How are you?", ["Hello there.", "How are you?"]),
        ("We will talk to Dr. Ana Ruiz.", ["We will talk to Dr. Ana Ruiz."]),
        ("TD (0) converges. Yeah.", ["TD (0) converges.", "Yeah."]),
        ("The U.S. is large. Pi is 3.14 here.", ["The U.S. is large.", "Pi is 3.14 here."]),
        ("Use e.g. Python. Or not!", ["Use e.g. Python.", "Or not!"]),
        ('He said "stop." Then left.', ['He said "stop."', "Then left."]),
        ('Really? "Yes," she said.', ["Really?", '"Yes," she said.']),
        ("lowercase after. period stays joined.", ["lowercase after. period stays joined."]),
        ("Wait... What happened?", ["Wait...", "What happened?"]),
        ("", []),
    ],
)
def test_segment(raw, expected):
    assert texts(raw) == expected


def test_original_index_is_position():
    out = segment_sentences("One two. Three four. Five six.")
    assert [s.original_index for s in out] == [0, 1, 2]


def test_title_and_name_sentence_kept_whole():
    raw = "Up next, my colleague Prof. Lee and Dr. Ana Ruiz, both from the institute, join us for a chat."
    assert len(segment_sentences(raw)) == 1


def test_filter_leading_conjunction():
    out = filter_sentences(as_sentences("And that is all.", "The model converges here today."), FilterConfig())
    assert [s.text for s in out] == ["The model converges here today."]
    assert out[0].original_index == 1


def test_filter_banned_pattern_case_insensitive():
    assert filter_sentences(as_sentences("Now try the quiz below please."), FilterConfig()) == []
    assert filter_sentences(as_sentences("Now try the QUIZ below please."), FilterConfig()) == []


def test_filter_length_window():
    cfg = FilterConfig(min_tokens=5, max_tokens=8)
    out = filter_sentences(as_sentences("Too short here.", "This one is just right okay.", " ".join(["w"] * 9)), cfg)
    assert [s.original_index for s in out] == [1]


def test_conjunction_punctuation_stripped():
    out = filter_sentences(as_sentences('"But, the model is simple enough."'), FilterConfig())
    assert out == []


def test_filter_config_validation():
    with pytest.raises(InvalidParams):
        FilterConfig(min_tokens=10, max_tokens=5)
    with pytest.raises(InvalidParams):
        FilterConfig.from_dict({"min_tokens": "5"})
    with pytest.raises(InvalidParams):
        FilterConfig.from_dict({"surprise": 1})
    cfg = FilterConfig.from_dict({"leading_conjunctions": ["And", "OR"]})
    assert cfg.leading_conjunctions == {"and", "or"}
    assert FilterConfig.from_dict(FilterConfig().to_dict()) == FilterConfig()


def test_fixture_sizes(ihie_text, td0_text):
    assert len(retained_sentences(ihie_text)) == 34
    assert len(retained_sentences(td0_text)) == 40


word = st.text(alphabet="abcdefgXYZ.,?!\"'", min_size=1, max_size=7)
paragraph = st.lists(word, min_size=0, max_size=40).map(" ".join)


@given(paragraph)
def test_segmentation_preserves_words(raw):
    assert " ".join(texts(raw)).split() == raw.split()


@given(st.lists(word, min_size=0, max_size=60).map(" ".join))
def test_filter_idempotent_and_subsequence(raw):
    cfg = FilterConfig(min_tokens=2, max_tokens=6)
    sentences = segment_sentences(raw)
    once = filter_sentences(sentences, cfg)
    assert filter_sentences(once, cfg) == once
    it = iter(sentences)
    assert all(s in it for s in once)
    indices = [s.original_index for s in once]
    assert indices == sorted(set(indices))
